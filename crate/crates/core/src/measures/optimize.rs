//! Minimization over the qubit measurement sphere `(θ, φ) ∈ [0, π/2]×[0, 2π]`.
//!
//! A dense grid locates the basin, then compass-style coordinate descent
//! refines it. Grid values come back in θ-major order and the argmin keeps
//! the first minimum, so ties resolve to the smaller θ, then the smaller φ,
//! whatever backend evaluated them.

use std::f64::consts::{FRAC_PI_2, TAU};

use crate::error::Result;
use crate::exec::Backend;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasisOptimizer {
    pub theta_points: usize,
    pub phi_points: usize,
    /// Objective improvement below which refinement stops.
    pub tolerance: f64,
    pub backend: Backend,
}

impl Default for BasisOptimizer {
    fn default() -> Self {
        Self {
            theta_points: 65,
            phi_points: 129,
            tolerance: 1e-9,
            backend: Backend::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizedBasis {
    pub theta: f64,
    pub phi: f64,
    /// Objective after refinement.
    pub value: f64,
    /// Best objective on the grid alone.
    pub grid_value: f64,
    pub evaluations: usize,
}

const MIN_STEP: f64 = 1e-10;
const MIN_HALVINGS: usize = 12;

impl BasisOptimizer {
    pub fn with_backend(backend: Backend) -> Self {
        Self {
            backend,
            ..Self::default()
        }
    }

    pub fn grid(&self) -> Vec<(f64, f64)> {
        let nt = self.theta_points.max(2);
        let np = self.phi_points.max(2);
        let mut points = Vec::with_capacity(nt * np);
        for i in 0..nt {
            let theta = FRAC_PI_2 * i as f64 / (nt - 1) as f64;
            for j in 0..np {
                points.push((theta, TAU * j as f64 / (np - 1) as f64));
            }
        }
        points
    }

    pub fn minimize<F>(&self, objective: F) -> Result<OptimizedBasis>
    where
        F: Fn(f64, f64) -> Result<f64> + Sync + Send,
    {
        let points = self.grid();
        let values = self.backend.map(&points, |&(t, p)| objective(t, p));
        let mut best = (0.0, 0.0, f64::INFINITY);
        for (&(t, p), v) in points.iter().zip(values) {
            let v = v?;
            if v < best.2 {
                best = (t, p, v);
            }
        }
        let grid_value = best.2;
        let mut evaluations = points.len();

        let (mut theta, mut phi, mut value) = best;
        let mut h_theta = FRAC_PI_2 / (self.theta_points.max(2) - 1) as f64;
        let mut h_phi = TAU / (self.phi_points.max(2) - 1) as f64;
        let mut halvings = 0;
        let mut stage_start = value;
        loop {
            let mut moved = false;
            for (dt, dp) in [(h_theta, 0.0), (-h_theta, 0.0), (0.0, h_phi), (0.0, -h_phi)] {
                let t = (theta + dt).clamp(0.0, FRAC_PI_2);
                let p = (phi + dp).rem_euclid(TAU);
                if t == theta && dp == 0.0 {
                    continue;
                }
                let v = objective(t, p)?;
                evaluations += 1;
                if v < value {
                    theta = t;
                    phi = p;
                    value = v;
                    moved = true;
                    break;
                }
            }
            if moved {
                continue;
            }
            h_theta *= 0.5;
            h_phi *= 0.5;
            halvings += 1;
            let gained = stage_start - value;
            stage_start = value;
            if h_theta.max(h_phi) < MIN_STEP || (halvings >= MIN_HALVINGS && gained < self.tolerance) {
                break;
            }
        }
        Ok(OptimizedBasis {
            theta,
            phi,
            value,
            grid_value,
            evaluations,
        })
    }
}
