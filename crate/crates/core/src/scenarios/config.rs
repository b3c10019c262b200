//! Scenario and sweep configuration documents.
//!
//! Configs are flat TOML. Units: frequencies and rates in s⁻¹, couplings in
//! energy units, times in s, angles in rad. Any numeric key may also be
//! written as a product/quotient expression over numbers and the symbols
//! `pi`, `hbar` and `g`, e.g. `gamma = "0.5g"`, `alpha = "pi/12"`,
//! `t_max = "5*pi*hbar/g"`. `g` is the JCM coupling, or `g_a1` for OH⁺.
//!
//! ```toml
//! model = "jcm"
//! alpha = "pi/6"
//! gamma = "g"
//! measures = ["entropy", "concurrence", "discord"]
//! output_csv = "jcm.csv"
//! ```
//!
//! A document with `axis` and `values` is a sweep over `alpha` or `gamma`.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::path::PathBuf;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::models::{self, BondConvention, JcmParams, ModelParams, ModelSystem, OhPlusParams};
use crate::solver::{self, IntegrationConfig, DEFAULT_SAMPLE_TARGET};
use crate::state::{DensityMatrix, Side};

/// Runaway guard on `t_max / dt`.
pub const MAX_STEPS: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Measure {
    Entropy,
    Concurrence,
    MutualInfo,
    ClassicalCorr,
    Discord,
}

impl Measure {
    pub const ALL: [Measure; 5] = [
        Measure::Entropy,
        Measure::Concurrence,
        Measure::MutualInfo,
        Measure::ClassicalCorr,
        Measure::Discord,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Entropy => "entropy",
            Measure::Concurrence => "concurrence",
            Measure::MutualInfo => "mutual_info",
            Measure::ClassicalCorr => "classical_corr",
            Measure::Discord => "discord",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("key 'measures': unknown measure '{s}'")))
    }
}

/// Requested measures, closed under dependencies: discord pulls in mutual
/// information and classical correlation, mutual information pulls in the entropies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasureSet(BTreeSet<Measure>);

impl MeasureSet {
    pub fn new(measures: impl IntoIterator<Item = Measure>) -> Self {
        let mut set: BTreeSet<Measure> = measures.into_iter().collect();
        if set.contains(&Measure::Discord) {
            set.insert(Measure::MutualInfo);
            set.insert(Measure::ClassicalCorr);
        }
        if set.contains(&Measure::MutualInfo) {
            set.insert(Measure::Entropy);
        }
        Self(set)
    }

    pub fn contains(&self, m: Measure) -> bool {
        self.0.contains(&m)
    }

    pub fn needs_measurement(&self) -> bool {
        self.contains(Measure::ClassicalCorr) || self.contains(Measure::Discord)
    }

    pub fn iter(&self) -> impl Iterator<Item = Measure> + '_ {
        self.0.iter().copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrationSettings {
    pub dt: f64,
    pub t_max: f64,
    pub sample_every: usize,
    pub renormalize: bool,
}

#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    pub model: ModelParams,
    pub integration: IntegrationSettings,
    pub measures: MeasureSet,
    pub measured_side: Side,
    pub output_csv: Option<PathBuf>,
    pub output_plot: Option<PathBuf>,
    pub plot_columns: Vec<String>,
}

impl ScenarioConfig {
    pub fn hbar(&self) -> f64 {
        match &self.model {
            ModelParams::Jcm(p) => p.hbar,
            ModelParams::OhPlus(p) => p.hbar,
        }
    }

    pub fn build_model(&self) -> Result<ModelSystem> {
        match &self.model {
            ModelParams::Jcm(p) => models::build_jcm(p),
            ModelParams::OhPlus(p) => models::build_ohplus(p),
        }
    }

    pub fn initial_state(&self) -> Result<DensityMatrix> {
        match &self.model {
            ModelParams::Jcm(p) => models::initial_state_jcm(p.alpha),
            ModelParams::OhPlus(_) => Ok(models::initial_state_ohplus()),
        }
    }

    pub fn integration_config(&self) -> Result<IntegrationConfig> {
        let s = &self.integration;
        IntegrationConfig::new(s.dt, s.t_max, s.sample_every, s.renormalize, self.hbar())
    }

    /// Re-checks every invariant; used after programmatic edits such as sweep overrides.
    pub fn validate(&self) -> Result<()> {
        let model = self.build_model().map_err(config_error)?;
        let cfg = self.integration_config().map_err(config_error)?;
        cfg.check_against(&model).map_err(config_error)?;
        if self.integration.t_max / self.integration.dt > MAX_STEPS {
            return Err(Error::Config(format!(
                "t_max/dt = {:.3e} exceeds the {MAX_STEPS:e} step limit",
                self.integration.t_max / self.integration.dt
            )));
        }
        if let ModelParams::OhPlus(_) = self.model {
            if self.measures.contains(Measure::Concurrence) {
                return Err(Error::Config("concurrence is only defined for the two-qubit jcm model".into()));
            }
        }
        if self.measures.needs_measurement() && model.split.side(self.measured_side) != 2 {
            return Err(Error::Config(format!(
                "measured_side {} has dimension {}; projective measurements need a qubit",
                self.measured_side,
                model.split.side(self.measured_side)
            )));
        }
        Ok(())
    }
}

trait SplitExt {
    fn side(&self, side: Side) -> usize;
}

impl SplitExt for (usize, usize) {
    fn side(&self, side: Side) -> usize {
        match side {
            Side::A => self.0,
            Side::B => self.1,
        }
    }
}

fn config_error(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    Alpha,
    Gamma,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Alpha => "alpha",
            SweepAxis::Gamma => "gamma",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub base: ScenarioConfig,
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub summary_csv: Option<PathBuf>,
}

impl SweepConfig {
    /// The base config with the axis overridden by `value`.
    pub fn scenario_for(&self, value: f64) -> Result<ScenarioConfig> {
        let mut cfg = self.base.clone();
        match (&mut cfg.model, self.axis) {
            (ModelParams::Jcm(p), SweepAxis::Alpha) => p.alpha = value,
            (ModelParams::Jcm(p), SweepAxis::Gamma) => p.gamma = value,
            (ModelParams::OhPlus(p), SweepAxis::Gamma) => p.gamma = value,
            (ModelParams::OhPlus(_), SweepAxis::Alpha) => {
                return Err(Error::Config("axis 'alpha' does not apply to the ohplus model".into()))
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Debug)]
pub enum ParsedConfig {
    Scenario(ScenarioConfig),
    Sweep(SweepConfig),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum Quantity {
    Number(f64),
    Expr(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    model: String,
    hbar: Option<Quantity>,
    omega: Option<Quantity>,
    g: Option<Quantity>,
    gamma: Option<Quantity>,
    alpha: Option<Quantity>,
    omega_b: Option<Quantity>,
    g_b0: Option<Quantity>,
    g_b1: Option<Quantity>,
    g_a0: Option<Quantity>,
    g_a1: Option<Quantity>,
    bond_convention: Option<String>,
    dt: Option<Quantity>,
    t_max: Option<Quantity>,
    sample_every: Option<i64>,
    renormalize: Option<bool>,
    measures: Option<Vec<String>>,
    measured_side: Option<String>,
    output_csv: Option<PathBuf>,
    output_plot: Option<PathBuf>,
    plot_columns: Option<Vec<String>>,
    axis: Option<String>,
    values: Option<Vec<Quantity>>,
    summary_csv: Option<PathBuf>,
}

/// Symbol table for quantity expressions.
struct Symbols {
    hbar: f64,
    g: Option<f64>,
}

/// Evaluates `a*b/c`-style expressions; a number directly followed by a
/// symbol (`0.5g`) multiplies.
fn eval_expr(key: &str, text: &str, symbols: &Symbols) -> Result<f64> {
    let err = |why: &str| Error::Config(format!("key '{key}': cannot evaluate '{text}': {why}"));
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(err("empty expression"));
    }
    let mut value = 1.0;
    let mut dividing = false;
    let mut rest = compact.as_str();
    let mut expect_factor = true;
    while !rest.is_empty() {
        let c = rest.chars().next().unwrap();
        if c == '*' || c == '/' {
            if expect_factor {
                return Err(err("operator without operand"));
            }
            dividing = c == '/';
            rest = &rest[1..];
            expect_factor = true;
            continue;
        }
        let (factor, consumed) = if c.is_ascii_digit() || c == '.' {
            let end = number_prefix_len(rest);
            let n: f64 = rest[..end].parse().map_err(|_| err("bad number"))?;
            (n, end)
        } else if c.is_ascii_alphabetic() || c == '_' {
            let end = rest
                .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                .unwrap_or(rest.len());
            let value = match &rest[..end] {
                "pi" => PI,
                "hbar" => symbols.hbar,
                "g" => symbols.g.ok_or_else(|| err("'g' is not available here"))?,
                other => return Err(err(&format!("unknown symbol '{other}'"))),
            };
            (value, end)
        } else {
            return Err(err(&format!("unexpected character '{c}'")));
        };
        value = if dividing { value / factor } else { value * factor };
        dividing = false;
        expect_factor = false;
        rest = &rest[consumed..];
    }
    if expect_factor {
        return Err(err("trailing operator"));
    }
    if !value.is_finite() {
        return Err(err("result is not finite"));
    }
    Ok(value)
}

fn number_prefix_len(s: &str) -> usize {
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
        i += 1;
    }
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            j += 1;
        }
        if j < bytes.len() && bytes[j].is_ascii_digit() {
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            return j;
        }
    }
    i
}

fn resolve(key: &str, q: &Option<Quantity>, symbols: &Symbols) -> Result<Option<f64>> {
    match q {
        None => Ok(None),
        Some(Quantity::Number(v)) => Ok(Some(*v)),
        Some(Quantity::Expr(text)) => eval_expr(key, text, symbols).map(Some),
    }
}

fn resolve_or(key: &str, q: &Option<Quantity>, symbols: &Symbols, default: f64) -> Result<f64> {
    Ok(resolve(key, q, symbols)?.unwrap_or(default))
}

fn reject_keys(raw: &RawDocument, model: &str, keys: &[(&str, bool)]) -> Result<()> {
    let _ = raw;
    for (key, present) in keys {
        if *present {
            return Err(Error::Config(format!("key '{key}' does not apply to model '{model}'")));
        }
    }
    Ok(())
}

/// Parses and validates a scenario or sweep document.
pub fn parse_config(text: &str) -> Result<ParsedConfig> {
    let raw: RawDocument = toml::from_str(text).map_err(|e| Error::Config(format!("parse error: {e}")))?;
    let bare = Symbols { hbar: 1.0, g: None };
    let hbar = resolve_or("hbar", &raw.hbar, &bare, 1.0)?;

    let (model, g_symbol) = match raw.model.as_str() {
        "jcm" => {
            reject_keys(
                &raw,
                "jcm",
                &[
                    ("omega_b", raw.omega_b.is_some()),
                    ("g_b0", raw.g_b0.is_some()),
                    ("g_b1", raw.g_b1.is_some()),
                    ("g_a0", raw.g_a0.is_some()),
                    ("g_a1", raw.g_a1.is_some()),
                    ("bond_convention", raw.bond_convention.is_some()),
                ],
            )?;
            let d = JcmParams::default();
            let s = Symbols { hbar, g: None };
            let g = resolve_or("g", &raw.g, &s, d.g)?;
            let s = Symbols { hbar, g: Some(g) };
            let p = JcmParams {
                hbar,
                omega: resolve_or("omega", &raw.omega, &s, d.omega)?,
                g,
                gamma: resolve_or("gamma", &raw.gamma, &s, d.gamma)?,
                alpha: resolve_or("alpha", &raw.alpha, &s, d.alpha)?,
            };
            (ModelParams::Jcm(p), g)
        }
        "ohplus" => {
            reject_keys(&raw, "ohplus", &[("g", raw.g.is_some()), ("alpha", raw.alpha.is_some())])?;
            let d = OhPlusParams::default();
            let s = Symbols { hbar, g: None };
            let g_b0 = resolve_or("g_b0", &raw.g_b0, &s, d.g_b0)?;
            let g_b1 = resolve_or("g_b1", &raw.g_b1, &s, d.g_b1)?;
            let g_a0 = resolve_or("g_a0", &raw.g_a0, &s, d.g_a0)?;
            let g_a1 = resolve_or("g_a1", &raw.g_a1, &s, d.g_a1)?;
            let s = Symbols { hbar, g: Some(g_a1) };
            let bond_convention = match raw.bond_convention.as_deref() {
                None | Some("break_raises_k") => BondConvention::BreakRaisesK,
                Some("break_lowers_k") => BondConvention::BreakLowersK,
                Some(other) => {
                    return Err(Error::Config(format!(
                        "key 'bond_convention': expected 'break_raises_k' or 'break_lowers_k', got '{other}'"
                    )))
                }
            };
            let p = OhPlusParams {
                hbar,
                omega: resolve_or("omega", &raw.omega, &s, d.omega)?,
                omega_b: resolve_or("omega_b", &raw.omega_b, &s, d.omega_b)?,
                g_b0,
                g_b1,
                g_a0,
                g_a1,
                // default γ = g_a1
                gamma: resolve_or("gamma", &raw.gamma, &s, g_a1)?,
                bond_convention,
            };
            (ModelParams::OhPlus(p), g_a1)
        }
        other => {
            return Err(Error::Config(format!("key 'model': expected 'jcm' or 'ohplus', got '{other}'")))
        }
    };
    match &model {
        ModelParams::Jcm(p) => p.validate(),
        ModelParams::OhPlus(p) => p.validate(),
    }
    .map_err(config_error)?;
    let symbols = Symbols { hbar, g: Some(g_symbol) };

    let system = match &model {
        ModelParams::Jcm(p) => models::build_jcm(p),
        ModelParams::OhPlus(p) => models::build_ohplus(p),
    }
    .map_err(config_error)?;

    let t_max = match resolve("t_max", &raw.t_max, &symbols)? {
        Some(t) => t,
        None if g_symbol > 0.0 => 5.0 * PI * hbar / g_symbol,
        None => return Err(Error::Config("key 't_max' is required when the coupling is zero".into())),
    };
    if !(t_max > 0.0) {
        return Err(Error::Config(format!("key 't_max' must be > 0, got {t_max}")));
    }
    let dt = match resolve("dt", &raw.dt, &symbols)? {
        Some(dt) => dt,
        None => solver::default_dt(&system, t_max),
    };
    if !(dt > 0.0) {
        return Err(Error::Config(format!("key 'dt' must be > 0, got {dt}")));
    }
    if t_max / dt > MAX_STEPS {
        return Err(Error::Config(format!(
            "t_max/dt = {:.3e} exceeds the {MAX_STEPS:e} step limit",
            t_max / dt
        )));
    }
    let sample_every = match raw.sample_every {
        Some(n) if n > 0 => n as usize,
        Some(n) => return Err(Error::Config(format!("key 'sample_every' must be positive, got {n}"))),
        None => (((t_max / dt + 1e-9).floor() as usize) / DEFAULT_SAMPLE_TARGET).max(1),
    };

    let measures = match &raw.measures {
        Some(list) => {
            let parsed = list.iter().map(|s| Measure::parse(s)).collect::<Result<Vec<_>>>()?;
            if parsed.is_empty() {
                return Err(Error::Config("key 'measures' must not be empty".into()));
            }
            MeasureSet::new(parsed)
        }
        None => MeasureSet::new(Measure::ALL.into_iter().filter(|m| {
            !(matches!(model, ModelParams::OhPlus(_)) && *m == Measure::Concurrence)
        })),
    };
    let measured_side = match raw.measured_side.as_deref() {
        None | Some("A") | Some("a") => Side::A,
        Some("B") | Some("b") => Side::B,
        Some(other) => return Err(Error::Config(format!("key 'measured_side': expected 'A' or 'B', got '{other}'"))),
    };

    let scenario = ScenarioConfig {
        model,
        integration: IntegrationSettings {
            dt,
            t_max,
            sample_every,
            renormalize: raw.renormalize.unwrap_or(true),
        },
        measures,
        measured_side,
        output_csv: raw.output_csv.clone(),
        output_plot: raw.output_plot.clone(),
        plot_columns: raw.plot_columns.clone().unwrap_or_default(),
    };
    scenario.validate()?;

    match (&raw.axis, &raw.values) {
        (None, None) => {
            if raw.summary_csv.is_some() {
                return Err(Error::Config("key 'summary_csv' only applies to sweeps".into()));
            }
            Ok(ParsedConfig::Scenario(scenario))
        }
        (Some(axis), Some(values)) => {
            let axis = match axis.as_str() {
                "alpha" => SweepAxis::Alpha,
                "gamma" => SweepAxis::Gamma,
                other => return Err(Error::Config(format!("key 'axis': expected 'alpha' or 'gamma', got '{other}'"))),
            };
            if values.is_empty() {
                return Err(Error::Config("key 'values' must not be empty".into()));
            }
            let values = values
                .iter()
                .map(|q| resolve("values", &Some(q.clone()), &symbols).map(|v| v.unwrap_or_default()))
                .collect::<Result<Vec<_>>>()?;
            let sweep = SweepConfig {
                base: scenario,
                axis,
                values,
                summary_csv: raw.summary_csv.clone(),
            };
            for &v in &sweep.values {
                sweep.scenario_for(v)?;
            }
            Ok(ParsedConfig::Sweep(sweep))
        }
        (Some(_), None) => Err(Error::Config("key 'axis' requires 'values'".into())),
        (None, Some(_)) => Err(Error::Config("key 'values' requires 'axis'".into())),
    }
}

pub fn parse_scenario(text: &str) -> Result<ScenarioConfig> {
    match parse_config(text)? {
        ParsedConfig::Scenario(s) => Ok(s),
        ParsedConfig::Sweep(_) => Err(Error::Config("expected a single scenario, found a sweep".into())),
    }
}

pub fn parse_sweep(text: &str) -> Result<SweepConfig> {
    match parse_config(text)? {
        ParsedConfig::Sweep(s) => Ok(s),
        ParsedConfig::Scenario(_) => Err(Error::Config("expected a sweep (keys 'axis' and 'values')".into())),
    }
}
