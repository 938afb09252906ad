//! Flat `key=value` experiment configuration.
//!
//! ```text
//! # comment
//! experiment = correspondence
//! [grid]
//! a = 0
//! b = 4
//! n = 512
//! [tolerances]
//! expectation_error = 1e-3
//! ```
//!
//! Keys may appear bare (`n=512`), qualified (`grid.n=512`) or under a
//! `[section]` header. Tolerance overrides use `[tolerances]` or the `tol.`
//! prefix. Unknown sections, keys and tolerance names are errors.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::grid::Topology;

/// Largest grid the dense operators are built on.
pub const MAX_GRID_POINTS: usize = 4096;
/// Smallest base grid for a convergence study.
pub const MIN_STUDY_POINTS: usize = 16;
/// Fewest grid levels for a fitted convergence order.
pub const MIN_REFINEMENTS: usize = 3;
pub const MAX_FOCK_DIM: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid value for `{key}`: {message}")]
    Invalid { key: String, message: String },

    #[error("unknown key `{0}`")]
    UnknownKey(String),

    #[error("missing required key `{0}`")]
    Missing(String),

    #[error("unknown experiment `{name}`; valid experiments: {valid}")]
    UnknownExperiment { name: String, valid: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Experiment {
    Hermiticity,
    Correspondence,
    Displacement,
    HeisenbergFlow,
    FreeParticleDivergence,
    Massless,
    NegativeMass,
    OscillatorExpectation,
    JumpTime,
    ConvergenceStudy,
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Experiment::Hermiticity,
        Experiment::Correspondence,
        Experiment::Displacement,
        Experiment::HeisenbergFlow,
        Experiment::FreeParticleDivergence,
        Experiment::Massless,
        Experiment::NegativeMass,
        Experiment::OscillatorExpectation,
        Experiment::JumpTime,
        Experiment::ConvergenceStudy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Hermiticity => "hermiticity",
            Experiment::Correspondence => "correspondence",
            Experiment::Displacement => "displacement",
            Experiment::HeisenbergFlow => "heisenberg_flow",
            Experiment::FreeParticleDivergence => "free_particle_divergence",
            Experiment::Massless => "massless",
            Experiment::NegativeMass => "negative_mass",
            Experiment::OscillatorExpectation => "oscillator_expectation",
            Experiment::JumpTime => "jump_time",
            Experiment::ConvergenceStudy => "convergence_study",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Experiment::Hermiticity => {
                "<tf|g> = <f|tg> for time/momentum/kinetic/displacement operators, periodic and closed grids"
            }
            Experiment::Correspondence => "plane-wave <t> against the transit time m(b-a)/p, with convergence order",
            Experiment::Displacement => "plane-wave <D> against the interval length b-a",
            Experiment::HeisenbergFlow => "d<t>/dt from [t, H] in both sign conventions, target 0",
            Experiment::FreeParticleDivergence => "<t> over doubling intervals grows without bound, slope m/p",
            Experiment::Massless => "m = 0 gives the zero time operator and <t> = 0",
            Experiment::NegativeMass => "sign of m(b-a)/p with p = mv stays positive for forward motion",
            Experiment::OscillatorExpectation => {
                "<n|t|n> = 0 in the ladder basis, plus grid/ladder momentum cross-check"
            }
            Experiment::JumpTime => "dt >= hbar/(2 dE) and the jump-time bound tau_J <= dt",
            Experiment::ConvergenceStudy => "error against h for <t> and the hermiticity consistency residual",
        }
    }

    /// Tolerance names the experiment accepts as overrides.
    pub fn tolerance_names(self) -> &'static [&'static str] {
        match self {
            Experiment::Hermiticity => &["periodic_residual", "closed_residual", "refinement_ratio"],
            Experiment::Correspondence => &["expectation_error", "convergence_order"],
            Experiment::Displacement => &["expectation_error", "refinement_ratio"],
            Experiment::HeisenbergFlow => &["rate", "commutator", "ehrenfest"],
            Experiment::FreeParticleDivergence => &["interval_relative", "slope_relative"],
            Experiment::Massless => &[],
            Experiment::NegativeMass => &["closed_form_relative", "expectation_error"],
            Experiment::OscillatorExpectation => &["cross_check"],
            Experiment::JumpTime => &[],
            Experiment::ConvergenceStudy => &["convergence_order", "refinement_ratio", "closed_residual"],
        }
    }

    fn valid_list() -> String {
        Experiment::ALL.iter().map(|e| e.name()).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| ConfigError::UnknownExperiment { name: s.to_string(), valid: Experiment::valid_list() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("expected csv or json, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GridSpec {
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub n: Option<usize>,
    pub topology: Option<Topology>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ParticleSpec {
    pub m: Option<f64>,
    pub p: Option<f64>,
    pub v: Option<f64>,
    pub hbar: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FockSpec {
    pub dim: Option<usize>,
    pub omega: Option<f64>,
    pub p_eff: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScanSpec {
    pub doublings: Option<usize>,
    pub refinements: Option<usize>,
}

/// Unset fields fall back to per-experiment defaults at run time.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub grid: GridSpec,
    pub particle: ParticleSpec,
    pub fock: FockSpec,
    pub scan: ScanSpec,
    pub tolerances: BTreeMap<String, f64>,
    pub format: Format,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        ExperimentConfig {
            experiment,
            grid: GridSpec::default(),
            particle: ParticleSpec::default(),
            fock: FockSpec::default(),
            scan: ScanSpec::default(),
            tolerances: BTreeMap::new(),
            format: Format::default(),
        }
    }

    pub fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("", &["experiment"]),
    ("grid", &["a", "b", "n", "topology"]),
    ("particle", &["m", "p", "v", "hbar"]),
    ("fock", &["dim", "omega", "p_eff"]),
    ("scan", &["doublings", "refinements"]),
    ("output", &["format"]),
];

fn section_of(key: &str) -> Option<&'static str> {
    SECTIONS.iter().find(|(_, keys)| keys.contains(&key)).map(|(s, _)| *s)
}

/// Canonical `section.key` (or `experiment`) for a possibly qualified key.
fn canonical_key(section: Option<&str>, key: &str) -> Result<String, String> {
    let (section, key) = match (section, key.split_once('.')) {
        (_, Some(("tol", name))) => (Some("tolerances"), name),
        (Some(s), Some((q, k))) if s == q => (Some(s), k),
        (Some(s), Some(_)) => return Err(format!("qualified key `{key}` inside section [{s}]")),
        (None, Some((q, k))) => (Some(q), k),
        (s, None) => (s, key),
    };
    if key.is_empty() {
        return Err("empty key".into());
    }
    if section == Some("tolerances") {
        return Ok(format!("tolerances.{key}"));
    }
    let home = section_of(key).ok_or_else(|| format!("unknown key `{key}`"))?;
    match section {
        Some(s) if s != home && !(s.is_empty() && home.is_empty()) => {
            if SECTIONS.iter().any(|(name, _)| *name == s) {
                Err(format!("key `{key}` does not belong to section [{s}]"))
            } else {
                Err(format!("unknown section `{s}`"))
            }
        }
        _ if home.is_empty() => Ok(key.to_string()),
        _ => Ok(format!("{home}.{key}")),
    }
}

/// Ordered raw entries with the source line of each, before validation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigEntries {
    entries: BTreeMap<String, (String, usize)>,
}

impl ConfigEntries {
    pub fn parse(source: &str) -> Result<Self, ConfigError> {
        let mut out = ConfigEntries::default();
        let mut section: Option<String> = None;
        for (idx, raw) in source.lines().enumerate() {
            let line = idx + 1;
            let text = raw.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            if let Some(rest) = text.strip_prefix('[') {
                let name = rest.strip_suffix(']').map(str::trim).ok_or_else(|| ConfigError::Parse {
                    line,
                    message: format!("malformed section header `{text}`"),
                })?;
                if name != "tolerances" && !SECTIONS.iter().any(|(s, _)| !s.is_empty() && *s == name) {
                    return Err(ConfigError::Parse { line, message: format!("unknown section `{name}`") });
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = text
                .split_once('=')
                .ok_or_else(|| ConfigError::Parse { line, message: format!("expected key=value, got `{text}`") })?;
            let key = canonical_key(section.as_deref(), key.trim())
                .map_err(|message| ConfigError::Parse { line, message })?;
            if out.entries.contains_key(&key) {
                return Err(ConfigError::Parse { line, message: format!("duplicate key `{key}`") });
            }
            out.entries.insert(key, (value.trim().to_string(), line));
        }
        Ok(out)
    }

    /// Apply a `key=value` override (CLI `--set`); replaces any file value.
    pub fn set(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, value) = assignment.split_once('=').ok_or_else(|| ConfigError::Parse {
            line: 0,
            message: format!("expected key=value, got `{assignment}`"),
        })?;
        let key = canonical_key(None, key.trim()).map_err(|_| ConfigError::UnknownKey(key.trim().to_string()))?;
        self.entries.insert(key, (value.trim().to_string(), 0));
        Ok(())
    }

    pub fn build(&self) -> Result<ExperimentConfig, ConfigError> {
        let experiment: Experiment =
            self.entries.get("experiment").ok_or_else(|| ConfigError::Missing("experiment".into()))?.0.parse()?;
        let mut cfg = ExperimentConfig::new(experiment);
        for (key, (value, _)) in &self.entries {
            let invalid = |message: String| ConfigError::Invalid { key: key.clone(), message };
            match key.as_str() {
                "experiment" => {}
                "grid.a" => cfg.grid.a = Some(finite(value).map_err(invalid)?),
                "grid.b" => cfg.grid.b = Some(finite(value).map_err(invalid)?),
                "grid.n" => cfg.grid.n = Some(count(value).map_err(invalid)?),
                "grid.topology" => {
                    cfg.grid.topology = Some(match value.as_str() {
                        "closed" => Topology::Closed,
                        "periodic" => Topology::Periodic,
                        other => return Err(invalid(format!("expected closed or periodic, got `{other}`"))),
                    })
                }
                "particle.m" => cfg.particle.m = Some(finite(value).map_err(invalid)?),
                "particle.p" => cfg.particle.p = Some(finite(value).map_err(invalid)?),
                "particle.v" => cfg.particle.v = Some(finite(value).map_err(invalid)?),
                "particle.hbar" => cfg.particle.hbar = Some(positive(value).map_err(invalid)?),
                "fock.dim" => cfg.fock.dim = Some(count(value).map_err(invalid)?),
                "fock.omega" => cfg.fock.omega = Some(positive(value).map_err(invalid)?),
                "fock.p_eff" => cfg.fock.p_eff = Some(finite(value).map_err(invalid)?),
                "scan.doublings" => cfg.scan.doublings = Some(count(value).map_err(invalid)?),
                "scan.refinements" => cfg.scan.refinements = Some(count(value).map_err(invalid)?),
                "output.format" => cfg.format = value.parse().map_err(invalid)?,
                k => {
                    let name = k.strip_prefix("tolerances.").ok_or_else(|| ConfigError::UnknownKey(k.to_string()))?;
                    if !experiment.tolerance_names().contains(&name) {
                        return Err(ConfigError::UnknownKey(format!(
                            "tol.{name} (experiment {experiment} accepts: {})",
                            experiment.tolerance_names().join(", ")
                        )));
                    }
                    cfg.tolerances.insert(name.to_string(), positive(value).map_err(invalid)?);
                }
            }
        }
        validate(&cfg)?;
        Ok(cfg)
    }
}

fn finite(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v = finite(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be strictly positive, got {v}"))
    }
}

fn count(s: &str) -> Result<usize, String> {
    s.parse().map_err(|_| format!("`{s}` is not a nonnegative integer"))
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key: key.to_string(), message: message.into() }
}

/// Checks that do not depend on per-experiment defaults; the runner
/// re-checks resolved values.
fn validate(cfg: &ExperimentConfig) -> Result<(), ConfigError> {
    if let (Some(a), Some(b)) = (cfg.grid.a, cfg.grid.b) {
        if b <= a {
            return Err(invalid("grid.b", format!("need b > a, got a = {a}, b = {b}")));
        }
    }
    if let Some(n) = cfg.grid.n {
        if n < 3 {
            return Err(invalid("grid.n", format!("need at least 3 points, got {n}")));
        }
        if n > MAX_GRID_POINTS {
            return Err(invalid("grid.n", format!("at most {MAX_GRID_POINTS} points, got {n}")));
        }
        if cfg.experiment == Experiment::ConvergenceStudy && n < MIN_STUDY_POINTS {
            return Err(invalid(
                "grid.n",
                format!(
                    "convergence_study needs at least {MIN_STUDY_POINTS} base points for refinement headroom, got {n}"
                ),
            ));
        }
    }
    if let Some(r) = cfg.scan.refinements {
        if r < MIN_REFINEMENTS {
            return Err(invalid("scan.refinements", format!("need at least {MIN_REFINEMENTS} grid levels, got {r}")));
        }
    }
    if let Some(d) = cfg.scan.doublings {
        if !(2..=12).contains(&d) {
            return Err(invalid("scan.doublings", format!("need 2..=12 intervals, got {d}")));
        }
    }
    if let Some(dim) = cfg.fock.dim {
        if !(3..=MAX_FOCK_DIM).contains(&dim) {
            return Err(invalid("fock.dim", format!("need 3..={MAX_FOCK_DIM}, got {dim}")));
        }
    }
    Ok(())
}

pub fn parse_config(source: &str) -> Result<ExperimentConfig, ConfigError> {
    ConfigEntries::parse(source)?.build()
}
