//! TOML experiment configurations: one experiment kind per file, grids
//! expanded in a documented deterministic order.

use serde::Deserialize;

use crate::error::{CliError, ExitCode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    BilinearSweep,
    MeasureSweep,
    Extremizer,
    Imethod,
    Decay,
}

impl Kind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::BilinearSweep => "bilinear-sweep",
            Kind::MeasureSweep => "measure-sweep",
            Kind::Extremizer => "extremizer",
            Kind::Imethod => "imethod",
            Kind::Decay => "decay",
        }
    }

    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "bilinear-sweep" => Ok(Kind::BilinearSweep),
            "measure-sweep" => Ok(Kind::MeasureSweep),
            "extremizer" => Ok(Kind::Extremizer),
            "imethod" => Ok(Kind::Imethod),
            "decay" => Ok(Kind::Decay),
            other => Err(CliError::new(
                ExitCode::Config,
                format!("unknown experiment kind '{other}'"),
            )),
        }
    }
}

fn default_draws() -> usize {
    5
}
fn default_modes() -> usize {
    128
}
fn default_thickness() -> f64 {
    1.0
}
fn default_t() -> Vec<f64> {
    vec![1.0]
}
fn default_dt() -> f64 {
    5e-4
}
fn default_nonlinearity() -> f64 {
    1.0
}
fn default_k() -> u32 {
    1
}
fn default_seed() -> u64 {
    0
}
fn default_max_work() -> f64 {
    5e10
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Limits {
    /// Abstract work-unit ceiling (pair interactions, slice operations, or
    /// grid-point-steps depending on the experiment).
    #[serde(default = "default_max_work")]
    pub max_work_units: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Self { max_work_units: default_max_work() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BilinearGrid {
    pub lambda: Vec<f64>,
    pub n2: Vec<u64>,
    /// Explicit N1 list; cells with N1 < N2 are a validation error.
    #[serde(default)]
    pub n1: Option<Vec<u64>>,
    /// Alternative: per-N2 dyadic ladder from N2 up to this maximum.
    #[serde(default)]
    pub n1_ladder_max: Option<u64>,
    #[serde(default = "default_t")]
    pub t: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BilinearConfig {
    pub kind: String,
    pub m: usize,
    pub n: usize,
    pub grid: BilinearGrid,
    #[serde(default = "default_draws")]
    pub draws: usize,
    #[serde(default = "default_modes")]
    pub modes_per_field: usize,
    /// Euclidean box; when absent the sweep uses 32 for local runs and
    /// `32 sqrt(T)` per cell for the global (m >= 2) runs.
    #[serde(default)]
    pub box_length: Option<f64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub limits: Limits,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureConfig {
    pub kind: String,
    pub m: usize,
    pub n: usize,
    pub lambda: Vec<f64>,
    pub n2: Vec<u64>,
    pub n1_over_n2: Vec<u64>,
    #[serde(default = "default_draws")]
    pub draws: usize,
    #[serde(default = "default_thickness")]
    pub thickness: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub limits: Limits,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtremizerConfig {
    pub kind: String,
    pub family: String,
    pub lambda: Vec<f64>,
    pub n1: Vec<u64>,
    pub n2: u64,
    /// Horizons for the global-failure family (ignored by the others).
    #[serde(default)]
    pub t: Option<Vec<f64>>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub limits: Limits,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImethodConfig {
    pub kind: String,
    pub s: f64,
    /// Torus-rescaling exponent; "from-s" means (1-s)/s.
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default = "default_k")]
    pub k: u32,
    pub n: Vec<u64>,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_nonlinearity")]
    pub nonlinearity: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub limits: Limits,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayConfig {
    pub kind: String,
    pub t: Vec<f64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub limits: Limits,
}

#[derive(Debug, Clone)]
pub enum Config {
    Bilinear(BilinearConfig),
    Measure(MeasureConfig),
    Extremizer(ExtremizerConfig),
    Imethod(ImethodConfig),
    Decay(DecayConfig),
}

impl Config {
    pub fn kind(&self) -> Kind {
        match self {
            Config::Bilinear(_) => Kind::BilinearSweep,
            Config::Measure(_) => Kind::MeasureSweep,
            Config::Extremizer(_) => Kind::Extremizer,
            Config::Imethod(_) => Kind::Imethod,
            Config::Decay(_) => Kind::Decay,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            Config::Bilinear(c) => c.seed,
            Config::Measure(c) => c.seed,
            Config::Extremizer(c) => c.seed,
            Config::Imethod(c) => c.seed,
            Config::Decay(c) => c.seed,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            Config::Bilinear(c) => c.seed = seed,
            Config::Measure(c) => c.seed = seed,
            Config::Extremizer(c) => c.seed = seed,
            Config::Imethod(c) => c.seed = seed,
            Config::Decay(c) => c.seed = seed,
        }
    }

}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::new(ExitCode::Config, msg)
}

pub fn load(path: &std::path::Path, expected: Kind) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_err(format!("cannot read config {}: {e}", path.display())))?;
    let head: toml::Value =
        toml::from_str(&text).map_err(|e| config_err(format!("config parse error: {e}")))?;
    let kind_str = head
        .get("kind")
        .and_then(|v| v.as_str())
        .ok_or_else(|| config_err("config must declare a string field 'kind'"))?;
    let kind = Kind::parse(kind_str)?;
    if kind != expected {
        return Err(config_err(format!(
            "config kind '{}' does not match the '{}' subcommand",
            kind_str,
            expected.as_str()
        )));
    }
    let parsed = match kind {
        Kind::BilinearSweep => Config::Bilinear(
            toml::from_str(&text).map_err(|e| config_err(format!("config error: {e}")))?,
        ),
        Kind::MeasureSweep => Config::Measure(
            toml::from_str(&text).map_err(|e| config_err(format!("config error: {e}")))?,
        ),
        Kind::Extremizer => Config::Extremizer(
            toml::from_str(&text).map_err(|e| config_err(format!("config error: {e}")))?,
        ),
        Kind::Imethod => Config::Imethod(
            toml::from_str(&text).map_err(|e| config_err(format!("config error: {e}")))?,
        ),
        Kind::Decay => Config::Decay(
            toml::from_str(&text).map_err(|e| config_err(format!("config error: {e}")))?,
        ),
    };
    validate(&parsed)?;
    Ok(parsed)
}

fn kind_field(config: &Config) -> &str {
    match config {
        Config::Bilinear(c) => &c.kind,
        Config::Measure(c) => &c.kind,
        Config::Extremizer(c) => &c.kind,
        Config::Imethod(c) => &c.kind,
        Config::Decay(c) => &c.kind,
    }
}

fn validate(config: &Config) -> Result<(), CliError> {
    if kind_field(config) != config.kind().as_str() {
        return Err(config_err("config 'kind' does not match its schema"));
    }
    match config {
        Config::Bilinear(c) => {
            if c.grid.lambda.is_empty() || c.grid.n2.is_empty() || c.grid.t.is_empty() {
                return Err(config_err("bilinear grid must be nonempty in lambda, n2 and t"));
            }
            if c.grid.lambda.iter().any(|&l| !(l > 0.0)) {
                return Err(config_err("lambda entries must be positive"));
            }
            if c.grid.t.iter().any(|&t| !(t > 0.0)) {
                return Err(config_err("t entries must be positive"));
            }
            match (&c.grid.n1, c.grid.n1_ladder_max) {
                (Some(list), None) => {
                    if list.is_empty() {
                        return Err(config_err("n1 list must be nonempty"));
                    }
                    let max_n2 = *c.grid.n2.iter().max().unwrap();
                    if list.iter().any(|&n1| n1 < max_n2) {
                        return Err(config_err(
                            "N1 >= N2 must hold elementwise after grid expansion",
                        ));
                    }
                }
                (None, Some(max)) => {
                    if c.grid.n2.iter().any(|&n2| n2 > max) {
                        return Err(config_err("n1_ladder_max must dominate every n2"));
                    }
                }
                _ => {
                    return Err(config_err(
                        "exactly one of grid.n1 or grid.n1_ladder_max must be given",
                    ))
                }
            }
            for &n2 in &c.grid.n2 {
                if n2 == 0 || !n2.is_power_of_two() {
                    return Err(config_err("n2 entries must be dyadic (powers of two >= 1)"));
                }
            }
            if c.draws == 0 || c.modes_per_field == 0 {
                return Err(config_err("draws and modes_per_field must be positive"));
            }
            let valid_geom = (c.m == 1 && c.n == 1) || (c.m >= 2 && c.n >= 1);
            if !valid_geom {
                return Err(config_err(format!(
                    "(m, n) = ({}, {}) has no predicted constant; use (1,1) or m >= 2",
                    c.m, c.n
                )));
            }
            if c.m + c.n > 4 {
                return Err(config_err("at most 4 directions are supported"));
            }
        }
        Config::Measure(c) => {
            if c.lambda.is_empty() || c.n2.is_empty() || c.n1_over_n2.is_empty() {
                return Err(config_err("measure grid must be nonempty"));
            }
            if !(c.thickness > 0.0) {
                return Err(config_err("thickness must be positive"));
            }
            if c.draws < 100 {
                return Err(config_err("measure sweeps need at least 100 draws per cell"));
            }
            if !(c.n == 1 && (c.m == 1 || c.m == 2)) {
                return Err(config_err("measure sweeps cover (m, n) in {(1,1), (2,1)}"));
            }
        }
        Config::Extremizer(c) => {
            parse_family(&c.family)?;
            if c.lambda.is_empty() || c.n1.is_empty() {
                return Err(config_err("extremizer grids must be nonempty"));
            }
            if c.n1.iter().any(|&n1| n1 < c.n2) {
                return Err(config_err("N1 >= N2 must hold elementwise"));
            }
            if c.family == "global-failure" {
                let t = c.t.as_ref().ok_or_else(|| {
                    config_err("global-failure needs a list of horizons 't'")
                })?;
                if t.len() < 2 || t.iter().any(|&x| x <= 1.0) {
                    return Err(config_err("global-failure horizons: >= 2 values, all > 1"));
                }
            }
        }
        Config::Imethod(c) => {
            if !(c.s > 0.5 && c.s < 1.0) {
                return Err(config_err("regularity s must lie in (1/2, 1)"));
            }
            if c.n.len() < 2 {
                return Err(config_err("imethod needs a ladder of at least 2 cutoffs"));
            }
            if c.n.iter().any(|&n| n == 0 || !n.is_power_of_two()) {
                return Err(config_err("cutoffs must be dyadic"));
            }
            if !(c.dt > 0.0 && c.dt <= 0.1) {
                return Err(config_err("dt must lie in (0, 0.1]"));
            }
            if let Some(a) = c.alpha {
                if !(0.0..=1.0).contains(&a) {
                    return Err(config_err("alpha must lie in [0, 1]"));
                }
            }
            if c.k == 0 {
                return Err(config_err("nonlinearity index k must be >= 1"));
            }
        }
        Config::Decay(c) => {
            if c.t.is_empty() {
                return Err(config_err("decay needs a nonempty list of times"));
            }
            if c.t.iter().any(|&t| t < 2.0) {
                return Err(config_err("decay times must be >= 2"));
            }
        }
    }
    Ok(())
}

pub fn parse_family(s: &str) -> Result<wglab::extremizers::ExtremizerFamily, CliError> {
    use wglab::extremizers::ExtremizerFamily as F;
    match s {
        "real-separated" => Ok(F::RealSeparated),
        "torus-1d" => Ok(F::Torus1d),
        "torus-highd" => Ok(F::TorusHighd),
        "global-failure" => Ok(F::GlobalFailure),
        other => Err(config_err(format!("unknown extremizer family '{other}'"))),
    }
}

/// Expanded N1 values for one N2 cell.
pub fn n1_values(grid: &BilinearGrid, n2: u64) -> Vec<u64> {
    match (&grid.n1, grid.n1_ladder_max) {
        (Some(list), _) => list.clone(),
        (None, Some(max)) => {
            let mut v = vec![];
            let mut n1 = n2;
            while n1 <= max {
                v.push(n1);
                n1 *= 2;
            }
            v
        }
        _ => unreachable!("validated"),
    }
}
