//! Run configuration: a TOML file with a fixed schema, unknown keys rejected.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use wh_quant::mollifier::IntervalSet;
use wh_quant::LineGrid;

/// Tolerance keys accepted under `[tolerances]`.
pub const TOLERANCE_KEYS: [&str; 3] = ["residual", "hermitian", "normalization"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Window,
    Quantize,
    Spectrum,
    Deficiency,
    Portrait,
    Evolve,
    ValidateApodization,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Window => "window",
            Self::Quantize => "quantize",
            Self::Spectrum => "spectrum",
            Self::Deficiency => "deficiency",
            Self::Portrait => "portrait",
            Self::Evolve => "evolve",
            Self::ValidateApodization => "validate-apodization",
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApodizationKindConfig {
    WeylWigner,
    PureState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiPreset {
    GaussianGround,
    #[serde(rename = "hermite_1")]
    Hermite1,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApodizationConfig {
    pub kind: ApodizationKindConfig,
    pub psi_preset: Option<PsiPreset>,
    /// Two-column `x value` table, relative to the config file.
    pub psi_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetConfig {
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeConfig {
    #[default]
    Spectral,
    CentralDiff,
}

/// Weight `a` (or `u`) fed to the operator-level commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightConfig {
    /// `u_{E,σ}` for each σ.
    #[default]
    SmoothIndicator,
    /// Coherent-state window of `χ_E`, closed form.
    GaussianWindow,
    /// Sampled `χ_E`.
    Indicator,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorConfig {
    Momentum,
    #[default]
    Kinetic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainConfig {
    #[default]
    WholeLine,
    Interval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolConfig {
    Position,
    Momentum,
    #[default]
    Gaussian,
    PositionGaussian,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketConfig {
    pub x0: f64,
    pub width: f64,
    #[serde(default)]
    pub k0: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub grid: GridConfig,
    pub apodization: Option<ApodizationConfig>,
    pub set: Option<SetConfig>,
    pub sigma: Option<f64>,
    pub sigma_sweep: Option<Vec<f64>>,
    #[serde(default)]
    pub scheme: SchemeConfig,
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub emit_plots: bool,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub weight: WeightConfig,
    #[serde(default)]
    pub operator: OperatorConfig,
    #[serde(default)]
    pub domain: DomainConfig,
    #[serde(default)]
    pub symbol: SymbolConfig,
    /// Monomial degree for `quantize`.
    #[serde(default)]
    pub power: u32,
    pub levels: Option<usize>,
    pub times: Option<Vec<f64>>,
    pub packet: Option<PacketConfig>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

/// Parsed and checked configuration together with its source bytes.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub raw: String,
    pub base_dir: PathBuf,
    pub grid: LineGrid<f64>,
}

impl LoadedConfig {
    pub fn set(&self) -> IntervalSet<f64> {
        let s = self.config.set.expect("validated");
        IntervalSet::new(s.alpha, s.beta).expect("validated")
    }

    /// `sigma_sweep` when given, else `[sigma]`.
    pub fn sigmas(&self) -> Vec<f64> {
        match (&self.config.sigma_sweep, self.config.sigma) {
            (Some(v), _) => v.clone(),
            (None, Some(s)) => vec![s],
            (None, None) => vec![0.0],
        }
    }

    pub fn tolerance(&self, key: &str, default: f64) -> f64 {
        self.config.tolerances.get(key).copied().unwrap_or(default)
    }

    pub fn psi_path(&self) -> Option<PathBuf> {
        let file = self.config.apodization.as_ref()?.psi_file.as_ref()?;
        Some(if file.is_absolute() { file.clone() } else { self.base_dir.join(file) })
    }
}

pub fn load(path: &Path) -> Result<LoadedConfig, ConfigError> {
    let raw = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let config: RunConfig = toml::from_str(&raw)?;
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let grid = validate(&config, &base_dir)?;
    Ok(LoadedConfig {
        config,
        raw,
        base_dir,
        grid,
    })
}

fn needs_set(c: Command) -> bool {
    !matches!(c, Command::Portrait | Command::ValidateApodization)
}

fn needs_apodization(c: Command) -> bool {
    matches!(
        c,
        Command::Window | Command::Quantize | Command::Portrait | Command::ValidateApodization
    )
}

/// Every check that can fail before any computation; returns the grid.
pub fn validate(c: &RunConfig, base_dir: &Path) -> Result<LineGrid<f64>, ConfigError> {
    let g = c.grid;
    let grid = LineGrid::new(g.x_min, g.x_max, g.n).map_err(|e| invalid(format!("grid: {e}")))?;
    if g.n > 2048 {
        return Err(invalid(format!("grid: n = {} exceeds 2048", g.n)));
    }
    for (k, v) in &c.tolerances {
        if !TOLERANCE_KEYS.contains(&k.as_str()) {
            return Err(invalid(format!("unknown tolerance key `{k}`")));
        }
        if !(v.is_finite() && *v > 0.0) {
            return Err(invalid(format!("tolerance `{k}` must be positive")));
        }
    }
    if c.sigma.is_some() && c.sigma_sweep.is_some() {
        return Err(invalid("give either sigma or sigma_sweep, not both"));
    }
    let sigmas: Vec<f64> = c.sigma_sweep.clone().unwrap_or_else(|| c.sigma.into_iter().collect());
    if c.sigma_sweep.as_ref().is_some_and(|v| v.is_empty()) {
        return Err(invalid("sigma_sweep is empty"));
    }
    if sigmas.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
        return Err(invalid("sigma values must be finite and nonnegative"));
    }
    if needs_set(c.command) {
        let s = c.set.ok_or_else(|| invalid(format!("`{}` needs [set]", c.command.name())))?;
        let set = IntervalSet::new(s.alpha, s.beta).map_err(|e| invalid(format!("set: {e}")))?;
        let reach = sigmas.iter().fold(0.0f64, |m, &v| m.max(v));
        if set.alpha - reach <= grid.x_min() || set.beta + reach >= grid.x_max() {
            return Err(invalid("set plus mollifier reach must lie inside the grid"));
        }
    }
    if needs_apodization(c.command) {
        let a = c
            .apodization
            .as_ref()
            .ok_or_else(|| invalid(format!("`{}` needs [apodization]", c.command.name())))?;
        if !grid.is_centered() {
            return Err(invalid("apodization needs a grid centered on 0"));
        }
        match (a.kind, a.psi_preset.is_some(), a.psi_file.as_ref()) {
            (ApodizationKindConfig::PureState, true, Some(_)) => {
                return Err(invalid("give either psi_preset or psi_file, not both"))
            }
            (ApodizationKindConfig::PureState, false, None) => {
                return Err(invalid("pure_state apodization needs psi_preset or psi_file"))
            }
            (ApodizationKindConfig::PureState, false, Some(f)) => {
                let p = if f.is_absolute() { f.clone() } else { base_dir.join(f) };
                if !p.is_file() {
                    return Err(invalid(format!("psi_file {} not found", p.display())));
                }
            }
            (ApodizationKindConfig::WeylWigner, true, _) | (ApodizationKindConfig::WeylWigner, _, Some(_)) => {
                return Err(invalid("weyl_wigner apodization takes no fiducial state"))
            }
            _ => {}
        }
    }
    match c.command {
        Command::Quantize if c.power > 2 => return Err(invalid("power must be 0, 1 or 2")),
        Command::Spectrum if c.levels == Some(0) => return Err(invalid("levels must be positive")),
        Command::Evolve => {
            let times = c.times.as_ref().ok_or_else(|| invalid("`evolve` needs times"))?;
            if times.is_empty() || !times.windows(2).all(|w| w[1] > w[0]) || times.iter().any(|t| !t.is_finite()) {
                return Err(invalid("times must be finite and strictly increasing"));
            }
            let p = c.packet.ok_or_else(|| invalid("`evolve` needs [packet]"))?;
            if !(p.width > 0.0 && p.x0.is_finite() && p.k0.is_finite()) {
                return Err(invalid("packet width must be positive"));
            }
            let s = c.set.expect("checked above");
            if p.x0 <= s.alpha || p.x0 >= s.beta {
                return Err(invalid("packet must be centered inside the set"));
            }
        }
        _ => {}
    }
    Ok(grid)
}
