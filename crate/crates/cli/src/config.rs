//! TOML run configuration. Every key has a default; unknown keys are errors.

use std::path::Path;

use lfpp_core::confluence::Targets;
use lfpp_core::params::{derive_params, DimensionPreset, GAMMA_PURE_GRAVITY};
use lfpp_core::{GridSpec, Parameters, Rect, Stencil};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    /// Root seed; replica seeds are derived from it.
    pub seed: u64,
    pub params: ParamsConfig,
    pub grid: GridConfig,
    pub metric: MetricConfig,
    pub run: RunConfig,
    pub field: FieldConfig,
    pub points: PointsConfig,
    pub ball: BallConfig,
    pub confluence: ConfluenceConfig,
    pub bilip: BilipConfig,
    pub tightness: TightnessConfig,
    pub rotation: RotationConfig,
    pub holder: HolderConfig,
    pub gmc: GmcConfig,
    pub dim: DimConfig,
    pub fit: FitConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsConfig {
    pub gamma: f64,
    pub dimension: DimensionPreset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub n: usize,
    pub side_length: f64,
    /// `[x0, y0, x1, y1]`; defaults to the torus inset by `side_length / 4`.
    pub window: Option<[f64; 4]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricConfig {
    pub stencil: Stencil,
    pub anisotropy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub replicas: usize,
    /// Mollification scales; single-scale commands use the first entry.
    pub eps: Vec<f64>,
    pub bootstrap: usize,
    pub memory_cap_gib: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationKind {
    MeanZero,
    CircleAverageZero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldConfig {
    pub normalization: NormalizationKind,
    /// Circle for `circle_average_zero`, centred at the window centre.
    pub circle_radius: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PointsConfig {
    /// Physical coordinates; default is the window centre.
    pub source: Option<[f64; 2]>,
    /// Default is the source shifted by `(0.25, 0)`.
    pub target: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BallConfig {
    /// The metric radius is the hitting radius of this Euclidean circle.
    pub euclidean_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfluenceConfig {
    pub inner_r: f64,
    pub outer_r: Vec<f64>,
    /// `0` means all boundary vertices; otherwise a sample of this size.
    pub sample: usize,
    pub sample_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BilipConfig {
    pub beta: f64,
    pub pairs: usize,
    /// Metric `b`; metric `a` is `[metric]`.
    pub stencil_b: Stencil,
    pub anisotropy_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TightnessConfig {
    pub r1: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RotationConfig {
    pub anisotropy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HolderConfig {
    pub pairs_per_decade: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GmcConfig {
    /// Query rectangles `[x0, y0, x1, y1]`, half-open.
    pub regions: Vec<[f64; 4]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DimConfig {
    pub s_ladder: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitConfig {
    /// crossings.csv to fit; relative paths resolve against the output directory.
    pub input: String,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        ParamsConfig {
            gamma: GAMMA_PURE_GRAVITY,
            dimension: DimensionPreset::Known,
        }
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n: 256,
            side_length: 2.0,
            window: None,
        }
    }
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            stencil: Stencil::Eight,
            anisotropy: 1.0,
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            replicas: 20,
            eps: vec![0.125, 0.0625, 0.03125, 0.015625],
            bootstrap: 1000,
            memory_cap_gib: 4.0,
        }
    }
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig {
            normalization: NormalizationKind::MeanZero,
            circle_radius: 1.0,
        }
    }
}

impl Default for BallConfig {
    fn default() -> Self {
        BallConfig {
            euclidean_radius: 0.2,
        }
    }
}

impl Default for ConfluenceConfig {
    fn default() -> Self {
        ConfluenceConfig {
            inner_r: 0.15,
            outer_r: vec![0.3, 0.35, 0.4],
            sample: 0,
            sample_seed: 0,
        }
    }
}

impl Default for BilipConfig {
    fn default() -> Self {
        BilipConfig {
            beta: 0.25,
            pairs: 200,
            stencil_b: Stencil::Eight,
            anisotropy_b: 4.0,
        }
    }
}

impl Default for TightnessConfig {
    fn default() -> Self {
        TightnessConfig { r1: 0.25, r2: 0.5 }
    }
}

impl Default for RotationConfig {
    fn default() -> Self {
        RotationConfig { anisotropy: 4.0 }
    }
}

impl Default for HolderConfig {
    fn default() -> Self {
        HolderConfig {
            pairs_per_decade: 100,
        }
    }
}

impl Default for GmcConfig {
    fn default() -> Self {
        GmcConfig {
            regions: vec![[0.5, 0.5, 1.5, 1.5]],
        }
    }
}

impl Default for DimConfig {
    fn default() -> Self {
        DimConfig {
            s_ladder: vec![0.04, 0.06, 0.08, 0.12, 0.16],
        }
    }
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            input: "crossings.csv".into(),
        }
    }
}

pub use crate::error::ConfigError;

impl Config {
    pub fn from_toml(text: &str) -> Result<Config, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError(e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Config, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Config::from_toml(&text).map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))
    }

    pub fn parameters(&self) -> Result<Parameters, ConfigError> {
        let d = self
            .params
            .dimension
            .resolve(self.params.gamma)
            .map_err(|e| ConfigError(format!("params: {e}")))?;
        derive_params(self.params.gamma, d).map_err(|e| ConfigError(format!("params: {e}")))
    }

    pub fn grid_spec(&self) -> Result<GridSpec, ConfigError> {
        let g = &self.grid;
        let spec = match g.window {
            None => GridSpec::new(g.n, g.side_length),
            Some([x0, y0, x1, y1]) => {
                GridSpec::with_window(g.n, g.side_length, Rect::new(x0, y0, x1, y1))
            }
        };
        spec.map_err(|e| ConfigError(format!("grid: {e}")))
    }

    pub fn first_eps(&self) -> Result<f64, ConfigError> {
        self.run
            .eps
            .first()
            .copied()
            .ok_or_else(|| ConfigError("run.eps: at least one value is required".into()))
    }

    pub fn targets(&self) -> Targets {
        match self.confluence.sample {
            0 => Targets::AllBoundary,
            m => Targets::Sample {
                m,
                seed: self.confluence.sample_seed,
            },
        }
    }

    /// Checks everything that does not depend on the subcommand.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.parameters()?;
        self.grid_spec()?;
        if self.run.replicas == 0 {
            return Err(ConfigError("run.replicas: must be positive".into()));
        }
        if !(self.run.memory_cap_gib > 0.0) {
            return Err(ConfigError("run.memory_cap_gib: must be positive".into()));
        }
        if self.run.eps.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(ConfigError("run.eps: values must be positive".into()));
        }
        for (key, a) in [
            ("metric.anisotropy", self.metric.anisotropy),
            ("bilip.anisotropy_b", self.bilip.anisotropy_b),
            ("rotation.anisotropy", self.rotation.anisotropy),
        ] {
            if !(a >= 1.0) {
                return Err(ConfigError(format!("{key}: must be at least 1, got {a}")));
            }
        }
        Ok(())
    }
}
