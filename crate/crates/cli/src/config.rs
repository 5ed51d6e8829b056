//! Run configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use hdg_core::physics::{GasModel, ViscosityLaw};
use hdg_core::riemann::RiemannScheme;
use hdg_core::shock::{SensorConfig, SensorMode};
use hdg_core::solver::{AdmissibilityPolicy, MarchConfig};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseKind {
    /// Ringleb's flow on the unit square.
    Ringleb,
    /// Compressible Couette flow with a manufactured source.
    Couette,
    /// Uniform flow on a structured unit square.
    UnitSquare,
    /// Supersonic flow over a ramp.
    Wedge,
    /// User-supplied mesh file.
    Mesh,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub case: CaseKind,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default = "default_k")]
    pub k: usize,
    /// Refinement level of the built-in unit-square meshes.
    #[serde(default = "default_level")]
    pub level: usize,
    /// Mesh file, required when `case = "mesh"`.
    #[serde(default)]
    pub mesh: Option<PathBuf>,
    #[serde(default = "default_scheme")]
    pub scheme: String,
    #[serde(default)]
    pub gas: GasConfig,
    /// Boundary bindings: tag -> `far-field | inviscid-wall | adiabatic-wall |
    /// isothermal-wall:T | pressure-outflow:p | exact`.
    #[serde(default)]
    pub boundary: BTreeMap<String, String>,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub shock: ShockConfig,
    #[serde(default)]
    pub wedge: WedgeConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub study: StudyConfig,
}

fn default_k() -> usize {
    2
}
fn default_level() -> usize {
    2
}
fn default_scheme() -> String {
    "hllem".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GasConfig {
    pub gamma: f64,
    pub mach: Option<f64>,
    /// Omit for the Euler equations.
    pub reynolds: Option<f64>,
    pub prandtl: f64,
    /// `sutherland` or `constant`.
    pub viscosity: String,
    /// Free-stream incidence in degrees.
    pub alpha: f64,
}

impl Default for GasConfig {
    fn default() -> Self {
        Self {
            gamma: 1.4,
            mach: None,
            reynolds: None,
            prandtl: 0.71,
            viscosity: "sutherland".into(),
            alpha: 0.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeConfig {
    /// Initial pseudo-time step; `inf` for pure Newton.
    pub dt: f64,
    pub growth: f64,
    pub dt_max: f64,
    pub dt_min: f64,
    pub max_steps: usize,
    pub newton_max: usize,
    pub newton_tol: f64,
    pub tol: f64,
    pub drop_orders: Option<f64>,
    pub tol_total: Option<f64>,
    /// `abort` or `halve-dt`.
    pub on_nonphysical: String,
    /// Keep the artificial viscosity non-decreasing over the march.
    pub viscosity_memory: bool,
}

impl Default for TimeConfig {
    fn default() -> Self {
        let m = MarchConfig::default();
        Self {
            dt: m.dt,
            growth: m.growth,
            dt_max: m.dt_max,
            dt_min: m.dt_min,
            max_steps: m.max_steps,
            newton_max: m.newton_max,
            newton_tol: m.newton_tol,
            tol: 1e-6,
            drop_orders: None,
            tol_total: None,
            on_nonphysical: "abort".into(),
            viscosity_memory: m.viscosity_memory,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShockConfig {
    /// `off`, `laplacian` or `bulk`.
    pub mode: String,
    pub eps0_multiplier: f64,
    /// `[s0 - xi, s0 + xi]` window of the log-sensor.
    pub delta_window: Option<[f64; 2]>,
    pub pr_beta: f64,
    pub bulk_eps0: f64,
    pub bulk_s0: f64,
    pub s_min: f64,
    pub s_max: Option<f64>,
    pub expert: bool,
}

impl Default for ShockConfig {
    fn default() -> Self {
        let s = SensorConfig::default();
        Self {
            mode: "off".into(),
            eps0_multiplier: s.eps0_multiplier,
            delta_window: None,
            pr_beta: s.pr_beta,
            bulk_eps0: s.bulk_eps0,
            bulk_s0: s.bulk_s0,
            s_min: s.s_min,
            s_max: None,
            expert: false,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WedgeConfig {
    pub angle_deg: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Default for WedgeConfig {
    fn default() -> Self {
        let w = hdg_core::cases::Wedge::default();
        Self {
            angle_deg: w.angle_deg,
            nx: w.nx,
            ny: w.ny,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Output directory, relative to the config file.
    pub dir: PathBuf,
    pub field: String,
    pub history: String,
    pub table: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            field: "field.txt".into(),
            history: "history.csv".into(),
            table: "convergence.csv".into(),
        }
    }
}

/// Convergence-study settings (`converge` command).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StudyConfig {
    pub levels: Vec<usize>,
    pub degrees: Vec<usize>,
    pub schemes: Vec<String>,
    /// Pass when the last-interval rate is at least `k + 1 - slack`.
    pub slack: f64,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            levels: vec![1, 2, 3],
            degrees: vec![1, 2, 3],
            schemes: vec!["lf".into(), "roe".into(), "hll".into(), "hllem".into()],
            slack: 0.2,
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if cfg.output.dir.is_relative() {
            cfg.output.dir = base.join(&cfg.output.dir);
        }
        if let Some(m) = &cfg.mesh {
            if m.is_relative() {
                cfg.mesh = Some(base.join(m));
            }
        }
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.k == 0 {
            return bad("k must be at least 1".into());
        }
        if self.case == CaseKind::Mesh && self.mesh.is_none() {
            return bad("case \"mesh\" requires a mesh path".into());
        }
        self.scheme()?;
        self.sensor()?;
        self.policy()?;
        Ok(())
    }

    pub fn scheme(&self) -> Result<RiemannScheme, CliError> {
        parse_scheme(&self.scheme)
    }

    /// Gas model; case defaults fill unset Mach and Reynolds numbers.
    pub fn gas_model(&self) -> Result<GasModel, CliError> {
        let g = &self.gas;
        let (mach_default, re_default, law_default) = match self.case {
            CaseKind::Ringleb => (0.5, None, None),
            CaseKind::Couette => (0.15, Some(1.0), Some(ViscosityLaw::Constant)),
            CaseKind::Wedge => (3.0, None, None),
            CaseKind::UnitSquare | CaseKind::Mesh => (0.5, None, None),
        };
        let law = match g.viscosity.as_str() {
            "sutherland" => law_default.unwrap_or(ViscosityLaw::Sutherland),
            "constant" => ViscosityLaw::Constant,
            other => return Err(CliError::Config(format!("unknown viscosity law {other:?}"))),
        };
        let gas = GasModel {
            gamma: g.gamma,
            mach_inf: g.mach.unwrap_or(mach_default),
            reynolds: g.reynolds.or(re_default),
            prandtl: g.prandtl,
            viscosity_law: law,
            ..GasModel::default()
        };
        gas.validate().map_err(CliError::Config)?;
        Ok(gas)
    }

    pub fn sensor(&self) -> Result<SensorConfig, CliError> {
        let s = &self.shock;
        let mode = match s.mode.as_str() {
            "off" => SensorMode::Off,
            "laplacian" => SensorMode::Laplacian,
            "bulk" => SensorMode::Bulk,
            other => return Err(CliError::Config(format!("unknown shock mode {other:?}"))),
        };
        let cfg = SensorConfig {
            mode,
            eps0_multiplier: s.eps0_multiplier,
            window: s.delta_window.map(|[a, b]| (a, b)),
            bulk_eps0: s.bulk_eps0,
            bulk_s0: s.bulk_s0,
            s_min: s.s_min,
            s_max: s.s_max,
            pr_beta: s.pr_beta,
            expert: s.expert,
        };
        cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }

    fn policy(&self) -> Result<AdmissibilityPolicy, CliError> {
        match self.time.on_nonphysical.as_str() {
            "abort" => Ok(AdmissibilityPolicy::Abort),
            "halve-dt" => Ok(AdmissibilityPolicy::HalveDt),
            other => Err(CliError::Config(format!("unknown non-physical policy {other:?}"))),
        }
    }

    pub fn march(&self) -> Result<MarchConfig, CliError> {
        let t = &self.time;
        Ok(MarchConfig {
            dt: t.dt,
            growth: t.growth,
            dt_max: t.dt_max,
            dt_min: t.dt_min,
            max_steps: t.max_steps,
            newton_max: t.newton_max,
            newton_tol: t.newton_tol,
            tol_continuity: t.tol,
            drop_orders: t.drop_orders,
            tol_total: t.tol_total,
            policy: self.policy()?,
            viscosity_memory: t.viscosity_memory,
            ..MarchConfig::default()
        })
    }
}

pub fn parse_scheme(s: &str) -> Result<RiemannScheme, CliError> {
    s.parse()
        .map_err(|e: hdg_core::riemann::RiemannError| CliError::Config(e.to_string()))
}
