//! Artificial viscosity for shock capturing.
//!
//! Two schemes are available. The Laplacian scheme adds `(grad W, eps grad U)`
//! to the conservation equations, with `eps` driven by the modal smoothness
//! sensor of the density. The bulk scheme adds an artificial bulk viscosity
//! `beta*` to the viscous flux, driven by a dilatation sensor. Both
//! elemental fields are made continuous by [`c0_smooth`].

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::ad::Real;
use crate::mesh::{ElementGeometry, Mesh};
use crate::physics::{velocity, Flux, GasModel, NSD, NVAR};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShockError {
    #[error("sensor evaluated on an identically zero density field")]
    ZeroField,
    #[error("sensor window collapses for k = {0} (log10 k = 0)")]
    DegenerateThresholds(usize),
    #[error("invalid shock-capturing configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SensorMode {
    #[default]
    Off,
    Laplacian,
    Bulk,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorConfig {
    pub mode: SensorMode,
    /// Laplacian scheme: `eps0 = eps0_multiplier * h / k`.
    pub eps0_multiplier: f64,
    /// Laplacian scheme: `(s0 - xi, s0 + xi)` override of the default
    /// `(-11 log10 k, -4 log10 k)` window.
    pub window: Option<(f64, f64)>,
    /// Bulk scheme constants.
    pub bulk_eps0: f64,
    pub bulk_s0: f64,
    pub s_min: f64,
    /// `None` selects `2 / sqrt(gamma^2 - 1)`.
    pub s_max: Option<f64>,
    pub pr_beta: f64,
    /// Allows the Laplacian scheme on viscous runs.
    pub expert: bool,
}

impl Default for SensorConfig {
    fn default() -> Self {
        Self {
            mode: SensorMode::Off,
            eps0_multiplier: 1.0,
            window: None,
            bulk_eps0: 1.5,
            bulk_s0: 0.01,
            s_min: 0.0,
            s_max: None,
            pr_beta: 0.9,
            expert: false,
        }
    }
}

impl SensorConfig {
    pub fn laplacian(eps0_multiplier: f64) -> Self {
        Self {
            mode: SensorMode::Laplacian,
            eps0_multiplier,
            ..Self::default()
        }
    }

    pub fn bulk() -> Self {
        Self {
            mode: SensorMode::Bulk,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ShockError> {
        let bad = |m: &str| Err(ShockError::InvalidConfig(m.to_string()));
        if !(self.eps0_multiplier >= 0.0) || !(self.bulk_eps0 >= 0.0) {
            return bad("eps0 must be non-negative");
        }
        if let Some((lo, hi)) = self.window {
            if !(hi > lo) {
                return bad("window must satisfy s0 - xi < s0 + xi");
            }
        }
        if let Some(smax) = self.s_max {
            if !(smax >= self.s_min) {
                return bad("s_min must not exceed s_max");
            }
        }
        if !(self.pr_beta > 0.0) {
            return bad("pr_beta must be positive");
        }
        Ok(())
    }

    pub fn s_max(&self, gamma: f64) -> f64 {
        self.s_max.unwrap_or(2.0 / (gamma * gamma - 1.0).sqrt())
    }
}

/// Fraction of the modal energy of `rho` carried by the top-degree modes:
/// `S_e = rho^T V^-T P V^-1 rho / rho^T V^-T V^-1 rho`.
pub fn persson_sensor(
    rho: &[f64],
    inv_vandermonde: &DMatrix<f64>,
    projection: &DMatrix<f64>,
) -> Result<f64, ShockError> {
    let modal = inv_vandermonde * DVector::from_column_slice(rho);
    let total = modal.norm_squared();
    if total == 0.0 {
        return Err(ShockError::ZeroField);
    }
    let top = (projection * &modal).dot(&modal);
    Ok(top / total)
}

/// `(s0 - xi, s0 + xi) = (-11 log10 k, -4 log10 k)`.
pub fn ramp_window(k: usize) -> Result<(f64, f64), ShockError> {
    if k < 2 {
        return Err(ShockError::DegenerateThresholds(k));
    }
    let l = (k as f64).log10();
    Ok((-11.0 * l, -4.0 * l))
}

/// Piecewise sine ramp of the elemental viscosity over the window
/// `(lo, hi)` of `s_e = log10 S_e`.
pub fn ramp(s_e: f64, eps0: f64, window: (f64, f64)) -> f64 {
    let (lo, hi) = window;
    if s_e <= lo {
        0.0
    } else if s_e >= hi {
        eps0
    } else {
        let s0 = 0.5 * (lo + hi);
        let xi = 0.5 * (hi - lo);
        0.5 * eps0 * (1.0 + (PI * (s_e - s0) / (2.0 * xi)).sin())
    }
}

/// Elemental viscosity for the log-sensor `s_e` at degree `k`.
pub fn viscosity_ramp(
    s_e: f64,
    k: usize,
    eps0: f64,
    config: &SensorConfig,
) -> Result<f64, ShockError> {
    let window = match config.window {
        Some(w) => w,
        None => ramp_window(k)?,
    };
    Ok(ramp(s_e, eps0, window))
}

/// `s_beta = -(h / k) div(v) / c_ref`; positive in compression.
pub fn dilatation_sensor(div_v: f64, h: f64, k: usize, c_ref: f64) -> f64 {
    -(h / k as f64) * div_v / c_ref
}

/// Unsmoothed artificial bulk viscosity
/// `eps0 rho_inf (h / k) (v_inf^2 + c_inf^2)^(1/2) f(s_beta)` with
/// `f(s) = min(s_max, max(s_min, s - s0))`.
pub fn bulk_viscosity(s_beta: f64, h: f64, k: usize, gas: &GasModel, config: &SensorConfig) -> f64 {
    let c_inf = gas.c_inf();
    let scale = config.bulk_eps0 * (h / k as f64) * (1.0 + c_inf * c_inf).sqrt();
    let f = (s_beta - config.bulk_s0).max(config.s_min).min(config.s_max(gas.gamma));
    scale * f
}

/// `G* = beta* (0; div(v) I; div(v) v + phi / Pr_beta)`.
pub fn bulk_viscous_flux<T: Real>(
    u: &[T; NVAR],
    phi: &[T; NSD],
    beta: f64,
    div_v: T,
    pr_beta: f64,
) -> Flux<T> {
    let v = velocity(u);
    let mut g = [[T::zero(); NSD]; NVAR];
    for d in 0..NSD {
        g[1 + d][d] = div_v * beta;
        g[3][d] = (div_v * v[d] + phi[d] / pr_beta) * beta;
    }
    g
}

/// Continuous reconstruction of an elemental field: every corner vertex
/// takes the maximum over its incident elements and the result is
/// interpolated with linear hat functions. Returns the values at the nodes
/// of each element (`nodes` in reference coordinates).
pub fn c0_smooth(mesh: &Mesh, elemental: &[f64], nodes: &[[f64; 2]]) -> Vec<Vec<f64>> {
    assert_eq!(elemental.len(), mesh.n_elements());
    let mut vertex = vec![f64::NEG_INFINITY; mesh.nodes.len()];
    for (el, &val) in mesh.elements.iter().zip(elemental) {
        for &v in &el[..3] {
            vertex[v] = vertex[v].max(val);
        }
    }
    mesh.elements
        .iter()
        .map(|el| {
            let c = [vertex[el[0]], vertex[el[1]], vertex[el[2]]];
            nodes
                .iter()
                .map(|x| (1.0 - x[0] - x[1]) * c[0] + x[0] * c[1] + x[1] * c[2])
                .collect()
        })
        .collect()
}

/// Viscosity-weighted stiffness `K_ij = sum_q w eps grad N_i . grad N_j`.
pub fn laplacian_matrix(geom: &ElementGeometry, eps_q: &[f64]) -> DMatrix<f64> {
    let n = geom.grad[0].len();
    let mut k = DMatrix::zeros(n, n);
    for (q, g) in geom.grad.iter().enumerate() {
        let we = geom.w[q] * eps_q[q];
        if we == 0.0 {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                k[(i, j)] += we * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
            }
        }
    }
    k
}

/// `(grad W, eps grad U)` for nodal `u[i][r]`: one `NVAR` row per node.
pub fn laplacian_term(geom: &ElementGeometry, eps_q: &[f64], u: &[[f64; NVAR]]) -> Vec<[f64; NVAR]> {
    let k = laplacian_matrix(geom, eps_q);
    (0..u.len())
        .map(|i| std::array::from_fn(|r| (0..u.len()).map(|j| k[(i, j)] * u[j][r]).sum()))
        .collect()
}
