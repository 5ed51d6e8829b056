//! Gas-dynamics kernels for the nondimensional compressible Navier-Stokes
//! equations in two space dimensions.
//!
//! Nondimensionalisation uses free-stream density and speed, so the free
//! stream has `rho = 1`, `|v| = 1`, `p = 1 / (gamma Ma^2)`, `c = 1 / Ma` and
//! `T = 1 / ((gamma - 1) Ma^2)`. Temperature obeys `gamma p = (gamma - 1) rho T`.
//!
//! Every kernel is generic over [`Real`] so the solver can differentiate it
//! with dual numbers. The `f64` wrappers at the bottom of the file are the
//! checked public entry points.

use nalgebra::{Matrix4, Vector4};
use thiserror::Error;

use crate::ad::Real;

/// Number of space dimensions.
pub const NSD: usize = 2;
/// Conservative variables per point: density, two momenta, total energy.
pub const NVAR: usize = NSD + 2;
/// Voigt entries of a symmetric 2x2 tensor: (e11, e22, e12).
pub const MSD: usize = NSD * (NSD + 1) / 2;

pub type Flux<T> = [[T; NSD]; NVAR];
pub type Jac<T> = [[T; NVAR]; NVAR];

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum PhysicsError {
    #[error("non-positive density {0}")]
    NonPositiveDensity(f64),
    #[error("non-positive pressure {0}")]
    NonPositivePressure(f64),
    #[error("non-positive temperature {0}")]
    NonPositiveTemperature(f64),
    #[error("viscous quantity requested from an inviscid gas model")]
    InviscidModel,
    #[error("degenerate state: speed of sound {0}")]
    DegenerateState(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViscosityLaw {
    Sutherland,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasModel {
    pub gamma: f64,
    pub mach_inf: f64,
    /// `None` selects the Euler equations.
    pub reynolds: Option<f64>,
    pub prandtl: f64,
    /// Sutherland constant in Kelvin.
    pub sutherland_s0: f64,
    /// Reference temperature in Kelvin.
    pub t_ref: f64,
    pub viscosity_law: ViscosityLaw,
}

impl Default for GasModel {
    fn default() -> Self {
        Self {
            gamma: 1.4,
            mach_inf: 0.5,
            reynolds: None,
            prandtl: 0.71,
            sutherland_s0: 110.0,
            t_ref: 273.0,
            viscosity_law: ViscosityLaw::Sutherland,
        }
    }
}

impl GasModel {
    pub fn inviscid(mach_inf: f64) -> Self {
        Self {
            mach_inf,
            ..Self::default()
        }
    }

    pub fn viscous(mach_inf: f64, reynolds: f64) -> Self {
        Self {
            mach_inf,
            reynolds: Some(reynolds),
            ..Self::default()
        }
    }

    pub fn is_inviscid(&self) -> bool {
        self.reynolds.is_none()
    }

    /// Checks the parameter invariants.
    pub fn validate(&self) -> Result<(), String> {
        if !(self.gamma > 1.0) {
            return Err(format!("gamma must exceed 1, got {}", self.gamma));
        }
        if !(self.mach_inf > 0.0) {
            return Err(format!("mach_inf must be positive, got {}", self.mach_inf));
        }
        if let Some(re) = self.reynolds {
            if !(re > 0.0) {
                return Err(format!("reynolds must be positive, got {re}"));
            }
        }
        if !(self.prandtl > 0.0) {
            return Err(format!("prandtl must be positive, got {}", self.prandtl));
        }
        Ok(())
    }

    pub fn t_inf(&self) -> f64 {
        1.0 / ((self.gamma - 1.0) * self.mach_inf * self.mach_inf)
    }

    pub fn p_inf(&self) -> f64 {
        1.0 / (self.gamma * self.mach_inf * self.mach_inf)
    }

    pub fn c_inf(&self) -> f64 {
        1.0 / self.mach_inf
    }

    /// Nondimensional Sutherland constant.
    pub fn sutherland_constant(&self) -> f64 {
        self.sutherland_s0 / ((self.gamma - 1.0) * self.t_ref * self.mach_inf * self.mach_inf)
    }

    /// Free-stream conservative state for a flow at angle `alpha` (radians).
    pub fn free_stream(&self, alpha: f64) -> [f64; NVAR] {
        let v = [alpha.cos(), alpha.sin()];
        conservative_from_primitive(1.0, v, self.p_inf(), self.gamma)
    }

    /// `1/Re`, zero for inviscid models.
    pub fn inv_reynolds(&self) -> f64 {
        self.reynolds.map_or(0.0, |re| 1.0 / re)
    }

    /// Diagonal of the diffusive stabilisation `Re^-1 diag(0, 1, 1, 1/((gamma-1) Ma^2 Pr))`.
    pub fn diffusive_tau(&self) -> [f64; NVAR] {
        let ire = self.inv_reynolds();
        let energy =
            ire / ((self.gamma - 1.0) * self.mach_inf * self.mach_inf * self.prandtl);
        [0.0, ire, ire, energy]
    }

    /// Heat-flux stabilisation used by the adiabatic-wall operator.
    pub fn tau_d_energy(&self) -> f64 {
        self.diffusive_tau()[3]
    }

    /// Dynamic viscosity at temperature `t`.
    pub fn viscosity<T: Real>(&self, t: T) -> T {
        match self.viscosity_law {
            ViscosityLaw::Constant => T::one(),
            ViscosityLaw::Sutherland => {
                let t_inf = self.t_inf();
                let s = self.sutherland_constant();
                (t / t_inf).powf(1.5) * ((t + s).recip() * (t_inf + s))
            }
        }
    }
}

/// Conservative state of one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservativeState(pub [f64; NVAR]);

impl ConservativeState {
    pub fn from_primitive(rho: f64, v: [f64; NSD], p: f64, gamma: f64) -> Self {
        Self(conservative_from_primitive(rho, v, p, gamma))
    }

    pub fn is_admissible(&self, gamma: f64) -> bool {
        self.0[0] > 0.0 && pressure(&self.0, gamma) > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitives {
    pub rho: f64,
    pub v: [f64; NSD],
    pub p: f64,
    pub t: f64,
    /// Total specific energy.
    pub e: f64,
    /// Speed of sound; zero when the pressure is not positive.
    pub c: f64,
}

impl Primitives {
    pub fn is_admissible(&self) -> bool {
        self.rho > 0.0 && self.p > 0.0
    }
}

pub fn conservative_from_primitive(rho: f64, v: [f64; NSD], p: f64, gamma: f64) -> [f64; NVAR] {
    let ke = 0.5 * rho * (v[0] * v[0] + v[1] * v[1]);
    [rho, rho * v[0], rho * v[1], p / (gamma - 1.0) + ke]
}

#[inline]
pub fn velocity<T: Real>(u: &[T; NVAR]) -> [T; NSD] {
    let inv = u[0].recip();
    [u[1] * inv, u[2] * inv]
}

#[inline]
pub fn pressure<T: Real>(u: &[T; NVAR], gamma: f64) -> T {
    let ke = (u[1] * u[1] + u[2] * u[2]) / u[0] * 0.5;
    (u[3] - ke) * (gamma - 1.0)
}

#[inline]
pub fn temperature<T: Real>(u: &[T; NVAR], gamma: f64) -> T {
    pressure(u, gamma) * gamma / (u[0] * (gamma - 1.0))
}

#[inline]
pub fn sound_speed<T: Real>(u: &[T; NVAR], gamma: f64) -> T {
    (pressure(u, gamma) * gamma / u[0]).sqrt()
}

/// Convective flux tensor, rows `(rho v; rho v (x) v + p I; (rho E + p) v)`.
pub fn inviscid_flux<T: Real>(u: &[T; NVAR], gamma: f64) -> Flux<T> {
    let v = velocity(u);
    let p = pressure(u, gamma);
    let h = u[3] + p;
    [
        [u[1], u[2]],
        [u[1] * v[0] + p, u[1] * v[1]],
        [u[2] * v[0], u[2] * v[1] + p],
        [h * v[0], h * v[1]],
    ]
}

/// `F(u) n`.
pub fn inviscid_normal_flux<T: Real>(u: &[T; NVAR], n: [f64; NSD], gamma: f64) -> [T; NVAR] {
    let f = inviscid_flux(u, gamma);
    std::array::from_fn(|i| f[i][0] * n[0] + f[i][1] * n[1])
}

/// Expands Voigt storage `(e11, e22, e12)` into a full symmetric tensor.
#[inline]
pub fn voigt_to_tensor<T: Real>(e: &[T; MSD]) -> [[T; NSD]; NSD] {
    [[e[0], e[2]], [e[2], e[1]]]
}

/// Viscous flux tensor `(0; sigma; (sigma v + q))` with `sigma = mu/Re eps`
/// and `q = mu/(Re Pr) phi`. Viscosity is evaluated at the temperature of `u`.
pub fn viscous_flux<T: Real>(
    u: &[T; NVAR],
    eps: &[T; MSD],
    phi: &[T; NSD],
    gas: &GasModel,
) -> Flux<T> {
    let ire = gas.inv_reynolds();
    let mu = gas.viscosity(temperature(u, gas.gamma));
    let s = voigt_to_tensor(eps);
    let scale = mu * ire;
    let sigma = [
        [s[0][0] * scale, s[0][1] * scale],
        [s[1][0] * scale, s[1][1] * scale],
    ];
    let qscale = mu * (ire / gas.prandtl);
    let v = velocity(u);
    let mut g = [[T::zero(); NSD]; NVAR];
    for d in 0..NSD {
        g[1][d] = sigma[0][d];
        g[2][d] = sigma[1][d];
        g[3][d] = sigma[0][d] * v[0] + sigma[1][d] * v[1] + phi[d] * qscale;
    }
    g
}

/// Closed-form normal Jacobian `[dF/du] n`.
pub fn normal_jacobian_kernel<T: Real>(u: &[T; NVAR], n: [f64; NSD], gamma: f64) -> Jac<T> {
    let g1 = gamma - 1.0;
    let [vx, vy] = velocity(u);
    let vn = vx * n[0] + vy * n[1];
    let q2h = (vx * vx + vy * vy) * 0.5;
    let p = pressure(u, gamma);
    let h = (u[3] + p) / u[0];
    let z = T::zero();
    [
        [z, T::cst(n[0]), T::cst(n[1]), z],
        [
            q2h * (g1 * n[0]) - vx * vn,
            vx * (n[0] * (1.0 - g1)) + vn,
            vx * n[1] - vy * (g1 * n[0]),
            T::cst(g1 * n[0]),
        ],
        [
            q2h * (g1 * n[1]) - vy * vn,
            vy * n[0] - vx * (g1 * n[1]),
            vy * (n[1] * (1.0 - g1)) + vn,
            T::cst(g1 * n[1]),
        ],
        [
            vn * (q2h * g1 - h),
            h * n[0] - vx * vn * g1,
            h * n[1] - vy * vn * g1,
            vn * gamma,
        ],
    ]
}

/// Spectral decomposition `A_n = R diag(lambda) L` of the normal Jacobian.
///
/// Eigenvalues are ordered `(v.n - c, v.n, v.n, v.n + c)`. The acoustic and
/// entropy right eigenvectors have unit density component; the shear
/// eigenvector is `(0, t, v.t)` with unit tangent `t = (-n_y, n_x)`. `L` is
/// the exact inverse of `R` for this scaling.
pub struct Eigensystem<T> {
    pub r: Jac<T>,
    pub lambda: [T; NVAR],
    pub l: Jac<T>,
}

pub fn eigensystem<T: Real>(u: &[T; NVAR], n: [f64; NSD], gamma: f64) -> Eigensystem<T> {
    let g1 = gamma - 1.0;
    let [vx, vy] = velocity(u);
    let t = [-n[1], n[0]];
    let vn = vx * n[0] + vy * n[1];
    let vt = vx * t[0] + vy * t[1];
    let q2 = vx * vx + vy * vy;
    let p = pressure(u, gamma);
    let c = (p * gamma / u[0]).sqrt();
    let h = (u[3] + p) / u[0];
    let z = T::zero();
    let one = T::one();

    // columns r1..r4
    let r = [
        [one, one, z, one],
        [vx - c * n[0], vx, T::cst(t[0]), vx + c * n[0]],
        [vy - c * n[1], vy, T::cst(t[1]), vy + c * n[1]],
        [h - c * vn, q2 * 0.5, vt, h + c * vn],
    ];
    let ic = c.recip();
    let b = ic * ic * g1;
    let bq = b * q2 * 0.5;
    let l = [
        [
            (bq + vn * ic) * 0.5,
            (-b * vx - ic * n[0]) * 0.5,
            (-b * vy - ic * n[1]) * 0.5,
            b * 0.5,
        ],
        [one - bq, b * vx, b * vy, -b],
        [-vt, T::cst(t[0]), T::cst(t[1]), z],
        [
            (bq - vn * ic) * 0.5,
            (-b * vx + ic * n[0]) * 0.5,
            (-b * vy + ic * n[1]) * 0.5,
            b * 0.5,
        ],
    ];
    Eigensystem {
        r,
        lambda: [vn - c, vn, vn, vn + c],
        l,
    }
}

impl<T: Real> Eigensystem<T> {
    /// `R diag(f) L`.
    pub fn compose(&self, f: &[T; NVAR]) -> Jac<T> {
        let mut out = [[T::zero(); NVAR]; NVAR];
        for i in 0..NVAR {
            for j in 0..NVAR {
                let mut acc = T::zero();
                for k in 0..NVAR {
                    acc += self.r[i][k] * f[k] * self.l[k][j];
                }
                out[i][j] = acc;
            }
        }
        out
    }
}

fn unit_normal(n: [f64; NSD]) -> [f64; NSD] {
    let len = (n[0] * n[0] + n[1] * n[1]).sqrt();
    debug_assert!((len - 1.0).abs() < 1e-8, "face normal is not unit: |n| = {len}");
    [n[0] / len, n[1] / len]
}

fn to_mat4(a: &Jac<f64>) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| a[i][j])
}

/// Primitive variables of `u`. Non-positive pressure is reported through
/// [`Primitives::is_admissible`] rather than as an error.
pub fn primitives(u: &[f64; NVAR], gas: &GasModel) -> Result<Primitives, PhysicsError> {
    let rho = u[0];
    if !(rho > 0.0) {
        return Err(PhysicsError::NonPositiveDensity(rho));
    }
    let gamma = gas.gamma;
    let v = velocity(u);
    let p = pressure(u, gamma);
    let t = gamma * p / ((gamma - 1.0) * rho);
    let c = if p > 0.0 { (gamma * p / rho).sqrt() } else { 0.0 };
    Ok(Primitives {
        rho,
        v,
        p,
        t,
        e: u[3] / rho,
        c,
    })
}

/// Checked convective flux.
pub fn try_inviscid_flux(u: &[f64; NVAR], gas: &GasModel) -> Result<Flux<f64>, PhysicsError> {
    primitives(u, gas)?;
    Ok(inviscid_flux(u, gas.gamma))
}

/// Checked viscous flux; fails for inviscid gas models.
pub fn try_viscous_flux(
    u: &[f64; NVAR],
    eps: &[f64; MSD],
    phi: &[f64; NSD],
    gas: &GasModel,
) -> Result<Flux<f64>, PhysicsError> {
    if gas.is_inviscid() {
        return Err(PhysicsError::InviscidModel);
    }
    let prim = primitives(u, gas)?;
    if !(prim.t > 0.0) {
        return Err(PhysicsError::NonPositiveTemperature(prim.t));
    }
    Ok(viscous_flux(u, eps, phi, gas))
}

/// Checked viscosity law.
pub fn sutherland_mu(t: f64, gas: &GasModel) -> Result<f64, PhysicsError> {
    if !(t > 0.0) {
        return Err(PhysicsError::NonPositiveTemperature(t));
    }
    Ok(gas.viscosity(t))
}

pub fn normal_jacobian(
    u: &[f64; NVAR],
    n: [f64; NSD],
    gas: &GasModel,
) -> Result<Matrix4<f64>, PhysicsError> {
    primitives(u, gas)?;
    Ok(to_mat4(&normal_jacobian_kernel(u, unit_normal(n), gas.gamma)))
}

/// `(R, Lambda, L)` as dense matrices.
pub fn eigendecompose(
    u: &[f64; NVAR],
    n: [f64; NSD],
    gas: &GasModel,
) -> Result<(Matrix4<f64>, Vector4<f64>, Matrix4<f64>), PhysicsError> {
    let prim = primitives(u, gas)?;
    if !(prim.c > 0.0) {
        return Err(PhysicsError::DegenerateState(prim.c));
    }
    let es = eigensystem(u, unit_normal(n), gas.gamma);
    Ok((
        to_mat4(&es.r),
        Vector4::from_column_slice(&es.lambda),
        to_mat4(&es.l),
    ))
}

/// `|A_n| = R |Lambda| L`.
pub fn abs_jacobian(
    u: &[f64; NVAR],
    n: [f64; NSD],
    gas: &GasModel,
) -> Result<Matrix4<f64>, PhysicsError> {
    let (r, lam, l) = eigendecompose(u, n, gas)?;
    Ok(r * Matrix4::from_diagonal(&lam.abs()) * l)
}

/// `(A_n^+, A_n^-) = ((A_n + |A_n|)/2, (A_n - |A_n|)/2)`.
pub fn split_jacobians(
    u: &[f64; NVAR],
    n: [f64; NSD],
    gas: &GasModel,
) -> Result<(Matrix4<f64>, Matrix4<f64>), PhysicsError> {
    let (r, lam, l) = eigendecompose(u, n, gas)?;
    let plus = lam.map(|x| x.max(0.0));
    let minus = lam.map(|x| x.min(0.0));
    Ok((
        r * Matrix4::from_diagonal(&plus) * l,
        r * Matrix4::from_diagonal(&minus) * l,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gas() -> GasModel {
        GasModel::inviscid(0.5)
    }

    #[test]
    fn rest_state_has_unit_sound_speed() {
        let g = 1.4;
        let prim = primitives(&[1.0, 0.0, 0.0, 1.0 / (g * (g - 1.0))], &gas()).unwrap();
        assert_relative_eq!(prim.p, 1.0 / g, epsilon = 1e-14);
        assert_relative_eq!(prim.t, 2.5, epsilon = 1e-14);
        assert_relative_eq!(prim.c, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn primitives_direct_evaluation() {
        let prim = primitives(&[1.0, 0.0, 0.0, 1.0], &gas()).unwrap();
        assert_relative_eq!(prim.p, 0.4, epsilon = 1e-15);
        assert_eq!(prim.v, [0.0, 0.0]);

        let prim = primitives(&[2.0, 2.0, 0.0, 3.0], &gas()).unwrap();
        assert_eq!(prim.v, [1.0, 0.0]);
        assert_relative_eq!(prim.p, 0.8, epsilon = 1e-15);
        assert_relative_eq!(prim.c, 0.748331, epsilon = 1e-6);
    }

    #[test]
    fn primitives_reject_non_positive_density_and_flag_pressure() {
        assert!(matches!(
            primitives(&[0.0, 0.0, 0.0, 1.0], &gas()),
            Err(PhysicsError::NonPositiveDensity(_))
        ));
        let prim = primitives(&[1.0, 2.0, 0.0, 1.0], &gas()).unwrap();
        assert!(prim.p < 0.0);
        assert!(!prim.is_admissible());
    }

    #[test]
    fn inviscid_flux_examples() {
        let f = inviscid_normal_flux(&[1.0, 1.0, 0.0, 1.0], [1.0, 0.0], 1.4);
        let expect = [1.0, 1.2, 0.0, 1.2];
        for i in 0..NVAR {
            assert_relative_eq!(f[i], expect[i], epsilon = 1e-14);
        }
        let rest = inviscid_flux(&[1.3, 0.0, 0.0, 2.0], 1.4);
        let p = pressure(&[1.3, 0.0, 0.0, 2.0], 1.4);
        assert_eq!(rest[0], [0.0, 0.0]);
        assert_eq!(rest[3], [0.0, 0.0]);
        assert_eq!(rest[1], [p, 0.0]);
        assert_eq!(rest[2], [0.0, p]);
    }

    #[test]
    fn viscous_flux_examples() {
        let mut gas = GasModel::viscous(0.5, 10.0);
        gas.viscosity_law = ViscosityLaw::Constant;
        let u = conservative_from_primitive(1.0, [1.0, 0.0], 1.0, 1.4);
        let zero = viscous_flux(&u, &[0.0; MSD], &[0.0; NSD], &gas);
        assert!(zero.iter().flatten().all(|&x| x == 0.0));
        let g = viscous_flux(&u, &[1.0, 1.0, 0.0], &[0.0; NSD], &gas);
        assert_relative_eq!(g[1][0], 0.1, epsilon = 1e-15);
        assert_relative_eq!(g[2][1], 0.1, epsilon = 1e-15);
        assert_eq!(g[1][1], 0.0);
        assert_relative_eq!(g[3][0], 0.1, epsilon = 1e-15);
        assert_eq!(g[3][1], 0.0);
        assert!(matches!(
            try_viscous_flux(&u, &[0.0; MSD], &[0.0; NSD], &GasModel::inviscid(0.5)),
            Err(PhysicsError::InviscidModel)
        ));
    }

    #[test]
    fn deviatoric_strain_of_planar_stretch() {
        // v = (x, 0): 2 sym grad v = diag(2, 0), div v = 1. In two dimensions
        // the deviatoric construction leaves a trace of (2/3) div v.
        let eps = [2.0 - 2.0 / 3.0, -2.0 / 3.0, 0.0];
        assert_relative_eq!(eps[0] + eps[1], 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn sutherland_examples() {
        let gas = GasModel::viscous(0.5, 100.0);
        let t_inf = gas.t_inf();
        assert_relative_eq!(t_inf, 10.0, epsilon = 1e-12);
        assert_relative_eq!(sutherland_mu(t_inf, &gas).unwrap(), 1.0, epsilon = 1e-14);
        let s = 110.0 / (0.4 * 273.0 * 0.25);
        let expect = 2f64.powf(1.5) * (t_inf + s) / (2.0 * t_inf + s);
        assert_relative_eq!(sutherland_mu(2.0 * t_inf, &gas).unwrap(), expect, epsilon = 1e-14);
        assert!(matches!(
            sutherland_mu(0.0, &gas),
            Err(PhysicsError::NonPositiveTemperature(_))
        ));
        let mut constant = gas;
        constant.viscosity_law = ViscosityLaw::Constant;
        assert_eq!(sutherland_mu(123.0, &constant).unwrap(), 1.0);
    }

    #[test]
    fn rest_state_eigenvalues() {
        let g = 1.4;
        let u = [1.0, 0.0, 0.0, 1.0 / (g * (g - 1.0))];
        let (_, lam, _) = eigendecompose(&u, [1.0, 0.0], &gas()).unwrap();
        let expect = [-1.0, 0.0, 0.0, 1.0];
        for i in 0..NVAR {
            assert_relative_eq!(lam[i], expect[i], epsilon = 1e-14);
        }
    }

    #[test]
    fn split_jacobians_supersonic_limits() {
        let g = gas();
        let out = conservative_from_primitive(1.0, [3.0, 0.5], 0.7, 1.4);
        let (_, minus) = split_jacobians(&out, [1.0, 0.0], &g).unwrap();
        assert!(minus.norm() < 1e-12);
        let inflow = conservative_from_primitive(1.0, [-3.0, 0.5], 0.7, 1.4);
        let (plus, _) = split_jacobians(&inflow, [1.0, 0.0], &g).unwrap();
        assert!(plus.norm() < 1e-12);
    }

    #[test]
    fn degenerate_state_rejected() {
        let u = [1.0, 0.0, 0.0, 0.0];
        assert!(matches!(
            eigendecompose(&u, [1.0, 0.0], &gas()),
            Err(PhysicsError::DegenerateState(_))
        ));
    }
}
