//! Pointwise fluxes and boundary operators, generic over [`Real`] so that
//! the element assembly obtains their Jacobians by forward differentiation.

use std::fmt;
use std::sync::Arc;

use crate::ad::Real;
use crate::physics::{
    eigensystem, inviscid_flux, normal_jacobian_kernel, temperature, viscous_flux, Flux, GasModel,
    MSD, NSD, NVAR,
};
use crate::riemann::{trace_flux_kernel, RiemannScheme};
use crate::shock::bulk_viscous_flux;

/// Spatially varying state, e.g. exact solutions or far-field data.
pub type StateFn = Arc<dyn Fn([f64; 2]) -> [f64; NVAR] + Send + Sync>;

/// Boundary condition operators.
#[derive(Clone)]
pub enum BoundaryKind {
    /// `A+(u_hat)(U_e - u_hat) + A-(u_hat)(U_inf - u_hat)`, with `U_inf`
    /// evaluated at the boundary point.
    FarField(StateFn),
    PressureOutflow { p_out: f64 },
    AdiabaticWall,
    IsothermalWall { t_wall: f64 },
    /// Slip wall or symmetry line.
    InviscidWall,
    /// Strong imposition of a known state, `U(x) - u_hat`.
    Dirichlet(StateFn),
}

impl BoundaryKind {
    pub fn uniform_far_field(state: [f64; NVAR]) -> Self {
        Self::FarField(Arc::new(move |_| state))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::FarField(_) => "far-field",
            Self::PressureOutflow { .. } => "pressure-outflow",
            Self::AdiabaticWall => "adiabatic-wall",
            Self::IsothermalWall { .. } => "isothermal-wall",
            Self::InviscidWall => "inviscid-wall",
            Self::Dirichlet(_) => "dirichlet",
        }
    }

    pub fn needs_viscosity(&self) -> bool {
        matches!(self, Self::AdiabaticWall | Self::IsothermalWall { .. })
    }
}

impl fmt::Debug for BoundaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PressureOutflow { p_out } => write!(f, "PressureOutflow({p_out})"),
            Self::IsothermalWall { t_wall } => write!(f, "IsothermalWall({t_wall})"),
            other => f.write_str(other.name()),
        }
    }
}

/// Artificial viscosity frozen at a point.
#[derive(Debug, Clone, Copy, Default)]
pub struct PointViscosity {
    /// Bulk viscosity `beta*`.
    pub beta: f64,
    pub pr_beta: f64,
}

/// `div v` recovered from the deviatoric strain rate: `tr(eps) = (2/3) div v`
/// in two dimensions.
#[inline]
pub fn dilatation<T: Real>(eps: &[T; MSD]) -> T {
    (eps[0] + eps[1]) * 1.5
}

/// Volume flux `F(U) - G(U, eps, phi) - G*`.
pub fn volume_flux<T: Real>(
    u: &[T; NVAR],
    eps: &[T; MSD],
    phi: &[T; NSD],
    gas: &GasModel,
    av: PointViscosity,
) -> Flux<T> {
    let mut f = inviscid_flux(u, gas.gamma);
    if !gas.is_inviscid() {
        let g = viscous_flux(u, eps, phi, gas);
        for r in 0..NVAR {
            for d in 0..NSD {
                f[r][d] -= g[r][d];
            }
        }
    }
    if av.beta > 0.0 {
        let g = bulk_viscous_flux(u, phi, av.beta, dilatation(eps), av.pr_beta);
        for r in 0..NVAR {
            for d in 0..NSD {
                f[r][d] -= g[r][d];
            }
        }
    }
    f
}

/// One-sided trace flux `F^ n - G^ n` of an element face:
/// `F(u_hat) n + tau (U_e - u_hat) - G(u_hat, eps_e, phi_e) n + tau_d (U_e - u_hat)`.
#[allow(clippy::too_many_arguments)]
pub fn face_flux<T: Real>(
    scheme: RiemannScheme,
    u_hat: &[T; NVAR],
    u_e: &[T; NVAR],
    eps: &[T; MSD],
    phi: &[T; NSD],
    n: [f64; NSD],
    gas: &GasModel,
    av: PointViscosity,
) -> [T; NVAR] {
    let mut f = trace_flux_kernel(scheme, u_hat, u_e, n, gas.gamma);
    if !gas.is_inviscid() {
        let g = viscous_flux(u_hat, eps, phi, gas);
        let td = gas.diffusive_tau();
        for r in 0..NVAR {
            f[r] -= g[r][0] * n[0] + g[r][1] * n[1];
            f[r] += (u_e[r] - u_hat[r]) * td[r];
        }
    }
    if av.beta > 0.0 {
        let g = bulk_viscous_flux(u_hat, phi, av.beta, dilatation(eps), av.pr_beta);
        for r in 0..NVAR {
            f[r] -= g[r][0] * n[0] + g[r][1] * n[1];
        }
    }
    f
}

/// Boundary operator `B^` at a boundary point `x`.
#[allow(clippy::too_many_arguments)]
pub fn boundary_operator<T: Real>(
    kind: &BoundaryKind,
    u_hat: &[T; NVAR],
    u_e: &[T; NVAR],
    phi: &[T; NSD],
    n: [f64; NSD],
    x: [f64; 2],
    gas: &GasModel,
) -> [T; NVAR] {
    let g = gas.gamma;
    match kind {
        BoundaryKind::FarField(state) => {
            let u_inf = state(x);
            let a = normal_jacobian_kernel(u_hat, n, g);
            let es = eigensystem(u_hat, n, g);
            let abs = es.compose(&es.lambda.map(|l| l.abs()));
            std::array::from_fn(|i| {
                let mut acc = T::zero();
                for j in 0..NVAR {
                    let plus = (a[i][j] + abs[i][j]) * 0.5;
                    let minus = (a[i][j] - abs[i][j]) * 0.5;
                    acc += plus * (u_e[j] - u_hat[j]) + minus * (u_hat[j] * -1.0 + u_inf[j]);
                }
                acc
            })
        }
        BoundaryKind::PressureOutflow { p_out } => [
            u_e[0] - u_hat[0],
            u_e[1] - u_hat[1],
            u_e[2] - u_hat[2],
            (u_e[1] * u_e[1] + u_e[2] * u_e[2]) / u_e[0] * 0.5 + p_out / (g - 1.0) - u_hat[3],
        ],
        BoundaryKind::AdiabaticWall => {
            let mu = gas.viscosity(temperature(u_hat, g));
            let q = (phi[0] * n[0] + phi[1] * n[1]) * mu * (gas.inv_reynolds() / gas.prandtl);
            [
                u_e[0] - u_hat[0],
                u_hat[1],
                u_hat[2],
                q - (u_e[3] - u_hat[3]) * gas.tau_d_energy(),
            ]
        }
        BoundaryKind::IsothermalWall { t_wall } => {
            [u_e[0] - u_hat[0], u_hat[1], u_hat[2], u_e[0] * (t_wall / g) - u_hat[3]]
        }
        BoundaryKind::InviscidWall => {
            let mn = u_e[1] * n[0] + u_e[2] * n[1];
            [
                u_e[0] - u_hat[0],
                u_e[1] - mn * n[0] - u_hat[1],
                u_e[2] - mn * n[1] - u_hat[2],
                u_e[3] - u_hat[3],
            ]
        }
        BoundaryKind::Dirichlet(state) => {
            let ex = state(x);
            std::array::from_fn(|i| u_hat[i] * -1.0 + ex[i])
        }
    }
}
