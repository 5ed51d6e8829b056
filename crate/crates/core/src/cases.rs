//! Built-in test problems.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::mesh::generate::{from_linear_mapped, rectangle_linear, unit_square_level};
use crate::mesh::{Mesh, MeshError};
use crate::physics::{GasModel, ViscosityLaw, MSD, NSD, NVAR};
use crate::riemann::RiemannScheme;
use crate::shock::SensorConfig;
use crate::solver::{BoundaryKind, Discretization, Problem, SolverError, State, StateFn};
use crate::verification::{couette_source, ringleb_exact, Couette};

pub const RINGLEB_TOL: f64 = 1e-14;

/// Ringleb's flow on the unit square with the exact state imposed through
/// the far-field operator.
pub fn ringleb(level: usize, k: usize, scheme: RiemannScheme) -> Result<Problem, MeshError> {
    let mesh = unit_square_level(level, k)?;
    let gas = GasModel::inviscid(0.5);
    let exact: StateFn = Arc::new(move |x: [f64; 2]| {
        ringleb_exact(x[0], x[1], 1.4, RINGLEB_TOL).expect("Ringleb state on the unit square")
    });
    Ok(Problem {
        boundaries: all_tags(&mesh, BoundaryKind::FarField(exact)),
        mesh,
        gas,
        scheme,
        source: None,
        shock: SensorConfig::default(),
        quadrature: None,
    })
}

/// Exact Ringleb state, for initial guesses and error evaluation.
pub fn ringleb_state(x: [f64; 2]) -> [f64; NVAR] {
    ringleb_exact(x[0], x[1], 1.4, RINGLEB_TOL).expect("Ringleb state on the unit square")
}

/// Gas model of the Couette problem at Reynolds number `re`.
pub fn couette_gas(re: f64) -> GasModel {
    GasModel {
        viscosity_law: ViscosityLaw::Constant,
        ..GasModel::viscous(0.15, re)
    }
}

/// Compressible Couette flow with its manufactured source on the unit
/// square; the exact state is imposed on the whole boundary.
pub fn couette(level: usize, k: usize, re: f64, scheme: RiemannScheme) -> Result<Problem, MeshError> {
    let mesh = unit_square_level(level, k)?;
    let gas = couette_gas(re);
    let exact: StateFn = Arc::new(move |x: [f64; 2]| Couette::default().exact(x[1], &gas).u);
    Ok(Problem {
        boundaries: all_tags(&mesh, BoundaryKind::Dirichlet(exact)),
        mesh,
        gas,
        scheme,
        source: Some(Arc::new(move |x: [f64; 2]| couette_source(x[1], re))),
        shock: SensorConfig::default(),
        quadrature: None,
    })
}

/// Exact Couette mixed variables `(eps, phi)` at `x`.
pub fn couette_mixed(gas: GasModel) -> impl Fn([f64; 2]) -> ([f64; MSD], [f64; NSD]) {
    move |x| {
        let p = Couette::default().exact(x[1], &gas);
        (p.eps, p.phi)
    }
}

/// Uniform flow at incidence `alpha` with far-field data on every boundary.
pub fn free_stream(
    mesh: Mesh,
    gas: GasModel,
    scheme: RiemannScheme,
    alpha: f64,
    shock: SensorConfig,
) -> Problem {
    let u = gas.free_stream(alpha);
    Problem {
        boundaries: all_tags(&mesh, BoundaryKind::uniform_far_field(u)),
        mesh,
        gas,
        scheme,
        source: None,
        shock,
        quadrature: None,
    }
}

/// Geometry of the supersonic wedge channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wedge {
    pub mach: f64,
    /// Ramp angle in degrees; negative values give an expansion corner.
    pub angle_deg: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Default for Wedge {
    fn default() -> Self {
        Self {
            mach: 3.0,
            angle_deg: 10.0,
            nx: 12,
            ny: 6,
        }
    }
}

impl Wedge {
    pub const LENGTH: f64 = 2.0;
    pub const HEIGHT: f64 = 1.0;
    pub const CORNER: f64 = 0.5;

    pub fn mesh(&self, k: usize) -> Result<Mesh, MeshError> {
        let (v, t, b) = rectangle_linear(self.nx, self.ny, [0.0, Self::LENGTH], [0.0, Self::HEIGHT]);
        let slope = self.angle_deg.to_radians().tan();
        let map = move |x: [f64; 2]| {
            let ramp = (x[0] - Self::CORNER).max(0.0) * slope;
            [x[0], x[1] + (1.0 - x[1] / Self::HEIGHT) * ramp]
        };
        from_linear_mapped(k, v, t, &b, Some(&map))
    }

    /// Euler flow over the ramp: free-stream state imposed on the supersonic
    /// inflow and top boundaries, far-field operator on the outflow, slip
    /// wall on the ramp. Laplacian shock capturing.
    pub fn problem(&self, k: usize, scheme: RiemannScheme) -> Result<Problem, MeshError> {
        let mesh = self.mesh(k)?;
        let gas = GasModel::inviscid(self.mach);
        let u_inf = gas.free_stream(0.0);
        let mut boundaries = all_tags(&mesh, BoundaryKind::Dirichlet(Arc::new(move |_| u_inf)));
        boundaries.insert("right".into(), BoundaryKind::uniform_far_field(u_inf));
        boundaries.insert("bottom".into(), BoundaryKind::InviscidWall);
        Ok(Problem {
            mesh,
            gas,
            scheme,
            boundaries,
            source: None,
            shock: SensorConfig::laplacian(1.0),
            quadrature: None,
        })
    }
}

fn all_tags(mesh: &Mesh, kind: BoundaryKind) -> BTreeMap<String, BoundaryKind> {
    mesh.boundary_tags()
        .into_iter()
        .map(|t| (t, kind.clone()))
        .collect()
}

/// Discretisation and exact-solution initial guess of a Ringleb run.
pub fn ringleb_setup(
    level: usize,
    k: usize,
    scheme: RiemannScheme,
) -> Result<(Discretization, State), SolverError> {
    let disc = Discretization::new(ringleb(level, k, scheme)?)?;
    let state = State::from_functions(&disc, ringleb_state, None);
    Ok((disc, state))
}

/// Discretisation and exact-solution initial guess of a Couette run.
pub fn couette_setup(
    level: usize,
    k: usize,
    re: f64,
    scheme: RiemannScheme,
) -> Result<(Discretization, State), SolverError> {
    let disc = Discretization::new(couette(level, k, re, scheme)?)?;
    let gas = *disc.gas();
    let mixed = couette_mixed(gas);
    let state = State::from_functions(
        &disc,
        move |x| Couette::default().exact(x[1], &gas).u,
        Some(&mixed),
    );
    Ok((disc, state))
}
