//! Hybridisable DG discretisation: element-local residuals and Jacobians,
//! static condensation, the global trace system and the pseudo-time Newton
//! march.
//!
//! Unknowns of element `e` with `n` nodes are stored variable-major: the
//! conserved variables at `r * n + i`, followed for viscous runs by the
//! Voigt strain rate `(e11, e22, e12)` at `(4 + a) * n + i` and the
//! temperature gradient at `(7 + d) * n + i`. The hybrid variable is stored
//! per face node in the face's canonical direction: `(face * (k + 1) + j) * 4 + r`.

pub mod kernels;
pub mod local;
pub mod march;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::mesh::geometry::interp;
use crate::mesh::reference::face_point;
use crate::mesh::{ElementGeometry, Mesh, MeshError, ReferenceElement, N_FACES};
use crate::physics::{pressure, GasModel, MSD, NSD, NVAR};
use crate::riemann::RiemannScheme;
use crate::shock::{SensorConfig, SensorMode};

pub use kernels::{BoundaryKind, PointViscosity, StateFn};
pub use local::{ElementBlocks, TimeTerm};
pub use march::{
    condense, newton_march, AdmissibilityPolicy, Condensed, LinearSolve, MarchConfig, MarchOutcome,
    NewtonReport, StepRecord, Update,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("boundary tag {0:?} has no boundary condition")]
    MissingSpec(String),
    #[error("boundary condition given for unknown tag {0:?}")]
    UnknownTag(String),
    #[error("boundary {tag:?}: {kind} requires a viscous gas model")]
    ViscousBoundaryOnEuler { tag: String, kind: &'static str },
    #[error("local matrix of element {0} is singular")]
    SingularLocalMatrix(usize),
    #[error("global trace matrix is singular")]
    SingularGlobalMatrix,
    #[error("non-physical state at step {step}: min rho = {min_rho:e}, min p = {min_p:e}")]
    NonPhysicalState { step: usize, min_rho: f64, min_p: f64 },
    #[error("no steady convergence within {0} pseudo-time steps")]
    MaxIterations(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Everything defining a steady flow problem.
#[derive(Clone)]
pub struct Problem {
    pub mesh: Mesh,
    pub gas: GasModel,
    pub scheme: RiemannScheme,
    pub boundaries: BTreeMap<String, BoundaryKind>,
    /// Volume source `S` with `div(F - G) = S`.
    pub source: Option<StateFn>,
    pub shock: SensorConfig,
    /// Polynomial degree integrated exactly by the residual quadrature
    /// (default `2k + 1`).
    pub quadrature: Option<usize>,
}

/// Immutable per-mesh data shared by all residual evaluations.
pub struct Discretization {
    pub problem: Problem,
    pub re: ReferenceElement,
    pub geom: Vec<ElementGeometry>,
    /// Nodes per element.
    pub n: usize,
    /// Nodes per face.
    pub nf: usize,
    pub viscous: bool,
    /// Local unknowns per element.
    pub nz: usize,
    /// Local trace unknowns per element (three faces).
    pub nl: usize,
    /// Physical coordinates of the element nodes.
    pub node_x: Vec<Vec<[f64; 2]>>,
    /// Physical coordinates of the trace nodes, `face * nf + j`.
    pub trace_x: Vec<[f64; 2]>,
    /// Boundary condition of each face (`None` for interior faces).
    pub face_bc: Vec<Option<BoundaryKind>>,
    /// Source at the volume quadrature points.
    pub source_q: Vec<Vec<[f64; NVAR]>>,
}

impl Discretization {
    pub fn new(problem: Problem) -> Result<Self, SolverError> {
        let mesh = &problem.mesh;
        let gas = &problem.gas;
        gas.validate().map_err(SolverError::InvalidConfig)?;
        problem
            .shock
            .validate()
            .map_err(|e| SolverError::InvalidConfig(e.to_string()))?;
        match problem.shock.mode {
            SensorMode::Bulk if gas.is_inviscid() => {
                return Err(SolverError::InvalidConfig(
                    "bulk artificial viscosity requires a viscous gas model".into(),
                ))
            }
            SensorMode::Laplacian if !gas.is_inviscid() && !problem.shock.expert => {
                return Err(SolverError::InvalidConfig(
                    "Laplacian artificial viscosity on a viscous run requires the expert flag".into(),
                ))
            }
            _ => {}
        }
        let tags = mesh.boundary_tags();
        for t in &tags {
            if !problem.boundaries.contains_key(t) {
                return Err(SolverError::MissingSpec(t.clone()));
            }
        }
        for (t, kind) in &problem.boundaries {
            if !tags.contains(t) {
                return Err(SolverError::UnknownTag(t.clone()));
            }
            if kind.needs_viscosity() && gas.is_inviscid() {
                return Err(SolverError::ViscousBoundaryOnEuler {
                    tag: t.clone(),
                    kind: kind.name(),
                });
            }
        }
        let k = mesh.k;
        let re = ReferenceElement::with_quadrature(k, problem.quadrature.unwrap_or(2 * k + 1));
        let n = re.n_nodes();
        let nf = k + 1;
        let viscous = !gas.is_inviscid();
        let nz = if viscous { (NVAR + MSD + NSD) * n } else { NVAR * n };
        let nl = N_FACES * nf * NVAR;
        let geom: Vec<ElementGeometry> = (0..mesh.n_elements())
            .map(|e| ElementGeometry::new(mesh, &re.quad, e))
            .collect();
        let node_x: Vec<Vec<[f64; 2]>> = (0..mesh.n_elements())
            .map(|e| mesh.element_coords(e))
            .collect();
        let mut trace_x = Vec::with_capacity(mesh.n_faces() * nf);
        for face in &mesh.faces {
            let xs = &node_x[face.left.element];
            for &t in &re.face_nodes {
                let xi = face_point(face.left.local_face, t);
                trace_x.push(interp(xs, &re.shape(xi)));
            }
        }
        let face_bc = mesh
            .faces
            .iter()
            .map(|f| f.tag.as_ref().map(|t| problem.boundaries[t].clone()))
            .collect();
        let source_q = geom
            .iter()
            .map(|g| match &problem.source {
                Some(s) => g.x.iter().map(|&x| s(x)).collect(),
                None => vec![],
            })
            .collect();
        Ok(Self {
            re,
            geom,
            n,
            nf,
            viscous,
            nz,
            nl,
            node_x,
            trace_x,
            face_bc,
            source_q,
            problem,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.problem.mesh
    }

    pub fn gas(&self) -> &GasModel {
        &self.problem.gas
    }

    pub fn n_trace_dofs(&self) -> usize {
        self.mesh().n_faces() * self.nf * NVAR
    }

    /// Global trace dof of local trace index `l` of element `e`.
    #[inline]
    pub fn trace_dof(&self, e: usize, l: usize) -> usize {
        let per_face = self.nf * NVAR;
        let f = l / per_face;
        self.mesh().element_faces[e][f] * per_face + l % per_face
    }

    /// Restriction of the global trace vector to element `e`.
    pub fn gather_trace(&self, e: usize, u_hat: &[f64]) -> Vec<f64> {
        (0..self.nl).map(|l| u_hat[self.trace_dof(e, l)]).collect()
    }

    /// Degrees of freedom of the condensed problem.
    pub fn dofs(&self) -> usize {
        self.n_trace_dofs()
    }
}

/// Element unknowns and hybrid variable.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub z: Vec<Vec<f64>>,
    pub u_hat: Vec<f64>,
}

impl State {
    /// Interpolates `u` (and, for viscous runs, the mixed variables) at the
    /// element and trace nodes.
    pub fn from_functions(
        disc: &Discretization,
        u: impl Fn([f64; 2]) -> [f64; NVAR],
        mixed: Option<&dyn Fn([f64; 2]) -> ([f64; MSD], [f64; NSD])>,
    ) -> Self {
        let n = disc.n;
        let z = disc
            .node_x
            .iter()
            .map(|xs| {
                let mut z = vec![0.0; disc.nz];
                for (i, &x) in xs.iter().enumerate() {
                    let s = u(x);
                    for r in 0..NVAR {
                        z[r * n + i] = s[r];
                    }
                    if disc.viscous {
                        if let Some(m) = mixed {
                            let (eps, phi) = m(x);
                            for a in 0..MSD {
                                z[(NVAR + a) * n + i] = eps[a];
                            }
                            for d in 0..NSD {
                                z[(NVAR + MSD + d) * n + i] = phi[d];
                            }
                        }
                    }
                }
                z
            })
            .collect();
        let u_hat = disc.trace_x.iter().flat_map(|&x| u(x)).collect();
        Self { z, u_hat }
    }

    pub fn uniform(disc: &Discretization, u: [f64; NVAR]) -> Self {
        Self::from_functions(disc, |_| u, None)
    }

    /// Conserved variables at the nodes of element `e`.
    pub fn u_nodal(&self, disc: &Discretization, e: usize) -> Vec<[f64; NVAR]> {
        let n = disc.n;
        (0..n)
            .map(|i| std::array::from_fn(|r| self.z[e][r * n + i]))
            .collect()
    }

    pub fn eps_nodal(&self, disc: &Discretization, e: usize) -> Vec<[f64; MSD]> {
        let n = disc.n;
        (0..n)
            .map(|i| {
                std::array::from_fn(|a| {
                    if disc.viscous {
                        self.z[e][(NVAR + a) * n + i]
                    } else {
                        0.0
                    }
                })
            })
            .collect()
    }

    pub fn phi_nodal(&self, disc: &Discretization, e: usize) -> Vec<[f64; NSD]> {
        let n = disc.n;
        (0..n)
            .map(|i| {
                std::array::from_fn(|d| {
                    if disc.viscous {
                        self.z[e][(NVAR + MSD + d) * n + i]
                    } else {
                        0.0
                    }
                })
            })
            .collect()
    }

    pub fn all_u(&self, disc: &Discretization) -> Vec<Vec<[f64; NVAR]>> {
        (0..self.z.len()).map(|e| self.u_nodal(disc, e)).collect()
    }

    pub fn all_eps(&self, disc: &Discretization) -> Vec<Vec<[f64; MSD]>> {
        (0..self.z.len()).map(|e| self.eps_nodal(disc, e)).collect()
    }

    pub fn all_phi(&self, disc: &Discretization) -> Vec<Vec<[f64; NSD]>> {
        (0..self.z.len()).map(|e| self.phi_nodal(disc, e)).collect()
    }

    /// Minimum density and pressure over element and trace nodes.
    pub fn admissibility(&self, disc: &Discretization) -> (f64, f64) {
        let g = disc.gas().gamma;
        let mut min_rho = f64::INFINITY;
        let mut min_p = f64::INFINITY;
        let mut visit = |u: &[f64; NVAR]| {
            if u.iter().any(|x| !x.is_finite()) {
                min_rho = f64::NAN;
                min_p = f64::NAN;
                return;
            }
            min_rho = min_rho.min(u[0]);
            min_p = min_p.min(pressure(u, g));
        };
        for e in 0..self.z.len() {
            for u in self.u_nodal(disc, e) {
                visit(&u);
            }
        }
        for c in self.u_hat.chunks_exact(NVAR) {
            visit(&[c[0], c[1], c[2], c[3]]);
        }
        (min_rho, min_p)
    }
}

/// Artificial viscosity fields at the element nodes, frozen during a
/// pseudo-time step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ArtificialViscosity {
    /// Laplacian viscosity per element node (empty when inactive).
    pub laplacian: Vec<Vec<f64>>,
    /// Bulk viscosity per element node (empty when inactive).
    pub bulk: Vec<Vec<f64>>,
    /// Raw elemental values before smoothing (sensor output).
    pub elemental: Vec<f64>,
}

impl ArtificialViscosity {
    pub fn is_active(&self) -> bool {
        !self.laplacian.is_empty() || !self.bulk.is_empty()
    }

    /// Pointwise maximum with an earlier field of the same mode.
    pub fn retain_max(&mut self, other: &Self) {
        for (a, b) in [(&mut self.laplacian, &other.laplacian), (&mut self.bulk, &other.bulk)] {
            if a.len() == b.len() {
                for (x, y) in a.iter_mut().flatten().zip(b.iter().flatten()) {
                    *x = x.max(*y);
                }
            }
        }
        if self.elemental.len() == other.elemental.len() {
            for (x, y) in self.elemental.iter_mut().zip(&other.elemental) {
                *x = x.max(*y);
            }
        }
    }

    pub fn max(&self) -> f64 {
        self.laplacian
            .iter()
            .chain(&self.bulk)
            .flatten()
            .fold(0.0, |a: f64, &b| a.max(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn retain_max_is_pointwise() {
        let mut a = ArtificialViscosity {
            laplacian: vec![vec![0.0, 2.0], vec![1.0, 1.0]],
            elemental: vec![0.5, 0.0],
            ..Default::default()
        };
        let b = ArtificialViscosity {
            laplacian: vec![vec![1.0, 1.0], vec![0.0, 3.0]],
            elemental: vec![0.0, 0.25],
            ..Default::default()
        };
        a.retain_max(&b);
        assert_eq!(a.laplacian, vec![vec![1.0, 2.0], vec![1.0, 3.0]]);
        assert_eq!(a.elemental, vec![0.5, 0.25]);
        assert_eq!(a.max(), 3.0);
        let mut off = ArtificialViscosity::default();
        off.retain_max(&b);
        assert!(!off.is_active());
    }
}
