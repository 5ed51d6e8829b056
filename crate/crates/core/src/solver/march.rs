//! Static condensation, the global trace solve and the pseudo-time Newton
//! march.

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::kernels::dilatation;
use super::local::{ElementBlocks, TimeTerm};
use super::{ArtificialViscosity, Discretization, SolverError, State};
use crate::physics::{MSD, NVAR};
use crate::shock::{
    bulk_viscosity, c0_smooth, dilatation_sensor, persson_sensor, viscosity_ramp, SensorMode,
};

/// Element contribution to the condensed trace system.
#[derive(Debug, Clone)]
pub struct Condensed {
    /// `A_LL - A_LZ A_ZZ^-1 A_ZL`.
    pub k: DMatrix<f64>,
    /// `-R_L + A_LZ A_ZZ^-1 R_Z`.
    pub f: DVector<f64>,
    /// `A_ZZ^-1 A_ZL`.
    pub x1: DMatrix<f64>,
    /// `A_ZZ^-1 R_Z`.
    pub x2: DVector<f64>,
}

/// Eliminates the local unknowns of element `e`.
pub fn condense(b: &ElementBlocks, e: usize) -> Result<Condensed, SolverError> {
    let lu = b.a_zz.clone().lu();
    let x1 = lu.solve(&b.a_zl).ok_or(SolverError::SingularLocalMatrix(e))?;
    let x2 = lu.solve(&b.r_z).ok_or(SolverError::SingularLocalMatrix(e))?;
    if x1.iter().chain(x2.iter()).any(|v| !v.is_finite()) {
        return Err(SolverError::SingularLocalMatrix(e));
    }
    let k = &b.a_ll - &b.a_lz * &x1;
    let f = -&b.r_hat + &b.a_lz * &x2;
    Ok(Condensed { k, f, x1, x2 })
}

/// How the linearised system is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LinearSolve {
    #[default]
    Condensed,
    /// Direct solve of the full system in all unknowns.
    Monolithic,
}

/// Newton update and the residual norms at the linearisation point.
#[derive(Debug, Clone)]
pub struct Update {
    pub dz: Vec<Vec<f64>>,
    pub du_hat: Vec<f64>,
    pub report: NewtonReport,
}

/// Residual norms of one Newton iteration, evaluated before the update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonReport {
    /// Euclidean norm of the continuity rows of the local residual.
    pub res_continuity: f64,
    /// Euclidean norm of all local rows and the assembled global rows.
    pub res_total: f64,
    /// Maximum norm of the update.
    pub update_norm: f64,
}

fn sparse_solve(n: usize, triplets: &[Triplet<usize, usize, f64>], rhs: &[f64]) -> Result<Vec<f64>, SolverError> {
    let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, triplets)
        .map_err(|_| SolverError::SingularGlobalMatrix)?;
    let lu = a.sp_lu().map_err(|_| SolverError::SingularGlobalMatrix)?;
    let b = Mat::from_fn(n, 1, |i, _| rhs[i]);
    let x = lu.solve(&b);
    let x: Vec<f64> = (0..n).map(|i| x[(i, 0)]).collect();
    if x.iter().any(|v| !v.is_finite()) {
        return Err(SolverError::SingularGlobalMatrix);
    }
    Ok(x)
}

impl Discretization {
    fn all_blocks(
        &self,
        state: &State,
        z_prev: Option<&[Vec<f64>]>,
        inv_dt: f64,
        av: &ArtificialViscosity,
    ) -> Vec<ElementBlocks> {
        (0..self.mesh().n_elements())
            .into_par_iter()
            .map(|e| {
                let lam = self.gather_trace(e, &state.u_hat);
                let time = TimeTerm {
                    inv_dt,
                    z_prev: z_prev.map(|z| z[e].as_slice()),
                };
                self.element_blocks(e, &state.z[e], &lam, time, av)
            })
            .collect()
    }

    fn residual_norms(&self, blocks: &[ElementBlocks]) -> (f64, f64) {
        let n = self.n;
        let mut cont = 0.0;
        let mut local = 0.0;
        let mut global = vec![0.0; self.n_trace_dofs()];
        for (e, b) in blocks.iter().enumerate() {
            cont += b.r_z.rows(0, n).norm_squared();
            local += b.r_z.norm_squared();
            for (l, v) in b.r_hat.iter().enumerate() {
                global[self.trace_dof(e, l)] += v;
            }
        }
        let g: f64 = global.iter().map(|v| v * v).sum();
        (cont.sqrt(), (local + g).sqrt())
    }

    /// Steady residual norms `(continuity, total)` of `state`.
    pub fn steady_residual(&self, state: &State, av: &ArtificialViscosity) -> (f64, f64) {
        self.residual_norms(&self.all_blocks(state, None, 0.0, av))
    }

    /// Newton update of the (pseudo-time) residual at `state`.
    pub fn linearized_update(
        &self,
        state: &State,
        z_prev: Option<&[Vec<f64>]>,
        inv_dt: f64,
        av: &ArtificialViscosity,
        solve: LinearSolve,
    ) -> Result<Update, SolverError> {
        let blocks = self.all_blocks(state, z_prev, inv_dt, av);
        let (res_continuity, res_total) = self.residual_norms(&blocks);
        let (dz, du_hat) = match solve {
            LinearSolve::Condensed => self.condensed_solve(&blocks)?,
            LinearSolve::Monolithic => self.monolithic_solve(&blocks)?,
        };
        let update_norm = dz
            .iter()
            .flatten()
            .chain(&du_hat)
            .fold(0.0_f64, |a, v| a.max(v.abs()));
        Ok(Update {
            dz,
            du_hat,
            report: NewtonReport {
                res_continuity,
                res_total,
                update_norm,
            },
        })
    }

    fn condensed_solve(&self, blocks: &[ElementBlocks]) -> Result<(Vec<Vec<f64>>, Vec<f64>), SolverError> {
        let cond: Vec<Condensed> = blocks
            .par_iter()
            .enumerate()
            .map(|(e, b)| condense(b, e))
            .collect::<Result<_, _>>()?;
        let nt = self.n_trace_dofs();
        let mut trip = Vec::with_capacity(cond.len() * self.nl * self.nl);
        let mut rhs = vec![0.0; nt];
        for (e, c) in cond.iter().enumerate() {
            let map: Vec<usize> = (0..self.nl).map(|l| self.trace_dof(e, l)).collect();
            for i in 0..self.nl {
                rhs[map[i]] += c.f[i];
                for j in 0..self.nl {
                    let v = c.k[(i, j)];
                    if v != 0.0 {
                        trip.push(Triplet::new(map[i], map[j], v));
                    }
                }
            }
        }
        let du_hat = sparse_solve(nt, &trip, &rhs)?;
        let dz = cond
            .par_iter()
            .enumerate()
            .map(|(e, c)| {
                let dl = DVector::from_vec(self.gather_trace(e, &du_hat));
                (-&c.x2 - &c.x1 * dl).as_slice().to_vec()
            })
            .collect();
        Ok((dz, du_hat))
    }

    fn monolithic_solve(&self, blocks: &[ElementBlocks]) -> Result<(Vec<Vec<f64>>, Vec<f64>), SolverError> {
        let nz = self.nz;
        let off = blocks.len() * nz;
        let size = off + self.n_trace_dofs();
        let mut trip = Vec::new();
        let mut rhs = vec![0.0; size];
        let mut push = |i: usize, j: usize, v: f64| {
            if v != 0.0 {
                trip.push(Triplet::new(i, j, v));
            }
        };
        for (e, b) in blocks.iter().enumerate() {
            let map: Vec<usize> = (0..self.nl).map(|l| off + self.trace_dof(e, l)).collect();
            let z0 = e * nz;
            for i in 0..nz {
                rhs[z0 + i] = -b.r_z[i];
                for j in 0..nz {
                    push(z0 + i, z0 + j, b.a_zz[(i, j)]);
                }
                for j in 0..self.nl {
                    push(z0 + i, map[j], b.a_zl[(i, j)]);
                }
            }
            for i in 0..self.nl {
                rhs[map[i]] -= b.r_hat[i];
                for j in 0..nz {
                    push(map[i], z0 + j, b.a_lz[(i, j)]);
                }
                for j in 0..self.nl {
                    push(map[i], map[j], b.a_ll[(i, j)]);
                }
            }
        }
        let x = sparse_solve(size, &trip, &rhs)?;
        let dz = x[..off].chunks(nz).map(|c| c.to_vec()).collect();
        Ok((dz, x[off..].to_vec()))
    }

    /// Artificial viscosity of `state` for the configured sensor.
    pub fn compute_viscosity(&self, state: &State) -> ArtificialViscosity {
        let cfg = &self.problem.shock;
        let mesh = self.mesh();
        let k = mesh.k;
        let n = self.n;
        match cfg.mode {
            SensorMode::Off => ArtificialViscosity::default(),
            SensorMode::Laplacian => {
                if k < 2 && cfg.window.is_none() {
                    log::warn!("Laplacian sensor window is degenerate for k = {k}; no viscosity added");
                    return ArtificialViscosity::default();
                }
                let proj = self.re.top_mode_projection();
                let elemental: Vec<f64> = (0..mesh.n_elements())
                    .map(|e| {
                        let rho = &state.z[e][..n];
                        let s = match persson_sensor(rho, &self.re.inv_vandermonde, &proj) {
                            Ok(s) if s > 0.0 => s.log10(),
                            _ => f64::NEG_INFINITY,
                        };
                        let eps0 = cfg.eps0_multiplier * mesh.element_size(e) / k as f64;
                        viscosity_ramp(s, k, eps0, cfg).unwrap_or(0.0)
                    })
                    .collect();
                ArtificialViscosity {
                    laplacian: c0_smooth(mesh, &elemental, &self.re.nodes),
                    bulk: vec![],
                    elemental,
                }
            }
            SensorMode::Bulk => {
                let gas = self.gas();
                let elemental: Vec<f64> = (0..mesh.n_elements())
                    .map(|e| {
                        let z = &state.z[e];
                        let div_min = self
                            .re
                            .quad
                            .vol
                            .phi
                            .iter()
                            .map(|phi| {
                                let eps: [f64; MSD] = std::array::from_fn(|a| {
                                    phi.iter()
                                        .enumerate()
                                        .map(|(i, p)| p * z[(NVAR + a) * n + i])
                                        .sum()
                                });
                                dilatation(&eps)
                            })
                            .fold(f64::INFINITY, f64::min);
                        let h = mesh.element_size(e);
                        let s = dilatation_sensor(div_min, h, k, gas.c_inf());
                        bulk_viscosity(s, h, k, gas, cfg)
                    })
                    .collect();
                ArtificialViscosity {
                    laplacian: vec![],
                    bulk: c0_smooth(mesh, &elemental, &self.re.nodes),
                    elemental,
                }
            }
        }
    }
}

/// Response to a non-physical state after a pseudo-time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AdmissibilityPolicy {
    #[default]
    Abort,
    /// Restore the step-start state and retry with half the step.
    /// Infinite steps abort.
    HalveDt,
}

/// Pseudo-time Newton march settings.
#[derive(Debug, Clone, PartialEq)]
pub struct MarchConfig {
    /// Initial pseudo-time step; `f64::INFINITY` gives a pure Newton method.
    pub dt: f64,
    /// Step growth factor after each accepted step.
    pub growth: f64,
    pub dt_max: f64,
    pub dt_min: f64,
    pub max_steps: usize,
    /// Newton iterations per pseudo-time step.
    pub newton_max: usize,
    /// Newton iterations stop when the maximum update falls below this.
    pub newton_tol: f64,
    /// Steady continuity residual target.
    pub tol_continuity: f64,
    /// Alternative target: drop of the continuity residual by this many
    /// orders of magnitude below its largest recorded value.
    pub drop_orders: Option<f64>,
    /// Additional target on the total residual.
    pub tol_total: Option<f64>,
    pub policy: AdmissibilityPolicy,
    pub solve: LinearSolve,
    /// Keep the nodal artificial viscosity non-decreasing over the march.
    pub viscosity_memory: bool,
}

impl Default for MarchConfig {
    fn default() -> Self {
        Self {
            dt: 1.0,
            growth: 2.0,
            dt_max: 1e12,
            dt_min: 1e-8,
            max_steps: 200,
            newton_max: 1,
            newton_tol: 1e-12,
            tol_continuity: 1e-10,
            drop_orders: None,
            tol_total: None,
            policy: AdmissibilityPolicy::Abort,
            solve: LinearSolve::Condensed,
            viscosity_memory: false,
        }
    }
}

impl MarchConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: &str| Err(SolverError::InvalidConfig(m.into()));
        if !(self.dt > 0.0) {
            return bad("dt must be positive");
        }
        if !(self.growth >= 1.0) || !self.growth.is_finite() {
            return bad("growth factor must be at least 1");
        }
        if !(self.dt_max >= self.dt_min) || !(self.dt_min > 0.0) {
            return bad("need 0 < dt_min <= dt_max");
        }
        if self.newton_max == 0 {
            return bad("at least one Newton iteration per step is required");
        }
        if !(self.tol_continuity > 0.0) {
            return bad("tolerance must be positive");
        }
        Ok(())
    }
}

/// One row of the convergence history, recorded at the start of a step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    /// Accumulated pseudo-time.
    pub time: f64,
    /// Pseudo-time step about to be taken.
    pub dt: f64,
    pub res_continuity: f64,
    pub res_total: f64,
    pub min_rho: f64,
    pub min_p: f64,
    /// Largest artificial viscosity.
    pub viscosity: f64,
    /// Newton iterations of the step (zero on the final record).
    pub newton_iterations: usize,
}

/// Result of a march. The history is kept even on failure.
#[derive(Debug, Clone)]
pub struct MarchOutcome {
    pub history: Vec<StepRecord>,
    pub converged: bool,
    pub failure: Option<SolverError>,
}

impl MarchOutcome {
    pub fn steps(&self) -> usize {
        self.history.len().saturating_sub(1)
    }

    pub fn final_residual(&self) -> Option<f64> {
        self.history.last().map(|r| r.res_continuity)
    }

    pub fn into_result(self) -> Result<Self, SolverError> {
        match self.failure {
            Some(e) => Err(e),
            None if !self.converged => Err(SolverError::MaxIterations(self.steps())),
            None => Ok(self),
        }
    }
}

fn apply(state: &mut State, up: &Update) {
    for (z, dz) in state.z.iter_mut().zip(&up.dz) {
        for (a, b) in z.iter_mut().zip(dz) {
            *a += b;
        }
    }
    for (a, b) in state.u_hat.iter_mut().zip(&up.du_hat) {
        *a += b;
    }
}

fn admissible(min_rho: f64, min_p: f64) -> bool {
    min_rho > 0.0 && min_p > 0.0
}

/// Marches `state` to a steady state with implicit pseudo-time Newton steps.
pub fn newton_march(disc: &Discretization, state: &mut State, cfg: &MarchConfig) -> MarchOutcome {
    let mut history = Vec::new();
    let fail = |history, e| MarchOutcome {
        history,
        converged: false,
        failure: Some(e),
    };
    if let Err(e) = cfg.validate() {
        return fail(history, e);
    }
    let mut dt = cfg.dt;
    let mut time = 0.0;
    let mut max_cont: f64 = 0.0;
    let mut step = 0;
    let mut av_prev: Option<ArtificialViscosity> = None;
    loop {
        let mut av = disc.compute_viscosity(state);
        if cfg.viscosity_memory {
            if let Some(prev) = &av_prev {
                av.retain_max(prev);
            }
            av_prev = Some(av.clone());
        }
        let start = state.clone();
        let inv_dt = if dt.is_finite() { 1.0 / dt } else { 0.0 };
        let first = match disc.linearized_update(state, Some(&start.z), inv_dt, &av, cfg.solve) {
            Ok(u) => u,
            Err(e) => return fail(history, e),
        };
        let (min_rho, min_p) = state.admissibility(disc);
        let rep = first.report;
        max_cont = max_cont.max(rep.res_continuity);
        let mut record = StepRecord {
            step,
            time,
            dt,
            res_continuity: rep.res_continuity,
            res_total: rep.res_total,
            min_rho,
            min_p,
            viscosity: av.max(),
            newton_iterations: 0,
        };
        log::info!(
            "step {step:4}  dt {dt:9.3e}  res_cont {:10.4e}  res_total {:10.4e}",
            rep.res_continuity,
            rep.res_total
        );
        if !rep.res_continuity.is_finite() || !rep.res_total.is_finite() {
            history.push(record);
            return fail(history, SolverError::NonPhysicalState { step, min_rho, min_p });
        }
        let by_tol = rep.res_continuity < cfg.tol_continuity;
        let by_drop = cfg
            .drop_orders
            .is_some_and(|o| max_cont > 0.0 && rep.res_continuity <= max_cont * 10f64.powf(-o));
        let total_ok = cfg.tol_total.is_none_or(|t| rep.res_total < t);
        if (by_tol || by_drop) && total_ok {
            history.push(record);
            return MarchOutcome {
                history,
                converged: true,
                failure: None,
            };
        }
        if step >= cfg.max_steps {
            history.push(record);
            return MarchOutcome {
                history,
                converged: false,
                failure: None,
            };
        }
        apply(state, &first);
        let mut iters = 1;
        let mut last = first.report.update_norm;
        while iters < cfg.newton_max && last >= cfg.newton_tol {
            match disc.linearized_update(state, Some(&start.z), inv_dt, &av, cfg.solve) {
                Ok(u) => {
                    apply(state, &u);
                    last = u.report.update_norm;
                    iters += 1;
                }
                Err(e) => {
                    history.push(record);
                    return fail(history, e);
                }
            }
        }
        record.newton_iterations = iters;
        history.push(record);
        let (min_rho, min_p) = state.admissibility(disc);
        if !admissible(min_rho, min_p) {
            let err = SolverError::NonPhysicalState {
                step,
                min_rho,
                min_p,
            };
            match cfg.policy {
                AdmissibilityPolicy::HalveDt if dt.is_finite() && dt * 0.5 >= cfg.dt_min => {
                    log::warn!("non-physical state at step {step}; halving dt to {:e}", dt * 0.5);
                    *state = start;
                    dt *= 0.5;
                    step += 1;
                    continue;
                }
                _ => return fail(history, err),
            }
        }
        time += dt;
        if dt.is_finite() {
            dt = (dt * cfg.growth).min(cfg.dt_max);
        }
        step += 1;
    }
}
