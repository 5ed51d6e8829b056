//! Single solves.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use hdg_core::cases::{self, couette_mixed, ringleb_state, Wedge};
use hdg_core::mesh::generate::unit_square_level;
use hdg_core::mesh::io;
use hdg_core::physics::{GasModel, NVAR};
use hdg_core::solver::{
    newton_march, BoundaryKind, Discretization, MarchOutcome, Problem, SolverError, State,
};
use hdg_core::verification::Couette;

use crate::config::{CaseKind, RunConfig};
use crate::output::{write_field, write_history};
use crate::CliError;

/// Exit status of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Converged = 0,
    Failed = 1,
    NonPhysical = 2,
    MaxIterations = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn of(outcome: &MarchOutcome) -> Self {
        match &outcome.failure {
            None if outcome.converged => Self::Converged,
            None => Self::MaxIterations,
            Some(SolverError::NonPhysicalState { .. }) => Self::NonPhysical,
            Some(_) => Self::Failed,
        }
    }
}

/// Result of [`run_case`].
#[derive(Debug)]
pub struct RunReport {
    pub status: ExitStatus,
    pub outcome: MarchOutcome,
    pub field: PathBuf,
    pub history: PathBuf,
}

/// Discretisation and initial state of a configured case.
pub fn build(cfg: &RunConfig, level: usize, k: usize) -> Result<(Discretization, State), CliError> {
    let scheme = cfg.scheme()?;
    let gas = cfg.gas_model()?;
    let shock = cfg.sensor()?;
    let alpha = cfg.gas.alpha.to_radians();
    let mut problem = match cfg.case {
        CaseKind::Ringleb => {
            let mut p = cases::ringleb(level, k, scheme)?;
            p.gas = gas;
            p
        }
        CaseKind::Couette => {
            let re = gas.reynolds.unwrap_or(1.0);
            let mut p = cases::couette(level, k, re, scheme)?;
            p.gas = gas;
            p
        }
        CaseKind::UnitSquare => {
            cases::free_stream(unit_square_level(level, k)?, gas, scheme, alpha, shock)
        }
        CaseKind::Wedge => {
            let w = Wedge {
                mach: gas.mach_inf,
                angle_deg: cfg.wedge.angle_deg,
                nx: cfg.wedge.nx,
                ny: cfg.wedge.ny,
            };
            let mut p = w.problem(k, scheme)?;
            p.gas = gas;
            p
        }
        CaseKind::Mesh => {
            let path = cfg.mesh.as_ref().expect("validated");
            let mesh = io::read(path)?;
            Problem {
                mesh,
                gas,
                scheme,
                boundaries: Default::default(),
                source: None,
                shock,
                quadrature: None,
            }
        }
    };
    problem.shock = shock;
    bind_boundaries(cfg, &mut problem)?;
    let disc = Discretization::new(problem)?;
    let state = initial_state(cfg, &disc);
    Ok((disc, state))
}

fn bind_boundaries(cfg: &RunConfig, problem: &mut Problem) -> Result<(), CliError> {
    let gas = problem.gas;
    let alpha = cfg.gas.alpha.to_radians();
    for (tag, spec) in &cfg.boundary {
        let kind = parse_boundary(spec, cfg.case, &gas, alpha)?;
        problem.boundaries.insert(tag.clone(), kind);
    }
    Ok(())
}

/// Parses a boundary binding.
pub fn parse_boundary(spec: &str, case: CaseKind, gas: &GasModel, alpha: f64) -> Result<BoundaryKind, CliError> {
    let (name, arg) = match spec.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (spec, None),
    };
    let value = |what: &str| -> Result<f64, CliError> {
        arg.ok_or_else(|| CliError::Config(format!("boundary {name:?} needs a value ({what})")))?
            .parse()
            .map_err(|_| CliError::Config(format!("cannot parse boundary value in {spec:?}")))
    };
    Ok(match name {
        "far-field" => BoundaryKind::uniform_far_field(gas.free_stream(alpha)),
        "inviscid-wall" | "slip-wall" | "symmetry" => BoundaryKind::InviscidWall,
        "adiabatic-wall" => BoundaryKind::AdiabaticWall,
        "isothermal-wall" => BoundaryKind::IsothermalWall {
            t_wall: value("wall temperature")?,
        },
        "pressure-outflow" => BoundaryKind::PressureOutflow {
            p_out: value("outflow pressure")?,
        },
        "exact" => match exact_state(case, *gas) {
            Some(f) => BoundaryKind::Dirichlet(f),
            None => return Err(CliError::Config(format!("case has no exact solution for {spec:?}"))),
        },
        other => return Err(CliError::Config(format!("unknown boundary condition {other:?}"))),
    })
}

fn exact_state(case: CaseKind, gas: GasModel) -> Option<hdg_core::solver::StateFn> {
    match case {
        CaseKind::Ringleb => Some(Arc::new(ringleb_state)),
        CaseKind::Couette => Some(Arc::new(move |x: [f64; 2]| Couette::default().exact(x[1], &gas).u)),
        _ => None,
    }
}

fn initial_state(cfg: &RunConfig, disc: &Discretization) -> State {
    let gas = *disc.gas();
    match cfg.case {
        CaseKind::Ringleb => State::from_functions(disc, ringleb_state, None),
        CaseKind::Couette => {
            let mixed = couette_mixed(gas);
            State::from_functions(disc, move |x| Couette::default().exact(x[1], &gas).u, Some(&mixed))
        }
        _ => {
            let u: [f64; NVAR] = gas.free_stream(cfg.gas.alpha.to_radians());
            State::uniform(disc, u)
        }
    }
}

/// Solves a configured case and writes the field and history files.
pub fn run_case(cfg: &RunConfig) -> Result<RunReport, CliError> {
    let (disc, mut state) = build(cfg, cfg.level, cfg.k)?;
    let march = cfg.march()?;
    let outcome = newton_march(&disc, &mut state, &march);
    let status = ExitStatus::of(&outcome);
    match &outcome.failure {
        Some(SolverError::NonPhysicalState { step, min_rho, min_p }) => {
            log::error!("non-physical state at step {step}: min_rho = {min_rho:e}, min_p = {min_p:e}")
        }
        Some(e) => log::error!("{e}"),
        None if !outcome.converged => log::error!("not converged after {} steps", outcome.steps()),
        None => log::info!("converged in {} steps", outcome.steps()),
    }
    let dir = &cfg.output.dir;
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.clone(), e))?;
    let field = dir.join(&cfg.output.field);
    let history = dir.join(&cfg.output.history);
    let av = disc.compute_viscosity(&state);
    write_field(&field, &disc, &state, &av)?;
    write_history(&history, &outcome.history)?;
    Ok(RunReport {
        status,
        outcome,
        field,
        history,
    })
}

pub fn run_file(path: &Path) -> Result<RunReport, CliError> {
    run_case(&RunConfig::read(path)?)
}
