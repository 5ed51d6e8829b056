//! h-convergence studies against exact solutions.

use std::path::PathBuf;

use rayon::prelude::*;

use hdg_core::cases::{couette_mixed, ringleb_state};
use hdg_core::solver::{newton_march, Discretization, State};
use hdg_core::verification::{combine, l2_error, ConvergenceTable, Couette, Rate};

use crate::config::{parse_scheme, CaseKind, RunConfig};
use crate::run::build;
use crate::CliError;

/// Errors below this are treated as exact and excluded from rate checks.
pub const EXACT_FLOOR: f64 = 1e-12;

/// Solution error of one solve.
#[derive(Debug, Clone)]
pub struct LevelResult {
    pub level: usize,
    pub h: f64,
    pub dofs: usize,
    pub errors: Vec<f64>,
    pub converged: bool,
    pub steps: usize,
}

/// All levels of one `(scheme, k)` pair.
#[derive(Debug, Clone)]
pub struct StudyBlock {
    pub scheme: String,
    pub k: usize,
    pub columns: Vec<&'static str>,
    pub levels: Vec<LevelResult>,
    /// Last-interval and fitted rates per column; `None` for columns that
    /// are exact on every level.
    pub rates: Vec<Option<Rate>>,
    pub expected: f64,
    pub pass: bool,
}

impl StudyBlock {
    pub fn min_rate(&self) -> f64 {
        self.rates
            .iter()
            .flatten()
            .map(|r| r.last)
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone)]
pub struct StudyReport {
    pub blocks: Vec<StudyBlock>,
    pub table: Option<PathBuf>,
}

impl StudyReport {
    pub fn pass(&self) -> bool {
        self.blocks.iter().all(|b| b.pass)
    }
}

/// Names of the error columns reported for a case.
pub fn error_columns(case: CaseKind) -> Result<Vec<&'static str>, CliError> {
    match case {
        CaseKind::Ringleb => Ok(vec!["rho", "rhov", "rhoE"]),
        CaseKind::Couette => Ok(vec!["rho", "rhov", "rhoE", "eps", "phi"]),
        _ => Err(CliError::Config(
            "convergence studies need a case with an exact solution (ringleb or couette)".into(),
        )),
    }
}

/// L2 errors of `state` against the exact solution, in the order of
/// [`error_columns`].
pub fn solution_errors(case: CaseKind, disc: &Discretization, state: &State) -> Result<Vec<f64>, CliError> {
    let mesh = disc.mesh();
    let u = state.all_u(disc);
    match case {
        CaseKind::Ringleb => {
            let e = l2_error(mesh, &u, ringleb_state);
            Ok(vec![e[0], combine(&e[1..3]), e[3]])
        }
        CaseKind::Couette => {
            let gas = *disc.gas();
            let exact = |x: [f64; 2]| Couette::default().exact(x[1], &gas);
            let mixed = couette_mixed(gas);
            let e = l2_error(mesh, &u, |x| exact(x).u);
            let eps = l2_error(mesh, &state.all_eps(disc), |x| mixed(x).0);
            let phi = l2_error(mesh, &state.all_phi(disc), |x| mixed(x).1);
            Ok(vec![e[0], combine(&e[1..3]), e[3], combine(&eps), combine(&phi)])
        }
        _ => error_columns(case).map(|_| vec![]),
    }
}

/// Solves one level and measures its error.
pub fn solve_level(cfg: &RunConfig, level: usize, k: usize) -> Result<LevelResult, CliError> {
    let (disc, mut state) = build(cfg, level, k)?;
    let out = newton_march(&disc, &mut state, &cfg.march()?);
    if let Some(e) = out.failure.clone() {
        return Err(e.into());
    }
    Ok(LevelResult {
        level,
        h: disc.mesh().h_max(),
        dofs: disc.dofs(),
        errors: solution_errors(cfg.case, &disc, &state)?,
        converged: out.converged,
        steps: out.steps(),
    })
}

fn block(cfg: &RunConfig, scheme: &str, k: usize) -> Result<StudyBlock, CliError> {
    let columns = error_columns(cfg.case)?;
    let mut c = cfg.clone();
    c.scheme = scheme.to_string();
    c.k = k;
    let levels = cfg
        .study
        .levels
        .iter()
        .map(|&l| solve_level(&c, l, k))
        .collect::<Result<Vec<_>, _>>()?;
    let active: Vec<usize> = (0..columns.len())
        .filter(|&j| levels.iter().any(|r| r.errors[j] >= EXACT_FLOOR))
        .collect();
    let mut table = ConvergenceTable::default();
    for r in &levels {
        table.push(r.h, r.dofs, active.iter().map(|&j| r.errors[j]).collect());
    }
    let mut rates = vec![None; columns.len()];
    if !active.is_empty() {
        for (j, r) in active.iter().zip(table.rates()?) {
            rates[*j] = Some(r);
        }
    }
    let expected = (k + 1) as f64 - cfg.study.slack;
    let pass = levels.iter().all(|r| r.converged) && rates.iter().flatten().all(|r| r.last >= expected);
    Ok(StudyBlock {
        scheme: scheme.to_string(),
        k,
        columns,
        levels,
        rates,
        expected,
        pass,
    })
}

/// Runs every `(scheme, k)` block of the study, writes the table and
/// returns the blocks in configuration order.
pub fn run_study(cfg: &RunConfig) -> Result<StudyReport, CliError> {
    error_columns(cfg.case)?;
    if cfg.study.levels.len() < 2 {
        return Err(hdg_core::verification::VerificationError::DegenerateTable.into());
    }
    for s in &cfg.study.schemes {
        parse_scheme(s)?;
    }
    let jobs: Vec<(String, usize)> = cfg
        .study
        .schemes
        .iter()
        .flat_map(|s| cfg.study.degrees.iter().map(move |&k| (s.clone(), k)))
        .collect();
    let blocks = jobs
        .par_iter()
        .map(|(s, k)| block(cfg, s, *k))
        .collect::<Result<Vec<_>, _>>()?;
    std::fs::create_dir_all(&cfg.output.dir).map_err(|e| CliError::Io(cfg.output.dir.clone(), e))?;
    let path = cfg.output.dir.join(&cfg.output.table);
    write_table(&path, &blocks)?;
    Ok(StudyReport {
        blocks,
        table: Some(path),
    })
}

/// One row per `(scheme, k, level)`: errors, the rate from the previous
/// level, and the block verdict.
pub fn write_table(path: &std::path::Path, blocks: &[StudyBlock]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    let Some(first) = blocks.first() else {
        w.flush().map_err(|e| CliError::Io(path.to_path_buf(), e))?;
        return Ok(());
    };
    let mut header = vec!["scheme".to_string(), "k".into(), "level".into(), "h".into(), "dofs".into()];
    header.extend(first.columns.iter().map(|c| format!("err_{c}")));
    header.extend(first.columns.iter().map(|c| format!("rate_{c}")));
    header.extend(["converged".into(), "pass".into()]);
    w.write_record(&header)?;
    for b in blocks {
        for (i, r) in b.levels.iter().enumerate() {
            let mut row = vec![
                b.scheme.clone(),
                b.k.to_string(),
                r.level.to_string(),
                format!("{:e}", r.h),
                r.dofs.to_string(),
            ];
            row.extend(r.errors.iter().map(|e| format!("{e:e}")));
            for (j, e) in r.errors.iter().enumerate() {
                row.push(match i {
                    0 => String::new(),
                    _ => {
                        let p = &b.levels[i - 1];
                        format!("{:.4}", (p.errors[j] / e).ln() / (p.h / r.h).ln())
                    }
                });
            }
            row.push(r.converged.to_string());
            row.push(b.pass.to_string());
            w.write_record(&row)?;
        }
    }
    w.flush().map_err(|e| CliError::Io(path.to_path_buf(), e))
}
