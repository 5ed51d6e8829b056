//! Field and history writers.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use hdg_core::physics::{MSD, NSD};
use hdg_core::solver::{ArtificialViscosity, Discretization, State, StepRecord};

use crate::CliError;

/// Writes one whitespace-separated row per element node:
/// `x y rho rhovx rhovy rhoE [eps11 eps22 eps12 phix phiy] [eps_art]`.
pub fn write_field(
    path: &Path,
    disc: &Discretization,
    state: &State,
    av: &ArtificialViscosity,
) -> Result<(), CliError> {
    let io = |e| CliError::Io(path.to_path_buf(), e);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    let mut header = String::from("# x y rho rhovx rhovy rhoE");
    if disc.viscous {
        header += " eps11 eps22 eps12 phix phiy";
    }
    let fields: Vec<&Vec<Vec<f64>>> = [&av.laplacian, &av.bulk]
        .into_iter()
        .filter(|f| !f.is_empty())
        .collect();
    if !fields.is_empty() {
        header += " eps_art";
    }
    writeln!(w, "{header}").map_err(io)?;
    for e in 0..disc.mesh().n_elements() {
        let u = state.u_nodal(disc, e);
        let eps = state.eps_nodal(disc, e);
        let phi = state.phi_nodal(disc, e);
        for (i, x) in disc.node_x[e].iter().enumerate() {
            let mut row = format!("{:.12e} {:.12e}", x[0], x[1]);
            for v in u[i] {
                row += &format!(" {v:.12e}");
            }
            if disc.viscous {
                for v in eps[i].iter().take(MSD).chain(phi[i].iter().take(NSD)) {
                    row += &format!(" {v:.12e}");
                }
            }
            if !fields.is_empty() {
                let a: f64 = fields.iter().map(|f| f[e][i]).sum();
                row += &format!(" {a:.12e}");
            }
            writeln!(w, "{row}").map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

/// Writes `step,time,res_continuity,res_total,min_rho,min_p`.
pub fn write_history(path: &Path, history: &[StepRecord]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["step", "time", "res_continuity", "res_total", "min_rho", "min_p"])?;
    for r in history {
        w.write_record(&[
            r.step.to_string(),
            format!("{:e}", r.time),
            format!("{:e}", r.res_continuity),
            format!("{:e}", r.res_total),
            format!("{:e}", r.min_rho),
            format!("{:e}", r.min_p),
        ])?;
    }
    w.flush().map_err(|e| CliError::Io(path.to_path_buf(), e))
}
