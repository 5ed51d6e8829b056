use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hdg_cli::config::parse_scheme;
use hdg_cli::{run_case, run_study, CliError, ExitStatus, RunConfig};
use hdg_core::physics::{inviscid_normal_flux, GasModel, NVAR};
use hdg_core::riemann::{stabilization_tau, trace_flux};

#[derive(Parser)]
#[command(name = "hdg", version, about = "High-order HDG solver for steady compressible flow")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Reserved; no run depends on it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the case described by a TOML configuration.
    Solve { config: PathBuf },
    /// Run the h-convergence study of a configuration.
    Converge { config: PathBuf },
    /// Print the trace flux and stabilisation matrix at a conserved state.
    FluxTable {
        scheme: String,
        /// rho rho*vx rho*vy rho*E
        #[arg(num_args = 4, allow_negative_numbers = true)]
        state: Vec<f64>,
        #[arg(long, num_args = 2, default_values_t = [1.0, 0.0], allow_negative_numbers = true)]
        normal: Vec<f64>,
        #[arg(long, default_value_t = 0.5)]
        mach: f64,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("thread pool: {e}");
        }
    }
    let _ = cli.seed;
    let code = match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

fn execute(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Solve { config } => {
            let report = run_case(&RunConfig::read(&config)?)?;
            if let Some(last) = report.outcome.history.last() {
                println!(
                    "steps {}  res_continuity {:.3e}  res_total {:.3e}  min_rho {:.3e}  min_p {:.3e}",
                    report.outcome.steps(),
                    last.res_continuity,
                    last.res_total,
                    last.min_rho,
                    last.min_p
                );
            }
            println!("field   {}", report.field.display());
            println!("history {}", report.history.display());
            Ok(report.status.code())
        }
        Command::Converge { config } => {
            let report = run_study(&RunConfig::read(&config)?)?;
            for b in &report.blocks {
                let rates: Vec<String> = b
                    .columns
                    .iter()
                    .zip(&b.rates)
                    .map(|(c, r)| match r {
                        Some(r) => format!("{c} {:.2}", r.last),
                        None => format!("{c} exact"),
                    })
                    .collect();
                println!(
                    "{} {:<8} k={}  {}  (need {:.2})",
                    if b.pass { "PASS" } else { "FAIL" },
                    b.scheme,
                    b.k,
                    rates.join(", "),
                    b.expected
                );
            }
            if let Some(t) = &report.table {
                println!("table {}", t.display());
            }
            Ok(if report.pass() { 0 } else { ExitStatus::Failed.code() })
        }
        Command::FluxTable {
            scheme,
            state,
            normal,
            mach,
        } => {
            let scheme = parse_scheme(&scheme)?;
            let gas = GasModel::inviscid(mach);
            let u: [f64; NVAR] = [state[0], state[1], state[2], state[3]];
            let len = normal[0].hypot(normal[1]);
            if len == 0.0 {
                return Err(CliError::Config("normal must be non-zero".into()));
            }
            let n = [normal[0] / len, normal[1] / len];
            let bad = |e: hdg_core::riemann::RiemannError| CliError::Config(e.to_string());
            let f = trace_flux(&u, &u, n, scheme, &gas).map_err(bad)?;
            let fe = inviscid_normal_flux(&u, n, gas.gamma);
            let tau = stabilization_tau(scheme, &u, n, &gas).map_err(bad)?;
            println!("scheme {scheme}  n = ({:.6}, {:.6})", n[0], n[1]);
            println!("{:>4} {:>22} {:>22}", "", "trace flux", "F(u) n");
            for r in 0..NVAR {
                println!("{r:>4} {:>22.15e} {:>22.15e}", f[r], fe[r]);
            }
            println!("tau{}", if tau.upwinded { " (supersonic inflow)" } else { "" });
            for r in 0..NVAR {
                let row: Vec<String> = (0..NVAR).map(|c| format!("{:>14.6e}", tau.tau[(r, c)])).collect();
                println!("     {}", row.join(" "));
            }
            Ok(0)
        }
    }
}
