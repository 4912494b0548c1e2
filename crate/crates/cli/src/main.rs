use clap::{Parser, Subcommand};
use spinqdd_cli::{compare_runs, output_root, ratio_orders, run_scenario, sweep, validate, Scenario, ValidateOptions};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "spinqdd", version, about = "Spin-resolved quantum drift-diffusion runs and checks")]
struct Cli {
    /// Output root (defaults to $SPINQDD_OUTPUT_ROOT, then ./runs).
    #[arg(long, global = true, env = "SPINQDD_OUTPUT_ROOT")]
    out: Option<PathBuf>,
    /// Disable the rayon pool.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario file.
    Run { file: PathBuf },
    /// Run the verification catalog.
    Validate {
        /// Substring filter on check names.
        #[arg(long)]
        only: Option<String>,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Comma-separated ε levels of the ratio tests.
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        /// Print observed convergence orders instead of running the catalog.
        #[arg(long)]
        ratio: bool,
        /// Flip the Bohm sign (self-test: the Bohm-sensitive checks must fail).
        #[arg(long)]
        mutate_bohm: bool,
        /// Skip the kinetic-fluid comparison.
        #[arg(long)]
        no_kinetic: bool,
    },
    /// Compare the series of two run directories.
    Compare {
        run_a: PathBuf,
        run_b: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "mass,l2_n0,l2_n1,l2_n2,l2_n3")]
        cols: Vec<String>,
    },
    /// Run a scenario for several values of one parameter.
    Sweep {
        file: PathBuf,
        /// One of eps, alpha, tau, dt, t_end.
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        values: Vec<f64>,
    },
    /// Print the JSON schema of scenario files.
    Schema,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    spinqdd::par::set_sequential(cli.sequential);
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let root = output_root(cli.out.as_deref());
    match cli.cmd {
        Cmd::Run { file } => {
            let s = Scenario::load(&file)?;
            let summary = run_scenario(&s, &root)?;
            println!("{} rows written to {}", summary.rows.len(), summary.dir.display());
        }
        Cmd::Validate { only, report, eps, ratio, mutate_bohm, no_kinetic } => {
            if ratio {
                let levels = eps.unwrap_or_else(|| spinqdd::tolerances::EPS_LEVELS.to_vec());
                print!("{}", ratio_orders(&levels)?);
                return Ok(ExitCode::SUCCESS);
            }
            let (reports, table, ok) = validate(&ValidateOptions { only, eps, mutate_bohm, skip_kinetic: no_kinetic });
            print!("{table}");
            if let Some(path) = report {
                std::fs::write(&path, serde_json::to_string_pretty(&reports)? + "\n")?;
            }
            return Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE });
        }
        Cmd::Compare { run_a, run_b, cols } => {
            print!("{}", compare_runs(&run_a, &run_b, &cols)?.render());
        }
        Cmd::Sweep { file, param, values } => {
            let s = Scenario::load(&file)?;
            for p in sweep(&s, &param, &values, &root)? {
                println!("{param} = {}: mass {:.12e}, l2_n3 {:.6e} ({})", p.value, p.last.mass, p.last.l2_n3, p.dir);
            }
        }
        Cmd::Schema => println!("{}", serde_json::to_string_pretty(&spinqdd_cli::scenario::schema())?),
    }
    Ok(ExitCode::SUCCESS)
}
