use clap::{Parser, Subcommand};
use horizon_flow::scenarios::config::SchemeKind;
use horizon_flow::scenarios::detect::{detect_asymptote, Tolerances};
use horizon_flow::scenarios::runner::{execute, RunOptions};
use horizon_flow::scenarios::{catalog, find, Scenario};
use horizon_flow::{verify, Error, Exec};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "horizon-flow", version, about = "Relativistic Burgers and Euler flows outside a black hole")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a built-in scenario or a scenario file (TOML or JSON).
    Run {
        scenario: String,
        /// Output directory [default: $OUT_DIR or ./out]
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        cells: Option<usize>,
        #[arg(long)]
        tmax: Option<f64>,
        /// fv1, fv2, glimm or euler_fv
        #[arg(long)]
        scheme: Option<String>,
        /// Run per-cell loops on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// List the built-in scenarios.
    List,
    /// Run the acceptance checks and print a pass/fail table.
    Verify {
        /// Only these criteria (1-12).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

fn resolve(name: &str) -> Result<Scenario, Error> {
    if let Some(s) = find(name) {
        return Ok(s);
    }
    let path = Path::new(name);
    if path.is_file() {
        return Scenario::load(path);
    }
    Err(Error::Usage(format!("unknown scenario {name:?}; see `horizon-flow list`")))
}

fn run_command(
    scenario: &str,
    out: Option<PathBuf>,
    cells: Option<usize>,
    tmax: Option<f64>,
    scheme: Option<String>,
    sequential: bool,
) -> Result<(), Error> {
    let mut s = resolve(scenario)?;
    if let Some(j) = cells {
        s.grid.cells = j;
    }
    if let Some(t) = tmax {
        s.stop.t_final = t;
        s.output.every = s.output.every.min(t);
    }
    if let Some(k) = scheme {
        s.scheme = SchemeKind::parse(&k)?;
    }
    s.validate()?;
    let out_dir = out.or_else(|| std::env::var_os("OUT_DIR").map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("out"));
    let opts = RunOptions { exec: if sequential { Exec::Sequential } else { Exec::default() }, out_dir: Some(out_dir) };
    let report = execute(&s, &opts)?;
    let params = s.euler_params().ok();
    let fit = detect_asymptote(&report.outcome.snapshots, s.model, params.as_ref(), &Tolerances::default())?;
    println!("{}: {} steps to t = {}", s.name, report.outcome.steps, report.outcome.final_state.t);
    println!("terminal regime: {:?}", fit.regime);
    if let Some(k) = fit.k {
        println!("fitted K: {k}");
    }
    if let Some(r) = fit.shock_radius {
        println!("shock radius: {r}");
    }
    if let Some(t) = report.steady_since {
        println!("steady since t = {t}");
    }
    if report.glimm_fallbacks > 0 {
        println!("Glimm fallback samples: {}", report.glimm_fallbacks);
    }
    for f in &report.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { scenario, out, cells, tmax, scheme, sequential } => run_command(&scenario, out, cells, tmax, scheme, sequential),
        Command::List => {
            for s in catalog() {
                println!("{:<34} {:<8} {:<9} {}", s.name, format!("{:?}", s.model).to_lowercase(), s.scheme.name(), s.description);
            }
            Ok(())
        }
        Command::Verify { only } => {
            let mut all_pass = true;
            for c in &verify::CRITERIA {
                if !only.is_empty() && !only.contains(&c.id) {
                    continue;
                }
                let outcome = (c.check)();
                all_pass &= outcome.passed;
                println!("{}", outcome.line(c));
            }
            return if all_pass { ExitCode::SUCCESS } else { ExitCode::FAILURE };
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Usage(_)) | Err(e @ Error::Config { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
