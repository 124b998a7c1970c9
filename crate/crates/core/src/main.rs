use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use moment_invariants::algebra::Bindings;
use moment_invariants::bench::{self, BenchConfig};
use moment_invariants::corpus::{self, parse_bindings};
use moment_invariants::frontend::{load, ValidatedProgram};
use moment_invariants::invariants::{analyze_with, AnalysisRequest, InvariantReport};
use moment_invariants::validator::{check, CheckConfig};

#[derive(Parser)]
#[command(name = "momentinv", version, about = "Moment invariants of probabilistic loops")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute closed forms for the moments of every program variable.
    Analyze {
        /// Program file, or the name of a bundled corpus program.
        file: String,
        #[command(flatten)]
        req: RequestArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the moment recurrences before solving.
        #[arg(long)]
        debug_recurrences: bool,
    },
    /// Analyze, then confirm the closed forms by enumeration or simulation.
    Check {
        file: String,
        #[command(flatten)]
        req: RequestArgs,
        /// Parameter binding `name=value` with a rational value.
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        #[arg(long, default_value_t = 100_000)]
        runs: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Last iteration checked by exact enumeration.
        #[arg(long, default_value_t = 8)]
        n_max: u64,
        /// Iterations sampled by Monte Carlo.
        #[arg(long, value_delimiter = ',', default_values_t = [1u64, 2, 5, 10, 25, 50])]
        checkpoints: Vec<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the bundled corpus against the golden files.
    Bench {
        /// Only programs whose name contains this text.
        #[arg(long)]
        filter: Option<String>,
        /// Rewrite golden files for programs that pass validation.
        #[arg(long)]
        update_golden: bool,
        #[arg(long)]
        golden_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        runs: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

#[derive(Args)]
struct RequestArgs {
    /// Highest raw moment order.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    moments: u32,
    /// Also report central moments up to the same order.
    #[arg(long)]
    central: bool,
    /// Also report the variance.
    #[arg(long = "var")]
    variance: bool,
    /// Covariance of two variables, `x,y`; may repeat.
    #[arg(long = "cov", value_name = "X,Y")]
    covariances: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

struct Failure {
    code: u8,
    message: String,
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

impl RequestArgs {
    fn request(&self) -> Result<AnalysisRequest, Failure> {
        let mut covariances = Vec::new();
        for pair in &self.covariances {
            let (a, b) = pair
                .split_once(',')
                .ok_or_else(|| input_error(format!("--cov expects `x,y`, got `{pair}`")))?;
            covariances.push((a.trim().to_string(), b.trim().to_string()));
        }
        Ok(AnalysisRequest {
            k: self.moments,
            central: self.central,
            variance: self.variance,
            covariances,
        })
    }
}

/// Reads a program from disk, falling back to the corpus by name.
fn read_program(file: &str) -> Result<(String, ValidatedProgram, Bindings), Failure> {
    let path = Path::new(file);
    let (name, text, bindings) = if path.exists() {
        let text = fs::read_to_string(path).map_err(|e| input_error(format!("{file}: {e}")))?;
        let name = path.file_stem().map_or(file.to_string(), |s| s.to_string_lossy().into_owned());
        let bundled = corpus::corpus().iter().find(|p| p.source == text);
        (name, text, bundled.map(|p| p.default_bindings()).unwrap_or_default())
    } else if let Some(p) = corpus::find(file) {
        (p.name.to_string(), p.source.to_string(), p.default_bindings())
    } else {
        return Err(input_error(format!("{file}: no such file or corpus program")));
    };
    let vp = load(&text).map_err(|e| input_error(format!("{file}: {e}")))?;
    Ok((name, vp, bindings))
}

fn run_analysis(name: &str, vp: &ValidatedProgram, req: &RequestArgs) -> Result<InvariantReport, Failure> {
    analyze_with(vp, name, &req.request()?).map_err(|e| input_error(format!("AnalysisError: {e}")))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| input_error(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze { file, req, format, out, debug_recurrences } => {
            let (name, vp, _) = read_program(&file)?;
            let report = run_analysis(&name, &vp, &req)?;
            if debug_recurrences {
                eprint!("{}", report.system.dump());
            }
            let text = match format {
                Format::Text => report.to_text(),
                Format::Json => report.to_json() + "\n",
            };
            emit(&out, &text)
        }
        Command::Check { file, req, params, runs, seed, n_max, checkpoints, format, out } => {
            let (name, vp, mut bindings) = read_program(&file)?;
            let given = parse_bindings(params.iter().map(|p| {
                p.split_once('=').unwrap_or((p.as_str(), ""))
            }))
            .map_err(input_error)?;
            bindings.extend(given);
            let missing: Vec<&str> = vp
                .params
                .iter()
                .filter(|p| !bindings.contains_key(*p))
                .map(|p| p.name())
                .collect();
            if !missing.is_empty() {
                return Err(input_error(format!("missing --param for {}", missing.join(", "))));
            }
            let report = run_analysis(&name, &vp, &req)?;
            let cfg = CheckConfig {
                checkpoints,
                n_max,
                runs,
                seed,
                ..CheckConfig::default()
            };
            let mc = check(&report, &vp, &bindings, &cfg);
            let text = match format {
                Format::Text => format!("{}\n{}", report.to_text(), mc.to_text()),
                Format::Json => {
                    let value = serde_json::json!({
                        "invariants": report.to_json_value(),
                        "validation": mc,
                    });
                    serde_json::to_string_pretty(&value).expect("json") + "\n"
                }
            };
            emit(&out, &text)?;
            if mc.pass {
                Ok(())
            } else {
                Err(Failure { code: 1, message: "validation failed".into() })
            }
        }
        Command::Bench { filter, update_golden, golden_dir, runs, seed } => {
            let cfg = BenchConfig {
                filter,
                golden_dir: golden_dir.unwrap_or_else(bench::default_golden_dir),
                update_golden,
                check: CheckConfig { runs, seed, ..CheckConfig::default() },
            };
            let results = bench::run_bench(&cfg);
            print!("{}", bench::format_table(&results));
            for r in results.iter().filter(|r| !r.pass()) {
                if let Some(v) = &r.validation {
                    for row in v.failures() {
                        eprintln!("{}: {} n={} failed (z={:.2})", r.name, row.label, row.n, row.z);
                    }
                }
            }
            if results.is_empty() {
                return Err(input_error("no corpus program matches the filter"));
            }
            if results.iter().all(|r| r.pass()) {
                Ok(())
            } else {
                Err(Failure { code: 1, message: "benchmark failed".into() })
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("MOMENT_INVAR_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
