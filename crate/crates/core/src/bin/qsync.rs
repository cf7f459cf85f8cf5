use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qsync::analytic::{analyze, QuadratureSpec};
use qsync::experiments::{self, SweepAxis, SweepSpec, ValidationSpec};
use qsync::{run_campaign, CampaignSpec, Error, Scenario, SystemConfig};

#[derive(Parser)]
#[command(name = "qsync", version, about = "Clock-synchronization link: analytic model and Monte Carlo")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (`key = value` lines); defaults apply to absent keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for CSV output; summaries go to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Copy)]
struct Run {
    /// Trials per campaign; `sweep` accepts 0 for the analytic model only.
    #[arg(long, default_value_t = 2000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    parallelism: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form predictions.
    Analytic {
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo campaign.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        run: Run,
    },
    /// Analytic + Monte Carlo over one parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        run: Run,
        /// w_z, sigma_p, N_ar_side or mu_bg.
        #[arg(long)]
        param: String,
        /// `start:step:stop` or a comma list, units allowed.
        #[arg(long)]
        values: String,
        /// Repeat a w_z sweep for each of these sigma_p values.
        #[arg(long)]
        sigma_p: Option<String>,
    },
    /// Oracle checks; exit code 3 when any fails.
    Validate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 2000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        parallelism: usize,
    },
}

enum Failure {
    Usage(String),
    Run(Error),
    Validation,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Run(e.into())
    }
}

fn load_config(path: Option<&Path>) -> Result<SystemConfig, Failure> {
    let Some(path) = path else {
        return Ok(SystemConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    SystemConfig::parse(&text).map_err(|e| Failure::Run(e.into()))
}

/// Writes to `dir/name`, or to stdout under a `# name` banner.
fn emit(dir: Option<&Path>, name: &str, write: impl FnOnce(&mut dyn Write) -> qsync::Result<()>) -> Result<(), Failure> {
    match dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let mut file = BufWriter::new(File::create(dir.join(name))?);
            write(&mut file)?;
            file.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            writeln!(lock, "# {name}")?;
            write(&mut lock)?;
        }
    }
    Ok(())
}

fn check_run(run: &Run) -> Result<(), Failure> {
    if run.trials == 0 {
        return Err(Failure::Usage("--trials must be at least 1".into()));
    }
    if run.parallelism == 0 {
        return Err(Failure::Usage("--parallelism must be at least 1".into()));
    }
    Ok(())
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Analytic { common } => {
            let scn = Scenario::new(load_config(common.config.as_deref())?)?;
            let report = analyze(&scn, &QuadratureSpec::default())?;
            let out = common.out.as_deref();
            if out.is_some() {
                emit(out, "constants.csv", |w| experiments::write_constants_csv(w, &scn.derived))?;
                emit(out, "nsig.csv", |w| experiments::write_pmf_csv(w, &report.nsig.values))?;
                emit(out, "nbg.csv", |w| experiments::write_pmf_csv(w, &report.nbg.values))?;
            }
            emit(out, "analytic_summary.csv", |w| experiments::write_analytic_summary_csv(w, &report))?;
            eprintln!(
                "E[N_sig] = {:.2}, N_t,min = {}, STD(n_ch) = {:.3} ps, outage = {:.4}",
                report.mean_nsig,
                report.n_t_min,
                report.sync.std * 1e12,
                report.outage
            );
        }
        Command::Simulate { common, run } => {
            check_run(&run)?;
            let scn = Scenario::new(load_config(common.config.as_deref())?)?;
            let spec = CampaignSpec {
                trials: run.trials,
                seed: run.seed,
                parallelism: run.parallelism,
            };
            let stats = run_campaign(&scn, &spec)?;
            let out = common.out.as_deref();
            if out.is_some() {
                emit(out, "trials.csv", |w| experiments::write_trials_csv(w, &stats))?;
            }
            emit(out, "summary.csv", |w| experiments::write_campaign_summary_csv(w, &stats))?;
        }
        Command::Sweep {
            common,
            run,
            param,
            values,
            sigma_p,
        } => {
            // zero trials runs the analytic model only
            check_run(&Run { trials: run.trials.max(1), ..run })?;
            let axis: SweepAxis = param.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
            let values = experiments::parse_values(axis, &values).map_err(|e| Failure::Usage(e.to_string()))?;
            let sigma_p_outer = match sigma_p {
                Some(spec) => experiments::parse_values(SweepAxis::SigmaP, &spec)
                    .map_err(|e| Failure::Usage(e.to_string()))?,
                None => Vec::new(),
            };
            let cfg = load_config(common.config.as_deref())?;
            let spec = SweepSpec {
                axis,
                values,
                sigma_p_outer,
                trials: run.trials,
                seed: run.seed,
                parallelism: run.parallelism,
            };
            let rows = experiments::run_sweep(&cfg, &spec, &QuadratureSpec::default());
            let out = common.out.as_deref();
            emit(out, "sweep.csv", |w| experiments::write_sweep_csv(w, &rows))?;
            if axis == SweepAxis::WZ {
                let optima = experiments::waist_optima(&rows);
                emit(out, "waist_optima.csv", |w| experiments::write_waist_optima_csv(w, &optima))?;
            }
        }
        Command::Validate {
            common,
            seed,
            trials,
            parallelism,
        } => {
            if trials == 0 || parallelism == 0 {
                return Err(Failure::Usage("--trials and --parallelism must be at least 1".into()));
            }
            let cfg = load_config(common.config.as_deref())?;
            let spec = ValidationSpec {
                seed,
                campaign_trials: trials,
                parallelism,
                ..ValidationSpec::default()
            };
            let report = experiments::validate(&cfg, &spec)?;
            emit(common.out.as_deref(), "validation.csv", |w| {
                experiments::write_validation_csv(w, &report)
            })?;
            for c in report.checks.iter().filter(|c| !c.passed) {
                eprintln!(
                    "FAIL {}: measured {} vs tolerance {} ({})",
                    c.name, c.measured, c.tolerance, c.detail
                );
            }
            if !report.all_passed() {
                return Err(Failure::Validation);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Validation) => ExitCode::from(3),
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Numerical(_) | Error::ModelValidity(_) => 2,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}
