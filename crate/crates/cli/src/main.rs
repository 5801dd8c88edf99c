use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zeta_lab::experiment::{load_spec, run_experiment, ExperimentSpec, Kind, RunManifest};
use zeta_lab::validate::validate_suite;
use zeta_lab::zeta::EvalConfig;
use zeta_lab::Error;

#[derive(Parser)]
#[command(name = "zeta-lab", version, about = "Datasets and checks for the monotonicity of |zeta| left of the critical line")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the dataset behind one figure (fig1 … fig12).
    Figure {
        /// fig1 … fig12
        name: String,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Scan |zeta(x+yi)| over a grid and record every non-decreasing pair.
    Scan(RunOpts),
    /// Detect the semi-limit spectrum of |S_n(z)|.
    Spectrum(RunOpts),
    /// Search the first height where log|zeta(x+yi)| reaches each level s.
    Crossing(RunOpts),
    /// Run an experiment described by a JSON spec file.
    Run {
        spec: PathBuf,
    },
    /// Run the acceptance criteria and print one line per criterion.
    Validate {
        /// Run only these criteria (repeatable).
        #[arg(long = "only")]
        only: Vec<u8>,
        #[arg(long)]
        workers: Option<usize>,
        /// Directory for the determinism check's scratch outputs.
        #[arg(long)]
        scratch: Option<PathBuf>,
        /// Evaluator settings; out-of-contract values are accepted here so
        /// degraded configurations can be exercised.
        #[command(flatten)]
        eval: EvalOpts,
    },
}

#[derive(Args, Clone, Default)]
struct EvalOpts {
    #[arg(long)]
    em_height_cutoff: Option<f64>,
    #[arg(long)]
    em_terms_factor: Option<f64>,
    #[arg(long)]
    target_rel_err: Option<f64>,
}

impl EvalOpts {
    fn config(&self) -> EvalConfig {
        let d = EvalConfig::default();
        EvalConfig {
            em_height_cutoff: self.em_height_cutoff.unwrap_or(d.em_height_cutoff),
            em_terms_factor: self.em_terms_factor.unwrap_or(d.em_terms_factor),
            target_rel_err: self.target_rel_err.unwrap_or(d.target_rel_err),
        }
    }
}

#[derive(Args, Clone, Default)]
struct RunOpts {
    /// Output directory (default: out/<kind>).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    y_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    y_max: Option<f64>,
    #[arg(long)]
    y_step: Option<f64>,
    /// Comma-separated t values; x = 0.5(1 - e^-t).
    #[arg(long, value_delimiter = ',')]
    t: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    a: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x_set: Option<Vec<f64>>,
    /// Height of the point for fig6, fig7 and spectrum.
    #[arg(long)]
    height: Option<f64>,
    /// Levels of log|zeta| for crossing.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    s: Option<Vec<f64>>,
    /// Real part for crossing and fig12.
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Height cap for fig12 and crossing; evaluation cap for every other kind.
    #[arg(long)]
    cap: Option<f64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Write gzip-compressed CSVs.
    #[arg(long)]
    gzip: bool,
    #[command(flatten)]
    eval: EvalOpts,
}

impl RunOpts {
    fn spec(self, kind: Kind) -> Result<ExperimentSpec, Error> {
        let mut spec = ExperimentSpec::new(kind, self.out.unwrap_or_else(|| PathBuf::from("out").join(kind.name())));
        let p = &mut spec.params;
        p.y_min = self.y_min;
        p.y_max = self.y_max;
        p.y_step = self.y_step;
        p.t = self.t;
        p.alpha = self.alpha;
        p.a = self.a;
        p.x_set = self.x_set;
        p.height = self.height;
        p.s = self.s;
        p.x = self.x;
        p.tolerance = self.tolerance;
        if let Some(cap) = self.cap {
            if matches!(kind, Kind::Fig12 | Kind::Crossing) {
                p.height_cap = Some(cap);
            } else if cap >= 1.0 && cap.is_finite() {
                p.eval_cap = Some(cap as u64);
            } else {
                return Err(Error::InvalidSpec(format!("--cap {cap} must be at least 1")));
            }
        }
        spec.workers = self.workers;
        spec.gzip = self.gzip;
        spec.eval = self.eval.config();
        Ok(spec)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidSpec(_) | Error::Domain(_) | Error::NonFinite(_) | Error::HeightOverflow { .. } => 2,
        Error::Io { .. } => 3,
        _ => 1,
    }
}

fn report(manifest: &RunManifest) {
    for o in &manifest.outputs {
        println!("{}  {} rows  sha256 {}", o.file, o.rows, o.sha256);
    }
    println!(
        "{} evaluations{}{}",
        manifest.evaluations,
        if manifest.truncated { "; TRUNCATED by the evaluation cap" } else { "" },
        manifest.desk_scale.as_deref().map(|d| format!("; desk scale: {d}")).unwrap_or_default()
    );
    println!("manifest: {}", manifest.spec.out.join("manifest.json").display());
}

fn run(spec: ExperimentSpec) -> ExitCode {
    match run_experiment(&spec) {
        Ok(m) => {
            report(&m);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, opts) = match cli.command {
        Command::Figure { name, opts } => match name.parse::<Kind>() {
            Ok(k) if k.name().starts_with("fig") => (k, opts),
            _ => {
                eprintln!("error: unknown figure {name:?}; expected fig1 … fig12");
                return ExitCode::from(2);
            }
        },
        Command::Scan(o) => (Kind::Scan, o),
        Command::Spectrum(o) => (Kind::Spectrum, o),
        Command::Crossing(o) => (Kind::Crossing, o),
        Command::Run { spec } => {
            return match load_spec(&spec) {
                Ok(s) => run(s),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(exit_code(&e))
                }
            }
        }
        Command::Validate {
            only,
            workers,
            scratch,
            eval,
        } => {
            let scratch = scratch.unwrap_or_else(|| std::env::temp_dir().join(format!("zeta-lab-validate-{}", std::process::id())));
            let suite = validate_suite(&eval.config(), workers, &scratch, &only, |r| println!("{r}"));
            let failed = suite.criteria.iter().filter(|c| !c.passed).count();
            println!("{} of {} criteria passed", suite.criteria.len() - failed, suite.criteria.len());
            return if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    match opts.spec(kind) {
        Ok(spec) => run(spec),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
