//! Command-line front end: `simulate`, `spectrum`, `revivals`, `ion` and
//! `figure`.
//!
//! Exit codes: 0 success, 1 run failure, 2 invalid config, 3 truncation
//! insufficient.

pub mod config;
pub mod output;
pub mod presets;
pub mod run;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use config::{ConfigError, Format, ModelKind, Origin, ScenarioConfig};
pub use output::{Manifest, Table};
pub use run::{
    run_ion, run_revivals, run_scenario, run_spectrum, CliError, RunOutput, EXIT_CONFIG, EXIT_FAILURE, EXIT_OK,
    EXIT_TRUNCATION,
};

#[derive(Debug, Parser)]
#[command(
    name = "fockbloch",
    version,
    about = "Quantum revivals and Fock-space Bloch oscillations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Propagate the vacuum and write p_n(t), survival, mean_n, norm_leak.
    Simulate(ScenarioArgs),
    /// Truncated spectra at several cutoffs with a convergence verdict.
    Spectrum(ScenarioArgs),
    /// Detect survival revivals and compare with the predicted period.
    Revivals(ScenarioArgs),
    /// Map a Raman-driven ion onto the driven oscillator and simulate it.
    Ion(ScenarioArgs),
    /// Figure presets: 1, 2a, 2b, 3a-3d, or the groups 2, 3, all.
    Figure(FigureArgs),
}

/// Every config key is also a flag; flags override the config file.
#[derive(Debug, Args)]
struct ScenarioArgs {
    /// Flat `key = value` config file.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// parametric, driven or chain.
    #[arg(long)]
    model: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    g_abs: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    g_phase: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eps_abs: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eps_phase: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long)]
    two_sided: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t_max: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    /// Comma-separated indices.
    #[arg(long, short, allow_hyphen_values = true)]
    n: Option<String>,
    #[arg(long)]
    rel_tol: Option<String>,
    #[arg(long)]
    abs_tol: Option<String>,
    #[arg(long)]
    leak_tol: Option<String>,
    #[arg(long)]
    max_cutoff: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Output file; the manifest goes next to it. Default: stdout/stderr.
    #[arg(long, short)]
    output: Option<String>,
    /// Comma-separated cutoffs for `spectrum`.
    #[arg(long)]
    cutoffs: Option<String>,
    /// Number of lowest levels for `spectrum`.
    #[arg(long)]
    levels: Option<String>,
    /// Revival detection threshold in (0.5, 1).
    #[arg(long)]
    threshold: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    omega1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    omega2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    e1_abs: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    e1_phase: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    e2_abs: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    e2_phase: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<String>,
}

impl ScenarioArgs {
    fn overrides(&self) -> [(&'static str, &Option<String>); 28] {
        [
            ("model", &self.model),
            ("g_abs", &self.g_abs),
            ("g_phase", &self.g_phase),
            ("eps_abs", &self.eps_abs),
            ("eps_phase", &self.eps_phase),
            ("beta", &self.beta),
            ("two_sided", &self.two_sided),
            ("delta", &self.delta),
            ("t_max", &self.t_max),
            ("samples", &self.samples),
            ("n", &self.n),
            ("rel_tol", &self.rel_tol),
            ("abs_tol", &self.abs_tol),
            ("leak_tol", &self.leak_tol),
            ("max_cutoff", &self.max_cutoff),
            ("format", &self.format),
            ("output", &self.output),
            ("cutoffs", &self.cutoffs),
            ("levels", &self.levels),
            ("threshold", &self.threshold),
            ("omega1", &self.omega1),
            ("omega2", &self.omega2),
            ("nu", &self.nu),
            ("e1_abs", &self.e1_abs),
            ("e1_phase", &self.e1_phase),
            ("e2_abs", &self.e2_abs),
            ("e2_phase", &self.e2_phase),
            ("kappa", &self.kappa),
        ]
    }

    /// Defaults, then environment, then config file, then flags.
    fn resolve(&self) -> Result<ScenarioConfig, CliError> {
        let mut cfg = ScenarioConfig::from_env()?;
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
                origin: Origin::Line {
                    source: path.display().to_string(),
                    line: 0,
                },
                field: "config".into(),
                message: format!("cannot read: {e}"),
            })?;
            cfg.apply_text(&text, &path.display().to_string())?;
        }
        for (key, value) in self.overrides() {
            if let Some(v) = value {
                cfg.set(key, v.trim(), Origin::Flag(key.replace('_', "-")))?;
            }
        }
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct FigureArgs {
    /// 1, 2a, 2b, 3a, 3b, 3c, 3d, 2, 3 or all.
    which: String,
    /// Directory for `figure<id>.<ext>` and their manifests.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
}

type RunFn = fn(&ScenarioConfig) -> Result<RunOutput, CliError>;

fn report(out: &RunOutput) {
    for m in &out.messages {
        eprintln!("{m}");
    }
}

fn finish(cfg: &ScenarioConfig, result: Result<RunOutput, CliError>) -> i32 {
    match result.and_then(|out| {
        report(&out);
        output::emit(&out.table, &out.manifest, cfg.format, cfg.output.as_deref())?;
        Ok(())
    }) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs the given figure presets concurrently, one output file each.
pub fn run_figures(
    ids: &[&str],
    base: &ScenarioConfig,
    out_dir: &Path,
    format: Format,
) -> Vec<(String, Result<RunOutput, CliError>)> {
    std::thread::scope(|s| {
        let handles: Vec<_> = ids
            .iter()
            .map(|&id| {
                s.spawn(move || {
                    let mut cfg = presets::figure(id, base).expect("known figure id");
                    cfg.format = format;
                    cfg.output = Some(out_dir.join(format!("figure{id}.{}", format.extension())));
                    let r = run_scenario(&cfg).and_then(|out| {
                        output::emit(&out.table, &out.manifest, cfg.format, cfg.output.as_deref())?;
                        Ok(out)
                    });
                    (id.to_string(), r)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("figure thread panicked"))
            .collect()
    })
}

fn figure_command(args: &FigureArgs) -> i32 {
    let Some(ids) = presets::expand(&args.which) else {
        eprintln!(
            "error: invalid config: flag --which: field `figure`: unknown figure `{}` (expected {}, 2, 3 or all)",
            args.which,
            presets::FIGURES.join(", ")
        );
        return EXIT_CONFIG;
    };
    let mut base = match ScenarioConfig::from_env() {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: invalid config: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Err(e) = base.set("format", &args.format, Origin::Flag("format".into())) {
        eprintln!("error: invalid config: {e}");
        return EXIT_CONFIG;
    }
    let mut code = EXIT_OK;
    for (id, r) in run_figures(&ids, &base, &args.out_dir, base.format) {
        match r {
            Ok(out) => {
                eprintln!(
                    "figure {id}: wrote {} rows (cutoff {})",
                    out.table.rows(),
                    out.manifest.get("cutoff_used").unwrap_or("?")
                );
            }
            Err(e) => {
                eprintln!("figure {id}: error: {e}");
                code = code.max(e.exit_code());
            }
        }
    }
    code
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let (args, run): (&ScenarioArgs, RunFn) = match &cli.command {
        Command::Simulate(a) => (a, run_scenario),
        Command::Spectrum(a) => (a, run_spectrum),
        Command::Revivals(a) => (a, run_revivals),
        Command::Ion(a) => (a, run_ion),
        Command::Figure(f) => return figure_command(f),
    };
    match args.resolve() {
        Ok(cfg) => finish(&cfg, run(&cfg)),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
