use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qhalab_cli::{run_convergence, run_suite, CliError, RunConfig, Study, Suite, OUT_DIR_ENV};

#[derive(Parser, Debug)]
#[command(name = "qhalab", version, about = "Identity suites and convergence studies for quantum harmonic analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run an identity suite: core, conv, groups, wiener, bergman or all.
    Suite {
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// Write error tables: sot, approx_identity or truncation.
    Converge {
        study: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(clap::Args, Debug)]
struct Common {
    /// TOML configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides the configuration and the environment.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Multiplies every tolerance.
    #[arg(long, default_value_t = 1.0)]
    tol_scale: f64,
}

impl Common {
    fn load(&self) -> Result<(RunConfig, PathBuf), CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        let env = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
        let out = self.out.clone().or(env).unwrap_or_else(|| cfg.output.dir.clone());
        cfg.output.dir = out.clone();
        Ok((cfg, out))
    }
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Suite { name, common } => {
            let suite: Suite = name.parse()?;
            let (cfg, out) = common.load()?;
            let result = run_suite(&cfg, suite, common.tol_scale)?;
            create_dir(&out)?;
            let path = out.join(format!("report-{}.json", suite.name()));
            fs::write(&path, result.report.to_json()? + "\n").map_err(|e| CliError::Io {
                path: path.clone(),
                source: e,
            })?;
            for t in &result.tables {
                t.write(&out)?;
            }
            for r in &result.report.records {
                println!("{}", r.summary());
            }
            let failed = result.report.failures().count();
            println!(
                "suite {}: {} of {} checks passed; report {}",
                suite.name(),
                result.report.records.len() - failed,
                result.report.records.len(),
                path.display()
            );
            for r in result.report.failures() {
                eprintln!("failed {} [{}]{}", r.id, r.anchor, r.note.as_deref().map(|n| format!(": {n}")).unwrap_or_default());
            }
            Ok(result.report.pass)
        }
        Command::Converge { study, common } => {
            let study: Study = study.parse()?;
            let (cfg, out) = common.load()?;
            let tables = run_convergence(&cfg, study)?;
            create_dir(&out)?;
            for t in &tables {
                println!("{}", t.write(&out)?.display());
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.is_usage() => {
            eprintln!("usage error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
