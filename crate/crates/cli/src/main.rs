//! `thermohygro`: runs virtual experiments from a TOML run configuration.

mod config;
mod error;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use crate::error::CliError;
use crate::run::Command;

const AFTER_HELP: &str = "\
Any other `--key value` (or `--key=value`) pair overrides a config entry.
Keys are `block.key` or the bare key when it is unique; `--T`, `--p` and
`--X` stand for ambient.t_k, ambient.p_pa and ambient.x. List values are
comma separated. Giving one humidity representation drops the others in
its block.

Exit codes:
  0  success
  2  config error (unreadable or malformed file, missing block, bad value)
  3  unknown config key
  4  experiment error (solver, property or target failure)

The output directory defaults to [output].dir, then $THERMOHYGRO_OUT, then ./out.";

#[derive(Debug, Parser)]
#[command(name = "thermohygro", version, about = "Dual-chamber humidity sensor virtual experiments", after_help = AFTER_HELP)]
struct Cli {
    command: Command,
    /// Run configuration (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads for curve and sweep points.
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

const OWN_FLAGS: [&str; 3] = ["--config", "--jobs", "--out"];

/// Separates config overrides from the arguments clap understands.
fn split_args(args: Vec<String>) -> Result<(Vec<String>, Vec<(String, String)>), CliError> {
    let mut own = Vec::new();
    let mut overrides = Vec::new();
    let mut it = args.into_iter();
    if let Some(bin) = it.next() {
        own.push(bin);
    }
    while let Some(arg) = it.next() {
        let Some(body) = arg.strip_prefix("--") else {
            own.push(arg);
            continue;
        };
        let (name, inline) = match body.split_once('=') {
            Some((n, v)) => (n.to_string(), Some(v.to_string())),
            None => (body.to_string(), None),
        };
        if name.is_empty()
            || OWN_FLAGS.contains(&arg.split('=').next().unwrap_or(""))
            || ["help", "version"].contains(&name.as_str())
        {
            own.push(arg);
            continue;
        }
        let value = match inline {
            Some(v) => v,
            None => it
                .next()
                .ok_or_else(|| CliError::Config(format!("override --{name} needs a value")))?,
        };
        overrides.push((name, value));
    }
    Ok((own, overrides))
}

fn manifest(
    cli: &Cli,
    overrides: &[(String, String)],
    cfg: &config::RunConfig,
    resolved: &str,
) -> String {
    let mut m = format!("thermohygro {}\n", env!("CARGO_PKG_VERSION"));
    m += &format!("command = {:?}\n", cli.command);
    m += &format!(
        "config = {}\n",
        cli.config
            .as_deref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "-".into())
    );
    let ovr: Vec<String> = overrides
        .iter()
        .map(|(k, v)| format!("--{k} {v}"))
        .collect();
    m += &format!("overrides = {}\n", ovr.join(" "));
    m += &format!(
        "jobs = {}\n",
        cli.jobs
            .map(|j| j.to_string())
            .unwrap_or_else(|| "default".into())
    );
    m += &format!("generated = {}\n", chrono::Utc::now().to_rfc3339());
    m += "\n# configuration after overrides\n";
    m += &cfg.to_toml();
    m += "\n# resolved model\n";
    m += resolved;
    m
}

fn write_outputs(dir: &Path, files: &[(String, String)], manifest: &str) -> Result<(), CliError> {
    let io =
        |e: std::io::Error| CliError::Config(format!("output directory {}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    for (name, body) in files {
        std::fs::write(dir.join(name), body).map_err(io)?;
    }
    std::fs::write(dir.join("manifest.txt"), manifest).map_err(io)
}

fn real_main() -> Result<(), CliError> {
    let (own, overrides) = split_args(std::env::args().collect())?;
    let cli = match Cli::try_parse_from(own) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if cli.command != Command::Props && cli.config.is_none() {
        return Err(CliError::Config(format!(
            "{:?} needs --config",
            cli.command
        )));
    }
    let cfg = config::load(cli.config.as_deref(), &overrides)?;
    let out_dir = cfg.output_dir(cli.out.as_deref());

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        pool = pool.num_threads(j);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let report = pool.install(|| run::execute(cli.command, &cfg))?;

    write_outputs(
        &out_dir,
        &report.files,
        &manifest(&cli, &overrides, &cfg, &report.resolved),
    )?;
    print!("{}", report.stdout);
    for (name, _) in &report.files {
        println!("wrote {}", out_dir.join(name).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("thermohygro: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
