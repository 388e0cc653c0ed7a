use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

mod args;
mod commands;
mod output;

use args::{Cli, RunConfig};
use output::{write_atomic, CliError};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.code)
        }
    }
}

fn run() -> Result<(), CliError> {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(CliError::invalid(e.to_string().trim_end())),
    };

    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::invalid("--threads must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::invalid(format!("thread pool: {e}")))?;
    }

    let config = match (&cli.config, cli.command) {
        (Some(_), Some(_)) => return Err(CliError::invalid("give either a subcommand or --config, not both")),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let mut c: RunConfig = serde_json::from_str(&text)?;
            // flags on the command line win over the file
            c.nmax = cli.nmax.or(c.nmax);
            c.tol = cli.tol.or(c.tol);
            c.format = cli.format.or(c.format);
            c
        }
        (None, Some(command)) => {
            RunConfig { command, figure: cli.figure, nmax: cli.nmax, tol: cli.tol, format: cli.format }
        }
        (None, None) => return Err(CliError::invalid("missing subcommand (try --help)")),
    };
    if let Some(tol) = config.tol {
        if !(tol > 0.0 && tol <= 1e-4) {
            return Err(CliError::invalid(format!("--tol must lie in (0, 1e-4], got {tol}")));
        }
    }

    let opts = config.truncation();
    let started = std::time::Instant::now();
    let out = match &config.figure {
        Some(id) => {
            let fig = uscsim::presets::preset(id)
                .ok_or_else(|| CliError::invalid(format!("unknown figure `{id}` (see list-figures)")))?;
            commands::run_figure(&config.command, &fig, opts)?
        }
        None => commands::run(&config.command, opts)?,
    };
    log::info!("{} finished in {:.2?}", config.command.name(), started.elapsed());

    let text = out.render(config.format, &serde_json::to_value(&config)?)?;
    match &cli.out {
        Some(path) => write_atomic(path, &text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::io(std::path::Path::new("<stdout>"), e))
        }
    }
}
