use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use keyrate_cli::{run, Cli, CliError, Report};

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("KEYRATE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("KEYRATE_THREADS={raw:?} is not a thread count")))?;
    #[cfg(feature = "parallel")]
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot size thread pool: {e}")))?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn emit(cli: &Cli, report: &Report) -> Result<(), CliError> {
    let stdout = std::io::stdout();
    let mut stdout = stdout.lock();
    let io = |source: std::io::Error, path: &str| CliError::Io {
        path: path.to_string(),
        source,
    };
    match (&report.artifact, &cli.globals.out) {
        (Some(artifact), Some(path)) => {
            std::fs::write(path, artifact).map_err(|e| io(e, &path.display().to_string()))?;
            stdout
                .write_all(report.summary.as_bytes())
                .map_err(|e| io(e, "stdout"))?;
        }
        (Some(artifact), None) => {
            stdout
                .write_all(artifact.as_bytes())
                .map_err(|e| io(e, "stdout"))?;
            eprint!("{}", report.summary);
        }
        (None, _) => {
            stdout
                .write_all(report.summary.as_bytes())
                .map_err(|e| io(e, "stdout"))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let result = configure_threads()
        .and_then(|()| run(&cli))
        .and_then(|report| emit(&cli, &report).map(|()| report));
    match result {
        Ok(report) if report.failed => ExitCode::from(1),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
