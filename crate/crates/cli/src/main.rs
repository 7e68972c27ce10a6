use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use torus_blowup_cli::{configure_jobs, run, Cli, EXIT_FAILURE, EXIT_USAGE};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("TORUS_BLOWUP_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    configure_jobs(cli.opts.jobs);
    let out = match run(&cli) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("torus-blowup: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let written = match &cli.opts.out {
        Some(path) => std::fs::write(path, &out.bytes),
        None => std::io::stdout().lock().write_all(&out.bytes),
    };
    if let Err(e) = written {
        eprintln!("torus-blowup: cannot write output: {e}");
        return ExitCode::from(EXIT_FAILURE as u8);
    }
    ExitCode::from(out.exit_code as u8)
}
