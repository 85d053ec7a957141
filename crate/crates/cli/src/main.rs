use std::io;
use std::process::ExitCode;

use clap::Parser;
use delta_inference_cli::args::{Cli, Task};
use delta_inference_cli::{run, run_af, run_clt, CliError};

fn execute(task: &Task) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    match task {
        Task::Infer(config) => run(config, &mut out),
        Task::Af { theta, se, exposure, options, format } => run_af(*theta, *se, *exposure, options, *format, &mut out),
        Task::Clt { config, format } => run_clt(config, *format, &mut out),
    }
}

fn main() -> ExitCode {
    let outcome = Cli::parse().into_task().and_then(|task| execute(&task));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
