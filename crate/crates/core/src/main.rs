use std::process::ExitCode;

use transfer_spectra::report::cli::{parse_args, run};

fn main() -> ExitCode {
    match parse_args(std::env::args_os()) {
        Ok(cli) => ExitCode::from(run(&cli).code()),
        Err(status) => ExitCode::from(status.code()),
    }
}
