use std::process::ExitCode;

fn main() -> ExitCode {
    dcmi::cli::run(std::env::args_os())
}
