use std::process::ExitCode;

fn main() -> ExitCode {
    zero_attractor::cli::run(std::env::args_os())
}
