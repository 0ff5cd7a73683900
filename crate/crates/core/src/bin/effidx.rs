use std::process::ExitCode;

fn main() -> ExitCode {
    effidx::cli::main_with_args(std::env::args_os())
}
