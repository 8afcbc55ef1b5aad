use std::process::ExitCode;

fn main() -> ExitCode {
    qel::cli::main_with_args(std::env::args_os())
}
