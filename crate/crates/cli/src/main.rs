use std::process::ExitCode;

fn main() -> ExitCode {
    hqview_cli::main_with_args(std::env::args_os())
}
