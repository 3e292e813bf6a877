use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(satotate_cli::run(std::env::args_os()))
}
