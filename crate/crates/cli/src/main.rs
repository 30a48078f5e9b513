use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(ranklab_cli::run(std::env::args_os()))
}
