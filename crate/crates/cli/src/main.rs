use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(community_detect::cli::run(std::env::args_os()) as u8)
}
