use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(apds_core::cli::run())
}
