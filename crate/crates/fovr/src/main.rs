use std::process::ExitCode;

fn main() -> ExitCode {
    fovr::cli::run()
}
