use std::process::ExitCode;

fn main() -> ExitCode {
    detbound::cli::run()
}
