use std::process::ExitCode;

fn main() -> ExitCode {
    prymlab::cli::run()
}
