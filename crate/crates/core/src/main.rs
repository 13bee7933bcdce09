use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::init();
    fracdim::cli::main_entry()
}
