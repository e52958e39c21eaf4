use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let code = center_of_mass::cli::run(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    ExitCode::from(code as u8)
}
