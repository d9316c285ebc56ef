use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = dps_cli::Cli::parse();
    let code = dps_cli::run(cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    ExitCode::from(code as u8)
}
