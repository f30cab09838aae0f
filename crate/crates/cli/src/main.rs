use std::path::PathBuf;
use std::process::ExitCode;

use hardy_cli::config::CONFIG_ENV;

fn main() -> ExitCode {
    let config = std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
    let code = hardy_cli::run(std::env::args_os(), config);
    ExitCode::from(code as u8)
}
