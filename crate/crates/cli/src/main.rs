use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let (outcome, stderr) = selfsim_cli::run_args(std::env::args_os());
    print!("{}", outcome.stdout);
    eprint!("{}", stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(outcome.code as u8)
}
