use std::io::Write;
use std::process::ExitCode;

use tracy_cli::{run_styled, Style};

fn main() -> ExitCode {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = run_styled(std::env::args_os(), &mut out, &mut err, Style::detect());
    let _ = out.flush();
    ExitCode::from(code as u8)
}
