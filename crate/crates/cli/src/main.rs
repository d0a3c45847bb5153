use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use harnack_cli::{run, Cli};

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("HARNACK_THREADS") else { return Ok(()) };
    let n: usize = raw.trim().parse().map_err(|_| format!("HARNACK_THREADS must be a positive integer, got {raw:?}"))?;
    if n == 0 {
        return Err("HARNACK_THREADS must be a positive integer, got 0".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.stdout.as_bytes());
            let _ = stdout.flush();
            if out.exit == 1 {
                eprintln!("error: bound report is inconsistent");
            }
            ExitCode::from(out.exit as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
