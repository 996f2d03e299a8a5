use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use randci_cli::{deliver, execute, output_args, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let out = execute(&cli.command)?;
    let mut stdout = std::io::stdout().lock();
    match deliver(&out, output_args(&cli.command))? {
        Some(path) => {
            eprintln!("wrote {}", path.display());
            // the document went to a file, so the summary gets stdout
            if let Some(s) = &out.summary {
                stdout.write_all(s.as_bytes())?;
            }
        }
        None => {
            stdout.write_all(out.body.as_bytes())?;
            if let Some(s) = &out.summary {
                eprint!("{s}");
            }
        }
    }
    Ok(())
}
