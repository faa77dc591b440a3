use std::io::{IsTerminal, Write};
use std::process;

use clap::Parser;
use tidal_econ_cli::{run, Cli, CliError};

fn color_wanted(cli: &Cli) -> bool {
    let no_color = std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty());
    !no_color && cli.out.is_none() && std::io::stdout().is_terminal()
}

fn main() {
    let cli = Cli::parse();
    let out = match run(&cli, color_wanted(&cli)) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            process::exit(e.exit_code());
        }
    };
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &out.body).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(out.body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        process::exit(e.exit_code());
    }
}
