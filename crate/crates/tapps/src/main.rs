//! Command-line entry point: `tapps [script] [--plugins DIR] [--cwd DIR]`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use tapps::plugin::{builtin_registry, discover_plugins};
use tapps::shell;
use tapps::vm::{Environment, Session};

/// A command shell for loading, slicing, and analyzing tabular data.
#[derive(Parser)]
#[command(name = "tapps", version)]
struct Cli {
    /// Script to run in batch mode; omit for an interactive session
    script: Option<PathBuf>,

    /// Directory scanned for plugin folders at startup
    #[arg(long, default_value = "./plugins")]
    plugins: PathBuf,

    /// Initial working directory (defaults to the process directory)
    #[arg(long)]
    cwd: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let starting_cwd = match cli.cwd {
        Some(dir) => dir,
        None => match std::env::current_dir() {
            Ok(dir) => dir,
            Err(e) => {
                eprintln!("Error: cannot determine the working directory: {e}");
                return ExitCode::from(2);
            }
        },
    };
    if !starting_cwd.is_dir() {
        eprintln!("Error: no such directory: {}", starting_cwd.display());
        return ExitCode::from(2);
    }

    let registry = builtin_registry();
    let discovery = discover_plugins(&cli.plugins, &registry);
    let mut session = Session::new(discovery);
    let mut env = Environment::new(starting_cwd);

    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut errw = stderr.lock();

    let code = match cli.script {
        Some(script) => shell::run_script(&script, &mut out, &mut errw, &mut session, &mut env),
        None => {
            let stdin = std::io::stdin();
            let mut input = stdin.lock();
            shell::repl(&mut input, &mut out, &mut errw, &mut session, &mut env)
        }
    };
    ExitCode::from(code as u8)
}
