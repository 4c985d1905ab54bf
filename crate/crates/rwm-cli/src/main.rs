mod cli;
mod commands;
mod render;

use clap::Parser;
use rwm_core::Error;

use cli::{Cli, Command};

/// 0 success, 1 data error, 2 usage error (clap handles its own as 2).
fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Query(_) => 2,
        _ => 1,
    }
}

/// A reader closing the pipe early (e.g. `rwm rank ... | head`) is not an
/// error worth reporting.
fn is_broken_pipe(err: &Error) -> bool {
    match err {
        Error::Io(e) => e.kind() == std::io::ErrorKind::BrokenPipe,
        Error::Json(e) => e.io_error_kind() == Some(std::io::ErrorKind::BrokenPipe),
        _ => false,
    }
}

fn dispatch(command: Command) -> rwm_core::Result<()> {
    match command {
        Command::Query(args) => commands::query(args),
        Command::Rank(args) => commands::rank(args),
        Command::Linkpred(args) => commands::linkpred(args),
        Command::Sample(args) => commands::sample(args),
        Command::Gen(args) => commands::gen(args),
        Command::Bench(args) => commands::bench(args),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) =
        rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build_global()
    {
        eprintln!("error: could not size the worker pool: {e}");
        std::process::exit(1);
    }
    if let Err(e) = dispatch(cli.command) {
        if is_broken_pipe(&e) {
            return;
        }
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}
