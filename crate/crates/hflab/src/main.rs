use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hflab::budget::Budget;
use hflab::session::{
    parse_format, parse_theta_mode, parse_universe, run_command, run_script, Session, Status,
};

#[derive(Parser)]
#[command(name = "hflab", about = "hereditarily finite set and category laboratory", version)]
struct Cli {
    /// Default universe: HF or V<n>
    #[arg(long, global = true)]
    universe: Option<String>,
    /// Default theta mode: scott or choice
    #[arg(long, global = true)]
    theta: Option<String>,
    /// Default ceiling for class-level searches
    #[arg(long = "max-k", global = true)]
    max_k: Option<u32>,
    /// Cap on enumeration and product sizes
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Default output format: text or doc
    #[arg(long, global = true)]
    format: Option<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a command script; relative file arguments resolve against the
    /// script's directory
    Run { script: PathBuf },
    /// Run a single command given as arguments
    Eval { command: Vec<String> },
    /// Read commands from stdin, one per line
    Repl,
}

fn build_session(cli: &Cli, base_dir: PathBuf) -> Result<Session, String> {
    let mut session = Session::new(base_dir);
    if let Some(u) = &cli.universe {
        session.universe = parse_universe(u).map_err(|e| e.to_string())?;
    }
    if let Some(t) = &cli.theta {
        session.theta = parse_theta_mode(t).map_err(|e| e.to_string())?;
    }
    if let Some(k) = cli.max_k {
        session.max_k = k;
    }
    if let Some(b) = cli.budget {
        session.budget = Budget::with_cap(b);
    }
    if let Some(f) = &cli.format {
        session.format = parse_format(f).map_err(|e| e.to_string())?;
    }
    Ok(session)
}

/// Writes to stdout, flushing as it goes. A closed downstream (broken pipe)
/// means nobody is reading anymore; report it as "stop emitting" rather
/// than panicking like the print macros do.
fn emit(text: &str) -> bool {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Ok(()) => true,
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => false,
        Err(e) => {
            eprintln!("error: stdout: {}", e);
            false
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cwd = std::env::current_dir().unwrap_or_else(|_| PathBuf::from("."));
    let base_dir = match &cli.cmd {
        Cmd::Run { script } => script.parent().map(|p| cwd.join(p)).unwrap_or(cwd.clone()),
        _ => cwd,
    };
    let mut session = match build_session(&cli, base_dir) {
        Ok(s) => s,
        Err(msg) => {
            eprintln!("error: {}", msg);
            return ExitCode::from(Status::Usage.code() as u8);
        }
    };

    let status = match &cli.cmd {
        Cmd::Run { script } => {
            let text = match std::fs::read_to_string(script) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {}", script.display(), e);
                    return ExitCode::from(Status::Usage.code() as u8);
                }
            };
            let (out, status) = run_script(&text, &mut session);
            emit(&out);
            status
        }
        Cmd::Eval { command } => {
            let line = command.join(" ");
            let outcome = run_command(&line, &mut session);
            if !outcome.text.is_empty() {
                emit(&format!("{}\n", outcome.text));
            }
            outcome.status
        }
        Cmd::Repl => {
            let stdin = std::io::stdin();
            let mut status = Status::Ok;
            for line in stdin.lock().lines() {
                let Ok(line) = line else { break };
                let outcome = run_command(&line, &mut session);
                status = status.max(outcome.status);
                if !outcome.text.is_empty() && !emit(&format!("{}\n", outcome.text)) {
                    break;
                }
            }
            status
        }
    };
    ExitCode::from(status.code() as u8)
}
