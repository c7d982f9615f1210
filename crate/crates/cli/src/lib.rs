//! The `ltree` command line.
//!
//! Exit codes: 1 parse error, 2 I/O error, 3 comment or share before any
//! post, 4 Koch iterations out of range, 5 broken or inconsistent log.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ltree_core::eventlog::{self, read_log, verify_log_bytes, LogError, ReplayError, Verification};
use ltree_core::keys::parse_script;
use ltree_core::lsystem::parse_grammar;
use ltree_core::session::SessionError;
use ltree_core::social::{SocialError, DEFAULT_PRUNE_THRESHOLD};
use ltree_core::turtle::{interpret, Action, SymbolActions};
use ltree_core::{emit_svg, koch_quadratic, EventLog, Payload, Session, SocialTree, SvgStyle, TurtleConfig};
use ltree_server::{state_json, ServerConfig};

pub const MAX_KOCH_ITERATIONS: u32 = 8;

#[derive(Debug, Parser)]
#[command(name = "ltree", version, about = "Social data as an L-system tree")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Print only the essential result.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rewrite a grammar file and print the resulting string.
    Rewrite {
        grammar: PathBuf,
        #[arg(long, short = 'n', default_value_t = 1)]
        iterations: u32,
        /// Write the string here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Also render the string as SVG (`-` for stdout).
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Turtle::Tree)]
        turtle: Turtle,
    },
    /// Apply a key script such as `PPFCSLVR` to a fresh tree.
    Simulate {
        script: String,
        #[arg(long, default_value_t = DEFAULT_PRUNE_THRESHOLD)]
        threshold: u64,
        #[arg(long, default_value = eventlog::DEFAULT_OWNER)]
        actor: String,
        #[command(flatten)]
        out: TreeOutput,
        /// Save the resulting event log.
        #[arg(long)]
        log_out: Option<PathBuf>,
    },
    /// Render the quadratic Koch curve.
    Koch {
        n: u32,
        /// Output file; stdout when absent.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Rebuild a tree from its log.
    Replay {
        log: PathBuf,
        #[command(flatten)]
        out: TreeOutput,
    },
    /// Check a log's hash chain.
    Verify { log: PathBuf },
    /// Append a prune event to a log.
    Prune {
        log: PathBuf,
        #[arg(long, default_value_t = DEFAULT_PRUNE_THRESHOLD)]
        threshold: u64,
        #[arg(long, default_value = eventlog::DEFAULT_OWNER)]
        actor: String,
        #[command(flatten)]
        out: TreeOutput,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Event log file; `LTREE_LOG` overrides it.
        #[arg(long)]
        log_path: Option<PathBuf>,
        #[arg(long)]
        snapshot_path: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct TreeOutput {
    /// Render the final tree as SVG (`-` for stdout).
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Print the full state as JSON instead of the status line.
    #[arg(long)]
    pub json: bool,
}

/// Turtle vocabulary used to render a rewritten string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Turtle {
    /// `m` draws, `l`/`r` turn, `k` marks a leaf; other letters are silent.
    Tree,
    /// `F` draws, `f` moves, `+`/`-` turn.
    Koch,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl std::fmt::Display) -> Self {
        Self { code, message: message.to_string() }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Self::new(2, format!("{}: {e}", path.display()))
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

fn from_log(e: LogError) -> CliError {
    match e {
        LogError::Io { .. } => CliError::new(2, e),
        LogError::Broken { .. } => CliError::new(5, e),
    }
}

fn from_replay(e: ReplayError) -> CliError {
    CliError::new(5, e)
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(|e| CliError::new(2, format!("stdout: {e}")))
}

/// Writes `text` to `path`, or to `out` when the path is `-`.
fn write_target(path: &Path, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    if path == Path::new("-") {
        emit(out, text)
    } else {
        std::fs::write(path, text).map_err(|e| CliError::io(path, e))
    }
}

fn require(path: &Path) -> Result<(), CliError> {
    std::fs::metadata(path).map(drop).map_err(|e| CliError::io(path, e))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn report(tree: &SocialTree, svg: String, opts: &TreeOutput, quiet: bool, out: &mut dyn Write) -> Result<(), CliError> {
    if let Some(path) = &opts.svg {
        write_target(path, &svg, out)?;
    }
    if opts.svg.as_deref() == Some(Path::new("-")) {
        return Ok(());
    }
    if opts.json {
        return emit(out, &format!("{}\n", state_json(tree)));
    }
    let mut text = format!("{}\n", tree.status());
    if !quiet {
        for p in tree.posts() {
            let c = p.counters.unwrap_or_default();
            text.push_str(&format!("post {} i:{} s:{} v:{}\n", p.id, c.likes, c.shares, c.views));
        }
    }
    emit(out, &text)
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let style = SvgStyle::default();
    match &cli.command {
        Command::Rewrite { grammar, iterations, output, svg, turtle } => {
            let g = parse_grammar(&read_text(grammar)?)
                .map_err(|e| CliError::new(1, format!("{}: {e}", grammar.display())))?;
            let result = ltree_core::rewrite(&g, g.axiom(), *iterations, cli.seed).map_err(|e| CliError::new(1, e))?;
            if let Some(path) = svg {
                let actions = match turtle {
                    Turtle::Koch => SymbolActions::koch().with_fallback(Action::NoOp),
                    Turtle::Tree => SymbolActions::social("{0} {1} {2}").with_fallback(Action::NoOp),
                };
                let geometry = interpret(&result, &TurtleConfig::default(), &actions).map_err(|e| CliError::new(1, e))?;
                write_target(path, &emit_svg(&geometry, &style), out)?;
            }
            let text = format!("{result}\n");
            match output {
                Some(path) => write_target(path, &text, out),
                None if svg.as_deref() == Some(Path::new("-")) => Ok(()),
                None => emit(out, &text),
            }
        }
        Command::Simulate { script, threshold, actor, out: opts, log_out } => {
            let events = parse_script(script, *threshold).map_err(|e| CliError::new(1, e))?;
            let mut session = Session::in_memory(cli.seed);
            for (i, payload) in events.into_iter().enumerate() {
                match session.apply(actor, payload) {
                    Ok(applied) => {
                        if !cli.quiet && !applied.effect.pruned.is_empty() && opts.svg.is_none() && !opts.json {
                            let ids: Vec<String> = applied.effect.pruned.iter().map(|n| n.to_string()).collect();
                            emit(out, &format!("pruned {}\n", ids.join(" ")))?;
                        }
                    }
                    Err(SessionError::Rejected(SocialError::NoPosts)) => {
                        return Err(CliError::new(3, format!("event {i} ({}): no posts yet", payload.type_name())))
                    }
                    Err(e) => return Err(CliError::new(2, e)),
                }
            }
            if let Some(path) = log_out {
                session.log().write_to(path).map_err(from_log)?;
            }
            report(session.tree(), session.svg(&style), opts, cli.quiet, out)
        }
        Command::Koch { n, svg } => {
            if *n > MAX_KOCH_ITERATIONS {
                return Err(CliError::new(4, format!("koch iterations must be at most {MAX_KOCH_ITERATIONS}, got {n}")));
            }
            let cfg = TurtleConfig { start_heading: 0.0, step_length: 4.0, ..TurtleConfig::default() };
            let geometry = koch_quadratic(*n, &cfg).map_err(|e| CliError::new(1, e))?;
            let text = emit_svg(&geometry, &style);
            match svg {
                Some(path) => write_target(path, &text, out),
                None => emit(out, &text),
            }
        }
        Command::Replay { log, out: opts } => {
            require(log)?;
            let records = read_log(log).map_err(from_log)?;
            let session = Session::new(cli.seed, EventLog::from_records(records).map_err(from_log)?).map_err(from_replay)?;
            report(session.tree(), session.svg(&style), opts, cli.quiet, out)
        }
        Command::Verify { log } => {
            let bytes = std::fs::read(log).map_err(|e| CliError::io(log, e))?;
            match verify_log_bytes(&bytes) {
                Verification::Ok => emit(out, "ok\n"),
                Verification::Broken { seq, violation } => {
                    emit(out, &format!("broken at seq {seq}: {violation}\n"))?;
                    Err(CliError::new(5, format!("chain broken at seq {seq}")))
                }
            }
        }
        Command::Prune { log, threshold, actor, out: opts } => {
            require(log)?;
            let file = EventLog::open(log).map_err(from_log)?;
            let mut session = Session::new(cli.seed, file).map_err(from_replay)?;
            let applied =
                session.apply(actor, Payload::Prune { threshold: *threshold }).map_err(|e| CliError::new(2, e))?;
            if !cli.quiet && opts.svg.is_none() && !opts.json {
                let ids: Vec<String> = applied.effect.pruned.iter().map(|n| n.to_string()).collect();
                emit(out, &format!("pruned [{}]\n", ids.join(", ")))?;
            }
            report(session.tree(), session.svg(&style), opts, cli.quiet, out)
        }
        Command::Serve { port, log_path, snapshot_path } => {
            let config = ServerConfig {
                port: *port,
                seed: cli.seed,
                log_path: log_path.clone(),
                snapshot_path: snapshot_path.clone(),
            };
            ltree_server::run(config).map_err(|e| match e {
                ltree_server::ServeError::Log(e) => from_log(e),
                ltree_server::ServeError::Replay(e) => from_replay(e),
                other => CliError::new(2, other),
            })
        }
    }
}
