//! Command-line front end.
//!
//! Exit codes: 0 success (including an `unknown` comparison), 1 distinct or
//! a failed fuzz run, 2 usage or parse errors, 3 failed preconditions.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::bracket::{bracket, bracket_equal, BracketError, Verdict};
use crate::diagram::{parse_diagram, Basepoint, Diagram, DiagramError, DiagramKind};
use crate::invariant::{fingerprint, link_invariant, link_word, word_invariant, zero_basepoints, InvariantError};
use crate::moves::{apply_move, parse_log, random_walk, MoveError, WalkOptions, WalkTrace};
use crate::words::{slide_orbit, Letter};

#[derive(Debug, Parser)]
#[command(name = "freelink", version, about = "Invariants of enumerated free links and tangles")]
struct Cli {
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a diagram file and summarize it.
    Validate { file: PathBuf },
    /// Print the word of a pair of components.
    Invariant(InvariantArgs),
    /// Print the bracket of a diagram.
    Bracket { file: PathBuf },
    /// Compare two diagrams by their invariants.
    Compare(CompareArgs),
    /// Random walk of moves, checking invariants after every step.
    Fuzz(FuzzArgs),
    /// Print one conjugacy representative per slide mask.
    Orbit(OrbitArgs),
    /// Apply a move log to a diagram and print the result.
    Replay { file: PathBuf, trace: PathBuf },
}

#[derive(Debug, Args)]
struct InvariantArgs {
    file: PathBuf,
    #[arg(long, value_parser = parse_pair, value_name = "I,J")]
    pair: (usize, usize),
    /// Component to read along; defaults to the first of the pair.
    #[arg(long, value_name = "I|J")]
    along: Option<usize>,
    /// Cut points of a link, as `1:o1,2:o2,...`.
    #[arg(long, value_parser = parse_basepoints, value_name = "LIST")]
    basepoints: Option<Basepoints>,
}

#[derive(Clone, Debug)]
struct Basepoints(Vec<Basepoint>);

#[derive(Debug, Args)]
struct CompareArgs {
    left: PathBuf,
    right: PathBuf,
    /// Only compare the words of this pair.
    #[arg(long, value_parser = parse_pair, value_name = "I,J")]
    pair: Option<(usize, usize)>,
    /// Move budget for each search between bracket summands.
    #[arg(long, default_value_t = 3, value_name = "D")]
    depth: usize,
}

#[derive(Debug, Args)]
struct FuzzArgs {
    file: PathBuf,
    #[arg(long, value_name = "N")]
    steps: usize,
    #[arg(long, value_name = "S")]
    seed: u64,
    #[arg(long)]
    forbid_pure: bool,
    #[arg(long, default_value_t = 12, value_name = "M")]
    max_size: usize,
}

#[derive(Debug, Args)]
struct OrbitArgs {
    file: PathBuf,
    #[arg(long, value_parser = parse_pair, value_name = "I,J")]
    pair: (usize, usize),
    #[arg(long, value_name = "I|J")]
    along: Option<usize>,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `I,J`, got `{s}`"))?;
    let a = a.trim().parse().map_err(|_| format!("bad component index `{a}`"))?;
    let b = b.trim().parse().map_err(|_| format!("bad component index `{b}`"))?;
    Ok((a, b))
}

fn parse_basepoints(s: &str) -> Result<Basepoints, String> {
    let list = s
        .split(',')
        .map(|item| {
            let (c, o) = item.split_once(':').ok_or_else(|| format!("expected `component:offset`, got `{item}`"))?;
            Ok(Basepoint {
                component: c.trim().parse().map_err(|_| format!("bad component `{c}`"))?,
                offset: o.trim().parse().map_err(|_| format!("bad offset `{o}`"))?,
            })
        })
        .collect::<Result<_, String>>()?;
    Ok(Basepoints(list))
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Precondition(String),
    #[error("{}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Output(#[from] io::Error),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Read { .. } => 2,
            CliError::Precondition(_) => 3,
            CliError::Output(_) => 2,
        }
    }
}

impl From<DiagramError> for CliError {
    fn from(e: DiagramError) -> Self {
        match e {
            DiagramError::Arity { .. } | DiagramError::Invalid(_) => CliError::Precondition(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<InvariantError> for CliError {
    fn from(e: InvariantError) -> Self {
        match e {
            InvariantError::Diagram(d) => d.into(),
            InvariantError::ComponentOutOfRange { .. } | InvariantError::SamePair(_) => CliError::Usage(e.to_string()),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

impl From<MoveError> for CliError {
    fn from(e: MoveError) -> Self {
        match e {
            MoveError::Diagram(d) => d.into(),
            MoveError::Log { .. } | MoveError::Malformed(_) => CliError::Usage(e.to_string()),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

impl From<BracketError> for CliError {
    fn from(e: BracketError) -> Self {
        match e {
            BracketError::Diagram(d) => d.into(),
            BracketError::Move(m) => m.into(),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_owned(), source })
}

fn load(path: &Path) -> Result<Diagram, CliError> {
    parse_diagram(&read(path)?).map_err(|e| match CliError::from(e) {
        CliError::Usage(m) => CliError::Usage(format!("{}: {m}", path.display())),
        CliError::Precondition(m) => CliError::Precondition(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Resolves `--pair` and `--along` into (along, other).
fn reading(pair: (usize, usize), along: Option<usize>) -> Result<(usize, usize), CliError> {
    let (i, j) = pair;
    match along {
        None => Ok((i, j)),
        Some(a) if a == i => Ok((i, j)),
        Some(a) if a == j => Ok((j, i)),
        Some(a) => Err(CliError::Usage(format!("--along {a} is not in the pair ({i},{j})"))),
    }
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let mut buf = Vec::new();
    let result = match cli.jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(cli.command, &mut buf)),
            Err(e) => Err(CliError::Usage(format!("--jobs {n}: {e}"))),
        },
        None => dispatch(cli.command, &mut buf),
    };
    let result = out.write_all(&buf).map_err(CliError::from).and(result);
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Validate { file } => validate(&file, out),
        Command::Invariant(a) => invariant(a, out),
        Command::Bracket { file } => {
            write!(out, "{}", bracket(&load(&file)?)?)?;
            Ok(0)
        }
        Command::Compare(a) => compare(a, out),
        Command::Fuzz(a) => fuzz(a, out),
        Command::Orbit(a) => orbit(a, out),
        Command::Replay { file, trace } => {
            let mut d = load(&file)?;
            for m in parse_log(&read(&trace)?)? {
                d = apply_move(&d, &m)?;
            }
            write!(out, "{d}")?;
            Ok(0)
        }
    }
}

fn validate(file: &Path, out: &mut dyn Write) -> Result<i32, CliError> {
    let d = load(file)?;
    let (good, _) = d.is_good_condition();
    writeln!(
        out,
        "valid, n={}, crossings={}, good-condition={}, pure={}",
        d.num_components(),
        d.num_crossings(),
        good,
        d.pure_crossings().len()
    )?;
    Ok(0)
}

fn invariant(a: InvariantArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let d = load(&a.file)?;
    let (along, other) = reading(a.pair, a.along)?;
    let w = match (d.kind(), &a.basepoints) {
        (DiagramKind::Tangle, None) => word_invariant(&d, along, other)?,
        (DiagramKind::Tangle, Some(_)) => return Err(CliError::Usage("--basepoints applies to links only".into())),
        (DiagramKind::Link, None) => link_invariant(&d, along, other)?,
        (DiagramKind::Link, Some(b)) => link_word(&d, &b.0, along, other)?,
    };
    writeln!(out, "{w}")?;
    Ok(0)
}

fn orbit(a: OrbitArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let d = load(&a.file)?;
    let (along, other) = reading(a.pair, a.along)?;
    let w = match d.kind() {
        DiagramKind::Tangle => word_invariant(&d, along, other)?,
        DiagramKind::Link => link_word(&d, &zero_basepoints(&d), along, other)?,
    };
    let width = w.context().width();
    for (mask, rep) in slide_orbit(&w) {
        writeln!(out, "mask {} {rep}", Letter::from_index(width, mask))?;
    }
    Ok(0)
}

fn print_traces(traces: &[WalkTrace], out: &mut dyn Write) -> io::Result<()> {
    for t in traces {
        writeln!(out, "trace moves={}", t.moves.len())?;
        write!(out, "{}", t.to_log())?;
    }
    Ok(())
}

fn compare(a: CompareArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let p = load(&a.left)?;
    let q = load(&a.right)?;
    if p.kind() != q.kind() || p.num_components() != q.num_components() {
        writeln!(out, "distinct")?;
        writeln!(
            out,
            "certificate: {} with {} components vs {} with {} components",
            p.kind(),
            p.num_components(),
            q.kind(),
            q.num_components()
        )?;
        return Ok(1);
    }
    if let Some((i, j)) = a.pair {
        let n = p.num_components();
        if i == j || i == 0 || j == 0 || i > n || j > n {
            return Err(CliError::Usage(format!("--pair {i},{j} is not a pair of components 1..={n}")));
        }
    }

    let words_apply = |d: &Diagram| !d.has_pure_crossings() && d.parity_table().is_good();
    if words_apply(&p) && words_apply(&q) {
        let (mut fp, mut fq) = (fingerprint(&p)?, fingerprint(&q)?);
        if let Some((i, j)) = a.pair {
            fp = fp.restricted(i, j);
            fq = fq.restricted(i, j);
        }
        if let Some(((i, j, along), wl, wr)) = fp.first_difference(&fq) {
            writeln!(out, "distinct")?;
            writeln!(out, "certificate: pair ({i},{j}) along {along}: {wl} vs {wr}")?;
            return Ok(1);
        }
    }

    match bracket_equal(&bracket(&p)?, &bracket(&q)?, a.depth)? {
        Verdict::Equal { traces } => {
            writeln!(out, "equal")?;
            print_traces(&traces, out)?;
            Ok(0)
        }
        Verdict::Distinct(cert) => {
            writeln!(out, "distinct")?;
            writeln!(out, "certificate: {cert}")?;
            Ok(1)
        }
        Verdict::Unknown => {
            writeln!(out, "unknown")?;
            Ok(0)
        }
    }
}

fn fuzz(a: FuzzArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let d = load(&a.file)?;
    let opts = WalkOptions { forbid_pure: a.forbid_pure, max_size: a.max_size };
    let trace = random_walk(&d, a.steps, a.seed, opts)?;
    let diagrams = trace.diagrams()?;

    let parities = d.parity_table();
    let words = (a.forbid_pure && !d.has_pure_crossings() && parities.is_good())
        .then(|| fingerprint(&d))
        .transpose()?;
    let start_bracket = bracket(&d)?;

    for (step, cur) in diagrams.iter().enumerate().skip(1) {
        let mut failure = None;
        if cur.num_components() != d.num_components() {
            failure = Some("component count changed".to_string());
        } else if cur.parity_table() != parities {
            failure = Some(format!("parity table changed to {}", cur.parity_table()));
        } else if a.forbid_pure && cur.has_pure_crossings() {
            failure = Some("pure crossing created".to_string());
        } else if let Some(f) = &words {
            let g = fingerprint(cur)?;
            if let Some(((i, j, along), w0, w1)) = f.first_difference(&g) {
                failure = Some(format!("word of pair ({i},{j}) along {along} changed from {w0} to {w1}"));
            }
        }
        if failure.is_none() {
            if let Verdict::Distinct(cert) = bracket_equal(&start_bracket, &bracket(cur)?, 0)? {
                failure = Some(format!("bracket changed: {cert}"));
            }
        }
        if let Some(reason) = failure {
            let prefix = WalkTrace { initial: d.clone(), moves: trace.moves[..step].to_vec(), final_diagram: cur.clone() };
            writeln!(out, "FAIL at step {step}: {reason}")?;
            writeln!(out, "trace moves={}", prefix.moves.len())?;
            write!(out, "{}", prefix.to_log())?;
            return Ok(1);
        }
    }
    writeln!(
        out,
        "PASS steps={} seed={} final-crossings={}",
        trace.moves.len(),
        a.seed,
        trace.final_diagram.num_crossings()
    )?;
    Ok(0)
}
