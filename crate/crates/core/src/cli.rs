//! The `symtree` command line.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::SeedableRng;

use crate::analysis::{backward_apply, domain_srtg, forward_apply_slin, range_slin, typecheck, TypeCheckMode, Verdict};
use crate::compose::{compose_semantics_check, syntactic_compose};
use crate::error::Error;
use crate::srtg::Srtg;
use crate::sta::Sta;
use crate::stt::Stt;
use crate::syntax::{parse_document, parse_tree, relabeling_text, Document};
use crate::tree::Tree;
use crate::vta::Vta;

#[derive(Parser, Debug)]
#[command(name = "symtree", version, about = "Symbolic tree automata, grammars and transducers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a file (or a tree) and print it back in canonical form.
    Parse(ParseArgs),
    /// Decide tree membership in an automaton or grammar language.
    Member(MemberArgs),
    /// Decide emptiness; prints a member when the language is nonempty.
    Empty(LangArgs),
    /// Decide L(left) ⊆ L(right); prints a tree of the difference otherwise.
    Include(PairArgs),
    /// Boolean operations on automata.
    Bool(BoolArgs),
    /// All outputs of a transducer on a tree.
    Apply(ApplyArgs),
    /// Structural properties of a transducer.
    Props(TtArgs),
    /// Syntactic composition: first `--left`, then `--right`.
    Compose(ComposeArgs),
    /// Grammar for the domain of a transducer.
    Domain(TtArgs),
    /// Grammar for the inputs that have an output in `--lang`.
    Backward(TtLangArgs),
    /// Grammar for the outputs on inputs from `--lang` (simple linear only).
    Forward(TtLangArgs),
    /// Grammar for the range of a simple linear transducer.
    Range(TtArgs),
    /// Decide M(left) ⊆ right, or with `--inverse` M⁻¹(right) ⊆ left.
    Typecheck(TypecheckArgs),
    /// Random members of a grammar or automaton language.
    Sample(SampleArgs),
    /// Convert between automata, grammars and classical devices.
    Convert(ConvertArgs),
    /// Membership in a variable tree automaton.
    VtaMember(VtaArgs),
}

#[derive(Args, Debug)]
struct ParseArgs {
    file: Option<PathBuf>,
    #[arg(long)]
    tree: Option<String>,
}

#[derive(Args, Debug)]
struct LangArgs {
    /// Automaton file (.sta).
    #[arg(long)]
    auto: Option<PathBuf>,
    /// Grammar file (.srtg).
    #[arg(long)]
    grammar: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MemberArgs {
    #[command(flatten)]
    lang: LangArgs,
    #[arg(long)]
    tree: String,
}

#[derive(Args, Debug)]
struct PairArgs {
    #[arg(long)]
    left: PathBuf,
    #[arg(long)]
    right: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BoolOp {
    And,
    Or,
    Not,
}

#[derive(Args, Debug)]
struct BoolArgs {
    #[arg(long, value_enum)]
    op: BoolOp,
    #[arg(long)]
    left: PathBuf,
    #[arg(long)]
    right: Option<PathBuf>,
    /// Rank bound of the complement (defaults to the automaton's).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ApplyArgs {
    #[arg(long)]
    tt: PathBuf,
    #[arg(long)]
    tree: String,
    /// Start state (defaults to the initial state).
    #[arg(long)]
    state: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    max_outputs: usize,
}

#[derive(Args, Debug)]
struct TtArgs {
    #[arg(long)]
    tt: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ComposeArgs {
    #[arg(long)]
    left: PathBuf,
    #[arg(long)]
    right: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TtLangArgs {
    #[arg(long)]
    tt: PathBuf,
    /// Automaton or grammar file.
    #[arg(long)]
    lang: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TypecheckArgs {
    #[arg(long)]
    tt: PathBuf,
    /// Input language.
    #[arg(long)]
    left: PathBuf,
    /// Output language.
    #[arg(long)]
    right: PathBuf,
    #[arg(long)]
    inverse: bool,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    lang: LangArgs,
    #[arg(long, default_value_t = 4)]
    depth: usize,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Labels are drawn among the first SPREAD witnesses of each predicate.
    #[arg(long, default_value_t = 1)]
    spread: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Target {
    Sta,
    Srtg,
    FtaRtg,
}

#[derive(Args, Debug)]
struct ConvertArgs {
    #[arg(long, value_enum)]
    to: Target,
    #[command(flatten)]
    lang: LangArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VtaArgs {
    #[arg(long)]
    vta: PathBuf,
    #[arg(long)]
    tree: String,
}

/// A failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::Parse { .. } | Error::Format(_) => 2,
            _ => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type Outcome = std::result::Result<i32, Failure>;

fn load(path: &Path) -> std::result::Result<Document, Failure> {
    let src = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    parse_document(&src).map_err(|e| {
        let f = Failure::from(e);
        Failure {
            message: format!("{}: {}", path.display(), f.message),
            ..f
        }
    })
}

fn load_sta(path: &Path) -> std::result::Result<Sta, Failure> {
    match load(path)? {
        Document::Sta(a) => Ok(a),
        Document::Srtg(g) => Ok(g.to_sta()),
        other => Err(usage(format!("{}: expected an sta or srtg file, found {}", path.display(), other.kind()))),
    }
}

fn load_srtg(path: &Path) -> std::result::Result<Srtg, Failure> {
    match load(path)? {
        Document::Srtg(g) => Ok(g),
        Document::Sta(a) => Ok(Srtg::from_sta(&a)),
        other => Err(usage(format!("{}: expected an sta or srtg file, found {}", path.display(), other.kind()))),
    }
}

fn load_stt(path: &Path) -> std::result::Result<Stt, Failure> {
    match load(path)? {
        Document::Stt(m) => Ok(m),
        other => Err(usage(format!("{}: expected an stt file, found {}", path.display(), other.kind()))),
    }
}

fn load_vta(path: &Path) -> std::result::Result<Vta, Failure> {
    match load(path)? {
        Document::Vta(v) => Ok(v),
        other => Err(usage(format!("{}: expected a vta file, found {}", path.display(), other.kind()))),
    }
}

fn lang_sta(lang: &LangArgs) -> std::result::Result<Sta, Failure> {
    match (&lang.auto, &lang.grammar) {
        (Some(a), None) => load_sta(a),
        (None, Some(g)) => load_sta(g),
        _ => Err(usage("give exactly one of --auto or --grammar")),
    }
}

fn tree_arg(s: &str) -> std::result::Result<Tree, Failure> {
    parse_tree(s).map_err(|e| usage(format!("--tree: {e}")))
}

fn emit(out: &mut dyn Write, target: &Option<PathBuf>, text: &str) -> Outcome {
    match target {
        Some(p) => {
            fs::write(p, text).map_err(|e| usage(format!("cannot write {}: {e}", p.display())))?;
        }
        None => {
            let _ = write!(out, "{text}");
        }
    }
    Ok(0)
}

fn decision(out: &mut dyn Write, yes: bool, witness: Option<&Tree>) -> Outcome {
    let _ = writeln!(out, "{}", if yes { "yes" } else { "no" });
    if let Some(w) = witness {
        let _ = writeln!(out, "{w}");
    }
    Ok(if yes { 0 } else { 1 })
}

fn sorted_lines<'a, I: IntoIterator<Item = &'a Tree>>(trees: I) -> Vec<String> {
    let mut lines: Vec<String> = trees.into_iter().map(Tree::to_string).collect();
    lines.sort();
    lines
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Outcome {
    match cli.command {
        Command::Parse(a) => match (a.file, a.tree) {
            (Some(f), None) => {
                let doc = load(&f)?;
                emit(out, &None, &doc.to_string())
            }
            (None, Some(t)) => {
                let _ = writeln!(out, "{}", tree_arg(&t)?);
                Ok(0)
            }
            _ => Err(usage("give exactly one of FILE or --tree")),
        },
        Command::Member(a) => {
            let t = tree_arg(&a.tree)?;
            let yes = lang_sta(&a.lang)?.member(&t)?;
            decision(out, yes, None)
        }
        Command::Empty(a) => {
            let w = lang_sta(&a)?.find_member();
            decision(out, w.is_none(), w.as_ref())
        }
        Command::Include(a) => {
            let (l, r) = (load_sta(&a.left)?, load_sta(&a.right)?);
            let w = l.included(&r)?;
            decision(out, w.is_none(), w.as_ref())
        }
        Command::Bool(a) => {
            let l = load_sta(&a.left)?;
            let result = match (a.op, &a.right) {
                (BoolOp::Not, None) => l.complement(a.k.unwrap_or(l.k))?,
                (BoolOp::And, Some(r)) => l.intersect(&load_sta(r)?)?,
                (BoolOp::Or, Some(r)) => l.union(&load_sta(r)?)?,
                (BoolOp::Not, Some(_)) => return Err(usage("--op not takes only --left")),
                (_, None) => return Err(usage("--op and/or need --right")),
            };
            emit(out, &a.out, &result.to_string())
        }
        Command::Apply(a) => {
            let m = load_stt(&a.tt)?;
            let t = tree_arg(&a.tree)?;
            let q = match &a.state {
                Some(s) => m.state_index(s).ok_or_else(|| usage(format!("unknown state '{s}'")))?,
                None => m.initial,
            };
            let outputs = m.apply_from(q, &t, a.max_outputs)?;
            for line in sorted_lines(&outputs) {
                let _ = writeln!(out, "{line}");
            }
            Ok(0)
        }
        Command::Props(a) => {
            let m = load_stt(&a.tt)?;
            emit(out, &a.out, &format!("{}\n", m.props()))
        }
        Command::Compose(a) => {
            let (m, n) = (load_stt(&a.left)?, load_stt(&a.right)?);
            let c = syntactic_compose(&m, &n)?;
            let text = format!("; composition semantics: {}\n{c}", compose_semantics_check(&m, &n));
            emit(out, &a.out, &text)
        }
        Command::Domain(a) => {
            let g = domain_srtg(&load_stt(&a.tt)?)?;
            emit(out, &a.out, &g.to_string())
        }
        Command::Backward(a) => {
            let g = backward_apply(&load_stt(&a.tt)?, &load_sta(&a.lang)?)?;
            emit(out, &a.out, &g.to_string())
        }
        Command::Forward(a) => {
            let m = load_stt(&a.tt)?;
            let g = forward_apply_slin(&m, &load_srtg(&a.lang)?)?;
            emit(out, &a.out, &g.to_string())
        }
        Command::Range(a) => {
            let g = range_slin(&load_stt(&a.tt)?)?;
            emit(out, &a.out, &g.to_string())
        }
        Command::Typecheck(a) => {
            let m = load_stt(&a.tt)?;
            let (l_in, l_out) = (load_sta(&a.left)?, load_sta(&a.right)?);
            let mode = if a.inverse { TypeCheckMode::Inverse } else { TypeCheckMode::Forward };
            let report = typecheck(&m, &l_in, &l_out, mode)?;
            let holds = report.verdict == Verdict::Holds;
            let _ = writeln!(out, "{}", if holds { "yes" } else { "no" });
            if let Some((input, output)) = &report.counterexample {
                let _ = writeln!(out, "input: {input}");
                if let Some(o) = output {
                    let _ = writeln!(out, "output: {o}");
                }
            }
            Ok(if holds { 0 } else { 1 })
        }
        Command::Sample(a) => {
            let g = match (&a.lang.auto, &a.lang.grammar) {
                (Some(p), None) | (None, Some(p)) => load_srtg(p)?,
                _ => return Err(usage("give exactly one of --auto or --grammar")),
            };
            let mut rng = StdRng::seed_from_u64(a.seed);
            let mut produced = 0;
            let mut attempts = 0;
            while produced < a.count && attempts < a.count.saturating_mul(100).max(100) {
                attempts += 1;
                if let Some(t) = g.sample(&mut rng, a.depth, a.spread) {
                    let _ = writeln!(out, "{t}");
                    produced += 1;
                }
            }
            Ok(0)
        }
        Command::Convert(a) => {
            let path = match (&a.lang.auto, &a.lang.grammar) {
                (Some(p), None) | (None, Some(p)) => p,
                _ => return Err(usage("give exactly one of --auto or --grammar")),
            };
            let doc = load(path)?;
            let text = match (a.to, doc) {
                (Target::Sta, Document::Sta(x)) => x.to_string(),
                (Target::Sta, Document::Srtg(g)) => g.to_sta().to_string(),
                (Target::Srtg, Document::Srtg(g)) => g.to_string(),
                (Target::Srtg, Document::Sta(x)) => Srtg::from_sta(&x).to_string(),
                (Target::FtaRtg, Document::Sta(x)) => {
                    let (fta, tau) = x.to_fta();
                    format!("{fta}\n\n{}\n", relabeling_text(&tau))
                }
                (Target::FtaRtg, Document::Srtg(g)) => {
                    let (rtg, tau) = g.to_rtg();
                    format!("{rtg}\n\n{}\n", relabeling_text(&tau))
                }
                (_, other) => return Err(usage(format!("cannot convert a {} file", other.kind()))),
            };
            emit(out, &a.out, &text)
        }
        Command::VtaMember(a) => {
            let b = load_vta(&a.vta)?;
            let t = tree_arg(&a.tree)?;
            let yes = b.member(&t)?;
            decision(out, yes, None)
        }
    }
}

/// Runs one command; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    2
                }
            };
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
