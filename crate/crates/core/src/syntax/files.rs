//! Readers for the automaton, grammar, transducer and relabeling files.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{
    arity, atom, check_label, fn_from_sexp, list, predicate_from_sexp, ranked_symbol_of, read_all,
    theory_from_sexp, usize_of, wrap, Sexp,
};
use crate::classical::{Fta, FtaTransition, Rtg, RtgRule};
use crate::error::{Error, Result};
use crate::srtg::{Srtg, SrtgRule};
use crate::sta::{Sta, StaRule};
use crate::stt::{Stt, SttRule};
use crate::theory::{FnTerm, Predicate, Theory};
use crate::tree::{Call, RankedSymbol, Relabeling, Term};
use crate::vta::Vta;

/// Any of the supported file kinds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    Sta(Sta),
    Srtg(Srtg),
    Stt(Stt),
    Vta(Vta),
    Fta(Fta),
    Rtg(Rtg),
    Relabeling(Relabeling),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Sta(_) => "sta",
            Document::Srtg(_) => "srtg",
            Document::Stt(_) => "stt",
            Document::Vta(_) => "vta",
            Document::Fta(_) => "fta",
            Document::Rtg(_) => "rtg",
            Document::Relabeling(_) => "relabel",
        }
    }
}

impl std::fmt::Display for Document {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Document::Sta(x) => write!(f, "{x}"),
            Document::Srtg(x) => write!(f, "{x}"),
            Document::Stt(x) => write!(f, "{x}"),
            Document::Vta(x) => write!(f, "{x}"),
            Document::Fta(x) => writeln!(f, "{x}"),
            Document::Rtg(x) => writeln!(f, "{x}"),
            Document::Relabeling(x) => writeln!(f, "{}", relabeling_text(x)),
        }
    }
}

/// Reads a document of any kind, dispatching on its first form.
pub fn parse_document(src: &str) -> Result<Document> {
    let forms = read_all(src)?;
    let first = forms.first().ok_or_else(|| Error::Parse {
        line: 1,
        column: 1,
        message: "empty document".into(),
    })?;
    match first.head() {
        Some("sta") => sta_from_forms(&forms).map(Document::Sta),
        Some("srtg") => srtg_from_forms(&forms).map(Document::Srtg),
        Some("stt") => stt_from_forms(&forms).map(Document::Stt),
        Some("vta") => vta_from_forms(&forms).map(Document::Vta),
        Some("fta") => single(&forms).and_then(fta_from_sexp).map(Document::Fta),
        Some("rtg") => single(&forms).and_then(rtg_from_sexp).map(Document::Rtg),
        Some("relabel") => single(&forms).and_then(relabeling_from_sexp).map(Document::Relabeling),
        _ => Err(first.error("expected a header: sta, srtg, stt, vta, fta, rtg or relabel")),
    }
}

fn expect_kind(src: &str, head: &str) -> Result<Vec<Sexp>> {
    let forms = read_all(src)?;
    match forms.first() {
        Some(f) if f.head() == Some(head) => Ok(forms),
        Some(f) => Err(f.error(format!("expected a ({head} ...) header"))),
        None => Err(Error::Parse {
            line: 1,
            column: 1,
            message: "empty document".into(),
        }),
    }
}

pub fn parse_sta(src: &str) -> Result<Sta> {
    sta_from_forms(&expect_kind(src, "sta")?)
}

pub fn parse_srtg(src: &str) -> Result<Srtg> {
    srtg_from_forms(&expect_kind(src, "srtg")?)
}

pub fn parse_stt(src: &str) -> Result<Stt> {
    stt_from_forms(&expect_kind(src, "stt")?)
}

pub fn parse_vta(src: &str) -> Result<Vta> {
    vta_from_forms(&expect_kind(src, "vta")?)
}

pub fn parse_fta(src: &str) -> Result<Fta> {
    single(&expect_kind(src, "fta")?).and_then(fta_from_sexp)
}

pub fn parse_rtg(src: &str) -> Result<Rtg> {
    single(&expect_kind(src, "rtg")?).and_then(rtg_from_sexp)
}

pub fn parse_relabeling(src: &str) -> Result<Relabeling> {
    single(&expect_kind(src, "relabel")?).and_then(relabeling_from_sexp)
}

fn single(forms: &[Sexp]) -> Result<&Sexp> {
    match forms {
        [one] => Ok(one),
        [_, extra, ..] => Err(extra.error("unexpected form after the document")),
        [] => unreachable!("caller checked the first form"),
    }
}

/// `(HEAD :key value ...)`.
fn header<'a>(x: &'a Sexp, allowed: &[&str]) -> Result<HashMap<&'a str, &'a Sexp>> {
    let items = list(x, "a header")?;
    let mut out = HashMap::new();
    let mut rest = items[1..].iter();
    while let Some(k) = rest.next() {
        let key = atom(k, "a :keyword")?;
        if !allowed.contains(&key) {
            return Err(k.error(format!("unknown header keyword '{key}'")));
        }
        let v = rest.next().ok_or_else(|| k.error(format!("missing value for {key}")))?;
        if out.insert(key, v).is_some() {
            return Err(k.error(format!("duplicate header keyword '{key}'")));
        }
    }
    Ok(out)
}

fn required<'a>(h: &HashMap<&str, &'a Sexp>, key: &str, at: &Sexp) -> Result<&'a Sexp> {
    h.get(key).copied().ok_or_else(|| at.error(format!("header is missing {key}")))
}

/// State names, either declared up front or collected on first use.
struct States {
    declared: bool,
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl States {
    fn new() -> States {
        States {
            declared: false,
            names: Vec::new(),
            index: HashMap::new(),
        }
    }

    fn declare(&mut self, x: &Sexp) -> Result<()> {
        if self.declared {
            return Err(x.error("duplicate (states ...) form"));
        }
        if !self.names.is_empty() {
            return Err(x.error("(states ...) must come before any use of a state"));
        }
        for s in &list(x, "(states ...)")?[1..] {
            let name = atom(s, "a state name")?;
            if self.index.insert(name.to_string(), self.names.len()).is_some() {
                return Err(s.error(format!("duplicate state '{name}'")));
            }
            self.names.push(name.to_string());
        }
        self.declared = true;
        Ok(())
    }

    fn get(&mut self, x: &Sexp) -> Result<usize> {
        let name = atom(x, "a state name")?;
        if let Some(&i) = self.index.get(name) {
            return Ok(i);
        }
        if self.declared {
            return Err(x.error(format!("undeclared state '{name}'")));
        }
        self.index.insert(name.to_string(), self.names.len());
        self.names.push(name.to_string());
        Ok(self.names.len() - 1)
    }
}

fn checked_predicate(x: &Sexp, theory: &Theory) -> Result<Predicate> {
    let p = predicate_from_sexp(x)?;
    for l in p.mentioned_labels() {
        check_label(theory, &l, x)?;
    }
    Ok(p)
}

fn checked_fn(x: &Sexp, input: &Theory, output: &Theory) -> Result<FnTerm> {
    let f = fn_from_sexp(x)?;
    fn visit(f: &FnTerm, x: &Sexp, input: &Theory, output: &Theory) -> Result<()> {
        match f {
            FnTerm::Const(c) => check_label(output, c, x),
            FnTerm::Map(m) => {
                for (a, b) in m {
                    check_label(input, a, x)?;
                    check_label(output, b, x)?;
                }
                Ok(())
            }
            FnTerm::Restrict(p, g) => {
                for l in p.mentioned_labels() {
                    check_label(input, &l, x)?;
                }
                visit(g, x, input, output)
            }
            FnTerm::Identity | FnTerm::Affine { .. } => Ok(()),
        }
    }
    visit(&f, x, input, output)?;
    Ok(f)
}

fn k_of(h: &HashMap<&str, &Sexp>, at: &Sexp) -> Result<usize> {
    let k = required(h, ":k", at)?;
    usize_of(k)
}

fn sta_from_forms(forms: &[Sexp]) -> Result<Sta> {
    let head = &forms[0];
    let h = header(head, &[":theory", ":k"])?;
    let theory = theory_from_sexp(required(&h, ":theory", head)?)?;
    let k = k_of(&h, head)?;
    let mut states = States::new();
    let mut finals = BTreeSet::new();
    let mut seen_final = false;
    let mut rules = Vec::new();
    for x in &forms[1..] {
        let items = list(x, "a form")?;
        match x.head() {
            Some("states") => states.declare(x)?,
            Some("final") => {
                if seen_final {
                    return Err(x.error("duplicate (final ...) form"));
                }
                seen_final = true;
                for s in &items[1..] {
                    finals.insert(states.get(s)?);
                }
            }
            Some("rule") => {
                arity(x, items, 3)?;
                let lhs = list(&items[1], "a list of child states")?
                    .iter()
                    .map(|s| states.get(s))
                    .collect::<Result<Vec<_>>>()?;
                if lhs.len() > k {
                    return Err(items[1].error(format!("{} child states exceed k = {k}", lhs.len())));
                }
                let guard = checked_predicate(&items[2], &theory)?;
                let rhs = states.get(&items[3])?;
                rules.push(StaRule { lhs, guard, rhs });
            }
            _ => return Err(x.error("expected (states ...), (final ...) or (rule ...)")),
        }
    }
    Sta::new(k, theory, states.names, finals, rules).map_err(|e| wrap(e, head))
}

fn srtg_rhs(x: &Sexp, states: &mut States, theory: &Theory) -> Result<Term<Predicate, usize>> {
    let items = list(x, "(pred P ...) or (state q)")?;
    match x.head() {
        Some("state") => {
            arity(x, items, 1)?;
            Ok(Term::Leaf(states.get(&items[1])?))
        }
        Some("pred") => {
            if items.len() < 2 {
                return Err(x.error("(pred P CHILD...) needs a predicate"));
            }
            let p = checked_predicate(&items[1], theory)?;
            let kids = items[2..]
                .iter()
                .map(|c| srtg_rhs(c, states, theory))
                .collect::<Result<Vec<_>>>()?;
            Ok(Term::Node(p, kids))
        }
        _ => Err(x.error("expected (pred P CHILD...) or (state q)")),
    }
}

fn init_of(x: &Sexp, items: &[Sexp], states: &mut States, init: &mut Option<usize>) -> Result<()> {
    arity(x, items, 1)?;
    if init.is_some() {
        return Err(x.error("duplicate (init ...) form"));
    }
    *init = Some(states.get(&items[1])?);
    Ok(())
}

fn srtg_from_forms(forms: &[Sexp]) -> Result<Srtg> {
    let head = &forms[0];
    let h = header(head, &[":theory", ":k"])?;
    let theory = theory_from_sexp(required(&h, ":theory", head)?)?;
    let k = k_of(&h, head)?;
    let mut states = States::new();
    let mut init = None;
    let mut rules = Vec::new();
    for x in &forms[1..] {
        let items = list(x, "a form")?;
        match x.head() {
            Some("states") => states.declare(x)?,
            Some("init") => init_of(x, items, &mut states, &mut init)?,
            Some("rule") => {
                arity(x, items, 2)?;
                let lhs = states.get(&items[1])?;
                let rhs = srtg_rhs(&items[2], &mut states, &theory)?;
                rules.push(SrtgRule { lhs, rhs });
            }
            _ => return Err(x.error("expected (states ...), (init ...) or (rule ...)")),
        }
    }
    let init = init.ok_or_else(|| head.error("missing (init q) form"))?;
    Srtg::new(k, theory, states.names, init, rules).map_err(|e| wrap(e, head))
}

fn stt_rhs(
    x: &Sexp,
    states: &mut States,
    input: &Theory,
    output: &Theory,
) -> Result<Term<FnTerm, Call>> {
    let items = list(x, "(fn F ...) or (call q i)")?;
    match x.head() {
        Some("call") => {
            arity(x, items, 2)?;
            let state = states.get(&items[1])?;
            let var = usize_of(&items[2])?;
            Ok(Term::Leaf(Call { state, var }))
        }
        Some("fn") => {
            if items.len() < 2 {
                return Err(x.error("(fn F CHILD...) needs a function"));
            }
            let f = checked_fn(&items[1], input, output)?;
            let kids = items[2..]
                .iter()
                .map(|c| stt_rhs(c, states, input, output))
                .collect::<Result<Vec<_>>>()?;
            Ok(Term::Node(f, kids))
        }
        _ => Err(x.error("expected (fn F CHILD...) or (call q i)")),
    }
}

fn stt_from_forms(forms: &[Sexp]) -> Result<Stt> {
    let head = &forms[0];
    let h = header(head, &[":in-theory", ":out-theory", ":theory", ":k"])?;
    let (input, output) = match (h.get(":theory"), h.get(":in-theory"), h.get(":out-theory")) {
        (Some(t), None, None) => {
            let t = theory_from_sexp(t)?;
            (t.clone(), t)
        }
        (None, Some(i), Some(o)) => (theory_from_sexp(i)?, theory_from_sexp(o)?),
        _ => return Err(head.error("header needs :in-theory and :out-theory (or a single :theory)")),
    };
    let k = k_of(&h, head)?;
    let mut states = States::new();
    let mut init = None;
    let mut rules = Vec::new();
    for x in &forms[1..] {
        let items = list(x, "a form")?;
        match x.head() {
            Some("states") => states.declare(x)?,
            Some("init") => init_of(x, items, &mut states, &mut init)?,
            Some("rule") => {
                arity(x, items, 4)?;
                let state = states.get(&items[1])?;
                let l = usize_of(&items[2])?;
                let guard = checked_predicate(&items[3], &input)?;
                let rhs = stt_rhs(&items[4], &mut states, &input, &output)?;
                let mut bad = None;
                rhs.visit_leaves(&mut |c: &Call| {
                    if c.var == 0 || c.var > l {
                        bad = Some(c.var);
                    }
                });
                if let Some(v) = bad {
                    return Err(items[4].error(format!("variable x{v} is out of range for arity {l}")));
                }
                rules.push(SttRule {
                    state,
                    arity: l,
                    guard,
                    rhs,
                });
            }
            _ => return Err(x.error("expected (states ...), (init ...) or (rule ...)")),
        }
    }
    let init = init.ok_or_else(|| head.error("missing (init q) form"))?;
    Stt::new(k, input, output, states.names, init, rules).map_err(|e| wrap(e, head))
}

fn symbols_of(x: &Sexp) -> Result<BTreeSet<RankedSymbol>> {
    let items = list(x, "a symbol list")?;
    let mut out = BTreeSet::new();
    for s in &items[1..] {
        if !out.insert(ranked_symbol_of(s)?) {
            return Err(s.error("duplicate symbol"));
        }
    }
    Ok(out)
}

fn fta_from_sexp(x: &Sexp) -> Result<Fta> {
    let items = list(x, "(fta ...)")?;
    let mut states = States::new();
    let mut alphabet: Option<BTreeSet<RankedSymbol>> = None;
    let mut finals = BTreeSet::new();
    let mut seen_final = false;
    let mut transitions = Vec::new();
    for f in &items[1..] {
        let parts = list(f, "a form")?;
        match f.head() {
            Some("alphabet") => {
                if alphabet.is_some() {
                    return Err(f.error("duplicate (alphabet ...) form"));
                }
                alphabet = Some(symbols_of(f)?);
            }
            Some("states") => states.declare(f)?,
            Some("final") => {
                if seen_final {
                    return Err(f.error("duplicate (final ...) form"));
                }
                seen_final = true;
                for s in &parts[1..] {
                    finals.insert(states.get(s)?);
                }
            }
            Some("trans") => {
                arity(f, parts, 3)?;
                let name = super::label_of(&parts[1])?;
                let children = list(&parts[2], "a list of child states")?
                    .iter()
                    .map(|s| states.get(s))
                    .collect::<Result<Vec<_>>>()?;
                let target = states.get(&parts[3])?;
                transitions.push(FtaTransition {
                    symbol: RankedSymbol::new(name, children.len()),
                    children,
                    target,
                });
            }
            _ => return Err(f.error("expected (alphabet ...), (states ...), (final ...) or (trans ...)")),
        }
    }
    let alphabet = alphabet.unwrap_or_else(|| transitions.iter().map(|t| t.symbol.clone()).collect());
    Fta::new(states.names, alphabet, transitions, finals).map_err(|e| wrap(e, x))
}

fn rtg_rhs(x: &Sexp, states: &mut States) -> Result<Term<RankedSymbol, usize>> {
    let items = list(x, "(sym NAME ...) or (state q)")?;
    match x.head() {
        Some("state") => {
            arity(x, items, 1)?;
            Ok(Term::Leaf(states.get(&items[1])?))
        }
        Some("sym") => {
            if items.len() < 2 {
                return Err(x.error("(sym NAME CHILD...) needs a name"));
            }
            let name = super::label_of(&items[1])?;
            let kids = items[2..]
                .iter()
                .map(|c| rtg_rhs(c, states))
                .collect::<Result<Vec<_>>>()?;
            Ok(Term::Node(RankedSymbol::new(name, kids.len()), kids))
        }
        _ => Err(x.error("expected (sym NAME CHILD...) or (state q)")),
    }
}

fn rtg_from_sexp(x: &Sexp) -> Result<Rtg> {
    let items = list(x, "(rtg ...)")?;
    let mut states = States::new();
    let mut alphabet: Option<BTreeSet<RankedSymbol>> = None;
    let mut init = None;
    let mut rules = Vec::new();
    for f in &items[1..] {
        let parts = list(f, "a form")?;
        match f.head() {
            Some("alphabet") => {
                if alphabet.is_some() {
                    return Err(f.error("duplicate (alphabet ...) form"));
                }
                alphabet = Some(symbols_of(f)?);
            }
            Some("states") => states.declare(f)?,
            Some("init") => init_of(f, parts, &mut states, &mut init)?,
            Some("rule") => {
                arity(f, parts, 2)?;
                let lhs = states.get(&parts[1])?;
                let rhs = rtg_rhs(&parts[2], &mut states)?;
                rules.push(RtgRule { lhs, rhs });
            }
            _ => return Err(f.error("expected (alphabet ...), (states ...), (init ...) or (rule ...)")),
        }
    }
    let init = init.ok_or_else(|| x.error("missing (init q) form"))?;
    let alphabet = alphabet.unwrap_or_else(|| {
        rules
            .iter()
            .flat_map(|r| r.rhs.nodes().into_iter().cloned())
            .collect()
    });
    Rtg::new(states.names, alphabet, init, rules).map_err(|e| wrap(e, x))
}

fn vta_from_forms(forms: &[Sexp]) -> Result<Vta> {
    let head = &forms[0];
    let items = list(head, "(vta)")?;
    if items.len() != 1 {
        return Err(head.error("the (vta) header takes no arguments"));
    }
    let mut fta = None;
    let mut universe = None;
    let mut partition = None;
    for x in &forms[1..] {
        match x.head() {
            Some("fta") if fta.is_none() => fta = Some(fta_from_sexp(x)?),
            Some("universe") if universe.is_none() => {
                let mut u = BTreeMap::new();
                for r in &list(x, "(universe ...)")?[1..] {
                    let parts = list(r, "(rank L PRED)")?;
                    if r.head() != Some("rank") {
                        return Err(r.error("expected (rank L PRED)"));
                    }
                    arity(r, parts, 2)?;
                    let l = usize_of(&parts[1])?;
                    if u.insert(l, predicate_from_sexp(&parts[2])?).is_some() {
                        return Err(r.error(format!("duplicate universe for rank {l}")));
                    }
                }
                universe = Some(u);
            }
            Some("partition") if partition.is_none() => {
                let mut classes: HashMap<&str, BTreeSet<RankedSymbol>> = HashMap::new();
                for c in &list(x, "(partition ...)")?[1..] {
                    let tag = c.head().ok_or_else(|| c.error("expected (a ...), (z ...) or (y ...)"))?;
                    if !["a", "z", "y"].contains(&tag) {
                        return Err(c.error("expected (a ...), (z ...) or (y ...)"));
                    }
                    if classes.insert(tag, symbols_of(c)?).is_some() {
                        return Err(c.error(format!("duplicate ({tag} ...) class")));
                    }
                }
                partition = Some(classes);
            }
            Some("fta" | "universe" | "partition") => return Err(x.error("duplicate form")),
            _ => return Err(x.error("expected (fta ...), (universe ...) or (partition ...)")),
        }
    }
    let fta = fta.ok_or_else(|| head.error("missing (fta ...) form"))?;
    let universe = universe.ok_or_else(|| head.error("missing (universe ...) form"))?;
    let mut classes = partition.ok_or_else(|| head.error("missing (partition ...) form"))?;
    let mut take = |t: &str| classes.remove(t).unwrap_or_default();
    let (a, z, y) = (take("a"), take("z"), take("y"));
    Vta::new(fta, universe, a, z, y).map_err(|e| wrap(e, head))
}

fn relabeling_from_sexp(x: &Sexp) -> Result<Relabeling> {
    let items = list(x, "(relabel ...)")?;
    if items.len() < 3 || items[1].as_atom() != Some(":theory") {
        return Err(x.error("expected (relabel :theory T (NAME/RANK PRED) ...)"));
    }
    let theory = theory_from_sexp(&items[2])?;
    let mut map = BTreeMap::new();
    for e in &items[3..] {
        let parts = list(e, "(NAME/RANK PRED)")?;
        if parts.len() != 2 {
            return Err(e.error("expected (NAME/RANK PRED)"));
        }
        let sym = ranked_symbol_of(&parts[0])?;
        let p = checked_predicate(&parts[1], &theory)?;
        if map.insert(sym, p).is_some() {
            return Err(e.error("duplicate symbol"));
        }
    }
    Ok(Relabeling::new(theory, map))
}

pub fn relabeling_text(r: &Relabeling) -> String {
    let mut s = format!("(relabel :theory {}", r.theory);
    for (sym, p) in &r.map {
        s.push_str(&format!("\n  ({sym} {p})"));
    }
    s.push(')');
    s
}
