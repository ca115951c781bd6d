//! Symbolic top-down tree transducers.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::rc::Rc;

use crate::classical::{fresh_name, Tdtt, TdttRule};
use crate::error::{Error, Result};
use crate::sta::Sta;
use crate::theory::{FnTerm, Label, Predicate, Theory};
use crate::tree::{Call, RankedSymbol, Term, Tree};

/// A rule `q(φ(x1, …, xl)) → u`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SttRule {
    pub state: usize,
    pub arity: usize,
    pub guard: Predicate,
    pub rhs: Term<FnTerm, Call>,
}

impl SttRule {
    /// The left-hand side state-rank pair.
    pub fn lhs(&self) -> (usize, usize) {
        (self.state, self.arity)
    }

    fn var_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.arity + 1];
        self.rhs.visit_leaves(&mut |c: &Call| counts[c.var] += 1);
        counts
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stt {
    pub k: usize,
    pub in_theory: Theory,
    pub out_theory: Theory,
    pub states: Vec<String>,
    pub initial: usize,
    pub rules: Vec<SttRule>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SttProps {
    pub linear: bool,
    pub nondeleting: bool,
    pub deterministic: bool,
    pub total: bool,
    pub simple: bool,
    pub alphabetic: bool,
}

impl fmt::Display for SttProps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "linear: {}", self.linear)?;
        writeln!(f, "nondeleting: {}", self.nondeleting)?;
        writeln!(f, "deterministic: {}", self.deterministic)?;
        writeln!(f, "total: {}", self.total)?;
        writeln!(f, "simple: {}", self.simple)?;
        write!(f, "alphabetic: {}", self.alphabetic)
    }
}

/// Output sets keyed by (state, node address).
type Memo = HashMap<(usize, usize), Rc<BTreeSet<Tree>>>;

impl Stt {
    pub fn new(
        k: usize,
        in_theory: Theory,
        out_theory: Theory,
        states: Vec<String>,
        initial: usize,
        rules: Vec<SttRule>,
    ) -> Result<Stt> {
        let n = states.len();
        if initial >= n {
            return Err(Error::format("unknown initial state"));
        }
        let distinct: HashSet<&String> = states.iter().collect();
        if distinct.len() != n {
            return Err(Error::format("duplicate state name"));
        }
        for r in &rules {
            if r.arity > k {
                return Err(Error::format(format!("rule arity {} exceeds k = {k}", r.arity)));
            }
            if r.state >= n {
                return Err(Error::format("rule refers to an unknown state"));
            }
            for c in r.rhs.leaves() {
                if c.state >= n {
                    return Err(Error::format("rule refers to an unknown state"));
                }
                if c.var == 0 || c.var > r.arity {
                    return Err(Error::format(format!(
                        "variable x{} out of range for a rule of arity {}",
                        c.var, r.arity
                    )));
                }
            }
            let rank = r.rhs.rank();
            if rank > k {
                return Err(Error::format(format!("rule right-hand side has rank {rank} > k = {k}")));
            }
        }
        Ok(Stt {
            k,
            in_theory,
            out_theory,
            states,
            initial,
            rules,
        })
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    /// The rule in file syntax, for messages.
    pub fn rule_text(&self, r: &SttRule) -> String {
        let mut s = format!("(rule {} {} {} ", self.states[r.state], r.arity, r.guard);
        write_rhs(&mut s, &r.rhs, &self.states);
        s.push(')');
        s
    }

    fn check_input(&self, t: &Tree) -> Result<()> {
        t.check_bound(self.k)?;
        for a in t.labels() {
            self.in_theory.check(&a)?;
        }
        Ok(())
    }

    /// All outputs of the initial state on `t`.
    pub fn apply(&self, t: &Tree) -> Result<BTreeSet<Tree>> {
        self.apply_from(self.initial, t, usize::MAX)
    }

    /// All outputs of state `q` on `t`; fails once any intermediate output
    /// set has more than `limit` trees.
    pub fn apply_from(&self, q: usize, t: &Tree, limit: usize) -> Result<BTreeSet<Tree>> {
        self.check_input(t)?;
        let mut memo = Memo::new();
        let out = self.outputs(q, t, limit, &mut memo)?;
        Ok(Rc::try_unwrap(out).unwrap_or_else(|rc| (*rc).clone()))
    }

    fn outputs(&self, q: usize, t: &Tree, limit: usize, memo: &mut Memo) -> Result<Rc<BTreeSet<Tree>>> {
        if let Some(r) = memo.get(&(q, t.node_id())) {
            return Ok(r.clone());
        }
        let l = t.children().len();
        let mut out = BTreeSet::new();
        for r in self.rules.iter().filter(|r| r.state == q && r.arity == l) {
            if !r.guard.holds(t.label()) {
                continue;
            }
            for v in self.expand(r, &r.rhs, t, limit, memo)? {
                out.insert(v);
                if out.len() > limit {
                    return Err(Error::TooManyOutputs(limit));
                }
            }
        }
        let out = Rc::new(out);
        memo.insert((q, t.node_id()), out.clone());
        Ok(out)
    }

    fn expand(
        &self,
        rule: &SttRule,
        u: &Term<FnTerm, Call>,
        t: &Tree,
        limit: usize,
        memo: &mut Memo,
    ) -> Result<Vec<Tree>> {
        match u {
            Term::Leaf(c) => {
                let set = self.outputs(c.state, &t.children()[c.var - 1], limit, memo)?;
                Ok(set.iter().cloned().collect())
            }
            Term::Node(f, cs) => {
                let b = f.apply(t.label()).ok_or_else(|| Error::PartialFunction {
                    rule: self.rule_text(rule),
                    function: f.to_string(),
                    label: t.label().to_string(),
                })?;
                self.out_theory.check(&b)?;
                let mut acc: Vec<Vec<Tree>> = vec![Vec::new()];
                for c in cs {
                    let opts = self.expand(rule, c, t, limit, memo)?;
                    if acc.len().saturating_mul(opts.len()) > limit {
                        return Err(Error::TooManyOutputs(limit));
                    }
                    let mut next = Vec::with_capacity(acc.len() * opts.len());
                    for a in &acc {
                        for o in &opts {
                            let mut v = a.clone();
                            v.push(o.clone());
                            next.push(v);
                        }
                    }
                    acc = next;
                }
                Ok(acc.into_iter().map(|kids| Tree::new(b.clone(), kids)).collect())
            }
        }
    }

    pub fn props(&self) -> SttProps {
        let linear = self.rules.iter().all(|r| r.var_counts().iter().all(|&c| c <= 1));
        let nondeleting = self.rules.iter().all(|r| r.var_counts()[1..].iter().all(|&c| c >= 1));
        let simple = self.rules.iter().all(|r| r.rhs.nodes().len() == 1);
        let mut groups: BTreeMap<(usize, usize), Vec<&SttRule>> = BTreeMap::new();
        for r in &self.rules {
            groups.entry(r.lhs()).or_default().push(r);
        }
        let deterministic = groups.values().all(|rs| {
            rs.iter().enumerate().all(|(i, a)| {
                rs[i + 1..]
                    .iter()
                    .all(|b| !self.in_theory.is_sat(&Predicate::and(a.guard.clone(), b.guard.clone())))
            })
        });
        let total = (0..self.states.len()).all(|q| {
            (0..=self.k).all(|l| {
                let guards = groups
                    .get(&(q, l))
                    .map(|rs| rs.iter().map(|r| r.guard.clone()).collect::<Vec<_>>())
                    .unwrap_or_default();
                !self.in_theory.is_sat(&Predicate::negate(Predicate::disj(guards)))
            })
        });
        SttProps {
            linear,
            nondeleting,
            deterministic,
            total,
            simple,
            alphabetic: self.alphabetic_symbols().is_ok(),
        }
    }

    /// For an alphabetic transducer, the input symbol of every rule.
    fn alphabetic_symbols(&self) -> Result<Vec<RankedSymbol>> {
        let not = |why: String| Err(Error::Unsupported(format!("transducer is not alphabetic: {why}")));
        if !matches!(self.in_theory, Theory::Finite(_)) || !matches!(self.out_theory, Theory::Finite(_)) {
            return not("both theories must be finite".into());
        }
        let mut in_rank: BTreeMap<Label, usize> = BTreeMap::new();
        let mut out_rank: BTreeMap<Label, usize> = BTreeMap::new();
        let mut symbols = Vec::with_capacity(self.rules.len());
        for r in &self.rules {
            let sigma = match self.in_theory.enumerate(&r.guard, 2) {
                Some(v) if v.len() == 1 => v[0].clone(),
                _ => return not(format!("guard of {} is not a single symbol", self.rule_text(r))),
            };
            if *in_rank.entry(sigma.clone()).or_insert(r.arity) != r.arity {
                return not(format!("input symbol {sigma} used with two ranks"));
            }
            let mut bad = None;
            fn visit(u: &Term<FnTerm, Call>, out_rank: &mut BTreeMap<Label, usize>, bad: &mut Option<String>) {
                if let Term::Node(f, cs) = u {
                    match f {
                        FnTerm::Const(b) => {
                            if *out_rank.entry(b.clone()).or_insert(cs.len()) != cs.len() {
                                *bad = Some(format!("output symbol {b} used with two ranks"));
                            }
                        }
                        other => *bad = Some(format!("function {other} is not a constant")),
                    }
                    cs.iter().for_each(|c| visit(c, out_rank, bad));
                }
            }
            visit(&r.rhs, &mut out_rank, &mut bad);
            if let Some(why) = bad {
                return not(why);
            }
            symbols.push(RankedSymbol::new(sigma, r.arity));
        }
        Ok(symbols)
    }

    /// The classical top-down transducer of an alphabetic transducer.
    pub fn to_tdtt(&self) -> Result<Tdtt> {
        let symbols = self.alphabetic_symbols()?;
        let rules = self
            .rules
            .iter()
            .zip(symbols)
            .map(|(r, input)| {
                fn conv(u: &Term<FnTerm, Call>) -> Term<RankedSymbol, Call> {
                    match u {
                        Term::Leaf(c) => Term::Leaf(*c),
                        Term::Node(f, cs) => {
                            let b = f.is_constant().expect("alphabetic rules use constants").clone();
                            Term::Node(RankedSymbol::new(b, cs.len()), cs.iter().map(conv).collect())
                        }
                    }
                }
                TdttRule {
                    state: r.state,
                    input,
                    rhs: conv(&r.rhs),
                }
            })
            .collect();
        Ok(Tdtt {
            states: self.states.clone(),
            initial: self.initial,
            rules,
        })
    }

    /// The alphabetic transducer of a classical one: guard `(eq σ)` and
    /// constant functions.
    pub fn from_tdtt(tdtt: &Tdtt, in_theory: Theory, out_theory: Theory, k: usize) -> Result<Stt> {
        let rules = tdtt
            .rules
            .iter()
            .map(|r| SttRule {
                state: r.state,
                arity: r.input.rank,
                guard: Predicate::eq(r.input.name.clone()),
                rhs: r.rhs.map(&mut |s: &RankedSymbol| FnTerm::Const(s.name.clone()), &mut |c: &Call| *c),
            })
            .collect();
        Stt::new(k, in_theory, out_theory, tdtt.states.clone(), tdtt.initial, rules)
    }
}

fn identity_rules(a: &Sta) -> Vec<SttRule> {
    a.rules
        .iter()
        .map(|r| SttRule {
            state: r.rhs,
            arity: r.lhs.len(),
            guard: r.guard.clone(),
            rhs: Term::Node(
                FnTerm::Identity,
                r.lhs
                    .iter()
                    .enumerate()
                    .map(|(i, &q)| Term::Leaf(Call { state: q, var: i + 1 }))
                    .collect(),
            ),
        })
        .collect()
}

/// The transducer computing the identity on `L(A)`: a fresh initial state
/// carries a copy of the rules of every final state.
pub fn identity_stt(a: &Sta) -> Stt {
    let mut taken: HashSet<String> = a.states.iter().cloned().collect();
    let init = fresh_name(&mut taken, "init");
    let mut states = a.states.clone();
    states.push(init);
    let q0 = states.len() - 1;
    let mut rules = identity_rules(a);
    let copies: Vec<SttRule> = rules
        .iter()
        .filter(|r| a.finals.contains(&r.state))
        .map(|r| SttRule { state: q0, ..r.clone() })
        .collect();
    rules.extend(copies);
    Stt::new(a.k, a.theory.clone(), a.theory.clone(), states, q0, rules).expect("built from a valid automaton")
}

/// The transducer computing the identity on `L(A, q)`.
pub fn identity_stt_at(a: &Sta, q: usize) -> Stt {
    Stt::new(a.k, a.theory.clone(), a.theory.clone(), a.states.clone(), q, identity_rules(a))
        .expect("built from a valid automaton")
}

pub(crate) fn write_rhs(out: &mut String, u: &Term<FnTerm, Call>, states: &[String]) {
    match u {
        Term::Leaf(c) => out.push_str(&format!("(call {} {})", states[c.state], c.var)),
        Term::Node(f, cs) => {
            out.push_str(&format!("(fn {f}"));
            for c in cs {
                out.push(' ');
                write_rhs(out, c, states);
            }
            out.push(')');
        }
    }
}

impl fmt::Display for Stt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "(stt :in-theory {} :out-theory {} :k {})",
            self.in_theory, self.out_theory, self.k
        )?;
        write!(f, "(states")?;
        for s in &self.states {
            write!(f, " {s}")?;
        }
        writeln!(f, ")")?;
        writeln!(f, "(init {})", self.states[self.initial])?;
        for r in &self.rules {
            writeln!(f, "{}", self.rule_text(r))?;
        }
        Ok(())
    }
}
