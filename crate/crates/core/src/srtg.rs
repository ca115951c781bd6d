//! Symbolic regular tree grammars.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::classical::{Rtg, RtgRule};
use crate::error::{Error, Result};
use crate::sta::Sta;
use crate::theory::{Label, Predicate, Theory};
use crate::tree::{sample_label, RankedSymbol, Relabeling, Term, Tree};

/// A rule `q → u` where `u` has predicate nodes and state leaves.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SrtgRule {
    pub lhs: usize,
    pub rhs: Term<Predicate, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Srtg {
    pub k: usize,
    pub theory: Theory,
    pub states: Vec<String>,
    pub initial: usize,
    pub rules: Vec<SrtgRule>,
}

/// A sentential form: labels with state leaves.
pub type Sentential = Term<Label, usize>;

fn to_tree(t: &Sentential) -> Option<Tree> {
    match t {
        Term::Leaf(_) => None,
        Term::Node(a, cs) => {
            let kids = cs.iter().map(to_tree).collect::<Option<Vec<_>>>()?;
            Some(Tree::new(a.clone(), kids))
        }
    }
}

impl Srtg {
    pub fn new(k: usize, theory: Theory, states: Vec<String>, initial: usize, rules: Vec<SrtgRule>) -> Result<Srtg> {
        let n = states.len();
        if initial >= n {
            return Err(Error::format("unknown initial state"));
        }
        let distinct: HashSet<&String> = states.iter().collect();
        if distinct.len() != n {
            return Err(Error::format("duplicate state name"));
        }
        for r in &rules {
            if r.lhs >= n || r.rhs.leaves().iter().any(|&&q| q >= n) {
                return Err(Error::format("rule refers to an unknown state"));
            }
            let rank = r.rhs.rank();
            if rank > k {
                return Err(Error::format(format!("rule right-hand side has rank {rank} > k = {k}")));
            }
        }
        Ok(Srtg {
            k,
            theory,
            states,
            initial,
            rules,
        })
    }

    /// The canonical grammar with an empty language.
    pub fn empty(theory: Theory, k: usize, initial_name: &str) -> Srtg {
        Srtg {
            k,
            theory,
            states: vec![initial_name.to_string()],
            initial: 0,
            rules: Vec::new(),
        }
    }

    /// Generates every tree of rank at most `k` over the universe.
    pub fn universal(theory: Theory, k: usize) -> Srtg {
        let rules = (0..=k)
            .map(|l| SrtgRule {
                lhs: 0,
                rhs: Term::Node(Predicate::True, vec![Term::Leaf(0); l]),
            })
            .collect();
        Srtg {
            k,
            theory,
            states: vec!["all".into()],
            initial: 0,
            rules,
        }
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    fn instantiate(&self, rhs: &Term<Predicate, usize>) -> Option<Sentential> {
        match rhs {
            Term::Leaf(q) => Some(Term::Leaf(*q)),
            Term::Node(phi, cs) => {
                let a = self.theory.satisfiable(phi)?;
                let kids = cs.iter().map(|c| self.instantiate(c)).collect::<Option<Vec<_>>>()?;
                Some(Term::Node(a, kids))
            }
        }
    }

    /// All one-step successors of a sentential form, with each predicate
    /// instantiated by its canonical witness. Rules with an unsatisfiable
    /// predicate are skipped.
    pub fn derive_step(&self, form: &Sentential) -> Vec<Sentential> {
        fn go(g: &Srtg, t: &Sentential, out: &mut Vec<Sentential>) {
            match t {
                Term::Leaf(q) => {
                    for r in g.rules.iter().filter(|r| r.lhs == *q) {
                        if let Some(u) = g.instantiate(&r.rhs) {
                            out.push(u);
                        }
                    }
                }
                Term::Node(a, cs) => {
                    for (i, c) in cs.iter().enumerate() {
                        let mut sub = Vec::new();
                        go(g, c, &mut sub);
                        for s in sub {
                            let mut kids = cs.clone();
                            kids[i] = s;
                            out.push(Term::Node(a.clone(), kids));
                        }
                    }
                }
            }
        }
        let mut out = Vec::new();
        go(self, form, &mut out);
        out
    }

    /// A random derivation from the initial state: rules are chosen uniformly
    /// among the feasible ones, labels among the first `spread` witnesses of
    /// each predicate (`spread = 1` gives canonical witnesses). A derivation
    /// that would exceed `max_depth` is abandoned and yields `None`.
    pub fn sample<R: Rng>(&self, rng: &mut R, max_depth: usize, spread: usize) -> Option<Tree> {
        let feasible: Vec<Vec<&SrtgRule>> = (0..self.states.len())
            .map(|q| {
                self.rules
                    .iter()
                    .filter(|r| r.lhs == q && r.rhs.nodes().iter().all(|p| self.theory.is_sat(p)))
                    .collect()
            })
            .collect();
        fn expand<R: Rng>(
            g: &Srtg,
            feasible: &[Vec<&SrtgRule>],
            q: usize,
            depth: usize,
            max_depth: usize,
            spread: usize,
            rng: &mut R,
        ) -> Option<Tree> {
            let rule = feasible[q].choose(rng)?;
            build(g, feasible, &rule.rhs, depth, max_depth, spread, rng)
        }
        fn build<R: Rng>(
            g: &Srtg,
            feasible: &[Vec<&SrtgRule>],
            u: &Term<Predicate, usize>,
            depth: usize,
            max_depth: usize,
            spread: usize,
            rng: &mut R,
        ) -> Option<Tree> {
            match u {
                Term::Leaf(q) => expand(g, feasible, *q, depth, max_depth, spread, rng),
                Term::Node(phi, cs) => {
                    if depth >= max_depth {
                        return None;
                    }
                    let a = sample_label(&g.theory, phi, spread, rng)?;
                    let mut kids = Vec::with_capacity(cs.len());
                    for c in cs {
                        kids.push(build(g, feasible, c, depth + 1, max_depth, spread, rng)?);
                    }
                    Some(Tree::new(a, kids))
                }
            }
        }
        expand(self, &feasible, self.initial, 0, max_depth, spread, rng)
    }

    /// Drops every rule containing an unsatisfiable predicate.
    pub fn clean(&self) -> Srtg {
        Srtg {
            rules: self
                .rules
                .iter()
                .filter(|r| r.rhs.nodes().iter().all(|p| self.theory.is_sat(p)))
                .cloned()
                .collect(),
            ..self.clone()
        }
    }

    pub fn is_clean(&self) -> bool {
        self.rules
            .iter()
            .all(|r| r.rhs.nodes().iter().all(|p| self.theory.is_sat(p)))
    }

    /// Every rule has the form `q → φ(q1, …, ql)`.
    pub fn is_normal_form(&self) -> bool {
        self.rules.iter().all(|r| match &r.rhs {
            Term::Node(_, cs) => cs.iter().all(|c| matches!(c, Term::Leaf(_))),
            Term::Leaf(_) => false,
        })
    }

    /// Every state is reachable and productive (or the grammar is the
    /// canonical empty one).
    pub fn is_reduced(&self) -> bool {
        self.to_rtg().0.is_reduced()
    }

    /// A classical grammar over symbols `[φ, l]` and the relabeling mapping
    /// each symbol back to its predicate.
    pub fn to_rtg(&self) -> (Rtg, Relabeling) {
        let mut symbols: BTreeMap<(usize, Predicate), RankedSymbol> = BTreeMap::new();
        let mut order: Vec<(RankedSymbol, Predicate)> = Vec::new();
        fn conv(
            t: &Term<Predicate, usize>,
            symbols: &mut BTreeMap<(usize, Predicate), RankedSymbol>,
            order: &mut Vec<(RankedSymbol, Predicate)>,
        ) -> Term<RankedSymbol, usize> {
            match t {
                Term::Leaf(q) => Term::Leaf(*q),
                Term::Node(phi, cs) => {
                    let key = (cs.len(), phi.clone());
                    let next = symbols.len();
                    let sym = symbols
                        .entry(key)
                        .or_insert_with(|| {
                            let s = RankedSymbol::new(Label::sym(&format!("s{next}")), cs.len());
                            order.push((s.clone(), phi.clone()));
                            s
                        })
                        .clone();
                    Term::Node(sym, cs.iter().map(|c| conv(c, symbols, order)).collect())
                }
            }
        }
        let rules = self
            .rules
            .iter()
            .map(|r| RtgRule {
                lhs: r.lhs,
                rhs: conv(&r.rhs, &mut symbols, &mut order),
            })
            .collect();
        let rtg = Rtg {
            states: self.states.clone(),
            alphabet: order.iter().map(|(s, _)| s.clone()).collect(),
            initial: self.initial,
            rules,
        };
        (rtg, Relabeling::new(self.theory.clone(), order.into_iter().collect()))
    }

    /// The grammar generating `τ(L(G'))`.
    pub fn from_rtg(rtg: &Rtg, tau: &Relabeling, k: usize) -> Result<Srtg> {
        let max = rtg.alphabet.iter().map(|s| s.rank).max().unwrap_or(0);
        if max > k {
            return Err(Error::Bound { rank: max, k });
        }
        let mut rules = Vec::with_capacity(rtg.rules.len());
        for r in &rtg.rules {
            let rhs = r.rhs.try_map(
                &mut |s: &RankedSymbol| {
                    tau.map.get(s).cloned().ok_or_else(|| {
                        Error::format(format!("symbol {s} has no predicate in the relabeling"))
                    })
                },
                &mut |q: &usize| Ok(Term::Leaf(*q)),
            )?;
            rules.push(SrtgRule { lhs: r.lhs, rhs });
        }
        Srtg::new(k, tau.theory.clone(), rtg.states.clone(), rtg.initial, rules)
    }

    /// Clean, reduced, normal-form equivalent grammar.
    pub fn normalize(&self) -> Srtg {
        let (rtg, tau) = self.clean().to_rtg();
        Srtg::from_rtg(&rtg.normalize(), &tau, self.k).expect("ranks are bounded by k")
    }

    pub fn to_sta(&self) -> Sta {
        let (rtg, tau) = self.to_rtg();
        Sta::from_fta(&rtg.to_fta(), &tau, self.k).expect("ranks are bounded by k")
    }

    pub fn from_sta(sta: &Sta) -> Srtg {
        let (fta, tau) = sta.to_fta();
        Srtg::from_rtg(&fta.to_rtg(), &tau, sta.k).expect("ranks are bounded by k")
    }

    pub fn member(&self, t: &Tree) -> Result<bool> {
        self.to_sta().member(t)
    }

    /// A member of the language, if any.
    pub fn find_member(&self) -> Option<Tree> {
        self.to_sta().find_member()
    }

    /// Fully instantiated sentential forms reachable in at most `steps`
    /// derivation steps (canonical witnesses only).
    pub fn derive_terminal(&self, steps: usize) -> BTreeSet<Tree> {
        let mut frontier = vec![Term::Leaf(self.initial)];
        let mut out = BTreeSet::new();
        for _ in 0..steps {
            let mut next = Vec::new();
            for f in &frontier {
                for s in self.derive_step(f) {
                    match to_tree(&s) {
                        Some(t) => {
                            out.insert(t);
                        }
                        None => next.push(s),
                    }
                }
            }
            frontier = next;
        }
        out
    }
}

fn write_rhs(f: &mut fmt::Formatter<'_>, t: &Term<Predicate, usize>, states: &[String]) -> fmt::Result {
    match t {
        Term::Leaf(q) => write!(f, "(state {})", states[*q]),
        Term::Node(p, cs) => {
            write!(f, "(pred {p}")?;
            for c in cs {
                write!(f, " ")?;
                write_rhs(f, c, states)?;
            }
            write!(f, ")")
        }
    }
}

impl fmt::Display for Srtg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "(srtg :theory {} :k {})", self.theory, self.k)?;
        write!(f, "(states")?;
        for s in &self.states {
            write!(f, " {s}")?;
        }
        writeln!(f, ")")?;
        writeln!(f, "(init {})", self.states[self.initial])?;
        for r in &self.rules {
            write!(f, "(rule {} ", self.states[r.lhs])?;
            write_rhs(f, &r.rhs, &self.states)?;
            writeln!(f, ")")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn t(s: &str) -> Tree {
        s.parse().unwrap()
    }

    fn node(p: Predicate, cs: Vec<Term<Predicate, usize>>) -> Term<Predicate, usize> {
        Term::Node(p, cs)
    }

    #[test]
    fn derive_uses_canonical_witness() {
        let g = Srtg::new(
            1,
            Theory::Integer,
            vec!["q0".into()],
            0,
            vec![SrtgRule { lhs: 0, rhs: node(Predicate::div(2), vec![]) }],
        )
        .unwrap();
        let succ = g.derive_step(&Term::Leaf(0));
        assert_eq!(succ, vec![Term::Node(Label::Int(0), vec![])]);
        let none = Srtg::empty(Theory::Integer, 1, "q0");
        assert!(none.derive_step(&Term::Leaf(0)).is_empty());
    }

    #[test]
    fn normalize_flattens_nested_rules() {
        // q0 → (div 2)((div 3)(q1), q1); q1 → (range 1 4)(); q2 → true() (unreachable)
        let g = Srtg::new(
            2,
            Theory::Integer,
            vec!["q0".into(), "q1".into(), "q2".into()],
            0,
            vec![
                SrtgRule {
                    lhs: 0,
                    rhs: node(Predicate::div(2), vec![node(Predicate::div(3), vec![Term::Leaf(1)]), Term::Leaf(1)]),
                },
                SrtgRule { lhs: 1, rhs: node(Predicate::range(Some(1), Some(4)), vec![]) },
                SrtgRule { lhs: 2, rhs: node(Predicate::True, vec![]) },
                SrtgRule { lhs: 1, rhs: node(Predicate::False, vec![]) },
            ],
        )
        .unwrap();
        let n = g.normalize();
        assert!(n.is_clean() && n.is_normal_form() && n.is_reduced());
        assert_eq!(n.states.len(), 3);
        for (s, expect) in [("4(6(1),3)", true), ("4(5(1),3)", false), ("4(6(1),5)", false), ("4(6,3)", false)] {
            assert_eq!(n.member(&t(s)).unwrap(), expect, "{s}");
            assert_eq!(g.member(&t(s)).unwrap(), expect, "{s}");
        }
    }

    #[test]
    fn sampling_is_sound_and_seeded() {
        let g = Srtg::universal(Theory::Natural, 2);
        let sta = g.to_sta();
        let mut rng = StdRng::seed_from_u64(7);
        let mut seen = 0;
        for _ in 0..200 {
            if let Some(x) = g.sample(&mut rng, 4, 5) {
                assert!(sta.member(&x).unwrap());
                assert!(x.depth() <= 4);
                seen += 1;
            }
        }
        assert!(seen > 0);
        let a: Vec<_> = (0..5).map(|_| g.sample(&mut StdRng::seed_from_u64(3), 4, 5)).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn empty_grammar_normalizes_to_canonical() {
        let g = Srtg::new(
            1,
            Theory::Integer,
            vec!["q0".into()],
            0,
            vec![SrtgRule { lhs: 0, rhs: node(Predicate::True, vec![Term::Leaf(0)]) }],
        )
        .unwrap();
        let n = g.normalize();
        assert!(n.rules.is_empty());
        assert_eq!(n.find_member(), None);
    }
}
