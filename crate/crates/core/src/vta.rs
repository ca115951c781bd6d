//! Variable tree automata: a finite tree automaton whose symbols are split
//! into constants, bound variables and free variables over a ranked universe.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::classical::Fta;
use crate::error::{Error, Result};
use crate::theory::{Label, Predicate};
use crate::tree::{RankedSymbol, Tree};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vta {
    pub fta: Fta,
    /// Membership predicate of `V_l` per rank; a missing rank means `V_l = ∅`.
    pub universe: BTreeMap<usize, Predicate>,
    pub a: BTreeSet<RankedSymbol>,
    pub z: BTreeSet<RankedSymbol>,
    pub y: BTreeSet<RankedSymbol>,
}

/// A partial assignment of bound variables plus the labels read through
/// free variables, each with its rank.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
struct Binding {
    z: BTreeMap<RankedSymbol, Label>,
    y: BTreeSet<(usize, Label)>,
}

/// How many spare labels of `V_l` we look for when checking that unbound
/// variables can still be assigned.
const SPARE_INTS: i64 = 256;

impl Vta {
    pub fn new(
        fta: Fta,
        universe: BTreeMap<usize, Predicate>,
        a: BTreeSet<RankedSymbol>,
        z: BTreeSet<RankedSymbol>,
        y: BTreeSet<RankedSymbol>,
    ) -> Result<Vta> {
        let v = Vta {
            fta,
            universe,
            a,
            z,
            y,
        };
        v.validate()?;
        Ok(v)
    }

    pub fn in_universe(&self, rank: usize, label: &Label) -> bool {
        self.universe.get(&rank).is_some_and(|p| p.holds(label))
    }

    /// Checks that `(A, Z, Y)` is a valid partitioning of the alphabet.
    pub fn validate(&self) -> Result<()> {
        for s in &self.a {
            if !self.in_universe(s.rank, &s.name) {
                return Err(Error::format(format!("constant {s} is not in the universe")));
            }
        }
        for s in self.z.iter().chain(&self.y) {
            if self.in_universe(s.rank, &s.name) {
                return Err(Error::format(format!(
                    "variable {s} belongs to the universe, so it must be a constant"
                )));
            }
        }
        for s in &self.a {
            if self.z.contains(s) || self.y.contains(s) {
                return Err(Error::format(format!("symbol {s} is in more than one class")));
            }
        }
        if let Some(s) = self.z.intersection(&self.y).next() {
            return Err(Error::format(format!("symbol {s} is in more than one class")));
        }
        let classes: BTreeSet<&RankedSymbol> = self.a.iter().chain(&self.z).chain(&self.y).collect();
        let alphabet: BTreeSet<&RankedSymbol> = self.fta.alphabet.iter().collect();
        if classes != alphabet {
            return Err(Error::format(
                "the alphabet must be the union of the constant and variable classes",
            ));
        }
        let mut per_rank: BTreeMap<usize, usize> = BTreeMap::new();
        for s in &self.y {
            let n = per_rank.entry(s.rank).or_default();
            *n += 1;
            if *n > 1 {
                return Err(Error::format(format!("more than one free variable of rank {}", s.rank)));
            }
        }
        Ok(())
    }

    fn is_constant(&self, rank: usize, label: &Label) -> bool {
        self.a.contains(&RankedSymbol::new(label.clone(), rank))
    }

    /// Is `t` obtained from a tree of the inner automaton by some valid
    /// assignment of the variables?
    pub fn member(&self, t: &Tree) -> Result<bool> {
        self.check(t)?;
        let start = vec![Binding::default()];
        for &q in &self.fta.finals {
            for b in self.solve(t, q, &start) {
                if self.complete(&b) {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    fn check(&self, t: &Tree) -> Result<()> {
        let l = t.children().len();
        if !self.in_universe(l, t.label()) {
            return Err(Error::Domain(format!("{} (rank {l})", t.label())));
        }
        t.children().iter().try_for_each(|c| self.check(c))
    }

    /// Bindings extending some of `from` under which state `q` accepts `t`.
    fn solve(&self, t: &Tree, q: usize, from: &[Binding]) -> Vec<Binding> {
        let l = t.children().len();
        let label = t.label();
        let mut out = BTreeSet::new();
        for tr in self.fta.transitions.iter().filter(|tr| tr.target == q && tr.symbol.rank == l) {
            let sym = &tr.symbol;
            let mut current: Vec<Binding> = Vec::new();
            for b in from {
                if self.a.contains(sym) {
                    if sym.name == *label {
                        current.push(b.clone());
                    }
                } else if self.z.contains(sym) {
                    if self.is_constant(l, label) {
                        continue;
                    }
                    match b.z.get(sym) {
                        Some(bound) if bound == label => current.push(b.clone()),
                        Some(_) => {}
                        None => {
                            let taken = b.z.iter().any(|(s, v)| s.rank == l && v == label);
                            if !taken {
                                let mut nb = b.clone();
                                nb.z.insert(sym.clone(), label.clone());
                                current.push(nb);
                            }
                        }
                    }
                } else if self.y.contains(sym) && !self.is_constant(l, label) {
                    let mut nb = b.clone();
                    nb.y.insert((l, label.clone()));
                    current.push(nb);
                }
            }
            for (c, &qc) in t.children().iter().zip(&tr.children) {
                if current.is_empty() {
                    break;
                }
                current = self.solve(c, qc, &current);
            }
            out.extend(current);
        }
        out.into_iter().collect()
    }

    /// Free-variable labels avoid the bound labels, and every unbound
    /// variable can still take a distinct spare label.
    fn complete(&self, b: &Binding) -> bool {
        for (l, a) in &b.y {
            if b.z.iter().any(|(s, v)| s.rank == *l && v == a) {
                return false;
            }
        }
        let ranks: BTreeSet<usize> = self.z.iter().map(|s| s.rank).collect();
        for l in ranks {
            let unbound = self.z.iter().filter(|s| s.rank == l && !b.z.contains_key(*s)).count();
            if unbound == 0 {
                continue;
            }
            let used: BTreeSet<&Label> = b
                .z
                .iter()
                .filter(|(s, _)| s.rank == l)
                .map(|(_, v)| v)
                .chain(b.y.iter().filter(|(r, _)| *r == l).map(|(_, v)| v))
                .collect();
            let spare = self
                .candidates(l)
                .into_iter()
                .filter(|c| self.in_universe(l, c) && !self.is_constant(l, c) && !used.contains(c))
                .take(unbound)
                .count();
            if spare < unbound {
                return false;
            }
        }
        true
    }

    fn candidates(&self, l: usize) -> Vec<Label> {
        let mut out: Vec<Label> = self
            .universe
            .get(&l)
            .map(|p| p.mentioned_labels().into_iter().collect())
            .unwrap_or_default();
        for i in 0..=SPARE_INTS {
            out.push(Label::Int(i));
            if i > 0 {
                out.push(Label::Int(-i));
            }
        }
        out.extend((0..self.z.len()).map(|i| Label::sym(&format!("_spare{i}"))));
        out.sort();
        out.dedup();
        out
    }
}

impl fmt::Display for Vta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "(vta)")?;
        writeln!(f, "{}", self.fta)?;
        write!(f, "(universe")?;
        for (l, p) in &self.universe {
            write!(f, " (rank {l} {p})")?;
        }
        writeln!(f, ")")?;
        write!(f, "(partition")?;
        for (tag, set) in [("a", &self.a), ("z", &self.z), ("y", &self.y)] {
            write!(f, " ({tag}")?;
            for s in set {
                write!(f, " {s}")?;
            }
            write!(f, ")")?;
        }
        writeln!(f, ")")
    }
}
