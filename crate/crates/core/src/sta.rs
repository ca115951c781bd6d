//! Symbolic k-bounded tree automata.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::classical::{fresh_name, Fta, FtaTransition};
use crate::error::{Error, Result};
use crate::theory::{Label, Predicate, Theory};
use crate::tree::{RankedSymbol, Relabeling, Tree};

/// A rule `(q1 … ql, φ, q)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StaRule {
    pub lhs: Vec<usize>,
    pub guard: Predicate,
    pub rhs: usize,
}

/// A symbolic bottom-up tree automaton over trees of rank at most `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sta {
    pub k: usize,
    pub theory: Theory,
    pub states: Vec<String>,
    pub finals: BTreeSet<usize>,
    pub rules: Vec<StaRule>,
}

impl Sta {
    pub fn new(
        k: usize,
        theory: Theory,
        states: Vec<String>,
        finals: BTreeSet<usize>,
        rules: Vec<StaRule>,
    ) -> Result<Sta> {
        let n = states.len();
        let distinct: HashSet<&String> = states.iter().collect();
        if distinct.len() != n {
            return Err(Error::format("duplicate state name"));
        }
        for r in &rules {
            if r.lhs.len() > k {
                return Err(Error::format(format!(
                    "rule with {} child states exceeds k = {k}",
                    r.lhs.len()
                )));
            }
            if r.rhs >= n || r.lhs.iter().any(|&q| q >= n) {
                return Err(Error::format("rule refers to an unknown state"));
            }
        }
        if finals.iter().any(|&q| q >= n) {
            return Err(Error::format("unknown final state"));
        }
        Ok(Sta {
            k,
            theory,
            states,
            finals,
            rules,
        })
    }

    /// Accepts every tree of rank at most `k` over the theory's universe.
    pub fn universal(theory: Theory, k: usize) -> Sta {
        let rules = (0..=k)
            .map(|l| StaRule {
                lhs: vec![0; l],
                guard: Predicate::True,
                rhs: 0,
            })
            .collect();
        Sta {
            k,
            theory,
            states: vec!["all".into()],
            finals: BTreeSet::from([0]),
            rules,
        }
    }

    /// Accepts nothing.
    pub fn empty_language(theory: Theory, k: usize) -> Sta {
        Sta {
            k,
            theory,
            states: vec!["none".into()],
            finals: BTreeSet::new(),
            rules: Vec::new(),
        }
    }

    /// Accepts exactly `t`.
    pub fn singleton(theory: Theory, k: usize, t: &Tree) -> Result<Sta> {
        t.check_bound(k)?;
        let mut states = Vec::new();
        let mut rules = Vec::new();
        fn go(t: &Tree, path: String, states: &mut Vec<String>, rules: &mut Vec<StaRule>) -> usize {
            let lhs = t
                .children()
                .iter()
                .enumerate()
                .map(|(i, c)| go(c, format!("{path}.{}", i + 1), states, rules))
                .collect();
            states.push(path);
            let q = states.len() - 1;
            rules.push(StaRule {
                lhs,
                guard: Predicate::eq(t.label().clone()),
                rhs: q,
            });
            q
        }
        let root = go(t, "p".into(), &mut states, &mut rules);
        Sta::new(k, theory, states, BTreeSet::from([root]), rules)
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    /// Same automaton with a different set of final states.
    pub fn with_finals(&self, finals: BTreeSet<usize>) -> Sta {
        Sta {
            finals,
            ..self.clone()
        }
    }

    fn check_tree(&self, t: &Tree) -> Result<()> {
        t.check_bound(self.k)?;
        let mut stack = vec![t];
        while let Some(n) = stack.pop() {
            self.theory.check(n.label())?;
            stack.extend(n.children());
        }
        Ok(())
    }

    fn run_unchecked(&self, t: &Tree) -> BTreeSet<usize> {
        let child_sets: Vec<BTreeSet<usize>> = t.children().iter().map(|c| self.run_unchecked(c)).collect();
        let l = child_sets.len();
        self.rules
            .iter()
            .filter(|r| {
                r.lhs.len() == l
                    && r.lhs.iter().zip(&child_sets).all(|(q, s)| s.contains(q))
                    && r.guard.holds(t.label())
            })
            .map(|r| r.rhs)
            .collect()
    }

    /// The set of states reaching the root of `t`.
    pub fn run(&self, t: &Tree) -> Result<BTreeSet<usize>> {
        self.check_tree(t)?;
        Ok(self.run_unchecked(t))
    }

    pub fn member(&self, t: &Tree) -> Result<bool> {
        Ok(self.run(t)?.iter().any(|q| self.finals.contains(q)))
    }

    /// Per state, a witness tree in its language (least fixpoint; the first
    /// rule in order wins for each newly productive state).
    pub fn state_witnesses(&self) -> Vec<Option<Tree>> {
        let mut wit: Vec<Option<Tree>> = vec![None; self.states.len()];
        let mut guard_wit: Vec<Option<Option<Label>>> = vec![None; self.rules.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for (i, r) in self.rules.iter().enumerate() {
                if wit[r.rhs].is_some() || !r.lhs.iter().all(|&q| wit[q].is_some()) {
                    continue;
                }
                let a = guard_wit[i]
                    .get_or_insert_with(|| self.theory.satisfiable(&r.guard))
                    .clone();
                if let Some(a) = a {
                    let children = r.lhs.iter().map(|&q| wit[q].clone().unwrap()).collect();
                    wit[r.rhs] = Some(Tree::new(a, children));
                    changed = true;
                }
            }
        }
        wit
    }

    /// `None` iff the language is empty; otherwise a member.
    pub fn find_member(&self) -> Option<Tree> {
        let wit = self.state_witnesses();
        self.finals.iter().find_map(|&q| wit[q].clone())
    }

    pub fn is_empty(&self) -> bool {
        self.find_member().is_none()
    }

    /// Embeds into a larger bound.
    pub fn lift(&self, k: usize) -> Result<Sta> {
        if k < self.k {
            return Err(Error::Bound { rank: self.k, k });
        }
        Ok(Sta { k, ..self.clone() })
    }

    /// Deterministic complete automaton by subset construction over the
    /// minterms of the guards of each arity. Returns it with the subset of
    /// original states behind each new state.
    pub fn determinize_subsets(&self) -> (Sta, Vec<BTreeSet<usize>>) {
        let k = self.k;
        let mut guards: Vec<Vec<Predicate>> = vec![Vec::new(); k + 1];
        let mut rule_guard: Vec<usize> = Vec::with_capacity(self.rules.len());
        for r in &self.rules {
            let gs = &mut guards[r.lhs.len()];
            let gi = match gs.iter().position(|g| *g == r.guard) {
                Some(i) => i,
                None => {
                    gs.push(r.guard.clone());
                    gs.len() - 1
                }
            };
            rule_guard.push(gi);
        }
        let minterms: Vec<_> = guards.iter().map(|gs| self.theory.minterms(gs)).collect();

        let mut subsets: Vec<BTreeSet<usize>> = Vec::new();
        let mut index: HashMap<BTreeSet<usize>, usize> = HashMap::new();
        let mut intern = |s: BTreeSet<usize>, subsets: &mut Vec<BTreeSet<usize>>| -> usize {
            *index.entry(s.clone()).or_insert_with(|| {
                subsets.push(s);
                subsets.len() - 1
            })
        };
        let mut rules = Vec::new();
        let target = |tuple: &[usize], signs: &[bool], subsets: &[BTreeSet<usize>]| -> BTreeSet<usize> {
            self.rules
                .iter()
                .zip(&rule_guard)
                .filter(|(r, &gi)| {
                    r.lhs.len() == tuple.len()
                        && signs[gi]
                        && r.lhs.iter().zip(tuple).all(|(q, &s)| subsets[s].contains(q))
                })
                .map(|(r, _)| r.rhs)
                .collect()
        };
        for m in &minterms[0] {
            let s = target(&[], &m.signs, &subsets);
            let id = intern(s, &mut subsets);
            rules.push(StaRule {
                lhs: Vec::new(),
                guard: m.predicate.clone(),
                rhs: id,
            });
        }
        let mut done = 0usize;
        while done < subsets.len() {
            let n = subsets.len();
            for (l, terms) in minterms.iter().enumerate().take(k + 1).skip(1) {
                let mut tuple = vec![0usize; l];
                loop {
                    if tuple.iter().any(|&s| s >= done) {
                        for m in terms {
                            let s = target(&tuple, &m.signs, &subsets);
                            let id = intern(s, &mut subsets);
                            rules.push(StaRule {
                                lhs: tuple.clone(),
                                guard: m.predicate.clone(),
                                rhs: id,
                            });
                        }
                    }
                    // odometer over 0..n
                    let mut i = 0;
                    while i < l {
                        tuple[i] += 1;
                        if tuple[i] < n {
                            break;
                        }
                        tuple[i] = 0;
                        i += 1;
                    }
                    if i == l {
                        break;
                    }
                }
            }
            done = n;
        }
        let names = subsets
            .iter()
            .map(|s| {
                let parts: Vec<&str> = s.iter().map(|&q| self.states[q].as_str()).collect();
                format!("{{{}}}", parts.join(","))
            })
            .collect();
        let finals = subsets
            .iter()
            .enumerate()
            .filter(|(_, s)| s.iter().any(|q| self.finals.contains(q)))
            .map(|(i, _)| i)
            .collect();
        let sta = Sta {
            k,
            theory: self.theory.clone(),
            states: names,
            finals,
            rules,
        };
        (sta, subsets)
    }

    pub fn determinize(&self) -> Sta {
        self.determinize_subsets().0
    }

    /// `T^(k) \ L(A)` for `k ≥ self.k`.
    pub fn complement(&self, k: usize) -> Result<Sta> {
        let (det, subsets) = self.lift(k)?.determinize_subsets();
        let finals = subsets
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.iter().any(|q| self.finals.contains(q)))
            .map(|(i, _)| i)
            .collect();
        Ok(det.with_finals(finals))
    }

    fn same_theory(&self, other: &Sta) -> Result<()> {
        if self.theory != other.theory {
            return Err(Error::type_error(format!(
                "theories differ: {} and {}",
                self.theory, other.theory
            )));
        }
        Ok(())
    }

    /// Product automaton restricted to bottom-up reachable pairs.
    pub fn intersect(&self, other: &Sta) -> Result<Sta> {
        self.same_theory(other)?;
        let k = self.k.max(other.k);
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut combos: Vec<(usize, usize, Predicate)> = Vec::new();
        for (i, ra) in self.rules.iter().enumerate() {
            for (j, rb) in other.rules.iter().enumerate() {
                if ra.lhs.len() != rb.lhs.len() {
                    continue;
                }
                let g = Predicate::and(ra.guard.clone(), rb.guard.clone());
                if self.theory.is_sat(&g) {
                    combos.push((i, j, g));
                }
            }
        }
        let mut rules = Vec::new();
        let mut used = vec![false; combos.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for (c, (i, j, g)) in combos.iter().enumerate() {
                if used[c] {
                    continue;
                }
                let (ra, rb) = (&self.rules[*i], &other.rules[*j]);
                let kids: Option<Vec<usize>> = ra
                    .lhs
                    .iter()
                    .zip(&rb.lhs)
                    .map(|(&a, &b)| index.get(&(a, b)).copied())
                    .collect();
                let Some(kids) = kids else { continue };
                let key = (ra.rhs, rb.rhs);
                let target = match index.get(&key) {
                    Some(&t) => t,
                    None => {
                        pairs.push(key);
                        index.insert(key, pairs.len() - 1);
                        pairs.len() - 1
                    }
                };
                used[c] = true;
                changed = true;
                rules.push(StaRule {
                    lhs: kids,
                    guard: g.clone(),
                    rhs: target,
                });
            }
        }
        let mut taken = HashSet::new();
        let states = pairs
            .iter()
            .map(|&(a, b)| fresh_name(&mut taken, &format!("<{},{}>", self.states[a], other.states[b])))
            .collect::<Vec<_>>();
        let finals = pairs
            .iter()
            .enumerate()
            .filter(|(_, (a, b))| self.finals.contains(a) && other.finals.contains(b))
            .map(|(i, _)| i)
            .collect();
        let mut out = Sta {
            k,
            theory: self.theory.clone(),
            states,
            finals,
            rules,
        };
        if out.states.is_empty() {
            out = Sta::empty_language(self.theory.clone(), k);
        }
        Ok(out)
    }

    /// Disjoint union.
    pub fn union(&self, other: &Sta) -> Result<Sta> {
        self.same_theory(other)?;
        let k = self.k.max(other.k);
        let n = self.states.len();
        let mut taken = HashSet::new();
        let mut states = Vec::new();
        for s in &self.states {
            states.push(fresh_name(&mut taken, &format!("l.{s}")));
        }
        for s in &other.states {
            states.push(fresh_name(&mut taken, &format!("r.{s}")));
        }
        let mut rules = self.rules.clone();
        rules.extend(other.rules.iter().map(|r| StaRule {
            lhs: r.lhs.iter().map(|q| q + n).collect(),
            guard: r.guard.clone(),
            rhs: r.rhs + n,
        }));
        let finals = self
            .finals
            .iter()
            .copied()
            .chain(other.finals.iter().map(|q| q + n))
            .collect();
        Ok(Sta {
            k,
            theory: self.theory.clone(),
            states,
            finals,
            rules,
        })
    }

    /// `None` iff `L(self) ⊆ L(other)`; otherwise a tree in the difference.
    pub fn included(&self, other: &Sta) -> Result<Option<Tree>> {
        self.same_theory(other)?;
        let k = self.k.max(other.k);
        let diff = self.lift(k)?.intersect(&other.complement(k)?)?;
        Ok(diff.find_member())
    }

    /// A classical automaton over symbols `[φ, l]` and the relabeling that
    /// maps each symbol back to its guard.
    pub fn to_fta(&self) -> (Fta, Relabeling) {
        let mut symbols: BTreeMap<(usize, Predicate), RankedSymbol> = BTreeMap::new();
        let mut order = Vec::new();
        let mut transitions = Vec::new();
        for r in &self.rules {
            let key = (r.lhs.len(), r.guard.clone());
            let next = symbols.len();
            let sym = symbols
                .entry(key)
                .or_insert_with(|| {
                    let s = RankedSymbol::new(Label::sym(&format!("s{next}")), r.lhs.len());
                    order.push((s.clone(), r.guard.clone()));
                    s
                })
                .clone();
            transitions.push(FtaTransition {
                symbol: sym,
                children: r.lhs.clone(),
                target: r.rhs,
            });
        }
        let alphabet = order.iter().map(|(s, _)| s.clone()).collect();
        let fta = Fta {
            states: self.states.clone(),
            alphabet,
            transitions,
            finals: self.finals.clone(),
        };
        let tau = Relabeling::new(self.theory.clone(), order.into_iter().collect());
        (fta, tau)
    }

    /// The automaton recognizing `τ(L(A'))`.
    pub fn from_fta(fta: &Fta, tau: &Relabeling, k: usize) -> Result<Sta> {
        let max = fta.max_rank();
        if max > k {
            return Err(Error::Bound { rank: max, k });
        }
        let mut rules = Vec::with_capacity(fta.transitions.len());
        for t in &fta.transitions {
            let guard = tau.map.get(&t.symbol).ok_or_else(|| {
                Error::format(format!("symbol {} has no predicate in the relabeling", t.symbol))
            })?;
            rules.push(StaRule {
                lhs: t.children.clone(),
                guard: guard.clone(),
                rhs: t.target,
            });
        }
        Sta::new(k, tau.theory.clone(), fta.states.clone(), fta.finals.clone(), rules)
    }
}

impl fmt::Display for Sta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "(sta :theory {} :k {})", self.theory, self.k)?;
        write!(f, "(states")?;
        for s in &self.states {
            write!(f, " {s}")?;
        }
        writeln!(f, ")")?;
        write!(f, "(final")?;
        for &q in &self.finals {
            write!(f, " {}", self.states[q])?;
        }
        writeln!(f, ")")?;
        for r in &self.rules {
            let lhs: Vec<&str> = r.lhs.iter().map(|&q| self.states[q].as_str()).collect();
            writeln!(f, "(rule ({}) {} {})", lhs.join(" "), r.guard, self.states[r.rhs])?;
        }
        Ok(())
    }
}
