//! Classical finite tree automata, regular tree grammars and top-down tree
//! transducers over ranked alphabets.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::tree::{Call, RankedSymbol, Term, Tree};

/// Picks a name based on `base` that is not yet in `taken`, and records it.
pub(crate) fn fresh_name(taken: &mut HashSet<String>, base: &str) -> String {
    if taken.insert(base.to_string()) {
        return base.to_string();
    }
    let mut i = 1usize;
    loop {
        let cand = format!("{base}_{i}");
        if taken.insert(cand.clone()) {
            return cand;
        }
        i += 1;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FtaTransition {
    pub symbol: RankedSymbol,
    pub children: Vec<usize>,
    pub target: usize,
}

/// A bottom-up finite tree automaton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fta {
    pub states: Vec<String>,
    pub alphabet: BTreeSet<RankedSymbol>,
    pub transitions: Vec<FtaTransition>,
    pub finals: BTreeSet<usize>,
}

impl Fta {
    pub fn new(
        states: Vec<String>,
        alphabet: BTreeSet<RankedSymbol>,
        transitions: Vec<FtaTransition>,
        finals: BTreeSet<usize>,
    ) -> Result<Fta> {
        let n = states.len();
        for t in &transitions {
            if t.children.len() != t.symbol.rank {
                return Err(Error::format(format!(
                    "transition on {} has {} child states",
                    t.symbol,
                    t.children.len()
                )));
            }
            if !alphabet.contains(&t.symbol) {
                return Err(Error::format(format!("symbol {} is not in the alphabet", t.symbol)));
            }
            if t.target >= n || t.children.iter().any(|&c| c >= n) {
                return Err(Error::format("transition refers to an unknown state"));
            }
        }
        if finals.iter().any(|&f| f >= n) {
            return Err(Error::format("unknown final state"));
        }
        Ok(Fta {
            states,
            alphabet,
            transitions,
            finals,
        })
    }

    /// States reachable at the root of `t`.
    pub fn run(&self, t: &Tree) -> Result<BTreeSet<usize>> {
        let sym = RankedSymbol::of(t);
        if !self.alphabet.contains(&sym) {
            return Err(Error::Domain(format!("symbol {sym} is not in the alphabet")));
        }
        let child_sets = t
            .children()
            .iter()
            .map(|c| self.run(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(self
            .transitions
            .iter()
            .filter(|tr| {
                tr.symbol == sym
                    && tr
                        .children
                        .iter()
                        .zip(&child_sets)
                        .all(|(q, set)| set.contains(q))
            })
            .map(|tr| tr.target)
            .collect())
    }

    pub fn member(&self, t: &Tree) -> Result<bool> {
        Ok(self.run(t)?.iter().any(|q| self.finals.contains(q)))
    }

    pub fn max_rank(&self) -> usize {
        self.alphabet.iter().map(|s| s.rank).max().unwrap_or(0)
    }

    /// The equivalent grammar: one rule `q → σ(q1..ql)` per transition and a
    /// fresh initial state copying the rules of the final states.
    pub fn to_rtg(&self) -> Rtg {
        let mut taken: HashSet<String> = self.states.iter().cloned().collect();
        let init_name = fresh_name(&mut taken, "init");
        let mut states = self.states.clone();
        states.push(init_name);
        let init = states.len() - 1;
        let mut rules = Vec::new();
        for tr in &self.transitions {
            let rhs = Term::Node(
                tr.symbol.clone(),
                tr.children.iter().map(|&c| Term::Leaf(c)).collect(),
            );
            rules.push(RtgRule {
                lhs: tr.target,
                rhs: rhs.clone(),
            });
            if self.finals.contains(&tr.target) {
                rules.push(RtgRule { lhs: init, rhs });
            }
        }
        Rtg {
            states,
            alphabet: self.alphabet.clone(),
            initial: init,
            rules,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RtgRule {
    pub lhs: usize,
    pub rhs: Term<RankedSymbol, usize>,
}

/// A regular tree grammar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rtg {
    pub states: Vec<String>,
    pub alphabet: BTreeSet<RankedSymbol>,
    pub initial: usize,
    pub rules: Vec<RtgRule>,
}

fn well_ranked(t: &Term<RankedSymbol, usize>, n: usize, alphabet: &BTreeSet<RankedSymbol>) -> Result<()> {
    match t {
        Term::Leaf(q) if *q < n => Ok(()),
        Term::Leaf(_) => Err(Error::format("rule refers to an unknown state")),
        Term::Node(s, cs) => {
            if cs.len() != s.rank {
                return Err(Error::format(format!("symbol {s} used with {} children", cs.len())));
            }
            if !alphabet.contains(s) {
                return Err(Error::format(format!("symbol {s} is not in the alphabet")));
            }
            cs.iter().try_for_each(|c| well_ranked(c, n, alphabet))
        }
    }
}

impl Rtg {
    pub fn new(
        states: Vec<String>,
        alphabet: BTreeSet<RankedSymbol>,
        initial: usize,
        rules: Vec<RtgRule>,
    ) -> Result<Rtg> {
        let n = states.len();
        if initial >= n {
            return Err(Error::format("unknown initial state"));
        }
        for r in &rules {
            if r.lhs >= n {
                return Err(Error::format("rule for an unknown state"));
            }
            well_ranked(&r.rhs, n, &alphabet)?;
        }
        Ok(Rtg {
            states,
            alphabet,
            initial,
            rules,
        })
    }

    /// The canonical grammar with an empty language.
    pub fn empty(alphabet: BTreeSet<RankedSymbol>, initial_name: &str) -> Rtg {
        Rtg {
            states: vec![initial_name.to_string()],
            alphabet,
            initial: 0,
            rules: Vec::new(),
        }
    }

    /// Every rule has the form `q → σ(q1, …, ql)`.
    pub fn is_normal_form(&self) -> bool {
        self.rules.iter().all(|r| match &r.rhs {
            Term::Node(_, cs) => cs.iter().all(|c| matches!(c, Term::Leaf(_))),
            Term::Leaf(_) => false,
        })
    }

    /// Is every state reachable from the initial state and productive?
    pub fn is_reduced(&self) -> bool {
        let prod = self.productive();
        let reach = self.reachable();
        (0..self.states.len()).all(|q| prod[q] && reach[q])
            || (self.rules.is_empty() && self.states.len() == 1)
    }

    fn productive(&self) -> Vec<bool> {
        let mut prod = vec![false; self.states.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for r in &self.rules {
                if !prod[r.lhs] && r.rhs.leaves().iter().all(|&&q| prod[q]) {
                    prod[r.lhs] = true;
                    changed = true;
                }
            }
        }
        prod
    }

    fn reachable(&self) -> Vec<bool> {
        let mut reach = vec![false; self.states.len()];
        reach[self.initial] = true;
        let mut stack = vec![self.initial];
        while let Some(q) = stack.pop() {
            for r in self.rules.iter().filter(|r| r.lhs == q) {
                for &&p in &r.rhs.leaves() {
                    if !reach[p] {
                        reach[p] = true;
                        stack.push(p);
                    }
                }
            }
        }
        reach
    }

    /// Reduced normal form: flatten right-hand sides, remove chain rules,
    /// then drop unproductive and finally unreachable states.
    pub fn normalize(&self) -> Rtg {
        let mut taken: HashSet<String> = self.states.iter().cloned().collect();
        let mut states = self.states.clone();
        let mut flat: Vec<(usize, RankedSymbol, Vec<usize>)> = Vec::new();
        let mut chains: Vec<(usize, usize)> = Vec::new();

        fn flatten(
            t: &Term<RankedSymbol, usize>,
            owner: usize,
            states: &mut Vec<String>,
            taken: &mut HashSet<String>,
            flat: &mut Vec<(usize, RankedSymbol, Vec<usize>)>,
        ) {
            let Term::Node(sym, cs) = t else { unreachable!("leaves handled by caller") };
            let mut kids = Vec::with_capacity(cs.len());
            for c in cs {
                match c {
                    Term::Leaf(q) => kids.push(*q),
                    Term::Node(..) => {
                        let base = format!("{}_{}", states[owner], kids.len() + 1);
                        let name = fresh_name(taken, &base);
                        states.push(name);
                        let q = states.len() - 1;
                        flatten(c, q, states, taken, flat);
                        kids.push(q);
                    }
                }
            }
            flat.push((owner, sym.clone(), kids));
        }

        for r in &self.rules {
            match &r.rhs {
                Term::Leaf(q) => chains.push((r.lhs, *q)),
                node => flatten(node, r.lhs, &mut states, &mut taken, &mut flat),
            }
        }

        // Chain closure.
        let n = states.len();
        let mut closure: Vec<BTreeSet<usize>> = (0..n).map(|q| BTreeSet::from([q])).collect();
        let mut changed = true;
        while changed {
            changed = false;
            for &(a, b) in &chains {
                let add: Vec<usize> = closure[b].iter().copied().collect();
                for x in add {
                    if closure[a].insert(x) {
                        changed = true;
                    }
                }
            }
        }
        let mut seen = HashSet::new();
        let mut rules: Vec<(usize, RankedSymbol, Vec<usize>)> = Vec::new();
        for (q, reach) in closure.iter().enumerate().take(n) {
            for &p in reach {
                for (owner, sym, kids) in &flat {
                    if *owner == p && seen.insert((q, sym.clone(), kids.clone())) {
                        rules.push((q, sym.clone(), kids.clone()));
                    }
                }
            }
        }

        // Productive states.
        let mut prod = vec![false; n];
        let mut changed = true;
        while changed {
            changed = false;
            for (q, _, kids) in &rules {
                if !prod[*q] && kids.iter().all(|&k| prod[k]) {
                    prod[*q] = true;
                    changed = true;
                }
            }
        }
        if !prod[self.initial] {
            return Rtg::empty(self.alphabet.clone(), &self.states[self.initial]);
        }
        rules.retain(|(q, _, kids)| prod[*q] && kids.iter().all(|&k| prod[k]));

        // Reachable states.
        let mut reach = vec![false; n];
        reach[self.initial] = true;
        let mut stack = vec![self.initial];
        while let Some(q) = stack.pop() {
            for (p, _, kids) in &rules {
                if *p == q {
                    for &k in kids {
                        if !reach[k] {
                            reach[k] = true;
                            stack.push(k);
                        }
                    }
                }
            }
        }
        let mut index = vec![usize::MAX; n];
        let mut new_states = Vec::new();
        for q in 0..n {
            if reach[q] {
                index[q] = new_states.len();
                new_states.push(states[q].clone());
            }
        }
        let rules = rules
            .into_iter()
            .filter(|(q, _, _)| reach[*q])
            .map(|(q, sym, kids)| RtgRule {
                lhs: index[q],
                rhs: Term::Node(sym, kids.into_iter().map(|k| Term::Leaf(index[k])).collect()),
            })
            .collect();
        Rtg {
            states: new_states,
            alphabet: self.alphabet.clone(),
            initial: index[self.initial],
            rules,
        }
    }

    /// The equivalent automaton (via the normal form).
    pub fn to_fta(&self) -> Fta {
        let g = self.normalize();
        let transitions = g
            .rules
            .iter()
            .map(|r| match &r.rhs {
                Term::Node(sym, cs) => FtaTransition {
                    symbol: sym.clone(),
                    children: cs
                        .iter()
                        .map(|c| match c {
                            Term::Leaf(q) => *q,
                            Term::Node(..) => unreachable!("normal form"),
                        })
                        .collect(),
                    target: r.lhs,
                },
                Term::Leaf(_) => unreachable!("normal form"),
            })
            .collect();
        Fta {
            states: g.states,
            alphabet: g.alphabet,
            transitions,
            finals: BTreeSet::from([g.initial]),
        }
    }

    pub fn member(&self, t: &Tree) -> Result<bool> {
        self.to_fta().member(t)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TdttRule {
    pub state: usize,
    pub input: RankedSymbol,
    pub rhs: Term<RankedSymbol, Call>,
}

/// A classical top-down tree transducer: rules `q(σ(x1..xl)) → u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tdtt {
    pub states: Vec<String>,
    pub initial: usize,
    pub rules: Vec<TdttRule>,
}

impl Tdtt {
    /// All outputs of state `q` on `t`.
    pub fn apply(&self, q: usize, t: &Tree) -> BTreeSet<Tree> {
        let mut memo = HashMap::new();
        self.apply_memo(q, t, &mut memo)
    }

    fn apply_memo(
        &self,
        q: usize,
        t: &Tree,
        memo: &mut HashMap<(usize, Tree), BTreeSet<Tree>>,
    ) -> BTreeSet<Tree> {
        if let Some(r) = memo.get(&(q, t.clone())) {
            return r.clone();
        }
        let sym = RankedSymbol::of(t);
        let mut out = BTreeSet::new();
        for rule in self.rules.iter().filter(|r| r.state == q && r.input == sym) {
            for v in self.expand(&rule.rhs, t, memo) {
                out.insert(v);
            }
        }
        memo.insert((q, t.clone()), out.clone());
        out
    }

    fn expand(
        &self,
        u: &Term<RankedSymbol, Call>,
        t: &Tree,
        memo: &mut HashMap<(usize, Tree), BTreeSet<Tree>>,
    ) -> Vec<Tree> {
        match u {
            Term::Leaf(call) => match t.children().get(call.var.wrapping_sub(1)) {
                Some(c) => self.apply_memo(call.state, c, memo).into_iter().collect(),
                None => Vec::new(),
            },
            Term::Node(sym, cs) => {
                let mut acc: Vec<Vec<Tree>> = vec![Vec::new()];
                for c in cs {
                    let opts = self.expand(c, t, memo);
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
                acc.into_iter()
                    .map(|kids| Tree::new(sym.name.clone(), kids))
                    .collect()
            }
        }
    }
}

impl fmt::Display for Fta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "(fta")?;
        write!(f, "  (alphabet")?;
        for s in &self.alphabet {
            write!(f, " {s}")?;
        }
        writeln!(f, ")")?;
        write!(f, "  (states")?;
        for s in &self.states {
            write!(f, " {s}")?;
        }
        writeln!(f, ")")?;
        write!(f, "  (final")?;
        for &q in &self.finals {
            write!(f, " {}", self.states[q])?;
        }
        write!(f, ")")?;
        for t in &self.transitions {
            write!(f, "\n  (trans {} (", t.symbol.name)?;
            for (i, &c) in t.children.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.states[c])?;
            }
            write!(f, ") {})", self.states[t.target])?;
        }
        write!(f, ")")
    }
}

fn write_rtg_rhs(f: &mut fmt::Formatter<'_>, t: &Term<RankedSymbol, usize>, states: &[String]) -> fmt::Result {
    match t {
        Term::Leaf(q) => write!(f, "(state {})", states[*q]),
        Term::Node(s, cs) => {
            write!(f, "(sym {}", s.name)?;
            for c in cs {
                write!(f, " ")?;
                write_rtg_rhs(f, c, states)?;
            }
            write!(f, ")")
        }
    }
}

impl fmt::Display for Rtg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "(rtg")?;
        write!(f, "  (alphabet")?;
        for s in &self.alphabet {
            write!(f, " {s}")?;
        }
        writeln!(f, ")")?;
        write!(f, "  (states")?;
        for s in &self.states {
            write!(f, " {s}")?;
        }
        writeln!(f, ")")?;
        write!(f, "  (init {})", self.states[self.initial])?;
        for r in &self.rules {
            write!(f, "\n  (rule {} ", self.states[r.lhs])?;
            write_rtg_rhs(f, &r.rhs, &self.states)?;
            write!(f, ")")?;
        }
        write!(f, ")")
    }
}
