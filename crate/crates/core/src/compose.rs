//! Syntactic composition of symbolic tree transducers.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::stt::{Stt, SttProps, SttRule};
use crate::theory::{compose_fn, preimage, FnTerm, Predicate, Theory};
use crate::tree::{Call, Term};

/// A leaf of a symbolic configuration.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pending {
    /// `p(u)`: state `p` of the second transducer still has to read `u`.
    Apply { state: usize, sub: Term<FnTerm, Call> },
    /// `⟨p,q⟩(x_var)`.
    Pair { p: usize, q: usize, var: usize },
}

/// An accumulated guard and a partially translated right-hand side.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymConfig {
    pub guard: Predicate,
    pub tree: Term<FnTerm, Pending>,
}

impl SymConfig {
    pub fn seed(guard: Predicate, p: usize, rhs: Term<FnTerm, Call>) -> SymConfig {
        SymConfig {
            guard,
            tree: Term::Leaf(Pending::Apply { state: p, sub: rhs }),
        }
    }

    pub fn is_terminal(&self) -> bool {
        self.tree.leaves().iter().all(|l| matches!(l, Pending::Pair { .. }))
    }
}

fn apply_positions(t: &Term<FnTerm, Pending>, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    match t {
        Term::Leaf(Pending::Apply { .. }) => out.push(path.clone()),
        Term::Leaf(Pending::Pair { .. }) => {}
        Term::Node(_, cs) => {
            for (i, c) in cs.iter().enumerate() {
                path.push(i);
                apply_positions(c, path, out);
                path.pop();
            }
        }
    }
}

fn at<'a>(t: &'a Term<FnTerm, Pending>, path: &[usize]) -> &'a Term<FnTerm, Pending> {
    match (t, path.split_first()) {
        (_, None) => t,
        (Term::Node(_, cs), Some((&i, rest))) => at(&cs[i], rest),
        _ => unreachable!("path leads through a leaf"),
    }
}

fn replace(t: &Term<FnTerm, Pending>, path: &[usize], with: Term<FnTerm, Pending>) -> Term<FnTerm, Pending> {
    match (t, path.split_first()) {
        (_, None) => with,
        (Term::Node(f, cs), Some((&i, rest))) => {
            let mut cs = cs.clone();
            cs[i] = replace(&cs[i], rest, with);
            Term::Node(f.clone(), cs)
        }
        _ => unreachable!("path leads through a leaf"),
    }
}

/// Successors obtained by rewriting the `Apply` leaf at `path`.
fn step_at(n: &Stt, theory: &Theory, c: &SymConfig, path: &[usize]) -> Result<Vec<SymConfig>> {
    let Term::Leaf(Pending::Apply { state: p, sub }) = at(&c.tree, path) else {
        return Ok(Vec::new());
    };
    match sub {
        Term::Leaf(call) => Ok(vec![SymConfig {
            guard: c.guard.clone(),
            tree: replace(
                &c.tree,
                path,
                Term::Leaf(Pending::Pair {
                    p: *p,
                    q: call.state,
                    var: call.var,
                }),
            ),
        }]),
        Term::Node(f, ts) => {
            let universe = n.in_theory.universe();
            let mut out = Vec::new();
            for r in n.rules.iter().filter(|r| r.state == *p && r.arity == ts.len()) {
                let pre = preimage(f, &Predicate::and(r.guard.clone(), universe.clone()))?;
                let guard = Predicate::and(c.guard.clone(), pre);
                if !theory.is_sat(&guard) {
                    continue;
                }
                let v = r.rhs.try_map(
                    &mut |g: &FnTerm| compose_fn(f, g),
                    &mut |call: &Call| {
                        Ok::<_, Error>(Term::Leaf(Pending::Apply {
                            state: call.state,
                            sub: ts[call.var - 1].clone(),
                        }))
                    },
                )?;
                out.push(SymConfig {
                    guard,
                    tree: replace(&c.tree, path, v),
                });
            }
            Ok(out)
        }
    }
}

/// All one-step successors of `c` under the second transducer `n`; guards are
/// over `theory` and unsatisfiable successors are dropped.
pub fn sym_step(n: &Stt, theory: &Theory, c: &SymConfig) -> Result<Vec<SymConfig>> {
    let mut paths = Vec::new();
    apply_positions(&c.tree, &mut Vec::new(), &mut paths);
    let mut out = BTreeSet::new();
    for path in paths {
        out.extend(step_at(n, theory, c, &path)?);
    }
    Ok(out.into_iter().collect())
}

/// Terminal configurations reachable from `seed`, rewriting leftmost first.
fn terminals(n: &Stt, theory: &Theory, seed: SymConfig) -> Result<Vec<SymConfig>> {
    let mut stack = vec![seed];
    let mut out = Vec::new();
    while let Some(c) = stack.pop() {
        let mut paths = Vec::new();
        apply_positions(&c.tree, &mut Vec::new(), &mut paths);
        match paths.first() {
            None => out.push(c),
            Some(path) => stack.extend(step_at(n, theory, &c, path)?),
        }
    }
    Ok(out)
}

/// `M ; N`: first `m`, then `n`.
pub fn syntactic_compose(m: &Stt, n: &Stt) -> Result<Stt> {
    if m.out_theory != n.in_theory {
        return Err(Error::type_error(format!(
            "output theory {} of the first transducer differs from input theory {} of the second",
            m.out_theory, n.in_theory
        )));
    }
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut names = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |p: usize, q: usize, names: &mut Vec<String>, queue: &mut VecDeque<(usize, usize)>| {
        *index.entry((p, q)).or_insert_with(|| {
            names.push(format!("<{},{}>", n.states[p], m.states[q]));
            queue.push_back((p, q));
            names.len() - 1
        })
    };
    intern(n.initial, m.initial, &mut names, &mut queue);
    let mut rules = Vec::new();
    let mut seen = BTreeSet::new();
    while let Some((p, q)) = queue.pop_front() {
        let lhs = intern(p, q, &mut names, &mut queue);
        for r in m.rules.iter().filter(|r| r.state == q) {
            if !m.in_theory.is_sat(&r.guard) {
                continue;
            }
            let seed = SymConfig::seed(r.guard.clone(), p, r.rhs.clone());
            for c in terminals(n, &m.in_theory, seed)? {
                let rhs = c.tree.map(&mut |f: &FnTerm| f.clone(), &mut |leaf: &Pending| match leaf {
                    Pending::Pair { p, q, var } => Call {
                        state: intern(*p, *q, &mut names, &mut queue),
                        var: *var,
                    },
                    Pending::Apply { .. } => unreachable!("terminal configuration"),
                });
                let rule = SttRule {
                    state: lhs,
                    arity: r.arity,
                    guard: c.guard,
                    rhs,
                };
                if seen.insert(rule.clone()) {
                    rules.push(rule);
                }
            }
        }
    }
    Stt::new(
        m.k.max(n.k),
        m.in_theory.clone(),
        n.out_theory.clone(),
        names,
        0,
        rules,
    )
}

/// Why the composite transducer computes the composed transformation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompositionGuarantee {
    Guaranteed { a: &'static str, b: &'static str },
    NotGuaranteed,
}

impl fmt::Display for CompositionGuarantee {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompositionGuarantee::Guaranteed { a, b } => write!(f, "guaranteed ({a}; {b})"),
            CompositionGuarantee::NotGuaranteed => write!(f, "not guaranteed"),
        }
    }
}

/// Sufficient conditions: (first deterministic or second linear) and
/// (first total or second nondeleting).
pub fn compose_semantics_check(m: &Stt, n: &Stt) -> CompositionGuarantee {
    let (pm, pn): (SttProps, SttProps) = (m.props(), n.props());
    let a = if pm.deterministic {
        Some("first is deterministic")
    } else if pn.linear {
        Some("second is linear")
    } else {
        None
    };
    let b = if pm.total {
        Some("first is total")
    } else if pn.nondeleting {
        Some("second is nondeleting")
    } else {
        None
    };
    match (a, b) {
        (Some(a), Some(b)) => CompositionGuarantee::Guaranteed { a, b },
        _ => CompositionGuarantee::NotGuaranteed,
    }
}
