//! Fixtures shared by the unit tests.

use std::collections::BTreeSet;

use crate::sta::{Sta, StaRule};
use crate::stt::{Stt, SttRule};
use crate::theory::{FnTerm, Predicate, Theory};
use crate::tree::{Call, Term, Tree};

pub fn t(s: &str) -> Tree {
    s.parse().unwrap()
}

pub fn call(state: usize, var: usize) -> Term<FnTerm, Call> {
    Term::Leaf(Call { state, var })
}

pub fn rule(state: usize, arity: usize, guard: Predicate, rhs: Term<FnTerm, Call>) -> SttRule {
    SttRule {
        state,
        arity,
        guard,
        rhs,
    }
}

pub fn node(f: FnTerm, cs: Vec<Term<FnTerm, Call>>) -> Term<FnTerm, Call> {
    Term::Node(f, cs)
}

/// Binary trees over ℕ whose labels are all even or all multiples of 3.
pub fn divisibility() -> Sta {
    let mut rules = Vec::new();
    for (q, d) in [(0usize, 2i64), (1, 3)] {
        rules.push(StaRule { lhs: vec![], guard: Predicate::div(d), rhs: q });
        rules.push(StaRule { lhs: vec![q, q], guard: Predicate::div(d), rhs: q });
    }
    Sta::new(2, Theory::Natural, vec!["2".into(), "3".into()], BTreeSet::from([0, 1]), rules).unwrap()
}

/// Over ℕ: divide by 6 duplicating x1 on multiples of 6, identity on binary
/// nodes and on leaves.
pub fn division() -> Stt {
    Stt::new(
        2,
        Theory::Natural,
        Theory::Natural,
        vec!["q".into()],
        0,
        vec![
            rule(
                0,
                2,
                Predicate::and(Predicate::div(2), Predicate::div(3)),
                node(FnTerm::affine(1, 0, 6).unwrap(), vec![call(0, 1), call(0, 1)]),
            ),
            rule(0, 2, Predicate::True, node(FnTerm::Identity, vec![call(0, 1), call(0, 2)])),
            rule(0, 0, Predicate::True, node(FnTerm::Identity, vec![])),
        ],
    )
    .unwrap()
}

/// Node-wise `+1` on binary trees over ℕ.
pub fn increment() -> Stt {
    let inc = FnTerm::affine(1, 1, 1).unwrap();
    Stt::new(
        2,
        Theory::Natural,
        Theory::Natural,
        vec!["q".into()],
        0,
        vec![
            rule(0, 2, Predicate::True, node(inc.clone(), vec![call(0, 1), call(0, 2)])),
            rule(0, 0, Predicate::True, node(inc, vec![])),
        ],
    )
    .unwrap()
}

/// All trees over `labels` with depth at most `depth` and rank at most `k`.
pub fn all_trees(labels: &[i64], depth: usize, k: usize) -> Vec<Tree> {
    if depth == 0 {
        return Vec::new();
    }
    let smaller = all_trees(labels, depth - 1, k);
    let mut out = Vec::new();
    for &a in labels {
        let mut tuples: Vec<Vec<Tree>> = vec![Vec::new()];
        for l in 0..=k {
            for kids in &tuples {
                out.push(Tree::new(a.into(), kids.clone()));
            }
            if l < k {
                let mut next = Vec::new();
                for kids in &tuples {
                    for s in &smaller {
                        let mut v = kids.clone();
                        v.push(s.clone());
                        next.push(v);
                    }
                }
                tuples = next;
            }
        }
    }
    out
}
