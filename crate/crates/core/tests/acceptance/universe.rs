//! The test universe: trees of depth at most 3 over labels 0..=12 with at
//! most two children per node.

use std::collections::BTreeMap;

use rand::Rng;
use symtree::theory::Label;
use symtree::tree::Tree;

pub const LABELS: std::ops::RangeInclusive<i64> = 0..=12;

/// 13 · (1 + 2379 + 2379²).
pub const FULL_COUNT: u64 = 73_606_273;

/// Every tree of depth at most `depth`.
pub fn all_trees(depth: usize) -> Vec<Tree> {
    if depth == 0 {
        return Vec::new();
    }
    let smaller = all_trees(depth - 1);
    let mut out = Vec::new();
    for a in LABELS {
        out.push(Tree::leaf(Label::Int(a)));
        for c in &smaller {
            out.push(Tree::new(Label::Int(a), vec![c.clone()]));
        }
        for c1 in &smaller {
            for c2 in &smaller {
                out.push(Tree::new(Label::Int(a), vec![c1.clone(), c2.clone()]));
            }
        }
    }
    out
}

pub struct Coverage {
    /// Trees of the universe accounted for.
    pub trees: u64,
    /// Trees actually evaluated.
    pub evaluated: usize,
    pub failures: Vec<Tree>,
}

impl Coverage {
    pub fn complete(&self) -> bool {
        self.trees == FULL_COUNT && self.failures.is_empty()
    }
}

/// Runs `check` on the whole universe. Trees of depth at most 2 are checked
/// one by one. A deeper tree `a(t1,..,tl)` is checked through one
/// representative per tuple of `key` classes of its subtrees, so `key` must
/// determine `check` for every context `a(.., □, ..)`.
pub fn exhaustive<K: Ord>(key: impl Fn(&Tree) -> K, mut check: impl FnMut(&Tree) -> bool) -> Coverage {
    let small = all_trees(2);
    let mut failures = Vec::new();
    let mut evaluated = 0;
    for t in &small {
        evaluated += 1;
        if !check(t) {
            failures.push(t.clone());
        }
    }
    let mut classes: BTreeMap<K, (Tree, u64)> = BTreeMap::new();
    for t in small {
        classes.entry(key(&t)).or_insert_with(|| (t.clone(), 0)).1 += 1;
    }
    let reps: Vec<(Tree, u64)> = classes.into_values().collect();
    let mut trees = 0u64;
    let mut visit = |t: Tree, weight: u64, failures: &mut Vec<Tree>| {
        evaluated += 1;
        trees += weight;
        if !check(&t) {
            failures.push(t);
        }
    };
    for a in LABELS {
        let a = Label::Int(a);
        visit(Tree::leaf(a.clone()), 1, &mut failures);
        for (r, n) in &reps {
            visit(Tree::new(a.clone(), vec![r.clone()]), *n, &mut failures);
        }
        for (r1, n1) in &reps {
            for (r2, n2) in &reps {
                visit(Tree::new(a.clone(), vec![r1.clone(), r2.clone()]), n1 * n2, &mut failures);
            }
        }
    }
    Coverage {
        trees,
        evaluated,
        failures,
    }
}

/// A random tree of depth at most `depth`.
pub fn random_tree<R: Rng>(rng: &mut R, depth: usize) -> Tree {
    let a = Label::Int(rng.gen_range(LABELS));
    if depth <= 1 {
        return Tree::leaf(a);
    }
    let l = rng.gen_range(0..=2);
    Tree::new(a, (0..l).map(|_| random_tree(rng, depth - 1)).collect())
}
