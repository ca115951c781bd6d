//! Independent reference implementations.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use symtree::theory::{Atom, FnTerm, Label, Predicate};
use symtree::tree::{RankedSymbol, Tree};
use symtree::vta::Vta;

/// Outputs of the division transducer, written out by hand: a binary node
/// whose label is a multiple of 6 may become `label/6` over two independent
/// translations of its left subtree; every node may also be copied.
pub fn division_outputs(t: &Tree) -> BTreeSet<Tree> {
    let n = t.label().as_int().expect("integer labels");
    match t.children() {
        [] => BTreeSet::from([t.clone()]),
        [l, r] => {
            let (ls, rs) = (division_outputs(l), division_outputs(r));
            let mut out = BTreeSet::new();
            for u in &ls {
                for v in &rs {
                    out.insert(Tree::new(Label::Int(n), vec![u.clone(), v.clone()]));
                }
            }
            if n % 6 == 0 {
                for u in &ls {
                    for v in &ls {
                        out.insert(Tree::new(Label::Int(n / 6), vec![u.clone(), v.clone()]));
                    }
                }
            }
            out
        }
        _ => BTreeSet::new(),
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Least common multiple of the moduli of `phi`.
pub fn period(phi: &Predicate) -> i64 {
    let mut l = 1;
    phi.for_each_atom(&mut |a| {
        if let Atom::Mod { modulus, .. } = a {
            l = l / gcd(l, *modulus) * modulus;
        }
    });
    l
}

/// First integer satisfying `phi` in the order 0, 1, −1, 2, −2, … up to
/// `bound` (or 0, 1, 2, … when `natural`).
pub fn scan_witness(phi: &Predicate, bound: i64, natural: bool) -> Option<i64> {
    (0..=bound).find_map(|n| {
        if phi.holds(&Label::Int(n)) {
            Some(n)
        } else if !natural && n > 0 && phi.holds(&Label::Int(-n)) {
            Some(-n)
        } else {
            None
        }
    })
}

pub fn random_predicate<R: Rng>(rng: &mut R, depth: usize) -> Predicate {
    if depth == 0 || rng.gen_bool(0.35) {
        let bound = |rng: &mut R| {
            if rng.gen_bool(0.2) {
                None
            } else {
                Some(rng.gen_range(-50..=50))
            }
        };
        return match rng.gen_range(0..10) {
            0..=3 => {
                let m = rng.gen_range(1..=12);
                Predicate::modulo(m as i128, rng.gen_range(0..m) as i128).unwrap()
            }
            4..=6 => Predicate::range(bound(rng), bound(rng)),
            7 => Predicate::eq(Label::Int(rng.gen_range(-50..=50))),
            8 => Predicate::in_set((0..rng.gen_range(1..=4)).map(|_| Label::Int(rng.gen_range(-50..=50)))),
            _ => {
                if rng.gen_bool(0.5) {
                    Predicate::True
                } else {
                    Predicate::False
                }
            }
        };
    }
    match rng.gen_range(0..3) {
        0 => Predicate::negate(random_predicate(rng, depth - 1)),
        1 => Predicate::and(random_predicate(rng, depth - 1), random_predicate(rng, depth - 1)),
        _ => Predicate::or(random_predicate(rng, depth - 1), random_predicate(rng, depth - 1)),
    }
}

pub fn random_function<R: Rng>(rng: &mut R) -> FnTerm {
    match rng.gen_range(0..6) {
        0 => {
            let m: BTreeMap<Label, Label> = (0..rng.gen_range(0..=5))
                .map(|_| (Label::Int(rng.gen_range(-50..=50)), Label::Int(rng.gen_range(-50..=50))))
                .collect();
            FnTerm::Map(m)
        }
        1 => FnTerm::restrict(random_predicate(rng, 1), random_affine(rng)),
        _ => random_affine(rng),
    }
}

fn random_affine<R: Rng>(rng: &mut R) -> FnTerm {
    FnTerm::affine(rng.gen_range(-4..=4), rng.gen_range(-20..=20), rng.gen_range(1..=12)).unwrap()
}

/// Membership in a variable tree automaton by enumerating every injective
/// assignment of the bound variables. Labels not occurring in `t` are
/// interchangeable, so each rank contributes its occurring labels plus
/// enough spare labels drawn from `pool`.
pub fn vta_member(b: &Vta, t: &Tree, pool: &[Label]) -> bool {
    let mut occurring: BTreeMap<usize, BTreeSet<Label>> = BTreeMap::new();
    collect(t, &mut occurring);
    let is_const = |l: usize, a: &Label| b.a.contains(&RankedSymbol::new(a.clone(), l));
    let zs: Vec<&RankedSymbol> = b.z.iter().collect();
    let mut choices: Vec<Vec<Label>> = Vec::new();
    for z in &zs {
        let l = z.rank;
        let seen = occurring.get(&l).cloned().unwrap_or_default();
        let needed = zs.iter().filter(|s| s.rank == l).count();
        let usable = |a: &Label| b.in_universe(l, a) && !is_const(l, a);
        let mut c: Vec<Label> = seen.iter().filter(|a| usable(a)).cloned().collect();
        c.extend(pool.iter().filter(|a| usable(a) && !seen.contains(*a)).take(needed).cloned());
        choices.push(c);
    }
    let mut assignment: Vec<Label> = Vec::new();
    assign(b, t, &zs, &choices, &mut assignment)
}

fn collect(t: &Tree, acc: &mut BTreeMap<usize, BTreeSet<Label>>) {
    acc.entry(t.children().len()).or_default().insert(t.label().clone());
    t.children().iter().for_each(|c| collect(c, acc));
}

fn assign(b: &Vta, t: &Tree, zs: &[&RankedSymbol], choices: &[Vec<Label>], current: &mut Vec<Label>) -> bool {
    let i = current.len();
    if i == zs.len() {
        let g: BTreeMap<&RankedSymbol, &Label> = zs.iter().copied().zip(current.iter()).collect();
        let root = run(b, t, &g);
        return root.iter().any(|q| b.fta.finals.contains(q));
    }
    for a in &choices[i] {
        let clash = (0..i).any(|j| zs[j].rank == zs[i].rank && current[j] == *a);
        if clash {
            continue;
        }
        current.push(a.clone());
        let found = assign(b, t, zs, choices, current);
        current.pop();
        if found {
            return true;
        }
    }
    false
}

fn run(b: &Vta, t: &Tree, g: &BTreeMap<&RankedSymbol, &Label>) -> BTreeSet<usize> {
    let l = t.children().len();
    let label = t.label();
    let kids: Vec<BTreeSet<usize>> = t.children().iter().map(|c| run(b, c, g)).collect();
    let constant = b.a.contains(&RankedSymbol::new(label.clone(), l));
    let readable = |s: &RankedSymbol| {
        if b.a.contains(s) {
            s.name == *label
        } else if b.z.contains(s) {
            g[s] == label
        } else {
            !constant && !g.iter().any(|(z, v)| z.rank == l && *v == label)
        }
    };
    b.fta
        .transitions
        .iter()
        .filter(|tr| tr.symbol.rank == l && readable(&tr.symbol))
        .filter(|tr| tr.children.iter().zip(&kids).all(|(q, s)| s.contains(q)))
        .map(|tr| tr.target)
        .collect()
}
