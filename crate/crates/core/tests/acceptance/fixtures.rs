//! Automata, grammars and transducers used by the criteria.

use symtree::srtg::Srtg;
use symtree::sta::Sta;
use symtree::stt::Stt;
use symtree::syntax::{parse_srtg, parse_sta, parse_stt, parse_vta};
use symtree::vta::Vta;

pub fn stt(src: &str) -> Stt {
    parse_stt(src).unwrap_or_else(|e| panic!("{e}\n{src}"))
}

pub fn sta(src: &str) -> Sta {
    parse_sta(src).unwrap_or_else(|e| panic!("{e}\n{src}"))
}

pub fn srtg(src: &str) -> Srtg {
    parse_srtg(src).unwrap_or_else(|e| panic!("{e}\n{src}"))
}

pub fn vta(src: &str) -> Vta {
    parse_vta(src).unwrap_or_else(|e| panic!("{e}\n{src}"))
}

pub const EX_STA: &str = "(sta :theory nat :k 2)
(states 2 3)
(final 2 3)
(rule () (div 2) 2)
(rule (2 2) (div 2) 2)
(rule () (div 3) 3)
(rule (3 3) (div 3) 3)";

pub const EVENS: &str = "(sta :theory nat :k 2)
(final e)
(rule () (div 2) e)
(rule (e) (div 2) e)
(rule (e e) (div 2) e)";

pub const DIV3: &str = "(sta :theory nat :k 2)
(final t)
(rule () (div 3) t)
(rule (t t) (div 3) t)";

pub const DIVISION: &str = "(stt :theory nat :k 2)
(init q)
(rule q 2 (and (div 2) (div 3)) (fn (affine 1 0 6) (call q 1) (call q 1)))
(rule q 2 true (fn id (call q 1) (call q 2)))
(rule q 0 true (fn id))";

pub const INCREMENT: &str = "(stt :theory nat :k 2)
(init q)
(rule q 2 true (fn (affine 1 1 1) (call q 1) (call q 2)))
(rule q 0 true (fn (affine 1 1 1)))";

/// Simple, linear, nondeleting, keeps the order of subtrees.
pub const TWO_STATE: &str = "(stt :theory nat :k 2)
(states q0 q1)
(init q0)
(rule q0 2 (div 2) (fn id (call q1 1) (call q0 2)))
(rule q0 2 true (fn (affine 1 1 1) (call q0 1) (call q0 2)))
(rule q0 1 true (fn id (call q1 1)))
(rule q0 0 true (fn id))
(rule q1 2 true (fn id (call q1 1) (call q1 2)))
(rule q1 0 (div 3) (fn (affine 1 1 1)))
(rule q1 0 (range 0 7) (fn id))";

pub const DUPLICATION: &str = "(stt :theory int :k 1)
(init q)
(rule q 0 true (fn id (fn id)))";

/// Deterministic, total, linear, nondeleting.
pub const C_INC: &str = "(stt :theory int :k 2)
(init q)
(rule q 2 true (fn (affine 1 1 1) (call q 1) (call q 2)))
(rule q 1 true (fn (affine 1 1 1) (call q 1)))
(rule q 0 true (fn (affine 1 1 1)))";

/// Deterministic, total, linear, nondeleting.
pub const C_SWAP: &str = "(stt :theory int :k 2)
(init q)
(rule q 2 true (fn id (call q 2) (call q 1)))
(rule q 1 true (fn (affine -1 0 1) (call q 1)))
(rule q 0 true (fn id))";

/// Deterministic, total, copying, nondeleting.
pub const C_COPY: &str = "(stt :theory int :k 2)
(init q)
(rule q 2 true (fn id (call q 1) (fn (affine 2 0 1) (call q 2) (call q 2))))
(rule q 1 true (fn id (call q 1) (call q 1)))
(rule q 0 true (fn id))";

/// Deterministic, total, linear, deleting.
pub const C_PRUNE: &str = "(stt :theory int :k 2)
(init q)
(rule q 2 (div 2) (fn id (call q 1)))
(rule q 2 (mod 2 1) (fn id (call q 2)))
(rule q 1 true (fn id (call q 1)))
(rule q 0 true (fn (affine 1 7 1)))";

/// Nondeterministic, partial, linear, nondeleting.
pub const C_HALF: &str = "(stt :theory int :k 2)
(states q p)
(init q)
(rule q 2 true (fn id (call q 1) (call p 2)))
(rule q 2 (div 2) (fn (affine 1 0 2) (call p 1) (call q 2)))
(rule q 0 true (fn id))
(rule q 0 true (fn (const 0)))
(rule p 2 true (fn id (call p 1) (call p 2)))
(rule p 1 (range 0 6) (fn (affine 1 3 1) (call q 1)))
(rule p 0 (div 3) (fn (affine 1 0 3)))
(rule p 0 true (fn id))";

/// Nondeterministic, partial, copying, nondeleting.
pub const C_DUPND: &str = "(stt :theory int :k 2)
(init q)
(rule q 2 (div 6) (fn (affine 1 0 6) (call q 1) (fn id (call q 1) (call q 2))))
(rule q 2 true (fn id (call q 1) (call q 2)))
(rule q 0 true (fn id))
(rule q 0 (div 2) (fn (affine 1 1 1)))";

/// Nondeterministic, partial, linear, deleting.
pub const C_SKIPND: &str = "(stt :theory int :k 2)
(init q)
(rule q 2 true (fn id (call q 1)))
(rule q 2 true (fn id (call q 2)))
(rule q 1 (range 0 _) (fn id (call q 1)))
(rule q 0 true (fn id))";

/// Deterministic, total, copying, deleting.
pub const C_DUPDEL: &str = "(stt :theory int :k 2)
(init q)
(rule q 2 true (fn id (call q 1) (call q 1)))
(rule q 1 true (fn (affine 1 5 1) (call q 1) (call q 1)))
(rule q 0 true (fn id))";

/// Pairs `(first, second)` with the expected outcome of each sufficient
/// condition: (first deterministic or second linear, first total or second
/// nondeleting).
pub fn composition_matrix() -> Vec<(&'static str, &'static str, &'static str, bool, bool)> {
    vec![
        ("inc ; copy", C_INC, C_COPY, true, true),
        ("half ; swap", C_HALF, C_SWAP, true, true),
        ("inc ; prune", C_INC, C_PRUNE, true, true),
        ("dupnd ; inc", C_DUPND, C_INC, true, true),
        ("half ; skipnd", C_HALF, C_SKIPND, true, false),
        ("dupnd ; prune", C_DUPND, C_PRUNE, true, false),
        ("half ; copy", C_HALF, C_COPY, false, true),
        ("skipnd ; dupdel", C_SKIPND, C_DUPDEL, false, false),
    ]
}

const ALPH_HEADER: &str = "(stt :theory (finite a b f g) :k 2)\n(states q p)\n(init q)\n";

pub fn alphabetic() -> Vec<(&'static str, Stt)> {
    let bodies = [
        (
            "swap",
            "(rule q 2 (eq f) (fn (const f) (call q 2) (call q 1)))
(rule q 2 (eq g) (fn (const g) (call q 1) (call q 2)))
(rule q 0 (eq a) (fn (const b)))
(rule q 0 (eq b) (fn (const a)))",
        ),
        (
            "relabel",
            "(rule q 2 (eq f) (fn (const g) (call q 1) (call q 2)))
(rule q 2 (eq g) (fn (const f) (call q 1) (call q 2)))
(rule q 0 (eq a) (fn (const a)))
(rule q 0 (eq b) (fn (const b)))",
        ),
        (
            "copy",
            "(rule q 2 (eq f) (fn (const f) (call q 1) (call q 1)))
(rule q 2 (eq g) (fn (const g) (call p 2) (call q 1)))
(rule q 0 (eq a) (fn (const a)))
(rule q 0 (eq b) (fn (const a)))
(rule p 2 (eq f) (fn (const a)))
(rule p 0 (eq a) (fn (const b)))
(rule p 0 (eq b) (fn (const b)))",
        ),
        (
            "guess",
            "(rule q 0 (eq a) (fn (const a)))
(rule q 0 (eq a) (fn (const b)))
(rule q 2 (eq f) (fn (const g) (call q 1) (call q 2)))
(rule q 2 (eq g) (fn (const f) (call q 2) (call q 2)))
(rule p 0 (eq b) (fn (const b)))",
        ),
    ];
    bodies
        .into_iter()
        .map(|(name, body)| (name, stt(&format!("{ALPH_HEADER}{body}"))))
        .collect()
}

/// Chains `z(z(c))` with both `z` bound to the same integer.
pub const VTA_CHAIN: &str = "(vta)
(fta (alphabet c/0 z/1) (states p0 p1 p2) (final p2)
  (trans c () p0) (trans z (p0) p1) (trans z (p1) p2))
(universe (rank 0 (eq c)) (rank 1 (range _ _)))
(partition (a c/0) (z z/1) (y))";

pub const VTA_FREE: &str = "(vta)
(fta (alphabet c/0 z/1 y/1 f/2) (states p0 p1 p2 r) (final r)
  (trans c () p0) (trans z (p0) p1) (trans y (p0) p2)
  (trans f (p1 p1) r) (trans f (p2 p1) r))
(universe (rank 0 (eq c)) (rank 1 (range 0 9)) (rank 2 (eq f)))
(partition (a c/0 f/2) (z z/1) (y y/1))";

/// Two bound variables of rank 1 next to the constant `0`, with only
/// `HI` as the largest unary label.
pub fn vta_pair(hi: i64) -> String {
    format!(
        "(vta)
(fta (alphabet c/0 0/1 u/1 w/1) (states p0 p1 p2) (final p1 p2)
  (trans c () p0) (trans u (p0) p1) (trans 0 (p0) p1) (trans w (p1) p2))
(universe (rank 0 (eq c)) (rank 1 (range 0 {hi})))
(partition (a c/0 0/1) (z u/1 w/1) (y))"
    )
}

pub fn srtg_fixtures() -> Vec<(&'static str, Srtg)> {
    vec![
        ("ex", Srtg::from_sta(&sta(EX_STA))),
        (
            "messy",
            srtg(
                "(srtg :theory nat :k 2)
(states s t u dead)
(init s)
(rule s (pred (div 2) (state t) (pred (range 0 4))))
(rule s (state u))
(rule t (pred (mod 3 1) (state s)))
(rule t (pred (range 3 9)))
(rule u (pred (div 5) (state u) (state u)))
(rule u (pred (eq 7)))
(rule u (state t))
(rule dead (pred true (state dead)))",
            ),
        ),
        (
            "chain",
            srtg(
                "(srtg :theory nat :k 2)
(states a b)
(init a)
(rule a (pred (range 1 _) (pred (div 4) (state b))))
(rule a (pred (eq 0)))
(rule b (state a))
(rule b (pred (mod 2 1) (state a) (state a)))",
            ),
        ),
    ]
}
