//! Integer satisfiability by segment scanning.
//!
//! Every atom is either periodic (`Mod`, period = its modulus) or changes
//! value only at finitely many thresholds (`Range`, `Eq`, `In`). Between two
//! consecutive thresholds a formula is therefore periodic with period `L`,
//! the lcm of all moduli, and the point of smallest magnitude in each segment
//! is found by scanning at most `L` (or `2L + 1`) candidates.

use super::arith::lcm_capped;
use super::predicate::{Atom, Predicate};
use super::Label;

/// Upper bound on the scanned period. Formulas whose moduli have a larger
/// lcm are scanned with this period, which is a sound under-approximation.
pub const MAX_PERIOD: i128 = 1 << 20;

fn collect(phi: &Predicate, period: &mut i128, thresholds: &mut Vec<i128>) {
    phi.for_each_atom(&mut |a| match a {
        Atom::Mod { modulus, .. } => {
            *period = lcm_capped(*period, *modulus as i128, MAX_PERIOD);
        }
        Atom::Range { lo, hi } => {
            if let Some(l) = lo {
                thresholds.push(*l as i128);
            }
            if let Some(h) = hi {
                thresholds.push(*h as i128 + 1);
            }
        }
        Atom::Eq(Label::Int(c)) => {
            thresholds.push(*c as i128);
            thresholds.push(*c as i128 + 1);
        }
        Atom::In(set) => {
            for l in set {
                if let Label::Int(c) = l {
                    thresholds.push(*c as i128);
                    thresholds.push(*c as i128 + 1);
                }
            }
        }
        Atom::Eq(Label::Sym(_)) => {}
    });
}

fn holds_at(phi: &Predicate, x: i128) -> bool {
    x >= i64::MIN as i128 && x <= i64::MAX as i128 && phi.holds(&Label::Int(x as i64))
}

/// Orders candidates by magnitude, nonnegative first on ties.
fn better(x: i128, than: Option<i128>) -> bool {
    match than {
        None => true,
        Some(y) => (x.abs(), x < 0) < (y.abs(), y < 0),
    }
}

/// The satisfying integer of smallest magnitude (ties toward nonnegative).
pub fn int_witness(phi: &Predicate) -> Option<i64> {
    match phi {
        Predicate::True => return Some(0),
        Predicate::False => return None,
        _ => {}
    }
    let mut period = 1i128;
    let mut ts = Vec::new();
    collect(phi, &mut period, &mut ts);
    ts.sort_unstable();
    ts.dedup();

    // Segments [s, e] with None meaning unbounded.
    let mut segments: Vec<(Option<i128>, Option<i128>)> = Vec::with_capacity(ts.len() + 1);
    let mut start: Option<i128> = None;
    for &t in &ts {
        segments.push((start, Some(t - 1)));
        start = Some(t);
    }
    segments.push((start, None));

    // Visit segments by their distance from zero so that scanning can stop
    // once no remaining segment can beat the best witness.
    let dist = |s: &(Option<i128>, Option<i128>)| -> i128 {
        match *s {
            (Some(a), _) if a > 0 => a,
            (_, Some(b)) if b < 0 => -b,
            _ => 0,
        }
    };
    segments.sort_by_key(dist);

    let mut best: Option<i128> = None;
    for seg in &segments {
        let d = dist(seg);
        if let Some(b) = best {
            if d > b.abs() {
                break;
            }
        }
        let (s, e) = *seg;
        let found = match (s, e) {
            (Some(a), _) if a > 0 => {
                let last = e.map_or(a + period - 1, |e| e.min(a + period - 1));
                (a..=last).find(|&x| holds_at(phi, x))
            }
            (_, Some(b)) if b < 0 => {
                let last = s.map_or(b - period + 1, |s| s.max(b - period + 1));
                (last..=b).rev().find(|&x| holds_at(phi, x))
            }
            _ => {
                let lo = s.map_or(-period, |s| s.max(-period));
                let hi = e.map_or(period, |e| e.min(period));
                let mut hit = None;
                for m in 0..=period {
                    if m <= hi && holds_at(phi, m) {
                        hit = Some(m);
                        break;
                    }
                    if m > 0 && -m >= lo && holds_at(phi, -m) {
                        hit = Some(-m);
                        break;
                    }
                    if m > hi && -m < lo {
                        break;
                    }
                }
                hit
            }
        };
        if let Some(x) = found {
            if better(x, best) {
                best = Some(x);
            }
        }
    }
    best.map(|x| x as i64)
}
