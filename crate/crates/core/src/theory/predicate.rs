use std::collections::BTreeSet;
use std::fmt;

use super::arith::{gcd, mod_inverse, to_i64};
use super::Label;

/// Atomic label predicates. Integer atoms are false on symbolic labels and
/// vice versa, so every atom is total on every label.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    /// `x ≡ residue (mod modulus)`, with `modulus ≥ 2` and `0 ≤ residue < modulus`.
    Mod { modulus: i64, residue: i64 },
    /// Inclusive integer interval; a missing side is unbounded.
    Range { lo: Option<i64>, hi: Option<i64> },
    Eq(Label),
    In(BTreeSet<Label>),
}

impl Atom {
    pub fn holds(&self, a: &Label) -> bool {
        match self {
            Atom::Mod { modulus, residue } => match a {
                Label::Int(n) => n.rem_euclid(*modulus) == *residue,
                Label::Sym(_) => false,
            },
            Atom::Range { lo, hi } => match a {
                Label::Int(n) => lo.is_none_or(|l| *n >= l) && hi.is_none_or(|h| *n <= h),
                Label::Sym(_) => false,
            },
            Atom::Eq(c) => a == c,
            Atom::In(set) => set.contains(a),
        }
    }
}

/// A Boolean combination of atoms. Values are kept in a lightly simplified
/// form by the smart constructors (`and`, `or`, `negate`, ...).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Predicate {
    True,
    False,
    Atom(Atom),
    Not(Box<Predicate>),
    And(Vec<Predicate>),
    Or(Vec<Predicate>),
}

impl Predicate {
    pub fn atom(atom: Atom) -> Predicate {
        match atom {
            Atom::Mod { modulus, residue } => {
                Predicate::modulo(modulus as i128, residue as i128).unwrap_or(Predicate::False)
            }
            Atom::Range {
                lo: Some(l),
                hi: Some(h),
            } if l > h => Predicate::False,
            Atom::In(ref s) if s.is_empty() => Predicate::False,
            other => Predicate::Atom(other),
        }
    }

    /// `d | x`.
    pub fn div(d: i64) -> Predicate {
        Predicate::modulo(d as i128, 0).unwrap_or(Predicate::False)
    }

    /// `x ≡ r (mod m)`; `None` when `m < 1` or does not fit in `i64`.
    pub fn modulo(m: i128, r: i128) -> Option<Predicate> {
        if m < 1 || to_i64(m).is_none() {
            return None;
        }
        if m == 1 {
            return Some(Predicate::True);
        }
        Some(Predicate::Atom(Atom::Mod {
            modulus: m as i64,
            residue: r.rem_euclid(m) as i64,
        }))
    }

    /// The set `{x | m divides c·x + o}` as a single atom (or a constant).
    /// `None` when the resulting modulus does not fit in `i64`.
    pub fn congruence(m: i128, c: i128, o: i128) -> Option<Predicate> {
        debug_assert!(m >= 1);
        let c = c.rem_euclid(m);
        let o = o.rem_euclid(m);
        let g = gcd(c, m);
        if o % g != 0 {
            return Some(Predicate::False);
        }
        let (m, c, o) = (m / g, c / g, o / g);
        if m == 1 {
            return Some(Predicate::True);
        }
        let residue = (-o * mod_inverse(c, m)).rem_euclid(m);
        Predicate::modulo(m, residue)
    }

    pub fn range(lo: Option<i64>, hi: Option<i64>) -> Predicate {
        Predicate::atom(Atom::Range { lo, hi })
    }

    pub fn eq(c: Label) -> Predicate {
        Predicate::Atom(Atom::Eq(c))
    }

    pub fn in_set<I: IntoIterator<Item = Label>>(labels: I) -> Predicate {
        Predicate::atom(Atom::In(labels.into_iter().collect()))
    }

    pub fn negate(p: Predicate) -> Predicate {
        match p {
            Predicate::True => Predicate::False,
            Predicate::False => Predicate::True,
            Predicate::Not(inner) => *inner,
            other => Predicate::Not(Box::new(other)),
        }
    }

    pub fn and(a: Predicate, b: Predicate) -> Predicate {
        Predicate::conj([a, b])
    }

    pub fn or(a: Predicate, b: Predicate) -> Predicate {
        Predicate::disj([a, b])
    }

    pub fn conj<I: IntoIterator<Item = Predicate>>(items: I) -> Predicate {
        let mut out: Vec<Predicate> = Vec::new();
        for p in items {
            match p {
                Predicate::True => {}
                Predicate::False => return Predicate::False,
                Predicate::And(xs) => {
                    for x in xs {
                        if !out.contains(&x) {
                            out.push(x);
                        }
                    }
                }
                other => {
                    if !out.contains(&other) {
                        out.push(other);
                    }
                }
            }
        }
        match out.len() {
            0 => Predicate::True,
            1 => out.pop().unwrap(),
            _ => Predicate::And(out),
        }
    }

    pub fn disj<I: IntoIterator<Item = Predicate>>(items: I) -> Predicate {
        let mut out: Vec<Predicate> = Vec::new();
        for p in items {
            match p {
                Predicate::False => {}
                Predicate::True => return Predicate::True,
                Predicate::Or(xs) => {
                    for x in xs {
                        if !out.contains(&x) {
                            out.push(x);
                        }
                    }
                }
                other => {
                    if !out.contains(&other) {
                        out.push(other);
                    }
                }
            }
        }
        match out.len() {
            0 => Predicate::False,
            1 => out.pop().unwrap(),
            _ => Predicate::Or(out),
        }
    }

    /// Theory-independent evaluation.
    pub fn holds(&self, a: &Label) -> bool {
        match self {
            Predicate::True => true,
            Predicate::False => false,
            Predicate::Atom(at) => at.holds(a),
            Predicate::Not(p) => !p.holds(a),
            Predicate::And(ps) => ps.iter().all(|p| p.holds(a)),
            Predicate::Or(ps) => ps.iter().any(|p| p.holds(a)),
        }
    }

    pub fn for_each_atom<F: FnMut(&Atom)>(&self, f: &mut F) {
        match self {
            Predicate::True | Predicate::False => {}
            Predicate::Atom(a) => f(a),
            Predicate::Not(p) => p.for_each_atom(f),
            Predicate::And(ps) | Predicate::Or(ps) => ps.iter().for_each(|p| p.for_each_atom(f)),
        }
    }

    /// Labels mentioned by `eq`/`in` atoms.
    pub fn mentioned_labels(&self) -> BTreeSet<Label> {
        let mut out = BTreeSet::new();
        self.for_each_atom(&mut |a| match a {
            Atom::Eq(c) => {
                out.insert(c.clone());
            }
            Atom::In(s) => out.extend(s.iter().cloned()),
            _ => {}
        });
        out
    }

    pub fn size(&self) -> usize {
        match self {
            Predicate::True | Predicate::False | Predicate::Atom(_) => 1,
            Predicate::Not(p) => 1 + p.size(),
            Predicate::And(ps) | Predicate::Or(ps) => 1 + ps.iter().map(|p| p.size()).sum::<usize>(),
        }
    }
}

fn bound(b: &Option<i64>) -> String {
    match b {
        Some(v) => v.to_string(),
        None => "_".to_string(),
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Mod {
                modulus,
                residue: 0,
            } => write!(f, "(div {modulus})"),
            Atom::Mod { modulus, residue } => write!(f, "(mod {modulus} {residue})"),
            Atom::Range { lo, hi } => write!(f, "(range {} {})", bound(lo), bound(hi)),
            Atom::Eq(c) => write!(f, "(eq {c})"),
            Atom::In(s) => {
                write!(f, "(in")?;
                for l in s {
                    write!(f, " {l}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::True => write!(f, "true"),
            Predicate::False => write!(f, "false"),
            Predicate::Atom(a) => write!(f, "{a}"),
            Predicate::Not(p) => write!(f, "(not {p})"),
            Predicate::And(ps) | Predicate::Or(ps) => {
                let op = if matches!(self, Predicate::And(_)) { "and" } else { "or" };
                write!(f, "({op}")?;
                for p in ps {
                    write!(f, " {p}")?;
                }
                write!(f, ")")
            }
        }
    }
}
