use std::collections::BTreeMap;
use std::fmt;

use super::arith::{div_ceil, div_floor, gcd, to_i64};
use super::predicate::{Atom, Predicate};
use super::Label;
use crate::error::{Error, Result};

/// Unary partial label functions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FnTerm {
    Identity,
    Const(Label),
    /// `n ↦ (p·n + q) / r`, defined iff `r` divides `p·n + q`; `r ≥ 1`.
    Affine { p: i64, q: i64, r: i64 },
    /// Finite partial map on labels.
    Map(BTreeMap<Label, Label>),
    /// The inner function restricted to the labels satisfying the predicate.
    Restrict(Box<Predicate>, Box<FnTerm>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Int,
    Sym,
}

fn kind_of(l: &Label) -> Kind {
    match l {
        Label::Int(_) => Kind::Int,
        Label::Sym(_) => Kind::Sym,
    }
}

fn overflow(what: &str) -> Error {
    Error::Unsupported(format!("{what} leaves the 64-bit integer range"))
}

impl FnTerm {
    /// Builds `(p·n + q) / r`, reducing by the common divisor and folding the
    /// identity and total constants.
    pub fn affine(p: i64, q: i64, r: i64) -> Result<FnTerm> {
        FnTerm::affine_wide(p as i128, q as i128, r as i128)
    }

    fn affine_wide(p: i128, q: i128, r: i128) -> Result<FnTerm> {
        if r == 0 {
            return Err(Error::format("affine divisor must be nonzero"));
        }
        let sign = if r < 0 { -1 } else { 1 };
        let (mut p, mut q, mut r) = (p * sign, q * sign, r * sign);
        let g = gcd(gcd(p, q), r);
        if g > 1 {
            p /= g;
            q /= g;
            r /= g;
        }
        if p == 1 && q == 0 && r == 1 {
            return Ok(FnTerm::Identity);
        }
        if p == 0 && r == 1 {
            let c = to_i64(q).ok_or_else(|| overflow("affine constant"))?;
            return Ok(FnTerm::Const(Label::Int(c)));
        }
        match (to_i64(p), to_i64(q), to_i64(r)) {
            (Some(p), Some(q), Some(r)) => Ok(FnTerm::Affine { p, q, r }),
            _ => Err(overflow("affine coefficient")),
        }
    }

    /// `φ`-restriction of `f`, merging nested restrictions.
    pub fn restrict(phi: Predicate, f: FnTerm) -> FnTerm {
        match (phi, f) {
            (Predicate::True, f) => f,
            (phi, FnTerm::Restrict(psi, g)) => {
                FnTerm::Restrict(Box::new(Predicate::and(phi, *psi)), g)
            }
            (phi, f) => FnTerm::Restrict(Box::new(phi), Box::new(f)),
        }
    }

    pub fn apply(&self, a: &Label) -> Option<Label> {
        match self {
            FnTerm::Identity => Some(a.clone()),
            FnTerm::Const(c) => Some(c.clone()),
            FnTerm::Affine { p, q, r } => match a {
                Label::Int(n) => {
                    let num = *p as i128 * *n as i128 + *q as i128;
                    let r = *r as i128;
                    if num % r == 0 {
                        to_i64(num / r).map(Label::Int)
                    } else {
                        None
                    }
                }
                Label::Sym(_) => None,
            },
            FnTerm::Map(m) => m.get(a).cloned(),
            FnTerm::Restrict(phi, g) => {
                if phi.holds(a) {
                    g.apply(a)
                } else {
                    None
                }
            }
        }
    }

    fn input_kind(&self) -> Option<Kind> {
        match self {
            FnTerm::Affine { .. } => Some(Kind::Int),
            FnTerm::Map(m) => m.keys().next().map(kind_of),
            FnTerm::Restrict(_, g) => g.input_kind(),
            FnTerm::Identity | FnTerm::Const(_) => None,
        }
    }

    fn output_kind(&self) -> Option<Kind> {
        match self {
            FnTerm::Affine { .. } => Some(Kind::Int),
            FnTerm::Map(m) => m.values().next().map(kind_of),
            FnTerm::Const(c) => Some(kind_of(c)),
            FnTerm::Restrict(_, g) => g.output_kind(),
            FnTerm::Identity => None,
        }
    }

    /// The set of labels where the function is defined.
    pub fn domain(&self) -> Predicate {
        match self {
            FnTerm::Identity | FnTerm::Const(_) => Predicate::True,
            FnTerm::Affine { p, q, r } => {
                Predicate::congruence(*r as i128, *p as i128, *q as i128)
                    .expect("modulus bounded by the affine divisor")
            }
            FnTerm::Map(m) => Predicate::in_set(m.keys().cloned()),
            FnTerm::Restrict(phi, g) => Predicate::and((**phi).clone(), g.domain()),
        }
    }

    /// The constant value, if this is a (possibly restricted) constant function.
    pub fn is_constant(&self) -> Option<&Label> {
        match self {
            FnTerm::Const(c) => Some(c),
            FnTerm::Restrict(_, g) => g.is_constant(),
            _ => None,
        }
    }
}

/// `a ↦ g(f(a))`. Undefinedness of `f` propagates.
pub fn compose_fn(f: &FnTerm, g: &FnTerm) -> Result<FnTerm> {
    let out = f.output_kind().or_else(|| f.input_kind());
    if let (Some(a), Some(b)) = (out, g.input_kind()) {
        if a != b {
            return Err(Error::type_error(format!(
                "cannot compose {f} with {g}: value kinds differ"
            )));
        }
    }
    Ok(match (f, g) {
        (FnTerm::Restrict(phi, f1), _) => FnTerm::restrict((**phi).clone(), compose_fn(f1, g)?),
        (_, FnTerm::Restrict(psi, g1)) => FnTerm::restrict(preimage(f, psi)?, compose_fn(f, g1)?),
        (FnTerm::Identity, g) => g.clone(),
        (f, FnTerm::Identity) => f.clone(),
        (f, FnTerm::Const(c)) => FnTerm::restrict(f.domain(), FnTerm::Const(c.clone())),
        (FnTerm::Const(c), g) => match g.apply(c) {
            Some(b) => FnTerm::Const(b),
            None => FnTerm::restrict(Predicate::False, FnTerm::Const(c.clone())),
        },
        (FnTerm::Affine { p, q, r }, FnTerm::Affine { p: p2, q: q2, r: r2 }) => {
            let (p, q, r, p2, q2, r2) = (
                *p as i128, *q as i128, *r as i128, *p2 as i128, *q2 as i128, *r2 as i128,
            );
            FnTerm::restrict(
                f.domain(),
                FnTerm::affine_wide(p2 * p, p2 * q + q2 * r, r * r2)?,
            )
        }
        (FnTerm::Map(m1), FnTerm::Map(m2)) => FnTerm::Map(
            m1.iter()
                .filter_map(|(a, b)| m2.get(b).map(|c| (a.clone(), c.clone())))
                .collect(),
        ),
        (FnTerm::Map(m1), g) => FnTerm::Map(
            m1.iter()
                .filter_map(|(a, b)| g.apply(b).map(|c| (a.clone(), c)))
                .collect(),
        ),
        (f, g) => {
            return Err(Error::Unsupported(format!("composition of {f} with {g}")));
        }
    })
}

/// `{a | f(a) defined and ψ(f(a))}`, rewritten into plain atoms.
pub fn preimage(f: &FnTerm, psi: &Predicate) -> Result<Predicate> {
    match f {
        FnTerm::Identity => Ok(psi.clone()),
        FnTerm::Const(c) => Ok(if psi.holds(c) {
            Predicate::True
        } else {
            Predicate::False
        }),
        FnTerm::Restrict(phi, g) => Ok(Predicate::and((**phi).clone(), preimage(g, psi)?)),
        FnTerm::Affine { .. } | FnTerm::Map(_) => {
            Ok(Predicate::and(f.domain(), pre_structural(f, psi)?))
        }
    }
}

fn pre_structural(f: &FnTerm, psi: &Predicate) -> Result<Predicate> {
    Ok(match psi {
        Predicate::True => Predicate::True,
        Predicate::False => Predicate::False,
        Predicate::Atom(a) => pre_atom(f, a)?,
        Predicate::Not(x) => Predicate::negate(pre_structural(f, x)?),
        Predicate::And(xs) => Predicate::conj(
            xs.iter()
                .map(|x| pre_structural(f, x))
                .collect::<Result<Vec<_>>>()?,
        ),
        Predicate::Or(xs) => Predicate::disj(
            xs.iter()
                .map(|x| pre_structural(f, x))
                .collect::<Result<Vec<_>>>()?,
        ),
    })
}

/// Preimage of one atom, valid on the domain of `f` (callers conjoin it).
fn pre_atom(f: &FnTerm, atom: &Atom) -> Result<Predicate> {
    match f {
        FnTerm::Map(m) => Ok(Predicate::in_set(
            m.iter()
                .filter(|(_, b)| atom.holds(b))
                .map(|(a, _)| a.clone()),
        )),
        FnTerm::Affine { p, q, r } => {
            let (p, q, r) = (*p as i128, *q as i128, *r as i128);
            // On the domain, f(a) = t with r·t = p·a + q.
            match atom {
                Atom::Mod { modulus, residue } => {
                    let m = *modulus as i128;
                    let s = *residue as i128;
                    Predicate::congruence(m * r, p, q - r * s)
                        .ok_or_else(|| overflow("preimage modulus"))
                }
                Atom::Range { lo, hi } => {
                    let mut parts = Vec::new();
                    // r·lo ≤ p·a + q and p·a + q ≤ r·hi
                    for (bound, is_lo) in [(lo, true), (hi, false)] {
                        let Some(b) = bound else { continue };
                        let rhs = r * *b as i128 - q;
                        let part = if p == 0 {
                            let ok = if is_lo { 0 >= rhs } else { 0 <= rhs };
                            if ok {
                                Predicate::True
                            } else {
                                Predicate::False
                            }
                        } else if (p > 0) == is_lo {
                            // a ≥ ceil(rhs / p)
                            let v = div_ceil(rhs, p);
                            clamp_lower(v)
                        } else {
                            let v = div_floor(rhs, p);
                            clamp_upper(v)
                        };
                        parts.push(part);
                    }
                    // Integer outputs always satisfy the unbounded range.
                    Ok(Predicate::conj(parts))
                }
                Atom::Eq(c) => Ok(match c {
                    Label::Int(c) => affine_eq_pre(p, q, r, *c as i128),
                    Label::Sym(_) => Predicate::False,
                }),
                Atom::In(set) => Ok(Predicate::disj(set.iter().map(|c| match c {
                    Label::Int(c) => affine_eq_pre(p, q, r, *c as i128),
                    Label::Sym(_) => Predicate::False,
                }))),
            }
        }
        _ => unreachable!("structural preimage only for affine and map terms"),
    }
}

fn clamp_lower(v: i128) -> Predicate {
    if v > i64::MAX as i128 {
        Predicate::False
    } else if v <= i64::MIN as i128 {
        Predicate::True
    } else {
        Predicate::range(Some(v as i64), None)
    }
}

fn clamp_upper(v: i128) -> Predicate {
    if v < i64::MIN as i128 {
        Predicate::False
    } else if v >= i64::MAX as i128 {
        Predicate::True
    } else {
        Predicate::range(None, Some(v as i64))
    }
}

fn affine_eq_pre(p: i128, q: i128, r: i128, c: i128) -> Predicate {
    let target = r * c - q;
    if p == 0 {
        return if target == 0 {
            Predicate::True
        } else {
            Predicate::False
        };
    }
    if target % p != 0 {
        return Predicate::False;
    }
    match to_i64(target / p) {
        Some(a) => Predicate::eq(Label::Int(a)),
        None => Predicate::False,
    }
}

impl fmt::Display for FnTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FnTerm::Identity => write!(f, "id"),
            FnTerm::Const(c) => write!(f, "(const {c})"),
            FnTerm::Affine { p, q, r } => write!(f, "(affine {p} {q} {r})"),
            FnTerm::Map(m) => {
                write!(f, "(map")?;
                for (a, b) in m {
                    write!(f, " ({a} {b})")?;
                }
                write!(f, ")")
            }
            FnTerm::Restrict(phi, g) => write!(f, "(restrict {phi} {g})"),
        }
    }
}
