//! Label theories: labels, predicates with decidable satisfiability, and
//! unary partial label functions with composition, preimage and image.

mod arith;
mod function;
mod predicate;
mod sat;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

pub use function::{compose_fn, preimage, FnTerm};
pub use predicate::{Atom, Predicate};
pub use sat::MAX_PERIOD;

use crate::error::{Error, Result};

/// A node label: an integer or an interned symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Int(i64),
    Sym(Arc<str>),
}

impl Label {
    pub fn sym(name: &str) -> Label {
        Label::Sym(Arc::from(name))
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Label::Int(n) => Some(*n),
            Label::Sym(_) => None,
        }
    }
}

impl From<i64> for Label {
    fn from(n: i64) -> Label {
        Label::Int(n)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Int(n) => write!(f, "{n}"),
            Label::Sym(s) => write!(f, "{s}"),
        }
    }
}

/// A concrete label structure.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Theory {
    /// All integers.
    Integer,
    /// The nonnegative integers.
    Natural,
    /// A finite set of symbols.
    Finite(BTreeSet<Label>),
}

/// A satisfiable full sign assignment over a list of predicates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Minterm {
    pub predicate: Predicate,
    /// `signs[i]` is true iff the i-th predicate occurs positively.
    pub signs: Vec<bool>,
    pub witness: Label,
}

impl Theory {
    pub fn finite<I: IntoIterator<Item = S>, S: AsRef<str>>(symbols: I) -> Theory {
        Theory::Finite(symbols.into_iter().map(|s| Label::sym(s.as_ref())).collect())
    }

    pub fn has_image(&self) -> bool {
        true
    }

    pub fn contains(&self, a: &Label) -> bool {
        match (self, a) {
            (Theory::Integer, Label::Int(_)) => true,
            (Theory::Natural, Label::Int(n)) => *n >= 0,
            (Theory::Finite(u), l) => u.contains(l),
            _ => false,
        }
    }

    pub fn check(&self, a: &Label) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::Domain(format!("{a} (theory {self})")))
        }
    }

    /// The universe as a predicate.
    pub fn universe(&self) -> Predicate {
        match self {
            Theory::Integer => Predicate::True,
            Theory::Natural => Predicate::range(Some(0), None),
            Theory::Finite(u) => Predicate::in_set(u.iter().cloned()),
        }
    }

    pub fn eval(&self, phi: &Predicate, a: &Label) -> Result<bool> {
        self.check(a)?;
        Ok(phi.holds(a))
    }

    /// A witness in `[[φ]]`, or `None` if the set is empty. For the integer
    /// theories the witness has the smallest magnitude (ties toward
    /// nonnegative); for finite theories it is the least symbol.
    pub fn satisfiable(&self, phi: &Predicate) -> Option<Label> {
        match self {
            Theory::Integer => sat::int_witness(phi).map(Label::Int),
            Theory::Natural => {
                sat::int_witness(&Predicate::and(phi.clone(), self.universe())).map(Label::Int)
            }
            Theory::Finite(u) => u.iter().find(|a| phi.holds(a)).cloned(),
        }
    }

    pub fn is_sat(&self, phi: &Predicate) -> bool {
        self.satisfiable(phi).is_some()
    }

    /// Do `φ` and `ψ` denote the same set within the universe?
    pub fn equivalent(&self, phi: &Predicate, psi: &Predicate) -> bool {
        let diff = Predicate::or(
            Predicate::and(phi.clone(), Predicate::negate(psi.clone())),
            Predicate::and(psi.clone(), Predicate::negate(phi.clone())),
        );
        !self.is_sat(&diff)
    }

    /// Labels satisfying `φ`, if the set is finite and small enough to list.
    pub fn enumerate(&self, phi: &Predicate, limit: usize) -> Option<Vec<Label>> {
        match self {
            Theory::Finite(u) => Some(u.iter().filter(|a| phi.holds(a)).cloned().collect()),
            _ => {
                let mut out = Vec::new();
                let mut rest = phi.clone();
                while let Some(w) = self.satisfiable(&rest) {
                    if out.len() == limit {
                        return None;
                    }
                    rest = Predicate::and(rest, Predicate::negate(Predicate::eq(w.clone())));
                    out.push(w);
                }
                Some(out)
            }
        }
    }

    pub fn minterms(&self, phis: &[Predicate]) -> Vec<Minterm> {
        let mut current: Vec<(Predicate, Vec<bool>)> = vec![(Predicate::True, Vec::new())];
        for phi in phis {
            let mut next = Vec::with_capacity(current.len() * 2);
            for (p, signs) in current {
                for sign in [true, false] {
                    let lit = if sign {
                        phi.clone()
                    } else {
                        Predicate::negate(phi.clone())
                    };
                    let q = Predicate::and(p.clone(), lit);
                    if self.is_sat(&q) {
                        let mut s = signs.clone();
                        s.push(sign);
                        next.push((q, s));
                    }
                }
            }
            current = next;
        }
        current
            .into_iter()
            .filter_map(|(predicate, signs)| {
                self.satisfiable(&predicate).map(|witness| Minterm {
                    predicate,
                    signs,
                    witness,
                })
            })
            .collect()
    }

    pub fn apply_fn(&self, f: &FnTerm, a: &Label) -> Result<Option<Label>> {
        self.check(a)?;
        Ok(f.apply(a))
    }

    /// `f([[φ]])` as a predicate, with `self` the domain theory of `f`.
    pub fn image(&self, f: &FnTerm, phi: &Predicate) -> Result<Predicate> {
        if !self.has_image() {
            return Err(Error::Unsupported(format!("image in theory {self}")));
        }
        let phi = Predicate::and(phi.clone(), self.universe());
        match f {
            FnTerm::Identity => Ok(phi),
            FnTerm::Const(c) => Ok(if self.is_sat(&phi) {
                Predicate::eq(c.clone())
            } else {
                Predicate::False
            }),
            FnTerm::Restrict(psi, g) => self.image(g, &Predicate::and((**psi).clone(), phi)),
            FnTerm::Affine { p, q, r } => {
                let (p, q, r) = (*p, *q, *r);
                if p == 0 {
                    // Affine with p = 0 and r ∤ q is nowhere defined.
                    return Ok(if q % r == 0 && self.is_sat(&phi) {
                        Predicate::eq(Label::Int(q / r))
                    } else {
                        Predicate::False
                    });
                }
                // b = (p·a + q)/r  ⇔  a = (r·b − q)/p
                let inverse = if p > 0 {
                    FnTerm::affine(r, q.checked_neg().ok_or_else(overflow)?, p)?
                } else {
                    FnTerm::affine(r.checked_neg().ok_or_else(overflow)?, q, p.checked_neg().ok_or_else(overflow)?)?
                };
                preimage(&inverse, &phi)
            }
            FnTerm::Map(m) => Ok(Predicate::in_set(
                m.iter()
                    .filter(|(a, _)| self.contains(a) && phi.holds(a))
                    .map(|(_, b)| b.clone()),
            )),
        }
    }
}

fn overflow() -> Error {
    Error::Unsupported("affine coefficient leaves the 64-bit integer range".into())
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Theory::Integer => write!(f, "int"),
            Theory::Natural => write!(f, "nat"),
            Theory::Finite(u) => {
                write!(f, "(finite")?;
                for a in u {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
        }
    }
}
