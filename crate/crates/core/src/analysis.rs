//! Domains, backward and forward application, ranges and type checking.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::compose::syntactic_compose;
use crate::error::{Error, Result};
use crate::srtg::{Srtg, SrtgRule};
use crate::sta::Sta;
use crate::stt::{identity_stt, Stt, SttRule};
use crate::theory::{preimage, Predicate};
use crate::tree::{Call, Term, Tree};

fn subset_name(m: &Stt, set: &BTreeSet<usize>) -> String {
    let names: Vec<&str> = set.iter().map(|&q| m.states[q].as_str()).collect();
    format!("{{{}}}", names.join(","))
}

/// Labels at which every function of the rule yields an output label.
fn defined_at(m: &Stt, r: &SttRule) -> Result<Predicate> {
    let universe = m.out_theory.universe();
    let mut parts = Vec::new();
    for f in r.rhs.nodes() {
        parts.push(preimage(f, &universe)?);
    }
    Ok(Predicate::conj(parts))
}

/// A grammar for `{ξ | M(ξ) ≠ ∅}`: states are sets of transducer states that
/// must all succeed on the same subtree.
pub fn domain_srtg(m: &Stt) -> Result<Srtg> {
    let mut index: HashMap<BTreeSet<usize>, usize> = HashMap::new();
    let mut states: Vec<String> = Vec::new();
    let mut queue: VecDeque<BTreeSet<usize>> = VecDeque::new();
    let mut intern = |set: BTreeSet<usize>, states: &mut Vec<String>, queue: &mut VecDeque<BTreeSet<usize>>| {
        *index.entry(set.clone()).or_insert_with(|| {
            states.push(subset_name(m, &set));
            queue.push_back(set);
            states.len() - 1
        })
    };
    intern(BTreeSet::from([m.initial]), &mut states, &mut queue);
    let guards: Vec<Predicate> = m
        .rules
        .iter()
        .map(|r| Ok(Predicate::and(r.guard.clone(), defined_at(m, r)?)))
        .collect::<Result<_>>()?;
    let mut rules = Vec::new();
    let mut seen = BTreeSet::new();
    while let Some(set) = queue.pop_front() {
        let lhs = intern(set.clone(), &mut states, &mut queue);
        for l in 0..=m.k {
            if set.is_empty() {
                let empty = intern(BTreeSet::new(), &mut states, &mut queue);
                rules.push(SrtgRule {
                    lhs,
                    rhs: Term::Node(Predicate::True, vec![Term::Leaf(empty); l]),
                });
                continue;
            }
            let options: Vec<Vec<usize>> = set
                .iter()
                .map(|&q| {
                    (0..m.rules.len())
                        .filter(|&i| m.rules[i].state == q && m.rules[i].arity == l)
                        .collect()
                })
                .collect();
            if options.iter().any(Vec::is_empty) {
                continue;
            }
            let mut choice = vec![0usize; options.len()];
            loop {
                let chosen: Vec<usize> = choice.iter().zip(&options).map(|(&c, o)| o[c]).collect();
                let guard = Predicate::conj(chosen.iter().map(|&i| guards[i].clone()));
                if m.in_theory.is_sat(&guard) {
                    let mut children = vec![BTreeSet::new(); l];
                    for &i in &chosen {
                        m.rules[i].rhs.visit_leaves(&mut |c: &Call| {
                            children[c.var - 1].insert(c.state);
                        });
                    }
                    if seen.insert((lhs, guard.clone(), children.clone())) {
                        let kids = children
                            .into_iter()
                            .map(|s| Term::Leaf(intern(s, &mut states, &mut queue)))
                            .collect();
                        rules.push(SrtgRule {
                            lhs,
                            rhs: Term::Node(guard, kids),
                        });
                    }
                }
                // next combination
                let mut i = 0;
                while i < choice.len() {
                    choice[i] += 1;
                    if choice[i] < options[i].len() {
                        break;
                    }
                    choice[i] = 0;
                    i += 1;
                }
                if i == choice.len() {
                    break;
                }
            }
        }
    }
    Srtg::new(m.k, m.in_theory.clone(), states, 0, rules)
}

/// A grammar for `{ξ | M(ξ) ∩ L(A) ≠ ∅}`.
pub fn backward_apply(m: &Stt, a: &Sta) -> Result<Srtg> {
    if m.out_theory != a.theory {
        return Err(Error::type_error(format!(
            "transducer output theory {} differs from automaton theory {}",
            m.out_theory, a.theory
        )));
    }
    let filter = identity_stt(&a.lift(a.k.max(m.k))?);
    domain_srtg(&syntactic_compose(m, &filter)?)
}

fn require_simple_linear(m: &Stt) -> Result<()> {
    for r in &m.rules {
        let fns = r.rhs.nodes().len();
        if fns != 1 {
            return Err(Error::Precondition(format!(
                "transducer is not simple: rule {} has {fns} function symbols",
                m.rule_text(r)
            )));
        }
        let mut seen = BTreeSet::new();
        let mut dup = false;
        r.rhs.visit_leaves(&mut |c: &Call| dup |= !seen.insert(c.var));
        if dup {
            return Err(Error::Precondition(format!(
                "transducer is not linear: rule {} copies a variable",
                m.rule_text(r)
            )));
        }
    }
    Ok(())
}

/// A grammar for `M(L(G))`, for simple linear `M`.
pub fn forward_apply_slin(m: &Stt, g: &Srtg) -> Result<Srtg> {
    require_simple_linear(m)?;
    if !m.in_theory.has_image() {
        return Err(Error::Unsupported(format!("image in theory {}", m.in_theory)));
    }
    if g.theory != m.in_theory {
        return Err(Error::type_error(format!(
            "grammar theory {} differs from transducer input theory {}",
            g.theory, m.in_theory
        )));
    }
    let g = g.normalize();
    let out_universe = m.out_theory.universe();
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut states: Vec<String> = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |q: usize, p: usize, states: &mut Vec<String>, queue: &mut VecDeque<(usize, usize)>| {
        *index.entry((q, p)).or_insert_with(|| {
            states.push(format!("<{},{}>", m.states[q], g.states[p]));
            queue.push_back((q, p));
            states.len() - 1
        })
    };
    intern(m.initial, g.initial, &mut states, &mut queue);
    let mut rules = Vec::new();
    while let Some((q, p)) = queue.pop_front() {
        let lhs = intern(q, p, &mut states, &mut queue);
        for r in m.rules.iter().filter(|r| r.state == q) {
            let Term::Node(f, calls) = &r.rhs else {
                unreachable!("simple rules start with their function");
            };
            for gr in &g.rules {
                let Term::Node(psi, kids) = &gr.rhs else {
                    continue;
                };
                if gr.lhs != p || kids.len() != r.arity {
                    continue;
                }
                let dom = Predicate::and(r.guard.clone(), psi.clone());
                let guard = Predicate::and(m.in_theory.image(f, &dom)?, out_universe.clone());
                if !m.out_theory.is_sat(&guard) {
                    continue;
                }
                let mut children = Vec::with_capacity(calls.len());
                for c in calls {
                    let Term::Leaf(Call { state, var }) = c else {
                        unreachable!("simple rules have one function symbol");
                    };
                    let Term::Leaf(pi) = &kids[var - 1] else {
                        unreachable!("normal form");
                    };
                    children.push(Term::Leaf(intern(*state, *pi, &mut states, &mut queue)));
                }
                rules.push(SrtgRule {
                    lhs,
                    rhs: Term::Node(guard, children),
                });
            }
        }
    }
    Srtg::new(m.k, m.out_theory.clone(), states, 0, rules)
}

/// The range of a simple linear transducer.
pub fn range_slin(m: &Stt) -> Result<Srtg> {
    forward_apply_slin(m, &Srtg::universal(m.in_theory.clone(), m.k))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TypeCheckMode {
    /// `M(L_in) ⊆ L_out`, for simple linear transducers.
    Forward,
    /// `M⁻¹(L_out) ⊆ L_in`.
    Inverse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeCheckReport {
    pub verdict: Verdict,
    pub mode: TypeCheckMode,
    /// Offending input, and an output witnessing the failure when known.
    pub counterexample: Option<(Tree, Option<Tree>)>,
}

impl fmt::Display for TypeCheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let method = match self.mode {
            TypeCheckMode::Forward => "forward",
            TypeCheckMode::Inverse => "backward",
        };
        match (&self.verdict, &self.counterexample) {
            (Verdict::Holds, _) => write!(f, "holds (method: {method})"),
            (Verdict::Fails, cex) => {
                write!(f, "fails (method: {method})")?;
                if let Some((input, output)) = cex {
                    write!(f, "\ninput: {input}")?;
                    if let Some(o) = output {
                        write!(f, "\noutput: {o}")?;
                    }
                }
                Ok(())
            }
        }
    }
}

pub fn typecheck(m: &Stt, l_in: &Sta, l_out: &Sta, mode: TypeCheckMode) -> Result<TypeCheckReport> {
    if l_in.theory != m.in_theory || l_out.theory != m.out_theory {
        return Err(Error::type_error("automaton theories do not match the transducer"));
    }
    let holds = TypeCheckReport {
        verdict: Verdict::Holds,
        mode,
        counterexample: None,
    };
    match mode {
        TypeCheckMode::Forward => {
            let image = forward_apply_slin(m, &Srtg::from_sta(l_in))?.to_sta();
            let Some(zeta) = image.included(l_out)? else {
                return Ok(holds);
            };
            let single = Sta::singleton(m.out_theory.clone(), zeta.rank().max(m.k), &zeta)?;
            let sources = backward_apply(m, &single)?.to_sta().intersect(l_in)?;
            let xi = sources
                .find_member()
                .expect("every image tree has a source in the input language");
            Ok(TypeCheckReport {
                verdict: Verdict::Fails,
                mode,
                counterexample: Some((xi, Some(zeta))),
            })
        }
        TypeCheckMode::Inverse => {
            let pre = backward_apply(m, l_out)?.to_sta();
            let Some(xi) = pre.included(l_in)? else {
                return Ok(holds);
            };
            let mut zeta = None;
            for o in m.apply(&xi)? {
                if l_out.member(&o)? {
                    zeta = Some(o);
                    break;
                }
            }
            Ok(TypeCheckReport {
                verdict: Verdict::Fails,
                mode,
                counterexample: Some((xi, zeta)),
            })
        }
    }
}
