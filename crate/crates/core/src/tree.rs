//! Finite ordered trees, positions, rule-side terms with variable leaves, and
//! relabelings from ranked alphabets to label predicates.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::theory::{Label, Predicate, Theory};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Node {
    label: Label,
    children: Vec<Tree>,
}

/// An immutable labeled tree. Clones share structure.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tree(Arc<Node>);

/// A node address: 1-based child indices from the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(pub Vec<usize>);

impl Tree {
    pub fn new(label: Label, children: Vec<Tree>) -> Tree {
        Tree(Arc::new(Node { label, children }))
    }

    pub fn leaf(label: Label) -> Tree {
        Tree::new(label, Vec::new())
    }

    pub fn label(&self) -> &Label {
        &self.0.label
    }

    /// Address of the shared node; stable while the tree is alive.
    pub(crate) fn node_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn children(&self) -> &[Tree] {
        &self.0.children
    }

    /// Maximal number of children over all nodes.
    pub fn rank(&self) -> usize {
        self.children()
            .iter()
            .map(Tree::rank)
            .max()
            .unwrap_or(0)
            .max(self.children().len())
    }

    /// Number of nodes on a longest root-to-leaf path (a leaf has depth 1).
    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(Tree::depth).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(Tree::size).sum::<usize>()
    }

    pub fn check_bound(&self, k: usize) -> Result<()> {
        let rank = self.rank();
        if rank > k {
            Err(Error::Bound { rank, k })
        } else {
            Ok(())
        }
    }

    /// All positions in preorder.
    pub fn positions(&self) -> Vec<Position> {
        fn go(t: &Tree, path: &mut Vec<usize>, out: &mut Vec<Position>) {
            out.push(Position(path.clone()));
            for (i, c) in t.children().iter().enumerate() {
                path.push(i + 1);
                go(c, path, out);
                path.pop();
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn subtree(&self, w: &Position) -> Result<&Tree> {
        let mut t = self;
        for &i in &w.0 {
            t = t
                .children()
                .get(i.wrapping_sub(1))
                .ok_or_else(|| Error::Position(w.to_string()))?;
        }
        Ok(t)
    }

    /// Label, subtree and number of children at `w`.
    pub fn query(&self, w: &Position) -> Result<(&Label, &Tree, usize)> {
        let t = self.subtree(w)?;
        Ok((t.label(), t, t.children().len()))
    }

    /// `ξ[ζ]_w`: the tree with the subtree at `w` replaced.
    pub fn replace_at(&self, w: &Position, replacement: Tree) -> Result<Tree> {
        fn go(t: &Tree, path: &[usize], r: Tree, w: &Position) -> Result<Tree> {
            match path.split_first() {
                None => Ok(r),
                Some((&i, rest)) => {
                    if i == 0 || i > t.children().len() {
                        return Err(Error::Position(w.to_string()));
                    }
                    let mut children = t.children().to_vec();
                    children[i - 1] = go(&children[i - 1], rest, r, w)?;
                    Ok(Tree::new(t.label().clone(), children))
                }
            }
        }
        go(self, &w.0, replacement, w)
    }

    /// Labels in preorder.
    pub fn labels(&self) -> Vec<Label> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            out.push(t.label().clone());
            stack.extend(t.children().iter().rev());
        }
        out
    }

    pub fn same_shape(&self, other: &Tree) -> bool {
        self.children().len() == other.children().len()
            && self
                .children()
                .iter()
                .zip(other.children())
                .all(|(a, b)| a.same_shape(b))
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())?;
        if !self.children().is_empty() {
            write!(f, "(")?;
            for (i, c) in self.children().iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Tree {
    type Err = Error;
    fn from_str(s: &str) -> Result<Tree> {
        crate::syntax::parse_tree(s)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// A tree whose internal nodes carry `N` values and whose leaves are either
/// `N`-nodes without children or `V`-leaves (states, variables, calls).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term<N, V> {
    Node(N, Vec<Term<N, V>>),
    Leaf(V),
}

impl<N, V> Term<N, V> {
    pub fn rank(&self) -> usize {
        match self {
            Term::Leaf(_) => 0,
            Term::Node(_, cs) => cs.iter().map(Term::rank).max().unwrap_or(0).max(cs.len()),
        }
    }

    pub fn leaves(&self) -> Vec<&V> {
        let mut out = Vec::new();
        self.visit_leaves(&mut |v| out.push(v));
        out
    }

    pub fn visit_leaves<'a, F: FnMut(&'a V)>(&'a self, f: &mut F) {
        match self {
            Term::Leaf(v) => f(v),
            Term::Node(_, cs) => cs.iter().for_each(|c| c.visit_leaves(f)),
        }
    }

    pub fn nodes(&self) -> Vec<&N> {
        let mut out = Vec::new();
        fn go<'a, N, V>(t: &'a Term<N, V>, out: &mut Vec<&'a N>) {
            if let Term::Node(n, cs) = t {
                out.push(n);
                cs.iter().for_each(|c| go(c, out));
            }
        }
        go(self, &mut out);
        out
    }

    pub fn map<N2, V2>(&self, fnode: &mut impl FnMut(&N) -> N2, fleaf: &mut impl FnMut(&V) -> V2) -> Term<N2, V2> {
        match self {
            Term::Leaf(v) => Term::Leaf(fleaf(v)),
            Term::Node(n, cs) => {
                let n2 = fnode(n);
                Term::Node(n2, cs.iter().map(|c| c.map(fnode, fleaf)).collect())
            }
        }
    }

    pub fn try_map<N2, V2, E>(
        &self,
        fnode: &mut impl FnMut(&N) -> std::result::Result<N2, E>,
        fleaf: &mut impl FnMut(&V) -> std::result::Result<Term<N2, V2>, E>,
    ) -> std::result::Result<Term<N2, V2>, E> {
        match self {
            Term::Leaf(v) => fleaf(v),
            Term::Node(n, cs) => {
                let n2 = fnode(n)?;
                let mut out = Vec::with_capacity(cs.len());
                for c in cs {
                    out.push(c.try_map(fnode, fleaf)?);
                }
                Ok(Term::Node(n2, out))
            }
        }
    }
}

/// Variable `x_i` (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub usize);

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A state call `q(x_i)` in a transducer right-hand side (`var` is 1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Call {
    pub state: usize,
    pub var: usize,
}

impl Term<Label, Var> {
    /// `u[ζ1, …, ζl]`.
    pub fn substitute(&self, args: &[Tree]) -> Result<Tree> {
        match self {
            Term::Leaf(Var(i)) => args
                .get(i.wrapping_sub(1))
                .cloned()
                .ok_or(Error::Arity {
                    var: *i,
                    arity: args.len(),
                }),
            Term::Node(a, cs) => {
                let mut out = Vec::with_capacity(cs.len());
                for c in cs {
                    out.push(c.substitute(args)?);
                }
                Ok(Tree::new(a.clone(), out))
            }
        }
    }
}

impl<N> Term<N, Var> {
    /// Is this an `l`-context: each of `x1..xl` exactly once, in order?
    pub fn is_context(&self, l: usize) -> bool {
        let vars: Vec<usize> = self.leaves().into_iter().map(|v| v.0).collect();
        vars == (1..=l).collect::<Vec<_>>()
    }
}

impl<N: fmt::Display, V: fmt::Display> fmt::Display for Term<N, V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Leaf(v) => write!(f, "{v}"),
            Term::Node(n, cs) => {
                write!(f, "{n}")?;
                if !cs.is_empty() {
                    write!(f, "(")?;
                    for (i, c) in cs.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{c}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

/// A symbol of a ranked alphabet, written `NAME/RANK`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RankedSymbol {
    pub name: Label,
    pub rank: usize,
}

impl RankedSymbol {
    pub fn new(name: Label, rank: usize) -> RankedSymbol {
        RankedSymbol { name, rank }
    }

    /// The symbol used by a tree node.
    pub fn of(t: &Tree) -> RankedSymbol {
        RankedSymbol::new(t.label().clone(), t.children().len())
    }
}

impl fmt::Display for RankedSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.rank)
    }
}

/// A tree relabeling given by one label predicate per ranked symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relabeling {
    pub theory: Theory,
    pub map: BTreeMap<RankedSymbol, Predicate>,
}

impl Relabeling {
    pub fn new(theory: Theory, map: BTreeMap<RankedSymbol, Predicate>) -> Relabeling {
        Relabeling { theory, map }
    }

    /// Each symbol is relabeled to itself (requires names in the target theory).
    pub fn identity<'a, I: IntoIterator<Item = &'a RankedSymbol>>(theory: Theory, symbols: I) -> Relabeling {
        let map = symbols
            .into_iter()
            .map(|s| (s.clone(), Predicate::eq(s.name.clone())))
            .collect();
        Relabeling { theory, map }
    }

    fn predicate_for(&self, t: &Tree) -> Result<&Predicate> {
        let sym = RankedSymbol::of(t);
        self.map.get(&sym).ok_or_else(|| {
            Error::format(format!("symbol {sym} is not in the relabeling's alphabet"))
        })
    }

    /// `ζ ∈ τ(ξ)`?
    pub fn contains(&self, source: &Tree, target: &Tree) -> Result<bool> {
        let phi = self.predicate_for(source)?;
        if source.children().len() != target.children().len() {
            return Ok(false);
        }
        if !self.theory.contains(target.label()) || !phi.holds(target.label()) {
            return Ok(false);
        }
        for (s, t) in source.children().iter().zip(target.children()) {
            if !self.contains(s, t)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Some member of `τ(ξ)` built from canonical witnesses, if nonempty.
    pub fn witness(&self, source: &Tree) -> Result<Option<Tree>> {
        let phi = self.predicate_for(source)?;
        let Some(a) = self.theory.satisfiable(phi) else {
            return Ok(None);
        };
        let mut children = Vec::with_capacity(source.children().len());
        for c in source.children() {
            match self.witness(c)? {
                Some(t) => children.push(t),
                None => return Ok(None),
            }
        }
        Ok(Some(Tree::new(a, children)))
    }

    /// A random member of `τ(ξ)`: each node label is drawn from the first
    /// `spread` witnesses of its predicate.
    pub fn sample<R: Rng>(&self, source: &Tree, spread: usize, rng: &mut R) -> Result<Option<Tree>> {
        let phi = self.predicate_for(source)?;
        let Some(a) = sample_label(&self.theory, phi, spread, rng) else {
            return Ok(None);
        };
        let mut children = Vec::with_capacity(source.children().len());
        for c in source.children() {
            match self.sample(c, spread, rng)? {
                Some(t) => children.push(t),
                None => return Ok(None),
            }
        }
        Ok(Some(Tree::new(a, children)))
    }

    /// `τ1 ; τ2`: `self` maps into a finite theory whose symbols are the
    /// (name, rank) keys of `next`.
    pub fn then(&self, next: &Relabeling) -> Result<Relabeling> {
        let Theory::Finite(_) = &self.theory else {
            return Err(Error::Unsupported(
                "relabeling composition needs a finite intermediate theory".into(),
            ));
        };
        let mut map = BTreeMap::new();
        for (sym, phi) in &self.map {
            let mids = self.theory.enumerate(phi, usize::MAX).unwrap_or_default();
            let parts = mids.into_iter().filter_map(|m| {
                next.map
                    .get(&RankedSymbol::new(m, sym.rank))
                    .cloned()
            });
            map.insert(sym.clone(), Predicate::disj(parts));
        }
        Ok(Relabeling {
            theory: next.theory.clone(),
            map,
        })
    }
}

/// Draws one of the first `spread` witnesses of `φ` uniformly.
pub fn sample_label<R: Rng>(theory: &Theory, phi: &Predicate, spread: usize, rng: &mut R) -> Option<Label> {
    let mut options = Vec::new();
    let mut rest = phi.clone();
    while options.len() < spread.max(1) {
        match theory.satisfiable(&rest) {
            Some(w) => {
                rest = Predicate::and(rest, Predicate::negate(Predicate::eq(w.clone())));
                options.push(w);
            }
            None => break,
        }
    }
    if options.is_empty() {
        None
    } else {
        let i = rng.gen_range(0..options.len());
        Some(options.swap_remove(i))
    }
}
