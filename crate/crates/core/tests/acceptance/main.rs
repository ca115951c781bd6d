//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod fixtures;
mod oracles;
mod universe;

use std::collections::{BTreeSet, HashMap};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use symtree::analysis::{backward_apply, domain_srtg, forward_apply_slin, range_slin};
use symtree::compose::{compose_semantics_check, syntactic_compose, CompositionGuarantee};
use symtree::srtg::Srtg;
use symtree::sta::{Sta, StaRule};
use symtree::stt::Stt;
use symtree::theory::{preimage, FnTerm, Label, Predicate, Theory};
use symtree::tree::{Term, Tree};
use symtree::Error;

use fixtures::*;
use universe::{exhaustive, random_tree, Coverage};

type Outcome = Result<String, String>;

fn t(s: &str) -> Tree {
    s.parse().unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn sta_example() -> Outcome {
    let a = sta(EX_STA);
    for s in ["2(4,6)", "3(15,18)", "6(12,18)"] {
        ensure(a.member(&t(s)).map_err(err)?, || format!("{s} rejected"))?;
    }
    for s in ["2(3,4)", "5"] {
        ensure(!a.member(&t(s)).map_err(err)?, || format!("{s} accepted"))?;
    }
    let root: BTreeSet<&str> = a.run(&t("6(12,18)")).map_err(err)?.into_iter().map(|q| a.states[q].as_str()).collect();
    ensure(root == BTreeSet::from(["2", "3"]), || format!("root states of 6(12,18) are {root:?}"))?;
    Ok("3 members, 2 non-members, root states {2,3}".into())
}

fn stt_example() -> Outcome {
    let m = stt(DIVISION);
    let input = t("6(12(4,6),7)");
    let got = m.apply(&input).map_err(err)?;
    let want = oracles::division_outputs(&input);
    ensure(got == want, || format!("outputs {got:?} differ from oracle {want:?}"))?;
    ensure(got.len() == 6, || format!("{} outputs", got.len()))?;
    ensure(got.contains(&t("1(2(4,4),12(4,6))")), || "1(2(4,4),12(4,6)) missing".into())?;
    let p = m.props();
    ensure(
        !p.deterministic && !p.total && !p.linear && !p.nondeleting,
        || format!("properties:\n{p}"),
    )?;
    Ok("6 outputs equal to the oracle; not deterministic, total, linear or nondeleting".into())
}

fn sequential(m: &Stt, n: &Stt, x: &Tree) -> Result<BTreeSet<Tree>, Error> {
    let mut out = BTreeSet::new();
    for y in m.apply(x)? {
        out.extend(n.apply(&y)?);
    }
    Ok(out)
}

fn composition_semantics() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_c0de);
    let mut checked = 0;
    let mut guaranteed = 0;
    for (name, ms, ns, a, b) in composition_matrix() {
        let (m, n) = (stt(ms), stt(ns));
        let (pm, pn) = (m.props(), n.props());
        let cond_a = pm.deterministic || pn.linear;
        let cond_b = pm.total || pn.nondeleting;
        ensure((cond_a, cond_b) == (a, b), || format!("{name}: fixture conditions are ({cond_a}, {cond_b})"))?;
        let verdict = compose_semantics_check(&m, &n);
        let is_guaranteed = matches!(verdict, CompositionGuarantee::Guaranteed { .. });
        ensure(is_guaranteed == (a && b), || format!("{name}: verdict {verdict}"))?;
        let c = syntactic_compose(&m, &n).map_err(err)?;
        if !is_guaranteed {
            continue;
        }
        guaranteed += 1;
        for _ in 0..200 {
            let x = random_tree(&mut rng, 3);
            let direct = c.apply(&x).map_err(|e| format!("{name} on {x}: {e}"))?;
            let via = sequential(&m, &n, &x).map_err(|e| format!("{name} on {x}: {e}"))?;
            ensure(direct == via, || format!("{name} on {x}: composite {direct:?}, sequential {via:?}"))?;
            checked += 1;
        }
    }
    Ok(format!("8 pairs, {guaranteed} guaranteed, {checked} inputs with equal output sets"))
}

fn alphabetic_closure() -> Outcome {
    let fs = alphabetic();
    for (name, m) in &fs {
        ensure(m.props().alphabetic, || format!("fixture {name} is not alphabetic"))?;
    }
    let mut pairs = 0;
    for (a, m) in &fs {
        for (b, n) in &fs {
            let c = syntactic_compose(m, n).map_err(err)?;
            ensure(c.props().alphabetic, || format!("{a} ; {b} is not alphabetic:\n{c}"))?;
            c.to_tdtt().map_err(|e| format!("{a} ; {b}: {e}"))?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} composites alphabetic"))
}

fn coverage(label: &str, c: &Coverage) -> Result<String, String> {
    if c.complete() {
        Ok(format!("{label}: {} trees via {} evaluations", c.trees, c.evaluated))
    } else if let Some(f) = c.failures.first() {
        Err(format!("{label}: {} disagreements, first {f}", c.failures.len()))
    } else {
        Err(format!("{label}: covered {} of {} trees", c.trees, universe::FULL_COUNT))
    }
}

fn check_domain(name: &str, m: &Stt) -> Result<String, String> {
    let d = domain_srtg(m).map_err(err)?.to_sta();
    let profile = |x: &Tree| -> Vec<bool> {
        (0..m.states.len()).map(|q| m.apply_from(q, x, usize::MAX).map(|o| !o.is_empty()).unwrap_or(false)).collect()
    };
    let c = exhaustive(
        |x| (profile(x), d.run(x).unwrap()),
        |x| match (m.apply(x), d.member(x)) {
            (Ok(out), Ok(mem)) => !out.is_empty() == mem,
            _ => false,
        },
    );
    coverage(&format!("domain {name}"), &c)
}

fn check_backward(name: &str, m: &Stt, a: &Sta) -> Result<String, String> {
    let back = backward_apply(m, a).map_err(err)?.to_sta();
    let profile = |x: &Tree| -> Vec<BTreeSet<BTreeSet<usize>>> {
        (0..m.states.len())
            .map(|q| {
                m.apply_from(q, x, usize::MAX)
                    .unwrap_or_default()
                    .iter()
                    .map(|o| a.run(o).unwrap_or_default())
                    .collect()
            })
            .collect()
    };
    let c = exhaustive(
        |x| (profile(x), back.run(x).unwrap()),
        |x| match (m.apply(x), back.member(x)) {
            (Ok(out), Ok(mem)) => out.iter().any(|o| a.member(o).unwrap_or(false)) == mem,
            _ => false,
        },
    );
    coverage(&format!("backward {name}"), &c)
}

/// The transducer must keep the shape and the order of subtrees, and every
/// output label in 0..=12 must come from an input label in 0..=12; then
/// every input producing an output of the universe lies in the universe.
fn check_forward(name: &str, m: &Stt, g: &Srtg) -> Result<String, String> {
    let gs = g.to_sta();
    let f = forward_apply_slin(m, g).map_err(err)?.to_sta();
    let in_window = |o: &Tree| o.depth() <= 2 && o.labels().iter().all(|l| matches!(l.as_int(), Some(0..=12)));
    let mut pre: HashMap<Tree, Vec<(usize, Tree)>> = HashMap::new();
    for x in universe::all_trees(2) {
        for q in 0..m.states.len() {
            for o in m.apply_from(q, &x, usize::MAX).map_err(err)? {
                if in_window(&o) {
                    pre.entry(o).or_default().push((q, x.clone()));
                }
            }
        }
    }
    let roots: Vec<&FnTerm> = m
        .rules
        .iter()
        .filter_map(|r| match &r.rhs {
            Term::Node(f, _) => Some(f),
            Term::Leaf(_) => None,
        })
        .collect();
    let brute = |z: &Tree| -> bool {
        let mut kids: Vec<Vec<Tree>> = vec![Vec::new()];
        for c in z.children() {
            let options: BTreeSet<&Tree> = pre.get(c).map(|v| v.iter().map(|(_, x)| x).collect()).unwrap_or_default();
            kids = kids
                .iter()
                .flat_map(|k| {
                    options.iter().map(move |x| {
                        let mut k = k.clone();
                        k.push((*x).clone());
                        k
                    })
                })
                .collect();
        }
        universe::LABELS.map(Label::Int).any(|a| {
            roots.iter().any(|r| r.apply(&a).as_ref() == Some(z.label()))
                && kids.iter().any(|k| {
                    let x = Tree::new(a.clone(), k.clone());
                    gs.member(&x).unwrap_or(false) && m.apply(&x).map(|o| o.contains(z)).unwrap_or(false)
                })
        })
    };
    let key = |z: &Tree| {
        let sources: BTreeSet<(usize, BTreeSet<usize>)> = pre
            .get(z)
            .map(|v| v.iter().map(|(q, x)| (*q, gs.run(x).unwrap())).collect())
            .unwrap_or_default();
        (sources, f.run(z).unwrap())
    };
    let c = exhaustive(key, |z| f.member(z).map(|mem| mem == brute(z)).unwrap_or(false));
    coverage(&format!("forward {name}"), &c)
}

fn analysis_exhaustive() -> Outcome {
    let (division, increment, two) = (stt(DIVISION), stt(INCREMENT), stt(TWO_STATE));
    let ex = sta(EX_STA);
    let ex_grammar = Srtg::from_sta(&ex);
    let lines = [
        check_domain("division", &division)?,
        check_domain("increment", &increment)?,
        check_domain("two-state", &two)?,
        check_backward("division/div3", &division, &sta(DIV3))?,
        check_backward("increment/evens", &increment, &sta(EVENS))?,
        check_backward("two-state/ex", &two, &ex)?,
        check_forward("increment/ex", &increment, &ex_grammar)?,
        check_forward("two-state/ex", &two, &ex_grammar)?,
        check_forward("two-state/all", &two, &Srtg::universal(Theory::Natural, 2))?,
    ];
    Ok(lines.join("; "))
}

fn duplication_guard() -> Outcome {
    let m = stt(DUPLICATION);
    let any = srtg("(srtg :theory int :k 1)\n(init s)\n(rule s (pred true))\n(rule s (pred true (state s)))");
    for (what, r) in [("forward", forward_apply_slin(&m, &any)), ("range", range_slin(&m))] {
        match r {
            Err(Error::Precondition(msg)) => {
                ensure(msg.contains("(fn id (fn id))"), || format!("{what}: message does not name the rule: {msg}"))?
            }
            Err(e) => return Err(format!("{what}: wrong error {e}")),
            Ok(g) => return Err(format!("{what}: produced a grammar\n{g}")),
        }
    }
    Ok("forward and range refuse with a precondition error".into())
}

fn random_sta(rng: &mut StdRng) -> Sta {
    let n = rng.gen_range(1..=4);
    let guard = |rng: &mut StdRng| match rng.gen_range(0..5) {
        0 => Predicate::True,
        1 => {
            let m = rng.gen_range(2..=4);
            Predicate::modulo(m as i128, rng.gen_range(0..m) as i128).unwrap()
        }
        2 => Predicate::range(Some(rng.gen_range(-3..=1)), Some(rng.gen_range(0..=3))),
        3 => Predicate::negate(Predicate::div(rng.gen_range(2..=3))),
        _ => Predicate::eq(Label::Int(rng.gen_range(-3..=3))),
    };
    let rules = (0..rng.gen_range(2..=8))
        .map(|_| StaRule {
            lhs: (0..rng.gen_range(0..=2)).map(|_| rng.gen_range(0..n)).collect(),
            guard: guard(rng),
            rhs: rng.gen_range(0..n),
        })
        .collect();
    let mut finals: BTreeSet<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
    if finals.is_empty() {
        finals.insert(rng.gen_range(0..n));
    }
    Sta::new(2, Theory::Integer, (0..n).map(|i| format!("s{i}")).collect(), finals, rules).unwrap()
}

fn small_trees(labels: &[i64], depth: usize) -> Vec<Tree> {
    if depth == 0 {
        return Vec::new();
    }
    let smaller = small_trees(labels, depth - 1);
    let mut out = Vec::new();
    for &a in labels {
        out.push(Tree::leaf(Label::Int(a)));
        for c in &smaller {
            out.push(Tree::new(Label::Int(a), vec![c.clone()]));
            for d in &smaller {
                out.push(Tree::new(Label::Int(a), vec![c.clone(), d.clone()]));
            }
        }
    }
    out
}

fn sta_boolean_algebra() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let autos: Vec<Sta> = (0..20).map(|_| random_sta(&mut rng)).collect();
    let mut trees = small_trees(&[-3, -2, -1, 0, 1, 2, 3], 2);
    for _ in 0..300 {
        let x = random_tree(&mut rng, 4);
        trees.push(x.children().first().cloned().unwrap_or(x));
    }
    let mut counterexamples = 0;
    for (i, a) in autos.iter().enumerate() {
        let not_a = a.complement(2).map_err(err)?;
        let back = not_a.complement(2).map_err(err)?;
        for x in &trees {
            ensure(a.member(x).map_err(err)? == back.member(x).map_err(err)?, || {
                format!("automaton {i}: double complement differs on {x}\n{a}")
            })?;
        }
        ensure(a.intersect(&not_a).map_err(err)?.is_empty(), || format!("automaton {i}: A ∩ ¬A is not empty"))?;
        ensure(a.included(a).map_err(err)?.is_none(), || format!("automaton {i}: not included in itself"))?;
        let b = &autos[(i + 1) % autos.len()];
        match a.included(b).map_err(err)? {
            Some(w) => {
                counterexamples += 1;
                ensure(a.member(&w).map_err(err)? && !b.member(&w).map_err(err)?, || {
                    format!("automaton {i}: invalid counterexample {w}")
                })?;
            }
            None => {
                for x in &trees {
                    ensure(!a.member(x).map_err(err)? || b.member(x).map_err(err)?, || {
                        format!("automaton {i}: claimed inclusion fails on {x}")
                    })?;
                }
            }
        }
    }
    Ok(format!("20 automata on {} trees, {counterexamples} counterexamples validated", trees.len()))
}

fn theory_oracles() -> Outcome {
    let mut rng = StdRng::seed_from_u64(42);
    const WINDOW: i64 = 100;
    for i in 0..500 {
        let phi = oracles::random_predicate(&mut rng, 3);
        let bound = 51 + oracles::period(&phi);
        for (theory, natural) in [(Theory::Integer, false), (Theory::Natural, true)] {
            let got = theory.satisfiable(&phi).and_then(|l| l.as_int());
            let want = oracles::scan_witness(&phi, bound, natural);
            ensure(got == want, || format!("formula {i} {phi} over {theory}: witness {got:?}, scan {want:?}"))?;
        }
        let f = oracles::random_function(&mut rng);
        let pre = preimage(&f, &phi).map_err(err)?;
        for x in -WINDOW..=WINDOW {
            let a = Label::Int(x);
            let want = f.apply(&a).is_some_and(|b| phi.holds(&b));
            ensure(pre.holds(&a) == want, || format!("formula {i}: preimage of {phi} under {f} wrong at {x}"))?;
        }
        let img = Theory::Integer.image(&f, &phi).map_err(err)?;
        let reach = (12 * WINDOW + 21).max(bound);
        let mut hit = BTreeSet::new();
        for x in -reach..=reach {
            let a = Label::Int(x);
            if phi.holds(&a) {
                if let Some(Label::Int(y)) = f.apply(&a) {
                    if (-WINDOW..=WINDOW).contains(&y) {
                        hit.insert(y);
                    }
                }
            }
        }
        for y in -WINDOW..=WINDOW {
            ensure(img.holds(&Label::Int(y)) == hit.contains(&y), || {
                format!("formula {i}: image of {phi} under {f} wrong at {y}")
            })?;
        }
    }
    Ok("500 formulas: witnesses, preimages and images agree with scans".into())
}

fn vta_trees(unary: &[i64], binary: bool, depth: usize) -> Vec<Tree> {
    if depth == 0 {
        return Vec::new();
    }
    let smaller = vta_trees(unary, binary, depth - 1);
    let mut out = vec![Tree::leaf(Label::sym("c"))];
    for &a in unary {
        for c in &smaller {
            out.push(Tree::new(Label::Int(a), vec![c.clone()]));
        }
    }
    if binary {
        for c in &smaller {
            for d in &smaller {
                out.push(Tree::new(Label::sym("f"), vec![c.clone(), d.clone()]));
            }
        }
    }
    out
}

fn vta_membership() -> Outcome {
    let chain = vta(VTA_CHAIN);
    ensure(chain.member(&t("5(5(c))")).map_err(err)?, || "5(5(c)) rejected".into())?;
    for s in ["5(6(c))", "c"] {
        ensure(!chain.member(&t(s)).map_err(err)?, || format!("{s} accepted"))?;
    }
    let pins = [
        (vta(&vta_pair(1)), "1(c)", false),
        (vta(&vta_pair(1)), "0(c)", false),
        (vta(&vta_pair(2)), "0(c)", true),
        (vta(&vta_pair(2)), "1(2(c))", true),
        (vta(&vta_pair(2)), "1(1(c))", false),
        (vta(VTA_FREE), "f(2(c),1(c))", true),
        (vta(VTA_FREE), "f(1(c),2(c))", true),
        (vta(VTA_FREE), "f(c,1(c))", false),
        (vta(VTA_FREE), "f(1(c),1(c))", true),
    ];
    for (b, s, want) in &pins {
        ensure(b.member(&t(s)).map_err(err)? == *want, || format!("{s}: expected member = {want}"))?;
    }
    let pool: Vec<Label> = (-300..=300).map(Label::Int).collect();
    let cases = [
        ("chain", chain, vta_trees(&[-1, 0, 5, 6], false, 5)),
        ("free", vta(VTA_FREE), vta_trees(&[0, 1, 2], true, 3)),
        ("pair-tight", vta(&vta_pair(1)), vta_trees(&[0, 1], false, 4)),
        ("pair-roomy", vta(&vta_pair(2)), vta_trees(&[0, 1, 2], false, 4)),
    ];
    let mut checked = 0;
    let mut accepted = 0;
    for (name, b, trees) in &cases {
        for x in trees {
            let got = b.member(x).map_err(err)?;
            let want = oracles::vta_member(b, x, &pool);
            ensure(got == want, || format!("{name}: {x} member {got}, oracle {want}"))?;
            checked += 1;
            accepted += got as usize;
        }
    }
    Ok(format!("{checked} trees over 4 fixtures agree with the assignment oracle ({accepted} accepted)"))
}

fn normal_form() -> Outcome {
    let mut grammars = srtg_fixtures();
    for (name, src) in [("domain division", DIVISION), ("domain two-state", TWO_STATE)] {
        grammars.push((name, domain_srtg(&stt(src)).map_err(err)?));
    }
    let mut lines = Vec::new();
    for (name, g) in &grammars {
        let n = g.normalize();
        ensure(n.is_clean() && n.is_reduced() && n.is_normal_form(), || {
            format!("{name}: clean {} reduced {} normal {}\n{n}", n.is_clean(), n.is_reduced(), n.is_normal_form())
        })?;
        let (gs, ns) = (g.to_sta(), n.to_sta());
        let c = exhaustive(
            |x| (gs.run(x).unwrap(), ns.run(x).unwrap()),
            |x| g.member(x).ok() == n.member(x).ok(),
        );
        lines.push(coverage(name, &c)?);
    }
    Ok(lines.join("; "))
}

struct Criterion {
    title: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { title: "sta example suite", limit: secs(1), run: sta_example },
        Criterion { title: "stt example suite", limit: secs(1), run: stt_example },
        Criterion { title: "guaranteed composition semantics", limit: secs(30), run: composition_semantics },
        Criterion { title: "alphabetic composition", limit: secs(30), run: alphabetic_closure },
        Criterion { title: "domain/backward/forward exhaustive", limit: secs(60), run: analysis_exhaustive },
        Criterion { title: "duplication precondition", limit: secs(1), run: duplication_guard },
        Criterion { title: "sta boolean algebra", limit: secs(30), run: sta_boolean_algebra },
        Criterion { title: "theory oracle agreement", limit: secs(60), run: theory_oracles },
        Criterion { title: "vta membership", limit: secs(30), run: vta_membership },
        Criterion { title: "srtg normal form", limit: secs(60), run: normal_form },
    ];
    let only: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        if only.is_some_and(|n| n != i + 1) {
            continue;
        }
        let start = Instant::now();
        let result = (c.run)();
        let took = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if took <= c.limit => (true, d),
            Ok(d) => (false, format!("too slow; {d}")),
            Err(e) => (false, e),
        };
        failed += !ok as usize;
        println!(
            "criterion {:>2} {} {} ({:.2} s, limit {} s): {}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            c.title,
            took.as_secs_f64(),
            c.limit.as_secs(),
            detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
