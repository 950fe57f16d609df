//! Acceptance suite: one pass/fail line per criterion, each under its time
//! limit.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use relcoalg::bisim::{soundness_completeness_report, Sample};
use relcoalg::finrel::{is_weak_pullback, pushout};
use relcoalg::lts::{
    automaton_relator, is_twisted_bisimulation_clausal, linear_witness, minimization_family, two_loops_example,
};
use relcoalg::relator::{is_lax_extension, is_normal, preserves_converses};
use relcoalg::submonoid::{all_uc_submonoids, enumerate_nle, s_of_relator, LatticeOptions};
use relcoalg::{
    is_simulation, minimal_witness, parse_functor, similarity, twisted_relator, FinFun, FinRel, FinSet,
    FunctorExpr, RelatorSpec, TwistedSpec, UCSubmonoid,
};
use serde_json::Value as Json;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn ab() -> FinSet {
    FinSet::new(["a", "b"]).unwrap()
}

fn rel(labels: &FinSet, pairs: &[(&str, &str)]) -> FinRel {
    FinRel::from_named_pairs(labels, labels, pairs.iter().copied()).unwrap()
}

const PHI_A: [(&str, &str); 3] = [("a", "b"), ("a", "a"), ("b", "a")];
const PHI_B: [(&str, &str); 3] = [("a", "b"), ("b", "b"), ("b", "a")];

fn diamond() -> [(&'static str, UCSubmonoid); 4] {
    let l = ab();
    [
        ("bottom", UCSubmonoid::generate(&l, &[]).unwrap()),
        ("A_a", UCSubmonoid::generate(&l, &[rel(&l, &PHI_A)]).unwrap()),
        ("A_b", UCSubmonoid::generate(&l, &[rel(&l, &PHI_B)]).unwrap()),
        ("top", UCSubmonoid::generate(&l, &[rel(&l, &PHI_A), rel(&l, &PHI_B)]).unwrap()),
    ]
}

fn criterion_1() -> Outcome {
    let out = relcoalg_cli::run(["relcoalg", "lattice", "--labels", "a,b", "--format", "json"]);
    ensure(out.code == 0, || format!("exit {}: {}", out.code, out.stderr))?;
    let json: Json = ok(serde_json::from_str(&out.stdout))?;
    let nodes = json["nodes"].as_array().ok_or("no nodes")?;
    ensure(nodes.len() == 4, || format!("{} nodes", nodes.len()))?;
    let expected = diamond();
    let mut names = Vec::new();
    for n in nodes {
        let sub = ok(UCSubmonoid::from_json(&ok(serde_json::from_value(n["submonoid"].clone()))?))?;
        let name = expected.iter().find(|(_, s)| *s == sub).map(|(n, _)| *n).ok_or("unexpected node")?;
        names.push(name);
    }
    let hasse: BTreeSet<(&str, &str)> = json["hasse"]
        .as_array()
        .ok_or("no hasse")?
        .iter()
        .map(|e| (names[e[0].as_u64().unwrap() as usize], names[e[1].as_u64().unwrap() as usize]))
        .collect();
    let want: BTreeSet<(&str, &str)> =
        [("bottom", "A_a"), ("bottom", "A_b"), ("A_a", "top"), ("A_b", "top")].into_iter().collect();
    ensure(hasse == want, || format!("hasse {hasse:?}"))?;
    Ok("4 nodes bottom, A_a, A_b, top in a diamond".into())
}

fn criterion_2() -> Outcome {
    let two = ab();
    let one = FinSet::new(["*"]).unwrap();
    let z = rel(&two, &[("a", "a"), ("b", "a"), ("b", "b")]);
    let a = ok(FinFun::new(one.clone(), two.clone(), vec![0]))?.graph();
    let cobarr = ok(RelatorSpec::cobarr(FunctorExpr::Id))?;
    let composite = ok(cobarr.lift(&ok(a.compose(&z))?))?;
    let lifts = ok(ok(cobarr.lift(&a))?.compose(&ok(cobarr.lift(&z))?))?;
    ensure(composite == a, || format!("lift(z.a) = {:?}", composite.named_pairs()))?;
    ensure(lifts == FinRel::full(&one, &two), || format!("lift(z).lift(a) = {:?}", lifts.named_pairs()))?;
    ensure(!lifts.leq(&composite).unwrap(), || "composition holds".into())?;
    Ok("lift(z.a) = graph(a), lift(z).lift(a) = full 1x2".into())
}

fn criterion_3() -> Outcome {
    let lts = two_loops_example();
    let c = ok(lts.to_coalgebra())?;
    let s = lts.states();
    let seed = (s.index_of("p").unwrap(), s.index_of("q").unwrap());
    let barr = RelatorSpec::barr(lts.functor());
    let top = twisted_relator(&ok(TwistedSpec::top(&ab()))?);
    let standard = ok(minimal_witness(&barr, &c, &c, seed))?.ok_or("no standard witness")?;
    let want = FinRel::from_named_pairs(s, s, [("p", "q"), ("x", "x"), ("x", "y"), ("y", "y"), ("y", "x")]).unwrap();
    ensure(standard == want, || format!("standard witness {:?}", standard.named_pairs()))?;
    let twisted = ok(minimal_witness(&top, &c, &c, seed))?.ok_or("no twisted witness")?;
    ensure(twisted.len() == 4, || format!("twisted witness {:?}", twisted.named_pairs()))?;
    Ok(format!("standard 5 pairs, twisted {:?}", twisted.named_pairs()))
}

fn criterion_4() -> Outcome {
    let (n, m) = (3, 4);
    let lts = ok(minimization_family(n, m))?;
    let c = ok(lts.to_coalgebra())?;
    let w = ok(linear_witness(n, m))?;
    ensure(ok(is_twisted_bisimulation_clausal(&w, &lts, &lts))?, || "clausal check fails".into())?;
    let top = twisted_relator(&ok(TwistedSpec::top(&ab()))?);
    ensure(ok(is_simulation(&top, &w, &c, &c))?, || "relator check fails".into())?;
    ensure(w.len() == 2 * 2 * (n + m) - 4, || format!("{} pairs", w.len()))?;
    let cross = |r: &FinRel| r.pairs().filter(|&(x, y)| x < n && y >= n).count();
    let bottom = twisted_relator(&ok(TwistedSpec::bottom(&ab()))?);
    for i in 0..n {
        for j in 0..m {
            let std = ok(minimal_witness(&bottom, &c, &c, (i, n + j)))?.ok_or("not bisimilar")?;
            ensure(cross(&std) == n * m, || format!("(s{i},t{j}): {} cross pairs", cross(&std)))?;
        }
    }
    Ok(format!(
        "linear witness {} pairs ({} cross), every standard witness has {} cross pairs",
        w.len(),
        cross(&w),
        n * m
    ))
}

fn criterion_5() -> Outcome {
    let abc = FinSet::new(["a", "b", "c"]).unwrap();
    let mut phi = FinRel::full(&abc, &abc);
    phi.remove(0, 0);
    phi.remove(1, 2);
    let spec = RelatorSpec::submonoid(ok(UCSubmonoid::generate(&abc, &[phi.clone()]))?);
    let lax = ok(is_lax_extension(&spec, 2))?;
    ensure(lax.holds(), || lax.to_string())?;
    let normal = ok(is_normal(&spec, 3))?;
    ensure(normal.holds(), || normal.to_string())?;
    let conv = ok(preserves_converses(&spec, 3))?;
    ensure(!conv.holds(), || "converses preserved".into())?;
    let id = relcoalg::functor::Value::Func(vec![0, 1, 2]);
    let relates = |r: &FinRel| ok(spec.prepare(r)).map(|l| l.relates(&id, &id));
    ensure(relates(&phi)?, || "1_3 not related under phi".into())?;
    ensure(!relates(&phi.converse())?, || "1_3 related under the converse".into())?;
    Ok(format!("lax and normal; converse certificate: {}", conv.counterexample.map(|c| c.to_string()).unwrap_or_default()))
}

fn criterion_6() -> Outcome {
    let lattice = ok(enumerate_nle(&ab(), LatticeOptions::default()))?;
    let all = ok(all_uc_submonoids(&ab()))?;
    for s in lattice.nodes.iter().chain(&all) {
        let back = ok(s_of_relator(&RelatorSpec::submonoid(s.clone())))?;
        ensure(back == s.table(), || format!("round trip fails for {}", s.generators_text()))?;
    }
    let non_normal = all.iter().filter(|s| !s.all_normal()).count();
    Ok(format!("{} lattice nodes and {} submonoids ({non_normal} non-normal)", lattice.nodes.len(), all.len()))
}

fn criterion_7() -> Outcome {
    let top = ok(TwistedSpec::top(&ab()))?;
    let mut lines = Vec::new();
    for src in ["Pow", "Exp{a,b}", "2 * Exp{a,b}", "C{c} + C{b1,b2} * Id", "Exp{a,b} . Pow"] {
        let f = ok(parse_functor(src))?;
        let sample = ok(Sample::pairs(&f, 3, 200, 7))?;
        let barr = RelatorSpec::barr(f.clone());
        let a = ok(soundness_completeness_report(&barr, &sample))?;
        ensure(a.sound(), || a.to_string())?;
        let b = ok(soundness_completeness_report(&ok(RelatorSpec::cobarr(f.clone()))?, &sample))?;
        ensure(b.sound() && b.complete(), || b.to_string())?;
        let twisted = match src {
            "Exp{a,b}" => Some(RelatorSpec::submonoid(top.submonoid().clone())),
            "2 * Exp{a,b}" => Some(ok(automaton_relator(&top))?),
            "Exp{a,b} . Pow" => Some(twisted_relator(&top)),
            _ => None,
        };
        if let Some(t) = &twisted {
            for g in &sample.groups {
                let (x, y) = (&g[0], &g[1]);
                ensure(ok(similarity(t, x, y))? == ok(similarity(&barr, x, y))?, || format!("{src}: twisted differs"))?;
            }
        }
        lines.push(format!("{src}: a,b{}", if twisted.is_some() { ",c" } else { "" }));
    }
    Ok(format!("200 pairs each; {}", lines.join("; ")))
}

fn criterion_8() -> Outcome {
    let mut checked = 0;
    for n in 0..=3 {
        for m in 0..=3 {
            for r in FinRel::all(&FinSet::range(n), &FinSet::range(m)) {
                let span = r.tabulation();
                let weak = ok(is_weak_pullback(&pushout(&span), &span))?;
                ensure(weak == r.is_difunctional(), || format!("mismatch at {:?}", r.named_pairs()))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} relations, no mismatch"))
}

fn criterion_9() -> Outcome {
    for labels in [FinSet::empty(), FinSet::new(["*"]).unwrap()] {
        let l = ok(enumerate_nle(&labels, LatticeOptions::default()))?;
        ensure(l.nodes.len() == 1, || format!("{} nodes for {} labels", l.nodes.len(), labels.len()))?;
    }
    let star = FinSet::new(["∗"]).unwrap();
    let mut normal_lax = 0;
    let candidates = ok(all_uc_submonoids(&star))?;
    for s in &candidates {
        let spec = ok(RelatorSpec::sum_of(vec![
            RelatorSpec::barr(FunctorExpr::numeral(2)),
            ok(RelatorSpec::prod_of(vec![RelatorSpec::barr(FunctorExpr::numeral(3)), RelatorSpec::submonoid(s.clone())]))?,
        ]))?;
        if ok(is_normal(&spec, 3))?.holds() && ok(is_lax_extension(&spec, 2))?.holds() {
            normal_lax += 1;
        }
    }
    ensure(normal_lax == 1, || format!("{normal_lax} normal lax extensions"))?;
    let barr = RelatorSpec::barr(ok(parse_functor("2 + 3 * Id"))?);
    ensure(ok(is_normal(&barr, 3))?.holds() && ok(is_lax_extension(&barr, 2))?.holds(), || "Barr fails".into())?;
    Ok(format!("one node each; 1 of {} sum relators is normal and lax", candidates.len()))
}

fn sandwiched(spec: &RelatorSpec, max: usize) -> Result<u64, String> {
    let barr = RelatorSpec::barr(spec.functor().clone());
    let cobarr = ok(RelatorSpec::cobarr(spec.functor().clone()))?;
    let mut cases = 0;
    for n in 0..=max {
        for m in 0..=max {
            for r in FinRel::all(&FinSet::range(n), &FinSet::range(m)) {
                let (lo, mid, hi) = (ok(barr.lift(&r))?, ok(spec.lift(&r))?, ok(cobarr.lift(&r))?);
                ensure(lo.leq(&mid).unwrap() && mid.leq(&hi).unwrap(), || format!("{spec} at {:?}", r.named_pairs()))?;
                cases += 1;
            }
        }
    }
    Ok(cases)
}

fn criterion_10() -> Outcome {
    let pow = FunctorExpr::Pow;
    let pool = vec![
        RelatorSpec::barr(pow.clone()),
        ok(RelatorSpec::cobarr(pow.clone()))?,
        RelatorSpec::pow_box(),
        RelatorSpec::pow_diamond(),
        ok(RelatorSpec::sup(vec![RelatorSpec::pow_box(), RelatorSpec::pow_diamond()]))?,
        ok(RelatorSpec::inf(vec![RelatorSpec::pow_box(), RelatorSpec::pow_diamond()]))?,
        RelatorSpec::up_to_difunctional(RelatorSpec::barr(pow)),
    ];
    let mut specs = Vec::new();
    for spec in pool {
        if ok(is_normal(&spec, 3))?.holds() && ok(is_lax_extension(&spec, 2))?.holds() {
            specs.push(spec);
        }
    }
    let pow_count = specs.len();
    let lattice = ok(enumerate_nle(&ab(), LatticeOptions::default()))?;
    specs.extend(lattice.nodes.iter().cloned().map(RelatorSpec::submonoid));
    let mut cases = 0;
    for spec in &specs {
        cases += sandwiched(spec, 3)?;
    }
    Ok(format!("{pow_count} powerset and {} exponential extensions, {cases} lifts", lattice.nodes.len()))
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 10] = [
        ("lattice of Exp{a,b}", 5, criterion_1),
        ("coBarr over Id fails lax composition", 1, criterion_2),
        ("two-loop witnesses", 5, criterion_3),
        ("minimization family n=3, m=4", 30, criterion_4),
        ("converse preservation failure on three labels", 60, criterion_5),
        ("submonoid round trip", 60, criterion_6),
        ("oracle agreement", 300, criterion_7),
        ("difunctional iff weak pullback", 60, criterion_8),
        ("uniqueness for C + B x Id", 30, criterion_9),
        ("sandwich", 120, criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > Duration::from_secs(*limit) => {
                Err(format!("took {:.2}s, limit {limit}s ({detail})", elapsed.as_secs_f64()))
            }
            r => r,
        };
        match result {
            Ok(detail) => println!("[PASS] criterion {}: {name} ({:.2}s) {detail}", i + 1, elapsed.as_secs_f64()),
            Err(e) => {
                failed += 1;
                println!("[FAIL] criterion {}: {name} ({:.2}s) {e}", i + 1, elapsed.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
