use proptest::prelude::*;
use relcoalg::finrel::Span;
use relcoalg::relator::{
    barr_via_span, cobarr_equals_barr_of_closure, difunctional_functoriality_check, is_lax_extension, is_normal,
    is_relational_connector, preserves_converses, sandwich_check,
};
use relcoalg::submonoid::s_of_relator;
use relcoalg::{parse_functor, parse_relator, FinFun, FinRel, FinSet, RelatorSpec, UCSubmonoid};

const PHI_A: &str = "[(a,b),(a,a),(b,a)]";
const PHI_B: &str = "[(a,b),(b,b),(b,a)]";

fn ab() -> FinSet {
    FinSet::new(["a", "b"]).unwrap()
}

fn submon(gens: &str) -> RelatorSpec {
    parse_relator(&format!("submon(Exp{{a,b}}; gens: {gens})")).unwrap()
}

fn monotone_specs() -> Vec<RelatorSpec> {
    [
        "barr(Pow)",
        "cobarr(Pow)",
        "box(Pow)",
        "diamond(Pow)",
        "barr(MVal(N2))",
        "barr(2 + 3 * Id)",
        "cobarr(Id)",
        "upto-difun(barr(2 * Id))",
        "submon(Exp{a,b}; gens: [(a,b),(b,b),(b,a)])",
        "comp(submon(Exp{a,b}; gens: [[(a,b),(a,a),(b,a)],[(a,b),(b,b),(b,a)]]), barr(Pow))",
        "sup(box(Pow), diamond(Pow))",
        "inf(barr(Pow), box(Pow))",
    ]
    .iter()
    .map(|s| parse_relator(s).unwrap())
    .collect()
}

#[test]
fn every_lift_is_monotone() {
    for spec in monotone_specs() {
        for n in 0..=2 {
            for m in 0..=2 {
                let (x, y) = (FinSet::range(n), FinSet::range(m));
                let all: Vec<FinRel> = FinRel::all(&x, &y).collect();
                let lifts: Vec<FinRel> = all.iter().map(|r| spec.lift(r).unwrap()).collect();
                for (i, r) in all.iter().enumerate() {
                    for (j, s) in all.iter().enumerate() {
                        if r.leq(s).unwrap() {
                            assert!(lifts[i].leq(&lifts[j]).unwrap(), "{spec} on {n}x{m}");
                        }
                    }
                }
            }
        }
    }
}

/// A span with the same composite as `r`: each pair of the tabulation is
/// repeated according to `weights`, with at most 10 apex elements overall.
fn padded_span(r: &FinRel, weights: &[usize]) -> Span {
    let mut spare = 10usize.saturating_sub(r.len());
    let mut pairs = Vec::new();
    for (k, p) in r.pairs().enumerate() {
        let extra = (weights.get(k).copied().unwrap_or(0) % 3).min(spare);
        spare -= extra;
        pairs.extend(std::iter::repeat(p).take(1 + extra));
    }
    let apex = FinSet::range(pairs.len());
    Span::new(
        FinFun::new(apex.clone(), r.dom().clone(), pairs.iter().map(|p| p.0).collect()).unwrap(),
        FinFun::new(apex, r.cod().clone(), pairs.iter().map(|p| p.1).collect()).unwrap(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn barr_does_not_depend_on_the_span(
        src in prop::sample::select(vec!["Pow", "Exp{a,b}", "2 * Id + Id", "MVal(N2)", "MVal(Z2)", "MVal(Bool)", "Exp{a} . Pow"]),
        n in 0..=3usize,
        m in 0..=3usize,
        code in any::<u16>(),
        weights in prop::collection::vec(any::<usize>(), 9),
    ) {
        let f = parse_functor(src).unwrap();
        let (x, y) = (FinSet::range(n), FinSet::range(m));
        let r = FinRel::from_code(&x, &y, u64::from(code) & ((1u64 << (n * m)) - 1));
        let canonical = RelatorSpec::barr(f.clone()).lift(&r).unwrap();
        let padded = barr_via_span(&f, &padded_span(&r, &weights)).unwrap();
        prop_assert_eq!(canonical, padded);
    }
}

#[test]
fn submonoid_lifts_depend_only_on_the_submonoid() {
    let by_generators = submon(PHI_B);
    let by_members = RelatorSpec::submonoid(UCSubmonoid::from_members(ab(), &by_generators_members()).unwrap());
    for n in 0..=2 {
        for m in 0..=2 {
            for r in FinRel::all(&FinSet::range(n), &FinSet::range(m)) {
                assert_eq!(by_generators.lift(&r).unwrap(), by_members.lift(&r).unwrap());
            }
        }
    }
}

fn by_generators_members() -> Vec<FinRel> {
    let phi_b = FinRel::from_named_pairs(&ab(), &ab(), [("a", "b"), ("b", "b"), ("b", "a")]).unwrap();
    UCSubmonoid::generate(&ab(), &[phi_b]).unwrap().members()
}

#[test]
fn normal_submonoid_extensions_are_lax_connectors() {
    for gens in ["[]", PHI_A, PHI_B, &format!("[{PHI_A},{PHI_B}]")] {
        let spec = submon(gens);
        assert!(is_normal(&spec, 3).unwrap().holds(), "{spec}");
        assert!(is_lax_extension(&spec, 2).unwrap().holds(), "{spec}");
        assert!(is_relational_connector(&spec, 2).unwrap().holds(), "{spec}");
        assert!(difunctional_functoriality_check(&spec, 2).unwrap().holds(), "{spec}");
    }
}

#[test]
fn converse_closed_submonoids_preserve_converses() {
    // Both generators are symmetric, so the generated submonoids are closed
    // under converse.
    for gens in ["[]", PHI_A, PHI_B] {
        let spec = submon(gens);
        assert!(preserves_converses(&spec, 2).unwrap().holds(), "{spec}");
    }
    let barr = parse_relator("barr(2 + Pow)").unwrap();
    assert!(preserves_converses(&barr, 2).unwrap().holds());
}

#[test]
fn barr_is_a_normal_connector_on_weak_pullback_functors() {
    for src in ["Pow", "Exp{a,b}", "2 + 3 * Id", "MVal(Bool)"] {
        let spec = parse_relator(&format!("barr({src})")).unwrap();
        assert!(is_normal(&spec, 3).unwrap().holds(), "{spec}");
        assert!(is_relational_connector(&spec, 2).unwrap().holds(), "{spec}");
        assert!(is_lax_extension(&spec, 2).unwrap().holds(), "{spec}");
    }
}

#[test]
fn cobarr_is_barr_of_the_closure() {
    for src in ["Pow", "Exp{a,b}", "Id", "2 * Id"] {
        let f = parse_functor(src).unwrap();
        assert!(cobarr_equals_barr_of_closure(&f, 3).unwrap().holds(), "{src}");
    }
    let cobarr = parse_relator("cobarr(Pow)").unwrap();
    assert!(difunctional_functoriality_check(&cobarr, 2).unwrap().holds());
}

#[test]
fn sandwich_holds_for_normal_extensions() {
    for gens in ["[]", PHI_A, PHI_B] {
        let report = sandwich_check(&submon(gens), 2).unwrap();
        assert!(report.holds(), "{report}");
    }
}

#[test]
fn sup_of_the_single_generator_extensions() {
    let sup = RelatorSpec::sup(vec![submon(PHI_A), submon(PHI_B)]).unwrap();
    assert!(is_normal(&sup, 3).unwrap().holds());
    let induced = s_of_relator(&sup).unwrap();
    for part in [PHI_A, PHI_B] {
        let members = s_of_relator(&submon(part)).unwrap();
        assert!(members.iter().zip(&induced).all(|(&m, &i)| !m || i));
    }
    assert!(is_lax_extension(&sup, 2).unwrap().holds());
}

#[test]
fn box_diamond_sup_fails_laxity_with_a_concrete_certificate() {
    let sup = parse_relator("sup(box(Pow), diamond(Pow))").unwrap();
    let report = is_lax_extension(&sup, 2).unwrap();
    assert!(!report.holds());
    let cx = report.counterexample.unwrap();
    assert!(cx.to_string().contains("composition"), "{cx}");
}

#[test]
fn capped_counting_is_not_refinable_and_its_barr_relator_is_not_lax() {
    let f = parse_functor("MVal(N2)").unwrap();
    assert!(!relcoalg::functor::preservation_profile(&f).weak_pullbacks);
    let report = is_lax_extension(&RelatorSpec::barr(f), 2).unwrap();
    assert!(!report.holds());
}
