use proptest::prelude::*;
use relcoalg::bisim::{all_simulations, is_simulation};
use relcoalg::lts::{
    automaton_relator, is_twisted_bisimulation_clausal, linear_witness, minimization_automaton, minimization_family,
    twisted_clause_failure, two_loops_example,
};
use relcoalg::{behavioural_equivalence, minimal_witness, similarity, twisted_relator, FinRel, FinSet, Lts, RelatorSpec, TwistedSpec};

fn ab() -> FinSet {
    FinSet::new(["a", "b"]).unwrap()
}

/// An LTS on `n` states over `{a, b}` whose transitions are the set bits
/// of `code`, bit `(s * 2 + l) * n + d`.
fn lts_from_code(n: usize, code: u32) -> Lts {
    let trans = (0..n * 2 * n).filter(|&i| code >> i & 1 == 1).map(|i| (i / (2 * n), i / n % 2, i % n));
    Lts::new(FinSet::range(n), ab(), trans).unwrap()
}

fn lts_strategy() -> impl Strategy<Value = Lts> {
    (1..=3usize, any::<u32>()).prop_map(|(n, code)| lts_from_code(n, code))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn clausal_check_agrees_with_the_relator(left in lts_strategy(), right in lts_strategy()) {
        let relator = twisted_relator(&TwistedSpec::top(&ab()).unwrap());
        let (a, b) = (left.to_coalgebra().unwrap(), right.to_coalgebra().unwrap());
        for r in FinRel::all(left.states(), right.states()) {
            prop_assert_eq!(
                is_twisted_bisimulation_clausal(&r, &left, &right).unwrap(),
                is_simulation(&relator, &r, &a, &b).unwrap(),
                "{:?}", r
            );
        }
    }

    #[test]
    fn twisted_similarity_is_behavioural_equivalence(left in lts_strategy(), right in lts_strategy()) {
        let (a, b) = (left.to_coalgebra().unwrap(), right.to_coalgebra().unwrap());
        let beh = behavioural_equivalence(&a, &b).unwrap();
        for spec in [TwistedSpec::bottom(&ab()).unwrap(), TwistedSpec::top(&ab()).unwrap()] {
            prop_assert_eq!(&similarity(&twisted_relator(&spec), &a, &b).unwrap(), &beh);
        }
        prop_assert_eq!(&similarity(&RelatorSpec::barr(left.functor()), &a, &b).unwrap(), &beh);
    }

    #[test]
    fn twisting_never_enlarges_minimal_witnesses(left in lts_strategy(), right in lts_strategy()) {
        let (a, b) = (left.to_coalgebra().unwrap(), right.to_coalgebra().unwrap());
        let bottom = twisted_relator(&TwistedSpec::bottom(&ab()).unwrap());
        let top = twisted_relator(&TwistedSpec::top(&ab()).unwrap());
        for x in 0..a.len() {
            for y in 0..b.len() {
                let lo = minimal_witness(&bottom, &a, &b, (x, y)).unwrap();
                let hi = minimal_witness(&top, &a, &b, (x, y)).unwrap();
                prop_assert_eq!(lo.is_some(), hi.is_some());
                if let (Some(lo), Some(hi)) = (lo, hi) {
                    prop_assert!(hi.len() <= lo.len());
                }
            }
        }
    }
}

#[test]
fn bottom_twisted_simulations_are_ordinary_bisimulations() {
    let bottom = twisted_relator(&TwistedSpec::bottom(&ab()).unwrap());
    for n in 1..=2 {
        for code in 0..1u32 << (2 * n * n) {
            let lts = lts_from_code(n, code);
            let c = lts.to_coalgebra().unwrap();
            assert_eq!(
                all_simulations(&bottom, &c, &c).unwrap(),
                all_simulations(&RelatorSpec::barr(lts.functor()), &c, &c).unwrap()
            );
        }
    }
}

#[test]
fn automaton_and_transition_system_encodings_agree() {
    for (n, m) in [(1, 2), (2, 3), (3, 4)] {
        let lts = minimization_family(n, m).unwrap();
        let lts_c = lts.to_coalgebra().unwrap();
        let automaton = minimization_automaton(n, m).unwrap();
        for spec in [TwistedSpec::bottom(&ab()).unwrap(), TwistedSpec::top(&ab()).unwrap()] {
            let via_lts = minimal_witness(&twisted_relator(&spec), &lts_c, &lts_c, (0, n)).unwrap().unwrap();
            let via_automaton =
                minimal_witness(&automaton_relator(&spec).unwrap(), &automaton, &automaton, (0, n)).unwrap().unwrap();
            assert_eq!(via_lts, via_automaton, "{n},{m}");
        }
    }
}

#[test]
fn linear_witness_grows_linearly_and_standard_witness_quadratically() {
    for (n, m) in [(2, 3), (3, 4), (3, 5)] {
        let lts = minimization_family(n, m).unwrap();
        let w = linear_witness(n, m).unwrap();
        assert_eq!(w.len(), 4 * (n + m) - 4);
        let c = lts.to_coalgebra().unwrap();
        let top = twisted_relator(&TwistedSpec::top(&ab()).unwrap());
        assert!(is_simulation(&top, &w, &c, &c).unwrap());
        let bottom = twisted_relator(&TwistedSpec::bottom(&ab()).unwrap());
        let standard = minimal_witness(&bottom, &c, &c, (0, n)).unwrap().unwrap();
        assert_eq!(standard.len(), 2 * n * m);
        assert_eq!(standard.pairs().filter(|&(x, y)| x < n && y >= n).count(), n * m);
    }
}

#[test]
fn non_coprime_cycles_are_rejected() {
    assert!(minimization_family(2, 4).is_err());
    assert!(minimization_family(0, 1).is_err());
}

#[test]
fn clause_failure_names_the_broken_transfers() {
    let lts = two_loops_example();
    let states = lts.states();
    let x = states.index_of("x").unwrap();
    let p = states.index_of("p").unwrap();
    let r = FinRel::from_pairs(states, states, [(x, p)]).unwrap();
    let failure = twisted_clause_failure(&r, &lts, &lts).unwrap().unwrap();
    assert_eq!((failure.x.as_str(), failure.y.as_str()), ("x", "p"));
    assert_eq!(failure.broken.len(), 3);
    let three = Lts::new(FinSet::range(1), FinSet::new(["a", "b", "c"]).unwrap(), []).unwrap();
    let r = FinRel::full(three.states(), three.states());
    assert!(twisted_clause_failure(&r, &three, &three).is_err());
}

#[test]
fn text_and_json_formats_round_trip() {
    let lts = two_loops_example();
    assert_eq!(Lts::parse_text(&lts.to_text()).unwrap(), lts);
    let json = serde_json::to_string(&lts.to_json()).unwrap();
    assert_eq!(Lts::load(&json).unwrap(), lts);
    assert_eq!(Lts::load(&lts.to_text()).unwrap(), lts);
    assert_eq!(lts.to_dot().matches(" -> ").count(), lts.transition_count());
    assert!(Lts::parse_text("s -a-> ").is_err());
}
