//! Property tests for the module-level invariants: serialization
//! round-trips, conservativity of normalization, provability preservation
//! of conclusion instantiation, and cut elimination on oracle-found proofs.

mod common;

use apds_core::complement::{build_negation_extension, tilde};
use apds_core::decide::member;
use apds_core::normalize::{erase_proof, to_small_step};
use apds_core::oracle;
use apds_core::parse::parse_system;
use apds_core::proof::{check_proof, eliminate_cuts, find_cut};
use apds_core::saturate::{extract_multi_automaton, saturate};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

proptest! {
    #[test]
    fn small_step_systems_roundtrip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_small_step(&mut rng, 0);
        let back = parse_system(&s.to_text()).unwrap();
        prop_assert_eq!(&back, &s);
        // rule classification is stable across the round-trip
        for (a, b) in s.rules().iter().zip(back.rules()) {
            prop_assert_eq!(a.kind(), b.kind());
        }
    }

    #[test]
    fn general_systems_roundtrip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_general(&mut rng, 0);
        prop_assert_eq!(&parse_system(&s.to_text()).unwrap(), &s);
    }

    #[test]
    fn relaxed_systems_roundtrip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_small_step(&mut rng, 0);
        let t = tilde(&s);
        prop_assert_eq!(&parse_system(&t.to_text()).unwrap(), &t);
        let neg = build_negation_extension(&s);
        prop_assert_eq!(&parse_system(&neg.system().to_text()).unwrap(), neg.system());
    }

    #[test]
    fn normalized_systems_are_small_step_and_roundtrip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_general(&mut rng, 0);
        let (n, _) = to_small_step(&s);
        prop_assert!(n.rules().iter().all(|r| r.kind().is_small_step()));
        prop_assert_eq!(&parse_system(&n.to_text()).unwrap(), &n);
    }
}

#[test]
fn normalization_is_conservative_at_desk_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6e6f726d);
    for i in 0..100 {
        let s = random_general(&mut rng, i);
        let (n, map) = to_small_step(&s);
        for config in all_configs(&s, 3) {
            let original = oracle::search(&s, &config, 10, 6);
            let normalized = oracle::search(&n, &config, 10, 6);
            assert_eq!(
                original.is_some(),
                normalized.is_some(),
                "{}: {config} provable in one of original/normalized only",
                s.name()
            );
            if let Some(p) = normalized {
                let erased = erase_proof(&p, &map).unwrap();
                assert_eq!(erased.label(), &config);
                check_proof(&s, &erased, false).unwrap_or_else(|e| {
                    panic!("{}: erased proof of {config} fails: {e:?}", s.name())
                });
            }
        }
    }
}

#[test]
fn tilde_preserves_provability_at_desk_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x74696c64);
    for i in 0..100 {
        let s = random_small_step(&mut rng, i);
        let t = tilde(&s);
        for config in all_configs(&s, 3) {
            let before = oracle::search(&s, &config, 8, 6).is_some();
            let after = oracle::search(&t, &config, 8, 6).is_some();
            assert_eq!(before, after, "{}: {config} differs under tilde", s.name());
        }
    }
}

#[test]
fn member_agrees_with_kleene_on_automata() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b6c656e);
    for i in 0..100 {
        let s = random_small_step(&mut rng, i);
        let automaton = extract_multi_automaton(&saturate(&s));
        let fixpoint = oracle::kleene(&automaton, 4);
        for config in all_configs(&s, 4) {
            assert_eq!(
                member(&automaton, &config).unwrap(),
                fixpoint.contains(&config),
                "{}: member and kleene disagree on {config}",
                s.name()
            );
        }
    }
}

#[test]
fn monotonicity_of_saturation_and_kleene() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d6f6e6f);
    for i in 0..100 {
        let s = random_small_step(&mut rng, i);
        let sat = saturate(&s);
        for r in s.rules() {
            assert!(
                sat.rules().iter().any(|x| x.same_judgment(r)),
                "{}: saturation dropped {r}",
                s.name()
            );
        }
        let small = oracle::kleene(&s, 2);
        let large = oracle::kleene(&s, 3);
        assert!(small.is_subset(&large), "{}: kleene not monotone", s.name());
    }
}

#[test]
fn cut_elimination_normalizes_oracle_proofs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x63757473);
    let mut eliminated = 0usize;
    for i in 0..100 {
        let s = random_small_step(&mut rng, i);
        let sat = saturate(&s);
        for config in all_configs(&s, 3) {
            let Some(p) = oracle::search(&sat, &config, 6, 5) else {
                continue;
            };
            let (normal, _) = eliminate_cuts(&sat, &p).unwrap();
            assert_eq!(normal.label(), &config);
            assert_eq!(find_cut(&sat, &normal), None);
            check_proof(&sat, &normal, false).unwrap_or_else(|e| {
                panic!("{}: normal form of {config} fails: {e:?}", s.name())
            });
            // closed cut-free proofs over a saturated system are intro-only
            fn intro_only(s: &apds_core::system::System, t: &apds_core::proof::ProofTree) -> bool {
                t.rule_id()
                    .and_then(|id| s.rule(id))
                    .is_some_and(|r| r.kind().is_intro_like())
                    && t.children().iter().all(|c| intro_only(s, c))
            }
            assert!(intro_only(&sat, &normal));
            eliminated += 1;
        }
    }
    assert!(eliminated > 100, "population too thin: {eliminated} proofs");
}

#[test]
fn finite_refutation_iff_unfolding_succeeds() {
    use apds_core::certify::{Refuter, RefuteError};
    let mut rng = ChaCha8Rng::seed_from_u64(0x66696e69);
    for i in 0..60 {
        let s = random_small_step(&mut rng, i);
        let refuter = Refuter::new(&s).unwrap();
        for config in all_configs(&s, 4) {
            let provable = member(refuter.automaton(), &config).unwrap();
            let finitely_refutable = refuter
                .negated_automaton()
                .negative_member(&config.negated())
                .unwrap();
            let unfolds = match refuter.unfold(&config, 2) {
                Ok(_) => true,
                Err(RefuteError::Provable(_)) => false,
                Err(e) => panic!("{}: unfold failed on {config}: {e}", s.name()),
            };
            assert_eq!(finitely_refutable, !provable, "{}: {config}", s.name());
            assert_eq!(unfolds, finitely_refutable, "{}: {config}", s.name());
        }
    }
}
