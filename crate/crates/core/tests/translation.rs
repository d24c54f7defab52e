use ick::closure::complexity;
use ick::corpus::CLASSICAL_S5;
use ick::decide::{decide_formula, Config};
use ick::formula::AgentSet;
use ick::random::{random_classical, rng, FormulaGen};
use ick::rules::Calculus;
use ick::translation::{check_translation_equiv, tr};
use proptest::prelude::*;

fn no_cert() -> Config {
    Config { certificate: false, ..Config::default() }
}

#[test]
fn classical_corpus_through_the_translation() {
    let ags = AgentSet::new(["a"]).unwrap();
    let mut r = rng(4);
    for item in CLASSICAL_S5 {
        let f = item.formula(&ags).unwrap();
        let v = decide_formula(Calculus::Icks5, &tr(&f), &ags, &no_cert()).unwrap();
        assert_eq!(v.provable, item.valid, "{}", item.name);
        // bounded falsification confirms the invalid ones
        let falsified = (0..500).any(|_| {
            let m = random_classical(&mut r, &ags, &["p", "q"], 4);
            m.truth_set(&f).contains(&false)
        });
        assert_eq!(falsified, !item.valid, "{}", item.name);
    }
}

#[test]
fn translation_is_not_the_identity_intuitionistically() {
    let ags = AgentSet::new(["a"]).unwrap();
    let f = ick::parse::parse("p | ~p", &ags).unwrap();
    assert!(!decide_formula(Calculus::Icks5, &f, &ags, &no_cert()).unwrap().provable);
    assert!(decide_formula(Calculus::Icks5, &tr(&f), &ags, &no_cert()).unwrap().provable);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn translation_is_classically_equivalent(seed in any::<u64>()) {
        let ags = AgentSet::new(["a", "b"]).unwrap();
        let mut r = rng(seed);
        let m = random_classical(&mut r, &ags, &["p", "q"], 6);
        let f = FormulaGen::new(&["p", "q"], &ags, 4).formula(&mut r);
        prop_assert!(check_translation_equiv(&m, &f).unwrap());
        prop_assert!(complexity(&tr(&f)) <= complexity(&f) + 4 * f.modal_count() + 4);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn translated_theorems_are_classically_valid(seed in any::<u64>()) {
        let ags = AgentSet::new(["a"]).unwrap();
        let mut r = rng(seed);
        let f = FormulaGen::new(&["p", "q"], &ags, 3).formula(&mut r);
        let falsified = (0..200).any(|_| random_classical(&mut r, &ags, &["p", "q"], 4).truth_set(&f).contains(&false));
        let v = decide_formula(Calculus::Icks5, &tr(&f), &ags, &no_cert());
        if let Ok(v) = v {
            prop_assert!(!(v.provable && falsified), "{} falsified but its translation is provable", f);
        }
    }
}
