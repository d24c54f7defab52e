use std::collections::BTreeSet;

use ick::closure::{closure_of, complexity, negation_closure_of};
use ick::formula::{AgentSet, Formula};
use ick::kripke::{FrameClass, ModelJson};
use ick::parse::parse;
use ick::random::{random_classical, random_model, rng, FormulaGen};
use proptest::prelude::*;

const CLASSES: [FrameClass; 4] = [FrameClass::Epistemic, FrameClass::Reflexive, FrameClass::S4, FrameClass::S5];

fn agents() -> AgentSet {
    AgentSet::new(["a", "b"]).unwrap()
}

fn gen() -> FormulaGen {
    FormulaGen::new(&["p", "q", "r"], &agents(), 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(250))]

    #[test]
    fn truth_is_monotone(seed in any::<u64>(), class in 0usize..4) {
        let mut r = rng(seed);
        let fc = CLASSES[class];
        let m = random_model(&mut r, fc, &agents(), &["p", "q", "r"], 6);
        prop_assert!(m.check_frame(fc).is_empty());
        let f = gen().formula(&mut r);
        let t = m.truth_set(&f);
        for (w, v) in m.order.pairs() {
            prop_assert!(!t[w] || t[v], "{} at {} but not at {}", f, w, v);
        }
    }

    #[test]
    fn s5_knowledge_implications_are_classical(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ags = agents();
        let m = random_model(&mut r, FrameClass::S5, &ags, &["p", "q", "r"], 6);
        let g = gen();
        let a = ags.get((seed % 2) as usize).clone();
        let (phi, psi) = (g.formula(&mut r), g.formula(&mut r));
        let k = Formula::k(&a, phi);
        let (ti, tk, tp) = (m.truth_set(&Formula::implies(k.clone(), psi.clone())), m.truth_set(&k), m.truth_set(&psi));
        for w in 0..m.len() {
            prop_assert_eq!(ti[w], !tk[w] || tp[w]);
        }
    }

    #[test]
    fn common_knowledge_is_a_fixed_point(seed in any::<u64>(), class in 0usize..4) {
        let mut r = rng(seed);
        let ags = agents();
        let m = random_model(&mut r, CLASSES[class], &ags, &["p", "q", "r"], 6);
        let f = gen().formula(&mut r);
        let c = Formula::c(f.clone());
        prop_assert_eq!(m.truth_set(&c), m.truth_set(&Formula::and(f, Formula::e(&ags, c.clone()))));
    }

    #[test]
    fn parse_render_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = gen().formula(&mut r);
        prop_assert_eq!(parse(&f.to_string(), &agents()).unwrap(), f);
    }

    #[test]
    fn closure_is_closed(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ags = agents();
        let f = gen().formula(&mut r);
        let cl = closure_of(&f, &ags);
        let ncl = negation_closure_of(&f, &ags);
        prop_assert!(cl.contains(&f));
        prop_assert!(cl.is_subset(&ncl));
        for g in &cl {
            for h in g.children() {
                prop_assert!(cl.contains(h));
            }
            if let Formula::C(b) = g {
                for a in ags.iter() {
                    prop_assert!(cl.contains(&Formula::k(a, g.clone())), "unfolding of {}", b);
                }
            }
        }
        for g in &ncl {
            for h in g.children() {
                prop_assert!(ncl.contains(h));
            }
            if matches!(g, Formula::K(..)) {
                prop_assert!(ncl.contains(&Formula::not(g.clone())));
            }
        }
    }

    #[test]
    fn model_json_round_trip(seed in any::<u64>(), class in 0usize..4) {
        let mut r = rng(seed);
        let ags = agents();
        let m = random_model(&mut r, CLASSES[class], &ags, &["p", "q"], 5);
        let j = ModelJson::from_model(&m, Some(0));
        let text = serde_json::to_string(&j).unwrap();
        let back: ModelJson = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.to_model(Some(&ags)).unwrap(), m);
    }

    #[test]
    fn reduced_model_agrees_on_maximal_worlds(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ags = agents();
        let m = random_model(&mut r, FrameClass::S5, &ags, &["p", "q"], 6);
        let red = m.reduced().unwrap();
        let f = gen().formula(&mut r);
        let tau = ick::translation::tau(&f);
        let t = m.truth_set(&tau);
        let tc = red.truth_set(&f);
        for (i, name) in red.worlds.iter().enumerate() {
            prop_assert_eq!(t[m.world(name).unwrap()], tc[i]);
        }
    }

    #[test]
    fn induced_model_is_s5_and_agrees(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ags = agents();
        let c = random_classical(&mut r, &ags, &["p", "q"], 6);
        let m = c.induced().unwrap();
        prop_assert!(m.check_frame(FrameClass::S5).is_empty());
        let f = gen().formula(&mut r);
        prop_assert_eq!(m.truth_set(&f), c.truth_set(&f));
    }
}

#[test]
fn closure_examples() {
    let ags = AgentSet::new(["a"]).unwrap();
    let f = parse("C p", &ags).unwrap();
    let cl: BTreeSet<String> = closure_of(&f, &ags).iter().map(|g| g.to_string()).collect();
    assert_eq!(cl, ["C p", "K{a} C p", "p"].into_iter().map(String::from).collect());
    let ncl: BTreeSet<String> = negation_closure_of(&f, &ags).iter().map(|g| g.to_string()).collect();
    assert!(ncl.contains("~K{a} C p"));
    assert_eq!(complexity(&parse("K{a} (p -> q)", &ags).unwrap()), 2);
}
