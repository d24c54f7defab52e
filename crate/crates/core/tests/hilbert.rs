use std::collections::BTreeSet;

use ick::formula::{AgentSet, Formula};
use ick::hilbert::{
    c_necessitation, check_derivation, is_valid_derivation, k_excluded_middle, match_axiom, mutations, samples,
    Builder, Scheme,
};
use ick::parse::parse;
use ick::random::{random_model, rng};
use ick::rules::Calculus;

fn one() -> AgentSet {
    AgentSet::new(["a"]).unwrap()
}

fn f(s: &str) -> Formula {
    parse(s, &one()).unwrap()
}

#[test]
fn accepted_derivations_are_valid() {
    let mut r = rng(9);
    for s in samples() {
        check_derivation(s.system, &s.derivation, &BTreeSet::new(), &s.agents).unwrap();
        let goal = s.derivation.conclusion().unwrap().clone();
        for _ in 0..100 {
            let m = random_model(&mut r, s.system.frame_class(), &s.agents, &["p", "q"], 5);
            assert!(m.truth_set(&goal).iter().all(|&b| b), "{} fails in a model", s.name);
        }
    }
}

#[test]
fn mutations_are_rejected() {
    let m = mutations();
    assert_eq!(m.len(), 10);
    for (what, s) in m {
        assert!(!is_valid_derivation(s.system, &s.derivation, &s.assumptions, &s.agents), "{what}");
    }
}

#[test]
fn schemes_respect_the_system() {
    let ags = one();
    let d = k_excluded_middle(ags.get(0), &f("p"));
    assert!(is_valid_derivation(Calculus::Icks5, &d, &BTreeSet::new(), &ags));
    assert!(!is_valid_derivation(Calculus::Icks4, &d, &BTreeSet::new(), &ags));
    assert_eq!(match_axiom(Calculus::Ick, &f("K{a} p -> K{a} K{a} p"), &ags), None);
    assert_eq!(match_axiom(Calculus::Icks4, &f("K{a} p -> K{a} K{a} p"), &ags), Some(Scheme::S4));
    // identical modal subformulas share an atom, different ones do not
    assert_eq!(match_axiom(Calculus::Ick, &f("K{a} p & C q -> C q"), &ags), Some(Scheme::Int));
    assert_eq!(match_axiom(Calculus::Ick, &f("K{a} p -> K{a} q"), &ags), None);
}

#[test]
fn common_knowledge_necessitation_for_three_agents() {
    let ags = AgentSet::new(["a", "b", "c"]).unwrap();
    let mut b = Builder::new();
    b.axiom(Scheme::Int, parse("p -> p", &ags).unwrap());
    let d = c_necessitation(&ags, &b.finish());
    check_derivation(Calculus::Ick, &d, &BTreeSet::new(), &ags).unwrap();
    assert_eq!(d.conclusion().unwrap(), &parse("C (p -> p)", &ags).unwrap());
}

#[test]
fn deduction_theorem_pairs() {
    let ags = one();
    for (hyp, goal) in [("p", "p | q"), ("K{a} p", "K{a} p & K{a} p"), ("C p", "p")] {
        let (h, g) = (f(hyp), f(goal));
        // hyp |- goal
        let mut b = Builder::new();
        let a = b.assume(h.clone());
        let fix_or_int = if hyp == "C p" {
            let fix = b.axiom(Scheme::Fix, f("(C p -> p & K{a} C p) & (p & K{a} C p -> C p)"));
            let unfold = b.by_int(fix, Formula::implies(h.clone(), Formula::and(f("p"), f("K{a} C p"))));
            let proj = b.axiom(Scheme::Int, f("p & K{a} C p -> p"));
            b.chain(unfold, proj)
        } else {
            b.axiom(Scheme::Int, Formula::implies(h.clone(), g.clone()))
        };
        b.mp(a, fix_or_int);
        let with_hyp = b.finish();
        check_derivation(Calculus::Ick, &with_hyp, &BTreeSet::from([h.clone()]), &ags).unwrap();
        assert!(!is_valid_derivation(Calculus::Ick, &with_hyp, &BTreeSet::new(), &ags));
        // |- hyp -> goal: drop the assumption and the final MP
        let mut nodes = with_hyp.nodes.clone();
        nodes.pop();
        nodes.remove(0);
        for n in &mut nodes {
            for p in &mut n.premises {
                *p -= 1;
            }
        }
        let without = ick::hilbert::Derivation { nodes };
        check_derivation(Calculus::Ick, &without, &BTreeSet::new(), &ags).unwrap();
        assert_eq!(without.conclusion().unwrap(), &Formula::implies(h, g));
    }
}
