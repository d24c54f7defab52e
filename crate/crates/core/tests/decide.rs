use std::collections::BTreeSet;

use ick::arena::{ArenaKind, Limits};
use ick::closure::{closure, negation_closure, negation_closure_of};
use ick::corpus::{run_item, CORPUS};
use ick::decide::{decide, goal_arena, solve_goal, solve_search, Certificate, Config, Stats};
use ick::formula::{AgentSet, Formula};
use ick::game::{solve, verify_strategy};
use ick::kripke::eval;
use ick::parse::parse;
use ick::proof::{check_proof, CyclicProof, ProofJson};
use ick::random::{random_model, rng, FormulaGen};
use ick::rules::{Calculus, CutMode, RuleId};
use ick::sequent::{parse_sequent, Sequent};
use proptest::prelude::*;

fn one() -> AgentSet {
    AgentSet::new(["a"]).unwrap()
}

fn universe(cal: Calculus, goal: &Sequent, agents: &AgentSet) -> BTreeSet<Formula> {
    let fs = goal.formulas();
    if cal == Calculus::Icks5 {
        negation_closure(&fs, agents)
    } else {
        closure(&fs, agents)
    }
}

fn proof_of(cal: Calculus, text: &str, agents: &AgentSet) -> CyclicProof {
    let goal = Sequent::goal(parse(text, agents).unwrap());
    match decide(cal, &goal, agents, &Config::default()).unwrap().certificate {
        Some(Certificate::Proof(p)) => p,
        other => panic!("no proof for {text}: {other:?}"),
    }
}

#[test]
fn corpus_verdicts_and_certificates() {
    for item in CORPUS {
        for cal in Calculus::ALL {
            let o = run_item(item, cal, &Config::default());
            assert!(o.passed(), "{} in {}: {:?} {:?}", item.name, cal.name(), o.got, o.certificate);
            if cal != Calculus::Icks5 || o.expected {
                assert!(o.certificate.is_some(), "{} in {} has no certificate", item.name, cal.name());
            }
        }
    }
}

#[test]
fn s5_canonical_countermodels() {
    let ags = one();
    let cfg = Config { s5_countermodel: true, ..Config::default() };
    for text in ["C p", "p", "p | ~p", "~~p -> p", "K{a} p -> K{a} q"] {
        let goal = Sequent::goal(parse(text, &ags).unwrap());
        let v = decide(Calculus::Icks5, &goal, &ags, &cfg).unwrap();
        assert!(!v.provable, "{text}");
        match v.certificate {
            Some(Certificate::Countermodel(m)) => {
                assert!(m.model.len() <= cfg.s5_max_worlds);
                m.verify(Calculus::Icks5.frame_class(), &goal).unwrap();
            }
            other => panic!("{text}: {other:?}"),
        }
    }
}

#[test]
fn sequent_goals() {
    let ags = one();
    for (text, cal, provable) in [
        ("K{a} p => p", Calculus::Ickt, true),
        ("K{a} p => p", Calculus::Ick, false),
        ("p, p -> q => q", Calculus::Ick, true),
        ("C p => K{a} K{a} p", Calculus::Ick, true),
        ("=> p, ~p", Calculus::Icks5, false),
        ("~K{a} p => K{a} ~K{a} p", Calculus::Icks5, true),
    ] {
        let goal = parse_sequent(text, &ags).unwrap();
        let v = decide(cal, &goal, &ags, &Config::default()).unwrap();
        assert_eq!(v.provable, provable, "{text} in {}", cal.name());
    }
}

#[test]
fn induction_proof_is_cyclic() {
    let ags = AgentSet::new(["a", "b"]).unwrap();
    let p = proof_of(Calculus::Ick, "p & C (p -> E p) -> C p", &ags);
    assert!(!p.back_edges.is_empty());
    assert!(p.rule_count(RuleId::CR) > 0);
}

#[test]
fn proofs_survive_json() {
    let ags = one();
    for (cal, text) in [
        (Calculus::Ick, "p & C (p -> K{a} p) -> C p"),
        (Calculus::Icks4, "K{a} p -> K{a} K{a} p"),
        (Calculus::Icks5, "C p | ~C p"),
        (Calculus::Icks5, "p -> K{a} ~K{a} ~p"),
    ] {
        let p = proof_of(cal, text, &ags);
        let text_json = serde_json::to_string(&ProofJson::from_proof(&p)).unwrap();
        let back = serde_json::from_str::<ProofJson>(&text_json).unwrap().to_proof(None).unwrap();
        assert_eq!(back, p);
        check_proof(cal, &back, &universe(cal, back.root(), &ags)).unwrap();
    }
}

#[test]
fn checker_rejects_tampering() {
    let ags = one();
    let cal = Calculus::Ick;
    let p = proof_of(cal, "p & C (p -> K{a} p) -> C p", &ags);
    let sigma = universe(cal, p.root(), &ags);
    check_proof(cal, &p, &sigma).unwrap();

    let mut q = p.clone();
    let leaf = *q.back_edges.keys().next().unwrap();
    q.back_edges.remove(&leaf);
    assert!(check_proof(cal, &q, &sigma).is_err(), "dropped back edge");

    let mut q = p.clone();
    let (&leaf, _) = q.back_edges.iter().next().unwrap();
    q.back_edges.insert(leaf, leaf);
    assert!(check_proof(cal, &q, &sigma).is_err(), "self companion");

    let mut q = p.clone();
    let i = q.nodes.iter().position(|n| n.rule == Some(RuleId::ImpR)).unwrap();
    q.nodes[i].rule = Some(RuleId::AndR);
    assert!(check_proof(cal, &q, &sigma).is_err(), "relabelled rule");

    let mut q = p.clone();
    let i = q.nodes.iter().position(|n| !n.premises.is_empty()).unwrap();
    let child = q.nodes[i].premises[0];
    q.nodes[child].sequent.left.insert(Formula::atom("zz"));
    assert!(check_proof(cal, &q, &sigma).is_err(), "foreign formula");

    // a proof of the T instance is no proof in ICK
    let t = proof_of(Calculus::Ickt, "K{a} p -> p", &ags);
    assert!(check_proof(Calculus::Ick, &t, &universe(Calculus::Ick, t.root(), &ags)).is_err());
}

#[test]
fn corpus_arena_strategies_verify() {
    let lim = Limits::default();
    for item in CORPUS {
        let goal = Sequent::goal(item.formula().unwrap());
        for cal in Calculus::ALL {
            let (arena, w, s) = solve_goal(cal, &goal, &item.agent_set(), lim, &mut Stats::default()).unwrap();
            assert_eq!(verify_strategy(&arena.game, arena.root(), &s, w), Ok(true), "{}", item.name);
            if cal != Calculus::Icks5 {
                let (arena, w, s) = solve_search(cal, &goal, &item.agent_set(), lim).unwrap();
                assert_eq!(verify_strategy(&arena.game, arena.root(), &s, w), Ok(true), "{}", item.name);
            }
        }
    }
}

#[test]
fn resource_limits_are_reported() {
    let ags = one();
    let goal = Sequent::goal(parse("C p | ~C p", &ags).unwrap());
    let e = decide(Calculus::Icks5, &goal, &ags, &Config { max_sequents: 5, ..Config::default() }).unwrap_err();
    assert!(e.is_resource());
}

fn small_formula(seed: u64) -> Formula {
    let g = FormulaGen::new(&["p", "q"], &one(), 3);
    let mut r = rng(seed);
    loop {
        let f = g.formula(&mut r);
        if ick::closure::complexity(&f) <= 8 {
            return f;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn search_and_full_arenas_agree(seed in any::<u64>()) {
        let ags = one();
        let goal = Sequent::goal(small_formula(seed));
        for cal in [Calculus::Ick, Calculus::Ickt, Calculus::Icks4] {
            let (_, wf, _) = solve_goal(cal, &goal, &ags, Limits::default(), &mut Stats::default()).unwrap();
            let (_, ws, _) = solve_search(cal, &goal, &ags, Limits::default()).unwrap();
            prop_assert_eq!(wf, ws, "{} in {}", goal, cal.name());
        }
    }

    #[test]
    fn certificates_are_sound(seed in any::<u64>()) {
        let ags = one();
        let f = small_formula(seed);
        let goal = Sequent::goal(f.clone());
        let mut r = rng(seed ^ 0x5eed);
        for cal in Calculus::ALL {
            let v = decide(cal, &goal, &ags, &Config::default()).unwrap();
            match &v.certificate {
                Some(Certificate::Proof(p)) => {
                    prop_assert!(v.provable);
                    prop_assert!(check_proof(cal, p, &universe(cal, &goal, &ags)).is_ok());
                    for _ in 0..10 {
                        let m = random_model(&mut r, cal.frame_class(), &ags, &["p", "q"], 5);
                        for w in 0..m.len() {
                            prop_assert!(eval(&m, w, &f).unwrap(), "{} fails in a {} model", f, cal.name());
                        }
                    }
                }
                Some(Certificate::Countermodel(m)) => {
                    prop_assert!(!v.provable);
                    prop_assert!(m.verify(cal.frame_class(), &goal).is_ok());
                }
                None => prop_assert!(cal == Calculus::Icks5 && !v.provable),
            }
        }
    }

    #[test]
    fn ordered_cuts_match_all_cuts(seed in any::<u64>()) {
        let ags = one();
        let f = small_formula(seed);
        prop_assume!(negation_closure_of(&f, &ags).len() <= 8);
        let goal = Sequent::goal(f);
        let lim = Limits::default();
        let ordered = goal_arena(Calculus::Icks5, ArenaKind::Full(CutMode::Ordered), &goal, &ags, lim).unwrap();
        let all = goal_arena(Calculus::Icks5, ArenaKind::Full(CutMode::All), &goal, &ags, lim).unwrap();
        let (wo, _) = solve(&ordered.game, ordered.root());
        let (wa, _) = solve(&all.game, all.root());
        prop_assert_eq!(wo, wa, "{}", goal);
        let (_, wd, _) = solve_goal(Calculus::Icks5, &goal, &ags, lim, &mut Stats::default()).unwrap();
        prop_assert_eq!(wd, wa);
    }
}
