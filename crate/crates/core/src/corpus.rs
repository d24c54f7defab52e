//! Benchmark formulas with their known status in each calculus.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use crate::closure::{closure, negation_closure};
use crate::decide::{decide, Certificate, Config};
use crate::formula::{AgentSet, Formula};
use crate::parse::{parse, ParseError};
use crate::proof::check_proof;
use crate::rules::Calculus;
use crate::sequent::Sequent;

#[derive(Clone, Debug)]
pub struct CorpusItem {
    pub name: &'static str,
    pub text: &'static str,
    pub agents: &'static str,
    /// Expected provability in ICK, ICKT, ICKS4 and ICKS5.
    pub provable: [bool; 4],
}

impl CorpusItem {
    pub fn agent_set(&self) -> AgentSet {
        AgentSet::parse(self.agents).expect("corpus agents are valid")
    }

    pub fn formula(&self) -> Result<Formula, ParseError> {
        parse(self.text, &self.agent_set())
    }

    pub fn expected(&self, cal: Calculus) -> bool {
        self.provable[cal as usize]
    }
}

const ALL: [bool; 4] = [true; 4];
const NONE: [bool; 4] = [false; 4];
const T_UP: [bool; 4] = [false, true, true, true];
const S4_UP: [bool; 4] = [false, false, true, true];
const S5_ONLY: [bool; 4] = [false, false, false, true];

pub const CORPUS: &[CorpusItem] = &[
    CorpusItem { name: "induction", text: "p & C (p -> E p) -> C p", agents: "a,b", provable: ALL },
    CorpusItem { name: "induction-single", text: "p & C (p -> K{a} p) -> C p", agents: "a", provable: ALL },
    CorpusItem { name: "k-distribution", text: "K{a} (p -> q) -> K{a} p -> K{a} q", agents: "a", provable: ALL },
    CorpusItem { name: "fix-unfold", text: "C p -> p & E C p", agents: "a", provable: ALL },
    CorpusItem { name: "fix-fold", text: "p & E C p -> C p", agents: "a", provable: ALL },
    CorpusItem { name: "truth", text: "K{a} p -> p", agents: "a", provable: T_UP },
    CorpusItem { name: "positive-introspection", text: "K{a} p -> K{a} K{a} p", agents: "a", provable: S4_UP },
    CorpusItem { name: "k-excluded-middle", text: "K{a} p | ~K{a} p", agents: "a", provable: S5_ONLY },
    CorpusItem { name: "c-excluded-middle", text: "C p | ~C p", agents: "a", provable: S5_ONLY },
    CorpusItem { name: "negative-introspection", text: "~K{a} p -> K{a} ~K{a} p", agents: "a", provable: S5_ONLY },
    CorpusItem { name: "brouwer", text: "p -> K{a} ~K{a} ~p", agents: "a", provable: S5_ONLY },
    CorpusItem { name: "excluded-middle", text: "p | ~p", agents: "a", provable: NONE },
    CorpusItem { name: "double-negation", text: "~~p -> p", agents: "a", provable: NONE },
];

/// Formulas with known status in classical S5 common knowledge logic.
#[derive(Clone, Debug)]
pub struct ClassicalItem {
    pub name: &'static str,
    pub text: &'static str,
    pub valid: bool,
}

impl ClassicalItem {
    pub fn formula(&self, agents: &AgentSet) -> Result<Formula, ParseError> {
        parse(self.text, agents)
    }
}

pub const CLASSICAL_S5: &[ClassicalItem] = &[
    ClassicalItem { name: "k-axiom", text: "K{a} (p -> q) -> K{a} p -> K{a} q", valid: true },
    ClassicalItem { name: "t-axiom", text: "K{a} p -> p", valid: true },
    ClassicalItem { name: "4-axiom", text: "K{a} p -> K{a} K{a} p", valid: true },
    ClassicalItem { name: "5-axiom", text: "~K{a} p -> K{a} ~K{a} p", valid: true },
    ClassicalItem { name: "fix", text: "(C p -> p & K{a} C p) & (p & K{a} C p -> C p)", valid: true },
    ClassicalItem { name: "excluded-middle", text: "p | ~p", valid: true },
    ClassicalItem { name: "atom", text: "p", valid: false },
    ClassicalItem { name: "omniscience", text: "p -> K{a} p", valid: false },
    ClassicalItem { name: "k-unrelated", text: "K{a} p -> K{a} q", valid: false },
];

/// Result of deciding one corpus item in one calculus.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub name: &'static str,
    pub calculus: Calculus,
    pub expected: bool,
    pub got: Result<bool, String>,
    /// `None` when no certificate was produced.
    pub certificate: Option<Result<(), String>>,
    pub elapsed: Duration,
}

impl Outcome {
    /// Correct verdict, and any certificate verified.
    pub fn passed(&self) -> bool {
        self.got.as_ref().is_ok_and(|&g| g == self.expected)
            && self.certificate.as_ref().is_none_or(|c| c.is_ok())
    }
}

/// Decides `goal` and re-verifies the certificate independently.
pub fn run_goal(cal: Calculus, goal: &Sequent, agents: &AgentSet, cfg: &Config) -> (Result<bool, String>, Option<Result<(), String>>) {
    match decide(cal, goal, agents, cfg) {
        Err(e) => (Err(e.to_string()), None),
        Ok(v) => {
            let cert = v.certificate.map(|c| match c {
                Certificate::Proof(p) => {
                    let fs = goal.formulas();
                    let set: BTreeSet<Formula> =
                        if cal == Calculus::Icks5 { negation_closure(&fs, agents) } else { closure(&fs, agents) };
                    if !v.provable {
                        return Err("proof for an unprovable goal".to_string());
                    }
                    check_proof(cal, &p, &set).map_err(|d| d.to_string())
                }
                Certificate::Countermodel(m) => {
                    if v.provable {
                        return Err("countermodel for a provable goal".to_string());
                    }
                    m.verify(cal.frame_class(), goal)
                }
            });
            (Ok(v.provable), cert)
        }
    }
}

pub fn run_item(item: &CorpusItem, cal: Calculus, cfg: &Config) -> Outcome {
    let start = Instant::now();
    let (got, certificate) = match item.formula() {
        Ok(f) => run_goal(cal, &Sequent::goal(f), &item.agent_set(), cfg),
        Err(e) => (Err(e.to_string()), None),
    };
    Outcome { name: item.name, calculus: cal, expected: item.expected(cal), got, certificate, elapsed: start.elapsed() }
}
