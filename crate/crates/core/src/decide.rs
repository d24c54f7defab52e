//! The decision procedure: solve the proof-search game and attach a checked
//! certificate.

use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arena::{Arena, ArenaError, ArenaKind, Limits};
use crate::closure::{closure, negation_closure};
use crate::countermodel::{extract_countermodel, extract_countermodel_s5, Countermodel, CountermodelError, S5Options};
use crate::formula::{AgentSet, Formula};
use crate::game::{solve, Player, Strategy};
use crate::proof::{check_proof, extract_proof, CyclicProof, ExtractError};
use crate::rules::{Calculus, CutMode};
use crate::sequent::{Sequent, SequentError};
use crate::sigma::Sigma;

/// Resource caps and certificate options.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct Config {
    pub max_sequents: usize,
    /// Wall-clock budget per decision, in seconds.
    pub time_budget_secs: Option<f64>,
    /// Attach a proof or countermodel.
    pub certificate: bool,
    /// Build canonical countermodels for ICKS5.
    pub s5_countermodel: bool,
    pub s5_max_worlds: usize,
    pub max_proof_nodes: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            max_sequents: 2_000_000,
            time_budget_secs: None,
            certificate: true,
            s5_countermodel: false,
            s5_max_worlds: 5000,
            max_proof_nodes: crate::proof::DEFAULT_MAX_PROOF_NODES,
        }
    }
}

impl Config {
    pub fn limits(&self, start: Instant) -> Limits {
        Limits {
            max_sequents: self.max_sequents,
            deadline: self.time_budget_secs.map(|s| start + Duration::from_secs_f64(s)),
        }
    }
}

#[derive(Debug, Error)]
pub enum DecideError {
    #[error(transparent)]
    Sequent(#[from] SequentError),
    #[error("resource limit: {0}")]
    Resource(#[from] ArenaError),
    #[error("proof extraction failed: {0}")]
    Extract(#[from] ExtractError),
    #[error("proof check failed: {0}")]
    ProofCheck(String),
    #[error("countermodel: {0}")]
    Countermodel(#[from] CountermodelError),
}

impl DecideError {
    /// Whether the error is a resource limit rather than a defect.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            DecideError::Resource(_)
                | DecideError::Extract(ExtractError::TooLarge(_))
                | DecideError::Countermodel(CountermodelError::Arena(_) | CountermodelError::TooManyWorlds(_))
        )
    }
}

#[derive(Clone, Debug)]
pub enum Certificate {
    Proof(CyclicProof),
    Countermodel(Countermodel),
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct Stats {
    pub universe: usize,
    pub sequents: usize,
    pub positions: usize,
    pub arenas: usize,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub provable: bool,
    pub certificate: Option<Certificate>,
    pub stats: Stats,
}

/// The formula universe of a goal: its closure, negation closed for ICKS5.
pub fn universe(cal: Calculus, goal: &Sequent, agents: &AgentSet) -> Result<Arc<Sigma>, SequentError> {
    let fs = goal.formulas();
    let set = if cal == Calculus::Icks5 { negation_closure(&fs, agents) } else { closure(&fs, agents) };
    Ok(Arc::new(Sigma::new(&set, agents)?))
}

pub fn goal_arena(
    cal: Calculus,
    kind: ArenaKind,
    goal: &Sequent,
    agents: &AgentSet,
    limits: Limits,
) -> Result<Arena, DecideError> {
    goal.validate()?;
    let sigma = universe(cal, goal, agents)?;
    let root = goal.to_bits(&sigma)?;
    Ok(Arena::build(cal, kind, sigma, &[root], limits)?)
}

/// Solves the full arena of `goal`. For ICKS5 the cut-free arena is tried first
/// and the ordered-cut arena decides otherwise.
pub fn solve_goal(
    cal: Calculus,
    goal: &Sequent,
    agents: &AgentSet,
    limits: Limits,
    stats: &mut Stats,
) -> Result<(Arena, Player, Strategy), DecideError> {
    let modes: &[CutMode] = if cal == Calculus::Icks5 { &[CutMode::None, CutMode::Ordered] } else { &[CutMode::None] };
    let mut last = None;
    for (k, &mode) in modes.iter().enumerate() {
        let arena = match goal_arena(cal, ArenaKind::Full(mode), goal, agents, limits) {
            Ok(a) => a,
            // the cut-free pass is only a shortcut
            Err(DecideError::Resource(_)) if k + 1 < modes.len() => continue,
            Err(e) => return Err(e),
        };
        stats.universe = arena.sigma.len();
        stats.sequents += arena.sequent_count();
        stats.positions += arena.len();
        stats.arenas += 1;
        let (winner, strategy) = solve(&arena.game, arena.root());
        if winner == Player::Prover || k + 1 == modes.len() {
            return Ok((arena, winner, strategy));
        }
        last = Some((arena, winner, strategy));
    }
    Ok(last.expect("at least one pass"))
}

/// Solves the search arena of `goal` (ICK, ICKT and ICKS4).
pub fn solve_search(
    cal: Calculus,
    goal: &Sequent,
    agents: &AgentSet,
    limits: Limits,
) -> Result<(Arena, Player, Strategy), DecideError> {
    let arena = goal_arena(cal, ArenaKind::Search, goal, agents, limits)?;
    let (winner, strategy) = solve(&arena.game, arena.root());
    Ok((arena, winner, strategy))
}

/// Decides provability of `goal`, attaching a checked certificate when asked.
pub fn decide(cal: Calculus, goal: &Sequent, agents: &AgentSet, cfg: &Config) -> Result<Verdict, DecideError> {
    let start = Instant::now();
    let limits = cfg.limits(start);
    let mut stats = Stats::default();
    let (arena, winner, strategy) = solve_goal(cal, goal, agents, limits, &mut stats)?;
    let provable = winner == Player::Prover;
    let mut certificate = None;
    if cfg.certificate && provable {
        let proof = extract_proof(&arena, &strategy, cfg.max_proof_nodes)?;
        let set = arena.sigma.formulas().iter().cloned().collect();
        check_proof(cal, &proof, &set).map_err(|d| DecideError::ProofCheck(d.to_string()))?;
        certificate = Some(Certificate::Proof(proof));
    } else if cfg.certificate && cal != Calculus::Icks5 {
        drop(arena);
        let (search, w, strat) = solve_search(cal, goal, agents, limits)?;
        stats.sequents += search.sequent_count();
        stats.positions += search.len();
        stats.arenas += 1;
        if w != Player::Refuter {
            return Err(CountermodelError::Unverified("the search arena disagrees with the full arena".into()).into());
        }
        certificate = Some(Certificate::Countermodel(extract_countermodel(&search, &strat)?));
    } else if cfg.certificate && cfg.s5_countermodel {
        drop(arena);
        let opts = S5Options { max_worlds: cfg.s5_max_worlds, limits };
        certificate = Some(Certificate::Countermodel(extract_countermodel_s5(goal, agents, opts)?));
    }
    Ok(Verdict { provable, certificate, stats })
}

pub fn decide_formula(cal: Calculus, f: &Formula, agents: &AgentSet, cfg: &Config) -> Result<Verdict, DecideError> {
    decide(cal, &Sequent::goal(f.clone()), agents, cfg)
}
