//! Countermodels: skeleton models read off Refuter strategies on search arenas,
//! and canonical models over saturated sequents for ICKS5.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::arena::{Arena, ArenaError, ArenaKind, Group, Limits};
use crate::formula::{AgentSet, Formula};
use crate::game::{solve_game, Player, Solution, Strategy, NONE};
use crate::kripke::{FrameClass, Model, ModelError, ModelJson};
use crate::relation::Relation;
use crate::rules::{Calculus, CutMode};
use crate::sequent::{Sequent, SequentError};
use crate::sigma::{bit, members, Node, SeqBits, Sigma};

#[derive(Debug, Error)]
pub enum CountermodelError {
    #[error("the strategy is not a Refuter strategy")]
    NotRefuter,
    #[error("skeleton models are read off search arenas for ICK, ICKT and ICKS4")]
    WrongArena,
    #[error("the strategy makes no move at position {0}")]
    NoMove(u32),
    #[error("invertible steps loop at position {0}")]
    InvertibleLoop(u32),
    #[error("the sequent is provable")]
    Provable,
    #[error("the oracle calls both cut premises provable at {0}")]
    InconsistentOracle(String),
    #[error("more than {0} worlds")]
    TooManyWorlds(usize),
    #[error("countermodel check failed: {0}")]
    Unverified(String),
    #[error(transparent)]
    Arena(#[from] ArenaError),
    #[error(transparent)]
    Sequent(#[from] SequentError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A model together with the world that falsifies the goal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Countermodel {
    pub model: Model,
    pub root: usize,
}

impl Countermodel {
    pub fn to_json(&self) -> ModelJson {
        ModelJson::from_model(&self.model, Some(self.root))
    }

    /// Checks the frame conditions of `fc` and that `goal` fails at the root.
    pub fn verify(&self, fc: FrameClass, goal: &Sequent) -> Result<(), String> {
        if let Some(v) = self.model.check_frame(fc).first() {
            return Err(format!("frame condition violated: {v}"));
        }
        let f = goal.interpretation();
        match self.model.eval(self.root, &f) {
            Ok(false) => Ok(()),
            Ok(true) => Err(format!("{f} holds at the root")),
            Err(e) => Err(e.to_string()),
        }
    }
}

fn valuation_of(sigma: &Sigma, left: u128) -> BTreeSet<Arc<str>> {
    members(left)
        .filter_map(|i| match sigma.formula(i) {
            Formula::Atom(p) => Some(p.clone()),
            _ => None,
        })
        .collect()
}

fn empty_relations(agents: &AgentSet, n: usize) -> BTreeMap<crate::formula::Agent, Relation> {
    agents.iter().map(|a| (a.clone(), Relation::empty(n))).collect()
}

/// Reads a skeleton model off a Refuter strategy on a search arena and closes it
/// into the frame class of the calculus.
pub fn extract_countermodel(arena: &Arena, strategy: &Strategy) -> Result<Countermodel, CountermodelError> {
    if strategy.player != Player::Refuter {
        return Err(CountermodelError::NotRefuter);
    }
    if arena.kind != ArenaKind::Search || arena.cal == Calculus::Icks5 {
        return Err(CountermodelError::WrongArena);
    }
    let g = &arena.game;
    // follow invertible steps down to the saturated sequent that ends the chain
    let terminal = |mut v: u32| -> Result<u32, CountermodelError> {
        let mut steps = 0;
        loop {
            let succ = g.succ(v);
            let invertible = match succ {
                [r] => arena.rule(*r).is_some_and(|n| n.group == Group::Plain && !g.succ(*r).is_empty()),
                _ => false,
            };
            if !invertible {
                return Ok(v);
            }
            let c = strategy.choice[succ[0] as usize];
            if c == NONE {
                return Err(CountermodelError::NoMove(succ[0]));
            }
            v = c;
            steps += 1;
            if steps > arena.len() {
                return Err(CountermodelError::InvertibleLoop(v));
            }
        }
    };
    let start = terminal(arena.root())?;
    let mut index: FxHashMap<u32, usize> = FxHashMap::default();
    let mut worlds = vec![start];
    index.insert(start, 0);
    let mut up: Vec<(usize, usize)> = Vec::new();
    let mut modal: Vec<(u8, usize, usize)> = Vec::new();
    let mut k = 0;
    while k < worlds.len() {
        let t = worlds[k];
        for &r in g.succ(t) {
            let node = arena.rule(r).expect("rule position");
            if node.rule.is_axiom() {
                return Err(CountermodelError::Unverified("an axiom is reachable".into()));
            }
            for &p in g.succ(r) {
                let t2 = terminal(p)?;
                let j = *index.entry(t2).or_insert_with(|| {
                    worlds.push(t2);
                    worlds.len() - 1
                });
                match node.group {
                    Group::Intuitionistic => up.push((k, j)),
                    Group::Modal(a) => modal.push((a, k, j)),
                    Group::Plain => {}
                }
            }
        }
        k += 1;
    }
    // quotient the order by its strongly connected components
    let mut graph = DiGraph::<(), ()>::new();
    let ids: Vec<_> = (0..worlds.len()).map(|_| graph.add_node(())).collect();
    for &(x, y) in &up {
        graph.add_edge(ids[x], ids[y], ());
    }
    let sccs = tarjan_scc(&graph);
    let mut class = vec![0usize; worlds.len()];
    let mut class_order: Vec<usize> = (0..sccs.len()).collect();
    // number classes so that the class of the root comes first
    let root_scc = sccs.iter().position(|c| c.contains(&ids[0])).expect("root has a class");
    class_order.swap(0, root_scc);
    let mut rank = vec![0usize; sccs.len()];
    for (i, &c) in class_order.iter().enumerate() {
        rank[c] = i;
    }
    for (c, comp) in sccs.iter().enumerate() {
        for n in comp {
            class[n.index()] = rank[c];
        }
    }
    let n = sccs.len();
    let mut le = Relation::identity(n);
    for &(x, y) in &up {
        le.insert(class[x], class[y]);
    }
    let le = le.transitive_closure();
    let sigma = &arena.sigma;
    let mut relations = empty_relations(&sigma.agents, n);
    for &(a, x, y) in &modal {
        relations.get_mut(sigma.agents.get(a as usize)).expect("agent").insert(class[x], class[y]);
    }
    let mut valuation = vec![BTreeSet::new(); n];
    for (w, &t) in worlds.iter().enumerate() {
        let s = arena.seq(t).expect("sequent position");
        valuation[class[w]].extend(valuation_of(sigma, s.left));
    }
    let names = (0..n).map(|i| format!("w{i}")).collect();
    let skeleton = Model::new(names, le, relations, valuation);
    let model = skeleton.close(arena.cal.frame_class())?;
    let cm = Countermodel { model, root: 0 };
    let goal = Sequent::from_bits(sigma, arena.seq(arena.root()).expect("sequent root"));
    cm.verify(arena.cal.frame_class(), &goal).map_err(CountermodelError::Unverified)?;
    Ok(cm)
}

/// Decides Σ-provability of sequents over a fixed universe.
pub trait ProvabilityOracle {
    fn sigma(&self) -> &Arc<Sigma>;
    fn provable(&mut self, s: SeqBits) -> Result<bool, CountermodelError>;
}

/// ICKS5 provability from solved ordered-cut arenas, memoized.
pub struct ArenaOracle {
    sigma: Arc<Sigma>,
    limits: Limits,
    solved: Vec<(Arena, Solution)>,
    memo: FxHashMap<SeqBits, bool>,
}

impl ArenaOracle {
    pub fn new(sigma: Arc<Sigma>, limits: Limits) -> Self {
        ArenaOracle { sigma, limits, solved: Vec::new(), memo: FxHashMap::default() }
    }

    /// Solves one arena rooted at all the given sequents, so later queries on
    /// sequents reachable from them need no new arena.
    pub fn preload(&mut self, roots: &[SeqBits]) -> Result<(), CountermodelError> {
        let arena = Arena::build(Calculus::Icks5, ArenaKind::Full(CutMode::Ordered), self.sigma.clone(), roots, self.limits)?;
        let sol = solve_game(&arena.game);
        self.solved.push((arena, sol));
        Ok(())
    }
}

impl ProvabilityOracle for ArenaOracle {
    fn sigma(&self) -> &Arc<Sigma> {
        &self.sigma
    }

    fn provable(&mut self, s: SeqBits) -> Result<bool, CountermodelError> {
        if let Some(&b) = self.memo.get(&s) {
            return Ok(b);
        }
        let found = self
            .solved
            .iter()
            .find_map(|(a, sol)| a.node_of(s).map(|v| sol.winner[v as usize] == Player::Prover));
        let b = match found {
            Some(b) => b,
            None => {
                self.preload(&[s])?;
                let (a, sol) = self.solved.last().expect("just solved");
                sol.winner[a.root() as usize] == Player::Prover
            }
        };
        self.memo.insert(s, b);
        Ok(b)
    }
}

/// Extends an unprovable sequent to a Σ-saturated one by cutting on the missing
/// members in index order and keeping an unprovable branch.
pub fn saturate_bits(oracle: &mut dyn ProvabilityOracle, s: SeqBits) -> Result<SeqBits, CountermodelError> {
    if oracle.provable(s)? {
        return Err(CountermodelError::Provable);
    }
    let all = oracle.sigma().all();
    let mut cur = s;
    while (cur.left | cur.right) != all {
        let chi = (all & !(cur.left | cur.right)).trailing_zeros() as u8;
        let l = SeqBits { left: cur.left | bit(chi), ..cur };
        let r = SeqBits { right: cur.right | bit(chi), ..cur };
        cur = if !oracle.provable(l)? {
            l
        } else if !oracle.provable(r)? {
            r
        } else {
            let sigma = oracle.sigma().clone();
            return Err(CountermodelError::InconsistentOracle(Sequent::from_bits(&sigma, cur).to_string()));
        };
    }
    Ok(cur)
}

pub fn saturate_sequent(oracle: &mut dyn ProvabilityOracle, s: &Sequent) -> Result<Sequent, CountermodelError> {
    let sigma = oracle.sigma().clone();
    let bits = s.to_bits(&sigma)?;
    Ok(Sequent::from_bits(&sigma, saturate_bits(oracle, bits)?))
}

/// Which saturation condition fails for a saturated sequent, if any.
pub fn saturation_defect(sigma: &Sigma, s: SeqBits) -> Option<String> {
    let l = |i: u8| s.in_left(i);
    let r = |i: u8| s.in_right(i);
    if (s.left | s.right) != sigma.all() {
        return Some("does not cover the universe".into());
    }
    for i in 0..sigma.len() as u8 {
        let f = sigma.formula(i);
        let ok = match sigma.node(i) {
            Node::And(a, b) => l(i) == (l(*a) && l(*b)),
            Node::Or(a, b) => l(i) == (l(*a) || l(*b)),
            Node::K(_, b) => {
                let neg = sigma.index(&Formula::not(f.clone()));
                (!l(i) || l(*b)) && neg.is_none_or(|n| l(i) == r(n))
            }
            Node::C(b, kc) => l(i) == (l(*b) && kc.iter().all(|k| k.is_some_and(l))),
            _ => true,
        };
        if !ok {
            return Some(format!("clause for {f} fails"));
        }
    }
    None
}

#[derive(Clone, Copy, Debug)]
pub struct S5Options {
    pub max_worlds: usize,
    pub limits: Limits,
}

impl Default for S5Options {
    fn default() -> Self {
        S5Options { max_worlds: 5000, limits: Limits::default() }
    }
}

/// The canonical ICKS5 model over the saturated sequents of the universe of
/// `goal`, with the saturation of `goal` as root.
pub fn extract_countermodel_s5(
    goal: &Sequent,
    agents: &AgentSet,
    opts: S5Options,
) -> Result<Countermodel, CountermodelError> {
    let sigma = crate::decide::universe(Calculus::Icks5, goal, agents)?;
    let root_bits = goal.to_bits(&sigma)?;
    let n = sigma.len();
    if n >= 64 || (1u64 << n) as usize > opts.limits.max_sequents {
        return Err(ArenaError::TooManySequents(opts.limits.max_sequents).into());
    }
    let all = sigma.all();
    let splits: Vec<SeqBits> = (0..1u128 << n).map(|l| SeqBits::new(l, all & !l, None)).collect();
    let mut oracle = ArenaOracle::new(sigma.clone(), opts.limits);
    let mut roots = vec![root_bits];
    roots.extend(&splits);
    oracle.preload(&roots)?;
    let root = saturate_bits(&mut oracle, root_bits)?;
    let mut lefts = Vec::new();
    for s in splits {
        if !oracle.provable(s)? {
            lefts.push(s.left);
            if lefts.len() > opts.max_worlds {
                return Err(CountermodelError::TooManyWorlds(opts.max_worlds));
            }
        }
    }
    for &l in &lefts {
        let s = SeqBits::new(l, all & !l, None);
        if let Some(d) = saturation_defect(&sigma, s) {
            return Err(CountermodelError::Unverified(format!("{}: {d}", Sequent::from_bits(&sigma, s))));
        }
    }
    let root_world = lefts.iter().position(|&l| l == root.left).ok_or_else(|| {
        CountermodelError::Unverified("the saturated goal is not a world".into())
    })?;
    let w = lefts.len();
    let le = Relation::from_pairs(
        w,
        (0..w).flat_map(|x| (0..w).map(move |y| (x, y))).filter(|&(x, y)| lefts[x] & !lefts[y] == 0),
    );
    let mut relations = empty_relations(agents, w);
    for (ai, a) in agents.iter().enumerate() {
        let km = sigma.k_mask(ai as u8);
        let r = Relation::from_pairs(
            w,
            (0..w).flat_map(|x| (0..w).map(move |y| (x, y))).filter(|&(x, y)| lefts[x] & km == lefts[y] & km),
        );
        relations.insert(a.clone(), r);
    }
    let valuation = lefts.iter().map(|&l| valuation_of(&sigma, l)).collect();
    let names = lefts.iter().enumerate().map(|(i, _)| format!("w{i}")).collect();
    let cm = Countermodel { model: Model::new(names, le, relations, valuation), root: root_world };
    cm.verify(FrameClass::S5, goal).map_err(CountermodelError::Unverified)?;
    Ok(cm)
}
