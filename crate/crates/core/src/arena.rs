//! Proof-search arenas: the full game over all rule instances and the search game
//! built from invertible rules and choice rules.
//!
//! Sequent positions belong to Prover and rule positions to Refuter. Arenas are
//! built breadth first from their roots, interning each sequent once.

use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use rustc_hash::FxHashMap;
use serde::Serialize;
use thiserror::Error;

use crate::game::{Game, Player};
use crate::rules::{bit_instances, BitInstance, Calculus, CutMode, Policy, RuleId, NO_AGENT};
use crate::sequent::Sequent;
use crate::sigma::{bit, Node, SeqBits, Sigma, NO_FOCUS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArenaError {
    #[error("sequent limit of {0} exceeded")]
    TooManySequents(usize),
    #[error("time budget exceeded after {0} sequents")]
    Timeout(usize),
    #[error("the search arena is not defined for ICKS5")]
    SearchS5,
}

/// Resource caps for construction.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub max_sequents: usize,
    pub deadline: Option<Instant>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_sequents: 2_000_000, deadline: None }
    }
}

/// Which premise group of a choice rule a search-arena move comes from.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Group {
    /// An ordinary rule instance.
    Plain,
    Intuitionistic,
    Modal(u8),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RuleNode {
    pub rule: RuleId,
    pub agent: u8,
    pub principal: u8,
    pub focused_cr: bool,
    pub group: Group,
    pub conclusion: u32,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Pos {
    Seq(SeqBits),
    Rule(RuleNode),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ArenaKind {
    /// All rule instances, with the given ICKS5 cuts.
    Full(CutMode),
    Search,
}

pub struct Arena {
    pub cal: Calculus,
    pub kind: ArenaKind,
    pub sigma: Arc<Sigma>,
    pub game: Game,
    pub pos: Vec<Pos>,
    pub roots: Vec<u32>,
    index: FxHashMap<SeqBits, u32>,
    sequents: usize,
}

fn seq_priority(s: SeqBits) -> u8 {
    if s.has_focus() {
        1
    } else {
        3
    }
}

struct Builder<'a> {
    arena: Arena,
    limits: Limits,
    pending: std::collections::VecDeque<Vec<u32>>,
    scratch: Vec<(BitInstance, Group)>,
    _p: std::marker::PhantomData<&'a ()>,
}

impl Builder<'_> {
    fn intern(&mut self, s: SeqBits) -> Result<u32, ArenaError> {
        if let Some(&v) = self.arena.index.get(&s) {
            return Ok(v);
        }
        if self.arena.sequents >= self.limits.max_sequents {
            return Err(ArenaError::TooManySequents(self.limits.max_sequents));
        }
        let v = self.arena.game.push_node(Player::Prover, seq_priority(s));
        self.arena.pos.push(Pos::Seq(s));
        self.arena.index.insert(s, v);
        self.arena.sequents += 1;
        Ok(v)
    }

    fn rule(&mut self, node: RuleNode, premises: &[SeqBits]) -> Result<u32, ArenaError> {
        let prio = if node.focused_cr { 2 } else { 1 };
        let v = self.arena.game.push_node(Player::Refuter, prio);
        self.arena.pos.push(Pos::Rule(node));
        let mut succ = Vec::with_capacity(premises.len());
        for p in premises {
            let t = self.intern(*p)?;
            if !succ.contains(&t) {
                succ.push(t);
            }
        }
        self.pending.push_back(succ);
        Ok(v)
    }

    fn expand(&mut self, v: u32, s: SeqBits) -> Result<Vec<u32>, ArenaError> {
        let mut scratch = std::mem::take(&mut self.scratch);
        moves(&self.arena.sigma, self.arena.cal, self.arena.kind, s, &mut scratch);
        let mut out = Vec::with_capacity(scratch.len());
        for (inst, group) in &scratch {
            let node = RuleNode {
                rule: inst.rule,
                agent: inst.agent,
                principal: inst.principal,
                focused_cr: inst.focused_cr,
                group: *group,
                conclusion: v,
            };
            out.push(self.rule(node, &inst.premises)?);
        }
        self.scratch = scratch;
        Ok(out)
    }
}

/// The moves from sequent `s`, in the order of the arena's successor lists.
pub fn moves(sigma: &Sigma, cal: Calculus, kind: ArenaKind, s: SeqBits, out: &mut Vec<(BitInstance, Group)>) {
    out.clear();
    match kind {
        ArenaKind::Full(cuts) => {
            let mut insts = Vec::new();
            bit_instances(sigma, cal, s, Policy::arena(cuts), &mut insts);
            out.extend(insts.into_iter().map(|i| (i, Group::Plain)));
        }
        ArenaKind::Search => {
            if let Some(ax) = sigma.is_axiom(s) {
                let inst = BitInstance { rule: ax, agent: NO_AGENT, principal: NO_FOCUS, focused_cr: false, premises: vec![] };
                out.push((inst, Group::Plain));
            } else if let Some((right, i)) = sigma.first_unsaturated(cal, s) {
                out.push((invertible_step(sigma, s, right, i), Group::Plain));
            } else {
                let n = if cal == Calculus::Icks4 { 1 } else { 0 };
                for (agent, principal, prem) in sigma.choice_premises(n, s) {
                    let (rule, group, agent) = match agent {
                        None => (RuleId::ImpR, Group::Intuitionistic, NO_AGENT),
                        Some(a) => (if n == 0 { RuleId::K } else { RuleId::S4 }, Group::Modal(a), a),
                    };
                    let inst = BitInstance { rule, agent, principal, focused_cr: false, premises: vec![prem] };
                    out.push((inst, group));
                }
            }
        }
    }
}

/// The preserving invertible instance for the unsaturated member `i` of `s`; for a
/// focused `C` on the right, the non-preserving focused `CR`.
pub fn invertible_step(sigma: &Sigma, s: SeqBits, right: bool, i: u8) -> BitInstance {
    let with_left = |extra: u128| SeqBits { left: s.left | extra, ..s };
    let with_right = |extra: u128| SeqBits { right: s.right | extra, ..s };
    let (rule, premises, focused_cr, agent) = match (right, sigma.node(i)) {
        (false, Node::And(a, b)) => (RuleId::AndL, vec![with_left(bit(*a) | bit(*b))], false, NO_AGENT),
        (false, Node::Or(a, b)) => (RuleId::OrL, vec![with_left(bit(*a)), with_left(bit(*b))], false, NO_AGENT),
        (false, Node::Imp(a, b)) => {
            (RuleId::ImpL, vec![with_right(bit(*a)), with_left(bit(*b))], false, NO_AGENT)
        }
        (false, Node::C(b, kc)) => {
            let mut extra = bit(*b);
            for k in kc.iter().flatten() {
                extra |= bit(*k);
            }
            (RuleId::CL, vec![with_left(extra)], false, NO_AGENT)
        }
        (false, Node::K(a, b)) => (RuleId::T, vec![with_left(bit(*b))], false, *a),
        (true, Node::And(a, b)) => (RuleId::AndR, vec![with_right(bit(*a)), with_right(bit(*b))], false, NO_AGENT),
        (true, Node::Or(a, b)) => (RuleId::OrR, vec![with_right(bit(*a) | bit(*b))], false, NO_AGENT),
        (true, Node::C(b, kc)) if s.focus == i => {
            let rest = s.right & !bit(i);
            let mut prem = vec![SeqBits::new(s.left, rest | bit(*b), None)];
            prem.extend(kc.iter().flatten().map(|k| SeqBits::new(s.left, rest | bit(*k), Some(*k))));
            (RuleId::CR, prem, true, NO_AGENT)
        }
        (true, Node::C(b, kc)) => {
            let mut prem = vec![with_right(bit(*b))];
            prem.extend(kc.iter().flatten().map(|k| with_right(bit(*k))));
            (RuleId::CR, prem, false, NO_AGENT)
        }
        (side, node) => unreachable!("member {i} ({node:?}, right={side}) has no invertible rule"),
    };
    BitInstance { rule, agent, principal: i, focused_cr, premises }
}

impl Arena {
    fn empty(cal: Calculus, kind: ArenaKind, sigma: Arc<Sigma>) -> Arena {
        Arena {
            cal,
            kind,
            sigma,
            game: Game::new(),
            pos: Vec::new(),
            roots: Vec::new(),
            index: FxHashMap::default(),
            sequents: 0,
        }
    }

    /// Builds the reachable part of an arena from the given roots.
    pub fn build(
        cal: Calculus,
        kind: ArenaKind,
        sigma: Arc<Sigma>,
        roots: &[SeqBits],
        limits: Limits,
    ) -> Result<Arena, ArenaError> {
        if kind == ArenaKind::Search && cal == Calculus::Icks5 {
            return Err(ArenaError::SearchS5);
        }
        let mut b = Builder {
            arena: Arena::empty(cal, kind, sigma),
            limits,
            pending: Default::default(),
            scratch: Vec::new(),
            _p: Default::default(),
        };
        for r in roots {
            let v = b.intern(*r)?;
            b.arena.roots.push(v);
        }
        let mut next: usize = 0;
        while next < b.arena.pos.len() {
            if next.is_multiple_of(4096) {
                if let Some(d) = limits.deadline {
                    if Instant::now() > d {
                        return Err(ArenaError::Timeout(b.arena.sequents));
                    }
                }
            }
            let succ = match &b.arena.pos[next] {
                Pos::Seq(s) => {
                    let s = *s;
                    b.expand(next as u32, s)?
                }
                Pos::Rule(_) => b.pending.pop_front().expect("rule successors recorded"),
            };
            b.arena.game.push_successors(&succ);
            next += 1;
        }
        Ok(b.arena)
    }

    pub fn root(&self) -> u32 {
        self.roots[0]
    }

    pub fn sequent_count(&self) -> usize {
        self.sequents
    }

    pub fn len(&self) -> usize {
        self.pos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty()
    }

    pub fn node_of(&self, s: SeqBits) -> Option<u32> {
        self.index.get(&s).copied()
    }

    pub fn seq(&self, v: u32) -> Option<SeqBits> {
        match &self.pos[v as usize] {
            Pos::Seq(s) => Some(*s),
            Pos::Rule(_) => None,
        }
    }

    pub fn rule(&self, v: u32) -> Option<&RuleNode> {
        match &self.pos[v as usize] {
            Pos::Rule(r) => Some(r),
            Pos::Seq(_) => None,
        }
    }

    /// The rule instance behind rule position `r`.
    pub fn instance(&self, r: u32) -> BitInstance {
        let node = self.rule(r).expect("a rule position");
        let v = node.conclusion;
        let k = self.game.succ(v).iter().position(|&x| x == r).expect("listed under its conclusion");
        let mut out = Vec::new();
        moves(&self.sigma, self.cal, self.kind, self.seq(v).expect("a sequent position"), &mut out);
        out.swap_remove(k).0
    }

    fn label(&self, v: u32) -> String {
        match &self.pos[v as usize] {
            Pos::Seq(s) => Sequent::from_bits(&self.sigma, *s).to_string(),
            Pos::Rule(r) => {
                let mut out = r.rule.name().to_string();
                if r.principal != NO_FOCUS {
                    let _ = write!(out, " {}", self.sigma.formula(r.principal));
                }
                out
            }
        }
    }

    pub fn to_json(&self) -> ArenaJson {
        let positions = (0..self.len() as u32)
            .map(|v| PositionJson {
                id: v,
                kind: if self.seq(v).is_some() { "sequent" } else { "rule" },
                owner: self.game.owner(v),
                priority: self.game.priority(v),
                label: self.label(v),
            })
            .collect();
        let edges = (0..self.len() as u32)
            .flat_map(|v| self.game.succ(v).iter().map(move |&t| (v, t)))
            .collect();
        ArenaJson { logic: self.cal.name(), initial: self.roots.clone(), positions, edges }
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph arena {\n");
        for v in 0..self.len() as u32 {
            let shape = if self.seq(v).is_some() { "box" } else { "ellipse" };
            let label = self.label(v).replace('"', "\\\"");
            let _ = writeln!(out, "  n{v} [shape={shape}, label=\"{label} ({})\"];", self.game.priority(v));
        }
        for v in 0..self.len() as u32 {
            for &t in self.game.succ(v) {
                let _ = writeln!(out, "  n{v} -> n{t};");
            }
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Serialize)]
pub struct PositionJson {
    pub id: u32,
    pub kind: &'static str,
    pub owner: Player,
    pub priority: u8,
    pub label: String,
}

#[derive(Serialize)]
pub struct ArenaJson {
    pub logic: &'static str,
    pub initial: Vec<u32>,
    pub positions: Vec<PositionJson>,
    pub edges: Vec<(u32, u32)>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::closure;
    use crate::formula::AgentSet;
    use crate::game::solve;
    use crate::sequent::parse_sequent;

    fn arena(cal: Calculus, kind: ArenaKind, t: &str) -> Arena {
        let g = AgentSet::parse("a").unwrap();
        let s = parse_sequent(t, &g).unwrap();
        let sigma = Arc::new(Sigma::new(&closure(&s.formulas(), &g), &g).unwrap());
        let root = s.to_bits(&sigma).unwrap();
        Arena::build(cal, kind, sigma, &[root], Limits::default()).unwrap()
    }

    #[test]
    fn axiom_arena() {
        let a = arena(Calculus::Ick, ArenaKind::Full(CutMode::Ordered), "p => p");
        let r = a.root();
        let succ = a.game.succ(r);
        assert_eq!(succ.len(), 1);
        assert_eq!(a.rule(succ[0]).unwrap().rule, RuleId::Id);
        assert!(a.game.succ(succ[0]).is_empty());
        assert_eq!(solve(&a.game, r).0, Player::Prover);
    }

    #[test]
    fn prover_dead_end() {
        let a = arena(Calculus::Ick, ArenaKind::Full(CutMode::Ordered), "=> false");
        assert!(a.game.succ(a.root()).is_empty());
        assert_eq!(solve(&a.game, a.root()).0, Player::Refuter);
    }

    #[test]
    fn focused_cr_priority() {
        let a = arena(Calculus::Ick, ArenaKind::Full(CutMode::Ordered), "=> C p");
        assert!((0..a.len() as u32).any(|v| a.game.priority(v) == 2 && a.rule(v).unwrap().focused_cr));
    }

    #[test]
    fn search_arena_modal_dead_end() {
        let a = arena(Calculus::Ick, ArenaKind::Search, "=> K{a} p");
        assert_eq!(solve(&a.game, a.root()).0, Player::Refuter);
        assert!(Arena::build(
            Calculus::Icks5,
            ArenaKind::Search,
            a.sigma.clone(),
            &[],
            Limits::default()
        )
        .is_err());
    }
}
