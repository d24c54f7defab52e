//! Cyclic proofs: extraction from Prover strategies, an independent checker and
//! the JSON certificate format.

use std::collections::{BTreeMap, BTreeSet};

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arena::{Arena, ArenaKind};
use crate::formula::{Agent, AgentSet, Formula};
use crate::game::{Player, Strategy, NONE};
use crate::parse::parse;
use crate::rules::{Calculus, RuleId};
use crate::sequent::{parse_sequent, Sequent};
use crate::sigma::NO_FOCUS;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofNode {
    pub sequent: Sequent,
    /// `None` for a leaf closed by a back edge.
    pub rule: Option<RuleId>,
    /// The principal formula; for cut, the cut formula.
    pub principal: Option<Formula>,
    pub premises: Vec<usize>,
}

/// A finite proof tree whose non-axiomatic leaves point back to ancestors.
/// Node 0 is the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicProof {
    pub logic: Option<Calculus>,
    pub agents: AgentSet,
    pub nodes: Vec<ProofNode>,
    pub back_edges: BTreeMap<usize, usize>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExtractError {
    #[error("the strategy is not a Prover strategy")]
    NotProver,
    #[error("the strategy makes no move at position {0}")]
    NoMove(u32),
    #[error("proofs are extracted from full arenas only")]
    SearchArena,
    #[error("proof exceeds {0} nodes")]
    TooLarge(usize),
}

pub const DEFAULT_MAX_PROOF_NODES: usize = 1_000_000;

impl CyclicProof {
    pub fn root(&self) -> &Sequent {
        &self.nodes[0].sequent
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn rule_count(&self, rule: RuleId) -> usize {
        self.nodes.iter().filter(|n| n.rule == Some(rule)).count()
    }
}

/// Unfolds a Prover strategy from the first arena root into a tree, cutting each
/// branch at the first repeated sequent and pointing it back at the earlier copy.
pub fn extract_proof(arena: &Arena, strategy: &Strategy, max_nodes: usize) -> Result<CyclicProof, ExtractError> {
    if strategy.player != Player::Prover {
        return Err(ExtractError::NotProver);
    }
    if arena.kind == ArenaKind::Search {
        return Err(ExtractError::SearchArena);
    }
    struct Frame {
        node: usize,
        premises: Vec<u32>,
        next: usize,
    }
    let sigma = &arena.sigma;
    let mut nodes: Vec<ProofNode> = Vec::new();
    let mut back_edges = BTreeMap::new();
    let mut on_branch: FxHashMap<u32, usize> = FxHashMap::default();
    let mut stack: Vec<Frame> = Vec::new();
    let mut visit = |v: u32,
                     nodes: &mut Vec<ProofNode>,
                     stack: &mut Vec<Frame>,
                     on_branch: &mut FxHashMap<u32, usize>|
     -> Result<usize, ExtractError> {
        if nodes.len() >= max_nodes {
            return Err(ExtractError::TooLarge(max_nodes));
        }
        let sequent = Sequent::from_bits(sigma, arena.seq(v).expect("a sequent position"));
        let id = nodes.len();
        if let Some(&companion) = on_branch.get(&v) {
            nodes.push(ProofNode { sequent, rule: None, principal: None, premises: vec![] });
            back_edges.insert(id, companion);
            return Ok(id);
        }
        let r = strategy.choice.get(v as usize).copied().unwrap_or(NONE);
        if r == NONE || !arena.game.succ(v).contains(&r) {
            return Err(ExtractError::NoMove(v));
        }
        let inst = arena.instance(r);
        let principal = (inst.principal != NO_FOCUS).then(|| sigma.formula(inst.principal).clone());
        nodes.push(ProofNode { sequent, rule: Some(inst.rule), principal, premises: vec![] });
        let premises = inst
            .premises
            .iter()
            .map(|p| arena.node_of(*p).expect("premises are interned"))
            .collect();
        on_branch.insert(v, id);
        stack.push(Frame { node: id, premises, next: 0 });
        Ok(id)
    };
    visit(arena.root(), &mut nodes, &mut stack, &mut on_branch)?;
    let mut arena_of: Vec<u32> = vec![arena.root()];
    while let Some(top) = stack.last_mut() {
        if top.next == top.premises.len() {
            let done = stack.pop().expect("nonempty");
            on_branch.remove(&arena_of[done.node]);
            continue;
        }
        let v = top.premises[top.next];
        top.next += 1;
        let parent = top.node;
        let id = visit(v, &mut nodes, &mut stack, &mut on_branch)?;
        arena_of.push(v);
        nodes[parent].premises.push(id);
    }
    Ok(CyclicProof { logic: Some(arena.cal), agents: arena.sigma.agents.clone(), nodes, back_edges })
}

/// The first defect found by [`check_proof`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("node {node}: {reason}")]
pub struct ProofDefect {
    pub node: usize,
    pub reason: String,
}

fn defect<T>(node: usize, reason: impl Into<String>) -> Result<T, ProofDefect> {
    Err(ProofDefect { node, reason: reason.into() })
}

fn member_of(cal: Calculus, rule: RuleId) -> bool {
    let s5 = cal == Calculus::Icks5;
    match rule {
        RuleId::K => matches!(cal, Calculus::Ick | Calculus::Ickt),
        RuleId::T => matches!(cal, Calculus::Ickt | Calculus::Icks4 | Calculus::Icks5),
        RuleId::S4 => cal == Calculus::Icks4,
        RuleId::S5 | RuleId::KImp | RuleId::Cut => s5,
        _ => true,
    }
}

type Set = BTreeSet<Formula>;

fn plus(base: &Set, extra: &[Formula]) -> Set {
    let mut s = base.clone();
    s.extend(extra.iter().cloned());
    s
}

fn minus(base: &Set, f: &Formula) -> Set {
    let mut s = base.clone();
    s.remove(f);
    s
}

fn k_body<'a>(f: &'a Formula, a: &Agent) -> Option<&'a Formula> {
    match f {
        Formula::K(b, body) if b == a => Some(body),
        _ => None,
    }
}

struct Step<'a> {
    cal: Calculus,
    agents: &'a AgentSet,
    sigma: &'a Set,
    c: &'a Sequent,
    ps: Vec<&'a Sequent>,
}

/// Expected premise shape: added left formulas, added right formulas.
type Shape = (Vec<Formula>, Vec<Formula>);

impl Step<'_> {
    fn same(&self, p: &Sequent, left: &Set, right: &Set, focus: Option<&Formula>) -> bool {
        &p.left == left && &p.right == right && p.focus.as_ref() == focus
    }

    /// A left rule with principal `pr`, kept or dropped uniformly in every premise.
    fn left_rule(&self, pr: &Formula, shapes: &[Shape]) -> Result<(), String> {
        if !self.c.left.contains(pr) {
            return Err("principal is not on the left".into());
        }
        self.context_rule(true, pr, shapes)
    }

    fn right_rule(&self, pr: &Formula, shapes: &[Shape]) -> Result<(), String> {
        if !self.c.right.contains(pr) {
            return Err("principal is not on the right".into());
        }
        if self.c.is_focused(pr) {
            return Err("principal is in focus".into());
        }
        self.context_rule(false, pr, shapes)
    }

    fn context_rule(&self, left: bool, pr: &Formula, shapes: &[Shape]) -> Result<(), String> {
        if self.ps.len() != shapes.len() {
            return Err(format!("expected {} premises, found {}", shapes.len(), self.ps.len()));
        }
        let (g, d) = (&self.c.left, &self.c.right);
        for keep in [true, false] {
            let (gb, db) = match (left, keep) {
                (_, true) => (g.clone(), d.clone()),
                (true, false) => (minus(g, pr), d.clone()),
                (false, false) => (g.clone(), minus(d, pr)),
            };
            let ok = shapes.iter().zip(&self.ps).all(|((lx, rx), p)| {
                self.same(p, &plus(&gb, lx), &plus(&db, rx), self.c.focus.as_ref())
            });
            if ok {
                return Ok(());
            }
        }
        Err("premises do not match the rule".into())
    }

    fn modal_premise(&self) -> Result<&Sequent, String> {
        match self.ps.as_slice() {
            [p] => Ok(p),
            _ => Err("a modal rule has exactly one premise".into()),
        }
    }

    fn check(&self, rule: RuleId, pr: Option<&Formula>) -> Result<(), String> {
        let c = self.c;
        if !member_of(self.cal, rule) {
            return Err(format!("rule {rule} is not part of {}", self.cal));
        }
        if rule.is_axiom() {
            if !self.ps.is_empty() {
                return Err("axioms have no premises".into());
            }
            let holds = match rule {
                RuleId::Id => c.left.intersection(&c.right).next().is_some(),
                _ => c.left.contains(&Formula::Bottom),
            };
            return if holds { Ok(()) } else { Err(format!("not an instance of {rule}")) };
        }
        let pr = pr.ok_or("missing principal formula")?;
        match (rule, pr) {
            (RuleId::U, _) => {
                if !c.is_focused(pr) {
                    return Err("u needs the focused principal".into());
                }
                self.expect_one(&c.left, &c.right, None)
            }
            (RuleId::F, _) => {
                if c.focus.is_some() || !c.right.contains(pr) || !pr.is_focusable() {
                    return Err("f needs an unfocused sequent and a focusable right formula".into());
                }
                self.expect_one(&c.left, &c.right, Some(pr))
            }
            (RuleId::AndL, Formula::And(a, b)) => self.left_rule(pr, &[(vec![(**a).clone(), (**b).clone()], vec![])]),
            (RuleId::OrL, Formula::Or(a, b)) => {
                self.left_rule(pr, &[(vec![(**a).clone()], vec![]), (vec![(**b).clone()], vec![])])
            }
            (RuleId::ImpL, Formula::Implies(a, b)) => {
                self.left_rule(pr, &[(vec![], vec![(**a).clone()]), (vec![(**b).clone()], vec![])])
            }
            (RuleId::T, Formula::K(_, a)) => self.left_rule(pr, &[(vec![(**a).clone()], vec![])]),
            (RuleId::CL, Formula::C(a)) => {
                let mut add = vec![(**a).clone()];
                add.extend(self.agents.iter().map(|ag| Formula::k(ag, pr.clone())));
                self.left_rule(pr, &[(add, vec![])])
            }
            (RuleId::AndR, Formula::And(a, b)) => {
                self.right_rule(pr, &[(vec![], vec![(**a).clone()]), (vec![], vec![(**b).clone()])])
            }
            (RuleId::OrR, Formula::Or(a, b)) => self.right_rule(pr, &[(vec![], vec![(**a).clone(), (**b).clone()])]),
            (RuleId::CR, Formula::C(a)) => {
                let unfoldings: Vec<Formula> = self.agents.iter().map(|ag| Formula::k(ag, pr.clone())).collect();
                if c.is_focused(pr) {
                    self.focused_cr(pr, a, &unfoldings)
                } else {
                    let mut shapes = vec![(vec![], vec![(**a).clone()])];
                    shapes.extend(unfoldings.into_iter().map(|k| (vec![], vec![k])));
                    self.right_rule(pr, &shapes)
                }
            }
            (RuleId::ImpR, Formula::Implies(a, b)) => {
                if !c.right.contains(pr) {
                    return Err("principal is not on the right".into());
                }
                self.expect_one(&plus(&c.left, &[(**a).clone()]), &Set::from([(**b).clone()]), None)
            }
            (RuleId::KImp, Formula::Implies(a, b)) if matches!(**a, Formula::K(..)) => {
                self.right_rule(pr, &[(vec![(**a).clone()], vec![(**b).clone()])])
            }
            (RuleId::K | RuleId::S4 | RuleId::S5, Formula::K(ag, body)) => self.modal(rule, pr, ag, body),
            (RuleId::Cut, chi) => {
                if !self.sigma.contains(chi) {
                    return Err("cut formula is outside the universe".into());
                }
                let want = [(plus(&c.left, std::slice::from_ref(chi)), c.right.clone()), (c.left.clone(), plus(&c.right, std::slice::from_ref(chi)))];
                if self.ps.len() == 2 && want.iter().zip(&self.ps).all(|((l, r), p)| self.same(p, l, r, c.focus.as_ref())) {
                    Ok(())
                } else {
                    Err("premises do not match the rule".into())
                }
            }
            _ => Err(format!("principal {pr} does not fit rule {rule}")),
        }
    }

    fn expect_one(&self, left: &Set, right: &Set, focus: Option<&Formula>) -> Result<(), String> {
        match self.ps.as_slice() {
            [p] if self.same(p, left, right, focus) => Ok(()),
            _ => Err("premises do not match the rule".into()),
        }
    }

    fn focused_cr(&self, pr: &Formula, body: &Formula, unfoldings: &[Formula]) -> Result<(), String> {
        if self.ps.len() != unfoldings.len() + 1 {
            return Err("wrong number of premises".into());
        }
        let rest = minus(&self.c.right, pr);
        let l = &self.c.left;
        if !self.same(self.ps[0], l, &plus(&rest, std::slice::from_ref(body)), None) {
            return Err("first premise does not match".into());
        }
        for (k, p) in unfoldings.iter().zip(&self.ps[1..]) {
            if !self.same(p, l, &plus(&rest, std::slice::from_ref(k)), Some(k)) {
                return Err(format!("premise for {k} does not match"));
            }
        }
        Ok(())
    }

    fn modal(&self, rule: RuleId, pr: &Formula, ag: &Agent, body: &Formula) -> Result<(), String> {
        let c = self.c;
        if !c.right.contains(pr) {
            return Err("principal is not on the right".into());
        }
        let p = self.modal_premise()?;
        let focused = c.is_focused(pr);
        let body_focus = focused.then_some(body);
        match rule {
            RuleId::K => {
                if !p.left.iter().all(|g| c.left.contains(&Formula::k(ag, g.clone()))) {
                    return Err("premise antecedent is not unboxed from the conclusion".into());
                }
                self.same_right(p, body, body_focus)
            }
            RuleId::S4 => {
                if !p.left.iter().all(|g| k_body(g, ag).is_some() && c.left.contains(g)) {
                    return Err("premise antecedent is not a set of conclusion K formulas".into());
                }
                self.same_right(p, body, body_focus)
            }
            _ => {
                if !p.left.iter().all(|g| k_body(g, ag).is_some() && c.left.contains(g)) {
                    return Err("premise antecedent is not a set of conclusion K formulas".into());
                }
                if !p.right.contains(body) {
                    return Err("premise succedent lacks the body".into());
                }
                for d in p.right.iter().filter(|d| *d != body) {
                    if k_body(d, ag).is_none() || !c.right.contains(d) || (d == pr && focused) {
                        return Err(format!("premise succedent member {d} is not allowed"));
                    }
                }
                let kept = c.focus.as_ref().filter(|f| !focused && p.right.contains(*f) && *f != body);
                let expected = if focused { Some(body) } else { kept };
                // the body may coincide with a focused side formula of the conclusion
                let merged = !focused && c.is_focused(body) && p.focus.as_ref().is_none_or(|f| f == body);
                if p.focus.as_ref() == expected || merged {
                    Ok(())
                } else {
                    Err("premise focus does not match".into())
                }
            }
        }
    }

    fn same_right(&self, p: &Sequent, body: &Formula, focus: Option<&Formula>) -> Result<(), String> {
        if p.right != Set::from([body.clone()]) {
            return Err("premise succedent must be the body alone".into());
        }
        if p.focus.as_ref() != focus {
            return Err("premise focus does not match".into());
        }
        Ok(())
    }
}

/// Checks a cyclic proof against the rules of `cal` over the universe `sigma`.
pub fn check_proof(cal: Calculus, proof: &CyclicProof, sigma: &BTreeSet<Formula>) -> Result<(), ProofDefect> {
    let n = proof.nodes.len();
    if n == 0 {
        return defect(0, "empty proof");
    }
    let mut parent = vec![usize::MAX; n];
    for (i, node) in proof.nodes.iter().enumerate() {
        for &p in &node.premises {
            if p >= n {
                return defect(i, format!("premise {p} does not exist"));
            }
            if p == 0 || parent[p] != usize::MAX {
                return defect(p, "node has more than one parent");
            }
            parent[p] = i;
        }
    }
    let mut seen = vec![false; n];
    let mut order = vec![0usize];
    seen[0] = true;
    let mut k = 0;
    while k < order.len() {
        for &p in &proof.nodes[order[k]].premises {
            seen[p] = true;
            order.push(p);
        }
        k += 1;
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return defect(i, "node is not reachable from the root");
    }
    for (i, node) in proof.nodes.iter().enumerate() {
        let s = &node.sequent;
        if let Err(e) = s.validate() {
            return defect(i, e.to_string());
        }
        if !s.is_sigma_sequent(sigma) {
            return defect(i, "sequent contains a formula outside the universe");
        }
        match node.rule {
            None => {
                if !node.premises.is_empty() {
                    return defect(i, "a node without a rule has premises");
                }
                if !proof.back_edges.contains_key(&i) {
                    return defect(i, "open leaf without a back edge");
                }
            }
            Some(rule) => {
                if proof.back_edges.contains_key(&i) {
                    return defect(i, "back edge from a node with a rule");
                }
                let step = Step {
                    cal,
                    agents: &proof.agents,
                    sigma,
                    c: s,
                    ps: node.premises.iter().map(|&p| &proof.nodes[p].sequent).collect(),
                };
                if let Err(reason) = step.check(rule, node.principal.as_ref()) {
                    return defect(i, format!("{rule}: {reason}"));
                }
            }
        }
    }
    for (&leaf, &comp) in &proof.back_edges {
        if leaf >= n || comp >= n {
            return defect(leaf.min(n - 1), "back edge to a missing node");
        }
        if proof.nodes[leaf].sequent != proof.nodes[comp].sequent {
            return defect(leaf, "companion sequent differs");
        }
        let mut path = vec![leaf];
        let mut x = leaf;
        while x != comp {
            if x == 0 {
                return defect(leaf, "companion is not an ancestor");
            }
            x = parent[x];
            path.push(x);
        }
        if comp == leaf {
            return defect(leaf, "companion is the leaf itself");
        }
        if let Some(&u) = path.iter().find(|&&u| proof.nodes[u].sequent.focus.is_none()) {
            return defect(u, format!("unfocused sequent on the cycle of leaf {leaf}"));
        }
        let through_cr = path[1..].iter().any(|&u| {
            let node = &proof.nodes[u];
            node.rule == Some(RuleId::CR)
                && node.principal.is_some()
                && node.sequent.focus == node.principal
        });
        if !through_cr {
            return defect(leaf, "cycle passes no focused CR");
        }
    }
    Ok(())
}

pub fn is_valid_proof(cal: Calculus, proof: &CyclicProof, sigma: &BTreeSet<Formula>) -> bool {
    check_proof(cal, proof, sigma).is_ok()
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ProofNodeJson {
    pub id: usize,
    pub sequent: String,
    pub rule: Option<String>,
    pub premise_ids: Vec<usize>,
    pub principal: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ProofJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub logic: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agents: Option<Vec<String>>,
    pub nodes: Vec<ProofNodeJson>,
    #[serde(default)]
    pub back_edges: BTreeMap<usize, usize>,
}

#[derive(Debug, Error)]
pub enum ProofFormatError {
    #[error("no agents given")]
    NoAgents,
    #[error("bad agent list: {0}")]
    Agents(String),
    #[error("bad logic: {0}")]
    Logic(String),
    #[error("duplicate node id {0}")]
    DuplicateId(usize),
    #[error("unknown node id {0}")]
    UnknownId(usize),
    #[error("node {0}: {1}")]
    Node(usize, String),
    #[error("empty proof")]
    Empty,
}

impl ProofJson {
    pub fn from_proof(p: &CyclicProof) -> Self {
        ProofJson {
            logic: p.logic.map(|c| c.name().to_string()),
            agents: Some(p.agents.iter().map(|a| a.name().to_string()).collect()),
            nodes: p
                .nodes
                .iter()
                .enumerate()
                .map(|(i, n)| ProofNodeJson {
                    id: i,
                    sequent: n.sequent.to_string(),
                    rule: n.rule.map(|r| r.name().to_string()),
                    premise_ids: n.premises.clone(),
                    principal: n.principal.as_ref().map(|f| f.to_string()),
                })
                .collect(),
            back_edges: p.back_edges.clone(),
        }
    }

    /// Rebuilds the proof; the first listed node is the root. `agents` overrides
    /// the agent list stored in the file.
    pub fn to_proof(&self, agents: Option<&AgentSet>) -> Result<CyclicProof, ProofFormatError> {
        let agents = match (agents, &self.agents) {
            (Some(a), _) => a.clone(),
            (None, Some(names)) => {
                AgentSet::new(names.iter().map(|s| s.as_str())).map_err(|e| ProofFormatError::Agents(e.to_string()))?
            }
            (None, None) => return Err(ProofFormatError::NoAgents),
        };
        let logic = match &self.logic {
            Some(l) => Some(l.parse::<Calculus>().map_err(|e| ProofFormatError::Logic(e.to_string()))?),
            None => None,
        };
        if self.nodes.is_empty() {
            return Err(ProofFormatError::Empty);
        }
        let mut index = BTreeMap::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if index.insert(n.id, i).is_some() {
                return Err(ProofFormatError::DuplicateId(n.id));
            }
        }
        let look = |id: usize| index.get(&id).copied().ok_or(ProofFormatError::UnknownId(id));
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let sequent = parse_sequent(&n.sequent, &agents)
                .map_err(|e| ProofFormatError::Node(n.id, e.to_string()))?;
            let rule = match &n.rule {
                Some(r) => Some(r.parse::<RuleId>().map_err(|e| ProofFormatError::Node(n.id, e))?),
                None => None,
            };
            let principal = match &n.principal {
                Some(t) => Some(parse(t, &agents).map_err(|e| ProofFormatError::Node(n.id, e.to_string()))?),
                None => None,
            };
            let premises = n.premise_ids.iter().map(|&p| look(p)).collect::<Result<_, _>>()?;
            nodes.push(ProofNode { sequent, rule, principal, premises });
        }
        let back_edges = self
            .back_edges
            .iter()
            .map(|(&l, &c)| Ok((look(l)?, look(c)?)))
            .collect::<Result<_, ProofFormatError>>()?;
        Ok(CyclicProof { logic, agents, nodes, back_edges })
    }
}
