//! Finite birelational and classical Kripke models.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Agent, Formula};
use crate::relation::Relation;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("unknown world {0:?}")]
    UnknownWorld(String),
    #[error("model has no worlds")]
    NoWorlds,
    #[error("duplicate world {0:?}")]
    DuplicateWorld(String),
    #[error("order is not antisymmetric: {0:?} and {1:?}")]
    NotAntisymmetric(String, String),
    #[error("unknown agent {0:?}")]
    UnknownAgent(String),
    #[error("no closure construction exists for S5")]
    S5Closure,
    #[error("model is not an S5 model: {0}")]
    NotS5(String),
    #[error("relation of agent {0} is not an equivalence relation")]
    NotEquivalence(String),
    #[error("malformed model: {0}")]
    Malformed(String),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum FrameClass {
    Epistemic,
    Reflexive,
    S4,
    S5,
}

/// A finite birelational model. `order` is expected to be a partial order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Model {
    pub worlds: Vec<String>,
    pub order: Relation,
    pub relations: BTreeMap<Agent, Relation>,
    pub valuation: Vec<BTreeSet<Arc<str>>>,
}

/// A finite classical model without an intuitionistic order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClassicalModel {
    pub worlds: Vec<String>,
    pub relations: BTreeMap<Agent, Relation>,
    pub valuation: Vec<BTreeSet<Arc<str>>>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Violation {
    OrderNotReflexive { w: String },
    OrderNotTransitive { w: String, v: String, u: String },
    OrderNotAntisymmetric { w: String, v: String },
    ValuationNotMonotone { w: String, v: String, atom: String },
    TriangleConfluence { agent: String, w: String, v: String, u: String },
    NotReflexive { agent: String, w: String },
    NotTransitive { agent: String, w: String, v: String, u: String },
    NotSymmetric { agent: String, w: String, v: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OrderNotReflexive { w } => write!(f, "order not reflexive at {w}"),
            Violation::OrderNotTransitive { w, v, u } => {
                write!(f, "order not transitive: {w} <= {v} <= {u}")
            }
            Violation::OrderNotAntisymmetric { w, v } => {
                write!(f, "order not antisymmetric: {w} <= {v} <= {w}")
            }
            Violation::ValuationNotMonotone { w, v, atom } => {
                write!(f, "valuation not monotone: {atom} at {w} but not at {v} >= {w}")
            }
            Violation::TriangleConfluence { agent, w, v, u } => {
                write!(f, "triangle confluence fails for {agent}: {w} <= {v}, {v} R {u}, not {w} R {u}")
            }
            Violation::NotReflexive { agent, w } => write!(f, "R_{agent} not reflexive at {w}"),
            Violation::NotTransitive { agent, w, v, u } => {
                write!(f, "R_{agent} not transitive: {w} R {v} R {u}")
            }
            Violation::NotSymmetric { agent, w, v } => {
                write!(f, "R_{agent} not symmetric: {w} R {v}")
            }
        }
    }
}

fn check_agent_conditions(
    worlds: &[String],
    agent: &Agent,
    r: &Relation,
    fc: FrameClass,
    out: &mut Vec<Violation>,
) {
    let n = worlds.len();
    let name = || agent.name().to_string();
    if matches!(fc, FrameClass::Reflexive | FrameClass::S4 | FrameClass::S5) {
        for w in 0..n {
            if !r.contains(w, w) {
                out.push(Violation::NotReflexive { agent: name(), w: worlds[w].clone() });
            }
        }
    }
    if matches!(fc, FrameClass::S4 | FrameClass::S5) {
        for w in 0..n {
            for v in r.succ(w) {
                if !r.row_subset(v, w) {
                    let u = r.succ(v).find(|&u| !r.contains(w, u)).unwrap();
                    out.push(Violation::NotTransitive {
                        agent: name(),
                        w: worlds[w].clone(),
                        v: worlds[v].clone(),
                        u: worlds[u].clone(),
                    });
                }
            }
        }
    }
    if fc == FrameClass::S5 {
        for (w, v) in r.pairs() {
            if !r.contains(v, w) {
                out.push(Violation::NotSymmetric {
                    agent: name(),
                    w: worlds[w].clone(),
                    v: worlds[v].clone(),
                });
            }
        }
    }
}

impl Model {
    /// Builds a model from explicit parts without validating them.
    pub fn new(
        worlds: Vec<String>,
        order: Relation,
        relations: BTreeMap<Agent, Relation>,
        valuation: Vec<BTreeSet<Arc<str>>>,
    ) -> Self {
        Model { worlds, order, relations, valuation }
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn world(&self, name: &str) -> Result<usize, ModelError> {
        self.worlds
            .iter()
            .position(|w| w == name)
            .ok_or_else(|| ModelError::UnknownWorld(name.to_string()))
    }

    pub fn relation(&self, a: &Agent) -> Option<&Relation> {
        self.relations.get(a)
    }

    fn union_relation(&self) -> Relation {
        let mut u = Relation::empty(self.len());
        for r in self.relations.values() {
            u = u.union(r);
        }
        u
    }

    /// Lists every violated structural condition of the frame class, with witnesses.
    pub fn check_frame(&self, fc: FrameClass) -> Vec<Violation> {
        let n = self.len();
        let w = &self.worlds;
        let mut out = Vec::new();
        let le = &self.order;
        for x in 0..n {
            if !le.contains(x, x) {
                out.push(Violation::OrderNotReflexive { w: w[x].clone() });
            }
        }
        for x in 0..n {
            for y in le.succ(x) {
                if !le.row_subset(y, x) {
                    let z = le.succ(y).find(|&z| !le.contains(x, z)).unwrap();
                    out.push(Violation::OrderNotTransitive {
                        w: w[x].clone(),
                        v: w[y].clone(),
                        u: w[z].clone(),
                    });
                }
                if x < y && le.contains(y, x) {
                    out.push(Violation::OrderNotAntisymmetric { w: w[x].clone(), v: w[y].clone() });
                }
                for p in &self.valuation[x] {
                    if !self.valuation[y].contains(p) {
                        out.push(Violation::ValuationNotMonotone {
                            w: w[x].clone(),
                            v: w[y].clone(),
                            atom: p.to_string(),
                        });
                    }
                }
            }
        }
        for (agent, r) in &self.relations {
            for x in 0..n {
                for y in le.succ(x) {
                    if !r.row_subset(y, x) {
                        for z in r.succ(y).filter(|&z| !r.contains(x, z)) {
                            out.push(Violation::TriangleConfluence {
                                agent: agent.name().to_string(),
                                w: w[x].clone(),
                                v: w[y].clone(),
                                u: w[z].clone(),
                            });
                        }
                    }
                }
            }
            check_agent_conditions(w, agent, r, fc, &mut out);
        }
        out
    }

    /// Truth value of `f` at every world.
    pub fn truth_set(&self, f: &Formula) -> Vec<bool> {
        let mut ev = Evaluator { m: self, memo: FxHashMap::default(), union: None };
        ev.eval(f).as_ref().clone()
    }

    pub fn eval(&self, w: usize, f: &Formula) -> Result<bool, ModelError> {
        if w >= self.len() {
            return Err(ModelError::UnknownWorld(w.to_string()));
        }
        Ok(self.truth_set(f)[w])
    }

    pub fn eval_at(&self, world: &str, f: &Formula) -> Result<bool, ModelError> {
        let w = self.world(world)?;
        self.eval(w, f)
    }

    /// Closes the relations so that the model belongs to the frame class.
    ///
    /// Reflexive closure (when required) comes first, then triangle closure
    /// `R_a := <= ; R_a`, then transitive closure (when required).
    pub fn close(&self, fc: FrameClass) -> Result<Model, ModelError> {
        if fc == FrameClass::S5 {
            return Err(ModelError::S5Closure);
        }
        let mut out = self.clone();
        for r in out.relations.values_mut() {
            let mut x = r.clone();
            if fc != FrameClass::Epistemic {
                x = x.reflexive_closure();
            }
            x = self.order.compose(&x);
            if fc == FrameClass::S4 {
                x = x.transitive_closure();
            }
            *r = x;
        }
        Ok(out)
    }

    /// Closes the relations into equivalence relations compatible with the order.
    /// Used for sampling S5 models.
    pub fn close_s5(&self) -> Model {
        let mut out = self.clone();
        let comparable = self.order.union(&self.order.inverse());
        for r in out.relations.values_mut() {
            let x = r.union(&comparable).reflexive_closure();
            let x = x.union(&x.inverse()).transitive_closure();
            *r = x;
        }
        out
    }

    /// The classical model on the maximal worlds of an S5 model.
    pub fn reduced(&self) -> Result<ClassicalModel, ModelError> {
        if let Some(v) = self.check_frame(FrameClass::S5).first() {
            return Err(ModelError::NotS5(v.to_string()));
        }
        let keep: Vec<usize> = (0..self.len())
            .filter(|&w| self.order.succ(w).all(|v| v == w))
            .collect();
        Ok(ClassicalModel {
            worlds: keep.iter().map(|&w| self.worlds[w].clone()).collect(),
            relations: self
                .relations
                .iter()
                .map(|(a, r)| (a.clone(), r.restrict(&keep)))
                .collect(),
            valuation: keep.iter().map(|&w| self.valuation[w].clone()).collect(),
        })
    }
}

struct Evaluator<'a> {
    m: &'a Model,
    memo: FxHashMap<Formula, Arc<Vec<bool>>>,
    union: Option<Relation>,
}

impl Evaluator<'_> {
    fn eval(&mut self, f: &Formula) -> Arc<Vec<bool>> {
        if let Some(v) = self.memo.get(f) {
            return v.clone();
        }
        let m = self.m;
        let n = m.len();
        let res: Vec<bool> = match f {
            Formula::Bottom => vec![false; n],
            Formula::Atom(p) => (0..n).map(|w| m.valuation[w].contains(p)).collect(),
            Formula::And(l, r) => {
                let (a, b) = (self.eval(l), self.eval(r));
                (0..n).map(|w| a[w] && b[w]).collect()
            }
            Formula::Or(l, r) => {
                let (a, b) = (self.eval(l), self.eval(r));
                (0..n).map(|w| a[w] || b[w]).collect()
            }
            Formula::Implies(l, r) => {
                let (a, b) = (self.eval(l), self.eval(r));
                (0..n)
                    .map(|w| m.order.succ(w).all(|v| !a[v] || b[v]))
                    .collect()
            }
            Formula::K(ag, body) => {
                let b = self.eval(body);
                match m.relations.get(ag) {
                    Some(r) => (0..n).map(|w| r.succ(w).all(|v| b[v])).collect(),
                    None => vec![true; n],
                }
            }
            Formula::C(body) => {
                let b = self.eval(body);
                if self.union.is_none() {
                    self.union = Some(m.union_relation().inverse());
                }
                reach_avoiding(self.union.as_ref().unwrap(), &b)
            }
        };
        let res = Arc::new(res);
        self.memo.insert(f.clone(), res.clone());
        res
    }
}

/// Worlds from which every world reachable in zero or more steps satisfies `good`,
/// given the inverse of the step relation.
fn reach_avoiding(inverse: &Relation, good: &[bool]) -> Vec<bool> {
    let n = good.len();
    let mut ok = good.to_vec();
    let mut stack: Vec<usize> = (0..n).filter(|&w| !good[w]).collect();
    while let Some(v) = stack.pop() {
        for u in inverse.succ(v) {
            if ok[u] {
                ok[u] = false;
                stack.push(u);
            }
        }
    }
    ok
}

impl ClassicalModel {
    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn world(&self, name: &str) -> Result<usize, ModelError> {
        self.worlds
            .iter()
            .position(|w| w == name)
            .ok_or_else(|| ModelError::UnknownWorld(name.to_string()))
    }

    /// Violations of the equivalence-relation conditions.
    pub fn check_s5(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (agent, r) in &self.relations {
            check_agent_conditions(&self.worlds, agent, r, FrameClass::S5, &mut out);
        }
        out
    }

    pub fn truth_set(&self, f: &Formula) -> Vec<bool> {
        let mut memo = FxHashMap::default();
        let union = self
            .relations
            .values()
            .fold(Relation::empty(self.len()), |acc, r| acc.union(r))
            .inverse();
        self.eval_rec(f, &mut memo, &union).as_ref().clone()
    }

    fn eval_rec(
        &self,
        f: &Formula,
        memo: &mut FxHashMap<Formula, Arc<Vec<bool>>>,
        union_inv: &Relation,
    ) -> Arc<Vec<bool>> {
        if let Some(v) = memo.get(f) {
            return v.clone();
        }
        let n = self.len();
        let res: Vec<bool> = match f {
            Formula::Bottom => vec![false; n],
            Formula::Atom(p) => (0..n).map(|w| self.valuation[w].contains(p)).collect(),
            Formula::And(l, r) => {
                let (a, b) = (self.eval_rec(l, memo, union_inv), self.eval_rec(r, memo, union_inv));
                (0..n).map(|w| a[w] && b[w]).collect()
            }
            Formula::Or(l, r) => {
                let (a, b) = (self.eval_rec(l, memo, union_inv), self.eval_rec(r, memo, union_inv));
                (0..n).map(|w| a[w] || b[w]).collect()
            }
            Formula::Implies(l, r) => {
                let (a, b) = (self.eval_rec(l, memo, union_inv), self.eval_rec(r, memo, union_inv));
                (0..n).map(|w| !a[w] || b[w]).collect()
            }
            Formula::K(ag, body) => {
                let b = self.eval_rec(body, memo, union_inv);
                match self.relations.get(ag) {
                    Some(r) => (0..n).map(|w| r.succ(w).all(|v| b[v])).collect(),
                    None => vec![true; n],
                }
            }
            Formula::C(body) => {
                let b = self.eval_rec(body, memo, union_inv);
                reach_avoiding(union_inv, &b)
            }
        };
        let res = Arc::new(res);
        memo.insert(f.clone(), res.clone());
        res
    }

    pub fn eval_classical(&self, w: usize, f: &Formula) -> Result<bool, ModelError> {
        if w >= self.len() {
            return Err(ModelError::UnknownWorld(w.to_string()));
        }
        Ok(self.truth_set(f)[w])
    }

    /// The birelational model with the identity order.
    pub fn induced(&self) -> Result<Model, ModelError> {
        for (a, r) in &self.relations {
            let mut v = Vec::new();
            check_agent_conditions(&self.worlds, a, r, FrameClass::S5, &mut v);
            if !v.is_empty() {
                return Err(ModelError::NotEquivalence(a.name().to_string()));
            }
        }
        Ok(Model {
            worlds: self.worlds.clone(),
            order: Relation::identity(self.len()),
            relations: self.relations.clone(),
            valuation: self.valuation.clone(),
        })
    }
}

/// Free-function forms of the model operations.
pub fn check_frame(m: &Model, fc: FrameClass) -> Vec<Violation> {
    m.check_frame(fc)
}

pub fn eval(m: &Model, w: usize, f: &Formula) -> Result<bool, ModelError> {
    m.eval(w, f)
}

pub fn eval_classical(m: &ClassicalModel, w: usize, f: &Formula) -> Result<bool, ModelError> {
    m.eval_classical(w, f)
}

pub fn close_model(m: &Model, fc: FrameClass) -> Result<Model, ModelError> {
    m.close(fc)
}

pub fn reduced_model(m: &Model) -> Result<ClassicalModel, ModelError> {
    m.reduced()
}

pub fn induced_model(m: &ClassicalModel) -> Result<Model, ModelError> {
    m.induced()
}

/// JSON form shared by birelational models, classical models and countermodels.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ModelJson {
    pub worlds: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<(String, String)>>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<(String, String)>>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<String>,
}

fn index_worlds(worlds: &[String]) -> Result<FxHashMap<&str, usize>, ModelError> {
    if worlds.is_empty() {
        return Err(ModelError::NoWorlds);
    }
    let mut idx = FxHashMap::default();
    for (i, w) in worlds.iter().enumerate() {
        if idx.insert(w.as_str(), i).is_some() {
            return Err(ModelError::DuplicateWorld(w.clone()));
        }
    }
    Ok(idx)
}

fn load_pairs(
    idx: &FxHashMap<&str, usize>,
    n: usize,
    pairs: &[(String, String)],
) -> Result<Relation, ModelError> {
    let mut r = Relation::empty(n);
    for (a, b) in pairs {
        let x = *idx.get(a.as_str()).ok_or_else(|| ModelError::UnknownWorld(a.clone()))?;
        let y = *idx.get(b.as_str()).ok_or_else(|| ModelError::UnknownWorld(b.clone()))?;
        r.insert(x, y);
    }
    Ok(r)
}

fn load_common(
    j: &ModelJson,
    agents: Option<&crate::formula::AgentSet>,
) -> Result<(BTreeMap<Agent, Relation>, Vec<BTreeSet<Arc<str>>>), ModelError> {
    let idx = index_worlds(&j.worlds)?;
    let n = j.worlds.len();
    let mut relations = BTreeMap::new();
    if let Some(ags) = agents {
        for a in ags.iter() {
            relations.insert(a.clone(), Relation::empty(n));
        }
    }
    for (name, pairs) in &j.relations {
        let a = Agent::new(name);
        if let Some(ags) = agents {
            if !ags.contains(&a) {
                return Err(ModelError::UnknownAgent(name.clone()));
            }
        }
        relations.insert(a, load_pairs(&idx, n, pairs)?);
    }
    let mut valuation = vec![BTreeSet::new(); n];
    for (w, atoms) in &j.valuation {
        let x = *idx.get(w.as_str()).ok_or_else(|| ModelError::UnknownWorld(w.clone()))?;
        valuation[x] = atoms.iter().map(|p| Arc::from(p.as_str())).collect();
    }
    Ok((relations, valuation))
}

fn dump_common(
    worlds: &[String],
    relations: &BTreeMap<Agent, Relation>,
    valuation: &[BTreeSet<Arc<str>>],
) -> (BTreeMap<String, Vec<(String, String)>>, BTreeMap<String, Vec<String>>) {
    let rels = relations
        .iter()
        .map(|(a, r)| {
            let pairs = r.pairs().map(|(x, y)| (worlds[x].clone(), worlds[y].clone())).collect();
            (a.name().to_string(), pairs)
        })
        .collect();
    let val = worlds
        .iter()
        .zip(valuation)
        .map(|(w, ps)| (w.clone(), ps.iter().map(|p| p.to_string()).collect()))
        .collect();
    (rels, val)
}

impl ModelJson {
    /// Loads a birelational model. The order is closed reflexively and transitively;
    /// antisymmetry violations are rejected.
    pub fn to_model(&self, agents: Option<&crate::formula::AgentSet>) -> Result<Model, ModelError> {
        let idx = index_worlds(&self.worlds)?;
        let n = self.worlds.len();
        let gens = load_pairs(&idx, n, self.order.as_deref().unwrap_or(&[]))?;
        let order = gens.reflexive_closure().transitive_closure();
        for (x, y) in order.pairs() {
            if x < y && order.contains(y, x) {
                return Err(ModelError::NotAntisymmetric(
                    self.worlds[x].clone(),
                    self.worlds[y].clone(),
                ));
            }
        }
        let (relations, valuation) = load_common(self, agents)?;
        Ok(Model { worlds: self.worlds.clone(), order, relations, valuation })
    }

    pub fn to_classical(
        &self,
        agents: Option<&crate::formula::AgentSet>,
    ) -> Result<ClassicalModel, ModelError> {
        if self.order.is_some() {
            return Err(ModelError::Malformed("classical models have no order".into()));
        }
        let (relations, valuation) = load_common(self, agents)?;
        Ok(ClassicalModel { worlds: self.worlds.clone(), relations, valuation })
    }

    pub fn from_model(m: &Model, root: Option<usize>) -> Self {
        let (relations, valuation) = dump_common(&m.worlds, &m.relations, &m.valuation);
        let order = m
            .order
            .pairs()
            .filter(|(x, y)| x != y)
            .map(|(x, y)| (m.worlds[x].clone(), m.worlds[y].clone()))
            .collect();
        ModelJson {
            worlds: m.worlds.clone(),
            order: Some(order),
            relations,
            valuation,
            root: root.map(|r| m.worlds[r].clone()),
        }
    }

    pub fn from_classical(m: &ClassicalModel) -> Self {
        let (relations, valuation) = dump_common(&m.worlds, &m.relations, &m.valuation);
        ModelJson { worlds: m.worlds.clone(), order: None, relations, valuation, root: None }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::AgentSet;
    use crate::parse::parse;

    fn one() -> AgentSet {
        AgentSet::parse("a").unwrap()
    }

    fn model(worlds: &[&str], order: &[(&str, &str)], ra: &[(&str, &str)], val: &[(&str, &[&str])]) -> Model {
        let j = ModelJson {
            worlds: worlds.iter().map(|s| s.to_string()).collect(),
            order: Some(order.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()),
            relations: BTreeMap::from([(
                "a".to_string(),
                ra.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            )]),
            valuation: val
                .iter()
                .map(|(w, ps)| (w.to_string(), ps.iter().map(|p| p.to_string()).collect()))
                .collect(),
            root: None,
        };
        j.to_model(Some(&one())).unwrap()
    }

    #[test]
    fn check_frame_examples() {
        let m = model(&["w"], &[], &[], &[]);
        assert!(m.check_frame(FrameClass::Epistemic).is_empty());
        let m = model(&["w", "v"], &[("w", "v")], &[("v", "v")], &[]);
        let vs = m.check_frame(FrameClass::Epistemic);
        assert_eq!(
            vs,
            vec![Violation::TriangleConfluence {
                agent: "a".into(),
                w: "w".into(),
                v: "v".into(),
                u: "v".into()
            }]
        );
        let m = model(
            &["w", "v"],
            &[("w", "v")],
            &[("w", "w"), ("w", "v"), ("v", "w"), ("v", "v")],
            &[],
        );
        assert!(m.check_frame(FrameClass::S5).is_empty());
    }

    #[test]
    fn eval_examples() {
        let g = one();
        let m = model(&["w"], &[], &[], &[]);
        assert!(!m.eval(0, &parse("C p", &g).unwrap()).unwrap());
        assert!(m.eval(0, &parse("K{a} false", &g).unwrap()).unwrap());
        let m = model(&["w", "v"], &[("w", "v")], &[], &[("v", &["p"])]);
        assert!(!m.eval_at("w", &parse("p | ~p", &g).unwrap()).unwrap());
        assert!(m.eval_at("q", &parse("p", &g).unwrap()).is_err());
    }

    #[test]
    fn classical_examples() {
        let g = one();
        let single = ClassicalModel {
            worlds: vec!["w".into()],
            relations: BTreeMap::from([(Agent::new("a"), Relation::identity(1))]),
            valuation: vec![BTreeSet::from([Arc::from("p")])],
        };
        assert!(single.eval_classical(0, &parse("p | ~p", &g).unwrap()).unwrap());
        assert!(single.eval_classical(0, &parse("K{a} p", &g).unwrap()).unwrap());
        let full = Relation::from_pairs(2, [(0, 0), (0, 1), (1, 0), (1, 1)]);
        let two = ClassicalModel {
            worlds: vec!["w".into(), "v".into()],
            relations: BTreeMap::from([(Agent::new("a"), full)]),
            valuation: vec![BTreeSet::from([Arc::from("p")]), BTreeSet::new()],
        };
        assert!(!two.eval_classical(0, &parse("K{a} p", &g).unwrap()).unwrap());
    }

    #[test]
    fn close_examples() {
        let m = model(&["w", "v", "u"], &[("w", "v")], &[("v", "u")], &[]);
        let c = m.close(FrameClass::Epistemic).unwrap();
        assert!(c.relations[&Agent::new("a")].contains(0, 2));
        assert_eq!(c.close(FrameClass::Epistemic).unwrap(), c);
        let e = model(&["w", "v"], &[], &[], &[]);
        let r = e.close(FrameClass::Reflexive).unwrap();
        assert_eq!(r.relations[&Agent::new("a")], Relation::identity(2));
        assert_eq!(m.close(FrameClass::S5), Err(ModelError::S5Closure));
        for fc in [FrameClass::Epistemic, FrameClass::Reflexive, FrameClass::S4] {
            assert!(m.close(fc).unwrap().check_frame(fc).is_empty());
        }
    }

    #[test]
    fn reduced_and_induced() {
        let full = [("w", "w"), ("w", "v"), ("v", "w"), ("v", "v")];
        let m = model(&["w", "v"], &[("w", "v")], &full, &[]);
        let r = m.reduced().unwrap();
        assert_eq!(r.worlds, vec!["v".to_string()]);
        let d = model(&["w", "v"], &[], &full, &[("w", &["p"])]);
        let rd = d.reduced().unwrap();
        assert_eq!(rd.worlds, d.worlds);
        let i = rd.induced().unwrap();
        assert_eq!(i.order, Relation::identity(2));
        let g = one();
        let kp = parse("K{a} p", &g).unwrap();
        for w in 0..2 {
            assert_eq!(i.eval(w, &kp).unwrap(), rd.eval_classical(w, &kp).unwrap());
        }
    }

    #[test]
    fn loader_rejects_cycles() {
        let j = ModelJson {
            worlds: vec!["w".into(), "v".into()],
            order: Some(vec![("w".into(), "v".into()), ("v".into(), "w".into())]),
            relations: BTreeMap::new(),
            valuation: BTreeMap::new(),
            root: None,
        };
        assert!(matches!(j.to_model(None), Err(ModelError::NotAntisymmetric(..))));
    }
}
