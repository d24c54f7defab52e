//! Checker for Hilbert-style derivations, with builders for a few standard
//! derived facts about knowledge.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arena::Limits;
use crate::decide::{solve_goal, Stats};
use crate::formula::{Agent, AgentSet, Formula};
use crate::game::Player;
use crate::parse::parse;
use crate::rules::Calculus;
use crate::sequent::Sequent;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    Int,
    K,
    Kc,
    T,
    S4,
    S5,
    Fix,
}

impl Scheme {
    pub const ALL: [Scheme; 7] = [Scheme::Int, Scheme::K, Scheme::Kc, Scheme::T, Scheme::S4, Scheme::S5, Scheme::Fix];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Int => "Int",
            Scheme::K => "K",
            Scheme::Kc => "Kc",
            Scheme::T => "T",
            Scheme::S4 => "S4",
            Scheme::S5 => "S5",
            Scheme::Fix => "Fix",
        }
    }

    pub fn in_system(self, sys: Calculus) -> bool {
        match self {
            Scheme::Int | Scheme::K | Scheme::Fix => true,
            Scheme::T => sys.has_t(),
            Scheme::S4 => matches!(sys, Calculus::Icks4 | Calculus::Icks5),
            Scheme::Kc | Scheme::S5 => sys == Calculus::Icks5,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| format!("unknown axiom scheme {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HRule {
    Mp,
    Nec,
    Mon,
    Ind,
}

impl HRule {
    pub const ALL: [HRule; 4] = [HRule::Mp, HRule::Nec, HRule::Mon, HRule::Ind];

    pub fn name(self) -> &'static str {
        match self {
            HRule::Mp => "MP",
            HRule::Nec => "Nec",
            HRule::Mon => "Mon",
            HRule::Ind => "Ind",
        }
    }

    fn arity(self) -> usize {
        if self == HRule::Mp {
            2
        } else {
            1
        }
    }
}

impl fmt::Display for HRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        HRule::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| format!("unknown rule {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Justification {
    Axiom(Scheme),
    Assumption,
    Rule(HRule),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HNode {
    pub formula: Formula,
    pub just: Justification,
    /// For MP the minor premise `f` comes first, then `f -> g`.
    pub premises: Vec<usize>,
}

/// A derivation tree; the root is the unique node that is nobody's premise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub nodes: Vec<HNode>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("node {node}: {reason}")]
pub struct HilbertDefect {
    pub node: usize,
    pub reason: String,
}

fn defect(node: usize, reason: impl Into<String>) -> HilbertDefect {
    HilbertDefect { node, reason: reason.into() }
}

impl Derivation {
    /// The root when the nodes form a single tree.
    pub fn root(&self) -> Result<usize, HilbertDefect> {
        if self.nodes.is_empty() {
            return Err(defect(0, "empty derivation"));
        }
        let mut parents = vec![0usize; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            for &p in &n.premises {
                if p >= self.nodes.len() {
                    return Err(defect(i, format!("premise {p} does not exist")));
                }
                parents[p] += 1;
            }
        }
        if let Some(i) = parents.iter().position(|&c| c > 1) {
            return Err(defect(i, "node is a premise more than once"));
        }
        let roots: Vec<usize> = (0..self.nodes.len()).filter(|&i| parents[i] == 0).collect();
        match roots.as_slice() {
            [r] => Ok(*r),
            [] => Err(defect(0, "no root")),
            _ => Err(defect(roots[1], "more than one root")),
        }
    }

    pub fn conclusion(&self) -> Result<&Formula, HilbertDefect> {
        Ok(&self.nodes[self.root()?].formula)
    }
}

/// Replaces maximal modal subformulas by fresh atoms, identical subformulas sharing one.
fn abstract_modal(f: &Formula, map: &mut BTreeMap<Formula, Formula>) -> Formula {
    match f {
        Formula::Bottom | Formula::Atom(_) => f.clone(),
        Formula::And(l, r) => Formula::and(abstract_modal(l, map), abstract_modal(r, map)),
        Formula::Or(l, r) => Formula::or(abstract_modal(l, map), abstract_modal(r, map)),
        Formula::Implies(l, r) => Formula::implies(abstract_modal(l, map), abstract_modal(r, map)),
        Formula::K(..) | Formula::C(_) => {
            let n = map.len();
            // not a parseable atom name, so it cannot clash
            map.entry(f.clone()).or_insert_with(|| Formula::atom(&format!("#{n}"))).clone()
        }
    }
}

/// Whether `f` is a substitution instance of an intuitionistic propositional tautology.
pub fn is_int_tautology(f: &Formula, agents: &AgentSet) -> bool {
    let g = abstract_modal(f, &mut BTreeMap::new());
    let mut stats = Stats::default();
    matches!(
        solve_goal(Calculus::Ick, &Sequent::goal(g), agents, Limits::default(), &mut stats),
        Ok((_, Player::Prover, _))
    )
}

fn matches_scheme(s: Scheme, f: &Formula, agents: &AgentSet) -> bool {
    use Formula::*;
    match s {
        Scheme::Int => is_int_tautology(f, agents),
        Scheme::K => match f {
            Implies(l, r) => match (&**l, &**r) {
                (K(a, ab), Implies(x, y)) => match (&**ab, &**x, &**y) {
                    (Implies(p, q), K(b, p2), K(c, q2)) => a == b && a == c && p == p2 && q == q2,
                    _ => false,
                },
                _ => false,
            },
            _ => false,
        },
        Scheme::Kc => match f {
            Implies(l, r) => match (&**l, &**r) {
                (Implies(k, y), Or(nk, y2)) => {
                    matches!(&**k, K(..)) && nk.negated() == Some(&**k) && y == y2
                }
                _ => false,
            },
            _ => false,
        },
        Scheme::T => match f {
            Implies(l, r) => matches!(&**l, K(_, b) if b == r),
            _ => false,
        },
        Scheme::S4 => match f {
            Implies(l, r) => match (&**l, &**r) {
                (K(a, _), K(b, inner)) => a == b && **inner == **l,
                _ => false,
            },
            _ => false,
        },
        Scheme::S5 => match f {
            Implies(l, r) => match (l.negated(), &**r) {
                (Some(k @ K(a, _)), K(b, body)) => a == b && body.negated() == Some(k),
                _ => false,
            },
            _ => false,
        },
        Scheme::Fix => match f {
            And(l, r) => match (&**l, &**r) {
                (Implies(c1, u), Implies(u2, c2)) => {
                    u == u2
                        && c1 == c2
                        && match &**c1 {
                            C(body) => **u == Formula::and((**body).clone(), Formula::e(agents, (**c1).clone())),
                            _ => false,
                        }
                }
                _ => false,
            },
            _ => false,
        },
    }
}

/// A scheme of the system that `f` instantiates. Structural schemes are tried
/// before `Int`.
pub fn match_axiom(sys: Calculus, f: &Formula, agents: &AgentSet) -> Option<Scheme> {
    const ORDER: [Scheme; 7] = [Scheme::K, Scheme::Kc, Scheme::T, Scheme::S4, Scheme::S5, Scheme::Fix, Scheme::Int];
    ORDER.into_iter().find(|&s| s.in_system(sys) && matches_scheme(s, f, agents))
}

fn check_rule(rule: HRule, f: &Formula, prem: &[&Formula], agents: &AgentSet) -> Result<(), String> {
    use Formula::*;
    if prem.len() != rule.arity() {
        return Err(format!("{rule} needs {} premises, found {}", rule.arity(), prem.len()));
    }
    let ok = match rule {
        HRule::Mp => *prem[1] == Formula::implies(prem[0].clone(), f.clone()),
        HRule::Nec => matches!(f, K(_, b) if **b == *prem[0]),
        HRule::Mon => match (f, prem[0]) {
            (Implies(l, r), Implies(p, q)) => **l == Formula::c((**p).clone()) && **r == Formula::c((**q).clone()),
            _ => false,
        },
        HRule::Ind => match (f, prem[0]) {
            (Implies(l, r), Implies(p, q)) => {
                l == p && **r == Formula::c((**l).clone()) && **q == Formula::e(agents, (**l).clone())
            }
            _ => false,
        },
    };
    if ok {
        Ok(())
    } else {
        Err(format!("{rule} does not yield {f} from the premises"))
    }
}

/// Checks that `d` derives its root formula in `sys` from `assumptions`.
pub fn check_derivation(
    sys: Calculus,
    d: &Derivation,
    assumptions: &BTreeSet<Formula>,
    agents: &AgentSet,
) -> Result<(), HilbertDefect> {
    let root = d.root()?;
    // reachability from the root also rules out cycles
    let mut seen = vec![false; d.nodes.len()];
    let mut order = Vec::new();
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        if std::mem::replace(&mut seen[v], true) {
            return Err(defect(v, "cycle"));
        }
        order.push(v);
        stack.extend(d.nodes[v].premises.iter().copied());
    }
    if let Some(v) = seen.iter().position(|s| !s) {
        return Err(defect(v, "unreachable node"));
    }
    // assumption leaves below each node
    let mut tainted = vec![false; d.nodes.len()];
    for &v in order.iter().rev() {
        let n = &d.nodes[v];
        for a in n.formula.agents() {
            if !agents.contains(&a) {
                return Err(defect(v, format!("undeclared agent {a}")));
            }
        }
        match n.just {
            Justification::Axiom(s) => {
                if !n.premises.is_empty() {
                    return Err(defect(v, "an axiom has no premises"));
                }
                if !s.in_system(sys) {
                    return Err(defect(v, format!("{s} is not an axiom of {}", sys.name())));
                }
                if !matches_scheme(s, &n.formula, agents) {
                    return Err(defect(v, format!("{} is not an instance of {s}", n.formula)));
                }
            }
            Justification::Assumption => {
                if !n.premises.is_empty() {
                    return Err(defect(v, "an assumption has no premises"));
                }
                if !assumptions.contains(&n.formula) {
                    return Err(defect(v, format!("{} is not an assumption", n.formula)));
                }
                tainted[v] = true;
            }
            Justification::Rule(r) => {
                let prem: Vec<&Formula> = n.premises.iter().map(|&p| &d.nodes[p].formula).collect();
                check_rule(r, &n.formula, &prem, agents).map_err(|e| defect(v, e))?;
                tainted[v] = n.premises.iter().any(|&p| tainted[p]);
                if r != HRule::Mp && tainted[v] {
                    return Err(defect(v, format!("{r} applied above an assumption")));
                }
            }
        }
    }
    Ok(())
}

pub fn is_valid_derivation(sys: Calculus, d: &Derivation, assumptions: &BTreeSet<Formula>, agents: &AgentSet) -> bool {
    check_derivation(sys, d, assumptions, agents).is_ok()
}

/// Incremental construction; every node must end up used exactly once.
#[derive(Clone, Debug, Default)]
pub struct Builder {
    nodes: Vec<HNode>,
}

impl Builder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn formula(&self, id: usize) -> &Formula {
        &self.nodes[id].formula
    }

    fn push(&mut self, formula: Formula, just: Justification, premises: Vec<usize>) -> usize {
        self.nodes.push(HNode { formula, just, premises });
        self.nodes.len() - 1
    }

    pub fn axiom(&mut self, s: Scheme, f: Formula) -> usize {
        self.push(f, Justification::Axiom(s), vec![])
    }

    pub fn assume(&mut self, f: Formula) -> usize {
        self.push(f, Justification::Assumption, vec![])
    }

    /// MP from `minor: f` and `major: f -> g`.
    pub fn mp(&mut self, minor: usize, major: usize) -> usize {
        let g = match self.formula(major) {
            Formula::Implies(_, r) => (**r).clone(),
            other => panic!("MP major premise {other} is not an implication"),
        };
        self.push(g, Justification::Rule(HRule::Mp), vec![minor, major])
    }

    pub fn nec(&mut self, a: &Agent, id: usize) -> usize {
        let f = Formula::k(a, self.formula(id).clone());
        self.push(f, Justification::Rule(HRule::Nec), vec![id])
    }

    pub fn mon(&mut self, id: usize) -> usize {
        let f = match self.formula(id) {
            Formula::Implies(l, r) => Formula::implies(Formula::c((**l).clone()), Formula::c((**r).clone())),
            other => panic!("Mon premise {other} is not an implication"),
        };
        self.push(f, Justification::Rule(HRule::Mon), vec![id])
    }

    pub fn ind(&mut self, id: usize) -> usize {
        let f = match self.formula(id) {
            Formula::Implies(l, _) => Formula::implies((**l).clone(), Formula::c((**l).clone())),
            other => panic!("Ind premise {other} is not an implication"),
        };
        self.push(f, Justification::Rule(HRule::Ind), vec![id])
    }

    /// MP against an `Int` instance `f -> g` where `f` is node `id`.
    pub fn by_int(&mut self, id: usize, g: Formula) -> usize {
        let t = self.axiom(Scheme::Int, Formula::implies(self.formula(id).clone(), g));
        self.mp(id, t)
    }

    /// From `f -> g` and `g -> h`, derive `f -> h`.
    pub fn chain(&mut self, fg: usize, gh: usize) -> usize {
        let (f, g, h) = match (self.formula(fg), self.formula(gh)) {
            (Formula::Implies(f, g), Formula::Implies(_, h)) => ((**f).clone(), (**g).clone(), (**h).clone()),
            _ => panic!("chain needs two implications"),
        };
        let t = Formula::implies(
            Formula::implies(f.clone(), g.clone()),
            Formula::implies(Formula::implies(g, h.clone()), Formula::implies(f, h)),
        );
        let t = self.axiom(Scheme::Int, t);
        let m = self.mp(fg, t);
        self.mp(gh, m)
    }

    /// From `f -> g` and `f -> h`, derive `f -> g & h`.
    pub fn pair(&mut self, fg: usize, fh: usize) -> usize {
        let (f, g, h) = match (self.formula(fg), self.formula(fh)) {
            (Formula::Implies(f, g), Formula::Implies(_, h)) => ((**f).clone(), (**g).clone(), (**h).clone()),
            _ => panic!("pair needs two implications"),
        };
        let t = Formula::implies(
            Formula::implies(f.clone(), g.clone()),
            Formula::implies(Formula::implies(f.clone(), h.clone()), Formula::implies(f, Formula::and(g, h))),
        );
        let t = self.axiom(Scheme::Int, t);
        let m = self.mp(fg, t);
        self.mp(fh, m)
    }

    /// From `f -> g`, derive `K_a f -> K_a g`.
    pub fn k_lift(&mut self, a: &Agent, fg: usize) -> usize {
        let (f, g) = match self.formula(fg) {
            Formula::Implies(f, g) => ((**f).clone(), (**g).clone()),
            other => panic!("k_lift premise {other} is not an implication"),
        };
        let n = self.nec(a, fg);
        let k = Formula::implies(
            Formula::k(a, Formula::implies(f.clone(), g.clone())),
            Formula::implies(Formula::k(a, f), Formula::k(a, g)),
        );
        let k = self.axiom(Scheme::K, k);
        self.mp(n, k)
    }

    /// Copies a derivation in and returns the id of its root.
    pub fn graft(&mut self, d: &Derivation) -> usize {
        let base = self.nodes.len();
        let root = d.root().expect("grafted derivation is a tree");
        for n in &d.nodes {
            let premises = n.premises.iter().map(|p| p + base).collect();
            self.nodes.push(HNode { formula: n.formula.clone(), just: n.just, premises });
        }
        base + root
    }

    pub fn finish(self) -> Derivation {
        Derivation { nodes: self.nodes }
    }
}

/// `K_a (f & g) -> K_a f & K_a g`.
pub fn k_and_elim(a: &Agent, f: &Formula, g: &Formula) -> Derivation {
    let mut b = Builder::new();
    let fg = Formula::and(f.clone(), g.clone());
    let t1 = b.axiom(Scheme::Int, Formula::implies(fg.clone(), f.clone()));
    let t2 = b.axiom(Scheme::Int, Formula::implies(fg, g.clone()));
    let l1 = b.k_lift(a, t1);
    let l2 = b.k_lift(a, t2);
    b.pair(l1, l2);
    b.finish()
}

/// `K_a f & K_a g -> K_a (f & g)`.
pub fn k_and_intro(a: &Agent, f: &Formula, g: &Formula) -> Derivation {
    let mut b = Builder::new();
    let fg = Formula::and(f.clone(), g.clone());
    let t = b.axiom(Scheme::Int, Formula::implies(f.clone(), Formula::implies(g.clone(), fg.clone())));
    let l1 = b.k_lift(a, t);
    // K_a (g -> f & g) -> (K_a g -> K_a (f & g))
    let k = Formula::implies(
        Formula::k(a, Formula::implies(g.clone(), fg.clone())),
        Formula::implies(Formula::k(a, g.clone()), Formula::k(a, fg.clone())),
    );
    let k = b.axiom(Scheme::K, k);
    let c = b.chain(l1, k);
    let (kf, kg, kfg) = (Formula::k(a, f.clone()), Formula::k(a, g.clone()), Formula::k(a, fg));
    b.by_int(c, Formula::implies(Formula::and(kf, kg), kfg));
    b.finish()
}

/// `K_a f | K_a g -> K_a (f | g)`.
pub fn k_or_intro(a: &Agent, f: &Formula, g: &Formula) -> Derivation {
    let mut b = Builder::new();
    let fg = Formula::or(f.clone(), g.clone());
    let t1 = b.axiom(Scheme::Int, Formula::implies(f.clone(), fg.clone()));
    let t2 = b.axiom(Scheme::Int, Formula::implies(g.clone(), fg.clone()));
    let l1 = b.k_lift(a, t1);
    let l2 = b.k_lift(a, t2);
    let (kf, kg, kfg) = (Formula::k(a, f.clone()), Formula::k(a, g.clone()), Formula::k(a, fg));
    let t = Formula::implies(
        Formula::implies(kf.clone(), kfg.clone()),
        Formula::implies(Formula::implies(kg.clone(), kfg.clone()), Formula::implies(Formula::or(kf, kg), kfg)),
    );
    let t = b.axiom(Scheme::Int, t);
    let m = b.mp(l1, t);
    b.mp(l2, m);
    b.finish()
}

/// From an assumption-free derivation of `f`, a derivation of `C f`.
pub fn c_necessitation(agents: &AgentSet, d: &Derivation) -> Derivation {
    let mut b = Builder::new();
    let f = d.conclusion().expect("derivation is a tree").clone();
    let mut acc: Option<usize> = None;
    for a in agents.iter() {
        let p = b.graft(d);
        let k = b.nec(a, p);
        let w = b.by_int(k, Formula::implies(f.clone(), Formula::k(a, f.clone())));
        acc = Some(match acc {
            None => w,
            Some(prev) => b.pair(prev, w),
        });
    }
    let step = b.ind(acc.expect("agent set is nonempty"));
    let p = b.graft(d);
    b.mp(p, step);
    b.finish()
}

/// `K_a f | ~K_a f` in ICKS5.
pub fn k_excluded_middle(a: &Agent, f: &Formula) -> Derivation {
    let mut b = Builder::new();
    let kf = Formula::k(a, f.clone());
    let nkf = Formula::not(kf.clone());
    let id = b.axiom(Scheme::Int, Formula::implies(kf.clone(), kf.clone()));
    let kc = b.axiom(
        Scheme::Kc,
        Formula::implies(Formula::implies(kf.clone(), kf.clone()), Formula::or(nkf.clone(), kf.clone())),
    );
    let m = b.mp(id, kc);
    b.by_int(m, Formula::or(kf, nkf));
    b.finish()
}

/// A named derivation with the system it lives in.
#[derive(Clone, Debug)]
pub struct Sample {
    pub name: String,
    pub system: Calculus,
    pub agents: AgentSet,
    pub assumptions: BTreeSet<Formula>,
    pub derivation: Derivation,
}

/// The standard derived facts, instantiated at atoms.
pub fn samples() -> Vec<Sample> {
    let agents = AgentSet::new(["a"]).expect("valid agents");
    let a = agents.get(0).clone();
    let (p, q) = (Formula::atom("p"), Formula::atom("q"));
    let refl = {
        let mut b = Builder::new();
        b.axiom(Scheme::Int, Formula::implies(p.clone(), p.clone()));
        b.finish()
    };
    let two = AgentSet::new(["a", "b"]).expect("valid agents");
    let mk = |name: &str, system, agents: &AgentSet, derivation| Sample {
        name: name.to_string(),
        system,
        agents: agents.clone(),
        assumptions: BTreeSet::new(),
        derivation,
    };
    vec![
        mk("k-and-elim", Calculus::Ick, &agents, k_and_elim(&a, &p, &q)),
        mk("k-and-intro", Calculus::Ick, &agents, k_and_intro(&a, &p, &q)),
        mk("k-or-intro", Calculus::Ick, &agents, k_or_intro(&a, &p, &q)),
        mk("c-necessitation", Calculus::Ick, &agents, c_necessitation(&agents, &refl)),
        mk("c-necessitation-two-agents", Calculus::Ick, &two, c_necessitation(&two, &refl)),
        mk("k-excluded-middle", Calculus::Icks5, &agents, k_excluded_middle(&a, &p)),
    ]
}

fn find(d: &Derivation, pred: impl Fn(&HNode) -> bool) -> usize {
    d.nodes.iter().position(pred).expect("mutation site exists")
}

/// Derivations with one broken step each, paired with a description. Every one
/// must be rejected.
pub fn mutations() -> Vec<(String, Sample)> {
    let s = samples();
    let by = |name: &str| s.iter().find(|x| x.name == name).expect("sample exists").clone();
    let rule = |r: HRule| move |n: &HNode| n.just == Justification::Rule(r);
    let mut out = Vec::new();
    let mut push = |what: &str, mut sample: Sample, edit: &dyn Fn(&mut Sample)| {
        edit(&mut sample);
        out.push((format!("{}: {what}", sample.name), sample));
    };

    push("Int leaf relabelled as K", by("k-and-elim"), &|x| {
        let d = &mut x.derivation;
        let i = find(d, |n| n.just == Justification::Axiom(Scheme::Int));
        d.nodes[i].just = Justification::Axiom(Scheme::K);
    });
    push("Int leaf replaced by excluded middle", by("k-and-intro"), &|x| {
        let d = &mut x.derivation;
        let i = find(d, |n| n.just == Justification::Axiom(Scheme::Int));
        let p = Formula::atom("p");
        d.nodes[i].formula = Formula::or(p.clone(), Formula::not(p));
    });
    push("MP premises swapped", by("k-or-intro"), &|x| {
        let d = &mut x.derivation;
        let i = find(d, rule(HRule::Mp));
        d.nodes[i].premises.swap(0, 1);
    });
    push("MP conclusion negated", by("k-excluded-middle"), &|x| {
        let d = &mut x.derivation;
        let i = find(d, rule(HRule::Mp));
        d.nodes[i].formula = Formula::not(d.nodes[i].formula.clone());
    });
    push("Nec conclusion changed", by("k-and-elim"), &|x| {
        let d = &mut x.derivation;
        let i = find(d, rule(HRule::Nec));
        if let Formula::K(a, body) = d.nodes[i].formula.clone() {
            d.nodes[i].formula = Formula::k(&a, Formula::and((*body).clone(), (*body).clone()));
        }
    });
    push("axiom below Nec turned into an assumption", by("k-or-intro"), &|x| {
        let d = &mut x.derivation;
        let i = find(d, rule(HRule::Nec));
        let leaf = d.nodes[i].premises[0];
        d.nodes[leaf].just = Justification::Assumption;
        x.assumptions.insert(d.nodes[leaf].formula.clone());
    });
    push("Ind conclusion uses E instead of C", by("c-necessitation"), &|x| {
        let d = &mut x.derivation;
        let i = find(d, rule(HRule::Ind));
        if let Formula::Implies(l, _) = d.nodes[i].formula.clone() {
            d.nodes[i].formula = Formula::implies((*l).clone(), Formula::k(&Agent::new("a"), (*l).clone()));
        }
    });
    push("Ind relabelled as Mon", by("c-necessitation-two-agents"), &|x| {
        let d = &mut x.derivation;
        let i = find(d, rule(HRule::Ind));
        d.nodes[i].just = Justification::Rule(HRule::Mon);
    });
    push("MP premise dropped", by("k-and-intro"), &|x| {
        let d = &mut x.derivation;
        let i = find(d, rule(HRule::Mp));
        d.nodes[i].premises.pop();
    });
    push("K instance with mismatched consequent", by("k-and-intro"), &|x| {
        let d = &mut x.derivation;
        let i = find(d, |n| n.just == Justification::Axiom(Scheme::K));
        if let Formula::Implies(l, r) = d.nodes[i].formula.clone() {
            if let Formula::Implies(x, _) = &*r {
                d.nodes[i].formula = Formula::implies((*l).clone(), Formula::implies((**x).clone(), (**x).clone()));
            }
        }
    });
    out
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct JustJson {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    #[serde(default)]
    pub premise_ids: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct HNodeJson {
    pub id: usize,
    pub formula: String,
    pub just: JustJson,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct DerivationJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub logic: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agents: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub assumptions: Vec<String>,
    pub nodes: Vec<HNodeJson>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DerivationFormatError {
    #[error("duplicate node id {0}")]
    DuplicateId(usize),
    #[error("unknown node id {0}")]
    UnknownId(usize),
    #[error("node {0}: {1}")]
    Node(usize, String),
}

impl DerivationJson {
    pub fn from_derivation(d: &Derivation) -> Self {
        let nodes = d
            .nodes
            .iter()
            .enumerate()
            .map(|(id, n)| {
                let (kind, scheme, rule) = match n.just {
                    Justification::Axiom(s) => ("axiom", Some(s.name().to_string()), None),
                    Justification::Assumption => ("assumption", None, None),
                    Justification::Rule(r) => ("rule", None, Some(r.name().to_string())),
                };
                HNodeJson {
                    id,
                    formula: n.formula.to_string(),
                    just: JustJson { kind: kind.to_string(), scheme, rule, premise_ids: n.premises.clone() },
                }
            })
            .collect();
        DerivationJson { logic: None, agents: None, assumptions: vec![], nodes }
    }

    pub fn to_derivation(&self, agents: &AgentSet) -> Result<Derivation, DerivationFormatError> {
        let mut index = BTreeMap::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if index.insert(n.id, i).is_some() {
                return Err(DerivationFormatError::DuplicateId(n.id));
            }
        }
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let bad = |e: String| DerivationFormatError::Node(n.id, e);
            let formula = parse(&n.formula, agents).map_err(|e| bad(e.to_string()))?;
            let just = match n.just.kind.as_str() {
                "axiom" => {
                    let s = n.just.scheme.as_deref().ok_or_else(|| bad("axiom without scheme".into()))?;
                    Justification::Axiom(s.parse().map_err(bad)?)
                }
                "assumption" => Justification::Assumption,
                "rule" => {
                    let r = n.just.rule.as_deref().ok_or_else(|| bad("rule step without rule".into()))?;
                    Justification::Rule(r.parse().map_err(bad)?)
                }
                k => return Err(bad(format!("unknown justification kind {k:?}"))),
            };
            let premises = n
                .just
                .premise_ids
                .iter()
                .map(|p| index.get(p).copied().ok_or(DerivationFormatError::UnknownId(*p)))
                .collect::<Result<_, _>>()?;
            nodes.push(HNode { formula, just, premises });
        }
        Ok(Derivation { nodes })
    }

    pub fn assumption_set(&self, agents: &AgentSet) -> Result<BTreeSet<Formula>, DerivationFormatError> {
        self.assumptions
            .iter()
            .map(|s| parse(s, agents).map_err(|e| DerivationFormatError::Node(usize::MAX, e.to_string())))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ag() -> AgentSet {
        AgentSet::new(["a"]).unwrap()
    }

    fn f(s: &str) -> Formula {
        parse(s, &ag()).unwrap()
    }

    #[test]
    fn schemes() {
        let a = ag();
        assert_eq!(match_axiom(Calculus::Ick, &f("K{a} (p -> q) -> K{a} p -> K{a} q"), &a), Some(Scheme::K));
        assert_eq!(match_axiom(Calculus::Ick, &f("(C p -> p & K{a} C p) & (p & K{a} C p -> C p)"), &a), Some(Scheme::Fix));
        assert_eq!(match_axiom(Calculus::Ick, &f("K{a} p -> K{a} p"), &a), Some(Scheme::Int));
        assert_eq!(match_axiom(Calculus::Ick, &f("K{a} p -> p"), &a), None);
        assert_eq!(match_axiom(Calculus::Ickt, &f("K{a} p -> p"), &a), Some(Scheme::T));
        assert_eq!(match_axiom(Calculus::Icks4, &f("K{a} p -> K{a} K{a} p"), &a), Some(Scheme::S4));
        assert_eq!(match_axiom(Calculus::Icks4, &f("~K{a} p -> K{a} ~K{a} p"), &a), None);
        assert_eq!(match_axiom(Calculus::Icks5, &f("~K{a} p -> K{a} ~K{a} p"), &a), Some(Scheme::S5));
        assert_eq!(match_axiom(Calculus::Icks5, &f("(K{a} p -> q) -> ~K{a} p | q"), &a), Some(Scheme::Kc));
        assert_eq!(match_axiom(Calculus::Icks5, &f("p | ~p"), &a), None);
    }

    #[test]
    fn samples_check() {
        for s in samples() {
            let r = check_derivation(s.system, &s.derivation, &BTreeSet::new(), &s.agents);
            assert!(r.is_ok(), "{}: {r:?}", s.name);
        }
    }

    #[test]
    fn mutations_fail() {
        let m = mutations();
        assert_eq!(m.len(), 10);
        for (what, s) in m {
            assert!(!is_valid_derivation(s.system, &s.derivation, &s.assumptions, &s.agents), "{what}");
        }
    }

    #[test]
    fn mp_mismatch_and_tainted_ind() {
        let a = ag();
        let mut b = Builder::new();
        let x = b.axiom(Scheme::Int, f("p -> p"));
        let y = b.axiom(Scheme::Int, f("(q -> q) -> r -> r"));
        b.push(f("r -> r"), Justification::Rule(HRule::Mp), vec![x, y]);
        assert!(!is_valid_derivation(Calculus::Ick, &b.finish(), &BTreeSet::new(), &a));

        let hyp = f("p -> K{a} p");
        let mut b = Builder::new();
        let h = b.assume(hyp.clone());
        b.ind(h);
        let d = b.finish();
        let r = check_derivation(Calculus::Ick, &d, &BTreeSet::from([hyp.clone()]), &a);
        assert!(r.unwrap_err().reason.contains("above an assumption"));

        let mut b = Builder::new();
        let h = b.assume(hyp.clone());
        let t = b.axiom(Scheme::Int, f("(p -> K{a} p) -> (p -> K{a} p)"));
        b.mp(h, t);
        assert!(is_valid_derivation(Calculus::Ick, &b.finish(), &BTreeSet::from([hyp]), &a));
    }

    #[test]
    fn json_round_trip() {
        for s in samples() {
            let j = DerivationJson::from_derivation(&s.derivation);
            let text = serde_json::to_string(&j).unwrap();
            let back: DerivationJson = serde_json::from_str(&text).unwrap();
            assert_eq!(back.to_derivation(&s.agents).unwrap(), s.derivation);
        }
    }
}
