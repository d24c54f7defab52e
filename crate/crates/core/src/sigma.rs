//! An indexed formula universe: a closed set of formulas numbered in a fixed order,
//! with sequents over it encoded as bit sets.

use std::collections::BTreeSet;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::closure::complexity;
use crate::formula::{AgentSet, Formula};

pub type Bits = u128;
pub const MAX_SIGMA: usize = 128;
pub const NO_FOCUS: u8 = u8::MAX;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SigmaError {
    #[error("formula universe has {0} formulas, more than the supported {MAX_SIGMA}")]
    TooLarge(usize),
    #[error("formula {0} is not in the universe")]
    NotInSigma(String),
    #[error("agent of {0} is not declared")]
    UnknownAgent(String),
}

/// Shape of a universe member, with children given as indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Bottom,
    Atom,
    And(u8, u8),
    Or(u8, u8),
    Imp(u8, u8),
    K(u8, u8),
    /// Body and, per agent, the index of `K_a C body` when present.
    C(u8, Vec<Option<u8>>),
}

#[derive(Clone, Debug)]
pub struct Sigma {
    pub agents: AgentSet,
    formulas: Vec<Formula>,
    index: FxHashMap<Formula, u8>,
    nodes: Vec<Node>,
    all: Bits,
    focusable: Bits,
    k_of: Vec<Bits>,
}

/// A sequent over a universe: left and right sets and an optional focused index,
/// which always lies in the right set.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct SeqBits {
    pub left: Bits,
    pub right: Bits,
    pub focus: u8,
}

impl SeqBits {
    pub fn new(left: Bits, right: Bits, focus: Option<u8>) -> Self {
        SeqBits { left, right, focus: focus.unwrap_or(NO_FOCUS) }
    }

    pub fn focus(&self) -> Option<u8> {
        (self.focus != NO_FOCUS).then_some(self.focus)
    }

    pub fn has_focus(&self) -> bool {
        self.focus != NO_FOCUS
    }

    pub fn in_left(&self, i: u8) -> bool {
        self.left >> i & 1 == 1
    }

    pub fn in_right(&self, i: u8) -> bool {
        self.right >> i & 1 == 1
    }
}

pub fn bit(i: u8) -> Bits {
    1u128 << i
}

pub fn members(b: Bits) -> impl Iterator<Item = u8> {
    let mut w = b;
    std::iter::from_fn(move || {
        if w == 0 {
            return None;
        }
        let t = w.trailing_zeros() as u8;
        w &= w - 1;
        Some(t)
    })
}

impl Sigma {
    /// Indexes a set of formulas. The set must be closed under subformulas; members
    /// are numbered by complexity, then by the structural order.
    pub fn new(set: &BTreeSet<Formula>, agents: &AgentSet) -> Result<Self, SigmaError> {
        if set.len() > MAX_SIGMA {
            return Err(SigmaError::TooLarge(set.len()));
        }
        let mut formulas: Vec<Formula> = set.iter().cloned().collect();
        formulas.sort_by(|a, b| complexity(a).cmp(&complexity(b)).then_with(|| a.cmp(b)));
        let index: FxHashMap<Formula, u8> =
            formulas.iter().enumerate().map(|(i, f)| (f.clone(), i as u8)).collect();
        let get = |f: &Formula| {
            index.get(f).copied().ok_or_else(|| SigmaError::NotInSigma(f.to_string()))
        };
        let mut nodes = Vec::with_capacity(formulas.len());
        let mut k_of = vec![0 as Bits; agents.len()];
        let mut focusable = 0;
        for (i, f) in formulas.iter().enumerate() {
            let node = match f {
                Formula::Bottom => Node::Bottom,
                Formula::Atom(_) => Node::Atom,
                Formula::And(l, r) => Node::And(get(l)?, get(r)?),
                Formula::Or(l, r) => Node::Or(get(l)?, get(r)?),
                Formula::Implies(l, r) => Node::Imp(get(l)?, get(r)?),
                Formula::K(a, b) => {
                    let ai = agents
                        .index_of(a)
                        .ok_or_else(|| SigmaError::UnknownAgent(f.to_string()))?;
                    k_of[ai] |= bit(i as u8);
                    Node::K(ai as u8, get(b)?)
                }
                Formula::C(b) => {
                    let kc = agents
                        .iter()
                        .map(|a| index.get(&Formula::k(a, f.clone())).copied())
                        .collect();
                    Node::C(get(b)?, kc)
                }
            };
            if f.is_focusable() {
                focusable |= bit(i as u8);
            }
            nodes.push(node);
        }
        let all = if formulas.len() == 128 { Bits::MAX } else { (1u128 << formulas.len()) - 1 };
        Ok(Sigma { agents: agents.clone(), formulas, index, nodes, all, focusable, k_of })
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn formula(&self, i: u8) -> &Formula {
        &self.formulas[i as usize]
    }

    pub fn formulas(&self) -> &[Formula] {
        &self.formulas
    }

    pub fn node(&self, i: u8) -> &Node {
        &self.nodes[i as usize]
    }

    pub fn index(&self, f: &Formula) -> Option<u8> {
        self.index.get(f).copied()
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.index.contains_key(f)
    }

    pub fn all(&self) -> Bits {
        self.all
    }

    pub fn focusable(&self) -> Bits {
        self.focusable
    }

    pub fn is_focusable(&self, i: u8) -> bool {
        self.focusable >> i & 1 == 1
    }

    /// Indices of the `K_a` formulas of agent index `a`.
    pub fn k_mask(&self, a: u8) -> Bits {
        self.k_of[a as usize]
    }

    pub fn bottom(&self) -> Option<u8> {
        self.index(&Formula::Bottom)
    }

    /// Whether `i` is a `C` formula.
    pub fn is_c(&self, i: u8) -> bool {
        matches!(self.nodes[i as usize], Node::C(..))
    }

    pub fn bits_of<'a, I: IntoIterator<Item = &'a Formula>>(&self, fs: I) -> Result<Bits, SigmaError> {
        let mut b = 0;
        for f in fs {
            let i = self.index(f).ok_or_else(|| SigmaError::NotInSigma(f.to_string()))?;
            b |= bit(i);
        }
        Ok(b)
    }

    pub fn set_of(&self, b: Bits) -> BTreeSet<Formula> {
        members(b).map(|i| self.formula(i).clone()).collect()
    }

    /// Unboxes the `K_a` formulas of `b` for agent index `a`.
    pub fn unbox(&self, a: u8, b: Bits) -> Bits {
        let mut out = 0;
        for i in members(b & self.k_of[a as usize]) {
            if let Node::K(_, body) = self.nodes[i as usize] {
                out |= bit(body);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::closure_of;
    use crate::parse::parse;

    #[test]
    fn indexing_is_ordered_by_complexity() {
        let g = AgentSet::parse("a").unwrap();
        let f = parse("C p -> K{a} q", &g).unwrap();
        let s = Sigma::new(&closure_of(&f, &g), &g).unwrap();
        let cs: Vec<usize> = s.formulas().iter().map(complexity).collect();
        let mut sorted = cs.clone();
        sorted.sort();
        assert_eq!(cs, sorted);
        let cp = s.index(&parse("C p", &g).unwrap()).unwrap();
        let kcp = s.index(&parse("K{a} C p", &g).unwrap()).unwrap();
        assert!(matches!(s.node(cp), Node::C(_, kc) if kc == &vec![Some(kcp)]));
        assert!(s.is_focusable(cp) && s.is_focusable(kcp));
        let kq = s.index(&parse("K{a} q", &g).unwrap()).unwrap();
        let q = s.index(&parse("q", &g).unwrap()).unwrap();
        assert_eq!(s.unbox(0, bit(kq) | bit(q)), bit(q));
    }
}
