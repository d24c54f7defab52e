//! Formulas of the epistemic language with common knowledge.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// An agent name, indexing a knowledge modality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Agent(Arc<str>);

impl Agent {
    pub fn new(name: &str) -> Self {
        Agent(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AgentError {
    #[error("agent set must be nonempty")]
    Empty,
    #[error("invalid agent name {0:?}")]
    BadName(String),
}

/// The finite nonempty set of agents, kept sorted and duplicate free.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AgentSet(Vec<Agent>);

impl AgentSet {
    pub fn new<I, S>(names: I) -> Result<Self, AgentError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut agents = BTreeSet::new();
        for n in names {
            let n = n.as_ref().trim();
            if n.is_empty() || !n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(AgentError::BadName(n.to_string()));
            }
            agents.insert(Agent::new(n));
        }
        if agents.is_empty() {
            return Err(AgentError::Empty);
        }
        Ok(AgentSet(agents.into_iter().collect()))
    }

    /// Parses a comma separated list such as `a,b`.
    pub fn parse(list: &str) -> Result<Self, AgentError> {
        Self::new(list.split(','))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Agent> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, a: &Agent) -> bool {
        self.0.binary_search(a).is_ok()
    }

    pub fn index_of(&self, a: &Agent) -> Option<usize> {
        self.0.binary_search(a).ok()
    }

    pub fn get(&self, i: usize) -> &Agent {
        &self.0[i]
    }

    pub fn as_slice(&self) -> &[Agent] {
        &self.0
    }
}

impl fmt::Display for AgentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(|a| a.name()).collect();
        f.write_str(&names.join(","))
    }
}

/// A formula. Negation, truth and "everybody knows" are abbreviations.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Formula {
    Bottom,
    Atom(Arc<str>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Implies(Arc<Formula>, Arc<Formula>),
    K(Agent, Arc<Formula>),
    C(Arc<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Self {
        Formula::Atom(Arc::from(name))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Arc::new(l), Arc::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Arc::new(l), Arc::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Self {
        Formula::Implies(Arc::new(l), Arc::new(r))
    }

    pub fn not(f: Formula) -> Self {
        Formula::implies(f, Formula::Bottom)
    }

    pub fn top() -> Self {
        Formula::implies(Formula::Bottom, Formula::Bottom)
    }

    pub fn iff(l: Formula, r: Formula) -> Self {
        Formula::and(
            Formula::implies(l.clone(), r.clone()),
            Formula::implies(r, l),
        )
    }

    pub fn k(a: &Agent, f: Formula) -> Self {
        Formula::K(a.clone(), Arc::new(f))
    }

    pub fn c(f: Formula) -> Self {
        Formula::C(Arc::new(f))
    }

    /// `E f`, the left nested conjunction of `K_a f` over all agents.
    pub fn e(agents: &AgentSet, f: Formula) -> Self {
        let mut it = agents.iter();
        let first = it.next().expect("agent set is nonempty");
        let mut acc = Formula::k(first, f.clone());
        for a in it {
            acc = Formula::and(acc, Formula::k(a, f.clone()));
        }
        acc
    }

    /// Conjunction of a list; the empty conjunction is `true`.
    pub fn conj<I: IntoIterator<Item = Formula>>(fs: I) -> Self {
        fs.into_iter()
            .reduce(Formula::and)
            .unwrap_or_else(Formula::top)
    }

    /// Disjunction of a list; the empty disjunction is `false`.
    pub fn disj<I: IntoIterator<Item = Formula>>(fs: I) -> Self {
        fs.into_iter().reduce(Formula::or).unwrap_or(Formula::Bottom)
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Atom(_))
    }

    /// Whether the formula is of the form `C g` or `K_a C g`, the shapes that may carry focus.
    pub fn is_focusable(&self) -> bool {
        match self {
            Formula::C(_) => true,
            Formula::K(_, b) => matches!(**b, Formula::C(_)),
            _ => false,
        }
    }

    /// The formula `g` if this is `g -> false`.
    pub fn negated(&self) -> Option<&Formula> {
        match self {
            Formula::Implies(l, r) if **r == Formula::Bottom => Some(l),
            _ => None,
        }
    }

    /// Immediate subformulas.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Bottom | Formula::Atom(_) => vec![],
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => vec![l, r],
            Formula::K(_, b) | Formula::C(b) => vec![b],
        }
    }

    /// All subformulas, including the formula itself.
    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            if out.insert(f.clone()) {
                stack.extend(f.children());
            }
        }
        out
    }

    pub fn atoms(&self) -> BTreeSet<Arc<str>> {
        self.subformulas()
            .into_iter()
            .filter_map(|f| match f {
                Formula::Atom(p) => Some(p),
                _ => None,
            })
            .collect()
    }

    pub fn agents(&self) -> BTreeSet<Agent> {
        self.subformulas()
            .into_iter()
            .filter_map(|f| match f {
                Formula::K(a, _) => Some(a),
                _ => None,
            })
            .collect()
    }

    /// Nesting depth of connectives and modalities.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Bottom | Formula::Atom(_) => 0,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                1 + l.depth().max(r.depth())
            }
            Formula::K(_, b) | Formula::C(b) => 1 + b.depth(),
        }
    }

    /// Number of `K` and `C` occurrences.
    pub fn modal_count(&self) -> usize {
        match self {
            Formula::Bottom | Formula::Atom(_) => 0,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.modal_count() + r.modal_count()
            }
            Formula::K(_, b) | Formula::C(b) => 1 + b.modal_count(),
        }
    }

    fn level(&self) -> u8 {
        match self {
            Formula::Implies(_, r) if **r == Formula::Bottom => 4,
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            _ => 4,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let lvl = self.level();
        if lvl < min {
            f.write_str("(")?;
            self.fmt_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Formula::Bottom => f.write_str("false"),
            Formula::Atom(p) => f.write_str(p),
            Formula::Implies(l, r) if **l == Formula::Bottom && **r == Formula::Bottom => {
                f.write_str("true")
            }
            Formula::Implies(l, r) if **r == Formula::Bottom => {
                f.write_str("~")?;
                l.fmt_at(f, 4)
            }
            Formula::Implies(l, r) => {
                l.fmt_at(f, 2)?;
                f.write_str(" -> ")?;
                r.fmt_at(f, 1)
            }
            Formula::Or(l, r) => {
                l.fmt_at(f, 2)?;
                f.write_str(" | ")?;
                r.fmt_at(f, 3)
            }
            Formula::And(l, r) => {
                l.fmt_at(f, 3)?;
                f.write_str(" & ")?;
                r.fmt_at(f, 4)
            }
            Formula::K(a, b) => {
                write!(f, "K{{{}}} ", a)?;
                b.fmt_at(f, 4)
            }
            Formula::C(b) => {
                f.write_str("C ")?;
                b.fmt_at(f, 4)
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

/// Renders a formula in the concrete grammar accepted by [`crate::parse::parse`].
pub fn render(f: &Formula) -> String {
    f.to_string()
}
