//! Annotated sequents, their text form, interpretation, axioms, saturation and the
//! choice rules used by the search arena.
//!
//! A sequent holds plain formula sets and at most one focused formula, which is a
//! member of the right side. All other formulas carry the unfocused annotation.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::formula::{Agent, AgentSet, Formula};
use crate::parse::{parse, ParseError};
use crate::rules::{Calculus, RuleId};
use crate::sigma::{bit, members, SeqBits, Sigma, SigmaError};

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum SequentError {
    #[error("focused formula {0} is not on the right side")]
    FocusNotInRight(String),
    #[error("formula {0} cannot be focused")]
    NotFocusable(String),
    #[error("malformed sequent: {0}")]
    Syntax(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("formula {0} is outside the formula universe")]
    NotInSigma(String),
    #[error("search saturation is not defined for ICKS5")]
    S5Saturation,
    #[error("sequent is not saturated")]
    NotSaturated,
    #[error("choice rule has no premises")]
    NoChoicePremise,
}

impl From<SigmaError> for SequentError {
    fn from(e: SigmaError) -> Self {
        match e {
            SigmaError::NotInSigma(f) => SequentError::NotInSigma(f),
            other => SequentError::Syntax(other.to_string()),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Sequent {
    pub left: BTreeSet<Formula>,
    pub right: BTreeSet<Formula>,
    pub focus: Option<Formula>,
}

impl Sequent {
    pub fn new(
        left: BTreeSet<Formula>,
        right: BTreeSet<Formula>,
        focus: Option<Formula>,
    ) -> Result<Self, SequentError> {
        let s = Sequent { left, right, focus };
        s.validate()?;
        Ok(s)
    }

    /// The sequent `=> f` with `f` unfocused.
    pub fn goal(f: Formula) -> Self {
        Sequent { left: BTreeSet::new(), right: BTreeSet::from([f]), focus: None }
    }

    pub fn validate(&self) -> Result<(), SequentError> {
        if let Some(f) = &self.focus {
            if !self.right.contains(f) {
                return Err(SequentError::FocusNotInRight(f.to_string()));
            }
            if !f.is_focusable() {
                return Err(SequentError::NotFocusable(f.to_string()));
            }
        }
        Ok(())
    }

    pub fn is_focused(&self, f: &Formula) -> bool {
        self.focus.as_ref() == Some(f)
    }

    /// All formulas occurring in the sequent.
    pub fn formulas(&self) -> BTreeSet<Formula> {
        self.left.union(&self.right).cloned().collect()
    }

    pub fn is_sigma_sequent(&self, sigma: &BTreeSet<Formula>) -> bool {
        self.left.iter().chain(&self.right).all(|f| sigma.contains(f))
    }

    /// The formula `/\ left -> \/ right`.
    pub fn interpretation(&self) -> Formula {
        Formula::implies(
            Formula::conj(self.left.iter().cloned()),
            Formula::disj(self.right.iter().cloned()),
        )
    }

    pub fn to_bits(&self, sigma: &Sigma) -> Result<SeqBits, SequentError> {
        let left = sigma.bits_of(&self.left)?;
        let right = sigma.bits_of(&self.right)?;
        let focus = match &self.focus {
            Some(f) => Some(sigma.index(f).ok_or_else(|| SequentError::NotInSigma(f.to_string()))?),
            None => None,
        };
        Ok(SeqBits::new(left, right, focus))
    }

    pub fn from_bits(sigma: &Sigma, s: SeqBits) -> Self {
        Sequent {
            left: sigma.set_of(s.left),
            right: sigma.set_of(s.right),
            focus: s.focus().map(|i| sigma.formula(i).clone()),
        }
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let left: Vec<String> = self.left.iter().map(|x| x.to_string()).collect();
        let right: Vec<String> = self
            .right
            .iter()
            .map(|x| if self.is_focused(x) { format!("[{x}]") } else { x.to_string() })
            .collect();
        let l = left.join(", ");
        let r = right.join(", ");
        match (l.is_empty(), r.is_empty()) {
            (true, true) => f.write_str("=>"),
            (true, false) => write!(f, "=> {r}"),
            (false, true) => write!(f, "{l} =>"),
            (false, false) => write!(f, "{l} => {r}"),
        }
    }
}

fn split_top(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' | '{' | '[' => depth += 1,
            ')' | '}' | ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts.into_iter().map(str::trim).filter(|p| !p.is_empty()).collect()
}

/// Parses the text form `G1, G2 => D1, [D2]`, where brackets mark the focused formula.
pub fn parse_sequent(text: &str, agents: &AgentSet) -> Result<Sequent, SequentError> {
    let (l, r) = text
        .split_once("=>")
        .ok_or_else(|| SequentError::Syntax(format!("missing '=>' in {text:?}")))?;
    if r.contains("=>") {
        return Err(SequentError::Syntax(format!("more than one '=>' in {text:?}")));
    }
    let mut left = BTreeSet::new();
    for part in split_top(l) {
        left.insert(parse(part, agents)?);
    }
    let mut right = BTreeSet::new();
    let mut focus = None;
    for part in split_top(r) {
        if let Some(inner) = part.strip_prefix('[').and_then(|p| p.strip_suffix(']')) {
            if focus.is_some() {
                return Err(SequentError::Syntax("more than one focused formula".into()));
            }
            let f = parse(inner, agents)?;
            focus = Some(f.clone());
            right.insert(f);
        } else {
            right.insert(parse(part, agents)?);
        }
    }
    Sequent::new(left, right, focus)
}

/// The axiom that closes `s`, if any; `id` is preferred over `bot`.
pub fn is_axiom(s: &Sequent) -> Option<RuleId> {
    if s.left.intersection(&s.right).next().is_some() {
        Some(RuleId::Id)
    } else if s.left.contains(&Formula::Bottom) {
        Some(RuleId::Bot)
    } else {
        None
    }
}

/// Whether the saturation clause for `f` on the left side holds.
pub fn left_saturated(cal: Calculus, s: &Sequent, f: &Formula, agents: &AgentSet) -> bool {
    match f {
        Formula::And(a, b) => s.left.contains(&**a) && s.left.contains(&**b),
        Formula::Or(a, b) => s.left.contains(&**a) || s.left.contains(&**b),
        Formula::Implies(a, b) => s.right.contains(&**a) || s.left.contains(&**b),
        Formula::C(b) => {
            s.left.contains(&**b) && agents.iter().all(|a| s.left.contains(&Formula::k(a, f.clone())))
        }
        Formula::K(_, b) if cal.has_t() => s.left.contains(&**b),
        _ => true,
    }
}

/// Whether the saturation clause for `f` on the right side holds.
pub fn right_saturated(s: &Sequent, f: &Formula, agents: &AgentSet) -> bool {
    match f {
        Formula::And(a, b) => s.right.contains(&**a) || s.right.contains(&**b),
        Formula::Or(a, b) => s.right.contains(&**a) && s.right.contains(&**b),
        Formula::C(b) => {
            !s.is_focused(f)
                && (s.right.contains(&**b)
                    || agents.iter().any(|a| s.right.contains(&Formula::k(a, f.clone()))))
        }
        _ => true,
    }
}

/// Saturation for the search arena; undefined for ICKS5.
pub fn is_search_saturated(
    cal: Calculus,
    s: &Sequent,
    agents: &AgentSet,
) -> Result<bool, SequentError> {
    if cal == Calculus::Icks5 {
        return Err(SequentError::S5Saturation);
    }
    Ok(s.left.iter().all(|f| left_saturated(cal, s, f, agents))
        && s.right.iter().all(|f| right_saturated(s, f, agents)))
}

/// Premise groups of a choice rule instance.
#[derive(Clone, PartialEq, Eq, Debug, PartialOrd, Ord, Hash)]
pub enum PremiseGroup {
    Intuitionistic,
    Modal(Agent),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChoiceInstance {
    pub n: u8,
    pub conclusion: Sequent,
    /// Premises with their group and the principal formula of the conclusion they come from.
    pub premises: Vec<(PremiseGroup, Formula, Sequent)>,
}

/// The choice rule `C_n` (n = 0 for K-style, n = 1 for S4-style modal premises)
/// applied to a saturated sequent.
pub fn choice_instance(n: u8, s: &Sequent) -> Result<ChoiceInstance, SequentError> {
    let mut premises = Vec::new();
    for f in &s.right {
        if let Formula::Implies(a, b) = f {
            let mut left = s.left.clone();
            left.insert((**a).clone());
            let prem = Sequent { left, right: BTreeSet::from([(**b).clone()]), focus: None };
            premises.push((PremiseGroup::Intuitionistic, f.clone(), prem));
        }
    }
    for f in &s.right {
        if let Formula::K(a, chi) = f {
            let left: BTreeSet<Formula> = s
                .left
                .iter()
                .filter_map(|g| match g {
                    Formula::K(b, body) if b == a => {
                        Some(if n == 0 { (**body).clone() } else { g.clone() })
                    }
                    _ => None,
                })
                .collect();
            let chi = (**chi).clone();
            let focus = matches!(chi, Formula::C(_)).then(|| chi.clone());
            let prem = Sequent { left, right: BTreeSet::from([chi]), focus };
            premises.push((PremiseGroup::Modal(a.clone()), f.clone(), prem));
        }
    }
    if premises.is_empty() {
        return Err(SequentError::NoChoicePremise);
    }
    Ok(ChoiceInstance { n, conclusion: s.clone(), premises })
}

impl Sigma {
    /// Whether the saturation clause of member `i` holds on the left of `s`.
    pub fn left_saturated(&self, cal: Calculus, s: SeqBits, i: u8) -> bool {
        use crate::sigma::Node;
        match self.node(i) {
            Node::And(a, b) => s.in_left(*a) && s.in_left(*b),
            Node::Or(a, b) => s.in_left(*a) || s.in_left(*b),
            Node::Imp(a, b) => s.in_right(*a) || s.in_left(*b),
            Node::C(b, kc) => s.in_left(*b) && kc.iter().all(|k| k.is_some_and(|k| s.in_left(k))),
            Node::K(_, b) if cal.has_t() => s.in_left(*b),
            _ => true,
        }
    }

    /// Whether the saturation clause of member `i` holds on the right of `s`.
    pub fn right_saturated(&self, s: SeqBits, i: u8) -> bool {
        use crate::sigma::Node;
        match self.node(i) {
            Node::And(a, b) => s.in_right(*a) || s.in_right(*b),
            Node::Or(a, b) => s.in_right(*a) && s.in_right(*b),
            Node::C(b, kc) => {
                s.focus != i
                    && (s.in_right(*b) || kc.iter().any(|k| k.is_some_and(|k| s.in_right(k))))
            }
            _ => true,
        }
    }

    /// The first unsaturated member, scanning the left side and then the right side
    /// in ascending index order. The boolean is true for a right-side member.
    pub fn first_unsaturated(&self, cal: Calculus, s: SeqBits) -> Option<(bool, u8)> {
        for i in members(s.left) {
            if !self.left_saturated(cal, s, i) {
                return Some((false, i));
            }
        }
        for i in members(s.right) {
            if !self.right_saturated(s, i) {
                return Some((true, i));
            }
        }
        None
    }

    pub fn is_axiom(&self, s: SeqBits) -> Option<RuleId> {
        if s.left & s.right != 0 {
            Some(RuleId::Id)
        } else if self.bottom().is_some_and(|b| s.in_left(b)) {
            Some(RuleId::Bot)
        } else {
            None
        }
    }

    /// Choice rule premises over indices: `(is_modal, agent, principal, premise)`.
    pub fn choice_premises(&self, n: u8, s: SeqBits) -> Vec<(Option<u8>, u8, SeqBits)> {
        use crate::sigma::Node;
        let mut out = Vec::new();
        for i in members(s.right) {
            if let Node::Imp(a, b) = self.node(i) {
                out.push((None, i, SeqBits::new(s.left | bit(*a), bit(*b), None)));
            }
        }
        for i in members(s.right) {
            if let Node::K(a, chi) = self.node(i) {
                let left = if n == 0 { self.unbox(*a, s.left) } else { s.left & self.k_mask(*a) };
                let focus = self.is_c(*chi).then_some(*chi);
                out.push((Some(*a), i, SeqBits::new(left, bit(*chi), focus)));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn agents() -> AgentSet {
        AgentSet::parse("a").unwrap()
    }

    fn seq(t: &str) -> Sequent {
        parse_sequent(t, &agents()).unwrap()
    }

    #[test]
    fn text_round_trip() {
        for t in ["=> p", "p, q =>", "p & q => [C p], r", "=>", "K{a} p => K{a} C q"] {
            let s = seq(t);
            assert_eq!(seq(&s.to_string()), s);
        }
        assert!(parse_sequent("p => q => r", &agents()).is_err());
        assert!(parse_sequent("=> [p]", &agents()).is_err());
        assert!(parse_sequent("=> [C p], [C q]", &agents()).is_err());
    }

    #[test]
    fn axioms() {
        assert_eq!(is_axiom(&seq("p => p")), Some(RuleId::Id));
        assert_eq!(is_axiom(&seq("false =>")), Some(RuleId::Bot));
        assert_eq!(is_axiom(&seq("p => q")), None);
        assert_eq!(is_axiom(&seq("C p => [C p]")), Some(RuleId::Id));
    }

    #[test]
    fn saturation_clauses() {
        let g = agents();
        assert!(is_search_saturated(Calculus::Ick, &seq("p => q"), &g).unwrap());
        assert!(!is_search_saturated(Calculus::Ick, &seq("p & q =>"), &g).unwrap());
        assert!(!is_search_saturated(Calculus::Ick, &seq("=> [C p]"), &g).unwrap());
        assert!(is_search_saturated(Calculus::Ick, &seq("K{a} p =>"), &g).unwrap());
        assert!(!is_search_saturated(Calculus::Ickt, &seq("K{a} p =>"), &g).unwrap());
        assert!(is_search_saturated(Calculus::Icks5, &seq("=>"), &g).is_err());
    }

    #[test]
    fn choice_rules() {
        let c = choice_instance(0, &seq("K{a} p => K{a} C q")).unwrap();
        assert_eq!(c.premises.len(), 1);
        assert_eq!(c.premises[0].2, seq("p => [C q]"));
        let c = choice_instance(1, &seq("K{a} p => K{a} q")).unwrap();
        assert_eq!(c.premises[0].2, seq("K{a} p => q"));
        let c = choice_instance(0, &seq("=> p -> q")).unwrap();
        assert_eq!(c.premises[0].0, PremiseGroup::Intuitionistic);
        assert_eq!(c.premises[0].2, seq("p => q"));
        assert_eq!(choice_instance(0, &seq("p => q")), Err(SequentError::NoChoicePremise));
    }

    #[test]
    fn interpretation_conventions() {
        let g = agents();
        assert_eq!(seq("=> p").interpretation(), parse("true -> p", &g).unwrap());
        assert_eq!(seq("p =>").interpretation(), parse("p -> false", &g).unwrap());
        assert_eq!(seq("p, q => r").interpretation(), parse("p & q -> r", &g).unwrap());
    }
}
