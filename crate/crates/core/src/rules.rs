//! Calculi, rule names and enumeration of rule instances.
//!
//! Enumeration works on index sequents over a [`Sigma`]. Single-principal rules come
//! in a preserving variant (the principal stays in the premises) and a non-preserving
//! one; modal rules use the largest boxed antecedent available.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Agent, Formula};
use crate::kripke::FrameClass;
use crate::sequent::{Sequent, SequentError};
use crate::sigma::{bit, members, Node, SeqBits, Sigma, NO_FOCUS};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Calculus {
    Ick,
    Ickt,
    Icks4,
    Icks5,
}

impl Calculus {
    pub const ALL: [Calculus; 4] = [Calculus::Ick, Calculus::Ickt, Calculus::Icks4, Calculus::Icks5];

    pub fn has_t(self) -> bool {
        self != Calculus::Ick
    }

    pub fn frame_class(self) -> FrameClass {
        match self {
            Calculus::Ick => FrameClass::Epistemic,
            Calculus::Ickt => FrameClass::Reflexive,
            Calculus::Icks4 => FrameClass::S4,
            Calculus::Icks5 => FrameClass::S5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Calculus::Ick => "ICK",
            Calculus::Ickt => "ICKT",
            Calculus::Icks4 => "ICKS4",
            Calculus::Icks5 => "ICKS5",
        }
    }
}

impl fmt::Display for Calculus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown logic {0:?}; expected ICK, ICKT, ICKS4 or ICKS5")]
pub struct UnknownCalculus(pub String);

impl FromStr for Calculus {
    type Err = UnknownCalculus;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_uppercase();
        let t = t.strip_prefix('C').filter(|r| r.starts_with("ICK")).unwrap_or(&t);
        match t {
            "ICK" => Ok(Calculus::Ick),
            "ICKT" => Ok(Calculus::Ickt),
            "ICKS4" => Ok(Calculus::Icks4),
            "ICKS5" => Ok(Calculus::Icks5),
            _ => Err(UnknownCalculus(s.to_string())),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum RuleId {
    Id,
    Bot,
    AndL,
    AndR,
    OrL,
    OrR,
    ImpL,
    ImpR,
    U,
    F,
    K,
    T,
    S4,
    S5,
    KImp,
    CL,
    CR,
    Cut,
}

impl RuleId {
    pub const ALL: [RuleId; 18] = [
        RuleId::Id,
        RuleId::Bot,
        RuleId::AndL,
        RuleId::AndR,
        RuleId::OrL,
        RuleId::OrR,
        RuleId::ImpL,
        RuleId::ImpR,
        RuleId::U,
        RuleId::F,
        RuleId::K,
        RuleId::T,
        RuleId::S4,
        RuleId::S5,
        RuleId::KImp,
        RuleId::CL,
        RuleId::CR,
        RuleId::Cut,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleId::Id => "id",
            RuleId::Bot => "bot",
            RuleId::AndL => "andL",
            RuleId::AndR => "andR",
            RuleId::OrL => "orL",
            RuleId::OrR => "orR",
            RuleId::ImpL => "impL",
            RuleId::ImpR => "impR",
            RuleId::U => "u",
            RuleId::F => "f",
            RuleId::K => "K",
            RuleId::T => "T",
            RuleId::S4 => "S4",
            RuleId::S5 => "S5",
            RuleId::KImp => "Kimp",
            RuleId::CL => "CL",
            RuleId::CR => "CR",
            RuleId::Cut => "cut",
        }
    }

    pub fn is_axiom(self) -> bool {
        matches!(self, RuleId::Id | RuleId::Bot)
    }

    /// Whether the rule belongs to the calculus.
    pub fn in_calculus(self, cal: Calculus) -> bool {
        match self {
            RuleId::K => matches!(cal, Calculus::Ick | Calculus::Ickt),
            RuleId::T => cal.has_t(),
            RuleId::S4 => cal == Calculus::Icks4,
            RuleId::S5 | RuleId::KImp | RuleId::Cut => cal == Calculus::Icks5,
            _ => true,
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuleId::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| format!("unknown rule {s:?}"))
    }
}

/// A rule instance over formulas.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RuleInstance {
    pub rule: RuleId,
    pub agent: Option<Agent>,
    pub conclusion: Sequent,
    pub premises: Vec<Sequent>,
    /// The principal formula; for cut, the cut formula.
    pub principal: Option<Formula>,
    /// Whether this is `CR` with a focused principal.
    pub focused_cr: bool,
}

pub const NO_AGENT: u8 = u8::MAX;

/// A rule instance over universe indices.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct BitInstance {
    pub rule: RuleId,
    pub agent: u8,
    pub principal: u8,
    pub focused_cr: bool,
    pub premises: Vec<SeqBits>,
}

impl BitInstance {
    fn new(rule: RuleId, principal: u8, premises: Vec<SeqBits>) -> Self {
        BitInstance { rule, agent: NO_AGENT, principal, focused_cr: false, premises }
    }

    pub fn to_instance(&self, sigma: &Sigma, conclusion: SeqBits) -> RuleInstance {
        RuleInstance {
            rule: self.rule,
            agent: (self.agent != NO_AGENT).then(|| sigma.agents.get(self.agent as usize).clone()),
            conclusion: Sequent::from_bits(sigma, conclusion),
            premises: self.premises.iter().map(|p| Sequent::from_bits(sigma, *p)).collect(),
            principal: (self.principal != NO_FOCUS).then(|| sigma.formula(self.principal).clone()),
            focused_cr: self.focused_cr,
        }
    }
}

/// Which cut instances an ICKS5 enumeration offers.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum CutMode {
    /// Every cut on a universe member.
    All,
    /// On a sequent not covering the universe, offer just the axiom, else the first
    /// invertible step, else a cut on the least missing formula and focused `CR`;
    /// no cuts elsewhere.
    Ordered,
    /// No cuts.
    None,
}

/// How much of the instance space an enumeration offers.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Policy {
    /// At an axiom sequent, offer only the axiom instance.
    pub axiom_only: bool,
    /// Leave out instances with a premise equal to the conclusion.
    pub skip_loops: bool,
    pub cuts: CutMode,
}

impl Policy {
    /// Every instance of every schema.
    pub const ALL: Policy = Policy { axiom_only: false, skip_loops: false, cuts: CutMode::All };
    /// The search space used by game arenas.
    pub fn arena(cuts: CutMode) -> Policy {
        Policy { axiom_only: true, skip_loops: true, cuts }
    }
}

fn push(out: &mut Vec<BitInstance>, conc: SeqBits, skip_loops: bool, inst: BitInstance) {
    if skip_loops && inst.premises.contains(&conc) {
        return;
    }
    out.push(inst);
}

/// Enumerates the instances with conclusion `s` under `policy`.
pub fn bit_instances(
    sigma: &Sigma,
    cal: Calculus,
    s: SeqBits,
    policy: Policy,
    out: &mut Vec<BitInstance>,
) {
    out.clear();
    let axiom = sigma.is_axiom(s);
    if s.left & s.right != 0 {
        out.push(BitInstance::new(RuleId::Id, NO_FOCUS, vec![]));
    }
    if sigma.bottom().is_some_and(|b| s.in_left(b)) {
        out.push(BitInstance::new(RuleId::Bot, NO_FOCUS, vec![]));
    }
    if policy.axiom_only && axiom.is_some() {
        out.truncate(1);
        return;
    }
    let sk = policy.skip_loops;
    let focus = s.focus();
    if cal == Calculus::Icks5 && policy.cuts == CutMode::Ordered && (s.left | s.right) != sigma.all() {
        if let Some((right, i)) = sigma.first_unsaturated(cal, s) {
            out.push(crate::arena::invertible_step(sigma, s, right, i));
            return;
        }
        let missing = sigma.all() & !(s.left | s.right);
        let chi = missing.trailing_zeros() as u8;
        out.push(BitInstance::new(
            RuleId::Cut,
            chi,
            vec![
                SeqBits { left: s.left | bit(chi), ..s },
                SeqBits { right: s.right | bit(chi), ..s },
            ],
        ));
        if let Some(fi) = focus {
            if let Node::C(body, kc) = sigma.node(fi) {
                focused_cr(s, fi, *body, kc, sk, out);
            }
        }
        return;
    }

    // focus rules
    match focus {
        Some(fi) => push(out, s, sk, BitInstance::new(RuleId::U, fi, vec![SeqBits::new(s.left, s.right, None)])),
        None => {
            for i in members(s.right & sigma.focusable()) {
                push(out, s, sk, BitInstance::new(RuleId::F, i, vec![SeqBits::new(s.left, s.right, Some(i))]));
            }
        }
    }

    // left rules
    for i in members(s.left) {
        for pres in [true, false] {
            let l = if pres { s.left } else { s.left & !bit(i) };
            let with_left = |extra: u128| SeqBits { left: l | extra, ..s };
            let inst = match sigma.node(i) {
                Node::And(a, b) => BitInstance::new(RuleId::AndL, i, vec![with_left(bit(*a) | bit(*b))]),
                Node::Or(a, b) => {
                    BitInstance::new(RuleId::OrL, i, vec![with_left(bit(*a)), with_left(bit(*b))])
                }
                Node::Imp(a, b) => BitInstance::new(
                    RuleId::ImpL,
                    i,
                    vec![SeqBits { left: l, right: s.right | bit(*a), focus: s.focus }, with_left(bit(*b))],
                ),
                Node::C(b, kc) => {
                    let mut extra = bit(*b);
                    for k in kc.iter().flatten() {
                        extra |= bit(*k);
                    }
                    BitInstance::new(RuleId::CL, i, vec![with_left(extra)])
                }
                Node::K(a, b) if cal.has_t() => {
                    let mut t = BitInstance::new(RuleId::T, i, vec![with_left(bit(*b))]);
                    t.agent = *a;
                    t
                }
                _ => continue,
            };
            push(out, s, sk, inst);
        }
    }

    // right rules
    for i in members(s.right) {
        let focused = focus == Some(i);
        match sigma.node(i) {
            Node::C(body, kc) if focused => focused_cr(s, i, *body, kc, sk, out),
            Node::K(a, body) => modal(sigma, cal, s, i, *a, *body, focused, out),
            Node::Imp(a, b) => {
                push(out, s, sk, BitInstance::new(RuleId::ImpR, i, vec![SeqBits::new(s.left | bit(*a), bit(*b), None)]));
                if cal == Calculus::Icks5 {
                    if let Node::K(ag, _) = sigma.node(*a) {
                        for pres in [true, false] {
                            let r = if pres { s.right } else { s.right & !bit(i) };
                            let mut ki = BitInstance::new(
                                RuleId::KImp,
                                i,
                                vec![SeqBits { left: s.left | bit(*a), right: r | bit(*b), focus: s.focus }],
                            );
                            ki.agent = *ag;
                            push(out, s, sk, ki);
                        }
                    }
                }
            }
            node => {
                for pres in [true, false] {
                    let r = if pres { s.right } else { s.right & !bit(i) };
                    let with_right = |extra: u128| SeqBits { right: r | extra, ..s };
                    let inst = match node {
                        Node::And(a, b) => BitInstance::new(
                            RuleId::AndR,
                            i,
                            vec![with_right(bit(*a)), with_right(bit(*b))],
                        ),
                        Node::Or(a, b) => BitInstance::new(RuleId::OrR, i, vec![with_right(bit(*a) | bit(*b))]),
                        Node::C(b, kc) => {
                            let mut prem = vec![with_right(bit(*b))];
                            prem.extend(kc.iter().flatten().map(|k| with_right(bit(*k))));
                            BitInstance::new(RuleId::CR, i, prem)
                        }
                        _ => continue,
                    };
                    push(out, s, sk, inst);
                }
            }
        }
    }

    // cut
    if cal == Calculus::Icks5 && policy.cuts == CutMode::All {
        for chi in members(sigma.all()) {
            push(
                out,
                s,
                sk,
                BitInstance::new(
                    RuleId::Cut,
                    chi,
                    vec![
                        SeqBits { left: s.left | bit(chi), ..s },
                        SeqBits { right: s.right | bit(chi), ..s },
                    ],
                ),
            );
        }
    }
}

fn focused_cr(
    s: SeqBits,
    i: u8,
    body: u8,
    kc: &[Option<u8>],
    sk: bool,
    out: &mut Vec<BitInstance>,
) {
    let rest = s.right & !bit(i);
    let mut prem = vec![SeqBits::new(s.left, rest | bit(body), None)];
    prem.extend(kc.iter().flatten().map(|k| SeqBits::new(s.left, rest | bit(*k), Some(*k))));
    let mut inst = BitInstance::new(RuleId::CR, i, prem);
    inst.focused_cr = true;
    push(out, s, sk, inst);
}

#[allow(clippy::too_many_arguments)]
fn modal(
    sigma: &Sigma,
    cal: Calculus,
    s: SeqBits,
    i: u8,
    a: u8,
    body: u8,
    focused: bool,
    out: &mut Vec<BitInstance>,
) {
    let body_focus = focused.then_some(body);
    let prem = match cal {
        Calculus::Ick | Calculus::Ickt => {
            SeqBits::new(sigma.unbox(a, s.left), bit(body), body_focus)
        }
        Calculus::Icks4 => SeqBits::new(s.left & sigma.k_mask(a), bit(body), body_focus),
        Calculus::Icks5 => {
            let boxed_right = s.right & sigma.k_mask(a) & !if focused { bit(i) } else { 0 };
            let focus = if focused {
                Some(body)
            } else {
                s.focus().filter(|f| boxed_right >> f & 1 == 1)
            };
            SeqBits::new(s.left & sigma.k_mask(a), bit(body) | boxed_right, focus)
        }
    };
    let rule = match cal {
        Calculus::Ick | Calculus::Ickt => RuleId::K,
        Calculus::Icks4 => RuleId::S4,
        Calculus::Icks5 => RuleId::S5,
    };
    let mut inst = BitInstance::new(rule, i, vec![prem]);
    inst.agent = a;
    out.push(inst);
}

/// All instances with conclusion `s` whose premises are sequents over `sigma`.
pub fn rule_instances(
    cal: Calculus,
    s: &Sequent,
    sigma: &Sigma,
) -> Result<Vec<RuleInstance>, SequentError> {
    s.validate()?;
    let bits = s.to_bits(sigma)?;
    let mut out = Vec::new();
    bit_instances(sigma, cal, bits, Policy::ALL, &mut out);
    Ok(out.iter().map(|b| b.to_instance(sigma, bits)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::{closure, negation_closure};
    use crate::formula::AgentSet;
    use crate::sequent::parse_sequent;

    fn setup(cal: Calculus, t: &str) -> (Sigma, Sequent) {
        let g = AgentSet::parse("a").unwrap();
        let s = parse_sequent(t, &g).unwrap();
        let set = if cal == Calculus::Icks5 {
            negation_closure(&s.formulas(), &g)
        } else {
            closure(&s.formulas(), &g)
        };
        (Sigma::new(&set, &g).unwrap(), s)
    }

    fn has(cal: Calculus, t: &str, rule: RuleId, prem: &[&str]) -> bool {
        let (sigma, s) = setup(cal, t);
        let g = AgentSet::parse("a").unwrap();
        let want: Vec<Sequent> = prem.iter().map(|p| parse_sequent(p, &g).unwrap()).collect();
        rule_instances(cal, &s, &sigma)
            .unwrap()
            .iter()
            .any(|i| i.rule == rule && i.premises == want)
    }

    #[test]
    fn schema_examples() {
        assert!(has(Calculus::Ick, "=> p -> q", RuleId::ImpR, &["p => q"]));
        assert!(has(Calculus::Ick, "K{a} p => [K{a} C q]", RuleId::K, &["p => [C q]"]));
        assert!(has(Calculus::Icks5, "=> K{a} p -> false", RuleId::KImp, &["K{a} p => false"]));
        assert!(has(Calculus::Ick, "=> [C p]", RuleId::CR, &["=> p", "=> [K{a} C p]"]));
        assert!(has(Calculus::Ick, "=> C p", RuleId::CR, &["=> C p, p", "=> C p, K{a} C p"]));
        assert!(has(Calculus::Ick, "=> C p", RuleId::F, &["=> [C p]"]));
        assert!(has(Calculus::Ick, "p & q =>", RuleId::AndL, &["p & q, p, q =>"]));
        assert!(has(Calculus::Ick, "p & q =>", RuleId::AndL, &["p, q =>"]));
        assert!(has(Calculus::Icks4, "K{a} p => K{a} q", RuleId::S4, &["K{a} p => q"]));
        assert!(!has(Calculus::Ick, "K{a} p => K{a} q", RuleId::S4, &["K{a} p => q"]));
        assert!(has(
            Calculus::Icks5,
            "K{a} p => K{a} q, K{a} r",
            RuleId::S5,
            &["K{a} p => q, K{a} q, K{a} r"]
        ));
    }

    #[test]
    fn calculus_names() {
        assert_eq!("cICKS4".parse::<Calculus>().unwrap(), Calculus::Icks4);
        assert_eq!("ickt".parse::<Calculus>().unwrap(), Calculus::Ickt);
        assert!("S5".parse::<Calculus>().is_err());
        for r in RuleId::ALL {
            assert_eq!(r.name().parse::<RuleId>().unwrap(), r);
        }
    }
}
