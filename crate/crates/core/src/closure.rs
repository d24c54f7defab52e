//! Closure, negation closure and the complexity measure.

use std::collections::BTreeSet;

use crate::formula::{AgentSet, Formula};

fn saturate(start: &BTreeSet<Formula>, agents: &AgentSet, negation: bool) -> BTreeSet<Formula> {
    let mut out = BTreeSet::new();
    let mut work: Vec<Formula> = start.iter().cloned().collect();
    while let Some(f) = work.pop() {
        if out.contains(&f) {
            continue;
        }
        match &f {
            Formula::Bottom | Formula::Atom(_) => {}
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                work.push((**l).clone());
                work.push((**r).clone());
            }
            Formula::K(_, b) => {
                work.push((**b).clone());
                if negation {
                    work.push(Formula::not(f.clone()));
                }
            }
            Formula::C(b) => {
                work.push((**b).clone());
                for a in agents.iter() {
                    work.push(Formula::k(a, f.clone()));
                }
            }
        }
        out.insert(f);
    }
    out
}

/// The smallest superset of `set` closed under subformulas and the unfolding `C g => K_a C g`.
pub fn closure(set: &BTreeSet<Formula>, agents: &AgentSet) -> BTreeSet<Formula> {
    saturate(set, agents, false)
}

/// As [`closure`], additionally containing `~K_a g` for each `K_a g`.
pub fn negation_closure(set: &BTreeSet<Formula>, agents: &AgentSet) -> BTreeSet<Formula> {
    saturate(set, agents, true)
}

pub fn closure_of(f: &Formula, agents: &AgentSet) -> BTreeSet<Formula> {
    closure(&BTreeSet::from([f.clone()]), agents)
}

pub fn negation_closure_of(f: &Formula, agents: &AgentSet) -> BTreeSet<Formula> {
    negation_closure(&BTreeSet::from([f.clone()]), agents)
}

pub fn complexity(f: &Formula) -> usize {
    match f {
        Formula::Bottom | Formula::Atom(_) => 0,
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
            complexity(l) + complexity(r) + 1
        }
        Formula::K(_, b) | Formula::C(b) => complexity(b) + 1,
    }
}

pub fn set_complexity<'a, I: IntoIterator<Item = &'a Formula>>(fs: I) -> usize {
    fs.into_iter().map(complexity).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Agent;

    #[test]
    fn closure_examples() {
        let a = Agent::new("a");
        let b = Agent::new("b");
        let p = Formula::atom("p");
        let cp = Formula::c(p.clone());
        let one = AgentSet::parse("a").unwrap();
        let two = AgentSet::parse("a,b").unwrap();
        assert_eq!(
            closure_of(&cp, &one),
            BTreeSet::from([cp.clone(), p.clone(), Formula::k(&a, cp.clone())])
        );
        assert_eq!(closure_of(&p, &one), BTreeSet::from([p.clone()]));
        assert_eq!(
            closure_of(&cp, &two),
            BTreeSet::from([
                cp.clone(),
                p.clone(),
                Formula::k(&a, cp.clone()),
                Formula::k(&b, cp.clone())
            ])
        );
    }

    #[test]
    fn negation_closure_examples() {
        let a = Agent::new("a");
        let p = Formula::atom("p");
        let one = AgentSet::parse("a").unwrap();
        let kp = Formula::k(&a, p.clone());
        assert_eq!(
            negation_closure_of(&kp, &one),
            BTreeSet::from([kp.clone(), p.clone(), Formula::not(kp.clone()), Formula::Bottom])
        );
        assert_eq!(negation_closure_of(&p, &one), BTreeSet::from([p.clone()]));
        let cp = Formula::c(p.clone());
        let kcp = Formula::k(&a, cp.clone());
        assert_eq!(
            negation_closure_of(&cp, &one),
            BTreeSet::from([cp.clone(), p.clone(), kcp.clone(), Formula::not(kcp), Formula::Bottom])
        );
    }

    #[test]
    fn complexity_examples() {
        let a = Agent::new("a");
        let p = Formula::atom("p");
        let q = Formula::atom("q");
        assert_eq!(complexity(&p), 0);
        assert_eq!(complexity(&Formula::implies(p.clone(), q)), 1);
        assert_eq!(complexity(&Formula::c(Formula::k(&a, p))), 2);
    }
}
