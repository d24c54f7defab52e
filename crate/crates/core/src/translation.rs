//! Double-negation translation of classical S5 common knowledge into ICKS5.

use crate::formula::Formula;
use crate::kripke::{ClassicalModel, ModelError};

fn not_not(f: Formula) -> Formula {
    Formula::not(Formula::not(f))
}

/// Homomorphic on the connectives; inserts `~~` under every modality.
pub fn tau(f: &Formula) -> Formula {
    match f {
        Formula::Bottom | Formula::Atom(_) => f.clone(),
        Formula::And(l, r) => Formula::and(tau(l), tau(r)),
        Formula::Or(l, r) => Formula::or(tau(l), tau(r)),
        Formula::Implies(l, r) => Formula::implies(tau(l), tau(r)),
        Formula::K(a, b) => Formula::k(a, not_not(tau(b))),
        Formula::C(b) => Formula::c(not_not(tau(b))),
    }
}

/// `~~tau(f)`.
pub fn tr(f: &Formula) -> Formula {
    not_not(tau(f))
}

/// Whether `f` and `tr(f)` agree at every world of a classical S5 model.
pub fn check_translation_equiv(m: &ClassicalModel, f: &Formula) -> Result<bool, ModelError> {
    if let Some(v) = m.check_s5().first() {
        return Err(ModelError::NotS5(v.to_string()));
    }
    Ok(m.truth_set(f) == m.truth_set(&tr(f)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::complexity;
    use crate::formula::AgentSet;
    use crate::parse::parse;

    fn f(s: &str) -> Formula {
        parse(s, &AgentSet::new(["a"]).unwrap()).unwrap()
    }

    #[test]
    fn clauses() {
        assert_eq!(tau(&f("p")), f("p"));
        assert_eq!(tau(&f("K{a} p")), f("K{a} ~~p"));
        assert_eq!(tau(&f("C (p -> q)")), f("C ~~(p -> q)"));
        assert_eq!(tr(&f("p")), f("~~p"));
        assert_eq!(tr(&f("K{a} p")), f("~~K{a} ~~p"));
        assert_eq!(tr(&f("false")), f("~~false"));
    }

    #[test]
    fn linear_size() {
        let g = f("C (K{a} p -> C q) | ~K{a} r");
        assert!(complexity(&tr(&g)) <= complexity(&g) + 4 * g.modal_count() + 4);
    }
}
