//! Decision procedure, cyclic proofs and countermodels for intuitionistic common
//! knowledge logic over epistemic, reflexive, S4 and S5 frames.

pub mod arena;
pub mod closure;
pub mod formula;
pub mod game;
pub mod kripke;
pub mod parse;
pub mod relation;
pub mod rules;
pub mod sequent;
pub mod sigma;
pub mod corpus;
pub mod decide;
pub mod random;
pub mod proof;
pub mod countermodel;
pub mod translation;
pub mod hilbert;
