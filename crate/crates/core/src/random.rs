//! Seeded generators for formulas, models and parity games.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::formula::{AgentSet, Formula};
use crate::game::{Game, Player};
use crate::kripke::{ClassicalModel, FrameClass, Model};
use crate::relation::Relation;

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of random formulas.
#[derive(Clone, Debug)]
pub struct FormulaGen {
    pub atoms: Vec<String>,
    pub agents: AgentSet,
    pub max_depth: usize,
    /// Allow `C` and `E`.
    pub common: bool,
}

impl FormulaGen {
    pub fn new(atoms: &[&str], agents: &AgentSet, max_depth: usize) -> Self {
        FormulaGen {
            atoms: atoms.iter().map(|s| s.to_string()).collect(),
            agents: agents.clone(),
            max_depth,
            common: true,
        }
    }

    pub fn formula<R: Rng>(&self, rng: &mut R) -> Formula {
        let d = rng.gen_range(0..=self.max_depth);
        self.at_depth(rng, d)
    }

    fn leaf<R: Rng>(&self, rng: &mut R) -> Formula {
        if rng.gen_ratio(1, 8) {
            Formula::Bottom
        } else {
            Formula::atom(&self.atoms[rng.gen_range(0..self.atoms.len())])
        }
    }

    fn at_depth<R: Rng>(&self, rng: &mut R, d: usize) -> Formula {
        if d == 0 {
            return self.leaf(rng);
        }
        let sub = |rng: &mut R| {
            let e = rng.gen_range(0..d);
            self.at_depth(rng, e)
        };
        let kinds = if self.common { 7 } else { 5 };
        match rng.gen_range(0..kinds) {
            0 => Formula::and(self.at_depth(rng, d - 1), sub(rng)),
            1 => Formula::or(sub(rng), self.at_depth(rng, d - 1)),
            2 => Formula::implies(self.at_depth(rng, d - 1), sub(rng)),
            3 => Formula::not(self.at_depth(rng, d - 1)),
            4 => {
                let a = self.agents.get(rng.gen_range(0..self.agents.len())).clone();
                Formula::k(&a, self.at_depth(rng, d - 1))
            }
            5 => Formula::c(self.at_depth(rng, d - 1)),
            _ => Formula::e(&self.agents, self.at_depth(rng, d - 1)),
        }
    }
}

fn valuation<R: Rng>(rng: &mut R, n: usize, atoms: &[&str]) -> Vec<BTreeSet<Arc<str>>> {
    (0..n)
        .map(|_| atoms.iter().filter(|_| rng.gen_bool(0.5)).map(|p| Arc::from(*p)).collect())
        .collect()
}

fn random_relation<R: Rng>(rng: &mut R, n: usize, density: f64) -> Relation {
    let mut r = Relation::empty(n);
    for x in 0..n {
        for y in 0..n {
            if rng.gen_bool(density) {
                r.insert(x, y);
            }
        }
    }
    r
}

/// A random model of the frame class with between one and `max_worlds` worlds.
pub fn random_model<R: Rng>(
    rng: &mut R,
    fc: FrameClass,
    agents: &AgentSet,
    atoms: &[&str],
    max_worlds: usize,
) -> Model {
    let n = rng.gen_range(1..=max_worlds.max(1));
    let mut gens = Relation::empty(n);
    for x in 0..n {
        for y in x + 1..n {
            if rng.gen_bool(0.3) {
                gens.insert(x, y);
            }
        }
    }
    let order = gens.reflexive_closure().transitive_closure();
    let mut val = valuation(rng, n, atoms);
    for x in 0..n {
        for y in order.succ(x).collect::<Vec<_>>() {
            let up: Vec<_> = val[x].iter().cloned().collect();
            val[y].extend(up);
        }
    }
    let relations: BTreeMap<_, _> =
        agents.iter().map(|a| (a.clone(), random_relation(rng, n, 0.25))).collect();
    let m = Model::new((0..n).map(|i| format!("w{i}")).collect(), order, relations, val);
    match fc {
        FrameClass::S5 => m.close_s5(),
        _ => m.close(fc).expect("non-S5 closure"),
    }
}

/// A random classical model whose relations are equivalences.
pub fn random_classical<R: Rng>(
    rng: &mut R,
    agents: &AgentSet,
    atoms: &[&str],
    max_worlds: usize,
) -> ClassicalModel {
    let n = rng.gen_range(1..=max_worlds.max(1));
    let relations = agents
        .iter()
        .map(|a| {
            let blocks = rng.gen_range(1..=n);
            let label: Vec<usize> = (0..n).map(|_| rng.gen_range(0..blocks)).collect();
            let r = Relation::from_pairs(
                n,
                (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|&(x, y)| label[x] == label[y]),
            );
            (a.clone(), r)
        })
        .collect();
    ClassicalModel {
        worlds: (0..n).map(|i| format!("w{i}")).collect(),
        relations,
        valuation: valuation(rng, n, atoms),
    }
}

/// A random parity game with priorities in `1..=max_priority`; some positions
/// are dead ends.
pub fn random_game<R: Rng>(rng: &mut R, max_positions: usize, max_priority: u8) -> Game {
    let n = rng.gen_range(1..=max_positions.max(1));
    let mut owner = Vec::with_capacity(n);
    let mut priority = Vec::with_capacity(n);
    let mut succ = Vec::with_capacity(n);
    for _ in 0..n {
        owner.push(if rng.gen_bool(0.5) { Player::Prover } else { Player::Refuter });
        priority.push(rng.gen_range(1..=max_priority));
        let deg = if rng.gen_ratio(1, 20) { 0 } else { rng.gen_range(1..=3) };
        let mut s: Vec<u32> = (0..deg).map(|_| rng.gen_range(0..n) as u32).collect();
        s.sort_unstable();
        s.dedup();
        succ.push(s);
    }
    Game::from_lists(owner, priority, &succ)
}
