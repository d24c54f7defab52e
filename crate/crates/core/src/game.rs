//! Max-parity games with dead ends: a recursive attractor solver with
//! positional strategies, and an independent strategy verifier.

use petgraph::algo::kosaraju_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Player {
    Prover,
    Refuter,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Prover => Player::Refuter,
            Player::Refuter => Player::Prover,
        }
    }

    /// The player favoured by a priority: even priorities belong to Prover.
    pub fn of_priority(p: u8) -> Player {
        if p.is_multiple_of(2) {
            Player::Prover
        } else {
            Player::Refuter
        }
    }
}

pub const NONE: u32 = u32::MAX;

/// A finite game graph in compressed adjacency form.
#[derive(Clone, Debug, Default)]
pub struct Game {
    owner: Vec<Player>,
    priority: Vec<u8>,
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl Game {
    pub fn new() -> Self {
        Game { offsets: vec![0], ..Default::default() }
    }

    /// Builds a game from explicit successor lists.
    pub fn from_lists(owner: Vec<Player>, priority: Vec<u8>, succ: &[Vec<u32>]) -> Self {
        let mut g = Game::new();
        for (i, s) in succ.iter().enumerate() {
            g.push_node(owner[i], priority[i]);
            g.push_successors(s);
        }
        g
    }

    /// Appends a node; successors must be pushed in node order with [`Game::push_successors`].
    pub fn push_node(&mut self, owner: Player, priority: u8) -> u32 {
        self.owner.push(owner);
        self.priority.push(priority);
        (self.owner.len() - 1) as u32
    }

    /// Records the successors of the next node whose successors are not yet known.
    pub fn push_successors(&mut self, succ: &[u32]) {
        self.targets.extend_from_slice(succ);
        self.offsets.push(self.targets.len() as u32);
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    /// Number of nodes whose successor lists are complete.
    pub fn expanded(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn owner(&self, v: u32) -> Player {
        self.owner[v as usize]
    }

    pub fn priority(&self, v: u32) -> u8 {
        self.priority[v as usize]
    }

    pub fn succ(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.targets[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    fn predecessors(&self) -> (Vec<u32>, Vec<u32>) {
        let n = self.len();
        let mut count = vec![0u32; n + 1];
        for &t in &self.targets {
            count[t as usize + 1] += 1;
        }
        for i in 0..n {
            count[i + 1] += count[i];
        }
        let mut fill = count.clone();
        let mut preds = vec![0u32; self.targets.len()];
        for v in 0..n {
            for &t in self.succ(v as u32) {
                preds[fill[t as usize] as usize] = v as u32;
                fill[t as usize] += 1;
            }
        }
        (count, preds)
    }
}

/// Winning regions and positional strategies for both players.
#[derive(Clone, Debug)]
pub struct Solution {
    pub winner: Vec<Player>,
    /// For each node owned by its winner and having successors, the chosen successor.
    pub choice: Vec<u32>,
}

/// A positional strategy for one player.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    pub player: Player,
    pub choice: Vec<u32>,
}

impl Solution {
    pub fn strategy_for(&self, p: Player) -> Strategy {
        let choice = self
            .choice
            .iter()
            .enumerate()
            .map(|(v, &c)| if self.winner[v] == p { c } else { NONE })
            .collect();
        Strategy { player: p, choice }
    }
}

struct Solver<'a> {
    g: &'a Game,
    pred_off: Vec<u32>,
    preds: Vec<u32>,
    count: Vec<u32>,
    mark: Vec<u32>,
    stamp: u32,
    winner: Vec<Player>,
    choice: Vec<u32>,
}

impl Solver<'_> {
    fn preds(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.preds[self.pred_off[v] as usize..self.pred_off[v + 1] as usize]
    }

    /// Attractor of `target` for `p` inside the subgame `inside`. Records attractor
    /// moves in `choice` for `p` nodes outside `target`.
    fn attractor(&mut self, p: Player, target: &[u32], inside: &[bool]) -> Vec<u32> {
        self.stamp += 1;
        let stamp = self.stamp;
        let mut out: Vec<u32> = Vec::with_capacity(target.len());
        let mut queue: Vec<u32> = Vec::new();
        for &t in target {
            if self.mark[t as usize] != stamp || self.count[t as usize] != 0 {
                self.mark[t as usize] = stamp;
                self.count[t as usize] = 0;
                out.push(t);
                queue.push(t);
            }
        }
        let mut head = 0;
        while head < queue.len() {
            let v = queue[head];
            head += 1;
            let np = self.pred_off[v as usize + 1] - self.pred_off[v as usize];
            for i in 0..np {
                let u = self.preds(v)[i as usize];
                let ui = u as usize;
                if !inside[ui] {
                    continue;
                }
                if self.mark[ui] == stamp && self.count[ui] == 0 {
                    continue;
                }
                if self.g.owner(u) == p {
                    self.mark[ui] = stamp;
                    self.count[ui] = 0;
                    self.choice[ui] = v;
                    out.push(u);
                    queue.push(u);
                } else {
                    if self.mark[ui] != stamp {
                        self.mark[ui] = stamp;
                        let c = self.g.succ(u).iter().filter(|&&s| inside[s as usize]).count();
                        self.count[ui] = c as u32 + 1;
                    }
                    self.count[ui] -= 1;
                    if self.count[ui] == 1 {
                        self.count[ui] = 0;
                        out.push(u);
                        queue.push(u);
                    }
                }
            }
        }
        out
    }

    /// Solves the subgame `nodes`, which must be exactly the nodes marked in `inside`.
    /// The marking is restored on return.
    fn solve(&mut self, nodes: Vec<u32>, inside: &mut [bool]) {
        let original = nodes.clone();
        let mut nodes = nodes;
        while !nodes.is_empty() {
            let d = nodes.iter().map(|&v| self.g.priority(v)).max().unwrap();
            let p = Player::of_priority(d);
            let top: Vec<u32> = nodes.iter().copied().filter(|&v| self.g.priority(v) == d).collect();
            let a = self.attractor(p, &top, inside);
            for &v in &a {
                inside[v as usize] = false;
            }
            let rest: Vec<u32> = nodes.iter().copied().filter(|&v| inside[v as usize]).collect();
            self.solve(rest.clone(), inside);
            for &v in &a {
                inside[v as usize] = true;
            }
            let lost: Vec<u32> = rest.iter().copied().filter(|&v| self.winner[v as usize] != p).collect();
            if lost.is_empty() {
                for &v in &top {
                    if self.g.owner(v) == p {
                        let s = self.g.succ(v).iter().copied().find(|&s| inside[s as usize]);
                        self.choice[v as usize] = s.unwrap_or(NONE);
                    }
                }
                for &v in &a {
                    self.winner[v as usize] = p;
                }
                break;
            }
            let q = p.opponent();
            let b = self.attractor(q, &lost, inside);
            for &v in &b {
                self.winner[v as usize] = q;
                inside[v as usize] = false;
            }
            nodes.retain(|&v| inside[v as usize]);
        }
        for &v in &original {
            inside[v as usize] = true;
        }
    }
}

/// Solves the game at every node. A node without successors is lost by its owner.
pub fn solve_game(g: &Game) -> Solution {
    let n = g.len();
    assert_eq!(g.expanded(), n, "game has unexpanded nodes");
    let (pred_off, preds) = g.predecessors();
    let mut s = Solver {
        g,
        pred_off,
        preds,
        count: vec![0; n],
        mark: vec![0; n],
        stamp: 0,
        winner: vec![Player::Refuter; n],
        choice: vec![NONE; n],
    };
    let mut inside = vec![true; n];
    for p in [Player::Prover, Player::Refuter] {
        let dead: Vec<u32> = (0..n as u32)
            .filter(|&v| inside[v as usize] && g.succ(v).is_empty() && g.owner(v) == p.opponent())
            .collect();
        let a = s.attractor(p, &dead, &inside);
        for &v in &a {
            s.winner[v as usize] = p;
            inside[v as usize] = false;
        }
    }
    let nodes: Vec<u32> = (0..n as u32).filter(|&v| inside[v as usize]).collect();
    s.solve(nodes, &mut inside);
    for v in 0..n {
        if g.owner(v as u32) != s.winner[v] {
            s.choice[v] = NONE;
        }
    }
    Solution { winner: s.winner, choice: s.choice }
}

/// Solves and returns the winner at `initial` with that player's strategy.
pub fn solve(g: &Game, initial: u32) -> (Player, Strategy) {
    let sol = solve_game(g);
    let w = sol.winner[initial as usize];
    (w, sol.strategy_for(w))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StrategyError {
    #[error("strategy move {0} -> {1} is not an edge")]
    NotAnEdge(u32, u32),
}

/// Checks that `s` wins for `claimed` from `initial`: in the graph where `claimed`
/// follows `s` and the opponent moves freely, every dead end belongs to the opponent
/// and every cycle has a maximal priority of the claimed parity.
pub fn verify_strategy(
    g: &Game,
    initial: u32,
    s: &Strategy,
    claimed: Player,
) -> Result<bool, StrategyError> {
    let n = g.len();
    let mut seen = vec![false; n];
    let mut order = Vec::new();
    let mut stack = vec![initial];
    seen[initial as usize] = true;
    let mut edges: Vec<(u32, u32)> = Vec::new();
    while let Some(v) = stack.pop() {
        order.push(v);
        let succ = g.succ(v);
        let next: Vec<u32> = if g.owner(v) == claimed {
            if succ.is_empty() {
                return Ok(false);
            }
            let c = s.choice.get(v as usize).copied().unwrap_or(NONE);
            if c == NONE {
                return Ok(false);
            }
            if !succ.contains(&c) {
                return Err(StrategyError::NotAnEdge(v, c));
            }
            vec![c]
        } else {
            succ.to_vec()
        };
        for t in next {
            edges.push((v, t));
            if !seen[t as usize] {
                seen[t as usize] = true;
                stack.push(t);
            }
        }
    }
    let bad_parity = |p: u8| Player::of_priority(p) != claimed;
    let mut local = vec![u32::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        local[v as usize] = i as u32;
    }
    let mut prios: Vec<u8> = order.iter().map(|&v| g.priority(v)).filter(|&p| bad_parity(p)).collect();
    prios.sort_unstable();
    prios.dedup();
    for p in prios {
        let mut graph: DiGraph<u32, ()> = DiGraph::new();
        let ids: Vec<_> = order.iter().map(|&v| graph.add_node(v)).collect();
        let keep = |v: u32| g.priority(v) <= p;
        let mut self_loop = vec![false; order.len()];
        for &(a, b) in &edges {
            if keep(a) && keep(b) {
                let (la, lb) = (local[a as usize] as usize, local[b as usize] as usize);
                graph.add_edge(ids[la], ids[lb], ());
                if la == lb {
                    self_loop[la] = true;
                }
            }
        }
        for comp in kosaraju_scc(&graph) {
            let cyclic = comp.len() > 1 || self_loop[comp[0].index()];
            if !cyclic {
                continue;
            }
            let members: Vec<u32> = comp.iter().map(|&i| graph[i]).collect();
            if members.iter().all(|&v| keep(v)) && members.iter().any(|&v| g.priority(v) == p) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Player::*;

    #[test]
    fn dead_ends() {
        // 0 (Prover) -> 1 (Refuter, dead end)
        let g = Game::from_lists(vec![Prover, Refuter], vec![3, 1], &[vec![1], vec![]]);
        let (w, s) = solve(&g, 0);
        assert_eq!(w, Prover);
        assert!(verify_strategy(&g, 0, &s, Prover).unwrap());
        let g = Game::from_lists(vec![Prover], vec![3], &[vec![]]);
        let (w, s) = solve(&g, 0);
        assert_eq!(w, Refuter);
        assert!(verify_strategy(&g, 0, &s, Refuter).unwrap());
    }

    #[test]
    fn parity_cycles() {
        // Prover at 0 chooses between a 2-cycle (prio 2) and a 3-loop.
        let g = Game::from_lists(
            vec![Prover, Refuter, Refuter],
            vec![1, 2, 3],
            &[vec![1, 2], vec![0], vec![2]],
        );
        let (w, s) = solve(&g, 0);
        assert_eq!(w, Prover);
        assert_eq!(s.choice[0], 1);
        assert!(verify_strategy(&g, 0, &s, Prover).unwrap());
        let mut bad = s.clone();
        bad.choice[0] = 2;
        assert!(!verify_strategy(&g, 0, &bad, Prover).unwrap());
        bad.choice[0] = 0;
        assert_eq!(verify_strategy(&g, 0, &bad, Prover), Err(StrategyError::NotAnEdge(0, 0)));
    }

    #[test]
    fn refuter_escapes() {
        // Refuter at 1 can go to the odd loop.
        let g = Game::from_lists(
            vec![Prover, Refuter, Prover],
            vec![1, 2, 3],
            &[vec![1], vec![0, 2], vec![2]],
        );
        let (w, s) = solve(&g, 0);
        assert_eq!(w, Refuter);
        assert!(verify_strategy(&g, 0, &s, Refuter).unwrap());
    }
}
