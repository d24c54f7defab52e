use ick::game::{solve_game, verify_strategy, Game, Player};
use ick::random::{random_game, rng};
use proptest::prelude::*;

/// Whether `p` wins from `v` when it follows `choice` and the opponent moves freely.
fn wins_with(g: &Game, v: u32, p: Player, choice: &[u32]) -> bool {
    let n = g.len();
    let next = |u: u32| -> Vec<u32> {
        if g.owner(u) == p {
            g.succ(u).get(choice[u as usize] as usize).copied().into_iter().collect()
        } else {
            g.succ(u).to_vec()
        }
    };
    let mut reach = vec![false; n];
    let mut stack = vec![v];
    reach[v as usize] = true;
    while let Some(u) = stack.pop() {
        if g.owner(u) == p && g.succ(u).is_empty() {
            return false;
        }
        for w in next(u) {
            if !std::mem::replace(&mut reach[w as usize], true) {
                stack.push(w);
            }
        }
    }
    // a reachable cycle whose top priority favours the opponent
    for top in 0..n as u32 {
        let pr = g.priority(top);
        if !reach[top as usize] || Player::of_priority(pr) == p {
            continue;
        }
        let mut seen = vec![false; n];
        let mut stack: Vec<u32> = next(top);
        while let Some(u) = stack.pop() {
            if g.priority(u) > pr || std::mem::replace(&mut seen[u as usize], true) {
                continue;
            }
            if u == top {
                return false;
            }
            stack.extend(next(u));
        }
    }
    true
}

/// Winner at `v` by enumerating all positional strategies of each player.
fn brute_winner(g: &Game, v: u32) -> Option<Player> {
    let mut found = None;
    for p in [Player::Prover, Player::Refuter] {
        let nodes: Vec<u32> = (0..g.len() as u32).filter(|&u| g.owner(u) == p && !g.succ(u).is_empty()).collect();
        let mut choice = vec![0u32; g.len()];
        loop {
            if wins_with(g, v, p, &choice) {
                if found.is_some() {
                    return None;
                }
                found = Some(p);
                break;
            }
            // odometer over successor indices
            let mut k = 0;
            while k < nodes.len() {
                let u = nodes[k] as usize;
                choice[u] += 1;
                if (choice[u] as usize) < g.succ(u as u32).len() {
                    break;
                }
                choice[u] = 0;
                k += 1;
            }
            if k == nodes.len() {
                break;
            }
        }
    }
    found
}

#[test]
fn solver_matches_brute_force_on_small_games() {
    let mut r = rng(1);
    for _ in 0..300 {
        let g = random_game(&mut r, 7, 4);
        let sol = solve_game(&g);
        for v in 0..g.len() as u32 {
            assert_eq!(brute_winner(&g, v), Some(sol.winner[v as usize]), "node {v}");
        }
    }
}

#[test]
fn dead_end_owner_loses() {
    let g = Game::from_lists(vec![Player::Prover, Player::Refuter], vec![1, 1], &[vec![], vec![]]);
    let sol = solve_game(&g);
    assert_eq!(sol.winner, vec![Player::Refuter, Player::Prover]);
}

proptest! {
    #[test]
    fn solver_strategies_verify(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_game(&mut r, 500, 3);
        let sol = solve_game(&g);
        for p in [Player::Prover, Player::Refuter] {
            let s = sol.strategy_for(p);
            for v in (0..g.len() as u32).filter(|&v| sol.winner[v as usize] == p).take(20) {
                prop_assert_eq!(verify_strategy(&g, v, &s, p), Ok(true));
            }
        }
    }
}
