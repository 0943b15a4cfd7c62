//! Seed-selection strategies: the random benchmark, greedy hill-climbing, and
//! random-local-optimization on bounded sub-networks.

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cascade::{CascadeParams, Percolation};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::influence::{argmax_with_ties, exact_influence};
use crate::rng::{derive, rng_from_seed, tag, trial_rng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Random,
    HillClimb,
    Local,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::HillClimb => "hill_climb",
            Strategy::Local => "local",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedSelection {
    /// Selected seeds in selection order.
    pub seeds: Vec<usize>,
    pub strategy: Strategy,
    /// Simulated realizations charged to the selection, counted per candidate evaluated.
    pub cost_steps: u64,
    pub k: usize,
    /// Sub-network mass `M` (local strategy only).
    pub mass: Option<usize>,
}

fn check_k(g: &Graph, k: usize) -> Result<()> {
    let n = g.node_count();
    if k == 0 || k > n {
        return Err(Error::Input(format!("k = {k} must satisfy 1 <= k <= n = {n}")));
    }
    Ok(())
}

fn check_trials(trials_per_eval: usize) -> Result<()> {
    if trials_per_eval == 0 {
        return Err(Error::Input("trials_per_eval must be at least 1".into()));
    }
    Ok(())
}

/// `k` distinct nodes drawn uniformly. Costs nothing here; the one time unit
/// the random benchmark is charged lives in the utility accounting.
pub fn select_random(g: &Graph, k: usize, rng_seed: u64) -> Result<SeedSelection> {
    check_k(g, k)?;
    let mut rng = rng_from_seed(rng_seed);
    let seeds = sample(&mut rng, g.node_count(), k).into_vec();
    Ok(SeedSelection { seeds, strategy: Strategy::Random, cost_steps: 0, k, mass: None })
}

/// Greedy hill-climbing with Monte-Carlo mean estimates.
///
/// Each round draws `trials_per_eval` fresh static-picture realizations and
/// scores every unselected candidate `u` on all of them: in a realization the
/// gain of `u` is the size of its cluster unless that cluster already holds a
/// selected seed. Gains are integer sums, so ties are exact and go to the
/// smallest id.
pub fn select_hill_climb(
    g: &Graph,
    k: usize,
    params: &CascadeParams,
    trials_per_eval: usize,
    rng_seed: u64,
) -> Result<SeedSelection> {
    check_k(g, k)?;
    check_trials(trials_per_eval)?;
    params.validate()?;
    let n = g.node_count();
    let mut chosen = vec![false; n];
    let mut seeds = Vec::with_capacity(k);
    let mut cost_steps = 0u64;
    for round in 0..k {
        let round_seed = derive(rng_seed, &[tag::ROUND, round as u64]);
        let gains = (0..trials_per_eval as u64)
            .into_par_iter()
            .fold(
                || (Percolation::new(n), vec![0u64; n], vec![false; n]),
                |(mut perc, mut gains, mut covered), t| {
                    perc.sample(g, params.p, &mut trial_rng(round_seed, t));
                    let roots: Vec<usize> = seeds.iter().map(|&s| perc.root(s)).collect();
                    for &r in &roots {
                        covered[r] = true;
                    }
                    for (u, gain) in gains.iter_mut().enumerate() {
                        if chosen[u] {
                            continue;
                        }
                        let r = perc.root(u);
                        if !covered[r] {
                            *gain += perc.cluster_size(r) as u64;
                        }
                    }
                    for &r in &roots {
                        covered[r] = false;
                    }
                    (perc, gains, covered)
                },
            )
            .map(|(_, gains, _)| gains)
            .reduce(
                || vec![0u64; n],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    a
                },
            );
        let best = (0..n)
            .filter(|&u| !chosen[u])
            .max_by(|&a, &b| gains[a].cmp(&gains[b]).then(b.cmp(&a)))
            .expect("k <= n leaves a candidate");
        cost_steps += ((n - seeds.len()) * trials_per_eval) as u64;
        chosen[best] = true;
        seeds.push(best);
    }
    Ok(SeedSelection { seeds, strategy: Strategy::HillClimb, cost_steps, k, mass: None })
}

/// Greedy hill-climbing against the exact expected influence (tiny graphs).
pub fn select_hill_climb_exact(g: &Graph, k: usize, p: f64) -> Result<SeedSelection> {
    check_k(g, k)?;
    let n = g.node_count();
    let mut seeds: Vec<usize> = Vec::with_capacity(k);
    for _ in 0..k {
        let mut values = vec![f64::NEG_INFINITY; n];
        for (u, value) in values.iter_mut().enumerate() {
            if seeds.contains(&u) {
                continue;
            }
            let mut trial = seeds.clone();
            trial.push(u);
            *value = exact_influence(g, &trial, p)?;
        }
        seeds.push(argmax_with_ties(&values).unwrap());
    }
    Ok(SeedSelection { seeds, strategy: Strategy::HillClimb, cost_steps: 0, k, mass: None })
}

/// Breadth-first ball around `root` holding `min(mass, reachable)` nodes.
///
/// Whole frontiers are added while the ball is below `mass`; the frontier that
/// would overflow it is cut, keeping its smallest ids. Touches only the ball
/// and its boundary, never the rest of the graph.
pub fn grow_subnetwork(g: &Graph, root: usize, mass: usize) -> Vec<usize> {
    let mut members = vec![root];
    let mut inside: HashSet<usize> = HashSet::from([root]);
    let mut frontier = vec![root];
    while members.len() < mass {
        let mut next: Vec<usize> = frontier
            .iter()
            .flat_map(|&u| g.neighbors(u).iter().copied())
            .filter(|v| !inside.contains(v))
            .collect();
        next.sort_unstable();
        next.dedup();
        if next.is_empty() {
            break;
        }
        next.truncate(mass - members.len());
        for &v in &next {
            inside.insert(v);
            members.push(v);
        }
        frontier = next;
    }
    members
}

/// Subgraph on `members` (relabeled by ascending id) with only the edges
/// internal to it, built from the members' adjacency alone.
fn local_subgraph(g: &Graph, members: &[usize]) -> (Graph, Vec<usize>) {
    let mut ids = members.to_vec();
    ids.sort_unstable();
    let local = |v: usize| ids.binary_search(&v).ok();
    let mut edges = Vec::new();
    let mut probabilities = g.edge_probabilities().map(|_| Vec::new());
    for (a, &u) in ids.iter().enumerate() {
        for (&v, &e) in g.neighbors(u).iter().zip(g.incident_edges(u)) {
            if v <= u {
                continue;
            }
            if let Some(b) = local(v) {
                edges.push((a, b));
                if let (Some(out), Some(src)) = (probabilities.as_mut(), g.edge_probabilities()) {
                    out.push(src[e]);
                }
            }
        }
    }
    let mut sub = Graph::build(ids.len(), edges);
    if let Some(ps) = probabilities {
        sub = sub.with_edge_probabilities(ps).expect("probabilities copied from a valid graph");
    }
    (sub, ids)
}

/// Members of a sub-network ordered best-first by mean cluster size over
/// `trials` realizations of the sub-network's internal edges.
fn rank_members(sub: &Graph, p: f64, trials: usize, seed: u64) -> Vec<usize> {
    let m = sub.node_count();
    let mut perc = Percolation::new(m);
    let mut totals = vec![0u64; m];
    for t in 0..trials as u64 {
        perc.sample(sub, p, &mut trial_rng(seed, t));
        for (u, total) in totals.iter_mut().enumerate() {
            *total += perc.cluster_size(u) as u64;
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| totals[b].cmp(&totals[a]).then(a.cmp(&b)));
    order
}

/// Random-local-optimization.
///
/// Picks `k` distinct random roots, grows a sub-network of mass `mass` around
/// each, and takes the member with the highest estimated influence inside its
/// own sub-network. When two sub-networks pick the same node the later one
/// takes its next-best member, so the cost never exceeds
/// `k * mass * trials_per_eval` whatever the size of the graph.
pub fn select_local(
    g: &Graph,
    k: usize,
    mass: usize,
    params: &CascadeParams,
    trials_per_eval: usize,
    rng_seed: u64,
) -> Result<SeedSelection> {
    check_k(g, k)?;
    check_trials(trials_per_eval)?;
    params.validate()?;
    if mass == 0 {
        return Err(Error::Input("sub-network mass M must be at least 1".into()));
    }
    let mut rng = rng_from_seed(rng_seed);
    let roots = sample(&mut rng, g.node_count(), k).into_vec();
    let rankings: Vec<Vec<usize>> = roots
        .par_iter()
        .enumerate()
        .map(|(i, &root)| {
            let members = grow_subnetwork(g, root, mass);
            let (sub, ids) = local_subgraph(g, &members);
            let seed = derive(rng_seed, &[tag::SUBNETWORK, i as u64]);
            rank_members(&sub, params.p, trials_per_eval, seed)
                .into_iter()
                .map(|local| ids[local])
                .collect()
        })
        .collect();
    let cost_steps = rankings.iter().map(|r| (r.len() * trials_per_eval) as u64).sum();
    let mut taken = HashSet::with_capacity(k);
    let mut seeds = Vec::with_capacity(k);
    for ranking in &rankings {
        let pick = match ranking.iter().copied().find(|u| !taken.contains(u)) {
            Some(u) => u,
            // every member already taken: only reachable for tiny isolated balls
            None => loop {
                let u = rng.random_range(0..g.node_count());
                if !taken.contains(&u) {
                    break u;
                }
            },
        };
        taken.insert(pick);
        seeds.push(pick);
    }
    Ok(SeedSelection { seeds, strategy: Strategy::Local, cost_steps, k, mass: Some(mass) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::generate_er;
    use crate::influence::estimate;

    fn star(leaves: usize) -> Graph {
        let edges: Vec<_> = (1..=leaves).map(|l| (0, l)).collect();
        Graph::from_edges(leaves + 1, &edges).unwrap()
    }

    fn two_triangles() -> Graph {
        Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap()
    }

    #[test]
    fn random_selection_cases() {
        let g = generate_er(1000, 3.0, 1).unwrap();
        let a = select_random(&g, 3, 42).unwrap();
        assert_eq!(a, select_random(&g, 3, 42).unwrap());
        let distinct: HashSet<_> = a.seeds.iter().collect();
        assert_eq!(distinct.len(), 3);
        assert_eq!(a.cost_steps, 0);

        let small = star(3);
        let mut all = select_random(&small, 4, 1).unwrap().seeds;
        all.sort_unstable();
        assert_eq!(all, vec![0, 1, 2, 3]);
        assert!(select_random(&small, 5, 1).is_err());
        let single = Graph::from_edges(1, &[]).unwrap();
        assert_eq!(select_random(&single, 1, 0).unwrap().seeds, vec![0]);
    }

    #[test]
    fn hill_climb_prefers_star_center() {
        let sel = select_hill_climb(&star(10), 1, &CascadeParams::new(0.5), 200, 3).unwrap();
        assert_eq!(sel.seeds, vec![0]);
        assert_eq!(sel.cost_steps, 11 * 200);
    }

    #[test]
    fn hill_climb_covers_both_triangles() {
        let g = two_triangles();
        let sel = select_hill_climb(&g, 2, &CascadeParams::new(1.0), 50, 3).unwrap();
        let mut seeds = sel.seeds.clone();
        seeds.sort_unstable();
        assert!(seeds[0] < 3 && seeds[1] >= 3, "{seeds:?}");
        assert_eq!(sel.cost_steps, (6 + 5) * 50);

        // exhaustive check of the 15 pairs: only cross pairs reach all 6 nodes
        let mut best = 0.0f64;
        for a in 0..6 {
            for b in a + 1..6 {
                let v = exact_influence(&g, &[a, b], 1.0).unwrap();
                assert_eq!(v == 6.0, (a < 3) != (b < 3));
                best = best.max(v);
            }
        }
        assert_eq!(exact_influence(&g, &sel.seeds, 1.0).unwrap(), best);
    }

    #[test]
    fn hill_climb_at_zero_probability_picks_node_zero() {
        let g = generate_er(50, 3.0, 2).unwrap();
        let sel = select_hill_climb(&g, 1, &CascadeParams::new(0.0), 20, 0).unwrap();
        assert_eq!(sel.seeds, vec![0]);
        let sel = select_hill_climb(&g, 3, &CascadeParams::new(0.0), 20, 0).unwrap();
        assert_eq!(sel.seeds, vec![0, 1, 2]);
    }

    #[test]
    fn hill_climb_validates_inputs() {
        let g = star(3);
        assert!(select_hill_climb(&g, 0, &CascadeParams::new(0.5), 10, 0).is_err());
        assert!(select_hill_climb(&g, 2, &CascadeParams::new(0.5), 0, 0).is_err());
        assert!(select_local(&g, 1, 0, &CascadeParams::new(0.5), 10, 0).is_err());
    }

    #[test]
    fn subnetwork_growth_truncates_last_frontier() {
        // 0 - {1, 2, 3}, 1 - 4, 3 - 5
        let g = Graph::from_edges(6, &[(0, 1), (0, 2), (0, 3), (1, 4), (3, 5)]).unwrap();
        assert_eq!(grow_subnetwork(&g, 0, 1), vec![0]);
        assert_eq!(grow_subnetwork(&g, 0, 3), vec![0, 1, 2]);
        assert_eq!(grow_subnetwork(&g, 0, 5), vec![0, 1, 2, 3, 4]);
        assert_eq!(grow_subnetwork(&g, 0, 50).len(), 6);
        assert_eq!(grow_subnetwork(&g, 4, 3), vec![4, 1, 0]);
    }

    #[test]
    fn local_with_unit_mass_returns_roots() {
        let g = generate_er(500, 3.0, 4).unwrap();
        let sel = select_local(&g, 5, 1, &CascadeParams::new(0.5), 30, 8).unwrap();
        let roots = sample(&mut rng_from_seed(8), 500, 5).into_vec();
        assert_eq!(sel.seeds, roots);
        assert_eq!(sel.cost_steps, 5 * 30);
    }

    #[test]
    fn local_with_whole_graph_matches_full_sweep() {
        let g = Graph::from_edges(7, &[(0, 1), (1, 2), (2, 3), (3, 4), (2, 5), (5, 6), (2, 6)]).unwrap();
        let p = 0.6;
        let params = CascadeParams::new(p);
        let sel = select_local(&g, 1, 100, &params, 20_000, 5).unwrap();
        let (sub, ids) = local_subgraph(&g, &grow_subnetwork(&g, sel.seeds[0], 100));
        assert_eq!(ids, (0..7).collect::<Vec<_>>());
        let order = rank_members(&sub, p, 20_000, derive(5, &[tag::SUBNETWORK, 0]));
        assert_eq!(sel.seeds[0], order[0]);
        // and that node is the exact single-node optimum
        assert_eq!(sel.seeds[0], crate::influence::best_single_node_exact(&g, p).unwrap());
        assert_eq!(sel.cost_steps, 7 * 20_000);
    }

    #[test]
    fn local_resolves_collisions_with_next_best() {
        // star: every sub-network of mass >= 2 contains the hub
        let g = star(30);
        let sel = select_local(&g, 4, 5, &CascadeParams::new(0.5), 50, 1).unwrap();
        let distinct: HashSet<_> = sel.seeds.iter().collect();
        assert_eq!(distinct.len(), 4);
        assert!(sel.seeds.contains(&0));
        assert!(sel.cost_steps <= 4 * 5 * 50);
    }

    #[test]
    fn local_subgraph_keeps_internal_edges_only() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])
            .unwrap()
            .with_edge_probabilities(vec![0.1, 0.2, 0.3, 0.4, 0.5])
            .unwrap();
        let (sub, ids) = local_subgraph(&g, &[4, 0, 1]);
        assert_eq!(ids, vec![0, 1, 4]);
        assert_eq!(sub.edges(), &[(0, 1), (0, 2)]);
        assert_eq!(sub.edge_probabilities().unwrap(), &[0.1, 0.5]);
    }

    #[test]
    fn local_choice_beats_random_on_star_like_graph() {
        let g = generate_er(2000, 3.0, 9).unwrap();
        let params = CascadeParams::new(0.3);
        let local = select_local(&g, 3, 100, &params, 200, 4).unwrap();
        let random = select_random(&g, 3, 4).unwrap();
        let est = |s: &[usize]| estimate(&g, s, &params.with_seed(1), 4000).unwrap().mean;
        assert!(est(&local.seeds) > est(&random.seeds));
    }
}
