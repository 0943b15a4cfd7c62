//! Synthetic network families: Erdős–Rényi, Watts–Strogatz small worlds, and
//! configuration-model graphs with power-law degrees.

use std::collections::HashSet;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{rng_from_seed, StreamRng};

/// Re-draws allowed for a single small-world rewiring before the edge is kept.
pub const REWIRE_RETRIES: usize = 64;
/// Full re-pairings allowed before configuration-model generation gives up.
pub const MAX_RESTARTS: usize = 100;
const STALL_LIMIT: usize = 1_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Er { mean_degree: f64 },
    SmallWorld { z: usize, mu: f64 },
    ConfigPowerLaw { alpha: f64, kmin: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub family: Family,
    pub n: usize,
    #[serde(default)]
    pub rng_seed: u64,
}

impl GeneratorSpec {
    pub fn er(n: usize, mean_degree: f64, rng_seed: u64) -> Self {
        GeneratorSpec { family: Family::Er { mean_degree }, n, rng_seed }
    }

    pub fn small_world(n: usize, z: usize, mu: f64, rng_seed: u64) -> Self {
        GeneratorSpec { family: Family::SmallWorld { z, mu }, n, rng_seed }
    }

    pub fn config_power_law(n: usize, alpha: f64, kmin: usize, rng_seed: u64) -> Self {
        GeneratorSpec { family: Family::ConfigPowerLaw { alpha, kmin }, n, rng_seed }
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            Family::Er { .. } => "er",
            Family::SmallWorld { .. } => "small_world",
            Family::ConfigPowerLaw { .. } => "config_power_law",
        }
    }

    /// Every violated precondition, in a stable order. Empty when valid.
    pub fn violations(&self) -> Vec<String> {
        let n = self.n;
        let mut out = Vec::new();
        if n < 2 {
            out.push(format!("n = {n} must be at least 2"));
        }
        match self.family {
            Family::Er { mean_degree } => {
                if !(mean_degree > 0.0 && mean_degree <= n.saturating_sub(1) as f64) {
                    out.push(format!("er mean_degree = {mean_degree} must lie in (0, n-1]"));
                }
            }
            Family::SmallWorld { z, mu } => {
                if z % 2 != 0 || z < 2 || z >= n {
                    out.push(format!("small_world z = {z} must be even with 2 <= z < n"));
                }
                if !(0.0..=1.0).contains(&mu) {
                    out.push(format!("small_world mu = {mu} must lie in [0, 1]"));
                }
            }
            Family::ConfigPowerLaw { alpha, kmin } => {
                if !(alpha > 1.0) {
                    out.push(format!("config_power_law alpha = {alpha} must exceed 1"));
                }
                if kmin < 1 || kmin >= n {
                    out.push(format!("config_power_law kmin = {kmin} must satisfy 1 <= kmin < n"));
                }
            }
        }
        out
    }

    pub fn generate(&self) -> Result<Graph> {
        match self.family {
            Family::Er { mean_degree } => generate_er(self.n, mean_degree, self.rng_seed),
            Family::SmallWorld { z, mu } => generate_small_world(self.n, z, mu, self.rng_seed),
            Family::ConfigPowerLaw { alpha, kmin } => {
                generate_config_power_law(self.n, alpha, kmin, self.rng_seed)
            }
        }
    }

    fn check(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Parameter(v.join("; ")))
        }
    }
}

/// G(n, p) with `p = mean_degree / (n - 1)`, sampled by geometric skipping
/// over the pairs `(w, v)`, `w < v`.
pub fn generate_er(n: usize, mean_degree: f64, rng_seed: u64) -> Result<Graph> {
    GeneratorSpec::er(n, mean_degree, rng_seed).check()?;
    let p = (mean_degree / (n - 1) as f64).min(1.0);
    let mut rng = rng_from_seed(rng_seed);
    let mut edges = Vec::new();
    if p >= 1.0 {
        for v in 1..n {
            for w in 0..v {
                edges.push((w, v));
            }
        }
        return Ok(Graph::build(n, edges));
    }
    let log_q = (1.0 - p).ln();
    let cap = (n as f64) * (n as f64);
    let mut v: usize = 1;
    let mut w: i64 = -1;
    while v < n {
        let r: f64 = rng.random();
        let skip = ((1.0 - r).ln() / log_q).floor().min(cap) as i64;
        w += 1 + skip;
        while v < n && w >= v as i64 {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as usize, v));
        }
    }
    Ok(Graph::build(n, edges))
}

/// Watts–Strogatz rewiring of a ring lattice in which each node links to its
/// `z/2` nearest neighbors on each side.
///
/// The lower-id endpoint in ring order owns each lattice edge and keeps it when
/// rewiring; the far end is redrawn uniformly, rejecting self-loops and
/// existing pairs. After [`REWIRE_RETRIES`] rejected draws the edge stays put,
/// so the edge count is exactly `n * z / 2`.
pub fn generate_small_world(n: usize, z: usize, mu: f64, rng_seed: u64) -> Result<Graph> {
    GeneratorSpec::small_world(n, z, mu, rng_seed).check()?;
    let mut rng = rng_from_seed(rng_seed);
    let half = z / 2;
    let mut edges = Vec::with_capacity(n * half);
    for j in 1..=half {
        for i in 0..n {
            edges.push((i, (i + j) % n));
        }
    }
    let mut present: HashSet<(usize, usize)> = edges.iter().map(|&(a, b)| canon(a, b)).collect();
    for edge in edges.iter_mut() {
        if !rng.random_bool(mu) {
            continue;
        }
        let (source, old) = *edge;
        for _ in 0..REWIRE_RETRIES {
            let target = rng.random_range(0..n);
            if target == source || present.contains(&canon(source, target)) {
                continue;
            }
            present.remove(&canon(source, old));
            present.insert(canon(source, target));
            *edge = (source, target);
            break;
        }
    }
    let canonical = edges.into_iter().map(|(a, b)| canon(a, b)).collect();
    Ok(Graph::build(n, canonical))
}

fn canon(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Draws `n` i.i.d. degrees from `Pr(k) ∝ k^-alpha` on `[kmin, n-1]`, then makes
/// the sum even by adding one to a uniformly chosen node that is below the cap.
pub fn draw_power_law_degrees(n: usize, alpha: f64, kmin: usize, rng: &mut StreamRng) -> Result<Vec<usize>> {
    GeneratorSpec::config_power_law(n, alpha, kmin, 0).check()?;
    let support: Vec<usize> = (kmin..n).collect();
    let weights: Vec<f64> = support.iter().map(|&k| (k as f64).powf(-alpha)).collect();
    let law = WeightedIndex::new(&weights).map_err(|e| Error::Parameter(e.to_string()))?;
    let mut degrees: Vec<usize> = (0..n).map(|_| support[law.sample(rng)]).collect();
    if degrees.iter().sum::<usize>() % 2 == 1 {
        // an odd sum forces some node below n-1, since n(n-1) is even
        let open: Vec<usize> = (0..n).filter(|&u| degrees[u] < n - 1).collect();
        let pick = open[rng.random_range(0..open.len())];
        degrees[pick] += 1;
    }
    Ok(degrees)
}

/// Stub matching for a fixed degree sequence. Nodes are taken in order of
/// decreasing degree and each of their open stubs is joined to a stub drawn
/// uniformly from the open stubs of the other nodes, rejecting self-loops and
/// duplicates. The whole pairing restarts if a node is left with no valid partner.
pub fn configuration_model(degrees: &[usize], rng: &mut StreamRng) -> Result<Graph> {
    let n = degrees.len();
    if degrees.iter().sum::<usize>() % 2 == 1 {
        return Err(Error::Parameter("degree sum must be even".into()));
    }
    if let Some(&d) = degrees.iter().find(|&&d| d >= n.max(1)) {
        return Err(Error::Parameter(format!("degree {d} exceeds n - 1 = {}", n.saturating_sub(1))));
    }
    for attempt in 0..=MAX_RESTARTS {
        if let Some(edges) = pair_stubs(degrees, rng) {
            if attempt > 0 {
                log::debug!("configuration model needed {attempt} restarts");
            }
            return Ok(Graph::build(n, edges));
        }
    }
    Err(Error::Generation(format!(
        "configuration model hit an impasse {} times in a row",
        MAX_RESTARTS + 1
    )))
}

/// Fenwick tree over per-node open-stub counts.
struct StubCounts {
    tree: Vec<usize>,
    total: usize,
}

impl StubCounts {
    fn new(counts: &[usize]) -> StubCounts {
        let n = counts.len();
        let mut tree = vec![0; n + 1];
        for (i, &c) in counts.iter().enumerate() {
            let mut j = i + 1;
            while j <= n {
                tree[j] += c;
                j += j & j.wrapping_neg();
            }
        }
        StubCounts { tree, total: counts.iter().sum() }
    }

    fn add(&mut self, i: usize, delta: isize) {
        self.total = (self.total as isize + delta) as usize;
        let mut j = i + 1;
        while j < self.tree.len() {
            self.tree[j] = (self.tree[j] as isize + delta) as usize;
            j += j & j.wrapping_neg();
        }
    }

    /// Node owning the `r`-th open stub.
    fn find(&self, mut r: usize) -> usize {
        let mut pos = 0;
        let mut step = (self.tree.len() - 1).next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= r {
                r -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        pos
    }
}

fn pair_stubs(degrees: &[usize], rng: &mut StreamRng) -> Option<Vec<(usize, usize)>> {
    let n = degrees.len();
    let mut open = degrees.to_vec();
    let mut counts = StubCounts::new(&open);
    let mut present: HashSet<(usize, usize)> = HashSet::with_capacity(counts.total / 2);
    let mut edges = Vec::with_capacity(counts.total / 2);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| degrees[b].cmp(&degrees[a]).then(a.cmp(&b)));
    for &u in &order {
        if open[u] == 0 {
            continue;
        }
        counts.add(u, -(open[u] as isize));
        let mut failures = 0usize;
        while open[u] > 0 {
            if counts.total == 0 {
                return None;
            }
            let v = counts.find(rng.random_range(0..counts.total));
            let key = canon(u, v);
            let v = if present.contains(&key) {
                failures += 1;
                if failures < STALL_LIMIT {
                    continue;
                }
                failures = 0;
                let valid: Vec<usize> =
                    (0..n).filter(|&w| w != u && open[w] > 0 && !present.contains(&canon(u, w))).collect();
                let stubs: usize = valid.iter().map(|&w| open[w]).sum();
                if stubs == 0 {
                    return None;
                }
                let mut r = rng.random_range(0..stubs);
                *valid
                    .iter()
                    .find(|&&w| {
                        if r < open[w] {
                            true
                        } else {
                            r -= open[w];
                            false
                        }
                    })
                    .unwrap()
            } else {
                v
            };
            present.insert(canon(u, v));
            edges.push(canon(u, v));
            open[u] -= 1;
            open[v] -= 1;
            counts.add(v, -1);
        }
    }
    Some(edges)
}

/// Power-law configuration model: degree draw followed by stub matching on one stream.
pub fn generate_config_power_law(n: usize, alpha: f64, kmin: usize, rng_seed: u64) -> Result<Graph> {
    let mut rng = rng_from_seed(rng_seed);
    let degrees = draw_power_law_degrees(n, alpha, kmin, &mut rng)?;
    configuration_model(&degrees, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{average_clustering, connected_components};

    #[test]
    fn er_forced_edge() {
        let g = generate_er(2, 1.0, 5).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
    }

    #[test]
    fn er_edge_count_statistics() {
        let n = 1000;
        let p = 3.0 / 999.0;
        let sigma = (1500.0f64 * (1.0 - p)).sqrt();
        for seed in 0..5 {
            let g = generate_er(n, 3.0, seed).unwrap();
            g.assert_invariants();
            let e = g.edge_count() as f64;
            assert!((e - 1500.0).abs() <= 4.0 * sigma, "seed {seed}: {e} edges");
        }
    }

    #[test]
    fn er_mean_degree_large_n() {
        let g = generate_er(10_000, 3.0, 11).unwrap();
        let mean = 2.0 * g.edge_count() as f64 / 10_000.0;
        assert!((mean - 3.0).abs() / 3.0 < 0.02, "mean degree {mean}");
        assert!(connected_components(&g)[0].len() > 5_000);
    }

    #[test]
    fn er_rejects_bad_parameters() {
        assert!(generate_er(1, 0.5, 0).is_err());
        assert!(generate_er(10, 0.0, 0).is_err());
        assert!(generate_er(10, 9.5, 0).is_err());
    }

    #[test]
    fn er_is_reproducible() {
        assert_eq!(generate_er(500, 3.0, 9).unwrap(), generate_er(500, 3.0, 9).unwrap());
        assert_ne!(generate_er(500, 3.0, 9).unwrap(), generate_er(500, 3.0, 10).unwrap());
    }

    #[test]
    fn small_world_without_rewiring_is_the_ring_lattice() {
        let g = generate_small_world(8, 4, 0.0, 1).unwrap();
        assert!(g.degrees().iter().all(|&d| d == 4));
        for i in 0..8 {
            assert!(g.has_edge(i, (i + 1) % 8));
            assert!(g.has_edge(i, (i + 2) % 8));
        }
    }

    #[test]
    fn small_world_rewired_keeps_edge_count() {
        for (mu, seed) in [(0.2, 3), (0.5, 4), (1.0, 5)] {
            let g = generate_small_world(1000, 4, mu, seed).unwrap();
            g.assert_invariants();
            assert_eq!(g.edge_count(), 2000);
            assert!(g.degrees().iter().all(|&d| d >= 2));
        }
    }

    #[test]
    fn small_world_full_rewiring_loses_clustering() {
        let lattice = generate_small_world(1000, 4, 0.0, 2).unwrap();
        assert!(average_clustering(&lattice) > 0.4);
        let random = generate_small_world(1000, 4, 1.0, 2).unwrap();
        assert!(average_clustering(&random) < 0.05);
    }

    #[test]
    fn small_world_rejects_bad_parameters() {
        assert!(generate_small_world(10, 3, 0.1, 0).is_err());
        assert!(generate_small_world(10, 10, 0.1, 0).is_err());
        assert!(generate_small_world(10, 4, 1.5, 0).is_err());
    }

    #[test]
    fn config_model_degenerate_support_is_k4() {
        let g = generate_config_power_law(4, 2.5, 3, 17).unwrap();
        assert_eq!(g.edge_count(), 6);
        assert!(g.degrees().iter().all(|&d| d == 3));
    }

    #[test]
    fn config_model_realizes_drawn_degrees() {
        for seed in 0..4 {
            let mut rng = rng_from_seed(seed);
            let drawn = draw_power_law_degrees(2000, 2.5, 4, &mut rng).unwrap();
            let g = generate_config_power_law(2000, 2.5, 4, seed).unwrap();
            g.assert_invariants();
            assert_eq!(g.degrees(), drawn);
        }
    }

    #[test]
    fn config_model_mean_degree_matches_truncated_law() {
        let n = 10_000;
        let (alpha, kmin) = (2.5, 4usize);
        let (mut num, mut den) = (0.0, 0.0);
        for k in kmin..n {
            let w = (k as f64).powf(-alpha);
            num += k as f64 * w;
            den += w;
        }
        let analytic = num / den;
        let g = generate_config_power_law(n, alpha, kmin, 21).unwrap();
        let sample = 2.0 * g.edge_count() as f64 / n as f64;
        assert!((sample - analytic).abs() / analytic < 0.05, "{sample} vs {analytic}");
    }

    #[test]
    fn config_model_rejects_bad_parameters() {
        assert!(generate_config_power_law(10, 1.0, 2, 0).is_err());
        assert!(generate_config_power_law(10, 2.5, 0, 0).is_err());
        assert!(generate_config_power_law(10, 2.5, 10, 0).is_err());
        let mut rng = rng_from_seed(0);
        assert!(configuration_model(&[1, 1, 1], &mut rng).is_err());
    }

    #[test]
    fn infeasible_sequence_exhausts_restarts() {
        // two nodes of degree 3 and two of degree 1 cannot form a simple graph
        let mut rng = rng_from_seed(0);
        match configuration_model(&[3, 3, 1, 1], &mut rng) {
            Err(Error::Generation(_)) => {}
            other => panic!("expected generation error, got {other:?}"),
        }
    }

    #[test]
    fn spec_round_trips_through_json() {
        let spec = GeneratorSpec::small_world(100, 4, 0.2, 8);
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"family\":\"small_world\""));
        let back: GeneratorSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }
}
