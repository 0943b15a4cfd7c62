//! Monte-Carlo influence estimates and exact enumeration on tiny graphs.

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cascade::{validate_seeds, CascadeParams, DynamicSpread, Percolation, Picture};
use crate::error::{Error, Result};
use crate::graph::{DisjointSet, Graph};
use crate::rng::{derive, rng_from_seed, tag, trial_rng};

/// Enumeration is over all `2^E` open/closed edge patterns.
pub const EXACT_EDGE_LIMIT: usize = 25;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfluenceEstimate {
    /// Lower median of the per-trial influence counts.
    pub median: usize,
    pub mean: f64,
    /// Standard error of the mean (sample standard deviation over √trials).
    pub std_error: f64,
    pub trials: usize,
    /// Counts of each influence size, when retained.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub histogram: Option<Vec<u64>>,
}

impl InfluenceEstimate {
    /// Summarizes a histogram where `histogram[s]` counts trials with influence `s`.
    pub fn from_histogram(histogram: Vec<u64>, keep: bool) -> InfluenceEstimate {
        let trials: u64 = histogram.iter().sum();
        assert!(trials > 0, "empty histogram");
        let lower_median_rank = (trials - 1) / 2;
        let mut running = 0u64;
        let mut median = 0;
        for (size, &count) in histogram.iter().enumerate() {
            running += count;
            if running > lower_median_rank {
                median = size;
                break;
            }
        }
        let t = trials as f64;
        let sum: f64 = histogram.iter().enumerate().map(|(s, &c)| s as f64 * c as f64).sum();
        let mean = sum / t;
        let std_error = if trials > 1 {
            let ss: f64 = histogram
                .iter()
                .enumerate()
                .map(|(s, &c)| c as f64 * (s as f64 - mean).powi(2))
                .sum();
            (ss / (t - 1.0) / t).sqrt()
        } else {
            0.0
        };
        InfluenceEstimate {
            median,
            mean,
            std_error,
            trials: trials as usize,
            histogram: keep.then_some(histogram),
        }
    }

    pub fn samples_kept(&self) -> bool {
        self.histogram.is_some()
    }
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        Err(Error::Input("trials must be at least 1".into()))
    } else {
        Ok(())
    }
}

fn add_histograms(mut a: Vec<Vec<u64>>, b: Vec<Vec<u64>>) -> Vec<Vec<u64>> {
    for (x, y) in a.iter_mut().zip(b) {
        for (p, q) in x.iter_mut().zip(y) {
            *p += q;
        }
    }
    a
}

/// Influence of one seed set over `trials` independent realizations.
///
/// Trial `t` draws from a stream derived from `(params.rng_seed, t)` and the
/// per-worker histograms are summed, so the result does not depend on the
/// number of threads.
pub fn estimate(g: &Graph, seeds: &[usize], params: &CascadeParams, trials: usize) -> Result<InfluenceEstimate> {
    Ok(InfluenceEstimate::from_histogram(influence_histogram(g, seeds, params, trials)?, false))
}

/// Counts of influenced-set sizes: entry `s` is the number of trials that
/// influenced exactly `s` nodes.
pub fn influence_histogram(g: &Graph, seeds: &[usize], params: &CascadeParams, trials: usize) -> Result<Vec<u64>> {
    params.validate()?;
    validate_seeds(g, seeds)?;
    check_trials(trials)?;
    match params.picture {
        Picture::Static => Ok(static_histograms(g, &[seeds.to_vec()], params, trials).pop().unwrap()),
        Picture::Dynamic => {
            let n = g.node_count();
            let hist = (0..trials as u64)
                .into_par_iter()
                .fold(
                    || (DynamicSpread::new(n), vec![0u64; n + 1]),
                    |(mut spread, mut hist), t| {
                        let (count, _) = spread.run(g, seeds, params.p, &mut trial_rng(params.rng_seed, t));
                        hist[count] += 1;
                        (spread, hist)
                    },
                )
                .map(|(_, h)| vec![h])
                .reduce(|| vec![vec![0u64; n + 1]], add_histograms);
            Ok(hist.into_iter().next().unwrap())
        }
    }
}

/// Estimates several seed sets on shared static-picture realizations.
///
/// Each realization is one union-find pass; every set's influence in it is the
/// size of the union of its seeds' clusters.
pub fn estimate_sets(
    g: &Graph,
    sets: &[Vec<usize>],
    params: &CascadeParams,
    trials: usize,
) -> Result<Vec<InfluenceEstimate>> {
    params.validate()?;
    check_trials(trials)?;
    for s in sets {
        validate_seeds(g, s)?;
    }
    Ok(static_histograms(g, sets, params, trials)
        .into_iter()
        .map(|h| InfluenceEstimate::from_histogram(h, false))
        .collect())
}

/// Like [`estimate_sets`], and on the same realizations also scores the
/// random-choice strategy: each trial draws a fresh uniform `k`-set.
pub fn estimate_sets_and_random_choice(
    g: &Graph,
    sets: &[Vec<usize>],
    k: usize,
    params: &CascadeParams,
    trials: usize,
) -> Result<(Vec<InfluenceEstimate>, InfluenceEstimate)> {
    params.validate()?;
    check_trials(trials)?;
    let n = g.node_count();
    if k == 0 || k > n {
        return Err(Error::Input(format!("k = {k} must satisfy 1 <= k <= n = {n}")));
    }
    for s in sets {
        validate_seeds(g, s)?;
    }
    let mut hists = histograms(g, sets, Some(k), params, trials);
    let random = InfluenceEstimate::from_histogram(hists.pop().unwrap(), false);
    let fixed = hists.into_iter().map(|h| InfluenceEstimate::from_histogram(h, false)).collect();
    Ok((fixed, random))
}

fn static_histograms(g: &Graph, sets: &[Vec<usize>], params: &CascadeParams, trials: usize) -> Vec<Vec<u64>> {
    histograms(g, sets, None, params, trials)
}

/// One histogram per set, plus a trailing one for fresh random `k`-sets when
/// `random_k` is given. Random sets come from their own stream so the
/// realizations match [`estimate_sets`] exactly.
fn histograms(
    g: &Graph,
    sets: &[Vec<usize>],
    random_k: Option<usize>,
    params: &CascadeParams,
    trials: usize,
) -> Vec<Vec<u64>> {
    let n = g.node_count();
    let count = sets.len() + random_k.is_some() as usize;
    let empty = || vec![vec![0u64; n + 1]; count];
    let random_seed = derive(params.rng_seed, &[tag::RANDOM_SEEDS]);
    (0..trials as u64)
        .into_par_iter()
        .fold(
            || (Percolation::new(n), empty()),
            |(mut perc, mut hists), t| {
                perc.sample(g, params.p, &mut trial_rng(params.rng_seed, t));
                for (hist, seeds) in hists.iter_mut().zip(sets) {
                    hist[perc.coverage(seeds)] += 1;
                }
                if let Some(k) = random_k {
                    let seeds = sample(&mut trial_rng(random_seed, t), n, k).into_vec();
                    hists[sets.len()][perc.coverage(&seeds)] += 1;
                }
                (perc, hists)
            },
        )
        .map(|(_, h)| h)
        .reduce(empty, add_histograms)
}

/// Influence of the random-choice strategy: every trial draws a fresh uniform
/// `k`-set and a fresh realization.
pub fn estimate_random_choice(g: &Graph, k: usize, params: &CascadeParams, trials: usize) -> Result<InfluenceEstimate> {
    params.validate()?;
    check_trials(trials)?;
    let n = g.node_count();
    if k == 0 || k > n {
        return Err(Error::Input(format!("k = {k} must satisfy 1 <= k <= n = {n}")));
    }
    let hist = (0..trials as u64)
        .into_par_iter()
        .fold(
            || (Percolation::new(n), vec![0u64; n + 1]),
            |(mut perc, mut hist), t| {
                let mut rng = trial_rng(params.rng_seed, t);
                let seeds = sample(&mut rng, n, k).into_vec();
                perc.sample(g, params.p, &mut rng);
                hist[perc.coverage(&seeds)] += 1;
                (perc, hist)
            },
        )
        .map(|(_, h)| vec![h])
        .reduce(|| vec![vec![0u64; n + 1]], add_histograms);
    Ok(InfluenceEstimate::from_histogram(hist.into_iter().next().unwrap(), false))
}

/// Calls `visit(weight, sets)` for every open/closed edge pattern, where the
/// weight is `p^open (1-p)^closed` and `sets` holds the open clusters.
fn enumerate_patterns(g: &Graph, p: f64, mut visit: impl FnMut(f64, &mut DisjointSet)) -> Result<()> {
    let e = g.edge_count();
    if e > EXACT_EDGE_LIMIT {
        return Err(Error::Budget { edges: e, limit: EXACT_EDGE_LIMIT });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter(format!("p = {p} outside [0, 1]")));
    }
    let open_pow: Vec<f64> = (0..=e).map(|j| p.powi(j as i32)).collect();
    let closed_pow: Vec<f64> = (0..=e).map(|j| (1.0 - p).powi(j as i32)).collect();
    let mut sets = DisjointSet::new(g.node_count());
    for mask in 0u64..(1u64 << e) {
        let open = mask.count_ones() as usize;
        let weight = open_pow[open] * closed_pow[e - open];
        if weight == 0.0 {
            continue;
        }
        sets.reset();
        for (i, &(u, v)) in g.edges().iter().enumerate() {
            if mask >> i & 1 == 1 {
                sets.union(u, v);
            }
        }
        visit(weight, &mut sets);
    }
    Ok(())
}

fn seed_coverage(sets: &mut DisjointSet, seeds: &[usize], roots: &mut Vec<usize>) -> usize {
    roots.clear();
    roots.extend(seeds.iter().map(|&s| sets.find(s)));
    roots.sort_unstable();
    roots.dedup();
    roots.iter().map(|&r| sets.root_size(r)).sum()
}

/// Expected influence under uniform `p`, by summing over every edge pattern.
/// Per-edge probabilities attached to the graph are not used.
pub fn exact_influence(g: &Graph, seeds: &[usize], p: f64) -> Result<f64> {
    validate_seeds(g, seeds)?;
    let mut total = 0.0;
    let mut roots = Vec::new();
    enumerate_patterns(g, p, |w, sets| total += w * seed_coverage(sets, seeds, &mut roots) as f64)?;
    Ok(total)
}

/// Exact law of the influence count: entry `s` is `Pr(influence = s)`.
pub fn exact_distribution(g: &Graph, seeds: &[usize], p: f64) -> Result<Vec<f64>> {
    validate_seeds(g, seeds)?;
    let mut law = vec![0.0; g.node_count() + 1];
    let mut roots = Vec::new();
    enumerate_patterns(g, p, |w, sets| law[seed_coverage(sets, seeds, &mut roots)] += w)?;
    Ok(law)
}

/// Exact expected influence of every single node, in one enumeration pass.
pub fn exact_single_node_influences(g: &Graph, p: f64) -> Result<Vec<f64>> {
    let n = g.node_count();
    let mut totals = vec![0.0; n];
    enumerate_patterns(g, p, |w, sets| {
        for (u, t) in totals.iter_mut().enumerate() {
            *t += w * sets.set_size(u) as f64;
        }
    })?;
    Ok(totals)
}

/// Index of the largest value, treating values within a relative `1e-12` as
/// tied and breaking ties by smallest index.
pub(crate) fn argmax_with_ties(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            None => best = Some(i),
            Some(b) => {
                let bv = values[b];
                if v > bv && (bv == f64::NEG_INFINITY || v > bv + 1e-12 * bv.abs().max(1.0)) {
                    best = Some(i);
                }
            }
        }
    }
    best
}

/// The single seed with the largest exact expected influence.
pub fn best_single_node_exact(g: &Graph, p: f64) -> Result<usize> {
    if g.node_count() == 0 {
        return Err(Error::Input("graph has no nodes".into()));
    }
    let values = exact_single_node_influences(g, p)?;
    Ok(argmax_with_ties(&values).unwrap())
}

/// One comparison of a Monte-Carlo mean against the exact expectation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleCase {
    pub graph: usize,
    pub nodes: usize,
    pub edges: usize,
    pub seeds: Vec<usize>,
    pub p: f64,
    pub exact: f64,
    pub mean: f64,
    pub std_error: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleReport {
    pub trials: usize,
    pub tolerance_se: f64,
    pub passed: usize,
    pub failed: usize,
    pub cases: Vec<OracleCase>,
}

impl OracleReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

pub const ORACLE_PROBABILITIES: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

/// Random simple graph with `3..=max_nodes` nodes and `1..=max_edges` edges.
pub fn random_small_graph<R: Rng>(rng: &mut R, max_nodes: usize, max_edges: usize) -> Graph {
    let n = rng.random_range(3..=max_nodes.max(3));
    let all_pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let m = rng.random_range(1..=max_edges.min(all_pairs.len()));
    let mut chosen: Vec<(usize, usize)> = sample(rng, all_pairs.len(), m).into_iter().map(|i| all_pairs[i]).collect();
    chosen.sort_unstable();
    Graph::build(n, chosen)
}

/// Compares static-picture Monte-Carlo means against exact enumeration on
/// `graphs` random graphs (n ≤ 10, E ≤ 14), one seed set of size 1–3 per
/// graph, at each of [`ORACLE_PROBABILITIES`].
pub fn oracle_agreement_suite(graphs: usize, trials: usize, rng_seed: u64) -> Result<OracleReport> {
    const TOLERANCE_SE: f64 = 3.0;
    let mut cases = Vec::new();
    for gi in 0..graphs {
        let mut rng = rng_from_seed(derive(rng_seed, &[gi as u64]));
        let g = random_small_graph(&mut rng, 10, 14);
        let k = rng.random_range(1..=3usize.min(g.node_count()));
        let mut seeds = sample(&mut rng, g.node_count(), k).into_vec();
        seeds.sort_unstable();
        for (pi, &p) in ORACLE_PROBABILITIES.iter().enumerate() {
            let params = CascadeParams::new(p).with_seed(derive(rng_seed, &[gi as u64, pi as u64, 1]));
            let est = estimate(&g, &seeds, &params, trials)?;
            let exact = exact_influence(&g, &seeds, p)?;
            let passed = if est.std_error == 0.0 {
                (est.mean - exact).abs() < 1e-9
            } else {
                (est.mean - exact).abs() <= TOLERANCE_SE * est.std_error
            };
            cases.push(OracleCase {
                graph: gi,
                nodes: g.node_count(),
                edges: g.edge_count(),
                seeds: seeds.clone(),
                p,
                exact,
                mean: est.mean,
                std_error: est.std_error,
                passed,
            });
        }
    }
    let passed = cases.iter().filter(|c| c.passed).count();
    Ok(OracleReport { trials, tolerance_se: TOLERANCE_SE, passed, failed: cases.len() - passed, cases })
}
