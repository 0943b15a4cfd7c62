//! Single realizations of independent-cascade spreading.
//!
//! Two equivalent pictures are supported. In the dynamic picture every newly
//! influenced node gets one attempt at each neighbor and then goes quiet. In
//! the static picture every edge is declared open or closed up front and the
//! influenced set is the union of the open clusters that contain a seed.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DisjointSet, Graph};
use crate::rng::{rng_from_seed, StreamRng};

const TRUNCATION_DRAWS: usize = 10_000;
/// Below this p, open edges are found by geometric skipping instead of one draw per edge.
const SKIP_BELOW: f64 = 0.15;
const TWO_POW_64: f64 = 18_446_744_073_709_551_616.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Picture {
    Dynamic,
    #[default]
    Static,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CascadeParams {
    /// Uniform contagion probability. Ignored on edges that carry their own.
    pub p: f64,
    /// Spread of per-edge probabilities around `p`; zero means the uniform model.
    #[serde(default)]
    pub noise_sigma: f64,
    #[serde(default)]
    pub picture: Picture,
    #[serde(default)]
    pub rng_seed: u64,
}

impl CascadeParams {
    pub fn new(p: f64) -> Self {
        CascadeParams { p, noise_sigma: 0.0, picture: Picture::Static, rng_seed: 0 }
    }

    pub fn with_seed(mut self, rng_seed: u64) -> Self {
        self.rng_seed = rng_seed;
        self
    }

    pub fn with_picture(mut self, picture: Picture) -> Self {
        self.picture = picture;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::Parameter(format!("p = {} outside [0, 1]", self.p)));
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(Error::Parameter(format!("noise_sigma = {} is negative", self.noise_sigma)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CascadeOutcome {
    /// Influenced nodes in ascending order, seeds included.
    pub influenced: Vec<usize>,
    pub influenced_count: usize,
    /// Rounds until no new activation (dynamic picture only).
    pub steps: Option<usize>,
    /// Largest open cluster of the realization (static picture only).
    pub largest_cluster_size: Option<usize>,
}

pub(crate) fn validate_seeds(g: &Graph, seeds: &[usize]) -> Result<()> {
    if seeds.is_empty() {
        return Err(Error::Input("seed set is empty".into()));
    }
    if let Some(&bad) = seeds.iter().find(|&&s| s >= g.node_count()) {
        return Err(Error::Input(format!("seed {bad} out of range for n = {}", g.node_count())));
    }
    Ok(())
}

pub fn run(g: &Graph, seeds: &[usize], params: &CascadeParams) -> Result<CascadeOutcome> {
    match params.picture {
        Picture::Dynamic => run_dynamic(g, seeds, params),
        Picture::Static => run_static(g, seeds, params),
    }
}

pub fn run_dynamic(g: &Graph, seeds: &[usize], params: &CascadeParams) -> Result<CascadeOutcome> {
    params.validate()?;
    validate_seeds(g, seeds)?;
    let mut rng = rng_from_seed(params.rng_seed);
    let mut spread = DynamicSpread::new(g.node_count());
    let (count, steps) = spread.run(g, seeds, params.p, &mut rng);
    let mut influenced = spread.influenced.clone();
    influenced.sort_unstable();
    Ok(CascadeOutcome {
        influenced,
        influenced_count: count,
        steps: Some(steps),
        largest_cluster_size: None,
    })
}

pub fn run_static(g: &Graph, seeds: &[usize], params: &CascadeParams) -> Result<CascadeOutcome> {
    params.validate()?;
    validate_seeds(g, seeds)?;
    let mut rng = rng_from_seed(params.rng_seed);
    let mut perc = Percolation::new(g.node_count());
    perc.sample(g, params.p, &mut rng);
    let mut roots: Vec<usize> = seeds.iter().map(|&s| perc.root(s)).collect();
    roots.sort_unstable();
    roots.dedup();
    let influenced: Vec<usize> = (0..g.node_count())
        .filter(|&u| roots.binary_search(&perc.root(u)).is_ok())
        .collect();
    Ok(CascadeOutcome {
        influenced_count: influenced.len(),
        influenced,
        steps: None,
        largest_cluster_size: Some(perc.largest_cluster_size()),
    })
}

/// Draws a fixed contagion probability per edge from `Normal(p, sigma^2)`
/// truncated to `[0, 1]` by re-drawing.
pub fn sample_edge_probabilities(g: &Graph, p: f64, noise_sigma: f64, rng_seed: u64) -> Result<Graph> {
    CascadeParams { p, noise_sigma, picture: Picture::Static, rng_seed }.validate()?;
    let mut rng = rng_from_seed(rng_seed);
    let probabilities = if noise_sigma == 0.0 {
        vec![p; g.edge_count()]
    } else {
        let normal = Normal::new(p, noise_sigma).map_err(|e| Error::Parameter(e.to_string()))?;
        (0..g.edge_count())
            .map(|_| truncated_draw(&normal, &mut rng))
            .collect()
    };
    g.clone().with_edge_probabilities(probabilities)
}

fn truncated_draw(normal: &Normal<f64>, rng: &mut StreamRng) -> f64 {
    for _ in 0..TRUNCATION_DRAWS {
        let x = normal.sample(rng);
        if (0.0..=1.0).contains(&x) {
            return x;
        }
    }
    // an extremely wide truncated Gaussian is flat on [0, 1]
    rng.random::<f64>()
}

/// Reusable static-picture realization: a disjoint-set forest over the open edges.
#[derive(Clone, Debug)]
pub struct Percolation {
    sets: DisjointSet,
    marks: Vec<bool>,
    touched: Vec<usize>,
}

impl Percolation {
    pub fn new(n: usize) -> Self {
        Percolation { sets: DisjointSet::new(n), marks: vec![false; n], touched: Vec::new() }
    }

    /// Opens each edge independently, with its own probability when the graph
    /// carries them and with `p` otherwise.
    pub fn sample<R: Rng>(&mut self, g: &Graph, p: f64, rng: &mut R) {
        debug_assert_eq!(g.node_count(), self.sets.len());
        self.sets.reset();
        let edges = g.edges();
        if let Some(probabilities) = g.edge_probabilities() {
            for (&(u, v), &q) in edges.iter().zip(probabilities) {
                if rng.random::<f64>() < q {
                    self.sets.union(u, v);
                }
            }
            return;
        }
        if p <= 0.0 {
            return;
        }
        if p >= 1.0 {
            for &(u, v) in edges {
                self.sets.union(u, v);
            }
            return;
        }
        if p >= SKIP_BELOW {
            let threshold = (p * TWO_POW_64) as u64;
            for &(u, v) in edges {
                if rng.next_u64() < threshold {
                    self.sets.union(u, v);
                }
            }
            return;
        }
        // sparse regime: jump straight to the next open edge
        let log_q = (1.0 - p).ln();
        let m = edges.len() as f64;
        let mut idx: f64 = -1.0;
        loop {
            let r: f64 = rng.random();
            idx += 1.0 + ((1.0 - r).ln() / log_q).floor();
            if idx >= m {
                break;
            }
            let (u, v) = edges[idx as usize];
            self.sets.union(u, v);
        }
    }

    pub fn root(&mut self, u: usize) -> usize {
        self.sets.find(u)
    }

    pub fn cluster_size(&mut self, u: usize) -> usize {
        self.sets.set_size(u)
    }

    /// Number of nodes in the union of the clusters containing `seeds`.
    pub fn coverage(&mut self, seeds: &[usize]) -> usize {
        let mut total = 0;
        for &s in seeds {
            let r = self.sets.find(s);
            if !self.marks[r] {
                self.marks[r] = true;
                self.touched.push(r);
                total += self.sets.root_size(r);
            }
        }
        for r in self.touched.drain(..) {
            self.marks[r] = false;
        }
        total
    }

    pub fn largest_cluster_size(&self) -> usize {
        self.sets.largest_set_size()
    }

    /// Mean size of the cluster holding a uniformly chosen node, `Σ s² / n`.
    pub fn mean_cluster_size(&self) -> f64 {
        let n = self.sets.len();
        if n == 0 {
            return 0.0;
        }
        let sum_sq: f64 = (0..n)
            .filter(|&x| self.sets.is_root(x))
            .map(|x| (self.sets.root_size(x) as f64).powi(2))
            .sum();
        sum_sq / n as f64
    }

    pub fn sets(&mut self) -> &mut DisjointSet {
        &mut self.sets
    }
}

/// Reusable dynamic-picture simulator.
#[derive(Clone, Debug)]
pub struct DynamicSpread {
    active: Vec<bool>,
    frontier: Vec<usize>,
    next: Vec<usize>,
    pub(crate) influenced: Vec<usize>,
}

impl DynamicSpread {
    pub fn new(n: usize) -> Self {
        DynamicSpread { active: vec![false; n], frontier: Vec::new(), next: Vec::new(), influenced: Vec::new() }
    }

    /// Returns `(influenced_count, rounds)`. Round 0 activates the seeds and is
    /// not counted; every later round that activates someone is.
    pub fn run<R: Rng>(&mut self, g: &Graph, seeds: &[usize], p: f64, rng: &mut R) -> (usize, usize) {
        for u in self.influenced.drain(..) {
            self.active[u] = false;
        }
        self.frontier.clear();
        for &s in seeds {
            if !self.active[s] {
                self.active[s] = true;
                self.influenced.push(s);
                self.frontier.push(s);
            }
        }
        let probabilities = g.edge_probabilities();
        let mut rounds = 0;
        while !self.frontier.is_empty() {
            self.next.clear();
            for &u in &self.frontier {
                for (&v, &e) in g.neighbors(u).iter().zip(g.incident_edges(u)) {
                    if self.active[v] {
                        continue;
                    }
                    let q = probabilities.map_or(p, |ps| ps[e]);
                    if rng.random::<f64>() < q {
                        self.active[v] = true;
                        self.influenced.push(v);
                        self.next.push(v);
                    }
                }
            }
            if !self.next.is_empty() {
                rounds += 1;
            }
            std::mem::swap(&mut self.frontier, &mut self.next);
        }
        (self.influenced.len(), rounds)
    }
}
