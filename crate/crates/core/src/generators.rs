//! Random network models: Erdős–Rényi, Barabási–Albert, Watts–Strogatz and Waxman.
//!
//! All generators are pure functions of their parameters and a 64-bit
//! seed; see [`crate::rng`] for how seeds are derived in batch runs.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::graph::{Coordinates, Graph};
use crate::rng::{rng_from_seed, Rng};

/// Mean degree the model defaults are tuned to.
pub const TARGET_MEAN_DEGREE: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Ba,
    Er,
    Ws,
    Wax,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Ba, ModelKind::Er, ModelKind::Ws, ModelKind::Wax];

    pub fn tag(self) -> &'static str {
        match self {
            ModelKind::Ba => "BA",
            ModelKind::Er => "ER",
            ModelKind::Ws => "WS",
            ModelKind::Wax => "WAX",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ba" => Ok(ModelKind::Ba),
            "er" => Ok(ModelKind::Er),
            "ws" => Ok(ModelKind::Ws),
            "wax" | "waxman" => Ok(ModelKind::Wax),
            other => Err(format!("unknown model '{other}' (expected ba, er, ws or wax)")),
        }
    }
}

/// Parameters of one network model, without the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelParams {
    Er { n: usize, p: f64 },
    Ba { n: usize, m: usize },
    Ws { n: usize, k_ring: usize, p: f64 },
    /// Nodes uniform in the square `[0, side]^2`.
    Wax { n: usize, alpha: f64, beta: f64, side: f64 },
}

/// A generated instance; `coordinates` is set for spatial models only.
#[derive(Debug, Clone)]
pub struct Generated {
    pub graph: Graph,
    pub coordinates: Option<Coordinates>,
}

impl ModelParams {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelParams::Er { .. } => ModelKind::Er,
            ModelParams::Ba { .. } => ModelKind::Ba,
            ModelParams::Ws { .. } => ModelKind::Ws,
            ModelParams::Wax { .. } => ModelKind::Wax,
        }
    }

    pub fn tag(&self) -> &'static str {
        self.kind().tag()
    }

    pub fn n(&self) -> usize {
        match *self {
            ModelParams::Er { n, .. }
            | ModelParams::Ba { n, .. }
            | ModelParams::Ws { n, .. }
            | ModelParams::Wax { n, .. } => n,
        }
    }

    /// The four models at N = 1000 with mean degree near 6.
    pub fn paper_defaults() -> Vec<ModelParams> {
        let n = 1000;
        let (alpha, beta) = (0.014, 0.2);
        let side = waxman_side_for_mean_degree(n, alpha, beta, TARGET_MEAN_DEGREE)
            .expect("default Waxman parameters admit mean degree 6");
        vec![
            ModelParams::Ba { n, m: 3 },
            ModelParams::Er { n, p: 0.006 },
            ModelParams::Ws { n, k_ring: 6, p: 0.4 },
            ModelParams::Wax { n, alpha, beta, side },
        ]
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        match *self {
            ModelParams::Er { n, p } => {
                check(n >= 2, "ER needs n >= 2")?;
                check_probability(p)
            }
            ModelParams::Ba { n, m } => check(m >= 1 && n > m, "BA needs n > m >= 1"),
            ModelParams::Ws { n, k_ring, p } => {
                check(
                    k_ring >= 2 && k_ring % 2 == 0 && k_ring < n,
                    "WS needs an even k_ring with 2 <= k_ring < n",
                )?;
                check_probability(p)
            }
            ModelParams::Wax {
                n,
                alpha,
                beta,
                side,
            } => {
                check(n >= 1, "Waxman needs n >= 1")?;
                check(alpha > 0.0 && beta > 0.0, "Waxman needs alpha, beta > 0")?;
                check(side > 0.0 && side <= 1.0, "Waxman side must lie in (0, 1]")
            }
        }
    }

    pub fn generate(&self, seed: u64) -> Result<Generated, GraphError> {
        let (graph, coordinates) = match *self {
            ModelParams::Er { n, p } => (gen_er(n, p, seed)?, None),
            ModelParams::Ba { n, m } => (gen_ba(n, m, seed)?, None),
            ModelParams::Ws { n, k_ring, p } => (gen_ws(n, k_ring, p, seed)?, None),
            ModelParams::Wax {
                n,
                alpha,
                beta,
                side,
            } => {
                let (g, c) = gen_wax_in_square(n, alpha, beta, side, seed)?;
                (g, Some(c))
            }
        };
        Ok(Generated { graph, coordinates })
    }
}

fn check(cond: bool, msg: &str) -> Result<(), GraphError> {
    if cond {
        Ok(())
    } else {
        Err(GraphError::BadParams(msg.to_string()))
    }
}

fn check_probability(p: f64) -> Result<(), GraphError> {
    check((0.0..=1.0).contains(&p), "probability must lie in [0, 1]")
}

fn into_graph(sets: Vec<BTreeSet<usize>>) -> Graph {
    Graph::from_sorted_adjacency(sets.into_iter().map(|s| s.into_iter().collect()).collect())
}

/// G(n, p): every pair joined independently with probability `p`.
pub fn gen_er(n: usize, p: f64, seed: u64) -> Result<Graph, GraphError> {
    ModelParams::Er { n, p }.validate()?;
    let mut rng = rng_from_seed(seed);
    let mut adjacency = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
        }
    }
    // pairs were visited in (i, j) lexicographic order, so lists are already sorted
    Ok(Graph::from_sorted_adjacency(adjacency))
}

/// Preferential attachment grown from a clique of `m + 1` nodes.
///
/// Each new node draws `m` distinct targets; each draw picks an existing
/// node with probability proportional to its degree before the new node
/// arrived, conditioned on not having been drawn already.
pub fn gen_ba(n: usize, m: usize, seed: u64) -> Result<Graph, GraphError> {
    ModelParams::Ba { n, m }.validate()?;
    let mut rng = rng_from_seed(seed);
    let core = m + 1;
    let mut sets = vec![BTreeSet::new(); n];
    // every edge endpoint appears once, so uniform draws are degree-proportional
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * (core * m / 2 + (n - core) * m));
    for i in 0..core {
        for j in (i + 1)..core {
            sets[i].insert(j);
            sets[j].insert(i);
            endpoints.push(i);
            endpoints.push(j);
        }
    }
    let mut targets = Vec::with_capacity(m);
    for new in core..n {
        targets.clear();
        while targets.len() < m {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            sets[new].insert(t);
            sets[t].insert(new);
            endpoints.push(new);
            endpoints.push(t);
        }
    }
    Ok(into_graph(sets))
}

/// Ring lattice of degree `k_ring` with each edge rewired with probability `p`.
///
/// Edges `(i, i + j)` are visited for `j = 1..=k_ring/2` (outer) and
/// `i = 0..n` (inner). A rewired edge keeps `i` and moves its far end to a
/// uniformly drawn node, redrawing on self-loops and duplicates; the edge
/// stays put when `i` is already adjacent to every other node.
pub fn gen_ws(n: usize, k_ring: usize, p: f64, seed: u64) -> Result<Graph, GraphError> {
    ModelParams::Ws { n, k_ring, p }.validate()?;
    let mut rng = rng_from_seed(seed);
    let mut sets = vec![BTreeSet::new(); n];
    for i in 0..n {
        for j in 1..=k_ring / 2 {
            let v = (i + j) % n;
            sets[i].insert(v);
            sets[v].insert(i);
        }
    }
    for j in 1..=k_ring / 2 {
        for i in 0..n {
            let v = (i + j) % n;
            if !sets[i].contains(&v) || rng.random::<f64>() >= p {
                continue;
            }
            if sets[i].len() >= n - 1 {
                continue;
            }
            let w = loop {
                let w = rng.random_range(0..n);
                if w != i && !sets[i].contains(&w) {
                    break w;
                }
            };
            sets[i].remove(&v);
            sets[v].remove(&i);
            sets[i].insert(w);
            sets[w].insert(i);
        }
    }
    Ok(into_graph(sets))
}

/// Waxman graph on the unit square.
pub fn gen_wax(n: usize, alpha: f64, beta: f64, seed: u64) -> Result<(Graph, Coordinates), GraphError> {
    gen_wax_in_square(n, alpha, beta, 1.0, seed)
}

/// Waxman graph on `[0, side]^2`: pair `(i, j)` is joined with probability
/// `min(1, alpha * exp(-d_ij / beta))`, `d_ij` the Euclidean distance.
pub fn gen_wax_in_square(
    n: usize,
    alpha: f64,
    beta: f64,
    side: f64,
    seed: u64,
) -> Result<(Graph, Coordinates), GraphError> {
    ModelParams::Wax {
        n,
        alpha,
        beta,
        side,
    }
    .validate()?;
    let mut rng = rng_from_seed(seed);
    let points: Vec<(f64, f64)> = (0..n)
        .map(|_| (side * rng.random::<f64>(), side * rng.random::<f64>()))
        .collect();
    let mut adjacency = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (dx, dy) = (points[i].0 - points[j].0, points[i].1 - points[j].1);
            let d = dx.hypot(dy);
            if rng.random::<f64>() < waxman_probability(alpha, beta, d) {
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
        }
    }
    Ok((Graph::from_sorted_adjacency(adjacency), Coordinates(points)))
}

pub fn waxman_probability(alpha: f64, beta: f64, distance: f64) -> f64 {
    (alpha * (-distance / beta).exp()).min(1.0)
}

/// Expected mean degree of a Waxman graph on `[0, side]^2`.
///
/// The difference of two uniform points in the square has density
/// `4 (1 - u)(1 - v)` on `[0, 1]^2` after scaling by `side`; the connection
/// probability is integrated against it with composite Simpson's rule.
pub fn waxman_expected_mean_degree(n: usize, alpha: f64, beta: f64, side: f64) -> f64 {
    const INTERVALS: usize = 256;
    let h = 1.0 / INTERVALS as f64;
    let weight = |k: usize| match k {
        0 | INTERVALS => 1.0,
        k if k % 2 == 1 => 4.0,
        _ => 2.0,
    };
    let mut total = 0.0;
    for a in 0..=INTERVALS {
        let u = a as f64 * h;
        let mut row = 0.0;
        for b in 0..=INTERVALS {
            let v = b as f64 * h;
            let d = side * u.hypot(v);
            row += weight(b) * 4.0 * (1.0 - u) * (1.0 - v) * waxman_probability(alpha, beta, d);
        }
        total += weight(a) * row;
    }
    let mean_probability = total * h * h / 9.0;
    (n.saturating_sub(1)) as f64 * mean_probability
}

/// Side length of the square on which the Waxman model has the requested
/// expected mean degree.
pub fn waxman_side_for_mean_degree(
    n: usize,
    alpha: f64,
    beta: f64,
    mean_degree: f64,
) -> Result<f64, GraphError> {
    if !(alpha > 0.0 && beta > 0.0 && mean_degree > 0.0) {
        return Err(GraphError::BadParams("alpha, beta and the target degree must be positive".into()));
    }
    let (mut lo, mut hi) = (1e-9, 1.0);
    if waxman_expected_mean_degree(n, alpha, beta, lo) < mean_degree {
        return Err(GraphError::BadParams(format!(
            "mean degree {mean_degree} is unreachable: alpha * (n - 1) = {}",
            alpha * (n.saturating_sub(1)) as f64
        )));
    }
    if waxman_expected_mean_degree(n, alpha, beta, hi) > mean_degree {
        return Err(GraphError::BadParams(format!(
            "mean degree {mean_degree} needs a square larger than the unit square"
        )));
    }
    // expected degree decreases monotonically with the side length
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if waxman_expected_mean_degree(n, alpha, beta, mid) > mean_degree {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Draws one index with probability proportional to `weights`.
pub(crate) fn weighted_index(weights: &[f64], rng: &mut Rng) -> Option<usize> {
    let total: f64 = weights.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return None;
    }
    let mut target = rng.random::<f64>() * total;
    let mut last = None;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        if target < w {
            return Some(i);
        }
        target -= w;
        last = Some(i);
    }
    last
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn er_extremes() {
        assert_eq!(gen_er(20, 0.0, 1).unwrap().edge_count(), 0);
        assert_eq!(gen_er(20, 1.0, 1).unwrap(), Graph::complete(20));
        assert!(matches!(gen_er(1, 0.5, 1), Err(GraphError::BadParams(_))));
        assert!(matches!(gen_er(10, 1.5, 1), Err(GraphError::BadParams(_))));
    }

    #[test]
    fn ba_small_is_complete() {
        assert_eq!(gen_ba(4, 3, 9).unwrap(), Graph::complete(4));
        assert!(gen_ba(3, 3, 9).is_err());
        assert!(gen_ba(5, 0, 9).is_err());
    }

    #[test]
    fn ba_edge_count_and_connectivity() {
        let (n, m) = (300, 3);
        let g = gen_ba(n, m, 11).unwrap();
        assert_eq!(g.edge_count(), m * (m + 1) / 2 + m * (n - m - 1));
        assert!(g.is_connected());
        assert!(g.degrees().iter().all(|&d| d >= m));
    }

    #[test]
    fn ws_lattice_without_rewiring() {
        let g = gen_ws(20, 4, 0.0, 3).unwrap();
        assert!(g.degrees().iter().all(|&d| d == 4));
        assert!(g.has_edge(0, 19) && g.has_edge(0, 18) && g.has_edge(0, 2));
        assert!(!g.has_edge(0, 3));
    }

    #[test]
    fn ws_rejects_bad_ring() {
        assert!(gen_ws(10, 3, 0.1, 1).is_err());
        assert!(gen_ws(10, 10, 0.1, 1).is_err());
        assert!(gen_ws(10, 0, 0.1, 1).is_err());
    }

    #[test]
    fn ws_keeps_edges_when_saturated() {
        // K5 as a ring lattice: nothing can be rewired
        assert_eq!(gen_ws(5, 4, 1.0, 1).unwrap(), Graph::complete(5));
    }

    #[test]
    fn waxman_limits() {
        let (g, coords) = gen_wax(50, 1e-300, 0.2, 5).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert_eq!(coords.0.len(), 50);
        assert!(coords.0.iter().all(|&(x, y)| (0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y)));
        assert_eq!(waxman_probability(0.5, 0.2, 0.0), 0.5);
        assert_eq!(waxman_probability(3.0, 0.2, 0.0), 1.0);
        assert!(gen_wax(10, 0.0, 0.2, 1).is_err());
    }

    #[test]
    fn expected_degree_constant_kernel() {
        // beta huge: probability is alpha everywhere
        let k = waxman_expected_mean_degree(101, 0.1, 1e12, 1.0);
        assert!((k - 10.0).abs() < 1e-6, "{k}");
    }

    #[test]
    fn expected_degree_matches_monte_carlo() {
        // independent check: average the kernel over random point pairs
        let mut rng = rng_from_seed(99);
        let (alpha, beta, side) = (0.3, 0.15, 0.7);
        let draws = 400_000;
        let mut acc = 0.0;
        for _ in 0..draws {
            let (x1, y1, x2, y2): (f64, f64, f64, f64) = (rng.random(), rng.random(), rng.random(), rng.random());
            acc += waxman_probability(alpha, beta, side * (x1 - x2).hypot(y1 - y2));
        }
        let mc = 99.0 * acc / draws as f64;
        let quad = waxman_expected_mean_degree(100, alpha, beta, side);
        assert!((mc - quad).abs() / quad < 0.01, "mc {mc} quad {quad}");
    }

    #[test]
    fn side_solver_inverts_expected_degree() {
        let side = waxman_side_for_mean_degree(1000, 0.014, 0.2, 6.0).unwrap();
        assert!(side > 0.0 && side < 1.0);
        let k = waxman_expected_mean_degree(1000, 0.014, 0.2, side);
        assert!((k - 6.0).abs() < 1e-6);
        assert!(waxman_side_for_mean_degree(100, 0.014, 0.2, 6.0).is_err());
    }

    #[test]
    fn weighted_index_skips_zero_weights() {
        let mut rng = rng_from_seed(1);
        for _ in 0..100 {
            assert_eq!(weighted_index(&[0.0, 2.0, 0.0], &mut rng), Some(1));
        }
        assert_eq!(weighted_index(&[0.0, 0.0], &mut rng), None);
    }

    #[test]
    fn model_kind_parsing() {
        assert_eq!("WAX".parse::<ModelKind>().unwrap(), ModelKind::Wax);
        assert!("foo".parse::<ModelKind>().is_err());
    }
}
