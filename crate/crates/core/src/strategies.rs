//! Edge-addition strategies.
//!
//! Each strategy proposes one new edge per iteration from the current
//! graph and its cached node measures. Extremal choices ("lowest",
//! "highest") pick the strict extreme of the measure; ties are broken
//! uniformly at random with the run's RNG. When the chosen first endpoint
//! is already adjacent to every other node, the next-ranked node takes its
//! place.
//!
//! Within one run the extremal strategies hand out each node as an endpoint
//! at most once (see [`StrategyConfig::fresh_endpoints`]). Without this
//! rule the top-ranked hub absorbs every new edge, turning all of them
//! into a single star.

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::generators::weighted_index;
use crate::graph::Graph;
use crate::measures::{self, degree_stats, DEFAULT_WALK_LENGTH};
use crate::rng::{rng_from_seed, Rng};

/// Default number of edges added per run.
pub const DEFAULT_BUDGET: usize = 50;

/// Relative tolerance under which two measure values count as tied.
const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    RegularTopology,
    Degree,
    PreferentialAttachment,
    Betweenness,
    Accessibility1,
    Accessibility2,
    Accessibility3,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 7] = [
        StrategyKind::RegularTopology,
        StrategyKind::Degree,
        StrategyKind::PreferentialAttachment,
        StrategyKind::Betweenness,
        StrategyKind::Accessibility1,
        StrategyKind::Accessibility2,
        StrategyKind::Accessibility3,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            StrategyKind::RegularTopology => "regular-topology",
            StrategyKind::Degree => "degree",
            StrategyKind::PreferentialAttachment => "preferential-attachment",
            StrategyKind::Betweenness => "betweenness",
            StrategyKind::Accessibility1 => "accessibility1",
            StrategyKind::Accessibility2 => "accessibility2",
            StrategyKind::Accessibility3 => "accessibility3",
        }
    }

    fn needs_betweenness(self) -> bool {
        self == StrategyKind::Betweenness
    }

    fn needs_accessibility(self) -> bool {
        matches!(
            self,
            StrategyKind::Accessibility1 | StrategyKind::Accessibility2 | StrategyKind::Accessibility3
        )
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        let kind = match key.as_str() {
            "regulartopology" | "regular" => StrategyKind::RegularTopology,
            "degree" => StrategyKind::Degree,
            "preferentialattachment" | "pa" => StrategyKind::PreferentialAttachment,
            "betweenness" | "btw" => StrategyKind::Betweenness,
            "accessibility1" | "acc1" => StrategyKind::Accessibility1,
            "accessibility2" | "acc2" => StrategyKind::Accessibility2,
            "accessibility3" | "acc3" => StrategyKind::Accessibility3,
            _ => return Err(format!("unknown strategy '{s}'")),
        };
        Ok(kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyConfig {
    pub kind: StrategyKind,
    /// Number of edges to add.
    pub budget: usize,
    /// Walk length for the accessibility strategies.
    pub h: usize,
    /// Refresh betweenness/accessibility every this many iterations.
    pub recompute_every: usize,
    /// Extremal strategies give each node at most one new edge per run,
    /// falling back to reuse only when no untouched pair is left.
    pub fresh_endpoints: bool,
    pub seed: u64,
}

impl StrategyConfig {
    pub fn new(kind: StrategyKind, seed: u64) -> Self {
        StrategyConfig {
            kind,
            budget: DEFAULT_BUDGET,
            h: DEFAULT_WALK_LENGTH,
            recompute_every: 1,
            fresh_endpoints: true,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        if self.budget == 0 {
            return Err(GraphError::BadParams("budget must be at least 1".into()));
        }
        if self.recompute_every == 0 {
            return Err(GraphError::BadParams("recompute interval must be at least 1".into()));
        }
        if self.h == 0 {
            return Err(GraphError::BadParams("walk length must be at least 1".into()));
        }
        Ok(())
    }
}

/// Cached non-degree measures; degrees are always read from the graph.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MeasureCache {
    pub betweenness: Option<Vec<f64>>,
    pub accessibility: Option<Vec<f64>>,
}

impl MeasureCache {
    /// Computes whatever `kind` needs on `g`.
    pub fn compute(g: &Graph, kind: StrategyKind, h: usize) -> Result<Self, GraphError> {
        let mut cache = MeasureCache::default();
        if kind.needs_betweenness() {
            cache.betweenness = Some(measures::betweenness(g)?.values);
        }
        if kind.needs_accessibility() {
            cache.accessibility = Some(measures::accessibility(g, h)?.values);
        }
        Ok(cache)
    }
}

fn cached(values: &Option<Vec<f64>>, n: usize) -> Result<&[f64], GraphError> {
    match values {
        Some(v) if v.len() == n => Ok(v),
        Some(v) => Err(GraphError::StaleMeasures {
            expected: n,
            got: v.len(),
        }),
        None => Err(GraphError::StaleMeasures { expected: n, got: 0 }),
    }
}

fn tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Extreme {
    Lowest,
    Highest,
}

impl Extreme {
    fn better(self, a: f64, b: f64) -> bool {
        match self {
            Extreme::Lowest => a < b,
            Extreme::Highest => a > b,
        }
    }
}

/// Uniform pick among the candidates tied at the extreme score.
fn pick_extreme<I>(scores: &[f64], candidates: I, extreme: Extreme, rng: &mut Rng) -> Option<usize>
where
    I: Iterator<Item = usize> + Clone,
{
    let best = candidates
        .clone()
        .map(|i| scores[i])
        .reduce(|a, b| if extreme.better(b, a) { b } else { a })?;
    let ties: Vec<usize> = candidates.filter(|&i| tied(scores[i], best)).collect();
    Some(ties[rng.random_range(0..ties.len())])
}

/// `u` at the `u_end` extreme, `v` at the `v_end` extreme among nodes
/// not adjacent to `u`.
fn extremal_pair(
    g: &Graph,
    scores: &[f64],
    u_end: Extreme,
    v_end: Extreme,
    excluded: Option<&[bool]>,
    rng: &mut Rng,
) -> Result<(usize, usize), GraphError> {
    let free = |i: usize| excluded.is_none_or(|x| !x[i]);
    let n = g.node_count();
    let mut remaining: Vec<bool> = (0..n).map(|u| g.degree(u) + 1 < n && free(u)).collect();
    loop {
        let pool = (0..n).filter(|&i| remaining[i]);
        let u = pick_extreme(scores, pool, u_end, rng).ok_or(GraphError::CompleteGraph)?;
        let partners = (0..n).filter(|&v| v != u && !g.has_edge(u, v) && free(v));
        match pick_extreme(scores, partners, v_end, rng) {
            Some(v) => return Ok((u, v)),
            None => remaining[u] = false,
        }
    }
}

fn regular_topology_pair(g: &Graph, rng: &mut Rng) -> Result<(usize, usize), GraphError> {
    let n = g.node_count();
    let (mean_degree, _) = degree_stats(g);
    let degrees: Vec<f64> = g.degrees().into_iter().map(|d| d as f64).collect();
    let below = |u: usize| degrees[u] < mean_degree;

    let mut low: Vec<usize> = (0..n).filter(|&u| below(u)).collect();
    low.sort_by_key(|&u| (g.degree(u), u));
    for &u in &low {
        let second = g.second_neighborhood(u)?;
        if let Some(w) = pick_extreme(&degrees, second.iter().copied().filter(|&w| below(w)), Extreme::Lowest, rng) {
            return Ok((u, w));
        }
    }

    // no low-degree node has a low-degree second neighbor: join the two
    // lowest-degree nodes that are not yet adjacent
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&u| (g.degree(u), u));
    for (i, &u) in order.iter().enumerate() {
        if let Some(&v) = order[i + 1..].iter().find(|&&v| !g.has_edge(u, v)) {
            return Ok((u.min(v), u.max(v)));
        }
    }
    Err(GraphError::CompleteGraph)
}

fn preferential_pair(g: &Graph, rng: &mut Rng) -> Result<(usize, usize), GraphError> {
    let n = g.node_count();
    let open: Vec<usize> = (0..n).filter(|&u| g.degree(u) + 1 < n).collect();
    if open.is_empty() {
        return Err(GraphError::CompleteGraph);
    }
    let u = open[rng.random_range(0..open.len())];
    let weights: Vec<f64> = (0..n)
        .map(|v| {
            if v == u || g.has_edge(u, v) {
                0.0
            } else {
                g.degree(v) as f64
            }
        })
        .collect();
    let v = match weighted_index(&weights, rng) {
        Some(v) => v,
        // every candidate is isolated; fall back to a uniform choice
        None => {
            let candidates: Vec<usize> = (0..n).filter(|&v| v != u && !g.has_edge(u, v)).collect();
            candidates[rng.random_range(0..candidates.len())]
        }
    };
    Ok((u, v))
}

/// Proposes one absent edge according to `kind`.
pub fn propose_edge(
    g: &Graph,
    kind: StrategyKind,
    measures: &MeasureCache,
    rng: &mut Rng,
) -> Result<(usize, usize), GraphError> {
    propose(g, kind, measures, None, rng)
}

/// Like [`propose_edge`], but the extremal strategies (degree, betweenness
/// and the accessibility family) avoid nodes flagged in `excluded` as long
/// as an unflagged pair exists.
pub fn propose_edge_excluding(
    g: &Graph,
    kind: StrategyKind,
    measures: &MeasureCache,
    excluded: &[bool],
    rng: &mut Rng,
) -> Result<(usize, usize), GraphError> {
    if excluded.len() != g.node_count() {
        return Err(GraphError::StaleMeasures {
            expected: g.node_count(),
            got: excluded.len(),
        });
    }
    match propose(g, kind, measures, Some(excluded), rng) {
        Err(GraphError::CompleteGraph) => propose(g, kind, measures, None, rng),
        other => other,
    }
}

fn propose(
    g: &Graph,
    kind: StrategyKind,
    measures: &MeasureCache,
    excluded: Option<&[bool]>,
    rng: &mut Rng,
) -> Result<(usize, usize), GraphError> {
    let n = g.node_count();
    if g.non_adjacent_pairs() == 0 {
        return Err(GraphError::CompleteGraph);
    }
    let (u_end, v_end, scores) = match kind {
        StrategyKind::RegularTopology => return regular_topology_pair(g, rng),
        StrategyKind::PreferentialAttachment => return preferential_pair(g, rng),
        StrategyKind::Degree => {
            let degrees: Vec<f64> = g.degrees().into_iter().map(|d| d as f64).collect();
            return extremal_pair(g, &degrees, Extreme::Lowest, Extreme::Highest, excluded, rng);
        }
        StrategyKind::Betweenness => (Extreme::Lowest, Extreme::Highest, cached(&measures.betweenness, n)?),
        StrategyKind::Accessibility1 => (Extreme::Lowest, Extreme::Highest, cached(&measures.accessibility, n)?),
        StrategyKind::Accessibility2 => (Extreme::Lowest, Extreme::Lowest, cached(&measures.accessibility, n)?),
        StrategyKind::Accessibility3 => (Extreme::Highest, Extreme::Highest, cached(&measures.accessibility, n)?),
    };
    extremal_pair(g, scores, u_end, v_end, excluded, rng)
}

/// Outcome of one strategy run.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyRun {
    pub graph: Graph,
    /// ASPL before any addition, then after each one (`budget + 1` values).
    pub trajectory: Vec<f64>,
    pub added: Vec<(usize, usize)>,
}

/// Adds `cfg.budget` edges one at a time, recording ASPL after each.
pub fn run_strategy(g: &Graph, cfg: &StrategyConfig) -> Result<StrategyRun, GraphError> {
    cfg.validate()?;
    let n = g.node_count();
    if n < 3 {
        return Err(GraphError::TooSmall(n));
    }
    let capacity = g.non_adjacent_pairs();
    if capacity < cfg.budget {
        return Err(GraphError::BudgetExceedsCapacity {
            budget: cfg.budget,
            capacity,
        });
    }
    let mut graph = g.clone();
    let mut rng = rng_from_seed(cfg.seed);
    let mut trajectory = Vec::with_capacity(cfg.budget + 1);
    let mut added = Vec::with_capacity(cfg.budget);
    trajectory.push(graph.aspl()?);
    let mut touched = vec![false; n];
    let mut cache = MeasureCache::default();
    for iteration in 0..cfg.budget {
        if iteration % cfg.recompute_every == 0 {
            cache = MeasureCache::compute(&graph, cfg.kind, cfg.h)?;
        }
        let (u, v) = propose_edge_excluding(&graph, cfg.kind, &cache, &touched, &mut rng)?;
        graph.add_edge(u, v)?;
        if cfg.fresh_endpoints {
            touched[u] = true;
            touched[v] = true;
        }
        added.push((u, v));
        trajectory.push(graph.aspl()?);
    }
    Ok(StrategyRun {
        graph,
        trajectory,
        added,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(u: usize, v: usize) -> (usize, usize) {
        (u.min(v), u.max(v))
    }

    #[test]
    fn degree_on_path_five() {
        let g = Graph::path(5);
        for seed in 0..50 {
            let mut rng = rng_from_seed(seed);
            let (u, v) = propose_edge(&g, StrategyKind::Degree, &MeasureCache::default(), &mut rng).unwrap();
            assert!(u == 0 || u == 4, "u = {u}");
            let allowed = if u == 0 { [2, 3] } else { [1, 2] };
            assert!(allowed.contains(&v), "({u}, {v})");
        }
    }

    #[test]
    fn degree_tie_breaking_covers_all_ties() {
        let g = Graph::path(5);
        let mut seen = std::collections::BTreeSet::new();
        for seed in 0..200 {
            let mut rng = rng_from_seed(seed);
            seen.insert(propose_edge(&g, StrategyKind::Degree, &MeasureCache::default(), &mut rng).unwrap());
        }
        let expected: std::collections::BTreeSet<_> = [(0, 2), (0, 3), (4, 2), (4, 1)].into_iter().collect();
        assert_eq!(seen, expected);
    }

    #[test]
    fn regular_topology_on_star_joins_leaves() {
        let g = Graph::star(4);
        let mut rng = rng_from_seed(3);
        let (u, v) = propose_edge(&g, StrategyKind::RegularTopology, &MeasureCache::default(), &mut rng).unwrap();
        // first low-degree node in (degree, id) order is leaf 1
        assert_eq!(u, 1);
        assert!((2..=4).contains(&v));
    }

    #[test]
    fn regular_topology_fallback() {
        // C4: every degree equals the mean, so no node is below average
        let g = Graph::cycle(4);
        let mut rng = rng_from_seed(0);
        let e = propose_edge(&g, StrategyKind::RegularTopology, &MeasureCache::default(), &mut rng).unwrap();
        assert_eq!(e, (0, 2));
    }

    #[test]
    fn accessibility1_on_star_skips_saturated_hub() {
        let g = Graph::star(3);
        let cache = MeasureCache::compute(&g, StrategyKind::Accessibility1, 2).unwrap();
        for seed in 0..20 {
            let mut rng = rng_from_seed(seed);
            let (u, v) = propose_edge(&g, StrategyKind::Accessibility1, &cache, &mut rng).unwrap();
            assert!(u != 0 && v != 0 && u != v);
        }
    }

    #[test]
    fn accessibility_variants_pick_expected_tails() {
        // P5 with h = 1: ends have A = 1, inner nodes A = 2
        let g = Graph::path(5);
        let cache = MeasureCache::compute(&g, StrategyKind::Accessibility2, 1).unwrap();
        let mut rng = rng_from_seed(1);
        let e = propose_edge(&g, StrategyKind::Accessibility2, &cache, &mut rng).unwrap();
        assert_eq!(edge(e.0, e.1), (0, 4));
        let e = propose_edge(&g, StrategyKind::Accessibility3, &cache, &mut rng).unwrap();
        assert!([(1, 3), (1, 2), (2, 3)].contains(&edge(e.0, e.1)));
        assert!(!g.has_edge(e.0, e.1));
        let e = propose_edge(&g, StrategyKind::Accessibility1, &cache, &mut rng).unwrap();
        assert!(e.0 == 0 || e.0 == 4);
        assert!((1..=3).contains(&e.1) && !g.has_edge(e.0, e.1));
    }

    #[test]
    fn betweenness_links_leaf_to_centre() {
        let g = Graph::path(5);
        let cache = MeasureCache::compute(&g, StrategyKind::Betweenness, 2).unwrap();
        let mut rng = rng_from_seed(5);
        let (u, v) = propose_edge(&g, StrategyKind::Betweenness, &cache, &mut rng).unwrap();
        assert!(u == 0 || u == 4);
        assert_eq!(v, 2);
    }

    #[test]
    fn preferential_attachment_avoids_existing_edges() {
        let g = Graph::star(5);
        for seed in 0..50 {
            let mut rng = rng_from_seed(seed);
            let (u, v) =
                propose_edge(&g, StrategyKind::PreferentialAttachment, &MeasureCache::default(), &mut rng).unwrap();
            assert!(u != v && !g.has_edge(u, v));
        }
    }

    #[test]
    fn errors() {
        let k4 = Graph::complete(4);
        let mut rng = rng_from_seed(0);
        for kind in StrategyKind::ALL {
            assert_eq!(
                propose_edge(&k4, kind, &MeasureCache::default(), &mut rng),
                Err(GraphError::CompleteGraph)
            );
        }
        let stale = MeasureCache {
            betweenness: Some(vec![0.0; 3]),
            accessibility: None,
        };
        assert_eq!(
            propose_edge(&Graph::path(5), StrategyKind::Betweenness, &stale, &mut rng),
            Err(GraphError::StaleMeasures { expected: 5, got: 3 })
        );
        assert!(matches!(
            propose_edge(&Graph::path(5), StrategyKind::Accessibility1, &stale, &mut rng),
            Err(GraphError::StaleMeasures { .. })
        ));
    }

    #[test]
    fn run_on_path_four() {
        for kind in StrategyKind::ALL {
            let cfg = StrategyConfig {
                budget: 1,
                ..StrategyConfig::new(kind, 9)
            };
            let run = run_strategy(&Graph::path(4), &cfg).unwrap();
            assert_eq!(run.trajectory.len(), 2);
            assert!(run.trajectory[1] <= run.trajectory[0], "{kind}");
            assert_eq!(run.graph.edge_count(), 4);
        }
    }

    #[test]
    fn run_rejects_oversized_budget() {
        let cfg = StrategyConfig {
            budget: 4,
            ..StrategyConfig::new(StrategyKind::Degree, 0)
        };
        assert_eq!(
            run_strategy(&Graph::path(4), &cfg),
            Err(GraphError::BudgetExceedsCapacity { budget: 4, capacity: 3 })
        );
        let cfg = StrategyConfig {
            budget: 3,
            ..StrategyConfig::new(StrategyKind::Degree, 0)
        };
        assert_eq!(run_strategy(&Graph::path(4), &cfg).unwrap().graph, Graph::complete(4));
    }

    #[test]
    fn strategy_names_round_trip() {
        for kind in StrategyKind::ALL {
            assert_eq!(kind.tag().parse::<StrategyKind>().unwrap(), kind);
        }
        assert_eq!("Accessibility (1)".parse::<StrategyKind>().unwrap(), StrategyKind::Accessibility1);
        assert!("closeness".parse::<StrategyKind>().is_err());
    }

    #[test]
    fn excluded_nodes_are_avoided_while_possible() {
        let g = Graph::path(5);
        let mut excluded = vec![false; 5];
        excluded[0] = true;
        excluded[4] = true;
        for seed in 0..20 {
            let mut rng = rng_from_seed(seed);
            let (u, v) =
                propose_edge_excluding(&g, StrategyKind::Degree, &MeasureCache::default(), &excluded, &mut rng).unwrap();
            assert!(!excluded[u] && !excluded[v], "({u}, {v})");
        }
    }

    #[test]
    fn exclusion_falls_back_when_nothing_is_left() {
        let g = Graph::path(4);
        let excluded = vec![true; 4];
        let mut rng = rng_from_seed(3);
        let (u, v) =
            propose_edge_excluding(&g, StrategyKind::Degree, &MeasureCache::default(), &excluded, &mut rng).unwrap();
        assert!(!g.has_edge(u, v) && u != v);
        assert!(propose_edge_excluding(&g, StrategyKind::Degree, &MeasureCache::default(), &[false; 3], &mut rng).is_err());
    }

    #[test]
    fn fresh_endpoints_spread_additions() {
        let g = Graph::cycle(30);
        let cfg = StrategyConfig {
            budget: 10,
            ..StrategyConfig::new(StrategyKind::Accessibility1, 5)
        };
        let run = run_strategy(&g, &cfg).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for &(u, v) in &run.added {
            assert!(seen.insert(u) && seen.insert(v), "{:?}", run.added);
        }
        let reuse = run_strategy(&g, &StrategyConfig { fresh_endpoints: false, ..cfg }).unwrap();
        assert_eq!(reuse.added.len(), 10);
    }
}
