//! Node measures driving edge selection: degree statistics, betweenness
//! centrality and random-walk accessibility.

use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::graph::{Graph, UNREACHABLE};

/// Walk length used for accessibility when none is configured.
pub const DEFAULT_WALK_LENGTH: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    Degree,
    Betweenness,
    Accessibility { h: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureVector {
    pub kind: MeasureKind,
    pub values: Vec<f64>,
}

impl MeasureVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Probability of a walker's position after `h` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkDistribution {
    pub source: usize,
    pub h: usize,
    pub probs: Vec<f64>,
}

impl WalkDistribution {
    /// Nodes with non-zero probability.
    pub fn support(&self) -> usize {
        self.probs.iter().filter(|&&p| p > 0.0).count()
    }

    /// Shannon entropy in nats; zero-probability terms contribute nothing.
    pub fn entropy(&self) -> f64 {
        -self
            .probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.ln())
            .sum::<f64>()
    }
}

/// Population mean and population standard deviation of the degrees.
pub fn degree_stats(g: &Graph) -> (f64, f64) {
    let n = g.node_count();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = 2.0 * g.edge_count() as f64 / n as f64;
    let var = g
        .degrees()
        .iter()
        .map(|&d| (d as f64 - mean).powi(2))
        .sum::<f64>()
        / n as f64;
    (mean, var.sqrt())
}

pub fn degree_vector(g: &Graph) -> MeasureVector {
    MeasureVector {
        kind: MeasureKind::Degree,
        values: g.degrees().into_iter().map(|d| d as f64).collect(),
    }
}

/// Unnormalized betweenness over unordered pairs, endpoints excluded.
///
/// Brandes' accumulation: one BFS per source counts shortest paths
/// (`sigma`), then dependencies are propagated back in reverse BFS order.
/// Summing over all sources counts each pair twice, hence the final halving.
pub fn betweenness(g: &Graph) -> Result<MeasureVector, GraphError> {
    let n = g.node_count();
    if !g.is_connected() {
        return Err(GraphError::DisconnectedGraph);
    }
    // flat CSR copy keeps the inner loops on contiguous memory
    let mut offsets = Vec::with_capacity(n + 1);
    let mut targets: Vec<u32> = Vec::with_capacity(2 * g.edge_count());
    offsets.push(0usize);
    for u in 0..n {
        targets.extend(g.neighbors(u).iter().map(|&v| v as u32));
        offsets.push(targets.len());
    }
    let mut centrality = vec![0.0; n];
    let mut order: Vec<u32> = Vec::with_capacity(n);
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![UNREACHABLE; n];
    let mut delta = vec![0.0f64; n];
    for s in 0..n {
        order.clear();
        sigma.fill(0.0);
        dist.fill(UNREACHABLE);
        delta.fill(0.0);
        sigma[s] = 1.0;
        dist[s] = 0;
        order.push(s as u32);
        let mut head = 0;
        while head < order.len() {
            let v = order[head] as usize;
            head += 1;
            let (dv, sv) = (dist[v], sigma[v]);
            for &w in &targets[offsets[v]..offsets[v + 1]] {
                let w = w as usize;
                if dist[w] == UNREACHABLE {
                    dist[w] = dv + 1;
                    order.push(w as u32);
                }
                if dist[w] == dv + 1 {
                    sigma[w] += sv;
                }
            }
        }
        for &w in order.iter().rev() {
            let w = w as usize;
            let coeff = (1.0 + delta[w]) / sigma[w];
            let dw = dist[w];
            for &v in &targets[offsets[w]..offsets[w + 1]] {
                let v = v as usize;
                // every node is reachable, so dist[v] is set
                if dist[v] + 1 == dw {
                    delta[v] += sigma[v] * coeff;
                }
            }
            if w != s {
                centrality[w] += delta[w];
            }
        }
    }
    for c in &mut centrality {
        *c *= 0.5;
    }
    Ok(MeasureVector {
        kind: MeasureKind::Betweenness,
        values: centrality,
    })
}

fn check_walkable(g: &Graph) -> Result<(), GraphError> {
    match (0..g.node_count()).find(|&u| g.degree(u) == 0) {
        Some(u) => Err(GraphError::IsolatedNode(u)),
        None => Ok(()),
    }
}

/// Reusable scratch space for sparse walk propagation.
struct WalkScratch {
    current: Vec<f64>,
    next: Vec<f64>,
    active: Vec<usize>,
    touched: Vec<usize>,
}

impl WalkScratch {
    fn new(n: usize) -> Self {
        WalkScratch {
            current: vec![0.0; n],
            next: vec![0.0; n],
            active: Vec::new(),
            touched: Vec::new(),
        }
    }

    /// Runs `h` steps from `source`; afterwards `current` holds the
    /// distribution and `active` its support, ascending.
    fn propagate(&mut self, g: &Graph, source: usize, h: usize) {
        for &u in &self.active {
            self.current[u] = 0.0;
        }
        self.active.clear();
        self.current[source] = 1.0;
        self.active.push(source);
        for _ in 0..h {
            self.touched.clear();
            for &u in &self.active {
                let mass = self.current[u];
                let nbrs = g.neighbors(u);
                let share = mass / nbrs.len() as f64;
                for &v in nbrs {
                    if self.next[v] == 0.0 {
                        self.touched.push(v);
                    }
                    self.next[v] += share;
                }
                self.current[u] = 0.0;
            }
            self.touched.sort_unstable();
            std::mem::swap(&mut self.current, &mut self.next);
            std::mem::swap(&mut self.active, &mut self.touched);
        }
    }
}

/// Distribution `e_source * M^h` for the uniform random walk `M`.
pub fn walk_distribution(g: &Graph, source: usize, h: usize) -> Result<WalkDistribution, GraphError> {
    if source >= g.node_count() {
        return Err(GraphError::NodeOutOfRange {
            node: source,
            n: g.node_count(),
        });
    }
    if h == 0 {
        return Err(GraphError::BadParams("walk length must be at least 1".into()));
    }
    check_walkable(g)?;
    let mut scratch = WalkScratch::new(g.node_count());
    scratch.propagate(g, source, h);
    Ok(WalkDistribution {
        source,
        h,
        probs: scratch.current,
    })
}

/// Accessibility `exp(entropy)` of every node's `h`-step walk distribution.
pub fn accessibility(g: &Graph, h: usize) -> Result<MeasureVector, GraphError> {
    if h == 0 {
        return Err(GraphError::BadParams("walk length must be at least 1".into()));
    }
    check_walkable(g)?;
    let n = g.node_count();
    let mut scratch = WalkScratch::new(n);
    let mut values = Vec::with_capacity(n);
    for source in 0..n {
        scratch.propagate(g, source, h);
        let entropy: f64 = -scratch
            .active
            .iter()
            .map(|&j| scratch.current[j])
            .filter(|&p| p > 0.0)
            .map(|p| p * p.ln())
            .sum::<f64>();
        values.push(entropy.exp());
    }
    Ok(MeasureVector {
        kind: MeasureKind::Accessibility { h },
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn degree_stats_examples() {
        assert_eq!(degree_stats(&Graph::complete(3)), (2.0, 0.0));
        let (mean, std) = degree_stats(&Graph::star(3));
        assert!(close(mean, 1.5) && close(std, 0.75f64.sqrt()));
        let (mean, std) = degree_stats(&Graph::path(4));
        assert!(close(mean, 1.5) && close(std, 0.5));
    }

    #[test]
    fn betweenness_examples() {
        assert_eq!(betweenness(&Graph::path(3)).unwrap().values, vec![0.0, 1.0, 0.0]);
        assert_eq!(betweenness(&Graph::complete(4)).unwrap().values, vec![0.0; 4]);
        for b in betweenness(&Graph::cycle(5)).unwrap().values {
            assert!(close(b, 1.0), "{b}");
        }
        let disconnected = Graph::from_edges(3, [(0, 1)]).unwrap();
        assert_eq!(betweenness(&disconnected), Err(GraphError::DisconnectedGraph));
    }

    #[test]
    fn walk_examples() {
        let w = walk_distribution(&Graph::complete(4), 0, 1).unwrap();
        assert_eq!(w.probs[0], 0.0);
        assert!(w.probs[1..].iter().all(|&p| close(p, 1.0 / 3.0)));

        let w = walk_distribution(&Graph::star(3), 0, 2).unwrap();
        assert_eq!(w.probs, vec![1.0, 0.0, 0.0, 0.0]);

        let w = walk_distribution(&Graph::path(3), 0, 2).unwrap();
        assert_eq!(w.probs, vec![0.5, 0.0, 0.5]);
        assert_eq!(w.support(), 2);
        assert!(close(w.entropy(), 2f64.ln()));
    }

    #[test]
    fn walk_errors() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        assert_eq!(walk_distribution(&g, 0, 2), Err(GraphError::IsolatedNode(2)));
        assert_eq!(accessibility(&g, 2), Err(GraphError::IsolatedNode(2)));
        assert!(walk_distribution(&Graph::path(3), 0, 0).is_err());
        assert!(walk_distribution(&Graph::path(3), 5, 1).is_err());
    }

    #[test]
    fn accessibility_examples() {
        for n in [3, 5, 8] {
            for a in accessibility(&Graph::complete(n), 1).unwrap().values {
                assert!(close(a, (n - 1) as f64));
            }
        }
        let a = accessibility(&Graph::star(3), 2).unwrap().values;
        assert!(close(a[0], 1.0));
        assert!(a[1..].iter().all(|&x| close(x, 3.0)));
    }

    #[test]
    fn accessibility_on_cycles_is_constant() {
        for h in 1..=4 {
            let a = accessibility(&Graph::cycle(9), h).unwrap().values;
            assert!(a.iter().all(|&x| close(x, a[0])));
        }
    }
}
