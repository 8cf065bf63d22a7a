//! Batch experiments: many seeded model instances, every strategy applied
//! to each, aggregated into a summary table and scatter data.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ExperimentError, IoError};
use crate::generators::ModelParams;
use crate::graph::Graph;
use crate::measures::DEFAULT_WALK_LENGTH;
use crate::rng::{derive_seed, SeedLabel};
use crate::strategies::{run_strategy, StrategyConfig, StrategyKind, DEFAULT_BUDGET};

pub const DEFAULT_INSTANCES: usize = 30;
pub const DEFAULT_MASTER_SEED: u64 = 20_200_101;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub models: Vec<ModelParams>,
    pub strategies: Vec<StrategyKind>,
    pub instances: usize,
    /// Shared by every strategy, so all trajectories have equal length.
    pub budget: usize,
    pub h: usize,
    pub recompute_every: usize,
    pub fresh_endpoints: bool,
    pub master_seed: u64,
}

impl ExperimentPlan {
    /// Four models at N = 1000, all seven strategies, 30 instances, 50 edges.
    pub fn paper_defaults() -> Self {
        ExperimentPlan {
            models: ModelParams::paper_defaults(),
            strategies: StrategyKind::ALL.to_vec(),
            instances: DEFAULT_INSTANCES,
            budget: DEFAULT_BUDGET,
            h: DEFAULT_WALK_LENGTH,
            recompute_every: 1,
            fresh_endpoints: true,
            master_seed: DEFAULT_MASTER_SEED,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let invalid = |msg: &str| Err(ExperimentError::InvalidPlan(msg.to_string()));
        if self.instances == 0 {
            return invalid("instances must be at least 1");
        }
        if self.models.is_empty() || self.strategies.is_empty() {
            return invalid("a plan needs at least one model and one strategy");
        }
        if self.budget == 0 || self.h == 0 || self.recompute_every == 0 {
            return invalid("budget, h and recompute interval must be at least 1");
        }
        let mut tags: Vec<&str> = self.models.iter().map(ModelParams::tag).collect();
        tags.sort_unstable();
        if tags.windows(2).any(|w| w[0] == w[1]) {
            return invalid("each model kind may appear once");
        }
        let mut kinds = self.strategies.clone();
        kinds.sort_unstable();
        if kinds.windows(2).any(|w| w[0] == w[1]) {
            return invalid("each strategy may appear once");
        }
        for model in &self.models {
            model
                .validate()
                .map_err(|e| ExperimentError::InvalidPlan(format!("{}: {e}", model.tag())))?;
        }
        Ok(())
    }

    /// Seed of instance `index` of `model`; independent of the strategy.
    pub fn instance_seed(&self, model: &ModelParams, index: usize) -> u64 {
        derive_seed(
            self.master_seed,
            &[SeedLabel::Tag(model.tag()), SeedLabel::Index(index as u64)],
        )
    }

    pub fn strategy_config(&self, kind: StrategyKind, instance_seed: u64) -> StrategyConfig {
        StrategyConfig {
            kind,
            budget: self.budget,
            h: self.h,
            recompute_every: self.recompute_every,
            fresh_endpoints: self.fresh_endpoints,
            seed: derive_seed(instance_seed, &[SeedLabel::Tag(kind.tag())]),
        }
    }
}

/// Metadata of one generated instance after LCC extraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceInfo {
    pub model: String,
    pub instance: usize,
    pub seed: u64,
    pub generated_nodes: usize,
    pub lcc_nodes: usize,
    pub lcc_edges: usize,
    pub fingerprint: u64,
}

impl InstanceInfo {
    pub fn retained_fraction(&self) -> f64 {
        self.lcc_nodes as f64 / self.generated_nodes as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub model: String,
    pub strategy: StrategyKind,
    pub instance: usize,
    /// Fingerprint of the starting graph.
    pub fingerprint: u64,
    pub aspl: Vec<f64>,
    pub added: Vec<(usize, usize)>,
}

impl Trajectory {
    pub fn initial(&self) -> f64 {
        self.aspl[0]
    }

    pub fn last(&self) -> f64 {
        *self.aspl.last().expect("trajectories are never empty")
    }

    /// Percentage change of ASPL over the whole run; negative is better.
    pub fn variation_pct(&self) -> f64 {
        100.0 * (self.last() - self.initial()) / self.initial()
    }

    fn sort_key(&self) -> (&str, StrategyKind, usize) {
        (&self.model, self.strategy, self.instance)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanOutput {
    pub instances: Vec<InstanceInfo>,
    /// Sorted by model tag, strategy, instance.
    pub trajectories: Vec<Trajectory>,
}

struct PreparedInstance {
    info: InstanceInfo,
    graph: Graph,
}

/// Runs every (model, strategy, instance) cell on a pool of `jobs` threads
/// (`None` = available parallelism). Output does not depend on `jobs`.
pub fn run_plan(plan: &ExperimentPlan, jobs: Option<usize>) -> Result<PlanOutput, ExperimentError> {
    run_plan_with_progress(plan, jobs, &|_, _| {})
}

pub fn run_plan_with_progress(
    plan: &ExperimentPlan,
    jobs: Option<usize>,
    progress: &(dyn Fn(usize, usize) + Sync),
) -> Result<PlanOutput, ExperimentError> {
    plan.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = jobs {
        builder = builder.num_threads(jobs.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| ExperimentError::InvalidPlan(format!("thread pool: {e}")))?;
    pool.install(|| execute(plan, progress))
}

fn execute(
    plan: &ExperimentPlan,
    progress: &(dyn Fn(usize, usize) + Sync),
) -> Result<PlanOutput, ExperimentError> {
    let instance_keys: Vec<(usize, usize)> = (0..plan.models.len())
        .flat_map(|m| (0..plan.instances).map(move |i| (m, i)))
        .collect();
    let prepared: Vec<PreparedInstance> = instance_keys
        .par_iter()
        .map(|&(m, i)| prepare_instance(plan, &plan.models[m], i))
        .collect::<Result<_, _>>()?;

    let cells: Vec<(usize, StrategyKind)> = (0..prepared.len())
        .flat_map(|p| plan.strategies.iter().map(move |&k| (p, k)))
        .collect();
    let total = cells.len();
    let done = std::sync::atomic::AtomicUsize::new(0);
    let mut trajectories: Vec<Trajectory> = cells
        .par_iter()
        .map(|&(p, kind)| {
            let inst = &prepared[p];
            let cfg = plan.strategy_config(kind, inst.info.seed);
            let run = run_strategy(&inst.graph, &cfg).map_err(|source| ExperimentError::Strategy {
                model: inst.info.model.clone(),
                strategy: kind.tag().to_string(),
                instance: inst.info.instance,
                source,
            })?;
            let finished = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
            progress(finished, total);
            Ok(Trajectory {
                model: inst.info.model.clone(),
                strategy: kind,
                instance: inst.info.instance,
                fingerprint: inst.info.fingerprint,
                aspl: run.trajectory,
                added: run.added,
            })
        })
        .collect::<Result<_, ExperimentError>>()?;
    trajectories.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));

    let mut instances: Vec<InstanceInfo> = prepared.into_iter().map(|p| p.info).collect();
    instances.sort_by(|a, b| (&a.model, a.instance).cmp(&(&b.model, b.instance)));
    Ok(PlanOutput {
        instances,
        trajectories,
    })
}

fn prepare_instance(
    plan: &ExperimentPlan,
    model: &ModelParams,
    index: usize,
) -> Result<PreparedInstance, ExperimentError> {
    let seed = plan.instance_seed(model, index);
    let generated = model.generate(seed).map_err(|source| ExperimentError::Generation {
        model: model.tag().to_string(),
        instance: index,
        source,
    })?;
    let (graph, _) = generated.graph.largest_connected_component();
    Ok(PreparedInstance {
        info: InstanceInfo {
            model: model.tag().to_string(),
            instance: index,
            seed,
            generated_nodes: generated.graph.node_count(),
            lcc_nodes: graph.node_count(),
            lcc_edges: graph.edge_count(),
            fingerprint: graph.fingerprint(),
        },
        graph,
    })
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample (n - 1) standard deviation; NaN for fewer than two values.
pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Pearson correlation; NaN when either side has zero variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    if xs.len() < 2 {
        return f64::NAN;
    }
    let (mx, my) = (mean(xs), mean(ys));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return f64::NAN;
    }
    sxy / (sxx * syy).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub model: String,
    pub strategy: StrategyKind,
    pub instances: usize,
    pub initial_mean: f64,
    pub initial_std: f64,
    pub variation_pct_mean: f64,
    pub variation_pct_std: f64,
    /// Most negative mean variation for this model.
    pub best: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SummaryTable {
    pub rows: Vec<SummaryRow>,
}

impl SummaryTable {
    pub fn get(&self, model: &str, strategy: StrategyKind) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.model == model && r.strategy == strategy)
    }

    pub fn models(&self) -> Vec<&str> {
        let mut models: Vec<&str> = self.rows.iter().map(|r| r.model.as_str()).collect();
        models.dedup();
        models
    }

    pub fn best(&self, model: &str) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.model == model && r.best)
    }
}

/// Trajectories grouped by (model, strategy) in canonical order.
fn grouped(trajectories: &[Trajectory]) -> BTreeMap<(&str, StrategyKind), Vec<&Trajectory>> {
    let mut groups: BTreeMap<(&str, StrategyKind), Vec<&Trajectory>> = BTreeMap::new();
    for t in trajectories {
        groups.entry((t.model.as_str(), t.strategy)).or_default().push(t);
    }
    for group in groups.values_mut() {
        group.sort_by_key(|t| t.instance);
    }
    groups
}

pub fn summarize(trajectories: &[Trajectory]) -> Result<SummaryTable, ExperimentError> {
    if trajectories.is_empty() {
        return Err(ExperimentError::EmptyInput);
    }
    let budget = trajectories[0].aspl.len();
    if trajectories.iter().any(|t| t.aspl.len() != budget) {
        return Err(ExperimentError::InvalidPlan("trajectories have different budgets".into()));
    }
    let mut rows: Vec<SummaryRow> = grouped(trajectories)
        .into_iter()
        .map(|((model, strategy), group)| {
            let initial: Vec<f64> = group.iter().map(|t| t.initial()).collect();
            let variation: Vec<f64> = group.iter().map(|t| t.variation_pct()).collect();
            SummaryRow {
                model: model.to_string(),
                strategy,
                instances: group.len(),
                initial_mean: mean(&initial),
                initial_std: sample_std(&initial),
                variation_pct_mean: mean(&variation),
                variation_pct_std: sample_std(&variation),
                best: false,
            }
        })
        .collect();
    let mut best_per_model: BTreeMap<String, usize> = BTreeMap::new();
    for (i, row) in rows.iter().enumerate() {
        let slot = best_per_model.entry(row.model.clone()).or_insert(i);
        if row.variation_pct_mean < rows[*slot].variation_pct_mean {
            *slot = i;
        }
    }
    for i in best_per_model.into_values() {
        rows[i].best = true;
    }
    Ok(SummaryTable { rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    pub instance: usize,
    pub initial: f64,
    pub variation_pct: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterSeries {
    pub model: String,
    pub strategy: StrategyKind,
    pub points: Vec<ScatterPoint>,
    /// Pearson r of (initial ASPL, |variation|); NaN for zero variance.
    pub pearson_r: f64,
}

pub fn scatter_data(trajectories: &[Trajectory]) -> Result<Vec<ScatterSeries>, ExperimentError> {
    if trajectories.is_empty() {
        return Err(ExperimentError::EmptyInput);
    }
    grouped(trajectories)
        .into_iter()
        .map(|((model, strategy), group)| {
            if group.len() < 2 {
                return Err(ExperimentError::InsufficientData(format!(
                    "{model}/{strategy}: correlation needs at least 2 instances, got {}",
                    group.len()
                )));
            }
            let points: Vec<ScatterPoint> = group
                .iter()
                .map(|t| ScatterPoint {
                    instance: t.instance,
                    initial: t.initial(),
                    variation_pct: t.variation_pct(),
                })
                .collect();
            let xs: Vec<f64> = points.iter().map(|p| p.initial).collect();
            let ys: Vec<f64> = points.iter().map(|p| p.variation_pct.abs()).collect();
            Ok(ScatterSeries {
                model: model.to_string(),
                strategy,
                pearson_r: pearson(&xs, &ys),
                points,
            })
        })
        .collect()
}

// ---- CSV output -------------------------------------------------------------

pub fn write_trajectories_csv<W: Write>(out: W, trajectories: &[Trajectory]) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["model", "strategy", "instance", "iteration", "aspl"])?;
    for t in trajectories {
        for (iteration, aspl) in t.aspl.iter().enumerate() {
            w.serialize((&t.model, t.strategy.tag(), t.instance, iteration, aspl))?;
        }
    }
    w.flush().map_err(|e| IoError::io("<trajectories>", e))?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(out: W, table: &SummaryTable) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "model",
        "strategy",
        "instances",
        "initial_mean",
        "initial_std",
        "variation_pct_mean",
        "variation_pct_std",
        "best",
    ])?;
    for r in &table.rows {
        w.serialize((
            &r.model,
            r.strategy.tag(),
            r.instances,
            r.initial_mean,
            r.initial_std,
            r.variation_pct_mean,
            r.variation_pct_std,
            r.best,
        ))?;
    }
    w.flush().map_err(|e| IoError::io("<summary>", e))?;
    Ok(())
}

pub fn write_scatter_csv<W: Write>(out: W, series: &[ScatterSeries]) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["model", "strategy", "instance", "initial", "variation_pct"])?;
    for s in series {
        for p in &s.points {
            w.serialize((&s.model, s.strategy.tag(), p.instance, p.initial, p.variation_pct))?;
        }
    }
    w.flush().map_err(|e| IoError::io("<scatter>", e))?;
    Ok(())
}

pub fn write_correlations_csv<W: Write>(out: W, series: &[ScatterSeries]) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["model", "strategy", "pearson_r_initial_vs_abs_variation"])?;
    for s in series {
        w.serialize((&s.model, s.strategy.tag(), s.pearson_r))?;
    }
    w.flush().map_err(|e| IoError::io("<correlations>", e))?;
    Ok(())
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub library: String,
    pub version: String,
    pub plan: ExperimentPlan,
    pub instances: Vec<InstanceInfo>,
    pub notes: Vec<String>,
}

impl RunManifest {
    pub fn new(plan: &ExperimentPlan, instances: &[InstanceInfo]) -> Self {
        RunManifest {
            library: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            plan: plan.clone(),
            instances: instances.to_vec(),
            notes: vec![
                "generated instances are reduced to their largest connected component; lcc_nodes / generated_nodes is the retained fraction".into(),
                "instance seeds depend on (master_seed, model, instance) only, so every strategy starts from the same instance".into(),
                "BA grows from a clique of m + 1 nodes; WS uses a ring lattice of degree k_ring; both chosen for mean degree near 6".into(),
                "Waxman nodes are uniform in [0, side]^2 with side solved for expected mean degree 6".into(),
                "betweenness and accessibility are refreshed every recompute_every iterations; degrees every iteration".into(),
                "extremal strategies (degree, betweenness, accessibility 1-3) use each node as an endpoint at most once per run when fresh_endpoints is set".into(),
                "scatter improvement axis is |variation_pct|; std columns are sample (n - 1) standard deviations".into(),
            ],
        }
    }

    pub fn to_json(&self) -> Result<String, IoError> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
