//! Seeded instance generators.
//!
//! All weights are drawn as integers so that sums are exact in `f64` whatever
//! order the solvers add them in. Every generator attaches one physical node to
//! each social node (`p:x` covers `s:x`).

use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Budgets, Instance, SocialNode};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn check_range(range: &RangeInclusive<u32>) -> Result<()> {
    if *range.start() == 0 || range.start() > range.end() {
        return Err(Error::contract(format!(
            "weight range {}..={} must be positive and non-empty",
            range.start(),
            range.end()
        )));
    }
    Ok(())
}

fn draw(rng: &mut ChaCha8Rng, range: &RangeInclusive<u32>) -> f64 {
    f64::from(rng.gen_range(range.clone()))
}

/// Zero-padded ids so that lexicographic order equals numeric order.
fn labels(prefix: &str, n: usize) -> Vec<String> {
    let width = n.saturating_sub(1).to_string().len();
    (0..n).map(|i| format!("s:{prefix}{i:0width$}")).collect()
}

/// Parameters of the growing two-layer benchmark family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BipartiteSpec {
    /// Size of the source side `I`.
    pub base_i: usize,
    /// `N` of the first row.
    pub start_n: usize,
    pub rows: usize,
    pub k_s0: usize,
    pub k_p0: usize,
    pub source_weights: RangeInclusive<u32>,
    pub sink_weights: RangeInclusive<u32>,
    /// Probability of each extra `I -> J` edge beyond the mandatory one.
    pub extra_edge_prob: f64,
    pub seed: u64,
}

impl Default for BipartiteSpec {
    fn default() -> Self {
        BipartiteSpec {
            base_i: 3,
            start_n: 7,
            rows: 5,
            k_s0: 2,
            k_p0: 4,
            source_weights: 4..=5,
            sink_weights: 1..=3,
            extra_edge_prob: 0.3,
            seed: 1,
        }
    }
}

/// Row `r` has `N = start_n + 2r`, `K_s = k_s0 + r`, `K_p = k_p0 + r`.
///
/// Each row extends the previous one by two sink nodes. Every sink gets one
/// random source as in-neighbor plus each other source with probability
/// `extra_edge_prob`; every source gets at least one out-edge. When the sides
/// are large enough both ends of each weight range are attained, so the
/// weight-ratio bound equals its nominal value.
pub fn gen_bipartite_family(spec: &BipartiteSpec) -> Result<Vec<Instance>> {
    check_range(&spec.source_weights)?;
    check_range(&spec.sink_weights)?;
    if spec.source_weights.start() < spec.sink_weights.end() {
        return Err(Error::contract("every source must weigh at least as much as every sink"));
    }
    if spec.base_i == 0 || spec.start_n <= spec.base_i {
        return Err(Error::contract("need at least one source and start_n > base_i"));
    }
    if !(0.0..=1.0).contains(&spec.extra_edge_prob) {
        return Err(Error::contract("extra_edge_prob must lie in [0, 1]"));
    }
    let last_n = spec.start_n + 2 * spec.rows.saturating_sub(1);
    if spec.k_s0 + spec.rows.saturating_sub(1) > last_n || spec.k_p0 + spec.rows.saturating_sub(1) > last_n {
        return Err(Error::contract("budgets outgrow the family"));
    }

    let mut rng = rng(spec.seed);
    let sources = labels("i", spec.base_i);
    let sink_ids = labels("j", last_n - spec.base_i);

    let extremes = |range: &RangeInclusive<u32>, count: usize, rng: &mut ChaCha8Rng| {
        let mut w: Vec<f64> = (0..count).map(|_| draw(rng, range)).collect();
        if count >= 2 {
            w[0] = f64::from(*range.end());
            w[1] = f64::from(*range.start());
        }
        w.shuffle(rng);
        w
    };
    let source_w = extremes(&spec.source_weights, spec.base_i, &mut rng);
    // The first row's sinks carry both extremes; later sinks are uniform.
    let first_sinks = spec.start_n - spec.base_i;
    let mut sink_w = extremes(&spec.sink_weights, first_sinks, &mut rng);
    sink_w.extend((first_sinks..sink_ids.len()).map(|_| draw(&mut rng, &spec.sink_weights)));

    let mut edges: Vec<(usize, usize)> = Vec::new();
    for j in 0..sink_ids.len() {
        let main = rng.gen_range(0..spec.base_i);
        for i in 0..spec.base_i {
            if i == main || rng.gen_bool(spec.extra_edge_prob) {
                edges.push((i, j));
            }
        }
    }
    // Sources left without out-edges in the first row get one into it.
    for i in 0..spec.base_i {
        if !edges.iter().any(|&(a, b)| a == i && b < first_sinks) {
            edges.push((i, rng.gen_range(0..first_sinks)));
        }
    }
    edges.sort_unstable();
    edges.dedup();

    let instances = (0..spec.rows)
        .map(|r| {
            let sinks = first_sinks + 2 * r;
            let mut nodes: Vec<SocialNode> = sources
                .iter()
                .zip(&source_w)
                .map(|(id, &w)| SocialNode::new(id.as_str(), w, 1))
                .collect();
            nodes.extend(
                sink_ids[..sinks]
                    .iter()
                    .zip(&sink_w)
                    .map(|(id, &w)| SocialNode::new(id.as_str(), w, 1)),
            );
            let es = edges
                .iter()
                .filter(|&&(_, j)| j < sinks)
                .map(|&(i, j)| (sources[i].clone(), sink_ids[j].clone()))
                .collect();
            Instance::with_bijective_coverage(
                nodes,
                es,
                Budgets::new(spec.k_s0 + r, spec.k_p0 + r),
            )
        })
        .collect();
    Ok(instances)
}

/// Random recursive forest of out-trees with unit thresholds.
///
/// Node labels are shuffled before the trees are grown, so id order says
/// nothing about the structure. The first `components` nodes of the growth
/// order are roots; every later node picks a uniformly random earlier node with
/// spare out-degree as its parent. Budgets are set to `(1, 1)`.
pub fn gen_random_forest(
    n: usize,
    components: usize,
    max_out_degree: usize,
    weights: RangeInclusive<u32>,
    seed: u64,
) -> Result<Instance> {
    check_range(&weights)?;
    if components == 0 || components > n {
        return Err(Error::contract(format!("need 1 <= components <= n, got {components} and {n}")));
    }
    if max_out_degree == 0 && n > components {
        return Err(Error::contract("max_out_degree 0 only fits edgeless forests"));
    }
    let mut rng = rng(seed);
    let mut ids = labels("v", n);
    ids.shuffle(&mut rng);

    let mut out_degree = vec![0usize; n];
    let mut edges = Vec::with_capacity(n - components);
    for v in components..n {
        let open: Vec<usize> = (0..v).filter(|&u| out_degree[u] < max_out_degree).collect();
        let parent = *open.choose(&mut rng).expect("the previous node always has room");
        out_degree[parent] += 1;
        edges.push((ids[parent].clone(), ids[v].clone()));
    }
    let nodes = ids
        .iter()
        .map(|id| SocialNode::new(id.as_str(), draw(&mut rng, &weights), 1))
        .collect();
    Ok(Instance::with_bijective_coverage(nodes, edges, Budgets::new(1, 1)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMode {
    /// Every threshold is 1.
    Unit,
    /// Threshold uniform in `[1, max(in-degree, 1)]`.
    General,
}

/// Erdős–Rényi style digraph without self-loops. Budgets are set to `(1, 1)`.
pub fn gen_random_digraph(
    n: usize,
    edge_prob: f64,
    weights: RangeInclusive<u32>,
    mode: ThresholdMode,
    seed: u64,
) -> Result<Instance> {
    check_range(&weights)?;
    if n == 0 {
        return Err(Error::contract("need at least one node"));
    }
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::contract(format!("edge_prob {edge_prob} outside [0, 1]")));
    }
    let mut rng = rng(seed);
    let ids = labels("v", n);
    let mut in_degree = vec![0u32; n];
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(edge_prob) {
                in_degree[v] += 1;
                edges.push((ids[u].clone(), ids[v].clone()));
            }
        }
    }
    let nodes = ids
        .iter()
        .zip(&in_degree)
        .map(|(id, &eta)| {
            let w = draw(&mut rng, &weights);
            let theta = match mode {
                ThresholdMode::Unit => 1,
                ThresholdMode::General => rng.gen_range(1..=eta.max(1)),
            };
            SocialNode::new(id.as_str(), w, theta)
        })
        .collect();
    Ok(Instance::with_bijective_coverage(nodes, edges, Budgets::new(1, 1)))
}
