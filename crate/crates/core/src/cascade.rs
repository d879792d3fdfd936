//! Threshold cascade with physical coverage, reachability and the `σ` / `σ_w`
//! set functions.
//!
//! Update rule: seeds covered by an opened physical node are active at step 0.
//! An inactive node activates at step `t + 1` when at least `threshold` of its
//! incoming neighbors are active at step `t` and it is covered by an opened
//! physical node. Nodes with no covering physical node at all (the zero-weight
//! dummies of the tree solver) skip the coverage condition. All qualifying
//! nodes activate together, and nothing ever deactivates.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Instance, SocialGraph, Solution};
use crate::network::Network;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CascadeResult {
    pub activated: BTreeSet<String>,
    pub total_weight: f64,
    /// `rounds[t]` holds the nodes that became active at step `t`; `rounds[0]`
    /// is the effective seed set.
    pub rounds: Vec<Vec<String>>,
}

/// Index-level cascade outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Cascade {
    pub active: Vec<bool>,
    pub rounds: Vec<Vec<usize>>,
    pub total_weight: f64,
}

impl Cascade {
    pub fn activated_count(&self) -> usize {
        self.rounds.iter().map(Vec::len).sum()
    }

    pub fn to_result(&self, net: &Network) -> CascadeResult {
        CascadeResult {
            activated: self
                .active
                .iter()
                .enumerate()
                .filter(|(_, a)| **a)
                .map(|(v, _)| net.id(v).to_string())
                .collect(),
            total_weight: self.total_weight,
            rounds: self
                .rounds
                .iter()
                .map(|r| r.iter().map(|&v| net.id(v).to_string()).collect())
                .collect(),
        }
    }
}

/// Marks which social nodes are covered by at least one opened physical node.
pub fn coverage_mask(net: &Network, opened: &[usize]) -> Vec<bool> {
    let mut covered: Vec<bool> = (0..net.n()).map(|v| net.coverers(v).is_empty()).collect();
    for &p in opened {
        for &v in net.covered_by(p) {
            covered[v] = true;
        }
    }
    covered
}

/// Runs the cascade on node and physical indices.
pub fn simulate(net: &Network, seeds: &[usize], opened: &[usize]) -> Cascade {
    let n = net.n();
    let covered = coverage_mask(net, opened);
    let mut active = vec![false; n];
    let mut first: Vec<usize> = seeds.iter().copied().filter(|&s| covered[s]).collect();
    first.sort_unstable();
    first.dedup();
    for &s in &first {
        active[s] = true;
    }

    let mut active_in = vec![0u32; n];
    let mut queued = vec![false; n];
    let mut rounds = vec![first];
    loop {
        let last = rounds.last().expect("at least one round");
        let mut next = Vec::new();
        for &u in last {
            for &v in net.successors(u) {
                active_in[v] += 1;
                if !active[v] && !queued[v] && covered[v] && active_in[v] >= net.threshold(v) {
                    queued[v] = true;
                    next.push(v);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort_unstable();
        for &v in &next {
            active[v] = true;
        }
        rounds.push(next);
    }
    let total_weight = net.weight_of_mask(&active);
    Cascade {
        active,
        rounds,
        total_weight,
    }
}

/// Nodes reachable from `sources`, each source included.
pub fn reachable_mask(net: &Network, sources: &[usize]) -> Vec<bool> {
    let mut seen = vec![false; net.n()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &s in sources {
        if !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &v in net.successors(u) {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

pub fn sigma_indices(net: &Network, sources: &[usize]) -> usize {
    reachable_mask(net, sources).iter().filter(|r| **r).count()
}

pub fn sigma_w_indices(net: &Network, sources: &[usize]) -> f64 {
    net.weight_of_mask(&reachable_mask(net, sources))
}

/// Simulates the cascade for arbitrary seeds and opened physical nodes; budgets
/// are not checked.
pub fn simulate_cascade<S, P>(instance: &Instance, seeds: S, opened: P) -> Result<CascadeResult>
where
    S: IntoIterator,
    S::Item: AsRef<str>,
    P: IntoIterator,
    P::Item: AsRef<str>,
{
    let net = Network::new(instance)?;
    let seeds = seeds
        .into_iter()
        .map(|s| net.index_of(s.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    let opened = opened
        .into_iter()
        .map(|p| net.physical_index_of(p.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    Ok(simulate(&net, &seeds, &opened).to_result(&net))
}

/// Simulates a solution after checking it against the instance budgets.
pub fn evaluate_solution(instance: &Instance, solution: &Solution) -> Result<CascadeResult> {
    let net = Network::new(instance)?;
    evaluate_on(&net, instance, solution).map(|c| c.to_result(&net))
}

pub(crate) fn evaluate_on(net: &Network, instance: &Instance, solution: &Solution) -> Result<Cascade> {
    let b = instance.budgets;
    if solution.seeds.len() > b.k_s || solution.opened.len() > b.k_p {
        return Err(Error::contract(format!(
            "solution uses {} seeds and {} opens, budgets are {} and {}",
            solution.seeds.len(),
            solution.opened.len(),
            b.k_s,
            b.k_p
        )));
    }
    let seeds = net.resolve_social(&solution.seeds)?;
    let opened = net.resolve_physical(&solution.opened)?;
    Ok(simulate(net, &seeds, &opened))
}

fn graph_network(graph: &SocialGraph) -> Result<Network> {
    Network::from_parts(&graph.nodes, &graph.edges, &[])
}

/// Every node reachable from `sources` along directed edges, sources included.
pub fn reachable_set<S>(graph: &SocialGraph, sources: S) -> Result<BTreeSet<String>>
where
    S: IntoIterator,
    S::Item: AsRef<str>,
{
    let net = graph_network(graph)?;
    let sources = sources
        .into_iter()
        .map(|s| net.index_of(s.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    Ok(reachable_mask(&net, &sources)
        .iter()
        .enumerate()
        .filter(|(_, r)| **r)
        .map(|(v, _)| net.id(v).to_string())
        .collect())
}

/// Number of nodes reachable from `set`.
pub fn sigma<S>(graph: &SocialGraph, set: S) -> Result<usize>
where
    S: IntoIterator,
    S::Item: AsRef<str>,
{
    Ok(reachable_set(graph, set)?.len())
}

/// Total weight of the nodes reachable from `set`.
pub fn sigma_w<S>(graph: &SocialGraph, set: S) -> Result<f64>
where
    S: IntoIterator,
    S::Item: AsRef<str>,
{
    let net = graph_network(graph)?;
    let set = set
        .into_iter()
        .map(|s| net.index_of(s.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    Ok(sigma_w_indices(&net, &set))
}
