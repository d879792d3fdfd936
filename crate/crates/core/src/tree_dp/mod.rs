//! Exact solver for forests of out-trees (unit thresholds, bijective coverage).
//!
//! Pipeline: binarize each out-tree with zero-weight dummies, link the trees
//! under a dummy root, run the budget-splitting DP and walk its choice records
//! back to a seed set and an opened set. Two closed-form special cases (all
//! physical nodes openable; uniform weights) are provided as cross-checks.

mod binarize;
mod table;

use std::collections::VecDeque;

pub use binarize::{
    binarize_tree, contract_tree, link_forest, out_trees, BinarizedForest, OutTree, TreeNode,
};
pub use table::{dp_extract, dp_tables, Cell, Choice, DpTable, Extraction, Part, Variant};

use serde::Serialize;

use crate::cascade::simulate;
use crate::error::{Error, Result};
use crate::model::{
    validate_instance, AlgorithmTag, Assumption, AssumptionProfile, Budgets, Instance, Solution,
};
use crate::network::Network;

const REQUIRED: [Assumption; 3] = [
    Assumption::UnitThresholds,
    Assumption::BijectiveCoverage,
    Assumption::ForestOfOutTrees,
];

#[derive(Debug, Clone)]
pub struct ForestOutcome {
    pub solution: Solution,
    /// Cascade value of `solution` on the original instance.
    pub value: f64,
    /// `f_r(K_s, K_p)` read from the table.
    pub table_value: f64,
    pub forest: BinarizedForest,
    pub table: DpTable,
}

/// Solution plus its cascade value.
#[derive(Debug, Clone, PartialEq)]
pub struct Solved {
    pub solution: Solution,
    pub value: f64,
}

fn prepare(instance: &Instance) -> Result<Network> {
    let report = validate_instance(instance);
    if !report.is_valid() {
        return Err(Error::Validation(report));
    }
    let net = Network::new(instance)?;
    AssumptionProfile::of(&net).require(&REQUIRED)?;
    Ok(net)
}

fn cascade_value(net: &Network, solution: &Solution) -> Result<f64> {
    let seeds = net.resolve_social(&solution.seeds)?;
    let opened = net.resolve_physical(&solution.opened)?;
    Ok(simulate(net, &seeds, &opened).total_weight)
}

pub fn solve_forest(instance: &Instance) -> Result<ForestOutcome> {
    let net = prepare(instance)?;
    let forest = BinarizedForest::from_network(&net)?;
    let table = dp_tables(&forest, instance.budgets);
    let picked = dp_extract(&table, &forest);

    let mut seeds = Vec::with_capacity(picked.seeds.len());
    for &v in &picked.seeds {
        let node = forest.node(v);
        if node.dummy {
            return Err(Error::contract(format!("dummy {} chosen as a seed", node.id)));
        }
        seeds.push(node.id.clone());
    }
    let mut opened = Vec::with_capacity(picked.opened.len());
    for &v in &picked.opened {
        let node = forest.node(v);
        let p = node
            .physical
            .clone()
            .ok_or_else(|| Error::contract(format!("opened node {} has no physical node", node.id)))?;
        opened.push(p);
    }
    let solution = Solution::new(seeds, opened, AlgorithmTag::Dp);
    let value = cascade_value(&net, &solution)?;
    Ok(ForestOutcome {
        solution,
        value,
        table_value: picked.value,
        forest,
        table,
    })
}

/// Components of the forest with their total weights, heaviest first.
#[derive(Debug, Clone, Serialize)]
struct Component {
    root: usize,
    /// Nodes in breadth-first order from the root, children by ascending id.
    bfs: Vec<usize>,
}

fn components(net: &Network) -> Vec<Component> {
    (0..net.n())
        .filter(|&v| net.predecessors(v).is_empty())
        .map(|root| {
            let mut bfs = Vec::new();
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                bfs.push(v);
                queue.extend(net.successors(v).iter().copied());
            }
            Component { root, bfs }
        })
        .collect()
}

/// With every physical node openable, seed the roots of the `k_s` heaviest trees
/// and open everything.
pub fn solve_forest_full_open(instance: &Instance) -> Result<Solved> {
    let net = prepare(instance)?;
    let b = instance.budgets;
    if b.k_p != net.m() {
        return Err(Error::contract(format!(
            "full-open solver needs k_p = M ({} != {})",
            b.k_p,
            net.m()
        )));
    }
    let mut comps: Vec<(f64, usize)> = components(&net)
        .into_iter()
        .map(|c| {
            let mut nodes = c.bfs;
            nodes.sort_unstable();
            (net.weight_of_sorted(&nodes), c.root)
        })
        .collect();
    comps.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let seeds: Vec<&str> = comps
        .iter()
        .take(b.k_s)
        .map(|&(_, root)| net.id(root))
        .collect();
    let solution = Solution::new(seeds, net.physical_ids().to_vec(), AlgorithmTag::FullOpen);
    let value = cascade_value(&net, &solution)?;
    Ok(Solved { solution, value })
}

/// With uniform weights, repeatedly take the largest untouched tree, seed its
/// root and open a breadth-first prefix of it.
pub fn solve_forest_uniform(instance: &Instance) -> Result<Solved> {
    let net = prepare(instance)?;
    let b = instance.budgets;
    if let Some(w0) = net.weights().first() {
        if net.weights().iter().any(|w| w != w0) {
            return Err(Error::contract("uniform solver needs equal weights"));
        }
    }
    let mut comps = components(&net);
    comps.sort_by(|a, b| b.bfs.len().cmp(&a.bfs.len()).then(a.root.cmp(&b.root)));

    let mut seeds = Vec::new();
    let mut opened = Vec::new();
    let mut remaining = b.k_p;
    for comp in comps.iter().take(b.k_s) {
        if remaining == 0 {
            break;
        }
        let take = comp.bfs.len().min(remaining);
        seeds.push(net.id(comp.root).to_string());
        for &v in &comp.bfs[..take] {
            let p = net.sole_coverer(v).expect("bijective coverage");
            opened.push(net.physical_id(p).to_string());
        }
        remaining -= take;
    }
    let solution = Solution::new(seeds, opened, AlgorithmTag::Uniform);
    let value = cascade_value(&net, &solution)?;
    Ok(Solved { solution, value })
}

/// Upper bound on defined DP entries: five variants per node and budget pair.
pub fn table_cell_bound(forest_nodes: usize, budgets: Budgets) -> usize {
    5 * forest_nodes * (budgets.k_s + 1) * (budgets.k_p + 1)
}
