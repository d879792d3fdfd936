//! Index-based view of an instance used by every solver.
//!
//! Social nodes are renumbered `0..n` in ascending id order and physical nodes
//! `0..m` likewise, so "ascending index" and "ascending id" coincide. All weight
//! sums in the crate iterate in that order, which keeps totals bit-identical
//! between solvers.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{Instance, PhysicalNode, SocialNode};

#[derive(Debug, Clone)]
pub struct Network {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    weights: Vec<f64>,
    thresholds: Vec<u32>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    coverers: Vec<Vec<usize>>,
    physical_ids: Vec<String>,
    physical_index: HashMap<String, usize>,
    covers: Vec<Vec<usize>>,
}

impl Network {
    pub fn new(instance: &Instance) -> Result<Self> {
        Self::from_parts(
            &instance.graph.nodes,
            &instance.graph.edges,
            &instance.physical,
        )
    }

    /// Builds a network without enforcing the instance invariants.
    ///
    /// Only structural resolvability is checked: ids must be unique and every edge
    /// endpoint and covered node must exist. Social nodes with no covering
    /// physical node are allowed; the cascade treats them as always covered.
    pub fn from_parts(
        nodes: &[SocialNode],
        edges: &[(String, String)],
        physical: &[PhysicalNode],
    ) -> Result<Self> {
        let mut order: Vec<&SocialNode> = nodes.iter().collect();
        order.sort_by(|a, b| a.id.cmp(&b.id));
        let mut index = HashMap::with_capacity(order.len());
        for (i, node) in order.iter().enumerate() {
            if index.insert(node.id.clone(), i).is_some() {
                return Err(Error::Parse(format!("duplicate id `{}`", node.id)));
            }
        }
        let n = order.len();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for (from, to) in edges {
            let f = *index
                .get(from)
                .ok_or_else(|| Error::UnknownSocialNode(from.clone()))?;
            let t = *index
                .get(to)
                .ok_or_else(|| Error::UnknownSocialNode(to.clone()))?;
            out_adj[f].push(t);
            in_adj[t].push(f);
        }
        for list in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }

        let mut porder: Vec<&PhysicalNode> = physical.iter().collect();
        porder.sort_by(|a, b| a.id.cmp(&b.id));
        let mut physical_index = HashMap::with_capacity(porder.len());
        let mut covers = Vec::with_capacity(porder.len());
        let mut coverers = vec![Vec::new(); n];
        for (p, node) in porder.iter().enumerate() {
            if physical_index.insert(node.id.clone(), p).is_some() {
                return Err(Error::Parse(format!("duplicate id `{}`", node.id)));
            }
            let mut covered = Vec::with_capacity(node.covers.len());
            for sid in &node.covers {
                let s = *index
                    .get(sid)
                    .ok_or_else(|| Error::UnknownSocialNode(sid.clone()))?;
                covered.push(s);
            }
            covered.sort_unstable();
            covered.dedup();
            for &s in &covered {
                coverers[s].push(p);
            }
            covers.push(covered);
        }

        Ok(Network {
            ids: order.iter().map(|s| s.id.clone()).collect(),
            index,
            weights: order.iter().map(|s| s.weight).collect(),
            thresholds: order.iter().map(|s| s.threshold).collect(),
            out_adj,
            in_adj,
            coverers,
            physical_ids: porder.iter().map(|p| p.id.clone()).collect(),
            physical_index,
            covers,
        })
    }

    /// Number of social nodes.
    pub fn n(&self) -> usize {
        self.ids.len()
    }

    /// Number of physical nodes.
    pub fn m(&self) -> usize {
        self.physical_ids.len()
    }

    pub fn id(&self, node: usize) -> &str {
        &self.ids[node]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownSocialNode(id.to_string()))
    }

    pub fn weight(&self, node: usize) -> f64 {
        self.weights[node]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn threshold(&self, node: usize) -> u32 {
        self.thresholds[node]
    }

    pub fn successors(&self, node: usize) -> &[usize] {
        &self.out_adj[node]
    }

    pub fn predecessors(&self, node: usize) -> &[usize] {
        &self.in_adj[node]
    }

    pub fn edge_count(&self) -> usize {
        self.out_adj.iter().map(Vec::len).sum()
    }

    /// Physical nodes covering `node`, ascending.
    pub fn coverers(&self, node: usize) -> &[usize] {
        &self.coverers[node]
    }

    pub fn physical_id(&self, physical: usize) -> &str {
        &self.physical_ids[physical]
    }

    pub fn physical_ids(&self) -> &[String] {
        &self.physical_ids
    }

    pub fn physical_index_of(&self, id: &str) -> Result<usize> {
        self.physical_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownPhysicalNode(id.to_string()))
    }

    /// Social nodes covered by `physical`, ascending.
    pub fn covered_by(&self, physical: usize) -> &[usize] {
        &self.covers[physical]
    }

    /// Sum of weights of the flagged nodes, in ascending index order.
    pub fn weight_of_mask(&self, mask: &[bool]) -> f64 {
        mask.iter()
            .zip(&self.weights)
            .filter(|(on, _)| **on)
            .fold(0.0, |acc, (_, w)| acc + w)
    }

    /// Sum of weights of `nodes`, which must be sorted ascending.
    pub fn weight_of_sorted(&self, nodes: &[usize]) -> f64 {
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        nodes.iter().fold(0.0, |acc, &v| acc + self.weights[v])
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().fold(0.0, |acc, w| acc + w)
    }

    /// The unique physical node covering `node`, when coverage is one-to-one.
    pub(crate) fn sole_coverer(&self, node: usize) -> Option<usize> {
        match self.coverers[node].as_slice() {
            [p] => Some(*p),
            _ => None,
        }
    }

    pub(crate) fn resolve_social<'a, I>(&self, ids: I) -> Result<Vec<usize>>
    where
        I: IntoIterator<Item = &'a String>,
    {
        let mut out = ids
            .into_iter()
            .map(|id| self.index_of(id))
            .collect::<Result<Vec<_>>>()?;
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    pub(crate) fn resolve_physical<'a, I>(&self, ids: I) -> Result<Vec<usize>>
    where
        I: IntoIterator<Item = &'a String>,
    {
        let mut out = ids
            .into_iter()
            .map(|id| self.physical_index_of(id))
            .collect::<Result<Vec<_>>>()?;
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}
