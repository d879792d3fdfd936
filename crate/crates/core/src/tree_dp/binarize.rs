//! Dummy-node transformations that turn a forest of out-trees into a single
//! out-tree where every node has at most two children.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::model::{PhysicalNode, SocialNode};
use crate::network::Network;

#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    pub id: String,
    pub weight: f64,
    pub dummy: bool,
    /// Physical node covering this node; `None` for dummies.
    pub physical: Option<String>,
}

impl TreeNode {
    fn dummy() -> Self {
        TreeNode {
            id: String::new(),
            weight: 0.0,
            dummy: true,
            physical: None,
        }
    }
}

/// Rooted tree with edges pointing away from `root`. Children lists are ordered.
#[derive(Debug, Clone, PartialEq)]
pub struct OutTree {
    pub nodes: Vec<TreeNode>,
    pub children: Vec<Vec<usize>>,
    pub root: usize,
}

impl OutTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn max_out_degree(&self) -> usize {
        self.children.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Checks that every node except the root has exactly one parent and hangs
    /// below the root.
    pub fn check(&self) -> Result<()> {
        let n = self.nodes.len();
        if self.children.len() != n || self.root >= n {
            return Err(Error::contract("malformed out-tree"));
        }
        let mut parents = vec![0usize; n];
        for list in &self.children {
            for &c in list {
                if c >= n {
                    return Err(Error::contract("child index out of range"));
                }
                parents[c] += 1;
            }
        }
        if parents[self.root] != 0 {
            return Err(Error::contract("root has an incoming edge"));
        }
        if let Some(v) = (0..n).find(|&v| v != self.root && parents[v] != 1) {
            return Err(Error::contract(format!(
                "node {} has {} parents",
                self.nodes[v].id, parents[v]
            )));
        }
        if self.preorder().len() != n {
            return Err(Error::contract("out-tree is disconnected"));
        }
        Ok(())
    }

    /// Parents before children.
    pub fn preorder(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            if std::mem::replace(&mut seen[v], true) {
                continue;
            }
            order.push(v);
            stack.extend(self.children[v].iter().rev());
        }
        order
    }

    fn push(&mut self, node: TreeNode) -> usize {
        self.nodes.push(node);
        self.children.push(Vec::new());
        self.nodes.len() - 1
    }
}

/// Splits the forest in `net` into its out-trees, ordered by root id.
pub fn out_trees(net: &Network) -> Result<Vec<OutTree>> {
    let mut trees = Vec::new();
    let mut placed = 0;
    for root in (0..net.n()).filter(|&v| net.predecessors(v).is_empty()) {
        let mut tree = OutTree {
            nodes: Vec::new(),
            children: Vec::new(),
            root: 0,
        };
        let mut local = BTreeMap::new();
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            if net.predecessors(v).len() > 1 || local.contains_key(&v) {
                return Err(Error::Assumption(crate::Assumption::ForestOfOutTrees));
            }
            let idx = tree.push(TreeNode {
                id: net.id(v).to_string(),
                weight: net.weight(v),
                dummy: false,
                physical: net.sole_coverer(v).map(|p| net.physical_id(p).to_string()),
            });
            local.insert(v, idx);
            queue.extend(net.successors(v).iter().copied());
        }
        for (&v, &idx) in &local {
            tree.children[idx] = net.successors(v).iter().map(|c| local[c]).collect();
        }
        placed += tree.len();
        trees.push(tree);
    }
    if placed != net.n() {
        return Err(Error::Assumption(crate::Assumption::ForestOfOutTrees));
    }
    Ok(trees)
}

/// Replaces the child list of `parent` by a chain: while more than two
/// targets remain, hang the first one off the current node together with a
/// fresh dummy and continue from the dummy. Returns the number of dummies added.
fn attach_chain(tree: &mut OutTree, parent: usize, mut targets: VecDeque<usize>) -> usize {
    let mut j = parent;
    let mut added = 0;
    loop {
        match targets.len() {
            0 => break,
            1 | 2 => {
                tree.children[j].extend(targets.drain(..));
                break;
            }
            _ => {
                let m = targets.pop_front().expect("non-empty");
                let dummy = tree.push(TreeNode::dummy());
                tree.children[j].extend([m, dummy]);
                j = dummy;
                added += 1;
            }
        }
    }
    added
}

/// Rewrites `tree` so that no node has more than two children. A node with
/// `x > 2` children keeps its smallest-id child plus a zero-weight dummy,
/// which in turn takes the next child, and so on: `x - 2` dummies per node.
pub fn binarize_tree(tree: &OutTree) -> Result<OutTree> {
    tree.check()?;
    let mut out = tree.clone();
    for v in 0..tree.len() {
        if out.children[v].len() > 2 {
            let mut targets = std::mem::take(&mut out.children[v]);
            targets.sort_by(|a, b| out.nodes[*a].id.cmp(&out.nodes[*b].id));
            attach_chain(&mut out, v, targets.into());
        }
    }
    Ok(out)
}

/// The binarized, linked out-tree the dynamic program runs on.
#[derive(Debug, Clone, PartialEq)]
pub struct BinarizedForest {
    pub tree: OutTree,
}

/// Joins binarized out-trees under a chain of dummies rooted at a dummy node.
/// A single tree is returned as is.
pub fn link_forest(trees: Vec<OutTree>) -> Result<BinarizedForest> {
    let mut trees = trees;
    for t in &trees {
        t.check()?;
        if t.max_out_degree() > 2 {
            return Err(Error::contract("link_forest expects binarized trees"));
        }
    }
    trees.sort_by(|a, b| a.nodes[a.root].id.cmp(&b.nodes[b.root].id));
    let mut tree = match trees.len() {
        0 => return Err(Error::contract("empty forest")),
        1 => trees.pop().expect("one tree"),
        _ => {
            let mut merged = OutTree {
                nodes: vec![TreeNode::dummy()],
                children: vec![Vec::new()],
                root: 0,
            };
            let mut roots = VecDeque::new();
            for t in trees {
                let offset = merged.len();
                roots.push_back(t.root + offset);
                merged.nodes.extend(t.nodes);
                merged
                    .children
                    .extend(t.children.into_iter().map(|c| c.into_iter().map(|x| x + offset).collect()));
            }
            attach_chain(&mut merged, 0, roots);
            merged
        }
    };
    for (k, node) in tree.nodes.iter_mut().filter(|n| n.dummy).enumerate() {
        node.id = format!("#dummy{k}");
    }
    Ok(BinarizedForest { tree })
}

impl BinarizedForest {
    /// Binarizes every out-tree of `net` and links them.
    pub fn from_network(net: &Network) -> Result<Self> {
        let trees = out_trees(net)?
            .iter()
            .map(binarize_tree)
            .collect::<Result<Vec<_>>>()?;
        link_forest(trees)
    }

    pub fn root(&self) -> usize {
        self.tree.root
    }

    /// Number of nodes, dummies included.
    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.is_empty()
    }

    pub fn node(&self, v: usize) -> &TreeNode {
        &self.tree.nodes[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.tree.children[v]
    }

    pub fn dummy_ids(&self) -> BTreeSet<String> {
        self.tree
            .nodes
            .iter()
            .filter(|n| n.dummy)
            .map(|n| n.id.clone())
            .collect()
    }

    pub fn leaf_ids(&self) -> BTreeSet<String> {
        (0..self.len())
            .filter(|&v| self.children(v).is_empty())
            .map(|v| self.node(v).id.clone())
            .collect()
    }

    pub fn max_out_degree(&self) -> usize {
        self.tree.max_out_degree()
    }

    /// Splices every dummy out, returning the original node weights and edges.
    pub fn contract(&self) -> (BTreeMap<String, f64>, BTreeSet<(String, String)>) {
        contract_tree(&self.tree)
    }

    /// Cascade network of the binarized tree: dummies carry no physical node.
    pub fn to_network(&self) -> Result<Network> {
        let nodes: Vec<SocialNode> = self
            .tree
            .nodes
            .iter()
            .map(|n| SocialNode::new(n.id.clone(), n.weight, 1))
            .collect();
        let mut edges = Vec::new();
        for (v, list) in self.tree.children.iter().enumerate() {
            for &c in list {
                edges.push((self.tree.nodes[v].id.clone(), self.tree.nodes[c].id.clone()));
            }
        }
        let physical: Vec<PhysicalNode> = self
            .tree
            .nodes
            .iter()
            .filter_map(|n| n.physical.as_ref().map(|p| PhysicalNode::new(p.clone(), [n.id.clone()])))
            .collect();
        Network::from_parts(&nodes, &edges, &physical)
    }
}

/// Original weights and edges of a tree that may contain dummies.
pub fn contract_tree(tree: &OutTree) -> (BTreeMap<String, f64>, BTreeSet<(String, String)>) {
    let mut weights = BTreeMap::new();
    let mut edges = BTreeSet::new();
    // Nearest non-dummy ancestor of each node, following the preorder.
    let mut anchor: Vec<Option<usize>> = vec![None; tree.len()];
    for v in tree.preorder() {
        let node = &tree.nodes[v];
        if !node.dummy {
            weights.insert(node.id.clone(), node.weight);
            if let Some(a) = anchor[v] {
                edges.insert((tree.nodes[a].id.clone(), node.id.clone()));
            }
        }
        let pass = if node.dummy { anchor[v] } else { Some(v) };
        for &c in &tree.children[v] {
            anchor[c] = pass;
        }
    }
    (weights, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star(children: usize) -> OutTree {
        let mut nodes = vec![TreeNode {
            id: "s:a".into(),
            weight: 1.0,
            dummy: false,
            physical: Some("p:a".into()),
        }];
        for i in 0..children {
            let id = format!("s:{}", (b'b' + i as u8) as char);
            nodes.push(TreeNode {
                physical: Some(crate::model::physical_id_for(&id)),
                id,
                weight: 1.0,
                dummy: false,
            });
        }
        // Children listed in reverse to make sure the chain sorts them by id.
        OutTree {
            nodes,
            children: std::iter::once((1..=children).rev().collect())
                .chain((0..children).map(|_| Vec::new()))
                .collect(),
            root: 0,
        }
    }

    fn ids(tree: &OutTree, list: &[usize]) -> Vec<String> {
        list.iter().map(|&c| tree.nodes[c].id.clone()).collect()
    }

    #[test]
    fn star_of_three_gets_one_dummy() {
        let t = binarize_tree(&star(3)).unwrap();
        assert_eq!(t.len(), 5);
        assert_eq!(ids(&t, &t.children[0])[0], "s:b");
        let d = t.children[0][1];
        assert!(t.nodes[d].dummy);
        assert_eq!(t.nodes[d].weight, 0.0);
        assert_eq!(ids(&t, &t.children[d]), ["s:c", "s:d"]);
    }

    #[test]
    fn star_of_four_gets_a_two_dummy_comb() {
        let t = binarize_tree(&star(4)).unwrap();
        assert_eq!(t.nodes.iter().filter(|n| n.dummy).count(), 2);
        let d1 = t.children[0][1];
        assert_eq!(ids(&t, &t.children[d1])[0], "s:c");
        let d2 = t.children[d1][1];
        assert!(t.nodes[d2].dummy);
        assert_eq!(ids(&t, &t.children[d2]), ["s:d", "s:e"]);
        assert_eq!(t.max_out_degree(), 2);
    }

    #[test]
    fn binary_trees_are_untouched() {
        let path = OutTree {
            nodes: star(1).nodes.into_iter().chain(star(0).nodes.into_iter().map(|mut n| {
                n.id = "s:c".into();
                n
            })).collect(),
            children: vec![vec![1], vec![2], vec![]],
            root: 0,
        };
        assert_eq!(binarize_tree(&path).unwrap(), path);
        let forest = link_forest(vec![path.clone()]).unwrap();
        assert_eq!(forest.tree, path);
    }

    #[test]
    fn non_trees_are_rejected() {
        let mut t = star(2);
        t.children[1].push(2);
        assert!(matches!(binarize_tree(&t), Err(Error::Contract(_))));
        let mut t = star(2);
        t.children[1].push(0);
        assert!(binarize_tree(&t).is_err());
    }

    fn single(id: &str) -> OutTree {
        OutTree {
            nodes: vec![TreeNode {
                id: id.into(),
                weight: 1.0,
                dummy: false,
                physical: Some(crate::model::physical_id_for(id)),
            }],
            children: vec![vec![]],
            root: 0,
        }
    }

    #[test]
    fn two_trees_hang_off_a_dummy_root() {
        let f = link_forest(vec![single("s:b"), single("s:a")]).unwrap();
        assert!(f.node(f.root()).dummy);
        assert_eq!(ids(&f.tree, f.children(f.root())), ["s:a", "s:b"]);
        assert_eq!(f.dummy_ids().len(), 1);
    }

    #[test]
    fn three_trees_use_a_root_and_one_chain_dummy() {
        let f = link_forest(vec![single("s:c"), single("s:a"), single("s:b")]).unwrap();
        let r = f.root();
        assert_eq!(f.node(f.children(r)[0]).id, "s:a");
        let d1 = f.children(r)[1];
        assert!(f.node(d1).dummy);
        assert_eq!(ids(&f.tree, f.children(d1)), ["s:b", "s:c"]);
        assert_eq!(f.dummy_ids().len(), 2);
        assert!(f.leaf_ids().is_disjoint(&f.dummy_ids()));
    }

    #[test]
    fn contraction_recovers_the_star() {
        let original = star(5);
        let (w0, e0) = contract_tree(&original);
        let f = link_forest(vec![binarize_tree(&original).unwrap()]).unwrap();
        assert_eq!(f.contract(), (w0, e0));
    }
}
