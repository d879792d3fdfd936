//! Budget-splitting dynamic program over a binarized out-tree.
//!
//! For every node `v` and budget pair `(k, l)` (at most `k` seeds and at most
//! `l` opened physical nodes inside the subtree of `v`) the table keeps five
//! optimal values:
//!
//! | variant          | meaning                                        |
//! |------------------|------------------------------------------------|
//! | `Best`           | `f`: best overall                              |
//! | `Active`         | `f̄`: `v` ends up active                        |
//! | `Inactive`       | `f̲`: `v` stays inactive                        |
//! | `ActiveNotSeed`  | `f̄ᵃ`: `v` is activated by its (active) parent  |
//! | `Seed`           | `f̄ᵇ`: `v` is a seed                            |
//!
//! An inactive parent cannot propagate, so its children only contribute
//! `max{f̲, f̄ᵇ}`. An active non-dummy node spends one open on itself; a dummy
//! spends nothing and cannot be seeded. `f̄ᵃ` is left undefined at the root and
//! outside `k <= K_s - 1`, `l <= K_p - 1`: an active parent outside the subtree
//! has already consumed a seed and an open.
//!
//! Budgets are split between the two children exactly (`k1 + k2 = k`,
//! `l1 + l2 = l`). Every queried entry is monotone in its budgets, so this
//! attains the same optimum as the `<=` split while keeping each cell at
//! `O(k l)` work.

use serde::Serialize;

use super::binarize::BinarizedForest;
use crate::model::Budgets;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Best,
    Active,
    Inactive,
    ActiveNotSeed,
    Seed,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Best,
        Variant::Active,
        Variant::Inactive,
        Variant::ActiveNotSeed,
        Variant::Seed,
    ];

    fn slot(self) -> usize {
        self as usize
    }
}

/// Budget and variant used for one child.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Part {
    pub k: usize,
    pub l: usize,
    pub variant: Variant,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Choice {
    /// Closed-form entry with no children involved.
    Base,
    /// Entry copied from another variant of the same cell.
    Pick(Variant),
    /// Budget split across the children, in child order.
    Split([Option<Part>; 2]),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub value: f64,
    pub choice: Choice,
}

#[derive(Debug, Clone)]
pub struct DpTable {
    budgets: Budgets,
    nodes: usize,
    cells: Vec<[Option<Cell>; 5]>,
}

impl DpTable {
    pub fn budgets(&self) -> Budgets {
        self.budgets
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    fn offset(&self, v: usize, k: usize, l: usize) -> usize {
        debug_assert!(k <= self.budgets.k_s && l <= self.budgets.k_p);
        (v * (self.budgets.k_s + 1) + k) * (self.budgets.k_p + 1) + l
    }

    pub fn get(&self, v: usize, variant: Variant, k: usize, l: usize) -> Option<Cell> {
        self.cells[self.offset(v, k, l)][variant.slot()]
    }

    pub fn value(&self, v: usize, variant: Variant, k: usize, l: usize) -> Option<f64> {
        self.get(v, variant, k, l).map(|c| c.value)
    }

    /// `f_v(k, l)`; always defined.
    pub fn best(&self, v: usize, k: usize, l: usize) -> f64 {
        self.value(v, Variant::Best, k, l).expect("best entry is always defined")
    }

    /// Number of defined entries across all nodes, budgets and variants.
    pub fn defined_cells(&self) -> usize {
        self.cells
            .iter()
            .map(|c| c.iter().filter(|e| e.is_some()).count())
            .sum()
    }

    /// Every defined entry, for debugging dumps.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize, Variant, Cell)> + '_ {
        let (ks, kp) = (self.budgets.k_s, self.budgets.k_p);
        (0..self.nodes).flat_map(move |v| {
            (0..=ks).flat_map(move |k| {
                (0..=kp).flat_map(move |l| {
                    Variant::ALL
                        .into_iter()
                        .filter_map(move |var| self.get(v, var, k, l).map(|c| (v, k, l, var, c)))
                })
            })
        })
    }

    fn set(&mut self, v: usize, variant: Variant, k: usize, l: usize, cell: Cell) {
        let at = self.offset(v, k, l);
        self.cells[at][variant.slot()] = Some(cell);
    }
}

/// How a child's entry is read when scanning budget splits.
#[derive(Clone, Copy)]
enum ChildView {
    /// Parent inactive: `max{f̲, f̄ᵇ}`, preferring the seed on ties.
    Detached,
    /// Parent active: `f`.
    Attached,
}

fn child_entry(table: &DpTable, u: usize, k: usize, l: usize, view: ChildView) -> (f64, Variant) {
    match view {
        ChildView::Attached => (table.best(u, k, l), Variant::Best),
        ChildView::Detached => {
            let low = table.value(u, Variant::Inactive, k, l).expect("inactive entry is always defined");
            match table.value(u, Variant::Seed, k, l) {
                Some(seed) if seed >= low => (seed, Variant::Seed),
                _ => (low, Variant::Inactive),
            }
        }
    }
}

/// Best split of `(k, l)` among `children`; ties keep the smallest `(k1, l1)`.
fn best_split(
    table: &DpTable,
    children: &[usize],
    k: usize,
    l: usize,
    view: ChildView,
) -> (f64, [Option<Part>; 2]) {
    match *children {
        [u] => {
            let (value, variant) = child_entry(table, u, k, l, view);
            (value, [Some(Part { k, l, variant }), None])
        }
        [u1, u2] => {
            let mut best: Option<(f64, [Option<Part>; 2])> = None;
            for k1 in 0..=k {
                for l1 in 0..=l {
                    let (v1, var1) = child_entry(table, u1, k1, l1, view);
                    let (v2, var2) = child_entry(table, u2, k - k1, l - l1, view);
                    let total = v1 + v2;
                    if best.as_ref().is_none_or(|(b, _)| total > *b) {
                        best = Some((
                            total,
                            [
                                Some(Part { k: k1, l: l1, variant: var1 }),
                                Some(Part { k: k - k1, l: l - l1, variant: var2 }),
                            ],
                        ));
                    }
                }
            }
            best.expect("split range is non-empty")
        }
        _ => unreachable!("nodes of a binarized forest have one or two children here"),
    }
}

/// Fills the table bottom-up for `budgets`.
pub fn dp_tables(forest: &BinarizedForest, budgets: Budgets) -> DpTable {
    let (ks, kp) = (budgets.k_s, budgets.k_p);
    let n = forest.len();
    let mut table = DpTable {
        budgets,
        nodes: n,
        cells: vec![[None; 5]; n * (ks + 1) * (kp + 1)],
    };
    let root = forest.root();
    let mut order = forest.tree.preorder();
    order.reverse();

    for v in order {
        let node = forest.node(v);
        let children = forest.children(v);
        assert!(children.len() <= 2, "forest must be binarized");
        let leaf = children.is_empty();
        assert!(!(leaf && node.dummy), "dummy nodes are never leaves");

        for k in 0..=ks {
            for l in 0..=kp {
                // Inactive: nothing activates through v.
                let inactive = if k == 0 || l == 0 || leaf {
                    Cell { value: 0.0, choice: Choice::Base }
                } else {
                    let (value, parts) = best_split(&table, children, k, l, ChildView::Detached);
                    Cell { value, choice: Choice::Split(parts) }
                };
                table.set(v, Variant::Inactive, k, l, inactive);

                // Activated by the parent.
                let capped = v != root && k < ks && l < kp;
                let not_seed = if !capped {
                    None
                } else if node.dummy {
                    if l == 0 {
                        Some(Cell { value: 0.0, choice: Choice::Base })
                    } else {
                        let (value, parts) = best_split(&table, children, k, l, ChildView::Attached);
                        Some(Cell { value, choice: Choice::Split(parts) })
                    }
                } else if l == 0 {
                    None
                } else if leaf {
                    Some(Cell { value: node.weight, choice: Choice::Base })
                } else {
                    let (sub, parts) = best_split(&table, children, k, l - 1, ChildView::Attached);
                    Some(Cell { value: node.weight + sub, choice: Choice::Split(parts) })
                };
                if let Some(cell) = not_seed {
                    table.set(v, Variant::ActiveNotSeed, k, l, cell);
                }

                // Seeded.
                let seed = if node.dummy || k == 0 || l == 0 {
                    None
                } else if leaf {
                    Some(Cell { value: node.weight, choice: Choice::Base })
                } else {
                    let (sub, parts) = best_split(&table, children, k - 1, l - 1, ChildView::Attached);
                    Some(Cell { value: node.weight + sub, choice: Choice::Split(parts) })
                };
                if let Some(cell) = seed {
                    table.set(v, Variant::Seed, k, l, cell);
                }

                let active = match (not_seed, seed) {
                    (Some(a), Some(b)) if a.value >= b.value => {
                        Some(Cell { value: a.value, choice: Choice::Pick(Variant::ActiveNotSeed) })
                    }
                    (Some(a), None) => {
                        Some(Cell { value: a.value, choice: Choice::Pick(Variant::ActiveNotSeed) })
                    }
                    (_, Some(b)) => Some(Cell { value: b.value, choice: Choice::Pick(Variant::Seed) }),
                    (None, None) => None,
                };
                if let Some(cell) = active {
                    table.set(v, Variant::Active, k, l, cell);
                }

                let best = match active {
                    Some(a) if a.value >= inactive.value => {
                        Cell { value: a.value, choice: Choice::Pick(Variant::Active) }
                    }
                    _ => Cell { value: inactive.value, choice: Choice::Pick(Variant::Inactive) },
                };
                table.set(v, Variant::Best, k, l, best);
            }
        }
    }
    table
}

/// Seeds and opened nodes (tree indices) behind the root's `f(K_s, K_p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub seeds: Vec<usize>,
    pub opened: Vec<usize>,
    pub value: f64,
}

/// Walks the choice records from the root entry.
pub fn dp_extract(table: &DpTable, forest: &BinarizedForest) -> Extraction {
    let b = table.budgets();
    let root = forest.root();
    let mut out = Extraction {
        seeds: Vec::new(),
        opened: Vec::new(),
        value: table.best(root, b.k_s, b.k_p),
    };
    let mut stack = vec![(root, Variant::Best, b.k_s, b.k_p)];
    while let Some((v, variant, k, l)) = stack.pop() {
        let cell = table
            .get(v, variant, k, l)
            .unwrap_or_else(|| panic!("undefined {variant:?} entry at node {v}, ({k}, {l})"));
        match variant {
            Variant::Seed => {
                out.seeds.push(v);
                out.opened.push(v);
            }
            Variant::ActiveNotSeed if !forest.node(v).dummy => out.opened.push(v),
            _ => {}
        }
        match cell.choice {
            Choice::Base => {}
            Choice::Pick(next) => stack.push((v, next, k, l)),
            Choice::Split(parts) => {
                for (part, &child) in parts.iter().zip(forest.children(v)) {
                    let part = part.expect("one part per child");
                    stack.push((child, part.variant, part.k, part.l));
                }
            }
        }
    }
    out.seeds.sort_unstable();
    out.opened.sort_unstable();
    out
}
