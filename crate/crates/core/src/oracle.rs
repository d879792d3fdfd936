//! Exhaustive search over every seed set and open set of exactly budget size.
//!
//! Cascades are monotone in both seeds and opens, so exact-size subsets reach
//! the same optimum as at-most-size ones. Ties go to the lexicographically
//! smallest seed set, then open set (both compared as ascending id sequences).

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::cascade::simulate;
use crate::error::{Error, Result};
use crate::model::{validate_instance, AlgorithmTag, Instance, Solution};
use crate::network::Network;

/// Default soft limit on the number of (seed set, open set) pairs.
pub const DEFAULT_LIMIT: u128 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOptions {
    pub limit: u128,
    /// Run even when the pair count exceeds `limit`.
    pub force: bool,
    /// Split the seed subsets across the rayon pool.
    pub parallel: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            limit: DEFAULT_LIMIT,
            force: false,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub best: Solution,
    pub best_value: f64,
    pub evaluated_count: u128,
    pub elapsed: Duration,
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        let Some(next) = acc.checked_mul((n - i) as u128) else {
            return u128::MAX;
        };
        acc = next / (i as u128 + 1);
    }
    acc
}

/// Lexicographic stream of `k`-combinations of `0..n`.
#[derive(Debug, Clone)]
pub struct Combinations {
    n: usize,
    current: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::contract(format!("subset size {k} exceeds item count {n}")));
        }
        Ok(Combinations {
            n,
            current: (0..k).collect(),
            done: false,
        })
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let k = self.current.len();
        // Rightmost position that can still move right.
        match (0..k).rev().find(|&i| self.current[i] < self.n - k + i) {
            Some(i) => {
                self.current[i] += 1;
                for j in i + 1..k {
                    self.current[j] = self.current[j - 1] + 1;
                }
            }
            None => self.done = true,
        }
        Some(out)
    }
}

/// All `k`-subsets of `items` in lexicographic order of positions.
pub fn k_subsets<T: Clone>(items: &[T], k: usize) -> Result<impl Iterator<Item = Vec<T>> + '_> {
    Ok(Combinations::new(items.len(), k)?
        .map(move |idx| idx.into_iter().map(|i| items[i].clone()).collect()))
}

/// Bit-parallel cascade for unit thresholds and at most 128 social nodes.
struct BitCascade {
    out: Vec<u128>,
    uncovered: u128,
    weights: Vec<f64>,
}

impl BitCascade {
    fn new(net: &Network) -> Option<Self> {
        if net.n() > 128 || (0..net.n()).any(|v| net.threshold(v) != 1) {
            return None;
        }
        let out = (0..net.n())
            .map(|v| net.successors(v).iter().fold(0u128, |m, &u| m | 1 << u))
            .collect();
        let uncovered = (0..net.n())
            .filter(|&v| net.coverers(v).is_empty())
            .fold(0u128, |m, v| m | 1 << v);
        Some(BitCascade {
            out,
            uncovered,
            weights: net.weights().to_vec(),
        })
    }

    fn run(&self, seeds: u128, covered: u128) -> f64 {
        let covered = covered | self.uncovered;
        let mut active = seeds & covered;
        let mut frontier = active;
        while frontier != 0 {
            let mut next = 0u128;
            let mut f = frontier;
            while f != 0 {
                let v = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= self.out[v];
            }
            next &= covered & !active;
            active |= next;
            frontier = next;
        }
        // Ascending index order, matching `Network::weight_of_mask`.
        let mut total = 0.0;
        while active != 0 {
            let v = active.trailing_zeros() as usize;
            active &= active - 1;
            total += self.weights[v];
        }
        total
    }
}

/// Best (value, seed rank, open rank); the earlier rank wins ties.
type Best = (f64, usize, usize);

fn better(a: Best, b: Best) -> Best {
    if b.0 > a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) {
        b
    } else {
        a
    }
}

pub fn brute_force_solve(instance: &Instance, options: OracleOptions) -> Result<OracleResult> {
    let report = validate_instance(instance);
    if !report.is_valid() {
        return Err(Error::Validation(report));
    }
    let net = Network::new(instance)?;
    solve_on(&net, instance, options)
}

pub(crate) fn solve_on(net: &Network, instance: &Instance, options: OracleOptions) -> Result<OracleResult> {
    let start = Instant::now();
    let b = instance.budgets;
    let count = binomial(net.n(), b.k_s).saturating_mul(binomial(net.m(), b.k_p));
    if count > options.limit && !options.force {
        return Err(Error::OracleRefused {
            count,
            limit: options.limit,
        });
    }
    if b.k_s > net.n() || b.k_p > net.m() {
        return Err(Error::contract("budgets exceed the instance size"));
    }

    let seed_sets: Vec<Vec<usize>> = Combinations::new(net.n(), b.k_s)?.collect();
    let open_sets: Vec<Vec<usize>> = Combinations::new(net.m(), b.k_p)?.collect();

    let fast = BitCascade::new(net);
    let best = match &fast {
        Some(bits) => {
            let to_mask = |set: &Vec<usize>| set.iter().fold(0u128, |m, &v| m | 1 << v);
            let seed_masks: Vec<u128> = seed_sets.iter().map(to_mask).collect();
            let open_masks: Vec<u128> = open_sets
                .iter()
                .map(|set| {
                    set.iter()
                        .flat_map(|&p| net.covered_by(p))
                        .fold(0u128, |m, &v| m | 1 << v)
                })
                .collect();
            let row = |i: usize| {
                let mut best: Best = (f64::NEG_INFINITY, i, 0);
                for (j, &covered) in open_masks.iter().enumerate() {
                    let value = bits.run(seed_masks[i], covered);
                    if value > best.0 {
                        best = (value, i, j);
                    }
                }
                best
            };
            scan(seed_sets.len(), options.parallel, row)
        }
        None => {
            let row = |i: usize| {
                let mut best: Best = (f64::NEG_INFINITY, i, 0);
                for (j, opens) in open_sets.iter().enumerate() {
                    let value = simulate(net, &seed_sets[i], opens).total_weight;
                    if value > best.0 {
                        best = (value, i, j);
                    }
                }
                best
            };
            scan(seed_sets.len(), options.parallel, row)
        }
    };

    let (_, si, oi) = best;
    let (seeds, opens) = (&seed_sets[si], &open_sets[oi]);
    let best_value = simulate(net, seeds, opens).total_weight;
    if best_value != best.0 {
        return Err(Error::contract(format!(
            "oracle fast path disagrees with the cascade engine ({} vs {best_value})",
            best.0
        )));
    }
    Ok(OracleResult {
        best: Solution::from_indices(net, seeds, opens, AlgorithmTag::Oracle),
        best_value,
        evaluated_count: seed_sets.len() as u128 * open_sets.len() as u128,
        elapsed: start.elapsed(),
    })
}

fn scan<F>(rows: usize, parallel: bool, row: F) -> Best
where
    F: Fn(usize) -> Best + Sync,
{
    let init: Best = (f64::NEG_INFINITY, usize::MAX, usize::MAX);
    if parallel {
        (0..rows).into_par_iter().map(&row).reduce(|| init, better)
    } else {
        (0..rows).map(row).fold(init, better)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Budgets, SocialNode};

    fn path() -> Instance {
        Instance::with_bijective_coverage(
            vec![
                SocialNode::new("s:a", 5.0, 1),
                SocialNode::new("s:b", 3.0, 1),
                SocialNode::new("s:c", 2.0, 1),
            ],
            vec![
                ("s:a".into(), "s:b".into()),
                ("s:b".into(), "s:c".into()),
            ],
            Budgets::new(1, 2),
        )
    }

    #[test]
    fn subsets_of_three() {
        let items = ["a", "b", "c"];
        let two: Vec<_> = k_subsets(&items, 2).unwrap().collect();
        assert_eq!(two, vec![vec!["a", "b"], vec!["a", "c"], vec!["b", "c"]]);
        assert_eq!(k_subsets(&items, 0).unwrap().collect::<Vec<_>>(), vec![Vec::<&str>::new()]);
        assert_eq!(k_subsets(&items, 3).unwrap().collect::<Vec<_>>(), vec![items.to_vec()]);
        assert!(matches!(k_subsets(&items, 4), Err(Error::Contract(_))));
    }

    #[test]
    fn subset_counts_match_binomials() {
        for n in 0..=12 {
            for k in 0..=n {
                assert_eq!(Combinations::new(n, k).unwrap().count() as u128, binomial(n, k));
            }
        }
        assert_eq!(binomial(15, 6), 5005);
        assert_eq!(binomial(3, 4), 0);
    }

    #[test]
    fn path_fixture() {
        let r = brute_force_solve(&path(), OracleOptions::default()).unwrap();
        assert_eq!(r.best_value, 8.0);
        assert_eq!(r.evaluated_count, 9);
        assert_eq!(r.best, Solution::new(["s:a"], ["p:a", "p:b"], AlgorithmTag::Oracle));
    }

    #[test]
    fn trivial_budgets() {
        let r = brute_force_solve(&path().with_budgets(Budgets::new(0, 2)), OracleOptions::default())
            .unwrap();
        assert_eq!(r.best_value, 0.0);
        let r = brute_force_solve(&path().with_budgets(Budgets::new(3, 3)), OracleOptions::default())
            .unwrap();
        assert_eq!(r.best_value, 10.0);
    }

    #[test]
    fn refuses_over_limit() {
        let opts = OracleOptions {
            limit: 8,
            ..OracleOptions::default()
        };
        assert!(matches!(
            brute_force_solve(&path(), opts),
            Err(Error::OracleRefused { count: 9, limit: 8 })
        ));
        let forced = brute_force_solve(&path(), OracleOptions { force: true, ..opts }).unwrap();
        assert_eq!(forced.best_value, 8.0);
    }

    #[test]
    fn general_thresholds_use_the_engine() {
        // c needs both a and b; seeding both and opening all three reaches it.
        let inst = Instance::with_bijective_coverage(
            vec![
                SocialNode::new("s:a", 1.0, 1),
                SocialNode::new("s:b", 1.0, 1),
                SocialNode::new("s:c", 4.0, 2),
            ],
            vec![("s:a".into(), "s:c".into()), ("s:b".into(), "s:c".into())],
            Budgets::new(2, 3),
        );
        let r = brute_force_solve(&inst, OracleOptions::default()).unwrap();
        assert_eq!(r.best_value, 6.0);
    }

    #[test]
    fn parallel_matches_sequential() {
        let inst = path().with_budgets(Budgets::new(2, 2));
        let seq = brute_force_solve(&inst, OracleOptions::default()).unwrap();
        let par = brute_force_solve(
            &inst,
            OracleOptions {
                parallel: true,
                ..OracleOptions::default()
            },
        )
        .unwrap();
        assert_eq!(seq.best, par.best);
        assert_eq!(seq.best_value.to_bits(), par.best_value.to_bits());
    }
}
