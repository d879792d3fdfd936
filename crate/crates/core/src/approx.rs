//! Greedy seed selection and the three-case rule for opening physical nodes.
//!
//! Requires unit thresholds and bijective coverage. Under those assumptions a
//! node activates iff it is reachable from an effective seed through opened
//! nodes, so the seed objective is the reachability weight `σ_w`.

use std::collections::BTreeSet;
use std::f64::consts::E;

use serde::Serialize;

use crate::cascade::{reachable_mask, sigma_w_indices};
use crate::error::{Error, Result};
use crate::model::{
    validate_instance, AlgorithmTag, Assumption, AssumptionProfile, Instance, Solution,
};
use crate::network::Network;

/// Greedy picks in order, with the `σ_w` gain each one added.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreedyTrace {
    pub picks: Vec<(String, f64)>,
    pub final_set: BTreeSet<String>,
    pub sigma_value: usize,
    pub sigma_w_value: f64,
    #[serde(skip)]
    pub(crate) pick_indices: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CaseTag {
    /// `k_s > k_p`: seed and open the `k_p` heaviest nodes.
    #[serde(rename = "CASE1")]
    MoreSeedsThanOpens,
    /// `k_p >= σ(A)`: the whole reachable set of the greedy seeds can be opened.
    #[serde(rename = "CASE2")]
    ReachableSetFits,
    /// `k_s <= k_p < σ(A)`: grow the opened set one neighbor at a time.
    #[serde(rename = "CASE3")]
    GrowFrontier,
}

impl CaseTag {
    pub fn label(self) -> &'static str {
        match self {
            CaseTag::MoreSeedsThanOpens => "CASE1",
            CaseTag::ReachableSetFits => "CASE2",
            CaseTag::GrowFrontier => "CASE3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioBound {
    /// `max{e/(e-1), w_max/w_min}`.
    pub general_bound: f64,
    /// `max{e/(e-1), (w̄_I w̄_J)/(w_I w_J)}`, only for bipartite instances.
    pub bipartite_bound: Option<f64>,
}

impl RatioBound {
    /// The tightest bound that applies.
    pub fn best(&self) -> f64 {
        self.bipartite_bound
            .map_or(self.general_bound, |b| b.min(self.general_bound))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxOutcome {
    pub solution: Solution,
    pub case: CaseTag,
    pub trace: GreedyTrace,
    /// Total weight of the nodes the algorithm expects to activate.
    pub value: f64,
    /// Those nodes, ascending by id.
    pub activated: Vec<String>,
}

const REQUIRED: [Assumption; 2] = [Assumption::UnitThresholds, Assumption::BijectiveCoverage];

fn prepare(instance: &Instance) -> Result<Network> {
    let report = validate_instance(instance);
    if !report.is_valid() {
        return Err(Error::Validation(report));
    }
    let net = Network::new(instance)?;
    AssumptionProfile::of(&net).require(&REQUIRED)?;
    Ok(net)
}

pub fn greedy_seeds(instance: &Instance) -> Result<GreedyTrace> {
    let net = prepare(instance)?;
    Ok(greedy_on(&net, instance.budgets.k_s))
}

/// Adds, `k_s` times, the node whose addition maximizes `σ_w`. Ties go to the
/// heavier node, then to the smaller id. Marginals are recomputed from scratch
/// every round.
pub(crate) fn greedy_on(net: &Network, k_s: usize) -> GreedyTrace {
    let n = net.n();
    let mut chosen = vec![false; n];
    let mut set: Vec<usize> = Vec::with_capacity(k_s);
    let mut current = 0.0;
    let mut picks = Vec::with_capacity(k_s.min(n));
    for _ in 0..k_s.min(n) {
        let mut best: Option<(usize, f64)> = None;
        for c in (0..n).filter(|&c| !chosen[c]) {
            set.push(c);
            let value = sigma_w_indices(net, &set);
            set.pop();
            let better = match best {
                None => true,
                Some((b, bv)) => value > bv || (value == bv && net.weight(c) > net.weight(b)),
            };
            if better {
                best = Some((c, value));
            }
        }
        let (pick, value) = best.expect("a candidate remains while picks < n");
        chosen[pick] = true;
        set.push(pick);
        picks.push((pick, value - current));
        current = value;
    }
    let reach = reachable_mask(net, &set);
    set.sort_unstable();
    GreedyTrace {
        picks: picks
            .iter()
            .map(|&(v, gain)| (net.id(v).to_string(), gain))
            .collect(),
        final_set: set.iter().map(|&v| net.id(v).to_string()).collect(),
        sigma_value: reach.iter().filter(|r| **r).count(),
        sigma_w_value: net.weight_of_mask(&reach),
        pick_indices: set,
    }
}

pub fn classify_case(instance: &Instance, trace: &GreedyTrace) -> CaseTag {
    let b = instance.budgets;
    if b.k_s > b.k_p {
        CaseTag::MoreSeedsThanOpens
    } else if b.k_p >= trace.sigma_value {
        CaseTag::ReachableSetFits
    } else {
        CaseTag::GrowFrontier
    }
}

pub fn solve_approx(instance: &Instance) -> Result<ApproxOutcome> {
    let net = prepare(instance)?;
    solve_on(&net, instance)
}

pub(crate) fn solve_on(net: &Network, instance: &Instance) -> Result<ApproxOutcome> {
    let b = instance.budgets;
    let trace = greedy_on(net, b.k_s);
    let case = classify_case(instance, &trace);
    let n = net.n();
    let coverer = |v: usize| net.sole_coverer(v).expect("bijective coverage");

    if b.k_s == 0 {
        return Ok(ApproxOutcome {
            solution: Solution::empty(AlgorithmTag::Greedy),
            case,
            trace,
            value: 0.0,
            activated: Vec::new(),
        });
    }

    let mut active = vec![false; n];
    let (seeds, opened): (Vec<usize>, Vec<usize>) = match case {
        CaseTag::MoreSeedsThanOpens => {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&x, &y| net.weight(y).total_cmp(&net.weight(x)).then(x.cmp(&y)));
            order.truncate(b.k_p);
            for &v in &order {
                active[v] = true;
            }
            let opened = order.iter().map(|&v| coverer(v)).collect();
            (order, opened)
        }
        CaseTag::ReachableSetFits => {
            active = reachable_mask(net, &trace.pick_indices);
            let opened = (0..n).filter(|&v| active[v]).map(coverer).collect();
            (trace.pick_indices.clone(), opened)
        }
        CaseTag::GrowFrontier => {
            let seeds = trace.pick_indices.clone();
            for &s in &seeds {
                active[s] = true;
            }
            let mut black = seeds.len();
            while black < b.k_p {
                let next = (0..n)
                    .filter(|&v| !active[v] && net.predecessors(v).iter().any(|&u| active[u]))
                    .fold(None, |best: Option<usize>, v| match best {
                        Some(b) if net.weight(b) >= net.weight(v) => Some(b),
                        _ => Some(v),
                    })
                    .ok_or_else(|| {
                        Error::contract(format!(
                            "frontier exhausted with {black} of {} physical nodes open",
                            b.k_p
                        ))
                    })?;
                active[next] = true;
                black += 1;
            }
            let opened = (0..n).filter(|&v| active[v]).map(coverer).collect();
            (seeds, opened)
        }
    };

    let mut opened = opened;
    opened.sort_unstable();
    let mut seeds = seeds;
    seeds.sort_unstable();
    Ok(ApproxOutcome {
        solution: Solution::from_indices(net, &seeds, &opened, AlgorithmTag::Greedy),
        case,
        value: net.weight_of_mask(&active),
        activated: (0..n)
            .filter(|&v| active[v])
            .map(|v| net.id(v).to_string())
            .collect(),
        trace,
    })
}

/// Approximation guarantees for this instance's weights.
pub fn ratio_bound(instance: &Instance) -> Result<RatioBound> {
    let net = Network::new(instance)?;
    Ok(ratio_bound_on(&net, &AssumptionProfile::of(&net)))
}

pub(crate) fn ratio_bound_on(net: &Network, profile: &AssumptionProfile) -> RatioBound {
    let greedy_factor = E / (E - 1.0);
    let (lo, hi) = net
        .weights()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &w| (lo.min(w), hi.max(w)));
    RatioBound {
        general_bound: greedy_factor.max(hi / lo),
        bipartite_bound: profile.a3_bipartite.as_ref().map(|bp| {
            greedy_factor.max(
                (bp.source_weight_max * bp.sink_weight_max)
                    / (bp.source_weight_min * bp.sink_weight_min),
            )
        }),
    }
}
