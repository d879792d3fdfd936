//! Instance data model, structural validation and the assumption profiles the
//! solvers depend on.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::network::Network;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SocialNode {
    pub id: String,
    pub weight: f64,
    pub threshold: u32,
}

impl SocialNode {
    pub fn new(id: impl Into<String>, weight: f64, threshold: u32) -> Self {
        SocialNode {
            id: id.into(),
            weight,
            threshold,
        }
    }
}

/// Social digraph. An edge `(i, j)` makes `i` an incoming neighbor of `j`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SocialGraph {
    pub nodes: Vec<SocialNode>,
    pub edges: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalNode {
    pub id: String,
    pub covers: Vec<String>,
}

impl PhysicalNode {
    pub fn new<I, S>(id: impl Into<String>, covers: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        PhysicalNode {
            id: id.into(),
            covers: covers.into_iter().map(Into::into).collect(),
        }
    }
}

/// Seed and open budgets, both read as "at most".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    pub k_s: usize,
    pub k_p: usize,
}

impl Budgets {
    pub fn new(k_s: usize, k_p: usize) -> Self {
        Budgets { k_s, k_p }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub graph: SocialGraph,
    pub physical: Vec<PhysicalNode>,
    pub budgets: Budgets,
}

impl Instance {
    /// Builds an instance where every social node `s:x` is covered by its own
    /// physical node `p:x`.
    ///
    /// Ids without the `s:` prefix get a `p:` prefix prepended instead.
    pub fn with_bijective_coverage(
        nodes: Vec<SocialNode>,
        edges: Vec<(String, String)>,
        budgets: Budgets,
    ) -> Self {
        let physical = nodes
            .iter()
            .map(|s| PhysicalNode::new(physical_id_for(&s.id), [s.id.clone()]))
            .collect();
        Instance {
            graph: SocialGraph { nodes, edges },
            physical,
            budgets,
        }
    }

    /// Number of social nodes.
    pub fn n(&self) -> usize {
        self.graph.nodes.len()
    }

    /// Number of physical nodes.
    pub fn m(&self) -> usize {
        self.physical.len()
    }

    pub fn with_budgets(&self, budgets: Budgets) -> Self {
        Instance {
            budgets,
            ..self.clone()
        }
    }
}

/// Conventional physical id for the node covering social node `id`.
pub fn physical_id_for(id: &str) -> String {
    match id.strip_prefix("s:") {
        Some(rest) => format!("p:{rest}"),
        None => format!("p:{id}"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmTag {
    Greedy,
    Dp,
    Oracle,
    FullOpen,
    Uniform,
    Manual,
}

impl AlgorithmTag {
    pub fn as_str(self) -> &'static str {
        match self {
            AlgorithmTag::Greedy => "greedy",
            AlgorithmTag::Dp => "dp",
            AlgorithmTag::Oracle => "oracle",
            AlgorithmTag::FullOpen => "full_open",
            AlgorithmTag::Uniform => "uniform",
            AlgorithmTag::Manual => "manual",
        }
    }
}

impl fmt::Display for AlgorithmTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Seed set and opened physical nodes, tagged with the algorithm that chose them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub seeds: BTreeSet<String>,
    pub opened: BTreeSet<String>,
    pub algorithm: AlgorithmTag,
}

impl Solution {
    pub fn new<S, P>(seeds: S, opened: P, algorithm: AlgorithmTag) -> Self
    where
        S: IntoIterator,
        S::Item: Into<String>,
        P: IntoIterator,
        P::Item: Into<String>,
    {
        Solution {
            seeds: seeds.into_iter().map(Into::into).collect(),
            opened: opened.into_iter().map(Into::into).collect(),
            algorithm,
        }
    }

    pub fn empty(algorithm: AlgorithmTag) -> Self {
        Solution {
            seeds: BTreeSet::new(),
            opened: BTreeSet::new(),
            algorithm,
        }
    }

    pub(crate) fn from_indices(
        net: &Network,
        seeds: &[usize],
        opened: &[usize],
        algorithm: AlgorithmTag,
    ) -> Self {
        Solution {
            seeds: seeds.iter().map(|&s| net.id(s).to_string()).collect(),
            opened: opened.iter().map(|&p| net.physical_id(p).to_string()).collect(),
            algorithm,
        }
    }
}

/// One violated instance invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoSocialNodes,
    NoPhysicalNodes,
    DuplicateSocialId(String),
    DuplicatePhysicalId(String),
    SharedId(String),
    NonPositiveWeight { id: String, weight: f64 },
    ZeroThreshold(String),
    ThresholdExceedsInDegree { id: String, threshold: u32, in_degree: usize },
    SourceThresholdNotOne { id: String, threshold: u32 },
    SelfLoop(String),
    DuplicateEdge(String, String),
    UnknownEdgeEndpoint(String),
    EmptyCoverage(String),
    UnknownCoveredNode { physical: String, social: String },
    UncoveredSocialNode(String),
    SeedBudgetTooLarge { k_s: usize, n: usize },
    OpenBudgetTooLarge { k_p: usize, m: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoSocialNodes => write!(f, "instance has no social nodes"),
            Violation::NoPhysicalNodes => write!(f, "instance has no physical nodes"),
            Violation::DuplicateSocialId(id) => write!(f, "duplicate social id {id}"),
            Violation::DuplicatePhysicalId(id) => write!(f, "duplicate physical id {id}"),
            Violation::SharedId(id) => write!(f, "id {id} is used by both a social and a physical node"),
            Violation::NonPositiveWeight { id, weight } => {
                write!(f, "weight {weight} of {id} is not a positive finite number")
            }
            Violation::ZeroThreshold(id) => write!(f, "threshold of {id} is zero"),
            Violation::ThresholdExceedsInDegree { id, threshold, in_degree } => write!(
                f,
                "threshold exceeds in-degree at {id} (threshold {threshold}, in-degree {in_degree})"
            ),
            Violation::SourceThresholdNotOne { id, threshold } => write!(
                f,
                "node {id} has no incoming neighbors but threshold {threshold} (must be 1)"
            ),
            Violation::SelfLoop(id) => write!(f, "self-loop at {id}"),
            Violation::DuplicateEdge(a, b) => write!(f, "duplicate edge {a} -> {b}"),
            Violation::UnknownEdgeEndpoint(id) => write!(f, "edge endpoint {id} is not a social node"),
            Violation::EmptyCoverage(id) => write!(f, "physical node {id} covers nothing"),
            Violation::UnknownCoveredNode { physical, social } => {
                write!(f, "physical node {physical} covers unknown social node {social}")
            }
            Violation::UncoveredSocialNode(id) => write!(f, "uncovered social node {id}"),
            Violation::SeedBudgetTooLarge { k_s, n } => {
                write!(f, "seed budget {k_s} exceeds the {n} social nodes")
            }
            Violation::OpenBudgetTooLarge { k_p, m } => {
                write!(f, "open budget {k_p} exceeds the {m} physical nodes")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// Human-readable messages, one per violation.
    pub fn messages(&self) -> Vec<String> {
        self.violations.iter().map(ToString::to_string).collect()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "  - {v}")?;
        }
        Ok(())
    }
}

/// Collects every violated invariant; an empty report means the instance is valid.
pub fn validate_instance(instance: &Instance) -> ValidationReport {
    let mut violations = Vec::new();
    let nodes = &instance.graph.nodes;

    if nodes.is_empty() {
        violations.push(Violation::NoSocialNodes);
    }
    if instance.physical.is_empty() {
        violations.push(Violation::NoPhysicalNodes);
    }

    let mut social: HashSet<&str> = HashSet::with_capacity(nodes.len());
    for node in nodes {
        if !social.insert(&node.id) {
            violations.push(Violation::DuplicateSocialId(node.id.clone()));
        }
        if !(node.weight.is_finite() && node.weight > 0.0) {
            violations.push(Violation::NonPositiveWeight {
                id: node.id.clone(),
                weight: node.weight,
            });
        }
        if node.threshold == 0 {
            violations.push(Violation::ZeroThreshold(node.id.clone()));
        }
    }

    let mut in_degree: HashMap<&str, usize> = HashMap::new();
    let mut seen_edges: HashSet<(&str, &str)> = HashSet::new();
    for (from, to) in &instance.graph.edges {
        let mut known = true;
        for end in [from, to] {
            if !social.contains(end.as_str()) {
                violations.push(Violation::UnknownEdgeEndpoint(end.clone()));
                known = false;
            }
        }
        if from == to {
            violations.push(Violation::SelfLoop(from.clone()));
            continue;
        }
        if !seen_edges.insert((from, to)) {
            violations.push(Violation::DuplicateEdge(from.clone(), to.clone()));
            continue;
        }
        if known {
            *in_degree.entry(to).or_default() += 1;
        }
    }
    for node in nodes {
        let eta = in_degree.get(node.id.as_str()).copied().unwrap_or(0);
        if eta == 0 {
            if node.threshold > 1 {
                violations.push(Violation::SourceThresholdNotOne {
                    id: node.id.clone(),
                    threshold: node.threshold,
                });
            }
        } else if node.threshold as usize > eta {
            violations.push(Violation::ThresholdExceedsInDegree {
                id: node.id.clone(),
                threshold: node.threshold,
                in_degree: eta,
            });
        }
    }

    let mut physical: HashSet<&str> = HashSet::new();
    let mut covered: HashSet<&str> = HashSet::new();
    for p in &instance.physical {
        if !physical.insert(&p.id) {
            violations.push(Violation::DuplicatePhysicalId(p.id.clone()));
        }
        if social.contains(p.id.as_str()) {
            violations.push(Violation::SharedId(p.id.clone()));
        }
        if p.covers.is_empty() {
            violations.push(Violation::EmptyCoverage(p.id.clone()));
        }
        for s in &p.covers {
            if social.contains(s.as_str()) {
                covered.insert(s);
            } else {
                violations.push(Violation::UnknownCoveredNode {
                    physical: p.id.clone(),
                    social: s.clone(),
                });
            }
        }
    }
    for node in nodes {
        if !covered.contains(node.id.as_str()) {
            violations.push(Violation::UncoveredSocialNode(node.id.clone()));
        }
    }

    let budgets = instance.budgets;
    if budgets.k_s > nodes.len() {
        violations.push(Violation::SeedBudgetTooLarge {
            k_s: budgets.k_s,
            n: nodes.len(),
        });
    }
    if budgets.k_p > instance.physical.len() {
        violations.push(Violation::OpenBudgetTooLarge {
            k_p: budgets.k_p,
            m: instance.physical.len(),
        });
    }

    ValidationReport { violations }
}

/// Structural assumptions some solvers require.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assumption {
    /// Every threshold equals one.
    UnitThresholds,
    /// One physical node per social node and vice versa.
    BijectiveCoverage,
    /// Two-layer graph whose sources outweigh its sinks.
    Bipartite,
    /// Disjoint union of out-trees.
    ForestOfOutTrees,
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Assumption::UnitThresholds => "assumption 1 (all thresholds equal 1)",
            Assumption::BijectiveCoverage => "assumption 2 (bijective social/physical coverage)",
            Assumption::Bipartite => "assumption 3 (weighted bipartite I -> J graph)",
            Assumption::ForestOfOutTrees => "assumption 4 (forest of out-trees)",
        })
    }
}

/// Source layer `I`, sink layer `J` and their weight bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BipartiteProfile {
    pub sources: Vec<String>,
    pub sinks: Vec<String>,
    pub source_weight_max: f64,
    pub source_weight_min: f64,
    pub sink_weight_max: f64,
    pub sink_weight_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionProfile {
    pub a1_unit_thresholds: bool,
    pub a2_bijective_coverage: bool,
    pub a3_bipartite: Option<BipartiteProfile>,
    pub a4_forest_of_out_trees: bool,
}

impl AssumptionProfile {
    pub fn of(net: &Network) -> Self {
        AssumptionProfile {
            a1_unit_thresholds: (0..net.n()).all(|v| net.threshold(v) == 1),
            a2_bijective_coverage: is_bijective(net),
            a3_bipartite: bipartite_profile(net),
            a4_forest_of_out_trees: is_out_forest(net),
        }
    }

    pub fn holds(&self, assumption: Assumption) -> bool {
        match assumption {
            Assumption::UnitThresholds => self.a1_unit_thresholds,
            Assumption::BijectiveCoverage => self.a2_bijective_coverage,
            Assumption::Bipartite => self.a3_bipartite.is_some(),
            Assumption::ForestOfOutTrees => self.a4_forest_of_out_trees,
        }
    }

    /// First assumption from `required` that fails, if any.
    pub fn require(&self, required: &[Assumption]) -> Result<()> {
        match required.iter().find(|a| !self.holds(**a)) {
            Some(a) => Err(crate::Error::Assumption(*a)),
            None => Ok(()),
        }
    }
}

/// Evaluates the four assumption checks. Only id resolution can fail.
pub fn check_assumptions(instance: &Instance) -> Result<AssumptionProfile> {
    Ok(AssumptionProfile::of(&Network::new(instance)?))
}

fn is_bijective(net: &Network) -> bool {
    net.m() == net.n()
        && (0..net.m()).all(|p| net.covered_by(p).len() == 1)
        && (0..net.n()).all(|v| net.coverers(v).len() == 1)
}

fn bipartite_profile(net: &Network) -> Option<BipartiteProfile> {
    let mut sources = Vec::new();
    let mut sinks = Vec::new();
    for v in 0..net.n() {
        let has_out = !net.successors(v).is_empty();
        let has_in = !net.predecessors(v).is_empty();
        match (has_out, has_in) {
            (true, false) => sources.push(v),
            (false, true) => sinks.push(v),
            _ => return None,
        }
    }
    if sources.is_empty() || sinks.is_empty() {
        return None;
    }
    let bounds = |set: &[usize]| {
        set.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(net.weight(v)), hi.max(net.weight(v)))
        })
    };
    let (i_min, i_max) = bounds(&sources);
    let (j_min, j_max) = bounds(&sinks);
    if i_min < j_max {
        return None;
    }
    Some(BipartiteProfile {
        sources: sources.iter().map(|&v| net.id(v).to_string()).collect(),
        sinks: sinks.iter().map(|&v| net.id(v).to_string()).collect(),
        source_weight_max: i_max,
        source_weight_min: i_min,
        sink_weight_max: j_max,
        sink_weight_min: j_min,
    })
}

fn is_out_forest(net: &Network) -> bool {
    if (0..net.n()).any(|v| net.predecessors(v).len() > 1) {
        return false;
    }
    // With in-degree <= 1 everywhere, the graph is a forest iff every node hangs
    // below some in-degree-0 root (otherwise it sits on a cycle).
    let mut seen = vec![false; net.n()];
    let mut stack: Vec<usize> = (0..net.n())
        .filter(|&v| net.predecessors(v).is_empty())
        .collect();
    let mut visited = 0;
    while let Some(v) = stack.pop() {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        visited += 1;
        stack.extend(net.successors(v).iter().copied());
    }
    visited == net.n()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_abc(thresholds: [u32; 3]) -> Instance {
        Instance::with_bijective_coverage(
            vec![
                SocialNode::new("s:a", 5.0, thresholds[0]),
                SocialNode::new("s:b", 3.0, thresholds[1]),
                SocialNode::new("s:c", 2.0, thresholds[2]),
            ],
            vec![("s:a".into(), "s:b".into()), ("s:b".into(), "s:c".into())],
            Budgets::new(1, 2),
        )
    }

    #[test]
    fn valid_path_has_empty_report() {
        let report = validate_instance(&path_abc([1, 1, 1]));
        assert!(report.is_valid(), "{report}");
    }

    #[test]
    fn threshold_above_in_degree_is_reported() {
        let report = validate_instance(&path_abc([1, 2, 1]));
        assert_eq!(report.violations.len(), 1);
        assert!(report.messages()[0].contains("threshold exceeds in-degree at s:b"));
    }

    #[test]
    fn uncovered_node_is_reported() {
        let mut inst = path_abc([1, 1, 1]);
        inst.physical.retain(|p| p.id != "p:c");
        let report = validate_instance(&inst);
        assert!(report.messages().iter().any(|m| m.contains("uncovered social node s:c")));
    }

    #[test]
    fn structural_violations_are_all_collected() {
        let mut inst = path_abc([1, 1, 1]);
        inst.graph.nodes.push(SocialNode::new("s:a", -1.0, 0));
        inst.graph.edges.push(("s:a".into(), "s:a".into()));
        inst.graph.edges.push(("s:a".into(), "s:b".into()));
        inst.graph.edges.push(("s:a".into(), "s:zz".into()));
        inst.physical.push(PhysicalNode::new("p:empty", Vec::<String>::new()));
        inst.physical.push(PhysicalNode::new("s:b", ["s:b"]));
        inst.budgets = Budgets::new(9, 9);
        let v = validate_instance(&inst).violations;
        assert!(v.contains(&Violation::DuplicateSocialId("s:a".into())));
        assert!(v.contains(&Violation::ZeroThreshold("s:a".into())));
        assert!(v.contains(&Violation::SelfLoop("s:a".into())));
        assert!(v.contains(&Violation::DuplicateEdge("s:a".into(), "s:b".into())));
        assert!(v.contains(&Violation::UnknownEdgeEndpoint("s:zz".into())));
        assert!(v.contains(&Violation::EmptyCoverage("p:empty".into())));
        assert!(v.contains(&Violation::SharedId("s:b".into())));
        assert!(v.contains(&Violation::SeedBudgetTooLarge { k_s: 9, n: 4 }));
        assert!(v.contains(&Violation::OpenBudgetTooLarge { k_p: 9, m: 5 }));
        assert!(v.iter().any(|x| matches!(x, Violation::NonPositiveWeight { .. })));
    }

    #[test]
    fn source_nodes_must_have_unit_threshold() {
        let report = validate_instance(&path_abc([2, 1, 1]));
        assert!(matches!(
            report.violations.as_slice(),
            [Violation::SourceThresholdNotOne { .. }]
        ));
    }

    #[test]
    fn path_satisfies_a1_a2_a4() {
        let profile = check_assumptions(&path_abc([1, 1, 1])).unwrap();
        assert!(profile.a1_unit_thresholds);
        assert!(profile.a2_bijective_coverage);
        assert!(profile.a4_forest_of_out_trees);
        assert!(profile.a3_bipartite.is_none());
    }

    #[test]
    fn bipartite_profile_reads_weight_bounds() {
        let inst = Instance::with_bijective_coverage(
            vec![
                SocialNode::new("s:a", 4.0, 1),
                SocialNode::new("s:b", 5.0, 1),
                SocialNode::new("s:c", 3.0, 1),
                SocialNode::new("s:d", 1.0, 1),
            ],
            vec![
                ("s:a".into(), "s:c".into()),
                ("s:b".into(), "s:c".into()),
                ("s:b".into(), "s:d".into()),
            ],
            Budgets::new(1, 1),
        );
        let bp = check_assumptions(&inst).unwrap().a3_bipartite.unwrap();
        assert_eq!(bp.sources, vec!["s:a", "s:b"]);
        assert_eq!(bp.sinks, vec!["s:c", "s:d"]);
        assert_eq!(
            (bp.source_weight_max, bp.source_weight_min, bp.sink_weight_max, bp.sink_weight_min),
            (5.0, 4.0, 3.0, 1.0)
        );
    }

    #[test]
    fn bipartite_requires_source_weights_to_dominate() {
        let inst = Instance::with_bijective_coverage(
            vec![SocialNode::new("s:a", 1.0, 1), SocialNode::new("s:b", 2.0, 1)],
            vec![("s:a".into(), "s:b".into())],
            Budgets::new(1, 1),
        );
        assert!(check_assumptions(&inst).unwrap().a3_bipartite.is_none());
    }

    #[test]
    fn cycle_is_not_an_out_forest() {
        let inst = Instance::with_bijective_coverage(
            vec![
                SocialNode::new("s:a", 1.0, 1),
                SocialNode::new("s:b", 1.0, 1),
                SocialNode::new("s:c", 1.0, 1),
            ],
            vec![
                ("s:a".into(), "s:b".into()),
                ("s:b".into(), "s:c".into()),
                ("s:c".into(), "s:a".into()),
            ],
            Budgets::new(1, 1),
        );
        assert!(!check_assumptions(&inst).unwrap().a4_forest_of_out_trees);
    }

    #[test]
    fn shared_coverage_breaks_bijection() {
        let mut inst = path_abc([1, 1, 1]);
        inst.physical = vec![
            PhysicalNode::new("p:ab", ["s:a", "s:b"]),
            PhysicalNode::new("p:c", ["s:c"]),
        ];
        let profile = check_assumptions(&inst).unwrap();
        assert!(!profile.a2_bijective_coverage);
        assert!(profile.require(&[Assumption::UnitThresholds]).is_ok());
        assert!(matches!(
            profile.require(&[Assumption::UnitThresholds, Assumption::BijectiveCoverage]),
            Err(crate::Error::Assumption(Assumption::BijectiveCoverage))
        ));
    }

    #[test]
    fn bijective_map_inverts() {
        let inst = path_abc([1, 1, 1]);
        let net = Network::new(&inst).unwrap();
        for v in 0..net.n() {
            let p = net.sole_coverer(v).unwrap();
            assert_eq!(net.covered_by(p), &[v]);
        }
    }
}
