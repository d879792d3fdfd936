//! JSON instance and solution files.
//!
//! Instance files look like
//!
//! ```json
//! { "social_nodes": [{"id": "s:a", "weight": 5.0, "threshold": 1}],
//!   "edges": [["s:a", "s:b"]],
//!   "physical_nodes": [{"id": "p:a", "covers": ["s:a"]}],
//!   "budgets": {"k_s": 2, "k_p": 4} }
//! ```
//!
//! The canonical form keeps keys in that order and sorts node lists, edges and
//! coverage lists by id.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cascade::CascadeResult;
use crate::error::{Error, Result};
use crate::model::{
    validate_instance, AlgorithmTag, Budgets, Instance, PhysicalNode, SocialGraph, SocialNode,
    Solution,
};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    social_nodes: Vec<SocialNode>,
    edges: Vec<(String, String)>,
    physical_nodes: Vec<PhysicalNode>,
    budgets: Budgets,
}

/// Contents of a solution file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub seeds: Vec<String>,
    pub opened: Vec<String>,
    pub algorithm: AlgorithmTag,
    pub value: f64,
    pub activated: Vec<String>,
}

impl SolutionFile {
    pub fn new(solution: &Solution, result: &CascadeResult) -> Self {
        SolutionFile {
            seeds: solution.seeds.iter().cloned().collect(),
            opened: solution.opened.iter().cloned().collect(),
            algorithm: solution.algorithm,
            value: result.total_weight,
            activated: result.activated.iter().cloned().collect(),
        }
    }

    pub fn solution(&self) -> Solution {
        Solution::new(self.seeds.clone(), self.opened.clone(), self.algorithm)
    }
}

/// Sorts nodes, edges and coverage lists by id.
pub fn canonicalize(instance: &Instance) -> Instance {
    let mut nodes = instance.graph.nodes.clone();
    nodes.sort_by(|a, b| a.id.cmp(&b.id));
    let mut edges = instance.graph.edges.clone();
    edges.sort();
    let mut physical = instance.physical.clone();
    physical.sort_by(|a, b| a.id.cmp(&b.id));
    for p in &mut physical {
        p.covers.sort();
    }
    Instance {
        graph: SocialGraph { nodes, edges },
        physical,
        budgets: instance.budgets,
    }
}

/// Parses an instance without validating it. Duplicate ids are rejected here
/// because nothing downstream can resolve them.
pub fn parse_instance(json: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(json)
        .map_err(|e| Error::Parse(e.to_string()))?;
    let mut seen = HashSet::new();
    for id in file
        .social_nodes
        .iter()
        .map(|s| &s.id)
        .chain(file.physical_nodes.iter().map(|p| &p.id))
    {
        if !seen.insert(id.as_str()) {
            return Err(Error::Parse(format!("duplicate id `{id}`")));
        }
    }
    Ok(Instance {
        graph: SocialGraph {
            nodes: file.social_nodes,
            edges: file.edges,
        },
        physical: file.physical_nodes,
        budgets: file.budgets,
    })
}

/// Parses and validates an instance.
pub fn instance_from_json(json: &str) -> Result<Instance> {
    let instance = parse_instance(json)?;
    let report = validate_instance(&instance);
    if !report.is_valid() {
        return Err(Error::Validation(report));
    }
    Ok(instance)
}

/// Canonical pretty-printed JSON for `instance`.
pub fn instance_to_json(instance: &Instance) -> String {
    let canon = canonicalize(instance);
    let file = InstanceFile {
        social_nodes: canon.graph.nodes,
        edges: canon.graph.edges,
        physical_nodes: canon.physical,
        budgets: canon.budgets,
    };
    let mut out = serde_json::to_string_pretty(&file).expect("instance serializes");
    out.push('\n');
    out
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    instance_from_json(&fs::read_to_string(path)?)
}

pub fn save_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, instance_to_json(instance))?;
    Ok(())
}

pub fn solution_to_json(file: &SolutionFile) -> String {
    let mut out = serde_json::to_string_pretty(file).expect("solution serializes");
    out.push('\n');
    out
}

pub fn save_solution(file: &SolutionFile, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, solution_to_json(file))?;
    Ok(())
}

pub fn load_solution(path: impl AsRef<Path>) -> Result<SolutionFile> {
    serde_json::from_str(&fs::read_to_string(path)?).map_err(|e| Error::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE_NODE: &str = r#"{
        "social_nodes": [{"id": "s:a", "weight": 2.5, "threshold": 1}],
        "edges": [],
        "physical_nodes": [{"id": "p:a", "covers": ["s:a"]}],
        "budgets": {"k_s": 1, "k_p": 1}
    }"#;

    #[test]
    fn minimal_instance_loads() {
        let inst = instance_from_json(ONE_NODE).unwrap();
        assert_eq!((inst.n(), inst.m()), (1, 1));
        assert_eq!(inst.graph.nodes[0].weight, 2.5);
    }

    #[test]
    fn duplicate_id_is_a_parse_error() {
        let json = ONE_NODE.replace(
            r#"[{"id": "s:a", "weight": 2.5, "threshold": 1}]"#,
            r#"[{"id": "s:a", "weight": 2.5, "threshold": 1}, {"id": "s:a", "weight": 1.0, "threshold": 1}]"#,
        );
        match instance_from_json(&json) {
            Err(Error::Parse(msg)) => assert!(msg.contains("duplicate id"), "{msg}"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_file_names_the_field_and_line() {
        let json = ONE_NODE.replace(r#""weight": 2.5, "#, "");
        match instance_from_json(&json) {
            Err(Error::Parse(msg)) => {
                assert!(msg.contains("weight"), "{msg}");
                assert!(msg.contains("line"), "{msg}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn invalid_instance_embeds_the_report() {
        let json = ONE_NODE.replace(r#""k_s": 1"#, r#""k_s": 4"#);
        match instance_from_json(&json) {
            Err(Error::Validation(report)) => assert_eq!(report.violations.len(), 1),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn canonical_form_is_a_fixpoint() {
        let json = r#"{
            "social_nodes": [{"id": "s:b", "weight": 1.0, "threshold": 1},
                             {"id": "s:a", "weight": 5.0, "threshold": 1}],
            "edges": [["s:a", "s:b"]],
            "physical_nodes": [{"id": "p:b", "covers": ["s:b"]}, {"id": "p:a", "covers": ["s:a"]}],
            "budgets": {"k_s": 1, "k_p": 2}
        }"#;
        let inst = instance_from_json(json).unwrap();
        let canon = instance_to_json(&inst);
        assert!(canon.find("\"s:a\"").unwrap() < canon.find("\"s:b\"").unwrap());
        let again = instance_to_json(&instance_from_json(&canon).unwrap());
        assert_eq!(canon, again);
        assert_eq!(instance_from_json(&canon).unwrap(), canonicalize(&inst));
    }

    #[test]
    fn files_round_trip_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inst.json");
        let inst = instance_from_json(ONE_NODE).unwrap();
        save_instance(&inst, &path).unwrap();
        assert_eq!(load_instance(&path).unwrap(), inst);

        let sol = SolutionFile {
            seeds: vec!["s:a".into()],
            opened: vec!["p:a".into()],
            algorithm: AlgorithmTag::Oracle,
            value: 2.5,
            activated: vec!["s:a".into()],
        };
        let spath = dir.path().join("sol.json");
        save_solution(&sol, &spath).unwrap();
        assert_eq!(load_solution(&spath).unwrap(), sol);
        assert!(solution_to_json(&sol).contains("\"algorithm\": \"oracle\""));
    }
}
