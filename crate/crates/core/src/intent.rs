// SPDX-License-Identifier: Apache-2.0
//! Intent graph: the JSON intermediate representation of an I/O ring.
//!
//! The ring is an ordered node sequence: south-west corner first, then the
//! south, east, north and west sides counter-clockwise with the remaining
//! corners interleaved at the side boundaries. Adjacency is implied by
//! order and the sequence wraps around. Fillers are not nodes; breakers
//! are, because they carry domain semantics that LVS needs.

use std::collections::BTreeMap;

use serde_json::Value;
use thiserror::Error;

use crate::geom::Side;
use crate::kb::{CellKind, Direction, KnowledgeBase};
use crate::padplan::{RingStyle, Row};

#[derive(Debug, Error)]
pub enum IntentError {
    #[error("intent JSON parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("intent schema error at {path}: {message}")]
    Schema { path: String, message: String },
}

fn schema(path: &str, message: impl Into<String>) -> IntentError {
    IntentError::Schema {
        path: path.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Explicit,
    Inferred,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Explicit => "explicit",
            Provenance::Inferred => "inferred",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntentNode {
    pub id: String,
    pub name: String,
    pub device_type: String,
    pub side: Side,
    pub index: usize,
    pub direction: Direction,
    pub domain: String,
    pub row: Row,
    pub connections: BTreeMap<String, String>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntentGraph {
    pub die_w: i64,
    pub die_h: i64,
    pub ring_style: RingStyle,
    pub nodes: Vec<IntentNode>,
}

impl IntentGraph {
    pub fn node(&self, id: &str) -> Option<&IntentNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// Cyclically adjacent node index pairs, in ring order.
    pub fn ring_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.nodes.len();
        (0..n).map(move |i| (i, (i + 1) % n))
    }

    pub fn kind_of(&self, node: &IntentNode, kb: &KnowledgeBase) -> Option<CellKind> {
        kb.cell(&node.device_type).map(|c| c.kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ValidationIssue {
    pub severity: Severity,
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub node_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    fn from_issues(mut issues: Vec<ValidationIssue>) -> ValidationReport {
        issues.sort_by(|a, b| {
            (&a.code, &a.node_id, &a.message).cmp(&(&b.code, &b.node_id, &b.message))
        });
        let passed = issues.iter().all(|i| i.severity != Severity::Error);
        ValidationReport { passed, issues }
    }

    pub fn has_code(&self, code: &str) -> bool {
        self.issues.iter().any(|i| i.code == code)
    }

    /// Whether any finding prevents geometric resolution. Domain-isolation
    /// leaks are signoff-class: placement still works and DRC/LVS report
    /// them; everything else (unknown devices, broken ring order,
    /// duplicate ids) blocks the resolver.
    pub fn blocks_resolution(&self) -> bool {
        self.issues
            .iter()
            .any(|i| i.severity == Severity::Error && i.code != "DOMAIN_LEAK")
    }

    pub fn error_codes(&self) -> Vec<&str> {
        let mut codes: Vec<&str> = self
            .issues
            .iter()
            .filter(|i| i.severity == Severity::Error)
            .map(|i| i.code.as_str())
            .collect();
        codes.sort_unstable();
        codes.dedup();
        codes
    }
}

/// Validate an intent graph against its governing knowledge base. All
/// findings go into the report; nothing is thrown.
pub fn validate_intent_graph(graph: &IntentGraph, kb: &KnowledgeBase) -> ValidationReport {
    let mut issues = Vec::new();
    let mut error = |code: &str, message: String, node_id: Option<String>| {
        issues.push(ValidationIssue {
            severity: Severity::Error,
            code: code.to_string(),
            message,
            node_id,
        });
    };

    // Unique ids and names.
    let mut ids = std::collections::BTreeSet::new();
    let mut names = std::collections::BTreeSet::new();
    for node in &graph.nodes {
        if !ids.insert(&node.id) {
            error(
                "DUP_NODE_ID",
                format!("duplicate node id `{}`", node.id),
                Some(node.id.clone()),
            );
        }
        if !names.insert(&node.name) {
            error(
                "DUP_NODE_NAME",
                format!("duplicate node name `{}`", node.name),
                Some(node.id.clone()),
            );
        }
    }

    // Device, domain and pin references.
    for node in &graph.nodes {
        match kb.cell(&node.device_type) {
            None => error(
                "UNKNOWN_DEVICE",
                format!("node `{}` device_type `{}` not in KB", node.name, node.device_type),
                Some(node.id.clone()),
            ),
            Some(master) => {
                for pin in node.connections.keys() {
                    if master.pin(pin).is_none() {
                        error(
                            "UNKNOWN_PIN",
                            format!(
                                "node `{}` connects pin `{}` absent from `{}`",
                                node.name, pin, master.name
                            ),
                            Some(node.id.clone()),
                        );
                    }
                }
                if matches!(master.kind, CellKind::Corner | CellKind::Breaker)
                    && node.provenance != Provenance::Inferred
                {
                    error(
                        "BAD_PROVENANCE",
                        format!("{:?} node `{}` must carry provenance=inferred", master.kind, node.name),
                        Some(node.id.clone()),
                    );
                }
            }
        }
        if kb.domain(&node.domain).is_none() {
            error(
                "UNKNOWN_DOMAIN",
                format!("node `{}` references undefined domain `{}`", node.name, node.domain),
                Some(node.id.clone()),
            );
        }
    }

    // Corner count and ring-order totality: walking the sequence must
    // reproduce every stored (side, index) position, with one corner
    // opening each side in S, E, N, W order.
    let corner_ids: Vec<usize> = graph
        .nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| graph.kind_of(n, kb) == Some(CellKind::Corner))
        .map(|(i, _)| i)
        .collect();
    if corner_ids.len() != 4 {
        error(
            "MISSING_CORNER",
            format!("expected 4 corner nodes, found {}", corner_ids.len()),
            None,
        );
    } else {
        let mut side_slot: isize = -1;
        let mut index_in_side = 0usize;
        for node in &graph.nodes {
            if graph.kind_of(node, kb) == Some(CellKind::Corner) {
                side_slot += 1;
                index_in_side = 0;
            }
            if side_slot < 0 {
                error(
                    "RING_ORDER",
                    format!("node `{}` precedes the first corner", node.name),
                    Some(node.id.clone()),
                );
                continue;
            }
            let expected_side = Side::RING_ORDER[(side_slot as usize).min(3)];
            if side_slot > 3 || node.side != expected_side || node.index != index_in_side {
                error(
                    "RING_ORDER",
                    format!(
                        "node `{}` stored at ({}, {}) but ring order implies ({}, {})",
                        node.name,
                        node.side.as_str(),
                        node.index,
                        expected_side.as_str(),
                        index_in_side
                    ),
                    Some(node.id.clone()),
                );
            }
            index_in_side += 1;
        }
    }

    // Domain isolation: cyclically adjacent non-breaker nodes in different
    // domains must have a breaker between them.
    if kb.rules.domain_isolation_required && !graph.nodes.is_empty() {
        for (i, j) in graph.ring_pairs() {
            let a = &graph.nodes[i];
            let b = &graph.nodes[j];
            let a_breaker = graph.kind_of(a, kb) == Some(CellKind::Breaker);
            let b_breaker = graph.kind_of(b, kb) == Some(CellKind::Breaker);
            if !a_breaker && !b_breaker && a.domain != b.domain {
                error(
                    "DOMAIN_LEAK",
                    format!(
                        "adjacent nodes `{}` ({}) and `{}` ({}) lack a breaker",
                        a.name, a.domain, b.name, b.domain
                    ),
                    Some(a.id.clone()),
                );
            }
        }
    }

    // Inner-row nodes in a single-row ring are suspicious but not fatal.
    if graph.ring_style == RingStyle::SingleRow {
        for node in &graph.nodes {
            if node.row == Row::Inner {
                issues.push(ValidationIssue {
                    severity: Severity::Warning,
                    code: "ROW_STYLE".to_string(),
                    message: format!("inner-row node `{}` in a single_row ring", node.name),
                    node_id: Some(node.id.clone()),
                });
            }
        }
    }

    ValidationReport::from_issues(issues)
}

/// Canonical JSON serialization: sorted keys, fixed field names, stable
/// bytes across runs.
pub fn serialize_intent_graph(graph: &IntentGraph) -> String {
    let mut root = serde_json::Map::new();
    root.insert(
        "die_nm".into(),
        serde_json::json!({"w": graph.die_w, "h": graph.die_h}),
    );
    root.insert("ring_style".into(), Value::String(graph.ring_style.as_str().into()));
    let nodes: Vec<Value> = graph
        .nodes
        .iter()
        .map(|n| {
            serde_json::json!({
                "id": n.id,
                "name": n.name,
                "device_type": n.device_type,
                "side": n.side.as_str(),
                "index": n.index,
                "direction": n.direction.as_str(),
                "domain": n.domain,
                "row": n.row.as_str(),
                "connections": n.connections,
                "provenance": n.provenance.as_str(),
            })
        })
        .collect();
    root.insert("nodes".into(), Value::Array(nodes));
    let mut out = serde_json::to_string_pretty(&Value::Object(root)).expect("graph serializes");
    out.push('\n');
    out
}

fn want_str<'a>(v: &'a Value, path: &str) -> Result<&'a str, IntentError> {
    v.as_str().ok_or_else(|| schema(path, "expected string"))
}

fn want_u64(v: &Value, path: &str) -> Result<u64, IntentError> {
    v.as_u64().ok_or_else(|| schema(path, "expected unsigned integer"))
}

fn want_i64(v: &Value, path: &str) -> Result<i64, IntentError> {
    v.as_i64().ok_or_else(|| schema(path, "expected integer"))
}

fn get<'a>(obj: &'a serde_json::Map<String, Value>, key: &str, path: &str) -> Result<&'a Value, IntentError> {
    obj.get(key)
        .ok_or_else(|| schema(&format!("{}.{}", path, key), "missing field"))
}

const NODE_FIELDS: [&str; 10] = [
    "id",
    "name",
    "device_type",
    "side",
    "index",
    "direction",
    "domain",
    "row",
    "connections",
    "provenance",
];

/// Parse intent-graph JSON, reporting schema problems with a field path.
pub fn parse_intent_graph(text: &str) -> Result<IntentGraph, IntentError> {
    let value: Value = serde_json::from_str(text).map_err(|e| IntentError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let root = value.as_object().ok_or_else(|| schema("$", "expected object"))?;
    for key in root.keys() {
        if !matches!(key.as_str(), "die_nm" | "ring_style" | "nodes") {
            return Err(schema(key, "unknown field"));
        }
    }
    let die = get(root, "die_nm", "$")?
        .as_object()
        .ok_or_else(|| schema("die_nm", "expected object"))?;
    let die_w = want_i64(get(die, "w", "die_nm")?, "die_nm.w")?;
    let die_h = want_i64(get(die, "h", "die_nm")?, "die_nm.h")?;
    let style_str = want_str(get(root, "ring_style", "$")?, "ring_style")?;
    let ring_style = RingStyle::parse(style_str)
        .ok_or_else(|| schema("ring_style", format!("unknown ring style `{}`", style_str)))?;

    let nodes_value = get(root, "nodes", "$")?
        .as_array()
        .ok_or_else(|| schema("nodes", "expected array"))?;
    let mut nodes = Vec::with_capacity(nodes_value.len());
    for (i, nv) in nodes_value.iter().enumerate() {
        let path = format!("nodes[{}]", i);
        let obj = nv
            .as_object()
            .ok_or_else(|| schema(&path, "expected object"))?;
        for key in obj.keys() {
            if !NODE_FIELDS.contains(&key.as_str()) {
                return Err(schema(&format!("{}.{}", path, key), "unknown field"));
            }
        }
        let field = |k: &str| get(obj, k, &path);
        let side_str = want_str(field("side")?, &format!("{}.side", path))?;
        let side = Side::parse(side_str)
            .ok_or_else(|| schema(&format!("{}.side", path), format!("unknown side `{}`", side_str)))?;
        let dir_str = want_str(field("direction")?, &format!("{}.direction", path))?;
        let direction = Direction::parse(dir_str).ok_or_else(|| {
            schema(&format!("{}.direction", path), format!("unknown direction `{}`", dir_str))
        })?;
        let row_str = want_str(field("row")?, &format!("{}.row", path))?;
        let row = Row::parse(row_str)
            .ok_or_else(|| schema(&format!("{}.row", path), format!("unknown row `{}`", row_str)))?;
        let prov_str = want_str(field("provenance")?, &format!("{}.provenance", path))?;
        let provenance = match prov_str {
            "explicit" => Provenance::Explicit,
            "inferred" => Provenance::Inferred,
            other => {
                return Err(schema(
                    &format!("{}.provenance", path),
                    format!("unknown provenance `{}`", other),
                ))
            }
        };
        let conn_value = field("connections")?
            .as_object()
            .ok_or_else(|| schema(&format!("{}.connections", path), "expected object"))?;
        let mut connections = BTreeMap::new();
        for (pin, net) in conn_value {
            let net = want_str(net, &format!("{}.connections.{}", path, pin))?;
            connections.insert(pin.clone(), net.to_string());
        }
        nodes.push(IntentNode {
            id: want_str(field("id")?, &format!("{}.id", path))?.to_string(),
            name: want_str(field("name")?, &format!("{}.name", path))?.to_string(),
            device_type: want_str(field("device_type")?, &format!("{}.device_type", path))?
                .to_string(),
            side,
            index: want_u64(field("index")?, &format!("{}.index", path))? as usize,
            direction,
            domain: want_str(field("domain")?, &format!("{}.domain", path))?.to_string(),
            row,
            connections,
            provenance,
        });
    }
    Ok(IntentGraph {
        die_w,
        die_h,
        ring_style,
        nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_graph() -> IntentGraph {
        let mk = |id: &str, name: &str, device: &str, side: Side, index: usize| IntentNode {
            id: id.into(),
            name: name.into(),
            device_type: device.into(),
            side,
            index,
            direction: Direction::Bidir,
            domain: "DVDD".into(),
            row: Row::Outer,
            connections: BTreeMap::from([("PAD".to_string(), name.to_string())]),
            provenance: Provenance::Explicit,
        };
        let corner = |id: &str, name: &str, side: Side| IntentNode {
            id: id.into(),
            name: name.into(),
            device_type: "CORNER".into(),
            side,
            index: 0,
            direction: Direction::Passive,
            domain: "DVDD".into(),
            row: Row::Outer,
            connections: BTreeMap::new(),
            provenance: Provenance::Inferred,
        };
        IntentGraph {
            die_w: 600_000,
            die_h: 600_000,
            ring_style: RingStyle::SingleRow,
            nodes: vec![
                corner("n000", "CORNER_SW", Side::S),
                {
                    let mut n = mk("n001", "D0", "PAD_DIG", Side::S, 1);
                    n.connections = BTreeMap::from([("PAD".to_string(), "D0".to_string())]);
                    n
                },
                corner("n002", "CORNER_SE", Side::E),
                mk("n003", "VDD1", "PAD_VDD", Side::E, 1),
                corner("n004", "CORNER_NE", Side::N),
                mk("n005", "D1", "PAD_DIG", Side::N, 1),
                corner("n006", "CORNER_NW", Side::W),
                mk("n007", "VSS1", "PAD_VSS", Side::W, 1),
            ],
        }
    }

    #[test]
    fn serialize_then_parse_is_identity() {
        let g = tiny_graph();
        let text = serialize_intent_graph(&g);
        let back = parse_intent_graph(&text).unwrap();
        assert_eq!(g, back);
        // Canonicity: serialize . parse . serialize == serialize.
        assert_eq!(text, serialize_intent_graph(&back));
    }

    #[test]
    fn serialization_is_byte_stable() {
        let g = tiny_graph();
        assert_eq!(serialize_intent_graph(&g), serialize_intent_graph(&g));
    }

    #[test]
    fn missing_field_reports_path() {
        let g = tiny_graph();
        let mut v: Value = serde_json::from_str(&serialize_intent_graph(&g)).unwrap();
        v["nodes"][3].as_object_mut().unwrap().remove("device_type");
        match parse_intent_graph(&v.to_string()) {
            Err(IntentError::Schema { path, .. }) => assert_eq!(path, "nodes[3].device_type"),
            other => panic!("expected schema error, got {:?}", other),
        }
    }

    #[test]
    fn unknown_field_is_rejected() {
        let g = tiny_graph();
        let mut v: Value = serde_json::from_str(&serialize_intent_graph(&g)).unwrap();
        v["nodes"][0]
            .as_object_mut()
            .unwrap()
            .insert("color".into(), Value::String("red".into()));
        assert!(matches!(
            parse_intent_graph(&v.to_string()),
            Err(IntentError::Schema { .. })
        ));
    }

    #[test]
    fn non_json_is_a_parse_error() {
        assert!(matches!(
            parse_intent_graph("not json"),
            Err(IntentError::Parse { .. })
        ));
    }

    #[test]
    fn tiny_graph_validates_clean() {
        let kb = KnowledgeBase::load_default();
        let report = validate_intent_graph(&tiny_graph(), &kb);
        assert!(report.passed, "issues: {:?}", report.issues);
    }

    #[test]
    fn three_corners_is_missing_corner() {
        let kb = KnowledgeBase::load_default();
        let mut g = tiny_graph();
        g.nodes.remove(6); // drop CORNER_NW
        let report = validate_intent_graph(&g, &kb);
        assert!(!report.passed);
        assert!(report.has_code("MISSING_CORNER"));
    }

    #[test]
    fn adjacent_domains_without_breaker_leak() {
        let kb = KnowledgeBase::load_default();
        let mut g = tiny_graph();
        g.nodes[3].domain = "AVDD".into(); // VDD1 now analog, neighbors digital
        let report = validate_intent_graph(&g, &kb);
        assert!(report.has_code("DOMAIN_LEAK"));
    }
}
