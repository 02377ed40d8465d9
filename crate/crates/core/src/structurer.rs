// SPDX-License-Identifier: Apache-2.0
//! Intent graph construction from a pad plan.
//!
//! Explicit completion resolves each named pin against the knowledge base,
//! with per-pin overrides winning field-wise over pattern inference.
//! Implicit inference then inserts what the plan never mentions: the four
//! corner cells and, where power domains change along the ring, isolation
//! breakers. An external structurer (e.g. a language model behind an HTTP
//! endpoint) can replace the deterministic path; its output is parsed and
//! validated like any other graph.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::geom::Side;
use crate::intent::{
    parse_intent_graph, validate_intent_graph, IntentGraph, IntentNode, Provenance,
    ValidationReport,
};
use crate::kb::{expand_template, Direction, KnowledgeBase, SignalClass};
use crate::padplan::{DirectiveKind, PadPlanSpec, PinEntry, PinOverrides, RingStyle, Row};

/// Placeholder device for pins the structurer could not resolve in
/// non-strict mode; downstream validation reports it as an unknown device.
pub const UNRESOLVED: &str = "UNRESOLVED";

#[derive(Debug, Error)]
pub enum StructureError {
    #[error("unresolved pin `{0}`: no knowledge-base pattern matches and overrides are incomplete")]
    UnresolvedPin(String),
    #[error("domain configuration error: {0}")]
    DomainConfig(String),
    #[error("ESD rule violated: domain `{0}` lacks a supply or ground pad")]
    EsdRule(String),
    #[error("endpoint error: {0}")]
    Endpoint(String),
    #[error("malformed external response after retries: {0}")]
    MalformedResponse(String),
    #[error("external graph failed validation: {codes:?}")]
    ExternalValidation {
        codes: Vec<String>,
        report: ValidationReport,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructurerMode {
    Deterministic,
    External,
}

#[derive(Debug, Clone)]
pub struct StructurerConfig {
    pub mode: StructurerMode,
    pub endpoint: Option<String>,
    /// Fail (true) or warn via unresolved markers (false) on pins without a
    /// pattern match or complete overrides.
    pub strict: bool,
}

impl Default for StructurerConfig {
    fn default() -> Self {
        StructurerConfig {
            mode: StructurerMode::Deterministic,
            endpoint: None,
            strict: false,
        }
    }
}

/// Fully resolved (or explicitly unresolved) attributes for one pin.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeAttributes {
    pub device_type: String,
    pub direction: Direction,
    pub domain: String,
    pub connections: BTreeMap<String, String>,
    pub signal_class: Option<SignalClass>,
    pub resolved: bool,
}

/// Resolve one pin: knowledge-base pattern result overlaid with the entry's
/// overrides, override winning per field. Connection templates expand with
/// the resolved domain.
pub fn infer_node_attributes(
    entry: &PinEntry,
    kb: &KnowledgeBase,
    strict: bool,
) -> Result<NodeAttributes, StructureError> {
    let rule = kb.match_pattern(&entry.name).rule();
    let ov = &entry.overrides;

    let domain_name = ov
        .domain
        .clone()
        .or_else(|| rule.map(|r| r.domain.clone()));
    if let Some(name) = &domain_name {
        if kb.domain(name).is_none() {
            return Err(StructureError::DomainConfig(format!(
                "pin `{}` references undefined domain `{}`",
                entry.name, name
            )));
        }
    }

    match rule {
        Some(rule) => {
            let domain_name = domain_name.expect("rule carries a domain");
            let domain = kb.domain(&domain_name).expect("checked above");
            let connections = match &ov.connections {
                Some(c) => c.clone(),
                None => rule
                    .connections
                    .iter()
                    .map(|(pin, t)| (pin.clone(), expand_template(t, &entry.name, domain)))
                    .collect(),
            };
            Ok(NodeAttributes {
                device_type: ov.device_type.clone().unwrap_or_else(|| rule.device_type.clone()),
                direction: ov.direction.unwrap_or(rule.direction),
                domain: domain_name,
                connections,
                signal_class: Some(rule.signal_class),
                resolved: true,
            })
        }
        None => {
            let complete = ov.device_type.is_some()
                && ov.direction.is_some()
                && domain_name.is_some()
                && ov.connections.is_some();
            if complete {
                Ok(NodeAttributes {
                    device_type: ov.device_type.clone().unwrap(),
                    direction: ov.direction.unwrap(),
                    domain: domain_name.unwrap(),
                    connections: ov.connections.clone().unwrap(),
                    signal_class: None,
                    resolved: true,
                })
            } else if strict {
                Err(StructureError::UnresolvedPin(entry.name.clone()))
            } else {
                Ok(NodeAttributes {
                    device_type: ov.device_type.clone().unwrap_or_else(|| UNRESOLVED.into()),
                    direction: ov.direction.unwrap_or(Direction::Passive),
                    domain: domain_name.unwrap_or_else(|| UNRESOLVED.into()),
                    connections: ov.connections.clone().unwrap_or_default(),
                    signal_class: None,
                    resolved: false,
                })
            }
        }
    }
}

struct SeedNode {
    name: String,
    attrs: NodeAttributes,
    side: Side,
    row: Row,
    provenance: Provenance,
    kind: SeedKind,
}

#[derive(PartialEq, Clone, Copy)]
enum SeedKind {
    Pad,
    Corner,
    Breaker,
}

/// Build the intent graph: explicit completion for every spec pin, corner
/// auto-insertion, breaker insertion at domain changes, directive
/// application and the per-domain ESD supply check.
pub fn structure_intent(
    spec: &PadPlanSpec,
    kb: &KnowledgeBase,
    cfg: &StructurerConfig,
) -> Result<IntentGraph, StructureError> {
    // Directive pre-pass: custom cells and local-ESD domain declarations.
    let mut custom_cells: BTreeMap<String, String> = BTreeMap::new();
    let mut local_esd_domains: Vec<String> = Vec::new();
    let mut domain_order: Option<Vec<String>> = None;
    let mut ring_style = spec.ring_style;
    for d in &spec.directives {
        match d.kind {
            DirectiveKind::UseCustomCell => {
                custom_cells.insert(d.args["name"].clone(), d.args["cell"].clone());
            }
            DirectiveKind::LocalEsdDomain => {
                let name = d.args["domain"].clone();
                if kb.domain(&name).is_none() {
                    return Err(StructureError::DomainConfig(format!(
                        "local ESD directive references undefined domain `{}`",
                        name
                    )));
                }
                local_esd_domains.push(name);
            }
            DirectiveKind::SetDomainOrder => {
                domain_order = Some(d.args["order"].split(',').map(str::to_string).collect());
            }
            DirectiveKind::SetRingStyle => {
                ring_style = RingStyle::parse(&d.args["style"]).expect("validated at parse");
            }
        }
    }
    for target in custom_cells.keys() {
        if !spec.sides.values().flatten().any(|p| &p.name == target) {
            return Err(StructureError::DomainConfig(format!(
                "custom-cell directive targets unknown pin `{}`",
                target
            )));
        }
    }

    // Explicit completion, in ring order: S, E, N, W.
    let mut pads_per_side: BTreeMap<Side, Vec<SeedNode>> = BTreeMap::new();
    for side in Side::RING_ORDER {
        let mut seeds = Vec::new();
        for entry in spec.side(side) {
            let mut attrs = infer_node_attributes(entry, kb, cfg.strict)?;
            if entry.overrides.device_type.is_none() {
                if let Some(cell) = custom_cells.get(&entry.name) {
                    attrs.device_type = cell.clone();
                }
            }
            seeds.push(SeedNode {
                name: entry.name.clone(),
                row: entry.overrides.row.unwrap_or(Row::Outer),
                side,
                attrs,
                provenance: Provenance::Explicit,
                kind: SeedKind::Pad,
            });
        }
        pads_per_side.insert(side, seeds);
    }

    // Implicit inference 1: corner cells at the side boundaries. A corner
    // adopts the domain of its nearest preceding pad (cyclically), so
    // breakers never abut corners unnecessarily.
    let corner_master = kb.corner().name.clone();
    let corner_names = [
        (Side::S, "CORNER_SW"),
        (Side::E, "CORNER_SE"),
        (Side::N, "CORNER_NE"),
        (Side::W, "CORNER_NW"),
    ];
    let mut ring: Vec<SeedNode> = Vec::new();
    for (side, corner_name) in corner_names {
        ring.push(SeedNode {
            name: corner_name.to_string(),
            attrs: NodeAttributes {
                device_type: corner_master.clone(),
                direction: Direction::Passive,
                domain: String::new(), // filled below
                connections: BTreeMap::new(),
                signal_class: None,
                resolved: true,
            },
            side,
            row: Row::Outer,
            provenance: Provenance::Inferred,
            kind: SeedKind::Corner,
        });
        ring.append(pads_per_side.get_mut(&side).unwrap());
    }
    let n = ring.len();
    for i in 0..n {
        if ring[i].kind != SeedKind::Corner {
            continue;
        }
        let mut domain = None;
        for back in 1..n {
            let j = (i + n - back) % n;
            if ring[j].kind == SeedKind::Pad {
                domain = Some(ring[j].attrs.domain.clone());
                break;
            }
        }
        ring[i].attrs.domain = domain.expect("plans contain at least one pad");
    }

    // Per-domain ESD supplies: a domain in use must contain a pad tied to
    // its vdd rail and one tied to its vss rail. Local-ESD domains are
    // checked even when the global rule is off.
    let used_domains: Vec<String> = {
        let mut v: Vec<String> = ring
            .iter()
            .filter(|s| s.kind == SeedKind::Pad && s.attrs.resolved)
            .map(|s| s.attrs.domain.clone())
            .collect();
        v.sort();
        v.dedup();
        v
    };
    for domain_name in &used_domains {
        let must_check =
            kb.rules.esd_supply_per_domain || local_esd_domains.contains(domain_name);
        if !must_check {
            continue;
        }
        let Some(domain) = kb.domain(domain_name) else {
            continue; // unresolved marker domain, reported by validation
        };
        let tied_to = |net: &str| {
            ring.iter().any(|s| {
                s.kind == SeedKind::Pad
                    && s.attrs.domain == *domain_name
                    && s.attrs.connections.values().any(|v| v == net)
            })
        };
        if !tied_to(&domain.vdd_net) || !tied_to(&domain.vss_net) {
            return Err(StructureError::EsdRule(domain_name.clone()));
        }
    }

    // Local-ESD domains must form a single contiguous island on the ring.
    for domain_name in &local_esd_domains {
        let member: Vec<bool> = ring
            .iter()
            .map(|s| s.kind == SeedKind::Pad && &s.attrs.domain == domain_name)
            .collect();
        let pads: Vec<bool> = member
            .iter()
            .zip(&ring)
            .filter(|(_, s)| s.kind == SeedKind::Pad)
            .map(|(m, _)| *m)
            .collect();
        let blocks = count_cyclic_blocks(&pads);
        if blocks > 1 {
            return Err(StructureError::DomainConfig(format!(
                "local ESD domain `{}` is split into {} ring segments",
                domain_name, blocks
            )));
        }
    }

    // Domain-order directive: each listed domain must appear as one block,
    // in the given cyclic order.
    if let Some(order) = &domain_order {
        let mut seq: Vec<String> = Vec::new();
        for s in ring.iter().filter(|s| s.kind == SeedKind::Pad) {
            if seq.last() != Some(&s.attrs.domain) {
                seq.push(s.attrs.domain.clone());
            }
        }
        if seq.len() > 1 && seq.first() == seq.last() {
            seq.pop(); // cyclic wrap
        }
        let listed: Vec<String> = seq.iter().filter(|d| order.contains(d)).cloned().collect();
        let ok = listed.len() <= order.len() && {
            // `listed` must be a rotation of the order list restricted to
            // the domains actually present.
            let present: Vec<String> =
                order.iter().filter(|d| listed.contains(d)).cloned().collect();
            if present.is_empty() {
                true
            } else {
                let mut rotations_ok = false;
                for rot in 0..present.len() {
                    let rotated: Vec<String> = (0..present.len())
                        .map(|i| present[(i + rot) % present.len()].clone())
                        .collect();
                    if rotated == listed {
                        rotations_ok = true;
                        break;
                    }
                }
                rotations_ok
            }
        };
        if !ok {
            return Err(StructureError::DomainConfig(format!(
                "ring domain sequence {:?} violates requested order {:?}",
                seq, order
            )));
        }
    }

    // Implicit inference 2: breakers at every adjacent domain change.
    if kb.rules.domain_isolation_required {
        let breaker_master = kb.breaker().name.clone();
        let mut with_breakers: Vec<SeedNode> = Vec::new();
        let n = ring.len();
        for i in 0..n {
            let next = (i + 1) % n;
            let departing = ring[i].attrs.domain.clone();
            let arriving = ring[next].attrs.domain.clone();
            let name = ring[i].name.clone();
            let side = if ring[next].kind == SeedKind::Corner {
                // Change exactly at a side boundary: the breaker still sits
                // before the corner, on the departing side.
                ring[i].side
            } else {
                ring[next].side
            };
            with_breakers.push(ring[i].clone_seed());
            if departing != arriving {
                with_breakers.push(SeedNode {
                    name: format!("BRK_{}", name),
                    attrs: NodeAttributes {
                        device_type: breaker_master.clone(),
                        direction: Direction::Passive,
                        domain: departing,
                        connections: BTreeMap::new(),
                        signal_class: None,
                        resolved: true,
                    },
                    side,
                    row: Row::Outer,
                    provenance: Provenance::Inferred,
                    kind: SeedKind::Breaker,
                });
            }
        }
        ring = with_breakers;
    }

    // Assign ids and (side, index) positions by walking the final ring.
    let mut nodes = Vec::with_capacity(ring.len());
    let mut side_slot: isize = -1;
    let mut index_in_side = 0usize;
    for (i, seed) in ring.into_iter().enumerate() {
        if seed.kind == SeedKind::Corner {
            side_slot += 1;
            index_in_side = 0;
        }
        let side = Side::RING_ORDER[(side_slot.max(0) as usize).min(3)];
        nodes.push(IntentNode {
            id: format!("n{:03}", i),
            name: seed.name,
            device_type: seed.attrs.device_type,
            side,
            index: index_in_side,
            direction: seed.attrs.direction,
            domain: seed.attrs.domain,
            row: seed.row,
            connections: seed.attrs.connections,
            provenance: seed.provenance,
        });
        index_in_side += 1;
    }

    Ok(IntentGraph {
        die_w: spec.die_w,
        die_h: spec.die_h,
        ring_style,
        nodes,
    })
}

impl SeedNode {
    fn clone_seed(&self) -> SeedNode {
        SeedNode {
            name: self.name.clone(),
            attrs: self.attrs.clone(),
            side: self.side,
            row: self.row,
            provenance: self.provenance,
            kind: self.kind,
        }
    }
}

/// Number of contiguous `true` blocks in a cyclic boolean sequence.
fn count_cyclic_blocks(v: &[bool]) -> usize {
    if v.is_empty() || v.iter().all(|&b| !b) {
        return 0;
    }
    if v.iter().all(|&b| b) {
        return 1;
    }
    let n = v.len();
    (0..n).filter(|&i| v[i] && !v[(i + n - 1) % n]).count()
}

/// Reconstruct a pad plan from a graph's explicit nodes, carrying every
/// attribute as an override. Structuring the result reproduces the graph;
/// this is also the handle for regeneration workflows.
pub fn spec_from_graph(graph: &IntentGraph) -> PadPlanSpec {
    let mut sides: BTreeMap<Side, Vec<PinEntry>> = BTreeMap::new();
    for side in [Side::N, Side::E, Side::S, Side::W] {
        sides.insert(side, Vec::new());
    }
    for node in &graph.nodes {
        if node.provenance != Provenance::Explicit {
            continue;
        }
        sides.get_mut(&node.side).unwrap().push(PinEntry {
            name: node.name.clone(),
            overrides: PinOverrides {
                device_type: Some(node.device_type.clone()),
                direction: Some(node.direction),
                domain: Some(node.domain.clone()),
                row: Some(node.row),
                connections: Some(node.connections.clone()),
            },
        });
    }
    PadPlanSpec {
        die_w: graph.die_w,
        die_h: graph.die_h,
        sides,
        directives: Vec::new(),
        ring_style: graph.ring_style,
    }
}

/// Ask an external structurer endpoint to build the graph. The request is
/// a JSON POST `{"system": <KB document>, "input": <plan JSON>, "schema":
/// "intent_graph_v1"}`; the expected response is `{"graph": <intent graph
/// JSON>}`. Malformed responses are retried twice; a graph that parses but
/// fails validation is surfaced immediately.
pub fn structure_intent_external(
    spec: &PadPlanSpec,
    kb: &KnowledgeBase,
    cfg: &StructurerConfig,
) -> Result<IntentGraph, StructureError> {
    let endpoint = cfg
        .endpoint
        .as_deref()
        .ok_or_else(|| StructureError::Endpoint("external mode requires an endpoint".into()))?;
    let input: serde_json::Value =
        serde_json::from_str(&spec.to_json()).expect("plan JSON is valid");
    let payload = serde_json::json!({
        "system": kb.serialize(),
        "input": input,
        "schema": "intent_graph_v1",
    });
    let body = payload.to_string();

    let mut last_malformed = String::new();
    for _attempt in 0..3 {
        let response = ureq::post(endpoint)
            .set("content-type", "application/json")
            .send_string(&body)
            .map_err(|e| StructureError::Endpoint(e.to_string()))?;
        let text = response
            .into_string()
            .map_err(|e| StructureError::Endpoint(e.to_string()))?;
        let graph_value: Option<serde_json::Value> = serde_json::from_str::<serde_json::Value>(&text)
            .ok()
            .and_then(|mut v| v.get_mut("graph").map(serde_json::Value::take));
        let Some(graph_value) = graph_value else {
            last_malformed = "response is not JSON with a `graph` field".into();
            continue;
        };
        match parse_intent_graph(&graph_value.to_string()) {
            Ok(graph) => {
                let report = validate_intent_graph(&graph, kb);
                if report.passed {
                    return Ok(graph);
                }
                return Err(StructureError::ExternalValidation {
                    codes: report.error_codes().iter().map(|s| s.to_string()).collect(),
                    report,
                });
            }
            Err(e) => {
                last_malformed = e.to_string();
                continue;
            }
        }
    }
    Err(StructureError::MalformedResponse(last_malformed))
}

/// Deterministic-vs-external dispatch.
pub fn build_intent(
    spec: &PadPlanSpec,
    kb: &KnowledgeBase,
    cfg: &StructurerConfig,
) -> Result<IntentGraph, StructureError> {
    match cfg.mode {
        StructurerMode::Deterministic => structure_intent(spec, kb, cfg),
        StructurerMode::External => structure_intent_external(spec, kb, cfg),
    }
}
