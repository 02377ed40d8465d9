// SPDX-License-Identifier: Apache-2.0
//! Netlist generation and layout extraction.
//!
//! `generate_netlist` expands the intent graph into the schematic netlist:
//! signal pins follow each node's connections, rail pins tie to the node
//! domain's vdd/vss nets, breakers contribute an instance but no rail nets.
//! `extract_netlist` rebuilds connectivity from placed geometry: rails are
//! traced by union-find over abutting rail-continuous cells and named from
//! the supply pads they reach; unseeded rail segments come back as
//! `FLOAT_<n>` nets with a warning.

use std::collections::{BTreeMap, BTreeSet};

use crate::geom::Rect;
use crate::intent::IntentGraph;
use crate::kb::{CellKind, KnowledgeBase, PinRole};
use crate::layout::LayoutDb;

/// Instance-and-net view used by schematic generation, extraction and LVS.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Netlist {
    /// instance name -> cell master name
    pub instances: BTreeMap<String, String>,
    /// net name -> set of (instance, pin)
    pub nets: BTreeMap<String, BTreeSet<(String, String)>>,
}

impl Netlist {
    pub fn connect(&mut self, net: &str, inst: &str, pin: &str) {
        self.nets
            .entry(net.to_string())
            .or_default()
            .insert((inst.to_string(), pin.to_string()));
    }

    /// Membership map (instance, pin) -> net name.
    pub fn pin_to_net(&self) -> BTreeMap<(String, String), String> {
        let mut map = BTreeMap::new();
        for (net, pins) in &self.nets {
            for pin in pins {
                map.insert(pin.clone(), net.clone());
            }
        }
        map
    }
}

/// Layout extraction output: the netlist plus floating-rail warnings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    pub netlist: Netlist,
    /// One entry per rail segment reachable from no supply pad.
    pub warnings: Vec<String>,
}

/// Expand the graph into the schematic netlist. One instance per node;
/// fillers are not nodes and therefore never appear.
pub fn generate_netlist(graph: &IntentGraph, kb: &KnowledgeBase) -> Netlist {
    let mut netlist = Netlist::default();
    for node in &graph.nodes {
        let master = kb
            .cell(&node.device_type)
            .expect("generate_netlist requires a validated graph");
        netlist
            .instances
            .insert(node.name.clone(), master.name.clone());
        for (pin, net) in &node.connections {
            netlist.connect(net, &node.name, pin);
        }
        // Breakers cut rail continuity: no rail nets on them.
        if master.kind == CellKind::Breaker {
            continue;
        }
        let domain = kb
            .domain(&node.domain)
            .expect("generate_netlist requires a validated graph");
        for rail_pin in master.rail_pins() {
            let net = match rail_pin.role {
                PinRole::RailVdd => &domain.vdd_net,
                PinRole::RailVss => &domain.vss_net,
                _ => unreachable!(),
            };
            netlist.connect(net, &node.name, &rail_pin.name);
        }
    }
    netlist
}

/* =========================
 *   Union-Find
 * ========================= */
struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let mut a = self.find(a);
        let mut b = self.find(b);
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Rail {
    Vdd,
    Vss,
}

/// Extract a netlist from placed geometry.
///
/// Rails: union-find over instances whose masters propagate the rail,
/// joined wherever their bounding boxes abut (edge contact of positive
/// length). Fillers propagate rails but are filtered from the result.
/// Signals: taken from pad pin identities, i.e. each pad's signal pins net
/// per the graph's connections.
pub fn extract_netlist(layout: &LayoutDb, graph: &IntentGraph, kb: &KnowledgeBase) -> Extraction {
    let mut netlist = Netlist::default();
    let mut warnings = Vec::new();

    let node_by_id: BTreeMap<&str, &crate::intent::IntentNode> =
        graph.nodes.iter().map(|n| (n.id.as_str(), n)).collect();

    // Non-filler instances become netlist instances.
    for inst in &layout.instances {
        if inst.kind == CellKind::Filler {
            continue;
        }
        netlist
            .instances
            .insert(inst.name.clone(), inst.master.clone());
    }

    // Signal pins from pad identities.
    for inst in &layout.instances {
        let Some(node) = node_by_id.get(inst.id.as_str()) else {
            continue;
        };
        for (pin, net) in &node.connections {
            netlist.connect(net, &inst.name, pin);
        }
    }

    // Rail tracing, one union-find per rail.
    let bboxes: Vec<Rect> = layout.instances.iter().map(|i| i.bbox(kb)).collect();
    let mut float_counter = 0usize;
    let mut used_names: BTreeSet<String> = BTreeSet::new();
    for rail in [Rail::Vdd, Rail::Vss] {
        let continuous: Vec<bool> = layout
            .instances
            .iter()
            .map(|i| {
                let master = kb.cell(&i.master).expect("instance master exists");
                match rail {
                    Rail::Vdd => master.rail_continuity.vdd,
                    Rail::Vss => master.rail_continuity.vss,
                }
            })
            .collect();
        let n = layout.instances.len();
        let mut uf = UnionFind::new(n);
        for a in 0..n {
            if !continuous[a] {
                continue;
            }
            for b in (a + 1)..n {
                if continuous[b] && bboxes[a].abuts(&bboxes[b]) {
                    uf.union(a, b);
                }
            }
        }

        // Group rail-carrying members per component, in instance order.
        let mut components: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..n {
            if continuous[i] {
                let root = uf.find(i);
                components.entry(root).or_default().push(i);
            }
        }

        // Name each component from the supply pads it contains: a supply
        // pad is a node with a signal connection tied to its domain's rail
        // net. Merged domains produce a joined name; LVS flags the short
        // via the net partition regardless of the name.
        let mut ordered: Vec<Vec<usize>> = components.into_values().collect();
        ordered.sort_by_key(|members| layout.instances[members[0]].name.clone());
        for members in ordered {
            let mut seeds: BTreeSet<String> = BTreeSet::new();
            for &i in &members {
                let inst = &layout.instances[i];
                let Some(node) = node_by_id.get(inst.id.as_str()) else {
                    continue;
                };
                let Some(domain) = kb.domain(&node.domain) else {
                    continue;
                };
                let rail_net = match rail {
                    Rail::Vdd => &domain.vdd_net,
                    Rail::Vss => &domain.vss_net,
                };
                if node.connections.values().any(|v| v == rail_net) {
                    seeds.insert(rail_net.clone());
                }
            }
            let base_name = if seeds.is_empty() {
                let name = format!("FLOAT_{}", float_counter);
                float_counter += 1;
                let members_desc: Vec<&str> = members
                    .iter()
                    .map(|&i| layout.instances[i].name.as_str())
                    .collect();
                warnings.push(format!(
                    "floating {} rail segment {}: {}",
                    match rail {
                        Rail::Vdd => "vdd",
                        Rail::Vss => "vss",
                    },
                    name,
                    members_desc.join(" ")
                ));
                name
            } else {
                seeds.iter().cloned().collect::<Vec<_>>().join("+")
            };
            // A split rail would seed the same name twice; disambiguate for
            // diagnostics (names are not part of LVS equivalence).
            let mut name = base_name.clone();
            let mut k = 2;
            while !used_names.insert(name.clone()) {
                name = format!("{}__{}", base_name, k);
                k += 1;
            }

            for &i in &members {
                let inst = &layout.instances[i];
                if inst.kind == CellKind::Filler {
                    continue;
                }
                let master = kb.cell(&inst.master).expect("instance master exists");
                for pin in master.rail_pins() {
                    let matches_rail = matches!(
                        (rail, pin.role),
                        (Rail::Vdd, PinRole::RailVdd) | (Rail::Vss, PinRole::RailVss)
                    );
                    if matches_rail {
                        netlist.connect(&name, &inst.name, &pin.name);
                    }
                }
                // Supply pads tie their bond pad to the rail internally, so
                // the pad pin joins the rail component's net.
                if let Some(node) = node_by_id.get(inst.id.as_str()) {
                    if let Some(domain) = kb.domain(&node.domain) {
                        let rail_net = match rail {
                            Rail::Vdd => &domain.vdd_net,
                            Rail::Vss => &domain.vss_net,
                        };
                        for (pin, net) in &node.connections {
                            if net == rail_net {
                                netlist.connect(&name, &inst.name, pin);
                            }
                        }
                    }
                }
            }
        }
    }

    // The signal-identity pass and the rail pass may both have netted a
    // supply pad's PAD pin (under the same name when the layout is
    // correct). Merge nets that share a pin to keep the partition a
    // partition.
    let netlist = merge_overlapping_nets(netlist);
    Extraction { netlist, warnings }
}

/// Union nets that share any (instance, pin) member. The surviving net
/// keeps the lexicographically smallest name among each merged group.
fn merge_overlapping_nets(netlist: Netlist) -> Netlist {
    let names: Vec<String> = netlist.nets.keys().cloned().collect();
    let index: BTreeMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let mut uf = UnionFind::new(names.len());
    let mut pin_owner: BTreeMap<&(String, String), usize> = BTreeMap::new();
    for (net, pins) in &netlist.nets {
        let ni = index[net.as_str()];
        for pin in pins {
            match pin_owner.get(pin) {
                Some(&prev) => uf.union(prev, ni),
                None => {
                    pin_owner.insert(pin, ni);
                }
            }
        }
    }
    let mut grouped: BTreeMap<usize, (String, BTreeSet<(String, String)>)> = BTreeMap::new();
    for (net, pins) in netlist.nets {
        let root = uf.find(index[net.as_str()]);
        let entry = grouped
            .entry(root)
            .or_insert_with(|| (net.clone(), BTreeSet::new()));
        if net < entry.0 {
            entry.0 = net;
        }
        entry.1.extend(pins);
    }
    let mut merged = Netlist {
        instances: netlist.instances,
        nets: BTreeMap::new(),
    };
    for (_, (name, pins)) in grouped {
        merged.nets.entry(name).or_default().extend(pins);
    }
    merged
}

/// Line-oriented netlist text: `INST <name> <master>` then
/// `NET <net> <inst>.<pin> ...`, all sorted, `#` comments.
pub fn netlist_to_text(netlist: &Netlist) -> String {
    let mut out = String::new();
    for (name, master) in &netlist.instances {
        out.push_str(&format!("INST {} {}\n", name, master));
    }
    for (net, pins) in &netlist.nets {
        let joined: Vec<String> = pins.iter().map(|(i, p)| format!("{}.{}", i, p)).collect();
        out.push_str(&format!("NET {} {}\n", net, joined.join(" ")));
    }
    out
}

/// Inverse of [`netlist_to_text`].
pub fn netlist_from_text(text: &str) -> Result<Netlist, String> {
    let mut netlist = Netlist::default();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("INST") => {
                let name = tokens.next().ok_or(format!("line {}: INST needs name", lineno + 1))?;
                let master = tokens
                    .next()
                    .ok_or(format!("line {}: INST needs master", lineno + 1))?;
                netlist.instances.insert(name.to_string(), master.to_string());
            }
            Some("NET") => {
                let net = tokens.next().ok_or(format!("line {}: NET needs name", lineno + 1))?;
                for pin in tokens {
                    let (inst, pin) = pin
                        .split_once('.')
                        .ok_or(format!("line {}: pin `{}` not inst.pin", lineno + 1, pin))?;
                    netlist.connect(net, inst, pin);
                }
            }
            Some(other) => return Err(format!("line {}: unknown record `{}`", lineno + 1, other)),
            None => continue,
        }
    }
    Ok(netlist)
}
