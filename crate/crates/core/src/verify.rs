// SPDX-License-Identifier: Apache-2.0
//! Built-in signoff: geometric design-rule checks on the layout database
//! and layout-versus-schematic comparison of netlists.
//!
//! The DRC rule set is fixed and small; it covers every failure mode a
//! ring-level layout can exhibit:
//!
//! - DRC.1 abutment: consecutive outer-row cells on a side, including the
//!   two corners, touch within `abut_tol`.
//! - DRC.2 containment: every bounding box inside the die outline.
//! - DRC.3 overlap: zero-area intersection between same-row cells.
//! - DRC.4 corner presence: four corner cells anchored at the die corners.
//! - DRC.5 closure: each side's outer row tiles the full die edge.
//! - DRC.6 domain isolation: adjacent differing-domain cells on the outer
//!   ring are separated by a breaker.
//! - DRC.7 stagger: inner-row cells sit exactly one row offset inward and
//!   overlap two outer neighbors by the minimum overlap.
//! - DRC.8 grid: all origins on the placement grid.
//!
//! LVS compares net partitions, not net names: an open is one schematic
//! net split across several extracted nets, a short is several schematic
//! nets merged into one extracted net.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::geom::{Nm, Rect, Side};
use crate::kb::{CellKind, KnowledgeBase};
use crate::layout::{LayoutDb, PlacedInstance};
use crate::netlist::Netlist;
use crate::padplan::Row;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrcViolation {
    pub rule_code: String,
    pub message: String,
    /// Location rectangle in die coordinates, nm.
    pub location: [Nm; 4],
    pub instances: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrcReport {
    pub passed: bool,
    pub violations: Vec<DrcViolation>,
}

impl DrcReport {
    pub fn rule_codes(&self) -> Vec<&str> {
        let mut codes: Vec<&str> = self.violations.iter().map(|v| v.rule_code.as_str()).collect();
        codes.sort_unstable();
        codes.dedup();
        codes
    }

    pub fn to_json(&self, case_id: &str) -> String {
        let value = serde_json::json!({
            "tool": "drc",
            "case_id": case_id,
            "passed": self.passed,
            "violations": self.violations,
        });
        let mut out = serde_json::to_string_pretty(&value).expect("report serializes");
        out.push('\n');
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LvsDiffKind {
    MissingInstance,
    ExtraInstance,
    Open,
    Short,
    PinMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LvsDiff {
    pub kind: LvsDiffKind,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LvsStatus {
    Clean,
    Mismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LvsReport {
    pub status: LvsStatus,
    pub diffs: Vec<LvsDiff>,
}

impl LvsReport {
    pub fn clean(&self) -> bool {
        self.status == LvsStatus::Clean
    }

    pub fn kinds(&self) -> Vec<LvsDiffKind> {
        let mut kinds: Vec<LvsDiffKind> = self.diffs.iter().map(|d| d.kind).collect();
        kinds.sort_unstable();
        kinds.dedup();
        kinds
    }

    pub fn to_json(&self, case_id: &str) -> String {
        let value = serde_json::json!({
            "tool": "lvs",
            "case_id": case_id,
            "status": self.status,
            "diffs": self.diffs,
        });
        let mut out = serde_json::to_string_pretty(&value).expect("report serializes");
        out.push('\n');
        out
    }
}

fn rect_loc(r: &Rect) -> [Nm; 4] {
    [r.x0, r.y0, r.x1, r.y1]
}

/// Along-side interval of an instance: x extent on S/N, y extent on E/W.
fn along_interval(inst: &PlacedInstance, bbox: &Rect) -> (Nm, Nm) {
    match inst.side {
        Side::S | Side::N => (bbox.x0, bbox.x1),
        Side::E | Side::W => (bbox.y0, bbox.y1),
    }
}

/// Run the fixed rule set over a layout.
pub fn run_drc(layout: &LayoutDb, kb: &KnowledgeBase) -> DrcReport {
    let mut violations: Vec<DrcViolation> = Vec::new();
    let mut violate = |rule: &str, message: String, location: Rect, instances: Vec<String>| {
        violations.push(DrcViolation {
            rule_code: rule.to_string(),
            message,
            location: rect_loc(&location),
            instances,
        });
    };
    let die = Rect::new(0, 0, layout.die_w, layout.die_h);
    let rules = &kb.rules;
    let bboxes: Vec<Rect> = layout.instances.iter().map(|i| i.bbox(kb)).collect();

    // DRC.2 containment and DRC.8 grid, per instance.
    for (inst, bbox) in layout.instances.iter().zip(&bboxes) {
        if !die.contains_rect(bbox) {
            violate(
                "DRC.2",
                format!("instance `{}` extends outside the die outline", inst.name),
                *bbox,
                vec![inst.id.clone()],
            );
        }
        if inst.origin.0.rem_euclid(rules.grid) != 0 || inst.origin.1.rem_euclid(rules.grid) != 0 {
            violate(
                "DRC.8",
                format!(
                    "instance `{}` origin ({}, {}) off the {} nm grid",
                    inst.name, inst.origin.0, inst.origin.1, rules.grid
                ),
                *bbox,
                vec![inst.id.clone()],
            );
        }
    }

    // DRC.3 overlap within a row.
    for (i, (a, ab)) in layout.instances.iter().zip(&bboxes).enumerate() {
        for (b, bb) in layout.instances.iter().zip(&bboxes).skip(i + 1) {
            if a.row == b.row && ab.overlap_area(bb) > 0 {
                let overlap = Rect::new(
                    ab.x0.max(bb.x0),
                    ab.y0.max(bb.y0),
                    ab.x1.min(bb.x1),
                    ab.y1.min(bb.y1),
                );
                violate(
                    "DRC.3",
                    format!("instances `{}` and `{}` overlap", a.name, b.name),
                    overlap,
                    vec![a.id.clone(), b.id.clone()],
                );
            }
        }
    }

    // DRC.4 corner presence: one corner anchored at each die corner.
    let corner = kb.corner();
    let expected_corners = [
        ("SW", Rect::new(0, 0, corner.width_nm, corner.height_nm)),
        (
            "SE",
            Rect::new(layout.die_w - corner.width_nm, 0, layout.die_w, corner.height_nm),
        ),
        (
            "NE",
            Rect::new(
                layout.die_w - corner.width_nm,
                layout.die_h - corner.height_nm,
                layout.die_w,
                layout.die_h,
            ),
        ),
        (
            "NW",
            Rect::new(0, layout.die_h - corner.height_nm, corner.width_nm, layout.die_h),
        ),
    ];
    if rules.corner_required {
        let placed_corners: Vec<(&PlacedInstance, &Rect)> = layout
            .instances
            .iter()
            .zip(&bboxes)
            .filter(|(i, _)| i.kind == CellKind::Corner)
            .collect();
        for (label, want) in &expected_corners {
            if !placed_corners.iter().any(|(_, have)| *have == want) {
                violate(
                    "DRC.4",
                    format!("no corner cell at the {} die corner", label),
                    *want,
                    vec![],
                );
            }
        }
        if placed_corners.len() != 4 {
            violate(
                "DRC.4",
                format!("expected 4 corner cells, found {}", placed_corners.len()),
                die,
                placed_corners.iter().map(|(i, _)| i.id.clone()).collect(),
            );
        }
    }

    // DRC.1 abutment and DRC.5 closure, per side over the outer row.
    for side in Side::RING_ORDER {
        let side_len = match side {
            Side::S | Side::N => layout.die_w,
            Side::E | Side::W => layout.die_h,
        };
        // Along-side intervals of every outer-row cell on this side plus
        // the projections of the two adjacent corners.
        let mut spans: Vec<(Nm, Nm, String, String)> = Vec::new(); // (from, to, id, name)
        for (inst, bbox) in layout.instances.iter().zip(&bboxes) {
            if inst.row != Row::Outer {
                continue;
            }
            let on_side = if inst.kind == CellKind::Corner {
                // Corners project onto both sides they touch.
                let (lo, hi) = along_interval_for_side(side, bbox);
                hi - lo > 0 && touches_side_edge(side, bbox, layout)
            } else {
                inst.side == side
            };
            if !on_side {
                continue;
            }
            let (lo, hi) = along_interval_for_side(side, bbox);
            spans.push((lo, hi, inst.id.clone(), inst.name.clone()));
        }
        spans.sort();

        // Closure: the spans must cover [0, side_len].
        let mut covered_to = 0;
        for (lo, hi, _, _) in &spans {
            if *lo > covered_to {
                let gap_rect = side_gap_rect(side, covered_to, *lo, layout, corner.height_nm);
                violate(
                    "DRC.5",
                    format!(
                        "side {} outer row uncovered from {} to {} nm",
                        side.as_str(),
                        covered_to,
                        lo
                    ),
                    gap_rect,
                    vec![],
                );
            }
            covered_to = covered_to.max(*hi);
        }
        if covered_to < side_len {
            let gap_rect = side_gap_rect(side, covered_to, side_len, layout, corner.height_nm);
            violate(
                "DRC.5",
                format!(
                    "side {} outer row uncovered from {} to {} nm",
                    side.as_str(),
                    covered_to,
                    side_len
                ),
                gap_rect,
                vec![],
            );
        }

        // Abutment: consecutive spans must touch within abut_tol.
        for pair in spans.windows(2) {
            let (_, a_hi, a_id, a_name) = &pair[0];
            let (b_lo, _, b_id, b_name) = &pair[1];
            let gap = b_lo - a_hi;
            if gap > rules.abut_tol {
                let gap_rect = side_gap_rect(side, *a_hi, *b_lo, layout, corner.height_nm);
                violate(
                    "DRC.1",
                    format!(
                        "side {}: `{}` and `{}` separated by {} nm",
                        side.as_str(),
                        a_name,
                        b_name,
                        gap
                    ),
                    gap_rect,
                    vec![a_id.clone(), b_id.clone()],
                );
            }
        }
    }

    // DRC.6 domain isolation around the outer ring.
    if rules.domain_isolation_required {
        let ring = layout.ring_sequence(Row::Outer);
        let n = ring.len();
        for i in 0..n {
            let a = ring[i];
            let b = ring[(i + 1) % n];
            if a.kind == CellKind::Breaker || b.kind == CellKind::Breaker {
                continue;
            }
            if a.domain != b.domain {
                violate(
                    "DRC.6",
                    format!(
                        "adjacent cells `{}` ({}) and `{}` ({}) lack a breaker",
                        a.name, a.domain, b.name, b.domain
                    ),
                    a.bbox(kb),
                    vec![a.id.clone(), b.id.clone()],
                );
            }
        }
    }

    // DRC.7 stagger: inner-row offset and neighbor overlap.
    for (inst, bbox) in layout.instances.iter().zip(&bboxes) {
        if inst.row != Row::Inner {
            continue;
        }
        let inward = match inst.side {
            Side::S => bbox.y0,
            Side::E => layout.die_w - bbox.x1,
            Side::N => layout.die_h - bbox.y1,
            Side::W => bbox.x0,
        };
        if inward != rules.stagger_row_offset {
            violate(
                "DRC.7",
                format!(
                    "inner cell `{}` offset {} nm, expected {} nm",
                    inst.name, inward, rules.stagger_row_offset
                ),
                *bbox,
                vec![inst.id.clone()],
            );
        }
        let (lo, hi) = along_interval(inst, bbox);
        let mut neighbor_overlaps: Vec<Nm> = layout
            .instances
            .iter()
            .zip(&bboxes)
            .filter(|(o, _)| o.row == Row::Outer && o.side == inst.side && o.kind != CellKind::Corner)
            .map(|(_, ob)| {
                let (olo, ohi) = along_interval(inst, ob);
                (hi.min(ohi) - lo.max(olo)).max(0)
            })
            .filter(|&ov| ov > 0)
            .collect();
        neighbor_overlaps.sort_unstable();
        let enough = neighbor_overlaps.len() >= 2
            && neighbor_overlaps[neighbor_overlaps.len() - 2] >= rules.stagger_min_overlap;
        if !enough {
            violate(
                "DRC.7",
                format!(
                    "inner cell `{}` must overlap two outer neighbors by >= {} nm (got {:?})",
                    inst.name, rules.stagger_min_overlap, neighbor_overlaps
                ),
                *bbox,
                vec![inst.id.clone()],
            );
        }
    }

    violations.sort_by(|a, b| {
        (&a.rule_code, &a.location, &a.instances).cmp(&(&b.rule_code, &b.location, &b.instances))
    });
    DrcReport {
        passed: violations.is_empty(),
        violations,
    }
}

fn along_interval_for_side(side: Side, bbox: &Rect) -> (Nm, Nm) {
    match side {
        Side::S | Side::N => (bbox.x0, bbox.x1),
        Side::E | Side::W => (bbox.y0, bbox.y1),
    }
}

/// Whether a bbox touches the die edge belonging to `side`.
fn touches_side_edge(side: Side, bbox: &Rect, layout: &LayoutDb) -> bool {
    match side {
        Side::S => bbox.y0 == 0,
        Side::E => bbox.x1 == layout.die_w,
        Side::N => bbox.y1 == layout.die_h,
        Side::W => bbox.x0 == 0,
    }
}

fn side_gap_rect(side: Side, from: Nm, to: Nm, layout: &LayoutDb, ring_depth: Nm) -> Rect {
    match side {
        Side::S => Rect::new(from, 0, to, ring_depth),
        Side::E => Rect::new(layout.die_w - ring_depth, from, layout.die_w, to),
        Side::N => Rect::new(from, layout.die_h - ring_depth, to, layout.die_h),
        Side::W => Rect::new(0, from, ring_depth, to),
    }
}

/// Compare schematic and extracted netlists. Net names are diagnostics
/// only; equivalence is on instance sets and net partitions.
pub fn run_lvs(schematic: &Netlist, extracted: &Netlist) -> LvsReport {
    let mut diffs: Vec<LvsDiff> = Vec::new();

    let schem_insts: BTreeSet<(&String, &String)> = schematic.instances.iter().collect();
    let extr_insts: BTreeSet<(&String, &String)> = extracted.instances.iter().collect();
    for (name, master) in schem_insts.difference(&extr_insts) {
        diffs.push(LvsDiff {
            kind: LvsDiffKind::MissingInstance,
            detail: format!("{} ({}) in schematic only", name, master),
        });
    }
    for (name, master) in extr_insts.difference(&schem_insts) {
        diffs.push(LvsDiff {
            kind: LvsDiffKind::ExtraInstance,
            detail: format!("{} ({}) in layout only", name, master),
        });
    }

    let schem_pins = schematic.pin_to_net();
    let extr_pins = extracted.pin_to_net();
    for (pin, net) in &schem_pins {
        if !extr_pins.contains_key(pin) {
            diffs.push(LvsDiff {
                kind: LvsDiffKind::PinMismatch,
                detail: format!("{}.{} on `{}` unconnected in layout", pin.0, pin.1, net),
            });
        }
    }
    for (pin, net) in &extr_pins {
        if !schem_pins.contains_key(pin) {
            diffs.push(LvsDiff {
                kind: LvsDiffKind::PinMismatch,
                detail: format!("{}.{} on `{}` unconnected in schematic", pin.0, pin.1, net),
            });
        }
    }

    // Opens: one schematic net spread over several extracted nets.
    for (net, pins) in &schematic.nets {
        let mut targets: BTreeSet<&String> = BTreeSet::new();
        for pin in pins {
            if let Some(t) = extr_pins.get(pin) {
                targets.insert(t);
            }
        }
        if targets.len() >= 2 {
            diffs.push(LvsDiff {
                kind: LvsDiffKind::Open,
                detail: format!(
                    "schematic net `{}` split across {:?} in layout",
                    net,
                    targets.iter().collect::<Vec<_>>()
                ),
            });
        }
    }

    // Shorts: several schematic nets merged into one extracted net.
    for (net, pins) in &extracted.nets {
        let mut sources: BTreeSet<&String> = BTreeSet::new();
        for pin in pins {
            if let Some(s) = schem_pins.get(pin) {
                sources.insert(s);
            }
        }
        if sources.len() >= 2 {
            diffs.push(LvsDiff {
                kind: LvsDiffKind::Short,
                detail: format!(
                    "layout net `{}` merges schematic nets {:?}",
                    net,
                    sources.iter().collect::<Vec<_>>()
                ),
            });
        }
    }

    diffs.sort_by(|a, b| (a.kind, &a.detail).cmp(&(b.kind, &b.detail)));
    diffs.dedup();
    LvsReport {
        status: if diffs.is_empty() {
            LvsStatus::Clean
        } else {
            LvsStatus::Mismatch
        },
        diffs,
    }
}
