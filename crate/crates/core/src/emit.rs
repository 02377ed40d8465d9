// SPDX-License-Identifier: Apache-2.0
//! Deterministic serializers for pipeline products: the canonical layout
//! script, netlist text and an SVG rendering.
//!
//! Script grammar, one record per `\n`-terminated line, `;` comments:
//!
//! ```text
//! ioDie <w_um> <h_um>
//! ioInst "<name>" "<master>" <x_um> <y_um> <R0|R90|R180|R270> <outer|inner>
//! ioFill "<master>" <x_um> <y_um> <orient>
//! ioNet "<net>" <inst>.<pin> ...
//! ```
//!
//! Coordinates are micrometers with three decimals, exact because the
//! internal unit is the nanometer.

use thiserror::Error;

use crate::geom::nm_to_um_string;
use crate::intent::IntentGraph;
use crate::kb::{CellKind, KnowledgeBase};
use crate::layout::LayoutDb;
use crate::netlist::{netlist_to_text, Netlist};

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("inconsistent inputs: {0}")]
    Consistency(String),
}

/// Emit the canonical layout/schematic script: instances in ring order,
/// then fillers, then net stitching.
pub fn emit_script(
    layout: &LayoutDb,
    netlist: &Netlist,
    graph: &IntentGraph,
) -> Result<String, EmitError> {
    for inst in &layout.instances {
        if inst.kind != CellKind::Filler && graph.node(&inst.id).is_none() {
            return Err(EmitError::Consistency(format!(
                "layout instance `{}` references unknown node id `{}`",
                inst.name, inst.id
            )));
        }
    }

    let mut out = String::new();
    out.push_str(&format!(
        "ioDie {} {}\n",
        nm_to_um_string(layout.die_w),
        nm_to_um_string(layout.die_h)
    ));
    for node in &graph.nodes {
        let Some(inst) = layout.instance(&node.id) else {
            continue;
        };
        out.push_str(&format!(
            "ioInst \"{}\" \"{}\" {} {} {} {}\n",
            inst.name,
            inst.master,
            nm_to_um_string(inst.origin.0),
            nm_to_um_string(inst.origin.1),
            inst.orient.as_str(),
            inst.row.as_str(),
        ));
    }
    for inst in layout.fillers() {
        out.push_str(&format!(
            "ioFill \"{}\" {} {} {}\n",
            inst.master,
            nm_to_um_string(inst.origin.0),
            nm_to_um_string(inst.origin.1),
            inst.orient.as_str(),
        ));
    }
    for (net, pins) in &netlist.nets {
        let joined: Vec<String> = pins.iter().map(|(i, p)| format!("{}.{}", i, p)).collect();
        out.push_str(&format!("ioNet \"{}\" {}\n", net, joined.join(" ")));
    }
    Ok(out)
}

fn kind_fill(kind: CellKind) -> &'static str {
    match kind {
        CellKind::Pad => "#cfe0f5",
        CellKind::CustomPad => "#f5d7a8",
        CellKind::Corner => "#d9d9d9",
        CellKind::Filler => "#eef0e2",
        CellKind::Breaker => "#e8b4bc",
    }
}

/// Render the layout as SVG: one rectangle per instance colored by cell
/// kind, the die outline, and pad-name labels. The viewBox is the die
/// extent in micrometers.
pub fn emit_svg(layout: &LayoutDb, kb: &KnowledgeBase) -> String {
    let w = nm_to_um_string(layout.die_w);
    let h = nm_to_um_string(layout.die_h);
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {} {}\" width=\"{}\" height=\"{}\">\n",
        w, h, w, h
    ));
    out.push_str(&format!(
        "  <rect x=\"0.000\" y=\"0.000\" width=\"{}\" height=\"{}\" fill=\"#fcfcf8\" stroke=\"#303030\" stroke-width=\"2\"/>\n",
        w, h
    ));
    for inst in &layout.instances {
        let bbox = inst.bbox(kb);
        // Die y grows upward, SVG y downward.
        let x = nm_to_um_string(bbox.x0);
        let y = nm_to_um_string(layout.die_h - bbox.y1);
        let bw = nm_to_um_string(bbox.width());
        let bh = nm_to_um_string(bbox.height());
        out.push_str(&format!(
            "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" stroke=\"#606060\" stroke-width=\"0.5\"/>\n",
            x,
            y,
            bw,
            bh,
            kind_fill(inst.kind)
        ));
        if inst.kind.is_pad() {
            let cx = nm_to_um_string((bbox.x0 + bbox.x1) / 2);
            let cy = nm_to_um_string(layout.die_h - (bbox.y0 + bbox.y1) / 2);
            out.push_str(&format!(
                "  <text x=\"{}\" y=\"{}\" font-size=\"9\" text-anchor=\"middle\" dominant-baseline=\"middle\" font-family=\"monospace\">{}</text>\n",
                cx, cy, inst.name
            ));
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Persist a netlist in the line-oriented text format.
pub fn emit_netlist_text(netlist: &Netlist) -> String {
    netlist_to_text(netlist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::resolve_geometry;
    use crate::netlist::generate_netlist;
    use crate::padplan::{parse_pin_plan, PlanFormat};
    use crate::structurer::{structure_intent, StructurerConfig};

    fn minimal_ring() -> (IntentGraph, LayoutDb, Netlist, KnowledgeBase) {
        let kb = KnowledgeBase::load_default();
        let text = "#! DIE_UM w=600 h=600\nname,side,order\n\
                    D0,S,0\nVDD1,E,0\nVSS1,N,0\nD1,W,0\n";
        let spec = parse_pin_plan(text, PlanFormat::Csv).unwrap();
        let cfg = StructurerConfig { strict: true, ..Default::default() };
        let graph = structure_intent(&spec, &kb, &cfg).unwrap();
        let layout = resolve_geometry(&graph, &kb).unwrap();
        let netlist = generate_netlist(&graph, &kb);
        (graph, layout, netlist, kb)
    }

    #[test]
    fn minimal_ring_script_counts() {
        let (graph, layout, netlist, _) = minimal_ring();
        let script = emit_script(&layout, &netlist, &graph).unwrap();
        let inst_lines = script.lines().filter(|l| l.starts_with("ioInst")).count();
        let fill_lines = script.lines().filter(|l| l.starts_with("ioFill")).count();
        let net_lines = script.lines().filter(|l| l.starts_with("ioNet")).count();
        // 4 corners + 4 pads.
        assert_eq!(inst_lines, 8);
        assert_eq!(fill_lines, layout.fillers().count());
        assert_eq!(net_lines, netlist.nets.len());
        assert!(script.starts_with("ioDie 600.000 600.000\n"));
    }

    #[test]
    fn script_emission_is_byte_stable() {
        let (graph, layout, netlist, _) = minimal_ring();
        let a = emit_script(&layout, &netlist, &graph).unwrap();
        let b = emit_script(&layout, &netlist, &graph).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_layout_id_is_a_consistency_error() {
        let (graph, mut layout, netlist, _) = minimal_ring();
        let pad = layout
            .instances
            .iter_mut()
            .find(|i| i.kind.is_pad())
            .unwrap();
        pad.id = "n999".into();
        assert!(matches!(
            emit_script(&layout, &netlist, &graph),
            Err(EmitError::Consistency(_))
        ));
    }

    #[test]
    fn svg_has_one_rect_per_instance_plus_outline() {
        let (_, layout, _, kb) = minimal_ring();
        let svg = emit_svg(&layout, &kb);
        let rects = svg.matches("<rect").count();
        assert_eq!(rects, layout.instances.len() + 1);
        assert_eq!(emit_svg(&layout, &kb), svg);
        assert!(svg.contains("viewBox=\"0 0 600.000 600.000\""));
    }

    #[test]
    fn empty_layout_renders_outline_only() {
        let (_, mut layout, _, kb) = minimal_ring();
        layout.instances.clear();
        let svg = emit_svg(&layout, &kb);
        assert_eq!(svg.matches("<rect").count(), 1);
    }

    #[test]
    fn case_study_scale_svg_has_a_rect_per_instance() {
        let kb = KnowledgeBase::load_default();
        let mut text = String::from("#! DIE_UM w=1000 h=1000\nname,side,order\n");
        for (si, side) in ["S", "E", "N", "W"].iter().enumerate() {
            for i in 0..12 {
                let name = match i {
                    0 => format!("VDD{}", si),
                    1 => format!("VSS{}", si),
                    _ => format!("D{}_{}", si, i),
                };
                text.push_str(&format!("{},{},{}\n", name, side, i));
            }
        }
        let spec = parse_pin_plan(&text, PlanFormat::Csv).unwrap();
        let cfg = StructurerConfig { strict: true, ..Default::default() };
        let graph = structure_intent(&spec, &kb, &cfg).unwrap();
        assert_eq!(graph.nodes.len(), 52);
        let layout = resolve_geometry(&graph, &kb).unwrap();
        let svg = emit_svg(&layout, &kb);
        // 52 ring instances plus fillers plus the die outline.
        assert!(svg.matches("<rect").count() >= 52);
        assert_eq!(svg.matches("<rect").count(), layout.instances.len() + 1);
    }
}
