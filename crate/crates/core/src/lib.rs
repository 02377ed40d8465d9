// SPDX-License-Identifier: Apache-2.0
//! Pad-ring synthesis and verification toolkit.
//!
//! The pipeline turns a pad plan (CSV or JSON) into a structured intent
//! graph, resolves exact ring geometry against a mock process kit, emits
//! layout scripts, netlists and renderings, and checks the result with
//! built-in DRC and LVS engines. A seeded benchmark harness drives the
//! whole flow across three difficulty tiers.

pub mod bench;
pub mod emit;
pub mod geom;
pub mod intent;
pub mod kb;
pub mod layout;
pub mod netlist;
pub mod padplan;
pub mod pipeline;
pub mod structurer;
pub mod verify;

pub use bench::{
    aggregate_metrics, audit_tiers, evaluate_case, generate_bench, run_bench, shape_check,
    BenchCase, BenchReport, BenchResult, GoldenStructure, MetricsTable, Tier,
};
pub use emit::{emit_netlist_text, emit_script, emit_svg, EmitError};
pub use geom::{transform_bbox, Nm, Orient, Rect, Side};
pub use intent::{
    parse_intent_graph, serialize_intent_graph, validate_intent_graph, IntentGraph, IntentNode,
    Provenance, ValidationReport,
};
pub use kb::{KnowledgeBase, DEFAULT_KB_DOCUMENT};
pub use layout::{resolve_geometry, solve_fillers, FillerPlan, LayoutDb, PlacedInstance};
pub use netlist::{
    extract_netlist, generate_netlist, netlist_from_text, netlist_to_text, Extraction, Netlist,
};
pub use padplan::{parse_directive, parse_pin_plan, PadPlanSpec, PlanFormat, RingStyle, Row};
pub use pipeline::{run_pipeline, run_pipeline_from_graph, Ablation, PipelineOutput};
pub use structurer::{
    build_intent, infer_node_attributes, spec_from_graph, structure_intent,
    structure_intent_external, StructureError, StructurerConfig, StructurerMode,
};
pub use verify::{run_drc, run_lvs, DrcReport, LvsDiffKind, LvsReport, LvsStatus};
