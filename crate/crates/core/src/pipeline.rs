// SPDX-License-Identifier: Apache-2.0
//! End-to-end pipeline runner shared by the CLI and the bench harness:
//! structure -> validate -> resolve -> netlist -> emit -> verify, with
//! ablation switches that degrade the flow for controlled experiments.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::emit::{emit_netlist_text, emit_script, emit_svg};
use crate::intent::{validate_intent_graph, IntentGraph, ValidationReport};
use crate::kb::KnowledgeBase;
use crate::layout::{resolve_geometry, LayoutDb};
use crate::netlist::{extract_netlist, generate_netlist, Extraction, Netlist};
use crate::padplan::PadPlanSpec;
use crate::structurer::{build_intent, StructurerConfig};
use crate::verify::{run_drc, run_lvs, DrcReport, LvsReport};

/// Pipeline degradation switches.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Ablation {
    /// Disable knowledge-base pattern inference: every pin must be fully
    /// overridden or it fails to resolve.
    pub no_kb: bool,
    /// Bypass the structurer: no intent graph is built, everything
    /// downstream is recorded as failed.
    pub no_intent_graph: bool,
    /// Skip geometry resolution and emission: DRC/LVS are recorded failed.
    pub no_adaptor: bool,
}

impl Ablation {
    pub fn parse(names: &[String]) -> Result<Ablation, String> {
        let mut ablation = Ablation::default();
        for name in names {
            match name.as_str() {
                "no_kb" => ablation.no_kb = true,
                "no_intent_graph" => ablation.no_intent_graph = true,
                "no_adaptor" => ablation.no_adaptor = true,
                other => return Err(format!("unknown ablation `{}`", other)),
            }
        }
        Ok(ablation)
    }

    pub fn names(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.no_kb {
            v.push("no_kb".to_string());
        }
        if self.no_intent_graph {
            v.push("no_intent_graph".to_string());
        }
        if self.no_adaptor {
            v.push("no_adaptor".to_string());
        }
        v
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub structure_ms: f64,
    pub resolve_ms: f64,
    pub netlist_ms: f64,
    pub emit_ms: f64,
    pub verify_ms: f64,
}

impl StageTimings {
    pub fn zeroed(&self) -> StageTimings {
        StageTimings::default()
    }

    pub fn total_ms(&self) -> f64 {
        self.structure_ms + self.resolve_ms + self.netlist_ms + self.emit_ms + self.verify_ms
    }
}

/// Everything one pipeline run produced, present as far as the run got.
#[derive(Debug, Clone, Default)]
pub struct PipelineOutput {
    pub graph: Option<IntentGraph>,
    pub validation: Option<ValidationReport>,
    pub structure_error: Option<String>,
    pub layout: Option<LayoutDb>,
    pub resolve_error: Option<String>,
    pub schematic: Option<Netlist>,
    pub extraction: Option<Extraction>,
    pub script: Option<String>,
    pub svg: Option<String>,
    pub netlist_text: Option<String>,
    pub drc: Option<DrcReport>,
    pub lvs: Option<LvsReport>,
    pub timings: StageTimings,
}

impl PipelineOutput {
    pub fn intent_ok(&self) -> bool {
        self.structure_error.is_none()
            && self.validation.as_ref().map(|v| v.passed).unwrap_or(false)
    }

    pub fn drc_ok(&self) -> bool {
        self.drc.as_ref().map(|d| d.passed).unwrap_or(false)
    }

    pub fn lvs_ok(&self) -> bool {
        self.lvs.as_ref().map(|l| l.clean()).unwrap_or(false)
    }
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// A knowledge base with pattern inference removed, for the `no_kb`
/// ablation: cells, rules and domains survive so downstream stages keep
/// their rulebook, but no pin can be resolved by name.
fn kb_without_patterns(kb: &KnowledgeBase) -> KnowledgeBase {
    let mut doc: serde_json::Value =
        serde_json::from_str(&kb.serialize()).expect("KB serializes");
    doc["patterns"] = serde_json::Value::Array(vec![]);
    KnowledgeBase::load(&doc.to_string()).expect("pattern-free KB stays valid")
}

/// Run the pipeline from a pad plan.
pub fn run_pipeline(
    spec: &PadPlanSpec,
    kb: &KnowledgeBase,
    cfg: &StructurerConfig,
    ablation: Ablation,
) -> PipelineOutput {
    let mut out = PipelineOutput::default();
    if ablation.no_intent_graph {
        out.structure_error = Some("ablation: intent graph stage disabled".into());
        return out;
    }

    let start = Instant::now();
    let result = if ablation.no_kb {
        let stripped = kb_without_patterns(kb);
        let strict_cfg = StructurerConfig { strict: true, ..cfg.clone() };
        build_intent(spec, &stripped, &strict_cfg)
    } else {
        build_intent(spec, kb, cfg)
    };
    out.timings.structure_ms = ms(start);
    let graph = match result {
        Ok(graph) => graph,
        Err(e) => {
            out.structure_error = Some(e.to_string());
            return out;
        }
    };
    out.validation = Some(validate_intent_graph(&graph, kb));
    out.graph = Some(graph);
    if out.validation.as_ref().unwrap().blocks_resolution() {
        return out;
    }
    continue_from_graph(out, kb, ablation)
}

/// Run the pipeline from an existing intent graph (e.g. a hand-edited
/// `intent.json`). A graph whose only finding is a domain leak still
/// resolves; the leak comes back as DRC.6 violations and LVS shorts.
pub fn run_pipeline_from_graph(
    graph: IntentGraph,
    kb: &KnowledgeBase,
    ablation: Ablation,
) -> PipelineOutput {
    let mut out = PipelineOutput::default();
    out.validation = Some(validate_intent_graph(&graph, kb));
    out.graph = Some(graph);
    if out.validation.as_ref().unwrap().blocks_resolution() {
        return out;
    }
    continue_from_graph(out, kb, ablation)
}

fn continue_from_graph(
    mut out: PipelineOutput,
    kb: &KnowledgeBase,
    ablation: Ablation,
) -> PipelineOutput {
    if ablation.no_adaptor {
        return out;
    }
    let graph = out.graph.as_ref().expect("graph present");

    let start = Instant::now();
    let layout = match resolve_geometry(graph, kb) {
        Ok(layout) => layout,
        Err(e) => {
            out.resolve_error = Some(e.to_string());
            out.timings.resolve_ms = ms(start);
            return out;
        }
    };
    out.timings.resolve_ms = ms(start);

    let start = Instant::now();
    let schematic = generate_netlist(graph, kb);
    let extraction = extract_netlist(&layout, graph, kb);
    out.timings.netlist_ms = ms(start);

    let start = Instant::now();
    out.script = emit_script(&layout, &schematic, graph).ok();
    out.svg = Some(emit_svg(&layout, kb));
    out.netlist_text = Some(emit_netlist_text(&schematic));
    out.timings.emit_ms = ms(start);

    let start = Instant::now();
    out.drc = Some(run_drc(&layout, kb));
    out.lvs = Some(run_lvs(&schematic, &extraction.netlist));
    out.timings.verify_ms = ms(start);

    out.layout = Some(layout);
    out.schematic = Some(schematic);
    out.extraction = Some(extraction);
    out
}

/// Parse a comma/space separated ablation list (CLI plumbing).
pub fn parse_ablation_args(args: &[String]) -> Result<Ablation, String> {
    let mut names = Vec::new();
    for arg in args {
        for piece in arg.split(',') {
            let piece = piece.trim();
            if !piece.is_empty() {
                names.push(piece.to_string());
            }
        }
    }
    Ablation::parse(&names)
}
