// SPDX-License-Identifier: Apache-2.0
//! Seeded benchmark harness: 30 generated ring cases across three
//! difficulty tiers, a five-metric evaluation pipeline, ablation support
//! and report aggregation.
//!
//! Tier features: simple cases are small single-domain rings; medium cases
//! are 1 mm x 1 mm single-row rings split into digital and analog domains;
//! hard cases use enlarged dies (>= 1.5x) and add staggered rows, custom
//! pad cells, or a localized ESD island.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::geom::{Nm, Side};
use crate::intent::IntentGraph;
use crate::kb::{CellKind, KnowledgeBase};
use crate::layout::LayoutDb;
use crate::padplan::{
    Directive, DirectiveKind, PadPlanSpec, PinEntry, PinOverrides, RingStyle, Row,
};
use crate::pipeline::{run_pipeline, run_pipeline_from_graph, Ablation, PipelineOutput, StageTimings};
use crate::structurer::StructurerConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    Simple,
    Medium,
    Hard,
}

impl Tier {
    pub fn as_str(self) -> &'static str {
        match self {
            Tier::Simple => "simple",
            Tier::Medium => "medium",
            Tier::Hard => "hard",
        }
    }

    pub fn parse(s: &str) -> Option<Tier> {
        match s {
            "simple" => Some(Tier::Simple),
            "medium" => Some(Tier::Medium),
            "hard" => Some(Tier::Hard),
            _ => None,
        }
    }
}

/// Reference structure a generated case must realize: the shape oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenStructure {
    pub die_w: Nm,
    pub die_h: Nm,
    pub ring_style: RingStyle,
    /// Per-side pad names in counter-clockwise order.
    pub sides: BTreeMap<Side, Vec<String>>,
    /// Intended power domain per pad.
    pub domains: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchCase {
    pub case_id: String,
    pub tier: Tier,
    pub spec: PadPlanSpec,
    pub golden: GoldenStructure,
}

impl BenchCase {
    /// Hard-tier feature inventory, for the tier audit.
    pub fn hard_features(&self) -> Vec<&'static str> {
        let mut features = Vec::new();
        if self.spec.ring_style == RingStyle::Staggered {
            features.push("staggered");
        }
        if self.spec.die_w >= 1_500_000 || self.spec.die_h >= 1_500_000 {
            features.push("enlarged_die");
        }
        if self
            .spec
            .directives
            .iter()
            .any(|d| d.kind == DirectiveKind::UseCustomCell)
        {
            features.push("custom_cell");
        }
        if self
            .spec
            .directives
            .iter()
            .any(|d| d.kind == DirectiveKind::LocalEsdDomain)
        {
            features.push("local_esd");
        }
        features
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub case_id: String,
    pub tier: Tier,
    pub metric1_ig: bool,
    pub metric2_shape: bool,
    pub metric3_drc: bool,
    pub metric4_lvs: bool,
    pub metric5_combined: bool,
    pub timings: StageTimings,
}

impl BenchResult {
    /// Enforce the metric implication chain: metric 1 failing fails
    /// everything, and metric 5 is the DRC+LVS conjunction.
    pub fn new(
        case_id: String,
        tier: Tier,
        ig: bool,
        shape: bool,
        drc: bool,
        lvs: bool,
        timings: StageTimings,
    ) -> BenchResult {
        let metric2 = ig && shape;
        let metric3 = ig && drc;
        let metric4 = ig && lvs;
        BenchResult {
            case_id,
            tier,
            metric1_ig: ig,
            metric2_shape: metric2,
            metric3_drc: metric3,
            metric4_lvs: metric4,
            metric5_combined: metric3 && metric4,
            timings,
        }
    }
}

/// Pass counts and percentages for one slice of the result set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub total: usize,
    pub ig_pass: usize,
    pub shape_pass: usize,
    pub drc_pass: usize,
    pub lvs_pass: usize,
    pub combined_pass: usize,
    pub ig_pct: f64,
    pub shape_pct: f64,
    pub drc_pct: f64,
    pub lvs_pct: f64,
    pub combined_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsTable {
    pub per_tier: BTreeMap<Tier, MetricsRow>,
    pub overall: MetricsRow,
}

/// Percentage `100 * passed / total`, rounded half-up to two decimals.
pub fn pass_percentage(passed: usize, total: usize) -> f64 {
    assert!(total > 0, "percentage of an empty slice");
    let num = (passed as u64) * 10_000;
    let den = total as u64;
    let mut q = num / den;
    if 2 * (num % den) >= den {
        q += 1;
    }
    q as f64 / 100.0
}

fn metrics_row(results: &[&BenchResult]) -> MetricsRow {
    let total = results.len();
    let count = |f: fn(&BenchResult) -> bool| results.iter().filter(|r| f(r)).count();
    let ig = count(|r| r.metric1_ig);
    let shape = count(|r| r.metric2_shape);
    let drc = count(|r| r.metric3_drc);
    let lvs = count(|r| r.metric4_lvs);
    let combined = count(|r| r.metric5_combined);
    MetricsRow {
        total,
        ig_pass: ig,
        shape_pass: shape,
        drc_pass: drc,
        lvs_pass: lvs,
        combined_pass: combined,
        ig_pct: pass_percentage(ig, total),
        shape_pct: pass_percentage(shape, total),
        drc_pct: pass_percentage(drc, total),
        lvs_pct: pass_percentage(lvs, total),
        combined_pct: pass_percentage(combined, total),
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("no results to aggregate")]
    EmptyInput,
}

/// Per-tier and overall pass percentages.
pub fn aggregate_metrics(results: &[BenchResult]) -> Result<MetricsTable, BenchError> {
    if results.is_empty() {
        return Err(BenchError::EmptyInput);
    }
    let mut per_tier = BTreeMap::new();
    for tier in [Tier::Simple, Tier::Medium, Tier::Hard] {
        let slice: Vec<&BenchResult> = results.iter().filter(|r| r.tier == tier).collect();
        if !slice.is_empty() {
            per_tier.insert(tier, metrics_row(&slice));
        }
    }
    let all: Vec<&BenchResult> = results.iter().collect();
    Ok(MetricsTable {
        per_tier,
        overall: metrics_row(&all),
    })
}

// ---------------------------------------------------------------------
// Case generation
// ---------------------------------------------------------------------

const PAD_W: Nm = 60_000;
const CORNER_W: Nm = 120_000;

struct PadSeed {
    name: String,
    side: Side,
    domain: &'static str,
    row: Row,
    domain_override: Option<String>,
}

fn finish_case(
    case_id: String,
    tier: Tier,
    die: Nm,
    ring_style: RingStyle,
    pads: Vec<PadSeed>,
    directives: Vec<Directive>,
) -> BenchCase {
    let mut sides: BTreeMap<Side, Vec<PinEntry>> = BTreeMap::new();
    for side in [Side::N, Side::E, Side::S, Side::W] {
        sides.insert(side, Vec::new());
    }
    let mut golden_sides: BTreeMap<Side, Vec<String>> = BTreeMap::new();
    for side in [Side::N, Side::E, Side::S, Side::W] {
        golden_sides.insert(side, Vec::new());
    }
    let mut domains = BTreeMap::new();
    for pad in &pads {
        let overrides = PinOverrides {
            row: (pad.row == Row::Inner).then_some(Row::Inner),
            domain: pad.domain_override.clone(),
            ..Default::default()
        };
        sides.get_mut(&pad.side).unwrap().push(PinEntry {
            name: pad.name.clone(),
            overrides,
        });
        golden_sides.get_mut(&pad.side).unwrap().push(pad.name.clone());
        let effective = pad
            .domain_override
            .clone()
            .unwrap_or_else(|| pad.domain.to_string());
        domains.insert(pad.name.clone(), effective);
    }
    let spec = PadPlanSpec {
        die_w: die,
        die_h: die,
        sides,
        directives,
        ring_style,
    };
    let golden = GoldenStructure {
        die_w: die,
        die_h: die,
        ring_style,
        sides: golden_sides,
        domains,
    };
    BenchCase {
        case_id,
        tier,
        spec,
        golden,
    }
}

fn gen_simple(index: usize, rng: &mut ChaCha8Rng) -> BenchCase {
    // Small die, one digital domain, 16..24 pads.
    let die: Nm = 600_000 + 20_000 * rng.gen_range(0..4);
    let budget_per_side = ((die - 2 * CORNER_W) / PAD_W) as usize;
    let mut pads = Vec::new();
    let mut dnum = 0usize;
    for (si, side) in Side::RING_ORDER.iter().enumerate() {
        let count = rng.gen_range(4..=budget_per_side.min(6));
        for i in 0..count {
            let name = match (si, i) {
                (0, 0) => "VDD0".to_string(),
                (0, 1) => "VSS0".to_string(),
                (1, 0) => "DCLK".to_string(),
                _ => {
                    dnum += 1;
                    format!("D{}", dnum)
                }
            };
            pads.push(PadSeed {
                name,
                side: *side,
                domain: "DVDD",
                row: Row::Outer,
                domain_override: None,
            });
        }
    }
    finish_case(
        format!("simple_{:02}", index + 1),
        Tier::Simple,
        die,
        RingStyle::SingleRow,
        pads,
        vec![],
    )
}

fn gen_medium(index: usize, rng: &mut ChaCha8Rng) -> BenchCase {
    // Standard 1 mm x 1 mm MPW outline, single row, digital + analog arcs.
    let die: Nm = 1_000_000;
    let per_side = rng.gen_range(10..=12);
    let total = per_side * 4;
    // The digital arc covers the ring start; the analog arc the rest.
    let digital_len = rng.gen_range(total * 2 / 5..=total * 3 / 5);
    let mut pads = Vec::new();
    let mut dnum = 0usize;
    let mut anum = 0usize;
    let mut flat = 0usize;
    for side in Side::RING_ORDER {
        for i in 0..per_side {
            let digital = flat < digital_len;
            let name = if digital {
                match (flat, i) {
                    (0, _) => "VDD0".to_string(),
                    (1, _) => "VSS0".to_string(),
                    (2, _) => "DCLK".to_string(),
                    _ => {
                        dnum += 1;
                        format!("D{}", dnum)
                    }
                }
            } else {
                match flat - digital_len {
                    0 => "AVDD0".to_string(),
                    1 => "AVSS0".to_string(),
                    2 => "VCM".to_string(),
                    3 => "VREFP".to_string(),
                    4 => "VREFN".to_string(),
                    _ => {
                        anum += 1;
                        format!("AIN{}", anum)
                    }
                }
            };
            pads.push(PadSeed {
                name,
                side,
                domain: if digital { "DVDD" } else { "AVDD" },
                row: Row::Outer,
                domain_override: None,
            });
            flat += 1;
        }
    }
    finish_case(
        format!("medium_{:02}", index + 1),
        Tier::Medium,
        die,
        RingStyle::SingleRow,
        pads,
        vec![],
    )
}

fn gen_hard(index: usize, rng: &mut ChaCha8Rng) -> BenchCase {
    // Enlarged die always (>= 1.5x the standard outline); rotate the other
    // hard features across the ten cases.
    let die: Nm = if rng.gen_bool(0.5) { 1_500_000 } else { 2_000_000 };
    let staggered = index.is_multiple_of(2);
    let custom_cell = index.is_multiple_of(3);
    let local_esd = index % 4 == 2 || index % 4 == 3;

    let ring_style = if staggered {
        RingStyle::Staggered
    } else {
        RingStyle::SingleRow
    };
    let mut pads: Vec<PadSeed> = Vec::new();
    let mut dnum = 0usize;
    let mut anum = 0usize;

    // S and E digital, N and W analog; domain changes sit at corners.
    for side in Side::RING_ORDER {
        let digital = matches!(side, Side::S | Side::E);
        let domain: &'static str = if digital { "DVDD" } else { "AVDD" };
        // Staggered sides alternate outer/inner, starting and ending outer.
        // Keep the total pad count inside the hard-tier envelope whether
        // or not the side doubles up.
        let count = if staggered {
            2 * rng.gen_range(7..=12) - 1
        } else {
            rng.gen_range(12..=16)
        };
        let mut names: Vec<String> = Vec::new();
        if side == Side::S {
            names.push("VDD0".into());
            names.push("VSS0".into());
            names.push("DCLK".into());
        }
        if side == Side::N {
            names.push("AVDD0".into());
            names.push("AVSS0".into());
            names.push("VCM".into());
            names.push("VREFP".into());
            names.push("VREFN".into());
        }
        while names.len() < count {
            if digital {
                dnum += 1;
                names.push(format!("D{}", dnum));
            } else {
                anum += 1;
                names.push(format!("AIN{}", anum));
            }
        }
        for (i, name) in names.into_iter().enumerate() {
            let row = if staggered && i % 2 == 1 { Row::Inner } else { Row::Outer };
            pads.push(PadSeed {
                name,
                side,
                domain,
                row,
                domain_override: None,
            });
        }
    }

    let mut directives = Vec::new();
    if custom_cell {
        directives.push(
            Directive::new(
                DirectiveKind::UseCustomCell,
                BTreeMap::from([
                    ("name".to_string(), "AIN1".to_string()),
                    ("cell".to_string(), "APAD_LOWCAP".to_string()),
                ]),
            )
            .expect("well-formed directive"),
        );
    }
    if local_esd {
        // Carve a contiguous SAR island out of the west (analog) side:
        // its own supplies plus two signal pads, all in AVDD_SAR.
        directives.push(
            Directive::new(
                DirectiveKind::LocalEsdDomain,
                BTreeMap::from([("domain".to_string(), "AVDD_SAR".to_string())]),
            )
            .expect("well-formed directive"),
        );
        let west: Vec<usize> = pads
            .iter()
            .enumerate()
            .filter(|(_, p)| p.side == Side::W)
            .map(|(i, _)| i)
            .collect();
        // In a staggered ring the island must cover the whole side: a
        // mid-side domain boundary would let an inner pad straddle the
        // breaker junction and bridge the rails around it. Single-row
        // rings can carve a small island at the side end.
        let slots: Vec<usize> = if staggered {
            west.clone()
        } else {
            west[west.len() - 4..].to_vec()
        };
        let mut sar_num = 0usize;
        for (k, slot) in slots.iter().enumerate() {
            let name = if k == 0 {
                "AVDD_SAR".to_string()
            } else if k == 1 {
                "AVSS_SAR".to_string()
            } else {
                sar_num += 1;
                format!("ASAR{}", sar_num)
            };
            pads[*slot].domain_override =
                (!name.starts_with("AV")).then(|| "AVDD_SAR".to_string());
            pads[*slot].name = name;
        }
    }

    finish_case(
        format!("hard_{:02}", index + 1),
        Tier::Hard,
        die,
        ring_style,
        pads,
        directives,
    )
}

/// Generate the 30-case suite: 10 per tier, deterministic in the seed. Pad
/// names are drawn from knowledge-base vocabularies so the deterministic
/// structurer resolves every pin.
pub fn generate_bench(seed: u64) -> Vec<BenchCase> {
    let mut cases = Vec::with_capacity(30);
    for i in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (0x5151_0000 + i as u64));
        cases.push(gen_simple(i, &mut rng));
    }
    for i in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (0x4d44_0000 + i as u64));
        cases.push(gen_medium(i, &mut rng));
    }
    for i in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (0x4844_0000 + i as u64));
        cases.push(gen_hard(i, &mut rng));
    }
    cases
}

/// Audit the tier composition: 10/10/10, medium dies exactly standard,
/// every hard case with at least one hard feature.
pub fn audit_tiers(cases: &[BenchCase]) -> Result<(), String> {
    for tier in [Tier::Simple, Tier::Medium, Tier::Hard] {
        let n = cases.iter().filter(|c| c.tier == tier).count();
        if n != 10 {
            return Err(format!("tier {} has {} cases, expected 10", tier.as_str(), n));
        }
    }
    for case in cases {
        match case.tier {
            Tier::Medium => {
                if case.spec.die_w != 1_000_000 || case.spec.die_h != 1_000_000 {
                    return Err(format!(
                        "medium case {} die {}x{} nm, expected 1000000x1000000",
                        case.case_id, case.spec.die_w, case.spec.die_h
                    ));
                }
            }
            Tier::Hard => {
                if case.hard_features().is_empty() {
                    return Err(format!("hard case {} exhibits no hard feature", case.case_id));
                }
            }
            Tier::Simple => {
                let domains: std::collections::BTreeSet<&String> =
                    case.golden.domains.values().collect();
                if domains.len() != 1 {
                    return Err(format!(
                        "simple case {} uses {} domains, expected 1",
                        case.case_id,
                        domains.len()
                    ));
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------
// Shape check and evaluation
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeOutcome {
    pub pass: bool,
    pub reasons: Vec<String>,
}

/// Deterministic structural comparison of a layout against its golden
/// reference: die dimensions, per-side pad order, corner count, ring
/// style. Binary outcome.
pub fn shape_check(layout: &LayoutDb, golden: &GoldenStructure) -> ShapeOutcome {
    let mut reasons = Vec::new();
    if (layout.die_w, layout.die_h) != (golden.die_w, golden.die_h) {
        reasons.push(format!(
            "die {}x{} nm, expected {}x{} nm",
            layout.die_w, layout.die_h, golden.die_w, golden.die_h
        ));
    }
    if layout.ring_style != golden.ring_style {
        reasons.push(format!(
            "ring style {}, expected {}",
            layout.ring_style.as_str(),
            golden.ring_style.as_str()
        ));
    }
    let corners = layout
        .instances
        .iter()
        .filter(|i| i.kind == CellKind::Corner)
        .count();
    if corners != 4 {
        reasons.push(format!("{} corner cells, expected 4", corners));
    }
    for side in Side::RING_ORDER {
        let mut placed: Vec<(&crate::layout::PlacedInstance, Nm)> = layout
            .instances
            .iter()
            .filter(|i| i.side == side && i.kind.is_pad())
            .map(|i| (i, layout.ccw_key(i)))
            .collect();
        placed.sort_by_key(|(_, key)| *key);
        let got: Vec<&str> = placed.iter().map(|(i, _)| i.name.as_str()).collect();
        let want: Vec<&str> = golden
            .sides
            .get(&side)
            .map(|v| v.iter().map(String::as_str).collect())
            .unwrap_or_default();
        if got != want {
            reasons.push(format!("side {} pad order differs", side.as_str()));
        }
    }
    ShapeOutcome {
        pass: reasons.is_empty(),
        reasons,
    }
}

/// Run the full metric pipeline over one case.
pub fn evaluate_case(case: &BenchCase, kb: &KnowledgeBase, ablation: Ablation) -> BenchResult {
    evaluate_case_full(case, kb, ablation).0
}

/// As [`evaluate_case`], also returning the raw pipeline artifacts.
pub fn evaluate_case_full(
    case: &BenchCase,
    kb: &KnowledgeBase,
    ablation: Ablation,
) -> (BenchResult, PipelineOutput) {
    let cfg = StructurerConfig { strict: true, ..Default::default() };
    let output = run_pipeline(&case.spec, kb, &cfg, ablation);
    (result_from_output(case, &output), output)
}

fn result_from_output(case: &BenchCase, output: &PipelineOutput) -> BenchResult {
    let ig = output.intent_ok();
    let shape = output
        .layout
        .as_ref()
        .map(|l| shape_check(l, &case.golden).pass)
        .unwrap_or(false);
    BenchResult::new(
        case.case_id.clone(),
        case.tier,
        ig,
        shape,
        output.drc_ok(),
        output.lvs_ok(),
        output.timings,
    )
}

/// Evaluate with a fault-injecting structurer that drops each inferred
/// breaker with probability `drop_prob` (seeded per case). The structural
/// analogue of the difficulty gradient: richer domain structure means more
/// breakers at risk.
pub fn evaluate_case_with_fault(
    case: &BenchCase,
    kb: &KnowledgeBase,
    drop_prob: f64,
    seed: u64,
) -> BenchResult {
    let cfg = StructurerConfig { strict: true, ..Default::default() };
    let graph = match crate::structurer::structure_intent(&case.spec, kb, &cfg) {
        Ok(g) => g,
        Err(_) => {
            return BenchResult::new(
                case.case_id.clone(),
                case.tier,
                false,
                false,
                false,
                false,
                StageTimings::default(),
            )
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ hash_case_id(&case.case_id));
    let mutated = drop_breakers(&graph, kb, drop_prob, &mut rng);
    let output = run_pipeline_from_graph(mutated, kb, Ablation::default());
    result_from_output(case, &output)
}

fn hash_case_id(id: &str) -> u64 {
    let digest = Sha256::digest(id.as_bytes());
    u64::from_le_bytes(digest[..8].try_into().unwrap())
}

/// Remove breaker nodes with probability `p` each, re-deriving positions.
pub fn drop_breakers(
    graph: &IntentGraph,
    kb: &KnowledgeBase,
    p: f64,
    rng: &mut ChaCha8Rng,
) -> IntentGraph {
    let mut out = graph.clone();
    out.nodes.retain(|n| {
        let breaker = kb.cell(&n.device_type).map(|c| c.kind) == Some(CellKind::Breaker);
        !(breaker && rng.gen_bool(p))
    });
    // Recompute per-side indices after removal.
    let mut side_slot: isize = -1;
    let mut index_in_side = 0usize;
    for node in out.nodes.iter_mut() {
        if kb.cell(&node.device_type).map(|c| c.kind) == Some(CellKind::Corner) {
            side_slot += 1;
            index_in_side = 0;
        }
        node.side = Side::RING_ORDER[(side_slot.max(0) as usize).min(3)];
        node.index = index_in_side;
        index_in_side += 1;
    }
    out
}

// ---------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub seed: u64,
    pub ablation: Vec<String>,
    pub cases: Vec<BenchResult>,
    pub table: MetricsTable,
}

impl BenchReport {
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        let mut out = serde_json::to_string_pretty(&value).expect("report prints");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<BenchReport, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// SHA-256 over the report with timings zeroed: the reproducibility
    /// digest (wall-clock noise excluded).
    pub fn digest(&self) -> String {
        let mut stripped = self.clone();
        for case in stripped.cases.iter_mut() {
            case.timings = case.timings.zeroed();
        }
        let bytes = stripped.to_json();
        let digest = Sha256::digest(bytes.as_bytes());
        digest.iter().fold(String::new(), |mut acc, b| {
            let _ = write!(acc, "{:02x}", b);
            acc
        })
    }

    /// Aligned text rendering of the metrics table.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<8} {:>5} {:>8} {:>8} {:>8} {:>8} {:>9}",
            "tier", "n", "IG%", "Shape%", "DRC%", "LVS%", "DRC+LVS%"
        );
        let mut row_line = |label: &str, row: &MetricsRow| {
            let _ = writeln!(
                out,
                "{:<8} {:>5} {:>8.2} {:>8.2} {:>8.2} {:>8.2} {:>9.2}",
                label,
                row.total,
                row.ig_pct,
                row.shape_pct,
                row.drc_pct,
                row.lvs_pct,
                row.combined_pct
            );
        };
        for (tier, row) in &self.table.per_tier {
            row_line(tier.as_str(), row);
        }
        row_line("overall", &self.table.overall);
        out
    }
}

/// Generate, evaluate and aggregate. `tier` restricts the run;
/// `jobs` > 1 evaluates cases in parallel (the report order is by case id
/// regardless of completion order).
pub fn run_bench(
    seed: u64,
    tier: Option<Tier>,
    ablation: Ablation,
    kb: &KnowledgeBase,
    jobs: usize,
) -> BenchReport {
    run_bench_to_dir(seed, tier, ablation, kb, jobs, None).expect("no I/O without a bundle dir")
}

/// As [`run_bench`], optionally writing each case's artifact bundle under
/// `<dir>/<case_id>/`: `spec.json`, `intent.json`, `layout.script`,
/// `netlist.txt`, `drc.json`, `lvs.json`, `render.svg`.
pub fn run_bench_to_dir(
    seed: u64,
    tier: Option<Tier>,
    ablation: Ablation,
    kb: &KnowledgeBase,
    jobs: usize,
    cases_dir: Option<&std::path::Path>,
) -> std::io::Result<BenchReport> {
    let cases: Vec<BenchCase> = generate_bench(seed)
        .into_iter()
        .filter(|c| tier.map(|t| c.tier == t).unwrap_or(true))
        .collect();
    let evaluated: Vec<(BenchResult, PipelineOutput)> = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool");
        pool.install(|| {
            cases
                .par_iter()
                .map(|case| evaluate_case_full(case, kb, ablation))
                .collect()
        })
    } else {
        cases
            .iter()
            .map(|case| evaluate_case_full(case, kb, ablation))
            .collect()
    };
    if let Some(dir) = cases_dir {
        for (case, (_, output)) in cases.iter().zip(&evaluated) {
            write_case_bundle(&dir.join(&case.case_id), case, output)?;
        }
    }
    let results: Vec<BenchResult> = evaluated.into_iter().map(|(r, _)| r).collect();
    let table = aggregate_metrics(&results).expect("bench produces results");
    Ok(BenchReport {
        seed,
        ablation: ablation.names(),
        cases: results,
        table,
    })
}

fn write_file_atomic(path: &std::path::Path, contents: &str) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp~");
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)
}

/// Write one case's on-disk bundle. Artifacts the pipeline never produced
/// (ablated or failed runs) come out empty so the bundle shape is stable.
pub fn write_case_bundle(
    dir: &std::path::Path,
    case: &BenchCase,
    output: &PipelineOutput,
) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    write_file_atomic(&dir.join("spec.json"), &case.spec.to_json())?;
    let intent = output
        .graph
        .as_ref()
        .map(crate::intent::serialize_intent_graph)
        .unwrap_or_default();
    write_file_atomic(&dir.join("intent.json"), &intent)?;
    write_file_atomic(&dir.join("layout.script"), output.script.as_deref().unwrap_or(""))?;
    write_file_atomic(
        &dir.join("netlist.txt"),
        output.netlist_text.as_deref().unwrap_or(""),
    )?;
    write_file_atomic(&dir.join("render.svg"), output.svg.as_deref().unwrap_or(""))?;
    let drc = output
        .drc
        .as_ref()
        .map(|d| d.to_json(&case.case_id))
        .unwrap_or_default();
    write_file_atomic(&dir.join("drc.json"), &drc)?;
    let lvs = output
        .lvs
        .as_ref()
        .map(|l| l.to_json(&case.case_id))
        .unwrap_or_default();
    write_file_atomic(&dir.join("lvs.json"), &lvs)?;
    Ok(())
}
