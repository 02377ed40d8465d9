// SPDX-License-Identifier: Apache-2.0
//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line. Run with `cargo test -p ioring-cli --test acceptance --
//! --nocapture` to see the lines.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use ioring_core::bench::{
    aggregate_metrics, audit_tiers, generate_bench, run_bench, run_bench_to_dir, shape_check,
    BenchReport, BenchResult, Tier,
};
use ioring_core::kb::CellKind;
use ioring_core::layout::{resolve_geometry, solve_fillers};
use ioring_core::netlist::{extract_netlist, generate_netlist};
use ioring_core::pipeline::{Ablation, StageTimings};
use ioring_core::structurer::{structure_intent, StructurerConfig};
use ioring_core::verify::{run_drc, run_lvs, LvsDiffKind};
use ioring_core::{serialize_intent_graph, KnowledgeBase};

fn pass(criterion: usize, name: &str) {
    println!("ACCEPTANCE {:>2} ({}): PASS", criterion, name);
}

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_ioring")
}

fn kb() -> KnowledgeBase {
    KnowledgeBase::load_default()
}

// -------------------------------------------------------------------
// 1. Pipeline self-consistency: bench --seed 42 scores 30/30 on all
//    five metrics, total < 60 s, single case < 2 s.
// -------------------------------------------------------------------
#[test]
fn criterion_01_pipeline_self_consistency() {
    let kb = kb();
    let started = Instant::now();
    let report = run_bench(42, None, Ablation::default(), &kb, 1);
    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(60),
        "bench took {:?}, budget 60 s",
        elapsed
    );
    assert_eq!(report.cases.len(), 30);
    for case in &report.cases {
        assert!(
            case.metric1_ig
                && case.metric2_shape
                && case.metric3_drc
                && case.metric4_lvs
                && case.metric5_combined,
            "case {} not fully green",
            case.case_id
        );
        assert!(
            case.timings.total_ms() < 2_000.0,
            "case {} took {} ms, budget 2 s",
            case.case_id,
            case.timings.total_ms()
        );
    }
    let o = &report.table.overall;
    assert_eq!(
        (o.ig_pct, o.shape_pct, o.drc_pct, o.lvs_pct, o.combined_pct),
        (100.0, 100.0, 100.0, 100.0, 100.0)
    );

    // The CLI path reports the same result.
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let status = Command::new(binary())
        .args(["bench", "--seed", "42", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let cli_report = BenchReport::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(cli_report.table.overall.combined_pct, 100.0);
    pass(1, "pipeline self-consistency 30/30 under budget");
}

// -------------------------------------------------------------------
// 2. Benchmark composition: 10/10/10, medium die exact, hard features.
// -------------------------------------------------------------------
#[test]
fn criterion_02_benchmark_composition() {
    let cases = generate_bench(42);
    audit_tiers(&cases).unwrap();
    for case in cases.iter().filter(|c| c.tier == Tier::Medium) {
        assert_eq!((case.spec.die_w, case.spec.die_h), (1_000_000, 1_000_000));
    }
    for case in cases.iter().filter(|c| c.tier == Tier::Hard) {
        assert!(
            !case.hard_features().is_empty(),
            "hard case {} has no hard feature",
            case.case_id
        );
    }
    pass(2, "tier composition audit 10/10/10 with feature checks");
}

// -------------------------------------------------------------------
// 3. Metric arithmetic: reference ratios land exactly on 2 decimals.
// -------------------------------------------------------------------
#[test]
fn criterion_03_metric_arithmetic() {
    fn synthetic(passes: usize, total: usize) -> Vec<BenchResult> {
        (0..total)
            .map(|i| {
                let ok = i < passes;
                BenchResult::new(
                    format!("case_{:02}", i),
                    Tier::Simple,
                    true,
                    true,
                    ok,
                    ok,
                    StageTimings::default(),
                )
            })
            .collect()
    }
    for (passes, expect) in [(23usize, 76.67), (28, 93.33), (20, 66.67), (19, 63.33), (30, 100.00)] {
        let table = aggregate_metrics(&synthetic(passes, 30)).unwrap();
        assert_eq!(
            table.overall.combined_pct, expect,
            "{}/30 should map to {}",
            passes, expect
        );
    }
    pass(3, "aggregate percentages exact to two decimals");
}

// -------------------------------------------------------------------
// 4. Ablation structure: no_kb zeros everything, no_adaptor keeps the
//    intent metric at 100 and zeros signoff, no ablation is all-green.
// -------------------------------------------------------------------
#[test]
fn criterion_04_ablation_structure() {
    let kb = kb();
    let no_kb = run_bench(42, None, Ablation { no_kb: true, ..Default::default() }, &kb, 1);
    assert_eq!(no_kb.table.overall.combined_pct, 0.0);
    assert_eq!(no_kb.table.overall.ig_pct, 0.0);

    let no_adaptor = run_bench(
        42,
        None,
        Ablation { no_adaptor: true, ..Default::default() },
        &kb,
        1,
    );
    assert_eq!(no_adaptor.table.overall.ig_pct, 100.0);
    assert_eq!(no_adaptor.table.overall.drc_pct, 0.0);
    assert_eq!(no_adaptor.table.overall.lvs_pct, 0.0);
    assert_eq!(no_adaptor.table.overall.combined_pct, 0.0);

    let full = run_bench(42, None, Ablation::default(), &kb, 1);
    assert_eq!(full.table.overall.combined_pct, 100.0);
    pass(4, "ablations zero out exactly the downstream metrics");
}

// -------------------------------------------------------------------
// 5. Mutation suite: ten fault injections, each detected by its
//    documented rule code, LVS diff kind, or shape-check failure.
// -------------------------------------------------------------------
#[test]
fn criterion_05_mutation_suite() {
    let kb = kb();
    let case = generate_bench(42)
        .into_iter()
        .find(|c| c.tier == Tier::Medium)
        .unwrap();
    let cfg = StructurerConfig { strict: true, ..Default::default() };
    let graph = structure_intent(&case.spec, &kb, &cfg).unwrap();
    let layout = resolve_geometry(&graph, &kb).unwrap();
    let schematic = generate_netlist(&graph, &kb);

    // No false alarms on the unmutated artifacts.
    assert!(run_drc(&layout, &kb).passed);
    assert!(run_lvs(&schematic, &extract_netlist(&layout, &graph, &kb).netlist).clean());
    assert!(shape_check(&layout, &case.golden).pass);

    let mut detected = 0;

    // 1. Filler removed -> DRC.1 abutment and DRC.5 closure.
    {
        let mut m = layout.clone();
        let pos = m.instances.iter().position(|i| i.kind == CellKind::Filler).unwrap();
        m.instances.remove(pos);
        let codes = run_drc(&m, &kb).rule_codes().join(",");
        assert!(codes.contains("DRC.1") && codes.contains("DRC.5"), "{}", codes);
        detected += 1;
    }
    // 2. Pad pushed off the die -> DRC.2 containment.
    {
        let mut m = layout.clone();
        let pad = m.instances.iter_mut().find(|i| i.kind.is_pad() && i.side == ioring_core::Side::S).unwrap();
        pad.origin.1 -= 10_000;
        assert!(run_drc(&m, &kb).rule_codes().contains(&"DRC.2"));
        detected += 1;
    }
    // 3. Overlapping pads -> DRC.3.
    {
        let mut m = layout.clone();
        let positions: Vec<usize> = m
            .instances
            .iter()
            .enumerate()
            .filter(|(_, i)| i.kind.is_pad() && i.side == ioring_core::Side::S)
            .map(|(i, _)| i)
            .collect();
        let shift_from = m.instances[positions[1]].origin.0 - 20_000;
        m.instances[positions[1]].origin.0 = shift_from;
        assert!(run_drc(&m, &kb).rule_codes().contains(&"DRC.3"));
        detected += 1;
    }
    // 4. Missing corner -> DRC.4.
    {
        let mut m = layout.clone();
        let pos = m.instances.iter().position(|i| i.kind == CellKind::Corner).unwrap();
        m.instances.remove(pos);
        assert!(run_drc(&m, &kb).rule_codes().contains(&"DRC.4"));
        detected += 1;
    }
    // 5. Breaker deleted (swapped for a rail-continuous filler) ->
    //    DRC.6 and an LVS short.
    {
        let mut m = layout.clone();
        let pos = m.instances.iter().position(|i| i.kind == CellKind::Breaker).unwrap();
        let width = kb.cell(&m.instances[pos].master).unwrap().width_nm;
        let filler = kb
            .fillers_for("any")
            .into_iter()
            .find(|f| f.width_nm == width)
            .unwrap()
            .name
            .clone();
        m.instances[pos].master = filler;
        m.instances[pos].kind = CellKind::Filler;
        assert!(run_drc(&m, &kb).rule_codes().contains(&"DRC.6"));
        let mut schem = schematic.clone();
        let brk = graph
            .nodes
            .iter()
            .find(|n| graph.kind_of(n, &kb) == Some(CellKind::Breaker))
            .unwrap();
        schem.instances.remove(&brk.name);
        let lvs = run_lvs(&schem, &extract_netlist(&m, &graph, &kb).netlist);
        assert!(lvs.kinds().contains(&LvsDiffKind::Short));
        detected += 1;
    }
    // 6. Domain shuffle without breakers -> DRC.6.
    {
        let mut m = layout.clone();
        let mut flip = false;
        for inst in m.instances.iter_mut().filter(|i| i.kind.is_pad() && i.side == ioring_core::Side::S) {
            if flip {
                inst.domain = if inst.domain == "DVDD" { "AVDD".into() } else { "DVDD".into() };
            }
            flip = !flip;
        }
        assert!(run_drc(&m, &kb).rule_codes().contains(&"DRC.6"));
        detected += 1;
    }
    // 7. Net renamed onto an existing net in the schematic -> open
    //    (one schematic net now spans two extracted nets).
    {
        let mut schem = schematic.clone();
        let pins = schem.nets.remove("DVDD").unwrap();
        schem.nets.get_mut("AVDD").unwrap().extend(pins);
        let lvs = run_lvs(&schem, &extract_netlist(&layout, &graph, &kb).netlist);
        assert!(lvs.kinds().contains(&LvsDiffKind::Open), "{:?}", lvs.kinds());
        detected += 1;
    }
    // 8. Instance deleted from the schematic -> extra instance on the
    //    layout side.
    {
        let mut schem = schematic.clone();
        let victim = schem
            .instances
            .keys()
            .find(|k| k.starts_with('D'))
            .cloned()
            .unwrap();
        schem.instances.remove(&victim);
        let lvs = run_lvs(&schem, &extract_netlist(&layout, &graph, &kb).netlist);
        assert!(lvs.kinds().contains(&LvsDiffKind::ExtraInstance));
        detected += 1;
    }
    // 9. Pad order swapped on one side -> shape-check failure naming
    //    the side.
    {
        let mut m = layout.clone();
        let positions: Vec<usize> = m
            .instances
            .iter()
            .enumerate()
            .filter(|(_, i)| i.kind.is_pad() && i.side == ioring_core::Side::S)
            .map(|(i, _)| i)
            .collect();
        let (a, b) = (positions[0], positions[1]);
        let tmp = m.instances[a].origin;
        m.instances[a].origin = m.instances[b].origin;
        m.instances[b].origin = tmp;
        let outcome = shape_check(&m, &case.golden);
        assert!(!outcome.pass);
        assert!(outcome.reasons.iter().any(|r| r.contains("side S")), "{:?}", outcome.reasons);
        detected += 1;
    }
    // 10. Off-grid origin -> DRC.8.
    {
        let mut m = layout.clone();
        let pad = m.instances.iter_mut().find(|i| i.kind.is_pad()).unwrap();
        pad.origin.0 += 5; // default grid is 10 nm
        assert!(run_drc(&m, &kb).rule_codes().contains(&"DRC.8"));
        detected += 1;
    }

    assert_eq!(detected, 10);
    pass(5, "10/10 fault injections detected, 0 false passes");
}

// -------------------------------------------------------------------
// 6. Filler-solver oracle equivalence over gaps 0..100000 nm at 500 nm
//    resolution, in under 5 s.
// -------------------------------------------------------------------
#[test]
fn criterion_06_filler_solver_oracle_equivalence() {
    // The default filler inventory.
    let widths: Vec<i64> = vec![20_000, 10_000, 5_000, 1_000, 500];
    // Exhaustive breadth-first oracle over reachable sums.
    fn oracle(gap: i64, widths: &[i64]) -> Option<usize> {
        if gap == 0 {
            return Some(0);
        }
        let mut reached = vec![false; (gap + 1) as usize];
        reached[0] = true;
        let mut frontier = vec![0i64];
        let mut steps = 0usize;
        while !frontier.is_empty() {
            steps += 1;
            let mut next = Vec::new();
            for &s in &frontier {
                for &w in widths {
                    let t = s + w;
                    if t == gap {
                        return Some(steps);
                    }
                    if t < gap && !reached[t as usize] {
                        reached[t as usize] = true;
                        next.push(t);
                    }
                }
            }
            frontier = next;
        }
        None
    }
    let started = Instant::now();
    let mut checked = 0usize;
    for gap in (0..=100_000).step_by(500) {
        let got = solve_fillers(gap, &widths).ok();
        let want = oracle(gap, &widths);
        assert_eq!(got.as_ref().map(|p| p.pieces.len()), want, "gap {}", gap);
        if let Some(plan) = got {
            assert_eq!(plan.pieces.iter().sum::<i64>(), gap);
        }
        checked += 1;
    }
    let elapsed = started.elapsed();
    assert_eq!(checked, 201);
    assert!(elapsed < Duration::from_secs(5), "took {:?}", elapsed);
    pass(6, "201 gap values agree with the exhaustive oracle");
}

// -------------------------------------------------------------------
// 7. Round-trip regeneration: reorder six pads in the serialized JSON,
//    rebuild through the CLI, clean signoff in < 2 s, updated golden
//    matches.
// -------------------------------------------------------------------
#[test]
fn criterion_07_round_trip_regeneration() {
    let kb = kb();
    let mut case = generate_bench(42)
        .into_iter()
        .find(|c| c.tier == Tier::Medium)
        .unwrap();
    let cfg = StructurerConfig { strict: true, ..Default::default() };
    let graph = structure_intent(&case.spec, &kb, &cfg).unwrap();
    let text = serialize_intent_graph(&graph);

    // Pick six same-domain pads on the south side and rotate their
    // identities in the JSON, the way a pin-reorder edit would.
    let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let nodes = value["nodes"].as_array_mut().unwrap();
    let targets: Vec<usize> = nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| {
            n["side"] == "S"
                && n["provenance"] == "explicit"
                && n["domain"] == "DVDD"
                && n["device_type"] == "PAD_DIG"
        })
        .map(|(i, _)| i)
        .take(6)
        .collect();
    assert_eq!(targets.len(), 6, "medium case has six digital south pads");
    let fields = ["name", "device_type", "direction", "connections"];
    let saved: Vec<BTreeMap<&str, serde_json::Value>> = targets
        .iter()
        .map(|&i| {
            fields
                .iter()
                .map(|&f| (f, nodes[i][f].clone()))
                .collect()
        })
        .collect();
    for (k, &i) in targets.iter().enumerate() {
        let from = &saved[(k + 1) % 6];
        for &f in &fields {
            nodes[i][f] = from[f].clone();
        }
    }
    let edited = serde_json::to_string_pretty(&value).unwrap();

    // Updated golden: the same rotation applied to the reference order.
    let original_golden = case.golden.clone();
    let rotate_names: Vec<String> = saved
        .iter()
        .map(|fields| fields["name"].as_str().unwrap().to_string())
        .collect();
    let golden_side = case.golden.sides.get_mut(&ioring_core::Side::S).unwrap();
    let positions: Vec<usize> = golden_side
        .iter()
        .enumerate()
        .filter(|(_, n)| rotate_names.contains(n))
        .map(|(i, _)| i)
        .collect();
    assert_eq!(positions.len(), 6);
    for (k, &i) in positions.iter().enumerate() {
        golden_side[i] = rotate_names[(k + 1) % 6].clone();
    }
    assert_ne!(case.golden, original_golden, "the edit must reorder pads");

    let dir = tempfile::tempdir().unwrap();
    let intent_path = dir.path().join("intent.json");
    std::fs::write(&intent_path, &edited).unwrap();

    let started = Instant::now();
    let status = Command::new(binary())
        .args(["build", "--intent"])
        .arg(&intent_path)
        .args(["-o"])
        .arg(dir.path())
        .status()
        .unwrap();
    let elapsed = started.elapsed();
    assert_eq!(status.code(), Some(0), "rebuild must be DRC+LVS clean");
    assert!(elapsed < Duration::from_secs(2), "rebuild took {:?}", elapsed);

    // The regenerated layout realizes the updated reference order, and no
    // longer matches the stale one.
    let edited_graph = ioring_core::parse_intent_graph(&edited).unwrap();
    let layout = resolve_geometry(&edited_graph, &kb).unwrap();
    let outcome = shape_check(&layout, &case.golden);
    assert!(outcome.pass, "{:?}", outcome.reasons);
    assert!(!shape_check(&layout, &original_golden).pass);
    pass(7, "six-pad reorder rebuilds clean within budget");
}

// -------------------------------------------------------------------
// 8. Determinism: identical seeds give byte-identical report digests
//    and byte-identical emitted artifacts for every case.
// -------------------------------------------------------------------
#[test]
fn criterion_08_determinism() {
    let kb = kb();
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let a = run_bench_to_dir(42, None, Ablation::default(), &kb, 2, Some(dir_a.path())).unwrap();
    let b = run_bench_to_dir(42, None, Ablation::default(), &kb, 4, Some(dir_b.path())).unwrap();
    assert_eq!(a.digest(), b.digest());
    let mut compared = 0usize;
    for case in &a.cases {
        for file in [
            "spec.json",
            "intent.json",
            "layout.script",
            "netlist.txt",
            "render.svg",
            "drc.json",
            "lvs.json",
        ] {
            let pa = dir_a.path().join(&case.case_id).join(file);
            let pb = dir_b.path().join(&case.case_id).join(file);
            let ba = std::fs::read(&pa).unwrap();
            let bb = std::fs::read(&pb).unwrap();
            assert_eq!(ba, bb, "{} differs for {}", file, case.case_id);
            compared += 1;
        }
    }
    assert_eq!(compared, 30 * 7);
    pass(8, "byte-identical digests and artifacts across runs");
}

// -------------------------------------------------------------------
// 9. External-structurer contract against a local stub endpoint.
// -------------------------------------------------------------------
#[test]
fn criterion_09_external_structurer_contract() {
    use ioring_core::structurer::{structure_intent_external, StructureError, StructurerMode};

    let kb = kb();
    let case = generate_bench(42).into_iter().next().unwrap();
    let cfg = StructurerConfig { strict: true, ..Default::default() };
    let graph = structure_intent(&case.spec, &kb, &cfg).unwrap();
    let good_body = serde_json::json!({
        "graph": serde_json::from_str::<serde_json::Value>(&serialize_intent_graph(&graph)).unwrap()
    })
    .to_string();
    let mut bad_graph = graph.clone();
    let pos = bad_graph.nodes.iter().position(|n| n.device_type == "CORNER").unwrap();
    bad_graph.nodes.remove(pos);
    let bad_body = serde_json::json!({
        "graph": serde_json::from_str::<serde_json::Value>(&serialize_intent_graph(&bad_graph)).unwrap()
    })
    .to_string();

    let serve = |responses: Vec<String>| -> (String, std::thread::JoinHandle<()>) {
        let server = tiny_http::Server::http("127.0.0.1:0").unwrap();
        let port = server.server_addr().to_ip().unwrap().port();
        let handle = std::thread::spawn(move || {
            for body in responses {
                let Ok(req) = server.recv() else { return };
                let _ = req.respond(tiny_http::Response::from_string(body));
            }
        });
        (format!("http://127.0.0.1:{}/v1", port), handle)
    };
    let ext_cfg = |endpoint: &str| StructurerConfig {
        mode: StructurerMode::External,
        endpoint: Some(endpoint.to_string()),
        strict: true,
    };

    // Scenario A: valid echo.
    let (url, h) = serve(vec![good_body.clone()]);
    assert_eq!(
        structure_intent_external(&case.spec, &kb, &ext_cfg(&url)).unwrap(),
        graph
    );
    h.join().unwrap();

    // Scenario B: two malformed responses, then recovery.
    let (url, h) = serve(vec!["garbage".into(), "{}".into(), good_body]);
    assert_eq!(
        structure_intent_external(&case.spec, &kb, &ext_cfg(&url)).unwrap(),
        graph
    );
    h.join().unwrap();

    // Scenario C: structurally invalid graph surfaces validation.
    let (url, h) = serve(vec![bad_body]);
    match structure_intent_external(&case.spec, &kb, &ext_cfg(&url)) {
        Err(StructureError::ExternalValidation { codes, .. }) => {
            assert!(codes.iter().any(|c| c == "MISSING_CORNER"));
        }
        other => panic!("expected validation error, got {:?}", other),
    }
    h.join().unwrap();
    pass(9, "external endpoint echo/retry/validation scenarios 3/3");
}
