// SPDX-License-Identifier: Apache-2.0
//! Golden-file pins for the emitters: byte-exact script, netlist and SVG
//! output for three fixture rings. Regenerate with
//! `UPDATE_GOLDEN=1 cargo test -p ioring-core --test golden`.

use std::path::PathBuf;

use ioring_core::layout::resolve_geometry;
use ioring_core::netlist::generate_netlist;
use ioring_core::padplan::{parse_pin_plan, PlanFormat};
use ioring_core::structurer::{structure_intent, StructurerConfig};
use ioring_core::{emit_netlist_text, emit_script, emit_svg, KnowledgeBase};

fn fixture(name: &str) -> &'static str {
    match name {
        // Smallest ring: one pad per side, single domain.
        "minimal" => {
            "#! DIE_UM w=600 h=600\nname,side,order\n\
             D0,S,0\nVDD1,E,0\nVSS1,N,0\nD1,W,0\n"
        }
        // Two domains with breakers and a reference/common-mode cluster.
        "two_domain" => {
            "#! DIE_UM w=1000 h=1000\nname,side,order\n\
             D0,S,0\nD1,S,1\nVDD1,S,2\nVSS1,S,3\nDCLK,S,4\n\
             VCM,E,0\nVREFP,E,1\nVREFN,E,2\n\
             AVDD1,N,0\nAVSS1,N,1\nAIN0,N,2\n\
             D2,W,0\nD3,W,1\n"
        }
        // Staggered south side with a custom analog pad.
        "staggered" => {
            "#! DIE_UM w=1500 h=1500\n\
             #! SET_RING_STYLE style=staggered\n\
             #! USE_CUSTOM_CELL name=AIN1 cell=APAD_LOWCAP\n\
             name,side,order,row\n\
             AIN1,S,0,\nAIN2,S,1,inner\nAIN3,S,2,\nAIN4,S,3,inner\nAIN5,S,4,\n\
             AVDD1,E,0,\nAVSS1,E,1,\n\
             D0,N,0,\nVDD1,N,1,\nVSS1,N,2,\n\
             D1,W,0,\n"
        }
        other => panic!("unknown fixture {}", other),
    }
}

fn golden_path(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(file)
}

fn check_or_update(file: &str, produced: &str) {
    let path = golden_path(file);
    if std::env::var("UPDATE_GOLDEN").is_ok() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, produced).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("missing golden {}: {}", path.display(), e));
    assert_eq!(produced, want, "golden mismatch for {}", file);
}

fn emit_all(name: &str) {
    let kb = KnowledgeBase::load_default();
    let spec = parse_pin_plan(fixture(name), PlanFormat::Csv).unwrap();
    let cfg = StructurerConfig {
        strict: true,
        ..Default::default()
    };
    let graph = structure_intent(&spec, &kb, &cfg).unwrap();
    let layout = resolve_geometry(&graph, &kb).unwrap();
    let netlist = generate_netlist(&graph, &kb);
    check_or_update(
        &format!("{}.script", name),
        &emit_script(&layout, &netlist, &graph).unwrap(),
    );
    check_or_update(&format!("{}.netlist.txt", name), &emit_netlist_text(&netlist));
    check_or_update(&format!("{}.svg", name), &emit_svg(&layout, &kb));
}

#[test]
fn minimal_ring_emitters_match_golden_bytes() {
    emit_all("minimal");
}

#[test]
fn two_domain_ring_emitters_match_golden_bytes() {
    emit_all("two_domain");
}

#[test]
fn staggered_ring_emitters_match_golden_bytes() {
    emit_all("staggered");
}
