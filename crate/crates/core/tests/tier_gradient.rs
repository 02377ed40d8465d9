// SPDX-License-Identifier: Apache-2.0
//! Difficulty-gradient harness: a fault-injecting structurer that drops
//! inferred breakers with a tier-dependent probability must produce
//! non-increasing pass rates from simple to hard. Simple cases carry no
//! breakers (single domain), so they are immune; richer domain structure
//! means more breakers at risk.

use ioring_core::bench::{evaluate_case_with_fault, generate_bench, Tier};
use ioring_core::KnowledgeBase;

#[test]
fn pass_rates_fall_monotonically_with_injected_breaker_drops() {
    let kb = KnowledgeBase::load_default();
    let cases = generate_bench(42);
    let drop_prob = |tier: Tier| match tier {
        Tier::Simple => 0.0,
        Tier::Medium => 0.35,
        Tier::Hard => 0.65,
    };
    let mut pass = std::collections::BTreeMap::from([
        (Tier::Simple, 0usize),
        (Tier::Medium, 0usize),
        (Tier::Hard, 0usize),
    ]);
    for case in &cases {
        let result = evaluate_case_with_fault(case, &kb, drop_prob(case.tier), lapped_seed());
        if result.metric5_combined {
            *pass.get_mut(&case.tier).unwrap() += 1;
        }
    }
    let simple = pass[&Tier::Simple];
    let medium = pass[&Tier::Medium];
    let hard = pass[&Tier::Hard];
    assert_eq!(simple, 10, "single-domain cases have no breakers to drop");
    assert!(
        simple >= medium && medium >= hard,
        "expected non-increasing pass rates, got {}/{}/{}",
        simple,
        medium,
        hard
    );
    assert!(hard < 10, "hard tier should lose cases under injection");
}

fn lapped_seed() -> u64 {
    9_001
}
