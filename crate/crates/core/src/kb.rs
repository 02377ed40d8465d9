// SPDX-License-Identifier: Apache-2.0
//! Knowledge base: naming conventions, cell masters, design rules, and
//! power-domain definitions.
//!
//! The knowledge base is a single JSON document. It is loaded once,
//! validated, and then shared read-only by every pipeline stage: the
//! structurer matches pad names against it, the resolver takes cell
//! dimensions and design rules from it, and the verifiers use it to ground
//! every geometric and electrical check.

use std::collections::BTreeMap;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{Nm, Rect};

/// Built-in knowledge base document shipped with the tool.
pub const DEFAULT_KB_DOCUMENT: &str = include_str!("../assets/default_kb.json");

#[derive(Debug, Error)]
pub enum KbError {
    #[error("KB parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("KB validation failed [{rule}] on `{entity}`: {message}")]
    Validation {
        rule: String,
        entity: String,
        message: String,
    },
}

fn validation(rule: &str, entity: &str, message: impl Into<String>) -> KbError {
    KbError::Validation {
        rule: rule.to_string(),
        entity: entity.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalClass {
    DigitalIo,
    DigitalClock,
    AnalogSignal,
    ReferenceVoltage,
    CommonMode,
    Supply,
    Ground,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Input,
    Output,
    Bidir,
    Power,
    Passive,
}

impl Direction {
    pub fn parse(s: &str) -> Option<Direction> {
        match s {
            "input" => Some(Direction::Input),
            "output" => Some(Direction::Output),
            "bidir" => Some(Direction::Bidir),
            "power" => Some(Direction::Power),
            "passive" => Some(Direction::Passive),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Input => "input",
            Direction::Output => "output",
            Direction::Bidir => "bidir",
            Direction::Power => "power",
            Direction::Passive => "passive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellKind {
    Pad,
    Corner,
    Filler,
    Breaker,
    CustomPad,
}

impl CellKind {
    /// Pad-like cells carry user signals; fillers, corners, and breakers
    /// are ring infrastructure.
    pub fn is_pad(self) -> bool {
        matches!(self, CellKind::Pad | CellKind::CustomPad)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PinRole {
    Signal,
    CoreSide,
    RailVdd,
    RailVss,
}

/// Name-pattern rule: maps a pad-name glob to device, direction, domain and
/// default pin connections. Patterns are anchored (must match the whole
/// name); first match in file order wins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamePatternRule {
    pub pattern: String,
    pub signal_class: SignalClass,
    pub device_type: String,
    pub direction: Direction,
    pub domain: String,
    /// pin name -> net-name template. Templates may use `{name}` (the pad
    /// name), `{domain}` (domain name), `{vdd}`/`{vss}` (the domain's rail
    /// nets).
    pub connections: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellPin {
    pub name: String,
    pub role: PinRole,
    /// Cell-local coordinates, nm: [x0, y0, x1, y1].
    pub rect_nm: [Nm; 4],
}

impl CellPin {
    pub fn rect(&self) -> Rect {
        Rect::new(self.rect_nm[0], self.rect_nm[1], self.rect_nm[2], self.rect_nm[3])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RailContinuity {
    pub vdd: bool,
    pub vss: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellMaster {
    #[serde(skip)]
    pub name: String,
    pub kind: CellKind,
    pub width_nm: Nm,
    pub height_nm: Nm,
    pub pins: Vec<CellPin>,
    pub rail_continuity: RailContinuity,
    /// Domain this cell belongs to, or "any".
    pub domain_tag: String,
}

impl CellMaster {
    pub fn pin(&self, name: &str) -> Option<&CellPin> {
        self.pins.iter().find(|p| p.name == name)
    }

    pub fn rail_pins(&self) -> impl Iterator<Item = &CellPin> {
        self.pins
            .iter()
            .filter(|p| matches!(p.role, PinRole::RailVdd | PinRole::RailVss))
    }

    pub fn usable_in_domain(&self, domain: &str) -> bool {
        self.domain_tag == "any" || self.domain_tag == domain
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignRules {
    /// Placement snap grid, nm.
    pub grid: Nm,
    /// Maximum gap still counted as abutment, nm.
    pub abut_tol: Nm,
    pub corner_required: bool,
    pub domain_isolation_required: bool,
    pub esd_supply_per_domain: bool,
    /// Inward offset of the inner pad row in staggered rings, nm.
    pub stagger_row_offset: Nm,
    /// Minimum along-side overlap between an inner pad and each of its
    /// outer-row neighbors, nm.
    pub stagger_min_overlap: Nm,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainDef {
    pub name: String,
    pub vdd_net: String,
    pub vss_net: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KnowledgeBase {
    pub patterns: Vec<NamePatternRule>,
    pub cells: BTreeMap<String, CellMaster>,
    pub rules: DesignRules,
    pub domains: Vec<DomainDef>,
    #[serde(skip)]
    matchers: Vec<Regex>,
}

impl PartialEq for KnowledgeBase {
    fn eq(&self, other: &Self) -> bool {
        self.patterns == other.patterns
            && self.cells == other.cells
            && self.rules == other.rules
            && self.domains == other.domains
    }
}

/// Result of matching a pad name against the pattern list.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PatternMatch<'a> {
    Rule(&'a NamePatternRule),
    NoMatch,
}

impl<'a> PatternMatch<'a> {
    pub fn rule(self) -> Option<&'a NamePatternRule> {
        match self {
            PatternMatch::Rule(r) => Some(r),
            PatternMatch::NoMatch => None,
        }
    }
}

/// Compile an anchored glob (`*` any run, `?` one char) to a regex.
fn compile_glob(pattern: &str) -> Result<Regex, regex::Error> {
    let mut re = String::with_capacity(pattern.len() + 2);
    re.push('^');
    for ch in pattern.chars() {
        match ch {
            '*' => re.push_str(".*"),
            '?' => re.push('.'),
            c => re.push_str(&regex::escape(&c.to_string())),
        }
    }
    re.push('$');
    Regex::new(&re)
}

fn is_legal_net_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Check that a connection template expands to a legal net name: literal
/// characters are alphanumeric/underscore and placeholders are known.
fn check_template(template: &str) -> Result<(), String> {
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        let before = &rest[..open];
        if !before.chars().all(is_legal_net_char) {
            return Err(format!("illegal characters in template `{}`", template));
        }
        let close = rest[open..]
            .find('}')
            .map(|i| open + i)
            .ok_or_else(|| format!("unterminated placeholder in `{}`", template))?;
        let key = &rest[open + 1..close];
        if !matches!(key, "name" | "domain" | "vdd" | "vss") {
            return Err(format!("unknown placeholder `{{{}}}` in `{}`", key, template));
        }
        rest = &rest[close + 1..];
    }
    if !rest.chars().all(is_legal_net_char) {
        return Err(format!("illegal characters in template `{}`", template));
    }
    Ok(())
}

/// Expand a connection template for a concrete pad in a concrete domain.
pub fn expand_template(template: &str, pad_name: &str, domain: &DomainDef) -> String {
    template
        .replace("{name}", pad_name)
        .replace("{domain}", &domain.name)
        .replace("{vdd}", &domain.vdd_net)
        .replace("{vss}", &domain.vss_net)
}

impl KnowledgeBase {
    /// Load and validate a knowledge-base document.
    pub fn load(text: &str) -> Result<KnowledgeBase, KbError> {
        let mut kb: KnowledgeBase =
            serde_json::from_str(text).map_err(|e| KbError::Parse {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
        for (name, cell) in kb.cells.iter_mut() {
            cell.name = name.clone();
        }
        kb.compile_matchers()?;
        kb.validate()?;
        Ok(kb)
    }

    /// Load the built-in default knowledge base. Panics only if the shipped
    /// document is itself invalid, which the test suite rules out.
    pub fn load_default() -> KnowledgeBase {
        KnowledgeBase::load(DEFAULT_KB_DOCUMENT).expect("built-in KB document is valid")
    }

    /// Canonical JSON serialization (sorted keys, stable bytes).
    pub fn serialize(&self) -> String {
        let value = serde_json::to_value(self).expect("KB serializes");
        let mut out = serde_json::to_string_pretty(&value).expect("KB prints");
        out.push('\n');
        out
    }

    fn compile_matchers(&mut self) -> Result<(), KbError> {
        self.matchers.clear();
        for rule in &self.patterns {
            if rule.pattern.is_empty() {
                return Err(validation("pattern_nonempty", &rule.pattern, "empty pattern"));
            }
            let re = compile_glob(&rule.pattern).map_err(|e| {
                validation("pattern_compiles", &rule.pattern, e.to_string())
            })?;
            self.matchers.push(re);
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), KbError> {
        // Domain table: unique names, distinct rails.
        let mut seen = std::collections::BTreeSet::new();
        for d in &self.domains {
            if !seen.insert(&d.name) {
                return Err(validation("domain_unique", &d.name, "duplicate domain name"));
            }
            if d.vdd_net == d.vss_net {
                return Err(validation(
                    "domain_rails_distinct",
                    &d.name,
                    "vdd_net equals vss_net",
                ));
            }
        }

        // Patterns reference existing cells and domains; templates legal.
        for rule in &self.patterns {
            if !self.cells.contains_key(&rule.device_type) {
                return Err(validation(
                    "pattern_device_exists",
                    &rule.pattern,
                    format!("device_type `{}` not in cells", rule.device_type),
                ));
            }
            if self.domain(&rule.domain).is_none() {
                return Err(validation(
                    "pattern_domain_exists",
                    &rule.pattern,
                    format!("domain `{}` not defined", rule.domain),
                ));
            }
            for (pin, template) in &rule.connections {
                check_template(template)
                    .map_err(|m| validation("template_legal", &rule.pattern, m))?;
                if self.cells[&rule.device_type].pin(pin).is_none() {
                    return Err(validation(
                        "pattern_pin_exists",
                        &rule.pattern,
                        format!("pin `{}` not on `{}`", pin, rule.device_type),
                    ));
                }
            }
        }

        // Cell geometry and kind constraints.
        let mut corner_count = 0usize;
        let mut breaker_count = 0usize;
        for (name, cell) in &self.cells {
            if cell.width_nm <= 0 || cell.height_nm <= 0 {
                return Err(validation("cell_positive_dims", name, "non-positive extent"));
            }
            let outline = Rect::new(0, 0, cell.width_nm, cell.height_nm);
            for pin in &cell.pins {
                let r = pin.rect();
                if r.width() <= 0 || r.height() <= 0 || !outline.contains_rect(&r) {
                    return Err(validation(
                        "pin_inside_cell",
                        name,
                        format!("pin `{}` rectangle outside cell outline", pin.name),
                    ));
                }
            }
            match cell.kind {
                CellKind::Corner => corner_count += 1,
                CellKind::Breaker => {
                    breaker_count += 1;
                    if cell.rail_continuity.vdd || cell.rail_continuity.vss {
                        return Err(validation(
                            "breaker_cuts_rails",
                            name,
                            "breaker must have rail_continuity false for both rails",
                        ));
                    }
                }
                _ => {}
            }
            if matches!(cell.kind, CellKind::Filler | CellKind::Corner)
                && cell.pins.iter().any(|p| p.role == PinRole::Signal)
            {
                return Err(validation(
                    "no_signal_pins",
                    name,
                    "filler/corner cells must not carry signal pins",
                ));
            }
        }
        if corner_count != 1 {
            return Err(validation(
                "one_corner_master",
                "cells",
                format!("expected exactly 1 corner master, found {}", corner_count),
            ));
        }
        if breaker_count == 0 {
            return Err(validation("breaker_exists", "cells", "no breaker cell defined"));
        }

        // Per-domain filler coverage with distinct positive widths.
        for d in &self.domains {
            let widths: Vec<Nm> = self.filler_widths(&d.name);
            if widths.is_empty() {
                return Err(validation(
                    "filler_per_domain",
                    &d.name,
                    "no filler cell usable in domain",
                ));
            }
            let mut sorted = widths.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != widths.len() {
                return Err(validation(
                    "filler_widths_distinct",
                    &d.name,
                    "duplicate filler widths in domain",
                ));
            }
        }

        // Rule sanity.
        if self.rules.grid < 1 {
            return Err(validation("grid_min", "rules", "grid must be >= 1 nm"));
        }
        if self.rules.abut_tol >= self.rules.grid {
            return Err(validation(
                "abut_tol_below_grid",
                "rules",
                "abut_tol must be smaller than grid",
            ));
        }
        Ok(())
    }

    /// First rule (in file order) whose anchored pattern matches the whole
    /// name.
    pub fn match_pattern(&self, name: &str) -> PatternMatch<'_> {
        debug_assert_eq!(self.matchers.len(), self.patterns.len());
        for (rule, re) in self.patterns.iter().zip(&self.matchers) {
            if re.is_match(name) {
                return PatternMatch::Rule(rule);
            }
        }
        PatternMatch::NoMatch
    }

    pub fn domain(&self, name: &str) -> Option<&DomainDef> {
        self.domains.iter().find(|d| d.name == name)
    }

    pub fn cell(&self, name: &str) -> Option<&CellMaster> {
        self.cells.get(name)
    }

    /// The single corner master.
    pub fn corner(&self) -> &CellMaster {
        self.cells
            .values()
            .find(|c| c.kind == CellKind::Corner)
            .expect("validated KB has a corner master")
    }

    /// First breaker master by name order.
    pub fn breaker(&self) -> &CellMaster {
        self.cells
            .values()
            .find(|c| c.kind == CellKind::Breaker)
            .expect("validated KB has a breaker master")
    }

    /// Fillers usable in `domain`, widest first.
    pub fn fillers_for(&self, domain: &str) -> Vec<&CellMaster> {
        let mut fillers: Vec<&CellMaster> = self
            .cells
            .values()
            .filter(|c| c.kind == CellKind::Filler && c.usable_in_domain(domain))
            .collect();
        fillers.sort_by(|a, b| b.width_nm.cmp(&a.width_nm).then(a.name.cmp(&b.name)));
        fillers
    }

    fn filler_widths(&self, domain: &str) -> Vec<Nm> {
        self.fillers_for(domain).iter().map(|c| c.width_nm).collect()
    }
}
