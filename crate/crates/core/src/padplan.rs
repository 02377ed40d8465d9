// SPDX-License-Identifier: Apache-2.0
//! Pad-plan ingestion: tabular pin lists (CSV) and structured JSON plans,
//! plus the controlled directive grammar used for non-tabular requirements.
//!
//! CSV dialect: comma-separated with a mandatory header row
//! `name,side,order[,device,direction,domain,row]`. Lines starting with `#`
//! are comments; lines starting with `#!` carry metadata and directives,
//! e.g. `#! DIE_UM w=1000 h=1000` or `#! USE_CUSTOM_CELL name=VINP
//! cell=APAD_LOWCAP`. Dimensions are micrometers in input files and integer
//! nanometers internally.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{Nm, Side};
use crate::kb::Direction;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("duplicate pin name `{name}`")]
    DuplicatePin { name: String },
    #[error("off-grid dimension `{value}`: finer than 1 nm")]
    OffGrid { value: String },
    #[error("directive error: {message}")]
    Directive { message: String },
}

fn parse_err(line: usize, message: impl Into<String>) -> PlanError {
    PlanError::Parse {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RingStyle {
    SingleRow,
    Staggered,
}

impl RingStyle {
    pub fn as_str(self) -> &'static str {
        match self {
            RingStyle::SingleRow => "single_row",
            RingStyle::Staggered => "staggered",
        }
    }

    pub fn parse(s: &str) -> Option<RingStyle> {
        match s {
            "single_row" => Some(RingStyle::SingleRow),
            "staggered" => Some(RingStyle::Staggered),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Row {
    Outer,
    Inner,
}

impl Row {
    pub fn as_str(self) -> &'static str {
        match self {
            Row::Outer => "outer",
            Row::Inner => "inner",
        }
    }

    pub fn parse(s: &str) -> Option<Row> {
        match s {
            "outer" => Some(Row::Outer),
            "inner" => Some(Row::Inner),
            _ => None,
        }
    }
}

/// Per-pin attribute overrides. Overrides win field-wise over knowledge-base
/// inference.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PinOverrides {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub device_type: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub direction: Option<Direction>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub domain: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub row: Option<Row>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub connections: Option<BTreeMap<String, String>>,
}

impl PinOverrides {
    pub fn is_empty(&self) -> bool {
        self.device_type.is_none()
            && self.direction.is_none()
            && self.domain.is_none()
            && self.row.is_none()
            && self.connections.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PinEntry {
    pub name: String,
    #[serde(default, skip_serializing_if = "PinOverrides::is_empty")]
    pub overrides: PinOverrides,
}

impl PinEntry {
    pub fn named(name: &str) -> PinEntry {
        PinEntry {
            name: name.to_string(),
            overrides: PinOverrides::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectiveKind {
    SetRingStyle,
    SetDomainOrder,
    UseCustomCell,
    LocalEsdDomain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Directive {
    pub kind: DirectiveKind,
    pub args: BTreeMap<String, String>,
}

impl Directive {
    /// Construct a directive, enforcing the kind-specific argument schema.
    pub fn new(kind: DirectiveKind, args: BTreeMap<String, String>) -> Result<Directive, PlanError> {
        let required: &[&str] = match kind {
            DirectiveKind::SetRingStyle => &["style"],
            DirectiveKind::SetDomainOrder => &["order"],
            DirectiveKind::UseCustomCell => &["name", "cell"],
            DirectiveKind::LocalEsdDomain => &["domain"],
        };
        for key in required {
            if !args.contains_key(*key) {
                return Err(PlanError::Directive {
                    message: format!("{:?} requires `{}=`", kind, key),
                });
            }
        }
        for key in args.keys() {
            if !required.contains(&key.as_str()) {
                return Err(PlanError::Directive {
                    message: format!("{:?} does not accept `{}`", kind, key),
                });
            }
        }
        if kind == DirectiveKind::SetRingStyle && RingStyle::parse(&args["style"]).is_none() {
            return Err(PlanError::Directive {
                message: format!("unknown ring style `{}`", args["style"]),
            });
        }
        Ok(Directive { kind, args })
    }
}

/// Parse one directive line: `KIND key=value (key=value)*`.
pub fn parse_directive(line: &str) -> Result<Directive, PlanError> {
    let mut tokens = line.split_whitespace();
    let kind_token = tokens.next().ok_or_else(|| PlanError::Directive {
        message: "empty directive".into(),
    })?;
    let kind = match kind_token {
        "SET_RING_STYLE" => DirectiveKind::SetRingStyle,
        "SET_DOMAIN_ORDER" => DirectiveKind::SetDomainOrder,
        "USE_CUSTOM_CELL" => DirectiveKind::UseCustomCell,
        "LOCAL_ESD_DOMAIN" => DirectiveKind::LocalEsdDomain,
        other => {
            return Err(PlanError::Directive {
                message: format!("unknown directive kind `{}`", other),
            })
        }
    };
    let mut args = BTreeMap::new();
    for token in tokens {
        let (key, value) = token.split_once('=').ok_or_else(|| PlanError::Directive {
            message: format!("malformed argument `{}` (expected key=value)", token),
        })?;
        if key.is_empty() || value.is_empty() {
            return Err(PlanError::Directive {
                message: format!("malformed argument `{}`", token),
            });
        }
        args.insert(key.to_string(), value.to_string());
    }
    Directive::new(kind, args)
}

/// Normalized pad plan: die outline, per-side ordered pins, directives.
#[derive(Debug, Clone, PartialEq)]
pub struct PadPlanSpec {
    pub die_w: Nm,
    pub die_h: Nm,
    pub sides: BTreeMap<Side, Vec<PinEntry>>,
    pub directives: Vec<Directive>,
    pub ring_style: RingStyle,
}

impl PadPlanSpec {
    pub fn pad_count(&self) -> usize {
        self.sides.values().map(|v| v.len()).sum()
    }

    pub fn side(&self, side: Side) -> &[PinEntry] {
        self.sides.get(&side).map(Vec::as_slice).unwrap_or(&[])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanFormat {
    Csv,
    Json,
}

/// Parse a decimal micrometer string into integer nanometers, exactly.
/// More than three fractional digits (i.e. sub-nanometer precision) is an
/// off-grid error.
pub fn um_str_to_nm(text: &str) -> Result<Nm, PlanError> {
    let off_grid = || PlanError::OffGrid {
        value: text.to_string(),
    };
    let s = text.trim();
    let (sign, digits) = match s.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1i64, s),
    };
    let (whole, frac) = match digits.split_once('.') {
        Some((w, f)) => (w, f),
        None => (digits, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return Err(off_grid());
    }
    if !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(off_grid());
    }
    if frac.len() > 3 && frac[3..].chars().any(|c| c != '0') {
        return Err(off_grid());
    }
    let whole_nm: i64 = if whole.is_empty() {
        0
    } else {
        whole.parse::<i64>().map_err(|_| off_grid())? * 1000
    };
    let mut frac3 = frac.chars().take(3).collect::<String>();
    while frac3.len() < 3 {
        frac3.push('0');
    }
    let frac_nm: i64 = frac3.parse().map_err(|_| off_grid())?;
    Ok(sign * (whole_nm + frac_nm))
}

/// Same conversion for a JSON number.
fn um_number_to_nm(n: f64, repr: &str) -> Result<Nm, PlanError> {
    let scaled = n * 1000.0;
    let nm = scaled.round();
    if (scaled - nm).abs() > 1e-6 || !nm.is_finite() {
        return Err(PlanError::OffGrid {
            value: repr.to_string(),
        });
    }
    Ok(nm as Nm)
}

fn legal_pad_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn check_pad_name(name: &str, line: usize) -> Result<(), PlanError> {
    if !legal_pad_name(name) {
        return Err(parse_err(line, format!("illegal pad name `{}`", name)));
    }
    for reserved in ["CORNER_", "BRK_", "FILL_"] {
        if name.starts_with(reserved) {
            return Err(parse_err(
                line,
                format!("pad name `{}` uses reserved prefix `{}`", name, reserved),
            ));
        }
    }
    Ok(())
}

/// Parse a pad plan in the declared format.
pub fn parse_pin_plan(text: &str, format: PlanFormat) -> Result<PadPlanSpec, PlanError> {
    match format {
        PlanFormat::Csv => parse_csv(text),
        PlanFormat::Json => parse_json(text),
    }
}

struct RawPin {
    entry: PinEntry,
    side: Side,
    order: i64,
    seq: usize,
}

fn assemble(
    die: Option<(Nm, Nm)>,
    mut pins: Vec<RawPin>,
    mut directives: Vec<Directive>,
    ring_style: Option<RingStyle>,
) -> Result<PadPlanSpec, PlanError> {
    let (die_w, die_h) = die.ok_or_else(|| parse_err(0, "missing die dimensions"))?;
    if die_w <= 0 || die_h <= 0 {
        return Err(parse_err(0, "die dimensions must be positive"));
    }
    if pins.is_empty() {
        return Err(parse_err(0, "plan contains no pads"));
    }
    let mut seen = std::collections::BTreeSet::new();
    for p in &pins {
        if !seen.insert(p.entry.name.clone()) {
            return Err(PlanError::DuplicatePin {
                name: p.entry.name.clone(),
            });
        }
    }
    // `order` is a per-side sort key with gaps allowed; ties keep file order.
    pins.sort_by_key(|p| (p.side, p.order, p.seq));
    let mut sides: BTreeMap<Side, Vec<PinEntry>> = BTreeMap::new();
    for side in [Side::N, Side::E, Side::S, Side::W] {
        sides.insert(side, Vec::new());
    }
    for p in pins {
        sides.get_mut(&p.side).unwrap().push(p.entry);
    }
    // A ring-style directive fixes the style when no explicit field set it.
    let mut style = ring_style.unwrap_or(RingStyle::SingleRow);
    for d in &directives {
        if d.kind == DirectiveKind::SetRingStyle {
            style = RingStyle::parse(&d.args["style"]).expect("validated by Directive::new");
        }
    }
    directives.dedup();
    Ok(PadPlanSpec {
        die_w,
        die_h,
        sides,
        directives,
        ring_style: style,
    })
}

fn parse_csv(text: &str) -> Result<PadPlanSpec, PlanError> {
    let mut die = None;
    let mut directives = Vec::new();

    // `#!` lines carry metadata and directives; plain `#` lines are comments
    // and are skipped by the CSV reader below.
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let Some(body) = line.trim_start().strip_prefix("#!") else {
            continue;
        };
        let body = body.trim();
        if let Some(rest) = body.strip_prefix("DIE_UM") {
            let mut w = None;
            let mut h = None;
            for token in rest.split_whitespace() {
                match token.split_once('=') {
                    Some(("w", v)) => w = Some(um_str_to_nm(v)?),
                    Some(("h", v)) => h = Some(um_str_to_nm(v)?),
                    _ => return Err(parse_err(lineno, format!("bad DIE_UM argument `{}`", token))),
                }
            }
            match (w, h) {
                (Some(w), Some(h)) => die = Some((w, h)),
                _ => return Err(parse_err(lineno, "DIE_UM needs w= and h=")),
            }
        } else {
            directives.push(parse_directive(body)?);
        }
    }

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| parse_err(csv_line(&e), format!("bad header: {}", e)))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (name_col, side_col, order_col) = match (col("name"), col("side"), col("order")) {
        (Some(n), Some(s), Some(o)) => (n, s, o),
        _ => return Err(parse_err(1, "header must include name,side,order")),
    };
    let device_col = col("device");
    let direction_col = col("direction");
    let domain_col = col("domain");
    let row_col = col("row");

    let mut pins = Vec::new();
    for (seq, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_err(csv_line(&e), e.to_string()))?;
        let lineno = record
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or(seq + 2);
        let field = |i: usize| record.get(i).unwrap_or("").to_string();
        let name = field(name_col);
        check_pad_name(&name, lineno)?;
        let side = Side::parse(&field(side_col))
            .ok_or_else(|| parse_err(lineno, format!("bad side `{}`", field(side_col))))?;
        let order: i64 = field(order_col)
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad order `{}`", field(order_col))))?;
        let opt = |c: Option<usize>| {
            c.map(&field).filter(|v| !v.is_empty())
        };
        let row = match opt(row_col) {
            Some(v) => Some(
                Row::parse(&v).ok_or_else(|| parse_err(lineno, format!("bad row `{}`", v)))?,
            ),
            None => None,
        };
        let direction = match opt(direction_col) {
            Some(v) => Some(
                Direction::parse(&v)
                    .ok_or_else(|| parse_err(lineno, format!("bad direction `{}`", v)))?,
            ),
            None => None,
        };
        pins.push(RawPin {
            entry: PinEntry {
                name,
                overrides: PinOverrides {
                    device_type: opt(device_col),
                    direction,
                    domain: opt(domain_col),
                    row,
                    connections: None,
                },
            },
            side,
            order,
            seq,
        });
    }
    assemble(die, pins, directives, None)
}

fn csv_line(e: &csv::Error) -> usize {
    e.position().map(|p| p.line() as usize).unwrap_or(0)
}

#[derive(Serialize, Deserialize)]
struct JsonPlan {
    die_um: JsonDie,
    pads: Vec<JsonPad>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    directives: Vec<Directive>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ring_style: Option<RingStyle>,
}

#[derive(Serialize, Deserialize)]
struct JsonDie {
    w: f64,
    h: f64,
}

#[derive(Serialize, Deserialize)]
struct JsonPad {
    name: String,
    side: String,
    order: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    device: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    direction: Option<Direction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    domain: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    row: Option<Row>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    connections: Option<BTreeMap<String, String>>,
}

fn parse_json(text: &str) -> Result<PadPlanSpec, PlanError> {
    let plan: JsonPlan = serde_json::from_str(text).map_err(|e| PlanError::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    let die_w = um_number_to_nm(plan.die_um.w, &plan.die_um.w.to_string())?;
    let die_h = um_number_to_nm(plan.die_um.h, &plan.die_um.h.to_string())?;
    let mut pins = Vec::new();
    for (seq, pad) in plan.pads.into_iter().enumerate() {
        check_pad_name(&pad.name, 0)?;
        let side = Side::parse(&pad.side)
            .ok_or_else(|| parse_err(0, format!("bad side `{}` for pad `{}`", pad.side, pad.name)))?;
        pins.push(RawPin {
            entry: PinEntry {
                name: pad.name,
                overrides: PinOverrides {
                    device_type: pad.device,
                    direction: pad.direction,
                    domain: pad.domain,
                    row: pad.row,
                    connections: pad.connections,
                },
            },
            side,
            order: pad.order,
            seq,
        });
    }
    assemble(Some((die_w, die_h)), pins, plan.directives, plan.ring_style)
}

impl PadPlanSpec {
    /// JSON encoding; `parse_pin_plan(spec.to_json(), Json)` returns an
    /// equal spec.
    pub fn to_json(&self) -> String {
        let mut pads = Vec::new();
        for side in [Side::N, Side::E, Side::S, Side::W] {
            for (i, entry) in self.side(side).iter().enumerate() {
                pads.push(JsonPad {
                    name: entry.name.clone(),
                    side: side.as_str().to_string(),
                    order: i as i64,
                    device: entry.overrides.device_type.clone(),
                    direction: entry.overrides.direction,
                    domain: entry.overrides.domain.clone(),
                    row: entry.overrides.row,
                    connections: entry.overrides.connections.clone(),
                });
            }
        }
        let plan = JsonPlan {
            die_um: JsonDie {
                w: self.die_w as f64 / 1000.0,
                h: self.die_h as f64 / 1000.0,
            },
            pads,
            directives: self.directives.clone(),
            ring_style: Some(self.ring_style),
        };
        let value = serde_json::to_value(&plan).expect("plan serializes");
        let mut out = serde_json::to_string_pretty(&value).expect("plan prints");
        out.push('\n');
        out
    }

    /// CSV encoding of the same plan (directives become `#!` lines).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "#! DIE_UM w={} h={}\n",
            crate::geom::nm_to_um_string(self.die_w),
            crate::geom::nm_to_um_string(self.die_h)
        ));
        if self.ring_style != RingStyle::SingleRow {
            out.push_str(&format!("#! SET_RING_STYLE style={}\n", self.ring_style.as_str()));
        }
        for d in &self.directives {
            if d.kind == DirectiveKind::SetRingStyle {
                continue; // already emitted above
            }
            let kind = match d.kind {
                DirectiveKind::SetRingStyle => "SET_RING_STYLE",
                DirectiveKind::SetDomainOrder => "SET_DOMAIN_ORDER",
                DirectiveKind::UseCustomCell => "USE_CUSTOM_CELL",
                DirectiveKind::LocalEsdDomain => "LOCAL_ESD_DOMAIN",
            };
            let args: Vec<String> = d.args.iter().map(|(k, v)| format!("{}={}", k, v)).collect();
            out.push_str(&format!("#! {} {}\n", kind, args.join(" ")));
        }
        out.push_str("name,side,order,device,direction,domain,row\n");
        for side in [Side::N, Side::E, Side::S, Side::W] {
            for (i, entry) in self.side(side).iter().enumerate() {
                let o = &entry.overrides;
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    entry.name,
                    side.as_str(),
                    i,
                    o.device_type.as_deref().unwrap_or(""),
                    o.direction.map(Direction::as_str).unwrap_or(""),
                    o.domain.as_deref().unwrap_or(""),
                    o.row.map(Row::as_str).unwrap_or(""),
                ));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo_csv(pads_per_side: usize) -> String {
        let mut text = String::from("#! DIE_UM w=1000 h=1000\nname,side,order\n");
        for (si, side) in ["S", "E", "N", "W"].iter().enumerate() {
            for i in 0..pads_per_side {
                text.push_str(&format!("P{}_{},{},{}\n", si, i, side, i));
            }
        }
        text
    }

    #[test]
    fn csv_with_12_pins_per_side_parses() {
        let spec = parse_pin_plan(&demo_csv(12), PlanFormat::Csv).unwrap();
        assert_eq!(spec.die_w, 1_000_000);
        assert_eq!(spec.die_h, 1_000_000);
        for side in [Side::N, Side::E, Side::S, Side::W] {
            assert_eq!(spec.side(side).len(), 12);
        }
        assert_eq!(spec.pad_count(), 48);
    }

    #[test]
    fn duplicate_pin_is_rejected_by_name() {
        let text = "#! DIE_UM w=500 h=500\nname,side,order\nVCM,S,0\nVCM,N,0\n";
        match parse_pin_plan(text, PlanFormat::Csv) {
            Err(PlanError::DuplicatePin { name }) => assert_eq!(name, "VCM"),
            other => panic!("expected duplicate error, got {:?}", other),
        }
    }

    #[test]
    fn ring_style_directive_sets_style() {
        let text = r#"{
            "die_um": {"w": 1000, "h": 1000},
            "pads": [{"name": "D0", "side": "S", "order": 0}],
            "directives": [{"kind": "set_ring_style", "args": {"style": "staggered"}}]
        }"#;
        let spec = parse_pin_plan(text, PlanFormat::Json).unwrap();
        assert_eq!(spec.ring_style, RingStyle::Staggered);
    }

    #[test]
    fn directive_grammar() {
        let d = parse_directive("USE_CUSTOM_CELL name=VINP cell=APAD_LOWCAP").unwrap();
        assert_eq!(d.kind, DirectiveKind::UseCustomCell);
        assert_eq!(d.args["name"], "VINP");
        assert_eq!(d.args["cell"], "APAD_LOWCAP");

        let d = parse_directive("LOCAL_ESD_DOMAIN domain=AVDD_SAR").unwrap();
        assert_eq!(d.kind, DirectiveKind::LocalEsdDomain);

        assert!(matches!(
            parse_directive("FROBNICATE x=1"),
            Err(PlanError::Directive { .. })
        ));
        assert!(matches!(
            parse_directive("USE_CUSTOM_CELL name=VINP"),
            Err(PlanError::Directive { .. })
        ));
    }

    #[test]
    fn um_conversion_is_exact_and_guards_subnm() {
        assert_eq!(um_str_to_nm("1000").unwrap(), 1_000_000);
        assert_eq!(um_str_to_nm("1000.5").unwrap(), 1_000_500);
        assert_eq!(um_str_to_nm("0.001").unwrap(), 1);
        assert_eq!(um_str_to_nm("1.2000").unwrap(), 1_200);
        assert!(matches!(
            um_str_to_nm("0.0001"),
            Err(PlanError::OffGrid { .. })
        ));
        assert!(matches!(um_str_to_nm("abc"), Err(PlanError::OffGrid { .. })));
    }

    #[test]
    fn json_round_trip_identity() {
        let text = demo_csv(4);
        let spec = parse_pin_plan(&text, PlanFormat::Csv).unwrap();
        let json = spec.to_json();
        let back = parse_pin_plan(&json, PlanFormat::Json).unwrap();
        assert_eq!(spec, back);
    }

    #[test]
    fn csv_and_json_encodings_parse_equal() {
        let mut spec = parse_pin_plan(&demo_csv(5), PlanFormat::Csv).unwrap();
        spec.directives
            .push(parse_directive("LOCAL_ESD_DOMAIN domain=AVDD_SAR").unwrap());
        spec.sides.get_mut(&Side::S).unwrap()[0].overrides.domain = Some("AVDD_SAR".into());
        let from_csv = parse_pin_plan(&spec.to_csv(), PlanFormat::Csv).unwrap();
        let from_json = parse_pin_plan(&spec.to_json(), PlanFormat::Json).unwrap();
        assert_eq!(from_csv, from_json);
    }

    #[test]
    fn reserved_prefixes_are_rejected() {
        let text = "#! DIE_UM w=500 h=500\nname,side,order\nCORNER_X,S,0\n";
        assert!(matches!(
            parse_pin_plan(text, PlanFormat::Csv),
            Err(PlanError::Parse { .. })
        ));
    }
}
