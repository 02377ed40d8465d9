// SPDX-License-Identifier: Apache-2.0
//! Geometry resolution: exact integer-nm placement of every ring cell.
//!
//! Corners pin the four die corners; each side's outer row is placed
//! edge-to-edge from the counter-clockwise start corner; the residual gap
//! is closed by a filler run at the side end. Staggered rings place
//! inner-row pads one row inward, centered on the junction of their two
//! outer neighbors.
//!
//! Orientation convention: south R0, east R90, north R180, west R270;
//! corners SW=R0, SE=R90, NE=R180, NW=R270.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::geom::{transform_bbox, Nm, Orient, Rect, Side};
use crate::intent::IntentGraph;
use crate::kb::{CellKind, CellMaster, KnowledgeBase};
use crate::padplan::{RingStyle, Row};

#[derive(Debug, Error)]
pub enum ResolveError {
    #[error("ring overflow on side {side}: cells exceed the side by {excess} nm")]
    RingOverflow { side: char, excess: Nm },
    #[error("unfillable gap of {gap} nm{}", side.map(|s| format!(" on side {}", s)).unwrap_or_default())]
    UnfillableGap { gap: Nm, side: Option<char> },
    #[error("stagger conflict: {0}")]
    StaggerConflict(String),
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct PlacedInstance {
    /// Node id for graph-backed cells, `f<side><k>` for fillers.
    pub id: String,
    pub name: String,
    pub master: String,
    pub kind: CellKind,
    pub side: Side,
    pub row: Row,
    pub domain: String,
    pub origin: (Nm, Nm),
    pub orient: Orient,
}

impl PlacedInstance {
    pub fn bbox(&self, kb: &KnowledgeBase) -> Rect {
        let master = kb.cell(&self.master).expect("instance master exists");
        transform_bbox(master.width_nm, master.height_nm, self.origin, self.orient)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutDb {
    pub die_w: Nm,
    pub die_h: Nm,
    pub ring_style: RingStyle,
    pub instances: Vec<PlacedInstance>,
}

impl LayoutDb {
    pub fn instance(&self, id: &str) -> Option<&PlacedInstance> {
        self.instances.iter().find(|i| i.id == id)
    }

    pub fn fillers(&self) -> impl Iterator<Item = &PlacedInstance> {
        self.instances.iter().filter(|i| i.kind == CellKind::Filler)
    }

    /// Along-side coordinate of an instance origin: x on S/N, y on E/W.
    pub fn along(&self, inst: &PlacedInstance) -> Nm {
        match inst.side {
            Side::S | Side::N => inst.origin.0,
            Side::E | Side::W => inst.origin.1,
        }
    }

    /// Key that sorts instances on one side in counter-clockwise traversal
    /// order: coordinates ascend on S and E, descend on N and W.
    pub fn ccw_key(&self, inst: &PlacedInstance) -> Nm {
        match inst.side {
            Side::S | Side::E => self.along(inst),
            Side::N | Side::W => -self.along(inst),
        }
    }

    /// All instances of one ring row, in full counter-clockwise ring order
    /// starting at the south-west corner.
    pub fn ring_sequence(&self, row: Row) -> Vec<&PlacedInstance> {
        let mut seq: Vec<&PlacedInstance> =
            self.instances.iter().filter(|i| i.row == row).collect();
        seq.sort_by_key(|i| {
            let side_rank = match i.side {
                Side::S => 0,
                Side::E => 1,
                Side::N => 2,
                Side::W => 3,
            };
            (side_rank, i.kind == CellKind::Corner, self.ccw_key(i))
        });
        // Within a side the corner comes first: it sits at the CCW start.
        let mut ordered: Vec<&PlacedInstance> = Vec::with_capacity(seq.len());
        for side in Side::RING_ORDER {
            let (corners, cells): (Vec<&PlacedInstance>, Vec<&PlacedInstance>) = seq
                .iter()
                .filter(|i| i.side == side)
                .partition(|i| i.kind == CellKind::Corner);
            ordered.extend(corners);
            ordered.extend(cells);
        }
        ordered
    }
}

/// Exact filler decomposition of one gap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FillerPlan {
    pub gap: Nm,
    pub pieces: Vec<Nm>,
}

/// Decompose `gap` into filler widths, exactly. Among exact solutions the
/// plan has minimal piece count, and among those it is the
/// lexicographically largest-first sequence. Greedy largest-first covers
/// the canonical width systems; a bounded exact search takes over when
/// greedy misses the sum or the optimum.
pub fn solve_fillers(gap: Nm, widths: &[Nm]) -> Result<FillerPlan, ResolveError> {
    assert!(gap >= 0, "gap must be non-negative");
    assert!(!widths.is_empty() && widths.iter().all(|&w| w > 0));
    let mut sorted: Vec<Nm> = widths.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    sorted.dedup();

    if gap == 0 {
        return Ok(FillerPlan { gap, pieces: vec![] });
    }

    // Greedy largest-first.
    let mut greedy = Vec::new();
    let mut rest = gap;
    for &w in &sorted {
        while rest >= w {
            rest -= w;
            greedy.push(w);
        }
    }
    let greedy = if rest == 0 { Some(greedy) } else { None };

    // Exact minimal-count table over the reachable sums. The state space is
    // bounded by gap / gcd(widths).
    let g = sorted.iter().fold(0i64, |acc, &w| gcd(acc, w));
    if gap % g != 0 {
        return Err(ResolveError::UnfillableGap { gap, side: None });
    }
    let units = (gap / g) as usize;
    let unit_widths: Vec<usize> = sorted.iter().map(|&w| (w / g) as usize).collect();
    const UNREACHED: u32 = u32::MAX;
    let mut count = vec![UNREACHED; units + 1];
    count[0] = 0;
    for s in 1..=units {
        for &w in &unit_widths {
            if w <= s && count[s - w] != UNREACHED {
                let c = count[s - w] + 1;
                if c < count[s] {
                    count[s] = c;
                }
            }
        }
    }
    if count[units] == UNREACHED {
        return Err(ResolveError::UnfillableGap { gap, side: None });
    }
    let optimum = count[units] as usize;

    if let Some(pieces) = greedy {
        if pieces.len() == optimum {
            return Ok(FillerPlan { gap, pieces });
        }
    }

    // Reconstruct the lexicographically largest-first optimal sequence:
    // at each step take the widest piece that still admits an optimal
    // completion.
    let mut pieces = Vec::with_capacity(optimum);
    let mut rest = units;
    while rest > 0 {
        for (&w, &nm_w) in unit_widths.iter().zip(&sorted) {
            if w <= rest && count[rest - w] != UNREACHED && count[rest - w] + 1 == count[rest] {
                pieces.push(nm_w);
                rest -= w;
                break;
            }
        }
    }
    Ok(FillerPlan { gap, pieces })
}

fn gcd(a: i64, b: i64) -> i64 {
    if a == 0 {
        b
    } else {
        gcd(b % a, a)
    }
}

struct SideFrame {
    orient: Orient,
    /// Along-side start (after the opening corner) and end (before the
    /// closing corner).
    start: Nm,
    end: Nm,
}

/// Resolve an intent graph into exact placements.
pub fn resolve_geometry(graph: &IntentGraph, kb: &KnowledgeBase) -> Result<LayoutDb, ResolveError> {
    let die_w = graph.die_w;
    let die_h = graph.die_h;
    let grid = kb.rules.grid;
    let corner = kb.corner();

    let frame = |side: Side| -> SideFrame {
        let (orient, start_proj, end_proj, len) = match side {
            Side::S => (Orient::R0, corner.width_nm, corner.width_nm, die_w),
            Side::E => (Orient::R90, corner.height_nm, corner.height_nm, die_h),
            Side::N => (Orient::R180, corner.width_nm, corner.width_nm, die_w),
            Side::W => (Orient::R270, corner.height_nm, corner.height_nm, die_h),
        };
        SideFrame {
            orient,
            start: start_proj,
            end: len - end_proj,
        }
    };

    // Die-coordinate origin for a cell on `side` at along-side offset
    // `along`, `inward` nm in from the die edge. `ext` is the along-side
    // extent, `dep` the inward extent of the oriented cell.
    let origin_for = |side: Side, along: Nm, inward: Nm, ext: Nm, dep: Nm| -> (Nm, Nm) {
        match side {
            Side::S => (along, inward),
            Side::E => (die_w - inward - dep, along),
            Side::N => (die_w - along - ext, die_h - inward - dep),
            Side::W => (inward, die_h - along - ext),
        }
    };

    let corner_orients = BTreeMap::from([
        (Side::S, Orient::R0),   // SW
        (Side::E, Orient::R90),  // SE
        (Side::N, Orient::R180), // NE
        (Side::W, Orient::R270), // NW
    ]);
    let corner_origins = BTreeMap::from([
        (Side::S, (0, 0)),
        (Side::E, (die_w - corner.width_nm, 0)),
        (Side::N, (die_w - corner.width_nm, die_h - corner.height_nm)),
        (Side::W, (0, die_h - corner.height_nm)),
    ]);

    let mut instances: Vec<PlacedInstance> = Vec::with_capacity(graph.nodes.len() + 16);

    for side in Side::RING_ORDER {
        let f = frame(side);
        let nodes: Vec<&crate::intent::IntentNode> =
            graph.nodes.iter().filter(|n| n.side == side).collect();

        // Whole-side capacity check up front, so the reported excess is the
        // total overshoot rather than the first offending cell's.
        let occupied: Nm = nodes
            .iter()
            .filter(|n| {
                n.row == Row::Outer && master_of(n, kb).kind != CellKind::Corner
            })
            .map(|n| master_of(n, kb).width_nm)
            .sum();
        if f.start + occupied > f.end {
            return Err(ResolveError::RingOverflow {
                side: side.as_str().chars().next().unwrap(),
                excess: f.start + occupied - f.end,
            });
        }

        // Outer row first: edge-to-edge from the CCW start corner.
        let mut cursor = f.start;
        let mut outer_spans: Vec<(usize, Nm, Nm)> = Vec::new(); // (ring idx, from, to)
        let mut last_outer_domain = String::new();
        for (ni, node) in nodes.iter().enumerate() {
            let master = master_of(node, kb);
            if master.kind == CellKind::Corner {
                instances.push(PlacedInstance {
                    id: node.id.clone(),
                    name: node.name.clone(),
                    master: master.name.clone(),
                    kind: CellKind::Corner,
                    side,
                    row: Row::Outer,
                    domain: node.domain.clone(),
                    origin: corner_origins[&side],
                    orient: corner_orients[&side],
                });
                last_outer_domain = node.domain.clone();
                continue;
            }
            if node.row == Row::Inner {
                continue; // second pass
            }
            let ext = along_extent(master, f.orient);
            let dep = inward_extent(master, f.orient);
            if cursor + ext > f.end {
                return Err(ResolveError::RingOverflow {
                    side: side.as_str().chars().next().unwrap(),
                    excess: cursor + ext - f.end,
                });
            }
            let origin = origin_for(side, cursor, 0, ext, dep);
            instances.push(PlacedInstance {
                id: node.id.clone(),
                name: node.name.clone(),
                master: master.name.clone(),
                kind: master.kind,
                side,
                row: Row::Outer,
                domain: node.domain.clone(),
                origin,
                orient: f.orient,
            });
            outer_spans.push((ni, cursor, cursor + ext));
            last_outer_domain = node.domain.clone();
            cursor += ext;
        }

        // Close the residual outer-row gap with a filler run at the CCW end
        // of the side.
        let gap = f.end - cursor;
        let filler_domain = if last_outer_domain.is_empty() {
            kb.domains.first().map(|d| d.name.clone()).unwrap_or_default()
        } else {
            last_outer_domain
        };
        let fillers = kb.fillers_for(&filler_domain);
        let widths: Vec<Nm> = fillers.iter().map(|c| c.width_nm).collect();
        let plan = solve_fillers(gap, &widths).map_err(|e| match e {
            ResolveError::UnfillableGap { gap, .. } => ResolveError::UnfillableGap {
                gap,
                side: Some(side.as_str().chars().next().unwrap()),
            },
            other => other,
        })?;
        for (k, piece) in plan.pieces.iter().enumerate() {
            let master = fillers
                .iter()
                .find(|c| c.width_nm == *piece)
                .expect("plan uses available widths");
            let ext = along_extent(master, f.orient);
            let dep = inward_extent(master, f.orient);
            let origin = origin_for(side, cursor, 0, ext, dep);
            instances.push(PlacedInstance {
                id: format!("f{}{:02}", side.as_str(), k),
                name: format!("FILL_{}_{}", side.as_str(), k),
                master: master.name.clone(),
                kind: CellKind::Filler,
                side,
                row: Row::Outer,
                domain: filler_domain.clone(),
                origin,
                orient: f.orient,
            });
            cursor += ext;
        }

        // Inner row: each inner pad straddles the junction of its outer
        // neighbors, offset inward by the stagger row offset.
        let inner_nodes: Vec<(usize, &crate::intent::IntentNode)> = nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.row == Row::Inner && master_of(n, kb).kind != CellKind::Corner)
            .map(|(i, n)| (i, *n))
            .collect();
        if !inner_nodes.is_empty() {
            let offset = kb.rules.stagger_row_offset;
            let min_ov = kb.rules.stagger_min_overlap;
            for (ni, node) in inner_nodes {
                let master = master_of(node, kb);
                let ext = along_extent(master, f.orient);
                let dep = inward_extent(master, f.orient);
                let prev = outer_spans.iter().rev().find(|(i, _, _)| *i < ni);
                let next = outer_spans.iter().find(|(i, _, _)| *i > ni);
                let (prev, next) = match (prev, next) {
                    (Some(p), Some(nx)) => (p, nx),
                    _ => {
                        return Err(ResolveError::StaggerConflict(format!(
                            "inner pad `{}` has no outer neighbor on both sides",
                            node.name
                        )))
                    }
                };
                if prev.2 != next.1 {
                    return Err(ResolveError::StaggerConflict(format!(
                        "inner pad `{}` sits between non-adjacent outer pads",
                        node.name
                    )));
                }
                let junction = prev.2;
                let along = snap_down(junction - ext / 2, grid);
                let ov_prev = prev.2 - along;
                let ov_next = along + ext - next.1;
                if ov_prev < min_ov || ov_next < min_ov {
                    return Err(ResolveError::StaggerConflict(format!(
                        "inner pad `{}` overlaps outer neighbors by {} / {} nm, below {}",
                        node.name, ov_prev, ov_next, min_ov
                    )));
                }
                let origin = origin_for(side, along, offset, ext, dep);
                instances.push(PlacedInstance {
                    id: node.id.clone(),
                    name: node.name.clone(),
                    master: master.name.clone(),
                    kind: master.kind,
                    side,
                    row: Row::Inner,
                    domain: node.domain.clone(),
                    origin,
                    orient: f.orient,
                });
            }
        }
    }

    // Keep each (side, row) run sorted by along-side coordinate.
    instances.sort_by_key(|i| {
        let along = match i.side {
            Side::S | Side::N => i.origin.0,
            Side::E | Side::W => i.origin.1,
        };
        (i.side, i.row, along, i.id.clone())
    });
    Ok(LayoutDb {
        die_w,
        die_h,
        ring_style: graph.ring_style,
        instances,
    })
}

fn master_of<'k>(node: &crate::intent::IntentNode, kb: &'k KnowledgeBase) -> &'k CellMaster {
    kb.cell(&node.device_type)
        .expect("resolve_geometry requires a validated graph")
}

// After side rotation the cell's width always runs along the side and its
// height points inward, on every side.
fn along_extent(master: &CellMaster, _orient: Orient) -> Nm {
    master.width_nm
}

fn inward_extent(master: &CellMaster, _orient: Orient) -> Nm {
    master.height_nm
}

fn snap_down(v: Nm, grid: Nm) -> Nm {
    v - v.rem_euclid(grid)
}
