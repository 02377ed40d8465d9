// SPDX-License-Identifier: Apache-2.0
//! Integer-nanometer geometry primitives.
//!
//! All coordinates in the pipeline are integer nanometers with the die
//! south-west corner at (0, 0). Keeping geometry integral means abutment
//! and closure checks are exact equalities, never tolerance comparisons.

use serde::{Deserialize, Serialize};

/// Length or coordinate in nanometers.
pub type Nm = i64;

/// Axis-aligned rectangle, min corner inclusive, max corner exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Rect {
    pub x0: Nm,
    pub y0: Nm,
    pub x1: Nm,
    pub y1: Nm,
}

impl Rect {
    pub fn new(x0: Nm, y0: Nm, x1: Nm, y1: Nm) -> Self {
        Rect { x0, y0, x1, y1 }
    }

    pub fn width(&self) -> Nm {
        self.x1 - self.x0
    }

    pub fn height(&self) -> Nm {
        self.y1 - self.y0
    }

    /// Intersection area; zero when the rectangles only touch.
    pub fn overlap_area(&self, other: &Rect) -> i128 {
        let w = (self.x1.min(other.x1) - self.x0.max(other.x0)).max(0) as i128;
        let h = (self.y1.min(other.y1) - self.y0.max(other.y0)).max(0) as i128;
        w * h
    }

    /// True when the rectangles share a boundary segment of positive length
    /// (edge contact) without overlapping in area.
    pub fn abuts(&self, other: &Rect) -> bool {
        if self.overlap_area(other) != 0 {
            return false;
        }
        let x_overlap = self.x1.min(other.x1) - self.x0.max(other.x0);
        let y_overlap = self.y1.min(other.y1) - self.y0.max(other.y0);
        (x_overlap == 0 && y_overlap > 0) || (y_overlap == 0 && x_overlap > 0)
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        self.x0 <= other.x0 && self.y0 <= other.y0 && self.x1 >= other.x1 && self.y1 >= other.y1
    }
}

/// Placement orientation: counter-clockwise rotation in 90-degree steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orient {
    R0,
    R90,
    R180,
    R270,
}

impl Orient {
    pub fn compose(self, other: Orient) -> Orient {
        let q = (self.quarter_turns() + other.quarter_turns()) % 4;
        match q {
            0 => Orient::R0,
            1 => Orient::R90,
            2 => Orient::R180,
            _ => Orient::R270,
        }
    }

    fn quarter_turns(self) -> u8 {
        match self {
            Orient::R0 => 0,
            Orient::R90 => 1,
            Orient::R180 => 2,
            Orient::R270 => 3,
        }
    }

    /// Whether this orientation swaps cell width and height.
    pub fn swaps_axes(self) -> bool {
        matches!(self, Orient::R90 | Orient::R270)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Orient::R0 => "R0",
            Orient::R90 => "R90",
            Orient::R180 => "R180",
            Orient::R270 => "R270",
        }
    }

    pub fn parse(s: &str) -> Option<Orient> {
        match s {
            "R0" => Some(Orient::R0),
            "R90" => Some(Orient::R90),
            "R180" => Some(Orient::R180),
            "R270" => Some(Orient::R270),
            _ => None,
        }
    }
}

/// Ring sides, named by compass direction of the die edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    N,
    E,
    S,
    W,
}

impl Side {
    /// Counter-clockwise ring traversal order starting at the south side.
    pub const RING_ORDER: [Side; 4] = [Side::S, Side::E, Side::N, Side::W];

    pub fn as_str(self) -> &'static str {
        match self {
            Side::N => "N",
            Side::E => "E",
            Side::S => "S",
            Side::W => "W",
        }
    }

    pub fn parse(s: &str) -> Option<Side> {
        match s {
            "N" => Some(Side::N),
            "E" => Some(Side::E),
            "S" => Some(Side::S),
            "W" => Some(Side::W),
            _ => None,
        }
    }
}

/// Bounding box of a `w`×`h` cell placed at `origin` with orientation
/// `orient`. Rotation is about the cell origin with post-normalization so
/// the bbox min corner equals the stored origin; orientation therefore only
/// swaps the cell's extents.
pub fn transform_bbox(w: Nm, h: Nm, origin: (Nm, Nm), orient: Orient) -> Rect {
    let (bw, bh) = if orient.swaps_axes() { (h, w) } else { (w, h) };
    Rect::new(origin.0, origin.1, origin.0 + bw, origin.1 + bh)
}

/// Format a nanometer quantity as micrometers with exactly three decimals.
/// Exact by construction: 1 um = 1000 nm.
pub fn nm_to_um_string(nm: Nm) -> String {
    let neg = nm < 0;
    let abs = nm.unsigned_abs();
    let whole = abs / 1000;
    let frac = abs % 1000;
    if neg {
        format!("-{}.{:03}", whole, frac)
    } else {
        format!("{}.{:03}", whole, frac)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent oracle: rotate the four corners about the cell origin with
    // an explicit rotation matrix, take the bbox, then translate so the bbox
    // min corner lands on the placement origin.
    fn bbox_by_matrix(w: Nm, h: Nm, origin: (Nm, Nm), orient: Orient) -> Rect {
        let (c, s): (i64, i64) = match orient {
            Orient::R0 => (1, 0),
            Orient::R90 => (0, 1),
            Orient::R180 => (-1, 0),
            Orient::R270 => (0, -1),
        };
        let corners = [(0, 0), (w, 0), (0, h), (w, h)];
        let rotated: Vec<(i64, i64)> = corners
            .iter()
            .map(|&(x, y)| (c * x - s * y, s * x + c * y))
            .collect();
        let min_x = rotated.iter().map(|p| p.0).min().unwrap();
        let min_y = rotated.iter().map(|p| p.1).min().unwrap();
        let max_x = rotated.iter().map(|p| p.0).max().unwrap();
        let max_y = rotated.iter().map(|p| p.1).max().unwrap();
        Rect::new(
            origin.0,
            origin.1,
            origin.0 + (max_x - min_x),
            origin.1 + (max_y - min_y),
        )
    }

    #[test]
    fn bbox_r0_is_identity() {
        let r = transform_bbox(60_000, 120_000, (0, 0), Orient::R0);
        assert_eq!(r, Rect::new(0, 0, 60_000, 120_000));
    }

    #[test]
    fn bbox_r90_swaps_extents() {
        // Raw rotation of a 60000x120000 cell about its origin spans
        // [-120000,0]x[0,60000]; normalization moves the min corner back to
        // the placement origin.
        let r = transform_bbox(60_000, 120_000, (0, 0), Orient::R90);
        assert_eq!(r, Rect::new(0, 0, 120_000, 60_000));
        assert_eq!(r, bbox_by_matrix(60_000, 120_000, (0, 0), Orient::R90));
    }

    #[test]
    fn bbox_matches_matrix_oracle_all_orients() {
        for orient in [Orient::R0, Orient::R90, Orient::R180, Orient::R270] {
            let got = transform_bbox(60_000, 120_000, (7_000, 13_000), orient);
            let want = bbox_by_matrix(60_000, 120_000, (7_000, 13_000), orient);
            assert_eq!(got, want, "orient {:?}", orient);
        }
    }

    #[test]
    fn r180_twice_is_r0() {
        assert_eq!(Orient::R180.compose(Orient::R180), Orient::R0);
        assert_eq!(Orient::R90.compose(Orient::R270), Orient::R0);
    }

    #[test]
    fn abutment_is_edge_contact_only() {
        let a = Rect::new(0, 0, 10, 10);
        let b = Rect::new(10, 0, 20, 10);
        let c = Rect::new(10, 10, 20, 20); // corner contact only
        let d = Rect::new(9, 0, 19, 10); // overlaps a
        assert!(a.abuts(&b));
        assert!(!a.abuts(&c));
        assert!(!a.abuts(&d));
        assert_eq!(a.overlap_area(&d), 10);
    }

    #[test]
    fn um_formatting_is_exact() {
        assert_eq!(nm_to_um_string(1_000_000), "1000.000");
        assert_eq!(nm_to_um_string(120_000), "120.000");
        assert_eq!(nm_to_um_string(1_234_567), "1234.567");
        assert_eq!(nm_to_um_string(-500), "-0.500");
        assert_eq!(nm_to_um_string(0), "0.000");
    }
}
