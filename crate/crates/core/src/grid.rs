//! Finite samples of the line, the circle and the geometric q-lattice.

use std::f64::consts::TAU;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fmt::{json_number, sig17};
use crate::{near_integer, COORD_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Line,
    Circle,
    QLattice,
}

impl Topology {
    pub fn name(self) -> &'static str {
        match self {
            Topology::Line => "line",
            Topology::Circle => "circle",
            Topology::QLattice => "qlattice",
        }
    }
}

/// Which orbits a q-lattice carries: the positive one only, or both mirrored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignSet {
    PositiveOnly,
    Both,
}

#[derive(Debug, Clone, PartialEq)]
enum Layout {
    Line { a: f64, b: f64, spacing: f64 },
    Circle { spacing: f64 },
    QLattice { anchor: f64, q: f64, depth: usize, signs: SignSet },
}

/// An ordered finite sample space. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    layout: Layout,
    nodes: Vec<f64>,
}

impl Grid {
    /// Closed line grid `a, a+Δ, …, b`.
    pub fn line(a: f64, b: f64, spacing: f64) -> Result<Grid> {
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::NonPositiveSpacing(spacing));
        }
        if !a.is_finite() || !b.is_finite() || b <= a {
            return Err(Error::InvalidGrid(format!("degenerate window [{a}, {b}]")));
        }
        let steps = match near_integer((b - a) / spacing) {
            Some(k) if k >= 1 => k as usize,
            _ => return Err(Error::NonCommensurateWindow { a, b, spacing }),
        };
        let mut nodes: Vec<f64> = (0..=steps).map(|i| a + i as f64 * spacing).collect();
        nodes[steps] = b;
        Ok(Grid { layout: Layout::Line { a, b, spacing }, nodes })
    }

    /// `node_count` equally spaced nodes `2πk/N` on the circle.
    pub fn circle(node_count: usize) -> Result<Grid> {
        if node_count < 3 {
            return Err(Error::TooFewNodes(node_count));
        }
        let spacing = TAU / node_count as f64;
        let nodes = (0..node_count).map(|k| k as f64 * spacing).collect();
        Ok(Grid { layout: Layout::Circle { spacing }, nodes })
    }

    /// `{0} ∪ {x₀qᵏ : 0 ≤ k ≤ depth}`, mirrored to negatives for [`SignSet::Both`].
    pub fn q_lattice(anchor: f64, q: f64, depth: usize, signs: SignSet) -> Result<Grid> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::BadRatio(q));
        }
        if !(anchor > 0.0) || !anchor.is_finite() {
            return Err(Error::InvalidGrid(format!("anchor must be positive, got {anchor}")));
        }
        if depth < 1 {
            return Err(Error::InvalidGrid("depth must be at least 1".into()));
        }
        let orbit: Vec<f64> = (0..=depth).map(|k| anchor * q.powi(k as i32)).collect();
        let mut nodes = Vec::with_capacity(2 * orbit.len() + 1);
        if signs == SignSet::Both {
            nodes.extend(orbit.iter().map(|x| -x));
        }
        nodes.push(0.0);
        nodes.extend(orbit.iter().rev());
        Ok(Grid { layout: Layout::QLattice { anchor, q, depth, signs }, nodes })
    }

    pub fn into_shared(self) -> Arc<Grid> {
        Arc::new(self)
    }

    pub fn topology(&self) -> Topology {
        match self.layout {
            Layout::Line { .. } => Topology::Line,
            Layout::Circle { .. } => Topology::Circle,
            Layout::QLattice { .. } => Topology::QLattice,
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Uniform spacing Δ; `None` for q-lattices.
    pub fn spacing(&self) -> Option<f64> {
        match self.layout {
            Layout::Line { spacing, .. } | Layout::Circle { spacing } => Some(spacing),
            Layout::QLattice { .. } => None,
        }
    }

    /// Closed window `[a, b]` of a line grid.
    pub fn window(&self) -> Option<(f64, f64)> {
        match self.layout {
            Layout::Line { a, b, .. } => Some((a, b)),
            _ => None,
        }
    }

    /// `(anchor, q, depth, signs)` of a q-lattice.
    pub fn q_params(&self) -> Option<(f64, f64, usize, SignSet)> {
        match self.layout {
            Layout::QLattice { anchor, q, depth, signs } => Some((anchor, q, depth, signs)),
            _ => None,
        }
    }

    /// Index of the node nearest to `x`; ties go to the lower index.
    pub fn nearest_node(&self, x: f64) -> Result<usize> {
        match self.layout {
            Layout::Line { a, b, spacing } => {
                if !(x >= a - COORD_TOL && x <= b + COORD_TOL) {
                    return Err(Error::OutsideWindow { x, a, b });
                }
                let t = ((x - a) / spacing).max(0.0);
                let lo = (t.floor() as usize).min(self.len() - 1);
                Ok(self.closer(lo, lo + 1, |n| (n - x).abs()))
            }
            Layout::Circle { spacing } => {
                let n = self.len();
                let x = x.rem_euclid(TAU);
                let lo = ((x / spacing).floor() as usize).min(n - 1);
                let hi = (lo + 1) % n;
                let dist = |node: f64| circular_gap(node, x);
                let (first, second) = if hi < lo { (hi, lo) } else { (lo, hi) };
                let d1 = dist(self.nodes[first]);
                let d2 = dist(self.nodes[second]);
                Ok(if d2 < d1 { second } else { first })
            }
            Layout::QLattice { .. } => {
                let idx = self.nodes.partition_point(|&n| n < x);
                let lo = idx.saturating_sub(1);
                Ok(self.closer(lo, idx, |n| (n - x).abs()))
            }
        }
    }

    fn closer(&self, lo: usize, hi: usize, dist: impl Fn(f64) -> f64) -> usize {
        if hi >= self.len() {
            return lo.min(self.len() - 1);
        }
        if dist(self.nodes[hi]) < dist(self.nodes[lo]) {
            hi
        } else {
            lo
        }
    }

    /// Canonical textual identity, also used as the `grid_id` in JSON.
    pub fn id(&self) -> String {
        match self.layout {
            Layout::Line { a, b, spacing } => {
                format!("line:{}:{}:{}", sig17(a), sig17(b), sig17(spacing))
            }
            Layout::Circle { .. } => format!("circle:{}", self.len()),
            Layout::QLattice { anchor, q, depth, signs } => format!(
                "qlattice:{}:{}:{}:{}",
                sig17(anchor),
                sig17(q),
                depth,
                match signs {
                    SignSet::PositiveOnly => "positive",
                    SignSet::Both => "both",
                }
            ),
        }
    }

    pub fn to_json(&self) -> Value {
        let nodes: Vec<Value> = self.nodes.iter().map(|&x| json_number(x)).collect();
        let mut v = json!({ "topology": self.topology().name(), "nodes": nodes });
        if let Some(spacing) = self.spacing() {
            v["spacing"] = json_number(spacing);
        }
        v
    }
}

/// Shortest arc length between two angles.
pub(crate) fn circular_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}
