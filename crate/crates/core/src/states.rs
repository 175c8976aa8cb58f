//! Discretized states: probability weight vectors over the nodes of a grid.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fmt::json_number;
use crate::grid::{Grid, Topology};
use crate::{near_integer, COORD_TOL};

const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct StateMeasure {
    grid: Arc<Grid>,
    weights: Vec<f64>,
}

impl StateMeasure {
    /// Wraps an explicit weight vector. Weights must be non-negative and sum to 1.
    pub fn from_weights(grid: &Arc<Grid>, weights: Vec<f64>) -> Result<StateMeasure> {
        if weights.len() != grid.len() {
            return Err(Error::SampleLengthMismatch { expected: grid.len(), got: weights.len() });
        }
        if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidDensity("weights must be finite and non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidDensity(format!("weights sum to {total}, not 1")));
        }
        Ok(StateMeasure { grid: Arc::clone(grid), weights })
    }

    /// Pure state at `x`, snapped to the nearest node.
    pub fn point(grid: &Arc<Grid>, x: f64) -> Result<StateMeasure> {
        let i = grid.nearest_node(x)?;
        let mut weights = vec![0.0; grid.len()];
        weights[i] = 1.0;
        Ok(StateMeasure { grid: Arc::clone(grid), weights })
    }

    /// Uniform distribution on `[center - halfwidth, center + halfwidth]`,
    /// discretized by the overlap of each node's cell with the support.
    pub fn rect(grid: &Arc<Grid>, center: f64, halfwidth: f64) -> Result<StateMeasure> {
        let profile = Profile::new(halfwidth, vec![1.0, 1.0])?;
        StateMeasure::from_profile(grid, center, &profile)
    }

    /// Density `ψ(t - center)` given by equally spaced samples on
    /// `[-halfwidth, halfwidth]`, integrated cell by cell with the trapezoid rule.
    pub fn density(
        grid: &Arc<Grid>,
        center: f64,
        halfwidth: f64,
        samples: &[f64],
    ) -> Result<StateMeasure> {
        if samples.len() < 2 {
            return Err(Error::InvalidDensity("need at least two density samples".into()));
        }
        if samples.iter().any(|&s| !(s >= 0.0) || !s.is_finite()) {
            return Err(Error::InvalidDensity("density samples must be non-negative".into()));
        }
        let peak = samples.iter().cloned().fold(0.0, f64::max);
        if peak == 0.0 {
            return Err(Error::ZeroDensity);
        }
        let scaled = samples.iter().map(|&s| s / peak).collect();
        let profile = Profile::new(halfwidth, scaled)?;
        StateMeasure::from_profile(grid, center, &profile)
    }

    fn from_profile(grid: &Arc<Grid>, center: f64, profile: &Profile) -> Result<StateMeasure> {
        let hw = profile.halfwidth;
        let spacing = match grid.topology() {
            Topology::QLattice => return Err(Error::UnsupportedTopology("qlattice")),
            _ => grid.spacing().expect("uniform grid"),
        };
        if hw < 0.5 * spacing - COORD_TOL {
            return Err(Error::SupportBelowResolution { halfwidth: hw, spacing });
        }
        let half_cell = 0.5 * spacing;
        let weights: Vec<f64> = match grid.topology() {
            Topology::Line => {
                let (a, b) = grid.window().expect("line window");
                let (lo, hi) = (center - hw, center + hw);
                if lo < a - COORD_TOL || hi > b + COORD_TOL {
                    return Err(Error::SupportOutsideWindow { lo, hi });
                }
                grid.nodes()
                    .iter()
                    .map(|&x| profile.integrate(x - center - half_cell, x - center + half_cell))
                    .collect()
            }
            Topology::Circle => {
                if hw >= PI {
                    return Err(Error::SupportTooWide(hw));
                }
                grid.nodes()
                    .iter()
                    .map(|&x| {
                        let mut s = (x - center).rem_euclid(TAU);
                        if s > PI {
                            s -= TAU;
                        }
                        let mut w = profile.integrate(s - half_cell, s + half_cell);
                        // a cell straddling the antipode also sees the support's other image
                        if s + half_cell > PI {
                            w += profile.integrate(s - TAU - half_cell, s - TAU + half_cell);
                        }
                        if s - half_cell < -PI {
                            w += profile.integrate(s + TAU - half_cell, s + TAU + half_cell);
                        }
                        w
                    })
                    .collect()
            }
            Topology::QLattice => unreachable!(),
        };
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::ZeroDensity);
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Ok(StateMeasure { grid: Arc::clone(grid), weights })
    }

    /// Shifts the state by a whole number of grid steps (cyclically on the circle).
    pub fn translate(&self, shift: f64) -> Result<StateMeasure> {
        let spacing = self.grid.spacing().ok_or(Error::UnsupportedTopology("qlattice"))?;
        let k = near_integer(shift / spacing)
            .ok_or(Error::NonLatticeShift { shift, spacing })?;
        let n = self.weights.len() as i64;
        let mut out = vec![0.0; self.weights.len()];
        for (i, &w) in self.weights.iter().enumerate() {
            let j = i as i64 + k;
            match self.grid.topology() {
                Topology::Circle => out[j.rem_euclid(n) as usize] = w,
                _ if (0..n).contains(&j) => out[j as usize] = w,
                _ if w != 0.0 => return Err(Error::ShiftLeavesWindow),
                _ => {}
            }
        }
        Ok(StateMeasure { grid: Arc::clone(&self.grid), weights: out })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn same_grid(&self, other: &StateMeasure) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    /// `Σ wᵢ f(xᵢ)` for samples `f` on the grid nodes.
    pub fn expectation(&self, f: &[f64]) -> Result<f64> {
        if f.len() != self.weights.len() {
            return Err(Error::SampleLengthMismatch { expected: self.weights.len(), got: f.len() });
        }
        Ok(self.weights.iter().zip(f).map(|(w, v)| w * v).sum())
    }

    pub fn to_json(&self) -> Value {
        let weights: Vec<Value> = self.weights.iter().map(|&w| json_number(w)).collect();
        json!({ "grid_id": self.grid.id(), "weights": weights })
    }
}

/// Piecewise-linear density on `[-halfwidth, halfwidth]` with equally spaced knots.
struct Profile {
    halfwidth: f64,
    samples: Vec<f64>,
    step: f64,
}

impl Profile {
    fn new(halfwidth: f64, samples: Vec<f64>) -> Result<Profile> {
        if !(halfwidth > 0.0) || !halfwidth.is_finite() {
            return Err(Error::InvalidDensity(format!("halfwidth must be positive, got {halfwidth}")));
        }
        let step = 2.0 * halfwidth / (samples.len() - 1) as f64;
        Ok(Profile { halfwidth, samples, step })
    }

    fn knot(&self, k: usize) -> f64 {
        if k == self.samples.len() - 1 {
            self.halfwidth
        } else {
            -self.halfwidth + k as f64 * self.step
        }
    }

    fn value(&self, s: f64) -> f64 {
        let last = self.samples.len() - 1;
        let k = (((s + self.halfwidth) / self.step).floor().max(0.0) as usize).min(last - 1);
        let (y0, y1) = (self.samples[k], self.samples[k + 1]);
        if y0 == y1 {
            return y0;
        }
        let t = (s - self.knot(k)) / self.step;
        y0 + (y1 - y0) * t
    }

    /// Exact integral of the interpolant over `[lo, hi] ∩ support`.
    fn integrate(&self, lo: f64, hi: f64) -> f64 {
        let lo = lo.max(-self.halfwidth);
        let hi = hi.min(self.halfwidth);
        if hi <= lo {
            return 0.0;
        }
        let last = self.samples.len() - 1;
        let k0 = (((lo + self.halfwidth) / self.step).floor().max(0.0) as usize).min(last - 1);
        let k1 = (((hi + self.halfwidth) / self.step).ceil() as usize).clamp(k0 + 1, last);
        let run = &self.samples[k0..=k1];
        if run.iter().all(|&y| y == run[0]) {
            return run[0] * (hi - lo);
        }
        let (mut x, mut y) = (lo, self.value(lo));
        let mut acc = 0.0;
        for k in k0 + 1..k1 {
            let t = self.knot(k);
            if t > lo && t < hi {
                acc += 0.5 * (t - x) * (y + self.samples[k]);
                x = t;
                y = self.samples[k];
            }
        }
        acc + 0.5 * (hi - x) * (y + self.value(hi))
    }
}
