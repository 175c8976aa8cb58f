//! Closed-form distances and bounds for the operators in scope.
//!
//! Conventions differ between the line and the circle: [`fat_distance`] takes
//! the full width `ε` of the rectangle `[x - ε/2, x + ε/2]`, while
//! [`circle_rect_distance`] takes the halfwidth `ε` of `[x - ε, x + ε]`.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::sampled::SampledFn;
use crate::transport::Distance;
use crate::{near_integer, COORD_TOL};

/// A lower/upper bound pair, with the exact value when it is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound {
    pub lower: f64,
    /// May be `+∞`.
    pub upper: f64,
    pub exact: Option<f64>,
}

impl Bound {
    pub fn contains(&self, v: f64, tol: f64) -> bool {
        v >= self.lower - tol && v <= self.upper + tol
    }
}

/// `∫ₓʸ √g` with `g = G⁻²`, by Simpson's rule. Consecutive sample panels of
/// equal width are merged so their shared sample serves as the midpoint;
/// leftover panels interpolate `G` at their midpoint.
pub fn geodesic_distance(g: &SampledFn, x: f64, y: f64) -> Result<f64> {
    g.check_positive()?;
    for t in [x, y] {
        if !g.contains(t) {
            let (lo, hi) = g.range();
            return Err(Error::OutOfRange { x: t, lo, hi });
        }
    }
    let (lo, hi) = (x.min(y), x.max(y));
    if hi - lo <= 0.0 {
        return Ok(0.0);
    }
    let mut breaks = vec![lo];
    breaks.extend(g.xs().iter().copied().filter(|&s| s > lo && s < hi));
    breaks.push(hi);
    let mut total = 0.0;
    let mut i = 0;
    while i + 1 < breaks.len() {
        if i + 2 < breaks.len() {
            let (a, m, b) = (breaks[i], breaks[i + 1], breaks[i + 2]);
            if (m - 0.5 * (a + b)).abs() <= 1e-12 * (b - a) {
                total += g.simpson_reciprocal(a, b);
                i += 2;
                continue;
            }
        }
        total += g.simpson_reciprocal(breaks[i], breaks[i + 1]);
        i += 1;
    }
    Ok(total)
}

/// Points under the h-derivative: `|x - y|` on a common h-orbit, infinite otherwise.
pub fn h_distance(h: f64, x: f64, y: f64) -> Distance {
    match near_integer((x - y) / h) {
        Some(_) => Distance::Finite((x - y).abs()),
        None => Distance::Infinite,
    }
}

/// Rectangular states of full width `eps` under the h-derivative.
pub fn fat_distance(h: f64, eps: f64, x: f64, y: f64) -> Distance {
    match near_integer(eps / h) {
        Some(k) if k >= 1 => Distance::Finite((x - y).abs()),
        _ => h_distance(h, x, y),
    }
}

/// `d_sncf(x, y) = |x| + |y|` for `x ≠ y`, 0 otherwise.
pub fn french_railway(x: f64, y: f64) -> f64 {
    if (x - y).abs() <= COORD_TOL {
        0.0
    } else {
        x.abs() + y.abs()
    }
}

/// `√q |x - y| ≤ d ≤ √q d_sncf(x, y)`, exact on a common `q^ℤ` orbit.
pub fn q_bounds(q: f64, x: f64, y: f64) -> Result<Bound> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::BadRatio(q));
    }
    let root_q = q.sqrt();
    let lower = root_q * (x - y).abs();
    let upper = root_q * french_railway(x, y);
    let exact = if (x - y).abs() <= COORD_TOL {
        Some(0.0)
    } else if same_orbit(q, x, y) || (upper - lower).abs() <= 1e-12 * upper {
        Some(lower)
    } else {
        None
    };
    Ok(Bound { lower, upper, exact })
}

fn same_orbit(q: f64, x: f64, y: f64) -> bool {
    if x == 0.0 || y == 0.0 || x.signum() != y.signum() {
        return false;
    }
    near_integer((y / x).ln() / q.ln()).is_some()
}

/// Distance between rectangular states of halfwidth `eps` centred at 0 and `x`
/// on the unit circle.
pub fn circle_rect_distance(eps: f64, x: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < PI / 2.0) {
        return Err(Error::OutOfDomain(format!("eps = {eps} not in (0, pi/2)")));
    }
    if !(x > 0.0 && x <= PI + COORD_TOL) {
        return Err(Error::OutOfDomain(format!("x = {x} not in (0, pi]")));
    }
    let knee = PI - 2.0 * eps;
    if x <= knee {
        Ok(x)
    } else {
        Ok((-x * x + 2.0 * PI * x - knee * knee) / (4.0 * eps))
    }
}

/// Where the circle is cut for the curved branch, `(x - π)/2` reduced to `[0, 2π)`.
pub fn cut_point(eps: f64, x: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < PI / 2.0) {
        return Err(Error::OutOfDomain(format!("eps = {eps} not in (0, pi/2)")));
    }
    if !(x >= PI - 2.0 * eps - COORD_TOL && x <= PI + COORD_TOL) {
        return Err(Error::OutOfDomain(format!("x = {x} outside [pi - 2 eps, pi]")));
    }
    let c = (0.5 * (x - PI)).rem_euclid(TAU);
    Ok(if c >= TAU - COORD_TOL { 0.0 } else { c })
}

/// Lower bound `Λ⁻¹` on distances between distinct points for a bounded operator of norm `Λ > 0`.
pub fn min_length_bound(operator_norm: f64) -> f64 {
    1.0 / operator_norm
}
