//! Deformed momentum operators and their compiled constraint graphs.
//!
//! For every operator that compiles, the seminorm `‖[D, f]‖` is a supremum of
//! weighted finite differences, so `‖[D, f]‖ ≤ 1` is exactly the set of
//! functions satisfying `|f(u) - f(v)| ≤ length(u, v)` on the edges of a
//! [`ConstraintGraph`].

use std::collections::HashSet;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{Grid, SignSet, Topology};
use crate::near_integer;
use crate::sampled::SampledFn;

const UNIT_NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorSpec {
    /// `-i d/dx`.
    Standard,
    /// `[x, p] = i G(x)`; the induced metric is `g = G⁻²`.
    NonFlat { g: SampledFn },
    /// `-i (U_h - 1) / h`.
    HDeriv { h: f64 },
    /// `-i D_q` with `D_q f(x) = (f(x) - f(qx)) / ((1 - q) x)`.
    QDeriv { q: f64 },
    /// `|ψ₀⟩⟨ψ₀|`, with `ψ₀` sampled on the grid nodes.
    RankOneProjector { psi: Vec<f64> },
}

impl OperatorSpec {
    pub fn name(&self) -> &'static str {
        match self {
            OperatorSpec::Standard => "standard",
            OperatorSpec::NonFlat { .. } => "nonflat",
            OperatorSpec::HDeriv { .. } => "hderiv",
            OperatorSpec::QDeriv { .. } => "qderiv",
            OperatorSpec::RankOneProjector { .. } => "rank1",
        }
    }

    /// Operator norm when the operator is bounded and it is known in closed form.
    pub fn operator_norm(&self) -> Option<f64> {
        match self {
            OperatorSpec::HDeriv { h } => Some(2.0 / h),
            OperatorSpec::RankOneProjector { .. } => Some(1.0),
            _ => None,
        }
    }

    /// Builds a rank-one projector after checking `Σ ψ₀(xᵢ)² Δ = 1`.
    pub fn rank_one(grid: &Grid, psi: Vec<f64>) -> Result<OperatorSpec> {
        check_unit(grid, &psi)?;
        Ok(OperatorSpec::RankOneProjector { psi })
    }
}

fn check_unit(grid: &Grid, psi: &[f64]) -> Result<f64> {
    let spacing = grid.spacing().ok_or(Error::UnsupportedTopology("qlattice"))?;
    if psi.len() != grid.len() {
        return Err(Error::SampleLengthMismatch { expected: grid.len(), got: psi.len() });
    }
    let norm2: f64 = psi.iter().map(|p| p * p * spacing).sum();
    if (norm2.sqrt() - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::InvalidOperator(format!("ψ₀ has norm {}, expected 1", norm2.sqrt())));
    }
    Ok(spacing)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub length: f64,
}

/// Undirected graph of pairwise bounds `|f(u) - f(v)| ≤ length`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintGraph {
    node_count: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, usize)>>,
    component: Vec<usize>,
    component_count: usize,
}

impl ConstraintGraph {
    pub fn new(node_count: usize, edges: Vec<Edge>) -> Result<ConstraintGraph> {
        let mut seen = HashSet::with_capacity(edges.len());
        let mut adjacency = vec![Vec::new(); node_count];
        for (id, e) in edges.iter().enumerate() {
            if e.u >= node_count || e.v >= node_count {
                return Err(Error::InvalidGraph(format!("edge {id} has an endpoint out of range")));
            }
            if e.u == e.v {
                return Err(Error::InvalidGraph(format!("self-loop at node {}", e.u)));
            }
            if !(e.length > 0.0) || !e.length.is_finite() {
                return Err(Error::InvalidGraph(format!("edge {id} has length {}", e.length)));
            }
            if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({}, {})", e.u, e.v)));
            }
            adjacency[e.u].push((e.v, id));
            adjacency[e.v].push((e.u, id));
        }

        let mut component = vec![usize::MAX; node_count];
        let mut component_count = 0;
        let mut stack = Vec::new();
        for start in 0..node_count {
            if component[start] != usize::MAX {
                continue;
            }
            component[start] = component_count;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for &(v, _) in &adjacency[u] {
                    if component[v] == usize::MAX {
                        component[v] = component_count;
                        stack.push(v);
                    }
                }
            }
            component_count += 1;
        }

        Ok(ConstraintGraph { node_count, edges, adjacency, component, component_count })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// `(neighbor, edge index)` pairs incident to `u`.
    pub fn neighbors(&self, u: usize) -> &[(usize, usize)] {
        &self.adjacency[u]
    }

    pub fn component(&self, u: usize) -> usize {
        self.component[u]
    }

    pub fn components(&self) -> &[usize] {
        &self.component
    }

    pub fn component_count(&self) -> usize {
        self.component_count
    }

    /// Same graph with every length multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<ConstraintGraph> {
        let edges = self.edges.iter().map(|e| Edge { length: e.length * factor, ..*e }).collect();
        ConstraintGraph::new(self.node_count, edges)
    }

    /// Same graph plus `extra` edges.
    pub fn with_edges(&self, extra: &[Edge]) -> Result<ConstraintGraph> {
        let mut edges = self.edges.clone();
        edges.extend_from_slice(extra);
        ConstraintGraph::new(self.node_count, edges)
    }

    /// `max |f(u) - f(v)| / length` over edges; 0 for an edgeless graph.
    pub fn lipschitz_ratio(&self, f: &[f64]) -> Result<f64> {
        if f.len() != self.node_count {
            return Err(Error::SampleLengthMismatch { expected: self.node_count, got: f.len() });
        }
        Ok(self
            .edges
            .iter()
            .map(|e| (f[e.u] - f[e.v]).abs() / e.length)
            .fold(0.0, f64::max))
    }

    /// `max (|f(u) - f(v)| - length)` over edges, clamped at 0.
    pub fn lipschitz_excess(&self, f: &[f64]) -> f64 {
        self.edges
            .iter()
            .map(|e| (f[e.u] - f[e.v]).abs() - e.length)
            .fold(0.0, f64::max)
    }
}

/// Compiles `{f : ‖[D, f]‖ ≤ 1}` on `grid` into pairwise bounds.
pub fn compile(spec: &OperatorSpec, grid: &Grid) -> Result<ConstraintGraph> {
    let n = grid.len();
    let nodes = grid.nodes();
    let incompatible = |reason: &str| Error::IncompatibleGridOperator {
        op: spec.name(),
        reason: reason.to_string(),
    };
    let edges: Vec<Edge> = match spec {
        OperatorSpec::Standard => match grid.topology() {
            Topology::Line | Topology::Circle => {
                let spacing = grid.spacing().expect("uniform grid");
                let mut edges: Vec<Edge> =
                    (0..n - 1).map(|i| Edge { u: i, v: i + 1, length: spacing }).collect();
                if grid.topology() == Topology::Circle {
                    edges.push(Edge { u: n - 1, v: 0, length: spacing });
                }
                edges
            }
            Topology::QLattice => (0..n - 1)
                .map(|i| Edge { u: i, v: i + 1, length: nodes[i + 1] - nodes[i] })
                .collect(),
        },
        OperatorSpec::NonFlat { g } => {
            if grid.topology() != Topology::Line {
                return Err(incompatible("non-flat metric needs a line grid"));
            }
            g.check_positive()?;
            let (a, b) = grid.window().expect("line window");
            if !g.contains(a) || !g.contains(b) {
                return Err(incompatible("G samples do not cover the window"));
            }
            (0..n - 1)
                .map(|i| Edge { u: i, v: i + 1, length: g.simpson_reciprocal(nodes[i], nodes[i + 1]) })
                .collect()
        }
        OperatorSpec::HDeriv { h } => {
            if grid.topology() != Topology::Line {
                return Err(incompatible("h-derivative needs a line grid"));
            }
            if !(*h > 0.0) {
                return Err(Error::InvalidOperator(format!("h must be positive, got {h}")));
            }
            let spacing = grid.spacing().expect("uniform grid");
            let step = match near_integer(h / spacing) {
                Some(k) if k >= 1 => k as usize,
                _ => return Err(incompatible("h is not a multiple of the grid spacing")),
            };
            (0..n.saturating_sub(step)).map(|i| Edge { u: i, v: i + step, length: *h }).collect()
        }
        OperatorSpec::QDeriv { q } => {
            let (anchor, grid_q, depth, signs) =
                grid.q_params().ok_or_else(|| incompatible("q-derivative needs a q-lattice"))?;
            if !(*q > 0.0 && *q < 1.0) {
                return Err(Error::BadRatio(*q));
            }
            if (q - grid_q).abs() > 1e-12 {
                return Err(incompatible("lattice ratio differs from q"));
            }
            q_edges(anchor, *q, depth, signs)
        }
        OperatorSpec::RankOneProjector { .. } => return Err(Error::NotCompilable(spec.name())),
    };
    ConstraintGraph::new(n, edges)
}

/// Chain edges `(x₀qᵏ, x₀qᵏ⁺¹)` of length `√q (1-q) |x₀qᵏ|` for each orbit, closed
/// to node 0 by the summed tail `√q |x_min|`.
fn q_edges(anchor: f64, q: f64, depth: usize, signs: SignSet) -> Vec<Edge> {
    let root_q = q.sqrt();
    let zero = match signs {
        SignSet::PositiveOnly => 0,
        SignSet::Both => depth + 1,
    };
    let positive = |k: usize| zero + 1 + depth - k;
    let negative = |k: usize| k;
    let mut orbits: Vec<&dyn Fn(usize) -> usize> = vec![&positive];
    if signs == SignSet::Both {
        orbits.push(&negative);
    }
    let mut edges = Vec::new();
    for index in orbits {
        for k in 0..depth {
            let x = anchor * q.powi(k as i32);
            edges.push(Edge { u: index(k), v: index(k + 1), length: root_q * (1.0 - q) * x });
        }
        let innermost = anchor * q.powi(depth as i32);
        edges.push(Edge { u: index(depth), v: zero, length: root_q * innermost });
    }
    edges
}

/// Evaluates `‖[D, f]‖` for samples `f` on the grid nodes.
pub fn seminorm(spec: &OperatorSpec, grid: &Grid, f: &[f64]) -> Result<f64> {
    if f.len() != grid.len() {
        return Err(Error::SampleLengthMismatch { expected: grid.len(), got: f.len() });
    }
    match spec {
        OperatorSpec::RankOneProjector { psi } => {
            let spacing = check_unit(grid, psi)?;
            // ⟨fψ, fψ⟩ - ⟨ψ, fψ⟩²
            let mut second = 0.0;
            let mut first = 0.0;
            for (p, v) in psi.iter().zip(f) {
                let w = p * p * spacing;
                first += w * v;
                second += w * v * v;
            }
            Ok((second - first * first).max(0.0).sqrt())
        }
        _ => compile(spec, grid)?.lipschitz_ratio(f),
    }
}

/// `f_{n,x}(t) = n exp(-√(1 + (t-x)²) / n) sin²(π(x-t)/h)`: smooth, vanishing at
/// infinity, and h-periodic up to the slowly varying envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HPeriodicWitness {
    pub n: f64,
    pub x: f64,
    pub h: f64,
}

pub fn witness_hperiodic(n: u32, x: f64, h: f64) -> HPeriodicWitness {
    HPeriodicWitness { n: n.max(1) as f64, x, h }
}

impl HPeriodicWitness {
    pub fn eval(&self, t: f64) -> f64 {
        let envelope = (-(1.0 + (t - self.x).powi(2)).sqrt() / self.n).exp();
        let s = (PI * (self.x - t) / self.h).sin();
        self.n * envelope * s * s
    }

    pub fn sample(&self, grid: &Grid) -> Vec<f64> {
        grid.nodes().iter().map(|&t| self.eval(t)).collect()
    }
}
