//! Exact Wasserstein-1 between discretized states, with the constraint
//! graph's shortest-path metric as ground cost.
//!
//! The dual `sup { Σ (μ-ν)ᵢ fᵢ : f 1-Lipschitz on the graph }` and the primal
//! min-cost transshipment on the graph edges share one optimum. The solver
//! runs successive shortest paths with node potentials directly on the
//! (uncapacitated, undirected) constraint graph: the final potentials are the
//! witness and a path decomposition of the optimal flow is the plan.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fmt::json_number;
use crate::grid::{circular_gap, Grid, Topology};
use crate::operators::ConstraintGraph;
use crate::states::StateMeasure;
use crate::{near_integer, MASS_TOL};

/// Flow amounts below this are treated as zero when decomposing into paths.
const FLOW_EPS: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distance {
    Finite(f64),
    Infinite,
}

impl Distance {
    pub fn finite(self) -> Option<f64> {
        match self {
            Distance::Finite(v) => Some(v),
            Distance::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Distance::Infinite)
    }

    /// `+∞` for [`Distance::Infinite`].
    pub fn as_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    pub fn to_json(self) -> Value {
        match self {
            Distance::Finite(v) => json_number(v),
            Distance::Infinite => Value::String("infinite".into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanEntry {
    pub source: usize,
    pub target: usize,
    pub mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentImbalance {
    pub component: usize,
    pub net_mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceResult {
    pub value: Distance,
    /// Optimal 1-Lipschitz potential, one value per node.
    pub witness: Option<Vec<f64>>,
    pub plan: Option<Vec<PlanEntry>>,
    /// Components whose net mass `Σ (μ-ν)` exceeds the balance tolerance.
    pub imbalances: Vec<ComponentImbalance>,
    pub cut_node: Option<usize>,
}

impl DistanceResult {
    pub fn to_json(&self, with_witness: bool, with_plan: bool) -> Value {
        let mut v = json!({ "value": self.value.to_json() });
        if with_witness {
            if let Some(w) = &self.witness {
                v["witness"] = Value::Array(w.iter().map(|&x| json_number(x)).collect());
            }
        }
        if with_plan {
            if let Some(plan) = &self.plan {
                v["plan"] = Value::Array(
                    plan.iter()
                        .map(|p| json!([p.source, p.target, json_number(p.mass)]))
                        .collect(),
                );
            }
        }
        if let Some(c) = self.cut_node {
            v["cut_node"] = json!(c);
        }
        v
    }

    /// `Σ mass · d(source, target)` under the given table.
    pub fn plan_cost(&self, table: &DistanceTable) -> Option<f64> {
        let plan = self.plan.as_ref()?;
        plan.iter().map(|p| table.get(p.source, p.target).map(|d| p.mass * d)).sum()
    }
}

/// Shortest-path distances from a set of source nodes; unreachable nodes are `+∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceTable {
    sources: Vec<usize>,
    rows: Vec<Vec<f64>>,
}

impl DistanceTable {
    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn row(&self, source: usize) -> Option<&[f64]> {
        let i = self.sources.iter().position(|&s| s == source)?;
        Some(&self.rows[i])
    }

    pub fn get(&self, source: usize, target: usize) -> Option<f64> {
        self.row(source).map(|r| r[target])
    }
}

#[derive(Clone, Copy)]
struct Queued {
    dist: f64,
    node: usize,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    // min-heap on distance, then node index for determinism
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.node.cmp(&self.node))
    }
}

fn dijkstra(g: &ConstraintGraph, source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.node_count()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Queued { dist: 0.0, node: source });
    while let Some(Queued { dist: d, node: u }) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, e) in g.neighbors(u) {
            let nd = d + g.edges()[e].length;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Queued { dist: nd, node: v });
            }
        }
    }
    dist
}

/// Shortest-path distances from each of `sources` to every node.
pub fn graph_metric(g: &ConstraintGraph, sources: &[usize]) -> DistanceTable {
    DistanceTable {
        sources: sources.to_vec(),
        rows: sources.iter().map(|&s| dijkstra(g, s)).collect(),
    }
}

fn check_states(g: &ConstraintGraph, mu: &StateMeasure, nu: &StateMeasure) -> Result<()> {
    if !mu.same_grid(nu) || mu.weights().len() != g.node_count() {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// Per-component net mass of `μ - ν`.
fn component_balance(g: &ConstraintGraph, supply: &[f64]) -> Vec<f64> {
    let mut net = vec![0.0; g.component_count()];
    for (u, &b) in supply.iter().enumerate() {
        net[g.component(u)] += b;
    }
    net
}

/// Exact spectral distance between `mu` and `nu` under the constraints of `g`.
///
/// Returns [`Distance::Infinite`] when some connected component carries net
/// mass beyond [`MASS_TOL`]: the indicator of that component has zero
/// seminorm and can be scaled without bound.
pub fn spectral_distance(
    g: &ConstraintGraph,
    mu: &StateMeasure,
    nu: &StateMeasure,
) -> Result<DistanceResult> {
    check_states(g, mu, nu)?;
    let supply: Vec<f64> = mu.weights().iter().zip(nu.weights()).map(|(a, b)| a - b).collect();
    let imbalances: Vec<ComponentImbalance> = component_balance(g, &supply)
        .into_iter()
        .enumerate()
        .filter(|&(_, net)| net.abs() > MASS_TOL)
        .map(|(component, net_mass)| ComponentImbalance { component, net_mass })
        .collect();
    if !imbalances.is_empty() {
        return Ok(DistanceResult {
            value: Distance::Infinite,
            witness: None,
            plan: None,
            imbalances,
            cut_node: None,
        });
    }

    let solution = FlowSolver::new(g, &supply).run()?;
    let cost: f64 =
        solution.flow.iter().zip(g.edges()).map(|(x, e)| x.abs() * e.length).sum();

    // f = -potential, shifted so each component's minimum is 0
    let mut floor = vec![f64::INFINITY; g.component_count()];
    for (u, p) in solution.potential.iter().enumerate() {
        let c = g.component(u);
        floor[c] = floor[c].min(-p);
    }
    let witness: Vec<f64> = solution
        .potential
        .iter()
        .enumerate()
        .map(|(u, p)| -p - floor[g.component(u)])
        .collect();

    let plan = decompose(g, &supply, &solution.flow);
    Ok(DistanceResult {
        value: Distance::Finite(cost),
        witness: Some(witness),
        plan: Some(plan),
        imbalances,
        cut_node: None,
    })
}

struct FlowSolution {
    /// Signed flow per edge, positive in the `u → v` direction.
    flow: Vec<f64>,
    potential: Vec<f64>,
}

struct FlowSolver<'g> {
    g: &'g ConstraintGraph,
    flow: Vec<f64>,
    excess: Vec<f64>,
    potential: Vec<f64>,
}

impl<'g> FlowSolver<'g> {
    fn new(g: &'g ConstraintGraph, supply: &[f64]) -> Self {
        FlowSolver {
            g,
            flow: vec![0.0; g.edges().len()],
            excess: supply.to_vec(),
            potential: vec![0.0; g.node_count()],
        }
    }

    /// Residual arc `u → v` over edge `e`: cancelling opposite flow costs
    /// `-length` up to the amount present, otherwise `+length` without limit.
    fn arc(&self, u: usize, e: usize) -> (f64, f64, f64) {
        let edge = self.g.edges()[e];
        let dir = if edge.u == u { 1.0 } else { -1.0 };
        let along = self.flow[e] * dir;
        if along < 0.0 {
            (dir, -edge.length, -along)
        } else {
            (dir, edge.length, f64::INFINITY)
        }
    }

    fn run(mut self) -> Result<FlowSolution> {
        let n = self.g.node_count();
        let limit = 100 * (n + self.g.edges().len()) + 10_000;
        let mut dist = vec![f64::INFINITY; n];
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut heap = BinaryHeap::new();

        for _ in 0..limit {
            dist.fill(f64::INFINITY);
            parent.fill(None);
            heap.clear();
            let mut any_sink = false;
            for u in 0..n {
                if self.excess[u] > 0.0 {
                    dist[u] = 0.0;
                    heap.push(Queued { dist: 0.0, node: u });
                } else if self.excess[u] < 0.0 {
                    any_sink = true;
                }
            }
            if heap.is_empty() || !any_sink {
                return Ok(self.finish());
            }

            while let Some(Queued { dist: d, node: u }) = heap.pop() {
                if d > dist[u] {
                    continue;
                }
                for &(v, e) in self.g.neighbors(u) {
                    let (_, cost, _) = self.arc(u, e);
                    let reduced = (cost + self.potential[u] - self.potential[v]).max(0.0);
                    let nd = d + reduced;
                    if nd < dist[v] {
                        dist[v] = nd;
                        parent[v] = Some((u, e));
                        heap.push(Queued { dist: nd, node: v });
                    }
                }
            }

            let sink = (0..n)
                .filter(|&v| self.excess[v] < 0.0 && dist[v].is_finite())
                .min_by(|&a, &b| dist[a].total_cmp(&dist[b]));
            let Some(sink) = sink else {
                return Ok(self.finish());
            };
            for v in 0..n {
                if dist[v].is_finite() {
                    self.potential[v] += dist[v];
                }
            }

            let mut path = Vec::new();
            let mut cur = sink;
            let mut amount = -self.excess[sink];
            while let Some((prev, e)) = parent[cur] {
                let (_, _, cap) = self.arc(prev, e);
                amount = amount.min(cap);
                path.push((prev, e));
                cur = prev;
            }
            let source = cur;
            amount = amount.min(self.excess[source]);

            for &(prev, e) in &path {
                let (dir, cost, cap) = self.arc(prev, e);
                if cost < 0.0 && amount == cap {
                    self.flow[e] = 0.0;
                } else {
                    self.flow[e] += dir * amount;
                }
            }
            if amount == self.excess[source] {
                self.excess[source] = 0.0;
            } else {
                self.excess[source] -= amount;
            }
            if amount == -self.excess[sink] {
                self.excess[sink] = 0.0;
            } else {
                self.excess[sink] += amount;
            }
        }
        Err(Error::SolverStalled(limit))
    }

    fn finish(self) -> FlowSolution {
        FlowSolution { flow: self.flow, potential: self.potential }
    }
}

/// Splits an acyclic optimal flow into source → sink paths, merged per pair.
fn decompose(g: &ConstraintGraph, supply: &[f64], flow: &[f64]) -> Vec<PlanEntry> {
    let n = g.node_count();
    let mut residual: Vec<f64> = flow.iter().map(|x| x.abs()).collect();
    let mut outgoing: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (e, edge) in g.edges().iter().enumerate() {
        if flow[e] > 0.0 {
            outgoing[edge.u].push((edge.v, e));
        } else if flow[e] < 0.0 {
            outgoing[edge.v].push((edge.u, e));
        }
    }
    let mut demand: Vec<f64> = supply.iter().map(|&b| (-b).max(0.0)).collect();
    let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();

    for source in 0..n {
        let mut left = supply[source].max(0.0);
        while left > FLOW_EPS {
            let mut path = Vec::new();
            let mut cur = source;
            let mut amount = left;
            let mut steps = 0;
            while demand[cur] <= FLOW_EPS && steps <= n {
                let Some(&(next, e)) = outgoing[cur].iter().find(|&&(_, e)| residual[e] > FLOW_EPS)
                else {
                    break;
                };
                amount = amount.min(residual[e]);
                path.push(e);
                cur = next;
                steps += 1;
            }
            if demand[cur] <= FLOW_EPS {
                break;
            }
            amount = amount.min(demand[cur]);
            for &e in &path {
                residual[e] -= amount;
            }
            demand[cur] -= amount;
            left -= amount;
            *merged.entry((source, cur)).or_insert(0.0) += amount;
        }
    }
    merged
        .into_iter()
        .map(|((source, target), mass)| PlanEntry { source, target, mass })
        .collect()
}

/// Edge lengths of `g` in path order, if `g` is the path `0 - 1 - … - (n-1)`.
pub fn path_edge_lengths(g: &ConstraintGraph) -> Result<Vec<f64>> {
    let n = g.node_count();
    if g.edges().len() + 1 != n {
        return Err(Error::NotAPathGraph);
    }
    let mut lengths = vec![f64::NAN; n - 1];
    for e in g.edges() {
        let (lo, hi) = (e.u.min(e.v), e.u.max(e.v));
        if hi != lo + 1 {
            return Err(Error::NotAPathGraph);
        }
        lengths[lo] = e.length;
    }
    Ok(lengths)
}

/// `Σᵢ lenᵢ |CDF_μ(i) - CDF_ν(i)|` on a path whose i-th edge joins nodes i and i+1.
pub fn line_w1_cdf(edge_lengths: &[f64], mu: &StateMeasure, nu: &StateMeasure) -> Result<f64> {
    if !mu.same_grid(nu) {
        return Err(Error::GridMismatch);
    }
    if edge_lengths.len() + 1 != mu.weights().len() {
        return Err(Error::NotAPathGraph);
    }
    let mut cdf = 0.0;
    let mut total = 0.0;
    for (i, len) in edge_lengths.iter().enumerate() {
        cdf += mu.weights()[i] - nu.weights()[i];
        total += len * cdf.abs();
    }
    Ok(total)
}

/// W₁ on a circle grid as the best cut-open line problem.
///
/// Cutting at node `c` removes the edge `(c-1, c)` and solves the path
/// `c, c+1, …, c-1`. Among minimizing cuts (relative tolerance 1e-12) the one
/// closest to the circular mean of `mu` is reported, then the lowest index.
pub fn circle_w1_cut(grid: &Grid, mu: &StateMeasure, nu: &StateMeasure) -> Result<(f64, usize)> {
    if grid.topology() != Topology::Circle {
        return Err(Error::NotCircle);
    }
    if !mu.same_grid(nu) || *mu.grid().as_ref() != *grid {
        return Err(Error::GridMismatch);
    }
    let n = grid.len();
    let spacing = grid.spacing().expect("circle spacing");
    let mut prefix = Vec::with_capacity(n);
    let mut acc = 0.0;
    for (a, b) in mu.weights().iter().zip(nu.weights()) {
        acc += a - b;
        prefix.push(acc);
    }
    let total = prefix[n - 1];

    let values: Vec<f64> = (0..n)
        .map(|c| {
            let before = if c == 0 { 0.0 } else { prefix[c - 1] };
            let mut sum = 0.0;
            // path edges in order: c..n-2, then the wrap edge n-1 -> 0, then 0..c-2
            for j in c..n {
                if c == 0 && j == n - 1 {
                    break;
                }
                sum += (prefix[j] - before).abs();
            }
            if c > 0 {
                for j in 0..c - 1 {
                    sum += (total - before + prefix[j]).abs();
                }
            }
            spacing * sum
        })
        .collect();

    let best = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let tol = 1e-12 * best.max(f64::MIN_POSITIVE);
    let tied: Vec<usize> = (0..n).filter(|&c| values[c] <= best + tol).collect();

    let (mut cx, mut cy) = (0.0, 0.0);
    for (w, &x) in mu.weights().iter().zip(grid.nodes()) {
        cx += w * x.cos();
        cy += w * x.sin();
    }
    let cut = if cx.hypot(cy) > 1e-12 && tied.len() > 1 {
        let mean = cy.atan2(cx);
        let gap = |c: usize| circular_gap(grid.nodes()[c], mean);
        let closest = tied.iter().map(|&c| gap(c)).fold(f64::INFINITY, f64::min);
        *tied.iter().find(|&&c| gap(c) <= closest + 1e-12).expect("non-empty tie set")
    } else {
        tied[0]
    };
    Ok((values[cut], cut))
}

/// Largest quanta count accepted by [`brute_force_w1`].
pub const BRUTE_FORCE_MAX_QUANTA: usize = 8;

/// Exhaustive W₁ for states whose weights are multiples of `1/quanta`: the
/// minimum over all matchings of the unit masses of `mu` to those of `nu`.
pub fn brute_force_w1(
    cost: &[Vec<f64>],
    mu: &StateMeasure,
    nu: &StateMeasure,
    quanta: usize,
) -> Result<f64> {
    if quanta == 0 || quanta > BRUTE_FORCE_MAX_QUANTA {
        return Err(Error::TooLarge { got: quanta, max: BRUTE_FORCE_MAX_QUANTA });
    }
    let n = mu.weights().len();
    if !mu.same_grid(nu) {
        return Err(Error::GridMismatch);
    }
    if cost.len() != n || cost.iter().any(|row| row.len() != n) {
        return Err(Error::SampleLengthMismatch { expected: n, got: cost.len() });
    }
    let atoms = |s: &StateMeasure| -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(quanta);
        for (i, &w) in s.weights().iter().enumerate() {
            let k = near_integer(w * quanta as f64).ok_or(Error::NotQuantized(quanta))?;
            out.extend(std::iter::repeat_n(i, k.max(0) as usize));
        }
        if out.len() != quanta {
            return Err(Error::NotQuantized(quanta));
        }
        Ok(out)
    };
    let from = atoms(mu)?;
    let mut to = atoms(nu)?;

    let matching_cost =
        |to: &[usize]| -> f64 { from.iter().zip(to).map(|(&a, &b)| cost[a][b]).sum() };
    let mut best = matching_cost(&to);
    // Heap's algorithm over all orderings of the target atoms
    let mut counters = vec![0usize; quanta];
    let mut i = 0;
    while i < quanta {
        if counters[i] < i {
            if i % 2 == 0 {
                to.swap(0, i);
            } else {
                to.swap(counters[i], i);
            }
            best = best.min(matching_cost(&to));
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    Ok(best / quanta as f64)
}
