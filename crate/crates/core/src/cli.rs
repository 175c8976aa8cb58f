//! Command-line front end: single computations, parameter sweeps and
//! solver-versus-closed-form validation reports.
//!
//! Spec strings:
//!
//! | kind     | forms                                                                 |
//! |----------|-----------------------------------------------------------------------|
//! | grid     | `line:a:b:step`, `circle:N`, `qlattice:anchor:q:depth[:both\|positive]` |
//! | operator | `standard`, `nonflat:G.csv`, `hderiv:h`, `qderiv:q`, `rank1:psi.csv`   |
//! | state    | `point:x`, `rect:center:halfwidth`, `density:center:halfwidth:f.csv`   |
//!
//! Numbers accept `pi` multiples such as `pi/4`, `3pi/4` or `-2pi`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::closed_form;
use crate::error::{Error, Result};
use crate::fmt::{json_number, sig17};
use crate::grid::{Grid, SignSet, Topology};
use crate::operators::{compile, OperatorSpec};
use crate::sampled::SampledFn;
use crate::states::StateMeasure;
use crate::transport::{circle_w1_cut, spectral_distance, Distance, DistanceResult};

/// Environment variable capping sweep parallelism.
pub const THREADS_ENV: &str = "CCRM_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Compute,
    Sweep,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::Parse(format!("unknown output format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// Separation: the second state's center is the first's plus the value.
    X,
    /// Halfwidth of both extended states.
    Eps,
    H,
    Q,
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" => Ok(SweepParam::X),
            "eps" => Ok(SweepParam::Eps),
            "h" => Ok(SweepParam::H),
            "q" => Ok(SweepParam::Q),
            other => Err(Error::Parse(format!("unknown sweep axis `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        let slack = 1e-9 * self.stop.abs().max(1.0);
        (0..)
            .map(|k| self.start + k as f64 * self.step)
            .take_while(|&v| v <= self.stop + slack)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub op: String,
    pub grid: String,
    pub states: Vec<String>,
    pub sweep: Option<SweepAxis>,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    pub scenario: Option<String>,
    pub with_witness: bool,
    pub with_plan: bool,
}

impl RunConfig {
    pub fn compute(op: &str, grid: &str, a: &str, b: &str) -> RunConfig {
        RunConfig {
            command: Command::Compute,
            op: op.into(),
            grid: grid.into(),
            states: vec![a.into(), b.into()],
            sweep: None,
            format: OutputFormat::Json,
            output: None,
            scenario: None,
            with_witness: false,
            with_plan: false,
        }
    }

    pub fn sweep(op: &str, grid: &str, a: &str, b: &str, axis: SweepAxis) -> RunConfig {
        RunConfig {
            command: Command::Sweep,
            sweep: Some(axis),
            format: OutputFormat::Csv,
            ..RunConfig::compute(op, grid, a, b)
        }
    }

    pub fn validate(scenario: &str) -> RunConfig {
        RunConfig {
            command: Command::Validate,
            op: String::new(),
            grid: String::new(),
            states: Vec::new(),
            sweep: None,
            format: OutputFormat::Json,
            output: None,
            scenario: Some(scenario.into()),
            with_witness: false,
            with_plan: false,
        }
    }

    pub fn check(&self) -> Result<()> {
        if matches!(self.command, Command::Compute | Command::Sweep) && self.states.len() != 2 {
            return Err(Error::Parse(format!("expected two states, got {}", self.states.len())));
        }
        if self.command == Command::Sweep {
            let axis = self.sweep.as_ref().ok_or_else(|| Error::Parse("missing sweep axis".into()))?;
            if !(axis.step > 0.0) {
                return Err(Error::Parse(format!("sweep step must be positive, got {}", axis.step)));
            }
            if !(axis.start < axis.stop) {
                return Err(Error::Parse(format!(
                    "empty sweep range [{}, {}]",
                    axis.start, axis.stop
                )));
            }
        }
        if self.command == Command::Validate && self.scenario.is_none() {
            return Err(Error::Parse("missing scenario".into()));
        }
        Ok(())
    }
}

/// Process exit status for an error: 2 for malformed input, 3 for model errors.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse(_) | Error::UnknownScenario(_) => 2,
        _ => 3,
    }
}

/// Parses a real number, allowing `pi` multiples (`pi`, `-pi/2`, `3pi/4`, `0.5pi`).
pub fn parse_number(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a number: `{s}`"));
    if let Ok(v) = s.parse::<f64>() {
        return if v.is_finite() { Ok(v) } else { Err(bad()) };
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s.strip_prefix('+').unwrap_or(s)),
    };
    let (coef, rest) = body.split_once("pi").ok_or_else(bad)?;
    let coef = match coef.trim_end_matches('*') {
        "" => 1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let div = match rest {
        "" => 1.0,
        r => r.strip_prefix('/').ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(sign * coef * PI / div)
}

fn fields(spec: &str) -> Vec<&str> {
    spec.split(':').map(str::trim).collect()
}

fn expect_arity(spec: &str, parts: &[&str], allowed: &[usize]) -> Result<()> {
    if allowed.contains(&parts.len()) {
        Ok(())
    } else {
        Err(Error::Parse(format!("malformed spec `{spec}`")))
    }
}

pub fn parse_grid(spec: &str) -> Result<Grid> {
    let p = fields(spec);
    match p[0] {
        "line" => {
            expect_arity(spec, &p, &[4])?;
            Grid::line(parse_number(p[1])?, parse_number(p[2])?, parse_number(p[3])?)
        }
        "circle" => {
            expect_arity(spec, &p, &[2])?;
            let n = p[1].parse().map_err(|_| Error::Parse(format!("bad node count in `{spec}`")))?;
            Grid::circle(n)
        }
        "qlattice" => {
            expect_arity(spec, &p, &[4, 5])?;
            let depth =
                p[3].parse().map_err(|_| Error::Parse(format!("bad depth in `{spec}`")))?;
            let signs = match p.get(4).copied().unwrap_or("both") {
                "both" => SignSet::Both,
                "positive" => SignSet::PositiveOnly,
                other => return Err(Error::Parse(format!("unknown sign set `{other}`"))),
            };
            Grid::q_lattice(parse_number(p[1])?, parse_number(p[2])?, depth, signs)
        }
        other => Err(Error::Parse(format!("unknown grid topology `{other}`"))),
    }
}

/// Parses an operator spec; `rank1` samples are interpolated onto the grid nodes
/// and normalized under `Σ ψ² Δ`.
pub fn parse_operator(spec: &str, grid: &Grid) -> Result<OperatorSpec> {
    let p: Vec<&str> = spec.splitn(2, ':').map(str::trim).collect();
    let arg = || p.get(1).copied().ok_or_else(|| Error::Parse(format!("`{spec}` needs an argument")));
    match p[0] {
        "standard" => {
            expect_arity(spec, &p, &[1])?;
            Ok(OperatorSpec::Standard)
        }
        "nonflat" => Ok(OperatorSpec::NonFlat { g: SampledFn::from_csv_file(Path::new(arg()?))? }),
        "hderiv" => Ok(OperatorSpec::HDeriv { h: parse_number(arg()?)? }),
        "qderiv" => Ok(OperatorSpec::QDeriv { q: parse_number(arg()?)? }),
        "rank1" => {
            let samples = SampledFn::from_csv_file(Path::new(arg()?))?;
            let spacing = grid.spacing().ok_or(Error::UnsupportedTopology("qlattice"))?;
            let mut psi: Vec<f64> = grid
                .nodes()
                .iter()
                .map(|&x| if samples.contains(x) { samples.interp(x) } else { 0.0 })
                .collect();
            let norm = psi.iter().map(|v| v * v * spacing).sum::<f64>().sqrt();
            if !(norm > 0.0) {
                return Err(Error::InvalidOperator("ψ₀ vanishes on the grid".into()));
            }
            psi.iter_mut().for_each(|v| *v /= norm);
            OperatorSpec::rank_one(grid, psi)
        }
        other => Err(Error::Parse(format!("unknown operator `{other}`"))),
    }
}

/// A state description that can be re-centred or re-sized during sweeps.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Point { x: f64 },
    Rect { center: f64, halfwidth: f64 },
    Density { center: f64, halfwidth: f64, samples: Vec<f64> },
}

impl StateSpec {
    pub fn parse(spec: &str) -> Result<StateSpec> {
        let p = fields(spec);
        match p[0] {
            "point" => {
                expect_arity(spec, &p, &[2])?;
                Ok(StateSpec::Point { x: parse_number(p[1])? })
            }
            "rect" => {
                expect_arity(spec, &p, &[3])?;
                Ok(StateSpec::Rect { center: parse_number(p[1])?, halfwidth: parse_number(p[2])? })
            }
            "density" => {
                // the path may itself contain ':'
                let p: Vec<&str> = spec.splitn(4, ':').map(str::trim).collect();
                expect_arity(spec, &p, &[4])?;
                let (center, halfwidth) = (parse_number(p[1])?, parse_number(p[2])?);
                let f = SampledFn::from_csv_file(Path::new(p[3]))?;
                let (lo, hi) = f.range();
                if (lo + halfwidth).abs() > 1e-9 || (hi - halfwidth).abs() > 1e-9 {
                    return Err(Error::InvalidDensity(format!(
                        "density sampled on [{lo}, {hi}], expected [-{halfwidth}, {halfwidth}]"
                    )));
                }
                let count = f.xs().len();
                let step = 2.0 * halfwidth / (count - 1) as f64;
                let samples =
                    (0..count).map(|i| f.interp(-halfwidth + i as f64 * step)).collect();
                Ok(StateSpec::Density { center, halfwidth, samples })
            }
            other => Err(Error::Parse(format!("unknown state kind `{other}`"))),
        }
    }

    pub fn center(&self) -> f64 {
        match self {
            StateSpec::Point { x } => *x,
            StateSpec::Rect { center, .. } | StateSpec::Density { center, .. } => *center,
        }
    }

    fn with_center(&self, c: f64) -> StateSpec {
        match self.clone() {
            StateSpec::Point { .. } => StateSpec::Point { x: c },
            StateSpec::Rect { halfwidth, .. } => StateSpec::Rect { center: c, halfwidth },
            StateSpec::Density { halfwidth, samples, .. } => {
                StateSpec::Density { center: c, halfwidth, samples }
            }
        }
    }

    fn with_halfwidth(&self, hw: f64) -> Result<StateSpec> {
        match self.clone() {
            StateSpec::Point { .. } => {
                Err(Error::Parse("eps sweep needs rect or density states".into()))
            }
            StateSpec::Rect { center, .. } => Ok(StateSpec::Rect { center, halfwidth: hw }),
            StateSpec::Density { center, samples, .. } => {
                Ok(StateSpec::Density { center, halfwidth: hw, samples })
            }
        }
    }

    pub fn build(&self, grid: &Arc<Grid>) -> Result<StateMeasure> {
        match self {
            StateSpec::Point { x } => StateMeasure::point(grid, *x),
            StateSpec::Rect { center, halfwidth } => StateMeasure::rect(grid, *center, *halfwidth),
            StateSpec::Density { center, halfwidth, samples } => {
                StateMeasure::density(grid, *center, *halfwidth, samples)
            }
        }
    }
}

/// Solves one configuration; circle grids under the standard operator also
/// report the optimal cut node.
pub fn solve(
    op: &OperatorSpec,
    grid: &Arc<Grid>,
    a: &StateSpec,
    b: &StateSpec,
) -> Result<DistanceResult> {
    let graph = compile(op, grid)?;
    let (mu, nu) = (a.build(grid)?, b.build(grid)?);
    let mut result = spectral_distance(&graph, &mu, &nu)?;
    if grid.topology() == Topology::Circle && *op == OperatorSpec::Standard {
        result.cut_node = Some(circle_w1_cut(grid, &mu, &nu)?.1);
    }
    Ok(result)
}

pub fn run_compute(cfg: &RunConfig) -> Result<String> {
    cfg.check()?;
    let grid = parse_grid(&cfg.grid)?.into_shared();
    let op = parse_operator(&cfg.op, &grid)?;
    let a = StateSpec::parse(&cfg.states[0])?;
    let b = StateSpec::parse(&cfg.states[1])?;
    let result = solve(&op, &grid, &a, &b)?;
    Ok(result.to_json(cfg.with_witness, cfg.with_plan).to_string())
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let n: usize = raw
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("{THREADS_ENV} must be a positive integer")))?;
        builder = builder.num_threads(n.max(1));
    }
    builder.build().map_err(|e| Error::Io(e.to_string()))
}

/// One `(param, value)` row per sweep value, ordered by the sweep value.
pub fn sweep_rows(cfg: &RunConfig) -> Result<Vec<(f64, Distance)>> {
    cfg.check()?;
    let axis = cfg.sweep.clone().expect("checked");
    let base_grid = parse_grid(&cfg.grid)?;
    let base_op = parse_operator(&cfg.op, &base_grid)?;
    let base_grid = base_grid.into_shared();
    let a = StateSpec::parse(&cfg.states[0])?;
    let b = StateSpec::parse(&cfg.states[1])?;

    let row = |v: f64| -> Result<(f64, Distance)> {
        let (mut op, mut grid) = (base_op.clone(), Arc::clone(&base_grid));
        let (mut sa, mut sb) = (a.clone(), b.clone());
        match axis.param {
            SweepParam::X => sb = a.with_center(a.center() + v),
            SweepParam::Eps => {
                sa = a.with_halfwidth(v)?;
                sb = b.with_halfwidth(v)?;
            }
            SweepParam::H => match op {
                OperatorSpec::HDeriv { .. } => op = OperatorSpec::HDeriv { h: v },
                _ => return Err(Error::Parse("h sweep needs an hderiv operator".into())),
            },
            SweepParam::Q => {
                let (anchor, _, depth, signs) = grid
                    .q_params()
                    .ok_or_else(|| Error::Parse("q sweep needs a qlattice grid".into()))?;
                grid = Grid::q_lattice(anchor, v, depth, signs)?.into_shared();
                op = OperatorSpec::QDeriv { q: v };
            }
        }
        Ok((v, solve(&op, &grid, &sa, &sb)?.value))
    };

    let values = axis.values();
    let rows: Vec<Result<(f64, Distance)>> =
        thread_pool()?.install(|| values.par_iter().map(|&v| row(v)).collect());
    rows.into_iter().collect()
}

pub fn run_sweep(cfg: &RunConfig) -> Result<String> {
    let rows = sweep_rows(cfg)?;
    Ok(match cfg.format {
        OutputFormat::Csv => {
            let mut out = String::from("param,value\n");
            for (p, v) in rows {
                let value = match v {
                    Distance::Finite(x) => sig17(x),
                    Distance::Infinite => "inf".into(),
                };
                writeln!(out, "{},{}", sig17(p), value).expect("write to string");
            }
            out
        }
        OutputFormat::Json => {
            let rows: Vec<Value> = rows
                .into_iter()
                .map(|(p, v)| json!({ "param": json_number(p), "value": v.to_json() }))
                .collect();
            Value::Array(rows).to_string()
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Check {
    /// `|solver - oracle| ≤ tol`, or both infinite.
    Equal,
    /// `solver ≥ oracle - tol`.
    AtLeast,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationRow {
    pub scenario: &'static str,
    pub case: String,
    pub solver: Distance,
    pub oracle: Distance,
    pub tol: f64,
    pub check: Check,
}

impl ValidationRow {
    pub fn diff(&self) -> f64 {
        match (self.solver, self.oracle) {
            (Distance::Finite(a), Distance::Finite(b)) => (a - b).abs(),
            (Distance::Infinite, Distance::Infinite) => 0.0,
            _ => f64::INFINITY,
        }
    }

    pub fn passed(&self) -> bool {
        match self.check {
            Check::Equal => self.diff() <= self.tol,
            Check::AtLeast => self.solver.as_f64() >= self.oracle.as_f64() - self.tol,
        }
    }
}

/// Names accepted by `validate` (plus `all`).
pub const SCENARIOS: &[&str] =
    &["euclid", "nonflat", "prop2", "fatreal", "fatreal-classifier", "qder", "prop5.13", "minlength"];

fn row(
    scenario: &'static str,
    case: String,
    solver: Distance,
    oracle: Distance,
    tol: f64,
) -> ValidationRow {
    ValidationRow { scenario, case, solver, oracle, tol, check: Check::Equal }
}

fn point_distance(op: &OperatorSpec, grid: &Arc<Grid>, x: f64, y: f64) -> Result<Distance> {
    Ok(solve(op, grid, &StateSpec::Point { x }, &StateSpec::Point { x: y })?.value)
}

/// Runs one built-in scenario and returns its rows.
pub fn scenario_rows(name: &str) -> Result<Vec<ValidationRow>> {
    let mut rows = Vec::new();
    match name {
        "euclid" => {
            let grid = Grid::line(0.0, 4.0, 0.05)?.into_shared();
            for (x, y) in [(0.0, 4.0), (1.2, 3.05), (2.5, 0.35), (1.0, 1.0)] {
                let d = point_distance(&OperatorSpec::Standard, &grid, x, y)?;
                rows.push(row("euclid", format!("x={x} y={y}"), d, Distance::Finite((x - y).abs()), 1e-9));
            }
        }
        "nonflat" => {
            let spacing = 0.025;
            let grid = Grid::line(0.0, 2.0, spacing)?.into_shared();
            let g = SampledFn::from_fn(0.0, 2.0, 161, |t| 1.0 + t * t)?;
            let op = OperatorSpec::NonFlat { g: g.clone() };
            for (x, y) in [(0.0, 1.0), (0.5, 2.0), (1.25, 0.25)] {
                let d = point_distance(&op, &grid, x, y)?;
                let oracle = closed_form::geodesic_distance(&g, x, y)?;
                rows.push(row("nonflat", format!("x={x} y={y}"), d, Distance::Finite(oracle), 1e-5));
            }
        }
        "prop2" | "minlength" => {
            let h = 0.5;
            let op = OperatorSpec::HDeriv { h };
            let grid = Grid::line(0.0, 4.0, 0.125)?.into_shared();
            let x = 0.5;
            for &y in grid.nodes() {
                let d = point_distance(&op, &grid, x, y)?;
                if name == "prop2" {
                    let oracle = closed_form::h_distance(h, x, y);
                    rows.push(row("prop2", format!("x={x} y={y}"), d, oracle, 1e-9));
                } else if (x - y).abs() > 1e-9 && !d.is_infinite() {
                    let bound = closed_form::min_length_bound(op.operator_norm().expect("bounded"));
                    rows.push(ValidationRow {
                        scenario: "minlength",
                        case: format!("x={x} y={y}"),
                        solver: d,
                        oracle: Distance::Finite(bound),
                        tol: 1e-12,
                        check: Check::AtLeast,
                    });
                }
            }
        }
        "fatreal" | "fatreal-classifier" => {
            let h = 0.5;
            let spacing = 0.0625;
            let grid = Grid::line(-1.0, 5.0, spacing)?.into_shared();
            let op = OperatorSpec::HDeriv { h };
            let (width, tol) = if name == "fatreal" { (0.5, spacing) } else { (0.25, 1e-9) };
            let x = 0.5;
            for k in [0, 1, 3, 5, 8, 11, 16, 24, 40] {
                let y = x + k as f64 * spacing;
                let a = StateSpec::Rect { center: x, halfwidth: width / 2.0 };
                let b = StateSpec::Rect { center: y, halfwidth: width / 2.0 };
                let d = solve(&op, &grid, &a, &b)?.value;
                let oracle = closed_form::fat_distance(h, width, x, y);
                let scenario = if name == "fatreal" { "fatreal" } else { "fatreal-classifier" };
                rows.push(row(scenario, format!("eps={width} x={x} y={y}"), d, oracle, tol));
            }
        }
        "qder" => {
            let q = 0.25;
            let grid = Grid::q_lattice(1.0, q, 12, SignSet::Both)?.into_shared();
            let op = OperatorSpec::QDeriv { q };
            for (x, y) in [(1.0, 0.25), (1.0, q.powi(5)), (-0.25, -q.powi(7)), (1.0, -1.0), (0.0625, 0.0)] {
                let d = point_distance(&op, &grid, x, y)?;
                let b = closed_form::q_bounds(q, x, y)?;
                let oracle = b.exact.unwrap_or(b.upper);
                rows.push(row("qder", format!("x={x} y={y}"), d, Distance::Finite(oracle), 1e-9));
            }
        }
        "prop5.13" => {
            let n = 256;
            let eps = PI / 4.0;
            let grid = Grid::circle(n)?.into_shared();
            let tol = 4.0 * grid.spacing().expect("circle");
            for k in 1..=16 {
                let x = PI * k as f64 / 16.0;
                let a = StateSpec::Rect { center: 0.0, halfwidth: eps };
                let b = StateSpec::Rect { center: x, halfwidth: eps };
                let d = solve(&OperatorSpec::Standard, &grid, &a, &b)?.value;
                let oracle = closed_form::circle_rect_distance(eps, x)?;
                rows.push(row("prop5.13", format!("eps=pi/4 x={k}pi/16"), d, Distance::Finite(oracle), tol));
            }
        }
        other => return Err(Error::UnknownScenario(other.to_string())),
    }
    Ok(rows)
}

/// Runs the named scenario (or `all`); returns whether every row passed and the report.
pub fn run_validate(cfg: &RunConfig) -> Result<(bool, String)> {
    cfg.check()?;
    let name = cfg.scenario.as_deref().expect("checked");
    let names: Vec<&str> = if name == "all" { SCENARIOS.to_vec() } else { vec![name] };
    let mut rows = Vec::new();
    for n in names {
        rows.extend(scenario_rows(n)?);
    }
    let passed = rows.iter().filter(|r| r.passed()).count();
    let all = passed == rows.len();
    let show = |d: Distance| match d {
        Distance::Finite(v) => sig17(v),
        Distance::Infinite => "inf".into(),
    };
    let report = match cfg.format {
        OutputFormat::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "scenario": r.scenario,
                        "case": r.case,
                        "solver": r.solver.to_json(),
                        "oracle": r.oracle.to_json(),
                        "diff": json_number(r.diff()),
                        "tol": json_number(r.tol),
                        "pass": r.passed(),
                    })
                })
                .collect();
            json!({ "rows": items, "passed": passed, "total": rows.len() }).to_string()
        }
        OutputFormat::Csv => {
            let mut out = String::from("scenario,case,solver,oracle,diff,tol,result\n");
            for r in &rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    r.scenario,
                    r.case,
                    show(r.solver),
                    show(r.oracle),
                    show(Distance::Finite(r.diff())),
                    sig17(r.tol),
                    if r.passed() { "pass" } else { "FAIL" }
                )
                .expect("write to string");
            }
            writeln!(out, "# {passed}/{} passed", rows.len()).expect("write to string");
            out
        }
    };
    Ok((all, report))
}
