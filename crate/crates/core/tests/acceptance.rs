//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::f64::consts::{PI, TAU};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use ccrm::closed_form::{
    circle_rect_distance, cut_point, fat_distance, geodesic_distance, h_distance, min_length_bound,
    q_bounds,
};
use ccrm::operators::Edge;
use ccrm::{
    brute_force_w1, circle_w1_cut, compile, graph_metric, seminorm, spectral_distance,
    witness_hperiodic, ConstraintGraph, Distance, Grid, OperatorSpec, SampledFn, SignSet,
    StateMeasure,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn point_distance(g: &ConstraintGraph, grid: &Arc<Grid>, x: f64, y: f64) -> Distance {
    let mu = StateMeasure::point(grid, x).unwrap();
    let nu = StateMeasure::point(grid, y).unwrap();
    spectral_distance(g, &mu, &nu).unwrap().value
}

fn within_time(start: Instant, limit: Duration) -> Result<Duration, String> {
    let spent = start.elapsed();
    if spent <= limit {
        Ok(spent)
    } else {
        Err(format!("took {spent:?}, limit {limit:?}"))
    }
}

fn euclidean_recovery() -> Outcome {
    let start = Instant::now();
    let grid = Grid::line(0.0, 4.0, 0.01).unwrap().into_shared();
    let g = compile(&OperatorSpec::Standard, &grid).unwrap();
    let mut rng = StdRng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let x = grid.nodes()[rng.random_range(0..grid.len())];
        let y = grid.nodes()[rng.random_range(0..grid.len())];
        let d = point_distance(&g, &grid, x, y).finite().ok_or("infinite distance")?;
        worst = worst.max((d - (x - y).abs()).abs());
    }
    let spent = within_time(start, Duration::from_secs(1))?;
    if worst > 1e-9 {
        return Err(format!("max error {worst:e}"));
    }
    Ok(format!("20 pairs, max error {worst:e}, {spent:.2?}"))
}

fn nonflat_geodesic() -> Outcome {
    let start = Instant::now();
    let spacing = 0.005;
    let grid = Grid::line(0.0, 2.0, spacing).unwrap().into_shared();
    // G sampled at half the grid step so every cell midpoint is a sample
    let g = SampledFn::from_fn(0.0, 2.0, 801, |t| 1.0 + t * t).unwrap();
    let graph = compile(&OperatorSpec::NonFlat { g: g.clone() }, &grid).unwrap();
    let flat = SampledFn::new(vec![0.0, 2.0], vec![1.0, 1.0]).unwrap();
    let flat_graph = compile(&OperatorSpec::NonFlat { g: flat.clone() }, &grid).unwrap();

    let mut rng = StdRng::seed_from_u64(2);
    let (mut worst, mut worst_exact, mut worst_flat) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..10 {
        let x = grid.nodes()[rng.random_range(0..grid.len())];
        let y = grid.nodes()[rng.random_range(0..grid.len())];
        let d = point_distance(&graph, &grid, x, y).finite().ok_or("infinite distance")?;
        worst = worst.max((d - geodesic_distance(&g, x, y).unwrap()).abs());
        worst_exact = worst_exact.max((d - (x.atan() - y.atan()).abs()).abs());
        let d = point_distance(&flat_graph, &grid, x, y).finite().ok_or("infinite distance")?;
        worst_flat = worst_flat.max((d - geodesic_distance(&flat, x, y).unwrap()).abs());
    }
    let spent = within_time(start, Duration::from_secs(2))?;
    if worst > 1e-5 || worst_exact > 1e-5 || worst_flat > 1e-12 {
        return Err(format!(
            "vs quadrature {worst:e}, vs arctan {worst_exact:e}, flat {worst_flat:e}"
        ));
    }
    Ok(format!(
        "10 pairs, vs quadrature {worst:e}, vs arctan {worst_exact:e}, flat {worst_flat:e}, {spent:.2?}"
    ))
}

/// All (x, y, distance) for point pairs on the h-derivative grid.
fn hderiv_pairs() -> Vec<(f64, f64, Distance)> {
    let grid = Grid::line(0.0, 4.0, 0.125).unwrap().into_shared();
    let g = compile(&OperatorSpec::HDeriv { h: 0.5 }, &grid).unwrap();
    let mut out = Vec::new();
    for &x in grid.nodes() {
        for &y in grid.nodes() {
            out.push((x, y, point_distance(&g, &grid, x, y)));
        }
    }
    out
}

fn hderiv_dichotomy() -> Outcome {
    let start = Instant::now();
    let h = 0.5;
    let pairs = hderiv_pairs();
    let (mut finite, mut infinite) = (0, 0);
    for &(x, y, d) in &pairs {
        let on_orbit = !h_distance(h, x, y).is_infinite();
        match (on_orbit, d) {
            (true, Distance::Finite(v)) if (v - (x - y).abs()).abs() <= 1e-9 => finite += 1,
            (false, Distance::Infinite) => infinite += 1,
            _ => return Err(format!("x={x} y={y}: got {d:?}")),
        }
    }
    let spent = within_time(start, Duration::from_secs(1))?;
    Ok(format!("{finite} finite, {infinite} infinite pairs, {spent:.2?}"))
}

fn fat_point_isometry() -> Outcome {
    let h = 0.5;
    let width = 0.5;
    let op = OperatorSpec::HDeriv { h };
    let x = 0.5;
    let separations = [0.0625, 0.1875, 0.3125, 0.5, 0.8125, 1.25, 1.4375, 2.0, 2.5625, 3.0];
    let mut errors = Vec::new();
    for level in 0..4 {
        let spacing = 0.0625 / f64::from(1 << level);
        let grid = Grid::line(-1.0, 5.0, spacing).unwrap().into_shared();
        let g = compile(&op, &grid).unwrap();
        let mu = StateMeasure::rect(&grid, x, width / 2.0).unwrap();
        let mut worst = 0.0f64;
        for s in separations {
            let nu = StateMeasure::rect(&grid, x + s, width / 2.0).unwrap();
            let d = spectral_distance(&g, &mu, &nu).unwrap().value;
            let d = d.finite().ok_or_else(|| format!("infinite at separation {s}, step {spacing}"))?;
            worst = worst.max((d - s).abs());
        }
        if worst > spacing {
            return Err(format!("step {spacing}: error {worst:e} exceeds the step"));
        }
        errors.push(format!("{worst:.1e}@{spacing}"));
    }
    Ok(format!("{} separations, errors within step at every level [{}]", separations.len(), errors.join(", ")))
}

fn fat_point_classifier() -> Outcome {
    let h = 0.5;
    let spacing = 0.125;
    let grid = Grid::line(-1.0, 4.0, spacing).unwrap().into_shared();
    let g = compile(&OperatorSpec::HDeriv { h }, &grid).unwrap();
    let x = 0.5;
    let mut checked = 0;
    for j in 1..=8 {
        let width = j as f64 * spacing;
        let mu = StateMeasure::rect(&grid, x, width / 2.0).unwrap();
        for k in 0..=16 {
            let y = x + k as f64 * spacing;
            let nu = StateMeasure::rect(&grid, y, width / 2.0).unwrap();
            let d = spectral_distance(&g, &mu, &nu).unwrap().value;
            let expected = fat_distance(h, width, x, y);
            if d.is_infinite() != expected.is_infinite() {
                return Err(format!("width {width}, y {y}: solver {d:?}, closed form {expected:?}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} width/separation instances classified consistently"))
}

fn q_derivative() -> Outcome {
    let q: f64 = 0.25;
    let depth = 12;
    let grid = Grid::q_lattice(1.0, q, depth, SignSet::Both).unwrap().into_shared();
    let g = compile(&OperatorSpec::QDeriv { q }, &grid).unwrap();
    let tail = q.powf(depth as f64 / 2.0);
    let (mut orbit_pairs, mut worst_orbit, mut pairs) = (0, 0.0f64, 0);
    for &x in grid.nodes() {
        for &y in grid.nodes() {
            let d = point_distance(&g, &grid, x, y).finite().ok_or("infinite distance")?;
            let b = q_bounds(q, x, y).unwrap();
            if d < b.lower - 1e-9 || d > b.upper + tail {
                return Err(format!("x={x} y={y}: {d} outside [{}, {}]", b.lower, b.upper));
            }
            if x != 0.0 && y != 0.0 && x.signum() == y.signum() {
                orbit_pairs += 1;
                worst_orbit = worst_orbit.max((d - q.sqrt() * (x - y).abs()).abs());
            }
            pairs += 1;
        }
    }
    if worst_orbit > 1e-9 {
        return Err(format!("same-orbit error {worst_orbit:e}"));
    }
    let cross = point_distance(&g, &grid, 1.0, -1.0).finite().unwrap();
    if (cross - 1.0).abs() > 1e-9 {
        return Err(format!("d(1, -1) = {cross}"));
    }
    Ok(format!("{orbit_pairs} same-orbit pairs (max error {worst_orbit:e}), d(1,-1) = {cross}, {pairs} pairs within bounds"))
}

fn circle_rect() -> Outcome {
    let start = Instant::now();
    let n = 512;
    let eps = PI / 4.0;
    let grid = Grid::circle(n).unwrap().into_shared();
    let spacing = grid.spacing().unwrap();
    let g = compile(&OperatorSpec::Standard, &grid).unwrap();
    let mu = StateMeasure::rect(&grid, 0.0, eps).unwrap();
    let knee = PI - 2.0 * eps;
    let mut values = Vec::new();
    let mut worst = 0.0f64;
    let mut worst_cut = 0.0f64;
    for k in 1..=64 {
        let x = PI * k as f64 / 64.0;
        let nu = StateMeasure::rect(&grid, x, eps).unwrap();
        let d = spectral_distance(&g, &mu, &nu).unwrap().value.finite().ok_or("infinite distance")?;
        let exact = circle_rect_distance(eps, x).unwrap();
        worst = worst.max((d - exact).abs());
        if x > knee {
            let (_, cut) = circle_w1_cut(&grid, &mu, &nu).unwrap();
            // cut c removes the edge between nodes c-1 and c
            let at = (cut as f64 - 0.5) * spacing;
            let gap = (at - cut_point(eps, x).unwrap()).rem_euclid(TAU);
            worst_cut = worst_cut.max(gap.min(TAU - gap));
        }
        values.push((x, d));
    }
    if worst > 0.02 {
        return Err(format!("max deviation {worst:e}"));
    }
    if worst_cut > 2.0 * spacing {
        return Err(format!("cut node off by {worst_cut:e} (step {spacing:e})"));
    }
    let (_, at_knee) = values[31];
    if (at_knee - knee).abs() > 0.02 {
        return Err(format!("value {at_knee} at the knee"));
    }
    for w in values.windows(2) {
        let jump = (w[1].1 - w[0].1).abs();
        if jump > (w[1].0 - w[0].0) + 0.02 {
            return Err(format!("jump {jump} between x={} and x={}", w[0].0, w[1].0));
        }
    }
    let spent = within_time(start, Duration::from_secs(30))?;
    Ok(format!(
        "64 separations, max deviation {worst:.2e}, cut within {:.2} steps, {spent:.2?}",
        worst_cut / spacing
    ))
}

fn minimum_length() -> Outcome {
    let h = 0.5;
    let bound = min_length_bound(OperatorSpec::HDeriv { h }.operator_norm().unwrap());
    let mut smallest = f64::INFINITY;
    for (x, y, d) in hderiv_pairs() {
        if let (Distance::Finite(v), true) = (d, x != y) {
            if v < bound {
                return Err(format!("x={x} y={y}: {v} < {bound}"));
            }
            smallest = smallest.min(v);
        }
    }
    if smallest < h {
        return Err(format!("smallest distance {smallest} below h"));
    }
    Ok(format!("smallest distinct-point distance {smallest} (bound {bound})"))
}

fn random_instance(rng: &mut StdRng) -> (OperatorSpec, Arc<Grid>) {
    let n = rng.random_range(3..=10);
    let spacing = [0.25, 0.5, 1.0][rng.random_range(0..3)];
    let line = || Grid::line(0.0, (n - 1) as f64 * spacing, spacing).unwrap().into_shared();
    match rng.random_range(0..5) {
        0 => (OperatorSpec::Standard, line()),
        1 => (OperatorSpec::HDeriv { h: spacing * rng.random_range(1..=3) as f64 }, line()),
        2 => {
            let ys: Vec<f64> = (0..2 * n - 1).map(|_| rng.random_range(0.2..3.0)).collect();
            let xs = (0..2 * n - 1).map(|i| i as f64 * spacing / 2.0).collect();
            (OperatorSpec::NonFlat { g: SampledFn::new(xs, ys).unwrap() }, line())
        }
        3 => (OperatorSpec::Standard, Grid::circle(n).unwrap().into_shared()),
        _ => {
            let q = [0.25, 0.5, 0.7][rng.random_range(0..3)];
            let signs = if rng.random_bool(0.5) { SignSet::Both } else { SignSet::PositiveOnly };
            let depth = rng.random_range(1..=4);
            (OperatorSpec::QDeriv { q }, Grid::q_lattice(1.0, q, depth, signs).unwrap().into_shared())
        }
    }
}

fn quantized_state(rng: &mut StdRng, grid: &Arc<Grid>, quanta: usize) -> StateMeasure {
    let mut counts = vec![0usize; grid.len()];
    for _ in 0..quanta {
        counts[rng.random_range(0..grid.len())] += 1;
    }
    let weights = counts.iter().map(|&c| c as f64 / quanta as f64).collect();
    StateMeasure::from_weights(grid, weights).unwrap()
}

fn oracle_equivalence() -> Outcome {
    let mut rng = StdRng::seed_from_u64(9);
    let (mut finite, mut infinite) = (0, 0);
    let (mut worst, mut worst_gap) = (0.0f64, 0.0f64);
    for i in 0..200 {
        let (op, grid) = random_instance(&mut rng);
        let g = compile(&op, &grid).unwrap();
        let quanta = rng.random_range(1..=6);
        let mu = quantized_state(&mut rng, &grid, quanta);
        let nu = quantized_state(&mut rng, &grid, quanta);
        let all: Vec<usize> = (0..grid.len()).collect();
        let table = graph_metric(&g, &all);
        let cost: Vec<Vec<f64>> = all.iter().map(|&s| table.row(s).unwrap().to_vec()).collect();
        let oracle = brute_force_w1(&cost, &mu, &nu, quanta).unwrap();
        let r = spectral_distance(&g, &mu, &nu).unwrap();
        match r.value {
            Distance::Infinite if oracle.is_infinite() => infinite += 1,
            Distance::Finite(v) if oracle.is_finite() => {
                worst = worst.max((v - oracle).abs());
                let w = r.witness.as_ref().ok_or("missing witness")?;
                let objective = mu.expectation(w).unwrap() - nu.expectation(w).unwrap();
                let plan_cost = r.plan_cost(&table).ok_or("missing plan")?;
                worst_gap = worst_gap.max((objective - plan_cost).abs()).max((v - plan_cost).abs());
                finite += 1;
            }
            other => {
                return Err(format!("instance {i} ({}): solver {other:?}, brute force {oracle}", op.name()))
            }
        }
    }
    if worst > 1e-9 || worst_gap > 1e-9 {
        return Err(format!("value error {worst:e}, duality gap {worst_gap:e}"));
    }
    Ok(format!(
        "{finite} finite + {infinite} infinite instances, max error {worst:e}, max gap {worst_gap:e}"
    ))
}

fn witness_family() -> Outcome {
    let h = 0.5;
    let grid = Grid::line(0.0, 4.0, 0.025).unwrap().into_shared();
    let op = OperatorSpec::HDeriv { h };
    let g = compile(&op, &grid).unwrap();
    let x = 1.0;
    let mu_point = StateMeasure::point(&grid, x).unwrap();
    let mu_rect = StateMeasure::rect(&grid, x, h / 2.0).unwrap();
    let mut checks = 0;
    let mut max_norm = 0.0f64;
    for n in [1u32, 5, 25] {
        let f = witness_hperiodic(n, x, h);
        let samples = f.sample(&grid);
        let norm = seminorm(&op, &grid, &samples).unwrap();
        max_norm = max_norm.max(norm);
        if norm > 1.0 + 1e-6 {
            return Err(format!("n={n}: seminorm {norm}"));
        }
        let scale = norm.max(1.0);
        for k in 1..=80 {
            let y = x + k as f64 * 0.025;
            let nf = f64::from(n);
            let formula = nf
                * (-(1.0 + (x - y).powi(2)).sqrt() / nf).exp()
                * (PI * (x - y) / h).sin().powi(2);
            if (formula - f.eval(y)).abs() > 1e-12 {
                return Err(format!("n={n} y={y}: objective formula {formula} vs f(y) {}", f.eval(y)));
            }
            let nu = StateMeasure::point(&grid, y).unwrap();
            let d = spectral_distance(&g, &mu_point, &nu).unwrap().value;
            if formula / scale > d.as_f64() + 1e-9 {
                return Err(format!("n={n} y={y}: bound {formula} above {d:?}"));
            }
            if y + h / 2.0 <= 4.0 {
                let nu = StateMeasure::rect(&grid, y, h / 2.0).unwrap();
                let r = spectral_distance(&g, &mu_rect, &nu).unwrap();
                let d = r.value.finite().ok_or_else(|| format!("rect pair x={x} y={y} infinite"))?;
                let objective =
                    (nu.expectation(&samples).unwrap() - mu_rect.expectation(&samples).unwrap()) / scale;
                if objective > d + 1e-9 {
                    return Err(format!("n={n} y={y}: rect objective {objective} above {d}"));
                }
                checks += 1;
            }
            checks += 1;
        }
    }
    Ok(format!("{checks} bound checks, max seminorm {max_norm:.9}"))
}

fn metric_properties() -> Outcome {
    let mut rng = StdRng::seed_from_u64(11);
    let trials = 60;
    for i in 0..trials {
        let (op, grid) = random_instance(&mut rng);
        let g = compile(&op, &grid).unwrap();
        let quanta = rng.random_range(1..=6);
        let [a, b, c] = [(); 3].map(|_| quantized_state(&mut rng, &grid, quanta));
        let d = |p: &StateMeasure, q: &StateMeasure| spectral_distance(&g, p, q).unwrap().value.as_f64();
        let (ab, ba, bc, ac) = (d(&a, &b), d(&b, &a), d(&b, &c), d(&a, &c));
        let same = |u: f64, v: f64| (u.is_infinite() && v.is_infinite()) || (u - v).abs() <= 1e-9;
        if !same(ab, ba) {
            return Err(format!("instance {i}: asymmetric {ab} vs {ba}"));
        }
        if ac > ab + bc + 1e-9 {
            return Err(format!("instance {i}: triangle {ac} > {ab} + {bc}"));
        }
        let factor = rng.random_range(0.1..5.0);
        let scaled = spectral_distance(&g.scaled(factor).unwrap(), &a, &b).unwrap().value.as_f64();
        if !same(scaled, factor * ab) {
            return Err(format!("instance {i}: scaling {scaled} vs {}", factor * ab));
        }
        let (u, v) = (rng.random_range(0..grid.len()), rng.random_range(0..grid.len()));
        if u != v && g.neighbors(u).iter().all(|&(w, _)| w != v) {
            let extra = Edge { u, v, length: rng.random_range(0.05..3.0) };
            let relaxed = spectral_distance(&g.with_edges(&[extra]).unwrap(), &a, &b).unwrap().value.as_f64();
            if relaxed > ab + 1e-9 {
                return Err(format!("instance {i}: extra edge raised {ab} to {relaxed}"));
            }
        }
    }
    let mut worst_shift = 0.0f64;
    for i in 0..trials {
        let n = rng.random_range(4..=24);
        let grid = Grid::circle(n).unwrap().into_shared();
        let g = compile(&OperatorSpec::Standard, &grid).unwrap();
        let quanta = rng.random_range(1..=6);
        let a = quantized_state(&mut rng, &grid, quanta);
        let b = quantized_state(&mut rng, &grid, quanta);
        let shift = rng.random_range(-(n as i64)..=n as i64) as f64 * grid.spacing().unwrap();
        let base = spectral_distance(&g, &a, &b).unwrap().value.finite().unwrap();
        let moved = spectral_distance(&g, &a.translate(shift).unwrap(), &b.translate(shift).unwrap())
            .unwrap()
            .value
            .finite()
            .unwrap();
        worst_shift = worst_shift.max((base - moved).abs());
        if worst_shift > 1e-12 {
            return Err(format!("circle instance {i}: {base} vs {moved} after shift {shift}"));
        }
    }
    Ok(format!(
        "{trials} instances each: symmetry, triangle, scaling, relaxation; rotation error {worst_shift:e}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("1 euclidean recovery", euclidean_recovery),
        ("2 non-flat geodesic", nonflat_geodesic),
        ("3 h-derivative dichotomy", hderiv_dichotomy),
        ("4 fat-point isometry", fat_point_isometry),
        ("5 fat-point classifier", fat_point_classifier),
        ("6 q-derivative", q_derivative),
        ("7 circle rectangular states", circle_rect),
        ("8 minimum length", minimum_length),
        ("9 oracle equivalence", oracle_equivalence),
        ("10 witness family", witness_family),
        ("11 metric properties", metric_properties),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = std::panic::catch_unwind(check)
            .unwrap_or_else(|e| Err(format!("panicked: {:?}", e.downcast_ref::<String>())));
        match outcome {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
