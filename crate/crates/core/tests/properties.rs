use std::sync::Arc;

use ccrm::{compile, line_w1_cdf, spectral_distance, Grid, OperatorSpec, StateMeasure};
use proptest::prelude::*;

fn state(grid: &Arc<Grid>, raw: &[u32]) -> StateMeasure {
    let total: u32 = raw.iter().sum::<u32>().max(1);
    let mut w: Vec<f64> = raw.iter().map(|&r| r as f64 / total as f64).collect();
    if raw.iter().all(|&r| r == 0) {
        w[0] = 1.0;
    }
    StateMeasure::from_weights(grid, w).unwrap()
}

fn weights(n: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..20, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn line_matches_cdf_formula(n in 2usize..30, spacing in 0.05f64..2.0, seed in any::<u64>()) {
        let grid = Grid::line(0.0, (n - 1) as f64 * spacing, spacing).unwrap().into_shared();
        let g = compile(&OperatorSpec::Standard, &grid).unwrap();
        let a: Vec<u32> = (0..n).map(|i| ((seed >> (i % 60)) & 7) as u32).collect();
        let b: Vec<u32> = (0..n).map(|i| ((seed >> ((i + 3) % 60)) & 5) as u32).collect();
        let (mu, nu) = (state(&grid, &a), state(&grid, &b));
        let r = spectral_distance(&g, &mu, &nu).unwrap();
        let lengths = ccrm::transport::path_edge_lengths(&g).unwrap();
        let cdf = line_w1_cdf(&lengths, &mu, &nu).unwrap();
        prop_assert!((r.value.finite().unwrap() - cdf).abs() <= 1e-9);
    }

    #[test]
    fn witness_is_feasible_and_tight((n, a, b) in (3usize..16).prop_flat_map(|n| (Just(n), weights(n), weights(n)))) {
        let grid = Grid::circle(n).unwrap().into_shared();
        let g = compile(&OperatorSpec::Standard, &grid).unwrap();
        let (mu, nu) = (state(&grid, &a), state(&grid, &b));
        let r = spectral_distance(&g, &mu, &nu).unwrap();
        let w = r.witness.unwrap();
        prop_assert!(g.lipschitz_excess(&w) <= 1e-9);
        let objective = mu.expectation(&w).unwrap() - nu.expectation(&w).unwrap();
        prop_assert!((objective - r.value.finite().unwrap()).abs() <= 1e-9);
    }

    #[test]
    fn hderiv_scales_with_step(k in 1usize..5, x in 0usize..24, y in 0usize..24, c in 0.1f64..4.0) {
        let spacing = 0.125;
        let h = k as f64 * spacing;
        let grid = Grid::line(0.0, 23.0 * spacing, spacing).unwrap().into_shared();
        let scaled = Grid::line(0.0, 23.0 * spacing * c, spacing * c).unwrap().into_shared();
        let d = |grid: &Arc<Grid>, h: f64| {
            let g = compile(&OperatorSpec::HDeriv { h }, grid).unwrap();
            let (p, q) = (grid.nodes()[x], grid.nodes()[y]);
            let mu = StateMeasure::point(grid, p).unwrap();
            let nu = StateMeasure::point(grid, q).unwrap();
            spectral_distance(&g, &mu, &nu).unwrap().value.as_f64()
        };
        let (base, big) = (d(&grid, h), d(&scaled, h * c));
        if base.is_infinite() {
            prop_assert!(big.is_infinite());
        } else {
            prop_assert!((big - c * base).abs() <= 1e-9 * (1.0 + c * base));
        }
    }
}
