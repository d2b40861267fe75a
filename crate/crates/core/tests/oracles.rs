use std::f64::consts::{LN_2, PI, SQRT_2};

use chebdir_core::fekete::{delta_fekete, delta_zaharjuta};
use chebdir_core::minimax::tau_result;
use chebdir_core::pluripotential::{candidate_grid, extremal_numeric, k_rho_cloud, z_set, ExtremalOptions, RobinModel};
use chebdir_core::sets::generate;
use chebdir_core::{Complex64, MinimaxOptions, MultiIndex, SetModel};

fn mi(e: &[u32]) -> MultiIndex {
    MultiIndex::new(e.to_vec()).unwrap()
}

#[test]
fn classical_segment_constants() {
    let k = generate(&SetModel::Segment { a: -1.0, b: 1.0 }, PI / 200.0).unwrap();
    for n in 1..=12u32 {
        let t = tau_result(&k, &mi(&[n]), &MinimaxOptions::default()).unwrap().tau;
        // monic Chebyshev polynomial 2^(1-n) T_n
        let want = 2f64.powf((1.0 - n as f64) / n as f64);
        assert!((t - want).abs() < 1e-4, "n = {n}: {t} vs {want}");
    }
}

#[test]
fn torus_product_formula() {
    let (r, s) = (1.0f64, 2.0f64);
    let k = generate(&SetModel::torus(&[r, s]), 2.0 * PI / 32.0).unwrap();
    for n in 1..=10u32 {
        for a in 0..=n {
            let alpha = mi(&[a, n - a]);
            let t = tau_result(&k, &alpha, &MinimaxOptions::default()).unwrap().tau;
            let want = r.powf(a as f64 / n as f64) * s.powf((n - a) as f64 / n as f64);
            assert!((t - want).abs() < 1e-3, "{alpha}: {t} vs {want}");
        }
    }
}

#[test]
fn pluripolar_example() {
    let k = generate(&SetModel::ZaharjutaPluripolar, 2.0 * PI / 64.0).unwrap();
    for n in 1..=10 {
        let pure = tau_result(&k, &mi(&[n, 0]), &MinimaxOptions::default()).unwrap();
        assert!((pure.tau - 1.0).abs() < 1e-9);
        let mixed = tau_result(&k, &mi(&[n, 1]), &MinimaxOptions::default()).unwrap();
        assert!(mixed.norm < 1e-10 && mixed.degenerate);
    }
}

#[test]
fn robin_sublevel_set_has_the_same_constants_on_the_axis() {
    let model = SetModel::ProductDiscs { centers: vec![Complex64::new(0.3, 0.0), Complex64::new(0.2, 0.0)], radii: vec![1.0, 2.0] };
    let k = generate(&model, 2.0 * PI / 24.0).unwrap();
    let k_rho = k_rho_cloud(&RobinModel::from_model(&model).unwrap(), 2.0 * PI / 24.0).unwrap();
    let alpha = mi(&[8, 0]);
    let a = tau_result(&k, &alpha, &MinimaxOptions::default()).unwrap().tau;
    let b = tau_result(&k_rho, &alpha, &MinimaxOptions::default()).unwrap().tau;
    assert!((a - 1.0).abs() < 1e-6 && (b - 1.0).abs() < 1e-6);
}

#[test]
fn constant_weight_z_set_on_the_circle() {
    let c = 0.5;
    let k = generate(&SetModel::torus(&[1.0]), 2.0 * PI / 64.0).unwrap().weighted_by(|_| c).unwrap();
    let cand = candidate_grid(&k, 11, 1.5).unwrap();
    let zs = z_set(&k, 6, &cand, 1e-6, &ExtremalOptions::default()).unwrap();
    // V = log+|z| - log c, so M = -log c and Z is the closed unit disc
    assert!((zs.m + c.ln()).abs() < 1e-8);
    assert!(zs.z.iter().all(|z| z[0].norm() <= 1.0 + 1e-6));
    for n in 1..=6 {
        let lhs = tau_result(&zs.z, &mi(&[n]), &MinimaxOptions::default()).unwrap().tau;
        let rhs = zs.m.exp() * tau_result(&k, &mi(&[n]), &MinimaxOptions::default()).unwrap().tau;
        assert!((lhs - rhs).abs() < 1e-6, "n = {n}: {lhs} vs {rhs}");
    }
}

#[test]
fn circle_extremal_function() {
    let k = generate(&SetModel::torus(&[1.0]), 2.0 * PI / 64.0).unwrap();
    let pts = [Complex64::new(2.0, 0.0), Complex64::new(0.0, 3.0), Complex64::new(0.5, 0.0)];
    for n in [1, 3, 8] {
        let g = extremal_numeric(&k, n, &pts, &ExtremalOptions::default()).unwrap();
        let want = [LN_2, 3f64.ln(), 0.0];
        for (v, w) in g.values.iter().zip(want) {
            assert!((v - w).abs() < 1e-6, "n = {n}: {v} vs {w}");
        }
    }
}

#[test]
fn torus_extremal_function_at_degenerate_points() {
    // vanishing or real coordinates give very degenerate bases
    let radii = [1.0, 2.0];
    let k = generate(&SetModel::torus(&radii), 2.0 * PI / 32.0).unwrap();
    let pts = [[Complex64::new(1.5, 0.0), Complex64::new(0.0, 0.0)], [Complex64::new(0.5, 0.0), Complex64::new(0.0, 1.0)]];
    let flat: Vec<Complex64> = pts.iter().flatten().copied().collect();
    let g = extremal_numeric(&k, 12, &flat, &ExtremalOptions::default()).unwrap();
    for (z, v) in pts.iter().zip(&g.values) {
        let want = z.iter().zip(radii).map(|(c, r)| (c.norm() / r).ln()).fold(0.0f64, f64::max);
        assert!((v - want).abs() < 1e-9, "{z:?}: {v} vs {want}");
    }
}

#[test]
fn diameter_of_the_torus_by_the_integral_formula() {
    let k = generate(&SetModel::torus(&[1.0, 2.0]), 2.0 * PI / 32.0).unwrap();
    let est = delta_zaharjuta(&k, 8, 20, &MinimaxOptions::default()).unwrap();
    assert!((est.delta - SQRT_2).abs() < 0.05 * SQRT_2, "{}", est.delta);
}

#[test]
fn diameter_of_the_disc_by_fekete_points() {
    let k = generate(&SetModel::torus(&[1.0]), 2.0 * PI / 256.0).unwrap();
    let est = delta_fekete(&k, 60, 0).unwrap();
    // equally spaced points give (n+1)^(1/n); greedy picks cannot beat them
    let best = 61f64.powf(1.0 / 60.0);
    assert!(est.delta <= best + 1e-9 && est.delta > 0.97 * best, "{}", est.delta);
}
