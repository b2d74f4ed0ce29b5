//! Values frozen from independent computations: high-precision root finding
//! for the closed form, Chebyshev collocation for the nonlinear operator,
//! and exact formulas for uniform grids.

use qdim::measure::{invariant_atoms_mid, w1_distance};
use qdim::quantizer::optimal_quantizer_dp;
use qdim::spectral::{closed_form_sigma, default_bracket, mesh_convergence, solve_sigma_spectral, word_sum_sigma, Mesh};
use qdim::{AtomicMeasure, IfsModel, Word};

#[test]
fn weighted_cantor_closed_form() {
    // 50-digit root of 0.7^s 3^{-s} + 0.3^s 3^{-s} = 1 at r = 1
    let sigma = closed_form_sigma(&[0.7, 0.3], &[1.0 / 3.0, 1.0 / 3.0], 1.0).unwrap();
    assert!((sigma - 0.601_573_828_095_186_6).abs() < 1e-12, "{sigma}");
}

#[test]
fn halving_family_closed_form() {
    for n in [2.0f64, 4.0, 8.0, 16.0] {
        let c = 1.0 / (2.0 * n);
        for r in [0.5, 1.0, 2.0] {
            let sigma = closed_form_sigma(&[0.5, 0.5], &[c, c], r).unwrap();
            assert!((sigma - 2f64.ln() / (2f64.ln() + n.ln())).abs() < 1e-12);
        }
    }
}

#[test]
fn moebius_chain_rule_by_hand() {
    // |f1'(f1(0))| |f1'(0)| = (1/2.5²)(1/4)
    let model = IfsModel::moebius_pair();
    let v = model.df_word(&Word::new(vec![0, 0]), 0.0);
    assert!((v - 0.04).abs() < 1e-15);
}

const MOEBIUS_SIGMA: [(f64, f64); 2] = [(1.0, 0.336_756_245_477_881_96), (2.0, 0.337_046_872_905_640_9)];

#[test]
fn moebius_spectral_against_collocation() {
    let model = IfsModel::moebius_pair();
    for (r, reference) in MOEBIUS_SIGMA {
        let mesh = Mesh::new(model.domain(), 1025).unwrap();
        let res = solve_sigma_spectral(&model, &mesh, r, default_bracket(r), 1e-12).unwrap();
        assert!((res.sigma - reference).abs() < 1e-8, "r={r}: {}", res.sigma);
        assert!(res.trace_is_strictly_decreasing());
    }
}

#[test]
fn moebius_mesh_refinement() {
    let model = IfsModel::moebius_pair();
    let (_, reference) = MOEBIUS_SIGMA[0];
    let sig = mesh_convergence(&model, 1.0, &[257, 1025, 4097], 1e-12).unwrap();
    let gaps: Vec<f64> = sig.windows(2).map(|p| (p[1] - p[0]).abs()).collect();
    assert!(gaps[1] * 2.0 <= gaps[0], "{gaps:?}");
    assert!((sig[2] - reference).abs() < 1e-9);
}

#[test]
fn moebius_word_sum_brackets_the_root() {
    let model = IfsModel::moebius_pair();
    for (r, reference) in MOEBIUS_SIGMA {
        let mut last_gap = f64::INFINITY;
        for depth in [8, 10, 12, 14] {
            let res = word_sum_sigma(&model, r, depth, 1e-12, 33).unwrap();
            let ws = res.word_sum.unwrap();
            assert!(ws.sigma_r <= reference && reference <= ws.sigma_t);
            assert!(ws.gap < last_gap);
            last_gap = ws.gap;
        }
    }
}

#[test]
fn uniform_grid_errors_are_exact() {
    // k equal atoms split into n blocks of m = k/n; each block has variance
    // (m² − 1) / (12 k²)
    let k = 1 << 12;
    let mu = AtomicMeasure::uniform_grid(k);
    for n in [1usize, 2, 4, 8, 16, 32, 64] {
        let m = (k / n) as f64;
        let exact = (m * m - 1.0) / (12.0 * (k * k) as f64);
        let v = optimal_quantizer_dp(&mu, n, 2.0).unwrap().error;
        assert!((v - exact).abs() <= 1e-12 * exact, "n={n}: {v} vs {exact}");
    }
}

#[test]
fn equal_steps_distance_to_the_grid() {
    // atoms at i/n against Lebesgue measure: n triangles of area 1/(2n²)
    let grid = AtomicMeasure::uniform_grid(1 << 14);
    for n in [1usize, 10, 100] {
        let d = w1_distance(&AtomicMeasure::equal_steps(n), &grid);
        assert!((d - 0.5 / n as f64).abs() < 1e-3);
    }
}

#[test]
fn cantor_two_point_error() {
    // each half of the depth-d atoms is a 1/3-scaled copy of the depth d−1
    // atoms, so V_2 at depth d is V_1 at depth d−1 over 9
    let model = IfsModel::cantor();
    let v1 = optimal_quantizer_dp(&invariant_atoms_mid(&model, 9).unwrap(), 1, 2.0).unwrap().error;
    let v2 = optimal_quantizer_dp(&invariant_atoms_mid(&model, 10).unwrap(), 2, 2.0).unwrap().error;
    assert!((v2 - v1 / 9.0).abs() < 1e-15);
}
