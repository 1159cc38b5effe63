mod common;

use common::{codebook, cost, exact_marginals, hamming, lp_optimum, random_small_code, random_tree_code};
use polylp::bp_decoder::decode_bp_with_beliefs;
use polylp::parity_polytope::membership;
use polylp::{
    decode, decode_dual_ascent, gen_regular_ldpc, AdmmConfig, AdmmState, BpConfig, DecodeStatus,
    DualAscentConfig, LlrVector, ParityCheckMatrix,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bsc_gamma(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let l = ((1.0 - p) / p).ln();
    (0..n).map(|_| if rng.gen_bool(p) { -l } else { l }).collect()
}

#[test]
fn admm_reaches_lp_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let code = gen_regular_ldpc(24, 3, 6, 1).unwrap();
    for _ in 0..30 {
        let gamma: Vec<f64> = (0..24).map(|_| rng.gen_range(-0.6..1.0)).collect();
        let lp = lp_optimum(&code, &gamma);
        let cfg = AdmmConfig { t_max: 5000, epsilon: 1e-7, ..AdmmConfig::default() };
        let out = decode(&LlrVector::new(gamma.clone()).unwrap(), &code, &cfg).unwrap();
        let value: f64 = out.x.iter().zip(&gamma).map(|(x, g)| x * g).sum();
        assert!((value - lp).abs() < 1e-3 * (1.0 + lp.abs()), "admm {value} vs lp {lp}");
    }
}

#[test]
fn objective_gap_shrinks_with_iterations() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let code = gen_regular_ldpc(24, 3, 6, 2).unwrap();
    let mut gaps = (0.0, 0.0);
    for _ in 0..20 {
        let gamma: Vec<f64> = (0..24).map(|_| rng.gen_range(-0.6..1.0)).collect();
        let lp = lp_optimum(&code, &gamma);
        let mut state = AdmmState::new(&code);
        let cfg = AdmmConfig { rho: 1.0, ..AdmmConfig::default() };
        let at = |state: &AdmmState| {
            let v: f64 = state.x.iter().zip(&gamma).map(|(x, g)| x * g).sum();
            (v - lp).abs()
        };
        for _ in 0..100 {
            state.step(&code, &gamma, &cfg).unwrap();
        }
        gaps.0 += at(&state);
        for _ in 100..1000 {
            state.step(&code, &gamma, &cfg).unwrap();
        }
        gaps.1 += at(&state);
    }
    assert!(gaps.1 <= gaps.0, "gap after 1000 iterations {} vs after 100 {}", gaps.1, gaps.0);
}

#[test]
fn replicas_lie_in_parity_polytope_at_convergence() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let code = gen_regular_ldpc(96, 3, 6, 0).unwrap();
    let cfg = AdmmConfig::default();
    let mut checked = 0;
    for _ in 0..50 {
        let gamma = bsc_gamma(96, 0.03, &mut rng);
        let mut state = AdmmState::new(&code);
        let mut converged = false;
        for _ in 0..cfg.t_max {
            state.step(&code, &gamma, &cfg).unwrap();
            let (primal, dual) = state.residuals(&code);
            let bound = cfg.epsilon * cfg.epsilon * code.n_edges() as f64;
            if primal < bound && dual < bound {
                converged = true;
                break;
            }
        }
        if !converged {
            continue;
        }
        checked += 1;
        for j in 0..code.n_checks() {
            let z = &state.z[code.edge_range(j)];
            assert!(membership(z, 1e-5), "check {j}: {z:?}");
        }
    }
    assert!(checked > 40);
}

#[test]
fn integral_admm_outputs_are_ml() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..5 {
        let code = random_small_code(12, 8, &mut rng);
        let book = codebook(&code);
        for _ in 0..100 {
            let gamma = bsc_gamma(12, 0.1, &mut rng);
            let out = decode(&LlrVector::new(gamma.clone()).unwrap(), &code, &AdmmConfig::default()).unwrap();
            if out.ml_certificate {
                let best = book.iter().map(|c| cost(&gamma, c)).fold(f64::INFINITY, f64::min);
                assert!(cost(&gamma, &out.hard_decision) <= best + 1e-9);
            }
        }
    }
}

#[test]
fn bp_is_exact_on_trees() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..10 {
        let n = rng.gen_range(2..=10);
        let code = random_tree_code(n, &mut rng);
        let gamma: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let cfg = BpConfig { t_max: 2 * n + 2, early_exit: false, ..BpConfig::default() };
        let (_, beliefs) = decode_bp_with_beliefs(&LlrVector::new(gamma.clone()).unwrap(), &code, &cfg).unwrap();
        let exact = exact_marginals(&code, &gamma);
        for (b, e) in beliefs.iter().zip(&exact) {
            assert!((b - e).abs() <= 1e-6, "{beliefs:?} vs {exact:?}");
        }
    }
}

fn agree_on(code: &ParityCheckMatrix, gammas: &[Vec<f64>]) -> usize {
    let mut compared = 0;
    for gamma in gammas {
        let g = LlrVector::new(gamma.clone()).unwrap();
        let a = decode(&g, code, &AdmmConfig::default()).unwrap();
        let d = decode_dual_ascent(&g, code, &DualAscentConfig::default()).unwrap();
        let both = a.status == DecodeStatus::Converged
            && d.status == DecodeStatus::Converged
            && a.integral
            && d.integral;
        if both {
            compared += 1;
            assert_eq!(a.hard_decision, d.hard_decision, "gamma {gamma:?}");
        }
    }
    compared
}

#[test]
fn dual_ascent_agrees_with_admm() {
    let single = ParityCheckMatrix::from_dense(&[vec![1, 1, 1, 1]]).unwrap();
    let mut gammas = vec![vec![2.2, 2.2, -1.0, 2.2], vec![1.0; 4]];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    gammas.extend((0..50).map(|_| (0..4).map(|_| rng.gen_range(-1.0..2.0)).collect()));
    assert!(agree_on(&single, &gammas) > 0);

    let code = hamming();
    let gammas: Vec<Vec<f64>> = (0..100).map(|_| bsc_gamma(7, 0.1, &mut rng)).collect();
    assert!(agree_on(&code, &gammas) > 0);
}
