use proptest::prelude::*;

use heatlab::envelope::{epsilon_for_lambda, lambda_eps, recurrence_grid};
use heatlab::lattice::quadratic_margin;
use heatlab::lpthresholds::{sigma_threshold_heat, sigma_threshold_poisson, ThresholdInput};
use heatlab::numeric::logspace::log_sum_exp;
use heatlab::rootspace::{admissible_alpha_triple, build_real_hyperbolic, conjugate, rho_min, s_p, AlphaTriple};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

proptest! {
    #[test]
    fn rho_min_matches_dense_sampling(a in 0.0f64..6.3, gap in 0.3f64..2.8, c1 in 0.05f64..3.0, c2 in 0.05f64..3.0) {
        let n1 = vec![a.cos(), a.sin()];
        let n2 = vec![(a + gap).cos(), (a + gap).sin()];
        let rho: Vec<f64> = (0..2).map(|k| c1 * n1[k] + c2 * n2[k]).collect();
        let exact = rho_min(&rho, &[n1.clone(), n2.clone()]).unwrap();
        // The chamber is the sector between the rays orthogonal to the walls.
        let mut sampled = f64::INFINITY;
        for k in 0..=20_000 {
            let th = k as f64 / 20_000.0 * std::f64::consts::TAU;
            let h = [th.cos(), th.sin()];
            if dot(&n1, &h) >= -1e-12 && dot(&n2, &h) >= -1e-12 {
                sampled = sampled.min(dot(&rho, &h));
            }
        }
        prop_assert!(exact <= sampled + 1e-9);
        prop_assert!(sampled - exact < 1e-3 * (c1 + c2));
    }

    #[test]
    fn s_p_symmetric_under_conjugation(p in 1.001f64..50.0) {
        let s = s_p(p).unwrap();
        let q = conjugate(p).unwrap();
        prop_assert!((s - s_p(q).unwrap()).abs() < 1e-12);
        prop_assert!(s > 0.0 && s <= 1.0);
        prop_assert!(s <= s_p(2.0).unwrap());
    }

    #[test]
    fn quadratic_margin_nonnegative_for_admissible(
        a1 in 0.0f64..=1.0, a2 in 0.0f64..2.0, a3 in 0.0f64..=1.0,
        delta in 0.0f64..0.5, t in 0.01f64..50.0, d in 0.0f64..40.0,
    ) {
        let m = build_real_hyperbolic(3).unwrap();
        let tr = AlphaTriple::new(a1, a2, a3);
        prop_assume!(admissible_alpha_triple(&tr, delta, &m));
        prop_assert!(quadratic_margin(&m, &tr, t, d) >= -1e-12 * (1.0 + t + d + d * d / t));
    }

    #[test]
    fn lambda_epsilon_round_trip(lambda in 0.01f64..0.99) {
        let e = epsilon_for_lambda(lambda);
        prop_assert!((lambda_eps(e) - lambda).abs() < 1e-12);
    }

    #[test]
    fn recurrence_cells_stay_in_unit_interval(lambda in 0.05f64..0.95) {
        let g = recurrence_grid(epsilon_for_lambda(lambda), 6, 60).unwrap();
        for l in 0..=60 {
            for i in 0..=6 {
                prop_assert!((0.0..=1.0).contains(&g.gamma[l][i]));
                prop_assert!(g.beta[l][i] >= g.gamma[l][i] - 1e-15);
                if l > 0 {
                    prop_assert!(g.gamma[l][i] >= g.gamma[l - 1][i]);
                }
            }
        }
    }

    #[test]
    fn poisson_squared_is_heat(p in 1.01f64..20.0, rho in 0.1f64..5.0, frac in 0.0f64..0.999) {
        let inp = ThresholdInput::new(p, rho, frac * rho, 0.0);
        let h = sigma_threshold_heat(&inp).unwrap();
        let q = sigma_threshold_poisson(&inp).unwrap();
        prop_assert!((q * q - h).abs() <= 1e-12 * h.max(1.0));
    }

    #[test]
    fn heat_threshold_monotone(p in 1.01f64..20.0, e1 in 0.0f64..0.99, e2 in 0.0f64..0.99) {
        let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        let f = |p: f64, e: f64| sigma_threshold_heat(&ThresholdInput::new(p, 1.0, e, 0.0)).unwrap();
        prop_assert!(f(p, lo) >= f(p, hi));
        prop_assert!(f(2.0, lo) >= f(p, lo));
    }

    #[test]
    fn log_sum_exp_matches_direct(xs in prop::collection::vec(-50.0f64..50.0, 1..20)) {
        let direct: f64 = xs.iter().map(|x| x.exp()).sum::<f64>().ln();
        prop_assert!((log_sum_exp(xs.iter().copied()) - direct).abs() < 1e-12);
    }
}
