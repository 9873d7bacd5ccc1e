use bh_lab::combinatorics::{
    enumerate_multi_indices, excess_count, multi_index_count, rank, squarefree_count, unrank,
};
use bh_lab::experiments::{fit_growth_exponent, ExperimentRecord};
use bh_lab::multilinear::{form_sup_estimate, SymmetricForm};
use bh_lab::polynomial::{random_sign_polynomial, HomogeneousPolynomial, TorusPoint};
use bh_lab::supnorm::{sup_norm_estimate, SupNormBudget};
use num_complex::Complex64;
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn polynomial(max_n: usize, max_m: usize) -> impl Strategy<Value = HomogeneousPolynomial> {
    (1..=max_n, 1..=max_m).prop_flat_map(|(n, m)| {
        let count = multi_index_count(n, m).unwrap() as usize;
        prop::collection::vec(complex(), count)
            .prop_map(move |c| HomogeneousPolynomial::new(n, m, c).unwrap())
    })
}

fn quick_budget() -> SupNormBudget {
    SupNormBudget {
        restarts: 8,
        samples_per_restart: 64,
        ..SupNormBudget::default()
    }
}

#[test]
fn enumeration_counts_exhaustive() {
    for n in 1..=12 {
        for m in 0..=6 {
            let list = enumerate_multi_indices(n, m).unwrap();
            assert_eq!(list.len() as u64, multi_index_count(n, m).unwrap());
            assert!(list.iter().all(|a| a.degree() == m && a.len() == n));
            assert_eq!(
                multi_index_count(n, m).unwrap(),
                squarefree_count(n, m).unwrap() + excess_count(n, m).unwrap()
            );
        }
    }
}

#[test]
fn excess_has_degree_m_minus_one() {
    for m in 2..=4usize {
        let mut seq: Vec<i128> = (m + 1..=m + 12)
            .map(|n| excess_count(n, m).unwrap() as i128)
            .collect();
        for _ in 0..m - 1 {
            seq = seq.windows(2).map(|w| w[1] - w[0]).collect();
        }
        assert!(seq.iter().all(|&d| d == seq[0] && d != 0));
        let next: Vec<i128> = seq.windows(2).map(|w| w[1] - w[0]).collect();
        assert!(next.iter().all(|&d| d == 0));
    }
}

#[test]
fn excess_small_n_record() {
    // Also positive below the n > m regime.
    for m in 2..=5 {
        for n in 1..=m {
            assert!(excess_count(n, m).unwrap() > 0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_is_inverse_of_unrank(n in 1usize..8, m in 0usize..6, pick in any::<u64>()) {
        let count = multi_index_count(n, m).unwrap();
        let i = pick % count;
        let alpha = unrank(i, n, m).unwrap();
        prop_assert_eq!(rank(&alpha).unwrap(), i);
    }

    #[test]
    fn homogeneity(p in polynomial(4, 4), z in prop::collection::vec(complex(), 4), lambda in complex()) {
        let z = &z[..p.n()];
        let scaled: Vec<Complex64> = z.iter().map(|v| v * lambda).collect();
        let lhs = p.evaluate(&scaled).unwrap().norm();
        let rhs = lambda.norm().powi(p.m() as i32) * p.evaluate(z).unwrap().norm();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1e-12) + 1e-14);
    }

    #[test]
    fn evaluation_is_linear_in_coefficients(
        p in polynomial(4, 3),
        scale in complex(),
        z in prop::collection::vec(complex(), 4),
    ) {
        let z = &z[..p.n()];
        let q_coeffs: Vec<Complex64> = p.coefficients().iter().rev().map(|c| c * scale).collect();
        let q = HomogeneousPolynomial::new(p.n(), p.m(), q_coeffs).unwrap();
        let sum_coeffs: Vec<Complex64> =
            p.coefficients().iter().zip(q.coefficients()).map(|(a, b)| a + b).collect();
        let s = HomogeneousPolynomial::new(p.n(), p.m(), sum_coeffs).unwrap();
        let lhs = s.evaluate(z).unwrap();
        let rhs = p.evaluate(z).unwrap() + q.evaluate(z).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1.0));
    }

    #[test]
    fn lq_is_monotone(p in polynomial(4, 3), q1 in 0.3f64..4.0, q2 in 0.3f64..4.0) {
        let (lo, hi) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
        prop_assert!(p.coeff_lq_norm(lo).unwrap() >= p.coeff_lq_norm(hi).unwrap() * (1.0 - 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn interior_points_stay_below_torus_estimate(
        n in 1usize..4,
        m in 2usize..4,
        seed in any::<u64>(),
        pts in prop::collection::vec((0.0f64..1.0, 0.0f64..std::f64::consts::TAU), 12),
    ) {
        let p = random_sign_polynomial(n, m, seed).unwrap();
        let best = sup_norm_estimate(&p, &SupNormBudget::default(), seed).unwrap();
        for chunk in pts.chunks(n) {
            if chunk.len() < n { continue; }
            let z: Vec<Complex64> = chunk.iter().map(|&(r, t)| Complex64::from_polar(r, t)).collect();
            prop_assert!(p.evaluate(&z).unwrap().norm() <= best.lower_bound + 1e-9);
        }
    }

    #[test]
    fn estimates_respect_l2_l1_bracket(n in 1usize..6, m in 2usize..4, seed in any::<u64>()) {
        let p = random_sign_polynomial(n, m, seed).unwrap();
        let e = sup_norm_estimate(&p, &SupNormBudget::default(), seed ^ 1).unwrap();
        prop_assert!(e.lower_bound >= p.l2_norm() - 1e-6);
        prop_assert!(e.lower_bound <= p.l1_norm() + 1e-9);
        let again = p.evaluate_on_torus(&e.witness).unwrap().norm();
        prop_assert!((again - e.lower_bound).abs() <= 1e-12 * e.lower_bound);
    }

    #[test]
    fn form_sup_dominates_polynomial_sup(n in 2usize..5, m in 2usize..4, seed in any::<u64>()) {
        let p = random_sign_polynomial(n, m, seed).unwrap();
        let b = quick_budget();
        let form = form_sup_estimate(&SymmetricForm::new(&p), &b, seed).unwrap();
        let diag = sup_norm_estimate(&p, &b, seed).unwrap();
        prop_assert!(form.lower_bound >= diag.lower_bound - 1e-9);
        prop_assert_eq!(form.witness.len(), n * m);
    }

    #[test]
    fn form_entries_are_symmetric(n in 1usize..5, m in 1usize..4, seed in any::<u64>()) {
        let p = random_sign_polynomial(n, m.max(2), seed).unwrap();
        let m = p.m();
        let form = SymmetricForm::new(&p);
        let total = n.pow(m as u32);
        for code in 0..total {
            let mut c = code;
            let tuple: Vec<usize> = (0..m).map(|_| { let i = c % n; c /= n; i }).collect();
            let mut sorted = tuple.clone();
            sorted.sort_unstable();
            prop_assert_eq!(form.form_entry(&tuple).unwrap(), form.form_entry(&sorted).unwrap());
        }
    }

    #[test]
    fn fitted_slope_non_increasing_in_q(
        sups in prop::collection::vec(1.0f64..50.0, 4),
        q1 in 0.5f64..3.0,
        q2 in 0.5f64..3.0,
    ) {
        let (lo, hi) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
        let ns = [4usize, 8, 16, 32];
        let fit_for = |q: f64| {
            let recs: Vec<ExperimentRecord> = ns.iter().zip(&sups).map(|(&n, &s)| {
                let count = multi_index_count(n, 2).unwrap();
                let lq = (count as f64).powf(1.0 / q);
                ExperimentRecord {
                    m: 2, n, q, trials: 1, seed: 0, coeff_count: count, coeff_lq: lq,
                    sup_estimate: s, ratio: lq / s, constant_estimate: 1.0,
                }
            }).collect();
            fit_growth_exponent(&recs).unwrap().slope
        };
        prop_assert!(fit_for(lo) >= fit_for(hi) - 1e-12);
    }
}

#[test]
fn torus_points_reduce_into_range() {
    let t = TorusPoint::new(vec![-1e-18, 100.0, -7.0]);
    assert!(t
        .phases()
        .iter()
        .all(|&p| (0.0..std::f64::consts::TAU).contains(&p)));
}
