use coulomb_count::ensembles::*;
use coulomb_count::moments::{occupation_probs, occupation_probs_quadrature};
use coulomb_count::statistics::*;
use proptest::prelude::*;

fn beta_strategy() -> impl Strategy<Value = Beta> {
    prop_oneof![Just(Beta::Two), Just(Beta::Four)]
}

/// Every closed-form family at random parameters.
fn builtin(beta: Beta, n: usize, pick: u8, x: f64) -> RadialPotential {
    match pick % 5 {
        0 => make_ginibre(beta),
        1 => make_mittag_leffler(beta, 0.5 + 2.0 * x, -0.9 + 3.0 * x, n).unwrap(),
        2 => make_product(beta, 1 + (x * 3.0) as usize, n).unwrap(),
        3 => make_trunc_weak(beta, -0.9 + 6.0 * x, n).unwrap(),
        _ => make_trunc_strong(beta, 0.05 + 3.0 * x).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn count_statistics_invariants(beta in beta_strategy(), n in 1usize..40, pick in 0u8..5,
                                   x in 0.0f64..1.0, a in 0.05f64..1.5) {
        let p = builtin(beta, n, pick, x);
        let v = occupation_probs(&p, n, a).unwrap();
        let s = finite_n_stats(&v, true);
        let nf = n as f64;
        prop_assert!(s.mean >= 0.0 && s.mean <= nf + 1e-12);
        prop_assert!(s.variance <= s.mean.min(nf - s.mean) + 1e-12);
        prop_assert!(s.variance <= nf / 4.0 + 1e-12);
        let d = s.distribution.unwrap();
        let total: f64 = d.iter().sum();
        let m1: f64 = d.iter().enumerate().map(|(k, w)| k as f64 * w).sum();
        let m2: f64 = d.iter().enumerate().map(|(k, w)| (k as f64 - m1).powi(2) * w).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        prop_assert!((m1 - s.mean).abs() < 1e-8);
        prop_assert!((m2 - s.variance).abs() < 1e-8);
        for (p, q) in v.probs.iter().zip(&v.complements) {
            prop_assert!((p + q - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn occupation_monotone_in_radius(beta in beta_strategy(), n in 1usize..30, pick in 0u8..5,
                                     x in 0.0f64..1.0, a in 0.05f64..0.9, step in 0.01f64..0.3) {
        let p = builtin(beta, n, pick, x);
        let lo = occupation_probs(&p, n, a).unwrap();
        let hi = occupation_probs(&p, n, a + step).unwrap();
        for (l, h) in lo.probs.iter().zip(&hi.probs) {
            prop_assert!(h >= l);
        }
    }

    #[test]
    fn poisson_binomial_brute_force(ps in proptest::collection::vec(0.0f64..1.0, 1..10)) {
        let qs: Vec<f64> = ps.iter().map(|p| 1.0 - p).collect();
        let d = poisson_binomial(&ps, &qs);
        let mut brute = vec![0.0; ps.len() + 1];
        for mask in 0u32..(1 << ps.len()) {
            let mut w = 1.0;
            for (i, p) in ps.iter().enumerate() {
                w *= if mask >> i & 1 == 1 { *p } else { 1.0 - p };
            }
            brute[mask.count_ones() as usize] += w;
        }
        for (x, y) in d.iter().zip(&brute) {
            prop_assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn origin_triple_point(beta in beta_strategy(), t in 0.05f64..3.0) {
        let ml = origin_limit_ml(beta, 1.0, 0.0, t).unwrap();
        let pr = origin_limit_product(beta, 1, t).unwrap();
        let ts = origin_limit_trunc_strong(beta, t).unwrap();
        prop_assert!((ml.mean - pr.mean).abs() < 1e-10 && (ml.mean - ts.mean).abs() < 1e-10);
        prop_assert!((ml.variance - pr.variance).abs() < 1e-10);
        prop_assert!((ml.variance - ts.variance).abs() < 1e-10);
    }

    #[test]
    fn edge_profile_forms_agree(s in -6.0f64..6.0) {
        let f = edge_profile_f(s);
        prop_assert!(f > 0.0 && f <= 1.0);
        prop_assert!((f - edge_profile_f_integral(s).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn custom_closures_follow_closed_forms(beta in beta_strategy(), n in 1usize..25, a in 0.1f64..1.4,
                                           b in 0.6f64..2.0) {
        let bv = beta.value();
        let custom = make_custom(beta, move |r| bv / (2.0 * b) * r.powf(2.0 * b),
                                 move |r| bv * r.powf(2.0 * b - 1.0), f64::INFINITY).unwrap();
        let closed = occupation_probs(&make_mittag_leffler(beta, b, 0.0, n).unwrap(), n, a).unwrap();
        let quad = occupation_probs_quadrature(&custom, n, a).unwrap();
        for j in 0..n {
            let (p, q) = (closed.probs[j], closed.complements[j]);
            prop_assert!((quad.probs[j] - p).abs() <= 1e-8 * p, "j={} {} vs {}", j, quad.probs[j], p);
            prop_assert!((quad.complements[j] - q).abs() <= 1e-8 * q);
        }
    }
}
