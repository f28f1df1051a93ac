mod common;

use common::{random_polynomial, rel_close};
use num_complex::Complex64;
use pellet::detection::{detect, Existence};
use pellet::oracle::{all_roots, reference_radii};
use pellet::polygon::candidate_ks;
use pellet::solver::pellet_annulus;
use pellet::PelletInstance;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn degree_and_seed() -> impl Strategy<Value = (usize, u64)> {
    (1usize..=25, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn roots_satisfy_residual_and_vieta((n, seed) in degree_and_seed()) {
        let p = random_polynomial(&mut ChaCha8Rng::seed_from_u64(seed), n, 1.0);
        let rs = all_roots(&p, 1e-14).unwrap();
        prop_assert_eq!(rs.roots.len(), n);

        let lead = p.coeff(n);
        let cauchy = 1.0 + p.coeffs()[..n].iter().map(|c| (c / lead).norm()).fold(0.0, f64::max);
        let scale = p.magnitude_at(cauchy);
        for &z in &rs.roots {
            prop_assert!(p.eval(z).norm() <= 1e-8 * scale);
        }

        let sum: Complex64 = rs.roots.iter().sum();
        let want_sum = -p.coeff(n - 1) / lead;
        let sum_scale = rs.roots.iter().map(|z| z.norm()).sum::<f64>();
        prop_assert!((sum - want_sum).norm() <= 1e-8 * sum_scale.max(want_sum.norm()));

        let product: Complex64 = rs.roots.iter().product();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let want_product = sign * p.coeff(0) / lead;
        prop_assert!((product - want_product).norm() <= 1e-8 * want_product.norm());
    }

    #[test]
    fn bisection_agrees_with_the_solver((n, seed) in (3usize..=30, any::<u64>())) {
        let p = random_polynomial(&mut ChaCha8Rng::seed_from_u64(seed), n, 2.0);
        for &k in &candidate_ks(&p).unwrap().candidates {
            let inst = PelletInstance::from_polynomial(&p, k).unwrap();
            let d = detect(&inst, 1e-12).unwrap();
            if d.exists != Existence::Yes {
                continue;
            }
            let res = pellet_annulus(&inst, d.x_star, 1e-12).unwrap();
            let (r, big_r) = reference_radii(&inst, d.x_star, 1e-15).unwrap();
            prop_assert!(rel_close(res.inner_radius, r, 1e-10));
            prop_assert!(rel_close(res.outer_radius, big_r, 1e-10));
        }
    }
}
