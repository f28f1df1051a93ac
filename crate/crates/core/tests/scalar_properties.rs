mod common;

use common::{derivative_magnitude, q, rel_close};
use pellet::detection::{build_chi, detect, Existence};
use pellet::oracle::reference_radii;
use pellet::polygon::candidate_ks_from_moduli;
use pellet::solver::{fit_surrogate, fit_trinomial, pellet_annulus};
use pellet::PelletInstance;
use proptest::prelude::*;

const TOL: f64 = 1e-12;

/// `(eta, k)` with moduli log-uniform over `10^{+-decades}` and optional
/// interior zeros.
fn eta_and_k(max_degree: usize, decades: f64) -> impl Strategy<Value = (Vec<f64>, usize)> {
    (3..=max_degree)
        .prop_flat_map(move |n| {
            (
                prop::collection::vec((-decades..decades, prop::bool::weighted(0.85)), n + 1),
                1..n,
            )
        })
        .prop_map(|(raw, k)| {
            let n = raw.len() - 1;
            let eta = raw
                .iter()
                .enumerate()
                .map(|(j, &(e, keep))| {
                    if keep || j == 0 || j == k || j == n {
                        10f64.powf(e)
                    } else {
                        0.0
                    }
                })
                .collect();
            (eta, k)
        })
}

fn instance(max_degree: usize, decades: f64) -> impl Strategy<Value = PelletInstance> {
    eta_and_k(max_degree, decades).prop_map(|(eta, k)| PelletInstance::new(eta, k).unwrap())
}

fn separated(max_degree: usize, decades: f64) -> impl Strategy<Value = PelletInstance> {
    instance(max_degree, decades).prop_filter(
        "needs two positive roots",
        |inst| matches!(detect(inst, TOL), Ok(d) if d.exists == Existence::Yes),
    )
}

fn naive_phi(inst: &PelletInstance, x: f64) -> f64 {
    inst.eta()
        .iter()
        .enumerate()
        .map(|(j, &e)| {
            let term = e * x.powi(j as i32);
            if j == inst.k() {
                -term
            } else {
                term
            }
        })
        .sum()
}

/// Iterations after the relative step first drops below `1e-3`.
fn tail_length(iterates: &[f64]) -> usize {
    let steps: Vec<f64> = iterates
        .windows(2)
        .map(|w| (w[1] - w[0]).abs() / w[1])
        .collect();
    match steps.iter().position(|&s| s < 1e-3) {
        Some(i) => steps.len() - i - 1,
        None => 0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn phi_matches_power_sum(inst in instance(30, 3.0), x in 0.01f64..3.0) {
        let (fast, _) = inst.phi(x);
        prop_assert!((fast - naive_phi(&inst, x)).abs() <= 1e-13 * inst.magnitude(x));
    }

    #[test]
    fn phi_has_at_most_two_positive_roots(inst in instance(20, 2.0)) {
        let d = detect(&inst, TOL).unwrap();
        let grid: Vec<f64> = (1..=4000).map(|i| d.x_star * 1e-3 * 1.004f64.powi(i)).collect();
        let mut signs: Vec<bool> = grid
            .iter()
            .filter_map(|&x| {
                let (v, _) = inst.phi(x);
                (v.abs() > 1e-9 * inst.magnitude(x)).then_some(v > 0.0)
            })
            .collect();
        signs.dedup();
        prop_assert!(signs.len() <= 3);
        if signs.len() == 3 {
            prop_assert_eq!(signs, vec![true, false, true]);
        }
    }

    #[test]
    fn x_star_does_not_depend_on_eta_k(inst in instance(30, 3.0), scale in 0.01f64..100.0) {
        let other = inst.with_eta_k(inst.eta()[inst.k()] * scale).unwrap();
        let (a, b) = (detect(&inst, TOL).unwrap(), detect(&other, TOL).unwrap());
        prop_assert_eq!(a.x_star.to_bits(), b.x_star.to_bits());
        prop_assert_eq!(a.threshold.to_bits(), b.threshold.to_bits());
    }

    #[test]
    fn verdict_follows_margin(inst in instance(30, 3.0)) {
        let d = detect(&inst, TOL).unwrap();
        match d.exists {
            Existence::Yes => prop_assert!(d.margin > 0.0 && d.phi_at_xstar < 0.0),
            Existence::No => prop_assert!(d.margin < 0.0 && d.phi_at_xstar > 0.0),
            Existence::Indeterminate => {
                prop_assert!(d.margin.abs() <= 1e-9 * d.threshold.max(1.0))
            }
        }
    }

    #[test]
    fn chi_changes_sign_once_at_x_star(inst in instance(30, 3.0)) {
        let d = detect(&inst, TOL).unwrap();
        let chi = build_chi(&inst);
        for i in 1..200 {
            let t = i as f64 / 100.0;
            if (t - 1.0).abs() < 1e-6 {
                continue;
            }
            let x = d.x_star * t;
            let (v, _) = chi.eval(x);
            prop_assert_eq!(v > 0.0, t > 1.0, "chi({}) = {}", x, v);
        }
    }

    #[test]
    fn majorant_is_tangent_at_every_iterate(inst in separated(25, 2.0)) {
        let d = detect(&inst, TOL).unwrap();
        let res = pellet_annulus(&inst, d.x_star, TOL).unwrap();
        for &xb in res.inner_iterates.iter().chain(&res.outer_iterates) {
            let tri = fit_trinomial(&inst, xb).unwrap();
            let (phi, dphi) = inst.phi(xb);
            let (f, df) = tri.eval(xb);
            prop_assert!((f - phi).abs() <= 1e-12 * inst.magnitude(xb));
            prop_assert!((df - dphi).abs() <= 1e-10 * derivative_magnitude(&inst, xb));
            let sur = fit_surrogate(&tri, xb).unwrap();
            let h = sur.eval(xb).unwrap();
            prop_assert!((h - f).abs() <= 8.0 * f64::EPSILON * tri.magnitude(xb).max(h.abs()));
        }
    }

    #[test]
    fn annulus_is_sandwiched_by_bisection(inst in separated(30, 3.0)) {
        let d = detect(&inst, TOL).unwrap();
        let res = pellet_annulus(&inst, d.x_star, TOL).unwrap();
        let (r_ref, big_r_ref) = reference_radii(&inst, d.x_star, 1e-15).unwrap();
        let slack = 1e-10;
        prop_assert!(res.inner_iterates.iter().all(|&x| x >= r_ref * (1.0 - slack)));
        prop_assert!(res.outer_iterates.iter().all(|&x| x <= big_r_ref * (1.0 + slack)));
        prop_assert!(rel_close(res.inner_radius, r_ref, 1e-10));
        prop_assert!(rel_close(res.outer_radius, big_r_ref, 1e-10));
    }

    #[test]
    fn outer_iteration_converges_quadratically(inst in separated(50, 3.0)) {
        let d = detect(&inst, TOL).unwrap();
        let res = pellet_annulus(&inst, d.x_star, TOL).unwrap();
        prop_assert!(tail_length(&res.inner_iterates) <= 4, "{:?}", res.inner_iterates);
        prop_assert!(tail_length(&res.outer_iterates) <= 4, "{:?}", res.outer_iterates);
    }

    #[test]
    fn moderate_instances_need_few_outer_steps(inst in separated(50, 0.5)) {
        let d = detect(&inst, TOL).unwrap();
        prop_assume!(d.margin > 0.1 * d.threshold);
        let res = pellet_annulus(&inst, d.x_star, TOL).unwrap();
        prop_assert!(res.inner_solves.len() <= 25 && res.outer_solves.len() <= 25);
    }

    #[test]
    fn polygon_is_invariant_under_scaling(
        (eta, _) in eta_and_k(30, 3.0),
        c in -3.0f64..3.0,
        s in -1.0f64..1.0,
    ) {
        let base = candidate_ks_from_moduli(&eta).unwrap();
        // c * p(10^s z): adds an affine function of j to every log-modulus.
        let moved: Vec<f64> = eta
            .iter()
            .enumerate()
            .map(|(j, &e)| e * 10f64.powf(c + s * j as f64))
            .collect();
        let scaled = candidate_ks_from_moduli(&moved).unwrap();
        prop_assert_eq!(base.candidates, scaled.candidates);
    }
}

#[test]
fn q_runs_in_few_outer_steps() {
    let inst = PelletInstance::from_polynomial(&q(), 3).unwrap();
    let d = detect(&inst, TOL).unwrap();
    let res = pellet_annulus(&inst, d.x_star, TOL).unwrap();
    assert!(res.inner_solves.len() <= 8 && res.outer_solves.len() <= 8);
    assert!(tail_length(&res.outer_iterates) <= 3);
}
