//! Public-API checks against values computed independently of the crate.

use std::f64::consts::{E, PI};

use martlab::burkholder::{self, PairPoint};
use martlab::constants;
use martlab::martsim;
use martlab::specfun::{self, SeriesEval};
use martlab::spectral::{self, SpectralField};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn named_constants_match_reference_values() {
    // Catalan's constant and ζ(3) to 16 digits.
    assert!(close(constants::dirichlet_beta(2.0), 0.915_965_594_177_219, 1e-14));
    assert!(close(
        constants::riemann_zeta(3.0).unwrap(),
        1.202_056_903_159_594_3,
        1e-14
    ));
    // cot(π/8) = 1 + √2, cot(π/6) = √3.
    assert!(close(constants::pichorides(4.0).unwrap(), 1.0 + 2f64.sqrt(), 1e-14));
    assert!(close(constants::pichorides(1.5).unwrap(), 3f64.sqrt(), 1e-14));
    assert!(close(constants::pichorides(2.0).unwrap(), 1.0, 1e-14));
    assert_eq!(constants::p_star(1.5).unwrap(), 3.0);
    assert_eq!(constants::p_star(3.0).unwrap(), 3.0);
}

#[test]
fn p_two_branches_collapse_to_one() {
    for v in [
        constants::c_p_lower_branch(2.0).unwrap(),
        constants::c_p_upper_branch(2.0).unwrap(),
        constants::k_p_lower_branch(2.0).unwrap(),
        constants::k_p_upper_branch(2.0).unwrap(),
        constants::davis_dp(2.0).unwrap(),
    ] {
        assert!(close(v, 1.0, 1e-8), "{v}");
    }
}

#[test]
fn young_pair_satisfies_fenchel_equality() {
    // Φ(s) + Ψ(t) ≥ st with equality at t = Φ'(s).
    for s in [0.1, 0.5, 1.0, 2.0, 4.0] {
        let t = constants::young_phi_deriv(s);
        let lhs = constants::young_phi(s) + constants::young_psi(t);
        assert!(close(lhs, s * t, 1e-12), "s={s}");
        assert!(constants::young_phi(s) + constants::young_psi(t + 0.3) > s * (t + 0.3));
    }
}

#[test]
fn kummer_closed_forms() {
    let cfg = SeriesEval::default();
    for z in [-3.0, -0.5, 0.0, 0.7, 2.0, 10.0] {
        let m = specfun::kummer_m(2.5, 2.5, z, &cfg).unwrap();
        assert!(close(m, f64::exp(z), 1e-13), "M(a,a,{z})");
        if z != 0.0 {
            let m = specfun::kummer_m(1.0, 2.0, z, &cfg).unwrap();
            assert!(close(m, f64::exp_m1(z) / z, 1e-13), "M(1,2,{z})");
        }
    }
    // Terminating case: M(−2, 1, z) = 1 − 2z + z²/2.
    let m = specfun::kummer_m(-2.0, 1.0, 3.0, &cfg).unwrap();
    assert!(close(m, 1.0 - 6.0 + 4.5, 1e-14));
    assert!(close(specfun::kummer_m(1.0, 1.0, 1.0, &cfg).unwrap(), E, 1e-15));
}

#[test]
fn bessel_i0_reference_values() {
    assert!(close(specfun::bessel_i0(0.0).unwrap(), 1.0, 1e-15));
    assert!(close(specfun::bessel_i0(1.0).unwrap(), 1.266_065_877_752_008_4, 1e-14));
    assert!(close(specfun::bessel_i0(5.0).unwrap(), 27.239_871_823_604_442, 1e-13));
}

#[test]
fn u_one_is_quadratic_inside_and_linear_outside() {
    let inside = PairPoint::scalar(0.2, 0.5);
    assert!(close(burkholder::u_one(&inside), 0.25 - 0.04, 1e-15));
    let outside = PairPoint::scalar(1.0, 1.0);
    assert!(close(burkholder::u_one(&outside), -1.0, 1e-15));
}

#[test]
fn burkholder_ge2_matches_its_inner_formula() {
    let p = 3.0;
    let pt = PairPoint::scalar(1.0, 0.5);
    let expected = 0.5f64.powf(p) - 2f64.powf(p);
    assert!(close(burkholder::burkholder_u_ge2(p, &pt).unwrap(), expected, 1e-13));
}

#[test]
fn hilbert_transform_rotates_trig_modes() {
    let n = 256;
    let f = SpectralField::circle_from_fn(n, 0.0, |t| (3.0 * t).cos() + 0.5 * (7.0 * t).sin()).unwrap();
    let h = spectral::hilbert_circle(&f).unwrap();
    for (j, theta) in spectral::circle_nodes(n, 0.0).enumerate() {
        let want = (3.0 * theta).sin() - 0.5 * (7.0 * theta).cos();
        assert!((h.samples[j] - want).abs() < 1e-12, "node {j}");
    }
}

#[test]
fn weak_norm_of_indicator() {
    // |A|^{1/p − 1}∫_A 1 = |A|^{1/p}, maximised by the full support.
    let mut v = vec![0.0; 100];
    for x in v.iter_mut().take(25) {
        *x = 1.0;
    }
    let r = spectral::weak_norm(&v, 2.0, 0.01).unwrap();
    assert!(close(r.value, 0.5, 1e-14));
    assert_eq!(r.witness_cells, 25);
}

#[test]
fn brownian_terminal_variance() {
    let paths = 4000;
    let xs: Vec<f64> = (0..paths)
        .map(|i| martsim::simulate_bm_path(1, 50, 0.02, &[0.0], 9, i).unwrap().terminal()[0])
        .collect();
    let var = xs.iter().map(|x| x * x).sum::<f64>() / paths as f64;
    // Var of the sample second moment is 2/n.
    assert!((var - 1.0).abs() < 4.0 * (2.0 / paths as f64).sqrt(), "{var}");
}

#[test]
fn seeded_paths_are_reproducible() {
    let a = martsim::simulate_bm(2, 20, 0.01, &[0.0, 1.0], 5).unwrap();
    let b = martsim::simulate_bm(2, 20, 0.01, &[0.0, 1.0], 5).unwrap();
    assert_eq!(a, b);
    assert!(close(a.qv[20], 2.0 * 20.0 * 0.01, 1e-14));
}

#[test]
fn diagonal_operator_norm() {
    let a = [-3.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0];
    assert!(close(martsim::operator_norm(&a, 3), 3.0, 1e-12));
}

#[test]
fn cot_identity_for_pichorides() {
    for p in [1.2, 1.7, 2.5, 6.0] {
        let ps = if p < 2.0 { p / (p - 1.0) } else { p };
        let want = 1.0 / (PI / (2.0 * ps)).tan();
        assert!(close(constants::pichorides(p).unwrap(), want, 1e-13));
    }
}
