//! Named constants of the sharp inequalities and the Young pair `Φ`, `Ψ`.

use std::f64::consts::PI;

use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::domain;
use crate::quad::Adaptive;
use crate::specfun::{gamma_zero, mu_p, nu_p, ROOT_TOL};
use crate::Result;

/// How a constant was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Series,
    Quadrature,
    Root,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Series => "series",
            Method::Quadrature => "quadrature",
            Method::Root => "root",
        }
    }
}

/// One computed constant; serializes to a row `name, p_or_k, value, method, est_error`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantReport {
    pub name: String,
    pub p_or_k: f64,
    pub value: f64,
    pub method: Method,
    pub est_error: f64,
}

fn report(name: &str, p_or_k: f64, value: f64, method: Method, est_error: f64) -> ConstantReport {
    ConstantReport {
        name: name.to_string(),
        p_or_k,
        value,
        method,
        est_error,
    }
}

fn check_p(what: &'static str, p: f64) -> Result<()> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(domain(what, p, "p > 1"));
    }
    Ok(())
}

/// `p* = max(p, p/(p−1))`.
pub fn p_star(p: f64) -> Result<f64> {
    check_p("p_star", p)?;
    Ok(p.max(p / (p - 1.0)))
}

/// `cot(π/(2p*))`, the norm of the conjugate function on `L^p`.
pub fn pichorides(p: f64) -> Result<f64> {
    let s = p_star(p)?;
    Ok(1.0 / (PI / (2.0 * s)).tan())
}

/// Dirichlet beta `β(s) = Σ (−1)^k (2k+1)^{−s}`, summed with the
/// Cohen–Rodriguez Villegas–Zagier acceleration for alternating series.
pub fn dirichlet_beta(s: f64) -> f64 {
    const N: usize = 40;
    let nf = N as f64;
    let mut d = (3.0 + 8f64.sqrt()).powi(N as i32);
    d = 0.5 * (d + 1.0 / d);
    let mut b = -1.0;
    let mut c = -d;
    let mut sum = 0.0;
    for k in 0..N {
        let kf = k as f64;
        c = b - c;
        sum += c * (2.0 * kf + 1.0).powf(-s);
        b = (kf + nf) * (kf - nf) * b / ((kf + 0.5) * (kf + 1.0));
    }
    sum / d
}

/// Riemann `ζ(s)` for `s > 1`: partial sum to `N − 1`, the integral tail
/// `N^{1−s}/(s−1)`, and Euler–Maclaurin corrections.
pub fn riemann_zeta(s: f64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(domain("riemann_zeta", s, "s > 1"));
    }
    const N: usize = 32;
    const B: [f64; 6] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
    ];
    let nf = N as f64;
    let mut sum: f64 = (1..N).map(|n| (n as f64).powf(-s)).sum();
    sum += nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s);
    // B_{2k}/(2k)! · s(s+1)…(s+2k−2) · N^{−s−2k+1}
    let mut rising = s;
    let mut fact = 2.0;
    for (k, b) in B.iter().enumerate() {
        let two_k = 2.0 * (k as f64 + 1.0);
        sum += b / fact * rising * nf.powf(-s - two_k + 1.0);
        rising *= (s + two_k - 1.0) * (s + two_k);
        fact *= (two_k + 1.0) * (two_k + 2.0);
    }
    Ok(sum)
}

/// `π²/(8β(2))`.
pub fn davis_weak_d1() -> f64 {
    PI * PI / (8.0 * dirichlet_beta(2.0))
}

/// Ratio of the odd-reciprocal-square series and its alternating version.
pub fn davis_weak_d1_series_ratio() -> f64 {
    // Σ 1/(2k+1)² = (1 − 2^{−2}) ζ(2)
    let odd = 0.75 * riemann_zeta(2.0).expect("s = 2 in domain");
    odd / dirichlet_beta(2.0)
}

/// The `1 < p < 2` formula for `C_p`, defined for all `p > 1`.
pub fn c_p_lower_branch(p: f64) -> Result<f64> {
    check_p("c_p", p)?;
    let q = p / (p - 1.0);
    Ok(2.0 / PI * (4.0 / PI * gamma(q + 1.0) * dirichlet_beta(q + 1.0)).powf(1.0 / q))
}

/// The `p ≥ 2` formula for `C_p`, `[π^{−q}(2^q − 1)Γ(q+1)ζ(q)]^{1/q}`.
pub fn c_p_upper_branch(p: f64) -> Result<f64> {
    check_p("c_p", p)?;
    let q = p / (p - 1.0);
    let inner = PI.powf(-q) * (2f64.powf(q) - 1.0) * gamma(q + 1.0) * riemann_zeta(q)?;
    Ok(inner.powf(1.0 / q))
}

/// Weak-type constant `C_p` for orthogonal martingales.
pub fn c_p(p: f64) -> Result<f64> {
    check_p("c_p", p)?;
    if p < 2.0 {
        c_p_lower_branch(p)
    } else {
        c_p_upper_branch(p)
    }
}

/// `(½Γ((2p−1)/(p−1)))^{1−1/p}`, defined for all `p > 1`.
pub fn k_p_lower_branch(p: f64) -> Result<f64> {
    check_p("k_p", p)?;
    Ok((0.5 * gamma((2.0 * p - 1.0) / (p - 1.0))).powf(1.0 - 1.0 / p))
}

/// `(p^{p−1}/2)^{1/p}`, defined for all `p > 1`.
pub fn k_p_upper_branch(p: f64) -> Result<f64> {
    check_p("k_p", p)?;
    Ok((p.powf(p - 1.0) / 2.0).powf(1.0 / p))
}

/// Weak-type constant `K_p` for differentially subordinate martingales.
pub fn k_p(p: f64) -> Result<f64> {
    check_p("k_p", p)?;
    if p < 2.0 {
        k_p_lower_branch(p)
    } else {
        k_p_upper_branch(p)
    }
}

/// Young function `Φ(t) = eᵗ − 1 − t`.
pub fn young_phi(t: f64) -> f64 {
    t.exp_m1() - t
}

/// Young function `Ψ(t) = (t+1)log(t+1) − t`.
pub fn young_psi(t: f64) -> f64 {
    (t + 1.0) * t.ln_1p() - t
}

/// `Φ'(t) = eᵗ − 1`.
pub fn young_phi_deriv(t: f64) -> f64 {
    t.exp_m1()
}

/// `Ψ'(t) = log(t + 1)`.
pub fn young_psi_deriv(t: f64) -> f64 {
    t.ln_1p()
}

fn check_k(k: f64) -> Result<f64> {
    if !(k > 2.0 / PI) || !k.is_finite() {
        return Err(domain("l_k", k, "K > 2/pi"));
    }
    Ok(2.0 / (PI * k))
}

/// `L(K) = (K/π)∫_ℝ Φ(|2/(πK)·log|t||)/(t²+1) dt` for `K > 2/π`.
///
/// By `t ↦ −t` and `t ↦ 1/t` the integral is four times the piece over
/// `(0, 1]`, which `t = e^{−v}` turns into
/// `∫₀^∞ Φ(cv) e^{−v}/(1 + e^{−2v}) dv` with `c = 2/(πK)`.
pub fn l_k(k: f64) -> Result<ConstantReport> {
    let c = check_k(k)?;
    let q = Adaptive::new(1e-16, 1e-11);
    let int = q.integrate_to_inf(
        |v: f64| {
            let e = (-v).exp();
            // Φ(cv)e^{−v} without forming e^{cv}
            let num = ((c - 1.0) * v).exp() - e - c * v * e;
            num / (1.0 + e * e)
        },
        0.0,
    )?;
    let pref = 4.0 * k / PI;
    Ok(report("L", k, pref * int.value, Method::Quadrature, pref * int.error))
}

/// The halves of `∫₀^∞ Φ(c|log t|)/(t²+1) dt` over `(0, 1]` and `[1, ∞)`,
/// each computed in its own variable: directly in `t` on `(0, 1]`, and
/// through `t = e^{v}` on `[1, ∞)`.
pub fn l_k_halves(k: f64) -> Result<(f64, f64)> {
    let c = check_k(k)?;
    let q = Adaptive {
        abs_tol: 1e-13,
        rel_tol: 1e-12,
        max_intervals: 20_000,
    };
    let lower = q.integrate(|t: f64| young_phi(-c * t.ln()) / (1.0 + t * t), 0.0, 1.0)?;
    let upper = q.integrate_to_inf(
        |v: f64| {
            let e = (-v).exp();
            (young_phi(c * v) * e) / (1.0 + e * e)
        },
        0.0,
    )?;
    Ok((lower.value, upper.value))
}

/// `D_p`: `ν_p` for `0 < p ≤ 2`, `μ_p` for `p > 2`.
pub fn davis_dp(p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(domain("davis_dp", p, "p > 0"));
    }
    if p <= 2.0 {
        nu_p(p, None)
    } else {
        mu_p(p, None)
    }
}

/// Upper bound `2p^{3/2}/(p−1)` for the maximal Davis constant `A_p`.
pub fn a_p_bound(p: f64) -> Result<f64> {
    check_p("a_p_bound", p)?;
    Ok(2.0 * p.powf(1.5) / (p - 1.0))
}

/// Every constant defined at `p` (and `K` for `L`) as report rows.
pub fn constants_table(p: f64, k: f64) -> Result<Vec<ConstantReport>> {
    let eps = f64::EPSILON;
    let mut rows = vec![
        report("p_star", p, p_star(p)?, Method::ClosedForm, 0.0),
        {
            let v = pichorides(p)?;
            report("pichorides", p, v, Method::ClosedForm, 4.0 * eps * v)
        },
        {
            let v = c_p(p)?;
            report("C_p", p, v, Method::Series, 1e-12 * v)
        },
        {
            let v = k_p(p)?;
            report("K_p", p, v, Method::ClosedForm, 16.0 * eps * v)
        },
        report("D_p", p, davis_dp(p)?, Method::Root, ROOT_TOL),
        {
            let v = a_p_bound(p)?;
            report("A_p_bound", p, v, Method::ClosedForm, 4.0 * eps * v)
        },
    ];
    if p > 1.0 && p < 2.0 {
        let v = gamma_zero(p)?;
        rows.push(report("gamma0", p, v, Method::ClosedForm, 16.0 * eps * v));
    }
    rows.push(l_k(k)?);
    let d1 = davis_weak_d1();
    rows.push(report("davis_weak_d1", 1.0, d1, Method::Series, 1e-14));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn p_star_examples() {
        assert_eq!(p_star(2.0).unwrap(), 2.0);
        assert_eq!(p_star(4.0).unwrap(), 4.0);
        assert!((p_star(4.0 / 3.0).unwrap() - 4.0).abs() < 1e-14);
        assert!(p_star(1.0).is_err());
        assert!(p_star(0.5).is_err());
    }

    #[test]
    fn pichorides_examples() {
        assert!((pichorides(2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((pichorides(4.0).unwrap() - (1.0 + 2f64.sqrt())).abs() < 1e-14);
        for p in [1.2, 1.5, 3.0, 7.0] {
            let q = p / (p - 1.0);
            assert!((pichorides(p).unwrap() - pichorides(q).unwrap()).abs() < 1e-13);
        }
    }

    #[test]
    fn pichorides_below_subordination_constant() {
        for p in [1.2, 1.5, 3.0, 5.0, 10.0] {
            assert!(pichorides(p).unwrap() < p_star(p).unwrap() - 1.0);
        }
    }

    fn beta_oracle(s: f64) -> f64 {
        // mean of consecutive partial sums of 10⁶ terms
        let mut sum = 0.0;
        let mut prev = 0.0;
        for k in 0..1_000_000u32 {
            prev = sum;
            let t = (2.0 * k as f64 + 1.0).powf(-s);
            sum += if k % 2 == 0 { t } else { -t };
        }
        0.5 * (sum + prev)
    }

    #[test]
    fn beta_two_is_catalan() {
        let b = dirichlet_beta(2.0);
        assert!(b > 0.915_965_5 && b < 0.915_965_6);
        assert!((b - beta_oracle(2.0)).abs() < 1e-12);
        assert!((dirichlet_beta(3.0) - PI.powi(3) / 32.0).abs() < 1e-15);
        assert!((dirichlet_beta(1.0) - PI / 4.0).abs() < 1e-15);
    }

    fn zeta_oracle(s: f64) -> (f64, f64) {
        // 10⁶ terms; the tail lies between ∫_{N+1}^∞ and ∫_N^∞ of x^{−s}
        let n = 1_000_000u32;
        let partial: f64 = (1..=n).rev().map(|k| (k as f64).powf(-s)).sum();
        let nf = n as f64;
        let lo = partial + (nf + 1.0).powf(1.0 - s) / (s - 1.0);
        let hi = partial + nf.powf(1.0 - s) / (s - 1.0);
        (lo, hi)
    }

    #[test]
    fn zeta_matches_oracle() {
        assert!((riemann_zeta(2.0).unwrap() - PI * PI / 6.0).abs() < 1e-14);
        assert!((riemann_zeta(4.0).unwrap() - PI.powi(4) / 90.0).abs() < 1e-14);
        for s in [1.5, 1.1, 3.3] {
            let (lo, hi) = zeta_oracle(s);
            let z = riemann_zeta(s).unwrap();
            assert!(z >= lo - 1e-9 && z <= hi + 1e-9, "s={s}: {z} not in [{lo}, {hi}]");
        }
        assert!(riemann_zeta(1.0).is_err());
    }

    #[test]
    fn davis_weak_forms_agree() {
        let a = davis_weak_d1();
        let b = davis_weak_d1_series_ratio();
        assert!((a - b).abs() < 1e-9);
        assert!((a - 1.346_885_251_999_406_6).abs() < 1e-12);
    }

    #[test]
    fn c_p_branches_meet_at_two() {
        let lo = c_p_lower_branch(2.0).unwrap();
        let hi = c_p_upper_branch(2.0).unwrap();
        assert!((lo - 1.0).abs() < 1e-12);
        assert!((lo - hi).abs() < 1e-8);
        assert!((c_p(2.0).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn c_p_at_three_matches_zeta_oracle() {
        let q = 1.5f64;
        let (lo, hi) = zeta_oracle(q);
        let z = 0.5 * (lo + hi);
        let expected = (PI.powf(-q) * (2f64.powf(q) - 1.0) * gamma(q + 1.0) * z).powf(1.0 / q);
        assert!((c_p(3.0).unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn c_p_below_strong_type_bound() {
        // Hölder: ∫_A|Hf| ≤ ‖Hf‖_p |A|^{1−1/p}, so C_p ≤ cot(π/(2p*))
        for p in [1.2, 1.5, 1.9, 2.0, 2.5, 3.0, 5.0, 10.0] {
            assert!(c_p(p).unwrap() <= pichorides(p).unwrap() + 1e-12, "p={p}");
        }
    }

    #[test]
    fn k_p_examples() {
        assert!((k_p(2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((k_p_lower_branch(2.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((k_p(2.0 - 1e-9).unwrap() - 1.0).abs() < 1e-6);
        assert!((k_p(3.0).unwrap() - 4.5f64.powf(1.0 / 3.0)).abs() < 1e-14);
        assert!((k_p(3.0).unwrap() - 1.650_964).abs() < 1e-6);
    }

    #[test]
    fn l_k_asymptotics() {
        // ∫_ℝ log²|t|/(t²+1) dt = π³/4
        let q = Adaptive::default();
        let half = q
            .integrate_to_inf(|v: f64| v * v * (-v).exp() / (1.0 + (-2.0 * v).exp()), 0.0)
            .unwrap()
            .value;
        assert!((4.0 * half - PI.powi(3) / 4.0).abs() < 1e-11);
        let k = 100.0;
        let kl = k * l_k(k).unwrap().value;
        assert!((kl - 0.5).abs() < 0.01 * 0.5, "{kl}");
        assert!((1e4 * l_k(1e4).unwrap().value - 0.5).abs() < 1e-4);
    }

    #[test]
    fn l_k_is_decreasing() {
        let l1 = l_k(1.0).unwrap().value;
        let l2 = l_k(2.0).unwrap().value;
        let l5 = l_k(5.0).unwrap().value;
        assert!(l1 > l2 && l2 > l5, "{l1} {l2} {l5}");
    }

    #[test]
    fn l_k_halves_agree() {
        for k in [1.0, 2.0, 5.0, 100.0] {
            let (lo, hi) = l_k_halves(k).unwrap();
            assert!((lo - hi).abs() < 1e-8, "K={k}: {lo} {hi}");
            let total = l_k(k).unwrap().value;
            assert!((4.0 * k / PI * lo - total).abs() < 1e-8 * total.max(1.0));
        }
        assert!(l_k(2.0 / PI).is_err());
    }

    #[test]
    fn l_k_series_oracle() {
        // ∫₀^∞ (e^{(c−1)v} − e^{−v} − cve^{−v}) Σ(−1)^j e^{−2jv} dv summed term by term
        let k = 3.0;
        let c = 2.0 / (PI * k);
        let mut s = 0.0;
        for j in 0..2_000_000u32 {
            let m = 2.0 * j as f64;
            let t = 1.0 / (m + 1.0 - c) - 1.0 / (m + 1.0) - c / ((m + 1.0) * (m + 1.0));
            s += if j % 2 == 0 { t } else { -t };
        }
        assert!((4.0 * k / PI * s - l_k(k).unwrap().value).abs() < 1e-9);
    }

    #[test]
    fn davis_dp_examples() {
        assert!((davis_dp(2.0).unwrap() - 1.0).abs() < 1e-10);
        assert!((mu_p(2.0, None).unwrap() - 1.0).abs() < 1e-8);
        assert!((nu_p(2.0, None).unwrap() - 1.0).abs() < 1e-8);
        assert!(davis_dp(4.0).unwrap() <= 4.0);
        let nu1 = davis_dp(1.0).unwrap();
        assert!(nu1 > 1.0 && nu1 < 2.0);
        // continuity across p = 2
        let below = davis_dp(2.0 - 1e-9).unwrap();
        let above = davis_dp(2.0 + 1e-9).unwrap();
        assert!((below - above).abs() < 1e-8);
    }

    #[test]
    fn davis_dp_within_two_sqrt_p() {
        for p in [1.0, 1.5, 2.0, 3.0, 4.0, 6.5, 9.0] {
            assert!(davis_dp(p).unwrap() <= 2.0 * p.sqrt());
        }
    }

    #[test]
    fn a_p_bound_examples() {
        assert!((a_p_bound(2.0).unwrap() - 4.0 * 2f64.sqrt()).abs() < 1e-14);
        assert!((a_p_bound(4.0).unwrap() - 16.0 / 3.0).abs() < 1e-14);
        for p in [1.5, 2.0, 3.0] {
            let doob = p / (p - 1.0) * davis_dp(p).unwrap();
            assert!(a_p_bound(p).unwrap() >= doob);
        }
    }

    #[test]
    fn young_pair() {
        assert_eq!(young_phi(0.0), 0.0);
        assert_eq!(young_psi(0.0), 0.0);
        for t in [0.0, 0.3, 1.0, 4.0, 20.0] {
            assert!((young_phi_deriv(young_psi_deriv(t)) - t).abs() < 1e-12 * t.max(1.0));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let a = 5.0 * rng.random::<f64>();
            let b = 5.0 * rng.random::<f64>();
            assert!(a * b <= young_phi(a) + young_psi(b) + 1e-12);
        }
    }

    #[test]
    fn table_is_finite_and_positive() {
        for p in [1.2, 1.5, 2.0, 3.0, 5.0] {
            for row in constants_table(p, 2.0).unwrap() {
                assert!(row.value.is_finite() && row.value > 0.0, "{row:?}");
                assert!(row.est_error.is_finite() && row.est_error >= 0.0);
            }
        }
    }
}
