//! Series, quadrature and root-finding evaluators for the classical special
//! functions: Kummer's `M`, the parabolic cylinder combination `h_p`, their
//! extreme zeros, the weak-type auxiliary function `γ`, its shifted inverse,
//! `I₀`, and the cylinder subordination factor `φ`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use statrs::function::gamma::gamma;

use crate::error::domain;
use crate::quad::{gauss_laguerre, Adaptive};
use crate::{Error, Result};

/// Truncation policy for power series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEval {
    pub max_terms: usize,
    /// Target size of the neglected tail, measured against `max(1, |sum|)`.
    pub abs_tol: f64,
}

impl Default for SeriesEval {
    fn default() -> Self {
        Self {
            max_terms: 500,
            abs_tol: 1e-16,
        }
    }
}

/// A summed series with its bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub terms: usize,
    pub achieved_tol: f64,
}

const KUMMER_Z_MAX: f64 = 200.0;

fn is_nonpositive_integer(a: f64) -> bool {
    a <= 0.0 && a == a.round()
}

/// Kummer's confluent hypergeometric function `M(a, b, z)` by its power series.
pub fn kummer_m(a: f64, b: f64, z: f64, cfg: &SeriesEval) -> Result<f64> {
    kummer_m_eval(a, b, z, cfg).map(|s| s.value)
}

/// As [`kummer_m`], also reporting the number of terms and the tail estimate.
pub fn kummer_m_eval(a: f64, b: f64, z: f64, cfg: &SeriesEval) -> Result<SeriesValue> {
    if is_nonpositive_integer(b) {
        return Err(domain("kummer_m", b, "b not a non-positive integer"));
    }
    let terminating = is_nonpositive_integer(a);
    if !terminating && z.abs() > KUMMER_Z_MAX {
        return Err(domain("kummer_m", z, "|z| <= 200"));
    }
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for k in 0..cfg.max_terms {
        let kf = k as f64;
        term *= (a + kf) * z / ((b + kf) * (kf + 1.0));
        sum += term;
        if term == 0.0 {
            return Ok(SeriesValue {
                value: sum,
                terms: k + 1,
                achieved_tol: 0.0,
            });
        }
        let ratio = ((a + kf + 1.0) * z / ((b + kf + 1.0) * (kf + 2.0))).abs();
        if ratio < 1.0 {
            let tail = term.abs() * ratio / (1.0 - ratio);
            let scale = sum.abs().max(1.0);
            if tail <= cfg.abs_tol * scale {
                return Ok(SeriesValue {
                    value: sum,
                    terms: k + 1,
                    achieved_tol: tail / scale,
                });
            }
        }
    }
    Err(Error::Truncation {
        terms: cfg.max_terms,
        achieved: term.abs() / sum.abs().max(1.0),
    })
}

/// `M_p(x) = M(−p/2, 1/2, x²/2)` for `0 < p ≤ 2`, `x ≥ 0`.
pub fn confluent_mp(p: f64, x: f64) -> Result<f64> {
    check_mp_domain(p, x)?;
    kummer_m(-0.5 * p, 0.5, 0.5 * x * x, &SeriesEval::default())
}

/// Derivative of [`confluent_mp`] in `x`.
pub fn confluent_mp_deriv(p: f64, x: f64) -> Result<f64> {
    check_mp_domain(p, x)?;
    Ok(-p * x * kummer_m(1.0 - 0.5 * p, 1.5, 0.5 * x * x, &SeriesEval::default())?)
}

fn check_mp_domain(p: f64, x: f64) -> Result<()> {
    if !(p > 0.0 && p <= 2.0) {
        return Err(domain("confluent_mp", p, "0 < p <= 2"));
    }
    if !(x >= 0.0) {
        return Err(domain("confluent_mp", x, "x >= 0"));
    }
    Ok(())
}

/// Search interval for a simple root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
}

impl RootBracket {
    pub fn new(lo: f64, hi: f64, tol: f64) -> Result<Self> {
        if !(hi > lo) || !(tol > 0.0) {
            return Err(Error::Invalid(format!(
                "bracket needs hi > lo and tol > 0, got [{lo}, {hi}] tol {tol}"
            )));
        }
        Ok(Self { lo, hi, tol })
    }
}

pub const ROOT_TOL: f64 = 1e-12;
const SCAN_STEP: f64 = 0.1;

/// Bisection on a bracket that must straddle a sign change.
pub fn bisect<F: Fn(f64) -> Result<f64>>(what: &'static str, f: F, bracket: RootBracket) -> Result<f64> {
    let RootBracket { mut lo, mut hi, tol } = bracket;
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Bracket { what, lo, hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Smallest positive zero `ν_p` of `M_p`.
///
/// Without a bracket, scans outward from 0 in steps of 0.1 up to `10√p`.
pub fn nu_p(p: f64, bracket: Option<RootBracket>) -> Result<f64> {
    if !(p > 0.0 && p <= 2.0) {
        return Err(domain("nu_p", p, "0 < p <= 2"));
    }
    let f = |x: f64| confluent_mp(p, x);
    let bracket = match bracket {
        Some(b) => b,
        None => {
            let limit = 10.0 * p.sqrt();
            let mut prev = 0.0;
            let mut found = None;
            let mut i = 1;
            loop {
                let x = i as f64 * SCAN_STEP;
                if x > limit {
                    break;
                }
                let v = f(x)?;
                if v == 0.0 {
                    return Ok(x);
                }
                if v < 0.0 {
                    found = Some(RootBracket::new(prev, x, ROOT_TOL)?);
                    break;
                }
                prev = x;
                i += 1;
            }
            found.ok_or(Error::Bracket {
                what: "nu_p",
                lo: 0.0,
                hi: limit,
            })?
        }
    };
    bisect("nu_p", f, bracket)
}

/// `cos(νπ/2)` and `sin(νπ/2)`, exact when `ν` is an integer.
fn cos_sin_half_pi(nu: f64) -> (f64, f64) {
    let r = (0.5 * nu).rem_euclid(2.0);
    if nu == nu.round() {
        match (2.0 * r).round() as i64 {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        }
    } else {
        ((PI * r).cos(), (PI * r).sin())
    }
}

/// Beyond this argument the two Kummer terms of `h_ν` cancel badly for
/// non-integer `ν` and the integral route takes over.
const H_SERIES_LIMIT: f64 = 5.0;

fn h_series(nu: f64, x: f64) -> Result<f64> {
    let cfg = SeriesEval::default();
    let z = 0.5 * x * x;
    let (c, s) = cos_sin_half_pi(nu);
    let mut h = 0.0;
    if c != 0.0 {
        let c1 = 2f64.powf(0.5 * nu) * gamma(0.5 * (nu + 1.0)) / PI.sqrt();
        h += c * c1 * kummer_m(-0.5 * nu, 0.5, z, &cfg)?;
    }
    if s != 0.0 {
        let c2 = 2f64.powf(0.5 * (nu + 1.0)) * gamma(0.5 * (nu + 2.0)) / PI.sqrt();
        h += s * c2 * x * kummer_m(0.5 * (1.0 - nu), 1.5, z, &cfg)?;
    }
    Ok(h)
}

/// `h_ν(x)` for `ν < 0`, `x > 0` from
/// `h_ν(x) = x^ν / Γ(−ν) ∫₀^∞ w^{−ν−1} exp(−w − w²/(2x²)) dw`.
fn h_negative_order(nu: f64, x: f64) -> Result<f64> {
    let e = -nu - 1.0;
    let c = 0.5 / (x * x);
    let q = Adaptive::new(1e-15, 1e-14);
    let int = q.integrate(|w: f64| w.powf(e) * (-w - c * w * w).exp(), 0.0, 80.0)?;
    Ok(x.powf(nu) / gamma(-nu) * int.value)
}

/// Upward recurrence `h_{ν+1} = x h_ν − ν h_{ν−1}` from two negative orders.
fn h_recurrence(nu: f64, x: f64) -> Result<f64> {
    let steps = nu.ceil() + 1.0;
    let nu0 = nu - steps;
    let mut lower = h_negative_order(nu0 - 1.0, x)?;
    let mut upper = h_negative_order(nu0, x)?;
    let mut order = nu0;
    for _ in 0..steps as usize {
        let next = x * upper - order * lower;
        lower = upper;
        upper = next;
        order += 1.0;
    }
    Ok(upper)
}

/// `h_ν = e^{x²/4} D_ν(x)` for real order `ν > −1`.
pub(crate) fn h_order(nu: f64, x: f64) -> Result<f64> {
    if nu == nu.round() || x <= H_SERIES_LIMIT {
        if nu != nu.round() && 0.5 * x * x > KUMMER_Z_MAX {
            return Err(domain("parabolic_h", x, "|x| <= 20 for x < 0"));
        }
        h_series(nu, x)
    } else {
        h_recurrence(nu, x)
    }
}

/// `h_p(x) = cos(pπ/2)·e^{x²/4}Y₁(x) + sin(pπ/2)·e^{x²/4}Y₂(x)` for `p ≥ 2`,
/// with the Gaussian factors cancelled before evaluation.
pub fn parabolic_h(p: f64, x: f64) -> Result<f64> {
    if !(p >= 2.0) {
        return Err(domain("parabolic_h", p, "p >= 2"));
    }
    h_order(p, x)
}

/// `h_p'(x) = p·h_{p−1}(x)`.
pub fn parabolic_h_deriv(p: f64, x: f64) -> Result<f64> {
    if !(p >= 2.0) {
        return Err(domain("parabolic_h", p, "p >= 2"));
    }
    Ok(p * h_order(p - 1.0, x)?)
}

/// Largest positive zero `μ_p` of `h_p`.
///
/// Without a bracket, scans inward in steps of 0.1 from `2√p + 1`, beyond
/// which `h_p` has no zeros and is positive.
pub fn mu_p(p: f64, bracket: Option<RootBracket>) -> Result<f64> {
    if !(p >= 2.0) {
        return Err(domain("mu_p", p, "p >= 2"));
    }
    let f = |x: f64| parabolic_h(p, x);
    let bracket = match bracket {
        Some(b) => b,
        None => {
            let start = 2.0 * p.sqrt() + 1.0;
            if f(start)? <= 0.0 {
                return Err(Error::Bracket {
                    what: "mu_p",
                    lo: start,
                    hi: start,
                });
            }
            let mut prev = start;
            let mut found = None;
            let mut i = 1;
            loop {
                let x = start - i as f64 * SCAN_STEP;
                if x <= 0.0 {
                    break;
                }
                let v = f(x)?;
                if v == 0.0 {
                    return Ok(x);
                }
                if v < 0.0 {
                    found = Some(RootBracket::new(x, prev, ROOT_TOL)?);
                    break;
                }
                prev = x;
                i += 1;
            }
            found.ok_or(Error::Bracket {
                what: "mu_p",
                lo: 0.0,
                hi: start,
            })?
        }
    };
    bisect("mu_p", f, bracket)
}

/// Modified Bessel function `I₀(z) = Σ (z/2)^{2j}/(j!)²`.
pub fn bessel_i0(z: f64) -> Result<f64> {
    if !(z >= 0.0) {
        return Err(domain("bessel_i0", z, "z >= 0"));
    }
    let q = 0.25 * z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut j = 1.0;
    loop {
        term *= q / (j * j);
        sum += term;
        if term <= 1e-17 * sum {
            return Ok(sum);
        }
        j += 1.0;
    }
}

fn check_gamma_p(p: f64) -> Result<()> {
    if !(p > 1.0 && p < 2.0) {
        return Err(domain("gamma_fn", p, "1 < p < 2"));
    }
    Ok(())
}

/// `γ(0) = p^{−1/(p−1)} Γ(p/(p−1))`.
pub fn gamma_zero(p: f64) -> Result<f64> {
    check_gamma_p(p)?;
    Ok(p.powf(-1.0 / (p - 1.0)) * gamma(p / (p - 1.0)))
}

const LAGUERRE_NODES: usize = 64;

fn laguerre() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_laguerre(LAGUERRE_NODES))
}

/// `γ(t) = exp(p t^{p−1}) ∫_t^∞ exp(−p s^{p−1}) ds` for `1 < p < 2`, `t ≥ 0`.
///
/// The integral is split at `S = max(t, 10)`. The near part uses adaptive
/// Gauss–Kronrod; beyond `S` the substitution `r = p s^{p−1}` turns the tail
/// into a Gauss–Laguerre integral.
pub fn gamma_fn(p: f64, t: f64) -> Result<f64> {
    check_gamma_p(p)?;
    if !(t >= 0.0) {
        return Err(domain("gamma_fn", t, "t >= 0"));
    }
    let pm1 = p - 1.0;
    let rt = p * t.powf(pm1);
    let split = t.max(10.0);
    let near = if split > t {
        Adaptive::new(1e-15, 1e-14)
            .integrate(|s: f64| (rt - p * s.powf(pm1)).exp(), t, split)?
            .value
    } else {
        0.0
    };
    let rs = p * split.powf(pm1);
    let expo = (2.0 - p) / pm1;
    let (x, w) = laguerre();
    let tail: f64 = x.iter().zip(w).map(|(x, w)| w * ((rs + x) / p).powf(expo)).sum::<f64>() / (p * pm1);
    Ok(near + (rt - rs).exp() * tail)
}

/// `γ'(t) = p(p−1)t^{p−2}γ(t) − 1`; infinite at `t = 0`.
pub fn gamma_fn_deriv(p: f64, t: f64) -> Result<f64> {
    let g = gamma_fn(p, t)?;
    if t == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(p * (p - 1.0) * t.powf(p - 2.0) * g - 1.0)
}

/// Inverse `H` of `t ↦ t + γ(t)` on `[γ(0), ∞)`.
pub fn h_inverse(p: f64, s: f64) -> Result<f64> {
    let g0 = gamma_zero(p)?;
    let slack = 1e-12 * g0;
    if !(s >= g0 - slack) {
        return Err(domain("h_inverse", s, "s >= gamma(0)"));
    }
    if s <= g0 {
        return Ok(0.0);
    }
    // Newton in u = t^{p−1}, where d(t + γ)/du = pγ stays bounded and smooth
    let e = 1.0 / (p - 1.0);
    let mut lo = 0.0;
    let mut hi = (s - g0).powf(p - 1.0);
    let mut u = ((s - g0) / (p * g0)).min(hi);
    for _ in 0..200 {
        let t = u.powf(e);
        let g = gamma_fn(p, t)?;
        let f = t + g - s;
        if f.abs() <= 2.0 * f64::EPSILON * s {
            return Ok(t);
        }
        if f > 0.0 {
            hi = u;
        } else {
            lo = u;
        }
        let mut next = u - f / (p * g);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - u).abs() <= 1e-15 * next || hi - lo <= 1e-15 * hi {
            return Ok(next.powf(e));
        }
        u = next;
    }
    Ok((0.5 * (lo + hi)).powf(e))
}

/// Cubic Hermite table for `γ` in the variable `u = t^{p−1}` on `[0, t_max]`;
/// falls back to direct evaluation outside.
#[derive(Debug, Clone)]
pub struct GammaTable {
    p: f64,
    du: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl GammaTable {
    pub fn new(p: f64, t_max: f64, n: usize) -> Result<Self> {
        check_gamma_p(p)?;
        let u_max = t_max.powf(p - 1.0);
        let du = u_max / n as f64;
        let mut values = Vec::with_capacity(n + 1);
        let mut slopes = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let u = i as f64 * du;
            let t = u.powf(1.0 / (p - 1.0));
            let g = gamma_fn(p, t)?;
            values.push(g);
            // dγ/du = pγ − t^{2−p}/(p−1)
            slopes.push(p * g - t.powf(2.0 - p) / (p - 1.0));
        }
        Ok(Self { p, du, values, slopes })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let u = t.max(0.0).powf(self.p - 1.0);
        let x = u / self.du;
        let i = x.floor() as usize;
        if i + 1 >= self.values.len() {
            return gamma_fn(self.p, t).unwrap_or(f64::NAN);
        }
        let s = x - i as f64;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * self.du, self.slopes[i + 1] * self.du);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * m0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * m1
    }
}

/// `φ` in the `t`-parametrization: `∫₀ᵗ I₀(s) ds / (eᵗ − 1)`, with `φ(0) = 1`.
///
/// Callers holding the radial argument `r` use [`phi_cylinder_r`].
pub fn phi_cylinder(n: u32, t: f64) -> Result<f64> {
    if n < 3 {
        return Err(domain("phi_cylinder", n as f64, "n >= 3"));
    }
    if !(t >= 0.0) {
        return Err(domain("phi_cylinder", t, "t >= 0"));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    // ∫₀ᵗ I₀ = Σ t^{2j+1} / (4^j (j!)² (2j+1)), summed against e^{−t}
    let lt = t.ln();
    let mut log_fact = 0.0;
    let mut sum = 0.0;
    let mut j = 0usize;
    loop {
        let jf = j as f64;
        if j > 0 {
            log_fact += jf.ln();
        }
        let log_term = (2.0 * jf + 1.0) * lt - jf * 4f64.ln() - 2.0 * log_fact - (2.0 * jf + 1.0).ln() - t;
        let term = log_term.exp();
        sum += term;
        if jf > t && term <= 1e-17 * sum {
            break;
        }
        j += 1;
    }
    Ok(sum / -(-t).exp_m1())
}

/// `φ(r)` with `r² = e^{−2t/(n−2)}`, i.e. `t = −(n−2) log r`.
pub fn phi_cylinder_r(n: u32, r: f64) -> Result<f64> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(domain("phi_cylinder", r, "0 < r <= 1"));
    }
    phi_cylinder(n, -((n as f64) - 2.0) * r.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::gamma_ur;

    const CFG: SeriesEval = SeriesEval {
        max_terms: 500,
        abs_tol: 1e-16,
    };

    #[test]
    fn kummer_at_zero_is_one() {
        for (a, b) in [(0.3, 1.7), (-2.5, 0.5), (4.0, 3.0)] {
            assert_eq!(kummer_m(a, b, 0.0, &CFG).unwrap(), 1.0);
        }
    }

    #[test]
    fn kummer_with_zero_a_is_one() {
        assert_eq!(kummer_m(0.0, 0.5, 3.7, &CFG).unwrap(), 1.0);
    }

    #[test]
    fn kummer_terminating_matches_polynomial() {
        assert_eq!(kummer_m(-1.0, 0.5, 0.5, &CFG).unwrap(), 0.0);
        // M(−3, b, z) = 1 − 3z/b + 3z²/(b(b+1)) − z³/(b(b+1)(b+2))
        for z in [-3.0, 0.7, 12.0, 350.0] {
            let b = 1.5;
            let direct = 1.0 - 3.0 * z / b + 3.0 * z * z / (b * (b + 1.0)) - z * z * z / (b * (b + 1.0) * (b + 2.0));
            let series = kummer_m(-3.0, b, z, &CFG).unwrap();
            assert!((series - direct).abs() <= 1e-14 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn kummer_equals_exponential_when_a_equals_b() {
        for z in [-1.0, 0.5, 30.0, 150.0] {
            let m = kummer_m(1.3, 1.3, z, &CFG).unwrap();
            assert!((m / f64::exp(z) - 1.0).abs() < 1e-12, "z={z}");
        }
    }

    #[test]
    fn kummer_rejects_bad_arguments() {
        assert!(matches!(kummer_m(0.5, -2.0, 1.0, &CFG), Err(Error::Domain { .. })));
        assert!(matches!(kummer_m(0.5, 1.0, 250.0, &CFG), Err(Error::Domain { .. })));
        let tight = SeriesEval {
            max_terms: 5,
            abs_tol: 1e-16,
        };
        assert!(matches!(
            kummer_m(0.5, 1.0, 20.0, &tight),
            Err(Error::Truncation { .. })
        ));
    }

    #[test]
    fn mp_examples() {
        assert_eq!(confluent_mp(1.3, 0.0).unwrap(), 1.0);
        assert!(confluent_mp(2.0, 1.0).unwrap().abs() < 1e-15);
        assert!((confluent_mp(2.0, 0.5).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn mp_derivative_matches_central_difference() {
        for (p, x) in [(0.5, 0.7), (1.0, 1.2), (1.7, 0.3)] {
            let h = 1e-6;
            let fd = (confluent_mp(p, x + h).unwrap() - confluent_mp(p, x - h).unwrap()) / (2.0 * h);
            assert!((fd - confluent_mp_deriv(p, x).unwrap()).abs() < 1e-8);
        }
    }

    fn bisection_oracle<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid).signum() == f(lo).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn direct_mp(p: f64, x: f64) -> f64 {
        // plain summation with no stopping heuristics
        let (a, b, z) = (-0.5 * p, 0.5, 0.5 * x * x);
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 0..200 {
            let k = k as f64;
            term *= (a + k) * z / ((b + k) * (k + 1.0));
            sum += term;
        }
        sum
    }

    #[test]
    fn nu_examples() {
        assert!((nu_p(2.0, None).unwrap() - 1.0).abs() < 1e-10);
        let nu1 = nu_p(1.0, None).unwrap();
        let oracle = bisection_oracle(|x| direct_mp(1.0, x), 1.0, 2.0);
        assert!(nu1 > 1.0 && nu1 < 2.0);
        assert!((nu1 - oracle).abs() < 1e-11, "{nu1} vs {oracle}");
        // the smallest zero moves outward as p decreases
        let nu_half = nu_p(0.5, None).unwrap();
        let nu_three_halves = nu_p(1.5, None).unwrap();
        assert!(nu_half > nu1 && nu1 > nu_three_halves && nu_three_halves > 1.0);
        assert!(confluent_mp(1.0, nu1).unwrap().abs() < 1e-11);
    }

    #[test]
    fn nu_has_no_earlier_sign_change() {
        for p in [0.3, 1.0, 1.5, 1.9] {
            let nu = nu_p(p, None).unwrap();
            for i in 0..1000 {
                let x = nu * i as f64 / 1000.0;
                assert!(confluent_mp(p, x).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn nu_with_explicit_bracket() {
        let b = RootBracket::new(0.5, 1.5, 1e-13).unwrap();
        assert!((nu_p(2.0, Some(b)).unwrap() - 1.0).abs() < 1e-12);
        let bad = RootBracket::new(0.1, 0.5, 1e-13).unwrap();
        assert!(matches!(nu_p(2.0, Some(bad)), Err(Error::Bracket { .. })));
        assert!(RootBracket::new(1.0, 1.0, 1e-3).is_err());
    }

    #[test]
    fn h_two_is_hermite_polynomial() {
        for (x, v) in [(0.0, -1.0), (1.0, 0.0), (2.0, 3.0), (7.5, 55.25)] {
            assert!((parabolic_h(2.0, x).unwrap() - v).abs() < 1e-12);
        }
    }

    #[test]
    fn integer_orders_are_hermite_polynomials() {
        let he3 = |x: f64| x * x * x - 3.0 * x;
        let he4 = |x: f64| x.powi(4) - 6.0 * x * x + 3.0;
        let he5 = |x: f64| x.powi(5) - 10.0 * x.powi(3) + 15.0 * x;
        for x in [-2.0, 0.3, 1.7, 6.0, 15.0] {
            for (p, f) in [(3.0, &he3 as &dyn Fn(f64) -> f64), (4.0, &he4), (5.0, &he5)] {
                let h = parabolic_h(p, x).unwrap();
                assert!((h - f(x)).abs() <= 1e-12 * f(x).abs().max(1.0), "p={p} x={x}");
            }
        }
    }

    #[test]
    fn h_at_origin() {
        for p in [2.0, 2.5, 3.3, 4.0] {
            let expected = (0.5 * p * PI).cos() * 2f64.powf(0.5 * p) * gamma(0.5 * (p + 1.0)) / PI.sqrt();
            let (c, _) = cos_sin_half_pi(p);
            let expected = if c == 0.0 { 0.0 } else { expected };
            assert!((parabolic_h(p, 0.0).unwrap() - expected).abs() < 1e-13);
        }
    }

    #[test]
    fn series_and_integral_routes_agree() {
        for nu in [1.3, 2.5, 3.7, 4.2] {
            for x in [3.0, 4.0, 5.0] {
                let a = h_series(nu, x).unwrap();
                let b = h_recurrence(nu, x).unwrap();
                assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0), "nu={nu} x={x}: {a} {b}");
            }
        }
    }

    #[test]
    fn h_solves_its_ode() {
        // h'' − x h' + p h = 0
        for p in [2.5, 3.5] {
            for x in [1.0, 4.0, 6.0, 12.0] {
                let d = 1e-3;
                let f = |x| parabolic_h(p, x).unwrap();
                let d1 = parabolic_h_deriv(p, x).unwrap();
                let d2 = (f(x + d) - 2.0 * f(x) + f(x - d)) / (d * d);
                let scale = f(x).abs().max(1.0) * p;
                assert!((d2 - x * d1 + p * f(x)).abs() < 1e-5 * scale, "p={p} x={x}");
            }
        }
    }

    #[test]
    fn mu_examples() {
        assert!((mu_p(2.0, None).unwrap() - 1.0).abs() < 1e-10);
        let mu3 = mu_p(3.0, None).unwrap();
        assert!((mu3 - 3f64.sqrt()).abs() < 1e-11);
        assert!(mu3 > 2f64.sqrt() && mu3 < 2.0 * 3f64.sqrt());
        assert!(mu3 * mu3 >= 2.0);
        let mu5 = mu_p(5.0, None).unwrap();
        assert!((mu5 - (5.0 + 10f64.sqrt()).sqrt()).abs() < 1e-11);
        assert!((mu_p(2.0, None).unwrap() - nu_p(2.0, None).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn h_positive_beyond_mu() {
        for p in [2.0, 2.5, 3.0, 4.5] {
            let mu = mu_p(p, None).unwrap();
            for i in 1..=200 {
                let x = mu + i as f64 * (2.0 * p.sqrt() + 1.0 - mu) / 200.0;
                assert!(parabolic_h(p, x).unwrap() > 0.0);
            }
            assert!(parabolic_h_deriv(p, mu).unwrap() > 0.0);
        }
    }

    #[test]
    fn i0_examples() {
        assert_eq!(bessel_i0(0.0).unwrap(), 1.0);
        let mut direct = 0.0;
        let mut fact = 1.0;
        for j in 0..30 {
            if j > 0 {
                fact *= j as f64;
            }
            direct += 1.0 / (fact * fact);
        }
        assert!((bessel_i0(2.0).unwrap() - direct).abs() < 1e-14);
        assert!((direct - 2.279_585_302_336_067).abs() < 1e-14);
        assert!(bessel_i0(1.0).unwrap() < bessel_i0(2.0).unwrap());
    }

    fn gamma_oracle(p: f64, t: f64) -> f64 {
        // a p^{−a} e^{r} Γ(a, r) with a = 1/(p−1), r = p t^{p−1}
        let a = 1.0 / (p - 1.0);
        let r = p * t.powf(p - 1.0);
        a * p.powf(-a) * r.exp() * gamma_ur(a, r) * gamma(a)
    }

    #[test]
    fn gamma_matches_incomplete_gamma_oracle() {
        for p in [1.1, 1.3, 1.5, 1.8, 1.95] {
            for t in [0.01, 0.5, 1.0, 3.0, 9.0, 10.0, 25.0, 100.0] {
                let g = gamma_fn(p, t).unwrap();
                let o = gamma_oracle(p, t);
                assert!((g - o).abs() < 1e-10 * o, "p={p} t={t}: {g} vs {o}");
            }
        }
    }

    #[test]
    fn gamma_zero_closed_form() {
        assert!((gamma_fn(1.5, 0.0).unwrap() - 8.0 / 9.0).abs() < 1e-13);
        for p in [1.2, 1.7] {
            assert!((gamma_fn(p, 0.0).unwrap() - gamma_zero(p).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn gamma_ode_residual() {
        for p in [1.2, 1.5, 1.8] {
            for t in [0.5, 1.0, 2.0] {
                let h = 1e-5;
                let d = (gamma_fn(p, t + h).unwrap() - gamma_fn(p, t - h).unwrap()) / (2.0 * h);
                let r = 1.0 + d - p * (p - 1.0) * t.powf(p - 2.0) * gamma_fn(p, t).unwrap();
                assert!(r.abs() < 1e-6, "p={p} t={t}: {r}");
            }
        }
    }

    #[test]
    fn gamma_concave_nondecreasing() {
        for p in [1.2, 1.5, 1.8] {
            let n = 1000;
            let v: Vec<f64> = (0..=n)
                .map(|i| gamma_fn(p, 10.0 * i as f64 / n as f64).unwrap())
                .collect();
            for i in 1..n {
                assert!(v[i + 1] - 2.0 * v[i] + v[i - 1] <= 1e-8);
                assert!(v[i] - v[i - 1] >= -1e-10);
            }
        }
    }

    fn central_slope(p: f64, t: f64) -> f64 {
        let h = 1e-3;
        (gamma_fn(p, t + h).unwrap() - gamma_fn(p, t - h).unwrap()) / (2.0 * h)
    }

    #[test]
    fn gamma_slope_vanishes_at_infinity() {
        assert!(central_slope(1.95, 50.0) < 1e-3);
        for p in [1.2, 1.5, 1.8] {
            let slopes: Vec<f64> = [1.0, 10.0, 50.0, 500.0, 5000.0]
                .iter()
                .map(|&t| central_slope(p, t))
                .collect();
            assert!(slopes.windows(2).all(|w| w[1] < w[0] && w[1] > 0.0), "{slopes:?}");
            // γ(t) ~ t^{2−p}/(p(p−1)) so γ'(t) ~ (2−p)t^{1−p}/(p(p−1))
            let t = 5000.0f64;
            let asym = (2.0 - p) * t.powf(1.0 - p) / (p * (p - 1.0));
            if p >= 1.5 {
                assert!((slopes[4] / asym - 1.0).abs() < 0.05, "p={p}");
            }
        }
    }

    #[test]
    fn h_inverse_round_trips() {
        for p in [1.2, 1.5, 1.8] {
            let g0 = gamma_zero(p).unwrap();
            assert_eq!(h_inverse(p, g0).unwrap(), 0.0);
            for i in 0..=50 {
                let t = 10.0 * i as f64 / 50.0;
                let s = t + gamma_fn(p, t).unwrap();
                assert!((h_inverse(p, s).unwrap() - t).abs() < 1e-8, "p={p} t={t}");
            }
            assert!(h_inverse(p, 0.5 * g0).is_err());
        }
    }

    #[test]
    fn h_inverse_at_one_matches_bisection() {
        let p = 1.5;
        let s = 1.0 + gamma_fn(p, 1.0).unwrap();
        let oracle = bisection_oracle(|t| t + gamma_oracle(p, t) - s, 1e-9, s);
        assert!((h_inverse(p, s).unwrap() - oracle).abs() < 1e-10);
        assert!((oracle - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gamma_table_tracks_direct_values() {
        let table = GammaTable::new(1.5, 20.0, 2048).unwrap();
        for i in 0..=400 {
            let t = 25.0 * i as f64 / 400.0;
            let d = gamma_fn(1.5, t).unwrap();
            assert!((table.eval(t) - d).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_cylinder(3, 0.0).unwrap(), 1.0);
        assert!((phi_cylinder(3, 1e-9).unwrap() - 1.0).abs() < 1e-8);
        // ∫₀¹ I₀ by Gauss–Kronrod on the Bessel series
        let int = Adaptive::default()
            .integrate(|s| bessel_i0(s).unwrap(), 0.0, 1.0)
            .unwrap()
            .value;
        let expected = int / (1f64.exp() - 1.0);
        assert!((phi_cylinder(3, 1.0).unwrap() - expected).abs() < 1e-13);
        assert!((int - 1.086_521_097_023_589_5).abs() < 1e-12);
    }

    #[test]
    fn phi_in_unit_interval() {
        for i in 0..=2000 {
            let t = 20.0 * i as f64 / 2000.0;
            let v = phi_cylinder(3, t).unwrap();
            assert!(v > 0.0 && v <= 1.0, "t={t}: {v}");
        }
        assert!(phi_cylinder(3, 800.0).unwrap().is_finite());
    }

    #[test]
    fn phi_radial_parametrization() {
        let r = 0.6f64;
        let t = -(4.0 - 2.0) * r.ln();
        assert_eq!(phi_cylinder_r(4, r).unwrap(), phi_cylinder(4, t).unwrap());
    }
}
