//! Burkholder-type special functions and scanners for the properties the
//! sharp inequalities rest on: majorization, C¹ gluing across region
//! boundaries, the quadratic-form concavity bound, radial monotonicity, and
//! the heat-type inequality for the Davis functions.
//!
//! Every function is bi-radial, so evaluation reduces to `(|x|, |y|)` (or
//! `(|x|, t)` for the Davis functions) right away.

use rayon::prelude::*;
use serde::Serialize;

use crate::constants::young_psi;
use crate::error::domain;
use crate::lowdisc::Halton;
use crate::quad::Adaptive;
use crate::specfun::{
    confluent_mp, confluent_mp_deriv, gamma_zero, h_inverse, mu_p, nu_p, parabolic_h, parabolic_h_deriv,
};
use crate::{Error, Result};

/// A pair `(x, y)` of vectors of equal dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairPoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

impl PairPoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.is_empty() {
            return Err(Error::Invalid(format!(
                "pair dimensions {} and {} must match and be positive",
                x.len(),
                y.len()
            )));
        }
        Ok(Self { x, y })
    }

    /// One-dimensional point with `x = a`, `y = b`.
    pub fn scalar(a: f64, b: f64) -> Self {
        Self { x: vec![a], y: vec![b] }
    }

    pub fn norms(&self) -> (f64, f64) {
        (norm(&self.x), norm(&self.y))
    }
}

/// A space-time point `(x, t)` with `t ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DavisPoint {
    pub x: Vec<f64>,
    pub t: f64,
}

impl DavisPoint {
    pub fn new(x: Vec<f64>, t: f64) -> Result<Self> {
        if !(t >= 0.0) {
            return Err(domain("davis point", t, "t >= 0"));
        }
        Ok(Self { x, t })
    }
}

fn u_r_radial(r: f64, a: f64, b: f64) -> f64 {
    if a + b <= r {
        (b * b - a * a) / (r * r)
    } else {
        1.0 - 2.0 * a / r
    }
}

/// `u_r(x, y)`: `r^{−2}(|y|² − |x|²)` on `|x| + |y| ≤ r`, `1 − 2|x|/r` outside.
pub fn u_r(r: f64, pt: &PairPoint) -> Result<f64> {
    if !(r > 0.0) {
        return Err(domain("u_r", r, "r > 0"));
    }
    let (a, b) = pt.norms();
    Ok(u_r_radial(r, a, b))
}

/// `u_1 = u_r` with `r = 1`.
pub fn u_one(pt: &PairPoint) -> f64 {
    let (a, b) = pt.norms();
    u_r_radial(1.0, a, b)
}

/// `u_∞(x, y)`: 0 on `|x| + |y| ≤ 1`, `(|y| − 1)² − |x|²` outside.
pub fn u_infty(pt: &PairPoint) -> f64 {
    let (a, b) = pt.norms();
    if a + b <= 1.0 {
        0.0
    } else {
        (b - 1.0) * (b - 1.0) - a * a
    }
}

fn check_lt2(what: &'static str, p: f64) -> Result<()> {
    if !(p > 1.0 && p < 2.0) {
        return Err(domain(what, p, "1 < p < 2"));
    }
    Ok(())
}

fn burk_lt2_radial(p: f64, a: f64, b: f64) -> f64 {
    p.powf(2.0 - p) * (b - a / (p - 1.0)) * (a + b).powf(p - 1.0)
}

/// Burkholder's function for `1 < p < 2`:
/// `p^{2−p}(|y| − |x|/(p−1))(|x| + |y|)^{p−1}`.
pub fn burkholder_u_lt2(p: f64, pt: &PairPoint) -> Result<f64> {
    check_lt2("burkholder_U_lt2", p)?;
    let (a, b) = pt.norms();
    Ok(burk_lt2_radial(p, a, b))
}

/// The same function from its layer-cake form
/// `p^{3−p}(2−p)/2 · ∫₀^∞ r^{p−1} u_r(x, y) dr`, by quadrature.
pub fn burkholder_u_lt2_integral(p: f64, pt: &PairPoint) -> Result<f64> {
    check_lt2("burkholder_U_lt2", p)?;
    let (a, b) = pt.norms();
    let s = a + b;
    if s == 0.0 {
        return Ok(0.0);
    }
    let q = Adaptive::new(1e-14, 1e-13);
    let f = |r: f64| r.powf(p - 1.0) * u_r_radial(r, a, b);
    let inner = q.integrate(f, 0.0, s)?.value;
    let outer = q.integrate_to_inf(f, s)?.value;
    Ok(p.powf(3.0 - p) * (2.0 - p) / 2.0 * (inner + outer))
}

fn burk_ge2_radial(p: f64, a: f64, b: f64) -> f64 {
    if b >= (p - 1.0) * a {
        p * (1.0 - 1.0 / p).powf(p - 1.0) * (b - (p - 1.0) * a) * (a + b).powf(p - 1.0)
    } else {
        b.powf(p) - (p - 1.0).powf(p) * a.powf(p)
    }
}

fn check_ge2(what: &'static str, p: f64) -> Result<()> {
    if !(p >= 2.0) || !p.is_finite() {
        return Err(domain(what, p, "p >= 2"));
    }
    Ok(())
}

/// Modified Burkholder function for `p ≥ 2`, equal to `|y|^p − (p−1)^p|x|^p`
/// on `|y| < (p−1)|x|`.
pub fn burkholder_u_ge2(p: f64, pt: &PairPoint) -> Result<f64> {
    check_ge2("burkholder_U_ge2", p)?;
    let (a, b) = pt.norms();
    Ok(burk_ge2_radial(p, a, b))
}

/// The coefficient `c_p(x, y)` on the right of the quadratic-form bound.
pub fn quadratic_form_coefficient(p: f64, pt: &PairPoint) -> Result<f64> {
    check_ge2("burkholder_U_ge2", p)?;
    let (a, b) = pt.norms();
    Ok(if b > (p - 1.0) * a {
        p * (p - 1.0) * (a + b).powf(p - 2.0)
    } else {
        p * (p - 1.0).powf(p) * a.powf(p - 2.0)
    })
}

fn check_k(k: f64) -> Result<()> {
    if !(k > 1.0) || !k.is_finite() {
        return Err(domain("log_U", k, "K > 1"));
    }
    Ok(())
}

fn log_u_radial(k: f64, a: f64, b: f64) -> f64 {
    if a + b <= 1.0 / (k - 1.0) {
        0.5 * (k - 1.0) * (b * b - a * a) + 0.5 / (k - 1.0)
    } else {
        k * b + (k - 1.0) * (a + 1.0) - k - k * (a + 1.0) * ((k - 1.0) / k * (a + b + 1.0)).ln()
    }
}

/// Special function of the `L log L` inequality with constant `K > 1`.
pub fn log_u(k: f64, pt: &PairPoint) -> Result<f64> {
    check_k(k)?;
    let (a, b) = pt.norms();
    Ok(log_u_radial(k, a, b))
}

/// Weak-type special function for `1 < p < 2`, with `γ(0)` cached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakLt2 {
    p: f64,
    g0: f64,
}

impl WeakLt2 {
    pub fn new(p: f64) -> Result<Self> {
        check_lt2("weak_U_lt2", p)?;
        Ok(Self { p, g0: gamma_zero(p)? })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn gamma0(&self) -> f64 {
        self.g0
    }

    fn eval_radial(&self, a: f64, b: f64) -> Result<f64> {
        let (p, g0) = (self.p, self.g0);
        let s = a + b;
        if s <= g0 {
            Ok((b * b - a * a) / (2.0 * g0) + 0.5 * g0)
        } else {
            let h = h_inverse(p, s)?;
            Ok(b - h.powf(p) - p * h.powf(p - 1.0) * (a - h))
        }
    }
}

/// Weak-type special function for `1 < p < 2`; region split at `|x| + |y| = γ(0)`.
pub fn weak_u_lt2(p: f64, pt: &PairPoint) -> Result<f64> {
    let (a, b) = pt.norms();
    WeakLt2::new(p)?.eval_radial(a, b)
}

fn check_gt2(p: f64) -> Result<()> {
    if !(p > 2.0) || !p.is_finite() {
        return Err(domain("weak_U_gt2", p, "p > 2"));
    }
    Ok(())
}

fn weak_gt2_radial(p: f64, a: f64, b: f64) -> f64 {
    if a + b <= 1.0 - 1.0 / p {
        0.5 * (p / (p - 1.0)).powf(p - 1.0) * (b - (p - 1.0) * a) * (a + b).powf(p - 1.0)
    } else {
        p * p / 4.0 * (b * b - a * a - 2.0 * (p - 2.0) * b / p + (p - 1.0) * (p - 1.0) * (p - 2.0) / (p * p * p))
    }
}

/// Weak-type special function for `p > 2`; region split at `|x| + |y| = 1 − 1/p`.
pub fn weak_u_gt2(p: f64, pt: &PairPoint) -> Result<f64> {
    check_gt2(p)?;
    let (a, b) = pt.norms();
    Ok(weak_gt2_radial(p, a, b))
}

/// Davis-type function `U_p(x, t)` with its root and normalizing slope cached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DavisU {
    p: f64,
    root: f64,
    slope: f64,
}

impl DavisU {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(domain("davis_U", p, "p > 0"));
        }
        if p <= 2.0 {
            let root = nu_p(p, None)?;
            Ok(Self {
                p,
                root,
                slope: confluent_mp_deriv(p, root)?,
            })
        } else {
            let root = mu_p(p, None)?;
            Ok(Self {
                p,
                root,
                slope: parabolic_h_deriv(p, root)?,
            })
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `D_p`, the root the function is glued at.
    pub fn root(&self) -> f64 {
        self.root
    }

    fn eval_radial(&self, a: f64, t: f64) -> Result<f64> {
        let (p, d) = (self.p, self.root);
        let outer = a.powf(p) - d.powf(p) * t.powf(0.5 * p);
        let st = t.sqrt();
        if p <= 2.0 {
            if a >= d * st {
                Ok(outer)
            } else {
                let m = confluent_mp(p, a / st)?;
                Ok(p * d.powf(p - 1.0) * t.powf(0.5 * p) * m / self.slope)
            }
        } else if a < d * st {
            Ok(outer)
        } else if t == 0.0 {
            // limit of t^{p/2} h_p(a/√t) as t → 0 is a^p (h_p has leading term x^p)
            Ok(p * d.powf(p - 1.0) * a.powf(p) / self.slope)
        } else {
            let h = parabolic_h(p, a / st)?;
            Ok(p * d.powf(p - 1.0) * t.powf(0.5 * p) * h / self.slope)
        }
    }
}

/// Davis-type function `U_p(x, t)` for `p > 0`.
pub fn davis_u(p: f64, pt: &DavisPoint) -> Result<f64> {
    DavisU::new(p)?.eval_radial(norm(&pt.x), pt.t)
}

/// A special function with its parameters, as scanned by the verifiers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpecialFn {
    BurkholderLt2 { p: f64 },
    BurkholderGe2 { p: f64 },
    LogU { k: f64 },
    WeakLt2(WeakLt2),
    WeakGt2 { p: f64 },
    Davis(DavisU),
}

impl SpecialFn {
    pub fn burkholder_lt2(p: f64) -> Result<Self> {
        check_lt2("burkholder_U_lt2", p)?;
        Ok(Self::BurkholderLt2 { p })
    }
    pub fn burkholder_ge2(p: f64) -> Result<Self> {
        check_ge2("burkholder_U_ge2", p)?;
        Ok(Self::BurkholderGe2 { p })
    }
    pub fn log_u(k: f64) -> Result<Self> {
        check_k(k)?;
        Ok(Self::LogU { k })
    }
    pub fn weak_lt2(p: f64) -> Result<Self> {
        Ok(Self::WeakLt2(WeakLt2::new(p)?))
    }
    pub fn weak_gt2(p: f64) -> Result<Self> {
        check_gt2(p)?;
        Ok(Self::WeakGt2 { p })
    }
    pub fn davis(p: f64) -> Result<Self> {
        Ok(Self::Davis(DavisU::new(p)?))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::BurkholderLt2 { .. } => "burkholder_U_lt2",
            Self::BurkholderGe2 { .. } => "burkholder_U_ge2",
            Self::LogU { .. } => "log_U",
            Self::WeakLt2(_) => "weak_U_lt2",
            Self::WeakGt2 { .. } => "weak_U_gt2",
            Self::Davis(_) => "davis_U",
        }
    }

    /// The parameter `p` or `K`.
    pub fn parameter(&self) -> f64 {
        match *self {
            Self::BurkholderLt2 { p } | Self::BurkholderGe2 { p } | Self::WeakGt2 { p } => p,
            Self::LogU { k } => k,
            Self::WeakLt2(w) => w.p,
            Self::Davis(d) => d.p,
        }
    }

    /// Scan radius that reaches past every region boundary: 10, or `1.5 γ(0)`
    /// for the weak-type function when that is larger.
    pub fn natural_radius(&self) -> f64 {
        match self {
            Self::WeakLt2(w) => (1.5 * w.g0).max(10.0),
            _ => 10.0,
        }
    }

    /// Value at radial coordinates: `(|x|, |y|)`, or `(|x|, t)` for Davis.
    pub fn eval_radial(&self, a: f64, b: f64) -> Result<f64> {
        match *self {
            Self::BurkholderLt2 { p } => Ok(burk_lt2_radial(p, a, b)),
            Self::BurkholderGe2 { p } => Ok(burk_ge2_radial(p, a, b)),
            Self::LogU { k } => Ok(log_u_radial(k, a, b)),
            Self::WeakLt2(w) => w.eval_radial(a, b),
            Self::WeakGt2 { p } => Ok(weak_gt2_radial(p, a, b)),
            Self::Davis(d) => d.eval_radial(a, b),
        }
    }

    /// Value at vector arguments; the second slot is `y` (or the single entry `t`).
    pub fn eval_vec(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        match self {
            Self::Davis(_) => self.eval_radial(norm(x), y[0]),
            _ => self.eval_radial(norm(x), norm(y)),
        }
    }

    /// The region boundaries as curves in the radial plane, parametrized by
    /// `s ∈ [0, 1]` over the scanned box of half-width `radius`.
    fn interfaces(&self, radius: f64) -> Vec<Interface> {
        match *self {
            Self::BurkholderLt2 { .. } => vec![],
            Self::BurkholderGe2 { p } => vec![Interface::Ray {
                slope: p - 1.0,
                length: radius,
            }],
            Self::LogU { k } => vec![Interface::Diagonal { level: 1.0 / (k - 1.0) }],
            Self::WeakLt2(w) => vec![Interface::Diagonal { level: w.g0 }],
            Self::WeakGt2 { p } => vec![Interface::Diagonal { level: 1.0 - 1.0 / p }],
            Self::Davis(d) => vec![Interface::Parabola {
                root: d.root,
                t_max: radius,
            }],
        }
    }
}

/// A region boundary in the radial plane.
#[derive(Debug, Clone, Copy)]
enum Interface {
    /// `b = slope·a`, for `a ∈ (0, length]`.
    Ray { slope: f64, length: f64 },
    /// `a + b = level` with `a, b > 0`.
    Diagonal { level: f64 },
    /// `a = root·√t`, for `t ∈ (0, t_max]`.
    Parabola { root: f64, t_max: f64 },
}

impl Interface {
    /// Point on the curve and the unit normal pointing into the region
    /// where the first coordinate grows.
    fn point_and_normal(&self, s: f64) -> ((f64, f64), (f64, f64)) {
        let s = 0.02 + 0.96 * s;
        match *self {
            Interface::Ray { slope, length } => {
                let a = s * length;
                let n = (1.0 + slope * slope).sqrt();
                ((a, slope * a), (slope / n, -1.0 / n))
            }
            Interface::Diagonal { level } => {
                let a = s * level;
                let r = std::f64::consts::FRAC_1_SQRT_2;
                ((a, level - a), (r, r))
            }
            Interface::Parabola { root, t_max } => {
                let t = s * t_max;
                let a = root * t.sqrt();
                // gradient of a − root√t is (1, −root/(2√t))
                let gx = 1.0;
                let gt = -root / (2.0 * t.sqrt());
                let n = (gx * gx + gt * gt).sqrt();
                ((a, t), (gx / n, gt / n))
            }
        }
    }
}

/// Which majorant a scan compares against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Lemma {
    /// `max{|y|, 1/(2(K−1))} − KΨ(|x|)`.
    Maj1 { k: f64 },
    /// `max{|y|, γ(0)/2} − |x|^p`.
    Maj2 { p: f64 },
    /// `p max{|y| − 1 + 1/p, 0} − (p^{p−1}/2)|x|^p`.
    Maj3 { p: f64 },
    /// `|y|^p − (p*−1)^p|x|^p` for the Burkholder functions.
    Burkholder { p: f64 },
    /// `|x|^p − D_p^p t^{p/2}`.
    Davis { p: f64 },
}

impl Lemma {
    pub fn name(&self) -> &'static str {
        match self {
            Lemma::Maj1 { .. } => "maj1",
            Lemma::Maj2 { .. } => "maj2",
            Lemma::Maj3 { .. } => "maj3",
            Lemma::Burkholder { .. } => "burkholder",
            Lemma::Davis { .. } => "davis",
        }
    }

    /// The lemma that belongs to `f`.
    pub fn matching(f: &SpecialFn) -> Lemma {
        match *f {
            SpecialFn::BurkholderLt2 { p } | SpecialFn::BurkholderGe2 { p } => Lemma::Burkholder { p },
            SpecialFn::LogU { k } => Lemma::Maj1 { k },
            SpecialFn::WeakLt2(w) => Lemma::Maj2 { p: w.p },
            SpecialFn::WeakGt2 { p } => Lemma::Maj3 { p },
            SpecialFn::Davis(d) => Lemma::Davis { p: d.p },
        }
    }

    fn majorant(&self, a: f64, b: f64, d_p: f64, g0: f64) -> f64 {
        match *self {
            Lemma::Maj1 { k } => b.max(0.5 / (k - 1.0)) - k * young_psi(a),
            Lemma::Maj2 { p } => b.max(0.5 * g0) - a.powf(p),
            Lemma::Maj3 { p } => p * (b - 1.0 + 1.0 / p).max(0.0) - 0.5 * p.powf(p - 1.0) * a.powf(p),
            Lemma::Burkholder { p } => {
                let c = if p < 2.0 { 1.0 / (p - 1.0) } else { p - 1.0 };
                b.powf(p) - c.powf(p) * a.powf(p)
            }
            Lemma::Davis { p } => a.powf(p) - d_p.powf(p) * b.powf(0.5 * p),
        }
    }
}

/// Location of the worst point found by a scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ScanPoint {
    Pair(PairPoint),
    Davis(DavisPoint),
}

/// Outcome of a property scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridScanReport {
    pub check: String,
    pub function: String,
    pub parameter: f64,
    pub n_points: usize,
    pub excluded: usize,
    pub worst_violation: f64,
    pub worst_point: ScanPoint,
    pub tolerance: f64,
    pub pass: bool,
}

/// Settings shared by the scanners.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub n_points: usize,
    pub seed: u64,
    /// Half-width of the scanned box in each radial coordinate.
    pub radius: f64,
    pub first_step: f64,
    pub second_step: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            n_points: 100_000,
            seed: 0,
            radius: 10.0,
            first_step: 1e-5,
            second_step: 1e-4,
        }
    }
}

fn unit_vector(dim: usize, angle: f64) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[0] = angle.cos();
    if dim > 1 {
        v[1] = angle.sin();
    }
    v
}

fn scan_point(f: &SpecialFn, x: Vec<f64>, second: f64, y: Vec<f64>) -> ScanPoint {
    match f {
        SpecialFn::Davis(_) => ScanPoint::Davis(DavisPoint { x, t: second }),
        _ => ScanPoint::Pair(PairPoint { x, y }),
    }
}

/// `(violation, index)` pairs reduced to the largest violation, ties to the
/// smallest index, so the outcome does not depend on scheduling.
fn worst<I: ParallelIterator<Item = Result<Option<(f64, usize)>>>>(it: I) -> Result<(Option<(f64, usize)>, usize)> {
    let items: Vec<Option<(f64, usize)>> = it.collect::<Result<Vec<_>>>()?;
    let excluded = items.iter().filter(|v| v.is_none()).count();
    let best = items
        .into_iter()
        .flatten()
        .fold(None, |acc: Option<(f64, usize)>, v| match acc {
            None => Some(v),
            Some(a) if v.0 > a.0 || (v.0 == a.0 && v.1 < a.1) => Some(v),
            Some(a) => Some(a),
        });
    Ok((best, excluded))
}

/// Scans `majorant − U` over low-discrepancy points; passes iff the worst
/// value is at most `1e−9`.
///
/// Fails with [`Error::Invalid`] unless `lemma` is the one that belongs to `f`;
/// [`scan_majorization_unchecked`] skips that guard.
pub fn scan_majorization(f: &SpecialFn, lemma: Lemma, cfg: &ScanConfig) -> Result<GridScanReport> {
    if Lemma::matching(f) != lemma {
        return Err(Error::Invalid(format!(
            "lemma {} does not belong to {}",
            lemma.name(),
            f.name()
        )));
    }
    scan_majorization_unchecked(f, lemma, cfg)
}

/// [`scan_majorization`] without the lemma/function pairing guard.
pub fn scan_majorization_unchecked(f: &SpecialFn, lemma: Lemma, cfg: &ScanConfig) -> Result<GridScanReport> {
    const TOL: f64 = 1e-9;
    let halton = Halton::new(4, cfg.seed);
    let d_p = match lemma {
        Lemma::Davis { p } => match f {
            SpecialFn::Davis(d) if d.p == p => d.root,
            _ => DavisU::new(p)?.root,
        },
        _ => 0.0,
    };
    let g0 = match lemma {
        Lemma::Maj2 { p } => gamma_zero(p)?,
        _ => 0.0,
    };
    let is_davis = matches!(f, SpecialFn::Davis(_));
    let build = |i: usize| {
        let u = halton.point(i as u64);
        let a = cfg.radius * u[0];
        // Davis points are uniform in (|x|, √t)
        let b = if is_davis {
            (cfg.radius * u[1]).powi(2)
        } else {
            cfg.radius * u[1]
        };
        let x: Vec<f64> = unit_vector(2, std::f64::consts::TAU * u[2])
            .into_iter()
            .map(|c| a * c)
            .collect();
        let y: Vec<f64> = if is_davis {
            vec![b]
        } else {
            unit_vector(2, std::f64::consts::TAU * u[3])
                .into_iter()
                .map(|c| b * c)
                .collect()
        };
        (x, y)
    };
    let (best, _) = worst((0..cfg.n_points).into_par_iter().map(|i| {
        let (x, y) = build(i);
        let value = f.eval_vec(&x, &y)?;
        let (a, b) = if is_davis {
            (norm(&x), y[0])
        } else {
            (norm(&x), norm(&y))
        };
        Ok(Some((lemma.majorant(a, b, d_p, g0) - value, i)))
    }))?;
    let (violation, idx) = best.unwrap_or((f64::NEG_INFINITY, 0));
    let (x, y) = build(idx);
    let second = y[0];
    Ok(GridScanReport {
        check: format!("majorization_{}", lemma.name()),
        function: f.name().to_string(),
        parameter: f.parameter(),
        n_points: cfg.n_points,
        excluded: 0,
        worst_violation: violation,
        worst_point: scan_point(f, x, second, y),
        tolerance: TOL,
        pass: violation <= TOL,
    })
}

/// Gradient jump across every region boundary of `f`, from one-sided
/// second-order differences along the normal with step `cfg.first_step`;
/// also checks the value jump. Jumps are measured relative to
/// `max(1, |∇U|)` and to the local magnitude `max(1, |U|, |∇U|·r)`; passes iff
/// they are below `1e−4` and `1e−10`.
pub fn scan_interfaces(f: &SpecialFn, n_points: usize, cfg: &ScanConfig) -> Result<GridScanReport> {
    const TOL: f64 = 1e-4;
    const VALUE_TOL: f64 = 1e-10;
    let h = cfg.first_step;
    let interfaces = f.interfaces(cfg.radius);
    let mut worst_grad: f64 = 0.0;
    let mut worst_value: f64 = 0.0;
    let mut worst_at = (0.0, 0.0);
    for iface in &interfaces {
        let rows: Vec<(f64, f64, (f64, f64))> = (0..n_points)
            .into_par_iter()
            .map(|i| {
                let s = (i as f64 + 0.5) / n_points as f64;
                let ((a, b), (na, nb)) = iface.point_and_normal(s);
                let at = |d: f64| f.eval_radial(a + d * na, b + d * nb);
                let plus = (-3.0 * at(1e-13)? + 4.0 * at(h)? - at(2.0 * h)?) / (2.0 * h);
                let minus = (3.0 * at(-1e-13)? - 4.0 * at(-h)? + at(-2.0 * h)?) / (2.0 * h);
                let grad = plus.abs().max(minus.abs());
                let magnitude = at(0.0)?.abs().max(grad * a.hypot(b)).max(1.0);
                let value_jump = (at(1e-13)? - at(-1e-13)?).abs() / magnitude;
                Ok(((plus - minus).abs() / grad.max(1.0), value_jump, (a, b)))
            })
            .collect::<Result<Vec<_>>>()?;
        for (g, v, at) in rows {
            if g > worst_grad {
                worst_grad = g;
                worst_at = at;
            }
            worst_value = worst_value.max(v);
        }
    }
    let point = match f {
        SpecialFn::Davis(_) => ScanPoint::Davis(DavisPoint {
            x: vec![worst_at.0],
            t: worst_at.1,
        }),
        _ => ScanPoint::Pair(PairPoint::scalar(worst_at.0, worst_at.1)),
    };
    Ok(GridScanReport {
        check: "interface_c1".to_string(),
        function: f.name().to_string(),
        parameter: f.parameter(),
        n_points: n_points * interfaces.len(),
        excluded: 0,
        worst_violation: worst_grad,
        worst_point: point,
        tolerance: TOL,
        pass: worst_grad < TOL && worst_value < VALUE_TOL,
    })
}

/// Largest value jump across the region boundaries of `f`, relative to
/// `max(1, |U|)` at the crossing point.
pub fn interface_value_jump(f: &SpecialFn, n_points: usize, radius: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for iface in f.interfaces(radius) {
        for i in 0..n_points {
            let s = (i as f64 + 0.5) / n_points as f64;
            let ((a, b), (na, nb)) = iface.point_and_normal(s);
            let d = 1e-13;
            let jump = (f.eval_radial(a + d * na, b + d * nb)? - f.eval_radial(a - d * na, b - d * nb)?).abs()
                / f.eval_radial(a, b)?.abs().max(1.0);
            worst = worst.max(jump);
        }
    }
    Ok(worst)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Quadratic-form bound for the `p ≥ 2` Burkholder function in dimension 2:
/// the second derivative along `(h, k)` with `|k| ≤ |h|` is at most
/// `c_p(x, y)(|k|² − |h|²)`, up to `1e−6·max(1, (|x| + |y|)^p)`. Points with `|x||y| = 0`
/// nearby or within ten steps of the interface are excluded.
pub fn scan_quadratic_form(p: f64, cfg: &ScanConfig) -> Result<GridScanReport> {
    const TOL: f64 = 1e-6;
    check_ge2("burkholder_U_ge2", p)?;
    let s = cfg.second_step;
    let halton = Halton::new(8, cfg.seed);
    let radius = cfg.radius;
    let build = |i: usize| {
        let u = halton.point(i as u64);
        let tau = std::f64::consts::TAU;
        let a = radius * u[0];
        let b = radius * u[1];
        let x: Vec<f64> = unit_vector(2, tau * u[2]).iter().map(|c| a * c).collect();
        let y: Vec<f64> = unit_vector(2, tau * u[3]).iter().map(|c| b * c).collect();
        let hn = 0.1 + 0.9 * u[4];
        let kn = hn * u[5];
        let h: Vec<f64> = unit_vector(2, tau * u[6]).iter().map(|c| hn * c).collect();
        let k: Vec<f64> = unit_vector(2, tau * u[7]).iter().map(|c| kn * c).collect();
        (x, y, h, k)
    };
    let (best, excluded) = worst((0..cfg.n_points).into_par_iter().map(|i| {
        let (x, y, h, k) = build(i);
        let (a, b) = (norm(&x), norm(&y));
        let reach = 10.0 * s * (norm(&h) + norm(&k));
        let to_interface = (b - (p - 1.0) * a).abs() / (1.0 + (p - 1.0) * (p - 1.0)).sqrt();
        if a <= reach || b <= reach || to_interface <= reach {
            return Ok(None);
        }
        let at = |e: f64| {
            let xs: Vec<f64> = x.iter().zip(&h).map(|(x, h)| x + e * h).collect();
            let ys: Vec<f64> = y.iter().zip(&k).map(|(y, k)| y + e * k).collect();
            burk_ge2_radial(p, norm(&xs), norm(&ys))
        };
        let centre = at(0.0);
        let second = (at(s) - 2.0 * centre + at(-s)) / (s * s);
        let c = quadratic_form_coefficient(p, &PairPoint::new(x.clone(), y.clone())?)?;
        let bound = c * (dot(&k, &k) - dot(&h, &h));
        Ok(Some(((second - bound) / (a + b).powf(p).max(1.0), i)))
    }))?;
    let (violation, idx) = best.unwrap_or((f64::NEG_INFINITY, 0));
    let (x, y, _, _) = build(idx);
    Ok(GridScanReport {
        check: "quadratic_form".to_string(),
        function: "burkholder_U_ge2".to_string(),
        parameter: p,
        n_points: cfg.n_points,
        excluded,
        worst_violation: violation,
        worst_point: ScanPoint::Pair(PairPoint { x, y }),
        tolerance: TOL,
        pass: violation <= TOL,
    })
}

/// Radial monotonicity: `U_y = α y` with `α ≥ 0`, i.e. `∂U/∂|y| ≥ 0`
/// (for Davis functions `∂U/∂|x| ≥ 0`), by central differences.
pub fn scan_radial_monotonicity(f: &SpecialFn, cfg: &ScanConfig) -> Result<GridScanReport> {
    const TOL: f64 = 1e-6;
    let h = cfg.first_step;
    let halton = Halton::new(2, cfg.seed);
    let is_davis = matches!(f, SpecialFn::Davis(_));
    let build = |i: usize| {
        let u = halton.point(i as u64);
        (cfg.radius * u[0], cfg.radius * u[1])
    };
    let (best, excluded) = worst((0..cfg.n_points).into_par_iter().map(|i| {
        let (a, b) = build(i);
        let (a, b) = if is_davis { (a, b * b / cfg.radius) } else { (a, b) };
        let d = if is_davis {
            if a <= 2.0 * h {
                return Ok(None);
            }
            (f.eval_radial(a + h, b)? - f.eval_radial(a - h, b)?) / (2.0 * h)
        } else {
            if b <= 2.0 * h {
                return Ok(None);
            }
            (f.eval_radial(a, b + h)? - f.eval_radial(a, b - h)?) / (2.0 * h)
        };
        Ok(Some((-d, i)))
    }))?;
    let (violation, idx) = best.unwrap_or((f64::NEG_INFINITY, 0));
    let (a, b) = build(idx);
    let point = if is_davis {
        ScanPoint::Davis(DavisPoint {
            x: vec![a],
            t: b * b / cfg.radius,
        })
    } else {
        ScanPoint::Pair(PairPoint::scalar(a, b))
    };
    Ok(GridScanReport {
        check: "radial_monotonicity".to_string(),
        function: f.name().to_string(),
        parameter: f.parameter(),
        n_points: cfg.n_points,
        excluded,
        worst_violation: violation,
        worst_point: point,
        tolerance: TOL,
        pass: violation <= TOL,
    })
}

/// Heat-type inequality `½⟨h U_xx h⟩ + U_t|h|² ≤ 0` for the Davis function in
/// dimension 2, by central differences with step `cfg.second_step`, away from
/// `|x| = D_p√t` and from `x = 0`. Passes iff the worst value, relative to
/// `max(1, |x|^p + D_p^p t^{p/2})`, is `≤ 1e−6`.
pub fn scan_davis_pde(d: &DavisU, cfg: &ScanConfig) -> Result<GridScanReport> {
    const TOL: f64 = 1e-6;
    let s = cfg.second_step;
    let halton = Halton::new(4, cfg.seed);
    let radius = cfg.radius;
    let build = |i: usize| {
        let u = halton.point(i as u64);
        let t = 0.05 + (radius - 0.05) * u[1];
        // |x| up to twice the gluing radius so both regions are sampled
        let a = 2.0 * d.root * t.sqrt() * u[0];
        let x: Vec<f64> = unit_vector(2, std::f64::consts::TAU * u[2])
            .iter()
            .map(|c| a * c)
            .collect();
        let h = unit_vector(2, std::f64::consts::TAU * u[3]);
        (x, t, h)
    };
    let (best, excluded) = worst((0..cfg.n_points).into_par_iter().map(|i| {
        let (x, t, h) = build(i);
        let a = norm(&x);
        if (a - d.root * t.sqrt()).abs() <= 10.0 * s || a <= 10.0 * s {
            return Ok(None);
        }
        let at = |e: f64, dt: f64| {
            let xs: Vec<f64> = x.iter().zip(&h).map(|(x, h)| x + e * h).collect();
            d.eval_radial(norm(&xs), t + dt)
        };
        let centre = at(0.0, 0.0)?;
        let uxx = (at(s, 0.0)? - 2.0 * centre + at(-s, 0.0)?) / (s * s);
        let ut = (at(0.0, s)? - at(0.0, -s)?) / (2.0 * s);
        let magnitude = a.powf(d.p) + d.root.powf(d.p) * t.powf(0.5 * d.p);
        Ok(Some(((0.5 * uxx + ut) / magnitude.max(1.0), i)))
    }))?;
    let (violation, idx) = best.unwrap_or((f64::NEG_INFINITY, 0));
    let (x, t, _) = build(idx);
    Ok(GridScanReport {
        check: "davis_pde".to_string(),
        function: "davis_U".to_string(),
        parameter: d.p,
        n_points: cfg.n_points,
        excluded,
        worst_violation: violation,
        worst_point: ScanPoint::Davis(DavisPoint { x, t }),
        tolerance: TOL,
        pass: violation <= TOL,
    })
}

/// Runs every smoothness and concavity-type check that applies to `f`.
pub fn scan_c1_and_concavity(f: &SpecialFn, cfg: &ScanConfig) -> Result<Vec<GridScanReport>> {
    let mut out = Vec::new();
    if !f.interfaces(cfg.radius).is_empty() {
        out.push(scan_interfaces(f, 300, cfg)?);
    }
    match f {
        SpecialFn::BurkholderGe2 { p } => {
            out.push(scan_quadratic_form(*p, cfg)?);
            out.push(scan_radial_monotonicity(f, cfg)?);
        }
        SpecialFn::Davis(d) => {
            out.push(scan_davis_pde(d, cfg)?);
            out.push(scan_radial_monotonicity(f, cfg)?);
        }
        _ => {}
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::young_psi;
    use crate::specfun::gamma_fn;
    use proptest::prelude::*;

    fn pt(a: f64, b: f64) -> PairPoint {
        PairPoint::scalar(a, b)
    }

    fn small_cfg(n: usize) -> ScanConfig {
        ScanConfig {
            n_points: n,
            seed: 7,
            ..ScanConfig::default()
        }
    }

    #[test]
    fn u_r_examples() {
        assert_eq!(u_r(1.0, &pt(0.0, 0.0)).unwrap(), 0.0);
        assert!((u_r(1.0, &pt(0.3, 0.4)).unwrap() - 0.07).abs() < 1e-15);
        assert!((u_r(1.0, &pt(0.8, 0.5)).unwrap() + 0.6).abs() < 1e-15);
        assert!(u_r(0.0, &pt(0.1, 0.1)).is_err());
    }

    #[test]
    fn pair_dimensions_must_match() {
        assert!(PairPoint::new(vec![1.0], vec![1.0, 2.0]).is_err());
        assert!(DavisPoint::new(vec![1.0], -0.1).is_err());
    }

    #[test]
    fn u_infty_examples() {
        assert_eq!(u_infty(&pt(0.3, 0.6)), 0.0);
        assert_eq!(u_infty(&pt(1.0, 1.0)), -1.0);
    }

    #[test]
    fn burkholder_lt2_examples() {
        let v = burkholder_u_lt2(1.5, &pt(0.0, 1.0)).unwrap();
        assert!((v - 1.5f64.sqrt()).abs() < 1e-15);
        let at = burkholder_u_lt2(1.5, &pt(1.0, 0.0)).unwrap();
        assert!(-(0.5f64).powf(-1.5) <= at);
        assert!(burkholder_u_lt2(2.0, &pt(1.0, 0.0)).is_err());
    }

    #[test]
    fn burkholder_lt2_integral_form() {
        let h = Halton::new(2, 3);
        for i in 0..20 {
            let u = h.point(i);
            let p = PairPoint::scalar(3.0 * u[0], 3.0 * u[1]);
            let closed = burkholder_u_lt2(1.5, &p).unwrap();
            let quad = burkholder_u_lt2_integral(1.5, &p).unwrap();
            assert!((closed - quad).abs() < 1e-6, "{closed} vs {quad}");
        }
    }

    #[test]
    fn burkholder_ge2_examples() {
        assert!(burkholder_u_ge2(3.0, &pt(1.0, 2.0)).unwrap().abs() < 1e-14);
        assert!((burkholder_u_ge2(3.0, &pt(0.0, 1.0)).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert!((burkholder_u_ge2(3.0, &pt(1.0, 0.0)).unwrap() + 8.0).abs() < 1e-15);
        assert!(burkholder_u_ge2(1.9, &pt(1.0, 0.0)).is_err());
    }

    #[test]
    fn log_u_examples() {
        assert_eq!(log_u(2.0, &pt(0.0, 0.0)).unwrap(), 0.5);
        for (a, k) in [(0.0, 2.0), (1.0, 2.0), (2.0, 3.0)] {
            let b = (a + 1.0) / (k - 1.0);
            let u = log_u(k, &pt(a, b)).unwrap();
            let rhs = b - k * young_psi(a);
            assert!((u - rhs).abs() < 1e-12, "a={a} K={k}: {u} vs {rhs}");
        }
        assert!(log_u(1.0, &pt(0.0, 0.0)).is_err());
    }

    #[test]
    fn log_u_interface_continuity() {
        let f = SpecialFn::log_u(2.0).unwrap();
        assert!(interface_value_jump(&f, 100, 10.0).unwrap() < 1e-10);
    }

    #[test]
    fn weak_lt2_examples() {
        let g0 = gamma_zero(1.5).unwrap();
        assert!((weak_u_lt2(1.5, &pt(0.0, 0.0)).unwrap() - g0 / 2.0).abs() < 1e-15);
        for x in [0.5, 1.0, 2.0] {
            let g = gamma_fn(1.5, x).unwrap();
            let u = weak_u_lt2(1.5, &pt(x, g)).unwrap();
            assert!((u - (g - x.powf(1.5))).abs() < 1e-9, "x={x}");
        }
        let f = SpecialFn::weak_lt2(1.5).unwrap();
        let jump = interface_value_jump(&f, 100, 10.0).unwrap();
        assert!(jump < 1e-8, "{jump}");
    }

    #[test]
    fn weak_gt2_examples() {
        assert_eq!(weak_u_gt2(3.0, &pt(0.0, 0.0)).unwrap(), 0.0);
        let p: f64 = 3.0;
        let want = p * p / 4.0 * (1.0 - 2.0 * (p - 2.0) / p + (p - 1.0).powi(2) * (p - 2.0) / p.powi(3));
        assert!((weak_u_gt2(3.0, &pt(0.0, 1.0)).unwrap() - want).abs() < 1e-14);
        let f = SpecialFn::weak_gt2(3.0).unwrap();
        assert!(interface_value_jump(&f, 100, 10.0).unwrap() < 1e-10);
        assert!(weak_u_gt2(2.0, &pt(0.0, 0.0)).is_err());
    }

    #[test]
    fn davis_at_two_is_heat_polynomial() {
        let d = DavisU::new(2.0).unwrap();
        let h = Halton::new(2, 1);
        for i in 0..1000 {
            let u = h.point(i);
            let (a, t) = (4.0 * u[0], 4.0 * u[1]);
            let v = d.eval_radial(a, t).unwrap();
            assert!((v - (a * a - t)).abs() < 1e-12 * (1.0 + a * a + t), "{a} {t}");
        }
    }

    #[test]
    fn davis_at_origin_negative_below_two() {
        for p in [0.5, 1.0, 1.5] {
            let v = davis_u(p, &DavisPoint::new(vec![0.0], 1.0).unwrap()).unwrap();
            assert!(v < 0.0);
        }
    }

    #[test]
    fn davis_majorization() {
        for p in [1.0, 1.5, 3.0] {
            let f = SpecialFn::davis(p).unwrap();
            let cfg = ScanConfig {
                radius: 4.0,
                ..small_cfg(20_000)
            };
            let r = scan_majorization(&f, Lemma::Davis { p }, &cfg).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn log_u_majorization() {
        let f = SpecialFn::log_u(2.0).unwrap();
        let r = scan_majorization(&f, Lemma::Maj1 { k: 2.0 }, &small_cfg(20_000)).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn weak_lt2_majorization() {
        let f = SpecialFn::weak_lt2(1.5).unwrap();
        let r = scan_majorization(&f, Lemma::Maj2 { p: 1.5 }, &small_cfg(5_000)).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn mismatched_lemma_is_rejected() {
        let f = SpecialFn::log_u(2.0).unwrap();
        assert!(scan_majorization(&f, Lemma::Maj2 { p: 1.2 }, &small_cfg(10)).is_err());
    }

    #[test]
    fn negative_control_fails() {
        let f = SpecialFn::log_u(2.0).unwrap();
        let r = scan_majorization_unchecked(&f, Lemma::Maj2 { p: 1.5 }, &small_cfg(5_000)).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn burkholder_ge2_concavity_p3() {
        let f = SpecialFn::burkholder_ge2(3.0).unwrap();
        let cfg = ScanConfig {
            radius: 2.0,
            ..small_cfg(20_000)
        };
        for r in scan_c1_and_concavity(&f, &cfg).unwrap() {
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn davis_pde_p3() {
        let f = SpecialFn::davis(3.0).unwrap();
        let cfg = ScanConfig {
            radius: 2.0,
            ..small_cfg(5_000)
        };
        for r in scan_c1_and_concavity(&f, &cfg).unwrap() {
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn log_u_gradient_jump() {
        let f = SpecialFn::log_u(2.0).unwrap();
        let r = scan_interfaces(&f, 200, &ScanConfig::default()).unwrap();
        assert!(r.pass, "{r:?}");
    }

    proptest! {
        #[test]
        fn u_r_below_linear_bound(r in 0.1f64..5.0, a in 0.0f64..10.0, b in 0.0f64..10.0) {
            let v = u_r(r, &pt(a, b)).unwrap();
            prop_assert!(v <= 1.0 - 2.0 * a / r + 1e-12);
        }

        #[test]
        fn u_r_scales(r in 0.1f64..5.0, a in 0.0f64..10.0, b in 0.0f64..10.0) {
            let v = u_r(r, &pt(a, b)).unwrap();
            let w = u_one(&pt(a / r, b / r));
            prop_assert!((v - w).abs() < 1e-12 * (1.0 + v.abs()));
        }

        #[test]
        fn u_one_is_u_r_at_one(a in 0.0f64..3.0, b in 0.0f64..3.0) {
            prop_assert_eq!(u_one(&pt(a, b)), u_r(1.0, &pt(a, b)).unwrap());
        }

        #[test]
        fn vector_and_radial_agree(a in 0.0f64..5.0, b in 0.0f64..5.0, th in 0.0f64..std::f64::consts::TAU) {
            let v = PairPoint::new(vec![a * th.cos(), a * th.sin()], vec![b * th.sin(), -b * th.cos()]).unwrap();
            let w = burkholder_u_ge2(3.0, &v).unwrap();
            let r = burkholder_u_ge2(3.0, &pt(a, b)).unwrap();
            prop_assert!((w - r).abs() < 1e-11 * (1.0 + r.abs()));
        }

        #[test]
        fn burkholder_majorizes(p in 1.05f64..6.0, a in 0.0f64..5.0, b in 0.0f64..5.0) {
            let (u, c) = if p < 2.0 {
                (burkholder_u_lt2(p, &pt(a, b)).unwrap(), 1.0 / (p - 1.0))
            } else {
                (burkholder_u_ge2(p, &pt(a, b)).unwrap(), p - 1.0)
            };
            let v = b.powf(p) - c.powf(p) * a.powf(p);
            prop_assert!(v <= u + 1e-9 * (1.0 + v.abs()));
        }
    }
}
