//! Riesz transforms as Fourier multipliers on the circle and the torus,
//! on spherical harmonics of S², and on Hermite polynomials in Gauss space.
//!
//! Grids carry the normalized measure (each of the `n` cells weighs `1/n`),
//! so the circle has total mass one. The inequalities checked here are
//! invariant under rescaling of the measure.
//!
//! The frequency-0 mode is always sent to 0. When an input has a nonzero
//! mean, the mean is removed before anything is measured and the returned
//! field or record says so through `mean_removed`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::constants::{c_p, k_p, l_k, young_psi};
use crate::error::domain;
use crate::quad::GaussLegendre;
use crate::{Error, Result};

/// Largest spherical-harmonic degree handled by [`SphereBasis`].
pub const MAX_SPHERE_DEGREE: usize = 16;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

// ---------------------------------------------------------------------------
// Grids and FFT

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Circle,
    Torus { n: usize },
}

/// Forward and inverse FFT plans for every axis of a grid. Shareable across
/// threads.
#[derive(Clone)]
pub struct FourierPlan {
    shape: Vec<usize>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl std::fmt::Debug for FourierPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierPlan").field("shape", &self.shape).finish()
    }
}

impl FourierPlan {
    pub fn new(shape: &[usize]) -> Result<Self> {
        if shape.is_empty() || shape.contains(&0) {
            return Err(Error::Invalid(format!("bad grid shape {shape:?}")));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            shape: shape.to_vec(),
            forward: shape.iter().map(|&n| planner.plan_fft_forward(n)).collect(),
            inverse: shape.iter().map(|&n| planner.plan_fft_inverse(n)).collect(),
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let plans = if inverse { &self.inverse } else { &self.forward };
        let total = data.len();
        // row-major: the last axis is contiguous
        let mut stride = 1;
        for axis in (0..self.shape.len()).rev() {
            let n = self.shape[axis];
            let plan = &plans[axis];
            let mut line = vec![Complex64::new(0.0, 0.0); n];
            let block = n * stride;
            for start in (0..total).step_by(block) {
                for offset in 0..stride {
                    let base = start + offset;
                    for (i, v) in line.iter_mut().enumerate() {
                        *v = data[base + i * stride];
                    }
                    plan.process(&mut line);
                    for (i, v) in line.iter().enumerate() {
                        data[base + i * stride] = *v;
                    }
                }
            }
            stride *= n;
        }
    }
}

/// Signed frequency of DFT index `i` on an axis of length `n`, or `None`
/// at the Nyquist index of an even axis.
fn signed_frequency(i: usize, n: usize) -> Option<f64> {
    if 2 * i == n {
        None
    } else if 2 * i < n {
        Some(i as f64)
    } else {
        Some(i as f64 - n as f64)
    }
}

/// A real function sampled on a uniform periodic grid, together with its
/// normalized DFT (`coeffs[0]` is the mean).
#[derive(Debug, Clone, Serialize)]
pub struct SpectralField {
    pub grid_shape: Vec<usize>,
    pub samples: Vec<f64>,
    #[serde(skip)]
    pub coeffs: Vec<Complex64>,
    pub domain: Domain,
    /// Set on operator outputs whose input had a nonzero mean.
    pub mean_removed: bool,
}

impl SpectralField {
    pub fn from_samples(grid_shape: &[usize], samples: Vec<f64>) -> Result<Self> {
        let plan = FourierPlan::new(grid_shape)?;
        Self::with_plan(&plan, samples)
    }

    pub fn with_plan(plan: &FourierPlan, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != plan.len() {
            return Err(Error::Invalid(format!(
                "{} samples for a grid of {} cells",
                samples.len(),
                plan.len()
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite sample".into()));
        }
        let n = samples.len() as f64;
        let mut coeffs: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        plan.transform(&mut coeffs, false);
        for c in &mut coeffs {
            *c /= n;
        }
        let domain = match plan.shape.len() {
            1 => Domain::Circle,
            d => Domain::Torus { n: d },
        };
        Ok(Self {
            grid_shape: plan.shape.clone(),
            samples,
            coeffs,
            domain,
            mean_removed: false,
        })
    }

    /// Samples of `θ ↦ f(θ)` at `θ_j = 2π(j + offset)/n`.
    pub fn circle_from_fn<F: Fn(f64) -> f64>(n: usize, offset: f64, f: F) -> Result<Self> {
        let samples = circle_nodes(n, offset).map(f).collect();
        Self::from_samples(&[n], samples)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn cell_weight(&self) -> f64 {
        1.0 / self.samples.len() as f64
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// Inverse transform of the stored coefficients.
    pub fn reconstruct(&self, plan: &FourierPlan) -> Vec<f64> {
        let mut data = self.coeffs.clone();
        plan.transform(&mut data, true);
        data.iter().map(|c| c.re).collect()
    }

    /// The same field with its mean subtracted.
    pub fn mean_zero(&self) -> Self {
        let m = self.mean();
        let mut out = self.clone();
        for v in &mut out.samples {
            *v -= m;
        }
        out.coeffs[0] = Complex64::new(0.0, 0.0);
        out.mean_removed = m.abs() > 1e-14 * self.scale();
        out
    }

    fn scale(&self) -> f64 {
        self.samples.iter().fold(1.0f64, |a, v| a.max(v.abs()))
    }

    /// Multidimensional frequency vector of flat index `idx`, `None` when
    /// any component sits at a Nyquist index.
    fn frequency(&self, mut idx: usize) -> Option<Vec<f64>> {
        let d = self.grid_shape.len();
        let mut xi = vec![0.0; d];
        for axis in (0..d).rev() {
            let n = self.grid_shape[axis];
            xi[axis] = signed_frequency(idx % n, n)?;
            idx /= n;
        }
        Some(xi)
    }

    fn apply_multiplier<M: Fn(&[f64]) -> Complex64>(&self, plan: &FourierPlan, m: M) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (i, c) in coeffs.iter_mut().enumerate() {
            *c = match self.frequency(i) {
                Some(xi) if xi.iter().any(|&v| v != 0.0) => *c * m(&xi),
                _ => Complex64::new(0.0, 0.0),
            };
        }
        let mut data = coeffs.clone();
        plan.transform(&mut data, true);
        Self {
            grid_shape: self.grid_shape.clone(),
            samples: data.iter().map(|c| c.re).collect(),
            coeffs,
            domain: self.domain,
            mean_removed: self.mean().abs() > 1e-14 * self.scale(),
        }
    }
}

/// Grid nodes `2π(j + offset)/n`.
pub fn circle_nodes(n: usize, offset: f64) -> impl Iterator<Item = f64> {
    (0..n).map(move |j| 2.0 * PI * (j as f64 + offset) / n as f64)
}

fn require_circle(f: &SpectralField) -> Result<()> {
    if f.domain != Domain::Circle {
        return Err(Error::Invalid("field does not live on the circle".into()));
    }
    Ok(())
}

/// Conjugate function: multiplier `−i·sgn(k)`, with `k = 0` and the Nyquist
/// mode sent to 0.
pub fn hilbert_circle(f: &SpectralField) -> Result<SpectralField> {
    require_circle(f)?;
    let plan = FourierPlan::new(&f.grid_shape)?;
    Ok(hilbert_circle_with(&plan, f))
}

pub fn hilbert_circle_with(plan: &FourierPlan, f: &SpectralField) -> SpectralField {
    f.apply_multiplier(plan, |xi| Complex64::new(0.0, -xi[0].signum()))
}

/// Directional Riesz transform on the torus, multiplier `−iξ_j/|ξ|` for
/// `1 ≤ j ≤ n`. Modes with a Nyquist component are sent to 0.
pub fn riesz_torus(f: &SpectralField, j: usize) -> Result<SpectralField> {
    let plan = FourierPlan::new(&f.grid_shape)?;
    riesz_torus_with(&plan, f, j)
}

pub fn riesz_torus_with(plan: &FourierPlan, f: &SpectralField, j: usize) -> Result<SpectralField> {
    let d = f.grid_shape.len();
    if j == 0 || j > d {
        return Err(Error::Invalid(format!("direction {j} outside 1..={d}")));
    }
    Ok(f.apply_multiplier(plan, |xi| {
        let norm = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        Complex64::new(0.0, -xi[j - 1] / norm)
    }))
}

/// `(mean |g|^p / mean |f|^p)^{1/p}` on a common grid.
pub fn lp_ratio(f: &[f64], g: &[f64], p: f64) -> f64 {
    (lp_mean(g, p) / lp_mean(f, p)).powf(1.0 / p)
}

fn lp_mean(v: &[f64], p: f64) -> f64 {
    v.iter().map(|x| x.abs().powf(p)).sum::<f64>() / v.len() as f64
}

/// `‖f‖_p` on a grid with cells of weight `w`.
pub fn lp_norm(v: &[f64], p: f64, w: f64) -> f64 {
    (v.iter().map(|x| x.abs().powf(p)).sum::<f64>() * w).powf(1.0 / p)
}

/// A mean-zero real trigonometric polynomial `Σ a_k cos kθ + b_k sin kθ`
/// of the given degree on the grid of `plan` (offset 0), with independent
/// standard normal `a_k, b_k` damped like `1/√k`.
pub fn random_trig_polynomial(plan: &FourierPlan, degree: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = plan.len();
    let degree = degree.min((n - 1) / 2);
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    for k in 1..=degree {
        let s = 0.5 / (k as f64).sqrt();
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        c[k] = Complex64::new(a * s, -b * s);
        c[n - k] = c[k].conj();
    }
    plan.transform(&mut c, true);
    c.iter().map(|v| v.re).collect()
}

/// `sgn(π − θ)·|cot(θ/2)|^α·sin(απ/2)`, the imaginary part of
/// `((1 + e^{iθ})/(1 − e^{iθ}))^α`, sampled on the half-offset grid that
/// avoids the singularity at `θ = 0`.
pub fn power_law_profile(n: usize, alpha: f64) -> Vec<f64> {
    let s = (alpha * PI / 2.0).sin();
    circle_nodes(n, 0.5)
        .map(|t| {
            let c = 1.0 / (t / 2.0).tan();
            c.signum() * c.abs().powf(alpha) * s
        })
        .collect()
}

/// Exponent used for the near-extremal profile at a given `p`:
/// slightly above `1/p`.
pub fn near_extremal_alpha(p: f64) -> f64 {
    1.1 / p.max(p / (p - 1.0))
}

/// `‖Hf‖_p/‖f‖_p` on random trigonometric polynomials; see
/// [`SweepCheck::Lp`].
pub fn hilbert_lp_sweep(n: usize, p: f64, trials: usize, max_degree: usize, seed: u64) -> Result<Vec<TrialRecord>> {
    riesz_sweep(&[n], RieszOp::Hilbert, SweepCheck::Lp { p }, trials, max_degree, seed)
}

/// `‖Hf‖_p/‖f‖_p` for the power-law profile with exponent `alpha`.
pub fn power_law_ratio(n: usize, p: f64, alpha: f64) -> Result<f64> {
    let f = SpectralField::from_samples(&[n], power_law_profile(n, alpha))?;
    let h = hilbert_circle(&f)?;
    let f0 = f.mean_zero();
    Ok(lp_ratio(&f0.samples, &h.samples, p))
}

// ---------------------------------------------------------------------------
// Weak norm

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeakNormReport {
    pub p: f64,
    pub value: f64,
    /// `|f|`-threshold of the maximizing superlevel set.
    pub witness_level: f64,
    /// Number of cells in the maximizing superlevel set.
    pub witness_cells: usize,
}

fn check_weak_args(values: &[f64], p: f64, w: f64) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Invalid("empty grid".into()));
    }
    if !(p > 1.0) || !p.is_finite() {
        return Err(domain("weak_norm", p, "p > 1"));
    }
    if !(w > 0.0) || !w.is_finite() {
        return Err(domain("weak_norm", w, "cell weight > 0"));
    }
    Ok(())
}

fn sorted_abs_desc(values: &[f64]) -> Vec<f64> {
    let mut a: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    a.sort_by(|x, y| y.total_cmp(x));
    a
}

/// `sup_A |A|^{−1+1/p}∫_A|f|` over superlevel sets of `|f|` on a grid with
/// cells of weight `cell_weight`. For a fixed measure the best set is a
/// superlevel set, so this is the sup over all unions of cells.
pub fn weak_norm(values: &[f64], p: f64, cell_weight: f64) -> Result<WeakNormReport> {
    check_weak_args(values, p, cell_weight)?;
    let a = sorted_abs_desc(values);
    let mut best = WeakNormReport {
        p,
        value: f64::NEG_INFINITY,
        witness_level: a[0],
        witness_cells: 1,
    };
    let mut prefix = 0.0;
    for (k, v) in a.iter().enumerate() {
        prefix += v;
        let m = (k + 1) as f64 * cell_weight;
        let val = m.powf(-1.0 + 1.0 / p) * prefix * cell_weight;
        if val > best.value {
            best.value = val;
            best.witness_level = *v;
            best.witness_cells = k + 1;
        }
    }
    Ok(best)
}

/// `sup_λ λ·|{|f| > λ}|^{1/p}`.
pub fn weak_quasi_norm(values: &[f64], p: f64, cell_weight: f64) -> Result<f64> {
    check_weak_args(values, p, cell_weight)?;
    let a = sorted_abs_desc(values);
    Ok(a.iter()
        .enumerate()
        .map(|(k, v)| v * ((k + 1) as f64 * cell_weight).powf(1.0 / p))
        .fold(0.0, f64::max))
}

/// The same sup as [`weak_norm`] taken over every nonempty subset of cells.
/// Exponential in the number of cells, so limited to 20.
pub fn weak_norm_exhaustive(values: &[f64], p: f64, cell_weight: f64) -> Result<f64> {
    check_weak_args(values, p, cell_weight)?;
    let n = values.len();
    if n > 20 {
        return Err(Error::Invalid(format!("{n} cells is too many to enumerate")));
    }
    let mut best = f64::NEG_INFINITY;
    for mask in 1u32..(1 << n) {
        let mut s = 0.0;
        for (i, v) in values.iter().enumerate() {
            if mask & (1 << i) != 0 {
                s += v.abs();
            }
        }
        let m = mask.count_ones() as f64 * cell_weight;
        best = best.max(m.powf(-1.0 + 1.0 / p) * s * cell_weight);
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Inequality checkers on grids

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RieszOp {
    Hilbert,
    /// Direction `j` on the torus, `1 ≤ j ≤ n`.
    Torus(usize),
}

impl RieszOp {
    pub fn apply(self, f: &SpectralField) -> Result<SpectralField> {
        match self {
            RieszOp::Hilbert => hilbert_circle(f),
            RieszOp::Torus(j) => riesz_torus(f, j),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityRecord {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub mean_removed: bool,
}

impl InequalityRecord {
    fn new(lhs: f64, rhs: f64, mean_removed: bool) -> Self {
        Self {
            lhs,
            rhs,
            slack: rhs - lhs,
            mean_removed,
        }
    }
}

fn check_set(f: &SpectralField, set: &[bool]) -> Result<(f64, f64)> {
    if set.len() != f.len() {
        return Err(Error::Invalid(format!(
            "set of {} cells for a grid of {}",
            set.len(),
            f.len()
        )));
    }
    let w = f.cell_weight();
    Ok((w, set.iter().filter(|&&b| b).count() as f64 * w))
}

fn set_integral(values: &[f64], set: &[bool], w: f64) -> f64 {
    values
        .iter()
        .zip(set)
        .filter(|(_, &b)| b)
        .map(|(v, _)| v.abs())
        .sum::<f64>()
        * w
}

/// `∫_A|Rf| ≤ c·(K∫Ψ(|f|) + L(K)|A|)` with `c = multiplier`.
pub fn check_llogl_scaled(
    f: &SpectralField,
    set: &[bool],
    k: f64,
    op: RieszOp,
    multiplier: f64,
) -> Result<InequalityRecord> {
    let l = l_k(k)?.value;
    let (w, measure) = check_set(f, set)?;
    let f0 = f.mean_zero();
    let rf = op.apply(&f0)?;
    let lhs = set_integral(&rf.samples, set, w);
    let psi = f0.samples.iter().map(|v| young_psi(v.abs())).sum::<f64>() * w;
    let rhs = multiplier * (k * psi + l * measure);
    Ok(InequalityRecord::new(lhs, rhs, f0.mean_removed))
}

/// `∫_A|Rf| ≤ K∫Ψ(|f|) + L(K)|A|` on the grid, `K > 2/π`.
pub fn check_llogl(f: &SpectralField, set: &[bool], k: f64, op: RieszOp) -> Result<InequalityRecord> {
    check_llogl_scaled(f, set, k, op, 1.0)
}

/// `∫_A|Rf| ≤ c·C_p‖f‖_p|A|^{1−1/p}` with `c = multiplier`.
pub fn check_weak_type_scaled(
    f: &SpectralField,
    set: &[bool],
    p: f64,
    op: RieszOp,
    multiplier: f64,
) -> Result<InequalityRecord> {
    let cp = c_p(p)?;
    let (w, measure) = check_set(f, set)?;
    let f0 = f.mean_zero();
    let rf = op.apply(&f0)?;
    let lhs = set_integral(&rf.samples, set, w);
    let rhs = multiplier * cp * lp_norm(&f0.samples, p, w) * measure.powf(1.0 - 1.0 / p);
    Ok(InequalityRecord::new(lhs, rhs, f0.mean_removed))
}

/// `∫_A|Rf| ≤ C_p‖f‖_p|A|^{1−1/p}` on the grid.
pub fn check_weak_type(f: &SpectralField, set: &[bool], p: f64, op: RieszOp) -> Result<InequalityRecord> {
    check_weak_type_scaled(f, set, p, op, 1.0)
}

/// Cells where `|g| > level`.
pub fn superlevel_set(g: &[f64], level: f64) -> Vec<bool> {
    g.iter().map(|v| v.abs() > level).collect()
}

/// The `cells` cells with the largest `|g|` (ties to the lower index).
pub fn top_cells(g: &[f64], cells: usize) -> Vec<bool> {
    let mut idx: Vec<usize> = (0..g.len()).collect();
    idx.sort_by(|&a, &b| g[b].abs().total_cmp(&g[a].abs()).then(a.cmp(&b)));
    let mut set = vec![false; g.len()];
    for &i in idx.iter().take(cells) {
        set[i] = true;
    }
    set
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

/// What a [`riesz_sweep`] measures on each random field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum SweepCheck {
    /// `lhs = ‖Rf‖_p/‖f‖_p`, `rhs = cot(π/2p*)`.
    Lp { p: f64 },
    /// LLogL inequality on the set `{|Rf| > L(K)}`, which maximizes the left
    /// side minus the `L(K)|A|` term. Fields are scaled by a random height
    /// in `[1, e⁸]`.
    Llogl { k: f64 },
    /// Weak-type inequality on the superlevel set of `|Rf|` realizing its
    /// weak norm, the worst set for that `f`.
    Weak { p: f64 },
}

/// A mean-zero real band-limited field on the grid of `plan`: modes with
/// `0 < max|ξ_i| ≤ degree` get complex normal coefficients damped like
/// `|ξ|^{−1/2}`, then symmetrized so the samples are real.
pub fn random_band_limited(plan: &FourierPlan, degree: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    if plan.shape.len() == 1 {
        return random_trig_polynomial(plan, degree, rng);
    }
    let shape = &plan.shape;
    let total = plan.len();
    let freq = |mut idx: usize| -> Option<Vec<f64>> {
        let mut xi = vec![0.0; shape.len()];
        for axis in (0..shape.len()).rev() {
            xi[axis] = signed_frequency(idx % shape[axis], shape[axis])?;
            idx /= shape[axis];
        }
        Some(xi)
    };
    let mut c = vec![Complex64::new(0.0, 0.0); total];
    for (i, v) in c.iter_mut().enumerate() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        if let Some(xi) = freq(i) {
            let top = xi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if top > 0.0 && top <= degree as f64 {
                let norm = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
                *v = Complex64::new(re, im) / norm.sqrt();
            }
        }
    }
    // c(ξ) ← (c(ξ) + conj c(−ξ))/2
    let neg = |mut idx: usize| -> usize {
        let mut out = 0;
        let mut stride = 1;
        for axis in (0..shape.len()).rev() {
            let n = shape[axis];
            let i = idx % n;
            out += ((n - i) % n) * stride;
            stride *= n;
            idx /= n;
        }
        out
    };
    let sym: Vec<Complex64> = (0..total).map(|i| 0.5 * (c[i] + c[neg(i)].conj())).collect();
    let mut data = sym;
    plan.transform(&mut data, true);
    data.iter().map(|v| v.re).collect()
}

/// Runs `check` with operator `op` on `trials` random band-limited fields of
/// degree `1..=max_degree` on a grid of the given shape. Trial `i` draws
/// from stream `i` of `seed`.
pub fn riesz_sweep(
    shape: &[usize],
    op: RieszOp,
    check: SweepCheck,
    trials: usize,
    max_degree: usize,
    seed: u64,
) -> Result<Vec<TrialRecord>> {
    use rayon::prelude::*;
    let plan = FourierPlan::new(shape)?;
    let (l, bound) = match check {
        SweepCheck::Llogl { k } => (l_k(k)?.value, 0.0),
        SweepCheck::Lp { p } => (0.0, crate::constants::pichorides(p)?),
        SweepCheck::Weak { p } => (0.0, c_p(p)?),
    };
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = rng_for(seed, trial as u64);
            let degree = rng.random_range(1..=max_degree.max(1));
            let height = match check {
                SweepCheck::Llogl { .. } => (8.0 * rng.random::<f64>()).exp(),
                _ => 1.0,
            };
            let mut s = random_band_limited(&plan, degree, &mut rng);
            s.iter_mut().for_each(|v| *v *= height);
            let f = SpectralField::with_plan(&plan, s)?;
            let rf = match op {
                RieszOp::Hilbert => {
                    require_circle(&f)?;
                    hilbert_circle_with(&plan, &f)
                }
                RieszOp::Torus(j) => riesz_torus_with(&plan, &f, j)?,
            };
            let (lhs, rhs) = match check {
                SweepCheck::Lp { p } => (lp_ratio(&f.samples, &rf.samples, p), bound),
                SweepCheck::Llogl { k } => {
                    let r = check_llogl(&f, &superlevel_set(&rf.samples, l), k, op)?;
                    (r.lhs, r.rhs)
                }
                SweepCheck::Weak { p } => {
                    let wn = weak_norm(&rf.samples, p, f.cell_weight())?;
                    let r = check_weak_type(&f, &top_cells(&rf.samples, wn.witness_cells), p, op)?;
                    (r.lhs, r.rhs)
                }
            };
            Ok(TrialRecord {
                trial,
                lhs,
                rhs,
                slack: rhs - lhs,
            })
        })
        .collect()
}

/// LLogL check of the conjugate function on random trigonometric
/// polynomials; see [`SweepCheck::Llogl`].
pub fn circle_llogl_sweep(n: usize, k: f64, trials: usize, max_degree: usize, seed: u64) -> Result<Vec<TrialRecord>> {
    riesz_sweep(
        &[n],
        RieszOp::Hilbert,
        SweepCheck::Llogl { k },
        trials,
        max_degree,
        seed,
    )
}

/// Weak-type check of the conjugate function on random trigonometric
/// polynomials; see [`SweepCheck::Weak`].
pub fn circle_weak_sweep(n: usize, p: f64, trials: usize, max_degree: usize, seed: u64) -> Result<Vec<TrialRecord>> {
    riesz_sweep(&[n], RieszOp::Hilbert, SweepCheck::Weak { p }, trials, max_degree, seed)
}

/// LLogL records for the atoms `h·(1_I − |I|)` with `|I| = 1/h` on the
/// circle, taking the worst set `{|Hf| > L(K)}` each time.
pub fn llogl_atom_sweep(n: usize, k: f64, heights: &[f64]) -> Result<Vec<InequalityRecord>> {
    let plan = FourierPlan::new(&[n])?;
    let l = l_k(k)?.value;
    heights
        .iter()
        .map(|&h| {
            let width = ((n as f64 / h).round() as usize).clamp(1, n - 1);
            let s = (0..n).map(|i| if i < width { h } else { 0.0 }).collect();
            let f = SpectralField::with_plan(&plan, s)?.mean_zero();
            let hf = hilbert_circle_with(&plan, &f);
            check_llogl(&f, &superlevel_set(&hf.samples, l), k, RieszOp::Hilbert)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Harmonic fields

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HarmonicBasis {
    /// Real orthonormal spherical harmonics `Y_{k,m}`, `−k ≤ m ≤ k`, in
    /// `L²(S², σ/4π)`; stored at index `k² + k + m`.
    Sphere2,
    /// Probabilists' Hermite polynomials `He_k`, stored at index `k`.
    Hermite1d,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicField {
    pub basis: HarmonicBasis,
    pub degree_cap: usize,
    pub coeffs: Vec<f64>,
}

impl HarmonicField {
    pub fn zeros(basis: HarmonicBasis, degree_cap: usize) -> Self {
        let len = match basis {
            HarmonicBasis::Sphere2 => (degree_cap + 1) * (degree_cap + 1),
            HarmonicBasis::Hermite1d => degree_cap + 1,
        };
        Self {
            basis,
            degree_cap,
            coeffs: vec![0.0; len],
        }
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn is_mean_zero(&self) -> bool {
        self.coeffs[0] == 0.0
    }

    /// `L²` inner product; the two fields must share a basis.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        if self.basis != other.basis {
            return Err(Error::Invalid("inner product across bases".into()));
        }
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
        Ok((0..n)
            .map(|i| {
                let w = match self.basis {
                    HarmonicBasis::Sphere2 => 1.0,
                    HarmonicBasis::Hermite1d => factorial(i),
                };
                w * get(&self.coeffs, i) * get(&other.coeffs, i)
            })
            .sum())
    }

    pub fn norm(&self) -> Result<f64> {
        Ok(self.inner(self)?.sqrt())
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

// ---------------------------------------------------------------------------
// Homogeneous polynomials in three variables

/// Homogeneous polynomial of degree `deg` in `(x₁, x₂, x₃)`; coefficient
/// of `x₁^a x₂^b x₃^{deg−a−b}` stored at `a·(deg+1) + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly3 {
    deg: usize,
    c: Vec<f64>,
}

impl Poly3 {
    pub fn zero(deg: usize) -> Self {
        Self {
            deg,
            c: vec![0.0; (deg + 1) * (deg + 1)],
        }
    }

    /// The monomial `x_v` for `v ∈ {0, 1, 2}`.
    pub fn variable(v: usize) -> Self {
        let mut p = Self::zero(1);
        let e = [(1, 0), (0, 1), (0, 0)][v];
        p.set(e.0, e.1, 1.0);
        p
    }

    pub fn constant(v: f64) -> Self {
        let mut p = Self::zero(0);
        p.c[0] = v;
        p
    }

    pub fn degree(&self) -> usize {
        self.deg
    }

    fn at(&self, a: usize, b: usize) -> f64 {
        self.c[a * (self.deg + 1) + b]
    }

    fn set(&mut self, a: usize, b: usize, v: f64) {
        let d = self.deg + 1;
        self.c[a * d + b] = v;
    }

    fn add_at(&mut self, a: usize, b: usize, v: f64) {
        let d = self.deg + 1;
        self.c[a * d + b] += v;
    }

    fn terms(&self) -> impl Iterator<Item = (usize, usize, usize, f64)> + '_ {
        let d = self.deg;
        (0..=d).flat_map(move |a| {
            (0..=d - a).filter_map(move |b| {
                let v = self.at(a, b);
                (v != 0.0).then_some((a, b, d - a - b, v))
            })
        })
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.deg + other.deg);
        for (a1, b1, _, v1) in self.terms() {
            for (a2, b2, _, v2) in other.terms() {
                out.add_at(a1 + a2, b1 + b2, v1 * v2);
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            deg: self.deg,
            c: self.c.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.deg != other.deg {
            return Err(Error::Invalid("adding polynomials of different degree".into()));
        }
        Ok(Self {
            deg: self.deg,
            c: self.c.iter().zip(&other.c).map(|(a, b)| a + b).collect(),
        })
    }

    /// `∂/∂x_v`.
    pub fn derivative(&self, v: usize) -> Self {
        if self.deg == 0 {
            return Self::zero(0);
        }
        let mut out = Self::zero(self.deg - 1);
        for (a, b, c, val) in self.terms() {
            match v {
                0 if a > 0 => out.add_at(a - 1, b, val * a as f64),
                1 if b > 0 => out.add_at(a, b - 1, val * b as f64),
                2 if c > 0 => out.add_at(a, b, val * c as f64),
                _ => {}
            }
        }
        out
    }

    pub fn laplacian(&self) -> Self {
        let mut out = Self::zero(self.deg.saturating_sub(2));
        for v in 0..3 {
            let d2 = self.derivative(v).derivative(v);
            if d2.deg == out.deg {
                out = out.add(&d2).expect("same degree");
            }
        }
        out
    }

    pub fn eval(&self, x: [f64; 3]) -> f64 {
        self.terms()
            .map(|(a, b, c, v)| v * x[0].powi(a as i32) * x[1].powi(b as i32) * x[2].powi(c as i32))
            .sum()
    }

    /// Mean over the unit sphere, `∫ P dσ/4π`.
    pub fn sphere_mean(&self) -> f64 {
        self.terms()
            .filter(|(a, b, c, _)| a % 2 == 0 && b % 2 == 0 && c % 2 == 0)
            .map(|(a, b, c, v)| v * monomial_sphere_mean(a, b, c))
            .sum()
    }

    /// `⟨P, Q⟩` in `L²(S², σ/4π)`.
    pub fn sphere_inner(&self, other: &Self) -> f64 {
        self.mul(other).sphere_mean()
    }

    /// `x_ℓ∂_m − x_m∂_ℓ` with 1-based `ℓ, m`.
    pub fn rotation_generator(&self, l: usize, m: usize) -> Self {
        let (l, m) = (l - 1, m - 1);
        let a = Poly3::variable(l).mul(&self.derivative(m));
        let b = Poly3::variable(m).mul(&self.derivative(l));
        if self.deg == 0 {
            return Self::zero(0);
        }
        a.add(&b.scale(-1.0)).expect("same degree")
    }
}

fn double_factorial_odd(n: usize) -> f64 {
    // (n−1)!! for even n, i.e. 1·3·5·…·(n−1)
    (1..n).step_by(2).map(|i| i as f64).product()
}

/// `∫ x^a y^b z^c dσ/4π` for even exponents:
/// `(a−1)!!(b−1)!!(c−1)!!/(a+b+c+1)!!`.
fn monomial_sphere_mean(a: usize, b: usize, c: usize) -> f64 {
    let num = double_factorial_odd(a) * double_factorial_odd(b) * double_factorial_odd(c);
    let den: f64 = (1..=a + b + c + 1).step_by(2).map(|i| i as f64).product();
    num / den
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `r^{2j} = (x²+y²+z²)^j` as a homogeneous polynomial.
fn r_squared_power(j: usize) -> Poly3 {
    let r2 = {
        let mut p = Poly3::zero(2);
        p.set(2, 0, 1.0);
        p.set(0, 2, 1.0);
        p.set(0, 0, 1.0);
        p
    };
    (0..j).fold(Poly3::constant(1.0), |acc, _| acc.mul(&r2))
}

/// Real and imaginary parts of `(x + iy)^m`.
fn xy_power(m: usize) -> (Poly3, Poly3) {
    let mut re = Poly3::zero(m);
    let mut im = Poly3::zero(m);
    for j in 0..=m {
        // binom(m, j) x^{m−j} (iy)^j
        let v = binomial(m, j);
        match j % 4 {
            0 => re.set(m - j, j, v),
            1 => im.set(m - j, j, v),
            2 => re.set(m - j, j, -v),
            _ => im.set(m - j, j, -v),
        }
    }
    (re, im)
}

/// Unnormalized real solid harmonics of degree `k`: `(x+iy)^m·Π_k^m(z, r)`
/// split into real (`m ≥ 0`) and imaginary (`m < 0`) parts, with
/// `Π_k^m = Σ_j (−1)^j C(k,j)C(2k−2j,k) (k−2j)!/(k−2j−m)! z^{k−2j−m} r^{2j}`.
fn solid_harmonic(k: usize, m: i64) -> Poly3 {
    let am = m.unsigned_abs() as usize;
    let mut pi = Poly3::zero(k - am);
    for j in 0..=(k - am) / 2 {
        let zpow = k - 2 * j - am;
        let coef = if j % 2 == 0 { 1.0 } else { -1.0 }
            * binomial(k, j)
            * binomial(2 * k - 2 * j, k)
            * ((zpow + 1)..=(k - 2 * j)).map(|i| i as f64).product::<f64>();
        let mut zp = Poly3::zero(zpow);
        zp.set(0, 0, 1.0);
        let term = zp.mul(&r_squared_power(j)).scale(coef);
        pi = pi.add(&term).expect("degree k − |m|");
    }
    let (re, im) = xy_power(am);
    if m >= 0 {
        re.mul(&pi)
    } else {
        im.mul(&pi)
    }
}

/// Orthonormal real spherical harmonics up to a degree cap, as polynomials.
#[derive(Debug, Clone)]
pub struct SphereBasis {
    cap: usize,
    polys: Vec<Poly3>,
}

impl SphereBasis {
    pub fn new(cap: usize) -> Result<Self> {
        if cap > MAX_SPHERE_DEGREE {
            return Err(Error::Invalid(format!("degree cap {cap} above {MAX_SPHERE_DEGREE}")));
        }
        let mut polys = Vec::with_capacity((cap + 1) * (cap + 1));
        for k in 0..=cap {
            for m in -(k as i64)..=(k as i64) {
                let p = solid_harmonic(k, m);
                let norm = p.sphere_inner(&p).sqrt();
                polys.push(p.scale(1.0 / norm));
            }
        }
        Ok(Self { cap, polys })
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// `Y_{k,m}` as a polynomial.
    pub fn harmonic(&self, k: usize, m: i64) -> &Poly3 {
        &self.polys[sphere_index(k, m)]
    }

    /// Degree-`k` component of `f` as a polynomial.
    pub fn component(&self, f: &HarmonicField, k: usize) -> Poly3 {
        let mut p = Poly3::zero(k);
        for m in -(k as i64)..=(k as i64) {
            let c = f.coeffs[sphere_index(k, m)];
            if c != 0.0 {
                p = p.add(&self.harmonic(k, m).scale(c)).expect("degree k");
            }
        }
        p
    }

    /// Coefficients of a degree-`k` polynomial along `Y_{k,·}`.
    pub fn project(&self, p: &Poly3) -> Vec<f64> {
        let k = p.degree();
        (-(k as i64)..=(k as i64))
            .map(|m| p.sphere_inner(self.harmonic(k, m)))
            .collect()
    }

    /// A field with cap `cap` whose only component is the harmonic
    /// polynomial `p`.
    pub fn from_component(&self, cap: usize, p: &Poly3) -> Result<HarmonicField> {
        let k = p.degree();
        if k > cap || cap > self.cap {
            return Err(Error::Invalid(format!("degree {k} above cap {cap}")));
        }
        let mut f = HarmonicField::zeros(HarmonicBasis::Sphere2, cap);
        for (i, c) in self.project(p).into_iter().enumerate() {
            f.coeffs[k * k + i] = c;
        }
        Ok(f)
    }

    pub fn eval(&self, f: &HarmonicField, x: [f64; 3]) -> f64 {
        (0..=f.degree_cap.min(self.cap))
            .map(|k| self.component(f, k).eval(x))
            .sum()
    }
}

/// Index of `(k, m)` in a [`HarmonicBasis::Sphere2`] coefficient vector.
pub fn sphere_index(k: usize, m: i64) -> usize {
    ((k * k + k) as i64 + m) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SphereRieszKind {
    /// `𝒯_{ℓm}∘(−Δ)^{−1/2}`.
    Cylinder,
    /// `𝒯_{ℓm}∘(∂/∂ν)^{−1}`.
    Ball,
}

/// `1/√(k(n+k−2))`, the eigenvalue of `(−Δ_{S^{n−1}})^{−1/2}` on degree `k`.
pub fn cylinder_factor(n: usize, k: usize) -> f64 {
    1.0 / ((k * (n + k - 2)) as f64).sqrt()
}

fn degree_factor(kind: SphereRieszKind, k: usize) -> f64 {
    match kind {
        SphereRieszKind::Cylinder => cylinder_factor(3, k),
        SphereRieszKind::Ball => 1.0 / k as f64,
    }
}

fn check_sphere_field(f: &HarmonicField, basis: &SphereBasis) -> Result<()> {
    if f.basis != HarmonicBasis::Sphere2 {
        return Err(Error::Invalid("expected a sphere field".into()));
    }
    if f.degree_cap > basis.cap() || f.degree_cap > MAX_SPHERE_DEGREE {
        return Err(Error::Invalid(format!(
            "degree cap {} above basis cap {}",
            f.degree_cap,
            basis.cap()
        )));
    }
    if f.coeffs.len() != (f.degree_cap + 1) * (f.degree_cap + 1) {
        return Err(Error::Invalid("coefficient vector has the wrong length".into()));
    }
    if !f.is_mean_zero() {
        return Err(Error::Invalid(format!("nonzero mean {}", f.mean())));
    }
    Ok(())
}

fn check_pair(l: usize, m: usize) -> Result<()> {
    if !(1..=3).contains(&l) || !(1..=3).contains(&m) || l == m {
        return Err(Error::Invalid(format!("bad coordinate pair ({l}, {m})")));
    }
    Ok(())
}

/// Component `(ℓ, m)` of the cylinder- or ball-type Riesz transform on S².
/// Each degree-`k` block is scaled by `1/√(k(k+1))` or `1/k`, turned into a
/// polynomial, hit with `x_ℓ∂_m − x_m∂_ℓ` and re-expanded.
pub fn sphere_riesz(
    basis: &SphereBasis,
    f: &HarmonicField,
    kind: SphereRieszKind,
    pair: (usize, usize),
) -> Result<HarmonicField> {
    check_sphere_field(f, basis)?;
    check_pair(pair.0, pair.1)?;
    let mut out = HarmonicField::zeros(HarmonicBasis::Sphere2, f.degree_cap);
    for k in 1..=f.degree_cap {
        let p = basis.component(f, k);
        if p.c.iter().all(|&v| v == 0.0) {
            continue;
        }
        let t = p.scale(degree_factor(kind, k)).rotation_generator(pair.0, pair.1);
        for (i, c) in basis.project(&t).into_iter().enumerate() {
            out.coeffs[k * k + i] = c;
        }
    }
    Ok(out)
}

/// `|⟨Qf, g⟩ + ⟨f, Qg⟩|` from coefficients.
pub fn check_sphere_duality(
    basis: &SphereBasis,
    f: &HarmonicField,
    g: &HarmonicField,
    kind: SphereRieszKind,
    pair: (usize, usize),
) -> Result<f64> {
    let qf = sphere_riesz(basis, f, kind, pair)?;
    let qg = sphere_riesz(basis, g, kind, pair)?;
    Ok((qf.inner(g)? + f.inner(&qg)?).abs())
}

/// A mean-zero sphere field with independent standard normal coefficients
/// on degrees `1..=cap`.
pub fn random_sphere_field(cap: usize, rng: &mut ChaCha8Rng) -> HarmonicField {
    let mut f = HarmonicField::zeros(HarmonicBasis::Sphere2, cap);
    for c in f.coeffs.iter_mut().skip(1) {
        *c = rng.sample(StandardNormal);
    }
    f
}

// ---------------------------------------------------------------------------
// Gauss space

fn check_hermite_field(f: &HarmonicField) -> Result<()> {
    if f.basis != HarmonicBasis::Hermite1d {
        return Err(Error::Invalid("expected a Hermite field".into()));
    }
    if f.coeffs.len() != f.degree_cap + 1 {
        return Err(Error::Invalid("coefficient vector has the wrong length".into()));
    }
    Ok(())
}

/// `∇∘(−L)^{−1/2}` on `L²(γ₁)`: degree `k` is divided by `√k`, then
/// `He_k' = k·He_{k−1}`. Net effect `c_k ↦ √k·c_k` moved to degree `k − 1`.
pub fn ou_riesz_1d(f: &HarmonicField) -> Result<HarmonicField> {
    check_hermite_field(f)?;
    if !f.is_mean_zero() {
        return Err(Error::Invalid(format!("nonzero mean {}", f.mean())));
    }
    let mut out = HarmonicField::zeros(HarmonicBasis::Hermite1d, f.degree_cap);
    for k in 1..=f.degree_cap {
        let kf = k as f64;
        out.coeffs[k - 1] = f.coeffs[k] / kf.sqrt() * kf;
    }
    Ok(out)
}

/// `Σ c_k He_k(x)` by the three-term recurrence.
pub fn hermite_eval(coeffs: &[f64], x: f64) -> f64 {
    let mut sum = 0.0;
    let (mut h0, mut h1) = (1.0, x);
    for (k, &c) in coeffs.iter().enumerate() {
        let hk = match k {
            0 => h0,
            1 => h1,
            _ => {
                let h2 = x * h1 - (k - 1) as f64 * h0;
                h0 = h1;
                h1 = h2;
                h2
            }
        };
        sum += c * hk;
    }
    sum
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum GaussMode {
    /// `∫_E|Rf|dγ ≤ 2K∫Ψ(|f|)dγ + γ(E)/(K−1)`, `K > 1`.
    Llogl { k: f64 },
    /// `∫_E|Rf|dγ ≤ 2K_p‖f‖_p γ(E)^{1−1/p}`.
    Weak { p: f64 },
}

/// Integration of functions of polynomials against `γ₁` over interval
/// unions: panels of fixed width on `[−cut, cut]`, split at sign changes
/// of the polynomials involved, each integrated by Gauss–Legendre.
#[derive(Debug, Clone)]
pub struct GaussQuad {
    rule: GaussLegendre,
    nodes: usize,
    panel: f64,
    cut: f64,
}

impl GaussQuad {
    /// Rule with `4N + 8` nodes per panel for polynomials of degree `N`.
    pub fn for_degree(n: usize) -> Self {
        let nodes = 4 * n + 8;
        Self {
            rule: GaussLegendre::new(nodes),
            nodes,
            panel: 0.25,
            cut: 14.0,
        }
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    fn supports(&self, degree: usize) -> Result<()> {
        if self.nodes < 4 * degree {
            return Err(Error::Invalid(format!(
                "{} nodes cannot resolve degree {degree}",
                self.nodes
            )));
        }
        Ok(())
    }

    fn breakpoints(&self, lo: f64, hi: f64, polys: &[&[f64]]) -> Vec<f64> {
        let mut pts = vec![lo];
        let steps = ((hi - lo) / self.panel).ceil().max(1.0) as usize;
        let h = (hi - lo) / steps as f64;
        for s in 0..steps {
            let a = lo + s as f64 * h;
            let b = if s + 1 == steps { hi } else { a + h };
            let mut roots: Vec<f64> = polys
                .iter()
                .filter_map(|c| {
                    let (fa, fb) = (hermite_eval(c, a), hermite_eval(c, b));
                    (fa * fb < 0.0).then(|| bisect_root(c, a, b, fa))
                })
                .collect();
            roots.sort_by(f64::total_cmp);
            pts.extend(roots);
            pts.push(b);
        }
        pts
    }

    /// `∫_E g(x) dγ₁(x)` where `g` has kinks only at roots of `polys`.
    pub fn integrate<G: Fn(f64) -> f64>(&self, set: &[(f64, f64)], polys: &[&[f64]], g: G) -> f64 {
        let dens = |x: f64| (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
        set.iter()
            .map(|&(a, b)| {
                let lo = a.max(-self.cut);
                let hi = b.min(self.cut);
                if !(hi > lo) {
                    return 0.0;
                }
                self.breakpoints(lo, hi, polys)
                    .windows(2)
                    .map(|w| self.rule.integrate(|x| g(x) * dens(x), w[0], w[1]))
                    .sum::<f64>()
            })
            .sum()
    }
}

fn bisect_root(c: &[f64], mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = hermite_eval(c, m);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

/// `γ₁(E)` for a union of disjoint intervals, by the same panel rule as
/// the other Gauss-space integrals.
pub fn gauss_measure(set: &[(f64, f64)]) -> f64 {
    GaussQuad::for_degree(0).integrate(set, &[], |_| 1.0)
}

fn check_intervals(set: &[(f64, f64)]) -> Result<()> {
    let mut sorted = set.to_vec();
    sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
    for w in sorted.windows(2) {
        if w[1].0 < w[0].1 {
            return Err(Error::Invalid("overlapping intervals".into()));
        }
    }
    if set.iter().any(|&(a, b)| a.is_nan() || b.is_nan() || b < a) {
        return Err(Error::Invalid("malformed interval".into()));
    }
    Ok(())
}

/// Both sides of the Gauss-space LLogL or weak-type inequality for a
/// mean-zero Hermite polynomial `f` and a union of disjoint intervals `E`.
pub fn check_gauss_inequalities_with(
    quad: &GaussQuad,
    f: &HarmonicField,
    set: &[(f64, f64)],
    mode: GaussMode,
) -> Result<InequalityRecord> {
    check_hermite_field(f)?;
    quad.supports(f.degree_cap)?;
    check_intervals(set)?;
    let rf = ou_riesz_1d(f)?;
    let (fc, rc) = (&f.coeffs[..], &rf.coeffs[..]);
    let measure = gauss_measure(set);
    let lhs = quad.integrate(set, &[rc], |x| hermite_eval(rc, x).abs());
    let whole = [(f64::NEG_INFINITY, f64::INFINITY)];
    let rhs = match mode {
        GaussMode::Llogl { k } => {
            if !(k > 1.0) || !k.is_finite() {
                return Err(domain("check_gauss_inequalities", k, "K > 1"));
            }
            let psi = quad.integrate(&whole, &[fc], |x| young_psi(hermite_eval(fc, x).abs()));
            2.0 * k * psi + measure / (k - 1.0)
        }
        GaussMode::Weak { p } => {
            let kp = k_p(p)?;
            let norm = quad
                .integrate(&whole, &[fc], |x| hermite_eval(fc, x).abs().powf(p))
                .powf(1.0 / p);
            2.0 * kp * norm * measure.powf(1.0 - 1.0 / p)
        }
    };
    Ok(InequalityRecord::new(lhs, rhs, false))
}

pub fn check_gauss_inequalities(f: &HarmonicField, set: &[(f64, f64)], mode: GaussMode) -> Result<InequalityRecord> {
    check_gauss_inequalities_with(&GaussQuad::for_degree(f.degree_cap), f, set, mode)
}

/// A mean-zero Hermite polynomial with `c_k ~ N(0, 1/k!)` on `1..=degree`.
pub fn random_hermite_field(degree: usize, rng: &mut ChaCha8Rng) -> HarmonicField {
    let mut f = HarmonicField::zeros(HarmonicBasis::Hermite1d, degree);
    for k in 1..=degree {
        let z: f64 = rng.sample(StandardNormal);
        f.coeffs[k] = z / factorial(k).sqrt();
    }
    f
}

/// A union of up to three disjoint random intervals inside `[−4, 4]`, or
/// the whole line with probability 1/8.
pub fn random_interval_union(rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    if rng.random_range(0..8) == 0 {
        return vec![(f64::NEG_INFINITY, f64::INFINITY)];
    }
    let count = rng.random_range(1..=3usize);
    let mut cuts: Vec<f64> = (0..2 * count).map(|_| rng.random_range(-4.0..4.0)).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.chunks(2).map(|c| (c[0], c[1])).collect()
}

/// Gauss-space checks on random Hermite polynomials of degree up to
/// `max_degree` against random interval unions.
pub fn gauss_sweep(mode: GaussMode, trials: usize, max_degree: usize, seed: u64) -> Result<Vec<TrialRecord>> {
    use rayon::prelude::*;
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = rng_for(seed, trial as u64);
            let degree = rng.random_range(1..=max_degree.max(1));
            let mut f = random_hermite_field(degree, &mut rng);
            let height = (6.0 * rng.random::<f64>()).exp();
            f.coeffs.iter_mut().for_each(|c| *c *= height);
            let set = random_interval_union(&mut rng);
            let r = check_gauss_inequalities(&f, &set, mode)?;
            Ok(TrialRecord {
                trial,
                lhs: r.lhs,
                rhs: r.rhs,
                slack: r.slack,
            })
        })
        .collect()
}
