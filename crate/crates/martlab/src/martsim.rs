//! Monte Carlo for Brownian paths, stochastic integrals, differential
//! subordination, the Feynman–Kac matrix transform, Davis-type bounds and the
//! two extremal constructions.
//!
//! Every path draws from its own ChaCha8 stream keyed by `(seed, path index)`,
//! and ensembles are collected in path order, so results do not depend on the
//! number of worker threads.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::constants::{a_p_bound, davis_dp, k_p, young_psi};
use crate::error::domain;
use crate::specfun::{gamma_zero, GammaTable};
use crate::{Error, Result};

/// RNG for one path of an ensemble.
pub fn path_rng(seed: u64, path: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path);
    rng
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Sign with `sgn(0) = 1`.
pub fn sgn(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// A path on a uniform grid with its running quadratic variation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathGrid {
    pub dt: f64,
    pub values: Vec<Vec<f64>>,
    pub qv: Vec<f64>,
}

impl PathGrid {
    pub fn n_steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    pub fn terminal(&self) -> &[f64] {
        &self.values[self.values.len() - 1]
    }

    fn increment(&self, k: usize) -> Vec<f64> {
        self.values[k + 1]
            .iter()
            .zip(&self.values[k])
            .map(|(b, a)| b - a)
            .collect()
    }
}

/// Brownian path in `ℝⁿ` from `start`; `qv` accumulates `n·dt` per step.
pub fn simulate_bm(n: usize, n_steps: usize, dt: f64, start: &[f64], seed: u64) -> Result<PathGrid> {
    simulate_bm_path(n, n_steps, dt, start, seed, 0)
}

/// Path number `path` of a Brownian ensemble.
pub fn simulate_bm_path(n: usize, n_steps: usize, dt: f64, start: &[f64], seed: u64, path: u64) -> Result<PathGrid> {
    if !(dt > 0.0) {
        return Err(domain("simulate_bm", dt, "dt > 0"));
    }
    if start.len() != n {
        return Err(Error::Invalid(format!(
            "start has dimension {}, expected {n}",
            start.len()
        )));
    }
    let mut rng = path_rng(seed, path);
    let sd = dt.sqrt();
    let mut values = Vec::with_capacity(n_steps + 1);
    values.push(start.to_vec());
    for k in 0..n_steps {
        let next = values[k].iter().map(|v| v + sd * normal(&mut rng)).collect();
        values.push(next);
    }
    let mut qv = Vec::with_capacity(n_steps + 1);
    qv.push(0.0);
    for k in 0..n_steps {
        qv.push(qv[k] + n as f64 * dt);
    }
    Ok(PathGrid { dt, values, qv })
}

/// `∫ H dB` by the left-endpoint rule. The integrand sees the driver up to
/// and including the left endpoint and returns an `out_dim × n` matrix, row
/// major. The result starts at 0 and carries `qv[k] = Σ ‖H_j‖²·dt`.
pub fn ito_integral<F>(out_dim: usize, driver: &PathGrid, mut integrand: F) -> Result<PathGrid>
where
    F: FnMut(usize, &[Vec<f64>]) -> Vec<f64>,
{
    let n = driver.dim();
    let mut values = Vec::with_capacity(driver.values.len());
    let mut qv = Vec::with_capacity(driver.values.len());
    values.push(vec![0.0; out_dim]);
    qv.push(0.0);
    for k in 0..driver.n_steps() {
        let h = integrand(k, &driver.values[..=k]);
        if h.len() != out_dim * n {
            return Err(Error::Invalid(format!(
                "integrand has {} entries, expected {}",
                h.len(),
                out_dim * n
            )));
        }
        let db = driver.increment(k);
        let prev = &values[k];
        let next: Vec<f64> = (0..out_dim)
            .map(|i| prev[i] + (0..n).map(|j| h[i * n + j] * db[j]).sum::<f64>())
            .collect();
        values.push(next);
        qv.push(qv[k] + h.iter().map(|v| v * v).sum::<f64>() * driver.dt);
    }
    Ok(PathGrid {
        dt: driver.dt,
        values,
        qv,
    })
}

/// Outcome of a subordination check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Subordination {
    pub holds: bool,
    /// Smallest increment of `[X,X] − [Y,Y]`, or `|X₀| − |Y₀|` if smaller.
    pub worst_margin: f64,
}

/// `Y` is subordinate to `X` iff `|Y₀| ≤ |X₀|` and every increment of
/// `[X,X] − [Y,Y]` is at least `−1e−12`.
pub fn check_subordination(x: &PathGrid, y: &PathGrid) -> Result<Subordination> {
    if x.qv.len() != y.qv.len() || x.dt != y.dt {
        return Err(Error::Invalid("paths are on different grids".into()));
    }
    let norm = |v: &[f64]| v.iter().map(|c| c * c).sum::<f64>().sqrt();
    let start = norm(&x.values[0]) - norm(&y.values[0]);
    let worst = (0..x.qv.len() - 1)
        .map(|k| (x.qv[k + 1] - x.qv[k]) - (y.qv[k + 1] - y.qv[k]))
        .fold(start, f64::min);
    Ok(Subordination {
        holds: start >= 0.0 && worst >= -1e-12,
        worst_margin: worst,
    })
}

/// Cyclic Jacobi eigendecomposition of a symmetric `n × n` matrix (row
/// major). Returns eigenvalues and eigenvectors as the columns of a row-major
/// matrix.
pub fn symmetric_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut m = a.to_vec();
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        q[i * n + i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum();
        if off == 0.0 || off.sqrt() < 1e-15 * (1.0 + m.iter().map(|v| v.abs()).fold(0.0, f64::max)) {
            break;
        }
        for p in 0..n {
            for r in p + 1..n {
                let apr = m[p * n + r];
                if apr == 0.0 {
                    continue;
                }
                let theta = (m[r * n + r] - m[p * n + p]) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkr = m[k * n + r];
                    m[k * n + p] = c * mkp - s * mkr;
                    m[k * n + r] = s * mkp + c * mkr;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mrk = m[r * n + k];
                    m[p * n + k] = c * mpk - s * mrk;
                    m[r * n + k] = s * mpk + c * mrk;
                }
                for k in 0..n {
                    let qkp = q[k * n + p];
                    let qkr = q[k * n + r];
                    q[k * n + p] = c * qkp - s * qkr;
                    q[k * n + r] = s * qkp + c * qkr;
                }
            }
        }
    }
    ((0..n).map(|i| m[i * n + i]).collect(), q)
}

/// Operator 2-norm of an `n × n` matrix.
pub fn operator_norm(a: &[f64], n: usize) -> f64 {
    let mut ata = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            ata[i * n + j] = (0..n).map(|k| a[k * n + i] * a[k * n + j]).sum();
        }
    }
    let (ev, _) = symmetric_eigen(&ata, n);
    ev.into_iter().fold(0.0, f64::max).sqrt()
}

type MatrixCallback = Arc<dyn Fn(usize, &[Vec<f64>]) -> Vec<f64> + Send + Sync>;
type PotentialCallback = Arc<dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync>;

/// How the transforming integrand is produced.
#[derive(Clone)]
pub enum TransformKind {
    /// `K = sgn(X)` on a one-dimensional driver.
    ScalarSign,
    /// `K = A`, a fixed `n × n` matrix.
    FixedMatrix(Vec<f64>),
    /// `K_k` from the driver history up to step `k`, an `n × n` matrix.
    Predictable(MatrixCallback),
}

impl fmt::Debug for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ScalarSign => write!(f, "ScalarSign"),
            Self::FixedMatrix(m) => f.debug_tuple("FixedMatrix").field(m).finish(),
            Self::Predictable(_) => write!(f, "Predictable(..)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    Subordinate,
    OrthogonalSubordinate,
}

/// A martingale transform `Y = ∫ K dX` of `X = B`.
#[derive(Debug, Clone)]
pub struct TransformSpec {
    pub dim: usize,
    pub kind: TransformKind,
    pub constraint: Constraint,
}

impl TransformSpec {
    pub fn scalar_sign() -> Self {
        Self {
            dim: 1,
            kind: TransformKind::ScalarSign,
            constraint: Constraint::Subordinate,
        }
    }

    /// Fixed matrix, checked against the constraint.
    pub fn fixed_matrix(dim: usize, matrix: Vec<f64>, constraint: Constraint) -> Result<Self> {
        if matrix.len() != dim * dim {
            return Err(Error::Invalid(format!(
                "matrix has {} entries, expected {}",
                matrix.len(),
                dim * dim
            )));
        }
        check_transform_matrix(&matrix, dim, constraint)?;
        Ok(Self {
            dim,
            kind: TransformKind::FixedMatrix(matrix),
            constraint,
        })
    }

    pub fn predictable(dim: usize, constraint: Constraint, f: MatrixCallback) -> Self {
        Self {
            dim,
            kind: TransformKind::Predictable(f),
            constraint,
        }
    }

    fn matrix_at(&self, k: usize, history: &[Vec<f64>]) -> Result<Vec<f64>> {
        match &self.kind {
            TransformKind::ScalarSign => Ok(vec![sgn(history[k][0])]),
            TransformKind::FixedMatrix(m) => Ok(m.clone()),
            TransformKind::Predictable(f) => {
                let m = f(k, history);
                if m.len() != self.dim * self.dim {
                    return Err(Error::Invalid("callback matrix has the wrong size".into()));
                }
                check_transform_matrix(&m, self.dim, self.constraint)?;
                Ok(m)
            }
        }
    }
}

fn check_transform_matrix(m: &[f64], n: usize, constraint: Constraint) -> Result<()> {
    let norm = operator_norm(m, n);
    if norm > 1.0 + 1e-12 {
        return Err(domain("transform operator norm", norm, "<= 1"));
    }
    if constraint == Constraint::OrthogonalSubordinate {
        for i in 0..n {
            for j in 0..=i {
                let sym = 0.5 * (m[i * n + j] + m[j * n + i]);
                if sym.abs() > 1e-12 {
                    return Err(domain("transform symmetric part", sym, "0"));
                }
            }
        }
    }
    Ok(())
}

/// Applies a transform to a Brownian path `X = B`: `Y = ∫ K dB`, `Y₀ = 0`.
pub fn apply_transform(spec: &TransformSpec, x: &PathGrid) -> Result<PathGrid> {
    if x.dim() != spec.dim {
        return Err(Error::Invalid(format!(
            "transform of dimension {} on a path of dimension {}",
            spec.dim,
            x.dim()
        )));
    }
    let mut err = None;
    let y = ito_integral(spec.dim, x, |k, h| match spec.matrix_at(k, h) {
        Ok(m) => m,
        Err(e) => {
            err.get_or_insert(e);
            vec![0.0; spec.dim * spec.dim]
        }
    });
    match err {
        Some(e) => Err(e),
        None => y,
    }
}

/// The potential `𝒱` of the Feynman–Kac transform.
#[derive(Clone)]
pub enum Potential {
    Constant(Vec<f64>),
    /// `(t, Y_t) ↦ 𝒱_t`, sampled at left endpoints.
    Callback(PotentialCallback),
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(m) => f.debug_tuple("Constant").field(m).finish(),
            Self::Callback(_) => write!(f, "Callback(..)"),
        }
    }
}

/// Damping rate `a ≥ 0` and a symmetric non-positive potential.
#[derive(Debug, Clone)]
pub struct PotentialSpec {
    pub dim: usize,
    pub a: f64,
    pub v: Potential,
}

impl PotentialSpec {
    pub fn constant(dim: usize, a: f64, v: Vec<f64>) -> Result<Self> {
        if v.len() != dim * dim {
            return Err(Error::Invalid("potential matrix has the wrong size".into()));
        }
        check_potential(&v, dim)?;
        Self::new(dim, a, Potential::Constant(v))
    }

    /// `𝒱 = −c·Id`.
    pub fn scaled_identity(dim: usize, a: f64, c: f64) -> Result<Self> {
        let mut v = vec![0.0; dim * dim];
        for i in 0..dim {
            v[i * dim + i] = -c;
        }
        Self::constant(dim, a, v)
    }

    pub fn callback(dim: usize, a: f64, f: PotentialCallback) -> Result<Self> {
        Self::new(dim, a, Potential::Callback(f))
    }

    fn new(dim: usize, a: f64, v: Potential) -> Result<Self> {
        if !(a >= 0.0) {
            return Err(domain("potential rate a", a, "a >= 0"));
        }
        Ok(Self { dim, a, v })
    }
}

fn check_potential(v: &[f64], n: usize) -> Result<()> {
    for i in 0..n {
        for j in 0..i {
            let d = (v[i * n + j] - v[j * n + i]).abs();
            if d > 1e-12 {
                return Err(domain("potential asymmetry", d, "<= 1e-12"));
            }
        }
    }
    let (ev, _) = symmetric_eigen(v, n);
    let top = ev.into_iter().fold(f64::NEG_INFINITY, f64::max);
    if top > 1e-10 {
        return Err(domain("potential eigenvalue", top, "<= 1e-10"));
    }
    Ok(())
}

/// `φ₁(z) − 1 = (eᶻ − 1 − z)/z`.
fn phi1_minus_one(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        z / 2.0 + z * z / 6.0 + z * z * z / 24.0
    } else {
        (z.exp_m1() - z) / z
    }
}

/// Step operators `e^{AΔ} − I` and `φ₁(AΔ) − I` for `A = 𝒱 − aI`.
struct StepOps {
    n: usize,
    exp_m1: Vec<f64>,
    phi_m1: Vec<f64>,
}

impl StepOps {
    fn new(v: &[f64], a: f64, n: usize, dt: f64) -> Self {
        let mut m = v.to_vec();
        for i in 0..n {
            m[i * n + i] -= a;
        }
        let (ev, q) = symmetric_eigen(&m, n);
        let build = |f: &dyn Fn(f64) -> f64| {
            let d: Vec<f64> = ev.iter().map(|&l| f(l * dt)).collect();
            let mut out = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    out[i * n + j] = (0..n).map(|k| q[i * n + k] * d[k] * q[j * n + k]).sum();
                }
            }
            out
        };
        Self {
            n,
            exp_m1: build(&|z: f64| z.exp_m1()),
            phi_m1: build(&phi1_minus_one),
        }
    }

    /// `W ← e^{AΔ}W + (e^{AΔ} − I)(Y_k − Y₀) + (φ₁ − I)ΔY`, with `Z = W + Y − Y₀`.
    fn advance(&self, w: &mut [f64], centred: &[f64], dy: &[f64]) {
        let n = self.n;
        let mut next = vec![0.0; n];
        for i in 0..n {
            let mut acc = w[i];
            for j in 0..n {
                acc += self.exp_m1[i * n + j] * (w[j] + centred[j]) + self.phi_m1[i * n + j] * dy[j];
            }
            next[i] = acc;
        }
        w.copy_from_slice(&next);
    }
}

/// Scalar version of [`StepOps`] for the common one-dimensional constant case.
#[derive(Clone, Copy)]
struct ScalarStep {
    exp_m1: f64,
    phi_m1: f64,
}

impl ScalarStep {
    fn new(lambda: f64, dt: f64) -> Self {
        Self {
            exp_m1: (lambda * dt).exp_m1(),
            phi_m1: phi1_minus_one(lambda * dt),
        }
    }

    #[inline]
    fn advance(&self, w: f64, centred: f64, dy: f64) -> f64 {
        w + self.exp_m1 * (w + centred) + self.phi_m1 * dy
    }
}

/// Feynman–Kac transform `dZ = (𝒱 − aI)Z dt + dY`, `Z₀ = 0`, by exponential
/// Euler (exact for a potential that is constant over the step).
pub fn feynman_kac_transform(y: &PathGrid, pot: &PotentialSpec) -> Result<PathGrid> {
    let n = y.dim();
    if pot.dim != n {
        return Err(Error::Invalid(format!(
            "potential of dimension {} on a path of dimension {n}",
            pot.dim
        )));
    }
    let constant = match &pot.v {
        Potential::Constant(v) => Some(StepOps::new(v, pot.a, n, y.dt)),
        Potential::Callback(_) => None,
    };
    let y0 = &y.values[0];
    let mut w = vec![0.0; n];
    let mut values = Vec::with_capacity(y.values.len());
    values.push(vec![0.0; n]);
    for k in 0..y.n_steps() {
        let centred: Vec<f64> = y.values[k].iter().zip(y0).map(|(a, b)| a - b).collect();
        let dy = y.increment(k);
        match (&constant, &pot.v) {
            (Some(ops), _) => ops.advance(&mut w, &centred, &dy),
            (None, Potential::Callback(f)) => {
                let v = f(k as f64 * y.dt, &y.values[k]);
                if v.len() != n * n {
                    return Err(Error::Invalid("potential matrix has the wrong size".into()));
                }
                check_potential(&v, n)?;
                StepOps::new(&v, pot.a, n, y.dt).advance(&mut w, &centred, &dy);
            }
            (None, Potential::Constant(_)) => unreachable!(),
        }
        let z = w
            .iter()
            .zip(y.values[k + 1].iter().zip(y0))
            .map(|(w, (a, b))| w + (a - b))
            .collect();
        values.push(z);
    }
    Ok(PathGrid {
        dt: y.dt,
        values,
        qv: y.qv.clone(),
    })
}

/// Mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub n_paths: usize,
    pub seed: u64,
}

/// Sample mean and standard error of the mean.
pub fn mean_estimate(xs: &[f64], seed: u64) -> McEstimate {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    McEstimate {
        mean,
        std_err: (var / n).sqrt(),
        n_paths: xs.len(),
        seed,
    }
}

const BOOTSTRAP_RESAMPLES: usize = 200;

/// Bootstrap standard error of a statistic of paired samples.
pub fn bootstrap_std_err<F>(pairs: &[(f64, f64)], seed: u64, stat: F) -> f64
where
    F: Fn(&[(f64, f64)]) -> f64,
{
    let mut rng = path_rng(seed, u64::MAX);
    let n = pairs.len();
    let mut buf = vec![(0.0, 0.0); n];
    let reps: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| {
            for slot in buf.iter_mut() {
                *slot = pairs[rng.random_range(0..n)];
            }
            stat(&buf)
        })
        .collect();
    let m = reps.iter().sum::<f64>() / reps.len() as f64;
    (reps.iter().map(|r| (r - m) * (r - m)).sum::<f64>() / (reps.len() - 1) as f64).sqrt()
}

fn lp_ratio_of(p: f64, pairs: &[(f64, f64)]) -> f64 {
    let num: f64 = pairs.iter().map(|(_, z)| z.powf(p)).sum();
    let den: f64 = pairs.iter().map(|(x, _)| x.powf(p)).sum();
    (num / den).powf(1.0 / p)
}

/// Ensemble settings for [`estimate_lp_ratio`].
#[derive(Debug, Clone)]
pub struct LpConfig {
    pub p: f64,
    pub t: f64,
    pub dt: f64,
    pub n_paths: usize,
    pub transform: TransformSpec,
    pub potential: Option<PotentialSpec>,
    pub seed: u64,
}

/// `(|X_T|, |Z_T|)` for every path, where `Y` is the transform of `X = B`
/// and `Z` its Feynman–Kac transform (or `Y` itself without a potential).
pub fn simulate_terminal_pairs(cfg: &LpConfig) -> Result<Vec<(f64, f64)>> {
    if !(cfg.dt > 0.0 && cfg.t > 0.0) {
        return Err(domain("time step", cfg.dt, "dt > 0 and T > 0"));
    }
    let n_steps = (cfg.t / cfg.dt).round() as usize;
    let n = cfg.transform.dim;
    if let Some(pot) = &cfg.potential {
        if pot.dim != n {
            return Err(Error::Invalid("potential and transform dimensions differ".into()));
        }
    }
    let scalar = match (&cfg.transform.kind, &cfg.potential) {
        (TransformKind::ScalarSign, None) => Some(ScalarStep::new(0.0, cfg.dt)),
        (TransformKind::ScalarSign, Some(pot)) => match &pot.v {
            Potential::Constant(v) => Some(ScalarStep::new(v[0] - pot.a, cfg.dt)),
            Potential::Callback(_) => None,
        },
        _ => None,
    };
    (0..cfg.n_paths)
        .into_par_iter()
        .map(|i| {
            if let Some(step) = scalar {
                // streaming fast path: X = B, dY = sgn(B) dB, Z from W
                let mut rng = path_rng(cfg.seed, i as u64);
                let sd = cfg.dt.sqrt();
                let (mut x, mut y, mut w) = (0.0f64, 0.0f64, 0.0f64);
                for _ in 0..n_steps {
                    let db = sd * normal(&mut rng);
                    let dy = sgn(x) * db;
                    w = step.advance(w, y, dy);
                    x += db;
                    y += dy;
                }
                Ok((x.abs(), (w + y).abs()))
            } else {
                let b = simulate_bm_path(n, n_steps, cfg.dt, &vec![0.0; n], cfg.seed, i as u64)?;
                let y = apply_transform(&cfg.transform, &b)?;
                let z = match &cfg.potential {
                    Some(pot) => feynman_kac_transform(&y, pot)?,
                    None => y,
                };
                let norm = |v: &[f64]| v.iter().map(|c| c * c).sum::<f64>().sqrt();
                Ok((norm(b.terminal()), norm(z.terminal())))
            }
        })
        .collect()
}

/// `‖Z_T‖_p / ‖X_T‖_p` with a bootstrap standard error.
pub fn estimate_lp_ratio(cfg: &LpConfig) -> Result<McEstimate> {
    if !(cfg.p > 1.0) {
        return Err(domain("estimate_lp_ratio", cfg.p, "p > 1"));
    }
    let pairs = simulate_terminal_pairs(cfg)?;
    lp_ratio_from_pairs(cfg.p, &pairs, cfg.seed)
}

/// The ratio estimate from precomputed `(|X_T|, |Z_T|)` pairs.
pub fn lp_ratio_from_pairs(p: f64, pairs: &[(f64, f64)], seed: u64) -> Result<McEstimate> {
    let den: f64 = pairs.iter().map(|(x, _)| x.powf(p)).sum();
    if !(den > 0.0) {
        return Err(Error::Invalid("degenerate denominator: X_T vanishes".into()));
    }
    Ok(McEstimate {
        mean: lp_ratio_of(p, pairs),
        std_err: bootstrap_std_err(pairs, seed, |s| lp_ratio_of(p, s)),
        n_paths: pairs.len(),
        seed,
    })
}

/// Davis-type ratios with the bounds they are compared to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DavisEstimate {
    pub p: f64,
    /// `‖Z_T‖_p / ‖[Y,Y]_T^{1/2}‖_p`.
    pub terminal: McEstimate,
    pub terminal_bound: f64,
    /// `‖sup_{t≤T}|Z_t|‖_p / ‖[Y,Y]_T^{1/2}‖_p`.
    pub maximal: McEstimate,
    pub maximal_bound: f64,
}

/// Davis ratios for real-valued `Y = B` and its Feynman–Kac transform `Z`.
pub fn estimate_davis_ratio(
    p: f64,
    t: f64,
    dt: f64,
    n_paths: usize,
    pot: Option<&PotentialSpec>,
    seed: u64,
) -> Result<DavisEstimate> {
    if !(p > 0.0) {
        return Err(domain("estimate_davis_ratio", p, "p > 0"));
    }
    if !(dt > 0.0 && t > 0.0) {
        return Err(domain("time step", dt, "dt > 0 and T > 0"));
    }
    let lambda = match pot {
        None => 0.0,
        Some(pot) => match (&pot.v, pot.dim) {
            (Potential::Constant(v), 1) => v[0] - pot.a,
            _ => {
                return Err(Error::Invalid(
                    "the Davis estimate takes a constant one-dimensional potential".into(),
                ))
            }
        },
    };
    let step = ScalarStep::new(lambda, dt);
    let n_steps = (t / dt).round() as usize;
    let samples: Vec<(f64, f64)> = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(seed, i as u64);
            let sd = dt.sqrt();
            let (mut y, mut w, mut sup) = (0.0f64, 0.0f64, 0.0f64);
            for _ in 0..n_steps {
                let dy = sd * normal(&mut rng);
                w = step.advance(w, y, dy);
                y += dy;
                sup = sup.max((w + y).abs());
            }
            ((w + y).abs(), sup)
        })
        .collect();
    let scale = t.sqrt();
    let lp = |s: &[(f64, f64)], pick: fn(&(f64, f64)) -> f64| {
        (s.iter().map(|v| pick(v).powf(p)).sum::<f64>() / s.len() as f64).powf(1.0 / p) / scale
    };
    let term = |v: &(f64, f64)| v.0;
    let max = |v: &(f64, f64)| v.1;
    Ok(DavisEstimate {
        p,
        terminal: McEstimate {
            mean: lp(&samples, term),
            std_err: bootstrap_std_err(&samples, seed, |s| lp(s, term)),
            n_paths,
            seed,
        },
        terminal_bound: davis_dp(p)?,
        maximal: McEstimate {
            mean: lp(&samples, max),
            std_err: bootstrap_std_err(&samples, seed, |s| lp(s, max)),
            n_paths,
            seed,
        },
        maximal_bound: if p > 1.0 { a_p_bound(p)? } else { f64::INFINITY },
    })
}

/// Terminal state of one stopped planar path `(B, D)`.
#[derive(Debug, Clone, Copy)]
struct StoppedPair {
    x: f64,
    y: f64,
    tau: f64,
    stopped: bool,
    /// Least value of the invariant-region slack seen along the path.
    min_slack: f64,
}

/// Runs `dB`, `dD = −sgn(D) dB` from `(x0, y0)` until `boundary(x, y) ≥ 0`,
/// interpolating the crossing linearly on the final step.
fn run_pair<B, S>(
    x0: f64,
    y0: f64,
    dt: f64,
    max_steps: u64,
    rng: &mut ChaCha8Rng,
    boundary: &B,
    slack: &S,
) -> StoppedPair
where
    B: Fn(f64, f64) -> f64,
    S: Fn(f64, f64) -> f64,
{
    let sd = dt.sqrt();
    let (mut x, mut y) = (x0, y0);
    let mut g = boundary(x, y);
    let mut min_slack = slack(x, y);
    if g >= 0.0 {
        return StoppedPair {
            x,
            y,
            tau: 0.0,
            stopped: true,
            min_slack,
        };
    }
    for k in 0..max_steps {
        let db = sd * normal(rng);
        let (nx, ny) = (x + db, y - sgn(y) * db);
        let ng = boundary(nx, ny);
        if ng >= 0.0 {
            let theta = g / (g - ng);
            return StoppedPair {
                x: x + theta * (nx - x),
                y: y + theta * (ny - y),
                tau: (k as f64 + theta) * dt,
                stopped: true,
                min_slack,
            };
        }
        x = nx;
        y = ny;
        g = ng;
        min_slack = min_slack.min(slack(x, y));
    }
    StoppedPair {
        x,
        y,
        tau: max_steps as f64 * dt,
        stopped: false,
        min_slack,
    }
}

/// Mean stopping time cap for the pilot run, in time units.
const PILOT_CAP: f64 = 100.0;
const PILOT_PATHS: usize = 200;
/// Horizon as a multiple of the pilot mean stopping time.
const HORIZON_FACTOR: f64 = 1000.0;
/// Largest tolerated fraction of unstopped paths.
const UNSTOPPED_BUDGET: f64 = 1e-3;

/// Pilot mean of `τ ∧ PILOT_CAP` over streams disjoint from the main run,
/// turned into a step horizon.
fn pilot_horizon<F>(dt: f64, seed: u64, run: F) -> u64
where
    F: Fn(&mut ChaCha8Rng, u64) -> (f64, bool) + Sync,
{
    let cap = (PILOT_CAP / dt).ceil() as u64;
    let taus: Vec<f64> = (0..PILOT_PATHS)
        .into_par_iter()
        .map(|i| run(&mut path_rng(seed, (1u64 << 48) + i as u64), cap).0)
        .collect();
    let mean = taus.iter().sum::<f64>() / taus.len() as f64;
    ((HORIZON_FACTOR * mean / dt).ceil() as u64).max(1)
}

/// Result of an extremal reproduction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalRecord {
    pub experiment: String,
    pub parameter: f64,
    pub dt: f64,
    pub n_paths: usize,
    /// Left side of the identity, e.g. `E|Y_∞|`.
    pub lhs: f64,
    /// Right side of the identity.
    pub rhs: f64,
    /// `(lhs − rhs)/rhs`, with `X_∞ − X₀` and `Y_∞ − Y₀` (mean zero by
    /// optional stopping) regressed out of the per-path difference.
    pub gap: f64,
    /// Standard error of `gap`.
    pub gap_std_err: f64,
    /// `(lhs − rhs)/rhs` from the plain sample means.
    pub gap_raw: f64,
    pub gap_raw_std_err: f64,
    pub mean_tau: f64,
    pub horizon_steps: u64,
    pub unstopped: usize,
    /// Worst excursion below the invariant region, as a positive number.
    pub region_violation: f64,
    /// Extra statistic: `E|Y_∞| / ‖X_∞‖_p` for the weak-type construction.
    pub ratio: Option<f64>,
    pub ratio_reference: Option<f64>,
}

impl ExtremalRecord {
    fn unstopped_error(&self) -> Result<()> {
        if self.unstopped as f64 > UNSTOPPED_BUDGET * self.n_paths as f64 {
            return Err(Error::Unstopped {
                unstopped: self.unstopped,
                n_paths: self.n_paths,
                horizon: self.horizon_steps as usize,
            });
        }
        Ok(())
    }
}

/// Mean of `d` with the controls (each of known mean zero) regressed out by
/// least squares; returns the adjusted mean and its standard error.
pub fn control_variate_mean(d: &[f64], controls: &[Vec<f64>]) -> (f64, f64) {
    let n = d.len();
    let m = controls.len();
    let dm = d.iter().sum::<f64>() / n as f64;
    let cm: Vec<f64> = controls.iter().map(|c| c.iter().sum::<f64>() / n as f64).collect();
    // normal equations S β = s for the centred data
    let mut s_mat = vec![0.0; m * m];
    let mut s_vec = vec![0.0; m];
    for i in 0..n {
        for a in 0..m {
            let ca = controls[a][i] - cm[a];
            s_vec[a] += ca * (d[i] - dm);
            for b in 0..m {
                s_mat[a * m + b] += ca * (controls[b][i] - cm[b]);
            }
        }
    }
    let beta = solve_symmetric(&s_mat, &s_vec, m);
    let adjusted: Vec<f64> = (0..n)
        .map(|i| d[i] - (0..m).map(|a| beta[a] * controls[a][i]).sum::<f64>())
        .collect();
    let est = mean_estimate(&adjusted, 0);
    // m fitted coefficients cost m degrees of freedom
    let inflate = ((n as f64 - 1.0) / (n as f64 - 1.0 - m as f64).max(1.0)).sqrt();
    (est.mean, est.std_err * inflate)
}

/// Solves `S x = b` for symmetric positive semi-definite `S` through its
/// eigendecomposition, dropping null directions.
fn solve_symmetric(s: &[f64], b: &[f64], m: usize) -> Vec<f64> {
    let (ev, q) = symmetric_eigen(s, m);
    let top = ev.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let mut x = vec![0.0; m];
    for k in 0..m {
        if ev[k].abs() <= 1e-12 * top {
            continue;
        }
        let proj: f64 = (0..m).map(|i| q[i * m + k] * b[i]).sum::<f64>() / ev[k];
        for i in 0..m {
            x[i] += proj * q[i * m + k];
        }
    }
    x
}

#[allow(clippy::too_many_arguments)]
fn identity_record(
    experiment: &str,
    parameter: f64,
    dt: f64,
    horizon: u64,
    runs: &[StoppedPair],
    lhs_of: impl Fn(&StoppedPair) -> f64,
    rhs_of: impl Fn(&StoppedPair) -> f64,
    rhs_const: f64,
    start: (f64, f64),
    seed: u64,
) -> ExtremalRecord {
    let n = runs.len();
    let lhs = runs.iter().map(&lhs_of).sum::<f64>() / n as f64;
    let rhs = runs.iter().map(&rhs_of).sum::<f64>() / n as f64 + rhs_const;
    let diffs: Vec<f64> = runs.iter().map(|r| lhs_of(r) - rhs_of(r)).collect();
    let diff = mean_estimate(&diffs, seed);
    let controls = vec![
        runs.iter().map(|r| r.x - start.0).collect::<Vec<_>>(),
        runs.iter().map(|r| r.y - start.1).collect::<Vec<_>>(),
    ];
    let (cv_mean, cv_se) = control_variate_mean(&diffs, &controls);
    ExtremalRecord {
        experiment: experiment.to_string(),
        parameter,
        dt,
        n_paths: n,
        lhs,
        rhs,
        gap: (cv_mean - rhs_const) / rhs,
        gap_std_err: cv_se / rhs.abs(),
        gap_raw: (lhs - rhs) / rhs,
        gap_raw_std_err: diff.std_err / rhs.abs(),
        mean_tau: runs.iter().map(|r| r.tau).sum::<f64>() / n as f64,
        horizon_steps: horizon,
        unstopped: runs.iter().filter(|r| !r.stopped).count(),
        region_violation: runs.iter().map(|r| -r.min_slack).fold(0.0, f64::max),
        ratio: None,
        ratio_reference: None,
    }
}

/// Equality case of the `L log L` bound: `B` from `1/(2(K−1))`,
/// `dD = −sgn(D) dB`, stopped on `|y| = (|x| + 1)/(K − 1)` or when `B` leaves
/// `[0, ∞)`. Compares `E|Y_∞|` with `K·EΨ(|X_∞|) + 1/(2(K−1))`.
///
/// Fails with [`Error::Unstopped`] if more than 0.1% of paths outlive the
/// horizon.
pub fn extremal_llogl(k: f64, n_paths: usize, dt: f64, seed: u64) -> Result<ExtremalRecord> {
    if !(k > 1.0) || !k.is_finite() {
        return Err(domain("extremal_llogl", k, "K > 1"));
    }
    if !(dt > 0.0) {
        return Err(domain("extremal_llogl", dt, "dt > 0"));
    }
    let start = 0.5 / (k - 1.0);
    let boundary = move |x: f64, y: f64| (y.abs() - (x.abs() + 1.0) / (k - 1.0)).max(-x);
    let slack = move |x: f64, y: f64| x.min(x + y.abs() - start);
    let run = |rng: &mut ChaCha8Rng, steps: u64| {
        let r = run_pair(start, start, dt, steps, rng, &boundary, &slack);
        (r.tau, r.stopped)
    };
    let horizon = pilot_horizon(dt, seed, run);
    let runs: Vec<StoppedPair> = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(seed, i as u64);
            run_pair(start, start, dt, horizon, &mut rng, &boundary, &slack)
        })
        .collect();
    let rec = identity_record(
        "llogl",
        k,
        dt,
        horizon,
        &runs,
        |r| r.y.abs(),
        |r| k * young_psi(r.x.abs()),
        start,
        (start, start),
        seed,
    );
    rec.unstopped_error()?;
    Ok(rec)
}

/// Equality case of the weak-type bound for `1 < p < 2`: `B` from `γ(0)/2`,
/// `dD = −sgn(D) dB`, stopped on `|D| = γ(B)`. Compares `E|Y_∞|` with
/// `E|X_∞|^p + γ(0)/2`, and reports `E|Y_∞| / ‖X_∞‖_p` next to `K_p`.
pub fn extremal_weak(p: f64, n_paths: usize, dt: f64, seed: u64) -> Result<ExtremalRecord> {
    if !(p > 1.0 && p < 2.0) {
        return Err(domain("extremal_weak", p, "1 < p < 2"));
    }
    if !(dt > 0.0) {
        return Err(domain("extremal_weak", dt, "dt > 0"));
    }
    let g0 = gamma_zero(p)?;
    let table = GammaTable::new(p, 4.0 * g0 + 20.0, 4096)?;
    let start = 0.5 * g0;
    let boundary = |x: f64, y: f64| (y.abs() - table.eval(x.max(0.0))).max(-x);
    let slack = move |x: f64, y: f64| x.abs() + y.abs() - g0;
    let run = |rng: &mut ChaCha8Rng, steps: u64| {
        let r = run_pair(start, start, dt, steps, rng, &boundary, &slack);
        (r.tau, r.stopped)
    };
    let horizon = pilot_horizon(dt, seed, run);
    let runs: Vec<StoppedPair> = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(seed, i as u64);
            run_pair(start, start, dt, horizon, &mut rng, &boundary, &slack)
        })
        .collect();
    let mut rec = identity_record(
        "weak",
        p,
        dt,
        horizon,
        &runs,
        |r| r.y.abs(),
        |r| r.x.abs().powf(p),
        start,
        (start, start),
        seed,
    );
    let norm_x = (runs.iter().map(|r| r.x.abs().powf(p)).sum::<f64>() / n_paths as f64).powf(1.0 / p);
    rec.ratio = Some(rec.lhs / norm_x);
    rec.ratio_reference = Some(k_p(p)?);
    rec.unstopped_error()?;
    Ok(rec)
}

/// Moments of the exit time of Brownian motion from the unit ball.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExitMoments {
    pub dim: usize,
    pub dt: f64,
    /// `E τ^k` for `k = 1..=k_max`.
    pub moments: Vec<McEstimate>,
    pub horizon_steps: u64,
    pub unstopped: usize,
}

fn exit_time(dim: usize, dt: f64, max_steps: u64, rng: &mut ChaCha8Rng) -> (f64, bool) {
    let sd = dt.sqrt();
    let mut x = vec![0.0f64; dim];
    let mut r2 = 0.0f64;
    for k in 0..max_steps {
        let mut nr2 = 0.0;
        let mut next = [0.0f64; 8];
        for (i, xi) in x.iter().enumerate() {
            let v = xi + sd * normal(rng);
            next[i] = v;
            nr2 += v * v;
        }
        if nr2 >= 1.0 {
            // interpolate |x| = 1 along the last step
            let (r0, r1) = (r2.sqrt(), nr2.sqrt());
            let theta = (1.0 - r0) / (r1 - r0);
            return ((k as f64 + theta) * dt, true);
        }
        x.copy_from_slice(&next[..dim]);
        r2 = nr2;
    }
    (max_steps as f64 * dt, false)
}

/// Monte Carlo `E τ^k`, `k = 1..=k_max`, for the exit time of `dim`-dimensional
/// Brownian motion from the unit ball, started at the centre.
pub fn exit_time_moments(dim: usize, k_max: u32, n_paths: usize, dt: f64, seed: u64) -> Result<ExitMoments> {
    if !(1..=8).contains(&dim) {
        return Err(domain("exit_time_moments dimension", dim as f64, "1..=8"));
    }
    if !(dt > 0.0) {
        return Err(domain("exit_time_moments", dt, "dt > 0"));
    }
    let horizon = pilot_horizon(dt, seed, |rng, steps| exit_time(dim, dt, steps, rng));
    let taus: Vec<(f64, bool)> = (0..n_paths)
        .into_par_iter()
        .map(|i| exit_time(dim, dt, horizon, &mut path_rng(seed, i as u64)))
        .collect();
    let unstopped = taus.iter().filter(|t| !t.1).count();
    if unstopped as f64 > UNSTOPPED_BUDGET * n_paths as f64 {
        return Err(Error::Unstopped {
            unstopped,
            n_paths,
            horizon: horizon as usize,
        });
    }
    let moments = (1..=k_max)
        .map(|k| {
            let xs: Vec<f64> = taus.iter().map(|t| t.0.powi(k as i32)).collect();
            mean_estimate(&xs, seed)
        })
        .collect();
    Ok(ExitMoments {
        dim,
        dt,
        moments,
        horizon_steps: horizon,
        unstopped,
    })
}
