//! The `constants`, `eval`, `verify`, `simulate` and `riesz` subcommands.
//! Each turns a [`Params`] map into result rows.

use std::f64::consts::PI;
use std::fmt;

use martlab::burkholder::{
    self, scan_c1_and_concavity, scan_majorization, scan_majorization_unchecked, DavisPoint, GridScanReport, Lemma,
    PairPoint, ScanConfig, SpecialFn,
};
use martlab::constants::{self, p_star, pichorides};
use martlab::martsim::{self, LpConfig, PotentialSpec, TransformSpec};
use martlab::specfun::{self, SeriesEval};
use martlab::spectral::{self, FourierPlan, GaussMode, RieszOp, SphereBasis, SphereRieszKind, SweepCheck, TrialRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Params, UsageError};
use crate::report::{Provenance, Row};

#[derive(Debug)]
pub enum CmdError {
    Usage(UsageError),
    Module(martlab::Error),
}

impl fmt::Display for CmdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CmdError::Usage(e) => write!(f, "usage: {e}"),
            CmdError::Module(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CmdError {}

impl From<UsageError> for CmdError {
    fn from(e: UsageError) -> Self {
        CmdError::Usage(e)
    }
}

impl From<martlab::Error> for CmdError {
    fn from(e: martlab::Error) -> Self {
        CmdError::Module(e)
    }
}

pub type Rows = Result<Vec<Row>, CmdError>;

fn usage(msg: impl Into<String>) -> CmdError {
    CmdError::Usage(UsageError(msg.into()))
}

pub fn param(name: &str, v: f64) -> String {
    format!("{name}={v}")
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

// ---------------------------------------------------------------------------
// constants

/// Every named constant at `p` (default 2) and `K` (default 2).
pub fn constants(params: &Params) -> Rows {
    let p = params.f64_or("p", 2.0)?;
    let k = params.f64_or("k", 2.0)?;
    Ok(constants::constants_table(p, k)?
        .into_iter()
        .map(|c| {
            let name = if c.name == "L" { "K" } else { "p" };
            Row::info("constants", &c.name, param(name, c.p_or_k), c.value, c.method.into()).with_std_err(c.est_error)
        })
        .collect())
}

// ---------------------------------------------------------------------------
// eval

fn required(params: &Params, key: &str) -> Result<f64, CmdError> {
    params.f64_opt(key)?.ok_or_else(|| usage(format!("missing --{key}")))
}

/// One special-function value selected by `function`.
pub fn eval(params: &Params) -> Rows {
    let name = params
        .str("function")
        .ok_or_else(|| usage("missing --function"))?
        .to_string();
    let get = |k: &str| required(params, k);
    let pair = || -> Result<PairPoint, CmdError> { Ok(PairPoint::scalar(get("x")?, get("y")?)) };
    let (value, method, label) = match name.as_str() {
        "burkholder_lt2" => (
            burkholder::burkholder_u_lt2(get("p")?, &pair()?)?,
            Provenance::ClosedForm,
            "p",
        ),
        "burkholder_lt2_integral" => (
            burkholder::burkholder_u_lt2_integral(get("p")?, &pair()?)?,
            Provenance::Quadrature,
            "p",
        ),
        "burkholder_ge2" => (
            burkholder::burkholder_u_ge2(get("p")?, &pair()?)?,
            Provenance::ClosedForm,
            "p",
        ),
        "log_u" | "log_U" => (burkholder::log_u(get("k")?, &pair()?)?, Provenance::ClosedForm, "k"),
        "weak_lt2" => (burkholder::weak_u_lt2(get("p")?, &pair()?)?, Provenance::Root, "p"),
        "weak_gt2" => (
            burkholder::weak_u_gt2(get("p")?, &pair()?)?,
            Provenance::ClosedForm,
            "p",
        ),
        "davis" => {
            let pt = DavisPoint::new(vec![get("x")?], get("t")?)?;
            (burkholder::davis_u(get("p")?, &pt)?, Provenance::Series, "p")
        }
        "nu_p" => (specfun::nu_p(get("p")?, None)?, Provenance::Root, "p"),
        "mu_p" => (specfun::mu_p(get("p")?, None)?, Provenance::Root, "p"),
        "gamma_zero" => (specfun::gamma_zero(get("p")?)?, Provenance::ClosedForm, "p"),
        "gamma" => (specfun::gamma_fn(get("p")?, get("t")?)?, Provenance::ClosedForm, "p"),
        "h_inverse" => (specfun::h_inverse(get("p")?, get("x")?)?, Provenance::Root, "p"),
        "kummer_m" => (
            specfun::kummer_m(get("a")?, get("b")?, get("z")?, &SeriesEval::default())?,
            Provenance::Series,
            "a",
        ),
        "confluent_mp" => (specfun::confluent_mp(get("p")?, get("x")?)?, Provenance::Series, "p"),
        "parabolic_h" => (specfun::parabolic_h(get("p")?, get("x")?)?, Provenance::Series, "p"),
        "bessel_i0" => (specfun::bessel_i0(get("z")?)?, Provenance::Series, "z"),
        "phi_cylinder" => (
            specfun::phi_cylinder(params.usize_or("dim", 3)? as u32, get("t")?)?,
            Provenance::Series,
            "t",
        ),
        other => return Err(usage(format!("unknown function '{other}'"))),
    };
    let shown = params.f64_opt(label)?.unwrap_or(f64::NAN);
    Ok(vec![Row::info("eval", &name, param(label, shown), value, method)])
}

// ---------------------------------------------------------------------------
// verify

/// The special function named by `function`, with its parameter from `p`
/// or `k`.
pub fn special_fn(params: &Params) -> Result<SpecialFn, CmdError> {
    let name = params.str("function").ok_or_else(|| usage("missing --function"))?;
    Ok(match name {
        "burkholder_lt2" => SpecialFn::burkholder_lt2(params.f64_or("p", 1.5)?)?,
        "burkholder_ge2" => SpecialFn::burkholder_ge2(params.f64_or("p", 3.0)?)?,
        "log_u" | "log_U" => SpecialFn::log_u(params.f64_or("k", 2.0)?)?,
        "weak_lt2" => SpecialFn::weak_lt2(params.f64_or("p", 1.5)?)?,
        "weak_gt2" => SpecialFn::weak_gt2(params.f64_or("p", 3.0)?)?,
        "davis" => SpecialFn::davis(params.f64_or("p", 1.5)?)?,
        other => return Err(usage(format!("unknown function '{other}'"))),
    })
}

fn label_of(f: &SpecialFn) -> String {
    let key = if matches!(f, SpecialFn::LogU { .. }) { "K" } else { "p" };
    param(key, f.parameter())
}

fn scan_row(r: &GridScanReport, label: String) -> Row {
    let mut row = Row::upper(
        &r.check,
        &r.function,
        label,
        r.worst_violation,
        r.tolerance,
        Provenance::ClosedForm,
    );
    row.pass = r.pass;
    row
}

/// Majorization of `f` against its own lemma on `points` low-discrepancy
/// points.
pub fn majorization_row(f: &SpecialFn, params: &Params) -> Result<Row, CmdError> {
    let cfg = scan_config(f, params)?;
    let lemma = Lemma::matching(f);
    let r = scan_majorization(f, lemma, &cfg)?;
    let tol = params.threshold("tol_majorization")?;
    let name = format!("{} vs {}", f.name(), lemma.name());
    Ok(Row::upper(
        "majorization",
        &name,
        label_of(f),
        r.worst_violation,
        tol,
        Provenance::ClosedForm,
    ))
}

fn scan_config(f: &SpecialFn, params: &Params) -> Result<ScanConfig, CmdError> {
    Ok(ScanConfig {
        n_points: params.usize_or("points", 100_000)?,
        seed: params.u64_or("seed", 0)?,
        radius: params.f64_or("radius", f.natural_radius())?,
        ..ScanConfig::default()
    })
}

/// Interface, quadratic-form, monotonicity and PDE scans for `f`.
pub fn smoothness_rows(f: &SpecialFn, params: &Params) -> Rows {
    let cfg = scan_config(f, params)?;
    Ok(scan_c1_and_concavity(f, &cfg)?
        .iter()
        .map(|r| scan_row(r, label_of(f)))
        .collect())
}

/// `burkholder_U_lt2` against its integral form at 20 random points of
/// `(0, 3]²`.
pub fn integral_identity_row(p: f64, params: &Params) -> Result<Row, CmdError> {
    let mut rng = rng_for(params.u64_or("seed", 0)?, 6);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let pt = PairPoint::scalar(rng.random_range(0.01..3.0), rng.random_range(0.01..3.0));
        let a = burkholder::burkholder_u_lt2(p, &pt)?;
        let b = burkholder::burkholder_u_lt2_integral(p, &pt)?;
        worst = worst.max((a - b).abs());
    }
    let tol = params.threshold("tol_integral")?;
    Ok(Row::upper(
        "integral_identity",
        "burkholder_lt2",
        param("p", p),
        worst,
        tol,
        Provenance::Quadrature,
    ))
}

/// Deliberately mismatched scan: `log_U` at `K = 2` against the `p = 3/2`
/// weak-type majorant. Expected to fail.
pub fn negative_control_row(params: &Params) -> Result<Row, CmdError> {
    let f = SpecialFn::log_u(2.0)?;
    let cfg = scan_config(&f, params)?;
    let lemma = Lemma::Maj2 { p: 1.5 };
    let r = scan_majorization_unchecked(&f, lemma, &cfg)?;
    let tol = params.threshold("tol_majorization")?;
    let name = format!("{} vs {}", f.name(), lemma.name());
    Ok(Row::upper(
        "negative_control",
        &name,
        label_of(&f),
        r.worst_violation,
        tol,
        Provenance::ClosedForm,
    ))
}

/// `verify --function F [--check majorization|smoothness|integral|all]`.
pub fn verify(params: &Params) -> Rows {
    let f = special_fn(params)?;
    let check = params.str_or("check", "all");
    let mut rows = Vec::new();
    if matches!(check, "all" | "majorization") {
        rows.push(majorization_row(&f, params)?);
    }
    if matches!(check, "all" | "smoothness") {
        rows.extend(smoothness_rows(&f, params)?);
    }
    if let SpecialFn::BurkholderLt2 { p } = f {
        if matches!(check, "all" | "integral") {
            rows.push(integral_identity_row(p, params)?);
        }
    }
    if !matches!(check, "all" | "majorization" | "smoothness" | "integral") {
        return Err(usage(format!("unknown check '{check}'")));
    }
    if params.bool_or("negative_control", false)? {
        rows.push(negative_control_row(params)?);
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// simulate

struct McSettings {
    paths: usize,
    dt: f64,
    t: f64,
    seed: u64,
}

fn mc_settings(params: &Params) -> Result<McSettings, CmdError> {
    Ok(McSettings {
        paths: params.usize_or("paths", 10_000)?,
        dt: params.f64_or("dt", 1e-4)?,
        t: params.f64_or("t", 1.0)?,
        seed: params.u64_or("seed", 0)?,
    })
}

fn potential(params: &Params) -> Result<Option<PotentialSpec>, CmdError> {
    let a = params.f64_or("a", 1.0)?;
    match params.str_or("potential", "minus_identity") {
        "none" => Ok(None),
        "minus_identity" => Ok(Some(PotentialSpec::scaled_identity(1, a, 1.0)?)),
        other => Err(usage(format!("unknown potential '{other}'"))),
    }
}

/// `‖Z_T‖_p/‖X_T‖_p` for the sign transform of `X = B` and its Feynman–Kac
/// transform, against `p* − 1`.
pub fn lp_row(p: f64, params: &Params) -> Result<Row, CmdError> {
    let s = mc_settings(params)?;
    let cfg = LpConfig {
        p,
        t: s.t,
        dt: s.dt,
        n_paths: s.paths,
        transform: TransformSpec::scalar_sign(),
        potential: potential(params)?,
        seed: s.seed,
    };
    let est = martsim::estimate_lp_ratio(&cfg)?;
    let bound = p_star(p)? - 1.0;
    Ok(Row::upper_tol(
        "feynman_kac_lp",
        "|Z_T|_p/|X_T|_p",
        param("p", p),
        est.mean,
        bound,
        3.0 * est.std_err,
        Provenance::Mc,
    )
    .with_std_err(est.std_err))
}

fn davis_rows(p: f64, params: &Params) -> Rows {
    let s = mc_settings(params)?;
    let pot = potential(params)?;
    let d = martsim::estimate_davis_ratio(p, s.t, s.dt, s.paths, pot.as_ref(), s.seed)?;
    Ok(vec![
        Row::upper_tol(
            "davis",
            "terminal",
            param("p", p),
            d.terminal.mean,
            d.terminal_bound,
            3.0 * d.terminal.std_err,
            Provenance::Mc,
        )
        .with_std_err(d.terminal.std_err),
        Row::upper_tol(
            "davis",
            "maximal",
            param("p", p),
            d.maximal.mean,
            d.maximal_bound,
            3.0 * d.maximal.std_err,
            Provenance::Mc,
        )
        .with_std_err(d.maximal.std_err),
    ])
}

/// Rows for one extremal run: the relative gap (must be within `tol_gap`
/// of zero), its plain-mean version, and the unstopped-path count.
pub fn extremal_rows(rec: &martsim::ExtremalRecord, params: &Params) -> Rows {
    let label = format!(
        "{}={} dt={}",
        if rec.experiment.contains("llogl") { "K" } else { "p" },
        rec.parameter,
        rec.dt
    );
    let tol = params.threshold("tol_gap")?;
    let mut rows = vec![
        Row::near(
            "extremal",
            &format!("{} gap", rec.experiment),
            label.clone(),
            rec.gap,
            0.0,
            tol,
            Provenance::Mc,
        )
        .with_std_err(rec.gap_std_err),
        Row::info(
            "extremal",
            &format!("{} gap_raw", rec.experiment),
            label.clone(),
            rec.gap_raw,
            Provenance::Mc,
        )
        .with_std_err(rec.gap_raw_std_err),
        Row::info(
            "extremal",
            &format!("{} unstopped", rec.experiment),
            label.clone(),
            rec.unstopped as f64,
            Provenance::Mc,
        ),
    ];
    if let (Some(r), Some(reference)) = (rec.ratio, rec.ratio_reference) {
        let mut row = Row::info(
            "extremal",
            &format!("{} ratio", rec.experiment),
            label,
            r,
            Provenance::Mc,
        );
        row.rhs = Some(reference);
        rows.push(row);
    }
    Ok(rows)
}

/// `|gap(dt) − gap(dt/2)| ≤ 3·√(se₁² + se₂²)`.
pub fn richardson_row(a: &martsim::ExtremalRecord, b: &martsim::ExtremalRecord) -> Row {
    let band = 3.0 * a.gap_std_err.hypot(b.gap_std_err);
    let label = format!("{}", a.parameter);
    Row::upper(
        "richardson",
        &a.experiment,
        label,
        (a.gap - b.gap).abs(),
        band,
        Provenance::Mc,
    )
}

/// `E τ` and `E τ³` for the exit of `dim`-dimensional Brownian motion from
/// the unit ball.
pub fn exit_rows(params: &Params) -> Rows {
    let s = mc_settings(params)?;
    let dim = params.usize_or("dim", 3)?;
    let m = martsim::exit_time_moments(dim, 3, s.paths, s.dt, s.seed)?;
    let tol = params.threshold("tol_exit")?;
    let label = param("dim", dim as f64);
    let e1 = &m.moments[0];
    let target = 1.0 / dim as f64;
    let mut rows = vec![
        Row::near(
            "exit_time",
            "E tau",
            label.clone(),
            e1.mean,
            target,
            tol * target,
            Provenance::Mc,
        )
        .with_std_err(e1.std_err),
        Row::info("exit_time", "E tau^2", label.clone(), m.moments[1].mean, Provenance::Mc)
            .with_std_err(m.moments[1].std_err),
    ];
    let e3 = &m.moments[2];
    if dim == 3 {
        rows.push(
            Row::upper_tol(
                "exit_time",
                "E tau^3",
                label,
                e3.mean,
                2.0 / 9.0,
                3.0 * e3.std_err,
                Provenance::Mc,
            )
            .with_std_err(e3.std_err),
        );
    } else {
        rows.push(Row::info("exit_time", "E tau^3", label, e3.mean, Provenance::Mc).with_std_err(e3.std_err));
    }
    Ok(rows)
}

/// `simulate --experiment lp|davis|llogl|weak|exit`.
pub fn simulate(params: &Params) -> Rows {
    let s = mc_settings(params)?;
    match params.str("experiment").ok_or_else(|| usage("missing --experiment"))? {
        "lp" => Ok(vec![lp_row(params.f64_or("p", 1.5)?, params)?]),
        "davis" => davis_rows(params.f64_or("p", 1.5)?, params),
        "llogl" => extremal_rows(
            &martsim::extremal_llogl(params.f64_or("k", 2.0)?, s.paths, s.dt, s.seed)?,
            params,
        ),
        "weak" => extremal_rows(
            &martsim::extremal_weak(params.f64_or("p", 1.5)?, s.paths, s.dt, s.seed)?,
            params,
        ),
        "exit" => exit_rows(params),
        other => Err(usage(format!("unknown experiment '{other}'"))),
    }
}

// ---------------------------------------------------------------------------
// riesz

fn trial_rows(check: &str, name: &str, label: &str, recs: &[TrialRecord], tol: f64, method: Provenance) -> Vec<Row> {
    recs.iter()
        .map(|r| Row::upper_tol(check, name, label.to_string(), r.lhs, r.rhs, tol, method).with_trial(r.trial))
        .collect()
}

/// The trial with the smallest slack, labelled with the trial count.
pub fn worst_of(rows: Vec<Row>) -> Option<Row> {
    let n = rows.len();
    let pass = rows.iter().all(|r| r.pass);
    let mut worst = rows.into_iter().min_by(|a, b| {
        a.slack
            .unwrap_or(f64::INFINITY)
            .total_cmp(&b.slack.unwrap_or(f64::INFINITY))
    })?;
    worst.parameter = format!("{} trials={n}", worst.parameter);
    worst.pass = pass;
    Some(worst)
}

fn sweep_settings(params: &Params, grid: usize, degree: usize) -> Result<(usize, usize, usize, u64), CmdError> {
    Ok((
        params.usize_or("grid", grid)?,
        params.usize_or("trials", 1000)?,
        params.usize_or("degree", degree)?,
        params.u64_or("seed", 0)?,
    ))
}

/// Circle: `lp`, `llogl`, `weak`, `isometry` or `extremal`.
pub fn riesz_circle(check: &str, params: &Params) -> Rows {
    let tol = params.threshold("tol_slack")?;
    match check {
        "lp" => {
            let p = params.f64_or("p", 4.0)?;
            let (n, trials, degree, seed) = sweep_settings(params, 1 << 14, 64)?;
            let slack = params.threshold("lp_slack")?;
            let recs = spectral::hilbert_lp_sweep(n, p, trials, degree, seed)?;
            Ok(recs
                .iter()
                .map(|r| {
                    Row::upper(
                        "circle_lp",
                        "|Hf|_p/|f|_p",
                        format!("p={p} grid={n}"),
                        r.lhs,
                        r.rhs * (1.0 + slack),
                        Provenance::ClosedForm,
                    )
                    .with_trial(r.trial)
                })
                .collect())
        }
        "llogl" => {
            let k = params.f64_or("k", 1.0)?;
            let (n, trials, degree, seed) = sweep_settings(params, 1 << 12, 32)?;
            let recs = spectral::circle_llogl_sweep(n, k, trials, degree, seed)?;
            Ok(trial_rows(
                "circle_llogl",
                "hilbert",
                &format!("K={k} grid={n}"),
                &recs,
                tol,
                Provenance::ClosedForm,
            ))
        }
        "weak" => {
            let p = params.f64_or("p", 1.5)?;
            let (n, trials, degree, seed) = sweep_settings(params, 1 << 12, 32)?;
            let recs = spectral::circle_weak_sweep(n, p, trials, degree, seed)?;
            Ok(trial_rows(
                "circle_weak",
                "hilbert",
                &format!("p={p} grid={n}"),
                &recs,
                tol,
                Provenance::ClosedForm,
            ))
        }
        "isometry" => {
            let (n, trials, degree, seed) = sweep_settings(params, 1 << 14, 64)?;
            let tol = params.threshold("tol_isometry")?;
            let plan = FourierPlan::new(&[n])?;
            (0..trials)
                .map(|trial| {
                    let mut rng = rng_for(seed, trial as u64);
                    let d = rng.random_range(1..=degree.max(1));
                    let f = spectral::SpectralField::with_plan(
                        &plan,
                        spectral::random_trig_polynomial(&plan, d, &mut rng),
                    )?;
                    let h = spectral::hilbert_circle_with(&plan, &f);
                    let w = f.cell_weight();
                    let (a, b) = (
                        spectral::lp_norm(&h.samples, 2.0, w),
                        spectral::lp_norm(&f.samples, 2.0, w),
                    );
                    Ok(Row::near(
                        "circle_isometry",
                        "|Hf|_2",
                        format!("grid={n}"),
                        a,
                        b,
                        tol,
                        Provenance::ClosedForm,
                    )
                    .with_trial(trial))
                })
                .collect()
        }
        "extremal" => {
            let p = params.f64_or("p", 4.0)?;
            let n = params.usize_or("grid", 1 << 14)?;
            let alpha = spectral::near_extremal_alpha(p);
            let ratio = spectral::power_law_ratio(n, p, alpha)?;
            let target = params.threshold("extremal_fraction")? * pichorides(p)?;
            Ok(vec![Row::lower(
                "circle_extremal",
                "power_law",
                format!("p={p} alpha={alpha} grid={n}"),
                ratio,
                target,
                Provenance::ClosedForm,
            )])
        }
        other => Err(usage(format!("unknown circle check '{other}'"))),
    }
}

/// Torus `R_j` on a `grid^dim` grid: `lp`, `llogl` or `weak`.
pub fn riesz_torus(check: &str, params: &Params) -> Rows {
    let tol = params.threshold("tol_slack")?;
    let (n, trials, degree, seed) = sweep_settings(params, 64, 8)?;
    let dim = params.usize_or("dim", 2)?;
    let j = params.usize_or("direction", 1)?;
    let shape = vec![n; dim];
    let (sweep, label) = match check {
        "lp" => {
            let p = params.f64_or("p", 4.0)?;
            (SweepCheck::Lp { p }, format!("p={p}"))
        }
        "llogl" => {
            let k = params.f64_or("k", 1.0)?;
            (SweepCheck::Llogl { k }, format!("K={k}"))
        }
        "weak" => {
            let p = params.f64_or("p", 1.5)?;
            (SweepCheck::Weak { p }, format!("p={p}"))
        }
        other => return Err(usage(format!("unknown torus check '{other}'"))),
    };
    let recs = spectral::riesz_sweep(&shape, RieszOp::Torus(j), sweep, trials, degree, seed)?;
    let label = format!("{label} j={j} grid={n}^{dim}");
    let mut rows = trial_rows(
        &format!("torus_{check}"),
        "riesz",
        &label,
        &recs,
        tol,
        Provenance::ClosedForm,
    );
    if let SweepCheck::Lp { .. } = sweep {
        let slack = params.threshold("lp_slack")?;
        for r in &mut rows {
            let bound = r.rhs.unwrap_or(f64::NAN) * (1.0 + slack);
            *r = Row::upper(&r.check, &r.name, r.parameter.clone(), r.lhs, bound, r.method)
                .with_trial(r.trial.unwrap_or(0));
        }
    }
    Ok(rows)
}

/// Sphere duality residuals for random fields up to degree `n`, cycling
/// through both transform types and the three coordinate pairs.
pub fn riesz_sphere(check: &str, params: &Params) -> Rows {
    if check != "duality" {
        return Err(usage(format!("unknown sphere check '{check}'")));
    }
    let cap = params.usize_or("n", 12)?;
    let trials = params.usize_or("trials", 60)?;
    let seed = params.u64_or("seed", 0)?;
    let tol = params.threshold("tol_duality")?;
    let basis = SphereBasis::new(cap)?;
    let kinds = [SphereRieszKind::Cylinder, SphereRieszKind::Ball];
    let pairs = [(1, 2), (2, 3), (3, 1)];
    (0..trials)
        .map(|trial| {
            let mut rng = rng_for(seed, trial as u64);
            let n = 1 + trial % cap.max(1);
            let kind = kinds[trial % 2];
            let pair = pairs[(trial / 2) % 3];
            let f = spectral::random_sphere_field(n.min(cap), &mut rng);
            let g = spectral::random_sphere_field(n.min(cap), &mut rng);
            let r = spectral::check_sphere_duality(&basis, &f, &g, kind, pair)?;
            let name = match kind {
                SphereRieszKind::Cylinder => "cylinder",
                SphereRieszKind::Ball => "ball",
            };
            Ok(Row::upper(
                "sphere_duality",
                name,
                format!("N={n} pair={}{}", pair.0, pair.1),
                r,
                tol,
                Provenance::ClosedForm,
            )
            .with_trial(trial))
        })
        .collect()
}

/// Gauss space: `llogl`, `weak` or `isometry`.
pub fn riesz_gauss(check: &str, params: &Params) -> Rows {
    let trials = params.usize_or("trials", 1000)?;
    let degree = params.usize_or("degree", 10)?;
    let seed = params.u64_or("seed", 0)?;
    let tol = params.threshold("tol_slack")?;
    match check {
        "llogl" | "weak" => {
            let (mode, label) = if check == "llogl" {
                let k = params.f64_or("k", 2.0)?;
                (GaussMode::Llogl { k }, format!("K={k}"))
            } else {
                let p = params.f64_or("p", 1.5)?;
                (GaussMode::Weak { p }, format!("p={p}"))
            };
            let recs = spectral::gauss_sweep(mode, trials, degree, seed)?;
            Ok(trial_rows(
                &format!("gauss_{check}"),
                "ou_riesz",
                &label,
                &recs,
                tol,
                Provenance::Quadrature,
            ))
        }
        "isometry" => {
            let tol = params.threshold("tol_isometry")?;
            (0..trials)
                .map(|trial| {
                    let mut rng = rng_for(seed, trial as u64);
                    let d = rng.random_range(1..=degree.max(1));
                    let f = spectral::random_hermite_field(d, &mut rng);
                    let r = spectral::ou_riesz_1d(&f)?;
                    Ok(Row::near(
                        "gauss_isometry",
                        "|R f|_2",
                        format!("N={d}"),
                        r.norm()?,
                        f.norm()?,
                        tol,
                        Provenance::ClosedForm,
                    )
                    .with_trial(trial))
                })
                .collect()
        }
        other => Err(usage(format!("unknown gauss check '{other}'"))),
    }
}

/// `riesz --domain circle|torus|sphere|gauss --check ...`.
pub fn riesz(params: &Params) -> Rows {
    let domain = params.str_or("domain", "circle");
    let check = params.str("check").ok_or_else(|| usage("missing --check"))?;
    match domain {
        "circle" => riesz_circle(check, params),
        "torus" => riesz_torus(check, params),
        "sphere" => riesz_sphere(check, params),
        "gauss" => riesz_gauss(check, params),
        other => Err(usage(format!("unknown domain '{other}'"))),
    }
}

/// `∫_ℝ log²|t|/(t²+1) dt` by adaptive quadrature, for comparison with
/// `π³/4`.
pub fn log_square_integral() -> Result<f64, CmdError> {
    let q = martlab::quad::Adaptive::new(1e-14, 1e-12);
    // four times the piece over (0, 1], t = e^{−v}
    let v = q.integrate_to_inf(|v: f64| v * v * (-v).exp() / (1.0 + (-2.0 * v).exp()), 0.0)?;
    Ok(4.0 * v.value)
}

pub fn k_times_l(k: f64) -> Result<f64, CmdError> {
    Ok(k * constants::l_k(k)?.value)
}

pub fn branch_rows(params: &Params) -> Rows {
    let tol = params.threshold("tol_branch")?;
    let c_lo = constants::c_p_lower_branch(2.0)?;
    let c_hi = constants::c_p_upper_branch(2.0)?;
    let k_lo = constants::k_p_lower_branch(2.0)?;
    let k_hi = constants::k_p_upper_branch(2.0)?;
    Ok(vec![
        Row::near(
            "constants",
            "D_p nu-branch",
            param("p", 2.0),
            specfun::nu_p(2.0, None)?,
            1.0,
            tol,
            Provenance::Root,
        ),
        Row::near(
            "constants",
            "D_p mu-branch",
            param("p", 2.0),
            specfun::mu_p(2.0, None)?,
            1.0,
            tol,
            Provenance::Root,
        ),
        Row::near(
            "constants",
            "C_p branches",
            param("p", 2.0),
            c_lo,
            c_hi,
            tol,
            Provenance::Series,
        ),
        Row::near(
            "constants",
            "K_p branches",
            param("p", 2.0),
            k_lo,
            k_hi,
            tol,
            Provenance::ClosedForm,
        ),
    ])
}

pub fn log_constant_rows(params: &Params) -> Rows {
    let rel = params.threshold("tol_lk")?;
    let q = params.threshold("tol_quadrature")?;
    let oracle = PI.powi(3) / 4.0;
    Ok(vec![
        Row::near(
            "constants",
            "K*L(K)",
            param("K", 100.0),
            k_times_l(100.0)?,
            0.5,
            rel * 0.5,
            Provenance::Quadrature,
        ),
        Row::near(
            "constants",
            "int log^2|t|/(t^2+1)",
            String::new(),
            log_square_integral()?,
            oracle,
            q * oracle,
            Provenance::Quadrature,
        ),
    ])
}

pub fn weak_d1_row(params: &Params) -> Result<Row, CmdError> {
    let tol = params.threshold("tol_d1")?;
    Ok(Row::near(
        "constants",
        "davis_weak_d1",
        String::new(),
        constants::davis_weak_d1(),
        1.328_434_313_301,
        tol,
        Provenance::Series,
    ))
}
