//! The `fast` and `full` check suites. `fast` runs every deterministic
//! check; `full` adds the Monte Carlo experiments.

use martlab::burkholder::SpecialFn;
use martlab::martsim;

use crate::commands::{self, CmdError, Rows};
use crate::config::Params;
use crate::report::Row;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Fast,
    Full,
}

impl Suite {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "fast" => Some(Suite::Fast),
            "full" => Some(Suite::Full),
            _ => None,
        }
    }
}

pub fn with(params: &Params, pairs: &[(&str, String)]) -> Result<Params, CmdError> {
    let mut p = params.clone();
    for (k, v) in pairs {
        p.set(k, v)?;
    }
    Ok(p)
}

fn worst(rows: Vec<Row>) -> Vec<Row> {
    commands::worst_of(rows).into_iter().collect()
}

/// Functions and parameters for the majorization scans.
pub fn majorization_set() -> Result<Vec<SpecialFn>, martlab::Error> {
    let mut out = Vec::new();
    for p in [1.2, 1.5] {
        out.push(SpecialFn::burkholder_lt2(p)?);
        out.push(SpecialFn::weak_lt2(p)?);
    }
    for p in [3.0, 5.0] {
        out.push(SpecialFn::burkholder_ge2(p)?);
        out.push(SpecialFn::weak_gt2(p)?);
    }
    for p in [1.2, 1.5, 3.0, 5.0] {
        out.push(SpecialFn::davis(p)?);
    }
    for k in [1.5, 2.0, 5.0] {
        out.push(SpecialFn::log_u(k)?);
    }
    Ok(out)
}

/// Functions and parameters for the interface and concavity scans, with
/// the scan radius for each.
pub fn smoothness_set() -> Result<Vec<(SpecialFn, Option<f64>)>, martlab::Error> {
    let mut out = Vec::new();
    for p in [1.2, 1.5] {
        out.push((SpecialFn::weak_lt2(p)?, None));
    }
    for p in [2.0, 3.0, 5.0] {
        out.push((SpecialFn::burkholder_ge2(p)?, None));
    }
    for p in [3.0, 5.0] {
        out.push((SpecialFn::weak_gt2(p)?, None));
    }
    for p in [0.5, 1.0, 1.2, 1.5, 3.0, 5.0] {
        out.push((SpecialFn::davis(p)?, Some(4.0)));
    }
    for k in [1.5, 2.0, 5.0] {
        out.push((SpecialFn::log_u(k)?, None));
    }
    Ok(out)
}

fn deterministic(params: &Params) -> Rows {
    let mut rows = vec![commands::weak_d1_row(params)?];
    rows.extend(commands::branch_rows(params)?);
    rows.extend(commands::log_constant_rows(params)?);
    for f in majorization_set()? {
        rows.push(commands::majorization_row(&f, params)?);
    }
    for (f, radius) in smoothness_set()? {
        let p = match radius {
            Some(r) => with(params, &[("radius", r.to_string())])?,
            None => params.clone(),
        };
        rows.extend(commands::smoothness_rows(&f, &p)?);
    }
    rows.push(commands::integral_identity_row(1.5, params)?);
    rows.extend(spectral(params)?);
    if params.bool_or("negative_control", false)? {
        rows.push(commands::negative_control_row(params)?);
    }
    Ok(rows)
}

/// Worst-trial rows of every spectral check.
pub fn spectral(params: &Params) -> Rows {
    let mut rows = Vec::new();
    for p in ["1.5", "2", "4"] {
        let q = with(
            params,
            &[("p", p.into()), ("grid", "16384".into()), ("trials", "1000".into())],
        )?;
        rows.extend(worst(commands::riesz_circle("lp", &q)?));
    }
    let q = with(params, &[("p", "4".into()), ("grid", "16384".into())])?;
    rows.extend(commands::riesz_circle("extremal", &q)?);
    let q = with(params, &[("grid", "16384".into()), ("trials", "100".into())])?;
    rows.extend(worst(commands::riesz_circle("isometry", &q)?));
    let q = with(
        params,
        &[("k", "1".into()), ("grid", "4096".into()), ("trials", "1000".into())],
    )?;
    rows.extend(worst(commands::riesz_circle("llogl", &q)?));
    for p in ["1.5", "2", "3"] {
        let q = with(
            params,
            &[("p", p.into()), ("grid", "4096".into()), ("trials", "1000".into())],
        )?;
        rows.extend(worst(commands::riesz_circle("weak", &q)?));
    }
    for check in ["lp", "llogl", "weak"] {
        let q = with(
            params,
            &[
                ("grid", "64".into()),
                ("trials", "100".into()),
                ("direction", "2".into()),
            ],
        )?;
        rows.extend(worst(commands::riesz_torus(check, &q)?));
    }
    let q = with(params, &[("n", "12".into()), ("trials", "72".into())])?;
    rows.extend(worst(commands::riesz_sphere("duality", &q)?));
    let q = with(params, &[("trials", "100".into()), ("degree", "12".into())])?;
    rows.extend(worst(commands::riesz_gauss("isometry", &q)?));
    let q = with(
        params,
        &[("k", "2".into()), ("trials", "1000".into()), ("degree", "10".into())],
    )?;
    rows.extend(worst(commands::riesz_gauss("llogl", &q)?));
    for p in ["1.5", "3"] {
        let q = with(
            params,
            &[("p", p.into()), ("trials", "1000".into()), ("degree", "10".into())],
        )?;
        rows.extend(worst(commands::riesz_gauss("weak", &q)?));
    }
    Ok(rows)
}

fn monte_carlo(params: &Params) -> Rows {
    let mc = with(
        params,
        &[("paths", "10000".into()), ("dt", "0.0001".into()), ("t", "1".into())],
    )?;
    let seed = mc.u64_or("seed", 0)?;
    let mut rows = Vec::new();
    for p in [1.5, 3.0] {
        rows.push(commands::lp_row(p, &mc)?);
    }
    let runs: [(&str, f64); 3] = [("llogl", 2.0), ("llogl", 5.0), ("weak", 1.5)];
    for (kind, v) in runs {
        let run = |dt: f64, seed: u64| match kind {
            "llogl" => martsim::extremal_llogl(v, 10_000, dt, seed),
            _ => martsim::extremal_weak(v, 10_000, dt, seed),
        };
        let a = run(1e-4, seed)?;
        let b = run(5e-5, seed.wrapping_add(1))?;
        rows.extend(commands::extremal_rows(&a, &mc)?);
        rows.extend(commands::extremal_rows(&b, &mc)?);
        rows.push(commands::richardson_row(&a, &b));
    }
    let ex = with(&mc, &[("dim", "3".into())])?;
    rows.extend(commands::exit_rows(&ex)?);
    Ok(rows)
}

pub fn run(suite: Suite, params: &Params) -> Rows {
    let mut rows = deterministic(params)?;
    if suite == Suite::Full {
        rows.extend(monte_carlo(params)?);
    }
    Ok(rows)
}
