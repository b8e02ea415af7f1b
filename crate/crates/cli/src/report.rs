//! Result rows and their CSV/JSON renderings.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

pub const TOOL_VERSION: &str = concat!("martlab ", env!("CARGO_PKG_VERSION"));

/// How a number was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    Series,
    Quadrature,
    Root,
    Mc,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::ClosedForm => "closed_form",
            Provenance::Series => "series",
            Provenance::Quadrature => "quadrature",
            Provenance::Root => "root",
            Provenance::Mc => "mc",
        }
    }
}

impl From<martlab::constants::Method> for Provenance {
    fn from(m: martlab::constants::Method) -> Self {
        use martlab::constants::Method;
        match m {
            Method::ClosedForm => Provenance::ClosedForm,
            Method::Series => Provenance::Series,
            Method::Quadrature => Provenance::Quadrature,
            Method::Root => Provenance::Root,
        }
    }
}

/// One result. `lhs` is the computed quantity, `rhs` what it is compared
/// with (bound, target or tolerance), and `slack` their signed margin in
/// the direction that must stay nonnegative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub check: String,
    pub name: String,
    pub parameter: String,
    pub trial: Option<usize>,
    pub lhs: f64,
    pub rhs: Option<f64>,
    pub slack: Option<f64>,
    pub std_err: Option<f64>,
    pub method: Provenance,
    pub pass: bool,
}

impl Row {
    /// A value with nothing to compare against.
    pub fn info(check: &str, name: &str, parameter: String, value: f64, method: Provenance) -> Self {
        Self {
            check: check.into(),
            name: name.into(),
            parameter,
            trial: None,
            lhs: value,
            rhs: None,
            slack: None,
            std_err: None,
            method,
            pass: true,
        }
    }

    /// Passes when `lhs ≤ rhs`.
    pub fn upper(check: &str, name: &str, parameter: String, lhs: f64, rhs: f64, method: Provenance) -> Self {
        let slack = rhs - lhs;
        Self {
            check: check.into(),
            name: name.into(),
            parameter,
            trial: None,
            lhs,
            rhs: Some(rhs),
            slack: Some(slack),
            std_err: None,
            method,
            pass: slack >= 0.0,
        }
    }

    /// Passes when `|lhs − target| ≤ tol`; `slack = tol − |lhs − target|`.
    pub fn near(
        check: &str,
        name: &str,
        parameter: String,
        lhs: f64,
        target: f64,
        tol: f64,
        method: Provenance,
    ) -> Self {
        let slack = tol - (lhs - target).abs();
        Self {
            check: check.into(),
            name: name.into(),
            parameter,
            trial: None,
            lhs,
            rhs: Some(target),
            slack: Some(slack),
            std_err: None,
            method,
            pass: slack >= 0.0,
        }
    }

    /// Passes when `lhs ≤ rhs + tol`.
    pub fn upper_tol(
        check: &str,
        name: &str,
        parameter: String,
        lhs: f64,
        rhs: f64,
        tol: f64,
        method: Provenance,
    ) -> Self {
        let mut r = Self::upper(check, name, parameter, lhs, rhs, method);
        r.pass = rhs - lhs >= -tol;
        r
    }

    /// Passes when `lhs ≥ rhs`; `slack = lhs − rhs`.
    pub fn lower(check: &str, name: &str, parameter: String, lhs: f64, rhs: f64, method: Provenance) -> Self {
        let mut r = Self::upper(check, name, parameter, lhs, rhs, method);
        r.slack = Some(lhs - rhs);
        r.pass = lhs >= rhs;
        r
    }

    pub fn with_std_err(mut self, se: f64) -> Self {
        self.std_err = Some(se);
        self
    }

    pub fn with_trial(mut self, trial: usize) -> Self {
        self.trial = Some(trial);
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub version: &'static str,
    pub config: BTreeMap<String, String>,
    pub rows: Vec<Row>,
    pub pass: bool,
    pub wall_time: f64,
}

impl RunReport {
    pub fn new(config: BTreeMap<String, String>, rows: Vec<Row>, wall_time: f64) -> Self {
        let pass = rows.iter().all(|r| r.pass);
        Self {
            version: TOOL_VERSION,
            config,
            rows,
            pass,
            wall_time,
        }
    }
}

/// Rounds to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        let r = round15(x);
        if r != 0.0 && (r.abs() < 1e-4 || r.abs() >= 1e15) {
            format!("{r:e}")
        } else {
            r.to_string()
        }
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

pub const CSV_COLUMNS: [&str; 10] = [
    "check",
    "name",
    "parameter",
    "trial",
    "lhs",
    "rhs",
    "slack",
    "std_err",
    "method",
    "pass",
];

/// CSV with `#` header lines for the version and every config entry, then a
/// header row. Wall time is not written, so equal runs give equal bytes.
pub fn write_csv<W: Write>(report: &RunReport, mut w: W) -> std::io::Result<()> {
    writeln!(w, "# {}", report.version)?;
    for (k, v) in &report.config {
        writeln!(w, "# {k}={v}")?;
    }
    writeln!(w, "# pass={}", report.pass)?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_COLUMNS)?;
    for r in &report.rows {
        out.write_record([
            r.check.clone(),
            r.name.clone(),
            r.parameter.clone(),
            r.trial.map(|t| t.to_string()).unwrap_or_default(),
            fmt_num(r.lhs),
            fmt_opt(r.rhs),
            fmt_opt(r.slack),
            fmt_opt(r.std_err),
            r.method.as_str().to_string(),
            r.pass.to_string(),
        ])?;
    }
    out.flush()
}

/// JSON object with `version`, `config`, `rows`, `pass` and `wall_time`.
/// Numbers are rounded to 15 significant digits; non-finite ones become
/// `null`.
pub fn write_json<W: Write>(report: &RunReport, w: W) -> std::io::Result<()> {
    let mut rounded = report.clone();
    for r in &mut rounded.rows {
        r.lhs = round15(r.lhs);
        r.rhs = r.rhs.map(round15);
        r.slack = r.slack.map(round15);
        r.std_err = r.std_err.map(round15);
    }
    serde_json::to_writer_pretty(w, &rounded).map_err(std::io::Error::other)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunReport {
        let mut cfg = BTreeMap::new();
        cfg.insert("seed".to_string(), "42".to_string());
        RunReport::new(
            cfg,
            vec![
                Row::upper("c", "a", "p=2".into(), 1.0 / 3.0, 0.5, Provenance::Mc).with_std_err(0.01),
                Row::info("c", "b, quoted", String::new(), f64::INFINITY, Provenance::Root),
            ],
            1.25,
        )
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&sample(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], format!("# {TOOL_VERSION}"));
        assert_eq!(lines[1], "# seed=42");
        assert_eq!(lines[2], "# pass=true");
        assert_eq!(lines[3], CSV_COLUMNS.join(","));
        assert_eq!(
            lines[4],
            "c,a,p=2,,0.333333333333333,0.5,0.166666666666667,0.01,mc,true"
        );
        assert_eq!(lines[5], "c,\"b, quoted\",,,inf,,,,root,true");
        assert!(!text.contains("1.25"));
        let tiny = RunReport::new(
            BTreeMap::new(),
            vec![Row::info(
                "c",
                "t",
                String::new(),
                -3.720579400123821e-12,
                Provenance::ClosedForm,
            )],
            0.0,
        );
        let mut buf = Vec::new();
        write_csv(&tiny, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().contains(",-3.72057940012382e-12,"));
    }

    #[test]
    fn json_layout() {
        let mut buf = Vec::new();
        write_json(&sample(), &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["pass"], true);
        assert_eq!(v["rows"][0]["lhs"], 0.333333333333333);
        assert_eq!(v["rows"][0]["method"], "mc");
        assert!(v["rows"][1]["lhs"].is_null());
        assert_eq!(v["config"]["seed"], "42");
    }

    #[test]
    fn pass_is_the_conjunction() {
        let rows = vec![
            Row::upper("c", "a", String::new(), 1.0, 2.0, Provenance::ClosedForm),
            Row::near("c", "b", String::new(), 1.0, 2.0, 0.5, Provenance::ClosedForm),
        ];
        assert!(rows[0].pass && !rows[1].pass);
        assert!(!RunReport::new(BTreeMap::new(), rows, 0.0).pass);
    }

    #[test]
    fn rounding() {
        assert_eq!(round15(0.1 + 0.2), 0.3);
        assert_eq!(round15(-1.0 / 3.0), -0.333333333333333);
        assert_eq!(round15(0.0), 0.0);
    }
}
