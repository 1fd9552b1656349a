//! Named scenarios with machine-readable tables and pass/fail verdicts.

mod scenarios;

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Registered scenarios and a one-line description of each.
pub const SCENARIOS: [(&str, &str); 7] = [
    (
        "besov-extension-bound",
        "gradient energy of the linear extension against the Besov norm of the data",
    ),
    (
        "layer-estimates",
        "gradient and L1 energy of the linear extension in thin boundary layers",
    ),
    (
        "l1-extension-bound",
        "layered extension of L1 data: schedule invariants and energy bounds",
    ),
    ("trace-recovery", "shrinking-ball traces of extensions recover the data"),
    (
        "thin-tube-counterexample",
        "trace norm against BV norm on thin tubes in exact geometry",
    ),
    (
        "space-comparison",
        "L1, John-Nirenberg and Besov energies of circle fixtures",
    ),
    (
        "regularity-audit",
        "Ahlfors regularity and measure density of the test domains",
    ),
];

/// Run configuration. Fields not used by a scenario are ignored by it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: String,
    /// Domain shapes; most scenarios use the first.
    pub shapes: Vec<String>,
    /// Mesh sweep (boundary sample spacing for circle fixtures).
    pub meshes: Vec<f64>,
    pub fixtures: Vec<String>,
    /// Scenario-specific sweep: `ρ₂` values, `r_min` values or tube orders.
    pub sweep: Vec<f64>,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

fn tol(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

impl ScenarioConfig {
    /// Default configuration of a registered scenario.
    pub fn default_for(scenario: &str) -> Result<Self> {
        let tau = std::f64::consts::TAU;
        let (shapes, meshes, fixtures, sweep, tolerances) = match scenario {
            "besov-extension-bound" => (
                strings(&["unit-square"]),
                vec![1.0 / 32.0, 1.0 / 64.0],
                strings(&["x"]),
                vec![],
                tol(&[("drift", 2.0), ("linearity", 1e-12), ("constant_energy", 1e-9)]),
            ),
            "layer-estimates" => (
                strings(&["unit-square"]),
                vec![1.0 / 64.0],
                strings(&["x", "random-lipschitz", "oscillatory"]),
                vec![0.2, 0.1, 0.05],
                tol(&[("drift", 2.0), ("constant_energy", 1e-9)]),
            ),
            "l1-extension-bound" => (
                strings(&["unit-square"]),
                vec![1.0 / 32.0, 1.0 / 64.0],
                strings(&["step", "arc", "random-lipschitz", "x", "oscillatory"]),
                vec![],
                tol(&[("drift", 2.0), ("lip_sum", 2.0), ("l1_constant", 50.0), ("constant", 1e-12)]),
            ),
            "trace-recovery" => (
                strings(&["unit-square"]),
                vec![1.0 / 128.0, 1.0 / 256.0],
                strings(&["x", "step", "constant"]),
                vec![1.0 / 16.0, 1.0 / 32.0],
                tol(&[
                    ("halving_lo", 0.3),
                    ("halving_hi", 0.7),
                    ("converged_fraction", 0.9),
                    ("constant", 1e-9),
                ]),
            ),
            "thin-tube-counterexample" => (
                strings(&["thin-tubes"]),
                vec![1.0 / 16.0],
                vec![],
                vec![2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0],
                tol(&[("growth_lo", 1.5), ("growth_hi", 2.5), ("exact", 1e-9)]),
            ),
            "space-comparison" => (
                strings(&["disc"]),
                vec![tau / 4096.0],
                strings(&["constant", "step", "arc", "oscillatory", "random-lipschitz", "divergent", "weierstrass"]),
                vec![8.0, 16.0, 32.0],
                tol(&[
                    ("jn_upper", 3.0),
                    ("estimator_spread", 10.0),
                    ("harmonic_band", 2.0),
                    ("weierstrass_besov", 1.5),
                    ("weierstrass_bv", 2.0),
                ]),
            ),
            "regularity-audit" => (
                strings(&["unit-square", "disc", "l-shape"]),
                vec![1.0 / 64.0],
                vec![],
                vec![2.0, 3.0, 4.0, 5.0],
                tol(&[("ahlfors_spread", 25.0), ("density_min", 0.2)]),
            ),
            other => return Err(Error::UnknownScenario(other.to_string())),
        };
        Ok(ScenarioConfig {
            scenario: scenario.to_string(),
            shapes,
            meshes,
            fixtures,
            sweep,
            seed: 0,
            tolerances,
            out_dir: None,
        })
    }

    /// Defaults for `scenario` overlaid with the keys of a JSON object.
    /// Nested objects such as `tolerances` merge key by key.
    pub fn from_json(scenario: Option<&str>, json: &str) -> Result<Self> {
        let overlay: Value = serde_json::from_str(json)?;
        let named = overlay.get("scenario").and_then(Value::as_str);
        let name = match (scenario, named) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::InvalidSpec(format!("config is for {b}, not {a}")));
            }
            (Some(a), _) => a.to_string(),
            (None, Some(b)) => b.to_string(),
            (None, None) => return Err(Error::InvalidSpec("no scenario named".into())),
        };
        let mut base = serde_json::to_value(Self::default_for(&name)?)?;
        merge(&mut base, overlay);
        let cfg: ScenarioConfig = serde_json::from_value(base)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !SCENARIOS.iter().any(|(n, _)| *n == self.scenario) {
            return Err(Error::UnknownScenario(self.scenario.clone()));
        }
        if self.meshes.is_empty() {
            return Err(Error::InvalidSpec("mesh sweep is empty".into()));
        }
        if self.meshes.iter().any(|h| !(*h > 0.0)) {
            return Err(Error::InvalidSpec("mesh sizes must be positive".into()));
        }
        Ok(())
    }

    pub(crate) fn tol(&self, key: &str) -> Result<f64> {
        self.tolerances
            .get(key)
            .copied()
            .ok_or_else(|| Error::InvalidSpec(format!("missing tolerance {key}")))
    }
}

fn merge(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}

/// One table cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        if v.is_finite() {
            Cell::Num(v)
        } else {
            Cell::Text(format!("{v}"))
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Num(v as f64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Num(f64::from(v))
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Num(v) => write!(f, "{v}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: strings(columns),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(ToString::to_string))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8_lossy(&bytes).into_owned())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Op {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

impl Op {
    pub fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            Op::Le => lhs <= rhs,
            Op::Lt => lhs < rhs,
            Op::Ge => lhs >= rhs,
            Op::Gt => lhs > rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Op::Le => "<=",
            Op::Lt => "<",
            Op::Ge => ">=",
            Op::Gt => ">",
        }
    }
}

/// An asserted inequality with both sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub op: Op,
    pub rhs: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, lhs: f64, op: Op, rhs: f64) -> Self {
        Check {
            name: name.into(),
            lhs,
            op,
            rhs,
            pass: op.holds(lhs, rhs),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub config: ScenarioConfig,
    pub tables: Vec<Table>,
    /// Measured constants by name.
    pub constants: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub passed: bool,
    /// Seconds; written to a sidecar file, never into the data payload.
    #[serde(skip)]
    pub wall_time: f64,
}

impl ScenarioReport {
    fn new(config: &ScenarioConfig) -> Self {
        ScenarioReport {
            scenario: config.scenario.clone(),
            config: ScenarioConfig {
                out_dir: None,
                ..config.clone()
            },
            tables: Vec::new(),
            constants: BTreeMap::new(),
            checks: Vec::new(),
            passed: false,
            wall_time: 0.0,
        }
    }

    pub(crate) fn check(&mut self, name: impl Into<String>, lhs: f64, op: Op, rhs: f64) {
        self.checks.push(Check::new(name, lhs, op, rhs));
    }

    /// `lo ≤ value ≤ hi` as two checks.
    pub(crate) fn check_between(&mut self, name: &str, value: f64, lo: f64, hi: f64) {
        self.check(format!("{name} lower"), value, Op::Ge, lo);
        self.check(format!("{name} upper"), value, Op::Le, hi);
    }

    pub(crate) fn constant(&mut self, name: impl Into<String>, v: f64) {
        self.constants.insert(name.into(), v);
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Recomputes every verdict from the recorded sides.
pub fn recompute_verdicts(report: &mut ScenarioReport) {
    for c in &mut report.checks {
        c.pass = c.op.holds(c.lhs, c.rhs);
    }
    report.passed = report.checks.iter().all(|c| c.pass);
}

/// Runs a configured scenario.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioReport> {
    config.validate()?;
    let start = Instant::now();
    let mut report = ScenarioReport::new(config);
    match config.scenario.as_str() {
        "besov-extension-bound" => scenarios::besov_extension_bound(config, &mut report)?,
        "layer-estimates" => scenarios::layer_estimates(config, &mut report)?,
        "l1-extension-bound" => scenarios::l1_extension_bound(config, &mut report)?,
        "trace-recovery" => scenarios::trace_recovery(config, &mut report)?,
        "thin-tube-counterexample" => scenarios::thin_tube_counterexample(config, &mut report)?,
        "space-comparison" => scenarios::space_comparison(config, &mut report)?,
        "regularity-audit" => scenarios::regularity_audit_scenario(config, &mut report)?,
        other => return Err(Error::UnknownScenario(other.to_string())),
    }
    recompute_verdicts(&mut report);
    report.wall_time = start.elapsed().as_secs_f64();
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
    Md,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "md" => Ok(ReportFormat::Md),
            other => Err(Error::InvalidSpec(format!("unknown report format {other}"))),
        }
    }
}

/// Markdown rendering: one table per asserted inequality.
pub fn report_markdown(report: &ScenarioReport) -> String {
    let mut s = format!("# {}\n\n", report.scenario);
    for c in &report.checks {
        let _ = write!(
            s,
            "## {}\n\n| lhs | op | rhs | pass |\n|---|---|---|---|\n| {} | {} | {} | {} |\n\n",
            c.name,
            c.lhs,
            c.op.symbol(),
            c.rhs,
            c.pass
        );
    }
    s
}

/// Writes the report in `format` under `dir`, plus a wall-time sidecar.
/// Returns the files written.
pub fn emit_report(report: &ScenarioReport, format: ReportFormat, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: String, body: String| -> Result<()> {
        let p = dir.join(name);
        std::fs::write(&p, body)?;
        written.push(p);
        Ok(())
    };
    let stem = &report.scenario;
    match format {
        ReportFormat::Json => put(format!("{stem}.json"), report.to_json()?)?,
        ReportFormat::Csv => {
            for t in &report.tables {
                put(format!("{stem}.{}.csv", t.name), t.to_csv()?)?;
            }
        }
        ReportFormat::Md => put(format!("{stem}.md"), report_markdown(report))?,
    }
    let timing = serde_json::json!({ "scenario": stem, "wall_time_s": report.wall_time });
    put(format!("{stem}.timing.json"), serde_json::to_string_pretty(&timing)?)?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_exist_for_every_scenario() {
        for (name, _) in SCENARIOS {
            let c = ScenarioConfig::default_for(name).unwrap();
            c.validate().unwrap();
        }
        assert!(matches!(ScenarioConfig::default_for("nope"), Err(Error::UnknownScenario(_))));
    }

    #[test]
    fn json_overlay_merges() {
        let c = ScenarioConfig::from_json(
            Some("trace-recovery"),
            r#"{"meshes": [0.0078125], "tolerances": {"halving_lo": 0.25}}"#,
        )
        .unwrap();
        assert_eq!(c.meshes, vec![0.0078125]);
        assert_eq!(c.tolerances["halving_lo"], 0.25);
        assert_eq!(c.tolerances["halving_hi"], 0.7);
        assert!(ScenarioConfig::from_json(Some("trace-recovery"), r#"{"meshes": []}"#).is_err());
        assert!(ScenarioConfig::from_json(Some("trace-recovery"), r#"{"scenario": "layer-estimates"}"#).is_err());
        assert!(ScenarioConfig::from_json(None, r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn verdicts_follow_sides() {
        let cfg = ScenarioConfig::default_for("thin-tube-counterexample").unwrap();
        let mut r = ScenarioReport::new(&cfg);
        r.check("a", 1.0, Op::Le, 2.0);
        r.check("b", 3.0, Op::Lt, 2.0);
        recompute_verdicts(&mut r);
        assert!(!r.passed);
        assert_eq!(r.failed_checks().count(), 1);
        r.checks[1].lhs = 1.0;
        recompute_verdicts(&mut r);
        assert!(r.passed);
    }

    #[test]
    fn cells_serialize_plainly() {
        let row: Vec<Cell> = vec![1.5.into(), "a".into(), f64::INFINITY.into(), true.into()];
        assert_eq!(serde_json::to_string(&row).unwrap(), r#"[1.5,"a","inf","true"]"#);
    }

    #[test]
    fn runs_are_deterministic_and_emit_every_format() {
        let cfg = ScenarioConfig::default_for("thin-tube-counterexample").unwrap();
        let a = run_scenario(&cfg).unwrap();
        let b = run_scenario(&cfg).unwrap();
        assert!(a.passed);
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());

        let dir = tempfile::tempdir().unwrap();
        let json = emit_report(&a, ReportFormat::Json, dir.path()).unwrap();
        assert_eq!(json.len(), 2);
        let back: ScenarioReport = serde_json::from_str(&std::fs::read_to_string(&json[0]).unwrap()).unwrap();
        assert_eq!(back.checks, a.checks);
        assert!(!std::fs::read_to_string(&json[0]).unwrap().contains("wall_time"));
        assert!(std::fs::read_to_string(&json[1]).unwrap().contains("wall_time_s"));

        let csv = emit_report(&a, ReportFormat::Csv, dir.path()).unwrap();
        assert_eq!(csv.len(), a.tables.len() + 1);
        let body = std::fs::read_to_string(&csv[0]).unwrap();
        assert!(body.starts_with("n,l1,bv_seminorm,trace_l1,ratio"));

        let md = emit_report(&a, ReportFormat::Md, dir.path()).unwrap();
        let text = std::fs::read_to_string(&md[0]).unwrap();
        assert_eq!(text.matches("| lhs | op | rhs | pass |").count(), a.checks.len());
    }

    #[test]
    fn unwritable_directory_is_an_error() {
        let cfg = ScenarioConfig::default_for("thin-tube-counterexample").unwrap();
        let r = run_scenario(&cfg).unwrap();
        let file = tempfile::NamedTempFile::new().unwrap();
        assert!(emit_report(&r, ReportFormat::Json, &file.path().join("sub")).is_err());
    }

    #[test]
    fn bad_sweeps_are_rejected() {
        let mut cfg = ScenarioConfig::default_for("thin-tube-counterexample").unwrap();
        cfg.sweep = vec![2.5];
        assert!(matches!(run_scenario(&cfg), Err(Error::InvalidSpec(_))));
        cfg.meshes.clear();
        assert!(matches!(run_scenario(&cfg), Err(Error::InvalidSpec(_))));
        cfg.scenario = "missing".into();
        assert!(matches!(cfg.validate(), Err(Error::UnknownScenario(_))));
    }
}
