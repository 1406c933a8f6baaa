use std::path::Path;

use serde::{Deserialize, Serialize};

use super::plan::ExperimentPlan;
use crate::dynamics::{InitialRegime, RunStatus};
use crate::error::{Error, Result};

/// JSON has no NaN; missing values travel as `null`.
mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_nan() {
            s.serialize_none()
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

/// One simulated and reduced system. Unavailable numbers are NaN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scenario: String,
    pub value: f64,
    pub replica: usize,
    pub regime: InitialRegime,
    pub seed: u64,
    pub status: RunStatus,
    #[serde(with = "nan_as_null")]
    pub x_eff: f64,
    #[serde(with = "nan_as_null")]
    pub mean_state: f64,
    pub d: Vec<f64>,
    #[serde(with = "nan_as_null")]
    pub err: f64,
    #[serde(with = "nan_as_null")]
    pub pred_d2: f64,
    #[serde(with = "nan_as_null")]
    pub pred_d3: f64,
    #[serde(with = "nan_as_null")]
    pub pred_xeff: f64,
    #[serde(with = "nan_as_null")]
    pub pred_err: f64,
    pub steps: usize,
}

impl ResultRow {
    /// Placeholder for a cell whose system could not be built or simulated.
    pub fn failed(scenario: &str, value: f64, replica: usize, regime: InitialRegime, seed: u64) -> Self {
        Self {
            scenario: scenario.to_string(),
            value,
            replica,
            regime,
            seed,
            status: RunStatus::Diverged,
            x_eff: f64::NAN,
            mean_state: f64::NAN,
            d: Vec::new(),
            err: f64::NAN,
            pred_d2: f64::NAN,
            pred_d3: f64::NAN,
            pred_xeff: f64::NAN,
            pred_err: f64::NAN,
            steps: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown output format {other:?}"))),
        }
    }
}

/// 17 significant digits, enough to round-trip any f64.
fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

fn order(rows: &[ResultRow]) -> usize {
    rows.iter().map(|r| r.d.len()).max().unwrap_or(0)
}

fn header(order: usize) -> Vec<String> {
    let mut cols: Vec<String> = ["scenario", "value", "replica", "regime", "seed", "status", "x_eff", "mean_state"]
        .into_iter()
        .map(String::from)
        .collect();
    cols.extend((1..=order).map(|s| format!("d{s}")));
    cols.extend(
        ["err", "pred_d2", "pred_d3", "pred_xeff", "pred_err", "steps"]
            .into_iter()
            .map(String::from),
    );
    cols
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::MalformedFile {
        line,
        reason: e.to_string(),
    }
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidSpec(format!("csv buffer: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is built from UTF-8 fields"))
}

pub fn to_csv(rows: &[ResultRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    let s = order(rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header(s)).map_err(csv_error)?;
    for r in rows {
        let mut rec = vec![
            r.scenario.clone(),
            num(r.value),
            r.replica.to_string(),
            r.regime.as_str().to_string(),
            r.seed.to_string(),
            r.status.as_str().to_string(),
            num(r.x_eff),
            num(r.mean_state),
        ];
        rec.extend((0..s).map(|k| r.d.get(k).map_or(String::new(), |&v| num(v))));
        rec.extend([r.err, r.pred_d2, r.pred_d3, r.pred_xeff, r.pred_err].map(num));
        rec.push(r.steps.to_string());
        w.write_record(&rec).map_err(csv_error)?;
    }
    finish_csv(w)
}

#[derive(Serialize, Deserialize)]
struct JsonTable {
    plan: Option<ExperimentPlan>,
    rows: Vec<ResultRow>,
}

/// Rows plus the plan that produced them.
pub fn to_json(rows: &[ResultRow], plan: Option<&ExperimentPlan>) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    let table = JsonTable {
        plan: plan.cloned(),
        rows: rows.to_vec(),
    };
    let mut s = serde_json::to_string_pretty(&table)?;
    s.push('\n');
    Ok(s)
}

/// Writes the table; nothing is created for an empty table.
pub fn emit(
    rows: &[ResultRow],
    path: &Path,
    format: OutputFormat,
    plan: Option<&ExperimentPlan>,
) -> Result<()> {
    let text = match format {
        OutputFormat::Csv => to_csv(rows)?,
        OutputFormat::Json => to_json(rows, plan)?,
    };
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn parse_field<T: std::str::FromStr>(line: usize, name: &str, raw: &str) -> Result<T> {
    raw.parse().map_err(|_| Error::MalformedFile {
        line,
        reason: format!("bad {name} value {raw:?}"),
    })
}

pub fn from_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let cols: Vec<String> = reader.headers().map_err(csv_error)?.iter().map(String::from).collect();
    let s = cols
        .iter()
        .filter(|c| c.strip_prefix('d').is_some_and(|k| k.parse::<usize>().is_ok()))
        .count();
    if cols != header(s) {
        return Err(Error::MalformedFile {
            line: 1,
            reason: "unexpected header".into(),
        });
    }
    let mut rows = Vec::new();
    for rec in reader.records() {
        let f = rec.map_err(csv_error)?;
        let ln = f.position().map_or(0, |p| p.line() as usize);
        let regime = match &f[3] {
            "low" => InitialRegime::Low,
            "high" => InitialRegime::High,
            other => {
                return Err(Error::MalformedFile {
                    line: ln,
                    reason: format!("unknown regime {other:?}"),
                })
            }
        };
        let d = (8..8 + s)
            .map(|k| &f[k])
            .take_while(|v| !v.is_empty())
            .map(|v| parse_field(ln, "d", v))
            .collect::<Result<Vec<f64>>>()?;
        let t = 8 + s;
        rows.push(ResultRow {
            scenario: f[0].to_string(),
            value: parse_field(ln, "value", &f[1])?,
            replica: parse_field(ln, "replica", &f[2])?,
            regime,
            seed: parse_field(ln, "seed", &f[4])?,
            status: f[5].parse().map_err(|_| Error::MalformedFile {
                line: ln,
                reason: format!("unknown status {:?}", &f[5]),
            })?,
            x_eff: parse_field(ln, "x_eff", &f[6])?,
            mean_state: parse_field(ln, "mean_state", &f[7])?,
            d,
            err: parse_field(ln, "err", &f[t])?,
            pred_d2: parse_field(ln, "pred_d2", &f[t + 1])?,
            pred_d3: parse_field(ln, "pred_d3", &f[t + 2])?,
            pred_xeff: parse_field(ln, "pred_xeff", &f[t + 3])?,
            pred_err: parse_field(ln, "pred_err", &f[t + 4])?,
            steps: parse_field(ln, "steps", &f[t + 5])?,
        });
    }
    Ok(rows)
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>> {
    from_csv(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

/// Rows of a JSON table, with the embedded plan when present.
pub fn from_json(text: &str) -> Result<(Option<ExperimentPlan>, Vec<ResultRow>)> {
    let t: JsonTable = serde_json::from_str(text)?;
    Ok((t.plan, t.rows))
}

/// Replica statistics for one `(scenario, value)` group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub scenario: String,
    pub value: f64,
    /// Rows with a finite error.
    pub n: usize,
    pub converged: usize,
    pub err_mean: f64,
    pub err_std: f64,
    pub x_eff_mean: f64,
    pub x_eff_std: f64,
    pub pred_err: f64,
    pub pred_xeff: f64,
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Mean and sample standard deviation of `err` and `x_eff` per sweep
/// point, in order of first appearance.
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(&str, f64)> = Vec::new();
    for r in rows {
        let key = (r.scenario.as_str(), r.value);
        if !keys.iter().any(|k| k.0 == key.0 && k.1.to_bits() == key.1.to_bits()) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(scenario, value)| {
            let group: Vec<&ResultRow> = rows
                .iter()
                .filter(|r| r.scenario == scenario && r.value.to_bits() == value.to_bits())
                .collect();
            let errs: Vec<f64> = group.iter().map(|r| r.err).filter(|v| v.is_finite()).collect();
            let xs: Vec<f64> = group.iter().map(|r| r.x_eff).filter(|v| v.is_finite()).collect();
            let (err_mean, err_std) = mean_std(&errs);
            let (x_eff_mean, x_eff_std) = mean_std(&xs);
            SummaryRow {
                scenario: scenario.to_string(),
                value,
                n: errs.len(),
                converged: group.iter().filter(|r| r.status == RunStatus::Converged).count(),
                err_mean,
                err_std,
                x_eff_mean,
                x_eff_std,
                pred_err: group[0].pred_err,
                pred_xeff: group[0].pred_xeff,
            }
        })
        .collect()
}

pub fn summary_to_csv(summary: &[SummaryRow]) -> Result<String> {
    if summary.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "scenario", "value", "n", "converged", "err_mean", "err_std", "x_eff_mean", "x_eff_std", "pred_err",
        "pred_xeff",
    ])
    .map_err(csv_error)?;
    for s in summary {
        let mut rec = vec![s.scenario.clone(), num(s.value), s.n.to_string(), s.converged.to_string()];
        rec.extend([s.err_mean, s.err_std, s.x_eff_mean, s.x_eff_std, s.pred_err, s.pred_xeff].map(num));
        w.write_record(&rec).map_err(csv_error)?;
    }
    finish_csv(w)
}

/// Theory-only columns for one sweep value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRow {
    pub scenario: String,
    pub value: f64,
    #[serde(with = "nan_as_null")]
    pub pred_d2: f64,
    #[serde(with = "nan_as_null")]
    pub pred_d3: f64,
    #[serde(with = "nan_as_null")]
    pub pred_xeff: f64,
    #[serde(with = "nan_as_null")]
    pub pred_err: f64,
}

pub fn predictions_to_csv(rows: &[PredictionRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["scenario", "value", "pred_d2", "pred_d3", "pred_xeff", "pred_err"])
        .map_err(csv_error)?;
    for r in rows {
        let mut rec = vec![r.scenario.clone(), num(r.value)];
        rec.extend([r.pred_d2, r.pred_d3, r.pred_xeff, r.pred_err].map(num));
        w.write_record(&rec).map_err(csv_error)?;
    }
    finish_csv(w)
}
