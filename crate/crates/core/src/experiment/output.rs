use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::OutputFormat;
use crate::error::{Error, Result};

/// One reported number. Rates carry a Wilson half-width, means a normal
/// half-width; both at 95%.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub decoder: String,
    /// `logical-error-rate`, `diamond-distance-mean`, `decode-time-s`, ...
    pub metric: String,
    /// `d` for square lattices, `W` for AD lattices.
    pub size: usize,
    pub width: usize,
    pub height: usize,
    pub qubits: usize,
    /// `gamma` or `inv_beta`.
    pub param: String,
    pub param_value: f64,
    pub chi: usize,
    pub norm: String,
    pub samples: usize,
    pub seed: u64,
    pub value: f64,
    pub half_width: f64,
    /// Logical failures behind a rate.
    pub failures: Option<usize>,
    /// Trials whose decode raised an error; they are excluded from `value`.
    pub decode_errors: usize,
    /// Only set by the timing experiment, so that other outputs are
    /// reproducible byte for byte.
    pub wall_time_s: Option<f64>,
}

pub const CSV_HEADER: &str = "experiment,decoder,metric,size,width,height,qubits,param,param_value,chi,norm,samples,seed,value,half_width,failures,decode_errors,wall_time_s";

/// Rounds to 12 significant digits.
pub fn round12(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

fn fmt_float(v: f64) -> String {
    let r = round12(v);
    if r.is_finite() && r == r.trunc() && r.abs() < 1e15 {
        format!("{r:.1}")
    } else {
        format!("{r}")
    }
}

impl ResultRow {
    /// The row with every float rounded as it is written.
    pub fn rounded(mut self) -> Self {
        self.param_value = round12(self.param_value);
        self.value = round12(self.value);
        self.half_width = round12(self.half_width);
        self.wall_time_s = self.wall_time_s.map(round12);
        self
    }

    fn csv_line(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        [
            self.experiment.clone(),
            self.decoder.clone(),
            self.metric.clone(),
            self.size.to_string(),
            self.width.to_string(),
            self.height.to_string(),
            self.qubits.to_string(),
            self.param.clone(),
            fmt_float(self.param_value),
            self.chi.to_string(),
            self.norm.clone(),
            self.samples.to_string(),
            self.seed.to_string(),
            fmt_float(self.value),
            fmt_float(self.half_width),
            opt(self.failures.map(|f| f.to_string())),
            self.decode_errors.to_string(),
            opt(self.wall_time_s.map(fmt_float)),
        ]
        .join(",")
    }
}

/// Serialized results: config echo plus rows.
pub fn render(rows: &[ResultRow], config: &serde_json::Value, format: OutputFormat) -> Result<String> {
    let rows: Vec<ResultRow> = rows.iter().cloned().map(ResultRow::rounded).collect();
    match format {
        OutputFormat::Csv => {
            let mut out = String::new();
            if let serde_json::Value::Object(map) = config {
                for (k, v) in map {
                    out.push_str(&format!("# {k}: {v}\n"));
                }
            }
            out.push_str(CSV_HEADER);
            out.push('\n');
            for r in &rows {
                out.push_str(&r.csv_line());
                out.push('\n');
            }
            Ok(out)
        }
        OutputFormat::Json => {
            let doc = serde_json::json!({ "config": config, "rows": rows });
            let mut s = serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
    }
}

/// Writes [`render`]'s output to `path`, or to stdout when `path` is `None`.
pub fn emit_results(rows: &[ResultRow], config: &serde_json::Value, path: Option<&Path>, format: OutputFormat) -> Result<()> {
    let text = render(rows, config, format)?;
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Error::Io(e.to_string())),
    }
}

/// Rows of a JSON document written by [`render`].
pub fn parse_json_rows(text: &str) -> Result<Vec<ResultRow>> {
    #[derive(Deserialize)]
    struct Doc {
        rows: Vec<ResultRow>,
    }
    let d: Doc = serde_json::from_str(text).map_err(|e| Error::Io(e.to_string()))?;
    Ok(d.rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> ResultRow {
        ResultRow {
            experiment: "cbf-sweep".into(),
            decoder: "tn".into(),
            metric: "logical-error-rate".into(),
            size: 3,
            width: 3,
            height: 3,
            qubits: 9,
            param: "inv_beta".into(),
            param_value: 0.9,
            chi: 8,
            norm: "trace".into(),
            samples: 100,
            seed: 1,
            value: 1.0 / 3.0,
            half_width: 0.012345678901234567,
            failures: Some(33),
            decode_errors: 0,
            wall_time_s: None,
        }
    }

    #[test]
    fn empty_csv_is_header_only() {
        let s = render(&[], &serde_json::json!({}), OutputFormat::Csv).unwrap();
        assert_eq!(s, format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn one_row_csv() {
        let s = render(&[row()], &serde_json::json!({"seed": 1}), OutputFormat::Csv).unwrap();
        let data: Vec<&str> = s.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data.len(), 2);
        assert!(data[1].contains("0.333333333333,"));
        assert_eq!(data[1].split(',').count(), CSV_HEADER.split(',').count());
    }

    #[test]
    fn json_round_trip() {
        let rows = vec![row(), ResultRow { decoder: "mwpm".into(), failures: None, ..row() }];
        let s = render(&rows, &serde_json::json!({"kind": "cbf-sweep"}), OutputFormat::Json).unwrap();
        let back = parse_json_rows(&s).unwrap();
        let want: Vec<ResultRow> = rows.into_iter().map(ResultRow::rounded).collect();
        assert_eq!(back, want);
    }

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round12(1.0 / 3.0), 0.333333333333);
        assert_eq!(round12(123456789.1234567), 123456789.123);
        assert_eq!(round12(round12(2.0 / 7.0)), round12(2.0 / 7.0));
    }
}
