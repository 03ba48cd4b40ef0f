//! Result rows: the stable CSV schema and its JSON mirror.

use serde::{Deserialize, Serialize};

use crate::CliError;

pub const RESULTS_SCHEMA_VERSION: u32 = 1;
pub const CSV_HEADER: &str = "code,d,p,noise,mode,estimator,value,std_err,shots,seed,wall_time_ms";

/// One experiment outcome; self-describing and sufficient to regenerate
/// every curve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultRow {
    pub code: String,
    pub d: usize,
    pub p: f64,
    pub noise: String,
    pub mode: String,
    pub estimator: String,
    pub value: f64,
    pub std_err: f64,
    pub shots: u64,
    pub seed: u64,
    pub wall_time_ms: u64,
    /// Branch-conditioned components (stratified PEC rows only); carried in
    /// the JSON mirror, not the CSV.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub components: Option<RowComponents>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RowComponents {
    pub identity: f64,
    pub identity_std_err: f64,
    pub superbranch: f64,
    pub superbranch_std_err: f64,
    pub g: f64,
}

impl ResultRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.code,
            self.d,
            self.p,
            self.noise,
            self.mode,
            self.estimator,
            self.value,
            self.std_err,
            self.shots,
            self.seed,
            self.wall_time_ms
        )
    }

    pub fn from_csv_line(line: &str) -> Result<Self, CliError> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 11 {
            return Err(CliError::Config(format!(
                "result row has {} fields, expected 11: {line}",
                fields.len()
            )));
        }
        let parse_f = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| CliError::Config(format!("bad number {s:?}: {e}")))
        };
        let parse_u = |s: &str| {
            s.parse::<u64>()
                .map_err(|e| CliError::Config(format!("bad integer {s:?}: {e}")))
        };
        Ok(ResultRow {
            code: fields[0].to_string(),
            d: parse_u(fields[1])? as usize,
            p: parse_f(fields[2])?,
            noise: fields[3].to_string(),
            mode: fields[4].to_string(),
            estimator: fields[5].to_string(),
            value: parse_f(fields[6])?,
            std_err: parse_f(fields[7])?,
            shots: parse_u(fields[8])?,
            seed: parse_u(fields[9])?,
            wall_time_ms: parse_u(fields[10])?,
            components: None,
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ResultsFile {
    pub schema_version: u32,
    pub rows: Vec<ResultRow>,
}

pub fn write_results(
    dir: &std::path::Path,
    rows: &[ResultRow],
) -> Result<(std::path::PathBuf, std::path::PathBuf), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("creating {}: {e}", dir.display())))?;
    let csv_path = dir.join("results.csv");
    let mut csv = String::with_capacity(rows.len() * 64 + CSV_HEADER.len());
    csv.push_str(CSV_HEADER);
    csv.push('\n');
    for row in rows {
        csv.push_str(&row.csv_line());
        csv.push('\n');
    }
    std::fs::write(&csv_path, csv)
        .map_err(|e| CliError::Io(format!("writing {}: {e}", csv_path.display())))?;

    let json_path = dir.join("results.json");
    let file = ResultsFile {
        schema_version: RESULTS_SCHEMA_VERSION,
        rows: rows.to_vec(),
    };
    let text = serde_json::to_string_pretty(&file)
        .map_err(|e| CliError::Io(format!("serializing results: {e}")))?;
    std::fs::write(&json_path, text)
        .map_err(|e| CliError::Io(format!("writing {}: {e}", json_path.display())))?;
    Ok((csv_path, json_path))
}

/// Read rows from either the CSV or the JSON mirror, by extension.
pub fn read_results(path: &std::path::Path) -> Result<Vec<ResultRow>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::MissingArtifact(format!("{}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e == "json") {
        let file: ResultsFile = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("bad results file: {e}")))?;
        return Ok(file.rows);
    }
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == CSV_HEADER => {}
        other => {
            return Err(CliError::Config(format!(
                "unexpected results header: {other:?}"
            )))
        }
    }
    lines.map(ResultRow::from_csv_line).collect()
}
