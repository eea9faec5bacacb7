//! Summary tables and plot-ready arrays built from a directory of records.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::record::ResultRecord;

/// Subdirectory of the results directory that receives the report files.
pub const REPORT_DIR: &str = "report";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportSummary {
    /// `ok`, or `no records` for a directory without result files.
    pub status: String,
    pub records: usize,
    /// Files written, relative to the report directory.
    pub files: Vec<String>,
    /// Prepared-state rows: `(state, noise, mode, F, F_L, P_I)`.
    pub prepared: Vec<PreparedRow>,
    /// Average raw fidelity over the prepared states, per noise setting.
    pub averages: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreparedRow {
    pub state: String,
    pub noise: String,
    pub mode: String,
    pub fidelity: f64,
    pub fidelity_uncertainty: Option<f64>,
    pub logical_fidelity: f64,
    pub p_i: f64,
}

/// Reads every `*.json` record directly inside `dir`, in file-name order.
pub fn load_records(dir: &Path) -> Result<Vec<(PathBuf, ResultRecord)>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    paths.into_iter().map(|p| ResultRecord::read(&p).map(|r| (p, r))).collect()
}

fn csv_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn metric(rec: &ResultRecord, name: &str) -> f64 {
    rec.metric(name).unwrap_or(f64::NAN)
}

fn uncertainty(rec: &ResultRecord, name: &str) -> Option<f64> {
    rec.metrics.iter().find(|m| m.name == name).and_then(|m| m.uncertainty)
}

/// Builds the summary from records and writes the tables to
/// `<dir>/report/`. An empty directory gives status `no records`.
pub fn report(dir: &Path) -> Result<ReportSummary> {
    let records = load_records(dir)?;
    let out = dir.join(REPORT_DIR);
    std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    let mut files: BTreeMap<String, String> = BTreeMap::new();

    let mut prepared = Vec::new();
    let mut prepared_csv = String::from("state,noise,mode,fidelity,fidelity_uncertainty,logical_fidelity,p_i\n");
    let mut decode_csv = String::from("noise,mode,input,fidelity\n");
    let mut qpt_csv = String::from("gate,noise,mode,process_fidelity,gate_process_fidelity,mean_p_i\n");
    let mut table_csv = String::from("section,item,noise,mode,value\n");
    let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();

    for (_, rec) in &records {
        let noise = rec.config.noise.name().to_string();
        let mode = rec.config.mode_name().to_string();
        match rec.experiment.as_str() {
            "prepare" => {
                let row = PreparedRow {
                    state: rec.label.clone(),
                    noise: noise.clone(),
                    mode: mode.clone(),
                    fidelity: metric(rec, "fidelity"),
                    fidelity_uncertainty: uncertainty(rec, "fidelity"),
                    logical_fidelity: metric(rec, "logical_fidelity"),
                    p_i: metric(rec, "p_i"),
                };
                writeln!(
                    prepared_csv,
                    "{},{},{},{},{},{},{}",
                    row.state, row.noise, row.mode, row.fidelity, csv_opt(row.fidelity_uncertainty), row.logical_fidelity, row.p_i
                )
                .unwrap();
                writeln!(table_csv, "encoding,{},{noise},{mode},{}", row.state, row.fidelity).unwrap();
                let e = sums.entry(format!("{noise}/{mode}")).or_default();
                e.0 += row.fidelity;
                e.1 += 1;

                let mut bars = String::from("operator,value,uncertainty\n");
                for e in rec.data["expectations"].as_array().into_iter().flatten() {
                    let unc = e["uncertainty"].as_f64();
                    writeln!(bars, "{},{},{}", e["label"].as_str().unwrap_or(""), e["value"], csv_opt(unc)).unwrap();
                }
                files.insert(format!("expectations-{}", rec.file_name().replace(".json", ".csv")), bars);
                prepared.push(row);
            }
            "decode" => {
                for m in rec.metrics.iter().filter(|m| m.name.starts_with("fidelity_")) {
                    let input = m.name.trim_start_matches("fidelity_");
                    writeln!(decode_csv, "{noise},{mode},{input},{}", m.value).unwrap();
                    writeln!(table_csv, "decoding,{input},{noise},{mode},{}", m.value).unwrap();
                }
                writeln!(table_csv, "decoding,process_fidelity,{noise},{mode},{}", metric(rec, "process_fidelity")).unwrap();
            }
            "logical-qpt" => {
                writeln!(
                    qpt_csv,
                    "{},{noise},{mode},{},{},{}",
                    rec.label,
                    metric(rec, "process_fidelity"),
                    metric(rec, "gate_process_fidelity"),
                    metric(rec, "mean_p_i")
                )
                .unwrap();
            }
            "syndrome-grid" => {
                let mut grid = String::from("error,g1,g2,g3,g4,p1,p2,p3,p4\n");
                for row in rec.data["rows"].as_array().into_iter().flatten() {
                    let join = |v: &Value| -> String {
                        v.as_array().into_iter().flatten().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
                    };
                    writeln!(grid, "{},{},{}", row["error"].as_str().unwrap_or(""), join(&row["values"]), join(&row["predicted"])).unwrap();
                }
                files.insert(format!("syndrome-grid-{}.csv", rec.label), grid);
            }
            _ => {}
        }
    }

    let averages: BTreeMap<String, f64> = sums.iter().map(|(k, (s, n))| (k.clone(), s / *n as f64)).collect();
    for (k, avg) in &averages {
        let (noise, mode) = k.split_once('/').expect("key built above");
        writeln!(table_csv, "encoding,average,{noise},{mode},{avg}").unwrap();
    }
    if !prepared.is_empty() {
        files.insert("prepared-states.csv".into(), prepared_csv);
    }
    if decode_csv.lines().count() > 1 {
        files.insert("decode.csv".into(), decode_csv);
    }
    if qpt_csv.lines().count() > 1 {
        files.insert("logical-qpt.csv".into(), qpt_csv);
    }
    if table_csv.lines().count() > 1 {
        files.insert("simulation-table.csv".into(), table_csv);
    }

    let mut summary = ReportSummary {
        status: if records.is_empty() { "no records".into() } else { "ok".into() },
        records: records.len(),
        files: files.keys().cloned().collect(),
        prepared,
        averages,
    };
    summary.files.push("summary.json".into());
    for (name, body) in &files {
        let path = out.join(name);
        std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    }
    let path = out.join("summary.json");
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(summary)
}
