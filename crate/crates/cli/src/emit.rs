//! Output records and their CSV, JSON and whitespace-column renderings.
//!
//! Numbers are written in the shortest form that parses back to the same
//! `f64`, so `1.0` stays `1.0` and every value round-trips bit-exactly.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::{AxisName, RunConfig, DAT_CONFIG_PREFIX};
use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
    /// Whitespace-separated columns with `#` comments, for plotting tools.
    Dat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub command: String,
    pub config: RunConfig,
    pub result: Payload,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Payload {
    Curve {
        t: Vec<f64>,
        #[serde(rename = "F")]
        f: Vec<f64>,
        /// Phase against the vacuum; `None` where the amplitude vanishes.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta: Option<Vec<Option<f64>>>,
    },
    Ensemble {
        realizations: usize,
        t: Vec<f64>,
        #[serde(rename = "F")]
        f: Vec<f64>,
        population: Vec<f64>,
        population_stderr: Vec<f64>,
    },
    Peaks {
        threshold: f64,
        t: Vec<f64>,
        #[serde(rename = "F")]
        f: Vec<f64>,
        revivals: Vec<f64>,
    },
    Sweep {
        axis: AxisName,
        value: Vec<f64>,
        #[serde(rename = "F_max")]
        f_max: Vec<f64>,
        t_at_max: Vec<f64>,
        drop_fraction: f64,
        drop_at: Option<f64>,
    },
    Predict {
        h_m: f64,
        #[serde(rename = "N")]
        n: usize,
        semiclassical_regime: bool,
        drop_site: usize,
    },
    Units {
        s: f64,
        recoil_energy_j: f64,
        tunneling_j: f64,
        tunneling_over_recoil: f64,
        within_fit_range: bool,
        hbar_over_j_s: f64,
        trap_omega_rad_s: Option<f64>,
        trap_frequency_hz: Option<f64>,
        t: Vec<f64>,
        seconds: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq)]
enum Cell {
    Num(f64),
    Int(usize),
    Bool(bool),
    Text(String),
    Missing,
}

impl Cell {
    fn render(&self, missing: &str) -> String {
        match self {
            Cell::Num(v) => fmt_f64(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => missing.to_string(),
        }
    }
}

/// Shortest round-trip decimal form.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

fn columns(header: Vec<&'static str>, cols: Vec<Vec<Cell>>) -> Table {
    let len = cols.first().map_or(0, Vec::len);
    let rows = (0..len)
        .map(|i| cols.iter().map(|c| c[i].clone()).collect())
        .collect();
    Table { header, rows }
}

fn nums(v: &[f64]) -> Vec<Cell> {
    v.iter().map(|&x| Cell::Num(x)).collect()
}

impl Payload {
    fn table(&self) -> Table {
        match self {
            Payload::Curve { t, f, theta: None } => columns(vec!["t", "F"], vec![nums(t), nums(f)]),
            Payload::Curve { t, f, theta: Some(th) } => {
                let th = th.iter().map(|v| v.map_or(Cell::Missing, Cell::Num)).collect();
                columns(vec!["t", "F", "theta"], vec![nums(t), nums(f), th])
            }
            Payload::Ensemble {
                t,
                f,
                population,
                population_stderr,
                ..
            } => columns(
                vec!["t", "F", "population", "population_stderr"],
                vec![nums(t), nums(f), nums(population), nums(population_stderr)],
            ),
            Payload::Peaks { t, f, .. } => columns(vec!["t", "F"], vec![nums(t), nums(f)]),
            Payload::Sweep {
                axis,
                value,
                f_max,
                t_at_max,
                ..
            } => {
                let value = value
                    .iter()
                    .map(|&v| match axis {
                        AxisName::FieldAmplitude => Cell::Num(v),
                        _ => Cell::Int(v as usize),
                    })
                    .collect();
                columns(
                    vec!["axis", "F_max", "t_at_max"],
                    vec![value, nums(f_max), nums(t_at_max)],
                )
            }
            Payload::Predict {
                h_m,
                n,
                semiclassical_regime,
                drop_site,
            } => Table {
                header: vec!["h_m", "N", "semiclassical_regime", "drop_site"],
                rows: vec![vec![
                    Cell::Num(*h_m),
                    Cell::Int(*n),
                    Cell::Bool(*semiclassical_regime),
                    Cell::Int(*drop_site),
                ]],
            },
            Payload::Units {
                s,
                recoil_energy_j,
                tunneling_j,
                tunneling_over_recoil,
                within_fit_range,
                hbar_over_j_s,
                trap_omega_rad_s,
                trap_frequency_hz,
                t,
                seconds,
            } => {
                let opt = |v: &Option<f64>| v.map_or(Cell::Missing, Cell::Num);
                let mut rows = vec![
                    ("s", Cell::Num(*s)),
                    ("recoil_energy_j", Cell::Num(*recoil_energy_j)),
                    ("tunneling_j", Cell::Num(*tunneling_j)),
                    ("tunneling_over_recoil", Cell::Num(*tunneling_over_recoil)),
                    ("within_fit_range", Cell::Bool(*within_fit_range)),
                    ("hbar_over_j_s", Cell::Num(*hbar_over_j_s)),
                    ("trap_omega_rad_s", opt(trap_omega_rad_s)),
                    ("trap_frequency_hz", opt(trap_frequency_hz)),
                ]
                .into_iter()
                .map(|(k, v)| vec![Cell::Text(k.into()), v])
                .collect::<Vec<_>>();
                for (ti, si) in t.iter().zip(seconds) {
                    rows.push(vec![Cell::Text(format!("seconds_at_t={}", fmt_f64(*ti))), Cell::Num(*si)]);
                }
                Table {
                    header: vec!["quantity", "value"],
                    rows,
                }
            }
        }
    }
}

impl Record {
    pub fn to_csv(&self) -> String {
        let table = self.result.table();
        let mut out = table.header.join(",");
        out.push('\n');
        for row in &table.rows {
            let line: Vec<String> = row.iter().map(|c| c.render("")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("record serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Plot-ready columns; the config rides along in `#=` comment lines.
    pub fn to_dat(&self) -> String {
        let table = self.result.table();
        let mut out = format!("# spinmem {}\n", self.command);
        for line in self.config.to_toml().lines() {
            let _ = writeln!(out, "{DAT_CONFIG_PREFIX}{line}");
        }
        let _ = writeln!(out, "# {}", table.header.join(" "));
        for row in &table.rows {
            let line: Vec<String> = row.iter().map(|c| c.render("nan")).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    /// File names and contents for `format`, not yet written.
    pub fn render(&self, format: Format) -> Vec<(String, String)> {
        let stem = &self.command;
        match format {
            Format::Csv => vec![
                (format!("{stem}.csv"), self.to_csv()),
                (format!("{stem}.config.toml"), self.config.to_toml()),
            ],
            Format::Json => vec![(format!("{stem}.json"), self.to_json())],
            Format::Dat => vec![(format!("{stem}.dat"), self.to_dat())],
        }
    }
}

/// Writes rendered files into `dir`, creating it if needed.
pub fn write_all(dir: &Path, files: &[(String, String)]) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("creating {}: {e}", dir.display())))?;
    files
        .iter()
        .map(|(name, text)| {
            let path = dir.join(name);
            std::fs::write(&path, text)
                .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
            Ok(path)
        })
        .collect()
}
