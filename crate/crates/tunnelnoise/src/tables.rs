//! Output tables: records, heatmaps, ridge report, manifests.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use tunnelnoise_core::ridge_frequency;

use crate::config::Config;
use crate::error::AppError;
use crate::output::{fmt_num, header_block, write_table};
use crate::sweep::{ridge_params, CellResult, RidgeReport, SweepResult};

pub const RECORD_COLUMNS: [&str; 15] = [
    "energy",
    "frequency",
    "T_a",
    "R_a",
    "T_b",
    "R_b",
    "I_left2",
    "I_right2",
    "P_LL",
    "P_RR",
    "P_LR",
    "t1",
    "S_over_4q2h",
    "bracket",
    "error",
];

const CONFIG_MARKER: &str = "# --- configuration ---";

/// Header block with a marker line before the configuration echo, so the
/// configuration can be recovered from any output file.
pub fn file_header(title: &str, cfg: &Config) -> String {
    let block = header_block(title, cfg);
    let mut lines = block.lines();
    let mut out = String::new();
    // title, software and units lines come first
    for line in lines.by_ref().take(3) {
        writeln!(out, "{line}").unwrap();
    }
    writeln!(out, "{CONFIG_MARKER}").unwrap();
    for line in lines {
        writeln!(out, "{line}").unwrap();
    }
    out
}

/// Recovers the configuration echoed in a file written by this crate.
pub fn config_from_header(text: &str) -> Result<Config, AppError> {
    let mut lines = text.lines().skip_while(|l| *l != CONFIG_MARKER);
    if lines.next().is_none() {
        return Err(AppError::Records("no configuration block in header".into()));
    }
    let toml: String = lines
        .take_while(|l| l.starts_with('#'))
        .map(|l| l.strip_prefix("# ").unwrap_or(l.trim_start_matches('#')))
        .fold(String::new(), |mut acc, l| {
            acc.push_str(l);
            acc.push('\n');
            acc
        });
    Config::from_toml_str(&toml)
}

pub fn record_row(cell: &CellResult) -> Vec<String> {
    let mut row = vec![fmt_num(cell.energy), fmt_num(cell.frequency)];
    match &cell.outcome {
        Ok((r, n)) => {
            let values = [
                r.t_a,
                r.r_a,
                r.t_b,
                r.r_b,
                r.i_left.norm_sqr(),
                r.i_right.norm_sqr(),
                r.p_ll,
                r.p_rr,
                r.p_lr,
                r.t1,
                n.s,
                n.bracket,
            ];
            row.extend(values.iter().map(|&v| fmt_num(v)));
            row.push(String::new());
        }
        Err(msg) => {
            row.extend((0..12).map(|_| fmt_num(f64::NAN)));
            row.push(msg.clone());
        }
    }
    row
}

pub fn write_records(path: &Path, cfg: &Config, cells: &[CellResult]) -> Result<(), AppError> {
    let rows: Vec<Vec<String>> = cells.iter().map(record_row).collect();
    write_table(
        path,
        &file_header("scattering and noise records", cfg),
        &RECORD_COLUMNS,
        &rows,
    )?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    /// Noise in units of `4q²/h`.
    S,
    /// Left overlap `|I_left|²`.
    I2,
}

impl FromStr for Observable {
    type Err = AppError;

    fn from_str(s: &str) -> Result<Self, AppError> {
        match s {
            "S" | "s" | "noise" => Ok(Self::S),
            "I2" | "i2" | "overlap" => Ok(Self::I2),
            other => Err(AppError::UnknownObservable(other.to_string())),
        }
    }
}

impl Observable {
    pub fn file_name(self) -> &'static str {
        match self {
            Self::S => "heatmap_S.csv",
            Self::I2 => "heatmap_I2.csv",
        }
    }

    fn column(self) -> &'static str {
        match self {
            Self::S => "S_over_4q2h",
            Self::I2 => "I_left2",
        }
    }
}

/// Energy × frequency grid of one observable; NaN marks failed cells.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableGrid {
    pub energies: Vec<f64>,
    pub frequencies: Vec<f64>,
    /// Row-major, energy index outer.
    pub values: Vec<f64>,
}

impl ObservableGrid {
    pub fn from_sweep(sweep: &SweepResult, observable: Observable) -> Self {
        let values = sweep
            .cells
            .iter()
            .map(|c| match observable {
                Observable::S => c.s(),
                Observable::I2 => c.overlap(),
            })
            .collect();
        Self {
            energies: sweep.energies.clone(),
            frequencies: sweep.frequencies.clone(),
            values,
        }
    }

    /// Reads a records file written by [`write_records`].
    pub fn from_records(text: &str, observable: Observable) -> Result<Self, AppError> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let headers = reader.headers()?.clone();
        let find = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| AppError::Records(format!("missing column {name}")))
        };
        let (ce, cw, cv) = (
            find("energy")?,
            find("frequency")?,
            find(observable.column())?,
        );
        let mut cells = Vec::new();
        for row in reader.records() {
            let row = row?;
            let parse = |i: usize| {
                row.get(i)
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| {
                        AppError::Records(format!("bad number in row {:?}", row.position()))
                    })
            };
            cells.push((parse(ce)?, parse(cw)?, parse(cv)?));
        }
        let mut energies: Vec<f64> = Vec::new();
        let mut frequencies: Vec<f64> = Vec::new();
        for &(e, w, _) in &cells {
            if !energies.contains(&e) {
                energies.push(e);
            }
            if !frequencies.contains(&w) {
                frequencies.push(w);
            }
        }
        if energies.is_empty() || cells.len() != energies.len() * frequencies.len() {
            return Err(AppError::Records(
                "records do not form a complete energy × frequency grid".into(),
            ));
        }
        let mut values = vec![f64::NAN; cells.len()];
        for (k, &(e, w, v)) in cells.iter().enumerate() {
            let (ie, iw) = (k / frequencies.len(), k % frequencies.len());
            if energies[ie] != e || frequencies[iw] != w {
                return Err(AppError::Records(
                    "records are not in energy-major order".into(),
                ));
            }
            values[k] = v;
        }
        Ok(Self {
            energies,
            frequencies,
            values,
        })
    }
}

/// Writes the matrix for `observable`: one row per energy, one column per
/// frequency, and a final column with the predicted ridge frequency at that
/// energy (NaN where the prediction is undefined).
pub fn write_heatmap(
    path: &Path,
    cfg: &Config,
    grid: &ObservableGrid,
    observable: Observable,
    e_r0: f64,
) -> Result<(), AppError> {
    let params = ridge_params(cfg, e_r0)?;
    let mut columns = vec!["energy".to_string()];
    columns.extend(grid.frequencies.iter().map(|&w| fmt_num(w)));
    columns.push("ridge_frequency".into());
    let nw = grid.frequencies.len();
    let rows: Vec<Vec<String>> = grid
        .energies
        .iter()
        .enumerate()
        .map(|(ie, &e)| {
            let mut row = vec![fmt_num(e)];
            row.extend(
                grid.values[ie * nw..(ie + 1) * nw]
                    .iter()
                    .map(|&v| fmt_num(v)),
            );
            row.push(fmt_num(ridge_frequency(e, &params).unwrap_or(f64::NAN)));
            row
        })
        .collect();
    let title = format!(
        "heatmap of {} (rows: energy, columns: frequency); E_r0 = {}",
        observable.column(),
        fmt_num(e_r0)
    );
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    write_table(path, &file_header(&title, cfg), &cols, &rows)?;
    Ok(())
}

pub const RIDGE_COLUMNS: [&str; 11] = [
    "frequency",
    "grid_energy",
    "refined_energy",
    "S_max",
    "predicted_energy",
    "deviation",
    "noise_anchor_predicted_energy",
    "noise_anchor_deviation",
    "within_transit_limit",
    "at_edge",
    "valid_cells",
];

pub fn write_ridge_report(path: &Path, cfg: &Config, report: &RidgeReport) -> Result<(), AppError> {
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                fmt_num(r.frequency),
                fmt_num(r.grid_energy),
                fmt_num(r.refined_energy),
                fmt_num(r.s_max),
                fmt_num(r.predicted_energy),
                fmt_num(r.deviation),
                fmt_num(r.noise_anchor_predicted_energy),
                fmt_num(r.noise_anchor_deviation),
                r.within_transit_limit.to_string(),
                r.at_edge.to_string(),
                r.valid_cells.to_string(),
            ]
        })
        .collect();
    let title = format!(
        "noise ridge; E_r0 = {} eV, static noise peak = {} eV, transit time = {} fs",
        fmt_num(report.e_r0),
        fmt_num(report.static_noise_peak),
        fmt_num(report.transit_time)
    );
    write_table(path, &file_header(&title, cfg), &RIDGE_COLUMNS, &rows)?;
    Ok(())
}

/// Plain-text summary of a run. Contains nothing that depends on scheduling.
pub fn write_manifest(path: &Path, cfg: &Config, lines: &[String]) -> Result<(), AppError> {
    let mut text = file_header("run manifest", cfg);
    text.push_str("randomness: none\n");
    for line in lines {
        text.push_str(line);
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}
