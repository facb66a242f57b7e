use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Config, Output, Scale, SweepSpec};
use crate::cycle::Regime;
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisMeta {
    pub name: String,
    pub scale: Scale,
    pub values: Vec<f64>,
}

/// Values of one grid cell. Outputs that were not requested, or are
/// undefined for the cell, are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub coords: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<Regime>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub work: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_hot: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_cold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carnot_eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carnot_cop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g2_generalized: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub negativity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_photon: Option<f64>,
    /// Truncation of the cycle spectra.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_tr: Option<usize>,
    /// Fock cutoff of the correlation run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fock_cutoff: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CellRecord {
    pub fn new(coords: Vec<f64>) -> Self {
        CellRecord {
            coords,
            regime: None,
            work: None,
            q_hot: None,
            q_cold: None,
            eta: None,
            cop: None,
            carnot_eta: None,
            carnot_cop: None,
            g2: None,
            g2_generalized: None,
            negativity: None,
            mean_photon: None,
            n_tr: None,
            fock_cutoff: None,
            flags: Vec::new(),
            error: None,
        }
    }

    pub fn value(&self, output: Output) -> Option<f64> {
        match output {
            Output::Regime => None,
            Output::Work => self.work,
            Output::QHot => self.q_hot,
            Output::QCold => self.q_cold,
            Output::Eta => self.eta,
            Output::Cop => self.cop,
            Output::CarnotEta => self.carnot_eta,
            Output::CarnotCop => self.carnot_cop,
            Output::G2 => self.g2,
            Output::G2Generalized => self.g2_generalized,
            Output::Negativity => self.negativity,
            Output::MeanPhoton => self.mean_photon,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub code_version: String,
    /// Full configuration; rerunning it reproduces the grid.
    pub config: Config,
    pub n_tr_used: Vec<usize>,
    /// Seconds since the Unix epoch.
    pub created: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub schema_version: u32,
    pub axes: Vec<AxisMeta>,
    pub outputs: Vec<Output>,
    pub cells: Vec<CellRecord>,
    /// False when any cell failed.
    pub complete: bool,
    pub provenance: Provenance,
}

impl PhaseGrid {
    pub(crate) fn new(spec: &SweepSpec, cells: Vec<CellRecord>, n_tr_used: Vec<usize>) -> Self {
        let created = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        PhaseGrid {
            schema_version: SCHEMA_VERSION,
            axes: spec
                .axes
                .iter()
                .map(|a| AxisMeta {
                    name: a.name.as_str().to_string(),
                    scale: a.scale,
                    values: a.values.clone(),
                })
                .collect(),
            outputs: spec.outputs.clone(),
            complete: cells.iter().all(|c| c.error.is_none()),
            cells,
            provenance: Provenance {
                code_version: env!("CARGO_PKG_VERSION").to_string(),
                config: spec.config.clone(),
                n_tr_used,
                created,
            },
        }
    }

    pub fn failed_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.error.is_some()).count()
    }
}

/// Seventeen significant digits, enough to round-trip any `f64`.
fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::io(path, std::io::Error::other(e.to_string()))
}

/// Sidecar holding the grid metadata of a CSV file.
pub fn meta_path(csv: &Path) -> PathBuf {
    let mut name = csv.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// One header row (axis names, outputs, `n_tr`, `flags`, `error`) and one
/// row per cell. A `<path>.meta.json` sidecar carries axes and provenance.
pub fn emit_csv(grid: &PhaseGrid, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    let mut header: Vec<&str> = grid.axes.iter().map(|a| a.name.as_str()).collect();
    header.extend(grid.outputs.iter().map(|o| o.as_str()));
    header.extend(["n_tr", "flags", "error"]);
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for cell in &grid.cells {
        let mut row: Vec<String> = cell.coords.iter().map(|&x| format_float(x)).collect();
        for &o in &grid.outputs {
            row.push(match o {
                Output::Regime => cell.regime.map(|r| r.as_str().to_string()).unwrap_or_default(),
                other => cell.value(other).map(format_float).unwrap_or_default(),
            });
        }
        row.push(cell.n_tr.or(cell.fock_cutoff).map(|n| n.to_string()).unwrap_or_default());
        row.push(cell.flags.join(";"));
        row.push(cell.error.clone().unwrap_or_default());
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    let meta = serde_json::json!({
        "schema_version": grid.schema_version,
        "axes": grid.axes,
        "outputs": grid.outputs,
        "complete": grid.complete,
        "provenance": grid.provenance,
    });
    let meta_file = meta_path(path);
    let text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    std::fs::write(&meta_file, text + "\n").map_err(|e| Error::io(&meta_file, e))
}

pub fn emit_json(grid: &PhaseGrid, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(grid).expect("grid serializes");
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

pub fn load_json(path: &Path) -> Result<PhaseGrid> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::config(path.display().to_string(), e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::{frequency_cycle_section, run_sweep, AxisSection, ModelSection, SweepSection};

    fn small_grid() -> PhaseGrid {
        let config = Config {
            model: ModelSection {
                n_qubits: 2,
                n_tr: 12,
                ..ModelSection::default()
            },
            cycle: Some(frequency_cycle_section(2.0, 1.0, 0.3, 0.5, 0.1)),
            sweep: Some(SweepSection {
                axes: vec![
                    AxisSection {
                        name: "lambda".into(),
                        min: 0.1,
                        max: 0.9,
                        count: 2,
                        scale: Scale::Linear,
                    },
                    AxisSection {
                        name: "t_hot".into(),
                        min: 0.1,
                        max: 0.7,
                        count: 2,
                        scale: Scale::Linear,
                    },
                ],
                outputs: vec!["regime".into(), "work".into(), "eta".into(), "cop".into(), "carnot_cop".into()],
                csv: None,
                json: None,
                auto_converge: false,
                threads: 1,
                auto_cutoff: false,
            }),
            ..Config::default()
        };
        run_sweep(&SweepSpec::from_config(&config).unwrap()).unwrap()
    }

    #[test]
    fn csv_shape_and_determinism() {
        let grid = small_grid();
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        emit_csv(&grid, &a).unwrap();
        emit_csv(&grid, &b).unwrap();
        let text = std::fs::read_to_string(&a).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert_eq!(
            text.lines().next().unwrap(),
            "lambda,t_hot,regime,work,eta,cop,carnot_cop,n_tr,flags,error"
        );
        assert_eq!(text, std::fs::read_to_string(&b).unwrap());
        assert!(meta_path(&a).exists());
        // Floats parse back to the same bits.
        let mut reader = csv::Reader::from_path(&a).unwrap();
        for (row, cell) in reader.records().zip(&grid.cells) {
            let row = row.unwrap();
            let work: f64 = row[3].parse().unwrap();
            assert_eq!(work.to_bits(), cell.work.unwrap().to_bits());
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let grid = small_grid();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("grid.json");
        emit_json(&grid, &path).unwrap();
        let back = load_json(&path).unwrap();
        assert_eq!(back, grid);
        let again = dir.path().join("again.json");
        emit_json(&back, &again).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
    }

    #[test]
    fn provenance_regenerates_the_grid() {
        let grid = small_grid();
        let rerun = run_sweep(&SweepSpec::from_config(&grid.provenance.config).unwrap()).unwrap();
        assert_eq!(rerun.cells, grid.cells);
    }

    #[test]
    fn unwritable_path_is_an_io_error() {
        let grid = small_grid();
        let path = Path::new("/nonexistent-dir/sub/grid.json");
        assert!(matches!(emit_json(&grid, path), Err(Error::Io { .. })));
        assert!(matches!(emit_csv(&grid, &path.with_extension("csv")), Err(Error::Io { .. })));
    }
}
