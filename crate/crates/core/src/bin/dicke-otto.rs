use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use dicke_otto::correlations::{correlation_report, CorrelationOptions};
use dicke_otto::cycle::{run_cycle, CycleProtocol, CycleResult};
use dicke_otto::spectral::{self, Method, ModelParams};
use dicke_otto::sweep::{emit_csv, emit_json, run_sweep, Config, Output, PhaseGrid, SweepSpec, MAX_DOUBLINGS};

#[derive(Parser)]
#[command(name = "dicke-otto", version, about = "Quantum Otto cycles on the open Dicke model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the lowest eigenvalues of the [model] Hamiltonian.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        model: ModelOverrides,
        /// Number of levels to print.
        #[arg(long, default_value_t = 10)]
        levels: usize,
    },
    /// Run one Otto cycle from the [cycle] section.
    Cycle {
        #[command(flatten)]
        common: Common,
    },
    /// Run the [sweep] grid.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Thermal correlations of the [model] Hamiltonian at bath.temperature.
    Correlate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        model: ModelOverrides,
        #[arg(long)]
        temperature: Option<f64>,
        /// Shrink the Fock cutoff while the result is unchanged.
        #[arg(long)]
        auto_cutoff: bool,
    },
    /// Regime map over the [sweep] grid; outputs default to the cycle set.
    PhaseDiagram {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; `.json` writes JSON, anything else CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads, 0 for all cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Fock truncation per displaced basis (or bare cutoff).
    #[arg(long)]
    ntr: Option<usize>,
    /// Double the truncation until the low spectrum is converged.
    #[arg(long)]
    auto_converge: bool,
    #[arg(long)]
    method: Option<Method>,
}

#[derive(Args)]
struct ModelOverrides {
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    n_qubits: Option<usize>,
    #[arg(long)]
    omega0: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
}

impl Common {
    fn load(&self, required: bool) -> Result<Config> {
        let mut config = match &self.config {
            Some(path) => Config::load(path)?,
            None if required => bail!(dicke_otto::Error::Config {
                key: "--config".into(),
                reason: "this subcommand needs a configuration file".into(),
            }),
            None => Config::default(),
        };
        if let Some(n) = self.ntr {
            config.model.n_tr = n;
        }
        if let Some(m) = self.method {
            config.model.method = m;
            if let Some(c) = config.cycle.as_mut() {
                c.method = m;
            }
        }
        if let Some(s) = config.sweep.as_mut() {
            if let Some(t) = self.threads {
                s.threads = t;
            }
            s.auto_converge |= self.auto_converge;
        }
        Ok(config)
    }
}

impl ModelOverrides {
    fn apply(&self, config: &mut Config) {
        let m = &mut config.model;
        m.lambda = self.lambda.unwrap_or(m.lambda);
        m.n_qubits = self.n_qubits.unwrap_or(m.n_qubits);
        m.omega0 = self.omega0.unwrap_or(m.omega0);
        m.delta = self.delta.unwrap_or(m.delta);
    }
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").map_err(|e| dicke_otto::Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(())
}

fn spectrum(common: &Common, model: &ModelOverrides, levels: usize) -> Result<()> {
    let mut config = common.load(false)?;
    model.apply(&mut config);
    let p = config.model.params();
    let (energies, n_tr) = if common.auto_converge {
        let c = spectral::converged_energies(&p, config.model.method, MAX_DOUBLINGS)?;
        (c.energies, c.n_tr)
    } else {
        (spectral::energies(&p, config.model.method)?, p.n_tr)
    };
    let shown = &energies[..levels.min(energies.len())];
    println!("# method={} n_qubits={} lambda={} n_tr={}", config.model.method, p.n_qubits, p.lambda, n_tr);
    for (k, e) in shown.iter().enumerate() {
        println!("{k}\t{e:.12}");
    }
    if let Some(out) = &common.out {
        write_json(&serde_json::json!({ "params": p.with_n_tr(n_tr), "energies": shown }), out)?;
    }
    Ok(())
}

fn converged_cycle(proto: &CycleProtocol) -> Result<CycleResult> {
    let n_tr = [proto.hot_params(), proto.cold_params()]
        .iter()
        .map(|p| spectral::converged_energies(p, proto.method, MAX_DOUBLINGS).map(|c| c.n_tr))
        .collect::<dicke_otto::Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(proto.n_tr);
    Ok(run_cycle(&proto.with_n_tr(n_tr))?)
}

fn cycle(common: &Common) -> Result<()> {
    let config = common.load(true)?;
    let proto = config.protocol()?.ok_or_else(|| dicke_otto::Error::Config {
        key: "cycle".into(),
        reason: "missing [cycle] section".into(),
    })?;
    let r = if common.auto_converge { converged_cycle(&proto)? } else { run_cycle(&proto)? };
    println!("regime\t{}", r.regime);
    println!("work\t{:.12e}", r.work);
    println!("q_hot\t{:.12e}", r.q_hot);
    println!("q_cold\t{:.12e}", r.q_cold);
    if let Some(eta) = r.eta {
        println!("eta\t{eta:.12}\t(carnot {:.12})", r.carnot_eta);
    }
    if let Some(cop) = r.cop {
        println!("cop\t{cop:.12}\t(carnot {:.12})", r.carnot_cop);
    }
    if let Some(out) = &common.out {
        write_json(&r, out)?;
    }
    Ok(())
}

fn correlate(common: &Common, model: &ModelOverrides, temperature: Option<f64>, auto_cutoff: bool) -> Result<()> {
    let mut config = common.load(false)?;
    model.apply(&mut config);
    let t = temperature.unwrap_or(config.bath.temperature);
    let p: ModelParams = config.model.params();
    let opts = CorrelationOptions {
        auto_cutoff,
        ..CorrelationOptions::default()
    };
    let r = correlation_report(&p, t, &opts)?;
    let show = |x: Option<f64>| x.map_or("undefined".to_string(), |v| format!("{v:.12}"));
    println!("g2\t{}", show(r.g2_conventional));
    println!("g2_generalized\t{}", show(r.g2_generalized));
    println!("negativity\t{:.12e}", r.negativity);
    println!("mean_photon\t{:.12e}", r.mean_photon);
    println!("fock_cutoff\t{}", r.fock_cutoff);
    if let Some(out) = &common.out {
        write_json(&r, out)?;
    }
    Ok(())
}

fn write_grid(grid: &PhaseGrid, path: &Path) -> Result<()> {
    if path.extension().is_some_and(|e| e == "json") {
        emit_json(grid, path)?;
    } else {
        emit_csv(grid, path)?;
    }
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn sweep(common: &Common, phase_diagram: bool) -> Result<()> {
    let mut config = common.load(true)?;
    if phase_diagram {
        if let Some(s) = config.sweep.as_mut().filter(|s| s.outputs.is_empty()) {
            s.outputs = Output::PHASE_DIAGRAM.iter().map(|o| o.as_str().to_string()).collect();
        }
    }
    let spec = SweepSpec::from_config(&config)?;
    if phase_diagram && spec.axes.len() != 2 {
        bail!(dicke_otto::Error::Config {
            key: "sweep.axes".into(),
            reason: format!("a phase diagram needs two axes, got {}", spec.axes.len()),
        });
    }
    let grid = run_sweep(&spec)?;
    let section = config.sweep.as_ref().expect("validated");
    let mut paths: Vec<PathBuf> = section.csv.iter().chain(&section.json).cloned().collect();
    paths.extend(common.out.clone());
    if paths.is_empty() {
        bail!(dicke_otto::Error::Config {
            key: "sweep.csv".into(),
            reason: "no output path; set sweep.csv, sweep.json or --out".into(),
        });
    }
    for path in &paths {
        write_grid(&grid, path)?;
    }
    let mut regimes: BTreeMap<&str, usize> = BTreeMap::new();
    for cell in &grid.cells {
        if let Some(r) = cell.regime {
            *regimes.entry(r.as_str()).or_default() += 1;
        }
    }
    println!("cells\t{}", grid.cells.len());
    println!("failed\t{}", grid.failed_cells());
    for (name, count) in regimes {
        println!("{name}\t{count}");
    }
    if !grid.complete {
        let first = grid.cells.iter().find_map(|c| c.error.as_deref()).unwrap_or_default();
        eprintln!("warning: {} cells failed, first: {first}", grid.failed_cells());
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    err.chain()
        .find_map(|e| e.downcast_ref::<dicke_otto::Error>())
        .map_or(3, |e| e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Spectrum { common, model, levels } => spectrum(common, model, *levels),
        Command::Cycle { common } => cycle(common),
        Command::Sweep { common } => sweep(common, false),
        Command::Correlate {
            common,
            model,
            temperature,
            auto_cutoff,
        } => correlate(common, model, *temperature, *auto_cutoff),
        Command::PhaseDiagram { common } => sweep(common, true),
    }
    .context("dicke-otto failed");
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
