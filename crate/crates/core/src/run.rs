//! Drives a configured simulation and writes its outputs.
//!
//! Files written into the output directory:
//! * `trace.csv`: `t,dt,mass_<species>...,F,dissipation,min_c`, one row
//!   for the initial state and one per step; undefined dissipation is an
//!   empty cell.
//! * `snapshot_<step>.csv`: `x[,y],c_<species>...,psi`, one row per cell.
//! * `summary.json`: termination reason and step-size metadata.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::SimConfig;
use crate::error::{PnpError, Result};
use crate::harness::{run_convergence_study_setup, write_convergence_csv, ConvergenceRow, TestCase, DEFAULT_K_FACTOR};
use crate::simulation::Simulation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    TFinalReached,
    SteadyState,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub t: f64,
    pub dt: f64,
    pub mass: Vec<f64>,
    pub free_energy: f64,
    pub dissipation: Option<f64>,
    pub min_c: f64,
}

#[derive(Debug)]
pub struct RunRecord {
    pub species_names: Vec<String>,
    pub rows: Vec<TraceRow>,
    pub final_c: Vec<Vec<f64>>,
    pub final_psi: Vec<f64>,
    pub termination: Termination,
    /// Index into `rows` of the first state flagged steady.
    pub steady_index: Option<usize>,
    pub step_size: f64,
    pub step_bound: f64,
    /// Set when the run stopped on a solver error.
    pub error: Option<PnpError>,
}

impl RunRecord {
    pub fn energies(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.free_energy).collect()
    }

    pub fn final_energy(&self) -> Option<f64> {
        self.rows.last().map(|r| r.free_energy)
    }

    pub fn energy_stable(&self) -> bool {
        crate::diagnostics::long_time_energy_stability(&self.energies(), self.steady_index)
    }
}

struct TraceWriter {
    out: Option<csv::Writer<BufWriter<File>>>,
}

impl TraceWriter {
    fn create(dir: Option<&Path>, names: &[String]) -> Result<Self> {
        let Some(dir) = dir else {
            return Ok(TraceWriter { out: None });
        };
        let mut w = csv::Writer::from_writer(BufWriter::new(File::create(dir.join("trace.csv"))?));
        let mut header = vec!["t".to_string(), "dt".to_string()];
        header.extend(names.iter().map(|n| format!("mass_{n}")));
        header.extend(["F", "dissipation", "min_c"].map(String::from));
        w.write_record(&header)?;
        Ok(TraceWriter { out: Some(w) })
    }

    fn write(&mut self, row: &TraceRow) -> Result<()> {
        if let Some(w) = &mut self.out {
            let mut rec = vec![row.t.to_string(), row.dt.to_string()];
            rec.extend(row.mass.iter().map(f64::to_string));
            rec.push(row.free_energy.to_string());
            rec.push(row.dissipation.map(|d| d.to_string()).unwrap_or_default());
            rec.push(row.min_c.to_string());
            w.write_record(&rec)?;
        }
        Ok(())
    }

    fn finish(self) -> Result<()> {
        if let Some(mut w) = self.out {
            w.flush()?;
        }
        Ok(())
    }
}

fn trace_row(sim: &Simulation, dt: f64) -> TraceRow {
    let energy = sim.energy();
    TraceRow {
        t: sim.time(),
        dt,
        mass: sim.masses(),
        free_energy: energy.free_energy,
        dissipation: energy.dissipation,
        min_c: sim
            .states()
            .iter()
            .map(|s| s.min())
            .fold(f64::INFINITY, f64::min),
    }
}

/// Writes the current fields of `sim` as `snapshot_<step>.csv`.
pub fn write_snapshot(dir: &Path, sim: &Simulation, names: &[String]) -> Result<PathBuf> {
    let path = dir.join(format!("snapshot_{}.csv", sim.steps()));
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(&path)?));
    let coords = sim.domain().coordinates();
    let mut header: Vec<String> = ["x", "y"][..coords.len()].iter().map(|s| s.to_string()).collect();
    header.extend(names.iter().map(|n| format!("c_{n}")));
    header.push("psi".into());
    w.write_record(&header)?;
    for cell in 0..sim.domain().cells() {
        let mut rec: Vec<String> = coords.iter().map(|axis| axis[cell].to_string()).collect();
        rec.extend(sim.states().iter().map(|s| s.c[cell].to_string()));
        rec.push(sim.psi()[cell].to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(path)
}

#[derive(Serialize)]
struct Summary<'a> {
    termination: Termination,
    steps: usize,
    final_time: f64,
    step_size: f64,
    step_bound: f64,
    /// "proven" for the 1D bound, "heuristic" for the 2D stand-in.
    step_bound_kind: &'static str,
    final_free_energy: Option<f64>,
    error: Option<String>,
    species: &'a [String],
}

/// Runs `config`, writing outputs into `out_dir` when given (falls back to
/// `config.output.directory`). Setup problems are returned as errors;
/// failures during stepping end the run with [`Termination::Error`].
pub fn run(config: &SimConfig, out_dir: Option<&Path>) -> Result<RunRecord> {
    let dir = out_dir.map(Path::to_path_buf).or_else(|| config.output.directory.clone());
    if let Some(d) = &dir {
        fs::create_dir_all(d)?;
    }
    let dir = dir.as_deref();
    let names: Vec<String> = config.species.iter().map(|s| s.name.clone()).collect();

    let (domain, states) = config.build()?;
    let dimension = domain.dimension();
    let mut sim = Simulation::new(domain, states, config.cfl.policy)?;
    let bound = sim.step_bound();
    let k = config.cfl.policy.choose_step(config.time.k.requested(), bound, config.cfl.safety)?;

    let mut trace = TraceWriter::create(dir, &names)?;
    let mut rows = vec![trace_row(&sim, 0.0)];
    trace.write(&rows[0])?;
    if let Some(d) = dir {
        write_snapshot(d, &sim, &names)?;
    }

    let every = config.output.snapshot_every;
    let mut observer = |s: &Simulation, rep: &crate::scheme::StepReport| -> Result<()> {
        let row = trace_row(s, rep.dt_used);
        trace.write(&row)?;
        rows.push(row);
        if let Some(d) = dir {
            if every > 0 && s.steps().is_multiple_of(every) {
                write_snapshot(d, s, &names)?;
            }
        }
        Ok(())
    };

    let mut steady_index = None;
    let outcome: Result<Termination> = if names.is_empty() {
        Ok(Termination::TFinalReached)
    } else if config.time.steady_state {
        let max_time = config.time.max_time.unwrap_or(crate::config::DEFAULT_MAX_TIME);
        match sim.run_to_steady(k, max_time, &config.tolerances.steady(), &mut observer) {
            Ok(Some(rep)) if rep.converged => {
                steady_index = Some(sim.steps());
                Ok(Termination::SteadyState)
            }
            Ok(_) => Ok(Termination::TFinalReached),
            Err(e) => Err(e),
        }
    } else {
        let t_final = config.time.t_final.unwrap_or(0.0);
        sim.advance_to(t_final, k, &mut observer).map(|_| Termination::TFinalReached)
    };
    trace.finish()?;

    let (termination, error) = match outcome {
        Ok(t) => (t, None),
        Err(e) => (Termination::Error, Some(e)),
    };
    if let Some(d) = dir {
        if every == 0 || !sim.steps().is_multiple_of(every) {
            write_snapshot(d, &sim, &names)?;
        }
        let summary = Summary {
            termination,
            steps: sim.steps(),
            final_time: sim.time(),
            step_size: k,
            step_bound: bound,
            step_bound_kind: if dimension == 1 { "proven" } else { "heuristic" },
            final_free_energy: rows.last().map(|r| r.free_energy),
            error: error.as_ref().map(|e| e.to_string()),
            species: &names,
        };
        let mut f = BufWriter::new(File::create(d.join("summary.json"))?);
        serde_json::to_writer_pretty(&mut f, &summary).map_err(|e| PnpError::Io(e.into()))?;
        f.write_all(b"\n")?;
        f.flush()?;
    }

    Ok(RunRecord {
        species_names: names,
        rows,
        final_c: sim.states().iter().map(|s| s.c.clone()).collect(),
        final_psi: sim.psi().to_vec(),
        termination,
        steady_index,
        step_size: k,
        step_bound: bound,
        error,
    })
}

/// What to refine in a convergence study.
#[derive(Debug, Clone)]
pub enum StudyTarget {
    Case(TestCase),
    Config(Box<SimConfig>),
}

/// Runs a convergence study and writes `convergence.csv` into `out_dir`.
/// `h_list`, `h_ref` and `t_final` default to the case's own values; for a
/// config, `h_ref` defaults to a quarter of the finest `h` and `t_final` to
/// the configured one.
pub fn converge(
    target: &StudyTarget,
    h_list: Option<&[f64]>,
    h_ref: Option<f64>,
    t_final: Option<f64>,
    out_dir: &Path,
) -> Result<Vec<ConvergenceRow>> {
    let (setup, hs, href, tf) = match target {
        StudyTarget::Case(case) => (
            case.setup.clone(),
            h_list.map(<[f64]>::to_vec).unwrap_or_else(|| case.h_list.clone()),
            h_ref.unwrap_or(case.h_ref),
            t_final.unwrap_or(case.t_final),
        ),
        StudyTarget::Config(cfg) => {
            let hs = h_list
                .map(<[f64]>::to_vec)
                .ok_or_else(|| PnpError::Config("a config-based study needs --h".into()))?;
            let finest = hs.iter().copied().fold(f64::INFINITY, f64::min);
            let tf = t_final
                .or(cfg.time.t_final)
                .ok_or_else(|| PnpError::Config("a convergence study needs a final time".into()))?;
            (cfg.setup(), hs, h_ref.unwrap_or(finest / 4.0), tf)
        }
    };
    if hs.is_empty() {
        return Err(PnpError::Config("empty h list".into()));
    }
    let rows = run_convergence_study_setup(&setup, &hs, href, tf, DEFAULT_K_FACTOR)?;
    fs::create_dir_all(out_dir)?;
    write_convergence_csv(&rows, BufWriter::new(File::create(out_dir.join("convergence.csv"))?))?;
    Ok(rows)
}
