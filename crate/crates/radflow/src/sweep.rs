//! Concurrent parameter sweeps over bump amplitude and dimension.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::Result;
use radflow_core::{evolve, ProfileFamily, ProfileSpec};
use serde::{Deserialize, Serialize};

use crate::config::{ProfileSource, RunConfig};
use crate::pipeline::{build_grid, completion_checks, sup_deviation};
use crate::report::{Check, Report};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    /// Grid, solver and bump width for every cell.
    pub base: RunConfig,
    pub amplitudes: Vec<f64>,
    pub dimensions: Vec<usize>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            base: RunConfig::default(),
            amplitudes: vec![0.1, 0.3, 0.5],
            dimensions: vec![3, 4, 5],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Passed,
    Failed,
    /// Parameters rejected before any compute.
    Invalid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub amplitude: f64,
    pub dimension: usize,
    pub status: CellStatus,
    pub report: Report,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub passed: bool,
    pub cells: Vec<SweepCell>,
}

impl SweepReport {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

fn width(base: &RunConfig) -> f64 {
    match &base.profile {
        ProfileSource::Spec(ProfileSpec {
            family: ProfileFamily::Bump { width, .. },
            ..
        }) => *width,
        _ => 2.0,
    }
}

fn run_cell(base: &RunConfig, amplitude: f64, dimension: usize) -> SweepCell {
    let spec = ProfileSpec::bump(amplitude, width(base), dimension);
    let mut report = Report::new(format!("A={amplitude},n={dimension}"));
    let status = match spec.validate() {
        Err(e) => {
            report.error(e);
            CellStatus::Invalid
        }
        Ok(()) => {
            let mut run = || -> Result<Vec<Check>> {
                let g = build_grid(&base.grid)?;
                let traj = evolve(&spec.sample(&g)?, &base.solver)?;
                report.log("steps", traj.steps);
                report.log("sup_abs_w", sup_deviation(&traj));
                Ok(completion_checks(&traj, base.solver.f_cap))
            };
            match run() {
                Ok(checks) => report.extend(checks),
                Err(e) => report.error(e),
            }
            if report.passed {
                CellStatus::Passed
            } else {
                CellStatus::Failed
            }
        }
    };
    SweepCell {
        amplitude,
        dimension,
        status,
        report,
    }
}

/// Runs every `(amplitude, dimension)` pair on up to `threads` worker
/// threads. Cells are independent; their order in the report follows the
/// input order (amplitude-major), whatever the scheduling.
pub fn run_sweep(spec: &SweepSpec, threads: usize) -> Result<SweepReport> {
    spec.base.solver.validate()?;
    spec.base.grid.build()?;
    let jobs: Vec<(f64, usize)> = spec
        .amplitudes
        .iter()
        .flat_map(|&a| spec.dimensions.iter().map(move |&n| (a, n)))
        .collect();
    let slots: Vec<Mutex<Option<SweepCell>>> = jobs.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = threads.max(1).min(jobs.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(a, n)) = jobs.get(k) else { break };
                let cell = run_cell(&spec.base, a, n);
                log::info!("sweep cell A={a} n={n}: {:?}", cell.status);
                *slots[k].lock().unwrap() = Some(cell);
            });
        }
    });
    let cells: Vec<SweepCell> = slots
        .into_iter()
        .map(|m| m.into_inner().unwrap().expect("every job ran"))
        .collect();
    Ok(SweepReport {
        passed: cells.iter().all(|c| c.status == CellStatus::Passed),
        cells,
    })
}

/// One row per cell: `amplitude, dimension, status, steps, sup_abs_w`.
pub fn write_sweep_csv(dir: &std::path::Path, report: &SweepReport) -> Result<()> {
    let mut w = csv::Writer::from_path(dir.join("sweep.csv"))?;
    w.write_record(["amplitude", "dimension", "status", "steps", "sup_abs_w"])?;
    for c in &report.cells {
        let get = |k: &str| {
            c.report
                .logged
                .get(k)
                .map(|v| v.to_string())
                .unwrap_or_default()
        };
        let status = serde_json::to_value(c.status)?;
        w.write_record([
            crate::io::fmt(c.amplitude),
            c.dimension.to_string(),
            status.as_str().unwrap_or_default().to_string(),
            get("steps"),
            c.report
                .logged
                .get("sup_abs_w")
                .and_then(|v| v.as_f64())
                .map(crate::io::fmt)
                .unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
