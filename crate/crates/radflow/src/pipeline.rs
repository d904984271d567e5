//! Evolution and diagnosis of one configured run.

use std::path::Path;
use std::sync::Arc;

use anyhow::{Context, Result};
use radflow_core::diagnostics::{
    bound_ledger, curvature_field, mass_series, verify_adm_constancy, verify_barriers,
    verify_decay, verify_max_principle, verify_quasilocal, Allowances, BoundLedger, MassSeries,
};
use radflow_core::{
    evolve, EventKind, GridSpec, MetricProfile, ProfileFamily, ProfileSpec, RadialGrid, StencilSet,
    Stretching, Trajectory,
};

use crate::config::{AllowanceRule, FaultInjection, ProfileSource, RunConfig};
use crate::io;
use crate::report::{Check, Report};

pub fn build_grid(spec: &GridSpec) -> Result<Arc<RadialGrid>> {
    Ok(Arc::new(spec.build()?))
}

/// Same extent and stretching with half the intervals; its nodes are every
/// other node of `spec`'s grid.
pub fn coarsened(spec: &GridSpec) -> GridSpec {
    let mut c = *spec;
    c.intervals /= 2;
    if let Stretching::Geometric { ratio } = c.stretching {
        c.stretching = Stretching::Geometric {
            ratio: ratio * ratio,
        };
    }
    c
}

pub fn build_profile(source: &ProfileSource, grid: &Arc<RadialGrid>) -> Result<MetricProfile> {
    match source {
        ProfileSource::Spec(spec) => Ok(spec.sample(grid)?),
        ProfileSource::TableFile { table, dimension } => {
            let (r, f) = io::read_table(table)?;
            let values = io::resample_table(&r, &f, grid)
                .with_context(|| format!("resampling {}", table.display()))?;
            Ok(ProfileSpec::new(ProfileFamily::Table { values }, *dimension).sample(grid)?)
        }
    }
}

/// Evolves the configured initial data.
pub fn run_evolution(cfg: &RunConfig) -> Result<Trajectory> {
    let grid = build_grid(&cfg.grid)?;
    let p = build_profile(&cfg.profile, &grid)?;
    Ok(evolve(&p, &cfg.solver)?)
}

/// Adds `delta_f` to `f` at the peak of the middle snapshot.
pub fn inject_fault(traj: &mut Trajectory, fault: FaultInjection) -> Result<()> {
    let k = traj.snapshots.len() / 2;
    let p = &traj.snapshots[k];
    let (node, _) = p.max_f();
    let mut f = p.f().to_vec();
    f[node] += fault.delta_f;
    let t = p.t();
    traj.snapshots[k] = MetricProfile::new(Arc::clone(p.grid()), f, t, p.dimension())?;
    log::warn!("fault injected at t = {t}, node {node}");
    Ok(())
}

pub fn allowances(cfg: &RunConfig, fine: &Trajectory) -> Result<Allowances> {
    match cfg.diagnostics.allowance {
        AllowanceRule::Uniform(eps) => Ok(Allowances::uniform(eps)),
        AllowanceRule::SelfConvergence(mult) => {
            let coarse_cfg = RunConfig {
                grid: coarsened(&cfg.grid),
                ..cfg.clone()
            };
            let coarse = run_evolution(&coarse_cfg).context("half-resolution run")?;
            Ok(Allowances::from_self_convergence(fine, &coarse, mult)?)
        }
    }
}

/// Every `stride`-th snapshot plus the last one.
pub fn thinned(traj: &Trajectory, stride: usize) -> Result<Trajectory> {
    if stride <= 1 {
        return Ok(traj.clone());
    }
    let last = traj.snapshots.len() - 1;
    let keep = traj
        .snapshots
        .iter()
        .enumerate()
        .filter(|(k, _)| k % stride == 0 || *k == last)
        .map(|(_, p)| p.clone())
        .collect();
    let mut out = Trajectory::from_snapshots(keep)?;
    out.events = traj.events.clone();
    out.tail_exponent = traj.tail_exponent;
    out.steps = traj.steps;
    Ok(out)
}

/// Terminal event and the absence of a minimal sphere at every stored time.
pub fn completion_checks(traj: &Trajectory, f_cap: f64) -> Vec<Check> {
    let term = traj.terminal().copied();
    let completed = Check::flag(
        "completed",
        traj.completed(),
        term.map(|e| format!("{:?} at t = {}", e.kind, e.t))
            .unwrap_or_default(),
    );
    let capped = traj
        .events
        .iter()
        .any(|e| e.kind == EventKind::MinimalSphereCap);
    let worst = traj
        .snapshots
        .iter()
        .map(|p| p.check_no_minimal_sphere(f_cap).max_f)
        .fold(0.0, f64::max);
    let sphere = Check::at_most("no_minimal_sphere", worst, f_cap).with_detail(if capped {
        "f_cap event raised"
    } else {
        ""
    });
    let sphere = Check {
        passed: sphere.passed && !capped,
        ..sphere
    };
    vec![completed, sphere]
}

/// Full diagnosis of a trajectory.
pub struct Diagnosis {
    pub report: Report,
    pub ledger: BoundLedger,
    pub allowances: Allowances,
    pub mass: Vec<MassSeries>,
}

pub fn diagnose(cfg: &RunConfig, traj: &Trajectory, eps: Allowances) -> Result<Diagnosis> {
    let mut report = Report::new("diagnose");
    let st = StencilSet::new(traj.grid());
    let ledger = bound_ledger(traj.initial(), &st)?;
    let sub = thinned(traj, cfg.diagnostic_stride())?;
    report.extend(completion_checks(traj, cfg.solver.f_cap));
    report.extend(verify_max_principle(&sub, &ledger, &eps));
    let decay = verify_decay(&sub, &ledger, &eps);
    report.log("rm_early_max", decay.rm_early_max);
    report.extend(decay.checks);
    report.extend(verify_barriers(&sub, &ledger, &eps)?);
    let mut mass = Vec::new();
    for fam in &cfg.diagnostics.families {
        let s = mass_series(&sub, *fam, &ledger)?;
        report.extend(
            verify_quasilocal(&s, &eps)
                .into_iter()
                .map(|c| Check::from(c).prefixed(fam.name())),
        );
        mass.push(s);
    }
    if let Some(s) = mass.first() {
        report.push(verify_adm_constancy(s, cfg.diagnostics.adm_tolerance));
    }
    report.log("allowances", eps);
    report.log(
        "ledger_structurally_consistent",
        ledger.structurally_consistent(),
    );
    report.log("steps", traj.steps);
    report.log("tail_exponent", traj.tail_exponent);
    Ok(Diagnosis {
        report,
        ledger,
        allowances: eps,
        mass,
    })
}

/// Writes the standard artifacts of a diagnosed run into `dir`.
pub fn write_artifacts(
    dir: &Path,
    cfg: &RunConfig,
    traj: &Trajectory,
    diag: Option<&Diagnosis>,
    report: &Report,
) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    io::write_json(dir, io::CONFIG_JSON, cfg)?;
    let all: Vec<&MetricProfile> = traj.snapshots.iter().collect();
    io::write_trajectory(dir, &all)?;
    let stride = cfg.diagnostic_stride();
    let last = all.len() - 1;
    let picked: Vec<&MetricProfile> = all
        .iter()
        .enumerate()
        .filter(|(k, _)| k % stride == 0 || *k == last)
        .map(|(_, p)| *p)
        .collect();
    io::write_curvature(dir, &picked)?;
    match diag {
        Some(d) => {
            io::write_mass(dir, &d.mass)?;
            io::write_json(dir, io::LEDGER_JSON, &d.ledger)?;
        }
        None => {
            io::write_mass(dir, &[])?;
            let st = StencilSet::new(traj.grid());
            io::write_json(dir, io::LEDGER_JSON, &bound_ledger(traj.initial(), &st)?)?;
        }
    }
    io::write_json(dir, io::REPORT_JSON, report)?;
    Ok(())
}

/// `sup |f^2 - 1|` over a trajectory.
pub fn sup_deviation(traj: &Trajectory) -> f64 {
    traj.snapshots
        .iter()
        .flat_map(|p| p.w())
        .map(f64::abs)
        .fold(0.0, f64::max)
}

/// `min R` over every snapshot.
pub fn min_scalar(traj: &Trajectory) -> f64 {
    let st = StencilSet::new(traj.grid());
    traj.snapshots
        .iter()
        .map(|p| curvature_field(p, &st).min_scalar())
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use radflow_core::SolverConfig;

    fn small() -> RunConfig {
        RunConfig {
            grid: GridSpec {
                intervals: 64,
                r_max: 40.0,
                stretching: Stretching::Sinh { scale: 4.0 },
            },
            solver: SolverConfig {
                t_end: 1.0,
                dt_out: 0.25,
                ..SolverConfig::default()
            },
            ..RunConfig::default()
        }
    }

    #[test]
    fn coarse_grid_is_nested() {
        for spec in [
            small().grid,
            GridSpec {
                intervals: 32,
                r_max: 10.0,
                stretching: Stretching::Geometric { ratio: 1.05 },
            },
        ] {
            let (f, c) = (spec.build().unwrap(), coarsened(&spec).build().unwrap());
            for (i, r) in c.nodes().iter().enumerate() {
                assert!((f.nodes()[2 * i] - r).abs() <= 1e-12 * r.max(1.0));
            }
        }
    }

    #[test]
    fn thinning_keeps_ends() {
        let traj = run_evolution(&small()).unwrap();
        assert_eq!(traj.snapshots.len(), 5);
        let t = thinned(&traj, 3).unwrap();
        assert_eq!(
            t.times(),
            vec![traj.times()[0], traj.times()[3], traj.times()[4]]
        );
        assert!(t.completed());
    }

    #[test]
    fn small_run_diagnoses_clean() {
        let cfg = small();
        let traj = run_evolution(&cfg).unwrap();
        let eps = allowances(&cfg, &traj).unwrap();
        let d = diagnose(&cfg, &traj, eps).unwrap();
        let failed: Vec<_> = d.report.failed_checks().collect();
        assert!(d.report.passed, "{failed:?}");
    }

    #[test]
    fn fault_breaks_max_principle() {
        let cfg = small();
        let mut traj = run_evolution(&cfg).unwrap();
        inject_fault(&mut traj, FaultInjection { delta_f: 0.1 }).unwrap();
        let d = diagnose(&cfg, &traj, Allowances::uniform(1e-6)).unwrap();
        assert!(!d.report.passed);
        assert!(d.report.failed_checks().any(|c| c.name == "w_sup"));
    }
}
