//! Artifact files.
//!
//! Column orders are fixed:
//!
//! | file             | columns                                                        |
//! |------------------|----------------------------------------------------------------|
//! | `trajectory.csv` | `t, r, f`                                                      |
//! | `curvature.csv`  | `t, r, lambda1, lambda2, scalar, rm_norm, mean_curvature`      |
//! | `mass.csv`       | `t, family, b, mu, lambda2_at_b, adm, adm_error_bar`           |
//!
//! Floats are written with 17 significant digits, so values round-trip
//! exactly. Missing values (an undefined ADM mass, `H` at the origin) are
//! written as `nan` or `inf`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, ensure, Context, Result};
use radflow_core::diagnostics::{curvature_field, MassSeries};
use radflow_core::{MetricProfile, MonotoneCubic, RadialGrid, StencilSet, Trajectory};
use serde::Serialize;

pub const TRAJECTORY_CSV: &str = "trajectory.csv";
pub const CURVATURE_CSV: &str = "curvature.csv";
pub const MASS_CSV: &str = "mass.csv";
pub const LEDGER_JSON: &str = "ledger.json";
pub const REPORT_JSON: &str = "report.json";
pub const CONFIG_JSON: &str = "config.json";

/// 17 significant digits.
pub fn fmt(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

fn writer(dir: &Path, name: &str) -> Result<csv::Writer<BufWriter<File>>> {
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

pub fn write_trajectory(dir: &Path, snapshots: &[&MetricProfile]) -> Result<()> {
    let mut w = writer(dir, TRAJECTORY_CSV)?;
    w.write_record(["t", "r", "f"])?;
    for p in snapshots {
        let t = fmt(p.t());
        for (r, f) in p.r().iter().zip(p.f()) {
            w.write_record([t.as_str(), &fmt(*r), &fmt(*f)])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_curvature(dir: &Path, snapshots: &[&MetricProfile]) -> Result<()> {
    let mut w = writer(dir, CURVATURE_CSV)?;
    w.write_record([
        "t",
        "r",
        "lambda1",
        "lambda2",
        "scalar",
        "rm_norm",
        "mean_curvature",
    ])?;
    let Some(first) = snapshots.first() else {
        w.flush()?;
        return Ok(());
    };
    let st = StencilSet::new(first.grid());
    for p in snapshots {
        let c = curvature_field(p, &st);
        let t = fmt(p.t());
        for i in 0..p.r().len() {
            w.write_record([
                t.clone(),
                fmt(p.r()[i]),
                fmt(c.lambda1[i]),
                fmt(c.lambda2[i]),
                fmt(c.scalar[i]),
                fmt(c.rm_norm[i]),
                fmt(c.mean_curvature[i]),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_mass(dir: &Path, series: &[MassSeries]) -> Result<()> {
    let mut w = writer(dir, MASS_CSV)?;
    w.write_record([
        "t",
        "family",
        "b",
        "mu",
        "lambda2_at_b",
        "adm",
        "adm_error_bar",
    ])?;
    for s in series {
        for x in &s.samples {
            w.write_record([
                fmt(x.t),
                s.family.name().to_string(),
                fmt(x.b),
                fmt(x.mu),
                fmt(x.lambda2),
                fmt(x.adm.value.unwrap_or(f64::NAN)),
                fmt(x.adm.error_bar),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let path = dir.join(name);
    let mut out = BufWriter::new(
        File::create(&path).with_context(|| format!("creating {}", path.display()))?,
    );
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

fn parse(field: Option<&str>, path: &Path, line: usize) -> Result<f64> {
    let s = field.with_context(|| format!("{}:{line}: missing column", path.display()))?;
    s.trim()
        .parse()
        .with_context(|| format!("{}:{line}: not a number: {s:?}", path.display()))
}

/// Reads `(r, f)` pairs from a CSV file with a header row. The first two
/// columns are used.
pub fn read_table(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut rd = csv::Reader::from_path(path)
        .with_context(|| format!("opening profile table {}", path.display()))?;
    let (mut r, mut f) = (Vec::new(), Vec::new());
    for (k, rec) in rd.records().enumerate() {
        let rec = rec?;
        r.push(parse(rec.get(0), path, k + 2)?);
        f.push(parse(rec.get(1), path, k + 2)?);
    }
    ensure!(r.len() >= 2, "{}: need at least two rows", path.display());
    Ok((r, f))
}

/// Values of the tabulated `f` at the grid nodes. Samples that do not sit on
/// the grid are resampled with a monotone cubic, with a warning.
pub fn resample_table(r: &[f64], f: &[f64], grid: &RadialGrid) -> Result<Vec<f64>> {
    let nodes = grid.nodes();
    if r.windows(2).any(|w| !(w[1] > w[0])) {
        bail!("table radii must be strictly increasing");
    }
    if r[0] > 0.0 || r[r.len() - 1] < grid.r_max() * (1.0 - 1e-12) {
        bail!(
            "table covers [{}, {}] but the grid needs [0, {}]",
            r[0],
            r[r.len() - 1],
            grid.r_max()
        );
    }
    let on_grid = r.len() == nodes.len()
        && r.iter()
            .zip(nodes)
            .all(|(a, b)| (a - b).abs() <= 1e-12 * b.max(1.0));
    if on_grid {
        return Ok(f.to_vec());
    }
    log::warn!(
        "profile table has {} samples not on the {}-node grid; resampling with a monotone cubic",
        r.len(),
        nodes.len()
    );
    let interp = MonotoneCubic::new(r, f)?;
    Ok(nodes.iter().map(|&x| interp.eval(x)).collect())
}

/// Rebuilds a trajectory from `trajectory.csv`; the radii must be the nodes of `grid`.
pub fn read_trajectory(
    path: &Path,
    grid: &Arc<RadialGrid>,
    dimension: usize,
) -> Result<Trajectory> {
    let mut rd = csv::Reader::from_path(path)
        .with_context(|| format!("opening trajectory {}", path.display()))?;
    let nodes = grid.nodes();
    let mut snapshots = Vec::new();
    let mut current: Option<(f64, Vec<f64>)> = None;
    for (k, rec) in rd.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        let (t, r, f) = (
            parse(rec.get(0), path, line)?,
            parse(rec.get(1), path, line)?,
            parse(rec.get(2), path, line)?,
        );
        let (t0, fs) = current.get_or_insert_with(|| (t, Vec::new()));
        if t != *t0 {
            bail!(
                "{}:{line}: snapshot at t = {t0} is incomplete",
                path.display()
            );
        }
        let i = fs.len();
        ensure!(
            i < nodes.len() && (r - nodes[i]).abs() <= 1e-12 * nodes[i].max(1.0),
            "{}:{line}: r = {r} is not node {i} of the configured grid",
            path.display()
        );
        fs.push(f);
        if fs.len() == nodes.len() {
            let (t, fs) = current.take().unwrap();
            snapshots.push(MetricProfile::new(Arc::clone(grid), fs, t, dimension)?);
        }
    }
    ensure!(
        current.is_none(),
        "{}: trailing partial snapshot",
        path.display()
    );
    Ok(Trajectory::from_snapshots(snapshots)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use radflow_core::{GridSpec, Stretching};

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 1e300, std::f64::consts::PI] {
            let s = fmt(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().replace(['-', '.'], "");
            assert_eq!(mantissa.len(), 17);
        }
        assert_eq!(fmt(f64::NAN), "NaN");
    }

    #[test]
    fn resampling() {
        let grid = GridSpec {
            intervals: 16,
            r_max: 8.0,
            stretching: Stretching::Uniform,
        }
        .build()
        .unwrap();
        let r: Vec<f64> = (0..=80).map(|i| i as f64 * 0.1).collect();
        let f: Vec<f64> = r.iter().map(|x| 1.0 + 0.1 * x).collect();
        let v = resample_table(&r, &f, &grid).unwrap();
        for (x, y) in grid.nodes().iter().zip(&v) {
            assert!((1.0 + 0.1 * x - y).abs() < 1e-12);
        }
        assert!(resample_table(&r[..40], &f[..40], &grid).is_err());
        let on: Vec<f64> = grid.nodes().to_vec();
        let same = resample_table(&on, &[1.5; 17], &grid).unwrap();
        assert_eq!(same, vec![1.5; 17]);
    }
}
