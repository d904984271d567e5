//! Named experiments. Each builds its own canonical configuration, runs,
//! writes artifacts when an output directory is given and returns a report
//! whose `passed` flag decides the exit status.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Result};
use radflow_core::cartesian::{crosscheck_run, CartesianConfig, StencilOrder};
use radflow_core::diagnostics::mass::quasilocal_mass_value;
use radflow_core::diagnostics::{
    adm_mass, bound_ledger, curvature_field, mass_series, observed_orders, refinement_errors,
    residual_auxiliary_pdes, residual_scalar_evolution, residual_w_equation, verify_adm_constancy,
    verify_barriers, verify_decay, verify_max_principle, verify_quasilocal, Allowances, Auxiliary,
    BoundLedger,
};
use radflow_core::weighted::{
    bump_kernel, dyadic_decomposition, mollify, weighted_norm, LpExponent, NormSpec, RadialFunction,
};
use radflow_core::{
    evolve, BoundaryMode, GridSpec, ProfileFamily, ProfileSpec, RadialGrid, SolverConfig,
    StencilSet, Stretching, Trajectory,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{default_families, FaultInjection, ProfileSource, RunConfig};
use crate::io;
use crate::pipeline::{
    allowances, build_grid, completion_checks, inject_fault, min_scalar, run_evolution,
    sup_deviation, write_artifacts, Diagnosis,
};
use crate::report::{Check, Report};

pub const PRESETS: [&str; 8] = [
    "flat-fixed-point",
    "max-principle",
    "decay-study",
    "mass-constancy",
    "quasilocal-decay",
    "aux-residuals",
    "crosscheck",
    "norm-audit",
];

/// Settings that carry over from the command line into every preset.
#[derive(Debug, Clone, Default)]
pub struct PresetOptions {
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub fault: Option<FaultInjection>,
}

pub fn run_preset(name: &str, opts: &PresetOptions) -> Result<Report> {
    let mut report = match name {
        "flat-fixed-point" => flat_fixed_point(opts)?,
        "max-principle" => max_principle(opts)?,
        "decay-study" => decay_study(opts)?,
        "mass-constancy" => mass_constancy(opts)?,
        "quasilocal-decay" => quasilocal_decay(opts)?,
        "aux-residuals" => aux_residuals(opts)?,
        "crosscheck" => crosscheck(opts)?,
        "norm-audit" => norm_audit(opts)?,
        _ => bail!("unknown preset {name:?}; known: {}", PRESETS.join(", ")),
    };
    report.name = name.to_string();
    if let Some(dir) = &opts.out {
        std::fs::create_dir_all(dir)?;
        io::write_json(dir, io::REPORT_JSON, &report)?;
    }
    Ok(report)
}

/// Bump `A = 0.5`, `s = 2`, `n = 3` on 512 sinh-stretched intervals to `r = 100`, `t_end = 20`.
pub fn default_config(opts: &PresetOptions, name: &str) -> RunConfig {
    RunConfig {
        preset: Some(name.to_string()),
        seed: opts.seed,
        output_dir: opts.out.clone(),
        ..RunConfig::default()
    }
}

fn mass_tail_config(opts: &PresetOptions, name: &str, t_end: f64, bc: BoundaryMode) -> RunConfig {
    let mut cfg = default_config(opts, name);
    cfg.profile = ProfileSource::Spec(ProfileSpec::mass_tail(0.1, 1.0, 3));
    cfg.solver.t_end = t_end;
    cfg.solver.boundary = bc;
    cfg
}

fn save(
    opts: &PresetOptions,
    cfg: &RunConfig,
    traj: &Trajectory,
    diag: Option<&Diagnosis>,
    report: &Report,
) -> Result<()> {
    if let Some(dir) = &opts.out {
        write_artifacts(dir, cfg, traj, diag, report)?;
    }
    Ok(())
}

fn ledger_of(traj: &Trajectory) -> Result<BoundLedger> {
    Ok(bound_ledger(traj.initial(), &StencilSet::new(traj.grid()))?)
}

fn flat_fixed_point(opts: &PresetOptions) -> Result<Report> {
    let mut cfg = default_config(opts, "flat-fixed-point");
    cfg.profile = ProfileSource::Spec(ProfileSpec::flat(3));
    cfg.solver.t_end = 1.0;
    let traj = run_evolution(&cfg)?;
    let mut report = Report::new("flat-fixed-point");
    report.extend(completion_checks(&traj, cfg.solver.f_cap));
    report.push(Check::at_most(
        "sup_f2_minus_1",
        sup_deviation(&traj),
        1e-12,
    ));
    save(opts, &cfg, &traj, None, &report)?;
    Ok(report)
}

fn max_principle(opts: &PresetOptions) -> Result<Report> {
    let mut cfg = default_config(opts, "max-principle");
    cfg.fault = opts.fault;
    let mut traj = run_evolution(&cfg)?;
    let eps = allowances(&cfg, &traj)?;
    let ledger = ledger_of(&traj)?;
    if let Some(f) = cfg.fault {
        inject_fault(&mut traj, f)?;
    }
    let mut report = Report::new("max-principle");
    report.extend(completion_checks(&traj, cfg.solver.f_cap));
    report.extend(verify_max_principle(&traj, &ledger, &eps));
    report.log("allowances", eps);
    report.log("fault_injected", cfg.fault.is_some());
    save(opts, &cfg, &traj, None, &report)?;
    Ok(report)
}

/// `lambda_1 = lambda_2 = 1` on a cap of the unit sphere, where `f^2 = 1/(1 - r^2)`.
pub fn round_sphere_checks() -> Result<Vec<Check>> {
    let err = |intervals: usize| -> Result<(f64, f64)> {
        let g = build_grid(&GridSpec {
            intervals,
            r_max: 0.9,
            stretching: Stretching::Uniform,
        })?;
        let values = g
            .nodes()
            .iter()
            .map(|r| (1.0 / (1.0 - r * r)).sqrt())
            .collect();
        let p = ProfileSpec::new(ProfileFamily::Table { values }, 3).sample(&g)?;
        let c = curvature_field(&p, &StencilSet::new(&g));
        let e1 = c
            .lambda1
            .iter()
            .map(|l| (l - 1.0).abs())
            .fold(0.0, f64::max);
        let e2 = c
            .lambda2
            .iter()
            .map(|l| (l - 1.0).abs())
            .fold(0.0, f64::max);
        Ok((e1, e2))
    };
    let (a, a2) = err(128)?;
    let (b, b2) = err(256)?;
    Ok(vec![
        Check::at_most("round_sphere_lambda2", a2.max(b2), 1e-10),
        Check::at_least("round_sphere_lambda1_order", (a / b).log2(), 1.8)
            .with_detail(format!("max errors {a:e}, {b:e}")),
    ])
}

fn decay_study(opts: &PresetOptions) -> Result<Report> {
    let cfg = default_config(opts, "decay-study");
    let traj = run_evolution(&cfg)?;
    let eps = allowances(&cfg, &traj)?;
    let ledger = ledger_of(&traj)?;
    let mut report = Report::new("decay-study");
    report.extend(completion_checks(&traj, cfg.solver.f_cap));
    let decay = verify_decay(&traj, &ledger, &eps);
    report.log("rm_early_max", decay.rm_early_max);
    report.extend(decay.checks);
    report.extend(verify_barriers(&traj, &ledger, &eps)?);
    report.log("allowances", eps);
    report.absorb(scalar_floor_mass_tail(opts)?);
    report.extend(round_sphere_checks()?);
    let diag = Diagnosis {
        report: report.clone(),
        ledger,
        allowances: eps,
        mass: Vec::new(),
    };
    save(opts, &cfg, &traj, Some(&diag), &report)?;
    Ok(report)
}

/// For data with `R >= 0` the floor `min R >= -eps` must persist.
fn scalar_floor_mass_tail(opts: &PresetOptions) -> Result<Report> {
    let cfg = mass_tail_config(opts, "decay-study", 20.0, BoundaryMode::default());
    let traj = run_evolution(&cfg)?;
    let eps = allowances(&cfg, &traj)?;
    let st = StencilSet::new(traj.grid());
    let r0 = curvature_field(traj.initial(), &st).min_scalar();
    let mut report = Report::new("mass_tail");
    report.extend(completion_checks(&traj, cfg.solver.f_cap));
    report.log("min_scalar_initial", r0);
    if r0 >= 0.0 {
        let mut c = Check::at_least("scalar_nonnegative", min_scalar(&traj), 0.0);
        c.allowance = eps.scalar;
        c.passed = c.margin + c.allowance >= 0.0;
        report.push(c);
    } else {
        report.push(Check::flag(
            "scalar_nonnegative",
            false,
            format!("initial data has min R = {r0}, precondition R >= 0 fails"),
        ));
    }
    Ok(report)
}

fn mass_constancy(opts: &PresetOptions) -> Result<Report> {
    let mut report = Report::new("mass-constancy");
    let cfg = mass_tail_config(opts, "mass-constancy", 5.0, BoundaryMode::default());
    let traj = run_evolution(&cfg)?;
    let ledger = ledger_of(&traj)?;
    report.extend(completion_checks(&traj, cfg.solver.f_cap));

    let m0 = adm_mass(traj.initial());
    let exact = 16.0 * PI * 0.1;
    match m0.value {
        Some(v) => report.push(
            Check::at_most(
                "adm_initial_exact",
                (v - exact).abs(),
                m0.error_bar.max(1e-12),
            )
            .with_detail(format!("{v} vs 16 pi m = {exact}")),
        ),
        None => report.push(Check::flag(
            "adm_initial_exact",
            false,
            format!("{:?}", m0.status),
        )),
    }
    let series = mass_series(&traj, default_families()[0], &ledger)?;
    report.push(verify_adm_constancy(&series, cfg.diagnostics.adm_tolerance));
    report.log("adm_drift_tail_extrapolation", relative_drift(&traj));

    // Dirichlet boundary: drift reported, not gated.
    let dcfg = mass_tail_config(opts, "mass-constancy", 5.0, BoundaryMode::DirichletOne);
    let dtraj = run_evolution(&dcfg)?;
    report.log("adm_drift_dirichlet_one", relative_drift(&dtraj));
    report.log("adm_final_dirichlet_one", adm_mass(dtraj.last()));
    let diag = Diagnosis {
        report: report.clone(),
        ledger,
        allowances: Allowances::default(),
        mass: vec![series],
    };
    save(opts, &cfg, &traj, Some(&diag), &report)?;
    Ok(report)
}

// Largest |m(t) - m(0)| / |m(0)|; NaN once the estimate is withheld.
fn relative_drift(traj: &Trajectory) -> f64 {
    let m0 = adm_mass(traj.initial()).value;
    traj.snapshots
        .iter()
        .map(|p| match (m0, adm_mass(p).value) {
            (Some(a), Some(b)) => ((b - a) / a).abs(),
            _ => f64::NAN,
        })
        .fold(0.0, |a: f64, b| if b.is_nan() { b } else { a.max(b) })
}

fn quasilocal_decay(opts: &PresetOptions) -> Result<Report> {
    let cfg = default_config(opts, "quasilocal-decay");
    let traj = run_evolution(&cfg)?;
    let eps = allowances(&cfg, &traj)?;
    let ledger = ledger_of(&traj)?;
    let mut report = Report::new("quasilocal-decay");
    report.extend(completion_checks(&traj, cfg.solver.f_cap));
    let mut mass = Vec::new();
    for fam in default_families() {
        let s = mass_series(&traj, fam, &ledger)?;
        report.extend(
            verify_quasilocal(&s, &eps)
                .into_iter()
                .map(|c| Check::from(c).prefixed(fam.name())),
        );
        mass.push(s);
    }
    let mu = quasilocal_mass_value(1.0, 2.0, 3);
    report.push(Check::at_most(
        "mu_spot_value",
        (mu - 2.0 * PI).abs(),
        1e-12,
    ));
    report.log("allowances", eps);
    let diag = Diagnosis {
        report: report.clone(),
        ledger,
        allowances: eps,
        mass,
    };
    save(opts, &cfg, &traj, Some(&diag), &report)?;
    Ok(report)
}

fn sci(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:.3e}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn fixed(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:.3}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Minimum observed order required of every residual.
pub const RESIDUAL_ORDER: f64 = 1.9;

fn aux_residuals(_opts: &PresetOptions) -> Result<Report> {
    let mut report = Report::new("aux-residuals");
    let base = GridSpec {
        intervals: 256,
        ..GridSpec::default()
    };
    let spec = ProfileSpec::bump(0.5, 2.0, 3);
    // The output cadence halves with h so the centred time differences keep pace.
    let runs = (0..3)
        .map(|k| {
            let g = build_grid(&base.refined(1 << k))?;
            let cfg = SolverConfig {
                t_end: 1.0,
                dt_out: 0.01 / (1 << k) as f64,
                ..SolverConfig::default()
            };
            Ok(evolve(&spec.sample(&g)?, &cfg)?)
        })
        .collect::<Result<Vec<Trajectory>>>()?;
    let mut study =
        |name: String, errors: Vec<f64>| {
            let orders = observed_orders(&errors);
            let worst = orders.iter().copied().fold(f64::INFINITY, f64::min);
            report.push(
                Check::at_least(format!("order_{name}"), worst, RESIDUAL_ORDER).with_detail(
                    format!("errors {}, orders {}", sci(&errors), fixed(&orders)),
                ),
            );
        };
    study("w".into(), refinement_errors(&runs, residual_w_equation)?);
    for m in [1.5, 1.9] {
        for (label, which) in [
            ("u", Auxiliary::U),
            ("v", Auxiliary::V),
            ("y", Auxiliary::Y),
        ] {
            let e = refinement_errors(&runs, |t, r| residual_auxiliary_pdes(t, which, m, r))?;
            study(format!("{label}_m{m}"), e);
        }
    }
    study(
        "scalar".into(),
        refinement_errors(&runs, residual_scalar_evolution)?,
    );
    report.log("intervals", [256, 512, 1024]);
    Ok(report)
}

/// Settings of a 1-D against 3-D comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrosscheckSpec {
    pub grid: GridSpec,
    pub profile: ProfileSpec,
    pub solver: SolverConfig,
    /// Cells per axis, coarsest first; the difference must shrink along the list.
    pub cells: Vec<usize>,
    pub half_width: f64,
    pub t_check: f64,
    pub order: StencilOrder,
    /// Largest relative difference of `R(origin)` on the coarsest grid.
    pub tolerance: f64,
}

impl Default for CrosscheckSpec {
    fn default() -> Self {
        Self {
            grid: GridSpec::default(),
            profile: ProfileSpec::bump(0.2, 2.0, 3),
            solver: SolverConfig::default(),
            cells: vec![48, 64],
            half_width: 8.0,
            t_check: 0.05,
            order: StencilOrder::Fourth,
            tolerance: 0.05,
        }
    }
}

pub fn run_crosscheck(spec: &CrosscheckSpec) -> Result<Report> {
    if spec.cells.is_empty() {
        bail!("crosscheck needs at least one cell count");
    }
    let p = spec.profile.sample(&build_grid(&spec.grid)?)?;
    let mut report = Report::new("crosscheck");
    let mut diffs = Vec::new();
    for &cells in &spec.cells {
        let c = CartesianConfig {
            cells,
            half_width: spec.half_width,
            order: spec.order,
            ..CartesianConfig::default()
        };
        let rep = crosscheck_run(&p, c, spec.t_check, &spec.solver)?;
        report.push(Check::flag(
            format!("completed_m{cells}"),
            rep.failure.is_none(),
            rep.failure.clone().unwrap_or_default(),
        ));
        diffs.push(rep.rel_diff);
        report.log(format!("m{cells}"), &rep);
    }
    report.push(Check::at_most(
        format!("rel_diff_m{}", spec.cells[0]),
        diffs[0],
        spec.tolerance,
    ));
    for (k, w) in diffs.windows(2).enumerate() {
        report.push(Check::at_most(
            format!("rel_diff_shrinks_m{}", spec.cells[k + 1]),
            w[1],
            w[0],
        ));
    }
    Ok(report)
}

fn crosscheck(_opts: &PresetOptions) -> Result<Report> {
    run_crosscheck(&CrosscheckSpec::default())
}

fn norm(u: &RadialFunction, k: u8, p: LpExponent, delta: f64) -> Result<f64> {
    Ok(weighted_norm(u, &NormSpec::new(k, p, delta)?, 3)?.value)
}

fn norm_audit(opts: &PresetOptions) -> Result<Report> {
    let mut report = Report::new("norm-audit");
    let g = build_grid(&GridSpec::default())?;
    let inv2 = RadialFunction::from_fn(Arc::clone(&g), |r| 1.0 / (1.0 + r * r))?;

    let est = weighted_norm(&inv2, &NormSpec::new(0, LpExponent::Two, -1.0)?, 3)?;
    let exact = (4.0 * PI / 3.0).sqrt();
    report.push(
        Check::at_most("sigma_inv2_l2", (est.value - exact).abs(), est.error_bar)
            .with_detail(format!("{} vs {exact}", est.value)),
    );
    let dy = dyadic_decomposition(&inv2, &NormSpec::new(0, LpExponent::Two, -1.0)?, 3)?;
    report.log("dyadic_ratio", dy.ratio);
    report.log("dyadic_annuli", dy.annuli.len());

    report.extend(mollifier_checks(&g)?);
    report.extend(random_norm_properties(&g, opts.seed, 32)?);
    report.extend(round_sphere_checks()?);
    let mu = quasilocal_mass_value(1.0, 2.0, 3);
    report.push(Check::at_most(
        "mu_spot_value",
        (mu - 2.0 * PI).abs(),
        1e-12,
    ));
    let m = adm_mass(&ProfileSpec::mass_tail(0.1, 1.0, 3).sample(&g)?);
    let adm_exact = 16.0 * PI * 0.1;
    report.push(Check::at_most(
        "adm_spot_value",
        (m.value.unwrap_or(f64::NAN) - adm_exact).abs(),
        m.error_bar.max(1e-12),
    ));
    Ok(report)
}

/// Mollifier test functions: `sigma^-2`, a gaussian and a compactly supported bump.
pub fn mollifier_checks(g: &Arc<RadialGrid>) -> Result<Vec<Check>> {
    let tests: [fn(f64) -> f64; 3] = [
        |r| 1.0 / (1.0 + r * r),
        |r| (-r * r).exp(),
        |r| bump_kernel(r / 3.0),
    ];
    let eps = [0.5, 0.25, 0.125];
    let mut checks = Vec::new();
    for k in 0..=2u8 {
        let spec = NormSpec::new(k, LpExponent::Two, -1.0)?;
        let mut constants = Vec::new();
        for &e in &eps {
            let mut c: f64 = 0.0;
            for u in tests {
                let u = RadialFunction::from_fn(Arc::clone(g), u)?;
                let ju = mollify(&u, e, 3)?;
                c = c.max(weighted_norm(&ju, &spec, 3)?.value / weighted_norm(&u, &spec, 3)?.value);
            }
            constants.push(c);
        }
        let lo = constants.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = constants.iter().copied().fold(0.0, f64::max);
        checks.push(
            Check::at_most(format!("mollifier_uniform_k{k}"), hi / lo - 1.0, 0.1)
                .with_detail(format!("constants {constants:.5?}")),
        );
    }
    let u = RadialFunction::from_fn(Arc::clone(g), |r| bump_kernel(r / 3.0))?;
    let spec = NormSpec::new(0, LpExponent::Two, -1.0)?;
    let mut errs = Vec::new();
    for &e in &eps {
        let ju = mollify(&u, e, 3)?;
        let d: Vec<f64> = ju
            .values()
            .iter()
            .zip(u.values())
            .map(|(a, b)| a - b)
            .collect();
        errs.push(weighted_norm(&RadialFunction::new(Arc::clone(g), d)?, &spec, 3)?.value);
    }
    let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
    checks.push(Check::flag(
        "mollifier_converges",
        decreasing,
        format!("errors {}", sci(&errs)),
    ));
    Ok(checks)
}

/// Triangle inequality, homogeneity, weight inclusion and Hölder on random
/// sums of two gaussians.
pub fn random_norm_properties(
    g: &Arc<RadialGrid>,
    seed: u64,
    samples: usize,
) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Result<RadialFunction> {
        let c: [f64; 4] = [
            rng.gen_range(-2.0..2.0),
            rng.gen_range(0.2..3.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(0.4..6.0),
        ];
        Ok(RadialFunction::from_fn(Arc::clone(g), move |r| {
            c[0] * (-(r / c[1]).powi(2)).exp() + c[2] * (-(r / c[3]).powi(2)).exp()
        })?)
    };
    let ps = [LpExponent::One, LpExponent::Two, LpExponent::Infinity];
    let (mut tri, mut hom, mut inc, mut hol) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..samples {
        let (u, v) = (draw(&mut rng)?, draw(&mut rng)?);
        let k = rng.gen_range(0..3u8);
        let p = ps[rng.gen_range(0..3)];
        let d1 = rng.gen_range(-3.0..1.0);
        let d2 = rng.gen_range(-3.0..1.0);
        let c = rng.gen_range(-5.0..5.0);
        let sum = RadialFunction::new(
            Arc::clone(g),
            u.values()
                .iter()
                .zip(v.values())
                .map(|(a, b)| a + b)
                .collect(),
        )?;
        let (nu, nv, ns) = (
            norm(&u, k, p, d1)?,
            norm(&v, k, p, d1)?,
            norm(&sum, k, p, d1)?,
        );
        tri = tri.max((ns - (nu + nv)) / (nu + nv).max(1e-300));
        let nc = norm(&u.scaled(c), k, p, d1)?;
        hom = hom.max((nc - c.abs() * nu).abs() / (1.0 + nc));
        let (lo, hi) = (d1.min(d2), d1.max(d2));
        inc =
            inc.max((norm(&u, k, p, hi)? - norm(&u, k, p, lo)?) / norm(&u, k, p, lo)?.max(1e-300));
        let uv = RadialFunction::new(
            Arc::clone(g),
            u.values()
                .iter()
                .zip(v.values())
                .map(|(a, b)| a * b)
                .collect(),
        )?;
        let lhs = norm(&uv, 0, LpExponent::One, d1 + d2)?;
        let rhs = norm(&u, 0, LpExponent::Two, d1)? * norm(&v, 0, LpExponent::Two, d2)?;
        hol = hol.max((lhs - rhs) / rhs.max(1e-300));
    }
    let detail = format!("{samples} samples, seed {seed}");
    Ok(vec![
        Check::at_most("triangle_inequality", tri, 1e-12).with_detail(detail.clone()),
        Check::at_most("homogeneity", hom, 1e-12).with_detail(detail.clone()),
        Check::at_most("weight_inclusion", inc, 1e-12).with_detail(detail.clone()),
        Check::at_most("weighted_holder", hol, 1e-12).with_detail(detail),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_preset_rejected_before_compute() {
        let e = run_preset("no-such", &PresetOptions::default()).unwrap_err();
        assert!(e.to_string().contains("flat-fixed-point"));
    }

    #[test]
    fn flat_fixed_point_passes() {
        let r = run_preset("flat-fixed-point", &PresetOptions::default()).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.checks.last().unwrap().margin, 1e-12);
    }

    #[test]
    fn random_properties_are_seeded() {
        let g = build_grid(&GridSpec {
            intervals: 64,
            r_max: 40.0,
            stretching: Stretching::Sinh { scale: 3.0 },
        })
        .unwrap();
        let a = random_norm_properties(&g, 3, 4).unwrap();
        let b = random_norm_properties(&g, 3, 4).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|c| c.passed), "{a:?}");
    }
}
