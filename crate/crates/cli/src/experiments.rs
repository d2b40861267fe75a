//! Experiment runners. Each returns an [`Outcome`] holding its tables and
//! the pass/fail checks derived from them; [`emit`] writes the tables.

use std::path::PathBuf;

use chebdir_core::fekete::{delta_fekete, delta_zaharjuta};
use chebdir_core::index::{enumerate_upto, rounded_index};
use chebdir_core::minimax::{solve_minimax, tau_result};
use chebdir_core::pluripotential::{candidate_grid, k_rho_cloud, z_set, ExtremalOptions, RobinModel};
use chebdir_core::sets::{default_eta, generate, scale, shear, slice_and_project};
use chebdir_core::{Complex64, MinimaxOptions, MultiIndex, PointCloud, SetModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{DeltaMethod, ExperimentConfig, ExperimentKind, Sequence};
use crate::error::{CliError, Result};
use crate::report::{
    delta_csv, minimax_csv, verify_csv, write_file, ConvergenceReport, DeltaRow, MinimaxRow, SweepSample, Verdict,
    VerifyRow,
};

/// Tolerance for the shear invariance check.
pub const SHEAR_TOL: f64 = 1e-8;
/// Gap the counterexample sweep has to reach.
pub const COUNTEREXAMPLE_GAP: f64 = 0.9;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        Self { name: name.to_string(), pass, detail }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub name: String,
    pub sweep: Option<ConvergenceReport>,
    pub verify: Vec<VerifyRow>,
    pub minimax: Vec<MinimaxRow>,
    pub delta: Vec<DeltaRow>,
    pub checks: Vec<Check>,
    /// Rows lost to solver errors.
    pub solver_failures: usize,
}

impl Outcome {
    fn new(cfg: &ExperimentConfig) -> Self {
        Self { name: cfg.name.clone(), ..Self::default() }
    }

    pub fn passed(&self) -> bool {
        self.solver_failures == 0 && self.checks.iter().all(|c| c.pass)
    }

    /// 0 when everything passed, 3 after solver failures, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.solver_failures > 0 {
            3
        } else if self.checks.iter().all(|c| c.pass) {
            0
        } else {
            2
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn verify_check(&mut self, name: &str) {
        let failed = self.verify.iter().filter(|r| !r.pass).count();
        let worst = self.verify.iter().filter_map(|r| r.rel_err).fold(0.0f64, f64::max);
        let detail = format!("{} rows, {failed} failing, worst rel_err {worst:.3e}", self.verify.len());
        self.checks.push(Check::new(name, failed == 0 && !self.verify.is_empty(), detail));
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    match cfg.kind {
        ExperimentKind::TauSweep | ExperimentKind::Counterexample => run_tau_sweep(cfg),
        ExperimentKind::Delta => run_delta(cfg),
        ExperimentKind::VerifyStep1
        | ExperimentKind::VerifyStep2
        | ExperimentKind::VerifyStep3
        | ExperimentKind::VerifyScaling
        | ExperimentKind::VerifySandwich => verify_identity(cfg),
        ExperimentKind::Lemma100Ellipsoid | ExperimentKind::Lemma100Axis => lemma100_suite(cfg),
    }
}

/// Write every non-empty table of `outcome` into `dir`.
pub fn emit(outcome: &Outcome, dir: &std::path::Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    let name = &outcome.name;
    if let Some(sweep) = &outcome.sweep {
        files.push(write_file(dir, &format!("{name}_sweep.csv"), &sweep.to_csv())?);
        if let Some(svg) = sweep.to_svg() {
            files.push(write_file(dir, &format!("{name}_sweep.svg"), &svg)?);
        }
    }
    if !outcome.verify.is_empty() {
        files.push(write_file(dir, &format!("{name}_verify.csv"), &verify_csv(&outcome.verify))?);
    }
    if !outcome.minimax.is_empty() {
        files.push(write_file(dir, &format!("{name}_minimax.csv"), &minimax_csv(&outcome.minimax))?);
    }
    if !outcome.delta.is_empty() {
        files.push(write_file(dir, &format!("{name}_delta.csv"), &delta_csv(&outcome.delta))?);
    }
    Ok(files)
}

fn interleaved(dim: usize, j: u32) -> Result<MultiIndex> {
    if dim < 2 {
        return Err(CliError::Config("the interleaved sequence needs d >= 2".into()));
    }
    let mut e = vec![0; dim];
    if j.is_multiple_of(2) {
        e[0] = j;
    } else {
        e[0] = j - 1;
        e[1] = 1;
    }
    Ok(MultiIndex::new(e)?)
}

fn sweep_indices(cfg: &ExperimentConfig) -> Result<Vec<(u32, MultiIndex)>> {
    let dim = cfg.set.model.dim();
    (cfg.j_min..=cfg.j_max)
        .map(|j| {
            let alpha = match cfg.sequence {
                Sequence::Interleaved => interleaved(dim, j)?,
                Sequence::Rounded => {
                    let theta = cfg.theta.as_ref().ok_or_else(|| CliError::Config("missing sweep.theta".into()))?;
                    rounded_index(theta, j)
                }
            };
            Ok((j, alpha))
        })
        .collect()
}

fn tau_on(cloud: &PointCloud, alpha: &MultiIndex, opts: &MinimaxOptions) -> chebdir_core::Result<(f64, f64)> {
    tau_result(cloud, alpha, opts).map(|r| (r.tau, r.rel_gap))
}

/// tau along the configured index sequence at mesh `h` and `h/2`.
pub fn run_tau_sweep(cfg: &ExperimentConfig) -> Result<Outcome> {
    let cloud = cfg.set.cloud()?;
    let half = if cfg.half_mesh { Some(cfg.set.cloud_at(cfg.set.mesh / 2.0)?) } else { None };
    let opts = cfg.solver();
    let samples: Vec<SweepSample> = sweep_indices(cfg)?
        .into_par_iter()
        .map(|(j, alpha)| {
            let main = tau_on(&cloud, &alpha, &opts);
            let fine = half.as_ref().map(|c| tau_on(c, &alpha, &opts));
            let mut error = None;
            let (tau, rel_gap) = match main {
                Ok((t, g)) => (Some(t), Some(g)),
                Err(e) => {
                    error = Some(e.to_string());
                    (None, None)
                }
            };
            let tau_half_mesh = match fine {
                Some(Ok((t, _))) => Some(t),
                Some(Err(e)) => {
                    error.get_or_insert(format!("half mesh: {e}"));
                    None
                }
                None => None,
            };
            SweepSample { j, alpha, tau, rel_gap, tau_half_mesh, error }
        })
        .collect();
    let report = ConvergenceReport::assemble(samples, cfg.window, cfg.tol, cfg.mesh_tol);
    let mut out = Outcome::new(cfg);
    out.solver_failures = report.failed_rows();
    let gap = report.gap.map_or("n/a".into(), |g| format!("{g:.3e}"));
    match cfg.kind {
        ExperimentKind::Counterexample => {
            let pass = report.verdict == Verdict::NotConverged && report.gap.is_some_and(|g| g >= COUNTEREXAMPLE_GAP);
            out.checks.push(Check::new("oscillation", pass, format!("verdict {}, gap {gap}", report.verdict)));
        }
        _ => {
            let pass = report.verdict == Verdict::Converged;
            out.checks.push(Check::new("verdict", pass, format!("verdict {}, gap {gap}", report.verdict)));
            let flagged = report.flagged_rows();
            let detail = format!("{flagged} rows move by more than {:.1e} under mesh halving", cfg.mesh_tol);
            out.checks.push(Check::new("mesh", flagged == 0, detail));
        }
    }
    if let (Some(want), Some(got)) = (cfg.expected, report.limsup) {
        let err = (got - want).abs() / want.abs().max(f64::MIN_POSITIVE);
        out.checks.push(Check::new("limit", err <= cfg.limit_tol, format!("limsup {got} vs {want}, rel_err {err:.3e}")));
    }
    out.sweep = Some(report);
    Ok(out)
}

pub fn verify_identity(cfg: &ExperimentConfig) -> Result<Outcome> {
    match cfg.kind {
        ExperimentKind::VerifyStep1 => verify_step1(cfg),
        ExperimentKind::VerifyStep2 => verify_step2(cfg),
        ExperimentKind::VerifyStep3 => verify_factorization(cfg),
        ExperimentKind::VerifyScaling => verify_scaling(cfg),
        ExperimentKind::VerifySandwich => verify_sandwich(cfg),
        other => Err(CliError::Config(format!("{other} is not an identity check"))),
    }
}

fn row_or_failure(
    j: u32,
    alpha: &MultiIndex,
    sides: chebdir_core::Result<(f64, f64)>,
    tol: f64,
    failures: &mut usize,
) -> VerifyRow {
    match sides {
        Ok((lhs, rhs)) => VerifyRow::compare(j, alpha.clone(), lhs, rhs, tol),
        Err(_) => {
            *failures += 1;
            VerifyRow::failed(j, alpha.clone())
        }
    }
}

/// tau of the Robin sublevel set against tau of the set itself.
fn verify_step1(cfg: &ExperimentConfig) -> Result<Outcome> {
    let robin = RobinModel::from_model(&cfg.set.model)?;
    let k = cfg.set.cloud()?;
    let k_rho = k_rho_cloud(&robin, cfg.set.mesh)?;
    let opts = cfg.solver();
    let idx = sweep_indices(cfg)?;
    let sides: Vec<_> = idx
        .par_iter()
        .map(|(_, alpha)| Ok((tau_result(&k_rho, alpha, &opts)?.tau, tau_result(&k, alpha, &opts)?.tau)))
        .collect();
    let mut out = Outcome::new(cfg);
    for ((j, alpha), s) in idx.iter().zip(sides) {
        let row = row_or_failure(*j, alpha, s, cfg.tol, &mut out.solver_failures);
        out.verify.push(row);
    }
    out.verify_check("step1");
    Ok(out)
}

fn index_for(cfg: &ExperimentConfig, j: u32) -> Result<MultiIndex> {
    match &cfg.theta {
        Some(theta) => Ok(rounded_index(theta, j)),
        None if cfg.set.model.dim() == 1 => Ok(MultiIndex::new(vec![j])?),
        None => Err(CliError::Config("verify-step2 in d > 1 needs sweep.theta".into())),
    }
}

/// tau of the Z-set against `e^M` times the weighted tau.
fn verify_step2(cfg: &ExperimentConfig) -> Result<Outcome> {
    let k = cfg.set.cloud()?;
    let n = cfg.z_degree.unwrap_or(cfg.j_max);
    let candidates = candidate_grid(&cfg.set.cloud()?, cfg.candidates, cfg.margin)?;
    let xopts = ExtremalOptions { tol: cfg.solver_tol, ..ExtremalOptions::default() };
    let z = z_set(&k, n, &candidates, cfg.slack, &xopts)?;
    let opts = cfg.solver();
    let idx: Vec<(u32, MultiIndex)> =
        (cfg.j_min..=cfg.j_max).map(|j| Ok((j, index_for(cfg, j)?))).collect::<Result<_>>()?;
    let sides: Vec<_> = idx
        .par_iter()
        .map(|(_, alpha)| {
            let lhs = tau_result(&z.z, alpha, &opts)?.tau;
            let rhs = z.m.exp() * tau_result(&k, alpha, &opts)?.tau;
            Ok((lhs, rhs))
        })
        .collect();
    let mut out = Outcome::new(cfg);
    for ((j, alpha), s) in idx.iter().zip(sides) {
        let row = row_or_failure(*j, alpha, s, cfg.tol, &mut out.solver_failures);
        out.verify.push(row);
    }
    out.checks.push(Check::new(
        "z-set",
        z.z.len() > k.len(),
        format!("M = {}, |Z| = {} ({} set points)", z.m, z.z.len(), k.len()),
    ));
    out.verify_check("step2");
    Ok(out)
}

/// Per alpha: sup over S of both sides of the factorization of the
/// homogeneous Chebyshev polynomial, and the worst pointwise relative error.
pub fn factorization_row(cloud: &PointCloud, alpha: &MultiIndex, eta: f64, opts: &MinimaxOptions, j: u32, tol: f64) -> Result<VerifyRow> {
    let n = alpha.degree();
    let tail = alpha.exponents()[1..].iter().sum::<u32>() as f64 / n as f64;
    // a pure power has no tail; the slice weight is irrelevant then
    let sp = slice_and_project(cloud, eta, if tail > 0.0 { tail } else { 1.0 })?;
    let t = solve_minimax(&sp.s, alpha, true, opts)?.polynomial;
    let r = t.dehomogenize()?;
    let (mut lhs_sup, mut rhs_sup, mut worst) = (0.0f64, 0.0f64, 0.0f64);
    for z in sp.s.iter() {
        let lhs = t.eval(z)?.norm();
        let phi: Vec<Complex64> = z[1..].iter().map(|c| c / z[0]).collect();
        let rhs = z[0].norm().powi(n as i32) * r.eval(&phi)?.norm();
        let scale = lhs.max(rhs);
        if scale > 0.0 {
            worst = worst.max((lhs - rhs).abs() / scale);
        }
        lhs_sup = lhs_sup.max(lhs);
        rhs_sup = rhs_sup.max(rhs);
    }
    Ok(VerifyRow { j, alpha: alpha.clone(), lhs: Some(lhs_sup), rhs: Some(rhs_sup), rel_err: Some(worst), pass: worst <= tol })
}

fn verify_factorization(cfg: &ExperimentConfig) -> Result<Outcome> {
    let cloud = cfg.set.cloud()?;
    if cloud.dim() < 2 {
        return Err(CliError::Config("the factorization check needs d >= 2".into()));
    }
    let eta = cfg.eta.unwrap_or_else(|| default_eta(&cloud, cfg.epsilon));
    let opts = cfg.solver();
    let rows: Vec<_> = cfg
        .alphas
        .par_iter()
        .enumerate()
        .map(|(k, alpha)| factorization_row(&cloud, alpha, eta, &opts, k as u32 + 1, cfg.tol))
        .collect();
    let mut out = Outcome::new(cfg);
    for (k, row) in rows.into_iter().enumerate() {
        match row {
            Ok(r) => out.verify.push(r),
            Err(_) => {
                out.solver_failures += 1;
                out.verify.push(VerifyRow::failed(k as u32 + 1, cfg.alphas[k].clone()));
            }
        }
    }
    out.verify_check("factorization");
    Ok(out)
}

/// A random catalog model; coordinates drawn from `rng`.
fn random_model(rng: &mut ChaCha8Rng) -> SetModel {
    match rng.gen_range(0..5) {
        0 => SetModel::Torus { radii: vec![rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0)] },
        1 => SetModel::ProductDiscs {
            centers: vec![
                Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)),
                Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)),
            ],
            radii: vec![rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0)],
        },
        2 => SetModel::Ellipsoid { a: rng.gen_range(1.0..3.0), r: rng.gen_range(0.5..1.5) },
        3 => {
            let a = rng.gen_range(-2.0..1.0);
            SetModel::Segment { a, b: a + rng.gen_range(0.5..3.0) }
        }
        _ => SetModel::Torus { radii: vec![rng.gen_range(0.5..2.0)] },
    }
}

fn random_index(rng: &mut ChaCha8Rng, dim: usize, max_degree: u32) -> MultiIndex {
    let n = rng.gen_range(1..=max_degree.max(1));
    let mut e = vec![0u32; dim];
    for _ in 0..n {
        e[rng.gen_range(0..dim)] += 1;
    }
    MultiIndex::new(e).expect("nonempty exponent vector")
}

/// tau of `e^{-eps} K` against `e^{-eps}` tau of `K`. Trial 1 uses the
/// configured set, later trials random catalog models.
fn verify_scaling(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut trials = Vec::with_capacity(cfg.trials);
    for k in 0..cfg.trials {
        let model = if k == 0 { cfg.set.model.clone() } else { random_model(&mut rng) };
        let eps = rng.gen_range(0.01..0.5);
        let alpha = random_index(&mut rng, model.dim(), cfg.max_degree);
        trials.push((model, eps, alpha));
    }
    let opts = cfg.solver();
    let mesh = cfg.set.mesh;
    let sides: Vec<_> = trials
        .par_iter()
        .map(|(model, eps, alpha)| -> chebdir_core::Result<(f64, f64)> {
            let k = generate(model, mesh)?;
            let lhs = tau_result(&scale(&k, *eps)?, alpha, &opts)?.tau;
            let rhs = (-eps).exp() * tau_result(&k, alpha, &opts)?.tau;
            Ok((lhs, rhs))
        })
        .collect();
    let mut out = Outcome::new(cfg);
    for (k, ((_, _, alpha), s)) in trials.iter().zip(sides).enumerate() {
        let row = row_or_failure(k as u32 + 1, alpha, s, cfg.tol, &mut out.solver_failures);
        out.verify.push(row);
    }
    out.verify_check("scaling");
    Ok(out)
}

fn at_most(j: u32, alpha: &MultiIndex, lhs: f64, rhs: f64, slack: f64) -> VerifyRow {
    let excess = (lhs - rhs).max(0.0) / rhs.abs().max(f64::MIN_POSITIVE);
    VerifyRow { j, alpha: alpha.clone(), lhs: Some(lhs), rhs: Some(rhs), rel_err: Some(excess), pass: excess <= slack }
}

/// `tau(e^{-eps} K) <= tau(S) <= tau(K)` for every `1 <= |alpha| <= max_degree`.
/// Each alpha gives two rows, one per inequality.
fn verify_sandwich(cfg: &ExperimentConfig) -> Result<Outcome> {
    let k = cfg.set.cloud()?;
    let k_eps = scale(&k, cfg.epsilon)?;
    let eta = cfg.eta.unwrap_or_else(|| default_eta(&k, cfg.epsilon));
    let s = slice_and_project(&k, eta, 1.0)?.s;
    let opts = cfg.solver();
    let alphas: Vec<MultiIndex> =
        enumerate_upto(cfg.max_degree, k.dim())?.indices.into_iter().filter(|a| a.degree() > 0).collect();
    let taus: Vec<_> = alphas
        .par_iter()
        .map(|a| -> chebdir_core::Result<[f64; 3]> {
            Ok([tau_result(&k_eps, a, &opts)?.tau, tau_result(&s, a, &opts)?.tau, tau_result(&k, a, &opts)?.tau])
        })
        .collect();
    let mut out = Outcome::new(cfg);
    for (i, (alpha, t)) in alphas.iter().zip(taus).enumerate() {
        let j = 2 * i as u32 + 1;
        match t {
            Ok([te, ts, tk]) => {
                out.verify.push(at_most(j, alpha, te, ts, cfg.tol));
                out.verify.push(at_most(j + 1, alpha, ts, tk, cfg.tol));
            }
            Err(_) => {
                out.solver_failures += 1;
                out.verify.push(VerifyRow::failed(j, alpha.clone()));
                out.verify.push(VerifyRow::failed(j + 1, alpha.clone()));
            }
        }
    }
    out.verify_check("sandwich");
    Ok(out)
}

pub fn lemma100_suite(cfg: &ExperimentConfig) -> Result<Outcome> {
    match cfg.kind {
        ExperimentKind::Lemma100Axis => lemma100_axis(cfg),
        ExperimentKind::Lemma100Ellipsoid => lemma100_ellipsoid(cfg),
        other => Err(CliError::Config(format!("{other} is not part of the lemma suite"))),
    }
}

fn minimax_row(cloud: &PointCloud, alpha: &MultiIndex, opts: &MinimaxOptions) -> chebdir_core::Result<MinimaxRow> {
    let r = tau_result(cloud, alpha, opts)?;
    Ok(MinimaxRow { alpha: alpha.clone(), norm: r.norm, tau: r.tau, rel_gap: r.rel_gap, m_final: r.m_final })
}

fn pure(dim: usize, n: u32) -> MultiIndex {
    MultiIndex::pure(dim, 0, n)
}

/// `tau_(n,0,...,0) = max |z1|` for `n` over the sweep range.
fn lemma100_axis(cfg: &ExperimentConfig) -> Result<Outcome> {
    let cloud = cfg.set.cloud()?;
    if !cloud.is_circled() {
        return Err(CliError::Config(format!("{} is not circled", cfg.set.model.name())));
    }
    let max_z1 = cloud.max_abs_coord(0);
    let opts = cfg.solver();
    let rows: Vec<_> =
        (cfg.j_min..=cfg.j_max).into_par_iter().map(|n| minimax_row(&cloud, &pure(cloud.dim(), n), &opts)).collect();
    let mut out = Outcome::new(cfg);
    for (n, row) in (cfg.j_min..=cfg.j_max).zip(rows) {
        let alpha = pure(cloud.dim(), n);
        match row {
            Ok(r) => {
                out.verify.push(VerifyRow::compare(n, alpha, r.tau, max_z1, cfg.tol));
                out.minimax.push(r);
            }
            Err(_) => {
                out.solver_failures += 1;
                out.verify.push(VerifyRow::failed(n, alpha));
            }
        }
    }
    out.verify_check("axis");
    Ok(out)
}

/// `(j - k, k)` with `k = ceil(j / degree)`: directions tending to `(1, 0)`.
pub fn boundary_index(j: u32, degree: u32) -> MultiIndex {
    let k = j.div_ceil(degree.max(1)).min(j);
    MultiIndex::new(vec![j - k, k]).expect("two exponents")
}

fn lemma100_ellipsoid(cfg: &ExperimentConfig) -> Result<Outcome> {
    if cfg.set.model.dim() != 2 || !cfg.set.model.is_circled() {
        return Err(CliError::Config("lemma100-ellipsoid needs a circled set in C^2".into()));
    }
    let cloud = cfg.set.cloud()?;
    let opts = cfg.solver();
    let deg = cfg.lemma_degree;
    let max_z1 = cloud.max_abs_coord(0);
    let mut out = Outcome::new(cfg);

    // (a) interior directions and the axis value
    let axis_alpha = pure(2, deg);
    let mut alphas = vec![axis_alpha.clone()];
    for &t in &cfg.interior {
        let theta = chebdir_core::Direction::new(vec![t, 1.0 - t])?;
        alphas.push(rounded_index(&theta, deg));
    }
    let rows: Vec<_> = alphas.par_iter().map(|a| minimax_row(&cloud, a, &opts)).collect();
    let rows: Vec<MinimaxRow> = rows.into_iter().collect::<chebdir_core::Result<_>>()?;
    let axis = rows[0].tau;
    let interior: Vec<f64> = rows[1..].iter().map(|r| r.tau).collect();
    out.verify.push(VerifyRow::compare(0, axis_alpha.clone(), axis, max_z1, cfg.tol));
    out.minimax = rows;
    let increasing = interior.windows(2).all(|w| w[1] > w[0]);
    let below = interior.iter().all(|&t| t <= axis * (1.0 + cfg.tol));
    let last = interior.last().copied().unwrap_or(0.0);
    out.checks.push(Check::new("axis", out.verify[0].pass, format!("tau_(n,0) = {axis}, max|z1| = {max_z1}")));
    out.checks.push(Check::new(
        "interior",
        increasing && below && last > 0.9 * max_z1,
        format!("tau at theta1 = {:?}: {interior:?}", cfg.interior),
    ));

    // (b) boundary sequence
    let idx: Vec<(u32, MultiIndex)> = (cfg.j_min..=cfg.j_max).map(|j| (j, boundary_index(j, deg))).collect();
    let samples: Vec<SweepSample> = idx
        .into_par_iter()
        .map(|(j, alpha)| match tau_result(&cloud, &alpha, &opts) {
            Ok(r) => SweepSample { j, alpha, tau: Some(r.tau), rel_gap: Some(r.rel_gap), tau_half_mesh: None, error: None },
            Err(e) => SweepSample { j, alpha, tau: None, rel_gap: None, tau_half_mesh: None, error: Some(e.to_string()) },
        })
        .collect();
    let report = ConvergenceReport::assemble(samples, cfg.window, cfg.tol, cfg.mesh_tol);
    out.solver_failures += report.failed_rows();
    let floor = interior.iter().copied().fold(f64::INFINITY, f64::min);
    if let (Some(hi), Some(lo)) = (report.limsup, report.liminf) {
        out.checks.push(Check::new("liminf", lo >= floor - cfg.tol, format!("liminf {lo} vs interior minimum {floor}")));
        out.checks.push(Check::new("limsup", hi <= axis + cfg.tol, format!("limsup {hi} vs axis {axis}")));
    }
    out.sweep = Some(report);

    // (c) off-axis maximizer variant and its shear
    let variant = SetModel::AffineImage {
        base: Box::new(cfg.set.model.clone()),
        matrix: vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(cfg.shear, 0.0),
            Complex64::new(1.0, 0.0),
        ],
        shift: vec![Complex64::new(0.0, 0.0); 2],
    };
    let v = generate(&variant, cfg.set.mesh)?;
    let top = (0..v.len())
        .max_by(|&a, &b| v.point(a)[0].norm().total_cmp(&v.point(b)[0].norm()))
        .ok_or_else(|| CliError::Core(chebdir_core::Error::EmptySet("variant cloud".into())))?;
    let p = v.point(top).to_vec();
    let sheared = shear(&v, p[0], &p[1..])?;
    let pairs: Vec<_> = alphas
        .par_iter()
        .map(|a| Ok((tau_result(&v, a, &opts)?.tau, tau_result(&sheared, a, &opts)?.tau)))
        .collect();
    let first_shear = out.verify.len();
    for (k, (alpha, s)) in alphas.iter().zip(pairs).enumerate() {
        let row = row_or_failure(k as u32 + 1, alpha, s, SHEAR_TOL, &mut out.solver_failures);
        out.verify.push(row);
    }
    let shear_rows = &out.verify[first_shear..];
    let worst = shear_rows.iter().filter_map(|r| r.rel_err).fold(0.0f64, f64::max);
    let pass = shear_rows.iter().all(|r| r.pass);
    out.checks.push(Check::new("shear", pass, format!("worst rel_err {worst:.3e}")));
    Ok(out)
}

/// Transfinite diameter estimates at the configured degrees.
pub fn run_delta(cfg: &ExperimentConfig) -> Result<Outcome> {
    let cloud = cfg.set.cloud()?;
    let opts = cfg.solver();
    let mut out = Outcome::new(cfg);
    for &n in &cfg.degrees {
        let row = match cfg.method {
            DeltaMethod::Fekete => delta_fekete(&cloud, n, cfg.exchange_rounds)
                .map(|e| DeltaRow { n, log_vn: Some(e.log_vn), l_n: Some(e.l_n), delta: e.delta }),
            DeltaMethod::Zaharjuta => delta_zaharjuta(&cloud, cfg.nodes, n, &opts)
                .map(|e| DeltaRow { n, log_vn: None, l_n: None, delta: e.delta }),
        };
        match row {
            Ok(r) => out.delta.push(r),
            Err(chebdir_core::Error::DegenerateNode { node, theta }) => {
                out.checks.push(Check::new("nodes", false, format!("degree {n}: tau vanishes at node {node} {theta:?}")));
            }
            Err(e) => return Err(e.into()),
        }
    }
    if let (Some(want), Some(last)) = (cfg.expected, out.delta.last()) {
        let err = (last.delta - want).abs() / want;
        out.checks.push(Check::new("delta", err <= cfg.tol, format!("{} vs {want}, rel_err {err:.3e}", last.delta)));
    }
    Ok(out)
}
