//! Report tables, CSV and SVG emission.
//!
//! All output is produced from the row data alone with fixed formatting so
//! identical inputs give identical bytes. Floats use the shortest
//! round-trip representation; missing values are empty fields.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use chebdir_core::MultiIndex;

use crate::error::{CliError, Result};

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One `j` of a sweep, before window statistics are attached.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSample {
    pub j: u32,
    pub alpha: MultiIndex,
    pub tau: Option<f64>,
    pub rel_gap: Option<f64>,
    pub tau_half_mesh: Option<f64>,
    /// Solver error message when the row failed.
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub sample: SweepSample,
    pub window_max: Option<f64>,
    pub window_min: Option<f64>,
    /// Mesh halving moved tau by more than the mesh tolerance.
    pub flagged: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Converged,
    NotConverged,
    Degenerate,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Converged => "converged",
            Verdict::NotConverged => "not-converged",
            Verdict::Degenerate => "degenerate",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<SweepRow>,
    pub window: usize,
    pub tol: f64,
    /// Max and min of tau over the last `window` rows.
    pub limsup: Option<f64>,
    pub liminf: Option<f64>,
    /// `(limsup - liminf) / limsup`.
    pub gap: Option<f64>,
    pub verdict: Verdict,
}

/// Values below this count as a vanishing constant.
pub const ZERO_TAU: f64 = 1e-10;

impl ConvergenceReport {
    /// Attach trailing-window statistics and the verdict. Rows must be
    /// sorted by `j`.
    pub fn assemble(samples: Vec<SweepSample>, window: usize, tol: f64, mesh_tol: f64) -> Self {
        assert!(window >= 1, "window must be positive");
        let taus: Vec<Option<f64>> = samples.iter().map(|s| s.tau).collect();
        let stats = |k: usize| -> (Option<f64>, Option<f64>) {
            let lo = (k + 1).saturating_sub(window);
            let vals: Vec<f64> = taus[lo..=k].iter().flatten().copied().collect();
            if vals.is_empty() {
                (None, None)
            } else {
                (
                    Some(vals.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
                    Some(vals.iter().copied().fold(f64::INFINITY, f64::min)),
                )
            }
        };
        let rows: Vec<SweepRow> = samples
            .into_iter()
            .enumerate()
            .map(|(k, sample)| {
                let (window_max, window_min) = stats(k);
                let flagged = match (sample.tau, sample.tau_half_mesh) {
                    (Some(a), Some(b)) => (a - b).abs() > mesh_tol * a.abs().max(b.abs()).max(ZERO_TAU),
                    _ => false,
                };
                SweepRow { sample, window_max, window_min, flagged }
            })
            .collect();
        let (limsup, liminf) = rows.last().map_or((None, None), |r| (r.window_max, r.window_min));
        let (gap, verdict) = match (limsup, liminf) {
            (Some(hi), Some(lo)) if hi > ZERO_TAU => {
                let gap = (hi - lo) / hi;
                (Some(gap), if gap <= tol { Verdict::Converged } else { Verdict::NotConverged })
            }
            (Some(_), Some(_)) => (Some(0.0), Verdict::Degenerate),
            _ => (None, Verdict::Degenerate),
        };
        Self { rows, window, tol, limsup, liminf, gap, verdict }
    }

    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.sample.error.is_some()).count()
    }

    pub fn flagged_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.flagged).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("j;alpha;tau;rel_gap;tau_half_mesh;window_max;window_min\n");
        for r in &self.rows {
            let s = &r.sample;
            let _ = writeln!(
                out,
                "{};{};{};{};{};{};{}",
                s.j,
                s.alpha,
                opt(s.tau),
                opt(s.rel_gap),
                opt(s.tau_half_mesh),
                opt(r.window_max),
                opt(r.window_min)
            );
        }
        out
    }

    /// Line plot of tau against j with the limsup and liminf estimates as
    /// horizontal lines; `None` when no row has a value.
    pub fn to_svg(&self) -> Option<String> {
        let pts: Vec<(f64, f64)> =
            self.rows.iter().filter_map(|r| r.sample.tau.map(|t| (r.sample.j as f64, t))).collect();
        if pts.is_empty() {
            return None;
        }
        let (w, h, pad) = (640.0, 400.0, 48.0);
        let x0 = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let x1 = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        let mut y0 = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let mut y1 = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        let spread = (y1 - y0).max(0.05 * y1.abs()).max(0.05);
        y0 -= 0.1 * spread;
        y1 += 0.1 * spread;
        let sx = |x: f64| if x1 > x0 { pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad) } else { w / 2.0 };
        let sy = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);
        let mut svg = String::new();
        let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
        let _ = writeln!(svg, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{pad}" y="{:.2}" font-family="sans-serif" font-size="12">tau vs j ({})</text>"#,
            pad / 2.0,
            self.verdict
        );
        for (label, v, colour) in [("limsup", self.limsup, "#c0392b"), ("liminf", self.liminf, "#2471a3")] {
            if let Some(v) = v {
                let y = sy(v);
                let _ = writeln!(
                    svg,
                    r#"<line class="{label}" x1="{pad:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{colour}" stroke-dasharray="6 4"/>"#,
                    w - pad
                );
            }
        }
        let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(svg, r#"<polyline fill="none" stroke="black" stroke-width="1.5" points="{}"/>"#, coords.join(" "));
        svg.push_str("</svg>\n");
        Some(svg)
    }
}

/// One comparison of an identity check.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyRow {
    pub j: u32,
    pub alpha: MultiIndex,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub rel_err: Option<f64>,
    pub pass: bool,
}

impl VerifyRow {
    /// Compare with relative tolerance `tol`; a vanishing side fails the row.
    pub fn compare(j: u32, alpha: MultiIndex, lhs: f64, rhs: f64, tol: f64) -> Self {
        let scale = lhs.abs().max(rhs.abs());
        if !(lhs.abs() > ZERO_TAU && rhs.abs() > ZERO_TAU) {
            return Self { j, alpha, lhs: Some(lhs), rhs: Some(rhs), rel_err: None, pass: false };
        }
        let rel_err = (lhs - rhs).abs() / scale;
        Self { j, alpha, lhs: Some(lhs), rhs: Some(rhs), rel_err: Some(rel_err), pass: rel_err <= tol }
    }

    pub fn failed(j: u32, alpha: MultiIndex) -> Self {
        Self { j, alpha, lhs: None, rhs: None, rel_err: None, pass: false }
    }
}

pub fn verify_csv(rows: &[VerifyRow]) -> String {
    let mut out = String::from("j;alpha;lhs;rhs;rel_err;pass\n");
    for r in rows {
        let _ = writeln!(out, "{};{};{};{};{};{}", r.j, r.alpha, opt(r.lhs), opt(r.rhs), opt(r.rel_err), r.pass);
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinimaxRow {
    pub alpha: MultiIndex,
    pub norm: f64,
    pub tau: f64,
    pub rel_gap: f64,
    pub m_final: usize,
}

pub fn minimax_csv(rows: &[MinimaxRow]) -> String {
    let mut out = String::from("alpha;norm;tau;rel_gap;m_final\n");
    for r in rows {
        let _ = writeln!(out, "{};{};{};{};{}", r.alpha, r.norm, r.tau, r.rel_gap, r.m_final);
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaRow {
    pub n: u32,
    /// Log of the Vandermonde maximum; absent for the integral formula.
    pub log_vn: Option<f64>,
    pub l_n: Option<u64>,
    pub delta: f64,
}

pub fn delta_csv(rows: &[DeltaRow]) -> String {
    let mut out = String::from("n;log_Vn;l_n;delta_estimate\n");
    for r in rows {
        let l = r.l_n.map(|l| l.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{};{};{};{}", r.n, opt(r.log_vn), l, r.delta);
    }
    out
}

/// `re1;im1;...;re_d;im_d;V_n`.
pub fn extremal_csv(dim: usize, points: &[chebdir_core::Complex64], values: &[f64]) -> String {
    let mut out = String::new();
    let head: Vec<String> = (1..=dim).map(|k| format!("re{k};im{k}")).collect();
    let _ = writeln!(out, "{};V_n", head.join(";"));
    for (z, v) in points.chunks_exact(dim).zip(values) {
        for c in z {
            let _ = write!(out, "{};{};", c.re, c.im);
        }
        let _ = writeln!(out, "{v}");
    }
    out
}

/// Write `contents` to `dir/name`, creating `dir` if needed.
pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let io = |path: &Path, source| CliError::Io { path: path.to_path_buf(), source };
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| io(&path, e))?;
    Ok(path)
}
