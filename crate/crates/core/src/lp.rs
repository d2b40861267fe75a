//! Revised simplex for linear programs whose columns are generated from a
//! complex point set and a grid of `m` directions.
//!
//! A column is indexed by a point `i` and an angle `phi_k = 2 pi k / m`, and
//! carries the entries
//!
//! ```text
//! [1 (convexity row, optional); Re(e^{-i phi} q_j[i]), Im(e^{-i phi} q_j[i]) for each j]
//! ```
//!
//! with cost `unit_cost + target_weight * Re(e^{-i phi} r_i)`. The problem is
//! `min c^T lambda` subject to `A lambda = rhs`, `lambda >= 0`. These are the
//! duals of polygonal relaxations of modulus constraints `|u_i| <= t`: the
//! simplex multipliers of an optimal basis are the primal coefficients.
//!
//! Pricing never materializes the `N * m` columns: for a point the best angle
//! is the grid angle closest to `arg(s_i) + pi`, found in O(1) once the
//! complex residual `s_i` is known.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::ops::Range;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;

const REDUCED_COST_TOL: f64 = 1e-11;
const PIVOT_TOL: f64 = 1e-7;
const FEAS_TOL: f64 = 1e-10;
const REFACTOR_EVERY: usize = 64;
/// Degenerate pivots before switching to Bland's rule.
const DEGENERATE_LIMIT: usize = 40;
/// Degenerate pivots before the right-hand side is perturbed. Bland's rule
/// alone can still cycle in floating point.
const PERTURB_AFTER: usize = 400;
const MAX_ITERATIONS: usize = 200_000;
const PRICING_BLOCK: usize = 512;
/// Size of the right-hand side shift applied to degenerate rows, relative
/// to the largest entry of the true right-hand side.
const PERTURBATION: f64 = 1e-7;

/// Data of a polygonal column LP. `columns` holds `K` complex vectors of
/// length `N`.
#[derive(Clone, Debug)]
pub struct PolygonLp<'a> {
    pub columns: &'a [Vec<Complex64>],
    pub target: Option<&'a [Complex64]>,
    pub target_weight: f64,
    pub unit_cost: f64,
    pub convexity: bool,
    pub rhs: Vec<f64>,
}

impl PolygonLp<'_> {
    fn n_points(&self) -> usize {
        self.columns.first().map(Vec::len).or(self.target.map(<[_]>::len)).unwrap_or(0)
    }

    fn n_rows(&self) -> usize {
        usize::from(self.convexity) + 2 * self.columns.len()
    }

    fn offset(&self) -> usize {
        usize::from(self.convexity)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Col {
    Artificial { row: usize, sign: f64 },
    Point { i: usize, k: usize },
}

/// Multipliers split into the convexity part and complex coefficients
/// `yhat_j = y_re_j - i y_im_j`.
#[derive(Clone, Debug)]
pub struct Multipliers {
    pub convexity: f64,
    pub coeffs: Vec<Complex64>,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub value: f64,
    pub multipliers: Multipliers,
    pub m: usize,
    pub iterations: usize,
    /// `(point, angle index)` of the basic columns at positive level.
    pub support: Vec<(usize, usize, f64)>,
}

pub struct PolygonSimplex<'a> {
    lp: PolygonLp<'a>,
    m: usize,
    basis: Vec<Col>,
    binv: Vec<f64>,
    x: Vec<f64>,
    phase_one_done: bool,
    cursor: usize,
    iterations: usize,
    since_refactor: usize,
    /// Columns whose ratio test found no pivot since the last basis change.
    rejected: HashSet<(usize, usize)>,
    /// Working right-hand side; differs from `lp.rhs` while perturbed.
    rhs: Vec<f64>,
    perturbed: bool,
    cos_tab: Vec<f64>,
    sin_tab: Vec<f64>,
}

impl<'a> PolygonSimplex<'a> {
    pub fn new(lp: PolygonLp<'a>, m: usize) -> Result<Self> {
        let rows = lp.n_rows();
        if lp.rhs.len() != rows {
            return Err(Error::DimensionMismatch { expected: rows, found: lp.rhs.len() });
        }
        if m < 3 {
            return Err(Error::InvalidInput(format!("polygon needs m >= 3, got {m}")));
        }
        let n = lp.n_points();
        if lp.columns.iter().any(|c| c.len() != n) || lp.target.is_some_and(|t| t.len() != n) || n == 0 {
            return Err(Error::InvalidInput("column vectors must share a positive length".into()));
        }
        let basis: Vec<Col> = (0..rows)
            .map(|row| Col::Artificial { row, sign: if lp.rhs[row] < 0.0 { -1.0 } else { 1.0 } })
            .collect();
        let mut binv = vec![0.0; rows * rows];
        for (r, c) in basis.iter().enumerate() {
            if let Col::Artificial { sign, .. } = c {
                binv[r * rows + r] = *sign;
            }
        }
        let x = lp.rhs.iter().map(|b| b.abs()).collect();
        let rhs = lp.rhs.clone();
        let mut s = Self {
            lp,
            m,
            basis,
            binv,
            x,
            phase_one_done: false,
            cursor: 0,
            iterations: 0,
            since_refactor: 0,
            rejected: HashSet::new(),
            rhs,
            perturbed: false,
            cos_tab: Vec::new(),
            sin_tab: Vec::new(),
        };
        s.build_tables();
        s.pair_start()?;
        Ok(s)
    }

    /// For the minimax form (`rhs = e_0` with a convexity row) the point
    /// pair `(i, 0)`, `(i, m/2)` at weight 1/2 each is feasible, which
    /// skips phase one.
    fn pair_start(&mut self) -> Result<()> {
        let lp = &self.lp;
        let minimax_form = lp.convexity && lp.rhs[0] == 1.0 && lp.rhs[1..].iter().all(|&b| b == 0.0);
        if !minimax_form || !self.m.is_multiple_of(2) || lp.columns.is_empty() {
            return Ok(());
        }
        let mut best = (0usize, 0usize, 0.0f64);
        for i in 0..lp.n_points() {
            for (j, q) in lp.columns.iter().enumerate() {
                for (r, v) in [(1 + 2 * j, q[i].re), (2 + 2 * j, q[i].im)] {
                    if v.abs() > best.2 {
                        best = (i, r, v.abs());
                    }
                }
            }
        }
        let (i, row, size) = best;
        if size == 0.0 {
            return Ok(());
        }
        self.basis[0] = Col::Point { i, k: 0 };
        self.basis[row] = Col::Point { i, k: self.m / 2 };
        for (r, c) in self.basis.iter_mut().enumerate() {
            if let Col::Artificial { sign, .. } = c {
                *c = Col::Artificial { row: r, sign: sign.abs() };
            }
        }
        self.refactor()?;
        self.phase_one_done = true;
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    fn build_tables(&mut self) {
        // angle computed from the ratio k/m so that refined grids reproduce
        // the old angles bit for bit
        self.cos_tab = (0..self.m).map(|k| (2.0 * PI * (k as f64 / self.m as f64)).cos()).collect();
        self.sin_tab = (0..self.m).map(|k| (2.0 * PI * (k as f64 / self.m as f64)).sin()).collect();
    }

    /// Double the number of directions. The current basis stays feasible.
    pub fn refine(&mut self) {
        for c in self.basis.iter_mut() {
            if let Col::Point { k, .. } = c {
                *k *= 2;
            }
        }
        self.m *= 2;
        self.rejected.clear();
        self.build_tables();
    }

    fn rows(&self) -> usize {
        self.basis.len()
    }

    fn column(&self, col: Col) -> Vec<f64> {
        let rows = self.rows();
        let mut a = vec![0.0; rows];
        match col {
            Col::Artificial { row, sign } => a[row] = sign,
            Col::Point { i, k } => {
                let rot = Complex64::new(self.cos_tab[k], -self.sin_tab[k]);
                let off = self.lp.offset();
                if self.lp.convexity {
                    a[0] = 1.0;
                }
                for (j, q) in self.lp.columns.iter().enumerate() {
                    let g = rot * q[i];
                    a[off + 2 * j] = g.re;
                    a[off + 2 * j + 1] = g.im;
                }
            }
        }
        a
    }

    fn cost(&self, col: Col, phase_one: bool) -> f64 {
        match (col, phase_one) {
            (Col::Artificial { .. }, true) => 1.0,
            (Col::Artificial { .. }, false) => 0.0,
            (Col::Point { .. }, true) => 0.0,
            (Col::Point { i, k }, false) => {
                let mut c = self.lp.unit_cost;
                if let Some(r) = self.lp.target {
                    let rot = Complex64::new(self.cos_tab[k], -self.sin_tab[k]);
                    c += self.lp.target_weight * (rot * r[i]).re;
                }
                c
            }
        }
    }

    fn col_index(&self, col: Col) -> usize {
        match col {
            Col::Artificial { row, .. } => row,
            Col::Point { i, k } => self.rows() + i * self.m + k,
        }
    }

    fn multipliers_raw(&self, phase_one: bool) -> Vec<f64> {
        let rows = self.rows();
        let cb: Vec<f64> = self.basis.iter().map(|&c| self.cost(c, phase_one)).collect();
        let mut y = vec![0.0; rows];
        for (r, &c) in cb.iter().enumerate() {
            if c != 0.0 {
                let row = &self.binv[r * rows..(r + 1) * rows];
                for (yj, bj) in y.iter_mut().zip(row) {
                    *yj += c * bj;
                }
            }
        }
        y
    }

    fn split(&self, y: &[f64]) -> Multipliers {
        let off = self.lp.offset();
        let convexity = if self.lp.convexity { y[0] } else { 0.0 };
        let coeffs =
            (0..self.lp.columns.len()).map(|j| Complex64::new(y[off + 2 * j], -y[off + 2 * j + 1])).collect();
        Multipliers { convexity, coeffs }
    }

    /// `s_i = gamma r_i - (Q yhat)_i` for the points in `range`.
    fn residuals(&self, mult: &Multipliers, phase_one: bool, range: Range<usize>) -> Vec<Complex64> {
        let mut s = match (self.lp.target, phase_one) {
            (Some(r), false) if self.lp.target_weight != 0.0 => {
                r[range.clone()].iter().map(|&v| v * self.lp.target_weight).collect()
            }
            _ => vec![Complex64::new(0.0, 0.0); range.len()],
        };
        for (q, &c) in self.lp.columns.iter().zip(&mult.coeffs) {
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            for (si, &qi) in s.iter_mut().zip(&q[range.clone()]) {
                *si -= c * qi;
            }
        }
        s
    }

    fn best_angle(&self, s: Complex64) -> usize {
        // minimize Re(e^{-i phi} s): phi closest to arg(s) + pi
        let target = s.im.atan2(s.re) + PI;
        let k = (target / (2.0 * PI) * self.m as f64).round() as i64;
        k.rem_euclid(self.m as i64) as usize
    }

    fn reduced_cost(&self, base: f64, s: Complex64, k: usize) -> f64 {
        base + self.cos_tab[k] * s.re + self.sin_tab[k] * s.im
    }

    /// Entering column by Dantzig's rule over blocks of points (partial
    /// pricing), or by Bland's rule over all columns when `bland`.
    fn price(&mut self, phase_one: bool, bland: bool) -> Option<Col> {
        let y = self.multipliers_raw(phase_one);
        let mult = self.split(&y);
        let unit = if phase_one { 0.0 } else { self.lp.unit_cost };
        let base = unit - mult.convexity;
        let mut basic: HashSet<(usize, usize)> = self
            .basis
            .iter()
            .filter_map(|c| match c {
                Col::Point { i, k } => Some((*i, *k)),
                Col::Artificial { .. } => None,
            })
            .collect();
        basic.extend(self.rejected.iter().copied());
        let n = self.lp.n_points();
        if bland {
            let s = self.residuals(&mult, phase_one, 0..n);
            for (i, &si) in s.iter().enumerate() {
                let k = self.best_angle(si);
                if self.reduced_cost(base, si, k) >= -REDUCED_COST_TOL {
                    continue;
                }
                // smallest eligible angle, which need not be the best one
                let k0 = (0..self.m)
                    .find(|&kk| !basic.contains(&(i, kk)) && self.reduced_cost(base, si, kk) < -REDUCED_COST_TOL);
                if let Some(k0) = k0 {
                    return Some(Col::Point { i, k: k0 });
                }
            }
            return None;
        }
        let block = PRICING_BLOCK.max(n.div_ceil(8));
        let blocks = n.div_ceil(block);
        for step in 0..blocks {
            let b = (self.cursor + step) % blocks;
            let range = b * block..((b + 1) * block).min(n);
            let start = range.start;
            let s = self.residuals(&mult, phase_one, range);
            let mut best: Option<(f64, Col)> = None;
            for (off, &si) in s.iter().enumerate() {
                let i = start + off;
                let k = self.best_angle(si);
                let d = self.reduced_cost(base, si, k);
                // basic columns price at zero up to rounding and must not re-enter
                if d >= -REDUCED_COST_TOL || basic.contains(&(i, k)) {
                    continue;
                }
                if best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, Col::Point { i, k }));
                }
            }
            if let Some((_, col)) = best {
                self.cursor = (b + 1) % blocks;
                return Some(col);
            }
        }
        None
    }

    fn ftran(&self, a: &[f64]) -> Vec<f64> {
        let rows = self.rows();
        (0..rows)
            .map(|r| {
                let row = &self.binv[r * rows..(r + 1) * rows];
                row.iter().zip(a).map(|(b, v)| b * v).sum()
            })
            .collect()
    }

    fn ratio_test(&self, w: &[f64], phase_one: bool, bland: bool) -> Option<usize> {
        let wmax = w.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        let tol = (PIVOT_TOL * wmax).max(1e-11);
        if !phase_one {
            // artificials sit at level zero in phase two and must leave as
            // soon as the entering column touches their row
            let mut pick: Option<(usize, f64)> = None;
            for (r, c) in self.basis.iter().enumerate() {
                if matches!(c, Col::Artificial { .. }) && w[r].abs() > tol && pick.is_none_or(|(_, a)| w[r].abs() > a) {
                    pick = Some((r, w[r].abs()));
                }
            }
            if let Some((r, _)) = pick {
                return Some(r);
            }
        }
        if !bland {
            // Harris two-pass test: among rows blocking within a small
            // feasibility slack, take the largest pivot
            let theta = w
                .iter()
                .zip(&self.x)
                .filter(|(wr, _)| **wr > tol)
                .map(|(wr, xr)| (xr.max(0.0) + FEAS_TOL) / wr)
                .fold(f64::INFINITY, f64::min);
            if !theta.is_finite() {
                return None;
            }
            let mut pick: Option<usize> = None;
            for (r, &wr) in w.iter().enumerate() {
                if wr > tol && self.x[r].max(0.0) / wr <= theta && pick.is_none_or(|b| wr > w[b]) {
                    pick = Some(r);
                }
            }
            return pick;
        }
        let mut best: Option<(usize, f64)> = None;
        for (r, &wr) in w.iter().enumerate() {
            if wr <= tol {
                continue;
            }
            let ratio = self.x[r].max(0.0) / wr;
            let better = match best {
                None => true,
                Some((br, bratio)) => {
                    ratio < bratio || (ratio == bratio && self.col_index(self.basis[r]) < self.col_index(self.basis[br]))
                }
            };
            if better {
                best = Some((r, ratio));
            }
        }
        best.map(|(r, _)| r)
    }

    fn pivot(&mut self, p: usize, w: &[f64], col: Col) {
        let rows = self.rows();
        let wp = w[p];
        let prow: Vec<f64> = self.binv[p * rows..(p + 1) * rows].iter().map(|v| v / wp).collect();
        let xp = self.x[p] / wp;
        for r in 0..rows {
            if r == p || w[r] == 0.0 {
                continue;
            }
            let f = w[r];
            let row = &mut self.binv[r * rows..(r + 1) * rows];
            for (v, pv) in row.iter_mut().zip(&prow) {
                *v -= f * pv;
            }
            self.x[r] -= f * xp;
        }
        self.binv[p * rows..(p + 1) * rows].copy_from_slice(&prow);
        self.x[p] = xp;
        self.basis[p] = col;
        self.since_refactor += 1;
        if self.since_refactor >= REFACTOR_EVERY {
            // a failed refactorization keeps the updated inverse
            let _ = self.refactor();
        }
    }

    fn refactor(&mut self) -> Result<()> {
        let rows = self.rows();
        let mut b = vec![0.0; rows * rows];
        for (c, &col) in self.basis.iter().enumerate() {
            for (r, v) in self.column(col).into_iter().enumerate() {
                b[r * rows + c] = v;
            }
        }
        let inv = linalg::invert(&b, rows, 1e-14).ok_or_else(|| Error::Lp("basis matrix became singular".into()))?;
        self.binv = inv;
        self.x = self.ftran(&self.rhs);
        for v in self.x.iter_mut() {
            if *v < 0.0 && *v > -1e-9 {
                *v = 0.0;
            }
        }
        self.since_refactor = 0;
        Ok(())
    }

    /// Lift every degenerate basic variable by a small distinct amount, as
    /// if the right-hand side had been moved. Breaks stalling on the highly
    /// degenerate bases that symmetric point sets produce.
    fn perturb(&mut self) {
        let scale = self.lp.rhs.iter().fold(1.0f64, |s, b| s.max(b.abs()));
        for r in 0..self.rows() {
            if self.x[r] > FEAS_TOL * scale {
                continue;
            }
            let delta = PERTURBATION * scale * (1.0 + (0.618_033_988_749_895 * (r + 1) as f64).fract());
            self.x[r] += delta;
            let col = self.column(self.basis[r]);
            for (b, a) in self.rhs.iter_mut().zip(col) {
                *b += delta * a;
            }
        }
        self.perturbed = true;
    }

    /// Restore the true right-hand side. Returns whether it had been moved.
    fn unperturb(&mut self) -> Result<bool> {
        if !self.perturbed {
            return Ok(false);
        }
        self.rhs.clone_from(&self.lp.rhs);
        self.perturbed = false;
        self.refactor()?;
        Ok(true)
    }

    fn run_phase(&mut self, phase_one: bool) -> Result<()> {
        let mut degenerate_run = 0usize;
        loop {
            if self.iterations >= MAX_ITERATIONS {
                return Err(Error::Lp(format!("iteration limit {MAX_ITERATIONS} reached")));
            }
            if degenerate_run >= PERTURB_AFTER && !self.perturbed {
                self.perturb();
                degenerate_run = 0;
            }
            let bland = degenerate_run >= DEGENERATE_LIMIT;
            let Some(col) = self.price(phase_one, bland) else {
                return Ok(());
            };
            let mut w = self.ftran(&self.column(col));
            let mut pick = self.ratio_test(&w, phase_one, bland);
            if pick.is_none() && self.since_refactor > 0 {
                self.refactor()?;
                w = self.ftran(&self.column(col));
                pick = self.ratio_test(&w, phase_one, bland);
            }
            // The objective is bounded below, so a column without a pivot
            // only priced negative through rounding in an ill-conditioned
            // basis. Skip it until the basis changes.
            let Some(p) = pick else {
                if let Col::Point { i, k } = col {
                    self.rejected.insert((i, k));
                    continue;
                }
                return Err(Error::Lp("unbounded direction".into()));
            };
            self.rejected.clear();
            let step = self.x[p].max(0.0) / w[p];
            self.pivot(p, &w, col);
            self.iterations += 1;
            if step <= 1e-14 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
        }
    }

    /// Optimize at the current grid size, running phase one on first use.
    pub fn solve(&mut self) -> Result<LpSolution> {
        if !self.phase_one_done {
            self.run_phase(true)?;
            self.unperturb()?;
            self.refactor()?;
            let infeas: f64 = self
                .basis
                .iter()
                .zip(&self.x)
                .filter(|(c, _)| matches!(c, Col::Artificial { .. }))
                .map(|(_, &x)| x)
                .sum();
            let scale = self.lp.rhs.iter().fold(1.0f64, |s, b| s.max(b.abs()));
            if infeas > 1e-8 * scale {
                return Err(Error::Lp(format!("infeasible (phase-one residual {infeas:.3e})")));
            }
            self.phase_one_done = true;
        }
        self.run_phase(false)?;
        self.unperturb()?;
        self.refactor()?;
        // the fresh inverse can expose a few columns with small negative
        // reduced cost
        self.run_phase(false)?;
        self.unperturb()?;
        let y = self.multipliers_raw(false);
        let value = self.lp.rhs.iter().zip(&y).map(|(b, y)| b * y).sum();
        let support = self
            .basis
            .iter()
            .zip(&self.x)
            .filter_map(|(c, &x)| match c {
                Col::Point { i, k } if x > 0.0 => Some((*i, *k, x)),
                _ => None,
            })
            .collect();
        Ok(LpSolution { value, multipliers: self.split(&y), m: self.m, iterations: self.iterations, support })
    }
}
