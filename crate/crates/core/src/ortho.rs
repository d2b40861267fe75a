//! Orthonormal bases of weighted monomial columns on a point cloud.
//!
//! Columns are built Arnoldi-style: the column of `z^beta` is obtained as
//! `z_k * q_pred` whenever `beta - e_k` is already in the basis, and from the
//! raw monomial otherwise. Each step is stored as a recurrence so the same
//! polynomials can be evaluated at points off the cloud and expanded in
//! monomial coefficients.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::index::{enumerate_upto, MultiIndex};
use crate::sets::PointCloud;

/// Relative residual below which a column counts as dependent.
pub const DROP_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug)]
pub(crate) enum Source {
    /// `z_var * P_pred`.
    Shift { pred: usize, var: usize },
    /// The raw monomial `z^beta`.
    Raw(MultiIndex),
}

#[derive(Clone, Debug)]
pub(crate) struct Step {
    pub source: Source,
    /// Projection coefficients against the earlier kept columns.
    pub h: Vec<Complex64>,
    pub nu: f64,
}

/// The rows are the cloud points with nonzero row weight `omega_i`; every
/// column equals `omega_i * P_j(z_i)` for a polynomial `P_j`.
#[derive(Clone, Debug)]
pub struct OrthoBasis {
    dim: usize,
    points: Vec<Complex64>,
    omega: Vec<f64>,
    /// Kept columns (length `rows` each).
    pub(crate) q: Vec<Vec<Complex64>>,
    pub(crate) steps: Vec<Step>,
    /// Monomial each kept column leads with.
    pub(crate) leads: Vec<MultiIndex>,
    kept: HashMap<MultiIndex, usize>,
    /// Requested monomials that turned out dependent.
    pub(crate) dropped: Vec<MultiIndex>,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).fold(ZERO, |s, (x, y)| s + x.conj() * y)
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn monomial(z: &[Complex64], beta: &MultiIndex) -> Complex64 {
    z.iter().zip(beta.exponents()).fold(Complex64::new(1.0, 0.0), |acc, (zk, &e)| acc * zk.powu(e))
}

impl OrthoBasis {
    /// Rows: cloud points with `w_i^power > 0`, scaled by `w_i^power`.
    pub fn rows_of(cloud: &PointCloud, power: u32) -> (Vec<Complex64>, Vec<f64>) {
        let d = cloud.dim();
        let mut pts = Vec::new();
        let mut omega = Vec::new();
        for (i, z) in cloud.iter().enumerate() {
            let w = cloud.weights()[i].powi(power as i32);
            if w > 0.0 && w.is_finite() {
                pts.extend_from_slice(z);
                omega.push(w);
            }
        }
        debug_assert_eq!(pts.len(), omega.len() * d);
        (pts, omega)
    }

    /// Build the basis for `monomials` (which must be listed in increasing
    /// order). `arnoldi` enables the shifted construction.
    pub fn build(dim: usize, points: Vec<Complex64>, omega: Vec<f64>, monomials: &[MultiIndex], arnoldi: bool) -> Self {
        let mut basis = Self {
            dim,
            points,
            omega,
            q: Vec::new(),
            steps: Vec::new(),
            leads: Vec::new(),
            kept: HashMap::new(),
            dropped: Vec::new(),
        };
        for beta in monomials {
            let (source, v) = basis.source_for(beta, arnoldi);
            let (h, r, nu, before) = basis.orthogonalize(v);
            if nu <= DROP_TOL * before || nu == 0.0 {
                basis.dropped.push(beta.clone());
                continue;
            }
            let inv = 1.0 / nu;
            basis.q.push(r.into_iter().map(|x| x * inv).collect());
            basis.steps.push(Step { source, h, nu });
            basis.kept.insert(beta.clone(), basis.leads.len());
            basis.leads.push(beta.clone());
        }
        basis
    }

    pub fn rows(&self) -> usize {
        self.omega.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn columns(&self) -> &[Vec<Complex64>] {
        &self.q
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn point(&self, i: usize) -> &[Complex64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    /// Source vector for `beta`: a shift of a kept predecessor if possible.
    pub(crate) fn source_for(&self, beta: &MultiIndex, arnoldi: bool) -> (Source, Vec<Complex64>) {
        if arnoldi {
            for var in 0..self.dim {
                if let Some(prev) = beta.sub_unit(var) {
                    if let Some(&pred) = self.kept.get(&prev) {
                        let v = self.q[pred]
                            .iter()
                            .enumerate()
                            .map(|(i, &x)| x * self.points[i * self.dim + var])
                            .collect();
                        return (Source::Shift { pred, var }, v);
                    }
                }
            }
        }
        let v = (0..self.rows()).map(|i| monomial(self.point(i), beta) * self.omega[i]).collect();
        (Source::Raw(beta.clone()), v)
    }

    /// Two passes of classical Gram-Schmidt. Returns `(h, residual, |residual|, |v|)`.
    pub(crate) fn orthogonalize(&self, mut v: Vec<Complex64>) -> (Vec<Complex64>, Vec<Complex64>, f64, f64) {
        let before = norm(&v);
        let mut h = vec![ZERO; self.q.len()];
        for _ in 0..2 {
            let c: Vec<Complex64> = self.q.iter().map(|q| dot(q, &v)).collect();
            for (qj, &cj) in self.q.iter().zip(&c) {
                for (vi, &qi) in v.iter_mut().zip(qj) {
                    *vi -= cj * qi;
                }
            }
            for (hj, cj) in h.iter_mut().zip(c) {
                *hj += cj;
            }
        }
        let nu = norm(&v);
        (h, v, nu, before)
    }

    /// `P_j(zeta)` for every kept column (unweighted polynomial values).
    pub fn eval_at(&self, zeta: &[Complex64]) -> Vec<Complex64> {
        let mut vals: Vec<Complex64> = Vec::with_capacity(self.steps.len());
        for step in &self.steps {
            let mut v = match &step.source {
                Source::Shift { pred, var } => vals[*pred] * zeta[*var],
                Source::Raw(beta) => monomial(zeta, beta),
            };
            for (e, &hj) in vals.iter().zip(&step.h) {
                v -= e * hj;
            }
            vals.push(v / step.nu);
        }
        vals
    }

    /// Coefficient of each `P_j` on its leading monomial.
    pub fn lead_coefficients(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::with_capacity(self.steps.len());
        for step in &self.steps {
            let base = match step.source {
                Source::Shift { pred, .. } => out[pred],
                Source::Raw(_) => 1.0,
            };
            out.push(base / step.nu);
        }
        out
    }

    /// Keep only the first `len` columns.
    pub fn truncated(&self, len: usize) -> Self {
        let len = len.min(self.q.len());
        let leads = self.leads[..len].to_vec();
        let kept = leads.iter().enumerate().map(|(j, b)| (b.clone(), j)).collect();
        Self {
            dim: self.dim,
            points: self.points.clone(),
            omega: self.omega.clone(),
            q: self.q[..len].to_vec(),
            steps: self.steps[..len].to_vec(),
            leads,
            kept,
            dropped: Vec::new(),
        }
    }

    /// Dense monomial expansions of every kept `P_j` over all monomials of
    /// degree up to `max_degree` (at least the largest leading degree),
    /// listed in increasing order.
    pub fn monomial_expansions(&self, max_degree: u32) -> (Vec<MultiIndex>, Vec<Vec<Complex64>>) {
        let n = self.leads.iter().map(MultiIndex::degree).max().unwrap_or(0).max(max_degree);
        let monos = enumerate_upto(n, self.dim).map(|e| e.indices).unwrap_or_default();
        let pos: HashMap<&MultiIndex, usize> = monos.iter().enumerate().map(|(l, b)| (b, l)).collect();
        let shift: Vec<Vec<Option<usize>>> = (0..self.dim)
            .map(|var| monos.iter().map(|b| pos.get(&b.add_unit(var)).copied()).collect())
            .collect();
        let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(self.steps.len());
        for step in &self.steps {
            let mut v = vec![ZERO; monos.len()];
            match &step.source {
                Source::Shift { pred, var } => {
                    for (l, &c) in out[*pred].iter().enumerate() {
                        if c != ZERO {
                            let t = shift[*var][l].expect("shifted monomial stays within the degree bound");
                            v[t] += c;
                        }
                    }
                }
                Source::Raw(beta) => v[pos[beta]] = Complex64::new(1.0, 0.0),
            }
            for (e, &hj) in out.iter().zip(&step.h) {
                if hj != ZERO {
                    for (vl, &el) in v.iter_mut().zip(e) {
                        *vl -= hj * el;
                    }
                }
            }
            let inv = 1.0 / step.nu;
            v.iter_mut().for_each(|x| *x *= inv);
            out.push(v);
        }
        (monos, out)
    }
}
