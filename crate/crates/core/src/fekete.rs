//! Vandermonde determinants, discrete Fekete points and transfinite-diameter
//! estimates.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::index::{enumerate_upto, rounded_index, Direction, MultiIndex};
use crate::linalg::{complex_log_abs_det, ComplexLu};
use crate::minimax::{tau_result, MinimaxOptions};
use crate::ortho::monomial;
use crate::sets::PointCloud;

/// Threshold on the determinant ratio for an exchange to count as an
/// improvement.
const EXCHANGE_GAIN: f64 = 1.0 + 1e-12;

fn monomial_matrix(points: &[Complex64], dim: usize, monos: &[MultiIndex]) -> Vec<Complex64> {
    points.chunks_exact(dim).flat_map(|z| monos.iter().map(move |b| monomial(z, b))).collect()
}

/// `log |VDM|` of exactly `d_n` points (flat, `dim` coordinates each).
/// Returns `-inf` when the matrix is singular.
pub fn log_vdm(points: &[Complex64], dim: usize, n: u32) -> Result<f64> {
    if dim == 0 || !points.len().is_multiple_of(dim) {
        return Err(Error::InvalidInput("point list does not match the dimension".into()));
    }
    let e = enumerate_upto(n, dim)?;
    let count = points.len() / dim;
    if count != e.d_n {
        return Err(Error::WrongPointCount { expected: e.d_n, found: count });
    }
    let mut a = monomial_matrix(points, dim, &e.indices);
    let d = e.d_n;
    let mut shift = 0.0;
    for row in a.chunks_exact_mut(d) {
        let s = row.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        if s == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        row.iter_mut().for_each(|v| *v /= s);
        shift += s.ln();
    }
    Ok(complex_log_abs_det(a, d) + shift)
}

#[derive(Clone, Debug)]
pub struct FeketeSelection {
    /// Indices into the candidate cloud.
    pub indices: Vec<usize>,
    pub log_vn: f64,
    pub d_n: usize,
    pub l_n: u64,
    /// Exchanges performed after the greedy phase.
    pub swaps: usize,
}

impl FeketeSelection {
    pub fn points(&self, cloud: &PointCloud) -> Vec<Complex64> {
        self.indices.iter().flat_map(|&i| cloud.point(i).iter().copied()).collect()
    }
}

/// Greedy (Leja-style) selection of `d_n` cloud points followed by up to
/// `exchange_rounds` single-point exchanges.
pub fn greedy_fekete(cloud: &PointCloud, n: u32, exchange_rounds: usize) -> Result<FeketeSelection> {
    let dim = cloud.dim();
    let e = enumerate_upto(n, dim)?;
    let d = e.d_n;
    let count = cloud.len();
    if count < d {
        return Err(Error::WrongPointCount { expected: d, found: count });
    }
    let mut m = monomial_matrix(cloud.coords(), dim, &e.indices);
    // column scaling leaves pivot choices unchanged and keeps entries O(1)
    let col_scale: Vec<f64> = (0..d)
        .map(|j| m.iter().skip(j).step_by(d).fold(0.0f64, |s, v| s.max(v.norm())).max(f64::MIN_POSITIVE))
        .collect();
    for row in m.chunks_exact_mut(d) {
        for (v, s) in row.iter_mut().zip(&col_scale) {
            *v /= s;
        }
    }
    let scaled = m.clone();
    let log_scale: f64 = col_scale.iter().map(|s| s.ln()).sum();

    let mut active = vec![true; count];
    let mut chosen = Vec::with_capacity(d);
    for k in 0..d {
        let best = m
            .par_chunks_exact(d)
            .enumerate()
            .filter(|(i, _)| active[*i])
            .map(|(i, row)| (i, row[k].norm()))
            .reduce(|| (usize::MAX, -1.0), |a, b| if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a });
        let (p, pmax) = best;
        if p == usize::MAX || pmax <= 0.0 {
            return Ok(FeketeSelection { indices: chosen, log_vn: f64::NEG_INFINITY, d_n: d, l_n: e.l_n, swaps: 0 });
        }
        active[p] = false;
        chosen.push(p);
        let prow: Vec<Complex64> = m[p * d..(p + 1) * d].to_vec();
        let piv = prow[k];
        m.par_chunks_exact_mut(d).enumerate().filter(|(i, _)| active[*i]).for_each(|(_, row)| {
            let f = row[k] / piv;
            if f.norm() != 0.0 {
                for j in k..d {
                    row[j] -= f * prow[j];
                }
            }
        });
    }

    let selected_det = |idx: &[usize]| {
        let a: Vec<Complex64> = idx.iter().flat_map(|&i| scaled[i * d..(i + 1) * d].iter().copied()).collect();
        complex_log_abs_det(a, d)
    };
    let mut log_v = selected_det(&chosen);
    let mut swaps = 0;
    for _ in 0..exchange_rounds {
        // G = M A^{-1}: entry (i, j) is the determinant ratio for putting
        // candidate i in place of selected point j
        let mut at = vec![Complex64::new(0.0, 0.0); d * d];
        for (c, &i) in chosen.iter().enumerate() {
            for j in 0..d {
                at[j * d + c] = scaled[i * d + j];
            }
        }
        let Some(lu) = ComplexLu::new(at, d) else { break };
        let in_set: Vec<bool> = {
            let mut v = vec![false; count];
            chosen.iter().for_each(|&i| v[i] = true);
            v
        };
        let best = scaled
            .par_chunks_exact(d)
            .enumerate()
            .filter(|(i, _)| !in_set[*i])
            .map(|(i, row)| {
                let g = lu.solve(row);
                let (j, v) = g.iter().enumerate().fold((0, -1.0), |b, (j, x)| if x.norm() > b.1 { (j, x.norm()) } else { b });
                (i, j, v)
            })
            .reduce(
                || (usize::MAX, 0, -1.0),
                |a, b| if b.2 > a.2 || (b.2 == a.2 && b.0 < a.0) { b } else { a },
            );
        if best.0 == usize::MAX || best.2 <= EXCHANGE_GAIN {
            break;
        }
        let mut trial = chosen.clone();
        trial[best.1] = best.0;
        let v = selected_det(&trial);
        if v <= log_v {
            break;
        }
        chosen = trial;
        log_v = v;
        swaps += 1;
    }
    Ok(FeketeSelection { indices: chosen, log_vn: log_v + log_scale, d_n: d, l_n: e.l_n, swaps })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaEstimate {
    pub n: u32,
    pub log_vn: f64,
    pub l_n: u64,
    pub delta: f64,
}

/// `V_n^{1/l_n}` from a greedy Fekete selection.
pub fn delta_fekete(cloud: &PointCloud, n: u32, exchange_rounds: usize) -> Result<DeltaEstimate> {
    if n == 0 {
        return Err(Error::InvalidInput("degree must be >= 1".into()));
    }
    let sel = greedy_fekete(cloud, n, exchange_rounds)?;
    Ok(DeltaEstimate { n, log_vn: sel.log_vn, l_n: sel.l_n, delta: (sel.log_vn / sel.l_n as f64).exp() })
}

#[derive(Clone, Debug)]
pub struct ZaharjutaEstimate {
    pub delta: f64,
    /// Quadrature nodes with the index used and its Chebyshev constant.
    pub nodes: Vec<(Vec<f64>, MultiIndex, f64)>,
}

/// Interior midpoint nodes of the simplex: `k + 1/2` over `nodes` cells for
/// `d = 2`, centroids of a uniform triangulation with `nodes` cells per side
/// for `d = 3`.
pub fn quadrature_nodes(dim: usize, nodes: usize) -> Result<Vec<Vec<f64>>> {
    if nodes == 0 {
        return Err(Error::InvalidInput("need at least one quadrature node".into()));
    }
    let h = 1.0 / nodes as f64;
    match dim {
        2 => Ok((0..nodes).map(|k| (k as f64 + 0.5) * h).map(|t| vec![t, 1.0 - t]).collect()),
        3 => {
            let mut out = Vec::with_capacity(nodes * nodes);
            for i in 0..nodes {
                for j in 0..nodes - i {
                    let (a, b) = ((i as f64 + 1.0 / 3.0) * h, (j as f64 + 1.0 / 3.0) * h);
                    out.push(vec![a, b, 1.0 - a - b]);
                    if i + j + 1 < nodes {
                        let (a, b) = ((i as f64 + 2.0 / 3.0) * h, (j as f64 + 2.0 / 3.0) * h);
                        out.push(vec![a, b, 1.0 - a - b]);
                    }
                }
            }
            Ok(out)
        }
        _ => Err(Error::InvalidInput(format!("integral formula implemented for d = 2 or 3, got {dim}"))),
    }
}

/// `exp` of the mean of `log tau` over interior simplex nodes, with each
/// `tau(K, theta)` taken at the rounded index of degree `degree`.
pub fn delta_zaharjuta(cloud: &PointCloud, nodes: usize, degree: u32, opts: &MinimaxOptions) -> Result<ZaharjutaEstimate> {
    if degree == 0 {
        return Err(Error::InvalidInput("degree must be >= 1".into()));
    }
    let thetas = quadrature_nodes(cloud.dim(), nodes)?;
    let results: Vec<Result<(Vec<f64>, MultiIndex, f64)>> = thetas
        .into_par_iter()
        .enumerate()
        .map(|(k, theta)| {
            let alpha = rounded_index(&Direction::new(theta.clone())?, degree);
            let res = tau_result(cloud, &alpha, opts)?;
            if res.degenerate || res.tau <= 0.0 {
                return Err(Error::DegenerateNode { node: k, theta });
            }
            Ok((theta, alpha, res.tau))
        })
        .collect();
    let nodes: Vec<_> = results.into_iter().collect::<Result<_>>()?;
    let mean = nodes.iter().map(|(_, _, t)| t.ln()).sum::<f64>() / nodes.len() as f64;
    Ok(ZaharjutaEstimate { delta: mean.exp(), nodes })
}
