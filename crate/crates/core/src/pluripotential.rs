//! Robin functions of catalog models, circled sublevel sets, numerical
//! extremal functions and the Z-set of a weighted cloud.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::index::enumerate_upto;
use crate::lp::{PolygonLp, PolygonSimplex};
use crate::ortho::OrthoBasis;
use crate::sets::{generate, PointCloud, SetModel};

/// Sets with a Robin function in closed form, plus the circled ellipsoid
/// which is only sampled.
#[derive(Clone, Debug, PartialEq)]
pub enum RobinModel {
    ProductDiscs { centers: Vec<Complex64>, radii: Vec<f64> },
    Torus { radii: Vec<f64> },
    CircledEllipsoid { a: f64, r: f64 },
}

impl RobinModel {
    pub fn from_model(model: &SetModel) -> Result<Self> {
        match model {
            SetModel::ProductDiscs { centers, radii } => {
                Ok(RobinModel::ProductDiscs { centers: centers.clone(), radii: radii.clone() })
            }
            SetModel::Torus { radii } => Ok(RobinModel::Torus { radii: radii.clone() }),
            SetModel::Ellipsoid { a, r } => Ok(RobinModel::CircledEllipsoid { a: *a, r: *r }),
            other => Err(Error::OutsideCatalog(other.name())),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            RobinModel::ProductDiscs { radii, .. } | RobinModel::Torus { radii } => radii.len(),
            RobinModel::CircledEllipsoid { .. } => 2,
        }
    }

    fn radii(&self) -> Option<&[f64]> {
        match self {
            RobinModel::ProductDiscs { radii, .. } | RobinModel::Torus { radii } => Some(radii),
            RobinModel::CircledEllipsoid { .. } => None,
        }
    }
}

/// `max_i (log|z_i| - log r_i)` for product models.
pub fn robin_eval(model: &RobinModel, z: &[Complex64]) -> Result<f64> {
    let radii = model.radii().ok_or_else(|| Error::OutsideCatalog("circled ellipsoid".into()))?;
    if z.len() != radii.len() {
        return Err(Error::DimensionMismatch { expected: radii.len(), found: z.len() });
    }
    if z.iter().all(|c| c.norm() == 0.0) {
        return Err(Error::InvalidInput("the Robin function is not defined at the origin".into()));
    }
    Ok(z.iter().zip(radii).map(|(c, r)| c.norm().ln() - r.ln()).fold(f64::NEG_INFINITY, f64::max))
}

/// Sample of the Shilov boundary of `{robin <= 0}`, flagged circled.
pub fn k_rho_cloud(model: &RobinModel, h: f64) -> Result<PointCloud> {
    let set = match model {
        RobinModel::ProductDiscs { radii, .. } | RobinModel::Torus { radii } => SetModel::torus(radii),
        RobinModel::CircledEllipsoid { a, r } => SetModel::Ellipsoid { a: *a, r: *r },
    };
    Ok(generate(&set, h)?.with_circled(true))
}

#[derive(Clone, Debug)]
pub struct ExtremalOptions {
    /// Relative gap between the polygonal upper bound and the achieved value.
    pub tol: f64,
    pub m_initial: usize,
    pub max_rounds: usize,
}

impl Default for ExtremalOptions {
    fn default() -> Self {
        Self { tol: 1e-9, m_initial: 32, max_rounds: 14 }
    }
}

/// Values of the degree-`n` extremal function on a list of points.
#[derive(Clone, Debug)]
pub struct ExtremalGrid {
    pub dim: usize,
    /// Flat evaluation points, `dim` coordinates each.
    pub points: Vec<Complex64>,
    /// `V^(n)` from the best polynomial found (a certified lower bound).
    pub values: Vec<f64>,
    /// `(1/n) log` of the polygonal upper bound.
    pub upper: Vec<f64>,
    pub degree: u32,
    pub weighted: bool,
}

impl ExtremalGrid {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn point(&self, i: usize) -> &[Complex64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }
}

/// Prepared problem: orthonormal basis of all polynomials of degree `<= n`
/// on the rows `w_i^n z_i`.
pub struct ExtremalSolver {
    basis: OrthoBasis,
    n: u32,
    weighted: bool,
}

impl ExtremalSolver {
    pub fn new(cloud: &PointCloud, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("degree must be >= 1".into()));
        }
        let (pts, omega) = OrthoBasis::rows_of(cloud, n);
        if omega.is_empty() {
            return Err(Error::EmptySet("no point carries a positive weight".into()));
        }
        let monos = enumerate_upto(n, cloud.dim())?.indices;
        let basis = OrthoBasis::build(cloud.dim(), pts, omega, &monos, true);
        Ok(Self { basis, n, weighted: !cloud.is_unweighted() })
    }

    /// `(lower, upper)` bounds for `sup |p(zeta)|` over `max_i w_i^n |p(z_i)| <= 1`.
    pub fn bounds(&self, zeta: &[Complex64], opts: &ExtremalOptions) -> Result<(f64, f64)> {
        if zeta.len() != self.basis.dim() {
            return Err(Error::DimensionMismatch { expected: self.basis.dim(), found: zeta.len() });
        }
        let g = self.basis.eval_at(zeta);
        let scale = g.iter().fold(0.0f64, |s, v| s.max(v.re.abs()).max(v.im.abs()));
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::Lp(format!("objective at {zeta:?} is not representable")));
        }
        // the problem is invariant under rotating p, so one direction suffices
        let rhs: Vec<f64> = g.iter().flat_map(|v| [v.re / scale, v.im / scale]).collect();
        let q = self.basis.columns();
        let lp = PolygonLp { columns: q, target: None, target_weight: 0.0, unit_cost: 1.0, convexity: false, rhs };
        let mut simplex = PolygonSimplex::new(lp, opts.m_initial)?;
        let mut best_lower = 0.0f64;
        let mut gap = f64::INFINITY;
        for round in 0..opts.max_rounds {
            if round > 0 {
                simplex.refine();
            }
            let sol = simplex.solve()?;
            let upper = sol.value;
            let a = &sol.multipliers.coeffs;
            let p_zeta: Complex64 = a.iter().zip(&g).map(|(x, y)| x * y).sum::<Complex64>() / scale;
            let mut sup = 0.0f64;
            for i in 0..self.basis.rows() {
                let u: Complex64 = q.iter().zip(a).map(|(col, x)| col[i] * x).sum();
                sup = sup.max(u.norm());
            }
            if sup > 0.0 {
                best_lower = best_lower.max(p_zeta.norm() / sup);
            }
            gap = (upper - best_lower) / upper.max(f64::MIN_POSITIVE);
            if gap <= opts.tol {
                return Ok((best_lower * scale, upper * scale));
            }
        }
        Err(Error::NotConverged { gap, tol: opts.tol, rounds: opts.max_rounds })
    }

    /// `V^(n)(zeta)` with its upper bound.
    pub fn value(&self, zeta: &[Complex64], opts: &ExtremalOptions) -> Result<(f64, f64)> {
        let (lo, hi) = self.bounds(zeta, opts)?;
        let n = f64::from(self.n);
        Ok((lo.ln() / n, hi.ln() / n))
    }
}

/// `V^(n)` at every evaluation point (flat, `cloud.dim()` coordinates each).
pub fn extremal_numeric(cloud: &PointCloud, n: u32, eval_points: &[Complex64], opts: &ExtremalOptions) -> Result<ExtremalGrid> {
    let solver = ExtremalSolver::new(cloud, n)?;
    let d = cloud.dim();
    if !eval_points.len().is_multiple_of(d) {
        return Err(Error::InvalidInput("evaluation points do not match the dimension".into()));
    }
    let vals: Vec<(f64, f64)> =
        eval_points.par_chunks_exact(d).map(|z| solver.value(z, opts)).collect::<Result<Vec<_>>>()?;
    let (values, upper) = vals.into_iter().unzip();
    Ok(ExtremalGrid { dim: d, points: eval_points.to_vec(), values, upper, degree: n, weighted: solver.weighted })
}

/// Box grid around the bounding box of `cloud`: centred at its centre, with
/// half-width `margin` times the largest half-extent, `per_axis` points along
/// every real axis of every coordinate.
pub fn candidate_grid(cloud: &PointCloud, per_axis: usize, margin: f64) -> Result<PointCloud> {
    if per_axis < 2 {
        return Err(Error::InvalidInput("candidate grid needs at least 2 points per axis".into()));
    }
    let d = cloud.dim();
    let mut lo = vec![f64::INFINITY; 2 * d];
    let mut hi = vec![f64::NEG_INFINITY; 2 * d];
    for z in cloud.iter() {
        for (k, c) in z.iter().enumerate() {
            for (slot, v) in [(2 * k, c.re), (2 * k + 1, c.im)] {
                lo[slot] = lo[slot].min(v);
                hi[slot] = hi[slot].max(v);
            }
        }
    }
    let half = lo.iter().zip(&hi).map(|(a, b)| (b - a) / 2.0).fold(0.0f64, f64::max) * margin;
    let half = if half > 0.0 { half } else { margin };
    let centre: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| (a + b) / 2.0).collect();
    let axis: Vec<f64> = (0..per_axis).map(|k| -half + 2.0 * half * k as f64 / (per_axis - 1) as f64).collect();
    let total = per_axis.checked_pow(2 * d as u32).ok_or_else(|| Error::Overflow("candidate grid size".into()))?;
    let mut pts = Vec::with_capacity(total * d);
    for idx in 0..total {
        let mut rem = idx;
        let mut z = vec![Complex64::new(0.0, 0.0); d];
        for slot in 0..2 * d {
            let v = centre[slot] + axis[rem % per_axis];
            rem /= per_axis;
            if slot % 2 == 0 {
                z[slot / 2].re = v;
            } else {
                z[slot / 2].im = v;
            }
        }
        pts.extend(z);
    }
    let mesh = 2.0 * half / (per_axis - 1) as f64;
    Ok(PointCloud::unweighted(d, pts, mesh)?.with_generator(format!("grid({per_axis},{margin})")))
}

#[derive(Clone, Debug)]
pub struct ZSet {
    pub z: PointCloud,
    /// Maximum of `V^(n)` over the cloud.
    pub m: f64,
    /// `V^(n)` on the cloud points, then on the candidates.
    pub k_values: Vec<f64>,
    pub candidate_values: Vec<f64>,
}

/// `Z = {V^(n) <= M + slack}` over the candidates together with every cloud
/// point, with unit weights; `M` is the maximum of `V^(n)` on the cloud.
pub fn z_set(cloud: &PointCloud, n: u32, candidates: &PointCloud, slack: f64, opts: &ExtremalOptions) -> Result<ZSet> {
    if candidates.dim() != cloud.dim() {
        return Err(Error::DimensionMismatch { expected: cloud.dim(), found: candidates.dim() });
    }
    if !(slack >= 0.0) {
        return Err(Error::InvalidInput(format!("slack must be nonnegative, got {slack}")));
    }
    let solver = ExtremalSolver::new(cloud, n)?;
    let eval = |pts: &PointCloud| -> Result<Vec<f64>> {
        pts.coords().par_chunks_exact(pts.dim()).map(|z| solver.value(z, opts).map(|v| v.0)).collect()
    };
    let k_values = eval(cloud)?;
    let candidate_values = eval(candidates)?;
    let m = k_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut coords: Vec<Complex64> = cloud.coords().to_vec();
    for (z, &v) in candidates.iter().zip(&candidate_values) {
        if v <= m + slack {
            coords.extend_from_slice(z);
        }
    }
    let mesh = cloud.mesh().max(candidates.mesh());
    let z = PointCloud::unweighted(cloud.dim(), coords, mesh)?.with_generator(format!("Z({})", cloud.generator()));
    Ok(ZSet { z, m, k_values, candidate_values })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn robin_examples() {
        let t = RobinModel::Torus { radii: vec![1.0, 1.0] };
        assert_eq!(robin_eval(&t, &[c(1.0, 0.0), c(0.0, 1.0)]).unwrap(), 0.0);
        let p = RobinModel::ProductDiscs { centers: vec![c(2.0, 0.0), c(0.0, 0.0)], radii: vec![1.0, 1.0] };
        assert!((robin_eval(&p, &[c(1f64.exp(), 0.0), c(1.0, 0.0)]).unwrap() - 1.0).abs() < 1e-15);
        assert!(robin_eval(&p, &[c(0.0, 0.0), c(0.0, 0.0)]).is_err());
        let e = RobinModel::CircledEllipsoid { a: 2.0, r: 1.0 };
        assert!(matches!(robin_eval(&e, &[c(1.0, 0.0), c(0.0, 0.0)]), Err(Error::OutsideCatalog(_))));
    }

    #[test]
    fn k_rho_of_product_discs_is_centred_torus() {
        let p = RobinModel::ProductDiscs { centers: vec![c(1.0, 0.0), c(1.0, 0.0)], radii: vec![1.0, 2.0] };
        let k = k_rho_cloud(&p, 2.0 * PI / 8.0).unwrap();
        let t = generate(&SetModel::torus(&[1.0, 2.0]), 2.0 * PI / 8.0).unwrap();
        assert_eq!(k.coords(), t.coords());
        assert!(k.is_circled());
    }

    #[test]
    fn circle_extremal_is_log_modulus() {
        let k = generate(&SetModel::torus(&[1.0]), 2.0 * PI / 64.0).unwrap();
        for n in [1, 2, 5] {
            let g = extremal_numeric(&k, n, &[c(2.0, 0.0), c(0.0, 3.0), c(1.0, 0.0)], &ExtremalOptions::default()).unwrap();
            assert!((g.values[0] - 2f64.ln()).abs() < 1e-8);
            assert!((g.values[1] - 3f64.ln()).abs() < 1e-8);
            assert!(g.values[2] <= 1e-8);
            assert!(g.values.iter().zip(&g.upper).all(|(v, u)| v <= &(u + 1e-12)));
        }
    }

    #[test]
    fn candidate_grid_covers_box() {
        let k = generate(&SetModel::Segment { a: -1.0, b: 1.0 }, PI / 15.0).unwrap();
        let g = candidate_grid(&k, 5, 1.5).unwrap();
        assert_eq!(g.len(), 25);
        let re_max = g.iter().map(|z| z[0].re).fold(f64::NEG_INFINITY, f64::max);
        let im_max = g.iter().map(|z| z[0].im).fold(f64::NEG_INFINITY, f64::max);
        assert!((re_max - 1.5).abs() < 1e-15 && (im_max - 1.5).abs() < 1e-15);
    }

    #[test]
    fn z_set_contains_cloud_and_constant_weight_shift() {
        let k = generate(&SetModel::torus(&[1.0]), 2.0 * PI / 32.0).unwrap();
        let cst = 0.5;
        let kw = k.clone().weighted_by(|_| cst).unwrap();
        let cand = candidate_grid(&k, 9, 1.5).unwrap();
        let zs = z_set(&kw, 3, &cand, 1e-7, &ExtremalOptions::default()).unwrap();
        assert!((zs.m + cst.ln()).abs() < 1e-7);
        assert_eq!(&zs.z.coords()[..k.coords().len()], k.coords());
        for z in zs.z.iter() {
            assert!(z[0].norm() <= 1.0 + 1e-9);
        }
        let inside = cand.iter().filter(|z| z[0].norm() <= 1.0 - 1e-6).count();
        assert_eq!(zs.z.len(), k.len() + inside + cand.iter().filter(|z| (z[0].norm() - 1.0).abs() < 1e-6).count());
    }
}
