//! Discretized compact sets in `C^d` and the transforms applied to them.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;

/// Default cap on generated point counts.
pub const DEFAULT_POINT_CAP: usize = 2_000_000;

/// A finite sample of a compact set with per-point weights.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    /// Row-major, `dim` coordinates per point.
    points: Vec<Complex64>,
    weights: Vec<f64>,
    mesh: f64,
    circled: bool,
    generator: String,
    /// Coordinates that are exactly zero at every point.
    vanishing: Vec<usize>,
}

impl PointCloud {
    pub fn new(dim: usize, points: Vec<Complex64>, weights: Vec<f64>, mesh: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("cloud dimension must be >= 1".into()));
        }
        if points.is_empty() {
            return Err(Error::EmptySet("point cloud has no points".into()));
        }
        if !points.len().is_multiple_of(dim) {
            return Err(Error::InvalidInput(format!(
                "{} coordinates do not split into points of dimension {dim}",
                points.len()
            )));
        }
        let n = points.len() / dim;
        if weights.len() != n {
            return Err(Error::WrongPointCount { expected: n, found: weights.len() });
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidInput("weights must be finite and nonnegative".into()));
        }
        if !weights.iter().any(|&w| w > 0.0) {
            return Err(Error::InvalidInput("at least one weight must be positive".into()));
        }
        if !(mesh > 0.0) {
            return Err(Error::InvalidInput(format!("mesh must be positive, got {mesh}")));
        }
        let vanishing = (0..dim)
            .filter(|&k| points.iter().skip(k).step_by(dim).all(|z| z.re == 0.0 && z.im == 0.0))
            .collect();
        Ok(Self { dim, points, weights, mesh, circled: false, generator: String::from("custom"), vanishing })
    }

    /// Unit weights.
    pub fn unweighted(dim: usize, points: Vec<Complex64>, mesh: f64) -> Result<Self> {
        let n = points.len().checked_div(dim).unwrap_or(0);
        Self::new(dim, points, vec![1.0; n], mesh)
    }

    pub fn with_circled(mut self, circled: bool) -> Self {
        self.circled = circled;
        self
    }

    pub fn with_generator(mut self, generator: impl Into<String>) -> Self {
        self.generator = generator.into();
        self
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        let c = Self::new(self.dim, std::mem::take(&mut self.points), weights, self.mesh)?;
        Ok(Self { circled: self.circled, generator: self.generator, ..c })
    }

    /// Replace weights by `w(z)` evaluated at every point.
    pub fn weighted_by(self, w: impl Fn(&[Complex64]) -> f64) -> Result<Self> {
        let weights = self.iter().map(&w).collect();
        self.with_weights(weights)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[Complex64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[Complex64]> + '_ {
        self.points.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    pub fn is_circled(&self) -> bool {
        self.circled
    }

    pub fn generator(&self) -> &str {
        &self.generator
    }

    pub fn vanishing(&self) -> &[usize] {
        &self.vanishing
    }

    pub fn is_unweighted(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }

    /// `max |z_k|` over the cloud.
    pub fn max_abs_coord(&self, k: usize) -> f64 {
        self.iter().map(|z| z[k].norm()).fold(0.0, f64::max)
    }

    /// Points of both clouds; weights are kept, flags taken from `self`.
    pub fn union(&self, other: &PointCloud) -> Result<PointCloud> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        let mut weights = self.weights.clone();
        weights.extend_from_slice(&other.weights);
        Ok(PointCloud::new(self.dim, points, weights, self.mesh.min(other.mesh))?
            .with_generator(format!("{}+{}", self.generator, other.generator)))
    }

    /// Subset by index, keeping weights and flags.
    pub fn select(&self, idx: &[usize]) -> Result<PointCloud> {
        let mut points = Vec::with_capacity(idx.len() * self.dim);
        let mut weights = Vec::with_capacity(idx.len());
        for &i in idx {
            points.extend_from_slice(self.point(i));
            weights.push(self.weights[i]);
        }
        Ok(PointCloud::new(self.dim, points, weights, self.mesh)?
            .with_circled(self.circled)
            .with_generator(self.generator.clone()))
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "#dim={} mesh={} circled={}", self.dim, self.mesh, u8::from(self.circled))?;
        let mut line = String::new();
        for (z, w) in self.iter().zip(&self.weights) {
            line.clear();
            for c in z {
                line.push_str(&format!("{} {} ", c.re, c.im));
            }
            line.push_str(&format!("{w}"));
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty point file".into()))??;
        let header = header
            .strip_prefix('#')
            .ok_or_else(|| Error::Parse(format!("bad header line {header:?}")))?;
        let (mut dim, mut mesh, mut circled) = (None, None, None);
        for field in header.split_whitespace() {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad header field {field:?}")))?;
            let bad = |_| Error::Parse(format!("bad header value {field:?}"));
            match k {
                "dim" => dim = Some(v.parse::<usize>().map_err(|e| bad(e.to_string()))?),
                "mesh" => mesh = Some(v.parse::<f64>().map_err(|e| bad(e.to_string()))?),
                "circled" => circled = Some(v == "1"),
                _ => return Err(Error::Parse(format!("unknown header field {k:?}"))),
            }
        }
        let dim = dim.ok_or_else(|| Error::Parse("header lacks dim".into()))?;
        let mesh = mesh.ok_or_else(|| Error::Parse("header lacks mesh".into()))?;
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let vals = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2)))?;
            if vals.len() != 2 * dim + 1 {
                return Err(Error::Parse(format!(
                    "line {}: expected {} numbers, found {}",
                    lineno + 2,
                    2 * dim + 1,
                    vals.len()
                )));
            }
            points.extend(vals[..2 * dim].chunks_exact(2).map(|p| Complex64::new(p[0], p[1])));
            weights.push(vals[2 * dim]);
        }
        Ok(PointCloud::new(dim, points, weights, mesh)?
            .with_circled(circled.unwrap_or(false))
            .with_generator("file"))
    }
}

/// Analytic descriptions of the sets that can be sampled.
#[derive(Clone, Debug, PartialEq)]
pub enum SetModel {
    /// Product of closed discs `|z_i - a_i| <= r_i`.
    ProductDiscs { centers: Vec<Complex64>, radii: Vec<f64> },
    /// Product of circles `|z_i| = r_i` centred at the origin.
    Torus { radii: Vec<f64> },
    /// `|z1|^2/r^2 + |z2|^2/A^2 <= 1` in `C^2`.
    Ellipsoid { a: f64, r: f64 },
    /// `{z2 = 0, |z1| <= 1}`.
    ZaharjutaPluripolar,
    /// Real segment `[a, b]` in `C`.
    Segment { a: f64, b: f64 },
    /// `z -> M z + shift` applied to `base`; `matrix` is row-major.
    AffineImage { base: Box<SetModel>, matrix: Vec<Complex64>, shift: Vec<Complex64> },
}

impl SetModel {
    pub fn torus(radii: &[f64]) -> Self {
        SetModel::Torus { radii: radii.to_vec() }
    }

    pub fn dim(&self) -> usize {
        match self {
            SetModel::ProductDiscs { radii, .. } | SetModel::Torus { radii } => radii.len(),
            SetModel::Ellipsoid { .. } | SetModel::ZaharjutaPluripolar => 2,
            SetModel::Segment { .. } => 1,
            SetModel::AffineImage { base, .. } => base.dim(),
        }
    }

    pub fn is_circled(&self) -> bool {
        match self {
            SetModel::ProductDiscs { centers, .. } => centers.iter().all(|c| c.norm() == 0.0),
            SetModel::Torus { .. } | SetModel::Ellipsoid { .. } | SetModel::ZaharjutaPluripolar => true,
            SetModel::Segment { .. } => false,
            SetModel::AffineImage { base, shift, .. } => base.is_circled() && shift.iter().all(|s| s.norm() == 0.0),
        }
    }

    pub fn name(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(":");
        match self {
            SetModel::ProductDiscs { centers, radii } => {
                let c = centers.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(":");
                format!("product-discs(centers={c},radii={})", list(radii))
            }
            SetModel::Torus { radii } => format!("torus(radii={})", list(radii)),
            SetModel::Ellipsoid { a, r } => format!("ellipsoid(A={a},r={r})"),
            SetModel::ZaharjutaPluripolar => "zaharjuta".into(),
            SetModel::Segment { a, b } => format!("segment(a={a},b={b})"),
            SetModel::AffineImage { base, .. } => format!("affine({})", base.name()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64, what: &str| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("{what} must be positive, got {x}")))
            }
        };
        match self {
            SetModel::ProductDiscs { centers, radii } => {
                if centers.len() != radii.len() {
                    return Err(Error::DimensionMismatch { expected: radii.len(), found: centers.len() });
                }
                if radii.is_empty() {
                    return Err(Error::InvalidInput("need at least one disc".into()));
                }
                radii.iter().try_for_each(|&r| positive(r, "radius"))
            }
            SetModel::Torus { radii } => {
                if radii.is_empty() {
                    return Err(Error::InvalidInput("need at least one radius".into()));
                }
                radii.iter().try_for_each(|&r| positive(r, "radius"))
            }
            SetModel::Ellipsoid { a, r } => positive(*a, "A").and(positive(*r, "r")),
            SetModel::ZaharjutaPluripolar => Ok(()),
            SetModel::Segment { a, b } => {
                if a < b {
                    Ok(())
                } else {
                    Err(Error::InvalidInput(format!("segment needs a < b, got [{a}, {b}]")))
                }
            }
            SetModel::AffineImage { base, matrix, shift } => {
                base.validate()?;
                let d = base.dim();
                if matrix.len() != d * d || shift.len() != d {
                    return Err(Error::DimensionMismatch { expected: d, found: shift.len() });
                }
                if linalg::complex_log_abs_det(matrix.clone(), d) == f64::NEG_INFINITY {
                    return Err(Error::InvalidInput("affine matrix is singular".into()));
                }
                Ok(())
            }
        }
    }
}

/// Number of grid steps of size at most `h` covering `len`.
fn steps(len: f64, h: f64) -> usize {
    ((len / h) - 1e-9).ceil().max(1.0) as usize
}

fn circle(center: Complex64, radius: f64, count: usize) -> impl Iterator<Item = Complex64> {
    (0..count).map(move |k| center + Complex64::from_polar(radius, 2.0 * PI * (k as f64 / count as f64)))
}

/// Sample a model on (a superset of) its Shilov boundary with angular step
/// at most `h`.
pub fn generate(model: &SetModel, h: f64) -> Result<PointCloud> {
    generate_with_cap(model, h, DEFAULT_POINT_CAP)
}

pub fn generate_with_cap(model: &SetModel, h: f64, cap: usize) -> Result<PointCloud> {
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!("mesh must be positive, got {h}")));
    }
    model.validate()?;
    let d = model.dim();
    let check = |count: usize| if count > cap { Err(Error::TooManyPoints { count, cap }) } else { Ok(()) };
    let points: Vec<Complex64> = match model {
        SetModel::ProductDiscs { centers, radii } => {
            let m = steps(2.0 * PI, h);
            check(m.checked_pow(d as u32).unwrap_or(usize::MAX))?;
            product_of_circles(centers, radii, m)
        }
        SetModel::Torus { radii } => {
            let m = steps(2.0 * PI, h);
            check(m.checked_pow(d as u32).unwrap_or(usize::MAX))?;
            product_of_circles(&vec![Complex64::new(0.0, 0.0); d], radii, m)
        }
        SetModel::Ellipsoid { a, r } => {
            let m = steps(2.0 * PI, h);
            let lat = steps(PI / 2.0, h) + 1;
            check(m * m * (lat - 2) + 2 * m)?;
            let mut pts = Vec::new();
            for k in 0..lat {
                if k == 0 {
                    for z1 in circle(Complex64::new(0.0, 0.0), *r, m) {
                        pts.extend([z1, Complex64::new(0.0, 0.0)]);
                    }
                } else if k == lat - 1 {
                    for z2 in circle(Complex64::new(0.0, 0.0), *a, m) {
                        pts.extend([Complex64::new(0.0, 0.0), z2]);
                    }
                } else {
                    let chi = PI / 2.0 * (k as f64 / (lat - 1) as f64);
                    for z1 in circle(Complex64::new(0.0, 0.0), r * chi.cos(), m) {
                        for z2 in circle(Complex64::new(0.0, 0.0), a * chi.sin(), m) {
                            pts.extend([z1, z2]);
                        }
                    }
                }
            }
            pts
        }
        SetModel::ZaharjutaPluripolar => {
            let m = steps(2.0 * PI, h);
            check(m)?;
            circle(Complex64::new(0.0, 0.0), 1.0, m).flat_map(|z| [z, Complex64::new(0.0, 0.0)]).collect()
        }
        SetModel::Segment { a, b } => {
            // Chebyshev-Lobatto nodes; the largest gap is (b-a)/2 * pi/(N-1).
            let n = steps(PI * (b - a) / 2.0, h) + 1;
            check(n)?;
            let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
            (0..n)
                .map(|k| {
                    let x = if k == 0 {
                        *a
                    } else if k == n - 1 {
                        *b
                    } else {
                        mid - half * (PI * (k as f64 / (n - 1) as f64)).cos()
                    };
                    Complex64::new(x, 0.0)
                })
                .collect()
        }
        SetModel::AffineImage { base, matrix, shift } => {
            let base_cloud = generate_with_cap(base, h, cap)?;
            let mut pts = Vec::with_capacity(base_cloud.coords().len());
            for z in base_cloud.iter() {
                for i in 0..d {
                    let mut acc = shift[i];
                    for j in 0..d {
                        acc += matrix[i * d + j] * z[j];
                    }
                    pts.push(acc);
                }
            }
            pts
        }
    };
    Ok(PointCloud::unweighted(d, points, h)?.with_circled(model.is_circled()).with_generator(model.name()))
}

fn product_of_circles(centers: &[Complex64], radii: &[f64], m: usize) -> Vec<Complex64> {
    let circles: Vec<Vec<Complex64>> =
        centers.iter().zip(radii).map(|(&c, &r)| circle(c, r, m).collect()).collect();
    let d = radii.len();
    let total = m.pow(d as u32);
    let mut pts = Vec::with_capacity(total * d);
    let mut idx = vec![0usize; d];
    for _ in 0..total {
        pts.extend(idx.iter().enumerate().map(|(k, &i)| circles[k][i]));
        // last coordinate varies fastest
        for k in (0..d).rev() {
            idx[k] += 1;
            if idx[k] < m {
                break;
            }
            idx[k] = 0;
        }
    }
    pts
}

/// Image of `K` under `z -> e^{-eps} z`.
pub fn scale(cloud: &PointCloud, eps: f64) -> Result<PointCloud> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidInput(format!("scaling exponent must be >= 0, got {eps}")));
    }
    let f = (-eps).exp();
    let mut out = cloud.clone();
    for z in out.points.iter_mut() {
        *z *= f;
    }
    Ok(out)
}

/// `S = K \ {|z1| < eta}` together with its projection `L = phi(S)`.
#[derive(Clone, Debug)]
pub struct SliceProjection {
    pub s: PointCloud,
    /// Points `(z2/z1, ..., zd/z1)` weighted by `|z1|^{1/|theta'|}`.
    pub l: PointCloud,
    /// Index in the source cloud of each S point; S point `i` maps to L point `i`.
    pub source: Vec<usize>,
}

pub fn slice_and_project(cloud: &PointCloud, eta: f64, tail_norm: f64) -> Result<SliceProjection> {
    if cloud.dim() < 2 {
        return Err(Error::InvalidInput("slicing needs d >= 2".into()));
    }
    if !(eta > 0.0) {
        return Err(Error::InvalidInput(format!("eta must be positive, got {eta}")));
    }
    if !(tail_norm > 0.0 && tail_norm <= 1.0) {
        return Err(Error::InvalidInput(format!("|theta'| must lie in (0,1], got {tail_norm}")));
    }
    let source: Vec<usize> = (0..cloud.len()).filter(|&i| cloud.point(i)[0].norm() >= eta).collect();
    if source.is_empty() {
        return Err(Error::EmptySet(format!("no point with |z1| >= {eta}")));
    }
    let s = cloud.select(&source)?;
    let d = cloud.dim();
    let mut l_points = Vec::with_capacity(source.len() * (d - 1));
    let mut v = Vec::with_capacity(source.len());
    for z in s.iter() {
        l_points.extend(z[1..].iter().map(|&c| c / z[0]));
        v.push(z[0].norm().powf(1.0 / tail_norm));
    }
    let l = PointCloud::new(d - 1, l_points, v, cloud.mesh())?.with_generator(format!("phi({})", cloud.generator()));
    Ok(SliceProjection { s, l, source })
}

/// `eta = e^{-eps} * (min positive |z1|) / 2`.
pub fn default_eta(cloud: &PointCloud, eps: f64) -> f64 {
    let min_pos = cloud.iter().map(|z| z[0].norm()).filter(|&r| r > 0.0).fold(f64::INFINITY, f64::min);
    (-eps).exp() * min_pos / 2.0
}

/// `(z1, z') -> (z1, z' - z1 d'/c)`.
pub fn shear(cloud: &PointCloud, c: Complex64, d_tail: &[Complex64]) -> Result<PointCloud> {
    if c.norm() == 0.0 {
        return Err(Error::InvalidInput("shear needs c != 0".into()));
    }
    let d = cloud.dim();
    if d_tail.len() + 1 != d {
        return Err(Error::DimensionMismatch { expected: d - 1, found: d_tail.len() });
    }
    let mut out = cloud.clone();
    for z in out.points.chunks_exact_mut(d) {
        let z1 = z[0];
        for (zk, dk) in z[1..].iter_mut().zip(d_tail) {
            *zk -= z1 * dk / c;
        }
    }
    out.vanishing = (0..d)
        .filter(|&k| out.points.iter().skip(k).step_by(d).all(|z| z.re == 0.0 && z.im == 0.0))
        .collect();
    Ok(out.with_generator(format!("shear({})", cloud.generator())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn torus_grid_size_and_moduli() {
        let k = generate(&SetModel::torus(&[1.0, 1.0]), 2.0 * PI / 64.0).unwrap();
        assert_eq!(k.len(), 64 * 64);
        assert!(k.is_circled());
        for z in k.iter() {
            assert!((z[0].norm() - 1.0).abs() < 1e-15 && (z[1].norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zaharjuta_cloud() {
        let k = generate(&SetModel::ZaharjutaPluripolar, 2.0 * PI / 128.0).unwrap();
        assert_eq!(k.len(), 128);
        assert_eq!(k.vanishing(), &[1]);
        assert!(k.iter().all(|z| z[1] == c(0.0, 0.0) && (z[0].norm() - 1.0).abs() < 1e-15));
    }

    #[test]
    fn ellipsoid_points_on_boundary() {
        let k = generate(&SetModel::Ellipsoid { a: 2.0, r: 1.0 }, 2.0 * PI / 32.0).unwrap();
        for z in k.iter() {
            let q = z[0].norm_sqr() / 1.0 + z[1].norm_sqr() / 4.0;
            assert!((q - 1.0).abs() < 1e-13, "{q}");
        }
        assert!((k.max_abs_coord(0) - 1.0).abs() < 1e-15);
        assert!((k.max_abs_coord(1) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn segment_endpoints_and_spacing() {
        let h = PI / 511.0;
        let k = generate(&SetModel::Segment { a: -1.0, b: 1.0 }, h).unwrap();
        assert_eq!(k.len(), 512);
        assert_eq!(k.point(0)[0], c(-1.0, 0.0));
        assert_eq!(k.point(511)[0], c(1.0, 0.0));
        for i in 1..k.len() {
            assert!(k.point(i)[0].re - k.point(i - 1)[0].re <= h + 1e-15);
        }
    }

    #[test]
    fn generate_cap_and_determinism() {
        let m = SetModel::torus(&[1.0, 2.0, 3.0]);
        assert!(matches!(generate_with_cap(&m, 0.01, 1000), Err(Error::TooManyPoints { .. })));
        let a = generate(&SetModel::Ellipsoid { a: 2.0, r: 1.0 }, 0.3).unwrap();
        let b = generate(&SetModel::Ellipsoid { a: 2.0, r: 1.0 }, 0.3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn circled_grid_invariant_under_rotation() {
        let m = 32;
        let k = generate(&SetModel::torus(&[1.0, 2.0]), 2.0 * PI / m as f64).unwrap();
        let rot = Complex64::from_polar(1.0, 2.0 * PI / m as f64);
        for z in k.iter() {
            let w = [z[0] * rot, z[1] * rot];
            let hit = k.iter().any(|p| (p[0] - w[0]).norm() < 1e-12 && (p[1] - w[1]).norm() < 1e-12);
            assert!(hit);
        }
    }

    #[test]
    fn scale_examples() {
        let k = generate(&SetModel::torus(&[1.0, 1.0]), 2.0 * PI / 16.0).unwrap();
        assert_eq!(scale(&k, 0.0).unwrap(), k);
        let half = scale(&k, 2f64.ln()).unwrap();
        let want = generate(&SetModel::torus(&[0.5, 0.5]), 2.0 * PI / 16.0).unwrap();
        for (a, b) in half.coords().iter().zip(want.coords()) {
            assert!((a - b).norm() < 1e-15);
        }
        let s = scale(&k, 0.1).unwrap();
        for (a, b) in s.coords().iter().zip(k.coords()) {
            assert!((a.norm() - b.norm() * (-0.1f64).exp()).abs() < 1e-15);
        }
        assert!(scale(&k, -1.0).is_err());
    }

    #[test]
    fn scale_composes() {
        let k = generate(&SetModel::Ellipsoid { a: 2.0, r: 1.0 }, 0.4).unwrap();
        let two = scale(&scale(&k, 0.3).unwrap(), 0.45).unwrap();
        let one = scale(&k, 0.75).unwrap();
        for (a, b) in two.coords().iter().zip(one.coords()) {
            assert!((a - b).norm() <= 1e-15 * b.norm().max(1.0));
        }
    }

    #[test]
    fn slice_examples() {
        let k = generate(&SetModel::torus(&[1.0, 1.0]), 2.0 * PI / 16.0).unwrap();
        let sp = slice_and_project(&k, 0.5, 0.4).unwrap();
        assert_eq!(sp.s.len(), k.len());
        assert!(sp.l.iter().all(|t| (t[0].norm() - 1.0).abs() < 1e-14));
        assert!(sp.l.weights().iter().all(|&v| (v - 1.0).abs() < 1e-14));

        let pts = vec![c(2.0, 0.0), c(4.0, 0.0), c(0.1, 0.0), c(1.0, 0.0)];
        let k = PointCloud::unweighted(2, pts, 1.0).unwrap();
        let theta_norm = 0.5;
        let sp = slice_and_project(&k, 1.0, theta_norm).unwrap();
        assert_eq!(sp.s.len(), 1);
        assert_eq!(sp.source, vec![0]);
        assert_eq!(sp.l.point(0)[0], c(2.0, 0.0));
        assert!((sp.l.weights()[0] - 2f64.powf(1.0 / theta_norm)).abs() < 1e-14);

        let sp = slice_and_project(&k, 1.0, 1.0).unwrap();
        assert!((sp.l.weights()[0] - 2.0).abs() < 1e-15);
        assert!(matches!(slice_and_project(&k, 10.0, 1.0), Err(Error::EmptySet(_))));
    }

    #[test]
    fn slice_invariants() {
        let m = SetModel::AffineImage {
            base: Box::new(SetModel::Ellipsoid { a: 2.0, r: 1.0 }),
            matrix: vec![c(1.0, 0.0), c(0.0, 0.0), c(0.5, 0.2), c(1.0, 0.0)],
            shift: vec![c(0.0, 0.0), c(0.0, 0.0)],
        };
        let k = generate(&m, 0.3).unwrap();
        let (eta, tn) = (0.4, 0.3);
        let sp = slice_and_project(&k, eta, tn).unwrap();
        for (i, &src) in sp.source.iter().enumerate() {
            let z = k.point(src);
            assert!(z[0].norm() >= eta);
            assert!((sp.l.point(i)[0] - z[1] / z[0]).norm() < 1e-15);
            assert!(sp.l.weights()[i] >= eta.powf(1.0 / tn) - 1e-15);
        }
    }

    #[test]
    fn shear_examples() {
        let k = generate(&SetModel::Ellipsoid { a: 2.0, r: 1.0 }, 0.5).unwrap();
        assert_eq!(shear(&k, c(1.0, 0.0), &[c(0.0, 0.0)]).unwrap().coords(), k.coords());
        let p = PointCloud::unweighted(2, vec![c(0.7, 0.1), c(-0.3, 0.4)], 1.0).unwrap();
        let s = shear(&p, c(0.7, 0.1), &[c(-0.3, 0.4)]).unwrap();
        assert_eq!(s.point(0)[0], c(0.7, 0.1));
        assert!(s.point(0)[1].norm() < 1e-16);
        let d = [c(0.3, -0.8)];
        let back = shear(&shear(&k, c(1.1, 0.2), &d).unwrap(), c(1.1, 0.2), &[-d[0]]).unwrap();
        for (a, b) in back.coords().iter().zip(k.coords()) {
            assert!((a - b).norm() < 1e-14);
        }
        assert!(shear(&k, c(0.0, 0.0), &d).is_err());
        let s = shear(&k, c(1.1, 0.2), &d).unwrap();
        assert!(s.is_circled());
        // first coordinates untouched
        assert!(s.iter().zip(k.iter()).all(|(a, b)| a[0] == b[0]));
    }

    #[test]
    fn affine_rejects_singular() {
        let m = SetModel::AffineImage {
            base: Box::new(SetModel::torus(&[1.0, 1.0])),
            matrix: vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)],
            shift: vec![c(0.0, 0.0); 2],
        };
        assert!(generate(&m, 1.0).is_err());
    }

    #[test]
    fn file_round_trip() {
        let k = generate(&SetModel::ProductDiscs { centers: vec![c(0.3, 0.0), c(0.2, -0.1)], radii: vec![1.0, 2.0] }, 0.7)
            .unwrap()
            .weighted_by(|z| (-z[0].norm_sqr()).exp())
            .unwrap();
        let mut buf = Vec::new();
        k.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("#dim=2 mesh=0.7 circled=0\n"));
        let back = PointCloud::read_from(&buf[..]).unwrap();
        assert_eq!(back.coords(), k.coords());
        assert_eq!(back.weights(), k.weights());
        assert!(PointCloud::read_from(&b"#dim=2 mesh=1 circled=0\n1 2 3\n"[..]).is_err());
    }

    #[test]
    fn cloud_validation() {
        assert!(PointCloud::new(1, vec![], vec![], 1.0).is_err());
        assert!(PointCloud::new(1, vec![c(1.0, 0.0)], vec![0.0], 1.0).is_err());
        assert!(PointCloud::new(1, vec![c(1.0, 0.0)], vec![-1.0], 1.0).is_err());
        assert!(PointCloud::new(1, vec![c(1.0, 0.0)], vec![1.0, 1.0], 1.0).is_err());
    }
}
