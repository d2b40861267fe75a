//! Complex Chebyshev approximation on point clouds.
//!
//! Every modulus constraint `|u_i| <= t` is relaxed to the `m` supporting
//! half-planes of a regular polygon; the relaxed problem is a linear program
//! whose optimal value is a lower bound for the true minimax value, while the
//! recovered coefficients give an achieved upper bound. `m` is doubled until
//! the two meet within the requested relative gap.

use std::cmp::Ordering;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::index::{basis_below, compare, enumerate_upto, homogeneous, MultiIndex};
use crate::lp::{PolygonLp, PolygonSimplex};
use crate::ortho::{monomial, OrthoBasis};
use crate::sets::PointCloud;

/// Norms below this are reported as exactly zero.
pub const ZERO_NORM: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Polynomial over an explicit increasing monomial basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    dim: usize,
    basis: Vec<MultiIndex>,
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(dim: usize, basis: Vec<MultiIndex>, coeffs: Vec<Complex64>) -> Result<Self> {
        if basis.len() != coeffs.len() {
            return Err(Error::DimensionMismatch { expected: basis.len(), found: coeffs.len() });
        }
        if let Some(b) = basis.iter().find(|b| b.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: b.dim() });
        }
        for w in basis.windows(2) {
            if compare(&w[0], &w[1])? != Ordering::Less {
                return Err(Error::InvalidInput(format!("basis not strictly increasing at {} / {}", w[0], w[1])));
            }
        }
        Ok(Self { dim, basis, coeffs })
    }

    /// Collects terms in any order, summing repeated monomials.
    pub fn from_terms(dim: usize, mut terms: Vec<(MultiIndex, Complex64)>) -> Result<Self> {
        if let Some((b, _)) = terms.iter().find(|(b, _)| b.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: b.dim() });
        }
        terms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
        let mut basis: Vec<MultiIndex> = Vec::with_capacity(terms.len());
        let mut coeffs: Vec<Complex64> = Vec::with_capacity(terms.len());
        for (b, c) in terms {
            if basis.last() == Some(&b) {
                *coeffs.last_mut().unwrap() += c;
            } else {
                basis.push(b);
                coeffs.push(c);
            }
        }
        Ok(Self { dim, basis, coeffs })
    }

    pub fn monomial(alpha: &MultiIndex) -> Self {
        Self { dim: alpha.dim(), basis: vec![alpha.clone()], coeffs: vec![ONE] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[MultiIndex] {
        &self.basis
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, Complex64)> {
        self.basis.iter().zip(self.coeffs.iter().copied())
    }

    pub fn coefficient(&self, beta: &MultiIndex) -> Complex64 {
        self.basis.iter().position(|b| b == beta).map_or(ZERO, |i| self.coeffs[i])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    /// Highest degree carrying a nonzero coefficient.
    pub fn degree(&self) -> Option<u32> {
        self.terms().filter(|(_, c)| *c != ZERO).map(|(b, _)| b.degree()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms().filter(|(_, c)| *c != ZERO).map(|(b, _)| b.degree());
        match degs.next() {
            Some(first) => degs.all(|d| d == first),
            None => false,
        }
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: z.len() });
        }
        Ok(self.terms().map(|(b, c)| c * monomial(z, b)).sum())
    }

    pub fn scaled(&self, lambda: Complex64) -> Self {
        Self { dim: self.dim, basis: self.basis.clone(), coeffs: self.coeffs.iter().map(|c| c * lambda).collect() }
    }

    /// Rewrite a homogeneous polynomial in `t = (z2/z1, ..., zd/z1)`, so that
    /// `p(z) = z1^n r(t)` with `n` the degree.
    pub fn dehomogenize(&self) -> Result<Polynomial> {
        if self.dim < 2 {
            return Err(Error::InvalidInput("dehomogenizing needs d >= 2".into()));
        }
        if !self.is_homogeneous() {
            return Err(Error::InvalidInput("polynomial is not homogeneous".into()));
        }
        let terms = self
            .terms()
            .filter(|(_, c)| *c != ZERO)
            .map(|(b, c)| (b.tail().expect("d >= 2"), c))
            .collect();
        Polynomial::from_terms(self.dim - 1, terms)
    }

    /// `max_i w_i^power |p(z_i)|` over a cloud.
    pub fn weighted_sup(&self, cloud: &PointCloud, power: u32) -> Result<f64> {
        let mut best = 0.0f64;
        for (z, &w) in cloud.iter().zip(cloud.weights()) {
            let wp = w.powi(power as i32);
            if wp > 0.0 {
                best = best.max(wp * self.eval(z)?.norm());
            }
        }
        Ok(best)
    }
}

/// Top-degree part of `p`.
pub fn leading_form(p: &Polynomial) -> Result<Polynomial> {
    let n = p.degree().ok_or_else(|| Error::InvalidInput("leading form of the zero polynomial".into()))?;
    let (basis, coeffs) = p.terms().filter(|(b, _)| b.degree() == n).map(|(b, c)| (b.clone(), c)).unzip();
    Ok(Polynomial { dim: p.dim, basis, coeffs })
}

#[derive(Clone, Debug)]
pub struct MinimaxOptions {
    /// Target relative duality gap.
    pub tol: f64,
    /// Initial polygon size.
    pub m_initial: usize,
    /// Maximum number of LP solves (each after the first doubles `m`).
    pub max_rounds: usize,
}

impl Default for MinimaxOptions {
    fn default() -> Self {
        Self { tol: 1e-9, m_initial: 32, max_rounds: 14 }
    }
}

impl MinimaxOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidInput(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.m_initial < 3 || self.max_rounds == 0 {
            return Err(Error::InvalidInput("need m_initial >= 3 and max_rounds >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ChebyshevResult {
    /// Achieved maximum of the weighted modulus.
    pub norm: f64,
    /// `norm^{1/|alpha|}`.
    pub tau: f64,
    pub polynomial: Polynomial,
    pub dual_lower_bound: f64,
    pub rel_gap: f64,
    pub m_final: usize,
    /// Set when the norm was detected to be zero.
    pub degenerate: bool,
    /// Lower bound after each refinement round.
    pub bound_history: Vec<f64>,
}

struct Reduction {
    norm: f64,
    lower: f64,
    rel_gap: f64,
    m_final: usize,
    degenerate: bool,
    /// Coefficients on the orthonormal columns, unnormalized.
    coeffs: Vec<Complex64>,
    history: Vec<f64>,
}

/// Minimize `max_i |r_i + (Q c)_i|` over complex `c`.
fn reduce(q: &[Vec<Complex64>], r: &[Complex64], opts: &MinimaxOptions) -> Result<Reduction> {
    let rho = r.iter().fold(0.0f64, |s, v| s.max(v.norm()));
    let zeros = vec![ZERO; q.len()];
    if rho < ZERO_NORM {
        return Ok(Reduction {
            norm: 0.0,
            lower: 0.0,
            rel_gap: 0.0,
            m_final: opts.m_initial,
            degenerate: true,
            coeffs: zeros,
            history: vec![0.0],
        });
    }
    if q.is_empty() {
        return Ok(Reduction {
            norm: rho,
            lower: rho,
            rel_gap: 0.0,
            m_final: opts.m_initial,
            degenerate: false,
            coeffs: zeros,
            history: vec![rho],
        });
    }
    // work with a unit-size target so tolerances are scale free
    let rn: Vec<Complex64> = r.iter().map(|v| v / rho).collect();
    let mut rhs = vec![0.0; 1 + 2 * q.len()];
    rhs[0] = 1.0;
    let lp = PolygonLp { columns: q, target: Some(&rn), target_weight: -1.0, unit_cost: 0.0, convexity: true, rhs };
    let mut simplex = PolygonSimplex::new(lp, opts.m_initial)?;
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    let mut lower = f64::NEG_INFINITY;
    let mut history = Vec::new();
    let mut gap = f64::INFINITY;
    for round in 0..opts.max_rounds {
        if round > 0 {
            simplex.refine();
        }
        let sol = simplex.solve()?;
        lower = lower.max(-sol.multipliers.convexity);
        history.push(lower * rho);
        let c = sol.multipliers.coeffs;
        let mut u = rn.clone();
        for (qj, &cj) in q.iter().zip(&c) {
            for (ui, &qi) in u.iter_mut().zip(qj) {
                *ui += cj * qi;
            }
        }
        let achieved = u.iter().fold(0.0f64, |s, v| s.max(v.norm()));
        if best.as_ref().is_none_or(|(b, _)| achieved < *b) {
            best = Some((achieved, c));
        }
        let bnorm = best.as_ref().unwrap().0;
        gap = ((bnorm - lower) / bnorm.max(f64::MIN_POSITIVE)).max(0.0);
        if bnorm * rho < ZERO_NORM || gap <= opts.tol {
            let (bnorm, c) = best.unwrap();
            let norm = bnorm * rho;
            let degenerate = norm < ZERO_NORM;
            return Ok(Reduction {
                norm: if degenerate { 0.0 } else { norm },
                lower: if degenerate { 0.0 } else { (lower * rho).min(norm) },
                rel_gap: if degenerate { 0.0 } else { gap },
                m_final: simplex.m(),
                degenerate,
                coeffs: c.into_iter().map(|v| v * rho).collect(),
                history,
            });
        }
    }
    Err(Error::NotConverged { gap, tol: opts.tol, rounds: opts.max_rounds })
}

fn check_alpha(cloud: &PointCloud, alpha: &MultiIndex) -> Result<()> {
    if alpha.dim() != cloud.dim() {
        return Err(Error::DimensionMismatch { expected: cloud.dim(), found: alpha.dim() });
    }
    if alpha.degree() == 0 {
        return Err(Error::InvalidInput("Chebyshev constants need |alpha| >= 1".into()));
    }
    Ok(())
}

/// Basis of the monomials preceding `alpha` on a cloud, reusable across
/// every `alpha` up to the one it was built for.
#[derive(Clone, Debug)]
pub struct MonicBasis {
    basis: OrthoBasis,
    homogeneous_only: bool,
    power: u32,
}

impl MonicBasis {
    /// Full (non-homogeneous) basis for every monomial of degree `<= n`,
    /// with rows weighted by `w^power`.
    pub fn full(cloud: &PointCloud, n: u32, power: u32) -> Result<Self> {
        let (pts, omega) = OrthoBasis::rows_of(cloud, power);
        if omega.is_empty() {
            return Err(Error::EmptySet("no point carries a positive weight".into()));
        }
        let vanishing = cloud.vanishing();
        let monos: Vec<MultiIndex> = enumerate_upto(n, cloud.dim())?
            .indices
            .into_iter()
            .filter(|b| !uses_any(b, vanishing))
            .collect();
        Ok(Self { basis: OrthoBasis::build(cloud.dim(), pts, omega, &monos, true), homogeneous_only: false, power })
    }
}

fn uses_any(beta: &MultiIndex, coords: &[usize]) -> bool {
    coords.iter().any(|&k| beta.exponents()[k] > 0)
}

/// Weighted monic Chebyshev polynomial `t_{alpha}` on a cloud. Weights enter
/// as `w_i^{|alpha|}`.
pub fn solve_minimax(
    cloud: &PointCloud,
    alpha: &MultiIndex,
    homogeneous_only: bool,
    opts: &MinimaxOptions,
) -> Result<ChebyshevResult> {
    check_alpha(cloud, alpha)?;
    opts.validate()?;
    let n = alpha.degree();
    let below = basis_below(alpha, homogeneous_only);
    if uses_any(alpha, cloud.vanishing()) {
        // z^alpha vanishes identically on the cloud
        let mut basis = below;
        basis.push(alpha.clone());
        let mut coeffs = vec![ZERO; basis.len()];
        *coeffs.last_mut().unwrap() = ONE;
        return Ok(ChebyshevResult {
            norm: 0.0,
            tau: 0.0,
            polynomial: Polynomial { dim: alpha.dim(), basis, coeffs },
            dual_lower_bound: 0.0,
            rel_gap: 0.0,
            m_final: opts.m_initial,
            degenerate: true,
            bound_history: vec![0.0],
        });
    }
    let (pts, omega) = OrthoBasis::rows_of(cloud, n);
    if omega.is_empty() {
        return Err(Error::EmptySet("no point carries a positive weight".into()));
    }
    let monos: Vec<MultiIndex> = below.iter().filter(|b| !uses_any(b, cloud.vanishing())).cloned().collect();
    let ob = OrthoBasis::build(cloud.dim(), pts, omega, &monos, !homogeneous_only);
    solve_on(&MonicBasis { basis: ob, homogeneous_only, power: n }, alpha, below, opts)
}

/// Same as [`solve_minimax`] in full mode, reusing a prebuilt basis. The
/// basis must cover every monomial preceding `alpha` and carry the weight
/// power `|alpha|`.
pub fn solve_minimax_with(basis: &MonicBasis, cloud: &PointCloud, alpha: &MultiIndex, opts: &MinimaxOptions) -> Result<ChebyshevResult> {
    check_alpha(cloud, alpha)?;
    opts.validate()?;
    if basis.homogeneous_only || basis.power != alpha.degree() {
        return Err(Error::InvalidInput("prebuilt basis does not match the weight power of alpha".into()));
    }
    if uses_any(alpha, cloud.vanishing()) {
        return solve_minimax(cloud, alpha, false, opts);
    }
    let below = basis_below(alpha, false);
    let len = basis.basis.leads.iter().take_while(|b| b.partial_cmp(&alpha) == Some(Ordering::Less)).count();
    let ob = basis.basis.truncated(len);
    solve_on(&MonicBasis { basis: ob, homogeneous_only: false, power: basis.power }, alpha, below, opts)
}

fn solve_on(mb: &MonicBasis, alpha: &MultiIndex, below: Vec<MultiIndex>, opts: &MinimaxOptions) -> Result<ChebyshevResult> {
    let ob = &mb.basis;
    let (source, t) = ob.source_for(alpha, !mb.homogeneous_only);
    let (h, r, _, _) = ob.orthogonalize(t);
    let leads = ob.lead_coefficients();
    let lead_t = match source {
        crate::ortho::Source::Shift { pred, .. } => leads[pred],
        crate::ortho::Source::Raw(_) => 1.0,
    };
    let r: Vec<Complex64> = r.into_iter().map(|v| v / lead_t).collect();
    let red = reduce(ob.columns(), &r, opts)?;

    // monomial coefficients of (T - sum h_j P_j)/lead_t + sum c_j P_j
    let (monos, exps) = ob.monomial_expansions(alpha.degree());
    let mut v = vec![ZERO; monos.len()];
    match source {
        crate::ortho::Source::Shift { pred, var } => {
            for (l, &c) in exps[pred].iter().enumerate() {
                if c != ZERO {
                    let target = monos[l].add_unit(var);
                    let t = monos.iter().position(|m| *m == target).expect("within degree bound");
                    v[t] += c / lead_t;
                }
            }
        }
        crate::ortho::Source::Raw(_) => {}
    }
    for ((e, &hj), &cj) in exps.iter().zip(&h).zip(&red.coeffs) {
        let f = cj - hj / lead_t;
        if f != ZERO {
            for (vl, &el) in v.iter_mut().zip(e) {
                *vl += f * el;
            }
        }
    }
    let mut basis = below;
    basis.push(alpha.clone());
    let coeffs = basis
        .iter()
        .map(|b| if b == alpha { ONE } else { monos.iter().position(|m| m == b).map_or(ZERO, |l| v[l]) })
        .collect();
    let n = alpha.degree();
    Ok(ChebyshevResult {
        norm: red.norm,
        tau: if red.degenerate { 0.0 } else { red.norm.powf(1.0 / n as f64) },
        polynomial: Polynomial { dim: alpha.dim(), basis, coeffs },
        dual_lower_bound: red.lower,
        rel_gap: red.rel_gap,
        m_final: red.m_final,
        degenerate: red.degenerate,
        bound_history: red.history,
    })
}

/// Full result behind [`tau`]: homogeneous mode on circled clouds.
pub fn tau_result(cloud: &PointCloud, alpha: &MultiIndex, opts: &MinimaxOptions) -> Result<ChebyshevResult> {
    solve_minimax(cloud, alpha, cloud.is_circled(), opts)
}

/// Weighted directional Chebyshev constant at a single index.
pub fn tau(cloud: &PointCloud, alpha: &MultiIndex, opts: &MinimaxOptions) -> Result<f64> {
    Ok(tau_result(cloud, alpha, opts)?.tau)
}

/// Best reduction of a homogeneous `Q` of degree `n` by polynomials of
/// degree at most `n - 1`. With `weighted`, rows carry `w^n`.
pub fn tch_reduce(cloud: &PointCloud, q: &Polynomial, weighted: bool, opts: &MinimaxOptions) -> Result<ChebyshevResult> {
    opts.validate()?;
    if q.dim() != cloud.dim() {
        return Err(Error::DimensionMismatch { expected: cloud.dim(), found: q.dim() });
    }
    if !q.is_homogeneous() {
        return Err(Error::InvalidInput("Q must be a nonzero homogeneous polynomial".into()));
    }
    let n = q.degree().unwrap_or(0);
    if n == 0 {
        return Err(Error::InvalidInput("Q must have degree >= 1".into()));
    }
    let power = if weighted { n } else { 0 };
    let (pts, omega) = OrthoBasis::rows_of(cloud, power);
    if omega.is_empty() {
        return Err(Error::EmptySet("no point carries a positive weight".into()));
    }
    let d = cloud.dim();
    let monos = enumerate_upto(n - 1, d)?.indices;
    let ob = OrthoBasis::build(d, pts, omega, &monos, true);
    let t: Vec<Complex64> = (0..ob.rows()).map(|i| q.eval(ob.point(i)).map(|v| v * ob.omega()[i])).collect::<Result<_>>()?;
    let (h, r, _, _) = ob.orthogonalize(t);
    let red = reduce(ob.columns(), &r, opts)?;
    let (emonos, exps) = ob.monomial_expansions(n - 1);
    let mut v = vec![ZERO; emonos.len()];
    for ((e, &hj), &cj) in exps.iter().zip(&h).zip(&red.coeffs) {
        let f = cj - hj;
        for (vl, &el) in v.iter_mut().zip(e) {
            *vl += f * el;
        }
    }
    let mut terms: Vec<(MultiIndex, Complex64)> = emonos.into_iter().zip(v).collect();
    let top = homogeneous(n, d)?;
    terms.extend(top.into_iter().map(|b| {
        let c = q.coefficient(&b);
        (b, c)
    }));
    let polynomial = Polynomial::from_terms(d, terms)?;
    Ok(ChebyshevResult {
        norm: red.norm,
        tau: if red.degenerate { 0.0 } else { red.norm.powf(1.0 / n as f64) },
        polynomial,
        dual_lower_bound: red.lower,
        rel_gap: red.rel_gap,
        m_final: red.m_final,
        degenerate: red.degenerate,
        bound_history: red.history,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::sets::{generate, SetModel};

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec()).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn circle(n: usize) -> PointCloud {
        generate(&SetModel::torus(&[1.0]), 2.0 * PI / n as f64).unwrap()
    }

    fn segment(n: usize) -> PointCloud {
        generate(&SetModel::Segment { a: -1.0, b: 1.0 }, PI / (n as f64 - 1.0)).unwrap()
    }

    #[test]
    fn unit_circle_gives_monomial() {
        let k = circle(64);
        for n in 1..=6 {
            let res = solve_minimax(&k, &mi(&[n]), false, &MinimaxOptions::default()).unwrap();
            assert!((res.norm - 1.0).abs() < 1e-8, "n={n} norm {}", res.norm);
            assert!(res.dual_lower_bound <= res.norm);
            for (b, cf) in res.polynomial.terms() {
                let want = if b.degree() == n { 1.0 } else { 0.0 };
                assert!((cf - c(want, 0.0)).norm() < 1e-6, "n={n} coefficient of {b}: {cf}");
            }
        }
    }

    #[test]
    fn circle_optimum_beats_random_perturbations() {
        // brute-force oracle: random lower-order perturbations never help
        let k = circle(64);
        let mut state = 12345u64;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        for n in 1..=4u32 {
            let best = solve_minimax(&k, &mi(&[n]), false, &MinimaxOptions::default()).unwrap().norm;
            for _ in 0..50 {
                let mut terms: Vec<(MultiIndex, Complex64)> = (0..n).map(|j| (mi(&[j]), c(rnd(), rnd()) * 0.3)).collect();
                terms.push((mi(&[n]), ONE));
                let p = Polynomial::from_terms(1, terms).unwrap();
                assert!(p.weighted_sup(&k, n).unwrap() >= best - 1e-9);
            }
        }
    }

    #[test]
    fn chebyshev_on_segment() {
        let k = segment(512);
        for n in [1u32, 2, 3, 5, 8] {
            let t = tau(&k, &mi(&[n]), &MinimaxOptions::default()).unwrap();
            let want = 2f64.powf((1.0 - n as f64) / n as f64);
            assert!((t - want).abs() < 1e-4, "n={n}: {t} vs {want}");
        }
    }

    #[test]
    fn torus_product_formula() {
        let k = generate(&SetModel::torus(&[1.0, 2.0]), 2.0 * PI / 16.0).unwrap();
        for e in [[3u32, 1], [1, 3], [2, 2], [0, 4]] {
            let t = tau(&k, &mi(&e), &MinimaxOptions::default()).unwrap();
            let want = 2f64.powf(e[1] as f64 / 4.0);
            assert!((t - want).abs() < 1e-8, "{e:?}: {t} vs {want}");
        }
    }

    #[test]
    fn full_and_homogeneous_agree_on_circled_set() {
        let k = generate(&SetModel::torus(&[1.0, 2.0]), 2.0 * PI / 16.0).unwrap();
        let a = mi(&[2, 1]);
        let h = solve_minimax(&k, &a, true, &MinimaxOptions::default()).unwrap();
        let f = solve_minimax(&k, &a, false, &MinimaxOptions::default()).unwrap();
        assert!((h.norm - f.norm).abs() < 1e-8 * h.norm);
    }

    #[test]
    fn zaharjuta_degenerate() {
        let k = generate(&SetModel::ZaharjutaPluripolar, 2.0 * PI / 64.0).unwrap();
        let r = solve_minimax(&k, &mi(&[4, 1]), false, &MinimaxOptions::default()).unwrap();
        assert!(r.degenerate && r.norm == 0.0);
        let r = solve_minimax(&k, &mi(&[4, 0]), false, &MinimaxOptions::default()).unwrap();
        assert!((r.norm - 1.0).abs() < 1e-8);
    }

    #[test]
    fn rejects_degree_zero() {
        let k = circle(16);
        assert!(solve_minimax(&k, &mi(&[0]), false, &MinimaxOptions::default()).is_err());
        assert!(solve_minimax(&k, &mi(&[1, 0]), false, &MinimaxOptions::default()).is_err());
    }

    #[test]
    fn monic_and_achieved_norm_matches_polynomial() {
        let k = generate(&SetModel::Ellipsoid { a: 2.0, r: 1.0 }, 2.0 * PI / 24.0).unwrap();
        let a = mi(&[1, 2]);
        let r = solve_minimax(&k, &a, false, &MinimaxOptions::default()).unwrap();
        assert_eq!(r.polynomial.coefficient(&a), ONE);
        assert_eq!(r.polynomial.basis().last(), Some(&a));
        let direct = r.polynomial.weighted_sup(&k, 3).unwrap();
        assert!((direct - r.norm).abs() < 1e-9 * r.norm);
        assert!(r.bound_history.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn homogeneous_result_has_only_top_degree_terms() {
        let k = generate(&SetModel::torus(&[1.0, 1.5]), 2.0 * PI / 16.0).unwrap();
        let a = mi(&[2, 2]);
        let r = tau_result(&k, &a, &MinimaxOptions::default()).unwrap();
        let lf = leading_form(&r.polynomial).unwrap();
        assert_eq!(lf, r.polynomial);
        assert!(r.polynomial.basis().iter().all(|b| b.degree() == 4));
    }

    #[test]
    fn leading_form_examples() {
        let p = Polynomial::from_terms(2, vec![(mi(&[2, 0]), ONE), (mi(&[0, 1]), ONE), (mi(&[0, 0]), ONE)]).unwrap();
        let lf = leading_form(&p).unwrap();
        assert_eq!(lf.basis(), &[mi(&[2, 0])]);
        assert!(leading_form(&Polynomial::from_terms(1, vec![(mi(&[1]), ZERO)]).unwrap()).is_err());
    }

    #[test]
    fn tch_reduce_examples() {
        let k = circle(32);
        let q = Polynomial::monomial(&mi(&[3]));
        let r = tch_reduce(&k, &q, false, &MinimaxOptions::default()).unwrap();
        assert!((r.norm - 1.0).abs() < 1e-8);
        assert_eq!(leading_form(&r.polynomial).unwrap(), Polynomial::from_terms(1, vec![(mi(&[3]), ONE)]).unwrap());

        let t = generate(&SetModel::torus(&[1.0, 1.0]), 2.0 * PI / 16.0).unwrap();
        let q = Polynomial::monomial(&mi(&[1, 1]));
        let r = tch_reduce(&t, &q, false, &MinimaxOptions::default()).unwrap();
        assert!((r.norm - 1.0).abs() < 1e-8);

        let lam = c(0.5, -2.0);
        let r2 = tch_reduce(&t, &q.scaled(lam), false, &MinimaxOptions::default()).unwrap();
        assert!((r2.norm - lam.norm()).abs() < 1e-8);
    }

    #[test]
    fn dehomogenize_roundtrip() {
        let p = Polynomial::from_terms(2, vec![(mi(&[3, 0]), ONE), (mi(&[1, 2]), c(0.0, 2.0))]).unwrap();
        let r = p.dehomogenize().unwrap();
        let z = [c(0.7, 0.2), c(-0.3, 1.1)];
        let t = [z[1] / z[0]];
        let lhs = p.eval(&z).unwrap();
        let rhs = z[0].powu(3) * r.eval(&t).unwrap();
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn reused_basis_matches_fresh_solve() {
        let k = generate(&SetModel::ProductDiscs { centers: vec![c(0.3, 0.0), c(0.2, 0.0)], radii: vec![1.0, 2.0] }, 2.0 * PI / 12.0)
            .unwrap();
        let mb = MonicBasis::full(&k, 3, 3).unwrap();
        for a in [mi(&[3, 0]), mi(&[1, 2]), mi(&[0, 3])] {
            let fresh = solve_minimax(&k, &a, false, &MinimaxOptions::default()).unwrap();
            let reused = solve_minimax_with(&mb, &k, &a, &MinimaxOptions::default()).unwrap();
            assert!((fresh.norm - reused.norm).abs() < 1e-8 * fresh.norm);
        }
    }
}
