//! Multi-indices, the graded monomial order and direction sequences.
//!
//! The order is graded; within a fixed degree the exponent of the
//! highest-index variable where two indices differ decides, larger exponent
//! meaning later. Hence `z1` is the smallest variable and `z1^n` is the
//! first monomial of degree `n`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Exponent vector of a monomial `z^alpha` in `d` variables.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::InvalidInput("multi-index needs d >= 1".into()));
        }
        Ok(Self(exponents))
    }

    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim.max(1)])
    }

    /// `n * e_k`.
    pub fn pure(dim: usize, k: usize, n: u32) -> Self {
        let mut e = vec![0; dim];
        e[k] = n;
        Self(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// The tail `(alpha_2, ..., alpha_d)`; `None` when `d == 1`.
    pub fn tail(&self) -> Option<MultiIndex> {
        (self.0.len() > 1).then(|| MultiIndex(self.0[1..].to_vec()))
    }

    pub fn add_unit(&self, k: usize) -> MultiIndex {
        let mut e = self.0.clone();
        e[k] += 1;
        MultiIndex(e)
    }

    pub fn sub_unit(&self, k: usize) -> Option<MultiIndex> {
        if self.0[k] == 0 {
            return None;
        }
        let mut e = self.0.clone();
        e[k] -= 1;
        Some(MultiIndex(e))
    }

    /// Direction `alpha / |alpha|`; `None` for the zero index.
    pub fn direction(&self) -> Option<Direction> {
        let n = self.degree();
        (n > 0).then(|| Direction(self.0.iter().map(|&a| a as f64 / n as f64).collect()))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

fn graded_cmp(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| {
        for (x, y) in a.iter().rev().zip(b.iter().rev()) {
            if x != y {
                return x.cmp(y);
            }
        }
        Ordering::Equal
    })
}

/// Compare two multi-indices under the graded order.
pub fn compare(a: &MultiIndex, b: &MultiIndex) -> Result<Ordering> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(graded_cmp(&a.0, &b.0))
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        (self.dim() == other.dim()).then(|| graded_cmp(&self.0, &other.0))
    }
}

/// Monomials of degree at most `n` in `d` variables, sorted by the order.
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub indices: Vec<MultiIndex>,
    /// Dimension of the polynomial space, `C(n + d, d)`.
    pub d_n: usize,
    /// Sum of the degrees of all listed monomials.
    pub l_n: u64,
}

/// `C(n + d, d)` with overflow detection.
pub fn dim_poly_space(n: u32, d: usize) -> Result<usize> {
    let mut acc: u128 = 1;
    for i in 1..=d as u128 {
        acc = acc * (n as u128 + i) / i;
        if acc > usize::MAX as u128 {
            return Err(Error::Overflow(format!("C({}+{d},{d}) exceeds usize", n)));
        }
    }
    Ok(acc as usize)
}

fn homogeneous_block(d: usize, n: u32) -> Vec<MultiIndex> {
    // Generated directly in increasing order: the last coordinate is most
    // significant, so iterate it slowest.
    fn rec(k: usize, rem: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if k == 0 {
            cur[0] = rem;
            out.push(MultiIndex(cur.clone()));
            return;
        }
        for e in 0..=rem {
            cur[k] = e;
            rec(k - 1, rem - e, cur, out);
        }
        cur[k] = 0;
    }
    let mut out = Vec::new();
    let mut cur = vec![0; d];
    rec(d - 1, n, &mut cur, &mut out);
    out
}

/// All multi-indices of degree exactly `n`, in increasing order.
pub fn homogeneous(n: u32, d: usize) -> Result<Vec<MultiIndex>> {
    if d == 0 {
        return Err(Error::InvalidInput("dimension must be >= 1".into()));
    }
    // guard the size before allocating
    dim_poly_space(n, d)?;
    Ok(homogeneous_block(d, n))
}

pub fn enumerate_upto(n: u32, d: usize) -> Result<Enumeration> {
    if d == 0 {
        return Err(Error::InvalidInput("dimension must be >= 1".into()));
    }
    let d_n = dim_poly_space(n, d)?;
    let mut indices = Vec::with_capacity(d_n);
    let mut l_n = 0u64;
    for k in 0..=n {
        let block = homogeneous_block(d, k);
        l_n += k as u64 * block.len() as u64;
        indices.extend(block);
    }
    debug_assert_eq!(indices.len(), d_n);
    Ok(Enumeration { indices, d_n, l_n })
}

/// Every `beta` preceding `alpha`, or only those of the same degree.
pub fn basis_below(alpha: &MultiIndex, homogeneous_only: bool) -> Vec<MultiIndex> {
    let d = alpha.dim();
    let n = alpha.degree();
    let mut out = Vec::new();
    let start = if homogeneous_only { n } else { 0 };
    for k in start..=n {
        for b in homogeneous_block(d, k) {
            if graded_cmp(&b.0, &alpha.0) == Ordering::Less {
                out.push(b);
            } else if k == n {
                break;
            }
        }
    }
    out
}

/// 1-based position of `alpha` in [`enumerate_upto`].
pub fn position(alpha: &MultiIndex) -> usize {
    basis_below(alpha, false).len() + 1
}

/// A point of the standard simplex.
#[derive(Clone, PartialEq, Debug)]
pub struct Direction(Vec<f64>);

const SIMPLEX_TOL: f64 = 1e-12;

impl Direction {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("direction needs d >= 1".into()));
        }
        if coords.iter().any(|&t| !(-SIMPLEX_TOL..=1.0 + SIMPLEX_TOL).contains(&t)) {
            return Err(Error::InvalidInput(format!("direction {coords:?} has entries outside [0,1]")));
        }
        let s: f64 = coords.iter().sum();
        if (s - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("direction {coords:?} sums to {s}, not 1")));
        }
        Ok(Self(coords.into_iter().map(|t| t.clamp(0.0, 1.0)).collect()))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// True when some coordinate is 0 or 1.
    pub fn is_boundary(&self) -> bool {
        self.0.iter().any(|&t| t <= SIMPLEX_TOL || t >= 1.0 - SIMPLEX_TOL)
    }

    /// `|theta'|`, the mass of the tail coordinates.
    pub fn tail_norm(&self) -> f64 {
        self.0[1..].iter().sum()
    }
}

/// Largest-remainder rounding of `j * theta` to integers summing to `j`.
/// Remainder ties go to the lowest coordinate index.
pub fn rounded_index(theta: &Direction, j: u32) -> MultiIndex {
    let scaled: Vec<f64> = theta.0.iter().map(|&t| t * j as f64).collect();
    let mut e: Vec<u32> = scaled.iter().map(|&x| x.floor() as u32).collect();
    let assigned: u32 = e.iter().sum();
    let mut order: Vec<usize> = (0..e.len()).collect();
    // stable sort keeps lowest index first among equal remainders
    order.sort_by(|&a, &b| {
        let ra = scaled[a] - scaled[a].floor();
        let rb = scaled[b] - scaled[b].floor();
        rb.partial_cmp(&ra).unwrap_or(Ordering::Equal)
    });
    for &k in order.iter().take(j.saturating_sub(assigned) as usize) {
        e[k] += 1;
    }
    MultiIndex(e)
}

/// `alpha(1), ..., alpha(j_max)` with `|alpha(j)| = j` and `alpha(j)/j -> theta`.
pub fn direction_sequence(theta: &Direction, j_max: u32) -> Vec<MultiIndex> {
    (1..=j_max).map(|j| rounded_index(theta, j)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec()).unwrap()
    }

    #[test]
    fn compare_examples() {
        assert_eq!(compare(&mi(&[1, 0]), &mi(&[0, 1])).unwrap(), Ordering::Less);
        for n in 0..10 {
            assert_eq!(compare(&mi(&[n + 1, 0]), &mi(&[n, 1])).unwrap(), Ordering::Less);
        }
        assert_eq!(compare(&mi(&[2, 0, 0]), &mi(&[0, 1, 1])).unwrap(), Ordering::Less);
        assert!(matches!(
            compare(&mi(&[1, 0]), &mi(&[1, 0, 0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    /// Direct transcription of the tie-break rule, independent of `graded_cmp`.
    fn rule_less(a: &[u32], b: &[u32]) -> bool {
        let (da, db): (u32, u32) = (a.iter().sum(), b.iter().sum());
        if da != db {
            return da < db;
        }
        let i = (0..a.len()).filter(|&i| a[i] != b[i]).max();
        match i {
            Some(i) => a[i] < b[i],
            None => false,
        }
    }

    fn all_upto(n: u32, d: usize) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for _ in 0..d {
            out = out
                .into_iter()
                .flat_map(|v| (0..=n).map(move |e| [v.clone(), vec![e]].concat()))
                .collect();
        }
        out.into_iter().filter(|v| v.iter().sum::<u32>() <= n).collect()
    }

    #[test]
    fn order_is_strict_total_by_brute_force() {
        for d in 1..=3 {
            let all = all_upto(5, d);
            for a in &all {
                assert!(!rule_less(a, a));
                for b in &all {
                    let got = graded_cmp(a, b);
                    let want = if a == b {
                        Ordering::Equal
                    } else if rule_less(a, b) {
                        Ordering::Less
                    } else {
                        Ordering::Greater
                    };
                    assert_eq!(got, want, "{a:?} vs {b:?}");
                    assert!(a == b || rule_less(a, b) != rule_less(b, a));
                    for c in &all {
                        if rule_less(a, b) && rule_less(b, c) {
                            assert_eq!(graded_cmp(a, c), Ordering::Less);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn degree_two_triples_tie_break() {
        let deg2: Vec<_> = all_upto(2, 3).into_iter().filter(|v| v.iter().sum::<u32>() == 2).collect();
        for v in &deg2 {
            if v != &vec![2, 0, 0] {
                assert!(rule_less(&[2, 0, 0], v));
            }
        }
    }

    #[test]
    fn enumerate_examples() {
        let e = enumerate_upto(1, 2).unwrap();
        assert_eq!(e.indices, vec![mi(&[0, 0]), mi(&[1, 0]), mi(&[0, 1])]);
        assert_eq!((e.d_n, e.l_n), (3, 2));
        let e = enumerate_upto(2, 2).unwrap();
        assert_eq!((e.d_n, e.l_n), (6, 8));
        let e = enumerate_upto(0, 3).unwrap();
        assert_eq!(e.indices, vec![mi(&[0, 0, 0])]);
        assert_eq!((e.d_n, e.l_n), (1, 0));
    }

    #[test]
    fn enumerate_sorted_and_counted() {
        for d in 1..=4 {
            for n in 0..=7 {
                let e = enumerate_upto(n, d).unwrap();
                assert_eq!(e.indices.len(), e.d_n);
                let brute = all_upto(n, d).len();
                assert_eq!(e.d_n, brute);
                for w in e.indices.windows(2) {
                    assert_eq!(graded_cmp(&w[0].0, &w[1].0), Ordering::Less);
                }
                let l: u64 = e.indices.iter().map(|a| a.degree() as u64).sum();
                assert_eq!(l, e.l_n);
            }
        }
    }

    #[test]
    fn enumerate_overflow_is_error() {
        assert!(matches!(dim_poly_space(u32::MAX, 40), Err(Error::Overflow(_))));
    }

    #[test]
    fn direction_sequence_examples() {
        let t = Direction::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(rounded_index(&t, 5), mi(&[5, 0]));
        let t = Direction::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(rounded_index(&t, 4), mi(&[2, 2]));
        let t = Direction::new(vec![2.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert_eq!(rounded_index(&t, 4), mi(&[3, 1]));
        // exact tie at x.5 goes to the first coordinate
        assert_eq!(rounded_index(&Direction::new(vec![0.5, 0.5]).unwrap(), 3), mi(&[2, 1]));
    }

    #[test]
    fn direction_validation() {
        assert!(Direction::new(vec![0.7, 0.7]).is_err());
        assert!(Direction::new(vec![1.2, -0.2]).is_err());
        assert!(Direction::new(vec![1.0, 0.0]).unwrap().is_boundary());
        assert!(!Direction::new(vec![0.3, 0.7]).unwrap().is_boundary());
    }

    #[test]
    fn basis_below_examples() {
        assert_eq!(basis_below(&mi(&[1, 0]), false), vec![mi(&[0, 0])]);
        assert_eq!(basis_below(&mi(&[0, 1]), false), vec![mi(&[0, 0]), mi(&[1, 0])]);
        for n in 0..8 {
            assert_eq!(basis_below(&mi(&[n, 1]), true), vec![mi(&[n + 1, 0])]);
        }
        assert!(basis_below(&mi(&[4, 0]), true).is_empty());
    }

    #[test]
    fn basis_below_length_matches_position() {
        for d in 1..=3 {
            let e = enumerate_upto(5, d).unwrap();
            for (pos, a) in e.indices.iter().enumerate() {
                assert_eq!(basis_below(a, false).len(), pos);
                assert_eq!(position(a), pos + 1);
            }
        }
    }

    #[test]
    fn tail_and_direction() {
        let a = mi(&[3, 1, 2]);
        assert_eq!(a.tail().unwrap(), mi(&[1, 2]));
        assert_eq!(a.direction().unwrap().coords(), &[0.5, 1.0 / 6.0, 1.0 / 3.0]);
        assert!(MultiIndex::zero(2).direction().is_none());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn sequence_sums_and_converges(raw in proptest::collection::vec(0.0f64..1.0, 1..5), j_max in 1u32..60) {
                let s: f64 = raw.iter().sum();
                prop_assume!(s > 1e-6);
                let theta = Direction::new(raw.iter().map(|x| x / s).collect()).unwrap();
                let d = theta.dim() as f64;
                for (j, a) in direction_sequence(&theta, j_max).iter().enumerate() {
                    let j = (j + 1) as u32;
                    prop_assert_eq!(a.degree(), j);
                    let err = a.exponents().iter().zip(theta.coords())
                        .map(|(&x, &t)| (x as f64 / j as f64 - t).abs())
                        .fold(0.0, f64::max);
                    prop_assert!(err <= d / j as f64 + 1e-12);
                }
            }
        }
    }
}
