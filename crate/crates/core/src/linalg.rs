//! Small dense kernels: complex LU determinants and real inversion.

use num_complex::Complex64;

/// `log |det A|` for a row-major `n x n` complex matrix, by LU with partial
/// pivoting. Returns `-inf` for a singular matrix.
pub(crate) fn complex_log_abs_det(mut a: Vec<Complex64>, n: usize) -> f64 {
    let mut acc = 0.0;
    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|i| (i, a[i * n + k].norm()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmax == 0.0 || !pmax.is_finite() {
            return f64::NEG_INFINITY;
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
        }
        let piv = a[k * n + k];
        acc += pmax.ln();
        for i in k + 1..n {
            let f = a[i * n + k] / piv;
            if f.norm() == 0.0 {
                continue;
            }
            for j in k + 1..n {
                let t = a[k * n + j];
                a[i * n + j] -= f * t;
            }
        }
    }
    acc
}

/// Inverse of a row-major real `n x n` matrix by Gauss-Jordan elimination
/// with partial pivoting; `None` when a pivot falls below `tol` times the
/// largest entry of its column.
pub(crate) fn invert(a: &[f64], n: usize, tol: f64) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    let scale = a.iter().fold(0.0f64, |s, x| s.max(x.abs())).max(f64::MIN_POSITIVE);
    for k in 0..n {
        let mut p = k;
        for i in k + 1..n {
            if m[i * n + k].abs() > m[p * n + k].abs() {
                p = i;
            }
        }
        if m[p * n + k].abs() <= tol * scale {
            return None;
        }
        if p != k {
            for j in 0..n {
                m.swap(k * n + j, p * n + j);
                inv.swap(k * n + j, p * n + j);
            }
        }
        let piv = m[k * n + k];
        for j in 0..n {
            m[k * n + j] /= piv;
            inv[k * n + j] /= piv;
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = m[i * n + k];
            if f == 0.0 {
                continue;
            }
            for j in 0..n {
                m[i * n + j] -= f * m[k * n + j];
                inv[i * n + j] -= f * inv[k * n + j];
            }
        }
    }
    Some(inv)
}

/// LU factorization with partial pivoting of a row-major complex matrix.
pub(crate) struct ComplexLu {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
}

impl ComplexLu {
    /// `None` for a singular matrix.
    pub(crate) fn new(mut a: Vec<Complex64>, n: usize) -> Option<Self> {
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, a[i * n + k].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax == 0.0 || !pmax.is_finite() {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let piv = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / piv;
                a[i * n + k] = f;
                for j in k + 1..n {
                    let t = a[k * n + j];
                    a[i * n + j] -= f * t;
                }
            }
        }
        Some(Self { n, lu: a, perm })
    }

    /// Solve `A x = b`.
    pub(crate) fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let t = self.lu[i * n + j] * x[j];
                x[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = self.lu[i * n + j] * x[j];
                x[i] -= t;
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_of_triangular_and_singular() {
        let c = |x: f64| Complex64::new(x, 0.0);
        let a = vec![c(2.0), c(5.0), c(0.0), c(3.0)];
        assert!((complex_log_abs_det(a, 2) - 6f64.ln()).abs() < 1e-15);
        let s = vec![c(1.0), c(2.0), c(2.0), c(4.0)];
        assert_eq!(complex_log_abs_det(s, 2), f64::NEG_INFINITY);
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let a = [4.0, 1.0, 0.5, 1.0, 3.0, -1.0, 0.0, 2.0, 5.0];
        let inv = invert(&a, 3, 1e-14).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| a[i * 3 + k] * inv[k * 3 + j]).sum();
                assert!((s - f64::from(i == j)).abs() < 1e-14);
            }
        }
        assert!(invert(&[1.0, 2.0, 2.0, 4.0], 2, 1e-14).is_none());
    }

    #[test]
    fn complex_solve_residual() {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let a = vec![c(0.0, 1.0), c(2.0, 0.0), c(1.0, -1.0), c(3.0, 0.5), c(0.0, 0.0), c(1.0, 1.0), c(0.5, 0.0), c(-1.0, 2.0), c(2.0, 0.0)];
        let b = vec![c(1.0, 0.0), c(0.0, -1.0), c(2.0, 2.0)];
        let x = ComplexLu::new(a.clone(), 3).unwrap().solve(&b);
        for i in 0..3 {
            let s: Complex64 = (0..3).map(|k| a[i * 3 + k] * x[k]).sum();
            assert!((s - b[i]).norm() < 1e-13);
        }
        assert!(ComplexLu::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)], 2).is_none());
    }
}
