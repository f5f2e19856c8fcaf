//! Small dense complex matrices: just enough linear algebra for linear parts
//! of germs (products, inverses, triangularity tests) and the unitary
//! triangularization used by sequence normalization.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    a: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            a: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "rows must form a square matrix");
        CMatrix {
            n,
            a: rows.into_iter().flatten().collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.a[i * self.n..(i + 1) * self.n]
    }

    pub fn diag(&self) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let s = self[(i, l)];
                if s.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += s * other[(l, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.n, v.len());
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(m, x)| m * x)
                    .sum::<Complex64>()
            })
            .collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_lower_triangular(&self, tol: f64) -> bool {
        let scale = 1.0 + self.max_abs();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self[(i, j)].norm() > tol * scale {
                    return false;
                }
            }
        }
        true
    }

    /// Gauss-Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Result<CMatrix> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = CMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&p, &q| {
                    a[(p, col)]
                        .norm()
                        .partial_cmp(&a[(q, col)].norm())
                        .unwrap()
                })
                .unwrap();
            if a[(pivot, col)].norm() < 1e-300 {
                return Err(Error::domain("singular linear part"));
            }
            if pivot != col {
                for j in 0..n {
                    a.a.swap(col * n + j, pivot * n + j);
                    inv.a.swap(col * n + j, pivot * n + j);
                }
            }
            let d = a[(col, col)];
            for j in 0..n {
                a[(col, j)] /= d;
                inv[(col, j)] /= d;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a[(i, col)];
                if f.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let t = a[(col, j)] * f;
                    a[(i, j)] -= t;
                    let t = inv[(col, j)] * f;
                    inv[(i, j)] -= t;
                }
            }
        }
        Ok(inv)
    }

    /// Householder QR; returns (Q, R) with Q unitary, R upper triangular and
    /// real nonnegative on the diagonal.
    pub fn qr(&self) -> (CMatrix, CMatrix) {
        let n = self.n;
        let mut r = self.clone();
        let mut q = CMatrix::identity(n);
        for col in 0..n {
            let norm_x: f64 = (col..n).map(|i| r[(i, col)].norm_sqr()).sum::<f64>().sqrt();
            if norm_x < 1e-300 {
                continue;
            }
            let x0 = r[(col, col)];
            let phase = if x0.norm() > 0.0 {
                x0 / x0.norm()
            } else {
                Complex64::new(1.0, 0.0)
            };
            let alpha = -phase * norm_x;
            let mut v: Vec<Complex64> = (col..n).map(|i| r[(i, col)]).collect();
            v[0] -= alpha;
            let vnorm_sqr: f64 = v.iter().map(|c| c.norm_sqr()).sum();
            if vnorm_sqr < 1e-300 {
                continue;
            }
            // r := (I - 2 v v*/|v|^2) r, and q accumulates the reflections.
            for j in 0..n {
                let dot: Complex64 = (0..n - col)
                    .map(|i| v[i].conj() * r[(col + i, j)])
                    .sum();
                let f = dot * 2.0 / vnorm_sqr;
                for i in 0..n - col {
                    let t = f * v[i];
                    r[(col + i, j)] -= t;
                }
            }
            for j in 0..n {
                let dot: Complex64 = (0..n - col)
                    .map(|i| v[i].conj() * q[(col + i, j)])
                    .sum();
                let f = dot * 2.0 / vnorm_sqr;
                for i in 0..n - col {
                    let t = f * v[i];
                    q[(col + i, j)] -= t;
                }
            }
        }
        // q currently holds Q^*; fix diagonal phases so R has nonnegative reals.
        for i in 0..n {
            let d = r[(i, i)];
            if d.norm() > 0.0 {
                let phase = d / d.norm();
                let inv_phase = phase.conj();
                for j in 0..n {
                    r[(i, j)] *= inv_phase;
                    q[(i, j)] *= inv_phase;
                }
            }
        }
        (q.adjoint(), r)
    }

    /// Factor `self = Q L` with Q unitary and L lower triangular with real
    /// nonnegative diagonal. QR is applied to the exchange-conjugated matrix
    /// and mapped back.
    pub fn ql(&self) -> (CMatrix, CMatrix) {
        let flipped = self.exchange_conjugate();
        let (q, r) = flipped.qr();
        (q.exchange_conjugate(), r.exchange_conjugate())
    }

    /// J M J with J the exchange (anti-identity) permutation.
    fn exchange_conjugate(&self) -> CMatrix {
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = self[(n - 1 - i, n - 1 - j)];
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.a[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.a[i * self.n + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inverse_roundtrip() {
        let m = CMatrix::from_rows(vec![
            vec![c(1.0, 0.5), c(0.0, 0.0), c(0.2, 0.0)],
            vec![c(0.3, -0.1), c(2.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.7), c(0.1, 0.1), c(-1.5, 0.2)],
        ]);
        let inv = m.inverse().unwrap();
        let prod = m.mul(&inv);
        let id = CMatrix::identity(3);
        for i in 0..3 {
            for j in 0..3 {
                assert!((prod[(i, j)] - id[(i, j)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn qr_reconstructs_and_is_unitary() {
        let m = CMatrix::from_rows(vec![
            vec![c(0.3, 0.2), c(-0.4, 0.0)],
            vec![c(0.1, -0.7), c(0.5, 0.5)],
        ]);
        let (q, r) = m.qr();
        let prod = q.mul(&r);
        for i in 0..2 {
            for j in 0..2 {
                assert!((prod[(i, j)] - m[(i, j)]).norm() < 1e-12);
                if j < i {
                    assert!(r[(i, j)].norm() < 1e-12);
                }
            }
        }
        let qtq = q.adjoint().mul(&q);
        let id = CMatrix::identity(2);
        for i in 0..2 {
            for j in 0..2 {
                assert!((qtq[(i, j)] - id[(i, j)]).norm() < 1e-12);
            }
        }
        assert!(r[(0, 0)].im.abs() < 1e-14 && r[(0, 0)].re >= 0.0);
    }

    #[test]
    fn ql_gives_lower_triangular_factor() {
        let m = CMatrix::from_rows(vec![
            vec![c(0.3, 0.2), c(-0.4, 0.0), c(0.05, 0.0)],
            vec![c(0.1, -0.7), c(0.5, 0.5), c(0.0, 0.1)],
            vec![c(0.2, 0.0), c(0.0, -0.3), c(0.6, 0.0)],
        ]);
        let (q, l) = m.ql();
        let prod = q.mul(&l);
        for i in 0..3 {
            for j in 0..3 {
                assert!((prod[(i, j)] - m[(i, j)]).norm() < 1e-12);
                if j > i {
                    assert!(l[(i, j)].norm() < 1e-12);
                }
            }
        }
        let qtq = q.adjoint().mul(&q);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((qtq[(i, j)] - c(expect, 0.0)).norm() < 1e-12);
            }
        }
    }
}
