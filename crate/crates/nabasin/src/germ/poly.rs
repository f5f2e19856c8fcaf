//! Sparse multivariate polynomials with complex coefficients, truncated to a
//! total degree. Coefficients that are exactly zero are never stored.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::index::MultiIndex;

/// Tolerance below which a coefficient is treated as zero by [`Polynomial::prune`].
pub const COEFF_ZERO_TOL: f64 = 1e-14;

/// A polynomial in `vars` complex variables with all stored monomials of
/// total degree <= `max_degree`. Keys are held in graded lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    vars: usize,
    max_degree: u32,
    terms: BTreeMap<MultiIndex, Complex64>,
}

impl Polynomial {
    pub fn zero(vars: usize, max_degree: u32) -> Self {
        Polynomial {
            vars,
            max_degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(vars: usize, index: MultiIndex, coeff: Complex64, max_degree: u32) -> Self {
        let mut p = Polynomial::zero(vars, max_degree);
        p.set_coeff(index, coeff);
        p
    }

    pub fn constant(vars: usize, value: Complex64, max_degree: u32) -> Self {
        Polynomial::monomial(vars, MultiIndex::zero(vars), value, max_degree)
    }

    /// Univariate polynomial from coefficients in ascending degree.
    pub fn univariate(coeffs: &[Complex64]) -> Self {
        let max_degree = coeffs.len().saturating_sub(1) as u32;
        let mut p = Polynomial::zero(1, max_degree);
        for (e, &c) in coeffs.iter().enumerate() {
            p.set_coeff(MultiIndex::new(vec![e as u32]), c);
        }
        p
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    /// Total degree of the stored terms (0 for the zero polynomial).
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &MultiIndex) -> Complex64 {
        self.terms
            .get(m)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn set_coeff(&mut self, m: MultiIndex, value: Complex64) {
        debug_assert_eq!(m.dim(), self.vars);
        debug_assert!(m.degree() <= self.max_degree);
        if value.re == 0.0 && value.im == 0.0 {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, value);
        }
    }

    pub fn add_to_coeff(&mut self, m: MultiIndex, delta: Complex64) {
        let v = self.coeff(&m) + delta;
        self.set_coeff(m, v);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn scale(&self, factor: Complex64) -> Polynomial {
        let mut out = Polynomial::zero(self.vars, self.max_degree);
        for (m, c) in &self.terms {
            out.set_coeff(m.clone(), c * factor);
        }
        out
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out.max_degree = self.max_degree.max(other.max_degree);
        for (m, c) in &other.terms {
            out.add_to_coeff(m.clone(), *c);
        }
        out
    }

    pub fn add_assign_scaled(&mut self, other: &Polynomial, factor: Complex64) {
        for (m, c) in &other.terms {
            if m.degree() <= self.max_degree {
                self.add_to_coeff(m.clone(), c * factor);
            }
        }
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out.max_degree = self.max_degree.max(other.max_degree);
        for (m, c) in &other.terms {
            out.add_to_coeff(m.clone(), -*c);
        }
        out
    }

    /// Product truncated to total degree `order`.
    pub fn mul_truncated(&self, other: &Polynomial, order: u32) -> Polynomial {
        debug_assert_eq!(self.vars, other.vars);
        let mut out = Polynomial::zero(self.vars, order);
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            if da > order {
                continue;
            }
            for (mb, cb) in &other.terms {
                if da + mb.degree() > order {
                    continue;
                }
                out.add_to_coeff(ma.add(mb), ca * cb);
            }
        }
        out
    }

    /// Drop all monomials of total degree > `order`.
    pub fn truncate(&self, order: u32) -> Polynomial {
        let mut out = Polynomial::zero(self.vars, order);
        for (m, c) in &self.terms {
            if m.degree() <= order {
                out.set_coeff(m.clone(), *c);
            }
        }
        out
    }

    /// Drop coefficients of magnitude <= `tol` (canonical zero-elision).
    pub fn prune(&self, tol: f64) -> Polynomial {
        let mut out = Polynomial::zero(self.vars, self.max_degree);
        for (m, c) in &self.terms {
            if c.norm() > tol {
                out.set_coeff(m.clone(), *c);
            }
        }
        out
    }

    pub fn eval(&self, point: &[Complex64]) -> Complex64 {
        debug_assert_eq!(point.len(), self.vars);
        // Cache powers of each variable up to the largest exponent used.
        let mut max_exp = vec![0u32; self.vars];
        for m in self.terms.keys() {
            for (i, &e) in m.exponents().iter().enumerate() {
                max_exp[i] = max_exp[i].max(e);
            }
        }
        let one = Complex64::new(1.0, 0.0);
        let powers: Vec<Vec<Complex64>> = point
            .iter()
            .zip(&max_exp)
            .map(|(&z, &top)| {
                let mut col = Vec::with_capacity(top as usize + 1);
                col.push(one);
                for e in 1..=top {
                    let prev = col[(e - 1) as usize];
                    col.push(prev * z);
                }
                col
            })
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = *c;
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t *= powers[i][e as usize];
                }
            }
            acc += t;
        }
        acc
    }

    /// Largest coefficient magnitude.
    pub fn max_coeff_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Max coefficient magnitude of the difference with `other`.
    pub fn coeff_distance(&self, other: &Polynomial) -> f64 {
        let mut worst = 0.0f64;
        for (m, c) in &self.terms {
            worst = worst.max((c - other.coeff(m)).norm());
        }
        for (m, c) in &other.terms {
            if !self.terms.contains_key(m) {
                worst = worst.max(c.norm());
            }
        }
        worst
    }

    /// Coefficient of the degree-1 monomial in variable `i`.
    pub fn linear_coeff(&self, i: usize) -> Complex64 {
        self.coeff(&MultiIndex::unit(self.vars, i))
    }

    /// Re-embed over `k` variables, inserting a zero exponent at coordinate
    /// `avoid` in every stored index.
    pub fn embed_avoiding(&self, avoid: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.vars + 1, self.max_degree);
        for (m, c) in &self.terms {
            out.set_coeff(m.embed_avoiding(avoid), *c);
        }
        out
    }
}
