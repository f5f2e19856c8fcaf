//! Truncated polynomial self-maps of C^k: composition, degree-by-degree
//! inversion, truncation and linear-part extraction.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::index::MultiIndex;
use super::poly::Polynomial;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// A self-map of C^k stored through its Taylor coefficients at the origin up
/// to total degree `order`.
#[derive(Debug, Clone, PartialEq)]
pub struct GermMap {
    k: usize,
    order: u32,
    components: Vec<Polynomial>,
}

impl GermMap {
    pub fn new(k: usize, order: u32, components: Vec<Polynomial>) -> Result<Self> {
        if components.len() != k {
            return Err(Error::parameter(format!(
                "expected {k} components, got {}",
                components.len()
            )));
        }
        if components.iter().any(|p| p.vars() != k) {
            return Err(Error::parameter("component variable count must equal k"));
        }
        let components = components.into_iter().map(|p| p.truncate(order)).collect();
        Ok(GermMap {
            k,
            order,
            components,
        })
    }

    pub fn identity(k: usize, order: u32) -> Self {
        let components = (0..k)
            .map(|i| {
                Polynomial::monomial(k, MultiIndex::unit(k, i), Complex64::new(1.0, 0.0), order)
            })
            .collect();
        GermMap {
            k,
            order,
            components,
        }
    }

    pub fn from_linear(matrix: &CMatrix, order: u32) -> Self {
        let k = matrix.n();
        let components = (0..k)
            .map(|i| {
                let mut p = Polynomial::zero(k, order);
                for j in 0..k {
                    p.set_coeff(MultiIndex::unit(k, j), matrix[(i, j)]);
                }
                p
            })
            .collect();
        GermMap {
            k,
            order,
            components,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn component(&self, i: usize) -> &Polynomial {
        &self.components[i]
    }

    pub fn set_component(&mut self, i: usize, p: Polynomial) {
        debug_assert_eq!(p.vars(), self.k);
        self.components[i] = p.truncate(self.order);
    }

    pub fn fixes_origin(&self) -> bool {
        let zero = MultiIndex::zero(self.k);
        self.components.iter().all(|p| p.coeff(&zero).norm() == 0.0)
    }

    pub fn linear_part(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.k);
        for i in 0..self.k {
            for j in 0..self.k {
                m[(i, j)] = self.components[i].linear_coeff(j);
            }
        }
        m
    }

    /// Drop all monomials of total degree > `order` in every component.
    pub fn truncate(&self, order: u32) -> GermMap {
        GermMap {
            k: self.k,
            order,
            components: self.components.iter().map(|p| p.truncate(order)).collect(),
        }
    }

    /// Canonical zero-elision of near-zero coefficients.
    pub fn prune(&self, tol: f64) -> GermMap {
        GermMap {
            k: self.k,
            order: self.order,
            components: self.components.iter().map(|p| p.prune(tol)).collect(),
        }
    }

    pub fn eval(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.components.iter().map(|p| p.eval(z)).collect()
    }

    /// Truncated composition `[self ∘ inner]_order`. The inner map must fix
    /// the origin so that every truncated coefficient is exact.
    pub fn compose_truncated(&self, inner: &GermMap, order: u32) -> Result<GermMap> {
        if self.k != inner.k {
            return Err(Error::parameter("composition dimension mismatch"));
        }
        if !inner.fixes_origin() {
            return Err(Error::domain(
                "inner map of a truncated composition must fix the origin",
            ));
        }
        // Cache truncated powers of the inner components on demand.
        let mut powers: Vec<Vec<Polynomial>> = inner
            .components
            .iter()
            .map(|p| vec![Polynomial::constant(self.k, Complex64::new(1.0, 0.0), order), p.truncate(order)])
            .collect();
        let mut components = Vec::with_capacity(self.k);
        for comp in &self.components {
            let mut out = Polynomial::zero(self.k, order);
            for (m, c) in comp.iter() {
                if m.degree() > order {
                    continue;
                }
                let mut term = Polynomial::constant(self.k, *c, order);
                for (var, &e) in m.exponents().iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    while powers[var].len() <= e as usize {
                        let next = powers[var]
                            .last()
                            .unwrap()
                            .mul_truncated(&powers[var][1], order);
                        powers[var].push(next);
                    }
                    term = term.mul_truncated(&powers[var][e as usize], order);
                }
                out = out.add(&term);
            }
            components.push(out);
        }
        Ok(GermMap {
            k: self.k,
            order,
            components,
        })
    }

    /// Two-sided truncated inverse computed degree by degree: at each step the
    /// current inverse candidate is corrected by the linearized defect, which
    /// is exact at the truncation order.
    pub fn invert(&self, order: u32) -> Result<GermMap> {
        if !self.fixes_origin() {
            return Err(Error::domain("germ inversion requires a fixed origin"));
        }
        let linear = self.linear_part();
        let linear_inv = linear
            .inverse()
            .map_err(|_| Error::domain("germ inversion requires an invertible linear part"))?;
        let mut inv = GermMap::from_linear(&linear_inv, order);
        let truncated = self.truncate(order);
        for d in 2..=order {
            let defect = truncated.compose_truncated(&inv, d)?;
            // defect = id + E with E homogeneous of degree d; subtract L^{-1} E.
            let id = GermMap::identity(self.k, d);
            for i in 0..self.k {
                let e_i = defect.components[i].sub(id.component(i));
                if e_i.is_zero() {
                    continue;
                }
                for j in 0..self.k {
                    let corr = e_i.scale(linear_inv[(j, i)]);
                    let mut comp = inv.components[j].clone();
                    comp.add_assign_scaled(&corr, Complex64::new(-1.0, 0.0));
                    inv.components[j] = comp;
                }
            }
        }
        Ok(inv)
    }

    /// Largest coefficient-wise difference across components.
    pub fn coeff_distance(&self, other: &GermMap) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.coeff_distance(b))
            .fold(0.0, f64::max)
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.components
            .iter()
            .map(|p| p.max_coeff_norm())
            .fold(0.0, f64::max)
    }
}

/// JSON shape of one monomial term.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermJson {
    pub exponents: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

/// JSON shape of a germ map: `{k, order, components: [[term, ...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GermMapJson {
    pub k: usize,
    pub order: u32,
    pub components: Vec<Vec<TermJson>>,
}

impl From<&GermMap> for GermMapJson {
    fn from(g: &GermMap) -> Self {
        GermMapJson {
            k: g.k,
            order: g.order,
            components: g
                .components
                .iter()
                .map(|p| {
                    p.iter()
                        .map(|(m, c)| TermJson {
                            exponents: m.exponents().to_vec(),
                            re: c.re,
                            im: c.im,
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

impl TryFrom<&GermMapJson> for GermMap {
    type Error = Error;

    fn try_from(j: &GermMapJson) -> Result<GermMap> {
        let components = j
            .components
            .iter()
            .map(|terms| {
                let mut p = Polynomial::zero(j.k, j.order);
                for t in terms {
                    if t.exponents.len() != j.k {
                        return Err(Error::parameter(
                            "term exponent tuple length must equal k",
                        ));
                    }
                    p.add_to_coeff(
                        MultiIndex::new(t.exponents.clone()),
                        Complex64::new(t.re, t.im),
                    );
                }
                Ok(p)
            })
            .collect::<Result<Vec<_>>>()?;
        GermMap::new(j.k, j.order, components)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    /// (x + y^2, y) as a germ over C^2.
    fn shear(order: u32) -> GermMap {
        let mut g = GermMap::identity(2, order);
        let mut p0 = g.component(0).clone();
        p0.set_coeff(mi(&[0, 2]), c(1.0, 0.0));
        g.set_component(0, p0);
        g
    }

    #[test]
    fn truncate_drops_high_degree_terms() {
        // (x + y^3, y) truncated to order 2 is the identity.
        let mut g = GermMap::identity(2, 3);
        let mut p0 = g.component(0).clone();
        p0.set_coeff(mi(&[0, 3]), c(1.0, 0.0));
        g.set_component(0, p0);
        assert_eq!(g.truncate(2), GermMap::identity(2, 2));

        // (x + x y + x^2 y, y) truncated to 2 keeps only x + x y.
        let mut g = GermMap::identity(2, 3);
        let mut p0 = g.component(0).clone();
        p0.set_coeff(mi(&[1, 1]), c(1.0, 0.0));
        p0.set_coeff(mi(&[2, 1]), c(1.0, 0.0));
        g.set_component(0, p0);
        let t = g.truncate(2);
        assert_eq!(t.component(0).coeff(&mi(&[1, 1])), c(1.0, 0.0));
        assert_eq!(t.component(0).coeff(&mi(&[2, 1])), c(0.0, 0.0));
    }

    #[test]
    fn compose_with_identity() {
        let g = shear(3);
        let id = GermMap::identity(2, 3);
        assert_eq!(id.compose_truncated(&g, 3).unwrap(), g);
        assert_eq!(g.compose_truncated(&id, 3).unwrap(), g);
    }

    #[test]
    fn compose_truncates_cross_terms() {
        // f = (x + y^2, y), g = (x, y + x^2); [f ∘ g]_2 = (x + y^2, y + x^2):
        // the cross term 2 x^2 y has degree 3 and is dropped.
        let f = shear(2);
        let mut g = GermMap::identity(2, 2);
        let mut p1 = g.component(1).clone();
        p1.set_coeff(mi(&[2, 0]), c(1.0, 0.0));
        g.set_component(1, p1);
        let comp = f.compose_truncated(&g, 2).unwrap();
        assert_eq!(comp.component(0).coeff(&mi(&[1, 0])), c(1.0, 0.0));
        assert_eq!(comp.component(0).coeff(&mi(&[0, 2])), c(1.0, 0.0));
        assert_eq!(comp.component(1).coeff(&mi(&[0, 1])), c(1.0, 0.0));
        assert_eq!(comp.component(1).coeff(&mi(&[2, 0])), c(1.0, 0.0));
        assert_eq!(comp.component(0).num_terms(), 2);
    }

    #[test]
    fn linear_composition_is_matrix_product() {
        let a = CMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(0.0, 1.0), c(1.0, -1.0)],
        ]);
        let b = CMatrix::from_rows(vec![
            vec![c(0.5, 0.0), c(0.0, 0.0)],
            vec![c(1.0, 1.0), c(2.0, 0.0)],
        ]);
        let ga = GermMap::from_linear(&a, 3);
        let gb = GermMap::from_linear(&b, 3);
        let comp = ga.compose_truncated(&gb, 3).unwrap();
        let prod = a.mul(&b);
        for i in 0..2 {
            for j in 0..2 {
                assert!((comp.linear_part()[(i, j)] - prod[(i, j)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn compose_rejects_constant_term() {
        let f = GermMap::identity(2, 2);
        let mut g = GermMap::identity(2, 2);
        let mut p0 = g.component(0).clone();
        p0.set_coeff(mi(&[0, 0]), c(1.0, 0.0));
        g.set_component(0, p0);
        assert!(f.compose_truncated(&g, 2).is_err());
    }

    #[test]
    fn invert_shear_exactly() {
        let g = shear(2);
        let inv = g.invert(2).unwrap();
        // Exact inverse of (x + y^2, y) at order 2 is (x - y^2, y).
        assert!((inv.component(0).coeff(&mi(&[0, 2])) - c(-1.0, 0.0)).norm() < 1e-14);
        let round = g.compose_truncated(&inv, 2).unwrap();
        assert!(round.coeff_distance(&GermMap::identity(2, 2)) < 1e-12);
    }

    #[test]
    fn invert_identity_and_linear() {
        assert_eq!(
            GermMap::identity(3, 4).invert(4).unwrap(),
            GermMap::identity(3, 4)
        );
        let a = CMatrix::from_rows(vec![
            vec![c(0.5, 0.1), c(0.0, 0.0)],
            vec![c(0.2, 0.0), c(0.4, -0.3)],
        ]);
        let inv = GermMap::from_linear(&a, 3).invert(3).unwrap();
        let expect = a.inverse().unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((inv.linear_part()[(i, j)] - expect[(i, j)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn invert_rejects_singular_linear_part() {
        let mut g = GermMap::identity(2, 2);
        g.set_component(0, Polynomial::zero(2, 2));
        assert!(g.invert(2).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let g = shear(3);
        let json = GermMapJson::from(&g);
        let text = serde_json::to_string(&json).unwrap();
        let parsed: GermMapJson = serde_json::from_str(&text).unwrap();
        let back = GermMap::try_from(&parsed).unwrap();
        assert_eq!(back, g);
    }
}
