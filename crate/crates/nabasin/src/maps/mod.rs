//! The polynomial automorphism classes targeted by the conjugation solvers:
//! generalized Hénon maps, elementary (triangular) maps, weak shift-like maps
//! and their high-degree perturbations, plus linear maps, explicit germ pairs
//! and finite compositions. All classes evaluate forward and, where a closed
//! form exists, backward, and extract truncated germs of both directions.

pub mod factor;
pub mod sequence;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::germ::{GermMap, MultiIndex, Polynomial};
use crate::linalg::CMatrix;

pub use factor::{henon_factorize_k2, henon_product_k2, inversion_map, shift_factorize};
pub use sequence::{
    block_compose, estimate_attraction_bounds, lower_triangular_normalize,
    normalization_orbit_defect, periodic_restriction, perturb, random_triangular_germs,
    random_weak_shifts, AttractionBounds, AutoSequence, BoundsEstimate,
};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Evaluation direction for [`evaluate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Generalized Hénon map `(x, y) -> (y, delta x + P(y))` with `delta != 0`
/// and `deg P >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct HenonMap {
    pub delta: Complex64,
    pub p: Polynomial,
}

impl HenonMap {
    pub fn new(delta: Complex64, p: Polynomial) -> Result<Self> {
        if delta.norm() == 0.0 {
            return Err(Error::parameter("Hénon coefficient delta must be nonzero"));
        }
        if p.vars() != 1 {
            return Err(Error::parameter("Hénon P must be univariate"));
        }
        if p.degree() < 2 {
            return Err(Error::parameter("Hénon P must have degree >= 2"));
        }
        Ok(HenonMap { delta, p })
    }

    pub fn degree(&self) -> u32 {
        self.p.degree()
    }

    fn eval(&self, z: &[Complex64]) -> Vec<Complex64> {
        vec![z[1], self.delta * z[0] + self.p.eval(&z[1..2])]
    }

    fn eval_inverse(&self, z: &[Complex64]) -> Vec<Complex64> {
        vec![(z[1] - self.p.eval(&z[0..1])) / self.delta, z[0]]
    }

    fn germ(&self, order: u32) -> GermMap {
        let mut first = Polynomial::zero(2, order);
        first.set_coeff(MultiIndex::new(vec![0, 1]), ONE);
        let mut second = Polynomial::zero(2, order);
        second.set_coeff(MultiIndex::new(vec![1, 0]), self.delta);
        for (m, c) in self.p.iter() {
            let e = m.get(0);
            if e <= order {
                second.add_to_coeff(MultiIndex::new(vec![0, e]), *c);
            }
        }
        GermMap::new(2, order, vec![first, second]).expect("henon germ")
    }
}

/// Elementary (triangular) map: coordinate `target` becomes
/// `a * z_target + P(other coordinates)`; everything else is unchanged.
/// `P` is a polynomial in the k-1 remaining variables, listed in coordinate
/// order with `target` removed.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementaryMap {
    pub k: usize,
    pub target: usize,
    pub a: Complex64,
    pub p: Polynomial,
}

impl ElementaryMap {
    pub fn new(k: usize, target: usize, a: Complex64, p: Polynomial) -> Result<Self> {
        if target >= k {
            return Err(Error::parameter("target coordinate out of range"));
        }
        if a.norm() == 0.0 {
            return Err(Error::parameter("triangular coefficient must be nonzero"));
        }
        if p.vars() != k - 1 {
            return Err(Error::parameter(
                "triangular modification must not involve the target coordinate",
            ));
        }
        Ok(ElementaryMap { k, target, a, p })
    }

    fn others(&self, z: &[Complex64]) -> Vec<Complex64> {
        let mut v = Vec::with_capacity(self.k - 1);
        for (i, &w) in z.iter().enumerate() {
            if i != self.target {
                v.push(w);
            }
        }
        v
    }

    fn eval(&self, z: &[Complex64]) -> Vec<Complex64> {
        let mut out = z.to_vec();
        out[self.target] = self.a * z[self.target] + self.p.eval(&self.others(z));
        out
    }

    fn eval_inverse(&self, z: &[Complex64]) -> Vec<Complex64> {
        let mut out = z.to_vec();
        out[self.target] = (z[self.target] - self.p.eval(&self.others(z))) / self.a;
        out
    }

    fn germ(&self, order: u32) -> GermMap {
        let mut g = GermMap::identity(self.k, order);
        let mut comp = Polynomial::zero(self.k, order);
        comp.set_coeff(MultiIndex::unit(self.k, self.target), self.a);
        comp.add_assign_scaled(&self.p.embed_avoiding(self.target), ONE);
        g.set_component(self.target, comp);
        g
    }

    fn inverse_germ(&self, order: u32) -> GermMap {
        let mut g = GermMap::identity(self.k, order);
        let mut comp = Polynomial::zero(self.k, order);
        comp.set_coeff(MultiIndex::unit(self.k, self.target), ONE / self.a);
        comp.add_assign_scaled(&self.p.embed_avoiding(self.target), -ONE / self.a);
        g.set_component(self.target, comp);
        g
    }
}

/// Weak shift-like map `(z_1, ..., z_k) -> (z_2, ..., z_k, a z_1 + p(z_2, ..., z_k))`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakShift {
    pub k: usize,
    pub a: Complex64,
    pub p: Polynomial,
    /// Declared family degree of `a z_1 + p`.
    pub family_degree: u32,
}

impl WeakShift {
    pub fn new(k: usize, a: Complex64, p: Polynomial, family_degree: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::parameter("weak shifts need k >= 2"));
        }
        if a.norm() == 0.0 {
            return Err(Error::parameter("weak shift coefficient must be nonzero"));
        }
        if p.vars() != k - 1 {
            return Err(Error::parameter(
                "weak shift modification takes the last k-1 coordinates",
            ));
        }
        if family_degree < 1 || p.degree().max(1) > family_degree {
            return Err(Error::parameter(format!(
                "weak shift degree {} exceeds the declared family degree {family_degree}",
                p.degree().max(1)
            )));
        }
        Ok(WeakShift {
            k,
            a,
            p,
            family_degree,
        })
    }

    fn eval(&self, z: &[Complex64]) -> Vec<Complex64> {
        let mut out = z[1..].to_vec();
        out.push(self.a * z[0] + self.p.eval(&z[1..]));
        out
    }

    fn eval_inverse(&self, z: &[Complex64]) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.k);
        out.push((z[self.k - 1] - self.p.eval(&z[..self.k - 1])) / self.a);
        out.extend_from_slice(&z[..self.k - 1]);
        out
    }

    fn germ(&self, order: u32) -> GermMap {
        let k = self.k;
        let mut components = Vec::with_capacity(k);
        for i in 1..k {
            components.push(Polynomial::monomial(
                k,
                MultiIndex::unit(k, i),
                ONE,
                order,
            ));
        }
        let mut last = Polynomial::zero(k, order);
        last.set_coeff(MultiIndex::unit(k, 0), self.a);
        last.add_assign_scaled(&self.p.embed_avoiding(0), ONE);
        components.push(last);
        GermMap::new(k, order, components).expect("weak shift germ")
    }
}

/// Weak shift plus the dominating monomials of degrees d-1 and d:
/// coordinate k-1 gains `z_2^{d-1}` and coordinate k gains `sum z_i^d`
/// over the shifted coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedWeakShift {
    pub base: WeakShift,
    pub degree: u32,
}

impl PerturbedWeakShift {
    pub fn new(base: WeakShift, degree: u32) -> Result<Self> {
        if base.k < 3 {
            return Err(Error::parameter("perturbed weak shifts need k >= 3"));
        }
        if degree < base.family_degree + 2 {
            return Err(Error::parameter(format!(
                "perturbation degree {degree} must be >= family degree {} + 2",
                base.family_degree
            )));
        }
        Ok(PerturbedWeakShift { base, degree })
    }

    pub fn k(&self) -> usize {
        self.base.k
    }

    fn eval(&self, z: &[Complex64]) -> Vec<Complex64> {
        let k = self.base.k;
        let d = self.degree;
        let mut out = self.base.eval(z);
        out[k - 2] += z[1].powu(d - 1);
        out[k - 1] += z[1..].iter().map(|w| w.powu(d)).sum::<Complex64>();
        out
    }

    fn eval_inverse(&self, z: &[Complex64]) -> Vec<Complex64> {
        let k = self.base.k;
        let d = self.degree;
        // Undo the shift: the preimage coordinates 2..k are read off directly,
        // then the first coordinate is solved from the last component.
        let mut pre = Vec::with_capacity(k - 1);
        pre.extend_from_slice(&z[..k - 2]);
        pre.push(z[k - 2] - z[0].powu(d - 1));
        let tail = z[k - 1]
            - self.base.p.eval(&pre)
            - pre.iter().map(|w| w.powu(d)).sum::<Complex64>();
        let mut out = Vec::with_capacity(k);
        out.push(tail / self.base.a);
        out.extend(pre);
        out
    }

    fn germ(&self, order: u32) -> GermMap {
        let k = self.base.k;
        let d = self.degree;
        let mut g = self.base.germ(order);
        if d - 1 <= order {
            let mut comp = g.component(k - 2).clone();
            let mut e = vec![0u32; k];
            e[1] = d - 1;
            comp.add_to_coeff(MultiIndex::new(e), ONE);
            g.set_component(k - 2, comp);
        }
        if d <= order {
            let mut comp = g.component(k - 1).clone();
            for i in 1..k {
                let mut e = vec![0u32; k];
                e[i] = d;
                comp.add_to_coeff(MultiIndex::new(e), ONE);
            }
            g.set_component(k - 1, comp);
        }
        g
    }
}

/// Invertible linear map of C^k.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    pub matrix: CMatrix,
    inverse: CMatrix,
}

impl LinearMap {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let inverse = matrix.inverse()?;
        Ok(LinearMap { matrix, inverse })
    }

    pub fn diagonal(entries: &[Complex64]) -> Result<Self> {
        let mut m = CMatrix::zeros(entries.len());
        for (i, &d) in entries.iter().enumerate() {
            m[(i, i)] = d;
        }
        LinearMap::new(m)
    }
}

/// Any of the supported automorphism classes, a stored germ pair, or a finite
/// composition. `Composite` applies its members in listed order (the first
/// element acts first).
#[derive(Debug, Clone)]
pub enum PolyMap {
    Henon(HenonMap),
    Elementary(ElementaryMap),
    Shift(WeakShift),
    Perturbed(PerturbedWeakShift),
    Linear(LinearMap),
    Germ {
        forward: GermMap,
        inverse: Option<GermMap>,
    },
    Composite(Vec<PolyMap>),
}

impl PolyMap {
    pub fn dim(&self) -> usize {
        match self {
            PolyMap::Henon(_) => 2,
            PolyMap::Elementary(m) => m.k,
            PolyMap::Shift(m) => m.k,
            PolyMap::Perturbed(m) => m.k(),
            PolyMap::Linear(m) => m.matrix.n(),
            PolyMap::Germ { forward, .. } => forward.k(),
            PolyMap::Composite(maps) => maps[0].dim(),
        }
    }

    pub fn evaluate(&self, z: &[Complex64]) -> Vec<Complex64> {
        match self {
            PolyMap::Henon(m) => m.eval(z),
            PolyMap::Elementary(m) => m.eval(z),
            PolyMap::Shift(m) => m.eval(z),
            PolyMap::Perturbed(m) => m.eval(z),
            PolyMap::Linear(m) => m.matrix.mul_vec(z),
            PolyMap::Germ { forward, .. } => forward.eval(z),
            PolyMap::Composite(maps) => {
                let mut w = z.to_vec();
                for m in maps {
                    w = m.evaluate(&w);
                }
                w
            }
        }
    }

    pub fn evaluate_inverse(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        match self {
            PolyMap::Henon(m) => Ok(m.eval_inverse(z)),
            PolyMap::Elementary(m) => Ok(m.eval_inverse(z)),
            PolyMap::Shift(m) => Ok(m.eval_inverse(z)),
            PolyMap::Perturbed(m) => Ok(m.eval_inverse(z)),
            PolyMap::Linear(m) => Ok(m.inverse.mul_vec(z)),
            PolyMap::Germ { inverse, .. } => inverse
                .as_ref()
                .map(|g| g.eval(z))
                .ok_or_else(|| Error::UnsupportedDirection("germ map without inverse data".into())),
            PolyMap::Composite(maps) => {
                let mut w = z.to_vec();
                for m in maps.iter().rev() {
                    w = m.evaluate_inverse(&w)?;
                }
                Ok(w)
            }
        }
    }

    pub fn germ(&self, order: u32) -> GermMap {
        match self {
            PolyMap::Henon(m) => m.germ(order),
            PolyMap::Elementary(m) => m.germ(order),
            PolyMap::Shift(m) => m.germ(order),
            PolyMap::Perturbed(m) => m.germ(order),
            PolyMap::Linear(m) => GermMap::from_linear(&m.matrix, order),
            PolyMap::Germ { forward, .. } => forward.truncate(order),
            PolyMap::Composite(maps) => {
                let mut g = maps[0].germ(order);
                for m in &maps[1..] {
                    g = m
                        .germ(order)
                        .compose_truncated(&g, order)
                        .expect("composite members fix the origin");
                }
                g
            }
        }
    }

    /// Truncated germ of the inverse: the registered closed form when the
    /// class has one, otherwise degree-by-degree inversion of the forward
    /// germ.
    pub fn inverse_germ(&self, order: u32) -> Result<GermMap> {
        match self {
            PolyMap::Elementary(m) => Ok(m.inverse_germ(order)),
            PolyMap::Linear(m) => Ok(GermMap::from_linear(&m.inverse, order)),
            PolyMap::Germ { forward, inverse } => match inverse {
                Some(g) => Ok(g.truncate(order)),
                None => forward.invert(order),
            },
            PolyMap::Composite(maps) => {
                let mut g: Option<GermMap> = None;
                for m in maps.iter().rev() {
                    let gi = m.inverse_germ(order)?;
                    g = Some(match g {
                        None => gi,
                        Some(acc) => gi.compose_truncated(&acc, order)?,
                    });
                }
                g.ok_or_else(|| Error::parameter("empty composite"))
            }
            _ => self.germ(order).invert(order),
        }
    }

    pub fn linear_part(&self) -> CMatrix {
        match self {
            PolyMap::Linear(m) => m.matrix.clone(),
            PolyMap::Composite(maps) => {
                let mut acc = CMatrix::identity(self.dim());
                for m in maps {
                    acc = m.linear_part().mul(&acc);
                }
                acc
            }
            _ => self.germ(1).linear_part(),
        }
    }
}

/// Evaluate a map in the requested direction.
pub fn evaluate(map: &PolyMap, z: &[Complex64], direction: Direction) -> Result<Vec<Complex64>> {
    match direction {
        Direction::Forward => Ok(map.evaluate(z)),
        Direction::Inverse => map.evaluate_inverse(z),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    fn henon_x_plus_y2() -> PolyMap {
        // (x, y) -> (y, x + y^2)
        let p = Polynomial::univariate(&[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        PolyMap::Henon(HenonMap::new(ONE, p).unwrap())
    }

    #[test]
    fn henon_hand_evaluation() {
        let h = henon_x_plus_y2();
        let z1 = h.evaluate(&[c(1.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(z1, vec![c(1.0, 0.0), c(2.0, 0.0)]);
        let z2 = h.evaluate(&z1);
        assert_eq!(z2, vec![c(2.0, 0.0), c(5.0, 0.0)]);
    }

    #[test]
    fn elementary_direct_substitution() {
        // T^1 with a = 2, P(y, z) = y z at (1, 1, 1) gives (3, 1, 1).
        let mut p = Polynomial::zero(2, 2);
        p.set_coeff(mi(&[1, 1]), ONE);
        let t = PolyMap::Elementary(ElementaryMap::new(3, 0, c(2.0, 0.0), p).unwrap());
        let w = t.evaluate(&[ONE, ONE, ONE]);
        assert_eq!(w, vec![c(3.0, 0.0), ONE, ONE]);
    }

    #[test]
    fn origin_is_fixed_for_origin_fixing_classes() {
        let zero3 = vec![Complex64::new(0.0, 0.0); 3];
        let mut p = Polynomial::zero(2, 2);
        p.set_coeff(mi(&[0, 2]), ONE);
        let shift = PolyMap::Shift(WeakShift::new(3, c(0.5, 0.0), p.clone(), 2).unwrap());
        assert_eq!(shift.evaluate(&zero3), zero3);
        let pert = PolyMap::Perturbed(
            PerturbedWeakShift::new(WeakShift::new(3, c(0.5, 0.0), p, 2).unwrap(), 4).unwrap(),
        );
        assert_eq!(pert.evaluate(&zero3), zero3);
    }

    fn random_point(rng: &mut ChaCha8Rng, k: usize, scale: f64) -> Vec<Complex64> {
        (0..k)
            .map(|_| c(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)))
            .collect()
    }

    #[test]
    fn inverse_consistency_all_classes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut p2 = Polynomial::zero(2, 3);
        p2.set_coeff(mi(&[1, 1]), c(0.3, 0.1));
        p2.set_coeff(mi(&[0, 2]), c(-0.2, 0.0));
        let maps: Vec<PolyMap> = vec![
            henon_x_plus_y2(),
            PolyMap::Elementary(ElementaryMap::new(3, 1, c(0.4, 0.2), p2.clone()).unwrap()),
            PolyMap::Shift(WeakShift::new(3, c(0.7, -0.1), p2.clone(), 3).unwrap()),
            PolyMap::Perturbed(
                PerturbedWeakShift::new(
                    WeakShift::new(3, c(0.7, -0.1), p2.clone(), 3).unwrap(),
                    5,
                )
                .unwrap(),
            ),
            PolyMap::Linear(
                LinearMap::new(CMatrix::from_rows(vec![
                    vec![c(0.5, 0.1), c(0.0, 0.0), c(0.0, 0.0)],
                    vec![c(0.1, 0.0), c(0.4, 0.0), c(0.0, 0.0)],
                    vec![c(0.0, 0.2), c(0.1, 0.0), c(0.6, 0.0)],
                ]))
                .unwrap(),
            ),
        ];
        for map in &maps {
            let k = map.dim();
            for _ in 0..1000 {
                let z = random_point(&mut rng, k, 1.5);
                let w = map.evaluate(&z);
                let back = map.evaluate_inverse(&w).unwrap();
                let scale: f64 = z.iter().map(|v| v.norm()).fold(1.0, f64::max);
                let err: f64 = back
                    .iter()
                    .zip(&z)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                assert!(err / scale < 1e-10, "round trip error {err}");
            }
        }
    }

    #[test]
    fn perturbation_adds_high_degree_monomials() {
        // k = 3, d = 4 at (0, 1, 1): the base image gains (0, 1, 2).
        let p = Polynomial::zero(2, 2);
        let base = WeakShift::new(3, c(0.5, 0.0), p, 2).unwrap();
        let z = [c(0.0, 0.0), ONE, ONE];
        let base_im = base.eval(&z);
        let pert = PerturbedWeakShift::new(base, 4).unwrap();
        let im = pert.eval(&z);
        assert_eq!(im[0] - base_im[0], c(0.0, 0.0));
        assert_eq!(im[1] - base_im[1], c(1.0, 0.0));
        assert_eq!(im[2] - base_im[2], c(2.0, 0.0));
    }

    #[test]
    fn perturbation_vanishes_off_the_shifted_coordinates() {
        let p = Polynomial::zero(2, 2);
        let base = WeakShift::new(3, c(0.5, 0.0), p, 2).unwrap();
        let pert = PerturbedWeakShift::new(base.clone(), 4).unwrap();
        let z = [c(0.7, -0.3), c(0.0, 0.0), c(0.0, 0.0)];
        assert_eq!(pert.eval(&z), base.eval(&z));
    }

    #[test]
    fn perturbation_requires_degree_margin() {
        let p = Polynomial::zero(2, 2);
        let base = WeakShift::new(3, c(0.5, 0.0), p, 2).unwrap();
        assert!(PerturbedWeakShift::new(base, 3).is_err());
    }

    #[test]
    fn germ_matches_evaluation_for_polynomial_classes() {
        let mut p2 = Polynomial::zero(2, 3);
        p2.set_coeff(mi(&[1, 1]), c(0.3, 0.1));
        p2.set_coeff(mi(&[2, 0]), c(-0.2, 0.4));
        let maps = vec![
            henon_x_plus_y2(),
            PolyMap::Shift(WeakShift::new(3, c(0.7, -0.1), p2.clone(), 3).unwrap()),
            PolyMap::Perturbed(
                PerturbedWeakShift::new(WeakShift::new(3, c(0.7, -0.1), p2, 3).unwrap(), 5)
                    .unwrap(),
            ),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for map in &maps {
            let k = map.dim();
            let g = map.germ(8);
            for _ in 0..50 {
                let z = random_point(&mut rng, k, 0.5);
                let a = map.evaluate(&z);
                let b = g.eval(&z);
                for (x, y) in a.iter().zip(&b) {
                    assert!((x - y).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn inverse_germ_composes_to_identity() {
        let mut p2 = Polynomial::zero(2, 3);
        p2.set_coeff(mi(&[1, 1]), c(0.3, 0.1));
        let t = PolyMap::Elementary(ElementaryMap::new(3, 1, c(0.4, 0.2), p2).unwrap());
        let order = 4;
        let fg = t.germ(order);
        let ig = t.inverse_germ(order).unwrap();
        let comp = fg.compose_truncated(&ig, order).unwrap();
        assert!(comp.coeff_distance(&GermMap::identity(3, order)) < 1e-12);
    }
}
