//! Structural factorizations: the two-factor Hénon product in C^2 and the
//! decomposition of a triangular-map chain into k weak shifts.

use num_complex::Complex64;

use super::{ElementaryMap, HenonMap, LinearMap, PolyMap, WeakShift};
use crate::error::{Error, Result};
use crate::germ::{MultiIndex, Polynomial};
use crate::linalg::CMatrix;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Cyclic left rotation by `j` coordinates:
/// `(z_1, ..., z_k) -> (z_{j+1}, ..., z_k, z_1, ..., z_j)`.
pub fn inversion_map(k: usize, j: usize) -> PolyMap {
    let mut m = CMatrix::zeros(k);
    for i in 0..k {
        m[(i, (i + j) % k)] = ONE;
    }
    PolyMap::Linear(LinearMap::new(m).expect("permutation matrix"))
}

fn check_normalized(name: &str, p: &Polynomial, require_no_linear: bool) -> Result<()> {
    if p.vars() != 1 {
        return Err(Error::domain(format!("{name} must be univariate")));
    }
    if p.coeff(&MultiIndex::zero(1)).norm() > 1e-12 {
        return Err(Error::domain(format!("{name} must vanish at 0")));
    }
    if require_no_linear && p.linear_coeff(0).norm() > 1e-12 {
        return Err(Error::domain(format!("{name} must have no linear term")));
    }
    let d = p.degree();
    if d >= 2 {
        let mut top = MultiIndex::new(vec![d]);
        let lead = p.coeff(&top);
        if (lead - ONE).norm() > 1e-12 {
            top = MultiIndex::new(vec![d]);
            return Err(Error::domain(format!(
                "{name} must be monic at degree {} (got {})",
                top.get(0),
                lead
            )));
        }
    }
    Ok(())
}

/// Build `(x, y) -> (delta y + P(x), x)`, the Hénon form conjugated by the
/// coordinate swap. Degenerate P (degree <= 1) collapses to a linear map.
fn swapped_henon(delta: Complex64, p: &Polynomial) -> Result<PolyMap> {
    if delta.norm() == 0.0 {
        return Err(Error::domain("factor coefficient must be nonzero"));
    }
    if p.degree() >= 2 {
        let swap = inversion_map(2, 1);
        let core = PolyMap::Henon(HenonMap::new(delta, p.clone())?);
        Ok(PolyMap::Composite(vec![swap.clone(), core, swap]))
    } else {
        let b = p.linear_coeff(0);
        let m = CMatrix::from_rows(vec![
            vec![b, delta],
            vec![ONE, Complex64::new(0.0, 0.0)],
        ]);
        Ok(PolyMap::Linear(LinearMap::new(m)?))
    }
}

/// Factor `g(x, y) = (a x + p(y + c^{-1} q(x)), c y + q(x))` into the pair
/// `(a y + p(c^{-1} x), x)` and `(c y + q(x), x)`, composed second-first.
/// Each factor is the coordinate-swap conjugate of a generalized Hénon map.
///
/// `p` must vanish to second order at 0 and be monic when nonlinear; `q`
/// must vanish at 0 and be monic when nonlinear (its linear coefficient is
/// the subdiagonal entry of the linear part).
pub fn henon_factorize_k2(
    a: Complex64,
    c: Complex64,
    p: &Polynomial,
    q: &Polynomial,
) -> Result<(PolyMap, PolyMap)> {
    if a.norm() == 0.0 || c.norm() == 0.0 {
        return Err(Error::domain("diagonal coefficients must be nonzero"));
    }
    check_normalized("p", p, true)?;
    check_normalized("q", q, false)?;
    // p(c^{-1} x): rescale the coefficients.
    let mut p_scaled = Polynomial::zero(1, p.max_degree());
    for (m, coeff) in p.iter() {
        let e = m.get(0);
        p_scaled.set_coeff(m.clone(), coeff * (ONE / c).powu(e));
    }
    let first = swapped_henon(a, &p_scaled)?;
    let second = swapped_henon(c, q)?;
    Ok((first, second))
}

/// The full product map of [`henon_factorize_k2`], applied second factor
/// first.
pub fn henon_product_k2(
    a: Complex64,
    c: Complex64,
    p: &Polynomial,
    q: &Polynomial,
) -> Result<PolyMap> {
    let (first, second) = henon_factorize_k2(a, c, p, q)?;
    Ok(PolyMap::Composite(vec![second, first]))
}

/// Decompose a full triangular chain `T^k ∘ ... ∘ T^1` (given as the list of
/// its k elementary factors in application order) into k weak shift-like
/// maps whose composition reproduces the chain. The polynomial of the L-th
/// shift is the L-th triangular modification with its arguments rotated to
/// the shifted coordinate frame.
pub fn shift_factorize(tmaps: &[ElementaryMap]) -> Result<Vec<WeakShift>> {
    if tmaps.is_empty() {
        return Err(Error::parameter("empty triangular chain"));
    }
    let k = tmaps[0].k;
    if tmaps.len() != k {
        return Err(Error::parameter(format!(
            "need exactly k = {k} triangular factors, got {}",
            tmaps.len()
        )));
    }
    for (idx, t) in tmaps.iter().enumerate() {
        if t.k != k {
            return Err(Error::parameter("triangular factors must share k"));
        }
        if t.target != idx {
            return Err(Error::parameter(format!(
                "factor {idx} must modify coordinate {idx}, modifies {}",
                t.target
            )));
        }
    }
    let family_degree = tmaps
        .iter()
        .map(|t| t.p.degree().max(1))
        .max()
        .unwrap_or(1);
    let mut shifts = Vec::with_capacity(k);
    for (idx, t) in tmaps.iter().enumerate() {
        let block_pos = idx + 1; // 1-based position L
        let mut p = Polynomial::zero(k - 1, t.p.max_degree());
        for (m, coeff) in t.p.iter() {
            let mut e = vec![0u32; k - 1];
            for (jj, &exp) in m.exponents().iter().enumerate() {
                // Variable jj of the L-th triangular polynomial lands at
                // shifted-frame slot k - L + jj when jj < L - 1, else jj - L + 1.
                let slot = if jj + 1 <= block_pos - 1 {
                    k - block_pos + jj
                } else {
                    jj + 1 - block_pos
                };
                e[slot] = exp;
            }
            p.add_to_coeff(MultiIndex::new(e), *coeff);
        }
        shifts.push(WeakShift::new(k, t.a, p, family_degree)?);
    }
    Ok(shifts)
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

    /// Direct evaluation of (a x + p(y + c^{-1} q(x)), c y + q(x)).
    fn henon_product_oracle(
        a: Complex64,
        cc: Complex64,
        p: &Polynomial,
        q: &Polynomial,
        z: &[Complex64],
    ) -> Vec<Complex64> {
        let qx = q.eval(&z[0..1]);
        let arg = [z[1] + qx / cc];
        vec![a * z[0] + p.eval(&arg), cc * z[1] + qx]
    }

    #[test]
    fn henon_pair_reproduces_product_formula() {
        // p = q = x^3, a = c = 1, b = 0.
        let cubic = Polynomial::univariate(&[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let (first, second) = henon_factorize_k2(ONE, ONE, &cubic, &cubic).unwrap();
        let z = [ONE, ONE];
        let w = first.evaluate(&second.evaluate(&z));
        let expect = henon_product_oracle(ONE, ONE, &cubic, &cubic, &z);
        for (x, y) in w.iter().zip(&expect) {
            assert!((x - y).norm() < 1e-12);
        }
        // Both factors fix the origin, so the composition does too.
        let zero = [c(0.0, 0.0), c(0.0, 0.0)];
        let w0 = first.evaluate(&second.evaluate(&zero));
        assert!(w0.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn henon_pair_matches_product_at_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = c(0.45, 0.1);
        let cc = c(0.5, -0.05);
        let p = Polynomial::univariate(&[c(0.0, 0.0), c(0.0, 0.0), c(0.3, 0.2), c(1.0, 0.0)]);
        let q = Polynomial::univariate(&[c(0.0, 0.0), c(0.08, 0.0), c(-0.2, 0.1), c(1.0, 0.0)]);
        let product = henon_product_k2(a, cc, &p, &q).unwrap();
        for _ in 0..500 {
            let z = [
                c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
                c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
            ];
            let w = product.evaluate(&z);
            let expect = henon_product_oracle(a, cc, &p, &q, &z);
            let scale: f64 = expect.iter().map(|v| v.norm()).fold(1.0, f64::max);
            for (x, y) in w.iter().zip(&expect) {
                assert!((x - y).norm() / scale < 1e-10);
            }
        }
    }

    #[test]
    fn henon_linear_case() {
        // p = 0, q = b x: the product is (a x, c y + b x).
        let p = Polynomial::univariate(&[c(0.0, 0.0)]);
        let q = Polynomial::univariate(&[c(0.0, 0.0), c(0.2, 0.0)]);
        let a = c(0.4, 0.0);
        let cc = c(0.5, 0.0);
        let product = henon_product_k2(a, cc, &p, &q).unwrap();
        let z = [c(1.0, 0.0), c(2.0, 0.0)];
        let w = product.evaluate(&z);
        assert!((w[0] - a * z[0]).norm() < 1e-14);
        assert!((w[1] - (cc * z[1] + c(0.2, 0.0) * z[0])).norm() < 1e-14);
    }

    #[test]
    fn henon_rejects_non_monic() {
        let bad = Polynomial::univariate(&[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]);
        let good = Polynomial::univariate(&[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(henon_factorize_k2(ONE, ONE, &bad, &good).is_err());
        // Linear term in p violates the normalization.
        let bad_lin =
            Polynomial::univariate(&[c(0.0, 0.0), c(0.1, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(henon_factorize_k2(ONE, ONE, &bad_lin, &good).is_err());
    }

    fn sample_tmaps(k: usize, order: u32, seed: u64) -> Vec<ElementaryMap> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..k)
            .map(|i| {
                let mut p = Polynomial::zero(k - 1, order);
                for d in 1..=order {
                    for m in crate::germ::graded_indices(k - 1, d) {
                        p.set_coeff(
                            m,
                            c(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)),
                        );
                    }
                }
                let a = c(rng.gen_range(0.3..0.6), rng.gen_range(-0.1..0.1));
                ElementaryMap::new(k, i, a, p).unwrap()
            })
            .collect()
    }

    #[test]
    fn shift_factorization_reproduces_chain() {
        let k = 3;
        let tmaps = sample_tmaps(k, 3, 17);
        let shifts = shift_factorize(&tmaps).unwrap();
        let chain = PolyMap::Composite(tmaps.iter().cloned().map(PolyMap::Elementary).collect());
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        for _ in 0..100 {
            let z: Vec<Complex64> = (0..k)
                .map(|_| c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)))
                .collect();
            let mut w = z.clone();
            for s in &shifts {
                w = PolyMap::Shift(s.clone()).evaluate(&w);
            }
            let expect = chain.evaluate(&z);
            let scale: f64 = expect.iter().map(|v| v.norm()).fold(1.0, f64::max);
            for (x, y) in w.iter().zip(&expect) {
                assert!((x - y).norm() / scale < 1e-10);
            }
        }
    }

    #[test]
    fn shift_factorization_partial_compositions() {
        // After j shifts the state is the j-rotation of the partial chain.
        let k = 3;
        let tmaps = sample_tmaps(k, 3, 21);
        let shifts = shift_factorize(&tmaps).unwrap();
        let z = vec![c(0.3, -0.2), c(-0.5, 0.1), c(0.7, 0.4)];
        for j in 1..=k {
            let mut w = z.clone();
            for s in &shifts[..j] {
                w = PolyMap::Shift(s.clone()).evaluate(&w);
            }
            let partial =
                PolyMap::Composite(tmaps[..j].iter().cloned().map(PolyMap::Elementary).collect());
            let expect = inversion_map(k, j).evaluate(&partial.evaluate(&z));
            for (x, y) in w.iter().zip(&expect) {
                assert!((x - y).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn shift_factorization_diagonal_case() {
        // All P = 0 and diagonal scales: the composition is the diagonal map.
        let k = 3;
        let tmaps: Vec<ElementaryMap> = (0..k)
            .map(|i| {
                ElementaryMap::new(
                    k,
                    i,
                    c(0.3 + 0.1 * i as f64, 0.0),
                    Polynomial::zero(k - 1, 2),
                )
                .unwrap()
            })
            .collect();
        let shifts = shift_factorize(&tmaps).unwrap();
        let z = vec![ONE, ONE, ONE];
        let mut w = z.clone();
        for s in &shifts {
            w = PolyMap::Shift(s.clone()).evaluate(&w);
        }
        assert!((w[0] - c(0.3, 0.0)).norm() < 1e-14);
        assert!((w[1] - c(0.4, 0.0)).norm() < 1e-14);
        assert!((w[2] - c(0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn section_six_shapes() {
        // k = 3: the three shifts read (z2, z3, u11 z1 + P1(z2, z3)),
        // (z2, z3, u22 z1 + P2(z3, z2)), (z2, z3, u33 z1 + P3(z2, z3)).
        let k = 3;
        let mut p1 = Polynomial::zero(2, 2);
        p1.set_coeff(mi(&[1, 0]), c(2.0, 0.0)); // depends on first other-var
        let mut p2 = Polynomial::zero(2, 2);
        p2.set_coeff(mi(&[1, 0]), c(3.0, 0.0));
        let mut p3 = Polynomial::zero(2, 2);
        p3.set_coeff(mi(&[1, 0]), c(5.0, 0.0));
        let tmaps = vec![
            ElementaryMap::new(k, 0, c(0.5, 0.0), p1).unwrap(),
            ElementaryMap::new(k, 1, c(0.5, 0.0), p2).unwrap(),
            ElementaryMap::new(k, 2, c(0.5, 0.0), p3).unwrap(),
        ];
        let shifts = shift_factorize(&tmaps).unwrap();
        // First shift keeps argument order: p(z2, z3) sees z2 in slot 0.
        assert!((shifts[0].p.coeff(&mi(&[1, 0])) - c(2.0, 0.0)).norm() < 1e-14);
        // Second shift swaps: P2's first variable (z1) moves to slot 1.
        assert!((shifts[1].p.coeff(&mi(&[0, 1])) - c(3.0, 0.0)).norm() < 1e-14);
        // Third shift keeps order again.
        assert!((shifts[2].p.coeff(&mi(&[1, 0])) - c(5.0, 0.0)).norm() < 1e-14);
    }
}
