//! Bounded orbits of strictly expanding non-autonomous affine recurrences
//! `z_{n+1} = beta_n z_n + gamma_n` with `1 < c <= |beta_n|`. The unique
//! bounded orbit is the convergent backward series
//! `z_n = -sum_{m >= n} gamma_m prod_{j=n}^{m} beta_j^{-1}`; it is computed
//! by backward iteration from a truncated tail, which satisfies the
//! recurrence to rounding and is stable because the backward map contracts.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A non-autonomous affine recurrence with uniform expansion and offset
/// bounds. The bounds are validated lazily as indices are queried.
#[derive(Clone)]
pub struct AffineRecurrence {
    beta: Arc<dyn Fn(usize) -> Complex64 + Send + Sync>,
    gamma: Arc<dyn Fn(usize) -> Complex64 + Send + Sync>,
    /// Uniform lower bound on |beta_n|, strictly above 1.
    pub expansion: f64,
    /// Uniform upper bound on |beta_n| and |gamma_n|.
    pub magnitude: f64,
}

impl AffineRecurrence {
    pub fn new<B, G>(beta: B, gamma: G, expansion: f64, magnitude: f64) -> Result<Self>
    where
        B: Fn(usize) -> Complex64 + Send + Sync + 'static,
        G: Fn(usize) -> Complex64 + Send + Sync + 'static,
    {
        if expansion <= 1.0 {
            return Err(Error::parameter("expansion bound must exceed 1"));
        }
        if magnitude < expansion {
            return Err(Error::parameter("magnitude bound must dominate expansion"));
        }
        Ok(AffineRecurrence {
            beta: Arc::new(beta),
            gamma: Arc::new(gamma),
            expansion,
            magnitude,
        })
    }

    pub fn from_streams(beta: Vec<Complex64>, gamma: Vec<Complex64>) -> Result<Self> {
        let c = beta.iter().map(|b| b.norm()).fold(f64::INFINITY, f64::min);
        let big = beta
            .iter()
            .chain(gamma.iter())
            .map(|b| b.norm())
            .fold(0.0, f64::max);
        if c <= 1.0 {
            return Err(Error::parameter(format!(
                "multiplier stream is not uniformly expanding (min modulus {c})"
            )));
        }
        AffineRecurrence::new(
            move |n| beta[n.min(beta.len() - 1)],
            move |n| gamma[n.min(gamma.len() - 1)],
            c,
            big.max(c) + f64::EPSILON,
        )
    }

    pub fn beta(&self, n: usize) -> Complex64 {
        (self.beta)(n)
    }

    pub fn gamma(&self, n: usize) -> Complex64 {
        (self.gamma)(n)
    }
}

/// Number of extra backward steps needed so the truncated tail contributes
/// at most `tol`: the dropped series remainder is bounded by
/// `magnitude * expansion^{-T} / (expansion - 1)`.
pub fn tail_length(expansion: f64, magnitude: f64, tol: f64) -> usize {
    let needed = (magnitude / ((expansion - 1.0) * tol)).ln() / expansion.ln();
    needed.ceil().max(1.0) as usize
}

/// The bounded orbit values `z_{start}, ..., z_{horizon}`.
///
/// Every `|beta_n| <= 1` aborts with an expansion violation. The returned
/// values satisfy the recurrence to rounding and obey
/// `|z_n| <= magnitude / (expansion - 1) + tol`.
pub fn bounded_affine_orbit(
    rec: &AffineRecurrence,
    start: usize,
    horizon: usize,
    tol: f64,
) -> Result<Vec<Complex64>> {
    if tol <= 0.0 {
        return Err(Error::parameter("tolerance must be positive"));
    }
    if horizon < start {
        return Err(Error::parameter("horizon must be >= start"));
    }
    let tail = tail_length(rec.expansion, rec.magnitude, tol);
    let top = horizon + tail;
    let mut z = Complex64::new(0.0, 0.0);
    let mut out = vec![Complex64::new(0.0, 0.0); horizon - start + 1];
    for n in (start..=top).rev() {
        let b = rec.beta(n);
        if b.norm() <= 1.0 {
            return Err(Error::ExpansionViolation {
                index: n,
                modulus: b.norm(),
            });
        }
        z = (z - rec.gamma(n)) / b;
        if n <= horizon {
            out[n - start] = z;
        }
    }
    Ok(out)
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

    #[test]
    fn constant_coefficients_give_the_fixed_point() {
        // z -> 2z + 1 has bounded orbit identically -1.
        let rec = AffineRecurrence::new(|_| c(2.0, 0.0), |_| c(1.0, 0.0), 2.0, 2.0).unwrap();
        let orbit = bounded_affine_orbit(&rec, 0, 20, 1e-12).unwrap();
        for z in orbit {
            assert!((z - c(-1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_offsets_give_zero() {
        let rec = AffineRecurrence::new(|_| c(3.0, 1.0), |_| c(0.0, 0.0), 2.0, 4.0).unwrap();
        let orbit = bounded_affine_orbit(&rec, 0, 10, 1e-12).unwrap();
        assert!(orbit.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn alternating_offsets() {
        // beta = 2, gamma_n = (-1)^n: the bounded orbit is -(-1)^n / 3.
        let rec = AffineRecurrence::new(
            |_| c(2.0, 0.0),
            |n| c(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0),
            2.0,
            2.0,
        )
        .unwrap();
        let orbit = bounded_affine_orbit(&rec, 0, 16, 1e-13).unwrap();
        for (n, z) in orbit.iter().enumerate() {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((z - c(-sign / 3.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn recurrence_and_bound_hold_for_random_streams() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let cbound = rng.gen_range(1.2..3.0);
            let big = rng.gen_range(cbound..cbound + 5.0);
            let betas: Vec<Complex64> = (0..80)
                .map(|_| {
                    let r = rng.gen_range(cbound..big);
                    Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
                })
                .collect();
            let gammas: Vec<Complex64> = (0..80)
                .map(|_| {
                    Complex64::from_polar(
                        rng.gen_range(0.0..big),
                        rng.gen_range(0.0..std::f64::consts::TAU),
                    )
                })
                .collect();
            let rec = AffineRecurrence::from_streams(betas.clone(), gammas.clone()).unwrap();
            let orbit = bounded_affine_orbit(&rec, 0, 40, 1e-9).unwrap();
            let sup = rec.magnitude / (rec.expansion - 1.0) + 1e-9;
            for (n, z) in orbit.iter().enumerate() {
                assert!(z.norm() <= sup + 1e-9);
                if n + 1 < orbit.len() {
                    let next = betas[n] * z + gammas[n];
                    assert!((next - orbit[n + 1]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rejects_contraction() {
        let rec = AffineRecurrence::new(
            |n| {
                if n == 7 {
                    c(0.9, 0.0)
                } else {
                    c(2.0, 0.0)
                }
            },
            |_| c(1.0, 0.0),
            1.5,
            2.0,
        )
        .unwrap();
        match bounded_affine_orbit(&rec, 0, 10, 1e-9) {
            Err(Error::ExpansionViolation { index, .. }) => assert_eq!(index, 7),
            other => panic!("expected expansion violation, got {other:?}"),
        }
    }
}
