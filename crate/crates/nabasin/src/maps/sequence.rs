//! Indexed families of automorphisms: providers, uniform-attraction
//! metadata, unitary triangularization of the linear parts, block
//! composition, periodic restriction and contraction-bound estimation.

use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{PerturbedWeakShift, PolyMap, WeakShift};
use crate::error::{Error, Result};
use crate::germ::{GermMap, MultiIndex, Polynomial};
use crate::linalg::CMatrix;

/// Uniform attraction constants: `lower ||z|| <= ||f_n(z)|| <= upper ||z||`
/// on the ball of the given radius, for every n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttractionBounds {
    pub lower: f64,
    pub upper: f64,
    pub radius: f64,
}

impl AttractionBounds {
    pub fn new(lower: f64, upper: f64, radius: f64) -> Result<Self> {
        if !(0.0 < lower && lower < upper && upper < 1.0) {
            return Err(Error::parameter(
                "attraction bounds need 0 < lower < upper < 1",
            ));
        }
        if radius <= 0.0 {
            return Err(Error::parameter("attraction radius must be positive"));
        }
        Ok(AttractionBounds {
            lower,
            upper,
            radius,
        })
    }

    /// Smallest order >= 2 whose germ agreement transfers the basin: the
    /// least integer with `upper^order < lower`.
    pub fn germ_order(&self) -> u32 {
        let mut order = 2u32;
        while self.upper.powi(order as i32) >= self.lower {
            order += 1;
        }
        order
    }
}

/// An indexed family `n -> automorphism` with optional uniform-attraction
/// metadata. Providers are pure and deterministic: the same index always
/// yields identical coefficients.
#[derive(Clone)]
pub struct AutoSequence {
    k: usize,
    provider: Arc<dyn Fn(usize) -> PolyMap + Send + Sync>,
    pub bounds: Option<AttractionBounds>,
}

impl std::fmt::Debug for AutoSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AutoSequence")
            .field("k", &self.k)
            .field("bounds", &self.bounds)
            .finish()
    }
}

impl AutoSequence {
    pub fn from_fn<F>(k: usize, provider: F) -> Self
    where
        F: Fn(usize) -> PolyMap + Send + Sync + 'static,
    {
        AutoSequence {
            k,
            provider: Arc::new(provider),
            bounds: None,
        }
    }

    /// Periodic repetition of an explicit list of maps.
    pub fn periodic(maps: Vec<PolyMap>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::parameter("periodic sequence needs at least one map"));
        }
        let k = maps[0].dim();
        if maps.iter().any(|m| m.dim() != k) {
            return Err(Error::parameter("all maps must share the dimension"));
        }
        Ok(AutoSequence::from_fn(k, move |n| {
            maps[n % maps.len()].clone()
        }))
    }

    pub fn constant(map: PolyMap) -> Self {
        let k = map.dim();
        AutoSequence::from_fn(k, move |_| map.clone())
    }

    pub fn with_bounds(mut self, bounds: AttractionBounds) -> Self {
        self.bounds = Some(bounds);
        self
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn map(&self, n: usize) -> PolyMap {
        (self.provider)(n)
    }
}

/// Conjugate the family by inductively chosen unitaries so every linear part
/// at the origin becomes lower triangular: the n-th output map is
/// `V_{n+1}^* ∘ f_n ∘ V_n` with `V_0 = Id`.
///
/// The unitaries are validated (invertible linear parts) up to `horizon`
/// eagerly and extended lazily past it on demand.
pub fn lower_triangular_normalize(seq: &AutoSequence, horizon: usize) -> Result<AutoSequence> {
    let k = seq.k();
    let cache = Arc::new(Mutex::new(vec![CMatrix::identity(k)]));
    let extend = {
        let cache = Arc::clone(&cache);
        let seq = seq.clone();
        move |upto: usize| -> Result<()> {
            let mut cache = cache.lock().unwrap();
            while cache.len() <= upto {
                let n = cache.len() - 1;
                let a = seq.map(n).linear_part();
                let m = a.mul(&cache[n]);
                // Reject numerically singular linear parts before factoring.
                m.inverse()?;
                let (q, _l) = m.ql();
                cache.push(q);
            }
            Ok(())
        }
    };
    extend(horizon + 1)?;
    let seq_inner = seq.clone();
    let provider = move |n: usize| -> PolyMap {
        extend(n + 1).expect("singular linear part beyond the validated horizon");
        let cache = cache.lock().unwrap();
        let v_n = cache[n].clone();
        let v_next_inv = cache[n + 1].adjoint();
        PolyMap::Composite(vec![
            PolyMap::Linear(super::LinearMap::new(v_n).expect("unitary")),
            seq_inner.map(n),
            PolyMap::Linear(super::LinearMap::new(v_next_inv).expect("unitary")),
        ])
    };
    let mut out = AutoSequence::from_fn(k, provider);
    out.bounds = seq.bounds;
    Ok(out)
}

/// Largest deviation between orbit norms of a sequence and its normalized
/// counterpart at a seeded probe point: the conjugating maps are unitary
/// with identity at index 0, so the norms must agree.
pub fn normalization_orbit_defect(
    seq: &AutoSequence,
    normalized: &AutoSequence,
    steps: usize,
    seed: u64,
) -> f64 {
    let k = seq.k();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z: Vec<Complex64> = (0..k)
        .map(|_| {
            Complex64::from_polar(
                rng.gen_range(0.01..0.1),
                rng.gen_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    let norm = |w: &[Complex64]| w.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let mut a = z.clone();
    let mut b = z;
    let mut worst = 0.0f64;
    for n in 0..steps {
        a = seq.map(n).evaluate(&a);
        b = normalized.map(n).evaluate(&b);
        worst = worst.max((norm(&a) - norm(&b)).abs());
    }
    worst
}

/// Group `blocksize` consecutive maps into one: output element n is the
/// composition of input elements n*l .. n*l + l - 1, applied in index order.
pub fn block_compose(seq: &AutoSequence, blocksize: usize) -> Result<AutoSequence> {
    if blocksize < 1 {
        return Err(Error::parameter("block size must be >= 1"));
    }
    let inner = seq.clone();
    let mut out = AutoSequence::from_fn(seq.k(), move |n| {
        PolyMap::Composite((0..blocksize).map(|j| inner.map(n * blocksize + j)).collect())
    });
    out.bounds = seq.bounds;
    Ok(out)
}

/// Periodic restriction: output element n is input element `n mod m`, so the
/// first m maps repeat forever and the m-block composition iterates.
pub fn periodic_restriction(seq: &AutoSequence, m: usize) -> Result<AutoSequence> {
    if m < 1 {
        return Err(Error::parameter("period must be >= 1"));
    }
    let inner = seq.clone();
    let mut out = AutoSequence::from_fn(seq.k(), move |n| inner.map(n % m));
    out.bounds = seq.bounds;
    Ok(out)
}

/// Degree-d perturbation of a family of weak shifts.
pub fn perturb(shifts: &[WeakShift], degree: u32) -> Result<Vec<PerturbedWeakShift>> {
    shifts
        .iter()
        .map(|s| PerturbedWeakShift::new(s.clone(), degree))
        .collect()
}

/// Result of sampling the contraction ratios of a sequence.
#[derive(Debug, Clone, Copy)]
pub struct BoundsEstimate {
    pub lower: f64,
    pub upper: f64,
    /// Least order with `upper^order < lower`, when contraction holds.
    pub germ_order: Option<u32>,
    /// False when the sampled ratios are incompatible with uniform attraction.
    pub contraction_ok: bool,
}

const SAMPLING_SEED: u64 = 0x6e61_6261_7369_6e01;

/// Sample `||f_n(z)|| / ||z||` over quasi-uniform points on spheres of radii
/// `r, r/2, r/4, r/8` and n <= horizon, returning the extremal ratios.
pub fn estimate_attraction_bounds(
    seq: &AutoSequence,
    r: f64,
    samples: usize,
    horizon: usize,
) -> Result<BoundsEstimate> {
    if r <= 0.0 {
        return Err(Error::parameter("sampling radius must be positive"));
    }
    let k = seq.k();
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLING_SEED);
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for n in 0..=horizon {
        let map = seq.map(n);
        for j in 0..4 {
            let radius = r * 0.5f64.powi(j);
            for _ in 0..samples {
                let mut z: Vec<Complex64> = (0..k)
                    .map(|_| {
                        Complex64::new(
                            rng.sample::<f64, _>(rand::distributions::Standard) * 2.0 - 1.0,
                            rng.sample::<f64, _>(rand::distributions::Standard) * 2.0 - 1.0,
                        )
                    })
                    .collect();
                let norm: f64 = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                if norm == 0.0 {
                    continue;
                }
                for c in &mut z {
                    *c *= radius / norm;
                }
                let w = map.evaluate(&z);
                let wn: f64 = w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                if !wn.is_finite() {
                    return Err(Error::Overflow { step: n });
                }
                let ratio = wn / radius;
                lo = lo.min(ratio);
                hi = hi.max(ratio);
            }
        }
    }
    let contraction_ok = lo > 0.0 && hi < 1.0;
    let germ_order = if contraction_ok {
        let mut order = 2u32;
        while hi.powi(order as i32) >= lo {
            order += 1;
            if order > 64 {
                break;
            }
        }
        (order <= 64).then_some(order)
    } else {
        None
    };
    Ok(BoundsEstimate {
        lower: lo,
        upper: hi,
        germ_order,
        contraction_ok,
    })
}

fn rand_complex(rng: &mut ChaCha8Rng, modulus_min: f64, modulus_max: f64) -> Complex64 {
    let r = rng.gen_range(modulus_min..=modulus_max);
    let phi = rng.gen_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(r, phi)
}

/// Seeded family of germ pairs with lower-triangular linear parts and random
/// higher-order terms up to `order`. Diagonal moduli land in
/// `[diag_min, diag_max]`, strictly-lower linear entries are bounded by
/// `subdiag_max`, nonlinear coefficients by `higher_max`. The family repeats
/// with the given period, so it is deterministic for every index.
pub fn random_triangular_germs(
    k: usize,
    order: u32,
    seed: u64,
    period: usize,
    diag_min: f64,
    diag_max: f64,
    subdiag_max: f64,
    higher_max: f64,
) -> Result<AutoSequence> {
    if period < 1 {
        return Err(Error::parameter("period must be >= 1"));
    }
    if !(0.0 < diag_min && diag_min <= diag_max) {
        return Err(Error::parameter("need 0 < diag_min <= diag_max"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut maps = Vec::with_capacity(period);
    for _ in 0..period {
        let mut components = Vec::with_capacity(k);
        for i in 0..k {
            let mut p = Polynomial::zero(k, order);
            p.set_coeff(MultiIndex::unit(k, i), rand_complex(&mut rng, diag_min, diag_max));
            for j in 0..i {
                if subdiag_max > 0.0 {
                    p.set_coeff(
                        MultiIndex::unit(k, j),
                        rand_complex(&mut rng, 0.0, subdiag_max),
                    );
                }
            }
            if higher_max > 0.0 {
                for d in 2..=order {
                    for m in crate::germ::graded_indices(k, d) {
                        p.set_coeff(m, rand_complex(&mut rng, 0.0, higher_max));
                    }
                }
            }
            components.push(p);
        }
        let forward = GermMap::new(k, order, components)?;
        let inverse = forward.invert(order)?;
        maps.push(PolyMap::Germ {
            forward,
            inverse: Some(inverse),
        });
    }
    AutoSequence::periodic(maps)
}

/// Seeded family of uniformly bounded weak shifts of the given degree, with
/// `|a_n|` in `[coeff_min, coeff_max]` and every polynomial coefficient
/// bounded by `coeff_max`.
pub fn random_weak_shifts(
    k: usize,
    family_degree: u32,
    seed: u64,
    period: usize,
    coeff_min: f64,
    coeff_max: f64,
) -> Result<Vec<WeakShift>> {
    if period < 1 {
        return Err(Error::parameter("period must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shifts = Vec::with_capacity(period);
    for idx in 0..period {
        let a = rand_complex(&mut rng, coeff_min, coeff_max);
        let mut p = Polynomial::zero(k - 1, family_degree);
        for d in 1..=family_degree {
            for m in crate::germ::graded_indices(k - 1, d) {
                p.set_coeff(m, rand_complex(&mut rng, 0.0, coeff_max));
            }
        }
        // The family bound must be attained by at least one member.
        if idx == 0 && family_degree >= 1 {
            let mut top = vec![0u32; k - 1];
            top[0] = family_degree;
            p.set_coeff(MultiIndex::new(top), Complex64::new(coeff_max * 0.9, 0.0));
        }
        shifts.push(WeakShift::new(k, a, p, family_degree)?);
    }
    Ok(shifts)
}
