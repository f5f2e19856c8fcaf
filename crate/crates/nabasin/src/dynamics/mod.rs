//! Filtration regions of C^k, radius search for perturbed weak-shift
//! families, and the region predicates shared by classification, Green's
//! function estimation and rendering.

pub mod engine;
pub mod render;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::germ::count_up_to;
use crate::maps::PerturbedWeakShift;

pub use engine::{
    classify_point, green_estimate, green_functional_check, green_trace, orbit, Classification,
    GreenEstimate, GreenStatus, OrbitDirection, TraceRow,
};
pub use render::{render_basin, write_pgm, RenderGrids, RenderWindow};

/// Sup-norm of a point of C^k.
pub fn sup_norm(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Membership in the sector where coordinate `i` dominates:
/// `|z_i| >= max((k-1) |z_j| for j != i, radius)`.
pub fn in_coordinate_sector(z: &[Complex64], i: usize, radius: f64) -> bool {
    let k = z.len();
    let zi = z[i].norm();
    if zi < radius {
        return false;
    }
    z.iter()
        .enumerate()
        .all(|(j, c)| j == i || zi >= (k - 1) as f64 * c.norm())
}

/// The forward escape sectors: union of the coordinate sectors for i >= 2.
pub fn in_plus_region(z: &[Complex64], radius: f64) -> bool {
    (1..z.len()).any(|i| in_coordinate_sector(z, i, radius))
}

/// The backward sector where the first coordinate dominates.
pub fn in_minus_region(z: &[Complex64], radius: f64) -> bool {
    in_coordinate_sector(z, 0, radius)
}

/// The widened backward sector `(k-1)|z_1| >= max(|z_2|, ..., |z_k|, radius)`.
pub fn in_wide_minus_region(z: &[Complex64], radius: f64) -> bool {
    let k = z.len();
    let lhs = (k - 1) as f64 * z[0].norm();
    lhs >= radius && z[1..].iter().all(|c| lhs >= c.norm())
}

/// Filtration data for a perturbed weak-shift family: the radius, the
/// sandwich constants `m_low < 1 < m_high` with
/// `m_low sup|z|^d <= |last coordinate of S_n(z)| <= m_high sup|z|^d`
/// on the forward sectors, and the log-scale constant governing the Green
/// sequence's Cauchy rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiltrationSpec {
    pub k: usize,
    pub degree: u32,
    pub radius: f64,
    pub m_low: f64,
    pub m_high: f64,
    pub m_tilde: f64,
}

impl FiltrationSpec {
    pub fn new(
        k: usize,
        degree: u32,
        radius: f64,
        m_low: f64,
        m_high: f64,
        m_tilde: f64,
    ) -> Result<Self> {
        if !(0.0 < m_low && m_low < 1.0 && 1.0 < m_high) {
            return Err(Error::parameter("need 0 < m_low < 1 < m_high"));
        }
        if radius <= 1.0 {
            return Err(Error::parameter("filtration radius must exceed 1"));
        }
        if degree < 2 {
            return Err(Error::parameter("map degree must be >= 2"));
        }
        Ok(FiltrationSpec {
            k,
            degree,
            radius,
            m_low,
            m_high,
            m_tilde,
        })
    }

    /// Certified tail of the Green sequence after `n` steps inside the
    /// forward sectors: `sum_{i > n} m_tilde / d^i`.
    pub fn green_tail(&self, n: usize) -> f64 {
        let d = self.degree as f64;
        self.m_tilde / (d.powi(n as i32) * (d - 1.0))
    }
}

fn family_constants(shifts: &[PerturbedWeakShift]) -> Result<(usize, u32, u32, f64, usize)> {
    if shifts.is_empty() {
        return Err(Error::parameter("empty shift family"));
    }
    let k = shifts[0].k();
    let degree = shifts[0].degree;
    if shifts.iter().any(|s| s.k() != k || s.degree != degree) {
        return Err(Error::parameter(
            "shift family members must share k and the perturbation degree",
        ));
    }
    let base_degree = shifts.iter().map(|s| s.base.family_degree).max().unwrap();
    let mut coeff_bound = 0.0f64;
    for s in shifts {
        coeff_bound = coeff_bound.max(s.base.a.norm());
        coeff_bound = coeff_bound.max(s.base.p.max_coeff_norm());
    }
    let m0 = count_up_to(k - 1, base_degree);
    Ok((k, degree, base_degree, coeff_bound, m0))
}

/// Deterministic samples of the forward sectors at moduli radius..8*radius,
/// including points on the sector boundary where all other coordinates are
/// at the maximal allowed modulus.
pub fn sample_plus_region(
    k: usize,
    radius: f64,
    count: usize,
    seed: u64,
) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for s in 0..count {
        let i = 1 + s % (k - 1);
        let dominant = radius * (1.0 + rng.gen_range(0.0..7.0));
        let mut z = vec![Complex64::new(0.0, 0.0); k];
        z[i] = Complex64::from_polar(dominant, rng.gen_range(0.0..std::f64::consts::TAU));
        for (j, c) in z.iter_mut().enumerate() {
            if j == i {
                continue;
            }
            // Every fourth sample sits on the sector boundary.
            let frac = if s % 4 == 0 { 1.0 } else { rng.gen_range(0.0..1.0) };
            let modulus = dominant / (k - 1) as f64 * frac;
            *c = Complex64::from_polar(modulus, rng.gen_range(0.0..std::f64::consts::TAU));
        }
        out.push(z);
    }
    out
}

/// Verify the sandwich and the one-step sector inclusion at sampled points
/// of the forward sectors; returns the first violation description.
pub fn verify_filtration_samples(
    shifts: &[PerturbedWeakShift],
    spec: &FiltrationSpec,
    count: usize,
    seed: u64,
) -> std::result::Result<(), String> {
    let k = spec.k;
    let d = spec.degree;
    let samples = sample_plus_region(k, spec.radius, count, seed);
    for (s, z) in samples.iter().enumerate() {
        let shift = &shifts[s % shifts.len()];
        let w = crate::maps::PolyMap::Perturbed(shift.clone()).evaluate(z);
        let sup_z = sup_norm(z);
        let sup_w = sup_norm(&w);
        let last = w[k - 1].norm();
        if (sup_w - last).abs() > 1e-9 * sup_w {
            return Err(format!(
                "sup norm not attained at the last coordinate at sample {s}"
            ));
        }
        let lo = spec.m_low * sup_z.powi(d as i32);
        let hi = spec.m_high * sup_z.powi(d as i32);
        if !(lo <= last && last <= hi) {
            return Err(format!(
                "sandwich violated at sample {s}: {lo:.3e} <= {last:.3e} <= {hi:.3e}"
            ));
        }
        if !in_coordinate_sector(&w, k - 1, spec.radius * spec.radius) {
            return Err(format!(
                "image of sample {s} left the dominant sector of radius R^2"
            ));
        }
    }
    Ok(())
}

/// Search the least power-of-two radius for which the analytic sufficient
/// inequalities hold and a deterministic boundary sample passes, and derive
/// the sandwich constants with the perturbation margin `C / R^2` folded in.
pub fn find_filtration_spec(shifts: &[PerturbedWeakShift]) -> Result<FiltrationSpec> {
    let (k, degree, _base_degree, coeff_bound, m0) = family_constants(shifts)?;
    let d = degree as f64;
    let km1 = (k - 1) as f64;
    // Uniform bound on |a_n z_1 + p_n| relative to sup|z|^{d-2} on the
    // forward sectors.
    let c_pert = coeff_bound * (m0 as f64 + 1.0);
    let mut radius = 2.0f64;
    let cap = 2.0f64.powi(40);
    while radius <= cap {
        let eps = c_pert / (radius * radius);
        let m_low = 1.0 / km1 - eps;
        let m_high = km1 + eps;
        let analytic = m_low > 0.0
            && m_low * radius >= 2.0 * km1
            && m_low * radius.powi(degree as i32 - 2) >= 1.0
            && (coeff_bound * m0 as f64 + 1.0) / km1.powi(degree as i32 - 2) < radius * radius;
        if analytic {
            let m_tilde = (radius.ln())
                .max(m_low.ln().abs())
                .max(m_high.ln().abs())
                .max((coeff_bound.max(1.0) * (m0 as f64 + d)).ln().abs());
            let spec = FiltrationSpec::new(k, degree, radius, m_low, m_high, m_tilde)?;
            if verify_filtration_samples(shifts, &spec, 1000, 0x66696c74).is_ok() {
                return Ok(spec);
            }
        }
        radius *= 2.0;
    }
    Err(Error::SearchFailure(format!(
        "no radius below 2^40 satisfied the filtration inequalities \
         (perturbation margin {c_pert:.3e}, k = {k}, degree = {degree})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::germ::Polynomial;
    use crate::maps::WeakShift;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn trivial_family(k: usize, d: u32) -> Vec<PerturbedWeakShift> {
        let base = WeakShift::new(k, c(0.5, 0.0), Polynomial::zero(k - 1, d - 2), d - 2).unwrap();
        vec![PerturbedWeakShift::new(base, d).unwrap()]
    }

    #[test]
    fn region_predicates() {
        let z = [c(0.1, 0.0), c(0.2, 0.0), c(5.0, 0.0)];
        assert!(in_coordinate_sector(&z, 2, 4.0));
        assert!(in_plus_region(&z, 4.0));
        assert!(!in_minus_region(&z, 4.0));
        assert!(!in_plus_region(&z, 6.0));
        let w = [c(5.0, 0.0), c(0.2, 0.0), c(2.4, 0.0)];
        assert!(in_minus_region(&w, 4.0));
        assert!(in_wide_minus_region(&w, 4.0));
        // Wide sector admits points the narrow one rejects.
        let v = [c(2.0, 0.0), c(3.0, 0.0), c(0.0, 0.0)];
        assert!(!in_minus_region(&v, 3.5));
        assert!(in_wide_minus_region(&v, 3.5));
    }

    #[test]
    fn trivial_family_spec_passes_samples() {
        let family = trivial_family(3, 4);
        let spec = find_filtration_spec(&family).unwrap();
        assert!(spec.m_low > 0.0 && spec.m_low < 1.0 && spec.m_high > 1.0);
        assert!(spec.radius > 1.0);
        verify_filtration_samples(&family, &spec, 1000, 7).unwrap();
    }

    #[test]
    fn doubling_the_radius_preserves_the_inequalities() {
        let family = trivial_family(3, 5);
        let spec = find_filtration_spec(&family).unwrap();
        let doubled = FiltrationSpec::new(
            spec.k,
            spec.degree,
            spec.radius * 2.0,
            spec.m_low,
            spec.m_high,
            spec.m_tilde.max((spec.radius * 2.0).ln()),
        )
        .unwrap();
        verify_filtration_samples(&family, &doubled, 1000, 8).unwrap();
    }

    #[test]
    fn green_tail_is_geometric() {
        let spec = FiltrationSpec::new(3, 4, 16.0, 0.4, 2.5, 3.0).unwrap();
        let t0 = spec.green_tail(0);
        assert!((t0 - 1.0).abs() < 1e-12); // 3 / (1 * 3)
        assert!((spec.green_tail(1) - t0 / 4.0).abs() < 1e-12);
    }
}
