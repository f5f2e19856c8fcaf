//! Orbit iteration, basin/escape classification and Green's function
//! estimation with certified geometric tails.

use num_complex::Complex64;

use super::{in_plus_region, sup_norm, FiltrationSpec};
use crate::error::{Error, Result};
use crate::maps::AutoSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitDirection {
    Forward,
    /// The non-autonomous backward dynamics: the inverse maps applied in the
    /// same index order.
    Inverse,
}

/// Iteration aborts once the sup-norm exceeds this degree-dependent cap, so
/// one more polynomial evaluation cannot overflow doubles.
pub fn overflow_cap(degree: u32) -> f64 {
    10f64.powf(280.0 / degree as f64)
}

/// The orbit `z, S_1 z, S_2 S_1 z, ...` (or the inverse-map orbit), exactly
/// `steps + 1` points. Overflow is reported, never silently saturated.
pub fn orbit(
    seq: &AutoSequence,
    z: &[Complex64],
    steps: usize,
    direction: OrbitDirection,
) -> Result<Vec<Vec<Complex64>>> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut w = z.to_vec();
    out.push(w.clone());
    for n in 0..steps {
        w = match direction {
            OrbitDirection::Forward => seq.map(n).evaluate(&w),
            OrbitDirection::Inverse => seq.map(n).evaluate_inverse(&w)?,
        };
        if !w.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::Overflow { step: n + 1 });
        }
        out.push(w.clone());
    }
    Ok(out)
}

/// Outcome of basin/escape classification. `Undecided` is first-class: no
/// heuristic promotion is ever applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// The orbit entered the certified attraction ball at this step.
    InBasin { at: usize },
    /// The orbit entered the forward escape sectors at this step.
    Escaping { at: usize },
    Undecided { maxiter: usize },
}

/// Classify a point: in-basin on entering the sup-norm ball of radius
/// `r_tilde`, escaping on entering the forward sectors, undecided otherwise.
pub fn classify_point(
    seq: &AutoSequence,
    z: &[Complex64],
    spec: &FiltrationSpec,
    r_tilde: f64,
    maxiter: usize,
) -> Classification {
    let cap = overflow_cap(spec.degree);
    let mut w = z.to_vec();
    for n in 0..=maxiter {
        if sup_norm(&w) < r_tilde {
            return Classification::InBasin { at: n };
        }
        if in_plus_region(&w, spec.radius) {
            return Classification::Escaping { at: n };
        }
        if n == maxiter || sup_norm(&w) > cap {
            break;
        }
        w = seq.map(n).evaluate(&w);
    }
    Classification::Undecided { maxiter }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreenStatus {
    /// Tail bound certified below the requested tolerance (or the point is
    /// in the attraction ball, where the value is exactly zero).
    Converged,
    /// Overflow guard hit before certification; the value carries the last
    /// finite estimate.
    EscapedEarly,
    HitIterationCap,
}

/// A Green's function estimate along one trajectory.
#[derive(Debug, Clone, Copy)]
pub struct GreenEstimate {
    pub value: f64,
    pub iterations: usize,
    /// Certified bound on |value - limit| once the orbit is inside the
    /// forward sectors; infinite when no certification was reached.
    pub tail_bound: f64,
    pub status: GreenStatus,
}

/// One row of the per-step diagnostics trace.
#[derive(Debug, Clone, Copy)]
pub struct TraceRow {
    pub n: usize,
    pub sup_norm: f64,
    pub green_value: f64,
    pub tail_bound: f64,
}

/// Estimate `lim d^{-n} log+ sup|S(n) z|`, stopping as soon as the certified
/// geometric tail drops below `tol`, the orbit enters the attraction ball
/// (value exactly 0), the overflow guard fires, or `maxiter` is exhausted.
pub fn green_estimate(
    seq: &AutoSequence,
    z: &[Complex64],
    spec: &FiltrationSpec,
    r_tilde: Option<f64>,
    tol: f64,
    maxiter: usize,
) -> Result<GreenEstimate> {
    let (est, _) = green_estimate_impl(seq, z, spec, r_tilde, tol, maxiter, false)?;
    Ok(est)
}

/// Same as [`green_estimate`], also returning the per-step trace.
pub fn green_trace(
    seq: &AutoSequence,
    z: &[Complex64],
    spec: &FiltrationSpec,
    r_tilde: Option<f64>,
    tol: f64,
    maxiter: usize,
) -> Result<(GreenEstimate, Vec<TraceRow>)> {
    green_estimate_impl(seq, z, spec, r_tilde, tol, maxiter, true)
}

fn green_estimate_impl(
    seq: &AutoSequence,
    z: &[Complex64],
    spec: &FiltrationSpec,
    r_tilde: Option<f64>,
    tol: f64,
    maxiter: usize,
    want_trace: bool,
) -> Result<(GreenEstimate, Vec<TraceRow>)> {
    if tol <= 0.0 {
        return Err(Error::parameter("tolerance must be positive"));
    }
    let d = spec.degree as f64;
    let cap = overflow_cap(spec.degree);
    let mut w = z.to_vec();
    let mut trace = Vec::new();
    let mut value = 0.0f64;
    let mut tail = f64::INFINITY;
    let mut inside = false;
    for n in 0..=maxiter {
        let sup = sup_norm(&w);
        value = sup.ln().max(0.0) / d.powi(n as i32);
        if !inside && in_plus_region(&w, spec.radius) {
            inside = true;
        }
        if inside {
            tail = spec.green_tail(n);
        }
        if want_trace {
            trace.push(TraceRow {
                n,
                sup_norm: sup,
                green_value: value,
                tail_bound: tail,
            });
        }
        if let Some(r) = r_tilde {
            if sup < r {
                // Inside the certified attraction ball the limit vanishes.
                return Ok((
                    GreenEstimate {
                        value: 0.0,
                        iterations: n,
                        tail_bound: 0.0,
                        status: GreenStatus::Converged,
                    },
                    trace,
                ));
            }
        }
        if inside && tail <= tol {
            return Ok((
                GreenEstimate {
                    value,
                    iterations: n,
                    tail_bound: tail,
                    status: GreenStatus::Converged,
                },
                trace,
            ));
        }
        if sup > cap {
            return Ok((
                GreenEstimate {
                    value,
                    iterations: n,
                    tail_bound: tail,
                    status: GreenStatus::EscapedEarly,
                },
                trace,
            ));
        }
        if n == maxiter {
            break;
        }
        w = seq.map(n).evaluate(&w);
    }
    Ok((
        GreenEstimate {
            value,
            iterations: maxiter,
            tail_bound: tail,
            status: GreenStatus::HitIterationCap,
        },
        trace,
    ))
}

/// Relative defect of the periodic functional equation: the Green value of
/// the m-block image against `d^m` times the value at the point, both
/// estimated along the same periodically restricted family.
pub fn green_functional_check(
    seq: &AutoSequence,
    m: usize,
    z: &[Complex64],
    spec: &FiltrationSpec,
    tol: f64,
    maxiter: usize,
) -> Result<f64> {
    let periodic = crate::maps::periodic_restriction(seq, m)?;
    let image = orbit(&periodic, z, m, OrbitDirection::Forward)?
        .pop()
        .expect("orbit returns steps + 1 points");
    let g_z = green_estimate(&periodic, z, spec, None, tol, maxiter)?;
    let g_im = green_estimate(&periodic, &image, spec, None, tol, maxiter)?;
    if g_z.status == GreenStatus::HitIterationCap || g_im.status == GreenStatus::HitIterationCap {
        return Err(Error::Inconclusive(
            "a Green estimate hit the iteration cap".into(),
        ));
    }
    let scale = (spec.degree as f64).powi(m as i32);
    let lhs = g_im.value;
    let rhs = scale * g_z.value;
    Ok((lhs - rhs).abs() / rhs.abs().max(1.0))
}
