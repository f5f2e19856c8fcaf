//! Dynamics invariants beyond the acceptance pack: backward-sector growth of
//! the inverse maps, nesting of the escape-region preimages, slot discipline
//! of solved coefficient tables, horizon stability of the solved bounds, and
//! germ-level agreement checks.

use nabasin::conjugation::{solve_conjugation, SlotKind};
use nabasin::dynamics::{
    classify_point, find_filtration_spec, in_coordinate_sector, sup_norm, Classification,
};
use nabasin::germ::Polynomial;
use nabasin::maps::{
    lower_triangular_normalize, perturb, random_triangular_germs, random_weak_shifts,
    AttractionBounds, AutoSequence, PerturbedWeakShift, PolyMap, WeakShift,
};
use nabasin::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn test_family(degree: u32, seed: u64) -> Vec<PerturbedWeakShift> {
    let shifts = random_weak_shifts(3, degree - 2, seed, 4, 0.3, 0.7).unwrap();
    perturb(&shifts, degree).unwrap()
}

#[test]
fn inverse_growth_on_the_backward_sector() {
    // On the backward sector the inverse maps grow with exponent d^2 - d in
    // the first coordinate: the ratio to |z_1|^{d^2-d} stays in a uniform
    // band across scales.
    let degree = 4u32;
    let family = test_family(degree, 21);
    let spec = find_filtration_spec(&family).unwrap();
    let expo = (degree * degree - degree) as i32;
    let mut rng = ChaCha8Rng::seed_from_u64(5150);
    let mut ratios: Vec<f64> = Vec::new();
    for scale in [2.0, 4.0, 8.0, 16.0] {
        for s in 0..250 {
            let dom = spec.radius * scale * (1.0 + rng.gen_range(0.0..0.5));
            let mut z = vec![c(0.0, 0.0); 3];
            z[0] = Complex64::from_polar(dom, rng.gen_range(0.0..std::f64::consts::TAU));
            for w in z.iter_mut().skip(1) {
                *w = Complex64::from_polar(
                    dom / 2.0 * rng.gen_range(0.0..1.0),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                );
            }
            let shift = &family[s % family.len()];
            let pre = PolyMap::Perturbed(shift.clone())
                .evaluate_inverse(&z)
                .unwrap();
            ratios.push(pre[0].norm() / dom.powi(expo));
        }
    }
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    assert!(lo > 1e-2 && hi < 1e2, "ratio band [{lo:.3e}, {hi:.3e}]");
}

#[test]
fn escape_region_preimages_are_nested() {
    // Once an orbit point is in the dominant sector, the next one is too:
    // the preimages of the sector under longer prefixes nest upward.
    let family = test_family(4, 33);
    let spec = find_filtration_spec(&family).unwrap();
    let seq =
        AutoSequence::periodic(family.iter().cloned().map(PolyMap::Perturbed).collect()).unwrap();
    let k = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(7321);
    let cap = 1e60;
    for _ in 0..500 {
        let mut z: Vec<Complex64> = (0..k)
            .map(|_| {
                Complex64::from_polar(
                    spec.radius * rng.gen_range(0.0..3.0),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                )
            })
            .collect();
        let mut was_inside = false;
        for n in 0..12 {
            let inside = in_coordinate_sector(&z, k - 1, spec.radius);
            if was_inside {
                assert!(
                    inside,
                    "orbit left the dominant sector at step {n} after entering"
                );
            }
            was_inside = was_inside || inside;
            if sup_norm(&z) > cap {
                break;
            }
            z = seq.map(n).evaluate(&z);
        }
    }
}

#[test]
fn in_basin_orbits_contract_once_inside_the_ball() {
    // A genuinely attracting weak-shift family: after a full cycle of k
    // steps inside the ball the sup norm must have contracted.
    let k = 3;
    let a = c(0.4, 0.0);
    let shifts: Vec<WeakShift> = (0..2)
        .map(|_| WeakShift::new(k, a, Polynomial::zero(k - 1, 2), 2).unwrap())
        .collect();
    let family = perturb(&shifts, 4).unwrap();
    let spec = find_filtration_spec(&family).unwrap();
    let seq =
        AutoSequence::periodic(family.iter().cloned().map(PolyMap::Perturbed).collect()).unwrap();
    let r_tilde = 0.1;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let z: Vec<Complex64> = (0..k)
            .map(|_| {
                Complex64::from_polar(
                    r_tilde * rng.gen_range(0.01..0.9),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                )
            })
            .collect();
        match classify_point(&seq, &z, &spec, r_tilde, 50) {
            Classification::InBasin { at: 0 } => {}
            other => panic!("ball point classified {other:?}"),
        }
        // Per-cycle contraction of the sup norm.
        let mut w = z.clone();
        let mut prev = sup_norm(&w);
        for cycle in 0..4 {
            for j in 0..k {
                w = seq.map(cycle * k + j).evaluate(&w);
            }
            let cur = sup_norm(&w);
            assert!(cur < prev, "cycle {cycle} did not contract");
            prev = cur;
        }
    }
}

#[test]
fn normalized_diagonals_stay_in_the_sampled_band() {
    let seq = random_triangular_germs(2, 3, 5, 4, 0.35, 0.55, 0.04, 0.03).unwrap();
    let norm = lower_triangular_normalize(&seq, 16).unwrap();
    let est = nabasin::maps::estimate_attraction_bounds(&norm, 0.5, 100, 8).unwrap();
    assert!(est.contraction_ok);
    for n in 0..8 {
        let lin = norm.map(n).linear_part();
        assert!(lin.is_lower_triangular(1e-10));
        for i in 0..2 {
            let d = lin[(i, i)].norm();
            assert!(
                d >= est.lower - 1e-6 && d <= est.upper + 1e-6,
                "diagonal modulus {d} outside [{}, {}]",
                est.lower,
                est.upper
            );
        }
    }
}

#[test]
fn slot_discipline_of_solved_tables() {
    let seq = random_triangular_germs(3, 4, 13, 3, 0.2, 0.55, 0.05, 0.05)
        .unwrap()
        .with_bounds(AttractionBounds::new(0.15, 0.6, 1.0).unwrap());
    let sol = solve_conjugation(&seq, 4, 10, 1e-9).unwrap();
    for (&(coordinate, ref index), &(kind, ref alpha, ref rho)) in sol.table.iter() {
        match kind {
            SlotKind::Alpha => {
                assert_eq!(index.get(coordinate), 0, "modification slots avoid z_i");
                assert!(rho.iter().all(|v| v.norm() == 0.0));
            }
            SlotKind::Rho => {
                assert!(index.get(coordinate) >= 1, "germ slots contain z_i");
                assert!(alpha.iter().all(|v| v.norm() == 0.0));
            }
            SlotKind::FixedLinear => {
                assert_eq!(index.degree(), 1);
            }
        }
    }
    // Top-degree emptiness is recorded per coordinate.
    assert_eq!(sol.top_degree_zero.len(), 3);
}

#[test]
fn bound_constant_is_stable_under_horizon_doubling() {
    let seq = random_triangular_germs(2, 3, 17, 4, 0.35, 0.55, 0.05, 0.06)
        .unwrap()
        .with_bounds(AttractionBounds::new(0.3, 0.6, 1.0).unwrap());
    let short = solve_conjugation(&seq, 3, 10, 1e-9).unwrap();
    let long = solve_conjugation(&seq, 3, 20, 1e-9).unwrap();
    // Early coefficients agree to the tail bound.
    for (key, (_, alpha_s, rho_s)) in short.table.iter() {
        for n in 0..=10 {
            let da = (alpha_s[n] - long.table.alpha(key.0, &key.1, n)).norm();
            let dr = (rho_s[n] - long.table.rho(key.0, &key.1, n)).norm();
            assert!(da < 1e-10 && dr < 1e-10, "slot {key:?} drifted at n = {n}");
        }
    }
    assert!((short.bound_constant - long.bound_constant).abs() < 1.0);
}

#[test]
fn perturbation_preserves_low_order_germs() {
    let shifts = random_weak_shifts(3, 2, 41, 3, 0.3, 0.7).unwrap();
    let family = perturb(&shifts, 5).unwrap();
    for (s, p) in shifts.iter().zip(&family) {
        let low = PolyMap::Shift(s.clone()).germ(3);
        let pert = PolyMap::Perturbed(p.clone()).germ(3);
        assert_eq!(low.coeff_distance(&pert), 0.0, "degree <= d-2 germs must match");
    }
}

#[test]
fn shift_factorization_germ_roundtrip() {
    let seq = random_triangular_germs(3, 5, 7, 3, 0.15, 0.55, 0.05, 0.05)
        .unwrap()
        .with_bounds(AttractionBounds::new(0.1, 0.6, 1.0).unwrap());
    let sol = solve_conjugation(&seq, 5, 6, 1e-9).unwrap();
    for n in 0..3 {
        let factors = sol.triangular_factors(n).unwrap();
        let shifts = nabasin::maps::shift_factorize(factors).unwrap();
        let composed = PolyMap::Composite(shifts.into_iter().map(PolyMap::Shift).collect());
        let dist = composed.germ(5).coeff_distance(&sol.g_germ(n));
        assert!(dist < 1e-10, "n = {n}: germ distance {dist:.3e}");
    }
}
