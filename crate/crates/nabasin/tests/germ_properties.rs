//! Property tests for the truncated germ algebra: associativity of truncated
//! composition, two-sided inversion, and truncation monotonicity.

use nabasin::germ::{graded_indices, GermMap, MultiIndex, Polynomial};
use nabasin::Complex64;
use proptest::prelude::*;

#[derive(Debug, Clone)]
struct GermSpec {
    k: usize,
    order: u32,
    /// Linear part: diagonal entries plus strictly-lower fill.
    diag: Vec<(f64, f64)>,
    lower: Vec<(f64, f64)>,
    higher: Vec<(f64, f64)>,
}

fn build_germ(spec: &GermSpec) -> GermMap {
    let k = spec.k;
    let order = spec.order;
    let mut lower_it = spec.lower.iter().cycle();
    let mut higher_it = spec.higher.iter().cycle();
    let mut components = Vec::with_capacity(k);
    for i in 0..k {
        let mut p = Polynomial::zero(k, order);
        let (re, im) = spec.diag[i];
        // Keep the diagonal away from zero so the germ stays invertible.
        let d = Complex64::new(re.signum() * (0.3 + re.abs() * 0.5), im * 0.3);
        p.set_coeff(MultiIndex::unit(k, i), d);
        for j in 0..i {
            let (re, im) = lower_it.next().unwrap();
            p.set_coeff(MultiIndex::unit(k, j), Complex64::new(re * 0.2, im * 0.2));
        }
        for deg in 2..=order {
            for m in graded_indices(k, deg) {
                let (re, im) = higher_it.next().unwrap();
                p.set_coeff(m, Complex64::new(re * 0.3, im * 0.3));
            }
        }
        components.push(p);
    }
    GermMap::new(k, order, components).unwrap()
}

fn germ_strategy(k: usize, order: u32) -> impl Strategy<Value = GermSpec> {
    let coeff = || (-1.0f64..1.0, -1.0f64..1.0);
    (
        proptest::collection::vec(coeff(), k),
        proptest::collection::vec(coeff(), 8),
        proptest::collection::vec(coeff(), 64),
    )
        .prop_map(move |(diag, lower, higher)| GermSpec {
            k,
            order,
            diag,
            lower,
            higher,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn composition_is_associative_up_to_truncation(
        a in germ_strategy(3, 5),
        b in germ_strategy(3, 5),
        cc in germ_strategy(3, 5),
    ) {
        let order = 5;
        let f = build_germ(&a);
        let g = build_germ(&b);
        let h = build_germ(&cc);
        let fg = f.compose_truncated(&g, order).unwrap();
        let left = fg.compose_truncated(&h, order).unwrap();
        let gh = g.compose_truncated(&h, order).unwrap();
        let right = f.compose_truncated(&gh, order).unwrap();
        prop_assert!(left.coeff_distance(&right) < 1e-12);
    }

    #[test]
    fn inversion_is_two_sided(a in germ_strategy(4, 4)) {
        let order = 4;
        let f = build_germ(&a);
        let inv = f.invert(order).unwrap();
        let id = GermMap::identity(4, order);
        let fwd = f.compose_truncated(&inv, order).unwrap();
        let bwd = inv.compose_truncated(&f, order).unwrap();
        prop_assert!(fwd.coeff_distance(&id) < 1e-12);
        prop_assert!(bwd.coeff_distance(&id) < 1e-12);
    }

    #[test]
    fn truncation_is_idempotent_and_monotone(a in germ_strategy(2, 6)) {
        let f = build_germ(&a);
        for low in 1..=6u32 {
            for high in low..=6u32 {
                let direct = f.truncate(low);
                let staged = f.truncate(high).truncate(low);
                prop_assert_eq!(&staged, &direct);
                prop_assert_eq!(&direct.truncate(low), &direct);
            }
        }
    }
}
