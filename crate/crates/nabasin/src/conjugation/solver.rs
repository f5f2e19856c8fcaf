//! Degree-by-degree solution of the non-autonomous germ relation
//! `h_{n+1} = [g_n ∘ h_n ∘ f_n^{-1}]_order`.
//!
//! The target family `g_n` is a two-factor Hénon product for k = 2 and a
//! chain of k triangular maps for k >= 3. Unknown coefficient slots are
//! classified per coordinate: indices avoiding the coordinate are solved
//! pointwise for a modification coefficient (the matching germ coefficient
//! stays identically zero), the remaining indices are solved as bounded
//! orbits of strictly expanding affine recurrences. Offset streams are
//! extracted by recomposition: the pending unknown is zeroed, the truncated
//! composition is assembled from cached monomial tables, and the defect
//! coefficient is read off; the affine dependence on the unknown has a known
//! closed-form factor.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::germ::{graded_indices, GermMap, MultiIndex, Polynomial, COEFF_ZERO_TOL};
use crate::linalg::CMatrix;
use crate::maps::{henon_product_k2, AutoSequence, ElementaryMap, PolyMap};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// How a coefficient slot is determined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotKind {
    /// Linear data pinned by the triangular linear parts.
    FixedLinear,
    /// Modification coefficient solved pointwise; the germ coefficient at
    /// this slot is identically zero.
    Alpha,
    /// Germ coefficient solved as a bounded orbit; the modification
    /// coefficient is identically zero (or pinned to 1 at the monic top
    /// degree for k = 2).
    Rho,
}

/// Solved coefficient streams, one pair per (coordinate, index) slot.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    pub k: usize,
    pub order: u32,
    pub window: usize,
    slots: BTreeMap<(usize, MultiIndex), (SlotKind, Vec<Complex64>, Vec<Complex64>)>,
}

impl CoefficientTable {
    pub fn kind(&self, coordinate: usize, index: &MultiIndex) -> Option<SlotKind> {
        self.slots
            .get(&(coordinate, index.clone()))
            .map(|(kind, _, _)| *kind)
    }

    pub fn alpha(&self, coordinate: usize, index: &MultiIndex, n: usize) -> Complex64 {
        self.slots
            .get(&(coordinate, index.clone()))
            .map(|(_, a, _)| a.get(n).copied().unwrap_or(ZERO))
            .unwrap_or(ZERO)
    }

    pub fn rho(&self, coordinate: usize, index: &MultiIndex, n: usize) -> Complex64 {
        self.slots
            .get(&(coordinate, index.clone()))
            .map(|(_, _, r)| r.get(n).copied().unwrap_or(ZERO))
            .unwrap_or(ZERO)
    }

    pub fn iter(
        &self,
    ) -> impl Iterator<Item = (&(usize, MultiIndex), &(SlotKind, Vec<Complex64>, Vec<Complex64>))>
    {
        self.slots.iter()
    }

    /// Supremum of all stored coefficient magnitudes.
    pub fn bound_constant(&self) -> f64 {
        self.slots
            .values()
            .flat_map(|(_, a, r)| a.iter().chain(r.iter()))
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

/// Per-index data of the solved target family.
#[derive(Debug, Clone)]
enum GData {
    /// k = 2: diagonal entries, subdiagonal entry and the two monic
    /// polynomials per index.
    Henon(Vec<(Complex64, Complex64, Polynomial, Polynomial)>),
    /// k >= 3: the triangular factors per index, in application order.
    Triangular(Vec<Vec<ElementaryMap>>),
}

/// Result of a conjugation solve: the constructed target family, the
/// conjugating germs (identity linear part), and residual statistics.
#[derive(Debug, Clone)]
pub struct ConjugationSolution {
    pub k: usize,
    pub order: u32,
    pub horizon: usize,
    /// Germ-relation residual over n < horizon, recomputed by independent
    /// composition after solving.
    pub residual: f64,
    /// Largest solved coefficient magnitude.
    pub bound_constant: f64,
    /// Worst residual per degree (degree, defect).
    pub per_degree_residual: Vec<(u32, f64)>,
    pub table: CoefficientTable,
    /// Conjugating germs for n = 0..=horizon, identity + higher order terms.
    pub h_germs: Vec<GermMap>,
    /// Per coordinate: true when the top-degree modification is identically
    /// zero across the solved window.
    pub top_degree_zero: Vec<bool>,
    g_data: GData,
}

impl ConjugationSolution {
    /// The solved target automorphism at index n (valid for n <= horizon).
    pub fn g_map(&self, n: usize) -> PolyMap {
        match &self.g_data {
            GData::Henon(data) => {
                let (a, c, p, q) = &data[n];
                henon_product_k2(*a, *c, p, q).expect("solver output is normalized")
            }
            GData::Triangular(data) => PolyMap::Composite(
                data[n]
                    .iter()
                    .cloned()
                    .map(PolyMap::Elementary)
                    .collect(),
            ),
        }
    }

    pub fn g_germ(&self, n: usize) -> GermMap {
        self.g_map(n).germ(self.order)
    }

    /// The triangular factors at index n (k >= 3 solves only).
    pub fn triangular_factors(&self, n: usize) -> Option<&[ElementaryMap]> {
        match &self.g_data {
            GData::Triangular(data) => Some(&data[n]),
            GData::Henon(_) => None,
        }
    }

    /// The Hénon-product data `(a_n, c_n, p_n, q_n)` at index n (k = 2 only).
    pub fn henon_data(&self, n: usize) -> Option<(Complex64, Complex64, Polynomial, Polynomial)> {
        match &self.g_data {
            GData::Henon(data) => Some(data[n].clone()),
            GData::Triangular(_) => None,
        }
    }

    /// The solved family as a sequence. Panics when queried past the solved
    /// window.
    pub fn g_sequence(&self) -> AutoSequence {
        let horizon = self.horizon;
        let data = Arc::new(self.clone());
        AutoSequence::from_fn(self.k, move |n| {
            assert!(
                n <= horizon,
                "target family queried at n = {n}, beyond the solved horizon {horizon}"
            );
            data.g_map(n)
        })
    }
}

/// Maximum coefficient defect of `[g_n ∘ h_n ∘ f_n^{-1}]_order - h_{n+1}`
/// over the given index range, recomputed by plain truncated composition
/// (independent of the solver's incremental tables).
pub fn residual(
    sol: &ConjugationSolution,
    f: &AutoSequence,
    range: std::ops::Range<usize>,
) -> Result<f64> {
    if f.k() != sol.k {
        return Err(Error::parameter("solution and sequence dimension mismatch"));
    }
    let order = sol.order;
    let mut worst = 0.0f64;
    for n in range {
        if n + 1 >= sol.h_germs.len() {
            return Err(Error::parameter(format!(
                "residual range exceeds the solved window at n = {n}"
            )));
        }
        let f_inv = f.map(n).inverse_germ(order)?;
        let inner = sol.h_germs[n].compose_truncated(&f_inv, order)?;
        let lhs = sol.g_germ(n).compose_truncated(&inner, order)?;
        worst = worst.max(lhs.coeff_distance(&sol.h_germs[n + 1]));
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// solver internals
// ---------------------------------------------------------------------------

struct SolveState {
    k: usize,
    order: u32,
    window: usize,
    udiag: Vec<Vec<Complex64>>,
    ubar: Vec<Vec<Complex64>>,
    usub: Vec<CMatrix>,
    f_inv: Vec<GermMap>,
    /// Per n, per index m: the composition of the monomial z^m with f_n^{-1},
    /// truncated to the solve order.
    f_pow: Vec<BTreeMap<MultiIndex, Polynomial>>,
    /// Per coordinate: modification coefficient streams keyed by index
    /// (indices avoid the coordinate).
    alpha: Vec<BTreeMap<MultiIndex, Vec<Complex64>>>,
    /// Per coordinate: germ coefficient streams keyed by index.
    rho: Vec<BTreeMap<MultiIndex, Vec<Complex64>>>,
}

impl SolveState {
    fn ubar_pow(&self, n: usize, m: &MultiIndex) -> Complex64 {
        let mut acc = ONE;
        for (l, &e) in m.exponents().iter().enumerate() {
            for _ in 0..e {
                acc *= self.ubar[n][l];
            }
        }
        acc
    }

    /// Coefficient of z^m in component c of `h_n ∘ f_n^{-1}`, reflecting all
    /// currently solved germ coefficients.
    fn w_coeff(&self, c: usize, m: &MultiIndex, n: usize) -> Complex64 {
        let mut acc = self.f_inv[n].component(c).coeff(m);
        for (key, stream) in &self.rho[c] {
            let s = stream[n];
            if s == ZERO {
                continue;
            }
            acc += s * self.f_pow[n][key].coeff(m);
        }
        acc
    }

    /// Component c of `h_n ∘ f_n^{-1}` as a polynomial, truncated to `cap`.
    fn w_germ_component(&self, c: usize, n: usize, cap: u32) -> Polynomial {
        let mut p = self.f_inv[n].component(c).truncate(cap);
        for (key, stream) in &self.rho[c] {
            let s = stream[n];
            if s == ZERO {
                continue;
            }
            p.add_assign_scaled(&self.f_pow[n][key], s);
        }
        p.truncate(cap)
    }

    /// Backward-iterated bounded orbit of `x_{n+1} = beta_n x_n + gamma_n`
    /// across the full window, zero-seeded above the top index.
    fn backward_orbit(
        &self,
        c: usize,
        m: &MultiIndex,
        betas: &[Complex64],
        gammas: &[Complex64],
    ) -> Result<Vec<Complex64>> {
        let mut out = vec![ZERO; betas.len()];
        let mut x = ZERO;
        for n in (0..betas.len()).rev() {
            let b = betas[n];
            if b.norm() <= 1.0 {
                return Err(Error::HypothesisViolation {
                    coordinate: c + 1,
                    index: m.exponents().to_vec(),
                    n,
                    modulus: b.norm(),
                });
            }
            x = (x - gammas[n]) / b;
            out[n] = x;
        }
        Ok(out)
    }

    fn h_germ(&self, n: usize) -> GermMap {
        let mut g = GermMap::identity(self.k, self.order);
        for c in 0..self.k {
            let mut comp = g.component(c).clone();
            for (m, stream) in &self.rho[c] {
                comp.add_to_coeff(m.clone(), stream[n]);
            }
            g.set_component(c, comp);
        }
        g.prune(COEFF_ZERO_TOL)
    }
}

fn build_state(f: &AutoSequence, order: u32, window: usize) -> Result<SolveState> {
    let k = f.k();
    let mut f_inv = Vec::with_capacity(window);
    let mut udiag = Vec::with_capacity(window);
    let mut ubar = Vec::with_capacity(window);
    let mut usub = Vec::with_capacity(window);
    for n in 0..window {
        let map = f.map(n);
        let lin = map.linear_part();
        if !lin.is_lower_triangular(1e-9) {
            return Err(Error::domain(format!(
                "linear part at n = {n} is not lower triangular; normalize the sequence first"
            )));
        }
        let diag = lin.diag();
        if diag.iter().any(|d| d.norm() < 1e-300) {
            return Err(Error::domain(format!("singular linear part at n = {n}")));
        }
        udiag.push(diag.clone());
        ubar.push(diag.iter().map(|d| ONE / d).collect());
        usub.push(lin);
        f_inv.push(map.inverse_germ(order)?);
    }
    // Monomial tables: z^m composed with f_n^{-1}, built by a graded product
    // recurrence.
    let mut f_pow = Vec::with_capacity(window);
    for inv in f_inv.iter() {
        let mut tab: BTreeMap<MultiIndex, Polynomial> = BTreeMap::new();
        for d in 1..=order {
            for m in graded_indices(k, d) {
                let p = if d == 1 {
                    inv.component(m.first_support().unwrap()).clone()
                } else {
                    let l = m.first_support().unwrap();
                    let rest = m.checked_sub(&MultiIndex::unit(k, l)).unwrap();
                    tab[&rest].mul_truncated(&tab[&MultiIndex::unit(k, l)], order)
                };
                tab.insert(m, p);
            }
        }
        f_pow.push(tab);
    }
    Ok(SolveState {
        k,
        order,
        window,
        udiag,
        ubar,
        usub,
        f_inv,
        f_pow,
        alpha: vec![BTreeMap::new(); k],
        rho: vec![BTreeMap::new(); k],
    })
}

/// Linear modification rows: the c-th factor of the triangular chain must
/// turn the partial product of earlier factors into the first c+1 rows of
/// the full linear part.
fn degree_one_alphas(state: &mut SolveState) -> Result<()> {
    let k = state.k;
    for n in 0..state.window {
        for c in 0..k {
            if c == 0 {
                continue; // first factor is diagonal in its row
            }
            // Partial product with rows 0..c from the linear part, identity below.
            let mut prev = CMatrix::identity(k);
            for i in 0..c {
                for j in 0..k {
                    prev[(i, j)] = state.usub[n][(i, j)];
                }
            }
            let prev_inv = prev.inverse()?;
            for l in 0..c {
                let mut entry = ZERO;
                for j in 0..k {
                    entry += state.usub[n][(c, j)] * prev_inv[(j, l)];
                }
                let key = MultiIndex::unit(k, l);
                state
                    .alpha[c]
                    .entry(key)
                    .or_insert_with(|| vec![ZERO; state.window])[n] = entry;
            }
        }
    }
    Ok(())
}

fn expansion_window(
    f: &AutoSequence,
    order: u32,
    horizon: usize,
    tol: f64,
) -> Result<(usize, f64, f64)> {
    let bounds = f.bounds.ok_or_else(|| {
        Error::parameter("attraction bounds metadata is required for a conjugation solve")
    })?;
    if bounds.upper.powi(order as i32) >= bounds.lower {
        return Err(Error::parameter(format!(
            "order {order} too small: upper^order = {:.3e} >= lower = {:.3e}",
            bounds.upper.powi(order as i32),
            bounds.lower
        )));
    }
    let c = 1.0 / bounds.upper;
    // Conservative offset magnitude for the tail-length estimate; accuracy is
    // re-checked by the independent residual afterwards.
    let magnitude = 1e3;
    let tail = super::affine::tail_length(c, magnitude, tol * 1e-2);
    Ok((horizon + tail + 1, c, magnitude))
}

/// Solve the germ relation for a sequence with lower-triangular linear
/// parts, producing the target family (Hénon-product form for k = 2, a
/// triangular chain for k >= 3), the conjugating germs with identity linear
/// part, and the recomputed relation residual.
pub fn solve_conjugation(
    f: &AutoSequence,
    order: u32,
    horizon: usize,
    tol: f64,
) -> Result<ConjugationSolution> {
    if order < 2 {
        return Err(Error::parameter("solve order must be >= 2"));
    }
    if tol <= 0.0 {
        return Err(Error::parameter("tolerance must be positive"));
    }
    let k = f.k();
    if k < 2 {
        return Err(Error::parameter("conjugation needs k >= 2"));
    }
    let (window, _c, _mag) = expansion_window(f, order, horizon, tol)?;
    let mut state = build_state(f, order, window)?;
    if k == 2 {
        solve_k2(&mut state)?;
    } else {
        degree_one_alphas(&mut state)?;
        solve_k_general(&mut state)?;
    }
    finalize(state, f, horizon, tol)
}

/// Coordinate-c slots of one graded degree, in lexicographic ascending
/// order. Lexicographic processing respects every dependency: with lower
/// triangular linear data, a coefficient at index m can only influence
/// defects at lexicographically larger indices of the same degree.
fn degree_slots(k: usize, degree: u32) -> Vec<MultiIndex> {
    let mut slots = graded_indices(k, degree);
    slots.sort_by(|a, b| a.cmp_lex(b));
    slots
}

fn solve_k_general(state: &mut SolveState) -> Result<()> {
    let k = state.k;
    let order = state.order;
    let window = state.window;
    for degree in 2..=order {
        // Partial-chain images of h_n ∘ f_n^{-1}; component c is replaced by
        // the c-th triangular factor's action once the coordinate is solved.
        let mut y: Vec<GermMap> = (0..window)
            .map(|n| {
                let comps = (0..k)
                    .map(|c| state.w_germ_component(c, n, degree))
                    .collect();
                GermMap::new(k, degree, comps).expect("w germ")
            })
            .collect();
        for c in 0..k {
            // Monomial tables over the components other than c.
            let v_keys: Vec<MultiIndex> = (1..=degree)
                .flat_map(|d| graded_indices(k, d))
                .filter(|m| m.get(c) == 0)
                .collect();
            let v_tabs: Vec<BTreeMap<MultiIndex, Polynomial>> = (0..window)
                .map(|n| {
                    let mut tab: BTreeMap<MultiIndex, Polynomial> = BTreeMap::new();
                    for m in &v_keys {
                        let l = m.first_support().unwrap();
                        let p = if m.degree() == 1 {
                            y[n].component(l).truncate(degree)
                        } else {
                            let rest = m.checked_sub(&MultiIndex::unit(k, l)).unwrap();
                            tab[&rest].mul_truncated(&tab[&MultiIndex::unit(k, l)], degree)
                        };
                        tab.insert(m.clone(), p);
                    }
                    tab
                })
                .collect();
            let defect = |state: &SolveState, m: &MultiIndex, n: usize| -> Complex64 {
                let mut acc = state.udiag[n][c] * state.w_coeff(c, m, n);
                for (key, stream) in &state.alpha[c] {
                    let s = stream[n];
                    if s == ZERO {
                        continue;
                    }
                    acc += s * v_tabs[n][key].coeff(m);
                }
                acc
            };
            for m in degree_slots(k, degree) {
                if m.get(c) == 0 {
                    // Modification slot: force the matching germ coefficient
                    // of h_{n+1} to vanish.
                    let mut stream = vec![ZERO; window];
                    for (n, slot) in stream.iter_mut().enumerate() {
                        let d = defect(state, &m, n);
                        let fac = v_tabs[n][&m].coeff(&m);
                        *slot = -d / fac;
                    }
                    state.alpha[c].insert(m, stream);
                } else {
                    // Germ slot: bounded orbit of the expanding recurrence.
                    let betas: Vec<Complex64> = (0..window)
                        .map(|n| state.udiag[n][c] * state.ubar_pow(n, &m))
                        .collect();
                    let gammas: Vec<Complex64> =
                        (0..window).map(|n| defect(state, &m, n)).collect();
                    let orbit = state.backward_orbit(c, &m, &betas, &gammas)?;
                    state.rho[c].insert(m, orbit);
                }
            }
            // Apply the freshly solved triangular factor to the partial chain.
            for (n, y_n) in y.iter_mut().enumerate() {
                let mut comp = state
                    .w_germ_component(c, n, degree)
                    .scale(state.udiag[n][c]);
                for (key, stream) in &state.alpha[c] {
                    let s = stream[n];
                    if s == ZERO {
                        continue;
                    }
                    comp.add_assign_scaled(&v_tabs[n][key], s);
                }
                y_n.set_component(c, comp.truncate(degree));
            }
        }
    }
    Ok(())
}

fn solve_k2(state: &mut SolveState) -> Result<()> {
    let order = state.order;
    let window = state.window;
    // Subdiagonal linear slot of the second coordinate.
    let b_stream: Vec<Complex64> = (0..window).map(|n| state.usub[n][(1, 0)]).collect();
    state
        .alpha[1]
        .insert(MultiIndex::unit(2, 0), b_stream.clone());
    for degree in 2..=order {
        if degree == order {
            // Monic top degree: both pure-power modifications are pinned to 1
            // and the corresponding germ slots become bounded orbits.
            state
                .alpha[0]
                .insert(MultiIndex::new(vec![0, order]), vec![ONE; window]);
            state
                .alpha[1]
                .insert(MultiIndex::new(vec![order, 0]), vec![ONE; window]);
        }
        for c in 0..2 {
            // Power tables of the composition arguments, rebuilt per
            // coordinate pass. Coordinate 0 needs powers of
            // u = w_2 + c_n^{-1} q_n(w_1); coordinate 1 needs powers of w_1.
            let arg_pows: Vec<Vec<Polynomial>> = (0..window)
                .map(|n| {
                    let w1 = state.w_germ_component(0, n, order);
                    let base = if c == 0 {
                        let mut q_of_w1 = w1.scale(b_stream[n]);
                        for (key, stream) in &state.alpha[1] {
                            if key.get(1) != 0 || key.degree() < 2 {
                                continue;
                            }
                            let s = stream[n];
                            if s == ZERO {
                                continue;
                            }
                            q_of_w1.add_assign_scaled(&pow_of(&w1, key.get(0), order), s);
                        }
                        let mut u = state.w_germ_component(1, n, order);
                        u.add_assign_scaled(&q_of_w1, state.ubar[n][1]);
                        u
                    } else {
                        w1
                    };
                    let mut pows =
                        vec![Polynomial::constant(2, ONE, order), base.clone()];
                    for _ in 2..=order {
                        let next = pows.last().unwrap().mul_truncated(&base, order);
                        pows.push(next);
                    }
                    pows
                })
                .collect();
            let defect = |state: &SolveState, m: &MultiIndex, n: usize| -> Complex64 {
                if c == 0 {
                    let mut acc = state.udiag[n][0] * state.w_coeff(0, m, n);
                    for (key, stream) in &state.alpha[0] {
                        let s = stream[n];
                        if s == ZERO {
                            continue;
                        }
                        acc += s * arg_pows[n][key.get(1) as usize].coeff(m);
                    }
                    acc
                } else {
                    let mut acc = state.udiag[n][1] * state.w_coeff(1, m, n)
                        + b_stream[n] * arg_pows[n][1].coeff(m);
                    for (key, stream) in &state.alpha[1] {
                        if key.degree() < 2 {
                            continue;
                        }
                        let s = stream[n];
                        if s == ZERO {
                            continue;
                        }
                        acc += s * arg_pows[n][key.get(0) as usize].coeff(m);
                    }
                    acc
                }
            };
            for m in degree_slots(2, degree) {
                let pure = if c == 0 {
                    m.get(0) == 0
                } else {
                    m.get(1) == 0
                };
                if pure && degree < order {
                    let mut stream = vec![ZERO; window];
                    for (n, slot) in stream.iter_mut().enumerate() {
                        let d = defect(state, &m, n);
                        let fac = arg_pows[n][degree as usize].coeff(&m);
                        *slot = -d / fac;
                    }
                    state.alpha[c].insert(m, stream);
                } else {
                    let betas: Vec<Complex64> = (0..window)
                        .map(|n| state.udiag[n][c] * state.ubar_pow(n, &m))
                        .collect();
                    let gammas: Vec<Complex64> =
                        (0..window).map(|n| defect(state, &m, n)).collect();
                    let orbit = state.backward_orbit(c, &m, &betas, &gammas)?;
                    state.rho[c].insert(m, orbit);
                }
            }
        }
    }
    Ok(())
}

fn pow_of(p: &Polynomial, e: u32, order: u32) -> Polynomial {
    let mut acc = Polynomial::constant(p.vars(), ONE, order);
    for _ in 0..e {
        acc = acc.mul_truncated(p, order);
    }
    acc
}

fn finalize(
    state: SolveState,
    f: &AutoSequence,
    horizon: usize,
    tol: f64,
) -> Result<ConjugationSolution> {
    let k = state.k;
    let order = state.order;
    let h_germs: Vec<GermMap> = (0..=horizon + 1).map(|n| state.h_germ(n)).collect();
    let g_data = match k {
        2 => {
            let mut data = Vec::with_capacity(horizon + 1);
            for n in 0..=horizon {
                let mut p = Polynomial::zero(1, order);
                let mut q = Polynomial::zero(1, order);
                q.set_coeff(MultiIndex::new(vec![1]), state.usub[n][(1, 0)]);
                for (key, stream) in &state.alpha[0] {
                    if key.degree() >= 2 {
                        p.set_coeff(MultiIndex::new(vec![key.get(1)]), stream[n]);
                    }
                }
                for (key, stream) in &state.alpha[1] {
                    if key.degree() >= 2 {
                        q.set_coeff(MultiIndex::new(vec![key.get(0)]), stream[n]);
                    }
                }
                data.push((
                    state.udiag[n][0],
                    state.udiag[n][1],
                    p.prune(COEFF_ZERO_TOL),
                    q.prune(COEFF_ZERO_TOL),
                ));
            }
            GData::Henon(data)
        }
        _ => {
            let mut data = Vec::with_capacity(horizon + 1);
            for n in 0..=horizon {
                let mut factors = Vec::with_capacity(k);
                for c in 0..k {
                    let mut p = Polynomial::zero(k - 1, order);
                    for (key, stream) in &state.alpha[c] {
                        let projected = key.project_avoiding(c);
                        p.add_to_coeff(projected, stream[n]);
                    }
                    factors.push(ElementaryMap::new(
                        k,
                        c,
                        state.udiag[n][c],
                        p.prune(COEFF_ZERO_TOL),
                    )?);
                }
                data.push(factors);
            }
            GData::Triangular(data)
        }
    };
    let top_degree_zero = (0..k)
        .map(|c| {
            state.alpha[c]
                .iter()
                .filter(|(m, _)| m.degree() == order)
                .all(|(_, stream)| {
                    stream[..=horizon.min(stream.len() - 1)]
                        .iter()
                        .all(|s| s.norm() <= COEFF_ZERO_TOL)
                })
        })
        .collect();
    let mut table_slots = BTreeMap::new();
    let keep = (horizon + 2).min(state.window);
    for c in 0..k {
        for (m, stream) in &state.alpha[c] {
            let kind = if m.degree() == 1 {
                SlotKind::FixedLinear
            } else if state.rho[c].contains_key(m) {
                SlotKind::Rho
            } else {
                SlotKind::Alpha
            };
            table_slots.insert(
                (c, m.clone()),
                (kind, stream[..keep].to_vec(), vec![ZERO; keep]),
            );
        }
        for (m, stream) in &state.rho[c] {
            // Monic k = 2 top slots already carry their pinned modification.
            let entry = table_slots
                .entry((c, m.clone()))
                .or_insert_with(|| (SlotKind::Rho, vec![ZERO; keep], vec![ZERO; keep]));
            entry.0 = SlotKind::Rho;
            entry.2 = stream[..keep].to_vec();
        }
    }
    let table = CoefficientTable {
        k,
        order,
        window: keep,
        slots: table_slots,
    };
    let bound_constant = table.bound_constant();
    let mut sol = ConjugationSolution {
        k,
        order,
        horizon,
        residual: f64::INFINITY,
        bound_constant,
        per_degree_residual: Vec::new(),
        table,
        h_germs,
        top_degree_zero,
        g_data,
    };
    // Independent verification of the germ relation.
    let mut per_degree = vec![0.0f64; order as usize + 1];
    let mut worst = 0.0f64;
    for n in 0..horizon {
        let f_inv = f.map(n).inverse_germ(order)?;
        let inner = sol.h_germs[n].compose_truncated(&f_inv, order)?;
        let lhs = sol.g_germ(n).compose_truncated(&inner, order)?;
        let rhs = &sol.h_germs[n + 1];
        for c in 0..k {
            let diff = lhs.component(c).sub(rhs.component(c));
            for (m, coeff) in diff.iter() {
                let d = m.degree() as usize;
                per_degree[d] = per_degree[d].max(coeff.norm());
                worst = worst.max(coeff.norm());
            }
        }
    }
    sol.residual = worst;
    sol.per_degree_residual = per_degree
        .iter()
        .enumerate()
        .skip(1)
        .map(|(d, &v)| (d as u32, v))
        .collect();
    if worst > tol {
        let diagnostics = sol
            .per_degree_residual
            .iter()
            .map(|(d, v)| format!("  degree {d}: max defect {v:.3e}"))
            .collect::<Vec<_>>()
            .join("\n");
        return Err(Error::Convergence {
            residual: worst,
            tol,
            diagnostics,
        });
    }
    Ok(sol)
}

/// Approximate conjugacy image `phi_n(z) = g(n)^{-1}(h_{n+1}(f(n)(z)))` for
/// the first n at which the forward orbit enters the handoff ball, together
/// with the Cauchy difference against the next stage.
#[derive(Debug, Clone)]
pub struct ChartEstimate {
    pub image: Vec<Complex64>,
    pub step: usize,
    pub cauchy_difference: f64,
}

pub fn basin_chart_estimate(
    f: &AutoSequence,
    sol: &ConjugationSolution,
    z: &[Complex64],
    delta: f64,
    maxiter: usize,
) -> Result<ChartEstimate> {
    if delta <= 0.0 {
        return Err(Error::parameter("handoff radius must be positive"));
    }
    let norm = |w: &[Complex64]| w.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let mut w = z.to_vec();
    let mut entered = None;
    for n in 0..=maxiter {
        if norm(&w) < delta {
            entered = Some(n);
            break;
        }
        if n == maxiter {
            break;
        }
        w = f.map(n).evaluate(&w);
    }
    let n0 = entered.ok_or(Error::NotInBasin { maxiter })?;
    if n0 + 1 > sol.horizon {
        return Err(Error::parameter(
            "handoff step exceeds the solved horizon; enlarge the solve window",
        ));
    }
    // After n forward maps the matching conjugating germ is h_n, and the
    // target prefix to invert consists of the first n maps.
    let chart = |n: usize, w_n: &[Complex64]| -> Result<Vec<Complex64>> {
        let mut v = sol.h_germs[n].eval(w_n);
        for j in (0..n).rev() {
            v = sol.g_map(j).evaluate_inverse(&v)?;
        }
        Ok(v)
    };
    let phi_n = chart(n0, &w)?;
    let w_next = f.map(n0).evaluate(&w);
    let phi_next = chart(n0 + 1, &w_next)?;
    let cauchy = phi_n
        .iter()
        .zip(&phi_next)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(ChartEstimate {
        image: phi_n,
        step: n0,
        cauchy_difference: cauchy,
    })
}
