//! Exponent tuples and the ordered index families driving the
//! degree-by-degree conjugation solver.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent tuple of a monomial in `k` variables.
///
/// The derived `Ord` is graded lexicographic (total degree first, then
/// lexicographic), which is the storage order of sparse polynomials.
/// Traversal orders used by the solver are separate explicit lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    /// The i-th standard basis index in `k` variables.
    pub fn unit(k: usize, i: usize) -> Self {
        let mut e = vec![0; k];
        e[i] = 1;
        MultiIndex(e)
    }

    pub fn zero(k: usize) -> Self {
        MultiIndex(vec![0; k])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), other.dim());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise difference; `None` when any entry would go negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// Position of the first nonzero exponent.
    pub fn first_support(&self) -> Option<usize> {
        self.0.iter().position(|&e| e > 0)
    }

    /// Insert a zero exponent at coordinate `i`, embedding an index over
    /// `k - 1` variables into `k` variables.
    pub fn embed_avoiding(&self, i: usize) -> MultiIndex {
        let mut e = Vec::with_capacity(self.0.len() + 1);
        e.extend_from_slice(&self.0[..i]);
        e.push(0);
        e.extend_from_slice(&self.0[i..]);
        MultiIndex(e)
    }

    /// Drop coordinate `i` (which must carry exponent zero), projecting onto
    /// the remaining `k - 1` variables.
    pub fn project_avoiding(&self, i: usize) -> MultiIndex {
        debug_assert_eq!(self.0[i], 0);
        let mut e = self.0.clone();
        e.remove(i);
        MultiIndex(e)
    }

    /// Plain lexicographic comparison (no degree grading).
    pub fn cmp_lex(&self, other: &MultiIndex) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The index families appearing in the coefficient bookkeeping of the
/// conjugation solver. All members are tuples over the ambient `k` variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexFamily {
    /// All m with 1 <= |m| <= max_degree.
    UpToDegree { max_degree: u32 },
    /// m_avoid = 0 and 1 <= |m| <= max_degree: the exponent support of a
    /// polynomial in the variables other than z_avoid.
    UpToDegreeAvoiding { max_degree: u32, avoid: usize },
    /// m_through >= 1, m != e_through, |m| <= max_degree: exponents of
    /// z_through * (monomials of degree 1..max_degree-1).
    ShiftedThrough { max_degree: u32, through: usize },
    /// |m| = degree and m_1 = ... = m_prefix = 0 (1-based prefix length).
    GradedZeroPrefix { degree: u32, prefix: usize },
    /// |m| = degree and m_l >= 1 for some l <= prefix: the graded complement
    /// of `GradedZeroPrefix`.
    GradedPrefixSupported { degree: u32, prefix: usize },
}

/// An index family together with an explicit traversal order.
#[derive(Debug, Clone)]
pub struct OrderedIndexSet {
    pub k: usize,
    pub family: IndexFamily,
    pub ordering: Vec<MultiIndex>,
}

impl OrderedIndexSet {
    pub fn len(&self) -> usize {
        self.ordering.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordering.is_empty()
    }

    pub fn contains(&self, m: &MultiIndex) -> bool {
        m.dim() == self.k && family_contains(self.family, m)
    }
}

fn family_contains(family: IndexFamily, m: &MultiIndex) -> bool {
    let d = m.degree();
    match family {
        IndexFamily::UpToDegree { max_degree } => d >= 1 && d <= max_degree,
        IndexFamily::UpToDegreeAvoiding { max_degree, avoid } => {
            d >= 1 && d <= max_degree && m.get(avoid) == 0
        }
        IndexFamily::ShiftedThrough {
            max_degree,
            through,
        } => d >= 2 && d <= max_degree && m.get(through) >= 1,
        IndexFamily::GradedZeroPrefix { degree, prefix } => {
            d == degree && (0..prefix).all(|l| m.get(l) == 0)
        }
        IndexFamily::GradedPrefixSupported { degree, prefix } => {
            d == degree && (0..prefix).any(|l| m.get(l) >= 1)
        }
    }
}

/// All exponent tuples over `k` variables with total degree exactly `degree`,
/// in lexicographic ascending order.
pub fn graded_indices(k: usize, degree: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut buf = vec![0u32; k];
    fill_graded(k, degree, 0, &mut buf, &mut out);
    out
}

fn fill_graded(k: usize, remaining: u32, pos: usize, buf: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if pos == k - 1 {
        buf[pos] = remaining;
        out.push(MultiIndex::new(buf.clone()));
        return;
    }
    for e in 0..=remaining {
        buf[pos] = e;
        fill_graded(k, remaining - e, pos + 1, buf, out);
    }
}

/// All tuples with 1 <= |m| <= max_degree, lexicographic ascending.
pub fn indices_up_to(k: usize, max_degree: u32) -> Vec<MultiIndex> {
    let mut out: Vec<MultiIndex> = (1..=max_degree).flat_map(|d| graded_indices(k, d)).collect();
    out.sort_by(|a, b| a.cmp_lex(b));
    out
}

/// Number of tuples with 1 <= |m| <= max_degree: C(k + d, k) - 1.
pub fn count_up_to(k: usize, max_degree: u32) -> usize {
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 1..=k as u128 {
        num *= max_degree as u128 + i;
        den *= i;
    }
    (num / den - 1) as usize
}

/// Enumerate an index family, lexicographically ascending.
pub fn enumerate_indices(k: usize, family: IndexFamily) -> Result<OrderedIndexSet> {
    if k < 1 {
        return Err(Error::parameter("dimension k must be >= 1"));
    }
    let check_coord = |i: usize, what: &str| -> Result<()> {
        if i >= k {
            Err(Error::parameter(format!(
                "{what} coordinate {i} out of range for k = {k}"
            )))
        } else {
            Ok(())
        }
    };
    let mut ordering: Vec<MultiIndex> = match family {
        IndexFamily::UpToDegree { max_degree } => indices_up_to(k, max_degree),
        IndexFamily::UpToDegreeAvoiding { max_degree, avoid } => {
            check_coord(avoid, "avoided")?;
            indices_up_to(k, max_degree)
                .into_iter()
                .filter(|m| m.get(avoid) == 0)
                .collect()
        }
        IndexFamily::ShiftedThrough {
            max_degree,
            through,
        } => {
            check_coord(through, "shift")?;
            if max_degree < 1 {
                return Err(Error::parameter("shifted family needs max_degree >= 1"));
            }
            indices_up_to(k, max_degree - 1)
                .into_iter()
                .map(|m| m.add(&MultiIndex::unit(k, through)))
                .collect()
        }
        IndexFamily::GradedZeroPrefix { degree, prefix } => {
            if prefix >= k {
                return Err(Error::parameter(format!(
                    "zero-prefix length {prefix} leaves no free coordinate for k = {k}"
                )));
            }
            graded_indices(k, degree)
                .into_iter()
                .filter(|m| (0..prefix).all(|l| m.get(l) == 0))
                .collect()
        }
        IndexFamily::GradedPrefixSupported { degree, prefix } => {
            if prefix >= k {
                return Err(Error::parameter(format!(
                    "prefix length {prefix} must be < k = {k}"
                )));
            }
            graded_indices(k, degree)
                .into_iter()
                .filter(|m| (0..prefix).any(|l| m.get(l) >= 1))
                .collect()
        }
    };
    ordering.sort_by(|a, b| a.cmp_lex(b));
    Ok(OrderedIndexSet { k, family, ordering })
}

/// Traversal order of the graded prefix-supported family built inductively:
/// the elements whose first nonzero coordinate is `prefix` come first, in
/// lexicographic ascending order, followed by the previously ordered family
/// with prefix length `prefix - 1`, unchanged.
///
/// `prefix` is the 1-based prefix length (the paper-facing parameter `i`
/// with 1 <= i <= k - 1); `degree` must be >= 2.
pub fn phi_ordering(k: usize, degree: u32, prefix: usize) -> Result<Vec<MultiIndex>> {
    if degree < 2 {
        return Err(Error::parameter("phi ordering needs degree >= 2"));
    }
    if prefix < 1 || prefix > k - 1 {
        return Err(Error::parameter(format!(
            "prefix {prefix} out of range 1..={} for k = {k}",
            k - 1
        )));
    }
    let mut new_block: Vec<MultiIndex> = graded_indices(k, degree)
        .into_iter()
        .filter(|m| m.get(prefix - 1) >= 1 && (0..prefix - 1).all(|l| m.get(l) == 0))
        .collect();
    new_block.sort_by(|a, b| a.cmp_lex(b));
    if prefix == 1 {
        return Ok(new_block);
    }
    let mut rest = phi_ordering(k, degree, prefix - 1)?;
    new_block.append(&mut rest);
    Ok(new_block)
}
