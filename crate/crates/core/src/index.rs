//! Monomial index sets of the generalized Hartogs triangles.
//!
//! The domain `H_{m/n} = {|z1|^(m/n) < |z2| < 1}` carries the orthogonal
//! monomial basis `z1^a1 z2^a2` indexed by
//!
//! ```text
//! A_{m/n} = { (a1, a2) in Z^2 : a1 >= 0, n*a1 + m*a2 >= -m - n + 1 }.
//! ```
//!
//! Everything here is exact integer arithmetic.

use std::fmt;

use num::integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// The reduced fraction `gamma = m/n` defining `H_{m/n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HartogsExponent {
    m: i64,
    n: i64,
}

impl HartogsExponent {
    /// Reduces `m_raw/n_raw` to lowest terms. Both parts must be positive.
    pub fn new(m_raw: i64, n_raw: i64) -> Result<Self> {
        if m_raw < 1 || n_raw < 1 {
            return Err(domain(format!(
                "exponent parts must be positive integers, got m = {m_raw}, n = {n_raw}"
            )));
        }
        let g = m_raw.gcd(&n_raw);
        Ok(Self {
            m: m_raw / g,
            n: n_raw / g,
        })
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    /// `gamma = m/n` as a float.
    pub fn gamma(&self) -> f64 {
        self.m as f64 / self.n as f64
    }

    /// The ratio `n/m`, i.e. the power in `|z1| < |z2|^(n/m)`.
    pub fn inner_power(&self) -> f64 {
        self.n as f64 / self.m as f64
    }
}

impl fmt::Display for HartogsExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.m, self.n)
    }
}

/// `reduce_exponent`: the coprime pair representing `m_raw/n_raw`.
pub fn reduce_exponent(m_raw: i64, n_raw: i64) -> Result<HartogsExponent> {
    HartogsExponent::new(m_raw, n_raw)
}

/// An integer pair `(a1, a2)`, the exponent of `z1^a1 z2^a2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex {
    pub a1: i64,
    pub a2: i64,
}

impl MultiIndex {
    pub const fn new(a1: i64, a2: i64) -> Self {
        Self { a1, a2 }
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a1, self.a2)
    }
}

impl From<(i64, i64)> for MultiIndex {
    fn from((a1, a2): (i64, i64)) -> Self {
        Self { a1, a2 }
    }
}

/// The monomial `z1^beta1 conj(z2)^beta2` used to witness sharpness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WitnessMonomial {
    pub beta1: i64,
    pub beta2: i64,
}

/// Membership of `alpha` in `A_{m/n}`.
pub fn in_index_set(exp: HartogsExponent, alpha: MultiIndex) -> bool {
    let (m, n) = (exp.m, exp.n);
    alpha.a1 >= 0 && n * alpha.a1 + m * alpha.a2 >= -m - n + 1
}

/// Least `a2` with `(beta1, a2)` in `A_{m/n}`.
///
/// With `j = beta1 mod m` this is `-1 - n(beta1 - j)/m - floor(((j+1)n - 1)/m)`;
/// the first quotient is exact and the second is a floor of a nonnegative
/// numerator. Debug builds cross-check against a direct descent.
pub fn least_exponent(exp: HartogsExponent, beta1: i64) -> i64 {
    assert!(beta1 >= 0, "least_exponent needs beta1 >= 0, got {beta1}");
    let (m, n) = (exp.m, exp.n);
    let j = beta1 % m;
    let l = -1 - n * (beta1 - j) / m - ((j + 1) * n - 1) / m;
    debug_assert_eq!(l, least_exponent_descent(exp, beta1));
    l
}

/// Brute-force `least_exponent`: walk down from the real-valued bound until
/// membership fails.
pub(crate) fn least_exponent_descent(exp: HartogsExponent, beta1: i64) -> i64 {
    // start safely above: the real bound is (-m-n+1-n*beta1)/m >= -(n*beta1 + n)/m - 1
    let mut a2 = 1;
    while in_index_set(exp, MultiIndex::new(beta1, a2 - 1)) {
        a2 -= 1;
    }
    while !in_index_set(exp, MultiIndex::new(beta1, a2)) {
        a2 += 1;
    }
    a2
}

/// Members of `A_{m/n}` with `0 <= a1 <= cap` and `a2 <= cap`, sorted
/// lexicographically.
pub fn enumerate_index_set(exp: HartogsExponent, cap: i64) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for a1 in 0..=cap {
        let lo = least_exponent(exp, a1);
        out.extend((lo..=cap).map(|a2| MultiIndex::new(a1, a2)));
    }
    out
}

/// The sharpness witness: least `beta1 >= 0` with `n(beta1+1) = 1 (mod m)`
/// and `beta2 = -least_exponent(beta1)`.
pub fn witness_monomial(exp: HartogsExponent) -> WitnessMonomial {
    let (m, n) = (exp.m, exp.n);
    let beta1 = (0..m)
        .find(|b| (n * (b + 1)).mod_floor(&m) == 1 % m)
        .expect("gcd(m, n) = 1 guarantees a solution below m");
    let beta2 = 1 + (n * (beta1 + 1) - 1) / m;
    debug_assert_eq!(beta2, -least_exponent(exp, beta1));
    WitnessMonomial { beta1, beta2 }
}
