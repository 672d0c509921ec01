//! Exact boundedness ranges.
//!
//! Every quantity in this module is an arbitrary-precision rational; no
//! floating point enters. Lower endpoints that fall at or below 1 are clamped
//! to an open endpoint at 1, and `+inf` is a first-class upper endpoint.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Error, Result};
use crate::index::HartogsExponent;
use crate::moments::SymbolSpec;

/// Shorthand for the exact rational type used throughout.
pub type Rational = BigRational;

/// `num/den` as a rational.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Parses `"4/3"`, `"-2"`, `"0.25"` or `"1e-3"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || domain(format!("cannot parse `{text}` as an exact rational"));
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(domain(format!("zero denominator in `{text}`")));
        }
        return Ok(Rational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let negative = mantissa.starts_with('-');
    let digits = mantissa.trim_start_matches(['-', '+']);
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all = format!("{whole}{frac}");
    let mut value = Rational::from_integer(BigInt::from_str(&all).map_err(|_| bad())?);
    let shift = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let scale = Rational::from_integer(num::pow(ten, shift.unsigned_abs() as usize));
    if shift >= 0 {
        value *= scale;
    } else {
        value /= scale;
    }
    Ok(if negative { -value } else { value })
}

/// A rational, or `+inf`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Extended {
    Finite(Rational),
    Infinity,
}

impl Extended {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Extended::Finite(q) => Some(q),
            Extended::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinity)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Extended::Finite(q) => q.to_f64().unwrap_or(f64::NAN),
            Extended::Infinity => f64::INFINITY,
        }
    }
}

impl PartialOrd for Extended {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(match (self, other) {
            (Extended::Infinity, Extended::Infinity) => Ordering::Equal,
            (Extended::Infinity, _) => Ordering::Greater,
            (_, Extended::Infinity) => Ordering::Less,
            (Extended::Finite(a), Extended::Finite(b)) => a.cmp(b),
        })
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(q) => write!(f, "{q}"),
            Extended::Infinity => write!(f, "inf"),
        }
    }
}

/// An interval of Lebesgue exponents. All ranges produced here are open.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PRange {
    pub lower: Rational,
    pub upper: Extended,
    pub lower_open: bool,
    pub upper_open: bool,
}

impl PRange {
    /// Open interval `(max(lower, 1), upper)`.
    fn open_clamped(lower: Rational, upper: Extended) -> Self {
        let one = Rational::one();
        Self {
            lower: if lower < one { one } else { lower },
            upper,
            lower_open: true,
            upper_open: true,
        }
    }

    pub fn contains(&self, p: &Rational) -> bool {
        let above = if self.lower_open { *p > self.lower } else { *p >= self.lower };
        let below = match &self.upper {
            Extended::Infinity => true,
            Extended::Finite(u) => {
                if self.upper_open {
                    p < u
                } else {
                    p <= u
                }
            }
        };
        above && below
    }
}

impl fmt::Display for PRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lower_open { '(' } else { '[' };
        let r = if self.upper_open { ')' } else { ']' };
        write!(f, "{l}{}, {}{r}", self.lower, self.upper)
    }
}

/// The pair `(c, d)` of a type-(c,d) kernel bound
/// `|z2|^c |w2|^d / (|1 - z2 w2bar|^2 |z2^n w2bar^n - z1^m w1bar^m|^2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeCD {
    pub c: Rational,
    pub d: Rational,
}

impl TypeCD {
    pub fn new(c: Rational, d: Rational) -> Self {
        Self { c, d }
    }

    /// `(A, A)`, the type of the Bergman projection.
    pub fn bergman(exp: HartogsExponent) -> Self {
        let a = kernel_exponent(exp);
        Self::new(a.clone(), a)
    }
}

/// `A = 2n - 1 + (1 - n)/m`.
pub fn kernel_exponent(exp: HartogsExponent) -> Rational {
    let (m, n) = (exp.m(), exp.n());
    int(2 * n - 1) + rat(1 - n, m)
}

/// `M = (2m+2n)/(m+n-1)`.
pub fn upper_threshold(exp: HartogsExponent) -> Rational {
    let (m, n) = (exp.m(), exp.n());
    rat(2 * m + 2 * n, m + n - 1)
}

/// The Bergman projection is bounded exactly on
/// `((2m+2n)/(m+n+1), (2m+2n)/(m+n-1))`.
pub fn bergman_range(exp: HartogsExponent) -> PRange {
    let (m, n) = (exp.m(), exp.n());
    PRange::open_clamped(
        rat(2 * m + 2 * n, m + n + 1),
        Extended::Finite(upper_threshold(exp)),
    )
}

/// `a_max = (m+n-1)/m`, the largest admissible power of `|z2|`.
pub fn mod_power_window(exp: HartogsExponent) -> Rational {
    rat(exp.m() + exp.n() - 1, exp.m())
}

/// Range of `T_{|z2|^a}`: `((2m+2n)/(m+n+1+ma), (2m+2n)/(m+n-1))`.
pub fn toeplitz_mod_power_range(exp: HartogsExponent, a: &Rational) -> Result<PRange> {
    if a.is_negative() || *a > mod_power_window(exp) {
        return Err(domain(format!(
            "symbol power a = {a} outside [0, {}]",
            mod_power_window(exp)
        )));
    }
    let (m, n) = (exp.m(), exp.n());
    let lower = int(2 * m + 2 * n) / (int(m + n + 1) + int(m) * a);
    Ok(PRange::open_clamped(lower, Extended::Finite(upper_threshold(exp))))
}

/// Boundedness range of a type-(c,d) operator:
/// `((2n+2m)/(dm+2n+2m-2nm), (2n+2m)/(2nm-cm))`, provided both denominators
/// are positive and the first exceeds the second.
pub fn type_cd_range(exp: HartogsExponent, cd: &TypeCD) -> Result<PRange> {
    let (m, n) = (int(exp.m()), int(exp.n()));
    let two = int(2);
    let lower_den = &cd.d * &m + &two * &n + &two * &m - &two * &n * &m;
    let upper_den = &two * &n * &m - &cd.c * &m;
    if !lower_den.is_positive() {
        return Err(Error::Condition {
            condition: "dm + 2n + 2m - 2nm > 0",
            detail: format!("got {lower_den}"),
        });
    }
    if !upper_den.is_positive() {
        return Err(Error::Condition {
            condition: "2nm - cm > 0",
            detail: format!("got {upper_den}"),
        });
    }
    if lower_den <= upper_den {
        return Err(Error::Condition {
            condition: "dm + 2n + 2m - 2nm > 2nm - cm",
            detail: format!("got {lower_den} <= {upper_den}"),
        });
    }
    let num = &two * (&n + &m);
    Ok(PRange::open_clamped(
        &num / lower_den,
        Extended::Finite(num / upper_den),
    ))
}

/// Exponent windows `(a, b)` and `(a', b')` for the Schur test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchurTuple {
    pub a: Rational,
    pub b: Rational,
    pub a_prime: Rational,
    pub b_prime: Rational,
}

impl SchurTuple {
    /// Checks `0 < a < b` and `0 < a' < b'`.
    pub fn validate(&self) -> Result<()> {
        let zero = Rational::zero();
        let checks: [(&'static str, bool); 4] = [
            ("a > 0", self.a > zero),
            ("a < b", self.a < self.b),
            ("a' > 0", self.a_prime > zero),
            ("a' < b'", self.a_prime < self.b_prime),
        ];
        for (condition, ok) in checks {
            if !ok {
                return Err(Error::Condition {
                    condition,
                    detail: format!(
                        "a = {}, b = {}, a' = {}, b' = {}",
                        self.a, self.b, self.a_prime, self.b_prime
                    ),
                });
            }
        }
        Ok(())
    }
}

/// `a = 1 - c/2n`, `b = (d + 2n/m - 2n + 2)/2n` and the same with `c`, `d`
/// swapped for the primed pair.
pub fn schur_exponents(exp: HartogsExponent, cd: &TypeCD) -> Result<SchurTuple> {
    let (m, n) = (int(exp.m()), int(exp.n()));
    let two_n = int(2) * &n;
    let shift = &two_n / &m - &two_n + int(2);
    let t = SchurTuple {
        a: Rational::one() - &cd.c / &two_n,
        b: (&cd.d + &shift) / &two_n,
        a_prime: Rational::one() - &cd.d / &two_n,
        b_prime: (&cd.c + &shift) / &two_n,
    };
    t.validate()?;
    Ok(t)
}

/// Schur-test range `((a'+b)/b, (b'+a)/a)`.
pub fn schur_p_range(t: &SchurTuple) -> Result<PRange> {
    t.validate()?;
    Ok(PRange::open_clamped(
        (&t.a_prime + &t.b) / &t.b,
        Extended::Finite((&t.b_prime + &t.a) / &t.a),
    ))
}

/// Which half of the smoothing statement applies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Smoothing {
    /// Bounded into `L^r` for every `r < r_sup`.
    FullRange { r_sup: Rational },
    /// Bounded into `L^r` with `r = p + g`.
    Gain { g: Rational, r: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmoothingOutcome {
    pub kind: Smoothing,
    /// `M = (2m+2n)/(m+n-1)`.
    pub m_upper: Rational,
    /// `L = max((2m+2n)/(m+n+1+mn eta), 1)`.
    pub l_lower: Rational,
    /// `2(1/p - 1/M)`: full range iff `eta` reaches it.
    pub threshold_eta: Rational,
}

/// `L` for the boundary-distance symbol with power `eta`.
pub fn smoothing_lower(exp: HartogsExponent, eta: &Rational) -> Rational {
    let (m, n) = (exp.m(), exp.n());
    let l = int(2 * m + 2 * n) / (int(m + n + 1) + int(m * n) * eta);
    l.max(Rational::one())
}

/// Smoothing of `T_eta` with symbol `(|z2|^n - |z1|^m)^eta (1 - |z2|^2)^eta`
/// on `L^p`, `p` in the open window `(L, M)`.
pub fn smoothing_outcome(exp: HartogsExponent, eta: &Rational, p: &Rational) -> Result<SmoothingOutcome> {
    if eta.is_negative() {
        return Err(domain(format!("eta = {eta} must be nonnegative")));
    }
    let m_upper = upper_threshold(exp);
    let l_lower = smoothing_lower(exp, eta);
    if *p <= l_lower || *p >= m_upper {
        return Err(Error::Range(format!(
            "p = {p} outside ({l_lower}, {m_upper}); T_eta does not map L^p to L^r for r >= p"
        )));
    }
    let threshold_eta = int(2) * (p.recip() - m_upper.recip());
    let kind = if *eta >= threshold_eta {
        Smoothing::FullRange { r_sup: m_upper.clone() }
    } else {
        let g = if eta.is_zero() {
            Rational::zero()
        } else {
            p * p / (int(2) / eta - p)
        };
        let r = p + &g;
        assert!(r < m_upper, "smoothing gain overshoots M: p + G = {r}");
        Smoothing::Gain { g, r }
    };
    Ok(SmoothingOutcome { kind, m_upper, l_lower, threshold_eta })
}

/// Thresholds where the witness monomial breaks boundedness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnboundedThresholds {
    /// The adjoint fails on `L^p` for every `p >= adjoint_p_star`.
    pub adjoint_p_star: Extended,
    /// No positive bounded radial symbol is bounded at or above this.
    pub operator_upper: Rational,
}

pub fn unbounded_thresholds(exp: HartogsExponent, sym: &SymbolSpec) -> Result<UnboundedThresholds> {
    let (m, n) = (exp.m(), exp.n());
    let num = int(2 * m + 2 * n);
    let den = match sym {
        SymbolSpec::ModPower(a) => {
            if a.is_negative() || *a > mod_power_window(exp) {
                return Err(domain(format!(
                    "symbol power a = {a} outside [0, {}]",
                    mod_power_window(exp)
                )));
            }
            int(m + n - 1) - int(m) * a
        }
        SymbolSpec::BoundaryPower(eta) => {
            if eta.is_negative() {
                return Err(domain(format!("eta = {eta} must be nonnegative")));
            }
            int(m + n - 1) - int(m * n) * eta
        }
    };
    let adjoint_p_star = if den.is_positive() {
        Extended::Finite(num / den)
    } else {
        Extended::Infinity
    };
    Ok(UnboundedThresholds {
        adjoint_p_star,
        operator_upper: upper_threshold(exp),
    })
}

/// `r < q (M/rho - 1)`, with `q` the conjugate exponent of `p`.
pub fn r_upper_constraint(exp: HartogsExponent, rho: &Rational, p: &Rational) -> Result<Rational> {
    if *p <= Rational::one() {
        return Err(domain(format!("p = {p} must exceed 1")));
    }
    if *rho < Rational::one() {
        return Err(Error::Condition {
            condition: "rho >= 1",
            detail: format!("got rho = {rho}"),
        });
    }
    let m_over_rho = upper_threshold(exp) / rho;
    if m_over_rho <= Rational::one() {
        return Err(Error::Condition {
            condition: "M/rho > 1",
            detail: format!("got M/rho = {m_over_rho}"),
        });
    }
    let q = p / (p - Rational::one());
    Ok(q * (m_over_rho - Rational::one()))
}

/// Agreement of the two forms of the smoothing gain under `rho = 2/(2 - eta)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GainConsistency {
    pub rho: Rational,
    /// `p^2 / (rho/(rho-1) - p)`.
    pub g_of_rho: Extended,
    /// `p^2 / (2/eta - p)`.
    pub g_of_eta: Extended,
}

impl GainConsistency {
    pub fn agrees(&self) -> bool {
        self.g_of_rho == self.g_of_eta
    }
}

fn gain(p: &Rational, conj: &Extended) -> Extended {
    match conj {
        Extended::Infinity => Extended::Finite(Rational::zero()),
        Extended::Finite(c) => {
            let den = c - p;
            if den.is_zero() {
                Extended::Infinity
            } else {
                Extended::Finite(p * p / den)
            }
        }
    }
}

pub fn gain_consistency(eta: &Rational, p: &Rational) -> Result<GainConsistency> {
    if eta.is_negative() {
        return Err(domain(format!("eta = {eta} must be nonnegative")));
    }
    if *eta >= int(2) {
        return Err(domain(format!("eta = {eta} >= 2 leaves rho = 2/(2 - eta) undefined")));
    }
    let rho = int(2) / (int(2) - eta);
    let rho_conj = if rho == Rational::one() {
        Extended::Infinity
    } else {
        Extended::Finite(&rho / (&rho - Rational::one()))
    };
    let eta_conj = if eta.is_zero() {
        Extended::Infinity
    } else {
        Extended::Finite(int(2) / eta)
    };
    Ok(GainConsistency {
        g_of_rho: gain(p, &rho_conj),
        g_of_eta: gain(p, &eta_conj),
        rho,
    })
}
