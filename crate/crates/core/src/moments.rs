//! Moments of radial symbols against monomials.
//!
//! In polar coordinates with `s = r1 / r2^(n/m)` every moment
//! `\int_H phi |z1|^{2 b1} |z2|^{2 b2} dV` factors into two Beta integrals,
//! which gives the monomial norms, the Toeplitz eigenvalues and the adjoint
//! constant in closed form. Quadrature is the fallback and the oracle.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use statrs::function::beta::ln_beta;

use crate::error::{domain, Error, Result};
use crate::index::{in_index_set, HartogsExponent, MultiIndex, WitnessMonomial};
use crate::quad::{integrate_polar_ln, QuadConfig, RadialPoint};
use crate::ranges::{parse_rational, Rational};

/// A radial Toeplitz symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymbolSpec {
    /// `|z2|^a`.
    ModPower(Rational),
    /// `(|z2|^n - |z1|^m)^eta (1 - |z2|^2)^eta`.
    BoundaryPower(Rational),
}

impl SymbolSpec {
    pub fn power(&self) -> &Rational {
        match self {
            SymbolSpec::ModPower(a) | SymbolSpec::BoundaryPower(a) => a,
        }
    }

    pub fn power_f64(&self) -> f64 {
        self.power().to_f64().unwrap_or(f64::NAN)
    }

    fn check(&self) -> Result<()> {
        if self.power().is_negative() {
            return Err(domain(format!("symbol power must be nonnegative, got {self}")));
        }
        Ok(())
    }

    /// `ln phi` at a quadrature node.
    pub fn ln_value(&self, exp: HartogsExponent, p: &RadialPoint) -> f64 {
        let t = self.power_f64();
        if t == 0.0 {
            return 0.0;
        }
        match self {
            SymbolSpec::ModPower(_) => t * p.ln_r2,
            SymbolSpec::BoundaryPower(_) => {
                let (m, n) = (exp.m(), exp.n());
                // |z2|^n - |z1|^m = r2^n (1 - s^m), 1 - r2^2 = (1 - r2)(1 + r2)
                let geo: f64 = (0..m).map(|k| p.s.powi(k as i32)).sum();
                let ln_gap = n as f64 * p.ln_r2 + (p.s_gap * geo).ln();
                let ln_disc = (p.r2_gap * (1.0 + p.r2)).ln();
                t * (ln_gap + ln_disc)
            }
        }
    }
}

impl fmt::Display for SymbolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolSpec::ModPower(a) => write!(f, "mod:{a}"),
            SymbolSpec::BoundaryPower(eta) => write!(f, "boundary:{eta}"),
        }
    }
}

impl FromStr for SymbolSpec {
    type Err = Error;

    /// `mod:<a>` or `boundary:<eta>`, the power as a decimal or fraction.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, value) = s
            .split_once(':')
            .ok_or_else(|| domain(format!("symbol `{s}` must look like mod:<a> or boundary:<eta>")))?;
        let power = parse_rational(value)?;
        let sym = match kind.trim() {
            "mod" => SymbolSpec::ModPower(power),
            "boundary" => SymbolSpec::BoundaryPower(power),
            other => return Err(domain(format!("unknown symbol kind `{other}`"))),
        };
        sym.check()?;
        Ok(sym)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    ClosedForm,
    Quadrature,
}

/// A moment together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentValue {
    pub value: f64,
    pub method: Method,
    /// Zero for closed forms.
    pub abs_error_bound: f64,
}

impl MomentValue {
    fn closed(value: f64) -> Self {
        Self { value, method: Method::ClosedForm, abs_error_bound: 0.0 }
    }
}

fn check_member(exp: HartogsExponent, alpha: MultiIndex) -> Result<()> {
    if in_index_set(exp, alpha) {
        Ok(())
    } else {
        Err(domain(format!(
            "{alpha} is not in the index set of H_{exp}; the norm integral diverges"
        )))
    }
}

/// `c_alpha^2 = pi^2 m / ((a1+1)(m(a2+1) + n(a1+1)))`.
pub fn norm_sq_formula(exp: HartogsExponent, alpha: MultiIndex) -> f64 {
    let (m, n) = (exp.m() as f64, exp.n() as f64);
    let (a1, a2) = (alpha.a1 as f64, alpha.a2 as f64);
    PI * PI * m / ((a1 + 1.0) * (m * (a2 + 1.0) + n * (a1 + 1.0)))
}

/// Squared `L^2` norm of `z^alpha` on `H_{m/n}`.
pub fn monomial_norm_sq(exp: HartogsExponent, alpha: MultiIndex) -> Result<MomentValue> {
    check_member(exp, alpha)?;
    Ok(MomentValue::closed(norm_sq_formula(exp, alpha)))
}

/// Eigenvalue of `T_{|z2|^a}` on `z^beta`:
/// `(m(2 b2+2) + 2n(b1+1)) / (m(2 b2+2+a) + 2n(b1+1))`.
pub fn mod_power_eigenvalue(exp: HartogsExponent, beta: MultiIndex, a: f64) -> Result<f64> {
    check_member(exp, beta)?;
    if !(a >= 0.0) {
        return Err(domain(format!("symbol power a = {a} must be nonnegative")));
    }
    let (m, n) = (exp.m() as f64, exp.n() as f64);
    let (b1, b2) = (beta.a1 as f64, beta.a2 as f64);
    let base = m * (2.0 * b2 + 2.0) + 2.0 * n * (b1 + 1.0);
    Ok(base / (base + m * a))
}

/// `\int_H phi |z1|^{2 b1} |z2|^{2 b2} dV` for real `b1`, `b2`.
///
/// Closed form through Beta functions; quadrature when the closed form
/// is not finite.
pub fn symbol_moment(exp: HartogsExponent, sym: &SymbolSpec, b1: f64, b2: f64) -> Result<MomentValue> {
    sym.check()?;
    let (m, n) = (exp.m() as f64, exp.n() as f64);
    let t = sym.power_f64();
    if !(b1 > -1.0) {
        return Err(domain(format!("moment exponent b1 = {b1} must exceed -1")));
    }
    let closed = match sym {
        SymbolSpec::ModPower(_) => {
            let den = m * (b2 + 1.0 + t / 2.0) + n * (b1 + 1.0);
            if !(den > 0.0) {
                return Err(domain(format!("moment diverges: m(b2+1+a/2) + n(b1+1) = {den} <= 0")));
            }
            PI * PI * m / ((b1 + 1.0) * den)
        }
        SymbolSpec::BoundaryPower(_) => {
            let x1 = (2.0 * b1 + 2.0) / m;
            let x2 = b2 + 1.0 + n * t / 2.0 + (n / m) * (b1 + 1.0);
            if !(x2 > 0.0) {
                return Err(domain(format!("Beta argument {x2} <= 0; the moment diverges")));
            }
            let ln_val = (2.0 * PI * PI / m).ln() + ln_beta(x1, t + 1.0) + ln_beta(x2, t + 1.0);
            ln_val.exp()
        }
    };
    if closed.is_finite() && closed > 0.0 {
        return Ok(MomentValue::closed(closed));
    }
    let cfg = QuadConfig::default();
    integrate_polar_ln(
        exp,
        |p| sym.ln_value(exp, p) + 2.0 * b1 * p.ln_r1 + 2.0 * b2 * p.ln_r2,
        &cfg,
    )
}

/// Eigenvalue of the boundary-distance Toeplitz operator on `z^beta`.
pub fn boundary_power_eigenvalue(exp: HartogsExponent, beta: MultiIndex, eta: f64) -> Result<MomentValue> {
    check_member(exp, beta)?;
    if !(eta >= 0.0) {
        return Err(domain(format!("eta = {eta} must be nonnegative")));
    }
    if eta == 0.0 {
        return Ok(MomentValue::closed(1.0));
    }
    let sym = SymbolSpec::BoundaryPower(
        Rational::from_float(eta).ok_or_else(|| domain(format!("eta = {eta} is not finite")))?,
    );
    let moment = symbol_moment(exp, &sym, beta.a1 as f64, beta.a2 as f64)?;
    let c2 = norm_sq_formula(exp, beta);
    Ok(MomentValue {
        value: moment.value / c2,
        method: moment.method,
        abs_error_bound: moment.abs_error_bound / c2,
    })
}

/// The coefficient `C` in `T_phi(z1^b1 conj(z2)^b2) = C z1^b1 z2^-b2`.
pub fn adjoint_antiholo_constant(exp: HartogsExponent, w: WitnessMonomial, sym: &SymbolSpec) -> Result<f64> {
    let hi = MultiIndex::new(w.beta1, w.beta2);
    let lo = MultiIndex::new(w.beta1, -w.beta2);
    if !in_index_set(exp, hi) || !in_index_set(exp, lo) {
        return Err(domain(format!(
            "both {hi} and {lo} must lie in the index set of H_{exp}"
        )));
    }
    let moment = symbol_moment(exp, sym, w.beta1 as f64, 0.0)?;
    Ok(moment.value / norm_sq_formula(exp, lo))
}

/// `\int_H |w2|^{A - 2n} dV = (2 pi)^2 / 2 * m / (m + n + 1)`.
pub fn remark_29_integral(exp: HartogsExponent) -> f64 {
    let (m, n) = (exp.m() as f64, exp.n() as f64);
    2.0 * PI * PI * m / (m + n + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::{enumerate_index_set, witness_monomial};
    use crate::quad::integrate_polar;
    use crate::ranges::rat;

    fn exp(m: i64, n: i64) -> HartogsExponent {
        HartogsExponent::new(m, n).unwrap()
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn norm_examples() {
        let v = monomial_norm_sq(exp(1, 1), MultiIndex::new(0, 0)).unwrap();
        assert!(close(v.value, 4.934802200544679, 1e-15));
        assert_eq!(v.method, Method::ClosedForm);
        assert_eq!(v.abs_error_bound, 0.0);
        let v = monomial_norm_sq(exp(2, 1), MultiIndex::new(0, -1)).unwrap();
        assert!(close(v.value, 19.739208802178716, 1e-15));
        assert!(monomial_norm_sq(exp(1, 1), MultiIndex::new(0, -2)).is_err());
    }

    #[test]
    fn norms_match_quadrature() {
        let cfg = QuadConfig::default();
        for (m, n) in [(1, 1), (3, 2)] {
            let e = exp(m, n);
            for alpha in enumerate_index_set(e, 3) {
                let closed = monomial_norm_sq(e, alpha).unwrap().value;
                let q = integrate_polar_ln(
                    e,
                    |p| 2.0 * alpha.a1 as f64 * p.ln_r1 + 2.0 * alpha.a2 as f64 * p.ln_r2,
                    &cfg,
                );
                let q = q.unwrap().value;
                // the cutoff removes a sliver of mass near r2 = 0
                assert!(close(q, closed, 1e-8), "{e} {alpha}: {q} vs {closed}");
            }
        }
    }

    #[test]
    fn mod_power_examples() {
        assert_eq!(mod_power_eigenvalue(exp(1, 1), MultiIndex::new(0, 0), 0.0).unwrap(), 1.0);
        assert!(close(mod_power_eigenvalue(exp(1, 1), MultiIndex::new(0, 0), 1.0).unwrap(), 0.8, 1e-15));
        assert!(close(mod_power_eigenvalue(exp(2, 1), MultiIndex::new(0, -1), 2.0).unwrap(), 1.0 / 3.0, 1e-15));
        assert!(mod_power_eigenvalue(exp(1, 1), MultiIndex::new(0, -2), 1.0).is_err());
    }

    #[test]
    fn mod_power_eigenvalue_matches_moment_ratio() {
        let e = exp(3, 2);
        for beta in enumerate_index_set(e, 3) {
            for a in [0.5, 1.0, 4.0 / 3.0] {
                let sym = SymbolSpec::ModPower(Rational::from_float(a).unwrap());
                let ratio = symbol_moment(e, &sym, beta.a1 as f64, beta.a2 as f64).unwrap().value
                    / norm_sq_formula(e, beta);
                assert!(close(mod_power_eigenvalue(e, beta, a).unwrap(), ratio, 1e-13));
            }
        }
    }

    #[test]
    fn mod_power_eigenvalue_decreases() {
        let e = exp(2, 1);
        for beta in enumerate_index_set(e, 4) {
            let mut prev = mod_power_eigenvalue(e, beta, 0.0).unwrap();
            assert_eq!(prev, 1.0);
            for k in 1..20 {
                let l = mod_power_eigenvalue(e, beta, k as f64 * 0.25).unwrap();
                assert!(l < prev && l > 0.0);
                prev = l;
            }
        }
    }

    #[test]
    fn boundary_eigenvalue_oracle_values() {
        let v = boundary_power_eigenvalue(exp(1, 1), MultiIndex::new(0, 0), 1.0).unwrap();
        assert_eq!(v.method, Method::ClosedForm);
        assert!(close(v.value, 8.0 / 105.0, 1e-12), "{}", v.value);
        let v = boundary_power_eigenvalue(exp(3, 2), MultiIndex::new(1, -2), 1.0).unwrap();
        assert!(close(v.value, 0.04591836734693878, 1e-12));
        let v = boundary_power_eigenvalue(exp(1, 1), MultiIndex::new(1, 1), 0.5).unwrap();
        assert!(close(v.value, 0.1514818655415018, 1e-12));
        assert_eq!(boundary_power_eigenvalue(exp(1, 1), MultiIndex::new(0, 0), 0.0).unwrap().value, 1.0);
    }

    #[test]
    fn boundary_eigenvalue_matches_quadrature() {
        let cfg = QuadConfig::default();
        let e = exp(2, 1);
        let eta = 0.5;
        let sym = SymbolSpec::BoundaryPower(rat(1, 2));
        for beta in enumerate_index_set(e, 2) {
            let closed = boundary_power_eigenvalue(e, beta, eta).unwrap().value;
            let q = integrate_polar_ln(
                e,
                |p| sym.ln_value(e, p) + 2.0 * beta.a1 as f64 * p.ln_r1 + 2.0 * beta.a2 as f64 * p.ln_r2,
                &cfg,
            )
            .unwrap()
            .value
                / norm_sq_formula(e, beta);
            assert!(close(q, closed, 1e-8), "{beta}: {q} vs {closed}");
            assert!(closed > 0.0 && closed <= 1.0);
        }
    }

    #[test]
    fn adjoint_constant_oracle_values() {
        let w = witness_monomial(exp(1, 1));
        let c0 = adjoint_antiholo_constant(exp(1, 1), w, &SymbolSpec::ModPower(rat(0, 1))).unwrap();
        assert!(close(c0, 0.5, 1e-15));
        let c1 = adjoint_antiholo_constant(exp(1, 1), w, &SymbolSpec::ModPower(rat(1, 1))).unwrap();
        assert!(close(c1, 0.4, 1e-15));
        assert!(c1 < c0);
        let w2 = witness_monomial(exp(2, 1));
        let cb = adjoint_antiholo_constant(exp(2, 1), w2, &SymbolSpec::BoundaryPower(rat(1, 1))).unwrap();
        assert!(close(cb, 1.0 / 24.0, 1e-12));
        let w3 = witness_monomial(exp(3, 2));
        let c3 = adjoint_antiholo_constant(exp(3, 2), w3, &SymbolSpec::BoundaryPower(rat(1, 4))).unwrap();
        assert!(close(c3, 0.06673155938692748, 1e-12));
        let bad = WitnessMonomial { beta1: 0, beta2: 2 };
        assert!(adjoint_antiholo_constant(exp(1, 1), bad, &SymbolSpec::ModPower(rat(0, 1))).is_err());
    }

    #[test]
    fn remark_29_values() {
        assert!(close(remark_29_integral(exp(1, 1)), 6.579736267392906, 1e-15));
        assert!(close(remark_29_integral(exp(2, 1)), 9.869604401089358, 1e-15));
        assert!(close(remark_29_integral(exp(3, 2)), 9.869604401089358, 1e-15));
        let e = exp(3, 2);
        let power = crate::ranges::kernel_exponent(e).to_f64().unwrap() - 2.0 * e.n() as f64;
        let q = integrate_polar(e, |p| p.r2.powf(power), &QuadConfig::default()).unwrap();
        assert!(close(q.value, remark_29_integral(e), 1e-9));
    }

    #[test]
    fn symbol_parsing() {
        assert_eq!("mod:0.5".parse::<SymbolSpec>().unwrap(), SymbolSpec::ModPower(rat(1, 2)));
        assert_eq!("boundary:1/4".parse::<SymbolSpec>().unwrap(), SymbolSpec::BoundaryPower(rat(1, 4)));
        assert!("mod:-1".parse::<SymbolSpec>().is_err());
        assert!("disc:1".parse::<SymbolSpec>().is_err());
        assert!("mod".parse::<SymbolSpec>().is_err());
        assert_eq!(SymbolSpec::BoundaryPower(rat(1, 4)).to_string(), "boundary:1/4");
    }
}
