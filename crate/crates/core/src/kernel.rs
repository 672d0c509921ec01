//! Truncated Bergman kernel and the type-(c,d) majorants.

use num::complex::Complex64;
use num::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::index::{least_exponent, HartogsExponent};
use crate::moments::norm_sq_formula;
use crate::ranges::{kernel_exponent, Rational, TypeCD};

/// A point `(z1, z2)` of `C^2`. Operations check membership in the
/// particular `H_{m/n}` they are given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainPoint {
    pub z1: Complex64,
    pub z2: Complex64,
}

impl DomainPoint {
    pub const fn new(z1: Complex64, z2: Complex64) -> Self {
        Self { z1, z2 }
    }

    /// `|z1|^m < |z2|^n < 1`.
    pub fn is_in(&self, exp: HartogsExponent) -> bool {
        let a2 = self.z2.norm();
        a2 < 1.0 && self.z1.norm().powi(exp.m() as i32) < a2.powi(exp.n() as i32)
    }

    pub fn check(&self, exp: HartogsExponent) -> Result<()> {
        if self.is_in(exp) {
            Ok(())
        } else {
            Err(domain(format!("({}, {}) is not in H_{exp}", self.z1, self.z2)))
        }
    }
}

/// `z^k` by binary exponentiation; negative powers as reciprocals.
pub fn cpow(z: Complex64, k: i64) -> Complex64 {
    let mut base = z;
    let mut e = k.unsigned_abs();
    let mut acc = Complex64::new(1.0, 0.0);
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    if k < 0 {
        acc.inv()
    } else {
        acc
    }
}

/// `sum z^alpha conj(w)^alpha / c_alpha^2` over the capped index set.
pub fn kernel_partial_sum(exp: HartogsExponent, z: &DomainPoint, w: &DomainPoint, cap: i64) -> Result<Complex64> {
    if cap < 1 {
        return Err(domain(format!("cap = {cap} must be positive")));
    }
    z.check(exp)?;
    w.check(exp)?;
    let x = z.z1 * w.z1.conj();
    let y = z.z2 * w.z2.conj();
    let mut sum = Complex64::new(0.0, 0.0);
    for a1 in 0..=cap {
        let xa = cpow(x, a1);
        for a2 in least_exponent(exp, a1)..=cap {
            let alpha = crate::index::MultiIndex::new(a1, a2);
            sum += xa * cpow(y, a2) / norm_sq_formula(exp, alpha);
        }
    }
    Ok(sum)
}

struct Denominators {
    z2w2: Complex64,
    one: f64,
    cone: f64,
}

/// Singular sets first: they lie on the boundary, so membership alone would
/// hide which denominator vanished.
fn denominators(exp: HartogsExponent, z: &DomainPoint, w: &DomainPoint) -> Result<Denominators> {
    let y = z.z2 * w.z2.conj();
    let x = z.z1 * w.z1.conj();
    let one = (Complex64::new(1.0, 0.0) - y).norm_sqr();
    let cone = (cpow(y, exp.n()) - cpow(x, exp.m())).norm_sqr();
    if one == 0.0 {
        return Err(Error::Singularity("z2 conj(w2) = 1".into()));
    }
    if cone == 0.0 {
        return Err(Error::Singularity("z2^n conj(w2)^n = z1^m conj(w1)^m".into()));
    }
    z.check(exp)?;
    w.check(exp)?;
    Ok(Denominators { z2w2: y, one, cone })
}

/// `|z2 conj(w2)|^A / (|1 - z2 conj(w2)|^2 |z2^n conj(w2)^n - z1^m conj(w1)^m|^2)`.
pub fn kernel_estimate_rhs(exp: HartogsExponent, z: &DomainPoint, w: &DomainPoint) -> Result<f64> {
    let d = denominators(exp, z, w)?;
    let a = kernel_exponent(exp).to_f64().unwrap_or(f64::NAN);
    Ok(d.z2w2.norm().powf(a) / (d.one * d.cone))
}

/// `|z2|^c |w2|^d / (|1 - z2 conj(w2)|^2 |z2^n conj(w2)^n - z1^m conj(w1)^m|^2)`.
pub fn type_cd_rhs(exp: HartogsExponent, cd: &TypeCD, z: &DomainPoint, w: &DomainPoint) -> Result<f64> {
    let den = denominators(exp, z, w)?;
    let c = cd.c.to_f64().unwrap_or(f64::NAN);
    let d = cd.d.to_f64().unwrap_or(f64::NAN);
    Ok(z.z2.norm().powf(c) * w.z2.norm().powf(d) / (den.one * den.cone))
}

/// The type `(rho(A - 2n) + 2n, rho A)` that dominates `|K_eta|^rho`.
pub fn k_eta_type(exp: HartogsExponent, eta: &Rational, rho: &Rational) -> Result<TypeCD> {
    let one = Rational::from_integer(1.into());
    let two = Rational::from_integer(2.into());
    if *rho < one {
        return Err(domain(format!("rho = {rho} must be at least 1")));
    }
    if *eta < Rational::from_integer(0.into()) {
        return Err(domain(format!("eta = {eta} must be nonnegative")));
    }
    if rho * eta < &two * (rho - &one) {
        return Err(domain(format!(
            "need rho * eta >= 2(rho - 1), got rho = {rho}, eta = {eta}"
        )));
    }
    let a = kernel_exponent(exp);
    let two_n = Rational::from_integer((2 * exp.n()).into());
    Ok(TypeCD::new(rho * (&a - &two_n) + two_n, rho * a))
}

/// `type_cd_rhs` at the type of [`k_eta_type`].
pub fn k_eta_power_majorant(exp: HartogsExponent, eta: &Rational, rho: &Rational, z: &DomainPoint, w: &DomainPoint) -> Result<f64> {
    type_cd_rhs(exp, &k_eta_type(exp, eta, rho)?, z, w)
}

/// Where [`ratio_diagnostic`] draws its point pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleMargins {
    /// Lower bound on `|1 - z2 conj(w2)|`.
    pub diagonal: f64,
    /// Lower bound on `|z2^n conj(w2)^n - z1^m conj(w1)^m|`.
    pub cone: f64,
    /// Lower bound on `|z2|` and `|w2|`.
    pub z2_floor: f64,
    /// Upper bound on the per-term ratios `|z2 conj(w2)|` and
    /// `|z1 conj(w1)| / |z2 conj(w2)|^(n/m)` of the series.
    pub series_radius: f64,
}

impl Default for SampleMargins {
    fn default() -> Self {
        Self { diagonal: 0.05, cone: 0.05, z2_floor: 0.1, series_radius: 0.5 }
    }
}

/// Statistics of `|B_cap| / estimate` and of the same ratio at `2 cap`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioStats {
    pub samples: usize,
    pub cap: i64,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub max_ratio_doubled: f64,
    pub mean_ratio_doubled: f64,
    /// `|max(2 cap) - max(cap)| / max(cap)`.
    pub max_rel_change: f64,
    /// Largest pointwise relative change between the two caps.
    pub pointwise_rel_change: f64,
    /// Largest `|B(z,w) - conj(B(w,z))|` relative to `|B(z,w)|`.
    pub hermitian_defect: f64,
}

fn polar(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

fn draw_point(exp: HartogsExponent, rng: &mut ChaCha8Rng, floor: f64) -> DomainPoint {
    let r2: f64 = rng.gen_range(floor..1.0);
    let bound = r2.powf(exp.inner_power());
    let r1 = bound * rng.gen::<f64>().sqrt();
    DomainPoint::new(polar(rng, r1), polar(rng, r2))
}

/// `sample_count` pairs from a ChaCha8 stream seeded with `seed`, drawn by
/// rejection inside `margins`.
pub fn sample_pairs(exp: HartogsExponent, sample_count: usize, seed: u64, margins: &SampleMargins) -> Result<Vec<(DomainPoint, DomainPoint)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (m, n) = (exp.m(), exp.n());
    let mut out = Vec::with_capacity(sample_count);
    let budget = 100_000 + 10_000 * sample_count;
    let mut tries = 0;
    while out.len() < sample_count {
        tries += 1;
        if tries > budget {
            return Err(domain(format!(
                "could not draw {sample_count} pairs inside the sampling margins"
            )));
        }
        let z = draw_point(exp, &mut rng, margins.z2_floor);
        let w = draw_point(exp, &mut rng, margins.z2_floor);
        let x = z.z1 * w.z1.conj();
        let y = z.z2 * w.z2.conj();
        let ok = (Complex64::new(1.0, 0.0) - y).norm() >= margins.diagonal
            && (cpow(y, n) - cpow(x, m)).norm() >= margins.cone
            && y.norm() <= margins.series_radius
            && x.norm() <= margins.series_radius * y.norm().powf(exp.inner_power());
        if ok {
            out.push((z, w));
        }
    }
    Ok(out)
}

/// Empirical constant in `|B(z,w)| <= C * estimate(z,w)` and its stability
/// when the cap doubles.
pub fn ratio_diagnostic(exp: HartogsExponent, sample_count: usize, cap: i64, seed: u64) -> Result<RatioStats> {
    ratio_diagnostic_with(exp, sample_count, cap, seed, &SampleMargins::default())
}

pub fn ratio_diagnostic_with(exp: HartogsExponent, sample_count: usize, cap: i64, seed: u64, margins: &SampleMargins) -> Result<RatioStats> {
    if cap < 4 {
        return Err(domain(format!("cap = {cap} must be at least 4")));
    }
    if sample_count == 0 {
        return Err(domain("sample_count must be positive"));
    }
    let pairs = sample_pairs(exp, sample_count, seed, margins)?;
    let rows = pairs
        .par_iter()
        .map(|(z, w)| -> Result<(f64, f64, f64)> {
            let est = kernel_estimate_rhs(exp, z, w)?;
            let b = kernel_partial_sum(exp, z, w, cap)?;
            let b2 = kernel_partial_sum(exp, z, w, 2 * cap)?;
            let swapped = kernel_partial_sum(exp, w, z, cap)?;
            let defect = (b - swapped.conj()).norm() / b.norm();
            Ok((b.norm() / est, b2.norm() / est, defect))
        })
        .collect::<Result<Vec<_>>>()?;
    let k = rows.len() as f64;
    let max_ratio = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let max_ratio_doubled = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(RatioStats {
        samples: rows.len(),
        cap,
        max_ratio,
        mean_ratio: rows.iter().map(|r| r.0).sum::<f64>() / k,
        max_ratio_doubled,
        mean_ratio_doubled: rows.iter().map(|r| r.1).sum::<f64>() / k,
        max_rel_change: (max_ratio_doubled - max_ratio).abs() / max_ratio,
        pointwise_rel_change: rows.iter().map(|r| (r.1 - r.0).abs() / r.0).fold(0.0, f64::max),
        hermitian_defect: rows.iter().map(|r| r.2).fold(0.0, f64::max),
    })
}

/// Largest `|B_cap(z,w) phi(w)|^rho / majorant(z,w)` over sampled pairs, for
/// the boundary-distance symbol `phi` with power `eta`.
pub fn k_eta_majorant_constant(
    exp: HartogsExponent,
    eta: &Rational,
    rho: &Rational,
    sample_count: usize,
    cap: i64,
    seed: u64,
) -> Result<f64> {
    let cd = k_eta_type(exp, eta, rho)?;
    let (e, r) = (eta.to_f64().unwrap_or(f64::NAN), rho.to_f64().unwrap_or(f64::NAN));
    let (m, n) = (exp.m() as i32, exp.n() as i32);
    let pairs = sample_pairs(exp, sample_count, seed, &SampleMargins::default())?;
    let ratios = pairs
        .par_iter()
        .map(|(z, w)| -> Result<f64> {
            let (w1, w2) = (w.z1.norm(), w.z2.norm());
            let phi = ((w2.powi(n) - w1.powi(m)) * (1.0 - w2 * w2)).powf(e);
            let b = kernel_partial_sum(exp, z, w, cap)?;
            Ok((b.norm() * phi).powf(r) / type_cd_rhs(exp, &cd, z, w)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranges::rat;
    use std::f64::consts::PI;

    fn exp(m: i64, n: i64) -> HartogsExponent {
        HartogsExponent::new(m, n).unwrap()
    }

    fn pt(z1: (f64, f64), z2: (f64, f64)) -> DomainPoint {
        DomainPoint::new(Complex64::new(z1.0, z1.1), Complex64::new(z2.0, z2.1))
    }

    /// For m = n = 1 the kernel sums to conj-linear closed form
    /// `y / (pi^2 (1 - y)^2 (y - x)^2)` with `x = z1 conj(w1)`, `y = z2 conj(w2)`.
    fn hartogs_kernel(z: &DomainPoint, w: &DomainPoint) -> Complex64 {
        let x = z.z1 * w.z1.conj();
        let y = z.z2 * w.z2.conj();
        let one = Complex64::new(1.0, 0.0);
        y / ((one - y) * (one - y) * (y - x) * (y - x) * PI * PI)
    }

    #[test]
    fn estimate_examples() {
        let e = exp(1, 1);
        let z = pt((0.0, 0.0), (0.5, 0.0));
        assert!((kernel_estimate_rhs(e, &z, &z).unwrap() - 64.0 / 9.0).abs() < 1e-12);
        let zero = TypeCD::new(rat(0, 1), rat(0, 1));
        assert!((type_cd_rhs(e, &zero, &z, &z).unwrap() - 256.0 / 9.0).abs() < 1e-12);
        let w = pt((0.1, 0.2), (0.3, -0.4));
        let a = kernel_estimate_rhs(e, &z, &w).unwrap();
        assert_eq!(a, kernel_estimate_rhs(e, &w, &z).unwrap());
        assert_eq!(a, type_cd_rhs(e, &TypeCD::bergman(e), &z, &w).unwrap());
        let shifted = TypeCD::new(rat(1, 1), rat(3, 2));
        let b = type_cd_rhs(e, &shifted, &z, &w).unwrap();
        assert!((b / (type_cd_rhs(e, &TypeCD::bergman(e), &z, &w).unwrap() * 0.5f64.sqrt()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singular_denominators() {
        let e = exp(1, 1);
        let edge = pt((0.0, 0.0), (1.0, 0.0));
        assert!(matches!(kernel_estimate_rhs(e, &edge, &edge), Err(Error::Singularity(_))));
        let cone = pt((0.5, 0.0), (0.5, 0.0));
        assert!(matches!(kernel_estimate_rhs(e, &cone, &cone), Err(Error::Singularity(_))));
        let z = pt((0.0, 0.0), (0.5, 0.0));
        let outside = pt((0.9, 0.0), (0.5, 0.0));
        assert!(kernel_estimate_rhs(e, &outside, &z).is_err());
    }

    #[test]
    fn single_term() {
        let e = exp(1, 1);
        let z = pt((0.0, 0.0), (0.5, 0.0));
        let w = pt((0.0, 0.0), (0.3, 0.2));
        // cap 1 keeps the whole a1 = 0 column; with z1 = 0 only a1 = 0 survives
        let c = norm_sq_formula(e, crate::index::MultiIndex::new(0, 0));
        assert!((1.0 / c - 2.0 / (PI * PI)).abs() < 1e-15);
        assert!(kernel_partial_sum(e, &z, &w, 0).is_err());
    }

    #[test]
    fn converges_to_closed_form() {
        let e = exp(1, 1);
        let z = pt((0.1, 0.05), (0.4, 0.1));
        let w = pt((-0.05, 0.1), (0.3, -0.2));
        let b = kernel_partial_sum(e, &z, &w, 60).unwrap();
        let exact = hartogs_kernel(&z, &w);
        assert!((b - exact).norm() / exact.norm() < 1e-12, "{b} vs {exact}");
        let ratio = exact.norm() / kernel_estimate_rhs(e, &z, &w).unwrap();
        assert!((ratio - 1.0 / (PI * PI)).abs() < 1e-12);
    }

    #[test]
    fn hermitian_and_diagonal() {
        let e = exp(3, 2);
        let z = pt((0.2, 0.1), (0.5, 0.3));
        let w = pt((-0.1, 0.3), (0.2, -0.6));
        for cap in [4, 9, 15] {
            let a = kernel_partial_sum(e, &z, &w, cap).unwrap();
            let b = kernel_partial_sum(e, &w, &z, cap).unwrap();
            assert!((a - b.conj()).norm() <= 1e-12 * a.norm());
        }
        let mut prev = 0.0;
        for cap in 1..20 {
            let d = kernel_partial_sum(e, &z, &z, cap).unwrap();
            assert!(d.im.abs() <= 1e-12 * d.re);
            assert!(d.re > 0.0 && d.re >= prev);
            prev = d.re;
        }
    }

    #[test]
    fn k_eta_types() {
        let e = exp(1, 1);
        assert_eq!(k_eta_type(e, &rat(1, 2), &rat(1, 1)).unwrap(), TypeCD::bergman(e));
        assert_eq!(k_eta_type(e, &rat(2, 1), &rat(2, 1)).unwrap(), TypeCD::new(rat(0, 1), rat(2, 1)));
        assert!(k_eta_type(e, &rat(1, 2), &rat(2, 1)).is_err());
        assert!(k_eta_type(e, &rat(1, 2), &rat(1, 2)).is_err());
    }

    #[test]
    fn k_eta_majorant_is_bounded_on_samples() {
        let e = exp(1, 1);
        let c = k_eta_majorant_constant(e, &rat(1, 1), &rat(2, 1), 200, 20, 3).unwrap();
        assert!(c.is_finite() && c > 0.0);
    }

    #[test]
    fn ratio_diagnostic_is_stable_and_deterministic() {
        let e = exp(1, 1);
        let a = ratio_diagnostic(e, 200, 20, 1).unwrap();
        assert!(a.max_ratio.is_finite() && a.max_ratio > 0.0);
        assert!(a.max_rel_change < 0.01, "{a:?}");
        assert!(a.hermitian_defect <= 1e-12);
        assert!((a.max_ratio_doubled * PI * PI - 1.0).abs() < 1e-3, "{a:?}");
        assert_eq!(a, ratio_diagnostic(e, 200, 20, 1).unwrap());
        assert!(ratio_diagnostic(e, 10, 3, 1).is_err());
    }

    #[test]
    fn reproducing_property() {
        // \int B(z, w) w^beta dV(w) = z^beta; tensor Gauss rule in (r1, r2)
        // with trapezoid sums over both angles
        use crate::quad::GaussLegendre;
        let e = exp(1, 1);
        let gl = GaussLegendre::new(16);
        let (na, cap) = (24usize, 12);
        let eps = 1e-3;
        let betas = [(0i64, 0i64), (1, 0), (0, 1), (1, -1), (2, 1)];
        let zs = [
            pt((0.1, 0.0), (0.5, 0.0)),
            pt((0.05, 0.1), (0.3, 0.3)),
            pt((-0.2, 0.1), (0.6, -0.2)),
            pt((0.0, 0.2), (0.1, 0.5)),
            pt((0.15, -0.15), (-0.4, 0.3)),
            pt((0.02, 0.0), (0.7, 0.0)),
            pt((0.3, 0.0), (0.0, 0.6)),
            pt((-0.1, -0.1), (-0.3, -0.4)),
            pt((0.2, 0.2), (0.5, 0.5)),
            pt((0.01, 0.0), (0.2, 0.0)),
        ];
        let scale = (std::f64::consts::TAU / na as f64).powi(2);
        for z in &zs {
            z.check(e).unwrap();
            let mut acc = vec![Complex64::new(0.0, 0.0); betas.len()];
            for (&x2, &w2) in gl.nodes().iter().zip(gl.weights()) {
                let r2 = eps + (1.0 - eps) * 0.5 * (x2 + 1.0);
                let jr2 = (1.0 - eps) * 0.5 * w2;
                for (&x1, &w1) in gl.nodes().iter().zip(gl.weights()) {
                    let r1 = r2 * 0.5 * (x1 + 1.0);
                    let jr1 = r2 * 0.5 * w1;
                    for i in 0..na {
                        for j in 0..na {
                            let t1 = std::f64::consts::TAU * i as f64 / na as f64;
                            let t2 = std::f64::consts::TAU * j as f64 / na as f64;
                            let w = DomainPoint::new(Complex64::from_polar(r1, t1), Complex64::from_polar(r2, t2));
                            let b = kernel_partial_sum(e, z, &w, cap).unwrap() * (r1 * r2 * jr1 * jr2);
                            for (k, &(b1, b2)) in betas.iter().enumerate() {
                                acc[k] += b * cpow(w.z1, b1) * cpow(w.z2, b2);
                            }
                        }
                    }
                }
            }
            for (k, &(b1, b2)) in betas.iter().enumerate() {
                let target = cpow(z.z1, b1) * cpow(z.z2, b2);
                let got = acc[k] * scale;
                assert!((got - target).norm() <= 1e-3 * target.norm(), "beta=({b1},{b2}) z={z:?}: {got} vs {target}");
            }
        }
    }
}
