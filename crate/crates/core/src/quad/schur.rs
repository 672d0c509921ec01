//! Numerical checks of the Schur-test estimates.

use num::complex::Complex64;
use rayon::prelude::*;

use super::{adaptive, graded, integrate_polar_band, Estimate, GaussLegendre, QuadConfig, RadialPoint, Sample};
use crate::error::{domain, Result};
use crate::index::{HartogsExponent, WitnessMonomial};
use crate::kernel::DomainPoint;
use crate::ranges::{schur_exponents, Rational, TypeCD};
use num::ToPrimitive;

/// Growth-trend summary of ratios ordered toward the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendReport {
    pub ratios: Vec<f64>,
    pub sup_ratio: f64,
    pub argmax: usize,
    pub median: f64,
    /// Maximum over the last tenth of the samples.
    pub last_decile_max: f64,
    /// `last_decile_max <= 2 * median`.
    pub bounded: bool,
}

pub fn trend_report(ratios: Vec<f64>) -> TrendReport {
    assert!(!ratios.is_empty(), "trend report needs at least one ratio");
    let (argmax, sup_ratio) = ratios
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, r)| if r > best.1 { (i, r) } else { best });
    let mut sorted = ratios.clone();
    sorted.sort_by(f64::total_cmp);
    let k = sorted.len();
    let median = if k % 2 == 1 { sorted[k / 2] } else { 0.5 * (sorted[k / 2 - 1] + sorted[k / 2]) };
    let tail = k.div_ceil(10);
    let last_decile_max = ratios[k - tail..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    TrendReport {
        bounded: last_decile_max <= 2.0 * median,
        ratios,
        sup_ratio,
        argmax,
        median,
        last_decile_max,
    }
}

/// `h(z) = (|z2|^{2n} - |z1|^{2m})(1 - |z2|^2)`.
pub fn auxiliary_h(exp: HartogsExponent, z: &DomainPoint) -> f64 {
    let (m, n) = (exp.m() as i32, exp.n() as i32);
    let (a1, a2) = (z.z1.norm(), z.z2.norm());
    (a2.powi(2 * n) - a1.powi(2 * m)) * (1.0 - a2) * (1.0 + a2)
}

/// `count` real points marching toward the boundary:
/// `|z2| = 1 - delta/2`, `|z1|^m = (1 - delta)|z2|^n`, `delta = 10^{-3i/(count-1)}`.
/// Both boundary gaps `1 - |z2|` and `1 - |z1|^m/|z2|^n` shrink along the list.
pub fn boundary_approach_samples(exp: HartogsExponent, count: usize) -> Vec<DomainPoint> {
    let (m, n) = (exp.m() as f64, exp.n() as f64);
    (0..count)
        .map(|i| {
            let t = if count > 1 { i as f64 / (count - 1) as f64 } else { 0.0 };
            let delta = 10f64.powf(-3.0 * t);
            let r2 = 1.0 - 0.5 * delta;
            let r1 = ((1.0 - delta) * r2.powf(n)).powf(1.0 / m);
            DomainPoint::new(Complex64::new(r1, 0.0), Complex64::new(r2, 0.0))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscLemmaReport {
    pub sup_ratio: f64,
    pub argmax_z: Complex64,
    pub grid: Vec<f64>,
    pub trend: TrendReport,
}

fn disc_cfg() -> QuadConfig {
    QuadConfig { rel_tol: 1e-8, max_refinement: 400, ..QuadConfig::default() }
}

/// `(1 - t^2)^eps \int_D (1-|w|^2)^{-eps} |w|^{-beta} |1 - t conj(w)|^{-2} dV(w)`
/// by two-dimensional adaptive quadrature in `(r, theta)`.
pub fn disc_lemma_ratio(eps: f64, beta: f64, t: f64, cfg: &QuadConfig) -> Result<Estimate> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(domain(format!("eps = {eps} must lie in (0, 1)")));
    }
    if !(beta < 2.0) {
        return Err(domain(format!("beta = {beta} must be below 2")));
    }
    if !(0.0..1.0).contains(&t) {
        return Err(domain(format!("|z| = {t} must lie in [0, 1)")));
    }
    cfg.validate()?;
    let rule = GaussLegendre::new(cfg.base_nodes);
    let pi = std::f64::consts::PI;
    let mut outer = |v: f64| -> Result<Sample> {
        let (r, r_gap, jr) = graded(v);
        if r == 0.0 || r_gap == 0.0 {
            return Ok(0.0.into());
        }
        let radial = r.powf(1.0 - beta) * (r_gap * (1.0 + r)).powf(-eps) * jr;
        // |1 - t r e^{i theta}|^2 = (1 - t r)^2 + 4 t r sin^2(theta/2)
        let near = (1.0 - t) + t * r_gap;
        let mut inner = |u: f64| -> Result<Sample> {
            let (x, _, jt) = graded(u);
            let half = 0.5 * pi * x;
            let sin = half.sin();
            Ok((2.0 * pi * jt / (near * near + 4.0 * t * r * sin * sin)).into())
        };
        let e = adaptive(&mut inner, 0.0, 1.0, &rule, cfg.tolerance(0.1 * cfg.rel_tol))?;
        Ok(Sample { value: radial * e.value, err: radial * e.abs_err })
    };
    let e = adaptive(&mut outer, 0.0, 1.0, &rule, cfg.tolerance(cfg.rel_tol))?;
    let scale = ((1.0 - t) * (1.0 + t)).powf(eps);
    Ok(Estimate { value: e.value * scale, abs_err: e.abs_err * scale })
}

/// The disc lemma ratio on the grid `|z| = 1 - 10^{-3i/(grid_size-1)}`.
pub fn disc_lemma_check(eps: f64, beta: f64, grid_size: usize) -> Result<DiscLemmaReport> {
    if grid_size < 2 {
        return Err(domain(format!("grid_size = {grid_size} must be at least 2")));
    }
    let grid: Vec<f64> = (0..grid_size)
        .map(|i| 1.0 - 10f64.powf(-3.0 * i as f64 / (grid_size - 1) as f64))
        .collect();
    let cfg = disc_cfg();
    let ratios = grid
        .par_iter()
        .map(|&t| disc_lemma_ratio(eps, beta, t, &cfg).map(|e| e.value))
        .collect::<Result<Vec<f64>>>()?;
    let trend = trend_report(ratios);
    Ok(DiscLemmaReport {
        sup_ratio: trend.sup_ratio,
        argmax_z: Complex64::new(grid[trend.argmax], 0.0),
        grid,
        trend,
    })
}

/// `J(z) = \int_H type_cd(z, w) h(w)^{-eps} dV(w)`.
///
/// The two angular integrals are done exactly with
/// `\int_0^{2 pi} |1 - rho e^{i t}|^{-2} dt = 2 pi / (1 - rho^2)`, leaving
/// the radial integral
/// `(2 pi)^2 |z2|^c \int r2^d h^{-eps} / ((1 - |z2|^2 r2^2)(|z2|^{2n} r2^{2n} - |z1|^{2m} r1^{2m})) r1 r2`.
pub fn schur_integral(exp: HartogsExponent, cd: &TypeCD, eps: f64, z: &DomainPoint, cfg: &QuadConfig) -> Result<Estimate> {
    z.check(exp)?;
    let (m, n) = (exp.m() as i32, exp.n() as i32);
    let c = cd.c.to_f64().unwrap_or(f64::NAN);
    let d = cd.d.to_f64().unwrap_or(f64::NAN);
    let (a1, a2) = (z.z1.norm(), z.z2.norm());
    let z2n = a2.powi(2 * n);
    let q = a1.powi(2 * m) / z2n;
    let one_minus_q = (z2n - a1.powi(2 * m)) / z2n;
    let ln_front = c * a2.ln() - z2n.ln();
    let g = |p: &RadialPoint, ln_w: f64| -> Result<f64> {
        // 1 - s^{2m} and 1 - r2^2, complemented
        let geo: f64 = (0..2 * m).map(|k| p.s.powi(k)).sum();
        let gap_s = p.s_gap * geo;
        let gap_r = p.r2_gap * (1.0 + p.r2);
        let ln_h = 2.0 * n as f64 * p.ln_r2 + gap_s.ln() + gap_r.ln();
        let near = (1.0 - a2) + a2 * p.r2_gap;
        let disc = near * (1.0 + a2 * p.r2);
        let cone = one_minus_q + q * gap_s;
        let ln_f = ln_front + d * p.ln_r2 - eps * ln_h - disc.ln() - 2.0 * n as f64 * p.ln_r2 - cone.ln();
        Ok((ln_f + ln_w).exp())
    };
    integrate_polar_band(exp, cfg.eps_cutoff, 1.0, cfg, &g)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchurReport {
    pub sup_ratio: f64,
    pub trend: TrendReport,
}

/// `J(z) h(z)^eps` over the samples, which should be ordered toward the
/// boundary. `epsilon` must lie strictly inside `(a, b)` of the Schur tuple.
pub fn schur_estimate_check(
    exp: HartogsExponent,
    cd: &TypeCD,
    epsilon: &Rational,
    sample_z: &[DomainPoint],
    cfg: &QuadConfig,
) -> Result<SchurReport> {
    let t = schur_exponents(exp, cd)?;
    if *epsilon <= t.a {
        return Err(domain(format!("epsilon = {epsilon} must exceed a = {}", t.a)));
    }
    if *epsilon >= t.b {
        return Err(domain(format!("epsilon = {epsilon} must be below b = {}", t.b)));
    }
    if sample_z.is_empty() {
        return Err(domain("schur_estimate_check needs at least one sample point"));
    }
    let eps = epsilon.to_f64().unwrap_or(f64::NAN);
    let ratios = sample_z
        .par_iter()
        .map(|z| schur_integral(exp, cd, eps, z, cfg).map(|j| j.value * auxiliary_h(exp, z).powf(eps)))
        .collect::<Result<Vec<f64>>>()?;
    let trend = trend_report(ratios);
    Ok(SchurReport { sup_ratio: trend.sup_ratio, trend })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionResidual {
    pub lhs: f64,
    pub rhs: f64,
}

impl ExpansionResidual {
    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs
    }
}

/// Compares, on `r2 < 1/2`, the witness integral
/// `\int r2^E (1 - r2^2)^{p eta} \int_0^{r2^{n/m}} r1^{p b1 + 1} (1 - r1^m/r2^n)^{p eta} dr1 dr2`,
/// `E = 1 - p b2 + n p eta`, with its first-order expansion in which both
/// `(1 - x)^{p eta}` factors become `1 - p eta x`.
pub fn boundary_expansion_residual(exp: HartogsExponent, w: WitnessMonomial, eta: f64, p: f64) -> Result<ExpansionResidual> {
    if !(p * eta >= 0.0) || !(p > 0.0) {
        return Err(domain(format!("need p > 0 and p * eta >= 0, got p = {p}, eta = {eta}")));
    }
    let (m, n) = (exp.m() as f64, exp.n() as f64);
    let pe = p * eta;
    let (b1, b2) = (w.beta1 as f64, w.beta2 as f64);
    let cfg = QuadConfig::default();
    let rule = GaussLegendre::new(cfg.base_nodes);
    let tol = cfg.tolerance(cfg.rel_tol);
    let k = p * b1 + 1.0;

    // r1 = s r2^{n/m}: the inner integral is r2^{(n/m)(k+1)} \int_0^1 s^k (...) ds
    let mut full_s = |v: f64| -> Result<Sample> {
        let (s, s_gap, j) = graded(v);
        let geo: f64 = (0..exp.m()).map(|i| s.powi(i as i32)).sum();
        Ok((s.powf(k) * (s_gap * geo).powf(pe) * j).into())
    };
    let inner_full = adaptive(&mut full_s, 0.0, 1.0, &rule, tol)?.value;
    let mut lin_s = |v: f64| -> Result<Sample> {
        let (s, _, j) = graded(v);
        Ok((s.powf(k) * (1.0 - pe * s.powf(m)) * j).into())
    };
    let inner_lin = adaptive(&mut lin_s, 0.0, 1.0, &rule, tol)?.value;

    // r2 = e^{-u}, dr2 = r2 du
    let e_total = 1.0 - p * b2 + n * pe + (n / m) * (k + 1.0);
    let outer = |lin: bool| -> Result<f64> {
        let mut f = |u: f64| -> Result<Sample> {
            let r2 = (-u).exp();
            let factor = if lin { 1.0 - pe * r2 * r2 } else { (1.0 - r2 * r2).powf(pe) };
            Ok((((e_total + 1.0) * -u).exp() * factor).into())
        };
        Ok(adaptive(&mut f, 2f64.ln(), (1.0 / cfg.eps_cutoff).ln(), &rule, tol)?.value)
    };
    Ok(ExpansionResidual { lhs: inner_full * outer(false)?, rhs: inner_lin * outer(true)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::witness_monomial;
    use crate::kernel::type_cd_rhs;
    use crate::ranges::rat;
    use std::f64::consts::PI;

    fn exp(m: i64, n: i64) -> HartogsExponent {
        HartogsExponent::new(m, n).unwrap()
    }

    #[test]
    fn disc_ratio_at_origin() {
        let e = disc_lemma_ratio(0.5, 1.0, 0.0, &disc_cfg()).unwrap();
        assert!((e.value / (PI * PI) - 1.0).abs() < 1e-7, "{}", e.value);
    }

    #[test]
    fn disc_ratio_matches_poisson_reduction() {
        let rule = GaussLegendre::new(10);
        for t in [0.3, 0.9, 0.999] {
            let (eps, beta) = (0.5, 1.0);
            let mut f = |v: f64| -> Result<Sample> {
                let (r, rg, j) = graded(v);
                let near = (1.0 - t * r).max(0.0);
                Ok((2.0 * PI * r.powf(1.0 - beta) * (rg * (1.0 + r)).powf(-eps) / (near * (1.0 + t * r)) * j).into())
            };
            let exact = adaptive(&mut f, 0.0, 1.0, &rule, Tolerance { rel: 1e-11, abs: 0.0, max_splits: 2000 })
                .unwrap()
                .value
                * (1.0 - t * t).powf(eps);
            let q = disc_lemma_ratio(eps, beta, t, &disc_cfg()).unwrap().value;
            assert!((q / exact - 1.0).abs() < 1e-6, "t={t}: {q} vs {exact}");
        }
    }

    use super::super::Tolerance;

    #[test]
    fn disc_preconditions() {
        assert!(disc_lemma_check(1.0, 1.0, 8).is_err());
        assert!(disc_lemma_check(0.5, 2.0, 8).is_err());
    }

    #[test]
    fn disc_lemma_has_no_trend() {
        let r = disc_lemma_check(0.5, 1.0, 20).unwrap();
        assert!(r.trend.bounded, "{:?}", r.trend);
        assert!(r.sup_ratio.is_finite() && r.sup_ratio > 0.0);
    }

    #[test]
    fn angular_reduction_matches_brute_force() {
        // average of the (0,0) kernel over both angles of w, against the
        // closed form used by schur_integral
        let e = exp(2, 1);
        let z = DomainPoint::new(Complex64::new(0.3, 0.1), Complex64::new(0.2, 0.5));
        let (r1, r2) = (0.25, 0.6);
        let zero = TypeCD::new(rat(0, 1), rat(0, 1));
        let k = 64;
        let mut sum = 0.0;
        for i in 0..k {
            for j in 0..k {
                let t1 = 2.0 * PI * i as f64 / k as f64;
                let t2 = 2.0 * PI * j as f64 / k as f64;
                let w = DomainPoint::new(Complex64::from_polar(r1, t1), Complex64::from_polar(r2, t2));
                sum += type_cd_rhs(e, &zero, &z, &w).unwrap();
            }
        }
        let brute = sum / (k * k) as f64;
        let (a1, a2) = (z.z1.norm(), z.z2.norm());
        let closed = 1.0 / ((1.0 - a2 * a2 * r2 * r2) * ((a2 * r2).powi(2) - (a1 * r1).powi(4)));
        assert!((brute / closed - 1.0).abs() < 1e-10, "{brute} vs {closed}");
    }

    #[test]
    fn schur_integral_matches_direct_polar_quadrature() {
        use crate::quad::integrate_polar;
        let e = exp(1, 1);
        let cd = TypeCD::new(rat(1, 1), rat(1, 1));
        let z = DomainPoint::new(Complex64::new(0.2, 0.0), Complex64::new(0.5, 0.0));
        let eps = 0.75;
        let cfg = QuadConfig { rel_tol: 1e-9, ..QuadConfig::default() };
        let j = schur_integral(e, &cd, eps, &z, &cfg).unwrap().value;
        let direct = integrate_polar(
            e,
            |p| {
                let h = p.r2 * p.r2 * p.s_gap * (1.0 + p.s) * p.r2_gap * (1.0 + p.r2);
                0.5 * p.r2 * h.powf(-eps) / ((1.0 - 0.25 * p.r2 * p.r2) * (0.25 * p.r2 * p.r2 - 0.04 * p.r1 * p.r1))
            },
            &QuadConfig { rel_tol: 1e-6, max_refinement: 2000, ..cfg },
        );
        let direct = direct.unwrap().value;
        assert!((j / direct - 1.0).abs() < 1e-5, "{j} vs {direct}");
    }

    #[test]
    fn schur_epsilon_window() {
        let e = exp(1, 1);
        let cd = TypeCD::new(rat(1, 1), rat(1, 1));
        let zs = boundary_approach_samples(e, 4);
        let cfg = QuadConfig::default();
        assert!(schur_estimate_check(e, &cd, &rat(1, 2), &zs, &cfg).is_err());
        assert!(schur_estimate_check(e, &cd, &rat(3, 2), &zs, &cfg).is_err());
    }

    #[test]
    fn schur_check_inside_lemma_window() {
        let e = exp(1, 1);
        let cd = TypeCD::new(rat(1, 1), rat(1, 1));
        let zs = boundary_approach_samples(e, 10);
        let cfg = QuadConfig { rel_tol: 1e-6, max_refinement: 400, ..QuadConfig::default() };
        let r = schur_estimate_check(e, &cd, &rat(3, 4), &zs, &cfg).unwrap();
        assert!(r.trend.bounded, "{:?}", r.trend);
    }

    #[test]
    fn samples_approach_boundary() {
        let e = exp(3, 2);
        let zs = boundary_approach_samples(e, 12);
        let hs: Vec<f64> = zs.iter().map(|z| auxiliary_h(e, z)).collect();
        for w in hs[6..].windows(2) {
            assert!(w[1] < w[0] && w[1] > 0.0);
        }
        assert!(hs[11] < 1e-5);
        for z in &zs {
            z.check(e).unwrap();
        }
    }

    #[test]
    fn expansion_residual_oracle_values() {
        let e = exp(1, 1);
        let w = witness_monomial(e);
        let r = boundary_expansion_residual(e, w, 0.0, 2.0).unwrap();
        assert_eq!(r.lhs, r.rhs);
        let r = boundary_expansion_residual(e, w, 0.25, 2.0).unwrap();
        assert!((r.lhs / 0.01748384320807805 - 1.0).abs() < 1e-9, "{}", r.lhs);
        assert!((r.rhs / 0.02193340478680495 - 1.0).abs() < 1e-9, "{}", r.rhs);
        assert!((0.5..=2.0).contains(&r.ratio()));
        let e2 = exp(2, 1);
        let r = boundary_expansion_residual(e2, witness_monomial(e2), 0.5, 2.0).unwrap();
        assert!((r.lhs / 0.02734375 - 1.0).abs() < 1e-9 && (r.rhs / 0.02734375 - 1.0).abs() < 1e-9);
    }
}
