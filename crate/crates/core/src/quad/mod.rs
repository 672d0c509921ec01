//! Quadrature over `H_{m/n}` in polar coordinates.
//!
//! A radial integrand `f(r1, r2)` on `{eps < r2 < 1, 0 < r1 < r2^(n/m)}` is
//! integrated against `(2 pi)^2 r1 r2 dr1 dr2`. The inner variable is
//! `s = r1 / r2^(n/m)` on `[0, 1]`, graded at both ends; the outer variable
//! is `u = ln(1/r2)` below `r2 = 1/2` and a graded map toward `r2 = 1`
//! above it.

mod rule;
mod scan;
mod schur;

pub use rule::{adaptive, graded, Estimate, GaussLegendre, Sample, Tolerance};
pub use scan::{lp_divergence_scan, lp_divergence_scan_with, ScanConfig, DivergenceVerdict, Verdict};
pub use schur::{
    auxiliary_h, boundary_approach_samples, boundary_expansion_residual, disc_lemma_check,
    disc_lemma_ratio, schur_estimate_check, schur_integral, trend_report, DiscLemmaReport,
    ExpansionResidual, SchurReport, TrendReport,
};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::index::HartogsExponent;
use crate::moments::{MomentValue, Method};

const TWO_PI_SQ: f64 = 4.0 * std::f64::consts::PI * std::f64::consts::PI;

/// Quadrature settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    /// Truncation `r2 > eps_cutoff`.
    pub eps_cutoff: f64,
    pub rel_tol: f64,
    /// Split budget of each one-dimensional adaptive pass.
    pub max_refinement: usize,
    /// Gauss-Legendre points per panel.
    pub base_nodes: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { eps_cutoff: 1e-40, rel_tol: 1e-11, max_refinement: 400, base_nodes: 10 }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_cutoff > 0.0 && self.eps_cutoff < 1.0) {
            return Err(domain(format!("eps_cutoff = {} must lie in (0, 1)", self.eps_cutoff)));
        }
        if !(self.rel_tol >= 1e-12) {
            return Err(domain(format!("rel_tol = {} must be at least 1e-12", self.rel_tol)));
        }
        if self.base_nodes < 4 {
            return Err(domain(format!("base_nodes = {} must be at least 4", self.base_nodes)));
        }
        if self.max_refinement == 0 {
            return Err(domain("max_refinement must be positive"));
        }
        Ok(())
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps_cutoff = eps;
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub(crate) fn tolerance(&self, rel: f64) -> Tolerance {
        Tolerance { rel, abs: 0.0, max_splits: self.max_refinement }
    }
}

/// A quadrature node in polar coordinates, with the quantities that lose
/// precision near the boundary supplied in complemented form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialPoint {
    pub r1: f64,
    pub r2: f64,
    /// `s = r1 / r2^(n/m)`.
    pub s: f64,
    /// `1 - s`.
    pub s_gap: f64,
    /// `1 - r2`.
    pub r2_gap: f64,
    pub ln_r1: f64,
    pub ln_r2: f64,
    pub ln_s: f64,
}

/// A band `[lo, hi]` of `r2` values.
#[derive(Debug, Clone, Copy)]
enum Band {
    /// `r2 = e^{-u}` for `u` in `[ln(1/hi), ln(1/lo)]`.
    Log { lo: f64, hi: f64 },
    /// `r2 = lo + (hi - lo) x` with `x` graded on `[0, 1]`.
    Graded { lo: f64, hi: f64 },
}

fn bands(lo: f64, hi: f64) -> Vec<Band> {
    const SPLIT: f64 = 0.5;
    if hi <= SPLIT {
        vec![Band::Log { lo, hi }]
    } else if lo >= SPLIT {
        vec![Band::Graded { lo, hi }]
    } else {
        vec![Band::Log { lo, hi: SPLIT }, Band::Graded { lo: SPLIT, hi }]
    }
}

/// Integrates over the slab `lo < r2 < hi`. The integrand receives the node
/// and the logarithm of the full volume weight (including `(2 pi)^2`, the
/// polar factors and both change-of-variable Jacobians) and returns the
/// weighted value; this lets callers combine logarithms before
/// exponentiating.
pub fn integrate_polar_band<G>(exp: HartogsExponent, lo: f64, hi: f64, cfg: &QuadConfig, g: &G) -> Result<Estimate>
where
    G: Fn(&RadialPoint, f64) -> Result<f64>,
{
    cfg.validate()?;
    if !(lo >= 0.0 && lo < hi && hi <= 1.0) {
        return Err(domain(format!("invalid r2 band [{lo}, {hi}]")));
    }
    let rule = GaussLegendre::new(cfg.base_nodes);
    let mut value = 0.0;
    let mut abs_err = 0.0;
    for band in bands(lo, hi) {
        let e = integrate_band(exp, band, cfg, &rule, g)?;
        value += e.value;
        abs_err += e.abs_err;
    }
    Ok(Estimate { value, abs_err })
}

fn integrate_band<G>(exp: HartogsExponent, band: Band, cfg: &QuadConfig, rule: &GaussLegendre, g: &G) -> Result<Estimate>
where
    G: Fn(&RadialPoint, f64) -> Result<f64>,
{
    let power = exp.inner_power();
    let inner_tol = cfg.tolerance(cfg.rel_tol * 0.1);
    let ln_const = TWO_PI_SQ.ln();
    let mut outer = |t: f64| -> Result<Sample> {
        // (r2, 1 - r2, ln r2, ln dr2/dt)
        let (r2, r2_gap, ln_r2, ln_dr2) = match band {
            Band::Log { .. } => {
                let r2 = (-t).exp();
                (r2, -(-t).exp_m1(), -t, -t)
            }
            Band::Graded { lo, hi } => {
                let (x, xc, jac) = graded(t);
                let r2 = lo + (hi - lo) * x;
                let gap = (1.0 - hi) + (hi - lo) * xc;
                (r2, gap, r2.ln(), ((hi - lo) * jac).ln())
            }
        };
        let ln_outer = ln_const + ln_r2 * (1.0 + power) + ln_dr2;
        let mut inner = |v: f64| -> Result<Sample> {
            let (s, s_gap, jac) = graded(v);
            if s == 0.0 || jac == 0.0 {
                return Ok(0.0.into());
            }
            let ln_s = s.ln();
            let ln_r1 = ln_s + power * ln_r2;
            let p = RadialPoint { r1: ln_r1.exp(), r2, s, s_gap, r2_gap, ln_r1, ln_r2, ln_s };
            Ok(g(&p, ln_outer + ln_r1 + jac.ln())?.into())
        };
        let e = adaptive(&mut inner, 0.0, 1.0, rule, inner_tol)?;
        Ok(Sample { value: e.value, err: e.abs_err })
    };
    let (a, b) = match band {
        Band::Log { lo, hi } => ((1.0 / hi).ln(), (1.0 / lo).ln()),
        Band::Graded { .. } => (0.0, 1.0),
    };
    adaptive(&mut outer, a, b, rule, cfg.tolerance(cfg.rel_tol))
}

/// `(2 pi)^2 \int\int f(r1, r2) r1 r2 dr1 dr2` over `eps < r2 < 1`.
pub fn integrate_polar<F>(exp: HartogsExponent, f: F, cfg: &QuadConfig) -> Result<MomentValue>
where
    F: Fn(&RadialPoint) -> f64,
{
    let e = integrate_polar_band(exp, cfg.eps_cutoff, 1.0, cfg, &|p, ln_w| Ok(f(p) * ln_w.exp()))?;
    Ok(MomentValue { value: e.value, method: Method::Quadrature, abs_error_bound: e.abs_err })
}

/// As [`integrate_polar`] for a positive integrand given by its logarithm.
/// `ln_f = -inf` contributes zero.
pub fn integrate_polar_ln<F>(exp: HartogsExponent, ln_f: F, cfg: &QuadConfig) -> Result<MomentValue>
where
    F: Fn(&RadialPoint) -> f64,
{
    let e = integrate_polar_band(exp, cfg.eps_cutoff, 1.0, cfg, &|p, ln_w| Ok((ln_f(p) + ln_w).exp()))?;
    Ok(MomentValue { value: e.value, method: Method::Quadrature, abs_error_bound: e.abs_err })
}
