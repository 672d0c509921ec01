//! `L^p` divergence scans for the adjoint image of the witness monomial.

use serde::{Deserialize, Serialize};

use super::{integrate_polar_band, QuadConfig};
use crate::error::{domain, Result};
use crate::index::{HartogsExponent, WitnessMonomial};
use crate::moments::{adjoint_antiholo_constant, SymbolSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Convergent,
    Divergent,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Convergent => "convergent",
            Verdict::Divergent => "divergent",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Decision thresholds for [`lp_divergence_scan_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    /// Minimum log-log slope of `I(eps)` for a divergent verdict.
    pub slope_min: f64,
    /// Minimum log-log growth of the shell masses for a divergent verdict.
    pub growth_min: f64,
    /// Relative size of the extrapolated tail for a convergent verdict.
    pub rel_tol: f64,
    pub quad: QuadConfig,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            slope_min: 0.1,
            growth_min: 0.05,
            rel_tol: 1e-3,
            quad: QuadConfig { rel_tol: 1e-9, ..QuadConfig::default() },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceVerdict {
    pub verdict: Verdict,
    /// Slope of `ln I(eps)` against `ln(1/eps)` over the last half of levels.
    pub slope: f64,
    /// Slope of the log shell masses against `ln(1/eps)`.
    pub growth: f64,
    /// `(eps_k, I(eps_k))`, `eps` decreasing.
    pub values: Vec<(f64, f64)>,
}

fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// [`lp_divergence_scan_with`] with default thresholds.
pub fn lp_divergence_scan(
    exp: HartogsExponent,
    w: WitnessMonomial,
    sym: &SymbolSpec,
    p: f64,
    eps_levels: usize,
) -> Result<DivergenceVerdict> {
    lp_divergence_scan_with(exp, w, sym, p, eps_levels, &ScanConfig::default())
}

/// Evaluates `I(eps) = \int_{r2 > eps} |C z1^b1 z2^-b2 phi|^p dV` at
/// `eps_k = 2^-k`, `k = 3, ..., 3 + eps_levels - 1`, and classifies it.
///
/// Divergent: the log-log slope of `I` is at least `slope_min`, or the
/// dyadic shell masses `I(eps_{k+1}) - I(eps_k)` grow with log-log slope
/// at least `growth_min`. Convergent: the shell masses decay geometrically
/// and their extrapolated tail is below `rel_tol * I`. Anything else is
/// inconclusive.
pub fn lp_divergence_scan_with(
    exp: HartogsExponent,
    w: WitnessMonomial,
    sym: &SymbolSpec,
    p: f64,
    eps_levels: usize,
    cfg: &ScanConfig,
) -> Result<DivergenceVerdict> {
    if !(p >= 1.0) {
        return Err(domain(format!("p = {p} must be at least 1")));
    }
    if eps_levels < 4 {
        return Err(domain(format!("eps_levels = {eps_levels} must be at least 4")));
    }
    let c = adjoint_antiholo_constant(exp, w, sym)?;
    let (b1, b2) = (w.beta1 as f64, w.beta2 as f64);
    let ln_c = c.ln();
    let integrand = |pt: &super::RadialPoint, ln_w: f64| {
        let ln_f = p * (ln_c + sym.ln_value(exp, pt) + b1 * pt.ln_r1 - b2 * pt.ln_r2);
        Ok((ln_f + ln_w).exp())
    };
    let eps = |k: usize| 0.5f64.powi((k + 3) as i32);
    let mut values = Vec::with_capacity(eps_levels);
    let mut shells = Vec::with_capacity(eps_levels - 1);
    let mut total = integrate_polar_band(exp, eps(0), 1.0, &cfg.quad, &integrand)?.value;
    values.push((eps(0), total));
    for k in 1..eps_levels {
        let shell = integrate_polar_band(exp, eps(k), eps(k - 1), &cfg.quad, &integrand)?.value;
        total += shell;
        shells.push(shell);
        values.push((eps(k), total));
    }

    let half = eps_levels / 2;
    let xs: Vec<f64> = values[half..].iter().map(|(e, _)| (1.0 / e).ln()).collect();
    let ys: Vec<f64> = values[half..].iter().map(|(_, i)| i.ln()).collect();
    let slope = ls_slope(&xs, &ys);

    let shell_half = shells.len() / 2;
    let sx: Vec<f64> = (shell_half..shells.len()).map(|k| (1.0 / eps(k + 1)).ln()).collect();
    let sy: Vec<f64> = shells[shell_half..].iter().map(|d| d.ln()).collect();
    let growth = if shells[shell_half..].iter().all(|d| *d > 0.0) {
        ls_slope(&sx, &sy)
    } else {
        f64::NAN
    };

    let verdict = if slope >= cfg.slope_min || growth >= cfg.growth_min {
        Verdict::Divergent
    } else if growth < 0.0 {
        // shell ratio per halving of eps
        let q = 2f64.powf(growth);
        let last = *shells.last().expect("at least three shells");
        let tail = last * q / (1.0 - q);
        if tail <= cfg.rel_tol * total {
            Verdict::Convergent
        } else {
            Verdict::Inconclusive
        }
    } else {
        Verdict::Inconclusive
    };
    Ok(DivergenceVerdict { verdict, slope, growth, values })
}
