//! The verification suite run by `hartogs verify` and the acceptance test.

use std::collections::HashMap;

use num::{BigInt, One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Error;
use crate::index::{enumerate_index_set, witness_monomial, HartogsExponent, MultiIndex};
use crate::kernel::ratio_diagnostic;
use crate::moments::{boundary_power_eigenvalue, mod_power_eigenvalue, norm_sq_formula, remark_29_integral, SymbolSpec};
use crate::quad::{
    boundary_approach_samples, disc_lemma_check, integrate_polar, integrate_polar_ln, lp_divergence_scan,
    schur_estimate_check, QuadConfig, Verdict,
};
use crate::ranges::{
    bergman_range, gain_consistency, kernel_exponent, rat, schur_exponents, schur_p_range, smoothing_lower,
    smoothing_outcome, toeplitz_mod_power_range, type_cd_range, unbounded_thresholds, upper_threshold, Extended,
    PRange, Rational, Smoothing, TypeCD,
};
use crate::report::{decimal, Check};

/// A closed form for `c_alpha^2`; the suite takes it as a parameter so that
/// a corrupted formula can be shown to fail.
pub type NormFormula = fn(HartogsExponent, MultiIndex) -> f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Fast,
    Full,
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fast" => Ok(Suite::Fast),
            "full" => Ok(Suite::Full),
            other => Err(format!("unknown suite `{other}` (expected fast or full)")),
        }
    }
}

fn exp(m: i64, n: i64) -> HartogsExponent {
    HartogsExponent::new(m, n).expect("suite exponents are positive")
}

fn coprime_pairs(max: i64) -> Vec<HartogsExponent> {
    let mut v = Vec::new();
    for m in 1..=max {
        for n in 1..=max {
            if num::integer::gcd(m, n) == 1 {
                v.push(exp(m, n));
            }
        }
    }
    v
}

/// A random valid type: `c = 2n - x`, `d = 2n - y` with `x, y > 0`,
/// `x + y < 2n/m + 2`, both with denominators up to 12.
pub fn random_valid_type(e: HartogsExponent, rng: &mut ChaCha8Rng) -> TypeCD {
    let two_n = Rational::from_integer(BigInt::from(2 * e.n()));
    let budget = rat(2 * e.n(), e.m()) + Rational::from_integer(BigInt::from(2));
    loop {
        let den = rng.gen_range(1..=12i64);
        let top = (budget.clone() * Rational::from_integer(BigInt::from(den))).floor().to_integer();
        let top = top.to_i64().unwrap_or(1).max(1);
        let x = rat(rng.gen_range(1..=top), den);
        let y = rat(rng.gen_range(1..=top), den);
        if &x + &y < budget {
            return TypeCD::new(&two_n - x, &two_n - y);
        }
    }
}

/// Exact identities between the Schur range, the type range and the
/// Bergman range.
pub fn range_identities(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = coprime_pairs(20);
    let mut mismatches = Vec::new();
    let mut tested = 0usize;
    for &e in &pairs {
        if type_cd_range(e, &TypeCD::bergman(e)).ok() != Some(bergman_range(e)) {
            mismatches.push(format!("bergman {e}"));
        }
        for _ in 0..100 {
            let cd = random_valid_type(e, &mut rng);
            let lhs = schur_exponents(e, &cd).and_then(|t| schur_p_range(&t));
            let rhs = type_cd_range(e, &cd);
            tested += 1;
            match (lhs, rhs) {
                (Ok(a), Ok(b)) if a == b => {}
                (a, b) => mismatches.push(format!("{e} c={} d={}: {a:?} vs {b:?}", cd.c, cd.d)),
            }
        }
    }
    Check::new(
        "range identities",
        mismatches.is_empty(),
        "exact",
        format!("{} mismatches", mismatches.len()),
        format!(
            "{} coprime (m,n) with m,n <= 20; {tested} random valid (c,d); {}",
            pairs.len(),
            mismatches.first().cloned().unwrap_or_else(|| "schur range = type range, type (A,A) = bergman".into())
        ),
    )
}

fn open(lo: Rational, hi: Rational) -> PRange {
    PRange { lower: lo, upper: Extended::Finite(hi), lower_open: true, upper_open: true }
}

pub fn triangle_endpoints() -> Check {
    let b = bergman_range(exp(1, 1));
    let t = toeplitz_mod_power_range(exp(1, 1), &rat(1, 1));
    let pass = b == open(rat(4, 3), rat(4, 1)) && t.as_ref().ok() == Some(&open(rat(1, 1), rat(4, 1)));
    let measured = format!("bergman {b}, toeplitz a=1 {}", t.map(|r| r.to_string()).unwrap_or_else(|e| e.to_string()));
    Check::new("hartogs triangle endpoints", pass, "exact", measured, "expected (4/3, 4) and (1, 4)")
}

fn norm_quadrature(e: HartogsExponent, alpha: MultiIndex, cfg: &QuadConfig) -> crate::Result<f64> {
    let (a1, a2) = (alpha.a1 as f64, alpha.a2 as f64);
    integrate_polar_ln(e, |p| 2.0 * a1 * p.ln_r1 + 2.0 * a2 * p.ln_r2, cfg).map(|v| v.value)
}

/// Closed-form norms against polar quadrature for every index with
/// `|a1|, |a2| <= bound`.
pub fn norm_oracle(exps: &[(i64, i64)], bound: i64, formula: NormFormula) -> Check {
    let cfg = QuadConfig::default();
    let mut jobs = Vec::new();
    for &(m, n) in exps {
        let e = exp(m, n);
        jobs.extend(enumerate_index_set(e, bound).into_iter().filter(|a| a.a2 >= -bound).map(|a| (e, a)));
    }
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(e, a)| {
            let closed = formula(e, a);
            norm_quadrature(e, a, &cfg).map(|q| ((closed - q).abs() / q.abs(), e, a))
        })
        .collect();
    let mut worst = (0.0f64, String::new());
    let mut errors = Vec::new();
    for r in results {
        match r {
            Ok((rel, e, a)) if !(rel <= worst.0) => worst = (rel, format!("H_{e} alpha {a}")),
            Ok(_) => {}
            Err(err) => errors.push(err.to_string()),
        }
    }
    let pass = errors.is_empty() && worst.0 <= 1e-8;
    Check::new(
        format!("norm oracle |alpha| <= {bound}"),
        pass,
        "relative 1e-8",
        decimal(worst.0),
        if errors.is_empty() {
            format!("{} indices over {:?}; worst at {}", jobs.len(), exps, worst.1)
        } else {
            format!("{} quadrature failures, first: {}", errors.len(), errors[0])
        },
    )
}

/// Off-diagonal inner products `<phi z^beta, z^gamma>` and diagonal
/// eigenvalues for `H_1`.
///
/// The integrand factors into a radial part depending on `beta + gamma` and
/// an angular part `e^{i (beta - gamma) theta}`; radial parts come from the
/// adaptive polar rule, angular parts from an `N x N` trapezoid rule, which
/// is exact for frequencies below `N`.
pub fn diagonality() -> Vec<Check> {
    let e = exp(1, 1);
    let basis: Vec<MultiIndex> = enumerate_index_set(e, 6).into_iter().filter(|a| a.a2 >= -6).collect();
    let cfg = QuadConfig::default();
    let angular_nodes = 32usize;
    let symbols = [SymbolSpec::ModPower(rat(1, 1)), SymbolSpec::BoundaryPower(rat(1, 2))];
    let mut checks = Vec::new();
    for sym in &symbols {
        let mut sums: Vec<(i64, i64)> = basis
            .iter()
            .flat_map(|b| basis.iter().map(move |g| (b.a1 + g.a1, b.a2 + g.a2)))
            .collect();
        sums.sort_unstable();
        sums.dedup();
        let radial: crate::Result<HashMap<(i64, i64), f64>> = sums
            .par_iter()
            .map(|&(s1, s2)| {
                integrate_polar_ln(e, |p| sym.ln_value(e, p) + s1 as f64 * p.ln_r1 + s2 as f64 * p.ln_r2, &cfg)
                    .map(|v| ((s1, s2), v.value))
            })
            .collect();
        let radial = match radial {
            Ok(r) => r,
            Err(err) => {
                checks.push(Check::new(format!("diagonality {sym}"), false, "1e-8", "error", err.to_string()));
                continue;
            }
        };
        let angular = |k1: i64, k2: i64| {
            let mut acc = num::complex::Complex64::new(0.0, 0.0);
            for i in 0..angular_nodes {
                for j in 0..angular_nodes {
                    let t = std::f64::consts::TAU / angular_nodes as f64;
                    acc += num::complex::Complex64::from_polar(1.0, (k1 * i as i64) as f64 * t + (k2 * j as i64) as f64 * t);
                }
            }
            acc / (angular_nodes * angular_nodes) as f64
        };
        let mut worst_off = (0.0f64, String::new());
        let mut worst_diag = (0.0f64, String::new());
        for b in &basis {
            for g in &basis {
                let r = radial[&(b.a1 + g.a1, b.a2 + g.a2)];
                let inner = angular(b.a1 - g.a1, b.a2 - g.a2) * r;
                let scale = (norm_sq_formula(e, *b) * norm_sq_formula(e, *g)).sqrt();
                if b == g {
                    let lambda = inner.re / norm_sq_formula(e, *b);
                    let exact = match sym {
                        SymbolSpec::ModPower(a) => mod_power_eigenvalue(e, *b, a.to_f64().unwrap_or(f64::NAN)),
                        SymbolSpec::BoundaryPower(eta) => {
                            boundary_power_eigenvalue(e, *b, eta.to_f64().unwrap_or(f64::NAN)).map(|v| v.value)
                        }
                    };
                    let rel = exact.map(|x| (lambda - x).abs() / x).unwrap_or(f64::INFINITY);
                    if !(rel <= worst_diag.0) {
                        worst_diag = (rel, b.to_string());
                    }
                } else {
                    let ratio = inner.norm() / scale;
                    if !(ratio <= worst_off.0) {
                        worst_off = (ratio, format!("{b} x {g}"));
                    }
                }
            }
        }
        checks.push(Check::new(
            format!("diagonality off-diagonal {sym}"),
            worst_off.0 <= 1e-8,
            "|<phi z^b, z^g>| <= 1e-8 c_b c_g",
            decimal(worst_off.0),
            format!("{} basis elements; worst pair {}", basis.len(), worst_off.1),
        ));
        checks.push(Check::new(
            format!("diagonality eigenvalue {sym}"),
            worst_diag.0 <= 1e-8,
            "relative 1e-8",
            decimal(worst_diag.0),
            format!("worst at beta {}", worst_diag.1),
        ));
    }
    checks
}

/// Divergence scans at `p* +- 0.25` for the nine (domain, symbol) pairs.
pub fn sharpness(eps_levels: usize) -> Check {
    let symbols = [SymbolSpec::ModPower(rat(0, 1)), SymbolSpec::ModPower(rat(1, 2)), SymbolSpec::BoundaryPower(rat(1, 4))];
    let mut jobs = Vec::new();
    for (m, n) in [(1, 1), (2, 1), (3, 2)] {
        for sym in &symbols {
            let e = exp(m, n);
            let star = match unbounded_thresholds(e, sym) {
                Ok(t) => t.adjoint_p_star,
                Err(_) => continue,
            };
            let star = star.to_f64();
            jobs.push((e, sym.clone(), star - 0.25, Verdict::Convergent));
            jobs.push((e, sym.clone(), star + 0.25, Verdict::Divergent));
        }
    }
    let results: Vec<_> = jobs
        .par_iter()
        .map(|(e, sym, p, want)| {
            let got = lp_divergence_scan(*e, witness_monomial(*e), sym, *p, eps_levels);
            (e, sym, p, want, got)
        })
        .collect();
    let mut wrong = Vec::new();
    for (e, sym, p, want, got) in &results {
        match got {
            Ok(v) if v.verdict == **want => {}
            Ok(v) => wrong.push(format!("H_{e} {sym} p={p}: {:?} (slope {:.3})", v.verdict, v.slope)),
            Err(err) => wrong.push(format!("H_{e} {sym} p={p}: {err}")),
        }
    }
    Check::new(
        "sharpness thresholds",
        wrong.is_empty() && results.len() == 18,
        "verdict matches side of p*",
        format!("{}/{} correct", results.len() - wrong.len(), results.len()),
        wrong.first().cloned().unwrap_or_else(|| format!("{} scans, {eps_levels} levels each", results.len())),
    )
}

/// Case selection, `p + G < M` and gain agreement on random inputs.
pub fn smoothing_arithmetic(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut count = 0;
    while count < 50 {
        let (m, n) = (rng.gen_range(1..=10i64), rng.gen_range(1..=10i64));
        if num::integer::gcd(m, n) != 1 {
            continue;
        }
        let e = exp(m, n);
        let eta = rat(rng.gen_range(0..32), 16);
        let (l, big_m) = (smoothing_lower(e, &eta), upper_threshold(e));
        let k = rng.gen_range(2..=64i64);
        let p = &l + (&big_m - &l) * rat(rng.gen_range(1..k), k);
        count += 1;
        let out = match smoothing_outcome(e, &eta, &p) {
            Ok(o) => o,
            Err(err) => {
                failures.push(format!("H_{e} eta={eta} p={p}: {err}"));
                continue;
            }
        };
        let threshold = Rational::from_integer(BigInt::from(2)) * (p.recip() - big_m.recip());
        let full_expected = eta >= threshold;
        match &out.kind {
            Smoothing::FullRange { r_sup } => {
                if !full_expected || *r_sup != big_m {
                    failures.push(format!("H_{e} eta={eta} p={p}: wrong case (full range)"));
                }
            }
            Smoothing::Gain { g, r } => {
                if full_expected || *r >= big_m || *r != &p + g {
                    failures.push(format!("H_{e} eta={eta} p={p}: wrong case or r = {r} >= M"));
                }
            }
        }
        match gain_consistency(&eta, &p) {
            Ok(gc) if gc.agrees() && gc.rho == rat(2, 1) / (rat(2, 1) - &eta) => {
                if !eta.is_zero() && gc.rho != Rational::one() {
                    let conj = &gc.rho / (&gc.rho - Rational::one());
                    if conj != rat(2, 1) / &eta {
                        failures.push(format!("eta={eta}: rho/(rho-1) != 2/eta"));
                    }
                }
            }
            Ok(gc) => failures.push(format!("eta={eta} p={p}: {:?} vs {:?}", gc.g_of_rho, gc.g_of_eta)),
            Err(err) => failures.push(format!("eta={eta} p={p}: {err}")),
        }
    }
    Check::new(
        "smoothing arithmetic",
        failures.is_empty(),
        "exact",
        format!("{} failures in {count} cases", failures.len()),
        failures.first().cloned().unwrap_or_else(|| "case selection, p + G < M and G(rho) = G(eta)".into()),
    )
}

/// Kernel series stabilization on sampled pairs in `H_1`.
pub fn kernel_evidence(seed: u64) -> Vec<Check> {
    match ratio_diagnostic(exp(1, 1), 200, 20, seed) {
        Ok(s) => vec![
            Check::new(
                "kernel ratio stabilization",
                s.max_ratio.is_finite() && s.max_ratio > 0.0 && s.max_rel_change < 0.01,
                "max ratio change cap 20 -> 40 < 1%",
                decimal(s.max_rel_change),
                format!("max ratio {} (cap 20), {} (cap 40), {} samples", decimal(s.max_ratio), decimal(s.max_ratio_doubled), s.samples),
            ),
            Check::new(
                "kernel hermitian symmetry",
                s.hermitian_defect <= 1e-12,
                "relative 1e-12",
                decimal(s.hermitian_defect),
                "B(z,w) against conj B(w,z)",
            ),
        ],
        Err(err) => vec![Check::new("kernel ratio stabilization", false, "1%", "error", err.to_string())],
    }
}

/// Disc lemma and Schur estimate trend tests at the listed parameters,
/// plus an informational Schur run at `epsilon = 3/4`.
pub fn schur_trends() -> Vec<Check> {
    let mut checks = Vec::new();
    match disc_lemma_check(0.5, 1.0, 64) {
        Ok(r) => checks.push(Check::new(
            "disc lemma trend (eps 1/2, beta 1)",
            r.trend.bounded,
            "last-decile max <= 2 x median",
            format!("last decile max {}, median {}", decimal(r.trend.last_decile_max), decimal(r.trend.median)),
            format!("sup ratio {} at |z| = {}", decimal(r.sup_ratio), decimal(r.argmax_z.norm())),
        )),
        Err(err) => checks.push(Check::new("disc lemma trend (eps 1/2, beta 1)", false, "2x median", "error", err.to_string())),
    }
    let e = exp(1, 1);
    let cd = TypeCD::new(rat(1, 1), rat(1, 1));
    let samples = boundary_approach_samples(e, 20);
    let cfg = QuadConfig { rel_tol: 1e-6, max_refinement: 400, ..QuadConfig::default() };
    for (eps, name) in [(rat(1, 1), "schur trend (1,1) type (1,1) eps 1"), (rat(3, 4), "schur trend (1,1) type (1,1) eps 3/4 [informational]")] {
        match schur_estimate_check(e, &cd, &eps, &samples, &cfg) {
            Ok(r) => checks.push(Check::new(
                name,
                r.trend.bounded,
                "last-decile max <= 2 x median",
                format!("last decile max {}, median {}", decimal(r.trend.last_decile_max), decimal(r.trend.median)),
                format!("sup ratio {}, {} samples", decimal(r.sup_ratio), samples.len()),
            )),
            Err(err) => {
                let detail = match &err {
                    Error::Accuracy { .. } => format!("integral does not converge: {err}"),
                    _ => err.to_string(),
                };
                checks.push(Check::new(name, false, "2x median", "error", detail))
            }
        }
    }
    checks
}

/// The closed form for `\int |w2|^{A - 2n} dV` against quadrature.
pub fn remark_29() -> Check {
    let cfg = QuadConfig::default();
    let mut worst = 0.0f64;
    let mut errors = Vec::new();
    for (m, n) in [(1, 1), (2, 1), (3, 2)] {
        let e = exp(m, n);
        let power = kernel_exponent(e).to_f64().unwrap_or(f64::NAN) - 2.0 * n as f64;
        match integrate_polar(e, |p| p.r2.powf(power), &cfg) {
            Ok(q) => worst = worst.max((q.value - remark_29_integral(e)).abs() / q.value),
            Err(err) => errors.push(err.to_string()),
        }
    }
    Check::new(
        "|w2|^(A-2n) integral",
        errors.is_empty() && worst <= 1e-8,
        "relative 1e-8",
        decimal(worst),
        errors.first().cloned().unwrap_or_else(|| "(m,n) in {(1,1),(2,1),(3,2)}".into()),
    )
}

/// The checks of a suite, in order, with the criterion each belongs to.
pub fn run(suite: Suite, seed: u64) -> Vec<(u8, Check)> {
    run_with(suite, seed, norm_sq_formula)
}

pub fn run_with(suite: Suite, seed: u64, formula: NormFormula) -> Vec<(u8, Check)> {
    let mut out = vec![(1, range_identities(seed)), (2, triangle_endpoints())];
    match suite {
        Suite::Fast => out.push((3, norm_oracle(&[(1, 1), (2, 1)], 4, formula))),
        Suite::Full => {
            out.push((3, norm_oracle(&[(1, 1), (2, 1), (3, 2), (5, 3)], 12, formula)));
            out.extend(diagonality().into_iter().map(|c| (4, c)));
            out.push((5, sharpness(DEFAULT_EPS_LEVELS)));
        }
    }
    out.push((6, smoothing_arithmetic(seed)));
    if suite == Suite::Full {
        out.extend(kernel_evidence(seed).into_iter().map(|c| (7, c)));
        out.extend(schur_trends().into_iter().map(|c| (8, c)));
    }
    out.push((9, remark_29()));
    out
}

/// Dyadic cutoff levels used by the sharpness scans.
pub const DEFAULT_EPS_LEVELS: usize = 120;
