use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num::ToPrimitive;
use serde_json::{json, Value};

use hartogs::index::{least_exponent, witness_monomial};
use hartogs::kernel::ratio_diagnostic;
use hartogs::moments::{boundary_power_eigenvalue, mod_power_eigenvalue, monomial_norm_sq, Method};
use hartogs::quad::{integrate_polar_ln, lp_divergence_scan, QuadConfig};
use hartogs::ranges::{
    bergman_range, kernel_exponent, parse_rational, smoothing_lower, smoothing_outcome, toeplitz_mod_power_range,
    unbounded_thresholds, upper_threshold, Smoothing,
};
use hartogs::report::{decimal, extended, prange, rational, real, Check, Report};
use hartogs::suite::{self, Suite, DEFAULT_EPS_LEVELS};
use hartogs::{Error, HartogsExponent, MultiIndex, Rational, SymbolSpec};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_ACCURACY: u8 = 3;

/// Relative rounding error assumed for closed-form values (log-gamma based).
const CLOSED_FORM_REL_ERROR: f64 = 1e-14;

/// Bergman and Toeplitz operator ranges on generalized Hartogs triangles.
#[derive(Parser)]
#[command(name = "hartogs", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Clone, Copy)]
struct Domain {
    /// Numerator of the exponent m/n
    #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
    m: i64,
    /// Denominator of the exponent m/n
    #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
    n: i64,
}

impl Domain {
    fn exp(self) -> HartogsExponent {
        HartogsExponent::new(self.m, self.n).expect("clap keeps m, n positive")
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact L^p ranges and thresholds
    Ranges {
        #[command(flatten)]
        domain: Domain,
        /// mod:<a> or boundary:<eta>
        #[arg(long, value_parser = parse_symbol)]
        symbol: Option<SymbolSpec>,
        /// Lebesgue exponent, decimal or fraction
        #[arg(long, value_parser = parse_q)]
        p: Option<Rational>,
    },
    /// Run the verification suite
    Verify {
        #[arg(long, default_value = "full", value_parser = parse_suite)]
        suite: Suite,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// L^p divergence scans of the adjoint witness over a grid of p
    Scan {
        #[command(flatten)]
        domain: Domain,
        #[arg(long, default_value = "mod:0", value_parser = parse_symbol)]
        symbol: SymbolSpec,
        /// Comma-separated or repeated
        #[arg(long, value_delimiter = ',', required = true, num_args = 1.., value_parser = parse_q)]
        p: Vec<Rational>,
        #[arg(long, default_value_t = DEFAULT_EPS_LEVELS as u64, value_parser = clap::value_parser!(u64).range(4..))]
        eps_levels: u64,
        #[arg(long, default_value = "scan.csv")]
        out: PathBuf,
    },
    /// Truncated kernel series against the kernel estimate
    Kernel {
        #[command(flatten)]
        domain: Domain,
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(i64).range(4..))]
        cap: i64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Squared L^2 norm of z^alpha
    Norm {
        #[command(flatten)]
        domain: Domain,
        /// a1,a2
        #[arg(long, allow_hyphen_values = true, value_parser = parse_index)]
        alpha: MultiIndex,
        /// Also integrate numerically
        #[arg(long)]
        quadrature: bool,
    },
    /// Eigenvalue of a radial Toeplitz operator on z^beta
    Eigen {
        #[command(flatten)]
        domain: Domain,
        #[arg(long, value_parser = parse_symbol)]
        symbol: SymbolSpec,
        /// b1,b2
        #[arg(long, allow_hyphen_values = true, value_parser = parse_index)]
        beta: MultiIndex,
    },
    /// Sharpness witness monomial and least exponents
    Witness {
        #[command(flatten)]
        domain: Domain,
    },
}

fn parse_symbol(s: &str) -> Result<SymbolSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_q(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}

fn parse_index(s: &str) -> Result<MultiIndex, String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("`{s}` must look like a1,a2"))?;
    let a1 = a.trim().parse::<i64>().map_err(|e| format!("a1: {e}"))?;
    let a2 = b.trim().parse::<i64>().map_err(|e| format!("a2: {e}"))?;
    Ok(MultiIndex::new(a1, a2))
}

fn domain_inputs(r: &mut Report, d: Domain) {
    let e = d.exp();
    r.input("m", json!(d.m)).input("n", json!(d.n)).input("exponent", json!(e.to_string()));
}

fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn index_value(a: MultiIndex) -> Value {
    json!([a.a1, a.a2])
}

/// Closed forms carry a rounding bound rather than zero.
fn moment_real(v: f64, m: Method, abs_error: f64) -> Value {
    match m {
        Method::ClosedForm => real(v, abs_error.max(v.abs() * CLOSED_FORM_REL_ERROR)),
        Method::Quadrature => real(v, abs_error),
    }
}

fn method(m: Method) -> &'static str {
    match m {
        Method::ClosedForm => "closed_form",
        Method::Quadrature => "quadrature",
    }
}

fn ranges(d: Domain, symbol: Option<SymbolSpec>, p: Option<Rational>) -> hartogs::Result<Report> {
    let e = d.exp();
    let mut r = Report::new("ranges");
    domain_inputs(&mut r, d);
    if let Some(s) = &symbol {
        r.input("symbol", json!(s.to_string()));
    }
    if let Some(p) = &p {
        r.input("p", rational(p));
    }
    r.output("kernel_exponent", rational(&kernel_exponent(e)));
    r.output("upper_threshold", rational(&upper_threshold(e)));
    r.output("bergman_range", prange(&bergman_range(e)));
    match &symbol {
        Some(SymbolSpec::ModPower(a)) => {
            let range = toeplitz_mod_power_range(e, a)?;
            if let Some(p) = &p {
                r.output("bounded_at_p", json!(range.contains(p)));
            }
            r.output("toeplitz_range", prange(&range));
        }
        Some(SymbolSpec::BoundaryPower(eta)) => {
            r.output("smoothing_lower", rational(&smoothing_lower(e, eta)));
            if let Some(p) = &p {
                let out = smoothing_outcome(e, eta, p)?;
                r.output("threshold_eta", rational(&out.threshold_eta));
                match out.kind {
                    Smoothing::FullRange { r_sup } => {
                        r.output("case", json!("full_range")).output("r_sup", rational(&r_sup));
                    }
                    Smoothing::Gain { g, r: target } => {
                        r.output("case", json!("gain")).output("G", rational(&g)).output("r", rational(&target));
                    }
                }
            }
        }
        None => {
            if let Some(p) = &p {
                r.output("bergman_bounded_at_p", json!(bergman_range(e).contains(p)));
            }
        }
    }
    if let Some(s) = &symbol {
        let t = unbounded_thresholds(e, s)?;
        r.output("adjoint_p_star", extended(&t.adjoint_p_star));
        r.output("operator_upper", rational(&t.operator_upper));
    }
    Ok(r)
}

fn verify(which: Suite, seed: u64) -> Report {
    let mut r = Report::new("verify");
    r.input("suite", json!(match which {
        Suite::Fast => "fast",
        Suite::Full => "full",
    }));
    r.input("seed", json!(seed));
    for (criterion, mut check) in suite::run(which, seed) {
        check.name = format!("{criterion}: {}", check.name);
        r.checks.push(check);
    }
    r.output("passed", json!(r.checks.iter().filter(|c| c.pass).count()));
    r.output("failed", json!(r.checks.iter().filter(|c| !c.pass).count()));
    r
}

fn scan(d: Domain, symbol: SymbolSpec, ps: Vec<Rational>, eps_levels: u64, out: PathBuf) -> hartogs::Result<Report> {
    let e = d.exp();
    let w = witness_monomial(e);
    let mut r = Report::new("scan");
    domain_inputs(&mut r, d);
    r.input("symbol", json!(symbol.to_string()));
    r.input("p", Value::Array(ps.iter().map(rational).collect()));
    r.input("eps_levels", json!(eps_levels));
    r.input("out", json!(out.display().to_string()));
    r.output("witness", json!([w.beta1, w.beta2]));
    r.output("adjoint_p_star", extended(&unbounded_thresholds(e, &symbol)?.adjoint_p_star));

    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    for p in &ps {
        let v = lp_divergence_scan(e, w, &symbol, to_f64(p), eps_levels as usize)?;
        for (eps, integral) in &v.values {
            rows.push([p.to_string(), decimal(*eps), decimal(*integral), v.verdict.as_str().into(), decimal(v.slope)]);
        }
        verdicts.push(json!({
            "p": rational(p),
            "verdict": v.verdict.as_str(),
            "slope": decimal(v.slope),
            "shell_growth": decimal(v.growth),
        }));
    }
    let io = |err: std::io::Error| Error::Domain(format!("cannot write {}: {err}", out.display()));
    let mut csv = csv::Writer::from_path(&out).map_err(|e| io(e.into()))?;
    csv.write_record(["p", "eps", "integral", "verdict", "slope"]).map_err(|e| io(e.into()))?;
    for row in &rows {
        csv.write_record(row).map_err(|e| io(e.into()))?;
    }
    csv.flush().map_err(io)?;
    r.output("verdicts", Value::Array(verdicts));
    r.output("rows", json!(rows.len()));
    Ok(r)
}

fn kernel(d: Domain, samples: u64, cap: i64, seed: u64) -> hartogs::Result<Report> {
    let s = ratio_diagnostic(d.exp(), samples as usize, cap, seed)?;
    let mut r = Report::new("kernel");
    domain_inputs(&mut r, d);
    r.input("samples", json!(samples)).input("cap", json!(cap)).input("seed", json!(seed));
    r.output("max_ratio", json!(decimal(s.max_ratio)));
    r.output("mean_ratio", json!(decimal(s.mean_ratio)));
    r.output("max_ratio_doubled_cap", json!(decimal(s.max_ratio_doubled)));
    r.output("mean_ratio_doubled_cap", json!(decimal(s.mean_ratio_doubled)));
    r.output("max_rel_change", json!(decimal(s.max_rel_change)));
    r.output("pointwise_rel_change", json!(decimal(s.pointwise_rel_change)));
    r.output("hermitian_defect", json!(decimal(s.hermitian_defect)));
    r.checks.push(Check::new(
        "stabilization",
        s.max_ratio.is_finite() && s.max_rel_change < 0.01,
        "max ratio change at doubled cap < 1%",
        decimal(s.max_rel_change),
        format!("cap {cap} -> {}", 2 * cap),
    ));
    Ok(r)
}

fn norm(d: Domain, alpha: MultiIndex, quadrature: bool) -> hartogs::Result<Report> {
    let e = d.exp();
    let v = monomial_norm_sq(e, alpha)?;
    let mut r = Report::new("norm");
    domain_inputs(&mut r, d);
    r.input("alpha", index_value(alpha));
    r.output("norm_sq", moment_real(v.value, v.method, v.abs_error_bound));
    r.output("method", json!(method(v.method)));
    if quadrature {
        let (a1, a2) = (alpha.a1 as f64, alpha.a2 as f64);
        let q = integrate_polar_ln(e, |p| 2.0 * a1 * p.ln_r1 + 2.0 * a2 * p.ln_r2, &QuadConfig::default())?;
        r.output("quadrature", real(q.value, q.abs_error_bound));
    }
    Ok(r)
}

fn eigen(d: Domain, symbol: SymbolSpec, beta: MultiIndex) -> hartogs::Result<Report> {
    let e = d.exp();
    let mut r = Report::new("eigen");
    domain_inputs(&mut r, d);
    r.input("symbol", json!(symbol.to_string())).input("beta", index_value(beta));
    match &symbol {
        SymbolSpec::ModPower(a) => {
            r.output("eigenvalue", moment_real(mod_power_eigenvalue(e, beta, to_f64(a))?, Method::ClosedForm, 0.0));
            r.output("method", json!(method(Method::ClosedForm)));
        }
        SymbolSpec::BoundaryPower(eta) => {
            let v = boundary_power_eigenvalue(e, beta, to_f64(eta))?;
            r.output("eigenvalue", moment_real(v.value, v.method, v.abs_error_bound));
            r.output("method", json!(method(v.method)));
        }
    }
    Ok(r)
}

fn witness(d: Domain) -> Report {
    let e = d.exp();
    let w = witness_monomial(e);
    let mut r = Report::new("witness");
    domain_inputs(&mut r, d);
    r.output("beta1", json!(w.beta1)).output("beta2", json!(w.beta2));
    r.output("least_exponent_beta1", json!(least_exponent(e, w.beta1)));
    r
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Cmd::Ranges { domain, symbol, p } => ranges(domain, symbol, p),
        Cmd::Verify { suite, seed } => Ok(verify(suite, seed)),
        Cmd::Scan { domain, symbol, p, eps_levels, out } => scan(domain, symbol, p, eps_levels, out),
        Cmd::Kernel { domain, samples, cap, seed } => kernel(domain, samples, cap, seed),
        Cmd::Norm { domain, alpha, quadrature } => norm(domain, alpha, quadrature),
        Cmd::Eigen { domain, symbol, beta } => eigen(domain, symbol, beta),
        Cmd::Witness { domain } => Ok(witness(domain)),
    };
    match result {
        Ok(report) => {
            print!("{}", report.to_json());
            if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                for c in report.checks.iter().filter(|c| !c.pass) {
                    eprintln!("check failed: {}: {} ({})", c.name, c.measured, c.detail);
                }
                ExitCode::from(EXIT_CHECK_FAILED)
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(match err {
                Error::Accuracy { .. } => EXIT_ACCURACY,
                _ => EXIT_USAGE,
            })
        }
    }
}
