//! Batch front-end: load realization/filter JSON, run a computation, emit
//! CSV/JSON artifacts.
//!
//! Every command is a plain function from a [`JobConfig`] to a
//! [`CmdOutcome`], so the binary stays a thin argument parser and the whole
//! surface is testable in-process. Numeric output uses 17 significant
//! digits and identical configs produce byte-identical files.
//!
//! Exit-code contract: 0 on success, 1 on invariant/numeric failure (the
//! report is still produced), 2 on malformed input or arguments.

use std::fmt::Write as _;
use std::path::PathBuf;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::infinite_product::{father_hat, l2_norm_estimate_with, product_along_points};
use crate::linalg::cx;
use crate::markov::{autocorrelation_closed, CoefficientSequence};
use crate::realization::{eval, matrix_to_pairs, observability_gramian, y_vector, Realization};
use crate::ruelle::{
    apply_pointwise, slanted_matrix, strided_coefficient_sum, trace_realization, trace_spectral,
    Window,
};
use crate::wavelet::{load_filter_json, unit_circle_grid, Convention};

/// Which batch command to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    FilterCheck,
    Markov,
    Ruelle,
    Trace,
    Cascade,
    L2Check,
    ProductDemo,
}

/// Parsed job description shared by all commands.
#[derive(Clone, Debug)]
pub struct JobConfig {
    pub command: Command,
    pub input: PathBuf,
    pub output: Option<PathBuf>,
    pub n: usize,
    pub tol: f64,
    pub convention: Option<Convention>,
    pub grid: Option<String>,
    pub window: Option<String>,
    pub seed: u64,
}

/// Result of a command: a JSON report for stdout and the exit code.
#[derive(Clone, Debug)]
pub struct CmdOutcome {
    pub report: String,
    pub exit_code: i32,
}

/// Maps an error to the exit-code contract: malformed input/arguments are
/// usage errors (2), numeric and invariant failures are 1.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Json(_) | Error::Io(_) | Error::Invalid(_) => 2,
        _ => 1,
    }
}

/// 17-significant-digit fixed formatting, round-trip safe for f64.
fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

fn read_input(config: &JobConfig) -> Result<String> {
    Ok(std::fs::read_to_string(&config.input)?)
}

fn write_output(config: &JobConfig, content: &str) -> Result<()> {
    if let Some(path) = &config.output {
        std::fs::write(path, content)?;
    }
    Ok(())
}

fn report_string<T: Serialize>(report: &T) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

/// Dispatches on the configured command.
pub fn run(config: &JobConfig) -> Result<CmdOutcome> {
    match config.command {
        Command::FilterCheck => cmd_filter_check(config),
        Command::Markov => cmd_markov(config),
        Command::Ruelle => cmd_ruelle(config),
        Command::Trace => cmd_trace(config),
        Command::Cascade => cmd_cascade(config),
        Command::L2Check => cmd_l2check(config),
        Command::ProductDemo => cmd_product_demo(config),
    }
}

// ---------------------------------------------------------------------------
// filter-check
// ---------------------------------------------------------------------------

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FilterCheckReport {
    pub convention: String,
    pub unitarity_residual: f64,
    pub m1_residual: f64,
    pub r1_deviation: f64,
    pub polyphase_residual: f64,
    pub warnings: Vec<String>,
    pub pass: bool,
}

/// Validates a filter: unitarity on a circle grid, the `M(1) = I`
/// normalization, constancy of `R1` for the paper-polyphase symbol, and
/// consistency of the polyphase column with the assembled matrix at
/// seed-randomized circle points.
pub fn cmd_filter_check(config: &JobConfig) -> Result<CmdOutcome> {
    let text = read_input(config)?;
    let loaded = load_filter_json(&text)?;
    let wf = &loaded.filter;
    let n = wf.bands();
    let grid = parse_grid_count(config, 64)?;

    let unitarity = wf.unitarity_residual(grid)?;
    let m1 = wf.m1_residual()?;

    let m_pp = wf.lowpass_symbol(Convention::PaperPolyphase)?;
    let mut r1_dev: f64 = 0.0;
    for z in unit_circle_grid(32) {
        let v = apply_pointwise(&m_pp, n, |_| cx(1.0, 0.0), z)?;
        r1_dev = r1_dev.max((v - cx(1.0, 0.0)).norm());
    }

    // Polyphase consistency at seeded random circle points.
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(config.seed);
    let eps = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / n as f64);
    let scale = 1.0 / (n as f64).sqrt();
    let mut poly_resid: f64 = 0.0;
    for _ in 0..20 {
        let z = Complex64::from_polar(1.0, rng.gen_range(0.0..2.0 * std::f64::consts::PI));
        let m = wf.eval(z)?;
        for k in 0..n {
            let col = wf.polyphase_column(eps.powu(k as u32) * z)?;
            for j in 0..n {
                poly_resid = poly_resid.max((m[(j, k)] - col[(j, 0)] * scale).norm());
            }
        }
    }

    let pass = unitarity <= 1e-8 && m1 <= 1e-10 && r1_dev <= 1e-9 && poly_resid <= 1e-9;
    let report = FilterCheckReport {
        convention: config
            .convention
            .unwrap_or(Convention::PaperPolyphase)
            .as_str()
            .to_string(),
        unitarity_residual: unitarity,
        m1_residual: m1,
        r1_deviation: r1_dev,
        polyphase_residual: poly_resid,
        warnings: loaded.warnings,
        pass,
    };
    let text = report_string(&report);
    write_output(config, &text)?;
    Ok(CmdOutcome {
        report: text,
        exit_code: if pass { 0 } else { 1 },
    })
}

// ---------------------------------------------------------------------------
// markov
// ---------------------------------------------------------------------------

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MarkovReport {
    pub nmax: usize,
    pub rows: usize,
    pub gamma: Vec<Vec<[f64; 2]>>,
    pub y: Vec<Vec<[f64; 2]>>,
}

/// Emits the autocorrelation coefficients of a scalar symbol as CSV rows
/// `(n, Re c_n, Im c_n)`, with the Gramian and `Y` in header comments.
pub fn cmd_markov(config: &JobConfig) -> Result<CmdOutcome> {
    let r = Realization::from_json_str(&read_input(config)?)?;
    if !r.is_scalar() {
        return Err(Error::dims("cmd_markov", "scalar realization", format!("{}x{}", r.output_dim(), r.input_dim())));
    }
    let nmax = parse_window_count(config, 10)?;
    let gram = observability_gramian(&r)?;
    let y = y_vector(&r, &gram)?;
    let c = autocorrelation_closed(&r, nmax)?;

    let mut csv = String::new();
    writeln!(csv, "# autocorrelation coefficients of |m|^2").unwrap();
    writeln!(csv, "# gamma = {}", serde_json::to_string(&matrix_to_pairs(&gram)).unwrap()).unwrap();
    writeln!(csv, "# y = {}", serde_json::to_string(&matrix_to_pairs(&y)).unwrap()).unwrap();
    writeln!(csv, "n,re,im").unwrap();
    let mut rows = 0usize;
    for n in -(nmax as i64)..=(nmax as i64) {
        let v = c.get_scalar(n)?;
        writeln!(csv, "{n},{},{}", fmt_f(v.re), fmt_f(v.im)).unwrap();
        rows += 1;
    }
    write_output(config, &csv)?;
    let report = MarkovReport {
        nmax,
        rows,
        gamma: matrix_to_pairs(&gram),
        y: matrix_to_pairs(&y),
    };
    Ok(CmdOutcome {
        report: report_string(&report),
        exit_code: 0,
    })
}

// ---------------------------------------------------------------------------
// ruelle / trace
// ---------------------------------------------------------------------------

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RuelleReport {
    pub n: usize,
    pub window: [i64; 4],
    pub triplets: usize,
    pub trace_spectral: f64,
    pub trace_realization: f64,
    pub trace_difference: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dense: Option<Vec<Vec<[f64; 2]>>>,
}

/// Materializes the slanted matrix over a window, exports `(ℓ, k, value)`
/// CSV triplets, and reports both trace formulas. Small windows also get a
/// dense JSON copy in the report.
pub fn cmd_ruelle(config: &JobConfig) -> Result<CmdOutcome> {
    let r = Realization::from_json_str(&read_input(config)?)?;
    let n = config.n;
    let window = match &config.window {
        Some(spec) => parse_window4(spec)?,
        None => crate::ruelle::default_window(&r, n)?,
    };
    // Coefficient window wide enough to cover every slant index the window
    // can reach.
    let corners = [
        (n as i64) * window.l_min - window.k_min,
        (n as i64) * window.l_min - window.k_max,
        (n as i64) * window.l_max - window.k_min,
        (n as i64) * window.l_max - window.k_max,
    ];
    let nmax = corners.iter().map(|v| v.unsigned_abs()).max().unwrap() as usize + 2;
    let c = autocorrelation_closed(&r, nmax)?;
    let op = slanted_matrix(&c, n, window)?;

    let mut csv = String::new();
    writeln!(csv, "# slanted Ruelle matrix entries r(l,k) = c(N*l-k)/N, N = {n}").unwrap();
    writeln!(csv, "l,k,re,im").unwrap();
    let triplets = op.triplets();
    for (l, k, v) in &triplets {
        writeln!(csv, "{l},{k},{},{}", fmt_f(v.re), fmt_f(v.im)).unwrap();
    }
    write_output(config, &csv)?;

    let ts = trace_spectral(&r, n)?;
    let tr = trace_realization(&r, n)?;
    let rows = (window.l_max - window.l_min + 1) as usize;
    let cols = (window.k_max - window.k_min + 1) as usize;
    let dense = if rows <= 16 && cols <= 16 {
        Some(matrix_to_pairs(&op.to_dense()))
    } else {
        None
    };
    let report = RuelleReport {
        n,
        window: [window.l_min, window.l_max, window.k_min, window.k_max],
        triplets: triplets.len(),
        trace_spectral: ts,
        trace_realization: tr,
        trace_difference: ts - tr,
        dense,
    };
    Ok(CmdOutcome {
        report: report_string(&report),
        exit_code: 0,
    })
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceReport {
    pub n: usize,
    pub trace_spectral: f64,
    pub trace_realization: f64,
    pub difference: f64,
    /// Coefficient-route check `Σ_ℓ c_{Nℓ}` over a decay-sized window;
    /// equals the spectral value for every symbol.
    pub n_strided_sum: f64,
}

/// Reports both trace formulas and the coefficient-route cross-check.
pub fn cmd_trace(config: &JobConfig) -> Result<CmdOutcome> {
    let r = Realization::from_json_str(&read_input(config)?)?;
    let n = config.n;
    let ts = trace_spectral(&r, n)?;
    let tr = trace_realization(&r, n)?;
    let c = coefficients_to_decay(&r)?;
    let strided = strided_coefficient_sum(&c, n)?;
    let report = TraceReport {
        n,
        trace_spectral: ts,
        trace_realization: tr,
        difference: ts - tr,
        n_strided_sum: strided.re,
    };
    let text = report_string(&report);
    write_output(config, &text)?;
    Ok(CmdOutcome {
        report: text,
        exit_code: 0,
    })
}

fn coefficients_to_decay(r: &Realization) -> Result<CoefficientSequence> {
    let rho = r.rho()?;
    let rho_prime = (rho + 0.01).min(0.999);
    let nmax = ((1e-14f64.ln() / rho_prime.ln()).ceil() as usize).clamp(8, 4096);
    autocorrelation_closed(r, nmax)
}

// ---------------------------------------------------------------------------
// cascade / l2check
// ---------------------------------------------------------------------------

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CascadeReport {
    pub convention: String,
    pub n: usize,
    pub points: usize,
    pub l2_certificate: f64,
    pub r1_max: f64,
    pub nonincreasing: bool,
    pub verdict: String,
}

fn unit_dc_symbol(config: &JobConfig, r: Realization) -> Result<Realization> {
    let convention = config.convention.ok_or_else(|| {
        Error::Invalid("--convention is required for commands touching the symbol m".into())
    })?;
    Ok(match convention {
        Convention::UnitDc => r,
        Convention::PaperPolyphase => r.scale_output(cx(1.0 / (config.n as f64).sqrt(), 0.0)),
    })
}

/// Samples the father-wavelet transform over a `w` grid as CSV
/// `(w, Re, Im, abs)` and reports the L² certificate and the `R1` verdict.
pub fn cmd_cascade(config: &JobConfig) -> Result<CmdOutcome> {
    let m = unit_dc_symbol(config, Realization::from_json_str(&read_input(config)?)?)?;
    let n = config.n;
    let grid = parse_grid_range(config, (-4.0, 4.0, 1.0 / 64.0))?;

    let l2 = l2_norm_estimate_with(&m, n, 4, 64)?;
    let verdict = if l2.nonincreasing { "l2-certified" } else { "not-l2" };

    let mut csv = String::new();
    writeln!(
        csv,
        "# l2 certificate = {}, r1_max = {}, nonincreasing = {}, verdict = {}",
        fmt_f(l2.certificate),
        fmt_f(l2.r1_max),
        l2.nonincreasing,
        verdict
    )
    .unwrap();
    writeln!(csv, "w,re,im,abs").unwrap();
    let mut count = 0usize;
    let mut w = grid.0;
    while w <= grid.1 + 1e-12 {
        let v = father_hat(&m, n, w, config.tol)?;
        writeln!(csv, "{},{},{},{}", fmt_f(w), fmt_f(v.re), fmt_f(v.im), fmt_f(v.norm())).unwrap();
        count += 1;
        w = grid.0 + count as f64 * grid.2;
    }
    write_output(config, &csv)?;

    let report = CascadeReport {
        convention: config.convention.unwrap().as_str().to_string(),
        n,
        points: count,
        l2_certificate: l2.certificate,
        r1_max: l2.r1_max,
        nonincreasing: l2.nonincreasing,
        verdict: verdict.to_string(),
    };
    Ok(CmdOutcome {
        report: report_string(&report),
        exit_code: 0,
    })
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct L2CheckReport {
    pub n: usize,
    pub kmax: usize,
    pub certificate: f64,
    pub r1_max: f64,
    pub nonincreasing: bool,
}

/// Emits `(k, ∫|f_k|²)` CSV for the partial cascade products.
pub fn cmd_l2check(config: &JobConfig) -> Result<CmdOutcome> {
    let m = unit_dc_symbol(config, Realization::from_json_str(&read_input(config)?)?)?;
    let n = config.n;
    let kmax = parse_window_count(config, 4)?;
    let quad = parse_grid_count(config, 64)?;
    let l2 = l2_norm_estimate_with(&m, n, kmax, quad)?;

    let mut csv = String::new();
    writeln!(csv, "# partial cascade product L2 integrals").unwrap();
    writeln!(csv, "k,integral").unwrap();
    for (k, v) in &l2.integrals {
        writeln!(csv, "{k},{}", fmt_f(*v)).unwrap();
    }
    write_output(config, &csv)?;

    let report = L2CheckReport {
        n,
        kmax,
        certificate: l2.certificate,
        r1_max: l2.r1_max,
        nonincreasing: l2.nonincreasing,
    };
    Ok(CmdOutcome {
        report: report_string(&report),
        exit_code: 0,
    })
}

// ---------------------------------------------------------------------------
// product-demo
// ---------------------------------------------------------------------------

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ProductDemoReport {
    pub factors: usize,
    pub value: Vec<Vec<[f64; 2]>>,
    pub tail_cut: usize,
    pub tail_bound: f64,
    pub proof_constant: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cascade_value: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cascade_difference: Option<f64>,
}

/// Multiplies `M(z_k)` along `z_k = e^{iπ/2^k}` and reports the certified
/// tail bound; for a scalar unit-dc symbol the same points are the factors
/// of the cascade at `w = 1/2`, which is cross-checked.
pub fn cmd_product_demo(config: &JobConfig) -> Result<CmdOutcome> {
    let r = Realization::from_json_str(&read_input(config)?)?;
    let count = parse_grid_count(config, 40)?;
    let zs: Vec<Complex64> = (1..=count)
        .map(|k| Complex64::from_polar(1.0, std::f64::consts::PI / 2f64.powi(k as i32)))
        .collect();
    let out = product_along_points(&r, &zs, config.tol)?;

    let (cascade_value, cascade_difference) = if r.is_scalar() {
        let hat = father_hat(&r, 2, 0.5, config.tol)?;
        let diff = (out.value.as_scalar()? - hat).norm();
        (Some([hat.re, hat.im]), Some(diff))
    } else {
        (None, None)
    };

    let report = ProductDemoReport {
        factors: zs.len(),
        value: matrix_to_pairs(&out.value),
        tail_cut: out.cut,
        tail_bound: out.bound,
        proof_constant: out.proof_constant,
        cascade_value,
        cascade_difference,
    };
    let text = report_string(&report);
    write_output(config, &text)?;
    Ok(CmdOutcome {
        report: text,
        exit_code: 0,
    })
}

// ---------------------------------------------------------------------------
// flag parsing helpers
// ---------------------------------------------------------------------------

fn parse_grid_count(config: &JobConfig, default: usize) -> Result<usize> {
    match &config.grid {
        None => Ok(default),
        Some(s) => s
            .parse::<usize>()
            .map_err(|_| Error::Invalid(format!("--grid expects a count here, got '{s}'"))),
    }
}

fn parse_window_count(config: &JobConfig, default: usize) -> Result<usize> {
    match &config.window {
        None => Ok(default),
        Some(s) => s
            .parse::<usize>()
            .map_err(|_| Error::Invalid(format!("--window expects a count here, got '{s}'"))),
    }
}

fn parse_window4(spec: &str) -> Result<Window> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 4 {
        return Err(Error::Invalid(format!(
            "--window expects 'lmin,lmax,kmin,kmax', got '{spec}'"
        )));
    }
    let vals: Vec<i64> = parts
        .iter()
        .map(|p| p.trim().parse::<i64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Invalid(format!("--window has a non-integer part in '{spec}'")))?;
    Window::new(vals[0], vals[1], vals[2], vals[3])
}

fn parse_grid_range(config: &JobConfig, default: (f64, f64, f64)) -> Result<(f64, f64, f64)> {
    match &config.grid {
        None => Ok(default),
        Some(s) => {
            let parts: Vec<&str> = s.split(':').collect();
            if parts.len() != 3 {
                return Err(Error::Invalid(format!(
                    "--grid expects 'min:max:step' here, got '{s}'"
                )));
            }
            let vals: Vec<f64> = parts
                .iter()
                .map(|p| p.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Invalid(format!("--grid has a non-numeric part in '{s}'")))?;
            if vals[2] <= 0.0 || vals[1] < vals[0] {
                return Err(Error::Invalid("--grid needs min <= max and step > 0".into()));
            }
            Ok((vals[0], vals[1], vals[2]))
        }
    }
}

/// Cross-check by Fourier sampling, used by the `trace` command tests:
/// evaluates `|m|²` on a circle grid and extracts coefficient `n` of
/// `z^{−n}`.
pub fn dft_autocorrelation(r: &Realization, samples: usize, n: i64) -> Result<Complex64> {
    let mut acc = Complex64::default();
    for (t, z) in unit_circle_grid(samples).into_iter().enumerate() {
        let v = eval(r, z)?.as_scalar()?;
        let phase =
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (t as f64) * (n as f64) / samples as f64);
        acc += cx(v.norm_sqr(), 0.0) * phase;
    }
    Ok(acc / samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window4_parsing() {
        let w = parse_window4("0,0,-1,1").unwrap();
        assert_eq!(w, Window::new(0, 0, -1, 1).unwrap());
        assert!(parse_window4("1,2,3").is_err());
        assert!(parse_window4("a,b,c,d").is_err());
    }

    #[test]
    fn grid_range_parsing() {
        let config = JobConfig {
            command: Command::Cascade,
            input: PathBuf::from("x"),
            output: None,
            n: 2,
            tol: 1e-10,
            convention: Some(Convention::UnitDc),
            grid: Some("-1:1:0.5".into()),
            window: None,
            seed: 0,
        };
        assert_eq!(parse_grid_range(&config, (0.0, 0.0, 1.0)).unwrap(), (-1.0, 1.0, 0.5));
    }

    #[test]
    fn seventeen_digit_format() {
        assert_eq!(fmt_f(0.25), "2.5000000000000000e-1");
        let x = 0.1 + 0.2;
        let parsed: f64 = fmt_f(x).parse().unwrap();
        assert_eq!(parsed, x);
    }

    #[test]
    fn exit_codes_by_error_class() {
        assert_eq!(exit_code_for(&Error::Invalid("bad".into())), 2);
        assert_eq!(exit_code_for(&Error::NotContractive { rho: 1.2 }), 1);
        assert_eq!(
            exit_code_for(&Error::Singular { pivot: 0.0, threshold: 1e-12 }),
            1
        );
    }
}
