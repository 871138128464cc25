//! Ruelle transfer operator in slanted-matrix form.
//!
//! For a scalar symbol `m` with autocorrelation coefficients `c_n`, the
//! operator `(Rf)(z) = (1/N)·Σ_{w^N=z} |m(w)|² f(w)` acts on sequences as
//! `(Rf)_ℓ = (1/N)·Σ_k c_{Nℓ−k} f_k`, i.e. through the sparse slanted
//! matrix `r_{ℓ,k} = c_{Nℓ−k}/N` whose row support slides by `N` columns
//! per row. Weighted ℓ¹/ℓ² sequence norms with exponential weights, the
//! two trace formulas, and a continuity certificate for the weighted
//! spaces live here as well.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{cx, solve, ComplexMatrix};
use crate::markov::CoefficientSequence;
use crate::realization::{eval, observability_gramian, y_vector, Realization};

/// Index bounds of a materialized slanted-matrix window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub l_min: i64,
    pub l_max: i64,
    pub k_min: i64,
    pub k_max: i64,
}

impl Window {
    pub fn new(l_min: i64, l_max: i64, k_min: i64, k_max: i64) -> Result<Self> {
        if l_min > l_max || k_min > k_max {
            return Err(Error::Invalid("empty window bounds".into()));
        }
        Ok(Window { l_min, l_max, k_min, k_max })
    }
}

/// Sparse slanted matrix `r_{ℓ,k} = c_{Nℓ−k}/N` over a finite window.
///
/// Immutable after construction; rows store `(k, value)` pairs in
/// ascending `k` so that applications sum in a fixed order.
#[derive(Clone, Debug)]
pub struct SlantedOperator {
    n: usize,
    coefficients: CoefficientSequence,
    window: Window,
    rows: Vec<(i64, Vec<(i64, Complex64)>)>,
}

/// Materializes the slanted matrix of the coefficients over a window.
///
/// Entries whose index `Nℓ−k` falls outside the coefficient support, and
/// exact zeros, are omitted from the sparse rows; an all-zero coefficient
/// sequence therefore yields an empty operator.
pub fn slanted_matrix(c: &CoefficientSequence, n: usize, window: Window) -> Result<SlantedOperator> {
    if n < 2 {
        return Err(Error::Invalid(format!("scaling count N must be >= 2, got {n}")));
    }
    if !c.is_scalar() {
        return Err(Error::dims("slanted_matrix", "scalar coefficients", format!("{:?}", c.shape())));
    }
    let inv_n = 1.0 / n as f64;
    let mut rows = Vec::new();
    for l in window.l_min..=window.l_max {
        let mut row = Vec::new();
        // Support of row ℓ: Nℓ − k within the coefficient window.
        let k_lo = (n as i64) * l - c.last_index();
        let k_hi = (n as i64) * l - c.first_index();
        for k in k_lo.max(window.k_min)..=k_hi.min(window.k_max) {
            let v = c.get_scalar((n as i64) * l - k)?;
            if v != Complex64::default() {
                row.push((k, v * inv_n));
            }
        }
        if !row.is_empty() {
            rows.push((l, row));
        }
    }
    Ok(SlantedOperator {
        n,
        coefficients: c.clone(),
        window,
        rows,
    })
}

impl SlantedOperator {
    pub fn scaling(&self) -> usize {
        self.n
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn coefficients(&self) -> &CoefficientSequence {
        &self.coefficients
    }

    /// Entry `r_{ℓ,k} = c_{Nℓ−k}/N`, zero outside the coefficient support.
    pub fn entry(&self, l: i64, k: i64) -> Complex64 {
        self.coefficients
            .get_scalar((self.n as i64) * l - k)
            .map(|v| v / self.n as f64)
            .unwrap_or_default()
    }

    /// Materialized nonzero entries as `(ℓ, k, value)` triplets,
    /// row-major in ascending `ℓ` then `k`.
    pub fn triplets(&self) -> Vec<(i64, i64, Complex64)> {
        let mut out = Vec::new();
        for (l, row) in &self.rows {
            for (k, v) in row {
                out.push((*l, *k, *v));
            }
        }
        out
    }

    /// Dense matrix over the window (rows ℓ, columns k).
    pub fn to_dense(&self) -> ComplexMatrix {
        let nrows = (self.window.l_max - self.window.l_min + 1) as usize;
        let ncols = (self.window.k_max - self.window.k_min + 1) as usize;
        ComplexMatrix::from_fn(nrows, ncols, |i, j| {
            self.entry(self.window.l_min + i as i64, self.window.k_min + j as i64)
        })
    }
}

/// Default window for a symbol: wide enough that the omitted coefficients
/// are below 1e−12 at the decay rate `ρ(A) + 0.01`.
pub fn default_window(r: &Realization, n: usize) -> Result<Window> {
    let rho = r.rho()?;
    let rho_prime = (rho + 0.01).min(0.999);
    let width = ((1e-12f64.ln() / rho_prime.ln()).ceil() as i64).clamp(4, 4096);
    Window::new(-width, width, -(n as i64) * width - width, (n as i64) * width + width)
}

/// Two-sided scalar sequence with an exponential-weight tag.
#[derive(Clone, Debug)]
pub struct WeightedSequence {
    offset: i64,
    values: Vec<Complex64>,
    weight: f64,
}

impl WeightedSequence {
    pub fn new(offset: i64, values: Vec<Complex64>, weight: f64) -> Result<Self> {
        if weight < 0.0 {
            return Err(Error::Invalid("weight must be nonnegative".into()));
        }
        Ok(WeightedSequence { offset, values, weight })
    }

    /// Kronecker delta at `at`.
    pub fn delta(at: i64) -> Self {
        WeightedSequence {
            offset: at,
            values: vec![cx(1.0, 0.0)],
            weight: 0.0,
        }
    }

    pub fn first_index(&self) -> i64 {
        self.offset
    }

    pub fn last_index(&self) -> i64 {
        self.offset + self.values.len() as i64 - 1
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn get(&self, k: i64) -> Complex64 {
        if k < self.offset || k > self.last_index() {
            Complex64::default()
        } else {
            self.values[(k - self.offset) as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let offset = self.offset;
        self.values.iter().enumerate().map(move |(i, &v)| (offset + i as i64, v))
    }
}

/// Which weighted norm to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormOrder {
    /// `‖f‖_{r,1} = Σ e^{r|n|} |f_n|`
    One,
    /// The squared norm `‖f‖²_{r,2} = Σ e^{r|n|} |f_n|²`
    Two,
}

/// The weighted sums over the stored window; for [`NormOrder::Two`] this is
/// the squared norm, exactly as defined.
pub fn weighted_norm(f: &WeightedSequence, r: f64, p: NormOrder) -> f64 {
    f.iter()
        .map(|(n, v)| {
            let w = (r * n.unsigned_abs() as f64).exp();
            match p {
                NormOrder::One => w * v.norm(),
                NormOrder::Two => w * v.norm_sqr(),
            }
        })
        .sum()
}

/// Result of applying the slanted operator to a sequence.
#[derive(Clone, Debug)]
pub struct ApplyOutcome {
    pub result: WeightedSequence,
    /// Set when the input had nonzero entries outside the operator's
    /// k-window, so the output saw a truncated input.
    pub truncated: bool,
}

/// Applies `(Rf)_ℓ = (1/N)·Σ_k c_{Nℓ−k} f_k` over the operator's ℓ-window.
///
/// Summation is in ascending `k`, so parallel application over disjoint
/// ℓ-ranges is bit-identical to the sequential result.
pub fn apply(op: &SlantedOperator, f: &WeightedSequence) -> ApplyOutcome {
    let truncated = f
        .iter()
        .any(|(k, v)| v != Complex64::default() && (k < op.window.k_min || k > op.window.k_max));
    let inv_n = 1.0 / op.n as f64;
    let mut values = Vec::with_capacity((op.window.l_max - op.window.l_min + 1) as usize);
    for l in op.window.l_min..=op.window.l_max {
        let mut acc = Complex64::default();
        let lo = f.first_index().max(op.window.k_min);
        let hi = f.last_index().min(op.window.k_max);
        for k in lo..=hi {
            let c = op
                .coefficients
                .get_scalar((op.n as i64) * l - k)
                .unwrap_or_default();
            acc += c * f.get(k);
        }
        values.push(acc * inv_n);
    }
    ApplyOutcome {
        result: WeightedSequence {
            offset: op.window.l_min,
            values,
            weight: f.weight,
        },
        truncated,
    }
}

/// Pointwise transfer operator `(Rf)(z) = (1/N)·Σ_{w^N=z} |m(w)|² f(w)`
/// for `z` on the unit circle; the `N` roots are enumerated from the
/// principal argument of `z`.
pub fn apply_pointwise(
    m_real: &Realization,
    n: usize,
    f: impl Fn(Complex64) -> Complex64,
    z: Complex64,
) -> Result<Complex64> {
    if !m_real.is_scalar() {
        return Err(Error::dims("apply_pointwise", "scalar symbol", format!("{}x{}", m_real.output_dim(), m_real.input_dim())));
    }
    if (z.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::Invalid(format!("|z| must be 1, got {}", z.norm())));
    }
    if n < 1 {
        return Err(Error::Invalid("N must be >= 1".into()));
    }
    let theta = z.arg();
    let radius = z.norm().powf(1.0 / n as f64);
    let mut acc = Complex64::default();
    for p in 0..n {
        let ang = (theta + 2.0 * std::f64::consts::PI * p as f64) / n as f64;
        let w = Complex64::from_polar(radius, ang);
        let mv = eval(m_real, w)?.as_scalar()?;
        acc += cx(mv.norm_sqr(), 0.0) * f(w);
    }
    Ok(acc / n as f64)
}

/// Trace by root evaluation: `(1/N)·Σ_{w^N=1} |m(w)|²`.
pub fn trace_spectral(m_real: &Realization, n: usize) -> Result<f64> {
    let t = apply_pointwise(m_real, n, |_| cx(1.0, 0.0), cx(1.0, 0.0))?;
    Ok(t.re)
}

/// Trace from the realization data:
/// `(1/N)·(DD* + B*ΓB + Y(I−A)⁻¹B + B*(I−A*)⁻¹Y*)`.
///
/// Summing the closed autocorrelation formulas over all of ℤ gives exactly
/// these four terms, so this equals `(1/N)·Σ_{n∈ℤ} c_n = (1/N)·|m(1)|²`.
/// Only the scalar case is supported: for matrix values the printed adjoint
/// placements do not type-check, so non-scalar input is rejected.
pub fn trace_realization(r: &Realization, n: usize) -> Result<f64> {
    if !r.is_scalar() {
        return Err(Error::dims("trace_realization", "scalar symbol", format!("{}x{}", r.output_dim(), r.input_dim())));
    }
    let gram = observability_gramian(r)?;
    let y = y_vector(r, &gram)?;
    let dd = r.d().adjoint().mul(r.d())?.as_scalar()?;
    let bgb = r.b().adjoint().mul(&gram)?.mul(r.b())?.as_scalar()?;
    let dim = r.state_dim();
    let (term3, term4) = if dim == 0 {
        (Complex64::default(), Complex64::default())
    } else {
        let i_a = ComplexMatrix::identity(dim).sub(r.a())?;
        let x = solve(&i_a, r.b(), 1e-12)?;
        let t3 = y.mul(&x)?.as_scalar()?;
        (t3, t3.conj())
    };
    let total = dd + bgb + term3 + term4;
    Ok(total.re / n as f64)
}

/// Strided sum `Σ_ℓ c_{s·ℓ}` over the stored window.
///
/// With stride `s = N` this equals [`trace_spectral`] for every symbol
/// (root-of-unity averaging keeps exactly the indices divisible by `N`);
/// with stride `s = N−1` it matches the diagonal sum of the slanted matrix.
pub fn strided_coefficient_sum(c: &CoefficientSequence, stride: usize) -> Result<Complex64> {
    if stride == 0 {
        return Err(Error::Invalid("stride must be >= 1".into()));
    }
    let mut acc = Complex64::default();
    let s = stride as i64;
    let mut l = c.first_index() / s - 1;
    while s * l <= c.last_index() {
        if s * l >= c.first_index() {
            acc += c.get_scalar(s * l)?;
        }
        l += 1;
    }
    Ok(acc)
}

/// Report of the weighted-space continuity check.
#[derive(Clone, Copy, Debug)]
pub struct ContinuityReport {
    /// Constant from the proof chain: `(C_α/N)·Σ_k e^{(α−β)|k|}·Σ_ℓ e^{(β'−Nα)|ℓ|}`.
    pub c_bound: f64,
    /// Largest observed `‖Rf‖_{β',1}` over unit `‖f‖_{β,1}` samples.
    pub max_ratio: f64,
    pub trials: usize,
    pub ok: bool,
}

fn two_sided_exp_sum(gamma: f64) -> f64 {
    // Σ_{k∈ℤ} e^{−γ|k|} for γ > 0
    let x = (-gamma).exp();
    (1.0 + x) / (1.0 - x)
}

/// Samples random unit-norm sequences in the `β`-weighted ℓ¹ space and
/// verifies `‖Rf‖_{β',1}` against the constant extracted from the
/// continuity proof. Requires `α < β` and `β' < N·α`.
pub fn continuity_certificate(
    c: &CoefficientSequence,
    alpha: f64,
    beta: f64,
    betaprime: f64,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<ContinuityReport> {
    if n < 2 {
        return Err(Error::Invalid("N must be >= 2".into()));
    }
    if !(alpha < beta && betaprime < n as f64 * alpha) {
        return Err(Error::Invalid(format!(
            "parameters must satisfy alpha < beta and beta' < N*alpha (alpha={alpha}, beta={beta}, beta'={betaprime}, N={n})"
        )));
    }
    if alpha <= 0.0 {
        return Err(Error::Invalid("alpha must be positive".into()));
    }
    // C_α: smallest constant with |c_k| ≤ C_α e^{−α|k|} over the window.
    let mut c_alpha: f64 = 0.0;
    for (k, m) in c.iter() {
        c_alpha = c_alpha.max(m.norm_fro() * (alpha * k.unsigned_abs() as f64).exp());
    }
    let s_beta = two_sided_exp_sum(beta - alpha);
    let s_ell = two_sided_exp_sum(n as f64 * alpha - betaprime);
    let c_bound = c_alpha / n as f64 * s_beta * s_ell;

    // Sample window: the coefficient support padded a little.
    let reach = c.first_index().abs().max(c.last_index().abs()).max(4);
    let k_min = -2 * reach;
    let k_max = 2 * reach;
    let l_min = (k_min + c.first_index()).div_euclid(n as i64) - 1;
    let l_max = (k_max + c.last_index()).div_euclid(n as i64) + 1;
    let op = slanted_matrix(c, n, Window::new(l_min, l_max, k_min, k_max)?)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio: f64 = 0.0;
    for _ in 0..trials {
        let raw: Vec<Complex64> = (k_min..=k_max)
            .map(|_| cx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let f = WeightedSequence::new(k_min, raw, beta)?;
        let norm = weighted_norm(&f, beta, NormOrder::One);
        if norm == 0.0 {
            continue;
        }
        let scaled: Vec<Complex64> = f.iter().map(|(_, v)| v / norm).collect();
        let f = WeightedSequence::new(k_min, scaled, beta)?;
        let out = apply(&op, &f);
        max_ratio = max_ratio.max(weighted_norm(&out.result, betaprime, NormOrder::One));
    }
    Ok(ContinuityReport {
        c_bound,
        max_ratio,
        trials,
        ok: max_ratio <= c_bound + 1e-12,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::autocorrelation_closed;
    use crate::wavelet::preset_haar;

    fn haar_coeffs() -> CoefficientSequence {
        autocorrelation_closed(&preset_haar(), 6).unwrap()
    }

    #[test]
    fn slanted_row_zero_haar() {
        let c = haar_coeffs();
        let op = slanted_matrix(&c, 2, Window::new(-2, 2, -4, 4).unwrap()).unwrap();
        // Row 0: (1/2)c_{−k}, nonzero at k ∈ {−1, 0, 1}.
        assert!((op.entry(0, -1) - cx(0.125, 0.0)).norm() < 1e-15);
        assert!((op.entry(0, 0) - cx(0.25, 0.0)).norm() < 1e-15);
        assert!((op.entry(0, 1) - cx(0.125, 0.0)).norm() < 1e-15);
        assert_eq!(op.entry(0, 2), cx(0.0, 0.0));
        assert_eq!(op.entry(0, -3), cx(0.0, 0.0));
    }

    #[test]
    fn slanted_rejects_small_n() {
        let c = haar_coeffs();
        assert!(slanted_matrix(&c, 1, Window::new(0, 0, -1, 1).unwrap()).is_err());
    }

    #[test]
    fn slanted_all_zero_is_empty() {
        let c = CoefficientSequence::from_scalars(-2, &[cx(0.0, 0.0); 5]);
        let op = slanted_matrix(&c, 2, Window::new(-3, 3, -6, 6).unwrap()).unwrap();
        assert!(op.triplets().is_empty());
    }

    #[test]
    fn slant_structure_shift_invariance() {
        let c = haar_coeffs();
        let op = slanted_matrix(&c, 2, Window::new(-3, 3, -8, 8).unwrap()).unwrap();
        for l in -3..3i64 {
            for k in -6..=6i64 {
                assert_eq!(op.entry(l + 1, k + 2), op.entry(l, k), "l={l} k={k}");
            }
        }
    }

    #[test]
    fn apply_delta_haar() {
        let c = haar_coeffs();
        let op = slanted_matrix(&c, 2, Window::new(-2, 2, -4, 4).unwrap()).unwrap();
        let out = apply(&op, &WeightedSequence::delta(0));
        assert!(!out.truncated);
        // (Rf)_ℓ = c_{2ℓ}/2: 1/4 at ℓ = 0, zero at ℓ = ±1.
        assert!((out.result.get(0) - cx(0.25, 0.0)).norm() < 1e-15);
        assert_eq!(out.result.get(1), cx(0.0, 0.0));
        assert_eq!(out.result.get(-1), cx(0.0, 0.0));
    }

    #[test]
    fn apply_zero_sequence() {
        let c = haar_coeffs();
        let op = slanted_matrix(&c, 2, Window::new(-2, 2, -4, 4).unwrap()).unwrap();
        let zero = WeightedSequence::new(-3, vec![Complex64::default(); 7], 0.0).unwrap();
        let out = apply(&op, &zero);
        assert!(out.result.iter().all(|(_, v)| v == Complex64::default()));
    }

    #[test]
    fn apply_constant_ones_row_sums() {
        let c = haar_coeffs();
        let op = slanted_matrix(&c, 2, Window::new(-2, 2, -12, 12).unwrap()).unwrap();
        let ones = WeightedSequence::new(-12, vec![cx(1.0, 0.0); 25], 0.0).unwrap();
        let out = apply(&op, &ones);
        // Interior rows see the full coefficient support: sum = (1/2)·Σc = 1/2.
        for l in -2..=2i64 {
            assert!((out.result.get(l) - cx(0.5, 0.0)).norm() < 1e-14, "l = {l}");
        }
    }

    #[test]
    fn apply_flags_truncation() {
        let c = haar_coeffs();
        let op = slanted_matrix(&c, 2, Window::new(-1, 1, -2, 2).unwrap()).unwrap();
        let wide = WeightedSequence::new(-5, vec![cx(1.0, 0.0); 11], 0.0).unwrap();
        assert!(apply(&op, &wide).truncated);
    }

    #[test]
    fn pointwise_unit_dc_haar_half() {
        let m = preset_haar();
        for t in 0..8 {
            let ang = t as f64 * std::f64::consts::PI / 4.0;
            let z = Complex64::from_polar(1.0, ang);
            let v = apply_pointwise(&m, 2, |_| cx(1.0, 0.0), z).unwrap();
            assert!((v - cx(0.5, 0.0)).norm() < 1e-13, "z = {z}");
        }
    }

    #[test]
    fn pointwise_zero_function() {
        let v = apply_pointwise(&preset_haar(), 2, |_| cx(0.0, 0.0), cx(1.0, 0.0)).unwrap();
        assert_eq!(v, cx(0.0, 0.0));
    }

    #[test]
    fn pointwise_rejects_off_circle() {
        assert!(apply_pointwise(&preset_haar(), 2, |_| cx(1.0, 0.0), cx(2.0, 0.0)).is_err());
    }

    #[test]
    fn trace_haar_both_routes() {
        let m = preset_haar();
        let ts = trace_spectral(&m, 2).unwrap();
        let tr = trace_realization(&m, 2).unwrap();
        assert!((ts - 0.5).abs() < 1e-14);
        assert!((tr - 0.5).abs() < 1e-14);
        assert!((ts - tr).abs() < 1e-13);
    }

    #[test]
    fn trace_constant_symbol() {
        // |m|² ≡ |c|²: the root average gives |c|², the realization formula
        // (only DD* survives with empty Γ, Y) gives |c|²/N. A constant does
        // not vanish at the nontrivial roots of unity, so the two formulas
        // are not expected to coincide here.
        let r = Realization::constant(ComplexMatrix::scalar(cx(0.6, 0.3))).unwrap();
        let c2 = 0.6f64.powi(2) + 0.3f64.powi(2);
        for n in [2usize, 3, 5] {
            let ts = trace_spectral(&r, n).unwrap();
            let tr = trace_realization(&r, n).unwrap();
            assert!((ts - c2).abs() < 1e-14);
            assert!((tr - c2 / n as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn trace_spectral_equals_n_strided_sum() {
        // Exact identity for any contractive symbol: (1/N)Σ_{w^N=1}|m(w)|²
        // keeps exactly the coefficients with index divisible by N.
        let r = Realization::from_real(&[vec![0.5]], &[vec![1.0]], &[vec![1.0]], &[vec![0.0]]).unwrap();
        let c = autocorrelation_closed(&r, 60).unwrap();
        for n in [2usize, 3] {
            let ts = trace_spectral(&r, n).unwrap();
            let sum = strided_coefficient_sum(&c, n).unwrap();
            assert!((ts - sum.re).abs() < 1e-12, "N = {n}: {ts} vs {}", sum.re);
        }
    }

    #[test]
    fn trace_realization_is_full_sum_over_n() {
        // trace_realization = (1/N)·Σ_{n∈ℤ} c_n = (1/N)|m(1)|².
        let r = Realization::from_real(&[vec![0.5]], &[vec![1.0]], &[vec![1.0]], &[vec![0.0]]).unwrap();
        let tr = trace_realization(&r, 2).unwrap();
        let m1 = eval(&r, cx(1.0, 0.0)).unwrap().as_scalar().unwrap();
        assert!((tr - m1.norm_sqr() / 2.0).abs() < 1e-12);
        assert!((tr - 2.0).abs() < 1e-12);
    }

    #[test]
    fn trace_realization_rejects_matrix_symbol() {
        let r = Realization::constant(ComplexMatrix::identity(2)).unwrap();
        assert!(trace_realization(&r, 2).is_err());
    }

    #[test]
    fn weighted_norm_delta() {
        let d = WeightedSequence::delta(0);
        for r in [0.0, 0.5, 2.0] {
            assert_eq!(weighted_norm(&d, r, NormOrder::One), 1.0);
            assert_eq!(weighted_norm(&d, r, NormOrder::Two), 1.0);
        }
    }

    #[test]
    fn weighted_norm_geometric() {
        // f_n = e^{−2|n|}, r = 1, p = 1: Σ e^{−|n|} = (1+e⁻¹)/(1−e⁻¹).
        let values: Vec<Complex64> = (-20..=20i64)
            .map(|n| cx((-2.0 * n.unsigned_abs() as f64).exp(), 0.0))
            .collect();
        let f = WeightedSequence::new(-20, values, 1.0).unwrap();
        let got = weighted_norm(&f, 1.0, NormOrder::One);
        let e = std::f64::consts::E;
        let expect = (1.0 + 1.0 / e) / (1.0 - 1.0 / e);
        assert!((got - expect).abs() < 1e-8, "got {got}, expect {expect}");
    }

    #[test]
    fn weighted_norm_zero() {
        let f = WeightedSequence::new(0, vec![Complex64::default(); 5], 0.5).unwrap();
        assert_eq!(weighted_norm(&f, 1.0, NormOrder::One), 0.0);
        assert_eq!(weighted_norm(&f, 1.0, NormOrder::Two), 0.0);
    }

    #[test]
    fn continuity_haar_bounded() {
        let c = haar_coeffs();
        let report = continuity_certificate(&c, 0.9, 1.0, 1.5, 2, 25, 42).unwrap();
        assert!(report.ok, "max ratio {} vs bound {}", report.max_ratio, report.c_bound);
        assert!(report.max_ratio > 0.0);
    }

    #[test]
    fn continuity_rejects_bad_parameters() {
        let c = haar_coeffs();
        // β' ≥ Nα violates the contract.
        assert!(continuity_certificate(&c, 0.5, 1.0, 1.2, 2, 5, 0).is_err());
        // α ≥ β violates the contract.
        assert!(continuity_certificate(&c, 1.0, 0.5, 0.4, 2, 5, 0).is_err());
    }

    #[test]
    fn continuity_delta_input_finite() {
        let c = haar_coeffs();
        let op = slanted_matrix(&c, 2, Window::new(-4, 4, -8, 8).unwrap()).unwrap();
        let out = apply(&op, &WeightedSequence::delta(0));
        let ratio = weighted_norm(&out.result, 1.5, NormOrder::One);
        assert!(ratio.is_finite());
        // Rf is supported where c_{2ℓ} ≠ 0, i.e. only ℓ = 0 for Haar.
        assert!((ratio - 0.25).abs() < 1e-14);
    }
}
