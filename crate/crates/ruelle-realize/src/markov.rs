//! Markov parameters and autocorrelation coefficients.
//!
//! For `M(z) = D + C(zI − A)⁻¹B` with `ρ(A) < 1` the Laurent expansion at
//! infinity has coefficients `h₀ = D`, `h_k = CA^{k−1}B`, and the Fourier
//! expansion of `M(z)*M(z)` on the circle (written against `z^{−n}`) has
//! coefficients
//!
//! ```text
//! c_n = Σ_j h_j* h_{j+n}
//!     = Y A^{n−1} B            (n > 0)
//!     = D*D + B*ΓB             (n = 0)
//!     = B* (A*)^{−n−1} Y*      (n < 0)
//! ```
//!
//! with `Γ` the observability Gramian and `Y = D*C + B*ΓA`. Both routes are
//! implemented; the truncated convolution doubles as an independent oracle
//! for the closed form.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{cx, ComplexMatrix};
use crate::realization::{observability_gramian, y_vector, Realization};

/// Two-sided sequence of `p×q` coefficient matrices with an explicit
/// support window; indices outside the window read as zero.
#[derive(Clone, Debug)]
pub struct CoefficientSequence {
    offset: i64,
    values: Vec<ComplexMatrix>,
    shape: (usize, usize),
}

impl CoefficientSequence {
    pub fn new(offset: i64, values: Vec<ComplexMatrix>) -> Result<Self> {
        let shape = match values.first() {
            Some(m) => (m.rows(), m.cols()),
            None => return Err(Error::Invalid("coefficient sequence needs at least one entry".into())),
        };
        for v in &values {
            if (v.rows(), v.cols()) != shape {
                return Err(Error::dims(
                    "CoefficientSequence::new",
                    format!("{}x{}", shape.0, shape.1),
                    format!("{}x{}", v.rows(), v.cols()),
                ));
            }
        }
        Ok(CoefficientSequence { offset, values, shape })
    }

    /// Scalar sequence from complex values.
    pub fn from_scalars(offset: i64, values: &[Complex64]) -> Self {
        CoefficientSequence {
            offset,
            values: values.iter().map(|&z| ComplexMatrix::scalar(z)).collect(),
            shape: (1, 1),
        }
    }

    /// First stored index.
    pub fn first_index(&self) -> i64 {
        self.offset
    }

    /// Last stored index.
    pub fn last_index(&self) -> i64 {
        self.offset + self.values.len() as i64 - 1
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn is_scalar(&self) -> bool {
        self.shape == (1, 1)
    }

    /// Coefficient at index `n`; zero outside the stored window.
    pub fn get(&self, n: i64) -> ComplexMatrix {
        if n < self.offset || n > self.last_index() {
            ComplexMatrix::zeros(self.shape.0, self.shape.1)
        } else {
            self.values[(n - self.offset) as usize].clone()
        }
    }

    /// Scalar coefficient at index `n` (sequence must be 1×1-valued).
    pub fn get_scalar(&self, n: i64) -> Result<Complex64> {
        if !self.is_scalar() {
            return Err(Error::dims("get_scalar", "1x1", format!("{}x{}", self.shape.0, self.shape.1)));
        }
        Ok(self.get(n).as_scalar().unwrap_or_default())
    }

    /// Iterates `(index, coefficient)` over the stored window.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &ComplexMatrix)> {
        let offset = self.offset;
        self.values.iter().enumerate().map(move |(i, v)| (offset + i as i64, v))
    }
}

/// Markov parameters `h₀ = D`, `h_k = CA^{k−1}B` for `1 ≤ k ≤ kmax`.
pub fn markov_parameters(r: &Realization, kmax: usize) -> Result<CoefficientSequence> {
    let mut values = Vec::with_capacity(kmax + 1);
    values.push(r.d().clone());
    let mut x = r.b().clone();
    for _ in 1..=kmax {
        values.push(r.c().mul(&x)?);
        x = r.a().mul(&x)?;
    }
    CoefficientSequence::new(0, values)
}

/// Autocorrelation coefficients on the window `|n| ≤ nmax` from the closed
/// Gramian formulas. Requires `ρ(A) < 1`.
pub fn autocorrelation_closed(r: &Realization, nmax: usize) -> Result<CoefficientSequence> {
    let gram = observability_gramian(r)?;
    let y = y_vector(r, &gram)?;
    let c0 = r
        .d()
        .adjoint()
        .mul(r.d())?
        .add(&r.b().adjoint().mul(&gram)?.mul(r.b())?)?;

    let mut positives = Vec::with_capacity(nmax);
    let mut x = r.b().clone();
    for _ in 1..=nmax {
        positives.push(y.mul(&x)?);
        x = r.a().mul(&x)?;
    }
    // c_{−n} = B*(A*)^{n−1}Y*, which is exactly (Y A^{n−1} B)*.
    let mut values: Vec<ComplexMatrix> = positives.iter().rev().map(|m| m.adjoint()).collect();
    values.push(c0);
    values.extend(positives);
    CoefficientSequence::new(-(nmax as i64), values)
}

/// Default truncation for the convolution route: smallest `k` with
/// `‖Aᵏ‖_F ≤ 1e−14`, capped at `10·d/(1−ρ)`.
pub fn default_kcut(r: &Realization) -> Result<usize> {
    let d = r.state_dim();
    if d == 0 {
        return Ok(0);
    }
    let rho = r.rho()?;
    if rho >= 1.0 - 1e-9 {
        return Err(Error::NotContractive { rho });
    }
    let cap = ((10.0 * d as f64 / (1.0 - rho)).ceil() as usize).max(1);
    let mut x = r.a().clone();
    let mut k = 1usize;
    while x.norm_fro() > 1e-14 && k < cap {
        x = x.mul(r.a())?;
        k += 1;
    }
    Ok(k.min(cap))
}

/// Autocorrelation by truncated convolution `c_n ≈ Σ_{j=0}^{kcut} h_j* h_{j+n}`.
///
/// Serves as the independent oracle for [`autocorrelation_closed`]; exact
/// once `kcut` exceeds the nilpotency index, geometrically accurate otherwise.
pub fn autocorrelation_convolution(
    r: &Realization,
    nmax: usize,
    kcut: usize,
) -> Result<CoefficientSequence> {
    let h = markov_parameters(r, kcut + nmax)?;
    let q = r.input_dim();
    let mut values = Vec::with_capacity(2 * nmax + 1);
    for n in -(nmax as i64)..=(nmax as i64) {
        let mut acc = ComplexMatrix::zeros(q, q);
        for j in 0..=kcut as i64 {
            if j + n < 0 {
                continue;
            }
            acc = acc.add(&h.get(j).adjoint().mul(&h.get(j + n))?)?;
        }
        values.push(acc);
    }
    CoefficientSequence::new(-(nmax as i64), values)
}

/// Monic characteristic-polynomial coefficients `(a₀, …, a_{d−1})` of the
/// state matrix, via Faddeev–LeVerrier, so that
/// `a₀I + a₁A + ⋯ + a_{d−1}A^{d−1} + A^d = 0`.
///
/// Through `c_n = YA^{n−1}B` the same coefficients annihilate the
/// autocorrelation tail: `a₀c_p + ⋯ + a_{d−1}c_{d+p−1} + c_{d+p} = 0` for
/// every `p ≥ 1`.
pub fn ch_recursion(r: &Realization) -> Result<Vec<Complex64>> {
    let d = r.state_dim();
    if d == 0 {
        return Err(Error::Invalid("ch_recursion needs state dimension >= 1".into()));
    }
    // p(λ) = λ^d + k₁λ^{d−1} + ⋯ + k_d
    let a = r.a();
    let mut m = a.clone();
    let mut ks = Vec::with_capacity(d);
    let mut k1 = -trace(&m);
    ks.push(k1);
    for step in 2..=d {
        let shifted = m.add(&ComplexMatrix::identity(d).scale(k1))?;
        m = a.mul(&shifted)?;
        k1 = -trace(&m) / cx(step as f64, 0.0);
        ks.push(k1);
    }
    // a_j multiplies λ^j: a_j = k_{d−j}.
    Ok((0..d).map(|j| ks[d - 1 - j]).collect())
}

fn trace(m: &ComplexMatrix) -> Complex64 {
    (0..m.rows()).map(|i| m[(i, i)]).sum()
}

/// Result of fitting `‖c_k‖ ≤ C·ρ'^{|k|}` over the stored window.
#[derive(Clone, Copy, Debug)]
pub struct DecayReport {
    /// Smallest admissible constant over the window.
    pub constant: f64,
    /// Rate used for the fit: `ρ(A) + 0.01`.
    pub rho_prime: f64,
    /// True when the constant exists and stays below 1e6.
    pub ok: bool,
}

/// Verifies geometric decay of the coefficients at rate `rho + 0.01`.
pub fn decay_check(c: &CoefficientSequence, rho: f64) -> DecayReport {
    let rho_prime = rho + 0.01;
    let mut constant: f64 = 0.0;
    for (n, m) in c.iter() {
        let weight = rho_prime.powi(n.unsigned_abs() as i32);
        if weight > 0.0 {
            constant = constant.max(m.norm_fro() / weight);
        }
    }
    DecayReport {
        constant,
        rho_prime,
        ok: constant.is_finite() && constant < 1e6,
    }
}
