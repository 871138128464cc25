//! Rational wavelet filters `M(z) = Q·U(z^N)·Δ(z)·V`.
//!
//! `V` is the (scaled) DFT matrix, `Δ(z) = diag(1, z⁻¹, …, z^{−(N−1)})`,
//! `U` is a rational inner function built from Blaschke–Potapov elementary
//! factors, and `Q = (U(1)V)*` normalizes the filter so that `M(1) = I_N`.
//! The first polyphase component `m₀` is the low-pass symbol; it can be
//! extracted in two normalization conventions:
//!
//! * `paper-polyphase` — `m₀` exactly as the polyphase column gives it,
//!   with `m₀(1) = √N` and `R1 = 1` for the transfer operator;
//! * `unit-dc` — the same function divided by `√N`, so `m(1) = 1`, the
//!   normalization required by the infinite-product cascade.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{column_space_basis, cx, two_norm_estimate, ComplexMatrix};
use crate::realization::{
    eval, matrix_from_pairs, matrix_to_pairs, minimize, product, Realization,
};

/// Points `e^{2πit/count}` on the unit circle, `t = 0..count`.
pub fn unit_circle_grid(count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|t| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t as f64 / count as f64))
        .collect()
}

/// Largest admissible Blaschke pole modulus; keeps `ρ(A)` of every derived
/// realization bounded away from 1 for the Gramian and decay machinery.
pub const MAX_POLE_RADIUS: f64 = 0.98;

/// The scaled DFT matrix `V = (1/√N)·(ε^{−ℓj})` with `ε = e^{2πi/N}`; unitary.
pub fn dft_matrix(n: usize) -> ComplexMatrix {
    let scale = 1.0 / (n as f64).sqrt();
    ComplexMatrix::from_fn(n, n, |l, j| {
        let ang = -2.0 * std::f64::consts::PI * (l * j) as f64 / n as f64;
        Complex64::from_polar(scale, ang)
    })
}

/// `Δ(z) = diag(1, z⁻¹, …, z^{−(N−1)})`; unitary on the circle.
pub fn delta_eval(n: usize, z: Complex64) -> Result<ComplexMatrix> {
    if z == Complex64::default() {
        return Err(Error::Invalid("delta_eval is undefined at z = 0".into()));
    }
    let zinv = z.inv();
    let mut entries = Vec::with_capacity(n);
    let mut cur = cx(1.0, 0.0);
    for _ in 0..n {
        entries.push(cur);
        cur *= zinv;
    }
    Ok(ComplexMatrix::diagonal(&entries))
}

/// One Blaschke–Potapov elementary factor `I − P + β(z)P` with
/// `β(z) = (1−a)/(1−ā) · (1−āz)/(z−a)`, normalized so `β(1) = 1`.
#[derive(Clone, Debug)]
pub struct BlaschkeFactor {
    pub a: Complex64,
    pub projection: ComplexMatrix,
}

/// Rational inner function as an ordered Blaschke–Potapov product with a
/// constant left factor: `U(z) = L · Π_k (I − P_k + β_k(z) P_k)`.
#[derive(Clone, Debug)]
pub struct RationalInner {
    factors: Vec<BlaschkeFactor>,
    left_constant: ComplexMatrix,
    size: usize,
}

impl RationalInner {
    /// Validates the factor data: each projection must satisfy
    /// `P² = P = P*` to 1e−8, poles must lie inside the disk with modulus
    /// at most [`MAX_POLE_RADIUS`], and all shapes must be `n×n`.
    pub fn new(factors: Vec<BlaschkeFactor>, left_constant: ComplexMatrix) -> Result<Self> {
        if !left_constant.is_square() || left_constant.rows() == 0 {
            return Err(Error::dims(
                "RationalInner::new",
                "square nonempty left constant",
                format!("{}x{}", left_constant.rows(), left_constant.cols()),
            ));
        }
        let size = left_constant.rows();
        for (i, f) in factors.iter().enumerate() {
            if f.projection.rows() != size || f.projection.cols() != size {
                return Err(Error::dims(
                    "RationalInner::new",
                    format!("{size}x{size} projection"),
                    format!("{}x{}", f.projection.rows(), f.projection.cols()),
                ));
            }
            let p = &f.projection;
            let idem = p.mul(p)?.sub(p)?.norm_fro();
            let herm = p.sub(&p.adjoint())?.norm_fro();
            if idem > 1e-8 || herm > 1e-8 {
                return Err(Error::Invalid(format!(
                    "factor {i}: P is not an orthogonal projection (idempotency {idem:.2e}, hermiticity {herm:.2e})"
                )));
            }
            if f.a.norm() >= 1.0 {
                return Err(Error::Invalid(format!(
                    "factor {i}: pole modulus {} is not inside the unit disk",
                    f.a.norm()
                )));
            }
            if f.a.norm() > MAX_POLE_RADIUS {
                return Err(Error::Invalid(format!(
                    "factor {i}: pole modulus {} exceeds the {MAX_POLE_RADIUS} placement limit",
                    f.a.norm()
                )));
            }
        }
        Ok(RationalInner { factors, left_constant, size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn factors(&self) -> &[BlaschkeFactor] {
        &self.factors
    }

    pub fn left_constant(&self) -> &ComplexMatrix {
        &self.left_constant
    }

    /// Direct factor-product evaluation, independent of the realization route.
    pub fn eval_direct(&self, z: Complex64) -> Result<ComplexMatrix> {
        let mut acc = self.left_constant.clone();
        let id = ComplexMatrix::identity(self.size);
        for f in &self.factors {
            let beta = blaschke_value(f.a, z)?;
            let factor = id
                .sub(&f.projection)?
                .add(&f.projection.scale(beta))?;
            acc = acc.mul(&factor)?;
        }
        Ok(acc)
    }
}

fn blaschke_value(a: Complex64, z: Complex64) -> Result<Complex64> {
    let denom = z - a;
    if denom.norm() < 1e-14 {
        return Err(Error::Pole { re: z.re, im: z.im });
    }
    let c = (cx(1.0, 0.0) - a) / (cx(1.0, 0.0) - a.conj());
    Ok(c * (cx(1.0, 0.0) - a.conj() * z) / denom)
}

/// Realization of one elementary factor with `rank(P)` states:
/// `A = a·I_r`, `B = G*`, `C = c(1−|a|²)·G`, `D = I − (1 + c·ā)·P`
/// where `P = GG*` with `G` an orthonormal column basis of `P`.
fn elementary_factor_realization(f: &BlaschkeFactor, size: usize) -> Result<Realization> {
    let g = column_space_basis(&f.projection, 1e-10);
    let r = g.cols();
    let p = g.mul(&g.adjoint())?;
    let c_scalar = (cx(1.0, 0.0) - f.a) / (cx(1.0, 0.0) - f.a.conj());
    let d = ComplexMatrix::identity(size)
        .sub(&p.scale(cx(1.0, 0.0) + c_scalar * f.a.conj()))?;
    if r == 0 {
        return Realization::constant(d);
    }
    let a = ComplexMatrix::identity(r).scale(f.a);
    let b = g.adjoint();
    let c = g.scale(c_scalar * cx(1.0 - f.a.norm_sqr(), 0.0));
    Realization::new(a, b, c, d)
}

/// Assembles a realization of the full inner function by cascading the
/// constant left factor with every elementary factor, in order.
pub fn assemble_inner(f: &RationalInner) -> Result<Realization> {
    let mut acc = Realization::constant(f.left_constant.clone())?;
    for factor in &f.factors {
        let elem = elementary_factor_realization(factor, f.size)?;
        acc = product(&acc, &elem)?;
    }
    Ok(acc)
}

/// Normalization convention for the extracted low-pass symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    /// `m(1) = 1`; required by cascade products. `R1 ≤ 1`.
    UnitDc,
    /// `m₀` exactly as the polyphase column defines it: `m₀(1) = √N`, `R1 = 1`.
    PaperPolyphase,
}

impl Convention {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "unit-dc" => Ok(Convention::UnitDc),
            "paper-polyphase" => Ok(Convention::PaperPolyphase),
            other => Err(Error::Invalid(format!(
                "unknown convention '{other}' (expected 'unit-dc' or 'paper-polyphase')"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Convention::UnitDc => "unit-dc",
            Convention::PaperPolyphase => "paper-polyphase",
        }
    }
}

/// A fully assembled `N`-band filter with its normalizing constant and the
/// derived DFT/Δ accessors.
#[derive(Clone, Debug)]
pub struct WaveletFilter {
    n: usize,
    inner: RationalInner,
    u_real: Realization,
    q: ComplexMatrix,
    v: ComplexMatrix,
}

/// Builds the filter: assembles `U`, evaluates `U(1)` and sets
/// `Q = (U(1)V)*` so that `M(1) = I_N` whenever `U` is unitary there.
pub fn build_filter(u: RationalInner, n: usize) -> Result<WaveletFilter> {
    if u.size() != n {
        return Err(Error::dims("build_filter", format!("{n}x{n} inner function"), format!("{0}x{0}", u.size())));
    }
    if n < 2 {
        return Err(Error::Invalid("band count N must be >= 2".into()));
    }
    let u_real = assemble_inner(&u)?;
    let u1 = eval(&u_real, cx(1.0, 0.0)).map_err(|e| match e {
        Error::Pole { .. } => Error::Invalid("inner function has a pole at z = 1".into()),
        other => other,
    })?;
    let v = dft_matrix(n);
    let q = u1.mul(&v)?.adjoint();
    Ok(WaveletFilter { n, inner: u, u_real, q, v })
}

impl WaveletFilter {
    pub fn bands(&self) -> usize {
        self.n
    }

    pub fn inner(&self) -> &RationalInner {
        &self.inner
    }

    pub fn inner_realization(&self) -> &Realization {
        &self.u_real
    }

    pub fn q(&self) -> &ComplexMatrix {
        &self.q
    }

    pub fn v(&self) -> &ComplexMatrix {
        &self.v
    }

    /// Evaluates `M(z) = Q·U(z^N)·Δ(z)·V`.
    pub fn eval(&self, z: Complex64) -> Result<ComplexMatrix> {
        let zn = z.powu(self.n as u32);
        let u = eval(&self.u_real, zn)?;
        let delta = delta_eval(self.n, z)?;
        self.q.mul(&u)?.mul(&delta)?.mul(&self.v)
    }

    /// The polyphase column `(m₀(z), …, m_{N−1}(z))ᵀ = Q·U(z^N)·(1, z⁻¹, …)ᵀ`.
    pub fn polyphase_column(&self, z: Complex64) -> Result<ComplexMatrix> {
        if z == Complex64::default() {
            return Err(Error::Invalid("polyphase column undefined at z = 0".into()));
        }
        let zn = z.powu(self.n as u32);
        let u = eval(&self.u_real, zn)?;
        let zinv = z.inv();
        let mut cur = cx(1.0, 0.0);
        let delta_vec = ComplexMatrix::from_fn(self.n, 1, |_, _| {
            let v = cur;
            cur *= zinv;
            v
        });
        self.q.mul(&u)?.mul(&delta_vec)
    }

    /// Realization of the low-pass symbol `m₀`, by realization-algebra
    /// composition (constant row × lifted inner function × delay chain)
    /// followed by minimality reduction. `unit-dc` divides by `√N`.
    pub fn lowpass_symbol(&self, convention: Convention) -> Result<Realization> {
        let row = ComplexMatrix::from_fn(1, self.n, |_, j| self.q[(0, j)]);
        let row_r = Realization::constant(row)?;
        let lifted = compose_with_zn(&self.u_real, self.n)?;
        let chain = delay_chain(self.n)?;
        let m = product(&product(&row_r, &lifted)?, &chain)?;
        let m = minimize(&m, 1e-10);
        Ok(match convention {
            Convention::PaperPolyphase => m,
            Convention::UnitDc => m.scale_output(cx(1.0 / (self.n as f64).sqrt(), 0.0)),
        })
    }

    /// Residual `‖M(1) − I‖_F`.
    pub fn m1_residual(&self) -> Result<f64> {
        let m1 = self.eval(cx(1.0, 0.0))?;
        Ok(m1.sub(&ComplexMatrix::identity(self.n))?.norm_fro())
    }

    /// Max of `‖M(z)*M(z) − I‖_F` over a circle grid.
    pub fn unitarity_residual(&self, grid: usize) -> Result<f64> {
        let id = ComplexMatrix::identity(self.n);
        let mut worst: f64 = 0.0;
        for z in unit_circle_grid(grid) {
            let m = self.eval(z)?;
            worst = worst.max(m.adjoint().mul(&m)?.sub(&id)?.norm_fro());
        }
        Ok(worst)
    }
}

/// Realization of `z ↦ U(z^N)` from a realization of `U`, through the
/// block-companion lifting with `N·d` states.
pub fn compose_with_zn(u: &Realization, n: usize) -> Result<Realization> {
    let d = u.state_dim();
    if d == 0 || n == 1 {
        return Ok(u.clone());
    }
    let nd = n * d;
    let mut a = ComplexMatrix::zeros(nd, nd);
    // Block (0, n−1) = A, block (i, i−1) = I.
    for i in 0..d {
        for j in 0..d {
            a[(i, (n - 1) * d + j)] = u.a()[(i, j)];
        }
    }
    for blk in 1..n {
        for i in 0..d {
            a[(blk * d + i, (blk - 1) * d + i)] = cx(1.0, 0.0);
        }
    }
    let mut b = ComplexMatrix::zeros(nd, u.input_dim());
    for i in 0..d {
        for j in 0..u.input_dim() {
            b[(i, j)] = u.b()[(i, j)];
        }
    }
    let mut c = ComplexMatrix::zeros(u.output_dim(), nd);
    for i in 0..u.output_dim() {
        for j in 0..d {
            c[(i, (n - 1) * d + j)] = u.c()[(i, j)];
        }
    }
    Realization::new(a, b, c, u.d().clone())
}

/// Realization of the delay column `(1, z⁻¹, …, z^{−(N−1)})ᵀ` with `N−1`
/// nilpotent states.
pub fn delay_chain(n: usize) -> Result<Realization> {
    if n == 1 {
        return Realization::constant(ComplexMatrix::identity(1));
    }
    let d = n - 1;
    let mut a = ComplexMatrix::zeros(d, d);
    for i in 1..d {
        a[(i, i - 1)] = cx(1.0, 0.0);
    }
    let mut b = ComplexMatrix::zeros(d, 1);
    b[(0, 0)] = cx(1.0, 0.0);
    let mut c = ComplexMatrix::zeros(n, d);
    for j in 1..n {
        c[(j, j - 1)] = cx(1.0, 0.0);
    }
    let mut dd = ComplexMatrix::zeros(n, 1);
    dd[(0, 0)] = cx(1.0, 0.0);
    Realization::new(a, b, c, dd)
}

/// The Haar low-pass symbol `m(z) = (1 + z⁻¹)/2` in unit-dc normalization,
/// realized as `(A, B, C, D) = (0, 1, 1/2, 1/2)`.
pub fn preset_haar() -> Realization {
    Realization::from_real(&[vec![0.0]], &[vec![1.0]], &[vec![0.5]], &[vec![0.5]])
        .expect("static data")
}

/// The Daubechies-4 low-pass symbol in unit-dc normalization:
/// `m(z) = Σ g_n z^{−n}` with `g = ((1+√3)/8, (3+√3)/8, (3−√3)/8, (1−√3)/8)`.
/// Satisfies `m(1) = 1`, `m(−1) = 0` and `|m(w)|² + |m(−w)|² = 1` on the circle.
pub fn preset_daubechies4() -> Realization {
    let s3 = 3f64.sqrt();
    let g = [(1.0 + s3) / 8.0, (3.0 + s3) / 8.0, (3.0 - s3) / 8.0, (1.0 - s3) / 8.0];
    Realization::from_real(
        &[vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]],
        &[vec![1.0], vec![0.0], vec![0.0]],
        &[vec![g[1], g[2], g[3]]],
        &[vec![g[0]]],
    )
    .expect("static data")
}

// ---------------------------------------------------------------------------
// Filter JSON: {"N": 2, "factors": [{"a": [re,im], "P": [[..]]}],
//              "leftConstant": [[..]]}
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
pub struct FactorJson {
    pub a: [f64; 2],
    #[serde(rename = "P")]
    pub p: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize, Deserialize)]
pub struct FilterJson {
    #[serde(rename = "N")]
    pub n: usize,
    pub factors: Vec<FactorJson>,
    #[serde(rename = "leftConstant")]
    pub left_constant: Vec<Vec<[f64; 2]>>,
}

/// A filter loaded from JSON together with any non-fatal warnings
/// (e.g. a merely contractive left constant).
pub struct LoadedFilter {
    pub filter: WaveletFilter,
    pub warnings: Vec<String>,
}

/// Parses and assembles a filter from its JSON description.
///
/// The left constant is allowed to be contractive rather than unitary; that
/// case is accepted with a warning and will show up in the unitarity
/// residual of the filter checks.
pub fn load_filter_json(text: &str) -> Result<LoadedFilter> {
    let json: FilterJson = serde_json::from_str(text)?;
    filter_from_json(&json)
}

pub fn filter_from_json(json: &FilterJson) -> Result<LoadedFilter> {
    let left = matrix_from_pairs(&json.left_constant, Some(json.n), "filter leftConstant")?;
    let mut factors = Vec::with_capacity(json.factors.len());
    for f in &json.factors {
        factors.push(BlaschkeFactor {
            a: cx(f.a[0], f.a[1]),
            projection: matrix_from_pairs(&f.p, Some(json.n), "filter factor P")?,
        });
    }
    let mut warnings = Vec::new();
    let unit_resid = left
        .adjoint()
        .mul(&left)?
        .sub(&ComplexMatrix::identity(left.rows()))?
        .norm_fro();
    if unit_resid > 1e-8 {
        let norm = two_norm_estimate(&left);
        if norm <= 1.0 + 1e-8 {
            warnings.push(format!(
                "left constant is contractive but not unitary (residual {unit_resid:.3e}); \
                 the filter will not be unitary on the circle"
            ));
        } else {
            warnings.push(format!(
                "left constant is expansive (2-norm {norm:.6}); filter invariants will fail"
            ));
        }
    }
    let inner = RationalInner::new(factors, left)?;
    let filter = build_filter(inner, json.n)?;
    Ok(LoadedFilter { filter, warnings })
}

pub fn filter_to_json(filter: &WaveletFilter) -> FilterJson {
    FilterJson {
        n: filter.bands(),
        factors: filter
            .inner()
            .factors()
            .iter()
            .map(|f| FactorJson {
                a: [f.a.re, f.a.im],
                p: matrix_to_pairs(&f.projection),
            })
            .collect(),
        left_constant: matrix_to_pairs(filter.inner().left_constant()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_inner(n: usize) -> RationalInner {
        RationalInner::new(Vec::new(), ComplexMatrix::identity(n)).unwrap()
    }

    #[test]
    fn dft_small_cases() {
        let v1 = dft_matrix(1);
        assert!((v1[(0, 0)] - cx(1.0, 0.0)).norm() < 1e-15);
        let v2 = dft_matrix(2);
        let s = 1.0 / 2f64.sqrt();
        for (idx, expect) in [((0, 0), s), ((0, 1), s), ((1, 0), s), ((1, 1), -s)] {
            assert!((v2[idx] - cx(expect, 0.0)).norm() < 1e-15, "{idx:?}");
        }
    }

    #[test]
    fn dft_unitary_up_to_eight() {
        for n in 2..=8 {
            let v = dft_matrix(n);
            let resid = v
                .adjoint()
                .mul(&v)
                .unwrap()
                .sub(&ComplexMatrix::identity(n))
                .unwrap()
                .norm_fro();
            assert!(resid < 1e-12, "N = {n}: {resid}");
        }
    }

    #[test]
    fn delta_values() {
        let d = delta_eval(3, cx(1.0, 0.0)).unwrap();
        assert!(d.sub(&ComplexMatrix::identity(3)).unwrap().norm_fro() < 1e-15);
        let d2 = delta_eval(2, cx(2.0, 0.0)).unwrap();
        assert!((d2[(1, 1)] - cx(0.5, 0.0)).norm() < 1e-15);
        assert!(delta_eval(2, cx(0.0, 0.0)).is_err());
        // Unitary on the circle.
        let z = Complex64::from_polar(1.0, 1.234);
        let dz = delta_eval(4, z).unwrap();
        let resid = dz
            .adjoint()
            .mul(&dz)
            .unwrap()
            .sub(&ComplexMatrix::identity(4))
            .unwrap()
            .norm_fro();
        assert!(resid < 1e-14);
    }

    #[test]
    fn empty_inner_is_constant() {
        let u = identity_inner(2);
        let r = assemble_inner(&u).unwrap();
        assert_eq!(r.state_dim(), 0);
        assert_eq!(eval(&r, cx(3.0, 1.0)).unwrap(), ComplexMatrix::identity(2));
    }

    #[test]
    fn single_scalar_factor_is_inverse_z() {
        // a = 0, P = 1 on a 1×1 space: β(z) = 1/z.
        let u = RationalInner::new(
            vec![BlaschkeFactor {
                a: cx(0.0, 0.0),
                projection: ComplexMatrix::identity(1),
            }],
            ComplexMatrix::identity(1),
        )
        .unwrap();
        let r = assemble_inner(&u).unwrap();
        assert_eq!(r.state_dim(), 1);
        for z in [cx(2.0, 0.0), cx(0.3, 0.7), Complex64::from_polar(1.0, 2.2)] {
            let v = eval(&r, z).unwrap().as_scalar().unwrap();
            assert!((v - z.inv()).norm() < 1e-13, "z = {z}");
            if (z.norm() - 1.0).abs() < 1e-12 {
                assert!((v.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn factor_realization_matches_direct_eval() {
        let v = ComplexMatrix::from_rows(&[vec![cx(0.6, 0.0)], vec![cx(0.0, 0.8)]]).unwrap();
        let p = v.mul(&v.adjoint()).unwrap();
        let u = RationalInner::new(
            vec![
                BlaschkeFactor { a: cx(0.4, 0.2), projection: p.clone() },
                BlaschkeFactor { a: cx(-0.3, 0.1), projection: ComplexMatrix::identity(2) },
            ],
            ComplexMatrix::identity(2),
        )
        .unwrap();
        let r = assemble_inner(&u).unwrap();
        for z in unit_circle_grid(17) {
            let a = eval(&r, z).unwrap();
            let b = u.eval_direct(z).unwrap();
            assert!(a.sub(&b).unwrap().norm_fro() < 1e-11, "z = {z}");
        }
    }

    #[test]
    fn inner_unitary_on_grid() {
        let v = ComplexMatrix::from_rows(&[vec![cx(0.6, 0.0)], vec![cx(0.0, 0.8)]]).unwrap();
        let p = v.mul(&v.adjoint()).unwrap();
        let u = RationalInner::new(
            vec![
                BlaschkeFactor { a: cx(0.5, -0.1), projection: p },
                BlaschkeFactor { a: cx(0.2, 0.3), projection: ComplexMatrix::identity(2) },
            ],
            ComplexMatrix::identity(2),
        )
        .unwrap();
        let r = assemble_inner(&u).unwrap();
        let id = ComplexMatrix::identity(2);
        for z in unit_circle_grid(64) {
            let m = eval(&r, z).unwrap();
            let resid = m.adjoint().mul(&m).unwrap().sub(&id).unwrap().norm_fro();
            assert!(resid < 1e-9, "z = {z}: {resid}");
        }
    }

    #[test]
    fn pole_bounds_enforced() {
        let bad = RationalInner::new(
            vec![BlaschkeFactor { a: cx(1.1, 0.0), projection: ComplexMatrix::identity(1) }],
            ComplexMatrix::identity(1),
        );
        assert!(bad.is_err());
        let too_close = RationalInner::new(
            vec![BlaschkeFactor { a: cx(0.99, 0.0), projection: ComplexMatrix::identity(1) }],
            ComplexMatrix::identity(1),
        );
        assert!(too_close.is_err());
    }

    #[test]
    fn non_projection_rejected() {
        let p = ComplexMatrix::from_real_rows(&[vec![0.5, 0.5], vec![0.0, 0.5]]).unwrap();
        let bad = RationalInner::new(
            vec![BlaschkeFactor { a: cx(0.0, 0.0), projection: p }],
            ComplexMatrix::identity(2),
        );
        assert!(bad.is_err());
    }

    #[test]
    fn haar_type_filter_from_identity_inner() {
        let wf = build_filter(identity_inner(2), 2).unwrap();
        assert!(wf.m1_residual().unwrap() < 1e-12);
        assert!(wf.unitarity_residual(64).unwrap() < 1e-10);
        // Unit-dc low-pass symbol is exactly Haar.
        let m = wf.lowpass_symbol(Convention::UnitDc).unwrap();
        assert_eq!(m.state_dim(), 1);
        for z in [cx(2.0, 0.0), cx(-1.3, 0.8), Complex64::from_polar(1.0, 0.9)] {
            let got = eval(&m, z).unwrap().as_scalar().unwrap();
            let expect = (cx(1.0, 0.0) + z.inv()) * 0.5;
            assert!((got - expect).norm() < 1e-12, "z = {z}");
        }
    }

    #[test]
    fn polyphase_value_at_one_is_sqrt_n() {
        for n in [2usize, 3, 4] {
            let wf = build_filter(identity_inner(n), n).unwrap();
            let col = wf.polyphase_column(cx(1.0, 0.0)).unwrap();
            let m0 = col[(0, 0)];
            assert!(
                (m0 - cx((n as f64).sqrt(), 0.0)).norm() < 1e-12,
                "N = {n}: m0(1) = {m0}"
            );
        }
    }

    #[test]
    fn polyphase_consistent_with_matrix_assembly() {
        // (1/√N)·m_j(ε^k z) must reproduce [M(z)]_{jk}.
        let n = 2usize;
        let v = ComplexMatrix::from_rows(&[vec![cx(0.6, 0.0)], vec![cx(0.0, 0.8)]]).unwrap();
        let p = v.mul(&v.adjoint()).unwrap();
        let u = RationalInner::new(
            vec![BlaschkeFactor { a: cx(0.35, 0.15), projection: p }],
            ComplexMatrix::identity(2),
        )
        .unwrap();
        let wf = build_filter(u, n).unwrap();
        let eps = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / n as f64);
        let scale = 1.0 / (n as f64).sqrt();
        for t in 0..20 {
            let z = Complex64::from_polar(1.0, 0.17 + 0.29 * t as f64);
            let m = wf.eval(z).unwrap();
            for k in 0..n {
                let col = wf.polyphase_column(eps.powu(k as u32) * z).unwrap();
                for j in 0..n {
                    let expect = col[(j, 0)] * scale;
                    assert!(
                        (m[(j, k)] - expect).norm() < 1e-10,
                        "entry ({j},{k}) at z = {z}"
                    );
                }
            }
        }
    }

    #[test]
    fn conventions_differ_by_sqrt_n() {
        let wf = build_filter(identity_inner(2), 2).unwrap();
        let unit = wf.lowpass_symbol(Convention::UnitDc).unwrap();
        let pp = wf.lowpass_symbol(Convention::PaperPolyphase).unwrap();
        let s = 2f64.sqrt();
        for z in unit_circle_grid(16) {
            let a = eval(&unit, z).unwrap().as_scalar().unwrap();
            let b = eval(&pp, z).unwrap().as_scalar().unwrap();
            assert!((b - a * s).norm() < 1e-12);
        }
        let pp1 = eval(&pp, cx(1.0, 0.0)).unwrap().as_scalar().unwrap();
        assert!((pp1 - cx(s, 0.0)).norm() < 1e-12, "m0(1) = sqrt(N)");
    }

    #[test]
    fn lowpass_state_dim_bound() {
        let v = ComplexMatrix::from_rows(&[vec![cx(0.6, 0.0)], vec![cx(0.0, 0.8)]]).unwrap();
        let p = v.mul(&v.adjoint()).unwrap();
        let u = RationalInner::new(
            vec![
                BlaschkeFactor { a: cx(0.3, 0.2), projection: p },
                BlaschkeFactor { a: cx(-0.4, 0.0), projection: ComplexMatrix::identity(2) },
            ],
            ComplexMatrix::identity(2),
        )
        .unwrap();
        let du = assemble_inner(&u).unwrap().state_dim();
        let wf = build_filter(u, 2).unwrap();
        let m = wf.lowpass_symbol(Convention::UnitDc).unwrap();
        assert!(m.state_dim() <= 2 * du + 2, "d = {} vs bound {}", m.state_dim(), 2 * du + 2);
    }

    #[test]
    fn daubechies4_identities() {
        let m = preset_daubechies4();
        let at1 = eval(&m, cx(1.0, 0.0)).unwrap().as_scalar().unwrap();
        assert!((at1 - cx(1.0, 0.0)).norm() < 1e-14);
        let atm1 = eval(&m, cx(-1.0, 0.0)).unwrap().as_scalar().unwrap();
        assert!(atm1.norm() < 1e-14);
        // QMF identity |m(w)|² + |m(−w)|² = 1 on a 64-point grid.
        for z in unit_circle_grid(64) {
            let a = eval(&m, z).unwrap().as_scalar().unwrap();
            let b = eval(&m, -z).unwrap().as_scalar().unwrap();
            let qmf = a.norm_sqr() + b.norm_sqr();
            assert!((qmf - 1.0).abs() < 1e-12, "z = {z}: {qmf}");
        }
    }

    #[test]
    fn filter_json_round_trip() {
        let v = ComplexMatrix::from_rows(&[vec![cx(0.6, 0.0)], vec![cx(0.0, 0.8)]]).unwrap();
        let p = v.mul(&v.adjoint()).unwrap();
        let u = RationalInner::new(
            vec![BlaschkeFactor { a: cx(0.25, -0.1), projection: p }],
            ComplexMatrix::identity(2),
        )
        .unwrap();
        let wf = build_filter(u, 2).unwrap();
        let text = serde_json::to_string(&filter_to_json(&wf)).unwrap();
        let loaded = load_filter_json(&text).unwrap();
        assert!(loaded.warnings.is_empty());
        for z in unit_circle_grid(9) {
            let a = wf.eval(z).unwrap();
            let b = loaded.filter.eval(z).unwrap();
            assert!(a.sub(&b).unwrap().norm_fro() < 1e-12);
        }
    }

    #[test]
    fn contractive_left_constant_warns() {
        let json = FilterJson {
            n: 2,
            factors: vec![],
            left_constant: vec![
                vec![[0.5, 0.0], [0.0, 0.0]],
                vec![[0.0, 0.0], [0.5, 0.0]],
            ],
        };
        let loaded = filter_from_json(&json).unwrap();
        assert_eq!(loaded.warnings.len(), 1);
        assert!(loaded.warnings[0].contains("contractive"));
    }
}
