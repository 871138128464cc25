//! Infinite products of a rational matrix function and the wavelet cascade.
//!
//! For a square `M(z) = D + C(zI − A)⁻¹B` with `ρ(D) < 1`, the realization
//! of the product `M(z_1)M(z_2)⋯` over one variable per factor assembles
//! into a block-Toeplitz state operator with symbol
//!
//! ```text
//! φ(z) = A + zB(I − zD)⁻¹C
//! ```
//!
//! Finite sections of that operator are materialized here, along with
//! certified finite truncations of the infinite objects: products along
//! summable point sequences `Σ|1 − z_k| < ∞`, the father-wavelet Fourier
//! transform `φ̂(w) = Π_k m(e^{2πіw/N^k})` (which needs the unit-dc
//! normalization `m(1) = 1`), and quadrature of the partial cascade
//! products that backs the L² membership certificate.
//!
//! Truncation points are chosen from the constants `K`, `K₁` bounding
//! `‖C(zI−A)⁻¹(I−A)⁻¹B‖` on circle grids, which control
//! `‖M(z) − I‖ ≤ K·|1 − z|` factor by factor.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{cx, solve, spectral_radius, two_norm_estimate, ComplexMatrix};
use crate::realization::{eval, Realization};
use crate::ruelle::apply_pointwise;
use crate::wavelet::unit_circle_grid;

/// Evaluates the block-Toeplitz symbol `φ(z) = A + zB(I − zD)⁻¹C`.
pub fn toeplitz_symbol_eval(r: &Realization, z: Complex64) -> Result<ComplexMatrix> {
    if r.output_dim() != r.input_dim() {
        return Err(Error::dims(
            "toeplitz_symbol_eval",
            "square-valued function",
            format!("{}x{}", r.output_dim(), r.input_dim()),
        ));
    }
    let m = r.output_dim();
    let lhs = ComplexMatrix::identity(m).sub(&r.d().scale(z))?;
    let x = match solve(&lhs, r.c(), 1e-12) {
        Ok(x) => x,
        Err(Error::Singular { .. }) => {
            return Err(Error::Invalid(format!("I - zD is singular at z = {z}")))
        }
        Err(e) => return Err(e),
    };
    r.a().add(&r.b().mul(&x)?.scale(z))
}

/// Sup of the symbol's operator 2-norm over a uniform circle grid.
/// Requires `ρ(D) < 1` so the Toeplitz operator is bounded at all.
pub fn toeplitz_norm_estimate(r: &Realization, grid: usize) -> Result<f64> {
    let rho_d = spectral_radius(r.d(), 1e-12)?.value;
    if rho_d >= 1.0 - 1e-9 {
        return Err(Error::NotContractive { rho: rho_d });
    }
    let mut worst: f64 = 0.0;
    for z in unit_circle_grid(grid) {
        worst = worst.max(two_norm_estimate(&toeplitz_symbol_eval(r, z)?));
    }
    Ok(worst)
}

/// Finite `n`-block section of the infinite-product state operator.
///
/// Block `(i, j)` of `mat_a` is `A` on the diagonal and `B·D^{j−i−1}·C`
/// above it; `vec_b` stacks `B·D^{n−1}, …, B·D, B` top to bottom and
/// `vec_c` lays out `C, DC, D²C, …` left to right, matching the
/// one-variable-per-factor product realization with all factors equal.
#[derive(Clone, Debug)]
pub struct ToeplitzSection {
    symbol: Realization,
    n: usize,
    mat_a: ComplexMatrix,
    vec_b: ComplexMatrix,
    vec_c: ComplexMatrix,
}

/// Builds the `n`-block finite section. Requires `ρ(D) < 1`.
pub fn toeplitz_section(r: &Realization, n: usize) -> Result<ToeplitzSection> {
    if r.output_dim() != r.input_dim() {
        return Err(Error::dims(
            "toeplitz_section",
            "square-valued function",
            format!("{}x{}", r.output_dim(), r.input_dim()),
        ));
    }
    if n == 0 {
        return Err(Error::Invalid("section needs at least one block".into()));
    }
    let rho_d = spectral_radius(r.d(), 1e-12)?.value;
    if rho_d >= 1.0 - 1e-9 {
        return Err(Error::NotContractive { rho: rho_d });
    }
    let d = r.state_dim();
    let q = r.input_dim();

    // D powers up to n−1, shared by all three arrays.
    let mut d_pows = Vec::with_capacity(n);
    d_pows.push(ComplexMatrix::identity(q));
    for k in 1..n {
        d_pows.push(d_pows[k - 1].mul(r.d())?);
    }

    let mut mat_a = ComplexMatrix::zeros(n * d, n * d);
    for i in 0..n {
        for j in i..n {
            let block = if i == j {
                r.a().clone()
            } else {
                r.b().mul(&d_pows[j - i - 1])?.mul(r.c())?
            };
            for bi in 0..d {
                for bj in 0..d {
                    mat_a[(i * d + bi, j * d + bj)] = block[(bi, bj)];
                }
            }
        }
    }

    let mut vec_b = ComplexMatrix::zeros(n * d, q);
    for i in 0..n {
        let block = r.b().mul(&d_pows[n - 1 - i])?;
        for bi in 0..d {
            for bj in 0..q {
                vec_b[(i * d + bi, bj)] = block[(bi, bj)];
            }
        }
    }

    let mut vec_c = ComplexMatrix::zeros(q, n * d);
    for j in 0..n {
        let block = d_pows[j].mul(r.c())?;
        for bi in 0..q {
            for bj in 0..d {
                vec_c[(bi, j * d + bj)] = block[(bi, bj)];
            }
        }
    }

    Ok(ToeplitzSection {
        symbol: r.clone(),
        n,
        mat_a,
        vec_b,
        vec_c,
    })
}

impl ToeplitzSection {
    pub fn blocks(&self) -> usize {
        self.n
    }

    pub fn symbol(&self) -> &Realization {
        &self.symbol
    }

    pub fn mat_a(&self) -> &ComplexMatrix {
        &self.mat_a
    }

    pub fn vec_b(&self) -> &ComplexMatrix {
        &self.vec_b
    }

    pub fn vec_c(&self) -> &ComplexMatrix {
        &self.vec_c
    }

    /// Evaluates the section against one point per block:
    /// `Dⁿ + vec_c·(Λ(z) − mat_a)⁻¹·vec_b`, which reproduces the ordered
    /// finite product `M(z_1)⋯M(z_n)`. The `Dⁿ` term is the finite-section
    /// correction that vanishes in the infinite limit under `ρ(D) < 1`.
    pub fn value_at(&self, zs: &[Complex64]) -> Result<ComplexMatrix> {
        if zs.len() != self.n {
            return Err(Error::dims(
                "ToeplitzSection::value_at",
                format!("{} points", self.n),
                format!("{}", zs.len()),
            ));
        }
        let d = self.symbol.state_dim();
        let mut d_corr = ComplexMatrix::identity(self.symbol.input_dim());
        for _ in 0..self.n {
            d_corr = d_corr.mul(self.symbol.d())?;
        }
        if d == 0 {
            return Ok(d_corr);
        }
        let total = self.n * d;
        let mut lambda = ComplexMatrix::zeros(total, total);
        for (blk, &z) in zs.iter().enumerate() {
            for i in 0..d {
                lambda[(blk * d + i, blk * d + i)] = z;
            }
        }
        let lhs = lambda.sub(&self.mat_a)?;
        let x = solve(&lhs, &self.vec_b, 1e-12)?;
        d_corr.add(&self.vec_c.mul(&x)?)
    }
}

/// The proof constant `max ‖C(zI−A)⁻¹(I−A)⁻¹B‖` over a circle grid plus
/// any extra points; it controls `‖M(z) − I‖ ≤ K·|1 − z|`.
fn proof_constant(r: &Realization, grid: usize, extra: &[Complex64]) -> Result<f64> {
    let d = r.state_dim();
    if d == 0 {
        return Ok(0.0);
    }
    let i_a = ComplexMatrix::identity(d).sub(r.a())?;
    let x0 = solve(&i_a, r.b(), 1e-12)?;
    let mut worst: f64 = 0.0;
    let mut points = unit_circle_grid(grid);
    points.extend_from_slice(extra);
    for z in points {
        let zi_a = ComplexMatrix::from_fn(d, d, |i, j| {
            let diag = if i == j { z } else { Complex64::default() };
            diag - r.a()[(i, j)]
        });
        if let Ok(x) = solve(&zi_a, &x0, 1e-12) {
            worst = worst.max(two_norm_estimate(&r.c().mul(&x)?));
        }
    }
    Ok(worst)
}

/// Outcome of a finite product along a point sequence.
#[derive(Clone, Debug)]
pub struct ProductAlongPoints {
    /// The ordered product over the whole supplied list.
    pub value: ComplexMatrix,
    /// First index from which the certified tail estimate holds.
    pub cut: usize,
    /// `K·Σ_{k≥cut} |1−z_k|`: first-order bound on what the factors beyond
    /// `cut` contribute; at most `tol` whenever any interior cut achieves it.
    pub bound: f64,
    /// The constant `K` used for the estimate.
    pub proof_constant: f64,
}

/// Multiplies `M(z_k)` left to right over the supplied finite list.
///
/// Requires `M(1) = I` (to 1e−10): only then is `‖M(z) − I‖ ≤ K·|1 − z_k|`
/// available and the product along a summable sequence convergent.
pub fn product_along_points(
    r: &Realization,
    zs: &[Complex64],
    tol: f64,
) -> Result<ProductAlongPoints> {
    if r.output_dim() != r.input_dim() {
        return Err(Error::dims(
            "product_along_points",
            "square-valued function",
            format!("{}x{}", r.output_dim(), r.input_dim()),
        ));
    }
    let m = r.output_dim();
    let id = ComplexMatrix::identity(m);
    let at_one = eval(r, cx(1.0, 0.0))?;
    let defect = at_one.sub(&id)?.norm_fro();
    if defect > 1e-10 {
        return Err(Error::Convention(format!(
            "product_along_points needs M(1) = I; defect is {defect:.3e}"
        )));
    }
    let k_const = proof_constant(r, 128, zs)?;

    let mut value = id;
    for &z in zs {
        value = value.mul(&eval(r, z)?)?;
    }

    // Tail sums from each index; pick the first cut meeting the tolerance.
    let mut tails = vec![0.0f64; zs.len() + 1];
    for k in (0..zs.len()).rev() {
        tails[k] = tails[k + 1] + (cx(1.0, 0.0) - zs[k]).norm();
    }
    let mut cut = zs.len();
    for (k, &t) in tails.iter().enumerate() {
        if k_const * t <= tol {
            cut = k;
            break;
        }
    }
    Ok(ProductAlongPoints {
        value,
        cut,
        bound: k_const * tails[cut],
        proof_constant: k_const,
    })
}

/// Father-wavelet Fourier transform `φ̂(w) = Π_{k≥1} m(e^{2πiw/N^k})`,
/// truncated once the geometric tail `K₁·2π|w|/(N^K(N−1))` drops below
/// `tol/2`. Requires scalar `m` in unit-dc normalization (`m(1) = 1`).
pub fn father_hat(m: &Realization, n: usize, w: f64, tol: f64) -> Result<Complex64> {
    if !m.is_scalar() {
        return Err(Error::dims("father_hat", "scalar symbol", format!("{}x{}", m.output_dim(), m.input_dim())));
    }
    if n < 2 {
        return Err(Error::Invalid("N must be >= 2".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Invalid("tol must be positive".into()));
    }
    let at_one = eval(m, cx(1.0, 0.0))?.as_scalar()?;
    if (at_one - cx(1.0, 0.0)).norm() > 1e-10 {
        return Err(Error::Convention(format!(
            "father_hat needs unit-dc m with m(1) = 1, got m(1) = {at_one}"
        )));
    }
    let k1 = proof_constant(m, 256, &[])?;
    let budget = 2.0 * k1 * 2.0 * std::f64::consts::PI * w.abs() / ((n - 1) as f64 * tol);
    let depth = if budget <= 1.0 {
        1
    } else {
        (budget.ln() / (n as f64).ln()).ceil() as usize
    }
    .clamp(1, 80);

    let mut acc = cx(1.0, 0.0);
    let mut theta = 2.0 * std::f64::consts::PI * w;
    for _ in 0..depth {
        theta /= n as f64;
        let z = Complex64::from_polar(1.0, theta);
        acc *= eval(m, z)?.as_scalar()?;
    }
    Ok(acc)
}

/// Quadrature of `∫ |f_k(w)|² dw` over `[−N^k/2, N^k/2]` where
/// `f_k(w) = Π_{ℓ=0}^{k} m(e^{2πiw/N^ℓ})`, by composite Simpson with
/// `quad_points` panels per unit interval.
pub fn partial_product_l2(m: &Realization, n: usize, k: usize, quad_points: usize) -> Result<f64> {
    if !m.is_scalar() {
        return Err(Error::dims("partial_product_l2", "scalar symbol", format!("{}x{}", m.output_dim(), m.input_dim())));
    }
    if n < 2 || quad_points == 0 {
        return Err(Error::Invalid("need N >= 2 and quad_points >= 1".into()));
    }
    let length = (n as f64).powi(k as i32);
    let mut panels = (length * quad_points as f64).ceil() as usize;
    if panels > 20_000_000 {
        return Err(Error::Invalid(format!(
            "quadrature would need {panels} panels; reduce k or quad_points"
        )));
    }
    if panels % 2 == 1 {
        panels += 1;
    }
    let half = length / 2.0;
    let h = length / panels as f64;
    let two_pi = 2.0 * std::f64::consts::PI;

    let integrand = |w: f64| -> Result<f64> {
        let mut prod = cx(1.0, 0.0);
        let mut scale = 1.0f64;
        for _ in 0..=k {
            let z = Complex64::from_polar(1.0, two_pi * w / scale);
            prod *= eval(m, z)?.as_scalar()?;
            scale *= n as f64;
        }
        Ok(prod.norm_sqr())
    };

    let mut acc = integrand(-half)? + integrand(half)?;
    for i in 1..panels {
        let w = -half + i as f64 * h;
        let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += weight * integrand(w)?;
    }
    Ok(acc * h / 3.0)
}

/// L² certificate for the cascade limit.
#[derive(Clone, Debug)]
pub struct L2Report {
    /// `(k, ∫|f_k|²)` for `k = 0..=kmax`.
    pub integrals: Vec<(usize, f64)>,
    /// The liminf surrogate: minimum over the computed k.
    pub certificate: f64,
    /// Largest sampled value of `R1` on the circle.
    pub r1_max: f64,
    /// Whether the integral sequence is non-increasing (within 1e−6
    /// relative); a growing sequence flags a non-L² limit.
    pub nonincreasing: bool,
}

/// Computes the partial-product integrals for `k = 0..=kmax` and reports
/// the Fatou-style upper-bound certificate. Refuses when the sampled `R1`
/// exceeds `1 + 1e−9`, since the bound argument needs `R1 ≤ 1`.
pub fn l2_norm_estimate(m: &Realization, n: usize, kmax: usize) -> Result<L2Report> {
    l2_norm_estimate_with(m, n, kmax, 64)
}

/// Same as [`l2_norm_estimate`] with an explicit quadrature density.
pub fn l2_norm_estimate_with(
    m: &Realization,
    n: usize,
    kmax: usize,
    quad_points: usize,
) -> Result<L2Report> {
    let mut r1_max: f64 = 0.0;
    for z in unit_circle_grid(32) {
        let v = apply_pointwise(m, n, |_| cx(1.0, 0.0), z)?;
        r1_max = r1_max.max(v.re);
    }
    if r1_max > 1.0 + 1e-9 {
        return Err(Error::Convention(format!(
            "R1 must be <= 1 for the L2 certificate; sampled max is {r1_max:.12}"
        )));
    }
    let mut integrals = Vec::with_capacity(kmax + 1);
    for k in 0..=kmax {
        integrals.push((k, partial_product_l2(m, n, k, quad_points)?));
    }
    let certificate = integrals.iter().map(|&(_, v)| v).fold(f64::INFINITY, f64::min);
    let nonincreasing = integrals
        .windows(2)
        .all(|w| w[1].1 <= w[0].1 * (1.0 + 1e-6) + 1e-12);
    Ok(L2Report {
        integrals,
        certificate,
        r1_max,
        nonincreasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::{preset_daubechies4, preset_haar};

    fn haar_hat_closed(w: f64) -> Complex64 {
        // e^{−iπw}·sin(πw)/(πw), extended by 1 at w = 0.
        if w == 0.0 {
            return cx(1.0, 0.0);
        }
        let pw = std::f64::consts::PI * w;
        Complex64::from_polar(1.0, -pw) * (pw.sin() / pw)
    }

    #[test]
    fn symbol_haar_closed_form() {
        let r = preset_haar();
        for z in [cx(1.0, 0.0), cx(0.3, 0.4), cx(-0.9, 0.1)] {
            let phi = toeplitz_symbol_eval(&r, z).unwrap().as_scalar().unwrap();
            let expect = z / (cx(2.0, 0.0) - z);
            assert!((phi - expect).norm() < 1e-14, "z = {z}");
        }
        let at1 = toeplitz_symbol_eval(&r, cx(1.0, 0.0)).unwrap().as_scalar().unwrap();
        assert!((at1 - cx(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn symbol_at_zero_is_a() {
        let r = preset_daubechies4();
        let phi = toeplitz_symbol_eval(&r, cx(0.0, 0.0)).unwrap();
        assert!(phi.sub(r.a()).unwrap().norm_fro() < 1e-15);
    }

    #[test]
    fn symbol_d_zero_is_linear() {
        let r = Realization::from_real(&[vec![0.3]], &[vec![2.0]], &[vec![0.7]], &[vec![0.0]]).unwrap();
        for z in [cx(0.5, 0.2), cx(-1.0, 1.0)] {
            let phi = toeplitz_symbol_eval(&r, z).unwrap().as_scalar().unwrap();
            let expect = cx(0.3, 0.0) + z * 2.0 * 0.7;
            assert!((phi - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn norm_estimate_haar_is_one() {
        let r = preset_haar();
        let norm = toeplitz_norm_estimate(&r, 256).unwrap();
        assert!((norm - 1.0).abs() < 1e-3, "norm = {norm}");
        let coarse = toeplitz_norm_estimate(&r, 64).unwrap();
        assert!((norm - coarse).abs() <= 1e-3);
    }

    #[test]
    fn norm_estimate_zero_function() {
        let r = Realization::from_real(&[vec![0.0]], &[vec![0.0]], &[vec![0.0]], &[vec![0.5]]).unwrap();
        assert_eq!(toeplitz_norm_estimate(&r, 32).unwrap(), 0.0);
    }

    #[test]
    fn norm_estimate_rejects_expanding_d() {
        let r = Realization::from_real(&[vec![0.0]], &[vec![1.0]], &[vec![1.0]], &[vec![1.0]]).unwrap();
        assert!(toeplitz_norm_estimate(&r, 16).is_err());
    }

    #[test]
    fn section_n1_is_the_realization() {
        let r = preset_haar();
        let s = toeplitz_section(&r, 1).unwrap();
        assert_eq!(s.mat_a(), r.a());
        assert_eq!(s.vec_b(), r.b());
        assert_eq!(s.vec_c(), r.c());
    }

    #[test]
    fn section_n2_haar_blocks() {
        let s = toeplitz_section(&preset_haar(), 2).unwrap();
        // mat_a = [[0, 1/2], [0, 0]]
        assert!((s.mat_a()[(0, 1)] - cx(0.5, 0.0)).norm() < 1e-15);
        assert_eq!(s.mat_a()[(0, 0)], cx(0.0, 0.0));
        assert_eq!(s.mat_a()[(1, 0)], cx(0.0, 0.0));
        // vec_b = (BD; B) = (1/2; 1)
        assert!((s.vec_b()[(0, 0)] - cx(0.5, 0.0)).norm() < 1e-15);
        assert!((s.vec_b()[(1, 0)] - cx(1.0, 0.0)).norm() < 1e-15);
        // vec_c = (C, DC) = (1/2, 1/4)
        assert!((s.vec_c()[(0, 0)] - cx(0.5, 0.0)).norm() < 1e-15);
        assert!((s.vec_c()[(0, 1)] - cx(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn section_value_matches_direct_product() {
        let r = preset_haar();
        for n in 1..=8usize {
            let s = toeplitz_section(&r, n).unwrap();
            let zs: Vec<Complex64> = (1..=n)
                .map(|k| Complex64::from_polar(1.0, std::f64::consts::PI / 2f64.powi(k as i32)))
                .collect();
            let via_section = s.value_at(&zs).unwrap().as_scalar().unwrap();
            let mut direct = cx(1.0, 0.0);
            for &z in &zs {
                direct *= eval(&r, z).unwrap().as_scalar().unwrap();
            }
            assert!(
                (via_section - direct).norm() < 1e-9,
                "n = {n}: {via_section} vs {direct}"
            );
        }
    }

    #[test]
    fn section_norm_dominated_by_symbol_norm() {
        let r = preset_haar();
        let bound = toeplitz_norm_estimate(&r, 256).unwrap();
        for n in [1usize, 2, 4, 8, 16, 32] {
            let s = toeplitz_section(&r, n).unwrap();
            let norm = two_norm_estimate(s.mat_a());
            assert!(norm <= bound + 1e-6, "n = {n}: {norm} vs {bound}");
        }
    }

    #[test]
    fn product_all_ones_is_identity() {
        let r = preset_haar();
        let zs = vec![cx(1.0, 0.0); 10];
        let out = product_along_points(&r, &zs, 1e-12).unwrap();
        assert!((out.value.as_scalar().unwrap() - cx(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn product_single_point() {
        let r = preset_haar();
        let out = product_along_points(&r, &[cx(2.0, 0.0)], 1e-12).unwrap();
        assert!((out.value.as_scalar().unwrap() - cx(0.75, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn product_rejects_wrong_normalization() {
        // m(1) = 2 ≠ 1.
        let r = Realization::from_real(&[vec![0.0]], &[vec![1.0]], &[vec![1.0]], &[vec![1.0]]).unwrap();
        assert!(matches!(
            product_along_points(&r, &[cx(1.0, 0.0)], 1e-10),
            Err(Error::Convention(_))
        ));
    }

    #[test]
    fn product_matches_cascade_at_half() {
        // z_k = e^{iπ/2^k}, k = 1..40 are exactly the factors of φ̂(1/2).
        let r = preset_haar();
        let zs: Vec<Complex64> = (1..=40)
            .map(|k| Complex64::from_polar(1.0, std::f64::consts::PI / 2f64.powi(k)))
            .collect();
        let out = product_along_points(&r, &zs, 1e-10).unwrap();
        let v = out.value.as_scalar().unwrap();
        assert!(v.norm() <= 1.0 + 1e-12);
        let hat = father_hat(&r, 2, 0.5, 1e-12).unwrap();
        assert!((v - hat).norm() < 1e-10, "{v} vs {hat}");
        assert!(out.bound <= 1e-10);
        assert!(out.cut < zs.len());
    }

    #[test]
    fn father_hat_at_zero() {
        assert_eq!(father_hat(&preset_haar(), 2, 0.0, 1e-10).unwrap(), cx(1.0, 0.0));
    }

    #[test]
    fn father_hat_haar_closed_form_samples() {
        let r = preset_haar();
        for &w in &[0.5, 0.25, -0.75, 1.8, 3.3, -2.4] {
            let got = father_hat(&r, 2, w, 1e-10).unwrap();
            let expect = haar_hat_closed(w);
            assert!((got - expect).norm() < 1e-8, "w = {w}: {got} vs {expect}");
        }
        // w = 1/2: magnitude 2/π.
        let half = father_hat(&r, 2, 0.5, 1e-12).unwrap();
        assert!((half.norm() - 2.0 / std::f64::consts::PI).abs() < 1e-10);
        assert!((half - cx(0.0, -2.0 / std::f64::consts::PI)).norm() < 1e-10);
    }

    #[test]
    fn father_hat_vanishes_at_integers() {
        let r = preset_haar();
        for w in [1.0, 2.0, -3.0] {
            let got = father_hat(&r, 2, w, 1e-10).unwrap();
            assert!(got.norm() < 1e-10, "w = {w}: {got}");
        }
    }

    #[test]
    fn father_hat_truncation_stability() {
        let r = preset_haar();
        for &w in &[0.1, 0.5, 0.9, 2.3] {
            let tol = 1e-8;
            let a = father_hat(&r, 2, w, tol).unwrap();
            let b = father_hat(&r, 2, w, tol / 10.0).unwrap();
            assert!((a - b).norm() <= tol, "w = {w}");
        }
    }

    #[test]
    fn father_hat_rejects_unnormalized() {
        let bad = preset_haar().scale_output(cx(2.0, 0.0));
        assert!(matches!(father_hat(&bad, 2, 0.3, 1e-8), Err(Error::Convention(_))));
    }

    #[test]
    fn l2_integral_k0_is_c0() {
        let v = partial_product_l2(&preset_haar(), 2, 0, 64).unwrap();
        assert!((v - 0.5).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn l2_integrals_k_independent_unit_dc() {
        for k in 1..=3usize {
            let v = partial_product_l2(&preset_haar(), 2, k, 64).unwrap();
            assert!((v - 0.5).abs() < 1e-6, "k = {k}: {v}");
        }
    }

    #[test]
    fn l2_report_haar() {
        let report = l2_norm_estimate(&preset_haar(), 2, 4).unwrap();
        assert!((report.certificate - 0.5).abs() < 1e-6);
        assert!(report.nonincreasing);
        assert!((report.r1_max - 0.5).abs() < 1e-12);
    }

    #[test]
    fn l2_report_daubechies4() {
        let report = l2_norm_estimate(&preset_daubechies4(), 2, 3).unwrap();
        assert!(report.certificate.is_finite());
        assert!(report.r1_max <= 1.0 + 1e-12);
        assert!((report.certificate - 0.5).abs() < 1e-6);
    }

    #[test]
    fn l2_report_flags_constant_one() {
        // m ≡ 1: R1 = 1 passes the gate but ∫|f_k|² = N^k diverges.
        let one = Realization::constant(ComplexMatrix::identity(1)).unwrap();
        let report = l2_norm_estimate(&one, 2, 3).unwrap();
        assert!(!report.nonincreasing);
        let last = report.integrals.last().unwrap().1;
        assert!((last - 8.0).abs() < 1e-6, "N^3 = 8, got {last}");
    }
}
