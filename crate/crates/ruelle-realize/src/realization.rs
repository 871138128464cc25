//! State-space realizations of rational matrix functions.
//!
//! A `p×q`-valued rational function analytic at infinity is stored as the
//! quadruple `(A, B, C, D)` with
//!
//! ```text
//! R(z) = D + C (zI − A)⁻¹ B
//! ```
//!
//! where `A` is `d×d`, `B` is `d×q`, `C` is `p×d` and `D` is `p×q`. The
//! state dimension `d = 0` is allowed and represents the constant function
//! `z ↦ D`; all the algebra below degrades gracefully to that case.
//!
//! Beyond evaluation the module provides the similarity action, cascade
//! products (one variable and one-variable-per-factor), Kalman minimality
//! reduction, and the observability Gramian with its associated `Y` vector
//! used by the autocorrelation formulas.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    column_space_basis, cx, inverse, solve, spectral_radius, ComplexMatrix,
};

/// State-space quadruple `(A, B, C, D)` of a rational function analytic at
/// infinity. Immutable after construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Realization {
    a: ComplexMatrix,
    b: ComplexMatrix,
    c: ComplexMatrix,
    d: ComplexMatrix,
}

impl Realization {
    /// Validates dimension compatibility and builds the realization.
    pub fn new(
        a: ComplexMatrix,
        b: ComplexMatrix,
        c: ComplexMatrix,
        d: ComplexMatrix,
    ) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::dims("Realization::new", "square A", format!("{}x{}", a.rows(), a.cols())));
        }
        let dim = a.rows();
        if b.rows() != dim {
            return Err(Error::dims("Realization::new", format!("B with {dim} rows"), format!("{}", b.rows())));
        }
        if c.cols() != dim {
            return Err(Error::dims("Realization::new", format!("C with {dim} cols"), format!("{}", c.cols())));
        }
        if d.rows() != c.rows() && dim > 0 {
            return Err(Error::dims("Realization::new", format!("D with {} rows", c.rows()), format!("{}", d.rows())));
        }
        if d.cols() != b.cols() && dim > 0 {
            return Err(Error::dims("Realization::new", format!("D with {} cols", b.cols()), format!("{}", d.cols())));
        }
        if d.rows() == 0 || d.cols() == 0 {
            return Err(Error::Invalid("D must be at least 1x1".into()));
        }
        Ok(Realization { a, b, c, d })
    }

    /// Constant function `z ↦ value` (state dimension zero).
    pub fn constant(value: ComplexMatrix) -> Result<Self> {
        let p = value.rows();
        let q = value.cols();
        Self::new(
            ComplexMatrix::zeros(0, 0),
            ComplexMatrix::zeros(0, q),
            ComplexMatrix::zeros(p, 0),
            value,
        )
    }

    /// Scalar realization from real data, a convenience for tests and presets.
    pub fn from_real(a: &[Vec<f64>], b: &[Vec<f64>], c: &[Vec<f64>], d: &[Vec<f64>]) -> Result<Self> {
        Self::new(
            ComplexMatrix::from_real_rows(a)?,
            ComplexMatrix::from_real_rows(b)?,
            ComplexMatrix::from_real_rows(c)?,
            ComplexMatrix::from_real_rows(d)?,
        )
    }

    /// Converts the alternative form `D + zC(I − zA)⁻¹B` (analytic at zero)
    /// to the primary analytic-at-infinity form. Requires `A` invertible;
    /// realizations with singular `A` in that form are rejected.
    pub fn from_analytic_at_zero(
        a: ComplexMatrix,
        b: ComplexMatrix,
        c: ComplexMatrix,
        d: ComplexMatrix,
    ) -> Result<Self> {
        if a.rows() == 0 {
            return Self::new(a, b, c, d);
        }
        let a_inv = inverse(&a, a.default_tol()).map_err(|_| {
            Error::Invalid("alternative-form realization with singular A is not analytic at infinity".into())
        })?;
        let b2 = a_inv.mul(&b)?;
        let c2 = c.mul(&a_inv)?.scale(cx(-1.0, 0.0));
        let d2 = d.sub(&c.mul(&a_inv)?.mul(&b)?)?;
        Self::new(a_inv, b2, c2, d2)
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }

    pub fn c(&self) -> &ComplexMatrix {
        &self.c
    }

    pub fn d(&self) -> &ComplexMatrix {
        &self.d
    }

    /// State dimension `d`.
    pub fn state_dim(&self) -> usize {
        self.a.rows()
    }

    /// Output dimension `p`.
    pub fn output_dim(&self) -> usize {
        self.d.rows()
    }

    /// Input dimension `q`.
    pub fn input_dim(&self) -> usize {
        self.d.cols()
    }

    /// True for 1×1-valued functions.
    pub fn is_scalar(&self) -> bool {
        self.output_dim() == 1 && self.input_dim() == 1
    }

    /// Spectral radius of the state matrix.
    pub fn rho(&self) -> Result<f64> {
        Ok(spectral_radius(&self.a, 1e-12)?.value)
    }

    /// Rescales the function by a scalar: `s·R(z)` (scales `C` and `D`).
    pub fn scale_output(&self, s: Complex64) -> Realization {
        Realization {
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.c.scale(s),
            d: self.d.scale(s),
        }
    }

    /// Adjoint system `(A*, C*, B*, D*)`; observability questions about
    /// `self` become controllability questions about the adjoint.
    fn dual(&self) -> Realization {
        Realization {
            a: self.a.adjoint(),
            b: self.c.adjoint(),
            c: self.b.adjoint(),
            d: self.d.adjoint(),
        }
    }
}

/// Evaluates `R(z) = D + C(zI − A)⁻¹B`.
///
/// Points where `zI − A` is singular to tolerance are poles and rejected.
pub fn eval(r: &Realization, z: Complex64) -> Result<ComplexMatrix> {
    let dim = r.state_dim();
    if dim == 0 {
        return Ok(r.d.clone());
    }
    let zi_a = ComplexMatrix::from_fn(dim, dim, |i, j| {
        let diag = if i == j { z } else { Complex64::default() };
        diag - r.a[(i, j)]
    });
    let x = match solve(&zi_a, &r.b, 1e-12) {
        Ok(x) => x,
        Err(Error::Singular { .. }) => return Err(Error::Pole { re: z.re, im: z.im }),
        Err(e) => return Err(e),
    };
    r.d.add(&r.c.mul(&x)?)
}

/// Applies the similarity `(A, B, C, D) ↦ (TAT⁻¹, TB, CT⁻¹, D)`.
///
/// For a minimal realization this is the entire freedom in the choice of
/// the quadruple; evaluation is unchanged at every point.
pub fn similarity(r: &Realization, t: &ComplexMatrix) -> Result<Realization> {
    let dim = r.state_dim();
    if !t.is_square() || t.rows() != dim {
        return Err(Error::dims("similarity", format!("{dim}x{dim} T"), format!("{}x{}", t.rows(), t.cols())));
    }
    let t_inv = inverse(t, t.default_tol())?;
    Realization::new(
        t.mul(&r.a)?.mul(&t_inv)?,
        t.mul(&r.b)?,
        r.c.mul(&t_inv)?,
        r.d.clone(),
    )
}

/// Cascade product: a realization of `z ↦ R1(z)·R2(z)`.
///
/// The state space is the direct sum of the factors' state spaces:
///
/// ```text
/// A = [A1  B1C2]   B = [B1D2]   C = [C1  D1C2]   D = D1D2
///     [0     A2]       [  B2]
/// ```
pub fn product(r1: &Realization, r2: &Realization) -> Result<Realization> {
    if r1.input_dim() != r2.output_dim() {
        return Err(Error::dims(
            "product",
            format!("inner dim {}", r1.input_dim()),
            format!("{}", r2.output_dim()),
        ));
    }
    let a = ComplexMatrix::from_blocks(&[
        vec![r1.a.clone(), r1.b.mul(&r2.c)?],
        vec![
            ComplexMatrix::zeros(r2.state_dim(), r1.state_dim()),
            r2.a.clone(),
        ],
    ])?;
    let b = ComplexMatrix::from_blocks(&[vec![r1.b.mul(&r2.d)?], vec![r2.b.clone()]])?;
    let c = ComplexMatrix::from_blocks(&[vec![r1.c.clone(), r1.d.mul(&r2.c)?]])?;
    let d = r1.d.mul(&r2.d)?;
    Realization::new(a, b, c, d)
}

/// Block-upper-triangular realization over a tuple of variables.
///
/// Evaluation places `z_j·I` on the `j`-th diagonal state block and equals
/// the ordered product of the factor functions, each in its own variable.
#[derive(Clone, Debug)]
pub struct MultiVarRealization {
    blocks: Vec<usize>,
    a: ComplexMatrix,
    b: ComplexMatrix,
    c: ComplexMatrix,
    d: ComplexMatrix,
}

impl MultiVarRealization {
    /// Validates the block partition and block-upper-triangular shape of `A`.
    pub fn new(
        blocks: Vec<usize>,
        a: ComplexMatrix,
        b: ComplexMatrix,
        c: ComplexMatrix,
        d: ComplexMatrix,
    ) -> Result<Self> {
        let total: usize = blocks.iter().sum();
        if a.rows() != total || a.cols() != total {
            return Err(Error::dims(
                "MultiVarRealization::new",
                format!("{total}x{total} A"),
                format!("{}x{}", a.rows(), a.cols()),
            ));
        }
        // Entries strictly below the block diagonal must vanish.
        let mut row0 = 0;
        let offsets: Vec<usize> = blocks
            .iter()
            .scan(0, |acc, &n| {
                let here = *acc;
                *acc += n;
                Some(here)
            })
            .collect();
        for (bi, &nb) in blocks.iter().enumerate() {
            for r in row0..row0 + nb {
                for c_ in 0..offsets[bi] {
                    if a[(r, c_)].norm() != 0.0 {
                        return Err(Error::Invalid(
                            "A is not block-upper-triangular for the declared partition".into(),
                        ));
                    }
                }
            }
            row0 += nb;
        }
        if b.rows() != total || c.cols() != total {
            return Err(Error::dims(
                "MultiVarRealization::new",
                format!("B rows/C cols {total}"),
                format!("{}/{}", b.rows(), c.cols()),
            ));
        }
        Ok(MultiVarRealization { blocks, a, b, c, d })
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }

    pub fn c(&self) -> &ComplexMatrix {
        &self.c
    }

    pub fn d(&self) -> &ComplexMatrix {
        &self.d
    }

    pub fn num_vars(&self) -> usize {
        self.blocks.len()
    }
}

/// Realization of the ordered product `M1(z1)·M2(z2)⋯Mu(zu)` where each
/// factor depends on its own variable.
///
/// Block `(j,k)` of the state matrix is `B_j D_{j+1}⋯D_{k−1} C_k` for
/// `j < k` (empty product = identity), the `j`-th row block of `B` is
/// `B_j D_{j+1}⋯D_u`, the `j`-th column block of `C` is `D_1⋯D_{j−1} C_j`,
/// and `D = D_1⋯D_u`. With two factors this is exactly the one-variable
/// cascade array of [`product`].
pub fn multivar_product(rs: &[Realization]) -> Result<MultiVarRealization> {
    if rs.is_empty() {
        return Err(Error::Invalid("multivar_product needs at least one factor".into()));
    }
    let u = rs.len();
    for w in rs.windows(2) {
        if w[0].input_dim() != w[1].output_dim() {
            return Err(Error::dims(
                "multivar_product",
                format!("inner dim {}", w[0].input_dim()),
                format!("{}", w[1].output_dim()),
            ));
        }
    }
    let blocks: Vec<usize> = rs.iter().map(|r| r.state_dim()).collect();

    // State matrix blocks.
    let mut a_blocks: Vec<Vec<ComplexMatrix>> = Vec::with_capacity(u);
    for j in 0..u {
        let mut row: Vec<ComplexMatrix> = Vec::with_capacity(u);
        for _ in 0..j {
            row.push(ComplexMatrix::zeros(blocks[j], 0)); // width fixed by the band
        }
        row.push(rs[j].a().clone());
        let mut mid = ComplexMatrix::identity(rs[j].input_dim());
        for k in j + 1..u {
            row.push(rs[j].b().mul(&mid)?.mul(rs[k].c())?);
            mid = mid.mul(rs[k].d())?;
        }
        a_blocks.push(row);
    }
    // Fix up the zero blocks' widths now that all bands are known.
    for (j, row) in a_blocks.iter_mut().enumerate() {
        for (k, blk) in row.iter_mut().enumerate() {
            if k < j {
                *blk = ComplexMatrix::zeros(blocks[j], blocks[k]);
            }
        }
    }
    let a = ComplexMatrix::from_blocks(&a_blocks)?;

    // Input blocks: B_j · D_{j+1}⋯D_u, accumulated right to left.
    let mut b_rows: Vec<Vec<ComplexMatrix>> = vec![Vec::new(); u];
    let mut suffix = ComplexMatrix::identity(rs[u - 1].input_dim());
    for j in (0..u).rev() {
        b_rows[j] = vec![rs[j].b().mul(&suffix)?];
        suffix = rs[j].d().mul(&suffix)?;
    }
    let d = suffix; // D_1⋯D_u
    let b = ComplexMatrix::from_blocks(&b_rows)?;

    // Output blocks: D_1⋯D_{j−1} · C_j, accumulated left to right.
    let mut c_cols: Vec<ComplexMatrix> = Vec::with_capacity(u);
    let mut prefix = ComplexMatrix::identity(rs[0].output_dim());
    for (j, r) in rs.iter().enumerate() {
        c_cols.push(prefix.mul(r.c())?);
        if j + 1 < u {
            prefix = prefix.mul(r.d())?;
        }
    }
    let c = ComplexMatrix::from_blocks(&[c_cols])?;

    MultiVarRealization::new(blocks, a, b, c, d)
}

/// Evaluates a multi-variable realization: `D + C(Λ(z) − A)⁻¹B` with
/// `Λ(z) = diag(z_1 I_{n_1}, …, z_u I_{n_u})`.
pub fn eval_multivar(m: &MultiVarRealization, zs: &[Complex64]) -> Result<ComplexMatrix> {
    if zs.len() != m.blocks.len() {
        return Err(Error::dims(
            "eval_multivar",
            format!("{} variable values", m.blocks.len()),
            format!("{}", zs.len()),
        ));
    }
    let total: usize = m.blocks.iter().sum();
    if total == 0 {
        return Ok(m.d.clone());
    }
    let mut lambda = ComplexMatrix::zeros(total, total);
    let mut off = 0;
    for (&n, &z) in m.blocks.iter().zip(zs) {
        for i in 0..n {
            lambda[(off + i, off + i)] = z;
        }
        off += n;
    }
    let lhs = lambda.sub(&m.a)?;
    let x = match solve(&lhs, &m.b, 1e-12) {
        Ok(x) => x,
        Err(Error::Singular { .. }) => {
            return Err(Error::Invalid("Lambda(z) - A is singular at the requested tuple".into()))
        }
        Err(e) => return Err(e),
    };
    m.d.add(&m.c.mul(&x)?)
}

/// Keeps the controllable part of the realization.
///
/// `T` is built as a unitary completion of an orthonormal basis of the
/// controllability space, so the change of basis is perfectly conditioned
/// and the invariance defect lands in discarded blocks.
fn controllable_part(r: &Realization, rel_tol: f64) -> Result<Realization> {
    let dim = r.state_dim();
    if dim == 0 {
        return Ok(r.clone());
    }
    // K = [B, AB, ..., A^(d-1)B]
    let mut stack: Vec<Vec<ComplexMatrix>> = vec![Vec::with_capacity(dim)];
    let mut cur = r.b.clone();
    for _ in 0..dim {
        stack[0].push(cur.clone());
        cur = r.a.mul(&cur)?;
    }
    let k = ComplexMatrix::from_blocks(&stack)?;
    let v = column_space_basis(&k, rel_tol);
    let r_dim = v.cols();
    if r_dim == dim {
        return Ok(r.clone());
    }
    // Unitary T = [V | completion].
    let ext = ComplexMatrix::from_blocks(&[vec![v.clone(), ComplexMatrix::identity(dim)]])?;
    let t = column_space_basis(&ext, rel_tol);
    debug_assert_eq!(t.cols(), dim);
    let t_star = t.adjoint();
    let a2 = t_star.mul(&r.a)?.mul(&t)?;
    let b2 = t_star.mul(&r.b)?;
    let c2 = r.c.mul(&t)?;
    Realization::new(
        a2.submatrix(0, 0, r_dim, r_dim),
        b2.submatrix(0, 0, r_dim, b2.cols()),
        c2.submatrix(0, 0, c2.rows(), r_dim),
        r.d.clone(),
    )
}

/// Two-stage Kalman reduction to a minimal realization.
///
/// Removes the unobservable subspace (through the adjoint system), then the
/// uncontrollable one. Rank decisions use the relative threshold `tol`
/// against the largest pivot scale. Always succeeds; a minimal input comes
/// back with the same state dimension.
pub fn minimize(r: &Realization, tol: f64) -> Realization {
    let observable = controllable_part(&r.dual(), tol)
        .map(|red| red.dual())
        .unwrap_or_else(|_| r.clone());
    controllable_part(&observable, tol).unwrap_or(observable)
}

/// Observability Gramian `Γ = Σ_{u≥0} A*^u C*C A^u`, the unique solution of
/// the Stein equation `Γ − A*ΓA = C*C` when `ρ(A) < 1`.
///
/// Computed by doubling: `Γ ← Γ + X*ΓX`, `X ← X²`, which squares the error
/// each sweep and stays robust as `ρ(A)` approaches 1.
pub fn observability_gramian(r: &Realization) -> Result<ComplexMatrix> {
    let dim = r.state_dim();
    if dim == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    let rho = spectral_radius(&r.a, 1e-12)?.value;
    if rho >= 1.0 - 1e-9 {
        return Err(Error::NotContractive { rho });
    }
    let mut gamma = r.c.adjoint().mul(&r.c)?;
    let tol = 1e-14 * gamma.norm_fro().max(1.0);
    let mut x = r.a.clone();
    for _ in 0..60 {
        let inc = x.adjoint().mul(&gamma)?.mul(&x)?;
        gamma = gamma.add(&inc)?;
        if inc.norm_fro() <= tol {
            break;
        }
        x = x.mul(&x)?;
    }
    // Hermitize to clean residual skew from roundoff.
    Ok(gamma.add(&gamma.adjoint())?.scale(cx(0.5, 0.0)))
}

/// The vector `Y = D*C + B*ΓA` entering the autocorrelation formulas.
pub fn y_vector(r: &Realization, gram: &ComplexMatrix) -> Result<ComplexMatrix> {
    let dim = r.state_dim();
    if gram.rows() != dim || gram.cols() != dim {
        return Err(Error::dims(
            "y_vector",
            format!("{dim}x{dim} Gramian"),
            format!("{}x{}", gram.rows(), gram.cols()),
        ));
    }
    let term1 = r.d.adjoint().mul(&r.c)?;
    let term2 = r.b.adjoint().mul(gram)?.mul(&r.a)?;
    term1.add(&term2)
}

// ---------------------------------------------------------------------------
// JSON schema: {"A": [[..]], "B": [[..]], "C": [[..]], "D": [[..]]} with
// complex entries encoded as [re, im] pairs.
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
pub struct RealizationJson {
    #[serde(rename = "A")]
    pub a: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "D")]
    pub d: Vec<Vec<[f64; 2]>>,
}

pub(crate) fn matrix_to_pairs(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub(crate) fn matrix_from_pairs(
    pairs: &[Vec<[f64; 2]>],
    cols_hint: Option<usize>,
    context: &'static str,
) -> Result<ComplexMatrix> {
    let rows = pairs.len();
    let cols = pairs.first().map_or(cols_hint.unwrap_or(0), |r| r.len());
    let mut entries = Vec::with_capacity(rows * cols);
    for row in pairs {
        if row.len() != cols {
            return Err(Error::dims(context, format!("row length {cols}"), format!("{}", row.len())));
        }
        for &[re, im] in row {
            entries.push(cx(re, im));
        }
    }
    ComplexMatrix::new(rows, cols, entries)
}

impl Realization {
    pub fn to_json(&self) -> RealizationJson {
        RealizationJson {
            a: matrix_to_pairs(&self.a),
            b: matrix_to_pairs(&self.b),
            c: matrix_to_pairs(&self.c),
            d: matrix_to_pairs(&self.d),
        }
    }

    pub fn from_json(json: &RealizationJson) -> Result<Self> {
        let d = matrix_from_pairs(&json.d, None, "realization D")?;
        if d.rows() == 0 || d.cols() == 0 {
            return Err(Error::Invalid("realization D must be at least 1x1".into()));
        }
        let dim = json.a.len();
        let a = matrix_from_pairs(&json.a, Some(dim), "realization A")?;
        let b = if json.b.is_empty() && dim == 0 {
            ComplexMatrix::zeros(0, d.cols())
        } else {
            matrix_from_pairs(&json.b, Some(d.cols()), "realization B")?
        };
        let c = if dim == 0 {
            // Rows may be listed as empty arrays; normalize the width.
            ComplexMatrix::zeros(d.rows(), 0)
        } else {
            matrix_from_pairs(&json.c, Some(dim), "realization C")?
        };
        Self::new(a, b, c, d)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("realization serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let json: RealizationJson = serde_json::from_str(s)?;
        Self::from_json(&json)
    }
}
