//! Dense complex matrix kernel.
//!
//! Everything in this crate runs on small state dimensions (d up to a few
//! dozen), so the kernel is a plain row-major `Vec<Complex64>` with
//! partial-pivot elimination for solves and power-iteration / Gelfand
//! estimates for spectral quantities. There is deliberately no
//! eigendecomposition, QR or SVD here.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Shorthand for a real complex scalar.
pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense complex matrix, row-major storage.
///
/// Zero-dimensional shapes (0×k, k×0) are first-class: they show up as the
/// state blocks of constant realizations and all operations treat sums over
/// an empty index range as zero.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, validating shape and finiteness.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::dims(
                "ComplexMatrix::new",
                format!("{} entries", rows * cols),
                format!("{}", entries.len()),
            ));
        }
        let m = ComplexMatrix { rows, cols, entries };
        m.check_finite()?;
        Ok(m)
    }

    /// Validates that every entry is finite.
    pub fn check_finite(&self) -> Result<()> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let z = self[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            entries: vec![Complex64::default(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = cx(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds from nested rows; rows must have equal length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        for row in rows {
            if row.len() != c {
                return Err(Error::dims(
                    "ComplexMatrix::from_rows",
                    format!("row length {c}"),
                    format!("{}", row.len()),
                ));
            }
        }
        Self::new(r, c, rows.iter().flatten().copied().collect())
    }

    /// Real-entry convenience constructor.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let lifted: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| cx(x, 0.0)).collect())
            .collect();
        Self::from_rows(&lifted)
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { Complex64::default() })
    }

    /// 1×1 matrix holding a single scalar.
    pub fn scalar(z: Complex64) -> Self {
        ComplexMatrix {
            rows: 1,
            cols: 1,
            entries: vec![z],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// True when one of the dimensions is zero.
    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    /// The single entry of a 1×1 matrix.
    pub fn as_scalar(&self) -> Result<Complex64> {
        if self.rows == 1 && self.cols == 1 {
            Ok(self.entries[0])
        } else {
            Err(Error::dims(
                "as_scalar",
                "1x1",
                format!("{}x{}", self.rows, self.cols),
            ))
        }
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Matrix product. Inner dimensions must agree.
    pub fn mul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::dims(
                "mat_mul",
                format!("inner dim {}", self.cols),
                format!("{}", other.rows),
            ));
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == Complex64::default() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &ComplexMatrix,
        context: &'static str,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<ComplexMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::dims(
                context,
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", other.rows, other.cols),
            ));
        }
        let mut out = self.clone();
        for (o, b) in out.entries.iter_mut().zip(&other.entries) {
            *o = f(*o, *b);
        }
        Ok(out)
    }

    pub fn scale(&self, z: Complex64) -> ComplexMatrix {
        let mut out = self.clone();
        for e in &mut out.entries {
            *e *= z;
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn norm_fro(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// k-th power of a square matrix (k = 0 gives the identity).
    pub fn pow(&self, k: usize) -> Result<ComplexMatrix> {
        if !self.is_square() {
            return Err(Error::dims("pow", "square", format!("{}x{}", self.rows, self.cols)));
        }
        let mut acc = ComplexMatrix::identity(self.rows);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Extracts the sub-matrix `rows × cols` starting at (`row0`, `col0`).
    pub fn submatrix(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> ComplexMatrix {
        assert!(row0 + rows <= self.rows && col0 + cols <= self.cols, "submatrix out of range");
        ComplexMatrix::from_fn(rows, cols, |i, j| self[(row0 + i, col0 + j)])
    }

    /// Assembles a block matrix from a grid of blocks.
    ///
    /// Row heights and column widths are inferred from the first
    /// non-degenerate block in each band; every block must match them.
    /// Zero-dimensional blocks are permitted wherever the band size is zero.
    pub fn from_blocks(blocks: &[Vec<ComplexMatrix>]) -> Result<ComplexMatrix> {
        let brows = blocks.len();
        let bcols = blocks.first().map_or(0, |r| r.len());
        for row in blocks {
            if row.len() != bcols {
                return Err(Error::dims(
                    "from_blocks",
                    format!("{bcols} blocks per row"),
                    format!("{}", row.len()),
                ));
            }
        }
        let mut heights = vec![0usize; brows];
        let mut widths = vec![0usize; bcols];
        for (i, row) in blocks.iter().enumerate() {
            for (j, b) in row.iter().enumerate() {
                heights[i] = heights[i].max(b.rows());
                widths[j] = widths[j].max(b.cols());
            }
        }
        for (i, row) in blocks.iter().enumerate() {
            for (j, b) in row.iter().enumerate() {
                let hw_ok = (b.rows() == heights[i] || b.rows() == 0 && heights[i] == 0)
                    && (b.cols() == widths[j] || b.cols() == 0 && widths[j] == 0);
                // A 0×0 placeholder is fine in a band whose size is zero in
                // either direction; otherwise shapes must agree exactly.
                let degenerate_ok = b.is_empty() && (heights[i] == 0 || widths[j] == 0);
                if !(hw_ok || degenerate_ok) && (b.rows() != heights[i] || b.cols() != widths[j]) {
                    return Err(Error::dims(
                        "from_blocks",
                        format!("block ({i},{j}) of {}x{}", heights[i], widths[j]),
                        format!("{}x{}", b.rows(), b.cols()),
                    ));
                }
            }
        }
        let total_r: usize = heights.iter().sum();
        let total_c: usize = widths.iter().sum();
        let mut out = ComplexMatrix::zeros(total_r, total_c);
        let mut r0 = 0;
        for (i, row) in blocks.iter().enumerate() {
            let mut c0 = 0;
            for (j, b) in row.iter().enumerate() {
                if !b.is_empty() {
                    for r in 0..b.rows() {
                        for c in 0..b.cols() {
                            out[(r0 + r, c0 + c)] = b[(r, c)];
                        }
                    }
                }
                c0 += widths[j];
            }
            r0 += heights[i];
        }
        Ok(out)
    }

    /// Default absolute pivot threshold: 1e−12 scaled by the largest entry.
    pub fn default_tol(&self) -> f64 {
        1e-12 * self.max_abs().max(1.0)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

/// Matrix product as a free function, mirroring the kernel surface.
pub fn mat_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.mul(b)
}

/// Solves `a · x = b` by Gaussian elimination with partial pivoting.
///
/// `tol` scales the singularity threshold: a pivot of magnitude below
/// `tol · max(1, max|a|)` aborts with [`Error::Singular`].
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::dims("solve", "square a", format!("{}x{}", a.rows(), a.cols())));
    }
    if a.rows() != b.rows() {
        return Err(Error::dims(
            "solve",
            format!("b with {} rows", a.rows()),
            format!("{}", b.rows()),
        ));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(ComplexMatrix::zeros(0, b.cols()));
    }
    let threshold = tol * a.max_abs().max(1.0);
    let mut lhs = a.clone();
    let mut rhs = b.clone();
    for col in 0..n {
        // Partial pivoting: largest magnitude in the column at or below the diagonal.
        let mut piv_row = col;
        let mut piv_mag = lhs[(col, col)].norm();
        for r in col + 1..n {
            let mag = lhs[(r, col)].norm();
            if mag > piv_mag {
                piv_mag = mag;
                piv_row = r;
            }
        }
        if piv_mag < threshold {
            return Err(Error::Singular {
                pivot: piv_mag,
                threshold,
            });
        }
        if piv_row != col {
            for j in 0..n {
                let tmp = lhs[(col, j)];
                lhs[(col, j)] = lhs[(piv_row, j)];
                lhs[(piv_row, j)] = tmp;
            }
            for j in 0..rhs.cols() {
                let tmp = rhs[(col, j)];
                rhs[(col, j)] = rhs[(piv_row, j)];
                rhs[(piv_row, j)] = tmp;
            }
        }
        let piv = lhs[(col, col)];
        for r in col + 1..n {
            let factor = lhs[(r, col)] / piv;
            if factor == Complex64::default() {
                continue;
            }
            lhs[(r, col)] = Complex64::default();
            for j in col + 1..n {
                let v = lhs[(col, j)];
                lhs[(r, j)] -= factor * v;
            }
            for j in 0..rhs.cols() {
                let v = rhs[(col, j)];
                rhs[(r, j)] -= factor * v;
            }
        }
    }
    // Back substitution.
    let mut x = ComplexMatrix::zeros(n, b.cols());
    for j in 0..b.cols() {
        for i in (0..n).rev() {
            let mut acc = rhs[(i, j)];
            for k in i + 1..n {
                acc -= lhs[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = acc / lhs[(i, i)];
        }
    }
    Ok(x)
}

/// Inverse via `solve(a, I)`.
pub fn inverse(a: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    solve(a, &ComplexMatrix::identity(a.rows()), tol)
}

/// Spectral-radius estimate together with a convergence flag.
#[derive(Clone, Copy, Debug)]
pub struct SpectralRadius {
    /// The estimate; when `converged` is false this is the last Gelfand
    /// upper bound rather than a tight value.
    pub value: f64,
    pub converged: bool,
}

/// Estimates the spectral radius ρ(a).
///
/// Runs a few restarts of power iteration for a lower estimate, then
/// refines through Gelfand's formula ‖aᵏ‖^{1/k} along k = 2^j with
/// normalized repeated squaring. This is an estimate, not an eigensolve;
/// on failure to stabilize the last (upper-bound) Gelfand value is
/// returned with `converged = false`.
pub fn spectral_radius(a: &ComplexMatrix, tol: f64) -> Result<SpectralRadius> {
    if !a.is_square() {
        return Err(Error::dims(
            "spectral_radius",
            "square",
            format!("{}x{}", a.rows(), a.cols()),
        ));
    }
    let n = a.rows();
    if n == 0 || a.max_abs() == 0.0 {
        return Ok(SpectralRadius {
            value: 0.0,
            converged: true,
        });
    }

    // Power iteration, three seeded restarts; keeps the largest growth rate.
    let mut power_est: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_5EED);
    for _ in 0..3 {
        let mut v = ComplexMatrix::from_fn(n, 1, |_, _| {
            cx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let nv = v.norm_fro();
        if nv == 0.0 {
            continue;
        }
        v = v.scale(cx(1.0 / nv, 0.0));
        let mut est = 0.0;
        for _ in 0..200 {
            let w = a.mul(&v)?;
            let nw = w.norm_fro();
            if nw == 0.0 {
                est = 0.0;
                break;
            }
            let next = nw;
            v = w.scale(cx(1.0 / nw, 0.0));
            if (next - est).abs() <= tol * (1.0 + next) {
                est = next;
                break;
            }
            est = next;
        }
        power_est = power_est.max(est);
    }

    // Gelfand refinement: track m_j = a^(2^j) / s_j with ‖m_j‖_F normalized
    // to 1, so the estimate is s_j^(1/2^j) without overflow.
    let norm0 = a.norm_fro();
    let mut m = a.scale(cx(1.0 / norm0, 0.0));
    let mut log_s = norm0.ln();
    let mut k: f64 = 1.0;
    let mut est = norm0; // ‖a‖_F, the k = 1 bound
    let mut converged = false;
    for _ in 0..60 {
        let m2 = m.mul(&m)?;
        let nm = m2.norm_fro();
        k *= 2.0;
        if nm == 0.0 {
            // a^(2^j) vanished: nilpotent.
            return Ok(SpectralRadius {
                value: 0.0,
                converged: true,
            });
        }
        log_s = 2.0 * log_s + nm.ln();
        m = m2.scale(cx(1.0 / nm, 0.0));
        let next = (log_s / k).exp();
        if (next - est).abs() <= tol * (1.0 + next) {
            est = next;
            converged = true;
            break;
        }
        est = next;
    }
    Ok(SpectralRadius {
        value: est.max(power_est.min(est * (1.0 + 1e-9))),
        converged,
    })
}

/// Largest-singular-value estimate via power iteration on a*a.
///
/// The Rayleigh quotient climbs from below, so the returned value never
/// overshoots the true operator 2-norm beyond roundoff.
pub fn two_norm_estimate(a: &ComplexMatrix) -> f64 {
    if a.is_empty() || a.max_abs() == 0.0 {
        return 0.0;
    }
    let at = a.adjoint();
    let mut best: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(0x2A0F_71E5);
    for _ in 0..2 {
        let mut v = ComplexMatrix::from_fn(a.cols(), 1, |_, _| {
            cx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let nv = v.norm_fro();
        v = v.scale(cx(1.0 / nv, 0.0));
        let mut sigma = 0.0;
        for _ in 0..1000 {
            let w = a.mul(&v).expect("shape checked");
            let next = w.norm_fro();
            let u = at.mul(&w).expect("shape checked");
            let nu = u.norm_fro();
            if nu == 0.0 {
                sigma = next;
                break;
            }
            v = u.scale(cx(1.0 / nu, 0.0));
            if (next - sigma).abs() <= 1e-13 * (1.0 + next) {
                sigma = next;
                break;
            }
            sigma = next;
        }
        best = best.max(sigma);
    }
    best
}

/// Indices of a maximal independent column set, chosen left to right.
///
/// Modified Gram–Schmidt with rejection threshold `rel_tol` relative to the
/// largest column norm of `m`; the kept orthonormal vectors are returned
/// alongside the indices.
pub fn independent_columns(m: &ComplexMatrix, rel_tol: f64) -> (Vec<usize>, Vec<ComplexMatrix>) {
    let mut kept_idx = Vec::new();
    let mut basis: Vec<ComplexMatrix> = Vec::new();
    let mut max_norm: f64 = 0.0;
    for j in 0..m.cols() {
        let col = m.submatrix(0, j, m.rows(), 1);
        max_norm = max_norm.max(col.norm_fro());
    }
    if max_norm == 0.0 {
        return (kept_idx, basis);
    }
    let threshold = rel_tol * max_norm;
    for j in 0..m.cols() {
        let mut v = m.submatrix(0, j, m.rows(), 1);
        // Two MGS sweeps for orthogonality at the threshold scale.
        for _ in 0..2 {
            for q in &basis {
                let coeff = q.adjoint().mul(&v).expect("shape checked").as_scalar().unwrap();
                v = v.sub(&q.scale(coeff)).expect("shape checked");
            }
        }
        let nv = v.norm_fro();
        if nv > threshold {
            basis.push(v.scale(cx(1.0 / nv, 0.0)));
            kept_idx.push(j);
            if basis.len() == m.rows() {
                break;
            }
        }
    }
    (kept_idx, basis)
}

/// Orthonormal basis of the column space of `m`, as matrix columns.
pub fn column_space_basis(m: &ComplexMatrix, rel_tol: f64) -> ComplexMatrix {
    let (_, basis) = independent_columns(m, rel_tol);
    let r = basis.len();
    ComplexMatrix::from_fn(m.rows(), r, |i, j| basis[j][(i, 0)])
}

/// Numerical column rank at threshold `rel_tol`.
pub fn rank(m: &ComplexMatrix, rel_tol: f64) -> usize {
    independent_columns(m, rel_tol).0.len()
}

/// Hermitian square root of a positive-definite matrix via the
/// Denman–Beavers iteration.
pub fn hermitian_sqrt(a: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::dims(
            "hermitian_sqrt",
            "square",
            format!("{}x{}", a.rows(), a.cols()),
        ));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    // Hermitize the input to suppress roundoff skew.
    let mut y = a.add(&a.adjoint())?.scale(cx(0.5, 0.0));
    let mut z = ComplexMatrix::identity(n);
    let scale = y.max_abs().max(1.0);
    for _ in 0..100 {
        let y_inv = inverse(&y, 1e-14)?;
        let z_inv = inverse(&z, 1e-14)?;
        let y_next = y.add(&z_inv)?.scale(cx(0.5, 0.0));
        let z_next = z.add(&y_inv)?.scale(cx(0.5, 0.0));
        let delta = y_next.sub(&y)?.norm_fro();
        y = y_next;
        z = z_next;
        if delta <= tol * scale {
            break;
        }
    }
    Ok(y)
}

/// Positive-semidefinite test by Cholesky with tolerance.
///
/// Pivots below `-tol` reject; pivots in `[-tol, tol]` are treated as zero
/// and their column must vanish to within `sqrt(tol)` scale.
pub fn is_positive_semidefinite(a: &ComplexMatrix, tol: f64) -> bool {
    if !a.is_square() {
        return false;
    }
    let n = a.rows();
    let scale = a.max_abs().max(1.0);
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut djj = a[(j, j)].re;
        for k in 0..j {
            djj -= l[(j, k)].norm_sqr();
        }
        if djj < -tol * scale {
            return false;
        }
        if djj <= tol * scale {
            // Semi-definite direction: the rest of the column must be ~0.
            for i in j + 1..n {
                let mut v = a[(i, j)];
                for k in 0..j {
                    v -= l[(i, k)] * l[(j, k)].conj();
                }
                if v.norm() > (tol * scale).sqrt() * scale {
                    return false;
                }
            }
            continue;
        }
        let ljj = djj.sqrt();
        l[(j, j)] = cx(ljj, 0.0);
        for i in j + 1..n {
            let mut v = a[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = v / ljj;
        }
    }
    true
}
