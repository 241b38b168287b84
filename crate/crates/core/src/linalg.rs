//! Dense complex linear algebra and the quantum-information kernels built on it.
//!
//! Matrices are stored row-major. Composite indices follow the usual
//! convention: for subsystem dimensions `[d_0, .., d_{n-1}]` the last
//! subsystem varies fastest.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const DENSITY_TOL: f64 = 1e-12;
/// Eigenvalues in `[-NEGATIVE_CLIP, 0)` are treated as roundoff.
pub const NEGATIVE_CLIP: f64 = 1e-12;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| c(x)).collect())
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self::from_diagonal(&diag.iter().map(|&x| c(x)).collect::<Vec<_>>())
    }

    /// `|u><v|`
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        let mut m = Self::zeros(u.len(), v.len());
        for (i, ui) in u.iter().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                m[(i, j)] = ui * vj.conj();
            }
        }
        m
    }

    pub fn projector(v: &[Complex64]) -> Self {
        Self::outer(v, v)
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

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on a shape mismatch; use [`ComplexMatrix::matmul`] for the fallible form.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix shapes must agree")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Pauli matrices `sigma_0 .. sigma_3` in the `(a, b)` = `(up, down)` basis.
pub struct PauliSet;

impl PauliSet {
    pub fn get(index: usize) -> ComplexMatrix {
        let entries: [Complex64; 4] = match index {
            0 => [ONE, ZERO, ZERO, ONE],
            1 => [ZERO, ONE, ONE, ZERO],
            2 => [ZERO, -I, I, ZERO],
            3 => [ONE, ZERO, ZERO, -ONE],
            _ => panic!("Pauli index {index} out of range"),
        };
        ComplexMatrix::from_vec(2, 2, entries.to_vec()).unwrap()
    }

    pub fn all() -> [ComplexMatrix; 4] {
        [Self::get(0), Self::get(1), Self::get(2), Self::get(3)]
    }
}

/// `(|01> - |10>)/sqrt 2`.
pub fn singlet() -> Vec<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    vec![ZERO, c(s), c(-s), ZERO]
}

pub fn singlet_projector() -> ComplexMatrix {
    ComplexMatrix::projector(&singlet())
}

/// `(1-p)/4 I + p |Psi-><Psi-|`, the two-qubit Werner family.
pub fn werner(p: f64) -> ComplexMatrix {
    &ComplexMatrix::identity(4).scale(c((1.0 - p) / 4.0)) + &singlet_projector().scale(c(p))
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows * b.rows, a.cols * b.cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let x = a[(i, j)];
            if x == ZERO {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = x * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

/// Hermitian, positive semidefinite, unit-trace matrix over a tensor product
/// of subsystems.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity (all to `1e-12`).
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        let rho = Self::new_unchecked_spectrum(matrix, dims)?;
        let lowest = hermitian_eigenvalues(&rho.matrix)?[0];
        if lowest < -NEGATIVE_CLIP {
            return Err(Error::NegativeEigenvalue(lowest));
        }
        Ok(rho)
    }

    /// Same as [`DensityMatrix::new`] but skips the eigenvalue check.
    fn new_unchecked_spectrum(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Shape("density matrix must be square".into()));
        }
        if dims.is_empty() || dims.iter().product::<usize>() != matrix.rows() {
            return Err(Error::Shape(format!(
                "subsystem dims {dims:?} do not multiply to {}",
                matrix.rows()
            )));
        }
        let defect = matrix.hermiticity_defect();
        if defect > DENSITY_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > DENSITY_TOL {
            return Err(Error::Trace(tr.re));
        }
        Ok(Self { matrix, dims })
    }

    /// Rescales by the trace before validating.
    pub fn normalized(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        let tr = matrix.trace();
        if tr.norm() == 0.0 {
            return Err(Error::Trace(0.0));
        }
        Self::new(matrix.scale(tr.inv()), dims)
    }

    pub fn from_pure(amplitudes: &[Complex64], dims: Vec<usize>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Domain("zero state vector".into()));
        }
        let v: Vec<Complex64> = amplitudes.iter().map(|a| a / norm).collect();
        Self::new_unchecked_spectrum(ComplexMatrix::projector(&v), dims)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix).expect("density matrices are Hermitian")
    }

    pub fn entropy(&self) -> Result<f64> {
        von_neumann_entropy(self)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix {
            matrix: kron(&self.matrix, &other.matrix),
            dims,
        }
    }
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Offsets of every multi-index over `subsystems`, in row-major order of
/// those subsystems, expressed as flat offsets into the full index space.
fn offsets(dims: &[usize], subsystems: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut out = vec![0usize];
    for &k in subsystems {
        let step = st[k];
        out = out
            .iter()
            .flat_map(|&base| (0..dims[k]).map(move |x| base + x * step))
            .collect();
    }
    out
}

fn checked_keep(dims: &[usize], keep: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    if keep.is_empty() {
        return Err(Error::Subsystem("keep set is empty".into()));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&bad) = kept.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::Subsystem(format!(
            "index {bad} out of range for {} subsystems",
            dims.len()
        )));
    }
    let traced = (0..dims.len()).filter(|k| !kept.contains(k)).collect();
    Ok((kept, traced))
}

/// Traces out every subsystem not listed in `keep`. Kept subsystems stay in
/// their original order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let (kept, traced) = checked_keep(&rho.dims, keep)?;
    let keep_off = offsets(&rho.dims, &kept);
    let trace_off = offsets(&rho.dims, &traced);
    let n = keep_off.len();
    let mut out = ComplexMatrix::zeros(n, n);
    for (i, &ri) in keep_off.iter().enumerate() {
        for (j, &rj) in keep_off.iter().enumerate() {
            out[(i, j)] = trace_off
                .iter()
                .map(|&t| rho.matrix[(ri + t, rj + t)])
                .sum();
        }
    }
    Ok(DensityMatrix {
        matrix: out,
        dims: kept.iter().map(|&k| rho.dims[k]).collect(),
    })
}

/// Reduced state of `keep` for the pure state `amplitudes` without forming
/// the full projector.
pub fn reduced_from_pure(
    amplitudes: &[Complex64],
    dims: &[usize],
    keep: &[usize],
) -> Result<DensityMatrix> {
    if dims.iter().product::<usize>() != amplitudes.len() {
        return Err(Error::Shape(format!(
            "{} amplitudes for dims {dims:?}",
            amplitudes.len()
        )));
    }
    let (kept, traced) = checked_keep(dims, keep)?;
    let keep_off = offsets(dims, &kept);
    let trace_off = offsets(dims, &traced);
    let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    let n = keep_off.len();
    // rows of the (kept x traced) amplitude matrix
    let blocks: Vec<Vec<Complex64>> = keep_off
        .iter()
        .map(|&k| trace_off.iter().map(|&t| amplitudes[k + t]).collect())
        .collect();
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v: Complex64 = blocks[i]
                .iter()
                .zip(&blocks[j])
                .map(|(x, y)| x * y.conj())
                .sum::<Complex64>()
                / norm_sqr;
            out[(i, j)] = v;
            out[(j, i)] = v.conj();
        }
    }
    DensityMatrix::new_unchecked_spectrum(out, kept.iter().map(|&k| dims[k]).collect())
}

/// Transposes the indices of one subsystem.
pub fn partial_transpose(rho: &DensityMatrix, subsystem: usize) -> Result<ComplexMatrix> {
    if rho.dims.len() < 2 {
        return Err(Error::Subsystem(
            "partial transpose needs at least two subsystems".into(),
        ));
    }
    if subsystem >= rho.dims.len() {
        return Err(Error::Subsystem(format!(
            "subsystem {subsystem} out of range for {} subsystems",
            rho.dims.len()
        )));
    }
    let stride = strides(&rho.dims)[subsystem];
    let d = rho.dims[subsystem];
    let n = rho.dim();
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        let dr = (r / stride) % d;
        for col in 0..n {
            let dc = (col / stride) % d;
            let nr = r - dr * stride + dc * stride;
            let nc = col - dc * stride + dr * stride;
            out[(nr, nc)] = rho.matrix[(r, col)];
        }
    }
    Ok(out)
}

/// Realignment `R[(i,k),(j,l)] = rho[(i,j),(k,l)]`, with `i,k` indexing the
/// first subsystem and `j,l` the second. Output is `d_A^2 x d_B^2`.
pub fn realign(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    let [da, db] = rho.dims[..] else {
        return Err(Error::Subsystem(format!(
            "realignment needs a bipartite state, got dims {:?}",
            rho.dims
        )));
    };
    let mut out = ComplexMatrix::zeros(da * da, db * db);
    for i in 0..da {
        for j in 0..db {
            for k in 0..da {
                for l in 0..db {
                    out[(i * da + k, j * db + l)] = rho.matrix[(i * db + j, k * db + l)];
                }
            }
        }
    }
    Ok(out)
}

/// Eigen-decomposition of a Hermitian matrix. Eigenvalues ascend; column `k`
/// of the returned matrix is the eigenvector of eigenvalue `k`.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let eig = SymmetricEigen::new(m.to_nalgebra());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = ComplexMatrix::zeros(m.rows(), m.cols());
    for (col, &k) in order.iter().enumerate() {
        for row in 0..m.rows() {
            vectors[(row, col)] = eig.eigenvectors[(row, k)];
        }
    }
    Ok((values, vectors))
}

pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let mut values: Vec<f64> = m
        .to_nalgebra()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = SVD::new(m.to_nalgebra(), false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    // Hermitian inputs (partial transposes) take the cheaper eigenvalue route.
    if m.is_square() && m.hermiticity_defect() <= 1e-14 {
        if let Ok(ev) = hermitian_eigenvalues(m) {
            return ev.iter().map(|x| x.abs()).sum();
        }
    }
    singular_values(m).iter().sum()
}

pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    0.5 * trace_norm(&(a - b))
}

/// Shannon entropy in bits of a probability spectrum, with `0 log 0 = 0`.
/// Values in `[-1e-12, 0)` are clipped; anything lower is an error.
pub fn spectrum_entropy(values: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &x in values {
        if x < -NEGATIVE_CLIP {
            return Err(Error::NegativeEigenvalue(x));
        }
        if x > 0.0 {
            s -= x * x.log2();
        }
    }
    Ok(s)
}

/// Same as [`spectrum_entropy`] in nats.
pub fn spectrum_entropy_nats(values: &[f64]) -> Result<f64> {
    spectrum_entropy(values).map(|s| s * std::f64::consts::LN_2)
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    spectrum_entropy(&rho.eigenvalues())
}

/// `h2(x) = -x log2 x - (1-x) log2 (1-x)`.
pub fn binary_entropy(x: f64) -> f64 {
    spectrum_entropy(&[x, 1.0 - x]).expect("probability in [0, 1]")
}
