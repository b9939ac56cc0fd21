//! Dense complex linear algebra for small operators.
//!
//! Everything here works on square matrices of modest size (a few dozen
//! rows at most). The Hermitian eigensolver is a cyclic complex Jacobi
//! iteration: slow for large inputs, but unconditionally convergent and
//! accurate to a few ulps on the dimensions this crate cares about.

use std::fmt;
use std::ops::Range;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// Relative Frobenius threshold on the off-diagonal part at which Jacobi stops.
pub const JACOBI_OFF_DIAGONAL_TOL: f64 = 1e-13;
/// Sweep cap for the Jacobi iteration.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Relative tolerance used when checking Hermiticity of an input.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues in `[-NEGATIVE_SPECTRUM_TOL, 0)` are clamped to zero before powering.
pub const NEGATIVE_SPECTRUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is not Hermitian: ‖M − M†‖ = {defect:e} exceeds {tolerance:e}")]
    NotHermitian { defect: f64, tolerance: f64 },
    #[error(
        "Jacobi iteration did not converge within {sweeps} sweeps (off-diagonal norm {off_norm:e})"
    )]
    NoConvergence { sweeps: usize, off_norm: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("eigenvalue {eigenvalue:e} is below the PSD rounding tolerance")]
    NegativeSpectrum { eigenvalue: f64 },
    #[error("exponent {0} must be finite and non-negative")]
    InvalidExponent(f64),
    #[error("matrix is not square: row {row} has {len} entries, expected {dim}")]
    NotSquare { row: usize, len: usize, dim: usize },
    #[error("matrix must have at least one row")]
    Empty,
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
}

/// Dense square matrix of complex doubles stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from rows, rejecting ragged, empty or non-finite input.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self, LinalgError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(LinalgError::Empty);
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (row, entries) in rows.into_iter().enumerate() {
            if entries.len() != dim {
                return Err(LinalgError::NotSquare {
                    row,
                    len: entries.len(),
                    dim,
                });
            }
            for (col, z) in entries.into_iter().enumerate() {
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(LinalgError::NonFinite { row, col });
                }
                data.push(z);
            }
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Outer product |u⟩⟨v|.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        assert_eq!(
            u.len(),
            v.len(),
            "outer product of vectors of different length"
        );
        Self::from_fn(u.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn pauli_x() -> Self {
        let (o, l) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        Self {
            dim: 2,
            data: vec![o, l, l, o],
        }
    }

    pub fn pauli_y() -> Self {
        let o = Complex64::new(0.0, 0.0);
        Self {
            dim: 2,
            data: vec![o, Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), o],
        }
    }

    pub fn pauli_z() -> Self {
        Self::from_real_diagonal(&[1.0, -1.0])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex64]> {
        self.data.chunks(self.dim)
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_complex(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Tr(self · other) without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim, other.dim, "trace_product dimension mismatch");
        let d = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for k in 0..d {
                acc += self.data[i * d + k] * other.data[k * d + i];
            }
        }
        acc
    }

    /// Hilbert–Schmidt norm √Tr(X†X).
    pub fn hs_norm(&self) -> f64 {
        hs_norm_sq(self).sqrt()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// ‖M − M†‖ in the Hilbert–Schmidt norm.
    pub fn hermitian_defect(&self) -> f64 {
        let d = self.dim;
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                acc += (self.data[i * d + j] - self.data[j * d + i].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn check_hermitian(&self) -> Result<(), LinalgError> {
        let tolerance = HERMITIAN_TOL * self.hs_norm();
        let defect = self.hermitian_defect();
        if defect > tolerance {
            return Err(LinalgError::NotHermitian { defect, tolerance });
        }
        Ok(())
    }

    /// (M + M†)/2. The result is Hermitian bit-for-bit.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| {
            if i == j {
                Complex64::new(self[(i, i)].re, 0.0)
            } else {
                (self[(i, j)] + self[(j, i)].conj()) * 0.5
            }
        })
    }

    /// U† · self · U.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        &(&u.adjoint() * self) * u
    }

    fn check_dims(&self, other: &Self) -> Result<(), LinalgError> {
        if self.dim != other.dim {
            return Err(LinalgError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_dims(other)?;
        Ok(self * other)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let d = self.dim;
        let mut out = ComplexMatrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] += a * rhs.data[k * d + j];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix sum dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
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
        assert_eq!(self.dim, rhs.dim, "matrix difference dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for row in self.rows() {
            write!(f, "  ")?;
            for z in row {
                write!(f, "{:>+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Tr(X†X), the squared Hilbert–Schmidt norm.
pub fn hs_norm_sq(x: &ComplexMatrix) -> f64 {
    x.data.iter().map(|z| z.norm_sqr()).sum()
}

/// AB − BA.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    a.check_dims(b)?;
    Ok(&(a * b) - &(b * a))
}

/// AB + BA.
pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    a.check_dims(b)?;
    Ok(&(a * b) + &(b * a))
}

/// Default degeneracy clustering tolerance: 1e-9 · max(1, ‖M‖).
pub fn default_cluster_tol(m: &ComplexMatrix) -> f64 {
    1e-9 * m.hs_norm().max(1.0)
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues grouped
/// into degenerate clusters.
///
/// Eigenvalues are ascending; column `i` of `eigenvectors` belongs to
/// `eigenvalues[i]`. Because eigenvalues are sorted, each cluster is a
/// contiguous index range.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
    clusters: Vec<Range<usize>>,
    projectors: Vec<ComplexMatrix>,
    cluster_tol: f64,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unitary whose columns are the eigenvectors.
    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, i: usize) -> Vec<Complex64> {
        self.eigenvectors.column(i)
    }

    pub fn clusters(&self) -> &[Range<usize>] {
        &self.clusters
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn cluster_tol(&self) -> f64 {
        self.cluster_tol
    }

    /// Cluster index of each eigenvalue index.
    pub fn cluster_labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.dim()];
        for (mu, range) in self.clusters.iter().enumerate() {
            for i in range.clone() {
                labels[i] = mu;
            }
        }
        labels
    }

    /// Mean eigenvalue of a cluster.
    pub fn cluster_value(&self, mu: usize) -> f64 {
        let range = &self.clusters[mu];
        self.eigenvalues[range.clone()].iter().sum::<f64>() / range.len() as f64
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    /// Σ_i f(λ_i) |v_i⟩⟨v_i|.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let d = self.dim();
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::from_fn(d, |i, j| {
            (0..d)
                .map(|k| v[(i, k)] * weights[k] * v[(j, k)].conj())
                .sum()
        });
        // exact Hermitian symmetry
        out = out.hermitian_part();
        out
    }

    /// Replaces eigenvalues with |λ| ≤ `tol` by exact zeros.
    pub fn zero_below(mut self, tol: f64) -> Self {
        for l in &mut self.eigenvalues {
            if l.abs() <= tol {
                *l = 0.0;
            }
        }
        self
    }

    /// Σ_i λ_i |v_i⟩⟨v_i|.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_fn(|l| l)
    }
}

/// Diagonalizes a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Iteration stops once the off-diagonal Frobenius norm drops to
/// `JACOBI_OFF_DIAGONAL_TOL · ‖M‖`. Eigenvalues closer than `cluster_tol`
/// to the first member of the current cluster are merged into it, so the
/// spread inside any cluster never exceeds `cluster_tol`.
pub fn herm_eig(m: &ComplexMatrix, cluster_tol: f64) -> Result<SpectralDecomposition, LinalgError> {
    let d = m.dim();
    if d == 0 {
        return Err(LinalgError::Empty);
    }
    m.check_hermitian()?;

    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(d);
    let threshold = JACOBI_OFF_DIAGONAL_TOL * m.hs_norm();

    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    acc += a[(i, j)].norm_sqr();
                }
            }
        }
        acc.sqrt()
    };

    let mut converged = off_norm(&a) <= threshold;
    let mut sweeps = 0;
    while !converged {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(LinalgError::NoConvergence {
                sweeps,
                off_norm: off_norm(&a),
            });
        }
        for p in 0..d {
            for q in (p + 1)..d {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
        converged = off_norm(&a) <= threshold;
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(d, |i, j| v[(i, order[j])]);

    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 1..d {
        if eigenvalues[i] - eigenvalues[start] > cluster_tol {
            clusters.push(start..i);
            start = i;
        }
    }
    clusters.push(start..d);

    let projectors = clusters
        .iter()
        .map(|range| {
            let mut p = ComplexMatrix::from_fn(d, |i, j| {
                range
                    .clone()
                    .map(|k| eigenvectors[(i, k)] * eigenvectors[(j, k)].conj())
                    .sum()
            });
            p = p.hermitian_part();
            p
        })
        .collect();

    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        clusters,
        projectors,
        cluster_tol,
    })
}

/// One complex Jacobi rotation annihilating a[p][q]; accumulates into v.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // skip rotations that cannot change the diagonal in double precision
    if g < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = Complex64::new(0.0, 0.0);
        a[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let phase = apq / g;
    let zeta = (aqq - app) / (2.0 * g);
    let t = if zeta >= 0.0 {
        1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
    } else {
        -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // U = diag(1, e^{-iφ}) on (p, q) followed by the real rotation [[c, s], [-s, c]].
    let upp = Complex64::new(c, 0.0);
    let upq = Complex64::new(s, 0.0);
    let uqp = -phase.conj() * s;
    let uqq = phase.conj() * c;

    let d = a.dim();
    for k in 0..d {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * upp + akq * uqp;
        a[(k, q)] = akp * upq + akq * uqq;
    }
    for k in 0..d {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = upp.conj() * apk + uqp.conj() * aqk;
        a[(q, k)] = upq.conj() * apk + uqq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..d {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * upp + vkq * uqp;
        v[(k, q)] = vkp * upq + vkq * uqq;
    }
}

/// λ^s with the clamping conventions used throughout: values in
/// `[-1e-12, 0)` count as zero, and 0^0 = 0 so that `s = 0` yields the
/// support projector.
pub fn clamped_power(lambda: f64, s: f64) -> f64 {
    let l = lambda.max(0.0);
    if l == 0.0 {
        0.0
    } else {
        l.powf(s)
    }
}

/// x^s − y^s for x ≥ y ≥ 0, accurate when x and y are close.
pub fn power_difference(x: f64, y: f64, s: f64) -> f64 {
    if y <= 0.0 {
        return clamped_power(x, s);
    }
    y.powf(s) * (s * ((x - y) / y).ln_1p()).exp_m1()
}

/// Σ_μ λ_μ^s P_μ for a positive semidefinite decomposition.
pub fn matrix_power(decomp: &SpectralDecomposition, s: f64) -> Result<ComplexMatrix, LinalgError> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(LinalgError::InvalidExponent(s));
    }
    if decomp.min_eigenvalue() < -NEGATIVE_SPECTRUM_TOL {
        return Err(LinalgError::NegativeSpectrum {
            eigenvalue: decomp.min_eigenvalue(),
        });
    }
    Ok(decomp.apply_fn(|l| clamped_power(l, s)))
}
