// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra shared by the analysis modules.
//!
//! Subspaces are always carried as isometries (matrices with orthonormal
//! columns) and compared through their orthogonal projectors, never by
//! basis, since bases are not unique.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};

use crate::{Error, Result, Tolerances};

pub use faer::c64;

/// Dense complex matrix.
pub type CMatrix = Mat<c64>;

pub(crate) const ZERO: c64 = c64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: c64 = c64 { re: 1.0, im: 0.0 };

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    Mat::zeros(rows, cols)
}

pub fn identity(n: usize) -> CMatrix {
    Mat::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
}

/// Builds a matrix from real row-major data.
pub fn from_real_rows(rows: &[&[f64]]) -> CMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    Mat::from_fn(n, m, |i, j| c64::new(rows[i][j], 0.0))
}

/// Diagonal matrix with real entries.
pub fn diag_real(d: &[f64]) -> CMatrix {
    Mat::from_fn(
        d.len(),
        d.len(),
        |i, j| {
            if i == j {
                c64::new(d[i], 0.0)
            } else {
                ZERO
            }
        },
    )
}

pub fn adjoint(a: &CMatrix) -> CMatrix {
    Mat::from_fn(a.ncols(), a.nrows(), |i, j| a[(j, i)].conj())
}

pub fn conj(a: &CMatrix) -> CMatrix {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)].conj())
}

pub fn scale(a: &CMatrix, s: c64) -> CMatrix {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * s)
}

pub fn scale_real(a: &CMatrix, s: f64) -> CMatrix {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * s)
}

/// Frobenius norm.
pub fn frobenius(a: &CMatrix) -> f64 {
    let mut acc = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            acc += a[(i, j)].norm_sqr();
        }
    }
    acc.sqrt()
}

pub fn trace(a: &CMatrix) -> c64 {
    (0..a.nrows().min(a.ncols())).fold(ZERO, |acc, i| acc + a[(i, i)])
}

/// `Tr(A B)`, the Hilbert-Schmidt pairing used throughout.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> c64 {
    let mut acc = ZERO;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn is_finite(a: &CMatrix) -> bool {
    (0..a.ncols()).all(|j| (0..a.nrows()).all(|i| a[(i, j)].re.is_finite() && a[(i, j)].im.is_finite()))
}

/// `‖A − A†‖_F`.
pub fn hermiticity_defect(a: &CMatrix) -> f64 {
    if a.nrows() != a.ncols() {
        return f64::INFINITY;
    }
    let mut acc = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += (a[(i, j)] - a[(j, i)].conj()).norm_sqr();
        }
    }
    acc.sqrt()
}

pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5)
}

/// Horizontal concatenation `[A | B]`.
pub fn hcat(a: &CMatrix, b: &CMatrix) -> CMatrix {
    debug_assert_eq!(a.nrows(), b.nrows());
    let ca = a.ncols();
    Mat::from_fn(a.nrows(), ca + b.ncols(), |i, j| {
        if j < ca {
            a[(i, j)]
        } else {
            b[(i, j - ca)]
        }
    })
}

/// Vertical stack of blocks with a common column count.
pub fn vstack(blocks: &[CMatrix], cols: usize) -> CMatrix {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = zeros(rows, cols);
    let mut r0 = 0;
    for b in blocks {
        debug_assert_eq!(b.ncols(), cols);
        for i in 0..b.nrows() {
            for j in 0..cols {
                out[(r0 + i, j)] = b[(i, j)];
            }
        }
        r0 += b.nrows();
    }
    out
}

pub fn columns(a: &CMatrix, start: usize, count: usize) -> CMatrix {
    Mat::from_fn(a.nrows(), count, |i, j| a[(i, start + j)])
}

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (p, q) = (b.nrows(), b.ncols());
    Mat::from_fn(a.nrows() * p, a.ncols() * q, |i, j| {
        a[(i / p, j / q)] * b[(i % p, j % q)]
    })
}

/// Column-stacking vectorization: entry `(i, j)` goes to index `i + j·rows`.
pub fn vectorize(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    Mat::from_fn(n * a.ncols(), 1, |k, _| a[(k % n, k / n)])
}

/// Inverse of [`vectorize`] for a square `n×n` matrix.
pub fn unvectorize(v: &CMatrix, n: usize) -> CMatrix {
    debug_assert_eq!(v.nrows(), n * n);
    Mat::from_fn(n, n, |i, j| v[(i + j * n, 0)])
}

/// Integer matrix power by repeated squaring.
pub fn matrix_power(a: &CMatrix, p: usize) -> CMatrix {
    let mut result = identity(a.nrows());
    let mut base = a.clone();
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    result
}

/// Solves `A X = B` by LU with partial pivoting.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare(a.nrows(), a.ncols()));
    }
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            actual: b.nrows(),
        });
    }
    let x = a.partial_piv_lu().solve(b);
    if !is_finite(&x) {
        return Err(Error::Decomposition("singular linear system".into()));
    }
    Ok(x)
}

fn singular_values_of(a: &CMatrix) -> Result<Vec<f64>> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(Vec::new());
    }
    let s = a
        .singular_values()
        .map_err(|e| Error::Decomposition(format!("SVD: {e:?}")))?;
    Ok(s)
}

/// Eigen-decomposition of the Hermitian part of `a`, eigenvalues ascending.
pub fn hermitian_eigen(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::NotSquare(n, a.ncols()));
    }
    if n == 0 {
        return Ok((Vec::new(), zeros(0, 0)));
    }
    let h = hermitian_part(a);
    let evd = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Decomposition(format!("Hermitian eigensolver: {e:?}")))?;
    let vals = evd.S().column_vector().iter().map(|z| z.re).collect();
    Ok((vals, evd.U().to_owned()))
}

/// Smallest eigenvalue of the Hermitian part of `a` (`+∞` for an empty matrix).
pub fn min_eigenvalue(a: &CMatrix) -> Result<f64> {
    let (vals, _) = hermitian_eigen(a)?;
    Ok(vals.first().copied().unwrap_or(f64::INFINITY))
}

/// Orthonormal basis of a subspace of `C^d`, stored as a `d×m` isometry.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    basis: CMatrix,
}

impl SubspaceBasis {
    /// Wraps a matrix whose columns must already be orthonormal.
    pub fn new(basis: CMatrix, tol: &Tolerances) -> Result<Self> {
        if !is_finite(&basis) {
            return Err(Error::NonFinite);
        }
        if basis.ncols() > basis.nrows() {
            return Err(Error::NotOrthonormal(f64::INFINITY));
        }
        let gram = &adjoint(&basis) * &basis;
        let defect = frobenius(&(&gram - &identity(basis.ncols())));
        if defect > tol.orth {
            return Err(Error::NotOrthonormal(defect));
        }
        Ok(Self { basis })
    }

    /// Orthonormalizes arbitrary spanning vectors (the columns of `vectors`).
    pub fn span_of(vectors: &CMatrix, tol: &Tolerances) -> Result<Self> {
        range(vectors, tol)
    }

    pub fn zero(dim: usize) -> Self {
        Self { basis: zeros(dim, 0) }
    }

    pub fn full(dim: usize) -> Self {
        Self { basis: identity(dim) }
    }

    /// Span of computational basis vectors, 0-based.
    pub fn from_indices(dim: usize, indices: &[usize]) -> Result<Self> {
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if let Some(&bad) = sorted.iter().find(|&&i| i >= dim) {
            return Err(Error::IndexOutOfRange { index: bad, dim });
        }
        let basis = Mat::from_fn(dim, sorted.len(), |i, j| if sorted[j] == i { ONE } else { ZERO });
        Ok(Self { basis })
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim()
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn into_basis(self) -> CMatrix {
        self.basis
    }

    /// Orthogonal projector `V V†`.
    pub fn projector(&self) -> CMatrix {
        &self.basis * &adjoint(&self.basis)
    }

    /// `‖P_U − P_V‖_F`; infinite when the ambient dimensions differ.
    pub fn distance(&self, other: &SubspaceBasis) -> f64 {
        if self.ambient_dim() != other.ambient_dim() {
            return f64::INFINITY;
        }
        frobenius(&(&self.projector() - &other.projector()))
    }

    /// Projector equality within `τ_orth·d`.
    pub fn same_as(&self, other: &SubspaceBasis, tol: &Tolerances) -> bool {
        self.distance(other) <= tol.orth * self.ambient_dim().max(1) as f64
    }

    /// Whether `other ⊆ self`.
    pub fn contains(&self, other: &SubspaceBasis, tol: &Tolerances) -> bool {
        if self.ambient_dim() != other.ambient_dim() {
            return false;
        }
        let p = self.projector();
        let leak = &other.basis - &(&p * &other.basis);
        frobenius(&leak) <= tol.orth * self.ambient_dim().max(1) as f64
    }

    /// Computational-basis indices (0-based) when the subspace is
    /// axis-aligned within tolerance.
    pub fn axis_indices(&self, tol: &Tolerances) -> Option<Vec<usize>> {
        let p = self.projector();
        let d = self.ambient_dim();
        let idx: Vec<usize> = (0..d).filter(|&i| p[(i, i)].re > 0.5).collect();
        let mut defect = 0.0;
        for i in 0..d {
            for j in 0..d {
                let target = if i == j && idx.binary_search(&i).is_ok() {
                    1.0
                } else {
                    0.0
                };
                defect += (p[(i, j)] - c64::new(target, 0.0)).norm_sqr();
            }
        }
        (defect.sqrt() <= tol.orth * d.max(1) as f64).then_some(idx)
    }

    /// Embeds a subspace of `C^m` (expressed in this basis, `m = self.dim()`)
    /// into the ambient space.
    pub fn lift(&self, local: &SubspaceBasis) -> SubspaceBasis {
        debug_assert_eq!(local.ambient_dim(), self.dim());
        SubspaceBasis {
            basis: &self.basis * &local.basis,
        }
    }

    /// Coordinates of `other` in this basis: `V_self† V_other`.
    pub fn coordinates_of(&self, other: &SubspaceBasis) -> CMatrix {
        &adjoint(&self.basis) * &other.basis
    }

    /// Rotates each column so that its first component above `1e-12` in
    /// magnitude is real and positive.
    pub fn with_canonical_phases(mut self) -> Self {
        for j in 0..self.basis.ncols() {
            let pivot = (0..self.basis.nrows())
                .map(|i| self.basis[(i, j)])
                .find(|z| z.norm() > 1e-12);
            if let Some(z) = pivot {
                let phase = z.conj() / z.norm();
                for i in 0..self.basis.nrows() {
                    self.basis[(i, j)] *= phase;
                }
            }
        }
        self
    }
}

/// Numerical null space: right singular vectors with singular value at or
/// below the rank cutoff.
pub fn kernel(a: &CMatrix, tol: &Tolerances) -> Result<SubspaceBasis> {
    let (m, n) = (a.nrows(), a.ncols());
    if !is_finite(a) {
        return Err(Error::NonFinite);
    }
    if n == 0 {
        return Ok(SubspaceBasis::zero(0));
    }
    if m == 0 {
        return Ok(SubspaceBasis::full(n));
    }
    let svd = a.svd().map_err(|e| Error::Decomposition(format!("SVD: {e:?}")))?;
    let s: Vec<f64> = svd.S().column_vector().iter().map(|z| z.re).collect();
    let cutoff = tol.rank_cutoff(s.first().copied().unwrap_or(0.0));
    let rank = s.iter().filter(|&&x| x > cutoff).count();
    let v = svd.V();
    let basis = Mat::from_fn(n, n - rank, |i, j| v[(i, rank + j)]);
    Ok(SubspaceBasis { basis })
}

/// Orthonormal basis of the column space at the same cutoff as [`kernel`].
/// For Hermitian `a` this is the support.
pub fn range(a: &CMatrix, tol: &Tolerances) -> Result<SubspaceBasis> {
    let (m, n) = (a.nrows(), a.ncols());
    if !is_finite(a) {
        return Err(Error::NonFinite);
    }
    if m == 0 || n == 0 {
        return Ok(SubspaceBasis::zero(m));
    }
    let svd = a.svd().map_err(|e| Error::Decomposition(format!("SVD: {e:?}")))?;
    let s: Vec<f64> = svd.S().column_vector().iter().map(|z| z.re).collect();
    let cutoff = tol.rank_cutoff(s.first().copied().unwrap_or(0.0));
    let rank = s.iter().filter(|&&x| x > cutoff).count();
    let u = svd.U();
    let basis = Mat::from_fn(m, rank, |i, j| u[(i, j)]);
    Ok(SubspaceBasis { basis })
}

/// Numerical rank at the shared cutoff.
pub fn rank(a: &CMatrix, tol: &Tolerances) -> Result<usize> {
    let s = singular_values_of(a)?;
    let cutoff = tol.rank_cutoff(s.first().copied().unwrap_or(0.0));
    Ok(s.iter().filter(|&&x| x > cutoff).count())
}

/// `U + V`.
pub fn subspace_sum(u: &SubspaceBasis, v: &SubspaceBasis, tol: &Tolerances) -> Result<SubspaceBasis> {
    if u.ambient_dim() != v.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: u.ambient_dim(),
            actual: v.ambient_dim(),
        });
    }
    if v.is_zero() {
        return Ok(u.clone());
    }
    if u.is_zero() {
        return Ok(v.clone());
    }
    range(&hcat(u.basis(), v.basis()), tol)
}

/// `U^⊥`.
pub fn orth_complement(u: &SubspaceBasis, tol: &Tolerances) -> Result<SubspaceBasis> {
    let d = u.ambient_dim();
    if u.is_zero() {
        return Ok(SubspaceBasis::full(d));
    }
    if u.is_full() {
        return Ok(SubspaceBasis::zero(d));
    }
    let k = kernel(&adjoint(u.basis()), tol)?;
    // The complement has exactly d − m dimensions; the cutoff only matters if
    // the input was not an isometry.
    if k.dim() != d - u.dim() {
        return Err(Error::NotOrthonormal(f64::NAN));
    }
    Ok(k)
}

/// Complement of `inner` inside `outer` (`inner ⊆ outer` assumed).
pub fn relative_complement(
    outer: &SubspaceBasis,
    inner: &SubspaceBasis,
    tol: &Tolerances,
) -> Result<SubspaceBasis> {
    if inner.is_zero() {
        return Ok(outer.clone());
    }
    let coords = adjoint(&outer.coordinates_of(inner));
    let local = kernel(&coords, tol)?;
    Ok(outer.lift(&local))
}

/// Spectrum of a square matrix, keeping the matrix for generalized
/// eigenspace queries.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub eigenvalues: Vec<c64>,
    pub spectral_radius: f64,
    matrix: CMatrix,
}

/// Eigenvalues (with multiplicity) and spectral radius of `a`.
pub fn eig(a: &CMatrix) -> Result<SpectralData> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare(a.nrows(), a.ncols()));
    }
    if !is_finite(a) {
        return Err(Error::NonFinite);
    }
    let eigenvalues = if a.nrows() == 0 {
        Vec::new()
    } else {
        a.eigenvalues()
            .map_err(|e| Error::Decomposition(format!("eigensolver: {e:?}")))?
    };
    let spectral_radius = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(SpectralData {
        eigenvalues,
        spectral_radius,
        matrix: a.clone(),
    })
}

impl SpectralData {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `ker((A − σI)^p)`, with the power formed explicitly.
    pub fn kernel_of_power(&self, sigma: c64, p: usize, tol: &Tolerances) -> Result<SubspaceBasis> {
        let n = self.matrix.nrows();
        let shifted = &self.matrix - &scale(&identity(n), sigma);
        kernel(&matrix_power(&shifted, p), tol)
    }

    /// Generalized eigenspace of `σ`: `ker((A − σI)^p)` for the smallest `p`
    /// at which the kernel stops growing, capped at `p_max`. Returns the
    /// subspace and the exponent used.
    pub fn generalized_eigenspace(
        &self,
        sigma: c64,
        p_max: usize,
        tol: &Tolerances,
    ) -> Result<(SubspaceBasis, usize)> {
        let n = self.matrix.nrows();
        let shifted = &self.matrix - &scale(&identity(n), sigma);
        let mut power = shifted.clone();
        let mut current = kernel(&power, tol)?;
        let mut p = 1;
        while p < p_max && current.dim() < n {
            let next_power = &power * &shifted;
            let next = kernel(&next_power, tol)?;
            if next.dim() <= current.dim() {
                break;
            }
            power = next_power;
            current = next;
            p += 1;
        }
        Ok((current, p))
    }

    /// Number of eigenvalues within `radius` of `z`.
    pub fn multiplicity_near(&self, z: c64, radius: f64) -> usize {
        self.eigenvalues
            .iter()
            .filter(|e| (**e - z).norm() <= radius)
            .count()
    }
}

/// Nearest positive-semidefinite matrix in Frobenius norm.
pub fn psd_cone_project(a: &CMatrix, tol: &Tolerances) -> Result<CMatrix> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare(a.nrows(), a.ncols()));
    }
    let defect = hermiticity_defect(a);
    if defect > tol.herm * frobenius(a).max(1.0) {
        return Err(Error::NotHermitian(defect));
    }
    let (vals, vecs) = hermitian_eigen(a)?;
    let clamped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
    Ok(&(&vecs * &diag_real(&clamped)) * &adjoint(&vecs))
}
