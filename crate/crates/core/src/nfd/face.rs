// SPDX-License-Identifier: Apache-2.0

//! Support of the positive part of the peripheral generalized eigenspace of
//! a reduced map.
//!
//! Hermitian `r×r` matrices are handled in real coordinates (diagonal
//! entries, then `√2·Re` and `√2·Im` of the strict upper triangle), which
//! makes the Hilbert-Schmidt product the Euclidean one.

use faer::Mat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::channel::Superoperator;
use crate::linalg::{self, c64, frobenius, hermitian_eigen, vectorize, CMatrix, SpectralData, SubspaceBasis};
use crate::{Error, Result, Tolerances};

pub(crate) const CESARO_TERMS: usize = 256;
pub(crate) const RANDOM_SEEDS: usize = 15;
const SEED: u64 = 0x6e66_645f_6661_6365;
pub(crate) const DYKSTRA_MAX_ITER: usize = 5000;
pub(crate) const DYKSTRA_STEP_TOL: f64 = 1e-12;
const SNAP_TOL: f64 = 1e-8;

/// Slowest face of a reduced map: its spectral radius and the support of the
/// positive elements of the corresponding generalized eigenspace, in the
/// reduced coordinates.
#[derive(Debug, Clone)]
pub struct PeripheralFace {
    pub sigma: f64,
    pub support: SubspaceBasis,
    /// Dimension of the generalized `σ`-eigenspace.
    pub eigenspace_dim: usize,
    /// Exponent `p` with `ker((T_R − σI)^p)` stabilized.
    pub index: usize,
    /// How many of the Dykstra starts produced an accepted positive element.
    pub accepted_seeds: usize,
}

fn herm_to_real(x: &CMatrix) -> Vec<f64> {
    let r = x.nrows();
    let mut v = Vec::with_capacity(r * r);
    for i in 0..r {
        v.push(x[(i, i)].re);
    }
    let s2 = std::f64::consts::SQRT_2;
    for i in 0..r {
        for j in i + 1..r {
            v.push(s2 * x[(i, j)].re);
            v.push(s2 * x[(i, j)].im);
        }
    }
    v
}

fn real_to_herm(v: &[f64], r: usize) -> CMatrix {
    let mut x = linalg::zeros(r, r);
    for i in 0..r {
        x[(i, i)] = c64::new(v[i], 0.0);
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut k = r;
    for i in 0..r {
        for j in i + 1..r {
            let z = c64::new(h * v[k], h * v[k + 1]);
            x[(i, j)] = z;
            x[(j, i)] = z.conj();
            k += 2;
        }
    }
    x
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// The affine set `{X ∈ span{B_j} : Tr X = 1}` for an orthonormal Hermitian
/// basis `B_j`.
struct TraceOneSlice {
    basis: Vec<Vec<f64>>,
    traces: Vec<f64>,
    traces_norm2: f64,
}

impl TraceOneSlice {
    fn project(&self, x: &[f64]) -> Vec<f64> {
        let mut c: Vec<f64> = self
            .basis
            .iter()
            .map(|b| b.iter().zip(x).map(|(p, q)| p * q).sum())
            .collect();
        let tc: f64 = c.iter().zip(&self.traces).map(|(a, t)| a * t).sum();
        let shift = (1.0 - tc) / self.traces_norm2;
        for (cj, tj) in c.iter_mut().zip(&self.traces) {
            *cj += shift * tj;
        }
        let mut out = vec![0.0; x.len()];
        for (cj, b) in c.iter().zip(&self.basis) {
            for (o, bi) in out.iter_mut().zip(b) {
                *o += cj * bi;
            }
        }
        out
    }
}

fn psd_project_real(x: &[f64], r: usize) -> Result<Vec<f64>> {
    let (vals, vecs) = hermitian_eigen(&real_to_herm(x, r))?;
    let clamped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
    let p = &(&vecs * &linalg::diag_real(&clamped)) * &linalg::adjoint(&vecs);
    Ok(herm_to_real(&p))
}

/// Dykstra's alternating projections between the trace-one slice and the PSD
/// cone. Returns the final point of the slice.
fn dykstra(slice: &TraceOneSlice, seed: &[f64], r: usize) -> Result<Vec<f64>> {
    let mut x = seed.to_vec();
    let mut q = vec![0.0; x.len()];
    for _ in 0..DYKSTRA_MAX_ITER {
        // Corrections are only needed for the cone; the slice is affine.
        let y = slice.project(&x);
        let yq: Vec<f64> = y.iter().zip(&q).map(|(a, b)| a + b).collect();
        let next = psd_project_real(&yq, r)?;
        q = yq.iter().zip(&next).map(|(a, b)| a - b).collect();
        let step = dist(&next, &x);
        x = next;
        if step < DYKSTRA_STEP_TOL {
            break;
        }
    }
    Ok(slice.project(&x))
}

/// Orthonormal Hermitian basis (real coordinates) of a subspace of operators
/// that is closed under the adjoint.
fn hermitian_basis(g: &SubspaceBasis, r: usize, tol: &Tolerances) -> Result<Vec<Vec<f64>>> {
    let n = r * r;
    let k = g.dim();
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(2 * k);
    for j in 0..k {
        let x = CMatrix::from_fn(r, r, |a, b| g.basis()[(a + b * r, j)]);
        let xh = linalg::adjoint(&x);
        let herm = linalg::scale_real(&(&x + &xh), 0.5);
        let anti = linalg::scale(&(&x - &xh), c64::new(0.0, -0.5));
        cols.push(herm_to_real(&herm));
        cols.push(herm_to_real(&anti));
    }
    let m = Mat::<f64>::from_fn(n, cols.len(), |i, j| cols[j][i]);
    let svd = m.svd().map_err(|e| Error::Decomposition(format!("SVD: {e:?}")))?;
    let s: Vec<f64> = svd.S().column_vector().iter().copied().collect();
    let cutoff = tol.rank_cutoff(s.first().copied().unwrap_or(0.0));
    let rank = s.iter().filter(|&&x| x > cutoff).count();
    if rank != k {
        log::debug!("Hermitian span has rank {rank}, eigenspace dimension {k}");
    }
    let u = svd.U();
    Ok((0..rank).map(|j| (0..n).map(|i| u[(i, j)]).collect()).collect())
}

/// Spectral projection of `x` onto `ker((A − σI)^p)` along
/// `range((A − σI)^p)`; `None` when the split is numerically singular.
fn spectral_projection(
    spec: &SpectralData,
    g: &SubspaceBasis,
    sigma: f64,
    p: usize,
    x: &CMatrix,
    tol: &Tolerances,
) -> Result<Option<CMatrix>> {
    let n = spec.matrix().nrows();
    let shifted = spec.matrix() - &linalg::scale_real(&linalg::identity(n), sigma);
    let w = linalg::range(&linalg::matrix_power(&shifted, p), tol)?;
    if g.dim() + w.dim() != n {
        return Ok(None);
    }
    let v = linalg::hcat(g.basis(), w.basis());
    match linalg::solve(&v, x) {
        Ok(c) => {
            let coeffs = CMatrix::from_fn(g.dim(), 1, |i, _| c[(i, 0)]);
            Ok(Some(g.basis() * &coeffs))
        }
        Err(_) => Ok(None),
    }
}

/// `(1/N) Σ_{n<N} σ^{-n} T_R^n(I/r)`.
fn cesaro_mean(t_r: &Superoperator, sigma: f64) -> CMatrix {
    let r = t_r.in_dim;
    let mut term = vectorize(&linalg::scale_real(&linalg::identity(r), 1.0 / r as f64));
    if sigma <= f64::EPSILON {
        return term;
    }
    let mut acc = term.clone();
    for _ in 1..CESARO_TERMS {
        term = linalg::scale_real(&(&t_r.matrix * &term), 1.0 / sigma);
        acc = &acc + &term;
    }
    linalg::scale_real(&acc, 1.0 / CESARO_TERMS as f64)
}

/// Spectral radius `σ` of `T_R` and `supp(ker((T_R − σI)^p) ∩ PSD)`.
pub fn peripheral_face_support(t_r: &Superoperator, tol: &Tolerances) -> Result<PeripheralFace> {
    let r = t_r.in_dim;
    if r == 0 || t_r.out_dim != r {
        return Err(Error::InvalidParameters(
            "reduced map must act on a non-zero space".into(),
        ));
    }
    let n = r * r;
    let spec = linalg::eig(&t_r.matrix)?;
    let radius = spec.spectral_radius;
    let nearest = spec
        .eigenvalues
        .iter()
        .copied()
        .min_by(|a, b| {
            (*a - c64::new(radius, 0.0))
                .norm()
                .total_cmp(&(*b - c64::new(radius, 0.0)).norm())
        })
        .expect("non-empty spectrum");
    if (nearest - c64::new(radius, 0.0)).norm() > SNAP_TOL {
        return Err(Error::Degenerate(format!(
            "spectral radius {radius:.6e} is not an eigenvalue (nearest {nearest}); spectrum {:?}",
            spec.eigenvalues
        )));
    }
    let sigma = nearest.re.max(0.0);

    let (g, index) = spec.generalized_eigenspace(c64::new(sigma, 0.0), n, tol)?;
    if g.is_zero() {
        return Err(Error::Degenerate(format!(
            "empty generalized eigenspace at sigma = {sigma:.6e}"
        )));
    }
    let basis = hermitian_basis(&g, r, tol)?;
    let traces: Vec<f64> = basis.iter().map(|b| b[..r].iter().sum()).collect();
    let traces_norm2: f64 = traces.iter().map(|t| t * t).sum();
    if traces_norm2.sqrt() <= tol.orth {
        return Err(Error::Degenerate(format!(
            "generalized eigenspace at sigma = {sigma:.6e} (dim {}) is traceless",
            g.dim()
        )));
    }
    let slice = TraceOneSlice {
        basis,
        traces,
        traces_norm2,
    };

    let cesaro = cesaro_mean(t_r, sigma);
    let cesaro = spectral_projection(&spec, &g, sigma, index, &cesaro, tol)?.unwrap_or(cesaro);
    let mut seeds = vec![herm_to_real(&linalg::hermitian_part(&linalg::unvectorize(
        &cesaro, r,
    )))];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..RANDOM_SEEDS {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        seeds.push(v);
    }

    let mut support = SubspaceBasis::zero(r);
    let mut accepted = 0;
    let mut best_rejected = f64::NEG_INFINITY;
    for seed in &seeds {
        let scale = norm(seed);
        let start: Vec<f64> = if scale > 0.0 {
            seed.iter().map(|x| x / scale).collect()
        } else {
            seed.clone()
        };
        let e = real_to_herm(&dykstra(&slice, &start, r)?, r);
        let (vals, _) = hermitian_eigen(&e)?;
        let min = vals.first().copied().unwrap_or(0.0);
        if min >= -tol.rank {
            accepted += 1;
            let psd = linalg::psd_cone_project(&e, tol)?;
            support = linalg::subspace_sum(&support, &linalg::range(&psd, tol)?, tol)?;
        } else {
            best_rejected = best_rejected.max(min);
        }
    }
    if accepted == 0 || support.is_zero() {
        return Err(Error::Degenerate(format!(
            "no positive element found in the generalized eigenspace (sigma = {sigma:.6e}, \
             dim {}, best min eigenvalue {best_rejected:.3e})",
            g.dim()
        )));
    }

    let pt = support.projector();
    let image = t_r.apply(&pt)?;
    let perp = &linalg::identity(r) - &pt;
    let leak = frobenius(&(&(&perp * &image) * &perp));
    if leak > tol.inv * frobenius(&image).max(1.0) {
        return Err(Error::Degenerate(format!(
            "extracted face support is not invariant under the reduced map (leak {leak:.3e})"
        )));
    }

    Ok(PeripheralFace {
        sigma,
        support,
        eigenspace_dim: g.dim(),
        index,
        accepted_seeds: accepted,
    })
}
