// SPDX-License-Identifier: Apache-2.0

//! Kraus maps, their duals and superoperators, block reductions along a
//! Hilbert-space split, supports and invariance tests.

use crate::linalg::{
    self, adjoint, conj, frobenius, hermitian_eigen, hermiticity_defect, identity, kron, range, subspace_sum,
    trace, unvectorize, vectorize, zeros, CMatrix, SubspaceBasis, ONE,
};
use crate::{Error, Result, Tolerances};

/// Completely positive map `T(ρ) = Σ_k M_k ρ M_k†` on `d×d` matrices.
#[derive(Debug, Clone)]
pub struct KrausMap {
    dim: usize,
    kraus: Vec<CMatrix>,
}

/// Outcome of [`KrausMap::validate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    pub is_tp: bool,
    /// `‖Σ M_k†M_k − I‖_F`.
    pub tp_residual: f64,
    pub dims_ok: bool,
    pub dim: usize,
    pub num_kraus: usize,
}

/// Matrix of a linear map between operator spaces, acting on column-stacked
/// vectorizations: `vec(out) = matrix · vec(in)`.
#[derive(Debug, Clone)]
pub struct Superoperator {
    pub in_dim: usize,
    pub out_dim: usize,
    pub matrix: CMatrix,
}

impl Superoperator {
    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        check_square(x, self.in_dim)?;
        Ok(unvectorize(&(&self.matrix * &vectorize(x)), self.out_dim))
    }

    /// Adjoint with respect to the Hilbert-Schmidt product.
    pub fn adjoint(&self) -> Superoperator {
        Superoperator {
            in_dim: self.out_dim,
            out_dim: self.in_dim,
            matrix: adjoint(&self.matrix),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.in_dim == 0 || self.out_dim == 0
    }
}

/// The four blocks of one Kraus operator along `H = H_S ⊕ H_R`.
#[derive(Debug, Clone)]
pub struct KrausBlocks {
    /// `V_S† M V_S`
    pub s: CMatrix,
    /// `V_S† M V_R`
    pub p: CMatrix,
    /// `V_R† M V_S`
    pub q: CMatrix,
    /// `V_R† M V_R`
    pub r: CMatrix,
}

/// A Kraus map written in the rotated basis `[V_S | V_R]`.
#[derive(Debug, Clone)]
pub struct BlockDecomposedMap {
    pub base: KrausMap,
    pub hs: SubspaceBasis,
    pub hr: SubspaceBasis,
    pub blocks: Vec<KrausBlocks>,
}

impl BlockDecomposedMap {
    /// Reassembles `V† M_k V` from the four blocks.
    pub fn rotated(&self, k: usize) -> CMatrix {
        let b = &self.blocks[k];
        let m = self.hs.dim();
        let d = self.base.dim;
        CMatrix::from_fn(d, d, |i, j| match (i < m, j < m) {
            (true, true) => b.s[(i, j)],
            (true, false) => b.p[(i, j - m)],
            (false, true) => b.q[(i - m, j)],
            (false, false) => b.r[(i - m, j - m)],
        })
    }

    /// `max_k ‖M_{k,Q}‖_F`.
    pub fn max_q_norm(&self) -> f64 {
        self.blocks.iter().map(|b| frobenius(&b.q)).fold(0.0, f64::max)
    }
}

/// Reduced maps of a split `H = H_S ⊕ H_R`, as superoperator matrices over
/// the reduced operator spaces.
#[derive(Debug, Clone)]
pub struct ReducedMaps {
    pub hs: SubspaceBasis,
    pub hr: SubspaceBasis,
    /// `A_S ↦ Σ M_S A_S M_S†`, `m²×m²`.
    pub t_s: Superoperator,
    /// `A_R ↦ Σ M_R A_R M_R†`, `r²×r²`.
    pub t_r: Superoperator,
    /// `A_R ↦ Σ M_P A_R M_P†`, `m²×r²`.
    pub t_sr: Superoperator,
}

/// Result of [`KrausMap::is_invariant`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvarianceReport {
    pub invariant: bool,
    /// `max_k ‖M_{k,Q}‖_F`.
    pub residual: f64,
    /// `max_k ‖M_k‖_F`, the scale the residual is compared against.
    pub scale: f64,
    /// `sqrt(Tr(Π_R T(Π_S)))`, the support-criterion leak.
    pub support_leak: f64,
}

/// Supports of successive dual iterates `T*ⁿ(Π_S)`.
#[derive(Debug, Clone)]
pub struct DualSupportSequence {
    /// `supports[n] = supp(T*ⁿ(Π_S))`; when `stabilized` the last two agree.
    pub supports: Vec<SubspaceBasis>,
    pub stabilized: bool,
}

impl DualSupportSequence {
    pub fn last(&self) -> &SubspaceBasis {
        self.supports.last().expect("sequence always holds H_S")
    }

    pub fn covers_space(&self) -> bool {
        self.last().is_full()
    }

    /// Number of steps that strictly enlarged the support.
    pub fn growth_steps(&self) -> usize {
        self.supports
            .windows(2)
            .filter(|w| w[1].dim() > w[0].dim())
            .count()
    }
}

fn check_square(x: &CMatrix, dim: usize) -> Result<()> {
    if x.nrows() != dim || x.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: if x.nrows() != dim { x.nrows() } else { x.ncols() },
        });
    }
    Ok(())
}

fn check_subspace(h: &SubspaceBasis, dim: usize) -> Result<()> {
    if h.ambient_dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: h.ambient_dim(),
        });
    }
    Ok(())
}

impl KrausMap {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or(Error::EmptyKraus)?;
        let dim = first.nrows();
        for (index, m) in kraus.iter().enumerate() {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::RaggedKraus {
                    index,
                    rows: m.nrows(),
                    cols: m.ncols(),
                    dim,
                });
            }
            if !linalg::is_finite(m) {
                return Err(Error::NonFinite);
            }
        }
        Ok(Self { dim, kraus })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_kraus(&self) -> usize {
        self.kraus.len()
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// `max_k ‖M_k‖_F`.
    pub fn scale(&self) -> f64 {
        self.kraus.iter().map(frobenius).fold(0.0, f64::max)
    }

    pub fn validate(&self, tol: &Tolerances) -> ValidationReport {
        let mut gram = zeros(self.dim, self.dim);
        for m in &self.kraus {
            gram = &gram + &(&adjoint(m) * m);
        }
        let tp_residual = frobenius(&(&gram - &identity(self.dim)));
        ValidationReport {
            is_tp: tp_residual <= tol.tp(self.dim),
            tp_residual,
            dims_ok: true,
            dim: self.dim,
            num_kraus: self.kraus.len(),
        }
    }

    /// `T(X) = Σ_k M_k X M_k†`.
    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        check_square(x, self.dim)?;
        let mut out = zeros(self.dim, self.dim);
        for m in &self.kraus {
            out = &out + &(&(m * x) * &adjoint(m));
        }
        Ok(out)
    }

    /// `T*(X) = Σ_k M_k† X M_k`.
    pub fn apply_dual(&self, x: &CMatrix) -> Result<CMatrix> {
        check_square(x, self.dim)?;
        let mut out = zeros(self.dim, self.dim);
        for m in &self.kraus {
            out = &out + &(&(&adjoint(m) * x) * m);
        }
        Ok(out)
    }

    /// `Σ_k conj(M_k) ⊗ M_k`.
    pub fn superoperator(&self) -> Superoperator {
        let n = self.dim * self.dim;
        let mut matrix = zeros(n, n);
        for m in &self.kraus {
            matrix = &matrix + &kron(&conj(m), m);
        }
        Superoperator {
            in_dim: self.dim,
            out_dim: self.dim,
            matrix,
        }
    }

    /// Another OSR of the same map: `M'_k = Σ_j U_{kj} M_j` for a `K×K`
    /// unitary `U`.
    pub fn remix(&self, u: &CMatrix) -> Result<KrausMap> {
        let k = self.kraus.len();
        check_square(u, k)?;
        let kraus = (0..k)
            .map(|i| {
                let mut acc = zeros(self.dim, self.dim);
                for (j, m) in self.kraus.iter().enumerate() {
                    acc = &acc + &linalg::scale(m, u[(i, j)]);
                }
                acc
            })
            .collect();
        KrausMap::new(kraus)
    }

    pub fn block_decompose(&self, hs: &SubspaceBasis, tol: &Tolerances) -> Result<BlockDecomposedMap> {
        check_subspace(hs, self.dim)?;
        let hr = linalg::orth_complement(hs, tol)?;
        let (vs, vr) = (hs.basis(), hr.basis());
        let (vs_h, vr_h) = (adjoint(vs), adjoint(vr));
        let blocks = self
            .kraus
            .iter()
            .map(|m| {
                let mvs = m * vs;
                let mvr = m * vr;
                KrausBlocks {
                    s: &vs_h * &mvs,
                    p: &vs_h * &mvr,
                    q: &vr_h * &mvs,
                    r: &vr_h * &mvr,
                }
            })
            .collect();
        Ok(BlockDecomposedMap {
            base: self.clone(),
            hs: hs.clone(),
            hr,
            blocks,
        })
    }

    /// Builds `T_S`, `T_R`, `T_SR` from the OSR blocks and cross-checks `T_SR`
    /// against the OSR-free expression `Π_S T(A_R) Π_S`.
    pub fn reduced_maps(&self, hs: &SubspaceBasis, tol: &Tolerances) -> Result<ReducedMaps> {
        let bd = self.block_decompose(hs, tol)?;
        let (m, r) = (bd.hs.dim(), bd.hr.dim());
        let mut t_s = zeros(m * m, m * m);
        let mut t_r = zeros(r * r, r * r);
        let mut t_sr = zeros(m * m, r * r);
        for b in &bd.blocks {
            t_s = &t_s + &kron(&conj(&b.s), &b.s);
            t_r = &t_r + &kron(&conj(&b.r), &b.r);
            t_sr = &t_sr + &kron(&conj(&b.p), &b.p);
        }

        let (vs, vr) = (bd.hs.basis(), bd.hr.basis());
        let vs_h = adjoint(vs);
        let vr_h = adjoint(vr);
        let mut worst: f64 = 0.0;
        for col in 0..r * r {
            let mut e = zeros(r, r);
            e[(col % r.max(1), col / r.max(1))] = ONE;
            let lifted = &(vr * &e) * &vr_h;
            let image = &(&vs_h * &self.apply(&lifted)?) * vs;
            let direct = vectorize(&image);
            for row in 0..m * m {
                worst = worst.max((direct[(row, 0)] - t_sr[(row, col)]).norm());
            }
        }
        let ref_scale = frobenius(&t_sr).max(1.0);
        if worst > 1e-10 * ref_scale {
            return Err(Error::Inconsistent(format!(
                "T_SR routes disagree by {worst:.3e}"
            )));
        }

        Ok(ReducedMaps {
            t_s: Superoperator {
                in_dim: m,
                out_dim: m,
                matrix: t_s,
            },
            t_r: Superoperator {
                in_dim: r,
                out_dim: r,
                matrix: t_r,
            },
            t_sr: Superoperator {
                in_dim: r,
                out_dim: m,
                matrix: t_sr,
            },
            hs: bd.hs,
            hr: bd.hr,
        })
    }

    /// Block criterion `max_k ‖M_{k,Q}‖_F ≤ τ_inv·max_k ‖M_k‖_F`, cross-checked
    /// against the support of `T(Π_S)`.
    pub fn is_invariant(&self, hs: &SubspaceBasis, tol: &Tolerances) -> Result<InvarianceReport> {
        let bd = self.block_decompose(hs, tol)?;
        let residual = bd.max_q_norm();
        let scale = self.scale().max(f64::MIN_POSITIVE);
        let threshold = tol.inv * scale;
        let invariant = residual <= threshold;

        let image = self.apply(&hs.projector())?;
        let pr = bd.hr.projector();
        let support_leak = trace(&(&(&pr * &image) * &pr)).re.max(0.0).sqrt();
        // The leak is the ℓ2 sum of the Q-block norms, so it can exceed the
        // block residual by at most √K; beyond that the two routes disagree.
        // The trace carries roundoff of order d²·ε·‖T(Π_S)‖, which the square
        // root turns into a floor of order d·√ε.
        let roundoff = 2.0 * self.dim as f64 * (f64::EPSILON * frobenius(&image).max(1.0)).sqrt();
        let leak_bound = threshold * (self.kraus.len() as f64).sqrt() * (1.0 + 1e-6) + roundoff + tol.abs;
        if invariant && support_leak > leak_bound {
            return Err(Error::Inconsistent(format!(
                "block test reports invariance but T(Π_S) leaks {support_leak:.3e} outside H_S"
            )));
        }
        Ok(InvarianceReport {
            invariant,
            residual,
            scale,
            support_leak,
        })
    }

    /// Fails with [`Error::NotInvariant`] unless `hs` is invariant.
    pub fn require_invariant(&self, hs: &SubspaceBasis, tol: &Tolerances) -> Result<()> {
        let rep = self.is_invariant(hs, tol)?;
        if rep.invariant {
            Ok(())
        } else {
            Err(Error::NotInvariant {
                residual: rep.residual,
            })
        }
    }

    /// `T*(Π_S) ≥ Π_S` within `τ_rank`.
    pub fn is_subharmonic(&self, hs: &SubspaceBasis, tol: &Tolerances) -> Result<bool> {
        check_subspace(hs, self.dim)?;
        let p = hs.projector();
        let diff = &self.apply_dual(&p)? - &p;
        Ok(linalg::min_eigenvalue(&diff)? >= -tol.rank)
    }

    /// `supp(T*ⁿ(Π_S))` for `n = 0, 1, …` until two consecutive supports
    /// coincide or `max_steps` applications have been made.
    pub fn dual_support_sequence(
        &self,
        hs: &SubspaceBasis,
        max_steps: usize,
        tol: &Tolerances,
    ) -> Result<DualSupportSequence> {
        self.require_invariant(hs, tol)?;
        let mut supports = vec![hs.clone()];
        let mut stabilized = false;
        for _ in 0..max_steps {
            let current = supports.last().expect("non-empty");
            // supp(T*(X)) only depends on supp(X) for PSD X, so iterating on
            // projectors keeps the conditioning of every step at O(1).
            let image = self.apply_dual(&current.projector())?;
            let next = range(&linalg::hermitian_part(&image), tol)?;
            if !next.contains(current, tol) {
                return Err(Error::Inconsistent(
                    "dual supports of an invariant subspace failed to grow monotonically".into(),
                ));
            }
            let same = next.same_as(current, tol);
            supports.push(next);
            if same {
                stabilized = true;
                break;
            }
        }
        Ok(DualSupportSequence { supports, stabilized })
    }
}

/// `∨_i supp(X_i)` for PSD inputs.
pub fn support_of_state_set(states: &[CMatrix], tol: &Tolerances) -> Result<SubspaceBasis> {
    let first = states
        .first()
        .ok_or_else(|| Error::InvalidParameters("empty state set".into()))?;
    let dim = first.nrows();
    let mut acc = SubspaceBasis::zero(dim);
    for x in states {
        check_square(x, dim)?;
        let norm = frobenius(x).max(1.0);
        let defect = hermiticity_defect(x);
        if defect > tol.herm * norm {
            return Err(Error::NotHermitian(defect));
        }
        let min = linalg::min_eigenvalue(x)?;
        if min < -tol.rank * norm {
            return Err(Error::NotPsd(min));
        }
        let supp = range(&linalg::hermitian_part(x), tol)?;
        acc = subspace_sum(&acc, &supp, tol)?;
    }
    Ok(acc)
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix, tol: &Tolerances) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare(matrix.nrows(), matrix.ncols()));
        }
        if !linalg::is_finite(&matrix) {
            return Err(Error::NonFinite);
        }
        let defect = hermiticity_defect(&matrix);
        if defect > tol.herm {
            return Err(Error::NotHermitian(defect));
        }
        let tr = trace(&matrix);
        if (tr - ONE).norm() > 1e-9 {
            return Err(Error::InvalidTrace(tr.re));
        }
        let (vals, _) = hermitian_eigen(&matrix)?;
        if let Some(&min) = vals.first() {
            if min < -tol.rank {
                return Err(Error::NotPsd(min));
            }
        }
        Ok(Self { matrix })
    }

    /// `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: linalg::scale_real(&identity(dim), 1.0 / dim as f64),
        }
    }

    /// `|ψ⟩⟨ψ|/⟨ψ|ψ⟩`.
    pub fn pure(psi: &[linalg::c64]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if !(norm2 > 0.0 && norm2.is_finite()) {
            return Err(Error::InvalidParameters(
                "state vector must be non-zero and finite".into(),
            ));
        }
        let n = psi.len();
        let matrix = CMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj() / norm2);
        Ok(Self { matrix })
    }

    /// Equal mixture of computational basis states (0-based indices).
    pub fn uniform_on(dim: usize, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidParameters("empty index set".into()));
        }
        let h = SubspaceBasis::from_indices(dim, indices)?;
        Ok(Self {
            matrix: linalg::scale_real(&h.projector(), 1.0 / h.dim() as f64),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Wraps an iterate that is a density operator up to round-off.
    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        Self { matrix }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, diag_real, from_real_rows};
    use crate::models;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn toy() -> KrausMap {
        models::toy3(&models::TOY3_DEFAULT_GAMMAS).unwrap()
    }

    fn seven() -> KrausMap {
        models::seven_level(&models::SEVEN_LEVEL_DEFAULT_GAMMAS).unwrap()
    }

    fn plus3() -> SubspaceBasis {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        SubspaceBasis::new(from_real_rows(&[&[h], &[h], &[0.0]]), &tol()).unwrap()
    }

    fn ket(d: usize, i: usize) -> CMatrix {
        let mut m = zeros(d, d);
        m[(i, i)] = ONE;
        m
    }

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| {
            c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    #[test]
    fn unitary_channel_is_tp() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let u = from_real_rows(&[&[h, h], &[h, -h]]);
        let rep = KrausMap::new(vec![u]).unwrap().validate(&tol());
        assert!(rep.is_tp && rep.tp_residual < 1e-15);
    }

    #[test]
    fn toy_model_trace_preservation() {
        assert!(toy().validate(&tol()).is_tp);
        let scaled = models::toy3_unchecked(&[0.45, 0.27, 0.18]);
        let rep = scaled.validate(&tol());
        assert!(!rep.is_tp);
        assert!((rep.tp_residual - 0.1 * 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn ragged_kraus_rejected() {
        let err = KrausMap::new(vec![identity(2), identity(3)]).unwrap_err();
        assert!(matches!(err, Error::RaggedKraus { index: 1, .. }));
        assert!(matches!(KrausMap::new(vec![]), Err(Error::EmptyKraus)));
    }

    #[test]
    fn toy_apply_examples() {
        let t = toy();
        let g2 = models::TOY3_DEFAULT_GAMMAS[2];
        let rho_s = plus3().projector();
        assert!(frobenius(&(&t.apply(&rho_s).unwrap() - &rho_s)) < 1e-14);

        let out = t.apply(&ket(3, 2)).unwrap();
        let expected = &linalg::scale_real(&ket(3, 2), 1.0 - g2) + &linalg::scale_real(&ket(3, 0), g2);
        assert!(frobenius(&(&out - &expected)) < 1e-14);
    }

    #[test]
    fn toy_dual_of_plus_projector() {
        let t = toy();
        let g2 = models::TOY3_DEFAULT_GAMMAS[2];
        let p = plus3().projector();
        let out = t.apply_dual(&p).unwrap();
        // ⟨1|Π_S|1⟩ = 1/2 weights the decay channel |3⟩ → |1⟩.
        let expected = &p + &linalg::scale_real(&ket(3, 2), g2 / 2.0);
        assert!(frobenius(&(&out - &expected)) < 1e-14);
        assert!(frobenius(&(&t.apply_dual(&identity(3)).unwrap() - &identity(3))) < 1e-14);
    }

    #[test]
    fn adjoint_identity_and_faithfulness() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let t = seven();
        let sup = t.superoperator();
        for _ in 0..5 {
            let a = random_matrix(&mut rng, 7);
            let b = random_matrix(&mut rng, 7);
            let rho = linalg::hermitian_part(&a);
            let x = linalg::hermitian_part(&b);
            let lhs = linalg::trace_product(&t.apply(&rho).unwrap(), &x);
            let rhs = linalg::trace_product(&rho, &t.apply_dual(&x).unwrap());
            assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm().max(1.0));
            let via_sup = sup.apply(&a).unwrap();
            assert!(frobenius(&(&via_sup - &t.apply(&a).unwrap())) < 1e-12);
        }
    }

    #[test]
    fn block_decompose_full_space() {
        let t = seven();
        let bd = t.block_decompose(&SubspaceBasis::full(7), &tol()).unwrap();
        assert_eq!(bd.blocks[0].p.ncols(), 0);
        assert_eq!(bd.blocks[0].q.nrows(), 0);
        for (k, b) in bd.blocks.iter().enumerate() {
            assert!(frobenius(&(&b.s - &t.kraus()[k])) < 1e-15);
        }
    }

    #[test]
    fn invariant_subspaces_have_vanishing_q_blocks() {
        let bd = toy().block_decompose(&plus3(), &tol()).unwrap();
        assert!(bd.max_q_norm() < 1e-15);
        let h13 = SubspaceBasis::from_indices(7, &[0, 2]).unwrap();
        let bd = seven().block_decompose(&h13, &tol()).unwrap();
        assert!(bd.max_q_norm() < 1e-15);
        let basis = linalg::hcat(bd.hs.basis(), bd.hr.basis());
        for k in 0..bd.blocks.len() {
            let direct = &(&adjoint(&basis) * &seven().kraus()[k]) * &basis;
            assert!(frobenius(&(&direct - &bd.rotated(k))) < 1e-14);
        }
    }

    #[test]
    fn toy_reduced_map_on_e3_is_scalar() {
        let t = toy();
        let g2 = models::TOY3_DEFAULT_GAMMAS[2];
        let hs = SubspaceBasis::from_indices(3, &[0, 1]).unwrap();
        let red = t.reduced_maps(&hs, &tol()).unwrap();
        assert_eq!(red.t_r.matrix.nrows(), 1);
        assert!((red.t_r.matrix[(0, 0)] - c64::new(1.0 - g2, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn reduced_maps_full_space() {
        let t = seven();
        let red = t.reduced_maps(&SubspaceBasis::full(7), &tol()).unwrap();
        assert!(frobenius(&(&red.t_s.matrix - &t.superoperator().matrix)) < 1e-14);
        assert!(red.t_r.is_empty() && red.t_sr.matrix.ncols() == 0);
    }

    #[test]
    fn invariance_examples() {
        let t = seven();
        let tl = tol();
        let h13 = SubspaceBasis::from_indices(7, &[0, 2]).unwrap();
        assert!(t.is_invariant(&h13, &tl).unwrap().invariant);
        let h5 = SubspaceBasis::from_indices(7, &[4]).unwrap();
        let rep = t.is_invariant(&h5, &tl).unwrap();
        assert!(!rep.invariant && rep.residual > 0.1);
        assert!(t.is_invariant(&SubspaceBasis::full(7), &tl).unwrap().invariant);
    }

    #[test]
    fn subharmonic_examples() {
        let tl = tol();
        assert!(seven().is_subharmonic(&SubspaceBasis::full(7), &tl).unwrap());
        assert!(toy().is_subharmonic(&plus3(), &tl).unwrap());
        let h6 = SubspaceBasis::from_indices(7, &[5]).unwrap();
        assert!(!seven().is_subharmonic(&h6, &tl).unwrap());
    }

    #[test]
    fn support_examples() {
        let tl = tol();
        let s = support_of_state_set(&[ket(3, 0), ket(3, 1)], &tl).unwrap();
        assert!(s.same_as(&SubspaceBasis::from_indices(3, &[0, 1]).unwrap(), &tl));
        let s = support_of_state_set(&[plus3().projector()], &tl).unwrap();
        assert!(s.same_as(&plus3(), &tl));
        assert!(matches!(
            support_of_state_set(&[diag_real(&[1.0, -1.0])], &tl),
            Err(Error::NotPsd(_))
        ));
    }

    #[test]
    fn dual_supports_seven_level() {
        let tl = tol();
        let t = seven();
        let h13 = SubspaceBasis::from_indices(7, &[0, 2]).unwrap();
        let seq = t.dual_support_sequence(&h13, 10, &tl).unwrap();
        let expected: [&[usize]; 4] = [&[0, 2], &[0, 2, 4], &[0, 2, 4, 5, 6], &[0, 2, 4, 5, 6]];
        assert_eq!(seq.supports.len(), 4);
        for (s, e) in seq.supports.iter().zip(expected) {
            assert_eq!(s.axis_indices(&tl).unwrap(), e);
        }
        assert!(seq.stabilized && !seq.covers_space());

        let h14 = SubspaceBasis::from_indices(7, &[0, 1, 2, 3]).unwrap();
        let seq = t.dual_support_sequence(&h14, 10, &tl).unwrap();
        assert!(seq.covers_space());
        assert_eq!(seq.growth_steps(), 2);
    }

    #[test]
    fn dual_supports_identity_channel_constant() {
        let tl = tol();
        let t = KrausMap::new(vec![identity(3)]).unwrap();
        let h = SubspaceBasis::from_indices(3, &[1]).unwrap();
        let seq = t.dual_support_sequence(&h, 5, &tl).unwrap();
        assert_eq!(seq.supports.len(), 2);
        assert!(seq.supports[1].same_as(&h, &tl));
    }

    #[test]
    fn dual_supports_refuse_non_invariant() {
        let h5 = SubspaceBasis::from_indices(7, &[4]).unwrap();
        assert!(matches!(
            seven().dual_support_sequence(&h5, 5, &tol()),
            Err(Error::NotInvariant { .. })
        ));
    }

    #[test]
    fn density_operator_checks() {
        let tl = tol();
        assert!(DensityOperator::new(diag_real(&[0.5, 0.5]), &tl).is_ok());
        assert!(matches!(
            DensityOperator::new(diag_real(&[0.5, 0.6]), &tl),
            Err(Error::InvalidTrace(_))
        ));
        assert!(matches!(
            DensityOperator::new(diag_real(&[1.5, -0.5]), &tl),
            Err(Error::NotPsd(_))
        ));
        let mm = DensityOperator::maximally_mixed(4);
        assert!((trace(mm.matrix()).re - 1.0).abs() < 1e-15);
    }
}
