// SPDX-License-Identifier: Apache-2.0

//! Dissipation-induced decomposition.
//!
//! Starting from an invariant `H_S`, each stage collects the part `H_T` of
//! the remaining space that some Kraus operator moves into the subspace built
//! so far. The construction either exhausts the space (the subspace is GAS)
//! or stops on a remainder that no Kraus operator couples back (it is then
//! invariant, and `H_S` is not GAS).

use crate::linalg::{
    self, adjoint, frobenius, hermitian_eigen, kernel, orth_complement, subspace_sum, vstack, CMatrix,
    SubspaceBasis,
};
use crate::{Error, KrausMap, Result, Tolerances};

#[derive(Debug, Clone)]
pub struct DidStage {
    /// `H_{T_i}` in global coordinates.
    pub ht: SubspaceBasis,
    /// Smallest eigenvalue of `Σ_k M_{k,P_i}†M_{k,P_i}`.
    pub gamma_min: f64,
    /// Largest eigenvalue of `Σ_k M_{k,P_i}†M_{k,P_i}`.
    pub gamma_max: f64,
}

#[derive(Debug, Clone)]
pub enum DidOutcome {
    Successful,
    /// Stopped on an invariant remainder that is never left.
    Unsuccessful {
        trapped: SubspaceBasis,
    },
}

#[derive(Debug, Clone)]
pub struct DidResult {
    pub hs: SubspaceBasis,
    /// `H_{T_1}, …, H_{T_N}`; for an unsuccessful run the trapped remainder is
    /// the last stage.
    pub stages: Vec<DidStage>,
    pub outcome: DidOutcome,
    /// `[V_S | V_{T_1} | … | V_{T_N}]`.
    pub basis: CMatrix,
    /// `V† M_k V` for each Kraus operator.
    pub block_form: Vec<CMatrix>,
}

/// `(γ_min, γ_max)` of one successful stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionRates {
    pub gamma_min: f64,
    pub gamma_max: f64,
}

impl DidResult {
    pub fn is_successful(&self) -> bool {
        matches!(self.outcome, DidOutcome::Successful)
    }

    pub fn trapped(&self) -> Option<&SubspaceBasis> {
        match &self.outcome {
            DidOutcome::Successful => None,
            DidOutcome::Unsuccessful { trapped } => Some(trapped),
        }
    }

    /// Cumulative subspaces `H_S, H_S ⊕ H_{T_1}, …`.
    pub fn chain(&self, tol: &Tolerances) -> Result<Vec<SubspaceBasis>> {
        let mut out = vec![self.hs.clone()];
        for st in &self.stages {
            let next = subspace_sum(out.last().expect("non-empty"), &st.ht, tol)?;
            out.push(next);
        }
        Ok(out)
    }

    /// Block boundaries of `basis`: `[0, dim S, dim S + dim T_1, …, d]`.
    pub fn offsets(&self) -> Vec<usize> {
        let mut off = vec![0, self.hs.dim()];
        for st in &self.stages {
            off.push(off.last().expect("non-empty") + st.ht.dim());
        }
        off
    }

    /// Checks the zero blocks implied by the construction in every
    /// `block_form` matrix: nothing leaves `H_S`, stage `i` only feeds stage
    /// `i−1`, and a trapped remainder feeds nothing.
    pub fn check_block_form(&self, scale: f64, tol: &Tolerances) -> Result<()> {
        let off = self.offsets();
        let nblocks = off.len() - 1;
        let threshold = tol.inv * scale.max(f64::MIN_POSITIVE);
        for (k, m) in self.block_form.iter().enumerate() {
            for a in 0..nblocks {
                for b in 0..nblocks {
                    let must_vanish = (b == 0 && a >= 1)
                        || b >= a + 2
                        || (!self.is_successful() && b == nblocks - 1 && a + 1 == b);
                    if !must_vanish {
                        continue;
                    }
                    let blk = CMatrix::from_fn(off[a + 1] - off[a], off[b + 1] - off[b], |i, j| {
                        m[(off[a] + i, off[b] + j)]
                    });
                    let norm = frobenius(&blk);
                    if norm > threshold {
                        return Err(Error::Inconsistent(format!(
                            "Kraus operator {k}: block ({a}, {b}) should vanish but has norm {norm:.3e}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn transition_rates(&self) -> Result<Vec<TransitionRates>> {
        if !self.is_successful() {
            return Err(Error::UnsuccessfulDid);
        }
        Ok(self
            .stages
            .iter()
            .map(|s| TransitionRates {
                gamma_min: s.gamma_min,
                gamma_max: s.gamma_max,
            })
            .collect())
    }

    /// Smallest `γ_min` over the stages (`None` when there are none).
    pub fn bottleneck(&self) -> Result<Option<f64>> {
        Ok(self
            .transition_rates()?
            .iter()
            .map(|r| r.gamma_min)
            .min_by(f64::total_cmp))
    }
}

/// Eigen-extrema of `Σ_k P_k†P_k` with `P_k = V_to† M_k V_from`.
fn rate_bounds(map: &KrausMap, from: &SubspaceBasis, to: &SubspaceBasis) -> Result<(f64, f64)> {
    let n = from.dim();
    let mut g = linalg::zeros(n, n);
    let to_h = adjoint(to.basis());
    for m in map.kraus() {
        let p = &(&to_h * m) * from.basis();
        g = &g + &(&adjoint(&p) * &p);
    }
    let (vals, _) = hermitian_eigen(&g)?;
    let lo = vals.first().copied().unwrap_or(0.0);
    let hi = vals.last().copied().unwrap_or(0.0);
    Ok((lo, hi))
}

/// Runs the decomposition from the invariant subspace `hs`.
pub fn did(map: &KrausMap, hs: &SubspaceBasis, tol: &Tolerances) -> Result<DidResult> {
    map.require_invariant(hs, tol)?;
    let scale = map.scale();
    let mut s_i = hs.clone();
    let mut r_i = orth_complement(hs, tol)?;
    let mut prev_target = hs.clone();
    let mut stages: Vec<DidStage> = Vec::new();
    let mut outcome = DidOutcome::Successful;

    while !r_i.is_zero() {
        let s_h = adjoint(s_i.basis());
        let blocks: Vec<CMatrix> = map.kraus().iter().map(|m| &(&s_h * m) * r_i.basis()).collect();
        let stack = vstack(&blocks, r_i.dim());

        if frobenius(&stack) <= tol.inv * scale {
            let (lo, hi) = rate_bounds(map, &r_i, &prev_target)?;
            stages.push(DidStage {
                ht: r_i.clone(),
                gamma_min: lo,
                gamma_max: hi,
            });
            outcome = DidOutcome::Unsuccessful { trapped: r_i.clone() };
            break;
        }

        let ker_local = kernel(&stack, tol)?;
        let (t_i, r_next) = if ker_local.is_zero() {
            (r_i.clone(), SubspaceBasis::zero(map.dim()))
        } else {
            let t_local = orth_complement(&ker_local, tol)?;
            (r_i.lift(&t_local), r_i.lift(&ker_local))
        };
        let t_i = t_i.with_canonical_phases();
        let (lo, hi) = rate_bounds(map, &t_i, &prev_target)?;
        stages.push(DidStage {
            ht: t_i.clone(),
            gamma_min: lo,
            gamma_max: hi,
        });
        s_i = subspace_sum(&s_i, &t_i, tol)?;
        prev_target = t_i;
        r_i = r_next.with_canonical_phases();
    }

    let mut basis = hs.basis().clone();
    for st in &stages {
        basis = linalg::hcat(&basis, st.ht.basis());
    }
    let basis_h = adjoint(&basis);
    let block_form = map.kraus().iter().map(|m| &(&basis_h * m) * &basis).collect();
    let result = DidResult {
        hs: hs.clone(),
        stages,
        outcome,
        basis,
        block_form,
    };
    result.check_block_form(scale, tol)?;
    if let Some(trapped) = result.trapped() {
        if !map.is_invariant(trapped, tol)?.invariant {
            return Err(Error::Inconsistent(
                "trapped remainder of an unsuccessful decomposition is not invariant".into(),
            ));
        }
    }
    Ok(result)
}

/// GAS decision from the decomposition: GAS iff it terminates successfully.
pub fn is_gas_did(map: &KrausMap, hs: &SubspaceBasis, tol: &Tolerances) -> Result<bool> {
    Ok(did(map, hs, tol)?.is_successful())
}

/// GAS decision from the dual supports: GAS iff `supp(T*ⁿ(Π_S))` grows until
/// it covers the whole space.
pub fn is_gas_dual(map: &KrausMap, hs: &SubspaceBasis, tol: &Tolerances) -> Result<bool> {
    let seq = map.dual_support_sequence(hs, map.dim() + 1, tol)?;
    Ok(seq.covers_space())
}

/// Checks `supp(T*ⁿ(Π_S)) = H_S ⊕ H_{T_1} ⊕ … ⊕ H_{T_n}` for every stage of a
/// successful decomposition.
pub fn did_dual_consistency(map: &KrausMap, hs: &SubspaceBasis, tol: &Tolerances) -> Result<bool> {
    let res = did(map, hs, tol)?;
    if !res.is_successful() {
        return Err(Error::NotGas);
    }
    let chain = res.chain(tol)?;
    let seq = map.dual_support_sequence(hs, chain.len(), tol)?;
    Ok(chain
        .iter()
        .enumerate()
        .all(|(n, c)| seq.supports.get(n).is_some_and(|s| s.same_as(c, tol))))
}
