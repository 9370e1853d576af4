// SPDX-License-Identifier: Apache-2.0

//! Nested-face decomposition.
//!
//! Starting from an invariant `H_S`, repeatedly split off the support `H_T`
//! of the slowest positive eigen-elements of the map reduced to `H_S^⊥` and
//! absorb it into `H_S`. The spectral radii of the successive reduced maps
//! strictly decrease, and `H_S` is GAS exactly when the first one is below 1.

mod face;

pub use face::{peripheral_face_support, PeripheralFace};

use crate::linalg::{subspace_sum, SubspaceBasis};
use crate::{Error, KrausMap, Result, Tolerances};

/// One extracted face.
#[derive(Debug, Clone)]
pub struct NfdStage {
    /// `H_{T_i}` in global coordinates.
    pub ht: SubspaceBasis,
    /// Spectral radius of `T_{R_i}`.
    pub sigma: f64,
}

#[derive(Debug, Clone)]
pub struct NfdResult {
    pub hs: SubspaceBasis,
    pub stages: Vec<NfdStage>,
    /// `H_{S_1} = H_S ⊂ H_{S_2} ⊂ … ⊂ H`, one entry more than `stages`.
    pub chain: Vec<SubspaceBasis>,
    pub is_gas: bool,
    /// Smallest GAS subspace containing `H_S`.
    pub minimal_gas: SubspaceBasis,
}

impl NfdResult {
    pub fn radii(&self) -> Vec<f64> {
        self.stages.iter().map(|s| s.sigma).collect()
    }
}

/// Nested-face decomposition of `H` starting from the invariant subspace `hs`.
pub fn nfd(map: &KrausMap, hs: &SubspaceBasis, tol: &Tolerances) -> Result<NfdResult> {
    map.require_invariant(hs, tol)?;
    let d = map.dim();
    let mut current = hs.clone();
    let mut chain = vec![hs.clone()];
    let mut stages: Vec<NfdStage> = Vec::new();

    while current.dim() < d {
        let red = map.reduced_maps(&current, tol)?;
        let face = peripheral_face_support(&red.t_r, tol)?;
        let ht = red.hr.lift(&face.support);
        if let Some(prev) = stages.last() {
            if prev.sigma - face.sigma <= tol.spec {
                return Err(Error::Inconsistent(format!(
                    "reduced spectral radii failed to decrease: {:.12} then {:.12}",
                    prev.sigma, face.sigma
                )));
            }
        }
        let next = subspace_sum(&current, &ht, tol)?;
        if next.dim() != current.dim() + ht.dim() {
            return Err(Error::Inconsistent(
                "extracted face overlaps the current invariant subspace".into(),
            ));
        }
        let inv = map.is_invariant(&next, tol)?;
        if !inv.invariant {
            return Err(Error::Inconsistent(format!(
                "enlarged subspace of dimension {} is not invariant (residual {:.3e})",
                next.dim(),
                inv.residual
            )));
        }
        log::debug!(
            "nfd stage {}: sigma = {:.12}, dim H_T = {}, eigenspace dim {}, index {}, {} seeds accepted",
            stages.len() + 1,
            face.sigma,
            ht.dim(),
            face.eigenspace_dim,
            face.index,
            face.accepted_seeds
        );
        stages.push(NfdStage {
            ht,
            sigma: face.sigma,
        });
        chain.push(next.clone());
        current = next;
    }

    let is_gas = stages.first().map_or(true, |s| s.sigma < 1.0 - tol.spec);
    let minimal_gas = if is_gas { hs.clone() } else { chain[1].clone() };
    Ok(NfdResult {
        hs: hs.clone(),
        stages,
        chain,
        is_gas,
        minimal_gas,
    })
}
