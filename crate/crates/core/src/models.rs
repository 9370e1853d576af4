// SPDX-License-Identifier: Apache-2.0

//! Reference channels: a three-level toy model and a seven-level model with
//! two orthogonal invariant subspaces.

use crate::linalg::{c64, zeros, CMatrix};
use crate::{Error, KrausMap, Result};

/// `(γ₀, γ₁, γ₂)` for [`toy3`].
pub const TOY3_DEFAULT_GAMMAS: [f64; 3] = [0.5, 0.3, 0.2];

/// `(γ₁, …, γ₅)` for [`seven_level`].
pub const SEVEN_LEVEL_DEFAULT_GAMMAS: [f64; 5] = [0.3, 0.3, 0.05, 0.15, 0.2];

const SUM_TOL: f64 = 1e-9;

fn from_entries(d: usize, entries: &[(usize, usize, f64)]) -> CMatrix {
    let mut m = zeros(d, d);
    for &(i, j, v) in entries {
        m[(i, j)] = c64::new(v, 0.0);
    }
    m
}

fn weighted(m: CMatrix, gamma: f64) -> CMatrix {
    crate::linalg::scale_real(&m, gamma.sqrt())
}

fn check_sum(gammas: &[f64]) -> Result<()> {
    let sum: f64 = gammas.iter().sum();
    if (sum - 1.0).abs() > SUM_TOL {
        return Err(Error::InvalidParameters(format!(
            "gammas must sum to 1 (got {sum})"
        )));
    }
    Ok(())
}

/// Three-level model: identity with weight `γ₀`, the swap `|1⟩ ↔ |2⟩` with
/// weight `γ₁`, and decay `|3⟩ → |1⟩` with weight `γ₂`.
///
/// The decay operator `√γ₂ |1⟩⟨3|` alone leaves `Σ M_k†M_k` short of the
/// identity by `γ₂` on `span{|1⟩, |2⟩}`, so a fourth operator
/// `√γ₂ (|1⟩⟨1| + |2⟩⟨2|)` (no jump on the lower levels) completes it.
pub fn toy3(gammas: &[f64]) -> Result<KrausMap> {
    if gammas.len() != 3 {
        return Err(Error::InvalidParameters(format!(
            "toy3 takes 3 gammas, got {}",
            gammas.len()
        )));
    }
    if let Some(g) = gammas.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
        return Err(Error::InvalidParameters(format!(
            "gammas must be non-negative (got {g})"
        )));
    }
    check_sum(gammas)?;
    Ok(toy3_unchecked(gammas))
}

/// [`toy3`] without the parameter checks.
pub fn toy3_unchecked(gammas: &[f64]) -> KrausMap {
    let (g0, g1, g2) = (gammas[0], gammas[1], gammas[2]);
    let m0 = weighted(from_entries(3, &[(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0)]), g0);
    let m1 = weighted(from_entries(3, &[(0, 1, 1.0), (1, 0, 1.0), (2, 2, 1.0)]), g1);
    let m2 = weighted(from_entries(3, &[(0, 2, 1.0)]), g2);
    let m3 = weighted(from_entries(3, &[(0, 0, 1.0), (1, 1, 1.0)]), g2);
    KrausMap::new(vec![m0, m1, m2, m3]).expect("3x3 Kraus operators")
}

/// Seven-level model with noise actions: swap `1↔3, 2↔4` (`γ₁`); decay
/// `3→1, 4→2` (`γ₂`); `5 → (3,4)` (`γ₃`); `6 → 5` (`γ₄`); `7 → 5` (`γ₅`).
///
/// Requires `Σγ = 1`, `γᵢ > 0` and `γ₃ < γ₄ < γ₅`.
pub fn seven_level(gammas: &[f64]) -> Result<KrausMap> {
    if gammas.len() != 5 {
        return Err(Error::InvalidParameters(format!(
            "seven_level takes 5 gammas, got {}",
            gammas.len()
        )));
    }
    if let Some(g) = gammas.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
        return Err(Error::InvalidParameters(format!(
            "gammas must be positive (got {g})"
        )));
    }
    check_sum(gammas)?;
    if !(gammas[2] < gammas[3] && gammas[3] < gammas[4]) {
        return Err(Error::InvalidParameters(format!(
            "gamma3 < gamma4 < gamma5 violated ({}, {}, {})",
            gammas[2], gammas[3], gammas[4]
        )));
    }
    Ok(seven_level_unchecked(gammas))
}

/// [`seven_level`] without the parameter checks.
pub fn seven_level_unchecked(gammas: &[f64]) -> KrausMap {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let identity_except = |skip: usize| {
        let e: Vec<_> = (0..7).filter(|&i| i != skip).map(|i| (i, i, 1.0)).collect();
        from_entries(7, &e)
    };
    let n1 = from_entries(
        7,
        &[
            (0, 2, 1.0),
            (1, 3, 1.0),
            (2, 0, 1.0),
            (3, 1, 1.0),
            (4, 4, 1.0),
            (5, 5, 1.0),
            (6, 6, 1.0),
        ],
    );
    let n2 = from_entries(7, &[(0, 2, 1.0), (1, 3, 1.0), (4, 4, h), (5, 5, h), (6, 6, h)]);
    let n3 = from_entries(7, &[(0, 0, 1.0), (1, 1, 1.0), (4, 4, h), (5, 5, h), (6, 6, h)]);
    let n4 = from_entries(7, &[(2, 4, h), (3, 4, h)]);
    let n5 = identity_except(4);
    let n6 = from_entries(7, &[(4, 5, 1.0)]);
    let n7 = identity_except(5);
    let n8 = from_entries(7, &[(4, 6, 1.0)]);
    let n9 = identity_except(6);

    let [g1, g2, g3, g4, g5] = [gammas[0], gammas[1], gammas[2], gammas[3], gammas[4]];
    KrausMap::new(vec![
        weighted(n1, g1),
        weighted(n2, g2),
        weighted(n3, g2),
        weighted(n4, g3),
        weighted(n5, g3),
        weighted(n6, g4),
        weighted(n7, g4),
        weighted(n8, g5),
        weighted(n9, g5),
    ])
    .expect("7x7 Kraus operators")
}
