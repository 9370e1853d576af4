// SPDX-License-Identifier: Apache-2.0

//! Limit probabilities of landing in each of several orthogonal invariant
//! subspaces of a GAS subspace.
//!
//! With `H = H_S ⊕ H_R` and `H_S` GAS, the probability that `Tⁿ(ρ)` ends up
//! in an invariant part `H_i ⊆ H_S` is
//! `Tr(Π_i ρ_S) + Tr(Π_i T_SR((I − T_R)⁻¹ ρ_R))`. Equivalently it is
//! `Tr(L_i ρ)` with the dual fixed point
//! `L_i = Π_i + (I − T_R*)⁻¹ T_SR*(Π_i)`. Both routes are computed and must
//! agree.

use crate::channel::{KrausMap, ReducedMaps};
use crate::linalg::{
    adjoint, frobenius, identity, relative_complement, solve, subspace_sum, trace, trace_product,
    unvectorize, vectorize, CMatrix, SubspaceBasis,
};
use crate::{did, DensityOperator, Error, Result, Tolerances};

/// Agreement required between the two probability routes.
pub const ROUTE_TOL: f64 = 1e-10;
/// Tolerance of the one-step dual identity.
pub const DUAL_STEP_TOL: f64 = 1e-10;
/// Per-step trace drift allowed in [`iterate_oracle`].
pub const ORACLE_TRACE_TOL: f64 = 1e-9;
/// Clamping beyond this amount is reported as a warning.
pub const CLAMP_WARN: f64 = 1e-8;

#[derive(Debug, Clone, Default)]
pub struct AsymptoticOptions {
    /// Skip the GAS check of the target subspace.
    pub gas_verified: bool,
    /// GAS subspace containing the parts. Defaults to their direct sum; when
    /// larger, the uncovered remainder must be invariant and its probability
    /// is reported separately.
    pub container: Option<SubspaceBasis>,
}

/// Raw per-part probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Probabilities {
    pub parts: Vec<f64>,
    /// Mass ending in the part of the container not covered by the parts.
    pub remainder: Option<f64>,
}

impl Probabilities {
    pub fn total(&self) -> f64 {
        self.parts.iter().sum::<f64>() + self.remainder.unwrap_or(0.0)
    }
}

#[derive(Debug, Clone)]
pub struct AsymptoticReport {
    pub targets: Vec<SubspaceBasis>,
    pub limit_duals: Vec<CMatrix>,
    /// Values before clamping.
    pub raw: Probabilities,
    /// Values clamped to `[0, 1]`.
    pub probabilities: Vec<f64>,
    pub remainder: Option<f64>,
    /// Largest gap between the two computation routes.
    pub route_gap: f64,
}

/// Precomputed reduced maps and limit duals for a fixed set of parts.
#[derive(Debug, Clone)]
pub struct AsymptoticAnalysis {
    parts: Vec<SubspaceBasis>,
    remainder: Option<SubspaceBasis>,
    reduced: ReducedMaps,
    /// `I − T_R` on vectorized R-operators.
    resolvent_system: CMatrix,
    limit_duals: Vec<CMatrix>,
    remainder_dual: Option<CMatrix>,
}

fn check_parts(map: &KrausMap, parts: &[SubspaceBasis], tol: &Tolerances) -> Result<()> {
    if parts.is_empty() {
        return Err(Error::InvalidParameters("at least one part is required".into()));
    }
    let d = map.dim();
    for p in parts {
        if p.ambient_dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: p.ambient_dim(),
            });
        }
        map.require_invariant(p, tol)?;
    }
    for (i, a) in parts.iter().enumerate() {
        for b in &parts[i + 1..] {
            let overlap = frobenius(&a.coordinates_of(b));
            if overlap > tol.orth * d as f64 {
                return Err(Error::NotOrthogonal(overlap));
            }
        }
    }
    Ok(())
}

fn direct_sum(parts: &[SubspaceBasis], dim: usize, tol: &Tolerances) -> Result<SubspaceBasis> {
    parts
        .iter()
        .try_fold(SubspaceBasis::zero(dim), |acc, p| subspace_sum(&acc, p, tol))
}

impl AsymptoticAnalysis {
    pub fn new(
        map: &KrausMap,
        parts: &[SubspaceBasis],
        options: &AsymptoticOptions,
        tol: &Tolerances,
    ) -> Result<Self> {
        check_parts(map, parts, tol)?;
        let union = direct_sum(parts, map.dim(), tol)?;
        let (hs, remainder) = match &options.container {
            None => (union, None),
            Some(c) => {
                if !c.contains(&union, tol) {
                    return Err(Error::InvalidParameters(
                        "parts are not contained in the given GAS subspace".into(),
                    ));
                }
                map.require_invariant(c, tol)?;
                let rest = relative_complement(c, &union, tol)?;
                if rest.is_zero() {
                    (c.clone(), None)
                } else {
                    let rep = map.is_invariant(&rest, tol)?;
                    if !rep.invariant {
                        return Err(Error::NotInvariant {
                            residual: rep.residual,
                        });
                    }
                    (c.clone(), Some(rest))
                }
            }
        };
        if !options.gas_verified && !did::is_gas_did(map, &hs, tol)? {
            return Err(Error::NotGas);
        }

        let reduced = map.reduced_maps(&hs, tol)?;
        let r = reduced.hr.dim();
        let resolvent_system = &identity(r * r) - &reduced.t_r.matrix;
        let dual_system = adjoint(&resolvent_system);
        let limit = |proj: &CMatrix| -> Result<CMatrix> {
            if r == 0 {
                return Ok(proj.clone());
            }
            let w = &(&adjoint(reduced.hs.basis()) * proj) * reduced.hs.basis();
            let rhs = &adjoint(&reduced.t_sr.matrix) * &vectorize(&w);
            let x = unvectorize(&solve(&dual_system, &rhs)?, r);
            let vr = reduced.hr.basis();
            Ok(proj + &(&(vr * &x) * &adjoint(vr)))
        };
        let limit_duals = parts
            .iter()
            .map(|p| limit(&p.projector()))
            .collect::<Result<Vec<_>>>()?;
        let remainder_dual = remainder.as_ref().map(|p| limit(&p.projector())).transpose()?;

        Ok(Self {
            parts: parts.to_vec(),
            remainder,
            reduced,
            resolvent_system,
            limit_duals,
            remainder_dual,
        })
    }

    pub fn parts(&self) -> &[SubspaceBasis] {
        &self.parts
    }

    pub fn remainder(&self) -> Option<&SubspaceBasis> {
        self.remainder.as_ref()
    }

    /// `lim T*ⁿ(Π_i)` for each part.
    pub fn limit_duals(&self) -> &[CMatrix] {
        &self.limit_duals
    }

    /// The GAS subspace the formula is evaluated against.
    pub fn target(&self) -> &SubspaceBasis {
        &self.reduced.hs
    }

    fn closed_form(&self, proj: &CMatrix, rho: &CMatrix, flowed: Option<&CMatrix>) -> f64 {
        let vs = self.reduced.hs.basis();
        let vs_h = adjoint(vs);
        let w = &(&vs_h * proj) * vs;
        let rho_s = &(&vs_h * rho) * vs;
        let direct = trace_product(&w, &rho_s).re;
        direct + flowed.map_or(0.0, |f| trace_product(&w, f).re)
    }

    /// `T_SR((I − T_R)⁻¹ ρ_R)`, the mass that flows from `H_R` into `H_S`.
    fn flowed_in(&self, rho: &CMatrix) -> Result<Option<CMatrix>> {
        let r = self.reduced.hr.dim();
        if r == 0 {
            return Ok(None);
        }
        let vr = self.reduced.hr.basis();
        let rho_r = &(&adjoint(vr) * rho) * vr;
        let x = solve(&self.resolvent_system, &vectorize(&rho_r))?;
        let m = self.reduced.hs.dim();
        Ok(Some(unvectorize(&(&self.reduced.t_sr.matrix * &x), m)))
    }

    /// Closed-form limit probabilities.
    pub fn probabilities(&self, rho: &DensityOperator) -> Result<Probabilities> {
        let d = self.reduced.hs.ambient_dim();
        if rho.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: rho.dim(),
            });
        }
        let flowed = self.flowed_in(rho.matrix())?;
        let parts = self
            .parts
            .iter()
            .map(|p| self.closed_form(&p.projector(), rho.matrix(), flowed.as_ref()))
            .collect();
        let remainder = self
            .remainder
            .as_ref()
            .map(|p| self.closed_form(&p.projector(), rho.matrix(), flowed.as_ref()));
        Ok(Probabilities { parts, remainder })
    }

    /// `Tr(L_i ρ)` for each part.
    pub fn probabilities_via_duals(&self, rho: &DensityOperator) -> Probabilities {
        Probabilities {
            parts: self
                .limit_duals
                .iter()
                .map(|l| trace_product(l, rho.matrix()).re)
                .collect(),
            remainder: self
                .remainder_dual
                .as_ref()
                .map(|l| trace_product(l, rho.matrix()).re),
        }
    }

    /// Both routes, cross-checked, with clamping for presentation.
    pub fn report(&self, rho: &DensityOperator) -> Result<AsymptoticReport> {
        let raw = self.probabilities(rho)?;
        let dual = self.probabilities_via_duals(rho);
        let mut route_gap: f64 = raw
            .parts
            .iter()
            .zip(&dual.parts)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if let (Some(a), Some(b)) = (raw.remainder, dual.remainder) {
            route_gap = route_gap.max((a - b).abs());
        }
        if route_gap > ROUTE_TOL {
            return Err(Error::Inconsistent(format!(
                "closed-form and dual-limit probabilities differ by {route_gap:.3e}"
            )));
        }
        let clamp = |p: f64| {
            let c = p.clamp(0.0, 1.0);
            if (c - p).abs() > CLAMP_WARN {
                log::warn!("probability {p:.3e} clamped to {c}");
            }
            c
        };
        Ok(AsymptoticReport {
            targets: self.parts.clone(),
            limit_duals: self.limit_duals.clone(),
            probabilities: raw.parts.iter().copied().map(clamp).collect(),
            remainder: raw.remainder.map(clamp),
            raw,
            route_gap,
        })
    }
}

/// Closed-form limit probabilities for GAS `⊕ parts`.
pub fn asymptotic_probability(
    map: &KrausMap,
    parts: &[SubspaceBasis],
    rho: &DensityOperator,
    tol: &Tolerances,
) -> Result<Vec<f64>> {
    let an = AsymptoticAnalysis::new(map, parts, &AsymptoticOptions::default(), tol)?;
    Ok(an.probabilities(rho)?.parts)
}

/// `lim T*ⁿ(Π_i)` for GAS `⊕ parts`.
pub fn limit_dual_projection(
    map: &KrausMap,
    parts: &[SubspaceBasis],
    tol: &Tolerances,
) -> Result<Vec<CMatrix>> {
    let an = AsymptoticAnalysis::new(map, parts, &AsymptoticOptions::default(), tol)?;
    Ok(an.limit_duals)
}

/// `Tⁿ(ρ)` by repeated application, checking the trace at every step.
pub fn iterate_oracle(
    map: &KrausMap,
    rho: &DensityOperator,
    n_steps: usize,
    tol: &Tolerances,
) -> Result<DensityOperator> {
    let rep = map.validate(tol);
    if !rep.is_tp {
        return Err(Error::NotTracePreserving(rep.tp_residual));
    }
    let mut x = rho.matrix().clone();
    for _ in 0..n_steps {
        x = map.apply(&x)?;
        let drift = (trace(&x).re - 1.0).abs();
        if drift > ORACLE_TRACE_TOL {
            return Err(Error::NotTracePreserving(drift));
        }
    }
    Ok(DensityOperator::from_trusted(x))
}

/// Checks `T*(Π_i) = Π_i + T_SR*(Π_i)` for every part, with `H_S = ⊕ parts`.
pub fn dual_step_identity_check(map: &KrausMap, parts: &[SubspaceBasis], tol: &Tolerances) -> Result<bool> {
    if parts.is_empty() {
        return Err(Error::InvalidParameters("at least one part is required".into()));
    }
    let hs = direct_sum(parts, map.dim(), tol)?;
    if hs.dim() != parts.iter().map(SubspaceBasis::dim).sum::<usize>() {
        return Err(Error::NotOrthogonal(f64::NAN));
    }
    let red = map.reduced_maps(&hs, tol)?;
    let r = red.hr.dim();
    let vs = red.hs.basis();
    let vr = red.hr.basis();
    for p in parts {
        let proj = p.projector();
        let lhs = map.apply_dual(&proj)?;
        let mut rhs = proj.clone();
        if r > 0 {
            let w = &(&adjoint(vs) * &proj) * vs;
            let x = unvectorize(&(&adjoint(&red.t_sr.matrix) * &vectorize(&w)), r);
            rhs = &rhs + &(&(vr * &x) * &adjoint(vr));
        }
        if frobenius(&(&lhs - &rhs)) > DUAL_STEP_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}
