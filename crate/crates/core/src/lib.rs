// SPDX-License-Identifier: Apache-2.0

//! Structural analysis of discrete-time quantum dynamical semigroups.
//!
//! A CPTP map `T(ρ) = Σ_k M_k ρ M_k†` is iterated in time. Given a subspace
//! `H_S` of the system Hilbert space this crate answers:
//!
//! - is `H_S` invariant (states supported on it stay there)?
//! - is it globally asymptotically stable (GAS), i.e. does every trajectory
//!   end up supported on `H_S`?
//! - how fast, and through which intermediate subspaces, does probability
//!   flow towards it?
//! - for a GAS subspace split into orthogonal invariant parts, with which
//!   probability does a given initial state end up in each part?
//!
//! Three independent GAS deciders are provided: the nested-face decomposition
//! ([`nfd`]), the dissipation-induced decomposition ([`did`]) and the
//! growth of dual supports ([`channel::dual_support_sequence`]).
//!
//! ```
//! use qdec_core::{models, did, SubspaceBasis, Tolerances};
//!
//! let tol = Tolerances::default();
//! let map = models::seven_level(&models::SEVEN_LEVEL_DEFAULT_GAMMAS).unwrap();
//! let hs = SubspaceBasis::from_indices(7, &[0, 1, 2, 3]).unwrap();
//! let result = did::did(&map, &hs, &tol).unwrap();
//! assert!(result.is_successful());
//! ```

#![forbid(unsafe_code)]

pub mod asymptotics;
pub mod channel;
pub mod did;
pub mod io;
pub mod linalg;
pub mod models;
pub mod nfd;

mod error;

pub use asymptotics::{AsymptoticAnalysis, AsymptoticOptions, AsymptoticReport, Probabilities};
pub use channel::{DensityOperator, KrausMap, Superoperator, ValidationReport};
pub use did::{DidOutcome, DidResult, DidStage};
pub use error::{Error, Result};
pub use linalg::{c64, CMatrix, SpectralData, SubspaceBasis};
pub use nfd::{NfdResult, NfdStage};

/// Numerical thresholds shared by every analysis.
///
/// The defaults target double precision at dimensions up to a few dozen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Singular values below `rank * σ_max` count as zero.
    pub rank: f64,
    /// Absolute floor for the rank threshold.
    pub abs: f64,
    /// Orthonormality and subspace-equality tolerance.
    pub orth: f64,
    /// Hermiticity tolerance.
    pub herm: f64,
    /// Trace-preservation tolerance per Hilbert-space dimension.
    pub tp_per_dim: f64,
    /// Relative size of a Kraus block treated as zero.
    pub inv: f64,
    /// Distance below one at which a spectral radius still counts as one.
    pub spec: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank: 1e-10,
            abs: 1e-12,
            orth: 1e-10,
            herm: 1e-9,
            tp_per_dim: 1e-9,
            inv: 1e-10,
            spec: 1e-9,
        }
    }
}

impl Tolerances {
    /// Trace-preservation threshold for a `d`-dimensional system.
    pub fn tp(&self, dim: usize) -> f64 {
        self.tp_per_dim * dim as f64
    }

    /// Rank cutoff for a matrix whose largest singular value is `sigma_max`.
    pub fn rank_cutoff(&self, sigma_max: f64) -> f64 {
        (self.rank * sigma_max).max(self.abs)
    }
}
