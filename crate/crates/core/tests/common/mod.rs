// SPDX-License-Identifier: Apache-2.0

//! Seeded random channels with known invariant subspaces.
//!
//! Kraus operators are drawn block upper triangular in a hidden basis,
//! normalized to be trace preserving through a Cholesky factor (which keeps
//! the block pattern) and conjugated by a random unitary.

#![allow(dead_code)]

use qdec_core::linalg::{self, adjoint, c64, range, solve, zeros, CMatrix};
use qdec_core::{DensityOperator, KrausMap, SubspaceBasis, Tolerances};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub const CORPUS_SIZE: usize = 240;
const CORPUS_SEED: u64 = 0x636f_7270_7573;

pub struct Case {
    pub seed: u64,
    pub map: KrausMap,
    /// Mutually orthogonal invariant parts; their sum is `hs`.
    pub parts: Vec<SubspaceBasis>,
    pub hs: SubspaceBasis,
    /// A decoupled invariant block was planted outside `hs`, so `hs` is not GAS.
    pub planted_trap: bool,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        c64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn random_unitary(rng: &mut impl Rng, n: usize) -> CMatrix {
    let tol = Tolerances::default();
    range(&gaussian(rng, n, n), &tol).unwrap().into_basis()
}

/// Random full-rank density operator on `h`, embedded in the ambient space.
pub fn random_state_on(rng: &mut impl Rng, h: &SubspaceBasis) -> DensityOperator {
    let g = gaussian(rng, h.dim(), h.dim());
    let x = &g * &adjoint(&g);
    let tr = linalg::trace(&x).re;
    let x = linalg::scale_real(&x, 1.0 / tr);
    let rho = &(h.basis() * &x) * &adjoint(h.basis());
    DensityOperator::new(linalg::hermitian_part(&rho), &Tolerances::default()).unwrap()
}

pub fn random_state(rng: &mut impl Rng, dim: usize) -> DensityOperator {
    random_state_on(rng, &SubspaceBasis::full(dim))
}

/// Upper triangular `C` with `C†C = g` for positive definite `g`.
fn cholesky_upper(g: &CMatrix) -> CMatrix {
    let n = g.nrows();
    let mut c = zeros(n, n);
    for i in 0..n {
        let mut diag = g[(i, i)].re;
        for l in 0..i {
            diag -= c[(l, i)].norm_sqr();
        }
        let cii = diag.sqrt();
        c[(i, i)] = c64::new(cii, 0.0);
        for j in i + 1..n {
            let mut v = g[(i, j)];
            for l in 0..i {
                v -= c[(l, i)].conj() * c[(l, j)];
            }
            c[(i, j)] = v / cii;
        }
    }
    c
}

/// Block labels for each hidden-basis axis. Entry `(i, j)` of a Kraus
/// operator may be nonzero only if `allowed(label[i], label[j])`.
#[derive(Clone, Copy, PartialEq)]
enum Block {
    Part(usize),
    Rest,
    Trap,
}

fn allowed(row: Block, col: Block) -> bool {
    match (row, col) {
        (Block::Part(a), Block::Part(b)) => a == b,
        (Block::Part(_), Block::Rest) => true,
        (Block::Rest, Block::Rest) => true,
        (Block::Trap, Block::Trap) => true,
        _ => false,
    }
}

/// Transient spectral radii in `(MIXING_MAX, 1 − CRITICAL_GAP)` are redrawn so
/// that every GAS channel loses all but `≈ 1e-9` of its transient mass
/// within 2000 steps, and no channel sits at the edge of the GAS verdict.
const MIXING_MAX: f64 = 0.99;
const CRITICAL_GAP: f64 = 1e-6;

pub fn case(seed: u64) -> Case {
    let mut rng = rng(CORPUS_SEED ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    loop {
        if let Some(c) = draw(&mut rng, seed) {
            return c;
        }
    }
}

/// Spectral radius of `Σ conj(B_k) ⊗ B_k` for the blocks `B_k` of `kraus` on
/// the axes `from..`.
fn transient_radius(kraus: &[CMatrix], from: usize) -> f64 {
    let d = kraus[0].nrows();
    let n = d - from;
    if n == 0 {
        return 0.0;
    }
    let mut t = zeros(n * n, n * n);
    for m in kraus {
        let b = CMatrix::from_fn(n, n, |i, j| m[(from + i, from + j)]);
        t = &t + &linalg::kron(&linalg::conj(&b), &b);
    }
    linalg::eig(&t).unwrap().spectral_radius
}

fn draw(rng: &mut ChaCha8Rng, seed: u64) -> Option<Case> {
    let d = rng.random_range(2..=6usize);
    let k = rng.random_range(1..=4usize);
    let planted_trap = d >= 3 && rng.random_bool(0.25);
    let room = d - usize::from(planted_trap);
    let m = rng.random_range(1..room);
    let two_parts = m >= 2 && rng.random_bool(0.5);
    let split = if two_parts { rng.random_range(1..m) } else { m };

    let mut labels = Vec::with_capacity(d);
    for i in 0..d {
        labels.push(if i < split {
            Block::Part(0)
        } else if i < m {
            Block::Part(1)
        } else if i < room {
            Block::Rest
        } else {
            Block::Trap
        });
    }
    // Sparse couplings give multi-stage decompositions more often.
    let sparse = rng.random_bool(0.3);
    let mut raw = Vec::with_capacity(k);
    for _ in 0..k {
        let mut a = gaussian(rng, d, d);
        for i in 0..d {
            for j in 0..d {
                let keep = allowed(labels[i], labels[j])
                    && !(sparse && labels[i] != labels[j] && rng.random_bool(0.5));
                if !keep {
                    a[(i, j)] = c64::new(0.0, 0.0);
                }
            }
        }
        raw.push(a);
    }
    let mut g = zeros(d, d);
    for a in &raw {
        g = &g + &(&adjoint(a) * a);
    }
    let c_inv = solve(&cholesky_upper(&g), &linalg::identity(d)).unwrap();
    let hidden: Vec<CMatrix> = raw.iter().map(|a| a * &c_inv).collect();
    let sigma = transient_radius(&hidden, m);
    if sigma > MIXING_MAX && sigma < 1.0 - CRITICAL_GAP {
        return None;
    }
    let u = random_unitary(rng, d);
    let kraus = hidden.iter().map(|m| &(&u * m) * &adjoint(&u)).collect();
    let map = KrausMap::new(kraus).unwrap();

    let tol = Tolerances::default();
    let embed = |idx: Vec<usize>| {
        let cols = CMatrix::from_fn(d, idx.len(), |i, j| u[(i, idx[j])]);
        SubspaceBasis::new(cols, &tol).unwrap()
    };
    let mut parts = vec![embed((0..split).collect())];
    if two_parts {
        parts.push(embed((split..m).collect()));
    }
    let hs = embed((0..m).collect());
    Some(Case {
        seed,
        map,
        parts,
        hs,
        planted_trap,
    })
}

pub fn corpus() -> Vec<Case> {
    (0..CORPUS_SIZE as u64).map(case).collect()
}
