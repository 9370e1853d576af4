// SPDX-License-Identifier: Apache-2.0

//! Benchmark fixtures.

use qdec_core::linalg::{self, adjoint, c64, range, solve, zeros, CMatrix};
use qdec_core::{KrausMap, SubspaceBasis, Tolerances};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        c64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Random trace-preserving map on `d` levels, `k` Kraus operators, with the
/// first `m` basis vectors (after a random rotation) spanning a GAS subspace.
pub fn random_gas_channel(d: usize, k: usize, m: usize, seed: u64) -> (KrausMap, SubspaceBasis) {
    assert!(m >= 1 && m < d && k >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<CMatrix> = (0..k)
        .map(|_| {
            let mut a = gaussian(&mut rng, d, d);
            for i in m..d {
                for j in 0..m {
                    a[(i, j)] = c64::new(0.0, 0.0);
                }
            }
            a
        })
        .collect();
    let mut g = zeros(d, d);
    for a in &raw {
        g = &g + &(&adjoint(a) * a);
    }
    // g = C†C with C upper triangular, so M_k = A_k C⁻¹ keeps the zero block.
    let mut c = zeros(d, d);
    for i in 0..d {
        let mut diag = g[(i, i)].re;
        for l in 0..i {
            diag -= c[(l, i)].norm_sqr();
        }
        let cii = diag.sqrt();
        c[(i, i)] = c64::new(cii, 0.0);
        for j in i + 1..d {
            let mut v = g[(i, j)];
            for l in 0..i {
                v -= c[(l, i)].conj() * c[(l, j)];
            }
            c[(i, j)] = v / cii;
        }
    }
    let c_inv = solve(&c, &linalg::identity(d)).expect("positive definite");
    let tol = Tolerances::default();
    let u = range(&gaussian(&mut rng, d, d), &tol)
        .expect("full rank")
        .into_basis();
    let kraus = raw.iter().map(|a| &(&u * &(a * &c_inv)) * &adjoint(&u)).collect();
    let hs = CMatrix::from_fn(d, m, |i, j| u[(i, j)]);
    (
        KrausMap::new(kraus).expect("square Kraus operators"),
        SubspaceBasis::new(hs, &tol).expect("orthonormal columns"),
    )
}
