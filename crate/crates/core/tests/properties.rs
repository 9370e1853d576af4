// SPDX-License-Identifier: Apache-2.0

mod common;

use proptest::prelude::*;
use qdec_core::asymptotics::{iterate_oracle, AsymptoticAnalysis, AsymptoticOptions};
use qdec_core::io::ChannelFile;
use qdec_core::linalg::{
    self, adjoint, c64, eig, frobenius, identity, kernel, min_eigenvalue, orth_complement, psd_cone_project,
    range, trace_product, CMatrix,
};
use qdec_core::{did, nfd, DensityOperator, SubspaceBasis, Tolerances};

fn tol() -> Tolerances {
    Tolerances::default()
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn hermitian(rng: &mut impl rand::Rng, n: usize) -> CMatrix {
    linalg::hermitian_part(&common::gaussian(rng, n, n))
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn dual_is_the_hilbert_schmidt_adjoint(seed in any::<u64>()) {
        let c = common::case(seed);
        let mut rng = common::rng(seed);
        let d = c.map.dim();
        let x = common::gaussian(&mut rng, d, d);
        let y = common::gaussian(&mut rng, d, d);
        let lhs = trace_product(&adjoint(&y), &c.map.apply(&x).unwrap());
        let rhs = trace_product(&adjoint(&c.map.apply_dual(&y).unwrap()), &x);
        prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + lhs.norm()));
    }

    #[test]
    fn dual_of_a_channel_is_unital(seed in any::<u64>()) {
        let c = common::case(seed);
        let d = c.map.dim();
        let img = c.map.apply_dual(&identity(d)).unwrap();
        prop_assert!(frobenius(&(&img - &identity(d))) < 1e-10);
        prop_assert!(c.map.validate(&tol()).is_tp);
    }

    #[test]
    fn superoperator_matches_kraus_action(seed in any::<u64>()) {
        let c = common::case(seed);
        let mut rng = common::rng(seed);
        let x = common::gaussian(&mut rng, c.map.dim(), c.map.dim());
        let a = c.map.superoperator().apply(&x).unwrap();
        let b = c.map.apply(&x).unwrap();
        prop_assert!(frobenius(&(&a - &b)) < 1e-10);
    }

    #[test]
    fn invariance_matches_subharmonicity(seed in any::<u64>()) {
        let t = tol();
        let c = common::case(seed);
        let mut rng = common::rng(seed ^ 1);
        // A planted invariant subspace and a random one, which is almost
        // surely not invariant.
        prop_assert!(c.map.is_invariant(&c.hs, &t).unwrap().invariant);
        prop_assert!(c.map.is_subharmonic(&c.hs, &t).unwrap());
        let d = c.map.dim();
        let k = d / 2;
        let random = range(&common::gaussian(&mut rng, d, k.max(1)), &t).unwrap();
        if !random.is_full() {
            let inv = c.map.is_invariant(&random, &t).unwrap().invariant;
            prop_assert_eq!(inv, c.map.is_subharmonic(&random, &t).unwrap());
        }
    }

    #[test]
    fn image_support_depends_only_on_input_support(seed in any::<u64>()) {
        let t = tol();
        let c = common::case(seed);
        let mut rng = common::rng(seed ^ 2);
        let rho = common::random_state_on(&mut rng, &c.hs);
        let a = range(&c.map.apply(rho.matrix()).unwrap(), &t).unwrap();
        let b = range(&c.map.apply(&c.hs.projector()).unwrap(), &t).unwrap();
        prop_assert!(a.same_as(&b, &t));
        prop_assert!(c.hs.contains(&a, &t));
    }

    #[test]
    fn parts_are_exactly_invariant(seed in any::<u64>()) {
        let t = tol();
        let c = common::case(seed);
        for p in &c.parts {
            prop_assert!(c.map.is_invariant(p, &t).unwrap().invariant);
        }
    }

    #[test]
    fn nfd_radii_are_eigenvalues_of_the_full_map(seed in any::<u64>()) {
        let t = tol();
        let c = common::case(seed);
        let res = nfd::nfd(&c.map, &c.hs, &t).unwrap();
        let spectrum = eig(&c.map.superoperator().matrix).unwrap();
        for s in res.radii() {
            let dist = spectrum
                .eigenvalues
                .iter()
                .map(|l| (l - c64::new(s, 0.0)).norm())
                .fold(f64::INFINITY, f64::min);
            prop_assert!(dist < 1e-7, "radius {s} is {dist:.3e} from the spectrum");
        }
        prop_assert!((spectrum.spectral_radius - 1.0).abs() < 1e-8);
        let dims: usize = res.stages.iter().map(|s| s.ht.dim()).sum();
        prop_assert_eq!(dims + c.hs.dim(), c.map.dim());
    }

    #[test]
    fn did_chain_matches_dual_supports(seed in any::<u64>()) {
        let t = tol();
        let c = common::case(seed);
        let res = did::did(&c.map, &c.hs, &t).unwrap();
        if res.is_successful() {
            prop_assert!(did::did_dual_consistency(&c.map, &c.hs, &t).unwrap());
            res.check_block_form(c.map.scale(), &t).unwrap();
        } else {
            let trapped = res.trapped().unwrap();
            prop_assert!(c.map.is_invariant(trapped, &t).unwrap().invariant);
        }
    }

    #[test]
    fn nfd_minimal_gas_is_gas(seed in any::<u64>()) {
        let t = tol();
        let c = common::case(seed);
        let res = nfd::nfd(&c.map, &c.hs, &t).unwrap();
        prop_assert!(did::is_gas_did(&c.map, &res.minimal_gas, &t).unwrap());
        prop_assert!(res.minimal_gas.contains(&c.hs, &t));
    }

    #[test]
    fn probabilities_are_affine_complete_and_route_independent(seed in any::<u64>()) {
        let t = tol();
        let c = common::case(seed);
        prop_assume!(did::is_gas_did(&c.map, &c.hs, &t).unwrap());
        let an = AsymptoticAnalysis::new(&c.map, &c.parts, &AsymptoticOptions::default(), &t).unwrap();
        let mut rng = common::rng(seed ^ 3);
        let a = common::random_state(&mut rng, c.map.dim());
        let b = common::random_state(&mut rng, c.map.dim());
        let mix = linalg::scale_real(&(&linalg::scale_real(a.matrix(), 3.0) + b.matrix()), 0.25);
        let mix = DensityOperator::new(mix, &t).unwrap();
        let (pa, pb, pm) = (an.report(&a).unwrap(), an.report(&b).unwrap(), an.report(&mix).unwrap());
        for i in 0..c.parts.len() {
            let want = 0.75 * pa.raw.parts[i] + 0.25 * pb.raw.parts[i];
            prop_assert!((pm.raw.parts[i] - want).abs() < 1e-10);
        }
        for r in [&pa, &pb, &pm] {
            prop_assert!((r.raw.total() - 1.0).abs() < 1e-9);
            prop_assert!(r.route_gap <= 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn closed_form_matches_long_iteration(seed in any::<u64>()) {
        let t = tol();
        let c = common::case(seed);
        prop_assume!(did::is_gas_did(&c.map, &c.hs, &t).unwrap());
        let an = AsymptoticAnalysis::new(&c.map, &c.parts, &AsymptoticOptions::default(), &t).unwrap();
        let mut rng = common::rng(seed ^ 4);
        let rho = common::random_state(&mut rng, c.map.dim());
        let late = iterate_oracle(&c.map, &rho, 2000, &t).unwrap();
        let p = an.probabilities(&rho).unwrap();
        for (x, part) in p.parts.iter().zip(&c.parts) {
            let y = trace_product(&part.projector(), late.matrix()).re;
            prop_assert!((x - y).abs() < 1e-6);
        }
    }

    #[test]
    fn channel_files_round_trip_exactly(seed in any::<u64>()) {
        let c = common::case(seed);
        let file = ChannelFile::from_map(&c.map, None);
        let back = ChannelFile::parse(&file.to_json()).unwrap().to_map().unwrap();
        for (a, b) in c.map.kraus().iter().zip(back.kraus()) {
            prop_assert!(a == b);
        }
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn kernel_and_range_are_complementary(seed in any::<u64>(), rows in 1usize..6, cols in 1usize..6, rank in 0usize..6) {
        let t = tol();
        let mut rng = common::rng(seed);
        let rank = rank.min(rows).min(cols);
        let a = &common::gaussian(&mut rng, rows, rank) * &common::gaussian(&mut rng, rank, cols);
        let k = kernel(&a, &t).unwrap();
        let r = range(&adjoint(&a), &t).unwrap();
        prop_assert_eq!(k.dim() + r.dim(), cols);
        prop_assert_eq!(r.dim(), rank);
        prop_assert!(frobenius(&(&adjoint(k.basis()) * r.basis())) < 1e-10);
        prop_assert!(frobenius(&(&a * k.basis())) < 1e-9 * (1.0 + frobenius(&a)));
    }

    #[test]
    fn complement_is_an_involution(seed in any::<u64>(), n in 1usize..7, k in 0usize..7) {
        let t = tol();
        let mut rng = common::rng(seed);
        let k = k.min(n);
        let u = if k == 0 { SubspaceBasis::zero(n) } else { range(&common::gaussian(&mut rng, n, k), &t).unwrap() };
        let c = orth_complement(&u, &t).unwrap();
        prop_assert_eq!(c.dim() + u.dim(), n);
        prop_assert!(orth_complement(&c, &t).unwrap().same_as(&u, &t));
        let sum = &u.projector() + &c.projector();
        prop_assert!(frobenius(&(&sum - &identity(n))) < 1e-10);
    }

    #[test]
    fn psd_projection_is_idempotent_and_nearest(seed in any::<u64>(), n in 1usize..6) {
        let t = tol();
        let mut rng = common::rng(seed);
        let a = hermitian(&mut rng, n);
        let p = psd_cone_project(&a, &t).unwrap();
        prop_assert!(min_eigenvalue(&p).unwrap() >= -1e-12);
        let pp = psd_cone_project(&p, &t).unwrap();
        prop_assert!(frobenius(&(&pp - &p)) < 1e-10);
        // Any other PSD matrix is at least as far from `a`.
        let g = common::gaussian(&mut rng, n, n);
        let other = &g * &adjoint(&g);
        prop_assert!(frobenius(&(&a - &p)) <= frobenius(&(&a - &other)) + 1e-12);
    }

    #[test]
    fn eigenvalues_multiply_to_the_determinant(seed in any::<u64>(), n in 1usize..5) {
        let mut rng = common::rng(seed);
        let a = common::gaussian(&mut rng, n, n);
        let prod = eig(&a).unwrap().eigenvalues.iter().fold(c64::new(1.0, 0.0), |acc, l| acc * l);
        // Determinant by Laplace expansion, independent of any factorization.
        fn det(m: &[Vec<c64>]) -> c64 {
            if m.len() == 1 {
                return m[0][0];
            }
            let mut acc = c64::new(0.0, 0.0);
            for j in 0..m.len() {
                let minor: Vec<Vec<c64>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| *v).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                acc += m[0][j] * det(&minor) * sign;
            }
            acc
        }
        let rows: Vec<Vec<c64>> = (0..n).map(|i| (0..n).map(|j| a[(i, j)]).collect()).collect();
        let want = det(&rows);
        prop_assert!((prod - want).norm() < 1e-9 * (1.0 + want.norm()));
    }

    #[test]
    fn remixing_preserves_the_map(seed in any::<u64>()) {
        let c = common::case(seed);
        let mut rng = common::rng(seed ^ 5);
        let u = common::random_unitary(&mut rng, c.map.num_kraus());
        let remixed = c.map.remix(&u).unwrap();
        let a = c.map.superoperator().matrix;
        let b = remixed.superoperator().matrix;
        prop_assert!(frobenius(&(&a - &b)) < 1e-10);
    }
}
