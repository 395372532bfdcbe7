//! Algebraic invariants over random small tensors.

mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use tensor_ginv::ginv::identity_residual;
use tensor_ginv::perturb::multiplicative_bound;
use tensor_ginv::{
    inner_product, linear_combine, moore_penrose, outer_inverse_range, perturb_outer, resolvents, rshrank,
    square_inverse, subspace_relation, Config, IdentityKind, Norm, Relation, Tensor,
};

/// Three chainable tensors `S x M`, `M x N`, `N x T`.
fn chain(seed: u64) -> (Tensor, Tensor, Tensor) {
    let mut rng = rng(seed);
    let (s, m, n, t) = (block(&mut rng), block(&mut rng), block(&mut rng), block(&mut rng));
    let complex = rng.random_bool(0.5);
    (
        random_tensor(&mut rng, s, m, complex),
        random_tensor(&mut rng, m, n, complex),
        random_tensor(&mut rng, n, t, complex),
    )
}

fn low_rank_seeded(seed: u64) -> Tensor {
    let mut rng = rng(seed);
    let (s, t) = (block(&mut rng), block(&mut rng));
    let r = rng.random_range(1..=s.iter().product::<usize>().min(t.iter().product()));
    let complex = rng.random_bool(0.5);
    low_rank(&mut rng, s, t, r, complex)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_associative(seed in any::<u64>()) {
        let (a, b, d) = chain(seed);
        let left = a.dot(&b).unwrap().dot(&d).unwrap();
        let right = a.dot(&b.dot(&d).unwrap()).unwrap();
        prop_assert!(rel_diff(&left, &right) <= 1e-12);
    }

    #[test]
    fn product_is_bilinear(seed in any::<u64>(), ar in -2.0..2.0f64, ai in -2.0..2.0f64, br in -2.0..2.0f64) {
        let (a, b, _) = chain(seed);
        let mut rng = rng(seed ^ 0x1234);
        let b2 = random_tensor(&mut rng, b.shape().row_extents(), b.shape().col_extents(), true);
        let (alpha, beta) = (c(ar, ai), c(br, 0.0));
        let lhs = a.dot(&linear_combine(alpha, &b, beta, &b2).unwrap()).unwrap();
        let rhs = linear_combine(alpha, &a.dot(&b).unwrap(), beta, &a.dot(&b2).unwrap()).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().frobenius_norm() <= 1e-12 * (1.0 + rhs.frobenius_norm()));
    }

    #[test]
    fn adjoint_reverses_products(seed in any::<u64>()) {
        let (a, b, _) = chain(seed);
        let lhs = a.dot(&b).unwrap().conj_transpose();
        let rhs = b.conj_transpose().dot(&a.conj_transpose()).unwrap();
        prop_assert!(rel_diff(&lhs, &rhs) <= 1e-12);
        prop_assert_eq!(a.conj_transpose().conj_transpose(), a);
    }

    #[test]
    fn norms_are_consistent(seed in any::<u64>()) {
        let a = low_rank_seeded(seed);
        let (f, s) = (a.frobenius_norm(), a.spectral_norm());
        let r = rshrank(&a, None) as f64;
        prop_assert!(s <= f * (1.0 + 1e-12));
        prop_assert!(f <= r.sqrt() * s * (1.0 + 1e-12));
        let ip = inner_product(&a, &a).unwrap();
        prop_assert!((ip.re - f * f).abs() <= 1e-12 * f * f && ip.im.abs() <= 1e-12 * f * f);
    }

    #[test]
    fn norms_are_submultiplicative(seed in any::<u64>()) {
        let (a, b, _) = chain(seed);
        let ab = a.dot(&b).unwrap();
        for norm in [Norm::Frobenius, Norm::Spectral] {
            prop_assert!(ab.norm(norm) <= a.norm(norm) * b.norm(norm) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn rank_is_adjoint_invariant_and_bounded_by_factors(seed in any::<u64>()) {
        let a = low_rank_seeded(seed);
        let b = low_rank_seeded(seed ^ 0x9e37);
        prop_assert_eq!(rshrank(&a, None), rshrank(&a.conj_transpose(), None));
        if a.shape().col_extents() == b.shape().row_extents() {
            // cancellation in A*B can leave roundoff above the default
            // cutoff relative to its own small top singular value
            let tol = Some(1e-10);
            let ab = a.dot(&b).unwrap();
            prop_assert!(rshrank(&ab, tol) <= rshrank(&a, tol).min(rshrank(&b, tol)));
        }
    }

    #[test]
    fn moore_penrose_satisfies_all_four_identities(seed in any::<u64>()) {
        let a = low_rank_seeded(seed);
        let rep = moore_penrose(&a, &Config::default());
        prop_assert!(rep.is_moore_penrose(), "{:?}", rep.residuals);
        prop_assert_eq!(rshrank(&rep.inverse, None), rshrank(&a, None));
    }

    #[test]
    fn range_prescribed_inverse_has_that_range(seed in any::<u64>()) {
        let a = low_rank_seeded(seed);
        let mut rng = rng(seed ^ 0x55);
        let k = rng.random_range(1..=rshrank(&a, None));
        let b = random_tensor(&mut rng, a.shape().col_extents(), &[k], true);
        let x = outer_inverse_range(&a, &b, &Config::default()).unwrap();
        prop_assert!(identity_residual(&a, &x, IdentityKind::Outer).unwrap() <= 1e-8);
        prop_assert!(subspace_relation(&x, &b, Relation::RangeEqual, None).unwrap().all_passed());
        // X*A is a projector onto R(B)
        let xa = x.dot(&a).unwrap();
        prop_assert!(rel_diff(&xa.dot(&b).unwrap(), &b) <= 1e-8);
    }

    #[test]
    fn neumann_bounds(seed in any::<u64>(), target in 0.01..0.95f64) {
        // |(I+F)^-1|_2 <= 1/(1-|F|_2) and |(I+F)^-1 - I|_F <= |F|_F/(1-|F|_F)
        let mut rng = rng(seed);
        let half = block(&mut rng);
        let f0 = random_tensor(&mut rng, half, half, true);
        let f = scaled(&f0, target / f0.frobenius_norm());
        let id = Tensor::identity(half).unwrap();
        let inv = square_inverse(&id.add(&f).unwrap()).unwrap();
        let (nf, ns) = (f.frobenius_norm(), f.spectral_norm());
        prop_assert!(inv.spectral_norm() <= (1.0 / (1.0 - ns)) * (1.0 + 1e-10));
        prop_assert!(inv.sub(&id).unwrap().frobenius_norm() <= nf / (1.0 - nf) * (1.0 + 1e-10));
    }

    #[test]
    fn resolvents_intertwine(seed in any::<u64>(), target in 0.01..0.9f64) {
        let a = low_rank_seeded(seed);
        let mut rng = rng(seed ^ 0xabc);
        let x = moore_penrose(&a, &Config::default()).inverse;
        let e0 = random_tensor(&mut rng, a.shape().row_extents(), a.shape().col_extents(), true);
        let e = scaled(&e0, target / e0.dot(&x).unwrap().spectral_norm());
        let res = resolvents(&x, &e, Norm::Spectral).unwrap();
        prop_assert!(res.hypothesis_ok);
        prop_assert!(res.intertwining_residual(&x).unwrap() <= 1e-10);
    }

    #[test]
    fn outer_perturbation_under_gate(seed in any::<u64>(), target in 0.01..0.95f64, spectral in any::<bool>()) {
        let a = low_rank_seeded(seed);
        let norm = if spectral { Norm::Spectral } else { Norm::Frobenius };
        let cfg = Config::default().with_norm(norm).with_rank_tol(Some(1e-10));
        let mut rng = rng(seed ^ 0x77);
        let x = moore_penrose(&a, &cfg).inverse;
        let e0 = random_tensor(&mut rng, a.shape().row_extents(), a.shape().col_extents(), true);
        let e = e0.dot(&x).unwrap().dot(&a).unwrap();
        let e = scaled(&e, target / e.dot(&x).unwrap().norm(norm));
        let r = perturb_outer(&a, &x, &e, &cfg).unwrap();
        prop_assert!(r.ok(), "{:?}", r.conditions);
        prop_assert!(r.bound_holds);
    }
}

#[test]
fn bound_grows_without_limit_as_coupling_approaches_one() {
    // with E = t * (E0*X*A)/|E0*X*A*X| the coupling is exactly t
    let a = low_rank_seeded(5);
    let cfg = Config::default().with_rank_tol(Some(1e-10));
    let x = moore_penrose(&a, &cfg).inverse;
    let mut rng = rng(6);
    let e0 = random_tensor(&mut rng, a.shape().row_extents(), a.shape().col_extents(), false);
    let base = e0.dot(&x).unwrap().dot(&a).unwrap();
    let unit = scaled(&base, 1.0 / base.dot(&x).unwrap().frobenius_norm());
    let mut last = 0.0;
    for t in [0.1, 0.3, 0.5, 0.7, 0.9, 0.95, 0.99] {
        let r = perturb_outer(&a, &x, &scaled(&unit, t), &cfg).unwrap();
        let bound = r.bound.unwrap();
        assert!((bound - multiplicative_bound(t).unwrap()).abs() <= 1e-9 * bound);
        assert!(bound > last);
        assert!(r.ok() && r.bound_holds, "t = {t}");
        last = bound;
    }
    assert!(last > 100.0);
    assert_eq!(multiplicative_bound(1.0), None);
}
