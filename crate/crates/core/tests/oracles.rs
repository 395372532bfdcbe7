//! Library results against independently computed references.

mod common;

use common::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use tensor_ginv::fixtures::fixture;
use tensor_ginv::ginv::identity_residual;
use tensor_ginv::{
    bc_inverse, check_reverse_order, einstein_product, inner_product, moore_penrose, outer_inverse_null,
    outer_inverse_range, rsh, rsh_inv, rshrank, subspace_relation, Config, IdentityKind, Matrix, Relation, Tensor,
};

/// Newton-Schulz iteration `X <- X (2I - A X)` from `X0 = A* / |A|_F^2`,
/// which converges to the pseudoinverse. Rounding error outside the range
/// doubles every step, so iteration stops once steps stop shrinking.
fn newton_schulz(a: &Matrix) -> Matrix {
    let scale = a.norm_squared();
    let mut x = a.adjoint().map(|z| z / scale);
    let two = Matrix::identity(a.nrows(), a.nrows()) * Complex64::new(2.0, 0.0);
    let mut last = f64::INFINITY;
    for _ in 0..500 {
        let next = &x * (&two - a * &x);
        let step = (&next - &x).norm();
        if step >= last && step <= 1e-8 * x.norm() {
            break;
        }
        x = next;
        last = step;
    }
    x
}

/// Largest singular value by power iteration on `A* A`.
fn power_iteration(a: &Matrix) -> f64 {
    let g = a.adjoint() * a;
    let mut v = DMatrix::from_element(g.ncols(), 1, Complex64::new(1.0, 0.3));
    let mut lambda = 0.0;
    for _ in 0..2000 {
        let w = &g * &v;
        let n = w.norm();
        if n == 0.0 {
            return 0.0;
        }
        v = w.map(|z| z / n);
        lambda = n;
    }
    lambda.sqrt()
}

#[test]
fn product_matches_explicit_summation() {
    let mut rng = rng(11);
    for _ in 0..50 {
        let (s, m, t) = (block(&mut rng), block(&mut rng), block(&mut rng));
        let a = random_tensor(&mut rng, s, m, true);
        let b = random_tensor(&mut rng, m, t, true);
        let ab = einstein_product(&a, &b, m.len()).unwrap();
        let oracle = Tensor::new(ab.shape().clone(), einstein_oracle(&a, &b, m.len())).unwrap();
        assert!(rel_diff(&ab, &oracle) <= 1e-12);
    }
}

#[test]
fn partial_contraction_matches_summation() {
    // contract one of two shared axes
    let mut rng = rng(12);
    let a = random_tensor(&mut rng, &[2, 3], &[2, 2], false);
    let b = random_tensor(&mut rng, &[2, 3], &[2], false);
    let ab = einstein_product(&a, &b, 1).unwrap();
    assert_eq!(ab.shape().extents(), &[2, 3, 2, 3, 2]);
    let oracle = Tensor::new(ab.shape().clone(), einstein_oracle(&a, &b, 1)).unwrap();
    assert!(rel_diff(&ab, &oracle) <= 1e-12);
}

#[test]
fn spectral_norm_matches_power_iteration() {
    let mut rng = rng(13);
    for _ in 0..20 {
        let (s, t) = (block(&mut rng), block(&mut rng));
        let a = random_tensor(&mut rng, s, t, true);
        let reference = power_iteration(&rsh(&a));
        assert!((a.spectral_norm() - reference).abs() <= 1e-8 * reference);
    }
}

#[test]
fn inner_product_is_flat_dot() {
    let mut rng = rng(14);
    let a = random_tensor(&mut rng, &[3, 2], &[2], true);
    let b = random_tensor(&mut rng, &[3, 2], &[2], true);
    let mut flat = Complex64::new(0.0, 0.0);
    for idx in indices(a.shape().extents()) {
        flat += a.get(&idx).unwrap() * b.get(&idx).unwrap().conj();
    }
    assert!((inner_product(&a, &b).unwrap() - flat).norm() <= 1e-13);
}

#[test]
fn conj_transpose_is_matrix_adjoint() {
    let mut rng = rng(15);
    let a = random_tensor(&mut rng, &[2, 1, 2], &[3, 2], true);
    let h = a.conj_transpose();
    assert_eq!(h.shape().extents(), &[3, 2, 2, 1, 2]);
    assert_eq!(rsh(&h), rsh(&a).adjoint());
    // entrywise: H[j..., i...] = conj(A[i..., j...])
    for i in indices(&[2, 1, 2]) {
        for j in indices(&[3, 2]) {
            let ai: Vec<usize> = i.iter().chain(&j).copied().collect();
            let hi: Vec<usize> = j.iter().chain(&i).copied().collect();
            assert_eq!(h.get(&hi).unwrap(), a.get(&ai).unwrap().conj());
        }
    }
}

#[test]
fn reshape_round_trips_and_multiplies() {
    let mut rng = rng(16);
    for _ in 0..30 {
        let (s, m, t) = (block(&mut rng), block(&mut rng), block(&mut rng));
        let a = random_tensor(&mut rng, s, m, true);
        let b = random_tensor(&mut rng, m, t, true);
        assert_eq!(rsh_inv(&rsh(&a), a.shape()).unwrap(), a);
        let ab = a.dot(&b).unwrap();
        assert!(mat_rel_diff(&rsh(&ab), &(rsh(&a) * rsh(&b))) <= 1e-12);
    }
}

#[test]
fn moore_penrose_of_fixture_matches_newton_schulz() {
    let a = fixture("ex31_A").unwrap();
    let rep = moore_penrose(&a, &Config::default());
    assert!(rep.is_moore_penrose());
    let reference = rsh_inv(&newton_schulz(&rsh(&a)), rep.inverse.shape()).unwrap();
    assert!(rel_diff(&rep.inverse, &reference) <= 1e-10);
}

#[test]
fn moore_penrose_of_random_low_rank_matches_newton_schulz() {
    let mut rng = rng(17);
    for _ in 0..20 {
        let (s, t) = (block(&mut rng), block(&mut rng));
        let r = rng.random_range(1..=s.iter().product::<usize>().min(t.iter().product()));
        let a = low_rank(&mut rng, s, t, r, true);
        let x = moore_penrose(&a, &Config::default()).inverse;
        let reference = rsh_inv(&newton_schulz(&rsh(&a)), x.shape()).unwrap();
        assert!(rel_diff(&x, &reference) <= 1e-8, "rank {r}");
    }
}

#[test]
fn bc_inverse_does_not_depend_on_inner_inverse() {
    // M^+ + W - M^+ M W M M^+ is an inner inverse of M for any W
    let mut rng = rng(18);
    let cfg = Config::default();
    for _ in 0..20 {
        let (s, t) = (block(&mut rng), block(&mut rng));
        let r = rng.random_range(1..=s.iter().product::<usize>().min(t.iter().product()));
        let k = rng.random_range(1..=r);
        let a = low_rank(&mut rng, s, t, r, true);
        let b = random_tensor(&mut rng, t, &[k], true);
        let c = random_tensor(&mut rng, &[k], s, true);
        let m = rsh(&c.dot(&a).unwrap().dot(&b).unwrap());
        let mp = m.clone().pseudo_inverse(1e-12).unwrap();
        let w = rsh(&random_tensor(&mut rng, &[k], &[k], true));
        let other = &mp + &w - &mp * &m * &w * &m * &mp;
        assert!(mat_rel_diff(&(&m * &other * &m), &m) <= 1e-8);
        let g = rsh(&b) * other * rsh(&c);
        let expected = rsh(&bc_inverse(&a, &b, &c, &cfg).unwrap());
        assert!(mat_rel_diff(&g, &expected) <= 1e-8);
    }
}

#[test]
fn prescribed_subspace_inverses() {
    let mut rng = rng(19);
    let cfg = Config::default();
    for _ in 0..20 {
        let (s, t) = (block(&mut rng), block(&mut rng));
        let r = rng.random_range(1..=s.iter().product::<usize>().min(t.iter().product()));
        let k = rng.random_range(1..=r);
        let a = low_rank(&mut rng, s, t, r, false);
        let b = random_tensor(&mut rng, t, &[k], false);
        let c = random_tensor(&mut rng, &[k], s, false);

        let xb = outer_inverse_range(&a, &b, &cfg).unwrap();
        assert!(identity_residual(&a, &xb, IdentityKind::Outer).unwrap() <= 1e-8);
        assert!(subspace_relation(&xb, &b, Relation::RangeEqual, None)
            .unwrap()
            .all_passed());

        let xc = outer_inverse_null(&a, &c, &cfg).unwrap();
        assert!(identity_residual(&a, &xc, IdentityKind::Outer).unwrap() <= 1e-8);
        assert!(subspace_relation(&xc, &c, Relation::NullEqual, None)
            .unwrap()
            .all_passed());

        let xbc = bc_inverse(&a, &b, &c, &cfg).unwrap();
        assert!(subspace_relation(&xbc, &b, Relation::RangeEqual, None)
            .unwrap()
            .all_passed());
        assert!(subspace_relation(&xbc, &c, Relation::NullEqual, None)
            .unwrap()
            .all_passed());
        // C*A*X = C and X*A*B = B
        assert!(rel_diff(&c.dot(&a).unwrap().dot(&xbc).unwrap(), &c) <= 1e-8);
        assert!(rel_diff(&xbc.dot(&a).unwrap().dot(&b).unwrap(), &b) <= 1e-8);
    }
}

#[test]
fn rank_deficient_range_is_rejected() {
    let mut rng = rng(20);
    let a = low_rank(&mut rng, &[3], &[3], 1, false);
    let b = random_tensor(&mut rng, &[3], &[2], false);
    assert!(matches!(
        outer_inverse_range(&a, &b, &Config::default()),
        Err(tensor_ginv::Error::RankPrecondition { .. })
    ));
}

#[test]
fn reverse_order_test_agrees_with_direct_inner_check() {
    // random rank-deficient pairs: the idempotency test must decide whether
    // Q^+ P^+ is an inner inverse of P*Q, and some pairs must fail badly
    let mut rng = rng(21);
    let mut adversarial = 0;
    for _ in 0..60 {
        let (rp, rq) = (rng.random_range(1..4), rng.random_range(1..4));
        let p = low_rank(&mut rng, &[2, 2], &[2, 2], rp, false);
        let q = low_rank(&mut rng, &[2, 2], &[2, 2], rq, false);
        let cfg = Config::default().with_rank_tol(Some(1e-10));
        let (p1, q1) = (moore_penrose(&p, &cfg).inverse, moore_penrose(&q, &cfg).inverse);
        let pq = p.dot(&q).unwrap();
        if rshrank(&pq, Some(1e-10)) == 0 {
            continue;
        }
        let check = check_reverse_order(&p, &q, &p1, &q1, 1e-8).unwrap();
        let row = check.get("rol_idempotent").unwrap();
        let direct = identity_residual(&pq, &q1.dot(&p1).unwrap(), IdentityKind::Inner).unwrap() <= 1e-8;
        assert_eq!(row.passed, direct, "residual {}", row.residual);
        if row.residual > 0.1 {
            adversarial += 1;
        }
    }
    assert!(adversarial > 0);
}

#[test]
fn reverse_order_holds_for_invertible_factor() {
    let mut rng = rng(22);
    let p = random_tensor(&mut rng, &[2, 2], &[2, 2], true);
    let q = low_rank(&mut rng, &[2, 2], &[2, 2], 2, true);
    let cfg = Config::default();
    let (p1, q1) = (moore_penrose(&p, &cfg).inverse, moore_penrose(&q, &cfg).inverse);
    assert!(check_reverse_order(&p, &q, &p1, &q1, 1e-8).unwrap().all_passed());
}

#[test]
fn complex_scalars_survive_products() {
    let i = Complex64::new(0.0, 1.0);
    let id = Tensor::identity(&[2]).unwrap();
    let a = id.scale(i);
    let aa = a.dot(&a).unwrap();
    assert!(rel_diff(&aa, &id.scale(Complex64::new(-1.0, 0.0))) <= 1e-15);
}

#[test]
#[allow(clippy::excessive_precision)]
fn pseudoinverse_of_wide_rank_deficient_matrix() {
    // a rank-2 3x4 matrix on which a bidiagonal SVD that stops early loses
    // three digits
    let rows = [
        [
            -0.35302868755773847,
            0.33200769909326699,
            0.39748046189994735,
            -0.68115248993137900,
        ],
        [
            0.24283593503953929,
            0.06848869433892255,
            -0.55233226302089045,
            0.25096934350671413,
        ],
        [
            0.02228261145017921,
            0.71054066195048260,
            -0.71236579341068973,
            -0.49311791149044193,
        ],
    ];
    let m = Matrix::from_fn(3, 4, |i, j| Complex64::new(rows[i][j], 0.0));
    let a = rsh_inv(&m, &tensor_ginv::Shape::from_blocks(&[3], &[2, 2]).unwrap()).unwrap();
    assert_eq!(rshrank(&a, None), 2);
    let rep = moore_penrose(&a, &Config::default());
    assert!(rep.residuals.iter().all(|&r| r <= 1e-12), "{:?}", rep.residuals);
    let reference = rsh_inv(&newton_schulz(&m), rep.inverse.shape()).unwrap();
    assert!(rel_diff(&rep.inverse, &reference) <= 1e-8);
}
