//! Inner, outer, (B)-, (C)- and (B,C)-inverses, Penrose checks and the
//! subspace predicates used as perturbation hypotheses.
//!
//! Every inner inverse produced here is the Moore-Penrose inverse; callers that
//! need a different `{1}`-inverse pass it in explicitly.

use serde::Serialize;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::report::{relative, Condition, ConditionReport};
use crate::reshape::{self, hstack, matrix_rank, null_space, pinv_matrix, rsh, rsh_inv, rshrank};
use crate::tensor::Tensor;

/// A computed inverse plus the residuals of the four Penrose identities
/// `AXA = A`, `XAX = X`, `(AX)* = AX`, `(XA)* = XA`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InverseReport {
    #[serde(skip)]
    pub inverse: Tensor,
    pub penrose_flags: [bool; 4],
    pub residuals: [f64; 4],
    pub tolerance: f64,
}

impl InverseReport {
    pub fn is_moore_penrose(&self) -> bool {
        self.penrose_flags.iter().all(|&f| f)
    }
}

/// Identity checked by [`verify_identity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdentityKind {
    Inner,
    Outer,
    Penrose3,
    Penrose4,
}

impl IdentityKind {
    pub fn key(self) -> &'static str {
        match self {
            IdentityKind::Inner => "inner_identity",
            IdentityKind::Outer => "outer_identity",
            IdentityKind::Penrose3 => "penrose_3",
            IdentityKind::Penrose4 => "penrose_4",
        }
    }
}

/// Relation decided by [`subspace_relation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    RangeEqual,
    NullEqual,
    RangeIntersectionTrivial,
}

impl Relation {
    pub fn key(self) -> &'static str {
        match self {
            Relation::RangeEqual => "range_match",
            Relation::NullEqual => "null_match",
            Relation::RangeIntersectionTrivial => "trivial_intersection",
        }
    }
}

fn check_inverse_shape(a: &Tensor, x: &Tensor) -> Result<()> {
    let expected = a.shape().transposed();
    if x.shape() != &expected {
        return Err(Error::ShapeDiffers {
            left: expected.extents().to_vec(),
            right: x.shape().extents().to_vec(),
        });
    }
    Ok(())
}

/// Relative residual of one identity for the pair `(a, x)`.
pub fn identity_residual(a: &Tensor, x: &Tensor, kind: IdentityKind) -> Result<f64> {
    check_inverse_shape(a, x)?;
    let residual = match kind {
        IdentityKind::Inner => {
            let axa = a.dot(x)?.dot(a)?;
            relative(axa.sub(a)?.frobenius_norm(), a.frobenius_norm())
        }
        IdentityKind::Outer => {
            let xax = x.dot(a)?.dot(x)?;
            relative(xax.sub(x)?.frobenius_norm(), x.frobenius_norm())
        }
        IdentityKind::Penrose3 => hermitian_defect(&a.dot(x)?)?,
        IdentityKind::Penrose4 => hermitian_defect(&x.dot(a)?)?,
    };
    Ok(residual)
}

fn hermitian_defect(p: &Tensor) -> Result<f64> {
    Ok(relative(
        p.conj_transpose().sub(p)?.frobenius_norm(),
        p.frobenius_norm(),
    ))
}

/// Checks one defining identity of `x` with respect to `a`.
pub fn verify_identity(a: &Tensor, x: &Tensor, kind: IdentityKind, tol: f64) -> Result<ConditionReport> {
    let residual = identity_residual(a, x, kind)?;
    Ok(Condition::at_most(kind.key(), residual, tol).into())
}

/// Residuals of all four Penrose identities.
pub fn penrose_report(a: &Tensor, x: &Tensor, tol: f64) -> Result<InverseReport> {
    let kinds = [
        IdentityKind::Inner,
        IdentityKind::Outer,
        IdentityKind::Penrose3,
        IdentityKind::Penrose4,
    ];
    let mut residuals = [0.0; 4];
    for (r, kind) in residuals.iter_mut().zip(kinds) {
        *r = identity_residual(a, x, kind)?;
    }
    Ok(InverseReport {
        inverse: x.clone(),
        penrose_flags: residuals.map(|r| r <= tol),
        residuals,
        tolerance: tol,
    })
}

/// Moore-Penrose inverse via the SVD pseudoinverse of `rsh(a)`.
pub fn moore_penrose(a: &Tensor, cfg: &Config) -> InverseReport {
    let x = pinv(a, cfg.rank_tol);
    penrose_report(a, &x, cfg.tol).expect("pseudoinverse has the transposed shape")
}

pub(crate) fn pinv(a: &Tensor, rank_tol: Option<f64>) -> Tensor {
    let m = pinv_matrix(&rsh(a), rank_tol);
    rsh_inv(&m, &a.shape().transposed()).expect("pseudoinverse has the transposed shape")
}

/// An inner inverse of `a` (the Moore-Penrose inverse).
pub fn inner_inverse(a: &Tensor, cfg: &Config) -> Tensor {
    pinv(a, cfg.rank_tol)
}

/// `B * (A*B)^(1)`, the outer inverse with range `R(B)`.
///
/// Requires `rshrank(A*B) = rshrank(B)`.
pub fn outer_inverse_range(a: &Tensor, b: &Tensor, cfg: &Config) -> Result<Tensor> {
    let ab = a.dot(b)?;
    let (r_ab, r_b) = (rshrank(&ab, cfg.rank_tol), rshrank(b, cfg.rank_tol));
    if r_ab != r_b {
        return Err(Error::RankPrecondition {
            detail: format!("rshrank(A*B)={r_ab} differs from rshrank(B)={r_b}"),
        });
    }
    b.dot(&pinv(&ab, cfg.rank_tol))
}

/// `(C*A)^(1) * C`, the outer inverse with null space `N(C)`.
///
/// Requires `rshrank(C*A) = rshrank(C)`.
pub fn outer_inverse_null(a: &Tensor, c: &Tensor, cfg: &Config) -> Result<Tensor> {
    let ca = c.dot(a)?;
    let (r_ca, r_c) = (rshrank(&ca, cfg.rank_tol), rshrank(c, cfg.rank_tol));
    if r_ca != r_c {
        return Err(Error::RankPrecondition {
            detail: format!("rshrank(C*A)={r_ca} differs from rshrank(C)={r_c}"),
        });
    }
    pinv(&ca, cfg.rank_tol).dot(c)
}

/// `B * (C*A*B)^(1) * C`, the (B,C)-inverse.
///
/// Requires `rshrank(C*A*B) = rshrank(C) = rshrank(B)`.
pub fn bc_inverse(a: &Tensor, b: &Tensor, c: &Tensor, cfg: &Config) -> Result<Tensor> {
    let cab = c.dot(a)?.dot(b)?;
    let r_cab = rshrank(&cab, cfg.rank_tol);
    let (r_c, r_b) = (rshrank(c, cfg.rank_tol), rshrank(b, cfg.rank_tol));
    if r_cab != r_c || r_c != r_b {
        return Err(Error::RankPrecondition {
            detail: format!("rshrank(C*A*B)={r_cab}, rshrank(C)={r_c}, rshrank(B)={r_b} are not all equal"),
        });
    }
    b.dot(&pinv(&cab, cfg.rank_tol))?.dot(c)
}

/// Relative idempotency defect `|M*M - M| / |M|` of a square tensor.
pub fn idempotency_defect(m: &Tensor) -> Result<f64> {
    let mm = m.dot(m)?;
    Ok(relative(mm.sub(m)?.frobenius_norm(), m.frobenius_norm()))
}

/// Reverse-order-law test: `(Q^(1) * P^(1))` is an inner inverse of `P*Q`
/// exactly when `P^(1)*P*Q*Q^(1)` is idempotent.
pub fn check_reverse_order(p: &Tensor, q: &Tensor, p1: &Tensor, q1: &Tensor, tol: f64) -> Result<ConditionReport> {
    let projector = p1.dot(p)?.dot(q)?.dot(q1)?;
    let residual = idempotency_defect(&projector)?;
    Ok(Condition::at_most("rol_idempotent", residual, tol).into())
}

/// Decides a subspace relation between `x` and `y` by rank arithmetic on the
/// reshaped matrices.
///
/// * range equality: `rank[X|Y] = rank X = rank Y`
/// * null-space equality: range equality of the conjugate transposes
/// * trivial range intersection: `rank[X|Y] = rank X + rank Y`
pub fn subspace_relation(x: &Tensor, y: &Tensor, relation: Relation, rank_tol: Option<f64>) -> Result<ConditionReport> {
    let (mx, my) = match relation {
        Relation::NullEqual => (rsh(x).adjoint(), rsh(y).adjoint()),
        _ => (rsh(x), rsh(y)),
    };
    Ok(matrix_relation(&mx, &my, relation, rank_tol)?.into())
}

pub(crate) fn matrix_relation(
    x: &reshape::Matrix,
    y: &reshape::Matrix,
    relation: Relation,
    rank_tol: Option<f64>,
) -> Result<Condition> {
    let stacked = hstack(x, y)?;
    let (rx, ry) = (matrix_rank(x, rank_tol), matrix_rank(y, rank_tol));
    let rxy = matrix_rank(&stacked, rank_tol);
    let detail = format!("rank X={rx}, rank Y={ry}, rank [X|Y]={rxy}");
    let residual = match relation {
        // rank[X|Y] >= max(rx, ry), so this is zero iff all three agree
        Relation::RangeEqual | Relation::NullEqual => (2 * rxy - rx - ry) as f64,
        // dimension of the intersection
        Relation::RangeIntersectionTrivial => (rx + ry).saturating_sub(rxy) as f64,
    };
    Ok(Condition::at_most(relation.key(), residual, 0.0).with_detail(detail))
}

/// Hypotheses under which `H = A^(1) * rho` is an inner inverse of `D = A + E`.
///
/// Entries:
/// * `neumann_gate`: `|A^(1)| |E| < 1`
/// * `rank_preserved`: `rshrank(D) = rshrank(A)`
/// * `trivial_intersection`: `N(A*A^(1))` meets `R(D)` only in zero
/// * `null_map_equal`: `delta * N(A) = N(D)`
/// * `range_null_disjoint`: `R(D)` meets `N(A^(1))` only in zero
/// * `null_image_annihilated`: `rho*D*N(A)` lies in `N(A^(1)*A*A^(1) - A^(1))`
pub fn check_lemma31_conditions(a: &Tensor, a1: &Tensor, e: &Tensor, cfg: &Config) -> Result<ConditionReport> {
    check_inverse_shape(a, a1)?;
    let d = a.add(e)?;
    let rtol = cfg.rank_tol;
    let mut report = ConditionReport::new();

    let norm_product = a1.norm(cfg.norm) * e.norm(cfg.norm);
    report.push(Condition::below("neumann_gate", norm_product, 1.0));
    report.push(Condition::ranks_equal(
        "rank_preserved",
        &[("A", rshrank(a, rtol)), ("D", rshrank(&d, rtol))],
    ));

    let (am, dm, a1m) = (rsh(a), rsh(&d), rsh(a1));
    let proj_null = null_space(&(&am * &a1m), rtol);
    report.push(matrix_relation(
        &proj_null,
        &dm,
        Relation::RangeIntersectionTrivial,
        rtol,
    )?);

    let n_a = reshape::null_space_basis(a, rtol);
    let n_d = null_space(&dm, rtol);
    let t_half = a.shape().col_extents().to_vec();
    let s_half = a.shape().row_extents().to_vec();
    let delta = reshape::square_inverse(&Tensor::identity(&t_half)?.add(&a1.dot(e)?)?);
    match &delta {
        Ok(delta) => {
            let mapped = rsh(&delta.dot(&n_a)?);
            let c = matrix_relation(&mapped, &n_d, Relation::RangeEqual, rtol)?;
            report.push(c.renamed("null_map_equal"));
        }
        Err(err) => report.push(Condition::failed("null_map_equal", err.to_string())),
    }

    let null_a1 = null_space(&a1m, rtol);
    let c = matrix_relation(&dm, &null_a1, Relation::RangeIntersectionTrivial, rtol)?;
    report.push(c.renamed("range_null_disjoint"));

    let rho = reshape::square_inverse(&Tensor::identity(&s_half)?.add(&e.dot(a1)?)?);
    match rho {
        Ok(rho) => {
            let image = rho.dot(&d)?.dot(&n_a)?;
            let defect = a1.dot(a)?.dot(a1)?.sub(a1)?;
            let residual = relative(
                defect.dot(&image)?.frobenius_norm(),
                a1.frobenius_norm() * image.frobenius_norm(),
            );
            report.push(Condition::at_most("null_image_annihilated", residual, cfg.tol));
        }
        Err(err) => report.push(Condition::failed("null_image_annihilated", err.to_string())),
    }
    Ok(report)
}
