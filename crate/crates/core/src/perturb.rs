//! Perturbation of inner, outer, (B)-, (C)- and (B,C)-inverses.
//!
//! Every operation returns a [`PerturbReport`] even when hypotheses fail; only
//! malformed input (shape errors, a supplied "outer inverse" that is not one)
//! produces an `Err`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::ginv::{idempotency_defect, identity_residual, matrix_relation, pinv, IdentityKind, Relation};
use crate::report::{relative, Condition, ConditionReport, Role};
use crate::reshape::{rsh, rshrank, square_inverse};
use crate::tensor::{Norm, Tensor};

/// Which theorem family supplies the perturbed inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    /// `D^(2) = X * rho` under `E = E*X*A` and/or `E = A*X*E`.
    Multiplicative,
    /// Closed forms built from `A^(1) * rho` under idempotency and rank gates.
    #[default]
    Rank,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::Multiplicative => "multiplicative",
            Route::Rank => "rank",
        }
    }
}

/// Inverse class a report is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InverseClass {
    Inner,
    Outer,
    /// Outer inverse with range `R(B)`.
    Range,
    /// Outer inverse with null space `N(C)`.
    Null,
    /// The (B,C)-inverse.
    RangeNull,
}

/// `rho = (I + E*X)^-1` and `delta = (I + X*E)^-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolvents {
    pub rho: Tensor,
    pub delta: Tensor,
    /// `|X| |E|`.
    pub norm_product: f64,
    /// `|E*X|`.
    pub coupling_norm: f64,
    /// `|E*X| < 1`, which guarantees both factors exist.
    pub hypothesis_ok: bool,
}

impl Resolvents {
    /// Relative defect of `X*rho = delta*X`.
    pub fn intertwining_residual(&self, x: &Tensor) -> Result<f64> {
        let left = x.dot(&self.rho)?;
        let right = self.delta.dot(x)?;
        Ok(relative(left.sub(&right)?.frobenius_norm(), left.frobenius_norm()))
    }
}

/// Builds both resolvent factors for `x` in `C^{T x S}` and `e` in `C^{S x T}`.
///
/// Fails only when a factor is numerically singular, which requires
/// `|E*X| >= 1`.
pub fn resolvents(x: &Tensor, e: &Tensor, norm: Norm) -> Result<Resolvents> {
    let expected = e.shape().transposed();
    if x.shape() != &expected {
        return Err(Error::ShapeDiffers {
            left: expected.extents().to_vec(),
            right: x.shape().extents().to_vec(),
        });
    }
    let ex = e.dot(x)?;
    let xe = x.dot(e)?;
    let rho = square_inverse(&Tensor::identity(e.shape().row_extents())?.add(&ex)?)?;
    let delta = square_inverse(&Tensor::identity(e.shape().col_extents())?.add(&xe)?)?;
    let coupling_norm = ex.norm(norm);
    Ok(Resolvents {
        rho,
        delta,
        norm_product: x.norm(norm) * e.norm(norm),
        coupling_norm,
        hypothesis_ok: coupling_norm < 1.0,
    })
}

/// Outcome of a perturbation computation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbReport {
    pub class: InverseClass,
    pub route: Route,
    /// The perturbed inverse; absent only when it could not be formed.
    #[serde(skip)]
    pub perturbed_inverse: Option<Tensor>,
    /// The unperturbed inverse of the same class.
    #[serde(skip)]
    pub unperturbed_inverse: Option<Tensor>,
    #[serde(skip)]
    pub resolvents: Option<Resolvents>,
    pub conditions: ConditionReport,
    pub scalars: BTreeMap<String, f64>,
    pub measured_ratio: Option<f64>,
    pub bound: Option<f64>,
    /// `1/(1 - |E*A^(1)|) + 1`, present when the reverse-order hypothesis of
    /// the rank route holds.
    pub corollary_bound: Option<f64>,
    pub bound_holds: bool,
    pub gates_passed: bool,
    /// Every `Check` row passed on the perturbed tensor.
    pub verified: bool,
}

impl PerturbReport {
    fn new(class: InverseClass, route: Route) -> Self {
        Self {
            class,
            route,
            perturbed_inverse: None,
            unperturbed_inverse: None,
            resolvents: None,
            conditions: ConditionReport::new(),
            scalars: BTreeMap::new(),
            measured_ratio: None,
            bound: None,
            corollary_bound: None,
            bound_holds: false,
            gates_passed: false,
            verified: false,
        }
    }

    /// All gates passed and the result re-verified.
    pub fn ok(&self) -> bool {
        self.gates_passed && self.verified
    }

    fn scalar(&mut self, key: &str, value: f64) {
        self.scalars.insert(key.to_string(), value);
    }

    fn push(&mut self, c: Condition) {
        self.conditions.push(c);
    }

    /// Fills ratio and `verified`, then `bound_holds`.
    fn finish(mut self, d2: Tensor, a2: Tensor, norm: Norm) -> Result<Self> {
        let diff = d2.sub(&a2)?.norm(norm);
        self.scalar("diff_norm", diff);
        self.scalar("norm_unperturbed", a2.norm(norm));
        self.measured_ratio = Some(relative(diff, a2.norm(norm)));
        self.verified =
            self.conditions.role_passed(Role::Check) && self.conditions.iter().any(|c| c.role == Role::Check);
        self.bound_holds = matches!(
            (self.measured_ratio, self.bound),
            (Some(r), Some(b)) if r <= b
        );
        self.perturbed_inverse = Some(d2);
        self.unperturbed_inverse = Some(a2);
        Ok(self)
    }
}

fn same_shape(a: &Tensor, e: &Tensor) -> Result<()> {
    if a.shape() != e.shape() {
        return Err(Error::ShapeDiffers {
            left: a.shape().extents().to_vec(),
            right: e.shape().extents().to_vec(),
        });
    }
    Ok(())
}

/// `(2 - t)/(1 - t)` for `t < 1`.
pub fn multiplicative_bound(t: f64) -> Option<f64> {
    (t < 1.0).then(|| (2.0 - t) / (1.0 - t))
}

/// `1/(1 - t) + 1` for `t < 1`.
pub fn corollary_bound(t: f64) -> Option<f64> {
    (t < 1.0).then(|| 1.0 / (1.0 - t) + 1.0)
}

/// `|E - E*X*A|_F / |E|_F`.
pub fn right_multiplicative_residual(a: &Tensor, x: &Tensor, e: &Tensor) -> Result<f64> {
    let exa = e.dot(x)?.dot(a)?;
    Ok(relative(e.sub(&exa)?.frobenius_norm(), e.frobenius_norm()))
}

/// `|E - A*X*E|_F / |E|_F`.
pub fn left_multiplicative_residual(a: &Tensor, x: &Tensor, e: &Tensor) -> Result<f64> {
    let axe = a.dot(x)?.dot(e)?;
    Ok(relative(e.sub(&axe)?.frobenius_norm(), e.frobenius_norm()))
}

fn resolvents_or_fail(report: &mut PerturbReport, x: &Tensor, e: &Tensor, norm: Norm) -> Option<Resolvents> {
    match resolvents(x, e, norm) {
        Ok(r) => Some(r),
        Err(Error::Singular { condition }) => {
            report.push(
                Condition::failed(
                    "resolvent_exists",
                    format!("I + E*X is singular (condition {condition:e})"),
                )
                .gate(),
            );
            None
        }
        Err(_) => unreachable!("shapes were validated by the caller"),
    }
}

fn relation_check(x: &Tensor, y: &Tensor, relation: Relation, rank_tol: Option<f64>) -> Result<Condition> {
    let (mx, my) = match relation {
        Relation::NullEqual => (rsh(x).adjoint(), rsh(y).adjoint()),
        _ => (rsh(x), rsh(y)),
    };
    matrix_relation(&mx, &my, relation, rank_tol)
}

fn residual_check(name: &str, residual: f64, tol: f64) -> Condition {
    Condition::at_most(name, residual, tol)
}

/// Perturbed inner inverse `H = A^(1) * rho` of `D = A + E`.
///
/// Gates: `|A^(1)| |E| < 1` with `rshrank(D) = rshrank(A)`, or alternatively
/// `|E*A^(1)| < 1` with one of the multiplicative conditions. `a1` defaults to
/// the Moore-Penrose inverse.
pub fn perturb_inner(a: &Tensor, e: &Tensor, a1: Option<&Tensor>, cfg: &Config) -> Result<PerturbReport> {
    same_shape(a, e)?;
    let a1 = match a1 {
        Some(x) => x.clone(),
        None => pinv(a, cfg.rank_tol),
    };
    let mut report = PerturbReport::new(InverseClass::Inner, Route::Rank);
    let inner = identity_residual(a, &a1, IdentityKind::Inner)?;
    report.push(Condition::at_most("a1_inner", inner, cfg.tol).gate());

    let d = a.add(e)?;
    let (n_a1, n_e) = (a1.norm(cfg.norm), e.norm(cfg.norm));
    let (rank_a, rank_d) = (rshrank(a, cfg.rank_tol), rshrank(&d, cfg.rank_tol));
    report.scalar("norm_a1", n_a1);
    report.scalar("norm_e", n_e);
    report.scalar("norm_product", n_a1 * n_e);
    report.scalar("rshrank_a", rank_a as f64);
    report.scalar("rshrank_d", rank_d as f64);
    report.push(Condition::below("neumann_gate", n_a1 * n_e, 1.0).gate());
    report.push(Condition::ranks_equal("rank_preserved", &[("A", rank_a), ("D", rank_d)]).gate());

    let right = right_multiplicative_residual(a, &a1, e)?;
    let left = left_multiplicative_residual(a, &a1, e)?;
    report.push(Condition::at_most("multiplicative_right", right, cfg.tol).info());
    report.push(Condition::at_most("multiplicative_left", left, cfg.tol).info());

    let Some(res) = resolvents_or_fail(&mut report, &a1, e, cfg.norm) else {
        return Ok(report);
    };
    let t = res.coupling_norm;
    report.scalar("coupling", t);
    report.push(Condition::below("coupling_gate", t, 1.0).info());

    let rank_route = ["a1_inner", "neumann_gate", "rank_preserved"]
        .iter()
        .all(|k| report.conditions.passed(k));
    let mult_route = report.conditions.passed("a1_inner")
        && report.conditions.passed("coupling_gate")
        && (report.conditions.passed("multiplicative_right") || report.conditions.passed("multiplicative_left"));
    report.gates_passed = rank_route || mult_route;
    report.route = if !rank_route && mult_route {
        Route::Multiplicative
    } else {
        Route::Rank
    };

    let h = a1.dot(&res.rho)?;
    report.push(residual_check(
        "inner_identity",
        identity_residual(&d, &h, IdentityKind::Inner)?,
        cfg.tol,
    ));
    report.push(residual_check("intertwining", res.intertwining_residual(&a1)?, cfg.tol));
    let rho_minus_i = res.rho.sub(&Tensor::identity(e.shape().row_extents())?)?;
    let diff = h.sub(&a1)?.sub(&a1.dot(&rho_minus_i)?)?;
    report.push(residual_check(
        "difference_identity",
        relative(diff.frobenius_norm(), a1.frobenius_norm()),
        cfg.tol,
    ));

    for c in crate::ginv::check_lemma31_conditions(a, &a1, e, cfg)?.iter() {
        if report.conditions.get(&c.name).is_none() {
            report.push(c.clone().info());
        }
    }

    report.bound = multiplicative_bound(t);
    report.resolvents = Some(res);
    report.finish(h, a1, cfg.norm)
}

/// Perturbed outer inverse `D^(2) = X * rho` for a given outer inverse `x2`.
///
/// Gates: `|E*X| < 1` and `E = E*X*A` or `E = A*X*E`.
pub fn perturb_outer(a: &Tensor, x2: &Tensor, e: &Tensor, cfg: &Config) -> Result<PerturbReport> {
    same_shape(a, e)?;
    let outer = identity_residual(a, x2, IdentityKind::Outer)?;
    if outer > cfg.tol {
        return Err(Error::Precondition {
            detail: format!("supplied tensor is not an outer inverse (residual {outer:e})"),
        });
    }
    let mut report = PerturbReport::new(InverseClass::Outer, Route::Multiplicative);
    multiplicative_core(&mut report, a, x2, e, cfg, Side::Either)?;
    let Some(res) = report.resolvents.clone() else {
        return Ok(report);
    };
    let d2 = x2.dot(&res.rho)?;
    report.push(relation_check(&d2, x2, Relation::RangeEqual, cfg.rank_tol)?);
    report.push(relation_check(&d2, x2, Relation::NullEqual, cfg.rank_tol)?);
    outer_checks(&mut report, a, e, x2, &d2, &res, cfg)?;
    report.finish(d2, x2.clone(), cfg.norm)
}

#[derive(Clone, Copy)]
enum Side {
    Right,
    Left,
    Either,
    Both,
}

/// Shared gates of the multiplicative theorems; stores resolvents on success.
fn multiplicative_core(
    report: &mut PerturbReport,
    a: &Tensor,
    x: &Tensor,
    e: &Tensor,
    cfg: &Config,
    side: Side,
) -> Result<()> {
    let right = right_multiplicative_residual(a, x, e)?;
    let left = left_multiplicative_residual(a, x, e)?;
    let (r, l) = (
        Condition::at_most("multiplicative_right", right, cfg.tol),
        Condition::at_most("multiplicative_left", left, cfg.tol),
    );
    match side {
        Side::Right => {
            report.push(r.gate());
            report.push(l.info());
        }
        Side::Left => {
            report.push(r.info());
            report.push(l.gate());
        }
        Side::Both => {
            report.push(r.gate());
            report.push(l.gate());
        }
        Side::Either => {
            let passing = if right <= left { "right" } else { "left" };
            report.push(r.info());
            report.push(l.info());
            report.push(
                Condition::at_most("multiplicative_condition", right.min(left), cfg.tol)
                    .with_detail(format!("best form: {passing}"))
                    .gate(),
            );
        }
    }
    report.scalar("norm_x", x.norm(cfg.norm));
    report.scalar("norm_e", e.norm(cfg.norm));
    let Some(res) = resolvents_or_fail(report, x, e, cfg.norm) else {
        report.gates_passed = false;
        return Ok(());
    };
    report.scalar("coupling", res.coupling_norm);
    report.push(Condition::below("coupling_gate", res.coupling_norm, 1.0).gate());
    report.gates_passed = report.conditions.role_passed(Role::Gate);
    report.bound = multiplicative_bound(res.coupling_norm);
    report.resolvents = Some(res);
    Ok(())
}

/// Outer identity on `D`, intertwining and difference identity.
fn outer_checks(
    report: &mut PerturbReport,
    a: &Tensor,
    e: &Tensor,
    x: &Tensor,
    d2: &Tensor,
    res: &Resolvents,
    cfg: &Config,
) -> Result<()> {
    let d = a.add(e)?;
    report.push(residual_check(
        "outer_identity",
        identity_residual(&d, d2, IdentityKind::Outer)?,
        cfg.tol,
    ));
    report.push(residual_check("intertwining", res.intertwining_residual(x)?, cfg.tol));
    let rho_minus_i = res.rho.sub(&Tensor::identity(e.shape().row_extents())?)?;
    let diff = d2.sub(x)?.sub(&x.dot(&rho_minus_i)?)?;
    report.push(residual_check(
        "difference_identity",
        relative(diff.frobenius_norm(), x.frobenius_norm()),
        cfg.tol,
    ));
    Ok(())
}

/// Inputs shared by the rank-route theorems.
struct RankRoute {
    d: Tensor,
    a1: Tensor,
    rho: Tensor,
    /// `D^(1) = A^(1) * rho`.
    h: Tensor,
    /// `|E*A^(1)|`.
    t: f64,
}

fn rank_route_core(report: &mut PerturbReport, a: &Tensor, e: &Tensor, cfg: &Config) -> Result<Option<RankRoute>> {
    let d = a.add(e)?;
    let a1 = pinv(a, cfg.rank_tol);
    let (n_a1, n_e) = (a1.norm(cfg.norm), e.norm(cfg.norm));
    let (rank_a, rank_d) = (rshrank(a, cfg.rank_tol), rshrank(&d, cfg.rank_tol));
    report.scalar("norm_a", a.norm(cfg.norm));
    report.scalar("norm_a1", n_a1);
    report.scalar("norm_e", n_e);
    report.scalar("norm_product", n_a1 * n_e);
    report.push(Condition::below("neumann_gate", n_a1 * n_e, 1.0).gate());
    report.push(Condition::ranks_equal("rank_preserved", &[("A", rank_a), ("D", rank_d)]).gate());
    let Some(res) = resolvents_or_fail(report, &a1, e, cfg.norm) else {
        return Ok(None);
    };
    let t = res.coupling_norm;
    report.scalar("coupling", t);
    report.push(residual_check("intertwining", res.intertwining_residual(&a1)?, cfg.tol));
    let h = a1.dot(&res.rho)?;
    let rho = res.rho.clone();
    report.resolvents = Some(res);
    Ok(Some(RankRoute { d, a1, rho, h, t }))
}

fn idempotent_gate(name: &str, m: &Tensor, tol: f64) -> Result<Condition> {
    Ok(Condition::at_most(name, idempotency_defect(m)?, tol).gate())
}

/// Perturbation of the outer inverse with range `R(B)`.
///
/// Multiplicative route: `X = B*(A*B)^(1)`, gates `|E*X| < 1` and
/// `E = E*X*A`, result `X * rho`. Rank route: gates `D^(1)*D*B*B^(1)`
/// idempotent, `rshrank(A*B) = rshrank(D*B) = rshrank(B)`,
/// `|A^(1)| |E| < 1` and `rshrank(A) = rshrank(D)`; result
/// `B*B^(1)*A^(1)*rho`.
pub fn perturb_b_inverse(a: &Tensor, b: &Tensor, e: &Tensor, route: Route, cfg: &Config) -> Result<PerturbReport> {
    same_shape(a, e)?;
    let mut report = PerturbReport::new(InverseClass::Range, route);
    let ab = a.dot(b)?;
    let a2 = b.dot(&pinv(&ab, cfg.rank_tol))?;
    let (r_ab, r_b) = (rshrank(&ab, cfg.rank_tol), rshrank(b, cfg.rank_tol));

    match route {
        Route::Multiplicative => {
            report.push(Condition::ranks_equal("rank_chain", &[("A*B", r_ab), ("B", r_b)]).gate());
            multiplicative_core(&mut report, a, &a2, e, cfg, Side::Right)?;
            let Some(res) = report.resolvents.clone() else {
                return Ok(report);
            };
            report.gates_passed = report.conditions.role_passed(Role::Gate);
            let d2 = a2.dot(&res.rho)?;
            report.push(relation_check(&d2, b, Relation::RangeEqual, cfg.rank_tol)?);
            outer_checks(&mut report, a, e, &a2, &d2, &res, cfg)?;
            report.finish(d2, a2, cfg.norm)
        }
        Route::Rank => {
            let Some(rr) = rank_route_core(&mut report, a, e, cfg)? else {
                return Ok(report);
            };
            let b1 = pinv(b, cfg.rank_tol);
            let bb1 = b.dot(&b1)?;
            let db = rr.d.dot(b)?;
            report.push(idempotent_gate(
                "idempotent_d1dbb1",
                &rr.h.dot(&db)?.dot(&b1)?,
                cfg.tol,
            )?);
            report.push(
                Condition::ranks_equal(
                    "rank_chain",
                    &[("A*B", r_ab), ("D*B", rshrank(&db, cfg.rank_tol)), ("B", r_b)],
                )
                .gate(),
            );
            report.gates_passed = report.conditions.role_passed(Role::Gate);

            let d2 = bb1.dot(&rr.a1)?.dot(&rr.rho)?;
            report.push(residual_check(
                "outer_identity",
                identity_residual(&rr.d, &d2, IdentityKind::Outer)?,
                cfg.tol,
            ));
            report.push(relation_check(&d2, b, Relation::RangeEqual, cfg.rank_tol)?);

            let (n_bb1, n_a1, n_a2) = (bb1.norm(cfg.norm), rr.a1.norm(cfg.norm), a2.norm(cfg.norm));
            report.scalar("norm_bb1", n_bb1);
            report.bound = (rr.t < 1.0 && n_a2 > 0.0).then(|| n_bb1 * n_a1 / ((1.0 - rr.t) * n_a2) + 1.0);

            let rol = crate::ginv::check_reverse_order(a, b, &rr.a1, &b1, cfg.tol)?;
            let rol_ok = rol.all_passed();
            for c in rol.iter() {
                report.push(c.clone().info());
            }
            report.corollary_bound = if rol_ok { corollary_bound(rr.t) } else { None };
            report.finish(d2, a2, cfg.norm)
        }
    }
}

/// Perturbation of the outer inverse with null space `N(C)`.
///
/// Multiplicative route: `X = (C*A)^(1)*C`, gates `|E*X| < 1` and
/// `E = A*X*E`. Rank route: gates `C^(1)*C*D*D^(1)` idempotent,
/// `rshrank(C*D) = rshrank(C*A) = rshrank(C)`, `|A^(1)| |E| < 1` and
/// `rshrank(A) = rshrank(D)`; result `A^(1)*rho*C^(1)*C`.
pub fn perturb_c_inverse(a: &Tensor, c: &Tensor, e: &Tensor, route: Route, cfg: &Config) -> Result<PerturbReport> {
    same_shape(a, e)?;
    let mut report = PerturbReport::new(InverseClass::Null, route);
    let ca = c.dot(a)?;
    let a2 = pinv(&ca, cfg.rank_tol).dot(c)?;
    let (r_ca, r_c) = (rshrank(&ca, cfg.rank_tol), rshrank(c, cfg.rank_tol));

    match route {
        Route::Multiplicative => {
            report.push(Condition::ranks_equal("rank_chain", &[("C*A", r_ca), ("C", r_c)]).gate());
            multiplicative_core(&mut report, a, &a2, e, cfg, Side::Left)?;
            let Some(res) = report.resolvents.clone() else {
                return Ok(report);
            };
            report.gates_passed = report.conditions.role_passed(Role::Gate);
            let d2 = a2.dot(&res.rho)?;
            report.push(relation_check(&d2, c, Relation::NullEqual, cfg.rank_tol)?);
            outer_checks(&mut report, a, e, &a2, &d2, &res, cfg)?;
            report.finish(d2, a2, cfg.norm)
        }
        Route::Rank => {
            let Some(rr) = rank_route_core(&mut report, a, e, cfg)? else {
                return Ok(report);
            };
            let c1 = pinv(c, cfg.rank_tol);
            let c1c = c1.dot(c)?;
            let cd = c.dot(&rr.d)?;
            report.push(idempotent_gate(
                "idempotent_c1cdd1",
                &c1.dot(&cd)?.dot(&rr.h)?,
                cfg.tol,
            )?);
            report.push(
                Condition::ranks_equal(
                    "rank_chain",
                    &[("C*D", rshrank(&cd, cfg.rank_tol)), ("C*A", r_ca), ("C", r_c)],
                )
                .gate(),
            );
            report.gates_passed = report.conditions.role_passed(Role::Gate);

            let d2 = rr.h.dot(&c1c)?;
            report.push(residual_check(
                "outer_identity",
                identity_residual(&rr.d, &d2, IdentityKind::Outer)?,
                cfg.tol,
            ));
            report.push(relation_check(&d2, c, Relation::NullEqual, cfg.rank_tol)?);

            let (n_c1c, n_a1, n_a2) = (c1c.norm(cfg.norm), rr.a1.norm(cfg.norm), a2.norm(cfg.norm));
            report.scalar("norm_c1c", n_c1c);
            report.bound = (rr.t < 1.0 && n_a2 > 0.0).then(|| n_a1 * n_c1c / ((1.0 - rr.t) * n_a2) + 1.0);

            let rol = crate::ginv::check_reverse_order(c, a, &c1, &rr.a1, cfg.tol)?;
            let rol_ok = rol.all_passed();
            for cond in rol.iter() {
                report.push(cond.clone().info());
            }
            report.corollary_bound = if rol_ok { corollary_bound(rr.t) } else { None };
            report.finish(d2, a2, cfg.norm)
        }
    }
}

/// Perturbation of the (B,C)-inverse.
///
/// Multiplicative route: `X = B*(C*A*B)^(1)*C`, gates `|E*X| < 1` and both
/// `E = E*X*A` and `E = A*X*E`. Rank route: result
/// `B*B^(1)*A^(1)*rho*C^(1)*C` under one of two pairs of idempotency gates,
/// `rshrank(C*A*B) = rshrank(C*D*B) = rshrank(C) = rshrank(B)`,
/// `|A^(1)| |E| < 1` and `rshrank(A) = rshrank(D)`.
pub fn perturb_bc_inverse(
    a: &Tensor,
    b: &Tensor,
    c: &Tensor,
    e: &Tensor,
    route: Route,
    cfg: &Config,
) -> Result<PerturbReport> {
    same_shape(a, e)?;
    let mut report = PerturbReport::new(InverseClass::RangeNull, route);
    let cab = c.dot(a)?.dot(b)?;
    let a2 = b.dot(&pinv(&cab, cfg.rank_tol))?.dot(c)?;
    let r_cab = rshrank(&cab, cfg.rank_tol);
    let (r_c, r_b) = (rshrank(c, cfg.rank_tol), rshrank(b, cfg.rank_tol));

    match route {
        Route::Multiplicative => {
            report.push(Condition::ranks_equal("rank_chain", &[("C*A*B", r_cab), ("C", r_c), ("B", r_b)]).gate());
            multiplicative_core(&mut report, a, &a2, e, cfg, Side::Both)?;
            let Some(res) = report.resolvents.clone() else {
                return Ok(report);
            };
            report.gates_passed = report.conditions.role_passed(Role::Gate);
            let d2 = a2.dot(&res.rho)?;
            bc_checks(&mut report, &a.add(e)?, b, c, &d2, cfg)?;
            outer_checks(&mut report, a, e, &a2, &d2, &res, cfg)?;
            report.finish(d2, a2, cfg.norm)
        }
        Route::Rank => {
            let Some(rr) = rank_route_core(&mut report, a, e, cfg)? else {
                return Ok(report);
            };
            let (b1, c1) = (pinv(b, cfg.rank_tol), pinv(c, cfg.rank_tol));
            let (bb1, c1c) = (b.dot(&b1)?, c1.dot(c)?);
            let cd = c.dot(&rr.d)?;
            let db = rr.d.dot(b)?;
            let cdb = cd.dot(b)?;

            let p1 = idempotency_defect(&pinv(&cd, cfg.rank_tol).dot(&cdb)?.dot(&b1)?)?;
            let p2 = idempotency_defect(&c1.dot(&cd)?.dot(&rr.h)?)?;
            let q1 = idempotency_defect(&c1.dot(&cdb)?.dot(&pinv(&db, cfg.rank_tol))?)?;
            let q2 = idempotency_defect(&rr.h.dot(&db)?.dot(&b1)?)?;
            report.push(Condition::at_most("idempotent_cd1cdbb1", p1, cfg.tol).info());
            report.push(Condition::at_most("idempotent_c1cdd1", p2, cfg.tol).info());
            report.push(Condition::at_most("idempotent_c1cdbdb1", q1, cfg.tol).info());
            report.push(Condition::at_most("idempotent_d1dbb1", q2, cfg.tol).info());
            let (primary, alternative) = (p1.max(p2), q1.max(q2));
            let (residual, which) = if primary <= cfg.tol || primary <= alternative {
                (primary, "primary pair")
            } else {
                (alternative, "alternative pair")
            };
            report.push(
                Condition::at_most("idempotency_pair", residual, cfg.tol)
                    .with_detail(which)
                    .gate(),
            );
            report.push(
                Condition::ranks_equal(
                    "rank_chain",
                    &[
                        ("C*A*B", r_cab),
                        ("C*D*B", rshrank(&cdb, cfg.rank_tol)),
                        ("C", r_c),
                        ("B", r_b),
                    ],
                )
                .gate(),
            );
            report.gates_passed = report.conditions.role_passed(Role::Gate);

            let d2 = bb1.dot(&rr.h)?.dot(&c1c)?;
            report.push(residual_check(
                "outer_identity",
                identity_residual(&rr.d, &d2, IdentityKind::Outer)?,
                cfg.tol,
            ));
            bc_checks(&mut report, &rr.d, b, c, &d2, cfg)?;

            let n_a2 = a2.norm(cfg.norm);
            let (n_bb1, n_a1, n_c1c) = (bb1.norm(cfg.norm), rr.a1.norm(cfg.norm), c1c.norm(cfg.norm));
            report.scalar("norm_bb1", n_bb1);
            report.scalar("norm_c1c", n_c1c);
            report.bound = (rr.t < 1.0 && n_a2 > 0.0).then(|| n_bb1 * n_a1 * n_c1c / ((1.0 - rr.t) * n_a2) + 1.0);

            // (C*A*B)^(1) = B^(1)*A^(1)*C^(1): the product is an inner inverse of C*A*B
            let candidate = b1.dot(&rr.a1)?.dot(&c1)?;
            let rol = identity_residual(&cab, &candidate, IdentityKind::Inner)?;
            let rol_ok = rol <= cfg.tol;
            report.push(Condition::at_most("rol_three_factor", rol, cfg.tol).info());
            report.corollary_bound = if rol_ok { corollary_bound(rr.t) } else { None };
            report.finish(d2, a2, cfg.norm)
        }
    }
}

/// `C*D*X = C`, `X*D*B = B`, `R(X) = R(B)` and `N(X) = N(C)`.
fn bc_checks(report: &mut PerturbReport, d: &Tensor, b: &Tensor, c: &Tensor, x: &Tensor, cfg: &Config) -> Result<()> {
    let cdx = c.dot(d)?.dot(x)?;
    let xdb = x.dot(d)?.dot(b)?;
    report.push(residual_check(
        "left_identity",
        relative(cdx.sub(c)?.frobenius_norm(), c.frobenius_norm()),
        cfg.tol,
    ));
    report.push(residual_check(
        "right_identity",
        relative(xdb.sub(b)?.frobenius_norm(), b.frobenius_norm()),
        cfg.tol,
    ));
    report.push(relation_check(x, b, Relation::RangeEqual, cfg.rank_tol)?);
    report.push(relation_check(x, c, Relation::NullEqual, cfg.rank_tol)?);
    Ok(())
}
