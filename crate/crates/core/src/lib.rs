//! Generalized inverses of dense complex tensors under the Einstein product.
//!
//! Tensors carry a split between row and column axes; [`reshape::rsh`] maps a
//! tensor in `C^{S x T}` to a `prod(S) x prod(T)` matrix and turns the
//! Einstein product into a matrix product. On top of that the crate builds
//! inner, outer, (B)-, (C)- and (B,C)-inverses ([`ginv`]) and computes
//! perturbed inverses of `A + E` with hypothesis checks and relative-error
//! bounds ([`perturb`]).

pub mod cli;
pub mod config;
pub mod error;
pub mod fixtures;
pub mod ginv;
pub mod io;
pub mod perturb;
pub mod report;
pub mod reshape;
pub mod tensor;

pub use config::Config;
pub use error::{Error, Result};
pub use ginv::{
    bc_inverse, check_lemma31_conditions, check_reverse_order, inner_inverse, moore_penrose, outer_inverse_null,
    outer_inverse_range, subspace_relation, verify_identity, IdentityKind, InverseReport, Relation,
};
pub use perturb::{
    perturb_b_inverse, perturb_bc_inverse, perturb_c_inverse, perturb_inner, perturb_outer, resolvents, PerturbReport,
    Resolvents, Route,
};
pub use report::{Condition, ConditionReport, Role};
pub use reshape::{rsh, rsh_inv, rshrank, square_inverse, Matrix};
pub use tensor::{einstein_product, inner_product, linear_combine, Norm, Shape, Tensor};
