//! Lempert functions and pluricomplex Green functions with several poles on the unit disc,
//! the punctured disc and annuli, and extremal problems on products of such domains.
//!
//! Values on plane domains are computed by lifting to the unit disc through explicit universal
//! covers. Upper bounds on product domains come with explicit analytic discs that realize them.

// `!(x < bound)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cover;
pub mod disc;
pub mod domain;
mod error;
pub mod expr;
pub mod interpolation;
pub mod kernel;
pub mod optimizer;
pub mod plane;
pub mod product;

pub use num_complex::Complex64;

pub use cover::{CoverMap, Cutoff, Lift};
pub use domain::{PlaneDomain, PoleSet};
pub use error::{Error, Result};
pub use expr::{Certificate, DiscExpr, EvalResult, ProductDisc};
pub use kernel::{BlaschkeDisc, MoebiusTransform, PickProblem, PickVerdict};
pub use plane::GreenValue;
