//! Truncated tensor algebra and exact signatures of piecewise-linear paths.
//!
//! The crate computes signatures of polygonal paths exactly (rational
//! coefficients) or in binary64, and provides the algebraic checks that
//! surround the non-vanishing of signature components: the shuffle product
//! formula, additive closure of nonzero degrees, dilation invariance under
//! roots of unity, and the normalized-norm sequence `(n! ||g_n||)^(1/n)`.

pub mod asymptotics;
pub mod cli;
pub mod complexify;
pub mod error;
pub mod io;
pub mod path;
pub mod sample;
pub mod scalar;
pub mod selftest;
pub mod semigroup;
pub mod shuffle;
pub mod tensor;

pub use asymptotics::{analyze, length_estimate, AsymptoticsReport, LengthEstimate};
pub use complexify::{complexify, dilation_invariance_check, lie_generator, taylor_norm, LieElement};
pub use error::{Error, Result};
pub use path::{riemann_signature, PiecewiseLinearPath};
pub use scalar::{Complex64, Rational, RealScalar, Scalar, ScalarKind};
pub use semigroup::{extract_pattern, frobenius_number, min_modulus, verify_additive, DegreePattern};
pub use shuffle::{enumerate_shuffles, group_like_check, shuffle_project, GroupLikeReport, ShuffleSet};
pub use tensor::{NormKind, Permutation, TruncatedTensor};
