//! Upper bounds on the spectral support of Wigner-type random matrices.
//!
//! A Wigner-type matrix `H` is hermitian with centered independent entries
//! whose variances `S[x][y] = E|H[x][y]|^2` form the variance profile `S`.
//! The largest eigenvalue of `H` is asymptotically the right edge of the
//! self-consistent density of states, and this crate bounds that edge by
//! `2 ||S||^{1/2} / w_c`, where `||.||` is the max-row-sum norm and `w_c` is
//! computed from the ratios `z_j = ||S^j|| / ||S||^j`.
//!
//! Besides the bound itself ([`bound`]) the crate ships the independent
//! machinery used to check it:
//!
//! * [`qve`] solves the quadratic vector equation for the Stieltjes
//!   transforms and locates the edge of the density numerically;
//! * [`mc`] samples matrices with the given profile and measures their
//!   spectral radius;
//! * [`combinatorics`] enumerates Dyck paths and plane trees and checks the
//!   tree expansion of the moments, the chopping bounds, the Dyck Markov
//!   chain and the stopped-walk generating function by brute force.
//!
//! Data-parallel loops run on rayon when the `parallel` feature is enabled
//! (the default) and sequentially otherwise; results are identical either way.

// `!(x > 0.0)` style guards reject NaN along with the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bound;
pub mod combinatorics;
pub mod error;
pub mod io;
pub mod linalg;
pub mod mc;
mod par;
pub mod qve;

pub use bound::{critical_w, phi, support_bound, BoundReport, CriticalPoint};
pub use error::Error;
pub use linalg::{gram_linearize, Construction, NormSequence, VarianceMatrix};
