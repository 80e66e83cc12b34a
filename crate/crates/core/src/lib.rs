//! Exact symbolic calculus for the heat hierarchy and its extensions.
//!
//! * [`rings`]: big rationals, polynomials over tagged generators, z-series.
//! * [`weyl`]: the Weyl algebra in normal order and the structure constants of
//!   the symmetry algebra spanned by `V_{m,j} = 𝒯^m ∘ ∂_x^j`.
//! * [`jets`]: the jet ring of the heat hierarchy with the actions of `∂_x`,
//!   the flows `D_{t_i}`, `𝒯` and `V_{m,j}`.
//! * [`forms`]: the η-coframe, connection matrices, the wave-function
//!   extension and its flatness/reduction checks.
//! * [`psdo`]: truncated pseudo-differential operators, KP flows, zero
//!   curvature and dressing.
//! * [`parse`], [`emit`], [`suite`]: the library side of the command-line tool.

pub mod emit;
pub mod error;
pub mod forms;
pub mod jets;
pub mod parse;
pub mod psdo;
pub mod rings;
pub mod suite;
pub mod weyl;

pub use error::{Error, Result};
