//! Circle-method laboratory for Waring's problem with intermediate powers.
//!
//! The crate reproduces, at desk scale, every computational object used to
//! bound `G(k)` for `7 <= k <= 16` by mixing classical and smooth Weyl sums:
//!
//! - [`ledger`]: exact-rational certification of the exponent table and the
//!   Hölder bookkeeping that turns it into the bounds `H(k) = t + u`.
//! - [`smooth`]: smooth-number sets `A_eta(P)` and Dickman's function.
//! - [`expsums`]: Weyl sums `f`, `g`, complete sums `S(q,a)`, the integral
//!   `v(beta)` and the major-arc approximants built from them.
//! - [`arcs`]: the major, minor and pruned dissections of `[0,1)`.
//! - [`counting`]: exact representation counts, even moments, Vinogradov
//!   counts and the orthogonality (DFT) route to `R(n)`.
//! - [`local`]: singular series, local densities, singular integral and the
//!   asymptotic main term.

pub mod arcs;
pub mod arith;
pub mod budget;
pub mod counting;
pub mod error;
pub mod expsums;
pub mod ledger;
pub mod local;
pub mod quadrature;
pub mod smooth;

pub use arcs::{Arc, ArcKind, ArcLabel, ArcSet, Classification};
pub use budget::Budget;
pub use counting::{CoefficientSeries, SeriesKind, VinogradovCount};
pub use error::{LabError, Result};
pub use expsums::{Frequency, PowerTable, SumEvaluation};
pub use ledger::{ExponentRow, HolderWeights, RowCertificate};
pub use local::{LocalSeriesState, MainTermParts, RhoSource};
pub use smooth::{DickmanEstimate, SmoothSet};
