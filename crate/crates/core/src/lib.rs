//! Constructive solution of mKdV from KdV via the Miura map.
//!
//! The toolkit inverts the Miura map `B(r) = r_x + r^2` along a KdV flow by
//! transporting the positive Schrodinger kernel element with the first-order
//! operator `Q = 2q d/dx - q_x` and recovering `r = psi_x / psi`. Around that
//! pipeline it provides:
//!
//! - a catalog of exact KdV solutions plus a pseudo-spectral integrator for
//!   decaying initial data ([`kdv`]),
//! - a method-of-characteristics solver for first-order linear PDEs with
//!   growth-bound diagnostics ([`characteristics`]),
//! - operator-identity checks (commutator, factorization, Wronskian) and the
//!   full inversion pipeline ([`pipeline`]),
//! - exact-rational asymptotic symbol calculus for data unbounded at
//!   infinity ([`asymptotics`]),
//! - spectral-invariance verification for the Schrodinger and impedance
//!   operators under the flows ([`spectral`]),
//! - a command-line front end ([`cli`]) with machine-readable reports.

// indexed loops mirror the stencil arithmetic throughout
#![allow(clippy::needless_range_loop)]
// negated float comparisons are deliberate: they reject NaN parameters
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod characteristics;
pub mod cli;
pub mod error;
pub mod fft;
pub mod field;
pub mod kdv;
pub mod pipeline;
pub mod report;
pub mod spectral;
pub mod speclang;
pub mod verify;

pub use error::{Error, Result};
pub use field::{Grid, SampledField, Slice, XAxis};
