//! Classical finite games, their mixed and mediated extensions, and their
//! quantization by the EWL protocol.
//!
//! The classical side ([`game`], [`simplex`], [`mediated`]) works in exact
//! rational arithmetic. The quantum side ([`quantum`], [`ewl`]) uses `f64`
//! complex amplitudes, with Monte-Carlo estimates keyed by `(seed, index)` so
//! results never depend on evaluation order. [`equilibria`] certifies
//! equilibrium claims in both settings.

pub mod equilibria;
pub mod error;
pub mod ewl;
pub mod game;
pub mod lp;
pub mod mediated;
pub mod montecarlo;
pub mod quantum;
pub mod ratio;
pub mod report;
pub mod simplex;

pub use error::{Error, Result};
pub use game::{Game, Payoff, PureProfile};
pub use ratio::Rational;
