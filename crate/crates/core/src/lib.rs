//! Numerics for the group structure that a capitalization factor induces on
//! capitalized financial events.
//!
//! An event is a triple `(t, h, c)`: reference time, capitalization time and
//! capital. A capitalization factor `f` (positive, `f(0) = 1`,
//! `f(-h) = 1/f(h)`, continuously differentiable) turns the event space into a
//! commutative semigroup whose invertible part splits into a group of credits
//! and a group of debts. The evolution of an event through time is the
//! exponential map of a translated copy of that group.
//!
//! The binary operations are called "products" throughout. They are group
//! multiplications, not Lie brackets.

pub mod algebra;
pub mod capfactor;
pub mod cli;
mod error;
pub mod events;
pub mod evolution;
pub mod numeric;
pub mod verify;

pub use algebra::ProductKind;
pub use capfactor::{CapFactor, Capitalization, DerivativeMode, FactorKind};
pub use error::{Error, Result};
pub use events::{Classification, Event, State};
pub use evolution::{Direction, EvolutionCurve, TangentVector, TranslatedTimeLine};
pub use verify::{AxiomReport, Check, VerifyConfig};
