//! Discrete-time ("chronon") classical electron dynamics and the
//! higher-derivative mechanics it embeds in.
//!
//! Everything here is pure computation over values: no IO, no global state.
//! The crate is `no_std` and only needs `alloc`. Dynamics run in natural
//! units (`c = 1`); physical constants appear only in [`constants`] and
//! [`kinematics::UnitSystem`].
//!
//! Metric signature is `(-,+,+,+)` throughout, so a 4-velocity satisfies
//! `u·u = -1`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod ald;
pub mod chronon;
pub mod constants;
pub mod error;
pub mod field;
pub mod fourier;
pub mod identities;
pub mod kinematics;
mod math;
pub mod nnm;
pub mod ode;
pub mod scenario;
pub mod series;

pub use error::{Error, Result};
pub use field::{FieldSpec, FieldTensor, TimeProfile};
pub use kinematics::{ChrononParams, FourVector, UnitMode, UnitSystem, Vec3};
