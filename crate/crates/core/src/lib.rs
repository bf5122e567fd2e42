//! Formation kinetics of mesoscopic molecular ions in a homogeneous
//! Bose-Einstein condensate.
//!
//! An ion immersed in a condensate binds atoms into the loosely bound levels
//! of its `-C4/2r^4` polarization potential. Capture into a level is paid for
//! by emitting a Bogoliubov phonon, is Bose-enhanced by the occupation of the
//! level, and stalls once the repulsive mean field of the trapped atoms has
//! pushed the level up to the thermal energy.
//!
//! Everything inside the crate is expressed in Hartree atomic units
//! (`ħ = m_e = e = a0 = 1`). Temperatures are carried as `k_B T` energies.
//! The [`units`] module converts at the boundaries.
//!
//! Modules, bottom-up:
//!
//! * [`units`]: constants, unit conversion, species data.
//! * [`condensate`]: chemical potential, sound speed, Bogoliubov dispersion.
//! * [`boundstates`]: level sizes, LeRoy-Bernstein ladder, mean-field shift.
//! * [`rates`]: capture, loss and laser-driven rates.
//! * [`kinetics`]: population dynamics, equilibrium, `ξ` sweeps.
//! * [`oracle`]: brute-force numerics that re-derive the closed forms.
//! * [`verify`]: the oracle-vs-closed-form comparison table.

// `!(x > 0.0)` is used on purpose so that NaN inputs fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundstates;
pub mod condensate;
mod error;
pub mod kinetics;
pub mod numeric;
pub mod oracle;
pub mod rates;
pub mod units;
pub mod verify;

pub use boundstates::{BoundLevel, ShiftedLevel};
pub use condensate::{Condensate, PhononMode};
pub use error::{Error, Result};
pub use kinetics::{
    sweep::{Slice, Sweep},
    Equilibrium, Evolution, EvolveOptions, KineticState, Record,
};
pub use rates::{CaptureLevel, LaserDrive, RateBreakdown, Regime};
pub use units::{Dimension, IonMass, Quantity, Species, Unit};
