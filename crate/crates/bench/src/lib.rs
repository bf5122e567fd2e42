//! Shared fixtures for the benchmarks.

use molion::boundstates::top_level;
use molion::units::{reduced_mass, IonMass};
use molion::{BoundLevel, Condensate, Species};

/// Sodium at 1e14 cm⁻³ with its top level and an infinitely heavy ion.
pub fn sodium(temperature_nk: f64) -> (Condensate, BoundLevel, f64) {
    let species = Species::sodium();
    let mu = reduced_mass(&species, IonMass::Infinite).expect("valid mass mode");
    let level = top_level(&species, mu).expect("valid level");
    let c = Condensate::from_lab_units(species, 1e14, temperature_nk).expect("valid condensate");
    (c, level, mu)
}
