//! Physical constants, unit conversion and species data.
//!
//! Internal unit system: Hartree atomic units. A temperature is stored as the
//! energy `k_B T` in Hartree, a time in units of `ħ/E_h`, a rate in `E_h/ħ`.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CODATA 2018 values.
pub mod constants {
    /// Bohr radius in metres.
    pub const BOHR_M: f64 = 5.291_772_109_03e-11;
    /// Hartree energy in joules.
    pub const HARTREE_J: f64 = 4.359_744_722_207_1e-18;
    /// Boltzmann constant in J/K.
    pub const BOLTZMANN_J_PER_K: f64 = 1.380_649e-23;
    /// Reduced Planck constant in J s.
    pub const HBAR_J_S: f64 = 1.054_571_817e-34;
    /// Atomic mass constant in kg.
    pub const AMU_KG: f64 = 1.660_539_066_60e-27;
    /// Electron mass in kg.
    pub const ELECTRON_MASS_KG: f64 = 9.109_383_701_5e-31;
    /// Atomic mass constant in electron masses.
    pub const AMU_IN_ELECTRON_MASSES: f64 = 1_822.888_486_209;
    /// Atomic unit of time, `ħ/E_h`, in seconds.
    pub const ATOMIC_TIME_S: f64 = 2.418_884_326_585_7e-17;
}

use constants::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dimension {
    Length,
    Mass,
    Energy,
    /// Stored internally as the energy `k_B T`.
    Temperature,
    Density,
    Rate,
    Time,
    Velocity,
    Wavenumber,
    Dimensionless,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unit {
    Bohr,
    Meter,
    Centimeter,
    ElectronMass,
    Amu,
    Kilogram,
    Hartree,
    Joule,
    Kelvin,
    Microkelvin,
    Nanokelvin,
    /// `k_B T` already in Hartree.
    HartreeTemperature,
    PerCubicBohr,
    PerCubicCentimeter,
    PerCubicMeter,
    PerAtomicTime,
    PerSecond,
    AtomicTime,
    Second,
    AtomicVelocity,
    MeterPerSecond,
    MillimeterPerSecond,
    PerBohr,
    PerMeter,
    One,
}

impl Unit {
    pub fn dimension(self) -> Dimension {
        use Unit::*;
        match self {
            Bohr | Meter | Centimeter => Dimension::Length,
            ElectronMass | Amu | Kilogram => Dimension::Mass,
            Hartree | Joule => Dimension::Energy,
            Kelvin | Microkelvin | Nanokelvin | HartreeTemperature => Dimension::Temperature,
            PerCubicBohr | PerCubicCentimeter | PerCubicMeter => Dimension::Density,
            PerAtomicTime | PerSecond => Dimension::Rate,
            AtomicTime | Second => Dimension::Time,
            AtomicVelocity | MeterPerSecond | MillimeterPerSecond => Dimension::Velocity,
            PerBohr | PerMeter => Dimension::Wavenumber,
            One => Dimension::Dimensionless,
        }
    }

    /// Internal value of one of this unit.
    pub fn scale(self) -> f64 {
        use Unit::*;
        let kelvin = BOLTZMANN_J_PER_K / HARTREE_J;
        let atomic_velocity = BOHR_M / ATOMIC_TIME_S;
        match self {
            Bohr => 1.0,
            Meter => 1.0 / BOHR_M,
            Centimeter => 1e-2 / BOHR_M,
            ElectronMass => 1.0,
            Amu => AMU_IN_ELECTRON_MASSES,
            Kilogram => 1.0 / ELECTRON_MASS_KG,
            Hartree => 1.0,
            Joule => 1.0 / HARTREE_J,
            Kelvin => kelvin,
            Microkelvin => 1e-6 * kelvin,
            Nanokelvin => 1e-9 * kelvin,
            HartreeTemperature => 1.0,
            PerCubicBohr => 1.0,
            PerCubicCentimeter => {
                let bohr_cm = BOHR_M * 1e2;
                bohr_cm * bohr_cm * bohr_cm
            }
            PerCubicMeter => BOHR_M * BOHR_M * BOHR_M,
            PerAtomicTime => 1.0,
            PerSecond => ATOMIC_TIME_S,
            AtomicTime => 1.0,
            Second => 1.0 / ATOMIC_TIME_S,
            AtomicVelocity => 1.0,
            MeterPerSecond => 1.0 / atomic_velocity,
            MillimeterPerSecond => 1e-3 / atomic_velocity,
            PerBohr => 1.0,
            PerMeter => BOHR_M,
            One => 1.0,
        }
    }

    /// Converts a value given in this unit to atomic units.
    pub fn to_internal(self, value: f64) -> f64 {
        value * self.scale()
    }

    /// Converts an atomic-unit value to this unit.
    pub fn from_internal(self, value: f64) -> f64 {
        value / self.scale()
    }
}

/// A finite value tagged with its dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    value: f64,
    dimension: Dimension,
}

impl Quantity {
    pub fn new(value: f64, dimension: Dimension) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::validation("quantity", format!("{value} is not finite")));
        }
        Ok(Quantity { value, dimension })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }
}

fn check_unit(q: &Quantity, unit: Unit) -> Result<()> {
    if unit.dimension() != q.dimension {
        return Err(Error::DimensionMismatch {
            unit,
            expected: unit.dimension(),
            found: q.dimension,
        });
    }
    Ok(())
}

/// Reads `q` as a value in `unit` and returns it in atomic units.
pub fn to_internal(q: Quantity, unit: Unit) -> Result<Quantity> {
    check_unit(&q, unit)?;
    Quantity::new(unit.to_internal(q.value), q.dimension)
}

/// Inverse of [`to_internal`].
pub fn from_internal(q: Quantity, unit: Unit) -> Result<Quantity> {
    check_unit(&q, unit)?;
    Quantity::new(unit.from_internal(q.value), q.dimension)
}

/// On-disk species record. Field names are part of the file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesFile {
    pub name: String,
    pub mass_amu: f64,
    pub a_a0: f64,
    pub a_ion_a0: f64,
    pub c4_au: f64,
}

/// Atomic data for a condensate species and its parent ion.
#[derive(Debug, Clone, PartialEq)]
pub struct Species {
    name: String,
    mass_amu: f64,
    scattering_length: f64,
    ion_scattering_length: f64,
    c4: f64,
}

impl Species {
    /// Validates and builds a species from file-format values.
    pub fn new(record: SpeciesFile) -> Result<Self> {
        let SpeciesFile {
            name,
            mass_amu,
            a_a0,
            a_ion_a0,
            c4_au,
        } = record;
        if name.trim().is_empty() {
            return Err(Error::validation("name", "must not be empty"));
        }
        for (field, v) in [
            ("mass_amu", mass_amu),
            ("a_a0", a_a0),
            ("a_ion_a0", a_ion_a0),
            ("c4_au", c4_au),
        ] {
            if !v.is_finite() {
                return Err(Error::validation(field, format!("{v} is not finite")));
            }
        }
        if mass_amu <= 0.0 {
            return Err(Error::validation("mass_amu", format!("must be > 0, got {mass_amu}")));
        }
        if a_a0 == 0.0 {
            return Err(Error::validation("a_a0", "must be non-zero"));
        }
        if a_ion_a0 <= 0.0 {
            return Err(Error::validation("a_ion_a0", format!("must be > 0, got {a_ion_a0}")));
        }
        if c4_au <= 0.0 {
            return Err(Error::validation("c4_au", format!("must be > 0, got {c4_au}")));
        }
        Ok(Species {
            name,
            mass_amu,
            scattering_length: a_a0,
            ion_scattering_length: a_ion_a0,
            c4: c4_au,
        })
    }

    /// ²³Na: a = 52 a0, a_i = 2000 a0, C4 = 162.7 a.u.
    pub fn sodium() -> Self {
        Species::new(SpeciesFile {
            name: "Na".into(),
            mass_amu: 22.989_77,
            a_a0: 52.0,
            a_ion_a0: 2000.0,
            c4_au: 162.7,
        })
        .expect("builtin sodium data is valid")
    }

    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "Na" => Ok(Species::sodium()),
            other => Err(Error::UnknownSpecies(other.to_string())),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Species::new(serde_json::from_str(text)?)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Species::from_json(&std::fs::read_to_string(path)?)
    }

    /// Builtin name if one matches, otherwise a path to a species file.
    pub fn load(source: &str) -> Result<Self> {
        match Species::builtin(source) {
            Err(Error::UnknownSpecies(_)) if Path::new(source).is_file() => Species::from_file(source),
            other => other,
        }
    }

    pub fn to_record(&self) -> SpeciesFile {
        SpeciesFile {
            name: self.name.clone(),
            mass_amu: self.mass_amu,
            a_a0: self.scattering_length,
            a_ion_a0: self.ion_scattering_length,
            c4_au: self.c4,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn mass_amu(&self) -> f64 {
        self.mass_amu
    }

    /// Atom mass in electron masses.
    pub fn mass(&self) -> f64 {
        Unit::Amu.to_internal(self.mass_amu)
    }

    /// Atom-atom scattering length `a` in bohr.
    pub fn scattering_length(&self) -> f64 {
        self.scattering_length
    }

    /// Atom-ion scattering length `a_i` in bohr.
    pub fn ion_scattering_length(&self) -> f64 {
        self.ion_scattering_length
    }

    /// Dipole polarizability `C4` in atomic units.
    pub fn c4(&self) -> f64 {
        self.c4
    }
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (m = {} amu, a = {} a0, a_i = {} a0, C4 = {} au)",
            self.name, self.mass_amu, self.scattering_length, self.ion_scattering_length, self.c4
        )
    }
}

/// How heavy the ion is taken to be when forming the atom-ion reduced mass.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum IonMass {
    /// `μ = m`.
    #[default]
    Infinite,
    /// `μ = m/2`.
    Equal,
    /// Ion mass in amu.
    Explicit(f64),
}

/// Atom-ion reduced mass in electron masses.
pub fn reduced_mass(species: &Species, ion: IonMass) -> Result<f64> {
    let m = species.mass();
    match ion {
        IonMass::Infinite => Ok(m),
        IonMass::Equal => Ok(0.5 * m),
        IonMass::Explicit(amu) => {
            if !(amu.is_finite() && amu > 0.0) {
                return Err(Error::validation("ion mass", format!("must be > 0 amu, got {amu}")));
            }
            let big = Unit::Amu.to_internal(amu);
            Ok(m * big / (m + big))
        }
    }
}
