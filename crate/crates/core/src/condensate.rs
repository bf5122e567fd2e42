//! Homogeneous condensate: mean-field chemical potential, sound speed and the
//! Bogoliubov quasiparticle spectrum.
//!
//! Phonon occupations follow the equilibrium Bose distribution at the
//! condensate temperature. At `T = 0` they vanish, which is the regime the
//! capture-rate estimates are built for; `T > 0` is an extension.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::units::{Species, Unit};

/// Above this `n a^3` the gas is flagged as no longer dilute.
pub const DILUTENESS_WARN: f64 = 1e-3;
/// Above this `n a^3` the leading-order formulas are refused.
pub const DILUTENESS_MAX: f64 = 1e-1;

#[derive(Debug, Clone, PartialEq)]
pub struct Condensate {
    species: Species,
    density: f64,
    kt: f64,
}

impl Condensate {
    /// `density` in bohr⁻³, `kt` the thermal energy in Hartree.
    pub fn new(species: Species, density: f64, kt: f64) -> Result<Self> {
        if !(density.is_finite() && density > 0.0) {
            return Err(Error::validation("density", format!("must be > 0, got {density}")));
        }
        if !(kt.is_finite() && kt >= 0.0) {
            return Err(Error::validation("temperature", format!("must be >= 0, got {kt}")));
        }
        let a = species.scattering_length();
        if a <= 0.0 {
            return Err(Error::UnsupportedRegime(format!(
                "attractive condensate (a = {a} a0) is not modelled"
            )));
        }
        let gas_parameter = density * a.powi(3);
        if gas_parameter > DILUTENESS_MAX {
            return Err(Error::UnsupportedRegime(format!(
                "n a^3 = {gas_parameter:.3e} is far outside the dilute regime"
            )));
        }
        Ok(Condensate { species, density, kt })
    }

    /// Density in cm⁻³ and temperature in nK.
    pub fn from_lab_units(species: Species, density_cm3: f64, temperature_nk: f64) -> Result<Self> {
        Condensate::new(
            species,
            Unit::PerCubicCentimeter.to_internal(density_cm3),
            Unit::Nanokelvin.to_internal(temperature_nk),
        )
    }

    pub fn with_density(&self, density: f64) -> Result<Self> {
        Condensate::new(self.species.clone(), density, self.kt)
    }

    pub fn with_temperature(&self, kt: f64) -> Result<Self> {
        Condensate::new(self.species.clone(), self.density, kt)
    }

    pub fn species(&self) -> &Species {
        &self.species
    }

    /// Number density `n` in bohr⁻³.
    pub fn density(&self) -> f64 {
        self.density
    }

    /// `k_B T` in Hartree.
    pub fn thermal_energy(&self) -> f64 {
        self.kt
    }

    /// Gas parameter `n a^3`.
    pub fn diluteness(&self) -> f64 {
        self.density * self.species.scattering_length().powi(3)
    }

    pub fn diluteness_warning(&self) -> Option<String> {
        let x = self.diluteness();
        (x > DILUTENESS_WARN)
            .then(|| format!("n a^3 = {x:.3e} exceeds {DILUTENESS_WARN:e}; leading-order results are unreliable"))
    }
}

/// `μ_c = 4π ħ² n a / m`.
pub fn chemical_potential(c: &Condensate) -> f64 {
    4.0 * PI * c.density * c.species.scattering_length() / c.species.mass()
}

/// `s = sqrt(μ_c / m)`.
pub fn sound_speed(c: &Condensate) -> f64 {
    (chemical_potential(c) / c.species.mass()).sqrt()
}

/// Bogoliubov frequency `ω_q = q s sqrt(1 + (ħq / 2ms)^2)`.
pub fn dispersion(c: &Condensate, q: f64) -> Result<f64> {
    if !(q >= 0.0) {
        return Err(Error::Domain(format!("wavenumber must be >= 0, got {q}")));
    }
    let s = sound_speed(c);
    let x = q / (2.0 * c.species.mass() * s);
    Ok(q * s * (1.0 + x * x).sqrt())
}

/// Analytic `dω/dq`.
pub fn group_velocity(c: &Condensate, q: f64) -> Result<f64> {
    if !(q >= 0.0) {
        return Err(Error::Domain(format!("wavenumber must be >= 0, got {q}")));
    }
    let s = sound_speed(c);
    let x = q / (2.0 * c.species.mass() * s);
    Ok(s * (1.0 + 2.0 * x * x) / (1.0 + x * x).sqrt())
}

/// Bose-Einstein occupation of a mode of energy `energy` at thermal energy `kt`.
pub fn bose_occupation(energy: f64, kt: f64) -> f64 {
    if kt == 0.0 {
        0.0
    } else {
        1.0 / (energy / kt).exp_m1()
    }
}

pub fn phonon_occupation(c: &Condensate, q: f64) -> Result<f64> {
    if c.kt == 0.0 {
        return if q >= 0.0 {
            Ok(0.0)
        } else {
            Err(Error::Domain(format!("wavenumber must be >= 0, got {q}")))
        };
    }
    if q == 0.0 {
        return Err(Error::Domain("occupation diverges at q = 0 for T > 0".into()));
    }
    Ok(bose_occupation(dispersion(c, q)?, c.kt))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhononMode {
    pub q: f64,
    pub omega: f64,
    pub occupation: f64,
}

pub fn phonon_mode(c: &Condensate, q: f64) -> Result<PhononMode> {
    Ok(PhononMode {
        q,
        omega: dispersion(c, q)?,
        occupation: phonon_occupation(c, q)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{constants, SpeciesFile};
    use proptest::prelude::*;

    fn na(density_cm3: f64, t_nk: f64) -> Condensate {
        Condensate::from_lab_units(Species::sodium(), density_cm3, t_nk).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn sodium_chemical_potential_in_si() {
        // Independent SI evaluation of 4πħ²na/m. The CODATA SI and atomic-unit
        // values agree only to about 1e-9.
        let hbar = constants::HBAR_J_S;
        let m = 22.989_77 * constants::AMU_KG;
        let a = 52.0 * constants::BOHR_M;
        let mu_si = 4.0 * PI * hbar * hbar * 1e20 * a / m;
        let mu_nk = mu_si / constants::BOLTZMANN_J_PER_K * 1e9;
        let c = na(1e14, 0.0);
        let got = Unit::Nanokelvin.from_internal(chemical_potential(&c));
        assert!(rel(got, mu_nk) < 1e-8);
        assert!((got - 73.0).abs() < 0.5, "μ_c/k_B = {got} nK");

        let s_si = (mu_si / m).sqrt();
        let s = Unit::MeterPerSecond.from_internal(sound_speed(&c));
        assert!(rel(s, s_si) < 1e-8);
        assert!((s * 1e3 - 5.1).abs() < 0.05, "s = {s} m/s");
    }

    #[test]
    fn density_scaling() {
        let c = na(1e14, 0.0);
        let c2 = c.with_density(2.0 * c.density()).unwrap();
        let c4 = c.with_density(4.0 * c.density()).unwrap();
        assert!(rel(chemical_potential(&c2), 2.0 * chemical_potential(&c)) < 1e-15);
        assert!(rel(sound_speed(&c4), 2.0 * sound_speed(&c)) < 1e-15);
        let m = c.species().mass();
        assert!(rel(chemical_potential(&c), m * sound_speed(&c).powi(2)) < 1e-14);
        let tiny = c.with_density(1e-40).unwrap();
        assert!(chemical_potential(&tiny) < 1e-40);
    }

    #[test]
    fn dispersion_limits() {
        let c = na(1e14, 0.0);
        let s = sound_speed(&c);
        let m = c.species().mass();
        assert_eq!(dispersion(&c, 0.0).unwrap(), 0.0);
        let q = 1e-6 * m * s;
        assert!(rel(dispersion(&c, q).unwrap() / (q * s), 1.0) < 1e-12);
        let q = 1e6 * m * s;
        assert!(rel(dispersion(&c, q).unwrap() / (q * q / (2.0 * m)), 1.0) < 1e-11);
        let q = 2.0 * m * s;
        assert!(rel(dispersion(&c, q).unwrap(), q * s * 2f64.sqrt()) < 1e-15);
        assert!(matches!(dispersion(&c, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn occupation_cases() {
        let cold = na(1e14, 0.0);
        assert_eq!(phonon_occupation(&cold, 1e-3).unwrap(), 0.0);

        let warm = na(1e14, 100.0);
        assert!(phonon_occupation(&warm, 0.0).is_err());
        // ħω = k_B T ln 2 gives exactly one phonon.
        assert!(
            rel(
                bose_occupation(warm.thermal_energy() * 2f64.ln(), warm.thermal_energy()),
                1.0
            ) < 1e-14
        );
        let kt = warm.thermal_energy();
        let tail = bose_occupation(40.0 * kt, kt);
        assert!(rel(tail, (-40f64).exp()) < 1e-15);
        let mode = phonon_mode(&warm, 1e-4).unwrap();
        assert!(rel(mode.occupation, bose_occupation(mode.omega, kt)) < 1e-15);
    }

    #[test]
    fn invalid_condensates() {
        assert!(Condensate::new(Species::sodium(), 0.0, 0.0).is_err());
        assert!(Condensate::new(Species::sodium(), 1e-12, -1.0).is_err());
        let attractive = Species::new(SpeciesFile {
            name: "Li7".into(),
            mass_amu: 7.016,
            a_a0: -27.0,
            a_ion_a0: 1000.0,
            c4_au: 164.0,
        })
        .unwrap();
        assert!(matches!(
            Condensate::new(attractive, 1e-12, 0.0),
            Err(Error::UnsupportedRegime(_))
        ));
        // n a^3 = 0.2
        assert!(Condensate::new(Species::sodium(), 0.2 / 52f64.powi(3), 0.0).is_err());
        let dense = Condensate::new(Species::sodium(), 0.01 / 52f64.powi(3), 0.0).unwrap();
        assert!(dense.diluteness_warning().is_some());
        assert!(na(1e14, 0.0).diluteness_warning().is_none());
    }

    proptest! {
        #[test]
        fn dispersion_bounds_and_monotonicity(log_n in 10f64..16.0, log_q in -8f64..0.0) {
            let c = na(10f64.powf(log_n), 0.0);
            let s = sound_speed(&c);
            let m = c.species().mass();
            let q = 10f64.powf(log_q);
            let w = dispersion(&c, q).unwrap();
            prop_assert!(w >= q * s * (1.0 - 1e-15));
            prop_assert!(w >= q * q / (2.0 * m) / 2f64.sqrt());
            prop_assert!(dispersion(&c, q * 1.001).unwrap() > w);
        }

        #[test]
        fn group_velocity_matches_finite_difference(log_n in 10f64..16.0, log_q in -7f64..-1.0) {
            let c = na(10f64.powf(log_n), 0.0);
            let q = 10f64.powf(log_q);
            let h = 1e-5 * q;
            let fd = (dispersion(&c, q + h).unwrap() - dispersion(&c, q - h).unwrap()) / (2.0 * h);
            let exact = group_velocity(&c, q).unwrap();
            prop_assert!(((fd - exact) / exact).abs() < 1e-6);
            prop_assert!(exact >= sound_speed(&c));
        }
    }
}
