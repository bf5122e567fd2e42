//! Transition rates between the condensate and the ion's bound levels.
//!
//! All rates are in atomic units (`E_h/ħ`); [`per_second`] converts.
//!
//! The spontaneous capture rate into a level of size `a_v` is
//!
//! ```text
//! W = 4 (μ_c/ħ) (m/μ)^{3/2} ξ S^{3/2} / sqrt(1+ξ²) · [1 + (m/μ) S]^{-2} · (n_q0 + 1)
//! ```
//!
//! with `ξ = μ_c/Δε = 8π n a_v² a μ/m` and `S = sqrt(1+ξ²) - ξ`. `W` grows as
//! `ξ²` in the binary-collision regime and falls as `ξ^{-1/2}` (at fixed
//! `a_v`) once phonons dominate.

use std::f64::consts::PI;

use crate::boundstates::{next_level_down, BoundLevel, ShiftedLevel};
use crate::condensate::{bose_occupation, chemical_potential, Condensate};
use crate::error::{Error, Result};
use crate::units::{Species, Unit};

/// Converts an atomic-unit rate to s⁻¹.
pub fn per_second(rate: f64) -> f64 {
    Unit::PerSecond.from_internal(rate)
}

/// Anything a capture rate can be evaluated at: the size entering `ξ`, `q0`
/// and `I(q)`.
pub trait CaptureLevel {
    fn capture_size(&self) -> f64;
}

impl CaptureLevel for BoundLevel {
    fn capture_size(&self) -> f64 {
        self.size()
    }
}

/// A shifted level is evaluated at its effective size everywhere.
impl CaptureLevel for ShiftedLevel {
    fn capture_size(&self) -> f64 {
        self.size_eff()
    }
}

/// Intermediate quantities of one capture-rate evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBreakdown {
    pub xi: f64,
    /// Phonon wavenumber, bohr⁻¹.
    pub q0: f64,
    pub form_factor_q0: f64,
    pub occupation_q0: f64,
    /// Atomic units; see [`RateBreakdown::w_cap_per_s`].
    pub w_cap: f64,
}

impl RateBreakdown {
    pub fn w_cap_per_s(&self) -> f64 {
        per_second(self.w_cap)
    }
}

fn mass_ratio(c: &Condensate, mu: f64) -> f64 {
    c.species().mass() / mu
}

/// `ξ = 8π n a_v² a μ/m`.
pub fn xi(c: &Condensate, size: f64, mu: f64) -> f64 {
    8.0 * PI * c.density() * size * size * c.species().scattering_length() / mass_ratio(c, mu)
}

/// `ξ = μ_c/Δε`, the other printed form.
pub fn xi_from_energies(c: &Condensate, size: f64, mu: f64) -> f64 {
    chemical_potential(c) * 2.0 * mu * size * size
}

/// `q0` with `q0² a_v² μ/m = sqrt(1+ξ²) - ξ`, i.e. `ħω_{q0} = ħ²/(2μ a_v²)`.
pub fn phonon_momentum(c: &Condensate, size: f64, mu: f64) -> f64 {
    let xi = xi(c, size, mu);
    (phonon_branch(xi) * mass_ratio(c, mu)).sqrt() / size
}

/// `S = sqrt(1+ξ²) - ξ`, written to stay accurate for large `ξ`.
fn phonon_branch(xi: f64) -> f64 {
    1.0 / (xi.hypot(1.0) + xi)
}

/// Squared form factor `I(q) = 8π a_v³ n / (1 + q² a_v²)²`.
pub fn form_factor(c: &Condensate, size: f64, q: f64) -> f64 {
    let x = 1.0 + q * q * size * size;
    8.0 * PI * size.powi(3) * c.density() / (x * x)
}

fn check_size(size: f64) -> Result<()> {
    if size.is_finite() && size > 0.0 {
        Ok(())
    } else {
        Err(Error::validation("a_v", format!("must be > 0, got {size}")))
    }
}

/// Spontaneous, phonon-assisted capture rate into a level of size `size`.
pub fn capture_rate_for_size(c: &Condensate, size: f64, mu: f64) -> Result<RateBreakdown> {
    check_size(size)?;
    let r = mass_ratio(c, mu);
    let xi = xi(c, size, mu);
    let s = phonon_branch(xi);
    let root = xi.hypot(1.0);
    let q0 = (s * r).sqrt() / size;
    let occupation_q0 = bose_occupation(1.0 / (2.0 * mu * size * size), c.thermal_energy());
    let w_cap = 4.0 * chemical_potential(c) * r.powf(1.5) * xi * s.powf(1.5) / root / (1.0 + r * s).powi(2)
        * (occupation_q0 + 1.0);
    Ok(RateBreakdown {
        xi,
        q0,
        form_factor_q0: form_factor(c, size, q0),
        occupation_q0,
        w_cap,
    })
}

pub fn capture_rate(c: &Condensate, level: &impl CaptureLevel, mu: f64) -> Result<RateBreakdown> {
    capture_rate_for_size(c, level.capture_size(), mu)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `ξ → 0`: dilute, two-body capture.
    Binary,
    /// `ξ → ∞`: sound-like phonon emission.
    Phonon,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Asymptote {
    pub rate: f64,
    pub xi: f64,
    /// Set when `ξ` is outside the regime's range of validity.
    pub warning: Option<String>,
}

/// Leading-order limit of the capture rate in the requested regime.
pub fn capture_asymptote(c: &Condensate, size: f64, mu: f64, regime: Regime) -> Asymptote {
    let r = mass_ratio(c, mu);
    let xi = xi(c, size, mu);
    let thermal = bose_occupation(1.0 / (2.0 * mu * size * size), c.thermal_energy()) + 1.0;
    let mu_c = chemical_potential(c);
    let (rate, warning) = match regime {
        Regime::Binary => (
            4.0 * mu_c * r.powf(1.5) * xi / (1.0 + r).powi(2) * thermal,
            (xi >= 0.1).then(|| format!("ξ = {xi:.3e} is not in the binary regime (ξ < 0.1)")),
        ),
        Regime::Phonon => (
            4.0 * mu_c * r.powf(1.5) * (2.0 * xi).powf(-1.5) * thermal,
            (xi <= 10.0).then(|| format!("ξ = {xi:.3e} is not in the phonon regime (ξ > 10)")),
        ),
    };
    Asymptote { rate, xi, warning }
}

/// `W_v / W_{v-1} ≈ 1 + (2μ a_v²/ħ²)^{1/4} K4`.
pub fn capture_ratio(size: f64, species: &Species, mu: f64) -> f64 {
    1.0 + (2.0 * mu * size * size).powf(0.25) * crate::boundstates::k4_constant(species, mu)
}

/// Decay of `level` towards the next level down, modelled as the capture
/// rate into that (unoccupied) lower level.
pub fn downward_rate(c: &Condensate, level: &BoundLevel, species: &Species, mu: f64) -> Result<f64> {
    let lower = next_level_down(level, species, mu)?;
    Ok(capture_rate(c, &lower, mu)?.w_cap)
}

/// Thermal escape given the capture rate into the same shifted level.
///
/// `W_up = W_cap · exp(1 - |ε_eff|/k_B T)`: vanishes far below threshold and
/// equals `W_cap` when `|ε_eff| = k_B T`.
pub fn upward_from_capture(w_cap: f64, epsilon_eff: f64, kt: f64) -> f64 {
    if kt == 0.0 {
        0.0
    } else {
        w_cap * (1.0 - epsilon_eff.abs() / kt).exp()
    }
}

pub fn upward_rate(c: &Condensate, shifted: &ShiftedLevel, mu: f64) -> Result<f64> {
    if c.thermal_energy() == 0.0 {
        return Ok(0.0);
    }
    let w_cap = capture_rate(c, shifted, mu)?.w_cap;
    Ok(upward_from_capture(w_cap, shifted.epsilon_eff(), c.thermal_energy()))
}

/// Two-photon drive: Rabi frequency (atomic units) and pulse length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserDrive {
    rabi: f64,
    tau: f64,
}

impl LaserDrive {
    pub fn new(rabi: f64, tau: f64) -> Result<Self> {
        if !(rabi.is_finite() && rabi >= 0.0) {
            return Err(Error::validation("rabi", format!("must be >= 0, got {rabi}")));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::validation("tau", format!("must be > 0, got {tau}")));
        }
        Ok(LaserDrive { rabi, tau })
    }

    /// Rabi frequency in s⁻¹, pulse length in s.
    pub fn from_lab_units(rabi_per_s: f64, tau_s: f64) -> Result<Self> {
        LaserDrive::new(Unit::PerSecond.to_internal(rabi_per_s), Unit::Second.to_internal(tau_s))
    }

    pub fn rabi(&self) -> f64 {
        self.rabi
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// Atoms stimulated into the level by a short pulse,
/// `N_v(τ) = 8π a_v³ n |Ω|² τ²`, for an undepleted condensate of `atoms`
/// atoms.
pub fn stimulated_number(d: &LaserDrive, c: &Condensate, size: f64, atoms: f64) -> Result<f64> {
    check_size(size)?;
    if !(atoms.is_finite() && atoms > 0.0) {
        return Err(Error::validation("atoms", format!("must be > 0, got {atoms}")));
    }
    let n_v = 8.0 * PI * size.powi(3) * c.density() * (d.rabi * d.tau).powi(2);
    let ratio = n_v / atoms;
    if ratio > 0.1 {
        return Err(Error::Depletion { ratio });
    }
    Ok(n_v)
}

/// `W_st = Ω sqrt(8π a_v³ n)`, normalised so that `(W_st τ)² = N_v(τ)`.
pub fn stimulated_rate(d: &LaserDrive, c: &Condensate, size: f64) -> f64 {
    d.rabi * (8.0 * PI * size.powi(3) * c.density()).sqrt()
}

/// Scale `ħ n^{2/3}/m` that a stimulated rate must stay well below for the
/// laser not to heat the condensate.
pub fn heating_limit(c: &Condensate) -> f64 {
    c.density().powf(2.0 / 3.0) / c.species().mass()
}

/// `true` when `w_st` is below the heating scale.
pub fn heating_ok(w_st: f64, c: &Condensate) -> bool {
    w_st < heating_limit(c)
}
