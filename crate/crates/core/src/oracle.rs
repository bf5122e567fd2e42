//! Brute-force numerics that re-derive the closed forms from first
//! principles.
//!
//! Nothing here may call into `crate::rates`; the closed forms are checked
//! against these routines, not the other way round.

use std::f64::consts::PI;

use crate::boundstates::{shifted_binding_energy, BoundLevel};
use crate::condensate::{bose_occupation, chemical_potential, dispersion, sound_speed, Condensate};
use crate::error::{Error, Result};
use crate::kinetics::Equilibrium;
use crate::numeric::{brent, expand_upward, integrate};

pub use crate::numeric::QuadratureSpec;

/// Tolerances used for the form-factor integrals.
pub const FORM_FACTOR_QUADRATURE: QuadratureSpec = QuadratureSpec {
    abs_tol: 1e-300,
    rel_tol: 1e-12,
    max_subdivisions: 4000,
};

/// Relative step of the central difference for `dω/dq`.
pub const GROUP_VELOCITY_STEP: f64 = 1e-6;

/// The integrands vanish like `e^{-r/a_v}`; beyond this many sizes they are
/// below double precision.
const RADIAL_CUTOFF: f64 = 80.0;

/// Root of `ħω(q) = Δε` by bracket doubling and Brent.
pub fn q0_root(c: &Condensate, delta_eps: f64) -> Result<f64> {
    if !(delta_eps > 0.0 && delta_eps.is_finite()) {
        return Err(Error::Domain(format!("energy transfer must be > 0, got {delta_eps}")));
    }
    let mismatch = |q: f64| dispersion(c, q).map_or(f64::NAN, |w| w - delta_eps);
    let start = 1e-3 * delta_eps / sound_speed(c);
    let hi = expand_upward(mismatch, 0.0, start, 64)?;
    brent(mismatch, 0.0, hi, 0.0, 1e-14)
}

/// `Ψ_v(r) = e^{-r/a_v} / (sqrt(2π a_v) r)`.
fn bound_wavefunction(size: f64, r: f64) -> f64 {
    (-r / size).exp() / ((2.0 * PI * size).sqrt() * r)
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `∫ |Ψ_v|² d³r`, which should be 1.
pub fn wavefunction_norm(size: f64, spec: QuadratureSpec) -> Result<f64> {
    integrate(
        |r| {
            let psi = bound_wavefunction(size, r);
            4.0 * PI * r * r * psi * psi
        },
        0.0,
        RADIAL_CUTOFF * size,
        spec,
    )
}

/// `I(q) = N |∫ Ψ_v*(r) e^{-iq·r} Ψ_0(r) d³r|²` with `Ψ_0 = 1/sqrt(V)`,
/// evaluated by radial quadrature of the s-wave projection.
pub fn form_factor_quadrature_in_volume(
    c: &Condensate,
    size: f64,
    q: f64,
    volume: f64,
    spec: QuadratureSpec,
) -> Result<f64> {
    if !(q >= 0.0) {
        return Err(Error::Domain(format!("wavenumber must be >= 0, got {q}")));
    }
    let atoms = c.density() * volume;
    let psi0 = 1.0 / volume.sqrt();
    let overlap = integrate(
        |r| 4.0 * PI * r * r * bound_wavefunction(size, r) * sinc(q * r) * psi0,
        0.0,
        RADIAL_CUTOFF * size,
        spec,
    )?;
    Ok(atoms * overlap * overlap)
}

pub fn form_factor_quadrature(c: &Condensate, size: f64, q: f64) -> Result<f64> {
    form_factor_quadrature_in_volume(c, size, q, 1.0, FORM_FACTOR_QUADRATURE)
}

/// Golden-rule phonon emission rate summed over all phonon states,
/// `∫ d³q V/(2π)³ w(q)`, with the energy delta resolved on the shell
/// `ħω(q0) = Δε`.
pub fn capture_rate_quadrature_in_volume(c: &Condensate, size: f64, mu: f64, volume: f64) -> Result<f64> {
    let m = c.species().mass();
    let mu_c = chemical_potential(c);
    let delta_eps = 1.0 / (2.0 * mu * size * size);
    let q0 = q0_root(c, delta_eps)?;
    let h = GROUP_VELOCITY_STEP * q0;
    let slope = (dispersion(c, q0 + h)? - dispersion(c, q0 - h)?) / (2.0 * h);
    let omega = dispersion(c, q0)?;
    let occupation = bose_occupation(omega, c.thermal_energy());
    let form = form_factor_quadrature_in_volume(c, size, q0, volume, FORM_FACTOR_QUADRATURE)?;

    let emission =
        2.0 * PI * mu_c * mu_c / (c.density() * volume) * (q0 * q0 / (2.0 * m)) * (occupation + 1.0) / omega * form;
    let shell = volume / (2.0 * PI).powi(3) * 4.0 * PI * q0 * q0 / slope;
    Ok(shell * emission)
}

pub fn capture_rate_quadrature(c: &Condensate, size: f64, mu: f64) -> Result<f64> {
    capture_rate_quadrature_in_volume(c, size, mu, 1.0)
}

/// Scans `N` over `[1, 1e7]` for the crossing `|ε(N)| = k_B T`, refining the
/// bracket by successively finer log-spaced scans.
pub fn equilibrium_scan(c: &Condensate, level: &BoundLevel, mu: f64) -> Result<Equilibrium> {
    let kt = c.thermal_energy();
    if !(kt > 0.0) {
        return Err(Error::Domain("equilibrium needs a non-zero temperature".into()));
    }
    let excess = |n: f64| shifted_binding_energy(level, n, c, mu).map(|s| s.epsilon_eff().abs() - kt);
    let unbound = Equilibrium {
        population: 0.0,
        analytic: 0.0,
        thermally_unbound: true,
    };
    let (mut lo, mut hi) = (1.0f64, 1e7f64);
    if excess(lo)? < 0.0 || excess(hi)? > 0.0 {
        return Ok(unbound);
    }
    while hi / lo - 1.0 > 1e-9 {
        let samples = 64;
        let ratio = (hi / lo).powf(1.0 / samples as f64);
        let mut previous = lo;
        let mut found = false;
        for i in 1..=samples {
            let n = if i == samples { hi } else { lo * ratio.powi(i) };
            if excess(n)? <= 0.0 {
                lo = previous;
                hi = n;
                found = true;
                break;
            }
            previous = n;
        }
        if !found {
            return Err(Error::Numeric("lost the equilibrium crossing while refining".into()));
        }
    }
    Ok(Equilibrium {
        population: (lo * hi).sqrt(),
        analytic: f64::NAN,
        thermally_unbound: false,
    })
}
