//! Oracle-versus-closed-form comparison table.

use crate::boundstates::top_level;
use crate::condensate::Condensate;
use crate::error::Result;
use crate::kinetics::equilibrium_population;
use crate::oracle;
use crate::rates;
use crate::units::{reduced_mass, IonMass, Species};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    /// Largest relative deviation seen.
    pub deviation: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// `(density cm⁻³, a_v bohr)` on a 10×10 log grid over
/// `[1e12, 1e15] × [500, 5000]`.
pub fn oracle_grid() -> Vec<(f64, f64)> {
    let axis = |lo: f64, hi: f64, i: usize| lo * (hi / lo).powf(i as f64 / 9.0);
    (0..10)
        .flat_map(|i| (0..10).map(move |j| (axis(1e12, 1e15, i), axis(500.0, 5000.0, j))))
        .collect()
}

fn max_over<I: IntoIterator<Item = Result<f64>>>(values: I) -> Result<f64> {
    values.into_iter().try_fold(0.0f64, |acc, v| Ok(acc.max(v?)))
}

/// Runs every comparison for `species` with an infinitely heavy ion.
pub fn run(species: &Species) -> Result<Vec<Check>> {
    let mu = reduced_mass(species, IonMass::Infinite)?;
    let grid = oracle_grid();
    let condensates = grid
        .iter()
        .map(|&(n, size)| Ok((Condensate::from_lab_units(species.clone(), n, 0.0)?, size)))
        .collect::<Result<Vec<_>>>()?;

    let q0 = max_over(condensates.iter().map(|(c, size)| {
        let closed = rates::phonon_momentum(c, *size, mu);
        Ok(rel(oracle::q0_root(c, 1.0 / (2.0 * mu * size * size))?, closed))
    }))?;

    let form = max_over(condensates.iter().map(|(c, size)| {
        let q = rates::phonon_momentum(c, *size, mu);
        Ok(rel(
            oracle::form_factor_quadrature(c, *size, q)?,
            rates::form_factor(c, *size, q),
        ))
    }))?;

    let capture = max_over(condensates.iter().map(|(c, size)| {
        let closed = rates::capture_rate_for_size(c, *size, mu)?.w_cap;
        Ok(rel(oracle::capture_rate_quadrature(c, *size, mu)?, closed))
    }))?;

    let warm = Condensate::from_lab_units(species.clone(), 1e14, 300.0)?;
    let size = species.ion_scattering_length();
    let thermal = rel(
        oracle::capture_rate_quadrature(&warm, size, mu)?,
        rates::capture_rate_for_size(&warm, size, mu)?.w_cap,
    );

    let norm = max_over(
        [500.0, 2000.0, 5000.0]
            .into_iter()
            .map(|a| Ok((oracle::wavefunction_norm(a, oracle::FORM_FACTOR_QUADRATURE)? - 1.0).abs())),
    )?;

    let mut inverse = 0.0f64;
    let mut scan = 0.0f64;
    for t_nk in [10.0, 100.0, 500.0] {
        let c = Condensate::from_lab_units(species.clone(), 1e14, t_nk)?;
        let level = top_level(species, mu)?;
        let solved = equilibrium_population(&c, &level, mu)?;
        let scanned = oracle::equilibrium_scan(&c, &level, mu)?;
        if solved.thermally_unbound || scanned.thermally_unbound {
            if solved.thermally_unbound != scanned.thermally_unbound {
                scan = f64::INFINITY;
            }
            continue;
        }
        inverse = inverse.max(rel(solved.population, solved.analytic));
        scan = scan.max(rel(scanned.population, solved.population));
    }

    Ok(vec![
        Check {
            name: "q0: closed form vs dispersion root (10x10 grid)",
            deviation: q0,
            tolerance: 1e-10,
        },
        Check {
            name: "I(q0): closed form vs radial quadrature (10x10 grid)",
            deviation: form,
            tolerance: 1e-8,
        },
        Check {
            name: "W_cap: closed form vs golden-rule quadrature (10x10 grid)",
            deviation: capture,
            tolerance: 1e-6,
        },
        Check {
            name: "W_cap at 300 nK: closed form vs golden-rule quadrature",
            deviation: thermal,
            tolerance: 1e-6,
        },
        Check {
            name: "bound wavefunction norm",
            deviation: norm,
            tolerance: 1e-10,
        },
        Check {
            name: "N_max: bracketed root vs analytic inverse",
            deviation: inverse,
            tolerance: 1e-10,
        },
        Check {
            name: "N_max: bracketed root vs N scan",
            deviation: scan,
            tolerance: 1e-3,
        },
    ])
}
