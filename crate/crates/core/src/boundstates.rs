//! Near-threshold levels of the ion's `-C4/2r^4` polarization potential.
//!
//! A level is characterised by the extent `a_v` of its s-wave function
//! `e^{-r/a_v}/r`, with binding energy `ε_v = -ħ²/(2μ a_v²)`. The uppermost
//! level has `a_v ≈ a_i`, the atom-ion scattering length; deeper levels follow
//! from the LeRoy-Bernstein spacing of the pure polarization potential.

use std::f64::consts::PI;

use crate::condensate::Condensate;
use crate::error::{Error, Result};
use crate::numeric::gamma;
use crate::units::Species;

/// `ε = -ħ²/(2μ a²)`.
pub fn binding_energy(size: f64, mu: f64) -> f64 {
    -1.0 / (2.0 * mu * size * size)
}

/// Inverse of [`binding_energy`]: `a = ħ / sqrt(2μ|ε|)`.
pub fn effective_size(epsilon: f64, mu: f64) -> Result<f64> {
    if !(epsilon < 0.0) {
        return Err(Error::Domain(format!("binding energy must be < 0, got {epsilon}")));
    }
    Ok(1.0 / (2.0 * mu * -epsilon).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundLevel {
    index_below_top: usize,
    size: f64,
    epsilon: f64,
}

impl BoundLevel {
    pub fn new(index_below_top: usize, size: f64, mu: f64) -> Result<Self> {
        if !(size.is_finite() && size > 0.0) {
            return Err(Error::validation("a_v", format!("must be > 0, got {size}")));
        }
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::validation("reduced mass", format!("must be > 0, got {mu}")));
        }
        Ok(BoundLevel {
            index_below_top,
            size,
            epsilon: binding_energy(size, mu),
        })
    }

    /// 0 for the uppermost level.
    pub fn index_below_top(&self) -> usize {
        self.index_below_top
    }

    /// `a_v` in bohr.
    pub fn size(&self) -> f64 {
        self.size
    }

    /// `ε_v` (negative) in Hartree.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `Δε = |ε_v|`.
    pub fn binding(&self) -> f64 {
        -self.epsilon
    }
}

/// A level pushed towards threshold by the mean field of `occupation` trapped
/// atoms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedLevel {
    base: BoundLevel,
    occupation: f64,
    epsilon_eff: f64,
    size_eff: f64,
}

impl ShiftedLevel {
    pub fn base(&self) -> &BoundLevel {
        &self.base
    }

    pub fn occupation(&self) -> f64 {
        self.occupation
    }

    pub fn epsilon_eff(&self) -> f64 {
        self.epsilon_eff
    }

    /// Size of a bare level with binding `epsilon_eff`.
    pub fn size_eff(&self) -> f64 {
        self.size_eff
    }
}

/// Uppermost level, with `a_v = a_i`.
pub fn top_level(species: &Species, mu: f64) -> Result<BoundLevel> {
    BoundLevel::new(0, species.ion_scattering_length(), mu)
}

/// `K4 = 4 sqrt(2π ħ²/μ) Γ(5/4) / (Γ(3/4) C4^{1/4})`.
pub fn k4_constant(species: &Species, mu: f64) -> f64 {
    4.0 * (2.0 * PI / mu).sqrt() * gamma(1.25) / (gamma(0.75) * species.c4().powf(0.25))
}

fn level_below(level: &BoundLevel, k4: f64, mu: f64) -> Result<BoundLevel> {
    let a2 = level.size * level.size;
    let spacing = (2.0 * mu * a2).powf(0.25) * k4;
    BoundLevel::new(level.index_below_top + 1, (a2 / (1.0 + spacing)).sqrt(), mu)
}

/// `a_{v-1}² = a_v² / (1 + (2μ a_v²/ħ²)^{1/4} K4)`.
pub fn next_level_down(level: &BoundLevel, species: &Species, mu: f64) -> Result<BoundLevel> {
    level_below(level, k4_constant(species, mu), mu)
}

/// The `depth` uppermost levels, top first.
pub fn ladder(species: &Species, mu: f64, depth: usize) -> Result<Vec<BoundLevel>> {
    if depth == 0 {
        return Err(Error::validation("depth", "must be >= 1"));
    }
    let k4 = k4_constant(species, mu);
    let mut levels = Vec::with_capacity(depth);
    levels.push(top_level(species, mu)?);
    for i in 1..depth {
        let next = level_below(&levels[i - 1], k4, mu)?;
        levels.push(next);
    }
    Ok(levels)
}

/// Occupation `N* = m a_v / (6 μ a)` below which the shift is clamped.
pub fn shift_threshold(level: &BoundLevel, c: &Condensate, mu: f64) -> f64 {
    let s = c.species();
    s.mass() * level.size / (6.0 * mu * s.scattering_length())
}

/// `ε_v(N) = (m a_v / (6 μ a N))^{2/3} ε_v`, clamped to `ε_v` for `N <= N*`.
pub fn shifted_binding_energy(level: &BoundLevel, occupation: f64, c: &Condensate, mu: f64) -> Result<ShiftedLevel> {
    if !(occupation >= 0.0) {
        return Err(Error::Domain(format!("occupation must be >= 0, got {occupation}")));
    }
    let threshold = shift_threshold(level, c, mu);
    let factor = if occupation <= threshold {
        1.0
    } else {
        (threshold / occupation).powf(2.0 / 3.0)
    };
    let epsilon_eff = factor * level.epsilon;
    let size_eff = if factor == 1.0 {
        level.size
    } else {
        effective_size(epsilon_eff, mu)?
    };
    Ok(ShiftedLevel {
        base: *level,
        occupation,
        epsilon_eff,
        size_eff,
    })
}
