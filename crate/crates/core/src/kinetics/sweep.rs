//! Capture rate as a function of `ξ`.
//!
//! `ξ = 8π n a_v² a μ/m` can be moved either by the density at fixed level
//! size ([`Slice::Density`], where `μ_c ∝ ξ`) or by the level size at fixed
//! density ([`Slice::Size`], where `μ_c` is constant). The asymptotic
//! log-log slopes of `W(ξ)` are `+2, -1/2` for the first slice and
//! `+1, -3/2` for the second.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::condensate::Condensate;
use crate::error::{Error, Result};
use crate::numeric::golden_max;
use crate::rates::capture_rate_for_size;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slice {
    /// Fixed `a_v`, density varied.
    Density,
    /// Fixed density, `a_v` varied.
    Size,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub xi: f64,
    pub w_cap: f64,
    pub density: f64,
    pub size: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub slice: Slice,
    pub points: Vec<SweepPoint>,
    /// Refined maximum of the curve.
    pub argmax: SweepPoint,
}

/// `points` values from `min` to `max`, evenly spaced in `ln ξ`.
pub fn log_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max > min && min.is_finite() && max.is_finite()) {
        return Err(Error::validation(
            "xi range",
            format!("need 0 < min < max, got [{min}, {max}]"),
        ));
    }
    match points {
        0 => Err(Error::validation("points", "must be >= 1")),
        1 => Ok(vec![min]),
        _ => {
            let (lo, hi) = (min.ln(), max.ln());
            let step = (hi - lo) / (points - 1) as f64;
            Ok((0..points)
                .map(|i| match i {
                    0 => min,
                    i if i == points - 1 => max,
                    i => (lo + step * i as f64).exp(),
                })
                .collect())
        }
    }
}

fn point_at(template: &Condensate, size: f64, mu: f64, xi: f64, slice: Slice) -> Result<SweepPoint> {
    let s = template.species();
    // ξ = k · n · a_v²
    let k = 8.0 * PI * s.scattering_length() * mu / s.mass();
    let (c, size) = match slice {
        Slice::Density => (template.with_density(xi / (k * size * size))?, size),
        Slice::Size => (template.clone(), (xi / (k * template.density())).sqrt()),
    };
    let w_cap = capture_rate_for_size(&c, size, mu)?.w_cap;
    Ok(SweepPoint {
        xi,
        w_cap,
        density: c.density(),
        size,
    })
}

/// Evaluates the capture rate along `grid` and locates the maximum.
///
/// In [`Slice::Size`] the `size` argument is ignored; in [`Slice::Density`]
/// the template's density is. Grid points are evaluated in parallel; output
/// order follows the grid.
pub fn sweep_xi(template: &Condensate, size: f64, mu: f64, grid: &[f64], slice: Slice) -> Result<Sweep> {
    if grid.is_empty() {
        return Err(Error::validation("xi grid", "must not be empty"));
    }
    if grid.iter().any(|&x| !(x > 0.0 && x.is_finite())) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::validation("xi grid", "must be positive and strictly increasing"));
    }
    let points = grid
        .par_iter()
        .map(|&xi| point_at(template, size, mu, xi, slice))
        .collect::<Result<Vec<_>>>()?;

    let best = points
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.w_cap.total_cmp(&b.1.w_cap))
        .map(|(i, _)| i)
        .expect("grid is not empty");
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    let argmax = if lo < hi {
        let (xi, _) = golden_max(
            |x| point_at(template, size, mu, x, slice).map_or(f64::NEG_INFINITY, |p| p.w_cap),
            lo,
            hi,
            1e-10,
        );
        point_at(template, size, mu, xi, slice)?
    } else {
        points[best]
    };
    Ok(Sweep { slice, points, argmax })
}
