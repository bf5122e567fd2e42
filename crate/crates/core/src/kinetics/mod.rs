//! Growth of the trapped population of the uppermost level.
//!
//! The occupation `N` obeys
//!
//! ```text
//! dN/dt = W_cap (N + 1) - (W_down + W_up) N
//! ```
//!
//! where every rate is re-evaluated at the mean-field-shifted level for the
//! current `N`. As `N` grows the level rises, `ξ` grows towards `μ_c/k_B T`,
//! and thermal escape eventually balances capture.

pub mod sweep;

use crate::boundstates::{shift_threshold, shifted_binding_energy, BoundLevel};
use crate::condensate::{chemical_potential, Condensate};
use crate::error::{Error, Result};
use crate::numeric::{brent, dormand_prince_step, expand_upward};
use crate::rates::{capture_rate, downward_rate, upward_from_capture};

/// Population and instantaneous rates at one time. Rates and times are in
/// atomic units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KineticState {
    pub t: f64,
    pub population: f64,
    pub epsilon_eff: f64,
    pub xi_eff: f64,
    pub w_cap: f64,
    pub w_down: f64,
    pub w_up: f64,
}

/// `dN/dt` from the state's own rates.
pub fn population_derivative(state: &KineticState) -> f64 {
    state.w_cap * (state.population + 1.0) - (state.w_down + state.w_up) * state.population
}

/// Which accepted steps end up in the returned series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Record {
    /// Every k-th accepted step.
    EverySteps(usize),
    /// First accepted step at or after each multiple of this interval.
    EveryTime(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub t_max: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    pub record: Record,
    pub initial_population: f64,
    /// Re-shift the level with `N` at every evaluation. When off, all rates
    /// are frozen at their `N = 0` values.
    pub feedback: bool,
}

impl EvolveOptions {
    pub fn new(t_max: f64) -> Self {
        EvolveOptions {
            t_max,
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_steps: 100_000,
            record: Record::EverySteps(1),
            initial_population: 0.0,
            feedback: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(Error::validation("t_max", format!("must be > 0, got {}", self.t_max)));
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::validation("tolerances", "must be > 0"));
        }
        if !(self.initial_population.is_finite() && self.initial_population >= 0.0) {
            return Err(Error::validation("initial population", "must be >= 0"));
        }
        match self.record {
            Record::EverySteps(0) => Err(Error::validation("record", "step stride must be >= 1")),
            Record::EveryTime(dt) if !(dt > 0.0) => Err(Error::validation("record", "interval must be > 0")),
            _ => Ok(()),
        }
    }
}

/// Number of consecutive quiet accepted steps that ends an evolution early.
pub const QUIET_STEPS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    pub states: Vec<KineticState>,
    /// Ended by stationarity detection rather than reaching `t_max`.
    pub stationary: bool,
    /// Sum of the accepted local error estimates, in units of `N`.
    pub error_estimate: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Evolution {
    pub fn last(&self) -> &KineticState {
        self.states.last().expect("an evolution always holds its initial state")
    }
}

/// Source of instantaneous rates for a given population.
pub trait RateModel {
    fn state_at(&self, t: f64, population: f64) -> Result<KineticState>;
}

/// Rates of a fixed snapshot, independent of `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantRates(KineticState);

impl ConstantRates {
    pub fn new(w_cap: f64, w_down: f64, w_up: f64) -> Self {
        ConstantRates(KineticState {
            t: 0.0,
            population: 0.0,
            epsilon_eff: 0.0,
            xi_eff: 0.0,
            w_cap,
            w_down,
            w_up,
        })
    }

    pub fn from_state(state: KineticState) -> Self {
        ConstantRates(state)
    }
}

impl RateModel for ConstantRates {
    fn state_at(&self, t: f64, population: f64) -> Result<KineticState> {
        Ok(KineticState {
            t,
            population,
            ..self.0
        })
    }
}

/// Capture into the shifted uppermost level, thermal escape from it, and
/// decay to the (empty, unshifted) level below.
#[derive(Debug, Clone)]
pub struct ShiftedLevelRates<'a> {
    condensate: &'a Condensate,
    level: BoundLevel,
    mu: f64,
    mu_c: f64,
    w_down: f64,
}

impl<'a> ShiftedLevelRates<'a> {
    pub fn new(condensate: &'a Condensate, level: &BoundLevel, mu: f64) -> Result<Self> {
        Ok(ShiftedLevelRates {
            condensate,
            level: *level,
            mu,
            mu_c: chemical_potential(condensate),
            w_down: downward_rate(condensate, level, condensate.species(), mu)?,
        })
    }
}

impl RateModel for ShiftedLevelRates<'_> {
    fn state_at(&self, t: f64, population: f64) -> Result<KineticState> {
        let shifted = shifted_binding_energy(&self.level, population, self.condensate, self.mu)?;
        let w_cap = capture_rate(self.condensate, &shifted, self.mu)?.w_cap;
        let epsilon_eff = shifted.epsilon_eff();
        Ok(KineticState {
            t,
            population,
            epsilon_eff,
            xi_eff: self.mu_c / epsilon_eff.abs(),
            w_cap,
            w_down: self.w_down,
            w_up: upward_from_capture(w_cap, epsilon_eff, self.condensate.thermal_energy()),
        })
    }
}

/// Integrates the population equation for `model` with an adaptive
/// Dormand-Prince 5(4) pair.
///
/// Stops at `t_max`, or once `|dN/dt| < (abs_tol + rel_tol·N) · W_tot` has
/// held for [`QUIET_STEPS`] consecutive accepted steps, where `W_tot` is the
/// sum of the three current rates.
pub fn integrate<M: RateModel + ?Sized>(model: &M, opts: &EvolveOptions) -> Result<Evolution> {
    opts.validate()?;
    let initial = model.state_at(0.0, opts.initial_population)?;

    let mut evolution = Evolution {
        states: vec![initial],
        stationary: false,
        error_estimate: 0.0,
        accepted_steps: 0,
        rejected_steps: 0,
    };
    let mut t = 0.0;
    let mut y = opts.initial_population;
    let mut last = initial;

    let scale = initial.w_cap + initial.w_down + initial.w_up;
    let mut h = if scale > 0.0 {
        (1e-2 / scale).min(opts.t_max)
    } else {
        opts.t_max
    };
    let mut quiet = 0;
    let mut next_record = match opts.record {
        Record::EveryTime(dt) => dt,
        Record::EverySteps(_) => 0.0,
    };

    while t < opts.t_max {
        if evolution.accepted_steps + evolution.rejected_steps >= opts.max_steps {
            if evolution.states.last().map(|s| s.t) != Some(last.t) {
                evolution.states.push(last);
            }
            return Err(Error::MaxSteps {
                max_steps: opts.max_steps,
                t,
                partial: Box::new(evolution),
            });
        }
        h = h.min(opts.t_max - t);
        let rhs = |n: f64| model.state_at(t, n.max(0.0)).map(|s| population_derivative(&s));
        let (y_new, err) = dormand_prince_step(rhs, y, h)?;
        let tol = opts.abs_tol + opts.rel_tol * y.abs().max(y_new.abs());
        let ratio = err.abs() / tol;

        if ratio <= 1.0 {
            t = if opts.t_max - t <= h { opts.t_max } else { t + h };
            y = y_new.max(0.0);
            evolution.accepted_steps += 1;
            evolution.error_estimate += err.abs();
            last = model.state_at(t, y)?;

            let record = match opts.record {
                Record::EverySteps(k) => evolution.accepted_steps.is_multiple_of(k),
                Record::EveryTime(dt) => {
                    if t >= next_record {
                        while next_record <= t {
                            next_record += dt;
                        }
                        true
                    } else {
                        false
                    }
                }
            };
            if record {
                evolution.states.push(last);
            }

            // Quiet: N moves by less than the step tolerance per relaxation time.
            let quiet_below = (opts.abs_tol + opts.rel_tol * y) * (last.w_cap + last.w_down + last.w_up);
            if population_derivative(&last).abs() < quiet_below {
                quiet += 1;
                if quiet >= QUIET_STEPS {
                    evolution.stationary = true;
                    break;
                }
            } else {
                quiet = 0;
            }
        } else {
            evolution.rejected_steps += 1;
        }

        let factor = if ratio == 0.0 {
            5.0
        } else {
            (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }

    if evolution.states.last().map(|s| s.t) != Some(last.t) {
        evolution.states.push(last);
    }
    Ok(evolution)
}

/// Evolves the population of `level` in condensate `c`.
pub fn evolve(c: &Condensate, level: &BoundLevel, mu: f64, opts: &EvolveOptions) -> Result<Evolution> {
    let model = ShiftedLevelRates::new(c, level, mu)?;
    if opts.feedback {
        integrate(&model, opts)
    } else {
        let frozen = model.state_at(0.0, 0.0)?;
        integrate(&ConstantRates::from_state(frozen), opts)
    }
}

/// Thermal-equilibrium occupation of a level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    /// Root of `|ε(N)| = k_B T`.
    pub population: f64,
    /// `(m a_v / 6μa) (|ε_v| / k_B T)^{3/2}`.
    pub analytic: f64,
    /// `k_B T > |ε_v|`: the level holds nothing even when empty.
    pub thermally_unbound: bool,
}

fn require_temperature(c: &Condensate) -> Result<f64> {
    let kt = c.thermal_energy();
    if kt > 0.0 {
        Ok(kt)
    } else {
        Err(Error::Domain("equilibrium needs a non-zero temperature".into()))
    }
}

/// Occupation at which the mean-field-shifted level sits at `k_B T`.
pub fn equilibrium_population(c: &Condensate, level: &BoundLevel, mu: f64) -> Result<Equilibrium> {
    let kt = require_temperature(c)?;
    let binding = level.binding();
    if kt > binding {
        return Ok(Equilibrium {
            population: 0.0,
            analytic: 0.0,
            thermally_unbound: true,
        });
    }
    let threshold = shift_threshold(level, c, mu);
    let analytic = threshold * (binding / kt).powf(1.5);
    if kt == binding {
        return Ok(Equilibrium {
            population: threshold,
            analytic,
            thermally_unbound: false,
        });
    }
    let mismatch = |n: f64| {
        shifted_binding_energy(level, n, c, mu)
            .map(|s| s.epsilon_eff().abs() - kt)
            .unwrap_or(f64::NAN)
    };
    let hi = expand_upward(mismatch, threshold, 2.0 * threshold, 200)?;
    let population = brent(mismatch, threshold, hi, 0.0, 1e-15)?;
    Ok(Equilibrium {
        population,
        analytic,
        thermally_unbound: false,
    })
}

/// The evolution projected onto the `(ξ_eff, W_cap)` plane.
pub fn trajectory(c: &Condensate, level: &BoundLevel, mu: f64, opts: &EvolveOptions) -> Result<Vec<(f64, f64)>> {
    require_temperature(c)?;
    let evolution = evolve(c, level, mu, opts)?;
    Ok(evolution.states.iter().map(|s| (s.xi_eff, s.w_cap)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundstates::top_level;
    use crate::rates::capture_rate_for_size;
    use crate::units::{reduced_mass, IonMass, Species, Unit};

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn anchor(t_nk: f64) -> (Condensate, BoundLevel, f64) {
        let s = Species::sodium();
        let mu = reduced_mass(&s, IonMass::Infinite).unwrap();
        let level = top_level(&s, mu).unwrap();
        (Condensate::from_lab_units(s, 1e14, t_nk).unwrap(), level, mu)
    }

    fn seconds(t: f64) -> f64 {
        Unit::Second.to_internal(t)
    }

    #[test]
    fn derivative_cases() {
        let rates = ConstantRates::new(3.0, 0.5, 0.25);
        let s = rates.state_at(0.0, 0.0).unwrap();
        assert_eq!(population_derivative(&s), 3.0);
        let s = ConstantRates::new(2.0, 0.0, 2.0).state_at(0.0, 1e6).unwrap();
        assert_eq!(population_derivative(&s), 2.0);
        let s = ConstantRates::new(0.0, 0.0, 0.0).state_at(0.0, 7.0).unwrap();
        assert_eq!(population_derivative(&s), 0.0);
    }

    #[test]
    fn linear_growth_matches_closed_form() {
        let (c, level, mu) = anchor(0.0);
        let mut opts = EvolveOptions::new(seconds(5e-3));
        opts.feedback = false;
        opts.initial_population = 3.0;
        let ev = evolve(&c, &level, mu, &opts).unwrap();
        let first = ev.states[0];
        assert_eq!(first.w_up, 0.0);
        let k = first.w_cap - first.w_down;
        let wbar = first.w_cap / k;
        for s in &ev.states {
            let exact = (3.0 + wbar) * (k * s.t).exp() - wbar;
            assert!(rel(s.population, exact) < 1e-6, "t = {}", s.t);
        }
    }

    #[test]
    fn pure_decay() {
        let rate = seconds(1.0).recip() * 100.0;
        let model = ConstantRates::new(0.0, 0.6 * rate, 0.4 * rate);
        let mut opts = EvolveOptions::new(5.0 / rate);
        opts.initial_population = 50.0;
        let ev = integrate(&model, &opts).unwrap();
        assert!(!ev.stationary);
        for s in &ev.states {
            assert!(rel(s.population, 50.0 * (-rate * s.t).exp()) < 1e-6);
        }
        assert_eq!(ev.last().t, opts.t_max);
    }

    #[test]
    fn step_limit_keeps_partial_series() {
        let (c, level, mu) = anchor(100.0);
        let mut opts = EvolveOptions::new(seconds(1.0));
        opts.max_steps = 5;
        match evolve(&c, &level, mu, &opts) {
            Err(Error::MaxSteps { partial, max_steps, .. }) => {
                assert_eq!(max_steps, 5);
                assert!(partial.states.len() >= 2);
                assert!(partial.states.windows(2).all(|w| w[1].t > w[0].t));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invalid_options() {
        let (c, level, mu) = anchor(0.0);
        assert!(evolve(&c, &level, mu, &EvolveOptions::new(0.0)).is_err());
        let mut opts = EvolveOptions::new(1.0);
        opts.record = Record::EverySteps(0);
        assert!(evolve(&c, &level, mu, &opts).is_err());
    }

    #[test]
    fn recording_by_time() {
        let (c, level, mu) = anchor(100.0);
        let mut opts = EvolveOptions::new(seconds(0.05));
        opts.record = Record::EveryTime(seconds(1e-3));
        let ev = evolve(&c, &level, mu, &opts).unwrap();
        let mut all = opts;
        all.record = Record::EverySteps(1);
        let full = evolve(&c, &level, mu, &all).unwrap();
        assert!(ev.states.len() < full.states.len());
        assert_eq!(ev.last(), full.last());
    }

    #[test]
    fn sodium_equilibrium_at_100_nk() {
        let (c, level, mu) = anchor(100.0);
        let eq = equilibrium_population(&c, &level, mu).unwrap();
        assert!(!eq.thermally_unbound);
        assert!(rel(eq.population, eq.analytic) < 1e-10);
        assert!((eq.population - 185.3).abs() < 0.5, "{}", eq.population);

        let s = c.species().clone();
        let mu2 = reduced_mass(&s, IonMass::Equal).unwrap();
        let level2 = top_level(&s, mu2).unwrap();
        let eq2 = equilibrium_population(&c, &level2, mu2).unwrap();
        assert!((eq2.population - 1048.0).abs() < 2.0, "{}", eq2.population);
    }

    #[test]
    fn equilibrium_edges() {
        let (c, level, mu) = anchor(100.0);
        let colder = c.with_temperature(c.thermal_energy() / 4.0).unwrap();
        let a = equilibrium_population(&c, &level, mu).unwrap().population;
        let b = equilibrium_population(&colder, &level, mu).unwrap().population;
        assert!(rel(b, 8.0 * a) < 1e-10);

        let at_threshold = c.with_temperature(level.binding()).unwrap();
        let eq = equilibrium_population(&at_threshold, &level, mu).unwrap();
        assert_eq!(eq.population, shift_threshold(&level, &c, mu));

        let hot = c.with_temperature(2.0 * level.binding()).unwrap();
        let eq = equilibrium_population(&hot, &level, mu).unwrap();
        assert!(eq.thermally_unbound);
        assert_eq!(eq.population, 0.0);

        let (cold, _, _) = anchor(0.0);
        assert!(equilibrium_population(&cold, &level, mu).is_err());
    }

    #[test]
    fn sodium_saturates_at_equilibrium() {
        let (c, level, mu) = anchor(100.0);
        let ev = evolve(&c, &level, mu, &EvolveOptions::new(seconds(1.0))).unwrap();
        assert!(ev.stationary);
        let eq = equilibrium_population(&c, &level, mu).unwrap();
        let n = ev.last().population;
        assert!(rel(n, eq.population) < 0.05, "N = {n}, N_max = {}", eq.population);
        for s in &ev.states {
            assert!(s.population >= 0.0);
            assert!(rel(s.xi_eff, chemical_potential(&c) / s.epsilon_eff.abs()) < 1e-12);
            assert!(s.w_cap >= 0.0 && s.w_up >= 0.0 && s.w_down >= 0.0);
        }
    }

    #[test]
    fn fixed_point_is_attracting() {
        let (c, level, mu) = anchor(100.0);
        let model = ShiftedLevelRates::new(&c, &level, mu).unwrap();
        let n_max = equilibrium_population(&c, &level, mu).unwrap().population;
        let below = population_derivative(&model.state_at(0.0, 0.9 * n_max).unwrap());
        let above = population_derivative(&model.state_at(0.0, 1.05 * n_max).unwrap());
        assert!(below > 0.0 && above < 0.0);
    }

    #[test]
    fn tighter_tolerance_stays_within_error_estimate() {
        let (c, level, mu) = anchor(100.0);
        let opts = EvolveOptions::new(seconds(1.0));
        let mut tight = opts;
        tight.rel_tol /= 2.0;
        let a = evolve(&c, &level, mu, &opts).unwrap();
        let b = evolve(&c, &level, mu, &tight).unwrap();
        let diff = (a.last().population - b.last().population).abs();
        assert!(diff < a.error_estimate, "diff {diff}, estimate {}", a.error_estimate);
    }

    #[test]
    fn evolution_is_deterministic() {
        let (c, level, mu) = anchor(100.0);
        let opts = EvolveOptions::new(seconds(0.05));
        assert_eq!(
            evolve(&c, &level, mu, &opts).unwrap(),
            evolve(&c, &level, mu, &opts).unwrap()
        );
    }

    #[test]
    fn trajectory_at_100_nk() {
        let (c, level, mu) = anchor(100.0);
        let path = trajectory(&c, &level, mu, &EvolveOptions::new(seconds(1.0))).unwrap();
        let initial = capture_rate_for_size(&c, level.size(), mu).unwrap().xi;
        assert!(rel(path[0].0, initial) < 1e-12);
        // Monotone up to the step tolerance on N.
        assert!(path.windows(2).all(|w| w[1].0 >= w[0].0 * (1.0 - 1e-7)));
        let target = chemical_potential(&c) / c.thermal_energy();
        let last = path.last().unwrap().0;
        assert!(rel(last, target) < 0.05, "ξ = {last}, μ_c/kT = {target}");
    }

    #[test]
    fn trajectory_passes_through_maximum_at_10_nk() {
        let (c, level, mu) = anchor(10.0);
        let path = trajectory(&c, &level, mu, &EvolveOptions::new(seconds(2.0))).unwrap();
        let cold = c.with_temperature(0.0).unwrap();
        let grid = sweep::log_grid(1e-2, 1e2, 41).unwrap();
        let curve = sweep::sweep_xi(&cold, level.size(), mu, &grid, sweep::Slice::Size).unwrap();
        let xi_star = curve.argmax.xi;
        let (start, end) = (path[0].0, path.last().unwrap().0);
        assert!(start < xi_star && xi_star < end);
        let best = path
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .unwrap()
            .0;
        assert!(best > 0 && best < path.len() - 1);
    }
}
