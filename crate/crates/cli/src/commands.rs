use std::io::Write;

use serde::Serialize;

use molion::boundstates::{next_level_down, shifted_binding_energy};
use molion::condensate::{chemical_potential, sound_speed};
use molion::kinetics::sweep::{log_grid, sweep_xi};
use molion::kinetics::{equilibrium_population, evolve};
use molion::rates::{
    capture_rate, capture_ratio, downward_rate, heating_limit, heating_ok, per_second, stimulated_number,
    stimulated_rate,
};
use molion::units::reduced_mass;
use molion::{verify, BoundLevel, Condensate, Error, Evolution, EvolveOptions, IonMass, LaserDrive, Species, Unit};

use crate::args::*;
use crate::format::{csv, json};

/// What went wrong, and which exit code it maps to.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, config or input files. Exit 2.
    Usage(String),
    /// The physics refused: regime violations, depletion, unbound level,
    /// solver failure. Exit 1.
    Physics(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Physics(_) => 1,
            Failure::Usage(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Physics(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Validation { .. } | Error::UnknownSpecies(_) | Error::Parse(_) | Error::DimensionMismatch { .. } => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Physics(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Physics(format!("write failed: {e}"))
    }
}

type Outcome = Result<(), Failure>;

/// Flags with defaults applied and the physical objects they describe.
struct Setup {
    flags: Flags,
    condensate: Condensate,
    mu: f64,
    level: BoundLevel,
}

impl Setup {
    fn new<E: Write>(flags: Flags, err: &mut E) -> Result<Self, Failure> {
        let species = Species::load(flags.species.as_deref().unwrap_or(DEFAULT_SPECIES))?;
        let mu = reduced_mass(&species, flags.mass_mode.map_or(IonMass::default(), |m| m.0))?;
        let size = flags.av.unwrap_or(species.ion_scattering_length());
        let level = BoundLevel::new(0, size, mu)?;
        let condensate = Condensate::from_lab_units(
            species,
            flags.density.unwrap_or(DEFAULT_DENSITY_CM3),
            flags.temp.unwrap_or(DEFAULT_TEMP_NK),
        )?;
        if let Some(w) = condensate.diluteness_warning() {
            writeln!(err, "warning: {w}")?;
        }
        Ok(Setup {
            flags,
            condensate,
            mu,
            level,
        })
    }

    fn format(&self, default: Format) -> Format {
        self.flags.format.unwrap_or(default)
    }

    fn evolve_options(&self) -> EvolveOptions {
        EvolveOptions::new(Unit::Second.to_internal(self.flags.tmax.unwrap_or(DEFAULT_TMAX_S)))
    }
}

fn nanokelvin(energy: f64) -> f64 {
    Unit::Nanokelvin.from_internal(energy)
}

/// Writes a single record either as a JSON object or as a one-row CSV.
fn record<W: Write, T: Serialize>(out: &mut W, format: Format, value: &T) -> Outcome {
    match format {
        Format::Json => json(out, value)?,
        Format::Csv => {
            let map = match serde_json::to_value(value).expect("records serialise") {
                serde_json::Value::Object(map) => map,
                _ => unreachable!("records are structs"),
            };
            let header: Vec<&str> = map.keys().map(String::as_str).collect();
            writeln!(out, "{}", header.join(","))?;
            let fields: Vec<String> = map
                .values()
                .map(|v| match v {
                    serde_json::Value::Number(n) => crate::format::number(n.as_f64().unwrap_or(f64::NAN)),
                    serde_json::Value::Null => "NaN".into(),
                    other => other.to_string(),
                })
                .collect();
            writeln!(out, "{}", fields.join(","))?;
        }
    }
    Ok(())
}

/// Rows of a table either as CSV or as a JSON array of objects.
fn table<W: Write>(out: &mut W, format: Format, header: &[&str], rows: &[Vec<f64>]) -> Outcome {
    match format {
        Format::Csv => csv(out, header, rows)?,
        Format::Json => {
            let objects: Vec<serde_json::Map<String, serde_json::Value>> = rows
                .iter()
                .map(|row| {
                    header
                        .iter()
                        .zip(row)
                        .map(|(k, &v)| {
                            (
                                k.to_string(),
                                serde_json::Number::from_f64(v).map_or(serde_json::Value::Null, Into::into),
                            )
                        })
                        .collect()
                })
                .collect();
            json(out, &objects)?;
        }
    }
    Ok(())
}

/// Runs `command`, writing data to `out` and warnings to `err`.
pub fn run<W: Write, E: Write>(command: Command, flags: Flags, out: &mut W, err: &mut E) -> Outcome {
    if command == Command::Verify {
        return verify_cmd(flags, out);
    }
    let setup = Setup::new(flags, err)?;
    match command {
        Command::Rates => rates_cmd(&setup, out),
        Command::Sweep => sweep_cmd(&setup, out),
        Command::Ladder => ladder_cmd(&setup, out),
        Command::Evolve => evolve_cmd(&setup, out),
        Command::Equilibrium => equilibrium_cmd(&setup, out),
        Command::Stimulated => stimulated_cmd(&setup, out),
        Command::Verify => unreachable!(),
    }
}

#[derive(Serialize)]
struct RatesRecord {
    mu_c_over_kb_nk: f64,
    sound_speed_m_per_s: f64,
    xi: f64,
    q0_per_a0: f64,
    form_factor_q0: f64,
    occupation_q0: f64,
    w_cap_per_s: f64,
    w_down_per_s: f64,
    heating_limit_per_s: f64,
}

fn rates_cmd<W: Write>(s: &Setup, out: &mut W) -> Outcome {
    let c = &s.condensate;
    let rb = capture_rate(c, &s.level, s.mu)?;
    let w_down = downward_rate(c, &s.level, c.species(), s.mu)?;
    let rec = RatesRecord {
        mu_c_over_kb_nk: nanokelvin(chemical_potential(c)),
        sound_speed_m_per_s: Unit::MeterPerSecond.from_internal(sound_speed(c)),
        xi: rb.xi,
        q0_per_a0: rb.q0,
        form_factor_q0: rb.form_factor_q0,
        occupation_q0: rb.occupation_q0,
        w_cap_per_s: rb.w_cap_per_s(),
        w_down_per_s: per_second(w_down),
        heating_limit_per_s: per_second(heating_limit(c)),
    };
    record(out, s.format(Format::Json), &rec)
}

fn sweep_cmd<W: Write>(s: &Setup, out: &mut W) -> Outcome {
    let f = &s.flags;
    let grid = log_grid(
        f.xi_min.unwrap_or(DEFAULT_XI_MIN),
        f.xi_max.unwrap_or(DEFAULT_XI_MAX),
        f.points.unwrap_or(DEFAULT_POINTS),
    )?;
    let slice = f.slice.unwrap_or(SliceArg::Size).into();
    let sweep = sweep_xi(&s.condensate, s.level.size(), s.mu, &grid, slice)?;
    let rows: Vec<Vec<f64>> = sweep
        .points
        .iter()
        .chain(std::iter::once(&sweep.argmax))
        .map(|p| vec![p.xi, per_second(p.w_cap)])
        .collect();
    table(out, s.format(Format::Csv), &["xi", "w_cap_per_s"], &rows)
}

fn ladder_cmd<W: Write>(s: &Setup, out: &mut W) -> Outcome {
    let depth = s.flags.depth.unwrap_or(DEFAULT_DEPTH);
    if depth == 0 {
        return Err(Failure::Usage("invalid depth: must be >= 1".into()));
    }
    let species = s.condensate.species();
    let mut levels = vec![s.level];
    while levels.len() < depth {
        let next = next_level_down(levels.last().expect("non-empty"), species, s.mu)?;
        levels.push(next);
    }
    let rows: Vec<Vec<f64>> = levels
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let ratio = if k == 0 {
                f64::NAN
            } else {
                capture_ratio(levels[k - 1].size(), species, s.mu)
            };
            vec![k as f64, l.size(), nanokelvin(l.epsilon()), ratio]
        })
        .collect();
    table(
        out,
        s.format(Format::Csv),
        &["index", "a_v_a0", "epsilon_over_kB_nK", "capture_ratio_to_level_above"],
        &rows,
    )
}

const EVOLVE_HEADER: [&str; 7] = [
    "t_s",
    "N",
    "epsilon_eff_over_kB_nK",
    "xi_eff",
    "w_cap",
    "w_up",
    "w_down",
];

fn evolution_rows(ev: &Evolution) -> Vec<Vec<f64>> {
    ev.states
        .iter()
        .map(|st| {
            vec![
                Unit::Second.from_internal(st.t),
                st.population,
                nanokelvin(st.epsilon_eff),
                st.xi_eff,
                per_second(st.w_cap),
                per_second(st.w_up),
                per_second(st.w_down),
            ]
        })
        .collect()
}

fn evolve_cmd<W: Write>(s: &Setup, out: &mut W) -> Outcome {
    let opts = s.evolve_options();
    let format = s.format(Format::Csv);
    match evolve(&s.condensate, &s.level, s.mu, &opts) {
        Ok(ev) => table(out, format, &EVOLVE_HEADER, &evolution_rows(&ev)),
        Err(Error::MaxSteps { max_steps, t, partial }) => {
            table(out, format, &EVOLVE_HEADER, &evolution_rows(&partial))?;
            Err(Failure::Physics(format!(
                "step limit of {max_steps} reached at t = {:e} s; partial series written",
                Unit::Second.from_internal(t)
            )))
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct EquilibriumRecord {
    n_max: f64,
    xi_final: f64,
    t_equilibration_estimate: f64,
}

fn equilibrium_cmd<W: Write>(s: &Setup, out: &mut W) -> Outcome {
    let c = &s.condensate;
    let eq = equilibrium_population(c, &s.level, s.mu)?;
    if eq.thermally_unbound {
        return Err(Failure::Physics(format!(
            "level is thermally unbound: k_B T = {} nK exceeds |ε_v| = {} nK",
            nanokelvin(c.thermal_energy()),
            nanokelvin(s.level.binding())
        )));
    }
    let shifted = shifted_binding_energy(&s.level, eq.population, c, s.mu)?;
    let xi_final = chemical_potential(c) / shifted.epsilon_eff().abs();

    let ev = evolve(c, &s.level, s.mu, &s.evolve_options())?;
    let terminal = ev.last().population;
    let reached = ev
        .states
        .iter()
        .find(|st| st.population >= 0.99 * terminal)
        .expect("the terminal state qualifies");
    let rec = EquilibriumRecord {
        n_max: eq.population,
        xi_final,
        t_equilibration_estimate: Unit::Second.from_internal(reached.t),
    };
    record(out, s.format(Format::Json), &rec)
}

#[derive(Serialize)]
struct StimulatedRecord {
    n_v_tau: f64,
    w_st: f64,
    heating_limit: f64,
    heating_ok: bool,
}

fn stimulated_cmd<W: Write>(s: &Setup, out: &mut W) -> Outcome {
    let f = &s.flags;
    let (Some(rabi), Some(tau)) = (f.rabi, f.tau) else {
        return Err(Failure::Usage("stimulated needs --rabi and --tau".into()));
    };
    let drive = LaserDrive::from_lab_units(rabi, tau)?;
    let c = &s.condensate;
    let size = s.level.size();
    let n_v = stimulated_number(&drive, c, size, f.atoms.unwrap_or(DEFAULT_ATOMS))?;
    let w_st = stimulated_rate(&drive, c, size);
    let rec = StimulatedRecord {
        n_v_tau: n_v,
        w_st: per_second(w_st),
        heating_limit: per_second(heating_limit(c)),
        heating_ok: heating_ok(w_st, c),
    };
    record(out, s.format(Format::Json), &rec)
}

#[derive(Serialize)]
struct CheckRecord<'a> {
    check: &'a str,
    deviation: f64,
    tolerance: f64,
    pass: bool,
}

fn verify_cmd<W: Write>(flags: Flags, out: &mut W) -> Outcome {
    let species = Species::load(flags.species.as_deref().unwrap_or(DEFAULT_SPECIES))?;
    let checks = verify::run(&species)?;
    match flags.format {
        Some(Format::Json) => {
            let rows: Vec<CheckRecord> = checks
                .iter()
                .map(|c| CheckRecord {
                    check: c.name,
                    deviation: c.deviation,
                    tolerance: c.tolerance,
                    pass: c.passed(),
                })
                .collect();
            json(out, &rows)?;
        }
        _ => {
            writeln!(out, "{:<6} {:<16} {:<10} check", "result", "deviation", "tolerance")?;
            for c in &checks {
                writeln!(
                    out,
                    "{:<6} {:<16} {:<10} {}",
                    if c.passed() { "pass" } else { "FAIL" },
                    crate::format::number(c.deviation),
                    crate::format::number(c.tolerance),
                    c.name
                )?;
            }
        }
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Physics(format!(
            "{failed} of {} oracle checks failed",
            checks.len()
        )))
    }
}
