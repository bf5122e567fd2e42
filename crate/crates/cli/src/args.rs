use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use molion::{IonMass, Slice};

#[derive(Debug, Parser)]
#[command(
    name = "molion",
    version,
    about = "Molecular-ion formation rates and kinetics in a BEC"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Capture-rate breakdown for one level.
    Rates,
    /// Capture rate over a log grid in ξ, plus the refined maximum.
    Sweep,
    /// The top level and the vibrational levels below it.
    Ladder,
    /// Time evolution of the level population.
    Evolve,
    /// Thermal-equilibrium population of the level.
    Equilibrium,
    /// Laser-stimulated transfer into the level.
    Stimulated,
    /// Closed forms against brute-force numerics.
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SliceArg {
    Density,
    Size,
}

impl From<SliceArg> for Slice {
    fn from(s: SliceArg) -> Slice {
        match s {
            SliceArg::Density => Slice::Density,
            SliceArg::Size => Slice::Size,
        }
    }
}

/// `infinite`, `equal`, or an ion mass in amu.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(try_from = "MassModeValue")]
pub struct MassMode(pub IonMass);

#[derive(Deserialize)]
#[serde(untagged)]
enum MassModeValue {
    Amu(f64),
    Text(String),
}

impl TryFrom<MassModeValue> for MassMode {
    type Error = String;

    fn try_from(v: MassModeValue) -> Result<Self, String> {
        match v {
            MassModeValue::Amu(m) => MassMode::from_str(&m.to_string()),
            MassModeValue::Text(s) => MassMode::from_str(&s),
        }
    }
}

impl FromStr for MassMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "infinite" => Ok(MassMode(IonMass::Infinite)),
            "equal" => Ok(MassMode(IonMass::Equal)),
            other => match other.parse::<f64>() {
                Ok(m) if m.is_finite() && m > 0.0 => Ok(MassMode(IonMass::Explicit(m))),
                _ => Err(format!(
                    "expected `infinite`, `equal` or a positive mass in amu, got `{other}`"
                )),
            },
        }
    }
}

/// Every input flag. The config file uses the same names as keys; a flag
/// given on the command line wins over the file, which wins over defaults.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Flags {
    /// Builtin species name or path to a species JSON file.
    #[arg(long, global = true)]
    pub species: Option<String>,
    /// Condensate density, cm⁻³.
    #[arg(long, global = true)]
    pub density: Option<f64>,
    /// Temperature, nK.
    #[arg(long, global = true)]
    pub temp: Option<f64>,
    /// Level size a_v, bohr. Defaults to the atom-ion scattering length.
    #[arg(long, global = true)]
    pub av: Option<f64>,
    /// Reduced-mass convention: infinite, equal, or ion mass in amu.
    #[arg(long, global = true, value_name = "infinite|equal|M_amu")]
    pub mass_mode: Option<MassMode>,
    #[arg(long, global = true)]
    pub xi_min: Option<f64>,
    #[arg(long, global = true)]
    pub xi_max: Option<f64>,
    /// Grid points in the sweep.
    #[arg(long, global = true)]
    pub points: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub slice: Option<SliceArg>,
    /// Evolution time, s.
    #[arg(long, global = true)]
    pub tmax: Option<f64>,
    /// Two-photon Rabi frequency, s⁻¹.
    #[arg(long, global = true)]
    pub rabi: Option<f64>,
    /// Pulse length, s.
    #[arg(long, global = true)]
    pub tau: Option<f64>,
    /// Atoms in the condensate, for the depletion check.
    #[arg(long, global = true)]
    pub atoms: Option<f64>,
    /// Levels listed by `ladder`, top included.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// JSON file with default values for any of these flags.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Write data here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl Flags {
    /// Fills every unset field from `file`.
    pub fn or(self, file: Flags) -> Flags {
        Flags {
            species: self.species.or(file.species),
            density: self.density.or(file.density),
            temp: self.temp.or(file.temp),
            av: self.av.or(file.av),
            mass_mode: self.mass_mode.or(file.mass_mode),
            xi_min: self.xi_min.or(file.xi_min),
            xi_max: self.xi_max.or(file.xi_max),
            points: self.points.or(file.points),
            slice: self.slice.or(file.slice),
            tmax: self.tmax.or(file.tmax),
            rabi: self.rabi.or(file.rabi),
            tau: self.tau.or(file.tau),
            atoms: self.atoms.or(file.atoms),
            depth: self.depth.or(file.depth),
            format: self.format.or(file.format),
            config: self.config,
            out: self.out.or(file.out),
        }
    }
}

pub const DEFAULT_SPECIES: &str = "Na";
pub const DEFAULT_DENSITY_CM3: f64 = 1e14;
pub const DEFAULT_TEMP_NK: f64 = 0.0;
pub const DEFAULT_XI_MIN: f64 = 1e-3;
pub const DEFAULT_XI_MAX: f64 = 1e3;
pub const DEFAULT_POINTS: usize = 61;
pub const DEFAULT_TMAX_S: f64 = 1.0;
pub const DEFAULT_ATOMS: f64 = 1e6;
pub const DEFAULT_DEPTH: usize = 5;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mass_mode_parsing() {
        assert_eq!("infinite".parse::<MassMode>().unwrap().0, IonMass::Infinite);
        assert_eq!("equal".parse::<MassMode>().unwrap().0, IonMass::Equal);
        assert_eq!("23".parse::<MassMode>().unwrap().0, IonMass::Explicit(23.0));
        assert!("-1".parse::<MassMode>().is_err());
        assert!("heavy".parse::<MassMode>().is_err());
        let m: MassMode = serde_json::from_str("87.5").unwrap();
        assert_eq!(m.0, IonMass::Explicit(87.5));
    }

    #[test]
    fn flags_win_over_file() {
        let cli = Flags {
            density: Some(2e14),
            ..Flags::default()
        };
        let file: Flags = serde_json::from_str(r#"{"density": 1e13, "temp": 50, "mass-mode": "equal"}"#).unwrap();
        let merged = cli.or(file);
        assert_eq!(merged.density, Some(2e14));
        assert_eq!(merged.temp, Some(50.0));
        assert_eq!(merged.mass_mode.map(|m| m.0), Some(IonMass::Equal));
    }

    #[test]
    fn unknown_config_keys_rejected() {
        assert!(serde_json::from_str::<Flags>(r#"{"densty": 1e13}"#).is_err());
        assert!(serde_json::from_str::<Flags>(r#"{"config": "x.json"}"#).is_err());
    }
}
