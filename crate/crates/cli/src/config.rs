//! Effective run configuration: command-line flags over an optional TOML file
//! over built-in defaults.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use resonance_core::{Orientation, RealVec3};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

pub const DEFAULT_EXCITED: &str = "RB87_5P12";
pub const DEFAULT_GROUND: &str = "K40_GS";
pub const DEFAULT_XMIN: f64 = 0.5;
pub const DEFAULT_XMAX: f64 = 20.0;
pub const DEFAULT_SAMPLES: usize = 400;
pub const DEFAULT_X: f64 = 1.28;
pub const DEFAULT_NTHETA: usize = 181;
pub const DEFAULT_QUAD_ORDER: usize = 64;
pub const DEFAULT_SEED: u64 = 20_240_611;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrientationArg {
    Fixed,
    Isotropic,
}

impl From<OrientationArg> for Orientation {
    fn from(o: OrientationArg) -> Self {
        match o {
            OrientationArg::Fixed => Orientation::Fixed,
            OrientationArg::Isotropic => Orientation::Isotropic,
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonFlags {
    /// TOML file with default values for any of the flags below
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Species JSON file (the bundled D1 data if omitted)
    #[arg(long, global = true, value_name = "PATH")]
    pub species_file: Option<PathBuf>,
    /// Label of the excited atom A
    #[arg(long, global = true, value_name = "LABEL")]
    pub excited: Option<String>,
    /// Label of the ground-state atom B
    #[arg(long, global = true, value_name = "LABEL")]
    pub ground: Option<String>,
    /// Dipole treatment in tensor contractions
    #[arg(long, global = true, value_enum)]
    pub orientation: Option<OrientationArg>,
    /// Common dipole direction for both atoms (species file axes if omitted)
    #[arg(long, global = true, value_name = "X,Y,Z", value_parser = parse_vector)]
    pub dipole_axis: Option<RealVec3>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file (stdout if omitted)
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

/// Command-specific flags; `None` falls through to the config file.
#[derive(Debug, Clone, Default)]
pub struct CommandFlags {
    pub xmin: Option<f64>,
    pub xmax: Option<f64>,
    pub samples: Option<usize>,
    pub x: Option<f64>,
    pub ntheta: Option<usize>,
    pub quad_order: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    species_file: Option<PathBuf>,
    excited: Option<String>,
    ground: Option<String>,
    orientation: Option<OrientationArg>,
    dipole_axis: Option<[f64; 3]>,
    format: Option<Format>,
    out: Option<PathBuf>,
    xmin: Option<f64>,
    xmax: Option<f64>,
    samples: Option<usize>,
    x: Option<f64>,
    ntheta: Option<usize>,
    quad_order: Option<usize>,
    seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub species_file: Option<PathBuf>,
    pub excited: String,
    pub ground: String,
    pub orientation: Orientation,
    pub dipole_axis: Option<RealVec3>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub xmin: f64,
    pub xmax: f64,
    pub samples: usize,
    pub x: f64,
    pub ntheta: usize,
    pub quad_order: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            species_file: None,
            excited: DEFAULT_EXCITED.into(),
            ground: DEFAULT_GROUND.into(),
            orientation: Orientation::Fixed,
            dipole_axis: None,
            format: Format::Csv,
            out: None,
            xmin: DEFAULT_XMIN,
            xmax: DEFAULT_XMAX,
            samples: DEFAULT_SAMPLES,
            x: DEFAULT_X,
            ntheta: DEFAULT_NTHETA,
            quad_order: DEFAULT_QUAD_ORDER,
            seed: DEFAULT_SEED,
        }
    }
}

impl RunConfig {
    pub fn resolve(common: &CommonFlags, command: &CommandFlags) -> CliResult<Self> {
        let file = match &common.config {
            Some(path) => read_config(path)?,
            None => FileConfig::default(),
        };
        let d = Self::default();
        let dipole_axis = match (common.dipole_axis, file.dipole_axis) {
            (Some(v), _) => Some(v),
            (None, Some(a)) => Some(RealVec3::from_array(a)),
            (None, None) => None,
        };
        let config = Self {
            species_file: common.species_file.clone().or(file.species_file),
            excited: common.excited.clone().or(file.excited).unwrap_or(d.excited),
            ground: common.ground.clone().or(file.ground).unwrap_or(d.ground),
            orientation: common
                .orientation
                .or(file.orientation)
                .map(Orientation::from)
                .unwrap_or(d.orientation),
            dipole_axis,
            format: common.format.or(file.format).unwrap_or(d.format),
            out: common.out.clone().or(file.out),
            xmin: command.xmin.or(file.xmin).unwrap_or(d.xmin),
            xmax: command.xmax.or(file.xmax).unwrap_or(d.xmax),
            samples: command.samples.or(file.samples).unwrap_or(d.samples),
            x: command.x.or(file.x).unwrap_or(d.x),
            ntheta: command.ntheta.or(file.ntheta).unwrap_or(d.ntheta),
            quad_order: command
                .quad_order
                .or(file.quad_order)
                .unwrap_or(d.quad_order),
            seed: command.seed.or(file.seed).unwrap_or(d.seed),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> CliResult<()> {
        if let Some(axis) = self.dipole_axis {
            if !(axis.is_finite() && axis.norm() > 0.0) {
                return Err(CliError::Config(
                    "--dipole-axis must be a non-zero finite vector".into(),
                ));
            }
        }
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::Config(format!(
                    "--{name} must be positive and finite, got {v}"
                )))
            }
        };
        positive("xmin", self.xmin)?;
        positive("xmax", self.xmax)?;
        positive("x", self.x)?;
        if self.xmax <= self.xmin {
            return Err(CliError::Config(format!(
                "--xmax ({}) must exceed --xmin ({})",
                self.xmax, self.xmin
            )));
        }
        if self.samples < 2 {
            return Err(CliError::Config("--samples must be at least 2".into()));
        }
        if self.ntheta < 3 {
            return Err(CliError::Config("--ntheta must be at least 3".into()));
        }
        if self.quad_order < 2 {
            return Err(CliError::Config("--quad-order must be at least 2".into()));
        }
        Ok(())
    }
}

fn read_config(path: &Path) -> CliResult<FileConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn parse_vector(s: &str) -> Result<RealVec3, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got {s:?}"));
    }
    let mut v = [0.0; 3];
    for (slot, part) in v.iter_mut().zip(&parts) {
        *slot = part
            .parse::<f64>()
            .map_err(|e| format!("invalid component {part:?}: {e}"))?;
    }
    Ok(RealVec3::from_array(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn vector_parsing() {
        assert_eq!(parse_vector("0, 0,1").unwrap(), RealVec3::Z);
        assert!(parse_vector("1,2").is_err());
        assert!(parse_vector("a,b,c").is_err());
    }

    #[test]
    fn flags_override_file_over_defaults() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(
            file,
            "xmin = 1.0\nxmax = 3.0\nsamples = 7\norientation = \"isotropic\""
        )
        .unwrap();
        let common = CommonFlags {
            config: Some(file.path().to_path_buf()),
            ..Default::default()
        };
        let command = CommandFlags {
            samples: Some(11),
            ..Default::default()
        };
        let c = RunConfig::resolve(&common, &command).unwrap();
        assert_eq!((c.xmin, c.xmax, c.samples), (1.0, 3.0, 11));
        assert_eq!(c.orientation, Orientation::Isotropic);
        assert_eq!(c.x, DEFAULT_X);
        assert_eq!(c.excited, DEFAULT_EXCITED);
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "x_min = 1.0").unwrap();
        let common = CommonFlags {
            config: Some(file.path().to_path_buf()),
            ..Default::default()
        };
        let err = RunConfig::resolve(&common, &CommandFlags::default()).unwrap_err();
        assert_eq!(err.exit_code(), crate::error::EXIT_CONFIG);
    }

    #[test]
    fn invalid_grid_is_rejected() {
        let command = CommandFlags {
            xmin: Some(2.0),
            xmax: Some(1.0),
            ..Default::default()
        };
        assert!(RunConfig::resolve(&CommonFlags::default(), &command).is_err());
    }
}
