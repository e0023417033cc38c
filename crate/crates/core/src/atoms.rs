//! Two-level atomic species, the bundled line data and pair construction.
//!
//! The dipole magnitude of a species is never read from data: it is derived
//! from the transition frequency and the free-space linewidth through
//! `Γ = ω³ |μ|² / (3π ε₀ ħ c³)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::tensors::{DipolePair, RealVec3};
use crate::{Error, Result};

/// Fixed physical constants (CODATA 2018, SI).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub h: f64,
    pub c: f64,
    pub epsilon0: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    hbar: 6.626_070_15e-34 / (2.0 * PI),
    h: 6.626_070_15e-34,
    c: 299_792_458.0,
    epsilon0: 8.854_187_812_8e-12,
};

/// Default minimum `|Δ_AB|` in units of the larger linewidth.
pub const DEFAULT_DETUNING_FLOOR: f64 = 100.0;

/// Maximum tolerated relative linewidth/dipole consistency residual.
pub const CONSISTENCY_LIMIT: f64 = 1e-6;

/// The bundled D1-line data for ⁸⁷Rb and ⁴⁰K.
pub const BUNDLED_SPECIES_JSON: &str = include_str!("../species/alkali_d1.json");

/// Name reported for the bundled data file.
pub const BUNDLED_SPECIES_NAME: &str = "species/alkali_d1.json";

/// `|μ| = sqrt(3π ε₀ ħ c³ γ / ω³)`.
pub fn dipole_from_linewidth(omega: f64, gamma: f64) -> Result<f64> {
    positive("omega", omega)?;
    positive("gamma", gamma)?;
    let PhysicalConstants {
        hbar, c, epsilon0, ..
    } = CONSTANTS;
    Ok((3.0 * PI * epsilon0 * hbar * gamma / (omega / c).powi(3)).sqrt())
}

/// Free-space linewidth `ω³ |μ|² / (3π ε₀ ħ c³)` of a dipole `mu` (C·m).
pub fn linewidth_from_dipole(omega: f64, mu: f64) -> f64 {
    let PhysicalConstants {
        hbar, c, epsilon0, ..
    } = CONSTANTS;
    (omega / c).powi(3) * mu * mu / (3.0 * PI * epsilon0 * hbar)
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}

/// A two-level atom.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomSpecies {
    pub label: String,
    /// Transition angular frequency, rad/s.
    pub omega: f64,
    /// Free-space linewidth, rad/s.
    pub gamma: f64,
    /// Transition dipole matrix element, C·m.
    pub mu: RealVec3,
    /// `ω/c`, 1/m.
    pub k: f64,
}

impl AtomSpecies {
    /// Builds a species from its line data; the dipole points along `axis`
    /// (normalized here) with magnitude fixed by the linewidth.
    pub fn from_linewidth(
        label: impl Into<String>,
        omega: f64,
        gamma: f64,
        axis: RealVec3,
    ) -> Result<Self> {
        let label = label.into();
        let magnitude = dipole_from_linewidth(omega, gamma)?;
        let axis = axis.normalized().ok_or_else(|| Error::Schema {
            label: label.clone(),
            field: "dipole_axis",
            reason: "must be a non-zero finite vector".into(),
        })?;
        let species = Self {
            label,
            omega,
            gamma,
            mu: axis * magnitude,
            k: omega / CONSTANTS.c,
        };
        let residual = species.consistency_residual();
        if residual.is_nan() || residual >= CONSISTENCY_LIMIT {
            return Err(Error::Consistency {
                label: species.label,
                residual,
                limit: CONSISTENCY_LIMIT,
            });
        }
        Ok(species)
    }

    /// `|γ - ω³|μ|²/(3πε₀ħc³)| / γ`.
    pub fn consistency_residual(&self) -> f64 {
        (self.gamma - linewidth_from_dipole(self.omega, self.mu.norm())).abs() / self.gamma
    }

    /// Vacuum wavelength, m.
    pub fn wavelength(&self) -> f64 {
        2.0 * PI / self.k
    }

    pub fn dipole_axis(&self) -> RealVec3 {
        self.mu.normalized().unwrap_or(RealVec3::Z)
    }

    /// Same line, dipole re-oriented along `axis`.
    pub fn with_dipole_axis(&self, axis: RealVec3) -> Result<Self> {
        Self::from_linewidth(self.label.clone(), self.omega, self.gamma, axis)
    }

    /// Same line with the linewidth replaced and the dipole re-derived.
    pub fn with_linewidth(&self, gamma: f64) -> Result<Self> {
        Self::from_linewidth(self.label.clone(), self.omega, gamma, self.dipole_axis())
    }

    /// Dipole multiplied by `factor` at fixed linewidth. The result violates
    /// the linewidth consistency identity unless `factor == 1`; it exists for
    /// sensitivity checks of the normalization.
    pub fn with_scaled_dipole(&self, factor: f64) -> Self {
        Self {
            mu: self.mu * factor,
            ..self.clone()
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpeciesRecord {
    label: String,
    #[serde(default)]
    wavelength_nm: Option<f64>,
    #[serde(default)]
    omega_rad_s: Option<f64>,
    gamma_rad_s: f64,
    #[serde(default)]
    dipole_axis: Option<[f64; 3]>,
    source: String,
}

impl SpeciesRecord {
    fn into_species(self) -> Result<AtomSpecies> {
        let schema = |field, reason: &str| Error::Schema {
            label: self.label.clone(),
            field,
            reason: reason.to_owned(),
        };
        if self.label.trim().is_empty() {
            return Err(schema("label", "must not be empty"));
        }
        if self.source.trim().is_empty() {
            return Err(schema("source", "must cite the origin of the line data"));
        }
        let omega = match (self.wavelength_nm, self.omega_rad_s) {
            (Some(_), Some(_)) => {
                return Err(schema(
                    "wavelength_nm",
                    "and `omega_rad_s` are mutually exclusive",
                ))
            }
            (None, None) => return Err(schema("wavelength_nm", "or `omega_rad_s` is required")),
            (Some(nm), None) => {
                if !(nm > 0.0 && nm.is_finite()) {
                    return Err(schema("wavelength_nm", "must be positive"));
                }
                2.0 * PI * CONSTANTS.c / (nm * 1e-9)
            }
            (None, Some(w)) => {
                if !(w > 0.0 && w.is_finite()) {
                    return Err(schema("omega_rad_s", "must be positive"));
                }
                w
            }
        };
        if !(self.gamma_rad_s > 0.0 && self.gamma_rad_s.is_finite()) {
            return Err(schema("gamma_rad_s", "must be positive"));
        }
        let axis = match self.dipole_axis {
            Some(v) => {
                let v = RealVec3::from_array(v);
                if v.normalized().is_none() || !v.is_finite() {
                    return Err(schema("dipole_axis", "must be a non-zero finite vector"));
                }
                v
            }
            None => RealVec3::Z,
        };
        AtomSpecies::from_linewidth(self.label, omega, self.gamma_rad_s, axis)
    }
}

/// Species keyed by label, immutable once loaded.
#[derive(Debug, Clone, Default)]
pub struct SpeciesRegistry {
    species: BTreeMap<String, AtomSpecies>,
}

impl SpeciesRegistry {
    pub fn from_json(text: &str) -> Result<Self> {
        let records: Vec<SpeciesRecord> = serde_json::from_str(text)?;
        let mut species = BTreeMap::new();
        for record in records {
            let s = record.into_species()?;
            if species.contains_key(&s.label) {
                return Err(Error::Schema {
                    label: s.label,
                    field: "label",
                    reason: "is duplicated".into(),
                });
            }
            species.insert(s.label.clone(), s);
        }
        Ok(Self { species })
    }

    pub fn bundled() -> Self {
        Self::from_json(BUNDLED_SPECIES_JSON).expect("bundled species data is valid")
    }

    pub fn get(&self, label: &str) -> Result<&AtomSpecies> {
        self.species
            .get(label)
            .ok_or_else(|| Error::UnknownSpecies(label.to_owned()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &AtomSpecies> {
        self.species.values()
    }

    pub fn len(&self) -> usize {
        self.species.len()
    }

    pub fn is_empty(&self) -> bool {
        self.species.is_empty()
    }
}

/// Reads a species file (see the crate README for the schema).
pub fn load_species(path: impl AsRef<Path>) -> Result<SpeciesRegistry> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    SpeciesRegistry::from_json(&text)
}

/// How the dipole products `μ^i μ^j` enter tensor contractions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Use each species' dipole vector as given.
    #[default]
    Fixed,
    /// Replace `μ^i μ^j` by `|μ|² δ_ij / 3`.
    Isotropic,
}

impl std::fmt::Display for Orientation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Orientation::Fixed => "fixed",
            Orientation::Isotropic => "isotropic",
        })
    }
}

/// Atom A (excited) and atom B (ground state) separated by `r_vec = R_A - R_B`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomPair {
    pub excited: AtomSpecies,
    pub ground: AtomSpecies,
    pub r_vec: RealVec3,
    pub orientation: Orientation,
    detuning_floor: f64,
}

/// Builds a pair with the default detuning floor.
pub fn make_pair(
    excited: &AtomSpecies,
    ground: &AtomSpecies,
    separation: f64,
    axis: RealVec3,
) -> Result<AtomPair> {
    make_pair_with_floor(excited, ground, separation, axis, DEFAULT_DETUNING_FLOOR)
}

/// Builds a pair requiring `|ω_A - ω_B| ≥ floor · max(Γ_A, Γ_B)`.
pub fn make_pair_with_floor(
    excited: &AtomSpecies,
    ground: &AtomSpecies,
    separation: f64,
    axis: RealVec3,
    floor: f64,
) -> Result<AtomPair> {
    if !(floor >= 0.0 && floor.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "detuning_floor",
            value: floor,
            reason: "must be non-negative",
        });
    }
    let axis = axis.unit_checked()?;
    if !(separation > 0.0 && separation.is_finite()) {
        return Err(Error::ZeroSeparation(separation));
    }
    let detuning = excited.omega - ground.omega;
    let min_detuning = floor * excited.gamma.max(ground.gamma);
    if detuning == 0.0 || detuning.abs() < min_detuning {
        return Err(Error::Indistinguishable {
            excited: excited.label.clone(),
            ground: ground.label.clone(),
            detuning: detuning.abs(),
            floor: min_detuning,
        });
    }
    Ok(AtomPair {
        excited: excited.clone(),
        ground: ground.clone(),
        r_vec: axis * separation,
        orientation: Orientation::Fixed,
        detuning_floor: floor,
    })
}

impl AtomPair {
    /// `|R|`, m.
    pub fn separation(&self) -> f64 {
        self.r_vec.norm()
    }

    /// Unit vector from B to A.
    pub fn axis(&self) -> RealVec3 {
        self.r_vec * (1.0 / self.separation())
    }

    /// `Δ_AB = ω_A - ω_B`, rad/s.
    pub fn detuning(&self) -> f64 {
        self.excited.omega - self.ground.omega
    }

    /// `k_A`, 1/m.
    pub fn k_a(&self) -> f64 {
        self.excited.k
    }

    /// `x = k_A R`.
    pub fn scaled_separation(&self) -> f64 {
        self.k_a() * self.separation()
    }

    pub fn detuning_floor(&self) -> f64 {
        self.detuning_floor
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    /// Same pair at `x = k_A R` along the same axis.
    pub fn at_scaled_separation(&self, x: f64) -> Result<Self> {
        self.with_geometry(x / self.k_a(), self.axis())
    }

    pub fn with_geometry(&self, separation: f64, axis: RealVec3) -> Result<Self> {
        let pair = make_pair_with_floor(
            &self.excited,
            &self.ground,
            separation,
            axis,
            self.detuning_floor,
        )?;
        Ok(pair.with_orientation(self.orientation))
    }

    /// Same pair with `r_vec → -r_vec`.
    pub fn reversed(&self) -> Self {
        Self {
            r_vec: -self.r_vec,
            ..self.clone()
        }
    }

    /// The dipole structure used in contractions, in C·m.
    pub fn dipoles(&self) -> DipolePair {
        match self.orientation {
            Orientation::Fixed => DipolePair::Oriented {
                a: self.excited.mu,
                b: self.ground.mu,
            },
            Orientation::Isotropic => DipolePair::Isotropic {
                a_sq: self.excited.mu.dot(self.excited.mu),
                b_sq: self.ground.mu.dot(self.ground.mu),
            },
        }
    }
}

/// Coupling strength `k³ |μ|² / (ε₀ ħ)` in rad/s; equals `3π Γ` for a
/// consistent species evaluated at its own wavenumber.
pub(crate) fn coupling_rate(k: f64, mu_sq: f64) -> f64 {
    k.powi(3) * mu_sq / (CONSTANTS.epsilon0 * CONSTANTS.hbar)
}
