//! Resonant van der Waals interaction between two dissimilar two-level atoms,
//! one of them excited.
//!
//! The crate computes the net (non-reciprocal) resonant force on the pair, the
//! momentum it deposits in the electromagnetic vacuum, the resulting
//! directionality of spontaneous emission, and the one-photon emission
//! probability channels whose interference terms cancel by the optical
//! theorem. A brute-force plane-wave mode sum in a quantization box is provided
//! in [`oracle`] as an independent check of the closed forms.
//!
//! Conventions: `r_vec = R_A - R_B` points from the ground-state atom B to the
//! excited atom A. The free-space dyadic Green's function carries the overall
//! prefactor `-k e^{ikR} / 4π`, which makes `Im G(r→0) = -(k/6π) I`.

pub mod atoms;
pub mod dynamics;
pub mod emission;
mod error;
pub mod oracle;
pub mod tensors;

pub use atoms::{
    dipole_from_linewidth, linewidth_from_dipole, load_species, make_pair, make_pair_with_floor,
    AtomPair, AtomSpecies, Orientation, PhysicalConstants, SpeciesRegistry, CONSTANTS,
    DEFAULT_DETUNING_FLOOR,
};
pub use dynamics::{directionality, force_kernel, resonant_force, scan_separation, ForceResult};
pub use emission::{
    budget, dpdomega, emitted_momentum, p_free_space, p_interference_de, p_interference_fg,
    p_rescatter_c, p_scatter_b, sphere_quadrature, EmissionDistribution, ProbabilityBudget,
    SphereRule,
};
pub use error::{Error, Result};
pub use tensors::{ComplexMat3, RealVec3};
