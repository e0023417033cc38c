//! Net resonant force on the pair, the vacuum momentum it leaves behind and
//! the directionality of the eventual spontaneous emission.
//!
//! The total force at observation time `T` is
//!
//! ```text
//! F(T) = F₀ e^{-Γ_A T},
//! F₀   = U ∇_R [Im G_ij(R, ω_A) Im G_pq(R, ω_A)] / k_A³,
//! U    = 4 ω_B k_A⁷ μ_A^i μ_A^q μ_B^j μ_B^p / [ε₀² ħ (ω_A² - ω_B²)],
//! ```
//!
//! and the field carries away `P∞ = -F₀ / Γ_A`. Internally the force is
//! evaluated in units of `ħ k_A Γ_A` as a function of `x = k_A R`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::atoms::{coupling_rate, AtomPair, CONSTANTS};
use crate::tensors::{scaled_imim_gradient, RealVec3};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForceResult {
    /// `k_A R`.
    pub x: f64,
    /// Observation time `T`, s.
    pub time: f64,
    /// `⟨F_A + F_B⟩₀`, N.
    pub f0: RealVec3,
    /// `F₀ e^{-Γ_A T}`, N.
    pub force: RealVec3,
    /// `Γ_A`, rad/s.
    pub decay_rate: f64,
    /// `P∞ = -F₀ / Γ_A`, kg·m/s.
    pub p_inf: RealVec3,
    /// `D = (R̂ · P∞) c / h`, Hz.
    pub directionality: f64,
}

impl ForceResult {
    /// `2π D / Γ_A`.
    pub fn directionality_ratio(&self) -> f64 {
        2.0 * PI * self.directionality / self.decay_rate
    }
}

/// Scalar part of `U^{ijpq}`: `4 ω_B k_A⁷ / [ε₀² ħ (ω_A² - ω_B²)]`.
pub fn force_kernel(pair: &AtomPair) -> f64 {
    let (wa, wb) = (pair.excited.omega, pair.ground.omega);
    let eps2 = CONSTANTS.epsilon0 * CONSTANTS.epsilon0;
    4.0 * wb * pair.k_a().powi(7) / (eps2 * CONSTANTS.hbar * (wa - wb) * (wa + wb))
}

/// `F₀ / (ħ k_A Γ_A)`.
fn scaled_force(pair: &AtomPair) -> RealVec3 {
    let (wa, wb) = (pair.excited.omega, pair.ground.omega);
    let ka = pair.k_a();
    let (a_sq, b_sq) = pair.dipoles().magnitudes_sq();
    let eta_a = coupling_rate(ka, a_sq);
    let eta_b = coupling_rate(ka, b_sq);
    let gamma = pair.excited.gamma;
    let prefactor = wb * eta_a * eta_b / (4.0 * PI * PI * gamma * (wa - wb) * (wa + wb));
    let gradient = scaled_imim_gradient(
        pair.scaled_separation(),
        pair.axis(),
        &pair.dipoles().unit(),
    );
    gradient * prefactor
}

/// Total resonant force at time `t` (s) after the quasistationary regime sets in.
pub fn resonant_force(pair: &AtomPair, t: f64) -> Result<ForceResult> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "T",
            value: t,
            reason: "observation time must be non-negative",
        });
    }
    let gamma = pair.excited.gamma;
    let force_unit = CONSTANTS.hbar * pair.k_a() * gamma;
    let f0 = scaled_force(pair) * force_unit;
    let p_inf = f0 * (-1.0 / gamma);
    Ok(ForceResult {
        x: pair.scaled_separation(),
        time: t,
        f0,
        force: f0 * (-gamma * t).exp(),
        decay_rate: gamma,
        p_inf,
        directionality: pair.axis().dot(p_inf) * CONSTANTS.c / CONSTANTS.h,
    })
}

/// `D` in Hz.
pub fn directionality(pair: &AtomPair) -> Result<f64> {
    Ok(resonant_force(pair, 0.0)?.directionality)
}

/// `P∞` with the rotating-wave reduction `ω_A² - ω_B² → 2 ω_A Δ_AB` applied to
/// the kernel, i.e. the part carried by the quasiresonant one-photon channel.
pub fn vacuum_momentum_rotating_wave(pair: &AtomPair) -> Result<RealVec3> {
    let (wa, wb) = (pair.excited.omega, pair.ground.omega);
    let full = resonant_force(pair, 0.0)?.p_inf;
    Ok(full * ((wa + wb) / (2.0 * wa)))
}

/// Forces on a uniform grid of `x = k_A R` from `x_min` to `x_max` inclusive,
/// along `template`'s axis, at `T = 0`.
pub fn scan_separation(
    template: &AtomPair,
    x_min: f64,
    x_max: f64,
    samples: usize,
) -> Result<Vec<ForceResult>> {
    let grid = uniform_grid(x_min, x_max, samples)?;
    grid.par_iter()
        .map(|&x| resonant_force(&template.at_scaled_separation(x)?, 0.0))
        .collect()
}

/// `samples` points from `x_min` to `x_max` inclusive.
pub fn uniform_grid(x_min: f64, x_max: f64, samples: usize) -> Result<Vec<f64>> {
    if !(x_min > 0.0 && x_min.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "x_min",
            value: x_min,
            reason: "must be positive",
        });
    }
    if !(x_max > x_min && x_max.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "x_max",
            value: x_max,
            reason: "must exceed x_min",
        });
    }
    if samples < 2 {
        return Err(Error::InvalidParameter {
            name: "samples",
            value: samples as f64,
            reason: "at least two samples are required",
        });
    }
    let step = (x_max - x_min) / (samples - 1) as f64;
    Ok((0..samples)
        .map(|i| {
            if i == samples - 1 {
                x_max
            } else {
                x_min + i as f64 * step
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atoms::{make_pair, SpeciesRegistry};
    use crate::tensors::grad_imim_contraction_for;
    use approx::assert_relative_eq;

    fn rb_k(x: f64) -> AtomPair {
        let reg = SpeciesRegistry::bundled();
        let rb = reg.get("RB87_5P12").unwrap();
        let k = reg.get("K40_GS").unwrap();
        make_pair(rb, k, x / rb.k, RealVec3::X).unwrap()
    }

    #[test]
    fn scaled_path_matches_si_kernel_path() {
        for x in [0.7, 1.28, 4.0] {
            let pair = rb_k(x);
            let si = grad_imim_contraction_for(pair.k_a(), pair.r_vec, &pair.dipoles()).unwrap()
                * (force_kernel(&pair) / pair.k_a().powi(3));
            let f0 = resonant_force(&pair, 0.0).unwrap().f0;
            assert_relative_eq!(f0.x, si.x, max_relative = 1e-12);
        }
    }

    #[test]
    fn kernel_sign_and_swap() {
        let pair = rb_k(1.28);
        assert!(force_kernel(&pair) < 0.0);
        let swapped =
            make_pair(&pair.ground, &pair.excited, pair.separation(), RealVec3::X).unwrap();
        let (wa, wb) = (pair.excited.omega, pair.ground.omega);
        // Antisymmetric denominator; numerator ω_B → ω_A and k_A⁷ → k_B⁷.
        let expected = -force_kernel(&pair) * (wa / wb) * (wb / wa).powi(7);
        assert_relative_eq!(force_kernel(&swapped), expected, max_relative = 1e-12);
    }

    #[test]
    fn exponential_envelope() {
        let pair = rb_k(1.28);
        let r0 = resonant_force(&pair, 0.0).unwrap();
        let half = resonant_force(&pair, std::f64::consts::LN_2 / r0.decay_rate).unwrap();
        assert_relative_eq!(half.force.norm(), r0.f0.norm() / 2.0, max_relative = 1e-14);
        for t in [1e-9, 1e-8, 3e-8, 1e-7, 1e-6] {
            let r = resonant_force(&pair, t).unwrap();
            assert_relative_eq!(
                r.force.x,
                r0.f0.x * (-r0.decay_rate * t).exp(),
                max_relative = 1e-14
            );
            assert_eq!(r.f0, r0.f0);
        }
        assert!(resonant_force(&pair, -1.0).is_err());
    }

    #[test]
    fn vacuum_momentum_identity() {
        let r = resonant_force(&rb_k(2.2), 0.0).unwrap();
        assert_eq!(r.p_inf, r.f0 * (-1.0 / r.decay_rate));
    }

    #[test]
    fn reversal_flips_momentum_not_directionality() {
        // Swapping the atoms' positions flips P∞ in the lab frame; D is the
        // projection on R̂, which flips too, so D itself is unchanged.
        let pair = rb_k(1.28);
        let fwd = resonant_force(&pair, 0.0).unwrap();
        let rev = resonant_force(&pair.reversed(), 0.0).unwrap();
        assert_relative_eq!(fwd.p_inf.x, -rev.p_inf.x, max_relative = 1e-14);
        assert_relative_eq!(fwd.directionality, rev.directionality, max_relative = 1e-14);
        let lab = |r: &ForceResult| RealVec3::X.dot(r.p_inf);
        assert!(lab(&fwd).signum() == -lab(&rev).signum());
    }

    #[test]
    fn directionality_vanishes_with_force() {
        // Perpendicular dipoles: μ_A ⟂ μ_B with both ⟂ R̂ leaves Im G_AB ≡ 0.
        let pair = rb_k(1.5);
        let a = pair.excited.with_dipole_axis(RealVec3::Y).unwrap();
        let b = pair.ground.with_dipole_axis(RealVec3::Z).unwrap();
        let pair = make_pair(&a, &b, pair.separation(), RealVec3::X).unwrap();
        let r = resonant_force(&pair, 0.0).unwrap();
        assert_eq!(r.f0.norm(), 0.0);
        assert_eq!(r.directionality, 0.0);
    }

    #[test]
    fn far_separation_decay() {
        let scan = scan_separation(&rb_k(1.0), 0.5, 200.0, 2000).unwrap();
        let peak = |lo: f64, hi: f64| {
            scan.iter()
                .filter(|r| r.x >= lo && r.x < hi)
                .map(|r| r.f0.norm())
                .fold(0.0, f64::max)
        };
        assert!(peak(10.0, 20.0) < peak(0.5, 10.0));
        assert!(peak(50.0, 100.0) < peak(10.0, 20.0));
        assert!(peak(100.0, 200.0) < peak(50.0, 100.0));
    }

    #[test]
    fn grid_edges() {
        let two = scan_separation(&rb_k(1.0), 0.5, 20.0, 2).unwrap();
        assert_eq!(two.len(), 2);
        assert_relative_eq!(two[0].x, 0.5, max_relative = 1e-15);
        assert_relative_eq!(two[1].x, 20.0, max_relative = 1e-15);
        assert!(scan_separation(&rb_k(1.0), 0.5, 20.0, 1).is_err());
        assert!(scan_separation(&rb_k(1.0), 2.0, 1.0, 10).is_err());
        assert!(scan_separation(&rb_k(1.0), 0.0, 1.0, 10).is_err());
    }

    #[test]
    fn scan_splits_pointwise() {
        let template = rb_k(1.0);
        let full = scan_separation(&template, 1.0, 3.0, 21).unwrap();
        let lo = scan_separation(&template, 1.0, 2.0, 11).unwrap();
        let hi = scan_separation(&template, 2.1, 3.0, 10).unwrap();
        let joined: Vec<_> = lo.into_iter().chain(hi).collect();
        assert_eq!(full.len(), joined.len());
        for (a, b) in full.iter().zip(&joined) {
            assert_relative_eq!(a.x, b.x, max_relative = 1e-14);
            assert_relative_eq!(a.f0.x, b.f0.x, max_relative = 1e-12);
        }
    }

    #[test]
    fn rotating_wave_reduction_factor() {
        let pair = rb_k(1.28);
        let full = resonant_force(&pair, 0.0).unwrap().p_inf;
        let rw = vacuum_momentum_rotating_wave(&pair).unwrap();
        let (wa, wb) = (pair.excited.omega, pair.ground.omega);
        assert_relative_eq!(rw.x / full.x, (wa + wb) / (2.0 * wa), max_relative = 1e-14);
    }
}
