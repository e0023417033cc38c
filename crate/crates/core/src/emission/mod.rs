//! One-photon emission channels in the quasiresonant approximation.
//!
//! With A excited and B in its ground state the one-photon probability splits
//! into free emission by A (a), scattering off B (b), rescattering off A (c)
//! and two interference pairs: (d,e) between (a) and (c), and (f,g) between (a)
//! and (b). At leading order in `Γ/Δ_AB` the two interference totals cancel
//! exactly, while their angular distributions do not: (f,g) is asymmetric
//! along `R`, which is where the vacuum momentum goes.
//!
//! All closed forms are evaluated through the scaled Green's tensor
//! `g = 4π G / k` and the coupling rates `η = k_A³ |μ|² / (ε₀ ħ)`.

mod quadrature;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

pub use quadrature::{gauss_legendre, sphere_quadrature, SphereNode, SphereRule};

use crate::atoms::{coupling_rate, AtomPair, AtomSpecies, CONSTANTS};
use crate::tensors::{imgreen_origin_limit, scaled_green, ComplexMat3, RealVec3};
use crate::Result;

/// Default number of Gauss–Legendre nodes in `cos θ` (twice as many in `φ`).
pub const DEFAULT_QUADRATURE_ORDER: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbabilityBudget {
    pub p_a: f64,
    pub p_b: f64,
    pub p_c: f64,
    pub p_de: f64,
    pub p_fg: f64,
    /// `p_de + p_fg`.
    pub residual_theorem: f64,
    /// `max(p_b, p_c) / |p_fg|`.
    pub order_check: f64,
}

/// Free-space emission probability of `species`,
/// `-2 k² / (ε₀ ħ Γ) μ^i μ^j Im G_ij(r→0)`.
pub fn p_free_space(species: &AtomSpecies) -> f64 {
    let im_g0 = imgreen_origin_limit(species.k).expect("species wavenumber is positive");
    let contraction = im_g0.bilinear(species.mu, species.mu).re;
    -2.0 * species.k * species.k / (CONSTANTS.epsilon0 * CONSTANTS.hbar * species.gamma)
        * contraction
}

/// `(η_A, η_B)` both evaluated at `k_A`.
fn coupling_rates(pair: &AtomPair) -> (f64, f64) {
    let (a_sq, b_sq) = pair.dipoles().magnitudes_sq();
    let ka = pair.k_a();
    (coupling_rate(ka, a_sq), coupling_rate(ka, b_sq))
}

fn green_at_a(pair: &AtomPair) -> ComplexMat3 {
    scaled_green(pair.scaled_separation(), pair.axis())
}

/// `C(Im g, Re g)` with unit dipoles.
fn im_re_contraction(pair: &AtomPair) -> f64 {
    let g = green_at_a(pair);
    pair.dipoles().unit().contract(&g.im(), &g.re()).re
}

fn interference_prefactor(pair: &AtomPair) -> f64 {
    let (eta_a, eta_b) = coupling_rates(pair);
    eta_a * eta_b / (4.0 * PI * PI * pair.excited.gamma * pair.detuning())
}

/// Interference of free emission with rescattering off A,
/// `4 k_A⁴ / (ε₀² ħ² Γ_A Δ_AB) μ_A Im G μ_B · μ_B Re G μ_A`.
pub fn p_interference_de(pair: &AtomPair) -> f64 {
    interference_prefactor(pair) * im_re_contraction(pair)
}

/// Interference of free emission with scattering off B; the exact negative of
/// [`p_interference_de`].
pub fn p_interference_fg(pair: &AtomPair) -> f64 {
    -interference_prefactor(pair) * im_re_contraction(pair)
}

/// Total probability of scattering off B.
pub fn p_scatter_b(pair: &AtomPair) -> f64 {
    let dipoles = pair.dipoles();
    let unit = dipoles.unit();
    let (a_sq, b_sq) = dipoles.magnitudes_sq();
    let (ka, kb) = (pair.k_a(), pair.ground.k);
    let r = pair.separation();
    let axis = pair.axis();
    let delta = pair.detuning();

    let g_a = scaled_green(ka * r, axis);
    let g_b = scaled_green(kb * r, axis);
    // (|μ_B|²/|μ_A|²) k_A⁴ |μ_A|²|μ_B|² (k_A/4π)² = η_B(k_A)² / (16π²) ε₀²ħ²
    let first = coupling_rate(ka, b_sq).powi(2) * unit.contract(&g_a, &g_a.conj()).re;
    let second =
        coupling_rate(kb, a_sq) * coupling_rate(kb, b_sq) * unit.contract(&g_b, &g_b.conj()).re;
    (first + second) / (16.0 * PI * PI * delta * delta)
}

/// Total probability of rescattering off A.
pub fn p_rescatter_c(pair: &AtomPair) -> f64 {
    let (eta_a, eta_b) = coupling_rates(pair);
    let g = green_at_a(pair);
    let bracket = eta_a * eta_b * pair.dipoles().unit().contract(&g, &g.conj()).re
        / (16.0 * PI * PI * pair.excited.gamma * pair.detuning());
    2.0 * bracket * bracket
}

/// Asymptotic (f,g) emission probability per unit solid angle along the unit
/// vector `khat`, in 1/sr.
pub fn dpdomega(pair: &AtomPair, khat: RealVec3) -> Result<f64> {
    let khat = khat.unit_checked()?;
    Ok(dpdomega_unchecked(pair, &green_at_a(pair), khat))
}

fn dpdomega_unchecked(pair: &AtomPair, g: &ComplexMat3, khat: RealVec3) -> f64 {
    let (eta_a, eta_b) = coupling_rates(pair);
    let prefactor = eta_a * eta_b / (16.0 * PI.powi(3) * pair.excited.gamma * pair.detuning());
    let transverse = ComplexMat3::identity() - ComplexMat3::outer(khat, khat);
    let phase = Complex64::from_polar(1.0, pair.scaled_separation() * khat.dot(pair.axis()));
    prefactor * (phase * pair.dipoles().unit().contract(&transverse, g)).re
}

/// Sampled `dP/dΩ` over the sphere and the photon momentum it carries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmissionDistribution {
    pub nodes: Vec<SphereNode>,
    /// `dP/dΩ` at each node, 1/sr.
    pub values: Vec<f64>,
    /// `∮ ħ k_A k̂ dP/dΩ dΩ`, kg·m/s.
    pub total_momentum: RealVec3,
}

impl EmissionDistribution {
    /// `∮ dP/dΩ dΩ`.
    pub fn total_probability(&self) -> f64 {
        self.nodes
            .iter()
            .zip(&self.values)
            .map(|(n, v)| n.weight * v)
            .sum()
    }
}

/// Product rule with its pole on the pair axis and `φ = 0` towards lab `ẑ`.
pub fn pair_rule(pair: &AtomPair, order: usize) -> Result<SphereRule> {
    SphereRule::new(order, 2 * order, pair.axis(), RealVec3::Z)
}

/// Evaluates `dP/dΩ` on a `order × 2·order` rule aligned with the pair axis.
pub fn emitted_momentum(pair: &AtomPair, order: usize) -> Result<EmissionDistribution> {
    let rule = pair_rule(pair, order)?;
    let g = green_at_a(pair);
    let values: Vec<f64> = rule
        .nodes
        .iter()
        .map(|n| dpdomega_unchecked(pair, &g, n.direction))
        .collect();
    let photon_momentum = CONSTANTS.hbar * pair.k_a();
    let mut total = RealVec3::ZERO;
    for (n, v) in rule.nodes.iter().zip(&values) {
        total += n.direction * (n.weight * v * photon_momentum);
    }
    Ok(EmissionDistribution {
        nodes: rule.nodes,
        values,
        total_momentum: total,
    })
}

/// `∮ dP/dΩ dΩ` on the pair-aligned rule.
pub fn sphere_integral(pair: &AtomPair, order: usize) -> Result<f64> {
    let rule = pair_rule(pair, order)?;
    let g = green_at_a(pair);
    Ok(rule.integrate(|k| dpdomega_unchecked(pair, &g, k)))
}

/// `dP/dΩ(θ = 0) - dP/dΩ(θ = π)`, forward being along `R_A - R_B`.
pub fn forward_backward(pair: &AtomPair) -> f64 {
    let g = green_at_a(pair);
    let axis = pair.axis();
    dpdomega_unchecked(pair, &g, axis) - dpdomega_unchecked(pair, &g, -axis)
}

/// All five channels.
pub fn budget(pair: &AtomPair) -> ProbabilityBudget {
    let p_de = p_interference_de(pair);
    let p_fg = p_interference_fg(pair);
    let p_b = p_scatter_b(pair);
    let p_c = p_rescatter_c(pair);
    ProbabilityBudget {
        p_a: p_free_space(&pair.excited),
        p_b,
        p_c,
        p_de,
        p_fg,
        residual_theorem: p_de + p_fg,
        order_check: p_b.max(p_c) / p_fg.abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atoms::{make_pair, SpeciesRegistry};
    use approx::assert_relative_eq;

    fn rb_k(x: f64) -> AtomPair {
        let reg = SpeciesRegistry::bundled();
        let rb = reg.get("RB87_5P12").unwrap();
        let k = reg.get("K40_GS").unwrap();
        make_pair(rb, k, x / rb.k, RealVec3::X).unwrap()
    }

    #[test]
    fn free_space_normalization() {
        let rb = SpeciesRegistry::bundled().get("RB87_5P12").unwrap().clone();
        assert!((p_free_space(&rb) - 1.0).abs() < 1e-10);
        assert_relative_eq!(
            p_free_space(&rb.with_scaled_dipole(2.0)),
            4.0,
            max_relative = 1e-10
        );
        let tilted = rb.with_dipole_axis(RealVec3::new(1.0, -1.0, 0.3)).unwrap();
        assert!((p_free_space(&tilted) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn interference_channels_cancel() {
        for x in [0.6, 1.28, 7.5] {
            let pair = rb_k(x);
            let de = p_interference_de(&pair);
            let fg = p_interference_fg(&pair);
            assert!(de != 0.0);
            assert!((de + fg).abs() <= 1e-12 * de.abs());
        }
    }

    #[test]
    fn interference_decays_with_separation() {
        let near = p_interference_de(&rb_k(1.28)).abs();
        let far = p_interference_de(&rb_k(1e4)).abs();
        assert!(far < 1e-7 * near, "{far} vs {near}");
    }

    #[test]
    fn interference_sign_follows_detuning() {
        let pair = rb_k(1.28);
        let swapped =
            make_pair(&pair.ground, &pair.excited, pair.separation(), RealVec3::X).unwrap();
        assert!(p_interference_de(&pair).signum() != p_interference_de(&swapped).signum());
    }

    #[test]
    fn interference_scales_inversely_with_detuning() {
        let pair = rb_k(1.28);
        let omega_b = pair.ground.omega;
        let delta = pair.detuning();
        // Move ω_B to double |Δ| keeping |μ_B| fixed, then compare the product.
        let mut far = pair.clone();
        far.ground.omega = omega_b + delta.abs();
        far.ground.k = far.ground.omega / CONSTANTS.c;
        let ratio = p_interference_fg(&far) / p_interference_fg(&pair);
        assert_relative_eq!(ratio, delta / far.detuning(), max_relative = 1e-12);
    }

    #[test]
    fn scattering_channels_are_suppressed() {
        let pair = rb_k(1.28);
        let b = budget(&pair);
        assert!(b.p_b > 0.0 && b.p_c > 0.0);
        assert!(b.p_b / b.p_fg.abs() < 1e-5, "{}", b.p_b / b.p_fg.abs());
        assert!(b.p_c / b.p_fg.abs() < 1e-4, "{}", b.p_c / b.p_fg.abs());
        assert!(p_scatter_b(&rb_k(1e4)) < 1e-6 * b.p_b);
    }

    #[test]
    fn rescattering_scales_as_inverse_detuning_squared() {
        let pair = rb_k(2.0);
        let mut far = pair.clone();
        far.ground.omega = pair.ground.omega + 2.0 * pair.detuning().abs();
        let ratio = p_rescatter_c(&far) / p_rescatter_c(&pair);
        assert_relative_eq!(
            ratio,
            (pair.detuning() / far.detuning()).powi(2),
            max_relative = 1e-12
        );
    }

    #[test]
    fn parallel_dipoles_along_khat_emit_nothing() {
        let pair = rb_k(1.28);
        assert!(dpdomega(&pair, RealVec3::Z).unwrap().abs() < 1e-30);
        assert!(dpdomega(&pair, RealVec3::new(1.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn sphere_integral_reproduces_fg_channel() {
        let pair = rb_k(1.28);
        let integral = sphere_integral(&pair, 64).unwrap();
        assert_relative_eq!(integral, p_interference_fg(&pair), max_relative = 1e-10);
    }

    #[test]
    fn far_field_angular_law() {
        // Dipoles along ẑ, k̂ in the xy plane: dP/dΩ → -K cos[x (cos θ + 1)] / x.
        let pair = rb_k(400.0);
        let x = pair.scaled_separation();
        let (eta_a, eta_b) = coupling_rates(&pair);
        let k = eta_a * eta_b / (16.0 * PI.powi(3) * pair.excited.gamma * pair.detuning());
        for theta in [0.0, 0.4, 1.0, 2.2, 3.0] {
            let khat = RealVec3::new(f64::cos(theta), f64::sin(theta), 0.0);
            let law = -k * (x * (theta.cos() + 1.0)).cos() / x;
            let value = dpdomega(&pair, khat).unwrap();
            assert!((value - law).abs() < 2.0 * k.abs() / (x * x), "θ = {theta}");
        }
    }

    #[test]
    fn isotropic_mode_cancels_too() {
        let pair = rb_k(1.28).with_orientation(crate::Orientation::Isotropic);
        let b = budget(&pair);
        assert!(b.residual_theorem.abs() <= 1e-12 * b.p_de.abs());
        assert_relative_eq!(
            sphere_integral(&pair, 64).unwrap(),
            b.p_fg,
            max_relative = 1e-10
        );
    }
}
