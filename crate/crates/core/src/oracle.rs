//! Brute-force cross-checks: single-mode emission amplitudes in a periodic
//! quantization box, summed over the plane-wave modes of a finite lattice.
//!
//! The excited atom is switched on at `t = 0` and observed at `T`. The
//! first-order amplitude of emitting into mode `(k, ε)` is
//!
//! ```text
//! c₁ = g (μ_A·ε) e^{-ik·R_A} I(ω, T),     g = √(c k / 2ħ𝒱ε₀),
//! I  = e^{-iωT} (e^{zT} - 1) / z,          z = i(ω - ω_A) - Γ_A/2,
//! ```
//!
//! and the third-order amplitude, in which the excitation hops to B through
//! the near resonant field and B emits, reduces at the `ω_A` pole to
//!
//! ```text
//! c₃ = g (μ_B·ε) e^{-ik·R_B} [k_A² μ_B·G(R, ω_A)·μ_A / (ε₀ ħ Δ_AB)] I(ω, T).
//! ```
//!
//! Mode sums visit `k = (2π/L) n` in lexicographic order of `n`, slab by slab
//! in parallel, and add the slab totals in order, so results are bitwise
//! reproducible.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::atoms::{make_pair_with_floor, AtomPair, AtomSpecies, Orientation, CONSTANTS};
use crate::emission::gauss_legendre;
use crate::tensors::{dyadic_green, RealVec3};
use crate::{Error, Result};

/// Lowest cutoff, in units of `k_A`, that still captures the Lorentzian.
pub const MIN_CUTOFF_RATIO: f64 = 1.5;

/// Lowest `Γ_A T` accepted by the asymptotic mode sums.
pub const MIN_DECAY_PRODUCT: f64 = 20.0;

/// `|zT|` below which `(e^{zT} - 1)/z` is evaluated by its series.
const SERIES_THRESHOLD: f64 = 1e-3;

/// One plane-wave mode with its two transverse polarizations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mode {
    pub index: [i64; 3],
    pub kvec: RealVec3,
    pub polarizations: [RealVec3; 2],
}

/// Periodic box of side `L` with all modes `0 < |k| ≤ cutoff`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeGrid {
    side: f64,
    cutoff: f64,
}

impl ModeGrid {
    pub fn new(side: f64, cutoff: f64) -> Result<Self> {
        if !(side > 0.0 && side.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "L",
                value: side,
                reason: "box side must be positive",
            });
        }
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "k_cutoff",
                value: cutoff,
                reason: "cutoff must be positive",
            });
        }
        Ok(Self { side, cutoff })
    }

    /// Box side `side_scaled / k_A` and cutoff `cutoff_scaled · k_A`.
    pub fn for_pair(pair: &AtomPair, side_scaled: f64, cutoff_scaled: f64) -> Result<Self> {
        let ka = pair.k_a();
        Self::new(side_scaled / ka, cutoff_scaled * ka)
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn volume(&self) -> f64 {
        self.side.powi(3)
    }

    /// `2π / L`.
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.side
    }

    fn max_index(&self) -> i64 {
        (self.cutoff / self.spacing()).floor() as i64
    }

    fn mode(&self, index: [i64; 3]) -> Option<Mode> {
        let dk = self.spacing();
        let kvec = RealVec3::new(index[0] as f64, index[1] as f64, index[2] as f64) * dk;
        let k = kvec.norm();
        if k == 0.0 || k > self.cutoff {
            return None;
        }
        let (e1, e2) = (kvec * (1.0 / k)).transverse_frame(RealVec3::Z);
        Some(Mode {
            index,
            kvec,
            polarizations: [e1, e2],
        })
    }

    fn slab(&self, n1: i64) -> impl Iterator<Item = Mode> + '_ {
        let n = self.max_index();
        (-n..=n)
            .flat_map(move |n2| (-n..=n).map(move |n3| [n1, n2, n3]))
            .filter_map(move |index| self.mode(index))
    }

    /// All modes in lexicographic order of their lattice index.
    pub fn modes(&self) -> impl Iterator<Item = Mode> + '_ {
        let n = self.max_index();
        (-n..=n).flat_map(move |n1| self.slab(n1))
    }

    pub fn len(&self) -> usize {
        let n = self.max_index();
        (-n..=n)
            .into_par_iter()
            .map(|n1| self.slab(n1).count())
            .collect::<Vec<_>>()
            .into_iter()
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Deterministic parallel sum of `f` over all modes.
    pub fn sum<const N: usize>(&self, f: impl Fn(&Mode) -> [f64; N] + Sync) -> [f64; N] {
        let n = self.max_index();
        let slabs: Vec<[f64; N]> = (-n..=n)
            .into_par_iter()
            .map(|n1| {
                let mut acc = [0.0; N];
                for mode in self.slab(n1) {
                    for (a, v) in acc.iter_mut().zip(f(&mode)) {
                        *a += v;
                    }
                }
                acc
            })
            .collect();
        let mut total = [0.0; N];
        for slab in slabs {
            for (t, v) in total.iter_mut().zip(slab) {
                *t += v;
            }
        }
        total
    }
}

/// Per-polarization amplitudes of one mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplitudeRecord {
    pub kvec: RealVec3,
    pub polarization: RealVec3,
    pub amp1: Complex64,
    pub amp3: Complex64,
    /// `|amp1 + amp3|²`.
    pub p1: f64,
}

/// `(e^{zt} - 1) / z`.
fn exp_ratio(z: Complex64, t: f64) -> Complex64 {
    let zt = z * t;
    if zt.norm() < SERIES_THRESHOLD {
        let mut term = Complex64::new(t, 0.0);
        let mut sum = term;
        for n in 2..8 {
            term = term * zt / n as f64;
            sum += term;
        }
        sum
    } else {
        (zt.exp() - 1.0) / z
    }
}

fn envelope_exponent(omega: f64, omega_a: f64, gamma: f64) -> Complex64 {
    Complex64::new(-gamma / 2.0, omega - omega_a)
}

/// `∫₀ᵀ e^{-iω(T-t)} e^{-iω_A t - Γ t/2} dt`.
pub fn time_factor(omega: f64, omega_a: f64, gamma: f64, t: f64) -> Complex64 {
    Complex64::from_polar(1.0, -omega * t) * exp_ratio(envelope_exponent(omega, omega_a, gamma), t)
}

/// `|time_factor|²`, free of the large global phase.
pub fn time_factor_sq(omega: f64, omega_a: f64, gamma: f64, t: f64) -> f64 {
    exp_ratio(envelope_exponent(omega, omega_a, gamma), t).norm_sqr()
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "T",
            value: t,
            reason: "observation time must be non-negative",
        })
    }
}

fn require_fixed(pair: &AtomPair, what: &'static str) -> Result<()> {
    match pair.orientation {
        Orientation::Fixed => Ok(()),
        Orientation::Isotropic => Err(Error::RequiresOrientedDipoles(what)),
    }
}

/// `√(c k / 2ħ𝒱ε₀)`.
fn coupling(k: f64, volume: f64) -> f64 {
    (CONSTANTS.c * k / (2.0 * CONSTANTS.hbar * volume * CONSTANTS.epsilon0)).sqrt()
}

/// `k_A² μ_B·G(R, ω_A)·μ_A / (ε₀ ħ Δ_AB)`, dimensionless.
fn hop_factor(pair: &AtomPair) -> Result<Complex64> {
    let ka = pair.k_a();
    let g = dyadic_green(ka, pair.r_vec)?;
    let v = ka * ka / (CONSTANTS.epsilon0 * CONSTANTS.hbar)
        * g.bilinear(pair.ground.mu, pair.excited.mu);
    Ok(v / pair.detuning())
}

/// Time-independent parts of `(c₁, c₃)` for one polarization.
fn reduced_amplitudes(
    pair: &AtomPair,
    hop: Complex64,
    kvec: RealVec3,
    polarization: RealVec3,
    volume: f64,
) -> (Complex64, Complex64) {
    let g = coupling(kvec.norm(), volume);
    // R_B at the origin, R_A at r_vec.
    let a1 = Complex64::from_polar(g * pair.excited.mu.dot(polarization), -kvec.dot(pair.r_vec));
    let a3 = hop * (g * pair.ground.mu.dot(polarization));
    (a1, a3)
}

/// First-order emission amplitude into `(mode, polarization)` at time `t`.
pub fn amp1_closed(
    grid: &ModeGrid,
    mode: &Mode,
    polarization: usize,
    pair: &AtomPair,
    t: f64,
) -> Result<Complex64> {
    check_time(t)?;
    require_fixed(pair, "amp1_closed")?;
    let eps = mode.polarizations[polarization];
    let (a1, _) = reduced_amplitudes(
        pair,
        Complex64::new(0.0, 0.0),
        mode.kvec,
        eps,
        grid.volume(),
    );
    let omega = CONSTANTS.c * mode.kvec.norm();
    Ok(a1 * time_factor(omega, pair.excited.omega, pair.excited.gamma, t))
}

/// Third-order amplitude (emission by B after a near-field hop) at time `t`.
pub fn amp3_closed(
    grid: &ModeGrid,
    mode: &Mode,
    polarization: usize,
    pair: &AtomPair,
    t: f64,
) -> Result<Complex64> {
    check_time(t)?;
    require_fixed(pair, "amp3_closed")?;
    let eps = mode.polarizations[polarization];
    let (_, a3) = reduced_amplitudes(pair, hop_factor(pair)?, mode.kvec, eps, grid.volume());
    let omega = CONSTANTS.c * mode.kvec.norm();
    Ok(a3 * time_factor(omega, pair.excited.omega, pair.excited.gamma, t))
}

/// Both amplitudes for every polarization of `mode`.
pub fn amplitudes(
    grid: &ModeGrid,
    mode: &Mode,
    pair: &AtomPair,
    t: f64,
) -> Result<[AmplitudeRecord; 2]> {
    let record = |p: usize| -> Result<AmplitudeRecord> {
        let amp1 = amp1_closed(grid, mode, p, pair, t)?;
        let amp3 = amp3_closed(grid, mode, p, pair, t)?;
        Ok(AmplitudeRecord {
            kvec: mode.kvec,
            polarization: mode.polarizations[p],
            amp1,
            amp3,
            p1: (amp1 + amp3).norm_sqr(),
        })
    };
    Ok([record(0)?, record(1)?])
}

/// `dP/dΩ` of the `2 Re[c₁* c₃]` term at `T → ∞`, obtained by converting the
/// mode sum near `|k| = k_A` into a continuum integral over the Lorentzian.
pub fn interference_density(pair: &AtomPair, khat: RealVec3) -> Result<f64> {
    require_fixed(pair, "interference_density")?;
    let khat = khat.unit_checked()?;
    let ka = pair.k_a();
    let kvec = khat * ka;
    let hop = hop_factor(pair)?;
    let (e1, e2) = khat.transverse_frame(RealVec3::Z);
    // Any volume cancels against the density of states.
    let volume = 1.0;
    let cross: f64 = [e1, e2]
        .into_iter()
        .map(|eps| {
            let (a1, a3) = reduced_amplitudes(pair, hop, kvec, eps, volume);
            2.0 * (a1.conj() * a3).re
        })
        .sum();
    let density_of_states = volume / (2.0 * PI).powi(3) * ka * ka;
    let lorentzian_weight = 2.0 * PI / (CONSTANTS.c * pair.excited.gamma);
    Ok(density_of_states * lorentzian_weight * cross)
}

fn check_asymptotic(grid: &ModeGrid, pair: &AtomPair, t: f64) -> Result<()> {
    check_time(t)?;
    let decay = pair.excited.gamma * t;
    if decay < MIN_DECAY_PRODUCT {
        return Err(Error::InvalidParameter {
            name: "Gamma_A*T",
            value: decay,
            reason: "mode sums need Gamma_A*T >= 20",
        });
    }
    let ratio = grid.cutoff() / pair.k_a();
    if ratio < MIN_CUTOFF_RATIO {
        return Err(Error::InvalidParameter {
            name: "k_cutoff/k_A",
            value: ratio,
            reason: "cutoff below 1.5 k_A misses the Lorentzian",
        });
    }
    Ok(())
}

/// `Σ_{k,ε} |c₁|²` at any `T ≥ 0`.
pub fn transient_pa(grid: &ModeGrid, pair: &AtomPair, t: f64) -> Result<f64> {
    check_time(t)?;
    let volume = grid.volume();
    let mu = pair.excited.mu;
    let (wa, gamma) = (pair.excited.omega, pair.excited.gamma);
    let [total] = grid.sum(|mode| {
        let k = mode.kvec.norm();
        let g2 = coupling(k, volume).powi(2);
        let transverse: f64 = mode.polarizations.iter().map(|e| mu.dot(*e).powi(2)).sum();
        [g2 * transverse * time_factor_sq(CONSTANTS.c * k, wa, gamma, t)]
    });
    Ok(total)
}

/// Free emission probability of A from the lattice sum, `Γ_A T ≥ 20`.
pub fn modesum_pa(grid: &ModeGrid, pair: &AtomPair, t: f64) -> Result<f64> {
    check_asymptotic(grid, pair, t)?;
    transient_pa(grid, pair, t)
}

/// Infinite-volume limit of [`transient_pa`] at the same cutoff and `T`.
pub fn continuum_pa(pair: &AtomPair, cutoff: f64, t: f64) -> Result<f64> {
    check_time(t)?;
    if !(cutoff > 0.0 && cutoff.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "k_cutoff",
            value: cutoff,
            reason: "cutoff must be positive",
        });
    }
    let (ka, wa, gamma) = (pair.k_a(), pair.excited.omega, pair.excited.gamma);
    let mu_sq = pair.excited.mu.dot(pair.excited.mu);
    // Σ_ε ∮ |μ·ε|² dΩ = 8π|μ|²/3.
    let angular = 8.0 * PI / 3.0 * mu_sq;
    let integrand = |k: f64| {
        let g2 = coupling(k, 1.0).powi(2);
        k * k * g2 * angular * time_factor_sq(CONSTANTS.c * k, wa, gamma, t)
    };
    let breaks = graded_breakpoints(ka, gamma / (2.0 * CONSTANTS.c), gamma * t, cutoff);
    let (nodes, weights) = gauss_legendre(16);
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let (mid, half) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
        for (x, wt) in nodes.iter().zip(&weights) {
            total += half * wt * integrand(mid + half * x);
        }
    }
    Ok(total / (2.0 * PI).powi(3))
}

/// Panel edges on `[0, cutoff]`, finest around `center` and growing
/// geometrically away from it.
fn graded_breakpoints(center: f64, width: f64, decay: f64, cutoff: f64) -> Vec<f64> {
    let first = 0.05 * width / (decay / 2.0).max(1.0);
    let mut offsets = vec![0.0];
    let mut step = first;
    let reach = center.max(cutoff - center);
    while *offsets.last().unwrap() < reach {
        let next = offsets.last().unwrap() + step;
        offsets.push(next);
        step *= 1.05;
    }
    let mut points: Vec<f64> = offsets
        .iter()
        .rev()
        .map(|o| center - o)
        .filter(|&k| k > 0.0)
        .collect();
    points.insert(0, 0.0);
    points.extend(
        offsets
            .iter()
            .skip(1)
            .map(|o| center + o)
            .filter(|&k| k < cutoff),
    );
    if center < cutoff {
        points.push(cutoff);
    } else {
        points.retain(|&k| k < cutoff);
        points.push(cutoff);
    }
    points
}

/// `Σ |c₁ + c₃|²` over modes with `k̂·R̂ > 0` and `< 0`.
pub fn asymmetry_check(grid: &ModeGrid, pair: &AtomPair, t: f64) -> Result<(f64, f64)> {
    check_asymptotic(grid, pair, t)?;
    require_fixed(pair, "asymmetry_check")?;
    let volume = grid.volume();
    let hop = hop_factor(pair)?;
    let axis = pair.axis();
    let (wa, gamma) = (pair.excited.omega, pair.excited.gamma);
    let [forward, backward] = grid.sum(|mode| {
        let along = mode.kvec.dot(axis);
        if along == 0.0 {
            return [0.0, 0.0];
        }
        let k = mode.kvec.norm();
        let weight = time_factor_sq(CONSTANTS.c * k, wa, gamma, t);
        let p: f64 = mode
            .polarizations
            .iter()
            .map(|&eps| {
                let (a1, a3) = reduced_amplitudes(pair, hop, mode.kvec, eps, volume);
                (a1 + a3).norm_sqr()
            })
            .sum::<f64>()
            * weight;
        if along > 0.0 {
            [p, 0.0]
        } else {
            [0.0, p]
        }
    });
    Ok((forward, backward))
}

fn broaden(species: &AtomSpecies, fraction: f64) -> Result<AtomSpecies> {
    species.with_linewidth(fraction * species.omega)
}

/// Copy of `pair` with both linewidths set to `fraction · ω` and dipoles
/// rederived, so that the Lorentzian spans many lattice shells.
pub fn broadened_pair(pair: &AtomPair, fraction: f64, detuning_floor: f64) -> Result<AtomPair> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidParameter {
            name: "fraction",
            value: fraction,
            reason: "must lie in (0, 1)",
        });
    }
    let excited = broaden(&pair.excited, fraction)?;
    let ground = broaden(&pair.ground, fraction)?;
    let broadened = make_pair_with_floor(
        &excited,
        &ground,
        pair.separation(),
        pair.axis(),
        detuning_floor,
    )?;
    Ok(broadened.with_orientation(pair.orientation))
}
