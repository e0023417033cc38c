//! Invariant checks behind `resonance-recoil verify`.
//!
//! Each check returns its worst measured residual together with the limit it
//! is held to. The fast suite uses closed forms and sphere quadrature only; the
//! oracle suite adds plane-wave mode sums on a broadened model pair.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resonance_core::dynamics::{uniform_grid, vacuum_momentum_rotating_wave};
use resonance_core::emission::{gauss_legendre, sphere_integral};
use resonance_core::oracle::{
    asymmetry_check, broadened_pair, continuum_pa, interference_density, modesum_pa, time_factor,
    ModeGrid,
};
use resonance_core::tensors::{dyadic_green, grad_imim_contraction};
use resonance_core::{
    budget, dpdomega, emitted_momentum, make_pair, p_free_space, resonant_force, AtomPair,
    AtomSpecies, Orientation, RealVec3, SpeciesRegistry, CONSTANTS,
};

/// Linewidth of the oracle's model pair as a fraction of each `ω`.
pub const ORACLE_BROADENING: f64 = 0.007;
/// Detuning floor (in linewidths) accepted for the broadened pair.
pub const ORACLE_DETUNING_FLOOR: f64 = 4.0;
/// `Γ_A T` at which mode sums are evaluated.
pub const ORACLE_DECAY_PRODUCT: f64 = 30.0;
/// Cutoff of the mode lattice, in units of `k_A`.
pub const ORACLE_CUTOFF: f64 = 3.0;
/// Relative forward/backward tolerance of the `R → ∞` control.
pub const ASYMMETRY_TOLERANCE: f64 = 1e-3;
/// `x` of the far control pair; not a multiple of the box side, where every
/// lattice phase `e^{ik·R}` would collapse to one.
pub const CONTROL_SEPARATION: f64 = 10_007.3;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub limit: f64,
    pub detail: String,
}

impl Check {
    /// Passes when `measured < limit`.
    pub fn below(
        name: impl Into<String>,
        measured: f64,
        limit: f64,
        detail: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            passed: measured < limit,
            measured,
            limit,
            detail: detail.into(),
        }
    }

    pub fn condition(
        name: impl Into<String>,
        passed: bool,
        measured: f64,
        detail: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            passed,
            measured,
            limit: f64::NAN,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {} measured={:e}", self.name, self.measured)?;
        if !self.limit.is_nan() {
            write!(f, " limit={:e}", self.limit)?;
        }
        if !self.detail.is_empty() {
            write!(f, " {}", self.detail)?;
        }
        Ok(())
    }
}

pub fn random_unit(rng: &mut impl Rng) -> RealVec3 {
    loop {
        let v = RealVec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v * (1.0 / n);
        }
    }
}

fn synthetic_species(label: &str, wavelength: f64, gamma: f64, axis: RealVec3) -> AtomSpecies {
    let omega = 2.0 * PI * CONSTANTS.c / wavelength;
    AtomSpecies::from_linewidth(label, omega, gamma, axis).expect("consistent by construction")
}

/// Valid pairs with optical lines 0.4–8% apart, linewidths 3e6–8e7 rad/s,
/// random dipoles, axes, orientation modes and `x ∈ [0.3, 30]`.
pub fn random_pairs(seed: u64, n: usize) -> Vec<AtomPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let lambda_a = rng.random_range(500e-9..1100e-9);
            let offset = rng.random_range(0.004..0.08);
            let lambda_b = if rng.random_bool(0.5) {
                lambda_a * (1.0 + offset)
            } else {
                lambda_a * (1.0 - offset)
            };
            let a = synthetic_species(
                "A",
                lambda_a,
                rng.random_range(3e6..8e7),
                random_unit(&mut rng),
            );
            let b = synthetic_species(
                "B",
                lambda_b,
                rng.random_range(3e6..8e7),
                random_unit(&mut rng),
            );
            let x = rng.random_range(0.3..30.0);
            let orientation = if rng.random_bool(0.25) {
                Orientation::Isotropic
            } else {
                Orientation::Fixed
            };
            make_pair(&a, &b, x / a.k, random_unit(&mut rng))
                .expect("valid by construction")
                .with_orientation(orientation)
        })
        .collect()
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn free_space_normalization(registry: &SpeciesRegistry) -> Check {
    let worst = registry
        .iter()
        .map(|s| (p_free_space(s) - 1.0).abs())
        .fold(0.0, f64::max);
    Check::below(
        "free_space_normalization",
        worst,
        1e-10,
        format!("species={}", registry.len()),
    )
}

pub fn optical_theorem_closed(pairs: &[AtomPair]) -> Check {
    let worst = pairs
        .iter()
        .map(|p| {
            let b = budget(p);
            b.residual_theorem.abs() / b.p_de.abs()
        })
        .fold(0.0, f64::max);
    Check::below(
        "optical_theorem_closed_form",
        worst,
        1e-12,
        format!("pairs={}", pairs.len()),
    )
}

pub fn optical_theorem_quadrature(pairs: &[AtomPair], order: usize) -> Check {
    let worst = pairs
        .iter()
        .map(|p| {
            relative(
                sphere_integral(p, order).expect("valid order"),
                budget(p).p_fg,
            )
        })
        .fold(0.0, f64::max);
    Check::below(
        "optical_theorem_quadrature",
        worst,
        1e-6,
        format!("pairs={} order={order}x{}", pairs.len(), 2 * order),
    )
}

fn imim(k: f64, r: RealVec3, a: RealVec3, b: RealVec3) -> f64 {
    let im = dyadic_green(k, r).expect("separated").im();
    im.bilinear(a, b).re * im.bilinear(b, a).re
}

/// Central differences with step `1e-6 |R|`.
pub fn finite_difference_gradient(k: f64, r: RealVec3, a: RealVec3, b: RealVec3) -> RealVec3 {
    let h = 1e-6 * r.norm();
    let d = |e: RealVec3| (imim(k, r + e * h, a, b) - imim(k, r - e * h, a, b)) / (2.0 * h);
    RealVec3::new(d(RealVec3::X), d(RealVec3::Y), d(RealVec3::Z))
}

/// 15 separations times 10 dipole/axis configurations.
pub fn gradient_finite_difference(pair: &AtomPair, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = pair.k_a();
    let (ma, mb) = (pair.excited.mu.norm(), pair.ground.mu.norm());
    let mut configs = vec![(RealVec3::Z, RealVec3::Z, RealVec3::X)];
    while configs.len() < 10 {
        configs.push((
            random_unit(&mut rng),
            random_unit(&mut rng),
            random_unit(&mut rng),
        ));
    }
    let xs = uniform_grid(0.5, 20.0, 15).expect("valid grid");
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for &x in &xs {
        for &(a, b, axis) in &configs {
            let r = axis * (x / k);
            let analytic = grad_imim_contraction(k, r, a * ma, b * mb).expect("separated");
            let numeric = finite_difference_gradient(k, r, a * ma, b * mb);
            let err = (analytic - numeric).norm() / analytic.norm().max(numeric.norm());
            worst = worst.max(err);
            count += 1;
        }
    }
    Check::below(
        "gradient_finite_difference",
        worst,
        1e-6,
        format!("combinations={count}"),
    )
}

pub fn momentum_identity(pairs: &[AtomPair]) -> Check {
    let worst = pairs
        .iter()
        .map(|p| {
            let r = resonant_force(p, 0.0).expect("T = 0");
            (r.p_inf + r.f0 * (1.0 / r.decay_rate)).norm() / r.p_inf.norm().max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max);
    Check::below(
        "vacuum_momentum_identity",
        worst,
        1e-14,
        format!("pairs={}", pairs.len()),
    )
}

pub fn reversal_symmetry(pairs: &[AtomPair]) -> Check {
    let worst = pairs
        .iter()
        .map(|p| {
            let a = resonant_force(p, 0.0).expect("T = 0");
            let b = resonant_force(&p.reversed(), 0.0).expect("T = 0");
            let scale = a.p_inf.norm().max(f64::MIN_POSITIVE);
            ((a.p_inf + b.p_inf).norm() / scale).max(
                (a.directionality - b.directionality).abs()
                    / a.directionality.abs().max(f64::MIN_POSITIVE),
            )
        })
        .fold(0.0, f64::max);
    Check::below("reversal_symmetry", worst, 1e-12, "P_inf odd, D even")
}

/// Emitted momentum versus the rotating-wave-reduced `P∞`: returns the worst
/// misalignment angle (rad) and worst relative magnitude error.
pub fn momentum_bookkeeping_residuals(template: &AtomPair, xs: &[f64], order: usize) -> (f64, f64) {
    let mut angle: f64 = 0.0;
    let mut magnitude: f64 = 0.0;
    for &x in xs {
        let pair = template.at_scaled_separation(x).expect("valid separation");
        let emitted = emitted_momentum(&pair, order)
            .expect("valid order")
            .total_momentum;
        let force = resonant_force(&pair, 0.0).expect("T = 0").f0;
        let reduced = vacuum_momentum_rotating_wave(&pair).expect("T = 0");
        let cos = emitted.dot(-force) / (emitted.norm() * force.norm());
        angle = angle.max(cos.clamp(-1.0, 1.0).acos());
        magnitude = magnitude.max(relative(emitted.norm(), reduced.norm()));
    }
    (angle, magnitude)
}

pub fn momentum_bookkeeping(template: &AtomPair) -> Vec<Check> {
    let xs = [0.8, 1.28, 3.0];
    let (angle, magnitude) = momentum_bookkeeping_residuals(template, &xs, 64);
    vec![
        Check::below(
            "emitted_momentum_direction",
            angle,
            1e-6,
            "rad, x=0.8,1.28,3.0",
        ),
        Check::below(
            "emitted_momentum_magnitude",
            magnitude,
            0.05,
            "vs rotating-wave P_inf",
        ),
    ]
}

pub fn suppression_hierarchy(template: &AtomPair, xmin: f64, xmax: f64, samples: usize) -> Check {
    let worst = uniform_grid(xmin, xmax, samples)
        .expect("valid grid")
        .into_iter()
        .map(|x| budget(&template.at_scaled_separation(x).expect("valid separation")).order_check)
        .fold(0.0, f64::max);
    Check::below(
        "suppression_hierarchy",
        worst,
        1e-4,
        format!("x={xmin}..{xmax} samples={samples}"),
    )
}

/// Oracle interference density versus the closed-form `dP/dΩ` at random `k̂`.
pub fn interference_density_match(template: &AtomPair, seed: u64) -> Check {
    let pair = template.clone().with_orientation(Orientation::Fixed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let worst = (0..20)
        .map(|_| {
            let khat = random_unit(&mut rng);
            let oracle = interference_density(&pair, khat).expect("oriented pair");
            relative(oracle, dpdomega(&pair, khat).expect("unit vector"))
        })
        .fold(0.0, f64::max);
    Check::below("oracle_interference_density", worst, 1e-6, "directions=20")
}

fn numeric_time_factor(omega: f64, omega_a: f64, gamma: f64, t: f64) -> Complex64 {
    let (x, w) = gauss_legendre(20);
    let panels = 400;
    let h = t / panels as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for (xi, wi) in x.iter().zip(&w) {
            let s = mid + 0.5 * h * xi;
            let phase = -omega * (t - s) - omega_a * s;
            sum += Complex64::from_polar(0.5 * h * wi * (-gamma * s / 2.0).exp(), phase);
        }
    }
    sum
}

/// Closed-form time factor against composite Gauss–Legendre in units of `Γ`.
pub fn time_factor_quadrature(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let worst = (0..20)
        .map(|_| {
            let omega = rng.random_range(30.0..70.0);
            let t = rng.random_range(0.01..12.0);
            let closed = time_factor(omega, 50.0, 1.0, t);
            let numeric = numeric_time_factor(omega, 50.0, 1.0, t);
            (closed - numeric).norm() / numeric.norm()
        })
        .fold(0.0, f64::max);
    Check::below("oracle_time_factor", worst, 1e-10, "samples=20")
}

pub fn fast_suite(registry: &SpeciesRegistry, template: &AtomPair, seed: u64) -> Vec<Check> {
    let pairs = random_pairs(seed, 100);
    let mut checks = vec![
        free_space_normalization(registry),
        optical_theorem_closed(&pairs),
        optical_theorem_quadrature(&pairs, 64),
        gradient_finite_difference(template, seed),
        momentum_identity(&pairs),
        reversal_symmetry(&pairs),
    ];
    checks.extend(momentum_bookkeeping(template));
    checks.push(suppression_hierarchy(template, 0.5, 20.0, 400));
    checks.push(interference_density_match(template, seed));
    checks.push(time_factor_quadrature(seed));
    checks
}

/// Lattice and continuum `P^(a)` for the broadened model of `template`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationStudy {
    pub sides: Vec<f64>,
    pub lattice: Vec<f64>,
    pub continuum: f64,
}

impl NormalizationStudy {
    pub fn run(template: &AtomPair, sides: &[f64]) -> resonance_core::Result<Self> {
        let pair = oracle_pair(template)?;
        let t = ORACLE_DECAY_PRODUCT / pair.excited.gamma;
        let lattice = sides
            .iter()
            .map(|&l| modesum_pa(&ModeGrid::for_pair(&pair, l, ORACLE_CUTOFF)?, &pair, t))
            .collect::<resonance_core::Result<Vec<_>>>()?;
        let continuum = continuum_pa(&pair, ORACLE_CUTOFF * pair.k_a(), t)?;
        Ok(Self {
            sides: sides.to_vec(),
            lattice,
            continuum,
        })
    }

    /// `|P_L - P_continuum|` for each side.
    pub fn discretization_errors(&self) -> Vec<f64> {
        self.lattice
            .iter()
            .map(|p| (p - self.continuum).abs())
            .collect()
    }

    pub fn is_monotone(&self) -> bool {
        self.discretization_errors().windows(2).all(|w| w[1] < w[0])
    }
}

pub fn oracle_pair(template: &AtomPair) -> resonance_core::Result<AtomPair> {
    broadened_pair(
        &template.clone().with_orientation(Orientation::Fixed),
        ORACLE_BROADENING,
        ORACLE_DETUNING_FLOOR,
    )
}

/// Broadened pairs at `x ∈ [0.5, 2.5]` with parallel dipoles of random common
/// direction and a random axis.
pub fn asymmetry_pairs(
    template: &AtomPair,
    seed: u64,
    n: usize,
) -> resonance_core::Result<Vec<AtomPair>> {
    let base = oracle_pair(template)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let dipole = random_unit(&mut rng);
            let axis = random_unit(&mut rng);
            let x = rng.random_range(0.5..2.5);
            let a = base.excited.with_dipole_axis(dipole)?;
            let b = base.ground.with_dipole_axis(dipole)?;
            resonance_core::make_pair_with_floor(&a, &b, x / a.k, axis, ORACLE_DETUNING_FLOOR)
        })
        .collect()
}

/// `(forward - backward) / (forward + backward)` on the default lattice.
pub fn relative_asymmetry(pair: &AtomPair, side: f64) -> resonance_core::Result<f64> {
    let grid = ModeGrid::for_pair(pair, side, ORACLE_CUTOFF)?;
    let (f, b) = asymmetry_check(&grid, pair, ORACLE_DECAY_PRODUCT / pair.excited.gamma)?;
    Ok((f - b) / (f + b))
}

pub fn oracle_suite(template: &AtomPair, seed: u64) -> resonance_core::Result<Vec<Check>> {
    let study = NormalizationStudy::run(template, &[100.0, 200.0, 400.0])?;
    let errors = study.discretization_errors();
    let mut checks = vec![
        Check::below(
            "oracle_modesum_pa",
            (study.lattice[1] - 1.0).abs(),
            0.02,
            format!(
                "L=200/k_A pa={:e} continuum={:e}",
                study.lattice[1], study.continuum
            ),
        ),
        Check::condition(
            "oracle_modesum_convergence",
            study.is_monotone(),
            errors[2],
            format!(
                "|pa-continuum| at L=100,200,400: {:e},{:e},{:e}",
                errors[0], errors[1], errors[2]
            ),
        ),
    ];

    let control = oracle_pair(template)?.at_scaled_separation(CONTROL_SEPARATION)?;
    let control_asym = relative_asymmetry(&control, 200.0)?;
    checks.push(Check::below(
        "oracle_asymmetry_control",
        control_asym.abs(),
        ASYMMETRY_TOLERANCE,
        format!("x={CONTROL_SEPARATION}"),
    ));

    let reference = oracle_pair(template)?.at_scaled_separation(1.28)?;
    let reference_asym = relative_asymmetry(&reference, 200.0)?;
    checks.push(Check::condition(
        "oracle_asymmetry_resolved",
        reference_asym.abs() > 10.0 * control_asym.abs().max(ASYMMETRY_TOLERANCE),
        reference_asym,
        "x=1.28 against 10x the control tolerance",
    ));

    let pairs = asymmetry_pairs(template, seed, 10)?;
    let mut agree = 0;
    for pair in &pairs {
        let asym = relative_asymmetry(pair, 200.0)?;
        let p_inf = resonant_force(pair, 0.0)?.p_inf;
        if asym.signum() == pair.axis().dot(p_inf).signum() {
            agree += 1;
        }
    }
    checks.push(Check::condition(
        "oracle_asymmetry_sign",
        agree == pairs.len(),
        agree as f64,
        format!("agreeing={agree}/{}", pairs.len()),
    ));
    Ok(checks)
}
