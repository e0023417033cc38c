//! Real 3-vectors, complex 3×3 tensors and the free-space dyadic Green's
//! function
//!
//! ```text
//! G(R, ω) = -(k e^{ikR} / 4π) [ α/(kR) + i β/(kR)² - β/(kR)³ ],
//! α = I - R̂R̂,   β = I - 3 R̂R̂,   k = ω/c.
//! ```
//!
//! Internally everything is expressed through the dimensionless separation
//! `x = kR` and the scaled tensor `g = 4π G / k = a(x) I + b(x) R̂R̂`, with
//!
//! ```text
//! a(x) = -e^{ix} (1/x + i/x² - 1/x³)
//! b(x) =  e^{ix} (1/x + 3i/x² - 3/x³)
//! ```

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance on `|axis| - 1` for vectors used as directions.
pub const UNIT_TOLERANCE: f64 = 1e-12;

/// Separations below this many reduced wavelengths (`x = kR`) are rejected.
pub const MIN_SCALED_SEPARATION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RealVec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl RealVec3 {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0);
    pub const X: Self = Self::new(1.0, 0.0, 0.0);
    pub const Y: Self = Self::new(0.0, 1.0, 0.0);
    pub const Z: Self = Self::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Self) -> Self {
        Self::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Returns `self / |self|`, or `None` for the zero vector.
    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }

    /// Validates that `self` is a unit vector within [`UNIT_TOLERANCE`].
    pub fn unit_checked(self) -> Result<Self> {
        let norm = self.norm();
        if (norm - 1.0).abs() <= UNIT_TOLERANCE {
            Ok(self)
        } else {
            Err(Error::NonUnitAxis { norm })
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Two unit vectors completing `self` (assumed unit) to a right-handed
    /// orthonormal frame. The first one is the part of `reference`
    /// perpendicular to `self`; if `reference` is parallel, `X` is used.
    pub fn transverse_frame(self, reference: Self) -> (Self, Self) {
        let mut e1 = reference - self * reference.dot(self);
        if e1.norm() < 1e-8 {
            let fallback = if self.x.abs() < 0.9 { Self::X } else { Self::Y };
            e1 = fallback - self * fallback.dot(self);
        }
        let e1 = e1.normalized().expect("non-degenerate transverse vector");
        let e2 = self.cross(e1);
        (e1, e2)
    }
}

impl Add for RealVec3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for RealVec3 {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for RealVec3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for RealVec3 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for RealVec3 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Index<usize> for RealVec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("RealVec3 index {i} out of range"),
        }
    }
}

/// Complex 3×3 tensor, row-major `m[i][j]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMat3(pub [[Complex64; 3]; 3]);

impl Default for ComplexMat3 {
    fn default() -> Self {
        Self::zero()
    }
}

impl ComplexMat3 {
    pub fn zero() -> Self {
        Self([[Complex64::new(0.0, 0.0); 3]; 3])
    }

    pub fn identity() -> Self {
        Self::diagonal(1.0, 1.0, 1.0)
    }

    pub fn diagonal(a: f64, b: f64, c: f64) -> Self {
        let mut m = Self::zero();
        m[(0, 0)] = a.into();
        m[(1, 1)] = b.into();
        m[(2, 2)] = c.into();
        m
    }

    /// Real outer product `u vᵀ`.
    pub fn outer(u: RealVec3, v: RealVec3) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] = (u[i] * v[j]).into();
            }
        }
        m
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for z in row.iter_mut() {
                *z = f(*z);
            }
        }
        m
    }

    pub fn re(&self) -> Self {
        self.map(|z| z.re.into())
    }

    pub fn im(&self) -> Self {
        self.map(|z| z.im.into())
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] = self[(j, i)];
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        self[(0, 0)] + self[(1, 1)] + self[(2, 2)]
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] = (0..3).map(|l| self[(i, l)] * other[(l, j)]).sum();
            }
        }
        m
    }

    /// `uᵀ M v`.
    pub fn bilinear(&self, u: RealVec3, v: RealVec3) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                acc += self[(i, j)] * (u[i] * v[j]);
            }
        }
        acc
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest asymmetry `|M_ij - M_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).norm());
            }
        }
        worst
    }
}

impl Index<(usize, usize)> for ComplexMat3 {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMat3 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.0[i][j]
    }
}

impl Add for ComplexMat3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut m = self;
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] += o[(i, j)];
            }
        }
        m
    }
}

impl Sub for ComplexMat3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + o.scale((-1.0).into())
    }
}

/// The transverse and longitudinal projector combinations `α = I - âââ`
/// and `β = I - 3 ââ`.
pub fn projectors(axis: RealVec3) -> Result<(ComplexMat3, ComplexMat3)> {
    let axis = axis.unit_checked()?;
    let aa = ComplexMat3::outer(axis, axis);
    let id = ComplexMat3::identity();
    Ok((id - aa, id - aa.scale(3.0.into())))
}

/// Scalar radial coefficients `(a, b)` of the scaled Green's tensor at `x = kR`.
pub fn radial_coefficients(x: f64) -> (Complex64, Complex64) {
    let (inv1, inv2, inv3) = (1.0 / x, 1.0 / (x * x), 1.0 / (x * x * x));
    let phase = Complex64::from_polar(1.0, x);
    let a = -phase * Complex64::new(inv1 - inv3, inv2);
    let b = phase * Complex64::new(inv1 - 3.0 * inv3, 3.0 * inv2);
    (a, b)
}

/// `(da/dx, db/dx)`.
pub fn radial_derivatives(x: f64) -> (Complex64, Complex64) {
    let (inv1, inv2, inv3, inv4) = (1.0 / x, 1.0 / (x * x), 1.0 / x.powi(3), 1.0 / x.powi(4));
    let i = Complex64::i();
    let phase = Complex64::from_polar(1.0, x);
    // d/dx[e^{ix} p(x)] = e^{ix} (i p + p')
    let pa = Complex64::new(inv1 - inv3, inv2);
    let dpa = Complex64::new(-inv2 + 3.0 * inv4, -2.0 * inv3);
    let pb = Complex64::new(inv1 - 3.0 * inv3, 3.0 * inv2);
    let dpb = Complex64::new(-inv2 + 9.0 * inv4, -6.0 * inv3);
    (-phase * (i * pa + dpa), phase * (i * pb + dpb))
}

/// Scaled Green's tensor `g = 4π G / k` at dimensionless separation `x` along
/// the unit `axis`.
pub fn scaled_green(x: f64, axis: RealVec3) -> ComplexMat3 {
    let (a, b) = radial_coefficients(x);
    ComplexMat3::identity().scale(a) + ComplexMat3::outer(axis, axis).scale(b)
}

/// Derivatives `∂g/∂X_l`, `l = 0..3`, of the scaled Green's tensor with
/// respect to the components of the scaled separation vector `X = k R`.
pub fn scaled_green_gradient(x: f64, axis: RealVec3) -> [ComplexMat3; 3] {
    let (_, b) = radial_coefficients(x);
    let (da, db) = radial_derivatives(x);
    let b_over_x = b / x;
    let mut out = [ComplexMat3::zero(); 3];
    for (l, d) in out.iter_mut().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                let delta_ij = if i == j { 1.0 } else { 0.0 };
                let delta_il = if i == l { 1.0 } else { 0.0 };
                let delta_jl = if j == l { 1.0 } else { 0.0 };
                let radial = da * (axis[l] * delta_ij) + db * (axis[l] * axis[i] * axis[j]);
                let angular = b_over_x
                    * (delta_il * axis[j] + axis[i] * delta_jl - 2.0 * axis[i] * axis[j] * axis[l]);
                d[(i, j)] = radial + angular;
            }
        }
    }
    out
}

fn separation_axis(k: f64, r_vec: RealVec3) -> Result<(f64, RealVec3)> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "k",
            value: k,
            reason: "wavenumber must be positive and finite",
        });
    }
    let r = r_vec.norm();
    let limit = MIN_SCALED_SEPARATION / k;
    if r.is_nan() || r <= limit || !r.is_finite() {
        return Err(Error::Singular {
            separation: r,
            limit,
        });
    }
    Ok((r, r_vec * (1.0 / r)))
}

/// Free-space dyadic Green's function `G(R, ω)` in 1/m for `k = ω/c` in 1/m.
pub fn dyadic_green(k: f64, r_vec: RealVec3) -> Result<ComplexMat3> {
    let (r, axis) = separation_axis(k, r_vec)?;
    Ok(scaled_green(k * r, axis).scale((k / (4.0 * PI)).into()))
}

/// `Im G(r→0) = -(k/6π) I`.
pub fn imgreen_origin_limit(k: f64) -> Result<ComplexMat3> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "k",
            value: k,
            reason: "wavenumber must be positive and finite",
        });
    }
    let v = -k / (6.0 * PI);
    Ok(ComplexMat3::diagonal(v, v, v))
}

/// A pair of transition dipoles entering fourth-order contractions
///
/// ```text
/// C(M, N) = μ_A^i μ_B^j M_ij · μ_B^p μ_A^q N_pq.
/// ```
///
/// `Isotropic` replaces each `μ^i μ^j` by `|μ|² δ_ij / 3`, giving
/// `C(M, N) = |μ_A|² |μ_B|² Tr(M N) / 9`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DipolePair {
    Oriented { a: RealVec3, b: RealVec3 },
    Isotropic { a_sq: f64, b_sq: f64 },
}

impl DipolePair {
    pub fn contract(&self, m: &ComplexMat3, n: &ComplexMat3) -> Complex64 {
        match *self {
            DipolePair::Oriented { a, b } => m.bilinear(a, b) * n.bilinear(b, a),
            DipolePair::Isotropic { a_sq, b_sq } => m.matmul(n).trace() * (a_sq * b_sq / 9.0),
        }
    }

    /// `(|μ_A|², |μ_B|²)`.
    pub fn magnitudes_sq(&self) -> (f64, f64) {
        match *self {
            DipolePair::Oriented { a, b } => (a.dot(a), b.dot(b)),
            DipolePair::Isotropic { a_sq, b_sq } => (a_sq, b_sq),
        }
    }

    /// Same orientation structure with unit magnitudes.
    pub fn unit(&self) -> Self {
        match *self {
            DipolePair::Oriented { a, b } => DipolePair::Oriented {
                a: a.normalized().unwrap_or(RealVec3::ZERO),
                b: b.normalized().unwrap_or(RealVec3::ZERO),
            },
            DipolePair::Isotropic { .. } => DipolePair::Isotropic {
                a_sq: 1.0,
                b_sq: 1.0,
            },
        }
    }
}

/// Gradient with respect to `X = kR` of `C(Im g, Im g)` for the scaled tensor.
pub(crate) fn scaled_imim_gradient(x: f64, axis: RealVec3, dipoles: &DipolePair) -> RealVec3 {
    let im_g = scaled_green(x, axis).im();
    let grad = scaled_green_gradient(x, axis);
    let component = |l: usize| {
        let d = grad[l].im();
        (dipoles.contract(&d, &im_g) + dipoles.contract(&im_g, &d)).re
    };
    RealVec3::new(component(0), component(1), component(2))
}

/// `∇_R [μ_A^i μ_B^j Im G_ij(R) · μ_B^p μ_A^q Im G_pq(R)]` for fixed dipoles,
/// in (C·m)⁴/m³.
pub fn grad_imim_contraction(
    k: f64,
    r_vec: RealVec3,
    mu_a: RealVec3,
    mu_b: RealVec3,
) -> Result<RealVec3> {
    grad_imim_contraction_for(k, r_vec, &DipolePair::Oriented { a: mu_a, b: mu_b })
}

/// As [`grad_imim_contraction`] for any [`DipolePair`].
pub fn grad_imim_contraction_for(
    k: f64,
    r_vec: RealVec3,
    dipoles: &DipolePair,
) -> Result<RealVec3> {
    let (r, axis) = separation_axis(k, r_vec)?;
    let (a_sq, b_sq) = dipoles.magnitudes_sq();
    let scale = a_sq * b_sq * (k / (4.0 * PI)).powi(2) * k;
    Ok(scaled_imim_gradient(k * r, axis, &dipoles.unit()) * scale)
}
