//! Product quadrature on the unit sphere: Gauss–Legendre in `cos θ` times the
//! uniform trapezoid rule in `φ`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::tensors::RealVec3;
use crate::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, z);
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    (p1, n * (z * p1 - p0) / (z * z - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphereNode {
    /// Polar angle from the rule's pole, rad.
    pub theta: f64,
    /// Azimuth from the rule's reference direction, rad.
    pub phi: f64,
    /// Solid-angle weight, sr.
    pub weight: f64,
    /// Unit direction in the lab frame.
    pub direction: RealVec3,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereRule {
    pub n_theta: usize,
    pub n_phi: usize,
    pub nodes: Vec<SphereNode>,
}

impl SphereRule {
    /// `n_theta` Gauss–Legendre nodes in `cos θ` and `n_phi` trapezoid nodes
    /// in `φ`, with `θ` measured from `pole` and `φ = 0` towards the part of
    /// `reference` perpendicular to `pole`.
    pub fn new(n_theta: usize, n_phi: usize, pole: RealVec3, reference: RealVec3) -> Result<Self> {
        if n_theta < 2 {
            return Err(Error::InvalidParameter {
                name: "order",
                value: n_theta as f64,
                reason: "at least two polar nodes are required",
            });
        }
        if n_phi < 1 {
            return Err(Error::InvalidParameter {
                name: "n_phi",
                value: n_phi as f64,
                reason: "at least one azimuthal node is required",
            });
        }
        let pole = pole.unit_checked()?;
        let (e1, e2) = pole.transverse_frame(reference);
        let (cos_nodes, cos_weights) = gauss_legendre(n_theta);
        let dphi = 2.0 * PI / n_phi as f64;
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        for (&c, &w) in cos_nodes.iter().zip(&cos_weights) {
            let s = (1.0 - c * c).max(0.0).sqrt();
            let theta = c.acos();
            for j in 0..n_phi {
                let phi = j as f64 * dphi;
                let direction = pole * c + e1 * (s * phi.cos()) + e2 * (s * phi.sin());
                nodes.push(SphereNode {
                    theta,
                    phi,
                    weight: w * dphi,
                    direction,
                });
            }
        }
        Ok(Self {
            n_theta,
            n_phi,
            nodes,
        })
    }

    /// `∮ f(k̂) dΩ`, summed in node order.
    pub fn integrate(&self, mut f: impl FnMut(RealVec3) -> f64) -> f64 {
        self.nodes.iter().map(|n| n.weight * f(n.direction)).sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }
}

/// Product rule with `order` polar and `2·order` azimuthal nodes, pole along `ẑ`.
pub fn sphere_quadrature(order: usize) -> Result<SphereRule> {
    SphereRule::new(order, 2 * order, RealVec3::Z, RealVec3::X)
}
