//! Analytic gradient of `Im G · Im G` against central finite differences.

use resonance_core::tensors::{dyadic_green, grad_imim_contraction};
use resonance_core::{RealVec3, SpeciesRegistry};

fn contraction(k: f64, r: RealVec3, a: RealVec3, b: RealVec3) -> f64 {
    let im = dyadic_green(k, r).unwrap().im();
    im.bilinear(a, b).re * im.bilinear(b, a).re
}

fn finite_difference(k: f64, r: RealVec3, a: RealVec3, b: RealVec3) -> RealVec3 {
    let h = 1e-6 * r.norm();
    let basis = [RealVec3::X, RealVec3::Y, RealVec3::Z];
    let d: Vec<f64> = basis
        .iter()
        .map(|&e| (contraction(k, r + e * h, a, b) - contraction(k, r - e * h, a, b)) / (2.0 * h))
        .collect();
    RealVec3::new(d[0], d[1], d[2])
}

fn orientations() -> Vec<(RealVec3, RealVec3, RealVec3)> {
    let diag = RealVec3::new(1.0, 1.0, 1.0).normalized().unwrap();
    let tilt = RealVec3::new(0.3, -0.8, 0.52).normalized().unwrap();
    let other = RealVec3::new(-0.6, 0.2, 0.77).normalized().unwrap();
    vec![
        (RealVec3::Z, RealVec3::Z, RealVec3::X),
        (RealVec3::X, RealVec3::X, RealVec3::X),
        (RealVec3::Z, RealVec3::X, diag),
        (tilt, tilt, RealVec3::X),
        (tilt, other, RealVec3::Y),
        (other, RealVec3::Y, diag),
        (diag, RealVec3::Z, tilt),
        (RealVec3::Y, other, other),
        (tilt, diag, RealVec3::Z),
        (other, other, RealVec3::new(0.0, 0.6, 0.8)),
    ]
}

#[test]
fn analytic_gradient_matches_finite_differences() {
    let reg = SpeciesRegistry::bundled();
    let rb = reg.get("RB87_5P12").unwrap();
    let kk = reg.get("K40_GS").unwrap();
    let (mu_a, mu_b) = (rb.mu.norm(), kk.mu.norm());
    let xs = [
        0.5, 0.8, 1.0, 1.28, 1.7, 2.5, 3.3, 5.0, 9.1, 14.0, 17.5, 20.0, 27.0, 33.0, 41.0,
    ];
    let mut count = 0;
    let mut worst: f64 = 0.0;
    for &x in &xs {
        for (a, b, axis) in orientations() {
            let r = axis.normalized().unwrap() * (x / rb.k);
            let analytic = grad_imim_contraction(rb.k, r, a * mu_a, b * mu_b).unwrap();
            let numeric = finite_difference(rb.k, r, a * mu_a, b * mu_b);
            let err = (analytic - numeric).norm() / analytic.norm().max(numeric.norm());
            assert!(err < 1e-6, "x={x} a={a:?} b={b:?} axis={axis:?}: {err:e}");
            worst = worst.max(err);
            count += 1;
        }
    }
    assert_eq!(count, 150);
    println!("max relative error {worst:e}");
}

#[test]
fn reference_points_along_x() {
    let k = 1.0;
    for x in [0.8, 1.28, 5.0] {
        let r = RealVec3::X * x;
        let analytic = grad_imim_contraction(k, r, RealVec3::Z, RealVec3::Z).unwrap();
        let numeric = finite_difference(k, r, RealVec3::Z, RealVec3::Z);
        assert!(
            (analytic.x - numeric.x).abs() < 1e-6 * numeric.x.abs(),
            "x={x}"
        );
        assert!(analytic.y.abs() < 1e-12 * analytic.x.abs());
        assert!(analytic.z.abs() < 1e-12 * analytic.x.abs());
    }
}
