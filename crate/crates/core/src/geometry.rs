//! Correlation ellipsoid: the set of post-measurement Bloch vectors of `A`.
//!
//! As `k` runs over the unit sphere, `r_{A/k} = r_A + C k / (1 + r_B.k)`
//! sweeps an ellipsoid centered at `r_A - C r_B / (1 - r_B^2)` whose axes are
//! the eigenvectors of `C N_B^{-1} C^T`, `N_B = I - r_B r_B^T`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::measurement::{post_measurement, ProjectiveDirection};
use crate::smallalg::{dot, dot3, norm, sym_eigen, RMatrix, Vec3};
use crate::states::BlochDecomposition;
use crate::tolerances;

/// One principal axis: a unit direction in `A`'s Bloch space and its semi-axis length.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipsoidAxis {
    pub direction: Vec<f64>,
    pub semi_axis: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationEllipsoid {
    pub center: Vec<f64>,
    /// Sorted by decreasing length; only axes above the rank cutoff.
    pub axes: Vec<EllipsoidAxis>,
}

impl CorrelationEllipsoid {
    pub fn rank(&self) -> usize {
        self.axes.len()
    }

    /// `sum_mu ((x - center) . u_mu)^2 / a_mu^2`; 1 on the surface.
    ///
    /// Components outside the span of the axes are ignored, so for rank
    /// below 3 points of the (flat) ellipsoid give values at most 1.
    pub fn residual(&self, x: &[f64]) -> f64 {
        let shifted: Vec<f64> = x.iter().zip(&self.center).map(|(a, c)| a - c).collect();
        self.axes
            .iter()
            .map(|ax| (dot(&shifted, &ax.direction) / ax.semi_axis).powi(2))
            .sum()
    }
}

/// Center and principal axes of the correlation ellipsoid.
pub fn correlation_ellipsoid(b: &BlochDecomposition) -> Result<CorrelationEllipsoid> {
    let rb = b.r_b();
    let rb2 = dot3(rb, rb);
    if b.is_boundary() {
        return Err(Error::DegenerateQubit);
    }
    let c = b.correlations();
    let big_d = b.big_d();

    let rb_tilde: Vec<f64> = rb.iter().map(|x| x / (1.0 - rb2)).collect();
    let shift = c.matvec(&rb_tilde);
    let center: Vec<f64> = b.r_a().iter().zip(&shift).map(|(a, s)| a - s).collect();

    let nb_inv = RMatrix::from_fn(3, 3, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id + rb[i] * rb[j] / (1.0 - rb2)
    });
    let m = &(c * &nb_inv) * &c.transpose();
    let eig = sym_eigen(&m)?;
    let lmax = eig.values.last().copied().unwrap_or(0.0);
    let mut axes = Vec::new();
    if lmax > 0.0 {
        for i in (0..big_d).rev() {
            let l = eig.values[i];
            if l <= tolerances::RANK * lmax {
                break;
            }
            axes.push(EllipsoidAxis {
                direction: eig.vectors.column(i),
                semi_axis: (l / (1.0 - rb2)).sqrt(),
            });
        }
    }
    Ok(CorrelationEllipsoid { center, axes })
}

/// `n` quasi-uniform points on the unit sphere.
pub fn fibonacci_sphere(n: usize) -> Vec<Vec3> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let (s, c) = (golden * i as f64).sin_cos();
            [rho * c, rho * s, z]
        })
        .collect()
}

/// `n` quasi-uniform points on the closed upper hemisphere `z >= 0`.
///
/// Enough for any search over measurement directions, since `k` and `-k`
/// describe the same measurement.
pub fn fibonacci_hemisphere(n: usize) -> Vec<Vec3> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (i as f64 + 0.5) / n as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let (s, c) = (golden * i as f64).sin_cos();
            [rho * c, rho * s, z]
        })
        .collect()
}

/// Post-measurement Bloch vectors for `n` Fibonacci directions, both outcomes each.
///
/// Outcomes of zero probability are left out.
pub fn sample_surface(b: &BlochDecomposition, n: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(2 * n);
    for k in fibonacci_sphere(n) {
        let k = ProjectiveDirection::normalized(k).expect("sphere points are nonzero");
        for sign in [1, -1] {
            if let Ok(pm) = post_measurement(b, &k, sign) {
                out.push(pm.r_out);
            }
        }
    }
    out
}

/// Distance from `r_A` to the line through `r_{A/+k}` and `r_{A/-k}`.
pub fn chord_deviation(b: &BlochDecomposition, k: &ProjectiveDirection) -> Result<f64> {
    let plus = post_measurement(b, k, 1)?.r_out;
    let minus = post_measurement(b, k, -1)?.r_out;
    let dir: Vec<f64> = plus.iter().zip(&minus).map(|(p, m)| p - m).collect();
    let len = norm(&dir);
    let rel: Vec<f64> = b.r_a().iter().zip(&minus).map(|(a, m)| a - m).collect();
    if len == 0.0 {
        return Ok(norm(&rel));
    }
    let t = dot(&rel, &dir) / (len * len);
    let off: Vec<f64> = rel.iter().zip(&dir).map(|(r, d)| r - t * d).collect();
    Ok(norm(&off))
}
