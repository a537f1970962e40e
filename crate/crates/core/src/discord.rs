//! Quantum discord and its weak-correlation approximations.
//!
//! `D(A|B_k) = S(A|B_k) - [S(rho_AB) - S(rho_B)] = I(A,B) - Delta S(A|B_k)`,
//! von Neumann entropies throughout. The exact value minimizes over
//! projective directions with the sphere oracle; the weak estimate uses the
//! Hessian-weighted eigenproblem.

use std::f64::consts::{LN_2, PI};
use std::fmt;

use rayon::prelude::*;

use crate::entropy::{bloch_entropy, entropy_of, EntropicForm, VonNeumann};
use crate::error::{Error, Result};
use crate::measurement::{
    conditional_entropy, entropy_decrease, quadratic_entropy_decrease, ProjectiveDirection,
};
use crate::optimizer::{
    divided_differences, minimize_oracle, minimize_quadratic, minimize_weak_correlation,
    vn_z_aligned_decrease, weak_entropy_decrease, AlignedAxes, MinimizerConfig,
};
use crate::smallalg::{self, dot3, CMatrix, Vec3};
use crate::states::{x_state, BlochDecomposition, OperatorBasis, XStateParams};
use crate::tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscordMethod {
    ExactOracle,
    WeakCorrelation,
}

impl DiscordMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            DiscordMethod::ExactOracle => "exact-oracle",
            DiscordMethod::WeakCorrelation => "weak-correlation",
        }
    }
}

impl fmt::Display for DiscordMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscordResult {
    pub discord: f64,
    pub mutual_info: f64,
    pub k_opt: Vec3,
    pub method: DiscordMethod,
    /// The optimal direction is farther than the crossover angle from every
    /// principal axis of `C`.
    pub crossover: bool,
    pub degenerate: bool,
}

/// `S(rho_AB)`, von Neumann.
pub fn joint_entropy(b: &BlochDecomposition) -> Result<f64> {
    entropy_of(&b.to_density_matrix(), &VonNeumann)
}

/// `I(A,B) = S(rho_A) + S(rho_B) - S(rho_AB)`.
pub fn mutual_information(b: &BlochDecomposition) -> Result<f64> {
    let s_a = bloch_entropy(b.r_a(), b.basis(), &VonNeumann)?;
    let s_b = VonNeumann.h(smallalg::norm3(b.r_b()).min(1.0));
    Ok((s_a + s_b - joint_entropy(b)?).max(0.0))
}

/// Angle between `k` and the nearest principal axis of `C`.
///
/// Right singular vectors with singular values closer than the degeneracy
/// tolerance span a principal subspace; the angle to that subspace is used.
pub fn principal_axis_angle(b: &BlochDecomposition, k: &Vec3) -> f64 {
    let svd = b.principal_frame();
    let s = svd.singular_values;
    let mut best = f64::INFINITY;
    let mut start = 0;
    while start < 3 {
        let mut end = start + 1;
        while end < 3 && (s[end - 1] - s[end]).abs() <= tolerances::DEGENERATE {
            end += 1;
        }
        let proj2: f64 = (start..end).map(|j| dot3(k, &svd.right_vector(j)).powi(2)).sum();
        let proj = proj2.min(1.0).sqrt();
        best = best.min((1.0 - proj2).max(0.0).sqrt().atan2(proj));
        start = end;
    }
    best
}

/// Discord minimized over projective directions with the sphere oracle.
pub fn discord_exact(
    b: &BlochDecomposition,
    config: &MinimizerConfig,
    crossover_angle: f64,
) -> Result<DiscordResult> {
    let opt = minimize_oracle(b, &VonNeumann, config)?;
    let s_b = VonNeumann.h(smallalg::norm3(b.r_b()).min(1.0));
    let quantum_conditional = joint_entropy(b)? - s_b;
    Ok(DiscordResult {
        discord: opt.s_min - quantum_conditional,
        mutual_info: mutual_information(b)?,
        k_opt: opt.k_opt,
        method: DiscordMethod::ExactOracle,
        crossover: principal_axis_angle(b, &opt.k_opt) > crossover_angle,
        degenerate: opt.degenerate,
    })
}

/// `I(A,B) - (2/d_A) lambda_max` with `lambda_max` from the von Neumann Hessian problem.
pub fn discord_weak(b: &BlochDecomposition) -> Result<DiscordResult> {
    let opt = minimize_weak_correlation(b, &VonNeumann)?;
    let mutual_info = mutual_information(b)?;
    Ok(DiscordResult {
        discord: mutual_info - 2.0 / b.d_a() as f64 * opt.lambda_max,
        mutual_info,
        k_opt: opt.k_opt,
        method: DiscordMethod::WeakCorrelation,
        crossover: false,
        degenerate: opt.degenerate,
    })
}

/// Second-order expansion of `I(A,B)` in `C` around `rho_A (x) rho_B`:
/// `1/2 sum_{IJ} R_IJ |delta_IJ|^2` in the product eigenbasis, with
/// `R_IJ = ln(P_I/P_J) / ((P_I - P_J) ln 2)` and `1/(P ln 2)` on the diagonal.
pub fn mutual_info_quadratic(b: &BlochDecomposition) -> Result<f64> {
    let d = b.d_a();
    let eig_a = b.rho_a_eigen()?;
    let eig_b = smallalg::hermitian_eigen(&b.rho_b())?;
    let mut product = Vec::with_capacity(2 * d);
    for pa in &eig_a.values {
        for pb in &eig_b.values {
            product.push(pa * pb);
        }
    }
    let r = divided_differences(&product, &VonNeumann)?;

    let basis_b = OperatorBasis::shared(2)?;
    let rot = |v: &CMatrix, s: &CMatrix| &(&v.adjoint() * s) * v;
    let sa: Vec<CMatrix> = b.basis().generators().iter().map(|s| rot(&eig_a.vectors, s)).collect();
    let sb: Vec<CMatrix> = basis_b.generators().iter().map(|s| rot(&eig_b.vectors, s)).collect();
    let c = b.correlations();
    let mut delta = CMatrix::zeros(2 * d);
    for (mu, a) in sa.iter().enumerate() {
        for (nu, bb) in sb.iter().enumerate() {
            if c[(mu, nu)] != 0.0 {
                delta = &delta + &a.kron(bb).scale(c[(mu, nu)] / (2.0 * d as f64));
            }
        }
    }
    let mut total = 0.0;
    for i in 0..2 * d {
        for j in 0..2 * d {
            total += r[(i, j)] * delta[(i, j)].norm_sqr();
        }
    }
    Ok(0.5 * total)
}

fn require_z_aligned(b: &BlochDecomposition) -> Result<AlignedAxes> {
    let ax = AlignedAxes::from_state(b)?;
    if ax.a_axis.is_some_and(|i| i != 2) || ax.b_axis.is_some_and(|i| i != 2) {
        return Err(Error::AlignmentViolated("r_A and r_B must lie along z".into()));
    }
    Ok(ax)
}

/// `(atanh a + atanh s) / (2 (a + s))`, continuous through `a = -s`.
fn atanh_pair(a: f64, s: f64) -> f64 {
    if (a + s).abs() < 1e-8 {
        0.5 / (1.0 - a * a)
    } else {
        (a.atanh() + s.atanh()) / (2.0 * (a + s))
    }
}

/// Closed form of [`mutual_info_quadratic`] for z-aligned two-qubit states:
///
/// ```text
/// I ~ 1/(2 ln2) [ sum_{v=+-1} (C_x - v C_y)^2 ln((1+r_A)(1+v r_B)/((1-r_A)(1-v r_B))) / (4 (r_A + v r_B))
///                 + C_z^2 / ((1 - r_A^2)(1 - r_B^2)) ]
/// ```
pub fn mutual_info_quadratic_z_aligned(b: &BlochDecomposition) -> Result<f64> {
    let ax = require_z_aligned(b)?;
    let [cx, cy, cz] = ax.c;
    let (ra, rb) = (ax.r_a, ax.r_b);
    let transverse: f64 = [1.0, -1.0].iter().map(|&v: &f64| (cx - v * cy).powi(2) * atanh_pair(ra, v * rb)).sum();
    let longitudinal = cz * cz / ((1.0 - ra * ra) * (1.0 - rb * rb));
    Ok((transverse + longitudinal) / (2.0 * LN_2))
}

/// `D(A|B_k)` to second order for a z-aligned two-qubit state.
pub fn discord_quadratic_form(b: &BlochDecomposition, k: &ProjectiveDirection) -> Result<f64> {
    Ok(mutual_info_quadratic_z_aligned(b)? - vn_z_aligned_decrease(b, k)?)
}

/// Critical `C_x^2 / C_z^2` where the optimal axis of a `J_x = J_y` X state
/// switches between `z` and the `xy` plane: `eta_f(r_A) / (1 - r_B^2)`.
pub fn transition_zone(r_a: f64, r_b: f64, f: &dyn EntropicForm) -> Result<f64> {
    if r_b.is_nan() || r_b.abs() >= 1.0 {
        return Err(Error::Domain(r_b, "transition zone requires |r_B| < 1"));
    }
    let eta = crate::entropy::eta_f(r_a.abs(), f)?;
    Ok(eta / (1.0 - r_b * r_b))
}

// ---------------------------------------------------------------------------
// X-state sector scan

/// Which axis the quadratic and von Neumann optima select.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SectorLabel {
    /// Both optima lie in the `xy` plane.
    A,
    /// Both optima lie along `z`.
    B,
    /// Quadratic optimum in the plane, von Neumann optimum off it.
    C,
    /// Quadratic optimum along `z`, von Neumann optimum off it.
    D,
    /// Parameters violate positivity.
    Invalid,
}

impl SectorLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            SectorLabel::A => "A",
            SectorLabel::B => "B",
            SectorLabel::C => "C",
            SectorLabel::D => "D",
            SectorLabel::Invalid => "invalid",
        }
    }
}

impl fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Evenly spaced values `min..=max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl GridAxis {
    pub fn new(min: f64, max: f64, n: usize) -> Self {
        Self { min, max, n }
    }

    pub fn values(&self) -> Vec<f64> {
        match self.n {
            0 => Vec::new(),
            1 => vec![self.min],
            n => (0..n).map(|i| self.min + (self.max - self.min) * i as f64 / (n - 1) as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorScan {
    pub r_b: f64,
    pub j_z: f64,
    pub r_a: GridAxis,
    pub j_x: GridAxis,
    pub oracle: MinimizerConfig,
    pub crossover_angle: f64,
}

impl SectorScan {
    /// 100 x 100 grid over `r_A, J_x` in `[0, 0.99]`.
    pub fn new(r_b: f64, j_z: f64) -> Self {
        Self {
            r_b,
            j_z,
            r_a: GridAxis::new(0.0, 0.99, 100),
            j_x: GridAxis::new(0.0, 0.99, 100),
            oracle: MinimizerConfig::default(),
            crossover_angle: tolerances::CROSSOVER_ANGLE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorPoint {
    pub r_a: f64,
    pub j_x: f64,
    pub label: SectorLabel,
    /// The von Neumann optimum is neither along `z` nor in the plane.
    pub crossover: bool,
}

/// Classifies the `J_x = J_y` X state with the given parameters.
pub fn classify_x_state(
    p: &XStateParams,
    oracle: &MinimizerConfig,
    crossover_angle: f64,
) -> Result<(SectorLabel, bool)> {
    if !p.is_positive(1e-12) || p.r_b.abs() >= 1.0 {
        return Ok((SectorLabel::Invalid, false));
    }
    let b = x_state(p)?;
    let z = ProjectiveDirection::z();

    let quad = minimize_quadratic(&b)?;
    let quad_z = quadratic_entropy_decrease(&b, &z) >= quad.lambda_max - 1e-12;

    let vn = minimize_oracle(&b, &VonNeumann, oracle)?;
    let vn_z = conditional_entropy(&b, &z, &VonNeumann)? <= vn.s_min + 1e-12;
    let vn_plane = vn.k_opt[2].abs().min(1.0).asin() < crossover_angle;
    let crossover = !vn_z && !vn_plane;

    let label = match (quad_z, vn_z) {
        (true, true) => SectorLabel::B,
        (false, false) if vn_plane => SectorLabel::A,
        (false, _) => SectorLabel::C,
        (true, false) => SectorLabel::D,
    };
    Ok((label, crossover))
}

/// Sector labels over the `(r_A, J_x)` grid, ordered by `r_A` then `J_x`.
///
/// Points are evaluated in parallel; the order of the output does not depend
/// on the number of workers.
pub fn sector_scan(scan: &SectorScan) -> Result<Vec<SectorPoint>> {
    let r_as = scan.r_a.values();
    let j_xs = scan.j_x.values();
    let points: Vec<(f64, f64)> = r_as.iter().flat_map(|&ra| j_xs.iter().map(move |&jx| (ra, jx))).collect();
    points
        .par_iter()
        .map(|&(r_a, j_x)| {
            let p = XStateParams::new(r_a, scan.r_b, j_x, j_x, scan.j_z);
            let (label, crossover) = classify_x_state(&p, &scan.oracle, scan.crossover_angle)?;
            Ok(SectorPoint { r_a, j_x, label, crossover })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Entropy profiles along k = (sin t, 0, cos t)

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRow {
    pub theta: f64,
    pub ds_quad: f64,
    pub ds_vn: f64,
    /// Second-order estimate of `ds_vn`.
    pub ds_vn_weak: f64,
    pub discord: f64,
    /// Second-order estimate of `discord`.
    pub discord_quad: f64,
    /// Exact `Delta S_f` for each extra form requested.
    pub extra: Vec<f64>,
}

/// `steps + 1` rows with `theta = 2 pi i / steps`.
///
/// The estimates use the explicit z-aligned expressions when `r_A`, `r_B`
/// lie along `z` and `C` is diagonal, and the generic Hessian forms otherwise.
pub fn profile(
    b: &BlochDecomposition,
    steps: usize,
    extra: &[&dyn EntropicForm],
) -> Result<Vec<ProfileRow>> {
    if b.d_a() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: b.d_a() });
    }
    let steps = steps.max(1);
    let aligned = require_z_aligned(b).is_ok();
    let mi = mutual_information(b)?;
    let mi_quad = if aligned { mutual_info_quadratic_z_aligned(b)? } else { mutual_info_quadratic(b)? };
    (0..=steps)
        .map(|i| {
            let theta = 2.0 * PI * i as f64 / steps as f64;
            let k = ProjectiveDirection::from_angles(theta, 0.0);
            let ds_vn = entropy_decrease(b, &k, &VonNeumann)?;
            let ds_vn_weak = if aligned {
                vn_z_aligned_decrease(b, &k)?
            } else {
                weak_entropy_decrease(b, &k, &VonNeumann)?
            };
            let extra = extra.iter().map(|f| entropy_decrease(b, &k, *f)).collect::<Result<_>>()?;
            Ok(ProfileRow {
                theta,
                ds_quad: quadratic_entropy_decrease(b, &k),
                ds_vn,
                ds_vn_weak,
                discord: mi - ds_vn,
                discord_quad: mi_quad - ds_vn_weak,
                extra,
            })
        })
        .collect()
}
