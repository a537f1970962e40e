//! Measurement directions minimizing the conditional entropy.
//!
//! Three strategies sit behind [`Minimizer`]:
//!
//! - [`ExactQuadratic`]: the weighted eigenproblem `C^T C k = lambda N_B k`,
//!   exact at any correlation strength for the quadratic entropy.
//! - [`WeakCorrelation`]: `C^T Lambda_f C k = lambda N_B k` with the Hessian
//!   `Lambda_f(rho_A)`, a second-order expansion in `C`.
//! - [`SphereOracle`]: grid search over the hemisphere plus local refinement,
//!   valid for any entropic form.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::entropy::{bloch_entropy, quadratic_entropy_bloch, EntropicForm};
use crate::error::{Error, Result};
use crate::geometry::fibonacci_hemisphere;
use crate::measurement::{conditional_entropy, ProjectiveDirection};
use crate::smallalg::{
    self, canonical_sign, cross3, generalized_sym_eigen3, line_angle, norm3, normalize3,
    select_top, CMatrix, HermitianEigen, RMatrix, SymMat3, Vec3,
};
use crate::states::{BlochDecomposition, OperatorBasis};
use crate::tolerances;

/// Which strategy produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ExactQuadratic,
    WeakCorrelation,
    Oracle,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ExactQuadratic => "exact-quadratic",
            Method::WeakCorrelation => "weak-correlation",
            Method::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" | "exact-quadratic" => Ok(Method::ExactQuadratic),
            "weak" | "weak-correlation" => Ok(Method::WeakCorrelation),
            "oracle" => Ok(Method::Oracle),
            other => Err(Error::UnknownMethod(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    /// Optimal direction, sign fixed so its first nonzero component is positive.
    pub k_opt: Vec3,
    /// Largest weighted eigenvalue. For the oracle, `(d_A/2)(S_f(A) - s_min)`.
    pub lambda_max: f64,
    /// Minimal conditional entropy.
    pub s_min: f64,
    pub method: Method,
    /// The optimum is not unique (tied eigenvalues or tied oracle candidates).
    pub degenerate: bool,
    /// Distance from the top eigenvalue to the next one; `None` for the oracle.
    pub eigen_gap: Option<f64>,
}

/// Oracle search parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizerConfig {
    /// Points of the Fibonacci hemisphere grid.
    pub grid_n: usize,
    /// Angular resolution of the local refinement, in radians.
    pub angular_tol: f64,
    /// Number of separated grid minima that get refined.
    pub refine_candidates: usize,
}

impl Default for MinimizerConfig {
    fn default() -> Self {
        Self { grid_n: 2000, angular_tol: 1e-10, refine_candidates: 4 }
    }
}

/// A strategy for minimizing `S_f(A|B_k)` over `k`.
pub trait Minimizer: fmt::Debug + Send + Sync {
    fn method(&self) -> Method;
    fn minimize(&self, b: &BlochDecomposition, f: &dyn EntropicForm) -> Result<OptimizationResult>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ExactQuadratic;

impl Minimizer for ExactQuadratic {
    fn method(&self) -> Method {
        Method::ExactQuadratic
    }

    fn minimize(&self, b: &BlochDecomposition, f: &dyn EntropicForm) -> Result<OptimizationResult> {
        if !f.is_quadratic() {
            return Err(Error::Unsupported(format!(
                "exact minimization requires the quadratic entropy, got `{}`",
                f.name()
            )));
        }
        minimize_quadratic(b)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct WeakCorrelation;

impl Minimizer for WeakCorrelation {
    fn method(&self) -> Method {
        Method::WeakCorrelation
    }

    fn minimize(&self, b: &BlochDecomposition, f: &dyn EntropicForm) -> Result<OptimizationResult> {
        minimize_weak_correlation(b, f)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SphereOracle {
    pub config: MinimizerConfig,
}

impl Minimizer for SphereOracle {
    fn method(&self) -> Method {
        Method::Oracle
    }

    fn minimize(&self, b: &BlochDecomposition, f: &dyn EntropicForm) -> Result<OptimizationResult> {
        minimize_oracle(b, f, &self.config)
    }
}

type MinimizerCtor = Box<dyn Fn(&MinimizerConfig) -> Box<dyn Minimizer> + Send + Sync>;

/// Minimizers looked up by name: `exact`, `weak`, `oracle`.
pub struct MinimizerRegistry {
    entries: BTreeMap<String, MinimizerCtor>,
}

impl fmt::Debug for MinimizerRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MinimizerRegistry").field("names", &self.names()).finish()
    }
}

impl Default for MinimizerRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl MinimizerRegistry {
    pub fn empty() -> Self {
        Self { entries: BTreeMap::new() }
    }

    pub fn with_builtins() -> Self {
        let mut reg = Self::empty();
        reg.register("exact", |_| Box::new(ExactQuadratic));
        reg.register("weak", |_| Box::new(WeakCorrelation));
        reg.register("oracle", |c| Box::new(SphereOracle { config: *c }));
        reg
    }

    pub fn register<F>(&mut self, name: &str, ctor: F)
    where
        F: Fn(&MinimizerConfig) -> Box<dyn Minimizer> + Send + Sync + 'static,
    {
        self.entries.insert(name.to_ascii_lowercase(), Box::new(ctor));
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.keys().map(String::as_str).collect()
    }

    /// Accepts the registered names and the long method tags.
    pub fn get(&self, name: &str, config: &MinimizerConfig) -> Result<Box<dyn Minimizer>> {
        let key = name.trim().to_ascii_lowercase();
        let key = match key.as_str() {
            "exact-quadratic" => "exact".to_string(),
            "weak-correlation" => "weak".to_string(),
            _ => key,
        };
        self.entries
            .get(&key)
            .map(|ctor| ctor(config))
            .ok_or_else(|| Error::UnknownMethod(name.to_string()))
    }
}

// ---------------------------------------------------------------------------
// Hessian

/// `R_ij = (f'(p_i) - f'(p_j)) / (p_j - p_i)`, `-f''` on near-degenerate pairs.
pub(crate) fn divided_differences(spectrum: &[f64], f: &dyn EntropicForm) -> Result<RMatrix> {
    let p: Vec<f64> = spectrum
        .iter()
        .map(|&x| if x < tolerances::SPECTRUM_FLOOR { 0.0 } else { x })
        .collect();
    for &x in &p {
        if !(f.df(x).is_finite() && f.d2f(x).is_finite()) {
            return Err(Error::ApproximationInvalid(format!(
                "`{}` has no finite Hessian at eigenvalue {x:e}",
                f.name()
            )));
        }
    }
    Ok(RMatrix::from_fn(p.len(), p.len(), |i, j| {
        if (p[i] - p[j]).abs() < tolerances::NEAR_DEGENERATE_SPECTRUM {
            -f.d2f(0.5 * (p[i] + p[j]))
        } else {
            (f.df(p[i]) - f.df(p[j])) / (p[j] - p[i])
        }
    }))
}

/// `Lambda_{mu mu'} = 1/(4d) sum_ij R_ij <i|s_mu|j><j|s_mu'|i>` in the eigenbasis of `rho_A`.
pub fn hessian_from_eigen(
    eig: &HermitianEigen,
    basis: &OperatorBasis,
    f: &dyn EntropicForm,
) -> Result<RMatrix> {
    let d = basis.dim();
    if eig.values.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: eig.values.len() });
    }
    let r = divided_differences(&eig.values, f)?;
    let v = &eig.vectors;
    let vh = v.adjoint();
    let rotated: Vec<CMatrix> = basis.generators().iter().map(|s| &(&vh * s) * v).collect();
    let big_d = rotated.len();
    let w = 1.0 / (4.0 * d as f64);
    let mut lambda = RMatrix::zeros(big_d, big_d);
    for mu in 0..big_d {
        for nu in mu..big_d {
            let mut acc = 0.0;
            for i in 0..d {
                for j in 0..d {
                    let z: Complex64 = rotated[mu][(i, j)] * rotated[nu][(j, i)];
                    acc += r[(i, j)] * z.re;
                }
            }
            lambda[(mu, nu)] = w * acc;
            lambda[(nu, mu)] = w * acc;
        }
    }
    Ok(lambda)
}

/// Hessian of `S_f` at `rho_A` in the generator basis.
///
/// Fails with `ApproximationInvalid` when `f'` or `f''` diverges on the
/// spectrum (a rank-deficient `rho_A` for the von Neumann form).
pub fn hessian_general(rho_a: &CMatrix, basis: &OperatorBasis, f: &dyn EntropicForm) -> Result<RMatrix> {
    if rho_a.dim() != basis.dim() {
        return Err(Error::DimensionMismatch { expected: basis.dim(), found: rho_a.dim() });
    }
    hessian_from_eigen(&smallalg::hermitian_eigen(rho_a)?, basis, f)
}

/// `-(h_f'(r)/2r) [I + (eta_f(r) - 1) r r^T / r^2]`, with `|h_f''(0)|/2 I` at `r -> 0`.
pub fn hessian_two_qubit(r_a: &Vec3, f: &dyn EntropicForm) -> SymMat3 {
    let r = norm3(r_a);
    if r < 1e-8 {
        let a = 0.5 * f.d2h(0.0).abs();
        return SymMat3::diag([a, a, a]);
    }
    let a = -f.dh(r) / (2.0 * r);
    let e = f.eta(r) - 1.0;
    let u = [r_a[0] / r, r_a[1] / r, r_a[2] / r];
    SymMat3::new(
        a * (1.0 + e * u[0] * u[0]),
        a * (1.0 + e * u[1] * u[1]),
        a * (1.0 + e * u[2] * u[2]),
        a * e * u[0] * u[1],
        a * e * u[0] * u[2],
        a * e * u[1] * u[2],
    )
}

/// `Lambda_f(rho_A)` of a state, from the cached spectrum of `rho_A`.
pub fn state_hessian(b: &BlochDecomposition, f: &dyn EntropicForm) -> Result<RMatrix> {
    if f.is_quadratic() {
        return Ok(RMatrix::identity(b.big_d()));
    }
    hessian_from_eigen(b.rho_a_eigen()?, b.basis(), f)
}

/// `C^T Lambda C` as a symmetric 3x3 matrix.
///
/// This equals the restriction of `Lambda` to the span of `C`'s left
/// singular vectors, so no explicit projection is needed.
pub fn deformed_gram(c: &RMatrix, lambda: &RMatrix) -> SymMat3 {
    SymMat3::symmetrize(&(&(&c.transpose() * lambda) * c))
}

// ---------------------------------------------------------------------------
// Eigenproblem minimizers

fn solve_weighted(
    b: &BlochDecomposition,
    a: &SymMat3,
    s_a: f64,
    method: Method,
) -> Result<OptimizationResult> {
    if b.is_boundary() {
        return Err(Error::DegenerateQubit);
    }
    let pairs = generalized_sym_eigen3(a, &SymMat3::qubit_weight(b.r_b())).map_err(|e| match e {
        Error::SingularWeight { .. } => Error::DegenerateQubit,
        other => other,
    })?;
    let (top, degenerate) = select_top(&pairs, tolerances::DEGENERATE);
    let lambda_max = top.value.max(0.0);
    Ok(OptimizationResult {
        k_opt: top.vector,
        lambda_max,
        s_min: (s_a - 2.0 / b.d_a() as f64 * lambda_max).max(0.0),
        method,
        degenerate,
        eigen_gap: Some(pairs.get(1).map_or(f64::INFINITY, |p| pairs[0].value - p.value)),
    })
}

/// Solves `C^T C k = lambda N_B k`; `s_min = S_2(A) - (2/d_A) lambda_max`.
pub fn minimize_quadratic(b: &BlochDecomposition) -> Result<OptimizationResult> {
    let c = b.correlations();
    let a = SymMat3::symmetrize(&(&c.transpose() * c));
    let s_a = quadratic_entropy_bloch(b.r_a(), b.d_a());
    solve_weighted(b, &a, s_a, Method::ExactQuadratic)
}

/// Solves `C^T Lambda_f(rho_A) C k = lambda N_B k`; `s_min = S_f(A) - (2/d_A) lambda_max`.
pub fn minimize_weak_correlation(b: &BlochDecomposition, f: &dyn EntropicForm) -> Result<OptimizationResult> {
    let lambda = state_hessian(b, f)?;
    let a = deformed_gram(b.correlations(), &lambda);
    let s_a = bloch_entropy(b.r_a(), b.basis(), f)?;
    solve_weighted(b, &a, s_a, Method::WeakCorrelation)
}

/// Second-order estimate `(2/d_A) k^T C^T Lambda_f C k / k^T N_B k` of `Delta S_f`.
pub fn weak_entropy_decrease(
    b: &BlochDecomposition,
    k: &ProjectiveDirection,
    f: &dyn EntropicForm,
) -> Result<f64> {
    let lambda = state_hessian(b, f)?;
    let num = deformed_gram(b.correlations(), &lambda).quadratic_form(k.k());
    let den = SymMat3::qubit_weight(b.r_b()).quadratic_form(k.k());
    if num == 0.0 || den <= 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 / b.d_a() as f64 * num / den)
}

// ---------------------------------------------------------------------------
// Oracle

fn lex_cmp(a: &Vec3, b: &Vec3) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

fn canonical(k: Vec3) -> Vec3 {
    let mut k = k;
    canonical_sign(&mut k);
    k
}

/// Two unit vectors completing `k` to an orthonormal frame.
fn tangent_frame(k: &Vec3) -> (Vec3, Vec3) {
    let helper = if k[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = normalize3(&cross3(k, &helper)).expect("helper is not parallel to k");
    let e2 = cross3(k, &e1);
    (e1, e2)
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search of `g` on `[lo, hi]` down to width `tol`.
fn golden_section(g: &dyn Fn(f64) -> Result<f64>, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)> {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = g(c)?;
    let mut fd = g(d)?;
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = g(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = g(d)?;
        }
    }
    Ok(if fc <= fd { (c, fc) } else { (d, fd) })
}

/// Local minimization around `k0` in tangent coordinates.
///
/// The 2x2 Hessian is estimated by finite differences and the alternating
/// line searches run along its principal axes.
fn refine(
    objective: &(dyn Fn(&Vec3) -> Result<f64> + Sync),
    k0: Vec3,
    f0: f64,
    h: f64,
    tol: f64,
) -> Result<(f64, Vec3)> {
    let (e1, e2) = tangent_frame(&k0);
    let point = |u: f64, v: f64| {
        let p = [
            k0[0] + u * e1[0] + v * e2[0],
            k0[1] + u * e1[1] + v * e2[1],
            k0[2] + u * e1[2] + v * e2[2],
        ];
        normalize3(&p).expect("tangent offset keeps the point away from zero")
    };
    let g = |u: f64, v: f64| objective(&point(u, v));

    let s = 0.5 * h;
    let huu = (g(s, 0.0)? - 2.0 * f0 + g(-s, 0.0)?) / (s * s);
    let hvv = (g(0.0, s)? - 2.0 * f0 + g(0.0, -s)?) / (s * s);
    let huv = (g(s, s)? - g(s, -s)? - g(-s, s)? + g(-s, -s)?) / (4.0 * s * s);
    let theta = 0.5 * (2.0 * huv).atan2(huu - hvv);
    let (sn, cs) = theta.sin_cos();
    let axes = [[cs, sn], [-sn, cs]];

    let (mut cu, mut cv) = (0.0, 0.0);
    let mut best = f0;
    let mut width = 2.0 * h;
    for _ in 0..40 {
        let mut moved: f64 = 0.0;
        let mut hit_edge = false;
        for ax in &axes {
            let line = |t: f64| g(cu + t * ax[0], cv + t * ax[1]);
            let (t, val) = golden_section(&line, -width, width, tol)?;
            if val < best {
                cu += t * ax[0];
                cv += t * ax[1];
                best = val;
                moved = moved.max(t.abs());
                hit_edge |= t.abs() > 0.9 * width;
            }
        }
        if hit_edge {
            width *= 2.0;
            continue;
        }
        if moved <= tol {
            break;
        }
        width = (4.0 * moved).clamp(10.0 * tol, width);
    }
    Ok((best, point(cu, cv)))
}

/// Grid search over a Fibonacci hemisphere followed by local refinement.
///
/// Grid evaluation runs on the rayon pool; the reduction orders by value
/// and then lexicographically by `k`, so the result does not depend on the
/// number of workers.
pub fn minimize_oracle(
    b: &BlochDecomposition,
    f: &dyn EntropicForm,
    config: &MinimizerConfig,
) -> Result<OptimizationResult> {
    let objective = |k: &Vec3| -> Result<f64> {
        conditional_entropy(b, &ProjectiveDirection::normalized(*k)?, f)
    };
    oracle_search(&objective, config).and_then(|(s_min, k_opt, degenerate)| {
        let s_a = bloch_entropy(b.r_a(), b.basis(), f)?;
        Ok(OptimizationResult {
            k_opt,
            lambda_max: (b.d_a() as f64 / 2.0 * (s_a - s_min)).max(0.0),
            s_min,
            method: Method::Oracle,
            degenerate,
            eigen_gap: None,
        })
    })
}

/// Global minimum of an even function on the unit sphere.
pub fn oracle_search(
    objective: &(dyn Fn(&Vec3) -> Result<f64> + Sync),
    config: &MinimizerConfig,
) -> Result<(f64, Vec3, bool)> {
    let n = config.grid_n.max(1);
    let grid = fibonacci_hemisphere(n);
    let values: Vec<f64> = grid.par_iter().map(objective).collect::<Result<_>>()?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then_with(|| lex_cmp(&grid[i], &grid[j])));

    // Refine several well-separated grid minima; separation is two grid spacings.
    let spacing = (2.0 * std::f64::consts::PI / n as f64).sqrt();
    let mut seeds: Vec<usize> = Vec::new();
    for &i in &order {
        if seeds.len() >= config.refine_candidates.max(1) {
            break;
        }
        if seeds.iter().all(|&s| line_angle(&grid[s], &grid[i]) > 2.0 * spacing) {
            seeds.push(i);
        }
    }

    let refined: Vec<(f64, Vec3)> = seeds
        .par_iter()
        .map(|&i| {
            refine(objective, grid[i], values[i], spacing, config.angular_tol)
                .map(|(v, k)| (v, canonical(k)))
        })
        .collect::<Result<_>>()?;

    let (best_v, best_k) = refined
        .iter()
        .copied()
        .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| lex_cmp(&a.1, &b.1)))
        .expect("at least one seed");
    let tie = 1e-12 * best_v.abs().max(1.0);
    let degenerate = refined
        .iter()
        .any(|(v, k)| *v <= best_v + tie && line_angle(k, &best_k) > 1e-3);
    Ok((best_v, best_k, degenerate))
}

// ---------------------------------------------------------------------------
// States aligned with the principal axes

/// Axis-aligned two-qubit data: diagonal `C` and `r_A`, `r_B` along coordinate axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignedAxes {
    /// Diagonal of `C`.
    pub c: Vec3,
    /// Signed length of `r_A` and the axis it lies on (`None` when zero).
    pub r_a: f64,
    pub a_axis: Option<usize>,
    pub r_b: f64,
    pub b_axis: Option<usize>,
}

const ALIGNMENT_TOL: f64 = 1e-10;

fn single_axis(v: &[f64], what: &str) -> Result<(f64, Option<usize>)> {
    let nonzero: Vec<usize> = (0..3).filter(|&i| v[i].abs() > ALIGNMENT_TOL).collect();
    match nonzero.as_slice() {
        [] => Ok((0.0, None)),
        [i] => Ok((v[*i], Some(*i))),
        _ => Err(Error::AlignmentViolated(format!("{what} is not along a coordinate axis"))),
    }
}

impl AlignedAxes {
    pub fn from_state(b: &BlochDecomposition) -> Result<Self> {
        if b.d_a() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: b.d_a() });
        }
        let c = b.correlations();
        for i in 0..3 {
            for j in 0..3 {
                if i != j && c[(i, j)].abs() > ALIGNMENT_TOL {
                    return Err(Error::AlignmentViolated(format!("C[{i}][{j}] = {:e}", c[(i, j)])));
                }
            }
        }
        let (r_a, a_axis) = single_axis(b.r_a(), "r_A")?;
        let (r_b, b_axis) = single_axis(b.r_b(), "r_B")?;
        Ok(Self { c: [c[(0, 0)], c[(1, 1)], c[(2, 2)]], r_a, a_axis, r_b, b_axis })
    }

    /// `|h_f'(r_A)| / (2 r_A)`, or `|h_f''(0)|/2` at `r_A = 0`.
    fn prefactor(&self, f: &dyn EntropicForm) -> f64 {
        let r = self.r_a.abs();
        if r < 1e-8 {
            0.5 * f.d2h(0.0).abs()
        } else {
            f.dh(r).abs() / (2.0 * r)
        }
    }

    fn weight(&self, f: &dyn EntropicForm, mu: usize) -> f64 {
        if self.a_axis == Some(mu) {
            f.eta(self.r_a.abs())
        } else {
            1.0
        }
    }

    fn normalization(&self, mu: usize) -> f64 {
        if self.b_axis == Some(mu) {
            1.0 - self.r_b * self.r_b
        } else {
            1.0
        }
    }
}

/// Closed-form weak-correlation `Delta S_f` for axis-aligned two-qubit states.
///
/// Covers both `r_A` parallel and perpendicular to `r_B`:
/// `|h'(r_A)|/(2 r_A) sum_mu w_mu C_mu^2 k_mu^2 / (1 - r_B^2 k_b^2)` with
/// `w = eta_f(r_A)` on the axis of `r_A` and 1 elsewhere.
pub fn aligned_axes_decrease(b: &BlochDecomposition, f: &dyn EntropicForm, k: &ProjectiveDirection) -> Result<f64> {
    let ax = AlignedAxes::from_state(b)?;
    let k = k.k();
    let num: f64 = (0..3).map(|mu| ax.weight(f, mu) * (ax.c[mu] * k[mu]).powi(2)).sum();
    let kb = ax.b_axis.map_or(0.0, |i| k[i]);
    let den = 1.0 - (ax.r_b * kb).powi(2);
    if num == 0.0 {
        return Ok(0.0);
    }
    Ok(ax.prefactor(f) * num / den)
}

/// Maximum of [`aligned_axes_decrease`] over `k` and the axis attaining it.
///
/// The optimum always lies on a principal axis; ties go to the lowest index.
pub fn aligned_axes_max(b: &BlochDecomposition, f: &dyn EntropicForm) -> Result<(f64, usize)> {
    let ax = AlignedAxes::from_state(b)?;
    let pre = ax.prefactor(f);
    let mut best = (f64::NEG_INFINITY, 0);
    for mu in 0..3 {
        let v = pre * ax.weight(f, mu) * ax.c[mu].powi(2) / ax.normalization(mu);
        if v > best.0 {
            best = (v, mu);
        }
    }
    Ok(best)
}

/// Explicit von Neumann form for `r_A`, `r_B` both along `z`:
/// `[atanh(r_A)/r_A (C_x^2 k_x^2 + C_y^2 k_y^2) + C_z^2 k_z^2/(1 - r_A^2)] / (2 ln2 (1 - r_B^2 k_z^2))`.
pub fn vn_z_aligned_decrease(b: &BlochDecomposition, k: &ProjectiveDirection) -> Result<f64> {
    let ax = AlignedAxes::from_state(b)?;
    if ax.a_axis.is_some_and(|i| i != 2) || ax.b_axis.is_some_and(|i| i != 2) {
        return Err(Error::AlignmentViolated("r_A and r_B must lie along z".into()));
    }
    let k = k.k();
    let r = ax.r_a.abs();
    let ratio = if r < 1e-8 { 1.0 } else { r.atanh() / r };
    let num = ratio * ((ax.c[0] * k[0]).powi(2) + (ax.c[1] * k[1]).powi(2))
        + (ax.c[2] * k[2]).powi(2) / (1.0 - r * r);
    Ok(num / (2.0 * std::f64::consts::LN_2 * (1.0 - (ax.r_b * k[2]).powi(2))))
}
