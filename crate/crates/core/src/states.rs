//! Qudit-qubit states in density-matrix and Fano-Bloch form.
//!
//! A state on `A (x) B`, `dim A = d_A`, `dim B = 2`, is written as
//!
//! ```text
//! rho = rho_A (x) rho_B + 1/(2 d_A) sum_{mu,nu} C[mu][nu] sigma_A[mu] (x) sigma_B[nu]
//! rho_A = (I + r_A . sigma_A) / d_A,   rho_B = (I + r_B . sigma_B) / 2
//! ```
//!
//! with `Tr sigma_A[mu] sigma_A[mu'] = d_A delta`. Matrices use the
//! computational basis `|a b>` with `A`'s index as the major one.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::smallalg::{self, norm, norm3, svd_tall, CMatrix, HermitianEigen, RMatrix, Svd3, Vec3};
use crate::tolerances;

/// Density matrices are plain Hermitian [`CMatrix`] values.
pub type DensityMatrix = CMatrix;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Traceless Hermitian generators `sigma_mu`, `mu = 0..d^2-1`, normalized
/// to `Tr sigma_mu sigma_nu = d delta_{mu nu}`.
///
/// Ordering: symmetric pairs `(j,k)`, `j < k`, then the antisymmetric pairs
/// in the same order, then the `d-1` diagonal generators. For `d = 2` this
/// is `(sigma_x, sigma_y, sigma_z)`.
#[derive(Debug, Clone)]
pub struct OperatorBasis {
    d: usize,
    generators: Vec<CMatrix>,
}

impl OperatorBasis {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        let scale = (d as f64 / 2.0).sqrt();
        let unit = |j: usize, k: usize, z: Complex64| {
            let mut m = CMatrix::zeros(d);
            m[(j, k)] = z;
            m
        };
        let mut generators = Vec::with_capacity(d * d - 1);
        for j in 0..d {
            for k in (j + 1)..d {
                let m = &unit(j, k, ONE) + &unit(k, j, ONE);
                generators.push(m.scale(scale));
            }
        }
        for j in 0..d {
            for k in (j + 1)..d {
                let m = &unit(j, k, -I) + &unit(k, j, I);
                generators.push(m.scale(scale));
            }
        }
        for l in 1..d {
            let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
            let mut m = CMatrix::zeros(d);
            for j in 0..l {
                m[(j, j)] = ONE;
            }
            m[(l, l)] = Complex64::new(-(l as f64), 0.0);
            generators.push(m.scale(norm * scale));
        }
        Ok(Self { d, generators })
    }

    /// Process-wide cached basis for dimension `d`.
    pub fn shared(d: usize) -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<OperatorBasis>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("basis cache poisoned");
        if let Some(b) = guard.get(&d) {
            return Ok(Arc::clone(b));
        }
        let b = Arc::new(Self::new(d)?);
        guard.insert(d, Arc::clone(&b));
        Ok(b)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Number of generators, `d^2 - 1`.
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    pub fn get(&self, mu: usize) -> &CMatrix {
        &self.generators[mu]
    }

    /// `(I + r . sigma) / d`.
    pub fn state_from_bloch(&self, r: &[f64]) -> CMatrix {
        assert_eq!(r.len(), self.len());
        let mut m = CMatrix::identity(self.d);
        for (g, &x) in self.generators.iter().zip(r) {
            if x != 0.0 {
                m = &m + &g.scale(x);
            }
        }
        m.scale(1.0 / self.d as f64)
    }

    /// `r_mu = Tr rho sigma_mu`.
    pub fn bloch_from_state(&self, rho: &CMatrix) -> Vec<f64> {
        self.generators.iter().map(|g| rho.trace_product(g).re).collect()
    }
}

/// Fano-Bloch form `(r_A, r_B, C)` of a qudit-qubit state.
#[derive(Debug, Clone)]
pub struct BlochDecomposition {
    d_a: usize,
    r_a: Vec<f64>,
    r_b: Vec3,
    c: RMatrix,
    basis: Arc<OperatorBasis>,
    rho_a_eigen: OnceLock<Result<HermitianEigen>>,
}

impl PartialEq for BlochDecomposition {
    fn eq(&self, other: &Self) -> bool {
        self.d_a == other.d_a && self.r_a == other.r_a && self.r_b == other.r_b && self.c == other.c
    }
}

impl BlochDecomposition {
    /// Validates shapes and the Bloch-length bounds `|r_B| <= 1`,
    /// `|r_A|^2 <= d_A - 1`.
    pub fn new(d_a: usize, r_a: Vec<f64>, r_b: Vec3, c: RMatrix) -> Result<Self> {
        let basis = OperatorBasis::shared(d_a)?;
        let big_d = basis.len();
        if r_a.len() != big_d {
            return Err(Error::DimensionMismatch { expected: big_d, found: r_a.len() });
        }
        if c.rows() != big_d {
            return Err(Error::DimensionMismatch { expected: big_d, found: c.rows() });
        }
        if c.cols() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, found: c.cols() });
        }
        let values = r_a.iter().chain(r_b.iter()).chain(c.as_slice());
        if values.clone().any(|x| !x.is_finite()) {
            return Err(Error::InvalidState("non-finite Bloch component".into()));
        }
        if norm3(&r_b) > 1.0 + 1e-10 {
            return Err(Error::InvalidState(format!("|r_B| = {} exceeds 1", norm3(&r_b))));
        }
        let ra2 = norm(&r_a).powi(2);
        if ra2 > (d_a - 1) as f64 + 1e-9 {
            return Err(Error::InvalidState(format!("|r_A|^2 = {ra2} exceeds d_A - 1")));
        }
        Ok(Self { d_a, r_a, r_b, c, basis, rho_a_eigen: OnceLock::new() })
    }

    /// Uncorrelated state `rho_A (x) rho_B`.
    pub fn product(d_a: usize, r_a: Vec<f64>, r_b: Vec3) -> Result<Self> {
        let big_d = d_a * d_a - 1;
        Self::new(d_a, r_a, r_b, RMatrix::zeros(big_d, 3))
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    /// Length of `r_A`, `D_A = d_A^2 - 1`.
    pub fn big_d(&self) -> usize {
        self.r_a.len()
    }

    pub fn r_a(&self) -> &[f64] {
        &self.r_a
    }

    pub fn r_b(&self) -> &Vec3 {
        &self.r_b
    }

    pub fn correlations(&self) -> &RMatrix {
        &self.c
    }

    pub fn basis(&self) -> &OperatorBasis {
        &self.basis
    }

    pub fn rho_a(&self) -> CMatrix {
        self.basis.state_from_bloch(&self.r_a)
    }

    /// Eigendecomposition of `rho_A`, computed once per value.
    pub fn rho_a_eigen(&self) -> Result<&HermitianEigen> {
        self.rho_a_eigen
            .get_or_init(|| smallalg::hermitian_eigen(&self.rho_a()))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn rho_b(&self) -> CMatrix {
        OperatorBasis::shared(2).expect("qubit basis").state_from_bloch(&self.r_b)
    }

    /// `|r_B| = 1`: one projective outcome along `r_B` has zero probability.
    pub fn is_boundary(&self) -> bool {
        norm3(&self.r_b) >= 1.0 - 1e-12
    }

    /// Same marginals with the correlation tensor multiplied by `eps`.
    ///
    /// For `eps` in `[0, 1]` this is the mixture `eps rho + (1 - eps) rho_A (x) rho_B`,
    /// hence again a valid state.
    pub fn with_scaled_correlations(&self, eps: f64) -> Self {
        Self { c: self.c.scale(eps), ..self.clone() }
    }

    /// Applies local rotations: `r_A -> R_A r_A`, `r_B -> R_B r_B`,
    /// `C -> R_A C R_B^T`. `R_A` is `D_A x D_A`, `R_B` is `3 x 3`.
    pub fn rotated(&self, rot_a: &RMatrix, rot_b: &RMatrix) -> Result<Self> {
        let big_d = self.big_d();
        if rot_a.rows() != big_d || rot_a.cols() != big_d {
            return Err(Error::DimensionMismatch { expected: big_d, found: rot_a.rows() });
        }
        if rot_b.rows() != 3 || rot_b.cols() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, found: rot_b.rows() });
        }
        let r_a = rot_a.matvec(&self.r_a);
        let rb = rot_b.matvec(&self.r_b);
        let c = &(rot_a * &self.c) * &rot_b.transpose();
        Self::new(self.d_a, r_a, [rb[0], rb[1], rb[2]], c)
    }

    /// Principal-axes frame of the correlation tensor.
    pub fn principal_frame(&self) -> Svd3 {
        svd_tall(&self.c).expect("correlation tensor has 3 columns")
    }

    pub fn to_density_matrix(&self) -> DensityMatrix {
        reconstruct(self)
    }

    pub fn check_positive(&self) -> Positivity {
        check_positive(&self.to_density_matrix())
    }
}

/// Reads off `(r_A, r_B, C)` from a density matrix on `d_A * 2` dimensions.
pub fn decompose(rho: &DensityMatrix, d_a: usize) -> Result<BlochDecomposition> {
    decompose_with(rho, d_a, tolerances::HERMITIAN)
}

/// [`decompose`] with an explicit Hermiticity tolerance.
pub fn decompose_with(rho: &DensityMatrix, d_a: usize, hermitian_tol: f64) -> Result<BlochDecomposition> {
    if d_a < 2 {
        return Err(Error::InvalidDimension(d_a));
    }
    if rho.dim() != 2 * d_a {
        return Err(Error::DimensionMismatch { expected: 2 * d_a, found: rho.dim() });
    }
    let dev = rho.hermitian_deviation();
    if dev > hermitian_tol {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let tr = rho.trace();
    if (tr - ONE).norm() > 1e-9 {
        return Err(Error::InvalidState(format!("trace {} differs from 1", tr.re)));
    }
    let basis_a = OperatorBasis::shared(d_a)?;
    let basis_b = OperatorBasis::shared(2)?;

    let rho_a = partial_trace_b(rho, d_a);
    let rho_b = partial_trace_a(rho, d_a);
    let r_a = basis_a.bloch_from_state(&rho_a);
    let rb = basis_b.bloch_from_state(&rho_b);
    let r_b = [rb[0], rb[1], rb[2]];

    let mut c = RMatrix::zeros(basis_a.len(), 3);
    for (mu, sa) in basis_a.generators().iter().enumerate() {
        for (nu, sb) in basis_b.generators().iter().enumerate() {
            let joint = rho.trace_product(&sa.kron(sb)).re;
            c[(mu, nu)] = joint - r_a[mu] * r_b[nu];
        }
    }
    BlochDecomposition::new(d_a, r_a, r_b, c)
}

/// Assembles the density matrix of a Bloch decomposition. Positivity is not
/// enforced; see [`check_positive`].
pub fn reconstruct(b: &BlochDecomposition) -> DensityMatrix {
    let basis_b = OperatorBasis::shared(2).expect("qubit basis");
    let mut rho = b.rho_a().kron(&b.rho_b());
    let w = 1.0 / (2.0 * b.d_a() as f64);
    for (mu, sa) in b.basis().generators().iter().enumerate() {
        for (nu, sb) in basis_b.generators().iter().enumerate() {
            let cmn = b.correlations()[(mu, nu)];
            if cmn != 0.0 {
                rho = &rho + &sa.kron(sb).scale(w * cmn);
            }
        }
    }
    rho
}

/// `Tr_B rho` for a `(d_a * 2)`-dimensional matrix.
pub fn partial_trace_b(rho: &CMatrix, d_a: usize) -> CMatrix {
    CMatrix::from_fn(d_a, |i, j| rho[(2 * i, 2 * j)] + rho[(2 * i + 1, 2 * j + 1)])
}

/// `Tr_A rho` for a `(d_a * 2)`-dimensional matrix.
pub fn partial_trace_a(rho: &CMatrix, d_a: usize) -> CMatrix {
    CMatrix::from_fn(2, |i, j| (0..d_a).map(|a| rho[(2 * a + i, 2 * a + j)]).sum())
}

/// Outcome of a positivity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Positivity {
    pub positive: bool,
    pub min_eigenvalue: f64,
}

pub fn check_positive(rho: &DensityMatrix) -> Positivity {
    check_positive_with(rho, tolerances::POSITIVITY)
}

/// Positive iff the smallest eigenvalue is at least `-tol`.
pub fn check_positive_with(rho: &DensityMatrix, tol: f64) -> Positivity {
    let min_eigenvalue = match smallalg::hermitian_eigenvalues(rho) {
        Ok(v) => v[0],
        Err(_) => f64::NEG_INFINITY,
    };
    Positivity { positive: min_eigenvalue >= -tol, min_eigenvalue }
}

/// Parameters of a two-qubit X state
/// `rho = (I + r_A sz(x)I + r_B I(x)sz + sum_mu J_mu s_mu(x)s_mu) / 4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XStateParams {
    pub r_a: f64,
    pub r_b: f64,
    pub j_x: f64,
    pub j_y: f64,
    pub j_z: f64,
}

/// Matrix elements of an X state in the standard basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XStateEntries {
    pub p_plus: f64,
    pub p_minus: f64,
    pub q_plus: f64,
    pub q_minus: f64,
    pub alpha_plus: f64,
    pub alpha_minus: f64,
}

impl XStateParams {
    pub fn new(r_a: f64, r_b: f64, j_x: f64, j_y: f64, j_z: f64) -> Self {
        Self { r_a, r_b, j_x, j_y, j_z }
    }

    pub fn entries(&self) -> XStateEntries {
        let Self { r_a, r_b, j_x, j_y, j_z } = *self;
        XStateEntries {
            p_plus: (1.0 + (r_a + r_b) + j_z) / 4.0,
            p_minus: (1.0 - (r_a + r_b) + j_z) / 4.0,
            q_plus: (1.0 + (r_a - r_b) - j_z) / 4.0,
            q_minus: (1.0 - (r_a - r_b) - j_z) / 4.0,
            alpha_plus: (j_x + j_y) / 4.0,
            alpha_minus: (j_x - j_y) / 4.0,
        }
    }

    /// Closed-form positivity: `p_+-, q_+- >= 0`, `|alpha_-| <= sqrt(p_+ p_-)`,
    /// `|alpha_+| <= sqrt(q_+ q_-)`, each to within `tol`.
    pub fn is_positive(&self, tol: f64) -> bool {
        let e = self.entries();
        let diag_ok = [e.p_plus, e.p_minus, e.q_plus, e.q_minus].iter().all(|&p| p >= -tol);
        diag_ok
            && e.alpha_minus * e.alpha_minus <= e.p_plus.max(0.0) * e.p_minus.max(0.0) + tol
            && e.alpha_plus * e.alpha_plus <= e.q_plus.max(0.0) * e.q_minus.max(0.0) + tol
    }

    /// The 4x4 density matrix in the basis `|00>, |01>, |10>, |11>`.
    pub fn matrix(&self) -> DensityMatrix {
        let e = self.entries();
        let r = |x: f64| Complex64::new(x, 0.0);
        let mut m = CMatrix::zeros(4);
        m[(0, 0)] = r(e.p_plus);
        m[(1, 1)] = r(e.q_plus);
        m[(2, 2)] = r(e.q_minus);
        m[(3, 3)] = r(e.p_minus);
        m[(0, 3)] = r(e.alpha_minus);
        m[(3, 0)] = r(e.alpha_minus);
        m[(1, 2)] = r(e.alpha_plus);
        m[(2, 1)] = r(e.alpha_plus);
        m
    }
}

/// Bloch form of an X state: `r_A = r_A z`, `r_B = r_B z`,
/// `C = diag(J_x, J_y, J_z - r_A r_B)`.
pub fn x_state(p: &XStateParams) -> Result<BlochDecomposition> {
    if !p.is_positive(1e-12) {
        return Err(Error::InvalidState(format!("X-state parameters violate positivity: {p:?}")));
    }
    let c = RMatrix::diag(&[p.j_x, p.j_y, p.j_z - p.r_a * p.r_b]);
    BlochDecomposition::new(2, vec![0.0, 0.0, p.r_a], [0.0, 0.0, p.r_b], c)
}

/// Bloch form of `sqrt(p)|00> + sqrt(1-p)|11>`.
pub fn schmidt_pure(p: f64) -> Result<BlochDecomposition> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(p, "Schmidt probability must lie in [0, 1]"));
    }
    let r = 2.0 * p - 1.0;
    let cx = 2.0 * (p * (1.0 - p)).sqrt();
    let c = RMatrix::diag(&[cx, -cx, 1.0 - r * r]);
    BlochDecomposition::new(2, vec![0.0, 0.0, r], [0.0, 0.0, r], c)
}
