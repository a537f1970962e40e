//! Dense linear algebra on small matrices.
//!
//! Everything here is sized for qudit-qubit work: complex Hermitian matrices
//! up to a few tens of rows, real `D_A x 3` correlation tensors and 3x3
//! symmetric weight matrices. Eigenproblems are solved with cyclic Jacobi
//! rotations.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

pub use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerances;

/// A real 3-vector.
pub type Vec3 = [f64; 3];

const MAX_SWEEPS: usize = 100;

pub fn dot3(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm3(a: &Vec3) -> f64 {
    dot3(a, a).sqrt()
}

pub fn scale3(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn cross3(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Unit vector along `a`, or `None` for the zero vector.
pub fn normalize3(a: &Vec3) -> Option<Vec3> {
    let n = norm3(a);
    (n > 0.0).then(|| scale3(a, 1.0 / n))
}

/// Angle between the lines spanned by `a` and `b`, in `[0, pi/2]`.
///
/// Measurement directions `k` and `-k` describe the same measurement, so
/// this is the natural distance between them.
pub fn line_angle(a: &Vec3, b: &Vec3) -> f64 {
    let c = (dot3(a, b) / (norm3(a) * norm3(b))).abs().min(1.0);
    // acos loses precision near 1; the cross product keeps small angles accurate
    let s = norm3(&cross3(a, b)) / (norm3(a) * norm3(b));
    s.atan2(c)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Flip `v` so that its first component with magnitude above `1e-12` is positive.
pub fn canonical_sign(v: &mut [f64]) {
    if let Some(&first) = v.iter().find(|x| x.abs() > 1e-12) {
        if first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

fn lexicographic_gt(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return true;
        }
        if x < y {
            return false;
        }
    }
    false
}

// ---------------------------------------------------------------------------
// Real dense matrix

/// Row-major real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from rows; every row must have the same length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch { expected: cols, found: bad.len() });
        }
        Ok(Self::from_fn(rows.len(), cols, |i, j| rows[i][j]))
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { 0.0 })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `C k` for a `rows x 3` matrix.
    pub fn apply3(&self, k: &Vec3) -> Vec<f64> {
        self.matvec(k)
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm(&self.data)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0.0)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

impl Index<(usize, usize)> for RMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &RMatrix {
    type Output = RMatrix;
    fn mul(self, rhs: &RMatrix) -> RMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = RMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &RMatrix {
    type Output = RMatrix;
    fn add(self, rhs: &RMatrix) -> RMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &RMatrix {
    type Output = RMatrix;
    fn sub(self, rhs: &RMatrix) -> RMatrix {
        self + &rhs.scale(-1.0)
    }
}

// ---------------------------------------------------------------------------
// Complex dense matrix

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from `dim * dim` row-major entries.
    pub fn from_row_major(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: entries.len() });
        }
        Ok(Self { dim, data: entries })
    }

    pub fn from_real(m: &RMatrix) -> Self {
        assert_eq!(m.rows(), m.cols());
        Self::from_fn(m.rows(), |i, j| Complex64::new(m[(i, j)], 0.0))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    /// Kronecker product `self (x) rhs`, with `self`'s index as the major one.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (m, n) = (self.dim, rhs.dim);
        Self::from_fn(m * n, |i, j| self[(i / n, j / n)] * rhs[(i % n, j % n)])
    }

    /// `Tr(self * rhs)` without forming the product.
    pub fn trace_product(&self, rhs: &Self) -> Complex64 {
        let n = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self[(i, j)] * rhs[(j, i)];
            }
        }
        acc
    }

    /// Largest entry of `|M - M^H|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

// ---------------------------------------------------------------------------
// Symmetric 3x3

/// Real symmetric 3x3 matrix stored as its six independent entries
/// `(xx, yy, zz, xy, xz, yz)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymMat3 {
    entries: [f64; 6],
}

impl SymMat3 {
    pub fn new(xx: f64, yy: f64, zz: f64, xy: f64, xz: f64, yz: f64) -> Self {
        Self { entries: [xx, yy, zz, xy, xz, yz] }
    }

    pub fn identity() -> Self {
        Self::diag([1.0, 1.0, 1.0])
    }

    pub fn diag(d: Vec3) -> Self {
        Self::new(d[0], d[1], d[2], 0.0, 0.0, 0.0)
    }

    /// Symmetric part `(M + M^T)/2` of a 3x3 matrix.
    pub fn symmetrize(m: &RMatrix) -> Self {
        assert_eq!((m.rows(), m.cols()), (3, 3));
        let s = |i, j| 0.5 * (m[(i, j)] + m[(j, i)]);
        Self::new(s(0, 0), s(1, 1), s(2, 2), s(0, 1), s(0, 2), s(1, 2))
    }

    /// `N = I - r r^T`.
    pub fn qubit_weight(r: &Vec3) -> Self {
        Self::new(
            1.0 - r[0] * r[0],
            1.0 - r[1] * r[1],
            1.0 - r[2] * r[2],
            -r[0] * r[1],
            -r[0] * r[2],
            -r[1] * r[2],
        )
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let e = &self.entries;
        match (i.min(j), i.max(j)) {
            (0, 0) => e[0],
            (1, 1) => e[1],
            (2, 2) => e[2],
            (0, 1) => e[3],
            (0, 2) => e[4],
            (1, 2) => e[5],
            _ => panic!("index ({i}, {j}) out of range for a 3x3 matrix"),
        }
    }

    pub fn to_matrix(&self) -> RMatrix {
        RMatrix::from_fn(3, 3, |i, j| self.get(i, j))
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|j| self.get(i, j) * v[j]).sum();
        }
        out
    }

    /// `v^T M v`.
    pub fn quadratic_form(&self, v: &Vec3) -> f64 {
        dot3(v, &self.apply(v))
    }
}

// ---------------------------------------------------------------------------
// Eigenproblems

/// Spectrum of a Hermitian matrix: ascending eigenvalues and the matching
/// orthonormal eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, i: usize) -> Vec<Complex64> {
        self.vectors.column(i)
    }
}

/// Spectrum of a real symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: RMatrix,
}

/// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.
pub fn hermitian_eigen(m: &CMatrix) -> Result<HermitianEigen> {
    check_hermitian(m, tolerances::HERMITIAN)?;
    let (values, vectors) = jacobi(m, true)?;
    Ok(HermitianEigen { values, vectors: vectors.expect("vectors requested") })
}

/// Eigenvalues only (ascending); skips accumulating the rotations.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    check_hermitian(m, tolerances::HERMITIAN)?;
    Ok(jacobi(m, false)?.0)
}

/// Eigen-decomposition of a real symmetric matrix.
pub fn sym_eigen(m: &RMatrix) -> Result<SymEigen> {
    if m.rows() != m.cols() {
        return Err(Error::DimensionMismatch { expected: m.rows(), found: m.cols() });
    }
    let asym = m.max_abs_diff(&m.transpose());
    if asym > tolerances::HERMITIAN {
        return Err(Error::NotHermitian { deviation: asym });
    }
    // Real input keeps every rotation phase at +-1, so the vectors stay real.
    let (values, vectors) = jacobi(&CMatrix::from_real(m), true)?;
    let vectors = vectors.expect("vectors requested");
    let n = m.rows();
    Ok(SymEigen { values, vectors: RMatrix::from_fn(n, n, |i, j| vectors[(i, j)].re) })
}

fn check_hermitian(m: &CMatrix, tol: f64) -> Result<()> {
    let deviation = m.hermitian_deviation();
    if deviation > tol {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

fn jacobi(m: &CMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<CMatrix>)> {
    let n = m.dim();
    let mut a = m.clone();
    // Symmetrize away the tolerated Hermitian noise.
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = 0.5 * (a[(i, j)] + a[(j, i)].conj());
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut w = want_vectors.then(|| CMatrix::identity(n));
    let total: f64 = a.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let off_norm = |a: &CMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = total == 0.0;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        if off_norm(&a) <= 1e-15 * total {
            converged = true;
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let phase = apq / mag;
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
                    if theta < 0.0 { -t } else { t }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let sc = phase.conj() * s; // s e^{-i phi}
                let cc = phase.conj() * c; // c e^{-i phi}
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * c - sc * akq;
                    a[(k, q)] = akp * s + cc * akq;
                }
                let (sr, cr) = (phase * s, phase * c);
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = apk * c - sr * aqk;
                    a[(q, k)] = apk * s + cr * aqk;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                if let Some(w) = w.as_mut() {
                    for k in 0..n {
                        let (wkp, wkq) = (w[(k, p)], w[(k, q)]);
                        w[(k, p)] = wkp * c - sc * wkq;
                        w[(k, q)] = wkp * s + cc * wkq;
                    }
                }
            }
        }
    }
    if !converged {
        let off = off_norm(&a);
        if off > tolerances::EIGEN * total.max(1.0) {
            return Err(Error::NoConvergence { sweeps, off_norm: off });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = w.map(|w| CMatrix::from_fn(n, |i, j| w[(i, order[j])]));
    Ok((values, vectors))
}

/// One solution `(lambda, k)` of `A k = lambda B k`, `k` a unit vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair3 {
    pub value: f64,
    pub vector: Vec3,
}

/// Solves the weighted problem `A k = lambda B k` for symmetric `A` and
/// positive-definite `B`. Pairs come back sorted by descending `lambda`;
/// eigenvectors are unit length with the sign rule of [`canonical_sign`].
pub fn generalized_sym_eigen3(a: &SymMat3, b: &SymMat3) -> Result<Vec<EigenPair3>> {
    let b_spec = sym_eigen(&b.to_matrix())?;
    let min_b = b_spec.values[0];
    if min_b <= tolerances::POSITIVE_DEFINITE {
        return Err(Error::SingularWeight { min_eigenvalue: min_b });
    }
    let l = cholesky3(b);
    let l_inv = lower_inverse3(&l);
    let m = &(&l_inv * &a.to_matrix()) * &l_inv.transpose();
    let eig = sym_eigen(&SymMat3::symmetrize(&m).to_matrix())?;
    let l_inv_t = l_inv.transpose();
    let mut pairs: Vec<EigenPair3> = (0..3)
        .map(|i| {
            let y = eig.vectors.column(i);
            let k = l_inv_t.matvec(&y);
            let mut k = normalize3(&[k[0], k[1], k[2]]).expect("nonzero eigenvector");
            canonical_sign(&mut k);
            EigenPair3 { value: eig.values[i], vector: k }
        })
        .collect();
    pairs.sort_by(|x, y| y.value.total_cmp(&x.value));
    Ok(pairs)
}

/// Largest eigenpair with the degenerate-cluster tie-break: among vectors
/// whose eigenvalue lies within `gap` of the maximum, the lexicographically
/// largest one wins. The flag reports whether such a cluster existed.
pub fn select_top(pairs: &[EigenPair3], gap: f64) -> (EigenPair3, bool) {
    let top = pairs[0].value;
    let cluster: Vec<&EigenPair3> = pairs.iter().filter(|p| top - p.value < gap).collect();
    let mut best = *cluster[0];
    for p in &cluster[1..] {
        if lexicographic_gt(&p.vector, &best.vector) {
            best.vector = p.vector;
        }
    }
    best.value = top;
    (best, cluster.len() > 1)
}

fn cholesky3(b: &SymMat3) -> RMatrix {
    let mut l = RMatrix::zeros(3, 3);
    for j in 0..3 {
        let mut d = b.get(j, j);
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..3 {
            let mut s = b.get(i, j);
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    l
}

fn lower_inverse3(l: &RMatrix) -> RMatrix {
    let mut inv = RMatrix::zeros(3, 3);
    for col in 0..3 {
        for i in 0..3 {
            let mut s = if i == col { 1.0 } else { 0.0 };
            for k in 0..i {
                s -= l[(i, k)] * inv[(k, col)];
            }
            inv[(i, col)] = s / l[(i, i)];
        }
    }
    inv
}

/// Thin singular value decomposition `C = U diag(sigma) V^T` of a `D x 3` matrix.
#[derive(Debug, Clone)]
pub struct Svd3 {
    /// `D x 3`, orthonormal columns.
    pub u: RMatrix,
    /// Descending, non-negative.
    pub singular_values: Vec3,
    /// `3 x 3` orthogonal; column `j` is the right singular vector of `sigma_j`.
    pub v: RMatrix,
}

impl Svd3 {
    pub fn right_vector(&self, j: usize) -> Vec3 {
        [self.v[(0, j)], self.v[(1, j)], self.v[(2, j)]]
    }

    pub fn reconstruct(&self) -> RMatrix {
        let sv = RMatrix::diag(&self.singular_values);
        &(&self.u * &sv) * &self.v.transpose()
    }
}

/// SVD of a tall `D x 3` matrix by one-sided Jacobi rotations.
///
/// Sign convention: the largest-magnitude component of every right singular
/// vector is positive (the left vector is flipped along with it).
pub fn svd_tall(c: &RMatrix) -> Result<Svd3> {
    if c.cols() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: c.cols() });
    }
    let rows = c.rows();
    if rows < 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: rows });
    }
    let mut w = c.clone();
    let mut v = RMatrix::identity(3);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..3 {
            for q in (p + 1)..3 {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for i in 0..rows {
                    alpha += w[(i, p)] * w[(i, p)];
                    beta += w[(i, q)] * w[(i, q)];
                    gamma += w[(i, p)] * w[(i, q)];
                }
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for i in 0..rows {
                    let (x, y) = (w[(i, p)], w[(i, q)]);
                    w[(i, p)] = cs * x - sn * y;
                    w[(i, q)] = sn * x + cs * y;
                }
                for i in 0..3 {
                    let (x, y) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = cs * x - sn * y;
                    v[(i, q)] = sn * x + cs * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..3).map(|j| norm(&w.column(j))).collect();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    let sigma_max = norms[order[0]];

    let mut u = RMatrix::zeros(rows, 3);
    let mut v_out = RMatrix::zeros(3, 3);
    let mut singular_values = [0.0; 3];
    let mut filled: Vec<Vec<f64>> = Vec::new();
    let mut missing = Vec::new();
    for (slot, &j) in order.iter().enumerate() {
        singular_values[slot] = norms[j];
        let mut vj: Vec<f64> = v.column(j);
        let mut uj: Vec<f64> = w.column(j);
        let largest = vj.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        if largest < 0.0 {
            vj.iter_mut().for_each(|x| *x = -*x);
            uj.iter_mut().for_each(|x| *x = -*x);
        }
        for i in 0..3 {
            v_out[(i, slot)] = vj[i];
        }
        if norms[j] > 1e-13 * sigma_max && sigma_max > 0.0 {
            let unit: Vec<f64> = uj.iter().map(|x| x / norms[j]).collect();
            for i in 0..rows {
                u[(i, slot)] = unit[i];
            }
            filled.push(unit);
        } else {
            missing.push(slot);
        }
    }
    // Complete U with unit vectors orthogonal to the columns already placed.
    for slot in missing {
        let col = (0..rows)
            .find_map(|e| {
                let mut cand = vec![0.0; rows];
                cand[e] = 1.0;
                for f in &filled {
                    let proj = dot(&cand, f);
                    cand.iter_mut().zip(f).for_each(|(c, x)| *c -= proj * x);
                }
                let n = norm(&cand);
                (n > 0.5).then(|| cand.into_iter().map(|x| x / n).collect::<Vec<f64>>())
            })
            .expect("a D >= 3 space always has a free direction");
        for i in 0..rows {
            u[(i, slot)] = col[i];
        }
        filled.push(col);
    }
    Ok(Svd3 { u, singular_values, v: v_out })
}
