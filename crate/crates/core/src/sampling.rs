//! Random states, frames and measurements for tests and sweeps.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::measurement::RankOnePovm;
use crate::smallalg::{hermitian_eigen, norm3, CMatrix, RMatrix, Vec3};
use crate::states::{decompose, schmidt_pure, x_state, BlochDecomposition, OperatorBasis, XStateParams};

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(normal(rng), normal(rng))
}

/// Uniform point on the unit sphere.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    loop {
        let v = [normal(rng), normal(rng), normal(rng)];
        let n = norm3(&v);
        if n > 1e-8 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// Haar-random proper rotation of R^3, from a uniform unit quaternion.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> RMatrix {
    let mut q = [0.0; 4];
    loop {
        for x in q.iter_mut() {
            *x = normal(rng);
        }
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            q.iter_mut().for_each(|x| *x /= n);
            break;
        }
    }
    let [w, x, y, z] = q;
    RMatrix::from_rows(&[
        vec![1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        vec![2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        vec![2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ])
    .expect("3x3 rows")
}

/// Full-rank density matrix `G G^dag / Tr(G G^dag)` with Ginibre `G`.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let entries = (0..dim * dim).map(|_| complex_normal(rng)).collect();
    let g = CMatrix::from_row_major(dim, entries).expect("dim^2 entries");
    let rho = &g * &g.adjoint();
    let tr = rho.trace().re;
    rho.scale(1.0 / tr)
}

/// Random `d_A x 2` state in Bloch form.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, d_a: usize) -> BlochDecomposition {
    decompose(&random_density_matrix(rng, 2 * d_a), d_a).expect("valid random state")
}

/// Applies independent random local rotations to a two-qubit state.
pub fn random_local_frames<R: Rng + ?Sized>(rng: &mut R, b: &BlochDecomposition) -> BlochDecomposition {
    let ra = random_rotation(rng);
    let rb = random_rotation(rng);
    b.rotated(&ra, &rb).expect("rotations preserve the state")
}

/// Pure two-qubit state with random Schmidt weight and local frames.
pub fn random_pure_two_qubit<R: Rng + ?Sized>(rng: &mut R) -> BlochDecomposition {
    let p = rng.random_range(0.0..1.0);
    let b = schmidt_pure(p).expect("weight in [0, 1]");
    random_local_frames(rng, &b)
}

/// Random rank-one qubit POVM with `n >= 2` outcomes.
///
/// `n` Gaussian vectors `psi_i` are made complete by `S^{-1/2}`, with
/// `S = sum_i |psi_i><psi_i|`.
pub fn random_povm<R: Rng + ?Sized>(rng: &mut R, n: usize) -> RankOnePovm {
    assert!(n >= 2, "a complete qubit POVM needs at least two outcomes");
    let psis: Vec<[Complex64; 2]> = (0..n).map(|_| [complex_normal(rng), complex_normal(rng)]).collect();
    let mut s = CMatrix::zeros(2);
    for p in &psis {
        s = &s + &CMatrix::from_fn(2, |i, j| p[i] * p[j].conj());
    }
    let eig = hermitian_eigen(&s).expect("2x2 Hermitian");
    let v = &eig.vectors;
    let inv_sqrt = CMatrix::from_fn(2, |i, j| {
        (0..2).map(|m| v[(i, m)] * v[(j, m)].conj() / eig.values[m].sqrt()).sum()
    });
    let basis = OperatorBasis::shared(2).expect("qubit basis");
    let elements = psis
        .iter()
        .map(|p| {
            let phi = inv_sqrt.matvec(p);
            let e = CMatrix::from_fn(2, |i, j| phi[i] * phi[j].conj());
            let w = e.trace().re;
            let r = basis.bloch_from_state(&e.scale(1.0 / w));
            (w, [r[0], r[1], r[2]])
        })
        .collect();
    RankOnePovm::new(elements).expect("completed POVM")
}

/// Valid X state with `r_A`, `r_B` along `z` and `|C_mu| <= scale`.
pub fn random_aligned_state<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> BlochDecomposition {
    loop {
        let r_a = rng.random_range(-0.9..0.9);
        let r_b = rng.random_range(-0.9..0.9);
        let cx = rng.random_range(-scale..=scale);
        let cy = rng.random_range(-scale..=scale);
        let cz = rng.random_range(-scale..=scale);
        let p = XStateParams::new(r_a, r_b, cx, cy, cz + r_a * r_b);
        if p.is_positive(1e-12) {
            return x_state(&p).expect("positive X state");
        }
    }
}
