//! Local measurements on the qubit `B`.
//!
//! A projective measurement along the unit vector `k` has outcomes
//! `Pi_{+-k} = (I +- k.sigma)/2` with probabilities `p_{+-k} = (1 +- r_B.k)/2`,
//! leaving `A` with Bloch vector `r_A +- C k / (1 +- r_B.k)`.

use crate::entropy::{bloch_entropy, EntropicForm};
use crate::error::{Error, Result};
use crate::optimizer::hessian_two_qubit;
use crate::smallalg::{dot3, norm, norm3, scale3, SymMat3, Vec3};
use crate::states::BlochDecomposition;
use crate::tolerances;

/// Branch probabilities at or below this are treated as zero.
const ZERO_PROBABILITY: f64 = 1e-14;

/// A unit Bloch direction on the qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectiveDirection {
    k: Vec3,
}

impl ProjectiveDirection {
    /// `k` must already be unit length within `1e-12`.
    pub fn new(k: Vec3) -> Result<Self> {
        if (norm3(&k) - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(norm3(&k), "measurement direction must be a unit vector"));
        }
        Ok(Self { k })
    }

    /// Normalizes `v`; fails on the zero vector.
    pub fn normalized(v: Vec3) -> Result<Self> {
        let n = norm3(&v);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Domain(n, "measurement direction must be nonzero"));
        }
        Ok(Self { k: scale3(&v, 1.0 / n) })
    }

    /// `(sin t cos p, sin t sin p, cos t)`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self { k: [st * cp, st * sp, ct] }
    }

    pub fn x() -> Self {
        Self { k: [1.0, 0.0, 0.0] }
    }

    pub fn y() -> Self {
        Self { k: [0.0, 1.0, 0.0] }
    }

    pub fn z() -> Self {
        Self { k: [0.0, 0.0, 1.0] }
    }

    pub fn k(&self) -> &Vec3 {
        &self.k
    }

    pub fn flipped(&self) -> Self {
        Self { k: scale3(&self.k, -1.0) }
    }
}

/// A general qubit effect `E = (a I + b.sigma)/2`, `0 <= E <= I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitEffect {
    pub a: f64,
    pub b: Vec3,
}

impl QubitEffect {
    /// The rank-one effect `w (I + k.sigma)/2`.
    pub fn rank_one(weight: f64, k: &Vec3) -> Self {
        Self { a: weight, b: scale3(k, weight) }
    }
}

/// Rank-one POVM `{ r_k Pi_k }` with `sum r_k = 2` and `sum r_k k = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOnePovm {
    elements: Vec<(f64, Vec3)>,
}

impl RankOnePovm {
    pub fn new(elements: Vec<(f64, Vec3)>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidPovm("no elements".into()));
        }
        for (i, (w, k)) in elements.iter().enumerate() {
            if w.is_nan() || *w <= 0.0 {
                return Err(Error::InvalidPovm(format!("element {i} has weight {w}")));
            }
            if (norm3(k) - 1.0).abs() > tolerances::POVM {
                return Err(Error::InvalidPovm(format!("element {i} direction is not unit length")));
            }
        }
        let total: f64 = elements.iter().map(|e| e.0).sum();
        if (total - 2.0).abs() > tolerances::POVM {
            return Err(Error::InvalidPovm(format!("weights sum to {total}, expected 2")));
        }
        let mut first = [0.0; 3];
        for (w, k) in &elements {
            for i in 0..3 {
                first[i] += w * k[i];
            }
        }
        if norm3(&first) > tolerances::POVM {
            return Err(Error::InvalidPovm(format!("|sum r_k k| = {:e}", norm3(&first))));
        }
        Ok(Self { elements })
    }

    /// The two-outcome projective measurement along `k`.
    pub fn projective(k: &ProjectiveDirection) -> Self {
        Self { elements: vec![(1.0, *k.k()), (1.0, *k.flipped().k())] }
    }

    /// Symmetric informationally complete four-outcome POVM.
    pub fn tetrahedral() -> Self {
        let s = 1.0 / 3f64.sqrt();
        let dirs = [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]];
        Self { elements: dirs.iter().map(|k| (0.5, *k)).collect() }
    }

    pub fn elements(&self) -> &[(f64, Vec3)] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn effects(&self) -> Vec<QubitEffect> {
        self.elements.iter().map(|(w, k)| QubitEffect::rank_one(*w, k)).collect()
    }

    /// Sums the elements within each group into a single effect.
    pub fn coarse_grained(&self, groups: &[Vec<usize>]) -> Result<Vec<QubitEffect>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::with_capacity(groups.len());
        for g in groups {
            let mut e = QubitEffect { a: 0.0, b: [0.0; 3] };
            for &i in g {
                if i >= self.len() || seen[i] {
                    return Err(Error::InvalidPovm(format!("bad or repeated index {i} in grouping")));
                }
                seen[i] = true;
                let (w, k) = self.elements[i];
                e.a += w;
                for (bj, kj) in e.b.iter_mut().zip(k) {
                    *bj += w * kj;
                }
            }
            out.push(e);
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidPovm("grouping does not cover every element".into()));
        }
        Ok(out)
    }
}

/// Conditional state of `A` after one outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct PostMeasurement {
    pub r_out: Vec<f64>,
    pub prob: f64,
}

/// Post-measurement Bloch vector of `A` and probability for outcome `E`.
pub fn post_effect(b: &BlochDecomposition, e: &QubitEffect) -> Result<PostMeasurement> {
    let den = e.a + dot3(&e.b, b.r_b());
    let prob = den / 2.0;
    if prob <= ZERO_PROBABILITY {
        return Err(Error::UndefinedConditional);
    }
    let cb = b.correlations().apply3(&e.b);
    let r_out = b.r_a().iter().zip(&cb).map(|(ra, c)| ra + c / den).collect();
    Ok(PostMeasurement { r_out, prob })
}

/// `r_A +- C k / (1 +- r_B.k)` and `(1 +- r_B.k)/2`.
pub fn post_measurement(
    b: &BlochDecomposition,
    k: &ProjectiveDirection,
    sign: i8,
) -> Result<PostMeasurement> {
    let s = if sign >= 0 { 1.0 } else { -1.0 };
    post_effect(b, &QubitEffect::rank_one(1.0, &scale3(k.k(), s)))
}

/// `sum_E p_E S_f(rho_{A|E})`; zero-probability outcomes contribute 0.
pub fn effects_conditional_entropy(
    b: &BlochDecomposition,
    effects: &[QubitEffect],
    f: &dyn EntropicForm,
) -> Result<f64> {
    let mut total = 0.0;
    for e in effects {
        match post_effect(b, e) {
            Ok(pm) => total += pm.prob * bloch_entropy(&pm.r_out, b.basis(), f)?,
            Err(Error::UndefinedConditional) => {}
            Err(err) => return Err(err),
        }
    }
    Ok(total)
}

/// `S_f(A|B_k) = sum_{+-} p_{+-k} S_f(rho_{A/+-k})`.
pub fn conditional_entropy(
    b: &BlochDecomposition,
    k: &ProjectiveDirection,
    f: &dyn EntropicForm,
) -> Result<f64> {
    let effects = [
        QubitEffect::rank_one(1.0, k.k()),
        QubitEffect::rank_one(1.0, k.flipped().k()),
    ];
    effects_conditional_entropy(b, &effects, f)
}

pub fn povm_conditional_entropy(
    b: &BlochDecomposition,
    m: &RankOnePovm,
    f: &dyn EntropicForm,
) -> Result<f64> {
    effects_conditional_entropy(b, &m.effects(), f)
}

/// `S_f(rho_A)`.
pub fn marginal_entropy(b: &BlochDecomposition, f: &dyn EntropicForm) -> Result<f64> {
    bloch_entropy(b.r_a(), b.basis(), f)
}

/// `Delta S_f = S_f(A) - S_f(A|B_k)`.
pub fn entropy_decrease(
    b: &BlochDecomposition,
    k: &ProjectiveDirection,
    f: &dyn EntropicForm,
) -> Result<f64> {
    Ok(marginal_entropy(b, f)? - conditional_entropy(b, k, f)?)
}

/// Closed form for the quadratic entropy: `(2/d_A) |C k|^2 / (k^T N_B k)`.
pub fn quadratic_entropy_decrease(b: &BlochDecomposition, k: &ProjectiveDirection) -> f64 {
    let ck = b.correlations().apply3(k.k());
    let num: f64 = ck.iter().map(|x| x * x).sum();
    let den = SymMat3::qubit_weight(b.r_b()).quadratic_form(k.k());
    if num == 0.0 || den <= 0.0 {
        return 0.0;
    }
    2.0 / b.d_a() as f64 * num / den
}

/// Bloch-length increase `Delta_f` with `h_f(|r_A| + Delta_f) = S_f(A|B_k)`.
///
/// Two-qubit states only. Solved by bisection on `[0, 1 - |r_A|]`.
pub fn measurement_equivalent(
    b: &BlochDecomposition,
    k: &ProjectiveDirection,
    f: &dyn EntropicForm,
) -> Result<f64> {
    if b.d_a() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: b.d_a() });
    }
    let target = conditional_entropy(b, k, f)?;
    let r0 = norm(b.r_a()).min(1.0);
    let (mut lo, mut hi) = (0.0, 1.0 - r0);
    if f.h(r0) <= target {
        return Ok(0.0);
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f.h(r0 + mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Weak-correlation estimate of [`measurement_equivalent`].
///
/// For `r_A > 0`: `k^T C^T Lambda_f C k / (|h_f'(r_A)| k^T N_B k)`, of
/// second order in `C`. At `r_A = 0`: `|C k| / sqrt(1 - (r_B.k)^2)`,
/// independent of `f`.
pub fn measurement_equivalent_estimate(
    b: &BlochDecomposition,
    k: &ProjectiveDirection,
    f: &dyn EntropicForm,
) -> Result<f64> {
    if b.d_a() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: b.d_a() });
    }
    let ra = [b.r_a()[0], b.r_a()[1], b.r_a()[2]];
    let r = norm3(&ra);
    let ck = b.correlations().apply3(k.k());
    let ck = [ck[0], ck[1], ck[2]];
    let nb = SymMat3::qubit_weight(b.r_b()).quadratic_form(k.k());
    if nb <= 0.0 {
        return Err(Error::DegenerateQubit);
    }
    if r < 1e-8 {
        return Ok((dot3(&ck, &ck) / nb).sqrt());
    }
    let lambda = hessian_two_qubit(&ra, f);
    Ok(lambda.quadratic_form(&ck) / (f.dh(r).abs() * nb))
}
