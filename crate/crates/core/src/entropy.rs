//! Entropic forms `S_f(rho) = Tr f(rho)` and their one-qubit reductions.
//!
//! Every form is normalized so that `2 f(1/2) = 1`, i.e. a maximally mixed
//! qubit has entropy 1. For a qubit with Bloch length `r` the entropy is
//! `h_f(r) = f((1+r)/2) + f((1-r)/2)`, and `eta_f(r) = r h_f''(r) / h_f'(r)`
//! measures how the Hessian deviates from the quadratic case.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::smallalg::{self, norm, CMatrix};
use crate::states::OperatorBasis;
use crate::tolerances;

/// A concave generator `f` on `[0, 1]` with `f(0) = f(1) = 0`.
///
/// Only `f`, `f'` and `f''` are required; the qubit functions have generic
/// defaults that concrete forms override with closed expressions.
pub trait EntropicForm: fmt::Debug + Send + Sync {
    /// Canonical name, parseable by [`EntropyRegistry::parse`].
    fn name(&self) -> String;

    fn f(&self, p: f64) -> f64;
    fn df(&self, p: f64) -> f64;
    fn d2f(&self, p: f64) -> f64;

    /// `f` is `2p(1-p)`, which makes the Hessian the identity.
    fn is_quadratic(&self) -> bool {
        false
    }

    fn h(&self, r: f64) -> f64 {
        self.f((1.0 + r) / 2.0) + self.f((1.0 - r) / 2.0)
    }

    fn dh(&self, r: f64) -> f64 {
        0.5 * (self.df((1.0 + r) / 2.0) - self.df((1.0 - r) / 2.0))
    }

    fn d2h(&self, r: f64) -> f64 {
        0.25 * (self.d2f((1.0 + r) / 2.0) + self.d2f((1.0 - r) / 2.0))
    }

    fn eta(&self, r: f64) -> f64 {
        if r < 1e-6 {
            return 1.0;
        }
        r * self.d2h(r) / self.dh(r)
    }
}

/// `f(p) = -p log2 p`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VonNeumann;

impl EntropicForm for VonNeumann {
    fn name(&self) -> String {
        "vn".into()
    }

    fn f(&self, p: f64) -> f64 {
        if p <= 0.0 {
            0.0
        } else {
            -p * p.log2()
        }
    }

    fn df(&self, p: f64) -> f64 {
        -(p.ln() + 1.0) / LN_2
    }

    fn d2f(&self, p: f64) -> f64 {
        -1.0 / (p * LN_2)
    }

    fn dh(&self, r: f64) -> f64 {
        // 1/2 log2((1-r)/(1+r))
        -r.atanh() / LN_2
    }

    fn d2h(&self, r: f64) -> f64 {
        -1.0 / ((1.0 - r * r) * LN_2)
    }

    fn eta(&self, r: f64) -> f64 {
        if r == 0.0 {
            return 1.0;
        }
        r / ((1.0 - r * r) * r.atanh())
    }
}

/// `f(p) = 2p(1-p)`, so that `S_2 = 2(1 - Tr rho^2)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Quadratic;

impl EntropicForm for Quadratic {
    fn name(&self) -> String {
        "quad".into()
    }

    fn f(&self, p: f64) -> f64 {
        2.0 * p * (1.0 - p)
    }

    fn df(&self, p: f64) -> f64 {
        2.0 - 4.0 * p
    }

    fn d2f(&self, _p: f64) -> f64 {
        -4.0
    }

    fn is_quadratic(&self) -> bool {
        true
    }

    fn h(&self, r: f64) -> f64 {
        1.0 - r * r
    }

    fn dh(&self, r: f64) -> f64 {
        -2.0 * r
    }

    fn d2h(&self, _r: f64) -> f64 {
        -2.0
    }

    fn eta(&self, _r: f64) -> f64 {
        1.0
    }
}

/// `f(p) = (p - p^q) / c_q` with `c_q = 1 - 2^(1-q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tsallis {
    q: f64,
    c: f64,
}

impl Tsallis {
    /// `q > 0`, `q != 1`. The `q -> 1` limit is the von Neumann form, which
    /// must be requested by name.
    pub fn new(q: f64) -> Result<Self> {
        if !(q.is_finite() && q > 0.0) || q == 1.0 {
            return Err(Error::Domain(q, "Tsallis index must be positive and different from 1"));
        }
        Ok(Self { q, c: 1.0 - 2f64.powf(1.0 - q) })
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

impl EntropicForm for Tsallis {
    fn name(&self) -> String {
        format!("tsallis:{}", self.q)
    }

    fn f(&self, p: f64) -> f64 {
        if p <= 0.0 {
            0.0
        } else {
            (p - p.powf(self.q)) / self.c
        }
    }

    fn df(&self, p: f64) -> f64 {
        (1.0 - self.q * p.powf(self.q - 1.0)) / self.c
    }

    fn d2f(&self, p: f64) -> f64 {
        -self.q * (self.q - 1.0) * p.powf(self.q - 2.0) / self.c
    }

    fn is_quadratic(&self) -> bool {
        self.q == 2.0
    }

    fn eta(&self, r: f64) -> f64 {
        if r == 0.0 {
            return 1.0;
        }
        // gamma = (1-r)/(1+r) = exp(-2 atanh r); expm1 keeps 1 - gamma^(q-1) accurate
        let t = -2.0 * r.atanh();
        let q = self.q;
        let num = 1.0 + ((q - 2.0) * t).exp();
        let den = -((q - 1.0) * t).exp_m1();
        (q - 1.0) * r / (1.0 + r) * num / den
    }
}

type Constructor = Box<dyn Fn(Option<&str>) -> Result<Arc<dyn EntropicForm>> + Send + Sync>;

/// Name-to-constructor table for entropic forms.
///
/// Specs have the shape `name` or `name:arg`; the built-ins are
/// `vn`, `quad` and `tsallis:<q>`.
pub struct EntropyRegistry {
    entries: BTreeMap<String, Constructor>,
}

impl fmt::Debug for EntropyRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EntropyRegistry").field("names", &self.names()).finish()
    }
}

impl Default for EntropyRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl EntropyRegistry {
    pub fn empty() -> Self {
        Self { entries: BTreeMap::new() }
    }

    pub fn with_builtins() -> Self {
        let mut reg = Self::empty();
        let no_arg = |name: &'static str, form: Arc<dyn EntropicForm>| {
            move |arg: Option<&str>| match arg {
                None => Ok(Arc::clone(&form)),
                Some(_) => Err(Error::UnknownEntropy(format!("{name} takes no parameter"))),
            }
        };
        reg.register("vn", no_arg("vn", Arc::new(VonNeumann)));
        reg.register("von-neumann", no_arg("von-neumann", Arc::new(VonNeumann)));
        reg.register("quad", no_arg("quad", Arc::new(Quadratic)));
        reg.register("quadratic", no_arg("quadratic", Arc::new(Quadratic)));
        reg.register("tsallis", |arg: Option<&str>| {
            let raw = arg.ok_or_else(|| Error::UnknownEntropy("tsallis requires `tsallis:<q>`".into()))?;
            let q: f64 = raw
                .trim()
                .parse()
                .map_err(|_| Error::UnknownEntropy(format!("tsallis:{raw}")))?;
            Ok(Arc::new(Tsallis::new(q)?) as Arc<dyn EntropicForm>)
        });
        reg
    }

    pub fn register<F>(&mut self, name: &str, ctor: F)
    where
        F: Fn(Option<&str>) -> Result<Arc<dyn EntropicForm>> + Send + Sync + 'static,
    {
        self.entries.insert(name.to_ascii_lowercase(), Box::new(ctor));
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.keys().map(String::as_str).collect()
    }

    pub fn parse(&self, text: &str) -> Result<Arc<dyn EntropicForm>> {
        let text = text.trim();
        let (name, arg) = match text.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (text, None),
        };
        let ctor = self
            .entries
            .get(&name.to_ascii_lowercase())
            .ok_or_else(|| Error::UnknownEntropy(text.to_string()))?;
        ctor(arg)
    }
}

/// `sum_i f(p_i)` with values below the spectrum floor clamped to 0.
pub fn spectrum_entropy(spectrum: &[f64], f: &dyn EntropicForm) -> f64 {
    spectrum
        .iter()
        .map(|&p| if p < tolerances::SPECTRUM_FLOOR { 0.0 } else { f.f(p.min(1.0)) })
        .sum()
}

/// `S_f(rho)` from the spectrum of a density matrix.
pub fn entropy_of(rho: &CMatrix, f: &dyn EntropicForm) -> Result<f64> {
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
        return Err(Error::InvalidState(format!("trace {} differs from 1", tr.re)));
    }
    let spectrum = smallalg::hermitian_eigenvalues(rho)?;
    if spectrum[0] < -tolerances::POSITIVITY {
        return Err(Error::InvalidState(format!("negative eigenvalue {:e}", spectrum[0])));
    }
    Ok(spectrum_entropy(&spectrum, f))
}

/// `S_2 = 2(1 - (1 + |r|^2)/d)`.
pub fn quadratic_entropy_bloch(r: &[f64], d: usize) -> f64 {
    let r2: f64 = r.iter().map(|x| x * x).sum();
    2.0 * (1.0 - (1.0 + r2) / d as f64)
}

/// `S_f` of the single-system state `(I + r . sigma)/d`.
///
/// Qubits and the quadratic form use closed expressions; other cases
/// diagonalize the `d x d` matrix.
pub fn bloch_entropy(r: &[f64], basis: &OperatorBasis, f: &dyn EntropicForm) -> Result<f64> {
    if f.is_quadratic() {
        return Ok(quadratic_entropy_bloch(r, basis.dim()).max(0.0));
    }
    if basis.dim() == 2 {
        return Ok(f.h(norm(r).min(1.0)));
    }
    let spectrum = smallalg::hermitian_eigenvalues(&basis.state_from_bloch(r))?;
    Ok(spectrum_entropy(&spectrum, f))
}

/// Qubit entropy as a function of Bloch length.
pub fn h_f(r: f64, f: &dyn EntropicForm) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::Domain(r, "Bloch length must lie in [0, 1]"));
    }
    Ok(f.h(r))
}

/// `r h_f''(r) / h_f'(r)`, with the limit 1 at `r = 0`.
pub fn eta_f(r: f64, f: &dyn EntropicForm) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(r, "eta is defined for Bloch length in [0, 1)"));
    }
    Ok(f.eta(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn forms() -> Vec<Arc<dyn EntropicForm>> {
        vec![Arc::new(VonNeumann), Arc::new(Quadratic), Arc::new(Tsallis::new(1.5).unwrap())]
    }

    fn qubit(r: [f64; 3]) -> CMatrix {
        OperatorBasis::new(2).unwrap().state_from_bloch(&r)
    }

    #[test]
    fn normalization_and_endpoints() {
        for q in [0.5, 1.5, 2.0, 2.5, 3.0, 4.0] {
            let t = Tsallis::new(q).unwrap();
            assert!((2.0 * t.f(0.5) - 1.0).abs() < 1e-14);
            assert_eq!(t.f(0.0), 0.0);
            assert!(t.f(1.0).abs() < 1e-15);
        }
        for f in forms() {
            assert!((f.h(0.0) - 1.0).abs() < 1e-14, "{}", f.name());
            assert!(f.h(1.0).abs() < 1e-14, "{}", f.name());
        }
    }

    #[test]
    fn maximally_mixed_qubit_has_unit_entropy() {
        for f in forms() {
            let s = entropy_of(&CMatrix::identity(2).scale(0.5), f.as_ref()).unwrap();
            assert!((s - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn pure_state_has_zero_entropy() {
        for f in forms() {
            assert!(entropy_of(&qubit([0.6, 0.0, 0.8]), f.as_ref()).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn quadratic_qubit_value() {
        let s = entropy_of(&qubit([0.0, 0.0, 0.5]), &Quadratic).unwrap();
        assert!((s - 0.75).abs() < 1e-14);
    }

    #[test]
    fn quadratic_bloch_formula() {
        assert_eq!(quadratic_entropy_bloch(&[0.0; 3], 2), 1.0);
        assert!(quadratic_entropy_bloch(&[0.0, 0.0, 1.0], 2).abs() < 1e-15);
        let basis = OperatorBasis::new(3).unwrap();
        let mut r = vec![0.0; 8];
        r[7] = -1.0;
        let expect = 2.0 * (1.0 - 2.0 / 3.0);
        assert!((quadratic_entropy_bloch(&r, 3) - expect).abs() < 1e-15);
        let direct = entropy_of(&basis.state_from_bloch(&r), &Quadratic).unwrap();
        assert!((direct - expect).abs() < 1e-12);
    }

    #[test]
    fn von_neumann_h_value() {
        let expect = -0.75 * 0.75f64.log2() - 0.25 * 0.25f64.log2();
        assert!((h_f(0.5, &VonNeumann).unwrap() - expect).abs() < 1e-15);
        assert!((expect - 0.811278).abs() < 1e-6);
        assert!(h_f(1.5, &VonNeumann).is_err());
    }

    #[test]
    fn eta_values() {
        assert_eq!(eta_f(0.3, &Quadratic).unwrap(), 1.0);
        assert_eq!(eta_f(0.0, &VonNeumann).unwrap(), 1.0);
        let e = eta_f(0.5, &VonNeumann).unwrap();
        assert!((e - 1.0 / (0.75 * 3f64.ln())).abs() < 1e-14);
        assert!((e - 1.213652).abs() < 1e-6);
        assert!(eta_f(1.0, &VonNeumann).is_err());
        for q in [2.0, 3.0] {
            let t = Tsallis::new(q).unwrap();
            for r in [1e-3, 0.2, 0.7, 0.99] {
                assert!((t.eta(r) - 1.0).abs() < 1e-12, "q={q} r={r}");
            }
        }
    }

    #[test]
    fn eta_small_r_expansions() {
        for r in [1e-3, 1e-2, 0.05] {
            let vn = VonNeumann.eta(r);
            assert!((vn - (1.0 + 2.0 * r * r / 3.0)).abs() < r.powi(4));
            for q in [0.5, 1.5, 2.5, 4.0] {
                let t = Tsallis::new(q).unwrap().eta(r);
                let series = 1.0 + (q - 2.0) * (q - 3.0) * r * r / 3.0;
                assert!((t - series).abs() < 5.0 * r.powi(4), "q={q} r={r}");
            }
        }
    }

    #[test]
    fn closed_forms_match_generic_defaults() {
        #[derive(Debug)]
        struct Generic<'a>(&'a dyn EntropicForm);
        impl EntropicForm for Generic<'_> {
            fn name(&self) -> String {
                "generic".into()
            }
            fn f(&self, p: f64) -> f64 {
                self.0.f(p)
            }
            fn df(&self, p: f64) -> f64 {
                self.0.df(p)
            }
            fn d2f(&self, p: f64) -> f64 {
                self.0.d2f(p)
            }
        }
        for f in forms() {
            let g = Generic(f.as_ref());
            for r in [0.01, 0.3, 0.8, 0.95] {
                assert!((f.h(r) - g.h(r)).abs() < 1e-13);
                assert!((f.dh(r) - g.dh(r)).abs() < 1e-12);
                assert!((f.d2h(r) - g.d2h(r)).abs() < 1e-11);
                assert!((f.eta(r) - g.eta(r)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn eta_matches_finite_differences() {
        let h = 1e-5;
        for f in forms() {
            for i in 0..=18 {
                let r = 0.05 + 0.05 * i as f64;
                let d1 = (f.h(r + h) - f.h(r - h)) / (2.0 * h);
                let d2 = (f.dh(r + h) - f.dh(r - h)) / (2.0 * h);
                assert!((f.eta(r) - r * d2 / d1).abs() < 1e-6, "{} r={r}", f.name());
            }
        }
    }

    #[test]
    fn tsallis_sign_pattern() {
        for q in [0.5, 1.5, 3.5, 4.0] {
            let t = Tsallis::new(q).unwrap();
            assert!((1..100).all(|i| t.eta(i as f64 / 100.0) > 1.0), "q={q}");
        }
        let t = Tsallis::new(2.5).unwrap();
        assert!((1..100).all(|i| t.eta(i as f64 / 100.0) < 1.0));
    }

    #[test]
    fn tsallis_rejects_bad_index() {
        assert!(Tsallis::new(1.0).is_err());
        assert!(Tsallis::new(-0.5).is_err());
        assert!(Tsallis::new(f64::NAN).is_err());
    }

    #[test]
    fn registry_parses_names() {
        let reg = EntropyRegistry::with_builtins();
        assert_eq!(reg.parse("vn").unwrap().name(), "vn");
        assert_eq!(reg.parse("quad").unwrap().name(), "quad");
        assert_eq!(reg.parse("Tsallis:1.5").unwrap().name(), "tsallis:1.5");
        assert!(matches!(reg.parse("renyi:2"), Err(Error::UnknownEntropy(_))));
        assert!(reg.parse("tsallis").is_err());
        assert!(reg.parse("tsallis:1").is_err());
        assert!(reg.parse("vn:2").is_err());
    }

    #[test]
    fn registry_accepts_custom_forms() {
        let mut reg = EntropyRegistry::empty();
        reg.register("square", |_| Ok(Arc::new(Quadratic) as Arc<dyn EntropicForm>));
        assert!(reg.parse("square").unwrap().is_quadratic());
        assert!(reg.parse("vn").is_err());
    }

    #[test]
    fn invalid_state_rejected() {
        let mut m = CMatrix::identity(2);
        m[(0, 0)] = Complex64::new(1.5, 0.0);
        m[(1, 1)] = Complex64::new(-0.5, 0.0);
        assert!(matches!(entropy_of(&m, &VonNeumann), Err(Error::InvalidState(_))));
    }

    proptest! {
        #[test]
        fn h_is_concave_and_decreasing(r1 in 0.0f64..1.0, r2 in 0.0f64..1.0, a in 0.0f64..1.0) {
            for f in forms() {
                let mid = f.h(a * r1 + (1.0 - a) * r2);
                prop_assert!(mid >= a * f.h(r1) + (1.0 - a) * f.h(r2) - 1e-12);
                let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
                prop_assert!(f.h(lo) >= f.h(hi) - 1e-14);
            }
        }

        #[test]
        fn quadratic_spectrum_matches_bloch(x in -0.5f64..0.5, y in -0.5f64..0.5, z in -0.5f64..0.5) {
            let r = [x, y, z];
            let s = entropy_of(&qubit(r), &Quadratic).unwrap();
            prop_assert!((s - quadratic_entropy_bloch(&r, 2)).abs() < 1e-12);
        }
    }
}
