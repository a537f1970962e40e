//! Conditional entropy optimization for qudit-qubit states.
//!
//! A state of a `d_A`-level system `A` and a qubit `B` is held in its
//! Fano-Bloch form: the Bloch vectors `r_A`, `r_B` and the correlation
//! tensor `C`. On top of that representation the crate provides
//!
//! - generalized entropic forms `S_f(rho) = Tr f(rho)` ([`entropy`]),
//! - post-measurement states and conditional entropies for projective and
//!   rank-one POVM measurements on the qubit ([`measurement`]),
//! - the correlation ellipsoid of post-measurement Bloch vectors ([`geometry`]),
//! - interchangeable minimizers of the conditional entropy over measurement
//!   directions ([`optimizer`]),
//! - exact and approximate quantum discord, X-state sector scans and entropy
//!   profiles ([`discord`]).
//!
//! Entropic forms and minimizers are strategies behind the [`EntropicForm`]
//! and [`Minimizer`] traits, looked up by name through [`EntropyRegistry`]
//! and [`MinimizerRegistry`].

pub mod discord;
pub mod entropy;
pub mod error;
pub mod geometry;
pub mod measurement;
pub mod optimizer;
pub mod sampling;
pub mod smallalg;
pub mod states;
pub mod tolerances;

pub use entropy::{EntropicForm, EntropyRegistry, Quadratic, Tsallis, VonNeumann};
pub use error::{Error, Result};
pub use measurement::{ProjectiveDirection, RankOnePovm};
pub use optimizer::{Method, Minimizer, MinimizerConfig, MinimizerRegistry, OptimizationResult};
pub use smallalg::{CMatrix, RMatrix, SymMat3, Vec3};
pub use states::{BlochDecomposition, OperatorBasis, XStateParams};
pub use tolerances::Tolerances;
