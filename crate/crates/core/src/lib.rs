//! Banach–Kantorovich algebras over finite atomic measure spaces.
//!
//! An algebra `E(Ω, X)` is modeled as the sections of a bundle of concrete
//! Banach algebras `X(ω)` over a finite atomic space `Ω`, normed by the
//! `E = L⁰(Ω)`-valued map `u ↦ (ω ↦ ‖u(ω)‖)`. On top of that model the crate
//! provides certified Neumann inversion, vector-valued spectra, the quotient
//! construction that rebuilds a bundle from its algebra, and checkers for the
//! vector Gelfand–Mazur characterizations.

#![allow(clippy::needless_range_loop)]

pub mod bundle;
pub mod check;
pub mod error;
pub mod fiber;
pub mod gelfand_mazur;
pub mod inversion;
pub mod measure;
pub mod random;
pub mod representation;
pub mod runner;
pub mod scenario;
pub mod spectrum;
pub mod suite;

pub use bundle::{lifting_p, lifting_vec, Bundle, BundleRef, Section};
pub use error::{Error, Result};
pub use fiber::{FiberElement, FiberInverse, FiberKind};
pub use inversion::{InverseCertificate, TruncationOrder};
pub use measure::{
    AtomicMeasureSpace, EFunction, Idempotent, PartitionOfUnity, PointwiseOp, SpaceRef,
};
pub use num_complex::Complex64;
pub use random::Rng;
