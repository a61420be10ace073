//! Concrete unital Banach algebras used as fibers `X(ω)`.
//!
//! Three kinds are provided: the scalars `ℂ`, the matrix algebras `M_n(ℂ)`
//! (`1 ≤ n ≤ 8`) under the operator norm, and the finite sup-norm function
//! algebras `ℂ^k` (`1 ≤ k ≤ 64`). All three have submultiplicative norms and
//! a unit of norm one.

pub mod linalg;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub const MAX_MATRIX_DIM: usize = 8;
pub const MAX_FUNCTION_POINTS: usize = 64;

/// Default threshold on the smallest singular value below which an element
/// counts as not invertible.
pub const DEFAULT_INVERSION_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FiberKind {
    Scalar,
    Matrix { n: usize },
    Function { k: usize },
}

impl FiberKind {
    pub fn validate(self) -> Result<Self> {
        match self {
            FiberKind::Matrix { n } if !(1..=MAX_MATRIX_DIM).contains(&n) => {
                Err(Error::InvalidDescriptor(format!(
                    "matrix dimension {n} outside 1..={MAX_MATRIX_DIM}"
                )))
            }
            FiberKind::Function { k } if !(1..=MAX_FUNCTION_POINTS).contains(&k) => {
                Err(Error::InvalidDescriptor(format!(
                    "function point count {k} outside 1..={MAX_FUNCTION_POINTS}"
                )))
            }
            _ => Ok(self),
        }
    }

    /// Number of complex entries an element stores.
    pub fn storage_len(self) -> usize {
        match self {
            FiberKind::Scalar => 1,
            FiberKind::Matrix { n } => n * n,
            FiberKind::Function { k } => k,
        }
    }

    /// Complex dimension of the algebra.
    pub fn dimension(self) -> usize {
        self.storage_len()
    }

    pub fn is_one_dimensional(self) -> bool {
        self.dimension() == 1
    }
}

impl fmt::Display for FiberKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiberKind::Scalar => write!(f, "scalar"),
            FiberKind::Matrix { n } => write!(f, "matrix({n})"),
            FiberKind::Function { k } => write!(f, "function({k})"),
        }
    }
}

/// Parses the display form: `scalar`, `matrix(n)`, `function(k)`.
impl std::str::FromStr for FiberKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "scalar" {
            return Ok(FiberKind::Scalar);
        }
        let arg = |prefix: &str| -> Option<usize> {
            s.strip_prefix(prefix)?
                .strip_prefix('(')?
                .strip_suffix(')')?
                .trim()
                .parse()
                .ok()
        };
        let kind = if let Some(n) = arg("matrix") {
            FiberKind::Matrix { n }
        } else if let Some(k) = arg("function") {
            FiberKind::Function { k }
        } else {
            return Err(Error::InvalidDescriptor(format!(
                "unrecognized fiber descriptor `{s}`"
            )));
        };
        kind.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiberElement {
    kind: FiberKind,
    data: Vec<Complex64>,
}

/// Outcome of [`FiberElement::inverse`]; non-invertibility is a value.
#[derive(Debug, Clone, PartialEq)]
pub enum FiberInverse {
    Invertible(FiberElement),
    NotInvertible { smallest_singular_value: f64 },
}

impl FiberInverse {
    pub fn ok(self) -> Option<FiberElement> {
        match self {
            FiberInverse::Invertible(b) => Some(b),
            FiberInverse::NotInvertible { .. } => None,
        }
    }
}

impl FiberElement {
    pub fn new(kind: FiberKind, data: Vec<Complex64>) -> Result<Self> {
        let kind = kind.validate()?;
        if data.len() != kind.storage_len() {
            return Err(Error::ShapeMismatch {
                descriptor: kind.to_string(),
                expected: kind.storage_len(),
                found: data.len(),
            });
        }
        Ok(Self { kind, data })
    }

    pub fn zero(kind: FiberKind) -> Self {
        Self {
            kind,
            data: vec![ZERO; kind.storage_len()],
        }
    }

    pub fn unit(kind: FiberKind) -> Self {
        let data = match kind {
            FiberKind::Matrix { n } => linalg::identity(n),
            _ => vec![ONE; kind.storage_len()],
        };
        Self { kind, data }
    }

    pub fn scalar(value: Complex64) -> Self {
        Self {
            kind: FiberKind::Scalar,
            data: vec![value],
        }
    }

    /// Matrix from row-major entries.
    pub fn matrix(n: usize, data: Vec<Complex64>) -> Result<Self> {
        Self::new(FiberKind::Matrix { n }, data)
    }

    pub fn function(values: Vec<Complex64>) -> Result<Self> {
        Self::new(FiberKind::Function { k: values.len() }, values)
    }

    /// The matrix unit `e_ij` (0-based indices).
    pub fn matrix_unit(n: usize, i: usize, j: usize) -> Result<Self> {
        let mut data = vec![ZERO; n * n];
        if i >= n || j >= n {
            return Err(Error::InvalidArgument(format!(
                "matrix unit ({i},{j}) outside {n}×{n}"
            )));
        }
        data[i * n + j] = ONE;
        Self::matrix(n, data)
    }

    pub fn kind(&self) -> FiberKind {
        self.kind
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// The single coordinate of an element of a one-dimensional fiber.
    pub fn as_scalar(&self) -> Option<Complex64> {
        self.kind.is_one_dimensional().then(|| self.data[0])
    }

    fn check_kind(&self, other: &FiberElement) -> Result<()> {
        if self.kind == other.kind {
            Ok(())
        } else {
            Err(Error::DescriptorMismatch {
                left: self.kind.to_string(),
                right: other.kind.to_string(),
            })
        }
    }

    pub fn add(&self, other: &FiberElement) -> Result<FiberElement> {
        self.check_kind(other)?;
        Ok(Self {
            kind: self.kind,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &FiberElement) -> Result<FiberElement> {
        self.check_kind(other)?;
        Ok(Self {
            kind: self.kind,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn mul(&self, other: &FiberElement) -> Result<FiberElement> {
        self.check_kind(other)?;
        let data = match self.kind {
            FiberKind::Matrix { n } => linalg::matmul(&self.data, &other.data, n),
            _ => self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a * b)
                .collect(),
        };
        Ok(Self {
            kind: self.kind,
            data,
        })
    }

    pub fn scale(&self, lambda: Complex64) -> FiberElement {
        Self {
            kind: self.kind,
            data: self.data.iter().map(|a| lambda * a).collect(),
        }
    }

    /// `λe − a`.
    pub fn shifted(&self, lambda: Complex64) -> FiberElement {
        let shift = Self::unit(self.kind).scale(lambda);
        shift.sub(self).expect("same kind")
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| *z == ZERO)
    }

    pub fn norm(&self) -> f64 {
        match self.kind {
            FiberKind::Scalar => self.data[0].norm(),
            FiberKind::Function { .. } => self.data.iter().map(|z| z.norm()).fold(0.0, f64::max),
            FiberKind::Matrix { n } => linalg::operator_norm(&self.data, n),
        }
    }

    /// `‖a − b‖` in this fiber.
    pub fn distance(&self, other: &FiberElement) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    pub fn smallest_singular_value(&self) -> f64 {
        match self.kind {
            FiberKind::Scalar => self.data[0].norm(),
            FiberKind::Function { .. } => self
                .data
                .iter()
                .map(|z| z.norm())
                .fold(f64::INFINITY, f64::min),
            FiberKind::Matrix { n } => linalg::smallest_singular_value(&self.data, n),
        }
    }

    /// Two-sided inverse with `‖ab − e‖, ‖ba − e‖ ≤ tol`, or `NotInvertible`
    /// when the smallest singular value is at most `tol`.
    pub fn inverse(&self, tol: f64) -> FiberInverse {
        let smin = self.smallest_singular_value();
        let not_invertible = FiberInverse::NotInvertible {
            smallest_singular_value: smin,
        };
        if smin <= tol {
            return not_invertible;
        }
        match self.kind {
            FiberKind::Scalar | FiberKind::Function { .. } => FiberInverse::Invertible(Self {
                kind: self.kind,
                data: self.data.iter().map(|z| ONE / z).collect(),
            }),
            FiberKind::Matrix { n } => {
                let Some(data) = linalg::inverse_gepp(&self.data, n) else {
                    return not_invertible;
                };
                let mut b = Self {
                    kind: self.kind,
                    data,
                };
                let unit = Self::unit(self.kind);
                // Newton–Schulz refinement b ← b(2e − ab) for ill-conditioned input.
                for _ in 0..3 {
                    let left = self
                        .mul(&b)
                        .expect("same kind")
                        .distance(&unit)
                        .expect("same kind");
                    let right = b
                        .mul(self)
                        .expect("same kind")
                        .distance(&unit)
                        .expect("same kind");
                    if left <= tol && right <= tol {
                        return FiberInverse::Invertible(b);
                    }
                    let two_e_minus_ab = unit
                        .scale(ONE * 2.0)
                        .sub(&self.mul(&b).expect("same kind"))
                        .expect("same kind");
                    b = b.mul(&two_e_minus_ab).expect("same kind");
                }
                let left = self
                    .mul(&b)
                    .expect("same kind")
                    .distance(&unit)
                    .expect("same kind");
                let right = b
                    .mul(self)
                    .expect("same kind")
                    .distance(&unit)
                    .expect("same kind");
                if left <= tol && right <= tol {
                    FiberInverse::Invertible(b)
                } else {
                    not_invertible
                }
            }
        }
    }

    pub fn is_invertible(&self, tol: f64) -> bool {
        matches!(self.inverse(tol), FiberInverse::Invertible(_))
    }

    /// Spectrum with algebraic multiplicity, sorted by `(re, im)`.
    ///
    /// Matrix eigenvalues come from the characteristic polynomial by
    /// Durand–Kerner iteration (triangular matrices are read off the
    /// diagonal). Each returned `λ` is certified by
    /// `|det(λe − a)| ≤ tol·(1 + ‖a‖)^n`.
    pub fn spectrum(&self, tol: f64) -> Result<Vec<Complex64>> {
        let mut eig = match self.kind {
            FiberKind::Scalar | FiberKind::Function { .. } => self.data.clone(),
            FiberKind::Matrix { n } => self.matrix_eigenvalues(n, tol)?,
        };
        eig.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        Ok(eig)
    }

    fn matrix_eigenvalues(&self, n: usize, tol: f64) -> Result<Vec<Complex64>> {
        let a = &self.data;
        if n == 1 || linalg::is_upper_triangular(a, n) || linalg::is_lower_triangular(a, n) {
            return Ok((0..n).map(|i| a[i * n + i]).collect());
        }
        let norm = self.norm();
        let coeffs = linalg::characteristic_polynomial(a, n);
        let roots = linalg::durand_kerner(&coeffs, norm + 1.0).map_err(|partial| {
            Error::NonConvergence {
                iterations: linalg::DURAND_KERNER_MAX_ITERATIONS,
                partial,
            }
        })?;
        let threshold = tol * (1.0 + norm).powi(n as i32);
        for &lambda in &roots {
            let shifted = self.shifted(lambda);
            if linalg::determinant(&shifted.data, n).norm() > threshold {
                return Err(Error::NonConvergence {
                    iterations: linalg::DURAND_KERNER_MAX_ITERATIONS,
                    partial: roots.clone(),
                });
            }
        }
        Ok(roots)
    }

    /// Scenario literal: `[re, im]` for scalars, otherwise an array of pairs.
    pub fn to_literal(&self) -> Value {
        let pair = |z: &Complex64| Value::from(vec![z.re, z.im]);
        match self.kind {
            FiberKind::Scalar => pair(&self.data[0]),
            _ => Value::Array(self.data.iter().map(pair).collect()),
        }
    }

    pub fn from_literal(kind: FiberKind, literal: &Value) -> Result<Self> {
        let kind = kind.validate()?;
        let bad = |msg: String| Error::InvalidArgument(format!("{kind} literal: {msg}"));
        let pair = |v: &Value| -> Result<Complex64> {
            match v.as_array().map(|a| a.as_slice()) {
                Some([re, im]) => match (re.as_f64(), im.as_f64()) {
                    (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
                    _ => Err(bad(format!("expected two numbers, found {v}"))),
                },
                _ => Err(bad(format!("expected a [re, im] pair, found {v}"))),
            }
        };
        let data = match kind {
            FiberKind::Scalar => vec![pair(literal)?],
            _ => {
                let items = literal
                    .as_array()
                    .ok_or_else(|| bad(format!("expected an array of pairs, found {literal}")))?;
                items.iter().map(pair).collect::<Result<Vec<_>>>()?
            }
        };
        Self::new(kind, data)
    }
}

impl fmt::Display for FiberElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind, self.to_literal())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn m2(entries: [(f64, f64); 4]) -> FiberElement {
        FiberElement::matrix(2, entries.iter().map(|&(r, i)| c(r, i)).collect()).unwrap()
    }

    #[test]
    fn descriptor_bounds() {
        assert!(FiberKind::Matrix { n: 0 }.validate().is_err());
        assert!(FiberKind::Matrix { n: 9 }.validate().is_err());
        assert!(FiberKind::Function { k: 65 }.validate().is_err());
        assert!(FiberKind::Function { k: 64 }.validate().is_ok());
        assert!(matches!(
            FiberElement::matrix(2, vec![ONE; 3]),
            Err(Error::ShapeMismatch {
                expected: 4,
                found: 3,
                ..
            })
        ));
    }

    #[test]
    fn matrix_units_multiply() {
        let e12 = FiberElement::matrix_unit(2, 0, 1).unwrap();
        let e21 = FiberElement::matrix_unit(2, 1, 0).unwrap();
        let e11 = FiberElement::matrix_unit(2, 0, 0).unwrap();
        assert_eq!(e12.mul(&e21).unwrap(), e11);
        assert!(e12.mul(&e12).unwrap().is_zero());
        let a = m2([(1.0, 2.0), (3.0, -1.0), (0.5, 0.0), (0.0, 4.0)]);
        assert_eq!(FiberElement::unit(a.kind()).mul(&a).unwrap(), a);
    }

    #[test]
    fn kind_mismatch_is_an_error() {
        let a = FiberElement::scalar(ONE);
        let b = FiberElement::unit(FiberKind::Matrix { n: 2 });
        assert!(matches!(a.add(&b), Err(Error::DescriptorMismatch { .. })));
    }

    #[test]
    fn norms() {
        // [[0,1],[0,0]]: A*A = diag(0, 1), largest eigenvalue 1.
        let n = FiberElement::matrix_unit(2, 0, 1).unwrap();
        assert!((n.norm() - 1.0).abs() < 1e-15);
        for d in 1..=8 {
            assert!((FiberElement::unit(FiberKind::Matrix { n: d }).norm() - 1.0).abs() < 1e-14);
        }
        let d = m2([(3.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, -4.0)]);
        assert!((d.norm() - 4.0).abs() < 1e-14);
        let f = FiberElement::function(vec![c(3.0, 4.0), c(-1.0, 0.0)]).unwrap();
        assert_eq!(f.norm(), 5.0);
        assert_eq!(FiberElement::unit(FiberKind::Function { k: 5 }).norm(), 1.0);
    }

    #[test]
    fn inverses() {
        let two = FiberElement::scalar(c(2.0, 0.0));
        assert_eq!(
            two.inverse(1e-10).ok().unwrap(),
            FiberElement::scalar(c(0.5, 0.0))
        );
        let e11 = FiberElement::matrix_unit(2, 0, 0).unwrap();
        assert!(matches!(
            e11.inverse(1e-10),
            FiberInverse::NotInvertible { .. }
        ));
        let u = m2([(1.0, 0.0), (0.5, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let want = m2([(1.0, 0.0), (-0.5, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let got = u.inverse(1e-10).ok().unwrap();
        assert!(got.distance(&want).unwrap() < 1e-15);
        let f = FiberElement::function(vec![c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(!f.is_invertible(1e-10));
    }

    #[test]
    fn spectra() {
        let d = m2([(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (2.0, 0.0)]);
        assert_eq!(d.spectrum(1e-8).unwrap(), vec![c(1.0, 0.0), c(2.0, 0.0)]);
        let nil = m2([(0.0, 0.0), (0.5, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        assert_eq!(nil.spectrum(1e-8).unwrap(), vec![ZERO, ZERO]);
        // roots of λ² − 1
        let swap = m2([(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 0.0)]);
        let s = swap.spectrum(1e-8).unwrap();
        assert!((s[0] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((s[1] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn literals() {
        let kind = FiberKind::Matrix { n: 2 };
        let lit: Value = serde_json::from_str("[[0,0],[1,0],[0,0],[0,-1]]").unwrap();
        let a = FiberElement::from_literal(kind, &lit).unwrap();
        assert_eq!(
            a.to_literal(),
            serde_json::json!([[0.0, 0.0], [1.0, 0.0], [0.0, 0.0], [0.0, -1.0]])
        );
        assert!(FiberElement::from_literal(kind, &serde_json::json!([[0, 0]])).is_err());
        assert!(FiberElement::from_literal(FiberKind::Scalar, &serde_json::json!([1])).is_err());
        let s =
            FiberElement::from_literal(FiberKind::Scalar, &serde_json::json!([1.5, 2])).unwrap();
        assert_eq!(s.as_scalar(), Some(c(1.5, 2.0)));
    }
}
