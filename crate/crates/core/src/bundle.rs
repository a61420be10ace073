//! Measurable bundles of fiber algebras and their sections.
//!
//! A [`Section`] assigns one fiber element to every atom. Over a finite
//! atomic space every section is simple, so the set of all sections is the
//! algebra `E(Ω, X)` itself, normed by the `E`-valued map
//! `ω ↦ ‖u(ω)‖_{X(ω)}`. The liftings `p` and `ℓ_X` are identities here and
//! are exposed as named maps only so that formulas using them have a home.

use std::sync::Arc;

use num_complex::Complex64;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::fiber::{FiberElement, FiberKind};
use crate::measure::{same_space, EFunction, Idempotent, PartitionOfUnity, SpaceRef};

/// Tolerance on `λ₁ + λ₂ = ‖u‖` in [`Section::d_decompose`].
pub const DECOMPOSE_SUM_TOLERANCE: f64 = 1e-10;
/// Tolerance on `λ₁·λ₂ = 0` in [`Section::d_decompose`].
pub const DECOMPOSE_DISJOINT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Bundle {
    space: SpaceRef,
    fibers: Vec<FiberKind>,
}

pub type BundleRef = Arc<Bundle>;

impl Bundle {
    pub fn new(space: &SpaceRef, fibers: Vec<FiberKind>) -> Result<BundleRef> {
        if fibers.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                found: fibers.len(),
            });
        }
        for k in &fibers {
            k.validate()?;
        }
        Ok(Arc::new(Self {
            space: space.clone(),
            fibers,
        }))
    }

    /// The same fiber at every atom.
    pub fn uniform(space: &SpaceRef, kind: FiberKind) -> Result<BundleRef> {
        Self::new(space, vec![kind; space.len()])
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn fibers(&self) -> &[FiberKind] {
        &self.fibers
    }

    pub fn fiber(&self, atom: usize) -> FiberKind {
        self.fibers[atom]
    }

    pub fn len(&self) -> usize {
        self.fibers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fibers.is_empty()
    }

    pub fn all_one_dimensional(&self) -> bool {
        self.fibers.iter().all(|k| k.is_one_dimensional())
    }
}

fn same_bundle(a: &BundleRef, b: &BundleRef) -> bool {
    Arc::ptr_eq(a, b) || (same_space(&a.space, &b.space) && a.fibers == b.fibers)
}

fn check_bundle(a: &BundleRef, b: &BundleRef) -> Result<()> {
    if same_bundle(a, b) {
        Ok(())
    } else {
        Err(Error::BundleMismatch)
    }
}

/// An element of `E(Ω, X)`.
#[derive(Debug, Clone)]
pub struct Section {
    bundle: BundleRef,
    values: Vec<FiberElement>,
}

impl PartialEq for Section {
    fn eq(&self, other: &Self) -> bool {
        same_bundle(&self.bundle, &other.bundle) && self.values == other.values
    }
}

impl Section {
    pub fn new(bundle: &BundleRef, values: Vec<FiberElement>) -> Result<Self> {
        if values.len() != bundle.len() {
            return Err(Error::LengthMismatch {
                expected: bundle.len(),
                found: values.len(),
            });
        }
        for (i, v) in values.iter().enumerate() {
            if v.kind() != bundle.fiber(i) {
                return Err(Error::DescriptorMismatch {
                    left: format!("{} at atom `{}`", bundle.fiber(i), bundle.space.atom(i)),
                    right: v.kind().to_string(),
                });
            }
        }
        Ok(Self {
            bundle: bundle.clone(),
            values,
        })
    }

    pub fn from_fn(bundle: &BundleRef, f: impl FnMut(usize) -> FiberElement) -> Result<Self> {
        Self::new(bundle, (0..bundle.len()).map(f).collect())
    }

    /// The unit `e`.
    pub fn unit(bundle: &BundleRef) -> Self {
        Self {
            bundle: bundle.clone(),
            values: bundle
                .fibers
                .iter()
                .map(|&k| FiberElement::unit(k))
                .collect(),
        }
    }

    pub fn zero(bundle: &BundleRef) -> Self {
        Self {
            bundle: bundle.clone(),
            values: bundle
                .fibers
                .iter()
                .map(|&k| FiberElement::zero(k))
                .collect(),
        }
    }

    pub fn bundle(&self) -> &BundleRef {
        &self.bundle
    }

    pub fn space(&self) -> &SpaceRef {
        &self.bundle.space
    }

    pub fn values(&self) -> &[FiberElement] {
        &self.values
    }

    pub fn value(&self, atom: usize) -> &FiberElement {
        &self.values[atom]
    }

    fn zip_with(
        &self,
        other: &Section,
        f: impl Fn(&FiberElement, &FiberElement) -> Result<FiberElement>,
    ) -> Result<Section> {
        check_bundle(&self.bundle, &other.bundle)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| f(a, b))
            .collect::<Result<_>>()?;
        Ok(Self {
            bundle: self.bundle.clone(),
            values,
        })
    }

    pub fn add(&self, other: &Section) -> Result<Section> {
        self.zip_with(other, FiberElement::add)
    }

    pub fn sub(&self, other: &Section) -> Result<Section> {
        self.zip_with(other, FiberElement::sub)
    }

    pub fn mul(&self, other: &Section) -> Result<Section> {
        self.zip_with(other, FiberElement::mul)
    }

    pub fn scale(&self, lambda: Complex64) -> Section {
        Self {
            bundle: self.bundle.clone(),
            values: self.values.iter().map(|v| v.scale(lambda)).collect(),
        }
    }

    /// Module action of `E`: `(a·u)(ω) = a(ω)·u(ω)`.
    pub fn module_mul(&self, a: &EFunction) -> Result<Section> {
        if !same_space(self.space(), a.space()) {
            return Err(Error::SpaceMismatch);
        }
        Ok(Self {
            bundle: self.bundle.clone(),
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| v.scale(a.at(i)))
                .collect(),
        })
    }

    /// `π·u`.
    pub fn restrict(&self, pi: &Idempotent) -> Result<Section> {
        self.module_mul(&pi.as_efunction())
    }

    /// The `E`-valued norm `‖u‖`.
    pub fn norm(&self) -> EFunction {
        EFunction::from_real_fn(self.space(), |i| self.values[i].norm())
    }

    /// `‖u − v‖` as an element of `E`.
    pub fn distance(&self, other: &Section) -> Result<EFunction> {
        Ok(self.sub(other)?.norm())
    }

    /// Largest atomwise `‖u(ω) − v(ω)‖`.
    pub fn max_distance(&self, other: &Section) -> Result<f64> {
        Ok(self.distance(other)?.max_abs())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(FiberElement::is_zero)
    }

    /// Split `u = x₁ + x₂` with `‖xₖ‖ = λₖ` for a disjoint decomposition
    /// `‖u‖ = λ₁ + λ₂`, `λ₁ ⊥ λ₂`.
    ///
    /// Each atom goes to the piece with the larger weight; where both weights
    /// vanish both pieces are zero.
    pub fn d_decompose(&self, l1: &EFunction, l2: &EFunction) -> Result<(Section, Section)> {
        let space = self.space();
        if !same_space(space, l1.space()) || !same_space(space, l2.space()) {
            return Err(Error::SpaceMismatch);
        }
        let norm = self.norm();
        let atom = |i: usize| space.atom(i).to_string();
        let mut first = Vec::with_capacity(self.values.len());
        let mut second = Vec::with_capacity(self.values.len());
        for (i, v) in self.values.iter().enumerate() {
            let (a, b) = (l1.at(i), l2.at(i));
            if a.im.abs() > DECOMPOSE_DISJOINT_TOLERANCE
                || b.im.abs() > DECOMPOSE_DISJOINT_TOLERANCE
                || a.re < 0.0
                || b.re < 0.0
            {
                return Err(Error::Precondition {
                    atom: atom(i),
                    reason: format!("weights must be real and non-negative, got {a} and {b}"),
                });
            }
            let (a, b) = (a.re, b.re);
            if (a + b - norm.at(i).re).abs() > DECOMPOSE_SUM_TOLERANCE {
                return Err(Error::Precondition {
                    atom: atom(i),
                    reason: format!("λ₁ + λ₂ = {} but ‖u‖ = {}", a + b, norm.at(i).re),
                });
            }
            if a * b > DECOMPOSE_DISJOINT_TOLERANCE {
                return Err(Error::Precondition {
                    atom: atom(i),
                    reason: format!("λ₁·λ₂ = {} is not zero", a * b),
                });
            }
            let zero = FiberElement::zero(v.kind());
            if a == 0.0 && b == 0.0 {
                first.push(zero.clone());
                second.push(zero);
            } else if a >= b {
                first.push(v.clone());
                second.push(zero);
            } else {
                first.push(zero);
                second.push(v.clone());
            }
        }
        Ok((
            Section::new(&self.bundle, first)?,
            Section::new(&self.bundle, second)?,
        ))
    }

    /// Glue `xs` along a partition: `Σ πₖ·xs[k]`.
    pub fn mix(partition: &PartitionOfUnity, xs: &[Section]) -> Result<Section> {
        if xs.len() != partition.len() {
            return Err(Error::LengthMismatch {
                expected: partition.len(),
                found: xs.len(),
            });
        }
        let Some(first) = xs.first() else {
            return Err(Error::InvalidPartition("no parts".into()));
        };
        if !same_space(partition.space(), first.space()) {
            return Err(Error::SpaceMismatch);
        }
        for x in xs {
            check_bundle(&first.bundle, &x.bundle)?;
        }
        Section::from_fn(&first.bundle, |i| {
            xs[partition.part_of(i)].values[i].clone()
        })
    }

    /// Scenario literal `{atom_id: fiber literal}`.
    pub fn to_literal(&self) -> Value {
        let map: Map<String, Value> = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| (self.space().atom(i).to_string(), v.to_literal()))
            .collect();
        Value::Object(map)
    }

    pub fn from_literal(bundle: &BundleRef, literal: &Value) -> Result<Section> {
        let map = literal
            .as_object()
            .ok_or_else(|| Error::InvalidArgument("section literal must be an object".into()))?;
        for key in map.keys() {
            bundle.space.index_of(key)?;
        }
        let values = (0..bundle.len())
            .map(|i| {
                let atom = bundle.space.atom(i);
                let lit = map.get(atom).ok_or_else(|| {
                    Error::InvalidArgument(format!("missing value for atom `{atom}`"))
                })?;
                FiberElement::from_literal(bundle.fiber(i), lit)
                    .map_err(|e| Error::InvalidArgument(format!("atom `{atom}`: {e}")))
            })
            .collect::<Result<_>>()?;
        Section::new(bundle, values)
    }
}

/// The scalar lifting `p`; the identity on a finite atomic space.
pub fn lifting_p(a: &EFunction) -> EFunction {
    a.clone()
}

/// The vector-valued lifting `ℓ_X`; the identity on a finite atomic space.
pub fn lifting_vec(u: &Section) -> Section {
    u.clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::AtomicMeasureSpace;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn scalar_bundle(n: usize) -> BundleRef {
        Bundle::uniform(&AtomicMeasureSpace::uniform(n).unwrap(), FiberKind::Scalar).unwrap()
    }

    fn scalars(b: &BundleRef, xs: &[f64]) -> Section {
        Section::new(b, xs.iter().map(|&x| FiberElement::scalar(c(x))).collect()).unwrap()
    }

    #[test]
    fn ring_operations() {
        let b = scalar_bundle(2);
        let u = scalars(&b, &[1.0, 2.0]);
        let v = scalars(&b, &[3.0, 4.0]);
        assert_eq!(u.mul(&v).unwrap(), scalars(&b, &[3.0, 8.0]));
        assert_eq!(u.mul(&Section::unit(&b)).unwrap(), u);
        assert_eq!(u.add(&Section::zero(&b)).unwrap(), u);
        let other = scalar_bundle(3);
        assert_eq!(u.add(&Section::unit(&other)), Err(Error::BundleMismatch));
    }

    #[test]
    fn descriptor_checked() {
        let b = scalar_bundle(2);
        let m = FiberElement::unit(FiberKind::Matrix { n: 2 });
        assert!(matches!(
            Section::new(&b, vec![m.clone(), m]),
            Err(Error::DescriptorMismatch { .. })
        ));
    }

    #[test]
    fn matrix_norms() {
        let space = AtomicMeasureSpace::uniform(2).unwrap();
        let b = Bundle::uniform(&space, FiberKind::Matrix { n: 2 }).unwrap();
        let e12 = FiberElement::matrix_unit(2, 0, 1).unwrap();
        let d = FiberElement::matrix(2, vec![c(3.0), c(0.0), c(0.0), c(1.0)]).unwrap();
        let u = Section::new(&b, vec![e12, d]).unwrap();
        let n = u.norm();
        assert!((n.at(0).re - 1.0).abs() < 1e-14 && (n.at(1).re - 3.0).abs() < 1e-14);
        assert_eq!(Section::unit(&b).norm(), EFunction::one(&space));
    }

    #[test]
    fn module_action() {
        let b = scalar_bundle(2);
        let u = scalars(&b, &[1.0, 2.0]);
        let one = EFunction::one(b.space());
        assert_eq!(u.module_mul(&one).unwrap(), u);
        let a = EFunction::from_real(b.space(), &[2.0, -1.0]).unwrap();
        assert_eq!(u.module_mul(&a).unwrap(), scalars(&b, &[2.0, -2.0]));
    }

    #[test]
    fn d_decomposition_cases() {
        let b = scalar_bundle(2);
        let u = scalars(&b, &[2.0, -3.0]);
        let norm = u.norm();
        let zero = EFunction::zero(b.space());
        let (x1, x2) = u.d_decompose(&norm, &zero).unwrap();
        assert_eq!((x1, x2.is_zero()), (u.clone(), true));

        let l1 = EFunction::from_real(b.space(), &[2.0, 0.0]).unwrap();
        let l2 = EFunction::from_real(b.space(), &[0.0, 3.0]).unwrap();
        let (x1, x2) = u.d_decompose(&l1, &l2).unwrap();
        assert_eq!(x1, scalars(&b, &[2.0, 0.0]));
        assert_eq!(x2, scalars(&b, &[0.0, -3.0]));

        let z = Section::zero(&b);
        let (x1, x2) = z.d_decompose(&zero, &zero).unwrap();
        assert!(x1.is_zero() && x2.is_zero());
    }

    #[test]
    fn d_decomposition_names_failing_atom() {
        let b = scalar_bundle(2);
        let u = scalars(&b, &[2.0, 3.0]);
        let l1 = EFunction::from_real(b.space(), &[1.0, 3.0]).unwrap();
        let l2 = EFunction::from_real(b.space(), &[1.0, 0.0]).unwrap();
        match u.d_decompose(&l1, &l2) {
            Err(Error::Precondition { atom, .. }) => assert_eq!(atom, "w1"),
            other => panic!("unexpected {other:?}"),
        }
        let l1 = EFunction::from_real(b.space(), &[2.0, 2.0]).unwrap();
        let l2 = EFunction::from_real(b.space(), &[0.0, 0.5]).unwrap();
        match u.d_decompose(&l1, &l2) {
            Err(Error::Precondition { atom, .. }) => assert_eq!(atom, "w2"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn liftings_are_identities() {
        let b = scalar_bundle(2);
        let one = EFunction::one(b.space());
        assert_eq!(lifting_p(&one), one);
        let e = Section::unit(&b);
        assert_eq!(lifting_vec(&e), e);
    }

    #[test]
    fn mixing_sections() {
        let b = scalar_bundle(2);
        let u = scalars(&b, &[1.0, 1.0]);
        let v = scalars(&b, &[2.0, 2.0]);
        let atoms = PartitionOfUnity::atoms(b.space());
        assert_eq!(
            Section::mix(&atoms, &[u.clone(), v.clone()]).unwrap(),
            scalars(&b, &[1.0, 2.0])
        );
        let triv = PartitionOfUnity::trivial(b.space());
        assert_eq!(Section::mix(&triv, std::slice::from_ref(&v)).unwrap(), v);
        assert_eq!(Section::mix(&atoms, &[u.clone(), u.clone()]).unwrap(), u);
        assert!(Section::mix(&atoms, &[u]).is_err());
    }

    #[test]
    fn literal_round_trip_and_errors() {
        let space = AtomicMeasureSpace::uniform(2).unwrap();
        let b = Bundle::new(&space, vec![FiberKind::Scalar, FiberKind::Matrix { n: 2 }]).unwrap();
        let u = Section::new(
            &b,
            vec![
                FiberElement::scalar(Complex64::new(1.0, -2.0)),
                FiberElement::matrix_unit(2, 1, 0).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(Section::from_literal(&b, &u.to_literal()).unwrap(), u);
        let bad = serde_json::json!({"w1": [1, 0], "w2": [[1, 0]]});
        let err = Section::from_literal(&b, &bad).unwrap_err().to_string();
        assert!(err.contains("w2"), "{err}");
    }
}
