//! Finite atomic measure spaces and the function algebra `E = L⁰(Ω)` over them.
//!
//! On a finite atomic space every atom carries positive mass, so "almost
//! everywhere" means "at every atom" and `L⁰ = L^∞` coincide with every
//! faithful solid subalgebra. A single model, [`EFunction`], stands for all
//! of them. Weights are kept for bookkeeping only; no operation integrates.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Imaginary parts below this are treated as zero by the order relations.
pub const REAL_TOLERANCE: f64 = 1e-12;

/// `(Ω, Σ, μ)` with finitely many atoms, each of strictly positive mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomicMeasureSpace {
    atoms: Vec<String>,
    weights: Vec<f64>,
}

pub type SpaceRef = Arc<AtomicMeasureSpace>;

impl AtomicMeasureSpace {
    pub fn new<I, S>(atoms: I) -> Result<SpaceRef>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let (atoms, weights): (Vec<String>, Vec<f64>) =
            atoms.into_iter().map(|(id, w)| (id.into(), w)).unzip();
        if atoms.is_empty() {
            return Err(Error::InvalidSpace("at least one atom is required".into()));
        }
        for (i, id) in atoms.iter().enumerate() {
            if atoms[..i].contains(id) {
                return Err(Error::InvalidSpace(format!("duplicate atom `{id}`")));
            }
            let w = weights[i];
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidSpace(format!(
                    "atom `{id}` has non-positive or non-finite weight {w}"
                )));
            }
        }
        Ok(Arc::new(Self { atoms, weights }))
    }

    /// `n` atoms named `w1..wn`, each of mass `1/n`.
    pub fn uniform(n: usize) -> Result<SpaceRef> {
        let w = 1.0 / n.max(1) as f64;
        Self::new((1..=n).map(|i| (format!("w{i}"), w)))
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn atom(&self, index: usize) -> &str {
        &self.atoms[index]
    }

    pub fn weight(&self, index: usize) -> f64 {
        self.weights[index]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn index_of(&self, atom: &str) -> Result<usize> {
        self.atoms
            .iter()
            .position(|a| a == atom)
            .ok_or_else(|| Error::UnknownAtom(atom.to_string()))
    }
}

pub(crate) fn same_space(a: &SpaceRef, b: &SpaceRef) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn check_space(a: &SpaceRef, b: &SpaceRef) -> Result<()> {
    if same_space(a, b) {
        Ok(())
    } else {
        Err(Error::SpaceMismatch)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointwiseOp {
    Add,
    Sub,
    Mul,
}

impl PointwiseOp {
    fn apply(self, a: Complex64, b: Complex64) -> Complex64 {
        match self {
            PointwiseOp::Add => a + b,
            PointwiseOp::Sub => a - b,
            PointwiseOp::Mul => a * b,
        }
    }
}

/// An element of `E`: one complex value per atom.
#[derive(Debug, Clone)]
pub struct EFunction {
    space: SpaceRef,
    values: Vec<Complex64>,
}

impl PartialEq for EFunction {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.values == other.values
    }
}

impl EFunction {
    pub fn new(space: &SpaceRef, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                found: values.len(),
            });
        }
        Ok(Self {
            space: space.clone(),
            values,
        })
    }

    pub fn from_real(space: &SpaceRef, values: &[f64]) -> Result<Self> {
        Self::new(
            space,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn constant(space: &SpaceRef, value: Complex64) -> Self {
        Self {
            space: space.clone(),
            values: vec![value; space.len()],
        }
    }

    pub fn zero(space: &SpaceRef) -> Self {
        Self::constant(space, Complex64::new(0.0, 0.0))
    }

    pub fn one(space: &SpaceRef) -> Self {
        Self::constant(space, Complex64::new(1.0, 0.0))
    }

    pub(crate) fn from_fn(space: &SpaceRef, f: impl FnMut(usize) -> Complex64) -> Self {
        Self {
            space: space.clone(),
            values: (0..space.len()).map(f).collect(),
        }
    }

    pub(crate) fn from_real_fn(space: &SpaceRef, mut f: impl FnMut(usize) -> f64) -> Self {
        Self::from_fn(space, |i| Complex64::new(f(i), 0.0))
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn at(&self, index: usize) -> Complex64 {
        self.values[index]
    }

    /// Real parts, for functions known to be real-valued (norms, weights).
    pub fn re(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            space: self.space.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn pointwise(&self, other: &EFunction, op: PointwiseOp) -> Result<EFunction> {
        check_space(&self.space, &other.space)?;
        Ok(Self {
            space: self.space.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| op.apply(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &EFunction) -> Result<EFunction> {
        self.pointwise(other, PointwiseOp::Add)
    }

    pub fn sub(&self, other: &EFunction) -> Result<EFunction> {
        self.pointwise(other, PointwiseOp::Sub)
    }

    pub fn mul(&self, other: &EFunction) -> Result<EFunction> {
        self.pointwise(other, PointwiseOp::Mul)
    }

    pub fn scale(&self, c: Complex64) -> EFunction {
        self.map(|v| c * v)
    }

    /// Pointwise modulus `|a|`.
    pub fn abs(&self) -> EFunction {
        self.map(|v| Complex64::new(v.norm(), 0.0))
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im.abs() <= REAL_TOLERANCE)
    }

    fn real_values(&self) -> Result<Vec<f64>> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if v.im.abs() <= REAL_TOLERANCE {
                    Ok(v.re)
                } else {
                    Err(Error::NotReal {
                        atom: self.space.atom(i).to_string(),
                        value: *v,
                    })
                }
            })
            .collect()
    }

    /// `a ≤ b` at every atom.
    pub fn leq(&self, other: &EFunction) -> Result<bool> {
        check_space(&self.space, &other.space)?;
        let (a, b) = (self.real_values()?, other.real_values()?);
        Ok(a.iter().zip(&b).all(|(x, y)| x <= y))
    }

    /// `a ≪ b`: strictly smaller at every atom.
    pub fn strict_lt(&self, other: &EFunction) -> Result<bool> {
        Ok(self.first_not_strictly_below(other)?.is_none())
    }

    /// First atom where `a(ω) < b(ω)` fails; used to name offending atoms.
    pub fn first_not_strictly_below(&self, other: &EFunction) -> Result<Option<usize>> {
        check_space(&self.space, &other.space)?;
        let (a, b) = (self.real_values()?, other.real_values()?);
        Ok(a.iter().zip(&b).position(|(x, y)| x >= y))
    }

    /// Indicator of `{ω : |a(ω)| > tol}`.
    pub fn support(&self, tol: f64) -> Idempotent {
        Idempotent {
            space: self.space.clone(),
            mask: self.values.iter().map(|v| v.norm() > tol).collect(),
        }
    }

    /// Glue `fns` along a partition: `Σ πₖ·fns[k]`.
    pub fn mix(partition: &PartitionOfUnity, fns: &[EFunction]) -> Result<EFunction> {
        if fns.len() != partition.len() {
            return Err(Error::LengthMismatch {
                expected: partition.len(),
                found: fns.len(),
            });
        }
        let space = partition.space();
        for f in fns {
            check_space(space, &f.space)?;
        }
        Ok(Self::from_fn(space, |i| {
            fns[partition.part_of(i)].values[i]
        }))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest pointwise distance `|a(ω) − b(ω)|`.
    pub fn max_distance(&self, other: &EFunction) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }
}

impl fmt::Display for EFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if v.im == 0.0 {
                write!(f, "{}", v.re)?;
            } else {
                write!(f, "{v}")?;
            }
        }
        write!(f, ")")
    }
}

/// An indicator function `χ_A`, i.e. an element of the Boolean algebra `∇`.
#[derive(Debug, Clone)]
pub struct Idempotent {
    space: SpaceRef,
    mask: Vec<bool>,
}

impl PartialEq for Idempotent {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.mask == other.mask
    }
}

impl Idempotent {
    pub fn new(space: &SpaceRef, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                found: mask.len(),
            });
        }
        Ok(Self {
            space: space.clone(),
            mask,
        })
    }

    pub fn unit(space: &SpaceRef) -> Self {
        Self {
            space: space.clone(),
            mask: vec![true; space.len()],
        }
    }

    pub fn zero(space: &SpaceRef) -> Self {
        Self {
            space: space.clone(),
            mask: vec![false; space.len()],
        }
    }

    /// `χ_{ω}` for a single atom.
    pub fn atom(space: &SpaceRef, index: usize) -> Self {
        let mut mask = vec![false; space.len()];
        mask[index] = true;
        Self {
            space: space.clone(),
            mask,
        }
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains(&self, index: usize) -> bool {
        self.mask[index]
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    pub fn complement(&self) -> Self {
        Self {
            space: self.space.clone(),
            mask: self.mask.iter().map(|b| !b).collect(),
        }
    }

    pub fn meet(&self, other: &Idempotent) -> Result<Self> {
        check_space(&self.space, &other.space)?;
        Ok(Self {
            space: self.space.clone(),
            mask: self
                .mask
                .iter()
                .zip(&other.mask)
                .map(|(a, b)| *a && *b)
                .collect(),
        })
    }

    pub fn join(&self, other: &Idempotent) -> Result<Self> {
        check_space(&self.space, &other.space)?;
        Ok(Self {
            space: self.space.clone(),
            mask: self
                .mask
                .iter()
                .zip(&other.mask)
                .map(|(a, b)| *a || *b)
                .collect(),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.mask.iter().all(|b| !b)
    }

    pub fn is_unit(&self) -> bool {
        self.mask.iter().all(|&b| b)
    }

    pub fn as_efunction(&self) -> EFunction {
        EFunction::from_real_fn(&self.space, |i| if self.mask[i] { 1.0 } else { 0.0 })
    }

    pub fn atom_ids(&self) -> Vec<String> {
        self.indices()
            .map(|i| self.space.atom(i).to_string())
            .collect()
    }
}

/// Finitely many pairwise disjoint idempotents whose join is `1`.
///
/// Parts may be zero; `part_of` resolves every atom to the unique part
/// containing it.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionOfUnity {
    parts: Vec<Idempotent>,
    owner: Vec<usize>,
}

impl PartitionOfUnity {
    pub fn new(parts: Vec<Idempotent>) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Err(Error::InvalidPartition("no parts".into()));
        };
        let space = first.space.clone();
        let mut owner = vec![usize::MAX; space.len()];
        for (k, part) in parts.iter().enumerate() {
            check_space(&space, &part.space)?;
            for i in part.indices() {
                if owner[i] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "parts {} and {k} overlap at atom `{}`",
                        owner[i],
                        space.atom(i)
                    )));
                }
                owner[i] = k;
            }
        }
        if let Some(i) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(Error::InvalidPartition(format!(
                "atom `{}` is not covered",
                space.atom(i)
            )));
        }
        Ok(Self { parts, owner })
    }

    /// The one-part partition `{1}`.
    pub fn trivial(space: &SpaceRef) -> Self {
        Self {
            parts: vec![Idempotent::unit(space)],
            owner: vec![0; space.len()],
        }
    }

    /// Build from a part label per atom; labels must lie in `0..count`.
    pub fn from_labels(space: &SpaceRef, labels: &[usize], count: usize) -> Result<Self> {
        if labels.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                found: labels.len(),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= count) {
            return Err(Error::InvalidPartition(format!(
                "label {bad} out of range for {count} parts"
            )));
        }
        let parts = (0..count)
            .map(|k| Idempotent {
                space: space.clone(),
                mask: labels.iter().map(|&l| l == k).collect(),
            })
            .collect();
        Ok(Self {
            parts,
            owner: labels.to_vec(),
        })
    }

    /// Every atom in its own part.
    pub fn atoms(space: &SpaceRef) -> Self {
        let labels: Vec<usize> = (0..space.len()).collect();
        Self::from_labels(space, &labels, space.len()).expect("labels are in range")
    }

    pub fn space(&self) -> &SpaceRef {
        &self.parts[0].space
    }

    pub fn parts(&self) -> &[Idempotent] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn part_of(&self, atom: usize) -> usize {
        self.owner[atom]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two() -> SpaceRef {
        AtomicMeasureSpace::uniform(2).unwrap()
    }

    #[test]
    fn rejects_bad_spaces() {
        assert!(AtomicMeasureSpace::new(Vec::<(String, f64)>::new()).is_err());
        assert!(AtomicMeasureSpace::new([("a", 1.0), ("a", 2.0)]).is_err());
        assert!(AtomicMeasureSpace::new([("a", 0.0)]).is_err());
        assert!(AtomicMeasureSpace::new([("a", f64::NAN)]).is_err());
        let s = AtomicMeasureSpace::new([("a", 0.25), ("b", 0.5)]).unwrap();
        assert_eq!(s.total_mass(), 0.75);
        assert_eq!(s.index_of("b").unwrap(), 1);
        assert!(matches!(s.index_of("z"), Err(Error::UnknownAtom(_))));
    }

    #[test]
    fn pointwise_arithmetic() {
        let s = two();
        let a = EFunction::from_real(&s, &[2.0, 3.0]).unwrap();
        let b = EFunction::from_real(&s, &[5.0, 7.0]).unwrap();
        assert_eq!(
            a.mul(&b).unwrap(),
            EFunction::from_real(&s, &[10.0, 21.0]).unwrap()
        );
        assert_eq!(a.mul(&EFunction::zero(&s)).unwrap(), EFunction::zero(&s));
        let cf = EFunction::new(&s, vec![c(1.0, 2.0), c(-3.0, 0.5)]).unwrap();
        assert_eq!(EFunction::one(&s).mul(&cf).unwrap(), cf);
        assert_eq!(a.sub(&a).unwrap(), EFunction::zero(&s));
    }

    #[test]
    fn space_mismatch_is_an_error() {
        let a = EFunction::one(&two());
        let b = EFunction::one(&AtomicMeasureSpace::uniform(3).unwrap());
        assert_eq!(a.add(&b), Err(Error::SpaceMismatch));
        assert!(EFunction::new(&two(), vec![c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn modulus() {
        let s = two();
        let a = EFunction::new(&s, vec![c(3.0, 4.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(a.abs(), EFunction::from_real(&s, &[5.0, 0.0]).unwrap());
        assert_eq!(EFunction::one(&s).abs(), EFunction::one(&s));
    }

    #[test]
    fn order_relations() {
        let s = two();
        let one = EFunction::one(&s);
        let a = EFunction::from_real(&s, &[0.5, 0.9]).unwrap();
        let b = EFunction::from_real(&s, &[0.5, 1.0]).unwrap();
        assert!(a.strict_lt(&one).unwrap());
        assert!(b.leq(&one).unwrap());
        assert!(!b.strict_lt(&one).unwrap());
        assert_eq!(b.first_not_strictly_below(&one).unwrap(), Some(1));
        assert!(a.leq(&a).unwrap());
        assert!(!a.strict_lt(&a).unwrap());
        let z = EFunction::new(&s, vec![c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(z.leq(&one), Err(Error::NotReal { .. })));
    }

    #[test]
    fn supports() {
        let s = two();
        let a = EFunction::from_real(&s, &[0.0, 5.0]).unwrap();
        assert_eq!(a.support(0.0).mask(), &[false, true]);
        assert!(EFunction::zero(&s).support(0.0).is_zero());
        assert!(EFunction::one(&s).support(0.0).is_unit());
    }

    #[test]
    fn idempotent_lattice() {
        let s = AtomicMeasureSpace::uniform(3).unwrap();
        let p = Idempotent::new(&s, vec![true, false, true]).unwrap();
        let q = p.complement();
        assert!(p.join(&q).unwrap().is_unit());
        assert!(p.meet(&q).unwrap().is_zero());
        let pe = p.as_efunction();
        assert_eq!(pe.mul(&pe).unwrap(), pe);
    }

    #[test]
    fn partitions_validate() {
        let s = AtomicMeasureSpace::uniform(3).unwrap();
        let p = Idempotent::new(&s, vec![true, true, false]).unwrap();
        let q = Idempotent::new(&s, vec![false, true, true]).unwrap();
        assert!(matches!(
            PartitionOfUnity::new(vec![p.clone(), q]),
            Err(Error::InvalidPartition(_))
        ));
        assert!(PartitionOfUnity::new(vec![p.clone()]).is_err());
        assert!(PartitionOfUnity::new(vec![p.clone(), p.complement()]).is_ok());
        assert!(PartitionOfUnity::from_labels(&s, &[0, 2, 1], 2).is_err());
    }

    #[test]
    fn mixing() {
        let s = two();
        let a = EFunction::from_real(&s, &[1.0, 1.0]).unwrap();
        let b = EFunction::from_real(&s, &[2.0, 2.0]).unwrap();
        let atoms = PartitionOfUnity::atoms(&s);
        assert_eq!(
            EFunction::mix(&atoms, &[a.clone(), b.clone()]).unwrap(),
            EFunction::from_real(&s, &[1.0, 2.0]).unwrap()
        );
        let triv = PartitionOfUnity::trivial(&s);
        assert_eq!(EFunction::mix(&triv, std::slice::from_ref(&b)).unwrap(), b);
        assert_eq!(EFunction::mix(&atoms, &[a.clone(), a.clone()]).unwrap(), a);
        assert!(matches!(
            EFunction::mix(&atoms, &[a]),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
