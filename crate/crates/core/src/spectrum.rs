//! The vector spectra `sp(x)` and `spm(x)`.
//!
//! `sp(x)` collects the `a ∈ E` with `ae − x` not invertible, i.e. singular at
//! some atom; `spm(x)` those with `π(ae − x)` non-invertible in `πU` for every
//! nonzero idempotent `π`, i.e. singular at every atom. On an atomic space
//! `spm(x)` is exactly the set of atomwise selections from the fiber spectra,
//! so it is represented by its per-atom table and never materialized.

use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;

use crate::bundle::Section;
use crate::check::Check;
use crate::error::{Error, Result};
use crate::measure::{same_space, EFunction, SpaceRef};
use crate::random::Rng;

pub const DEFAULT_MEMBERSHIP_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_ENUMERATION_CAP: usize = 4096;

/// Number of shrinking perturbations used by the closedness probe.
const CLOSEDNESS_STEPS: i32 = 40;

#[derive(Debug, Clone)]
pub struct FiberSpectrumTable {
    space: SpaceRef,
    per_atom: Vec<Vec<Complex64>>,
    norms: Vec<f64>,
    tolerance: f64,
}

fn cmp_complex(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

impl FiberSpectrumTable {
    pub fn new(x: &Section, tol: f64) -> Result<Self> {
        let per_atom = x
            .values()
            .iter()
            .map(|v| v.spectrum(tol))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            space: x.space().clone(),
            per_atom,
            norms: x.norm().re(),
            tolerance: tol,
        })
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Eigenvalues at an atom with multiplicity, sorted by `(re, im)`.
    pub fn at(&self, atom: usize) -> &[Complex64] {
        &self.per_atom[atom]
    }

    /// Eigenvalues at an atom with values closer than the table tolerance merged.
    pub fn distinct(&self, atom: usize) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = Vec::new();
        for &l in &self.per_atom[atom] {
            if out.iter().all(|m| (m - l).norm() > self.tolerance) {
                out.push(l);
            }
        }
        out.sort_by(cmp_complex);
        out
    }

    /// Distance from `λ` to the fiber spectrum at `atom`.
    pub fn distance(&self, atom: usize, lambda: Complex64) -> f64 {
        self.per_atom[atom]
            .iter()
            .map(|m| (m - lambda).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Closest eigenvalue at `atom`.
    pub fn nearest(&self, atom: usize, lambda: Complex64) -> Complex64 {
        *self.per_atom[atom]
            .iter()
            .min_by(|a, b| (*a - lambda).norm().total_cmp(&(*b - lambda).norm()))
            .expect("fiber spectra are nonempty")
    }

    fn check_space(&self, a: &EFunction) -> Result<()> {
        if same_space(&self.space, a.space()) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    /// `a ∈ spm(x)`: `a(ω)` within `tol` of the fiber spectrum at every atom.
    pub fn spm_contains(&self, a: &EFunction, tol: f64) -> Result<bool> {
        self.check_space(a)?;
        Ok((0..self.space.len()).all(|i| self.distance(i, a.at(i)) <= tol))
    }

    /// `a ∈ sp(x)`: `a(ω)` within `tol` of the fiber spectrum at some atom.
    pub fn sp_contains(&self, a: &EFunction, tol: f64) -> Result<bool> {
        self.check_space(a)?;
        Ok((0..self.space.len()).any(|i| self.distance(i, a.at(i)) <= tol))
    }

    /// Every eigenvalue obeys `|λ| ≤ ‖x‖(ω) + tol`.
    pub fn is_bounded(&self, tol: f64) -> bool {
        self.per_atom
            .iter()
            .zip(&self.norms)
            .all(|(eigs, &n)| eigs.iter().all(|l| l.norm() <= n + tol))
    }

    pub fn to_json(&self) -> Value {
        let map: serde_json::Map<String, Value> = self
            .per_atom
            .iter()
            .enumerate()
            .map(|(i, eigs)| {
                let list = eigs.iter().map(|z| Value::from(vec![z.re, z.im])).collect();
                (self.space.atom(i).to_string(), Value::Array(list))
            })
            .collect();
        Value::Object(map)
    }
}

pub fn spectrum_table(x: &Section, tol: f64) -> Result<FiberSpectrumTable> {
    FiberSpectrumTable::new(x, tol)
}

pub fn spm_contains(x: &Section, a: &EFunction, tol: f64) -> Result<bool> {
    spectrum_table(x, tol)?.spm_contains(a, tol)
}

pub fn sp_contains(x: &Section, a: &EFunction, tol: f64) -> Result<bool> {
    spectrum_table(x, tol)?.sp_contains(a, tol)
}

fn singular_shifts(x: &Section, a: &EFunction, tol: f64) -> Result<Vec<bool>> {
    if !same_space(x.space(), a.space()) {
        return Err(Error::SpaceMismatch);
    }
    Ok(x.values()
        .iter()
        .enumerate()
        .map(|(i, v)| v.shifted(a.at(i)).smallest_singular_value() <= tol)
        .collect())
}

/// `spm` membership straight from the definition: `a(ω)e − x(ω)` has
/// smallest singular value at most `tol` at every atom.
pub fn spm_contains_by_invertibility(x: &Section, a: &EFunction, tol: f64) -> Result<bool> {
    Ok(singular_shifts(x, a, tol)?.into_iter().all(|b| b))
}

/// `sp` membership straight from the definition.
pub fn sp_contains_by_invertibility(x: &Section, a: &EFunction, tol: f64) -> Result<bool> {
    Ok(singular_shifts(x, a, tol)?.into_iter().any(|b| b))
}

#[derive(Debug, Clone)]
pub struct SpmEnumeration {
    pub members: Vec<EFunction>,
    /// Size of the full selection set, saturating.
    pub total: u64,
    pub truncated: bool,
}

/// Atomwise selections from the table, lexicographic in atom order then in
/// `(re, im)` order of the distinct eigenvalues; at most `cap` of them.
pub fn spm_enumerate(table: &FiberSpectrumTable, cap: usize) -> Result<SpmEnumeration> {
    if cap == 0 {
        return Err(Error::InvalidArgument(
            "enumeration cap must be at least 1".into(),
        ));
    }
    let choices: Vec<Vec<Complex64>> = (0..table.space.len()).map(|i| table.distinct(i)).collect();
    let total = choices
        .iter()
        .fold(1u64, |acc, c| acc.saturating_mul(c.len() as u64));
    let mut members = Vec::new();
    let mut idx = vec![0usize; choices.len()];
    'outer: loop {
        if members.len() == cap {
            break;
        }
        members.push(EFunction::from_fn(&table.space, |i| choices[i][idx[i]]));
        for pos in (0..idx.len()).rev() {
            idx[pos] += 1;
            if idx[pos] < choices[pos].len() {
                continue 'outer;
            }
            idx[pos] = 0;
        }
        break;
    }
    Ok(SpmEnumeration {
        truncated: (members.len() as u64) < total,
        members,
        total,
    })
}

/// Outcome of the `spm(x)` property suite.
#[derive(Debug, Clone, Serialize)]
pub struct PropertyReport {
    pub member_count: usize,
    pub total_selections: u64,
    pub truncated: bool,
    pub nonempty: Check,
    pub cyclic: Check,
    pub closed: Check,
    pub bounded: Check,
    /// Table membership agrees with the singular-value definition on mixes.
    pub definitional: Check,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        [
            &self.nonempty,
            &self.cyclic,
            &self.closed,
            &self.bounded,
            &self.definitional,
        ]
        .iter()
        .all(|c| c.passed())
    }

    pub fn checks(&self) -> [&Check; 5] {
        [
            &self.nonempty,
            &self.cyclic,
            &self.closed,
            &self.bounded,
            &self.definitional,
        ]
    }
}

fn random_selection(table: &FiberSpectrumTable, rng: &mut Rng) -> EFunction {
    EFunction::from_fn(&table.space, |i| {
        let eigs = table.at(i);
        eigs[rng.index(eigs.len())]
    })
}

/// Check that `spm(x)` is nonempty, cyclic, (o)-closed and bounded by `‖x‖`.
pub fn spm_properties(
    x: &Section,
    samples: usize,
    tol: f64,
    cap: usize,
    rng: &mut Rng,
) -> Result<PropertyReport> {
    let table = spectrum_table(x, tol)?;
    let space = x.space().clone();
    let enumeration = spm_enumerate(&table, cap)?;
    let norm = x.norm();

    let mut nonempty = Check::new("nonempty");
    nonempty.record(!enumeration.members.is_empty(), || "no selections".into());
    for a in &enumeration.members {
        nonempty.record(table.spm_contains(a, tol)?, || {
            format!("enumerated {a} is not a member")
        });
    }

    let mut bounded = Check::new("bounded");
    for a in &enumeration.members {
        for i in 0..space.len() {
            bounded.record_le(a.at(i).norm(), norm.at(i).re, tol, || {
                format!("|a| > ‖x‖ at `{}` for a = {a}", space.atom(i))
            });
        }
    }

    let mut cyclic = Check::new("cyclic");
    let mut definitional = Check::new("membership via singular values");
    for _ in 0..samples {
        let partition = rng.partition(&space, space.len().max(2));
        let family: Vec<EFunction> = (0..partition.len())
            .map(|_| random_selection(&table, rng))
            .collect();
        let mixed = EFunction::mix(&partition, &family)?;
        let by_table = table.spm_contains(&mixed, tol)?;
        cyclic.record(by_table, || format!("mix {mixed} left spm(x)"));
        let by_definition = spm_contains_by_invertibility(x, &mixed, tol)?;
        definitional.record(by_table == by_definition, || {
            format!("table says {by_table}, definition says {by_definition} for {mixed}")
        });
    }

    // (o)-closedness: members perturbed by εₙ → 0, re-projected onto the table,
    // must order-converge to a member.
    let mut closed = Check::new("(o)-closed");
    for _ in 0..samples.clamp(1, 50) {
        let a = random_selection(&table, rng);
        let direction = rng.efunction(&space);
        let mut limit = a.clone();
        for step in 1..=CLOSEDNESS_STEPS {
            let eps = 0.5f64.powi(step);
            let perturbed = a.add(&direction.scale(Complex64::new(eps, 0.0)))?;
            let projected = EFunction::from_fn(&space, |i| table.nearest(i, perturbed.at(i)));
            closed.record(table.spm_contains(&projected, tol)?, || {
                format!("projection {projected} is not a member")
            });
            limit = projected;
        }
        let gap = limit.max_distance(&a)?;
        closed.record(gap <= tol && table.spm_contains(&limit, tol)?, || {
            format!("sequence from {a} converged to non-member {limit}")
        });
    }

    Ok(PropertyReport {
        member_count: enumeration.members.len(),
        total_selections: enumeration.total,
        truncated: enumeration.truncated,
        nonempty,
        cyclic,
        closed,
        bounded,
        definitional,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{Bundle, BundleRef};
    use crate::fiber::{FiberElement, FiberKind};
    use crate::measure::AtomicMeasureSpace;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn scalar_x() -> Section {
        let space = AtomicMeasureSpace::uniform(2).unwrap();
        let b = Bundle::uniform(&space, FiberKind::Scalar).unwrap();
        Section::new(
            &b,
            vec![FiberElement::scalar(c(1.0)), FiberElement::scalar(c(2.0))],
        )
        .unwrap()
    }

    fn diag_bundle() -> BundleRef {
        Bundle::uniform(
            &AtomicMeasureSpace::uniform(2).unwrap(),
            FiberKind::Matrix { n: 2 },
        )
        .unwrap()
    }

    fn diag(a: f64, b: f64) -> FiberElement {
        FiberElement::matrix(2, vec![c(a), c(0.0), c(0.0), c(b)]).unwrap()
    }

    fn diag_x() -> Section {
        Section::new(&diag_bundle(), vec![diag(1.0, 2.0), diag(3.0, 4.0)]).unwrap()
    }

    fn real(space: &SpaceRef, v: &[f64]) -> EFunction {
        EFunction::from_real(space, v).unwrap()
    }

    #[test]
    fn tables() {
        let t = spectrum_table(&scalar_x(), 1e-8).unwrap();
        assert_eq!((t.at(0), t.at(1)), (&[c(1.0)][..], &[c(2.0)][..]));
        let t = spectrum_table(&diag_x(), 1e-8).unwrap();
        assert_eq!(t.at(0), &[c(1.0), c(2.0)]);
        assert_eq!(t.at(1), &[c(3.0), c(4.0)]);
        let z = spectrum_table(&Section::zero(&diag_bundle()), 1e-8).unwrap();
        assert_eq!(z.distinct(0), vec![c(0.0)]);
    }

    #[test]
    fn membership() {
        let x = scalar_x();
        let s = x.space().clone();
        assert!(spm_contains(&x, &real(&s, &[1.0, 2.0]), 1e-8).unwrap());
        let a = real(&s, &[1.0, 99.0]);
        assert!(!spm_contains(&x, &a, 1e-8).unwrap());
        assert!(sp_contains(&x, &a, 1e-8).unwrap());
        assert!(!sp_contains(&x, &real(&s, &[50.0, 99.0]), 1e-8).unwrap());
        assert!(spm_contains_by_invertibility(&x, &real(&s, &[1.0, 2.0]), 1e-8).unwrap());
        assert!(sp_contains_by_invertibility(&x, &a, 1e-8).unwrap());
    }

    #[test]
    fn enumeration_matches_cartesian_product() {
        let t = spectrum_table(&diag_x(), 1e-8).unwrap();
        let e = spm_enumerate(&t, 4096).unwrap();
        let s = t.space().clone();
        let want: Vec<EFunction> = [[1.0, 3.0], [1.0, 4.0], [2.0, 3.0], [2.0, 4.0]]
            .iter()
            .map(|v| real(&s, v))
            .collect();
        assert_eq!(e.members, want);
        assert_eq!((e.total, e.truncated), (4, false));

        let capped = spm_enumerate(&t, 3).unwrap();
        assert_eq!((capped.members.len(), capped.truncated), (3, true));
        assert!(spm_enumerate(&t, 0).is_err());

        let t = spectrum_table(&scalar_x(), 1e-8).unwrap();
        assert_eq!(spm_enumerate(&t, 10).unwrap().members.len(), 1);

        let one = AtomicMeasureSpace::uniform(1).unwrap();
        let b = Bundle::uniform(&one, FiberKind::Matrix { n: 2 }).unwrap();
        let x = Section::new(&b, vec![diag(1.0, 2.0)]).unwrap();
        let t = spectrum_table(&x, 1e-8).unwrap();
        assert_eq!(spm_enumerate(&t, 10).unwrap().members.len(), 2);
    }

    #[test]
    fn property_suite_on_examples() {
        let mut rng = Rng::new(0);
        let r = spm_properties(&diag_x(), 50, 1e-8, 4096, &mut rng).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.member_count, 4);
        let z = Section::zero(&diag_bundle());
        let r = spm_properties(&z, 20, 1e-8, 4096, &mut rng).unwrap();
        assert!(r.passed());
        assert_eq!(r.member_count, 1);
    }
}
