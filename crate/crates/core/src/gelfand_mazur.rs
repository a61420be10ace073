//! Checkers for the vector Gelfand–Mazur characterizations of `E`.
//!
//! Both hypotheses quantify over every element of `E(Ω, X)`, which sampling
//! cannot establish when some fiber has dimension above one. The checkers are
//! therefore sound in two directions only: a returned counterexample has been
//! re-verified, and `Isomorphic` is returned only when every fiber is
//! one-dimensional. Everything else is reported as `Inconclusive`.

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::bundle::{BundleRef, Section};
use crate::check::Check;
use crate::error::{Error, Result};
use crate::fiber::{FiberElement, FiberKind};
use crate::inversion::is_invertible;
use crate::measure::{EFunction, Idempotent, PartitionOfUnity};
use crate::random::Rng;

/// The coefficient `a_x` with `x = a_x·e`, for bundles of one-dimensional fibers.
pub fn iso_coefficient(x: &Section) -> Result<EFunction> {
    iso_coefficient_on(x, &Idempotent::unit(x.space()))
}

/// `a_x` on the atoms of `part`, zero elsewhere.
pub fn iso_coefficient_on(x: &Section, part: &Idempotent) -> Result<EFunction> {
    let values = x
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if !part.contains(i) {
                return Ok(Complex64::new(0.0, 0.0));
            }
            v.as_scalar().ok_or_else(|| Error::Precondition {
                atom: x.space().atom(i).to_string(),
                reason: format!("fiber {} is not one-dimensional", v.kind()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    EFunction::new(x.space(), values)
}

/// Samples backing an `Isomorphic` outcome for the map `x ↦ a_x`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct IsoCertificate {
    pub linear: Check,
    pub isometric: Check,
    pub multiplicative: Check,
    pub surjective: Check,
}

impl IsoCertificate {
    pub fn passed(&self) -> bool {
        self.checks().iter().all(|c| c.passed())
    }

    pub fn checks(&self) -> [&Check; 4] {
        [
            &self.linear,
            &self.isometric,
            &self.multiplicative,
            &self.surjective,
        ]
    }

    fn count(&self) -> usize {
        self.checks().iter().map(|c| c.checks).sum()
    }
}

/// Verify on `pairs` random samples, restricted to the atoms of `part`, that
/// `x ↦ a_x` is linear, isometric, multiplicative and onto `E`.
pub fn verify_isomorphism(
    bundle: &BundleRef,
    part: &Idempotent,
    pairs: usize,
    tol: f64,
    rng: &mut Rng,
) -> Result<IsoCertificate> {
    let space = bundle.space().clone();
    let mut linear = Check::new("x ↦ a_x linear");
    let mut isometric = Check::new("‖x‖ = |a_x|");
    let mut multiplicative = Check::new("a_{xy} = a_x·a_y");
    let mut surjective = Check::new("a_{a·e} = a");
    let e = Section::unit(bundle);
    let coeff = |x: &Section| iso_coefficient_on(x, part);
    for _ in 0..pairs.max(1) {
        let x = rng.section(bundle).restrict(part)?;
        let y = rng.section(bundle).restrict(part)?;
        let (ax, ay) = (coeff(&x)?, coeff(&y)?);
        let (nx, axy) = (x.norm(), coeff(&x.mul(&y)?)?);
        let (alpha, beta) = (rng.complex(), rng.complex());
        let combo = coeff(&x.scale(alpha).add(&y.scale(beta))?)?;
        let a = rng.efunction(&space).mul(&part.as_efunction())?;
        let back = coeff(&e.module_mul(&a)?)?;
        for i in part.indices() {
            let atom = || space.atom(i).to_string();
            isometric.record_close(nx.at(i).re, ax.at(i).norm(), tol, atom);
            multiplicative.record_close(0.0, (axy.at(i) - ax.at(i) * ay.at(i)).norm(), tol, atom);
            linear.record_close(
                0.0,
                (combo.at(i) - alpha * ax.at(i) - beta * ay.at(i)).norm(),
                tol,
                atom,
            );
            surjective.record_close(0.0, (back.at(i) - a.at(i)).norm(), tol, atom);
        }
    }
    Ok(IsoCertificate {
        linear,
        isometric,
        multiplicative,
        surjective,
    })
}

/// A replayable refutation of a theorem's hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// `‖u‖` has unit support but `u` is not invertible.
    UnitSupportNonInvertible { section: Section },
    /// `x, y ≠ 0` on `localized_on` with `xy = 0` there, so no `m ∈ E`
    /// satisfies `‖x‖‖y‖ ≤ m‖xy‖`.
    ZeroDivisors {
        x: Section,
        y: Section,
        localized_on: Idempotent,
    },
}

impl Witness {
    /// Re-check the defining property of the witness.
    pub fn verify(&self, tol: f64) -> Result<()> {
        match self {
            Witness::UnitSupportNonInvertible { section } => {
                if !section.norm().support(0.0).is_unit() {
                    return Err(Error::CheckFailed(
                        "witness does not have unit support".into(),
                    ));
                }
                if is_invertible(section, tol) {
                    return Err(Error::CheckFailed("witness is invertible".into()));
                }
                Ok(())
            }
            Witness::ZeroDivisors { x, y, localized_on } => {
                if localized_on.is_zero() {
                    return Err(Error::CheckFailed(
                        "zero-divisor witness has empty support".into(),
                    ));
                }
                let (nx, ny, nxy) = (x.norm(), y.norm(), x.mul(y)?.norm());
                for i in localized_on.indices() {
                    let atom = x.space().atom(i);
                    if nx.at(i).re * ny.at(i).re <= tol {
                        return Err(Error::CheckFailed(format!("‖x‖‖y‖ vanishes at `{atom}`")));
                    }
                    if nxy.at(i).re > tol {
                        return Err(Error::CheckFailed(format!("xy ≠ 0 at `{atom}`")));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Witness::UnitSupportNonInvertible { section } => json!({
                "type": "unit-support-non-invertible",
                "section": section.to_literal(),
            }),
            Witness::ZeroDivisors { x, y, localized_on } => json!({
                "type": "zero-divisors",
                "x": x.to_literal(),
                "y": y.to_literal(),
                "localized_on": localized_on.atom_ids(),
            }),
        }
    }

    pub fn from_json(bundle: &BundleRef, value: &Value) -> Result<Self> {
        let field = |name: &str| {
            value
                .get(name)
                .ok_or_else(|| Error::InvalidArgument(format!("witness is missing `{name}`")))
        };
        match field("type")?.as_str() {
            Some("unit-support-non-invertible") => Ok(Witness::UnitSupportNonInvertible {
                section: Section::from_literal(bundle, field("section")?)?,
            }),
            Some("zero-divisors") => {
                let space = bundle.space();
                let mut mask = vec![false; space.len()];
                let atoms = field("localized_on")?.as_array().ok_or_else(|| {
                    Error::InvalidArgument("`localized_on` must be a list".into())
                })?;
                for a in atoms {
                    let id = a
                        .as_str()
                        .ok_or_else(|| Error::InvalidArgument("atom ids must be strings".into()))?;
                    mask[space.index_of(id)?] = true;
                }
                Ok(Witness::ZeroDivisors {
                    x: Section::from_literal(bundle, field("x")?)?,
                    y: Section::from_literal(bundle, field("y")?)?,
                    localized_on: Idempotent::new(space, mask)?,
                })
            }
            other => Err(Error::InvalidArgument(format!(
                "unknown witness type {other:?}"
            ))),
        }
    }

    /// Parse and re-verify a witness taken from a report.
    pub fn replay(bundle: &BundleRef, value: &Value, tol: f64) -> Result<Self> {
        let w = Self::from_json(bundle, value)?;
        w.verify(tol)?;
        Ok(w)
    }
}

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum Outcome {
    Isomorphic {
        certificate: IsoCertificate,
        /// The constant `m` certified for the reverse bound, when applicable.
        m: Option<f64>,
    },
    Counterexample(Witness),
    Inconclusive {
        reason: String,
        /// Empirical `max ‖x‖‖y‖/‖xy‖` per atom, when computed.
        max_ratio: Option<Vec<f64>>,
    },
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Isomorphic { .. } => "isomorphic",
            Outcome::Counterexample(_) => "counterexample",
            Outcome::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// Where a part of the Case-2 partition `Ωₙ = {n ≤ m < n + 1}` sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Band {
    Finite(u64),
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct PartVerdict {
    pub part: Idempotent,
    pub band: Band,
    pub outcome: Outcome,
}

#[derive(Debug, Clone)]
pub struct GmVerdict {
    pub outcome: Outcome,
    pub checks_run: usize,
    pub tolerance: f64,
    pub samples: usize,
    /// Per-part verdicts for the reverse-bound checker; empty otherwise.
    pub parts: Vec<PartVerdict>,
}

impl GmVerdict {
    /// The verdict is internally consistent: certificates passed and
    /// witnesses re-verify.
    pub fn is_sound(&self) -> bool {
        let ok = |o: &Outcome| match o {
            Outcome::Isomorphic { certificate, .. } => certificate.passed(),
            Outcome::Counterexample(w) => w.verify(self.tolerance).is_ok(),
            Outcome::Inconclusive { .. } => true,
        };
        ok(&self.outcome) && self.parts.iter().all(|p| ok(&p.outcome))
    }

    pub fn to_json(&self) -> Value {
        let mut v = outcome_json(&self.outcome);
        let obj = v.as_object_mut().expect("outcome json is an object");
        obj.insert("checks_run".into(), self.checks_run.into());
        obj.insert("tolerance".into(), self.tolerance.into());
        obj.insert("samples".into(), self.samples.into());
        if !self.parts.is_empty() {
            let parts = self
                .parts
                .iter()
                .map(|p| {
                    let mut pv = outcome_json(&p.outcome);
                    let po = pv.as_object_mut().expect("object");
                    po.insert("atoms".into(), p.part.atom_ids().into());
                    po.insert(
                        "band".into(),
                        match p.band {
                            Band::Finite(n) => json!([n, n + 1]),
                            Band::Unbounded => json!("unbounded"),
                        },
                    );
                    pv
                })
                .collect::<Vec<_>>();
            obj.insert("parts".into(), parts.into());
        }
        v
    }
}

fn outcome_json(outcome: &Outcome) -> Value {
    match outcome {
        Outcome::Isomorphic { certificate, m } => json!({
            "outcome": "isomorphic",
            "m": m,
            "certificate": certificate,
        }),
        Outcome::Counterexample(w) => json!({
            "outcome": "counterexample",
            "witness": w.to_json(),
        }),
        Outcome::Inconclusive { reason, max_ratio } => json!({
            "outcome": "inconclusive",
            "reason": reason,
            "max_ratio": max_ratio,
        }),
    }
}

/// A norm-one element of the fiber with no inverse, if the fiber has one.
fn rank_deficient_probe(kind: FiberKind) -> Option<FiberElement> {
    match kind {
        FiberKind::Matrix { n } if n > 1 => FiberElement::matrix_unit(n, 0, 0).ok(),
        FiberKind::Function { k } if k > 1 => {
            let mut v = vec![Complex64::new(0.0, 0.0); k];
            v[0] = Complex64::new(1.0, 0.0);
            FiberElement::function(v).ok()
        }
        _ => None,
    }
}

/// Nonzero `x, y` with `xy = 0` in the fiber, if the fiber has zero divisors.
fn zero_divisor_probe(kind: FiberKind) -> Option<(FiberElement, FiberElement)> {
    match kind {
        FiberKind::Matrix { n } if n > 1 => {
            let e12 = FiberElement::matrix_unit(n, 0, 1).ok()?;
            Some((e12.clone(), e12))
        }
        FiberKind::Function { k } if k > 1 => {
            let delta = |j: usize| {
                let mut v = vec![Complex64::new(0.0, 0.0); k];
                v[j] = Complex64::new(1.0, 0.0);
                FiberElement::function(v).expect("k within bounds")
            };
            Some((delta(0), delta(1)))
        }
        _ => None,
    }
}

/// Look for an element of unit support that is not invertible; if none exists
/// and all fibers are one-dimensional, certify `E(Ω, X) ≅ E` through `x ↦ a_x`.
pub fn gm_unit_support_check(
    bundle: &BundleRef,
    samples: usize,
    tol: f64,
    rng: &mut Rng,
) -> Result<GmVerdict> {
    let mut checks_run = 0;
    let verdict = |outcome: Outcome, checks_run: usize| GmVerdict {
        outcome,
        checks_run,
        tolerance: tol,
        samples,
        parts: Vec::new(),
    };

    // structured probe: rank-deficient where possible, unit elsewhere
    if bundle
        .fibers()
        .iter()
        .any(|k| rank_deficient_probe(*k).is_some())
    {
        let section = Section::from_fn(bundle, |i| {
            let k = bundle.fiber(i);
            rank_deficient_probe(k).unwrap_or_else(|| FiberElement::unit(k))
        })?;
        checks_run += 1;
        let w = Witness::UnitSupportNonInvertible { section };
        if w.verify(tol).is_ok() {
            return Ok(verdict(Outcome::Counterexample(w), checks_run));
        }
    }

    let radius = vec![1.0; bundle.len()];
    for _ in 0..samples {
        let section = rng.section_with_norm(bundle, &radius);
        checks_run += 1;
        if !is_invertible(&section, tol) {
            let w = Witness::UnitSupportNonInvertible { section };
            if w.verify(tol).is_ok() {
                return Ok(verdict(Outcome::Counterexample(w), checks_run));
            }
        }
    }

    if !bundle.all_one_dimensional() {
        return Ok(verdict(
            Outcome::Inconclusive {
                reason: "no non-invertible element of unit support found, but some fiber has \
                         dimension > 1 so the hypothesis cannot be established by sampling"
                    .into(),
                max_ratio: None,
            },
            checks_run,
        ));
    }

    let certificate =
        verify_isomorphism(bundle, &Idempotent::unit(bundle.space()), samples, tol, rng)?;
    checks_run += certificate.count();
    let outcome = if certificate.passed() {
        Outcome::Isomorphic {
            certificate,
            m: None,
        }
    } else {
        Outcome::Inconclusive {
            reason: "isomorphism verification failed".into(),
            max_ratio: None,
        }
    };
    Ok(verdict(outcome, checks_run))
}

/// Decide whether some `m ∈ E` satisfies `‖x‖‖y‖ ≤ m‖xy‖`.
///
/// The empirical `m` is estimated per atom (infinite where the fiber has zero
/// divisors), atoms are grouped into the bands `{n ≤ m < n + 1}`, each part is
/// decided on its own, and the part verdicts are glued: any unbounded part
/// yields a counterexample localized on it; if every part is isomorphic the
/// per-part maps glue into `x ↦ a_x` on the whole bundle.
pub fn gm_reverse_bound_check(
    bundle: &BundleRef,
    samples: usize,
    tol: f64,
    rng: &mut Rng,
) -> Result<GmVerdict> {
    let space = bundle.space().clone();
    let mut checks_run = 0;

    // empirical m per atom; x = y = e gives m ≥ 1
    let mut m_emp = vec![1.0f64; space.len()];
    let mut equality = Check::new("‖x‖‖y‖ = ‖xy‖");
    let mut probes: Vec<Option<(FiberElement, FiberElement)>> = Vec::with_capacity(space.len());
    for (i, &kind) in bundle.fibers().iter().enumerate() {
        let probe = zero_divisor_probe(kind);
        if probe.is_some() {
            m_emp[i] = f64::INFINITY;
            checks_run += 1;
        }
        probes.push(probe);
    }
    for _ in 0..samples {
        let (x, y) = (rng.section(bundle), rng.section(bundle));
        let (nx, ny, nxy) = (x.norm(), y.norm(), x.mul(&y)?.norm());
        for i in 0..space.len() {
            if m_emp[i].is_infinite() {
                continue;
            }
            checks_run += 1;
            let lhs = nx.at(i).re * ny.at(i).re;
            let rhs = nxy.at(i).re;
            if bundle.fiber(i).is_one_dimensional() {
                equality.record_close(lhs, rhs, tol, || format!("atom `{}`", space.atom(i)));
            }
            if rhs > 0.0 {
                m_emp[i] = m_emp[i].max(lhs / rhs);
            } else if lhs > 0.0 {
                m_emp[i] = f64::INFINITY;
                probes[i] = Some((x.value(i).clone(), y.value(i).clone()));
            }
        }
    }

    let band_of = |m: f64| {
        if m.is_finite() {
            Band::Finite(m.floor() as u64)
        } else {
            Band::Unbounded
        }
    };
    let mut bands: Vec<Band> = m_emp.iter().map(|&m| band_of(m)).collect::<Vec<_>>();
    bands.sort();
    bands.dedup();
    let labels: Vec<usize> = m_emp
        .iter()
        .map(|&m| bands.binary_search(&band_of(m)).expect("band present"))
        .collect();
    let partition = PartitionOfUnity::from_labels(&space, &labels, bands.len())?;

    let mut parts = Vec::with_capacity(bands.len());
    for (part, &band) in partition.parts().iter().zip(&bands) {
        let outcome = match band {
            Band::Unbounded => {
                let pick = |first: bool| {
                    Section::from_fn(bundle, |i| match (&probes[i], part.contains(i)) {
                        (Some((x, y)), true) => {
                            if first {
                                x.clone()
                            } else {
                                y.clone()
                            }
                        }
                        _ => FiberElement::zero(bundle.fiber(i)),
                    })
                };
                Outcome::Counterexample(Witness::ZeroDivisors {
                    x: pick(true)?,
                    y: pick(false)?,
                    localized_on: part.clone(),
                })
            }
            Band::Finite(n) => {
                let one_dim = part.indices().all(|i| bundle.fiber(i).is_one_dimensional());
                if one_dim && equality.passed() {
                    let certificate = verify_isomorphism(bundle, part, samples, tol, rng)?;
                    checks_run += certificate.count();
                    if certificate.passed() {
                        Outcome::Isomorphic {
                            certificate,
                            m: Some(part.indices().map(|i| m_emp[i]).fold(1.0, f64::max)),
                        }
                    } else {
                        Outcome::Inconclusive {
                            reason: "isomorphism verification failed on part".into(),
                            max_ratio: Some(m_emp.clone()),
                        }
                    }
                } else {
                    Outcome::Inconclusive {
                        reason: format!(
                            "empirical m in [{n}, {}) but fibers of dimension > 1 admit no \
                             sampling proof",
                            n + 1
                        ),
                        max_ratio: Some(m_emp.clone()),
                    }
                }
            }
        };
        parts.push(PartVerdict {
            part: part.clone(),
            band,
            outcome,
        });
    }
    checks_run += equality.checks;

    let outcome = glue(bundle, &partition, &parts, samples, tol, rng, &m_emp)?;
    if let Outcome::Isomorphic { certificate, .. } = &outcome {
        checks_run += certificate.count();
    }
    Ok(GmVerdict {
        outcome,
        checks_run,
        tolerance: tol,
        samples,
        parts,
    })
}

/// Combine per-part verdicts: counterexample sections are mixed over the
/// partition (zero elsewhere); isomorphisms are mixed and re-verified globally.
fn glue(
    bundle: &BundleRef,
    partition: &PartitionOfUnity,
    parts: &[PartVerdict],
    samples: usize,
    tol: f64,
    rng: &mut Rng,
    m_emp: &[f64],
) -> Result<Outcome> {
    let counter: Vec<&PartVerdict> = parts
        .iter()
        .filter(|p| matches!(p.outcome, Outcome::Counterexample(_)))
        .collect();
    if !counter.is_empty() {
        let zero = Section::zero(bundle);
        let mut xs = vec![zero.clone(); parts.len()];
        let mut ys = vec![zero; parts.len()];
        let mut support = Idempotent::zero(bundle.space());
        for (k, p) in parts.iter().enumerate() {
            if let Outcome::Counterexample(Witness::ZeroDivisors { x, y, localized_on }) =
                &p.outcome
            {
                xs[k] = x.clone();
                ys[k] = y.clone();
                support = support.join(localized_on)?;
            }
        }
        let w = Witness::ZeroDivisors {
            x: Section::mix(partition, &xs)?,
            y: Section::mix(partition, &ys)?,
            localized_on: support,
        };
        w.verify(tol)?;
        return Ok(Outcome::Counterexample(w));
    }
    if parts
        .iter()
        .all(|p| matches!(p.outcome, Outcome::Isomorphic { .. }))
    {
        let certificate =
            verify_isomorphism(bundle, &Idempotent::unit(bundle.space()), samples, tol, rng)?;
        let m = m_emp.iter().copied().fold(1.0, f64::max);
        return Ok(if certificate.passed() {
            Outcome::Isomorphic {
                certificate,
                m: Some(m),
            }
        } else {
            Outcome::Inconclusive {
                reason: "glued isomorphism failed verification".into(),
                max_ratio: Some(m_emp.to_vec()),
            }
        });
    }
    Ok(Outcome::Inconclusive {
        reason: "some parts are inconclusive".into(),
        max_ratio: Some(m_emp.to_vec()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::Bundle;
    use crate::measure::AtomicMeasureSpace;

    fn bundle(kinds: Vec<FiberKind>) -> BundleRef {
        Bundle::new(&AtomicMeasureSpace::uniform(kinds.len()).unwrap(), kinds).unwrap()
    }

    #[test]
    fn scalar_fibers_are_isomorphic() {
        let mut rng = Rng::new(0);
        let b = bundle(vec![FiberKind::Scalar; 3]);
        let v = gm_unit_support_check(&b, 50, 1e-10, &mut rng).unwrap();
        assert!(
            matches!(v.outcome, Outcome::Isomorphic { .. }),
            "{:?}",
            v.outcome
        );
        assert!(v.is_sound());
        let f = bundle(vec![FiberKind::Function { k: 1 }; 2]);
        let v = gm_unit_support_check(&f, 20, 1e-10, &mut rng).unwrap();
        assert!(matches!(v.outcome, Outcome::Isomorphic { .. }));
    }

    #[test]
    fn matrix_fibers_have_non_invertible_unit_support_elements() {
        let mut rng = Rng::new(0);
        let b = bundle(vec![FiberKind::Matrix { n: 2 }; 2]);
        let v = gm_unit_support_check(&b, 50, 1e-10, &mut rng).unwrap();
        let Outcome::Counterexample(Witness::UnitSupportNonInvertible { section }) = &v.outcome
        else {
            panic!("expected counterexample, got {:?}", v.outcome);
        };
        let e11 = FiberElement::matrix_unit(2, 0, 0).unwrap();
        assert!(section.values().iter().all(|x| x == &e11));
        assert_eq!(section.norm(), EFunction::one(b.space()));
    }

    #[test]
    fn reverse_bound_scalar_and_matrix() {
        let mut rng = Rng::new(0);
        let b = bundle(vec![FiberKind::Scalar; 2]);
        let v = gm_reverse_bound_check(&b, 50, 1e-10, &mut rng).unwrap();
        assert!(
            matches!(v.outcome, Outcome::Isomorphic { m: Some(m), .. } if m == 1.0 || (m - 1.0).abs() < 1e-12)
        );

        let b = bundle(vec![FiberKind::Matrix { n: 2 }; 2]);
        let v = gm_reverse_bound_check(&b, 50, 1e-10, &mut rng).unwrap();
        let Outcome::Counterexample(Witness::ZeroDivisors { x, y, localized_on }) = &v.outcome
        else {
            panic!("{:?}", v.outcome);
        };
        assert!(localized_on.is_unit());
        assert_eq!(x, y);
        assert!(x.mul(y).unwrap().is_zero());
    }

    #[test]
    fn mixed_bundle_localizes_on_matrix_atom() {
        let mut rng = Rng::new(5);
        let b = bundle(vec![FiberKind::Scalar, FiberKind::Matrix { n: 2 }]);
        let v = gm_reverse_bound_check(&b, 50, 1e-10, &mut rng).unwrap();
        let Outcome::Counterexample(Witness::ZeroDivisors { localized_on, .. }) = &v.outcome else {
            panic!("{:?}", v.outcome);
        };
        assert_eq!(localized_on.mask(), &[false, true]);
        assert_eq!(v.parts.len(), 2);
        assert!(matches!(v.parts[0].outcome, Outcome::Isomorphic { .. }));
        assert_eq!(v.parts[1].band, Band::Unbounded);
        assert!(v.is_sound());
    }

    #[test]
    fn witness_round_trip() {
        let mut rng = Rng::new(0);
        let b = bundle(vec![FiberKind::Scalar, FiberKind::Matrix { n: 2 }]);
        let v = gm_unit_support_check(&b, 5, 1e-10, &mut rng).unwrap();
        let Outcome::Counterexample(w) = &v.outcome else {
            panic!()
        };
        let replayed = Witness::replay(&b, &w.to_json(), 1e-10).unwrap();
        assert_eq!(&replayed, w);
        assert!(Witness::replay(&b, &json!({"type": "zero-divisors"}), 1e-10).is_err());
    }
}
