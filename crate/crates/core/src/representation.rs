//! Rebuilding a bundle from its algebra of sections.
//!
//! For each atom `ω` the seminorm `α_ω(u) = ‖u‖(ω)` has kernel
//! `I_ω = {u : α_ω(u) = 0}`, and the fiber is the quotient `U/I_ω` with the
//! coset norm `inf{‖v‖_∞ : u − v ∈ I_ω}`. On an atomic space the quotient
//! map is evaluation at `ω`; the coset infimum is still computed separately
//! (by truncating `u` to `{‖u‖ ≤ α_ω(u)}`) so the equality of the two norms
//! is a genuine check.
//!
//! The second half of the module models Hilbert–Kaplansky modules over `E`
//! and their operator algebras `B(A)`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::bundle::{Bundle, BundleRef, Section};
use crate::check::Check;
use crate::error::{Error, Result};
use crate::fiber::{FiberElement, FiberKind, MAX_MATRIX_DIM};
use crate::measure::{same_space, EFunction, Idempotent, SpaceRef};
use crate::random::Rng;

/// Agreement required between `α_ω(u)` and the quotient norm.
pub const NORM_EQUALITY_TOLERANCE: f64 = 1e-10;
/// Agreement required between sampled and singular-value operator norms.
pub const OPERATOR_NORM_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_UNIT_VECTOR_SAMPLES: usize = 10_000;

const POWER_ITERATIONS: usize = 2000;

/// `α_ω(u) = p(‖u‖)(ω)`.
pub fn seminorm_alpha(u: &Section, atom: &str) -> Result<f64> {
    let i = u.space().index_of(atom)?;
    Ok(u.value(i).norm())
}

/// `u ∈ I_ω`, up to `tol`.
pub fn in_ideal(u: &Section, atom: &str, tol: f64) -> Result<bool> {
    Ok(seminorm_alpha(u, atom)? <= tol)
}

#[derive(Debug, Clone)]
pub struct QuotientNorm {
    /// `‖v‖_∞` for the minimizing representative `v = χ_A·u`.
    pub value: f64,
    pub alpha: f64,
    /// The truncation set `A = {ω′ : ‖u‖(ω′) ≤ α_ω(u)}`.
    pub truncation: Idempotent,
    pub agrees: bool,
}

/// Coset norm of `u + I_ω`, realized by the truncation `v = χ_A·u` with
/// `A = {ω′ : ‖u‖(ω′) ≤ α_ω(u)}`, the `ε → 0⁺` limit of
/// `A_ε = {ω′ : ‖u‖(ω′) ≤ α_ω(u) + ε}`.
pub fn quotient_norm(u: &Section, atom: &str) -> Result<QuotientNorm> {
    let space = u.space().clone();
    let w = space.index_of(atom)?;
    let norm = u.norm().re();
    let alpha = norm[w];
    let truncation = Idempotent::new(&space, norm.iter().map(|&n| n <= alpha).collect())?;
    let v = u.restrict(&truncation)?;
    if !in_ideal(&u.sub(&v)?, atom, 0.0)? {
        return Err(Error::CheckFailed(format!(
            "truncation at `{atom}` does not differ from u by an element of I_ω"
        )));
    }
    let value = v.norm().max_abs();
    Ok(QuotientNorm {
        value,
        alpha,
        agrees: (value - alpha).abs() <= NORM_EQUALITY_TOLERANCE,
        truncation,
    })
}

/// The fiber `U/I_ω`, represented through evaluation `i_ω(u) = u(ω)`.
#[derive(Debug, Clone, Serialize)]
pub struct QuotientFiber {
    pub atom: String,
    #[serde(skip)]
    pub index: usize,
    pub kind: FiberKind,
    /// Complex dimension of the span of the images of the generated algebra.
    pub span_dimension: usize,
}

impl QuotientFiber {
    pub fn evaluate(&self, u: &Section) -> FiberElement {
        u.value(self.index).clone()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TauReport {
    pub fibers: Vec<QuotientFiber>,
    pub checks: Vec<Check>,
}

impl TauReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

/// Rank of a set of vectors by Gaussian elimination with a relative threshold.
fn span_dimension(vectors: &[Vec<Complex64>]) -> usize {
    let Some(len) = vectors.first().map(Vec::len) else {
        return 0;
    };
    let scale = vectors
        .iter()
        .flat_map(|v| v.iter().map(|z| z.norm()))
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let threshold = 1e-10 * scale;
    let mut rows: Vec<Vec<Complex64>> = vectors.to_vec();
    let mut rank = 0;
    for col in 0..len {
        let Some(pivot) =
            (rank..rows.len()).max_by(|&a, &b| rows[a][col].norm().total_cmp(&rows[b][col].norm()))
        else {
            break;
        };
        if rows[pivot][col].norm() <= threshold {
            continue;
        }
        rows.swap(rank, pivot);
        let p = rows[rank][col];
        for r in (rank + 1)..rows.len() {
            let f = rows[r][col] / p;
            for c in col..len {
                let sub = f * rows[rank][c];
                rows[r][c] -= sub;
            }
        }
        rank += 1;
    }
    rank
}

/// Rebuild fibers as quotients of the algebra spanned by `sections` and check
/// that `τ(u) = (i_ω(u))_ω` is linear, multiplicative, isometric and unital.
///
/// Isometry compares the fiber norm of `τ(u)(ω)` against the coset norm
/// computed by [`quotient_norm`]. Returns the reconstructed bundle, the
/// images `τ(u)` of the inputs, and the report.
pub fn reconstruct_bundle(
    sections: &[Section],
    samples: usize,
    rng: &mut Rng,
) -> Result<(BundleRef, Vec<Section>, TauReport)> {
    let first = sections
        .first()
        .ok_or_else(|| Error::InvalidArgument("no sections to reconstruct from".into()))?;
    let source = first.bundle().clone();
    for s in sections {
        if s.bundle() != &source && **s.bundle() != *source {
            return Err(Error::BundleMismatch);
        }
    }
    let space = source.space().clone();
    let unit = Section::unit(&source);

    // generators of the image algebra: the unit, the inputs and their products
    let mut generated: Vec<Section> = vec![unit.clone()];
    generated.extend(sections.iter().cloned());
    for a in sections {
        for b in sections {
            generated.push(a.mul(b)?);
        }
    }

    let fibers: Vec<QuotientFiber> = (0..space.len())
        .map(|i| QuotientFiber {
            atom: space.atom(i).to_string(),
            index: i,
            kind: source.fiber(i),
            span_dimension: span_dimension(
                &generated
                    .iter()
                    .map(|s| s.value(i).data().to_vec())
                    .collect::<Vec<_>>(),
            ),
        })
        .collect();
    let target = Bundle::new(&space, fibers.iter().map(|f| f.kind).collect())?;
    let tau = |u: &Section| -> Result<Section> {
        Section::new(&target, fibers.iter().map(|f| f.evaluate(u)).collect())
    };
    let images = sections.iter().map(tau).collect::<Result<Vec<_>>>()?;

    let mut linear = Check::new("τ linear");
    let mut multiplicative = Check::new("τ multiplicative");
    let mut isometric = Check::new("τ isometric (coset norm = α_ω)");
    let mut unital = Check::new("i_ω(e) is the fiber unit");
    let mut ideal = Check::new("I_ω is an ideal");

    let pick = |rng: &mut Rng| sections[rng.index(sections.len())].clone();
    let mut probes: Vec<Section> = sections.to_vec();
    for _ in 0..samples {
        let (u, v) = (pick(rng), pick(rng));
        probes.push(u.mul(&v)?);
    }

    for u in &probes {
        let tu = tau(u)?;
        for (i, f) in fibers.iter().enumerate() {
            let q = quotient_norm(u, &f.atom)?;
            isometric.record_close(tu.value(i).norm(), q.value, NORM_EQUALITY_TOLERANCE, || {
                format!("atom `{}`", f.atom)
            });
            isometric.record(q.agrees, || format!("α_ω ≠ coset norm at `{}`", f.atom));
        }
    }

    let te = tau(&unit)?;
    for (i, f) in fibers.iter().enumerate() {
        let e = FiberElement::unit(f.kind);
        unital.record(te.value(i) == &e, || {
            format!("i_ω(e) ≠ unit at `{}`", f.atom)
        });
        unital.record_close(te.value(i).norm(), 1.0, NORM_EQUALITY_TOLERANCE, || {
            format!("‖i_ω(e)‖ ≠ 1 at `{}`", f.atom)
        });
    }
    for u in sections {
        let tu = tau(u)?;
        unital.record(te.mul(&tu)? == tu && tu.mul(&te)? == tu, || {
            "τ(e) is not a two-sided unit".into()
        });
    }

    for _ in 0..samples.max(1) {
        let (u, v) = (pick(rng), pick(rng));
        let (a, b) = (rng.complex(), rng.complex());
        let combo = u.scale(a).add(&v.scale(b))?;
        let lhs = tau(&combo)?;
        let rhs = tau(&u)?.scale(a).add(&tau(&v)?.scale(b))?;
        linear.record_le(
            lhs.max_distance(&rhs)?,
            0.0,
            NORM_EQUALITY_TOLERANCE,
            || "τ(au + bv)".into(),
        );

        let lhs = tau(&u.mul(&v)?)?;
        let rhs = tau(&u)?.mul(&tau(&v)?)?;
        multiplicative.record_le(
            lhs.max_distance(&rhs)?,
            0.0,
            NORM_EQUALITY_TOLERANCE,
            || "τ(uv)".into(),
        );

        // u vanishing at ω lies in I_ω, so do u·v, v·u and u + u′
        let w = rng.index(space.len());
        let atom = space.atom(w).to_string();
        let killed = u.restrict(&Idempotent::atom(&space, w).complement())?;
        let killed2 = v.restrict(&Idempotent::atom(&space, w).complement())?;
        ideal.record(in_ideal(&killed, &atom, 0.0)?, || {
            format!("χ·u ∉ I at `{atom}`")
        });
        ideal.record(in_ideal(&killed.mul(&v)?, &atom, 0.0)?, || {
            format!("u·v ∉ I at `{atom}`")
        });
        ideal.record(in_ideal(&v.mul(&killed)?, &atom, 0.0)?, || {
            format!("v·u ∉ I at `{atom}`")
        });
        ideal.record(in_ideal(&killed.add(&killed2)?, &atom, 0.0)?, || {
            format!("u + u′ ∉ I at `{atom}`")
        });
    }

    let report = TauReport {
        fibers,
        checks: vec![linear, multiplicative, isometric, unital, ideal],
    };
    Ok((target, images, report))
}

/// A Hilbert–Kaplansky module over `E`: atomwise `ℂ^d` with the `E`-valued
/// inner product `⟨x, y⟩(ω) = Σᵢ xᵢ(ω)·conj(yᵢ(ω))`.
#[derive(Debug, Clone, PartialEq)]
pub struct HkModule {
    space: SpaceRef,
    dims: Vec<usize>,
}

pub type HkModuleRef = Arc<HkModule>;

impl HkModule {
    pub fn new(space: &SpaceRef, dims: Vec<usize>) -> Result<HkModuleRef> {
        if dims.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                found: dims.len(),
            });
        }
        if let Some(&d) = dims.iter().find(|&&d| !(1..=MAX_MATRIX_DIM).contains(&d)) {
            return Err(Error::InvalidDescriptor(format!(
                "Hilbert fiber dimension {d} outside 1..={MAX_MATRIX_DIM}"
            )));
        }
        Ok(Arc::new(Self {
            space: space.clone(),
            dims,
        }))
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HkElement {
    module: HkModuleRef,
    values: Vec<Vec<Complex64>>,
}

impl HkElement {
    pub fn new(module: &HkModuleRef, values: Vec<Vec<Complex64>>) -> Result<Self> {
        if values.len() != module.dims.len() {
            return Err(Error::LengthMismatch {
                expected: module.dims.len(),
                found: values.len(),
            });
        }
        for (v, &d) in values.iter().zip(&module.dims) {
            if v.len() != d {
                return Err(Error::LengthMismatch {
                    expected: d,
                    found: v.len(),
                });
            }
        }
        Ok(Self {
            module: module.clone(),
            values,
        })
    }

    /// The first standard basis vector at every atom.
    pub fn basis(module: &HkModuleRef, index: usize) -> Result<Self> {
        let values = module
            .dims
            .iter()
            .map(|&d| {
                let mut v = vec![Complex64::new(0.0, 0.0); d];
                if index < d {
                    v[index] = Complex64::new(1.0, 0.0);
                }
                v
            })
            .collect();
        Self::new(module, values)
    }

    pub fn random(module: &HkModuleRef, rng: &mut Rng) -> Self {
        let values = module
            .dims
            .iter()
            .map(|&d| (0..d).map(|_| rng.complex()).collect())
            .collect();
        Self {
            module: module.clone(),
            values,
        }
    }

    pub fn values(&self) -> &[Vec<Complex64>] {
        &self.values
    }

    pub fn module(&self) -> &HkModuleRef {
        &self.module
    }

    pub fn norm(&self) -> EFunction {
        EFunction::from_real_fn(&self.module.space, |i| {
            self.values[i]
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
    }
}

/// `E`-valued inner product `⟨x, y⟩`.
pub fn hk_inner(x: &HkElement, y: &HkElement) -> Result<EFunction> {
    if x.module != y.module {
        return Err(Error::InvalidArgument(
            "elements of different modules".into(),
        ));
    }
    Ok(EFunction::from_fn(&x.module.space, |i| {
        x.values[i]
            .iter()
            .zip(&y.values[i])
            .map(|(a, b)| a * b.conj())
            .sum()
    }))
}

fn operator_kind(d: usize) -> FiberKind {
    if d == 1 {
        FiberKind::Scalar
    } else {
        FiberKind::Matrix { n: d }
    }
}

/// `B(A)`: the bundle of `d(ω) × d(ω)` matrices under the operator norm
/// (scalars where `d(ω) = 1`).
pub fn hk_operator_algebra(module: &HkModule) -> Result<BundleRef> {
    Bundle::new(
        &module.space,
        module.dims.iter().map(|&d| operator_kind(d)).collect(),
    )
}

fn check_operator(t: &Section, module: &HkModule) -> Result<()> {
    if !same_space(t.space(), &module.space) {
        return Err(Error::SpaceMismatch);
    }
    for (i, &d) in module.dims.iter().enumerate() {
        if t.value(i).kind() != operator_kind(d) {
            return Err(Error::DescriptorMismatch {
                left: operator_kind(d).to_string(),
                right: t.value(i).kind().to_string(),
            });
        }
    }
    Ok(())
}

fn apply_fiber(t: &FiberElement, x: &[Complex64]) -> Vec<Complex64> {
    let d = x.len();
    let a = t.data();
    (0..d)
        .map(|r| (0..d).map(|c| a[r * d + c] * x[c]).sum())
        .collect()
}

fn apply_adjoint(t: &FiberElement, x: &[Complex64]) -> Vec<Complex64> {
    let d = x.len();
    let a = t.data();
    (0..d)
        .map(|r| (0..d).map(|c| a[c * d + r].conj() * x[c]).sum())
        .collect()
}

fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `T(x)` for an operator `T ∈ B(A)`.
pub fn hk_apply(t: &Section, x: &HkElement) -> Result<HkElement> {
    check_operator(t, &x.module)?;
    let values = x
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| apply_fiber(t.value(i), v))
        .collect();
    HkElement::new(&x.module, values)
}

#[derive(Debug, Clone)]
pub struct OperatorNormCheck {
    /// `sup ‖T(x)‖` over sampled (then power-iterated) unit vectors.
    pub sampled: EFunction,
    /// Largest singular value.
    pub operator_norm: EFunction,
    pub agrees: bool,
}

/// Evaluate `‖T‖ = sup{‖T(x)‖ : ‖x‖ ≤ 1}` atomwise from `samples` random unit
/// vectors, refine the best one by power iteration on `T*T`, and compare with
/// the singular-value norm.
pub fn hk_operator_norm_check(
    t: &Section,
    module: &HkModule,
    samples: usize,
    rng: &mut Rng,
) -> Result<OperatorNormCheck> {
    check_operator(t, module)?;
    let mut sampled = Vec::with_capacity(module.dims.len());
    for (i, &d) in module.dims.iter().enumerate() {
        let op = t.value(i);
        let mut best = vec![Complex64::new(0.0, 0.0); d];
        let mut best_value = -1.0;
        for _ in 0..samples.max(1) {
            let mut x: Vec<Complex64> = (0..d).map(|_| rng.complex()).collect();
            let n = vec_norm(&x);
            if n == 0.0 {
                continue;
            }
            x.iter_mut().for_each(|z| *z /= n);
            let value = vec_norm(&apply_fiber(op, &x));
            if value > best_value {
                best_value = value;
                best = x;
            }
        }
        for _ in 0..POWER_ITERATIONS {
            let mut next = apply_adjoint(op, &apply_fiber(op, &best));
            let n = vec_norm(&next);
            if n == 0.0 {
                break;
            }
            next.iter_mut().for_each(|z| *z /= n);
            let value = vec_norm(&apply_fiber(op, &next));
            let improved = value - best_value;
            if value >= best_value {
                best_value = value;
                best = next;
            }
            if improved.abs() <= 1e-15 * best_value.max(1.0) {
                break;
            }
        }
        sampled.push(best_value.max(0.0));
    }
    let sampled = EFunction::from_real(&module.space, &sampled)?;
    let operator_norm = t.norm();
    let agrees = (0..module.dims.len()).all(|i| {
        let (lo, hi) = (sampled.at(i).re, operator_norm.at(i).re);
        lo <= hi + 1e-12 && hi - lo <= OPERATOR_NORM_TOLERANCE
    });
    Ok(OperatorNormCheck {
        sampled,
        operator_norm,
        agrees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::AtomicMeasureSpace;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn matrix_bundle(atoms: usize) -> BundleRef {
        Bundle::uniform(
            &AtomicMeasureSpace::uniform(atoms).unwrap(),
            FiberKind::Matrix { n: 2 },
        )
        .unwrap()
    }

    #[test]
    fn seminorms() {
        let b = matrix_bundle(2);
        assert_eq!(seminorm_alpha(&Section::unit(&b), "w1").unwrap(), 1.0);
        assert_eq!(seminorm_alpha(&Section::zero(&b), "w2").unwrap(), 0.0);
        assert!(matches!(
            seminorm_alpha(&Section::unit(&b), "nope"),
            Err(Error::UnknownAtom(_))
        ));
    }

    #[test]
    fn quotient_norm_truncates() {
        let b = matrix_bundle(2);
        let d3 = FiberElement::matrix(2, vec![c(3.0), c(0.0), c(0.0), c(1.0)]).unwrap();
        let u = Section::new(&b, vec![FiberElement::unit(FiberKind::Matrix { n: 2 }), d3]).unwrap();
        let q = quotient_norm(&u, "w1").unwrap();
        assert!((q.value - 1.0).abs() < 1e-15 && q.agrees);
        assert_eq!(q.truncation.mask(), &[true, false]);
        let q = quotient_norm(&Section::unit(&b), "w2").unwrap();
        assert_eq!(q.value, 1.0);
        let z = u
            .restrict(&Idempotent::atom(b.space(), 0).complement())
            .unwrap();
        assert_eq!(quotient_norm(&z, "w1").unwrap().value, 0.0);
    }

    #[test]
    fn reconstruct_unit_and_scalars() {
        let mut rng = Rng::new(1);
        let b = matrix_bundle(2);
        let (target, images, report) =
            reconstruct_bundle(&[Section::unit(&b)], 5, &mut rng).unwrap();
        assert!(report.passed());
        assert_eq!(images[0], Section::unit(&target));

        let sb =
            Bundle::uniform(&AtomicMeasureSpace::uniform(3).unwrap(), FiberKind::Scalar).unwrap();
        let xs: Vec<Section> = (0..4).map(|_| rng.section(&sb)).collect();
        let (_, images, report) = reconstruct_bundle(&xs, 10, &mut rng).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(report.fibers.iter().all(|f| f.span_dimension == 1));
        assert_eq!(images, xs);
    }

    #[test]
    fn span_dimension_counts() {
        let v = |a: f64, b: f64| vec![c(a), c(b)];
        assert_eq!(span_dimension(&[v(1.0, 0.0), v(2.0, 0.0)]), 1);
        assert_eq!(span_dimension(&[v(1.0, 0.0), v(1.0, 1.0)]), 2);
        assert_eq!(span_dimension(&[v(0.0, 0.0)]), 0);
    }

    #[test]
    fn hk_basics() {
        let space = AtomicMeasureSpace::uniform(2).unwrap();
        let m = HkModule::new(&space, vec![2, 3]).unwrap();
        let x = HkElement::basis(&m, 0).unwrap();
        assert_eq!(hk_inner(&x, &x).unwrap(), EFunction::one(&space));
        let b = hk_operator_algebra(&m).unwrap();
        assert_eq!(
            b.fibers(),
            &[FiberKind::Matrix { n: 2 }, FiberKind::Matrix { n: 3 }]
        );
        let one = HkModule::new(&space, vec![1, 1]).unwrap();
        assert_eq!(
            hk_operator_algebra(&one).unwrap().fibers(),
            &[FiberKind::Scalar; 2]
        );

        let mut rng = Rng::new(3);
        let id = Section::unit(&b);
        let chk = hk_operator_norm_check(&id, &m, 100, &mut rng).unwrap();
        assert!(chk.agrees);
        assert!((chk.operator_norm.at(0).re - 1.0).abs() < 1e-14);
        assert_eq!(hk_apply(&id, &x).unwrap(), x);
        assert!(HkModule::new(&space, vec![0, 1]).is_err());
    }
}
