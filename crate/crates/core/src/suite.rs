//! Property suites over a bundle, one per module, aggregated by `verify`.
//!
//! Every suite draws from its own sub-stream of the seed, so adding samples to
//! one suite never shifts the draws of another.

use num_complex::Complex64;
use serde::Serialize;

use crate::bundle::{lifting_p, lifting_vec, BundleRef, Section};
use crate::check::Check;
use crate::fiber::{FiberElement, FiberInverse, FiberKind};
use crate::gelfand_mazur::{gm_reverse_bound_check, gm_unit_support_check, Outcome};
use crate::inversion::{inverse, inverse_of_mix, neumann_inverse, perturbed_inverse};
use crate::measure::{EFunction, Idempotent, PointwiseOp};
use crate::random::Rng;
use crate::representation::{
    hk_inner, hk_operator_algebra, hk_operator_norm_check, quotient_norm, reconstruct_bundle,
    seminorm_alpha, HkElement, HkModule,
};
use crate::spectrum::{
    sp_contains_by_invertibility, spectrum_table, spm_contains_by_invertibility, spm_properties,
};

/// Tolerance for the norm and algebra axioms of `E(Ω, X)`.
pub const AXIOM_TOLERANCE: f64 = 1e-9;
/// Slack allowed on the inversion bounds.
pub const BOUND_SLACK: f64 = 1e-9;
/// Fiber submultiplicativity is sampled at least this often per kind.
pub const MIN_SUBMULTIPLICATIVITY_PAIRS: usize = 1000;
/// Exact complex arithmetic in `E`, up to rounding.
pub const EFUNCTION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub module: String,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub samples: usize,
    pub tolerance: f64,
    pub cap: usize,
}

/// Run every module suite on `bundle`.
pub fn verify_all(bundle: &BundleRef, config: SuiteConfig, rng: &Rng) -> Vec<SuiteReport> {
    let n = config.samples;
    let suite = |module: &str, checks: Vec<Check>| SuiteReport {
        module: module.to_string(),
        checks,
    };
    vec![
        suite(
            "measure-space",
            measure_suite(bundle, n, &mut rng.stream(1)),
        ),
        suite("fiber-algebra", fiber_suite(bundle, n, &mut rng.stream(2))),
        suite("bundle", bundle_suite(bundle, n, &mut rng.stream(3))),
        suite(
            "inversion",
            inversion_suite(bundle, n, config.tolerance, &mut rng.stream(4)),
        ),
        suite(
            "spectrum",
            spectrum_suite(bundle, n, config.tolerance, config.cap, &mut rng.stream(5)),
        ),
        suite(
            "representation",
            representation_suite(bundle, n, &mut rng.stream(6)),
        ),
        suite(
            "gelfand-mazur",
            gelfand_mazur_suite(bundle, n, &mut rng.stream(7)),
        ),
    ]
}

fn close(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm()
}

/// Commutative unital algebra laws of `E`, locality of mixing, and order
/// convergence as atomwise convergence.
pub fn measure_suite(bundle: &BundleRef, samples: usize, rng: &mut Rng) -> Vec<Check> {
    let space = bundle.space().clone();
    let mut laws = Check::new("E is a commutative unital algebra");
    let mut modulus = Check::new("|ab| = |a||b|");
    let mut locality = Check::new("πₖ·mix(p, a) = πₖ·aₖ");
    let mut order = Check::new("(o)-convergence is atomwise");
    let one = EFunction::one(&space);
    for _ in 0..samples {
        let (a, b, c) = (
            rng.efunction(&space),
            rng.efunction(&space),
            rng.efunction(&space),
        );
        let op = |x: &EFunction, y: &EFunction, o| x.pointwise(y, o).expect("same space");
        let ab_c = op(&op(&a, &b, PointwiseOp::Mul), &c, PointwiseOp::Mul);
        let a_bc = op(&a, &op(&b, &c, PointwiseOp::Mul), PointwiseOp::Mul);
        let dist = op(&a, &op(&b, &c, PointwiseOp::Add), PointwiseOp::Mul);
        let dist2 = op(
            &op(&a, &b, PointwiseOp::Mul),
            &op(&a, &c, PointwiseOp::Mul),
            PointwiseOp::Add,
        );
        let sum_assoc = op(&op(&a, &b, PointwiseOp::Add), &c, PointwiseOp::Add);
        let sum_assoc2 = op(&a, &op(&b, &c, PointwiseOp::Add), PointwiseOp::Add);
        let ab = op(&a, &b, PointwiseOp::Mul);
        let ba = op(&b, &a, PointwiseOp::Mul);
        let a1 = op(&a, &one, PointwiseOp::Mul);
        let ab_abs = ab.abs();
        let abs_ab = a.abs().mul(&b.abs()).expect("same space");
        for i in 0..space.len() {
            let w = || format!("atom `{}`", space.atom(i));
            laws.record_le(close(ab_c.at(i), a_bc.at(i)), 0.0, EFUNCTION_TOLERANCE, w);
            laws.record_le(close(dist.at(i), dist2.at(i)), 0.0, EFUNCTION_TOLERANCE, w);
            laws.record_le(
                close(sum_assoc.at(i), sum_assoc2.at(i)),
                0.0,
                EFUNCTION_TOLERANCE,
                w,
            );
            laws.record_le(close(ab.at(i), ba.at(i)), 0.0, EFUNCTION_TOLERANCE, w);
            laws.record_le(close(a1.at(i), a.at(i)), 0.0, EFUNCTION_TOLERANCE, w);
            modulus.record_le(
                close(ab_abs.at(i), abs_ab.at(i)),
                0.0,
                EFUNCTION_TOLERANCE,
                w,
            );
        }

        let p = rng.partition(&space, space.len().max(2));
        let fns: Vec<EFunction> = (0..p.len()).map(|_| rng.efunction(&space)).collect();
        let mixed = EFunction::mix(&p, &fns).expect("lengths match");
        for (k, part) in p.parts().iter().enumerate() {
            let pe = part.as_efunction();
            let lhs = pe.mul(&mixed).expect("same space");
            let rhs = pe.mul(&fns[k]).expect("same space");
            locality.record(lhs == rhs, || format!("part {k}"));
        }

        // aₙ = a + 2⁻ⁿ·d is atomwise Cauchy with limit a
        let d = rng.efunction(&space);
        let mut last_gap = f64::INFINITY;
        for n in 1..=60 {
            let an = a
                .add(&d.scale(Complex64::new(0.5f64.powi(n), 0.0)))
                .expect("same space");
            let gap = an.max_distance(&a).expect("same space");
            order.record(gap <= last_gap, || format!("gap grew at step {n}"));
            last_gap = gap;
        }
        order.record(last_gap <= EFUNCTION_TOLERANCE, || {
            format!("limit gap {last_gap:e}")
        });
    }
    vec![laws, modulus, locality, order]
}

/// Norm axioms, submultiplicativity, spectral radius bound and double
/// inversion for every fiber kind in the bundle.
pub fn fiber_suite(bundle: &BundleRef, samples: usize, rng: &mut Rng) -> Vec<Check> {
    let mut kinds: Vec<FiberKind> = bundle.fibers().to_vec();
    kinds.sort_by_key(|k| k.to_string());
    kinds.dedup();
    let mut axioms = Check::new("fiber norm axioms");
    let mut submult = Check::new("fiber ‖ab‖ ≤ ‖a‖‖b‖");
    let mut radius = Check::new("spectral radius ≤ ‖a‖");
    let mut double_inverse = Check::new("(a⁻¹)⁻¹ = a");
    let mut unit_norm = Check::new("‖e‖ = 1");
    for &kind in &kinds {
        unit_norm.record_close(
            FiberElement::unit(kind).norm(),
            1.0,
            EFUNCTION_TOLERANCE,
            || kind.to_string(),
        );
        axioms.record(FiberElement::zero(kind).norm() == 0.0, || {
            format!("‖0‖ ≠ 0 in {kind}")
        });
        for _ in 0..samples {
            let (a, b) = (rng.fiber_element(kind), rng.fiber_element(kind));
            let lambda = rng.complex();
            let (na, nb) = (a.norm(), b.norm());
            let w = || kind.to_string();
            axioms.record(na >= 0.0, w);
            axioms.record(na > EFUNCTION_TOLERANCE || a.is_zero(), w);
            axioms.record_close(
                a.scale(lambda).norm(),
                lambda.norm() * na,
                AXIOM_TOLERANCE,
                w,
            );
            axioms.record_le(
                a.add(&b).expect("same kind").norm(),
                na + nb,
                AXIOM_TOLERANCE,
                w,
            );

            match a.spectrum(crate::spectrum::DEFAULT_MEMBERSHIP_TOLERANCE) {
                Ok(eigs) => {
                    let r = eigs.iter().map(|l| l.norm()).fold(0.0, f64::max);
                    radius.record_le(r, na, 1e-8, w);
                }
                Err(e) => radius.record(false, || format!("{kind}: {e}")),
            }
            // well-conditioned elements only
            if a.smallest_singular_value() >= 1e-3 {
                if let FiberInverse::Invertible(inv) =
                    a.inverse(crate::fiber::DEFAULT_INVERSION_TOLERANCE)
                {
                    match inv.inverse(crate::fiber::DEFAULT_INVERSION_TOLERANCE).ok() {
                        Some(back) => double_inverse.record_le(
                            back.distance(&a).expect("same kind"),
                            0.0,
                            1e-8 * na.max(1.0),
                            w,
                        ),
                        None => double_inverse
                            .record(false, || format!("{kind}: inverse not invertible")),
                    }
                }
            }
        }
        for _ in 0..samples.max(MIN_SUBMULTIPLICATIVITY_PAIRS) {
            let (a, b) = (rng.fiber_element(kind), rng.fiber_element(kind));
            submult.record_le(
                a.mul(&b).expect("same kind").norm(),
                a.norm() * b.norm(),
                AXIOM_TOLERANCE,
                || kind.to_string(),
            );
        }
    }
    vec![unit_norm, axioms, submult, radius, double_inverse]
}

/// The Banach–Kantorovich algebra axioms of `E(Ω, X)` on random pairs.
pub fn bk_axioms(bundle: &BundleRef, pairs: usize, rng: &mut Rng) -> Vec<Check> {
    let space = bundle.space().clone();
    let mut positivity = Check::new("‖u‖ ≥ 0, ‖u‖ = 0 ⇔ u = 0");
    let mut homogeneity = Check::new("‖a·u‖ = |a|·‖u‖");
    let mut triangle = Check::new("‖u + v‖ ≤ ‖u‖ + ‖v‖");
    let mut submult = Check::new("‖uv‖ ≤ ‖u‖‖v‖");
    let mut unit = Check::new("‖e‖ = 1");
    let e_norm = Section::unit(bundle).norm();
    for i in 0..space.len() {
        unit.record_close(e_norm.at(i).re, 1.0, AXIOM_TOLERANCE, || {
            space.atom(i).to_string()
        });
    }
    let zero_norm = Section::zero(bundle).norm();
    positivity.record(zero_norm == EFunction::zero(&space), || "‖0‖ ≠ 0".into());
    for _ in 0..pairs {
        let (u, v) = (rng.section(bundle), rng.section(bundle));
        let a = rng.efunction(&space);
        let (nu, nv) = (u.norm(), v.norm());
        let n_sum = u.add(&v).expect("same bundle").norm();
        let n_prod = u.mul(&v).expect("same bundle").norm();
        let n_au = u.module_mul(&a).expect("same space").norm();
        for i in 0..space.len() {
            let w = || space.atom(i).to_string();
            let x = nu.at(i).re;
            positivity.record(x >= 0.0 && (x > 0.0 || u.value(i).is_zero()), w);
            homogeneity.record_close(n_au.at(i).re, a.at(i).norm() * x, AXIOM_TOLERANCE, w);
            triangle.record_le(n_sum.at(i).re, x + nv.at(i).re, AXIOM_TOLERANCE, w);
            submult.record_le(n_prod.at(i).re, x * nv.at(i).re, AXIOM_TOLERANCE, w);
        }
    }
    vec![positivity, homogeneity, triangle, submult, unit]
}

/// BK axioms plus the d-decomposition and the lifting axioms.
pub fn bundle_suite(bundle: &BundleRef, samples: usize, rng: &mut Rng) -> Vec<Check> {
    let space = bundle.space().clone();
    let mut checks = bk_axioms(bundle, samples, rng);

    let mut decompose = Check::new("d-decomposition");
    let mut module = Check::new("(a·u)·v = a·(u·v) = u·(a·v)");
    let mut lifting = Check::new("liftings p and ℓ_X");
    for _ in 0..samples {
        let u = rng.section(bundle);
        let v = rng.section(bundle);
        let norm = u.norm();
        let mask: Vec<bool> = (0..space.len()).map(|_| rng.coin()).collect();
        let pi = Idempotent::new(&space, mask).expect("length matches");
        let l1 = norm.mul(&pi.as_efunction()).expect("same space");
        let l2 = norm
            .mul(&pi.complement().as_efunction())
            .expect("same space");
        match u.d_decompose(&l1, &l2) {
            Ok((x1, x2)) => {
                let back = x1.add(&x2).expect("same bundle");
                decompose.record_le(
                    back.max_distance(&u).expect("same bundle"),
                    0.0,
                    1e-10,
                    || "x₁ + x₂ = u".into(),
                );
                decompose.record_le(
                    x1.norm().max_distance(&l1).expect("same space"),
                    0.0,
                    1e-10,
                    || "‖x₁‖ = λ₁".into(),
                );
                decompose.record_le(
                    x2.norm().max_distance(&l2).expect("same space"),
                    0.0,
                    1e-10,
                    || "‖x₂‖ = λ₂".into(),
                );
            }
            Err(e) => decompose.record(false, || e.to_string()),
        }

        let a = rng.efunction(&space);
        let lhs = u
            .module_mul(&a)
            .and_then(|au| au.mul(&v))
            .expect("same bundle");
        let mid = u
            .mul(&v)
            .and_then(|uv| uv.module_mul(&a))
            .expect("same bundle");
        let rhs = v
            .module_mul(&a)
            .and_then(|av| u.mul(&av))
            .expect("same bundle");
        module.record_le(
            lhs.max_distance(&mid).expect("same bundle"),
            0.0,
            AXIOM_TOLERANCE,
            || "(au)v".into(),
        );
        module.record_le(
            rhs.max_distance(&mid).expect("same bundle"),
            0.0,
            AXIOM_TOLERANCE,
            || "u(av)".into(),
        );

        // the six axioms of a vector-valued lifting, for the identity lifting
        let lu = lifting_vec(&u);
        let lv = lifting_vec(&v);
        let pn = lifting_p(&u.norm());
        let luv = lifting_vec(&u.mul(&v).expect("same bundle"));
        let lsum = lifting_vec(&u.add(&v).expect("same bundle"));
        let lau = lifting_vec(&u.module_mul(&a).expect("same space"));
        lifting.record(lu == u, || "ℓ_X(û) ∈ û".into());
        lifting.record(lu.norm() == pn, || "‖ℓ_X(û)(ω)‖ = p(‖û‖)(ω)".into());
        lifting.record(lsum == lu.add(&lv).expect("same bundle"), || {
            "ℓ_X(û + v̂) = ℓ_X(û) + ℓ_X(v̂)".into()
        });
        lifting.record(
            lau == lu.module_mul(&lifting_p(&a)).expect("same space"),
            || "ℓ_X(aû) = p(a)ℓ_X(û)".into(),
        );
        lifting.record(luv == lu.mul(&lv).expect("same bundle"), || {
            "ℓ_X(ûv̂) = ℓ_X(û)ℓ_X(v̂)".into()
        });
        lifting.record(lifting_p(&a) == a, || "p(f̂) ∈ f̂".into());
    }
    // density: {ℓ_X(u)(ω)} = X(ω), witnessed by the matrix units / basis elements
    for i in 0..space.len() {
        let kind = bundle.fiber(i);
        let basis: Vec<FiberElement> = (0..kind.storage_len())
            .map(|j| {
                let mut data = vec![Complex64::new(0.0, 0.0); kind.storage_len()];
                data[j] = Complex64::new(1.0, 0.0);
                FiberElement::new(kind, data).expect("shape matches")
            })
            .collect();
        let all_hit = basis.iter().all(|b| {
            let s = Section::from_fn(bundle, |k| {
                if k == i {
                    b.clone()
                } else {
                    FiberElement::zero(bundle.fiber(k))
                }
            })
            .expect("shapes match");
            lifting_vec(&s).value(i) == b
        });
        lifting.record(all_hit, || {
            format!("fiber basis not attained at `{}`", space.atom(i))
        });
    }
    checks.extend([decompose, module, lifting]);
    checks
}

/// Random section with `‖x‖(ω)` uniform in `[0, max_norm)`.
pub fn random_contraction(bundle: &BundleRef, max_norm: f64, rng: &mut Rng) -> Section {
    let radius: Vec<f64> = (0..bundle.len())
        .map(|_| rng.uniform(0.0, max_norm))
        .collect();
    rng.section_with_norm(bundle, &radius)
}

/// Random invertible `x` (smallest singular value ≥ 0.05 everywhere) and a
/// perturbation `h` with `2‖h‖ ≪ ‖x⁻¹‖⁻¹`.
pub fn random_admissible_pair(bundle: &BundleRef, rng: &mut Rng) -> (Section, Section, Section) {
    let x = loop {
        let x = rng.section(bundle);
        if x.values()
            .iter()
            .all(|v| v.smallest_singular_value() >= 0.05)
        {
            break x;
        }
    };
    let x_inv = inverse(&x, crate::fiber::DEFAULT_INVERSION_TOLERANCE).expect("well conditioned");
    let inv_norm = x_inv.norm();
    let radius: Vec<f64> = (0..bundle.len())
        .map(|i| rng.uniform(0.0, 0.99) * 0.5 / inv_norm.at(i).re)
        .collect();
    let h = rng.section_with_norm(bundle, &radius);
    (x, h, x_inv)
}

/// Neumann inversion against exact inversion, both inversion bounds,
/// continuity, and mixing preservation.
pub fn inversion_suite(bundle: &BundleRef, samples: usize, tol: f64, rng: &mut Rng) -> Vec<Check> {
    let space = bundle.space().clone();
    let series_tol = tol.min(1e-9);
    let mut agreement = Check::new("Neumann inverse = exact inverse");
    let mut neumann_bound = Check::new("‖(e−x)⁻¹ − e‖ ≤ ‖x‖(1−‖x‖)⁻¹");
    let mut perturbation = Check::new("‖(x+h)⁻¹ − x⁻¹‖ ≤ 2‖x⁻¹‖²‖h‖");
    let mut continuity = Check::new("xₙ → x ⇒ xₙ⁻¹ → x⁻¹");
    let mut mixing = Check::new("(Σπₖxₖ)⁻¹ = Σπₖxₖ⁻¹");
    let e = Section::unit(bundle);
    for _ in 0..samples {
        let x = random_contraction(bundle, 0.9, rng);
        if let Some(cert) =
            neumann_bound.record_result(neumann_inverse(&x, series_tol), || "Neumann".into())
        {
            let exact = inverse(
                &e.sub(&x).expect("same bundle"),
                crate::fiber::DEFAULT_INVERSION_TOLERANCE,
            );
            match exact {
                Ok(exact) => {
                    let gap = cert.inverse.distance(&exact).expect("same bundle");
                    for i in 0..space.len() {
                        agreement.record_le(gap.at(i).re, 0.0, 2.0 * series_tol.max(1e-10), || {
                            space.atom(i).to_string()
                        });
                    }
                }
                Err(err) => agreement.record(false, || err.to_string()),
            }
            for i in 0..space.len() {
                neumann_bound.record_le(-cert.bound_slack.at(i).re, 0.0, BOUND_SLACK, || {
                    space.atom(i).to_string()
                });
            }
        }

        let (x, h, x_inv) = random_admissible_pair(bundle, rng);
        match perturbed_inverse(&x, &h, series_tol) {
            Ok(cert) => {
                for i in 0..space.len() {
                    perturbation.record_le(-cert.bound_slack.at(i).re, 0.0, BOUND_SLACK, || {
                        space.atom(i).to_string()
                    });
                }
            }
            Err(err) => perturbation.record(false, || err.to_string()),
        }

        // xₙ = x + 2⁻ⁿh: Eq. (12) is the quantitative witness of continuity
        let inv_norm = x_inv.norm();
        let mut last = f64::INFINITY;
        for n in 0..30 {
            let t = 0.5f64.powi(n);
            let xn = x
                .add(&h.scale(Complex64::new(t, 0.0)))
                .expect("same bundle");
            let Some(xn_inv) = inverse(&xn, crate::fiber::DEFAULT_INVERSION_TOLERANCE).ok() else {
                continuity.record(false, || "xₙ not invertible".into());
                continue;
            };
            let gap = xn_inv.distance(&x_inv).expect("same bundle");
            let dn = xn.distance(&x).expect("same bundle");
            for i in 0..space.len() {
                let a = inv_norm.at(i).re;
                continuity.record_le(gap.at(i).re, 2.0 * a * a * dn.at(i).re, BOUND_SLACK, || {
                    space.atom(i).to_string()
                });
            }
            last = gap.max_abs();
        }
        continuity.record(last <= 1e-7, || {
            format!("‖xₙ⁻¹ − x⁻¹‖ = {last:e} after 30 halvings")
        });

        let p = rng.partition(&space, space.len().max(2));
        let xs: Vec<Section> = (0..p.len())
            .map(|_| random_admissible_pair(bundle, rng).0)
            .collect();
        let fiber_tol = crate::fiber::DEFAULT_INVERSION_TOLERANCE;
        if let Some(direct) =
            mixing.record_result(inverse_of_mix(&p, &xs, fiber_tol), || "mix".into())
        {
            let inverses: Vec<Section> = xs
                .iter()
                .map(|x| inverse(x, fiber_tol).expect("checked"))
                .collect();
            let glued = Section::mix(&p, &inverses).expect("lengths match");
            let gap = direct.max_distance(&glued).expect("same bundle");
            mixing.record_le(gap, 0.0, crate::inversion::MIXING_TOLERANCE, || {
                format!("{} parts", p.len())
            });
        }
    }
    vec![agreement, neumann_bound, perturbation, continuity, mixing]
}

/// The spm property suite, definitional membership, the scaling identity,
/// and `spm ⇒ sp`.
pub fn spectrum_suite(
    bundle: &BundleRef,
    samples: usize,
    tol: f64,
    cap: usize,
    rng: &mut Rng,
) -> Vec<Check> {
    let space = bundle.space().clone();
    let sections = (samples / 10).clamp(1, 50);
    let mut nonempty = Check::new("spm(x) nonempty");
    let mut cyclic = Check::new("spm(x) cyclic");
    let mut closed = Check::new("spm(x) (o)-closed");
    let mut bounded = Check::new("spm(x) bounded by ‖x‖");
    let mut definitional = Check::new("table membership = singular-value membership");
    let mut scaling = Check::new("spm scaling identity");
    let mut implication = Check::new("spm ⇒ sp");
    for _ in 0..sections {
        let x = rng.section(bundle);
        match spm_properties(&x, 10, tol, cap, rng) {
            Ok(r) => {
                for (dst, src) in [
                    (&mut nonempty, &r.nonempty),
                    (&mut cyclic, &r.cyclic),
                    (&mut closed, &r.closed),
                    (&mut bounded, &r.bounded),
                    (&mut definitional, &r.definitional),
                ] {
                    dst.checks += src.checks;
                    dst.failures += src.failures;
                    dst.witnesses.extend(src.witnesses.iter().take(2).cloned());
                }
            }
            Err(e) => nonempty.record(false, || e.to_string()),
        }
    }
    for _ in 0..samples {
        let x = rng.section(bundle);
        let Some(table) = nonempty.record_result(spectrum_table(&x, tol), || "spectrum".into())
        else {
            continue;
        };
        // per atom: an eigenvalue or a random point
        let a = EFunction::from_fn(&space, |i| {
            if rng.uniform(0.0, 1.0) < 0.7 {
                let eigs = table.at(i);
                eigs[rng.index(eigs.len())]
            } else {
                rng.complex() * 3.0
            }
        });
        let by_table = table.spm_contains(&a, tol).expect("same space");
        let by_def = spm_contains_by_invertibility(&x, &a, tol).expect("same space");
        definitional.record(by_table == by_def, || {
            format!("table {by_table} vs definition {by_def}")
        });
        let sp_table = table.sp_contains(&a, tol).expect("same space");
        let sp_def = sp_contains_by_invertibility(&x, &a, tol).expect("same space");
        definitional.record(sp_table == sp_def, || {
            format!("sp: table {sp_table} vs definition {sp_def}")
        });
        implication.record(!by_table || sp_table, || "spm member outside sp".into());

        let s = x.norm().map(|n| Complex64::new(1.0 / (1.0 + n.re), 0.0));
        let xs = x.module_mul(&s).expect("same space");
        let as_ = a.mul(&s).expect("same space");
        match spectrum_table(&xs, tol) {
            Ok(t2) => {
                let scaled = t2.spm_contains(&as_, tol).expect("same space");
                scaling.record(scaled == by_table, || {
                    format!("{by_table} vs scaled {scaled}")
                });
            }
            Err(e) => scaling.record(false, || e.to_string()),
        }
    }
    vec![
        nonempty,
        cyclic,
        closed,
        bounded,
        definitional,
        scaling,
        implication,
    ]
}

/// Quotient norm equality, τ-checks, and the Hilbert–Kaplansky operator algebra.
pub fn representation_suite(bundle: &BundleRef, samples: usize, rng: &mut Rng) -> Vec<Check> {
    let space = bundle.space().clone();
    let mut equality = Check::new("‖i_ω(u)‖ = coset norm");
    for _ in 0..samples {
        let u = rng.section(bundle);
        for atom in space.atoms() {
            let alpha = seminorm_alpha(&u, atom).expect("atom exists");
            match quotient_norm(&u, atom) {
                Ok(q) => equality.record_close(q.value, alpha, 1e-10, || atom.clone()),
                Err(e) => equality.record(false, || e.to_string()),
            }
        }
    }
    let mut checks = vec![equality];

    let gens: Vec<Section> = (0..samples.clamp(1, 50))
        .map(|_| rng.section(bundle))
        .collect();
    match reconstruct_bundle(&gens, samples.min(200), rng) {
        Ok((_, _, report)) => checks.extend(report.checks),
        Err(e) => {
            let mut c = Check::new("reconstruct");
            c.record(false, || e.to_string());
            checks.push(c);
        }
    }

    // Hilbert–Kaplansky module with the fiber sizes of the bundle, capped at 8
    let dims: Vec<usize> = bundle
        .fibers()
        .iter()
        .map(|k| match k {
            FiberKind::Matrix { n } => *n,
            _ => 1,
        })
        .collect();
    let module = HkModule::new(&space, dims).expect("dims within bounds");
    let ops = hk_operator_algebra(&module).expect("valid descriptors");
    let mut inner = Check::new("E-valued inner product axioms");
    let mut sup = Check::new("sampled sup = operator norm");
    let mut hk_submult = Check::new("‖ST‖ ≤ ‖S‖‖T‖ in B(A)");
    let op_samples = (samples / 50).clamp(1, 10);
    for k in 0..samples {
        let (x, y) = (
            HkElement::random(&module, rng),
            HkElement::random(&module, rng),
        );
        let xx = hk_inner(&x, &x).expect("same module");
        let xy = hk_inner(&x, &y).expect("same module");
        let yx = hk_inner(&y, &x).expect("same module");
        for i in 0..space.len() {
            inner.record(
                xx.at(i).re >= 0.0 && xx.at(i).im.abs() <= EFUNCTION_TOLERANCE,
                || "⟨x,x⟩ ≥ 0".into(),
            );
            inner.record_le(
                close(xy.at(i), yx.at(i).conj()),
                0.0,
                EFUNCTION_TOLERANCE,
                || "⟨x,y⟩ = conj⟨y,x⟩".into(),
            );
        }
        let (s, t) = (rng.section(&ops), rng.section(&ops));
        let (ns, nt, nst) = (s.norm(), t.norm(), s.mul(&t).expect("same bundle").norm());
        for i in 0..space.len() {
            hk_submult.record_le(
                nst.at(i).re,
                ns.at(i).re * nt.at(i).re,
                AXIOM_TOLERANCE,
                || space.atom(i).to_string(),
            );
        }
        if k < op_samples {
            match hk_operator_norm_check(
                &t,
                &module,
                crate::representation::DEFAULT_UNIT_VECTOR_SAMPLES,
                rng,
            ) {
                Ok(chk) => sup.record(chk.agrees, || {
                    format!(
                        "sampled {} vs operator norm {}",
                        chk.sampled, chk.operator_norm
                    )
                }),
                Err(e) => sup.record(false, || e.to_string()),
            }
        }
    }
    let zero = HkElement::new(
        &module,
        module
            .dims()
            .iter()
            .map(|&d| vec![Complex64::new(0.0, 0.0); d])
            .collect(),
    )
    .expect("shapes match");
    inner.record(
        hk_inner(&zero, &zero).expect("same module") == EFunction::zero(&space),
        || "⟨0,0⟩ ≠ 0".into(),
    );
    checks.extend([inner, sup, hk_submult]);
    checks
}

/// Soundness of both checkers' verdicts on this bundle.
pub fn gelfand_mazur_suite(bundle: &BundleRef, samples: usize, rng: &mut Rng) -> Vec<Check> {
    let mut sound = Check::new("verdicts are sound");
    let mut claims = Check::new("verdicts match fiber structure");
    let tol = 1e-10;
    for (name, result) in [
        (
            "unit-support",
            gm_unit_support_check(bundle, samples, tol, rng),
        ),
        (
            "reverse-bound",
            gm_reverse_bound_check(bundle, samples, tol, rng),
        ),
    ] {
        match result {
            Ok(v) => {
                sound.record(v.is_sound(), || {
                    format!("{name} verdict failed re-verification")
                });
                let iso = matches!(v.outcome, Outcome::Isomorphic { .. });
                claims.record(iso == bundle.all_one_dimensional(), || {
                    format!(
                        "{name}: outcome {} on {:?}",
                        v.outcome.label(),
                        bundle.fibers()
                    )
                });
            }
            Err(e) => sound.record(false, || format!("{name}: {e}")),
        }
    }
    vec![sound, claims]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::Bundle;
    use crate::measure::AtomicMeasureSpace;

    #[test]
    fn full_suite_passes_on_a_mixed_bundle() {
        let space = AtomicMeasureSpace::uniform(3).unwrap();
        let b = Bundle::new(
            &space,
            vec![
                FiberKind::Scalar,
                FiberKind::Matrix { n: 3 },
                FiberKind::Function { k: 2 },
            ],
        )
        .unwrap();
        let config = SuiteConfig {
            samples: 20,
            tolerance: 1e-8,
            cap: 4096,
        };
        for report in verify_all(&b, config, &Rng::new(0)) {
            for c in &report.checks {
                assert!(c.passed(), "{}: {c:?}", report.module);
                assert!(c.checks > 0, "{}: {} ran no checks", report.module, c.name);
            }
        }
    }
}
