use bkalg::bundle::{Bundle, BundleRef, Section};
use bkalg::fiber::{FiberElement, FiberKind};
use bkalg::inversion::neumann_inverse;
use bkalg::measure::{AtomicMeasureSpace, EFunction, Idempotent, PartitionOfUnity};
use bkalg::representation::{quotient_norm, seminorm_alpha};
use bkalg::spectrum::{spectrum_table, spm_contains_by_invertibility, spm_enumerate};
use bkalg::Complex64;
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn complex() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn kind() -> impl Strategy<Value = FiberKind> {
    prop_oneof![
        Just(FiberKind::Scalar),
        (1..=4usize).prop_map(|n| FiberKind::Matrix { n }),
        (1..=5usize).prop_map(|k| FiberKind::Function { k }),
    ]
}

fn element(kind: FiberKind) -> impl Strategy<Value = FiberElement> {
    prop::collection::vec(complex(), kind.storage_len())
        .prop_map(move |d| FiberElement::new(kind, d).unwrap())
}

/// A bundle over 1..=5 atoms together with `count` sections of it.
fn sections(count: usize) -> impl Strategy<Value = (BundleRef, Vec<Section>)> {
    prop::collection::vec(kind(), 1..=5)
        .prop_flat_map(move |kinds| {
            let one: Vec<_> = kinds.iter().map(|&k| element(k).boxed()).collect();
            let all = vec![one; count];
            (Just(kinds), all)
        })
        .prop_map(|(kinds, values)| {
            let b = Bundle::new(&AtomicMeasureSpace::uniform(kinds.len()).unwrap(), kinds).unwrap();
            let secs = values
                .into_iter()
                .map(|v| Section::new(&b, v).unwrap())
                .collect();
            (b, secs)
        })
}

fn efunctions(count: usize) -> impl Strategy<Value = Vec<EFunction>> {
    (1..=6usize).prop_flat_map(move |n| {
        prop::collection::vec(prop::collection::vec(complex(), n), count).prop_map(move |vals| {
            let space = AtomicMeasureSpace::uniform(n).unwrap();
            vals.into_iter()
                .map(|v| EFunction::new(&space, v).unwrap())
                .collect()
        })
    })
}

fn close(a: &EFunction, b: &EFunction) -> bool {
    a.max_distance(b).unwrap() <= TOL
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn efunctions_form_a_commutative_unital_algebra(fs in efunctions(3)) {
        let (a, b, c) = (&fs[0], &fs[1], &fs[2]);
        let one = EFunction::one(a.space());
        prop_assert!(close(&a.mul(b).unwrap(), &b.mul(a).unwrap()));
        prop_assert!(close(&a.mul(b).unwrap().mul(c).unwrap(), &a.mul(&b.mul(c).unwrap()).unwrap()));
        prop_assert!(close(
            &a.mul(&b.add(c).unwrap()).unwrap(),
            &a.mul(b).unwrap().add(&a.mul(c).unwrap()).unwrap()
        ));
        prop_assert_eq!(a.mul(&one).unwrap(), a.clone());
        prop_assert!(close(&a.sub(a).unwrap(), &EFunction::zero(a.space())));
    }

    #[test]
    fn mixing_is_local(fs in efunctions(4), labels in prop::collection::vec(0..4usize, 6)) {
        let space = fs[0].space().clone();
        let labels = &labels[..space.len()];
        let p = PartitionOfUnity::from_labels(&space, labels, 4).unwrap();
        let mixed = EFunction::mix(&p, &fs).unwrap();
        for (k, part) in p.parts().iter().enumerate() {
            let pe = part.as_efunction();
            prop_assert_eq!(pe.mul(&mixed).unwrap(), pe.mul(&fs[k]).unwrap());
        }
        // mixing the constant family gives the constant back
        let same = vec![fs[0].clone(); 4];
        prop_assert_eq!(EFunction::mix(&p, &same).unwrap(), fs[0].clone());
    }

    #[test]
    fn idempotents_form_a_boolean_algebra(mask in prop::collection::vec(any::<bool>(), 1..=6), other in prop::collection::vec(any::<bool>(), 6)) {
        let space = AtomicMeasureSpace::uniform(mask.len()).unwrap();
        let p = Idempotent::new(&space, mask.clone()).unwrap();
        let q = Idempotent::new(&space, other[..mask.len()].to_vec()).unwrap();
        prop_assert!(p.meet(&p.complement()).unwrap().is_zero());
        prop_assert!(p.join(&p.complement()).unwrap().is_unit());
        prop_assert_eq!(p.as_efunction().mul(&p.as_efunction()).unwrap(), p.as_efunction());
        let dm = p.meet(&q).unwrap().complement();
        prop_assert_eq!(dm, p.complement().join(&q.complement()).unwrap());
    }

    #[test]
    fn lattice_norm_axioms((b, s) in sections(2), a in prop::collection::vec(complex(), 5)) {
        let (u, v) = (&s[0], &s[1]);
        let a = EFunction::new(b.space(), a[..b.len()].to_vec()).unwrap();
        let (nu, nv) = (u.norm(), v.norm());
        let n_sum = u.add(v).unwrap().norm();
        let n_prod = u.mul(v).unwrap().norm();
        let n_au = u.module_mul(&a).unwrap().norm();
        let n_e = Section::unit(&b).norm();
        for i in 0..b.len() {
            let x = nu.at(i).re;
            prop_assert!(x >= 0.0);
            prop_assert_eq!(x == 0.0, u.value(i).is_zero());
            prop_assert!((n_au.at(i).re - a.at(i).norm() * x).abs() <= TOL * (1.0 + x));
            prop_assert!(n_sum.at(i).re <= x + nv.at(i).re + TOL);
            prop_assert!(n_prod.at(i).re <= x * nv.at(i).re + TOL);
            prop_assert!((n_e.at(i).re - 1.0).abs() <= TOL);
        }
    }

    #[test]
    fn d_decomposition_splits_the_norm((b, s) in sections(1), mask in prop::collection::vec(any::<bool>(), 5)) {
        let u = &s[0];
        let norm = u.norm();
        // λ₁ + λ₂ = ‖u‖ with λ₁ ⊥ λ₂
        let mask = &mask[..b.len()];
        let l1 = EFunction::from_real(b.space(), &(0..b.len()).map(|i| if mask[i] { norm.at(i).re } else { 0.0 }).collect::<Vec<_>>()).unwrap();
        let l2 = norm.sub(&l1).unwrap();
        let (x1, x2) = u.d_decompose(&l1, &l2).unwrap();
        prop_assert!(x1.add(&x2).unwrap().max_distance(u).unwrap() <= 1e-10);
        prop_assert!(x1.norm().max_distance(&l1).unwrap() <= 1e-10);
        prop_assert!(x2.norm().max_distance(&l2).unwrap() <= 1e-10);
    }

    #[test]
    fn neumann_bound_holds((b, s) in sections(1), radius in prop::collection::vec(0.0..0.95f64, 5)) {
        let u = &s[0];
        let x = Section::from_fn(&b, |i| {
            let n = u.value(i).norm();
            if n == 0.0 { u.value(i).clone() } else { u.value(i).scale(Complex64::new(radius[i] / n, 0.0)) }
        }).unwrap();
        let cert = neumann_inverse(&x, 1e-10).unwrap();
        prop_assert!(cert.verify(1e-9).is_ok());
        let e = Section::unit(&b);
        let residual = e.sub(&x).unwrap().mul(&cert.inverse).unwrap().max_distance(&e).unwrap();
        prop_assert!(residual <= 1e-9);
    }

    #[test]
    fn quotient_norm_equals_seminorm((_b, s) in sections(1)) {
        let u = &s[0];
        for atom in u.space().atoms() {
            let q = quotient_norm(u, atom).unwrap();
            prop_assert!((q.value - seminorm_alpha(u, atom).unwrap()).abs() <= 1e-10);
            prop_assert!(q.truncation.contains(u.space().index_of(atom).unwrap()));
        }
    }

    #[test]
    fn enumerated_spm_members_are_singular_shifts((b, s) in sections(1)) {
        let x = &s[0];
        let table = spectrum_table(x, 1e-8).unwrap();
        let en = spm_enumerate(&table, 64).unwrap();
        prop_assert!(!en.members.is_empty());
        for a in &en.members {
            prop_assert!(spm_contains_by_invertibility(x, a, 1e-6).unwrap());
            for i in 0..b.len() {
                prop_assert!(a.at(i).norm() <= x.value(i).norm() + 1e-8);
            }
        }
    }

    #[test]
    fn section_literals_round_trip((b, s) in sections(1)) {
        let lit = s[0].to_literal();
        prop_assert_eq!(Section::from_literal(&b, &lit).unwrap(), s[0].clone());
    }
}
