use std::sync::Arc;

use proptest::prelude::*;

use dforms::hecke::{self, DivisorType, LocalMatrix, LocalRing};
use dforms::skew::{Scalar, SkewPoly};
use dforms::{FieldDesc, FieldElement};

fn big_field(q: u64, n: u32) -> Arc<FieldDesc> {
    FieldDesc::with_order(q).unwrap().extension(n).unwrap()
}

fn skew(field: &Arc<FieldDesc>, raw: &[u32]) -> SkewPoly<FieldElement> {
    let coeffs = raw.iter().map(|&v| field.elem(v % field.size())).collect();
    SkewPoly::new(coeffs, &field.zero())
}

fn raw_poly() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..1 << 16, 0..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_inverse_and_frobenius(q in prop::sample::select(vec![2u64, 3, 4, 5]), n in 1u32..4, v in 1u32..1 << 16) {
        let f = big_field(q, n);
        let a = f.elem(v % (f.size() - 1) + 1);
        prop_assert!(a.try_mul(&a.inv().unwrap()).unwrap().is_one());
        prop_assert_eq!(a.frobenius(1), a.pow(q as i64).unwrap());
        prop_assert_eq!(a.frobenius(n), a);
    }

    #[test]
    fn skew_multiplication_is_associative(a in raw_poly(), b in raw_poly(), c in raw_poly()) {
        let f = big_field(3, 3);
        let (a, b, c) = (skew(&f, &a), skew(&f, &b), skew(&f, &c));
        let left = a.try_mul(&b).unwrap().try_mul(&c).unwrap();
        let right = a.try_mul(&b.try_mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn right_division_reconstructs(a in raw_poly(), b in raw_poly()) {
        let f = big_field(2, 4);
        let (a, b) = (skew(&f, &a), skew(&f, &b));
        prop_assume!(!b.is_zero());
        let (quo, rem) = a.right_div_rem(&b).unwrap();
        prop_assert_eq!(quo.try_mul(&b).unwrap().try_add(&rem).unwrap(), a);
        prop_assert!(rem.is_zero() || rem.degree() < b.degree());
    }

    #[test]
    fn evaluation_is_additive(a in raw_poly(), x in 0u32..64, y in 0u32..64) {
        let f = big_field(2, 6);
        let p = skew(&f, &a);
        let (x, y) = (f.elem(x), f.elem(y));
        prop_assert_eq!(p.eval(&x.plus(&y)), p.eval(&x).plus(&p.eval(&y)));
    }

    #[test]
    fn smith_type_ignores_unit_changes(entries in prop::collection::vec(0u16..81, 4), u in prop::collection::vec(0u16..81, 4)) {
        let o = LocalRing::new(3, 4).unwrap();
        let m = LocalMatrix::new(2, entries).unwrap();
        let u = LocalMatrix::new(2, u).unwrap();
        prop_assume!(o.is_unit(u.det(&o)));
        match hecke::smith_type(&o, &m) {
            Ok(t) => {
                prop_assert_eq!(hecke::smith_type(&o, &u.mul(&o, &m)).unwrap(), t.clone());
                prop_assert_eq!(hecke::smith_type(&o, &m.mul(&o, &u)).unwrap(), t);
            }
            Err(_) => prop_assert!(hecke::smith_type(&o, &u.mul(&o, &m)).is_err()),
        }
    }
}

#[test]
fn hecke_products_commute() {
    for q in [2u64, 3] {
        let types = DivisorType::all_up_to(2, 2);
        for a in &types {
            for b in &types {
                assert_eq!(hecke::convolve(q, a, b).unwrap(), hecke::convolve(q, b, a).unwrap(), "{a} {b}");
            }
        }
    }
}

#[test]
fn rank_three_hecke_square() {
    // T_(0,0,1)^2 = (q+1)·T_(0,1,1) + T_(0,0,2) in rank three.
    let t = DivisorType::new(vec![0, 0, 1]).unwrap();
    let p = hecke::convolve(2, &t, &t).unwrap();
    assert_eq!(p.get(&DivisorType::new(vec![0, 1, 1]).unwrap()), 3);
    assert_eq!(p.get(&DivisorType::new(vec![0, 0, 2]).unwrap()), 1);
    assert_eq!(p.len(), 2);
    assert_eq!(hecke::mass(2, &p).unwrap(), 49);
}
