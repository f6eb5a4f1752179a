//! Rational functions over `F_q`, as unreduced fractions of [`MPoly`].
//!
//! Used as the "generic" base field `F_q(x_1, …, x_r)(t)` for Drinfeld
//! modules. No gcds are taken; equality is by cross-multiplication and the
//! denominator is kept monic in graded-lex order.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::mpoly::{MPoly, PolyRing};
use crate::skew::Scalar;

#[derive(Clone)]
pub struct RatFn {
    num: MPoly,
    den: MPoly,
}

impl RatFn {
    pub fn new(num: MPoly, den: MPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroInverse);
        }
        if num.ring().nvars() != den.ring().nvars() || **num.field() != **den.field() {
            return Err(Error::FieldMismatch);
        }
        Ok(Self::normalized(num, den))
    }

    pub fn poly(num: MPoly) -> Self {
        let den = MPoly::one(num.ring());
        RatFn { num, den }
    }

    /// The `i`-th variable of `ring` as a rational function.
    pub fn var(ring: &Arc<PolyRing>, i: usize) -> Self {
        Self::poly(MPoly::var(ring, i))
    }

    pub fn constant(ring: &Arc<PolyRing>, c: u32) -> Self {
        Self::poly(MPoly::constant(ring, c))
    }

    fn normalized(num: MPoly, den: MPoly) -> Self {
        let field = den.field().clone();
        let lead = den.terms().next_back().map(|(_, c)| c).expect("non-zero denominator");
        if lead == 1 {
            return RatFn { num, den };
        }
        let s = field.inv(lead).expect("non-zero");
        if num.is_zero() {
            return RatFn { num, den: MPoly::one(den.ring()) };
        }
        RatFn { num: num.scale(s), den: den.scale(s) }
    }

    pub fn numerator(&self) -> &MPoly {
        &self.num
    }

    pub fn denominator(&self) -> &MPoly {
        &self.den
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        self.num.ring()
    }
}

impl PartialEq for RatFn {
    fn eq(&self, o: &Self) -> bool {
        if self.den == o.den {
            return self.num == o.num;
        }
        match (self.num.try_mul(&o.den), o.num.try_mul(&self.den)) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.terms().count() == 1 && self.den.degree() == Some(0) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Scalar for RatFn {
    fn zero_like(&self) -> Self {
        Self::poly(MPoly::zero(self.ring()))
    }
    fn one_like(&self) -> Self {
        Self::poly(MPoly::one(self.ring()))
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        if self.den == o.den {
            return RatFn { num: self.num.try_add(&o.num).expect("same ring"), den: self.den.clone() };
        }
        let num = self
            .num
            .try_mul(&o.den)
            .and_then(|a| a.try_add(&o.num.try_mul(&self.den)?))
            .expect("same ring");
        let den = self.den.try_mul(&o.den).expect("same ring");
        Self::normalized(num, den)
    }
    fn minus(&self, o: &Self) -> Self {
        self.plus(&o.negate())
    }
    fn times(&self, o: &Self) -> Self {
        let num = self.num.try_mul(&o.num).expect("same ring");
        if num.is_zero() {
            return self.zero_like();
        }
        Self::normalized(num, self.den.try_mul(&o.den).expect("same ring"))
    }
    fn negate(&self) -> Self {
        RatFn { num: self.num.neg(), den: self.den.clone() }
    }
    fn invert(&self) -> Result<Self> {
        if self.num.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }
    fn frob(&self, k: u32) -> Self {
        RatFn { num: self.num.frobenius(k), den: self.den.frobenius(k) }
    }
    fn same_field(&self, o: &Self) -> bool {
        **self.num.field() == **o.num.field() && self.ring().nvars() == o.ring().nvars()
    }
    fn from_base(&self, a: &FieldElement) -> Result<Self> {
        let v = self.num.field().embed(a)?;
        Ok(Self::constant(self.ring(), v.value()))
    }
    fn base_order(&self) -> u32 {
        self.num.field().q()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldDesc;

    fn ring(q: u64) -> Arc<PolyRing> {
        let f = FieldDesc::with_order(q).unwrap();
        PolyRing::new(&f, vec!["x".into(), "t".into()])
    }

    #[test]
    fn field_axioms_on_samples() {
        let r = ring(3);
        let x = RatFn::var(&r, 0);
        let t = RatFn::var(&r, 1);
        let a = x.plus(&t).times(&t.invert().unwrap());
        let b = x.times(&t.invert().unwrap()).plus(&x.one_like());
        assert_eq!(a, b);
        assert_eq!(a.times(&a.invert().unwrap()), a.one_like());
        assert!(a.minus(&b).is_zero());
        assert_eq!(x.invert().unwrap().invert().unwrap(), x);
    }

    #[test]
    fn frobenius_is_qth_power() {
        let r = ring(4);
        let x = RatFn::var(&r, 0);
        let t = RatFn::var(&r, 1);
        let a = x.plus(&RatFn::constant(&r, 2)).times(&x.plus(&t).invert().unwrap());
        assert_eq!(a.frob(1), a.pow_u(4));
        assert_eq!(a.frob(2), a.pow_u(16));
    }

    #[test]
    fn denominators_are_monic() {
        let r = ring(5);
        let x = RatFn::var(&r, 0);
        let h = x.times(&RatFn::constant(&r, 3)).invert().unwrap();
        assert_eq!(h.denominator().terms().next_back().unwrap().1, 1);
        assert_eq!(h.to_string(), "(2)/(x)");
        assert_eq!(RatFn::new(MPoly::one(&r), MPoly::zero(&r)).unwrap_err(), Error::ZeroInverse);
    }
}
