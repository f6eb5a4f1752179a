//! Twisted polynomials `Σ b_i τ^i` with `τ·b = b^q·τ`.
//!
//! A skew polynomial acts on its coefficient field as the `F_q`-linear
//! additive polynomial `Σ b_i X^(q^i)`; the product corresponds to
//! composition of these maps.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{FieldDesc, FieldElement};

/// Coefficient fields for skew polynomials: a field of characteristic `p`
/// containing `F_q`, with the `q`-power Frobenius.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negate(&self) -> Self;
    fn invert(&self) -> Result<Self>;
    /// `x^(q^k)`.
    fn frob(&self, k: u32) -> Self;
    fn same_field(&self, o: &Self) -> bool;
    /// Image of an element of `F_q` (or of this field itself).
    fn from_base(&self, a: &FieldElement) -> Result<Self>;
    /// Order `q` of the constant field.
    fn base_order(&self) -> u32;

    fn pow_u(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.times(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.times(&base);
            }
        }
        acc
    }
}

impl Scalar for FieldElement {
    fn zero_like(&self) -> Self {
        FieldElement::zero_like(self)
    }
    fn one_like(&self) -> Self {
        FieldElement::one_like(self)
    }
    fn is_zero(&self) -> bool {
        FieldElement::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn invert(&self) -> Result<Self> {
        self.inv()
    }
    fn frob(&self, k: u32) -> Self {
        self.frobenius(k)
    }
    fn same_field(&self, o: &Self) -> bool {
        **self.field() == **o.field()
    }
    fn from_base(&self, a: &FieldElement) -> Result<Self> {
        self.field().embed(a)
    }
    fn base_order(&self) -> u32 {
        self.field().q()
    }
}

/// `Σ b_i τ^i`; the zero polynomial has no coefficients.
#[derive(Clone, PartialEq)]
pub struct SkewPoly<C: Scalar> {
    coeffs: Vec<C>,
    zero: C,
}

impl<C: Scalar> SkewPoly<C> {
    pub fn new(mut coeffs: Vec<C>, sample: &C) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        SkewPoly { coeffs, zero: sample.zero_like() }
    }

    pub fn zero(sample: &C) -> Self {
        Self::new(Vec::new(), sample)
    }

    pub fn constant(c: C) -> Self {
        let s = c.clone();
        Self::new(vec![c], &s)
    }

    pub fn one(sample: &C) -> Self {
        Self::constant(sample.one_like())
    }

    /// `c·τ^k`.
    pub fn term(c: C, k: usize) -> Self {
        let mut v = vec![c.zero_like(); k];
        let s = c.clone();
        v.push(c);
        Self::new(v, &s)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> C {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.zero.clone())
    }

    pub fn sample(&self) -> &C {
        &self.zero
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// τ-degree; `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&C> {
        self.coeffs.last()
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.zero.same_field(&o.zero) {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let n = self.coeffs.len().max(o.coeffs.len());
        Ok(Self::new((0..n).map(|i| self.coeff(i).plus(&o.coeff(i))).collect(), &self.zero))
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let n = self.coeffs.len().max(o.coeffs.len());
        Ok(Self::new((0..n).map(|i| self.coeff(i).minus(&o.coeff(i))).collect(), &self.zero))
    }

    /// `c·self` (left multiplication by a constant).
    pub fn scale_left(&self, c: &C) -> Self {
        Self::new(self.coeffs.iter().map(|b| c.times(b)).collect(), &self.zero)
    }

    /// Twisted product: `(a_i τ^i)(b_j τ^j) = a_i b_j^(q^i) τ^(i+j)`.
    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        if self.is_zero() || o.is_zero() {
            return Ok(Self::zero(&self.zero));
        }
        let mut out = vec![self.zero.clone(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].plus(&a.times(&b.frob(i as u32)));
            }
        }
        Ok(Self::new(out, &self.zero))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.zero);
        for _ in 0..e {
            acc = acc.try_mul(self).expect("same field");
        }
        acc
    }

    /// `self = quotient·divisor + remainder` with `deg remainder < deg divisor`.
    pub fn right_div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        self.check(divisor)?;
        let m = divisor.degree().ok_or(Error::ZeroPolynomial)?;
        let lead = divisor.coeffs[m].clone();
        let mut quotient = vec![self.zero.clone(); self.coeffs.len().saturating_sub(m)];
        let mut rem = self.clone();
        while let Some(n) = rem.degree() {
            if n < m {
                break;
            }
            let shift = n - m;
            let c = rem.coeffs[n].times(&lead.frob(shift as u32).invert()?);
            quotient[shift] = quotient[shift].plus(&c);
            let sub = Self::term(c, shift).try_mul(divisor)?;
            rem = rem.try_sub(&sub)?;
            if rem.degree() == Some(n) {
                return Err(Error::Consistency("right division did not lower the degree".into()));
            }
        }
        Ok((Self::new(quotient, &self.zero), rem))
    }

    /// `Σ b_i x^(q^i)`.
    pub fn eval(&self, x: &C) -> C {
        let mut acc = x.zero_like();
        let mut xi = x.clone();
        for (i, b) in self.coeffs.iter().enumerate() {
            if i > 0 {
                xi = xi.frob(1);
            }
            if !b.is_zero() {
                acc = acc.plus(&b.times(&xi));
            }
        }
        acc
    }

    /// Monic `∏_{v ∈ span(basis)} (X - v)`, built one basis vector at a time
    /// via `P ← (τ - P(h)^(q-1))·P`. Fails if the basis is dependent.
    pub fn subspace_poly(basis: &[C], sample: &C) -> Result<Self> {
        let mut p = Self::one(sample);
        let q = sample.base_order() as u64;
        for h in basis {
            let v = p.eval(h);
            if v.is_zero() {
                return Err(Error::NotInjective);
            }
            let factor = Self::new(vec![v.pow_u(q - 1).negate(), sample.one_like()], sample);
            p = factor.try_mul(&p)?;
        }
        Ok(p)
    }
}

impl SkewPoly<FieldElement> {
    /// Moves coefficients into `field` (which must equal or extend their field).
    pub fn embed_into(&self, field: &Arc<FieldDesc>) -> Result<Self> {
        let coeffs = self.coeffs.iter().map(|c| field.embed(c)).collect::<Result<Vec<_>>>()?;
        Ok(Self::new(coeffs, &field.zero()))
    }

    /// Every root in `field` of the additive polynomial.
    pub fn kernel_roots(&self, field: &Arc<FieldDesc>) -> Result<Vec<FieldElement>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let p = self.embed_into(field)?;
        Ok(field.elements().filter(|x| p.eval(x).is_zero()).collect())
    }
}

/// Roots of `p` as a set, for comparisons.
pub fn root_set(roots: &[FieldElement]) -> HashSet<u32> {
    roots.iter().map(|x| x.value()).collect()
}

impl<C: Scalar> fmt::Display for SkewPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("({c})"),
                1 => format!("({c})*τ"),
                _ => format!("({c})*τ^{i}"),
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl<C: Scalar> fmt::Debug for SkewPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tower(q: u64, n: u32) -> Arc<FieldDesc> {
        FieldDesc::with_order(q).unwrap().extension(n).unwrap()
    }

    fn random(
        field: &Arc<FieldDesc>,
        rng: &mut ChaCha8Rng,
        degs: std::ops::RangeInclusive<usize>,
    ) -> SkewPoly<FieldElement> {
        let deg = rng.gen_range(degs);
        let coeffs = (0..=deg).map(|_| field.elem(rng.gen_range(0..field.size()))).collect();
        SkewPoly::new(coeffs, &field.zero())
    }

    #[test]
    fn tau_commutes_past_constants() {
        let f4 = tower(2, 2);
        let w = f4.elem(2);
        let tau = SkewPoly::term(f4.one(), 1);
        let prod = tau.try_mul(&SkewPoly::constant(w)).unwrap();
        assert_eq!(prod, SkewPoly::term(f4.elem(3), 1));
        let a = SkewPoly::constant(f4.elem(2));
        let b = SkewPoly::constant(f4.elem(3));
        assert_eq!(a.try_mul(&b).unwrap(), SkewPoly::constant(f4.elem(1)));
    }

    #[test]
    fn associativity_over_f9() {
        let f9 = tower(3, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let (a, b, c) = (
                random(&f9, &mut rng, 0..=4),
                random(&f9, &mut rng, 0..=4),
                random(&f9, &mut rng, 0..=4),
            );
            let lhs = a.try_mul(&b).unwrap().try_mul(&c).unwrap();
            let rhs = a.try_mul(&b.try_mul(&c).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn degree_is_additive() {
        let f = tower(2, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let a = random(&f, &mut rng, 3..=3);
            let b = random(&f, &mut rng, 2..=2);
            if let (Some(da), Some(db)) = (a.degree(), b.degree()) {
                assert_eq!(a.try_mul(&b).unwrap().degree(), Some(da + db));
            }
        }
    }

    #[test]
    fn divide_exact_products() {
        let f = tower(3, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let a = random(&f, &mut rng, 0..=3);
            let b = random(&f, &mut rng, 0..=3);
            if b.is_zero() {
                continue;
            }
            let (quo, rem) = a.try_mul(&b).unwrap().right_div_rem(&b).unwrap();
            assert_eq!(quo, a);
            assert!(rem.is_zero());
        }
    }

    #[test]
    fn division_contract() {
        let f = tower(4, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let a = random(&f, &mut rng, 0..=6);
            let b = random(&f, &mut rng, 0..=3);
            if b.is_zero() {
                assert_eq!(a.right_div_rem(&b).unwrap_err(), Error::ZeroPolynomial);
                continue;
            }
            let (quo, rem) = a.right_div_rem(&b).unwrap();
            assert_eq!(quo.try_mul(&b).unwrap().try_add(&rem).unwrap(), a);
            assert!(rem.degree().is_none_or(|d| d < b.degree().unwrap()));
        }
    }

    #[test]
    fn tau_squared_minus_one() {
        let f5 = FieldDesc::prime(5).unwrap();
        let one = f5.one();
        let a = SkewPoly::new(vec![-&one, f5.zero(), one.clone()], &one);
        let b = SkewPoly::new(vec![-&one, one.clone()], &one);
        let (quo, rem) = a.right_div_rem(&b).unwrap();
        assert_eq!(quo, SkewPoly::new(vec![one.clone(), one.clone()], &one));
        assert!(rem.is_zero());
        let small = SkewPoly::constant(f5.elem(3));
        assert_eq!(small.right_div_rem(&b).unwrap(), (SkewPoly::zero(&one), small));
    }

    #[test]
    fn kernel_examples() {
        for q in [2u64, 3, 4] {
            let fq = FieldDesc::with_order(q).unwrap();
            let one = fq.one();
            let a = SkewPoly::new(vec![-&one, one.clone()], &one);
            assert_eq!(a.kernel_roots(&fq).unwrap().len(), q as usize);
            assert!(a.eval(&fq.zero()).is_zero());
        }
        let f4 = FieldDesc::with_order(4).unwrap();
        let tau = SkewPoly::term(f4.one(), 1);
        for n in 1..4 {
            let big = f4.extension(n).unwrap();
            assert_eq!(tau.kernel_roots(&big).unwrap(), vec![big.zero()]);
        }
        assert_eq!(tau.kernel_roots(&f4).unwrap(), vec![f4.zero()]);
        assert_eq!(SkewPoly::zero(&f4.one()).kernel_roots(&f4).unwrap_err(), Error::ZeroPolynomial);
    }

    #[test]
    fn evaluation_is_additive_and_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for (q, n) in [(2u64, 6u32), (3, 4), (4, 3), (5, 2)] {
            let base = FieldDesc::with_order(q).unwrap();
            let f = base.extension(n).unwrap();
            let basevals = f.base_values();
            for _ in 0..50 {
                let a = random(&f, &mut rng, 3..=3);
                let b = random(&f, &mut rng, 2..=2);
                let x = f.elem(rng.gen_range(0..f.size()));
                let y = f.elem(rng.gen_range(0..f.size()));
                let alpha = f.elem(basevals[rng.gen_range(0..basevals.len())]);
                assert_eq!(a.eval(&(&x + &y)), &a.eval(&x) + &a.eval(&y));
                assert_eq!(a.eval(&(&alpha * &x)), &alpha * &a.eval(&x));
                let ab = a.try_mul(&b).unwrap();
                assert_eq!(ab.eval(&x), a.eval(&b.eval(&x)));
            }
        }
    }

    #[test]
    fn subspace_poly_vanishes_on_span() {
        let base = FieldDesc::with_order(3).unwrap();
        let f = base.extension(4).unwrap();
        let basis = vec![f.elem(1), f.elem(3), f.elem(10)];
        let p = SkewPoly::subspace_poly(&basis, &f.zero()).unwrap();
        assert_eq!(p.degree(), Some(3));
        let roots = p.kernel_roots(&f).unwrap();
        assert_eq!(roots.len(), 27);
        let dep = vec![f.elem(1), f.elem(2)];
        assert_eq!(SkewPoly::subspace_poly(&dep, &f.zero()).unwrap_err(), Error::NotInjective);
    }
}
