//! Finite fields `F_q` and their extensions `F_{q^n}`.
//!
//! Elements are stored as integers `Σ c_i p^i` over the power basis of a
//! defining polynomial; multiplication goes through discrete log tables, so
//! every field is capped at [`MAX_FIELD_SIZE`] elements.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};

pub const MAX_FIELD_SIZE: u64 = 1 << 16;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q = p^m`.
pub fn prime_power(q: u64) -> Result<(u32, u32)> {
    if q < 2 {
        return Err(Error::NotPrimePower(q));
    }
    let mut p = 2;
    while !q.is_multiple_of(p) {
        p += 1;
    }
    let mut rest = q;
    let mut m = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        m += 1;
    }
    if rest != 1 {
        return Err(Error::NotPrimePower(q));
    }
    Ok((p as u32, m))
}

// Polynomials over F_p as coefficient vectors, low degree first.

fn trim(f: &mut Vec<u32>) {
    while f.last() == Some(&0) {
        f.pop();
    }
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let inv_lead = mod_inv(b[db], p);
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let c = r[r.len() - 1] as u64 * inv_lead as u64 % p as u64;
        for (i, &bi) in b.iter().enumerate() {
            let sub = c * bi as u64 % p as u64;
            r[shift + i] = ((r[shift + i] as u64 + p as u64 - sub) % p as u64) as u32;
        }
        trim(&mut r);
    }
    r
}

fn mod_inv(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

fn digits_of(mut index: u64, p: u32, len: u32) -> Vec<u32> {
    (0..len)
        .map(|_| {
            let d = (index % p as u64) as u32;
            index /= p as u64;
            d
        })
        .collect()
}

/// Irreducibility over F_p by trial division with every monic polynomial of
/// degree at most `deg/2`.
pub fn is_irreducible(f: &[u32], p: u32) -> bool {
    let mut f = f.to_vec();
    trim(&mut f);
    let d = f.len().saturating_sub(1) as u32;
    if d == 0 {
        return false;
    }
    for e in 1..=d / 2 {
        let count = (p as u64).pow(e);
        for idx in 0..count {
            let mut g = digits_of(idx, p, e);
            g.push(1);
            if poly_rem(&f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Smallest monic irreducible polynomial of degree `d` over F_p, ordering the
/// non-leading coefficients by the integer `Σ a_i p^i`.
pub fn default_modulus(p: u32, d: u32) -> Vec<u32> {
    let count = (p as u64).pow(d);
    for idx in 0..count {
        let mut f = digits_of(idx, p, d);
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// A finite field `F_{q^n}` with `q = p^m`, together with its log tables.
///
/// When `n > 1` the field remembers its base field `F_q` and where the base
/// generator lands, so elements of `F_q` embed canonically.
pub struct FieldDesc {
    p: u32,
    m: u32,
    n: u32,
    modulus: Vec<u32>,
    size: u32,
    q: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    base: Option<Arc<FieldDesc>>,
    base_image: Vec<u32>,
}

impl fmt::Debug for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.size)?;
        if self.n > 1 {
            write!(f, "/F_{}", self.q)?;
        }
        write!(f, " mod {:?}", self.modulus)
    }
}

impl PartialEq for FieldDesc {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self, other)
            || (self.p == other.p
                && self.m == other.m
                && self.n == other.n
                && self.modulus == other.modulus)
    }
}

impl Eq for FieldDesc {}

impl FieldDesc {
    /// `F_q` with `q = p^m`; the modulus defaults to the smallest irreducible.
    pub fn new(p: u32, m: u32, modulus: Option<Vec<u32>>) -> Result<Arc<FieldDesc>> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if m == 0 {
            return Err(Error::InvalidDegree(m));
        }
        let modulus = match modulus {
            Some(mut f) => {
                f.iter_mut().for_each(|c| *c %= p);
                trim(&mut f);
                if f.len() != m as usize + 1 || f[m as usize] != 1 {
                    return Err(Error::BadModulus { expected: m, got: f });
                }
                if !is_irreducible(&f, p) {
                    return Err(Error::ReducibleModulus { p });
                }
                f
            }
            None => default_modulus(p, m),
        };
        Self::build(p, m, 1, modulus, None).map(Arc::new)
    }

    pub fn prime(p: u32) -> Result<Arc<FieldDesc>> {
        Self::new(p, 1, None)
    }

    /// The field with `q` elements, default modulus.
    pub fn with_order(q: u64) -> Result<Arc<FieldDesc>> {
        let (p, m) = prime_power(q)?;
        Self::new(p, m, None)
    }

    /// The tower extension `F_{q^n}` of this field.
    pub fn extension(self: &Arc<Self>, n: u32) -> Result<Arc<FieldDesc>> {
        if n == 0 {
            return Err(Error::InvalidDegree(n));
        }
        if self.n != 1 {
            return Err(Error::Invalid("towers are built over a base field".into()));
        }
        if n == 1 {
            return Ok(self.clone());
        }
        let modulus = default_modulus(self.p, self.m * n);
        Self::build(self.p, self.m, n, modulus, Some(self.clone())).map(Arc::new)
    }

    fn build(
        p: u32,
        m: u32,
        n: u32,
        modulus: Vec<u32>,
        base: Option<Arc<FieldDesc>>,
    ) -> Result<FieldDesc> {
        let d = m * n;
        let size64 = (p as u64).checked_pow(d).ok_or(Error::FieldTooLarge(u64::MAX))?;
        if size64 > MAX_FIELD_SIZE {
            return Err(Error::FieldTooLarge(size64));
        }
        let size = size64 as u32;
        let q = p.pow(m);
        let mut field = FieldDesc {
            p,
            m,
            n,
            modulus,
            size,
            q,
            exp: Vec::new(),
            log: Vec::new(),
            base: None,
            base_image: Vec::new(),
        };
        field.build_tables();
        if let Some(base) = base {
            // Send the base generator to the smallest root of its modulus.
            let root = (0..size)
                .find(|&x| {
                    let mut acc = 0;
                    for &c in base.modulus.iter().rev() {
                        acc = field.add(field.mul(acc, x), c);
                    }
                    acc == 0
                })
                .ok_or_else(|| Error::Consistency("base modulus has no root".into()))?;
            field.base_image = (0..base.size)
                .map(|v| {
                    let mut acc = 0;
                    for &c in base.coords(v).iter().rev() {
                        acc = field.add(field.mul(acc, root), c);
                    }
                    acc
                })
                .collect();
            field.base = Some(base);
        }
        Ok(field)
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let d = self.degree() as usize;
        let p = self.p as u64;
        let (da, db) = (self.coords(a), self.coords(b));
        let mut prod = vec![0u64; 2 * d];
        for i in 0..d {
            for j in 0..d {
                prod[i + j] = (prod[i + j] + da[i] as u64 * db[j] as u64) % p;
            }
        }
        let prod: Vec<u32> = prod.into_iter().map(|c| c as u32).collect();
        let r = poly_rem(&prod, &self.modulus, self.p);
        self.from_coords(&r)
    }

    fn build_tables(&mut self) {
        let order = self.size - 1;
        let mut log = vec![0u32; self.size as usize];
        for g in 1..self.size {
            let mut exp = Vec::with_capacity(order as usize);
            let mut x = 1u32;
            let mut ok = true;
            for i in 0..order {
                if i > 0 && x == 1 {
                    ok = false;
                    break;
                }
                exp.push(x);
                x = self.mul_slow(x, g);
            }
            if ok && x == 1 {
                for (i, &e) in exp.iter().enumerate() {
                    log[e as usize] = i as u32;
                }
                self.exp = exp;
                self.log = log;
                return;
            }
        }
        unreachable!("multiplicative group of a finite field is cyclic")
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    /// Order `q` of the base field.
    pub fn q(&self) -> u32 {
        self.q
    }

    /// `m` with `q = p^m`.
    pub fn base_degree(&self) -> u32 {
        self.m
    }

    /// Tower degree `n` over `F_q`.
    pub fn tower_degree(&self) -> u32 {
        self.n
    }

    /// Degree over the prime field.
    pub fn degree(&self) -> u32 {
        self.m * self.n
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.degree() == 1
    }

    pub fn base_field(self: &Arc<Self>) -> Arc<FieldDesc> {
        self.base.clone().unwrap_or_else(|| self.clone())
    }

    pub fn coords(&self, v: u32) -> Vec<u32> {
        digits_of(v as u64, self.p, self.degree())
    }

    pub fn from_coords(&self, c: &[u32]) -> u32 {
        c.iter()
            .rev()
            .fold(0u64, |acc, &d| acc * self.p as u64 + (d % self.p) as u64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.degree() == 1 {
            (a + b) % self.p
        } else if self.p == 2 {
            a ^ b
        } else {
            let (mut a, mut b) = (a, b);
            let mut out = 0;
            let mut place = 1;
            while a > 0 || b > 0 {
                out += ((a % self.p + b % self.p) % self.p) * place;
                a /= self.p;
                b /= self.p;
                place *= self.p;
            }
            out
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            a
        } else if self.degree() == 1 {
            (self.p - a) % self.p
        } else {
            let mut a = a;
            let mut out = 0;
            let mut place = 1;
            while a > 0 {
                out += ((self.p - a % self.p) % self.p) * place;
                a /= self.p;
                place *= self.p;
            }
            out
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = self.log[a as usize] as u64 + self.log[b as usize] as u64;
        self.exp[(s % (self.size as u64 - 1)) as usize]
    }

    #[inline]
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let order = self.size - 1;
        Some(self.exp[((order - self.log[a as usize]) % order) as usize])
    }

    pub fn pow(&self, a: u32, e: i64) -> Option<u32> {
        if a == 0 {
            return match e {
                0 => Some(1),
                e if e > 0 => Some(0),
                _ => None,
            };
        }
        let order = (self.size - 1) as i64;
        let l = self.log[a as usize] as i64;
        Some(self.exp[(l * e.rem_euclid(order)).rem_euclid(order) as usize])
    }

    /// `a^(q^k)`.
    pub fn frobenius(&self, a: u32, k: u32) -> u32 {
        if a == 0 {
            return 0;
        }
        let order = (self.size - 1) as u64;
        let mut e = 1u64;
        for _ in 0..k {
            e = e * self.q as u64 % order;
        }
        self.exp[(self.log[a as usize] as u64 * e % order) as usize]
    }

    /// A fixed generator of the multiplicative group.
    pub fn primitive(&self) -> u32 {
        if self.size == 2 {
            1
        } else {
            self.exp[1]
        }
    }

    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    pub fn elem(self: &Arc<Self>, v: u32) -> FieldElement {
        assert!(v < self.size, "value out of range");
        FieldElement { field: self.clone(), v }
    }

    pub fn zero(self: &Arc<Self>) -> FieldElement {
        self.elem(0)
    }

    pub fn one(self: &Arc<Self>) -> FieldElement {
        self.elem(1)
    }

    pub fn elements(self: &Arc<Self>) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.size).map(move |v| self.elem(v))
    }

    /// Raw values of the base subfield `F_q` inside this field.
    pub fn base_values(&self) -> Vec<u32> {
        if self.base.is_some() {
            let mut v = self.base_image.clone();
            v.sort_unstable();
            v
        } else {
            (0..self.size).collect()
        }
    }

    /// Embeds an element of this field or of its base field.
    pub fn embed(self: &Arc<Self>, x: &FieldElement) -> Result<FieldElement> {
        if *x.field == **self {
            return Ok(x.clone());
        }
        match &self.base {
            Some(b) if **b == *x.field => Ok(self.elem(self.base_image[x.v as usize])),
            _ => Err(Error::FieldMismatch),
        }
    }

    /// Raw-value version of [`FieldDesc::embed`] for base-field values.
    pub fn embed_base_value(&self, v: u32) -> u32 {
        if self.base.is_some() {
            self.base_image[v as usize]
        } else {
            v
        }
    }

    pub fn format_value(&self, v: u32) -> String {
        if self.is_prime_field() {
            return v.to_string();
        }
        let c = self.coords(v);
        let mut parts = Vec::new();
        for (i, &ci) in c.iter().enumerate().rev() {
            if ci == 0 {
                continue;
            }
            let coef = if ci == 1 && i > 0 { String::new() } else { ci.to_string() };
            parts.push(match i {
                0 => coef,
                1 => format!("{coef}w"),
                _ => format!("{coef}w^{i}"),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }

    /// Parses an integer (prime-field value or constant) or a colon
    /// separated coordinate tuple `c0:c1:...`, constant term first.
    pub fn parse_value(&self, s: &str) -> Result<u32> {
        let s = s.trim();
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() > self.degree() as usize {
            return Err(Error::Parse(format!("too many coordinates in {s:?}")));
        }
        let mut coords = Vec::with_capacity(parts.len());
        for part in parts {
            let c: i64 = part
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad field element {s:?}")))?;
            if c < 0 || c >= self.p as i64 {
                return Err(Error::Parse(format!("coordinate {c} out of range")));
            }
            coords.push(c as u32);
        }
        Ok(self.from_coords(&coords))
    }
}

/// An element of a [`FieldDesc`].
#[derive(Clone)]
pub struct FieldElement {
    field: Arc<FieldDesc>,
    v: u32,
}

impl FieldElement {
    pub fn field(&self) -> &Arc<FieldDesc> {
        &self.field
    }

    pub fn value(&self) -> u32 {
        self.v
    }

    pub fn coords(&self) -> Vec<u32> {
        self.field.coords(self.v)
    }

    pub fn is_zero(&self) -> bool {
        self.v == 0
    }

    pub fn is_one(&self) -> bool {
        self.v == 1
    }

    pub fn zero_like(&self) -> Self {
        self.field.zero()
    }

    pub fn one_like(&self) -> Self {
        self.field.one()
    }

    fn check(&self, o: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.field, &o.field) || *self.field == *o.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(self.field.elem(self.field.add(self.v, o.v)))
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(self.field.elem(self.field.sub(self.v, o.v)))
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(self.field.elem(self.field.mul(self.v, o.v)))
    }

    pub fn inv(&self) -> Result<Self> {
        self.field.inv(self.v).map(|v| self.field.elem(v)).ok_or(Error::ZeroInverse)
    }

    pub fn try_div(&self, o: &Self) -> Result<Self> {
        self.try_mul(&o.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        self.field.pow(self.v, e).map(|v| self.field.elem(v)).ok_or(Error::ZeroInverse)
    }

    /// `x^(q^k)`.
    pub fn frobenius(&self, k: u32) -> Self {
        self.field.elem(self.field.frobenius(self.v, k))
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, o: &Self) -> bool {
        self.v == o.v && (Arc::ptr_eq(&self.field, &o.field) || *self.field == *o.field)
    }
}

impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.v.hash(state);
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for FieldElement {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.v.cmp(&o.v)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field.format_value(self.v))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field.format_value(self.v))
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $try:ident) => {
        impl $tr<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, o: &FieldElement) -> FieldElement {
                self.$try(o).expect("field mismatch")
            }
        }
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, o: FieldElement) -> FieldElement {
                self.$try(&o).expect("field mismatch")
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.field.elem(self.field.neg(self.v))
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_table() {
        let f4 = FieldDesc::new(2, 2, Some(vec![1, 1, 1])).unwrap();
        let w = f4.elem(2);
        assert_eq!(&w * &w, f4.elem(3));
        assert_eq!(&w + &w, f4.zero());
        // as a field with q = 4 the q-Frobenius is trivial
        assert_eq!(w.frobenius(1), w);
        // as the tower F_{2^2} over F_2 it squares
        let tower = FieldDesc::prime(2).unwrap().extension(2).unwrap();
        assert_eq!(tower.modulus(), &[1, 1, 1]);
        let w = tower.elem(2);
        assert_eq!(w.frobenius(1), tower.elem(3));
    }

    #[test]
    fn reducible_modulus_rejected() {
        assert_eq!(
            FieldDesc::new(2, 2, Some(vec![1, 0, 1])).unwrap_err(),
            Error::ReducibleModulus { p: 2 }
        );
        assert_eq!(FieldDesc::new(4, 1, None).unwrap_err(), Error::NotPrime(4));
    }

    #[test]
    fn default_moduli() {
        assert_eq!(default_modulus(2, 2), vec![1, 1, 1]);
        assert_eq!(default_modulus(3, 2), vec![1, 0, 1]);
        assert_eq!(default_modulus(2, 3), vec![1, 1, 0, 1]);
        assert_eq!(default_modulus(5, 1), vec![0, 1]);
    }

    #[test]
    fn irreducibility_matches_root_search_in_degree_two() {
        for p in [2u32, 3, 5] {
            for idx in 0..p * p {
                let f = vec![idx % p, idx / p, 1];
                let has_root = (0..p).any(|x| (f[0] + f[1] * x + x * x) % p == 0);
                assert_eq!(is_irreducible(&f, p), !has_root, "{f:?} over F_{p}");
            }
        }
    }

    #[test]
    fn inverse_and_pow() {
        let f9 = FieldDesc::with_order(9).unwrap();
        for x in f9.elements().skip(1) {
            assert!((&x * &x.inv().unwrap()).is_one());
            assert!(x.pow(8).unwrap().is_one());
        }
        assert_eq!(f9.zero().inv().unwrap_err(), Error::ZeroInverse);
    }

    #[test]
    fn mismatched_fields() {
        let f2 = FieldDesc::prime(2).unwrap();
        let f3 = FieldDesc::prime(3).unwrap();
        assert_eq!(f2.one().try_add(&f3.one()).unwrap_err(), Error::FieldMismatch);
    }

    #[test]
    fn frobenius_cycles_on_towers() {
        for (q, n) in [(2u64, 6u32), (3, 3), (4, 3), (4, 6), (2, 12), (8, 4)] {
            let base = FieldDesc::with_order(q).unwrap();
            let ext = base.extension(n).unwrap();
            assert!(ext.size() as u64 <= 1 << 12);
            for x in ext.elements() {
                assert_eq!(x.frobenius(n), x);
            }
        }
    }

    #[test]
    fn base_embedding_is_a_ring_map() {
        let f4 = FieldDesc::with_order(4).unwrap();
        let ext = f4.extension(3).unwrap();
        for a in f4.elements() {
            let ea = ext.embed(&a).unwrap();
            assert_eq!(ea.frobenius(1), ea);
            for b in f4.elements() {
                let eb = ext.embed(&b).unwrap();
                assert_eq!(ext.embed(&(&a * &b)).unwrap(), &ea * &eb);
                assert_eq!(ext.embed(&(&a + &b)).unwrap(), &ea + &eb);
            }
        }
        assert_eq!(ext.base_values().len(), 4);
    }

    #[test]
    fn parse_and_format() {
        let f4 = FieldDesc::with_order(4).unwrap();
        assert_eq!(f4.parse_value("1:1").unwrap(), 3);
        assert_eq!(f4.format_value(3), "w+1");
        assert!(f4.parse_value("2").is_err());
        let f3 = FieldDesc::prime(3).unwrap();
        assert_eq!(f3.format_value(2), "2");
    }
}
