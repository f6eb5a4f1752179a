//! Sparse multivariate polynomials over a finite field.
//!
//! Terms are kept in graded-lex order with no zero coefficients, so equality
//! is structural and the printed form is canonical.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{FieldDesc, FieldElement};
use crate::linalg::{Echelon, MatrixFq};

/// Coefficient field plus variable names.
#[derive(Debug)]
pub struct PolyRing {
    field: Arc<FieldDesc>,
    names: Vec<String>,
}

impl PolyRing {
    pub fn new(field: &Arc<FieldDesc>, names: Vec<String>) -> Arc<PolyRing> {
        Arc::new(PolyRing { field: field.clone(), names })
    }

    /// `x, y, z` for up to three variables, otherwise `x1 … xr`.
    pub fn standard(field: &Arc<FieldDesc>, r: usize) -> Arc<PolyRing> {
        Self::new(field, standard_names(r))
    }

    pub fn field(&self) -> &Arc<FieldDesc> {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    fn same(&self, o: &PolyRing) -> bool {
        std::ptr::eq(self, o) || (*self.field == *o.field && self.names.len() == o.names.len())
    }
}

pub fn standard_names(r: usize) -> Vec<String> {
    if r <= 3 {
        ["x", "y", "z"][..r].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=r).map(|i| format!("x{i}")).collect()
    }
}

/// Exponent vector ordered by total degree, then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree().cmp(&o.degree()).then_with(|| self.0.cmp(&o.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

#[derive(Clone)]
pub struct MPoly {
    ring: Arc<PolyRing>,
    terms: BTreeMap<Monomial, u32>,
}

impl PartialEq for MPoly {
    fn eq(&self, o: &Self) -> bool {
        self.ring.same(&o.ring) && self.terms == o.terms
    }
}

impl Eq for MPoly {}

impl MPoly {
    pub fn zero(ring: &Arc<PolyRing>) -> Self {
        MPoly { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ring: &Arc<PolyRing>, c: u32) -> Self {
        Self::monomial(ring, vec![0; ring.nvars()], c)
    }

    pub fn one(ring: &Arc<PolyRing>) -> Self {
        Self::constant(ring, 1)
    }

    pub fn var(ring: &Arc<PolyRing>, i: usize) -> Self {
        let mut e = vec![0; ring.nvars()];
        e[i] = 1;
        Self::monomial(ring, e, 1)
    }

    pub fn monomial(ring: &Arc<PolyRing>, exps: Vec<u32>, c: u32) -> Self {
        assert_eq!(exps.len(), ring.nvars());
        let mut p = Self::zero(ring);
        if c != 0 {
            p.terms.insert(Monomial(exps), c);
        }
        p
    }

    /// `Σ coeffs[i]·x_i`.
    pub fn linear_form(ring: &Arc<PolyRing>, coeffs: &[u32]) -> Self {
        let mut p = Self::zero(ring);
        for (i, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                let mut e = vec![0; ring.nvars()];
                e[i] = 1;
                p.terms.insert(Monomial(e), c);
            }
        }
        p
    }

    pub fn from_terms(ring: &Arc<PolyRing>, terms: impl IntoIterator<Item = (Vec<u32>, u32)>) -> Self {
        let mut p = Self::zero(ring);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn field(&self) -> &Arc<FieldDesc> {
        &self.ring.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Vec<u32>, u32)> {
        self.terms.iter().map(|(m, &c)| (&m.0, c))
    }

    pub fn coeff(&self, exps: &[u32]) -> u32 {
        self.terms.get(&Monomial(exps.to_vec())).copied().unwrap_or(0)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: u32) {
        if c == 0 {
            return;
        }
        let f = self.ring.field.clone();
        let key = Monomial(exps);
        match self.terms.get_mut(&key) {
            Some(v) => {
                *v = f.add(*v, c);
                if *v == 0 {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    fn check(&self, o: &MPoly) -> Result<()> {
        if *self.ring.field != *o.ring.field {
            return Err(Error::FieldMismatch);
        }
        if self.ring.nvars() != o.ring.nvars() {
            return Err(Error::DimensionMismatch(format!(
                "{} vs {} variables",
                self.ring.nvars(),
                o.ring.nvars()
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, o: &MPoly) -> Result<MPoly> {
        self.check(o)?;
        let mut out = self.clone();
        for (m, &c) in &o.terms {
            out.add_term(m.0.clone(), c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, o: &MPoly) -> Result<MPoly> {
        self.try_add(&o.neg())
    }

    pub fn neg(&self) -> MPoly {
        let f = &self.ring.field;
        MPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, &c)| (m.clone(), f.neg(c))).collect(),
        }
    }

    pub fn scale(&self, c: u32) -> MPoly {
        if c == 0 {
            return Self::zero(&self.ring);
        }
        let f = &self.ring.field;
        MPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, &v)| (m.clone(), f.mul(v, c))).collect(),
        }
    }

    pub fn try_mul(&self, o: &MPoly) -> Result<MPoly> {
        self.check(o)?;
        let f = &self.ring.field;
        let mut acc: HashMap<Vec<u32>, u32> = HashMap::new();
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &o.terms {
                let e: Vec<u32> = ma.0.iter().zip(&mb.0).map(|(a, b)| a + b).collect();
                let v = acc.entry(e).or_insert(0);
                *v = f.add(*v, f.mul(ca, cb));
            }
        }
        Ok(MPoly {
            ring: self.ring.clone(),
            terms: acc.into_iter().filter(|(_, c)| *c != 0).map(|(e, c)| (Monomial(e), c)).collect(),
        })
    }

    pub fn pow(&self, mut e: u32) -> MPoly {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ring);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.try_mul(&base).expect("same ring");
            }
            e >>= 1;
            if e > 0 {
                base = base.try_mul(&base).expect("same ring");
            }
        }
        acc
    }

    /// `f^(q^k)`: coefficients through Frobenius, exponents times `q^k`.
    pub fn frobenius(&self, k: u32) -> MPoly {
        let f = &self.ring.field;
        let scale = (f.q() as u64).pow(k) as u32;
        MPoly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, &c)| (Monomial(m.0.iter().map(|e| e * scale).collect()), f.frobenius(c, k)))
                .collect(),
        }
    }

    /// Replaces `x_i` by `Σ_j g_ij x_j`, i.e. `f(x) ↦ f(g·x)`. This is a
    /// right action: `(f|g)|h = f|(g·h)`.
    pub fn substitute_linear(&self, g: &MatrixFq) -> Result<MPoly> {
        let r = self.ring.nvars();
        if g.nrows() != r || g.ncols() != r {
            return Err(Error::DimensionMismatch(format!("substitution matrix must be {r}x{r}")));
        }
        if **g.field() != *self.ring.field {
            return Err(Error::FieldMismatch);
        }
        if !g.is_invertible() {
            return Err(Error::SingularMatrix);
        }
        let images: Vec<MPoly> = (0..r).map(|i| MPoly::linear_form(&self.ring, g.row(i))).collect();
        self.substitute(&images)
    }

    /// Replaces each variable `x_i` by `images[i]` (a polynomial in any ring
    /// over the same field).
    pub fn substitute(&self, images: &[MPoly]) -> Result<MPoly> {
        if images.len() != self.ring.nvars() {
            return Err(Error::DimensionMismatch("one image per variable".into()));
        }
        let target = images
            .first()
            .map(|p| p.ring.clone())
            .unwrap_or_else(|| self.ring.clone());
        let mut powers: HashMap<(usize, u32), MPoly> = HashMap::new();
        let mut out = MPoly::zero(&target);
        for (m, &c) in &self.terms {
            let mut term = MPoly::constant(&target, c);
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = powers.entry((i, e)).or_insert_with(|| images[i].pow(e));
                term = term.try_mul(p)?;
            }
            out = out.try_add(&term)?;
        }
        Ok(out)
    }

    /// Moves the polynomial into another ring with the same variable count.
    pub fn with_ring(&self, ring: &Arc<PolyRing>) -> Result<MPoly> {
        if ring.nvars() != self.ring.nvars() || *ring.field != *self.ring.field {
            return Err(Error::DimensionMismatch("incompatible ring".into()));
        }
        Ok(MPoly { ring: ring.clone(), terms: self.terms.clone() })
    }

    pub fn coeff_element(&self, exps: &[u32]) -> FieldElement {
        self.ring.field.elem(self.coeff(exps))
    }
}

/// Dimension of the `F_q`-span of `polys`.
pub fn span_dim(polys: &[MPoly]) -> Result<usize> {
    let Some(first) = polys.first() else {
        return Ok(0);
    };
    for p in polys {
        first.check(p)?;
    }
    let mut cols: HashMap<&Vec<u32>, usize> = HashMap::new();
    for p in polys {
        for (e, _) in p.terms() {
            let n = cols.len();
            cols.entry(e).or_insert(n);
        }
    }
    let field = first.field();
    let mut ech = Echelon::new(cols.len());
    for p in polys {
        let mut row = vec![0; cols.len()];
        for (e, c) in p.terms() {
            row[cols[e]] = c;
        }
        ech.insert(field, row);
    }
    Ok(ech.rank())
}

fn fmt_coeff(field: &FieldDesc, c: u32) -> String {
    let s = field.format_value(c);
    if s.contains('+') {
        format!("({s})")
    } else {
        s
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let field = &self.ring.field;
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(m, &c)| {
                let vars: Vec<String> = m
                    .0
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| {
                        let n = &self.ring.names[i];
                        if e == 1 {
                            n.clone()
                        } else {
                            format!("{n}^{e}")
                        }
                    })
                    .collect();
                match (vars.is_empty(), c == 1) {
                    (true, _) => fmt_coeff(field, c),
                    (false, true) => vars.join("*"),
                    (false, false) => format!("{}*{}", fmt_coeff(field, c), vars.join("*")),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ring(q: u64, r: usize) -> Arc<PolyRing> {
        PolyRing::standard(&FieldDesc::with_order(q).unwrap(), r)
    }

    fn x(r: &Arc<PolyRing>, i: usize) -> MPoly {
        MPoly::var(r, i)
    }

    #[test]
    fn square_in_char_two() {
        let r = ring(2, 2);
        let s = x(&r, 0).try_add(&x(&r, 1)).unwrap();
        assert_eq!(s.pow(2).to_string(), "x^2 + y^2");
        assert_eq!(s.try_mul(&MPoly::one(&r)).unwrap(), s);
    }

    #[test]
    fn cross_terms_cancel_mod_three() {
        let r = ring(3, 2);
        let a = x(&r, 0).try_add(&x(&r, 1)).unwrap();
        let b = x(&r, 0).try_add(&x(&r, 1).scale(2)).unwrap();
        assert_eq!(a.try_mul(&b).unwrap().to_string(), "x^2 + 2*y^2");
    }

    #[test]
    fn mismatched_rings() {
        let a = MPoly::one(&ring(2, 2));
        let b = MPoly::one(&ring(2, 3));
        assert!(matches!(a.try_add(&b), Err(Error::DimensionMismatch(_))));
        let c = MPoly::one(&ring(3, 2));
        assert_eq!(a.try_mul(&c).unwrap_err(), Error::FieldMismatch);
    }

    #[test]
    fn swap_substitution() {
        let r = ring(5, 2);
        let f = MPoly::monomial(&r, vec![2, 1], 1);
        let swap = MatrixFq::from_ints(r.field(), 2, 2, &[0, 1, 1, 0]).unwrap();
        assert_eq!(f.substitute_linear(&swap).unwrap(), MPoly::monomial(&r, vec![1, 2], 1));
        let id = MatrixFq::identity(r.field(), 2);
        assert_eq!(f.substitute_linear(&id).unwrap(), f);
        let sing = MatrixFq::from_ints(r.field(), 2, 2, &[1, 1, 1, 1]).unwrap();
        assert_eq!(f.substitute_linear(&sing).unwrap_err(), Error::SingularMatrix);
    }

    fn random_poly(r: &Arc<PolyRing>, rng: &mut ChaCha8Rng, terms: usize, deg: u32) -> MPoly {
        let q = r.field().size();
        MPoly::from_terms(
            r,
            (0..terms).map(|_| {
                let e: Vec<u32> = (0..r.nvars()).map(|_| rng.gen_range(0..=deg)).collect();
                (e, rng.gen_range(0..q))
            }),
        )
    }

    fn random_invertible(f: &Arc<FieldDesc>, n: usize, rng: &mut ChaCha8Rng) -> MatrixFq {
        loop {
            let v: Vec<u32> = (0..n * n).map(|_| rng.gen_range(0..f.size())).collect();
            let m = MatrixFq::from_values(f, n, n, v).unwrap();
            if m.is_invertible() {
                return m;
            }
        }
    }

    #[test]
    fn substitution_is_a_right_action() {
        let r = ring(3, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let f = random_poly(&r, &mut rng, 4, 2);
            let g = random_invertible(r.field(), 3, &mut rng);
            let h = random_invertible(r.field(), 3, &mut rng);
            let lhs = f.substitute_linear(&g).unwrap().substitute_linear(&h).unwrap();
            let rhs = f.substitute_linear(&g.try_mul(&h).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
            assert_eq!(lhs.degree(), f.degree());
        }
    }

    #[test]
    fn frobenius_matches_power() {
        let r = ring(4, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let f = random_poly(&r, &mut rng, 3, 2);
            assert_eq!(f.frobenius(1), f.pow(4));
        }
    }

    #[test]
    fn span_dimensions() {
        let r = ring(2, 2);
        let polys = vec![x(&r, 0), x(&r, 1), x(&r, 0).try_add(&x(&r, 1)).unwrap()];
        assert_eq!(span_dim(&polys).unwrap(), 2);
        assert_eq!(span_dim(&[]).unwrap(), 0);
    }

    #[test]
    fn canonical_text() {
        let r = ring(4, 2);
        let w = 2;
        let p = MPoly::from_terms(&r, [(vec![0, 1], 3), (vec![2, 0], w), (vec![0, 0], 1)]);
        assert_eq!(p.to_string(), "w*x^2 + (w+1)*y + 1");
    }
}
