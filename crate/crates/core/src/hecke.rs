//! Spherical Hecke combinatorics for `GL_r` over `F_q[[t]]`, computed in
//! the truncations `O_N = F_q[t]/(t^N)`.
//!
//! Double cosets `K·diag(t^a)·K` with `K = GL_r(O)` are labelled by their
//! elementary-divisor type `a`. Two independent computations of the product
//! `T_b ∘ T_a` are provided: [`convolve`] counts products of left-coset
//! representatives, and [`hco_expand`] enumerates the double quotient
//! `(K ∩ g'Kg'⁻¹)\g'Kg/(g⁻¹Kg ∩ K)` inside the finite group `GL_r(O_E)`
//! and weights each class by a subgroup index.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::field::FieldDesc;

/// Largest `q^N` for which tables are built.
pub const MAX_RING_SIZE: u64 = 2048;

/// `F_q[t]/(t^N)`. Elements are indices `Σ d_i q^i` where `d_i` is the raw
/// field value of the coefficient of `t^i`.
pub struct LocalRing {
    field: Arc<FieldDesc>,
    q: u32,
    n: u32,
    size: u32,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
}

impl fmt::Debug for LocalRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}[t]/(t^{})", self.q, self.n)
    }
}

impl LocalRing {
    pub fn new(q: u64, n: u32) -> Result<LocalRing> {
        if n == 0 {
            return Err(Error::Invalid("truncation level must be positive".into()));
        }
        let field = FieldDesc::with_order(q)?;
        let size = q.checked_pow(n).filter(|&s| s <= MAX_RING_SIZE).ok_or_else(|| {
            Error::PrecisionInsufficient(format!("O_{n} over F_{q} exceeds {MAX_RING_SIZE} elements"))
        })?;
        let q = q as u32;
        let size = size as u32;
        let digits: Vec<Vec<u32>> = (0..size)
            .map(|x| (0..n).map(|i| x / q.pow(i) % q).collect())
            .collect();
        let encode = |d: &[u32]| -> u16 { d.iter().rev().fold(0u32, |acc, &c| acc * q + c) as u16 };
        let s = size as usize;
        let mut add = vec![0u16; s * s];
        let mut mul = vec![0u16; s * s];
        let mut neg = vec![0u16; s];
        for x in 0..s {
            let dx = &digits[x];
            neg[x] = encode(&dx.iter().map(|&c| field.neg(c)).collect::<Vec<_>>());
            for y in 0..s {
                let dy = &digits[y];
                let sum: Vec<u32> = dx.iter().zip(dy).map(|(&a, &b)| field.add(a, b)).collect();
                add[x * s + y] = encode(&sum);
                let mut prod = vec![0u32; n as usize];
                for (i, &a) in dx.iter().enumerate() {
                    if a == 0 {
                        continue;
                    }
                    for (j, &b) in dy.iter().enumerate().take(n as usize - i) {
                        prod[i + j] = field.add(prod[i + j], field.mul(a, b));
                    }
                }
                mul[x * s + y] = encode(&prod);
            }
        }
        Ok(LocalRing { field, q, n, size, add, mul, neg })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn precision(&self) -> u32 {
        self.n
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn field(&self) -> &Arc<FieldDesc> {
        &self.field
    }

    #[inline]
    pub fn add(&self, a: u16, b: u16) -> u16 {
        self.add[a as usize * self.size as usize + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        self.mul[a as usize * self.size as usize + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u16) -> u16 {
        self.neg[a as usize]
    }

    pub fn sub(&self, a: u16, b: u16) -> u16 {
        self.add(a, self.neg(b))
    }

    /// `t^k` (zero once `k ≥ N`).
    pub fn t_pow(&self, k: u32) -> u16 {
        if k >= self.n {
            0
        } else {
            self.q.pow(k) as u16
        }
    }

    /// `t`-adic valuation; `N` for zero.
    pub fn valuation(&self, a: u16) -> u32 {
        let mut a = a as u32;
        if a == 0 {
            return self.n;
        }
        let mut v = 0;
        while a.is_multiple_of(self.q) {
            a /= self.q;
            v += 1;
        }
        v
    }

    pub fn is_unit(&self, a: u16) -> bool {
        !(a as u32).is_multiple_of(self.q)
    }

    pub fn inv(&self, a: u16) -> Option<u16> {
        if !self.is_unit(a) {
            return None;
        }
        (1..self.size as u16).find(|&b| self.mul(a, b) == 1)
    }

    /// `⌊a / t^k⌋`: drops the `k` lowest digits.
    pub fn shr(&self, a: u16, k: u32) -> u16 {
        if k >= self.n {
            0
        } else {
            (a as u32 / self.q.pow(k)) as u16
        }
    }

    /// Reduction modulo `t^k`.
    pub fn truncate(&self, a: u16, k: u32) -> u16 {
        if k >= self.n {
            a
        } else {
            (a as u32 % self.q.pow(k)) as u16
        }
    }
}

/// A square matrix over some [`LocalRing`], row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalMatrix {
    r: usize,
    data: Vec<u16>,
}

impl LocalMatrix {
    pub fn new(r: usize, data: Vec<u16>) -> Result<Self> {
        if data.len() != r * r {
            return Err(Error::DimensionMismatch(format!("expected {} entries", r * r)));
        }
        Ok(LocalMatrix { r, data })
    }

    pub fn identity(r: usize) -> Self {
        Self::diagonal_raw(&vec![1; r])
    }

    fn diagonal_raw(d: &[u16]) -> Self {
        let r = d.len();
        let mut data = vec![0; r * r];
        for (i, &x) in d.iter().enumerate() {
            data[i * r + i] = x;
        }
        LocalMatrix { r, data }
    }

    /// `diag(t^{a_1}, …, t^{a_r})`.
    pub fn diag_t(ring: &LocalRing, a: &[u32]) -> Self {
        Self::diagonal_raw(&a.iter().map(|&e| ring.t_pow(e)).collect::<Vec<_>>())
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn get(&self, i: usize, j: usize) -> u16 {
        self.data[i * self.r + j]
    }

    fn set(&mut self, i: usize, j: usize, v: u16) {
        self.data[i * self.r + j] = v;
    }

    pub fn entries(&self) -> &[u16] {
        &self.data
    }

    pub fn mul(&self, ring: &LocalRing, o: &Self) -> Self {
        let r = self.r;
        let mut data = vec![0u16; r * r];
        for i in 0..r {
            for k in 0..r {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..r {
                    let idx = i * r + j;
                    data[idx] = ring.add(data[idx], ring.mul(a, o.get(k, j)));
                }
            }
        }
        LocalMatrix { r, data }
    }

    pub fn is_zero_mod(&self, ring: &LocalRing, k: u32) -> bool {
        self.data.iter().all(|&x| ring.valuation(x) >= k)
    }

    fn minor(&self, row: usize, col: usize) -> Self {
        let r = self.r;
        let data = (0..r)
            .filter(|&i| i != row)
            .flat_map(|i| (0..r).filter(move |&j| j != col).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect();
        LocalMatrix { r: r - 1, data }
    }

    pub fn det(&self, ring: &LocalRing) -> u16 {
        match self.r {
            0 => 1,
            1 => self.data[0],
            2 => ring.sub(ring.mul(self.data[0], self.data[3]), ring.mul(self.data[1], self.data[2])),
            r => {
                let mut acc = 0;
                for j in 0..r {
                    let term = ring.mul(self.get(0, j), self.minor(0, j).det(ring));
                    acc = if j % 2 == 0 { ring.add(acc, term) } else { ring.sub(acc, term) };
                }
                acc
            }
        }
    }

    /// Adjugate: `M·adj(M) = det(M)·1`.
    pub fn adjugate(&self, ring: &LocalRing) -> Self {
        let r = self.r;
        if r == 1 {
            return LocalMatrix { r, data: vec![1] };
        }
        let mut data = vec![0u16; r * r];
        for i in 0..r {
            for j in 0..r {
                let c = self.minor(i, j).det(ring);
                data[j * r + i] = if (i + j) % 2 == 0 { c } else { ring.neg(c) };
            }
        }
        LocalMatrix { r, data }
    }

    /// Re-reads the same digit strings in another ring (lift or truncation).
    pub fn reinterpret(&self, to: &LocalRing) -> Self {
        LocalMatrix { r: self.r, data: self.data.iter().map(|&x| to.truncate(x, to.n)).map(|x| x % to.size as u16).collect() }
    }

    fn key(&self, size: u64) -> usize {
        self.data.iter().fold(0u64, |acc, &x| acc * size + x as u64) as usize
    }
}

/// Sorted elementary-divisor exponents `a_1 ≤ … ≤ a_r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DivisorType(Vec<u32>);

impl DivisorType {
    /// Sorts the exponents; rejects the empty tuple.
    pub fn new(mut a: Vec<u32>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::Invalid("divisor type needs at least one entry".into()));
        }
        a.sort_unstable();
        Ok(DivisorType(a))
    }

    pub fn zero(r: usize) -> Self {
        DivisorType(vec![0; r])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn max(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// All types of rank `r` with total at most `bound`.
    pub fn all_up_to(r: usize, bound: u32) -> Vec<DivisorType> {
        fn rec(r: usize, min: u32, left: u32, cur: &mut Vec<u32>, out: &mut Vec<DivisorType>) {
            if cur.len() == r {
                out.push(DivisorType(cur.clone()));
                return;
            }
            let slots = (r - cur.len()) as u32;
            let mut e = min;
            while e * slots <= left {
                cur.push(e);
                rec(r, e, left - e, cur, out);
                cur.pop();
                e += 1;
            }
        }
        let mut out = Vec::new();
        rec(r, 0, bound, &mut Vec::new(), &mut out);
        out.sort();
        out
    }
}

impl fmt::Display for DivisorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A formal sum of double cosets with positive multiplicities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HeckeElement(BTreeMap<DivisorType, u64>);

impl HeckeElement {
    pub fn terms(&self) -> impl Iterator<Item = (&DivisorType, u64)> {
        self.0.iter().map(|(k, &v)| (k, v))
    }

    pub fn get(&self, t: &DivisorType) -> u64 {
        self.0.get(t).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn add(&mut self, t: DivisorType, m: u64) {
        if m > 0 {
            *self.0.entry(t).or_default() += m;
        }
    }
}

impl FromIterator<(DivisorType, u64)> for HeckeElement {
    fn from_iter<I: IntoIterator<Item = (DivisorType, u64)>>(iter: I) -> Self {
        let mut h = HeckeElement::default();
        for (t, m) in iter {
            h.add(t, m);
        }
        h
    }
}

impl fmt::Display for HeckeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(t, m)| format!("{t}: {m}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Elementary divisors by Smith reduction at minimal-valuation pivots.
pub fn smith_type(ring: &LocalRing, m: &LocalMatrix) -> Result<DivisorType> {
    let r = m.r;
    let mut a = m.clone();
    let mut exps = Vec::with_capacity(r);
    for s in 0..r {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in s..r {
            for j in s..r {
                let v = ring.valuation(a.get(i, j));
                if best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, i, j));
                }
            }
        }
        let (v, pi, pj) = best.expect("non-empty block");
        if v >= ring.n {
            return Err(Error::BadDeterminant);
        }
        for j in 0..r {
            let (x, y) = (a.get(s, j), a.get(pi, j));
            a.set(s, j, y);
            a.set(pi, j, x);
        }
        for i in 0..r {
            let (x, y) = (a.get(i, s), a.get(i, pj));
            a.set(i, s, y);
            a.set(i, pj, x);
        }
        let unit = ring.shr(a.get(s, s), v);
        let uinv = ring.inv(unit).ok_or_else(|| Error::Consistency("pivot is not a unit".into()))?;
        for i in s + 1..r {
            let f = ring.mul(ring.shr(a.get(i, s), v), uinv);
            for j in s..r {
                let x = ring.sub(a.get(i, j), ring.mul(f, a.get(s, j)));
                a.set(i, j, x);
            }
        }
        for j in s + 1..r {
            let f = ring.mul(ring.shr(a.get(s, j), v), uinv);
            for i in s..r {
                let x = ring.sub(a.get(i, j), ring.mul(f, a.get(i, s)));
                a.set(i, j, x);
            }
        }
        exps.push(v);
    }
    let total: u32 = exps.iter().sum();
    if total >= ring.n {
        return Err(Error::PrecisionInsufficient(format!(
            "determinant valuation {total} not below precision {}",
            ring.n
        )));
    }
    DivisorType::new(exps)
}

/// Upper-triangular Hermite forms `h` with `h·K ⊂ K·diag(t^a)·K`: diagonal
/// `t^{b_i}`, entry `(i, j)` reduced modulo `t^{b_i}`.
pub fn left_cosets(ring: &LocalRing, a: &DivisorType) -> Result<Vec<LocalMatrix>> {
    let r = a.rank();
    let total = a.total();
    if total >= ring.n {
        return Err(Error::PrecisionInsufficient(format!(
            "type {a} needs precision above {total}, have {}",
            ring.n
        )));
    }
    let top = a.max();
    let mut out = Vec::new();
    let mut b = vec![0u32; r];
    loop {
        if b.iter().sum::<u32>() == total {
            hermite_forms(ring, &b, |h| {
                if smith_type(ring, &h)? == *a {
                    out.push(h);
                }
                Ok(())
            })?;
        }
        // next b in [0, top]^r
        let mut i = 0;
        while i < r && b[i] == top {
            b[i] = 0;
            i += 1;
        }
        if i == r {
            break;
        }
        b[i] += 1;
    }
    out.sort();
    Ok(out)
}

fn hermite_forms(ring: &LocalRing, b: &[u32], mut f: impl FnMut(LocalMatrix) -> Result<()>) -> Result<()> {
    let r = b.len();
    let slots: Vec<(usize, usize)> = (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).collect();
    let radices: Vec<u32> = slots.iter().map(|&(i, _)| ring.q.pow(b[i])).collect();
    let count: u64 = radices.iter().map(|&x| x as u64).product();
    let base = LocalMatrix::diag_t(ring, b);
    for mut idx in 0..count {
        let mut h = base.clone();
        for (&(i, j), &rad) in slots.iter().zip(&radices) {
            h.set(i, j, (idx % rad as u64) as u16);
            idx /= rad as u64;
        }
        f(h)?;
    }
    Ok(())
}

/// Column Hermite form of an upper-triangular matrix whose diagonal
/// entries are exact powers of `t`.
fn hermite_upper(ring: &LocalRing, m: &LocalMatrix) -> Result<LocalMatrix> {
    let r = m.r;
    let mut h = m.clone();
    let mut d = Vec::with_capacity(r);
    for i in 0..r {
        let v = ring.valuation(h.get(i, i));
        if v >= ring.n || h.get(i, i) != ring.t_pow(v) {
            return Err(Error::Consistency("diagonal is not a power of t".into()));
        }
        for j in 0..i {
            if h.get(i, j) != 0 {
                return Err(Error::Consistency("matrix is not upper triangular".into()));
            }
        }
        d.push(v);
    }
    for j in 1..r {
        for i in (0..j).rev() {
            let c = ring.shr(h.get(i, j), d[i]);
            if c == 0 {
                continue;
            }
            for k in 0..=i {
                let x = ring.sub(h.get(k, j), ring.mul(c, h.get(k, i)));
                h.set(k, j, x);
            }
        }
    }
    Ok(h)
}

/// Brute-force product `T_a · T_b` at precision `n`: multiplicity of `c`
/// is the number of pairs `(x, y)` of coset representatives with
/// `x·y·K = diag(t^c)·K`.
pub fn convolve_at(q: u64, a: &DivisorType, b: &DivisorType, n: u32) -> Result<HeckeElement> {
    if a.rank() != b.rank() {
        return Err(Error::DimensionMismatch("types of different rank".into()));
    }
    if n <= a.total() + b.total() {
        return Err(Error::PrecisionInsufficient(format!("need precision above {}", a.total() + b.total())));
    }
    let ring = LocalRing::new(q, n)?;
    let xs = left_cosets(&ring, a)?;
    let ys = left_cosets(&ring, b)?;
    let mut hits: BTreeMap<DivisorType, u64> = BTreeMap::new();
    let mut seen: BTreeSet<DivisorType> = BTreeSet::new();
    for x in &xs {
        for y in &ys {
            let z = x.mul(&ring, y);
            let c = smith_type(&ring, &z)?;
            let h = hermite_upper(&ring, &z)?;
            if h == LocalMatrix::diag_t(&ring, c.exponents()) {
                *hits.entry(c.clone()).or_default() += 1;
            }
            seen.insert(c);
        }
    }
    if seen.iter().any(|c| !hits.contains_key(c)) {
        return Err(Error::Consistency("a double coset was hit without its diagonal coset".into()));
    }
    Ok(hits.into_iter().collect())
}

/// [`convolve_at`] at the default precision `Σa + Σb + 1`.
pub fn convolve(q: u64, a: &DivisorType, b: &DivisorType) -> Result<HeckeElement> {
    convolve_at(q, a, b, a.total() + b.total() + 1)
}

/// Number of left cosets in `K·diag(t^a)·K`.
pub fn coset_count(q: u64, a: &DivisorType) -> Result<u64> {
    let ring = LocalRing::new(q, a.total() + 1)?;
    Ok(left_cosets(&ring, a)?.len() as u64)
}

/// `Σ m_c · #cosets(c)`.
pub fn mass(q: u64, h: &HeckeElement) -> Result<u64> {
    h.terms().map(|(t, m)| Ok(m * coset_count(q, t)?)).sum()
}

/// `GL_r(O_E)` for small `r`, with a dense index over all matrices.
struct FiniteGl<'a> {
    ring: &'a LocalRing,
    elems: Vec<LocalMatrix>,
    index: Vec<u32>,
}

impl<'a> FiniteGl<'a> {
    fn new(ring: &'a LocalRing, r: usize, caps: &Caps) -> Result<Self> {
        let size = ring.size as u64;
        let total = size
            .checked_pow((r * r) as u32)
            .filter(|&t| t <= caps.group as u64)
            .ok_or(Error::CapExceeded { what: "group", limit: caps.group })?;
        let mut elems = Vec::new();
        let mut index = vec![u32::MAX; total as usize];
        for key in 0..total {
            let mut rest = key;
            let mut data = vec![0u16; r * r];
            for slot in data.iter_mut().rev() {
                *slot = (rest % size) as u16;
                rest /= size;
            }
            let m = LocalMatrix { r, data };
            if ring.is_unit(m.det(ring)) {
                index[key as usize] = elems.len() as u32;
                elems.push(m);
            }
        }
        Ok(FiniteGl { ring, elems, index })
    }

    fn idx(&self, m: &LocalMatrix) -> usize {
        self.index[m.key(self.ring.size as u64)] as usize
    }

    /// Generators of the subgroup `{k : pred(k)}`, chosen greedily.
    fn subgroup_generators(&self, members: &[usize]) -> Vec<usize> {
        let mut gens: Vec<usize> = Vec::new();
        let mut inside = vec![false; self.elems.len()];
        let id = self.idx(&LocalMatrix::identity(self.elems[0].r));
        inside[id] = true;
        for &h in members {
            if inside[h] {
                continue;
            }
            gens.push(h);
            // Recompute the closure from scratch with the enlarged set.
            inside.iter_mut().for_each(|x| *x = false);
            inside[id] = true;
            let mut queue = VecDeque::from([id]);
            while let Some(x) = queue.pop_front() {
                for &g in &gens {
                    let y = self.idx(&self.elems[x].mul(self.ring, &self.elems[g]));
                    if !inside[y] {
                        inside[y] = true;
                        queue.push_back(y);
                    }
                }
            }
        }
        gens
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        parent[x as usize] = parent[parent[x as usize] as usize];
        x = parent[x as usize];
    }
    x
}

/// One class of the double quotient and its index coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HcoTerm {
    pub label: DivisorType,
    pub index: u64,
    /// `|K ∩ g''⁻¹Kg''|` in `GL_r(O_E)`, which the index divides.
    pub stabilizer: u64,
}

/// Enumerates `(K∩g'Kg'⁻¹)\g'Kg/(g⁻¹Kg∩K)` for `g = diag(t^a)`,
/// `g' = diag(t^b)` and sums `[K∩g''⁻¹Kg'' : K∩g⁻¹Kg∩g''⁻¹Kg'']·T_{g''}`.
pub fn hco_terms(q: u64, a: &DivisorType, b: &DivisorType, caps: &Caps) -> Result<Vec<HcoTerm>> {
    let r = a.rank();
    if b.rank() != r {
        return Err(Error::DimensionMismatch("types of different rank".into()));
    }
    let (sa, sb) = (a.total(), b.total());
    let e = (sa + sb).max(1);
    let lo = LocalRing::new(q, e)?;
    let hi = LocalRing::new(q, e + 1)?;
    let group = FiniteGl::new(&lo, r, caps)?;
    let g = LocalMatrix::diag_t(&lo, a.exponents());
    let gp = LocalMatrix::diag_t(&lo, b.exponents());
    let (adj_g, adj_gp) = (g.adjugate(&lo), gp.adjugate(&lo));
    let left: Vec<usize> = (0..group.elems.len())
        .filter(|&i| gp.mul(&lo, &group.elems[i]).mul(&lo, &adj_gp).is_zero_mod(&lo, sb))
        .collect();
    let right: Vec<usize> = (0..group.elems.len())
        .filter(|&i| adj_g.mul(&lo, &group.elems[i]).mul(&lo, &g).is_zero_mod(&lo, sa))
        .collect();
    let left_gens = group.subgroup_generators(&left);
    let right_gens = group.subgroup_generators(&right);

    let n = group.elems.len();
    let mut parent: Vec<u32> = (0..n as u32).collect();
    for i in 0..n {
        let x = &group.elems[i];
        for &h in &left_gens {
            let j = group.idx(&group.elems[h].mul(&lo, x));
            let (ri, rj) = (find(&mut parent, i as u32), find(&mut parent, j as u32));
            if ri != rj {
                parent[ri.max(rj) as usize] = ri.min(rj);
            }
        }
        for &h in &right_gens {
            let j = group.idx(&x.mul(&lo, &group.elems[h]));
            let (ri, rj) = (find(&mut parent, i as u32), find(&mut parent, j as u32));
            if ri != rj {
                parent[ri.max(rj) as usize] = ri.min(rj);
            }
        }
    }
    let mut roots: Vec<u32> = (0..n as u32).filter(|&i| find(&mut parent, i) == i).collect();
    roots.sort_unstable();

    let g_hi = LocalMatrix::diag_t(&hi, a.exponents());
    let gp_hi = LocalMatrix::diag_t(&hi, b.exponents());
    let mut terms = Vec::with_capacity(roots.len());
    for root in roots {
        let k = group.elems[root as usize].reinterpret(&hi);
        let g2_hi = gp_hi.mul(&hi, &k).mul(&hi, &g_hi);
        let label = smith_type(&hi, &g2_hi)?;
        let g2 = g2_hi.reinterpret(&lo);
        let adj_g2 = g2.adjugate(&lo);
        let mut big = 0u64;
        let mut small = 0u64;
        for x in &group.elems {
            if g2.mul(&lo, x).mul(&lo, &adj_g2).is_zero_mod(&lo, sa + sb) {
                big += 1;
                if g.mul(&lo, x).mul(&lo, &adj_g).is_zero_mod(&lo, sa) {
                    small += 1;
                }
            }
        }
        if small == 0 || !big.is_multiple_of(small) {
            return Err(Error::Consistency("subgroup index is not an integer".into()));
        }
        terms.push(HcoTerm { label, index: big / small, stabilizer: big });
    }
    Ok(terms)
}

/// The double-quotient expansion of `T_b ∘ T_a` as a Hecke element.
pub fn hco_expand(q: u64, a: &DivisorType, b: &DivisorType, caps: &Caps) -> Result<HeckeElement> {
    Ok(hco_terms(q, a, b, caps)?.into_iter().map(|t| (t.label, t.index)).collect())
}

/// `[K : K ∩ gKg⁻¹]` for `g = diag(t^a)`, counted in `GL_r(O_E)`.
pub fn index_count(q: u64, a: &DivisorType, caps: &Caps) -> Result<u64> {
    let e = a.total().max(1);
    let ring = LocalRing::new(q, e)?;
    let group = FiniteGl::new(&ring, a.rank(), caps)?;
    let g = LocalMatrix::diag_t(&ring, a.exponents());
    let adj = g.adjugate(&ring);
    let sub = group
        .elems
        .iter()
        .filter(|k| adj.mul(&ring, k).mul(&ring, &g).is_zero_mod(&ring, a.total()))
        .count() as u64;
    Ok(group.elems.len() as u64 / sub)
}

/// Convenience map for tests and reports.
pub fn to_map(h: &HeckeElement) -> HashMap<Vec<u32>, u64> {
    h.terms().map(|(t, m)| (t.exponents().to_vec(), m)).collect()
}
