//! The graded ring `R_r ⊂ F_q(V_r)` generated in degree one by the
//! reciprocals `1/v` of non-zero linear forms, and the modular-form
//! computations built on it.
//!
//! Generators are indexed by projective lines: for each line we keep the
//! representative whose first non-zero coordinate is 1, and write
//! `1/(αv) = α⁻¹·(1/v)`. An element of degree `k` is a polynomial `f` in the
//! line generators `u_ℓ`; since `R_r` has many partial-fraction relations,
//! elements are compared through their numerators `f·D^e ∈ F_q[x_1..x_r]`
//! where `D = ∏_ℓ ℓ` and `e` bounds every exponent of `f`. Multiplication by
//! `D^e` is injective because the function field is a domain.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::field::FieldDesc;
use crate::group::{double_cosets, is_fine_image, right_coset_reps, SubgroupGens};
use crate::linalg::{left_kernel, Echelon, MatrixFq};
use crate::mpoly::{standard_names, MPoly, PolyRing};

/// Normalized line representatives of `F_q^r`, ordered colexicographically
/// (`x, y, x+y, x+2y, …`).
pub fn lines(field: &FieldDesc, r: usize) -> Vec<Vec<u32>> {
    let q = field.size() as u64;
    let total = q.pow(r as u32);
    let mut out: Vec<Vec<u32>> = (1..total)
        .map(|idx| (0..r as u32).map(|i| (idx / q.pow(i) % q) as u32).collect::<Vec<u32>>())
        .filter(|v| v.iter().find(|&&c| c != 0) == Some(&1))
        .collect();
    out.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    out
}

/// `Σ c_i·name_i` with unit coefficients suppressed.
fn linear_form_text(field: &FieldDesc, v: &[u32], names: &[String]) -> String {
    let mut parts = Vec::new();
    for (c, name) in v.iter().zip(names) {
        if *c == 0 {
            continue;
        }
        let coef = if *c == 1 {
            String::new()
        } else {
            let s = field.format_value(*c);
            if s.contains('+') {
                format!("({s})")
            } else {
                s
            }
        };
        parts.push(format!("{coef}{name}"));
    }
    parts.join("+")
}

/// Binomial coefficient as a polynomial in `n`: `n(n−1)…(n−k+1)/k!`, zero
/// for `k < 0`. In particular `binomial(−1, j) = (−1)^j`.
pub fn binomial(n: i64, k: i64) -> i128 {
    if k < 0 {
        return 0;
    }
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    acc
}

fn multichoose_count(n: usize, k: usize) -> Option<u128> {
    if n == 0 {
        return Some(u128::from(k == 0));
    }
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc.checked_mul(n as u128 + i)? / (i + 1);
    }
    Some(acc)
}

/// All exponent vectors of length `n` and total degree `k`.
fn compositions(n: usize, k: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, k: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() + 1 == n {
            cur.push(k);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in (0..=k).rev() {
            cur.push(e);
            rec(n, k - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if k == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(n, k, &mut Vec::new(), &mut out);
    out
}

/// Dense coordinates for homogeneous polynomials in `r` variables.
struct DenseSpace {
    r: usize,
    monos: Vec<Vec<Vec<u32>>>,
    /// `shift[d][i*r + v]`: index in degree `d+1` of monomial `i` times `x_v`.
    shift: Vec<Vec<u32>>,
}

impl DenseSpace {
    fn new(r: usize, dmax: usize) -> Self {
        let monos: Vec<Vec<Vec<u32>>> = (0..=dmax + 1).map(|d| compositions(r, d as u32)).collect();
        let mut shift = Vec::with_capacity(dmax + 1);
        for d in 0..=dmax {
            let index: HashMap<&Vec<u32>, u32> =
                monos[d + 1].iter().enumerate().map(|(i, m)| (m, i as u32)).collect();
            let mut table = Vec::with_capacity(monos[d].len() * r);
            for m in &monos[d] {
                for v in 0..r {
                    let mut n = m.clone();
                    n[v] += 1;
                    table.push(index[&n]);
                }
            }
            shift.push(table);
        }
        DenseSpace { r, monos, shift }
    }

    fn size(&self, d: usize) -> usize {
        self.monos[d].len()
    }

    fn mul_linear(&self, field: &FieldDesc, p: &[u32], d: usize, lin: &[u32]) -> Vec<u32> {
        let mut out = vec![0u32; self.size(d + 1)];
        let table = &self.shift[d];
        for (i, &c) in p.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (v, &a) in lin.iter().enumerate() {
                if a != 0 {
                    let j = table[i * self.r + v] as usize;
                    out[j] = field.add(out[j], field.mul(c, a));
                }
            }
        }
        out
    }

    fn to_mpoly(&self, ring: &Arc<PolyRing>, d: usize, p: &[u32]) -> MPoly {
        MPoly::from_terms(ring, self.monos[d].iter().zip(p).map(|(m, &c)| (m.clone(), c)))
    }
}

/// `R_r` over `F_q`: line generators, their linear forms, and the two
/// polynomial rings (in the generators and in the coordinates).
pub struct SatakeRing {
    field: Arc<FieldDesc>,
    r: usize,
    lines: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    uring: Arc<PolyRing>,
    sring: Arc<PolyRing>,
}

impl fmt::Debug for SatakeRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R_{} over F_{}", self.r, self.field.size())
    }
}

impl SatakeRing {
    pub fn new(field: &Arc<FieldDesc>, r: usize) -> Result<Arc<SatakeRing>> {
        if r == 0 {
            return Err(Error::Invalid("rank must be positive".into()));
        }
        if field.tower_degree() != 1 {
            return Err(Error::Invalid("R_r is defined over F_q itself".into()));
        }
        let lines = lines(field, r);
        let index = lines.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        let coords = standard_names(r);
        let names = lines
            .iter()
            .map(|v| {
                let text = linear_form_text(field, v, &coords);
                if text.chars().count() == 1 {
                    format!("u_{text}")
                } else {
                    format!("u_{{{text}}}")
                }
            })
            .collect();
        Ok(Arc::new(SatakeRing {
            field: field.clone(),
            r,
            lines,
            index,
            uring: PolyRing::new(field, names),
            sring: PolyRing::standard(field, r),
        }))
    }

    pub fn field(&self) -> &Arc<FieldDesc> {
        &self.field
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn q(&self) -> u32 {
        self.field.size()
    }

    /// Number `L = (q^r − 1)/(q − 1)` of line generators.
    pub fn num_lines(&self) -> usize {
        self.lines.len()
    }

    pub fn lines(&self) -> &[Vec<u32>] {
        &self.lines
    }

    pub fn generator_ring(&self) -> &Arc<PolyRing> {
        &self.uring
    }

    pub fn coordinate_ring(&self) -> &Arc<PolyRing> {
        &self.sring
    }

    /// `(α, ℓ)` with `v = α·lines[ℓ]`; `None` for `v = 0`.
    pub fn normalize(&self, v: &[u32]) -> Option<(u32, usize)> {
        let lead = v.iter().position(|&c| c != 0)?;
        let alpha = v[lead];
        let inv = self.field.inv(alpha)?;
        let rep: Vec<u32> = v.iter().map(|&c| self.field.mul(c, inv)).collect();
        self.index.get(&rep).map(|&i| (alpha, i))
    }

    pub fn line_index(&self, v: &[u32]) -> Option<usize> {
        self.index.get(v).copied()
    }

    /// The linear form of line `i` in the coordinate ring.
    pub fn linear_form(&self, i: usize) -> MPoly {
        MPoly::linear_form(&self.sring, &self.lines[i])
    }

    /// Degree-`k` monomials in the generators, or a cap error.
    pub fn monomials(&self, k: u32, caps: &Caps) -> Result<Vec<Vec<u32>>> {
        let count = multichoose_count(self.num_lines(), k as usize).ok_or(Error::Overflow)?;
        caps.check_monomials(usize::try_from(count).unwrap_or(usize::MAX))?;
        Ok(compositions(self.num_lines(), k))
    }

    fn engine(&self, k: u32, e: u32, caps: &Caps) -> Result<Numerators<'_>> {
        let lines = self.num_lines() as u64;
        let degree = (lines * e as u64)
            .checked_sub(k as u64)
            .ok_or_else(|| Error::Invalid("multiplier exponent too small".into()))?;
        let size = multichoose_count(self.r, degree as usize).ok_or(Error::Overflow)?;
        caps.check_monomials(usize::try_from(size).unwrap_or(usize::MAX))?;
        Ok(Numerators { ring: self, dense: DenseSpace::new(self.r, degree as usize), e, degree: degree as usize })
    }

    /// `f·D^k` for `f` of degree `k`, as a polynomial in the coordinates.
    pub fn clear_denominators(&self, f: &RElement) -> Result<MPoly> {
        self.numerator_with(f, f.degree, &Caps::default())
    }

    /// `f·D^e`; requires `e` to bound every exponent of `f`.
    pub fn numerator_with(&self, f: &RElement, e: u32, caps: &Caps) -> Result<MPoly> {
        let engine = self.engine(f.degree, e, caps)?;
        let dense = engine.sum(&f.poly)?;
        Ok(engine.dense.to_mpoly(&self.sring, engine.degree, &dense))
    }

    /// Equality in `R_r`.
    pub fn ring_eq(&self, f: &RElement, g: &RElement) -> Result<bool> {
        if f.degree != g.degree {
            return Ok(self.is_zero(f)? && self.is_zero(g)?);
        }
        if f.poly == g.poly {
            return Ok(true);
        }
        self.is_zero(&f.try_sub(g)?)
    }

    /// Whether `f = 0` in `R_r`.
    pub fn is_zero(&self, f: &RElement) -> Result<bool> {
        if f.is_free_zero() {
            return Ok(true);
        }
        let engine = self.engine(f.degree, f.max_exponent(), &Caps::default())?;
        Ok(engine.sum(&f.poly)?.iter().all(|&c| c == 0))
    }

    /// Dimension of the span of `elems` (all of one degree) in `R_r`.
    pub fn span_dim(&self, elems: &[RElement], caps: &Caps) -> Result<usize> {
        let Some(first) = elems.first() else { return Ok(0) };
        if elems.iter().any(|f| f.degree != first.degree) {
            return Err(Error::Invalid("elements of mixed degree".into()));
        }
        let e = elems.iter().map(RElement::max_exponent).max().unwrap_or(0);
        let engine = self.engine(first.degree, e, caps)?;
        let mut ech = Echelon::new(engine.dense.size(engine.degree));
        for f in elems {
            ech.insert(&self.field, engine.sum(&f.poly)?);
        }
        Ok(ech.rank())
    }

    /// Dimension of the degree-`k` piece.
    pub fn graded_dim(&self, k: u32, caps: &Caps) -> Result<usize> {
        Ok(self.graded_basis(k, caps)?.len())
    }

    /// Monomials of degree `k` whose images form a basis of the degree-`k`
    /// piece (greedy in enumeration order).
    pub fn graded_basis(&self, k: u32, caps: &Caps) -> Result<Vec<Vec<u32>>> {
        let monos = self.monomials(k, caps)?;
        let engine = self.engine(k, k, caps)?;
        let mut numerators: Vec<Option<Vec<u32>>> = vec![None; monos.len()];
        engine.for_each(&monos, |i, n| {
            numerators[i] = Some(n.to_vec());
            Ok(())
        })?;
        let mut ech = Echelon::new(engine.dense.size(engine.degree));
        let mut basis = Vec::new();
        for (m, n) in monos.into_iter().zip(numerators) {
            if ech.insert(&self.field, n.expect("visited")) {
                basis.push(m);
            }
        }
        Ok(basis)
    }

    /// For each line `ℓ`: `(ℓ', s)` with `u_ℓ | g = s·u_ℓ'`, from
    /// `ℓ·g = α·ℓ'` and `s = α⁻¹`.
    pub fn line_action(&self, g: &MatrixFq) -> Result<Vec<(usize, u32)>> {
        if g.nrows() != self.r || g.ncols() != self.r {
            return Err(Error::DimensionMismatch(format!("matrix must be {0}x{0}", self.r)));
        }
        if **g.field() != *self.field {
            return Err(Error::FieldMismatch);
        }
        if !g.is_invertible() {
            return Err(Error::SingularMatrix);
        }
        self.lines
            .iter()
            .map(|v| {
                let image = g.apply_row(v);
                let (alpha, idx) = self.normalize(&image).ok_or(Error::SingularMatrix)?;
                Ok((idx, self.field.inv(alpha).expect("non-zero")))
            })
            .collect()
    }

    /// `f|g`: each generator `1/v` goes to `1/(v·g)`. A right action,
    /// matching substitution `x ↦ g·x` in the coordinate ring.
    pub fn group_act(&self, f: &RElement, g: &MatrixFq) -> Result<RElement> {
        let action = self.line_action(g)?;
        Ok(f.permute(&action))
    }

    /// A basis of the `K̄`-invariants of degree `k`.
    pub fn invariant_basis(self: &Arc<Self>, kbar: &SubgroupGens, k: u32, caps: &Caps) -> Result<Vec<RElement>> {
        self.check_group(kbar)?;
        kbar.elements(caps)?;
        let basis = self.graded_basis(k, caps)?;
        let gens = kbar.generators();
        if gens.is_empty() {
            return Ok(basis.into_iter().map(|m| RElement::monomial(self, m, 1)).collect());
        }
        let engine = self.engine(k, k, caps)?;
        let width = engine.dense.size(engine.degree);
        let actions = gens.iter().map(|g| self.line_action(g)).collect::<Result<Vec<_>>>()?;
        let mut rows = Vec::with_capacity(basis.len());
        for m in &basis {
            let b = RElement::monomial(self, m.clone(), 1);
            let base = engine.sum(&b.poly)?;
            let mut row = Vec::with_capacity(width * gens.len());
            for action in &actions {
                let moved = engine.sum(&b.permute(action).poly)?;
                row.extend(moved.iter().zip(&base).map(|(&a, &c)| self.field.sub(a, c)));
            }
            rows.push(row);
        }
        let kernel = left_kernel(&self.field, &rows, width * gens.len());
        Ok(kernel
            .into_iter()
            .map(|coeffs| {
                let terms = basis.iter().cloned().zip(coeffs);
                RElement { ring: self.clone(), poly: MPoly::from_terms(&self.uring, terms), degree: k }
            })
            .collect())
    }

    pub fn invariant_dim(self: &Arc<Self>, kbar: &SubgroupGens, k: u32, caps: &Caps) -> Result<usize> {
        Ok(self.invariant_basis(kbar, k, caps)?.len())
    }

    fn check_group(&self, g: &SubgroupGens) -> Result<()> {
        if g.rank() != self.r {
            return Err(Error::DimensionMismatch("subgroup rank".into()));
        }
        if **g.field() != *self.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn is_invariant(&self, f: &RElement, kbar: &SubgroupGens) -> Result<bool> {
        for g in kbar.generators() {
            if !self.ring_eq(&self.group_act(f, g)?, f)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `Σ_h f|h` over representatives of `K̄'∖K̄`, for `f` fixed by `K̄'`.
    pub fn trace_invariants(
        &self,
        f: &RElement,
        sub: &SubgroupGens,
        sup: &SubgroupGens,
        caps: &Caps,
    ) -> Result<RElement> {
        self.check_group(sub)?;
        self.check_group(sup)?;
        let reps = right_coset_reps(sub, sup, caps)?;
        if !self.is_invariant(f, sub)? {
            return Err(Error::NotInvariant);
        }
        let mut acc = f.zero_like();
        for h in &reps {
            acc = acc.try_add(&self.group_act(f, h)?)?;
        }
        Ok(acc)
    }
}

/// Numerator evaluation for monomials of one degree with multiplier `D^e`.
struct Numerators<'a> {
    ring: &'a SatakeRing,
    dense: DenseSpace,
    e: u32,
    degree: usize,
}

impl Numerators<'_> {
    /// Calls `cb(i, N(monos[i]))` for every monomial, sharing partial
    /// products between monomials with a common prefix of exponents.
    fn for_each(&self, monos: &[Vec<u32>], mut cb: impl FnMut(usize, &[u32]) -> Result<()>) -> Result<()> {
        let lines = self.ring.num_lines();
        let field = &self.ring.field;
        for m in monos {
            if m.len() != lines || m.iter().any(|&x| x > self.e) {
                return Err(Error::Invalid("exponent exceeds the multiplier".into()));
            }
            if m.iter().sum::<u32>() as u64 + self.degree as u64 != lines as u64 * self.e as u64 {
                return Err(Error::Invalid("monomial of the wrong degree".into()));
            }
        }
        let mut order: Vec<usize> = (0..monos.len()).collect();
        order.sort_by(|&a, &b| monos[a].cmp(&monos[b]));
        let mut stack: Vec<Vec<u32>> = vec![Vec::new(); lines + 1];
        let mut degs = vec![0usize; lines + 1];
        stack[0] = vec![1];
        let mut prev: Option<&Vec<u32>> = None;
        for &i in &order {
            let m = &monos[i];
            let start = match prev {
                None => 0,
                Some(p) => p.iter().zip(m).position(|(a, b)| a != b).unwrap_or(lines),
            };
            for l in start..lines {
                let mut cur = stack[l].clone();
                let mut d = degs[l];
                for _ in 0..(self.e - m[l]) {
                    cur = self.dense.mul_linear(field, &cur, d, &self.ring.lines[l]);
                    d += 1;
                }
                stack[l + 1] = cur;
                degs[l + 1] = d;
            }
            cb(i, &stack[lines])?;
            prev = Some(m);
        }
        Ok(())
    }

    fn sum(&self, f: &MPoly) -> Result<Vec<u32>> {
        let field = &self.ring.field;
        let (monos, coeffs): (Vec<Vec<u32>>, Vec<u32>) = f.terms().map(|(m, c)| (m.clone(), c)).unzip();
        let mut total = vec![0u32; self.dense.size(self.degree)];
        self.for_each(&monos, |i, n| {
            let c = coeffs[i];
            for (t, &x) in total.iter_mut().zip(n) {
                if x != 0 {
                    *t = field.add(*t, field.mul(c, x));
                }
            }
            Ok(())
        })?;
        Ok(total)
    }
}

/// A homogeneous element of `R_r`, written in the line generators.
#[derive(Clone)]
pub struct RElement {
    ring: Arc<SatakeRing>,
    poly: MPoly,
    degree: u32,
}

impl RElement {
    pub fn new(ring: &Arc<SatakeRing>, poly: MPoly, degree: u32) -> Result<Self> {
        if poly.ring().nvars() != ring.num_lines() || **poly.field() != *ring.field {
            return Err(Error::FieldMismatch);
        }
        if poly.terms().any(|(m, _)| m.iter().sum::<u32>() != degree) {
            return Err(Error::Invalid("element is not homogeneous of the stated degree".into()));
        }
        let poly = poly.with_ring(&ring.uring)?;
        Ok(RElement { ring: ring.clone(), poly, degree })
    }

    pub fn zero(ring: &Arc<SatakeRing>, degree: u32) -> Self {
        RElement { ring: ring.clone(), poly: MPoly::zero(&ring.uring), degree }
    }

    pub fn one(ring: &Arc<SatakeRing>) -> Self {
        RElement { ring: ring.clone(), poly: MPoly::one(&ring.uring), degree: 0 }
    }

    /// `u_ℓ`.
    pub fn generator(ring: &Arc<SatakeRing>, line: usize) -> Self {
        RElement { ring: ring.clone(), poly: MPoly::var(&ring.uring, line), degree: 1 }
    }

    /// `1/v` for any non-zero `v`.
    pub fn reciprocal(ring: &Arc<SatakeRing>, v: &[u32]) -> Result<Self> {
        let (alpha, line) = ring.normalize(v).ok_or(Error::ZeroInverse)?;
        let s = ring.field.inv(alpha).expect("non-zero");
        Ok(Self::generator(ring, line).scale(s))
    }

    pub fn monomial(ring: &Arc<SatakeRing>, exps: Vec<u32>, c: u32) -> Self {
        let degree = exps.iter().sum();
        RElement { ring: ring.clone(), poly: MPoly::monomial(&ring.uring, exps, c), degree }
    }

    pub fn ring(&self) -> &Arc<SatakeRing> {
        &self.ring
    }

    pub fn poly(&self) -> &MPoly {
        &self.poly
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Zero as a polynomial in the generators (a sufficient, not
    /// necessary, condition for zero in `R_r`).
    pub fn is_free_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn max_exponent(&self) -> u32 {
        self.poly.terms().flat_map(|(m, _)| m.iter().copied()).max().unwrap_or(0)
    }

    pub fn zero_like(&self) -> Self {
        Self::zero(&self.ring, self.degree)
    }

    fn check(&self, o: &Self) -> Result<()> {
        if !Arc::ptr_eq(&self.ring, &o.ring) && (self.ring.r != o.ring.r || *self.ring.field != *o.ring.field) {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        if self.degree != o.degree {
            if self.is_free_zero() {
                return Ok(o.clone());
            }
            if o.is_free_zero() {
                return Ok(self.clone());
            }
            return Err(Error::Invalid("sum of elements of different degrees".into()));
        }
        Ok(RElement { ring: self.ring.clone(), poly: self.poly.try_add(&o.poly)?, degree: self.degree })
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.try_add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        RElement { ring: self.ring.clone(), poly: self.poly.neg(), degree: self.degree }
    }

    pub fn scale(&self, c: u32) -> Self {
        RElement { ring: self.ring.clone(), poly: self.poly.scale(c), degree: self.degree }
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(RElement {
            ring: self.ring.clone(),
            poly: self.poly.try_mul(&o.poly)?,
            degree: self.degree + o.degree,
        })
    }

    pub fn pow(&self, e: u32) -> Self {
        RElement { ring: self.ring.clone(), poly: self.poly.pow(e), degree: self.degree * e }
    }

    fn permute(&self, action: &[(usize, u32)]) -> Self {
        let field = &self.ring.field;
        let n = action.len();
        let terms = self.poly.terms().map(|(m, c)| {
            let mut exps = vec![0u32; n];
            let mut coeff = c;
            for (l, &e) in m.iter().enumerate() {
                if e > 0 {
                    let (target, s) = action[l];
                    exps[target] += e;
                    coeff = field.mul(coeff, field.pow(s, e as i64).expect("non-zero"));
                }
            }
            (exps, coeff)
        });
        RElement { ring: self.ring.clone(), poly: MPoly::from_terms(&self.ring.uring, terms), degree: self.degree }
    }
}

impl fmt::Display for RElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.poly)
    }
}

impl fmt::Debug for RElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (degree {})", self.poly, self.degree)
    }
}

/// `Σ_{i ∈ {0,1}^{r−1}} q^{Σ ν·i_ν}·binomial(k, Σ i_ν)`.
pub fn dim_formula(r: usize, q: u64, k: u64) -> Result<u64> {
    if r == 0 {
        return Err(Error::Invalid("rank must be positive".into()));
    }
    let mut total: u128 = 0;
    for mask in 0u64..(1u64 << (r - 1)) {
        let mut exp = 0u32;
        let mut ones = 0i64;
        for nu in 1..r {
            if mask >> (nu - 1) & 1 == 1 {
                exp += nu as u32;
                ones += 1;
            }
        }
        let power = (q as u128).checked_pow(exp).ok_or(Error::Overflow)?;
        let b = binomial(k as i64, ones);
        let term = power.checked_mul(b as u128).ok_or(Error::Overflow)?;
        total = total.checked_add(term).ok_or(Error::Overflow)?;
    }
    u64::try_from(total).map_err(|_| Error::Overflow)
}

/// Number of multisets of `weights` summing to `k`, i.e. the coefficient
/// of `s^k` in `∏ 1/(1 − s^w)`.
pub fn weighted_hilbert(weights: &[u64], k: u64) -> Result<u64> {
    if weights.is_empty() || weights.contains(&0) {
        return Err(Error::Invalid("weights must be non-empty and positive".into()));
    }
    let k = usize::try_from(k).map_err(|_| Error::Overflow)?;
    let mut ways = vec![0u64; k + 1];
    ways[0] = 1;
    for &w in weights {
        let w = w as usize;
        for n in w..=k {
            ways[n] = ways[n].checked_add(ways[n - w]).ok_or(Error::Overflow)?;
        }
    }
    Ok(ways[k])
}

/// Weights `q−1, q²−1, …, q^r−1` of the universal coefficients.
pub fn gl_weights(q: u64, r: usize) -> Vec<u64> {
    (1..=r as u32).map(|i| q.pow(i) - 1).collect()
}

/// Weights `q−1, …, q^{r−1}−1, (q^r−1)/(q−1)` for the determinant-one level.
pub fn sl_weights(q: u64, r: usize) -> Vec<u64> {
    let mut w: Vec<u64> = (1..r as u32).map(|i| q.pow(i) - 1).collect();
    w.push((q.pow(r as u32) - 1) / (q - 1));
    w
}

/// `Σ_{s=1}^r |K̄\GL_r(F_q)/J_s| / ∏_{i≤s}(q^i − 1) · binomial(k−1, s−1)`
/// for a unipotent `K̄`.
pub fn level_dim_formula(kbar: &SubgroupGens, k: u64, caps: &Caps) -> Result<u64> {
    if !is_fine_image(kbar, caps)? {
        return Err(Error::NotUnipotent);
    }
    let field = kbar.field();
    let r = kbar.rank();
    let q = field.size() as i128;
    let gl = SubgroupGens::general_linear(field, r);
    let mut total: i128 = 0;
    let mut denom: i128 = 1;
    for s in 1..=r {
        denom *= q.pow(s as u32) - 1;
        let j = SubgroupGens::first_columns_fixed(field, r, s);
        let n = double_cosets(kbar, &gl, &j, caps)?.count() as i128;
        if n % denom != 0 {
            return Err(Error::NonIntegralSummand { s });
        }
        total += n / denom * binomial(k as i64 - 1, s as i64 - 1);
    }
    u64::try_from(total).map_err(|_| Error::Consistency(format!("negative dimension {total}")))
}

/// Coefficients `c_1, …, c_r` of `X^{q^i}` in `X·∏_{v≠0}(1 − (1/v)·X)`;
/// the overall factor `t` is left implicit.
#[derive(Clone, Debug)]
pub struct UniversalFamily {
    ring: Arc<SatakeRing>,
    coeffs: Vec<RElement>,
}

impl UniversalFamily {
    pub fn ring(&self) -> &Arc<SatakeRing> {
        &self.ring
    }

    /// `c_1..c_r` (index 0 is `c_1`).
    pub fn coeffs(&self) -> &[RElement] {
        &self.coeffs
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.coeffs.iter().map(RElement::degree).collect()
    }

    /// Largest `i` with `c_i ≠ 0` in the ring.
    pub fn rank(&self) -> Result<usize> {
        for i in (0..self.coeffs.len()).rev() {
            if !self.ring.is_zero(&self.coeffs[i])? {
                return Ok(i + 1);
            }
        }
        Ok(0)
    }
}

/// Expands the universal product and checks that only `q`-power exponents
/// survive in `R_r`.
pub fn universal_coeffs(ring: &Arc<SatakeRing>, caps: &Caps) -> Result<UniversalFamily> {
    let field = ring.field();
    let q = field.size() as usize;
    let uring = ring.generator_ring();
    // coeff[n] is the coefficient of X^(n+1).
    let mut coeff: Vec<MPoly> = vec![MPoly::one(uring)];
    let units: Vec<u32> = (1..field.size()).collect();
    for line in 0..ring.num_lines() {
        for &alpha in &units {
            let a = MPoly::var(uring, line).scale(field.inv(alpha).expect("non-zero"));
            let mut next = coeff.clone();
            next.push(MPoly::zero(uring));
            for n in 0..coeff.len() {
                next[n + 1] = next[n + 1].try_sub(&coeff[n].try_mul(&a)?)?;
            }
            coeff = next;
            caps.check_monomials(coeff.iter().map(MPoly::len).sum())?;
        }
    }
    let mut out = Vec::new();
    let mut next_power = 1usize;
    for (n, c) in coeff.into_iter().enumerate() {
        let exponent = n + 1;
        let elem = RElement::new(ring, c, n as u32)?;
        if exponent == next_power {
            if n > 0 {
                out.push(elem);
            }
            next_power *= q;
        } else if !ring.is_zero(&elem)? {
            return Err(Error::Consistency(format!("coefficient of X^{exponent} does not vanish")));
        }
    }
    if out.len() != ring.rank() {
        return Err(Error::Consistency("wrong number of coefficients".into()));
    }
    if ring.is_zero(out.last().expect("r ≥ 1"))? {
        return Err(Error::Consistency("top coefficient vanishes".into()));
    }
    Ok(UniversalFamily { ring: ring.clone(), coeffs: out })
}

/// The family restricted to the stratum of a subspace `V' ⊂ V_r`.
#[derive(Clone, Debug)]
pub struct Specialization {
    /// `R_{r'}` for `r' = dim V'`.
    pub ring: Arc<SatakeRing>,
    /// Images of `c_1..c_r`; those past `r'` vanish.
    pub coeffs: Vec<RElement>,
    pub rank: usize,
}

/// Reduced row-echelon basis of the row space of `basis`, checking full rank.
fn echelon_basis(basis: &MatrixFq) -> Result<MatrixFq> {
    let rref = basis.rref();
    if rref.rank != basis.nrows() {
        return Err(Error::Invalid("stratum basis is not of full rank".into()));
    }
    Ok(rref.reduced)
}

/// Kills every generator `u_v` with `v ∉ V'` and renames the survivors to
/// the generators of `R_{r'}` through the coordinates of `V'` in its
/// echelon basis.
pub fn specialize_stratum(family: &UniversalFamily, basis: &MatrixFq) -> Result<Specialization> {
    let ring = family.ring();
    if basis.nrows() == 0 {
        return Err(Error::Invalid("rank-0 subspace".into()));
    }
    if basis.ncols() != ring.rank() || basis.nrows() > ring.rank() {
        return Err(Error::DimensionMismatch("stratum basis shape".into()));
    }
    if **basis.field() != **ring.field() {
        return Err(Error::FieldMismatch);
    }
    let b = echelon_basis(basis)?;
    let sub = SatakeRing::new(ring.field(), b.nrows())?;
    let target = sub.generator_ring();
    let mut images = vec![MPoly::zero(target); ring.num_lines()];
    for (j, w) in sub.lines().iter().enumerate() {
        let v = b.apply_row(w);
        let (alpha, i) = ring.normalize(&v).ok_or(Error::Consistency("zero image".into()))?;
        if alpha != 1 {
            return Err(Error::Consistency("echelon image not normalized".into()));
        }
        images[i] = MPoly::var(target, j);
    }
    let coeffs = family
        .coeffs()
        .iter()
        .map(|c| RElement::new(&sub, c.poly().substitute(&images)?, c.degree()))
        .collect::<Result<Vec<_>>>()?;
    let spec = UniversalFamily { ring: sub.clone(), coeffs };
    let rank = spec.rank()?;
    Ok(Specialization { ring: sub, coeffs: spec.coeffs, rank })
}

/// Every `d`-dimensional subspace of `F_q^r`, as a reduced echelon basis.
pub fn subspaces(field: &Arc<FieldDesc>, r: usize, d: usize) -> Vec<MatrixFq> {
    fn pivots(r: usize, d: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for c in start..r {
            cur.push(c);
            pivots(r, d, c + 1, cur, out);
            cur.pop();
        }
    }
    let mut sets = Vec::new();
    pivots(r, d, 0, &mut Vec::new(), &mut sets);
    let q = field.size() as usize;
    let mut out = Vec::new();
    for piv in sets {
        // Free slots: row i, column c > piv[i], c not a pivot.
        let free: Vec<(usize, usize)> = (0..d)
            .flat_map(|i| (piv[i] + 1..r).filter(|c| !piv.contains(c)).map(move |c| (i, c)))
            .collect();
        let total = q.pow(free.len() as u32);
        for idx in 0..total {
            let mut m = MatrixFq::zeros(field, d, r);
            for (i, &p) in piv.iter().enumerate() {
                m.set_value(i, p, 1);
            }
            let mut rest = idx;
            for &(i, c) in &free {
                m.set_value(i, c, (rest % q) as u32);
                rest /= q;
            }
            out.push(m);
        }
    }
    out
}

/// Dimension of the span of all products `∏ c_i^{a_i}` of weighted degree
/// `k`, together with the number of such products.
pub fn weighted_monomial_span(family: &UniversalFamily, k: u32, caps: &Caps) -> Result<(usize, usize)> {
    let weights = family.degrees();
    let mut products = Vec::new();
    fn rec(
        family: &UniversalFamily,
        weights: &[u32],
        i: usize,
        left: u32,
        acc: RElement,
        out: &mut Vec<RElement>,
    ) -> Result<()> {
        if i == weights.len() {
            if left == 0 {
                out.push(acc);
            }
            return Ok(());
        }
        let mut cur = acc;
        let mut used = 0;
        loop {
            rec(family, weights, i + 1, left - used, cur.clone(), out)?;
            if used + weights[i] > left {
                break;
            }
            used += weights[i];
            cur = cur.try_mul(&family.coeffs()[i])?;
        }
        Ok(())
    }
    rec(family, &weights, 0, k, RElement::one(family.ring()), &mut products)?;
    let count = products.len();
    Ok((family.ring().span_dim(&products, caps)?, count))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(q: u64, r: usize) -> Arc<SatakeRing> {
        SatakeRing::new(&FieldDesc::with_order(q).unwrap(), r).unwrap()
    }

    #[test]
    fn line_enumeration() {
        let r2 = ring(2, 2);
        assert_eq!(r2.lines(), &[vec![1, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(r2.generator_ring().names(), &["u_x", "u_y", "u_{x+y}"]);
        let r3 = ring(2, 3);
        let names: Vec<&str> = r3.generator_ring().names().iter().map(String::as_str).collect();
        assert_eq!(names, ["u_x", "u_y", "u_{x+y}", "u_z", "u_{x+z}", "u_{y+z}", "u_{x+y+z}"]);
        assert_eq!(ring(3, 2).generator_ring().names()[3], "u_{x+2y}");
        assert_eq!(ring(4, 2).num_lines(), 5);
        assert_eq!(ring(3, 3).num_lines(), 13);
        let f4 = FieldDesc::prime(2).unwrap().extension(2).unwrap();
        assert!(SatakeRing::new(&f4, 2).is_err());
    }

    #[test]
    fn clearing_denominators() {
        let r = ring(2, 2);
        let ux = RElement::generator(&r, 0);
        let n = r.clear_denominators(&ux).unwrap();
        assert_eq!(n.to_string(), "x*y + y^2");
        let uy = RElement::generator(&r, 1);
        let uxy = RElement::generator(&r, 2);
        let rel = ux
            .try_mul(&uy)
            .unwrap()
            .try_add(&ux.try_mul(&uxy).unwrap())
            .unwrap()
            .try_add(&uy.try_mul(&uxy).unwrap())
            .unwrap();
        assert!(r.clear_denominators(&rel).unwrap().is_zero());
        assert!(!rel.is_free_zero());
        assert!(r.is_zero(&rel).unwrap());
        assert!(r.clear_denominators(&RElement::zero(&r, 3)).unwrap().is_zero());
    }

    #[test]
    fn reciprocal_scaling() {
        let r = ring(3, 2);
        let a = RElement::reciprocal(&r, &[2, 2]).unwrap();
        let b = RElement::generator(&r, 2).scale(2);
        assert!(r.ring_eq(&a, &b).unwrap());
        assert_eq!(RElement::reciprocal(&r, &[0, 0]).unwrap_err(), Error::ZeroInverse);
    }

    #[test]
    fn small_graded_dims() {
        let caps = Caps::default();
        assert_eq!(ring(2, 2).graded_dim(2, &caps).unwrap(), 5);
        assert_eq!(ring(2, 2).graded_dim(0, &caps).unwrap(), 1);
        assert_eq!(ring(2, 3).graded_dim(1, &caps).unwrap(), 7);
        for q in [2u64, 3, 4, 5] {
            for r in 1..=3usize {
                let expected = (q.pow(r as u32) - 1) / (q - 1);
                if expected > 40 {
                    continue;
                }
                assert_eq!(ring(q, r).graded_dim(1, &caps).unwrap() as u64, expected);
            }
        }
        for k in 0..6 {
            assert_eq!(ring(3, 1).graded_dim(k, &caps).unwrap(), 1);
        }
    }

    #[test]
    fn graded_dim_caps() {
        let caps = Caps { group: 10, monomials: 5 };
        assert!(matches!(ring(2, 2).graded_dim(4, &caps), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn formula_values() {
        assert_eq!(dim_formula(2, 2, 3).unwrap(), 7);
        assert_eq!(dim_formula(3, 2, 4).unwrap(), 73);
        for k in 0..10 {
            assert_eq!(dim_formula(1, 5, k).unwrap(), 1);
            assert_eq!(dim_formula(2, 3, k).unwrap(), 1 + 3 * k);
        }
    }

    #[test]
    fn binomial_polynomial_convention() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(-1, 0), 1);
        assert_eq!(binomial(-1, 1), -1);
        assert_eq!(binomial(-1, 2), 1);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(3, -1), 0);
    }

    #[test]
    fn hilbert_counts() {
        assert_eq!(weighted_hilbert(&[1, 3], 3).unwrap(), 2);
        assert_eq!(weighted_hilbert(&[2, 8], 10).unwrap(), 2);
        for k in 0..10 {
            assert_eq!(weighted_hilbert(&[1, 1, 1], k).unwrap() as i128, binomial(k as i64 + 2, 2));
        }
        assert!(weighted_hilbert(&[], 3).is_err());
        assert!(weighted_hilbert(&[0, 1], 3).is_err());
    }

    #[test]
    fn universal_small_cases() {
        let caps = Caps::default();
        for q in [2u64, 3, 4, 5] {
            let r1 = ring(q, 1);
            let fam = universal_coeffs(&r1, &caps).unwrap();
            let expect = RElement::generator(&r1, 0).pow(q as u32 - 1).neg();
            assert_eq!(fam.coeffs()[0].poly(), expect.poly());
        }
        let r = ring(2, 2);
        let fam = universal_coeffs(&r, &caps).unwrap();
        assert_eq!(fam.coeffs()[0].to_string(), "u_x + u_y + u_{x+y}");
        assert_eq!(fam.coeffs()[1].to_string(), "u_x*u_y*u_{x+y}");
        assert_eq!(fam.degrees(), vec![1, 3]);
        assert_eq!(fam.rank().unwrap(), 2);
    }

    #[test]
    fn universal_invariance() {
        let caps = Caps::default();
        for (q, r) in [(2u64, 2usize), (3, 2), (2, 3)] {
            let sr = ring(q, r);
            let fam = universal_coeffs(&sr, &caps).unwrap();
            let gl = SubgroupGens::general_linear(sr.field(), r);
            for c in fam.coeffs() {
                assert!(sr.is_invariant(c, &gl).unwrap());
            }
        }
    }

    #[test]
    fn strata_examples() {
        let caps = Caps::default();
        let sr = ring(2, 2);
        let fam = universal_coeffs(&sr, &caps).unwrap();
        let line = MatrixFq::from_ints(sr.field(), 1, 2, &[1, 0]).unwrap();
        let s = specialize_stratum(&fam, &line).unwrap();
        assert_eq!(s.rank, 1);
        assert_eq!(s.coeffs[0].to_string(), "u_x");
        assert!(s.coeffs[1].is_free_zero());
        let whole = MatrixFq::identity(sr.field(), 2);
        let s = specialize_stratum(&fam, &whole).unwrap();
        assert_eq!(s.rank, 2);
        for (a, b) in s.coeffs.iter().zip(fam.coeffs()) {
            assert_eq!(a.poly().to_string(), b.poly().to_string());
        }
        let empty = MatrixFq::zeros(sr.field(), 0, 2);
        assert!(specialize_stratum(&fam, &empty).is_err());
    }

    #[test]
    fn subspace_counts() {
        let f2 = FieldDesc::prime(2).unwrap();
        assert_eq!(subspaces(&f2, 3, 1).len(), 7);
        assert_eq!(subspaces(&f2, 3, 2).len(), 7);
        assert_eq!(subspaces(&f2, 3, 3).len(), 1);
        let f3 = FieldDesc::prime(3).unwrap();
        assert_eq!(subspaces(&f3, 3, 2).len(), 13);
        assert_eq!(subspaces(&f3, 4, 2).len(), 130);
    }

    #[test]
    fn invariant_examples() {
        let caps = Caps::default();
        let sr = ring(2, 2);
        let f = sr.field().clone();
        assert_eq!(sr.invariant_dim(&SubgroupGens::upper_unipotent(&f, 2), 2, &caps).unwrap(), 3);
        assert_eq!(sr.invariant_dim(&SubgroupGens::general_linear(&f, 2), 3, &caps).unwrap(), 2);
        for k in 0..4 {
            assert_eq!(
                sr.invariant_dim(&SubgroupGens::trivial(&f, 2), k, &caps).unwrap(),
                sr.graded_dim(k, &caps).unwrap()
            );
        }
        let gl = SubgroupGens::general_linear(&f, 2);
        for b in sr.invariant_basis(&gl, 4, &caps).unwrap() {
            assert!(sr.is_invariant(&b, &gl).unwrap());
        }
    }

    #[test]
    fn level_formula_examples() {
        let caps = Caps::default();
        let f2 = FieldDesc::prime(2).unwrap();
        for k in 0..6u64 {
            assert_eq!(level_dim_formula(&SubgroupGens::trivial(&f2, 2), k, &caps).unwrap(), 1 + 2 * k);
            assert_eq!(level_dim_formula(&SubgroupGens::upper_unipotent(&f2, 2), k, &caps).unwrap(), k + 1);
        }
        assert_eq!(level_dim_formula(&SubgroupGens::trivial(&f2, 3), 0, &caps).unwrap(), 1);
        assert_eq!(
            level_dim_formula(&SubgroupGens::general_linear(&f2, 2), 1, &caps).unwrap_err(),
            Error::NotUnipotent
        );
    }

    #[test]
    fn group_action_is_a_right_action() {
        let sr = ring(3, 2);
        let f = sr.field().clone();
        let caps = Caps::default();
        let elems = SubgroupGens::general_linear(&f, 2).elements(&caps).unwrap();
        let x = RElement::monomial(&sr, vec![2, 0, 1, 0], 1)
            .try_add(&RElement::monomial(&sr, vec![0, 1, 1, 1], 2))
            .unwrap();
        for g in elems.iter().step_by(7) {
            for h in elems.iter().step_by(5) {
                let lhs = sr.group_act(&sr.group_act(&x, g).unwrap(), h).unwrap();
                let rhs = sr.group_act(&x, &g.try_mul(h).unwrap()).unwrap();
                assert_eq!(lhs.poly(), rhs.poly());
            }
        }
    }

    #[test]
    fn numerator_tracks_substitution() {
        // N(f|g) = N(f)(g·x) up to the scalar by which D moves.
        let sr = ring(3, 2);
        let f = sr.field().clone();
        let g = MatrixFq::from_ints(&f, 2, 2, &[1, 2, 0, 1]).unwrap();
        let x = RElement::monomial(&sr, vec![1, 0, 2, 0], 1);
        let moved = sr.clear_denominators(&sr.group_act(&x, &g).unwrap()).unwrap();
        let direct = sr.clear_denominators(&x).unwrap().substitute_linear(&g).unwrap();
        let d = (0..sr.num_lines()).fold(MPoly::one(sr.coordinate_ring()), |acc, l| {
            acc.try_mul(&sr.linear_form(l)).unwrap()
        });
        let dg = d.substitute_linear(&g).unwrap();
        // D(gx) = δ·D(x) for a scalar δ; N(f)(gx) = f(gx)·D(gx)^k = δ^k·N(f|g).
        let delta = (1..f.size()).find(|&c| d.scale(c) == dg).unwrap();
        assert_eq!(direct, moved.scale(f.pow(delta, 3).unwrap()));
    }

    #[test]
    fn trace_examples() {
        let caps = Caps::default();
        let sr = ring(2, 2);
        let f = sr.field().clone();
        let u = SubgroupGens::upper_unipotent(&f, 2);
        let triv = SubgroupGens::trivial(&f, 2);
        for b in sr.invariant_basis(&u, 3, &caps).unwrap() {
            let t = sr.trace_invariants(&b, &triv, &u, &caps).unwrap();
            assert!(sr.is_zero(&t).unwrap());
            assert!(sr.ring_eq(&sr.trace_invariants(&b, &u, &u, &caps).unwrap(), &b).unwrap());
        }
        let notinv = RElement::generator(&sr, 0);
        assert_eq!(sr.trace_invariants(&notinv, &u, &u, &caps).unwrap_err(), Error::NotInvariant);
    }
}
