//! Drinfeld `F_q[t]`-modules over a field, level `(t)` structures and
//! isogenies given by finite kernels.
//!
//! A module is stored as `φ_t = c_0 + c_1 τ + … + c_r τ^r` with `c_0` the
//! image of `t`. Coefficients may live in a finite field `F_{q^n}` (with
//! `t ↦ θ`) or in the generic field of rational functions.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{FieldDesc, FieldElement};
use crate::linalg::MatrixFq;
use crate::skew::{Scalar, SkewPoly};

/// All `q^d` combinations `Σ α_i b_i` with `α_i ∈ F_q`, enumerated in
/// base-`q` digit order of the coefficient vector (first digit fastest).
pub fn span_elements<C: Scalar>(basis: &[C], base: &Arc<FieldDesc>, sample: &C) -> Result<Vec<C>> {
    let scalars = base
        .elements()
        .map(|a| sample.from_base(&a))
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![sample.zero_like()];
    for b in basis {
        let mut next = Vec::with_capacity(out.len() * scalars.len());
        for s in &scalars {
            let sb = s.times(b);
            for x in &out {
                next.push(x.plus(&sb));
            }
        }
        out = next;
    }
    Ok(out)
}

/// An injective `F_q`-linear map `F_q^r → L` given by the images of the
/// standard basis.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelStructure<C: Scalar> {
    base: Arc<FieldDesc>,
    images: Vec<C>,
}

impl<C: Scalar> LevelStructure<C> {
    /// Checks injectivity by enumerating all `q^r` combinations.
    pub fn new(base: &Arc<FieldDesc>, images: Vec<C>) -> Result<Self> {
        let sample = images.first().ok_or(Error::ZeroModule)?.clone();
        if images.iter().any(|e| !e.same_field(&sample)) {
            return Err(Error::FieldMismatch);
        }
        let lambda = LevelStructure { base: base.clone(), images };
        let values = lambda.values()?;
        if values.iter().skip(1).any(Scalar::is_zero) {
            return Err(Error::NotInjective);
        }
        Ok(lambda)
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[C] {
        &self.images
    }

    pub fn base(&self) -> &Arc<FieldDesc> {
        &self.base
    }

    /// `λ(α) = Σ α_i e_i`.
    pub fn apply(&self, alpha: &[FieldElement]) -> Result<C> {
        if alpha.len() != self.rank() {
            return Err(Error::DimensionMismatch("level vector length".into()));
        }
        let mut acc = self.images[0].zero_like();
        for (a, e) in alpha.iter().zip(&self.images) {
            acc = acc.plus(&e.from_base(a)?.times(e));
        }
        Ok(acc)
    }

    /// The whole image `λ(V_r)`, zero first.
    pub fn values(&self) -> Result<Vec<C>> {
        span_elements(&self.images, &self.base, &self.images[0])
    }

    /// `λ∘g`: new images `e'_j = Σ_i g_ij e_i`.
    pub fn act(&self, g: &MatrixFq) -> Result<Self> {
        let r = self.rank();
        if g.nrows() != r || g.ncols() != r {
            return Err(Error::DimensionMismatch(format!("matrix must be {r}x{r}")));
        }
        if **g.field() != *self.base {
            return Err(Error::FieldMismatch);
        }
        if !g.is_invertible() {
            return Err(Error::SingularMatrix);
        }
        let images = (0..r)
            .map(|j| {
                let col: Vec<FieldElement> = (0..r).map(|i| g.get(i, j)).collect();
                self.apply(&col)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LevelStructure { base: self.base.clone(), images })
    }
}

/// `φ_t = Σ c_i τ^i` with `c_0` the image of `t` and some `c_i ≠ 0`, `i ≥ 1`.
#[derive(Clone, PartialEq)]
pub struct DrinfeldModule<C: Scalar> {
    base: Arc<FieldDesc>,
    phi_t: SkewPoly<C>,
}

impl<C: Scalar> DrinfeldModule<C> {
    pub fn new(base: &Arc<FieldDesc>, coeffs: Vec<C>) -> Result<Self> {
        let sample = coeffs.first().ok_or(Error::ZeroModule)?.clone();
        if coeffs.iter().any(|c| !c.same_field(&sample)) {
            return Err(Error::FieldMismatch);
        }
        let phi_t = SkewPoly::new(coeffs, &sample);
        if phi_t.degree().unwrap_or(0) == 0 {
            return Err(Error::ZeroModule);
        }
        Ok(DrinfeldModule { base: base.clone(), phi_t })
    }

    /// `φ_t(X) = θ·X·∏_{v ≠ 0}(1 − X/λ(v))`.
    pub fn from_level(lambda: &LevelStructure<C>, theta: &C) -> Result<Self> {
        let p = SkewPoly::subspace_poly(lambda.images(), theta)?;
        let b0 = p.coeff(0).invert()?;
        let phi_t = p.scale_left(&theta.times(&b0));
        if phi_t.coeff(0) != *theta {
            return Err(Error::Consistency("constant coefficient is not θ".into()));
        }
        Ok(DrinfeldModule { base: lambda.base().clone(), phi_t })
    }

    pub fn phi_t(&self) -> &SkewPoly<C> {
        &self.phi_t
    }

    pub fn coeffs(&self) -> &[C] {
        self.phi_t.coeffs()
    }

    pub fn base(&self) -> &Arc<FieldDesc> {
        &self.base
    }

    /// Image `c_0` of `t`.
    pub fn theta(&self) -> C {
        self.phi_t.coeff(0)
    }

    /// Largest `i` with `c_i ≠ 0`.
    pub fn rank(&self) -> usize {
        self.phi_t.degree().unwrap_or(0)
    }

    /// `φ_a` for `a = Σ a_i t^i` with `a_i ∈ F_q` (Horner in `φ_t`).
    pub fn phi(&self, a: &[FieldElement]) -> Result<SkewPoly<C>> {
        let sample = self.phi_t.sample().clone();
        let mut acc = SkewPoly::zero(&sample);
        for ai in a.iter().rev() {
            if **ai.field() != *self.base {
                return Err(Error::NotInBaseField);
            }
            acc = acc.try_mul(&self.phi_t)?;
            acc = acc.try_add(&SkewPoly::constant(sample.from_base(ai)?))?;
        }
        Ok(acc)
    }

    /// Quotient by a finite `φ_t`-stable `F_q`-subspace `H`: returns the
    /// target module and `ψ(X) = X·∏_{h ≠ 0}(1 − X/h)` with `ψ·φ_t = φ'_t·ψ`.
    pub fn quotient_by(&self, h: &[C]) -> Result<(DrinfeldModule<C>, Isogeny<C>)> {
        let sample = self.phi_t.sample().clone();
        let basis = subspace_basis(h, &self.base, &sample)?;
        for x in h {
            let image = self.phi_t.eval(x);
            if !h.contains(&image) {
                return Err(Error::NotStable);
            }
        }
        let p = SkewPoly::subspace_poly(&basis, &sample)?;
        let psi = p.scale_left(&p.coeff(0).invert()?);
        let (target_t, rem) = psi.try_mul(&self.phi_t)?.right_div_rem(&psi)?;
        if !rem.is_zero() {
            return Err(Error::IsogenyRemainder);
        }
        let target = DrinfeldModule { base: self.base.clone(), phi_t: target_t };
        let iso = Isogeny { source: self.clone(), target: target.clone(), psi };
        Ok((target, iso))
    }

    /// Whether `u` realizes an isomorphism: `c'_i = u^(q^i − 1) c_i` for all `i`.
    pub fn isomorphic_via(&self, other: &Self, u: &C) -> bool {
        if u.is_zero() {
            return false;
        }
        let n = self.coeffs().len().max(other.coeffs().len());
        (0..n).all(|i| {
            let ui = u.frob(i as u32).times(&u.invert().expect("non-zero"));
            other.phi_t.coeff(i) == ui.times(&self.phi_t.coeff(i))
        })
    }

    /// `c_0 c_1 … c_r` as text, one per line, after a header.
    pub fn serialize(&self, header: &str) -> String {
        let mut s = String::from(header);
        s.push('\n');
        for c in self.phi_t.coeffs() {
            s.push_str(&c.to_string());
            s.push('\n');
        }
        s
    }
}

impl<C: Scalar> fmt::Debug for DrinfeldModule<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "φ_t = {}", self.phi_t)
    }
}

impl DrinfeldModule<FieldElement> {
    /// Roots of `φ_a` in `field`.
    pub fn torsion(&self, a: &[FieldElement], field: &Arc<FieldDesc>) -> Result<Vec<FieldElement>> {
        self.phi(a)?.kernel_roots(field)
    }

    /// Some `u` with `c'_i = u^(q^i − 1) c_i`, found by enumeration.
    pub fn isomorphism(&self, other: &Self) -> Option<FieldElement> {
        let field = self.phi_t.sample().field().clone();
        if self.rank() != other.rank() || self.theta() != other.theta() {
            return None;
        }
        let found = field.elements().skip(1).find(|u| self.isomorphic_via(other, u));
        found
    }
}

/// Greedy basis of `h`, verifying that `h` is exactly the `F_q`-span of it.
pub fn subspace_basis<C: Scalar>(h: &[C], base: &Arc<FieldDesc>, sample: &C) -> Result<Vec<C>> {
    let mut basis: Vec<C> = Vec::new();
    let mut span = vec![sample.zero_like()];
    for x in h {
        if !x.same_field(sample) {
            return Err(Error::FieldMismatch);
        }
        if !span.iter().any(|y| y == x) {
            basis.push(x.clone());
            span = span_elements(&basis, base, sample)?;
        }
    }
    let mut distinct: Vec<&C> = Vec::new();
    for x in h {
        if !distinct.contains(&x) {
            distinct.push(x);
        }
    }
    if distinct.len() != span.len() {
        return Err(Error::NotSubspace);
    }
    Ok(basis)
}

/// A non-zero `ψ` with `ψ·φ_t = φ'_t·ψ`.
#[derive(Clone, Debug)]
pub struct Isogeny<C: Scalar> {
    pub source: DrinfeldModule<C>,
    pub target: DrinfeldModule<C>,
    pub psi: SkewPoly<C>,
}

impl<C: Scalar> Isogeny<C> {
    pub fn degree(&self) -> usize {
        self.psi.degree().unwrap_or(0)
    }

    pub fn intertwines(&self) -> Result<bool> {
        Ok(self.psi.try_mul(self.source.phi_t())? == self.target.phi_t().try_mul(&self.psi)?)
    }
}
