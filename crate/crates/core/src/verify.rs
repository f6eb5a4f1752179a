//! The acceptance checks: each compares a closed formula or structural
//! claim against an independent brute-force computation, with exact
//! equality throughout.
//!
//! Every check returns a [`CheckReport`]. Mathematical disagreements are
//! recorded as failures; only resource exhaustion is propagated as an
//! error, so callers can tell "wrong" from "could not run".

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::caps::Caps;
use crate::drinfeld::{DrinfeldModule, LevelStructure};
use crate::error::{Error, Result};
use crate::field::{FieldDesc, FieldElement};
use crate::group::SubgroupGens;
use crate::hecke::{self, DivisorType};
use crate::linalg::MatrixFq;
use crate::satake::{self, SatakeRing};
use crate::skew::{root_set, Scalar, SkewPoly};

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub criterion: u8,
    pub title: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
    pub elapsed: Duration,
}

impl CheckReport {
    fn new(criterion: u8, title: &'static str) -> Self {
        CheckReport { criterion, title, cases: 0, failures: Vec::new(), elapsed: Duration::ZERO }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.cases > 0
    }

    /// `PASS criterion N: title (cases, time)` or `FAIL …` plus the first failure.
    pub fn line(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let mut s = format!(
            "{status} criterion {}: {} ({} cases, {:.1}s)",
            self.criterion,
            self.title,
            self.cases,
            self.elapsed.as_secs_f64()
        );
        if let Some(f) = self.failures.first() {
            s.push_str(&format!(" first failure: {f}"));
        }
        s
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    /// Records a computation error as a failure, except resource errors.
    fn absorb<T>(&mut self, label: impl FnOnce() -> String, r: Result<T>) -> Result<Option<T>> {
        match r {
            Ok(v) => Ok(Some(v)),
            Err(e @ Error::CapExceeded { .. }) => Err(e),
            Err(e) => {
                self.cases += 1;
                self.failures.push(format!("{}: {e}", label()));
                Ok(None)
            }
        }
    }
}

fn timed(mut report: CheckReport, start: Instant) -> CheckReport {
    report.elapsed = start.elapsed();
    report
}

/// `(q, r, k_max)` cells shared by the dimension and universal-family checks.
pub const DIMENSION_GRID: [(u64, usize, u32); 5] = [(2, 2, 8), (3, 2, 6), (4, 2, 4), (2, 3, 4), (3, 3, 3)];

fn ring(q: u64, r: usize) -> Result<Arc<SatakeRing>> {
    SatakeRing::new(&FieldDesc::with_order(q)?, r)
}

/// One row of a dimension table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimRow {
    pub k: u32,
    pub oracle: u64,
    pub formula: u64,
}

impl DimRow {
    pub fn matches(&self) -> bool {
        self.oracle == self.formula
    }
}

/// Rank of the degree-`k` piece of `R_r` next to the closed formula.
pub fn dimension_rows(q: u64, r: usize, ks: impl IntoIterator<Item = u32>, caps: &Caps) -> Result<Vec<DimRow>> {
    let sr = ring(q, r)?;
    ks.into_iter()
        .map(|k| {
            Ok(DimRow {
                k,
                oracle: sr.graded_dim(k, caps)? as u64,
                formula: satake::dim_formula(r, q, k as u64)?,
            })
        })
        .collect()
}

pub fn criterion_1(caps: &Caps) -> Result<CheckReport> {
    let start = Instant::now();
    let mut rep = CheckReport::new(1, "graded dimensions equal the closed formula");
    for (q, r, kmax) in DIMENSION_GRID {
        let rows = dimension_rows(q, r, 0..=kmax, caps);
        if let Some(rows) = rep.absorb(|| format!("q={q} r={r}"), rows)? {
            for row in rows {
                rep.check(row.matches(), || {
                    format!("q={q} r={r} k={}: rank {} vs formula {}", row.k, row.oracle, row.formula)
                });
            }
        }
    }
    Ok(timed(rep, start))
}

pub fn criterion_2(caps: &Caps) -> Result<CheckReport> {
    let start = Instant::now();
    let mut rep = CheckReport::new(2, "universal coefficients: q-power support, degrees, invariance");
    for (q, r, _) in DIMENSION_GRID {
        let sr = ring(q, r)?;
        // universal_coeffs itself fails if a non-q-power coefficient survives.
        let Some(fam) = rep.absorb(|| format!("q={q} r={r} expansion"), satake::universal_coeffs(&sr, caps))? else {
            continue;
        };
        rep.check(true, String::new);
        let want: Vec<u32> = (1..=r as u32).map(|i| (q as u32).pow(i) - 1).collect();
        rep.check(fam.degrees() == want, || format!("q={q} r={r}: degrees {:?}", fam.degrees()));
        let top = sr.is_zero(&fam.coeffs()[r - 1]);
        if let Some(z) = rep.absorb(|| format!("q={q} r={r} c_r"), top)? {
            rep.check(!z, || format!("q={q} r={r}: c_r vanishes"));
        }
        let gl = SubgroupGens::general_linear(sr.field(), r);
        for (i, c) in fam.coeffs().iter().enumerate() {
            for g in gl.generators() {
                let moved = sr.group_act(c, g).and_then(|m| sr.ring_eq(&m, c));
                if let Some(ok) = rep.absorb(|| format!("q={q} r={r} c_{}", i + 1), moved)? {
                    rep.check(ok, || format!("q={q} r={r}: c_{} not fixed by {g:?}", i + 1));
                }
            }
        }
    }
    Ok(timed(rep, start))
}

pub fn criterion_3(caps: &Caps) -> Result<CheckReport> {
    let start = Instant::now();
    let mut rep = CheckReport::new(3, "weighted monomials in c_1..c_r are independent");
    for (q, r, kmax) in [(2u64, 2usize, 8u32), (2, 3, 4)] {
        let sr = ring(q, r)?;
        let Some(fam) = rep.absorb(|| format!("q={q} r={r}"), satake::universal_coeffs(&sr, caps))? else {
            continue;
        };
        let weights: Vec<u64> = fam.degrees().iter().map(|&d| d as u64).collect();
        for k in 0..=kmax {
            let span = satake::weighted_monomial_span(&fam, k, caps);
            let Some((dim, count)) = rep.absorb(|| format!("q={q} r={r} k={k}"), span)? else {
                continue;
            };
            let expect = satake::weighted_hilbert(&weights, k as u64)?;
            rep.check(dim as u64 == expect && count as u64 == expect, || {
                format!("q={q} r={r} k={k}: span {dim} of {count} products, expected {expect}")
            });
        }
    }
    Ok(timed(rep, start))
}

/// The named level groups with the weights of their invariant rings.
pub fn weighted_groups(field: &Arc<FieldDesc>, r: usize) -> Vec<(&'static str, SubgroupGens, Vec<u64>)> {
    let q = field.size() as u64;
    vec![
        ("gl", SubgroupGens::general_linear(field, r), satake::gl_weights(q, r)),
        ("sl", SubgroupGens::special_linear(field, r), satake::sl_weights(q, r)),
        ("unipotent", SubgroupGens::upper_unipotent(field, r), vec![1; r]),
    ]
}

pub fn criterion_4(caps: &Caps) -> Result<CheckReport> {
    let start = Instant::now();
    let mut rep = CheckReport::new(4, "invariant rings are weighted polynomial rings");
    let r = 2;
    for q in [2u64, 3] {
        let sr = ring(q, r)?;
        for (name, group, weights) in weighted_groups(sr.field(), r) {
            for k in 0..=6u32 {
                let dim = sr.invariant_dim(&group, k, caps);
                let Some(dim) = rep.absorb(|| format!("q={q} {name} k={k}"), dim)? else {
                    continue;
                };
                let expect = satake::weighted_hilbert(&weights, k as u64)?;
                rep.check(dim as u64 == expect, || format!("q={q} {name} k={k}: {dim} vs {expect}"));
                if name == "unipotent" {
                    let b = satake::binomial(k as i64 + r as i64 - 1, r as i64 - 1);
                    rep.check(dim as i128 == b, || format!("q={q} unipotent k={k}: {dim} vs binomial {b}"));
                }
            }
        }
    }
    Ok(timed(rep, start))
}

pub fn criterion_5(caps: &Caps) -> Result<CheckReport> {
    let start = Instant::now();
    let mut rep = CheckReport::new(5, "level dimension formula equals invariant dimensions");
    let mut cells: Vec<(u64, String, SubgroupGens, u32)> = Vec::new();
    for (q, r) in [(2u64, 2usize), (3, 2), (2, 3)] {
        let f = FieldDesc::with_order(q)?;
        cells.push((q, format!("trivial r={r}"), SubgroupGens::trivial(&f, r), 5));
        cells.push((q, format!("unipotent r={r}"), SubgroupGens::upper_unipotent(&f, r), 5));
    }
    let f4 = FieldDesc::with_order(4)?;
    let half = SubgroupGens::new(&f4, 2, vec![MatrixFq::from_ints(&f4, 2, 2, &[1, 1, 0, 1])?])?;
    cells.push((4, "index-2 subgroup of unipotent r=2".into(), half, 4));
    for (q, name, group, kmax) in cells {
        let sr = SatakeRing::new(group.field(), group.rank())?;
        for k in 0..=kmax {
            let lhs = satake::level_dim_formula(&group, k as u64, caps);
            let rhs = sr.invariant_dim(&group, k, caps);
            let label = || format!("q={q} {name} k={k}");
            let (Some(lhs), Some(rhs)) = (rep.absorb(label, lhs)?, rep.absorb(label, rhs)?) else {
                continue;
            };
            rep.check(lhs == rhs as u64, || format!("q={q} {name} k={k}: formula {lhs} vs invariants {rhs}"));
        }
    }
    Ok(timed(rep, start))
}

pub fn criterion_6(caps: &Caps) -> Result<CheckReport> {
    let start = Instant::now();
    let mut rep = CheckReport::new(6, "double-quotient expansion equals coset convolution");
    let types = DivisorType::all_up_to(2, 3);
    for q in [2u64, 3] {
        let basic = hecke::convolve(q, &DivisorType::new(vec![0, 1])?, &DivisorType::new(vec![0, 1])?);
        if let Some(basic) = rep.absorb(|| format!("q={q} basic product"), basic)? {
            let expect = [(DivisorType::new(vec![1, 1])?, q + 1), (DivisorType::new(vec![0, 2])?, 1)]
                .into_iter()
                .collect();
            rep.check(basic == expect, || format!("q={q}: (0,1)*(0,1) = {basic}"));
        }
        for a in &types {
            for b in &types {
                if a.total() + b.total() > 3 {
                    continue;
                }
                let label = || format!("q={q} a={a} b={b}");
                let conv = hecke::convolve(q, a, b);
                let hco = hecke::hco_expand(q, a, b, caps);
                let (Some(conv), Some(hco)) = (rep.absorb(label, conv)?, rep.absorb(label, hco)?) else {
                    continue;
                };
                rep.check(conv == hco, || format!("q={q} a={a} b={b}: convolve {conv} vs expansion {hco}"));
                let mass = hecke::mass(q, &conv)
                    .and_then(|m| Ok((m, hecke::coset_count(q, a)? * hecke::coset_count(q, b)?)));
                if let Some((m, expect)) = rep.absorb(label, mass)? {
                    rep.check(m == expect, || format!("q={q} a={a} b={b}: mass {m} vs {expect}"));
                }
            }
        }
    }
    Ok(timed(rep, start))
}

fn random_poly(base: &Arc<FieldDesc>, rng: &mut ChaCha8Rng, deg: usize) -> Vec<FieldElement> {
    (0..=deg).map(|_| base.elem(rng.gen_range(0..base.size()))).collect()
}

fn poly_add(a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    let zero = a[0].zero_like();
    (0..a.len().max(b.len()))
        .map(|i| a.get(i).unwrap_or(&zero).plus(b.get(i).unwrap_or(&zero)))
        .collect()
}

fn poly_mul(a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    let mut out = vec![a[0].zero_like(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].plus(&x.times(y));
        }
    }
    out
}

/// Constant field, coefficient field, level structure and `θ`.
type RandomLevel = (Arc<FieldDesc>, Arc<FieldDesc>, LevelStructure<FieldElement>, FieldElement);

/// One random level structure over `F_{q^n}`.
fn random_module(rng: &mut ChaCha8Rng) -> Result<RandomLevel> {
    let q = [2u64, 3, 4][rng.gen_range(0..3)];
    let base = FieldDesc::with_order(q)?;
    let max_n = if q == 4 { 5 } else { 6 };
    let n = rng.gen_range(1..=max_n);
    let big = base.extension(n)?;
    let r = rng.gen_range(1..=n.min(3)) as usize;
    loop {
        let images: Vec<FieldElement> = (0..r).map(|_| big.elem(rng.gen_range(1..big.size()))).collect();
        match LevelStructure::new(&base, images) {
            Ok(lambda) => {
                let theta = big.elem(rng.gen_range(1..big.size()));
                return Ok((base, big, lambda, theta));
            }
            Err(Error::NotInjective) => continue,
            Err(e) => return Err(e),
        }
    }
}

pub fn criterion_7(seed: u64) -> Result<CheckReport> {
    let start = Instant::now();
    let mut rep = CheckReport::new(7, "Drinfeld modules: reconstruction, full-torsion quotient, homomorphism laws");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..50 {
        let (base, big, lambda, theta) = random_module(&mut rng)?;
        let label = || format!("trial {trial} over {} elements, rank {}", big.size(), lambda.rank());
        let Some(m) = rep.absorb(label, DrinfeldModule::from_level(&lambda, &theta))? else {
            continue;
        };
        rep.check(m.rank() == lambda.rank(), || format!("{}: rank {}", label(), m.rank()));
        let values = lambda.values()?;
        let t = [base.zero(), base.one()];
        if let Some(kernel) = rep.absorb(label, m.torsion(&t, &big))? {
            rep.check(root_set(&kernel) == root_set(&values) && kernel.len() == values.len(), || {
                format!("{}: kernel of φ_t differs from the level image", label())
            });
        }
        if let Some((target, iso)) = rep.absorb(label, m.quotient_by(&values))? {
            let ok = iso.intertwines()? && m.isomorphic_via(&target, &theta) && m.isomorphism(&target).is_some();
            rep.check(ok, || format!("{}: full-torsion quotient not isomorphic to source", label()));
        }
        for _ in 0..3 {
            let (da, db) = (rng.gen_range(0..3), rng.gen_range(0..3));
            let a = random_poly(&base, &mut rng, da);
            let b = random_poly(&base, &mut rng, db);
            let laws = (|| -> Result<bool> {
                let (pa, pb) = (m.phi(&a)?, m.phi(&b)?);
                Ok(m.phi(&poly_mul(&a, &b))? == pa.try_mul(&pb)?
                    && m.phi(&poly_mul(&b, &a))? == pb.try_mul(&pa)?
                    && m.phi(&poly_add(&a, &b))? == pa.try_add(&pb)?
                    && m.phi(&[base.one()])? == SkewPoly::one(&theta))
            })();
            if let Some(ok) = rep.absorb(label, laws)? {
                rep.check(ok, || format!("{}: φ is not a ring homomorphism", label()));
            }
        }
    }
    Ok(timed(rep, start))
}

pub fn criterion_8(caps: &Caps) -> Result<CheckReport> {
    let start = Instant::now();
    let mut rep = CheckReport::new(8, "strata specialize the universal family of lower rank");
    let q = 2u64;
    for r in [2usize, 3] {
        let sr = ring(q, r)?;
        let fam = satake::universal_coeffs(&sr, caps)?;
        for d in 1..=r {
            let lower = satake::universal_coeffs(&ring(q, d)?, caps)?;
            for basis in satake::subspaces(sr.field(), r, d) {
                let label = || format!("r={r} subspace {basis:?}");
                let Some(spec) = rep.absorb(label, satake::specialize_stratum(&fam, &basis))? else {
                    continue;
                };
                let same = (0..r).all(|i| {
                    if i < d {
                        spec.coeffs[i].poly().to_string() == lower.coeffs()[i].poly().to_string()
                    } else {
                        spec.coeffs[i].is_free_zero()
                    }
                });
                rep.check(same, || format!("{}: specialization differs from rank-{d} family", label()));
                rep.check(spec.rank == d, || format!("{}: rank {} instead of {d}", label(), spec.rank));
            }
        }
    }
    Ok(timed(rep, start))
}

pub fn criterion_9(caps: &Caps) -> Result<CheckReport> {
    let start = Instant::now();
    let mut rep = CheckReport::new(9, "trace after inclusion is multiplication by the index");
    let f2 = FieldDesc::with_order(2)?;
    let f3 = FieldDesc::with_order(3)?;
    let cases: Vec<(&str, SubgroupGens, SubgroupGens, Vec<u32>)> = vec![
        ("trivial in unipotent, q=2", SubgroupGens::trivial(&f2, 2), SubgroupGens::upper_unipotent(&f2, 2), vec![1, 2, 3]),
        ("SL in GL, q=3", SubgroupGens::special_linear(&f3, 2), SubgroupGens::general_linear(&f3, 2), vec![2, 4, 6]),
        ("unipotent in GL, q=3", SubgroupGens::upper_unipotent(&f3, 2), SubgroupGens::general_linear(&f3, 2), vec![2, 6]),
        ("trivial in unipotent, q=3", SubgroupGens::trivial(&f3, 2), SubgroupGens::upper_unipotent(&f3, 2), vec![1, 3]),
    ];
    for (name, sub, sup, degrees) in cases {
        let field = sup.field().clone();
        let index = sup.order(caps)? / sub.order(caps)?;
        let factor = field.from_int(index as i64);
        let sr = SatakeRing::new(&field, sup.rank())?;
        let mut samples = 0;
        for k in degrees {
            let Some(basis) = rep.absorb(|| format!("{name} k={k}"), sr.invariant_basis(&sup, k, caps))? else {
                continue;
            };
            for f in basis {
                samples += 1;
                let traced = sr.trace_invariants(&f, &sub, &sup, caps).and_then(|t| sr.ring_eq(&t, &f.scale(factor)));
                if let Some(ok) = rep.absorb(|| format!("{name} k={k}"), traced)? {
                    rep.check(ok, || format!("{name} k={k}: trace is not {index}·id"));
                }
            }
        }
        rep.check(samples > 0, || format!("{name}: no invariant samples"));
    }
    Ok(timed(rep, start))
}

/// All nine checks in order.
pub fn run_all(caps: &Caps, seed: u64) -> Result<Vec<CheckReport>> {
    Ok(vec![
        criterion_1(caps)?,
        criterion_2(caps)?,
        criterion_3(caps)?,
        criterion_4(caps)?,
        criterion_5(caps)?,
        criterion_6(caps)?,
        criterion_7(seed)?,
        criterion_8(caps)?,
        criterion_9(caps)?,
    ])
}
