//! One function per subcommand; each returns a finished report.

use std::ops::RangeInclusive;
use std::sync::Arc;

use serde_json::{json, Value};

use dforms::hecke::{self, DivisorType};
use dforms::satake::{self, SatakeRing};
use dforms::verify;
use dforms::{Caps, Error, FieldDesc, HeckeElement, MatrixFq, SubgroupGens};

use crate::output::Report;
use crate::{FieldRank, Outcome};

/// Largest supported constant field.
const MAX_Q: u64 = 16;

fn field(q: u64) -> Result<Arc<FieldDesc>, Error> {
    if !(2..=MAX_Q).contains(&q) {
        return Err(Error::Invalid(format!("q must be a prime power between 2 and {MAX_Q}, got {q}")));
    }
    FieldDesc::with_order(q)
}

fn satake_ring(fr: &FieldRank) -> Result<Arc<SatakeRing>, Error> {
    if fr.r == 0 {
        return Err(Error::Invalid("rank must be at least 1".into()));
    }
    SatakeRing::new(&field(fr.q)?, fr.r)
}

fn range_echo(k: &RangeInclusive<u32>) -> Value {
    json!([k.start(), k.end()])
}

pub fn dims(fr: &FieldRank, k: RangeInclusive<u32>, caps: &Caps) -> Result<Outcome, Error> {
    satake_ring(fr)?;
    let mut report = Report::new("dims", vec!["k", "oracle", "formula", "match"])
        .echo("q", fr.q)
        .echo("r", fr.r)
        .echo("k", range_echo(&k));
    let rows = verify::dimension_rows(fr.q, fr.r, k, caps)?;
    let passed = rows.iter().all(verify::DimRow::matches);
    for row in rows {
        report.row(vec![
            ("k", row.k.into()),
            ("oracle", row.oracle.into()),
            ("formula", row.formula.into()),
            ("match", row.matches().into()),
        ]);
    }
    Ok(Outcome { report, passed })
}

/// The subgroup named on the command line, with the weights of its
/// invariant ring when they are known in closed form.
fn resolve_group(spec: &str, f: &Arc<FieldDesc>, r: usize) -> Result<(SubgroupGens, Option<Vec<u64>>), Error> {
    if let Some(path) = spec.strip_prefix("file:") {
        return Ok((read_group_file(path, f, r)?, None));
    }
    if spec == "trivial" {
        return Ok((SubgroupGens::trivial(f, r), None));
    }
    verify::weighted_groups(f, r)
        .into_iter()
        .find(|(name, _, _)| *name == spec)
        .map(|(_, g, w)| (g, Some(w)))
        .ok_or_else(|| Error::Invalid(format!("unknown group {spec:?}; use gl, sl, unipotent, trivial or file:PATH")))
}

/// First line `q r`, then one generator per line with `r·r` row-major
/// entries. Entries are integers or `c0:c1:…` coordinates. `#` starts a
/// comment.
fn read_group_file(path: &str, f: &Arc<FieldDesc>, r: usize) -> Result<SubgroupGens, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {path}: {e}")))?;
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty());
    let header: Vec<&str> = lines.next().ok_or_else(|| Error::Parse(format!("{path} is empty")))?.split_whitespace().collect();
    let nums: Vec<u64> = header.iter().filter_map(|t| t.parse().ok()).collect();
    if header.len() != 2 || nums.len() != 2 {
        return Err(Error::Parse(format!("{path}: header must be `q r`")));
    }
    if nums[0] != f.size() as u64 || nums[1] as usize != r {
        return Err(Error::Invalid(format!("{path} describes q={} r={}, expected q={} r={r}", nums[0], nums[1], f.size())));
    }
    let mut gens = Vec::new();
    for line in lines {
        let values = line.split_whitespace().map(|t| f.parse_value(t)).collect::<Result<Vec<u32>, _>>()?;
        if values.len() != r * r {
            return Err(Error::Parse(format!("{path}: generator needs {} entries, got {}", r * r, values.len())));
        }
        gens.push(MatrixFq::from_values(f, r, r, values)?);
    }
    SubgroupGens::new(f, r, gens)
}

pub fn invariants(fr: &FieldRank, k: RangeInclusive<u32>, group: &str, caps: &Caps) -> Result<Outcome, Error> {
    let sr = satake_ring(fr)?;
    let (g, weights) = resolve_group(group, sr.field(), fr.r)?;
    let source = if weights.is_some() { "weighted_hilbert" } else { "level_dim_formula" };
    let mut report = Report::new("invariants", vec!["k", "invariant_dim", "expected", "source", "match"])
        .echo("q", fr.q)
        .echo("r", fr.r)
        .echo("k", range_echo(&k))
        .echo("group", group);
    report.extra("order", g.order(caps)?);
    let mut passed = true;
    for k in k {
        let dim = sr.invariant_dim(&g, k, caps)? as u64;
        let expected = match &weights {
            Some(w) => Some(satake::weighted_hilbert(w, k as u64)?),
            // No closed formula outside the unipotent case.
            None => match satake::level_dim_formula(&g, k as u64, caps) {
                Ok(v) => Some(v),
                Err(Error::NotUnipotent) => None,
                Err(e) => return Err(e),
            },
        };
        let matched = expected.map(|e| e == dim);
        passed &= matched.unwrap_or(true);
        report.row(vec![
            ("k", k.into()),
            ("invariant_dim", dim.into()),
            ("expected", expected.map_or(Value::Null, Value::from)),
            ("source", if expected.is_some() { source.into() } else { Value::Null }),
            ("match", matched.map_or(Value::Null, Value::from)),
        ]);
    }
    Ok(Outcome { report, passed })
}

pub fn universal(fr: &FieldRank, k: RangeInclusive<u32>, caps: &Caps) -> Result<Outcome, Error> {
    let sr = satake_ring(fr)?;
    // Fails with a consistency error if a non-q-power coefficient survives.
    let fam = satake::universal_coeffs(&sr, caps)?;
    let q = fr.q as u32;
    let mut report = Report::new("universal", vec!["i", "degree", "coefficient"])
        .echo("q", fr.q)
        .echo("r", fr.r)
        .echo("k", range_echo(&k));
    for (i, c) in fam.coeffs().iter().enumerate() {
        report.row(vec![("i", (i + 1).into()), ("degree", c.degree().into()), ("coefficient", c.to_string().into())]);
    }
    let degrees_ok = fam.degrees().iter().enumerate().all(|(i, &d)| d == q.pow(i as u32 + 1) - 1);
    let top_nonzero = !sr.is_zero(&fam.coeffs()[fr.r - 1])?;
    let gl = SubgroupGens::general_linear(sr.field(), fr.r);
    let mut invariant = true;
    for c in fam.coeffs() {
        invariant &= sr.is_invariant(c, &gl)?;
    }
    let weights: Vec<u64> = fam.degrees().iter().map(|&d| d as u64).collect();
    let mut independent = true;
    for k in k {
        let (dim, _) = satake::weighted_monomial_span(&fam, k, caps)?;
        independent &= dim as u64 == satake::weighted_hilbert(&weights, k as u64)?;
    }
    let flags = [
        ("q_power_support", true),
        ("degrees", degrees_ok),
        ("top_nonzero", top_nonzero),
        ("gl_invariant", invariant),
        ("independent", independent),
    ];
    report.extra("checks", flags.iter().map(|&(n, v)| (n.to_string(), Value::from(v))).collect::<serde_json::Map<_, _>>());
    Ok(Outcome { report, passed: flags.iter().all(|&(_, v)| v) })
}

fn parse_subspace(text: &str, f: &Arc<FieldDesc>, r: usize) -> Result<MatrixFq, Error> {
    let rows: Vec<Vec<u32>> = text
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|row| row.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).map(|t| f.parse_value(t)).collect())
        .collect::<Result<_, _>>()?;
    if rows.is_empty() || rows.iter().any(|row| row.len() != r) {
        return Err(Error::Parse(format!("subspace rows must have {r} entries each")));
    }
    MatrixFq::from_values(f, rows.len(), r, rows.concat())
}

pub fn strata(fr: &FieldRank, subspace: &str, caps: &Caps) -> Result<Outcome, Error> {
    let sr = satake_ring(fr)?;
    let basis = parse_subspace(subspace, sr.field(), fr.r)?;
    let fam = satake::universal_coeffs(&sr, caps)?;
    let spec = satake::specialize_stratum(&fam, &basis)?;
    let dim = spec.ring.rank();
    let lower = satake::universal_coeffs(&spec.ring, caps)?;
    let mut report = Report::new("strata", vec!["i", "coefficient", "expected", "match"])
        .echo("q", fr.q)
        .echo("r", fr.r)
        .echo("subspace", subspace);
    let mut passed = spec.rank == dim;
    for (i, c) in spec.coeffs.iter().enumerate() {
        let got = c.to_string();
        let want = lower.coeffs().get(i).map_or_else(|| "0".to_string(), ToString::to_string);
        passed &= got == want;
        report.row(vec![
            ("i", (i + 1).into()),
            ("coefficient", got.clone().into()),
            ("expected", want.clone().into()),
            ("match", (got == want).into()),
        ]);
    }
    report.extra("rank", spec.rank);
    report.extra("dimension", dim);
    Ok(Outcome { report, passed })
}

fn terms_json(h: &HeckeElement) -> Value {
    h.terms().map(|(t, m)| json!({"type": t.to_string(), "mult": m})).collect()
}

pub fn hecke(q: u64, r: Option<usize>, a: &[u32], b: &[u32], caps: &Caps) -> Result<Outcome, Error> {
    field(q)?;
    let rank = r.unwrap_or(a.len());
    if a.len() != rank || b.len() != rank || rank == 0 {
        return Err(Error::DimensionMismatch(format!("types must both have {rank} entries")));
    }
    let (a, b) = (DivisorType::new(a.to_vec())?, DivisorType::new(b.to_vec())?);
    let product = hecke::convolve(q, &a, &b)?;
    let oracle = hecke::hco_expand(q, &a, &b, caps)?;
    let mut report = Report::new("hecke", vec!["type", "mult"])
        .echo("q", q)
        .echo("r", rank)
        .echo("a", a.to_string())
        .echo("b", b.to_string());
    for (t, m) in product.terms() {
        report.row(vec![("type", t.to_string().into()), ("mult", m.into())]);
    }
    report.extra("oracle", terms_json(&oracle));
    report.extra("oracle_match", product == oracle);
    Ok(Outcome { report, passed: product == oracle })
}

pub fn verify(seed: u64, caps: &Caps) -> Result<Outcome, Error> {
    let reports = verify::run_all(caps, seed)?;
    let mut report = Report::new("verify", vec!["criterion", "title", "passed", "cases", "failures", "first_failure"]);
    let passed = reports.iter().all(verify::CheckReport::passed);
    for rep in reports {
        report.row(vec![
            ("criterion", rep.criterion.into()),
            ("title", rep.title.into()),
            ("passed", rep.passed().into()),
            ("cases", rep.cases.into()),
            ("failures", rep.failures.len().into()),
            ("first_failure", rep.failures.first().cloned().map_or(Value::Null, Value::from)),
        ]);
    }
    Ok(Outcome { report, passed })
}
