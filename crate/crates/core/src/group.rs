//! Finite subgroups of `GL_r(F_q)` given by generators.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::sync::Arc;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::field::FieldDesc;
use crate::linalg::MatrixFq;

/// A subgroup of `GL_r(F_q)` presented by invertible generators.
#[derive(Debug, Clone)]
pub struct SubgroupGens {
    field: Arc<FieldDesc>,
    rank: usize,
    gens: Vec<MatrixFq>,
}

fn transvection(field: &Arc<FieldDesc>, r: usize, i: usize, j: usize, a: u32) -> MatrixFq {
    let mut m = MatrixFq::identity(field, r);
    m.set_value(i, j, a);
    m
}

/// `F_p`-basis `1, w, …, w^{m-1}` of `F_q` as raw values.
fn additive_basis(field: &FieldDesc) -> Vec<u32> {
    (0..field.degree()).map(|k| field.characteristic().pow(k)).collect()
}

impl SubgroupGens {
    pub fn new(field: &Arc<FieldDesc>, rank: usize, gens: Vec<MatrixFq>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::Invalid("rank must be positive".into()));
        }
        for g in &gens {
            if **g.field() != **field {
                return Err(Error::FieldMismatch);
            }
            if g.nrows() != rank || g.ncols() != rank {
                return Err(Error::DimensionMismatch(format!("generator is not {rank}x{rank}")));
            }
            if !g.is_invertible() {
                return Err(Error::SingularMatrix);
            }
        }
        Ok(SubgroupGens { field: field.clone(), rank, gens })
    }

    pub fn trivial(field: &Arc<FieldDesc>, rank: usize) -> Self {
        SubgroupGens { field: field.clone(), rank, gens: Vec::new() }
    }

    /// `GL_r(F_q)`: elementary transvections and one primitive diagonal entry.
    pub fn general_linear(field: &Arc<FieldDesc>, rank: usize) -> Self {
        let mut g = Self::special_linear(field, rank);
        if field.size() > 2 {
            let mut d = MatrixFq::identity(field, rank);
            d.set_value(0, 0, field.primitive());
            g.gens.push(d);
        }
        g
    }

    /// `SL_r(F_q)`, generated by elementary transvections.
    pub fn special_linear(field: &Arc<FieldDesc>, rank: usize) -> Self {
        let mut gens = Vec::new();
        for i in 0..rank {
            for j in 0..rank {
                if i != j {
                    for &a in &additive_basis(field) {
                        gens.push(transvection(field, rank, i, j, a));
                    }
                }
            }
        }
        SubgroupGens { field: field.clone(), rank, gens }
    }

    /// Upper unitriangular matrices.
    pub fn upper_unipotent(field: &Arc<FieldDesc>, rank: usize) -> Self {
        let mut gens = Vec::new();
        for i in 0..rank {
            for j in i + 1..rank {
                for &a in &additive_basis(field) {
                    gens.push(transvection(field, rank, i, j, a));
                }
            }
        }
        SubgroupGens { field: field.clone(), rank, gens }
    }

    /// `J_s`: elements whose first `s` columns agree with the identity.
    pub fn first_columns_fixed(field: &Arc<FieldDesc>, rank: usize, s: usize) -> Self {
        let mut gens = Vec::new();
        for j in s..rank {
            for i in 0..rank {
                if i != j {
                    for &a in &additive_basis(field) {
                        gens.push(transvection(field, rank, i, j, a));
                    }
                }
            }
            if field.size() > 2 {
                let mut d = MatrixFq::identity(field, rank);
                d.set_value(j, j, field.primitive());
                gens.push(d);
            }
        }
        SubgroupGens { field: field.clone(), rank, gens }
    }

    pub fn field(&self) -> &Arc<FieldDesc> {
        &self.field
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[MatrixFq] {
        &self.gens
    }

    /// Every element, by breadth-first closure, sorted.
    pub fn elements(&self, caps: &Caps) -> Result<Vec<MatrixFq>> {
        let id = MatrixFq::identity(&self.field, self.rank);
        let mut seen: HashSet<MatrixFq> = HashSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in &self.gens {
                let y = x.try_mul(g)?;
                if seen.insert(y.clone()) {
                    caps.check_group(seen.len())?;
                    queue.push_back(y);
                }
            }
        }
        let mut out: Vec<MatrixFq> = seen.into_iter().collect();
        out.sort();
        Ok(out)
    }

    pub fn order(&self, caps: &Caps) -> Result<usize> {
        self.elements(caps).map(|e| e.len())
    }
}

/// Result of [`double_cosets`]: one representative and class size per class.
#[derive(Debug, Clone)]
pub struct DoubleCosets {
    pub representatives: Vec<MatrixFq>,
    pub sizes: Vec<usize>,
}

impl DoubleCosets {
    pub fn count(&self) -> usize {
        self.representatives.len()
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi] = lo;
    }
}

/// Partition of `G` into classes `H·g·J`.
pub fn double_cosets(
    h: &SubgroupGens,
    g: &SubgroupGens,
    j: &SubgroupGens,
    caps: &Caps,
) -> Result<DoubleCosets> {
    let elems = g.elements(caps)?;
    let index: HashMap<&MatrixFq, usize> = elems.iter().enumerate().map(|(i, x)| (x, i)).collect();
    for gen in h.generators().iter().chain(j.generators()) {
        if !index.contains_key(gen) {
            return Err(Error::NotSubgroup);
        }
    }
    let mut parent: Vec<usize> = (0..elems.len()).collect();
    for (i, x) in elems.iter().enumerate() {
        for a in h.generators() {
            union(&mut parent, i, index[&a.try_mul(x)?]);
        }
        for b in j.generators() {
            union(&mut parent, i, index[&x.try_mul(b)?]);
        }
    }
    let mut classes: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..elems.len() {
        *classes.entry(find(&mut parent, i)).or_default() += 1;
    }
    let total: usize = classes.values().sum();
    if total != elems.len() {
        return Err(Error::Consistency("double coset sizes do not add up".into()));
    }
    Ok(DoubleCosets {
        representatives: classes.keys().map(|&i| elems[i].clone()).collect(),
        sizes: classes.values().copied().collect(),
    })
}

/// Whether every element `g` satisfies `(g - 1)^r = 0`.
pub fn is_fine_image(k: &SubgroupGens, caps: &Caps) -> Result<bool> {
    let id = MatrixFq::identity(k.field(), k.rank());
    for g in k.elements(caps)? {
        if !g.try_sub(&id)?.pow(k.rank() as u64)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Representatives `h` of the right cosets `sub·h` in `sup`.
pub fn right_coset_reps(sub: &SubgroupGens, sup: &SubgroupGens, caps: &Caps) -> Result<Vec<MatrixFq>> {
    let big = sup.elements(caps)?;
    let small = sub.elements(caps)?;
    let big_set: HashSet<&MatrixFq> = big.iter().collect();
    if small.iter().any(|x| !big_set.contains(x)) {
        return Err(Error::NotSubgroup);
    }
    let mut covered: HashSet<MatrixFq> = HashSet::new();
    let mut reps = Vec::new();
    for h in &big {
        if covered.contains(h) {
            continue;
        }
        for s in &small {
            covered.insert(s.try_mul(h)?);
        }
        reps.push(h.clone());
    }
    Ok(reps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fld(q: u64) -> Arc<FieldDesc> {
        FieldDesc::with_order(q).unwrap()
    }

    fn gl_order(q: usize, r: u32) -> usize {
        (0..r).map(|i| q.pow(r) - q.pow(i)).product()
    }

    #[test]
    fn gl_orders() {
        let caps = Caps::default();
        for (q, r) in [(2, 1), (2, 2), (3, 2), (4, 2), (2, 3), (5, 2)] {
            let g = SubgroupGens::general_linear(&fld(q as u64), r as usize);
            assert_eq!(g.order(&caps).unwrap(), gl_order(q, r), "GL_{r}(F_{q})");
        }
    }

    #[test]
    fn sl_and_unipotent_orders() {
        let caps = Caps::default();
        for (q, r) in [(2usize, 2u32), (3, 2), (4, 2), (2, 3)] {
            let f = fld(q as u64);
            let sl = SubgroupGens::special_linear(&f, r as usize);
            assert_eq!(sl.order(&caps).unwrap(), gl_order(q, r) / (q - 1));
            let u = SubgroupGens::upper_unipotent(&f, r as usize);
            assert_eq!(u.order(&caps).unwrap(), q.pow(r * (r - 1) / 2));
        }
        assert_eq!(SubgroupGens::trivial(&fld(4), 3).order(&caps).unwrap(), 1);
    }

    #[test]
    fn closure_is_a_group() {
        let caps = Caps::default();
        let f = fld(3);
        let g = SubgroupGens::special_linear(&f, 2);
        let elems = g.elements(&caps).unwrap();
        let set: HashSet<&MatrixFq> = elems.iter().collect();
        assert!(set.contains(&MatrixFq::identity(&f, 2)));
        for a in &elems {
            assert!(set.contains(&a.inverse().unwrap()));
            for b in elems.iter().step_by(5) {
                assert!(set.contains(&a.try_mul(b).unwrap()));
            }
        }
    }

    #[test]
    fn j_s_fixes_columns() {
        let caps = Caps::default();
        let f = fld(2);
        for s in 0..=3 {
            let j = SubgroupGens::first_columns_fixed(&f, 3, s);
            let elems = j.elements(&caps).unwrap();
            for e in &elems {
                for c in 0..s {
                    for i in 0..3 {
                        assert_eq!(e.value(i, c), u32::from(i == c));
                    }
                }
            }
            // |J_s| = |GL_3| / #(injective choices of the first s columns)
            let choices: usize = (0..s as u32).map(|i| 8 - 2usize.pow(i)).product();
            assert_eq!(elems.len(), 168 / choices);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let caps = Caps { group: 10, ..Caps::default() };
        let g = SubgroupGens::general_linear(&fld(3), 2);
        assert!(matches!(g.elements(&caps), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn double_coset_examples() {
        let caps = Caps::default();
        let f = fld(3);
        let gl = SubgroupGens::general_linear(&f, 2);
        let one = double_cosets(&gl, &gl, &gl, &caps).unwrap();
        assert_eq!(one.count(), 1);
        let triv = SubgroupGens::trivial(&f, 2);
        let all = double_cosets(&triv, &gl, &triv, &caps).unwrap();
        assert_eq!(all.count(), 48);
        let u = SubgroupGens::upper_unipotent(&f, 2);
        let j1 = SubgroupGens::first_columns_fixed(&f, 2, 1);
        let dc = double_cosets(&u, &gl, &j1, &caps).unwrap();
        assert_eq!(dc.count(), 4);
        assert_eq!(dc.sizes.iter().sum::<usize>(), 48);
    }

    #[test]
    fn double_cosets_reject_foreign_subgroup() {
        let caps = Caps::default();
        let f = fld(3);
        let sl = SubgroupGens::special_linear(&f, 2);
        let gl = SubgroupGens::general_linear(&f, 2);
        assert_eq!(double_cosets(&gl, &sl, &sl, &caps).unwrap_err(), Error::NotSubgroup);
    }

    #[test]
    fn fineness() {
        let caps = Caps::default();
        let f2 = fld(2);
        assert!(is_fine_image(&SubgroupGens::trivial(&f2, 2), &caps).unwrap());
        assert!(is_fine_image(&SubgroupGens::upper_unipotent(&f2, 2), &caps).unwrap());
        assert!(!is_fine_image(&SubgroupGens::general_linear(&f2, 2), &caps).unwrap());
        assert!(is_fine_image(&SubgroupGens::upper_unipotent(&fld(4), 3), &caps).unwrap());
    }

    #[test]
    fn coset_reps_count_index() {
        let caps = Caps::default();
        let f = fld(3);
        let sl = SubgroupGens::special_linear(&f, 2);
        let gl = SubgroupGens::general_linear(&f, 2);
        assert_eq!(right_coset_reps(&sl, &gl, &caps).unwrap().len(), 2);
    }
}
