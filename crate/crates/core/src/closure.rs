//! k-sparse closures.
//!
//! `P^k = ⋂_{|I|=k} (P + ℝ^Ī)`. Each term is computed by projecting the
//! vertices of `P` onto the coordinates in `I`, taking the facets of the
//! projection and lifting them back with zeros outside `I`. The closure is
//! the intersection of all terms with the bounding box, reduced to its
//! facets. Coordinates are 0-based throughout.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use num_bigint::BigInt;
use num_traits::Pow;
use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{affine_dimension, contains, h_to_v_with_cap, io, v_to_h, Constraint, HRep, VRep, DEFAULT_RAY_CAP};
use crate::rat::{Rat, RatVec};
use crate::rng;

/// Largest number of supports enumerated by [`sparse_closure`].
pub const MAX_SUPPORTS: u128 = 1_000_000;

/// Sorted set of distinct coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SupportSet(Vec<usize>);

impl SupportSet {
    pub fn new(mut indices: Vec<usize>, n: usize) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if indices.is_empty() {
            return Err(Error::Precondition("support set must be nonempty".into()));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
            return Err(Error::Precondition(format!("coordinate {bad} out of range for n = {n}")));
        }
        Ok(SupportSet(indices))
    }

    pub fn full(n: usize) -> Self {
        SupportSet((0..n).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }
}

/// Where a closure row came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Support,
    Box,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub support: SupportSet,
    pub source: Source,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClosureResult {
    pub closure: HRep,
    /// One entry per inequality of `closure`, same order.
    pub provenance: Vec<Provenance>,
    /// One entry per equation of `closure`, same order.
    pub equation_provenance: Vec<Provenance>,
    pub k: usize,
    pub lo: RatVec,
    pub hi: RatVec,
    /// Set when only some supports were intersected.
    pub outer_approximation: bool,
    /// Vertices of the closure when they were computed along the way.
    #[serde(skip)]
    pub vertices: Option<VRep>,
}

#[derive(Serialize)]
struct SidecarRow<'a> {
    kind: &'static str,
    index: usize,
    support: &'a SupportSet,
    source: &'a Source,
}

impl ClosureResult {
    /// Writes `<stem>.hrep.json` and the provenance sidecar `<stem>.prov.json`.
    pub fn save(&self, stem: impl AsRef<Path>) -> Result<()> {
        let stem = stem.as_ref().to_string_lossy().into_owned();
        io::save_json(format!("{stem}.hrep.json"), &self.closure)?;
        let rows: Vec<SidecarRow> = self
            .provenance
            .iter()
            .enumerate()
            .map(|(index, p)| SidecarRow { kind: "inequality", index, support: &p.support, source: &p.source })
            .chain(self.equation_provenance.iter().enumerate().map(|(index, p)| SidecarRow {
                kind: "equation",
                index,
                support: &p.support,
                source: &p.source,
            }))
            .collect();
        io::save_json(format!("{stem}.prov.json"), &rows)
    }

    /// Vertices of the closure, computing them if needed.
    pub fn vertex_set(&self) -> Result<VRep> {
        match &self.vertices {
            Some(v) => Ok(v.clone()),
            None => h_to_v_with_cap(&self.closure, DEFAULT_RAY_CAP),
        }
    }
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else { break };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
    out
}

/// The `rank`-th `k`-subset of `0..n` in lexicographic order.
pub fn unrank_subset(n: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for slot in 0..k {
        let mut c = next;
        loop {
            let below = binomial(n - c - 1, k - slot - 1);
            if rank < below {
                break;
            }
            rank -= below;
            c += 1;
        }
        out.push(c);
        next = c + 1;
    }
    out
}

fn check_bounded(p: &VRep) -> Result<()> {
    if !p.is_bounded() {
        return Err(Error::Precondition("polytope must be bounded".into()));
    }
    Ok(())
}

/// H-representation of `P + ℝ^Ī`.
pub fn free_term(p: &VRep, support: &SupportSet) -> Result<HRep> {
    check_bounded(p)?;
    let idx = support.indices();
    let projected = p.project(idx);
    let h = v_to_h(&projected)?;
    let lift = |c: &Constraint| Constraint::new(c.a.lift(idx, p.dim), c.b.clone());
    HRep::new(p.dim, h.inequalities.iter().map(lift).collect(), h.equations.iter().map(lift).collect())
}

fn check_box(p: &VRep, lo: &RatVec, hi: &RatVec) -> Result<()> {
    if lo.dim() != p.dim || hi.dim() != p.dim {
        return Err(Error::DimensionMismatch { expected: p.dim, got: lo.dim().min(hi.dim()) });
    }
    if lo.iter().zip(hi.iter()).any(|(l, h)| l > h) {
        return Err(Error::Precondition("box lower bound exceeds upper bound".into()));
    }
    if !contains(&HRep::boxed(lo, hi), p)? {
        return Err(Error::Precondition("polytope is not contained in the box".into()));
    }
    Ok(())
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::Precondition(format!("k must lie in 1..={n}, got {k}")));
    }
    Ok(())
}

fn box_rows(lo: &RatVec, hi: &RatVec) -> Vec<(Constraint, Provenance)> {
    let n = lo.dim();
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        let prov = Provenance { support: SupportSet(vec![i]), source: Source::Box };
        out.push((Constraint::new(RatVec::unit(n, i), hi[i].clone()), prov.clone()));
        out.push((Constraint::new(RatVec::unit(n, i).scale(&-Rat::one()), -&lo[i]), prov));
    }
    out
}

type Rows = Vec<(Constraint, Provenance)>;

/// Box rows followed by the facets of each term, canonicalized and
/// deduplicated in that order.
fn candidate_rows(p: &VRep, lo: &RatVec, hi: &RatVec, supports: &[SupportSet]) -> Result<(Vec<HRep>, Rows, Rows)> {
    let terms: Vec<HRep> = supports.par_iter().map(|s| free_term(p, s)).collect::<Result<_>>()?;

    let mut ineqs: Rows = Vec::new();
    let mut eqs: Rows = Vec::new();
    let mut seen_ineq = HashSet::new();
    let mut seen_eq = HashSet::new();
    for (c, prov) in box_rows(lo, hi) {
        let c = c.canonical_inequality();
        if seen_ineq.insert(c.clone()) {
            ineqs.push((c, prov));
        }
    }
    for (s, h) in supports.iter().zip(&terms) {
        let prov = Provenance { support: s.clone(), source: Source::Support };
        for c in &h.inequalities {
            let c = c.canonical_inequality();
            if seen_ineq.insert(c.clone()) {
                ineqs.push((c, prov.clone()));
            }
        }
        for e in &h.equations {
            let e = e.canonical_equation();
            if seen_eq.insert(e.clone()) {
                eqs.push((e, prov.clone()));
            }
        }
    }
    Ok((terms, ineqs, eqs))
}

/// Unreduced description of `P^k ∩ box`: every term's facets plus the box,
/// without vertex enumeration.
pub fn closure_candidates(p: &VRep, k: usize, lo: &RatVec, hi: &RatVec) -> Result<HRep> {
    check_bounded(p)?;
    check_k(p.dim, k)?;
    check_box(p, lo, hi)?;
    let supports = all_supports(p.dim, k)?;
    let (_, ineqs, eqs) = candidate_rows(p, lo, hi, &supports)?;
    Ok(HRep {
        dim: p.dim,
        inequalities: ineqs.into_iter().map(|(c, _)| c).collect(),
        equations: eqs.into_iter().map(|(c, _)| c).collect(),
    })
}

fn all_supports(n: usize, k: usize) -> Result<Vec<SupportSet>> {
    let count = binomial(n, k);
    if count > MAX_SUPPORTS {
        return Err(Error::BudgetExceeded {
            what: "support sets",
            count: usize::try_from(count).unwrap_or(usize::MAX),
            cap: MAX_SUPPORTS as usize,
        });
    }
    Ok(k_subsets(n, k).into_iter().map(SupportSet).collect())
}

/// Intersects the terms for `supports` with the box and keeps one row per
/// facet (first candidate in box-then-support order wins).
fn assemble(
    p: &VRep,
    k: usize,
    lo: &RatVec,
    hi: &RatVec,
    supports: &[SupportSet],
    outer_approximation: bool,
) -> Result<ClosureResult> {
    let (terms, ineqs, mut eqs) = candidate_rows(p, lo, hi, supports)?;
    let mut seen_eq: HashSet<Constraint> = eqs.iter().map(|(c, _)| c.clone()).collect();

    let all = HRep {
        dim: p.dim,
        inequalities: ineqs.iter().map(|(c, _)| c.clone()).collect(),
        equations: eqs.iter().map(|(c, _)| c.clone()).collect(),
    };
    let verts = if supports.len() == 1 && supports[0].k() == p.dim {
        extreme_points(p, &terms[0])
    } else {
        h_to_v_with_cap(&all, DEFAULT_RAY_CAP)?
    };
    let vs: Vec<&RatVec> = verts.vertices.iter().collect();
    let full_dim = affine_dimension(&vs).unwrap_or(0);

    // implicit equalities first, then facets identified by their tight sets
    for (c, prov) in &ineqs {
        if verts.vertices.iter().all(|v| c.tight_at(v)) {
            let e = c.canonical_equation();
            if seen_eq.insert(e.clone()) {
                eqs.push((e, prov.clone()));
            }
        }
    }
    let mut eq_kept: Vec<(Constraint, Provenance)> = Vec::new();
    {
        let mut basis: Vec<Vec<Rat>> = Vec::new();
        for (e, prov) in eqs {
            let mut row: Vec<Rat> = e.a.iter().cloned().collect();
            row.push(e.b.clone());
            let before = linear_rank(&basis);
            basis.push(row);
            if linear_rank(&basis) > before {
                eq_kept.push((e, prov));
            } else {
                basis.pop();
            }
        }
    }

    let mut facets: Vec<(Constraint, Provenance)> = Vec::new();
    let mut tight_seen: HashSet<Vec<usize>> = HashSet::new();
    if full_dim > 0 {
        for (c, prov) in &ineqs {
            let tight: Vec<usize> = (0..vs.len()).filter(|&i| c.tight_at(vs[i])).collect();
            if tight.len() == vs.len() || tight.len() < full_dim {
                continue;
            }
            let tv: Vec<&RatVec> = tight.iter().map(|&i| vs[i]).collect();
            if affine_dimension(&tv) == Some(full_dim - 1) && tight_seen.insert(tight) {
                facets.push((c.clone(), prov.clone()));
            }
        }
    }

    let mut order: Vec<usize> = (0..facets.len()).collect();
    order.sort_by(|&a, &b| facets[a].0.cmp(&facets[b].0));
    let mut eq_order: Vec<usize> = (0..eq_kept.len()).collect();
    eq_order.sort_by(|&a, &b| eq_kept[a].0.cmp(&eq_kept[b].0));

    let closure = HRep {
        dim: p.dim,
        inequalities: order.iter().map(|&i| facets[i].0.clone()).collect(),
        equations: eq_order.iter().map(|&i| eq_kept[i].0.clone()).collect(),
    };
    Ok(ClosureResult {
        closure,
        provenance: order.iter().map(|&i| facets[i].1.clone()).collect(),
        equation_provenance: eq_order.iter().map(|&i| eq_kept[i].1.clone()).collect(),
        k,
        lo: lo.clone(),
        hi: hi.clone(),
        outer_approximation,
        vertices: Some(verts.sorted()),
    })
}

/// Points of `p` whose tight rows in `h` (a description of `conv p`) pin
/// down a single point.
fn extreme_points(p: &VRep, h: &HRep) -> VRep {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for v in &p.vertices {
        if !seen.insert(v.clone()) {
            continue;
        }
        let normals: Vec<Vec<Rat>> = h
            .inequalities
            .iter()
            .filter(|c| c.tight_at(v))
            .chain(&h.equations)
            .map(|c| c.a.iter().cloned().collect())
            .collect();
        if linear_rank(&normals) == p.dim {
            out.push(v.clone());
        }
    }
    VRep { dim: p.dim, vertices: out, lineality: vec![] }
}

fn linear_rank(rows: &[Vec<Rat>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let zero = RatVec::zeros(rows[0].len());
    let pts: Vec<RatVec> = rows.iter().map(|r| RatVec::new(r.clone())).collect();
    let mut refs: Vec<&RatVec> = vec![&zero];
    refs.extend(pts.iter());
    affine_dimension(&refs).unwrap_or(0)
}

/// Exact `P^k ∩ box` over every support of size `k`.
pub fn sparse_closure(p: &VRep, k: usize, lo: &RatVec, hi: &RatVec) -> Result<ClosureResult> {
    check_bounded(p)?;
    check_k(p.dim, k)?;
    check_box(p, lo, hi)?;
    let supports = all_supports(p.dim, k)?;
    assemble(p, k, lo, hi, &supports, false)
}

/// Intersection over `num_supports` supports drawn uniformly without
/// replacement. The result contains `P^k` and is flagged as an outer
/// approximation unless every support was drawn.
pub fn sampled_closure(
    p: &VRep,
    k: usize,
    lo: &RatVec,
    hi: &RatVec,
    num_supports: usize,
    seed: u64,
) -> Result<ClosureResult> {
    check_bounded(p)?;
    check_k(p.dim, k)?;
    check_box(p, lo, hi)?;
    if num_supports == 0 {
        return Err(Error::Precondition("num_supports must be at least 1".into()));
    }
    let supports = sample_supports(p.dim, k, num_supports, seed);
    let total = binomial(p.dim, k);
    assemble(p, k, lo, hi, &supports, (supports.len() as u128) < total)
}

/// Seeded uniform sample of distinct supports, sorted lexicographically.
pub fn sample_supports(n: usize, k: usize, count: usize, seed: u64) -> Vec<SupportSet> {
    let total = binomial(n, k);
    let mut r = rng::derive(seed, "supports");
    let mut out: Vec<Vec<usize>> = if count as u128 >= total {
        k_subsets(n, k)
    } else if total <= 1 << 24 {
        index::sample(&mut r, total as usize, count)
            .into_iter()
            .map(|i| unrank_subset(n, k, i as u128))
            .collect()
    } else {
        let mut set = HashSet::new();
        while set.len() < count {
            let mut s = index::sample(&mut r, n, k).into_vec();
            s.sort_unstable();
            set.insert(s);
        }
        set.into_iter().collect()
    };
    out.sort();
    out.into_iter().map(SupportSet).collect()
}

/// Closure of `{a·x ≤ b} ∩ box` for `a ≥ 0` without vertex enumeration:
/// the rows `a^I·x ≤ b − Σ_{i∉I} aᵢ·loᵢ` (`a` restricted to `I`) plus the
/// box. On `[0,1]ⁿ` these are `a^I·x ≤ b`. Rows implied by the box alone
/// are skipped.
pub fn monotone_halfspace_closure(
    a: &RatVec,
    b: &Rat,
    k: usize,
    lo: &RatVec,
    hi: &RatVec,
) -> Result<ClosureResult> {
    let n = a.dim();
    if let Some(index) = a.iter().position(Rat::is_negative) {
        return Err(Error::NegativeCoefficient { index });
    }
    check_k(n, k)?;
    if lo.dim() != n || hi.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: lo.dim().min(hi.dim()) });
    }
    if &a.dot(lo) > b {
        return Err(Error::Infeasible);
    }
    let mut rows: Vec<(Constraint, Provenance)> = box_rows(lo, hi);
    let mut seen: HashSet<Constraint> = rows.iter().map(|(c, _)| c.canonical_inequality()).collect();
    for s in k_subsets(n, k) {
        let a_i = a.select(&s).lift(&s, n);
        let rhs = b - &(&a.dot(lo) - &a_i.dot(lo));
        if a_i.is_zero() || a_i.dot(hi) <= rhs {
            continue;
        }
        let c = Constraint::new(a_i, rhs).canonical_inequality();
        if seen.insert(c.clone()) {
            rows.push((c, Provenance { support: SupportSet(s), source: Source::Support }));
        }
    }
    rows.sort_by(|x, y| x.0.cmp(&y.0));
    Ok(ClosureResult {
        closure: HRep { dim: n, inequalities: rows.iter().map(|(c, _)| c.clone()).collect(), equations: vec![] },
        provenance: rows.into_iter().map(|(_, p)| p).collect(),
        equation_provenance: vec![],
        k,
        lo: lo.clone(),
        hi: hi.clone(),
        outer_approximation: false,
        vertices: None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FacetAudit {
    pub index: usize,
    pub support_size: usize,
    #[serde(serialize_with = "big_as_string")]
    pub inf_norm: BigInt,
    pub sparse_ok: bool,
    pub norm_ok: bool,
}

fn big_as_string<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub k: usize,
    pub facets: usize,
    pub max_support: usize,
    #[serde(serialize_with = "big_as_string")]
    pub max_inf_norm: BigInt,
    /// Rows failing either check; indices refer to inequalities first,
    /// then equations.
    pub violations: Vec<FacetAudit>,
}

/// Checks every facet normal (as a primitive integer vector) for support
/// at most `k` and `‖ℓ‖_∞ ≤ k^{k/2}`, the latter as `‖ℓ‖_∞² ≤ k^k`.
pub fn facet_normal_audit(c: &ClosureResult) -> AuditReport {
    let k = c.k;
    let bound_sq: BigInt = Pow::pow(BigInt::from(k), k);
    let rows = c.closure.inequalities.iter().chain(&c.closure.equations);
    let mut max_support = 0;
    let mut max_inf_norm = BigInt::from(0);
    let mut violations = Vec::new();
    let mut facets = 0;
    for (index, row) in rows.enumerate() {
        facets += 1;
        let normal = row.integer_normal();
        let support_size = normal.iter().filter(|x| **x != BigInt::from(0)).count();
        let inf_norm = normal.iter().map(|x| if x < &BigInt::from(0) { -x } else { x.clone() }).max().unwrap_or_default();
        let sparse_ok = support_size <= k;
        let norm_ok = &inf_norm * &inf_norm <= bound_sq;
        max_support = max_support.max(support_size);
        if inf_norm > max_inf_norm {
            max_inf_norm = inf_norm.clone();
        }
        if !(sparse_ok && norm_ok) {
            violations.push(FacetAudit { index, support_size, inf_norm, sparse_ok, norm_ok });
        }
    }
    AuditReport { k, facets, max_support, max_inf_norm, violations }
}

/// `[0,1]ⁿ` as a `(lo, hi)` pair.
/// Coordinate-wise bounds of the vertices.
pub fn bounding_box(p: &VRep) -> (RatVec, RatVec) {
    let lo = (0..p.dim).map(|i| p.vertices.iter().map(|v| v[i].clone()).min().expect("nonempty")).collect();
    let hi = (0..p.dim).map(|i| p.vertices.iter().map(|v| v[i].clone()).max().expect("nonempty")).collect();
    (lo, hi)
}

pub fn unit_box(n: usize) -> (RatVec, RatVec) {
    (RatVec::zeros(n), RatVec::ones(n))
}

/// `[-1,1]ⁿ` as a `(lo, hi)` pair.
pub fn symmetric_box(n: usize) -> (RatVec, RatVec) {
    (RatVec::ones(n).scale(&-Rat::one()), RatVec::ones(n))
}

/// Row counts by support size, handy for reports.
pub fn support_histogram(h: &HRep) -> HashMap<usize, usize> {
    let mut m = HashMap::new();
    for c in h.inequalities.iter().chain(&h.equations) {
        *m.entry(c.support().len()).or_insert(0) += 1;
    }
    m
}
