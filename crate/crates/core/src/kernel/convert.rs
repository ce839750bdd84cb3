use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::dd::{cone_generators, ConeRow};
use super::{Constraint, HRep, VRep};
use crate::error::{Error, Result};
use crate::rat::{Rat, RatVec};

/// Default cap on intermediate double-description rays.
pub const DEFAULT_RAY_CAP: usize = 2_000_000;

/// Full generator description of an H-polyhedron.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generators {
    pub vertices: Vec<RatVec>,
    pub rays: Vec<RatVec>,
    pub lineality: Vec<RatVec>,
}

fn to_ratvec(v: &[BigInt]) -> RatVec {
    v.iter().cloned().map(Rat::from_bigint).collect()
}

/// Vertices, extreme rays and lineality of `H`. Fails with `Infeasible`
/// when `H` is empty.
pub fn h_to_v_full(h: &HRep) -> Result<Generators> {
    h_to_v_full_capped(h, DEFAULT_RAY_CAP)
}

fn h_to_v_full_capped(h: &HRep, cap: usize) -> Result<Generators> {
    let d = h.dim + 1;
    let mut rows = Vec::with_capacity(h.inequalities.len() + h.equations.len() + 1);
    // homogenized coordinates (x0, x): a·x ≤ b x0 becomes b x0 - a·x ≥ 0
    for e in &h.equations {
        let mut r = vec![-&e.b];
        r.extend(e.a.iter().cloned());
        rows.push(ConeRow::from_rats(&r, true));
    }
    let mut x0 = vec![Rat::zero(); d];
    x0[0] = Rat::one();
    rows.push(ConeRow::from_rats(&x0, false));
    for c in &h.inequalities {
        let mut r = vec![c.b.clone()];
        r.extend(c.a.iter().map(|x| -x));
        rows.push(ConeRow::from_rats(&r, false));
    }
    let g = cone_generators(d, &rows, cap)?;

    let mut vertices = Vec::new();
    let mut rays = Vec::new();
    for r in &g.rays {
        if r[0].is_positive() {
            let den = Rat::from_bigint(r[0].clone());
            vertices.push(r[1..].iter().map(|x| Rat::from_bigint(x.clone()) / &den).collect::<RatVec>());
        } else {
            debug_assert!(r[0].is_zero());
            rays.push(to_ratvec(&r[1..]));
        }
    }
    if vertices.is_empty() {
        return Err(Error::Infeasible);
    }
    let lineality = g
        .lineality
        .iter()
        .map(|l| {
            debug_assert!(l[0].is_zero());
            to_ratvec(&l[1..])
        })
        .collect();
    vertices.sort();
    rays.sort();
    Ok(Generators { vertices, rays, lineality })
}

/// Vertex enumeration. Lineality is returned in the V-representation;
/// extreme rays make the call fail with `Unbounded`.
pub fn h_to_v(h: &HRep) -> Result<VRep> {
    h_to_v_with_cap(h, DEFAULT_RAY_CAP)
}

pub fn h_to_v_with_cap(h: &HRep, cap: usize) -> Result<VRep> {
    let g = h_to_v_full_capped(h, cap)?;
    if !g.rays.is_empty() {
        return Err(Error::Unbounded { rays: g.rays.len() });
    }
    VRep::new(h.dim, g.vertices, g.lineality)
}

/// Reduced row echelon form over the rationals; returns the nonzero rows
/// and their pivot columns. Pivots are searched among the first `ncols`
/// columns only.
fn rref(mut m: Vec<Vec<Rat>>, ncols: usize) -> (Vec<Vec<Rat>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pr = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pr) {
                    if !y.is_zero() {
                        *x = &*x - &f * y;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

/// Dimension of the affine hull of `points` (`None` for an empty set).
pub fn affine_dimension(points: &[&RatVec]) -> Option<usize> {
    let (first, rest) = points.split_first()?;
    let rows: Vec<Vec<Rat>> = rest.iter().map(|p| (*p - *first).into_entries()).collect();
    if rows.is_empty() {
        return Some(0);
    }
    Some(rref(rows, first.dim()).1.len())
}

/// Facet description of `conv(vertices) + span(lineality)`.
///
/// Equations come out in reduced echelon form (primitive, positive leading
/// entry); inequality normals are reduced against the equations and scaled
/// to primitive integers. The result is irredundant and sorted.
pub fn v_to_h(p: &VRep) -> Result<HRep> {
    let n = p.dim;
    let d = n + 1;
    // valid inequality α·x ≤ β  <=>  β - α·v ≥ 0 for all v, α·l = 0 for all l
    // cone coordinates are (α, β)
    let mut rows = Vec::with_capacity(p.vertices.len() + p.lineality.len());
    for l in &p.lineality {
        let mut r: Vec<Rat> = l.iter().cloned().collect();
        r.push(Rat::zero());
        rows.push(ConeRow::from_rats(&r, true));
    }
    for v in &p.vertices {
        let mut r: Vec<Rat> = v.iter().map(|x| -x).collect();
        r.push(Rat::one());
        rows.push(ConeRow::from_rats(&r, false));
    }
    let g = cone_generators(d, &rows, DEFAULT_RAY_CAP)?;

    let eq_rows: Vec<Vec<Rat>> =
        g.lineality.iter().map(|l| l.iter().cloned().map(Rat::from_bigint).collect()).collect();
    let (eq_rref, pivots) = rref(eq_rows, n);

    let reduce = |mut row: Vec<Rat>| -> Vec<Rat> {
        for (e, &pc) in eq_rref.iter().zip(&pivots) {
            if !row[pc].is_zero() {
                let f = row[pc].clone();
                for (x, y) in row.iter_mut().zip(e) {
                    if !y.is_zero() {
                        *x = &*x - &f * y;
                    }
                }
            }
        }
        row
    };

    let mut equations: Vec<Constraint> = eq_rref
        .iter()
        .map(|row| Constraint::new(row[..n].iter().cloned().collect(), row[n].clone()).canonical_equation())
        .collect();
    equations.sort();

    let mut inequalities = Vec::with_capacity(g.rays.len());
    for r in &g.rays {
        let row = reduce(r.iter().cloned().map(Rat::from_bigint).collect());
        let a: RatVec = row[..n].iter().cloned().collect();
        if a.is_zero() {
            continue;
        }
        inequalities.push(Constraint::new(a, row[n].clone()).canonical_inequality());
    }
    inequalities.sort();
    inequalities.dedup();
    HRep::new(n, inequalities, equations)
}
