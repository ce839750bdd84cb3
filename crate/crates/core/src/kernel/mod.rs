//! Polyhedral representations and the exact conversions between them.
//!
//! [`VRep`] stores vertices plus a lineality space, [`HRep`] stores
//! inequalities `a·x ≤ b` and equations `a·x = b`. Conversion in both
//! directions goes through one integer double-description engine
//! ([`dd`]), projection through equation substitution followed by
//! Fourier–Motzkin elimination ([`project`]).

mod bits;
mod convert;
pub(crate) mod dd;
pub mod io;
mod project;

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::{Rat, RatVec};

pub(crate) use bits::Bits;
pub use convert::{affine_dimension, h_to_v, h_to_v_full, h_to_v_with_cap, v_to_h, Generators, DEFAULT_RAY_CAP};
pub use project::{project, remove_redundant};

/// A single linear constraint `a·x ≤ b` (or `a·x = b` when stored as an
/// equation).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Constraint {
    pub a: RatVec,
    pub b: Rat,
}

impl Constraint {
    pub fn new(a: RatVec, b: Rat) -> Self {
        Constraint { a, b }
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn support(&self) -> Vec<usize> {
        self.a.support()
    }

    pub fn slack(&self, x: &RatVec) -> Rat {
        &self.b - self.a.dot(x)
    }

    pub fn satisfied_by(&self, x: &RatVec) -> bool {
        self.a.dot(x) <= self.b
    }

    pub fn tight_at(&self, x: &RatVec) -> bool {
        self.a.dot(x) == self.b
    }

    /// Positive rescaling so that `a` is a primitive integer vector.
    pub fn canonical_inequality(&self) -> Constraint {
        if self.a.is_zero() {
            let b = Rat::from_int(self.b.signum() as i64);
            return Constraint::new(self.a.clone(), b);
        }
        let ints = self.a.primitive_integer();
        // ints = a * s for some positive rational s; recover s from any nonzero entry.
        let i = ints.iter().position(|x| !x.is_zero()).expect("nonzero normal");
        let s = Rat::from_bigint(ints[i].clone()) / &self.a[i];
        Constraint::new(
            ints.into_iter().map(Rat::from_bigint).collect(),
            &self.b * &s,
        )
    }

    /// Primitive integer normal with a positive leading nonzero entry.
    pub fn canonical_equation(&self) -> Constraint {
        let c = self.canonical_inequality();
        match c.a.iter().find(|x| !x.is_zero()) {
            Some(lead) if lead.is_negative() => c.negated(),
            _ => c,
        }
    }

    pub fn negated(&self) -> Constraint {
        Constraint::new(self.a.iter().map(|x| -x).collect(), -&self.b)
    }

    pub fn integer_normal(&self) -> Vec<BigInt> {
        self.a.primitive_integer()
    }
}

impl std::fmt::Debug for Constraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}·x ≤ {}", self.a, self.b)
    }
}

/// Inequality/equation description of a polyhedron.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HRep {
    pub dim: usize,
    pub inequalities: Vec<Constraint>,
    #[serde(default)]
    pub equations: Vec<Constraint>,
}

impl HRep {
    pub fn new(dim: usize, inequalities: Vec<Constraint>, equations: Vec<Constraint>) -> Result<Self> {
        for c in inequalities.iter().chain(&equations) {
            if c.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: c.dim() });
            }
        }
        Ok(HRep { dim, inequalities, equations })
    }

    pub fn from_inequalities(dim: usize, inequalities: Vec<Constraint>) -> Result<Self> {
        Self::new(dim, inequalities, Vec::new())
    }

    /// `{x : lo ≤ x ≤ hi}` as `-x_i ≤ -lo_i`, `x_i ≤ hi_i`.
    pub fn boxed(lo: &RatVec, hi: &RatVec) -> Self {
        let dim = lo.dim();
        let mut ineqs = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            ineqs.push(Constraint::new(&RatVec::unit(dim, i) * &Rat::from_int(-1), -&lo[i]));
            ineqs.push(Constraint::new(RatVec::unit(dim, i), hi[i].clone()));
        }
        HRep { dim, inequalities: ineqs, equations: Vec::new() }
    }

    pub fn unit_cube(dim: usize) -> Self {
        Self::boxed(&RatVec::zeros(dim), &RatVec::ones(dim))
    }

    pub fn member(&self, x: &RatVec) -> Result<bool> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.dim() });
        }
        Ok(self.inequalities.iter().all(|c| c.satisfied_by(x))
            && self.equations.iter().all(|c| c.tight_at(x)))
    }

    /// Intersection with another system of the same dimension.
    pub fn intersect(&self, other: &HRep) -> Result<HRep> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let mut out = self.clone();
        out.inequalities.extend(other.inequalities.iter().cloned());
        out.equations.extend(other.equations.iter().cloned());
        Ok(out)
    }

    /// Canonicalize every row and drop exact duplicates, keeping first
    /// occurrences in order.
    pub fn deduplicated(&self) -> HRep {
        let mut seen = HashSet::new();
        let inequalities = self
            .inequalities
            .iter()
            .map(Constraint::canonical_inequality)
            .filter(|c| !(c.a.is_zero() && !c.b.is_negative()))
            .filter(|c| seen.insert(c.clone()))
            .collect();
        let mut seen = HashSet::new();
        let equations = self
            .equations
            .iter()
            .map(Constraint::canonical_equation)
            .filter(|c| !(c.a.is_zero() && c.b.is_zero()))
            .filter(|c| seen.insert(c.clone()))
            .collect();
        HRep { dim: self.dim, inequalities, equations }
    }

    /// Largest support over inequalities and equations.
    pub fn max_support(&self) -> usize {
        self.inequalities
            .iter()
            .chain(&self.equations)
            .map(|c| c.support().len())
            .max()
            .unwrap_or(0)
    }

    /// Equations expanded into pairs of opposite inequalities.
    pub fn as_inequalities(&self) -> Vec<Constraint> {
        let mut out = self.inequalities.clone();
        for e in &self.equations {
            out.push(e.clone());
            out.push(e.negated());
        }
        out
    }
}

/// Vertex-plus-lineality description `conv(vertices) + span(lineality)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VRep {
    pub dim: usize,
    pub vertices: Vec<RatVec>,
    #[serde(default)]
    pub lineality: Vec<RatVec>,
}

impl VRep {
    /// Validates dimensions and drops duplicate vertices (first occurrence
    /// wins).
    pub fn new(dim: usize, vertices: Vec<RatVec>, lineality: Vec<RatVec>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Precondition("V-representation needs at least one vertex".into()));
        }
        for v in vertices.iter().chain(&lineality) {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: v.dim() });
            }
        }
        if lineality.iter().any(RatVec::is_zero) {
            return Err(Error::Precondition("lineality generators must be nonzero".into()));
        }
        let mut seen = HashSet::new();
        let vertices = vertices.into_iter().filter(|v| seen.insert(v.clone())).collect();
        Ok(VRep { dim, vertices, lineality })
    }

    pub fn from_points(dim: usize, points: Vec<RatVec>) -> Result<Self> {
        Self::new(dim, points, Vec::new())
    }

    pub fn is_bounded(&self) -> bool {
        self.lineality.is_empty()
    }

    pub fn max_vertex_norm_sq(&self) -> Rat {
        self.vertices.iter().map(RatVec::norm_sq).max().unwrap_or_default()
    }

    /// Orthogonal projection onto the coordinates in `idx` (in that order).
    pub fn project(&self, idx: &[usize]) -> VRep {
        let vertices: Vec<RatVec> = self.vertices.iter().map(|v| v.select(idx)).collect();
        let lineality: Vec<RatVec> = self
            .lineality
            .iter()
            .map(|l| l.select(idx))
            .filter(|l| !l.is_zero())
            .collect();
        VRep::new(idx.len(), vertices, lineality).expect("projection of a valid V-representation")
    }

    /// Vertices sorted lexicographically, the canonical order used in
    /// outputs.
    pub fn sorted(mut self) -> VRep {
        self.vertices.sort();
        self
    }
}

fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        Err(Error::DimensionMismatch { expected, got })
    } else {
        Ok(())
    }
}

pub fn member(h: &HRep, x: &RatVec) -> Result<bool> {
    h.member(x)
}

/// `B ⊆ A`: every vertex of `B` satisfies `A`, and every lineality
/// generator of `B` lies in the lineality space of `A`.
pub fn contains(a: &HRep, b: &VRep) -> Result<bool> {
    check_dims(a.dim, b.dim)?;
    for v in &b.vertices {
        if !a.member(v)? {
            return Ok(false);
        }
    }
    for l in &b.lineality {
        let in_recession = a.inequalities.iter().all(|c| c.a.dot(l).is_zero())
            && a.equations.iter().all(|c| c.a.dot(l).is_zero());
        if !in_recession {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Set equality by mutual containment after converting each side.
pub fn equal_sets(a: &HRep, b: &VRep) -> Result<bool> {
    check_dims(a.dim, b.dim)?;
    if !contains(a, b)? {
        return Ok(false);
    }
    let a_gens = match h_to_v_full(a) {
        Ok(g) => g,
        Err(Error::Infeasible) => return Ok(false),
        Err(e) => return Err(e),
    };
    if !a_gens.rays.is_empty() {
        return Ok(false);
    }
    let b_h = v_to_h(b)?;
    let a_v = VRep::new(a.dim, a_gens.vertices, a_gens.lineality)?;
    contains(&b_h, &a_v)
}

pub fn equal_hreps(a: &HRep, b: &HRep) -> Result<bool> {
    check_dims(a.dim, b.dim)?;
    let bv = h_to_v(b)?;
    equal_sets(a, &bv)
}

pub fn equal_vreps(a: &VRep, b: &VRep) -> Result<bool> {
    check_dims(a.dim, b.dim)?;
    let ah = v_to_h(a)?;
    equal_sets(&ah, b)
}
