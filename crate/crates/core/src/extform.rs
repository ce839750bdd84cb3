//! Extended formulations and sparse closures in the lifted space.

use serde::{Deserialize, Serialize};

use crate::closure::{bounding_box, sparse_closure, ClosureResult, SupportSet};
use crate::error::{Error, Result};
use crate::kernel::{contains, equal_sets, h_to_v, project, v_to_h, Constraint, HRep, VRep};
use crate::rat::{Rat, RatVec};

/// `S + ℝ^Ī`: frees every coordinate outside the support.
pub trait Tau: Sized {
    fn tau(&self, support: &SupportSet) -> Result<Self>;
}

impl Tau for VRep {
    fn tau(&self, support: &SupportSet) -> Result<VRep> {
        let mut inside = vec![false; self.dim];
        for &i in support.indices() {
            inside[i] = true;
        }
        let mut lineality = self.lineality.clone();
        lineality.extend((0..self.dim).filter(|&j| !inside[j]).map(|j| RatVec::unit(self.dim, j)));
        VRep::new(self.dim, self.vertices.clone(), lineality)
    }
}

impl Tau for HRep {
    fn tau(&self, support: &SupportSet) -> Result<HRep> {
        let idx = support.indices();
        let h = project(self, idx);
        let lift = |c: &Constraint| Constraint::new(c.a.lift(idx, self.dim), c.b.clone());
        HRep::new(self.dim, h.inequalities.iter().map(lift).collect(), h.equations.iter().map(lift).collect())
    }
}

/// `Q ⊆ ℝⁿ × ℝᵐ`; coordinates `0..n` are `x`, the rest `y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtendedSet {
    pub q: HRep,
    pub n: usize,
    pub m: usize,
    /// Box containing `Q`, used when taking its sparse closure. Defaults to
    /// the bounding box of the vertices of `Q`.
    #[serde(default)]
    pub bounds: Option<(RatVec, RatVec)>,
}

impl ExtendedSet {
    pub fn new(q: HRep, n: usize) -> Result<Self> {
        if q.dim < n {
            return Err(Error::DimensionMismatch { expected: n, got: q.dim });
        }
        let m = q.dim - n;
        Ok(ExtendedSet { q, n, m, bounds: None })
    }

    pub fn x_indices(&self) -> Vec<usize> {
        (0..self.n).collect()
    }

    pub fn y_indices(&self) -> Vec<usize> {
        (self.n..self.n + self.m).collect()
    }

    /// `proj_x(Q)` by Fourier–Motzkin.
    pub fn projection(&self) -> HRep {
        project(&self.q, &self.x_indices())
    }

    pub fn vertices(&self) -> Result<VRep> {
        let v = h_to_v(&self.q)?;
        if !v.is_bounded() {
            return Err(Error::Unbounded { rays: v.lineality.len() });
        }
        Ok(v)
    }

    fn closure_box(&self, v: &VRep) -> (RatVec, RatVec) {
        if let Some(b) = &self.bounds {
            return b.clone();
        }
        bounding_box(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub parent: Option<usize>,
    pub children: Option<(usize, usize)>,
    /// `x` coordinate attached to a leaf.
    pub leaf_of: Option<usize>,
}

/// Binary-tree formulation of `{x ∈ [0,1]ⁿ : Σx ≤ n/2}` with one `y`
/// variable per node of a complete binary tree on `n` leaves.
///
/// Nodes are heap-ordered (root 0, children `2v+1`, `2v+2`); leaf
/// `n − 1 + j` carries `x_j`. Variable `y_v` is coordinate `n + v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeFormulation {
    pub n: usize,
    pub nodes: Vec<TreeNode>,
    pub set: ExtendedSet,
}

impl TreeFormulation {
    pub fn y(&self, node: usize) -> usize {
        self.n + node
    }

    pub fn leaf(&self, j: usize) -> usize {
        self.n - 1 + j
    }
}

pub fn build_tree_extform(n: usize) -> Result<TreeFormulation> {
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let m = 2 * n - 1;
    let dim = n + m;
    let y = |v: usize| n + v;
    let nodes: Vec<TreeNode> = (0..m)
        .map(|v| TreeNode {
            parent: (v > 0).then(|| (v - 1) / 2),
            children: (v < n - 1).then(|| (2 * v + 1, 2 * v + 2)),
            leaf_of: (v >= n - 1).then(|| v + 1 - n),
        })
        .collect();

    let mut ineqs = vec![Constraint::new(RatVec::unit(dim, y(0)), Rat::one())];
    for v in 0..m {
        ineqs.push(Constraint::new(RatVec::unit(dim, y(v)).scale(&-Rat::one()), Rat::zero()));
    }
    for j in 0..n {
        ineqs.push(Constraint::new(RatVec::unit(dim, j), Rat::one()));
        ineqs.push(Constraint::new(RatVec::unit(dim, j).scale(&-Rat::one()), Rat::zero()));
    }
    let mut eqs = Vec::with_capacity(m);
    for (v, node) in nodes.iter().enumerate() {
        let mut a = RatVec::unit(dim, y(v));
        if let Some((l, r)) = node.children {
            a[y(l)] = -Rat::one();
            a[y(r)] = -Rat::one();
        } else {
            a[node.leaf_of.unwrap()] = -Rat::new(2, n as i64);
        }
        eqs.push(Constraint::new(a, Rat::zero()));
    }
    let q = HRep::new(dim, ineqs, eqs)?;
    let lo = RatVec::zeros(dim);
    let hi = RatVec::ones(dim);
    let set = ExtendedSet { q, n, m, bounds: Some((lo, hi)) };
    Ok(TreeFormulation { n, nodes, set })
}

/// The tree system with leaf variables substituted by `(2/n)x`, leaving one
/// `y` per internal node (coordinates `n..2n−1`).
pub fn build_tree_extform_substituted(n: usize) -> Result<ExtendedSet> {
    let tree = build_tree_extform(n)?;
    let internal = n - 1;
    let dim = n + internal;
    let keep: Vec<usize> = (0..n).chain((0..internal).map(|v| tree.y(v))).collect();
    let mut q = project(&tree.set.q, &keep);
    q.dim = dim;
    Ok(ExtendedSet { q, n, m: internal, bounds: None })
}

/// Largest support over inequalities and equations.
pub fn max_constraint_support(h: &HRep) -> usize {
    h.inequalities.iter().chain(&h.equations).map(|c| c.support().len()).max().unwrap_or(0)
}

#[derive(Clone, Debug, Serialize)]
pub struct Prop3Report {
    pub k: usize,
    /// Sparsity used on the `x` side, `min(k, n)`.
    pub k_x: usize,
    /// `proj_x(Q^k) ⊆ P^k`.
    pub contained: bool,
    pub equals_closure: bool,
    /// `proj_x(Q^k) = conv(P)`.
    pub equals_p: bool,
    pub projected: VRep,
    pub x_closure: HRep,
    #[serde(skip)]
    pub q_closure: ClosureResult,
}

/// Computes `Q^k`, projects it onto `x` and compares with `P^k`.
pub fn check_prop3(p: &VRep, q: &ExtendedSet, k: usize) -> Result<Prop3Report> {
    if p.dim != q.n {
        return Err(Error::DimensionMismatch { expected: q.n, got: p.dim });
    }
    let qv = q.vertices()?;
    let shadow = qv.project(&q.x_indices());
    let p_h = v_to_h(p)?;
    if !equal_sets(&p_h, &shadow)? {
        return Err(Error::Precondition("proj_x(Q) differs from conv(P)".into()));
    }
    let (lo, hi) = q.closure_box(&qv);
    let q_closure = sparse_closure(&qv, k, &lo, &hi)?;
    let projected = q_closure.vertex_set()?.project(&q.x_indices()).sorted();

    let k_x = k.min(q.n);
    let x_idx = q.x_indices();
    let x_closure = sparse_closure(p, k_x, &lo.select(&x_idx), &hi.select(&x_idx))?.closure;
    let contained = contains(&x_closure, &projected)?;
    let equals_closure = contained && equal_sets(&x_closure, &projected)?;
    let equals_p = equal_sets(&p_h, &projected)?;
    Ok(Prop3Report { k, k_x, contained, equals_closure, equals_p, projected, x_closure, q_closure })
}
