//! Instance families: the simplex, the half-cube, random 0/1 polytopes,
//! random points on a weight slice of the cube and random packing
//! programs. All randomness goes through [`crate::rng::derive`].

use std::collections::HashSet;
use std::path::Path;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::closure::{binomial, unrank_subset};
use crate::error::{Error, Result};
use crate::kernel::{h_to_v, io, Constraint, HRep, VRep};
use crate::rat::{Rat, RatVec};
use crate::rng;

/// Largest dimension for which packing hulls are built by enumeration.
pub const MAX_PIP_DIM: usize = 24;

/// Slices with at most this many points are sampled by index.
const SLICE_ENUM_LIMIT: u128 = 1 << 24;

fn bits_to_point(mask: u64, n: usize) -> RatVec {
    (0..n).map(|i| if mask >> i & 1 == 1 { Rat::one() } else { Rat::zero() }).collect()
}

fn subset_to_point(s: &[usize], n: usize) -> RatVec {
    let mut v = RatVec::zeros(n);
    for &i in s {
        v[i] = Rat::one();
    }
    v
}

/// `{x ∈ [0,1]ⁿ : Σxᵢ ≤ 1}` = `conv{0, e¹, …, eⁿ}`.
pub fn gen_simplex(n: usize) -> Result<VRep> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let mut pts = vec![RatVec::zeros(n)];
    pts.extend((0..n).map(|i| RatVec::unit(n, i)));
    VRep::from_points(n, pts)
}

pub fn halfcube_hrep(n: usize) -> HRep {
    let mut h = HRep::unit_cube(n);
    h.inequalities.push(Constraint::new(RatVec::ones(n), Rat::new(n as i64, 2)));
    h
}

/// Vertices of `{x ∈ [0,1]ⁿ : Σxᵢ ≤ n/2}` for even `n`, computed by vertex
/// enumeration and checked against the 0/1 points of weight at most `n/2`.
pub fn gen_halfcube(n: usize) -> Result<VRep> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::Precondition(format!("half-cube needs a positive even n, got {n}")));
    }
    let v = h_to_v(&halfcube_hrep(n))?.sorted();
    let expected = (0..=n / 2).map(|w| binomial(n, w)).sum::<u128>();
    if v.vertices.len() as u128 != expected || v.vertices.iter().any(|x| x.sum() > Rat::from_int(n as i64 / 2)) {
        return Err(Error::Precondition("half-cube vertex cross-check failed".into()));
    }
    Ok(v)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RandomPoints {
    pub vrep: VRep,
    pub requested: usize,
    pub distinct: usize,
}

impl RandomPoints {
    /// `"requested/distinct"`.
    pub fn count_label(&self) -> String {
        format!("{}/{}", self.requested, self.distinct)
    }
}

fn check_cube_count(n: usize, t: usize) -> Result<()> {
    if n == 0 || t == 0 {
        return Err(Error::Precondition("n and t must be at least 1".into()));
    }
    if n < 64 && t as u128 > 1u128 << n {
        return Err(Error::TooManyRequested { requested: t as u128, available: 1u128 << n });
    }
    if n > 64 {
        return Err(Error::Precondition("random 0/1 points limited to n ≤ 64".into()));
    }
    Ok(())
}

/// `t` independent uniform points of `{0,1}ⁿ`; repeats are dropped.
pub fn gen_random01(n: usize, t: usize, seed: u64) -> Result<RandomPoints> {
    check_cube_count(n, t)?;
    let mut r = rng::derive(seed, "random01");
    let mut seen = HashSet::new();
    let mut pts = Vec::new();
    for _ in 0..t {
        let mask: u64 = if n == 64 { r.gen() } else { r.gen_range(0..1u64 << n) };
        if seen.insert(mask) {
            pts.push(bits_to_point(mask, n));
        }
    }
    let distinct = pts.len();
    Ok(RandomPoints { vrep: VRep::from_points(n, pts)?, requested: t, distinct })
}

/// `t` distinct uniform points of `{0,1}ⁿ` (rejection of repeats).
pub fn gen_random01_distinct(n: usize, t: usize, seed: u64) -> Result<RandomPoints> {
    check_cube_count(n, t)?;
    let mut r = rng::derive(seed, "random01-distinct");
    let mut seen = HashSet::new();
    let mut pts = Vec::with_capacity(t);
    while pts.len() < t {
        let mask: u64 = if n == 64 { r.gen() } else { r.gen_range(0..1u64 << n) };
        if seen.insert(mask) {
            pts.push(bits_to_point(mask, n));
        }
    }
    Ok(RandomPoints { vrep: VRep::from_points(n, pts)?, requested: t, distinct: t })
}

/// `t` distinct uniform 0/1 points with exactly `w` ones.
pub fn gen_hyperplane_slice(n: usize, w: usize, t: usize, seed: u64) -> Result<VRep> {
    if n == 0 || w > n || t == 0 {
        return Err(Error::Precondition(format!("need n ≥ 1, 0 ≤ w ≤ n, t ≥ 1 (n={n}, w={w}, t={t})")));
    }
    let available = binomial(n, w);
    if t as u128 > available {
        return Err(Error::TooManyRequested { requested: t as u128, available });
    }
    let mut r = rng::derive(seed, "slice");
    let subsets: Vec<Vec<usize>> = if available <= SLICE_ENUM_LIMIT {
        index::sample(&mut r, available as usize, t)
            .into_iter()
            .map(|i| unrank_subset(n, w, i as u128))
            .collect()
    } else {
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(t);
        while out.len() < t {
            let mut s = index::sample(&mut r, n, w).into_vec();
            s.sort_unstable();
            if seen.insert(s.clone()) {
                out.push(s);
            }
        }
        out
    };
    VRep::from_points(n, subsets.iter().map(|s| subset_to_point(s, n)).collect())
}

/// Random packing program `A x ≤ (row sums)/2` with entries uniform in
/// `{0, …, M}`, together with the hull of its 0/1 solutions.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipInstance {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "M")]
    pub big_m: u64,
    #[serde(rename = "A")]
    pub a: Vec<Vec<u64>>,
    pub rhs: Vec<Rat>,
    pub hull: VRep,
}

#[derive(Serialize, Deserialize)]
struct PipFile {
    n: usize,
    m: usize,
    #[serde(rename = "M")]
    big_m: u64,
    #[serde(rename = "A")]
    a: Vec<Vec<u64>>,
    rhs: Vec<Rat>,
}

impl PipInstance {
    pub fn row(&self, j: usize) -> RatVec {
        self.a[j].iter().map(|&x| Rat::from_int(x as i64)).collect()
    }

    /// The packing system intersected with `[0,1]ⁿ`.
    pub fn hrep(&self) -> HRep {
        let mut h = HRep::unit_cube(self.n);
        for j in 0..self.m {
            h.inequalities.push(Constraint::new(self.row(j), self.rhs[j].clone()));
        }
        h
    }

    pub fn feasible(&self, x: &RatVec) -> bool {
        (0..self.m).all(|j| self.row(j).dot(x) <= self.rhs[j])
    }

    /// Writes `<stem>.vrep.json` (the hull) and `<stem>.pip.json` (A, M, rhs).
    pub fn save(&self, stem: impl AsRef<Path>) -> Result<()> {
        let stem = stem.as_ref().to_string_lossy().into_owned();
        io::save_json(format!("{stem}.vrep.json"), &self.hull)?;
        let f = PipFile { n: self.n, m: self.m, big_m: self.big_m, a: self.a.clone(), rhs: self.rhs.clone() };
        io::save_json(format!("{stem}.pip.json"), &f)
    }

    /// Rebuilds an instance from a `.pip.json` file (the hull is recomputed).
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let f: PipFile = io::load_json(path)?;
        Self::from_matrix(f.n, f.big_m, f.a)
    }

    pub fn from_matrix(n: usize, big_m: u64, a: Vec<Vec<u64>>) -> Result<Self> {
        if n == 0 || n > MAX_PIP_DIM {
            return Err(Error::BudgetExceeded { what: "packing hull dimension", count: n, cap: MAX_PIP_DIM });
        }
        if let Some(row) = a.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: row.len() });
        }
        if a.iter().flatten().any(|&x| x > big_m) {
            return Err(Error::Precondition("coefficient exceeds M".into()));
        }
        let m = a.len();
        let sums: Vec<u64> = a.iter().map(|r| r.iter().sum()).collect();
        let rhs = sums.iter().map(|&s| Rat::new(s as i64, 2)).collect();
        // every 0/1 point is extreme in the hull of any set of 0/1 points
        let mut pts = Vec::new();
        for mask in 0u64..1 << n {
            let ok = a.iter().zip(&sums).all(|(row, &s)| {
                let lhs: u64 = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| row[i]).sum();
                2 * lhs <= s
            });
            if ok {
                pts.push(bits_to_point(mask, n));
            }
        }
        let hull = VRep::from_points(n, pts)?.sorted();
        Ok(PipInstance { n, m, big_m, a, rhs, hull })
    }
}

/// Samples an `(n, m, M)` packing instance.
pub fn gen_pip(n: usize, m: usize, big_m: u64, seed: u64) -> Result<PipInstance> {
    if n > MAX_PIP_DIM {
        return Err(Error::BudgetExceeded { what: "packing hull dimension", count: n, cap: MAX_PIP_DIM });
    }
    if m == 0 {
        return Err(Error::Precondition("m must be at least 1".into()));
    }
    let mut r = rng::derive(seed, "pip/A");
    let a: Vec<Vec<u64>> = (0..m).map(|_| (0..n).map(|_| r.gen_range(0..=big_m)).collect()).collect();
    PipInstance::from_matrix(n, big_m, a)
}
