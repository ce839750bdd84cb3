//! Distances between a polytope and an outer set.
//!
//! `dist(P, Q) = max_{x∈Q} min_{y∈P} ‖x − y‖` for `P ⊆ Q` is attained at a
//! vertex of `Q`, so [`exact_dist`] enumerates the vertices of `Q` and
//! projects each onto `P` with an exact minimum-norm-point solver. Directional
//! lower bounds come from [`shoot`]; the depth of a single valid cut from
//! [`cut_depth`]. Every comparison happens on squared values.

use std::cmp::Ordering;
use std::io::Write;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{contains, h_to_v, HRep, VRep};
use crate::lp::{maximize, LpStatus};
use crate::rat::{Rat, RatVec};
use crate::rng;

pub const DEFAULT_VERTEX_CAP: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceReport {
    pub dist_sq: Rat,
    pub witness: RatVec,
    pub nearest: RatVec,
    pub dist_float: f64,
}

fn idot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(x, y)| x * y).sum()
}

/// Solves `min ‖Σ αᵢ qᵢ‖²` subject to `Σ αᵢ = 1` for integer points by
/// fraction-free Gauss–Jordan elimination on `[G 1; 1ᵀ 0]`, `G` the Gram
/// matrix. Returns `None` if the points are affinely dependent.
fn affine_minimizer(q: &[&[BigInt]]) -> Option<Vec<Rat>> {
    let m = q.len();
    let size = m + 1;
    let one = BigInt::one();
    let mut a: Vec<Vec<BigInt>> = (0..size)
        .map(|i| {
            let mut row: Vec<BigInt> = (0..size)
                .map(|j| match (i < m, j < m) {
                    (true, true) => idot(q[i], q[j]),
                    (false, false) => BigInt::zero(),
                    _ => one.clone(),
                })
                .collect();
            row.push(if i == m { one.clone() } else { BigInt::zero() });
            row
        })
        .collect();
    let mut prev = one.clone();
    for k in 0..size {
        let p = (k..size).find(|&r| !a[r][k].is_zero())?;
        a.swap(k, p);
        let pivot_row = a[k].clone();
        let pk = pivot_row[k].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == k {
                continue;
            }
            let f = row[k].clone();
            for j in 0..=size {
                if j == k {
                    continue;
                }
                let v = &pk * &row[j] - &f * &pivot_row[j];
                debug_assert!((&v % &prev).is_zero());
                row[j] = v / &prev;
            }
            row[k] = BigInt::zero();
        }
        prev = pk;
    }
    // every diagonal entry now equals the determinant
    Some((0..m).map(|i| Rat::from_big(a[i][size].clone(), a[i][i].clone())).collect())
}

/// `Σ wⱼ qⱼ` written as `Y / den` with integer `Y` and `den > 0`.
fn combination(q: &[Vec<BigInt>], set: &[usize], w: &[Rat]) -> (Vec<BigInt>, BigInt) {
    let mut den = BigInt::one();
    for x in w {
        den = den.lcm(x.denom());
    }
    let mut y = vec![BigInt::zero(); q[0].len()];
    for (&j, wj) in set.iter().zip(w) {
        let c = wj.numer() * (&den / wj.denom());
        if c.is_zero() {
            continue;
        }
        for (yi, qi) in y.iter_mut().zip(&q[j]) {
            if !qi.is_zero() {
                *yi += &c * qi;
            }
        }
    }
    (y, den)
}

/// Euclidean projection of `x` onto `conv(P.vertices)`: Wolfe's
/// minimum-norm-point method on the translated points `v − x`, run in exact
/// arithmetic. Returns the nearest point and the squared distance.
pub fn nearest_point(x: &RatVec, p: &VRep) -> Result<(RatVec, Rat)> {
    Ok(nearest_point_above(x, p, None)?.expect("no cutoff"))
}

/// As [`nearest_point`], but gives up with `None` as soon as the squared
/// distance is known to be below `cutoff`. Wolfe's iterates have strictly
/// decreasing norm, so each one bounds the answer from above.
pub fn nearest_point_above(x: &RatVec, p: &VRep, cutoff: Option<&Rat>) -> Result<Option<(RatVec, Rat)>> {
    if !p.is_bounded() {
        return Err(Error::Precondition("polytope must be bounded".into()));
    }
    if x.dim() != p.dim {
        return Err(Error::DimensionMismatch { expected: p.dim, got: x.dim() });
    }
    // work on integer points (v − x)·L; the minimizing weights are unchanged
    let mut lcm = BigInt::one();
    for c in x.iter().chain(p.vertices.iter().flat_map(|v| v.iter())) {
        lcm = lcm.lcm(c.denom());
    }
    let scale = Rat::from_bigint(lcm.clone());
    let q: Vec<Vec<BigInt>> = p
        .vertices
        .iter()
        .map(|v| (v - x).iter().map(|c| c.numer() * (&lcm / c.denom())).collect())
        .collect();
    if q.iter().any(|v| v.iter().all(Zero::is_zero)) {
        return Ok(Some((x.clone(), Rat::zero())));
    }
    let lcm_sq = &lcm * &lcm;
    let below_cutoff = |yy: &BigInt, den: &BigInt| -> bool {
        // ‖Y/den‖² / L² < cutoff
        cutoff.is_some_and(|c| Rat::from_big(yy.clone(), den * den * &lcm_sq) < *c)
    };

    let norms: Vec<BigInt> = q.iter().map(|v| idot(v, v)).collect();
    let start = (0..q.len()).min_by(|&a, &b| norms[a].cmp(&norms[b]).then(a.cmp(&b))).unwrap();
    let mut set = vec![start];
    let mut w = vec![Rat::one()];
    let (mut y, mut den) = (q[start].clone(), BigInt::one());

    loop {
        let yy = idot(&y, &y);
        if yy.is_zero() {
            break;
        }
        if below_cutoff(&yy, &den) {
            return Ok(None);
        }
        // optimal when y·q_j ≥ y·y for all j, i.e. (Y·q_j)·den ≥ Y·Y
        let (j, yq) = (0..q.len())
            .map(|j| (j, idot(&y, &q[j])))
            .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)))
            .unwrap();
        if &yq * &den >= yy || set.contains(&j) {
            break;
        }
        set.push(j);
        w.push(Rat::zero());

        loop {
            let pts: Vec<&[BigInt]> = set.iter().map(|&i| q[i].as_slice()).collect();
            let alpha = affine_minimizer(&pts).expect("corral points stay affinely independent");
            if alpha.iter().all(Rat::is_positive) {
                w = alpha;
                break;
            }
            // step from w toward alpha until the first weight hits zero
            let mut theta = Rat::one();
            for (wi, ai) in w.iter().zip(&alpha) {
                if !ai.is_positive() {
                    let t = wi / &(wi - ai);
                    if t < theta {
                        theta = t;
                    }
                }
            }
            let one_minus = &Rat::one() - &theta;
            let next: Vec<Rat> = w.iter().zip(&alpha).map(|(wi, ai)| &(&one_minus * wi) + &(&theta * ai)).collect();
            let keep: Vec<bool> = next.iter().map(Rat::is_positive).collect();
            set = set.iter().zip(&keep).filter(|(_, k)| **k).map(|(s, _)| *s).collect();
            w = next.into_iter().zip(&keep).filter(|(_, k)| **k).map(|(v, _)| v).collect();
        }
        (y, den) = combination(&q, &set, &w);
    }
    let yr: RatVec = y.iter().map(|c| Rat::from_big(c.clone(), den.clone())).collect();
    let yr = yr.scale(&scale.recip());
    let dist_sq = yr.norm_sq();
    Ok(Some((x + &yr, dist_sq)))
}

/// Exact `dist(P, Q)` with the default vertex cap.
pub fn exact_dist(p: &VRep, q: &HRep) -> Result<DistanceReport> {
    exact_dist_with_cap(p, q, DEFAULT_VERTEX_CAP)
}

pub fn exact_dist_with_cap(p: &VRep, q: &HRep, cap: usize) -> Result<DistanceReport> {
    if !contains(q, p)? {
        return Err(Error::Precondition("outer set does not contain the polytope".into()));
    }
    let qv = h_to_v(q)?;
    if !qv.is_bounded() {
        return Err(Error::Unbounded { rays: qv.lineality.len() });
    }
    if qv.vertices.len() > cap {
        return Err(Error::BudgetExceeded { what: "outer-set vertices", count: qv.vertices.len(), cap });
    }
    dist_to_vertices(p, &qv.vertices)
}

/// `max_w min_{y∈P} ‖w − y‖` over the given points. Ties go to the
/// lexicographically smallest witness.
///
/// Witnesses are visited in decreasing order of their squared distance to
/// the closest vertex of `P`, an upper bound on the exact value; the scan
/// stops once that bound drops below the best exact value found.
pub fn dist_to_vertices(p: &VRep, witnesses: &[RatVec]) -> Result<DistanceReport> {
    if witnesses.is_empty() {
        return Err(Error::Precondition("no witness points".into()));
    }
    if let Some(w) = witnesses.iter().find(|w| w.dim() != p.dim) {
        return Err(Error::DimensionMismatch { expected: p.dim, got: w.dim() });
    }
    let upper: Vec<Rat> = witnesses
        .par_iter()
        .map(|w| p.vertices.iter().map(|v| (w - v).norm_sq()).min().unwrap())
        .collect();
    let mut order: Vec<usize> = (0..witnesses.len()).collect();
    order.sort_by(|&a, &b| upper[b].cmp(&upper[a]).then_with(|| witnesses[a].cmp(&witnesses[b])));

    let chunk = 2 * rayon::current_num_threads().max(1);
    let mut best: Option<(usize, RatVec, Rat)> = None;
    for block in order.chunks(chunk) {
        let live: Vec<usize> = block
            .iter()
            .copied()
            .filter(|&i| best.as_ref().map_or(true, |b| upper[i] >= b.2))
            .collect();
        if live.is_empty() {
            break;
        }
        let cutoff = best.as_ref().map(|b| b.2.clone());
        let solved: Vec<Option<(usize, RatVec, Rat)>> = live
            .par_iter()
            .map(|&i| nearest_point_above(&witnesses[i], p, cutoff.as_ref()).map(|r| r.map(|(y, d)| (i, y, d))))
            .collect::<Result<_>>()?;
        for cand in solved.into_iter().flatten() {
            let better = match &best {
                None => true,
                Some(b) => cand.2 > b.2 || (cand.2 == b.2 && witnesses[cand.0] < witnesses[b.0]),
            };
            if better {
                best = Some(cand);
            }
        }
    }
    let (i, nearest, dist_sq) = best.unwrap();
    let dist_float = dist_sq.to_f64().sqrt();
    Ok(DistanceReport { dist_sq, witness: witnesses[i].clone(), nearest, dist_float })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShotRecord {
    pub dir_index: usize,
    pub direction: RatVec,
    pub gap: Rat,
    pub norm_sq: Rat,
}

impl ShotRecord {
    /// `gap² / ‖u‖²` (zero for the zero direction).
    pub fn lb_sq(&self) -> Rat {
        if self.norm_sq.is_zero() {
            Rat::zero()
        } else {
            &self.gap.square() / &self.norm_sq
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ShootingReport {
    pub best_lb_sq: Rat,
    pub best_direction: RatVec,
    pub directions_tried: usize,
    pub records: Vec<ShotRecord>,
}

/// Shooting lower bound on `dist(P, Q)`.
///
/// Directions are `e`, `-e`, then `extra_dirs`, then `num_dirs` seeded
/// dyadic directions from `[-1, 1]ⁿ`. For each `u` the gap is
/// `max_Q u·x − max_P u·x` (clamped at zero) and the bound is `gap²/‖u‖²`.
pub fn shoot(p: &VRep, q: &HRep, num_dirs: usize, seed: u64, extra_dirs: &[RatVec]) -> Result<ShootingReport> {
    let n = p.dim;
    if q.dim != n {
        return Err(Error::DimensionMismatch { expected: n, got: q.dim });
    }
    let mut dirs = vec![RatVec::ones(n), RatVec::ones(n).scale(&-Rat::one())];
    for d in extra_dirs {
        if d.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: d.dim() });
        }
        dirs.push(d.clone());
    }
    let mut r = rng::derive(seed, "shoot");
    dirs.extend((0..num_dirs).map(|_| rng::dyadic_direction(&mut r, n)));

    let records: Vec<ShotRecord> = dirs
        .into_par_iter()
        .enumerate()
        .map(|(dir_index, u)| {
            let p_max = p.vertices.iter().map(|v| u.dot(v)).max().unwrap();
            let lp = maximize(&u, q);
            let q_max = match lp.status {
                LpStatus::Optimal => lp.value.unwrap(),
                LpStatus::Unbounded => return Err(Error::Unbounded { rays: 1 }),
                LpStatus::Infeasible => return Err(Error::Infeasible),
            };
            let diff = &q_max - &p_max;
            let gap = if diff.is_negative() { Rat::zero() } else { diff };
            let norm_sq = u.norm_sq();
            Ok(ShotRecord { dir_index, direction: u, gap, norm_sq })
        })
        .collect::<Result<_>>()?;

    let mut best = 0;
    let mut best_val = records[0].lb_sq();
    for (i, rec) in records.iter().enumerate().skip(1) {
        let v = rec.lb_sq();
        if v.cmp(&best_val) == Ordering::Greater {
            best = i;
            best_val = v;
        }
    }
    Ok(ShootingReport {
        best_lb_sq: best_val,
        best_direction: records[best].direction.clone(),
        directions_tried: records.len(),
        records,
    })
}

/// Shooting log with columns
/// `dir_index,gap_num,gap_den,norm_sq_num,norm_sq_den,lb_sq_float`.
pub fn write_shooting_csv<W: Write>(report: &ShootingReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["dir_index", "gap_num", "gap_den", "norm_sq_num", "norm_sq_den", "lb_sq_float"])?;
    for r in &report.records {
        w.write_record([
            r.dir_index.to_string(),
            r.gap.numer().to_string(),
            r.gap.denom().to_string(),
            r.norm_sq.numer().to_string(),
            r.norm_sq.denom().to_string(),
            format!("{:e}", r.lb_sq().to_f64()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CutDepth {
    /// `max(0, max_Q α·x − β)`.
    pub gamma_prime: Rat,
    pub gamma_prime_sq: Rat,
    pub alpha_norm_sq: Rat,
    /// `γ'² / ‖α‖²`, the squared normalized depth.
    pub gamma_sq_scaled: Rat,
}

/// Depth of the cut `α·x ≤ β` with respect to `Q`.
pub fn cut_depth(alpha: &RatVec, beta: &Rat, q: &HRep) -> Result<CutDepth> {
    if alpha.dim() != q.dim {
        return Err(Error::DimensionMismatch { expected: q.dim, got: alpha.dim() });
    }
    if alpha.is_zero() {
        return Err(Error::Precondition("cut normal must be nonzero".into()));
    }
    let lp = maximize(alpha, q);
    let value = match lp.status {
        LpStatus::Optimal => lp.value.unwrap(),
        LpStatus::Unbounded => return Err(Error::Unbounded { rays: 1 }),
        LpStatus::Infeasible => return Err(Error::Infeasible),
    };
    let diff = &value - beta;
    let gamma_prime = if diff.is_negative() { Rat::zero() } else { diff };
    let gamma_prime_sq = gamma_prime.square();
    let alpha_norm_sq = alpha.norm_sq();
    let gamma_sq_scaled = &gamma_prime_sq / &alpha_norm_sq;
    Ok(CutDepth { gamma_prime, gamma_prime_sq, alpha_norm_sq, gamma_sq_scaled })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{v_to_h, Constraint};
    use crate::ratvec;
    use proptest::prelude::*;

    fn simplex(n: usize) -> VRep {
        let mut pts = vec![RatVec::zeros(n)];
        pts.extend((0..n).map(|i| RatVec::unit(n, i)));
        VRep::from_points(n, pts).unwrap()
    }

    fn halfcube(n: usize) -> VRep {
        let mut h = HRep::unit_cube(n);
        h.inequalities.push(Constraint::new(RatVec::ones(n), Rat::from_int(n as i64 / 2)));
        h_to_v(&h).unwrap()
    }

    fn half() -> Rat {
        Rat::new(1, 2)
    }

    #[test]
    fn nearest_on_simplex() {
        let (y, d) = nearest_point(&ratvec![1, 1], &simplex(2)).unwrap();
        assert_eq!(y, RatVec::new(vec![half(), half()]));
        assert_eq!(d, half());
        let inside = RatVec::new(vec![Rat::new(1, 4), Rat::new(1, 4)]);
        let (y, d) = nearest_point(&inside, &simplex(2)).unwrap();
        assert_eq!(y, inside);
        assert!(d.is_zero());
    }

    #[test]
    fn nearest_on_halfcube() {
        let (y, d) = nearest_point(&RatVec::ones(4), &halfcube(4)).unwrap();
        assert_eq!(y, RatVec::new(vec![half(); 4]));
        assert_eq!(d, Rat::one());
    }

    #[test]
    fn examples_one_and_two() {
        let r = exact_dist(&simplex(2), &HRep::unit_cube(2)).unwrap();
        assert_eq!(r.dist_sq, half());
        assert_eq!(r.witness, ratvec![1, 1]);
        let p = halfcube(4);
        let r = exact_dist(&p, &HRep::unit_cube(4)).unwrap();
        assert_eq!(r.dist_sq, Rat::one());
        assert_eq!(r.witness, RatVec::ones(4));
    }

    #[test]
    fn shooting_matches_examples() {
        let r = shoot(&simplex(2), &HRep::unit_cube(2), 20, 1, &[]).unwrap();
        assert_eq!(r.best_lb_sq, half());
        assert_eq!(r.records[0].gap, Rat::one());
        let p = halfcube(4);
        let r = shoot(&p, &HRep::unit_cube(4), 10, 1, &[]).unwrap();
        assert_eq!(r.records[0].gap, Rat::from_int(2));
        assert_eq!(r.best_lb_sq, Rat::one());
        let same = shoot(&p, &v_to_h(&p).unwrap(), 10, 1, &[]).unwrap();
        assert!(same.best_lb_sq.is_zero());
        let mut buf = Vec::new();
        write_shooting_csv(&r, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("dir_index,gap_num,gap_den,norm_sq_num,norm_sq_den,lb_sq_float\n0,2,1,4,1,"));
    }

    #[test]
    fn depth_examples() {
        let d = cut_depth(&ratvec![1, 1], &Rat::one(), &HRep::unit_cube(2)).unwrap();
        assert_eq!(d.gamma_prime, Rat::one());
        assert_eq!(d.gamma_sq_scaled, half());
        let p = halfcube(4);
        let d = cut_depth(&RatVec::ones(4), &Rat::from_int(2), &v_to_h(&p).unwrap()).unwrap();
        assert!(d.gamma_prime.is_zero());
        let d = cut_depth(&RatVec::ones(4), &Rat::from_int(2), &HRep::unit_cube(4)).unwrap();
        assert_eq!(d.gamma_sq_scaled, Rat::one());
    }

    #[test]
    fn rejects_non_containing_outer_set() {
        let q = HRep::from_inequalities(2, vec![Constraint::new(ratvec![1, 1], Rat::new(1, 2))]).unwrap();
        assert!(exact_dist(&simplex(2), &q).is_err());
    }

    fn small_point() -> impl Strategy<Value = RatVec> {
        prop::collection::vec(-6i64..=6, 3).prop_map(|v| v.into_iter().map(|x| Rat::new(x, 2)).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn projection_certificate(x in small_point(), pts in prop::collection::vec(small_point(), 1..7)) {
            let p = VRep::from_points(3, pts).unwrap();
            let (y, d) = nearest_point(&x, &p).unwrap();
            prop_assert_eq!(&d, &(&x - &y).norm_sq());
            let r = &x - &y;
            for v in &p.vertices {
                prop_assert!(r.dot(&(v - &y)) <= Rat::zero());
            }
            prop_assert!(v_to_h(&p).unwrap().member(&y).unwrap());
        }
    }
}
