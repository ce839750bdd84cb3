use std::ops::Range;

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::lb_theorem3;
use crate::closure::{binomial, k_subsets};
use crate::error::{Error, Result};
use crate::instances::{gen_pip, PipInstance};
use crate::kernel::{Constraint, HRep};
use crate::lp::{maximize, LpStatus};
use crate::rat::{Rat, RatVec};
use crate::rng;

pub const MAX_PIP_CHECK_DIM: usize = 24;
const MAX_MEMBERSHIP_POINTS: usize = 64;

/// The uniform cut `coeff·Σxᵢ ≤ rhs` obtained by aggregating all rows.
#[derive(Clone, Debug, Serialize)]
pub struct AggregatedCut {
    /// `(2/mM) Σⱼ Aʲ x ≤ (1/mM) Σᵢⱼ Aʲᵢ`, checked exactly on the hull.
    pub aggregated_valid: bool,
    pub coeff: f64,
    /// `n/2 + √(n ln 8)/√m`.
    pub rhs_stated: f64,
    /// `n/2 + √(n ln 8n)/√m`, what the aggregation argument delivers.
    pub rhs_derived: f64,
    /// `max Σxᵢ` over the hull.
    pub max_weight: usize,
    pub valid_stated: bool,
    pub valid_derived: bool,
}

pub fn aggregated_cut(inst: &PipInstance) -> AggregatedCut {
    let (n, m) = (inst.n, inst.m);
    let (nf, mf) = (n as f64, m as f64);
    let coeff = 1.0 - 2.0 * (8.0 * nf).ln().sqrt() / mf.sqrt();
    let rhs_stated = nf / 2.0 + (nf * 8f64.ln()).sqrt() / mf.sqrt();
    let rhs_derived = nf / 2.0 + (nf * (8.0 * nf).ln()).sqrt() / mf.sqrt();

    let col: RatVec = (0..n).map(|i| Rat::from_int(inst.a.iter().map(|r| r[i]).sum::<u64>() as i64)).collect();
    let total = Rat::from_int(inst.a.iter().flatten().sum::<u64>() as i64);
    let lhs = col.scale(&Rat::from_int(2));
    let aggregated_valid = inst.hull.vertices.iter().all(|v| lhs.dot(v) <= total);

    let max_weight = inst.hull.vertices.iter().map(|v| v.iter().filter(|x| !x.is_zero()).count()).max().unwrap_or(0);
    let w = max_weight as f64;
    AggregatedCut {
        aggregated_valid,
        coeff,
        rhs_stated,
        rhs_derived,
        max_weight,
        valid_stated: coeff * w <= rhs_stated,
        valid_derived: coeff * w <= rhs_derived,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CutFrequency {
    pub n: usize,
    pub m: usize,
    pub big_m: u64,
    pub seeds: usize,
    pub valid: usize,
    pub frequency: f64,
    pub target: f64,
    pub in_regime: bool,
}

/// Fraction of seeds whose packing hull satisfies the aggregated uniform
/// cut in its stated form.
pub fn aggregated_cut_frequency(n: usize, m: usize, big_m: u64, seeds: Range<u64>) -> Result<CutFrequency> {
    let valid: Vec<bool> = seeds
        .clone()
        .into_par_iter()
        .map(|s| gen_pip(n, m, big_m, s).map(|inst| aggregated_cut(&inst).valid_stated))
        .collect::<Result<_>>()?;
    let count = valid.iter().filter(|&&v| v).count();
    let nf = n as f64;
    Ok(CutFrequency {
        n,
        m,
        big_m,
        seeds: valid.len(),
        valid: count,
        frequency: count as f64 / valid.len().max(1) as f64,
        target: 0.75,
        in_regime: n >= 50 && m as f64 >= 8.0 * (8.0 * nf).ln(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RowConcentration {
    pub row: usize,
    pub row_sum: u64,
    /// `|Σᵢ Aʲᵢ − nM/2|`.
    pub deviation: f64,
    /// `M√(n ln 8m)`.
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlmostFeasibleRow {
    pub row: usize,
    /// Largest `Aʲx̄` over 0/1 points with `k` ones.
    pub top_sum: u64,
    /// `(M+1)c(2n−cn+1)/2 + (M+1)√(10cnm)` with `c = k/n`.
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MembershipCheck {
    pub support: Vec<usize>,
    /// `maxⱼ Aʲx̄ / bⱼ`.
    pub alpha: Rat,
    /// `12√(ln 4n²m)/√n`.
    pub eps_min: f64,
    /// `min(eps_min, 1/2)`, as used for the scaled point.
    pub eps: Rat,
    /// `(1/max(α,1))(1−ε)²`.
    pub scale: Rat,
    pub member: bool,
    pub hypotheses_hold: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipChecks {
    pub n: usize,
    pub m: usize,
    pub big_m: u64,
    pub k: usize,
    pub cut: AggregatedCut,
    pub rows: Vec<RowConcentration>,
    pub rhs_all_hold: bool,
    pub almost_feasible: Vec<AlmostFeasibleRow>,
    pub almost_feasible_all_hold: bool,
    pub membership: Vec<MembershipCheck>,
    pub in_regime: bool,
}

fn top_sum(row: &[u64], k: usize) -> u64 {
    let mut r = row.to_vec();
    r.sort_unstable_by(|a, b| b.cmp(a));
    r[..k].iter().sum()
}

/// Whether `y` lies in the hull of `points`: maximizes `c·y − c₀` over
/// `c ∈ [−1,1]ⁿ` with `c·v ≤ c₀` on every point, a positive optimum being
/// a separating direction.
fn in_hull(y: &RatVec, points: &[RatVec]) -> Result<bool> {
    let n = y.dim();
    let mut ineqs: Vec<Constraint> = points
        .iter()
        .map(|v| {
            let mut a: Vec<Rat> = v.iter().cloned().collect();
            a.push(-Rat::one());
            Constraint::new(RatVec::new(a), Rat::zero())
        })
        .collect();
    for i in 0..n {
        let e = RatVec::unit(n + 1, i);
        ineqs.push(Constraint::new(e.clone(), Rat::one()));
        ineqs.push(Constraint::new(e.scale(&-Rat::one()), Rat::one()));
    }
    let h = HRep { dim: n + 1, inequalities: ineqs, equations: vec![] };
    let mut obj: Vec<Rat> = y.iter().cloned().collect();
    obj.push(-Rat::one());
    let lp = maximize(&RatVec::new(obj), &h);
    match lp.status {
        LpStatus::Optimal => Ok(!lp.value.expect("optimal").is_positive()),
        LpStatus::Unbounded => Err(Error::Unbounded { rays: 1 }),
        LpStatus::Infeasible => Err(Error::Infeasible),
    }
}

fn membership(inst: &PipInstance, support: Vec<usize>) -> Result<MembershipCheck> {
    let (n, m) = (inst.n, inst.m);
    let (nf, mf) = (n as f64, m as f64);
    let alpha = (0..m)
        .map(|j| {
            let lhs: u64 = support.iter().map(|&i| inst.a[j][i]).sum();
            if inst.rhs[j].is_zero() {
                if lhs == 0 { Rat::zero() } else { Rat::from_int(i64::MAX) }
            } else {
                &Rat::from_int(lhs as i64) / &inst.rhs[j]
            }
        })
        .max()
        .unwrap_or_else(Rat::zero);
    let eps_min = 12.0 * (4.0 * nf * nf * mf).ln().sqrt() / nf.sqrt();
    let eps = Rat::from_f64(eps_min.min(0.5)).expect("finite");
    let denom = if alpha > Rat::one() { alpha.clone() } else { Rat::one() };
    let scale = &(&Rat::one() - &eps).square() / &denom;
    let y = RatVec::ones(n).select(&support).lift(&support, n).scale(&scale);
    let member = in_hull(&y, &inst.hull.vertices)?;
    let big_m = inst.big_m as f64;
    let rhs_large = inst.rhs.iter().all(|b| b.to_f64() >= nf * big_m / 12.0);
    let a = alpha.to_f64();
    let hypotheses_hold = n >= 50 && m <= n && rhs_large && a > 1.0 && a <= 2.0 * nf.sqrt() && eps_min <= 0.5;
    Ok(MembershipCheck { support, alpha, eps_min, eps, scale, member, hypotheses_hold })
}

/// Per-instance checks of a packing instance at sparsity `k`: the
/// aggregated cut, row-sum concentration, the top-`k` row sums against the
/// almost-feasibility bound, and hull membership of scaled weight-`k`
/// points (all of them when there are at most 64, else 64 sampled).
pub fn pip_lemma_checks(inst: &PipInstance, k: usize, seed: u64) -> Result<PipChecks> {
    let (n, m) = (inst.n, inst.m);
    if n > MAX_PIP_CHECK_DIM {
        return Err(Error::BudgetExceeded { what: "packing check dimension", count: n, cap: MAX_PIP_CHECK_DIM });
    }
    if k == 0 || k > n {
        return Err(Error::Precondition(format!("k = {k} outside 1..{n}")));
    }
    let (nf, mf, bm) = (n as f64, m as f64, inst.big_m as f64);

    let rows: Vec<RowConcentration> = inst
        .a
        .iter()
        .enumerate()
        .map(|(row, r)| {
            let row_sum: u64 = r.iter().sum();
            let deviation = (row_sum as f64 - nf * bm / 2.0).abs();
            let bound = bm * (nf * (8.0 * mf).ln()).sqrt();
            RowConcentration { row, row_sum, deviation, bound, holds: deviation <= bound }
        })
        .collect();

    let c = k as f64 / nf;
    let af_bound = (bm + 1.0) * c * (2.0 * nf - c * nf + 1.0) / 2.0 + (bm + 1.0) * (10.0 * c * nf * mf).sqrt();
    let almost_feasible: Vec<AlmostFeasibleRow> = inst
        .a
        .iter()
        .enumerate()
        .map(|(row, r)| {
            let s = top_sum(r, k);
            AlmostFeasibleRow { row, top_sum: s, bound: af_bound, holds: s as f64 <= af_bound }
        })
        .collect();

    let count = binomial(n, k);
    let supports: Vec<Vec<usize>> = if count <= MAX_MEMBERSHIP_POINTS as u128 {
        k_subsets(n, k)
    } else {
        let mut r = rng::derive(seed, "pip/membership");
        (0..MAX_MEMBERSHIP_POINTS)
            .map(|_| {
                let mut s = index::sample(&mut r, n, k).into_vec();
                s.sort_unstable();
                s
            })
            .collect()
    };
    let membership = supports.into_par_iter().map(|s| membership(inst, s)).collect::<Result<Vec<_>>>()?;

    Ok(PipChecks {
        n,
        m,
        big_m: inst.big_m,
        k,
        cut: aggregated_cut(inst),
        rhs_all_hold: rows.iter().all(|r| r.holds),
        rows,
        almost_feasible_all_hold: almost_feasible.iter().all(|r| r.holds),
        almost_feasible,
        membership,
        in_regime: lb_theorem3(n, m, inst.big_m, k).in_regime,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderStat {
    /// Rank, 1-based.
    pub i: usize,
    pub expected: f64,
    pub mean: f64,
    /// Standard error of `mean`.
    pub sigma: f64,
    pub within_3sigma: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderStatistics {
    pub n: usize,
    pub trials: usize,
    pub stats: Vec<OrderStat>,
    pub passed: bool,
}

/// Empirical means of the order statistics of `n` uniforms on `[0,1]`
/// against `i/(n+1)`.
pub fn order_statistics_mc(n: usize, trials: usize, seed: u64) -> Result<OrderStatistics> {
    const CHUNK: usize = 4096;
    if n == 0 || trials < 1000 {
        return Err(Error::Precondition("need n ≥ 1 and at least 1000 trials".into()));
    }
    let sums = (0..trials.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut r = rng::derive_indexed(seed, "order-statistics", c as u64);
            let mut acc = vec![0.0f64; n];
            let mut u = vec![0.0f64; n];
            for _ in 0..CHUNK.min(trials - c * CHUNK) {
                u.iter_mut().for_each(|x| *x = r.gen());
                u.sort_unstable_by(f64::total_cmp);
                acc.iter_mut().zip(&u).for_each(|(a, x)| *a += x);
            }
            acc
        })
        .reduce(|| vec![0.0; n], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect());
    let nf = n as f64;
    let tf = trials as f64;
    let stats: Vec<OrderStat> = (1..=n)
        .map(|i| {
            let f = i as f64;
            let expected = f / (nf + 1.0);
            let var = f * (nf + 1.0 - f) / ((nf + 1.0).powi(2) * (nf + 2.0));
            let sigma = (var / tf).sqrt();
            let mean = sums[i - 1] / tf;
            OrderStat { i, expected, mean, sigma, within_3sigma: (mean - expected).abs() <= 3.0 * sigma }
        })
        .collect();
    let passed = stats.iter().all(|s| s.within_3sigma);
    Ok(OrderStatistics { n, trials, stats, passed })
}
