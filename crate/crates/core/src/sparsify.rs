//! Randomized sparsification of a dense separating inequality and the
//! averaged k-sparse cut for a halfspace intersected with a box.
//!
//! The sparsifier `D̃` of a direction `d` with `‖d‖ ≤ 1` has independent
//! coordinates. With `α = k/(2√n)`: if `α|dᵢ| ≥ 1` then `D̃ᵢ = dᵢ`,
//! otherwise `D̃ᵢ = sign(dᵢ)/α` with probability `α|dᵢ|` and `0` otherwise.
//! `1/α = (2/k)√n` is carried exactly as a [`Surd`].

use std::collections::HashMap;
use std::io::Write;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::closure::SupportSet;
use crate::distance::nearest_point;
use crate::error::{Error, Result};
use crate::kernel::{Constraint, VRep};
use crate::rat::{Rat, RatVec};
use crate::rng::{self, LabRng};
use crate::surd::Surd;

#[derive(Clone, Debug)]
enum Coord {
    /// Taken with probability one.
    Fixed(Rat),
    /// `jump` when the uniform draw `U ∈ [0, 2⁶⁴)` satisfies `U ≤ threshold`.
    Random { jump: Surd, threshold: u64 },
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Outcome {
    Fixed,
    Jump,
    Zero,
}

/// Sampling plan for `λD̃` where `w = λd`, `λ² = scale_sq`.
#[derive(Clone, Debug)]
struct Plan {
    coords: Vec<Coord>,
    /// `λ/α = (2/k)√(n·scale_sq)`.
    jump_size: Surd,
}

fn isqrt_floor(x: &Rat) -> BigInt {
    x.floor().sqrt()
}

impl Plan {
    fn new(w: &RatVec, k: usize, n: usize, scale_sq: &Rat) -> Plan {
        let kr = Rat::from_int(k as i64);
        let radicand = &Rat::from_int(n as i64) * scale_sq;
        let four_nd = &Rat::from_int(4) * &radicand;
        let two_128 = Rat::from_bigint(BigInt::one() << 128);
        let jump_size = Surd::root(&Rat::from_int(2) / &kr, radicand.clone());
        let coords = w
            .iter()
            .map(|wi| {
                if wi.is_zero() {
                    return Coord::Zero;
                }
                let k2w2 = &kr.square() * &wi.square();
                if k2w2 >= four_nd {
                    Coord::Fixed(wi.clone())
                } else {
                    // U/2⁶⁴ ≤ α|dᵢ|  ⟺  U² ≤ 2¹²⁸·k²wᵢ²/(4nD)
                    let x = &(&two_128 * &k2w2) / &four_nd;
                    let threshold = isqrt_floor(&x).to_u64().unwrap_or(u64::MAX);
                    let sign = if wi.is_negative() { -Rat::one() } else { Rat::one() };
                    Coord::Random { jump: jump_size.scale(&sign), threshold }
                }
            })
            .collect();
        Plan { coords, jump_size }
    }

    fn draw(&self, rng: &mut LabRng, out: &mut Vec<Outcome>) {
        out.clear();
        for c in &self.coords {
            out.push(match c {
                Coord::Fixed(_) => Outcome::Fixed,
                Coord::Zero => Outcome::Zero,
                Coord::Random { threshold, .. } => {
                    let u: u64 = rng.gen();
                    if u <= *threshold {
                        Outcome::Jump
                    } else {
                        Outcome::Zero
                    }
                }
            });
        }
    }

    fn value(&self, i: usize, o: Outcome) -> Surd {
        match (&self.coords[i], o) {
            (Coord::Fixed(w), _) => Surd::rational(w.clone()),
            (Coord::Random { jump, .. }, Outcome::Jump) => jump.clone(),
            _ => Surd::rational(Rat::zero()),
        }
    }

    fn values(&self, outcomes: &[Outcome]) -> Vec<Surd> {
        outcomes.iter().enumerate().map(|(i, &o)| self.value(i, o)).collect()
    }
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::Precondition(format!("k must lie in 1..={n}, got {k}")));
    }
    Ok(())
}

fn check_direction(d: &RatVec, k: usize, n: usize) -> Result<()> {
    if d.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: d.dim() });
    }
    check_k(n, k)?;
    let norm_sq = d.norm_sq();
    if norm_sq > Rat::one() {
        return Err(Error::NormTooLarge(norm_sq.to_string()));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct SparsifierSample {
    pub d: RatVec,
    pub k: usize,
    pub n: usize,
    /// `α = k/(2√n)`.
    pub alpha: Surd,
    pub sample: Vec<Surd>,
    pub support_size: usize,
}

impl SparsifierSample {
    /// `1/α = (2/k)√n`.
    pub fn inv_alpha(&self) -> Surd {
        Surd::root(Rat::new(2, self.k as i64), Rat::from_int(self.n as i64))
    }

    /// `D̃·a`.
    pub fn dot(&self, a: &RatVec) -> Surd {
        self.sample.iter().zip(a.iter()).fold(Surd::rational(Rat::zero()), |acc, (s, ai)| acc + s.scale(ai))
    }

    /// `|D̃ᵢaᵢ − dᵢaᵢ| ≤ |aᵢ|/α` for every coordinate.
    pub fn envelope_holds(&self, a: &RatVec) -> bool {
        let inv = self.inv_alpha();
        self.sample.iter().zip(self.d.iter()).zip(a.iter()).all(|((s, di), ai)| {
            let dev = (s - &Surd::rational(di.clone())).scale(ai).abs();
            dev <= inv.scale(&ai.abs())
        })
    }
}

/// One draw of `D̃` for `d` (`‖d‖ ≤ 1`). The boundary event `U/2⁶⁴ = α|dᵢ|`
/// counts as a jump; coordinates with `dᵢ = 0` are always zero.
pub fn sample_sparsifier(d: &RatVec, k: usize, n: usize, seed: u64) -> Result<SparsifierSample> {
    check_direction(d, k, n)?;
    let plan = Plan::new(d, k, n, &Rat::one());
    let mut r = rng::derive(seed, "sparsifier");
    let mut outcomes = Vec::with_capacity(n);
    plan.draw(&mut r, &mut outcomes);
    let sample = plan.values(&outcomes);
    let support_size = sample.iter().filter(|s| !s.is_zero()).count();
    Ok(SparsifierSample {
        d: d.clone(),
        k,
        n,
        alpha: Surd::root(Rat::new(k as i64, 2 * n as i64), Rat::from_int(n as i64)),
        sample,
        support_size,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeStats {
    /// `d·a`.
    pub expected: f64,
    pub mean: f64,
    pub variance: f64,
    /// Variance of `D̃·a` under the sampling distribution.
    pub exact_variance: f64,
    /// `(1/α) Σ aᵢ²|dᵢ|`.
    pub variance_bound: f64,
    /// Standard error of the mean, `√(exact_variance/trials)`.
    pub sigma_mean: f64,
    pub mean_within_3sigma: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SparsifierStats {
    pub n: usize,
    pub k: usize,
    pub trials: u64,
    pub probes: Vec<ProbeStats>,
    pub mean_support: f64,
    pub support_exceed_freq: f64,
    /// `1/(4n)`.
    pub support_bound: f64,
    pub support_sigma: f64,
    pub support_within_bound: bool,
    /// `k ≥ 8 ln 4n`.
    pub in_sparsity_regime: bool,
    pub envelope_checks: u64,
    pub envelope_violations: u64,
}

const CHUNK: u64 = 4096;

#[derive(Default)]
struct Partial {
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
    support_total: u64,
    exceed: u64,
    checks: u64,
    violations: u64,
}

/// Monte Carlo statistics of `D̃·a` for each probe `a`, the support size of
/// `D̃`, and an exact envelope check on every sample.
pub fn verify_sparsifier_stats(
    d: &RatVec,
    k: usize,
    n: usize,
    probes: &[RatVec],
    trials: u64,
    seed: u64,
) -> Result<SparsifierStats> {
    check_direction(d, k, n)?;
    if trials < 1000 {
        return Err(Error::Precondition(format!("at least 1000 trials required, got {trials}")));
    }
    if let Some(a) = probes.iter().find(|a| a.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: a.dim() });
    }
    let plan = Plan::new(d, k, n, &Rat::one());
    let outcomes_of = |i: usize| -> &'static [Outcome] {
        match plan.coords[i] {
            Coord::Fixed(_) => &[Outcome::Fixed],
            Coord::Random { .. } => &[Outcome::Jump, Outcome::Zero],
            Coord::Zero => &[Outcome::Zero],
        }
    };
    // per (probe, coordinate, outcome): f64 contribution and exact envelope verdict
    let slot = |o: Outcome| o as usize;
    let mut contrib = vec![vec![[0f64; 3]; n]; probes.len()];
    let mut envelope_ok = vec![vec![[true; 3]; n]; probes.len()];
    for (pi, a) in probes.iter().enumerate() {
        for i in 0..n {
            let bound = plan.jump_size.scale(&a[i].abs());
            for &o in outcomes_of(i) {
                let v = plan.value(i, o).scale(&a[i]);
                let dev = (&v - &Surd::rational(&d[i] * &a[i])).abs();
                contrib[pi][i][slot(o)] = v.to_f64();
                envelope_ok[pi][i][slot(o)] = dev <= bound;
            }
        }
    }

    let chunks = trials.div_ceil(CHUNK);
    let partials: Vec<Partial> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut r = rng::derive_indexed(seed, "sparsifier/trials", c);
            let count = CHUNK.min(trials - c * CHUNK);
            let mut acc = Partial {
                sum: vec![0.0; probes.len()],
                sum_sq: vec![0.0; probes.len()],
                ..Default::default()
            };
            let mut outcomes = Vec::with_capacity(n);
            for _ in 0..count {
                plan.draw(&mut r, &mut outcomes);
                let support = outcomes.iter().filter(|&&o| o != Outcome::Zero).count() as u64;
                acc.support_total += support;
                if support > k as u64 {
                    acc.exceed += 1;
                }
                for pi in 0..probes.len() {
                    let mut x = 0.0;
                    for (i, &o) in outcomes.iter().enumerate() {
                        x += contrib[pi][i][slot(o)];
                        acc.checks += 1;
                        if !envelope_ok[pi][i][slot(o)] {
                            acc.violations += 1;
                        }
                    }
                    acc.sum[pi] += x;
                    acc.sum_sq[pi] += x * x;
                }
            }
            acc
        })
        .collect();

    let mut total = Partial { sum: vec![0.0; probes.len()], sum_sq: vec![0.0; probes.len()], ..Default::default() };
    for p in &partials {
        for pi in 0..probes.len() {
            total.sum[pi] += p.sum[pi];
            total.sum_sq[pi] += p.sum_sq[pi];
        }
        total.support_total += p.support_total;
        total.exceed += p.exceed;
        total.checks += p.checks;
        total.violations += p.violations;
    }

    let tf = trials as f64;
    let inv_alpha = plan.jump_size.to_f64();
    let probes_out = probes
        .iter()
        .enumerate()
        .map(|(pi, a)| {
            let expected = d.dot(a).to_f64();
            let mean = total.sum[pi] / tf;
            let variance = (total.sum_sq[pi] / tf - mean * mean).max(0.0) * tf / (tf - 1.0);
            let mut exact_variance = 0.0;
            let mut variance_bound = 0.0;
            for i in 0..n {
                let (ai, di) = (a[i].to_f64(), d[i].to_f64());
                variance_bound += inv_alpha * ai * ai * di.abs();
                if let Coord::Random { .. } = plan.coords[i] {
                    exact_variance += ai * ai * (di.abs() * inv_alpha - di * di);
                }
            }
            let sigma_mean = (exact_variance / tf).sqrt();
            let slack = 1e-12 * expected.abs().max(1.0);
            ProbeStats {
                expected,
                mean,
                variance,
                exact_variance,
                variance_bound,
                sigma_mean,
                mean_within_3sigma: (mean - expected).abs() <= 3.0 * sigma_mean + slack,
            }
        })
        .collect();

    let q = 1.0 / (4.0 * n as f64);
    let support_exceed_freq = total.exceed as f64 / tf;
    let support_sigma = (q * (1.0 - q) / tf).sqrt();
    Ok(SparsifierStats {
        n,
        k,
        trials,
        probes: probes_out,
        mean_support: total.support_total as f64 / tf,
        support_exceed_freq,
        support_bound: q,
        support_sigma,
        support_within_bound: support_exceed_freq <= q + 3.0 * support_sigma,
        in_sparsity_regime: k as f64 >= 8.0 * (4.0 * n as f64).ln(),
        envelope_checks: total.checks,
        envelope_violations: total.violations,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Attempt {
    pub index: usize,
    pub support_size: usize,
    pub lemma_conditions: bool,
    /// `min(λd̃u − rhs, rhs − maxᵢ λd̃pⁱ)` for k-sparse draws.
    pub margin: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SparseCut {
    /// Integer-coefficient k-sparse cut, valid for `P` and violated by `u`.
    pub cut: Constraint,
    pub support: Vec<usize>,
    /// Whether the draw met both sparsified-separation conditions; otherwise
    /// the cut comes from the draw's support alone.
    pub lemma_conditions: bool,
    /// `λd̃`, present when `lemma_conditions` holds.
    pub scaled_coeffs: Option<Vec<Surd>>,
    /// `λd̃·v + λ²/2`.
    pub scaled_rhs: Option<Surd>,
    pub nearest: RatVec,
    pub dist_sq: Rat,
    pub tries: usize,
    pub attempts: Vec<Attempt>,
}

fn surd_dot(s: &[Surd], x: &RatVec) -> Surd {
    s.iter().zip(x.iter()).filter(|(_, xi)| !xi.is_zero()).fold(Surd::rational(Rat::zero()), |acc, (si, xi)| acc + si.scale(xi))
}

/// Nearest-point cut separating `u_S` from `P` projected on `S`, lifted back.
fn restricted_cut(p: &VRep, u: &RatVec, support: &[usize]) -> Result<Option<Constraint>> {
    let ps = p.project(support);
    let us = u.select(support);
    let (vs, dist_sq) = nearest_point(&us, &ps)?;
    if dist_sq.is_zero() {
        return Ok(None);
    }
    let a = &us - &vs;
    let cut = Constraint::new(a.lift(support, p.dim), a.dot(&vs)).canonical_inequality();
    let valid = p.vertices.iter().all(|x| cut.satisfied_by(x)) && !cut.satisfied_by(u);
    Ok(valid.then_some(cut))
}

pub fn default_max_tries(n: usize) -> usize {
    64 * n
}

/// Searches for a k-sparse cut separating `u` from `P` by sparsifying the
/// nearest-point inequality `(u − v)·x ≤ (u − v)·v`.
///
/// A draw is accepted when `λd̃` is k-sparse with `λd̃·pⁱ ≤ λd̃·v + λ²/2` for
/// every vertex and `λd̃·u > λd̃·v + λ²/2`. If no draw within `max_tries`
/// qualifies, the first k-sparse draw whose support alone separates `u` is
/// returned with `lemma_conditions == false`.
pub fn find_sparse_separator(p: &VRep, u: &RatVec, k: usize, max_tries: Option<usize>, seed: u64) -> Result<SparseCut> {
    let n = p.dim;
    if u.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: u.dim() });
    }
    check_k(n, k)?;
    let (v, dist_sq) = nearest_point(u, p)?;
    if dist_sq.is_zero() {
        return Err(Error::Precondition("point lies in the polytope".into()));
    }
    let w = u - &v;
    let half = &dist_sq / &Rat::from_int(2);

    let dense_support = w.support();
    if dense_support.len() <= k {
        let rhs = w.dot(&v);
        return Ok(SparseCut {
            cut: Constraint::new(w.clone(), rhs.clone()).canonical_inequality(),
            support: dense_support,
            lemma_conditions: true,
            scaled_coeffs: Some(w.iter().cloned().map(Surd::rational).collect()),
            scaled_rhs: Some(Surd::rational(&rhs + &half)),
            nearest: v,
            dist_sq,
            tries: 0,
            attempts: vec![],
        });
    }

    let max_tries = max_tries.unwrap_or_else(|| default_max_tries(n));
    let plan = Plan::new(&w, k, n, &dist_sq);
    let mut r = rng::derive(seed, "separator");
    let mut outcomes = Vec::with_capacity(n);
    let mut attempts = Vec::with_capacity(max_tries);
    let mut cache: HashMap<Vec<usize>, Option<Constraint>> = HashMap::new();
    let mut fallback: Option<(Vec<usize>, Constraint, usize)> = None;
    let mut best_margin = f64::NEG_INFINITY;

    for index in 0..max_tries {
        plan.draw(&mut r, &mut outcomes);
        let scaled = plan.values(&outcomes);
        let support: Vec<usize> = (0..n).filter(|&i| !scaled[i].is_zero()).collect();
        if support.is_empty() || support.len() > k {
            attempts.push(Attempt { index, support_size: support.len(), lemma_conditions: false, margin: None });
            continue;
        }
        let rhs = &surd_dot(&scaled, &v) + &Surd::rational(half.clone());
        let cut_u = &surd_dot(&scaled, u) - &rhs;
        let worst = p.vertices.iter().map(|x| surd_dot(&scaled, x)).max().expect("nonempty polytope");
        let slack = &rhs - &worst;
        let ok = cut_u.signum() > 0 && slack.signum() >= 0;
        let margin = cut_u.to_f64().min(slack.to_f64());
        best_margin = best_margin.max(margin);
        attempts.push(Attempt { index, support_size: support.len(), lemma_conditions: ok, margin: Some(margin) });

        if !ok && fallback.is_some() {
            continue;
        }
        let restricted = match cache.get(&support) {
            Some(c) => c.clone(),
            None => {
                let c = restricted_cut(p, u, &support)?;
                cache.insert(support.clone(), c.clone());
                c
            }
        };
        match (ok, restricted) {
            (true, Some(cut)) => {
                return Ok(SparseCut {
                    cut,
                    support,
                    lemma_conditions: true,
                    scaled_coeffs: Some(scaled),
                    scaled_rhs: Some(rhs),
                    nearest: v,
                    dist_sq,
                    tries: index + 1,
                    attempts,
                });
            }
            (_, Some(cut)) if fallback.is_none() => fallback = Some((support, cut, index + 1)),
            _ => {}
        }
    }
    match fallback {
        Some((support, cut, _)) => Ok(SparseCut {
            cut,
            support,
            lemma_conditions: false,
            scaled_coeffs: None,
            scaled_rhs: None,
            nearest: v,
            dist_sq,
            tries: max_tries,
            attempts,
        }),
        None => Err(Error::NotSeparated { tries: max_tries, best_margin }),
    }
}

/// CSV of separator attempts: `index,support_size,lemma_conditions,margin`.
pub fn write_attempts_csv<W: Write>(attempts: &[Attempt], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for a in attempts {
        w.serialize(a)?;
    }
    w.flush()?;
    Ok(())
}

fn box_extremes(a: &RatVec, lo: &RatVec, hi: &RatVec) -> (Vec<Rat>, Vec<Rat>) {
    a.iter()
        .zip(lo.iter().zip(hi.iter()))
        .map(|(ai, (l, h))| {
            let (x, y) = (ai * l, ai * h);
            if x <= y {
                (x, y)
            } else {
                (y, x)
            }
        })
        .unzip()
}

fn check_halfspace_box(a: &RatVec, b: &Rat, lo: &RatVec, hi: &RatVec) -> Result<(Vec<Rat>, Vec<Rat>)> {
    let n = a.dim();
    if lo.dim() != n || hi.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: lo.dim().min(hi.dim()) });
    }
    let (mins, maxs) = box_extremes(a, lo, hi);
    let lo_sum: Rat = mins.iter().sum();
    let hi_sum: Rat = maxs.iter().sum();
    if &lo_sum > b || &hi_sum <= b {
        return Err(Error::DegenerateBox);
    }
    Ok((mins, maxs))
}

/// `Σ_{i∈I} aᵢxᵢ ≤ b − Σ_{i∉I} min_{x∈box} aᵢxᵢ`, valid for `{ax ≤ b} ∩ box`.
pub fn family_member(a: &RatVec, b: &Rat, support: &SupportSet, lo: &RatVec, hi: &RatVec) -> Result<Constraint> {
    let (mins, _) = check_halfspace_box(a, b, lo, hi)?;
    let n = a.dim();
    let mut inside = vec![false; n];
    for &i in support.indices() {
        inside[i] = true;
    }
    let mut rhs = b.clone();
    for i in (0..n).filter(|&i| !inside[i]) {
        rhs -= &mins[i];
    }
    Ok(Constraint::new(a.select(support.indices()).lift(support.indices(), n), rhs))
}

/// Average of the family members over all supports of size `k`:
/// `a·x ≤ (n/k)·b − (n/k − 1)·Σᵢ min_{x∈box} aᵢxᵢ`. On `[−1,1]ⁿ` this is
/// `a·x ≤ b + (n/k − 1)(b + ‖a‖₁)`.
pub fn averaged_sparse_cut(a: &RatVec, b: &Rat, k: usize, lo: &RatVec, hi: &RatVec) -> Result<Constraint> {
    let n = a.dim();
    check_k(n, k)?;
    let (mins, _) = check_halfspace_box(a, b, lo, hi)?;
    let ratio = Rat::new(n as i64, k as i64);
    let spread: Rat = mins.iter().map(|m| -m).sum();
    let rhs = &(&ratio * b) + &(&(&ratio - &Rat::one()) * &spread);
    Ok(Constraint::new(a.clone(), rhs))
}
