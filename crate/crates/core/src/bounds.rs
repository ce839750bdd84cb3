//! Closed-form bounds on `dist(P, P^k)` and the phase classification.
//!
//! Plain binary64 arithmetic with natural logarithms. Lower bounds are
//! evaluated even outside the parameter regime where they are known to
//! hold; the result then carries `in_regime == false`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Small,
    Medium,
    Large,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Phase::Small => "Small",
            Phase::Medium => "Medium",
            Phase::Large => "Large",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpperBounds {
    pub ub1: f64,
    pub ub1_simplified: f64,
    pub ub2: f64,
}

impl UpperBounds {
    pub fn best(&self) -> f64 {
        self.ub1.min(self.ub2)
    }
}

/// A formula value together with whether its parameters satisfy the
/// hypotheses under which it is a valid bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flagged {
    pub value: f64,
    pub in_regime: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipBound {
    pub value: f64,
    pub alpha: f64,
    pub eps: f64,
    pub eps_prime: f64,
    pub c: f64,
    pub in_regime: bool,
}

fn log4tn(n: usize, t: usize) -> f64 {
    (4.0 * t as f64 * n as f64).ln()
}

/// Upper bounds for `P = conv{p¹..pᵗ} ⊆ [0,1]ⁿ`; `max_norm` is
/// `maxᵢ ‖pⁱ‖` (not squared).
pub fn ub_theorem1(n: usize, t: usize, k: usize, max_norm: f64) -> UpperBounds {
    let (nf, kf) = (n as f64, k as f64);
    let l = log4tn(n, t);
    let first = nf.powf(0.25) / kf.sqrt() * (8.0 * max_norm).sqrt() * l.sqrt();
    let second = 8.0 * nf.sqrt() / (3.0 * kf) * l;
    UpperBounds {
        ub1: 4.0 * first.max(second),
        ub1_simplified: 8.0 * 2f64.sqrt() * (nf / kf).sqrt() * l.sqrt(),
        ub2: 2.0 * nf.sqrt() * (nf / kf - 1.0),
    }
}

/// Lower bound for random 0/1 polytopes with `t` vertices (holds with
/// probability at least 1/4 when `64 ≤ k ≤ n` and
/// `(k² ln n / 2 + 2k + 1)² ≤ t ≤ eⁿ`).
pub fn lb_theorem2(n: usize, t: usize, k: usize) -> Flagged {
    let (nf, tf, kf) = (n as f64, t as f64, k as f64);
    let lead = (nf.sqrt() / kf.sqrt() * tf.ln().sqrt() / (110.0 * nf.ln().sqrt())).min(nf.sqrt() / 8.0);
    let value = lead * (0.5 - kf.powf(-1.5)) - 3.0 * tf.ln().sqrt();
    let t_min = (0.5 * kf * kf * nf.ln() + 2.0 * kf + 1.0).powi(2);
    let in_regime = 64 <= k && k <= n && t_min <= tf && tf.ln() <= nf;
    Flagged { value, in_regime }
}

/// Lower bound for `(n, m, M)`-PIP hulls (holds with probability at least
/// 1/2 when `n ≥ 50` and `8 ln 8n ≤ m ≤ n`).
pub fn lb_theorem3(n: usize, m: usize, big_m: u64, k: usize) -> PipBound {
    let (nf, mf, bm) = (n as f64, m as f64, big_m as f64);
    let c = k as f64 / nf;
    let inv_alpha = bm / (2.0 * (bm + 1.0)) * (nf - 2.0 * (nf * (8.0 * mf).ln()).sqrt())
        / (c * ((2.0 - c) * nf + 1.0) + 2.0 * (10.0 * c * nf * mf).sqrt());
    let alpha = 1.0 / inv_alpha;
    let eps = 24.0 * (4.0 * nf * nf * mf).ln().sqrt() / nf.sqrt();
    let l8n = (8.0 * nf).ln();
    let eps_prime = 3.0 * l8n.sqrt() / (mf.sqrt() - 2.0 * l8n.sqrt());
    let value = nf.sqrt() / 2.0 * (2.0 / alpha.max(1.0) * (1.0 - eps).powi(2) - (1.0 + eps_prime));
    let in_regime = n >= 50 && 8.0 * l8n <= mf && m <= n;
    PipBound { value, alpha, eps, eps_prime, c, in_regime }
}

/// Phase of `k` for `n`, `t`. Large when `k ≥ n − √(n ln 4tn)`, otherwise
/// Medium when `k ≥ 128 ln 4tn`, otherwise Small.
pub fn phase_classify(n: usize, t: usize, k: usize) -> Phase {
    phase_classify_real(n, t, k as f64)
}

pub fn phase_classify_real(n: usize, t: usize, k: f64) -> Phase {
    let l = log4tn(n, t);
    let nf = n as f64;
    if k >= nf - (nf * l).sqrt() {
        Phase::Large
    } else if k >= 128.0 * l {
        Phase::Medium
    } else {
        Phase::Small
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipParams {
    pub m: usize,
    #[serde(rename = "M")]
    pub big_m: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub t: usize,
    pub k: usize,
    pub pip: Option<PipParams>,
    pub ub1: f64,
    pub ub1_simplified: f64,
    pub ub2: f64,
    pub lb_random01: f64,
    pub lb_random01_in_regime: bool,
    pub lb_pip: Option<PipBound>,
    pub phase: Phase,
}

pub fn bound_report(n: usize, t: usize, k: usize, max_norm: f64, pip: Option<PipParams>) -> BoundReport {
    let ub = ub_theorem1(n, t, k, max_norm);
    let lb2 = lb_theorem2(n, t, k);
    BoundReport {
        n,
        t,
        k,
        pip,
        ub1: ub.ub1,
        ub1_simplified: ub.ub1_simplified,
        ub2: ub.ub2,
        lb_random01: lb2.value,
        lb_random01_in_regime: lb2.in_regime,
        lb_pip: pip.map(|p| lb_theorem3(n, p.m, p.big_m, k)),
        phase: phase_classify(n, t, k),
    }
}

/// One report per `k` in `ks`.
pub fn bounds_sweep(n: usize, t: usize, max_norm: f64, pip: Option<PipParams>, ks: &[usize]) -> Vec<BoundReport> {
    ks.iter().map(|&k| bound_report(n, t, k, max_norm, pip)).collect()
}

#[derive(Serialize)]
struct CsvRow {
    k: usize,
    ub1: f64,
    ub1_simplified: f64,
    ub2: f64,
    lb2: f64,
    lb2_in_regime: bool,
    lb3: Option<f64>,
    lb3_in_regime: Option<bool>,
    phase: Phase,
}

/// CSV with columns
/// `k,ub1,ub1_simplified,ub2,lb2,lb2_in_regime,lb3,lb3_in_regime,phase`;
/// the `lb3` columns are empty without PIP parameters.
pub fn write_bounds_csv<W: Write>(rows: &[BoundReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(CsvRow {
            k: r.k,
            ub1: r.ub1,
            ub1_simplified: r.ub1_simplified,
            ub2: r.ub2,
            lb2: r.lb_random01,
            lb2_in_regime: r.lb_random01_in_regime,
            lb3: r.lb_pip.map(|b| b.value),
            lb3_in_regime: r.lb_pip.map(|b| b.in_regime),
            phase: r.phase,
        })?;
    }
    w.flush()?;
    Ok(())
}
