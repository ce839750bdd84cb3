use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng;

const CHUNK: usize = 8192;

#[derive(Clone, Debug, Serialize)]
pub struct TailEstimate {
    pub expected: f64,
    pub threshold: f64,
    pub hits: u64,
    pub p_hat: f64,
    /// Standard error of `p_hat` under `p = bound`.
    pub sigma: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnticoncentrationReport {
    pub n: usize,
    pub alpha: f64,
    pub trials: usize,
    pub bound: f64,
    pub bernoulli: TailEstimate,
    pub rademacher: TailEstimate,
    pub passed: bool,
}

/// `(e^{−50α²} − e^{−100α²})^{60 ln n}`.
pub fn anticoncentration_bound(n: usize, alpha: f64) -> f64 {
    let a2 = alpha * alpha;
    ((-50.0 * a2).exp() - (-100.0 * a2).exp()).powf(60.0 * (n as f64).ln())
}

/// Empirical upper-tail probabilities of `a·Z` for Bernoulli(1/2) `Z` and
/// of `a·R` for Rademacher `R`, each checked against
/// [`anticoncentration_bound`] with a one-sided 3σ allowance.
pub fn anticoncentration_mc(a: &[f64], alpha: f64, trials: usize, seed: u64) -> Result<AnticoncentrationReport> {
    let n = a.len();
    if n < 2 {
        return Err(Error::Precondition("need n ≥ 2".into()));
    }
    if a.iter().any(|x| !(-1.0..=1.0).contains(x)) {
        return Err(Error::Precondition("a must lie in [-1, 1]^n".into()));
    }
    let nf = n as f64;
    if !(0.0..=nf.sqrt() / 8.0).contains(&alpha) {
        return Err(Error::Precondition(format!("alpha = {alpha} outside [0, √n/8]")));
    }
    if trials < 10_000 {
        return Err(Error::Precondition("at least 10^4 trials".into()));
    }

    let norm1: f64 = a.iter().map(|x| x.abs()).sum();
    let shrink = 1.0 - 1.0 / (nf * nf);
    let b_expected = a.iter().sum::<f64>() / 2.0;
    let b_threshold = b_expected + alpha / (2.0 * nf.sqrt()) * shrink * norm1 - 1.0 / (2.0 * nf * nf);
    let r_threshold = alpha / nf.sqrt() * shrink * norm1 - 1.0 / (nf * nf);

    let chunks = trials.div_ceil(CHUNK);
    let (b_hits, r_hits) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut r = rng::derive_indexed(seed, "anticoncentration", c as u64);
            let len = CHUNK.min(trials - c * CHUNK);
            let (mut bh, mut rh) = (0u64, 0u64);
            for _ in 0..len {
                let (mut zb, mut zr) = (0.0, 0.0);
                let mut bits = 0u64;
                for (i, &ai) in a.iter().enumerate() {
                    if i % 64 == 0 {
                        bits = r.gen();
                    }
                    if bits & 1 == 1 {
                        zb += ai;
                        zr += ai;
                    } else {
                        zr -= ai;
                    }
                    bits >>= 1;
                }
                bh += (zb >= b_threshold) as u64;
                rh += (zr >= r_threshold) as u64;
            }
            (bh, rh)
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));

    let bound = anticoncentration_bound(n, alpha);
    let sigma = (bound * (1.0 - bound) / trials as f64).sqrt();
    let estimate = |expected: f64, threshold: f64, hits: u64| {
        let p_hat = hits as f64 / trials as f64;
        TailEstimate { expected, threshold, hits, p_hat, sigma, passed: p_hat >= bound - 3.0 * sigma }
    };
    let bernoulli = estimate(b_expected, b_threshold, b_hits);
    let rademacher = estimate(0.0, r_threshold, r_hits);
    let passed = bernoulli.passed && rademacher.passed;
    Ok(AnticoncentrationReport { n, alpha, trials, bound, bernoulli, rademacher, passed })
}
