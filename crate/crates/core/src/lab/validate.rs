use serde::Serialize;

use crate::bounds::ub_theorem1;
use crate::closure::{bounding_box, sparse_closure};
use crate::distance::{dist_to_vertices, shoot};
use crate::error::Result;
use crate::extform::{build_tree_extform, check_prop3};
use crate::instances::{gen_halfcube, gen_random01, gen_simplex};
use crate::kernel::VRep;
use crate::rat::{Rat, RatVec};
use crate::sparsify::verify_sparsifier_stats;

use super::anticoncentration::anticoncentration_mc;
use super::pip::order_statistics_mc;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub passed: bool,
}

fn check(name: &str, run: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match run() {
        Ok((passed, detail)) => Check { name: name.into(), passed, detail },
        Err(e) => Check { name: name.into(), passed: false, detail: format!("error: {e}") },
    }
}

fn exact_dists(p: &VRep) -> Result<Vec<Rat>> {
    let (lo, hi) = bounding_box(p);
    (1..=p.dim)
        .map(|k| {
            let c = sparse_closure(p, k, &lo, &hi)?;
            Ok(dist_to_vertices(p, &c.vertex_set()?.vertices)?.dist_sq)
        })
        .collect()
}

/// A quick pass over the main properties at small sizes.
pub fn validate(seed: u64) -> ValidationReport {
    let mut checks = Vec::new();

    checks.push(check("simplex distances", || {
        let n = 5;
        let got = exact_dists(&gen_simplex(n)?)?;
        let ok = got.iter().enumerate().all(|(i, d)| {
            let k = i as i64 + 1;
            *d == Rat::from_int(n as i64) * (Rat::new(1, k) - Rat::new(1, n as i64)).square()
        });
        Ok((ok, format!("n = {n}")))
    }));

    checks.push(check("half-cube distances", || {
        let n = 4i64;
        let got = exact_dists(&gen_halfcube(n as usize)?)?;
        let ok = got.iter().enumerate().all(|(i, d)| {
            let k = i as i64 + 1;
            let want = if 2 * k <= n {
                Rat::new(n, 4)
            } else {
                Rat::from_int(n) * (Rat::new(n, 2 * k) - Rat::new(1, 2)).square()
            };
            *d == want
        });
        Ok((ok, format!("n = {n}")))
    }));

    checks.push(check("sandwich and shooting", || {
        let mut rows = 0;
        for s in 0..6 {
            let p = gen_random01(5, 10, seed.wrapping_add(s))?.vrep;
            let (lo, hi) = bounding_box(&p);
            let max_norm = p.max_vertex_norm_sq().to_f64().sqrt();
            for k in 1..=p.dim {
                let c = sparse_closure(&p, k, &lo, &hi)?;
                let d = dist_to_vertices(&p, &c.vertex_set()?.vertices)?.dist_sq;
                let ub = ub_theorem1(p.dim, p.vertices.len(), k, max_norm);
                let lb = shoot(&p, &c.closure, 20, seed, &[])?.best_lb_sq;
                if d.to_f64().sqrt() > ub.ub1.min(ub.ub2) + 1e-9 || lb > d {
                    return Ok((false, format!("seed offset {s}, k = {k}")));
                }
                rows += 1;
            }
        }
        Ok((true, format!("{rows} rows")))
    }));

    checks.push(check("tree extended formulation", || {
        let t = build_tree_extform(4)?;
        let p = gen_halfcube(4)?;
        let r = check_prop3(&p, &t.set, 2)?;
        Ok((r.contained, format!("equals closure: {}", r.equals_closure)))
    }));

    checks.push(check("sparsifier statistics", || {
        let d: RatVec =
            [Rat::new(1, 2), Rat::new(-1, 4), Rat::new(1, 8), Rat::zero(), Rat::new(1, 3), Rat::new(1, 5)].into_iter().collect();
        let probes = vec![RatVec::ones(6)];
        let s = verify_sparsifier_stats(&d, 4, 6, &probes, 5000, seed)?;
        let ok = s.probes.iter().all(|p| p.mean_within_3sigma) && s.envelope_violations == 0;
        Ok((ok, format!("{} envelope checks", s.envelope_checks)))
    }));

    checks.push(check("anticoncentration", || {
        let r = anticoncentration_mc(&[1.0; 16], 0.25, 20_000, seed)?;
        Ok((r.passed, format!("p = {:.4}, bound = {:.3e}", r.bernoulli.p_hat, r.bound)))
    }));

    checks.push(check("order statistics", || {
        let r = order_statistics_mc(10, 20_000, seed)?;
        Ok((r.passed, format!("n = {}", r.n)))
    }));

    let passed = checks.iter().all(|c| c.passed);
    ValidationReport { checks, passed }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_passes() {
        let r = validate(1);
        for c in &r.checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
        assert!(r.passed);
    }
}
