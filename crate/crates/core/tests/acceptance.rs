//! End-to-end acceptance suite. Each test prints one `PASS`/`FAIL` line
//! straight to stdout (bypassing the test harness capture) and then
//! asserts.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use sparsecut::bounds::{lb_theorem3, ub_theorem1};
use sparsecut::closure::{bounding_box, k_subsets, monotone_halfspace_closure, sparse_closure, symmetric_box, SupportSet};
use sparsecut::distance::{cut_depth, dist_to_vertices, exact_dist, shoot};
use sparsecut::extform::{build_tree_extform, check_prop3, ExtendedSet, Tau};
use sparsecut::instances::{gen_halfcube, gen_hyperplane_slice, gen_pip, gen_random01, gen_simplex};
use sparsecut::kernel::{equal_hreps, project, v_to_h};
use sparsecut::lab::{aggregated_cut_frequency, anticoncentration_mc, order_statistics_mc, sweep, SweepOptions};
use sparsecut::lp::maximize;
use sparsecut::rng;
use sparsecut::sparsify::{averaged_sparse_cut, family_member, verify_sparsifier_stats};
use sparsecut::{Constraint, HRep, Rat, RatVec, VRep};

fn report(id: u32, name: &str, ok: bool, detail: &str) {
    let status = if ok { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    writeln!(out, "[{status}] criterion {id:>2}: {name}: {detail}").unwrap();
    out.flush().unwrap();
}

fn closure_dist(p: &VRep, k: usize) -> (HRep, Rat) {
    let (lo, hi) = bounding_box(p);
    let c = sparse_closure(p, k, &lo, &hi).unwrap();
    let d = dist_to_vertices(p, &c.vertex_set().unwrap().vertices).unwrap().dist_sq;
    (c.closure, d)
}

fn simplex_formula(n: i64, k: i64) -> Rat {
    Rat::from_int(n) * (Rat::new(1, k) - Rat::new(1, n)).square()
}

fn halfcube_formula(n: i64, k: i64) -> Rat {
    if 2 * k <= n {
        Rat::new(n, 4)
    } else {
        Rat::from_int(n) * (Rat::new(n, 2 * k) - Rat::new(1, 2)).square()
    }
}

fn facets(p: &VRep) -> Vec<Constraint> {
    let h = v_to_h(p).unwrap();
    h.inequalities.iter().cloned().chain(h.equations.iter().flat_map(|e| [e.clone(), e.negated()])).collect()
}

/// The mixed instance suite used by the sandwich and soundness criteria.
fn suite() -> Vec<(String, VRep)> {
    let mut out = Vec::new();
    for n in 3..=7 {
        for &t in &[6usize, 10, 16, 24, 30] {
            if t > 1 << n {
                continue;
            }
            for seed in 0..8u64 {
                let p = gen_random01(n, t, seed * 1000 + n as u64).unwrap().vrep;
                out.push((format!("random01 n={n} t={t} seed={seed}"), p));
            }
        }
    }
    for seed in 0..16u64 {
        out.push((format!("random01 n=8 t=20 seed={seed}"), gen_random01(8, 20, seed).unwrap().vrep));
    }
    for &(n, w, t) in &[(5usize, 2usize, 8usize), (6, 3, 12), (7, 3, 15), (8, 4, 16)] {
        for seed in 0..8u64 {
            out.push((format!("slice n={n} w={w} t={t} seed={seed}"), gen_hyperplane_slice(n, w, t, seed).unwrap()));
        }
    }
    for &(n, m, big_m) in &[(5usize, 2usize, 5u64), (6, 2, 10), (7, 3, 10), (8, 3, 10)] {
        for seed in 0..4u64 {
            let inst = gen_pip(n, m, big_m, seed).unwrap();
            out.push((format!("pip n={n} m={m} M={big_m} seed={seed}"), inst.hull));
        }
    }
    out
}

#[test]
fn criterion_01_simplex_exactness() {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut count = 0;
    for n in 2..=6usize {
        let p = gen_simplex(n).unwrap();
        let (lo, hi) = bounding_box(&p);
        for k in 1..=n {
            let c = sparse_closure(&p, k, &lo, &hi).unwrap();
            let d = exact_dist(&p, &c.closure).unwrap().dist_sq;
            if d != simplex_formula(n as i64, k as i64) {
                bad.push(format!("n={n} k={k} got {d}"));
            }
            count += 1;
        }
    }
    let elapsed = start.elapsed();
    let ok = bad.is_empty() && elapsed < Duration::from_secs(30);
    report(1, "simplex dist_sq = n(1/k - 1/n)^2", ok, &format!("{count} cases, {} wrong, {elapsed:.2?}", bad.len()));
    assert!(ok, "{bad:?} in {elapsed:?}");
}

#[test]
fn criterion_02_halfcube_exactness() {
    let mut bad = Vec::new();
    for n in [2usize, 4, 6] {
        let p = gen_halfcube(n).unwrap();
        for k in 1..=n {
            let (_, d) = closure_dist(&p, k);
            if d != halfcube_formula(n as i64, k as i64) {
                bad.push(format!("n={n} k={k} got {d}"));
            }
        }
    }
    let ok = bad.is_empty();
    report(2, "half-cube dist_sq = n/4 (k <= n/2), n(n/2k - 1/2)^2 (k > n/2)", ok, &format!("{bad:?}"));
    assert!(ok);
}

#[test]
fn criterion_03_sandwich() {
    let instances = suite();
    let results: Vec<(usize, Vec<String>)> = instances
        .par_iter()
        .map(|(name, p)| {
            let max_norm = p.max_vertex_norm_sq().to_f64().sqrt();
            let mut bad = Vec::new();
            for k in 1..=p.dim {
                let (_, d) = closure_dist(p, k);
                let ub = ub_theorem1(p.dim, p.vertices.len(), k, max_norm);
                let dist = d.to_f64().sqrt();
                if dist > ub.ub1.min(ub.ub2) + 1e-9 {
                    bad.push(format!("{name} k={k}: {dist} > min({}, {})", ub.ub1, ub.ub2));
                }
            }
            (p.dim, bad)
        })
        .collect();
    let rows: usize = results.iter().map(|r| r.0).sum();
    let bad: Vec<&String> = results.iter().flat_map(|r| &r.1).collect();
    let ok = instances.len() >= 200 && bad.is_empty();
    report(3, "sqrt(dist_sq) <= min(ub1, ub2) + 1e-9", ok, &format!("{} instances, {rows} (instance, k) pairs, {} violations", instances.len(), bad.len()));
    assert!(ok, "{bad:?}");
}

#[test]
fn criterion_04_shooting_soundness() {
    let start = Instant::now();
    let instances = suite();
    let sound: Vec<String> = instances
        .par_iter()
        .step_by(3)
        .flat_map_iter(|(name, p)| {
            let mut bad = Vec::new();
            for k in 1..=p.dim {
                let (q, d) = closure_dist(p, k);
                let lb = shoot(p, &q, 64, 17, &[]).unwrap().best_lb_sq;
                if lb > d {
                    bad.push(format!("{name} k={k}: {lb} > {d}"));
                }
            }
            bad
        })
        .collect();
    let mut inexact = Vec::new();
    for n in 2..=6usize {
        let mut cases = vec![("simplex", gen_simplex(n).unwrap(), simplex_formula as fn(i64, i64) -> Rat)];
        if n % 2 == 0 {
            cases.push(("half-cube", gen_halfcube(n).unwrap(), halfcube_formula));
        }
        for (label, p, f) in cases {
            for k in 1..=n {
                let (q, d) = closure_dist(&p, k);
                let lb = shoot(&p, &q, 0, 0, &[]).unwrap().best_lb_sq;
                if lb != d || d != f(n as i64, k as i64) {
                    inexact.push(format!("{label} n={n} k={k}: {lb} vs {d}"));
                }
            }
        }
    }
    let ok = sound.is_empty() && inexact.is_empty();
    report(4, "shooting lb <= dist; exact on simplex and half-cube with ±e", ok, &format!("unsound {sound:?}, inexact {inexact:?}, {:.2?}", start.elapsed()));
    assert!(ok);
}

#[test]
fn criterion_05_cut_depth() {
    let start = Instant::now();
    let mut instances: Vec<(String, VRep)> = suite().into_iter().step_by(4).collect();
    for n in 2..=6 {
        instances.push((format!("simplex n={n}"), gen_simplex(n).unwrap()));
        if n % 2 == 0 {
            instances.push((format!("half-cube n={n}"), gen_halfcube(n).unwrap()));
        }
    }
    let results: Vec<(usize, Vec<String>)> = instances
        .par_iter()
        .map(|(name, p)| {
            let fs = facets(p);
            let mut bad = Vec::new();
            let mut checked = 0;
            for k in 1..=p.dim {
                let (q, d) = closure_dist(p, k);
                for f in &fs {
                    let depth = cut_depth(&f.a, &f.b, &q).unwrap();
                    checked += 1;
                    if depth.gamma_sq_scaled > d {
                        bad.push(format!("{name} k={k}: {} > {d}", depth.gamma_sq_scaled));
                    }
                }
            }
            (checked, bad)
        })
        .collect();
    let checked: usize = results.iter().map(|r| r.0).sum();
    let bad: Vec<&String> = results.iter().flat_map(|r| &r.1).collect();
    let ok = bad.is_empty();
    report(5, "gamma'^2/|alpha|^2 <= dist_sq for every facet", ok, &format!("{checked} (facet, k) pairs, {} violations, {:.2?}", bad.len(), start.elapsed()));
    assert!(ok, "{bad:?}");
}

#[test]
fn criterion_06_tree_formulation() {
    let start = Instant::now();
    let mut dist_mismatch = Vec::new();
    let mut proj_fail = Vec::new();
    for n in [2usize, 4, 8] {
        let p = gen_halfcube(n).unwrap();
        for k in 1..=n / 2 {
            let (_, d) = closure_dist(&p, k);
            if d != Rat::new(n as i64, 2) {
                dist_mismatch.push(format!("n={n} k={k}: dist_sq = {d}, want {}", Rat::new(n as i64, 2)));
            }
        }
        let tree = build_tree_extform(n).unwrap();
        let r = check_prop3(&p, &tree.set, 3).unwrap();
        if !r.equals_p {
            proj_fail.push(n);
        }
    }
    let elapsed = start.elapsed();
    let ok = dist_mismatch.is_empty() && proj_fail.is_empty() && elapsed < Duration::from_secs(120);
    report(
        6,
        "half-cube dist_sq = n/2 for k <= n/2 and proj_x(Q^3) = P",
        ok,
        &format!("dist mismatches {dist_mismatch:?}; projection failures {proj_fail:?}; {elapsed:.2?}"),
    );
    assert!(ok);
}

fn random_extended(seed: u64) -> (VRep, ExtendedSet) {
    let mut r = rng::derive(seed, "acceptance/extended");
    let (n, m) = if seed % 2 == 0 { (3, 1) } else { (2, 2) };
    let count = r.gen_range(3..7);
    let pts: Vec<RatVec> = (0..count).map(|_| (0..n + m).map(|_| Rat::from_int(r.gen_range(0..3))).collect()).collect();
    let qv = VRep::from_points(n + m, pts).unwrap();
    let q = v_to_h(&qv).unwrap();
    let p = qv.project(&(0..n).collect::<Vec<_>>());
    (p, ExtendedSet::new(q, n).unwrap())
}

#[test]
fn criterion_07_extended_containment() {
    let mut bad = Vec::new();
    for n in [2usize, 4] {
        let tree = build_tree_extform(n).unwrap();
        let p = gen_halfcube(n).unwrap();
        for k in 1..=3 {
            if !check_prop3(&p, &tree.set, k).unwrap().contained {
                bad.push(format!("tree n={n} k={k}"));
            }
        }
    }
    let mut tau_checks = 0;
    for seed in 0..20u64 {
        let (p, set) = random_extended(seed);
        for k in 1..=set.n + set.m {
            if !check_prop3(&p, &set, k).unwrap().contained {
                bad.push(format!("random seed={seed} k={k}"));
            }
        }
        let dim = set.n + set.m;
        let x: Vec<usize> = set.x_indices();
        let proj = project(&set.q, &x);
        for size in 1..=dim {
            for idx in k_subsets(dim, size) {
                let ix: Vec<usize> = idx.iter().copied().filter(|&i| i < set.n).collect();
                let rhs = project(&set.q.tau(&SupportSet::new(idx.clone(), dim).unwrap()).unwrap(), &x);
                let same = if ix.is_empty() {
                    rhs.inequalities.is_empty() && rhs.equations.is_empty()
                } else {
                    let lhs = proj.tau(&SupportSet::new(ix, set.n).unwrap()).unwrap();
                    equal_hreps(&lhs, &rhs).unwrap() && equal_hreps(&rhs, &lhs).unwrap()
                };
                tau_checks += 1;
                if !same {
                    bad.push(format!("tau seed={seed} I={idx:?}"));
                }
            }
        }
    }
    let ok = bad.is_empty();
    report(7, "proj_x(Q^k) within P^k; tau commutes with proj_x", ok, &format!("{tau_checks} tau checks, failures {bad:?}"));
    assert!(ok);
}

#[test]
fn criterion_08_sparsifier_statistics() {
    let uniform = |n: usize, v: Rat| RatVec::new(vec![v; n]);
    let graded = |n: usize| -> RatVec {
        // ±(i+1)/8n, squared norm about n/192
        (0..n)
            .map(|i| {
                let sign = if i % 2 == 0 { 1 } else { -1 };
                Rat::new(sign * (i as i64 + 1), 8 * n as i64)
            })
            .collect()
    };
    let grid: Vec<(usize, usize, RatVec)> = vec![
        (16, 4, uniform(16, Rat::new(1, 4))),
        (16, 8, graded(16)),
        (64, 45, uniform(64, Rat::new(1, 8))),
        (64, 48, graded(64)),
        (128, 64, uniform(128, Rat::new(1, 12))),
        (128, 80, graded(128)),
    ];
    let mut lines = Vec::new();
    let mut ok = true;
    for (i, (n, k, d)) in grid.iter().enumerate() {
        assert!(d.norm_sq() <= Rat::one());
        let mut r = rng::derive(i as u64, "acceptance/probes");
        let signs: RatVec = (0..*n).map(|_| Rat::from_int(if r.gen::<bool>() { 1 } else { -1 })).collect();
        let probes = vec![RatVec::ones(*n), signs, RatVec::unit(*n, 0)];
        let s = verify_sparsifier_stats(d, *k, *n, &probes, 100_000, 31 + i as u64).unwrap();
        let means = s.probes.iter().all(|p| p.mean_within_3sigma);
        let support = !s.in_sparsity_regime || s.support_within_bound;
        let envelope = s.envelope_violations == 0;
        ok &= means && support && envelope;
        lines.push(format!(
            "n={n} k={k}: means {means}, support freq {:.2e} vs {:.2e} (regime {}), envelope {}/{}",
            s.support_exceed_freq, s.support_bound, s.in_sparsity_regime, s.envelope_checks - s.envelope_violations, s.envelope_checks
        ));
    }
    report(8, "sparsifier mean, support and envelope", ok, &lines.join("; "));
    assert!(ok);
}

#[test]
fn criterion_09_averaged_sparse_cut() {
    let mut r = rng::derive(9, "acceptance/monotone");
    let mut bad = Vec::new();
    let mut count = 0;
    while count < 50 {
        let n = r.gen_range(2..=8usize);
        let a: RatVec = (0..n).map(|_| Rat::from_int(r.gen_range(0..=5))).collect();
        let norm1 = a.norm1();
        if norm1.is_zero() {
            continue;
        }
        let span = norm1.numer().to_string().parse::<i64>().unwrap();
        let b = Rat::new(r.gen_range(-2 * span + 1..2 * span), 2);
        let (lo, hi) = symmetric_box(n);
        let mut p_h = HRep::boxed(&lo, &hi);
        p_h.inequalities.push(Constraint::new(a.clone(), b.clone()));
        for k in 1..=n {
            let avg = averaged_sparse_cut(&a, &b, k, &lo, &hi).unwrap();
            let expect = &b + &(&(Rat::new(n as i64, k as i64) - Rat::one()) * &(&b + &norm1));
            if avg.b != expect {
                bad.push(format!("rhs n={n} k={k}"));
            }
            let closure = monotone_halfspace_closure(&a, &b, k, &lo, &hi).unwrap();
            let best = maximize(&a, &closure.closure).value.unwrap();
            if best > avg.b {
                bad.push(format!("averaged cut invalid n={n} k={k}"));
            }
            for s in k_subsets(n, k) {
                let member = family_member(&a, &b, &SupportSet::new(s.clone(), n).unwrap(), &lo, &hi).unwrap();
                if member.a.is_zero() {
                    continue;
                }
                let best = maximize(&member.a, &p_h).value.unwrap();
                if best > member.b {
                    bad.push(format!("member invalid n={n} I={s:?}"));
                }
            }
        }
        count += 1;
    }
    let ok = bad.is_empty();
    report(9, "averaged sparse cut valid for P^k, family members valid for P", ok, &format!("{count} instances, failures {bad:?}"));
    assert!(ok);
}

#[test]
fn criterion_10_anticoncentration() {
    let mut lines = Vec::new();
    let mut ok = true;
    for n in [16usize, 32] {
        let vectors = [("e", vec![1.0; n]), ("graded", (1..=n).map(|i| i as f64 / n as f64).collect())];
        for (label, a) in &vectors {
            for alpha in [0.1, 0.25, 0.5] {
                let r = anticoncentration_mc(a, alpha, 1_000_000, 10 + n as u64).unwrap();
                ok &= r.passed;
                lines.push(format!(
                    "n={n} a={label} alpha={alpha}: {:.4}/{:.4} vs {:.2e}",
                    r.bernoulli.p_hat, r.rademacher.p_hat, r.bound
                ));
            }
        }
    }
    report(10, "anticoncentration tail >= bound - 3 sigma", ok, &lines.join("; "));
    assert!(ok);
}

/// Hand evaluation of the packing lower bound, arranged differently from
/// the library: everything expanded over a common denominator first.
fn theorem3_by_hand(n: f64, m: f64, big_m: f64, k: f64) -> f64 {
    let c = k / n;
    let numer = big_m * (n - 2.0 * (n * (8.0 * m).ln()).sqrt());
    let denom = 2.0 * (big_m + 1.0) * (2.0 * c * n - c * c * n + c + 2.0 * (10.0 * c * n * m).sqrt());
    let alpha = denom / numer;
    let eps = 24.0 / n.sqrt() * (2.0 * n.ln() + (4.0 * m).ln()).sqrt();
    let r = (3.0 * 2f64.ln() + n.ln()).sqrt();
    let eps_prime = 3.0 * r / (m.sqrt() - 2.0 * r);
    let lead = if alpha > 1.0 { 2.0 / alpha } else { 2.0 };
    n.sqrt() / 2.0 * (lead * (1.0 - eps) * (1.0 - eps) - 1.0 - eps_prime)
}

#[test]
fn criterion_11_packing_checks() {
    let mut lines = Vec::new();
    let order = order_statistics_mc(10, 100_000, 11).unwrap();
    lines.push(format!("order statistics n=10 within 3 sigma: {}", order.passed));

    let freq = aggregated_cut_frequency(16, 4, 10, 0..100).unwrap();
    lines.push(format!(
        "aggregated cut valid on {}/{} seeds ({:.2} vs target {:.2}, regime {})",
        freq.valid, freq.seeds, freq.frequency, freq.target, freq.in_regime
    ));

    let mut formula_ok = true;
    for &(n, m, big_m, k) in &[(1000usize, 60usize, 10u64, 30usize), (5000, 80, 100, 500), (20000, 100, 7, 4000)] {
        let lib = lb_theorem3(n, m, big_m, k).value;
        let hand = theorem3_by_hand(n as f64, m as f64, big_m as f64, k as f64);
        let rel = (lib - hand).abs() / hand.abs();
        formula_ok &= rel <= 1e-12;
        lines.push(format!("lb3({n},{m},{big_m},{k}) = {lib:.12e} (rel diff {rel:.1e})"));
    }

    let mut sweep_ok = true;
    for &(n, m, seed) in &[(6usize, 2usize, 1u64), (7, 3, 2), (8, 3, 3)] {
        let inst = gen_pip(n, m, 10, seed).unwrap();
        let opts = SweepOptions { seed, dirs: 16, budget_vertices: 100_000, extra_dirs: vec![] };
        let rows = sweep(&inst.hull, &(1..=n).collect::<Vec<_>>(), &opts).unwrap();
        let scaled: Vec<f64> = rows.iter().map(|r| r.dist_float / (n as f64).sqrt()).collect();
        let monotone = rows.windows(2).all(|w| w[1].dist_sq_rat().unwrap() <= w[0].dist_sq_rat().unwrap());
        let zero_at_n = rows.last().unwrap().dist_sq_rat().unwrap().is_zero();
        sweep_ok &= rows.iter().all(|r| r.exact) && monotone && zero_at_n;
        lines.push(format!("pip n={n} dist/sqrt(n) = {scaled:.3?}"));
    }

    let ok = order.passed && freq.frequency >= 0.5 && formula_ok && sweep_ok;
    report(11, "packing instance checks", ok, &lines.join("; "));
    assert!(ok);
}

/// `conv(p) + ℝ^Ī` by eliminating the convex multipliers from
/// `x_I = Σ λⱼ vⱼ|_I`, `Σ λⱼ = 1`, `λ ≥ 0`, using Gaussian substitution
/// and then Fourier–Motzkin with Chernikov's history rule.
fn oracle_projection(p: &VRep, support: &[usize]) -> Vec<Constraint> {
    let k = support.len();
    let t = p.vertices.len();
    // variables: x_I (0..k), λ (k..k+t); rows are `coeffs·z ≤ rhs` or `= rhs`
    type Row = (Vec<Rat>, Rat, u64);
    let mut eqs: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for (a, &i) in support.iter().enumerate() {
        let mut row = vec![Rat::zero(); k + t];
        row[a] = Rat::one();
        for (j, v) in p.vertices.iter().enumerate() {
            row[k + j] = -v[i].clone();
        }
        eqs.push((row, Rat::zero()));
    }
    let mut sum = vec![Rat::zero(); k + t];
    for s in sum.iter_mut().skip(k) {
        *s = Rat::one();
    }
    eqs.push((sum, Rat::one()));
    let mut ineqs: Vec<Row> = (0..t)
        .map(|j| {
            let mut row = vec![Rat::zero(); k + t];
            row[k + j] = -Rat::one();
            (row, Rat::zero(), 1u64 << j)
        })
        .collect();

    let mut eliminated = 0;
    for var in (k..k + t).rev() {
        if let Some(pos) = eqs.iter().position(|(r, _)| !r[var].is_zero()) {
            let (pr, pb) = eqs.swap_remove(pos);
            let piv = pr[var].clone();
            let sub = |row: &mut Vec<Rat>, rhs: &mut Rat| {
                let f = &row[var] / &piv;
                if f.is_zero() {
                    return;
                }
                for (x, y) in row.iter_mut().zip(&pr) {
                    *x = &*x - &(&f * y);
                }
                *rhs = &*rhs - &(&f * &pb);
            };
            for (r, b) in eqs.iter_mut() {
                sub(r, b);
            }
            for (r, b, _) in ineqs.iter_mut() {
                sub(r, b);
            }
            continue;
        }
        eliminated += 1;
        let (mut pos, mut neg, mut zero) = (Vec::new(), Vec::new(), Vec::new());
        for row in ineqs.drain(..) {
            match row.0[var].signum() {
                1 => pos.push(row),
                -1 => neg.push(row),
                _ => zero.push(row),
            }
        }
        for (pr, pb, ph) in &pos {
            for (nr, nb, nh) in &neg {
                let hist = ph | nh;
                if hist.count_ones() as usize > eliminated + 1 {
                    continue;
                }
                let (fp, fn_) = (-nr[var].clone(), pr[var].clone());
                let row: Vec<Rat> = pr.iter().zip(nr).map(|(x, y)| &(&fp * x) + &(&fn_ * y)).collect();
                let rhs = &(&fp * pb) + &(&fn_ * nb);
                zero.push((row, rhs, hist));
            }
        }
        ineqs = zero;
    }
    let lift = |row: &[Rat]| -> RatVec {
        let mut a = vec![Rat::zero(); p.dim];
        for (c, &i) in support.iter().enumerate() {
            a[i] = row[c].clone();
        }
        RatVec::new(a)
    };
    let mut out: Vec<Constraint> = ineqs.iter().map(|(r, b, _)| Constraint::new(lift(r), b.clone())).collect();
    for (r, b) in &eqs {
        let c = Constraint::new(lift(r), b.clone());
        out.push(c.negated());
        out.push(c);
    }
    out.retain(|c| !c.a.is_zero());
    out
}

#[test]
fn criterion_12_oracle_equivalence() {
    let mut instances: Vec<VRep> = Vec::new();
    for n in 2..=4 {
        instances.push(gen_simplex(n).unwrap());
        if n % 2 == 0 {
            instances.push(gen_halfcube(n).unwrap());
        }
    }
    let mut r = rng::derive(12, "acceptance/oracle");
    while instances.len() < 40 {
        let dim = r.gen_range(2..=5usize);
        let count = r.gen_range(2..=12usize);
        let pts: Vec<RatVec> = (0..count).map(|_| (0..dim).map(|_| Rat::from_int(r.gen_range(0..3))).collect()).collect();
        instances.push(VRep::from_points(dim, pts).unwrap());
    }
    let results: Vec<Vec<String>> = instances
        .par_iter()
        .enumerate()
        .map(|(idx, p)| {
            let (lo, hi) = bounding_box(p);
            let mut bad = Vec::new();
            for k in 1..=p.dim {
                let mut rows: Vec<Constraint> = HRep::boxed(&lo, &hi).inequalities;
                for s in k_subsets(p.dim, k) {
                    rows.extend(oracle_projection(p, &s));
                }
                let oracle = HRep { dim: p.dim, inequalities: rows, equations: vec![] };
                let c = sparse_closure(p, k, &lo, &hi).unwrap();
                let verts = c.vertex_set().unwrap();
                let inside = verts.vertices.iter().all(|v| oracle.inequalities.iter().all(|row| row.satisfied_by(v)));
                let tight = c.closure.inequalities.iter().all(|row| maximize(&row.a, &oracle).value.unwrap() <= row.b)
                    && c.closure.equations.iter().all(|row| {
                        maximize(&row.a, &oracle).value.unwrap() <= row.b
                            && maximize(&row.a.scale(&-Rat::one()), &oracle).value.unwrap() <= -row.b.clone()
                    });
                if !(inside && tight) {
                    bad.push(format!("instance {idx} dim={} k={k}: closure within oracle {inside}, oracle within closure {tight}", p.dim));
                }
            }
            bad
        })
        .collect();
    let bad: Vec<&String> = results.iter().flatten().collect();
    let ok = bad.is_empty();
    report(12, "sparse_closure equals per-support Fourier-Motzkin oracle", ok, &format!("{} polytopes, failures {bad:?}", instances.len()));
    assert!(ok);
}
