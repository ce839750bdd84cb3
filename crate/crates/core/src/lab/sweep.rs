use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{phase_classify, ub_theorem1};
use crate::closure::{bounding_box, closure_candidates, sparse_closure};
use crate::distance::{dist_to_vertices, shoot};
use crate::error::{Error, Result};
use crate::kernel::{HRep, VRep};
use crate::rat::{Rat, RatVec};
use crate::rng;

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub seed: u64,
    /// Random shooting directions per row, on top of `±e`.
    pub dirs: usize,
    /// Largest closure vertex count handed to the exact distance routine.
    pub budget_vertices: usize,
    pub extra_dirs: Vec<RatVec>,
}

/// One row of a k sweep. `dist_sq` is empty when only the shooting bound
/// was available, in which case `dist_float` repeats the shooting value.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub k: usize,
    pub dist_sq: Option<String>,
    pub dist_float: f64,
    pub k_dist_float: f64,
    pub lb_shoot_sq: String,
    pub lb_shoot_sq_float: f64,
    pub ub1: f64,
    pub ub2: f64,
    pub phase: String,
    pub exact: bool,
    pub closure_vertices: Option<usize>,
    pub note: String,
}

impl SweepRow {
    pub fn dist_sq_rat(&self) -> Option<Rat> {
        self.dist_sq.as_ref().map(|s| s.parse().expect("written by sweep"))
    }

    pub fn lb_shoot_sq_rat(&self) -> Rat {
        self.lb_shoot_sq.parse().expect("written by sweep")
    }
}

/// Closure, distance, shooting bound and bound formulas for each `k`.
/// Rows come back sorted by `k`; a failing row is reported through its
/// `note` rather than aborting the sweep.
pub fn sweep(p: &VRep, ks: &[usize], opts: &SweepOptions) -> Result<Vec<SweepRow>> {
    if !p.is_bounded() || p.vertices.is_empty() {
        return Err(Error::Precondition("sweep needs a nonempty polytope".into()));
    }
    if let Some(&k) = ks.iter().find(|&&k| k == 0 || k > p.dim) {
        return Err(Error::Precondition(format!("k = {k} outside 1..{}", p.dim)));
    }
    let (lo, hi) = bounding_box(p);
    let mut rows: Vec<SweepRow> = ks.par_iter().map(|&k| row(p, k, &lo, &hi, opts)).collect();
    rows.sort_by_key(|r| r.k);
    Ok(rows)
}

fn row(p: &VRep, k: usize, lo: &RatVec, hi: &RatVec, opts: &SweepOptions) -> SweepRow {
    let n = p.dim;
    let t = p.vertices.len();
    let ub = ub_theorem1(n, t, k, p.max_vertex_norm_sq().to_f64().sqrt());
    let mut out = SweepRow {
        k,
        dist_sq: None,
        dist_float: f64::NAN,
        k_dist_float: f64::NAN,
        lb_shoot_sq: "0".into(),
        lb_shoot_sq_float: 0.0,
        ub1: ub.ub1,
        ub2: ub.ub2,
        phase: phase_classify(n, t, k).to_string(),
        exact: false,
        closure_vertices: None,
        note: String::new(),
    };
    let mut notes = Vec::new();

    let (q, vertices): (HRep, Option<VRep>) = match sparse_closure(p, k, lo, hi) {
        Ok(c) => {
            let v = c.vertices.clone();
            (c.closure, v)
        }
        Err(e @ Error::BudgetExceeded { .. }) => {
            notes.push(format!("closure: {e}"));
            match closure_candidates(p, k, lo, hi) {
                Ok(h) => (h, None),
                Err(e) => {
                    notes.push(format!("candidates: {e}"));
                    out.note = notes.join("; ");
                    return out;
                }
            }
        }
        Err(e) => {
            out.note = format!("closure: {e}");
            return out;
        }
    };

    if let Some(v) = &vertices {
        out.closure_vertices = Some(v.vertices.len());
        if v.vertices.len() <= opts.budget_vertices {
            match dist_to_vertices(p, &v.vertices) {
                Ok(d) => {
                    out.dist_float = d.dist_sq.to_f64().sqrt();
                    out.dist_sq = Some(d.dist_sq.to_frac_string());
                    out.exact = true;
                }
                Err(e) => notes.push(format!("distance: {e}")),
            }
        } else {
            notes.push(format!("{} closure vertices over budget {}", v.vertices.len(), opts.budget_vertices));
        }
    }

    let seed = rng::splitmix64(opts.seed ^ k as u64);
    match shoot(p, &q, opts.dirs, seed, &opts.extra_dirs) {
        Ok(s) => {
            out.lb_shoot_sq_float = s.best_lb_sq.to_f64();
            out.lb_shoot_sq = s.best_lb_sq.to_frac_string();
            if !out.exact {
                out.dist_float = out.lb_shoot_sq_float.sqrt();
                notes.push("dist from shooting".into());
            }
        }
        Err(e) => notes.push(format!("shooting: {e}")),
    }
    out.k_dist_float = k as f64 * out.dist_float;
    out.note = notes.join("; ");
    out
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_halfcube, gen_simplex};

    fn opts() -> SweepOptions {
        SweepOptions { seed: 7, dirs: 50, budget_vertices: 10_000, extra_dirs: vec![] }
    }

    #[test]
    fn simplex_rows_follow_formula() {
        let rows = sweep(&gen_simplex(4).unwrap(), &[1, 2, 3, 4], &opts()).unwrap();
        for r in &rows {
            let k = r.k as i64;
            let want = Rat::from_int(4) * (Rat::new(1, k) - Rat::new(1, 4)).square();
            assert_eq!(r.dist_sq_rat().unwrap(), want);
            assert!(r.lb_shoot_sq_rat() <= want);
            assert!((r.dist_float - 2.0 * (1.0 / k as f64 - 0.25)).abs() < 1e-12);
        }
    }

    #[test]
    fn halfcube_rows() {
        let rows = sweep(&gen_halfcube(4).unwrap(), &[1, 2, 3, 4], &opts()).unwrap();
        let got: Vec<f64> = rows.iter().map(|r| r.dist_float).collect();
        assert_eq!(got[0], 1.0);
        assert_eq!(got[1], 1.0);
        assert!((got[2] - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(got[3], 0.0);
    }

    #[test]
    fn budget_falls_back_to_shooting() {
        let mut o = opts();
        o.budget_vertices = 1;
        let rows = sweep(&gen_simplex(3).unwrap(), &[1], &o).unwrap();
        assert!(!rows[0].exact);
        assert!(rows[0].dist_sq.is_none());
        assert!(rows[0].note.contains("shooting"));
    }

    #[test]
    fn csv_header() {
        let rows = sweep(&gen_simplex(2).unwrap(), &[1, 2], &opts()).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "k,dist_sq,dist_float,k_dist_float,lb_shoot_sq,lb_shoot_sq_float,ub1,ub2,phase,exact,closure_vertices,note\n"
        ));
    }
}
