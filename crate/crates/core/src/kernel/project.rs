use std::collections::HashSet;

use super::{Constraint, HRep};
use crate::lp::{maximize, LpStatus};
use crate::rat::{Rat, RatVec};

/// Drops inequalities implied by the remaining system, one LP per row.
/// Rows are canonicalized and deduplicated first; opposite pairs are
/// merged into equations.
pub fn remove_redundant(h: &HRep) -> HRep {
    let h = h.deduplicated();
    let dim = h.dim;
    let mut equations = h.equations.clone();
    let mut ineqs = Vec::with_capacity(h.inequalities.len());
    {
        let set: HashSet<&Constraint> = h.inequalities.iter().collect();
        let mut merged = HashSet::new();
        for c in &h.inequalities {
            let neg = c.negated().canonical_inequality();
            if set.contains(&neg) {
                let eq = c.canonical_equation();
                if merged.insert(eq.clone()) {
                    equations.push(eq);
                }
            } else {
                ineqs.push(c.clone());
            }
        }
    }
    let mut eq_seen = HashSet::new();
    equations.retain(|e| eq_seen.insert(e.clone()));
    if ineqs.iter().any(|c| c.a.is_zero()) {
        // 0 ≤ negative: empty set, keep the witness
        let bad = ineqs.into_iter().find(|c| c.a.is_zero()).unwrap();
        return HRep { dim, inequalities: vec![bad], equations };
    }

    let mut keep = vec![true; ineqs.len()];
    for i in 0..ineqs.len() {
        let others: Vec<Constraint> = ineqs
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i && keep[j])
            .map(|(_, c)| c.clone())
            .collect();
        let sub = HRep { dim, inequalities: others, equations: equations.clone() };
        let r = maximize(&ineqs[i].a, &sub);
        match r.status {
            LpStatus::Optimal if r.value.as_ref().unwrap() <= &ineqs[i].b => keep[i] = false,
            LpStatus::Infeasible => keep[i] = false,
            _ => {}
        }
    }
    let inequalities = ineqs.into_iter().zip(keep).filter(|(_, k)| *k).map(|(c, _)| c).collect();
    HRep { dim, inequalities, equations }
}

fn substitute(target: &mut Constraint, eq: &Constraint, j: usize) {
    if target.a[j].is_zero() {
        return;
    }
    let f = &target.a[j] / &eq.a[j];
    let a: RatVec = target.a.iter().zip(eq.a.iter()).map(|(x, y)| x - &(&f * y)).collect();
    target.b = &target.b - &(&f * &eq.b);
    target.a = a;
}

/// Projection of `H` onto the coordinates `keep` (sorted, deduplicated).
///
/// Equations are used first to substitute out eliminated variables; the
/// rest are removed by Fourier–Motzkin, one variable at a time, with
/// LP-based redundancy removal after each step. The output lives in
/// dimension `keep.len()` and is irredundant.
pub fn project(h: &HRep, keep: &[usize]) -> HRep {
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    let n = h.dim;
    let keep_set: HashSet<usize> = keep.iter().copied().collect();
    let mut drop: Vec<usize> = (0..n).filter(|i| !keep_set.contains(i)).collect();

    let mut ineqs: Vec<Constraint> = h.inequalities.clone();
    let mut eqs: Vec<Constraint> = h.equations.clone();

    // block elimination through equations
    loop {
        let found = drop.iter().enumerate().find_map(|(di, &j)| {
            eqs.iter().position(|e| !e.a[j].is_zero()).map(|ei| (di, j, ei))
        });
        let Some((di, j, ei)) = found else { break };
        let e = eqs.remove(ei);
        for c in ineqs.iter_mut() {
            substitute(c, &e, j);
        }
        for c in eqs.iter_mut() {
            substitute(c, &e, j);
        }
        drop.remove(di);
    }

    let mut current = remove_redundant(&HRep { dim: n, inequalities: ineqs, equations: eqs });
    while !drop.is_empty() {
        // pick the variable with the smallest pos*neg product (lowest index on ties)
        let (di, j) = drop
            .iter()
            .enumerate()
            .min_by_key(|&(_, &j)| {
                let pos = current.inequalities.iter().filter(|c| c.a[j].is_positive()).count();
                let neg = current.inequalities.iter().filter(|c| c.a[j].is_negative()).count();
                (pos * neg, j)
            })
            .map(|(di, &j)| (di, j))
            .unwrap();
        drop.remove(di);
        if let Some(ei) = current.equations.iter().position(|e| !e.a[j].is_zero()) {
            let e = current.equations.remove(ei);
            for c in current.inequalities.iter_mut() {
                substitute(c, &e, j);
            }
            for c in current.equations.iter_mut() {
                substitute(c, &e, j);
            }
            current = remove_redundant(&current);
            continue;
        }
        let mut next = Vec::new();
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for c in &current.inequalities {
            if c.a[j].is_positive() {
                pos.push(c);
            } else if c.a[j].is_negative() {
                neg.push(c);
            } else {
                next.push(c.clone());
            }
        }
        for p in &pos {
            for q in &neg {
                let wp = -&q.a[j];
                let wq = p.a[j].clone();
                let a: RatVec = p.a.iter().zip(q.a.iter()).map(|(x, y)| &(&wp * x) + &(&wq * y)).collect();
                let b = &(&wp * &p.b) + &(&wq * &q.b);
                let mut a = a;
                a[j] = Rat::zero();
                next.push(Constraint::new(a, b));
            }
        }
        current = remove_redundant(&HRep { dim: n, inequalities: next, equations: current.equations });
    }

    let shrink = |c: &Constraint| Constraint::new(c.a.select(&keep), c.b.clone());
    let out = HRep {
        dim: keep.len(),
        inequalities: current.inequalities.iter().map(shrink).collect(),
        equations: current.equations.iter().map(shrink).collect(),
    };
    let mut out = remove_redundant(&out);
    out.inequalities.sort();
    out.equations.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{equal_hreps, h_to_v, v_to_h, VRep};
    use crate::ratvec;

    fn c(a: RatVec, b: i64) -> Constraint {
        Constraint::new(a, Rat::from_int(b))
    }

    #[test]
    fn cube_to_square() {
        let h = project(&HRep::unit_cube(3), &[0, 1]);
        assert!(equal_hreps(&h, &HRep::unit_cube(2)).unwrap());
        assert_eq!(h.inequalities.len(), 4);
    }

    #[test]
    fn hand_fourier_motzkin() {
        // {x1+x2 ≤ 1, x2 = x3, x ∈ [0,1]^3} onto {1,3}
        let mut h = HRep::unit_cube(3);
        h.inequalities.push(c(ratvec![1, 1, 0], 1));
        h.equations.push(c(ratvec![0, 1, -1], 0));
        let p = project(&h, &[0, 2]);
        let mut expect = HRep::unit_cube(2);
        expect.inequalities.push(c(ratvec![1, 1], 1));
        assert!(equal_hreps(&p, &expect).unwrap());
        assert_eq!(p.inequalities.len(), 3);
    }

    #[test]
    fn pure_fourier_motzkin() {
        // triangle conv{(0,0,0),(1,0,1),(0,1,1)} ⊂ R^3 onto (x1,x2)
        let v = VRep::from_points(3, vec![ratvec![0, 0, 0], ratvec![1, 0, 1], ratvec![0, 1, 1], ratvec![1, 1, 0]]).unwrap();
        let h = v_to_h(&v).unwrap();
        let p = project(&h, &[0, 1]);
        let pv = h_to_v(&p).unwrap();
        assert_eq!(pv.vertices, vec![ratvec![0, 0], ratvec![0, 1], ratvec![1, 0], ratvec![1, 1]]);
    }

    #[test]
    fn redundancy_removed() {
        let mut h = HRep::unit_cube(2);
        h.inequalities.push(c(ratvec![1, 1], 5));
        h.inequalities.push(c(ratvec![2, 0], 2));
        let r = remove_redundant(&h);
        assert_eq!(r.inequalities.len(), 4);
    }

    #[test]
    fn opposite_pairs_become_equations() {
        let mut h = HRep::unit_cube(2);
        h.inequalities.push(c(ratvec![1, -1], 0));
        h.inequalities.push(c(ratvec![-1, 1], 0));
        let r = remove_redundant(&h);
        assert_eq!(r.equations.len(), 1);
        assert_eq!(r.inequalities.len(), 2);
    }
}
