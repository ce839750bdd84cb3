use proptest::prelude::*;

use sparsecut::bounds::ub_theorem1;
use sparsecut::closure::{
    binomial, bounding_box, monotone_halfspace_closure, sampled_closure, sparse_closure, symmetric_box, unit_box, SupportSet,
};
use sparsecut::distance::{cut_depth, dist_to_vertices, shoot};
use sparsecut::extform::Tau;
use sparsecut::kernel::{contains, equal_hreps, equal_vreps, h_to_v, project, v_to_h};
use sparsecut::{Constraint, HRep, Rat, RatVec, VRep};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn points(dim: std::ops::RangeInclusive<usize>, count: std::ops::Range<usize>, max: i64) -> impl Strategy<Value = VRep> {
    dim.prop_flat_map(move |d| {
        prop::collection::vec(prop::collection::vec(0..=max, d), count.clone()).prop_map(move |pts| {
            let pts = pts.into_iter().map(|p| RatVec::from_ints(&p)).collect();
            VRep::from_points(d, pts).unwrap()
        })
    })
}

fn zero_one(dim: std::ops::RangeInclusive<usize>, count: std::ops::Range<usize>) -> impl Strategy<Value = VRep> {
    points(dim, count, 1)
}

fn facets(p: &VRep) -> Vec<sparsecut::Constraint> {
    let h = v_to_h(p).unwrap();
    h.inequalities.iter().cloned().chain(h.equations.iter().flat_map(|e| [e.clone(), e.negated()])).collect()
}

proptest! {
    #![proptest_config(config(40))]

    #[test]
    fn kernel_roundtrip(p in points(1..=4, 1..9, 3)) {
        let h = v_to_h(&p).unwrap();
        let v = h_to_v(&h).unwrap();
        prop_assert!(equal_vreps(&v, &p).unwrap());
        prop_assert!(contains(&h, &p).unwrap());
        // every returned vertex is one of the input points
        for x in &v.vertices {
            prop_assert!(p.vertices.contains(x));
        }
    }

    #[test]
    fn nested_projection(p in points(3..=4, 2..9, 3)) {
        let h = v_to_h(&p).unwrap();
        let once = project(&h, &[0, 1]);
        let twice = project(&project(&h, &[0, 1, 2]), &[0, 1]);
        prop_assert!(equal_hreps(&once, &twice).unwrap());
        prop_assert!(equal_vreps(&h_to_v(&once).unwrap(), &p.project(&[0, 1])).unwrap());
    }

    #[test]
    fn tau_commutes_with_projection(p in points(4..=4, 2..8, 2), mask in 1u8..16) {
        // Q ⊆ ℝ³ × ℝ¹
        let q = v_to_h(&p).unwrap();
        let idx: Vec<usize> = (0..4).filter(|&i| mask >> i & 1 == 1).collect();
        let i_full = SupportSet::new(idx.clone(), 4).unwrap();
        let x = [0, 1, 2];
        let lhs = {
            let ix: Vec<usize> = idx.iter().copied().filter(|&i| i < 3).collect();
            let proj = project(&q, &x);
            if ix.is_empty() {
                None
            } else {
                Some(proj.tau(&SupportSet::new(ix, 3).unwrap()).unwrap())
            }
        };
        let rhs = project(&q.tau(&i_full).unwrap(), &x);
        match lhs {
            Some(l) => prop_assert!(equal_hreps(&l, &rhs).unwrap() && equal_hreps(&rhs, &l).unwrap()),
            // I misses every x coordinate: both sides are all of ℝ³
            None => prop_assert!(rhs.inequalities.is_empty() && rhs.equations.is_empty()),
        }
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn closure_nesting_and_validity(p in points(2..=4, 2..8, 2)) {
        let (lo, hi) = bounding_box(&p);
        let mut prev: Option<VRep> = None;
        for k in (1..=p.dim).rev() {
            let c = sparse_closure(&p, k, &lo, &hi).unwrap();
            prop_assert!(c.closure.max_support() <= k);
            for row in &c.closure.inequalities {
                prop_assert!(p.vertices.iter().all(|v| row.satisfied_by(v)));
            }
            for row in &c.closure.equations {
                prop_assert!(p.vertices.iter().all(|v| row.tight_at(v)));
            }
            let v = c.vertex_set().unwrap();
            if let Some(inner) = &prev {
                prop_assert!(contains(&c.closure, inner).unwrap());
            } else {
                prop_assert!(equal_vreps(&v, &p).unwrap());
            }
            prev = Some(v);
        }
    }

    #[test]
    fn sampled_closure_contains_full(p in points(3..=4, 2..8, 2), k in 1usize..3, count in 1usize..7, seed: u64) {
        let (lo, hi) = bounding_box(&p);
        let full = sparse_closure(&p, k, &lo, &hi).unwrap();
        let fv = full.vertex_set().unwrap();
        let total = binomial(p.dim, k) as usize;
        let sampled = sampled_closure(&p, k, &lo, &hi, count, seed).unwrap();
        prop_assert!(contains(&sampled.closure, &fv).unwrap());
        prop_assert_eq!(sampled.outer_approximation, count < total);
        let all = sampled_closure(&p, k, &lo, &hi, total, seed).unwrap();
        prop_assert!(equal_vreps(&all.vertex_set().unwrap(), &fv).unwrap());
    }

    #[test]
    fn sandwich_and_depth(p in zero_one(3..=5, 2..12), seed: u64) {
        let (lo, hi) = bounding_box(&p);
        let max_norm = p.max_vertex_norm_sq().to_f64().sqrt();
        let fs = facets(&p);
        for k in 1..=p.dim {
            let c = sparse_closure(&p, k, &lo, &hi).unwrap();
            let d = dist_to_vertices(&p, &c.vertex_set().unwrap().vertices).unwrap().dist_sq;
            let ub = ub_theorem1(p.dim, p.vertices.len(), k, max_norm);
            prop_assert!(d.to_f64().sqrt() <= ub.ub1.min(ub.ub2) + 1e-9);
            let lb = shoot(&p, &c.closure, 8, seed, &[]).unwrap().best_lb_sq;
            prop_assert!(lb <= d);
            for f in &fs {
                let depth = cut_depth(&f.a, &f.b, &c.closure).unwrap();
                prop_assert!(depth.gamma_sq_scaled <= d);
            }
            if k == p.dim {
                prop_assert_eq!(d, Rat::zero());
            }
        }
    }
}

proptest! {
    #![proptest_config(config(40))]

    #[test]
    fn monotone_agrees_with_sparse_closure(
        coeffs in prop::collection::vec(0i64..4, 2..5),
        shift in 0i64..1000,
        symmetric: bool,
        k_pick in 0usize..4,
    ) {
        let n = coeffs.len();
        let a = RatVec::from_ints(&coeffs);
        let (lo, hi) = if symmetric { symmetric_box(n) } else { unit_box(n) };
        let (min, max) = (a.dot(&lo), a.dot(&hi));
        let b = &min + &(&(&max - &min) * &Rat::new(shift, 999));
        let k = k_pick % n + 1;
        let mut h = HRep::boxed(&lo, &hi);
        h.inequalities.push(Constraint::new(a.clone(), b.clone()));
        let p = sparsecut::kernel::h_to_v(&h).unwrap();
        let fast = monotone_halfspace_closure(&a, &b, k, &lo, &hi).unwrap();
        let slow = sparse_closure(&p, k, &lo, &hi).unwrap();
        prop_assert!(equal_hreps(&fast.closure, &slow.closure).unwrap());
    }
}
