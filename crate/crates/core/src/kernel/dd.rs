//! Double description method over integer cones.
//!
//! Computes a minimal generating system (lineality basis plus extreme
//! rays) of `{z ∈ ℝ^d : A z ≥ 0, E z = 0}`. Rows are inserted in the order
//! given; rays are kept as primitive integer vectors. Two rays are
//! combined only when adjacent: the common tight set must have at least
//! `d - lin - 2` rows and must not be contained in the tight set of any
//! third ray.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::Bits;
use crate::error::{Error, Result};
use crate::rat::Rat;

#[derive(Clone, Debug)]
pub(crate) struct ConeRow {
    pub coeffs: Vec<BigInt>,
    pub equality: bool,
}

impl ConeRow {
    /// Scales a rational row to a primitive integer row (positive factor).
    pub fn from_rats(coeffs: &[Rat], equality: bool) -> Self {
        let mut lcm = BigInt::one();
        for c in coeffs {
            lcm = lcm.lcm(c.denom());
        }
        let mut ints: Vec<BigInt> = coeffs.iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
        normalize(&mut ints);
        ConeRow { coeffs: ints, equality }
    }
}

#[derive(Clone, Debug)]
struct Ray {
    v: Vec<BigInt>,
    tight: Bits,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct ConeGenerators {
    pub lineality: Vec<Vec<BigInt>>,
    pub rays: Vec<Vec<BigInt>>,
}

pub(crate) fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let mut acc = BigInt::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

/// Divide by the gcd of the entries (sign preserved).
pub(crate) fn normalize(v: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for x in v.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
            if g.is_one() {
                return;
            }
        }
    }
    if g.is_zero() || g.is_one() {
        return;
    }
    for x in v.iter_mut() {
        *x = &*x / &g;
    }
}

fn combine(p: &[BigInt], p_coef: &BigInt, q: &[BigInt], q_coef: &BigInt) -> Vec<BigInt> {
    // p_coef * p + q_coef * q
    let mut out: Vec<BigInt> = p
        .iter()
        .zip(q)
        .map(|(x, y)| {
            let mut s = BigInt::zero();
            if !x.is_zero() {
                s += p_coef * x;
            }
            if !y.is_zero() {
                s += q_coef * y;
            }
            s
        })
        .collect();
    normalize(&mut out);
    out
}

/// Generators of the cone cut out by `rows`. Fails with `BudgetExceeded`
/// when the intermediate ray list grows beyond `ray_cap`.
pub(crate) fn cone_generators(dim: usize, rows: &[ConeRow], ray_cap: usize) -> Result<ConeGenerators> {
    let nrows = rows.len();
    let mut lineality: Vec<Vec<BigInt>> = (0..dim)
        .map(|i| {
            let mut v = vec![BigInt::zero(); dim];
            v[i] = BigInt::one();
            v
        })
        .collect();
    let mut rays: Vec<Ray> = Vec::new();

    for (ri, row) in rows.iter().enumerate() {
        let a = &row.coeffs;
        debug_assert_eq!(a.len(), dim);

        let lin_vals: Vec<BigInt> = lineality.iter().map(|l| dot(a, l)).collect();
        if let Some(k) = lin_vals.iter().position(|x| !x.is_zero()) {
            let l0 = lineality.remove(k);
            let a_l0 = lin_vals[k].clone();
            let abs = a_l0.abs();
            let sgn = if a_l0.is_positive() { BigInt::one() } else { -BigInt::one() };
            let rest_vals: Vec<BigInt> =
                lin_vals.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, v)| v.clone()).collect();
            for (l, al) in lineality.iter_mut().zip(&rest_vals) {
                if !al.is_zero() {
                    // (a·l0) l - (a·l) l0 has zero product with a
                    let mut nl = combine(l, &a_l0, &l0, &(-al));
                    canonical_sign(&mut nl);
                    *l = nl;
                }
            }
            for r in rays.iter_mut() {
                let ar = dot(a, &r.v);
                if !ar.is_zero() {
                    r.v = combine(&r.v, &abs, &l0, &(-(&sgn * &ar)));
                }
                r.tight.set(ri);
            }
            if !row.equality {
                let mut v = l0;
                if sgn.is_negative() {
                    for x in v.iter_mut() {
                        *x = -&*x;
                    }
                }
                let mut tight = Bits::new(nrows);
                for j in 0..ri {
                    tight.set(j);
                }
                rays.push(Ray { v, tight });
                if rays.len() > ray_cap {
                    return Err(Error::BudgetExceeded { what: "double description rays", count: rays.len(), cap: ray_cap });
                }
            }
            continue;
        }

        let vals: Vec<BigInt> = rays.iter().map(|r| dot(a, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();

        let mut fresh: Vec<Ray> = Vec::new();
        if !pos.is_empty() && !neg.is_empty() {
            let need = (dim - lineality.len()).saturating_sub(2);
            let rays_ref = &rays;
            let vals_ref = &vals;
            let per_pos: Vec<Vec<Ray>> = pos
                .par_iter()
                .map(|&p| {
                    let mut out = Vec::new();
                    for &q in &neg {
                        let common = rays_ref[p].tight.and(&rays_ref[q].tight);
                        if common.count() < need {
                            continue;
                        }
                        let blocked = rays_ref.iter().enumerate().any(|(r, ray)| {
                            r != p && r != q && common.is_subset_of(&ray.tight)
                        });
                        if blocked {
                            continue;
                        }
                        // (a·p) q - (a·q) p, both coefficients positive
                        let v = combine(&rays_ref[q].v, &vals_ref[p], &rays_ref[p].v, &(-&vals_ref[q]));
                        let mut tight = common;
                        tight.set(ri);
                        out.push(Ray { v, tight });
                    }
                    out
                })
                .collect();
            fresh = per_pos.into_iter().flatten().collect();
        }

        let mut next: Vec<Ray> = Vec::with_capacity(rays.len() + fresh.len());
        for (i, mut r) in rays.into_iter().enumerate() {
            if vals[i].is_zero() {
                r.tight.set(ri);
                next.push(r);
            } else if vals[i].is_positive() && !row.equality {
                next.push(r);
            }
        }
        next.extend(fresh);
        if next.len() > ray_cap {
            return Err(Error::BudgetExceeded { what: "double description rays", count: next.len(), cap: ray_cap });
        }
        rays = next;
    }

    Ok(ConeGenerators { lineality, rays: rays.into_iter().map(|r| r.v).collect() })
}

pub(crate) fn canonical_sign(v: &mut [BigInt]) {
    if let Some(x) = v.iter().find(|x| !x.is_zero()) {
        if x.is_negative() {
            for y in v.iter_mut() {
                *y = -&*y;
            }
        }
    }
}
