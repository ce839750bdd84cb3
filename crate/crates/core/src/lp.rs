//! Exact linear programming over H-representations.
//!
//! `max c·x s.t. A x ≤ b, C x = d` with free `x` is solved through its dual
//! `min b·y + d·z s.t. Aᵀy + Cᵀz = c, y ≥ 0`, which has one row per primal
//! variable. The constraint systems seen here are tall and thin (thousands
//! of rows, a handful of variables), so the dual tableau stays small. Both
//! phases enter the most negative reduced cost and fall back to Bland's
//! rule (lowest-index entering column) after a run of degenerate pivots;
//! ratio ties leave by lowest basic index.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::kernel::HRep;
use crate::rat::{Rat, RatVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Multipliers proving optimality: `c = Aᵀ ineq + Cᵀ eq`, `ineq ≥ 0`,
/// `b·ineq + d·eq = value`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualCertificate {
    pub ineq: Vec<Rat>,
    pub eq: Vec<Rat>,
}

#[derive(Clone, Debug)]
pub struct LpResult {
    pub status: LpStatus,
    pub value: Option<Rat>,
    pub argmax: Option<RatVec>,
    pub certificate: Option<DualCertificate>,
}

impl LpResult {
    fn status_only(status: LpStatus) -> Self {
        LpResult { status, value: None, argmax: None, certificate: None }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

impl DualCertificate {
    /// Exact check of the certificate against `(c, H)` and `value`.
    pub fn verify(&self, c: &RatVec, h: &HRep, value: &Rat) -> bool {
        if self.ineq.len() != h.inequalities.len() || self.eq.len() != h.equations.len() {
            return false;
        }
        if self.ineq.iter().any(Rat::is_negative) {
            return false;
        }
        let mut combo = vec![Rat::zero(); h.dim];
        let mut rhs = Rat::zero();
        for (y, row) in self.ineq.iter().zip(&h.inequalities).chain(self.eq.iter().zip(&h.equations)) {
            if y.is_zero() {
                continue;
            }
            for (acc, a) in combo.iter_mut().zip(row.a.iter()) {
                *acc += y * a;
            }
            rhs += y * &row.b;
        }
        combo.iter().zip(c.iter()).all(|(x, y)| x == y) && &rhs == value
    }
}

const DEGENERATE_LIMIT: usize = 32;

/// Positive `s` with `s·vals` integral and primitive, plus the scaled values.
fn integer_scale(vals: &[&Rat]) -> (Rat, Vec<BigInt>) {
    let lcm = vals.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let ints: Vec<BigInt> = vals.iter().map(|v| v.numer() * (&lcm / v.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if g.is_zero() || g.is_one() {
        return (Rat::from_bigint(lcm), ints);
    }
    let ints = ints.into_iter().map(|v| v / &g).collect();
    (Rat::from_big(lcm, g), ints)
}

/// Fraction-free tableau: the true entries are `rows[i][j] / den` with
/// `den > 0`, and every pivot divides exactly by the previous denominator.
struct Tableau {
    rows: Vec<Vec<BigInt>>,
    obj: Vec<BigInt>,
    den: BigInt,
    basis: Vec<usize>,
    ncols: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

fn eliminate(row: &mut [BigInt], prow: &[BigInt], q: usize, piv: &BigInt, den: &BigInt) {
    let f = row[q].clone();
    let unit_den = den.is_one();
    for (x, pj) in row.iter_mut().zip(prow) {
        if f.is_zero() || pj.is_zero() {
            if x.is_zero() {
                continue;
            }
            *x = &*x * piv;
        } else {
            *x = &*x * piv - &f * pj;
        }
        if !unit_den {
            *x = &*x / den;
        }
    }
}

impl Tableau {
    fn rhs(&self, i: usize) -> Rat {
        Rat::from_big(self.rows[i][self.ncols].clone(), self.den.clone())
    }

    fn pivot(&mut self, p: usize, q: usize) {
        let piv = self.rows[p][q].clone();
        let prow = std::mem::take(&mut self.rows[p]);
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != p {
                eliminate(row, &prow, q, &piv, &self.den);
            }
        }
        eliminate(&mut self.obj, &prow, q, &piv, &self.den);
        self.rows[p] = prow;
        self.basis[p] = q;
        self.den = piv;
        if self.den.is_negative() {
            for x in self.rows.iter_mut().flatten().chain(self.obj.iter_mut()) {
                *x = -&*x;
            }
            self.den = -&self.den;
        }
    }

    /// Minimizes over columns `< eligible`. Entering columns follow the
    /// most-negative reduced cost until a run of degenerate pivots, after
    /// which Bland's rule takes over for the rest of the phase.
    fn run(&mut self, eligible: usize) -> Outcome {
        let mut degenerate_run = 0;
        let mut bland = false;
        let rc = self.ncols;
        loop {
            let entering = if bland {
                (0..eligible).find(|&j| self.obj[j].is_negative())
            } else {
                (0..eligible).filter(|&j| self.obj[j].is_negative()).min_by(|&a, &b| self.obj[a].cmp(&self.obj[b]))
            };
            let Some(q) = entering else {
                return Outcome::Optimal;
            };
            let mut best: Option<usize> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][q];
                if !a.is_positive() {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some(bi) => {
                        let lhs = &self.rows[i][rc] * &self.rows[bi][q];
                        let rhs = &self.rows[bi][rc] * a;
                        lhs < rhs || (lhs == rhs && self.basis[i] < self.basis[bi])
                    }
                };
                if better {
                    best = Some(i);
                }
            }
            let Some(p) = best else {
                return Outcome::Unbounded;
            };
            if self.rows[p][rc].is_zero() {
                degenerate_run += 1;
                bland |= degenerate_run > DEGENERATE_LIMIT;
            } else {
                degenerate_run = 0;
            }
            self.pivot(p, q);
        }
    }
}

/// Exact maximization of `c·x` over `H`.
pub fn maximize(c: &RatVec, h: &HRep) -> LpResult {
    assert_eq!(c.dim(), h.dim, "objective dimension must match the H-representation");
    let n = h.dim;
    let m = h.inequalities.len();
    let e = h.equations.len();
    let nstruct = m + 2 * e;
    let ncols = nstruct + n;

    // each dual column is scaled to integers; scale[j] maps back to y_j
    let mut scale = Vec::with_capacity(m + e);
    let mut columns = Vec::with_capacity(m + e);
    for r in h.inequalities.iter().chain(&h.equations) {
        let vals: Vec<&Rat> = r.a.iter().chain(std::iter::once(&r.b)).collect();
        let (s, ints) = integer_scale(&vals);
        scale.push(s);
        columns.push(ints);
    }
    let (sigma, c_int) = integer_scale(&c.iter().collect::<Vec<_>>());

    // dual columns: y_j (cost b_j), z+_k (cost d_k), z-_k (cost -d_k), then artificials
    let mut cost = Vec::with_capacity(nstruct);
    cost.extend(columns[..m].iter().map(|col| col[n].clone()));
    cost.extend(columns[m..].iter().map(|col| col[n].clone()));
    cost.extend(columns[m..].iter().map(|col| -&col[n]));

    let mut signs = Vec::with_capacity(n);
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let neg = c_int[i].is_negative();
        signs.push(neg);
        let flip = |x: &BigInt| if neg { -x } else { x.clone() };
        let mut row = vec![BigInt::zero(); ncols + 1];
        for (j, col) in columns[..m].iter().enumerate() {
            row[j] = flip(&col[i]);
        }
        for (k, col) in columns[m..].iter().enumerate() {
            row[m + k] = flip(&col[i]);
            row[m + e + k] = -flip(&col[i]);
        }
        row[nstruct + i] = BigInt::one();
        row[ncols] = flip(&c_int[i]);
        rows.push(row);
    }

    // phase 1: minimize the sum of artificials
    let mut obj = vec![BigInt::zero(); ncols + 1];
    for row in &rows {
        for j in (0..nstruct).chain(std::iter::once(ncols)) {
            if !row[j].is_zero() {
                obj[j] -= &row[j];
            }
        }
    }
    let mut t = Tableau { rows, obj, den: BigInt::one(), basis: (nstruct..ncols).collect(), ncols };
    t.run(nstruct);
    if !t.obj[ncols].is_zero() {
        // dual infeasible: primal is infeasible or unbounded
        if c.is_zero() {
            return LpResult::status_only(LpStatus::Infeasible);
        }
        let feas = maximize(&RatVec::zeros(n), h);
        return LpResult::status_only(if feas.is_optimal() {
            LpStatus::Unbounded
        } else {
            LpStatus::Infeasible
        });
    }
    // drive remaining artificials out where possible
    for i in 0..n {
        if t.basis[i] >= nstruct {
            if let Some(q) = (0..nstruct).find(|&j| !t.rows[i][j].is_zero()) {
                t.pivot(i, q);
            }
        }
    }

    // phase 2
    let mut obj = vec![BigInt::zero(); ncols + 1];
    for (o, cj) in obj.iter_mut().zip(&cost) {
        *o = cj * &t.den;
    }
    for (i, row) in t.rows.iter().enumerate() {
        if t.basis[i] >= nstruct || cost[t.basis[i]].is_zero() {
            continue;
        }
        let cb = &cost[t.basis[i]];
        for (o, x) in obj.iter_mut().zip(row) {
            if !x.is_zero() {
                *o -= cb * x;
            }
        }
    }
    t.obj = obj;
    if let Outcome::Unbounded = t.run(nstruct) {
        return LpResult::status_only(LpStatus::Infeasible);
    }

    let value = -Rat::from_big(t.obj[ncols].clone(), t.den.clone()) / &sigma;
    // simplex multipliers of the dual rows are the primal solution
    let x: RatVec = (0..n)
        .map(|i| {
            let pi = Rat::from_big(t.obj[nstruct + i].clone(), t.den.clone());
            if signs[i] {
                pi
            } else {
                -pi
            }
        })
        .collect();
    let mut y = vec![Rat::zero(); nstruct];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < nstruct {
            let s = if b < m + e { &scale[b] } else { &scale[b - e] };
            y[b] = t.rhs(i) * s / &sigma;
        }
    }
    let ineq = y[..m].to_vec();
    let eq: Vec<Rat> = (0..e).map(|k| &y[m + k] - &y[m + e + k]).collect();

    debug_assert!(h.member(&x).unwrap_or(false), "LP argmax violates constraints");
    debug_assert_eq!(c.dot(&x), value);
    LpResult {
        status: LpStatus::Optimal,
        value: Some(value),
        argmax: Some(x),
        certificate: Some(DualCertificate { ineq, eq }),
    }
}

/// Exact feasibility test.
pub fn is_feasible(h: &HRep) -> bool {
    maximize(&RatVec::zeros(h.dim), h).is_optimal()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{Constraint, HRep};
    use crate::ratvec;

    fn c(a: RatVec, b: Rat) -> Constraint {
        Constraint::new(a, b)
    }

    fn simplex(n: usize) -> HRep {
        let mut ineqs: Vec<Constraint> =
            (0..n).map(|i| c(&RatVec::unit(n, i) * &Rat::from_int(-1), Rat::zero())).collect();
        ineqs.push(c(RatVec::ones(n), Rat::one()));
        HRep::from_inequalities(n, ineqs).unwrap()
    }

    #[test]
    fn square() {
        let r = maximize(&ratvec![1, 1], &HRep::unit_cube(2));
        assert_eq!(r.status, LpStatus::Optimal);
        assert_eq!(r.value.clone().unwrap(), Rat::from_int(2));
        assert_eq!(r.argmax.clone().unwrap(), ratvec![1, 1]);
        assert!(r.certificate.as_ref().unwrap().verify(&ratvec![1, 1], &HRep::unit_cube(2), &Rat::from_int(2)));
    }

    #[test]
    fn simplex_value() {
        let h = simplex(2);
        let r = maximize(&ratvec![1, 1], &h);
        assert_eq!(r.value.clone().unwrap(), Rat::one());
        assert!(r.certificate.unwrap().verify(&ratvec![1, 1], &h, &Rat::one()));
    }

    #[test]
    fn closure_of_3_simplex_at_k2() {
        let mut h = HRep::unit_cube(3);
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let mut a = RatVec::zeros(3);
            a[i] = Rat::one();
            a[j] = Rat::one();
            h.inequalities.push(c(a, Rat::one()));
        }
        let r = maximize(&ratvec![1, 1, 1], &h);
        assert_eq!(r.value.unwrap(), Rat::new(3, 2));
        let half = Rat::new(1, 2);
        assert_eq!(r.argmax.unwrap(), RatVec::new(vec![half.clone(), half.clone(), half]));
    }

    #[test]
    fn negative_objective_and_equations() {
        let h = HRep::new(
            2,
            HRep::unit_cube(2).inequalities,
            vec![c(ratvec![1, -1], Rat::zero())],
        )
        .unwrap();
        let obj = ratvec![-1, -2];
        let r = maximize(&obj, &h);
        assert_eq!(r.value.clone().unwrap(), Rat::zero());
        assert!(r.certificate.unwrap().verify(&obj, &h, &Rat::zero()));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let h = HRep::from_inequalities(1, vec![c(ratvec![1], Rat::zero()), c(ratvec![-1], Rat::from_int(-1))]).unwrap();
        assert_eq!(maximize(&ratvec![1], &h).status, LpStatus::Infeasible);
        assert_eq!(maximize(&ratvec![0], &h).status, LpStatus::Infeasible);
        let h = HRep::from_inequalities(1, vec![c(ratvec![-1], Rat::zero())]).unwrap();
        assert_eq!(maximize(&ratvec![1], &h).status, LpStatus::Unbounded);
        assert_eq!(maximize(&ratvec![-1], &h).value.unwrap(), Rat::zero());
    }

    #[test]
    fn free_direction_orthogonal_to_objective() {
        let h = HRep::from_inequalities(2, vec![c(ratvec![1, 0], Rat::one()), c(ratvec![-1, 0], Rat::zero())]).unwrap();
        let r = maximize(&ratvec![1, 0], &h);
        assert_eq!(r.value.unwrap(), Rat::one());
    }

    #[test]
    fn fractional_rows_and_certificate() {
        let h = HRep::new(
            3,
            vec![
                c(RatVec::new(vec![Rat::new(1, 2), Rat::new(1, 3), Rat::zero()]), Rat::new(5, 6)),
                c(RatVec::new(vec![Rat::new(-2, 7), Rat::zero(), Rat::zero()]), Rat::zero()),
                c(RatVec::new(vec![Rat::zero(), Rat::new(-3, 4), Rat::zero()]), Rat::zero()),
            ],
            vec![c(RatVec::new(vec![Rat::new(1, 5), Rat::new(-1, 5), Rat::new(2, 5)]), Rat::new(1, 10))],
        )
        .unwrap();
        let obj = RatVec::new(vec![Rat::new(3, 2), Rat::new(-1, 4), Rat::new(2, 3)]);
        let r = maximize(&obj, &h);
        let v = r.value.clone().unwrap();
        assert_eq!(obj.dot(r.argmax.as_ref().unwrap()), v);
        assert!(h.member(r.argmax.as_ref().unwrap()).unwrap());
        assert!(r.certificate.unwrap().verify(&obj, &h, &v));
    }

    #[test]
    fn degenerate_vertex_terminates() {
        // many constraints through the optimum (cycling-prone without Bland)
        let mut ineqs = HRep::unit_cube(3).inequalities;
        for a in [ratvec![1, 1, 0], ratvec![1, 0, 1], ratvec![0, 1, 1], ratvec![1, 1, 1]] {
            let s = a.sum();
            ineqs.push(c(a, s));
        }
        let h = HRep::from_inequalities(3, ineqs).unwrap();
        let r = maximize(&ratvec![1, 1, 1], &h);
        assert_eq!(r.value.unwrap(), Rat::from_int(3));
    }
}
