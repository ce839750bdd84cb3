use serde::Serialize;

use crate::closure::{sparse_closure, unit_box};
use crate::error::{Error, Result};
use crate::kernel::{Constraint, VRep};
use crate::rat::Rat;
use crate::surd::Surd;

/// Largest `α ≥ 0` for which a slack condition holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxAlpha {
    /// Holds for every `α`.
    Unbounded,
    /// Fails already at `α = 0`.
    Never,
    Value(Surd),
}

impl MaxAlpha {
    fn min(self, other: MaxAlpha) -> MaxAlpha {
        match (self, other) {
            (MaxAlpha::Never, _) | (_, MaxAlpha::Never) => MaxAlpha::Never,
            (MaxAlpha::Unbounded, x) | (x, MaxAlpha::Unbounded) => x,
            (MaxAlpha::Value(a), MaxAlpha::Value(b)) => MaxAlpha::Value(a.min(b)),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            MaxAlpha::Unbounded => f64::INFINITY,
            MaxAlpha::Never => f64::NAN,
            MaxAlpha::Value(s) => s.to_f64(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FacetToughness {
    /// Primitive integer normal and right-hand side.
    pub facet: Constraint,
    /// `d₀ − Σd/2 − (α/2√k)(1 − 1/k²)‖d‖₁ + ‖d‖∞/2k²`.
    pub slack: Surd,
    pub passed: bool,
    pub max_alpha: MaxAlpha,
}

#[derive(Clone, Debug, Serialize)]
pub struct ToughnessReport {
    pub k: usize,
    pub alpha: Rat,
    pub facets: Vec<FacetToughness>,
    pub tough: bool,
    pub max_alpha: MaxAlpha,
}

fn audit_row(c: &Constraint, alpha: &Rat, k: usize) -> FacetToughness {
    let facet = c.canonical_inequality();
    let kr = Rat::from_int(k as i64);
    let k_sq = kr.square();
    let half = Rat::new(1, 2);
    let a_term = &(&facet.a.sum() * &half) - &(&facet.a.norm_inf() / &(&k_sq * &Rat::from_int(2)));
    let b_term = &(&(&Rat::one() - &k_sq.recip()) * &facet.a.norm1()) / &(&kr * &Rat::from_int(2));
    let head = &facet.b - &a_term;
    // α/(2√k) = (α/2k)·√k
    let slack = Surd::new(head.clone(), -(&b_term * alpha), kr.clone());
    let passed = slack.signum() >= 0;
    let max_alpha = if head.is_negative() {
        MaxAlpha::Never
    } else if b_term.is_zero() {
        MaxAlpha::Unbounded
    } else {
        MaxAlpha::Value(Surd::root(&head / &(&b_term * &kr), kr))
    };
    FacetToughness { facet, slack, passed, max_alpha }
}

/// Checks the toughness slack condition on every facet of `P^k` (both
/// orientations of each implicit equation count as facets) and reports the
/// largest `α` for which all of them hold, in closed form.
pub fn toughness_audit(p01: &VRep, alpha: &Rat, k: usize) -> Result<ToughnessReport> {
    let zero_one = p01.vertices.iter().all(|v| v.iter().all(|x| x.is_zero() || *x == Rat::one()));
    if !zero_one || !p01.is_bounded() {
        return Err(Error::Precondition("toughness audit needs a 0/1 polytope".into()));
    }
    if alpha.is_negative() {
        return Err(Error::Precondition("alpha must be nonnegative".into()));
    }
    let (lo, hi) = unit_box(p01.dim);
    let c = sparse_closure(p01, k, &lo, &hi)?;
    let rows = c
        .closure
        .inequalities
        .iter()
        .cloned()
        .chain(c.closure.equations.iter().flat_map(|e| [e.clone(), e.negated()]));
    let facets: Vec<FacetToughness> = rows.map(|r| audit_row(&r, alpha, k)).collect();
    let tough = facets.iter().all(|f| f.passed);
    let max_alpha = facets.iter().fold(MaxAlpha::Unbounded, |acc, f| acc.min(f.max_alpha.clone()));
    Ok(ToughnessReport { k, alpha: alpha.clone(), facets, tough, max_alpha })
}
