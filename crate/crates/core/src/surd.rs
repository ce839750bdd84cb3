//! Quadratic-rational numbers `p + q√r` with rational `p`, `q` and a
//! rational radicand `r ≥ 0`.
//!
//! Values sharing a radicand form a field; signs and comparisons are
//! decided exactly by squaring.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::rat::Rat;

#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Surd {
    p: Rat,
    q: Rat,
    r: Rat,
}

fn rational_sqrt(x: &Rat) -> Option<Rat> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(Rat::from_big(n, d))
    } else {
        None
    }
}

impl Surd {
    /// `p + q√r`. Panics when `r < 0`.
    pub fn new(p: Rat, q: Rat, r: Rat) -> Self {
        assert!(!r.is_negative(), "negative radicand");
        Surd { p, q, r }.normalized()
    }

    pub fn rational(p: Rat) -> Self {
        Surd { p, q: Rat::zero(), r: Rat::zero() }
    }

    /// `q√r`.
    pub fn root(q: Rat, r: Rat) -> Self {
        Self::new(Rat::zero(), q, r)
    }

    fn normalized(mut self) -> Self {
        if self.q.is_zero() || self.r.is_zero() {
            self.q = Rat::zero();
            self.r = Rat::zero();
        } else if let Some(s) = rational_sqrt(&self.r) {
            self.p = &self.p + &(&self.q * &s);
            self.q = Rat::zero();
            self.r = Rat::zero();
        }
        self
    }

    pub fn rational_part(&self) -> &Rat {
        &self.p
    }

    pub fn surd_part(&self) -> &Rat {
        &self.q
    }

    pub fn radicand(&self) -> &Rat {
        &self.r
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.signum() == 0
    }

    fn common_radicand(&self, other: &Surd) -> Rat {
        match (self.q.is_zero(), other.q.is_zero()) {
            (true, _) => other.r.clone(),
            (_, true) => self.r.clone(),
            _ => {
                assert_eq!(self.r, other.r, "mixed radicands");
                self.r.clone()
            }
        }
    }

    pub fn signum(&self) -> i32 {
        let sp = self.p.signum();
        let sq = self.q.signum();
        if sq == 0 || sp == sq {
            return sp;
        }
        if sp == 0 {
            return sq;
        }
        let lhs = self.p.square();
        let rhs = &self.q.square() * &self.r;
        match lhs.cmp(&rhs) {
            Ordering::Greater => sp,
            Ordering::Less => sq,
            Ordering::Equal => 0,
        }
    }

    pub fn abs(&self) -> Surd {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn scale(&self, s: &Rat) -> Surd {
        Surd { p: &self.p * s, q: &self.q * s, r: self.r.clone() }.normalized()
    }

    pub fn square(&self) -> Surd {
        self * self
    }

    pub fn to_f64(&self) -> f64 {
        self.p.to_f64() + self.q.to_f64() * self.r.to_f64().sqrt()
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Surd {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl From<Rat> for Surd {
    fn from(p: Rat) -> Self {
        Surd::rational(p)
    }
}

impl Add<&Surd> for &Surd {
    type Output = Surd;
    fn add(self, o: &Surd) -> Surd {
        let r = self.common_radicand(o);
        Surd { p: &self.p + &o.p, q: &self.q + &o.q, r }.normalized()
    }
}

impl Sub<&Surd> for &Surd {
    type Output = Surd;
    fn sub(self, o: &Surd) -> Surd {
        let r = self.common_radicand(o);
        Surd { p: &self.p - &o.p, q: &self.q - &o.q, r }.normalized()
    }
}

impl Mul<&Surd> for &Surd {
    type Output = Surd;
    fn mul(self, o: &Surd) -> Surd {
        let r = self.common_radicand(o);
        let p = &(&self.p * &o.p) + &(&(&self.q * &o.q) * &r);
        let q = &(&self.p * &o.q) + &(&self.q * &o.p);
        Surd { p, q, r }.normalized()
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd { p: -self.p, q: -self.q, r: self.r }
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<Surd> for Surd {
            type Output = Surd;
            fn $m(self, o: Surd) -> Surd {
                (&self).$m(&o)
            }
        }
        impl $tr<&Surd> for Surd {
            type Output = Surd;
            fn $m(self, o: &Surd) -> Surd {
                (&self).$m(o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_zero() {
            write!(f, "{}", self.p)
        } else if self.p.is_zero() {
            write!(f, "{}*sqrt({})", self.q, self.r)
        } else {
            write!(f, "{} + {}*sqrt({})", self.p, self.q, self.r)
        }
    }
}

impl fmt::Debug for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
