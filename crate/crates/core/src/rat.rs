//! Exact rational scalars and dense rational vectors.
//!
//! Every coordinate, coefficient and right-hand side in the crate is a
//! [`Rat`]. Values are kept in lowest terms with a positive denominator, so
//! structural equality coincides with numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Index, IndexMut, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ParseRatError;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn from_int(v: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Rat(BigRational::from_integer(v))
    }

    /// Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Self {
        Rat(BigRational::new(num, den))
    }

    /// Exact value of a finite binary64 number.
    pub fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v).map(Rat)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn signum(&self) -> i32 {
        match self.0.numer().sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        Rat(self.0.recip())
    }

    pub fn square(&self) -> Self {
        Rat(&self.0 * &self.0)
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// `"num/den"`, the on-disk form.
    pub fn to_frac_string(&self) -> String {
        format!("{}/{}", self.0.numer(), self.0.denom())
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Rat {
    fn from(v: BigRational) -> Self {
        Rat(v)
    }
}

impl From<i64> for Rat {
    fn from(v: i64) -> Self {
        Rat::from_int(v)
    }
}

impl From<BigInt> for Rat {
    fn from(v: BigInt) -> Self {
        Rat::from_bigint(v)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = ParseRatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || ParseRatError(s.to_string());
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(Rat::from_big(n, d))
            }
            None => {
                let n: BigInt = s.parse().map_err(|_| bad())?;
                Ok(Rat::from_bigint(n))
            }
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_frac_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&Rat> for &Rat {
            type Output = Rat;
            fn $m(self, rhs: &Rat) -> Rat {
                Rat((&self.0).$m(&rhs.0))
            }
        }
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat {
                Rat(self.0.$m(rhs.0))
            }
        }
        impl $tr<&Rat> for Rat {
            type Output = Rat;
            fn $m(self, rhs: &Rat) -> Rat {
                Rat(self.0.$m(&rhs.0))
            }
        }
        impl $tr<Rat> for &Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat {
                Rat((&self.0).$m(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

impl AddAssign<Rat> for Rat {
    fn add_assign(&mut self, rhs: Rat) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        self.0 -= &rhs.0;
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rat> for Rat {
    fn sum<I: Iterator<Item = &'a Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

/// Dense vector of rationals.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RatVec(Vec<Rat>);

impl RatVec {
    pub fn new(entries: Vec<Rat>) -> Self {
        RatVec(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        RatVec(vec![Rat::zero(); dim])
    }

    pub fn ones(dim: usize) -> Self {
        RatVec(vec![Rat::one(); dim])
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = Rat::one();
        v
    }

    pub fn from_ints(v: &[i64]) -> Self {
        RatVec(v.iter().map(|&x| Rat::from_int(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Rat] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Rat> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rat> {
        self.0.iter()
    }

    pub fn dot(&self, other: &RatVec) -> Rat {
        debug_assert_eq!(self.dim(), other.dim());
        let mut acc = BigRational::zero();
        for (a, b) in self.0.iter().zip(&other.0) {
            if !a.is_zero() && !b.is_zero() {
                acc += &a.0 * &b.0;
            }
        }
        Rat(acc)
    }

    pub fn norm_sq(&self) -> Rat {
        self.dot(self)
    }

    pub fn norm1(&self) -> Rat {
        self.0.iter().map(|x| x.abs()).sum()
    }

    pub fn norm_inf(&self) -> Rat {
        self.0.iter().map(|x| x.abs()).max().unwrap_or_default()
    }

    pub fn sum(&self) -> Rat {
        self.0.iter().sum()
    }

    pub fn scale(&self, s: &Rat) -> RatVec {
        RatVec(self.0.iter().map(|x| x * s).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Rat::is_zero)
    }

    /// Indices of the nonzero entries.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn select(&self, idx: &[usize]) -> RatVec {
        RatVec(idx.iter().map(|&i| self.0[i].clone()).collect())
    }

    /// Scatter into a `dim`-vector with zeros outside `idx`.
    pub fn lift(&self, idx: &[usize], dim: usize) -> RatVec {
        let mut out = RatVec::zeros(dim);
        for (v, &i) in self.0.iter().zip(idx) {
            out.0[i] = v.clone();
        }
        out
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(Rat::to_f64).collect()
    }

    /// Smallest positive multiple with coprime integer entries.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        let mut lcm = BigInt::one();
        for x in &self.0 {
            lcm = lcm.lcm(x.denom());
        }
        let ints: Vec<BigInt> = self.0.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
        let mut g = BigInt::zero();
        for x in &ints {
            g = g.gcd(x);
        }
        if g.is_zero() {
            return ints;
        }
        ints.into_iter().map(|x| x / &g).collect()
    }
}

impl Index<usize> for RatVec {
    type Output = Rat;
    fn index(&self, i: usize) -> &Rat {
        &self.0[i]
    }
}

impl IndexMut<usize> for RatVec {
    fn index_mut(&mut self, i: usize) -> &mut Rat {
        &mut self.0[i]
    }
}

impl From<Vec<Rat>> for RatVec {
    fn from(v: Vec<Rat>) -> Self {
        RatVec(v)
    }
}

impl FromIterator<Rat> for RatVec {
    fn from_iter<I: IntoIterator<Item = Rat>>(iter: I) -> Self {
        RatVec(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a RatVec {
    type Item = &'a Rat;
    type IntoIter = std::slice::Iter<'a, Rat>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl Add<&RatVec> for &RatVec {
    type Output = RatVec;
    fn add(self, rhs: &RatVec) -> RatVec {
        RatVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub<&RatVec> for &RatVec {
    type Output = RatVec;
    fn sub(self, rhs: &RatVec) -> RatVec {
        RatVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<&Rat> for &RatVec {
    type Output = RatVec;
    fn mul(self, rhs: &Rat) -> RatVec {
        self.scale(rhs)
    }
}

impl fmt::Debug for RatVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for RatVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Lexicographic comparison helper used for deterministic tie-breaks.
pub fn lex_cmp(a: &RatVec, b: &RatVec) -> Ordering {
    a.0.cmp(&b.0)
}

#[macro_export]
macro_rules! ratvec {
    ($($x:expr),* $(,)?) => {
        $crate::rat::RatVec::new(vec![$($crate::rat::Rat::from($x as i64)),*])
    };
}
