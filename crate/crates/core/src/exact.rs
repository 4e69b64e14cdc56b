//! Exact arithmetic: rationals, Pochhammer symbols, `lcm(1..n)` and
//! Bernoulli numbers.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::{OnceLock, RwLock};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self(BigRational::new(numer.into(), denom)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// The value as an integer, if it is one.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.0.is_integer().then(|| self.0.numer().clone())
    }

    pub fn abs(&self) -> Self {
        Self(self.0.abs())
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self(&self.0 / &rhs.0))
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self(self.0.recip()))
    }

    pub fn pow(&self, e: u32) -> Self {
        Self(num_traits::Pow::pow(&self.0, e))
    }

    /// Nearest `f64`, valid even when numerator and denominator overflow.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let (mant, exp) = self.frexp(60);
        mant * 2f64.powi(exp.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
    }

    /// `log2 |x|`, or `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (mant, exp) = self.frexp(60);
        mant.abs().log2() + exp as f64
    }

    // Returns (m, e) with x ~= m * 2^e and |m| in [2^(bits-1), 2^bits) scaled
    // down to an f64.
    fn frexp(&self, bits: u64) -> (f64, i64) {
        let num = self.numer();
        let den = self.denom();
        let shift = bits as i64 - (num.bits() as i64 - den.bits() as i64);
        let q = if shift >= 0 {
            (num << shift as usize) / den
        } else {
            num / (den << (-shift) as usize)
        };
        (q.to_f64().unwrap_or(f64::NAN), -shift)
    }
}

impl From<i64> for ExactRational {
    fn from(v: i64) -> Self {
        Self::from_integer(v)
    }
}

impl From<BigInt> for ExactRational {
    fn from(v: BigInt) -> Self {
        Self::from_integer(v)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `"p"` or `"p/q"`.
impl FromStr for ExactRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |t: &str| {
            BigInt::from_str(t.trim()).map_err(|_| Error::Parse(format!("bad integer {t:?}")))
        };
        match s.split_once('/') {
            Some((p, q)) => Self::new(parse(p)?, parse(q)?),
            None => Ok(Self::from_integer(parse(s)?)),
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&ExactRational> for &ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &ExactRational) -> ExactRational {
                ExactRational(&self.0 $op &rhs.0)
            }
        }
        impl $tr<ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational(self.0 $op rhs.0)
            }
        }
        impl $tr<&ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &ExactRational) -> ExactRational {
                ExactRational(self.0 $op &rhs.0)
            }
        }
        impl $tr<ExactRational> for &ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational(&self.0 $op rhs.0)
            }
        }
    };
}

forward_binop!(Add, add, +);
forward_binop!(Sub, sub, -);
forward_binop!(Mul, mul, *);

/// Panics on a zero divisor; use [`ExactRational::checked_div`] when the
/// divisor is not known to be nonzero.
impl Div<&ExactRational> for &ExactRational {
    type Output = ExactRational;
    fn div(self, rhs: &ExactRational) -> ExactRational {
        self.checked_div(rhs).expect("division by zero")
    }
}

impl Div<ExactRational> for ExactRational {
    type Output = ExactRational;
    fn div(self, rhs: ExactRational) -> ExactRational {
        &self / &rhs
    }
}

impl AddAssign<&ExactRational> for ExactRational {
    fn add_assign(&mut self, rhs: &ExactRational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&ExactRational> for ExactRational {
    fn sub_assign(&mut self, rhs: &ExactRational) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&ExactRational> for ExactRational {
    fn mul_assign(&mut self, rhs: &ExactRational) {
        self.0 *= &rhs.0;
    }
}

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

impl Neg for &ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-&self.0)
    }
}

impl std::iter::Sum for ExactRational {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, x| acc + x)
    }
}

impl std::iter::Product for ExactRational {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::one(), |acc, x| acc * x)
    }
}

impl PartialEq<i64> for ExactRational {
    fn eq(&self, other: &i64) -> bool {
        self.0.is_integer() && *self.0.numer() == BigInt::from(*other)
    }
}

impl PartialOrd<i64> for ExactRational {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        self.0
            .partial_cmp(&BigRational::from_integer(BigInt::from(*other)))
    }
}

/// Rising factorial `(alpha)_k = alpha (alpha+1) ... (alpha+k-1)`.
pub fn pochhammer(alpha: &ExactRational, k: u64) -> ExactRational {
    let mut acc = ExactRational::one();
    let mut term = alpha.clone();
    let one = ExactRational::one();
    for _ in 0..k {
        if term.is_zero() {
            return ExactRational::zero();
        }
        acc *= &term;
        term += &one;
    }
    acc
}

/// Integer rising factorial `(m)_k` for integer `m`.
pub fn pochhammer_int(m: i64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k as i64 {
        let f = m + i;
        if f == 0 {
            return BigInt::zero();
        }
        acc *= f;
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

fn lcm_table() -> &'static RwLock<Vec<BigUint>> {
    static TABLE: OnceLock<RwLock<Vec<BigUint>>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(vec![BigUint::one()]))
}

/// `d_n = lcm(1, ..., n)`, with `d_0 = 1`.
///
/// Values are memoized in a table that only ever grows; readers see a
/// consistent prefix.
pub fn lcm_upto(n: usize) -> BigUint {
    {
        let table = lcm_table().read().unwrap_or_else(|e| e.into_inner());
        if let Some(v) = table.get(n) {
            return v.clone();
        }
    }
    let mut table = lcm_table().write().unwrap_or_else(|e| e.into_inner());
    while table.len() <= n {
        let k = table.len();
        let next = table[k - 1].lcm(&BigUint::from(k));
        table.push(next);
    }
    table[n].clone()
}

fn bernoulli_table() -> &'static RwLock<Vec<ExactRational>> {
    static TABLE: OnceLock<RwLock<Vec<ExactRational>>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(vec![ExactRational::one()]))
}

/// Even-index Bernoulli numbers `B_{2k}`, memoized (`B_0 = 1`, `B_2 = 1/6`, ...).
///
/// Uses the recurrence `sum_{j=0}^{m} C(m+1, j) B_j = 0`, restricted to even
/// indices (`B_1 = -1/2` enters only at `j = 1`, odd `B_j` vanish beyond).
pub fn bernoulli_even(k: usize) -> ExactRational {
    {
        let table = bernoulli_table().read().unwrap_or_else(|e| e.into_inner());
        if let Some(v) = table.get(k) {
            return v.clone();
        }
    }
    let mut table = bernoulli_table().write().unwrap_or_else(|e| e.into_inner());
    while table.len() <= k {
        let m = 2 * table.len();
        // sum_{j=0}^{m} C(m+1, j) B_j = 0 with m even:
        // B_m = -(1/(m+1)) * (sum_{even j<m} C(m+1,j) B_j + C(m+1,1) B_1)
        let mut binom = BigInt::one(); // C(m+1, 0)
        let mut acc = ExactRational::zero();
        for j in 0..m {
            if j % 2 == 0 {
                acc += &(ExactRational::from_integer(binom.clone()) * &table[j / 2]);
            } else if j == 1 {
                acc -= &(ExactRational::from_integer(binom.clone())
                    * ExactRational::new(1, 2).expect("nonzero"));
            }
            binom = binom * (m + 1 - j) / (j + 1);
        }
        let b = -acc * ExactRational::new(1, (m + 1) as i64).expect("nonzero");
        table.push(b);
    }
    table[k].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> ExactRational {
        ExactRational::new(n, d).unwrap()
    }

    #[test]
    fn lowest_terms_and_sign() {
        let x = q(6, -4);
        assert_eq!(x.numer(), &BigInt::from(-3));
        assert_eq!(x.denom(), &BigInt::from(2));
        assert_eq!(ExactRational::new(1, 0), Err(Error::DivisionByZero));
        assert_eq!(
            q(1, 2).checked_div(&ExactRational::zero()),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("3/2".parse::<ExactRational>().unwrap(), q(3, 2));
        assert_eq!(
            "-10/4".parse::<ExactRational>().unwrap().to_string(),
            "-5/2"
        );
        assert_eq!("7".parse::<ExactRational>().unwrap().to_string(), "7");
        assert!("1/0".parse::<ExactRational>().is_err());
        assert!("x/2".parse::<ExactRational>().is_err());
    }

    #[test]
    fn pochhammer_examples() {
        assert!(pochhammer(&q(7, 2), 0).is_one());
        assert_eq!(pochhammer(&q(3, 1), 2), 12);
        assert_eq!(pochhammer(&q(-2, 1), 5), 0);
        assert_eq!(pochhammer_int(-2, 5), BigInt::zero());
        assert_eq!(pochhammer_int(3, 2), BigInt::from(12));
    }

    #[test]
    fn lcm_examples() {
        assert_eq!(lcm_upto(0), BigUint::one());
        assert_eq!(lcm_upto(1), BigUint::one());
        assert_eq!(lcm_upto(4), BigUint::from(12u32));
        // direct fold over 1..=9
        let folded = (1u32..=9).fold(BigUint::one(), |acc, k| acc.lcm(&BigUint::from(k)));
        assert_eq!(folded, BigUint::from(2520u32));
        assert_eq!(lcm_upto(9), folded);
    }

    #[test]
    fn lcm_divisibility_chain() {
        for n in 1..=200usize {
            let cur = lcm_upto(n);
            assert!((&cur % lcm_upto(n - 1)).is_zero());
            assert!((&cur % BigUint::from(n)).is_zero());
        }
    }

    #[test]
    fn lcm_growth_matches_prime_number_theorem() {
        for n in 50..=500usize {
            let ln = lcm_upto(n).bits() as f64; // upper estimate, refine below
            let exact = ExactRational::from_integer(BigInt::from(lcm_upto(n))).log2_abs();
            assert!(exact <= ln);
            let rate = exact * std::f64::consts::LN_2 / n as f64;
            assert!((0.80..=1.15).contains(&rate), "n={n} rate={rate}");
        }
    }

    #[test]
    fn bernoulli_known_values() {
        assert!(bernoulli_even(0).is_one());
        assert_eq!(bernoulli_even(1), q(1, 6));
        assert_eq!(bernoulli_even(2), q(-1, 30));
        assert_eq!(bernoulli_even(3), q(1, 42));
        assert_eq!(bernoulli_even(6), q(-691, 2730));
        assert_eq!(bernoulli_even(10), q(-174611, 330));
    }

    #[test]
    fn to_f64_handles_huge_parts() {
        let big = ExactRational::from_integer(BigInt::from(10).pow(400));
        let x = &big / &(big.clone() * ExactRational::from(3));
        assert!((x.to_f64() - 1.0 / 3.0).abs() < 1e-15);
        assert!((big.log2_abs() - 400.0 * 10f64.log2()).abs() < 1e-9);
        assert_eq!(q(-3, 4).to_f64(), -0.75);
    }

    fn arb_rational() -> impl Strategy<Value = ExactRational> {
        (-1000i64..1000, 1i64..200).prop_map(|(n, d)| q(n, d))
    }

    proptest! {
        #[test]
        fn pochhammer_step(alpha in arb_rational(), k in 0u64..30) {
            let lhs = pochhammer(&alpha, k + 1);
            let rhs = pochhammer(&alpha, k) * (&alpha + ExactRational::from(k as i64));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn pochhammer_reflection(alpha in arb_rational(), l in 0u64..20) {
            // (alpha)_l = (-1)^l (-alpha - l + 1)_l
            let lhs = pochhammer(&alpha, l);
            let shifted = -&alpha - ExactRational::from(l as i64) + ExactRational::one();
            let mut rhs = pochhammer(&shifted, l);
            if l % 2 == 1 {
                rhs = -rhs;
            }
            prop_assert_eq!(lhs, rhs);
        }
    }
}
