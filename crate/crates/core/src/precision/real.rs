use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::ExactRational;

/// Binary floating-point number `mantissa * 2^exponent` with an explicit
/// working precision. Every operation rounds (to nearest) to `precision` bits.
///
/// A nonzero value always carries a mantissa of exactly `precision` bits.
#[derive(Clone)]
pub struct PrecisionReal {
    mant: BigInt,
    exp: i64,
    prec: u32,
}

impl PrecisionReal {
    pub fn zero(prec: u32) -> Self {
        Self {
            mant: BigInt::zero(),
            exp: 0,
            prec: prec.max(2),
        }
    }

    pub fn from_int(n: impl Into<BigInt>, prec: u32) -> Self {
        Self::normalized(n.into(), 0, prec)
    }

    /// Correctly rounded conversion of an exact rational.
    pub fn from_rational(q: &ExactRational, prec: u32) -> Self {
        Self::from_ratio(q.numer(), q.denom(), prec)
    }

    fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        if num.is_zero() {
            return Self::zero(prec);
        }
        // at least prec+2 quotient bits before rounding
        let shift = prec as i64 + 2 + den.bits() as i64 - num.bits() as i64;
        let q = if shift >= 0 {
            (num << shift as usize) / den
        } else {
            num / (den << (-shift) as usize)
        };
        Self::normalized(q, -shift, prec)
    }

    pub fn from_f64(x: f64, prec: u32) -> Self {
        if x == 0.0 || !x.is_finite() {
            return Self::zero(prec);
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let e = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if e == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), e - 1075)
        };
        Self::normalized(BigInt::from(m) * sign, e, prec)
    }

    fn normalized(mant: BigInt, exp: i64, prec: u32) -> Self {
        let prec = prec.max(2);
        if mant.is_zero() {
            return Self::zero(prec);
        }
        let bits = mant.bits() as i64;
        let p = prec as i64;
        if bits <= p {
            let shift = (p - bits) as usize;
            return Self {
                mant: mant << shift,
                exp: exp - shift as i64,
                prec,
            };
        }
        let shift = (bits - p) as usize;
        let (sign, mag) = (mant.sign(), mant.magnitude().clone());
        let half_bit = mag.bit(shift as u64 - 1);
        let mut q = mag >> shift;
        let mut exp = exp + shift as i64;
        if half_bit {
            q += 1u32;
            if q.bits() as i64 > p {
                q >>= 1;
                exp += 1;
            }
        }
        Self {
            mant: BigInt::from_biguint(sign, q),
            exp,
            prec,
        }
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Same value rounded to a new precision.
    pub fn with_precision(&self, prec: u32) -> Self {
        Self::normalized(self.mant.clone(), self.exp, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Self {
            mant: self.mant.abs(),
            ..self.clone()
        }
    }

    /// Multiplies by `2^k` exactly.
    pub fn ldexp(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Self {
            exp: self.exp + k,
            ..self.clone()
        }
    }

    /// `floor(log2 |x|) + 1` for nonzero `x`: `|x| < 2^top`.
    pub fn top_bit(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.exp + self.mant.bits() as i64)
    }

    pub fn recip(&self) -> Result<Self> {
        Self::from_int(1, self.prec).checked_div(self)
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let prec = self.prec.max(rhs.prec);
        if self.is_zero() {
            return Ok(Self::zero(prec));
        }
        let q = Self::from_ratio(&self.mant, &rhs.mant, prec);
        Ok(q.ldexp(self.exp - rhs.exp))
    }

    pub fn powi(&self, mut e: u64) -> Self {
        let mut result = Self::from_int(1, self.prec);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Exact rational value of this float.
    pub fn to_rational(&self) -> ExactRational {
        if self.exp >= 0 {
            ExactRational::from_integer(&self.mant << self.exp as usize)
        } else {
            ExactRational::new(self.mant.clone(), BigInt::one() << (-self.exp) as usize)
                .expect("nonzero")
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        let keep = bits.min(64);
        let top = (&self.mant >> (bits - keep) as usize)
            .to_f64()
            .unwrap_or(f64::NAN);
        let e = self.exp + bits - keep;
        if e > 2000 {
            return top.signum() * f64::INFINITY;
        }
        top * 2f64.powi(e.max(-2000) as i32)
    }

    /// `log2 |x|`, finite for any nonzero value regardless of exponent range.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.mant.bits() as i64;
        let keep = bits.min(64);
        let top = (self.mant.magnitude() >> (bits - keep) as usize)
            .to_f64()
            .unwrap_or(f64::NAN);
        top.log2() + (self.exp + bits - keep) as f64
    }

    /// `|x| < 2^-bits`.
    pub fn is_below_pow2(&self, bits: i64) -> bool {
        match self.top_bit() {
            None => true,
            Some(top) => top <= -bits,
        }
    }

    /// Scientific notation `[-]d.ddd...e[+-]E` with `digits` significant digits.
    pub fn to_sci_string(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let digits = digits.max(1);
        let q = self.to_rational().abs();
        let mut e10 = (self.log2_abs() * std::f64::consts::LOG10_2).floor() as i64;
        let ten = BigInt::from(10);
        let lo = num_traits::pow(ten.clone(), digits - 1);
        let hi = &lo * &ten;
        let mut scaled: BigInt;
        loop {
            let k = digits as i64 - 1 - e10;
            let s = if k >= 0 {
                &q * &ExactRational::from_integer(num_traits::pow(ten.clone(), k as usize))
            } else {
                &q / &ExactRational::from_integer(num_traits::pow(ten.clone(), (-k) as usize))
            };
            // round half up on the magnitude
            let twice = (s.numer() * 2 + s.denom()) / (s.denom() * 2);
            scaled = twice;
            if scaled >= hi {
                e10 += 1;
            } else if scaled < lo {
                e10 -= 1;
            } else {
                break;
            }
        }
        let ds = scaled.to_string();
        let sign = if self.is_negative() { "-" } else { "" };
        let (head, tail) = ds.split_at(1);
        if tail.is_empty() {
            format!("{sign}{head}e{e10}")
        } else {
            format!("{sign}{head}.{tail}e{e10}")
        }
    }

    /// Enough significant digits to represent the value to `precision` bits.
    pub fn to_decimal_string(&self) -> String {
        self.to_sci_string((self.prec as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1)
    }

    /// Parses a decimal literal (`-12.5`, `3e-7`, `1.25E+3`) exactly, then
    /// rounds to `prec` bits.
    pub fn parse_decimal(s: &str, prec: u32) -> Result<Self> {
        Ok(Self::from_rational(&parse_decimal_exact(s)?, prec))
    }
}

/// Exact rational value of a decimal literal.
pub fn parse_decimal_exact(s: &str) -> Result<ExactRational> {
    let bad = || Error::Parse(format!("bad decimal {s:?}"));
    let s = s.trim();
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let mut n: BigInt = digits.parse().map_err(|_| bad())?;
    if neg {
        n = -n;
    }
    let e = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    Ok(if e >= 0 {
        ExactRational::from_integer(n * num_traits::pow(ten, e as usize))
    } else {
        ExactRational::new(n, num_traits::pow(ten, (-e) as usize)).expect("nonzero")
    })
}

impl fmt::Display for PrecisionReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

impl fmt::Debug for PrecisionReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{} bits]", self.to_sci_string(20), self.prec)
    }
}

impl PartialEq for PrecisionReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_value(other) == Ordering::Equal
    }
}

impl PartialOrd for PrecisionReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_value(other))
    }
}

impl PrecisionReal {
    fn cmp_value(&self, other: &Self) -> Ordering {
        match (self.signum(), other.signum()) {
            (a, b) if a != b => a.cmp(&b),
            (0, 0) => Ordering::Equal,
            _ => {
                let e = self.exp.min(other.exp);
                let a = &self.mant << (self.exp - e) as usize;
                let b = &other.mant << (other.exp - e) as usize;
                a.cmp(&b)
            }
        }
    }

    fn add_impl(&self, other: &Self, negate_other: bool) -> Self {
        let prec = self.prec.max(other.prec);
        let other_mant = if negate_other {
            -&other.mant
        } else {
            other.mant.clone()
        };
        if other.is_zero() {
            return self.with_precision(prec);
        }
        if self.is_zero() {
            return Self::normalized(other_mant, other.exp, prec);
        }
        let (ta, tb) = (self.top_bit().unwrap_or(0), other.top_bit().unwrap_or(0));
        // an operand far below the other's last bit only affects rounding
        let gap = prec as i64 + 4;
        if ta - tb > gap {
            let sticky = other_mant.signum();
            let shifted = (&self.mant << 2usize) + sticky;
            return Self::normalized(shifted, self.exp - 2, prec);
        }
        if tb - ta > gap {
            let shifted = (other_mant << 2usize) + self.mant.signum();
            return Self::normalized(shifted, other.exp - 2, prec);
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as usize;
        let b = other_mant << (other.exp - e) as usize;
        Self::normalized(a + b, e, prec)
    }
}

impl Add<&PrecisionReal> for &PrecisionReal {
    type Output = PrecisionReal;
    fn add(self, rhs: &PrecisionReal) -> PrecisionReal {
        self.add_impl(rhs, false)
    }
}

impl Sub<&PrecisionReal> for &PrecisionReal {
    type Output = PrecisionReal;
    fn sub(self, rhs: &PrecisionReal) -> PrecisionReal {
        self.add_impl(rhs, true)
    }
}

impl Mul<&PrecisionReal> for &PrecisionReal {
    type Output = PrecisionReal;
    fn mul(self, rhs: &PrecisionReal) -> PrecisionReal {
        PrecisionReal::normalized(
            &self.mant * &rhs.mant,
            self.exp + rhs.exp,
            self.prec.max(rhs.prec),
        )
    }
}

/// Panics on a zero divisor.
impl Div<&PrecisionReal> for &PrecisionReal {
    type Output = PrecisionReal;
    fn div(self, rhs: &PrecisionReal) -> PrecisionReal {
        self.checked_div(rhs).expect("division by zero")
    }
}

impl Neg for &PrecisionReal {
    type Output = PrecisionReal;
    fn neg(self) -> PrecisionReal {
        PrecisionReal {
            mant: -&self.mant,
            ..self.clone()
        }
    }
}

impl Neg for PrecisionReal {
    type Output = PrecisionReal;
    fn neg(self) -> PrecisionReal {
        PrecisionReal {
            mant: -self.mant,
            ..self
        }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<PrecisionReal> for PrecisionReal {
            type Output = PrecisionReal;
            fn $method(self, rhs: PrecisionReal) -> PrecisionReal {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&PrecisionReal> for PrecisionReal {
            type Output = PrecisionReal;
            fn $method(self, rhs: &PrecisionReal) -> PrecisionReal {
                (&self).$method(rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);
