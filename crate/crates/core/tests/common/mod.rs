//! Reference computations kept independent of the library's algorithms.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use zetaforms::{ExactRational, FormParams, PartialFractionTable};

pub fn q(x: &ExactRational) -> BigRational {
    BigRational::new(x.numer().clone(), x.denom().clone())
}

pub fn lcm_oracle(n: u32) -> BigInt {
    (1..=n as u64).fold(BigInt::one(), |acc, k| acc.lcm(&BigInt::from(k)))
}

fn factorial(n: u32) -> BigInt {
    (1..=n as u64).fold(BigInt::one(), |acc, k| acc * k)
}

/// `R_n(t)` straight from its product form.
pub fn rn_oracle(p: &FormParams, t: &BigRational) -> BigRational {
    let (a, r, n) = (p.a, p.r, p.n);
    let rn = (r * n) as i64;
    let int = |k: i64| BigRational::from_integer(BigInt::from(k));
    let mut num = BigRational::from_integer(num_traits::pow(factorial(n), (a - 2 * r) as usize));
    for m in 0..rn {
        num *= t - int(rn - 1 - m);
        num *= t + int(n as i64 + 2 + m);
    }
    let mut den = BigRational::one();
    for m in 0..=n as i64 {
        den *= num_traits::pow(t + int(1 + m), a as usize);
    }
    num / den
}

/// `P_i(z) = sum_j c[i][j] z^j`.
pub fn p_oracle(table: &PartialFractionTable, i: usize, z: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    let mut zj = BigRational::one();
    for c in table.row(i) {
        acc += q(c) * &zj;
        zj *= z;
    }
    acc
}

/// `P_0(z) = -sum_{i,j} c[i][j] sum_{k<j} z^(j-k) / (k+1)^i`.
pub fn p0_oracle(table: &PartialFractionTable, z: &BigRational) -> BigRational {
    let p = table.params();
    let mut acc = BigRational::zero();
    for i in 1..=p.a as usize {
        for j in 0..=p.n as usize {
            let c = q(table.c(i, j));
            if c.is_zero() {
                continue;
            }
            for k in 0..j {
                let den = num_traits::pow(BigInt::from(k + 1), i);
                acc -= &c * num_traits::pow(z.clone(), j - k) / den;
            }
        }
    }
    acc
}

/// Fixed-point reals: value = mantissa * 2^-bits.
#[derive(Clone, Debug)]
pub struct Fixed {
    pub m: BigInt,
    pub bits: u32,
}

impl Fixed {
    pub fn from_rational(x: &BigRational, bits: u32) -> Self {
        let scaled = x.numer() << bits as usize;
        Fixed {
            m: scaled.div_floor(x.denom()),
            bits,
        }
    }

    pub fn from_int(x: &BigInt, bits: u32) -> Self {
        Fixed {
            m: x << bits as usize,
            bits,
        }
    }

    pub fn add(&self, o: &Fixed) -> Fixed {
        Fixed {
            m: &self.m + &o.m,
            bits: self.bits,
        }
    }

    pub fn sub(&self, o: &Fixed) -> Fixed {
        Fixed {
            m: &self.m - &o.m,
            bits: self.bits,
        }
    }

    pub fn mul(&self, o: &Fixed) -> Fixed {
        Fixed {
            m: (&self.m * &o.m) >> self.bits as usize,
            bits: self.bits,
        }
    }

    pub fn mul_rational(&self, x: &BigRational) -> Fixed {
        Fixed {
            m: (&self.m * x.numer()).div_floor(x.denom()),
            bits: self.bits,
        }
    }

    /// `log2 |x|`, or `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.m.is_zero() {
            return f64::NEG_INFINITY;
        }
        let len = self.m.bits() as i64;
        let shift = (len - 60).max(0);
        let top: BigInt = self.m.abs() >> shift as usize;
        let top: f64 = top.to_string().parse().unwrap();
        top.log2() + shift as f64 - self.bits as f64
    }

    pub fn to_f64(&self) -> f64 {
        let l = self.log2_abs();
        if l == f64::NEG_INFINITY {
            return 0.0;
        }
        let sign = if self.m.is_negative() { -1.0 } else { 1.0 };
        sign * l.exp2()
    }
}

/// `zeta(s)` for integer `s >= 2` through Borwein's alternating-series
/// algorithm for the eta function; error below `2^-bits`.
pub fn zeta_oracle(s: u32, bits: u32) -> Fixed {
    let w = bits + 64;
    let nterms = (bits as f64 / 2.5).ceil() as i64 + 10;
    // d_k = n sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!), all exact rationals
    let mut d = Vec::with_capacity(nterms as usize + 1);
    let mut acc = BigRational::zero();
    let n = nterms;
    let mut term = BigRational::new(BigInt::one(), BigInt::from(n)); // i = 0: (n-1)!/n! = 1/n
    for i in 0..=n {
        if i > 0 {
            // ratio of consecutive summands
            let num = BigInt::from(n + i - 1) * BigInt::from(4) * BigInt::from(n - i + 1);
            let den = BigInt::from((2 * i - 1) * (2 * i));
            term *= BigRational::new(num, den);
        }
        acc += &term;
        d.push(&acc * BigInt::from(n));
    }
    let dn = d[n as usize].clone();
    let mut eta = BigRational::zero();
    for k in 0..n {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let t = (&d[k as usize] - &dn) * BigInt::from(sign)
            / num_traits::pow(BigInt::from(k + 1), s as usize);
        eta += t;
    }
    eta = -eta / dn;
    // zeta = eta / (1 - 2^(1-s))
    let two = BigInt::from(2);
    let factor = BigRational::new(
        num_traits::pow(two.clone(), s as usize - 1),
        num_traits::pow(two, s as usize - 1) - 1,
    );
    let z = Fixed::from_rational(&(eta * factor), w);
    Fixed {
        m: z.m >> 64usize,
        bits,
    }
}

/// `S_n(z) = sum_k R_n(k) z^-k` for `z > 1` by plain summation until the
/// terms fall below `2^-(bits+40)` while shrinking geometrically.
pub fn s_direct(p: &FormParams, z: &BigRational, bits: u32) -> Fixed {
    let w = bits + 32;
    let zinv = z.recip();
    let mut zk = BigRational::one();
    let mut total = Fixed {
        m: BigInt::zero(),
        bits: w,
    };
    let mut prev = f64::INFINITY;
    for k in 0u64.. {
        let t = rn_oracle(p, &BigRational::from_integer(BigInt::from(k))) * &zk;
        let tf = Fixed::from_rational(&t, w);
        total = total.add(&tf);
        let l = tf.log2_abs();
        // terms eventually shrink by at least a fixed ratio, so stopping
        // well below the target after a decreasing step is safe
        if k > (p.r * p.n) as u64 && l < -(bits as f64 + 40.0) && l < prev {
            break;
        }
        prev = l;
        zk *= &zinv;
    }
    Fixed {
        m: total.m >> 32usize,
        bits,
    }
}

/// `L_i(x) = sum_k x^k / (k+1)^i` for rational `0 < x < 1`.
pub fn polylog_oracle(i: u32, x: &BigRational, bits: u32) -> Fixed {
    let w = bits + 32;
    let mut total = Fixed {
        m: BigInt::zero(),
        bits: w,
    };
    let mut xk = BigRational::one();
    for k in 0u64.. {
        let t = &xk / BigRational::from_integer(num_traits::pow(BigInt::from(k + 1), i as usize));
        let tf = Fixed::from_rational(&t, w);
        if tf.m.is_zero() {
            break;
        }
        total = total.add(&tf);
        xk *= x;
    }
    Fixed {
        m: total.m >> 32usize,
        bits,
    }
}
