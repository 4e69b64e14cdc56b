//! Zeta-type sums: Hurwitz tails `sum_{k>=k0} k^-q`, odd zeta values and
//! polylogarithms `L_i(x) = sum_{k>=0} x^k/(k+1)^i`.

use std::f64::consts::PI;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exact::{bernoulli_even, factorial, ExactRational};
use crate::precision::real::PrecisionReal;

pub const MIN_PRECISION: u32 = 16;

/// log2 of the Euler-Maclaurin remainder bound after `m` Bernoulli terms for
/// `sum_{k>=n} k^-q`:
///
/// `|R| <= 4 (q)_{2m} / (2 pi)^{2m} * n^(1-q-2m) / (q+2m-1)`.
fn em_remainder_log2(q: u64, n: u64, m: u64) -> f64 {
    let poch: f64 = (0..2 * m).map(|i| ((q + i) as f64).log2()).sum();
    2.0 + poch - (2 * m) as f64 * (2.0 * PI).log2() + (1.0 - (q + 2 * m) as f64) * (n as f64).log2()
        - ((q + 2 * m - 1) as f64).log2()
}

/// `sum_{k >= k0} k^-q` for `q >= 2`, `k0 >= 1`, with relative error below
/// `2^-prec`.
pub fn hurwitz_tail(q: u64, k0: u64, prec: u32) -> PrecisionReal {
    assert!(q >= 2 && k0 >= 1, "hurwitz_tail needs q >= 2, k0 >= 1");
    // the sum is at least k0^(1-q)/(q-1); target an absolute error relative to it
    let lower_log2 = (1.0 - q as f64) * (k0 as f64).log2() - ((q - 1) as f64).log2();
    let target = lower_log2 - prec as f64 - 4.0;

    let mut n = k0.max((0.4 * prec as f64).ceil() as u64);
    let m_cap = (prec as u64).div_ceil(8).max(4);
    let m = loop {
        if let Some(m) = (1..=m_cap).find(|&m| em_remainder_log2(q, n, m) < target) {
            break m;
        }
        n *= 2;
    };

    let wp = prec + 32 + (64 - n.leading_zeros());
    let mut acc = PrecisionReal::zero(wp);
    for k in k0..n {
        let pw = PrecisionReal::from_int(num_traits::pow(BigInt::from(k), q as usize), wp);
        acc = &acc + &pw.recip().expect("k >= 1");
    }

    let n_real = PrecisionReal::from_int(n, wp);
    let n_inv = n_real.recip().expect("n >= 1");
    let n_pow_q = n_inv.powi(q); // n^-q
                                 // integral and half-endpoint terms
    acc = &acc + &(&(&n_pow_q * &n_real) / &PrecisionReal::from_int(q - 1, wp));
    acc = &acc + &n_pow_q.ldexp(-1);

    let n_inv_sq = &n_inv * &n_inv;
    let mut n_pow = &n_pow_q * &n_inv; // n^(-q-2j+1) at j = 1
    let mut poch = ExactRational::from(q as i64); // (q)_{2j-1} at j = 1
    for j in 1..=m {
        let coeff =
            bernoulli_even(j as usize) * &poch / ExactRational::from_integer(factorial(2 * j));
        acc = &acc + &(&PrecisionReal::from_rational(&coeff, wp) * &n_pow);
        n_pow = &n_pow * &n_inv_sq;
        poch = poch
            * ExactRational::from((q + 2 * j - 1) as i64)
            * ExactRational::from((q + 2 * j) as i64);
    }
    acc.with_precision(prec)
}

/// `zeta(s)` for odd `s >= 3`, absolute error below `2^(-prec+2)`.
pub fn zeta_odd(s: u64, prec: u32) -> Result<PrecisionReal> {
    if prec < MIN_PRECISION {
        return Err(Error::PrecisionTooLow(prec));
    }
    if s < 3 || s % 2 == 0 {
        return Err(Error::Domain(format!("zeta_odd needs odd s >= 3, got {s}")));
    }
    Ok(hurwitz_tail(s, 1, prec))
}

/// `zeta(s)` for any integer `s >= 2`; used where even arguments are
/// needed (identity checks away from the odd route).
pub fn zeta_int(s: u64, prec: u32) -> Result<PrecisionReal> {
    if prec < MIN_PRECISION {
        return Err(Error::PrecisionTooLow(prec));
    }
    if s < 2 {
        return Err(Error::Domain(format!("zeta diverges at s = {s}")));
    }
    Ok(hurwitz_tail(s, 1, prec))
}

/// `L_i(x) = sum_{k>=0} x^k / (k+1)^i` for rational `|x| < 1`, absolute
/// error below `2^(-prec+2)`.
pub fn polylog(i: u32, x: &ExactRational, prec: u32) -> Result<PrecisionReal> {
    if i < 1 {
        return Err(Error::Domain("polylog order must be >= 1".into()));
    }
    if prec < MIN_PRECISION {
        return Err(Error::PrecisionTooLow(prec));
    }
    if x.abs() >= ExactRational::one() {
        return Err(Error::Domain(format!("polylog needs |x| < 1, got {x}")));
    }
    if x.is_zero() {
        return Ok(PrecisionReal::from_int(1, prec));
    }
    // tail after K terms <= |x|^K / (1 - |x|)
    let lx = x.log2_abs();
    let gap = -(ExactRational::one() - x.abs()).log2_abs();
    let terms = ((prec as f64 + 4.0 + gap) / -lx).ceil().max(1.0) as u64;

    let wp = prec + 16 + (64 - terms.leading_zeros());
    let xr = PrecisionReal::from_rational(x, wp);
    let mut pw = PrecisionReal::from_int(1, wp);
    let mut acc = PrecisionReal::zero(wp);
    for k in 0..terms {
        let den = PrecisionReal::from_int(num_traits::pow(BigInt::from(k + 1), i as usize), wp);
        acc = &acc + &(&pw / &den);
        pw = &pw * &xr;
    }
    Ok(acc.with_precision(prec))
}

#[cfg(test)]
mod tests {
    use super::*;

    const ZETA3: &str = "1.2020569031595942853997381615114499907649862923404988817922715553";
    const ZETA5: &str = "1.0369277551433699263313654864570341680570809195019128119741926779";
    const ZETA2: &str = "1.6449340668482264364724151666460251892189499012067984377355582293";
    const LN2: &str = "0.69314718055994530941723212145817656807550013436025525412068000949";

    fn close_to(x: &PrecisionReal, lit: &str, bits: i64) -> bool {
        let y = PrecisionReal::parse_decimal(lit, x.precision() + 32).unwrap();
        (x - &y).is_below_pow2(bits)
    }

    /// Raw partial sum of 10^6 terms bracketed by the integral tail bounds.
    #[test]
    fn zeta3_against_raw_summation_oracle() {
        let n = 1_000_000u64;
        let partial: f64 = (1..=n).rev().map(|k| (k as f64).powi(-3)).sum();
        let lo = partial + 1.0 / (2.0 * ((n + 1) as f64).powi(2));
        let hi = partial + 1.0 / (2.0 * (n as f64).powi(2));
        let z = zeta_odd(3, 128).unwrap().to_f64();
        assert!(z >= lo - 1e-13 && z <= hi + 1e-13, "{lo} {z} {hi}");
        assert!((z - 1.2020569031595942).abs() < 1e-12);
    }

    #[test]
    fn odd_zeta_reference_digits() {
        let z3 = zeta_odd(3, 220).unwrap();
        assert!(close_to(&z3, ZETA3, 210));
        let z5 = zeta_odd(5, 220).unwrap();
        assert!(close_to(&z5, ZETA5, 210));
        assert!(close_to(&zeta_int(2, 220).unwrap(), ZETA2, 210));
    }

    #[test]
    fn doubling_precision_is_consistent() {
        for s in [3u64, 7, 11] {
            for p in [64u32, 150, 300] {
                let lo = zeta_odd(s, p).unwrap();
                let hi = zeta_odd(s, 2 * p).unwrap();
                assert!((&lo - &hi).is_below_pow2(p as i64 - 2), "s={s} p={p}");
            }
        }
    }

    #[test]
    fn zeta_domain_errors() {
        assert_eq!(zeta_odd(3, 8).unwrap_err(), Error::PrecisionTooLow(8));
        assert!(matches!(zeta_odd(4, 64), Err(Error::Domain(_))));
        assert!(matches!(zeta_odd(1, 64), Err(Error::Domain(_))));
    }

    #[test]
    fn hurwitz_tail_is_relative() {
        // sum_{k>=1000} k^-40 is ~ 1000^-39/39; check against direct summation
        let p = 200;
        let t = hurwitz_tail(40, 1000, p);
        let direct = hurwitz_tail(40, 1001, p)
            + PrecisionReal::from_int(num_traits::pow(BigInt::from(1000), 40), p + 20)
                .recip()
                .unwrap();
        let rel = ((&t - &direct) / t.clone()).log2_abs();
        assert!(rel < -(p as f64) + 4.0, "rel={rel}");
    }

    #[test]
    fn polylog_examples() {
        let half = ExactRational::new(1, 2).unwrap();
        let l1 = polylog(1, &half, 200).unwrap();
        let two_ln2 = PrecisionReal::parse_decimal(LN2, 240).unwrap().ldexp(1);
        assert!((&l1 - &two_ln2).is_below_pow2(195));
        assert!((l1.to_f64() - 1.3862943611).abs() < 1e-9);

        for i in [1, 2, 5] {
            let v = polylog(i, &ExactRational::zero(), 64).unwrap();
            assert_eq!(v.to_f64(), 1.0);
        }
        // L_2(-1) = sum (-1)^k/(k+1)^2 diverges-free but |x| = 1 is rejected
        assert!(polylog(2, &ExactRational::from(-1), 64).is_err());
        assert!(polylog(2, &ExactRational::from(1), 64).is_err());
    }

    #[test]
    fn polylog_negative_argument() {
        // L_1(-1/2) = -log(1 + 1/2) / (-1/2) = 2 log(3/2)
        let v = polylog(1, &ExactRational::new(-1, 2).unwrap(), 100)
            .unwrap()
            .to_f64();
        assert!((v - 2.0 * 1.5f64.ln()).abs() < 1e-14);
    }
}
