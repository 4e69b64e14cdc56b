//! Evaluation of `S_n(z) = sum_{k>=0} R_n(k) z^-k` for rational `z >= 1`.
//!
//! Terms vanish for `k < rn` and are positive afterwards. The head of the
//! series is summed term by term with the hypergeometric ratio
//!
//! ```text
//! R(k+1)/R(k) = (k+1)(k+n+2+rn) / ((k-rn+1)(k+n+2)) * ((k+1)/(k+n+2))^a
//! ```
//!
//! For `z > 1` the tail is bounded geometrically. For `z = 1` the tail is
//! evaluated from the expansion of `R` at infinity,
//! `R(k) = n!^(a-2r) k^-s0 f(1/k)`, as `sum_m f_m zeta(m+s0, K)`, with a
//! Cauchy bound on the truncated coefficients.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exact::ExactRational;
use crate::partial_fractions::{rn_at, FormParams};
use crate::precision::real::PrecisionReal;
use crate::precision::zeta::hurwitz_tail;
use crate::series::TruncatedSeries;

const MAX_TERMS: u64 = 50_000_000;

/// Ratio `R(k+1)/R(k)` as an exact rational, valid for `k >= rn`.
fn term_ratio(p: &FormParams, k: u64) -> ExactRational {
    let (k, n, rn, a) = (k as i64, p.n as i64, p.rn() as i64, p.a as usize);
    let num = BigInt::from(k + 1) * num_traits::pow(BigInt::from(k + 1), a) * (k + n + 2 + rn);
    let den = BigInt::from(k - rn + 1) * num_traits::pow(BigInt::from(k + n + 2), a + 1);
    ExactRational::new(num, den).expect("k >= rn keeps the denominator positive")
}

/// `log2` of an upper bound on `R(k+1)/R(k)` valid for every `k >= from`
/// (each numerator factor ratio `1 + 1/(k+c)` decreases in `k`; the
/// denominator ratios are below one).
fn ratio_bound_log2(p: &FormParams, from: u64) -> f64 {
    let (n, rn) = (p.n as f64, p.rn());
    let k = from as f64;
    let mut acc = 0.0;
    for i in 0..rn {
        let i = i as f64;
        acc += (1.0 / (k - rn as f64 + 1.0 + i)).ln_1p();
        acc += (1.0 / (k + n + 2.0 + i)).ln_1p();
    }
    acc / std::f64::consts::LN_2
}

/// Partial sum `sum_{k=rn}^{end-1} R(k) z^-k` plus the last term computed
/// (`R(end) z^-end`), at working precision `wp`. Stops early when `stop`
/// returns true for `(k, next_term)`.
fn head_sum(
    p: &FormParams,
    z: &ExactRational,
    wp: u32,
    mut stop: impl FnMut(u64, &PrecisionReal) -> bool,
) -> Result<(PrecisionReal, u64)> {
    let k0 = p.rn();
    let z_inv = z.recip()?;
    let first = rn_at(p, k0) * z_inv.pow(k0 as u32);
    let mut term = PrecisionReal::from_rational(&first, wp);
    let z_inv_real = PrecisionReal::from_rational(&z_inv, wp);
    let unit_z = z.is_one();
    let mut acc = PrecisionReal::zero(wp);
    let mut k = k0;
    loop {
        if stop(k, &term) {
            return Ok((acc, k));
        }
        if k - k0 > MAX_TERMS {
            return Err(Error::PrecisionUnreachable(format!(
                "series for {p:?} at z = {z} did not certify within {MAX_TERMS} terms"
            )));
        }
        acc = &acc + &term;
        let ratio = PrecisionReal::from_rational(&term_ratio(p, k), wp);
        term = &term * &ratio;
        if !unit_z {
            term = &term * &z_inv_real;
        }
        k += 1;
    }
}

/// Integer coefficients `f_0..f_{order-1}` of
/// `f(w) = prod (1 + c w) / prod_{m=1}^{n+1} (1 + m w)^a` where the numerator
/// runs over `c = 1-rn+i` and `c = n+2+i`, `0 <= i < rn`.
fn expansion_at_infinity(p: &FormParams, order: usize) -> Vec<ExactRational> {
    let one = ExactRational::one();
    let (rn, n) = (p.rn() as i64, p.n as i64);
    let mut num = TruncatedSeries::one(order);
    for i in 0..rn {
        num.mul_linear(&one, &ExactRational::from(1 - rn + i));
        num.mul_linear(&one, &ExactRational::from(n + 2 + i));
    }
    let mut den = TruncatedSeries::one(order);
    for m in 1..=n + 1 {
        den.mul_linear(&one, &ExactRational::from(m));
    }
    let den_inv = den.inverse().expect("constant term 1").pow(p.a as u64);
    num.mul(&den_inv).expect("same order").into_coeffs()
}

/// `log2` of `max_{|w| = rho} |f(w)|` bounded factorwise, `rho = 1/(2(n+1))`.
fn cauchy_bound_log2(p: &FormParams) -> f64 {
    let (rn, n) = (p.rn() as f64, p.n as f64);
    let rho = 1.0 / (2.0 * (n + 1.0));
    let mut acc = 0.0;
    for i in 0..p.rn() {
        let i = i as f64;
        acc += (1.0 + (1.0 - rn + i).abs() * rho).log2();
        acc += (1.0 + (n + 2.0 + i) * rho).log2();
    }
    for m in 1..=p.n + 1 {
        acc -= p.a as f64 * (1.0 - m as f64 * rho).log2();
    }
    acc
}

/// `sum_{k>=cut} R(k)` via the expansion at infinity; absolute error below
/// `2^-target_bits`.
fn unit_tail(p: &FormParams, cut: u64, target_bits: i64, wp: u32) -> PrecisionReal {
    let s0 = p.decay_exponent() as u64;
    let rho_k = cut as f64 / (2.0 * (p.n as f64 + 1.0));
    let lead = (p.prefactor().bits() as f64)
        + cauchy_bound_log2(p)
        + 1.0
        + (1.0 - s0 as f64) * (cut as f64).log2()
        - (1.0 - 1.0 / rho_k).log2();
    // remainder after f_0..f_M: 2 * prefactor * M_rho * K^(1-s0) * (rho K)^-(M+1) / (1 - 1/(rho K))
    let drop_per_term = rho_k.log2();
    let order = (((lead + target_bits as f64) / drop_per_term)
        .ceil()
        .max(0.0) as usize)
        + 1;

    // the expansion can cancel by up to M_rho relative to the result
    let guard = cauchy_bound_log2(p).max(0.0).ceil() as u32;
    let wp = wp + guard;
    let coeffs = expansion_at_infinity(p, order);
    let mut acc = PrecisionReal::zero(wp);
    for (m, f) in coeffs.iter().enumerate() {
        if f.is_zero() {
            continue;
        }
        let tail = hurwitz_tail(m as u64 + s0, cut, wp);
        acc = &acc + &(&PrecisionReal::from_rational(f, wp) * &tail);
    }
    &acc * &PrecisionReal::from_int(p.prefactor(), wp)
}

/// `S_n(z)` for rational `z >= 1`, with absolute error below
/// `2^-prec * max(1, S_n(z))`.
pub fn eval_s(params: &FormParams, z: &ExactRational, prec: u32) -> Result<PrecisionReal> {
    if *z < 1 {
        return Err(Error::Domain(format!(
            "S_n(z) is only evaluated for z >= 1, got {z}"
        )));
    }
    let s0 = params.decay_exponent();
    if s0 < 2 {
        return Err(Error::InvalidParams(format!(
            "a(n+1) - 2rn = {s0} < 2: the series diverges at |z| = 1"
        )));
    }
    let wp = prec + 48;
    let target = prec as f64 + 4.0;

    if z.is_one() {
        let cut = (params.rn() + 1)
            .max(2 * params.rn() + params.n as u64 + 2)
            .max(128 * (params.n as u64 + 1));
        let (head, _) = head_sum(params, z, wp + 16, |k, _| k >= cut)?;
        let tail = unit_tail(params, cut, target as i64, wp + 16);
        return Ok((&head + &tail).with_precision(prec));
    }

    let z_log2 = z.log2_abs();
    let (head, _) = head_sum(params, z, wp + 16, |k, term| {
        let q_log2 = ratio_bound_log2(params, k) - z_log2;
        if q_log2 >= -1e-9 {
            return false;
        }
        // tail <= term / (1 - q)
        let tail_log2 = term.log2_abs() - (1.0 - q_log2.exp2()).log2();
        term.is_zero() || tail_log2 < -target
    })?;
    Ok(head.with_precision(prec))
}
