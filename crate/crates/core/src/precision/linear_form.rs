use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{lcm_upto, ExactRational};
use crate::partial_fractions::{decompose, integer_scaled, p0_eval, p_poly_eval, FormParams};
use crate::precision::real::PrecisionReal;
use crate::precision::series_sum::eval_s;
use crate::precision::zeta::{polylog, zeta_odd, MIN_PRECISION};

/// `ell = p0 + sum_i p[i-1] zeta(2i+1)`, with `ell = d_n^a S_n(1)` computed
/// independently from the series and `residual` the discrepancy.
#[derive(Clone, Debug)]
pub struct IntegerLinearForm {
    pub params: FormParams,
    pub p0: BigInt,
    /// Coefficient of `zeta(2i+1)` at index `i-1`, `i = 1..=(a-1)/2`.
    pub p: Vec<BigInt>,
    pub ell: PrecisionReal,
    pub residual: PrecisionReal,
    pub precision_bits: u32,
}

/// Serialized linear form; integers and reals are decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormJson {
    pub a: u32,
    pub r: u32,
    pub n: u32,
    pub p0: String,
    pub p: Vec<String>,
    pub ell: String,
    pub residual: String,
    pub precision_bits: u32,
}

/// The residual must fall below `2^-(precision/2)`.
pub fn residual_threshold_bits(precision: u32) -> i64 {
    precision as i64 / 2
}

fn bits_of(x: &BigInt) -> u32 {
    x.bits() as u32
}

fn form_at_precision(params: &FormParams, precision: u32) -> Result<IntegerLinearForm> {
    let table = decompose(params);
    let scaled = integer_scaled(&table)?;
    let a = params.a as usize;
    let d = BigInt::from(lcm_upto(params.n as usize));
    // scaled[i] = d^(a-i) P_i(1); lift every entry to d^a
    let lift = |i: usize| &scaled[i] * num_traits::pow(d.clone(), i);
    let p0 = scaled[0].clone();
    let p: Vec<BigInt> = (1..=(a - 1) / 2).map(|i| lift(2 * i + 1)).collect();
    let d_pow = num_traits::pow(d, a);

    let magnitude = p
        .iter()
        .chain([&p0, &d_pow])
        .map(bits_of)
        .max()
        .unwrap_or(0);
    let wp = precision + magnitude + 64;

    let s = eval_s(params, &ExactRational::one(), wp)?;
    let ell = &s * &PrecisionReal::from_int(d_pow, wp);
    let residual = residual_of(&ell, &p0, &p, wp)?;
    Ok(IntegerLinearForm {
        params: *params,
        p0,
        p,
        ell,
        residual: residual.with_precision(precision),
        precision_bits: precision,
    })
}

fn residual_of(ell: &PrecisionReal, p0: &BigInt, p: &[BigInt], wp: u32) -> Result<PrecisionReal> {
    let mut rhs = PrecisionReal::from_int(p0.clone(), wp);
    for (idx, coeff) in p.iter().enumerate() {
        let z = zeta_odd(2 * idx as u64 + 3, wp)?;
        rhs = &rhs + &(&PrecisionReal::from_int(coeff.clone(), wp) * &z);
    }
    Ok((ell - &rhs).abs())
}

/// Builds `ell_n = d_n^a S_n(1) = p0 + sum p_i zeta(2i+1)` for even `n` and
/// odd `a >= 3`. Retries once at twice the precision before reporting an
/// inconsistency.
pub fn build_linear_form(params: &FormParams, precision: u32) -> Result<IntegerLinearForm> {
    if !params.odd_route() {
        return Err(Error::InvalidParams(format!(
            "linear forms in odd zeta values need n even and a odd >= 3, got a={}, n={}",
            params.a, params.n
        )));
    }
    if precision < MIN_PRECISION {
        return Err(Error::PrecisionTooLow(precision));
    }
    let threshold = residual_threshold_bits(precision);
    let form = form_at_precision(params, precision)?;
    if form.residual.is_below_pow2(threshold) {
        return Ok(form);
    }
    let retry = form_at_precision(params, precision * 2)?;
    if retry.residual.is_below_pow2(threshold) {
        return Ok(IntegerLinearForm {
            precision_bits: precision,
            ..retry
        });
    }
    Err(Error::Inconsistent {
        residual: retry.residual.to_sci_string(12),
        threshold_bits: threshold as u32,
    })
}

impl IntegerLinearForm {
    pub fn to_json(&self) -> FormJson {
        // enough digits to carry ell to an absolute 2^-precision
        let ell_bits = self.ell.log2_abs().max(0.0) + self.precision_bits as f64 + 8.0;
        let ell_digits = (ell_bits * std::f64::consts::LOG10_2).ceil() as usize;
        FormJson {
            a: self.params.a,
            r: self.params.r,
            n: self.params.n,
            p0: self.p0.to_string(),
            p: self.p.iter().map(ToString::to_string).collect(),
            ell: self.ell.to_sci_string(ell_digits),
            residual: self.residual.to_sci_string(6),
            precision_bits: self.precision_bits,
        }
    }

    pub fn passes(&self) -> bool {
        self.residual
            .is_below_pow2(residual_threshold_bits(self.precision_bits))
    }
}

/// Re-verifies a serialized form: recomputes `|ell - p0 - sum p_i zeta(2i+1)|`
/// from the stored integers and decimal `ell`. Returns the recomputed
/// residual and whether it passes the threshold.
pub fn verify_form_json(json: &FormJson) -> Result<(PrecisionReal, bool)> {
    let params = FormParams::new(json.a, json.r, json.n)?;
    if !params.odd_route() {
        return Err(Error::InvalidParams(
            "stored form is not on the odd route".into(),
        ));
    }
    let parse = |s: &str| {
        s.parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("bad integer {s:?}")))
    };
    let p0 = parse(&json.p0)?;
    let p = json
        .p
        .iter()
        .map(|s| parse(s))
        .collect::<Result<Vec<_>>>()?;
    if p.len() != (params.a as usize - 1) / 2 {
        return Err(Error::Parse(format!(
            "expected {} zeta coefficients",
            (params.a - 1) / 2
        )));
    }
    let magnitude = p.iter().chain([&p0]).map(bits_of).max().unwrap_or(0);
    let wp = json.precision_bits + magnitude + 64;
    let ell = PrecisionReal::parse_decimal(&json.ell, wp)?;
    let residual = residual_of(&ell, &p0, &p, wp)?.with_precision(json.precision_bits);
    let ok = residual.is_below_pow2(residual_threshold_bits(json.precision_bits));
    Ok((residual, ok))
}

/// `|S_n(z) - P_0(z) - sum_{i=1}^{a} P_i(z) L_i(1/z)|` for rational `z > 1`.
pub fn verify_identity_at_z(
    params: &FormParams,
    z: &ExactRational,
    precision: u32,
) -> Result<PrecisionReal> {
    if *z <= 1 {
        return Err(Error::Domain(format!(
            "identity check needs z > 1, got {z}"
        )));
    }
    let table = decompose(params);
    let p0 = p0_eval(&table, z);
    let polys = (1..=params.a as usize)
        .map(|i| p_poly_eval(&table, i, z))
        .collect::<Result<Vec<_>>>()?;
    let magnitude = polys
        .iter()
        .chain([&p0])
        .map(|x| x.log2_abs().max(0.0))
        .fold(0.0, f64::max)
        .ceil() as u32;
    let wp = precision + magnitude + 32;

    let x = z.recip()?;
    let mut rhs = PrecisionReal::from_rational(&p0, wp);
    for (idx, poly) in polys.iter().enumerate() {
        if poly.is_zero() {
            continue;
        }
        let li = polylog(idx as u32 + 1, &x, wp)?;
        rhs = &rhs + &(&PrecisionReal::from_rational(poly, wp) * &li);
    }
    let s = eval_s(params, z, wp)?;
    Ok((&s - &rhs).abs().with_precision(precision))
}
