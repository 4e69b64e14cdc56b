//! Growth bounds, the Nesterenko dimension bound `f(a,r)/g(a,r)`, choice of
//! `r`, and empirical rate estimates from computed forms.
//!
//! With `s` the bound on `lim |S_n(1)|^(1/n)` and `B = 2^(a-2r)(2r+1)^(2r+1)`
//! the bound on the coefficient growth, the even-index forms `d_{2n}^a
//! S_{2n}(1)` give `log alpha = 2(a + log s)` and `log beta = 2(a + log B)`,
//! and `1 - log alpha / log beta = f/g`.

use std::f64::consts::LN_2;

use num_bigint::BigInt;
use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{lcm_upto, ExactRational};
use crate::partial_fractions::{decompose, integer_scaled, FormParams};
use crate::precision::series_sum::eval_s;

/// Multiplicative slack on the root-test limit when a finite `n` is compared
/// against the asymptotic bound on `|S_n(1)|^(1/n)`.
pub const S_RATE_SLACK: f64 = 1.02;

/// Slack for the coefficient-growth comparison at finite `n`.
pub const COEFF_RATE_SLACK: f64 = 1.05;

/// Largest zeta height scanned by [`min_a_for_dim`].
pub const SCAN_CAP: u64 = 1_000_000;

fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `x log x - y log y` for `x > y > 0`, without cancellation.
fn xlogx_diff(x: f64, y: f64) -> f64 {
    let d = x - y;
    d * x.ln() + y * (d / y).ln_1p()
}

fn check_params(a: u64, r: u64) -> Result<()> {
    if r < 1 || 2 * r >= a {
        return Err(Error::InvalidParams(format!(
            "need 1 <= r and 2r < a, got a={a}, r={r}"
        )));
    }
    Ok(())
}

/// The bound on `s_{r,a}`, kept in log space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SBound {
    pub log: f64,
    /// `exp(log)` when it is a finite, nonzero `f64`.
    pub value: Option<f64>,
}

/// `(2r+1)^(2r+1) (ra+r)^(ra+r) (a-2r)^(a-2r) / (ra+a-r)^(ra+a-r)`.
pub fn s_bound(r: u64, a: u64) -> Result<SBound> {
    check_params(a, r)?;
    let (af, rf) = (a as f64, r as f64);
    let log =
        xlogx(2.0 * rf + 1.0) + xlogx(af - 2.0 * rf) - xlogx_diff(rf * af + af - rf, rf * af + rf);
    let v = log.exp();
    Ok(SBound {
        log,
        value: (v.is_finite() && v > 0.0).then_some(v),
    })
}

/// The same bound as an exact rational (practical for small `a`).
pub fn s_bound_exact(r: u64, a: u64) -> Result<ExactRational> {
    check_params(a, r)?;
    let pw = |base: u64, e: u64| {
        ExactRational::from_integer(num_traits::pow(BigInt::from(base), e as usize))
    };
    let num = pw(2 * r + 1, 2 * r + 1) * pw(r * a + r, r * a + r) * pw(a - 2 * r, a - 2 * r);
    Ok(num / pw(r * a + a - r, r * a + a - r))
}

/// `2^(a-2r) (2r+1)^(2r+1)`.
pub fn p_growth_bound(r: u64, a: u64) -> Result<f64> {
    Ok(log_p_growth_bound(r, a)?.exp())
}

pub fn log_p_growth_bound(r: u64, a: u64) -> Result<f64> {
    check_params(a, r)?;
    Ok((a - 2 * r) as f64 * LN_2 + xlogx((2 * r + 1) as f64))
}

/// `1 - log(alpha)/log(beta)`, defined for `0 < alpha < 1 < beta`.
pub fn nesterenko_lb(log_alpha: f64, log_beta: f64) -> Result<f64> {
    if !(log_alpha < 0.0) {
        return Err(Error::CriterionInapplicable(format!(
            "alpha = exp({log_alpha}) is not below 1"
        )));
    }
    if !(log_beta > 0.0) {
        return Err(Error::CriterionInapplicable(format!(
            "beta = exp({log_beta}) is not above 1"
        )));
    }
    Ok(1.0 - log_alpha / log_beta)
}

/// `(f(a,r), g(a,r))`.
pub fn f_g(a: u64, r: u64) -> Result<(f64, f64)> {
    check_params(a, r)?;
    let (af, rf) = (a as f64, r as f64);
    Ok((f_only(af, rf), g_only(af, rf)))
}

fn f_only(a: f64, r: f64) -> f64 {
    (a - 2.0 * r) * LN_2 + xlogx_diff(r * a + a - r, r * a + r) - xlogx(a - 2.0 * r)
}

fn g_only(a: f64, r: f64) -> f64 {
    a + (a - 2.0 * r) * LN_2 + xlogx(2.0 * r + 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub a: u64,
    pub r: u64,
    pub log_s_bound: f64,
    pub log_alpha: f64,
    pub log_beta: f64,
    pub f: f64,
    pub g: f64,
    pub delta_lb: f64,
}

impl BoundReport {
    pub fn new(a: u64, r: u64) -> Result<Self> {
        let (f, g) = f_g(a, r)?;
        let log_s = s_bound(r, a)?.log;
        let log_b = log_p_growth_bound(r, a)?;
        Ok(Self {
            a,
            r,
            f,
            g,
            delta_lb: f / g,
            log_alpha: 2.0 * (a as f64 + log_s),
            log_beta: 2.0 * (a as f64 + log_b),
            log_s_bound: log_s,
        })
    }

    /// Whether the criterion's hypothesis `alpha < 1` holds, i.e. whether
    /// `delta_lb` is an actual dimension bound.
    pub fn criterion_applies(&self) -> bool {
        self.log_alpha < 0.0
    }

    /// `delta_lb` recomputed through the criterion, when it applies.
    pub fn via_criterion(&self) -> Result<f64> {
        nesterenko_lb(self.log_alpha, self.log_beta)
    }
}

/// The integer nearest `a/(log a)^2`, clamped to `1..=ceil(a/2)-1`; exact
/// half-integers round down.
pub fn default_r(a: u64) -> u64 {
    let l = (a as f64).ln();
    let x = a as f64 / (l * l);
    let nearest = (x - 0.5).ceil().max(1.0) as u64;
    let max_r = a.div_ceil(2) - 1;
    nearest.clamp(1, max_r.max(1))
}

/// Bounds on `f(a, r)` used to prune scans over `r`.
///
/// With `D = a-2r`, `X = ra+a-r`: `f <= D(1 + log(2X/D))`, and
/// `D log(a/D) <= a/e` with `X <= (r+1)a` gives a bound increasing in `r`.
/// `f <= a(1 + log(a+2))` holds for every admissible `r`.
fn f_upper(a: f64, r: f64) -> f64 {
    let global = a * (1.0 + (a + 2.0).ln());
    let local = a * (1.0 + std::f64::consts::E.recip() + (2.0 * (r + 1.0)).ln());
    local.min(global)
}

/// Maximizes `f(a,r)/g(a,r)` over all admissible `r` (smallest `r` on ties).
///
/// Since `g` increases in `r`, `f_upper(a, r2) / g(a, r1)` bounds `f/g` on
/// `[r1, r2]`; blocks that cannot beat the running best are skipped, and the
/// scan stops once the global bound on `f` cannot.
pub fn optimize_r(a: u64) -> BoundReport {
    assert!(a >= 3, "optimize_r needs a >= 3");
    let max_r = a.div_ceil(2) - 1;
    let af = a as f64;
    let mut best = (1u64, f64::NEG_INFINITY);
    let mut r = 1;
    while r <= max_r {
        let rf = r as f64;
        let g = g_only(af, rf);
        if f_upper(af, f64::INFINITY) / g <= best.1 {
            break;
        }
        let r2 = (2 * r).min(max_r);
        if f_upper(af, r2 as f64) / g <= best.1 {
            r = r2 + 1;
            continue;
        }
        let ratio = f_only(af, rf) / g;
        if ratio > best.1 {
            best = (r, ratio);
        }
        r += 1;
    }
    BoundReport::new(a, best.0).expect("admissible r")
}

/// Cheap upper bound on `max_r f(a,r)/g(a,r)` from dyadic blocks of `r`.
fn delta_upper(a: u64) -> f64 {
    let max_r = a.div_ceil(2) - 1;
    let af = a as f64;
    let mut bound = f64::NEG_INFINITY;
    let mut r1 = 1;
    while r1 <= max_r {
        let r2 = (2 * r1 - 1).min(max_r);
        let g = g_only(af, r1 as f64);
        bound = bound.max(f_upper(af, r2 as f64) / g);
        if f_upper(af, f64::INFINITY) / g <= bound {
            break;
        }
        r1 = r2 + 1;
    }
    bound
}

/// Smallest odd `a >= 3` whose optimized bound reaches `target`.
pub fn min_a_for_dim(target: f64) -> Result<BoundReport> {
    if !(target > 0.0) {
        return Err(Error::InvalidParams(format!(
            "target must be positive, got {target}"
        )));
    }
    (3..=SCAN_CAP)
        .step_by(2)
        .filter(|&a| delta_upper(a) >= target)
        .map(optimize_r)
        .find(|rep| rep.delta_lb >= target)
        .ok_or(Error::ScanCap(SCAN_CAP))
}

/// Slope constant `1/(1 + log 2)` of the asymptotic bound.
pub fn asymptotic_slope() -> f64 {
    1.0 / (1.0 + LN_2)
}

/// `(a, delta_lb(a) (1 + log 2) / log a)` for each `a` in the grid.
pub fn asymptotic_check(a_grid: &[u64]) -> Vec<(u64, f64)> {
    a_grid
        .par_iter()
        .map(|&a| {
            (
                a,
                optimize_r(a).delta_lb / asymptotic_slope() / (a as f64).ln(),
            )
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateMethod {
    RootTest,
    RatioTest,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub values: Vec<(u64, f64)>,
    pub estimate: f64,
    pub method: RateMethod,
}

fn check_rate_input(values: &[(u64, f64)]) -> Result<()> {
    if values.len() < 3 {
        return Err(Error::InvalidParams(
            "rate estimation needs at least 3 points".into(),
        ));
    }
    if let Some((n, v)) = values.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(Error::Domain(format!("nonpositive magnitude {v} at n={n}")));
    }
    Ok(())
}

/// Per-step ratio estimates `(v_{n'}/v_n)^(1/(n'-n))` for consecutive points.
pub fn ratio_steps(values: &[(u64, f64)]) -> Result<Vec<f64>> {
    check_rate_input(values)?;
    let mut sorted = values.to_vec();
    sorted.sort_by_key(|&(n, _)| n);
    Ok(sorted
        .windows(2)
        .map(|w| ((w[1].1.ln() - w[0].1.ln()) / (w[1].0 - w[0].0) as f64).exp())
        .collect())
}

/// Estimate of `limsup |v_n|^(1/n)` from finitely many `(n, |v_n|)`.
pub fn empirical_rate(values: &[(u64, f64)], method: RateMethod) -> Result<RateEstimate> {
    check_rate_input(values)?;
    let estimate = match method {
        RateMethod::RootTest => {
            let &(n, v) = values.iter().max_by_key(|(n, _)| *n).expect("nonempty");
            if n == 0 {
                return Err(Error::Domain("root test needs n > 0".into()));
            }
            (v.ln() / n as f64).exp()
        }
        RateMethod::RatioTest => {
            let steps = ratio_steps(values)?;
            let last = &steps[steps.len().saturating_sub(3)..];
            last.iter().sum::<f64>() / last.len() as f64
        }
    };
    Ok(RateEstimate {
        values: values.to_vec(),
        estimate,
        method,
    })
}

/// One row of empirical growth data at an even index `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub n: u64,
    /// `|S_n(1)|^(1/n)`
    pub s_root: f64,
    /// `max_i |d_n^a P_i(1)|^(1/n)`
    pub coeff_root: f64,
}

/// Natural log of `|S_n(1)|`, with precision raised until the value carries
/// at least 64 significant bits.
pub fn log_s_at_one(params: &FormParams, precision: u32) -> Result<f64> {
    let mut prec = precision;
    loop {
        let s = eval_s(params, &ExactRational::one(), prec)?;
        if !s.is_zero() && s.log2_abs() > -(prec as f64) + 64.0 {
            return Ok(s.log2_abs() * LN_2);
        }
        prec *= 2;
    }
}

/// Natural log of `max_i |d_n^a P_i(1)|`, `i = 0..=a`.
pub fn log_max_coefficient(params: &FormParams) -> Result<f64> {
    let table = decompose(params);
    let scaled = integer_scaled(&table)?;
    let d = BigInt::from(lcm_upto(params.n as usize));
    let max = scaled
        .iter()
        .enumerate()
        .map(|(i, v)| v.abs() * num_traits::pow(d.clone(), i))
        .max()
        .expect("a >= 1");
    Ok(ExactRational::from_integer(max).log2_abs() * LN_2)
}

/// Growth data for even `n` in `2..=n_max`.
pub fn rates_table(a: u32, r: u32, n_max: u32, precision: u32) -> Result<Vec<RateRow>> {
    FormParams::new(a, r, 0)?;
    (2..=n_max)
        .step_by(2)
        .map(|n| {
            let p = FormParams::new(a, r, n)?;
            let nf = n as f64;
            Ok(RateRow {
                n: n as u64,
                s_root: (log_s_at_one(&p, precision)? / nf).exp(),
                coeff_root: (log_max_coefficient(&p)? / nf).exp(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s_bound_examples() {
        assert_eq!(
            s_bound_exact(1, 3).unwrap(),
            ExactRational::new(6912, 3125).unwrap()
        );
        let v = s_bound(1, 3).unwrap().value.unwrap();
        assert!((v - 6912.0 / 3125.0).abs() < 1e-12);
        // 27 * 6^6 * 27 / 9^9
        assert!(
            (s_bound(1, 5).unwrap().value.unwrap() - 27.0 * 46656.0 * 27.0 / 387420489.0).abs()
                < 1e-12
        );
        let v25 = s_bound(2, 5).unwrap().value.unwrap();
        assert!((v25 - 3125.0 * 12f64.powi(12) / 13f64.powi(13)).abs() < 1e-9);
        assert!((v25 - 91.9944).abs() < 1e-4);
        assert!(s_bound(3, 5).is_err());
        // log form stays finite where the linear value overflows
        let huge = s_bound(400, 1_000_001).unwrap();
        assert!(huge.log.is_finite());
    }

    #[test]
    fn stable_difference_matches_direct() {
        for (x, y) in [(9.0, 6.0), (250.0, 1.0)] {
            let direct = xlogx(x) - xlogx(y);
            assert!((xlogx_diff(x, y) - direct).abs() <= 1e-12 * direct.abs().max(1.0));
        }
        // x = y + 3 with y = 1e12: Taylor series in 3/y
        let y = 1e12f64;
        let series = 3.0 * (1.0 + y.ln()) + 4.5 / y;
        assert!((xlogx_diff(y + 3.0, y) - series).abs() <= 1e-14 * series);
    }

    #[test]
    fn p_growth_examples() {
        assert!((p_growth_bound(1, 3).unwrap() - 54.0).abs() < 1e-9);
        assert!((p_growth_bound(1, 5).unwrap() - 216.0).abs() < 1e-9);
        assert!((p_growth_bound(2, 5).unwrap() - 6250.0).abs() < 1e-6);
        assert!(p_growth_bound(0, 5).is_err());
    }

    #[test]
    fn nesterenko_examples() {
        assert_eq!(nesterenko_lb(-1.0, 1.0).unwrap(), 2.0);
        assert!((nesterenko_lb(-LN_2, 4f64.ln()).unwrap() - 1.5).abs() < 1e-15);
        assert!(matches!(
            nesterenko_lb(0.1, 1.0),
            Err(Error::CriterionInapplicable(_))
        ));
        assert!(matches!(
            nesterenko_lb(-0.1, 0.0),
            Err(Error::CriterionInapplicable(_))
        ));
        // decreasing in log_alpha at fixed log_beta
        assert!(nesterenko_lb(-2.0, 3.0).unwrap() > nesterenko_lb(-1.0, 3.0).unwrap());
    }

    #[test]
    fn f_g_examples() {
        let (f, g) = f_g(3, 1).unwrap();
        assert!((f - 3.1951).abs() < 1e-4, "{f}");
        assert!((g - 6.9889).abs() < 1e-4, "{g}");
        assert!((f / g - 0.4572).abs() < 1e-4);
        let (f5, g5) = f_g(5, 1).unwrap();
        assert!(f5 > 0.0 && g5 > 0.0);
        assert!(f_g(4, 2).is_err());
    }

    #[test]
    fn f_matches_g_minus_a_minus_log_s() {
        for a in 3..60u64 {
            for r in 1..=(a - 1) / 2 {
                let (f, g) = f_g(a, r).unwrap();
                let ls = s_bound(r, a).unwrap().log;
                assert!(
                    (g - a as f64 - ls - f).abs() <= 1e-9 * f.abs().max(1.0),
                    "a={a} r={r}"
                );
                let rep = BoundReport::new(a, r).unwrap();
                match rep.via_criterion() {
                    Ok(v) => assert!(rep.criterion_applies() && (v - rep.delta_lb).abs() < 1e-9),
                    Err(_) => assert!(!rep.criterion_applies()),
                }
            }
        }
    }

    #[test]
    fn default_r_examples() {
        assert_eq!(default_r(3), 1);
        assert_eq!(default_r(100), 5);
        assert_eq!(default_r(1000), 21);
        for a in 3..2000 {
            let r = default_r(a);
            assert!(r >= 1 && 2 * r < a);
        }
    }

    #[test]
    fn optimize_examples() {
        let rep = optimize_r(3);
        assert_eq!(rep.r, 1);
        assert!((rep.delta_lb - 0.4572).abs() < 1e-3);
        for a in (3..400).step_by(2).chain([1001, 4999, 20001]) {
            let rep = optimize_r(a);
            let (f, g) = f_g(a, default_r(a)).unwrap();
            assert!(rep.delta_lb >= f / g);
        }
    }

    #[test]
    fn optimize_agrees_with_unpruned_scan() {
        for a in (3..800u64).step_by(7).chain([2001, 10_001, 200_001]) {
            let mut best = (0, f64::NEG_INFINITY);
            for r in 1..=(a - 1) / 2 {
                let (f, g) = f_g(a, r).unwrap();
                if f / g > best.1 {
                    best = (r, f / g);
                }
            }
            let rep = optimize_r(a);
            assert_eq!((rep.r, rep.delta_lb), best, "a={a}");
        }
    }

    #[test]
    fn upper_bounds_dominate() {
        for a in (3..600u64).step_by(2).chain([5001, 100_001]) {
            let du = delta_upper(a);
            for r in 1..=(a - 1) / 2 {
                let (f, g) = f_g(a, r).unwrap();
                assert!(f <= f_upper(a as f64, r as f64), "a={a} r={r}");
                assert!(f / g <= du, "a={a} r={r}");
            }
        }
    }

    #[test]
    fn optimized_bound_nondecreasing_in_odd_a() {
        let deltas: Vec<f64> = (3..=201)
            .step_by(2)
            .map(|a| optimize_r(a).delta_lb)
            .collect();
        assert!(deltas.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn min_a_examples() {
        assert_eq!(min_a_for_dim(0.4).unwrap().a, 3);
        let one = min_a_for_dim(1.0).unwrap();
        assert!(one.delta_lb >= 1.0);
        assert!(optimize_r(one.a - 2).delta_lb < 1.0);
        assert!(min_a_for_dim(0.0).is_err());
    }

    #[test]
    fn rate_estimators() {
        let geo: Vec<_> = (1..=10).map(|n| (n, 3f64.powi(-(n as i32)))).collect();
        let root = empirical_rate(&geo, RateMethod::RootTest).unwrap();
        assert!((root.estimate - 1.0 / 3.0).abs() < 1e-12);
        let ratio = empirical_rate(&geo, RateMethod::RatioTest).unwrap();
        assert!((ratio.estimate - 1.0 / 3.0).abs() < 1e-12);
        let flat: Vec<_> = (1..=5).map(|n| (n, 7.0)).collect();
        assert!(
            (empirical_rate(&flat, RateMethod::RatioTest)
                .unwrap()
                .estimate
                - 1.0)
                .abs()
                < 1e-12
        );
        assert!(
            (empirical_rate(&flat, RateMethod::RootTest)
                .unwrap()
                .estimate
                - 7f64.powf(0.2))
            .abs()
                < 1e-12
        );
        assert!(empirical_rate(&geo[..2], RateMethod::RootTest).is_err());
        let mut bad = geo.clone();
        bad[4].1 = 0.0;
        assert!(matches!(
            empirical_rate(&bad, RateMethod::RatioTest),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn rates_table_rows() {
        let rows = rates_table(3, 1, 6, 128).unwrap();
        assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![2, 4, 6]);
        assert!(rows.iter().all(|r| r.s_root > 0.0 && r.coeff_root > 1.0));
    }
}
