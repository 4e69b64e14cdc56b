//! The rational function
//!
//! ```text
//! R_n(t) = n!^(a-2r) (t-rn+1)_{rn} (t+n+2)_{rn} / ((t+1)_{n+1})^a
//! ```
//!
//! its partial fraction coefficients `c[i][j]` (the coefficient of
//! `1/(t+j+1)^i`), and the polynomials `P_0`, `P_i` assembled from them.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{factorial, lcm_upto, pochhammer_int, ExactRational};
use crate::series::TruncatedSeries;

/// `(a, r, n)`: zeta height, acceleration parameter and approximation index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FormParams {
    pub a: u32,
    pub r: u32,
    pub n: u32,
}

impl FormParams {
    /// Requires `1 <= r` and `2r < a`.
    pub fn new(a: u32, r: u32, n: u32) -> Result<Self> {
        if r < 1 {
            return Err(Error::InvalidParams(format!("r must be >= 1, got {r}")));
        }
        if 2 * r >= a {
            return Err(Error::InvalidParams(format!(
                "need 2r < a, got a={a}, r={r}"
            )));
        }
        Ok(Self { a, r, n })
    }

    /// The parity route where only odd zeta values survive at `z = 1`.
    pub fn odd_route(&self) -> bool {
        self.n % 2 == 0 && self.a % 2 == 1 && self.a >= 3
    }

    /// `r * n`, the length of each numerator Pochhammer block.
    pub fn rn(&self) -> u64 {
        self.r as u64 * self.n as u64
    }

    /// Decay exponent of `R_n(k)` as `k -> oo`: `a(n+1) - 2rn`.
    pub fn decay_exponent(&self) -> i64 {
        self.a as i64 * (self.n as i64 + 1) - 2 * self.rn() as i64
    }

    /// `n!^(a-2r)`.
    pub fn prefactor(&self) -> BigInt {
        num_traits::pow(factorial(self.n as u64), (self.a - 2 * self.r) as usize)
    }
}

/// `R_n(k)` evaluated exactly.
pub fn rn_at(params: &FormParams, k: u64) -> ExactRational {
    let rn = params.rn();
    let k = k as i64;
    let head = pochhammer_int(k - rn as i64 + 1, rn);
    if head.is_zero() {
        return ExactRational::zero();
    }
    let tail = pochhammer_int(k + params.n as i64 + 2, rn);
    let den = num_traits::pow(
        pochhammer_int(k + 1, params.n as u64 + 1),
        params.a as usize,
    );
    ExactRational::new(params.prefactor() * head * tail, den).expect("positive denominator")
}

/// `R_n(x)` at an arbitrary rational point off the poles `{-1, ..., -n-1}`.
pub fn rn_at_rational(params: &FormParams, x: &ExactRational) -> Result<ExactRational> {
    let rn = params.rn() as i64;
    let n = params.n as i64;
    let mut num = ExactRational::from_integer(params.prefactor());
    for i in 0..rn {
        num *= &(x + ExactRational::from(i - rn + 1));
        num *= &(x + ExactRational::from(n + 2 + i));
    }
    let mut den = ExactRational::one();
    for m in 0..=n {
        den *= &(x + ExactRational::from(m + 1));
    }
    num.checked_div(&den.pow(params.a))
}

/// All coefficients `c[i][j]`, `i = 1..=a`, `j = 0..=n`, of
/// `R_n(t) = sum c[i][j] / (t+j+1)^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFractionTable {
    params: FormParams,
    // rows indexed by i-1, columns by j
    c: Vec<Vec<ExactRational>>,
}

impl PartialFractionTable {
    pub fn params(&self) -> &FormParams {
        &self.params
    }

    /// `c[i][j]` with `1 <= i <= a`, `0 <= j <= n`.
    pub fn c(&self, i: usize, j: usize) -> &ExactRational {
        &self.c[i - 1][j]
    }

    pub fn row(&self, i: usize) -> &[ExactRational] {
        &self.c[i - 1]
    }

    /// A copy of the table with `c[i][j]` shifted by `delta`. Only useful for
    /// exercising the checks in this module.
    pub fn with_perturbed_coefficient(&self, i: usize, j: usize, delta: &ExactRational) -> Self {
        let mut out = self.clone();
        out.c[i - 1][j] += delta;
        out
    }

    /// `sum_{i,j} c[i][j] / (x+j+1)^i`.
    pub fn eval_decomposition(&self, x: &ExactRational) -> Result<ExactRational> {
        let mut acc = ExactRational::zero();
        for j in 0..=self.params.n as usize {
            let shifted = x + ExactRational::from(j as i64 + 1);
            let inv = shifted.recip()?;
            let mut pow = inv.clone();
            for i in 1..=self.params.a as usize {
                let c = self.c(i, j);
                if !c.is_zero() {
                    acc += &(c * &pow);
                }
                pow *= &inv;
            }
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> TableJson {
        TableJson {
            a: self.params.a,
            r: self.params.r,
            n: self.params.n,
            c: self
                .c
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|x| [x.numer().to_string(), x.denom().to_string()])
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_json(json: &TableJson) -> Result<Self> {
        let params = FormParams::new(json.a, json.r, json.n)?;
        let (rows, cols) = (params.a as usize, params.n as usize + 1);
        if json.c.len() != rows || json.c.iter().any(|row| row.len() != cols) {
            return Err(Error::Parse(format!(
                "coefficient array must be {rows} x {cols}"
            )));
        }
        let c = json
            .c
            .iter()
            .map(|row| {
                row.iter()
                    .map(|[num, den]| format!("{num}/{den}").parse())
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { params, c })
    }
}

/// JSON form of a [`PartialFractionTable`]; integers are decimal strings and
/// `c[i-1][j] = [numerator, denominator]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableJson {
    pub a: u32,
    pub r: u32,
    pub n: u32,
    pub c: Vec<Vec<[String; 2]>>,
}

/// Column `j` of the table: the expansion of `R_n(t) (t+j+1)^a` at
/// `t = -j-1+e` to order `a`, read off as `c[i][j] = [e^(a-i)]`.
fn column(params: &FormParams, j: u32) -> Vec<ExactRational> {
    let order = params.a as usize;
    let one = ExactRational::one();
    let (rn, n, j) = (params.rn() as i64, params.n as i64, j as i64);

    let mut num = TruncatedSeries::constant(order, ExactRational::from_integer(params.prefactor()));
    for i in 0..rn {
        num.mul_linear(&ExactRational::from(i - j - rn), &one);
        num.mul_linear(&ExactRational::from(n + 1 - j + i), &one);
    }

    let mut den = TruncatedSeries::one(order);
    for m in (0..=n).filter(|&m| m != j) {
        den.mul_linear(&ExactRational::from(m - j), &one);
    }
    let den_inv = den
        .inverse()
        .expect("poles are simple away from j")
        .pow(params.a as u64);

    let full = num.mul(&den_inv).expect("same order");
    let coeffs = full.into_coeffs();
    (1..=order).map(|i| coeffs[order - i].clone()).collect()
}

/// Computes the full table of partial fraction coefficients of `R_n`.
///
/// Columns are independent and computed in parallel; the result does not
/// depend on the number of worker threads.
pub fn decompose(params: &FormParams) -> PartialFractionTable {
    let cols: Vec<Vec<ExactRational>> = (0..=params.n)
        .into_par_iter()
        .map(|j| column(params, j))
        .collect();
    let a = params.a as usize;
    let c = (0..a)
        .map(|row| cols.iter().map(|col| col[row].clone()).collect())
        .collect();
    PartialFractionTable { params: *params, c }
}

/// `P_i(z) = sum_j c[i][j] z^j` for `1 <= i <= a`.
pub fn p_poly_eval(
    table: &PartialFractionTable,
    i: usize,
    z: &ExactRational,
) -> Result<ExactRational> {
    let a = table.params.a as usize;
    if !(1..=a).contains(&i) {
        return Err(Error::IndexOutOfRange { index: i, max: a });
    }
    let mut acc = ExactRational::zero();
    for c in table.row(i).iter().rev() {
        acc = acc * z + c;
    }
    Ok(acc)
}

/// `P_0(z) = -sum_{i=1}^{a} sum_{j=1}^{n} c[i][j] sum_{k=0}^{j-1} z^(j-k) / (k+1)^i`.
pub fn p0_eval(table: &PartialFractionTable, z: &ExactRational) -> ExactRational {
    let FormParams { a, n, .. } = table.params;
    let mut total = ExactRational::zero();
    for i in 1..=a {
        // h = sum_{k=0}^{j-1} z^(j-k)/(k+1)^i, advanced via h_{j+1} = z (h_j + 1/(j+1)^i)
        let mut h = ExactRational::zero();
        for j in 1..=n as usize {
            let inv = ExactRational::new(1, num_traits::pow(BigInt::from(j), i as usize))
                .expect("nonzero");
            h = z * (h + inv);
            let c = table.c(i as usize, j);
            if !c.is_zero() {
                total += &(c * &h);
            }
        }
    }
    -total
}

/// Exact check of `c[i][n-j] = (-1)^(a-i) (-1)^(an) c[i][j]` over the table.
pub fn check_symmetry(table: &PartialFractionTable) -> bool {
    let FormParams { a, n, .. } = table.params;
    (1..=a as usize).all(|i| {
        let flip = (a as usize - i + (a as usize) * (n as usize)) % 2 == 1;
        (0..=n as usize).all(|j| {
            let mirrored = table.c(i, n as usize - j);
            let c = table.c(i, j);
            if flip {
                *mirrored == -c
            } else {
                mirrored == c
            }
        })
    })
}

/// `d_n^(a-i) c[i][j]` is an integer for every entry.
pub fn check_coefficient_integrality(table: &PartialFractionTable) -> bool {
    let FormParams { a, n, .. } = table.params;
    let d = BigInt::from(lcm_upto(n as usize));
    (1..=a as usize).all(|i| {
        let scale = ExactRational::from_integer(num_traits::pow(d.clone(), a as usize - i));
        table.row(i).iter().all(|c| (c * &scale).is_integer())
    })
}

/// `[d_n^a P_0(1), d_n^(a-1) P_1(1), ..., d_n^0 P_a(1)]`, all integers.
pub fn integer_scaled(table: &PartialFractionTable) -> Result<Vec<BigInt>> {
    let FormParams { a, n, .. } = table.params;
    let d = BigInt::from(lcm_upto(n as usize));
    let one = ExactRational::one();
    let mut out = Vec::with_capacity(a as usize + 1);
    for i in 0..=a as usize {
        let value = if i == 0 {
            p0_eval(table, &one)
        } else {
            p_poly_eval(table, i, &one)?
        };
        let scaled =
            value * ExactRational::from_integer(num_traits::pow(d.clone(), a as usize - i));
        let int = scaled.to_integer().ok_or_else(|| Error::NonIntegral {
            what: format!("d_{n}^{} * P_{i}(1) = {scaled}", a as usize - i),
        })?;
        out.push(int);
    }
    Ok(out)
}

/// Deterministic rational sample points avoiding the poles of `R_n`, with
/// numerators and denominators bounded by `10^6`.
pub fn sample_points(params: &FormParams, count: usize, seed: u64) -> Vec<ExactRational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.n as i64;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let num: i64 = rng.random_range(-1_000_000..=1_000_000);
        let den: i64 = rng.random_range(1..=1_000_000);
        let x = ExactRational::new(num, den).expect("nonzero");
        let on_pole = x.is_integer() && x <= -1 && x >= -(n + 1);
        if !on_pole && !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

/// Checks the decomposition against `R_n` at `3 a (n+1)` seeded points.
pub fn check_reconstruction(table: &PartialFractionTable, seed: u64) -> Result<bool> {
    let p = table.params;
    let count = 3 * p.a as usize * (p.n as usize + 1);
    for x in sample_points(&p, count, seed) {
        if table.eval_decomposition(&x)? != rn_at_rational(&p, &x)? {
            return Ok(false);
        }
    }
    Ok(true)
}
