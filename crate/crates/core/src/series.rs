//! Truncated power series `c_0 + c_1 e + ... + c_{K-1} e^{K-1}` with exact
//! rational coefficients.

use crate::error::{Error, Result};
use crate::exact::ExactRational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<ExactRational>,
}

impl TruncatedSeries {
    /// Builds a series of the given order from leading coefficients; missing
    /// ones are zero and extra ones are dropped.
    pub fn new(order: usize, coeffs: impl IntoIterator<Item = ExactRational>) -> Self {
        assert!(order >= 1, "series order must be at least 1");
        let mut c: Vec<_> = coeffs.into_iter().take(order).collect();
        c.resize(order, ExactRational::zero());
        Self { coeffs: c }
    }

    pub fn constant(order: usize, c: ExactRational) -> Self {
        Self::new(order, [c])
    }

    pub fn one(order: usize) -> Self {
        Self::constant(order, ExactRational::one())
    }

    /// The linear polynomial `c0 + c1 e`.
    pub fn linear(order: usize, c0: ExactRational, c1: ExactRational) -> Self {
        Self::new(order, [c0, c1])
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[ExactRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &ExactRational {
        &self.coeffs[k]
    }

    pub fn into_coeffs(self) -> Vec<ExactRational> {
        self.coeffs
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        let k = self.order();
        let mut out = vec![ExactRational::zero(); k];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..k - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += &(a * b);
                }
            }
        }
        Ok(Self { coeffs: out })
    }

    /// In-place product with `c0 + c1 e`; O(K) instead of a full Cauchy product.
    pub fn mul_linear(&mut self, c0: &ExactRational, c1: &ExactRational) {
        for k in (0..self.order()).rev() {
            let mut v = &self.coeffs[k] * c0;
            if k > 0 && !c1.is_zero() {
                v += &(&self.coeffs[k - 1] * c1);
            }
            self.coeffs[k] = v;
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::NotInvertible);
        }
        let inv0 = c0.recip()?;
        let k = self.order();
        let mut out = Vec::with_capacity(k);
        out.push(inv0.clone());
        for m in 1..k {
            let mut acc = ExactRational::zero();
            for j in 1..=m {
                let a = &self.coeffs[j];
                if !a.is_zero() {
                    acc += &(a * &out[m - j]);
                }
            }
            out.push(-(acc * &inv0));
        }
        Ok(Self { coeffs: out })
    }

    /// Binary powering; `s^0 = 1`.
    pub fn pow(&self, mut e: u64) -> Self {
        let mut result = Self::one(self.order());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base).expect("same order");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same order");
            }
        }
        result
    }

    pub fn scale(&mut self, c: &ExactRational) {
        for x in &mut self.coeffs {
            *x *= c;
        }
    }
}

/// Truncated product of two series of equal order.
pub fn series_mul(a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries> {
    a.mul(b)
}

pub fn series_inverse(s: &TruncatedSeries) -> Result<TruncatedSeries> {
    s.inverse()
}

pub fn series_pow(s: &TruncatedSeries, e: u64) -> TruncatedSeries {
    s.pow(e)
}
