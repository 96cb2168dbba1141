//! Per-trial error measures and Monte Carlo accumulators.

use std::collections::BTreeSet;

use crate::{Error, Result, Vector};

/// `‖β̂ − β‖₂²`.
pub fn mse(estimate: &Vector, truth: &Vector) -> Result<f64> {
    if estimate.len() != truth.len() {
        return Err(Error::DimensionMismatch { expected: truth.len(), actual: estimate.len() });
    }
    Ok((estimate - truth).norm_squared())
}

/// 1 when the supports differ as sets, else 0.
pub fn pe(estimate: &[usize], truth: &[usize]) -> f64 {
    let a: BTreeSet<_> = estimate.iter().collect();
    let b: BTreeSet<_> = truth.iter().collect();
    if a == b { 0.0 } else { 1.0 }
}

/// Fraction of positions where the symbols differ.
pub fn ser(estimate: &Vector, truth: &Vector) -> Result<f64> {
    if estimate.len() != truth.len() {
        return Err(Error::DimensionMismatch { expected: truth.len(), actual: estimate.len() });
    }
    if truth.is_empty() {
        return Ok(0.0);
    }
    let wrong = estimate.iter().zip(truth.iter()).filter(|(a, b)| a != b).count();
    Ok(wrong as f64 / truth.len() as f64)
}

/// Fraction of complex QPSK symbols in error, given stacked `[Re; Im]` vectors.
pub fn complex_ser(estimate: &Vector, truth: &Vector) -> Result<f64> {
    if estimate.len() != truth.len() {
        return Err(Error::DimensionMismatch { expected: truth.len(), actual: estimate.len() });
    }
    if truth.len() % 2 != 0 {
        return Err(Error::InvalidDimension(format!("stacked vector has odd length {}", truth.len())));
    }
    let nt = truth.len() / 2;
    if nt == 0 {
        return Ok(0.0);
    }
    let wrong = (0..nt)
        .filter(|&j| estimate[j] != truth[j] || estimate[j + nt] != truth[j + nt])
        .count();
    Ok(wrong as f64 / nt as f64)
}

/// Welford mean/variance; reduction order is the insertion order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Accumulator {
    count: usize,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn push(&mut self, v: f64) {
        self.count += 1;
        let d = v - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (v - self.mean);
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean(&self) -> Option<f64> {
        (self.count > 0).then_some(self.mean)
    }

    /// Standard error of the mean using the unbiased sample variance.
    pub fn stderr(&self) -> Option<f64> {
        self.mean()?;
        if self.count < 2 {
            return Some(0.0);
        }
        let n = self.count as f64;
        Some((self.m2 / (n - 1.0) / n).sqrt())
    }
}

impl FromIterator<f64> for Accumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Accumulator::default();
        iter.into_iter().for_each(|v| acc.push(v));
        acc
    }
}
