//! The visibility aging function f(a), tabulated over ages 1..=A_max and
//! normalized to f(1) = 1.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AgingError {
    #[error("aging table is empty")]
    Empty,
    #[error("f(1) must be 1, got {0}")]
    NotNormalized(f64),
    #[error("f({age}) = {value} is not a positive finite number")]
    NotPositive { age: usize, value: f64 },
}

/// Visibility multiplier by item age. Age 1 is the newest item; the value
/// at age `a` scales the chance a vote lands on an item of that age.
#[derive(Debug, Clone, PartialEq)]
pub struct AgingFunction {
    values: Vec<f64>,
}

impl AgingFunction {
    /// A strictly positive table with f(1) = 1, as used to drive the
    /// simulator.
    pub fn from_table(values: Vec<f64>) -> Result<AgingFunction, AgingError> {
        if values.is_empty() {
            return Err(AgingError::Empty);
        }
        if values[0] != 1.0 {
            return Err(AgingError::NotNormalized(values[0]));
        }
        for (i, &v) in values.iter().enumerate() {
            if !(v > 0.0 && v.is_finite()) {
                return Err(AgingError::NotPositive { age: i + 1, value: v });
            }
        }
        Ok(AgingFunction { values })
    }

    /// An estimated table: f(1) = 1 but zeros are permitted at ages where
    /// no votes were observed (the maximum-likelihood value there).
    pub fn from_estimates(values: Vec<f64>) -> Result<AgingFunction, AgingError> {
        if values.is_empty() {
            return Err(AgingError::Empty);
        }
        if values[0] != 1.0 {
            return Err(AgingError::NotNormalized(values[0]));
        }
        for (i, &v) in values.iter().enumerate() {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(AgingError::NotPositive { age: i + 1, value: v });
            }
        }
        Ok(AgingFunction { values })
    }

    /// Piecewise power law: f(a) = a^-s up to the breakpoint, continuing
    /// with exponent `s_after` beyond it. f(1) = 1 holds by construction.
    pub fn power_law(s: f64, breakpoint: usize, s_after: f64, max_age: usize) -> AgingFunction {
        let bp = breakpoint.max(1);
        let at_break = (bp as f64).powf(-s);
        let values = (1..=max_age.max(1))
            .map(|a| {
                if a <= bp {
                    (a as f64).powf(-s)
                } else {
                    at_break * (a as f64 / bp as f64).powf(-s_after)
                }
            })
            .collect();
        AgingFunction { values }
    }

    /// f(age); age is 1-based and must be within the table.
    pub fn value(&self, age: usize) -> f64 {
        self.values[age - 1]
    }

    pub fn max_age(&self) -> usize {
        self.values.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}
