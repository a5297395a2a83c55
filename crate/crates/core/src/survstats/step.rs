use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Right-continuous piecewise-constant function on `[0, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    initial_value: f64,
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>, initial_value: f64) -> Result<Self> {
        if breakpoints.len() != values.len() {
            return Err(domain("breakpoints and values differ in length"));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(domain("breakpoints must be strictly increasing"));
        }
        Ok(Self {
            breakpoints,
            values,
            initial_value,
        })
    }

    pub fn constant(value: f64) -> Self {
        Self {
            breakpoints: Vec::new(),
            values: Vec::new(),
            initial_value: value,
        }
    }

    /// Value of the last breakpoint `<= t`, or the initial value before the first.
    pub fn eval(&self, t: f64) -> f64 {
        let idx = self.breakpoints.partition_point(|&b| b <= t);
        if idx == 0 {
            self.initial_value
        } else {
            self.values[idx - 1]
        }
    }

    /// Left limit at `t`: the value just before `t`.
    pub fn eval_left(&self, t: f64) -> f64 {
        let idx = self.breakpoints.partition_point(|&b| b < t);
        if idx == 0 {
            self.initial_value
        } else {
            self.values[idx - 1]
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn initial_value(&self) -> f64 {
        self.initial_value
    }

    /// Value after the last breakpoint.
    pub fn final_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(self.initial_value)
    }
}
