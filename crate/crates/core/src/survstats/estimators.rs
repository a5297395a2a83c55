use crate::data::Outcome;
use crate::error::{domain, Error, Result};

use super::{event_table, StepFunction};

/// Product-limit estimate of the survival function.
pub fn kaplan_meier<O: Outcome>(records: &[O]) -> Result<StepFunction> {
    if records.is_empty() {
        return Err(Error::EmptyInput("kaplan_meier needs at least one record"));
    }
    let table = event_table(records);
    let mut breakpoints = Vec::with_capacity(table.len());
    let mut values = Vec::with_capacity(table.len());
    let mut s = 1.0;
    for (t, d, n) in table {
        s *= 1.0 - d as f64 / n as f64;
        breakpoints.push(t);
        values.push(s);
    }
    StepFunction::new(breakpoints, values, 1.0)
}

/// Nelson–Aalen estimate of the cumulative hazard.
pub fn nelson_aalen<O: Outcome>(records: &[O]) -> Result<StepFunction> {
    if records.is_empty() {
        return Err(Error::EmptyInput("nelson_aalen needs at least one record"));
    }
    let table = event_table(records);
    let mut breakpoints = Vec::with_capacity(table.len());
    let mut values = Vec::with_capacity(table.len());
    let mut h = 0.0;
    for (t, d, n) in table {
        h += d as f64 / n as f64;
        breakpoints.push(t);
        values.push(h);
    }
    StepFunction::new(breakpoints, values, 0.0)
}

/// `exp(-H(t))`. Large hazards underflow to 0 rather than being clamped.
pub fn survival_from_hazard(hazard: &StepFunction, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(domain(format!("time must be >= 0, got {t}")));
    }
    Ok((-hazard.eval(t)).exp())
}
