//! Finite-difference referee for the analytic marginal products.
//!
//! The oracle only ever calls [`ModelSpec::output`]; analytic prices are
//! supplied separately so that deliberately wrong formulas can be checked too.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{Family, ModelSpec};
use crate::types::{Factor, FactorInputs, FactorSnapshot};

/// Cube root of machine epsilon, the usual balance point for central
/// differences.
pub fn default_rel_step() -> f64 {
    f64::EPSILON.cbrt()
}

pub const SAMPLE_LOWER: f64 = 0.1;
pub const SAMPLE_UPPER: f64 = 10.0;

fn central_difference(
    model: &ModelSpec,
    inputs: &FactorInputs,
    factor: Factor,
    h: f64,
) -> Result<f64> {
    let x = inputs.get(factor);
    let up = model.output(&inputs.with(factor, x + h))?;
    let down = model.output(&inputs.with(factor, x - h))?;
    Ok((up - down) / (2.0 * h))
}

/// Marginal products by central differences with `h = rel_step · max(|x|, 1)`.
///
/// If a probe leaves the family's domain the step is shrunk once by 10×
/// before giving up with a domain error.
pub fn fd_marginal_products(
    model: &ModelSpec,
    inputs: &FactorInputs,
    rel_step: f64,
) -> Result<FactorSnapshot> {
    let family = model.family();
    if !family.is_differentiable() {
        return Err(Error::NonSmoothFamily(family));
    }
    if !(rel_step > 0.0 && rel_step <= 1e-2) {
        return Err(Error::InvalidStep(rel_step));
    }
    let output = model.output(inputs)?;
    let mut prices = [0.0; 4];
    for factor in Factor::ALL {
        let x = inputs.get(factor);
        let h = rel_step * x.abs().max(1.0);
        prices[factor.index()] = central_difference(model, inputs, factor, h)
            .or_else(|_| central_difference(model, inputs, factor, h / 10.0))
            .map_err(|_| Error::Domain {
                family,
                factor,
                value: x - h / 10.0,
            })?;
    }
    Ok(FactorSnapshot::new(output, prices))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationFailure {
    pub point_index: usize,
    pub inputs: FactorInputs,
    pub factor: Factor,
    pub analytic: f64,
    pub numeric: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub family: Family,
    pub points_tested: usize,
    pub tolerance: f64,
    /// Worst relative error per factor, ordered as [`Factor::ALL`].
    pub max_rel_error: [f64; 4],
    /// Sorted by point index, then factor.
    pub failures: Vec<ValidationFailure>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn worst_rel_error(&self) -> f64 {
        self.max_rel_error.iter().copied().fold(0.0, f64::max)
    }
}

pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    let scale = analytic.abs().max(numeric.abs());
    if scale == 0.0 {
        0.0
    } else {
        (analytic - numeric).abs() / scale
    }
}

/// `n` points drawn log-uniformly from `[lower, upper]^4`; the knowledge
/// stock is left at 1.
pub fn sample_points(n: usize, seed: u64, lower: f64, upper: f64) -> Vec<FactorInputs> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (lower.ln(), upper.ln());
    (0..n)
        .map(|_| {
            let mut draw = || (lo + rng.random::<f64>() * (hi - lo)).exp();
            FactorInputs::new(draw(), draw(), draw(), draw())
        })
        .collect()
}

/// Compares `analytic` against central differences of `model.output` at
/// every point.
pub fn validate_at_points<F>(
    model: &ModelSpec,
    analytic: F,
    points: &[FactorInputs],
    tolerance: f64,
) -> Result<ValidationReport>
where
    F: Fn(&FactorInputs) -> Result<FactorSnapshot> + Sync,
{
    let family = model.family();
    if !family.is_differentiable() {
        return Err(Error::NonSmoothFamily(family));
    }
    if points.is_empty() {
        return Err(Error::InvalidInputs(
            "at least one validation point is required".into(),
        ));
    }
    let rel_step = default_rel_step();
    let pairs = points
        .par_iter()
        .map(|x| Ok((analytic(x)?, fd_marginal_products(model, x, rel_step)?)))
        .collect::<Result<Vec<_>>>()?;

    let mut max_rel_error = [0.0f64; 4];
    let mut failures = Vec::new();
    for (point_index, (inputs, (a, n))) in points.iter().zip(&pairs).enumerate() {
        for factor in Factor::ALL {
            let (analytic, numeric) = (a.price(factor), n.price(factor));
            let rel_error = relative_error(analytic, numeric);
            let slot = &mut max_rel_error[factor.index()];
            *slot = slot.max(rel_error);
            if rel_error.is_nan() || rel_error > tolerance {
                failures.push(ValidationFailure {
                    point_index,
                    inputs: *inputs,
                    factor,
                    analytic,
                    numeric,
                    rel_error,
                });
            }
        }
    }
    Ok(ValidationReport {
        family,
        points_tested: points.len(),
        tolerance,
        max_rel_error,
        failures,
    })
}

/// Checks the family's own analytic prices on `n_points` seeded random points.
pub fn validate_family(
    model: &ModelSpec,
    n_points: usize,
    tolerance: f64,
    seed: u64,
) -> Result<ValidationReport> {
    if !model.family().is_differentiable() {
        return Err(Error::NonSmoothFamily(model.family()));
    }
    let points = sample_points(n_points, seed, SAMPLE_LOWER, SAMPLE_UPPER);
    validate_at_points(model, |x| model.evaluate(x), &points, tolerance)
}
