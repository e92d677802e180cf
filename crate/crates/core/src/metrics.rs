//! Error metrics between a golden and a faulted decode, and outcome classes.

use std::fmt;
use std::str::FromStr;

use crate::error::{bail, Error, Result};

pub const DEFAULT_TAU: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Robust,
    ApplicationDependent,
    Catastrophic,
}

impl Category {
    pub const ALL: [Category; 3] = [
        Category::Robust,
        Category::ApplicationDependent,
        Category::Catastrophic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Robust => "robust",
            Category::ApplicationDependent => "app_dependent",
            Category::Catastrophic => "catastrophic",
        }
    }

    /// `< 1%` correct is catastrophic, `> 99%` robust, anything else in between.
    pub fn from_fraction(frac_correct: f64) -> Self {
        if frac_correct < 0.01 {
            Category::Catastrophic
        } else if frac_correct > 0.99 {
            Category::Robust
        } else {
            Category::ApplicationDependent
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "robust" => Category::Robust,
            "app_dependent" => Category::ApplicationDependent,
            "catastrophic" => Category::Catastrophic,
            other => bail!(Argument, "unknown category {other:?}"),
        })
    }
}

fn check_lengths(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        bail!(Argument, "length mismatch: {} vs {}", x.len(), y.len());
    }
    Ok(())
}

pub fn l2_error(x: &[f64], y: &[f64]) -> Result<f64> {
    check_lengths(x, y)?;
    Ok(x.iter()
        .zip(y)
        .map(|(a, b)| (b - a) * (b - a))
        .sum::<f64>()
        .sqrt())
}

/// Root of the mean squared difference.
pub fn mse(x: &[f64], y: &[f64]) -> Result<f64> {
    check_lengths(x, y)?;
    if x.is_empty() {
        bail!(Argument, "empty vectors");
    }
    Ok(l2_error(x, y)? / (x.len() as f64).sqrt())
}

/// Per-element `|y_i - x_i| / |x_i|`.
///
/// References smaller than `abs_floor = tau · (mean|x| + ε)` are judged on
/// absolute error instead: the entry becomes `tau · |y_i - x_i| / abs_floor`,
/// which is `<= tau` exactly when the absolute error is within the floor.
pub fn relative_errors(x: &[f64], y: &[f64], tau: f64) -> Result<Vec<f64>> {
    check_lengths(x, y)?;
    if x.is_empty() {
        return Ok(Vec::new());
    }
    let mean_abs = x.iter().map(|v| v.abs()).sum::<f64>() / x.len() as f64;
    let floor = tau * (mean_abs + f64::EPSILON);
    Ok(x.iter()
        .zip(y)
        .map(|(&a, &b)| {
            let d = (b - a).abs();
            if a.abs() < floor {
                tau * d / floor
            } else {
                d / a.abs()
            }
        })
        .collect())
}

/// Fraction of entries with `ε_i <= tau`, and the resulting category.
pub fn classify(eps: &[f64], tau: f64) -> Result<(f64, Category)> {
    if eps.is_empty() {
        bail!(Argument, "cannot classify an empty error vector");
    }
    // NaN compares false and counts as incorrect
    let ok = eps.iter().filter(|&&e| e <= tau).count();
    let frac = ok as f64 / eps.len() as f64;
    Ok((frac, Category::from_fraction(frac)))
}

/// All metrics of one comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Metrics {
    pub l2: f64,
    pub mse: f64,
    pub frac_correct: f64,
    pub category: Category,
}

pub fn evaluate(golden: &[f64], faulted: &[f64], tau: f64) -> Result<Metrics> {
    let eps = relative_errors(golden, faulted, tau)?;
    let (frac_correct, category) = classify(&eps, tau)?;
    Ok(Metrics {
        l2: l2_error(golden, faulted)?,
        mse: mse(golden, faulted)?,
        frac_correct,
        category,
    })
}
