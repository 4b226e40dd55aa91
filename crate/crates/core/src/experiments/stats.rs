use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// A mean with its one-sigma statistical error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub sigma: f64,
}

/// Splits `values` into `groups` equal consecutive sub-ensembles (trailing
/// values that do not fill a group are dropped) and returns the mean of the
/// group means `F` with `σ(F) = sqrt(var(F_i) / p)`, where
/// `var(F_i) = Σ (F_i - F)² / (p - 1)`.
pub fn subensemble_error(values: &[f64], groups: usize) -> Result<Estimate> {
    if groups < 2 {
        return Err(domain(format!("need at least 2 sub-ensembles, got {groups}")));
    }
    if groups > values.len() {
        return Err(domain(format!("{groups} sub-ensembles from {} values", values.len())));
    }
    let size = values.len() / groups;
    let means: Vec<f64> = values.chunks_exact(size).take(groups).map(|c| c.iter().sum::<f64>() / size as f64).collect();
    let p = groups as f64;
    let mean = means.iter().sum::<f64>() / p;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (p - 1.0);
    Ok(Estimate { mean, sigma: (var / p).sqrt() })
}
