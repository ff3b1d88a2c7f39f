use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

pub const MIN_GROUPS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CiMethod {
    BatchMeans,
    ReplicateMeans,
}

/// Mean with a 95% confidence half-width.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithCI {
    pub mean: f64,
    pub half_width: f64,
    pub n_samples: usize,
    pub method: CiMethod,
}

impl EstimateWithCI {
    pub fn covers(&self, value: f64) -> bool {
        (self.mean - value).abs() <= self.half_width
    }
}

fn t_quantile(dof: usize) -> f64 {
    StudentsT::new(0.0, 1.0, dof as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.975)
}

fn mean_and_half_width(groups: &[f64]) -> (f64, f64) {
    let k = groups.len();
    let mean = groups.iter().sum::<f64>() / k as f64;
    let var = groups.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
    (mean, t_quantile(k - 1) * (var / k as f64).sqrt())
}

/// Confidence interval from independent replicate values.
pub fn replicate_means(values: &[f64]) -> Result<EstimateWithCI> {
    if values.len() < MIN_GROUPS {
        return Err(Error::InvalidParameter(format!(
            "{} replicates; need at least {MIN_GROUPS}",
            values.len()
        )));
    }
    let (mean, half_width) = mean_and_half_width(values);
    Ok(EstimateWithCI {
        mean,
        half_width,
        n_samples: values.len(),
        method: CiMethod::ReplicateMeans,
    })
}

/// Confidence interval from the means of 20 contiguous batches of a
/// correlated series. A remainder that does not fill a batch is dropped.
pub fn batch_means(series: &[f64]) -> Result<EstimateWithCI> {
    if series.len() < MIN_GROUPS {
        return Err(Error::InvalidParameter(format!(
            "{} samples; need at least {MIN_GROUPS}",
            series.len()
        )));
    }
    let size = series.len() / MIN_GROUPS;
    let batches: Vec<f64> = series
        .chunks_exact(size)
        .take(MIN_GROUPS)
        .map(|b| b.iter().sum::<f64>() / size as f64)
        .collect();
    let (mean, half_width) = mean_and_half_width(&batches);
    Ok(EstimateWithCI {
        mean,
        half_width,
        n_samples: size * MIN_GROUPS,
        method: CiMethod::BatchMeans,
    })
}
