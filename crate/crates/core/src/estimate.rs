use serde::{Deserialize, Serialize};

/// A reported number together with how much to trust it.
///
/// Deterministic closed forms carry `exact: true`; Monte Carlo values carry a
/// standard error; deterministic quadratures carry a tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub exact: bool,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, std_error: None, tolerance: None, exact: true }
    }

    pub fn with_std_error(value: f64, std_error: f64) -> Self {
        Estimate { value, std_error: Some(std_error), tolerance: None, exact: false }
    }

    pub fn with_tolerance(value: f64, tolerance: f64) -> Self {
        Estimate { value, std_error: None, tolerance: Some(tolerance), exact: false }
    }

    /// Standard error, or zero for exact and tolerance-tagged values.
    pub fn se(&self) -> f64 {
        self.std_error.unwrap_or(0.0)
    }

    /// Is `target` within `k` standard errors (plus any declared tolerance)?
    pub fn agrees_with(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.se() + self.tolerance.unwrap_or(0.0)
    }
}

/// Mean and standard error of the mean, with a fixed summation order.
pub(crate) fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serialization_tags() {
        let e = serde_json::to_string(&Estimate::exact(2.0)).unwrap();
        assert_eq!(e, r#"{"value":2.0,"exact":true}"#);
        let m = serde_json::to_string(&Estimate::with_std_error(1.5, 0.1)).unwrap();
        assert_eq!(m, r#"{"value":1.5,"std_error":0.1}"#);
    }

    #[test]
    fn mean_se_of_constant_is_zero() {
        let (m, se) = mean_and_se(&[3.0; 10]);
        assert_eq!(m, 3.0);
        assert_eq!(se, 0.0);
    }
}
