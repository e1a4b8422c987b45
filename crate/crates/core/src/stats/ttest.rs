use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::special::student_t_two_tailed;

/// Paired observations; `a` is the enhanced-prompt side, `b` the human side.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PairedSample {
    pub labels: Vec<String>,
    pub values_a: Vec<f64>,
    pub values_b: Vec<f64>,
}

impl PairedSample {
    pub fn new(values_a: Vec<f64>, values_b: Vec<f64>) -> Result<Self> {
        let labels = (1..=values_a.len()).map(|i| i.to_string()).collect();
        Self::labeled(labels, values_a, values_b)
    }

    pub fn labeled(labels: Vec<String>, values_a: Vec<f64>, values_b: Vec<f64>) -> Result<Self> {
        if values_a.len() != values_b.len() || labels.len() != values_a.len() {
            return Err(Error::Shape(format!(
                "paired sample has {} labels, {} a-values and {} b-values",
                labels.len(),
                values_a.len(),
                values_b.len()
            )));
        }
        if values_a.len() < 3 {
            return Err(Error::invalid(format!(
                "paired sample needs at least 3 pairs, got {}",
                values_a.len()
            )));
        }
        if let Some(i) = values_a
            .iter()
            .chain(&values_b)
            .position(|v| !v.is_finite())
        {
            let i = i % values_a.len();
            return Err(Error::invalid(format!("pair {} is not finite", labels[i])));
        }
        Ok(Self {
            labels,
            values_a,
            values_b,
        })
    }

    pub fn len(&self) -> usize {
        self.values_a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values_a.is_empty()
    }

    pub fn differences(&self) -> Vec<f64> {
        self.values_a
            .iter()
            .zip(&self.values_b)
            .map(|(a, b)| a - b)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub t: f64,
    /// Two-tailed.
    pub p: f64,
    pub df: f64,
}

/// Student's paired t-test on `a − b`.
pub fn paired_t_test(s: &PairedSample) -> Result<TTest> {
    let d = s.differences();
    let n = d.len() as f64;
    if d.len() < 2 {
        return Err(Error::invalid("paired t-test needs at least 2 pairs"));
    }
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let scale = d.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if var.sqrt() <= 1e-14 * scale || var == 0.0 {
        return Err(Error::degenerate(
            "paired differences have zero variance (identical inputs?)",
        ));
    }
    let t = mean / (var.sqrt() / n.sqrt());
    let df = n - 1.0;
    Ok(TTest {
        t,
        p: student_t_two_tailed(t, df),
        df,
    })
}
