use crate::error::{Error, Result};

fn same_dim(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() == y.len() {
        Ok(())
    } else {
        Err(Error::usage(format!("dimension mismatch: {} vs {}", x.len(), y.len())))
    }
}

pub(super) fn dist(x: &[f64], y: &[f64]) -> Result<f64> {
    same_dim(x, y)?;
    Ok(x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
}

pub(super) fn combine(x: &[f64], y: &[f64], lambda: f64) -> Result<Vec<f64>> {
    same_dim(x, y)?;
    Ok(x.iter().zip(y).map(|(a, b)| (1.0 - lambda) * a + lambda * b).collect())
}
