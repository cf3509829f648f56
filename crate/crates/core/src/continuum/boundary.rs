use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use super::ContinuumError;

/// A function on the unit circle, parametrized by angle.
#[derive(Clone)]
pub struct BoundaryFunction(Repr);

#[derive(Clone)]
enum Repr {
    /// Values at ascending angles in `[0, 2π)`, interpolated linearly with
    /// wrap-around.
    Table { theta: Vec<f64>, value: Vec<f64> },
    Closed(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for BoundaryFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Table { theta, .. } => write!(f, "BoundaryFunction::Table({} samples)", theta.len()),
            Repr::Closed(_) => write!(f, "BoundaryFunction::Closed"),
        }
    }
}

impl BoundaryFunction {
    pub fn from_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self(Repr::Closed(Arc::new(f)))
    }

    /// Samples at `θ_j = 2πj/n`.
    pub fn from_samples(values: Vec<f64>) -> Result<Self, ContinuumError> {
        let n = values.len();
        let theta = (0..n).map(|j| TAU * j as f64 / n as f64).collect();
        Self::from_table(theta, values)
    }

    /// Samples at arbitrary angles. Angles are reduced mod 2π and sorted.
    pub fn from_table(theta: Vec<f64>, value: Vec<f64>) -> Result<Self, ContinuumError> {
        if theta.is_empty() || theta.len() != value.len() {
            return Err(ContinuumError::InvalidArgument("boundary table needs matching, nonempty columns".into()));
        }
        if theta.iter().chain(&value).any(|x| !x.is_finite()) {
            return Err(ContinuumError::InvalidArgument("boundary table has non-finite entries".into()));
        }
        let mut pairs: Vec<(f64, f64)> = theta.into_iter().map(|t| t.rem_euclid(TAU)).zip(value).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(ContinuumError::InvalidArgument("boundary table repeats an angle".into()));
        }
        let (theta, value) = pairs.into_iter().unzip();
        Ok(Self(Repr::Table { theta, value }))
    }

    /// Trigonometric polynomial `a₀ + Σ a_k cos kθ + b_k sin kθ`.
    pub fn trigonometric(a0: f64, a: Vec<f64>, b: Vec<f64>) -> Self {
        Self::from_fn(move |t| {
            let mut s = a0;
            for (k, c) in a.iter().enumerate() {
                s += c * ((k + 1) as f64 * t).cos();
            }
            for (k, c) in b.iter().enumerate() {
                s += c * ((k + 1) as f64 * t).sin();
            }
            s
        })
    }

    /// Number of stored samples, if tabulated.
    pub fn table_len(&self) -> Option<usize> {
        match &self.0 {
            Repr::Table { theta, .. } => Some(theta.len()),
            Repr::Closed(_) => None,
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        match &self.0 {
            Repr::Closed(f) => f(theta),
            Repr::Table { theta: ts, value } => {
                let n = ts.len();
                if n == 1 {
                    return value[0];
                }
                let t = theta.rem_euclid(TAU);
                let hi = ts.partition_point(|&s| s <= t);
                let (i, j) = if hi == 0 || hi == n { (n - 1, 0) } else { (hi - 1, hi) };
                let mut span = ts[j] - ts[i];
                let mut offset = t - ts[i];
                if span <= 0.0 {
                    span += TAU;
                }
                if offset < 0.0 {
                    offset += TAU;
                }
                value[i] + (value[j] - value[i]) * offset / span
            }
        }
    }

    /// Values at `θ_j = 2πj/n`.
    pub fn sample(&self, n: usize) -> Vec<f64> {
        (0..n).map(|j| self.eval(TAU * j as f64 / n as f64)).collect()
    }

    /// Parses `theta,value` lines; a header line is skipped.
    pub fn from_csv(text: &str) -> Result<Self, ContinuumError> {
        let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
        let (mut theta, mut value) = (Vec::new(), Vec::new());
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| ContinuumError::Parse(e.to_string()))?;
            let parsed: Option<(f64, f64)> = match (record.get(0), record.get(1)) {
                (Some(a), Some(b)) => a.parse().ok().zip(b.parse().ok()),
                _ => None,
            };
            match parsed {
                Some((t, v)) => {
                    theta.push(t);
                    value.push(v);
                }
                None if i == 0 => continue,
                None => return Err(ContinuumError::Parse(format!("line {}: expected theta,value", i + 1))),
            }
        }
        Self::from_table(theta, value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_interpolates_with_wraparound() {
        let f = BoundaryFunction::from_samples(vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(f.eval(0.0), 0.0);
        assert!((f.eval(TAU / 8.0) - 0.5).abs() < 1e-14);
        assert!((f.eval(TAU * 7.0 / 8.0) - 1.5).abs() < 1e-14);
        assert!((f.eval(-TAU / 8.0) - 1.5).abs() < 1e-14);
    }

    #[test]
    fn csv_round_trip() {
        let f = BoundaryFunction::from_csv("theta,value\n0,1\n3.0,2\n").unwrap();
        assert_eq!(f.table_len(), Some(2));
        assert_eq!(f.eval(3.0), 2.0);
        assert!(BoundaryFunction::from_csv("theta,value\n0,x\n").is_err());
    }

    #[test]
    fn trigonometric_values() {
        let f = BoundaryFunction::trigonometric(1.0, vec![0.0, 2.0], vec![3.0]);
        let t = 0.7f64;
        assert!((f.eval(t) - (1.0 + 2.0 * (2.0 * t).cos() + 3.0 * t.sin())).abs() < 1e-14);
    }
}
