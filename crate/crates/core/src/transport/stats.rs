use num_rational::BigRational;
use serde::Serialize;

use crate::weight::{ratio_string, ratio_to_f64};

/// Streaming mean and variance (Welford), mergeable in a fixed order (Chan
/// et al.), remembering whether every observation was the same rational.
#[derive(Debug, Clone, Default)]
pub struct Accumulator {
    count: u64,
    mean: f64,
    m2: f64,
    constant: Option<Constant>,
}

#[derive(Debug, Clone)]
enum Constant {
    Value(BigRational),
    Varies,
}

impl Accumulator {
    pub fn push(&mut self, x: &BigRational) {
        let v = ratio_to_f64(x);
        self.count += 1;
        let delta = v - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (v - self.mean);
        self.constant = match self.constant.take() {
            None => Some(Constant::Value(x.clone())),
            Some(Constant::Value(c)) if &c == x => Some(Constant::Value(c)),
            Some(_) => Some(Constant::Varies),
        };
    }

    pub fn merge(&mut self, other: &Accumulator) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / n;
        self.m2 += other.m2 + delta * delta * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
        self.constant = match (self.constant.take(), &other.constant) {
            (Some(Constant::Value(a)), Some(Constant::Value(b))) if &a == b => Some(Constant::Value(a)),
            _ => Some(Constant::Varies),
        };
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn summary(&self) -> SideEstimate {
        match &self.constant {
            Some(Constant::Value(c)) => SideEstimate {
                mean: ratio_to_f64(c),
                standard_error: 0.0,
                exact: Some(ratio_string(c)),
            },
            _ => {
                let se = if self.count > 1 {
                    (self.m2 / (self.count - 1) as f64 / self.count as f64).sqrt()
                } else {
                    0.0
                };
                SideEstimate {
                    mean: self.mean,
                    standard_error: se,
                    exact: None,
                }
            }
        }
    }
}

/// Sample mean with its standard error. `exact` holds the common value when
/// every sample evaluated to the same rational.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SideEstimate {
    pub mean: f64,
    pub standard_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
}

impl SideEstimate {
    /// `|mean − target|` in units of the standard error (0 for an exact hit).
    pub fn z_score(&self, target: f64) -> f64 {
        let d = (self.mean - target).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.standard_error
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::{ratio, ratio_int};

    #[test]
    fn welford_matches_two_pass() {
        let xs: Vec<BigRational> = (1..=50).map(|i| ratio(i * i % 17, 3)).collect();
        let mut acc = Accumulator::default();
        xs.iter().for_each(|x| acc.push(x));
        let v: Vec<f64> = xs.iter().map(ratio_to_f64).collect();
        let mean = v.iter().sum::<f64>() / 50.0;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 49.0;
        let s = acc.summary();
        assert!((s.mean - mean).abs() < 1e-12);
        assert!((s.standard_error - (var / 50.0).sqrt()).abs() < 1e-12);
        // merging chunks gives the same answer
        let mut merged = Accumulator::default();
        for chunk in xs.chunks(7) {
            let mut a = Accumulator::default();
            chunk.iter().for_each(|x| a.push(x));
            merged.merge(&a);
        }
        let m = merged.summary();
        assert!((m.mean - mean).abs() < 1e-12);
        assert!((m.standard_error - s.standard_error).abs() < 1e-12);
    }

    #[test]
    fn constant_passthrough() {
        let mut acc = Accumulator::default();
        for _ in 0..10 {
            acc.push(&ratio_int(1));
        }
        let mut other = Accumulator::default();
        other.push(&ratio_int(1));
        acc.merge(&other);
        let s = acc.summary();
        assert_eq!(s.standard_error, 0.0);
        assert_eq!(s.exact.as_deref(), Some("1/1"));
        other.push(&ratio(1, 2));
        acc.merge(&other);
        assert!(acc.summary().exact.is_none());
    }
}
