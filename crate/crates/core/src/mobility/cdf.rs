use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::LocationFix;

/// Empirical CDF of reported fix accuracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyCdf {
    /// Distinct accuracies (m), ascending, with the fraction of fixes at or
    /// below each.
    pub points: Vec<(f64, f64)>,
}

impl AccuracyCdf {
    /// Fraction of fixes with accuracy `<= meters`.
    pub fn fraction_within(&self, meters: f64) -> f64 {
        let i = self.points.partition_point(|(a, _)| *a <= meters);
        if i == 0 {
            0.0
        } else {
            self.points[i - 1].1
        }
    }
}

pub fn accuracy_cdf(fixes: &[LocationFix]) -> Result<AccuracyCdf> {
    if fixes.is_empty() {
        return Err(Error::EmptyInput("no location fixes".into()));
    }
    let mut acc: Vec<f64> = fixes.iter().map(|f| f.accuracy_m).collect();
    acc.sort_by(f64::total_cmp);
    let n = acc.len() as f64;
    let mut points: Vec<(f64, f64)> = Vec::new();
    for (i, a) in acc.iter().enumerate() {
        let frac = (i + 1) as f64 / n;
        match points.last_mut() {
            Some(last) if last.0 == *a => last.1 = frac,
            _ => points.push((*a, frac)),
        }
    }
    Ok(AccuracyCdf { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::GeoPoint;
    use crate::types::{Timestamp, UserId};

    fn fix(acc: f64) -> LocationFix {
        LocationFix {
            user: UserId::new("u").unwrap(),
            t: Timestamp::new(0).unwrap(),
            point: GeoPoint::new(0.0, 0.0).unwrap(),
            accuracy_m: acc,
        }
    }

    #[test]
    fn fraction_within_forty() {
        let cdf = accuracy_cdf(&[10.0, 20.0, 30.0, 50.0].map(fix)).unwrap();
        assert_eq!(cdf.fraction_within(40.0), 0.75);
        assert_eq!(cdf.fraction_within(5.0), 0.0);
        assert_eq!(cdf.fraction_within(50.0), 1.0);
        assert_eq!(cdf.points.last().unwrap().1, 1.0);
    }

    #[test]
    fn equal_accuracies_form_one_step() {
        let cdf = accuracy_cdf(&[25.0; 4].map(fix)).unwrap();
        assert_eq!(cdf.points, vec![(25.0, 1.0)]);
        assert_eq!(cdf.fraction_within(24.9), 0.0);
    }

    #[test]
    fn empty_input_rejected() {
        assert!(matches!(accuracy_cdf(&[]), Err(Error::EmptyInput(_))));
    }
}
