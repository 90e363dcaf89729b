use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EcdfPoint {
    pub value: f64,
    pub fraction: f64,
}

/// Step points `(v, P[X <= v])` at each distinct sample value.
pub fn ecdf(samples: &[f64]) -> Result<Vec<EcdfPoint>> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("ecdf of an empty sample".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut points: Vec<EcdfPoint> = Vec::new();
    for (k, &v) in sorted.iter().enumerate() {
        let fraction = (k + 1) as f64 / n;
        match points.last_mut() {
            Some(last) if last.value == v => last.fraction = fraction,
            _ => points.push(EcdfPoint { value: v, fraction }),
        }
    }
    Ok(points)
}

/// Fraction of samples `<= x` read off step points.
pub fn ecdf_at(points: &[EcdfPoint], x: f64) -> f64 {
    points
        .iter()
        .take_while(|p| p.value <= x)
        .last()
        .map_or(0.0, |p| p.fraction)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<EcdfPoint> {
        v.iter()
            .map(|&(value, fraction)| EcdfPoint { value, fraction })
            .collect()
    }

    #[test]
    fn counting_by_hand() {
        assert_eq!(
            ecdf(&[3.0, 0.0, 1.0, 0.0]).unwrap(),
            pts(&[(0.0, 0.5), (1.0, 0.75), (3.0, 1.0)])
        );
        assert_eq!(ecdf(&[2.0, 2.0, 2.0]).unwrap(), pts(&[(2.0, 1.0)]));
        assert_eq!(ecdf(&[5.0]).unwrap(), pts(&[(5.0, 1.0)]));
        assert!(ecdf(&[]).is_err());
    }

    #[test]
    fn lookup() {
        let p = ecdf(&[0.0, 0.0, 1.0, 3.0]).unwrap();
        assert_eq!(ecdf_at(&p, -1.0), 0.0);
        assert_eq!(ecdf_at(&p, 2.0), 0.75);
        assert_eq!(ecdf_at(&p, 9.0), 1.0);
    }
}
