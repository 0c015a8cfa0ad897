use serde::{Deserialize, Serialize};

use super::MetricsError;

/// Pearson correlation of two equally long vectors of at least three points.
///
/// A constant input is an error (`ConstantVector` naming `labels.0` or
/// `labels.1`) rather than a NaN.
pub fn pearson_named(a: &[f64], b: &[f64], labels: (&str, &str)) -> Result<f64, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.len() < 3 {
        return Err(MetricsError::TooFewPoints(a.len()));
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || a.iter().all(|v| *v == a[0]) {
        return Err(MetricsError::ConstantVector(labels.0.to_owned()));
    }
    if sbb == 0.0 || b.iter().all(|v| *v == b[0]) {
        return Err(MetricsError::ConstantVector(labels.1.to_owned()));
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64, MetricsError> {
    pearson_named(a, b, ("left", "right"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub model_names: Vec<String>,
    /// Row-major, symmetric, unit diagonal.
    pub values: Vec<Vec<f64>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.model_names.iter().position(|m| m == a)?;
        let j = self.model_names.iter().position(|m| m == b)?;
        Some(self.values[i][j])
    }
}

/// Pairwise Pearson correlations between per-attribute score vectors that
/// share one attribute axis.
pub fn model_correlations(
    scores: &[(String, Vec<f64>)],
) -> Result<CorrelationMatrix, MetricsError> {
    let k = scores.len();
    if k == 0 {
        return Err(MetricsError::Empty("score vectors"));
    }
    if let Some((_, v)) = scores.iter().find(|(_, v)| v.len() != scores[0].1.len()) {
        return Err(MetricsError::LengthMismatch {
            left: scores[0].1.len(),
            right: v.len(),
        });
    }
    let mut values = vec![vec![0.0; k]; k];
    for i in 0..k {
        values[i][i] = 1.0;
        for j in (i + 1)..k {
            let r = pearson_named(
                &scores[i].1,
                &scores[j].1,
                (scores[i].0.as_str(), scores[j].0.as_str()),
            )?;
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    if k == 1 {
        // Validate the lone vector the same way a pair would.
        pearson_named(&scores[0].1, &scores[0].1, (&scores[0].0, &scores[0].0))?;
    }
    Ok(CorrelationMatrix {
        model_names: scores.iter().map(|(n, _)| n.clone()).collect(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Pearson from raw sums: (n Sxy - Sx Sy) / sqrt((n Sxx - Sx^2)(n Syy - Sy^2)).
    fn from_sums(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let sx: f64 = a.iter().sum();
        let sy: f64 = b.iter().sum();
        let sxy: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        let sxx: f64 = a.iter().map(|x| x * x).sum();
        let syy: f64 = b.iter().map(|y| y * y).sum();
        (n * sxy - sx * sy) / ((n * sxx - sx * sx) * (n * syy - sy * sy)).sqrt()
    }

    #[test]
    fn known_values() {
        let v = [1.0, 2.0, 3.0];
        assert!((pearson(&v, &v).unwrap() - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        assert!((pearson(&v, &neg).unwrap() + 1.0).abs() < 1e-12);
        let w = [1.0, 2.0, 4.0];
        // n=3: Sx=6, Sy=7, Sxy=17, Sxx=14, Syy=21 -> 9/sqrt(6*14) = 0.98198
        let expected = 9.0 / (6.0f64 * 14.0).sqrt();
        assert!((from_sums(&v, &w) - expected).abs() < 1e-12);
        let r = pearson(&v, &w).unwrap();
        assert!((r - expected).abs() < 1e-12);
        assert!((r - 0.981).abs() < 0.001);
    }

    #[test]
    fn degenerate_inputs_are_errors() {
        assert!(matches!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(MetricsError::ConstantVector(_))
        ));
        assert!(matches!(
            pearson(&[1.0, 2.0], &[1.0, 2.0]),
            Err(MetricsError::TooFewPoints(2))
        ));
        assert!(pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn matrix_is_symmetric_with_unit_diagonal() {
        let scores = vec![
            ("a".to_string(), vec![0.1, 0.5, 0.3, 0.9]),
            ("b".to_string(), vec![0.2, 0.4, 0.4, 0.7]),
            ("c".to_string(), vec![0.9, 0.1, 0.5, 0.2]),
        ];
        let m = model_correlations(&scores).unwrap();
        for i in 0..3 {
            assert_eq!(m.values[i][i], 1.0);
            for j in 0..3 {
                assert!((m.values[i][j] - m.values[j][i]).abs() <= 1e-12);
                assert!((-1.0..=1.0).contains(&m.values[i][j]));
            }
        }
        assert!((m.get("a", "b").unwrap() - from_sums(&scores[0].1, &scores[1].1)).abs() < 1e-12);
        let constant = vec![
            ("a".to_string(), vec![0.1, 0.5, 0.3]),
            ("flat".to_string(), vec![0.2, 0.2, 0.2]),
        ];
        assert!(matches!(
            model_correlations(&constant),
            Err(MetricsError::ConstantVector(m)) if m == "flat"
        ));
    }
}
