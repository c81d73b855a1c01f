//! Platt sigmoid calibration: map raw decision scores to probabilities via
//! `p(s) = 1 / (1 + exp(a*s + b))`, fitted by negative-log-likelihood
//! minimization (Newton steps with backtracking).

use serde::{Deserialize, Serialize};

use crate::corpus::SeverityClass;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibrator {
    pub a: f64,
    pub b: f64,
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

impl Calibrator {
    /// Calibrated probability of the positive class for a raw score.
    /// Strictly increasing in the score when `a < 0`.
    pub fn probability(&self, score: f64) -> f64 {
        let f = self.a * score + self.b;
        if f >= 0.0 {
            (-f).exp() / (1.0 + (-f).exp())
        } else {
            1.0 / (1.0 + f.exp())
        }
    }

    /// Fit the sigmoid on held-out scores using the smoothed targets
    /// `(n_pos + 1) / (n_pos + 2)` and `1 / (n_neg + 2)`.
    pub fn fit(scores: &[f64], labels: &[SeverityClass]) -> Result<Self> {
        if scores.len() != labels.len() || scores.is_empty() {
            return Err(Error::Calibration(format!(
                "{} scores vs {} labels",
                scores.len(),
                labels.len()
            )));
        }
        let n_pos = labels.iter().filter(|l| l.is_high()).count();
        let n_neg = labels.len() - n_pos;
        if n_pos == 0 || n_neg == 0 {
            return Err(Error::Calibration(
                "calibration needs both classes".to_string(),
            ));
        }

        let target_pos = (n_pos as f64 + 1.0) / (n_pos as f64 + 2.0);
        let target_neg = 1.0 / (n_neg as f64 + 2.0);
        let targets: Vec<f64> = labels
            .iter()
            .map(|l| if l.is_high() { target_pos } else { target_neg })
            .collect();

        // Negative log likelihood of targets under p = 1/(1+exp(a*s+b)).
        let objective = |a: f64, b: f64| -> f64 {
            scores
                .iter()
                .zip(&targets)
                .map(|(&s, &t)| {
                    let f = a * s + b;
                    softplus(f) - (1.0 - t) * f
                })
                .sum()
        };

        let mut a = 0.0f64;
        let mut b = ((n_neg as f64 + 1.0) / (n_pos as f64 + 1.0)).ln();
        let mut value = objective(a, b);

        for _ in 0..100 {
            let mut grad_a = 0.0;
            let mut grad_b = 0.0;
            let mut h_aa = 1e-12;
            let mut h_ab = 0.0;
            let mut h_bb = 1e-12;
            for (&s, &t) in scores.iter().zip(&targets) {
                let f = a * s + b;
                let p = if f >= 0.0 {
                    (-f).exp() / (1.0 + (-f).exp())
                } else {
                    1.0 / (1.0 + f.exp())
                };
                let d = t - p;
                grad_a += d * s;
                grad_b += d;
                let w = p * (1.0 - p);
                h_aa += w * s * s;
                h_ab += w * s;
                h_bb += w;
            }
            if grad_a.abs() < 1e-10 && grad_b.abs() < 1e-10 {
                break;
            }
            let det = h_aa * h_bb - h_ab * h_ab;
            let step_a = -(h_bb * grad_a - h_ab * grad_b) / det;
            let step_b = -(h_aa * grad_b - h_ab * grad_a) / det;

            let descent = grad_a * step_a + grad_b * step_b;
            let mut stepsize = 1.0;
            loop {
                let candidate = objective(a + stepsize * step_a, b + stepsize * step_b);
                if candidate <= value + 1e-4 * stepsize * descent {
                    a += stepsize * step_a;
                    b += stepsize * step_b;
                    value = candidate;
                    break;
                }
                stepsize *= 0.5;
                if stepsize < 1e-12 {
                    break;
                }
            }
            if stepsize < 1e-12 {
                break;
            }
        }

        Ok(Self { a, b })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::SeverityClass::{High, Low};

    #[test]
    fn separated_scores_calibrate_steeply() {
        let scores = [2.0, 1.5, 1.8, -2.0, -1.5, -1.7, 2.2, -2.3];
        let labels = [High, High, High, Low, Low, Low, High, Low];
        let calibrator = Calibrator::fit(&scores, &labels).unwrap();
        assert!(calibrator.a < 0.0, "higher score must mean higher probability");
        assert!(calibrator.probability(2.0) > 0.8);
        assert!(calibrator.probability(-2.0) < 0.2);
    }

    #[test]
    fn constant_scores_recover_the_base_rate() {
        let n_pos = 30;
        let n_neg = 70;
        let scores = vec![0.4; n_pos + n_neg];
        let mut labels = vec![High; n_pos];
        labels.extend(vec![Low; n_neg]);
        let calibrator = Calibrator::fit(&scores, &labels).unwrap();
        let base_rate = n_pos as f64 / (n_pos + n_neg) as f64;
        for score in [-3.0, 0.0, 0.4, 5.0] {
            assert!(
                (calibrator.probability(score) - base_rate).abs() < 0.02,
                "score {score}: {} vs base rate {base_rate}",
                calibrator.probability(score)
            );
        }
    }

    #[test]
    fn single_class_labels_cannot_calibrate() {
        let err = Calibrator::fit(&[0.1, 0.2], &[High, High]).unwrap_err();
        assert!(matches!(err, Error::Calibration(_)));
    }

    #[test]
    fn probabilities_stay_in_the_open_unit_interval() {
        let scores: Vec<f64> = (0..40).map(|i| (i as f64 - 20.0) / 4.0).collect();
        let labels: Vec<_> = scores
            .iter()
            .map(|&s| if s > 0.0 { High } else { Low })
            .collect();
        let calibrator = Calibrator::fit(&scores, &labels).unwrap();
        for &s in &scores {
            let p = calibrator.probability(s);
            assert!(p > 0.0 && p < 1.0);
        }
    }
}
