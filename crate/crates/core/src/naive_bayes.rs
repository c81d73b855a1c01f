//! Multinomial naive Bayes over nonnegative feature weights with Laplace
//! smoothing.

use serde::{Deserialize, Serialize};

use crate::corpus::SeverityClass;
use crate::error::{Error, Result};
use crate::features::{DesignMatrix, SparseVector};

/// Fitted multinomial model: per-class log-priors and per-feature
/// log-likelihoods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesModel {
    /// Indexed `[HIGH, LOW]`.
    log_prior: [f64; 2],
    log_likelihood: [Vec<f64>; 2],
    pub alpha: f64,
}

fn class_index(label: SeverityClass) -> usize {
    if label.is_high() {
        0
    } else {
        1
    }
}

impl NaiveBayesModel {
    pub fn dimension(&self) -> usize {
        self.log_likelihood[0].len()
    }

    pub fn log_prior(&self, label: SeverityClass) -> f64 {
        self.log_prior[class_index(label)]
    }

    pub fn log_likelihood(&self, label: SeverityClass) -> &[f64] {
        &self.log_likelihood[class_index(label)]
    }
}

/// Fit with smoothing `alpha > 0`. Counts are the summed feature weights
/// per class, so TF-IDF rows work directly; negative weights are rejected.
pub fn fit_multinomial_nb(
    x: &DesignMatrix,
    y: &[SeverityClass],
    alpha: f64,
) -> Result<NaiveBayesModel> {
    if alpha <= 0.0 {
        return Err(Error::Config(format!(
            "smoothing alpha must be positive, got {alpha}"
        )));
    }
    if x.n_rows() == 0 || x.n_rows() != y.len() {
        return Err(Error::Fit(format!(
            "mismatched fit inputs: {} rows, {} labels",
            x.n_rows(),
            y.len()
        )));
    }

    let dim = x.dim();
    let mut counts = [vec![0.0f64; dim], vec![0.0f64; dim]];
    let mut class_rows = [0usize; 2];
    for (row, &label) in x.rows().iter().zip(y) {
        let c = class_index(label);
        class_rows[c] += 1;
        for &(i, v) in row.entries() {
            if v < 0.0 {
                return Err(Error::Fit(format!(
                    "negative feature weight {v} at column {i}"
                )));
            }
            counts[c][i] += v;
        }
    }

    let n = y.len() as f64;
    let mut log_prior = [f64::NEG_INFINITY; 2];
    let mut log_likelihood = [vec![0.0; dim], vec![0.0; dim]];
    for c in 0..2 {
        log_prior[c] = (class_rows[c] as f64 / n).ln();
        let total: f64 = counts[c].iter().sum();
        let denominator = total + alpha * dim as f64;
        for (out, &count) in log_likelihood[c].iter_mut().zip(&counts[c]) {
            *out = ((count + alpha) / denominator).ln();
        }
    }

    Ok(NaiveBayesModel {
        log_prior,
        log_likelihood,
        alpha,
    })
}

/// Posterior probability of HIGH with log-sum-exp stabilization.
pub fn nb_predict(model: &NaiveBayesModel, x: &SparseVector) -> Result<f64> {
    if x.dim() != model.dimension() {
        return Err(Error::Predict(format!(
            "input dimension {} does not match model dimension {}",
            x.dim(),
            model.dimension()
        )));
    }
    let mut log_posterior = [0.0f64; 2];
    for (c, posterior) in log_posterior.iter_mut().enumerate() {
        let mut sum = model.log_prior[c];
        for &(i, v) in x.entries() {
            sum += v * model.log_likelihood[c][i];
        }
        *posterior = sum;
    }
    let max = log_posterior[0].max(log_posterior[1]);
    let norm = (log_posterior[0] - max).exp() + (log_posterior[1] - max).exp();
    Ok((log_posterior[0] - max).exp() / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::SeverityClass::{High, Low};

    fn matrix(points: &[Vec<f64>]) -> DesignMatrix {
        let dim = points[0].len();
        let rows = points
            .iter()
            .map(|p| {
                SparseVector::from_pairs(
                    dim,
                    p.iter().enumerate().map(|(i, &v)| (i, v)).collect(),
                )
            })
            .collect();
        DesignMatrix::from_rows(rows, dim).unwrap()
    }

    #[test]
    fn laplace_smoothing_by_hand() {
        // Single HIGH row with counts [2,0,1,1], V=4, alpha=1:
        // P(t0|HIGH) = (2+1)/(4+4) = 3/8.
        let x = matrix(&[vec![2.0, 0.0, 1.0, 1.0], vec![1.0, 1.0, 1.0, 1.0]]);
        let model = fit_multinomial_nb(&x, &[High, Low], 1.0).unwrap();
        let p0 = model.log_likelihood(High)[0].exp();
        assert!((p0 - 3.0 / 8.0).abs() < 1e-12);
    }

    #[test]
    fn zero_count_class_gets_uniform_likelihood() {
        let x = matrix(&[vec![0.0, 0.0, 0.0, 0.0], vec![1.0, 2.0, 3.0, 4.0]]);
        let model = fit_multinomial_nb(&x, &[High, Low], 1.0).unwrap();
        for &ll in model.log_likelihood(High) {
            assert!((ll.exp() - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn priors_follow_class_frequencies() {
        let mut points = vec![vec![1.0]; 1000];
        points.iter_mut().skip(128).for_each(|p| p[0] = 2.0);
        let x = matrix(&points);
        let mut y = vec![High; 128];
        y.extend(vec![Low; 872]);
        let model = fit_multinomial_nb(&x, &y, 1.0).unwrap();
        assert!((model.log_prior(High) - 0.128f64.ln()).abs() < 1e-12);
        assert!((model.log_prior(Low) - 0.872f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn likelihoods_sum_to_one_per_class() {
        let x = matrix(&[vec![3.0, 1.0, 0.0], vec![0.5, 0.5, 2.0], vec![1.0, 0.0, 1.0]]);
        let model = fit_multinomial_nb(&x, &[High, Low, High], 0.7).unwrap();
        for label in [High, Low] {
            let total: f64 = model.log_likelihood(label).iter().map(|l| l.exp()).sum();
            assert!((total - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn equal_likelihoods_leave_the_prior() {
        // Both classes see identical counts, so evidence cancels.
        let x = matrix(&[vec![1.0, 1.0], vec![1.0, 1.0], vec![1.0, 1.0]]);
        let model = fit_multinomial_nb(&x, &[High, Low, Low], 1.0).unwrap();
        let query = SparseVector::from_pairs(2, vec![(0, 2.0), (1, 1.0)]);
        let p = nb_predict(&model, &query).unwrap();
        assert!((p - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_vector_returns_the_prior() {
        let x = matrix(&[vec![5.0, 0.0], vec![0.0, 5.0], vec![0.0, 4.0], vec![1.0, 3.0]]);
        let model = fit_multinomial_nb(&x, &[High, Low, Low, Low], 1.0).unwrap();
        let p = nb_predict(&model, &SparseVector::zeros(2)).unwrap();
        assert!((p - 0.25).abs() < 1e-12);
    }

    #[test]
    fn posteriors_sum_to_one() {
        let x = matrix(&[vec![5.0, 0.0], vec![0.0, 5.0], vec![1.0, 2.0]]);
        let model = fit_multinomial_nb(&x, &[High, Low, Low], 1.0).unwrap();
        for query in [
            SparseVector::from_pairs(2, vec![(0, 3.0)]),
            SparseVector::from_pairs(2, vec![(0, 1.0), (1, 4.0)]),
            SparseVector::zeros(2),
        ] {
            let p_high = nb_predict(&model, &query).unwrap();
            // The LOW posterior through the same normalization.
            let lp = |label: SeverityClass| {
                model.log_prior(label)
                    + query
                        .entries()
                        .iter()
                        .map(|&(i, v)| v * model.log_likelihood(label)[i])
                        .sum::<f64>()
            };
            let max = lp(High).max(lp(Low));
            let p_low = (lp(Low) - max).exp() / ((lp(High) - max).exp() + (lp(Low) - max).exp());
            assert!((p_high + p_low - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_brute_force_bayes_rule() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let dim = rng.gen_range(2..=10);
            let n = rng.gen_range(4..20);
            let points: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..dim).map(|_| rng.gen_range(0..4) as f64).collect())
                .collect();
            let y: Vec<SeverityClass> = (0..n)
                .map(|i| if i % 2 == 0 { High } else { Low })
                .collect();
            let x = matrix(&points);
            let model = fit_multinomial_nb(&x, &y, 1.0).unwrap();

            let query: Vec<f64> = (0..dim).map(|_| rng.gen_range(0..3) as f64).collect();
            let qv = SparseVector::from_pairs(
                dim,
                query.iter().enumerate().map(|(i, &v)| (i, v)).collect(),
            );
            let got = nb_predict(&model, &qv).unwrap();

            // Explicit products of likelihood powers, no log trick.
            let score = |label: SeverityClass| -> f64 {
                let prior = model.log_prior(label).exp();
                let mut product = prior;
                for (i, &v) in query.iter().enumerate() {
                    product *= model.log_likelihood(label)[i].exp().powf(v);
                }
                product
            };
            let expected = score(High) / (score(High) + score(Low));
            assert!((got - expected).abs() < 1e-9, "{got} vs {expected}");
        }
    }

    #[test]
    fn negative_weights_are_a_fit_error() {
        let x = matrix(&[vec![1.0, -0.5], vec![1.0, 1.0]]);
        let err = fit_multinomial_nb(&x, &[High, Low], 1.0).unwrap_err();
        assert!(matches!(err, Error::Fit(_)));
    }

    #[test]
    fn dimension_mismatch_is_a_predict_error() {
        let x = matrix(&[vec![1.0], vec![2.0]]);
        let model = fit_multinomial_nb(&x, &[High, Low], 1.0).unwrap();
        let err = nb_predict(&model, &SparseVector::zeros(3)).unwrap_err();
        assert!(matches!(err, Error::Predict(_)));
    }
}
