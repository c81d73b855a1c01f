//! Linear learners over sparse rows: full-batch logistic regression,
//! subgradient linear SVM with Platt calibration, passive-aggressive
//! updates, and stochastic gradient descent on log loss.
//!
//! All trainers share the affine decision score `weights . x + bias` and a
//! per-sample weight vector (class weighting enters here).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::SeverityClass;
use crate::error::{Error, Result};
use crate::features::{DesignMatrix, SparseVector};

pub mod calibration;

pub use calibration::Calibrator;

/// Loss the linear model was trained with; decides how scores become
/// probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    Log,
    Hinge,
    Pa,
}

/// Training-configuration echo carried inside a fitted model.
/// For passive-aggressive models `learning_rate` holds the aggressiveness C.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainEcho {
    pub epochs: usize,
    pub learning_rate: f64,
    pub lambda: f64,
    pub seed: u64,
}

/// Dense-weight linear model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub loss_kind: LossKind,
    pub echo: TrainEcho,
}

impl LinearModel {
    pub fn score(&self, x: &SparseVector) -> Result<f64> {
        if x.dim() != self.weights.len() {
            return Err(Error::Predict(format!(
                "input dimension {} does not match model dimension {}",
                x.dim(),
                self.weights.len()
            )));
        }
        Ok(x.dot_dense(&self.weights) + self.bias)
    }

    pub fn weight_norm(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum::<f64>().sqrt()
    }
}

/// One scored prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub score: f64,
    pub probability: f64,
    pub class: SeverityClass,
}

impl Prediction {
    pub fn from_probability(score: f64, probability: f64) -> Self {
        let class = if probability >= 0.5 {
            SeverityClass::High
        } else {
            SeverityClass::Low
        };
        Self {
            score,
            probability,
            class,
        }
    }
}

/// Numerically safe logistic function.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + exp(z))` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn check_inputs(x: &DesignMatrix, y: &[SeverityClass], sample_weights: &[f64]) -> Result<()> {
    if x.n_rows() == 0 {
        return Err(Error::Fit("cannot fit on an empty design matrix".into()));
    }
    if x.n_rows() != y.len() || y.len() != sample_weights.len() {
        return Err(Error::Fit(format!(
            "mismatched fit inputs: {} rows, {} labels, {} weights",
            x.n_rows(),
            y.len(),
            sample_weights.len()
        )));
    }
    for row in x.rows() {
        for &(_, v) in row.entries() {
            if !v.is_finite() {
                return Err(Error::Fit("non-finite feature value".into()));
            }
        }
    }
    for &w in sample_weights {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::Fit("sample weights must be positive and finite".into()));
        }
    }
    Ok(())
}

/// Weighted-mean logistic loss with L2 penalty, and its exact gradient.
///
/// `loss = sum_i s_i * logloss_i / sum_i s_i + lambda/2 * |w|^2`; the bias
/// is not regularized.
pub fn logistic_loss_grad(
    weights: &[f64],
    bias: f64,
    x: &DesignMatrix,
    y: &[SeverityClass],
    sample_weights: &[f64],
    lambda: f64,
) -> (f64, Vec<f64>, f64) {
    let total_weight: f64 = sample_weights.iter().sum();
    let mut loss = 0.0;
    let mut grad_w = vec![0.0; weights.len()];
    let mut grad_b = 0.0;
    for ((row, &label), &s) in x.rows().iter().zip(y).zip(sample_weights) {
        let z = row.dot_dense(weights) + bias;
        let target = label.as_f64();
        loss += s * (softplus(z) - target * z);
        let residual = s * (sigmoid(z) - target);
        for &(i, v) in row.entries() {
            grad_w[i] += residual * v;
        }
        grad_b += residual;
    }
    loss /= total_weight;
    grad_b /= total_weight;
    let mut penalty = 0.0;
    for (g, &w) in grad_w.iter_mut().zip(weights) {
        *g = *g / total_weight + lambda * w;
        penalty += w * w;
    }
    (loss + 0.5 * lambda * penalty, grad_w, grad_b)
}

/// Weighted-mean hinge loss with L2 penalty, and a subgradient.
/// Samples at margin >= 1 contribute only the regularization term.
pub fn hinge_loss_grad(
    weights: &[f64],
    bias: f64,
    x: &DesignMatrix,
    y: &[SeverityClass],
    sample_weights: &[f64],
    lambda: f64,
) -> (f64, Vec<f64>, f64) {
    let total_weight: f64 = sample_weights.iter().sum();
    let mut loss = 0.0;
    let mut grad_w = vec![0.0; weights.len()];
    let mut grad_b = 0.0;
    for ((row, &label), &s) in x.rows().iter().zip(y).zip(sample_weights) {
        let sign = label.as_sign();
        let margin = sign * (row.dot_dense(weights) + bias);
        if margin < 1.0 {
            loss += s * (1.0 - margin);
            for &(i, v) in row.entries() {
                grad_w[i] -= s * sign * v;
            }
            grad_b -= s * sign;
        }
    }
    loss /= total_weight;
    grad_b /= total_weight;
    let mut penalty = 0.0;
    for (g, &w) in grad_w.iter_mut().zip(weights) {
        *g = *g / total_weight + lambda * w;
        penalty += w * w;
    }
    (loss + 0.5 * lambda * penalty, grad_w, grad_b)
}

/// Logistic regression settings (deterministic full-batch descent).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogisticConfig {
    pub learning_rate: f64,
    pub lambda: f64,
    pub epochs: usize,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1.0,
            lambda: 1e-4,
            epochs: 100,
        }
    }
}

/// Fit L2-regularized logistic regression by full-pass gradient descent
/// from zero weights. Deterministic: no randomness enters the loop.
pub fn fit_logistic(
    x: &DesignMatrix,
    y: &[SeverityClass],
    sample_weights: &[f64],
    config: &LogisticConfig,
) -> Result<LinearModel> {
    check_inputs(x, y, sample_weights)?;
    let mut weights = vec![0.0; x.dim()];
    let mut bias = 0.0;
    for _ in 0..config.epochs {
        let (_, grad_w, grad_b) =
            logistic_loss_grad(&weights, bias, x, y, sample_weights, config.lambda);
        for (w, g) in weights.iter_mut().zip(&grad_w) {
            *w -= config.learning_rate * g;
        }
        bias -= config.learning_rate * grad_b;
    }
    Ok(LinearModel {
        weights,
        bias,
        loss_kind: LossKind::Log,
        echo: TrainEcho {
            epochs: config.epochs,
            learning_rate: config.learning_rate,
            lambda: config.lambda,
            seed: 0,
        },
    })
}

/// Linear SVM settings. Calibration scores come from an internal
/// stratified out-of-fold partition of the training rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmConfig {
    pub learning_rate: f64,
    pub lambda: f64,
    pub epochs: usize,
    pub calibration_folds: usize,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.5,
            lambda: 1e-4,
            epochs: 100,
            calibration_folds: 3,
            seed: 0,
        }
    }
}

fn fit_hinge_descent(
    x: &DesignMatrix,
    y: &[SeverityClass],
    sample_weights: &[f64],
    config: &SvmConfig,
) -> LinearModel {
    let mut weights = vec![0.0; x.dim()];
    let mut bias = 0.0;
    for _ in 0..config.epochs {
        let (_, grad_w, grad_b) =
            hinge_loss_grad(&weights, bias, x, y, sample_weights, config.lambda);
        for (w, g) in weights.iter_mut().zip(&grad_w) {
            *w -= config.learning_rate * g;
        }
        bias -= config.learning_rate * grad_b;
    }
    LinearModel {
        weights,
        bias,
        loss_kind: LossKind::Hinge,
        echo: TrainEcho {
            epochs: config.epochs,
            learning_rate: config.learning_rate,
            lambda: config.lambda,
            seed: config.seed,
        },
    }
}

/// Fit a linear SVM by hinge subgradient descent, plus a Platt sigmoid
/// calibrator fitted on out-of-fold decision scores.
pub fn fit_linear_svm(
    x: &DesignMatrix,
    y: &[SeverityClass],
    sample_weights: &[f64],
    config: &SvmConfig,
) -> Result<(LinearModel, Calibrator)> {
    check_inputs(x, y, sample_weights)?;
    let folds = crate::corpus::make_folds(y, config.calibration_folds.max(2), config.seed)
        .map_err(|e| Error::Calibration(format!("cannot build calibration partition: {e}")))?;

    let mut oof_scores = vec![0.0f64; y.len()];
    for fold in 0..folds.k {
        let train_idx = folds.train_indices(fold);
        let holdout_idx = folds.fold_indices(fold);
        let holdout_has_both = holdout_idx.iter().any(|&i| y[i].is_high())
            && holdout_idx.iter().any(|&i| !y[i].is_high());
        if !holdout_has_both {
            return Err(Error::Calibration(format!(
                "calibration fold {fold} holds a single class"
            )));
        }
        let sub_x = x.select(&train_idx);
        let sub_y: Vec<SeverityClass> = train_idx.iter().map(|&i| y[i]).collect();
        let sub_w: Vec<f64> = train_idx.iter().map(|&i| sample_weights[i]).collect();
        let sub_model = fit_hinge_descent(&sub_x, &sub_y, &sub_w, config);
        for &i in &holdout_idx {
            oof_scores[i] = sub_model.score(x.row(i))?;
        }
    }
    let calibrator = Calibrator::fit(&oof_scores, y)?;
    let model = fit_hinge_descent(x, y, sample_weights, config);
    Ok((model, calibrator))
}

/// Passive-aggressive settings (PA-I).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PaConfig {
    pub aggressiveness: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for PaConfig {
    fn default() -> Self {
        Self {
            aggressiveness: 1.0,
            epochs: 5,
            seed: 0,
        }
    }
}

/// One PA-I update in place. Returns the applied step `tau`.
///
/// With hinge loss `l = max(0, 1 - y * (w . x))`, the step is
/// `tau = min(cap, l / |x|^2)` and `w <- w + tau * y * x`.
/// Zero-norm rows are skipped.
pub fn pa_step(weights: &mut [f64], x: &SparseVector, y_sign: f64, cap: f64) -> f64 {
    let squared_norm = x.squared_norm();
    if squared_norm == 0.0 {
        return 0.0;
    }
    let margin = y_sign * x.dot_dense(weights);
    let loss = (1.0 - margin).max(0.0);
    if loss == 0.0 {
        return 0.0;
    }
    let tau = cap.min(loss / squared_norm);
    for &(i, v) in x.entries() {
        weights[i] += tau * y_sign * v;
    }
    tau
}

/// Fit a passive-aggressive classifier: single-sample PA-I updates over
/// seeded shuffled epochs. The bias stays zero; the margin lives entirely
/// in the weights.
pub fn fit_passive_aggressive(
    x: &DesignMatrix,
    y: &[SeverityClass],
    sample_weights: &[f64],
    config: &PaConfig,
) -> Result<LinearModel> {
    check_inputs(x, y, sample_weights)?;
    if config.aggressiveness <= 0.0 {
        return Err(Error::Config(format!(
            "aggressiveness must be positive, got {}",
            config.aggressiveness
        )));
    }
    let mut weights = vec![0.0; x.dim()];
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..x.n_rows()).collect();
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            pa_step(
                &mut weights,
                x.row(i),
                y[i].as_sign(),
                config.aggressiveness * sample_weights[i],
            );
        }
    }
    Ok(LinearModel {
        weights,
        bias: 0.0,
        loss_kind: LossKind::Pa,
        echo: TrainEcho {
            epochs: config.epochs,
            learning_rate: config.aggressiveness,
            lambda: 0.0,
            seed: config.seed,
        },
    })
}

/// SGD-on-log-loss settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SgdConfig {
    pub eta0: f64,
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SgdConfig {
    fn default() -> Self {
        Self {
            eta0: 0.1,
            lambda: 1e-4,
            epochs: 20,
            seed: 0,
        }
    }
}

/// Learning rate after `t` updates: `eta0 / (1 + lambda * eta0 * t)`.
pub fn sgd_learning_rate(eta0: f64, lambda: f64, t: u64) -> f64 {
    eta0 / (1.0 + lambda * eta0 * t as f64)
}

/// Fit logistic loss by per-sample stochastic updates with the inverse
/// scaling schedule, rows shuffled each epoch by a seeded generator.
///
/// The L2 decay is applied through a lazily tracked scale so each update
/// touches only the row's nonzeros.
pub fn fit_sgd_logloss(
    x: &DesignMatrix,
    y: &[SeverityClass],
    sample_weights: &[f64],
    config: &SgdConfig,
) -> Result<LinearModel> {
    check_inputs(x, y, sample_weights)?;
    if config.eta0 <= 0.0 {
        return Err(Error::Config(format!(
            "eta0 must be positive, got {}",
            config.eta0
        )));
    }
    let mut stored = vec![0.0f64; x.dim()];
    let mut scale = 1.0f64;
    let mut bias = 0.0f64;
    let mut t: u64 = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..x.n_rows()).collect();

    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let row = x.row(i);
            let eta = sgd_learning_rate(config.eta0, config.lambda, t);
            let z = scale * row.dot_dense(&stored) + bias;
            let residual = sample_weights[i] * (sigmoid(z) - y[i].as_f64());

            // w <- (1 - eta*lambda) * w - eta * residual * x
            scale *= 1.0 - eta * config.lambda;
            if scale.abs() < 1e-9 {
                for w in &mut stored {
                    *w *= scale;
                }
                scale = 1.0;
            }
            for &(j, v) in row.entries() {
                stored[j] -= eta * residual * v / scale;
            }
            bias -= eta * residual;
            t += 1;
        }
    }

    let weights = stored.iter().map(|w| w * scale).collect();
    Ok(LinearModel {
        weights,
        bias,
        loss_kind: LossKind::Log,
        echo: TrainEcho {
            epochs: config.epochs,
            learning_rate: config.eta0,
            lambda: config.lambda,
            seed: config.seed,
        },
    })
}

/// Score one row and turn the score into a probability: the sigmoid for
/// log-loss and passive-aggressive models, the Platt calibrator for hinge
/// models. Predicted class is HIGH iff the probability reaches 0.5.
pub fn linear_predict(
    model: &LinearModel,
    calibrator: Option<&Calibrator>,
    x: &SparseVector,
) -> Result<Prediction> {
    let score = model.score(x)?;
    let probability = match (model.loss_kind, calibrator) {
        (LossKind::Hinge, Some(c)) => c.probability(score),
        _ => sigmoid(score),
    };
    Ok(Prediction::from_probability(score, probability))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::SeverityClass::{High, Low};

    fn unit_row(dim: usize, index: usize) -> SparseVector {
        SparseVector::from_pairs(dim, vec![(index, 1.0)])
    }

    fn matrix(rows: Vec<SparseVector>, dim: usize) -> DesignMatrix {
        DesignMatrix::from_rows(rows, dim).unwrap()
    }

    fn dense_random(
        rng: &mut ChaCha8Rng,
        n: usize,
        dim: usize,
    ) -> (DesignMatrix, Vec<SeverityClass>, Vec<f64>) {
        use rand::Rng;
        let rows = (0..n)
            .map(|_| {
                SparseVector::from_pairs(
                    dim,
                    (0..dim).map(|i| (i, rng.gen_range(-1.0..1.0))).collect(),
                )
            })
            .collect();
        let y = (0..n)
            .map(|_| if rng.gen_bool(0.5) { High } else { Low })
            .collect();
        let w = (0..n).map(|_| rng.gen_range(0.2..3.0)).collect();
        (matrix(rows, dim), y, w)
    }

    #[test]
    fn untrained_model_predicts_half() {
        let model = LinearModel {
            weights: vec![0.0; 3],
            bias: 0.0,
            loss_kind: LossKind::Log,
            echo: TrainEcho {
                epochs: 0,
                learning_rate: 1.0,
                lambda: 0.0,
                seed: 0,
            },
        };
        let p = linear_predict(&model, None, &unit_row(3, 1)).unwrap();
        assert_eq!(p.probability, 0.5);
        assert_eq!(p.class, High);
    }

    #[test]
    fn first_logistic_step_moves_along_half_x() {
        let x = matrix(vec![unit_row(4, 2)], 4);
        let config = LogisticConfig {
            learning_rate: 0.3,
            lambda: 0.0,
            epochs: 1,
        };
        let model = fit_logistic(&x, &[High], &[1.0], &config).unwrap();
        // Gradient at zero weights is (p - y) x = -0.5 x.
        assert!((model.weights[2] - 0.5 * 0.3).abs() < 1e-15);
        assert!(model.weights.iter().enumerate().all(|(i, &w)| i == 2 || w == 0.0));
        assert!((model.bias - 0.5 * 0.3).abs() < 1e-15);
    }

    #[test]
    fn regularization_shrinks_the_weight_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (x, y, w) = dense_random(&mut rng, 50, 6);
        let free = fit_logistic(
            &x,
            &y,
            &w,
            &LogisticConfig {
                lambda: 0.0,
                ..LogisticConfig::default()
            },
        )
        .unwrap();
        let penalized = fit_logistic(
            &x,
            &y,
            &w,
            &LogisticConfig {
                lambda: 0.5,
                ..LogisticConfig::default()
            },
        )
        .unwrap();
        assert!(penalized.weight_norm() < free.weight_norm());
    }

    #[test]
    fn doubling_a_weight_equals_duplicating_the_row() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let (x, y, _) = dense_random(&mut rng, 12, 4);
        let config = LogisticConfig::default();

        let mut weights = vec![1.0; 12];
        weights[3] = 2.0;
        let doubled = fit_logistic(&x, &y, &weights, &config).unwrap();

        let mut rows: Vec<SparseVector> = x.rows().to_vec();
        rows.push(x.row(3).clone());
        let mut y2 = y.clone();
        y2.push(y[3]);
        let duplicated = fit_logistic(
            &matrix(rows, 4),
            &y2,
            &[1.0; 13],
            &config,
        )
        .unwrap();

        for (a, b) in doubled.weights.iter().zip(&duplicated.weights) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
        assert!((doubled.bias - duplicated.bias).abs() < 1e-6);
    }

    #[test]
    fn logistic_gradient_matches_finite_differences() {
        gradient_check(logistic_loss_grad, 10, false);
    }

    #[test]
    fn hinge_gradient_matches_finite_differences_off_the_kink() {
        gradient_check(hinge_loss_grad, 10, true);
    }

    fn gradient_check(
        loss_grad: impl Fn(
            &[f64],
            f64,
            &DesignMatrix,
            &[SeverityClass],
            &[f64],
            f64,
        ) -> (f64, Vec<f64>, f64),
        cases: usize,
        avoid_unit_margin: bool,
    ) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let dim = 20;
        let mut done = 0;
        while done < cases {
            let (x, y, s) = dense_random(&mut rng, 8, dim);
            let weights: Vec<f64> = (0..dim).map(|_| rng.gen_range(-0.5..0.5)).collect();
            let bias: f64 = rng.gen_range(-0.5..0.5);
            if avoid_unit_margin {
                let near_kink = x.rows().iter().zip(&y).any(|(row, &label)| {
                    let margin = label.as_sign() * (row.dot_dense(&weights) + bias);
                    (margin - 1.0).abs() < 1e-3
                });
                if near_kink {
                    continue;
                }
            }
            let lambda = 0.01;
            let (_, grad_w, grad_b) = loss_grad(&weights, bias, &x, &y, &s, lambda);
            let h = 1e-6;
            for coord in 0..=dim {
                let mut plus = weights.clone();
                let mut minus = weights.clone();
                let (bias_plus, bias_minus) = if coord == dim {
                    (bias + h, bias - h)
                } else {
                    plus[coord] += h;
                    minus[coord] -= h;
                    (bias, bias)
                };
                let (loss_plus, _, _) = loss_grad(&plus, bias_plus, &x, &y, &s, lambda);
                let (loss_minus, _, _) = loss_grad(&minus, bias_minus, &x, &y, &s, lambda);
                let numeric = (loss_plus - loss_minus) / (2.0 * h);
                let analytic = if coord == dim { grad_b } else { grad_w[coord] };
                let denom = analytic.abs().max(numeric.abs()).max(1e-8);
                assert!(
                    (analytic - numeric).abs() / denom < 1e-5,
                    "coord {coord}: analytic {analytic} vs numeric {numeric}"
                );
            }
            done += 1;
        }
    }

    #[test]
    fn svm_separates_a_trivial_pair() {
        let rows = vec![
            SparseVector::from_pairs(2, vec![(0, 1.0)]),
            SparseVector::from_pairs(2, vec![(0, -1.0)]),
        ];
        let x = matrix(rows, 2);
        // Too few rows for a 3-fold calibration partition.
        let err = fit_linear_svm(&x, &[High, Low], &[1.0, 1.0], &SvmConfig::default());
        assert!(matches!(err, Err(Error::Calibration(_))));

        // The raw hinge fit separates the pair.
        let model = fit_hinge_descent(&x, &[High, Low], &[1.0, 1.0], &SvmConfig::default());
        assert!(model.score(&x.rows()[0]).unwrap() > 0.0);
        assert!(model.score(&x.rows()[1]).unwrap() < 0.0);
    }

    #[test]
    fn sample_beyond_the_margin_adds_only_regularization() {
        let rows = vec![SparseVector::from_pairs(2, vec![(0, 1.0)])];
        let x = matrix(rows, 2);
        let weights = vec![5.0, 2.0];
        // Margin is 5 > 1: the data term vanishes.
        let (_, grad_w, grad_b) = hinge_loss_grad(&weights, 0.0, &x, &[High], &[1.0], 0.1);
        assert_eq!(grad_w, vec![0.5, 0.2]);
        assert_eq!(grad_b, 0.0);
    }

    #[test]
    fn pa_update_matches_hand_computation() {
        let mut weights = vec![0.0, 0.0];
        let x = unit_row(2, 0);
        let tau = pa_step(&mut weights, &x, 1.0, 1.0);
        assert_eq!(tau, 1.0);
        assert_eq!(weights, vec![1.0, 0.0]);
    }

    #[test]
    fn pa_skips_confident_correct_samples() {
        let mut weights = vec![2.0, 0.0];
        let x = unit_row(2, 0);
        // Margin 2 >= 1: no update.
        let tau = pa_step(&mut weights, &x, 1.0, 1.0);
        assert_eq!(tau, 0.0);
        assert_eq!(weights, vec![2.0, 0.0]);
    }

    #[test]
    fn pa_step_is_capped_by_aggressiveness() {
        let mut weights = vec![-4.0, 0.0];
        let x = unit_row(2, 0);
        // Loss is 1 - (-4) = 5 over norm 1, capped at 0.5.
        let tau = pa_step(&mut weights, &x, 1.0, 0.5);
        assert_eq!(tau, 0.5);
        assert_eq!(weights, vec![-3.5, 0.0]);
    }

    #[test]
    fn pa_zero_norm_rows_are_skipped() {
        let mut weights = vec![0.0; 2];
        let tau = pa_step(&mut weights, &SparseVector::zeros(2), 1.0, 1.0);
        assert_eq!(tau, 0.0);
    }

    #[test]
    fn pa_loss_never_increases_across_an_update() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let dim = 6;
        let mut weights: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for _ in 0..1000 {
            let mut pairs = Vec::new();
            for i in 0..dim {
                if rng.gen_bool(0.7) {
                    pairs.push((i, rng.gen_range(-1.0..1.0)));
                }
            }
            let x = SparseVector::from_pairs(dim, pairs);
            let y = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let cap = rng.gen_range(0.1..2.0);
            let before = (1.0 - y * x.dot_dense(&weights)).max(0.0);
            pa_step(&mut weights, &x, y, cap);
            let after = (1.0 - y * x.dot_dense(&weights)).max(0.0);
            assert!(after <= before + 1e-12, "{after} > {before}");
        }
    }

    #[test]
    fn sgd_schedule_starts_at_eta0() {
        assert_eq!(sgd_learning_rate(0.1, 1e-4, 0), 0.1);
        assert!(sgd_learning_rate(0.1, 1e-4, 1000) < 0.1);
    }

    #[test]
    fn single_sgd_update_matches_hand_computation() {
        let x = matrix(vec![unit_row(3, 0)], 3);
        let config = SgdConfig {
            eta0: 1.0,
            lambda: 0.0,
            epochs: 1,
            seed: 0,
        };
        let model = fit_sgd_logloss(&x, &[High], &[1.0], &config).unwrap();
        assert!((model.weights[0] - 0.5).abs() < 1e-15);
        assert!((model.bias - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sgd_is_bit_deterministic_per_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let (x, y, w) = dense_random(&mut rng, 30, 5);
        let config = SgdConfig::default();
        let a = fit_sgd_logloss(&x, &y, &w, &config).unwrap();
        let b = fit_sgd_logloss(&x, &y, &w, &config).unwrap();
        for (wa, wb) in a.weights.iter().zip(&b.weights) {
            assert_eq!(wa.to_bits(), wb.to_bits());
        }
        assert_eq!(a.bias.to_bits(), b.bias.to_bits());
        let c = fit_sgd_logloss(
            &x,
            &y,
            &w,
            &SgdConfig {
                seed: 1,
                ..config
            },
        )
        .unwrap();
        assert_ne!(a.weights, c.weights);
    }

    #[test]
    fn sigmoid_examples() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(1.0) - 0.7311).abs() < 1e-4);
        // w = 2 e1, b = -1 on x = e1: score 1.
        let model = LinearModel {
            weights: vec![2.0],
            bias: -1.0,
            loss_kind: LossKind::Log,
            echo: TrainEcho {
                epochs: 0,
                learning_rate: 0.0,
                lambda: 0.0,
                seed: 0,
            },
        };
        let p = linear_predict(&model, None, &unit_row(1, 0)).unwrap();
        assert_eq!(p.score, 1.0);
        assert!((p.probability - 0.7311).abs() < 1e-4);
    }

    #[test]
    fn probability_is_monotone_in_score() {
        let calibrator = Calibrator { a: -1.3, b: 0.2 };
        let mut last_sigmoid = -1.0;
        let mut last_platt = -1.0;
        for i in 0..200 {
            let score = -10.0 + i as f64 * 0.1;
            let p_sigmoid = sigmoid(score);
            let p_platt = calibrator.probability(score);
            assert!(p_sigmoid >= last_sigmoid);
            assert!(p_platt >= last_platt);
            last_sigmoid = p_sigmoid;
            last_platt = p_platt;
        }
    }

    #[test]
    fn dimension_mismatch_is_a_predict_error() {
        let model = LinearModel {
            weights: vec![0.0; 3],
            bias: 0.0,
            loss_kind: LossKind::Log,
            echo: TrainEcho {
                epochs: 0,
                learning_rate: 0.0,
                lambda: 0.0,
                seed: 0,
            },
        };
        assert!(linear_predict(&model, None, &unit_row(5, 0)).is_err());
    }

    #[test]
    fn non_finite_features_are_a_fit_error() {
        let x = matrix(
            vec![SparseVector::from_pairs(1, vec![(0, f64::NAN)])],
            1,
        );
        let err = fit_logistic(&x, &[High], &[1.0], &LogisticConfig::default());
        assert!(matches!(err, Err(Error::Fit(_))));
    }
}
