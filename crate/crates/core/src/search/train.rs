use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Triplet;
use crate::model::{batch_loss, batch_loss_and_grad, Example, Model, ModelConfig, Vocab};
use crate::nn::{adam_step, AdamConfig, OptimizerState};

use super::{evaluate_mrr, SearchError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub model: ModelConfig,
    /// Off trains the token encoders alone, with graphs zeroed.
    pub use_graph: bool,
    pub pool_size: usize,
    pub min_freq: usize,
    pub train_path: Option<PathBuf>,
    pub valid_path: Option<PathBuf>,
    pub checkpoint_path: Option<PathBuf>,
    pub best_checkpoint_path: Option<PathBuf>,
    pub metrics_path: Option<PathBuf>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 10,
            batch_size: 16,
            learning_rate: 1e-3,
            seed: 0,
            model: ModelConfig::default(),
            use_graph: true,
            pool_size: 1000,
            min_freq: 2,
            train_path: None,
            valid_path: None,
            checkpoint_path: None,
            best_checkpoint_path: None,
            metrics_path: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        let problem = if self.epochs < 1 {
            Some("epochs must be at least 1")
        } else if self.batch_size < 2 {
            Some("batch_size must be at least 2")
        } else if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            Some("learning_rate must be positive")
        } else if self.pool_size < 1 {
            Some("pool_size must be at least 1")
        } else {
            None
        };
        match problem {
            Some(msg) => Err(SearchError::InvalidConfig(msg.into())),
            None => Ok(self.model.validate()?),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub train_loss: f64,
    pub valid_mrr: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: Model,
    pub best_model: Model,
    pub best_epoch: usize,
    pub metrics: Vec<EpochMetrics>,
    /// Mean batch loss over the training split before any update.
    pub initial_loss: f64,
}

fn batches(order: &[usize], size: usize) -> impl Iterator<Item = &[usize]> {
    order.chunks(size).filter(|b| b.len() >= 2)
}

fn mean_loss(
    model: &Model,
    examples: &[Example],
    order: &[usize],
    size: usize,
    use_graph: bool,
) -> Result<f64, SearchError> {
    let mut total = 0.0;
    let mut count = 0;
    for chunk in batches(order, size) {
        let batch: Vec<&Example> = chunk.iter().map(|&i| &examples[i]).collect();
        total += batch_loss(&model.params, &model.config, &batch, use_graph)?.loss;
        count += 1;
    }
    Ok(if count == 0 {
        0.0
    } else {
        total / count as f64
    })
}

/// Builds the vocabulary from `train`, then runs seeded epochs of shuffled
/// mini-batch Adam. Batches shorter than 2 are dropped. The best model is
/// the one with the highest validation MRR, earliest epoch on ties.
pub fn train(
    config: &TrainConfig,
    train: &[Triplet],
    valid: &[Triplet],
) -> Result<TrainOutcome, SearchError> {
    config.validate()?;
    if train.len() < 2 {
        return Err(SearchError::EmptySplit("train"));
    }
    if valid.is_empty() {
        return Err(SearchError::EmptySplit("valid"));
    }
    let vocab = Vocab::build(train, config.min_freq)?;
    let mut model = Model::new(config.model.clone(), vocab)?;
    let examples: Vec<Example> = train.iter().map(|t| model.example(t)).collect();
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let initial_loss = mean_loss(
        &model,
        &examples,
        &order,
        config.batch_size,
        config.use_graph,
    )?;

    let adam = AdamConfig {
        learning_rate: config.learning_rate,
        ..AdamConfig::default()
    };
    let mut state = OptimizerState::new(&model.params);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut metrics = Vec::with_capacity(config.epochs);
    let mut best: Option<(f64, usize, Model)> = None;

    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        let mut count = 0;
        for chunk in batches(&order, config.batch_size) {
            let batch: Vec<&Example> = chunk.iter().map(|&i| &examples[i]).collect();
            let (out, grads) =
                batch_loss_and_grad(&model.params, &model.config, &batch, config.use_graph)?;
            adam_step(&mut model.params, &grads, &mut state, &adam)?;
            total += out.loss;
            count += 1;
        }
        let valid_mrr = evaluate_mrr(
            &model,
            valid,
            config.pool_size,
            config.seed,
            config.use_graph,
        )?
        .mrr;
        metrics.push(EpochMetrics {
            epoch,
            train_loss: total / count as f64,
            valid_mrr,
        });
        if best.as_ref().is_none_or(|(mrr, _, _)| valid_mrr > *mrr) {
            best = Some((valid_mrr, epoch, model.clone()));
        }
    }

    let (_, best_epoch, best_model) = best.expect("at least one epoch");
    Ok(TrainOutcome {
        model,
        best_model,
        best_epoch,
        metrics,
        initial_loss,
    })
}
