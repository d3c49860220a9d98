//! Training, candidate indexing, ranking and pooled MRR evaluation.

mod eval;
mod train;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Triplet;
use crate::model::{Model, ModelError};
use crate::nn::ops::cosine_similarity;
use crate::nn::NnError;

pub use eval::{evaluate_mrr, mrr_from_scores, pools, rank_in_pool, sample_pools, EvalResult};
pub use train::{train, EpochMetrics, TrainConfig, TrainOutcome};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("search index is empty")]
    EmptyIndex,
    #[error("test set is empty")]
    EmptyTestSet,
    #[error("{0} split is empty")]
    EmptySplit(&'static str),
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
}

impl From<NnError> for SearchError {
    fn from(e: NnError) -> Self {
        SearchError::Model(ModelError::Nn(e))
    }
}

/// Candidate vectors in input order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchIndex {
    ids: Vec<String>,
    vectors: Vec<Vec<f64>>,
    use_graph: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedCandidate {
    pub id: String,
    pub position: usize,
    pub score: f64,
}

impl SearchIndex {
    pub fn new(
        ids: Vec<String>,
        vectors: Vec<Vec<f64>>,
        use_graph: bool,
    ) -> Result<Self, SearchError> {
        if ids.len() != vectors.len() {
            return Err(NnError::ShapeMismatch {
                op: "search index",
                left: vec![ids.len()],
                right: vec![vectors.len()],
            }
            .into());
        }
        Ok(SearchIndex {
            ids,
            vectors,
            use_graph,
        })
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn use_graph(&self) -> bool {
        self.use_graph
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// `h_c` for every triplet, fused with the pooled graph vector when
/// `use_graph` is set.
pub fn embed_candidates(
    model: &Model,
    triplets: &[Triplet],
    use_graph: bool,
) -> Result<SearchIndex, SearchError> {
    let vectors = triplets
        .iter()
        .map(|t| model.candidate_vector(&model.example(t), use_graph))
        .collect::<Result<Vec<_>, _>>()?;
    SearchIndex::new(
        triplets.iter().map(|t| t.id.clone()).collect(),
        vectors,
        use_graph,
    )
}

/// Orders by cosine similarity, highest first; equal scores keep input order.
pub(crate) fn order_by_score(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

/// All candidates sorted by cosine similarity to `query`.
pub fn rank(index: &SearchIndex, query: &[f64]) -> Result<Vec<RankedCandidate>, SearchError> {
    if index.is_empty() {
        return Err(SearchError::EmptyIndex);
    }
    let scores = index
        .vectors
        .iter()
        .map(|c| cosine_similarity(query, c))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(order_by_score(&scores)
        .into_iter()
        .map(|i| RankedCandidate {
            id: index.ids[i].clone(),
            position: i,
            score: scores[i],
        })
        .collect())
}

/// Embeds `query` with the model and ranks the index, keeping `top_k`.
pub fn search(
    model: &Model,
    index: &SearchIndex,
    query: &str,
    top_k: usize,
) -> Result<Vec<RankedCandidate>, SearchError> {
    let mut ranked = rank(index, &model.query_vector(query)?)?;
    ranked.truncate(top_k);
    Ok(ranked)
}
