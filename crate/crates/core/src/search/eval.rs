use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Triplet;
use crate::model::Model;
use crate::nn::ops::cosine_similarity;
use crate::nn::Tensor;

use super::{embed_candidates, SearchError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub mrr: f64,
    /// Requested pool size.
    pub pool_size: usize,
    /// Pool size actually used, `min(pool_size, number of queries)`.
    pub effective_pool_size: usize,
    pub seed: u64,
    pub use_graph: bool,
    /// Query ids in the order of `reciprocal_ranks`.
    pub query_ids: Vec<String>,
    pub reciprocal_ranks: Vec<f64>,
}

/// For each query `i` of `n`, its own candidate plus `min(pool_size, n) − 1`
/// distinct distractors drawn from the other candidates by one generator
/// seeded with `seed`. Gold comes first; distractors follow in ascending
/// position.
pub fn pools(n: usize, pool_size: usize, seed: u64) -> impl Iterator<Item = Vec<usize>> {
    let k = pool_size.clamp(1, n.max(1)) - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(move |i| {
        let mut pool = vec![i];
        if k + 1 >= n {
            pool.extend((0..n).filter(|&j| j != i));
        } else {
            let mut picks: Vec<usize> = sample(&mut rng, n - 1, k)
                .into_iter()
                .map(|j| if j >= i { j + 1 } else { j })
                .collect();
            picks.sort_unstable();
            pool.extend(picks);
        }
        pool
    })
}

pub fn sample_pools(n: usize, pool_size: usize, seed: u64) -> Vec<Vec<usize>> {
    pools(n, pool_size, seed).collect()
}

/// 1-based rank of `gold` among `pool`, given scores aligned with `pool`.
/// Equal scores go to the lower position.
pub fn rank_in_pool(gold: usize, pool: &[usize], scores: &[f64]) -> usize {
    let gold_score = pool
        .iter()
        .zip(scores)
        .find(|(j, _)| **j == gold)
        .map(|(_, s)| *s)
        .expect("pool contains its gold candidate");
    1 + pool
        .iter()
        .zip(scores)
        .filter(|(&j, &s)| j != gold && (s > gold_score || (s == gold_score && j < gold)))
        .count()
}

/// Gold ranks for a full score matrix, where `scores[i][j]` scores
/// candidate `j` for query `i`.
pub fn mrr_from_scores(scores: &Tensor, pools: &[Vec<usize>]) -> Vec<usize> {
    pools
        .iter()
        .enumerate()
        .map(|(i, pool)| {
            let row = scores.row(i);
            let aligned: Vec<f64> = pool.iter().map(|&j| row[j]).collect();
            rank_in_pool(i, pool, &aligned)
        })
        .collect()
}

/// Pooled MRR over `test`. Items are ordered by id before pools are drawn,
/// so the result does not depend on how the test set is stored.
pub fn evaluate_mrr(
    model: &Model,
    test: &[Triplet],
    pool_size: usize,
    seed: u64,
    use_graph: bool,
) -> Result<EvalResult, SearchError> {
    if test.is_empty() {
        return Err(SearchError::EmptyTestSet);
    }
    let mut ordered: Vec<Triplet> = test.to_vec();
    ordered.sort_by(|a, b| a.id.cmp(&b.id));
    let index = embed_candidates(model, &ordered, use_graph)?;
    let n = ordered.len();
    let mut reciprocal_ranks = Vec::with_capacity(n);
    let mut effective_pool_size = 0;
    for (i, pool) in pools(n, pool_size, seed).enumerate() {
        let query = model.query_vector(&ordered[i].query_text)?;
        let scores = pool
            .iter()
            .map(|&j| cosine_similarity(&query, &index.vectors()[j]))
            .collect::<Result<Vec<_>, _>>()?;
        effective_pool_size = pool.len();
        reciprocal_ranks.push(1.0 / rank_in_pool(i, &pool, &scores) as f64);
    }
    Ok(EvalResult {
        mrr: reciprocal_ranks.iter().sum::<f64>() / n as f64,
        pool_size,
        effective_pool_size,
        seed,
        use_graph,
        query_ids: ordered.into_iter().map(|t| t.id).collect(),
        reciprocal_ranks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_ranks() {
        // Gold scores place the three queries at ranks 1, 2 and 4.
        let scores = Tensor::from_rows(&[
            vec![0.9, 0.1, 0.2, 0.3],
            vec![0.8, 0.5, 0.1, 0.2],
            vec![0.7, 0.6, 0.1, 0.5],
            vec![0.0, 0.0, 0.0, 1.0],
        ])
        .unwrap();
        let pools = sample_pools(4, 1000, 0);
        let ranks = mrr_from_scores(&scores, &pools[..3]);
        assert_eq!(ranks, vec![1, 2, 4]);
        let mrr = ranks.iter().map(|r| 1.0 / *r as f64).sum::<f64>() / 3.0;
        assert!((mrr - 7.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn pools_contain_gold_and_distinct_distractors() {
        for (n, size) in [(10, 4), (10, 10), (10, 1000), (1, 5), (5, 1)] {
            for (i, pool) in sample_pools(n, size, 3).iter().enumerate() {
                assert_eq!(pool[0], i);
                assert_eq!(pool.len(), size.min(n));
                let mut sorted = pool.clone();
                sorted.sort_unstable();
                sorted.dedup();
                assert_eq!(sorted.len(), pool.len());
                assert!(pool.iter().all(|&j| j < n));
            }
        }
        assert_eq!(sample_pools(30, 5, 9), sample_pools(30, 5, 9));
        assert_ne!(sample_pools(30, 5, 9), sample_pools(30, 5, 10));
    }

    #[test]
    fn ties_favor_lower_position() {
        let scores = Tensor::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let pools = sample_pools(2, 2, 0);
        assert_eq!(mrr_from_scores(&scores, &pools), vec![1, 2]);
    }
}
