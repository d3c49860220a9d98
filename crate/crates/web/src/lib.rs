//! WebAssembly bindings for the browser demo in `www/`.
//!
//! The pure functions return JSON strings so they can be tested natively;
//! the `#[wasm_bindgen]` wrappers only convert errors.

use cgsearch::corpus::{build_triplets, generate_synthetic, split_corpus, Triplet};
use cgsearch::graph::{extract_graph, graph_to_json, stats};
use cgsearch::model::{subtokenize, Model, ModelConfig};
use cgsearch::search::{embed_candidates, evaluate_mrr, search, SearchIndex, TrainConfig};
use cgsearch::syntax::parse_source;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Concept graph and its statistics for a Java snippet.
pub fn extract_json(source: &str) -> Result<String, String> {
    let snippet = parse_source(source).map_err(|e| e.to_string())?;
    let graph = extract_graph(&snippet);
    let document: Value =
        serde_json::from_str(&graph_to_json(&graph)).map_err(|e| e.to_string())?;
    Ok(json!({ "graph": document, "stats": stats(&graph) }).to_string())
}

/// Subtokens of every whitespace-separated word, in order.
pub fn subtokens_json(text: &str) -> String {
    let tokens: Vec<String> = text.split_whitespace().flat_map(subtokenize).collect();
    json!(tokens).to_string()
}

/// A model trained in the page on a synthetic corpus, with both candidate
/// indexes built over the held-out test split.
pub struct Demo {
    model: Model,
    test: Vec<Triplet>,
    joint: SearchIndex,
    code_only: SearchIndex,
    summary: Value,
}

impl Demo {
    pub fn train(n: usize, seed: u64, epochs: usize) -> Result<Demo, String> {
        let triplets = build_triplets(&generate_synthetic(n, seed)).0;
        let splits = split_corpus(&triplets, 0.8, 0.1, seed).map_err(|e| e.to_string())?;
        let config = TrainConfig {
            epochs,
            seed,
            model: ModelConfig {
                seed,
                ..ModelConfig::default()
            },
            ..TrainConfig::default()
        };
        let outcome = cgsearch::search::train(&config, &splits.train, &splits.valid)
            .map_err(|e| e.to_string())?;
        let model = outcome.model;
        let err = |e: cgsearch::search::SearchError| e.to_string();
        let pool = config.pool_size;
        let joint_mrr = evaluate_mrr(&model, &splits.test, pool, seed, true)
            .map_err(err)?
            .mrr;
        let code_mrr = evaluate_mrr(&model, &splits.test, pool, seed, false)
            .map_err(err)?
            .mrr;
        let summary = json!({
            "train": splits.train.len(),
            "valid": splits.valid.len(),
            "test": splits.test.len(),
            "initial_loss": outcome.initial_loss,
            "epochs": outcome.metrics,
            "test_mrr": joint_mrr,
            "test_mrr_nograph": code_mrr,
        });
        Ok(Demo {
            joint: embed_candidates(&model, &splits.test, true).map_err(err)?,
            code_only: embed_candidates(&model, &splits.test, false).map_err(err)?,
            model,
            test: splits.test,
            summary,
        })
    }

    pub fn summary_json(&self) -> String {
        self.summary.to_string()
    }

    /// Top `top_k` test candidates for `query`, with their code and docstring
    /// query.
    pub fn search_json(
        &self,
        query: &str,
        top_k: usize,
        use_graph: bool,
    ) -> Result<String, String> {
        let index = if use_graph {
            &self.joint
        } else {
            &self.code_only
        };
        let hits = search(&self.model, index, query, top_k).map_err(|e| e.to_string())?;
        let rows: Vec<Value> = hits
            .iter()
            .map(|hit| {
                let t = &self.test[hit.position];
                json!({ "id": hit.id, "score": hit.score, "query": t.query_text, "code": t.code_text })
            })
            .collect();
        Ok(Value::Array(rows).to_string())
    }
}

fn js_err(message: String) -> JsError {
    JsError::new(&message)
}

#[wasm_bindgen]
pub fn extract(source: &str) -> Result<String, JsError> {
    extract_json(source).map_err(js_err)
}

#[wasm_bindgen]
pub fn subtokens(text: &str) -> String {
    subtokens_json(text)
}

#[wasm_bindgen]
pub struct DemoModel(Demo);

#[wasm_bindgen]
impl DemoModel {
    #[wasm_bindgen(constructor)]
    pub fn new(n: usize, seed: u32, epochs: usize) -> Result<DemoModel, JsError> {
        Demo::train(n, u64::from(seed), epochs)
            .map(DemoModel)
            .map_err(js_err)
    }

    pub fn summary(&self) -> String {
        self.0.summary_json()
    }

    pub fn search(&self, query: &str, top_k: usize, use_graph: bool) -> Result<String, JsError> {
        self.0.search_json(query, top_k, use_graph).map_err(js_err)
    }
}
