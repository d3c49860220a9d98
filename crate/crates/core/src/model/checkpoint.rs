//! Single-document JSON checkpoints with sorted keys.

use serde_json::{json, Map, Value};

use crate::nn::{ParamStore, Tensor};

use super::{Model, ModelConfig, ModelError, Vocab};

pub const CHECKPOINT_VERSION: u64 = 1;

fn bad(msg: impl Into<String>) -> ModelError {
    ModelError::Checkpoint(msg.into())
}

/// `{"dims": .., "params": {name: {"data", "shape"}}, "version": 1, "vocab": [..]}`.
/// Byte-identical for identical models.
pub fn checkpoint_to_json(model: &Model) -> String {
    let params: Map<String, Value> = model
        .params
        .iter()
        .map(|(name, t)| {
            (
                name.clone(),
                json!({ "shape": t.shape(), "data": t.data() }),
            )
        })
        .collect();
    let doc = json!({
        "version": CHECKPOINT_VERSION,
        "dims": serde_json::to_value(&model.config).expect("config serializes"),
        "vocab": model.vocab.tokens(),
        "params": params,
    });
    serde_json::to_string(&doc).expect("checkpoint serializes")
}

/// Parses a checkpoint and checks every parameter against the layout implied
/// by its dims and vocabulary.
pub fn checkpoint_from_json(text: &str) -> Result<Model, ModelError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let obj = doc.as_object().ok_or_else(|| bad("expected an object"))?;
    match obj.get("version").and_then(Value::as_u64) {
        Some(CHECKPOINT_VERSION) => {}
        other => return Err(bad(format!("unsupported version {other:?}"))),
    }
    let config: ModelConfig = serde_json::from_value(
        obj.get("dims")
            .cloned()
            .ok_or_else(|| bad("missing dims"))?,
    )
    .map_err(|e| bad(format!("dims: {e}")))?;
    let tokens: Vec<String> = match obj.get("vocab") {
        Some(v) => serde_json::from_value(v.clone()).map_err(|e| bad(format!("vocab: {e}")))?,
        None => {
            return Err(ModelError::VocabMismatch(
                "checkpoint has no vocabulary".into(),
            ))
        }
    };
    let vocab = Vocab::from_tokens(tokens)?;
    let mut model = Model::new(config, vocab)?;

    let stored = obj
        .get("params")
        .and_then(Value::as_object)
        .ok_or_else(|| bad("missing params"))?;
    let mut params = ParamStore::new();
    for (name, entry) in stored {
        let shape: Vec<usize> =
            serde_json::from_value(entry.get("shape").cloned().unwrap_or(Value::Null))
                .map_err(|e| bad(format!("{name}.shape: {e}")))?;
        let data: Vec<f64> =
            serde_json::from_value(entry.get("data").cloned().unwrap_or(Value::Null))
                .map_err(|e| bad(format!("{name}.data: {e}")))?;
        params.insert(name.clone(), Tensor::new(shape, data)?);
    }
    model
        .params
        .same_layout(&params)
        .map_err(|e| bad(e.to_string()))?;
    model.params = params;
    Ok(model)
}
