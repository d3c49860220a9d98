//! Token and graph encoders, sum fusion and the in-batch contrastive loss.

mod checkpoint;
mod encoder;
mod vocab;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Triplet;
use crate::graph::{ConceptGraph, NodeKind, RelationKind};
use crate::nn::{NnError, ParamStore, Tensor};

pub use checkpoint::{checkpoint_from_json, checkpoint_to_json, CHECKPOINT_VERSION};
pub use encoder::{
    batch_loss, batch_loss_and_grad, encode_text, fuse, gat_layer, init_node_features, pool_graph,
    BatchObjective, BatchOutput,
};
pub use vocab::{
    code_tokens, query_tokens, subtokenize, Vocab, NUM_TOKEN, PAD, PAD_TOKEN, STR_TOKEN, UNK,
    UNK_TOKEN,
};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("contrastive batch needs at least 2 examples, got {0}")]
    BatchTooSmall(usize),
    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),
    #[error("vocabulary mismatch: {0}")]
    VocabMismatch(String),
    #[error("malformed checkpoint: {0}")]
    Checkpoint(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub embed_dim: usize,
    pub gat_layers: usize,
    pub leaky_relu_slope: f64,
    pub temperature: f64,
    pub max_code_tokens: usize,
    pub max_query_tokens: usize,
    pub seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            embed_dim: 32,
            gat_layers: 2,
            leaky_relu_slope: 0.2,
            temperature: 0.07,
            max_code_tokens: 128,
            max_query_tokens: 32,
            seed: 0,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        let problem = if self.embed_dim < 2 {
            Some("embed_dim must be at least 2")
        } else if self.gat_layers < 1 {
            Some("gat_layers must be at least 1")
        } else if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            Some("temperature must be positive")
        } else if self.max_code_tokens == 0 || self.max_query_tokens == 0 {
            Some("token limits must be positive")
        } else if !self.leaky_relu_slope.is_finite() {
            Some("leaky_relu_slope must be finite")
        } else {
            None
        };
        match problem {
            Some(msg) => Err(ModelError::InvalidConfig(msg.into())),
            None => Ok(()),
        }
    }
}

/// Forward relations, then their inverses, then the self loop.
pub const NUM_RELATIONS: usize = 2 * RelationKind::ALL.len() + 1;
pub const SELF_RELATION: usize = NUM_RELATIONS - 1;
pub const INIT_RANGE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Head {
    Query,
    Code,
}

impl Head {
    fn prefix(self) -> &'static str {
        match self {
            Head::Query => "query",
            Head::Code => "code",
        }
    }
}

pub mod names {
    pub const SUBTOKEN: &str = "embed.subtoken";
    pub const KIND: &str = "embed.kind";
    pub const GATE_W: &str = "pool.gate_w";
    pub const GATE_B: &str = "pool.gate_b";
    pub const PROJ: &str = "pool.proj";

    pub fn gat(layer: usize, part: &str) -> String {
        format!("gat.{layer}.{part}")
    }

    pub fn head(head: super::Head, part: &str) -> String {
        format!("{}.{part}", head.prefix())
    }
}

/// Message passing view of a concept graph: node subtoken ids, kinds, and
/// directed messages (receiver, sender, relation) grouped by receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphInput {
    pub node_ids: Vec<Vec<usize>>,
    pub node_kinds: Vec<usize>,
    pub messages: Vec<Message>,
    /// Message indices per receiving node.
    pub incoming: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Message {
    pub recv: usize,
    pub send: usize,
    pub relation: usize,
}

impl GraphInput {
    /// Each edge yields a forward message to its target and an inverse one
    /// back to its source; every node also messages itself.
    pub fn new(graph: &ConceptGraph, vocab: &Vocab) -> GraphInput {
        let n = graph.nodes.len();
        let mut messages = Vec::with_capacity(2 * graph.edges.len() + n);
        let forward = RelationKind::ALL.len();
        for e in &graph.edges {
            let k = e.kind.index();
            messages.push(Message {
                recv: e.dst,
                send: e.src,
                relation: k,
            });
            messages.push(Message {
                recv: e.src,
                send: e.dst,
                relation: forward + k,
            });
        }
        for i in 0..n {
            messages.push(Message {
                recv: i,
                send: i,
                relation: SELF_RELATION,
            });
        }
        let mut incoming = vec![Vec::new(); n];
        for (m, msg) in messages.iter().enumerate() {
            incoming[msg.recv].push(m);
        }
        GraphInput {
            node_ids: graph
                .nodes
                .iter()
                .map(|node| vocab.encode(&subtokenize(&node.name), usize::MAX))
                .collect(),
            node_kinds: graph.nodes.iter().map(|node| node.kind.index()).collect(),
            messages,
            incoming,
        }
    }

    pub fn len(&self) -> usize {
        self.node_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_ids.is_empty()
    }
}

/// A triplet mapped to vocabulary ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub query: Vec<usize>,
    pub code: Vec<usize>,
    pub graph: GraphInput,
}

enum Init {
    Zero,
    Glorot,
    Uniform,
}

fn init_kind(name: &str) -> Init {
    if name.ends_with(".b") || name.ends_with(".bias") || name == names::GATE_B {
        Init::Zero
    } else if name.ends_with(".w") || name.contains(".w_") || name == names::PROJ {
        Init::Glorot
    } else {
        Init::Uniform
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub config: ModelConfig,
    pub vocab: Vocab,
    pub params: ParamStore,
}

impl Model {
    /// Allocates every parameter and initializes it from one seeded
    /// generator in name order: biases start at zero, square weight matrices
    /// are Glorot-uniform, and embedding tables and vectors are uniform in
    /// `[-0.1, 0.1]`.
    pub fn new(config: ModelConfig, vocab: Vocab) -> Result<Model, ModelError> {
        config.validate()?;
        let d = config.embed_dim;
        let mut params = ParamStore::new();
        params.insert(names::SUBTOKEN, Tensor::zeros(&[vocab.len(), d]));
        params.insert(names::KIND, Tensor::zeros(&[NodeKind::ALL.len(), d]));
        for l in 0..config.gat_layers {
            for part in ["w_value", "w_recv", "w_send"] {
                params.insert(names::gat(l, part), Tensor::zeros(&[d, d]));
            }
            params.insert(
                names::gat(l, "relation"),
                Tensor::zeros(&[NUM_RELATIONS, d]),
            );
            params.insert(names::gat(l, "attn"), Tensor::zeros(&[d]));
            params.insert(names::gat(l, "bias"), Tensor::zeros(&[d]));
        }
        params.insert(names::GATE_W, Tensor::zeros(&[d]));
        params.insert(names::GATE_B, Tensor::zeros(&[1]));
        params.insert(names::PROJ, Tensor::zeros(&[d, d]));
        for head in [Head::Query, Head::Code] {
            for layer in ["l1", "l2"] {
                params.insert(
                    names::head(head, &format!("{layer}.w")),
                    Tensor::zeros(&[d, d]),
                );
                params.insert(
                    names::head(head, &format!("{layer}.b")),
                    Tensor::zeros(&[d]),
                );
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        for (name, t) in params.iter_mut() {
            match init_kind(name) {
                Init::Zero => {}
                Init::Glorot => {
                    let limit = (6.0 / (t.rows() + t.cols()) as f64).sqrt();
                    t.fill_uniform(&mut rng, -limit, limit);
                }
                Init::Uniform => t.fill_uniform(&mut rng, -INIT_RANGE, INIT_RANGE),
            }
        }
        Ok(Model {
            config,
            vocab,
            params,
        })
    }

    pub fn encode_query(&self, text: &str) -> Vec<usize> {
        self.vocab
            .encode(&query_tokens(text), self.config.max_query_tokens)
    }

    pub fn encode_code(&self, code: &str) -> Vec<usize> {
        self.vocab
            .encode(&code_tokens(code), self.config.max_code_tokens)
    }

    pub fn example(&self, triplet: &Triplet) -> Example {
        Example {
            query: self.encode_query(&triplet.query_text),
            code: self.encode_code(&triplet.code_text),
            graph: GraphInput::new(&triplet.graph, &self.vocab),
        }
    }

    /// `h_q` for a query string.
    pub fn query_vector(&self, text: &str) -> Result<Vec<f64>, ModelError> {
        encoder::encode_text(&self.params, Head::Query, &self.encode_query(text))
    }

    /// `h_c = h_code + h_CG`, or `h_code` alone when `use_graph` is off.
    pub fn candidate_vector(
        &self,
        example: &Example,
        use_graph: bool,
    ) -> Result<Vec<f64>, ModelError> {
        encoder::candidate_vector(&self.params, &self.config, example, use_graph)
    }
}
