//! Forward passes with caches and their hand-written backward passes.

use crate::nn::ops::{self, affine, matvec, matvec_backward};
use crate::nn::{NnError, Objective, ParamStore, Tensor};

use super::{names, Example, GraphInput, Head, ModelConfig, ModelError};

fn add_into(acc: &mut [f64], v: &[f64]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += b;
    }
}

fn add_scaled(acc: &mut [f64], v: &[f64], k: f64) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += k * b;
    }
}

fn mean_embedding(table: &Tensor, ids: &[usize]) -> Result<Vec<f64>, NnError> {
    let mut m = vec![0.0; table.cols()];
    for &id in ids {
        if id >= table.rows() {
            return Err(NnError::IndexOutOfRange {
                index: id,
                len: table.rows(),
            });
        }
        add_into(&mut m, table.row(id));
    }
    let n = ids.len().max(1) as f64;
    m.iter_mut().for_each(|v| *v /= n);
    Ok(m)
}

fn scatter_mean(grads: &mut ParamStore, ids: &[usize], dm: &[f64]) -> Result<(), NnError> {
    let table = grads.get_mut(names::SUBTOKEN)?;
    let k = 1.0 / ids.len().max(1) as f64;
    for &id in ids {
        add_scaled(table.row_mut(id), dm, k);
    }
    Ok(())
}

struct TextCache {
    mean: Vec<f64>,
    hidden: Vec<f64>,
    out: Vec<f64>,
}

fn text_forward(params: &ParamStore, head: Head, ids: &[usize]) -> Result<TextCache, NnError> {
    let mean = mean_embedding(params.get(names::SUBTOKEN)?, ids)?;
    let hidden = ops::tanh(&affine(
        params.get(&names::head(head, "l1.w"))?,
        params.get(&names::head(head, "l1.b"))?,
        &mean,
    )?);
    let out = affine(
        params.get(&names::head(head, "l2.w"))?,
        params.get(&names::head(head, "l2.b"))?,
        &hidden,
    )?;
    Ok(TextCache { mean, hidden, out })
}

fn text_backward(
    params: &ParamStore,
    head: Head,
    ids: &[usize],
    cache: &TextCache,
    dout: &[f64],
    grads: &mut ParamStore,
) -> Result<(), NnError> {
    let (w2, b2) = (names::head(head, "l2.w"), names::head(head, "l2.b"));
    let (w1, b1) = (names::head(head, "l1.w"), names::head(head, "l1.b"));
    add_into(grads.get_mut(&b2)?.data_mut(), dout);
    let dhidden = matvec_backward(params.get(&w2)?, &cache.hidden, dout, grads.get_mut(&w2)?);
    let dpre = ops::tanh_backward(&cache.hidden, &dhidden);
    add_into(grads.get_mut(&b1)?.data_mut(), &dpre);
    let dmean = matvec_backward(params.get(&w1)?, &cache.mean, &dpre, grads.get_mut(&w1)?);
    scatter_mean(grads, ids, &dmean)
}

/// Mean subtoken embedding through the head's two-layer projection.
pub fn encode_text(params: &ParamStore, head: Head, ids: &[usize]) -> Result<Vec<f64>, ModelError> {
    Ok(text_forward(params, head, ids)?.out)
}

/// Row `i` is the mean embedding of node `i`'s name plus its kind embedding.
pub fn init_node_features(params: &ParamStore, graph: &GraphInput) -> Result<Tensor, ModelError> {
    if graph.is_empty() {
        return Err(ModelError::EmptyGraph);
    }
    let table = params.get(names::SUBTOKEN)?;
    let kinds = params.get(names::KIND)?;
    let rows = graph
        .node_ids
        .iter()
        .zip(&graph.node_kinds)
        .map(|(ids, &kind)| {
            let mut row = mean_embedding(table, ids)?;
            add_into(&mut row, kinds.row(kind));
            Ok(row)
        })
        .collect::<Result<Vec<_>, NnError>>()?;
    Ok(Tensor::from_rows(&rows)?)
}

fn node_features_backward(
    graph: &GraphInput,
    dh: &Tensor,
    grads: &mut ParamStore,
) -> Result<(), NnError> {
    for (i, ids) in graph.node_ids.iter().enumerate() {
        scatter_mean(grads, ids, dh.row(i))?;
        add_into(
            grads.get_mut(names::KIND)?.row_mut(graph.node_kinds[i]),
            dh.row(i),
        );
    }
    Ok(())
}

struct GatCache {
    input: Tensor,
    values: Vec<Vec<f64>>,
    pre: Vec<Vec<f64>>,
    activated: Vec<Vec<f64>>,
    alpha: Vec<f64>,
    out: Tensor,
}

fn gat_forward(
    params: &ParamStore,
    layer: usize,
    slope: f64,
    graph: &GraphInput,
    h: &Tensor,
) -> Result<GatCache, NnError> {
    if h.rows() != graph.len() {
        return Err(NnError::ShapeMismatch {
            op: "gat_layer",
            left: vec![graph.len()],
            right: h.shape().to_vec(),
        });
    }
    let w_value = params.get(&names::gat(layer, "w_value"))?;
    let w_recv = params.get(&names::gat(layer, "w_recv"))?;
    let w_send = params.get(&names::gat(layer, "w_send"))?;
    let relation = params.get(&names::gat(layer, "relation"))?;
    let attn = params.get(&names::gat(layer, "attn"))?.data();
    let bias = params.get(&names::gat(layer, "bias"))?.data();

    let n = graph.len();
    let mut values = Vec::with_capacity(n);
    let mut recv = Vec::with_capacity(n);
    let mut send = Vec::with_capacity(n);
    for i in 0..n {
        values.push(matvec(w_value, h.row(i))?);
        recv.push(matvec(w_recv, h.row(i))?);
        send.push(matvec(w_send, h.row(i))?);
    }

    let mut pre = Vec::with_capacity(graph.messages.len());
    let mut activated = Vec::with_capacity(graph.messages.len());
    let mut scores = Vec::with_capacity(graph.messages.len());
    for msg in &graph.messages {
        let mut z = ops::add(&recv[msg.recv], &send[msg.send])?;
        add_into(&mut z, relation.row(msg.relation));
        let u = ops::leaky_relu(&z, slope);
        scores.push(attn.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>());
        pre.push(z);
        activated.push(u);
    }

    let mut alpha = vec![0.0; graph.messages.len()];
    let mut out = Tensor::zeros(&[n, h.cols()]);
    for (i, incoming) in graph.incoming.iter().enumerate() {
        let local: Vec<f64> = incoming.iter().map(|&m| scores[m]).collect();
        let weights = ops::softmax(&local);
        let mut acc = bias.to_vec();
        for (&m, w) in incoming.iter().zip(&weights) {
            alpha[m] = *w;
            add_scaled(&mut acc, &values[graph.messages[m].send], *w);
        }
        out.row_mut(i).copy_from_slice(&ops::tanh(&acc));
    }
    Ok(GatCache {
        input: h.clone(),
        values,
        pre,
        activated,
        alpha,
        out,
    })
}

fn gat_backward(
    params: &ParamStore,
    layer: usize,
    slope: f64,
    graph: &GraphInput,
    cache: &GatCache,
    dout: &Tensor,
    grads: &mut ParamStore,
) -> Result<Tensor, NnError> {
    let n = graph.len();
    let d = cache.input.cols();
    let attn = params.get(&names::gat(layer, "attn"))?.data().to_vec();
    let mut d_values = Tensor::zeros(&[n, d]);
    let mut d_recv = Tensor::zeros(&[n, d]);
    let mut d_send = Tensor::zeros(&[n, d]);
    let mut d_attn = vec![0.0; d];
    let mut d_bias = vec![0.0; d];
    let mut d_relation = Tensor::zeros(&[grads.get(&names::gat(layer, "relation"))?.rows(), d]);

    for (i, incoming) in graph.incoming.iter().enumerate() {
        let dpre = ops::tanh_backward(cache.out.row(i), dout.row(i));
        add_into(&mut d_bias, &dpre);
        let d_alpha: Vec<f64> = incoming
            .iter()
            .map(|&m| {
                let msg = graph.messages[m];
                add_scaled(d_values.row_mut(msg.send), &dpre, cache.alpha[m]);
                cache.values[msg.send]
                    .iter()
                    .zip(&dpre)
                    .map(|(v, g)| v * g)
                    .sum()
            })
            .collect();
        let local_alpha: Vec<f64> = incoming.iter().map(|&m| cache.alpha[m]).collect();
        let d_scores = ops::softmax_backward(&local_alpha, &d_alpha);
        for (&m, &ds) in incoming.iter().zip(&d_scores) {
            let msg = graph.messages[m];
            add_scaled(&mut d_attn, &cache.activated[m], ds);
            let du: Vec<f64> = attn.iter().map(|a| a * ds).collect();
            let dz = ops::leaky_relu_backward(&cache.pre[m], slope, &du);
            add_into(d_recv.row_mut(msg.recv), &dz);
            add_into(d_send.row_mut(msg.send), &dz);
            add_into(d_relation.row_mut(msg.relation), &dz);
        }
    }

    add_into(
        grads.get_mut(&names::gat(layer, "attn"))?.data_mut(),
        &d_attn,
    );
    add_into(
        grads.get_mut(&names::gat(layer, "bias"))?.data_mut(),
        &d_bias,
    );
    grads
        .get_mut(&names::gat(layer, "relation"))?
        .accumulate(&d_relation)?;

    let mut dh = Tensor::zeros(&[n, d]);
    for (part, upstream) in [
        ("w_value", &d_values),
        ("w_recv", &d_recv),
        ("w_send", &d_send),
    ] {
        let name = names::gat(layer, part);
        let w = params.get(&name)?;
        let dw = grads.get_mut(&name)?;
        for i in 0..n {
            let dx = matvec_backward(w, cache.input.row(i), upstream.row(i), dw);
            add_into(dh.row_mut(i), &dx);
        }
    }
    Ok(dh)
}

/// One relation-aware attention layer. Returns the new node states and the
/// attention weight of every message, aligned with `graph.messages`.
pub fn gat_layer(
    params: &ParamStore,
    layer: usize,
    slope: f64,
    graph: &GraphInput,
    h: &Tensor,
) -> Result<(Tensor, Vec<f64>), ModelError> {
    let cache = gat_forward(params, layer, slope, graph, h)?;
    Ok((cache.out, cache.alpha))
}

struct PoolCache {
    gates: Vec<f64>,
    projected: Vec<Vec<f64>>,
    out: Vec<f64>,
}

fn pool_forward(params: &ParamStore, h: &Tensor) -> Result<PoolCache, NnError> {
    let gate_w = params.get(names::GATE_W)?.data();
    let gate_b = params.get(names::GATE_B)?.data()[0];
    let proj = params.get(names::PROJ)?;
    let mut gates = Vec::with_capacity(h.rows());
    let mut projected = Vec::with_capacity(h.rows());
    let mut out = vec![0.0; proj.rows()];
    for i in 0..h.rows() {
        let s: f64 = gate_w.iter().zip(h.row(i)).map(|(a, b)| a * b).sum::<f64>() + gate_b;
        let g = ops::sigmoid_scalar(s);
        let p = matvec(proj, h.row(i))?;
        add_scaled(&mut out, &p, g);
        gates.push(g);
        projected.push(p);
    }
    Ok(PoolCache {
        gates,
        projected,
        out,
    })
}

fn pool_backward(
    params: &ParamStore,
    h: &Tensor,
    cache: &PoolCache,
    dout: &[f64],
    grads: &mut ParamStore,
) -> Result<Tensor, NnError> {
    let gate_w = params.get(names::GATE_W)?.data().to_vec();
    let proj = params.get(names::PROJ)?;
    let mut dh = Tensor::zeros(&[h.rows(), h.cols()]);
    for i in 0..h.rows() {
        let g = cache.gates[i];
        let dg: f64 = dout
            .iter()
            .zip(&cache.projected[i])
            .map(|(a, b)| a * b)
            .sum();
        let ds = dg * g * (1.0 - g);
        add_scaled(grads.get_mut(names::GATE_W)?.data_mut(), h.row(i), ds);
        grads.get_mut(names::GATE_B)?.data_mut()[0] += ds;
        let dp: Vec<f64> = dout.iter().map(|v| v * g).collect();
        let dx = matvec_backward(proj, h.row(i), &dp, grads.get_mut(names::PROJ)?);
        let row = dh.row_mut(i);
        add_into(row, &dx);
        add_scaled(row, &gate_w, ds);
    }
    Ok(dh)
}

/// Gated global attention readout `Σ_i sigmoid(w_g·h_i + b_g) · W_p h_i`.
pub fn pool_graph(params: &ParamStore, h: &Tensor) -> Result<Vec<f64>, ModelError> {
    if h.rows() == 0 || h.is_empty() {
        return Err(ModelError::EmptyGraph);
    }
    Ok(pool_forward(params, h)?.out)
}

/// Sum fusion of the code and graph vectors.
pub fn fuse(code: &[f64], graph: &[f64]) -> Result<Vec<f64>, NnError> {
    ops::add(code, graph)
}

struct GraphCache {
    layers: Vec<GatCache>,
    last: Tensor,
    pool: PoolCache,
}

fn graph_forward(
    params: &ParamStore,
    config: &ModelConfig,
    graph: &GraphInput,
) -> Result<GraphCache, ModelError> {
    let mut h = init_node_features(params, graph)?;
    let mut layers = Vec::with_capacity(config.gat_layers);
    for l in 0..config.gat_layers {
        let cache = gat_forward(params, l, config.leaky_relu_slope, graph, &h)?;
        h = cache.out.clone();
        layers.push(cache);
    }
    let pool = pool_forward(params, &h)?;
    Ok(GraphCache {
        layers,
        last: h,
        pool,
    })
}

fn graph_backward(
    params: &ParamStore,
    config: &ModelConfig,
    graph: &GraphInput,
    cache: &GraphCache,
    dout: &[f64],
    grads: &mut ParamStore,
) -> Result<(), NnError> {
    let mut dh = pool_backward(params, &cache.last, &cache.pool, dout, grads)?;
    for (l, layer) in cache.layers.iter().enumerate().rev() {
        dh = gat_backward(params, l, config.leaky_relu_slope, graph, layer, &dh, grads)?;
    }
    node_features_backward(graph, &dh, grads)
}

pub(super) fn candidate_vector(
    params: &ParamStore,
    config: &ModelConfig,
    example: &Example,
    use_graph: bool,
) -> Result<Vec<f64>, ModelError> {
    let code = encode_text(params, Head::Code, &example.code)?;
    if !use_graph {
        return Ok(code);
    }
    let graph = graph_forward(params, config, &example.graph)?;
    Ok(fuse(&code, &graph.pool.out)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchOutput {
    pub loss: f64,
    /// `S[i][j] = cos(h_q^i, h_c^j) / τ`.
    pub scores: Tensor,
}

struct BatchCache {
    queries: Vec<TextCache>,
    codes: Vec<TextCache>,
    graphs: Vec<Option<GraphCache>>,
    candidates: Vec<Vec<f64>>,
    output: BatchOutput,
}

fn batch_forward(
    params: &ParamStore,
    config: &ModelConfig,
    batch: &[&Example],
    use_graph: bool,
) -> Result<BatchCache, ModelError> {
    let b = batch.len();
    if b < 2 {
        return Err(ModelError::BatchTooSmall(b));
    }
    let mut queries = Vec::with_capacity(b);
    let mut codes = Vec::with_capacity(b);
    let mut graphs = Vec::with_capacity(b);
    let mut candidates = Vec::with_capacity(b);
    for ex in batch {
        queries.push(text_forward(params, Head::Query, &ex.query)?);
        let code = text_forward(params, Head::Code, &ex.code)?;
        let graph = if use_graph {
            Some(graph_forward(params, config, &ex.graph)?)
        } else {
            None
        };
        candidates.push(match &graph {
            Some(g) => fuse(&code.out, &g.pool.out)?,
            None => code.out.clone(),
        });
        codes.push(code);
        graphs.push(graph);
    }
    let mut scores = Tensor::zeros(&[b, b]);
    let mut loss = 0.0;
    for i in 0..b {
        for j in 0..b {
            scores.row_mut(i)[j] =
                ops::cosine_similarity(&queries[i].out, &candidates[j])? / config.temperature;
        }
        loss += ops::softmax_cross_entropy_row(scores.row(i), i)?;
    }
    Ok(BatchCache {
        queries,
        codes,
        graphs,
        candidates,
        output: BatchOutput {
            loss: loss / b as f64,
            scores,
        },
    })
}

/// Mean in-batch cross-entropy of each query against every candidate.
pub fn batch_loss(
    params: &ParamStore,
    config: &ModelConfig,
    batch: &[&Example],
    use_graph: bool,
) -> Result<BatchOutput, ModelError> {
    Ok(batch_forward(params, config, batch, use_graph)?.output)
}

/// Loss plus gradients for every parameter. Graph parameters receive zero
/// gradient when `use_graph` is off.
pub fn batch_loss_and_grad(
    params: &ParamStore,
    config: &ModelConfig,
    batch: &[&Example],
    use_graph: bool,
) -> Result<(BatchOutput, ParamStore), ModelError> {
    let cache = batch_forward(params, config, batch, use_graph)?;
    let b = batch.len();
    let d = config.embed_dim;
    let mut grads = params.zeros_like();
    let mut d_queries = vec![vec![0.0; d]; b];
    let mut d_candidates = vec![vec![0.0; d]; b];
    for i in 0..b {
        let d_row = ops::softmax_cross_entropy_backward(cache.output.scores.row(i), i)?;
        for j in 0..b {
            let d_cos = d_row[j] / (b as f64 * config.temperature);
            let (dq, dc) =
                ops::cosine_backward(&cache.queries[i].out, &cache.candidates[j], d_cos)?;
            add_into(&mut d_queries[i], &dq);
            add_into(&mut d_candidates[j], &dc);
        }
    }
    for (k, ex) in batch.iter().enumerate() {
        text_backward(
            params,
            Head::Query,
            &ex.query,
            &cache.queries[k],
            &d_queries[k],
            &mut grads,
        )?;
        text_backward(
            params,
            Head::Code,
            &ex.code,
            &cache.codes[k],
            &d_candidates[k],
            &mut grads,
        )?;
        if let Some(g) = &cache.graphs[k] {
            graph_backward(params, config, &ex.graph, g, &d_candidates[k], &mut grads)?;
        }
    }
    Ok((cache.output, grads))
}

/// The batch loss as a function of the parameters, for gradient checking.
pub struct BatchObjective<'a> {
    pub config: &'a ModelConfig,
    pub batch: Vec<&'a Example>,
    pub use_graph: bool,
}

impl Objective for BatchObjective<'_> {
    type Error = ModelError;

    fn loss(&self, params: &ParamStore) -> Result<f64, ModelError> {
        Ok(batch_loss(params, self.config, &self.batch, self.use_graph)?.loss)
    }

    fn loss_and_grad(&self, params: &ParamStore) -> Result<(f64, ParamStore), ModelError> {
        let (out, grads) = batch_loss_and_grad(params, self.config, &self.batch, self.use_graph)?;
        Ok((out.loss, grads))
    }
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::model::{Message, NUM_RELATIONS, SELF_RELATION};
    use crate::nn::{grad_check, grad_entries, GradEntry};

    const INPUT: &str = "probe.input";

    /// Four nodes, random typed edges, plus self loops.
    fn random_graph(rng: &mut ChaCha8Rng) -> GraphInput {
        let n = 4;
        let mut messages = Vec::new();
        for _ in 0..5 {
            let (src, dst) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let k = rng.gen_range(0..9);
            messages.push(Message {
                recv: dst,
                send: src,
                relation: k,
            });
            messages.push(Message {
                recv: src,
                send: dst,
                relation: 9 + k,
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
            node_ids: vec![vec![0]; n],
            node_kinds: vec![0; n],
            messages,
            incoming,
        }
    }

    fn random_tensor(rng: &mut ChaCha8Rng, shape: &[usize]) -> Tensor {
        let mut t = Tensor::zeros(shape);
        t.fill_uniform(rng, -1.0, 1.0);
        t
    }

    fn layer_params(rng: &mut ChaCha8Rng, d: usize) -> ParamStore {
        let mut p = ParamStore::new();
        for part in ["w_value", "w_recv", "w_send"] {
            p.insert(names::gat(0, part), random_tensor(rng, &[d, d]));
        }
        p.insert(
            names::gat(0, "relation"),
            random_tensor(rng, &[NUM_RELATIONS, d]),
        );
        p.insert(names::gat(0, "attn"), random_tensor(rng, &[d]));
        p.insert(names::gat(0, "bias"), random_tensor(rng, &[d]));
        p.insert(INPUT, random_tensor(rng, &[4, d]));
        p
    }

    /// `Σ c ⊙ layer(h)` for fixed random weights `c`.
    struct LayerProbe {
        graph: GraphInput,
        weights: Tensor,
    }

    impl Objective for LayerProbe {
        type Error = ModelError;

        fn loss(&self, params: &ParamStore) -> Result<f64, ModelError> {
            let (out, _) = gat_layer(params, 0, 0.2, &self.graph, params.get(INPUT)?)?;
            Ok(out
                .data()
                .iter()
                .zip(self.weights.data())
                .map(|(a, b)| a * b)
                .sum())
        }

        fn loss_and_grad(&self, params: &ParamStore) -> Result<(f64, ParamStore), ModelError> {
            let input = params.get(INPUT)?;
            let cache = gat_forward(params, 0, 0.2, &self.graph, input)?;
            let loss = cache
                .out
                .data()
                .iter()
                .zip(self.weights.data())
                .map(|(a, b)| a * b)
                .sum();
            let mut grads = params.zeros_like();
            let dh = gat_backward(
                params,
                0,
                0.2,
                &self.graph,
                &cache,
                &self.weights,
                &mut grads,
            )?;
            *grads.get_mut(INPUT)? = dh;
            Ok((loss, grads))
        }
    }

    struct PoolProbe {
        weights: Vec<f64>,
    }

    impl Objective for PoolProbe {
        type Error = ModelError;

        fn loss(&self, params: &ParamStore) -> Result<f64, ModelError> {
            let out = pool_graph(params, params.get(INPUT)?)?;
            Ok(out.iter().zip(&self.weights).map(|(a, b)| a * b).sum())
        }

        fn loss_and_grad(&self, params: &ParamStore) -> Result<(f64, ParamStore), ModelError> {
            let input = params.get(INPUT)?;
            let cache = pool_forward(params, input)?;
            let loss = cache
                .out
                .iter()
                .zip(&self.weights)
                .map(|(a, b)| a * b)
                .sum();
            let mut grads = params.zeros_like();
            let dh = pool_backward(params, input, &cache, &self.weights, &mut grads)?;
            *grads.get_mut(INPUT)? = dh;
            Ok((loss, grads))
        }
    }

    /// Within one linear region of the leaky ReLU, the receiver term shifts
    /// all of a node's scores equally and the softmax cancels it, so some
    /// `w_recv` entries have an exact zero gradient. Their central difference
    /// is then a few units of `ulp(loss) / (2·eps)` of pure roundoff.
    fn receiver_shift_zero(e: &GradEntry, loss: f64) -> bool {
        let quantum = f64::EPSILON * loss.abs().max(1.0) / 2e-5;
        e.analytic.abs() < 1e-14 && e.numeric.abs() <= 4.0 * quantum
    }

    #[test]
    fn attention_layer_gradient_on_four_node_graphs() {
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = 5;
            let graph = random_graph(&mut rng);
            let params = layer_params(&mut rng, d);
            let probe = LayerProbe {
                graph,
                weights: random_tensor(&mut rng, &[4, d]),
            };
            let loss = probe.loss(&params).unwrap();
            for e in grad_entries(&probe, &params, 1e-5).unwrap() {
                let ok = e.rel_error() < 1e-4
                    || (e.name.ends_with("w_recv") && receiver_shift_zero(&e, loss));
                assert!(ok, "seed {seed}: {e:?}");
            }
        }
    }

    #[test]
    fn pooling_gradient() {
        for seed in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = 5;
            let mut params = ParamStore::new();
            params.insert(names::GATE_W, random_tensor(&mut rng, &[d]));
            params.insert(names::GATE_B, random_tensor(&mut rng, &[1]));
            params.insert(names::PROJ, random_tensor(&mut rng, &[d, d]));
            params.insert(INPUT, random_tensor(&mut rng, &[4, d]));
            let probe = PoolProbe {
                weights: random_tensor(&mut rng, &[d]).data().to_vec(),
            };
            let report = grad_check(&probe, &params, 1e-5).unwrap();
            assert!(
                report.max_rel_error < 1e-4,
                "seed {seed}: {:?}",
                report.worst
            );
        }
    }
}
