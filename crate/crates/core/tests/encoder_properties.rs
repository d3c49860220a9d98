use cgsearch::corpus::{build_triplets, generate_synthetic, CodePair, Triplet};
use cgsearch::graph::{ConceptGraph, Edge};
use cgsearch::model::{
    batch_loss, fuse, gat_layer, init_node_features, names, pool_graph, BatchObjective, Example,
    GraphInput, Head, Model, ModelConfig, Vocab,
};
use cgsearch::nn::{grad_entries, Tensor};
use proptest::prelude::*;

fn synthetic(n: usize, seed: u64) -> Vec<Triplet> {
    build_triplets(&generate_synthetic(n, seed)).0
}

fn model_for(triplets: &[Triplet], config: ModelConfig) -> Model {
    Model::new(config, Vocab::build(triplets, 1).unwrap()).unwrap()
}

fn small_triplets() -> Vec<Triplet> {
    let pair = |id: &str, code: &str, doc: &str| CodePair {
        id: id.into(),
        code: code.into(),
        docstring: doc.into(),
    };
    build_triplets(&[
        pair(
            "a",
            "import java.util.List;\nint count(List items) { int n = items.size(); return n; }",
            "Counts the items.",
        ),
        pair(
            "b",
            "void reset(Buffer buf) { buf.clear(); }",
            "Resets a buffer.",
        ),
        pair(
            "c",
            "boolean has(Map map, String key) { return map.containsKey(key); }",
            "Checks for a key.",
        ),
    ])
    .0
}

/// Central differences of a loss near 1 are quantized in steps of
/// ulp(1)/(2·eps) ≈ 1.1e-11, so entries are compared with an absolute floor
/// of 1e-9 (about a hundred such steps) on top of the 1e-4 relative bound.
#[test]
fn full_model_gradient_matches_central_differences() {
    let triplets = small_triplets();
    assert_eq!(triplets.len(), 3);
    let model = model_for(&triplets, ModelConfig::default());
    let examples: Vec<Example> = triplets.iter().map(|t| model.example(t)).collect();
    for use_graph in [true, false] {
        let obj = BatchObjective {
            config: &model.config,
            batch: examples.iter().collect(),
            use_graph,
        };
        let entries = grad_entries(&obj, &model.params, 1e-5).unwrap();
        assert_eq!(entries.len(), model.params.num_entries());
        for e in &entries {
            let bound = 1e-4 * (e.analytic.abs() + e.numeric.abs()) + 1e-9;
            assert!((e.analytic - e.numeric).abs() <= bound, "{e:?}");
        }
        if !use_graph {
            let unused = entries
                .iter()
                .filter(|e| e.name.starts_with("gat.") || e.name.starts_with("pool."));
            assert!(unused.clone().count() > 0);
            for e in unused {
                assert_eq!((e.analytic, e.numeric), (0.0, 0.0));
            }
        }
    }
}

/// Each example carries a single distinct token whose embedding is a unit
/// basis vector, and both heads are identity maps, so every query equals its
/// own candidate and candidates are mutually orthogonal.
#[test]
fn loss_closed_form_for_orthogonal_candidates() {
    let b = 4;
    let d = 6;
    let tokens: Vec<String> = ["<pad>", "<unk>", "t0", "t1", "t2", "t3"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let config = ModelConfig {
        embed_dim: d,
        gat_layers: 1,
        ..Default::default()
    };
    let tau = config.temperature;
    let mut model = Model::new(config, Vocab::from_tokens(tokens).unwrap()).unwrap();
    let table = model.params.get_mut(names::SUBTOKEN).unwrap();
    for r in 0..table.rows() {
        for c in 0..d {
            table.row_mut(r)[c] = if r == c { 1.0 } else { 0.0 };
        }
    }
    for head in [Head::Query, Head::Code] {
        *model.params.get_mut(&names::head(head, "l1.w")).unwrap() = Tensor::identity(d);
        *model.params.get_mut(&names::head(head, "l2.w")).unwrap() = Tensor::identity(d);
        for bias in ["l1.b", "l2.b"] {
            *model.params.get_mut(&names::head(head, bias)).unwrap() = Tensor::zeros(&[d]);
        }
    }
    let graph = GraphInput::new(&synthetic(1, 0)[0].graph, &model.vocab);
    let examples: Vec<Example> = (0..b)
        .map(|i| Example {
            query: vec![i + 2],
            code: vec![i + 2],
            graph: graph.clone(),
        })
        .collect();
    let batch: Vec<&Example> = examples.iter().collect();
    let out = batch_loss(&model.params, &model.config, &batch, false).unwrap();
    let e = (1.0 / tau).exp();
    let expected = -(e / (e + (b as f64 - 1.0))).ln();
    assert!(
        (out.loss - expected).abs() < 1e-12,
        "{} vs {expected}",
        out.loss
    );

    // Identical examples make every similarity equal.
    let same: Vec<&Example> = vec![&examples[0]; b];
    let out = batch_loss(&model.params, &model.config, &same, false).unwrap();
    assert!((out.loss - (b as f64).ln()).abs() < 1e-12);
}

#[test]
fn fuse_laws() {
    assert_eq!(fuse(&[1.0, 2.0], &[0.0, 0.0]).unwrap(), vec![1.0, 2.0]);
    assert_eq!(fuse(&[1.0, 1.0], &[2.0, 3.0]).unwrap(), vec![3.0, 4.0]);
    assert!(fuse(&[1.0], &[1.0, 2.0]).is_err());
}

#[test]
fn nograph_candidate_is_code_head_output() {
    let triplets = synthetic(4, 9);
    let model = model_for(&triplets, ModelConfig::default());
    let ex = model.example(&triplets[0]);
    let code = cgsearch::model::encode_text(&model.params, Head::Code, &ex.code).unwrap();
    assert_eq!(model.candidate_vector(&ex, false).unwrap(), code);
    let zero = vec![0.0; code.len()];
    assert_eq!(fuse(&code, &zero).unwrap(), code);
}

#[test]
fn single_node_graph_attends_to_itself() {
    let triplets = synthetic(3, 2);
    let model = model_for(&triplets, ModelConfig::default());
    let mut graph = triplets[0].graph.clone();
    graph.nodes.truncate(1);
    graph.edges.clear();
    let input = GraphInput::new(&graph, &model.vocab);
    let h = init_node_features(&model.params, &input).unwrap();
    let (out, alpha) = gat_layer(&model.params, 0, 0.2, &input, &h).unwrap();
    assert_eq!(alpha, vec![1.0]);
    assert_eq!(out.rows(), 1);
    let ex = Example {
        query: vec![1],
        code: vec![1],
        graph: input,
    };
    assert!(model
        .candidate_vector(&ex, true)
        .unwrap()
        .iter()
        .all(|v| v.is_finite()));
}

#[test]
fn node_features_differ_by_kind_embedding() {
    let triplets = synthetic(3, 2);
    let model = model_for(&triplets, ModelConfig::default());
    let g = &triplets[0].graph;
    assert_eq!(
        init_node_features(&model.params, &GraphInput::new(g, &model.vocab))
            .unwrap()
            .rows(),
        g.nodes.len()
    );

    let mut twin = ConceptGraph {
        nodes: vec![g.nodes[0].clone(), g.nodes[0].clone()],
        edges: vec![],
    };
    let (ka, kb) = (
        cgsearch::graph::NodeKind::Parameter,
        cgsearch::graph::NodeKind::Call,
    );
    twin.nodes[0].kind = ka;
    twin.nodes[1].kind = kb;
    let h = init_node_features(&model.params, &GraphInput::new(&twin, &model.vocab)).unwrap();
    let kinds = model.params.get(names::KIND).unwrap();
    for c in 0..h.cols() {
        let diff = h.row(0)[c] - h.row(1)[c];
        let expected = kinds.row(ka.index())[c] - kinds.row(kb.index())[c];
        assert!((diff - expected).abs() < 1e-15);
    }
}

fn permuted(graph: &ConceptGraph, perm: &[usize]) -> ConceptGraph {
    // perm[old] = new
    let mut nodes = graph.nodes.clone();
    for (old, node) in graph.nodes.iter().enumerate() {
        nodes[perm[old]] = node.clone();
    }
    let edges = graph
        .edges
        .iter()
        .map(|e| Edge {
            src: perm[e.src],
            kind: e.kind,
            dst: perm[e.dst],
        })
        .collect();
    ConceptGraph { nodes, edges }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn attention_weights_normalized(seed in 0u64..500) {
        let triplets = synthetic(6, seed);
        let model = model_for(&triplets, ModelConfig { seed, ..Default::default() });
        for t in &triplets {
            let input = GraphInput::new(&t.graph, &model.vocab);
            let mut h = init_node_features(&model.params, &input).unwrap();
            for layer in 0..model.config.gat_layers {
                let (next, alpha) = gat_layer(&model.params, layer, 0.2, &input, &h).unwrap();
                for incoming in &input.incoming {
                    let total: f64 = incoming.iter().map(|&m| alpha[m]).sum();
                    prop_assert!((total - 1.0).abs() < 1e-12);
                }
                h = next;
            }
        }
    }

    #[test]
    fn renumbering_nodes_permutes_rows_and_preserves_pooling(
        seed in 0u64..500,
        shuffle_seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let triplets = synthetic(2, seed);
        let model = model_for(&triplets, ModelConfig { seed, ..Default::default() });
        let graph = &triplets[0].graph;
        let mut perm: Vec<usize> = (0..graph.nodes.len()).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(shuffle_seed));
        let other = permuted(graph, &perm);

        let run = |g: &ConceptGraph| {
            let input = GraphInput::new(g, &model.vocab);
            let mut h = init_node_features(&model.params, &input).unwrap();
            for layer in 0..model.config.gat_layers {
                h = gat_layer(&model.params, layer, 0.2, &input, &h).unwrap().0;
            }
            let pooled = pool_graph(&model.params, &h).unwrap();
            (h, pooled)
        };
        let (h, pooled) = run(graph);
        let (h2, pooled2) = run(&other);
        for (old, &new) in perm.iter().enumerate() {
            for (a, b) in h.row(old).iter().zip(h2.row(new)) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }
        for (a, b) in pooled.iter().zip(&pooled2) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn fuse_commutes(a in prop::collection::vec(-1e3f64..1e3, 1..16)) {
        let b: Vec<f64> = a.iter().rev().copied().collect();
        prop_assert_eq!(fuse(&a, &b).unwrap(), fuse(&b, &a).unwrap());
        prop_assert_eq!(fuse(&a, &vec![0.0; a.len()]).unwrap(), a);
    }

    #[test]
    fn text_encoding_ignores_token_order(seed in 0u64..200) {
        let triplets = synthetic(4, seed);
        let model = model_for(&triplets, ModelConfig::default());
        let mut ids = model.example(&triplets[0]).query;
        let a = cgsearch::model::encode_text(&model.params, Head::Query, &ids).unwrap();
        ids.reverse();
        let b = cgsearch::model::encode_text(&model.params, Head::Query, &ids).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn pool_single_row_definition() {
    let triplets = synthetic(2, 0);
    let model = model_for(&triplets, ModelConfig::default());
    let h = Tensor::matrix(1, 32, (0..32).map(|i| (i as f64 - 16.0) / 40.0).collect()).unwrap();
    let w = model.params.get(names::GATE_W).unwrap().data();
    let b = model.params.get(names::GATE_B).unwrap().data()[0];
    let s: f64 = w.iter().zip(h.row(0)).map(|(a, x)| a * x).sum::<f64>() + b;
    let g = 1.0 / (1.0 + (-s).exp());
    let proj = cgsearch::nn::ops::matvec(model.params.get(names::PROJ).unwrap(), h.row(0)).unwrap();
    let pooled = pool_graph(&model.params, &h).unwrap();
    for (p, q) in pooled.iter().zip(&proj) {
        assert!((p - g * q).abs() < 1e-15);
    }
}
