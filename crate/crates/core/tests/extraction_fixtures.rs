use std::fs;
use std::path::{Path, PathBuf};

use cgsearch::graph::{extract_graph, graph_from_json, graph_to_json, stats, validate};
use cgsearch::syntax::parse_source;

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/extract")
}

fn fixtures() -> Vec<(String, String, String)> {
    let mut out = Vec::new();
    let mut entries: Vec<_> = fs::read_dir(fixture_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "java"))
        .collect();
    entries.sort();
    for java in entries {
        let name = java.file_stem().unwrap().to_string_lossy().into_owned();
        let source = fs::read_to_string(&java).unwrap();
        let expected = fs::read_to_string(java.with_extension("json")).unwrap();
        out.push((name, source, expected.trim_end().to_string()));
    }
    out
}

#[test]
fn fixtures_match_hand_derived_documents() {
    let all = fixtures();
    assert!(all.len() >= 20, "only {} fixtures", all.len());
    for (name, source, expected) in all {
        let snippet = parse_source(&source).unwrap_or_else(|e| panic!("{name}: {e}"));
        let graph = extract_graph(&snippet);
        assert_eq!(graph_to_json(&graph), expected, "fixture {name}");
        assert!(validate(&graph).is_empty(), "fixture {name}");
        assert_eq!(graph_from_json(&expected).unwrap(), graph, "fixture {name}");
    }
}

#[test]
fn sum_sizes_counts() {
    let source = fs::read_to_string(fixture_dir().join("01_sum_sizes.java")).unwrap();
    let g = extract_graph(&parse_source(&source).unwrap());
    let s = stats(&g);
    assert_eq!((s.node_count, s.edge_count), (7, 11));
    assert_eq!(g.nodes[0].name, "sumSizes");
}

#[test]
fn reformatting_does_not_change_graph() {
    let a = "int f(int a){int b=g(a);return b;}";
    let b = "int f( int a )\n{\n  // comment\n  int b = g( a ); /* x */\n  return b;\n}\n";
    assert_eq!(
        extract_graph(&parse_source(a).unwrap()),
        extract_graph(&parse_source(b).unwrap())
    );
}
