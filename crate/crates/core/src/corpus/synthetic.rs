//! Template-based generator of documented Java methods.
//!
//! Every record combines a verb, a domain noun and a storage context. The
//! docstring names all three, and the code spells them out in the method
//! name, types, variables and callees, so queries and code share subtokens.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::CodePair;

const VERBS: &[(&str, &str)] = &[
    ("load", "Loads"),
    ("save", "Saves"),
    ("find", "Finds"),
    ("count", "Counts"),
    ("remove", "Removes"),
    ("update", "Updates"),
    ("validate", "Validates"),
    ("parse", "Parses"),
    ("render", "Renders"),
    ("merge", "Merges"),
    ("sort", "Sorts"),
    ("filter", "Filters"),
    ("fetch", "Fetches"),
    ("encode", "Encodes"),
    ("decode", "Decodes"),
    ("compress", "Compresses"),
    ("archive", "Archives"),
    ("publish", "Publishes"),
    ("register", "Registers"),
    ("schedule", "Schedules"),
];

const NOUNS: &[&str] = &[
    "customer", "order", "invoice", "product", "account", "session", "message", "token", "record",
    "event", "payment", "user", "file", "report", "image", "document", "ticket", "route", "metric",
    "score",
];

/// (variable name, package); the type is the capitalized name.
const CONTEXTS: &[(&str, &str)] = &[
    ("cache", "com.acme.store"),
    ("database", "com.acme.db"),
    ("queue", "com.acme.messaging"),
    ("buffer", "com.acme.io"),
    ("registry", "com.acme.core"),
    ("stream", "com.acme.io"),
    ("ledger", "com.acme.finance"),
    ("index", "com.acme.search"),
    ("catalog", "com.acme.store"),
    ("server", "com.acme.net"),
];

const ACCESSORS: &[&str] = &["get", "lookup", "read", "take", "open", "resolve"];
const PREPOSITIONS: &[&str] = &["in", "from", "with", "using"];

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

struct Template<'a> {
    verb: &'a str,
    verb_third: &'a str,
    noun: &'a str,
    ctx: &'a str,
    ctx_pkg: &'a str,
}

struct Writer {
    imports: Vec<String>,
    lines: Vec<String>,
}

impl Writer {
    fn import(&mut self, path: String) {
        if !self.imports.contains(&path) {
            self.imports.push(path);
        }
    }

    fn line(&mut self, depth: usize, text: impl AsRef<str>) {
        self.lines
            .push(format!("{}{}", "    ".repeat(depth), text.as_ref()));
    }
}

fn render(template: &Template<'_>, rng: &mut ChaCha8Rng) -> (String, String) {
    let Template {
        verb,
        verb_third,
        noun,
        ctx,
        ctx_pkg,
    } = *template;
    let noun_ty = capitalize(noun);
    let ctx_ty = capitalize(ctx);
    let accessor = ACCESSORS[rng.gen_range(0..ACCESSORS.len())];

    let mut w = Writer {
        imports: Vec::new(),
        lines: Vec::new(),
    };
    w.import(format!("com.acme.model.{noun_ty}"));
    w.import(format!("{ctx_pkg}.{ctx_ty}"));

    let mut params = vec![format!("{ctx_ty} {ctx}")];
    let key_param = match rng.gen_range(0..3) {
        0 => None,
        1 => {
            params.push("String key".to_string());
            Some("key")
        }
        _ => {
            params.push("long id".to_string());
            Some("id")
        }
    };
    let with_limit = rng.gen_bool(0.5);
    if with_limit {
        params.push("int limit".to_string());
    }

    let returns = ["void", "boolean", "int", "entity"][rng.gen_range(0..4)];
    let ret_ty = match returns {
        "entity" => noun_ty.clone(),
        other => other.to_string(),
    };

    let body = 1;
    w.line(
        body,
        format!(
            "{noun_ty} {noun} = {ctx}.{accessor}{noun_ty}({});",
            key_param.unwrap_or("")
        ),
    );

    let mut extras = vec![0, 1, 2, 3, 4];
    extras.shuffle(rng);
    extras.truncate(rng.gen_range(0..=3));
    extras.sort_unstable();
    let mut has_total = false;
    for extra in extras {
        match extra {
            0 => {
                w.line(body, format!("if ({noun} == null) {{"));
                let early = match returns {
                    "void" => "return;".to_string(),
                    "boolean" => "return false;".to_string(),
                    "int" => "return 0;".to_string(),
                    _ => "return null;".to_string(),
                };
                w.line(body + 1, early);
                w.line(body, "}");
            }
            1 => {
                w.line(body, format!("{noun}.{verb}();"));
            }
            2 => {
                let bound = if with_limit { "limit" } else { "3" };
                w.line(body, format!("for (int i = 0; i < {bound}; i++) {{"));
                w.line(body + 1, format!("{ctx}.{verb}({noun});"));
                w.line(body, "}");
            }
            3 => {
                w.import("java.io.IOException".to_string());
                w.line(body, "try {");
                w.line(body + 1, format!("{ctx}.{verb}{noun_ty}({noun});"));
                w.line(body, "} catch (IOException error) {");
                w.line(body + 1, "log(error);");
                w.line(body, "}");
            }
            _ => {
                has_total = true;
                w.line(body, "int total = 0;");
                let bound = if with_limit { "limit" } else { "10" };
                w.line(body, format!("while (total < {bound}) {{"));
                w.line(body + 1, format!("total = total + {noun}.weight();"));
                w.line(body, "}");
            }
        }
    }

    match returns {
        "void" => {
            w.line(body, format!("{verb}{noun_ty}Internal({noun}, {ctx});"));
        }
        "boolean" => {
            w.line(
                body,
                format!("return {noun} != null && {ctx}.contains({noun});"),
            );
        }
        "int" => {
            if has_total {
                w.line(body, format!("return total + {ctx}.size();"));
            } else {
                w.line(body, format!("int size = {ctx}.size();"));
                w.line(body, "return size;");
            }
        }
        _ => {
            w.line(body, format!("return {noun};"));
        }
    }

    let mut code = String::new();
    for import in &w.imports {
        code.push_str(&format!("import {import};\n"));
    }
    code.push('\n');
    code.push_str(&format!(
        "public {ret_ty} {verb}{noun_ty}({}) {{\n",
        params.join(", ")
    ));
    for line in &w.lines {
        code.push_str(line);
        code.push('\n');
    }
    code.push_str("}\n");

    let prep = PREPOSITIONS[rng.gen_range(0..PREPOSITIONS.len())];
    let summary = match rng.gen_range(0..4) {
        0 => format!("{verb_third} the {noun} {prep} the {ctx}."),
        1 => format!("{verb_third} the {noun} {prep} the given {ctx}."),
        2 => format!("{verb_third} a <b>{noun}</b> {prep} the {ctx}."),
        _ => format!("{verb_third} every {noun} held {prep} the {ctx}."),
    };
    let mut doc = summary;
    if rng.gen_bool(0.3) {
        doc.push_str(" Callers must hold the lock.");
    }
    if rng.gen_bool(0.3) {
        doc.push_str(&format!("\n\nSee {{@link {ctx_ty}}} for details."));
    }
    doc.push_str(&format!("\n@param {ctx} the {ctx} to use"));
    if returns != "void" {
        doc.push_str("\n@return the result");
    }

    (code, doc)
}

/// Generates `n` documented methods. Deterministic for a given seed; the
/// first `VERBS × NOUNS × CONTEXTS` records use distinct combinations.
pub fn generate_synthetic(n: usize, seed: u64) -> Vec<CodePair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut combos: Vec<(usize, usize, usize)> = (0..VERBS.len())
        .flat_map(|v| {
            (0..NOUNS.len()).flat_map(move |o| (0..CONTEXTS.len()).map(move |c| (v, o, c)))
        })
        .collect();
    combos.shuffle(&mut rng);

    (0..n)
        .map(|i| {
            let (v, o, c) = combos[i % combos.len()];
            let template = Template {
                verb: VERBS[v].0,
                verb_third: VERBS[v].1,
                noun: NOUNS[o],
                ctx: CONTEXTS[c].0,
                ctx_pkg: CONTEXTS[c].1,
            };
            let (code, docstring) = render(&template, &mut rng);
            CodePair {
                id: format!("syn-{:06}", i + 1),
                code,
                docstring,
            }
        })
        .collect()
}
