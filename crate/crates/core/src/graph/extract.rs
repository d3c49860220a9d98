//! Identifier and relation extraction over the snippet AST.

use std::collections::{BTreeMap, BTreeSet};

use super::{canonicalize, ConceptGraph, Edge, Identifier, NodeKind, RelationKind};
use crate::syntax::{Block, Expr, Snippet, Statement};

/// Declarations and references gathered in one walk over the method.
#[derive(Default)]
struct Facts {
    params: BTreeMap<String, String>,
    // A local name may be redeclared in sibling scopes with different types.
    variables: BTreeMap<String, BTreeSet<String>>,
    callees: BTreeSet<String>,
    referenced: BTreeSet<String>,
}

impl Facts {
    fn collect(snippet: &Snippet) -> Facts {
        let mut facts = Facts::default();
        let method = &snippet.method;
        facts.reference_type(&method.return_type);
        for p in &method.params {
            facts.reference_type(&p.type_name);
            facts.params.insert(p.name.clone(), p.type_name.clone());
        }
        facts.block(&method.body);
        facts
    }

    fn reference_type(&mut self, type_name: &str) {
        self.referenced.insert(base_type(type_name).to_string());
    }

    fn declare(&mut self, name: &str, type_name: &str) {
        self.reference_type(type_name);
        self.variables
            .entry(name.to_string())
            .or_default()
            .insert(type_name.to_string());
    }

    fn block(&mut self, block: &Block) {
        for stmt in &block.statements {
            self.statement(stmt);
        }
    }

    fn statement(&mut self, stmt: &Statement) {
        match stmt {
            Statement::VarDecl {
                type_name,
                name,
                init,
            } => {
                self.declare(name, type_name);
                if let Some(e) = init {
                    self.expr(e);
                }
            }
            Statement::Assign { target, value } => {
                self.referenced.insert(target.clone());
                self.expr(value);
            }
            Statement::Expr(e) => self.expr(e),
            Statement::Return(e) => {
                if let Some(e) = e {
                    self.expr(e);
                }
            }
            Statement::If {
                cond,
                then_block,
                else_block,
            } => {
                self.expr(cond);
                self.block(then_block);
                if let Some(b) = else_block {
                    self.block(b);
                }
            }
            Statement::While { cond, body } => {
                self.expr(cond);
                self.block(body);
            }
            Statement::For {
                init,
                cond,
                update,
                body,
            } => {
                if let Some(s) = init {
                    self.statement(s);
                }
                if let Some(e) = cond {
                    self.expr(e);
                }
                if let Some(s) = update {
                    self.statement(s);
                }
                self.block(body);
            }
            Statement::Try { body, catch } => {
                self.block(body);
                if let Some(c) = catch {
                    self.declare(&c.name, &c.type_name);
                    self.block(&c.body);
                }
            }
        }
    }

    fn expr(&mut self, expr: &Expr) {
        match expr {
            Expr::Name(n) => {
                self.referenced.insert(n.clone());
            }
            Expr::Literal(_) | Expr::This | Expr::Super => {}
            Expr::Call {
                receiver,
                callee,
                args,
            } => {
                self.callees.insert(callee.clone());
                if let Some(r) = receiver {
                    self.expr(r);
                }
                args.iter().for_each(|a| self.expr(a));
            }
            Expr::New { type_name, args } => {
                self.reference_type(type_name);
                self.callees.insert(base_type(type_name).to_string());
                args.iter().for_each(|a| self.expr(a));
            }
            Expr::FieldAccess { receiver, .. } => self.expr(receiver),
            Expr::Binary { left, right, .. } => {
                self.expr(left);
                self.expr(right);
            }
            Expr::Unary { operand, .. } => self.expr(operand),
        }
    }

    /// A name used as a value refers to a local variable first, then to a
    /// parameter; anything else (fields, classes) is outside the graph.
    fn resolve(&self, name: &str) -> Option<Identifier> {
        if self.variables.contains_key(name) {
            Some(Identifier::new(name, NodeKind::Variable))
        } else if self.params.contains_key(name) {
            Some(Identifier::new(name, NodeKind::Parameter))
        } else {
            None
        }
    }
}

fn base_type(type_name: &str) -> &str {
    type_name.trim_end_matches("[]")
}

/// The head of a receiver chain: `a.b.c` → `a`, `this.x.y` → `x`.
fn chain_head(expr: &Expr) -> Option<&str> {
    match expr {
        Expr::Name(n) => Some(n),
        Expr::FieldAccess { receiver, field } => match receiver.as_ref() {
            Expr::This | Expr::Super => Some(field),
            other => chain_head(other),
        },
        _ => None,
    }
}

/// Names an expression reads directly, i.e. outside any call or constructor
/// (those claim their receivers and arguments).
fn free_names<'e>(expr: &'e Expr, out: &mut Vec<&'e str>) {
    match expr {
        Expr::Name(n) => out.push(n),
        Expr::FieldAccess { .. } => {
            if let Some(h) = chain_head(expr) {
                out.push(h);
            }
        }
        Expr::Binary { left, right, .. } => {
            free_names(left, out);
            free_names(right, out);
        }
        Expr::Unary { operand, .. } => free_names(operand, out),
        Expr::Call { .. } | Expr::New { .. } | Expr::Literal(_) | Expr::This | Expr::Super => {}
    }
}

/// Every callee name in the subtree, at any depth.
fn callees_in<'e>(expr: &'e Expr, out: &mut Vec<&'e str>) {
    match expr {
        Expr::Call {
            receiver,
            callee,
            args,
        } => {
            out.push(callee);
            if let Some(r) = receiver {
                callees_in(r, out);
            }
            args.iter().for_each(|a| callees_in(a, out));
        }
        Expr::New { type_name, args } => {
            out.push(base_type(type_name));
            args.iter().for_each(|a| callees_in(a, out));
        }
        Expr::FieldAccess { receiver, .. } => callees_in(receiver, out),
        Expr::Binary { left, right, .. } => {
            callees_in(left, out);
            callees_in(right, out);
        }
        Expr::Unary { operand, .. } => callees_in(operand, out),
        Expr::Name(_) | Expr::Literal(_) | Expr::This | Expr::Super => {}
    }
}

struct GraphBuilder<'f> {
    facts: &'f Facts,
    ids: BTreeMap<Identifier, usize>,
    nodes: Vec<Identifier>,
    edges: BTreeSet<Edge>,
}

impl<'f> GraphBuilder<'f> {
    fn new(facts: &'f Facts, nodes: Vec<Identifier>) -> Self {
        let ids = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        GraphBuilder {
            facts,
            ids,
            nodes,
            edges: BTreeSet::new(),
        }
    }

    fn link(&mut self, src: &Identifier, kind: RelationKind, dst: &Identifier) {
        if let (Some(&s), Some(&d)) = (self.ids.get(src), self.ids.get(dst)) {
            if s != d {
                self.edges.insert(Edge::new(s, kind, d));
            }
        }
    }

    fn block(&mut self, block: &Block) {
        for stmt in &block.statements {
            self.statement(stmt);
        }
    }

    fn statement(&mut self, stmt: &Statement) {
        match stmt {
            Statement::VarDecl { name, init, .. } => {
                if let Some(e) = init {
                    self.data_flow(&Identifier::new(name.clone(), NodeKind::Variable), e);
                    self.expr(e);
                }
            }
            Statement::Assign { target, value } => {
                if self.facts.variables.contains_key(target) {
                    self.data_flow(&Identifier::new(target.clone(), NodeKind::Variable), value);
                }
                self.expr(value);
            }
            Statement::Expr(e) => self.expr(e),
            Statement::Return(e) => {
                if let Some(e) = e {
                    self.expr(e);
                }
            }
            Statement::If {
                cond,
                then_block,
                else_block,
            } => {
                self.expr(cond);
                self.block(then_block);
                if let Some(b) = else_block {
                    self.block(b);
                }
            }
            Statement::While { cond, body } => {
                self.expr(cond);
                self.block(body);
            }
            Statement::For {
                init,
                cond,
                update,
                body,
            } => {
                if let Some(s) = init {
                    self.statement(s);
                }
                if let Some(e) = cond {
                    self.expr(e);
                }
                if let Some(s) = update {
                    self.statement(s);
                }
                self.block(body);
            }
            Statement::Try { body, catch } => {
                self.block(body);
                if let Some(c) = catch {
                    self.block(&c.body);
                }
            }
        }
    }

    /// `calls` and `reads` edges from a variable to what its value depends on.
    fn data_flow(&mut self, target: &Identifier, value: &Expr) {
        let mut callees = Vec::new();
        callees_in(value, &mut callees);
        for callee in callees {
            self.link(
                target,
                RelationKind::Calls,
                &Identifier::new(callee, NodeKind::Call),
            );
        }
        let mut names = Vec::new();
        free_names(value, &mut names);
        for name in names {
            if let Some(source) = self.facts.resolve(name) {
                self.link(target, RelationKind::Reads, &source);
            }
        }
    }

    /// `receives` and `takesArgument` edges for every call in the expression.
    fn expr(&mut self, expr: &Expr) {
        match expr {
            Expr::Call {
                receiver,
                callee,
                args,
            } => {
                let call = Identifier::new(callee.clone(), NodeKind::Call);
                if let Some(r) = receiver {
                    if let Some(head) = chain_head(r).and_then(|h| self.facts.resolve(h)) {
                        self.link(&call, RelationKind::Receives, &head);
                    }
                    self.expr(r);
                }
                self.arguments(&call, args);
            }
            Expr::New { type_name, args } => {
                let call = Identifier::new(base_type(type_name), NodeKind::Call);
                self.arguments(&call, args);
            }
            Expr::FieldAccess { receiver, .. } => self.expr(receiver),
            Expr::Binary { left, right, .. } => {
                self.expr(left);
                self.expr(right);
            }
            Expr::Unary { operand, .. } => self.expr(operand),
            Expr::Name(_) | Expr::Literal(_) | Expr::This | Expr::Super => {}
        }
    }

    fn arguments(&mut self, call: &Identifier, args: &[Expr]) {
        for arg in args {
            let mut names = Vec::new();
            free_names(arg, &mut names);
            for name in names {
                if let Some(id) = self.facts.resolve(name) {
                    self.link(call, RelationKind::TakesArgument, &id);
                }
            }
            self.expr(arg);
        }
    }
}

fn identifiers(snippet: &Snippet, facts: &Facts) -> Vec<Identifier> {
    let mut set = BTreeSet::new();
    set.insert(Identifier::new(
        snippet.method.name.clone(),
        NodeKind::MethodName,
    ));
    for name in facts.params.keys() {
        set.insert(Identifier::new(name.clone(), NodeKind::Parameter));
    }
    for import in &snippet.imports {
        let simple = import.simple_name();
        if facts.referenced.contains(simple) {
            set.insert(Identifier::new(simple, NodeKind::Import));
        }
    }
    for name in facts.variables.keys() {
        set.insert(Identifier::new(name.clone(), NodeKind::Variable));
    }
    for callee in &facts.callees {
        set.insert(Identifier::new(callee.clone(), NodeKind::Call));
    }
    let mut ids: Vec<_> = set.into_iter().collect();
    ids.sort_by(|a, b| (a.kind, &a.name).cmp(&(b.kind, &b.name)));
    ids
}

/// The deduplicated identifiers of a snippet, in canonical node order.
/// Imports that the method never mentions are left out.
pub fn extract_identifiers(snippet: &Snippet) -> Vec<Identifier> {
    identifiers(snippet, &Facts::collect(snippet))
}

/// Builds the canonical concept graph of a snippet.
pub fn extract_graph(snippet: &Snippet) -> ConceptGraph {
    let facts = Facts::collect(snippet);
    let nodes = identifiers(snippet, &facts);
    let mut b = GraphBuilder::new(&facts, nodes);

    let method = Identifier::new(snippet.method.name.clone(), NodeKind::MethodName);
    let node_list = b.nodes.clone();
    for node in &node_list {
        let kind = match node.kind {
            NodeKind::MethodName => continue,
            NodeKind::Parameter => RelationKind::HasParameter,
            NodeKind::Import => RelationKind::DependsOn,
            NodeKind::Variable => RelationKind::Defines,
            NodeKind::Call => RelationKind::Invokes,
        };
        b.link(&method, kind, node);
    }

    let imports: BTreeSet<&str> = node_list
        .iter()
        .filter(|n| n.kind == NodeKind::Import)
        .map(|n| n.name.as_str())
        .collect();
    for (name, ty) in &facts.params {
        if imports.contains(base_type(ty)) {
            b.link(
                &Identifier::new(name.clone(), NodeKind::Parameter),
                RelationKind::OfType,
                &Identifier::new(base_type(ty), NodeKind::Import),
            );
        }
    }
    for (name, types) in &facts.variables {
        for ty in types {
            if imports.contains(base_type(ty)) {
                b.link(
                    &Identifier::new(name.clone(), NodeKind::Variable),
                    RelationKind::OfType,
                    &Identifier::new(base_type(ty), NodeKind::Import),
                );
            }
        }
    }

    b.block(&snippet.method.body);

    let graph = ConceptGraph::new(b.nodes, b.edges.into_iter().collect());
    canonicalize(&graph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{stats, validate};
    use crate::syntax::parse_source;

    fn graph(src: &str) -> ConceptGraph {
        extract_graph(&parse_source(src).unwrap())
    }

    fn edge_names(g: &ConceptGraph) -> Vec<String> {
        g.edges
            .iter()
            .map(|e| {
                format!(
                    "{}({}→{})",
                    e.kind, g.nodes[e.src].name, g.nodes[e.dst].name
                )
            })
            .collect()
    }

    #[test]
    fn empty_method() {
        let s = parse_source("void f() {}").unwrap();
        assert_eq!(
            extract_identifiers(&s),
            vec![Identifier::new("f", NodeKind::MethodName)]
        );
        let g = extract_graph(&s);
        assert_eq!((g.node_count(), g.edge_count()), (1, 0));
    }

    #[test]
    fn returned_parameter() {
        let g = graph("int h(int a){ return a; }");
        assert_eq!(g.node_count(), 2);
        assert_eq!(edge_names(&g), vec!["hasParameter(h→a)"]);
    }

    #[test]
    fn unreferenced_import_excluded() {
        let s = parse_source("import java.io.File; void f() { int x = 1; }").unwrap();
        assert!(extract_identifiers(&s)
            .iter()
            .all(|i| i.kind != NodeKind::Import));
    }

    #[test]
    fn sum_sizes() {
        let g = graph(
            "import java.util.List;
             public int sumSizes(List<String> items, int offset) {
                 int total = offset;
                 int n = items.size();
                 total = total + n;
                 return total;
             }",
        );
        assert_eq!(stats(&g).node_count, 7);
        assert_eq!(
            g.nodes[0],
            Identifier::new("sumSizes", NodeKind::MethodName)
        );
        let mut edges = edge_names(&g);
        edges.sort();
        let mut expected = vec![
            "hasParameter(sumSizes→items)",
            "hasParameter(sumSizes→offset)",
            "defines(sumSizes→total)",
            "defines(sumSizes→n)",
            "dependsOn(sumSizes→List)",
            "ofType(items→List)",
            "invokes(sumSizes→size)",
            "receives(size→items)",
            "calls(n→size)",
            "reads(total→offset)",
            "reads(total→n)",
        ];
        expected.sort();
        assert_eq!(edges, expected);
        assert!(validate(&g).is_empty());
    }

    #[test]
    fn nested_call_arguments_claimed_by_inner_call() {
        let g = graph("void f(int a, int b) { int r = outer(a + inner(b)); }");
        let edges = edge_names(&g);
        assert!(edges.contains(&"takesArgument(outer→a)".to_string()));
        assert!(edges.contains(&"takesArgument(inner→b)".to_string()));
        assert!(!edges.contains(&"takesArgument(outer→b)".to_string()));
        assert!(edges.contains(&"calls(r→inner)".to_string()));
        assert!(edges.contains(&"calls(r→outer)".to_string()));
        assert!(!edges.iter().any(|e| e.starts_with("reads")));
    }

    #[test]
    fn this_receiver_dropped() {
        let g = graph("void f(Conn conn) { this.conn.close(); super.reset(); }");
        let edges = edge_names(&g);
        assert!(edges.contains(&"receives(close→conn)".to_string()));
        assert!(g
            .nodes
            .iter()
            .all(|n| n.name != "this" && n.name != "super"));
    }

    #[test]
    fn self_loops_dropped() {
        let g = graph("void f() { int x = 0; x = x + 1; }");
        assert_eq!(edge_names(&g), vec!["defines(f→x)"]);
    }

    #[test]
    fn same_name_parameter_and_variable() {
        let g = graph("void f(int v) { int w = v; for (int v2 = 0; v2 < w; v2++) { } }");
        assert!(validate(&g).is_empty());
        let g = graph("int f(int v) { return v; }");
        assert_eq!(g.find("v", NodeKind::Parameter), Some(1));
    }
}
