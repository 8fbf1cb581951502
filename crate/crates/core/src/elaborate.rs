//! From syntax to a resolved pattern library.
//!
//! Elaboration groups template clauses, computes the sequential parameter
//! environments, scopes local sub-patterns, resolves pattern references and
//! rejects recursion that is not guarded by a shrinking list argument.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use thiserror::Error;

use crate::diag::{Diagnostic, SourcePos};
use crate::model::{Axiom, FlatOntology, ModelError, NameTerm, Symbol, SymbolKind};
use crate::syntax::ast::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElabError {
    #[error("unknown pattern or ontology '{name}'")]
    UnknownReference { name: String, pos: SourcePos },
    #[error("'{name}' is already defined at {first}")]
    DuplicateDefinition {
        name: String,
        pos: SourcePos,
        first: SourcePos,
    },
    #[error("recursive reference to '{name}' does not pass a list tail, so it may not terminate")]
    IllegalCycle { name: String, pos: SourcePos },
    #[error("'{name}' has parameters and cannot be imported with 'given'")]
    GenericImport { name: String, pos: SourcePos },
    #[error("{source}")]
    Model { source: ModelError, pos: SourcePos },
    #[error("'{name}' stands for a list and cannot be used as a single name here")]
    ListInNamePosition { name: NameTerm, pos: SourcePos },
}

impl ElabError {
    pub fn pos(&self) -> &SourcePos {
        match self {
            ElabError::UnknownReference { pos, .. }
            | ElabError::DuplicateDefinition { pos, .. }
            | ElabError::IllegalCycle { pos, .. }
            | ElabError::GenericImport { pos, .. }
            | ElabError::Model { pos, .. }
            | ElabError::ListInNamePosition { pos, .. } => pos,
        }
    }

    pub fn to_diagnostic(&self) -> Diagnostic {
        Diagnostic::error(self.pos().clone(), self.to_string())
    }
}

/// Turns frames into a flat ontology. `resolve` rewrites every name occurrence;
/// it may expand a name into several (list splicing), which is only legal in
/// name-list positions.
pub fn lower_frames(
    frames: &[FrameAst],
    resolve: &mut dyn FnMut(&NameTerm) -> Vec<NameTerm>,
) -> Result<FlatOntology, ElabError> {
    let mut o = FlatOntology::new();
    for f in frames {
        let pos = f.span.pos().clone();
        let model = |source| ElabError::Model {
            source,
            pos: pos.clone(),
        };
        let mut axioms = Vec::new();
        match &f.body {
            Frame::Class { name, clauses } => {
                let c = single(resolve, name, &pos)?;
                o.declare(Symbol::new(c.clone(), SymbolKind::Class))
                    .map_err(model)?;
                for ClassClause::EquivalentTo(ms) in clauses {
                    let members: Vec<NameTerm> = ms.iter().flat_map(&mut *resolve).collect();
                    if !members.is_empty() {
                        axioms.push(Axiom::EquivalentToUnionOfIndividuals(c.clone(), members));
                    }
                }
            }
            Frame::ObjectProperty { name, clauses } => {
                let p = single(resolve, name, &pos)?;
                o.declare(Symbol::new(p.clone(), SymbolKind::ObjectProperty))
                    .map_err(model)?;
                for c in clauses {
                    match c {
                        PropertyClause::Characteristics(cs) => {
                            for ch in cs {
                                axioms.push(match ch {
                                    Characteristic::Reflexive => Axiom::Reflexive(p.clone()),
                                    Characteristic::Transitive => Axiom::Transitive(p.clone()),
                                });
                            }
                        }
                        PropertyClause::Domain(ns)
                        | PropertyClause::Range(ns)
                        | PropertyClause::SubPropertyOf(ns)
                        | PropertyClause::InverseOf(ns) => {
                            for n in ns.iter().flat_map(&mut *resolve) {
                                let p = p.clone();
                                axioms.push(match c {
                                    PropertyClause::Domain(_) => Axiom::Domain(p, n),
                                    PropertyClause::Range(_) => Axiom::Range(p, n),
                                    PropertyClause::SubPropertyOf(_) => Axiom::SubPropertyOf(p, n),
                                    _ => Axiom::InverseOf(p, n),
                                });
                            }
                        }
                    }
                }
            }
            Frame::Individual { name, clauses } => {
                let i = single(resolve, name, &pos)?;
                o.declare(Symbol::new(i.clone(), SymbolKind::Individual))
                    .map_err(model)?;
                for c in clauses {
                    match c {
                        IndividualClause::Types(ns) => {
                            for n in ns.iter().flat_map(&mut *resolve) {
                                axioms.push(Axiom::ClassAssertion(n, i.clone()));
                            }
                        }
                        IndividualClause::DifferentFrom(ns) => {
                            for n in ns.iter().flat_map(&mut *resolve) {
                                if n != i {
                                    axioms.push(Axiom::DifferentIndividuals(vec![i.clone(), n]));
                                }
                            }
                        }
                        IndividualClause::Facts(fs) => {
                            for (p, obj) in fs {
                                axioms.push(Axiom::PropertyAssertion(
                                    single(resolve, p, &pos)?,
                                    i.clone(),
                                    single(resolve, obj, &pos)?,
                                ));
                            }
                        }
                    }
                }
            }
            Frame::DifferentIndividuals(ns) => {
                let mut members: Vec<NameTerm> = ns.iter().flat_map(&mut *resolve).collect();
                members.sort();
                members.dedup();
                for m in &members {
                    o.declare(Symbol::new(m.clone(), SymbolKind::Individual))
                        .map_err(model)?;
                }
                if members.len() >= 2 {
                    axioms.push(Axiom::DifferentIndividuals(members));
                }
            }
        }
        for a in axioms {
            o.add_axiom(a).map_err(model)?;
        }
    }
    Ok(o)
}

fn single(
    resolve: &mut dyn FnMut(&NameTerm) -> Vec<NameTerm>,
    n: &NameTerm,
    pos: &SourcePos,
) -> Result<NameTerm, ElabError> {
    let mut v = resolve(n);
    if v.len() == 1 {
        Ok(v.pop().unwrap())
    } else {
        Err(ElabError::ListInNamePosition {
            name: n.clone(),
            pos: pos.clone(),
        })
    }
}

fn lower_raw(frames: &[FrameAst]) -> Result<FlatOntology, ElabError> {
    lower_frames(frames, &mut |n| vec![n.clone()])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamShape {
    /// The parameter ontology as written, including references to earlier
    /// parameters.
    Plain(FlatOntology),
    List(ListTemplate),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamSpec {
    pub index: usize,
    pub optional: bool,
    pub shape: ParamShape,
    /// Symbols this parameter adds to the environment of its predecessors.
    pub new_symbols: BTreeSet<Symbol>,
    pub span: Span,
}

impl ParamSpec {
    pub fn shape_name(&self) -> &'static str {
        match (&self.shape, self.optional) {
            (_, true) => "optional",
            (ParamShape::List(_), false) => "list",
            (ParamShape::Plain(_), false) => "plain",
        }
    }

    /// The ontology this parameter contributes to the environment.
    pub fn delta(&self) -> FlatOntology {
        match &self.shape {
            ParamShape::Plain(o) => o.clone(),
            ParamShape::List(_) => {
                FlatOntology::from_parts(self.new_symbols.iter().cloned(), []).expect("heads")
            }
        }
    }

    /// Constraint axioms: the axioms of the parameter ontology.
    pub fn axioms(&self) -> BTreeSet<Axiom> {
        match &self.shape {
            ParamShape::Plain(o) => o.axioms().clone(),
            ParamShape::List(_) => BTreeSet::new(),
        }
    }
}

/// One definition of a pattern. Patterns defined by template matching have
/// several clauses, tried in source order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub params: Vec<ParamSpec>,
    pub imports: Vec<String>,
    import_pos: Vec<SourcePos>,
    /// Local sub-patterns, visible in this clause only.
    pub locals: Vec<PatternDef>,
    pub body: ExprAst,
    /// For local sub-patterns: the full parameter environment of the
    /// enclosing clause. Empty for top-level definitions.
    pub outer_env: FlatOntology,
    pub span: Span,
}

impl Clause {
    pub fn list_positions(&self) -> Vec<usize> {
        self.params
            .iter()
            .filter(|p| matches!(p.shape, ParamShape::List(_)))
            .map(|p| p.index)
            .collect()
    }

    /// Tail variables with the number of heads in front of them.
    fn tail_vars(&self) -> Vec<(String, usize)> {
        self.params
            .iter()
            .filter_map(|p| match &p.shape {
                ParamShape::List(t) => t.tail.clone().map(|v| (v, t.heads.len())),
                _ => None,
            })
            .collect()
    }

    fn bound_names(&self) -> Vec<String> {
        let mut v = Vec::new();
        for p in &self.params {
            match &p.shape {
                ParamShape::Plain(o) => {
                    v.extend(o.signature().iter().filter(|s| s.name.is_plain()).map(|s| s.name.base.clone()))
                }
                ParamShape::List(t) => {
                    v.extend(t.heads.iter().cloned());
                    v.extend(t.tail.iter().cloned());
                }
            }
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternDef {
    pub name: String,
    /// Unique path, `Outer/Local` for local sub-patterns.
    pub path: String,
    pub clauses: Vec<Clause>,
    pub span: Span,
}

impl PatternDef {
    pub fn params(&self) -> &[ParamSpec] {
        &self.clauses[0].params
    }

    pub fn arity(&self) -> usize {
        self.params().len()
    }

    pub fn imports(&self) -> &[String] {
        &self.clauses[0].imports
    }

    pub fn local(&self, clause: usize, name: &str) -> Option<&PatternDef> {
        self.clauses[clause].locals.iter().find(|l| l.name == name)
    }
}

/// `env[i]`: imports and the enclosing environment, extended by the parameter
/// ontologies `0..=i`. A clause without parameters yields `[imports]`.
pub fn param_environments(clause: &Clause, imports: &FlatOntology) -> Vec<FlatOntology> {
    let mut env = clause.outer_env.clone();
    env.merge(imports).expect("imports checked against the environment");
    if clause.params.is_empty() {
        return vec![env];
    }
    clause
        .params
        .iter()
        .map(|p| {
            env.merge(&p.delta()).expect("parameters checked during elaboration");
            env.clone()
        })
        .collect()
}

/// Computes `new_symbols` of each parameter relative to `outer` and the
/// parameters before it.
fn sequentialize(params: &mut [ParamSpec], outer: &FlatOntology) -> Result<(), ElabError> {
    let mut env = outer.clone();
    for p in params.iter_mut() {
        let pos = p.span.pos().clone();
        p.new_symbols = match &p.shape {
            ParamShape::Plain(delta) => delta
                .signature()
                .iter()
                .filter(|s| !env.contains_symbol(s))
                .cloned()
                .collect(),
            ParamShape::List(t) => t
                .heads
                .iter()
                .map(|h| Symbol::new(NameTerm::plain(h.as_str()), t.kind.expect("non-empty template")))
                .collect(),
        };
        env.merge(&p.delta())
            .map_err(|source| ElabError::Model { source, pos })?;
    }
    Ok(())
}

/// Gives every local sub-pattern of `def` the full parameter environment of
/// its enclosing clause, recursively.
pub fn resolve_local_subpatterns(def: &PatternDef) -> Result<PatternDef, ElabError> {
    let mut def = def.clone();
    for clause in &mut def.clauses {
        let full = param_environments(clause, &FlatOntology::new())
            .pop()
            .unwrap_or_default();
        for local in &mut clause.locals {
            for lc in &mut local.clauses {
                lc.outer_env = full.clone();
                sequentialize(&mut lc.params, &full)?;
            }
            *local = resolve_local_subpatterns(local)?;
        }
    }
    Ok(def)
}

fn build_clause(ast: &PatternDefAst, path: &str, errors: &mut Vec<ElabError>) -> Option<Clause> {
    let mut params = Vec::new();
    for (index, p) in ast.params.iter().enumerate() {
        let shape = match &p.payload {
            ParamPayload::Frames(fs) => match lower_raw(fs) {
                Ok(o) => ParamShape::Plain(o),
                Err(e) => {
                    errors.push(e);
                    return None;
                }
            },
            ParamPayload::List(t) => ParamShape::List(t.clone()),
        };
        params.push(ParamSpec {
            index,
            optional: p.optional,
            shape,
            new_symbols: BTreeSet::new(),
            span: p.span.clone(),
        });
    }
    if let Err(e) = sequentialize(&mut params, &FlatOntology::new()) {
        errors.push(e);
        return None;
    }
    let locals = group_defs(&ast.locals, &format!("{path}/"), errors);
    Some(Clause {
        params,
        imports: ast.given.iter().map(|(n, _)| n.clone()).collect(),
        import_pos: ast.given.iter().map(|(_, s)| s.pos().clone()).collect(),
        locals,
        body: ast.body.clone(),
        outer_env: FlatOntology::new(),
        span: ast.span.clone(),
    })
}

/// Groups same-named definitions into template clauses.
fn group_defs(asts: &[PatternDefAst], prefix: &str, errors: &mut Vec<ElabError>) -> Vec<PatternDef> {
    let mut defs: Vec<PatternDef> = Vec::new();
    for ast in asts {
        let path = format!("{prefix}{}", ast.name);
        let Some(clause) = build_clause(ast, &path, errors) else {
            continue;
        };
        match defs.iter_mut().find(|d| d.name == ast.name) {
            None => defs.push(PatternDef {
                name: ast.name.clone(),
                path,
                clauses: vec![clause],
                span: ast.span.clone(),
            }),
            Some(existing) => {
                let first = &existing.clauses[0];
                let lists = clause.list_positions();
                if first.params.len() == clause.params.len()
                    && !lists.is_empty()
                    && first.list_positions() == lists
                {
                    existing.clauses.push(clause);
                } else {
                    errors.push(ElabError::DuplicateDefinition {
                        name: ast.name.clone(),
                        pos: ast.span.pos().clone(),
                        first: existing.span.pos().clone(),
                    });
                }
            }
        }
    }
    defs
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Library {
    defs: BTreeMap<String, PatternDef>,
}

impl Library {
    pub fn get(&self, name: &str) -> Option<&PatternDef> {
        self.defs.get(name)
    }

    /// Definitions sorted by name.
    pub fn defs(&self) -> impl Iterator<Item = &PatternDef> {
        self.defs.values()
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }
}

pub fn build_library(ast: &LibraryAst) -> Result<Library, Vec<ElabError>> {
    let mut errors = Vec::new();
    let grouped = group_defs(&ast.items, "", &mut errors);
    let mut defs = BTreeMap::new();
    for d in grouped {
        match resolve_local_subpatterns(&d) {
            Ok(d) => {
                defs.insert(d.name.clone(), d);
            }
            Err(e) => errors.push(e),
        }
    }
    let lib = Library { defs };
    check_references(&lib, &mut errors);
    if errors.is_empty() {
        Ok(lib)
    } else {
        errors.sort_by(|a, b| a.pos().cmp(b.pos()));
        Err(errors)
    }
}

/// A call edge between definitions, identified by path.
struct Edge {
    from: String,
    to: String,
    name: String,
    guarded: bool,
    pos: SourcePos,
}

/// Lexical scope while walking clause bodies: innermost last.
struct Scope<'a> {
    frames: Vec<ScopeFrame<'a>>,
}

struct ScopeFrame<'a> {
    locals: &'a [PatternDef],
    bound: Vec<String>,
    tails: Vec<(String, usize)>,
}

impl<'a> Scope<'a> {
    fn is_bound(&self, name: &str) -> bool {
        self.frames.iter().any(|f| f.bound.iter().any(|b| b == name))
    }

    fn heads_before_tail(&self, name: &str) -> Option<usize> {
        self.frames
            .iter()
            .rev()
            .find_map(|f| f.tails.iter().find(|(t, _)| t == name).map(|(_, h)| *h))
    }

    fn resolve(&self, lib: &'a Library, name: &str) -> Option<&'a PatternDef> {
        for f in self.frames.iter().rev() {
            if let Some(d) = f.locals.iter().find(|d| d.name == name) {
                return Some(d);
            }
        }
        lib.get(name)
    }
}

fn check_references(lib: &Library, errors: &mut Vec<ElabError>) {
    let mut edges = Vec::new();
    for def in lib.defs() {
        walk_def(lib, def, &mut Scope { frames: Vec::new() }, &mut edges, errors);
    }

    let mut graph = DiGraph::<String, usize>::new();
    let mut nodes: HashMap<String, NodeIndex> = HashMap::new();
    let mut node = |g: &mut DiGraph<String, usize>, p: &str| {
        *nodes.entry(p.to_string()).or_insert_with(|| g.add_node(p.to_string()))
    };
    for (i, e) in edges.iter().enumerate() {
        let a = node(&mut graph, &e.from);
        let b = node(&mut graph, &e.to);
        if !e.guarded {
            graph.add_edge(a, b, i);
        }
    }
    // A cycle made only of unguarded calls has no shrinking list argument.
    for scc in tarjan_scc(&graph) {
        let members: BTreeSet<NodeIndex> = scc.iter().copied().collect();
        let cyclic = scc.len() > 1 || graph.contains_edge(scc[0], scc[0]);
        if !cyclic {
            continue;
        }
        let edge = graph
            .edge_indices()
            .filter(|&ei| {
                let (a, b) = graph.edge_endpoints(ei).unwrap();
                members.contains(&a) && members.contains(&b)
            })
            .map(|ei| &edges[graph[ei]])
            .min_by(|a, b| a.pos.cmp(&b.pos))
            .expect("cyclic component has an edge");
        errors.push(ElabError::IllegalCycle {
            name: edge.name.clone(),
            pos: edge.pos.clone(),
        });
    }
}

fn walk_def<'a>(
    lib: &'a Library,
    def: &'a PatternDef,
    scope: &mut Scope<'a>,
    edges: &mut Vec<Edge>,
    errors: &mut Vec<ElabError>,
) {
    for clause in &def.clauses {
        for (name, pos) in clause.imports.iter().zip(clause.import_pos.iter().cloned()) {
            match lib.get(name) {
                None => errors.push(ElabError::UnknownReference {
                    name: name.clone(),
                    pos,
                }),
                Some(d) if d.arity() > 0 => errors.push(ElabError::GenericImport {
                    name: name.clone(),
                    pos,
                }),
                Some(d) => edges.push(Edge {
                    from: def.path.clone(),
                    to: d.path.clone(),
                    name: name.clone(),
                    guarded: false,
                    pos,
                }),
            }
        }
        scope.frames.push(ScopeFrame {
            locals: &clause.locals,
            bound: clause.bound_names(),
            tails: clause.tail_vars(),
        });
        walk_expr(lib, &def.path, &clause.body, scope, edges, errors);
        for local in &clause.locals {
            walk_def(lib, local, scope, edges, errors);
        }
        scope.frames.pop();
    }
}

fn walk_expr<'a>(
    lib: &'a Library,
    from: &str,
    e: &ExprAst,
    scope: &Scope<'a>,
    edges: &mut Vec<Edge>,
    errors: &mut Vec<ElabError>,
) {
    for t in e.terms() {
        match t {
            ExprAst::Frames(..) | ExprAst::Braced(..) => {}
            ExprAst::Ref(name, span) | ExprAst::Inst { name, span, .. } => {
                let Some(target) = scope.resolve(lib, name) else {
                    errors.push(ElabError::UnknownReference {
                        name: name.clone(),
                        pos: span.pos().clone(),
                    });
                    continue;
                };
                let args: &[ArgAst] = match t {
                    ExprAst::Inst { args, .. } => args,
                    _ => &[],
                };
                call(lib, from, name, target, args, span, scope, edges, errors);
            }
            ExprAst::Then(..) => unreachable!("terms() flattens"),
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn call<'a>(
    lib: &'a Library,
    from: &str,
    name: &str,
    target: &PatternDef,
    args: &[ArgAst],
    span: &Span,
    scope: &Scope<'a>,
    edges: &mut Vec<Edge>,
    errors: &mut Vec<ElabError>,
) {
    // Guarded: some list argument ends in a tail variable and puts fewer
    // items in front of it than the template took off.
    let guarded = args.iter().any(|a| {
        let (prefix, last) = match &a.value {
            ArgValue::Expr(ExprAst::Ref(n, _)) => (0, Some(n)),
            ArgValue::List(l) => list_shape(l),
            _ => (0, None),
        };
        last.and_then(|t| scope.heads_before_tail(t))
            .is_some_and(|heads| prefix < heads)
    });
    edges.push(Edge {
        from: from.to_string(),
        to: target.path.clone(),
        name: name.to_string(),
        guarded,
        pos: span.pos().clone(),
    });
    for a in args {
        let mut items: Vec<&ExprAst> = Vec::new();
        match &a.value {
            ArgValue::Missing => {}
            ArgValue::Expr(e) => items.push(e),
            ArgValue::List(l) => collect_items(l, &mut items),
        }
        for e in items {
            walk_arg(lib, from, e, scope, edges, errors);
        }
    }
}

/// Items written before the last element, and the last element if it is a
/// bare reference.
fn list_shape(l: &ListExpr) -> (usize, Option<&String>) {
    match l {
        ListExpr::Empty => (0, None),
        ListExpr::Cons(_, t) => {
            let (n, last) = list_shape(t);
            (n + 1, last)
        }
        ListExpr::Items(v) => match v.last() {
            Some(ExprAst::Ref(n, _)) => (v.len() - 1, Some(n)),
            _ => (v.len(), None),
        },
    }
}

fn collect_items<'e>(l: &'e ListExpr, out: &mut Vec<&'e ExprAst>) {
    match l {
        ListExpr::Empty => {}
        ListExpr::Cons(h, t) => {
            out.push(h);
            collect_items(t, out);
        }
        ListExpr::Items(v) => out.extend(v.iter()),
    }
}

/// Arguments: names that are not patterns denote symbols, not references.
fn walk_arg<'a>(
    lib: &'a Library,
    from: &str,
    e: &ExprAst,
    scope: &Scope<'a>,
    edges: &mut Vec<Edge>,
    errors: &mut Vec<ElabError>,
) {
    for t in e.terms() {
        match t {
            ExprAst::Ref(name, span) | ExprAst::Inst { name, span, .. } => {
                if scope.is_bound(name) {
                    continue;
                }
                if let Some(target) = scope.resolve(lib, name) {
                    let args: &[ArgAst] = match t {
                        ExprAst::Inst { args, .. } => args,
                        _ => &[],
                    };
                    call(lib, from, name, target, args, span, scope, edges, errors);
                }
            }
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_library;

    const RELATIONS: &str = "
ontology ReflexiveRelation [ObjectProperty: r; Class: C] =
  ObjectProperty: r Characteristics: Reflexive Domain: C Range: C
ontology TransitiveRelation [ObjectProperty: p; Class: C] =
  ObjectProperty: p Characteristics: Transitive Domain: C Range: C
ontology InverseRelation [ObjectProperty: p; ObjectProperty: q; Class: D; Class: R] =
  ObjectProperty: p Domain: D Range: R InverseOf: q
  ObjectProperty: q Domain: R Range: D
ontology SubProp [ObjectProperty: q; Class: D; Class: R; ObjectProperty: p Domain: D Range: R] =
  ObjectProperty: q Domain: D Range: R SubPropertyOf: p
";

    fn build(src: &str) -> Result<Library, Vec<ElabError>> {
        build_library(&parse_library(src, "t.gdp").unwrap())
    }

    #[test]
    fn relations_library() {
        let lib = build(RELATIONS).unwrap();
        assert_eq!(lib.len(), 4);
        let sub = lib.get("SubProp").unwrap();
        assert_eq!(sub.arity(), 4);
        let fourth = &sub.params()[3];
        assert_eq!(fourth.new_symbols, [Symbol::property("p")].into());
        let n = NameTerm::plain;
        assert_eq!(
            fourth.axioms(),
            [Axiom::Domain(n("p"), n("D")), Axiom::Range(n("p"), n("D")).clone()]
                .into_iter()
                .map(|a| match a {
                    Axiom::Range(p, _) => Axiom::Range(p, n("R")),
                    a => a,
                })
                .collect()
        );
    }

    #[test]
    fn sequential_environments() {
        let lib = build(RELATIONS).unwrap();
        let sub = lib.get("SubProp").unwrap();
        let envs = param_environments(&sub.clauses[0], &FlatOntology::new());
        assert_eq!(envs.len(), 4);
        for w in envs.windows(2) {
            assert!(w[0].signature().is_subset(w[1].signature()));
            assert!(w[0].axioms().is_subset(w[1].axioms()));
        }
        for s in [Symbol::property("q"), Symbol::class("D"), Symbol::class("R")] {
            assert!(envs[2].contains_symbol(&s));
        }
        for (i, p) in sub.params().iter().enumerate() {
            let before = if i == 0 { BTreeSet::new() } else { envs[i - 1].signature().clone() };
            let diff: BTreeSet<Symbol> = envs[i].signature().difference(&before).cloned().collect();
            assert_eq!(p.new_symbols, diff);
        }
    }

    #[test]
    fn zero_parameter_environment_is_imports() {
        let lib = build("ontology Base = Class: A\nontology E given Base = {}").unwrap();
        let imports = FlatOntology::from_parts([Symbol::class("A")], []).unwrap();
        let envs = param_environments(&lib.get("E").unwrap().clauses[0], &imports);
        assert_eq!(envs, vec![imports]);
    }

    #[test]
    fn empty_library() {
        assert!(build("").unwrap().is_empty());
    }

    #[test]
    fn locals_see_enclosing_parameters() {
        let lib = build(
            "ontology ValSet [Class: Val; Individual: v :: vS; ? ObjectProperty: greater[Val]] =
               let ontology OrderStep [Individual: prev; Individual: x :: xs] =
                     Individual: x Types: Val Facts: greater[Val] prev then OrderStep[x; xs]
                   ontology OrderStep [Individual: prev; empty] = {}
               in OrderStep[v; vS]",
        )
        .unwrap();
        let vs = lib.get("ValSet").unwrap();
        let env = param_environments(&vs.clauses[0], &FlatOntology::new());
        assert!(env[2].contains_symbol(&Symbol::class("Val")));
        assert!(env[2].contains_symbol(&Symbol::individual("v")));
        let step = vs.local(0, "OrderStep").unwrap();
        assert_eq!(step.path, "ValSet/OrderStep");
        assert_eq!(step.clauses.len(), 2);
        let greater = Symbol::new(
            NameTerm::with_args("greater", vec![NameTerm::plain("Val")]),
            SymbolKind::ObjectProperty,
        );
        for c in &step.clauses {
            assert!(c.outer_env.contains_symbol(&Symbol::class("Val")));
            assert!(c.outer_env.contains_symbol(&greater));
        }
        assert!(lib.get("OrderStep").is_none());
    }

    #[test]
    fn unknown_and_duplicate() {
        let errs = build("ontology A = B").unwrap_err();
        assert!(matches!(&errs[0], ElabError::UnknownReference { name, .. } if name == "B"));
        let errs = build("ontology A = {}\nontology A = {}").unwrap_err();
        assert!(matches!(&errs[0], ElabError::DuplicateDefinition { .. }));
        let errs = build("ontology G [Class: C] = {}\nontology H given G = {}").unwrap_err();
        assert!(matches!(&errs[0], ElabError::GenericImport { .. }));
    }

    #[test]
    fn unguarded_recursion_is_rejected() {
        let errs = build("ontology G [Class: C] =\n  G[C]").unwrap_err();
        assert!(matches!(&errs[0], ElabError::IllegalCycle { name, pos } if name == "G" && pos.line == 2));
        let errs = build("ontology A = B\nontology B = A").unwrap_err();
        assert!(matches!(&errs[0], ElabError::IllegalCycle { .. }));
    }

    #[test]
    fn guarded_recursion_is_accepted() {
        build("ontology G [Individual: x :: xs] = G[xs]\nontology G [empty] = {}").unwrap();
        // Mutual recursion where one of the calls passes a tail.
        build(
            "ontology A [Individual: x :: xs] = B[x :: xs]
             ontology A [empty] = {}
             ontology B [Individual: y :: ys] = A[ys]",
        )
        .unwrap();
        build("ontology S [Individual: g; Individual: h :: k :: ks] = S[h; k :: ks]\nontology S [Individual: g; empty] = {}").unwrap();
        // Growing the list again is not a guard.
        let errs = build("ontology S [Individual: h :: ks] = S[h :: h :: ks]\nontology S [empty] = {}").unwrap_err();
        assert!(matches!(&errs[0], ElabError::IllegalCycle { .. }));
    }

    #[test]
    fn template_clauses_need_list_parameters() {
        let errs = build("ontology G [Class: C] = {}\nontology G [Class: D] = {}").unwrap_err();
        assert!(matches!(&errs[0], ElabError::DuplicateDefinition { .. }));
    }

    #[test]
    fn lowering_counts() {
        let frames = crate::syntax::parse_frames(
            "ObjectProperty: r Characteristics: Transitive Domain: C Range: C",
            "t",
        )
        .unwrap();
        let o = lower_raw(&frames).unwrap();
        assert_eq!(o.axioms().len(), 3);
        let frames = crate::syntax::parse_frames("Individual: v Types: Val", "t").unwrap();
        let o = lower_raw(&frames).unwrap();
        assert_eq!(o.axioms().len(), 1);
        assert!(o.contains_symbol(&Symbol::individual("v")));
    }
}
