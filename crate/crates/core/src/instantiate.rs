//! The expansion engine.
//!
//! An instantiation `G[A1; ...; An]` is expanded by evaluating each argument,
//! choosing the first template clause of `G` whose list templates fit the list
//! arguments, deriving one fitting morphism per parameter, checking that the
//! fittings agree and that every parameter's axioms hold for its argument, and
//! finally expanding the clause body under the resulting name substitution.
//!
//! Elided optional parameters are bound to marker names that cannot be
//! written in source text. Markers travel through nested instantiations like
//! ordinary names and are removed, with every axiom that mentions them, when
//! the instantiation that introduced them finishes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::diag::{Diagnostic, SourcePos};
use crate::elaborate::{lower_frames, ElabError, Library, ParamShape, ParamSpec, PatternDef};
use crate::model::{apply_morphism, Axiom, FittingMorphism, FlatOntology, ModelError, NameTerm, Symbol, SymbolKind};
use crate::syntax::ast::*;

pub const DEFAULT_DEPTH: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpandErrorKind {
    #[error("cannot derive how {symbol} is fitted: candidates are {}; add 'fit {} |-> ...'", join(candidates), symbol.name)]
    AmbiguousFitting {
        symbol: Symbol,
        candidates: Vec<Symbol>,
    },
    #[error("argument provides no {} for {symbol}", symbol.kind)]
    NoCandidate { symbol: Symbol },
    #[error("'{name}' is {found}, but {symbol} needs {}", symbol.kind)]
    KindMismatch {
        symbol: Symbol,
        name: NameTerm,
        found: SymbolKind,
    },
    #[error("{symbol} is fitted to both '{first}' and '{second}'")]
    IncompatibleFittings {
        symbol: Symbol,
        first: NameTerm,
        second: NameTerm,
    },
    #[error("argument does not satisfy the parameter axiom '{axiom}'")]
    UnmetConstraint { axiom: Axiom },
    #[error("the instantiation is incorrect: no definition of '{pattern}' matches the arguments")]
    NoMatch { pattern: String },
    #[error("expansion exceeded the depth budget of {budget}")]
    DepthExceeded { budget: usize },
    #[error("'{pattern}' takes {expected} arguments, {found} given")]
    ArityMismatch {
        pattern: String,
        expected: usize,
        found: usize,
    },
    #[error("argument {} of '{pattern}' is not optional", index + 1)]
    MissingArgument { pattern: String, index: usize },
    #[error("a single name stands for a parameter with exactly one new symbol; parameter {} of '{pattern}' has {count}", index + 1)]
    ShorthandNotAllowed {
        pattern: String,
        index: usize,
        count: usize,
    },
    #[error("argument {} of '{pattern}' {}", index + 1, if *expected_list { "must be a list" } else { "must not be a list" })]
    ListArgMismatch {
        pattern: String,
        index: usize,
        expected_list: bool,
    },
    #[error("'{name}' has parameters that must be given; only instantiations can be expanded")]
    GenericTarget { name: String },
    #[error("unknown pattern or ontology '{name}'")]
    UnknownReference { name: String },
    #[error("'{name}' is a name, not an ontology")]
    NotAnOntology { name: String },
    #[error("'{name}' in a fit clause is not a symbol of parameter {} of '{pattern}'", index + 1)]
    FitOutsideParameter {
        name: NameTerm,
        pattern: String,
        index: usize,
    },
    #[error("'{name}' stands for a list and cannot be used as a single name here")]
    ListInNamePosition { name: NameTerm },
    #[error("{0}")]
    Model(#[from] ModelError),
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind}")]
pub struct ExpandError {
    pub pos: SourcePos,
    pub kind: ExpandErrorKind,
}

impl ExpandError {
    pub fn new(pos: &SourcePos, kind: ExpandErrorKind) -> Self {
        ExpandError {
            pos: pos.clone(),
            kind,
        }
    }

    pub fn to_diagnostic(&self) -> Diagnostic {
        Diagnostic::error(self.pos.clone(), self.kind.to_string())
    }
}

impl From<ElabError> for ExpandError {
    fn from(e: ElabError) -> Self {
        let pos = e.pos().clone();
        let kind = match e {
            ElabError::Model { source, .. } => ExpandErrorKind::Model(source),
            ElabError::ListInNamePosition { name, .. } => ExpandErrorKind::ListInNamePosition { name },
            ElabError::UnknownReference { name, .. } => ExpandErrorKind::UnknownReference { name },
            other => unreachable!("not produced by lowering: {other}"),
        };
        ExpandError { pos, kind }
    }
}

/// An argument as the engine sees it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArgumentForm {
    NamedOntology {
        name: String,
        maps: Vec<(NameTerm, NameTerm)>,
    },
    Anonymous {
        ontology: FlatOntology,
        maps: Vec<(NameTerm, NameTerm)>,
    },
    LocalSymbol(NameTerm),
    EmptyOpt,
    ListArg(Vec<NameTerm>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instantiation {
    pub pattern: String,
    pub args: Vec<ArgumentForm>,
    /// The context `O1` of `O1 then G[...]`.
    pub local_env: FlatOntology,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bindings {
    /// Parameter names to the names they stand for.
    pub names: BTreeMap<NameTerm, NameTerm>,
    /// List variables to their items.
    pub lists: BTreeMap<String, Vec<NameTerm>>,
}

/// Structural substitution. A name bound as a whole is replaced by its image;
/// otherwise a bound base is replaced and the image's arguments come first.
pub fn substitute_name(n: &NameTerm, b: &Bindings) -> NameTerm {
    substitute_chain(n, &[b])
}

fn substitute_chain(n: &NameTerm, chain: &[&Bindings]) -> NameTerm {
    if let Some(v) = chain.iter().find_map(|b| b.names.get(n)) {
        return v.clone();
    }
    let args: Vec<NameTerm> = n.args.iter().map(|a| substitute_chain(a, chain)).collect();
    if args.is_empty() {
        return n.clone();
    }
    let base = NameTerm::plain(n.base.as_str());
    match chain.iter().find_map(|b| b.names.get(&base)) {
        Some(img) => {
            let mut all = img.args.clone();
            all.extend(args);
            NameTerm::with_args(img.base.clone(), all)
        }
        None => NameTerm::with_args(n.base.clone(), args),
    }
}

/// First clause, in source order, whose list templates fit the list
/// arguments (keyed by parameter position).
pub fn match_template(
    clauses: &[crate::elaborate::Clause],
    lists: &BTreeMap<usize, Vec<NameTerm>>,
) -> Option<(usize, Bindings)> {
    'clauses: for (ci, clause) in clauses.iter().enumerate() {
        let mut b = Bindings::default();
        for p in &clause.params {
            let ParamShape::List(t) = &p.shape else {
                continue;
            };
            let items = lists.get(&p.index).map(Vec::as_slice).unwrap_or(&[]);
            if !t.matches_len(items.len()) {
                continue 'clauses;
            }
            for (h, item) in t.heads.iter().zip(items) {
                b.names.insert(NameTerm::plain(h.as_str()), item.clone());
            }
            if let Some(tail) = &t.tail {
                b.lists.insert(tail.clone(), items[t.heads.len()..].to_vec());
            }
        }
        return Some((ci, b));
    }
    None
}

/// A symbol shared by several fittings must have one image.
pub fn check_compatibility(fittings: &[FittingMorphism]) -> Result<(), ExpandErrorKind> {
    let mut seen: BTreeMap<&Symbol, &Symbol> = BTreeMap::new();
    for m in fittings {
        for (from, to) in m.iter() {
            match seen.get(from) {
                Some(prev) if *prev != to => {
                    return Err(ExpandErrorKind::IncompatibleFittings {
                        symbol: from.clone(),
                        first: prev.name.clone(),
                        second: to.name.clone(),
                    })
                }
                _ => {
                    seen.insert(from, to);
                }
            }
        }
    }
    Ok(())
}

/// Every parameter axiom, translated along `m`, must be an axiom of
/// `available`.
pub fn check_constraints(
    param_axioms: &BTreeSet<Axiom>,
    m: &FittingMorphism,
    available: &FlatOntology,
) -> Result<(), ExpandErrorKind> {
    for a in param_axioms {
        let t = m.apply_axiom(a)?;
        if !available.contains_axiom(&t) {
            return Err(ExpandErrorKind::UnmetConstraint { axiom: t });
        }
    }
    Ok(())
}

pub fn elide_optional(body: &FlatOntology, dead: &BTreeSet<Symbol>) -> FlatOntology {
    body.without(dead)
}

/// Where the new symbols of a parameter get their images from.
#[derive(Debug, Clone, Copy)]
pub enum FitSource<'x> {
    /// An ontology argument: its candidate symbols and explicit maps.
    Ontology {
        candidates: &'x BTreeSet<Symbol>,
        maps: &'x [(NameTerm, NameTerm)],
    },
    /// The shorthand `G[...; M; ...]`, i.e. `E fit N |-> M`.
    Symbol(&'x NameTerm),
    /// An empty optional argument; new symbols go to markers with this base.
    Elided(&'x str),
}

/// Derives the fitting of one parameter. `inherited` gives the already fixed
/// images of the parameter's old symbols; `available` is used for kind checks.
pub fn derive_fitting(
    pattern: &str,
    param: &ParamSpec,
    new_symbols: &BTreeSet<Symbol>,
    inherited: &FittingMorphism,
    source: FitSource<'_>,
    available: &FlatOntology,
) -> Result<FittingMorphism, ExpandErrorKind> {
    let mut m = inherited.clone();
    let kind_ok = |symbol: &Symbol, name: &NameTerm| match available.kind_of(name) {
        Some(found) if found != symbol.kind => Err(ExpandErrorKind::KindMismatch {
            symbol: symbol.clone(),
            name: name.clone(),
            found,
        }),
        _ => Ok(()),
    };
    match source {
        FitSource::Elided(marker) => {
            for s in new_symbols {
                m.insert(s.clone(), Symbol::new(marker_name(marker, &s.name), s.kind))?;
            }
        }
        FitSource::Symbol(name) => {
            if new_symbols.len() != 1 {
                return Err(ExpandErrorKind::ShorthandNotAllowed {
                    pattern: pattern.to_string(),
                    index: param.index,
                    count: new_symbols.len(),
                });
            }
            let n = new_symbols.iter().next().unwrap();
            kind_ok(n, name)?;
            m.insert(n.clone(), Symbol::new(name.clone(), n.kind))?;
        }
        FitSource::Ontology { candidates, maps } => {
            let delta = param.delta();
            let mut explicit = BTreeSet::new();
            for (from, to) in maps {
                let Some(kind) = delta.kind_of(from) else {
                    return Err(ExpandErrorKind::FitOutsideParameter {
                        name: from.clone(),
                        pattern: pattern.to_string(),
                        index: param.index,
                    });
                };
                let s = Symbol::new(from.clone(), kind);
                kind_ok(&s, to)?;
                m.insert(s.clone(), Symbol::new(to.clone(), kind))?;
                explicit.insert(s);
            }
            for s in new_symbols.iter().filter(|s| !explicit.contains(*s)) {
                let taken: BTreeSet<&Symbol> = m.iter().map(|(_, v)| v).collect();
                let found: Vec<Symbol> = candidates
                    .iter()
                    .filter(|c| c.kind == s.kind && !taken.contains(c))
                    .cloned()
                    .collect();
                match found.len() {
                    0 => return Err(ExpandErrorKind::NoCandidate { symbol: s.clone() }),
                    1 => m.insert(s.clone(), found.into_iter().next().unwrap())?,
                    _ => {
                        return Err(ExpandErrorKind::AmbiguousFitting {
                            symbol: s.clone(),
                            candidates: found,
                        })
                    }
                }
            }
        }
    }
    Ok(m)
}

fn marker_name(marker: &str, original: &NameTerm) -> NameTerm {
    NameTerm::with_args(marker, vec![original.clone()])
}

/// Lexical scope of an expansion: the bindings of one clause instance, its
/// local sub-patterns, and the scope the pattern was defined in.
struct Scope<'a> {
    parent: Option<Rc<Scope<'a>>>,
    bindings: Bindings,
    locals: &'a [PatternDef],
}

type ScopeRef<'a> = Option<Rc<Scope<'a>>>;

fn chain<'s, 'a>(scope: &'s ScopeRef<'a>) -> Vec<&'s Bindings> {
    let mut out = Vec::new();
    let mut cur = scope.as_ref();
    while let Some(s) = cur {
        out.push(&s.bindings);
        cur = s.parent.as_ref();
    }
    out
}

fn lookup_list<'s>(scope: &'s ScopeRef<'_>, name: &str) -> Option<&'s Vec<NameTerm>> {
    let key = NameTerm::plain(name);
    for b in chain(scope) {
        if b.names.contains_key(&key) {
            return None;
        }
        if let Some(v) = b.lists.get(name) {
            return Some(v);
        }
    }
    None
}

fn is_bound(scope: &ScopeRef<'_>, name: &str) -> bool {
    let key = NameTerm::plain(name);
    chain(scope)
        .iter()
        .any(|b| b.names.contains_key(&key) || b.lists.contains_key(name))
}

fn resolve_pattern<'a>(
    lib: &'a Library,
    scope: &ScopeRef<'a>,
    name: &str,
) -> Option<(&'a PatternDef, ScopeRef<'a>)> {
    let mut cur = scope.clone();
    while let Some(s) = cur {
        if let Some(d) = s.locals.iter().find(|d| d.name == name) {
            return Some((d, Some(s)));
        }
        cur = s.parent.clone();
    }
    lib.get(name).map(|d| (d, None))
}

/// An evaluated argument.
enum Arg {
    Onto {
        onto: FlatOntology,
        candidates: BTreeSet<Symbol>,
        maps: Vec<(NameTerm, NameTerm)>,
    },
    Name {
        name: NameTerm,
        maps: Vec<(NameTerm, NameTerm)>,
    },
    Elided,
    List(Vec<NameTerm>),
}

struct PosArg {
    arg: Arg,
    pos: SourcePos,
}

pub struct Expander<'a> {
    lib: &'a Library,
    budget: usize,
    depth: usize,
    markers: usize,
}

impl<'a> Expander<'a> {
    pub fn new(lib: &'a Library, budget: usize) -> Self {
        Expander {
            lib,
            budget,
            depth: 0,
            markers: 0,
        }
    }

    /// Expands a definition that can stand alone: one whose parameters, if
    /// any, are all optional.
    pub fn expand_definition(&mut self, name: &str, pos: &SourcePos) -> Result<FlatOntology, ExpandError> {
        let def = self.lib.get(name).ok_or_else(|| {
            ExpandError::new(pos, ExpandErrorKind::UnknownReference { name: name.to_string() })
        })?;
        if def.params().iter().any(|p| !p.optional) {
            return Err(ExpandError::new(
                def.span.pos(),
                ExpandErrorKind::GenericTarget { name: name.to_string() },
            ));
        }
        self.instantiate(def, None, Vec::new(), FlatOntology::new(), def.span.pos())
    }

    pub fn expand(&mut self, inst: &Instantiation) -> Result<FlatOntology, ExpandError> {
        let unknown = || ExpandErrorKind::UnknownReference {
            name: inst.pattern.clone(),
        };
        let here = SourcePos::new("<instantiation>", 1, 1);
        let def = self
            .lib
            .get(&inst.pattern)
            .ok_or_else(|| ExpandError::new(&here, unknown()))?;
        let pos = def.span.pos().clone();
        let mut args = Vec::new();
        for a in &inst.args {
            let arg = match a {
                ArgumentForm::NamedOntology { name, maps } => {
                    let onto = self.expand_definition(name, &pos)?;
                    Arg::Onto {
                        candidates: onto.signature().clone(),
                        onto,
                        maps: maps.clone(),
                    }
                }
                ArgumentForm::Anonymous { ontology, maps } => Arg::Onto {
                    candidates: ontology.signature().clone(),
                    onto: ontology.clone(),
                    maps: maps.clone(),
                },
                ArgumentForm::LocalSymbol(n) => Arg::Name {
                    name: n.clone(),
                    maps: Vec::new(),
                },
                ArgumentForm::EmptyOpt => Arg::Elided,
                ArgumentForm::ListArg(v) => Arg::List(v.clone()),
            };
            args.push(PosArg {
                arg,
                pos: pos.clone(),
            });
        }
        self.instantiate(def, None, args, inst.local_env.clone(), &pos)
    }

    fn instantiate(
        &mut self,
        def: &'a PatternDef,
        def_scope: ScopeRef<'a>,
        args: Vec<PosArg>,
        local_env: FlatOntology,
        pos: &SourcePos,
    ) -> Result<FlatOntology, ExpandError> {
        if self.depth >= self.budget {
            return Err(ExpandError::new(
                pos,
                ExpandErrorKind::DepthExceeded { budget: self.budget },
            ));
        }
        self.depth += 1;
        let r = stacker::maybe_grow(64 * 1024, 2 * 1024 * 1024, || {
            self.instantiate_clause(def, def_scope, args, local_env, pos)
        });
        self.depth -= 1;
        r
    }

    fn instantiate_clause(
        &mut self,
        def: &'a PatternDef,
        def_scope: ScopeRef<'a>,
        mut args: Vec<PosArg>,
        local_env: FlatOntology,
        pos: &SourcePos,
    ) -> Result<FlatOntology, ExpandError> {
        let err = |p: &SourcePos, k| ExpandError::new(p, k);
        let pattern = def.name.as_str();
        let arity = def.arity();
        if args.len() > arity {
            return Err(err(
                pos,
                ExpandErrorKind::ArityMismatch {
                    pattern: pattern.to_string(),
                    expected: arity,
                    found: args.len(),
                },
            ));
        }
        while args.len() < arity {
            args.push(PosArg {
                arg: Arg::Elided,
                pos: pos.clone(),
            });
        }

        // List arguments decide the clause.
        let mut lists = BTreeMap::new();
        for (i, (p, a)) in def.params().iter().zip(&mut args).enumerate() {
            let is_list = matches!(p.shape, ParamShape::List(_));
            let mismatch = |expected_list| {
                err(
                    &a.pos,
                    ExpandErrorKind::ListArgMismatch {
                        pattern: pattern.to_string(),
                        index: i,
                        expected_list,
                    },
                )
            };
            match (&a.arg, is_list) {
                (Arg::List(_), false) => return Err(mismatch(false)),
                (Arg::Onto { .. }, true) => return Err(mismatch(true)),
                (Arg::List(v), true) => {
                    lists.insert(i, v.clone());
                }
                (Arg::Name { name, .. }, true) => {
                    lists.insert(i, vec![name.clone()]);
                }
                (Arg::Elided, true) if p.optional => {
                    lists.insert(i, Vec::new());
                }
                (Arg::Elided, true) => {
                    return Err(err(
                        &a.pos,
                        ExpandErrorKind::MissingArgument {
                            pattern: pattern.to_string(),
                            index: i,
                        },
                    ))
                }
                _ => {}
            }
        }
        let (ci, list_bindings) = match_template(&def.clauses, &lists).ok_or_else(|| {
            err(
                pos,
                ExpandErrorKind::NoMatch {
                    pattern: pattern.to_string(),
                },
            )
        })?;
        let clause = &def.clauses[ci];

        let mut imports = FlatOntology::new();
        for name in &clause.imports {
            let o = self.expand_definition(name, clause.span.pos())?;
            imports.merge(&o).map_err(|e| err(clause.span.pos(), e.into()))?;
        }

        self.markers += 1;
        let marker = format!("?{}", self.markers);
        let outer = chain(&def_scope).into_iter().cloned().collect::<Vec<_>>();
        let outer: Vec<&Bindings> = outer.iter().collect();

        let mut available = local_env.clone();
        available
            .merge(&imports)
            .map_err(|e| err(pos, e.into()))?;
        let mut result = available.clone();
        let mut fittings = vec![FittingMorphism::identity_on(imports.signature())];
        let mut sigma = fittings[0].clone();

        for (p, a) in clause.params.iter().zip(&args) {
            let ParamShape::Plain(delta) = &p.shape else {
                continue;
            };
            let at = |k| err(&a.pos, k);
            let new: BTreeSet<Symbol> = p
                .new_symbols
                .iter()
                .filter(|s| !imports.contains_symbol(s))
                .cloned()
                .collect();

            // Old symbols keep the image fixed by an earlier parameter or by
            // the enclosing scope.
            let mut inherited = FittingMorphism::new();
            let mut from_scope = FittingMorphism::new();
            for s in delta.signature().iter().filter(|s| !new.contains(s)) {
                let image = match sigma.get(s) {
                    Some(t) => t.clone(),
                    None => {
                        let t = Symbol::new(substitute_chain(&s.name, &outer), s.kind);
                        from_scope.insert(s.clone(), t.clone()).map_err(|e| at(e.into()))?;
                        t
                    }
                };
                inherited.insert(s.clone(), image).map_err(|e| at(e.into()))?;
            }
            fittings.push(from_scope);

            let no_maps: &[(NameTerm, NameTerm)] = &[];
            let (source, maps) = match &a.arg {
                Arg::Elided if !p.optional => {
                    return Err(at(ExpandErrorKind::MissingArgument {
                        pattern: pattern.to_string(),
                        index: p.index,
                    }))
                }
                Arg::Elided => (FitSource::Elided(&marker), no_maps),
                Arg::Name { name, maps } => (FitSource::Symbol(name), maps.as_slice()),
                Arg::Onto {
                    onto,
                    candidates,
                    maps,
                } => {
                    available.merge(onto).map_err(|e| at(e.into()))?;
                    result.merge(onto).map_err(|e| at(e.into()))?;
                    (
                        FitSource::Ontology {
                            candidates,
                            maps: maps.as_slice(),
                        },
                        no_maps,
                    )
                }
                Arg::List(_) => unreachable!("checked above"),
            };
            let mut m = derive_fitting(pattern, p, &new, &inherited, source, &available).map_err(at)?;
            if !maps.is_empty() {
                // Explicit maps next to the single-name shorthand.
                let cands = BTreeSet::new();
                let src = FitSource::Ontology {
                    candidates: &cands,
                    maps,
                };
                let covered: BTreeSet<Symbol> = BTreeSet::new();
                m = derive_fitting(pattern, p, &covered, &m, src, &available).map_err(at)?;
            }
            fittings.push(m.clone());
            check_compatibility(&fittings).map_err(at)?;
            if !matches!(a.arg, Arg::Elided) {
                check_constraints(&p.axioms(), &m, &available).map_err(at)?;
            }
            let translated = apply_morphism(&m, delta).map_err(|e| at(e.into()))?;
            result.merge(&translated).map_err(|e| at(e.into()))?;
            for (k, v) in m.iter() {
                sigma.insert(k.clone(), v.clone()).map_err(|e| at(e.into()))?;
            }
        }

        let mut bindings = list_bindings;
        for (k, v) in sigma.iter() {
            if k != v {
                bindings.names.insert(k.name.clone(), v.name.clone());
            }
        }
        let scope = Some(Rc::new(Scope {
            parent: def_scope,
            bindings,
            locals: &clause.locals,
        }));
        let result = self.expand_expr(&clause.body, &scope, result)?;

        let dead: BTreeSet<Symbol> = result
            .signature()
            .iter()
            .filter(|s| s.name.mentions_base(&marker))
            .cloned()
            .collect();
        Ok(elide_optional(&result, &dead))
    }

    fn expand_expr(
        &mut self,
        e: &ExprAst,
        scope: &ScopeRef<'a>,
        mut acc: FlatOntology,
    ) -> Result<FlatOntology, ExpandError> {
        for t in e.terms() {
            let r = self.expand_term(t, scope, &acc)?;
            acc.merge(&r)
                .map_err(|e| ExpandError::new(t.span().pos(), e.into()))?;
        }
        Ok(acc)
    }

    fn expand_term(
        &mut self,
        t: &ExprAst,
        scope: &ScopeRef<'a>,
        acc: &FlatOntology,
    ) -> Result<FlatOntology, ExpandError> {
        match t {
            ExprAst::Frames(fs, _) | ExprAst::Braced(fs, _) => self.lower(fs, scope),
            ExprAst::Ref(name, span) | ExprAst::Inst { name, span, .. } => {
                let pos = span.pos();
                if is_bound(scope, name) {
                    return Err(ExpandError::new(
                        pos,
                        ExpandErrorKind::NotAnOntology { name: name.clone() },
                    ));
                }
                let (def, def_scope) = resolve_pattern(self.lib, scope, name).ok_or_else(|| {
                    ExpandError::new(pos, ExpandErrorKind::UnknownReference { name: name.clone() })
                })?;
                let mut args = Vec::new();
                if let ExprAst::Inst { args: asts, .. } = t {
                    for a in asts {
                        args.push(self.eval_arg(a, scope, acc)?);
                    }
                }
                self.instantiate(def, def_scope, args, acc.clone(), pos)
            }
            ExprAst::Then(..) => self.expand_expr(t, scope, acc.clone()),
        }
    }

    fn lower(&self, frames: &[FrameAst], scope: &ScopeRef<'a>) -> Result<FlatOntology, ExpandError> {
        let bindings = chain(scope);
        let mut resolve = |n: &NameTerm| {
            if n.is_plain() {
                if let Some(items) = lookup_list(scope, &n.base) {
                    return items.clone();
                }
            }
            vec![substitute_chain(n, &bindings)]
        };
        Ok(lower_frames(frames, &mut resolve)?)
    }

    fn eval_arg(&mut self, a: &ArgAst, scope: &ScopeRef<'a>, acc: &FlatOntology) -> Result<PosArg, ExpandError> {
        let pos = a.span.pos().clone();
        let bindings = chain(scope);
        let maps: Vec<(NameTerm, NameTerm)> = a
            .maps
            .iter()
            .map(|(f, t)| (f.clone(), substitute_chain(t, &bindings)))
            .collect();
        let arg = match &a.value {
            ArgValue::Missing if maps.is_empty() => Arg::Elided,
            // `fit` alone: the argument is the local environment.
            ArgValue::Missing => Arg::Onto {
                onto: FlatOntology::new(),
                candidates: BTreeSet::new(),
                maps,
            },
            ArgValue::List(l) => Arg::List(self.eval_list(l, scope)?),
            ArgValue::Expr(e) => match e {
                ExprAst::Ref(n, _) if lookup_list(scope, n).is_some() => {
                    Arg::List(lookup_list(scope, n).unwrap().clone())
                }
                ExprAst::Ref(n, _) | ExprAst::Inst { name: n, .. } => {
                    let pattern = if is_bound(scope, n) {
                        None
                    } else {
                        resolve_pattern(self.lib, scope, n)
                    };
                    match pattern {
                        Some((def, def_scope)) => {
                            if let ExprAst::Ref(..) = e {
                                if def_scope.is_none() && def.arity() == 0 {
                                    let onto = self.expand_definition(n, &pos)?;
                                    return Ok(PosArg {
                                        arg: Arg::Onto {
                                            candidates: onto.signature().clone(),
                                            onto,
                                            maps,
                                        },
                                        pos,
                                    });
                                }
                            }
                            self.injected(e, scope, acc, maps)?
                        }
                        None => Arg::Name {
                            name: substitute_chain(&expr_name(e).ok_or_else(|| not_a_name(e))?, &bindings),
                            maps,
                        },
                    }
                }
                _ => self.injected(e, scope, acc, maps)?,
            },
        };
        Ok(PosArg { arg, pos })
    }

    /// `O1 then G[AP]` is read as `O1 then G[O1 then AP]`: the argument is
    /// expanded in the local environment, and what it adds are the candidates.
    fn injected(
        &mut self,
        e: &ExprAst,
        scope: &ScopeRef<'a>,
        acc: &FlatOntology,
        maps: Vec<(NameTerm, NameTerm)>,
    ) -> Result<Arg, ExpandError> {
        let onto = match e {
            ExprAst::Frames(fs, _) | ExprAst::Braced(fs, _) => {
                let o = self.lower(fs, scope)?;
                return Ok(Arg::Onto {
                    candidates: o.signature().clone(),
                    onto: o,
                    maps,
                });
            }
            _ => self.expand_expr(e, scope, acc.clone())?,
        };
        let candidates = onto
            .signature()
            .iter()
            .filter(|s| !acc.contains_symbol(s))
            .cloned()
            .collect();
        Ok(Arg::Onto {
            onto,
            candidates,
            maps,
        })
    }

    fn eval_list(&mut self, l: &ListExpr, scope: &ScopeRef<'a>) -> Result<Vec<NameTerm>, ExpandError> {
        let mut out = Vec::new();
        let item = |e: &ExprAst, out: &mut Vec<NameTerm>| -> Result<(), ExpandError> {
            if let ExprAst::Ref(n, _) = e {
                if let Some(items) = lookup_list(scope, n) {
                    out.extend(items.iter().cloned());
                    return Ok(());
                }
            }
            let n = expr_name(e).ok_or_else(|| not_a_name(e))?;
            out.push(substitute_chain(&n, &chain(scope)));
            Ok(())
        };
        let mut cur = l;
        loop {
            match cur {
                ListExpr::Empty => break,
                ListExpr::Cons(h, t) => {
                    item(h, &mut out)?;
                    cur = t;
                }
                ListExpr::Items(v) => {
                    for e in v {
                        item(e, &mut out)?;
                    }
                    break;
                }
            }
        }
        Ok(out)
    }
}

/// Reads `a` or `a[b, c[d]]` written in argument position as a name.
fn expr_name(e: &ExprAst) -> Option<NameTerm> {
    match e {
        ExprAst::Ref(n, _) => Some(NameTerm::plain(n.as_str())),
        ExprAst::Inst { name, args, .. } => {
            let mut v = Vec::new();
            for a in args {
                if !a.maps.is_empty() {
                    return None;
                }
                match &a.value {
                    ArgValue::Expr(e) => v.push(expr_name(e)?),
                    _ => return None,
                }
            }
            if v.is_empty() {
                return None;
            }
            Some(NameTerm::with_args(name.as_str(), v))
        }
        _ => None,
    }
}

fn not_a_name(e: &ExprAst) -> ExpandError {
    let name = match e {
        ExprAst::Inst { name, .. } | ExprAst::Ref(name, _) => name.clone(),
        _ => String::new(),
    };
    ExpandError::new(e.span().pos(), ExpandErrorKind::UnknownReference { name })
}

/// Expands a standalone definition with the given depth budget.
pub fn expand_definition(lib: &Library, name: &str, budget: usize) -> Result<FlatOntology, ExpandError> {
    let pos = SourcePos::new("<target>", 1, 1);
    Expander::new(lib, budget).expand_definition(name, &pos)
}

pub fn expand(lib: &Library, inst: &Instantiation, budget: usize) -> Result<FlatOntology, ExpandError> {
    Expander::new(lib, budget).expand(inst)
}
