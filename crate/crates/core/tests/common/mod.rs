#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use godp::elaborate::{build_library, Library};
use godp::instantiate::{expand_definition, DEFAULT_DEPTH};
use godp::model::FlatOntology;
use godp::syntax::ast::LibraryAst;
use godp::syntax::parse_library;

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

/// The library files, in dependency order.
pub fn library_files() -> Vec<PathBuf> {
    ["relations.gdp", "person_rels.gdp", "value_sets.gdp", "graded.gdp", "empty.gdp"]
        .iter()
        .map(|f| corpus_dir().join(f))
        .collect()
}

pub fn error_files() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(corpus_dir().join("errors"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "gdp"))
        .collect();
    v.sort();
    v
}

pub fn all_files() -> Vec<PathBuf> {
    let mut v = library_files();
    v.extend(error_files());
    v
}

pub fn parse_files(files: &[PathBuf]) -> LibraryAst {
    let mut ast = LibraryAst::default();
    for f in files {
        let text = fs::read_to_string(f).unwrap();
        let lib = parse_library(&text, &f.display().to_string())
            .unwrap_or_else(|e| panic!("{}: {e}", f.display()));
        ast.items.extend(lib.items);
    }
    ast
}

pub fn corpus_library() -> Library {
    build_library(&parse_files(&library_files())).unwrap_or_else(|e| panic!("{e:?}"))
}

pub fn library_from(extra: &str) -> Library {
    let mut ast = parse_files(&library_files());
    ast.items.extend(parse_library(extra, "extra.gdp").unwrap().items);
    build_library(&ast).unwrap_or_else(|e| panic!("{e:?}"))
}

/// Every definition of the corpus that expands on its own.
pub fn corpus_targets(lib: &Library) -> Vec<String> {
    lib.defs()
        .filter(|d| d.arity() == 0)
        .map(|d| d.name.clone())
        .collect()
}

pub fn expand(lib: &Library, target: &str) -> FlatOntology {
    expand_definition(lib, target, DEFAULT_DEPTH).unwrap_or_else(|e| panic!("{target}: {e}"))
}

pub fn individuals(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// `ontology T = GradedRels[p; D; R; ...]` over `n` fresh individuals.
pub fn graded_program(n: usize) -> String {
    let items = if n == 0 { "empty".to_string() } else { individuals("g", n).join(", ") };
    format!("ontology T = GradedRels[p; D; R; {items}]")
}

pub fn valset_program(n: usize, ordered: bool) -> String {
    let items = individuals("v", n).join(", ");
    if ordered {
        format!("ontology T = ValSet[V; {items}; greater[V]]")
    } else {
        format!("ontology T = ValSet[V; {items}]")
    }
}

pub mod strategies {
    use proptest::prelude::*;

    /// The suffix keeps names in different argument positions apart, so a
    /// property never shares a name with a class.
    fn ident(slot: usize) -> impl Strategy<Value = String> {
        "[a-z][a-zA-Z0-9]{0,5}".prop_map(move |s| format!("x{s}_{slot}"))
    }

    /// Small random instantiations of the corpus patterns, each defining `T`.
    pub fn program() -> impl Strategy<Value = String> {
        prop_oneof![
            (ident(0), ident(1)).prop_map(|(p, c)| format!("ontology T = TransitiveRelation[{p}; Class: {c}]")),
            (ident(0), ident(1)).prop_map(|(p, c)| format!("ontology T = ReflexiveRelation[{p}; Class: {c}]")),
            (ident(0), ident(1), ident(2)).prop_map(|(a, b, c)| format!(
                "ontology T = Class: {c} then TransitiveRelation[{a}; {c}] then SubProp[{b}; {c}; {c}; {a}]"
            )),
            (ident(0), ident(1), ident(2), ident(3)).prop_map(|(p, q, d, r)| format!(
                "ontology T = InverseRelation[{p}; {q}; Class: {d}; Class: {r}]"
            )),
            (1usize..6, any::<bool>()).prop_map(|(n, o)| super::valset_program(n, o)),
            (0usize..6).prop_map(super::graded_program),
        ]
    }
}
