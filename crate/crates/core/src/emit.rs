//! Output: stratified names, Manchester-style text and the structural dump.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use thiserror::Error;

use crate::elaborate::{lower_frames, ElabError};
use crate::model::{Axiom, FlatOntology, NameTerm, Symbol, SymbolKind};
use crate::syntax::{parse_frames, SyntaxError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmitError {
    #[error("'{first}' and '{second}' both stratify to '{flat}'")]
    StratificationClash {
        first: NameTerm,
        second: NameTerm,
        flat: String,
    },
    #[error("'{0}' is a parameterized name; stratify before emitting Manchester syntax")]
    UnstratifiedName(NameTerm),
}

/// `base[a1, ..., ak]` becomes `base_a1_..._ak`, inner terms first.
pub fn stratify_name(n: &NameTerm) -> String {
    let mut s = n.base.clone();
    for a in &n.args {
        s.push('_');
        s.push_str(&stratify_name(a));
    }
    s
}

pub fn stratify(o: &FlatOntology) -> Result<FlatOntology, EmitError> {
    let mut images: BTreeMap<String, &NameTerm> = BTreeMap::new();
    for s in o.signature() {
        let flat = stratify_name(&s.name);
        match images.get(&flat) {
            Some(prev) if **prev != s.name => {
                return Err(EmitError::StratificationClash {
                    first: (*prev).clone(),
                    second: s.name.clone(),
                    flat,
                })
            }
            _ => {
                images.insert(flat, &s.name);
            }
        }
    }
    let flat = |n: &NameTerm| NameTerm::plain(stratify_name(n));
    let symbols = o.signature().iter().map(|s| Symbol::new(flat(&s.name), s.kind));
    let axioms = o
        .axioms()
        .iter()
        .map(|a| a.map_names(|n, _| Ok::<_, std::convert::Infallible>(flat(n))).unwrap());
    // Injective on names, so kinds and DifferentIndividuals arities survive.
    Ok(FlatOntology::from_parts(symbols, axioms).expect("injective renaming"))
}

#[derive(Default)]
struct PropertyFrame {
    domain: Vec<String>,
    range: Vec<String>,
    characteristics: Vec<&'static str>,
    sub: Vec<String>,
    inverse: Vec<String>,
}

#[derive(Default)]
struct IndividualFrame {
    types: Vec<String>,
    facts: Vec<String>,
}

fn names(xs: &[NameTerm]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Deterministic Manchester-style text: one frame per symbol, sorted by kind
/// and name, followed by the DifferentIndividuals frames.
pub fn emit_manchester(o: &FlatOntology) -> Result<String, EmitError> {
    if let Some(s) = o.signature().iter().find(|s| !s.name.is_plain()) {
        return Err(EmitError::UnstratifiedName(s.name.clone()));
    }
    let key = |n: &NameTerm| n.base.clone();
    let mut classes: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut props: BTreeMap<String, PropertyFrame> = BTreeMap::new();
    let mut inds: BTreeMap<String, IndividualFrame> = BTreeMap::new();
    let mut different = Vec::new();
    for a in o.axioms() {
        match a {
            Axiom::EquivalentToUnionOfIndividuals(c, is) => {
                classes.entry(key(c)).or_default().push(format!("{{{}}}", names(is)))
            }
            Axiom::Reflexive(p) => props.entry(key(p)).or_default().characteristics.push("Reflexive"),
            Axiom::Transitive(p) => props.entry(key(p)).or_default().characteristics.push("Transitive"),
            Axiom::Domain(p, c) => props.entry(key(p)).or_default().domain.push(key(c)),
            Axiom::Range(p, c) => props.entry(key(p)).or_default().range.push(key(c)),
            Axiom::SubPropertyOf(p, q) => props.entry(key(p)).or_default().sub.push(key(q)),
            Axiom::InverseOf(p, q) => props.entry(key(p)).or_default().inverse.push(key(q)),
            Axiom::ClassAssertion(c, i) => inds.entry(key(i)).or_default().types.push(key(c)),
            Axiom::PropertyAssertion(p, a, b) => inds
                .entry(key(a))
                .or_default()
                .facts
                .push(format!("{p} {b}")),
            Axiom::DifferentIndividuals(is) => different.push(names(is)),
        }
    }
    let mut frames: Vec<String> = Vec::new();
    for s in o.signature() {
        let name = key(&s.name);
        let mut f = format!("{}: {name}\n", s.kind);
        let mut clause = |kw: &str, items: &[String]| {
            if !items.is_empty() {
                writeln!(f, "    {kw}: {}", items.join(", ")).unwrap();
            }
        };
        match s.kind {
            SymbolKind::Class => {
                for eq in classes.get(&name).into_iter().flatten() {
                    clause("EquivalentTo", std::slice::from_ref(eq));
                }
            }
            SymbolKind::ObjectProperty => {
                if let Some(p) = props.get(&name) {
                    clause("Domain", &p.domain);
                    clause("Range", &p.range);
                    let cs: Vec<String> = p.characteristics.iter().map(|c| c.to_string()).collect();
                    clause("Characteristics", &cs);
                    clause("SubPropertyOf", &p.sub);
                    clause("InverseOf", &p.inverse);
                }
            }
            SymbolKind::Individual => {
                if let Some(i) = inds.get(&name) {
                    clause("Types", &i.types);
                    clause("Facts", &i.facts);
                }
            }
        }
        frames.push(f);
    }
    for d in different {
        frames.push(format!("DifferentIndividuals: {d}\n"));
    }
    Ok(frames.join("\n"))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReadError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Lower(#[from] ElabError),
}

/// Reads Manchester-style frames back into a flat ontology.
pub fn parse_manchester(text: &str, file: &str) -> Result<FlatOntology, ReadError> {
    let frames = parse_frames(text, file)?;
    Ok(lower_frames(&frames, &mut |n| vec![n.clone()])?)
}

/// `SYM kind name` and `AX axiom` lines, sorted together.
pub fn emit_struct_dump(o: &FlatOntology) -> String {
    let mut lines: BTreeSet<String> = o
        .signature()
        .iter()
        .map(|s| format!("SYM {} {}", s.kind, s.name))
        .collect();
    lines.extend(o.axioms().iter().map(|a| format!("AX {a}")));
    let mut out = String::new();
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}
