//! Semantic model: symbols, the axiom fragment, flat ontologies and
//! fitting morphisms.
//!
//! Everything here is an immutable value. Axiom sets are kept in canonical
//! form, so structural equality of two [`FlatOntology`] values coincides with
//! equality of the ontologies they denote under "Same Name - Same Thing".

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// The kind of an entity. The order of the variants is the emission order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Class,
    ObjectProperty,
    Individual,
}

impl SymbolKind {
    pub const ALL: [SymbolKind; 3] = [
        SymbolKind::Class,
        SymbolKind::ObjectProperty,
        SymbolKind::Individual,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            SymbolKind::Class => "Class",
            SymbolKind::ObjectProperty => "ObjectProperty",
            SymbolKind::Individual => "Individual",
        }
    }

    pub fn from_keyword(word: &str) -> Option<SymbolKind> {
        match word {
            "Class" => Some(SymbolKind::Class),
            "ObjectProperty" => Some(SymbolKind::ObjectProperty),
            "Individual" => Some(SymbolKind::Individual),
            _ => None,
        }
    }
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// A possibly parameterized name, `base` or `base[arg1,...,argN]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NameTerm {
    pub base: String,
    pub args: Vec<NameTerm>,
}

impl NameTerm {
    pub fn plain(base: impl Into<String>) -> Self {
        NameTerm {
            base: base.into(),
            args: Vec::new(),
        }
    }

    pub fn with_args(base: impl Into<String>, args: Vec<NameTerm>) -> Self {
        NameTerm {
            base: base.into(),
            args,
        }
    }

    pub fn is_plain(&self) -> bool {
        self.args.is_empty()
    }

    /// True if `base` occurs as the base of this term or of any nested argument.
    pub fn mentions_base(&self, base: &str) -> bool {
        self.base == base || self.args.iter().any(|a| a.mentions_base(base))
    }
}

impl fmt::Display for NameTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.base)?;
        if !self.args.is_empty() {
            f.write_str("[")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str("]")?;
        }
        Ok(())
    }
}

/// A kinded name. Equality is (name, kind) equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    pub name: NameTerm,
    pub kind: SymbolKind,
}

impl Symbol {
    pub fn new(name: NameTerm, kind: SymbolKind) -> Self {
        Symbol { name, kind }
    }

    pub fn class(name: &str) -> Self {
        Symbol::new(NameTerm::plain(name), SymbolKind::Class)
    }

    pub fn property(name: &str) -> Self {
        Symbol::new(NameTerm::plain(name), SymbolKind::ObjectProperty)
    }

    pub fn individual(name: &str) -> Self {
        Symbol::new(NameTerm::plain(name), SymbolKind::Individual)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind, self.name)
    }
}

/// The axiom fragment. Every position has a fixed kind, see [`Axiom::symbols`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    Reflexive(NameTerm),
    Transitive(NameTerm),
    InverseOf(NameTerm, NameTerm),
    Domain(NameTerm, NameTerm),
    Range(NameTerm, NameTerm),
    /// `SubPropertyOf(sub, sup)`
    SubPropertyOf(NameTerm, NameTerm),
    /// `ClassAssertion(class, individual)`
    ClassAssertion(NameTerm, NameTerm),
    /// `PropertyAssertion(property, subject, object)`
    PropertyAssertion(NameTerm, NameTerm, NameTerm),
    /// At least two members after canonicalization.
    DifferentIndividuals(Vec<NameTerm>),
    /// `C EquivalentTo {i1, ..., in}`
    EquivalentToUnionOfIndividuals(NameTerm, Vec<NameTerm>),
}

impl Axiom {
    /// Every symbol the axiom references, with the kind its position demands.
    pub fn symbols(&self) -> Vec<Symbol> {
        use SymbolKind::*;
        let s = |n: &NameTerm, k| Symbol::new(n.clone(), k);
        match self {
            Axiom::Reflexive(p) | Axiom::Transitive(p) => vec![s(p, ObjectProperty)],
            Axiom::InverseOf(p, q) | Axiom::SubPropertyOf(p, q) => {
                vec![s(p, ObjectProperty), s(q, ObjectProperty)]
            }
            Axiom::Domain(p, c) | Axiom::Range(p, c) => vec![s(p, ObjectProperty), s(c, Class)],
            Axiom::ClassAssertion(c, i) => vec![s(c, Class), s(i, Individual)],
            Axiom::PropertyAssertion(p, a, b) => {
                vec![s(p, ObjectProperty), s(a, Individual), s(b, Individual)]
            }
            Axiom::DifferentIndividuals(is) => is.iter().map(|i| s(i, Individual)).collect(),
            Axiom::EquivalentToUnionOfIndividuals(c, is) => std::iter::once(s(c, Class))
                .chain(is.iter().map(|i| s(i, Individual)))
                .collect(),
        }
    }

    pub fn mentions(&self, dead: &BTreeSet<Symbol>) -> bool {
        self.symbols().iter().any(|s| dead.contains(s))
    }

    /// Rewrites every name occurrence, keeping the positional kind.
    pub fn map_names<E>(
        &self,
        mut f: impl FnMut(&NameTerm, SymbolKind) -> Result<NameTerm, E>,
    ) -> Result<Axiom, E> {
        use SymbolKind::*;
        let ax = match self {
            Axiom::Reflexive(p) => Axiom::Reflexive(f(p, ObjectProperty)?),
            Axiom::Transitive(p) => Axiom::Transitive(f(p, ObjectProperty)?),
            Axiom::InverseOf(p, q) => Axiom::InverseOf(f(p, ObjectProperty)?, f(q, ObjectProperty)?),
            Axiom::Domain(p, c) => Axiom::Domain(f(p, ObjectProperty)?, f(c, Class)?),
            Axiom::Range(p, c) => Axiom::Range(f(p, ObjectProperty)?, f(c, Class)?),
            Axiom::SubPropertyOf(p, q) => {
                Axiom::SubPropertyOf(f(p, ObjectProperty)?, f(q, ObjectProperty)?)
            }
            Axiom::ClassAssertion(c, i) => Axiom::ClassAssertion(f(c, Class)?, f(i, Individual)?),
            Axiom::PropertyAssertion(p, a, b) => Axiom::PropertyAssertion(
                f(p, ObjectProperty)?,
                f(a, Individual)?,
                f(b, Individual)?,
            ),
            Axiom::DifferentIndividuals(is) => Axiom::DifferentIndividuals(
                is.iter().map(|i| f(i, Individual)).collect::<Result<_, _>>()?,
            ),
            Axiom::EquivalentToUnionOfIndividuals(c, is) => Axiom::EquivalentToUnionOfIndividuals(
                f(c, Class)?,
                is.iter().map(|i| f(i, Individual)).collect::<Result<_, _>>()?,
            ),
        };
        Ok(canonicalize_axiom(ax))
    }
}

impl fmt::Display for Axiom {
    /// The canonical single-line form used by the structural dump.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, xs: &[NameTerm]) -> fmt::Result {
            for x in xs {
                write!(f, " {x}")?;
            }
            Ok(())
        }
        match self {
            Axiom::Reflexive(p) => write!(f, "Reflexive {p}"),
            Axiom::Transitive(p) => write!(f, "Transitive {p}"),
            Axiom::InverseOf(p, q) => write!(f, "InverseOf {p} {q}"),
            Axiom::Domain(p, c) => write!(f, "Domain {p} {c}"),
            Axiom::Range(p, c) => write!(f, "Range {p} {c}"),
            Axiom::SubPropertyOf(p, q) => write!(f, "SubPropertyOf {p} {q}"),
            Axiom::ClassAssertion(c, i) => write!(f, "ClassAssertion {c} {i}"),
            Axiom::PropertyAssertion(p, a, b) => write!(f, "PropertyAssertion {p} {a} {b}"),
            Axiom::DifferentIndividuals(is) => {
                f.write_str("DifferentIndividuals")?;
                list(f, is)
            }
            Axiom::EquivalentToUnionOfIndividuals(c, is) => {
                write!(f, "EquivalentToUnionOfIndividuals {c}")?;
                list(f, is)
            }
        }
    }
}

/// Sorts the order-insensitive parts of an axiom. Idempotent.
pub fn canonicalize_axiom(a: Axiom) -> Axiom {
    fn sorted(mut xs: Vec<NameTerm>) -> Vec<NameTerm> {
        xs.sort();
        xs.dedup();
        xs
    }
    match a {
        Axiom::InverseOf(p, q) if q < p => Axiom::InverseOf(q, p),
        Axiom::DifferentIndividuals(is) => Axiom::DifferentIndividuals(sorted(is)),
        Axiom::EquivalentToUnionOfIndividuals(c, is) => {
            Axiom::EquivalentToUnionOfIndividuals(c, sorted(is))
        }
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("'{name}' is used both as {first} and as {second}")]
    KindClash {
        name: NameTerm,
        first: SymbolKind,
        second: SymbolKind,
    },
    #[error("morphism is not defined on {0}")]
    UnmappedSymbol(Symbol),
    #[error("morphism maps {from} to {to}, which changes its kind")]
    KindMismatch { from: Symbol, to: Symbol },
    #[error("DifferentIndividuals needs at least two distinct individuals")]
    DegenerateDifferentIndividuals,
}

/// A signature together with a canonical, duplicate-free axiom set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct FlatOntology {
    signature: BTreeSet<Symbol>,
    axioms: BTreeSet<Axiom>,
}

impl FlatOntology {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_parts(
        symbols: impl IntoIterator<Item = Symbol>,
        axioms: impl IntoIterator<Item = Axiom>,
    ) -> Result<Self, ModelError> {
        let mut o = FlatOntology::new();
        for s in symbols {
            o.declare(s)?;
        }
        for a in axioms {
            o.add_axiom(a)?;
        }
        Ok(o)
    }

    pub fn signature(&self) -> &BTreeSet<Symbol> {
        &self.signature
    }

    pub fn axioms(&self) -> &BTreeSet<Axiom> {
        &self.axioms
    }

    pub fn is_empty(&self) -> bool {
        self.signature.is_empty() && self.axioms.is_empty()
    }

    pub fn kind_of(&self, name: &NameTerm) -> Option<SymbolKind> {
        SymbolKind::ALL.into_iter().find(|&k| {
            self.signature.contains(&Symbol::new(name.clone(), k))
        })
    }

    pub fn contains_symbol(&self, s: &Symbol) -> bool {
        self.signature.contains(s)
    }

    pub fn contains_axiom(&self, a: &Axiom) -> bool {
        self.axioms.contains(&canonicalize_axiom(a.clone()))
    }

    pub fn declare(&mut self, s: Symbol) -> Result<(), ModelError> {
        if let Some(k) = self.kind_of(&s.name) {
            if k != s.kind {
                return Err(ModelError::KindClash {
                    name: s.name,
                    first: k,
                    second: s.kind,
                });
            }
            return Ok(());
        }
        self.signature.insert(s);
        Ok(())
    }

    /// Adds the canonical form of `a`, declaring every symbol it references.
    pub fn add_axiom(&mut self, a: Axiom) -> Result<(), ModelError> {
        let a = canonicalize_axiom(a);
        if let Axiom::DifferentIndividuals(is) = &a {
            if is.len() < 2 {
                return Err(ModelError::DegenerateDifferentIndividuals);
            }
        }
        for s in a.symbols() {
            self.declare(s)?;
        }
        self.axioms.insert(a);
        Ok(())
    }

    /// In-place "Same Name - Same Thing" union.
    pub fn merge(&mut self, other: &FlatOntology) -> Result<(), ModelError> {
        for s in &other.signature {
            self.declare(s.clone())?;
        }
        self.axioms.extend(other.axioms.iter().cloned());
        Ok(())
    }

    /// Drops the given symbols and every axiom mentioning one of them.
    pub fn without(&self, dead: &BTreeSet<Symbol>) -> FlatOntology {
        FlatOntology {
            signature: self.signature.difference(dead).cloned().collect(),
            axioms: self
                .axioms
                .iter()
                .filter(|a| !a.mentions(dead))
                .cloned()
                .collect(),
        }
    }
}

/// Union of two ontologies; repeated entities denote the same entity.
pub fn union_flat(a: &FlatOntology, b: &FlatOntology) -> Result<FlatOntology, ModelError> {
    let mut out = a.clone();
    out.merge(b)?;
    Ok(out)
}

/// The axioms of `o` that reference at least one symbol of `dead`.
pub fn axioms_mentioning(o: &FlatOntology, dead: &BTreeSet<Symbol>) -> BTreeSet<Axiom> {
    o.axioms.iter().filter(|a| a.mentions(dead)).cloned().collect()
}

/// A kind-preserving symbol map.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FittingMorphism {
    map: BTreeMap<Symbol, Symbol>,
}

impl FittingMorphism {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn identity_on<'a>(symbols: impl IntoIterator<Item = &'a Symbol>) -> Self {
        FittingMorphism {
            map: symbols.into_iter().map(|s| (s.clone(), s.clone())).collect(),
        }
    }

    pub fn insert(&mut self, from: Symbol, to: Symbol) -> Result<(), ModelError> {
        if from.kind != to.kind {
            return Err(ModelError::KindMismatch { from, to });
        }
        self.map.insert(from, to);
        Ok(())
    }

    pub fn get(&self, s: &Symbol) -> Option<&Symbol> {
        self.map.get(s)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Symbol)> {
        self.map.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Symbol> {
        self.map.keys()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// `self ∘ first`: apply `first`, then `self`. Symbols `self` does not
    /// cover keep the image `first` gave them.
    pub fn after(&self, first: &FittingMorphism) -> FittingMorphism {
        FittingMorphism {
            map: first
                .map
                .iter()
                .map(|(k, v)| (k.clone(), self.map.get(v).unwrap_or(v).clone()))
                .collect(),
        }
    }

    fn image(&self, s: &Symbol) -> Result<Symbol, ModelError> {
        self.map
            .get(s)
            .cloned()
            .ok_or_else(|| ModelError::UnmappedSymbol(s.clone()))
    }

    pub fn apply_axiom(&self, a: &Axiom) -> Result<Axiom, ModelError> {
        a.map_names(|n, k| Ok(self.image(&Symbol::new(n.clone(), k))?.name))
    }
}

/// Renames every symbol and axiom occurrence of `o` along `m`.
pub fn apply_morphism(m: &FittingMorphism, o: &FlatOntology) -> Result<FlatOntology, ModelError> {
    let mut out = FlatOntology::new();
    for s in &o.signature {
        out.declare(m.image(s)?)?;
    }
    for a in &o.axioms {
        out.add_axiom(m.apply_axiom(a)?)?;
    }
    Ok(out)
}
