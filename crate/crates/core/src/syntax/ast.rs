//! Surface syntax tree. Every node records where it started.

use crate::diag::SourcePos;
use crate::model::{NameTerm, SymbolKind};

/// Position of a node in its source file.
///
/// Spans never take part in structural equality: two trees that differ only
/// in layout compare equal.
#[derive(Debug, Clone)]
pub struct Span(pub SourcePos);

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl Span {
    pub fn pos(&self) -> &SourcePos {
        &self.0
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LibraryAst {
    pub items: Vec<PatternDefAst>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternDefAst {
    pub name: String,
    pub params: Vec<ParamClauseAst>,
    pub given: Vec<(String, Span)>,
    pub locals: Vec<PatternDefAst>,
    pub body: ExprAst,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamClauseAst {
    pub optional: bool,
    pub payload: ParamPayload,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamPayload {
    Frames(Vec<FrameAst>),
    List(ListTemplate),
}

/// A list-parameter template: `empty`, `K: x :: xs`, `K: x :: y :: ys` or a
/// closed form such as `K: x :: empty`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ListTemplate {
    /// `None` only for the bare `empty` template.
    pub kind: Option<SymbolKind>,
    pub heads: Vec<String>,
    /// Open tail variable; `None` means the list ends after the heads.
    pub tail: Option<String>,
}

impl ListTemplate {
    pub fn empty() -> Self {
        ListTemplate {
            kind: None,
            heads: Vec::new(),
            tail: None,
        }
    }

    pub fn matches_len(&self, len: usize) -> bool {
        match self.tail {
            Some(_) => len >= self.heads.len(),
            None => len == self.heads.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprAst {
    /// An unbraced sequence of frames.
    Frames(Vec<FrameAst>, Span),
    /// `{ frames }`
    Braced(Vec<FrameAst>, Span),
    Ref(String, Span),
    Then(Box<ExprAst>, Box<ExprAst>),
    Inst {
        name: String,
        args: Vec<ArgAst>,
        span: Span,
    },
}

impl ExprAst {
    pub fn span(&self) -> &Span {
        match self {
            ExprAst::Frames(_, s) | ExprAst::Braced(_, s) | ExprAst::Ref(_, s) => s,
            ExprAst::Then(l, _) => l.span(),
            ExprAst::Inst { span, .. } => span,
        }
    }

    /// The `then`-separated terms, left to right.
    pub fn terms(&self) -> Vec<&ExprAst> {
        match self {
            ExprAst::Then(l, r) => {
                let mut v = l.terms();
                v.extend(r.terms());
                v
            }
            other => vec![other],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArgAst {
    pub value: ArgValue,
    pub maps: Vec<(NameTerm, NameTerm)>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArgValue {
    /// Nothing written between the separators.
    Missing,
    Expr(ExprAst),
    List(ListExpr),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ListExpr {
    Empty,
    Cons(Box<ExprAst>, Box<ListExpr>),
    /// Comma sugar `x1, ..., xn`.
    Items(Vec<ExprAst>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Characteristic {
    Reflexive,
    Transitive,
}

impl Characteristic {
    pub fn keyword(self) -> &'static str {
        match self {
            Characteristic::Reflexive => "Reflexive",
            Characteristic::Transitive => "Transitive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameAst {
    pub body: Frame,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Frame {
    Class {
        name: NameTerm,
        clauses: Vec<ClassClause>,
    },
    ObjectProperty {
        name: NameTerm,
        clauses: Vec<PropertyClause>,
    },
    Individual {
        name: NameTerm,
        clauses: Vec<IndividualClause>,
    },
    DifferentIndividuals(Vec<NameTerm>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassClause {
    /// `EquivalentTo: {i1, ..., in}`
    EquivalentTo(Vec<NameTerm>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropertyClause {
    Domain(Vec<NameTerm>),
    Range(Vec<NameTerm>),
    Characteristics(Vec<Characteristic>),
    SubPropertyOf(Vec<NameTerm>),
    InverseOf(Vec<NameTerm>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IndividualClause {
    Types(Vec<NameTerm>),
    DifferentFrom(Vec<NameTerm>),
    /// `Facts: p o, ...`
    Facts(Vec<(NameTerm, NameTerm)>),
}
