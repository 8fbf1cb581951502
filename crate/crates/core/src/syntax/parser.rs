//! Recursive-descent parser for pattern libraries.

use std::collections::HashSet;

use crate::diag::SourcePos;
use crate::model::{NameTerm, SymbolKind};
use crate::syntax::ast::*;
use crate::syntax::lexer::{tokenize, Tok, Token};
use crate::syntax::SyntaxError;

const FRAME_KEYWORDS: [&str; 4] = ["Class", "ObjectProperty", "Individual", "DifferentIndividuals"];

pub fn parse_library(text: &str, file: &str) -> Result<LibraryAst, SyntaxError> {
    let mut p = Parser::new(tokenize(text, file)?);
    let mut items = Vec::new();
    loop {
        match p.peek() {
            Tok::Eof => break,
            Tok::Ontology => items.push(p.pattern_def()?),
            _ => return Err(p.unexpected(&["'ontology'", "end of input"])),
        }
    }
    Ok(LibraryAst { items })
}

/// Parses a bare sequence of frames, e.g. the contents of a `.omn` file.
pub fn parse_frames(text: &str, file: &str) -> Result<Vec<FrameAst>, SyntaxError> {
    let mut p = Parser::new(tokenize(text, file)?);
    let frames = p.frames()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected(&["a frame keyword", "end of input"]));
    }
    Ok(frames)
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
}

impl Parser {
    fn new(toks: Vec<Token>) -> Self {
        Parser { toks, i: 0 }
    }

    fn peek(&self) -> &Tok {
        self.peek_at(0)
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let j = (self.i + k).min(self.toks.len() - 1);
        &self.toks[j].tok
    }

    fn pos(&self) -> SourcePos {
        self.toks[self.i].pos.clone()
    }

    fn span(&self) -> Span {
        Span(self.pos())
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &[&str]) -> SyntaxError {
        SyntaxError::Parse {
            pos: self.pos(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Token, SyntaxError> {
        if *self.peek() == tok {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&[&tok.to_string()]))
        }
    }

    fn ident(&mut self) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected(&["identifier"])),
        }
    }

    fn ident_is(&self, k: usize, word: &str) -> bool {
        matches!(self.peek_at(k), Tok::Ident(s) if s == word)
    }

    /// `Ident :` at the cursor, i.e. the start of a frame or clause.
    fn keyword_colon(&self) -> Option<&str> {
        match (self.peek_at(0), self.peek_at(1)) {
            (Tok::Ident(s), Tok::Colon) => Some(s),
            _ => None,
        }
    }

    fn pattern_def(&mut self) -> Result<PatternDefAst, SyntaxError> {
        let span = self.span();
        self.expect(Tok::Ontology)?;
        let name = self.ident()?;
        let mut params = Vec::new();
        if self.eat(&Tok::LBracket) {
            if *self.peek() != Tok::RBracket {
                params.push(self.param()?);
                while self.eat(&Tok::Semi) {
                    params.push(self.param()?);
                }
            }
            self.expect(Tok::RBracket)?;
        }
        let mut given = Vec::new();
        if self.eat(&Tok::Given) {
            loop {
                let s = self.span();
                given.push((self.ident()?, s));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::Eq)?;
        let mut locals = Vec::new();
        if self.eat(&Tok::Let) {
            while *self.peek() == Tok::Ontology {
                locals.push(self.pattern_def()?);
            }
            self.expect(Tok::In)?;
        }
        let body = self.expr()?;
        self.eat(&Tok::End);
        match self.peek() {
            Tok::Ontology | Tok::In | Tok::Eof => {}
            _ => {
                return Err(self.unexpected(&["'then'", "'end'", "'ontology'", "end of input"]))
            }
        }
        Ok(PatternDefAst {
            name,
            params,
            given,
            locals,
            body,
            span,
        })
    }

    fn param(&mut self) -> Result<ParamClauseAst, SyntaxError> {
        let span = self.span();
        let optional = self.eat(&Tok::Question);
        let payload = if self.eat(&Tok::Empty) {
            ParamPayload::List(ListTemplate::empty())
        } else if self.eat(&Tok::LBrace) {
            let frames = self.frames()?;
            self.expect(Tok::RBrace)?;
            ParamPayload::Frames(frames)
        } else if matches!(self.peek_at(2), Tok::Ident(_))
            && *self.peek_at(1) == Tok::Colon
            && *self.peek_at(3) == Tok::ColonColon
        {
            ParamPayload::List(self.list_template()?)
        } else {
            let frames = self.frames()?;
            if frames.is_empty() {
                return Err(self.unexpected(&["a parameter"]));
            }
            ParamPayload::Frames(frames)
        };
        Ok(ParamClauseAst {
            optional,
            payload,
            span,
        })
    }

    fn list_template(&mut self) -> Result<ListTemplate, SyntaxError> {
        let kind_pos = self.span();
        let word = self.ident()?;
        let kind = SymbolKind::from_keyword(&word).ok_or_else(|| SyntaxError::Parse {
            pos: kind_pos.0.clone(),
            expected: vec!["'Class'".into(), "'ObjectProperty'".into(), "'Individual'".into()],
            found: format!("identifier '{word}'"),
        })?;
        self.expect(Tok::Colon)?;
        let mut heads = vec![self.ident()?];
        let mut tail = None;
        loop {
            self.expect(Tok::ColonColon)?;
            if self.eat(&Tok::Empty) {
                break;
            }
            let at = self.pos();
            let name = self.ident()?;
            if *self.peek() == Tok::ColonColon {
                heads.push(name);
                continue;
            }
            let mut seen = HashSet::new();
            if heads.iter().any(|h| h == &name) || !heads.iter().all(|h| seen.insert(h)) {
                return Err(SyntaxError::DuplicateListVariable { pos: at, name });
            }
            tail = Some(name);
            break;
        }
        Ok(ListTemplate {
            kind: Some(kind),
            heads,
            tail,
        })
    }

    fn expr(&mut self) -> Result<ExprAst, SyntaxError> {
        let mut e = self.term()?;
        while self.eat(&Tok::Then) {
            let r = self.term()?;
            e = ExprAst::Then(Box::new(e), Box::new(r));
        }
        Ok(e)
    }

    fn term(&mut self) -> Result<ExprAst, SyntaxError> {
        let span = self.span();
        if self.eat(&Tok::LBrace) {
            let frames = self.frames()?;
            self.expect(Tok::RBrace)?;
            return Ok(ExprAst::Braced(frames, span));
        }
        if self.keyword_colon().is_some() {
            let frames = self.frames()?;
            return Ok(ExprAst::Frames(frames, span));
        }
        let name = match self.peek() {
            Tok::Ident(_) => self.ident()?,
            _ => return Err(self.unexpected(&["'{'", "a frame", "identifier"])),
        };
        if !self.eat(&Tok::LBracket) {
            return Ok(ExprAst::Ref(name, span));
        }
        let mut args = vec![self.arg()?];
        while self.eat(&Tok::Semi) {
            args.push(self.arg()?);
        }
        self.expect(Tok::RBracket)?;
        Ok(ExprAst::Inst { name, args, span })
    }

    fn arg(&mut self) -> Result<ArgAst, SyntaxError> {
        let span = self.span();
        let value = match self.peek() {
            Tok::Semi | Tok::RBracket | Tok::Fit => ArgValue::Missing,
            Tok::Empty => {
                self.bump();
                ArgValue::List(ListExpr::Empty)
            }
            _ => {
                let first = self.term()?;
                match self.peek() {
                    Tok::ColonColon => {
                        self.bump();
                        ArgValue::List(ListExpr::Cons(Box::new(first), Box::new(self.list_rest()?)))
                    }
                    Tok::Comma => ArgValue::List(ListExpr::Items(self.items(first)?)),
                    Tok::Then => {
                        let mut e = first;
                        while self.eat(&Tok::Then) {
                            let r = self.term()?;
                            e = ExprAst::Then(Box::new(e), Box::new(r));
                        }
                        ArgValue::Expr(e)
                    }
                    _ => ArgValue::Expr(first),
                }
            }
        };
        let mut maps = Vec::new();
        if self.eat(&Tok::Fit) {
            loop {
                let from = self.name_term()?;
                self.expect(Tok::MapsTo)?;
                let to = self.name_term()?;
                maps.push((from, to));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        match self.peek() {
            Tok::Semi | Tok::RBracket => Ok(ArgAst { value, maps, span }),
            _ => Err(self.unexpected(&["';'", "']'"])),
        }
    }

    fn list_rest(&mut self) -> Result<ListExpr, SyntaxError> {
        if self.eat(&Tok::Empty) {
            return Ok(ListExpr::Empty);
        }
        let first = self.term()?;
        if self.eat(&Tok::ColonColon) {
            return Ok(ListExpr::Cons(Box::new(first), Box::new(self.list_rest()?)));
        }
        Ok(ListExpr::Items(self.items(first)?))
    }

    fn items(&mut self, first: ExprAst) -> Result<Vec<ExprAst>, SyntaxError> {
        let mut items = vec![first];
        while self.eat(&Tok::Comma) {
            items.push(self.term()?);
        }
        Ok(items)
    }

    fn name_term(&mut self) -> Result<NameTerm, SyntaxError> {
        let base = self.ident()?;
        let mut args = Vec::new();
        if self.eat(&Tok::LBracket) {
            args.push(self.name_term()?);
            while self.eat(&Tok::Comma) {
                args.push(self.name_term()?);
            }
            self.expect(Tok::RBracket)?;
        }
        Ok(NameTerm { base, args })
    }

    fn name_list(&mut self) -> Result<Vec<NameTerm>, SyntaxError> {
        let mut v = vec![self.name_term()?];
        while self.eat(&Tok::Comma) {
            v.push(self.name_term()?);
        }
        Ok(v)
    }

    fn frames(&mut self) -> Result<Vec<FrameAst>, SyntaxError> {
        let mut frames = Vec::new();
        while let Some(word) = self.keyword_colon() {
            if !FRAME_KEYWORDS.contains(&word) {
                let word = word.to_string();
                return Err(SyntaxError::UnknownFrame {
                    pos: self.pos(),
                    keyword: word,
                });
            }
            frames.push(self.frame()?);
        }
        Ok(frames)
    }

    fn clause_keyword(&mut self, allowed: &[&str]) -> Option<String> {
        let word = self.keyword_colon()?.to_string();
        if allowed.contains(&word.as_str()) {
            self.bump();
            self.bump();
            Some(word)
        } else {
            None
        }
    }

    fn frame(&mut self) -> Result<FrameAst, SyntaxError> {
        let span = self.span();
        let word = self.ident()?;
        self.expect(Tok::Colon)?;
        let body = match word.as_str() {
            "Class" => {
                let name = self.name_term()?;
                let mut clauses = Vec::new();
                while self.clause_keyword(&["EquivalentTo"]).is_some() {
                    self.expect(Tok::LBrace)?;
                    let members = if *self.peek() == Tok::RBrace {
                        Vec::new()
                    } else {
                        self.name_list()?
                    };
                    self.expect(Tok::RBrace)?;
                    clauses.push(ClassClause::EquivalentTo(members));
                }
                Frame::Class { name, clauses }
            }
            "ObjectProperty" => {
                let name = self.name_term()?;
                let mut clauses = Vec::new();
                while let Some(kw) = self.clause_keyword(&[
                    "Domain",
                    "Range",
                    "Characteristics",
                    "SubPropertyOf",
                    "InverseOf",
                ]) {
                    clauses.push(match kw.as_str() {
                        "Domain" => PropertyClause::Domain(self.name_list()?),
                        "Range" => PropertyClause::Range(self.name_list()?),
                        "SubPropertyOf" => PropertyClause::SubPropertyOf(self.name_list()?),
                        "InverseOf" => PropertyClause::InverseOf(self.name_list()?),
                        _ => PropertyClause::Characteristics(self.characteristics()?),
                    });
                }
                Frame::ObjectProperty { name, clauses }
            }
            "Individual" => {
                let name = self.name_term()?;
                let mut clauses = Vec::new();
                while let Some(kw) = self.clause_keyword(&["Types", "DifferentFrom", "Facts"]) {
                    clauses.push(match kw.as_str() {
                        "Types" => IndividualClause::Types(self.name_list()?),
                        "DifferentFrom" => IndividualClause::DifferentFrom(self.name_list()?),
                        _ => {
                            let mut facts = Vec::new();
                            loop {
                                let p = self.name_term()?;
                                let o = self.name_term()?;
                                facts.push((p, o));
                                if !self.eat(&Tok::Comma) {
                                    break;
                                }
                            }
                            IndividualClause::Facts(facts)
                        }
                    });
                }
                Frame::Individual { name, clauses }
            }
            _ => Frame::DifferentIndividuals(self.name_list()?),
        };
        Ok(FrameAst { body, span })
    }

    fn characteristics(&mut self) -> Result<Vec<Characteristic>, SyntaxError> {
        let mut v = Vec::new();
        loop {
            let c = if self.ident_is(0, "Transitive") {
                Characteristic::Transitive
            } else if self.ident_is(0, "Reflexive") {
                Characteristic::Reflexive
            } else {
                return Err(self.unexpected(&["'Transitive'", "'Reflexive'"]));
            };
            self.bump();
            v.push(c);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lib(s: &str) -> LibraryAst {
        parse_library(s, "t.gdp").unwrap()
    }

    #[test]
    fn empty_input() {
        assert!(lib("").items.is_empty());
        assert!(lib("  %% only a comment\n").items.is_empty());
    }

    #[test]
    fn reflexive_relation_header() {
        let l = lib("ontology ReflexiveRelation [ObjectProperty: r; Class: C] =\n  ObjectProperty: r Characteristics: Reflexive Domain: C Range: C\nend");
        assert_eq!(l.items.len(), 1);
        assert_eq!(l.items[0].name, "ReflexiveRelation");
        assert_eq!(l.items[0].params.len(), 2);
    }

    #[test]
    fn list_parameter_header() {
        let l = lib("ontology G [Class: C :: Cs] = {}");
        assert_eq!(
            l.items[0].params[0].payload,
            ParamPayload::List(ListTemplate {
                kind: Some(SymbolKind::Class),
                heads: vec!["C".into()],
                tail: Some("Cs".into())
            })
        );
        let l = lib("ontology G [Individual: a :: b :: empty; empty] = {}");
        assert_eq!(
            l.items[0].params[0].payload,
            ParamPayload::List(ListTemplate {
                kind: Some(SymbolKind::Individual),
                heads: vec!["a".into(), "b".into()],
                tail: None
            })
        );
        assert_eq!(l.items[0].params[1].payload, ParamPayload::List(ListTemplate::empty()));
        assert!(matches!(
            parse_library("ontology G [Class: C :: C] = {}", "t.gdp"),
            Err(SyntaxError::DuplicateListVariable { .. })
        ));
    }

    #[test]
    fn arguments_and_lists() {
        let l = lib("ontology X = A[p; ; x :: xs; a, b, c; empty; {Class: D} fit C |-> D; q[Val]]");
        let ExprAst::Inst { args, .. } = &l.items[0].body else {
            panic!("expected instantiation")
        };
        assert_eq!(args.len(), 7);
        assert_eq!(args[1].value, ArgValue::Missing);
        assert!(matches!(&args[2].value, ArgValue::List(ListExpr::Cons(_, _))));
        assert!(matches!(&args[3].value, ArgValue::List(ListExpr::Items(v)) if v.len() == 3));
        assert_eq!(args[4].value, ArgValue::List(ListExpr::Empty));
        assert_eq!(args[5].maps, vec![(NameTerm::plain("C"), NameTerm::plain("D"))]);
        assert!(matches!(&args[6].value, ArgValue::Expr(ExprAst::Inst { name, .. }) if name == "q"));
    }

    #[test]
    fn let_blocks_and_given() {
        let l = lib("ontology V [Class: Val] given Base, Other = let ontology S [empty] = {} ontology S [Individual: x :: xs] = S[xs] in S[empty] end");
        let d = &l.items[0];
        assert_eq!(d.given.iter().map(|g| g.0.as_str()).collect::<Vec<_>>(), ["Base", "Other"]);
        assert_eq!(d.locals.len(), 2);
    }

    #[test]
    fn property_frame() {
        let f = parse_frames("ObjectProperty: r Characteristics: Transitive Domain: C Range: C", "t").unwrap();
        assert_eq!(f.len(), 1);
        let Frame::ObjectProperty { clauses, .. } = &f[0].body else {
            panic!()
        };
        assert_eq!(clauses.len(), 3);
        assert!(parse_frames("", "t").unwrap().is_empty());
    }

    #[test]
    fn unknown_frame_keyword() {
        let err = parse_frames("Datatype: d", "t").unwrap_err();
        assert!(matches!(err, SyntaxError::UnknownFrame { ref keyword, .. } if keyword == "Datatype"));
    }

    #[test]
    fn error_positions() {
        let err = parse_library("ontology G [Class: C\n  Class: D = {}", "pat.gdp").unwrap_err();
        let pos = err.pos();
        assert_eq!((pos.line, pos.column), (2, 12));
        assert_eq!(err.to_string(), "expected ']', found '='");
    }
}
