//! Canonical text for syntax trees. `parse_library(pretty_library(ast))`
//! reproduces `ast` up to spans; comments and layout are not preserved.

use std::fmt::Write;

use crate::model::NameTerm;
use crate::syntax::ast::*;

pub fn pretty_library(lib: &LibraryAst) -> String {
    let mut out = String::new();
    for (i, d) in lib.items.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        def(&mut out, d, 0);
    }
    out
}

pub fn pretty_frames(frames: &[FrameAst]) -> String {
    let mut out = String::new();
    frame_seq(&mut out, frames);
    out
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn def(out: &mut String, d: &PatternDefAst, level: usize) {
    indent(out, level);
    write!(out, "ontology {}", d.name).unwrap();
    if !d.params.is_empty() {
        out.push_str(" [");
        for (i, p) in d.params.iter().enumerate() {
            if i > 0 {
                out.push_str("; ");
            }
            param(out, p);
        }
        out.push(']');
    }
    if !d.given.is_empty() {
        let names: Vec<&str> = d.given.iter().map(|(n, _)| n.as_str()).collect();
        write!(out, " given {}", names.join(", ")).unwrap();
    }
    out.push_str(" =\n");
    if !d.locals.is_empty() {
        indent(out, level + 1);
        out.push_str("let\n");
        for l in &d.locals {
            def(out, l, level + 2);
        }
        indent(out, level + 1);
        out.push_str("in\n");
    }
    for (i, t) in d.body.terms().into_iter().enumerate() {
        indent(out, level + 1);
        if i > 0 {
            out.push_str("then ");
        }
        term(out, t);
        out.push('\n');
    }
    indent(out, level);
    out.push_str("end\n");
}

fn param(out: &mut String, p: &ParamClauseAst) {
    if p.optional {
        out.push_str("? ");
    }
    match &p.payload {
        ParamPayload::Frames(fs) if fs.is_empty() => out.push_str("{}"),
        ParamPayload::Frames(fs) => frame_seq(out, fs),
        ParamPayload::List(t) => list_template(out, t),
    }
}

fn list_template(out: &mut String, t: &ListTemplate) {
    let Some(kind) = t.kind else {
        out.push_str("empty");
        return;
    };
    write!(out, "{kind}: {}", t.heads.join(" :: ")).unwrap();
    match &t.tail {
        Some(tail) => write!(out, " :: {tail}").unwrap(),
        None => out.push_str(" :: empty"),
    }
}

fn expr(out: &mut String, e: &ExprAst) {
    for (i, t) in e.terms().into_iter().enumerate() {
        if i > 0 {
            out.push_str(" then ");
        }
        term(out, t);
    }
}

fn term(out: &mut String, e: &ExprAst) {
    match e {
        ExprAst::Frames(fs, _) => frame_seq(out, fs),
        ExprAst::Braced(fs, _) if fs.is_empty() => out.push_str("{}"),
        ExprAst::Braced(fs, _) => {
            out.push_str("{ ");
            frame_seq(out, fs);
            out.push_str(" }");
        }
        ExprAst::Ref(n, _) => out.push_str(n),
        ExprAst::Inst { name, args, .. } => {
            write!(out, "{name}[").unwrap();
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str("; ");
                }
                arg(out, a);
            }
            out.push(']');
        }
        ExprAst::Then(..) => expr(out, e),
    }
}

fn arg(out: &mut String, a: &ArgAst) {
    match &a.value {
        ArgValue::Missing => {}
        ArgValue::Expr(e) => expr(out, e),
        ArgValue::List(l) => list(out, l),
    }
    if !a.maps.is_empty() {
        if a.value != ArgValue::Missing {
            out.push(' ');
        }
        out.push_str("fit ");
        let maps: Vec<String> = a.maps.iter().map(|(f, t)| format!("{f} |-> {t}")).collect();
        out.push_str(&maps.join(", "));
    }
}

fn list(out: &mut String, l: &ListExpr) {
    match l {
        ListExpr::Empty => out.push_str("empty"),
        ListExpr::Cons(h, t) => {
            term(out, h);
            out.push_str(" :: ");
            list(out, t);
        }
        ListExpr::Items(items) => {
            for (i, it) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                term(out, it);
            }
        }
    }
}

fn names(out: &mut String, ns: &[NameTerm]) {
    let v: Vec<String> = ns.iter().map(|n| n.to_string()).collect();
    out.push_str(&v.join(", "));
}

fn frame_seq(out: &mut String, fs: &[FrameAst]) {
    for (i, f) in fs.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        frame(out, &f.body);
    }
}

fn frame(out: &mut String, f: &Frame) {
    match f {
        Frame::Class { name, clauses } => {
            write!(out, "Class: {name}").unwrap();
            for ClassClause::EquivalentTo(ms) in clauses {
                out.push_str(" EquivalentTo: {");
                names(out, ms);
                out.push('}');
            }
        }
        Frame::ObjectProperty { name, clauses } => {
            write!(out, "ObjectProperty: {name}").unwrap();
            for c in clauses {
                let (kw, ns) = match c {
                    PropertyClause::Domain(ns) => ("Domain", ns),
                    PropertyClause::Range(ns) => ("Range", ns),
                    PropertyClause::SubPropertyOf(ns) => ("SubPropertyOf", ns),
                    PropertyClause::InverseOf(ns) => ("InverseOf", ns),
                    PropertyClause::Characteristics(cs) => {
                        let v: Vec<&str> = cs.iter().map(|c| c.keyword()).collect();
                        write!(out, " Characteristics: {}", v.join(", ")).unwrap();
                        continue;
                    }
                };
                write!(out, " {kw}: ").unwrap();
                names(out, ns);
            }
        }
        Frame::Individual { name, clauses } => {
            write!(out, "Individual: {name}").unwrap();
            for c in clauses {
                match c {
                    IndividualClause::Types(ns) => {
                        out.push_str(" Types: ");
                        names(out, ns);
                    }
                    IndividualClause::DifferentFrom(ns) => {
                        out.push_str(" DifferentFrom: ");
                        names(out, ns);
                    }
                    IndividualClause::Facts(fs) => {
                        let v: Vec<String> = fs.iter().map(|(p, o)| format!("{p} {o}")).collect();
                        write!(out, " Facts: {}", v.join(", ")).unwrap();
                    }
                }
            }
        }
        Frame::DifferentIndividuals(ns) => {
            out.push_str("DifferentIndividuals: ");
            names(out, ns);
        }
    }
}
