//! Source positions and rendered diagnostics.

use std::fmt;
use std::sync::Arc;

/// A 1-based position in a named input.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourcePos {
    pub file: Arc<str>,
    pub line: u32,
    pub column: u32,
}

impl SourcePos {
    pub fn new(file: impl Into<Arc<str>>, line: u32, column: u32) -> Self {
        debug_assert!(line >= 1 && column >= 1);
        SourcePos {
            file: file.into(),
            line,
            column,
        }
    }
}

impl fmt::Display for SourcePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub pos: SourcePos,
    pub severity: Severity,
    pub message: String,
}

impl Diagnostic {
    pub fn error(pos: SourcePos, message: impl Into<String>) -> Self {
        Diagnostic {
            pos,
            severity: Severity::Error,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.pos, self.severity, self.message)
    }
}

/// One `file:line:col: severity: message` line per diagnostic, in source order.
pub fn render_diagnostics(diags: &[Diagnostic]) -> String {
    let mut sorted: Vec<&Diagnostic> = diags.iter().collect();
    sorted.sort_by(|a, b| a.pos.cmp(&b.pos));
    let mut out = String::new();
    for d in sorted {
        out.push_str(&d.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_one_line_per_diagnostic() {
        let d = Diagnostic::error(SourcePos::new("pat.gdp", 3, 7), "expected ']'");
        assert_eq!(render_diagnostics(std::slice::from_ref(&d)), "pat.gdp:3:7: error: expected ']'\n");
        assert_eq!(render_diagnostics(&[]), "");
        let early = Diagnostic::error(SourcePos::new("pat.gdp", 1, 2), "first");
        assert_eq!(
            render_diagnostics(&[d, early]),
            "pat.gdp:1:2: error: first\npat.gdp:3:7: error: expected ']'\n"
        );
    }
}
