//! Command-line driver. Exit codes: 0 success, 1 parse or semantic error,
//! 2 I/O or usage error.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::diag::{render_diagnostics, Diagnostic, SourcePos};
use crate::elaborate::{build_library, ElabError, Library};
use crate::emit::{emit_manchester, emit_struct_dump, stratify};
use crate::instantiate::{Expander, DEFAULT_DEPTH};
use crate::syntax::ast::LibraryAst;
use crate::syntax::parse_library;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_IO: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "godp", version, about = "Expand generic ontology design patterns")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Parse the files, build the library and expand every definition without parameters.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Expand one definition.
    Expand {
        #[arg(long)]
        target: String,
        #[arg(long, value_enum, default_value_t = Format::Manchester)]
        format: Format,
        /// Keep parameterized names such as greater[Val] (dump format only).
        #[arg(long)]
        no_stratify: bool,
        /// Maximum instantiation depth [default: $GODP_DEPTH or 10000].
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        depth: Option<u64>,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// List definitions with their parameter shapes.
    List {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Manchester,
    Dump,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Check,
    Expand,
    List,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliConfig {
    pub command: Command,
    pub inputs: Vec<PathBuf>,
    pub target: Option<String>,
    pub stratify: bool,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub depth: usize,
}

impl CliConfig {
    /// `env_depth` is the value of `GODP_DEPTH`, if set.
    pub fn from_args(cli: Cli, env_depth: Option<&str>) -> Result<CliConfig, String> {
        let default_depth = match env_depth {
            None => DEFAULT_DEPTH,
            Some(v) => match v.trim().parse::<usize>() {
                Ok(d) if d >= 1 => d,
                _ => return Err(format!("GODP_DEPTH must be a positive integer, got '{v}'")),
            },
        };
        let base = |command, inputs| CliConfig {
            command,
            inputs,
            target: None,
            stratify: true,
            format: Format::Manchester,
            out: None,
            depth: default_depth,
        };
        Ok(match cli.command {
            CommandArgs::Check { files } => base(Command::Check, files),
            CommandArgs::List { files } => base(Command::List, files),
            CommandArgs::Expand {
                target,
                format,
                no_stratify,
                depth,
                out,
                files,
            } => CliConfig {
                target: Some(target),
                stratify: !no_stratify,
                format,
                out,
                depth: depth.map_or(default_depth, |d| d as usize),
                ..base(Command::Expand, files)
            },
        })
    }
}

enum LoadError {
    Io(String),
    Diagnostics(Vec<Diagnostic>),
}

/// Reads all inputs into one library namespace.
fn load(inputs: &[PathBuf]) -> Result<Library, LoadError> {
    let mut ast = LibraryAst::default();
    let mut diags = Vec::new();
    let mut first_file: BTreeMap<String, SourcePos> = BTreeMap::new();
    for path in inputs {
        let text = fs::read_to_string(path)
            .map_err(|e| LoadError::Io(format!("godp: cannot read {}: {e}", path.display())))?;
        match parse_library(&text, &path.display().to_string()) {
            Ok(lib) => {
                let mut here: BTreeMap<&str, ()> = BTreeMap::new();
                for d in &lib.items {
                    if let Some(first) = first_file.get(&d.name) {
                        if !here.contains_key(d.name.as_str()) {
                            diags.push(
                                ElabError::DuplicateDefinition {
                                    name: d.name.clone(),
                                    pos: d.span.pos().clone(),
                                    first: first.clone(),
                                }
                                .to_diagnostic(),
                            );
                        }
                    }
                    here.insert(&d.name, ());
                }
                for d in &lib.items {
                    first_file
                        .entry(d.name.clone())
                        .or_insert_with(|| d.span.pos().clone());
                }
                ast.items.extend(lib.items);
            }
            Err(e) => diags.push(e.to_diagnostic()),
        }
    }
    if !diags.is_empty() {
        return Err(LoadError::Diagnostics(diags));
    }
    build_library(&ast)
        .map_err(|errs| LoadError::Diagnostics(errs.iter().map(ElabError::to_diagnostic).collect()))
}

/// Runs a command, writing the payload to `out` and diagnostics to `err`.
pub fn run(cfg: &CliConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match cfg.command {
        Command::Check => run_check(cfg, err),
        Command::Expand => run_expand(cfg, out, err),
        Command::List => run_list(cfg, out, err),
    }
}

fn load_or_report(cfg: &CliConfig, err: &mut dyn Write) -> Result<Library, i32> {
    load(&cfg.inputs).map_err(|e| match e {
        LoadError::Io(msg) => {
            let _ = writeln!(err, "{msg}");
            EXIT_IO
        }
        LoadError::Diagnostics(d) => {
            let _ = err.write_all(render_diagnostics(&d).as_bytes());
            EXIT_ERROR
        }
    })
}

pub fn run_check(cfg: &CliConfig, err: &mut dyn Write) -> i32 {
    let lib = match load_or_report(cfg, err) {
        Ok(l) => l,
        Err(code) => return code,
    };
    let mut diags = Vec::new();
    for def in lib.defs().filter(|d| d.arity() == 0) {
        let mut ex = Expander::new(&lib, cfg.depth);
        if let Err(e) = ex.expand_definition(&def.name, def.span.pos()) {
            diags.push(e.to_diagnostic());
        }
    }
    let _ = err.write_all(render_diagnostics(&diags).as_bytes());
    if diags.is_empty() {
        EXIT_OK
    } else {
        EXIT_ERROR
    }
}

pub fn run_expand(cfg: &CliConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let lib = match load_or_report(cfg, err) {
        Ok(l) => l,
        Err(code) => return code,
    };
    let Some(target) = cfg.target.as_deref() else {
        let _ = writeln!(err, "godp: expand needs --target");
        return EXIT_IO;
    };
    let here = lib
        .get(target)
        .map(|d| d.span.pos().clone())
        .unwrap_or_else(|| SourcePos::new("<command line>", 1, 1));
    let report = |err: &mut dyn Write, msg: String| {
        let _ = err.write_all(render_diagnostics(&[Diagnostic::error(here.clone(), msg)]).as_bytes());
        EXIT_ERROR
    };
    let mut o = match Expander::new(&lib, cfg.depth).expand_definition(target, &here) {
        Ok(o) => o,
        Err(e) => {
            let _ = err.write_all(render_diagnostics(&[e.to_diagnostic()]).as_bytes());
            return EXIT_ERROR;
        }
    };
    if cfg.stratify {
        o = match stratify(&o) {
            Ok(s) => s,
            Err(e) => return report(err, e.to_string()),
        };
    }
    let text = match cfg.format {
        Format::Dump => emit_struct_dump(&o),
        Format::Manchester => match emit_manchester(&o) {
            Ok(t) => t,
            Err(e) => return report(err, e.to_string()),
        },
    };
    match &cfg.out {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                let _ = writeln!(err, "godp: cannot write {}: {e}", path.display());
                return EXIT_IO;
            }
        }
        None => {
            if out.write_all(text.as_bytes()).is_err() {
                return EXIT_IO;
            }
        }
    }
    EXIT_OK
}

pub fn run_list(cfg: &CliConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let lib = match load_or_report(cfg, err) {
        Ok(l) => l,
        Err(code) => return code,
    };
    for def in lib.defs() {
        let shapes: Vec<&str> = def.params().iter().map(|p| p.shape_name()).collect();
        let line = if shapes.is_empty() {
            format!("{} 0", def.name)
        } else {
            format!("{} {} {}", def.name, shapes.len(), shapes.join(","))
        };
        if writeln!(out, "{line}").is_err() {
            return EXIT_IO;
        }
    }
    EXIT_OK
}
