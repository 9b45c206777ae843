//! Boogie backend: compiles a typed program to Boogie source with a source
//! map, and translates Boogie's textual verdict back into block-level
//! diagnostics.
//!
//! Mapping summary: blocks become procedures (reporters/predicates get an
//! out-parameter `result`), `old(x)` maps to Boogie `old(x)`, lists become
//! `(data: [int]int, len: int)` pairs with 1-based, bounds-asserted access,
//! loops carry one `invariant` clause per slot, and every emitted obligation
//! line ends with a structured `// @src <blockId> <obligationKind>` comment
//! mirroring the source map.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ast::*;
use crate::diag::{Diagnostic, Phase};
use crate::types::{StaticType, TypedProgram, VarKey};

pub const PRELUDE_VERSION: u32 = 1;

/// Embedded verbatim at the top of every emitted `.bpl`.
pub const PRELUDE: &str = "\
// blockverify prelude v1
// Lists are encoded as (data: [int]int, len: int) pairs. Indices are
// 1-based; every item access in executable code carries a bounds assert.
";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ObligationKind {
    Pre,
    Post,
    Assert,
    InvariantEntry,
    InvariantMaintain,
    CallPre,
    IndexBounds,
}

impl ObligationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ObligationKind::Pre => "pre",
            ObligationKind::Post => "post",
            ObligationKind::Assert => "assert",
            ObligationKind::InvariantEntry => "invariantEntry",
            ObligationKind::InvariantMaintain => "invariantMaintain",
            ObligationKind::CallPre => "callPre",
            ObligationKind::IndexBounds => "indexBounds",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceMapEntry {
    pub line: u32,
    pub col: u32,
    pub block_id: NodeId,
    pub kind: ObligationKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slot_index: Option<usize>,
}

/// Bidirectional Boogie-location to block-id mapping. `(line, col)` pairs
/// are unique; at most one obligation is emitted per line.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SourceMap {
    pub entries: Vec<SourceMapEntry>,
}

impl SourceMap {
    pub fn lookup(&self, line: u32, col: u32) -> Option<&SourceMapEntry> {
        self.entries
            .iter()
            .find(|e| e.line == line && e.col == col)
            .or_else(|| self.entries.iter().find(|e| e.line == line))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("source map serializes");
        s.push('\n');
        s
    }
}

#[derive(Clone, Debug)]
pub struct BoogieUnit {
    pub text: String,
    pub source_map: SourceMap,
    pub prelude_version: u32,
}

#[derive(Clone, Debug, Error, PartialEq)]
#[error("E_UNSUPPORTED_CONSTRUCT at {block_id}: {message}")]
pub struct CompileError {
    pub block_id: NodeId,
    pub message: String,
}

impl CompileError {
    pub fn to_diagnostic(&self) -> Diagnostic {
        Diagnostic::error(
            Phase::Compile,
            "E_UNSUPPORTED_CONSTRUCT",
            self.message.clone(),
        )
        .at(self.block_id.clone())
    }
}

fn unsupported<T>(block_id: &NodeId, message: impl Into<String>) -> Result<T, CompileError> {
    Err(CompileError {
        block_id: block_id.clone(),
        message: message.into(),
    })
}

// ---------------------------------------------------------------------------
// Compilation

/// Compiles a typed program to Boogie. Deterministic: identical inputs give
/// byte-identical text.
pub fn compile(typed: &TypedProgram) -> Result<BoogieUnit, CompileError> {
    let mut out = Emitter::default();
    for line in PRELUDE.lines() {
        out.plain(0, line);
    }
    out.blank();

    let program = &typed.program;
    for (name, _) in &program.globals {
        match typed.type_of[&VarKey::Global(name.clone())] {
            StaticType::Int => out.plain(0, &format!("var {}: int;", mangle(name))),
            StaticType::Bool => out.plain(0, &format!("var {}: bool;", mangle(name))),
            StaticType::IntList => {
                out.plain(0, &format!("var {}_data: [int]int;", mangle(name)));
                out.plain(0, &format!("var {}_len: int;", mangle(name)));
            }
        }
    }
    if !program.globals.is_empty() {
        out.blank();
    }

    for block in &program.blocks {
        compile_block(typed, block, &mut out)?;
        out.blank();
    }
    for (name, stmts) in &program.entry_scripts {
        compile_script(typed, name, stmts, &mut out)?;
        out.blank();
    }

    // Drop the trailing blank line.
    if out.lines.last().is_some_and(|l| l.is_empty()) {
        out.lines.pop();
    }

    let mut text = out.lines.join("\n");
    text.push('\n');
    Ok(BoogieUnit {
        text,
        source_map: SourceMap { entries: out.map },
        prelude_version: PRELUDE_VERSION,
    })
}

/// Boogie-safe identifier for a user name.
fn mangle(name: &str) -> String {
    const KEYWORDS: &[&str] = &[
        "assert",
        "assume",
        "axiom",
        "bool",
        "break",
        "call",
        "const",
        "div",
        "else",
        "ensures",
        "exists",
        "false",
        "forall",
        "free",
        "function",
        "goto",
        "havoc",
        "if",
        "implementation",
        "int",
        "invariant",
        "lambda",
        "modifies",
        "old",
        "procedure",
        "requires",
        "result",
        "return",
        "returns",
        "then",
        "true",
        "type",
        "unique",
        "var",
        "where",
        "while",
    ];
    let cleaned: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect();
    if KEYWORDS.contains(&cleaned.as_str()) || cleaned.starts_with(|c: char| c.is_ascii_digit()) {
        format!("{cleaned}_u")
    } else {
        cleaned
    }
}

#[derive(Default)]
struct Emitter {
    lines: Vec<String>,
    map: Vec<SourceMapEntry>,
}

impl Emitter {
    fn plain(&mut self, indent: usize, text: &str) {
        self.lines.push(format!("{}{}", "  ".repeat(indent), text));
    }

    fn blank(&mut self) {
        self.lines.push(String::new());
    }

    fn mapped(
        &mut self,
        indent: usize,
        text: &str,
        block_id: &NodeId,
        kind: ObligationKind,
        slot: Option<usize>,
    ) {
        let line = (self.lines.len() + 1) as u32;
        let col = (indent * 2 + 1) as u32;
        self.map.push(SourceMapEntry {
            line,
            col,
            block_id: block_id.clone(),
            kind,
            slot_index: slot,
        });
        self.lines.push(format!(
            "{}{} // @src {} {}",
            "  ".repeat(indent),
            text,
            block_id,
            kind.as_str()
        ));
    }
}

/// Per-procedure compilation state: pending body lines (emitted after the
/// local variable declarations Boogie requires up front) and fresh names.
struct ProcCx<'t> {
    typed: &'t TypedProgram,
    /// Block being compiled, None for entry scripts.
    block: Option<&'t BlockDef>,
    owner: Ident,
    body: Vec<PendingLine>,
    locals: Vec<(String, &'static str)>,
    fresh_counter: usize,
    quant_counter: usize,
}

struct PendingLine {
    indent: usize,
    text: String,
    map: Option<(NodeId, ObligationKind, Option<usize>)>,
}

impl<'t> ProcCx<'t> {
    fn push(&mut self, indent: usize, text: String) {
        self.body.push(PendingLine {
            indent,
            text,
            map: None,
        });
    }

    fn push_mapped(
        &mut self,
        indent: usize,
        text: String,
        id: &NodeId,
        kind: ObligationKind,
        slot: Option<usize>,
    ) {
        self.body.push(PendingLine {
            indent,
            text,
            map: Some((id.clone(), kind, slot)),
        });
    }

    fn fresh(&mut self, prefix: &str, ty: &'static str) -> String {
        self.fresh_counter += 1;
        let name = format!("__{}{}", prefix, self.fresh_counter);
        self.locals.push((name.clone(), ty));
        name
    }

    fn fresh_bound(&mut self) -> String {
        self.quant_counter += 1;
        format!("__q{}", self.quant_counter)
    }

    fn var_type(&self, name: &Ident) -> StaticType {
        if let Some(block) = self.block {
            if block.params.iter().any(|p| &p.name == name) {
                return self.typed.type_of[&VarKey::Param(block.name.clone(), name.clone())];
            }
        }
        let local = VarKey::Local(self.owner.clone(), name.clone());
        if let Some(t) = self.typed.type_of.get(&local) {
            return *t;
        }
        self.typed.type_of[&VarKey::Global(name.clone())]
    }
}

fn boogie_type(t: StaticType) -> &'static str {
    match t {
        StaticType::Int => "int",
        StaticType::Bool => "bool",
        StaticType::IntList => unreachable!("lists are compiled as pairs"),
    }
}

fn compile_block(
    typed: &TypedProgram,
    block: &BlockDef,
    out: &mut Emitter,
) -> Result<(), CompileError> {
    let mut params = Vec::new();
    for p in &block.params {
        let t = typed.type_of[&VarKey::Param(block.name.clone(), p.name.clone())];
        match t {
            StaticType::IntList => {
                params.push(format!("{}_data: [int]int", mangle(&p.name)));
                params.push(format!("{}_len: int", mangle(&p.name)));
            }
            _ => params.push(format!("{}: {}", mangle(&p.name), boogie_type(t))),
        }
    }
    let returns = if block.kind.returns_value() {
        let t = typed.type_of[&VarKey::Result(block.name.clone())];
        if t == StaticType::IntList {
            return unsupported(
                &block.block_id,
                format!(
                    "reporter `{}` returns a list, which cannot be compiled",
                    block.name
                ),
            );
        }
        format!(" returns (result: {})", boogie_type(t))
    } else {
        String::new()
    };
    out.plain(
        0,
        &format!(
            "procedure {}({}){}",
            mangle(&block.name),
            params.join(", "),
            returns
        ),
    );

    let mut cx = ProcCx {
        typed,
        block: Some(block),
        owner: block.name.clone(),
        body: Vec::new(),
        locals: Vec::new(),
        fresh_counter: 0,
        quant_counter: 0,
    };

    // Contract clauses. Calls are not allowed inside specifications.
    for (i, slot) in block.pre.iter().enumerate() {
        let text = spec_expr(&mut cx, slot)?;
        out.mapped(
            1,
            &format!("requires {text};"),
            &block.block_id,
            ObligationKind::Pre,
            Some(i + 1),
        );
    }
    for p in &block.params {
        if typed.type_of[&VarKey::Param(block.name.clone(), p.name.clone())] == StaticType::IntList
        {
            out.plain(1, &format!("free requires {}_len >= 0;", mangle(&p.name)));
        }
    }
    let modifies = &typed.modifies_of[&block.name];
    emit_modifies(typed, modifies, out);
    for (name, _) in &typed.program.globals {
        if typed.type_of[&VarKey::Global(name.clone())] == StaticType::IntList {
            out.plain(1, &format!("free requires {}_len >= 0;", mangle(name)));
            if modifies.contains(name) {
                out.plain(1, &format!("free ensures {}_len >= 0;", mangle(name)));
            }
        }
    }
    for (i, slot) in block.post.iter().enumerate() {
        let text = spec_expr(&mut cx, slot)?;
        out.mapped(
            1,
            &format!("ensures {text};"),
            &block.block_id,
            ObligationKind::Post,
            Some(i + 1),
        );
    }

    // Body.
    out.plain(0, "{");
    if block.kind == BlockKind::Predicate {
        // A predicate that falls through without reporting answers false.
        cx.push(1, "result := false;".to_string());
        let first = cx.body.remove(0);
        cx.body.insert(0, first);
    }
    compile_stmts(&mut cx, &block.body, 1)?;
    flush_procedure(cx, out);
    out.plain(0, "}");
    Ok(())
}

fn compile_script(
    typed: &TypedProgram,
    name: &str,
    stmts: &[Stmt],
    out: &mut Emitter,
) -> Result<(), CompileError> {
    out.plain(0, &format!("procedure __script_{}()", mangle(name)));
    let mut cx = ProcCx {
        typed,
        block: None,
        owner: name.to_string(),
        body: Vec::new(),
        locals: Vec::new(),
        fresh_counter: 0,
        quant_counter: 0,
    };
    // Scripts may call anything; give them the union of all modifies sets.
    let mut all: std::collections::BTreeSet<Ident> = std::collections::BTreeSet::new();
    for set in typed.modifies_of.values() {
        all.extend(set.iter().cloned());
    }
    // Plus direct global assignments in the script itself.
    for (g, _) in &typed.program.globals {
        all.insert(g.clone());
    }
    emit_modifies(typed, &all, out);
    for (g, _) in &typed.program.globals {
        if typed.type_of[&VarKey::Global(g.clone())] == StaticType::IntList {
            out.plain(1, &format!("free requires {}_len >= 0;", mangle(g)));
        }
    }
    out.plain(0, "{");
    compile_stmts(&mut cx, stmts, 1)?;
    flush_procedure(cx, out);
    out.plain(0, "}");
    Ok(())
}

fn emit_modifies(typed: &TypedProgram, set: &std::collections::BTreeSet<Ident>, out: &mut Emitter) {
    if set.is_empty() {
        return;
    }
    let names: Vec<String> = set
        .iter()
        .flat_map(|g| match typed.type_of[&VarKey::Global(g.clone())] {
            StaticType::IntList => {
                vec![format!("{}_data", mangle(g)), format!("{}_len", mangle(g))]
            }
            _ => vec![mangle(g)],
        })
        .collect();
    out.plain(1, &format!("modifies {};", names.join(", ")));
}

fn flush_procedure(cx: ProcCx<'_>, out: &mut Emitter) {
    for (name, ty) in &cx.locals {
        out.plain(1, &format!("var {name}: {ty};"));
    }
    for line in cx.body {
        match line.map {
            None => out.plain(line.indent, &line.text),
            Some((id, kind, slot)) => out.mapped(line.indent, &line.text, &id, kind, slot),
        }
    }
}

// -- statement compilation --------------------------------------------------

fn compile_stmts(cx: &mut ProcCx<'_>, stmts: &[Stmt], indent: usize) -> Result<(), CompileError> {
    for stmt in stmts {
        compile_stmt(cx, stmt, indent)?;
    }
    Ok(())
}

fn compile_stmt(cx: &mut ProcCx<'_>, stmt: &Stmt, indent: usize) -> Result<(), CompileError> {
    match &stmt.kind {
        StmtKind::DeclareLocals(names) => {
            for n in names {
                let key = VarKey::Local(cx.owner.clone(), n.clone());
                match cx.typed.type_of[&key] {
                    StaticType::Int => {
                        cx.locals.push((mangle(n), "int"));
                        // Declared numeric locals start at 0, like at runtime.
                        cx.push(indent, format!("{} := 0;", mangle(n)));
                    }
                    StaticType::Bool => cx.locals.push((mangle(n), "bool")),
                    StaticType::IntList => {
                        cx.locals.push((format!("{}_data", mangle(n)), "[int]int"));
                        cx.locals.push((format!("{}_len", mangle(n)), "int"));
                        cx.push(indent, format!("{}_len := 0;", mangle(n)));
                    }
                }
            }
        }
        StmtKind::SetVar { name, value } => {
            if cx.var_type(name) == StaticType::IntList {
                compile_list_assign(cx, name, value, indent, &stmt.id)?;
            } else {
                let text = code_expr(cx, value, indent)?;
                cx.push(indent, format!("{} := {};", mangle(name), text));
            }
        }
        StmtKind::ChangeVar { name, delta } => {
            let d = code_expr(cx, delta, indent)?;
            cx.push(indent, format!("{0} := {0} + {1};", mangle(name), d));
        }
        StmtKind::IfElse {
            cond,
            then_branch,
            else_branch,
        } => {
            let c = code_expr(cx, cond, indent)?;
            cx.push(indent, format!("if ({c}) {{"));
            compile_stmts(cx, then_branch, indent + 1)?;
            if else_branch.is_empty() {
                cx.push(indent, "}".to_string());
            } else {
                cx.push(indent, "} else {".to_string());
                compile_stmts(cx, else_branch, indent + 1)?;
                cx.push(indent, "}".to_string());
            }
        }
        StmtKind::RepeatN {
            count,
            invariant,
            body,
        } => {
            let n = cx.fresh("n", "int");
            let k = cx.fresh("k", "int");
            let c = code_expr(cx, count, indent)?;
            cx.push(indent, format!("{n} := {c};"));
            cx.push(indent, format!("{k} := 0;"));
            cx.push(indent, format!("while ({k} < {n})"));
            cx.push_mapped(
                indent + 1,
                format!("invariant 0 <= {k} && {k} <= {n};"),
                &stmt.id,
                ObligationKind::InvariantEntry,
                None,
            );
            emit_user_invariants(cx, invariant, &stmt.id, indent + 1)?;
            cx.push(indent, "{".to_string());
            compile_stmts(cx, body, indent + 1)?;
            cx.push(indent + 1, format!("{k} := {k} + 1;"));
            cx.push(indent, "}".to_string());
        }
        StmtKind::RepeatUntil {
            cond,
            invariant,
            body,
        } => {
            // The loop condition is re-evaluated each iteration, so it must
            // not contain calls or guarded accesses that need hoisting.
            let c = spec_expr(cx, cond)?;
            cx.push(indent, format!("while (!({c}))"));
            emit_user_invariants(cx, invariant, &stmt.id, indent + 1)?;
            cx.push(indent, "{".to_string());
            compile_stmts(cx, body, indent + 1)?;
            cx.push(indent, "}".to_string());
        }
        StmtKind::Assert(cond) => {
            let c = code_expr(cx, cond, indent)?;
            cx.push_mapped(
                indent,
                format!("assert {c};"),
                &stmt.id,
                ObligationKind::Assert,
                None,
            );
        }
        StmtKind::Report(value) => {
            let v = code_expr(cx, value, indent)?;
            cx.push(indent, format!("result := {v};"));
            cx.push(indent, "return;".to_string());
        }
        StmtKind::CallCommand { block, args } => {
            let argv = compile_call_args(cx, block, args, indent, &stmt.id)?;
            cx.push_mapped(
                indent,
                format!("call {}({});", mangle(block), argv.join(", ")),
                &stmt.id,
                ObligationKind::CallPre,
                None,
            );
        }
        StmtKind::AddToList { elem, list } => {
            let e = code_expr(cx, elem, indent)?;
            let l = mangle(list);
            cx.push(indent, format!("{l}_len := {l}_len + 1;"));
            cx.push(indent, format!("{l}_data[{l}_len] := {e};"));
        }
        StmtKind::ReplaceItem { index, list, elem } => {
            let i = code_expr(cx, index, indent)?;
            let e = code_expr(cx, elem, indent)?;
            let l = mangle(list);
            cx.push_mapped(
                indent,
                format!("assert 1 <= {i} && {i} <= {l}_len;"),
                &stmt.id,
                ObligationKind::IndexBounds,
                None,
            );
            cx.push(indent, format!("{l}_data[{i}] := {e};"));
        }
    }
    Ok(())
}

fn emit_user_invariants(
    cx: &mut ProcCx<'_>,
    invariant: &[Expr],
    loop_id: &NodeId,
    indent: usize,
) -> Result<(), CompileError> {
    for (i, slot) in invariant.iter().enumerate() {
        let text = spec_expr(cx, slot)?;
        // Entry vs. maintenance is disambiguated from Boogie's message when
        // the verdict is mapped back.
        cx.push_mapped(
            indent,
            format!("invariant {text};"),
            loop_id,
            ObligationKind::InvariantEntry,
            Some(i + 1),
        );
    }
    Ok(())
}

fn compile_list_assign(
    cx: &mut ProcCx<'_>,
    target: &Ident,
    value: &Expr,
    indent: usize,
    stmt_id: &NodeId,
) -> Result<(), CompileError> {
    let l = mangle(target);
    match &value.kind {
        ExprKind::VarRef(src) => {
            let r = mangle(src);
            cx.push(indent, format!("{l}_data := {r}_data;"));
            cx.push(indent, format!("{l}_len := {r}_len;"));
            Ok(())
        }
        ExprKind::Literal(Value::List(items)) => {
            cx.push(indent, format!("{l}_len := {};", items.len()));
            for (i, item) in items.iter().enumerate() {
                let n = item.as_integer().expect("typechecked int list literal");
                cx.push(indent, format!("{l}_data[{}] := {};", i + 1, n));
            }
            Ok(())
        }
        ExprKind::Call { .. } => unsupported(
            stmt_id,
            "calls returning lists cannot be compiled".to_string(),
        ),
        _ => unsupported(
            stmt_id,
            "only a list variable or a list literal can be assigned to a list".to_string(),
        ),
    }
}

fn compile_call_args(
    cx: &mut ProcCx<'_>,
    callee: &str,
    args: &[Expr],
    indent: usize,
    at: &NodeId,
) -> Result<Vec<String>, CompileError> {
    let param_types = cx.typed.param_types(callee);
    let mut out = Vec::new();
    for (arg, t) in args.iter().zip(param_types) {
        match t {
            StaticType::IntList => match &arg.kind {
                ExprKind::VarRef(n) => {
                    out.push(format!("{}_data", mangle(n)));
                    out.push(format!("{}_len", mangle(n)));
                }
                _ => return unsupported(at, "list arguments must be variables".to_string()),
            },
            _ => out.push(code_expr(cx, arg, indent)?),
        }
    }
    Ok(out)
}

// -- expression compilation -------------------------------------------------

/// Compiles an expression for a code position: hoists block calls into
/// `call` statements and emits bounds asserts for item accesses, then
/// returns the residual pure expression.
fn code_expr(cx: &mut ProcCx<'_>, expr: &Expr, indent: usize) -> Result<String, CompileError> {
    let mut hoisted = BTreeMap::new();
    hoist_calls(cx, expr, indent, &mut hoisted)?;
    emit_bounds_asserts(cx, expr, indent, &hoisted)?;
    translate(cx, expr, &mut Env::new(&hoisted))
}

/// Compiles a specification expression (contract slot, invariant, loop
/// condition): pure, no calls, no emitted guards.
fn spec_expr(cx: &mut ProcCx<'_>, expr: &Expr) -> Result<String, CompileError> {
    let hoisted = BTreeMap::new();
    translate(cx, expr, &mut Env::new(&hoisted))
}

/// Replaces every block call in `expr` (pre-order) by a fresh temporary
/// assigned via a Boogie `call` statement.
fn hoist_calls(
    cx: &mut ProcCx<'_>,
    expr: &Expr,
    indent: usize,
    hoisted: &mut BTreeMap<NodeId, String>,
) -> Result<(), CompileError> {
    match &expr.kind {
        ExprKind::Call { block, args } => {
            for a in args {
                hoist_calls(cx, a, indent, hoisted)?;
            }
            let t = cx.typed.type_of[&VarKey::Result(block.clone())];
            if t == StaticType::IntList {
                return unsupported(&expr.id, "calls returning lists cannot be compiled");
            }
            let tmp = cx.fresh("tmp", boogie_type(t));
            let argv = {
                // Argument translation may reference earlier hoisted temps.
                let param_types = cx.typed.param_types(block);
                let mut out = Vec::new();
                for (arg, pt) in args.iter().zip(param_types) {
                    match pt {
                        StaticType::IntList => match &arg.kind {
                            ExprKind::VarRef(n) => {
                                out.push(format!("{}_data", mangle(n)));
                                out.push(format!("{}_len", mangle(n)));
                            }
                            _ => {
                                return unsupported(
                                    &arg.id,
                                    "list arguments must be variables".to_string(),
                                )
                            }
                        },
                        _ => {
                            emit_bounds_asserts(cx, arg, indent, hoisted)?;
                            out.push(translate(cx, arg, &mut Env::new(hoisted))?);
                        }
                    }
                }
                out
            };
            cx.push_mapped(
                indent,
                format!("call {tmp} := {}({});", mangle(block), argv.join(", ")),
                &expr.id,
                ObligationKind::CallPre,
                None,
            );
            hoisted.insert(expr.id.clone(), tmp);
            Ok(())
        }
        ExprKind::Arith { left, right, .. } | ExprKind::Compare { left, right, .. } => {
            hoist_calls(cx, left, indent, hoisted)?;
            hoist_calls(cx, right, indent, hoisted)
        }
        ExprKind::BoolOp { operands, .. } => {
            for e in operands {
                hoist_calls(cx, e, indent, hoisted)?;
            }
            Ok(())
        }
        ExprKind::Quantifier { domain, body, .. } => {
            match domain {
                Domain::IntRange { lo, hi } => {
                    hoist_calls(cx, lo, indent, hoisted)?;
                    hoist_calls(cx, hi, indent, hoisted)?;
                }
                Domain::Elements(list) => hoist_calls(cx, list, indent, hoisted)?,
            }
            // Calls under a binder cannot be hoisted to statement level.
            if contains_call(body) {
                return unsupported(
                    &expr.id,
                    "calls inside quantifier bodies cannot be compiled",
                );
            }
            Ok(())
        }
        ExprKind::Item { index, list } => {
            hoist_calls(cx, index, indent, hoisted)?;
            hoist_calls(cx, list, indent, hoisted)
        }
        ExprKind::LengthOf(list) => hoist_calls(cx, list, indent, hoisted),
        ExprKind::Contains { list, elem } => {
            hoist_calls(cx, list, indent, hoisted)?;
            hoist_calls(cx, elem, indent, hoisted)
        }
        ExprKind::Literal(_) | ExprKind::VarRef(_) | ExprKind::Old(_) | ExprKind::Result => Ok(()),
    }
}

fn contains_call(expr: &Expr) -> bool {
    match &expr.kind {
        ExprKind::Call { .. } => true,
        ExprKind::Arith { left, right, .. } | ExprKind::Compare { left, right, .. } => {
            contains_call(left) || contains_call(right)
        }
        ExprKind::BoolOp { operands, .. } => operands.iter().any(contains_call),
        ExprKind::Quantifier { domain, body, .. } => {
            let d = match domain {
                Domain::IntRange { lo, hi } => contains_call(lo) || contains_call(hi),
                Domain::Elements(list) => contains_call(list),
            };
            d || contains_call(body)
        }
        ExprKind::Item { index, list } => contains_call(index) || contains_call(list),
        ExprKind::LengthOf(list) => contains_call(list),
        ExprKind::Contains { list, elem } => contains_call(list) || contains_call(elem),
        _ => false,
    }
}

/// Emits an `assert 1 <= i && i <= len` guard for every item access outside
/// a quantifier binder, mirroring the runtime E_INDEX check.
fn emit_bounds_asserts(
    cx: &mut ProcCx<'_>,
    expr: &Expr,
    indent: usize,
    hoisted: &BTreeMap<NodeId, String>,
) -> Result<(), CompileError> {
    match &expr.kind {
        ExprKind::Item { index, list } => {
            emit_bounds_asserts(cx, index, indent, hoisted)?;
            let i = translate(cx, index, &mut Env::new(hoisted))?;
            let (_, len) = list_pair(cx, list, &Env::new(hoisted))?;
            cx.push_mapped(
                indent,
                format!("assert 1 <= {i} && {i} <= {len};"),
                &expr.id,
                ObligationKind::IndexBounds,
                None,
            );
            Ok(())
        }
        ExprKind::Arith { left, right, .. } | ExprKind::Compare { left, right, .. } => {
            emit_bounds_asserts(cx, left, indent, hoisted)?;
            emit_bounds_asserts(cx, right, indent, hoisted)
        }
        ExprKind::BoolOp { operands, .. } => {
            for e in operands {
                emit_bounds_asserts(cx, e, indent, hoisted)?;
            }
            Ok(())
        }
        // Item accesses under a binder are not guarded; the map access is
        // total, so this only relaxes the check relative to runtime.
        ExprKind::Quantifier { .. } => Ok(()),
        ExprKind::LengthOf(list) => emit_bounds_asserts(cx, list, indent, hoisted),
        ExprKind::Contains { list, elem } => {
            emit_bounds_asserts(cx, list, indent, hoisted)?;
            emit_bounds_asserts(cx, elem, indent, hoisted)
        }
        _ => Ok(()),
    }
}

/// Substitution environment for expression translation: hoisted call temps
/// plus quantifier-bound element replacements.
struct Env<'a> {
    hoisted: &'a BTreeMap<NodeId, String>,
    substitutions: Vec<(Ident, String)>,
}

impl<'a> Env<'a> {
    fn new(hoisted: &'a BTreeMap<NodeId, String>) -> Self {
        Env {
            hoisted,
            substitutions: Vec::new(),
        }
    }

    fn lookup(&self, name: &Ident) -> Option<&str> {
        self.substitutions
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s.as_str())
    }
}

fn translate(cx: &mut ProcCx<'_>, expr: &Expr, env: &mut Env<'_>) -> Result<String, CompileError> {
    Ok(match &expr.kind {
        ExprKind::Literal(v) => match v {
            Value::Number(_) => {
                let n = v.as_integer().expect("typechecked integer literal");
                if n < 0 {
                    format!("({n})")
                } else {
                    n.to_string()
                }
            }
            Value::Bool(b) => b.to_string(),
            Value::Text(_) => return unsupported(&expr.id, "text literals cannot be compiled"),
            Value::List(_) => {
                return unsupported(
                    &expr.id,
                    "list literals are only allowed as direct assignments",
                )
            }
        },
        ExprKind::VarRef(name) => match env.lookup(name) {
            Some(repl) => repl.to_string(),
            None => mangle(name),
        },
        ExprKind::Arith { op, left, right } => {
            let l = translate(cx, left, env)?;
            let r = translate(cx, right, env)?;
            let op = match op {
                ArithOp::Add => "+",
                ArithOp::Sub => "-",
                ArithOp::Mul => "*",
                ArithOp::Div => "div",
                ArithOp::Mod => "mod",
            };
            format!("({l} {op} {r})")
        }
        ExprKind::Compare { op, left, right } => {
            let list_operands = matches!(&left.kind, ExprKind::VarRef(n)
                if env.lookup(n).is_none() && cx.var_type(n) == StaticType::IntList);
            if list_operands && matches!(op, CmpOp::Eq | CmpOp::Neq) {
                let (ld, ll) = list_pair(cx, left, env)?;
                let (rd, rl) = list_pair(cx, right, env)?;
                let q = cx.fresh_bound();
                let eq = format!(
                    "({ll} == {rl} && (forall {q}: int :: 1 <= {q} && {q} <= {ll} ==> {ld}[{q}] == {rd}[{q}]))"
                );
                if *op == CmpOp::Eq {
                    eq
                } else {
                    format!("!{eq}")
                }
            } else {
                let l = translate(cx, left, env)?;
                let r = translate(cx, right, env)?;
                let op = match op {
                    CmpOp::Eq => "==",
                    CmpOp::Neq => "!=",
                    CmpOp::Lt => "<",
                    CmpOp::Le => "<=",
                    CmpOp::Gt => ">",
                    CmpOp::Ge => ">=",
                };
                format!("({l} {op} {r})")
            }
        }
        ExprKind::BoolOp { op, operands } => {
            let parts = operands
                .iter()
                .map(|e| translate(cx, e, env))
                .collect::<Result<Vec<_>, _>>()?;
            match op {
                BoolOpKind::And => format!("({})", parts.join(" && ")),
                BoolOpKind::Or => format!("({})", parts.join(" || ")),
                BoolOpKind::Not => format!("!{}", parts[0]),
                BoolOpKind::Implies => format!("({} ==> {})", parts[0], parts[1]),
                BoolOpKind::Iff => format!("({} <==> {})", parts[0], parts[1]),
                BoolOpKind::Xor => format!("({} != {})", parts[0], parts[1]),
            }
        }
        ExprKind::Old(name) => {
            if cx.var_type(name) == StaticType::IntList {
                return unsupported(
                    &expr.id,
                    "old() of a whole list is only supported inside list operations",
                );
            }
            format!("old({})", mangle(name))
        }
        ExprKind::Result => "result".to_string(),
        ExprKind::Quantifier {
            kind,
            bound,
            domain,
            body,
        } => {
            let q = cx.fresh_bound();
            let (range, element) = match domain {
                Domain::IntRange { lo, hi } => {
                    let lo = translate(cx, lo, env)?;
                    let hi = translate(cx, hi, env)?;
                    (format!("{lo} <= {q} && {q} <= {hi}"), q.clone())
                }
                Domain::Elements(list) => {
                    let (data, len) = list_pair(cx, list, env)?;
                    (format!("1 <= {q} && {q} <= {len}"), format!("{data}[{q}]"))
                }
            };
            env.substitutions.push((bound.clone(), element));
            let b = translate(cx, body, env)?;
            env.substitutions.pop();
            match kind {
                QuantKind::Forall => format!("(forall {q}: int :: {range} ==> {b})"),
                QuantKind::Exists => format!("(exists {q}: int :: {range} && {b})"),
            }
        }
        ExprKind::Item { index, list } => {
            let i = translate(cx, index, env)?;
            let (data, _) = list_pair(cx, list, env)?;
            format!("{data}[{i}]")
        }
        ExprKind::LengthOf(list) => {
            let (_, len) = list_pair(cx, list, env)?;
            len
        }
        ExprKind::Contains { list, elem } => {
            let (data, len) = list_pair(cx, list, env)?;
            let e = translate(cx, elem, env)?;
            let q = cx.fresh_bound();
            format!("(exists {q}: int :: 1 <= {q} && {q} <= {len} && {data}[{q}] == {e})")
        }
        ExprKind::Call { .. } => match env.hoisted.get(&expr.id) {
            Some(tmp) => tmp.clone(),
            None => {
                return unsupported(
                    &expr.id,
                    "calls are not allowed inside specifications or loop conditions",
                )
            }
        },
    })
}

/// `(data, len)` Boogie texts for a list-typed expression; only variable
/// references (optionally under `old`) denote lists.
fn list_pair(
    cx: &mut ProcCx<'_>,
    expr: &Expr,
    _env: &Env<'_>,
) -> Result<(String, String), CompileError> {
    match &expr.kind {
        ExprKind::VarRef(n) => Ok((format!("{}_data", mangle(n)), format!("{}_len", mangle(n)))),
        ExprKind::Old(n) => {
            if cx.var_type(n) != StaticType::IntList {
                return unsupported(&expr.id, "old() on a non-list used as a list");
            }
            Ok((
                format!("old({}_data)", mangle(n)),
                format!("old({}_len)", mangle(n)),
            ))
        }
        _ => unsupported(
            &expr.id,
            "only list variables can be used in list operations here",
        ),
    }
}

// ---------------------------------------------------------------------------
// Verdict parsing

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum VerdictOutcome {
    Verified,
    Errors,
    ToolFailure,
}

/// Parsed and mapped result of one Boogie run.
#[derive(Clone, Debug, PartialEq)]
pub struct StaticVerdict {
    pub outcome: VerdictOutcome,
    pub verified: u32,
    pub errors: u32,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum OutputError {
    /// A Boogie error was reported at a location with no source map entry;
    /// this indicates a backend bug and is never silently dropped.
    #[error("E_UNMAPPED_LOCATION: Boogie error at ({line},{col}) has no source map entry")]
    UnmappedLocation { line: u32, col: u32 },
}

/// Parses the standard output of one Boogie run on the mapped file.
/// Unparseable output (no summary line) yields a `ToolFailure` verdict with
/// an `E_BOOGIE_OUTPUT` diagnostic.
pub fn parse_boogie_output(output: &str, map: &SourceMap) -> Result<StaticVerdict, OutputError> {
    let mut diagnostics = Vec::new();
    let mut summary = None;

    let lines: Vec<&str> = output.lines().collect();
    let mut i = 0;
    while i < lines.len() {
        let line = lines[i];
        if let Some(counts) = parse_summary_line(line) {
            summary = Some(counts);
            i += 1;
            continue;
        }
        if let Some((loc, _msg)) = parse_error_line(line) {
            // Gather any related locations that follow.
            let message_text = line.to_string();
            let mut related = Vec::new();
            let mut j = i + 1;
            while j < lines.len() {
                if let Some(loc) = parse_related_line(lines[j]) {
                    related.push(loc);
                    j += 1;
                } else {
                    break;
                }
            }
            let primary = map.lookup(loc.0, loc.1);
            let fallback = related.iter().find_map(|(l, c)| map.lookup(*l, *c));
            let entry = match primary.or(fallback) {
                Some(e) => e,
                None => {
                    return Err(OutputError::UnmappedLocation {
                        line: loc.0,
                        col: loc.1,
                    })
                }
            };
            let slot = entry
                .slot_index
                .or_else(|| fallback.and_then(|e| e.slot_index));
            let kind = refine_kind(entry.kind, &message_text);
            diagnostics.push(verdict_diagnostic(kind, &entry.block_id, slot));
            i = j;
            continue;
        }
        i += 1;
    }

    match summary {
        Some((verified, errors)) => {
            let outcome = if errors == 0 && diagnostics.is_empty() {
                VerdictOutcome::Verified
            } else {
                VerdictOutcome::Errors
            };
            Ok(StaticVerdict {
                outcome,
                verified,
                errors,
                diagnostics,
            })
        }
        None => Ok(StaticVerdict {
            outcome: VerdictOutcome::ToolFailure,
            verified: 0,
            errors: 0,
            diagnostics: vec![Diagnostic::error(
                Phase::Static,
                "E_BOOGIE_OUTPUT",
                "could not find the Boogie summary line in the verifier output",
            )],
        }),
    }
}

/// Entry vs. maintenance for loop invariants is only distinguishable from
/// Boogie's message text.
fn refine_kind(kind: ObligationKind, message: &str) -> ObligationKind {
    if kind == ObligationKind::InvariantEntry && message.contains("maintained") {
        ObligationKind::InvariantMaintain
    } else {
        kind
    }
}

fn verdict_diagnostic(kind: ObligationKind, block_id: &NodeId, slot: Option<usize>) -> Diagnostic {
    let slot_text = |slot: Option<usize>| match slot {
        Some(k) => format!(" (slot {k})"),
        None => String::new(),
    };
    let (code, message) = match kind {
        ObligationKind::Pre => (
            "E_VERIFY_PRE",
            format!("the precondition{} might not hold", slot_text(slot)),
        ),
        ObligationKind::Post => (
            "E_VERIFY_POST",
            format!(
                "the postcondition{} might not hold for some inputs",
                slot_text(slot)
            ),
        ),
        ObligationKind::Assert => (
            "E_VERIFY_ASSERT",
            "this assertion might not hold for some inputs".to_string(),
        ),
        ObligationKind::InvariantEntry => (
            "E_VERIFY_INVARIANT_ENTRY",
            format!(
                "the loop invariant{} might not hold when the loop is entered",
                slot_text(slot)
            ),
        ),
        ObligationKind::InvariantMaintain => (
            "E_VERIFY_INVARIANT_MAINTAIN",
            format!(
                "the loop invariant{} might not be maintained by an iteration",
                slot_text(slot)
            ),
        ),
        ObligationKind::CallPre => (
            "E_VERIFY_CALL_PRE",
            format!(
                "a precondition of the called block{} might not hold at this call",
                slot_text(slot)
            ),
        ),
        ObligationKind::IndexBounds => (
            "E_VERIFY_INDEX_BOUNDS",
            "the list index might be out of range".to_string(),
        ),
    };
    let mut d = Diagnostic::error(Phase::Static, code, message).at(block_id.clone());
    d.slot_index = slot;
    d
}

/// `<file>(<line>,<col>): Error ...`
fn parse_error_line(line: &str) -> Option<((u32, u32), &str)> {
    let (loc, rest) = parse_location_prefix(line)?;
    let rest = rest.trim_start();
    if rest.starts_with("Error") {
        Some((loc, rest))
    } else {
        None
    }
}

/// `<file>(<line>,<col>): Related location: ...`
fn parse_related_line(line: &str) -> Option<(u32, u32)> {
    let (loc, rest) = parse_location_prefix(line)?;
    rest.trim_start()
        .starts_with("Related location")
        .then_some(loc)
}

fn parse_location_prefix(line: &str) -> Option<((u32, u32), &str)> {
    let colon = line.find("): ")?;
    let head = &line[..colon];
    let open = head.rfind('(')?;
    let inner = &head[open + 1..];
    let (l, c) = inner.split_once(',')?;
    let line_no = l.trim().parse().ok()?;
    let col_no = c.trim().parse().ok()?;
    Some(((line_no, col_no), &line[colon + 3..]))
}

/// `Boogie program verifier finished with <n> verified, <m> errors`
fn parse_summary_line(line: &str) -> Option<(u32, u32)> {
    let rest = line
        .trim()
        .strip_prefix("Boogie program verifier finished with ")?;
    let (v, rest) = rest.split_once(" verified, ")?;
    let verified = v.trim().parse().ok()?;
    let e = rest
        .trim_end()
        .trim_end_matches("errors")
        .trim_end_matches("error");
    let errors = e.trim().parse().ok()?;
    Some((verified, errors))
}

/// Renders a one-line summary of a verdict.
pub fn verdict_summary(v: &StaticVerdict) -> String {
    let mut s = String::new();
    match v.outcome {
        VerdictOutcome::Verified => {
            let _ = write!(
                s,
                "verified ({} procedure{})",
                v.verified,
                if v.verified == 1 { "" } else { "s" }
            );
        }
        VerdictOutcome::Errors => {
            let _ = write!(
                s,
                "{} error{} ({} verified)",
                v.errors,
                if v.errors == 1 { "" } else { "s" },
                v.verified
            );
        }
        VerdictOutcome::ToolFailure => s.push_str("tool failure"),
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build;
    use crate::types::infer_types;

    fn compile_program(p: Program) -> Result<BoogieUnit, CompileError> {
        let typed = infer_types(&p).expect("typecheck");
        compile(&typed)
    }

    #[test]
    fn increment_compiles_to_contracted_procedure() {
        let mut b = build::block("increment", BlockKind::Reporter, vec![build::param("x")]);
        b.pre = vec![build::ge(build::var("x"), build::num(0))];
        b.post = vec![build::eq(
            build::result(),
            build::add(build::old("x"), build::num(1)),
        )];
        b.body = vec![build::report(build::add(build::var("x"), build::num(1)))];
        let unit = compile_program(build::finish(Program {
            blocks: vec![b],
            ..Program::default()
        }))
        .unwrap();
        assert!(unit
            .text
            .contains("procedure increment(x: int) returns (result: int)"));
        assert!(unit
            .text
            .contains("requires (x >= 0); // @src increment#0 pre"));
        assert!(unit
            .text
            .contains("ensures (result == (old(x) + 1)); // @src increment#0 post"));
    }

    #[test]
    fn every_obligation_line_has_a_map_entry() {
        let mut b = build::block("f", BlockKind::Reporter, vec![build::param("x")]);
        b.pre = vec![build::ge(build::var("x"), build::num(0))];
        b.post = vec![build::ge(build::result(), build::num(0))];
        b.body = vec![
            build::declare_locals(&["i"]),
            build::repeat_n(
                build::var("x"),
                vec![build::ge(build::var("i"), build::num(0))],
                vec![build::change("i", build::num(1))],
            ),
            build::assert_stmt(build::ge(build::var("i"), build::num(0))),
            build::report(build::var("i")),
        ];
        let unit = compile_program(build::finish(Program {
            blocks: vec![b],
            ..Program::default()
        }))
        .unwrap();
        for (i, line) in unit.text.lines().enumerate() {
            let t = line.trim_start();
            let is_obligation = t.starts_with("requires")
                || t.starts_with("ensures")
                || t.starts_with("invariant")
                || t.starts_with("assert")
                || t.starts_with("call");
            let is_free = t.starts_with("free ");
            if is_obligation && !is_free {
                let line_no = (i + 1) as u32;
                assert!(
                    unit.source_map.entries.iter().any(|e| e.line == line_no),
                    "line {line_no} `{line}` has no source map entry"
                );
            }
        }
    }

    #[test]
    fn compile_is_deterministic() {
        let mut b = build::block("f", BlockKind::Predicate, vec![build::param("x")]);
        b.body = vec![build::report(build::gt(build::var("x"), build::num(0)))];
        let p = build::finish(Program {
            blocks: vec![b],
            ..Program::default()
        });
        let a = compile_program(p.clone()).unwrap();
        let b = compile_program(p).unwrap();
        assert_eq!(a.text, b.text);
    }

    #[test]
    fn list_literal_outside_assignment_is_unsupported() {
        // Typechecks fine, but the pair encoding has no value form for a
        // list literal in an arbitrary expression position.
        let mut b = build::block("f", BlockKind::Predicate, vec![]);
        b.body = vec![build::report(build::contains(
            build::int_list(&[1, 2]),
            build::num(1),
        ))];
        let err = compile_program(build::finish(Program {
            blocks: vec![b],
            ..Program::default()
        }))
        .unwrap_err();
        assert!(err.message.contains("list"));
    }

    #[test]
    fn parse_success_summary() {
        let v = parse_boogie_output(
            "Boogie program verifier finished with 3 verified, 0 errors\n",
            &SourceMap::default(),
        )
        .unwrap();
        assert_eq!(v.outcome, VerdictOutcome::Verified);
        assert_eq!((v.verified, v.errors), (3, 0));
        assert!(v.diagnostics.is_empty());
    }

    #[test]
    fn parse_single_error_resolves_through_map() {
        let map = SourceMap {
            entries: vec![SourceMapEntry {
                line: 12,
                col: 3,
                block_id: "assert#7".into(),
                kind: ObligationKind::Assert,
                slot_index: None,
            }],
        };
        let out = "out.bpl(12,3): Error: this assertion could not be proved\n\
                   Boogie program verifier finished with 0 verified, 1 error\n";
        let v = parse_boogie_output(out, &map).unwrap();
        assert_eq!(v.outcome, VerdictOutcome::Errors);
        assert_eq!(v.diagnostics.len(), 1);
        assert_eq!(v.diagnostics[0].block_id.as_deref(), Some("assert#7"));
        assert_eq!(v.diagnostics[0].code, "E_VERIFY_ASSERT");
    }

    #[test]
    fn parse_postcondition_error_uses_related_location() {
        let map = SourceMap {
            entries: vec![SourceMapEntry {
                line: 5,
                col: 3,
                block_id: "inc#0".into(),
                kind: ObligationKind::Post,
                slot_index: Some(1),
            }],
        };
        let out = "out.bpl(9,3): Error: a postcondition could not be proved on this return path\n\
                   out.bpl(5,3): Related location: this is the postcondition that could not be proved\n\
                   Boogie program verifier finished with 0 verified, 1 error\n";
        let v = parse_boogie_output(out, &map).unwrap();
        assert_eq!(v.diagnostics[0].block_id.as_deref(), Some("inc#0"));
        assert_eq!(v.diagnostics[0].slot_index, Some(1));
        assert_eq!(v.diagnostics[0].code, "E_VERIFY_POST");
    }

    #[test]
    fn unmapped_location_is_an_error() {
        let out = "out.bpl(99,1): Error: this assertion could not be proved\n\
                   Boogie program verifier finished with 0 verified, 1 error\n";
        let err = parse_boogie_output(out, &SourceMap::default()).unwrap_err();
        assert_eq!(err, OutputError::UnmappedLocation { line: 99, col: 1 });
    }

    #[test]
    fn empty_output_is_tool_failure() {
        let v = parse_boogie_output("", &SourceMap::default()).unwrap();
        assert_eq!(v.outcome, VerdictOutcome::ToolFailure);
        assert_eq!(v.diagnostics[0].code, "E_BOOGIE_OUTPUT");
    }

    #[test]
    fn invariant_maintained_message_refines_kind() {
        let map = SourceMap {
            entries: vec![SourceMapEntry {
                line: 7,
                col: 5,
                block_id: "loop#3".into(),
                kind: ObligationKind::InvariantEntry,
                slot_index: Some(1),
            }],
        };
        let out = "out.bpl(7,5): Error: this loop invariant could not be proved to be maintained by the loop\n\
                   Boogie program verifier finished with 0 verified, 1 error\n";
        let v = parse_boogie_output(out, &map).unwrap();
        assert_eq!(v.diagnostics[0].code, "E_VERIFY_INVARIANT_MAINTAIN");
    }
}
