//! Parsing and serialization of `.blocks.json` project documents.
//!
//! The format is a JSON tree with an explicit `kind` discriminator per node,
//! documented in `docs/format.md`. Parsing assigns deterministic node ids
//! (`<blockName>#<ordinal>`, document order) and runs well-formedness
//! validation; serialization emits a canonical form with fixed key order so
//! that `parse(serialize(p)) == p` and goldens diff cleanly.

use serde_json::{json, Map, Value as Json};
use thiserror::Error;

use crate::ast::*;
use crate::diag::Diagnostic;

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    /// E_SCHEMA: malformed document, wrong version, unknown node kind or
    /// arity mismatch, with a path into the document.
    #[error("E_SCHEMA at {path}: {message}")]
    Schema { path: String, message: String },
    /// E_WELLFORMED: the document parsed but the program violates
    /// well-formedness rules.
    #[error("E_WELLFORMED: {} diagnostic(s)", .0.len())]
    Wellformed(Vec<Diagnostic>),
    /// E_UNSERIALIZABLE: the program contains a value outside the schema
    /// (only non-finite numbers are representable in the AST but not in
    /// the format).
    #[error("E_UNSERIALIZABLE: {0}")]
    Unserializable(String),
}

fn schema_err<T>(path: &str, message: impl Into<String>) -> Result<T, IoError> {
    Err(IoError::Schema {
        path: path.to_string(),
        message: message.into(),
    })
}

// ---------------------------------------------------------------------------
// Parsing

/// Parses a project document into a validated [`Program`].
pub fn parse_program(text: &str) -> Result<Program, IoError> {
    let doc: Json = serde_json::from_str(text).map_err(|e| IoError::Schema {
        path: "$".to_string(),
        message: format!("invalid JSON: {e}"),
    })?;
    let obj = as_object(
        &doc,
        "$",
        &["formatVersion", "globals", "blocks", "entryScripts"],
    )?;

    match obj.get("formatVersion").and_then(Json::as_u64) {
        Some(FORMAT_VERSION) => {}
        Some(v) => return schema_err("$.formatVersion", format!("unsupported version {v}")),
        None => return schema_err("$.formatVersion", "missing or non-integer"),
    }

    let mut program = Program::default();

    for (i, g) in as_array(obj, "globals", "$")?.iter().enumerate() {
        let path = format!("$.globals[{i}]");
        let gobj = as_object(g, &path, &["name", "value"])?;
        let name = get_str(gobj, "name", &path)?;
        let value = parse_value(req(gobj, "value", &path)?, &format!("{path}.value"))?;
        program.globals.push((name, value));
    }

    for (i, b) in as_array(obj, "blocks", "$")?.iter().enumerate() {
        let path = format!("$.blocks[{i}]");
        program.blocks.push(parse_block(b, &path)?);
    }

    for (i, s) in as_array(obj, "entryScripts", "$")?.iter().enumerate() {
        let path = format!("$.entryScripts[{i}]");
        let sobj = as_object(s, &path, &["name", "body"])?;
        let name = get_str(sobj, "name", &path)?;
        let body = parse_stmts(as_array(sobj, "body", &path)?, &format!("{path}.body"))?;
        program.entry_scripts.push((name, body));
    }

    assign_ids(&mut program);
    let diags = validate(&program);
    if !diags.is_empty() {
        return Err(IoError::Wellformed(diags));
    }
    Ok(program)
}

fn parse_block(json: &Json, path: &str) -> Result<BlockDef, IoError> {
    let obj = as_object(
        json,
        path,
        &["name", "kind", "params", "pre", "post", "body"],
    )?;
    let name = get_str(obj, "name", path)?;
    let kind = match get_str(obj, "kind", path)?.as_str() {
        "command" => BlockKind::Command,
        "reporter" => BlockKind::Reporter,
        "predicate" => BlockKind::Predicate,
        other => {
            return schema_err(
                &format!("{path}.kind"),
                format!("unknown block kind `{other}`"),
            )
        }
    };
    let mut params = Vec::new();
    for (i, p) in as_array(obj, "params", path)?.iter().enumerate() {
        let ppath = format!("{path}.params[{i}]");
        let pobj = as_object(p, &ppath, &["name", "type"])?;
        let pname = get_str(pobj, "name", &ppath)?;
        let declared_type = match pobj.get("type") {
            None => None,
            Some(Json::String(s)) => Some(match s.as_str() {
                "int" => DeclaredType::Int,
                "bool" => DeclaredType::Bool,
                "intList" => DeclaredType::IntList,
                other => {
                    return schema_err(&format!("{ppath}.type"), format!("unknown type `{other}`"))
                }
            }),
            Some(_) => return schema_err(&format!("{ppath}.type"), "expected string"),
        };
        params.push(Param {
            name: pname,
            declared_type,
        });
    }
    let pre = parse_exprs(as_array(obj, "pre", path)?, &format!("{path}.pre"))?;
    let post = parse_exprs(as_array(obj, "post", path)?, &format!("{path}.post"))?;
    let body = parse_stmts(as_array(obj, "body", path)?, &format!("{path}.body"))?;
    Ok(BlockDef {
        name,
        kind,
        params,
        pre,
        post,
        body,
        block_id: String::new(),
    })
}

fn parse_value(json: &Json, path: &str) -> Result<Value, IoError> {
    match json {
        Json::Number(n) => match n.as_f64() {
            Some(f) => Ok(Value::Number(f)),
            None => schema_err(path, "number out of range"),
        },
        Json::Bool(b) => Ok(Value::Bool(*b)),
        Json::String(s) => Ok(Value::Text(s.clone())),
        Json::Array(items) => {
            let mut out = Vec::with_capacity(items.len());
            for (i, v) in items.iter().enumerate() {
                out.push(parse_value(v, &format!("{path}[{i}]"))?);
            }
            Ok(Value::List(out))
        }
        _ => schema_err(path, "expected number, boolean, string or array"),
    }
}

fn parse_exprs(items: &[Json], path: &str) -> Result<Vec<Expr>, IoError> {
    items
        .iter()
        .enumerate()
        .map(|(i, e)| parse_expr(e, &format!("{path}[{i}]")))
        .collect()
}

fn parse_expr(json: &Json, path: &str) -> Result<Expr, IoError> {
    let kind = node_kind(json, path)?;
    let k = match kind.as_str() {
        "lit" => {
            let obj = as_object(json, path, &["kind", "value"])?;
            ExprKind::Literal(parse_value(
                req(obj, "value", path)?,
                &format!("{path}.value"),
            )?)
        }
        "var" => {
            let obj = as_object(json, path, &["kind", "name"])?;
            ExprKind::VarRef(get_str(obj, "name", path)?)
        }
        "arith" => {
            let obj = as_object(json, path, &["kind", "op", "left", "right"])?;
            let op = match get_str(obj, "op", path)?.as_str() {
                "add" => ArithOp::Add,
                "sub" => ArithOp::Sub,
                "mul" => ArithOp::Mul,
                "div" => ArithOp::Div,
                "mod" => ArithOp::Mod,
                other => {
                    return schema_err(&format!("{path}.op"), format!("unknown arith op `{other}`"))
                }
            };
            ExprKind::Arith {
                op,
                left: Box::new(parse_expr(
                    req(obj, "left", path)?,
                    &format!("{path}.left"),
                )?),
                right: Box::new(parse_expr(
                    req(obj, "right", path)?,
                    &format!("{path}.right"),
                )?),
            }
        }
        "compare" => {
            let obj = as_object(json, path, &["kind", "op", "left", "right"])?;
            let op = match get_str(obj, "op", path)?.as_str() {
                "eq" => CmpOp::Eq,
                "neq" => CmpOp::Neq,
                "lt" => CmpOp::Lt,
                "le" => CmpOp::Le,
                "gt" => CmpOp::Gt,
                "ge" => CmpOp::Ge,
                other => {
                    return schema_err(
                        &format!("{path}.op"),
                        format!("unknown comparison op `{other}`"),
                    )
                }
            };
            ExprKind::Compare {
                op,
                left: Box::new(parse_expr(
                    req(obj, "left", path)?,
                    &format!("{path}.left"),
                )?),
                right: Box::new(parse_expr(
                    req(obj, "right", path)?,
                    &format!("{path}.right"),
                )?),
            }
        }
        "boolop" => {
            let obj = as_object(json, path, &["kind", "op", "operands"])?;
            let op = match get_str(obj, "op", path)?.as_str() {
                "and" => BoolOpKind::And,
                "or" => BoolOpKind::Or,
                "not" => BoolOpKind::Not,
                "implies" => BoolOpKind::Implies,
                "iff" => BoolOpKind::Iff,
                "xor" => BoolOpKind::Xor,
                other => {
                    return schema_err(
                        &format!("{path}.op"),
                        format!("unknown boolean op `{other}`"),
                    )
                }
            };
            let operands = parse_exprs(
                as_array(obj, "operands", path)?,
                &format!("{path}.operands"),
            )?;
            let expected = match op {
                BoolOpKind::Not => 1..=1,
                BoolOpKind::Implies | BoolOpKind::Iff | BoolOpKind::Xor => 2..=2,
                BoolOpKind::And | BoolOpKind::Or => 1..=usize::MAX,
            };
            if !expected.contains(&operands.len()) {
                return schema_err(
                    &format!("{path}.operands"),
                    format!("wrong operand count {} for `{kind}`", operands.len()),
                );
            }
            ExprKind::BoolOp { op, operands }
        }
        "old" => {
            let obj = as_object(json, path, &["kind", "var"])?;
            ExprKind::Old(get_str(obj, "var", path)?)
        }
        "result" => {
            as_object(json, path, &["kind"])?;
            ExprKind::Result
        }
        "quantifier" => {
            let obj = as_object(json, path, &["kind", "quant", "bound", "domain", "body"])?;
            let quant = match get_str(obj, "quant", path)?.as_str() {
                "forall" => QuantKind::Forall,
                "exists" => QuantKind::Exists,
                other => {
                    return schema_err(
                        &format!("{path}.quant"),
                        format!("unknown quantifier `{other}`"),
                    )
                }
            };
            let domain = parse_domain(req(obj, "domain", path)?, &format!("{path}.domain"))?;
            ExprKind::Quantifier {
                kind: quant,
                bound: get_str(obj, "bound", path)?,
                domain,
                body: Box::new(parse_expr(
                    req(obj, "body", path)?,
                    &format!("{path}.body"),
                )?),
            }
        }
        "item" => {
            let obj = as_object(json, path, &["kind", "index", "list"])?;
            ExprKind::Item {
                index: Box::new(parse_expr(
                    req(obj, "index", path)?,
                    &format!("{path}.index"),
                )?),
                list: Box::new(parse_expr(
                    req(obj, "list", path)?,
                    &format!("{path}.list"),
                )?),
            }
        }
        "lengthOf" => {
            let obj = as_object(json, path, &["kind", "list"])?;
            ExprKind::LengthOf(Box::new(parse_expr(
                req(obj, "list", path)?,
                &format!("{path}.list"),
            )?))
        }
        "contains" => {
            let obj = as_object(json, path, &["kind", "list", "elem"])?;
            ExprKind::Contains {
                list: Box::new(parse_expr(
                    req(obj, "list", path)?,
                    &format!("{path}.list"),
                )?),
                elem: Box::new(parse_expr(
                    req(obj, "elem", path)?,
                    &format!("{path}.elem"),
                )?),
            }
        }
        "call" => {
            let obj = as_object(json, path, &["kind", "block", "args"])?;
            ExprKind::Call {
                block: get_str(obj, "block", path)?,
                args: parse_exprs(as_array(obj, "args", path)?, &format!("{path}.args"))?,
            }
        }
        other => return schema_err(path, format!("unknown expression kind `{other}`")),
    };
    Ok(Expr {
        id: String::new(),
        kind: k,
    })
}

fn parse_domain(json: &Json, path: &str) -> Result<Domain, IoError> {
    match node_kind(json, path)?.as_str() {
        "intRange" => {
            let obj = as_object(json, path, &["kind", "lo", "hi"])?;
            Ok(Domain::IntRange {
                lo: Box::new(parse_expr(req(obj, "lo", path)?, &format!("{path}.lo"))?),
                hi: Box::new(parse_expr(req(obj, "hi", path)?, &format!("{path}.hi"))?),
            })
        }
        "elements" => {
            let obj = as_object(json, path, &["kind", "list"])?;
            Ok(Domain::Elements(Box::new(parse_expr(
                req(obj, "list", path)?,
                &format!("{path}.list"),
            )?)))
        }
        other => schema_err(path, format!("unknown domain kind `{other}`")),
    }
}

fn parse_stmts(items: &[Json], path: &str) -> Result<Vec<Stmt>, IoError> {
    items
        .iter()
        .enumerate()
        .map(|(i, s)| parse_stmt(s, &format!("{path}[{i}]")))
        .collect()
}

fn parse_stmt(json: &Json, path: &str) -> Result<Stmt, IoError> {
    let kind = node_kind(json, path)?;
    let k = match kind.as_str() {
        "declareLocals" => {
            let obj = as_object(json, path, &["kind", "names"])?;
            let names = as_array(obj, "names", path)?
                .iter()
                .enumerate()
                .map(|(i, n)| match n.as_str() {
                    Some(s) => Ok(s.to_string()),
                    None => schema_err(&format!("{path}.names[{i}]"), "expected string"),
                })
                .collect::<Result<Vec<_>, _>>()?;
            StmtKind::DeclareLocals(names)
        }
        "set" => {
            let obj = as_object(json, path, &["kind", "var", "value"])?;
            StmtKind::SetVar {
                name: get_str(obj, "var", path)?,
                value: parse_expr(req(obj, "value", path)?, &format!("{path}.value"))?,
            }
        }
        "change" => {
            let obj = as_object(json, path, &["kind", "var", "delta"])?;
            StmtKind::ChangeVar {
                name: get_str(obj, "var", path)?,
                delta: parse_expr(req(obj, "delta", path)?, &format!("{path}.delta"))?,
            }
        }
        "ifElse" => {
            let obj = as_object(json, path, &["kind", "cond", "then", "else"])?;
            StmtKind::IfElse {
                cond: parse_expr(req(obj, "cond", path)?, &format!("{path}.cond"))?,
                then_branch: parse_stmts(as_array(obj, "then", path)?, &format!("{path}.then"))?,
                else_branch: parse_stmts(as_array(obj, "else", path)?, &format!("{path}.else"))?,
            }
        }
        "repeatN" => {
            let obj = as_object(json, path, &["kind", "count", "invariant", "body"])?;
            StmtKind::RepeatN {
                count: parse_expr(req(obj, "count", path)?, &format!("{path}.count"))?,
                invariant: parse_exprs(
                    as_array(obj, "invariant", path)?,
                    &format!("{path}.invariant"),
                )?,
                body: parse_stmts(as_array(obj, "body", path)?, &format!("{path}.body"))?,
            }
        }
        "repeatUntil" => {
            let obj = as_object(json, path, &["kind", "cond", "invariant", "body"])?;
            StmtKind::RepeatUntil {
                cond: parse_expr(req(obj, "cond", path)?, &format!("{path}.cond"))?,
                invariant: parse_exprs(
                    as_array(obj, "invariant", path)?,
                    &format!("{path}.invariant"),
                )?,
                body: parse_stmts(as_array(obj, "body", path)?, &format!("{path}.body"))?,
            }
        }
        "assert" => {
            let obj = as_object(json, path, &["kind", "cond"])?;
            StmtKind::Assert(parse_expr(
                req(obj, "cond", path)?,
                &format!("{path}.cond"),
            )?)
        }
        "report" => {
            let obj = as_object(json, path, &["kind", "value"])?;
            StmtKind::Report(parse_expr(
                req(obj, "value", path)?,
                &format!("{path}.value"),
            )?)
        }
        "callCommand" => {
            let obj = as_object(json, path, &["kind", "block", "args"])?;
            StmtKind::CallCommand {
                block: get_str(obj, "block", path)?,
                args: parse_exprs(as_array(obj, "args", path)?, &format!("{path}.args"))?,
            }
        }
        "addToList" => {
            let obj = as_object(json, path, &["kind", "elem", "list"])?;
            StmtKind::AddToList {
                elem: parse_expr(req(obj, "elem", path)?, &format!("{path}.elem"))?,
                list: get_str(obj, "list", path)?,
            }
        }
        "replaceItem" => {
            let obj = as_object(json, path, &["kind", "index", "list", "elem"])?;
            StmtKind::ReplaceItem {
                index: parse_expr(req(obj, "index", path)?, &format!("{path}.index"))?,
                list: get_str(obj, "list", path)?,
                elem: parse_expr(req(obj, "elem", path)?, &format!("{path}.elem"))?,
            }
        }
        other => return schema_err(path, format!("unknown statement kind `{other}`")),
    };
    Ok(Stmt {
        id: String::new(),
        kind: k,
    })
}

// JSON access helpers. `as_object` also rejects unknown fields.

fn as_object<'a>(
    json: &'a Json,
    path: &str,
    allowed: &[&str],
) -> Result<&'a Map<String, Json>, IoError> {
    let obj = match json.as_object() {
        Some(o) => o,
        None => return schema_err(path, "expected object"),
    };
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return schema_err(path, format!("unknown field `{key}`"));
        }
    }
    Ok(obj)
}

fn req<'a>(obj: &'a Map<String, Json>, key: &str, path: &str) -> Result<&'a Json, IoError> {
    match obj.get(key) {
        Some(v) => Ok(v),
        None => schema_err(path, format!("missing field `{key}`")),
    }
}

fn get_str(obj: &Map<String, Json>, key: &str, path: &str) -> Result<String, IoError> {
    match req(obj, key, path)?.as_str() {
        Some(s) => Ok(s.to_string()),
        None => schema_err(&format!("{path}.{key}"), "expected string"),
    }
}

fn as_array<'a>(obj: &'a Map<String, Json>, key: &str, path: &str) -> Result<&'a [Json], IoError> {
    match req(obj, key, path)?.as_array() {
        Some(a) => Ok(a),
        None => schema_err(&format!("{path}.{key}"), "expected array"),
    }
}

fn node_kind(json: &Json, path: &str) -> Result<String, IoError> {
    match json
        .as_object()
        .and_then(|o| o.get("kind"))
        .and_then(Json::as_str)
    {
        Some(k) => Ok(k.to_string()),
        None => schema_err(path, "missing `kind` discriminator"),
    }
}

// ---------------------------------------------------------------------------
// Serialization

/// Serializes a program to the canonical document form: fixed key order,
/// two-space indentation, LF line endings, trailing newline.
pub fn serialize_program(program: &Program) -> Result<String, IoError> {
    let doc = json!({
        "formatVersion": FORMAT_VERSION,
        "globals": program
            .globals
            .iter()
            .map(|(n, v)| Ok(json!({"name": n, "value": value_json(v)?})))
            .collect::<Result<Vec<_>, IoError>>()?,
        "blocks": program
            .blocks
            .iter()
            .map(block_json)
            .collect::<Result<Vec<_>, IoError>>()?,
        "entryScripts": program
            .entry_scripts
            .iter()
            .map(|(n, body)| Ok(json!({"name": n, "body": stmts_json(body)?})))
            .collect::<Result<Vec<_>, IoError>>()?,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("JSON tree is serializable");
    text.push('\n');
    Ok(text)
}

fn value_json(v: &Value) -> Result<Json, IoError> {
    match v {
        Value::Number(n) => {
            if !n.is_finite() {
                return Err(IoError::Unserializable(format!(
                    "non-finite number {n} has no document form"
                )));
            }
            // Whole numbers are written without a fractional part.
            if n.fract() == 0.0 && n.abs() < 2f64.powi(53) {
                Ok(json!(*n as i64))
            } else {
                Ok(serde_json::Number::from_f64(*n)
                    .map(Json::Number)
                    .expect("finite f64"))
            }
        }
        Value::Bool(b) => Ok(json!(b)),
        Value::Text(s) => Ok(json!(s)),
        Value::List(items) => Ok(Json::Array(
            items.iter().map(value_json).collect::<Result<_, _>>()?,
        )),
    }
}

fn block_json(b: &BlockDef) -> Result<Json, IoError> {
    let kind = match b.kind {
        BlockKind::Command => "command",
        BlockKind::Reporter => "reporter",
        BlockKind::Predicate => "predicate",
    };
    let params: Vec<Json> = b
        .params
        .iter()
        .map(|p| match p.declared_type {
            None => json!({"name": p.name}),
            Some(t) => json!({"name": p.name, "type": match t {
                DeclaredType::Int => "int",
                DeclaredType::Bool => "bool",
                DeclaredType::IntList => "intList",
            }}),
        })
        .collect();
    Ok(json!({
        "name": b.name,
        "kind": kind,
        "params": params,
        "pre": exprs_json(&b.pre)?,
        "post": exprs_json(&b.post)?,
        "body": stmts_json(&b.body)?,
    }))
}

fn exprs_json(exprs: &[Expr]) -> Result<Vec<Json>, IoError> {
    exprs.iter().map(expr_json).collect()
}

fn expr_json(e: &Expr) -> Result<Json, IoError> {
    Ok(match &e.kind {
        ExprKind::Literal(v) => json!({"kind": "lit", "value": value_json(v)?}),
        ExprKind::VarRef(name) => json!({"kind": "var", "name": name}),
        ExprKind::Arith { op, left, right } => {
            let op = match op {
                ArithOp::Add => "add",
                ArithOp::Sub => "sub",
                ArithOp::Mul => "mul",
                ArithOp::Div => "div",
                ArithOp::Mod => "mod",
            };
            json!({"kind": "arith", "op": op, "left": expr_json(left)?, "right": expr_json(right)?})
        }
        ExprKind::Compare { op, left, right } => {
            let op = match op {
                CmpOp::Eq => "eq",
                CmpOp::Neq => "neq",
                CmpOp::Lt => "lt",
                CmpOp::Le => "le",
                CmpOp::Gt => "gt",
                CmpOp::Ge => "ge",
            };
            json!({"kind": "compare", "op": op, "left": expr_json(left)?, "right": expr_json(right)?})
        }
        ExprKind::BoolOp { op, operands } => {
            let op = match op {
                BoolOpKind::And => "and",
                BoolOpKind::Or => "or",
                BoolOpKind::Not => "not",
                BoolOpKind::Implies => "implies",
                BoolOpKind::Iff => "iff",
                BoolOpKind::Xor => "xor",
            };
            json!({"kind": "boolop", "op": op, "operands": exprs_json(operands)?})
        }
        ExprKind::Old(var) => json!({"kind": "old", "var": var}),
        ExprKind::Result => json!({"kind": "result"}),
        ExprKind::Quantifier {
            kind,
            bound,
            domain,
            body,
        } => {
            let quant = match kind {
                QuantKind::Forall => "forall",
                QuantKind::Exists => "exists",
            };
            let domain = match domain {
                Domain::IntRange { lo, hi } => {
                    json!({"kind": "intRange", "lo": expr_json(lo)?, "hi": expr_json(hi)?})
                }
                Domain::Elements(list) => json!({"kind": "elements", "list": expr_json(list)?}),
            };
            json!({"kind": "quantifier", "quant": quant, "bound": bound,
                   "domain": domain, "body": expr_json(body)?})
        }
        ExprKind::Item { index, list } => {
            json!({"kind": "item", "index": expr_json(index)?, "list": expr_json(list)?})
        }
        ExprKind::LengthOf(list) => json!({"kind": "lengthOf", "list": expr_json(list)?}),
        ExprKind::Contains { list, elem } => {
            json!({"kind": "contains", "list": expr_json(list)?, "elem": expr_json(elem)?})
        }
        ExprKind::Call { block, args } => {
            json!({"kind": "call", "block": block, "args": exprs_json(args)?})
        }
    })
}

fn stmts_json(stmts: &[Stmt]) -> Result<Vec<Json>, IoError> {
    stmts.iter().map(stmt_json).collect()
}

fn stmt_json(s: &Stmt) -> Result<Json, IoError> {
    Ok(match &s.kind {
        StmtKind::DeclareLocals(names) => json!({"kind": "declareLocals", "names": names}),
        StmtKind::SetVar { name, value } => {
            json!({"kind": "set", "var": name, "value": expr_json(value)?})
        }
        StmtKind::ChangeVar { name, delta } => {
            json!({"kind": "change", "var": name, "delta": expr_json(delta)?})
        }
        StmtKind::IfElse {
            cond,
            then_branch,
            else_branch,
        } => json!({"kind": "ifElse", "cond": expr_json(cond)?,
                    "then": stmts_json(then_branch)?, "else": stmts_json(else_branch)?}),
        StmtKind::RepeatN {
            count,
            invariant,
            body,
        } => json!({"kind": "repeatN", "count": expr_json(count)?,
                    "invariant": exprs_json(invariant)?, "body": stmts_json(body)?}),
        StmtKind::RepeatUntil {
            cond,
            invariant,
            body,
        } => json!({"kind": "repeatUntil", "cond": expr_json(cond)?,
                    "invariant": exprs_json(invariant)?, "body": stmts_json(body)?}),
        StmtKind::Assert(cond) => json!({"kind": "assert", "cond": expr_json(cond)?}),
        StmtKind::Report(value) => json!({"kind": "report", "value": expr_json(value)?}),
        StmtKind::CallCommand { block, args } => {
            json!({"kind": "callCommand", "block": block, "args": exprs_json(args)?})
        }
        StmtKind::AddToList { elem, list } => {
            json!({"kind": "addToList", "elem": expr_json(elem)?, "list": list})
        }
        StmtKind::ReplaceItem { index, list, elem } => {
            json!({"kind": "replaceItem", "index": expr_json(index)?,
                   "list": list, "elem": expr_json(elem)?})
        }
    })
}
