//! Abstract syntax of the block language and its specification constructs.
//!
//! Programs are trees of custom block definitions (commands, reporters,
//! predicates) whose hat blocks carry precondition and postcondition slots.
//! Statements and expressions carry stable node ids so every later phase can
//! point a diagnostic at the offending block.

use std::collections::BTreeSet;
use std::fmt;

use crate::diag::{Diagnostic, Phase};

pub type Ident = String;

/// Stable node identifier of the form `<ownerName>#<ordinal>`, assigned in
/// document order. The hat block of a definition is ordinal 0.
pub type NodeId = String;

/// Names starting with this prefix are reserved for compiler-generated
/// temporaries and rejected by [`validate`].
pub const RESERVED_PREFIX: &str = "__";

// ---------------------------------------------------------------------------
// Values

/// A dynamically typed runtime value. Lists are finite and 1-indexed.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Number(f64),
    Bool(bool),
    Text(String),
    List(Vec<Value>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueKind {
    Number,
    Bool,
    Text,
    List,
}

impl Value {
    pub fn kind(&self) -> ValueKind {
        match self {
            Value::Number(_) => ValueKind::Number,
            Value::Bool(_) => ValueKind::Bool,
            Value::Text(_) => ValueKind::Text,
            Value::List(_) => ValueKind::List,
        }
    }

    /// Integer view of a numeric value, if it is a whole number.
    pub fn as_integer(&self) -> Option<i64> {
        match self {
            Value::Number(n) if n.fract() == 0.0 && n.abs() < 2f64.powi(53) => Some(*n as i64),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(n) => {
                if n.fract() == 0.0 && n.abs() < 2f64.powi(53) {
                    write!(f, "{}", *n as i64)
                } else {
                    write!(f, "{n}")
                }
            }
            Value::Bool(b) => write!(f, "{b}"),
            Value::Text(s) => write!(f, "{s:?}"),
            Value::List(items) => {
                write!(f, "[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "]")
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Expressions

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoolOpKind {
    And,
    Or,
    Not,
    Implies,
    Iff,
    Xor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuantKind {
    Forall,
    Exists,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub id: NodeId,
    pub kind: ExprKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Literal(Value),
    VarRef(Ident),
    Arith {
        op: ArithOp,
        left: Box<Expr>,
        right: Box<Expr>,
    },
    Compare {
        op: CmpOp,
        left: Box<Expr>,
        right: Box<Expr>,
    },
    BoolOp {
        op: BoolOpKind,
        operands: Vec<Expr>,
    },
    /// Value of a variable in the pre-state of the enclosing call.
    /// Carries a variable name only, never an arbitrary expression.
    Old(Ident),
    /// Return value of the enclosing reporter/predicate, postconditions only.
    Result,
    Quantifier {
        kind: QuantKind,
        bound: Ident,
        domain: Domain,
        body: Box<Expr>,
    },
    /// 1-based list indexing.
    Item {
        index: Box<Expr>,
        list: Box<Expr>,
    },
    LengthOf(Box<Expr>),
    Contains {
        list: Box<Expr>,
        elem: Box<Expr>,
    },
    /// Reporter/predicate call.
    Call {
        block: Ident,
        args: Vec<Expr>,
    },
}

/// Finite quantification domain: an inclusive integer range or the elements
/// of a list.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    IntRange { lo: Box<Expr>, hi: Box<Expr> },
    Elements(Box<Expr>),
}

// ---------------------------------------------------------------------------
// Statements

#[derive(Clone, Debug, PartialEq)]
pub struct Stmt {
    pub id: NodeId,
    pub kind: StmtKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StmtKind {
    DeclareLocals(Vec<Ident>),
    SetVar {
        name: Ident,
        value: Expr,
    },
    ChangeVar {
        name: Ident,
        delta: Expr,
    },
    IfElse {
        cond: Expr,
        then_branch: Vec<Stmt>,
        else_branch: Vec<Stmt>,
    },
    RepeatN {
        count: Expr,
        invariant: Vec<Expr>,
        body: Vec<Stmt>,
    },
    RepeatUntil {
        cond: Expr,
        invariant: Vec<Expr>,
        body: Vec<Stmt>,
    },
    Assert(Expr),
    /// Return from a reporter/predicate body.
    Report(Expr),
    CallCommand {
        block: Ident,
        args: Vec<Expr>,
    },
    AddToList {
        elem: Expr,
        list: Ident,
    },
    ReplaceItem {
        index: Expr,
        list: Ident,
        elem: Expr,
    },
}

// ---------------------------------------------------------------------------
// Definitions and programs

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockKind {
    Command,
    Reporter,
    Predicate,
}

impl BlockKind {
    pub fn returns_value(self) -> bool {
        !matches!(self, BlockKind::Command)
    }
}

/// Optional parameter type annotation, trusted by the static frontend.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeclaredType {
    Int,
    Bool,
    IntList,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub name: Ident,
    pub declared_type: Option<DeclaredType>,
}

/// A custom block definition. Empty `pre`/`post` slot lists denote the
/// contract `true`; the effective contract is the conjunction of the slots
/// in order.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockDef {
    pub name: Ident,
    pub kind: BlockKind,
    pub params: Vec<Param>,
    pub pre: Vec<Expr>,
    pub post: Vec<Expr>,
    pub body: Vec<Stmt>,
    /// Id of the hat block itself.
    pub block_id: NodeId,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Program {
    pub globals: Vec<(Ident, Value)>,
    pub blocks: Vec<BlockDef>,
    pub entry_scripts: Vec<(Ident, Vec<Stmt>)>,
}

impl Program {
    pub fn block(&self, name: &str) -> Option<&BlockDef> {
        self.blocks.iter().find(|b| b.name == name)
    }

    pub fn entry_script(&self, name: &str) -> Option<&[Stmt]> {
        self.entry_scripts
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s.as_slice())
    }

    pub fn global(&self, name: &str) -> Option<&Value> {
        self.globals.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

// ---------------------------------------------------------------------------
// Node id assignment

/// Assigns `<ownerName>#<ordinal>` ids to every node, in document order.
/// The hat block of each definition takes ordinal 0; pre slots, post slots
/// and body follow. Re-running on an unchanged program yields identical ids.
pub fn assign_ids(program: &mut Program) {
    for block in &mut program.blocks {
        let mut counter = Counter::new(&block.name.clone());
        block.block_id = counter.next();
        for e in &mut block.pre {
            number_expr(e, &mut counter);
        }
        for e in &mut block.post {
            number_expr(e, &mut counter);
        }
        for s in &mut block.body {
            number_stmt(s, &mut counter);
        }
    }
    for (name, stmts) in &mut program.entry_scripts {
        let mut counter = Counter::new(name);
        for s in stmts {
            number_stmt(s, &mut counter);
        }
    }
}

struct Counter {
    owner: String,
    next: usize,
}

impl Counter {
    fn new(owner: &str) -> Self {
        Counter {
            owner: owner.to_string(),
            next: 0,
        }
    }

    fn next(&mut self) -> NodeId {
        let id = format!("{}#{}", self.owner, self.next);
        self.next += 1;
        id
    }
}

fn number_expr(expr: &mut Expr, c: &mut Counter) {
    expr.id = c.next();
    match &mut expr.kind {
        ExprKind::Literal(_) | ExprKind::VarRef(_) | ExprKind::Old(_) | ExprKind::Result => {}
        ExprKind::Arith { left, right, .. } | ExprKind::Compare { left, right, .. } => {
            number_expr(left, c);
            number_expr(right, c);
        }
        ExprKind::BoolOp { operands, .. } => {
            for e in operands {
                number_expr(e, c);
            }
        }
        ExprKind::Quantifier { domain, body, .. } => {
            match domain {
                Domain::IntRange { lo, hi } => {
                    number_expr(lo, c);
                    number_expr(hi, c);
                }
                Domain::Elements(list) => number_expr(list, c),
            }
            number_expr(body, c);
        }
        ExprKind::Item { index, list } => {
            number_expr(index, c);
            number_expr(list, c);
        }
        ExprKind::LengthOf(list) => number_expr(list, c),
        ExprKind::Contains { list, elem } => {
            number_expr(list, c);
            number_expr(elem, c);
        }
        ExprKind::Call { args, .. } => {
            for e in args {
                number_expr(e, c);
            }
        }
    }
}

fn number_stmt(stmt: &mut Stmt, c: &mut Counter) {
    stmt.id = c.next();
    match &mut stmt.kind {
        StmtKind::DeclareLocals(_) => {}
        StmtKind::SetVar { value, .. } => number_expr(value, c),
        StmtKind::ChangeVar { delta, .. } => number_expr(delta, c),
        StmtKind::IfElse {
            cond,
            then_branch,
            else_branch,
        } => {
            number_expr(cond, c);
            for s in then_branch {
                number_stmt(s, c);
            }
            for s in else_branch {
                number_stmt(s, c);
            }
        }
        StmtKind::RepeatN {
            count,
            invariant,
            body,
        } => {
            number_expr(count, c);
            for e in invariant {
                number_expr(e, c);
            }
            for s in body {
                number_stmt(s, c);
            }
        }
        StmtKind::RepeatUntil {
            cond,
            invariant,
            body,
        } => {
            number_expr(cond, c);
            for e in invariant {
                number_expr(e, c);
            }
            for s in body {
                number_stmt(s, c);
            }
        }
        StmtKind::Assert(cond) => number_expr(cond, c),
        StmtKind::Report(value) => number_expr(value, c),
        StmtKind::CallCommand { args, .. } => {
            for e in args {
                number_expr(e, c);
            }
        }
        StmtKind::AddToList { elem, .. } => number_expr(elem, c),
        StmtKind::ReplaceItem { index, elem, .. } => {
            number_expr(index, c);
            number_expr(elem, c);
        }
    }
}

// ---------------------------------------------------------------------------
// Free variables

/// All variable names read by `expr`, excluding quantifier-bound variables.
/// `Old(x)` counts as a read of `x`.
pub fn free_variables(expr: &Expr) -> BTreeSet<Ident> {
    let mut out = BTreeSet::new();
    collect_free(expr, &mut Vec::new(), &mut out);
    out
}

fn collect_free(expr: &Expr, bound: &mut Vec<Ident>, out: &mut BTreeSet<Ident>) {
    match &expr.kind {
        ExprKind::Literal(_) | ExprKind::Result => {}
        ExprKind::VarRef(name) | ExprKind::Old(name) => {
            if !bound.contains(name) {
                out.insert(name.clone());
            }
        }
        ExprKind::Arith { left, right, .. } | ExprKind::Compare { left, right, .. } => {
            collect_free(left, bound, out);
            collect_free(right, bound, out);
        }
        ExprKind::BoolOp { operands, .. } => {
            for e in operands {
                collect_free(e, bound, out);
            }
        }
        ExprKind::Quantifier {
            bound: var,
            domain,
            body,
            ..
        } => {
            // Domain expressions are evaluated outside the binder's scope.
            match domain {
                Domain::IntRange { lo, hi } => {
                    collect_free(lo, bound, out);
                    collect_free(hi, bound, out);
                }
                Domain::Elements(list) => collect_free(list, bound, out),
            }
            bound.push(var.clone());
            collect_free(body, bound, out);
            bound.pop();
        }
        ExprKind::Item { index, list } => {
            collect_free(index, bound, out);
            collect_free(list, bound, out);
        }
        ExprKind::LengthOf(list) => collect_free(list, bound, out),
        ExprKind::Contains { list, elem } => {
            collect_free(list, bound, out);
            collect_free(elem, bound, out);
        }
        ExprKind::Call { args, .. } => {
            for e in args {
                collect_free(e, bound, out);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Well-formedness validation

/// Checks program well-formedness: placement of `result`, `old` and `report`,
/// name resolution, call arity, parameter/global shadowing, assignment
/// targets and reserved names. Returns all violations; an empty list means
/// the program is valid. Pure and idempotent.
pub fn validate(program: &Program) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut seen_blocks = BTreeSet::new();
    for block in &program.blocks {
        if !seen_blocks.insert(block.name.clone()) {
            diags.push(
                Diagnostic::error(
                    Phase::Wellformed,
                    "E_DUPLICATE_BLOCK",
                    format!("block `{}` is defined more than once", block.name),
                )
                .at(block.block_id.clone()),
            );
        }
    }

    let global_names: BTreeSet<&str> = program.globals.iter().map(|(n, _)| n.as_str()).collect();

    for (name, _) in &program.globals {
        check_reserved(name, "<globals>", &mut diags);
    }

    for block in &program.blocks {
        let mut seen_params = BTreeSet::new();
        for p in &block.params {
            check_reserved(&p.name, &block.block_id, &mut diags);
            if !seen_params.insert(p.name.as_str()) {
                diags.push(
                    Diagnostic::error(
                        Phase::Wellformed,
                        "E_DUPLICATE_PARAM",
                        format!("parameter `{}` repeated in block `{}`", p.name, block.name),
                    )
                    .at(block.block_id.clone()),
                );
            }
            if global_names.contains(p.name.as_str()) {
                diags.push(
                    Diagnostic::error(
                        Phase::Wellformed,
                        "E_SHADOWS_GLOBAL",
                        format!(
                            "parameter `{}` of block `{}` shadows a global variable",
                            p.name, block.name
                        ),
                    )
                    .at(block.block_id.clone()),
                );
            }
        }

        let mut cx = ValidateCx {
            program,
            block: Some(block),
            diags: &mut diags,
        };
        for e in &block.pre {
            cx.check_expr(e, SpecPos::Pre);
        }
        for e in &block.post {
            cx.check_expr(e, SpecPos::Post);
        }
        let param_names: BTreeSet<&str> = block.params.iter().map(|p| p.name.as_str()).collect();
        cx.check_stmts(&block.body, &param_names);
    }

    for (_, stmts) in &program.entry_scripts {
        let mut cx = ValidateCx {
            program,
            block: None,
            diags: &mut diags,
        };
        cx.check_stmts(stmts, &BTreeSet::new());
    }

    diags
}

fn check_reserved(name: &str, at: &str, diags: &mut Vec<Diagnostic>) {
    if name.starts_with(RESERVED_PREFIX) {
        diags.push(
            Diagnostic::error(
                Phase::Wellformed,
                "E_RESERVED_NAME",
                format!("name `{name}` uses the reserved `{RESERVED_PREFIX}` prefix"),
            )
            .at(at.to_string()),
        );
    }
}

#[derive(Clone, Copy, PartialEq)]
enum SpecPos {
    Pre,
    Post,
    Code,
}

struct ValidateCx<'a> {
    program: &'a Program,
    block: Option<&'a BlockDef>,
    diags: &'a mut Vec<Diagnostic>,
}

impl ValidateCx<'_> {
    fn push(&mut self, code: &str, id: &NodeId, message: String) {
        self.diags
            .push(Diagnostic::error(Phase::Wellformed, code, message).at(id.clone()));
    }

    fn check_expr(&mut self, expr: &Expr, pos: SpecPos) {
        match &expr.kind {
            ExprKind::Literal(_) | ExprKind::VarRef(_) => {}
            ExprKind::Result => match self.block {
                Some(b) if b.kind == BlockKind::Command => self.push(
                    "E_RESULT_IN_COMMAND",
                    &expr.id,
                    format!("`result` used in command block `{}`", b.name),
                ),
                Some(_) if pos == SpecPos::Post => {}
                _ => self.push(
                    "E_RESULT_OUTSIDE_POST",
                    &expr.id,
                    "`result` is only meaningful inside a postcondition".to_string(),
                ),
            },
            ExprKind::Old(name) => {
                check_reserved(name, &expr.id, self.diags);
                if pos != SpecPos::Post {
                    self.push(
                        "E_OLD_OUTSIDE_POST",
                        &expr.id,
                        format!("`old({name})` is only meaningful inside a postcondition"),
                    );
                }
            }
            ExprKind::Arith { left, right, .. } | ExprKind::Compare { left, right, .. } => {
                self.check_expr(left, pos);
                self.check_expr(right, pos);
            }
            ExprKind::BoolOp { operands, .. } => {
                for e in operands {
                    self.check_expr(e, pos);
                }
            }
            ExprKind::Quantifier {
                bound,
                domain,
                body,
                ..
            } => {
                check_reserved(bound, &expr.id, self.diags);
                match domain {
                    Domain::IntRange { lo, hi } => {
                        self.check_expr(lo, pos);
                        self.check_expr(hi, pos);
                    }
                    Domain::Elements(list) => self.check_expr(list, pos),
                }
                self.check_expr(body, pos);
            }
            ExprKind::Item { index, list } => {
                self.check_expr(index, pos);
                self.check_expr(list, pos);
            }
            ExprKind::LengthOf(list) => self.check_expr(list, pos),
            ExprKind::Contains { list, elem } => {
                self.check_expr(list, pos);
                self.check_expr(elem, pos);
            }
            ExprKind::Call { block, args } => {
                self.check_call(block, args.len(), &expr.id, true);
                for e in args {
                    self.check_expr(e, pos);
                }
            }
        }
    }

    fn check_call(&mut self, callee: &str, arity: usize, id: &NodeId, needs_value: bool) {
        match self.program.block(callee) {
            None => self.push(
                "E_UNDEFINED_BLOCK",
                id,
                format!("call to undefined block `{callee}`"),
            ),
            Some(def) => {
                if def.params.len() != arity {
                    self.push(
                        "E_CALL_ARITY",
                        id,
                        format!(
                            "block `{callee}` takes {} argument(s), {arity} given",
                            def.params.len()
                        ),
                    );
                }
                if needs_value && !def.kind.returns_value() {
                    self.push(
                        "E_CALL_KIND",
                        id,
                        format!("command block `{callee}` used where a value is expected"),
                    );
                } else if !needs_value && def.kind.returns_value() {
                    self.push(
                        "E_CALL_KIND",
                        id,
                        format!("reporter block `{callee}` used as a command"),
                    );
                }
            }
        }
    }

    fn check_assign_target(&mut self, name: &str, id: &NodeId, params: &BTreeSet<&str>) {
        check_reserved(name, id, self.diags);
        if params.contains(name) {
            self.push(
                "E_ASSIGN_PARAM",
                id,
                format!("parameter `{name}` cannot be assigned"),
            );
        }
    }

    fn check_stmts(&mut self, stmts: &[Stmt], params: &BTreeSet<&str>) {
        for stmt in stmts {
            match &stmt.kind {
                StmtKind::DeclareLocals(names) => {
                    for n in names {
                        check_reserved(n, &stmt.id, self.diags);
                        if params.contains(n.as_str()) {
                            self.push(
                                "E_SHADOWS_PARAM",
                                &stmt.id,
                                format!("local `{n}` shadows a parameter"),
                            );
                        }
                    }
                }
                StmtKind::SetVar { name, value } => {
                    self.check_assign_target(name, &stmt.id, params);
                    self.check_expr(value, SpecPos::Code);
                }
                StmtKind::ChangeVar { name, delta } => {
                    self.check_assign_target(name, &stmt.id, params);
                    self.check_expr(delta, SpecPos::Code);
                }
                StmtKind::IfElse {
                    cond,
                    then_branch,
                    else_branch,
                } => {
                    self.check_expr(cond, SpecPos::Code);
                    self.check_stmts(then_branch, params);
                    self.check_stmts(else_branch, params);
                }
                StmtKind::RepeatN {
                    count,
                    invariant,
                    body,
                } => {
                    self.check_expr(count, SpecPos::Code);
                    for e in invariant {
                        self.check_expr(e, SpecPos::Code);
                    }
                    self.check_stmts(body, params);
                }
                StmtKind::RepeatUntil {
                    cond,
                    invariant,
                    body,
                } => {
                    self.check_expr(cond, SpecPos::Code);
                    for e in invariant {
                        self.check_expr(e, SpecPos::Code);
                    }
                    self.check_stmts(body, params);
                }
                StmtKind::Assert(cond) => self.check_expr(cond, SpecPos::Code),
                StmtKind::Report(value) => {
                    match self.block {
                        Some(b) if b.kind.returns_value() => {}
                        _ => self.push(
                            "E_REPORT_OUTSIDE_REPORTER",
                            &stmt.id,
                            "`report` may appear only inside reporter/predicate bodies".to_string(),
                        ),
                    }
                    self.check_expr(value, SpecPos::Code);
                }
                StmtKind::CallCommand { block, args } => {
                    self.check_call(block, args.len(), &stmt.id, false);
                    for e in args {
                        self.check_expr(e, SpecPos::Code);
                    }
                }
                StmtKind::AddToList { elem, list } => {
                    self.check_assign_target(list, &stmt.id, params);
                    self.check_expr(elem, SpecPos::Code);
                }
                StmtKind::ReplaceItem { index, list, elem } => {
                    self.check_assign_target(list, &stmt.id, params);
                    self.check_expr(index, SpecPos::Code);
                    self.check_expr(elem, SpecPos::Code);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build;

    #[test]
    fn validate_empty_program() {
        assert!(validate(&Program::default()).is_empty());
    }

    #[test]
    fn result_in_command_post_rejected() {
        let mut program = Program {
            blocks: vec![BlockDef {
                name: "tick".into(),
                kind: BlockKind::Command,
                params: vec![],
                pre: vec![],
                post: vec![build::eq(build::result(), build::num(1))],
                body: vec![],
                block_id: String::new(),
            }],
            ..Program::default()
        };
        assign_ids(&mut program);
        let diags = validate(&program);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, "E_RESULT_IN_COMMAND");
        assert!(diags[0].block_id.as_deref().unwrap().starts_with("tick#"));
    }

    #[test]
    fn old_in_pre_rejected() {
        let mut program = Program {
            blocks: vec![BlockDef {
                name: "inc".into(),
                kind: BlockKind::Reporter,
                params: vec![Param {
                    name: "x".into(),
                    declared_type: None,
                }],
                pre: vec![build::eq(build::old("x"), build::num(0))],
                post: vec![],
                body: vec![build::report(build::var("x"))],
                block_id: String::new(),
            }],
            ..Program::default()
        };
        assign_ids(&mut program);
        let diags = validate(&program);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, "E_OLD_OUTSIDE_POST");
    }

    #[test]
    fn free_variables_basic() {
        let mut e = build::var("x");
        e.id = "t#1".into();
        assert_eq!(free_variables(&e), ["x".to_string()].into_iter().collect());
    }

    #[test]
    fn free_variables_excludes_bound() {
        // forall i in [1, n]: i <= n
        let e = build::forall(
            "i",
            build::int_range(build::num(1), build::var("n")),
            build::le(build::var("i"), build::var("n")),
        );
        assert_eq!(free_variables(&e), ["n".to_string()].into_iter().collect());
    }

    #[test]
    fn free_variables_old_counts_as_read() {
        // Cross-check against a second naive traversal that just scans for
        // name-carrying leaves, valid because no binders are present.
        let e = build::add(build::old("g"), build::var("h"));
        let expected: BTreeSet<String> = naive_names(&e);
        assert_eq!(free_variables(&e), expected);
        assert!(expected.contains("g"));
    }

    fn naive_names(e: &Expr) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fn walk(e: &Expr, out: &mut BTreeSet<String>) {
            if let ExprKind::VarRef(n) | ExprKind::Old(n) = &e.kind {
                out.insert(n.clone());
            }
            match &e.kind {
                ExprKind::Arith { left, right, .. } => {
                    walk(left, out);
                    walk(right, out);
                }
                ExprKind::BoolOp { operands, .. } => operands.iter().for_each(|e| walk(e, out)),
                _ => {}
            }
        }
        walk(e, &mut out);
        out
    }

    #[test]
    fn validate_is_idempotent() {
        let mut program = Program {
            blocks: vec![BlockDef {
                name: "bad".into(),
                kind: BlockKind::Command,
                params: vec![],
                pre: vec![],
                post: vec![build::result()],
                body: vec![build::call_command("missing", vec![])],
                block_id: String::new(),
            }],
            ..Program::default()
        };
        assign_ids(&mut program);
        assert_eq!(validate(&program), validate(&program));
    }

    #[test]
    fn reserved_prefix_rejected() {
        let mut program = Program {
            globals: vec![("__tmp1".into(), Value::Number(0.0))],
            ..Program::default()
        };
        assign_ids(&mut program);
        assert_eq!(validate(&program)[0].code, "E_RESERVED_NAME");
    }
}
