//! Convenience constructors for building ASTs in code.
//!
//! Nodes are created with empty ids; run [`crate::ast::assign_ids`] on the
//! finished program before validating or executing it.

use crate::ast::*;

fn expr(kind: ExprKind) -> Expr {
    Expr {
        id: String::new(),
        kind,
    }
}

fn stmt(kind: StmtKind) -> Stmt {
    Stmt {
        id: String::new(),
        kind,
    }
}

pub fn num(n: i64) -> Expr {
    expr(ExprKind::Literal(Value::Number(n as f64)))
}

pub fn real(n: f64) -> Expr {
    expr(ExprKind::Literal(Value::Number(n)))
}

pub fn bool_lit(b: bool) -> Expr {
    expr(ExprKind::Literal(Value::Bool(b)))
}

pub fn text(s: &str) -> Expr {
    expr(ExprKind::Literal(Value::Text(s.to_string())))
}

pub fn int_list(items: &[i64]) -> Expr {
    expr(ExprKind::Literal(Value::List(
        items.iter().map(|n| Value::Number(*n as f64)).collect(),
    )))
}

pub fn lit(v: Value) -> Expr {
    expr(ExprKind::Literal(v))
}

pub fn var(name: &str) -> Expr {
    expr(ExprKind::VarRef(name.to_string()))
}

pub fn old(name: &str) -> Expr {
    expr(ExprKind::Old(name.to_string()))
}

pub fn result() -> Expr {
    expr(ExprKind::Result)
}

fn arith(op: ArithOp, l: Expr, r: Expr) -> Expr {
    expr(ExprKind::Arith {
        op,
        left: Box::new(l),
        right: Box::new(r),
    })
}

pub fn add(l: Expr, r: Expr) -> Expr {
    arith(ArithOp::Add, l, r)
}

pub fn sub(l: Expr, r: Expr) -> Expr {
    arith(ArithOp::Sub, l, r)
}

pub fn mul(l: Expr, r: Expr) -> Expr {
    arith(ArithOp::Mul, l, r)
}

pub fn div(l: Expr, r: Expr) -> Expr {
    arith(ArithOp::Div, l, r)
}

pub fn modulo(l: Expr, r: Expr) -> Expr {
    arith(ArithOp::Mod, l, r)
}

fn cmp(op: CmpOp, l: Expr, r: Expr) -> Expr {
    expr(ExprKind::Compare {
        op,
        left: Box::new(l),
        right: Box::new(r),
    })
}

pub fn eq(l: Expr, r: Expr) -> Expr {
    cmp(CmpOp::Eq, l, r)
}

pub fn neq(l: Expr, r: Expr) -> Expr {
    cmp(CmpOp::Neq, l, r)
}

pub fn lt(l: Expr, r: Expr) -> Expr {
    cmp(CmpOp::Lt, l, r)
}

pub fn le(l: Expr, r: Expr) -> Expr {
    cmp(CmpOp::Le, l, r)
}

pub fn gt(l: Expr, r: Expr) -> Expr {
    cmp(CmpOp::Gt, l, r)
}

pub fn ge(l: Expr, r: Expr) -> Expr {
    cmp(CmpOp::Ge, l, r)
}

fn boolop(op: BoolOpKind, operands: Vec<Expr>) -> Expr {
    expr(ExprKind::BoolOp { op, operands })
}

pub fn and(operands: Vec<Expr>) -> Expr {
    boolop(BoolOpKind::And, operands)
}

pub fn or(operands: Vec<Expr>) -> Expr {
    boolop(BoolOpKind::Or, operands)
}

pub fn not(e: Expr) -> Expr {
    boolop(BoolOpKind::Not, vec![e])
}

pub fn implies(a: Expr, b: Expr) -> Expr {
    boolop(BoolOpKind::Implies, vec![a, b])
}

pub fn iff(a: Expr, b: Expr) -> Expr {
    boolop(BoolOpKind::Iff, vec![a, b])
}

pub fn xor(a: Expr, b: Expr) -> Expr {
    boolop(BoolOpKind::Xor, vec![a, b])
}

pub fn int_range(lo: Expr, hi: Expr) -> Domain {
    Domain::IntRange {
        lo: Box::new(lo),
        hi: Box::new(hi),
    }
}

pub fn elements(list: Expr) -> Domain {
    Domain::Elements(Box::new(list))
}

pub fn forall(bound: &str, domain: Domain, body: Expr) -> Expr {
    expr(ExprKind::Quantifier {
        kind: QuantKind::Forall,
        bound: bound.to_string(),
        domain,
        body: Box::new(body),
    })
}

pub fn exists(bound: &str, domain: Domain, body: Expr) -> Expr {
    expr(ExprKind::Quantifier {
        kind: QuantKind::Exists,
        bound: bound.to_string(),
        domain,
        body: Box::new(body),
    })
}

pub fn item(index: Expr, list: Expr) -> Expr {
    expr(ExprKind::Item {
        index: Box::new(index),
        list: Box::new(list),
    })
}

pub fn length_of(list: Expr) -> Expr {
    expr(ExprKind::LengthOf(Box::new(list)))
}

pub fn contains(list: Expr, elem: Expr) -> Expr {
    expr(ExprKind::Contains {
        list: Box::new(list),
        elem: Box::new(elem),
    })
}

pub fn call(block: &str, args: Vec<Expr>) -> Expr {
    expr(ExprKind::Call {
        block: block.to_string(),
        args,
    })
}

pub fn declare_locals(names: &[&str]) -> Stmt {
    stmt(StmtKind::DeclareLocals(
        names.iter().map(|s| s.to_string()).collect(),
    ))
}

pub fn set(name: &str, value: Expr) -> Stmt {
    stmt(StmtKind::SetVar {
        name: name.to_string(),
        value,
    })
}

pub fn change(name: &str, delta: Expr) -> Stmt {
    stmt(StmtKind::ChangeVar {
        name: name.to_string(),
        delta,
    })
}

pub fn if_else(cond: Expr, then_branch: Vec<Stmt>, else_branch: Vec<Stmt>) -> Stmt {
    stmt(StmtKind::IfElse {
        cond,
        then_branch,
        else_branch,
    })
}

pub fn repeat_n(count: Expr, invariant: Vec<Expr>, body: Vec<Stmt>) -> Stmt {
    stmt(StmtKind::RepeatN {
        count,
        invariant,
        body,
    })
}

pub fn repeat_until(cond: Expr, invariant: Vec<Expr>, body: Vec<Stmt>) -> Stmt {
    stmt(StmtKind::RepeatUntil {
        cond,
        invariant,
        body,
    })
}

pub fn assert_stmt(cond: Expr) -> Stmt {
    stmt(StmtKind::Assert(cond))
}

pub fn report(value: Expr) -> Stmt {
    stmt(StmtKind::Report(value))
}

pub fn call_command(block: &str, args: Vec<Expr>) -> Stmt {
    stmt(StmtKind::CallCommand {
        block: block.to_string(),
        args,
    })
}

pub fn add_to_list(elem: Expr, list: &str) -> Stmt {
    stmt(StmtKind::AddToList {
        elem,
        list: list.to_string(),
    })
}

pub fn replace_item(index: Expr, list: &str, elem: Expr) -> Stmt {
    stmt(StmtKind::ReplaceItem {
        index,
        list: list.to_string(),
        elem,
    })
}

pub fn param(name: &str) -> Param {
    Param {
        name: name.to_string(),
        declared_type: None,
    }
}

pub fn typed_param(name: &str, t: DeclaredType) -> Param {
    Param {
        name: name.to_string(),
        declared_type: Some(t),
    }
}

pub fn block(name: &str, kind: BlockKind, params: Vec<Param>) -> BlockDef {
    BlockDef {
        name: name.to_string(),
        kind,
        params,
        pre: vec![],
        post: vec![],
        body: vec![],
        block_id: String::new(),
    }
}

/// Finishes a program: assigns node ids and returns it.
pub fn finish(mut program: Program) -> Program {
    assign_ids(&mut program);
    program
}
