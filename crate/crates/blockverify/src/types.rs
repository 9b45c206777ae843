//! Static type restrictions for the verification fragment.
//!
//! The static pipeline only accepts programs whose variables each have one
//! type drawn from `{Int, Bool, IntList}`. Types are inferred by unification
//! over assignments, uses, contracts and calls; dynamic typing and nested
//! lists are rejected. Optional parameter annotations are trusted and
//! checked.

use std::collections::{BTreeMap, BTreeSet};

use crate::ast::*;
use crate::diag::{Diagnostic, Phase};

/// The closed type set of the static fragment. List elements are `Int` by
/// construction; there is no nesting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum StaticType {
    Int,
    Bool,
    IntList,
}

impl StaticType {
    pub fn as_str(self) -> &'static str {
        match self {
            StaticType::Int => "Integer",
            StaticType::Bool => "Boolean",
            StaticType::IntList => "List of Integers",
        }
    }
}

/// A typed variable slot: one entry per variable per scope, plus one result
/// slot per reporter/predicate.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum VarKey {
    Global(Ident),
    /// Parameter of a block: (block name, parameter name).
    Param(Ident, Ident),
    /// Local of a block or entry script: (owner name, local name).
    Local(Ident, Ident),
    /// Result of a reporter/predicate block.
    Result(Ident),
}

impl std::fmt::Display for VarKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VarKey::Global(n) => write!(f, "global `{n}`"),
            VarKey::Param(b, n) => write!(f, "parameter `{n}` of `{b}`"),
            VarKey::Local(o, n) => write!(f, "local `{n}` in `{o}`"),
            VarKey::Result(b) => write!(f, "result of `{b}`"),
        }
    }
}

/// A program that passed the static restrictions, with the inferred type of
/// every variable slot and the transitive modifies set of every block.
#[derive(Clone, Debug)]
pub struct TypedProgram {
    pub program: Program,
    pub type_of: BTreeMap<VarKey, StaticType>,
    pub modifies_of: BTreeMap<Ident, BTreeSet<Ident>>,
    pub warnings: Vec<Diagnostic>,
}

impl TypedProgram {
    pub fn param_types(&self, block: &str) -> Vec<StaticType> {
        let def = self.program.block(block).expect("known block");
        def.params
            .iter()
            .map(|p| self.type_of[&VarKey::Param(block.to_string(), p.name.clone())])
            .collect()
    }
}

/// Infers one static type per variable slot and computes modifies sets.
/// `program` must validate cleanly.
pub fn infer_types(program: &Program) -> Result<TypedProgram, Vec<Diagnostic>> {
    let mut cx = Infer::new(program);
    cx.run();
    if !cx.diags.is_empty() {
        return Err(cx.diags);
    }
    let warnings = std::mem::take(&mut cx.warnings);
    let type_of = cx.finish()?;
    let mut typed = TypedProgram {
        program: program.clone(),
        type_of,
        modifies_of: BTreeMap::new(),
        warnings,
    };
    compute_modifies(&mut typed);
    Ok(typed)
}

/// Least fixpoint of directly assigned globals over the call graph.
/// Idempotent: re-running leaves `modifies_of` unchanged.
pub fn compute_modifies(typed: &mut TypedProgram) {
    let program = &typed.program;
    let mut direct: BTreeMap<Ident, BTreeSet<Ident>> = BTreeMap::new();
    let mut calls: BTreeMap<Ident, BTreeSet<Ident>> = BTreeMap::new();
    let global_names: BTreeSet<&str> = program.globals.iter().map(|(n, _)| n.as_str()).collect();

    for block in &program.blocks {
        let locals = collect_locals(&block.body);
        let mut assigned = BTreeSet::new();
        let mut callees = BTreeSet::new();
        scan_stmts(
            &block.body,
            &locals,
            &global_names,
            &mut assigned,
            &mut callees,
        );
        direct.insert(block.name.clone(), assigned);
        calls.insert(block.name.clone(), callees);
    }

    let mut result = direct.clone();
    loop {
        let mut changed = false;
        for block in &program.blocks {
            let mut merged = result[&block.name].clone();
            for callee in &calls[&block.name] {
                if let Some(set) = result.get(callee) {
                    merged.extend(set.iter().cloned());
                }
            }
            if merged.len() != result[&block.name].len() {
                result.insert(block.name.clone(), merged);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    typed.modifies_of = result;
}

fn collect_locals(stmts: &[Stmt]) -> BTreeSet<Ident> {
    let mut out = BTreeSet::new();
    fn walk(stmts: &[Stmt], out: &mut BTreeSet<Ident>) {
        for s in stmts {
            match &s.kind {
                StmtKind::DeclareLocals(names) => out.extend(names.iter().cloned()),
                StmtKind::IfElse {
                    then_branch,
                    else_branch,
                    ..
                } => {
                    walk(then_branch, out);
                    walk(else_branch, out);
                }
                StmtKind::RepeatN { body, .. } | StmtKind::RepeatUntil { body, .. } => {
                    walk(body, out)
                }
                _ => {}
            }
        }
    }
    walk(stmts, &mut out);
    out
}

fn scan_stmts(
    stmts: &[Stmt],
    locals: &BTreeSet<Ident>,
    globals: &BTreeSet<&str>,
    assigned: &mut BTreeSet<Ident>,
    callees: &mut BTreeSet<Ident>,
) {
    let note_target = |name: &Ident, assigned: &mut BTreeSet<Ident>| {
        if !locals.contains(name) && globals.contains(name.as_str()) {
            assigned.insert(name.clone());
        }
    };
    for s in stmts {
        match &s.kind {
            StmtKind::SetVar { name, value } => {
                note_target(name, assigned);
                scan_expr_calls(value, callees);
            }
            StmtKind::ChangeVar { name, delta } => {
                note_target(name, assigned);
                scan_expr_calls(delta, callees);
            }
            StmtKind::AddToList { list, elem } => {
                note_target(list, assigned);
                scan_expr_calls(elem, callees);
            }
            StmtKind::ReplaceItem { list, index, elem } => {
                note_target(list, assigned);
                scan_expr_calls(index, callees);
                scan_expr_calls(elem, callees);
            }
            StmtKind::CallCommand { block, args } => {
                callees.insert(block.clone());
                for a in args {
                    scan_expr_calls(a, callees);
                }
            }
            StmtKind::IfElse {
                cond,
                then_branch,
                else_branch,
            } => {
                scan_expr_calls(cond, callees);
                scan_stmts(then_branch, locals, globals, assigned, callees);
                scan_stmts(else_branch, locals, globals, assigned, callees);
            }
            StmtKind::RepeatN {
                count,
                invariant,
                body,
            } => {
                scan_expr_calls(count, callees);
                for e in invariant {
                    scan_expr_calls(e, callees);
                }
                scan_stmts(body, locals, globals, assigned, callees);
            }
            StmtKind::RepeatUntil {
                cond,
                invariant,
                body,
            } => {
                scan_expr_calls(cond, callees);
                for e in invariant {
                    scan_expr_calls(e, callees);
                }
                scan_stmts(body, locals, globals, assigned, callees);
            }
            StmtKind::Assert(cond) => scan_expr_calls(cond, callees),
            StmtKind::Report(value) => scan_expr_calls(value, callees),
            StmtKind::DeclareLocals(_) => {}
        }
    }
}

fn scan_expr_calls(expr: &Expr, callees: &mut BTreeSet<Ident>) {
    match &expr.kind {
        ExprKind::Call { block, args } => {
            callees.insert(block.clone());
            for a in args {
                scan_expr_calls(a, callees);
            }
        }
        ExprKind::Arith { left, right, .. } | ExprKind::Compare { left, right, .. } => {
            scan_expr_calls(left, callees);
            scan_expr_calls(right, callees);
        }
        ExprKind::BoolOp { operands, .. } => {
            for e in operands {
                scan_expr_calls(e, callees);
            }
        }
        ExprKind::Quantifier { domain, body, .. } => {
            match domain {
                Domain::IntRange { lo, hi } => {
                    scan_expr_calls(lo, callees);
                    scan_expr_calls(hi, callees);
                }
                Domain::Elements(list) => scan_expr_calls(list, callees),
            }
            scan_expr_calls(body, callees);
        }
        ExprKind::Item { index, list } => {
            scan_expr_calls(index, callees);
            scan_expr_calls(list, callees);
        }
        ExprKind::LengthOf(list) => scan_expr_calls(list, callees),
        ExprKind::Contains { list, elem } => {
            scan_expr_calls(list, callees);
            scan_expr_calls(elem, callees);
        }
        ExprKind::Literal(_) | ExprKind::VarRef(_) | ExprKind::Old(_) | ExprKind::Result => {}
    }
}

// ---------------------------------------------------------------------------
// Unification engine

#[derive(Clone, Debug, PartialEq)]
enum Ty {
    Known(StaticType),
    Var(usize),
}

struct Infer<'p> {
    program: &'p Program,
    /// Per type variable: either a binding or a link to another variable.
    subst: Vec<Option<Ty>>,
    /// Where a variable first received its concrete type, for conflict
    /// reports.
    origin: Vec<Option<NodeId>>,
    keys: BTreeMap<VarKey, usize>,
    key_sites: BTreeMap<VarKey, NodeId>,
    diags: Vec<Diagnostic>,
    warnings: Vec<Diagnostic>,
}

struct Scope<'a> {
    owner: Ident,
    block: Option<&'a BlockDef>,
    bound: Vec<Ident>,
}

impl<'p> Infer<'p> {
    fn new(program: &'p Program) -> Self {
        Infer {
            program,
            subst: Vec::new(),
            origin: Vec::new(),
            keys: BTreeMap::new(),
            key_sites: BTreeMap::new(),
            diags: Vec::new(),
            warnings: Vec::new(),
        }
    }

    fn fresh(&mut self) -> usize {
        self.subst.push(None);
        self.origin.push(None);
        self.subst.len() - 1
    }

    fn key_var(&mut self, key: VarKey, site: &NodeId) -> usize {
        if let Some(&v) = self.keys.get(&key) {
            return v;
        }
        let v = self.fresh();
        self.key_sites
            .entry(key.clone())
            .or_insert_with(|| site.clone());
        self.keys.insert(key, v);
        v
    }

    fn resolve(&self, ty: &Ty) -> Ty {
        let mut cur = ty.clone();
        while let Ty::Var(v) = cur {
            match &self.subst[v] {
                Some(next) => cur = next.clone(),
                None => return Ty::Var(v),
            }
        }
        cur
    }

    fn error(&mut self, code: &str, at: &NodeId, message: String) {
        self.diags
            .push(Diagnostic::error(Phase::Typecheck, code, message).at(at.clone()));
    }

    fn unify(&mut self, a: Ty, b: Ty, at: &NodeId) {
        let ra = self.resolve(&a);
        let rb = self.resolve(&b);
        match (ra, rb) {
            (Ty::Known(x), Ty::Known(y)) => {
                if x != y {
                    // Find the earliest site that pinned the first operand.
                    let earlier = self.origin_of(&a).or_else(|| self.origin_of(&b));
                    let mut msg = format!("conflicting types: {} vs {}", x.as_str(), y.as_str());
                    if let Some(site) = earlier {
                        if site != *at {
                            msg.push_str(&format!(" (first fixed at {site})"));
                        }
                    }
                    self.error("E_DYNAMIC_TYPING", at, msg);
                }
            }
            (Ty::Var(v), other) | (other, Ty::Var(v)) => {
                self.subst[v] = Some(other);
                if self.origin[v].is_none() {
                    self.origin[v] = Some(at.clone());
                }
            }
        }
    }

    fn origin_of(&self, ty: &Ty) -> Option<NodeId> {
        let mut cur = ty.clone();
        loop {
            match cur {
                Ty::Var(v) => {
                    if let Some(site) = &self.origin[v] {
                        return Some(site.clone());
                    }
                    match &self.subst[v] {
                        Some(next) => cur = next.clone(),
                        None => return None,
                    }
                }
                Ty::Known(_) => return None,
            }
        }
    }

    fn run(&mut self) {
        let program = self.program;
        // Globals are typed from their initial values.
        for (name, value) in &program.globals {
            let site = format!("<global {name}>");
            let v = self.key_var(VarKey::Global(name.clone()), &site);
            if let Some(ty) = self.value_type(value, &site) {
                self.unify(Ty::Var(v), Ty::Known(ty), &site);
            }
        }

        for block in &program.blocks {
            let hat = block.block_id.clone();
            for p in &block.params {
                let v = self.key_var(VarKey::Param(block.name.clone(), p.name.clone()), &hat);
                if let Some(t) = p.declared_type {
                    let ty = match t {
                        DeclaredType::Int => StaticType::Int,
                        DeclaredType::Bool => StaticType::Bool,
                        DeclaredType::IntList => StaticType::IntList,
                    };
                    self.unify(Ty::Var(v), Ty::Known(ty), &hat);
                }
            }
            if block.kind.returns_value() {
                let v = self.key_var(VarKey::Result(block.name.clone()), &hat);
                if block.kind == BlockKind::Predicate {
                    self.unify(Ty::Var(v), Ty::Known(StaticType::Bool), &hat);
                }
            }

            let mut scope = Scope {
                owner: block.name.clone(),
                block: Some(block),
                bound: Vec::new(),
            };
            for e in &block.pre {
                self.expect(e, StaticType::Bool, &mut scope);
            }
            for e in &block.post {
                self.expect(e, StaticType::Bool, &mut scope);
            }
            self.stmts(&block.body, &mut scope);
        }

        for (name, stmts) in &program.entry_scripts {
            let mut scope = Scope {
                owner: name.clone(),
                block: None,
                bound: Vec::new(),
            };
            self.stmts(stmts, &mut scope);
        }
    }

    fn finish(self) -> Result<BTreeMap<VarKey, StaticType>, Vec<Diagnostic>> {
        let mut out = BTreeMap::new();
        let mut diags = Vec::new();
        for (key, var) in &self.keys {
            match self.resolve(&Ty::Var(*var)) {
                Ty::Known(t) => {
                    out.insert(key.clone(), t);
                }
                Ty::Var(_) => diags.push(
                    Diagnostic::error(
                        Phase::Typecheck,
                        "E_UNTYPEABLE",
                        format!(
                            "cannot determine a type for {key}: add a use or a type annotation"
                        ),
                    )
                    .at(self.key_sites[key].clone()),
                ),
            }
        }
        if diags.is_empty() {
            Ok(out)
        } else {
            Err(diags)
        }
    }

    /// Static type of a literal value, or None after reporting an error.
    fn value_type(&mut self, value: &Value, at: &NodeId) -> Option<StaticType> {
        match value {
            Value::Number(n) => {
                if n.fract() != 0.0 {
                    self.error(
                        "E_NONINT_LITERAL",
                        at,
                        format!("literal {n} is not an integer"),
                    );
                    None
                } else {
                    Some(StaticType::Int)
                }
            }
            Value::Bool(_) => Some(StaticType::Bool),
            Value::Text(_) => {
                self.error(
                    "E_TEXT_UNSUPPORTED",
                    at,
                    "text values are not supported in the static fragment".into(),
                );
                None
            }
            Value::List(items) => {
                for item in items {
                    match item {
                        Value::Number(n) if n.fract() == 0.0 => {}
                        Value::Number(n) => self.error(
                            "E_NONINT_LITERAL",
                            at,
                            format!("list element {n} is not an integer"),
                        ),
                        Value::List(_) => self.error(
                            "E_NESTED_LIST",
                            at,
                            "nested lists are not supported in the static fragment".into(),
                        ),
                        Value::Text(_) => self.error(
                            "E_TEXT_UNSUPPORTED",
                            at,
                            "text values are not supported in the static fragment".into(),
                        ),
                        Value::Bool(_) => self.error(
                            "E_DYNAMIC_TYPING",
                            at,
                            "list elements must be integers".into(),
                        ),
                    }
                }
                Some(StaticType::IntList)
            }
        }
    }

    fn var_ty(&mut self, name: &Ident, scope: &Scope, site: &NodeId) -> Ty {
        // Quantifier-bound variables are always Int.
        if scope.bound.iter().rev().any(|b| b == name) {
            return Ty::Known(StaticType::Int);
        }
        if let Some(block) = scope.block {
            if block.params.iter().any(|p| &p.name == name) {
                let v = self.key_var(VarKey::Param(block.name.clone(), name.clone()), site);
                return Ty::Var(v);
            }
        }
        if self.program.global(name).is_some() {
            // Locals shadow nothing here: validate forbids param/global
            // shadowing and locals are tracked under the owner scope.
            if !self.is_local(name, scope) {
                let v = self.key_var(VarKey::Global(name.clone()), site);
                return Ty::Var(v);
            }
        }
        let v = self.key_var(VarKey::Local(scope.owner.clone(), name.clone()), site);
        Ty::Var(v)
    }

    fn is_local(&self, name: &Ident, scope: &Scope) -> bool {
        let stmts = match scope.block {
            Some(b) => &b.body,
            None => match self.program.entry_script(&scope.owner) {
                Some(s) => return collect_locals(s).contains(name),
                None => return false,
            },
        };
        collect_locals(stmts).contains(name)
    }

    fn expect(&mut self, expr: &Expr, want: StaticType, scope: &mut Scope) {
        let got = self.expr(expr, scope);
        self.unify(got, Ty::Known(want), &expr.id);
    }

    fn expr(&mut self, expr: &Expr, scope: &mut Scope) -> Ty {
        match &expr.kind {
            ExprKind::Literal(v) => match self.value_type(v, &expr.id) {
                Some(t) => Ty::Known(t),
                None => Ty::Var(self.fresh()),
            },
            ExprKind::VarRef(name) => self.var_ty(name, scope, &expr.id),
            ExprKind::Arith { op, left, right } => {
                if *op == ArithOp::Div {
                    self.warnings.push(
                        Diagnostic::warning(
                            Phase::Typecheck,
                            "W_DIV_SEMANTICS",
                            "static verification uses integer division; runtime uses real division",
                        )
                        .at(expr.id.clone()),
                    );
                }
                self.expect(left, StaticType::Int, scope);
                self.expect(right, StaticType::Int, scope);
                Ty::Known(StaticType::Int)
            }
            ExprKind::Compare { op, left, right } => {
                match op {
                    CmpOp::Eq | CmpOp::Neq => {
                        let l = self.expr(left, scope);
                        let r = self.expr(right, scope);
                        self.unify(l, r, &expr.id);
                    }
                    _ => {
                        self.expect(left, StaticType::Int, scope);
                        self.expect(right, StaticType::Int, scope);
                    }
                }
                Ty::Known(StaticType::Bool)
            }
            ExprKind::BoolOp { operands, .. } => {
                for e in operands {
                    self.expect(e, StaticType::Bool, scope);
                }
                Ty::Known(StaticType::Bool)
            }
            ExprKind::Old(name) => self.var_ty(name, scope, &expr.id),
            ExprKind::Result => {
                let block = scope.block.expect("validate ensures result placement");
                let v = self.key_var(VarKey::Result(block.name.clone()), &expr.id);
                Ty::Var(v)
            }
            ExprKind::Quantifier {
                bound,
                domain,
                body,
                ..
            } => {
                match domain {
                    Domain::IntRange { lo, hi } => {
                        self.expect(lo, StaticType::Int, scope);
                        self.expect(hi, StaticType::Int, scope);
                    }
                    Domain::Elements(list) => self.expect(list, StaticType::IntList, scope),
                }
                scope.bound.push(bound.clone());
                self.expect(body, StaticType::Bool, scope);
                scope.bound.pop();
                Ty::Known(StaticType::Bool)
            }
            ExprKind::Item { index, list } => {
                self.expect(index, StaticType::Int, scope);
                self.expect(list, StaticType::IntList, scope);
                Ty::Known(StaticType::Int)
            }
            ExprKind::LengthOf(list) => {
                self.expect(list, StaticType::IntList, scope);
                Ty::Known(StaticType::Int)
            }
            ExprKind::Contains { list, elem } => {
                self.expect(list, StaticType::IntList, scope);
                self.elem_expect_int(elem, scope);
                Ty::Known(StaticType::Bool)
            }
            ExprKind::Call { block, args } => {
                let callee = self.program.block(block).expect("validate resolves calls");
                for (p, a) in callee.params.iter().zip(args) {
                    let want = Ty::Var(
                        self.key_var(VarKey::Param(callee.name.clone(), p.name.clone()), &a.id),
                    );
                    let got = self.expr(a, scope);
                    self.unify(got, want, &a.id);
                }
                Ty::Var(self.key_var(VarKey::Result(callee.name.clone()), &expr.id))
            }
        }
    }

    /// Like `expect(_, Int)` but reports a list where an element is expected
    /// as E_NESTED_LIST rather than a generic type conflict.
    fn elem_expect_int(&mut self, elem: &Expr, scope: &mut Scope) {
        let got = self.expr(elem, scope);
        if let Ty::Known(StaticType::IntList) = self.resolve(&got) {
            self.error(
                "E_NESTED_LIST",
                &elem.id,
                "a list cannot be an element of another list".into(),
            );
            return;
        }
        self.unify(got, Ty::Known(StaticType::Int), &elem.id);
    }

    fn stmts(&mut self, stmts: &[Stmt], scope: &mut Scope) {
        for stmt in stmts {
            match &stmt.kind {
                StmtKind::DeclareLocals(names) => {
                    for n in names {
                        self.key_var(VarKey::Local(scope.owner.clone(), n.clone()), &stmt.id);
                    }
                }
                StmtKind::SetVar { name, value } => {
                    let var = self.var_ty(name, scope, &stmt.id);
                    let val = self.expr(value, scope);
                    self.unify(var, val, &stmt.id);
                }
                StmtKind::ChangeVar { name, delta } => {
                    let var = self.var_ty(name, scope, &stmt.id);
                    self.unify(var, Ty::Known(StaticType::Int), &stmt.id);
                    self.expect(delta, StaticType::Int, scope);
                }
                StmtKind::IfElse {
                    cond,
                    then_branch,
                    else_branch,
                } => {
                    self.expect(cond, StaticType::Bool, scope);
                    self.stmts(then_branch, scope);
                    self.stmts(else_branch, scope);
                }
                StmtKind::RepeatN {
                    count,
                    invariant,
                    body,
                } => {
                    self.expect(count, StaticType::Int, scope);
                    for e in invariant {
                        self.expect(e, StaticType::Bool, scope);
                    }
                    self.stmts(body, scope);
                }
                StmtKind::RepeatUntil {
                    cond,
                    invariant,
                    body,
                } => {
                    self.expect(cond, StaticType::Bool, scope);
                    for e in invariant {
                        self.expect(e, StaticType::Bool, scope);
                    }
                    self.stmts(body, scope);
                }
                StmtKind::Assert(cond) => self.expect(cond, StaticType::Bool, scope),
                StmtKind::Report(value) => {
                    let block = scope.block.expect("validate ensures report placement");
                    let want = Ty::Var(self.key_var(VarKey::Result(block.name.clone()), &stmt.id));
                    let got = self.expr(value, scope);
                    self.unify(got, want, &stmt.id);
                }
                StmtKind::CallCommand { block, args } => {
                    let callee = self.program.block(block).expect("validate resolves calls");
                    for (p, a) in callee.params.iter().zip(args) {
                        let want = Ty::Var(
                            self.key_var(VarKey::Param(callee.name.clone(), p.name.clone()), &a.id),
                        );
                        let got = self.expr(a, scope);
                        self.unify(got, want, &a.id);
                    }
                }
                StmtKind::AddToList { elem, list } => {
                    let var = self.var_ty(list, scope, &stmt.id);
                    self.unify(var, Ty::Known(StaticType::IntList), &stmt.id);
                    self.elem_expect_int(elem, scope);
                }
                StmtKind::ReplaceItem { index, list, elem } => {
                    let var = self.var_ty(list, scope, &stmt.id);
                    self.unify(var, Ty::Known(StaticType::IntList), &stmt.id);
                    self.expect(index, StaticType::Int, scope);
                    self.elem_expect_int(elem, scope);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build;

    fn script(stmts: Vec<Stmt>) -> Program {
        build::finish(Program {
            entry_scripts: vec![("main".into(), stmts)],
            ..Program::default()
        })
    }

    #[test]
    fn dynamic_typing_cites_both_sites() {
        let p = script(vec![
            build::declare_locals(&["x"]),
            build::set("x", build::num(5)),
            build::set("x", build::bool_lit(true)),
        ]);
        let diags = infer_types(&p).unwrap_err();
        assert_eq!(diags[0].code, "E_DYNAMIC_TYPING");
        // Cites the later SetVar and names the earlier one in the message.
        assert_eq!(diags[0].block_id.as_deref(), Some("main#3"));
        assert!(diags[0].message.contains("main#1"), "{}", diags[0].message);
    }

    #[test]
    fn nested_list_rejected() {
        let p = script(vec![
            build::declare_locals(&["L"]),
            build::set("L", build::int_list(&[1, 2])),
            build::add_to_list(build::int_list(&[3]), "L"),
        ]);
        let diags = infer_types(&p).unwrap_err();
        assert!(diags.iter().any(|d| d.code == "E_NESTED_LIST"));
    }

    #[test]
    fn predicate_forces_int_param_and_bool_result() {
        let mut b = build::block("isPos", BlockKind::Predicate, vec![build::param("x")]);
        b.body = vec![build::report(build::gt(build::var("x"), build::num(0)))];
        let p = build::finish(Program {
            blocks: vec![b],
            ..Program::default()
        });
        let typed = infer_types(&p).unwrap();
        assert_eq!(
            typed.type_of[&VarKey::Param("isPos".into(), "x".into())],
            StaticType::Int
        );
        assert_eq!(
            typed.type_of[&VarKey::Result("isPos".into())],
            StaticType::Bool
        );
    }

    #[test]
    fn unused_untyped_param_is_untypeable() {
        let mut b = build::block("f", BlockKind::Reporter, vec![build::param("x")]);
        b.body = vec![build::report(build::num(0))];
        let p = build::finish(Program {
            blocks: vec![b],
            ..Program::default()
        });
        let diags = infer_types(&p).unwrap_err();
        assert_eq!(diags[0].code, "E_UNTYPEABLE");
    }

    #[test]
    fn declared_param_type_is_trusted_and_checked() {
        let mut b = build::block("f", BlockKind::Reporter, vec![]);
        b.params = vec![Param {
            name: "x".into(),
            declared_type: Some(DeclaredType::Bool),
        }];
        b.body = vec![build::report(build::add(build::var("x"), build::num(1)))];
        let p = build::finish(Program {
            blocks: vec![b],
            ..Program::default()
        });
        let diags = infer_types(&p).unwrap_err();
        assert_eq!(diags[0].code, "E_DYNAMIC_TYPING");
    }

    #[test]
    fn text_literal_rejected() {
        let p = script(vec![
            build::declare_locals(&["x"]),
            build::set("x", build::text("hello")),
        ]);
        let diags = infer_types(&p).unwrap_err();
        assert_eq!(diags[0].code, "E_TEXT_UNSUPPORTED");
    }

    #[test]
    fn nonint_literal_rejected() {
        let p = script(vec![
            build::declare_locals(&["x"]),
            build::set("x", build::real(1.5)),
        ]);
        let diags = infer_types(&p).unwrap_err();
        assert_eq!(diags[0].code, "E_NONINT_LITERAL");
    }

    #[test]
    fn div_produces_warning() {
        let p = script(vec![
            build::declare_locals(&["x"]),
            build::set("x", build::div(build::num(6), build::num(2))),
        ]);
        let typed = infer_types(&p).unwrap();
        assert_eq!(typed.warnings[0].code, "W_DIV_SEMANTICS");
    }

    #[test]
    fn modifies_is_transitive() {
        // a sets global g; b calls a.
        let mut a = build::block("a", BlockKind::Command, vec![]);
        a.body = vec![build::set("g", build::num(1))];
        let mut b = build::block("b", BlockKind::Command, vec![]);
        b.body = vec![build::call_command("a", vec![])];
        let p = build::finish(Program {
            globals: vec![("g".into(), Value::Number(0.0))],
            blocks: vec![a, b],
            ..Program::default()
        });
        let typed = infer_types(&p).unwrap();
        assert_eq!(
            typed.modifies_of["b"],
            ["g".to_string()].into_iter().collect::<BTreeSet<_>>()
        );
    }

    #[test]
    fn modifies_mutual_recursion_fixpoint() {
        // Hand fixpoint on the 2-node call graph: both end with {g1, g2}.
        let mut a = build::block("a", BlockKind::Command, vec![]);
        a.body = vec![
            build::set("g1", build::num(1)),
            build::if_else(
                build::gt(build::var("g1"), build::num(0)),
                vec![],
                vec![build::call_command("b", vec![])],
            ),
        ];
        let mut b = build::block("b", BlockKind::Command, vec![]);
        b.body = vec![
            build::set("g2", build::num(1)),
            build::if_else(
                build::gt(build::var("g2"), build::num(0)),
                vec![],
                vec![build::call_command("a", vec![])],
            ),
        ];
        let p = build::finish(Program {
            globals: vec![
                ("g1".into(), Value::Number(0.0)),
                ("g2".into(), Value::Number(0.0)),
            ],
            blocks: vec![a, b],
            ..Program::default()
        });
        let mut typed = infer_types(&p).unwrap();
        let both: BTreeSet<String> = ["g1".to_string(), "g2".to_string()].into_iter().collect();
        assert_eq!(typed.modifies_of["a"], both);
        assert_eq!(typed.modifies_of["b"], both);

        // Idempotent.
        let before = typed.modifies_of.clone();
        compute_modifies(&mut typed);
        assert_eq!(typed.modifies_of, before);
    }

    #[test]
    fn local_only_assignment_has_empty_modifies() {
        let mut a = build::block("a", BlockKind::Command, vec![]);
        a.body = vec![
            build::declare_locals(&["t"]),
            build::set("t", build::num(1)),
        ];
        let p = build::finish(Program {
            globals: vec![("g".into(), Value::Number(0.0))],
            blocks: vec![a],
            ..Program::default()
        });
        let typed = infer_types(&p).unwrap();
        assert!(typed.modifies_of["a"].is_empty());
    }
}
