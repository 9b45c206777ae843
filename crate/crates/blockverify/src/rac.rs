//! Runtime assertion checking interpreter.
//!
//! Executes programs with the full contract protocol: precondition at call,
//! old-state snapshot before the precondition, assert statements, loop
//! invariants at loop entry and after every iteration, postcondition at
//! return. Execution stops at the first violation.

use std::collections::HashMap;

use thiserror::Error;

use crate::ast::*;
use crate::diag::{Diagnostic, Phase};

pub const DEFAULT_DEPTH_LIMIT: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    Precondition,
    Postcondition,
    Assertion,
    InvariantEntry,
    InvariantIteration,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::Precondition => "precondition",
            ViolationKind::Postcondition => "postcondition",
            ViolationKind::Assertion => "assertion",
            ViolationKind::InvariantEntry => "invariant (loop entry)",
            ViolationKind::InvariantIteration => "invariant (after iteration)",
        }
    }
}

/// A contract violation observed during execution.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub block_id: NodeId,
    /// 1-based index of the first failing conjunct in slot order.
    pub slot_index: usize,
    pub call_chain: Vec<NodeId>,
    /// Iteration counter, for the invariant kinds.
    pub iteration: Option<u64>,
}

impl Violation {
    /// Stable diagnostic code for this violation kind.
    pub fn code(&self) -> &'static str {
        match self.kind {
            ViolationKind::Precondition => "E_PRECONDITION",
            ViolationKind::Postcondition => "E_POSTCONDITION",
            ViolationKind::Assertion => "E_ASSERTION",
            ViolationKind::InvariantEntry => "E_INVARIANT_ENTRY",
            ViolationKind::InvariantIteration => "E_INVARIANT_ITERATION",
        }
    }

    pub fn to_diagnostic(&self) -> Diagnostic {
        let mut message = format!("{} violated", self.kind.as_str());
        if let Some(i) = self.iteration {
            message.push_str(&format!(" (after iteration {i})"));
        }
        Diagnostic::error(Phase::Runtime, self.code(), message)
            .at(self.block_id.clone())
            .slot(self.slot_index)
            .with_chain(self.call_chain.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuntimeCode {
    Type,
    Index,
    DivZero,
    Unbound,
    NoOld,
    NoResult,
    NonboolSpec,
    NoReport,
    StackOverflow,
    EntryNotFound,
    Arity,
}

impl RuntimeCode {
    pub fn as_str(self) -> &'static str {
        match self {
            RuntimeCode::Type => "E_TYPE",
            RuntimeCode::Index => "E_INDEX",
            RuntimeCode::DivZero => "E_DIV_ZERO",
            RuntimeCode::Unbound => "E_UNBOUND",
            RuntimeCode::NoOld => "E_NO_OLD",
            RuntimeCode::NoResult => "E_NO_RESULT",
            RuntimeCode::NonboolSpec => "E_NONBOOL_SPEC",
            RuntimeCode::NoReport => "E_NO_REPORT",
            RuntimeCode::StackOverflow => "E_STACK_OVERFLOW",
            RuntimeCode::EntryNotFound => "E_ENTRY_NOT_FOUND",
            RuntimeCode::Arity => "E_ARITY",
        }
    }
}

/// A runtime fault that is not a contract violation (type error, bad index,
/// unbound name, ...).
#[derive(Clone, Debug, PartialEq, Error)]
#[error("{}: {message} (at {block_id})", code.as_str())]
pub struct RuntimeFault {
    pub code: RuntimeCode,
    pub block_id: NodeId,
    pub message: String,
}

impl RuntimeFault {
    pub fn to_diagnostic(&self) -> Diagnostic {
        Diagnostic::error(Phase::Runtime, self.code.as_str(), self.message.clone())
            .at(self.block_id.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum RacError {
    #[error("{} violated at {}, slot {}", .0.kind.as_str(), .0.block_id, .0.slot_index)]
    Violation(Violation),
    #[error(transparent)]
    Fault(#[from] RuntimeFault),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Passed,
    Violated(Violation),
    Fault(RuntimeFault),
}

/// Result of [`Interpreter::run_entry`]: final globals, returned value if
/// any, and either `Passed` or the first violation/fault.
#[derive(Clone, Debug, PartialEq)]
pub struct ExecutionReport {
    pub outcome: Outcome,
    pub result: Option<Value>,
    pub globals: Vec<(Ident, Value)>,
}

struct Frame {
    params: HashMap<Ident, Value>,
    locals: HashMap<Ident, Value>,
    old_snapshot: HashMap<Ident, Value>,
    result_slot: Option<Value>,
    has_old: bool,
    has_result: bool,
}

impl Frame {
    fn bare() -> Self {
        Frame {
            params: HashMap::new(),
            locals: HashMap::new(),
            old_snapshot: HashMap::new(),
            result_slot: None,
            has_old: false,
            has_result: false,
        }
    }
}

enum Flow {
    Normal,
    Reported,
}

pub struct Interpreter<'p> {
    program: &'p Program,
    globals: HashMap<Ident, Value>,
    frames: Vec<Frame>,
    call_chain: Vec<NodeId>,
    depth_limit: usize,
    /// Number of invariant-conjunction evaluations performed, for the
    /// check-count law tests.
    pub invariant_evaluations: u64,
}

impl<'p> Interpreter<'p> {
    pub fn new(program: &'p Program) -> Self {
        let globals = program
            .globals
            .iter()
            .map(|(n, v)| (n.clone(), v.clone()))
            .collect();
        Interpreter {
            program,
            globals,
            frames: Vec::new(),
            call_chain: Vec::new(),
            depth_limit: DEFAULT_DEPTH_LIMIT,
            invariant_evaluations: 0,
        }
    }

    pub fn with_depth_limit(mut self, limit: usize) -> Self {
        self.depth_limit = limit;
        self
    }

    /// Overrides a global's initial value before running.
    pub fn set_global(&mut self, name: &str, value: Value) {
        self.globals.insert(name.to_string(), value);
    }

    /// Runs an entry script or calls a block with positional arguments.
    pub fn run_entry(&mut self, entry: &str, args: &[Value]) -> ExecutionReport {
        let run = self.run_entry_inner(entry, args);
        let globals: Vec<(Ident, Value)> = self
            .program
            .globals
            .iter()
            .map(|(n, _)| (n.clone(), self.globals[n].clone()))
            .collect();
        match run {
            Ok(result) => ExecutionReport {
                outcome: Outcome::Passed,
                result,
                globals,
            },
            Err(RacError::Violation(v)) => ExecutionReport {
                outcome: Outcome::Violated(v),
                result: None,
                globals,
            },
            Err(RacError::Fault(f)) => ExecutionReport {
                outcome: Outcome::Fault(f),
                result: None,
                globals,
            },
        }
    }

    fn run_entry_inner(&mut self, entry: &str, args: &[Value]) -> Result<Option<Value>, RacError> {
        if let Some(block) = self.program.block(entry) {
            if args.len() != block.params.len() {
                return Err(self
                    .fault(
                        RuntimeCode::Arity,
                        &block.block_id.clone(),
                        format!(
                            "block `{entry}` takes {} argument(s), {} given",
                            block.params.len(),
                            args.len()
                        ),
                    )
                    .into());
            }
            return self.call_block(block, args.to_vec());
        }
        if let Some(stmts) = self.program.entry_script(entry) {
            if !args.is_empty() {
                return Err(self
                    .fault(
                        RuntimeCode::Arity,
                        &entry.to_string(),
                        "entry scripts take no arguments".to_string(),
                    )
                    .into());
            }
            self.frames.push(Frame::bare());
            self.call_chain.push(entry.to_string());
            let r = self.exec_stmts(stmts);
            self.call_chain.pop();
            self.frames.pop();
            r?;
            return Ok(None);
        }
        Err(self
            .fault(
                RuntimeCode::EntryNotFound,
                &entry.to_string(),
                format!("no block or entry script named `{entry}`"),
            )
            .into())
    }

    fn fault(&self, code: RuntimeCode, block_id: &NodeId, message: String) -> RuntimeFault {
        RuntimeFault {
            code,
            block_id: block_id.clone(),
            message,
        }
    }

    // -- calls ------------------------------------------------------------

    /// The contract protocol: push frame, snapshot old variables, check the
    /// precondition, run the body, default the result, check the
    /// postcondition, pop.
    pub fn call_block(
        &mut self,
        block: &BlockDef,
        args: Vec<Value>,
    ) -> Result<Option<Value>, RacError> {
        if self.frames.len() >= self.depth_limit {
            return Err(self
                .fault(
                    RuntimeCode::StackOverflow,
                    &block.block_id,
                    format!("call depth limit {} exceeded", self.depth_limit),
                )
                .into());
        }

        let mut frame = Frame::bare();
        for (p, v) in block.params.iter().zip(args) {
            frame.params.insert(p.name.clone(), v);
        }
        frame.has_old = true;
        self.frames.push(frame);
        self.call_chain.push(block.block_id.clone());

        let result = self.call_body(block);

        self.call_chain.pop();
        self.frames.pop();
        result
    }

    fn call_body(&mut self, block: &BlockDef) -> Result<Option<Value>, RacError> {
        // Snapshot every variable named under `old` in the postcondition,
        // before the precondition is evaluated. Lists are deep-copied.
        let mut old_names = std::collections::BTreeSet::new();
        for slot in &block.post {
            collect_old_names(slot, &mut old_names);
        }
        for name in old_names {
            if let Some(v) = self.lookup(&name) {
                let v = v.clone();
                self.top_frame().old_snapshot.insert(name, v);
            }
        }

        self.check_slots(
            &block.pre,
            ViolationKind::Precondition,
            &block.block_id,
            None,
        )?;

        let flow = self.exec_stmts_flow(&block.body)?;
        let _ = flow;

        if block.kind.returns_value() && self.top_frame().result_slot.is_none() {
            match block.kind {
                BlockKind::Predicate => {
                    self.top_frame().result_slot = Some(Value::Bool(false));
                }
                _ => {
                    return Err(self
                        .fault(
                            RuntimeCode::NoReport,
                            &block.block_id,
                            format!(
                                "reporter `{}` finished without reporting a value",
                                block.name
                            ),
                        )
                        .into())
                }
            }
        }
        self.top_frame().has_result = block.kind.returns_value();

        self.check_slots(
            &block.post,
            ViolationKind::Postcondition,
            &block.block_id,
            None,
        )?;

        Ok(self.top_frame().result_slot.take())
    }

    fn top_frame(&mut self) -> &mut Frame {
        self.frames.last_mut().expect("active frame")
    }

    /// Evaluates contract slots in order; the first false conjunct raises a
    /// violation carrying its 1-based slot index. Slots must be booleans.
    fn check_slots(
        &mut self,
        slots: &[Expr],
        kind: ViolationKind,
        at: &NodeId,
        iteration: Option<u64>,
    ) -> Result<(), RacError> {
        for (i, slot) in slots.iter().enumerate() {
            match self.eval_expr(slot)? {
                Value::Bool(true) => {}
                Value::Bool(false) => {
                    return Err(RacError::Violation(Violation {
                        kind,
                        block_id: at.clone(),
                        slot_index: i + 1,
                        call_chain: self.call_chain.clone(),
                        iteration,
                    }))
                }
                other => {
                    return Err(self
                        .fault(
                            RuntimeCode::NonboolSpec,
                            &slot.id,
                            format!(
                                "specification slot evaluated to {} instead of a boolean",
                                kind_name(&other)
                            ),
                        )
                        .into())
                }
            }
        }
        Ok(())
    }

    fn check_invariants(
        &mut self,
        slots: &[Expr],
        loop_id: &NodeId,
        iteration: Option<u64>,
    ) -> Result<(), RacError> {
        self.invariant_evaluations += 1;
        let kind = if iteration.is_none() {
            ViolationKind::InvariantEntry
        } else {
            ViolationKind::InvariantIteration
        };
        self.check_slots(slots, kind, loop_id, iteration)
    }

    // -- statements -------------------------------------------------------

    pub fn exec_stmts(&mut self, stmts: &[Stmt]) -> Result<(), RacError> {
        self.exec_stmts_flow(stmts).map(|_| ())
    }

    fn exec_stmts_flow(&mut self, stmts: &[Stmt]) -> Result<Flow, RacError> {
        for stmt in stmts {
            if let Flow::Reported = self.exec_stmt(stmt)? {
                return Ok(Flow::Reported);
            }
        }
        Ok(Flow::Normal)
    }

    fn exec_stmt(&mut self, stmt: &Stmt) -> Result<Flow, RacError> {
        match &stmt.kind {
            StmtKind::DeclareLocals(names) => {
                for n in names {
                    self.top_frame()
                        .locals
                        .insert(n.clone(), Value::Number(0.0));
                }
                Ok(Flow::Normal)
            }
            StmtKind::SetVar { name, value } => {
                let v = self.eval_expr(value)?;
                self.assign(name, v, &stmt.id)?;
                Ok(Flow::Normal)
            }
            StmtKind::ChangeVar { name, delta } => {
                let d = self.eval_number(delta)?;
                let current = match self.lookup(name) {
                    Some(Value::Number(n)) => *n,
                    Some(other) => {
                        let k = kind_name(other);
                        return Err(self
                            .fault(
                                RuntimeCode::Type,
                                &stmt.id,
                                format!("cannot change non-number `{name}` ({k})"),
                            )
                            .into());
                    }
                    None => {
                        return Err(self
                            .fault(
                                RuntimeCode::Unbound,
                                &stmt.id,
                                format!("variable `{name}` is not defined"),
                            )
                            .into())
                    }
                };
                self.assign(name, Value::Number(current + d), &stmt.id)?;
                Ok(Flow::Normal)
            }
            StmtKind::IfElse {
                cond,
                then_branch,
                else_branch,
            } => {
                if self.eval_bool(cond)? {
                    self.exec_stmts_flow(then_branch)
                } else {
                    self.exec_stmts_flow(else_branch)
                }
            }
            StmtKind::RepeatN {
                count,
                invariant,
                body,
            } => {
                // The count is evaluated once, up front. Non-negative
                // numbers are truncated; anything else is a type error.
                let n = self.eval_number(count)?;
                if !n.is_finite() || n < 0.0 {
                    return Err(self
                        .fault(
                            RuntimeCode::Type,
                            &stmt.id,
                            format!("repeat count must be a non-negative number, got {n}"),
                        )
                        .into());
                }
                let n = n.trunc() as u64;
                self.check_invariants(invariant, &stmt.id, None)?;
                for i in 1..=n {
                    if let Flow::Reported = self.exec_stmts_flow(body)? {
                        return Ok(Flow::Reported);
                    }
                    self.check_invariants(invariant, &stmt.id, Some(i))?;
                }
                Ok(Flow::Normal)
            }
            StmtKind::RepeatUntil {
                cond,
                invariant,
                body,
            } => {
                self.check_invariants(invariant, &stmt.id, None)?;
                let mut i = 0u64;
                loop {
                    if self.eval_bool(cond)? {
                        return Ok(Flow::Normal);
                    }
                    if let Flow::Reported = self.exec_stmts_flow(body)? {
                        return Ok(Flow::Reported);
                    }
                    i += 1;
                    self.check_invariants(invariant, &stmt.id, Some(i))?;
                }
            }
            StmtKind::Assert(cond) => match self.eval_expr(cond)? {
                Value::Bool(true) => Ok(Flow::Normal),
                Value::Bool(false) => Err(RacError::Violation(Violation {
                    kind: ViolationKind::Assertion,
                    block_id: stmt.id.clone(),
                    slot_index: 1,
                    call_chain: self.call_chain.clone(),
                    iteration: None,
                })),
                other => Err(self
                    .fault(
                        RuntimeCode::NonboolSpec,
                        &stmt.id,
                        format!("assert condition evaluated to {}", kind_name(&other)),
                    )
                    .into()),
            },
            StmtKind::Report(value) => {
                let v = self.eval_expr(value)?;
                self.top_frame().result_slot = Some(v);
                Ok(Flow::Reported)
            }
            StmtKind::CallCommand { block, args } => {
                let def = self.resolve_block(block, &stmt.id)?;
                let argv = args
                    .iter()
                    .map(|a| self.eval_expr(a))
                    .collect::<Result<Vec<_>, _>>()?;
                self.call_block(def, argv)?;
                Ok(Flow::Normal)
            }
            StmtKind::AddToList { elem, list } => {
                let v = self.eval_expr(elem)?;
                match self.lookup(list) {
                    Some(Value::List(_)) => {}
                    Some(other) => {
                        let k = kind_name(other);
                        return Err(self
                            .fault(
                                RuntimeCode::Type,
                                &stmt.id,
                                format!("`{list}` is not a list ({k})"),
                            )
                            .into());
                    }
                    None => {
                        return Err(self
                            .fault(
                                RuntimeCode::Unbound,
                                &stmt.id,
                                format!("variable `{list}` is not defined"),
                            )
                            .into())
                    }
                }
                self.mutate_list(list, |items| {
                    items.push(v);
                    Ok(())
                })?;
                Ok(Flow::Normal)
            }
            StmtKind::ReplaceItem { index, list, elem } => {
                let idx = self.eval_index(index)?;
                let v = self.eval_expr(elem)?;
                let stmt_id = stmt.id.clone();
                match self.lookup(list) {
                    Some(Value::List(items)) => {
                        if idx < 1 || idx as usize > items.len() {
                            let len = items.len();
                            return Err(self
                                .fault(
                                    RuntimeCode::Index,
                                    &stmt_id,
                                    format!("index {idx} out of bounds for list of length {len}"),
                                )
                                .into());
                        }
                    }
                    Some(other) => {
                        let k = kind_name(other);
                        return Err(self
                            .fault(
                                RuntimeCode::Type,
                                &stmt_id,
                                format!("`{list}` is not a list ({k})"),
                            )
                            .into());
                    }
                    None => {
                        return Err(self
                            .fault(
                                RuntimeCode::Unbound,
                                &stmt_id,
                                format!("variable `{list}` is not defined"),
                            )
                            .into())
                    }
                }
                self.mutate_list(list, |items| {
                    items[idx as usize - 1] = v;
                    Ok(())
                })?;
                Ok(Flow::Normal)
            }
        }
    }

    // -- variable access --------------------------------------------------

    /// Lookup order: locals, then params, then globals.
    fn lookup(&self, name: &str) -> Option<&Value> {
        if let Some(frame) = self.frames.last() {
            if let Some(v) = frame.locals.get(name) {
                return Some(v);
            }
            if let Some(v) = frame.params.get(name) {
                return Some(v);
            }
        }
        self.globals.get(name)
    }

    fn assign(&mut self, name: &str, value: Value, at: &NodeId) -> Result<(), RacError> {
        if let Some(frame) = self.frames.last_mut() {
            if frame.locals.contains_key(name) {
                frame.locals.insert(name.to_string(), value);
                return Ok(());
            }
        }
        if self.globals.contains_key(name) {
            self.globals.insert(name.to_string(), value);
            return Ok(());
        }
        Err(self
            .fault(
                RuntimeCode::Unbound,
                at,
                format!("variable `{name}` is not defined"),
            )
            .into())
    }

    fn mutate_list(
        &mut self,
        name: &str,
        f: impl FnOnce(&mut Vec<Value>) -> Result<(), RacError>,
    ) -> Result<(), RacError> {
        if let Some(frame) = self.frames.last_mut() {
            if let Some(Value::List(items)) = frame.locals.get_mut(name) {
                return f(items);
            }
        }
        if let Some(Value::List(items)) = self.globals.get_mut(name) {
            return f(items);
        }
        unreachable!("caller checked that `{name}` is a list");
    }

    fn resolve_block(&self, name: &str, at: &NodeId) -> Result<&'p BlockDef, RacError> {
        self.program.block(name).ok_or_else(|| {
            self.fault(
                RuntimeCode::Unbound,
                at,
                format!("block `{name}` is not defined"),
            )
            .into()
        })
    }

    // -- expressions ------------------------------------------------------

    pub fn eval_expr(&mut self, expr: &Expr) -> Result<Value, RacError> {
        match &expr.kind {
            ExprKind::Literal(v) => Ok(v.clone()),
            ExprKind::VarRef(name) => match self.lookup(name) {
                Some(v) => Ok(v.clone()),
                None => Err(self
                    .fault(
                        RuntimeCode::Unbound,
                        &expr.id,
                        format!("variable `{name}` is not defined"),
                    )
                    .into()),
            },
            ExprKind::Arith { op, left, right } => {
                let l = self.eval_number(left)?;
                let r = self.eval_number(right)?;
                let v = match op {
                    ArithOp::Add => l + r,
                    ArithOp::Sub => l - r,
                    ArithOp::Mul => l * r,
                    ArithOp::Div => {
                        if r == 0.0 {
                            return Err(self
                                .fault(RuntimeCode::DivZero, &expr.id, "division by zero".into())
                                .into());
                        }
                        l / r
                    }
                    ArithOp::Mod => {
                        if r == 0.0 {
                            return Err(self
                                .fault(RuntimeCode::DivZero, &expr.id, "modulo by zero".into())
                                .into());
                        }
                        // Floored modulo, so the result follows the divisor's
                        // sign and agrees with the verifier on positive
                        // divisors.
                        l - r * (l / r).floor()
                    }
                };
                Ok(Value::Number(v))
            }
            ExprKind::Compare { op, left, right } => {
                let l = self.eval_expr(left)?;
                let r = self.eval_expr(right)?;
                let b = match op {
                    CmpOp::Eq | CmpOp::Neq => {
                        if l.kind() != r.kind() {
                            return Err(self
                                .fault(
                                    RuntimeCode::Type,
                                    &expr.id,
                                    format!(
                                        "cannot compare {} with {}",
                                        kind_name(&l),
                                        kind_name(&r)
                                    ),
                                )
                                .into());
                        }
                        let eq = l == r;
                        if *op == CmpOp::Eq {
                            eq
                        } else {
                            !eq
                        }
                    }
                    _ => {
                        let (l, r) = match (&l, &r) {
                            (Value::Number(a), Value::Number(b)) => (*a, *b),
                            _ => {
                                return Err(self
                                    .fault(
                                        RuntimeCode::Type,
                                        &expr.id,
                                        format!(
                                            "ordering requires numbers, got {} and {}",
                                            kind_name(&l),
                                            kind_name(&r)
                                        ),
                                    )
                                    .into())
                            }
                        };
                        match op {
                            CmpOp::Lt => l < r,
                            CmpOp::Le => l <= r,
                            CmpOp::Gt => l > r,
                            CmpOp::Ge => l >= r,
                            CmpOp::Eq | CmpOp::Neq => unreachable!(),
                        }
                    }
                };
                Ok(Value::Bool(b))
            }
            ExprKind::BoolOp { op, operands } => {
                let vals = operands
                    .iter()
                    .map(|e| self.eval_bool(e))
                    .collect::<Result<Vec<_>, _>>()?;
                let b = match op {
                    BoolOpKind::And => vals.iter().all(|&b| b),
                    BoolOpKind::Or => vals.iter().any(|&b| b),
                    BoolOpKind::Not => !vals[0],
                    BoolOpKind::Implies => !vals[0] || vals[1],
                    BoolOpKind::Iff => vals[0] == vals[1],
                    BoolOpKind::Xor => vals[0] != vals[1],
                };
                Ok(Value::Bool(b))
            }
            ExprKind::Old(name) => {
                let frame = match self.frames.last() {
                    Some(f) if f.has_old => f,
                    _ => {
                        return Err(self
                            .fault(
                                RuntimeCode::NoOld,
                                &expr.id,
                                "`old` evaluated outside a call's post-state".into(),
                            )
                            .into())
                    }
                };
                match frame.old_snapshot.get(name) {
                    Some(v) => Ok(v.clone()),
                    None => Err(self
                        .fault(
                            RuntimeCode::NoOld,
                            &expr.id,
                            format!("no pre-state snapshot for `{name}`"),
                        )
                        .into()),
                }
            }
            ExprKind::Result => match self.frames.last() {
                Some(f) if f.has_result => Ok(f.result_slot.clone().expect("result set")),
                _ => Err(self
                    .fault(
                        RuntimeCode::NoResult,
                        &expr.id,
                        "`result` evaluated outside a reporter postcondition".into(),
                    )
                    .into()),
            },
            ExprKind::Quantifier {
                kind,
                bound,
                domain,
                body,
            } => {
                let values = self.domain_values(domain, &expr.id)?;
                let frame = self.top_frame();
                let shadowed = frame.locals.remove(bound);
                let mut outcome = matches!(kind, QuantKind::Forall);
                let mut error = None;
                for v in values {
                    self.top_frame().locals.insert(bound.clone(), v);
                    match self.eval_bool(body) {
                        Ok(b) => match kind {
                            QuantKind::Forall if !b => {
                                outcome = false;
                                break;
                            }
                            QuantKind::Exists if b => {
                                outcome = true;
                                break;
                            }
                            _ => {}
                        },
                        Err(e) => {
                            error = Some(e);
                            break;
                        }
                    }
                }
                let frame = self.top_frame();
                frame.locals.remove(bound);
                if let Some(v) = shadowed {
                    frame.locals.insert(bound.clone(), v);
                }
                match error {
                    Some(e) => Err(e),
                    None => Ok(Value::Bool(outcome)),
                }
            }
            ExprKind::Item { index, list } => {
                let idx = self.eval_index(index)?;
                let items = self.eval_list(list)?;
                if idx < 1 || idx as usize > items.len() {
                    return Err(self
                        .fault(
                            RuntimeCode::Index,
                            &expr.id,
                            format!(
                                "index {idx} out of bounds for list of length {}",
                                items.len()
                            ),
                        )
                        .into());
                }
                Ok(items[idx as usize - 1].clone())
            }
            ExprKind::LengthOf(list) => {
                let items = self.eval_list(list)?;
                Ok(Value::Number(items.len() as f64))
            }
            ExprKind::Contains { list, elem } => {
                let items = self.eval_list(list)?;
                let e = self.eval_expr(elem)?;
                Ok(Value::Bool(items.contains(&e)))
            }
            ExprKind::Call { block, args } => {
                let def = self.resolve_block(block, &expr.id)?;
                let argv = args
                    .iter()
                    .map(|a| self.eval_expr(a))
                    .collect::<Result<Vec<_>, _>>()?;
                match self.call_block(def, argv)? {
                    Some(v) => Ok(v),
                    None => Err(self
                        .fault(
                            RuntimeCode::Type,
                            &expr.id,
                            format!("command block `{block}` produces no value"),
                        )
                        .into()),
                }
            }
        }
    }

    fn domain_values(&mut self, domain: &Domain, at: &NodeId) -> Result<Vec<Value>, RacError> {
        match domain {
            Domain::IntRange { lo, hi } => {
                let lo = self.eval_integer(lo)?;
                let hi = self.eval_integer(hi)?;
                // lo > hi is the empty range.
                Ok((lo..=hi).map(|i| Value::Number(i as f64)).collect())
            }
            Domain::Elements(list) => {
                let _ = at;
                self.eval_list(list)
            }
        }
    }

    fn eval_number(&mut self, expr: &Expr) -> Result<f64, RacError> {
        match self.eval_expr(expr)? {
            Value::Number(n) => Ok(n),
            other => Err(self
                .fault(
                    RuntimeCode::Type,
                    &expr.id,
                    format!("expected a number, got {}", kind_name(&other)),
                )
                .into()),
        }
    }

    fn eval_integer(&mut self, expr: &Expr) -> Result<i64, RacError> {
        let v = self.eval_expr(expr)?;
        match v.as_integer() {
            Some(i) => Ok(i),
            None => Err(self
                .fault(
                    RuntimeCode::Type,
                    &expr.id,
                    format!("expected an integer, got {v}"),
                )
                .into()),
        }
    }

    fn eval_index(&mut self, expr: &Expr) -> Result<i64, RacError> {
        self.eval_integer(expr)
    }

    fn eval_bool(&mut self, expr: &Expr) -> Result<bool, RacError> {
        match self.eval_expr(expr)? {
            Value::Bool(b) => Ok(b),
            other => Err(self
                .fault(
                    RuntimeCode::Type,
                    &expr.id,
                    format!("expected a boolean, got {}", kind_name(&other)),
                )
                .into()),
        }
    }

    fn eval_list(&mut self, expr: &Expr) -> Result<Vec<Value>, RacError> {
        match self.eval_expr(expr)? {
            Value::List(items) => Ok(items),
            other => Err(self
                .fault(
                    RuntimeCode::Type,
                    &expr.id,
                    format!("expected a list, got {}", kind_name(&other)),
                )
                .into()),
        }
    }
}

fn kind_name(v: &Value) -> &'static str {
    match v.kind() {
        ValueKind::Number => "a number",
        ValueKind::Bool => "a boolean",
        ValueKind::Text => "a text",
        ValueKind::List => "a list",
    }
}

fn collect_old_names(expr: &Expr, out: &mut std::collections::BTreeSet<Ident>) {
    match &expr.kind {
        ExprKind::Old(name) => {
            out.insert(name.clone());
        }
        ExprKind::Literal(_) | ExprKind::VarRef(_) | ExprKind::Result => {}
        ExprKind::Arith { left, right, .. } | ExprKind::Compare { left, right, .. } => {
            collect_old_names(left, out);
            collect_old_names(right, out);
        }
        ExprKind::BoolOp { operands, .. } => {
            for e in operands {
                collect_old_names(e, out);
            }
        }
        ExprKind::Quantifier { domain, body, .. } => {
            match domain {
                Domain::IntRange { lo, hi } => {
                    collect_old_names(lo, out);
                    collect_old_names(hi, out);
                }
                Domain::Elements(list) => collect_old_names(list, out),
            }
            collect_old_names(body, out);
        }
        ExprKind::Item { index, list } => {
            collect_old_names(index, out);
            collect_old_names(list, out);
        }
        ExprKind::LengthOf(list) => collect_old_names(list, out),
        ExprKind::Contains { list, elem } => {
            collect_old_names(list, out);
            collect_old_names(elem, out);
        }
        ExprKind::Call { args, .. } => {
            for e in args {
                collect_old_names(e, out);
            }
        }
    }
}
