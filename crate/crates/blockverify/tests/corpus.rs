//! End-to-end checks of the lesson corpus: expectations, fixture freshness,
//! and language/diagnostic coverage.

use std::collections::BTreeSet;
use std::path::PathBuf;

use blockverify::ast::*;
use blockverify::boogie;
use blockverify::corpus::{self, Trigger};
use blockverify::io::{parse_program, IoError};
use blockverify::rac::{Interpreter, Outcome};
use blockverify::types::infer_types;

fn lessons_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../lessons")
}

#[test]
fn corpus_check_passes_every_lesson() {
    let results = corpus::corpus_check(&lessons_dir());
    assert!(!results.is_empty());
    for (name, ok) in &results {
        println!("{name}: {}", if *ok { "pass" } else { "fail" });
    }
    let failures: Vec<_> = results.iter().filter(|(_, ok)| !ok).collect();
    assert!(failures.is_empty(), "failing lessons: {failures:?}");
}

#[test]
fn exercises_file_is_current() {
    let mut expected = String::from("# Exercises\n");
    for lesson in corpus::lessons() {
        expected.push_str(&format!("\n## {}\n\n{}\n", lesson.name, lesson.narrative));
    }
    let on_disk = std::fs::read_to_string(lessons_dir().join("exercises.md")).unwrap();
    assert_eq!(on_disk, expected);
}

#[test]
fn no_stray_lesson_files() {
    let known: BTreeSet<String> = corpus::lessons()
        .iter()
        .map(|l| format!("{}.blocks.json", l.name))
        .collect();
    for entry in std::fs::read_dir(lessons_dir()).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        if name.ends_with(".blocks.json") {
            assert!(known.contains(&name), "stray lesson file {name}");
        }
    }
}

// ---------------------------------------------------------------------------
// Coverage assertions

fn expr_kinds(e: &Expr, out: &mut BTreeSet<&'static str>) {
    match &e.kind {
        ExprKind::Literal(_) => {
            out.insert("literal");
        }
        ExprKind::VarRef(_) => {
            out.insert("var");
        }
        ExprKind::Arith { left, right, .. } => {
            out.insert("arith");
            expr_kinds(left, out);
            expr_kinds(right, out);
        }
        ExprKind::Compare { left, right, .. } => {
            out.insert("compare");
            expr_kinds(left, out);
            expr_kinds(right, out);
        }
        ExprKind::BoolOp { operands, .. } => {
            out.insert("boolop");
            for o in operands {
                expr_kinds(o, out);
            }
        }
        ExprKind::Old(_) => {
            out.insert("old");
        }
        ExprKind::Result => {
            out.insert("result");
        }
        ExprKind::Quantifier { domain, body, .. } => {
            out.insert("quantifier");
            match domain {
                Domain::IntRange { lo, hi } => {
                    out.insert("intRange");
                    expr_kinds(lo, out);
                    expr_kinds(hi, out);
                }
                Domain::Elements(list) => {
                    out.insert("elements");
                    expr_kinds(list, out);
                }
            }
            expr_kinds(body, out);
        }
        ExprKind::Item { index, list } => {
            out.insert("item");
            expr_kinds(index, out);
            expr_kinds(list, out);
        }
        ExprKind::LengthOf(list) => {
            out.insert("lengthOf");
            expr_kinds(list, out);
        }
        ExprKind::Contains { list, elem } => {
            out.insert("contains");
            expr_kinds(list, out);
            expr_kinds(elem, out);
        }
        ExprKind::Call { args, .. } => {
            out.insert("call");
            for a in args {
                expr_kinds(a, out);
            }
        }
    }
}

fn stmt_kinds(
    stmts: &[Stmt],
    kinds: &mut BTreeSet<&'static str>,
    exprs: &mut BTreeSet<&'static str>,
) {
    for s in stmts {
        match &s.kind {
            StmtKind::DeclareLocals(_) => {
                kinds.insert("declareLocals");
            }
            StmtKind::SetVar { value, .. } => {
                kinds.insert("set");
                expr_kinds(value, exprs);
            }
            StmtKind::ChangeVar { delta, .. } => {
                kinds.insert("change");
                expr_kinds(delta, exprs);
            }
            StmtKind::IfElse {
                cond,
                then_branch,
                else_branch,
            } => {
                kinds.insert("ifElse");
                expr_kinds(cond, exprs);
                stmt_kinds(then_branch, kinds, exprs);
                stmt_kinds(else_branch, kinds, exprs);
            }
            StmtKind::RepeatN {
                count,
                invariant,
                body,
            } => {
                kinds.insert("repeatN");
                expr_kinds(count, exprs);
                for e in invariant {
                    expr_kinds(e, exprs);
                }
                stmt_kinds(body, kinds, exprs);
            }
            StmtKind::RepeatUntil {
                cond,
                invariant,
                body,
            } => {
                kinds.insert("repeatUntil");
                expr_kinds(cond, exprs);
                for e in invariant {
                    expr_kinds(e, exprs);
                }
                stmt_kinds(body, kinds, exprs);
            }
            StmtKind::Assert(cond) => {
                kinds.insert("assert");
                expr_kinds(cond, exprs);
            }
            StmtKind::Report(value) => {
                kinds.insert("report");
                expr_kinds(value, exprs);
            }
            StmtKind::CallCommand { args, .. } => {
                kinds.insert("callCommand");
                for a in args {
                    expr_kinds(a, exprs);
                }
            }
            StmtKind::AddToList { elem, .. } => {
                kinds.insert("addToList");
                expr_kinds(elem, exprs);
            }
            StmtKind::ReplaceItem { index, elem, .. } => {
                kinds.insert("replaceItem");
                expr_kinds(index, exprs);
                expr_kinds(elem, exprs);
            }
        }
    }
}

#[test]
fn corpus_covers_every_node_kind() {
    let mut exprs = BTreeSet::new();
    let mut stmts = BTreeSet::new();
    for lesson in corpus::lessons() {
        for blk in &lesson.program.blocks {
            for e in blk.pre.iter().chain(&blk.post) {
                expr_kinds(e, &mut exprs);
            }
            stmt_kinds(&blk.body, &mut stmts, &mut exprs);
        }
        for (_, body) in &lesson.program.entry_scripts {
            stmt_kinds(body, &mut stmts, &mut exprs);
        }
    }
    for kind in [
        "literal",
        "var",
        "arith",
        "compare",
        "boolop",
        "old",
        "result",
        "quantifier",
        "intRange",
        "elements",
        "item",
        "lengthOf",
        "contains",
        "call",
    ] {
        assert!(
            exprs.contains(kind),
            "no lesson uses expression kind {kind}"
        );
    }
    for kind in [
        "declareLocals",
        "set",
        "change",
        "ifElse",
        "repeatN",
        "repeatUntil",
        "assert",
        "report",
        "callCommand",
        "addToList",
        "replaceItem",
    ] {
        assert!(stmts.contains(kind), "no lesson uses statement kind {kind}");
    }
}

#[test]
fn corpus_covers_every_violation_kind() {
    let mut seen = BTreeSet::new();
    for lesson in corpus::lessons() {
        for case in &lesson.expected_rac {
            if let corpus::RacExpect::Violates(kind) = &case.expect {
                seen.insert(kind.as_str());
            }
        }
    }
    for kind in [
        "precondition",
        "postcondition",
        "assertion",
        "invariant (loop entry)",
        "invariant (after iteration)",
    ] {
        assert!(seen.contains(kind), "no lesson triggers {kind}");
    }
}

#[test]
fn error_cases_cover_every_diagnostic_code() {
    let mut covered = BTreeSet::new();
    for case in corpus::error_cases() {
        let fired = match case.trigger {
            Trigger::Parse(text) => match parse_program(text) {
                Err(IoError::Schema { .. }) => case.code == "E_SCHEMA",
                _ => false,
            },
            Trigger::Validate(program) => validate(&program).iter().any(|d| d.code == case.code),
            Trigger::Typecheck(program) => match infer_types(&program) {
                Err(diags) => diags.iter().any(|d| d.code == case.code),
                Ok(typed) => typed.warnings.iter().any(|d| d.code == case.code),
            },
            Trigger::Run {
                program,
                entry,
                args,
                depth_limit,
            } => {
                let mut interp = Interpreter::new(&program).with_depth_limit(depth_limit);
                match interp.run_entry(entry, &args).outcome {
                    Outcome::Fault(f) => f.code.as_str() == case.code,
                    _ => false,
                }
            }
            Trigger::Compile(program) => {
                let typed = infer_types(&program).expect("compile case typechecks");
                boogie::compile(&typed).is_err() && case.code == "E_UNSUPPORTED_CONSTRUCT"
            }
        };
        assert!(fired, "case for {} did not raise its code", case.code);
        covered.insert(case.code);
    }

    // Verdict-mapper codes come from output fixtures rather than programs.
    let garbage = boogie::parse_boogie_output("zzz", &boogie::SourceMap::default()).unwrap();
    assert_eq!(garbage.diagnostics[0].code, "E_BOOGIE_OUTPUT");
    covered.insert("E_BOOGIE_OUTPUT");
    let unmapped = boogie::parse_boogie_output(
        "f.bpl(1,1): Error: x\nBoogie program verifier finished with 0 verified, 1 error\n",
        &boogie::SourceMap::default(),
    );
    assert!(unmapped.is_err());
    covered.insert("E_UNMAPPED_LOCATION");

    for code in [
        "E_SCHEMA",
        "E_DUPLICATE_BLOCK",
        "E_RESERVED_NAME",
        "E_DUPLICATE_PARAM",
        "E_SHADOWS_GLOBAL",
        "E_SHADOWS_PARAM",
        "E_RESULT_IN_COMMAND",
        "E_RESULT_OUTSIDE_POST",
        "E_OLD_OUTSIDE_POST",
        "E_UNDEFINED_BLOCK",
        "E_CALL_ARITY",
        "E_CALL_KIND",
        "E_ASSIGN_PARAM",
        "E_REPORT_OUTSIDE_REPORTER",
        "E_TYPE",
        "E_INDEX",
        "E_DIV_ZERO",
        "E_UNBOUND",
        "E_NONBOOL_SPEC",
        "E_NO_REPORT",
        "E_STACK_OVERFLOW",
        "E_ENTRY_NOT_FOUND",
        "E_ARITY",
        "E_DYNAMIC_TYPING",
        "E_NESTED_LIST",
        "E_TEXT_UNSUPPORTED",
        "E_NONINT_LITERAL",
        "E_UNTYPEABLE",
        "W_DIV_SEMANTICS",
        "E_UNSUPPORTED_CONSTRUCT",
        "E_BOOGIE_OUTPUT",
        "E_UNMAPPED_LOCATION",
    ] {
        assert!(covered.contains(code), "no coverage case for {code}");
    }
}
