//! Lesson corpus: curated example programs covering the whole language,
//! doubling as the end-to-end test fixture set.
//!
//! Each lesson pairs a program with frozen expectations for both pipelines.
//! The on-disk `lessons/` files are generated from these constructors (see
//! the `gen_corpus` example), so fixtures can never go stale.

use crate::ast::*;
use crate::boogie::ObligationKind;
use crate::build as b;
use crate::rac::{RuntimeCode, ViolationKind};

#[derive(Clone, Debug, PartialEq)]
pub enum RacExpect {
    /// Run passes; for reporters/predicates, with this result.
    Passes(Option<Value>),
    Violates(ViolationKind),
    Faults(RuntimeCode),
}

#[derive(Clone, Debug)]
pub struct RacCase {
    pub entry: &'static str,
    pub args: Vec<Value>,
    pub expect: RacExpect,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StaticExpectation {
    /// Typechecks, compiles, and is in the Boogie-verified subset.
    Verified,
    /// Typechecks and compiles; Boogie reports at least one error mapped to
    /// this block and obligation kind.
    FailsVerification {
        kind: ObligationKind,
        block_id: NodeId,
    },
    /// The static frontend rejects it with this code (still runs under RAC).
    Rejected(&'static str),
}

pub struct Lesson {
    pub name: &'static str,
    pub narrative: &'static str,
    pub program: Program,
    pub expected_rac: Vec<RacCase>,
    pub expected_static: StaticExpectation,
    /// Magnitude bound for randomly generated integer inputs; keeps
    /// exponential lessons (fib) tractable.
    pub max_int: i64,
}

fn n(v: i64) -> Value {
    Value::Number(v as f64)
}

fn list(items: &[i64]) -> Value {
    Value::List(items.iter().map(|&i| n(i)).collect())
}

pub fn lessons() -> Vec<Lesson> {
    vec![
        increment(),
        sum_list(),
        max_of_list(),
        abs_value(),
        counter(),
        count_up(),
        halve(),
        has_zero(),
        toggle(),
        list_ops(),
        fib(),
        dynamic_typing(),
        bug_pre(),
        bug_post(),
        bug_assert(),
        bug_inv_entry(),
        bug_inv_iter(),
    ]
}

fn increment() -> Lesson {
    let mut blk = b::block("increment", BlockKind::Reporter, vec![b::param("x")]);
    blk.pre = vec![b::ge(b::var("x"), b::num(0))];
    blk.post = vec![b::eq(b::result(), b::add(b::old("x"), b::num(1)))];
    blk.body = vec![b::report(b::add(b::var("x"), b::num(1)))];
    let program = b::finish(Program {
        blocks: vec![blk],
        ..Program::default()
    });
    Lesson {
        name: "increment",
        narrative: "The starter lesson: one reporter with one precondition \
                    slot and one postcondition slot. Run it with a negative \
                    argument to see the caller blamed; change the body to \
                    x+2 to see the block blamed instead.",
        program,
        expected_rac: vec![
            RacCase {
                entry: "increment",
                args: vec![n(3)],
                expect: RacExpect::Passes(Some(n(4))),
            },
            RacCase {
                entry: "increment",
                args: vec![n(-1)],
                expect: RacExpect::Violates(ViolationKind::Precondition),
            },
        ],
        expected_static: StaticExpectation::Verified,
        max_int: 1_000_000,
    }
}

fn sum_list() -> Lesson {
    let all_nonneg = |listvar: &str| {
        b::forall(
            "e",
            b::elements(b::var(listvar)),
            b::ge(b::var("e"), b::num(0)),
        )
    };
    let mut blk = b::block("sumList", BlockKind::Reporter, vec![b::param("xs")]);
    blk.post = vec![b::implies(all_nonneg("xs"), b::ge(b::result(), b::num(0)))];
    blk.body = vec![
        b::declare_locals(&["s", "i"]),
        b::set("s", b::num(0)),
        b::set("i", b::num(0)),
        b::repeat_until(
            b::ge(b::var("i"), b::length_of(b::var("xs"))),
            vec![
                b::and(vec![
                    b::ge(b::var("i"), b::num(0)),
                    b::le(b::var("i"), b::length_of(b::var("xs"))),
                ]),
                b::implies(all_nonneg("xs"), b::ge(b::var("s"), b::num(0))),
            ],
            vec![
                b::change("i", b::num(1)),
                b::change("s", b::item(b::var("i"), b::var("xs"))),
            ],
        ),
        b::report(b::var("s")),
    ];
    let program = b::finish(Program {
        blocks: vec![blk],
        ..Program::default()
    });
    Lesson {
        name: "sum_list",
        narrative: "A loop over a list with a two-slot invariant: one slot \
                    keeps the index in bounds (which also discharges the \
                    item access), the other carries the sign of the running \
                    sum through to the quantified postcondition.",
        program,
        expected_rac: vec![
            RacCase {
                entry: "sumList",
                args: vec![list(&[1, 2, 3])],
                expect: RacExpect::Passes(Some(n(6))),
            },
            RacCase {
                entry: "sumList",
                args: vec![list(&[])],
                expect: RacExpect::Passes(Some(n(0))),
            },
            RacCase {
                entry: "sumList",
                args: vec![list(&[-1, 5])],
                expect: RacExpect::Passes(Some(n(4))),
            },
        ],
        expected_static: StaticExpectation::Verified,
        max_int: 100,
    }
}

fn max_of_list() -> Lesson {
    let mut blk = b::block("maxOfList", BlockKind::Reporter, vec![b::param("xs")]);
    blk.pre = vec![b::ge(b::length_of(b::var("xs")), b::num(1))];
    blk.post = vec![
        b::forall(
            "e",
            b::elements(b::var("xs")),
            b::ge(b::result(), b::var("e")),
        ),
        b::contains(b::var("xs"), b::result()),
    ];
    blk.body = vec![
        b::declare_locals(&["m", "i"]),
        b::set("m", b::item(b::num(1), b::var("xs"))),
        b::set("i", b::num(1)),
        b::repeat_until(
            b::ge(b::var("i"), b::length_of(b::var("xs"))),
            vec![
                b::and(vec![
                    b::ge(b::var("i"), b::num(1)),
                    b::le(b::var("i"), b::length_of(b::var("xs"))),
                ]),
                b::forall(
                    "k",
                    b::int_range(b::num(1), b::var("i")),
                    b::ge(b::var("m"), b::item(b::var("k"), b::var("xs"))),
                ),
                b::contains(b::var("xs"), b::var("m")),
            ],
            vec![
                b::change("i", b::num(1)),
                b::if_else(
                    b::gt(b::item(b::var("i"), b::var("xs")), b::var("m")),
                    vec![b::set("m", b::item(b::var("i"), b::var("xs")))],
                    vec![],
                ),
            ],
        ),
        b::report(b::var("m")),
    ];
    let program = b::finish(Program {
        blocks: vec![blk],
        ..Program::default()
    });
    Lesson {
        name: "max_of_list",
        narrative: "The classic maximum: the postcondition says the result \
                    dominates every element and is itself an element, and \
                    the loop invariant states both facts for the prefix \
                    scanned so far.",
        program,
        expected_rac: vec![
            RacCase {
                entry: "maxOfList",
                args: vec![list(&[3, 1, 4, 1, 5])],
                expect: RacExpect::Passes(Some(n(5))),
            },
            RacCase {
                entry: "maxOfList",
                args: vec![list(&[])],
                expect: RacExpect::Violates(ViolationKind::Precondition),
            },
        ],
        expected_static: StaticExpectation::Verified,
        max_int: 100,
    }
}

fn abs_value() -> Lesson {
    let mut blk = b::block("absValue", BlockKind::Reporter, vec![b::param("x")]);
    blk.post = vec![
        b::ge(b::result(), b::num(0)),
        b::or(vec![
            b::eq(b::result(), b::var("x")),
            b::eq(b::result(), b::sub(b::num(0), b::var("x"))),
        ]),
    ];
    blk.body = vec![b::if_else(
        b::lt(b::var("x"), b::num(0)),
        vec![b::report(b::sub(b::num(0), b::var("x")))],
        vec![b::report(b::var("x"))],
    )];
    let program = b::finish(Program {
        blocks: vec![blk],
        ..Program::default()
    });
    Lesson {
        name: "abs_value",
        narrative: "Branching with two postcondition slots: each branch \
                    reports, and the disjunctive second slot is what makes \
                    the contract tight enough to be useful.",
        program,
        expected_rac: vec![
            RacCase {
                entry: "absValue",
                args: vec![n(5)],
                expect: RacExpect::Passes(Some(n(5))),
            },
            RacCase {
                entry: "absValue",
                args: vec![n(-7)],
                expect: RacExpect::Passes(Some(n(7))),
            },
            RacCase {
                entry: "absValue",
                args: vec![n(0)],
                expect: RacExpect::Passes(Some(n(0))),
            },
        ],
        expected_static: StaticExpectation::Verified,
        max_int: 1_000_000,
    }
}

fn counter() -> Lesson {
    let mut blk = b::block("tick", BlockKind::Command, vec![]);
    blk.post = vec![b::eq(b::var("count"), b::add(b::old("count"), b::num(1)))];
    blk.body = vec![b::change("count", b::num(1))];
    let program = b::finish(Program {
        globals: vec![("count".into(), n(0))],
        blocks: vec![blk],
        entry_scripts: vec![(
            "main".into(),
            vec![
                b::call_command("tick", vec![]),
                b::call_command("tick", vec![]),
            ],
        )],
    });
    Lesson {
        name: "counter",
        narrative: "A command block over a global variable. old(count) in \
                    the postcondition refers to the value at block entry, \
                    so each call is obliged to add exactly one.",
        program,
        expected_rac: vec![
            RacCase {
                entry: "main",
                args: vec![],
                expect: RacExpect::Passes(None),
            },
            RacCase {
                entry: "tick",
                args: vec![],
                expect: RacExpect::Passes(None),
            },
        ],
        expected_static: StaticExpectation::Verified,
        max_int: 1_000_000,
    }
}

fn count_up() -> Lesson {
    let mut blk = b::block("countTo", BlockKind::Reporter, vec![b::param("n")]);
    blk.pre = vec![b::ge(b::var("n"), b::num(0))];
    blk.post = vec![b::ge(b::result(), b::num(0))];
    blk.body = vec![
        b::declare_locals(&["i"]),
        b::set("i", b::num(0)),
        b::repeat_n(
            b::var("n"),
            vec![b::ge(b::var("i"), b::num(0))],
            vec![b::change("i", b::num(1))],
        ),
        b::assert_stmt(b::ge(b::var("i"), b::num(0))),
        b::report(b::var("i")),
    ];
    let program = b::finish(Program {
        blocks: vec![blk],
        ..Program::default()
    });
    Lesson {
        name: "count_up",
        narrative: "A counted repeat loop with an invariant slot plus a \
                    standalone assert. The invariant is checked once before \
                    the first iteration and once after every iteration.",
        program,
        expected_rac: vec![
            RacCase {
                entry: "countTo",
                args: vec![n(4)],
                expect: RacExpect::Passes(Some(n(4))),
            },
            RacCase {
                entry: "countTo",
                args: vec![n(0)],
                expect: RacExpect::Passes(Some(n(0))),
            },
        ],
        expected_static: StaticExpectation::Verified,
        max_int: 1000,
    }
}

fn halve() -> Lesson {
    let mut blk = b::block("halve", BlockKind::Reporter, vec![b::param("x")]);
    blk.pre = vec![
        b::ge(b::var("x"), b::num(0)),
        b::eq(b::modulo(b::var("x"), b::num(2)), b::num(0)),
    ];
    blk.post = vec![b::eq(b::mul(b::result(), b::num(2)), b::var("x"))];
    blk.body = vec![b::report(b::div(b::var("x"), b::num(2)))];
    let program = b::finish(Program {
        blocks: vec![blk],
        ..Program::default()
    });
    Lesson {
        name: "halve",
        narrative: "Division with an evenness precondition. The static \
                    checker warns that division is integer division under \
                    verification but real division at runtime; the contract \
                    only holds on the inputs where the two agree.",
        program,
        expected_rac: vec![
            RacCase {
                entry: "halve",
                args: vec![n(10)],
                expect: RacExpect::Passes(Some(n(5))),
            },
            RacCase {
                entry: "halve",
                args: vec![n(7)],
                expect: RacExpect::Violates(ViolationKind::Precondition),
            },
        ],
        expected_static: StaticExpectation::Verified,
        max_int: 1_000_000,
    }
}

fn has_zero() -> Lesson {
    let mut blk = b::block("hasZero", BlockKind::Predicate, vec![b::param("xs")]);
    blk.post = vec![
        b::iff(
            b::result(),
            b::exists(
                "e",
                b::elements(b::var("xs")),
                b::eq(b::var("e"), b::num(0)),
            ),
        ),
        b::iff(
            b::not(b::result()),
            b::forall(
                "e",
                b::elements(b::var("xs")),
                b::neq(b::var("e"), b::num(0)),
            ),
        ),
    ];
    blk.body = vec![b::report(b::contains(b::var("xs"), b::num(0)))];
    let program = b::finish(Program {
        blocks: vec![blk],
        ..Program::default()
    });
    Lesson {
        name: "has_zero",
        narrative: "A predicate block whose postcondition pins down the \
                    answer in both directions: an existential for true and \
                    its dual universal for false.",
        program,
        expected_rac: vec![
            RacCase {
                entry: "hasZero",
                args: vec![list(&[1, 0, 2])],
                expect: RacExpect::Passes(Some(Value::Bool(true))),
            },
            RacCase {
                entry: "hasZero",
                args: vec![list(&[1, 2])],
                expect: RacExpect::Passes(Some(Value::Bool(false))),
            },
        ],
        expected_static: StaticExpectation::Verified,
        max_int: 100,
    }
}

fn toggle() -> Lesson {
    let mut blk = b::block("toggle", BlockKind::Command, vec![]);
    blk.post = vec![b::xor(b::var("flag"), b::old("flag"))];
    blk.body = vec![b::set("flag", b::not(b::var("flag")))];
    let program = b::finish(Program {
        globals: vec![("flag".into(), Value::Bool(false))],
        blocks: vec![blk],
        ..Program::default()
    });
    Lesson {
        name: "toggle",
        narrative: "A boolean global flipped by a command block; the \
                    exclusive-or postcondition states the flag always \
                    changes, whichever way it was pointing.",
        program,
        expected_rac: vec![RacCase {
            entry: "toggle",
            args: vec![],
            expect: RacExpect::Passes(None),
        }],
        expected_static: StaticExpectation::Verified,
        max_int: 100,
    }
}

fn list_ops() -> Lesson {
    let mut push = b::block("pushItem", BlockKind::Command, vec![b::param("x")]);
    push.post = vec![b::eq(
        b::length_of(b::var("data")),
        b::add(b::length_of(b::old("data")), b::num(1)),
    )];
    push.body = vec![b::add_to_list(b::var("x"), "data")];

    let mut zero = b::block("zeroFirst", BlockKind::Command, vec![]);
    zero.pre = vec![b::ge(b::length_of(b::var("data")), b::num(1))];
    zero.post = vec![
        b::eq(b::item(b::num(1), b::var("data")), b::num(0)),
        b::eq(b::length_of(b::var("data")), b::length_of(b::old("data"))),
    ];
    zero.body = vec![b::replace_item(b::num(1), "data", b::num(0))];

    let program = b::finish(Program {
        globals: vec![("data".into(), list(&[3, 4, 5]))],
        blocks: vec![push, zero],
        ..Program::default()
    });
    Lesson {
        name: "list_ops",
        narrative: "Two commands mutating a global list: appending grows \
                    the length by one, replacing keeps it fixed. old(data) \
                    in the postconditions snapshots the whole list.",
        program,
        expected_rac: vec![
            RacCase {
                entry: "pushItem",
                args: vec![n(9)],
                expect: RacExpect::Passes(None),
            },
            RacCase {
                entry: "zeroFirst",
                args: vec![],
                expect: RacExpect::Passes(None),
            },
        ],
        expected_static: StaticExpectation::Verified,
        max_int: 100,
    }
}

fn fib() -> Lesson {
    let mut blk = b::block(
        "fib",
        BlockKind::Reporter,
        vec![b::typed_param("n", DeclaredType::Int)],
    );
    blk.pre = vec![b::ge(b::var("n"), b::num(0))];
    blk.post = vec![b::ge(b::result(), b::num(0))];
    blk.body = vec![b::if_else(
        b::lt(b::var("n"), b::num(2)),
        vec![b::report(b::var("n"))],
        vec![b::report(b::add(
            b::call("fib", vec![b::sub(b::var("n"), b::num(1))]),
            b::call("fib", vec![b::sub(b::var("n"), b::num(2))]),
        ))],
    )];
    let program = b::finish(Program {
        blocks: vec![blk],
        ..Program::default()
    });
    Lesson {
        name: "fib",
        narrative: "A recursive reporter. Every recursive call checks the \
                    full contract again, so one top-level run exercises the \
                    precondition at every depth.",
        program,
        expected_rac: vec![
            RacCase {
                entry: "fib",
                args: vec![n(6)],
                expect: RacExpect::Passes(Some(n(8))),
            },
            RacCase {
                entry: "fib",
                args: vec![n(0)],
                expect: RacExpect::Passes(Some(n(0))),
            },
        ],
        expected_static: StaticExpectation::Verified,
        max_int: 15,
    }
}

fn dynamic_typing() -> Lesson {
    let mut blk = b::block("flexible", BlockKind::Reporter, vec![]);
    blk.body = vec![
        b::declare_locals(&["t"]),
        b::set("t", b::num(1)),
        b::set("t", b::bool_lit(true)),
        b::if_else(
            b::var("t"),
            vec![b::report(b::num(1))],
            vec![b::report(b::num(2))],
        ),
    ];
    let program = b::finish(Program {
        blocks: vec![blk],
        ..Program::default()
    });
    Lesson {
        name: "dynamic_typing",
        narrative: "Runs fine dynamically: the local holds a number, then a \
                    boolean. The static fragment forbids exactly this, so \
                    the same program is rejected before compilation.",
        program,
        expected_rac: vec![RacCase {
            entry: "flexible",
            args: vec![],
            expect: RacExpect::Passes(Some(n(1))),
        }],
        expected_static: StaticExpectation::Rejected("E_DYNAMIC_TYPING"),
        max_int: 100,
    }
}

fn bug_pre() -> Lesson {
    let mut inc = b::block("increment", BlockKind::Reporter, vec![b::param("x")]);
    inc.pre = vec![b::ge(b::var("x"), b::num(0))];
    inc.post = vec![b::eq(b::result(), b::add(b::old("x"), b::num(1)))];
    inc.body = vec![b::report(b::add(b::var("x"), b::num(1)))];
    let program = b::finish(Program {
        globals: vec![("g".into(), n(0))],
        blocks: vec![inc],
        entry_scripts: vec![(
            "main".into(),
            vec![b::set("g", b::call("increment", vec![b::num(-1)]))],
        )],
    });
    // The call expression inside the script's set statement.
    let call_id = match &program.entry_scripts[0].1[0].kind {
        StmtKind::SetVar { value, .. } => value.id.clone(),
        _ => unreachable!(),
    };
    Lesson {
        name: "bug_pre",
        narrative: "Seeded bug: the script calls increment with a negative \
                    argument. The caller is blamed, at the call site, by \
                    both pipelines.",
        program,
        expected_rac: vec![RacCase {
            entry: "main",
            args: vec![],
            expect: RacExpect::Violates(ViolationKind::Precondition),
        }],
        expected_static: StaticExpectation::FailsVerification {
            kind: ObligationKind::CallPre,
            block_id: call_id,
        },
        max_int: 100,
    }
}

fn bug_post() -> Lesson {
    let mut blk = b::block("increment", BlockKind::Reporter, vec![b::param("x")]);
    blk.pre = vec![b::ge(b::var("x"), b::num(0))];
    blk.post = vec![b::eq(b::result(), b::add(b::old("x"), b::num(1)))];
    blk.body = vec![b::report(b::add(b::var("x"), b::num(2)))];
    let program = b::finish(Program {
        blocks: vec![blk],
        ..Program::default()
    });
    let hat = program.blocks[0].block_id.clone();
    Lesson {
        name: "bug_post",
        narrative: "Seeded bug: the body adds two, the contract promises \
                    one. The block is blamed at its postcondition slot by \
                    both pipelines.",
        program,
        expected_rac: vec![RacCase {
            entry: "increment",
            args: vec![n(3)],
            expect: RacExpect::Violates(ViolationKind::Postcondition),
        }],
        expected_static: StaticExpectation::FailsVerification {
            kind: ObligationKind::Post,
            block_id: hat,
        },
        max_int: 100,
    }
}

fn bug_assert() -> Lesson {
    let mut blk = b::block("checkPositive", BlockKind::Command, vec![b::param("x")]);
    blk.body = vec![b::assert_stmt(b::gt(b::var("x"), b::num(0)))];
    let program = b::finish(Program {
        blocks: vec![blk],
        ..Program::default()
    });
    let assert_id = program.blocks[0].body[0].id.clone();
    Lesson {
        name: "bug_assert",
        narrative: "Seeded bug: an assert with no precondition backing it \
                    up. Dynamically it fails for non-positive arguments; \
                    statically it fails for all of them at once.",
        program,
        expected_rac: vec![
            RacCase {
                entry: "checkPositive",
                args: vec![n(-1)],
                expect: RacExpect::Violates(ViolationKind::Assertion),
            },
            RacCase {
                entry: "checkPositive",
                args: vec![n(2)],
                expect: RacExpect::Passes(None),
            },
        ],
        expected_static: StaticExpectation::FailsVerification {
            kind: ObligationKind::Assert,
            block_id: assert_id,
        },
        max_int: 100,
    }
}

fn bug_inv_entry() -> Lesson {
    let mut blk = b::block("badEntry", BlockKind::Command, vec![]);
    blk.body = vec![
        b::declare_locals(&["i"]),
        b::set("i", b::num(1)),
        b::repeat_n(
            b::num(3),
            vec![b::eq(b::var("i"), b::num(0))],
            vec![b::change("i", b::num(1))],
        ),
    ];
    let program = b::finish(Program {
        blocks: vec![blk],
        ..Program::default()
    });
    let loop_id = program.blocks[0].body[2].id.clone();
    Lesson {
        name: "bug_inv_entry",
        narrative: "Seeded bug: the invariant is already false before the \
                    first iteration, so the loop entry check fires.",
        program,
        expected_rac: vec![RacCase {
            entry: "badEntry",
            args: vec![],
            expect: RacExpect::Violates(ViolationKind::InvariantEntry),
        }],
        expected_static: StaticExpectation::FailsVerification {
            kind: ObligationKind::InvariantEntry,
            block_id: loop_id,
        },
        max_int: 100,
    }
}

/// Runs every lesson against its frozen expectations: RAC outcomes for all
/// listed argument sets, static accept/reject, and freshness of the on-disk
/// fixtures under `lessons_dir`. A mismatch is a fail entry, never a panic.
pub fn corpus_check(lessons_dir: &std::path::Path) -> Vec<(String, bool)> {
    use crate::boogie;
    use crate::io::{parse_program, serialize_program};
    use crate::rac::{Interpreter, Outcome};
    use crate::types::infer_types;

    lessons()
        .into_iter()
        .map(|lesson| {
            let mut ok = true;

            for case in &lesson.expected_rac {
                let mut interp = Interpreter::new(&lesson.program);
                let report = interp.run_entry(case.entry, &case.args);
                let matched = match (&case.expect, &report.outcome) {
                    (RacExpect::Passes(want), Outcome::Passed) => &report.result == want,
                    (RacExpect::Violates(kind), Outcome::Violated(v)) => v.kind == *kind,
                    (RacExpect::Faults(code), Outcome::Fault(f)) => f.code == *code,
                    _ => false,
                };
                ok &= matched;
            }

            match &lesson.expected_static {
                StaticExpectation::Rejected(code) => {
                    ok &= matches!(infer_types(&lesson.program),
                                   Err(diags) if diags.iter().any(|d| d.code == *code));
                }
                _ => match infer_types(&lesson.program) {
                    Err(_) => ok = false,
                    Ok(typed) => match boogie::compile(&typed) {
                        Err(_) => ok = false,
                        Ok(unit) => {
                            let golden = lessons_dir
                                .join("expected")
                                .join(format!("{}.bpl", lesson.name));
                            ok &= std::fs::read_to_string(golden).ok().as_deref()
                                == Some(unit.text.as_str());
                            let map = lessons_dir
                                .join("expected")
                                .join(format!("{}.srcmap.json", lesson.name));
                            ok &= std::fs::read_to_string(map).ok()
                                == Some(unit.source_map.to_json());
                        }
                    },
                },
            }

            let file = lessons_dir.join(format!("{}.blocks.json", lesson.name));
            match std::fs::read_to_string(&file) {
                Err(_) => ok = false,
                Ok(text) => {
                    ok &= serialize_program(&lesson.program).ok() == Some(text.clone());
                    ok &= parse_program(&text).ok().as_ref() == Some(&lesson.program);
                }
            }

            (lesson.name.to_string(), ok)
        })
        .collect()
}

/// How an error-coverage case is driven.
#[derive(Clone, Debug)]
pub enum Trigger {
    /// Feed this document text to the parser.
    Parse(&'static str),
    /// Run well-formedness validation.
    Validate(Program),
    /// Run type inference (errors or, for W_ codes, warnings).
    Typecheck(Program),
    /// Execute this entry with these arguments under the given depth limit.
    Run {
        program: Program,
        entry: &'static str,
        args: Vec<Value>,
        depth_limit: usize,
    },
    /// Typecheck then compile to Boogie.
    Compile(Program),
}

pub struct ErrorCase {
    pub code: &'static str,
    pub trigger: Trigger,
}

fn case(code: &'static str, trigger: Trigger) -> ErrorCase {
    ErrorCase { code, trigger }
}

fn one_block(blk: BlockDef) -> Program {
    b::finish(Program {
        blocks: vec![blk],
        ..Program::default()
    })
}

fn run_case(code: &'static str, blk: BlockDef, entry: &'static str, args: Vec<Value>) -> ErrorCase {
    case(
        code,
        Trigger::Run {
            program: one_block(blk),
            entry,
            args,
            depth_limit: crate::rac::DEFAULT_DEPTH_LIMIT,
        },
    )
}

/// One witness per reachable diagnostic code; the coverage test asserts each
/// fires with exactly its code.
pub fn error_cases() -> Vec<ErrorCase> {
    let mut cases = vec![case("E_SCHEMA", Trigger::Parse(r#"{"formatVersion": 99}"#))];

    // Well-formedness.
    {
        let f1 = b::block("f", BlockKind::Command, vec![]);
        let f2 = b::block("f", BlockKind::Command, vec![]);
        cases.push(case(
            "E_DUPLICATE_BLOCK",
            Trigger::Validate(b::finish(Program {
                blocks: vec![f1, f2],
                ..Program::default()
            })),
        ));
    }
    cases.push(case(
        "E_RESERVED_NAME",
        Trigger::Validate(b::finish(Program {
            globals: vec![("__x".into(), n(0))],
            ..Program::default()
        })),
    ));
    cases.push(case(
        "E_DUPLICATE_PARAM",
        Trigger::Validate(one_block(b::block(
            "f",
            BlockKind::Command,
            vec![b::param("x"), b::param("x")],
        ))),
    ));
    cases.push(case(
        "E_SHADOWS_GLOBAL",
        Trigger::Validate(b::finish(Program {
            globals: vec![("x".into(), n(0))],
            blocks: vec![b::block("f", BlockKind::Command, vec![b::param("x")])],
            ..Program::default()
        })),
    ));
    {
        let mut blk = b::block("f", BlockKind::Command, vec![b::param("x")]);
        blk.body = vec![b::declare_locals(&["x"])];
        cases.push(case("E_SHADOWS_PARAM", Trigger::Validate(one_block(blk))));
    }
    {
        let mut blk = b::block("f", BlockKind::Command, vec![]);
        blk.post = vec![b::eq(b::result(), b::num(0))];
        cases.push(case(
            "E_RESULT_IN_COMMAND",
            Trigger::Validate(one_block(blk)),
        ));
    }
    {
        let mut blk = b::block("f", BlockKind::Reporter, vec![]);
        blk.pre = vec![b::ge(b::result(), b::num(0))];
        blk.body = vec![b::report(b::num(0))];
        cases.push(case(
            "E_RESULT_OUTSIDE_POST",
            Trigger::Validate(one_block(blk)),
        ));
    }
    {
        let mut blk = b::block("f", BlockKind::Reporter, vec![b::param("x")]);
        blk.pre = vec![b::ge(b::old("x"), b::num(0))];
        blk.body = vec![b::report(b::num(0))];
        cases.push(case(
            "E_OLD_OUTSIDE_POST",
            Trigger::Validate(one_block(blk)),
        ));
    }
    {
        let mut blk = b::block("f", BlockKind::Command, vec![]);
        blk.body = vec![b::call_command("missing", vec![])];
        cases.push(case("E_UNDEFINED_BLOCK", Trigger::Validate(one_block(blk))));
    }
    {
        let mut caller = b::block("f", BlockKind::Command, vec![]);
        caller.body = vec![b::call_command("g", vec![b::num(1)])];
        let g = b::block("g", BlockKind::Command, vec![]);
        cases.push(case(
            "E_CALL_ARITY",
            Trigger::Validate(b::finish(Program {
                blocks: vec![caller, g],
                ..Program::default()
            })),
        ));
    }
    {
        let mut caller = b::block("f", BlockKind::Reporter, vec![]);
        caller.body = vec![b::report(b::call("g", vec![]))];
        let g = b::block("g", BlockKind::Command, vec![]);
        cases.push(case(
            "E_CALL_KIND",
            Trigger::Validate(b::finish(Program {
                blocks: vec![caller, g],
                ..Program::default()
            })),
        ));
    }
    {
        let mut blk = b::block("f", BlockKind::Command, vec![b::param("x")]);
        blk.body = vec![b::set("x", b::num(1))];
        cases.push(case("E_ASSIGN_PARAM", Trigger::Validate(one_block(blk))));
    }
    {
        let mut blk = b::block("f", BlockKind::Command, vec![]);
        blk.body = vec![b::report(b::num(0))];
        cases.push(case(
            "E_REPORT_OUTSIDE_REPORTER",
            Trigger::Validate(one_block(blk)),
        ));
    }

    // Runtime faults.
    {
        let mut blk = b::block("f", BlockKind::Reporter, vec![]);
        blk.body = vec![b::report(b::add(b::bool_lit(true), b::num(1)))];
        cases.push(run_case("E_TYPE", blk, "f", vec![]));
    }
    {
        let mut blk = b::block("f", BlockKind::Reporter, vec![b::param("xs")]);
        blk.body = vec![b::report(b::item(b::num(5), b::var("xs")))];
        cases.push(run_case("E_INDEX", blk, "f", vec![list(&[1, 2])]));
    }
    {
        let mut blk = b::block("f", BlockKind::Reporter, vec![]);
        blk.body = vec![b::report(b::div(b::num(1), b::num(0)))];
        cases.push(run_case("E_DIV_ZERO", blk, "f", vec![]));
    }
    {
        let mut blk = b::block("f", BlockKind::Command, vec![]);
        blk.body = vec![b::set("z", b::num(1))];
        cases.push(run_case("E_UNBOUND", blk, "f", vec![]));
    }
    {
        let mut blk = b::block("f", BlockKind::Command, vec![b::param("x")]);
        blk.pre = vec![b::add(b::var("x"), b::num(1))];
        cases.push(run_case("E_NONBOOL_SPEC", blk, "f", vec![n(0)]));
    }
    {
        let blk = b::block("f", BlockKind::Reporter, vec![]);
        cases.push(run_case("E_NO_REPORT", blk, "f", vec![]));
    }
    {
        let mut blk = b::block("spin", BlockKind::Reporter, vec![]);
        blk.body = vec![b::report(b::call("spin", vec![]))];
        cases.push(case(
            "E_STACK_OVERFLOW",
            Trigger::Run {
                program: one_block(blk),
                entry: "spin",
                args: vec![],
                depth_limit: 64,
            },
        ));
    }
    {
        let blk = b::block("f", BlockKind::Command, vec![]);
        cases.push(run_case("E_ENTRY_NOT_FOUND", blk, "nope", vec![]));
    }
    {
        let blk = b::block("f", BlockKind::Command, vec![b::param("x")]);
        cases.push(run_case("E_ARITY", blk, "f", vec![]));
    }

    // Static frontend.
    {
        let mut blk = b::block("f", BlockKind::Reporter, vec![]);
        blk.body = vec![
            b::declare_locals(&["t"]),
            b::set("t", b::num(1)),
            b::set("t", b::bool_lit(true)),
            b::report(b::num(0)),
        ];
        cases.push(case("E_DYNAMIC_TYPING", Trigger::Typecheck(one_block(blk))));
    }
    {
        let mut blk = b::block(
            "f",
            BlockKind::Command,
            vec![b::typed_param("xs", DeclaredType::IntList)],
        );
        blk.body = vec![
            b::declare_locals(&["ys"]),
            b::add_to_list(b::var("xs"), "ys"),
        ];
        cases.push(case("E_NESTED_LIST", Trigger::Typecheck(one_block(blk))));
    }
    {
        let mut blk = b::block("f", BlockKind::Command, vec![]);
        blk.body = vec![b::declare_locals(&["t"]), b::set("t", b::text("hi"))];
        cases.push(case(
            "E_TEXT_UNSUPPORTED",
            Trigger::Typecheck(one_block(blk)),
        ));
    }
    {
        let mut blk = b::block("f", BlockKind::Reporter, vec![]);
        blk.body = vec![b::report(b::real(1.5))];
        cases.push(case("E_NONINT_LITERAL", Trigger::Typecheck(one_block(blk))));
    }
    {
        let mut blk = b::block("f", BlockKind::Reporter, vec![b::param("x")]);
        blk.body = vec![b::report(b::num(0))];
        cases.push(case("E_UNTYPEABLE", Trigger::Typecheck(one_block(blk))));
    }
    {
        let mut blk = b::block("f", BlockKind::Reporter, vec![b::param("x")]);
        blk.body = vec![b::report(b::div(b::var("x"), b::num(2)))];
        cases.push(case("W_DIV_SEMANTICS", Trigger::Typecheck(one_block(blk))));
    }

    // Backend.
    {
        let mut blk = b::block("f", BlockKind::Predicate, vec![b::param("x")]);
        blk.body = vec![b::report(b::contains(b::int_list(&[1, 2]), b::var("x")))];
        cases.push(case(
            "E_UNSUPPORTED_CONSTRUCT",
            Trigger::Compile(one_block(blk)),
        ));
    }

    cases
}

fn bug_inv_iter() -> Lesson {
    let mut blk = b::block("badIter", BlockKind::Command, vec![]);
    blk.body = vec![
        b::declare_locals(&["i"]),
        b::repeat_n(
            b::num(5),
            vec![b::le(b::var("i"), b::num(2))],
            vec![b::change("i", b::num(1))],
        ),
    ];
    let program = b::finish(Program {
        blocks: vec![blk],
        ..Program::default()
    });
    let loop_id = program.blocks[0].body[1].id.clone();
    Lesson {
        name: "bug_inv_iter",
        narrative: "Seeded bug: the invariant holds on entry and for the \
                    first two iterations, then breaks. Dynamically the \
                    exact failing iteration is reported; statically the \
                    maintenance obligation fails.",
        program,
        expected_rac: vec![RacCase {
            entry: "badIter",
            args: vec![],
            expect: RacExpect::Violates(ViolationKind::InvariantIteration),
        }],
        expected_static: StaticExpectation::FailsVerification {
            kind: ObligationKind::InvariantMaintain,
            block_id: loop_id,
        },
        max_int: 100,
    }
}
