use std::fs;
use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Stdio};
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};

use blockverify::ast::{Program, Value};
use blockverify::boogie::{self, BoogieUnit, VerdictOutcome};
use blockverify::diag::{Diagnostic, Severity};
use blockverify::io::{parse_program, IoError};
use blockverify::rac::{Interpreter, Outcome, DEFAULT_DEPTH_LIMIT};
use blockverify::types::{infer_types, TypedProgram};

const EXIT_OK: u8 = 0;
const EXIT_DIAGNOSTICS: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_TOOL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "blockverify",
    version,
    about = "Runs, type checks and verifies block programs with contracts"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute a program under runtime assertion checking.
    Run {
        file: PathBuf,
        /// Block or entry-script name; defaults to the only entry point.
        #[arg(long)]
        entry: Option<String>,
        /// Argument literals: integers, true/false, [1,2,3] lists, quoted text.
        #[arg(long, num_args = 0.., allow_hyphen_values = true)]
        args: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_DEPTH_LIMIT)]
        depth_limit: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Validate and type check without running anything.
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Compile to Boogie, writing the .bpl and its .srcmap.json sidecar.
    Compile {
        file: PathBuf,
        /// Output .bpl path; defaults to the input path with a .bpl extension.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Compile and run the Boogie verifier, mapping its verdict back to blocks.
    Verify {
        file: PathBuf,
        /// Boogie executable; defaults to $BLOCKVERIFY_BOOGIE, then `boogie`.
        #[arg(long)]
        boogie_path: Option<PathBuf>,
        /// Stop after compilation; for environments without Boogie.
        #[arg(long)]
        skip_solver: bool,
        #[arg(long, default_value_t = 60)]
        timeout_secs: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Run {
            file,
            entry,
            args,
            depth_limit,
            format,
        } => cmd_run(&file, entry.as_deref(), &args, depth_limit, format),
        Cmd::Check { file, format } => cmd_check(&file, format),
        Cmd::Compile { file, out, format } => cmd_compile(&file, out.as_deref(), format),
        Cmd::Verify {
            file,
            boogie_path,
            skip_solver,
            timeout_secs,
            out,
            format,
        } => cmd_verify(
            &file,
            boogie_path.as_deref(),
            skip_solver,
            timeout_secs,
            out.as_deref(),
            format,
        ),
    };
    ExitCode::from(code)
}

// ---------------------------------------------------------------------------
// Shared plumbing

fn load_program(path: &Path) -> Result<Program, u8> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return Err(EXIT_USAGE);
        }
    };
    match parse_program(&text) {
        Ok(p) => Ok(p),
        Err(IoError::Schema { path, message }) => {
            eprintln!("error: E_SCHEMA at {path}: {message}");
            Err(EXIT_USAGE)
        }
        Err(IoError::Wellformed(diags)) => {
            for d in &diags {
                println!("{d}");
            }
            summarize_stderr(&diags);
            Err(EXIT_DIAGNOSTICS)
        }
        Err(IoError::Unserializable(m)) => {
            eprintln!("error: {m}");
            Err(EXIT_USAGE)
        }
    }
}

/// One-line per-severity summary on stderr, for scripting.
fn summarize_stderr(diags: &[Diagnostic]) {
    let errors = diags
        .iter()
        .filter(|d| d.severity == Severity::Error)
        .count();
    let warnings = diags.len() - errors;
    if errors > 0 || warnings > 0 {
        eprintln!("{errors} error(s), {warnings} warning(s)");
    }
}

fn print_diagnostics(diags: &[Diagnostic], format: Format) {
    match format {
        Format::Text => {
            for d in diags {
                println!("{d}");
            }
        }
        Format::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(diags).expect("diagnostics serialize")
            );
        }
    }
    summarize_stderr(diags);
}

/// Typed-by-syntax argument literals: integers, `true`/`false`, `[a,b,c]`
/// integer lists, quoted text.
fn parse_value_literal(s: &str) -> Result<Value, String> {
    let t = s.trim();
    if t == "true" {
        return Ok(Value::Bool(true));
    }
    if t == "false" {
        return Ok(Value::Bool(false));
    }
    if let Ok(n) = t.parse::<i64>() {
        return Ok(Value::Number(n as f64));
    }
    if let Some(inner) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        let inner = inner.trim();
        if inner.is_empty() {
            return Ok(Value::List(Vec::new()));
        }
        let items = inner
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<i64>()
                    .map(|n| Value::Number(n as f64))
                    .map_err(|_| format!("`{p}` is not an integer"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(Value::List(items));
    }
    if let Some(inner) = t.strip_prefix('"').and_then(|r| r.strip_suffix('"')) {
        return Ok(Value::Text(inner.to_string()));
    }
    Err(format!(
        "`{s}` is not an integer, true/false, [a,b,c] list, or quoted text"
    ))
}

fn value_to_json(v: &Value) -> serde_json::Value {
    match v {
        Value::Number(n) if n.fract() == 0.0 && n.abs() < 9e15 => {
            serde_json::Value::from(*n as i64)
        }
        Value::Number(n) => serde_json::Value::from(*n),
        Value::Bool(b) => serde_json::Value::from(*b),
        Value::Text(t) => serde_json::Value::from(t.clone()),
        Value::List(items) => serde_json::Value::Array(items.iter().map(value_to_json).collect()),
    }
}

// ---------------------------------------------------------------------------
// run

fn cmd_run(
    path: &Path,
    entry: Option<&str>,
    raw_args: &[String],
    depth_limit: usize,
    format: Format,
) -> u8 {
    let program = match load_program(path) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let entry = match pick_entry(&program, entry) {
        Ok(e) => e,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let mut args = Vec::new();
    for raw in raw_args {
        match parse_value_literal(raw) {
            Ok(v) => args.push(v),
            Err(msg) => {
                eprintln!("error: bad argument: {msg}");
                return EXIT_USAGE;
            }
        }
    }

    let mut interp = Interpreter::new(&program).with_depth_limit(depth_limit);
    let report = interp.run_entry(&entry, &args);

    match format {
        Format::Text => match &report.outcome {
            Outcome::Passed => {
                if let Some(v) = &report.result {
                    println!("result: {v}");
                } else {
                    println!("passed");
                    for (name, value) in &report.globals {
                        println!("{name} = {value}");
                    }
                }
                EXIT_OK
            }
            Outcome::Violated(v) => {
                print!("{}", render_violation(v, &report.globals));
                summarize_stderr(&[v.to_diagnostic()]);
                EXIT_DIAGNOSTICS
            }
            Outcome::Fault(f) => {
                println!(
                    "runtime error {}: {} (at {})",
                    f.code.as_str(),
                    f.message,
                    f.block_id
                );
                summarize_stderr(&[f.to_diagnostic()]);
                EXIT_DIAGNOSTICS
            }
        },
        Format::Json => {
            let (outcome, diags) = match &report.outcome {
                Outcome::Passed => ("passed", Vec::new()),
                Outcome::Violated(v) => ("violated", vec![v.to_diagnostic()]),
                Outcome::Fault(f) => ("fault", vec![f.to_diagnostic()]),
            };
            let doc = serde_json::json!({
                "outcome": outcome,
                "result": report.result.as_ref().map(value_to_json),
                "globals": report
                    .globals
                    .iter()
                    .map(|(n, v)| (n.clone(), value_to_json(v)))
                    .collect::<serde_json::Map<_, _>>(),
                "diagnostics": diags,
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&doc).expect("report serializes")
            );
            summarize_stderr(&diags);
            if matches!(report.outcome, Outcome::Passed) {
                EXIT_OK
            } else {
                EXIT_DIAGNOSTICS
            }
        }
    }
}

fn pick_entry(program: &Program, entry: Option<&str>) -> Result<String, String> {
    if let Some(e) = entry {
        return Ok(e.to_string());
    }
    match (program.entry_scripts.len(), program.blocks.len()) {
        (1, _) => Ok(program.entry_scripts[0].0.clone()),
        (0, 1) => Ok(program.blocks[0].name.clone()),
        _ => Err("more than one possible entry point; pass --entry".to_string()),
    }
}

fn render_violation(v: &blockverify::rac::Violation, globals: &[(String, Value)]) -> String {
    let mut lines = vec![format!("{} violated", v.kind.as_str())];
    let mut at = format!("at block {}, slot {}", v.block_id, v.slot_index);
    if let Some(i) = v.iteration {
        at.push_str(&format!(", after iteration {i}"));
    }
    lines.push(at);
    lines.push(format!("call chain: {}", v.call_chain.join(" -> ")));
    for (name, value) in globals {
        lines.push(format!("{name} = {value}"));
    }
    let width = lines.iter().map(|l| l.len()).max().unwrap_or(0);
    let mut out = String::new();
    out.push_str(&format!("+{}+\n", "-".repeat(width + 2)));
    for l in &lines {
        out.push_str(&format!("| {l:width$} |\n"));
    }
    out.push_str(&format!("+{}+\n", "-".repeat(width + 2)));
    out
}

// ---------------------------------------------------------------------------
// check

fn cmd_check(path: &Path, format: Format) -> u8 {
    let program = match load_program(path) {
        Ok(p) => p,
        Err(code) => return code,
    };
    match infer_types(&program) {
        Ok(typed) => {
            print_diagnostics(&typed.warnings, format);
            if format == Format::Text {
                println!("ok");
            }
            EXIT_OK
        }
        Err(diags) => {
            print_diagnostics(&diags, format);
            EXIT_DIAGNOSTICS
        }
    }
}

// ---------------------------------------------------------------------------
// compile

fn compile_unit(path: &Path, format: Format) -> Result<(TypedProgram, BoogieUnit), u8> {
    let program = load_program(path)?;
    let typed = match infer_types(&program) {
        Ok(t) => t,
        Err(diags) => {
            print_diagnostics(&diags, format);
            return Err(EXIT_DIAGNOSTICS);
        }
    };
    print_diagnostics(&typed.warnings, format);
    match boogie::compile(&typed) {
        Ok(unit) => Ok((typed, unit)),
        Err(e) => {
            print_diagnostics(&[e.to_diagnostic()], format);
            Err(EXIT_DIAGNOSTICS)
        }
    }
}

fn output_paths(path: &Path, out: Option<&Path>) -> (PathBuf, PathBuf) {
    let bpl = out.map(Path::to_path_buf).unwrap_or_else(|| {
        let mut p = path.to_path_buf();
        // `.blocks.json` has a two-part extension, so strip twice.
        p.set_extension("");
        p.set_extension("bpl");
        p
    });
    let srcmap = bpl.with_extension("srcmap.json");
    (bpl, srcmap)
}

fn cmd_compile(path: &Path, out: Option<&Path>, format: Format) -> u8 {
    let (_typed, unit) = match compile_unit(path, format) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let (bpl_path, map_path) = output_paths(path, out);
    if let Err(e) = fs::write(&bpl_path, &unit.text) {
        eprintln!("error: cannot write {}: {e}", bpl_path.display());
        return EXIT_USAGE;
    }
    if let Err(e) = fs::write(&map_path, unit.source_map.to_json()) {
        eprintln!("error: cannot write {}: {e}", map_path.display());
        return EXIT_USAGE;
    }
    if format == Format::Text {
        println!("wrote {}", bpl_path.display());
        println!("wrote {}", map_path.display());
    }
    EXIT_OK
}

// ---------------------------------------------------------------------------
// verify

fn cmd_verify(
    path: &Path,
    boogie_path: Option<&Path>,
    skip_solver: bool,
    timeout_secs: u64,
    out: Option<&Path>,
    format: Format,
) -> u8 {
    let (_typed, unit) = match compile_unit(path, format) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let (bpl_path, map_path) = output_paths(path, out);
    if let Err(e) = fs::write(&bpl_path, &unit.text) {
        eprintln!("error: cannot write {}: {e}", bpl_path.display());
        return EXIT_USAGE;
    }
    if let Err(e) = fs::write(&map_path, unit.source_map.to_json()) {
        eprintln!("error: cannot write {}: {e}", map_path.display());
        return EXIT_USAGE;
    }
    if skip_solver {
        if format == Format::Text {
            println!("wrote {}", bpl_path.display());
            println!("wrote {}", map_path.display());
            println!("solver skipped");
        }
        return EXIT_OK;
    }

    let exe = boogie_path
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os("BLOCKVERIFY_BOOGIE").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("boogie"));
    let output = match run_with_timeout(&exe, &bpl_path, Duration::from_secs(timeout_secs)) {
        Ok(o) => o,
        Err(SolverError::NotFound(e)) => {
            eprintln!("error: cannot run {}: {e}", exe.display());
            return EXIT_USAGE;
        }
        Err(SolverError::Timeout) => {
            eprintln!("error: Boogie timed out after {timeout_secs} s");
            return EXIT_TOOL;
        }
    };

    match boogie::parse_boogie_output(&output, &unit.source_map) {
        Ok(verdict) => {
            print_diagnostics(&verdict.diagnostics, format);
            if format == Format::Text {
                println!("{}", boogie::verdict_summary(&verdict));
            }
            match verdict.outcome {
                VerdictOutcome::Verified => EXIT_OK,
                VerdictOutcome::Errors => EXIT_DIAGNOSTICS,
                VerdictOutcome::ToolFailure => EXIT_TOOL,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_TOOL
        }
    }
}

enum SolverError {
    NotFound(std::io::Error),
    Timeout,
}

fn run_with_timeout(exe: &Path, bpl: &Path, timeout: Duration) -> Result<String, SolverError> {
    let mut child = Command::new(exe)
        .arg(bpl)
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(SolverError::NotFound)?;
    let start = Instant::now();
    loop {
        match child.try_wait() {
            Ok(Some(_)) => break,
            Ok(None) => {
                if start.elapsed() > timeout {
                    let _ = child.kill();
                    let _ = child.wait();
                    return Err(SolverError::Timeout);
                }
                std::thread::sleep(Duration::from_millis(50));
            }
            Err(e) => return Err(SolverError::NotFound(e)),
        }
    }
    let mut text = String::new();
    if let Some(mut stdout) = child.stdout.take() {
        let _ = stdout.read_to_string(&mut text);
    }
    if let Some(mut stderr) = child.stderr.take() {
        let _ = stderr.read_to_string(&mut text);
    }
    Ok(text)
}
