//! Regenerates the on-disk lesson corpus from the in-crate constructors:
//! `lessons/*.blocks.json`, the golden `lessons/expected/*.bpl` and
//! `.srcmap.json` files, and `lessons/exercises.md`.
//!
//! Usage: cargo run --example gen_corpus -- <repo-root>

use std::fs;
use std::path::PathBuf;

use blockverify::boogie;
use blockverify::corpus::{self, StaticExpectation};
use blockverify::io::serialize_program;
use blockverify::types::infer_types;

fn main() {
    let root = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .expect("usage: gen_corpus <repo-root>");
    let lessons_dir = root.join("lessons");
    let expected_dir = lessons_dir.join("expected");
    fs::create_dir_all(&expected_dir).expect("create lessons/expected");

    let mut exercises = String::from("# Exercises\n");
    for lesson in corpus::lessons() {
        let text = serialize_program(&lesson.program).expect("serialize lesson");
        let path = lessons_dir.join(format!("{}.blocks.json", lesson.name));
        fs::write(&path, &text).expect("write lesson");
        println!("wrote {}", path.display());

        if lesson.expected_static != StaticExpectation::Rejected("E_DYNAMIC_TYPING") {
            let typed = infer_types(&lesson.program).expect("lesson typechecks");
            let unit = boogie::compile(&typed).expect("lesson compiles");
            let bpl = expected_dir.join(format!("{}.bpl", lesson.name));
            fs::write(&bpl, &unit.text).expect("write golden bpl");
            let map = expected_dir.join(format!("{}.srcmap.json", lesson.name));
            fs::write(&map, unit.source_map.to_json()).expect("write golden srcmap");
            println!("wrote {}", bpl.display());
        }

        exercises.push_str(&format!("\n## {}\n\n{}\n", lesson.name, lesson.narrative));
    }
    fs::write(lessons_dir.join("exercises.md"), exercises).expect("write exercises.md");
    println!("wrote {}", lessons_dir.join("exercises.md").display());
}
