#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use natcalc::syntax::{default_env, desugar, parse, SourceTerm};
use natcalc::{ChannelId, Limits, Process, Universe, Value};

pub struct Entry {
    pub name: String,
    pub text: String,
    pub ast: SourceTerm,
    pub process: Process,
}

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// Corpus terms in file-name order, with free names shared across files.
pub fn corpus() -> Vec<Entry> {
    let mut files: Vec<_> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "nat"))
        .collect();
    files.sort();
    let parsed: Vec<_> = files
        .iter()
        .map(|f| {
            let text = std::fs::read_to_string(f).unwrap();
            let ast = parse(&text).unwrap_or_else(|e| panic!("{}: {e}", f.display()));
            (f.file_stem().unwrap().to_string_lossy().into_owned(), text, ast)
        })
        .collect();
    let env = env_for(parsed.iter().map(|(_, _, a)| a));
    parsed
        .into_iter()
        .map(|(name, text, ast)| {
            let process = desugar(&ast, &env).unwrap();
            Entry { name, text, ast, process }
        })
        .collect()
}

pub fn env_for<'a>(asts: impl IntoIterator<Item = &'a SourceTerm>) -> BTreeMap<String, ChannelId> {
    default_env(asts)
}

pub fn universe() -> Universe {
    Universe::new([Value::Unit], 3, 3, 10).unwrap()
}

pub fn limits() -> Limits {
    Limits { max_states: 2000, max_depth: 64 }
}
