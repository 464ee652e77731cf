//! Loading terms from `.nat` files and naming their channels.

use std::collections::BTreeMap;
use std::path::Path;

use natcalc::syntax::{default_env, desugar, parse_program, pretty_with, SourceTerm};
use natcalc::{CanonicalTerm, ChannelId, Process, Value};

use crate::error::CliError;

/// All terms of a file, in order.
pub fn read_program(path: &Path) -> Result<Vec<SourceTerm>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    parse_program(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn read_term(path: &Path, index: usize) -> Result<SourceTerm, CliError> {
    let mut terms = read_program(path)?;
    let count = terms.len();
    if index >= count {
        return Err(CliError::Input(format!("{}: term {index} requested but the file holds {count}", path.display())));
    }
    Ok(terms.swap_remove(index))
}

/// Free names of several terms, numbered together.
pub struct Loaded {
    pub processes: Vec<Process>,
    pub names: Names,
}

impl Loaded {
    pub fn new(terms: &[SourceTerm]) -> Result<Loaded, CliError> {
        let env = default_env(terms);
        let processes = terms.iter().map(|t| desugar(t, &env)).collect::<Result<_, _>>()?;
        Ok(Loaded { processes, names: Names(env.into_iter().map(|(n, c)| (c, n)).collect()) })
    }

    pub fn free(&self) -> usize {
        self.names.0.len()
    }
}

/// Display names for channels: source names where known, `c{id}` otherwise.
#[derive(Default)]
pub struct Names(BTreeMap<ChannelId, String>);

impl Names {
    pub fn chan(&self, c: ChannelId) -> String {
        self.0.get(&c).cloned().unwrap_or_else(|| c.to_string())
    }

    pub fn value(&self, v: &Value) -> String {
        match v {
            Value::Chan(c) => self.chan(*c),
            Value::Pair(a, b) => format!("({}, {})", self.value(a), self.value(b)),
            other => other.to_string(),
        }
    }

    /// Single-line rendering of a canonical term.
    pub fn term(&self, t: &CanonicalTerm) -> String {
        let text = pretty_with(t, &|c| self.chan(c));
        text.trim_end().replace('\n', " ")
    }
}
