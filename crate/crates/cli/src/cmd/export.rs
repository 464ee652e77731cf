use std::collections::BTreeSet;

use natcalc::{explore, weak_saturate, Limits, Process, Universe};
use serde::Serialize;

use crate::error::CliError;
use crate::label::{Label, Labelled};
use crate::source::Names;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Dot,
}

#[derive(Serialize)]
struct Graph {
    system: &'static str,
    complete: bool,
    states: Vec<StateOut>,
    edges: Vec<EdgeOut>,
}

#[derive(Serialize)]
struct StateOut {
    id: usize,
    term: String,
    complete: bool,
}

#[derive(Serialize)]
struct EdgeOut {
    from: usize,
    label: Label,
    to: usize,
    /// Set on edges added by weak saturation.
    weak: bool,
}

fn build<F: Labelled>(p: &Process, names: &Names, u: &Universe, limits: Limits, weak: bool) -> Result<Graph, CliError> {
    let g = explore::<F>(p, u, limits)?;
    let mut edges = Vec::new();
    for s in 0..g.len() {
        for e in g.edges(s) {
            edges.push(EdgeOut { from: s, label: F::label(e, names), to: *F::target(e), weak: false });
        }
    }
    if weak {
        for (s, es) in weak_saturate(&g)?.iter().enumerate() {
            let strong: BTreeSet<_> = g.edges(s).iter().collect();
            for e in es.iter().filter(|e| !strong.contains(e)) {
                edges.push(EdgeOut { from: s, label: F::label(e, names), to: *F::target(e), weak: true });
            }
        }
    }
    let states = (0..g.len())
        .map(|s| StateOut { id: s, term: names.term(&g.state(s).term), complete: g.is_complete_state(s) })
        .collect();
    Ok(Graph { system: F::name(), complete: g.is_complete(), states, edges })
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn render<F: Labelled>(
    p: &Process,
    names: &Names,
    u: &Universe,
    limits: Limits,
    weak: bool,
    format: Format,
) -> Result<String, CliError> {
    let graph = build::<F>(p, names, u, limits, weak)?;
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(&graph).expect("graph serializes") + "\n",
        Format::Dot => {
            let mut out = format!("digraph {} {{\n", graph.system);
            for s in &graph.states {
                let shape = if s.complete { "ellipse" } else { "box" };
                out += &format!("  s{} [label=\"{}\", shape={shape}];\n", s.id, dot_escape(&s.term));
            }
            for e in &graph.edges {
                let style = if e.weak { ", style=dashed" } else { "" };
                out +=
                    &format!("  s{} -> s{} [label=\"{}\"{style}];\n", e.from, e.to, dot_escape(&e.label.text(names)));
            }
            out + "}\n"
        }
    })
}
