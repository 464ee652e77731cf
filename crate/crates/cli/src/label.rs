//! Residual labels in text, DOT and JSON form.

use natcalc::basic::BasicShape;
use natcalc::proper::{unpublished_openings, ProperShape};
use natcalc::{Basic, BasicAction, CanonicalTerm, ChannelId, Proper, ProperAction, System, Value};
use serde::Serialize;

use crate::source::Names;

#[derive(Serialize)]
pub struct Label {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chan: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    pub opened: Vec<u32>,
}

pub trait Labelled: System {
    fn describe(shape: &Self::Shape, names: &Names) -> Label;

    /// Channels an output opens without publishing them.
    fn unpublished(_r: &Self::Of<CanonicalTerm>) -> Vec<ChannelId> {
        Vec::new()
    }

    fn label<T: natcalc::Element>(r: &Self::Of<T>, names: &Names) -> Label {
        Self::describe(&Self::shape(r), names)
    }
}

impl Label {
    fn new(kind: &'static str, chan: Option<String>, value: Option<String>, opened: &[ChannelId]) -> Label {
        Label { kind, chan, value, opened: opened.iter().map(|c| c.0).collect() }
    }

    /// `a <| v`, `a |> v`, `tau`, `nu c3` or `a <| nu c3. v`.
    pub fn text(&self, names: &Names) -> String {
        let chan = self.chan.as_deref().unwrap_or("");
        let value = self.value.as_deref().unwrap_or("");
        let opened: String = self.opened.iter().map(|&c| format!("nu {}. ", names.chan(ChannelId(c)))).collect();
        match self.kind {
            "send" | "output" => format!("{chan} <| {opened}{value}"),
            "receive" => format!("{chan} |> {value}"),
            "open" => opened.trim_end_matches(". ").to_string(),
            _ => "tau".into(),
        }
    }
}

fn value(v: &Value, names: &Names) -> Option<String> {
    Some(names.value(v))
}

impl Labelled for Basic {
    fn describe(shape: &BasicShape, names: &Names) -> Label {
        match shape {
            BasicShape::Acting(BasicAction::Send(a, x)) => {
                Label::new("send", Some(names.chan(*a)), value(x, names), &[])
            }
            BasicShape::Acting(BasicAction::Receive(a, x)) => {
                Label::new("receive", Some(names.chan(*a)), value(x, names), &[])
            }
            BasicShape::Acting(BasicAction::Tau) => Label::new("tau", None, None, &[]),
            BasicShape::Opening(c) => Label::new("open", None, None, &[*c]),
        }
    }
}

impl Labelled for Proper {
    fn describe(shape: &ProperShape, names: &Names) -> Label {
        match shape {
            ProperShape::Simple(ProperAction::Receive(a, x)) => {
                Label::new("receive", Some(names.chan(*a)), value(x, names), &[])
            }
            ProperShape::Simple(ProperAction::Tau) => Label::new("tau", None, None, &[]),
            ProperShape::Output { chan, opened, payload } => {
                Label::new("output", Some(names.chan(*chan)), value(payload, names), opened)
            }
        }
    }

    fn unpublished(r: &natcalc::ProperResidual<CanonicalTerm>) -> Vec<ChannelId> {
        unpublished_openings(r)
    }
}

/// `label -> target`, with the target rendered by `target`.
pub fn residual<F: Labelled, T: natcalc::Element>(
    r: &F::Of<T>,
    names: &Names,
    target: impl Fn(&T) -> String,
) -> String {
    format!("{} -> {}", F::label(r, names).text(names), target(F::target(r)))
}
