//! The proper transition system.
//!
//! Layered on the basic system: sends, receives and internal communication
//! are taken over unchanged, while chains of basic scope openings followed
//! by a send are bundled into a single output label `a ◁ ν b₁ … bₙ. x`.

use std::collections::BTreeSet;
use std::fmt;
use std::rc::Rc;

use crate::basic::{canonical_steps, reify_target, BasicAction, BasicResidual, Derivation, Deriver, StepSet};
use crate::canonical::{free_channels, CanonicalTerm};
use crate::context::Context;
use crate::error::Result;
use crate::process::Process;
use crate::residual::{derived_fuse, Element, ResidualFamily};
use crate::value::{ChannelId, Value};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProperAction {
    Receive(ChannelId, Value),
    Tau,
}

impl fmt::Display for ProperAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProperAction::Receive(a, x) => write!(f, "{a} |> {x}"),
            ProperAction::Tau => write!(f, "tau"),
        }
    }
}

/// The part of an output label after the channel: zero or more published
/// channels, then the payload and target.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OutputRest<T> {
    Payload(Value, T),
    OpenThen(ChannelId, Box<OutputRest<T>>),
}

impl<T> OutputRest<T> {
    pub fn target(&self) -> &T {
        match self {
            OutputRest::Payload(_, t) => t,
            OutputRest::OpenThen(_, rest) => rest.target(),
        }
    }

    pub fn payload(&self) -> &Value {
        match self {
            OutputRest::Payload(v, _) => v,
            OutputRest::OpenThen(_, rest) => rest.payload(),
        }
    }

    pub fn opened(&self) -> Vec<ChannelId> {
        let mut out = Vec::new();
        let mut cur = self;
        while let OutputRest::OpenThen(c, rest) = cur {
            out.push(*c);
            cur = rest;
        }
        out
    }

    pub fn map<U>(&self, f: impl FnOnce(&T) -> U) -> OutputRest<U> {
        match self {
            OutputRest::Payload(v, t) => OutputRest::Payload(v.clone(), f(t)),
            OutputRest::OpenThen(c, rest) => OutputRest::OpenThen(*c, Box::new(rest.map(f))),
        }
    }

    fn build(opened: &[ChannelId], payload: Value, target: T) -> OutputRest<T> {
        opened.iter().rev().fold(OutputRest::Payload(payload, target), |acc, c| OutputRest::OpenThen(*c, Box::new(acc)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProperResidual<T> {
    Simple(ProperAction, T),
    Output(ChannelId, OutputRest<T>),
}

impl<T> ProperResidual<T> {
    pub fn target(&self) -> &T {
        match self {
            ProperResidual::Simple(_, t) => t,
            ProperResidual::Output(_, rest) => rest.target(),
        }
    }

    pub fn map<U>(&self, f: impl FnOnce(&T) -> U) -> ProperResidual<U> {
        match self {
            ProperResidual::Simple(a, t) => ProperResidual::Simple(a.clone(), f(t)),
            ProperResidual::Output(c, rest) => ProperResidual::Output(*c, rest.map(f)),
        }
    }

    pub fn is_silent(&self) -> bool {
        matches!(self, ProperResidual::Simple(ProperAction::Tau, _))
    }
}

impl<T: fmt::Display> fmt::Display for ProperResidual<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProperResidual::Simple(a, t) => write!(f, "({a}) {t}"),
            ProperResidual::Output(a, rest) => {
                write!(f, "({a} <| ")?;
                for c in rest.opened() {
                    write!(f, "nu {c}. ")?;
                }
                write!(f, "{}) {}", rest.payload(), rest.target())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProperShape {
    Simple(ProperAction),
    Output { chan: ChannelId, opened: Vec<ChannelId>, payload: Value },
}

impl fmt::Display for ProperShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProperShape::Simple(a) => write!(f, "{a}"),
            ProperShape::Output { chan, opened, payload } => {
                write!(f, "{chan} <| ")?;
                for c in opened {
                    write!(f, "nu {c}. ")?;
                }
                write!(f, "{payload}")
            }
        }
    }
}

/// Marker type for the proper residual family.
#[derive(Clone, Copy, Debug, Default)]
pub struct Proper;

impl ResidualFamily for Proper {
    type Shape = ProperShape;
    type Of<T: Element> = ProperResidual<T>;

    fn shape<T: Element>(r: &ProperResidual<T>) -> ProperShape {
        match r {
            ProperResidual::Simple(a, _) => ProperShape::Simple(a.clone()),
            ProperResidual::Output(chan, rest) => {
                ProperShape::Output { chan: *chan, opened: rest.opened(), payload: rest.payload().clone() }
            }
        }
    }

    fn target<T: Element>(r: &ProperResidual<T>) -> &T {
        r.target()
    }

    fn from_parts<T: Element>(shape: ProperShape, target: T) -> ProperResidual<T> {
        match shape {
            ProperShape::Simple(a) => ProperResidual::Simple(a, target),
            ProperShape::Output { chan, opened, payload } => {
                ProperResidual::Output(chan, OutputRest::build(&opened, payload, target))
            }
        }
    }

    fn silent<T: Element>(t: T) -> ProperResidual<T> {
        proper_silent(t)
    }

    fn unsilent<T: Element>(r: &ProperResidual<T>) -> Option<&T> {
        match r {
            ProperResidual::Simple(ProperAction::Tau, t) => Some(t),
            _ => None,
        }
    }

    fn lift<A: Element, B: Element>(x: &dyn Fn(&A, &B) -> bool, c: &ProperResidual<A>, d: &ProperResidual<B>) -> bool {
        proper_lift(x, c, d)
    }

    fn fuse<T: Element>(n: &ProperResidual<ProperResidual<T>>) -> Vec<ProperResidual<T>> {
        proper_fuse(n)
    }
}

/// Same label (channel, payload and published channels, the latter compared
/// at their shared fresh ids) and `X` on the targets.
pub fn proper_lift<A, B>(x: &dyn Fn(&A, &B) -> bool, c: &ProperResidual<A>, d: &ProperResidual<B>) -> bool {
    fn rest<A, B>(x: &dyn Fn(&A, &B) -> bool, r: &OutputRest<A>, s: &OutputRest<B>) -> bool {
        match (r, s) {
            (OutputRest::Payload(v, p), OutputRest::Payload(w, q)) => v == w && x(p, q),
            (OutputRest::OpenThen(a, r2), OutputRest::OpenThen(b, s2)) => a == b && rest(x, r2, s2),
            _ => false,
        }
    }
    match (c, d) {
        (ProperResidual::Simple(alpha, p), ProperResidual::Simple(beta, q)) => alpha == beta && x(p, q),
        (ProperResidual::Output(a, r), ProperResidual::Output(b, s)) => a == b && rest(x, r, s),
        _ => false,
    }
}

pub fn proper_silent<T>(p: T) -> ProperResidual<T> {
    ProperResidual::Simple(ProperAction::Tau, p)
}

/// Fuse obtained from [`proper_silent`] as `silent⁻¹ ⊔ lift silent⁻¹`.
pub fn proper_fuse<T: Element>(n: &ProperResidual<ProperResidual<T>>) -> Vec<ProperResidual<T>> {
    derived_fuse::<Proper, T>(n)
}

/// Channels published by an output that occur neither in its payload nor
/// free in its target.
pub fn unpublished_openings(r: &ProperResidual<CanonicalTerm>) -> Vec<ChannelId> {
    let ProperResidual::Output(_, rest) = r else {
        return Vec::new();
    };
    let free = free_channels(rest.target());
    rest.opened().into_iter().filter(|c| !rest.payload().mentions(*c) && !free.contains(c)).collect()
}

struct Bundled {
    chan: ChannelId,
    opened: Vec<ChannelId>,
    payload: Value,
    target: Process,
    minted: usize,
    derivation: Rc<Derivation>,
}

/// Outputs of `p`, including those reached through opening chains. Each
/// opening step uses the context's next fresh id.
fn outputs(p: &Process, ctx: Context<'_>, deriver: &Deriver) -> Result<Vec<Bundled>> {
    let mut out = Vec::new();
    for d in deriver.derive_all(p, ctx)? {
        match &d.residual {
            BasicResidual::Acting(BasicAction::Send(a, x), q) => out.push(Bundled {
                chan: *a,
                opened: Vec::new(),
                payload: x.clone(),
                target: q.clone(),
                minted: ctx.minted(),
                derivation: d.clone(),
            }),
            BasicResidual::Opening(b, q) => {
                for inner in outputs(q, ctx.child(), deriver)? {
                    if inner.chan == *b {
                        continue;
                    }
                    let mut opened = vec![*b];
                    opened.extend(inner.opened);
                    out.push(Bundled { opened, ..inner });
                }
            }
            BasicResidual::Acting(..) => {}
        }
    }
    Ok(out)
}

/// All proper transitions of `p`, ordered by canonical residual.
pub fn proper_transitions(p: &Process, ctx: Context<'_>) -> Result<StepSet<ProperResidual<CanonicalTerm>>> {
    let deriver = Deriver::new();
    let mut items = Vec::new();
    for d in deriver.derive_all(p, ctx)? {
        let simple = match &d.residual {
            BasicResidual::Acting(BasicAction::Receive(a, x), q) => Some((ProperAction::Receive(*a, x.clone()), q)),
            BasicResidual::Acting(BasicAction::Tau, q) => Some((ProperAction::Tau, q)),
            _ => None,
        };
        if let Some((act, q)) = simple {
            let t = reify_target(q, ctx, ctx.minted())?;
            items.push((ProperResidual::Simple(act, t), q.clone(), ctx.minted(), d.clone()));
        }
    }
    for b in outputs(p, ctx, &deriver)? {
        let t = reify_target(&b.target, ctx, b.minted)?;
        let rest = OutputRest::build(&b.opened, b.payload, t);
        items.push((ProperResidual::Output(b.chan, rest), b.target, b.minted, b.derivation));
    }
    Ok(StepSet { steps: canonical_steps(items), truncated: deriver.truncated() })
}

/// Diagnostic listing of outputs that open a scope without publishing it.
pub fn defect_outputs(steps: &StepSet<ProperResidual<CanonicalTerm>>) -> BTreeSet<ProperResidual<CanonicalTerm>> {
    steps.steps.iter().filter(|s| !unpublished_openings(&s.residual).is_empty()).map(|s| s.residual.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::universe::Universe;

    fn u() -> Universe {
        Universe::new([Value::Unit], 2, 3, 8).unwrap()
    }

    #[test]
    fn stop_has_no_proper_steps() {
        let u = u();
        assert!(proper_transitions(&Process::stop(), Context::new(&u, 0)).unwrap().steps.is_empty());
    }

    #[test]
    fn unused_opening_is_reported() {
        let u = u();
        let p = Process::new_channel(|_| Process::send(ChannelId(0), Value::Unit));
        let set = proper_transitions(&p, Context::new(&u, 0)).unwrap();
        let defect = ProperResidual::Output(
            ChannelId(0),
            OutputRest::OpenThen(u.fresh(0), Box::new(OutputRest::Payload(Value::Unit, CanonicalTerm::Stop))),
        );
        assert!(set.residuals().contains(&defect));
        assert_eq!(unpublished_openings(&defect), vec![u.fresh(0)]);
        assert!(defect_outputs(&set).contains(&defect));
    }

    #[test]
    fn silent_layers_fuse() {
        let p = CanonicalTerm::Stop;
        let n = proper_silent(proper_silent(p.clone()));
        assert_eq!(proper_fuse(&n), vec![proper_silent(p.clone())]);
        let out = ProperResidual::Output(ChannelId(0), OutputRest::Payload(Value::Unit, p.clone()));
        assert_eq!(proper_fuse(&proper_silent(out.clone())), vec![out]);
        let nested = ProperResidual::Output(ChannelId(0), OutputRest::Payload(Value::Unit, proper_silent(p.clone())));
        assert_eq!(
            proper_fuse(&nested),
            vec![ProperResidual::Output(ChannelId(0), OutputRest::Payload(Value::Unit, p))]
        );
    }

    #[test]
    fn shape_roundtrip() {
        let r = ProperResidual::Output(
            ChannelId(1),
            OutputRest::OpenThen(ChannelId(3), Box::new(OutputRest::Payload(Value::Nat(1), 7u8))),
        );
        assert_eq!(Proper::from_parts(Proper::shape(&r), 7u8), r);
    }
}
