//! The basic transition system.
//!
//! Scope opening is a transition of its own here. Every residual is produced
//! by exactly one rule application whose premises are recorded in a
//! [`Derivation`], so a listing can always be audited back to the rules.

use std::cell::Cell;
use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

use crate::canonical::{reify, CanonicalTerm};
use crate::context::Context;
use crate::error::Result;
use crate::process::{Node, Process};
use crate::residual::{Element, ResidualFamily};
use crate::value::{ChannelId, Value};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasicAction {
    Send(ChannelId, Value),
    Receive(ChannelId, Value),
    Tau,
}

impl BasicAction {
    pub fn mentions(&self, c: ChannelId) -> bool {
        match self {
            BasicAction::Send(a, x) | BasicAction::Receive(a, x) => *a == c || x.mentions(c),
            BasicAction::Tau => false,
        }
    }
}

impl fmt::Display for BasicAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasicAction::Send(a, x) => write!(f, "{a} <| {x}"),
            BasicAction::Receive(a, x) => write!(f, "{a} |> {x}"),
            BasicAction::Tau => write!(f, "tau"),
        }
    }
}

/// A label together with its target. `Opening` is stored instantiated at
/// the fresh channel it binds.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasicResidual<T> {
    Acting(BasicAction, T),
    Opening(ChannelId, T),
}

impl<T> BasicResidual<T> {
    pub fn target(&self) -> &T {
        match self {
            BasicResidual::Acting(_, t) | BasicResidual::Opening(_, t) => t,
        }
    }

    pub fn map<U>(&self, f: impl FnOnce(&T) -> U) -> BasicResidual<U> {
        match self {
            BasicResidual::Acting(a, t) => BasicResidual::Acting(a.clone(), f(t)),
            BasicResidual::Opening(c, t) => BasicResidual::Opening(*c, f(t)),
        }
    }

    pub fn is_silent(&self) -> bool {
        matches!(self, BasicResidual::Acting(BasicAction::Tau, _))
    }
}

impl<T: fmt::Display> fmt::Display for BasicResidual<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasicResidual::Acting(a, t) => write!(f, "{{{a}}} {t}"),
            BasicResidual::Opening(c, t) => write!(f, "{{nu {c}}} {t}"),
        }
    }
}

/// Residual shape: label with binders instantiated.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasicShape {
    Acting(BasicAction),
    Opening(ChannelId),
}

impl fmt::Display for BasicShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasicShape::Acting(a) => write!(f, "{a}"),
            BasicShape::Opening(c) => write!(f, "nu {c}"),
        }
    }
}

/// Marker type for the basic residual family.
#[derive(Clone, Copy, Debug, Default)]
pub struct Basic;

impl ResidualFamily for Basic {
    type Shape = BasicShape;
    type Of<T: Element> = BasicResidual<T>;

    fn shape<T: Element>(r: &BasicResidual<T>) -> BasicShape {
        match r {
            BasicResidual::Acting(a, _) => BasicShape::Acting(a.clone()),
            BasicResidual::Opening(c, _) => BasicShape::Opening(*c),
        }
    }

    fn target<T: Element>(r: &BasicResidual<T>) -> &T {
        r.target()
    }

    fn from_parts<T: Element>(shape: BasicShape, target: T) -> BasicResidual<T> {
        match shape {
            BasicShape::Acting(a) => BasicResidual::Acting(a, target),
            BasicShape::Opening(c) => BasicResidual::Opening(c, target),
        }
    }

    fn silent<T: Element>(t: T) -> BasicResidual<T> {
        basic_silent(t)
    }

    fn unsilent<T: Element>(r: &BasicResidual<T>) -> Option<&T> {
        match r {
            BasicResidual::Acting(BasicAction::Tau, t) => Some(t),
            _ => None,
        }
    }

    fn lift<A: Element, B: Element>(x: &dyn Fn(&A, &B) -> bool, c: &BasicResidual<A>, d: &BasicResidual<B>) -> bool {
        basic_lift(x, c, d)
    }

    fn fuse<T: Element>(n: &BasicResidual<BasicResidual<T>>) -> Vec<BasicResidual<T>> {
        basic_fuse(n)
    }
}

/// `basic_lift X c d`: same action and `X` on the targets, or openings at the
/// same (shared) fresh channel with `X` on the instantiated bodies.
pub fn basic_lift<A, B>(x: &dyn Fn(&A, &B) -> bool, c: &BasicResidual<A>, d: &BasicResidual<B>) -> bool {
    match (c, d) {
        (BasicResidual::Acting(alpha, p), BasicResidual::Acting(beta, q)) => alpha == beta && x(p, q),
        (BasicResidual::Opening(a, p), BasicResidual::Opening(b, q)) => a == b && x(p, q),
        _ => false,
    }
}

pub fn basic_silent<T>(p: T) -> BasicResidual<T> {
    BasicResidual::Acting(BasicAction::Tau, p)
}

/// The four fuse rules: silent–acting, silent–opening, acting–silent and
/// opening–silent.
pub fn basic_fuse<T: Clone + Ord>(n: &BasicResidual<BasicResidual<T>>) -> Vec<BasicResidual<T>> {
    let mut out = Vec::new();
    match n {
        BasicResidual::Acting(BasicAction::Tau, inner) => out.push(inner.clone()),
        BasicResidual::Acting(alpha, BasicResidual::Acting(BasicAction::Tau, p)) => {
            out.push(BasicResidual::Acting(alpha.clone(), p.clone()))
        }
        _ => {}
    }
    // ⦃τ⦄⦃τ⦄p also matches acting–silent, with the same result.
    if let BasicResidual::Opening(a, BasicResidual::Acting(BasicAction::Tau, p)) = n {
        out.push(BasicResidual::Opening(*a, p.clone()));
    }
    out.sort();
    out.dedup();
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Sending,
    Receiving,
    Communication,
    CommunicationSym,
    ActingLeft,
    ActingRight,
    ScopeOpening,
    OpeningLeft,
    OpeningRight,
    ClosingAfterActing,
    ClosingAfterOpening,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Sending => "Sending",
            Rule::Receiving => "Receiving",
            Rule::Communication => "Communication",
            Rule::CommunicationSym => "Communication (symmetric)",
            Rule::ActingLeft => "Acting within a subsystem",
            Rule::ActingRight => "Acting within a subsystem (symmetric)",
            Rule::ScopeOpening => "Scope opening",
            Rule::OpeningLeft => "Scope opening within a subsystem",
            Rule::OpeningRight => "Scope opening within a subsystem (symmetric)",
            Rule::ClosingAfterActing => "Scope closing after acting",
            Rule::ClosingAfterOpening => "Scope closing after another scope opening",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A rule application with its premises.
pub struct Derivation {
    pub rule: Rule,
    pub residual: BasicResidual<Process>,
    pub premises: Vec<Rc<Derivation>>,
}

impl Derivation {
    fn leaf(rule: Rule, residual: BasicResidual<Process>) -> Rc<Self> {
        Rc::new(Derivation { rule, residual, premises: Vec::new() })
    }

    fn node(rule: Rule, residual: BasicResidual<Process>, premises: Vec<Rc<Derivation>>) -> Rc<Self> {
        Rc::new(Derivation { rule, residual, premises })
    }

    /// Rule names, premises first, one line per application.
    pub fn audit(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.audit_into(0, &mut out);
        out
    }

    fn audit_into(&self, indent: usize, out: &mut Vec<String>) {
        out.push(format!("{}{}", "  ".repeat(indent), self.rule));
        for p in &self.premises {
            p.audit_into(indent + 1, out);
        }
    }
}

impl fmt::Debug for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Derivation").field("rule", &self.rule).finish_non_exhaustive()
    }
}

/// One outgoing transition: canonical residual plus what is needed to keep
/// exploring from its target.
#[derive(Clone, Debug)]
pub struct Step<R> {
    pub residual: R,
    pub target: Process,
    /// Fresh channels minted on the path to the target.
    pub target_minted: usize,
    pub rule: Rule,
    pub derivation: Rc<Derivation>,
}

#[derive(Clone, Debug)]
pub struct StepSet<R> {
    /// Ordered by residual, without duplicates.
    pub steps: Vec<Step<R>>,
    /// Set when the depth budget cut the derivation search short.
    pub truncated: bool,
}

impl<R: Clone> StepSet<R> {
    pub fn residuals(&self) -> Vec<R> {
        self.steps.iter().map(|s| s.residual.clone()).collect()
    }
}

#[derive(Clone, Debug)]
enum Mode {
    All,
    /// Only receives of this exact value on this channel (plus the openings
    /// needed to close scopes around them).
    Receive(ChannelId, Value),
}

/// Derivation search over the rules.
pub(crate) struct Deriver {
    truncated: Cell<bool>,
}

impl Deriver {
    pub(crate) fn new() -> Self {
        Deriver { truncated: Cell::new(false) }
    }

    pub(crate) fn truncated(&self) -> bool {
        self.truncated.get()
    }

    pub(crate) fn derive_all(&self, p: &Process, ctx: Context<'_>) -> Result<Vec<Rc<Derivation>>> {
        self.derive(p, ctx, ctx.universe().depth_budget(), &Mode::All)
    }

    fn derive(&self, p: &Process, ctx: Context<'_>, depth: usize, mode: &Mode) -> Result<Vec<Rc<Derivation>>> {
        if depth == 0 {
            self.truncated.set(true);
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        match p.view() {
            Node::Stop => {}
            Node::Send(a, x) => {
                if matches!(mode, Mode::All) {
                    let r = BasicResidual::Acting(BasicAction::Send(a, x), Process::stop());
                    out.push(Derivation::leaf(Rule::Sending, r));
                }
            }
            Node::Receive(a, cont) => {
                let values = match mode {
                    Mode::All => ctx.enumeration(),
                    Mode::Receive(b, x) if *b == a => vec![x.clone()],
                    Mode::Receive(..) => Vec::new(),
                };
                for v in values {
                    let target = cont(v.clone());
                    let r = BasicResidual::Acting(BasicAction::Receive(a, v), target);
                    out.push(Derivation::leaf(Rule::Receiving, r));
                }
            }
            Node::Parallel(l, r) => {
                let left = self.derive(&l, ctx, depth - 1, mode)?;
                let right = self.derive(&r, ctx, depth - 1, mode)?;
                for d in &left {
                    let (rule, res) = match &d.residual {
                        BasicResidual::Acting(alpha, l2) => (
                            Rule::ActingLeft,
                            BasicResidual::Acting(alpha.clone(), Process::parallel(l2.clone(), r.clone())),
                        ),
                        BasicResidual::Opening(c, l2) => {
                            (Rule::OpeningLeft, BasicResidual::Opening(*c, Process::parallel(l2.clone(), r.clone())))
                        }
                    };
                    out.push(Derivation::node(rule, res, vec![d.clone()]));
                }
                for d in &right {
                    let (rule, res) = match &d.residual {
                        BasicResidual::Acting(alpha, r2) => (
                            Rule::ActingRight,
                            BasicResidual::Acting(alpha.clone(), Process::parallel(l.clone(), r2.clone())),
                        ),
                        BasicResidual::Opening(c, r2) => {
                            (Rule::OpeningRight, BasicResidual::Opening(*c, Process::parallel(l.clone(), r2.clone())))
                        }
                    };
                    out.push(Derivation::node(rule, res, vec![d.clone()]));
                }
                if matches!(mode, Mode::All) {
                    self.communicate(&left, &r, ctx, depth, false, &mut out)?;
                    self.communicate(&right, &l, ctx, depth, true, &mut out)?;
                }
                let openings: Vec<_> =
                    out.iter().filter(|d| matches!(d.residual, BasicResidual::Opening(..))).cloned().collect();
                self.close(&openings, ctx, depth - 1, mode, &mut out)?;
            }
            Node::NewChannel(cont) => {
                let c = ctx.fresh()?;
                let open = Derivation::leaf(Rule::ScopeOpening, BasicResidual::Opening(c, cont(c)));
                out.push(open.clone());
                self.close(&[open], ctx, depth - 1, mode, &mut out)?;
            }
        }
        Ok(out)
    }

    /// Communication: sends of one side met by matching receives of the other.
    fn communicate(
        &self,
        senders: &[Rc<Derivation>],
        other: &Process,
        ctx: Context<'_>,
        depth: usize,
        sender_on_right: bool,
        out: &mut Vec<Rc<Derivation>>,
    ) -> Result<()> {
        for s in senders {
            let BasicResidual::Acting(BasicAction::Send(a, x), s2) = &s.residual else {
                continue;
            };
            let mode = Mode::Receive(*a, x.clone());
            for r in self.derive(other, ctx, depth - 1, &mode)? {
                let BasicResidual::Acting(BasicAction::Receive(..), r2) = &r.residual else {
                    continue;
                };
                let (rule, target, premises) = if sender_on_right {
                    (Rule::CommunicationSym, Process::parallel(r2.clone(), s2.clone()), vec![r.clone(), s.clone()])
                } else {
                    (Rule::Communication, Process::parallel(s2.clone(), r2.clone()), vec![s.clone(), r.clone()])
                };
                out.push(Derivation::node(rule, BasicResidual::Acting(BasicAction::Tau, target), premises));
            }
        }
        Ok(())
    }

    /// Both closing rules, applied to each given opening.
    fn close(
        &self,
        openings: &[Rc<Derivation>],
        ctx: Context<'_>,
        depth: usize,
        mode: &Mode,
        out: &mut Vec<Rc<Derivation>>,
    ) -> Result<()> {
        for open in openings {
            let BasicResidual::Opening(c, body) = &open.residual else {
                continue;
            };
            let c = *c;
            for d in self.derive(body, ctx.child(), depth, mode)? {
                match &d.residual {
                    BasicResidual::Acting(alpha, r) if !alpha.mentions(c) => {
                        let res = BasicResidual::Acting(alpha.clone(), abstract_channel(r, c));
                        out.push(Derivation::node(Rule::ClosingAfterActing, res, vec![open.clone(), d.clone()]));
                    }
                    BasicResidual::Acting(..) => {}
                    BasicResidual::Opening(inner, r) => {
                        // Re-bind c, then move the inner opening onto c's id so
                        // the residual uses this context's next fresh channel.
                        let target = abstract_channel(r, c).swap(*inner, c);
                        let res = BasicResidual::Opening(c, target);
                        out.push(Derivation::node(Rule::ClosingAfterOpening, res, vec![open.clone(), d.clone()]));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `ν x. r[x/c]`, for `c` fresh in the surrounding context.
fn abstract_channel(r: &Process, c: ChannelId) -> Process {
    let r = r.clone();
    Process::new_channel(move |x| r.swap(c, x))
}

/// Reifies derived residuals and orders them.
pub(crate) fn canonical_steps<R: Ord + Clone>(items: Vec<(R, Process, usize, Rc<Derivation>)>) -> Vec<Step<R>> {
    let mut map: BTreeMap<R, Step<R>> = BTreeMap::new();
    for (residual, target, target_minted, derivation) in items {
        map.entry(residual.clone()).or_insert(Step {
            residual,
            target,
            target_minted,
            rule: derivation.rule,
            derivation,
        });
    }
    map.into_values().collect()
}

pub(crate) fn reify_target(p: &Process, ctx: Context<'_>, minted: usize) -> Result<CanonicalTerm> {
    let u = ctx.universe();
    reify(p, u, &u.minted(minted), u.depth_budget())
}

/// All basic transitions of `p`, ordered by canonical residual.
pub fn basic_transitions(p: &Process, ctx: Context<'_>) -> Result<StepSet<BasicResidual<CanonicalTerm>>> {
    let deriver = Deriver::new();
    let derived = deriver.derive_all(p, ctx)?;
    let mut items = Vec::with_capacity(derived.len());
    for d in derived {
        let (residual, target, minted) = match &d.residual {
            BasicResidual::Acting(a, t) => {
                (BasicResidual::Acting(a.clone(), reify_target(t, ctx, ctx.minted())?), t.clone(), ctx.minted())
            }
            BasicResidual::Opening(c, t) => {
                let m = ctx.minted() + 1;
                (BasicResidual::Opening(*c, reify_target(t, ctx, m)?), t.clone(), m)
            }
        };
        items.push((residual, target, minted, d));
    }
    Ok(StepSet { steps: canonical_steps(items), truncated: deriver.truncated() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::universe::Universe;

    fn a() -> ChannelId {
        ChannelId(0)
    }

    fn u() -> Universe {
        Universe::new([Value::Unit], 2, 3, 8).unwrap()
    }

    fn residuals(p: &Process, u: &Universe) -> Vec<BasicResidual<CanonicalTerm>> {
        basic_transitions(p, Context::new(u, 0)).unwrap().residuals()
    }

    #[test]
    fn send_has_single_sending_step() {
        let u = u();
        let set = basic_transitions(&Process::send(a(), Value::Unit), Context::new(&u, 0)).unwrap();
        assert_eq!(set.steps.len(), 1);
        assert_eq!(set.steps[0].rule, Rule::Sending);
        assert_eq!(
            set.steps[0].residual,
            BasicResidual::Acting(BasicAction::Send(a(), Value::Unit), CanonicalTerm::Stop)
        );
    }

    #[test]
    fn stop_has_no_steps() {
        assert!(residuals(&Process::stop(), &u()).is_empty());
    }

    #[test]
    fn communication_produces_tau() {
        let u = u();
        let p = Process::parallel(Process::send(a(), Value::Unit), Process::receive(a(), |_| Process::stop()));
        let rs = residuals(&p, &u);
        let tau = BasicResidual::Acting(BasicAction::Tau, CanonicalTerm::par(CanonicalTerm::Stop, CanonicalTerm::Stop));
        assert!(rs.contains(&tau));
    }

    #[test]
    fn private_communication_closes_scope() {
        let u = u();
        let p = Process::new_channel(|b| {
            Process::parallel(Process::send(b, Value::Unit), Process::receive(b, |_| Process::stop()))
        });
        let set = basic_transitions(&p, Context::new(&u, 0)).unwrap();
        let c = u.fresh(0);
        let body = CanonicalTerm::par(
            CanonicalTerm::Send(c, Value::Unit),
            crate::canonical::reify(&Process::receive(c, |_| Process::stop()), &u, &u.minted(1), u.depth_budget())
                .unwrap(),
        );
        let expected = vec![
            BasicResidual::Acting(
                BasicAction::Tau,
                CanonicalTerm::new_scope(CanonicalTerm::par(CanonicalTerm::Stop, CanonicalTerm::Stop)),
            ),
            BasicResidual::Opening(c, body),
        ];
        assert_eq!(set.residuals(), expected);
        assert_eq!(set.steps[0].rule, Rule::ClosingAfterActing);
    }

    #[test]
    fn fuse_rules() {
        let p = CanonicalTerm::Stop;
        let send = BasicAction::Send(a(), Value::Unit);
        let n = BasicResidual::Acting(BasicAction::Tau, BasicResidual::Acting(send.clone(), p.clone()));
        assert_eq!(basic_fuse(&n), vec![BasicResidual::Acting(send.clone(), p.clone())]);
        let n = BasicResidual::Opening(a(), basic_silent(p.clone()));
        assert_eq!(basic_fuse(&n), vec![BasicResidual::Opening(a(), p.clone())]);
        let recv = BasicAction::Receive(a(), Value::Unit);
        let n = BasicResidual::Acting(send, BasicResidual::Acting(recv, p));
        assert!(basic_fuse(&n).is_empty());
    }

    #[test]
    fn lift_requires_equal_labels() {
        let x = |_: &u8, _: &u8| true;
        let c = BasicResidual::Acting(BasicAction::Send(a(), Value::Unit), 0u8);
        let d = BasicResidual::Acting(BasicAction::Receive(a(), Value::Unit), 0u8);
        assert!(!basic_lift(&x, &c, &d));
        let eq = |p: &u8, q: &u8| p == q;
        assert!(basic_lift(&eq, &basic_silent(1u8), &basic_silent(1u8)));
        assert!(!basic_lift(
            &x,
            &BasicResidual::Opening(ChannelId(2), 0u8),
            &BasicResidual::Opening(ChannelId(3), 0u8)
        ));
    }
}
