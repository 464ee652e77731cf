//! First-order canonical form of process terms.
//!
//! Reification observes receive continuations extensionally over a finite
//! value set and instantiates channel binders with placeholders numbered by
//! binder depth, so alpha-equivalent terms reify to identical trees.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::process::{Node, Process};
use crate::universe::Universe;
use crate::value::{ChannelId, Value};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CanonicalTerm {
    Stop,
    Send(ChannelId, Value),
    ReceiveTable(ChannelId, BTreeMap<Value, CanonicalTerm>),
    Parallel(Box<CanonicalTerm>, Box<CanonicalTerm>),
    /// Body binds the placeholder whose level is the number of enclosing `New`s.
    New(Box<CanonicalTerm>),
    /// Depth-budget truncation.
    Cut,
}

impl CanonicalTerm {
    pub fn par(l: CanonicalTerm, r: CanonicalTerm) -> Self {
        CanonicalTerm::Parallel(Box::new(l), Box::new(r))
    }

    pub fn new_scope(body: CanonicalTerm) -> Self {
        CanonicalTerm::New(Box::new(body))
    }

    pub fn contains_cut(&self) -> bool {
        match self {
            CanonicalTerm::Cut => true,
            CanonicalTerm::Stop | CanonicalTerm::Send(..) => false,
            CanonicalTerm::ReceiveTable(_, t) => t.values().any(Self::contains_cut),
            CanonicalTerm::Parallel(l, r) => l.contains_cut() || r.contains_cut(),
            CanonicalTerm::New(b) => b.contains_cut(),
        }
    }

    /// Replaces channel `from` by `to` everywhere, table keys included.
    pub fn replace_channel(&self, from: ChannelId, to: ChannelId) -> CanonicalTerm {
        let ch = |c: ChannelId| if c == from { to } else { c };
        match self {
            CanonicalTerm::Stop | CanonicalTerm::Cut => self.clone(),
            CanonicalTerm::Send(c, v) => CanonicalTerm::Send(ch(*c), v.replace(from, to)),
            CanonicalTerm::ReceiveTable(c, table) => CanonicalTerm::ReceiveTable(
                ch(*c),
                table.iter().map(|(k, t)| (k.replace(from, to), t.replace_channel(from, to))).collect(),
            ),
            CanonicalTerm::Parallel(l, r) => {
                CanonicalTerm::par(l.replace_channel(from, to), r.replace_channel(from, to))
            }
            CanonicalTerm::New(b) => CanonicalTerm::new_scope(b.replace_channel(from, to)),
        }
    }

    /// Re-reads a canonical term as a process.
    ///
    /// Receives answer values outside their table with `Stop`; on the table's
    /// own keys the result reifies back to `self`.
    pub fn to_process(&self) -> Process {
        self.to_process_at(0)
    }

    fn to_process_at(&self, level: usize) -> Process {
        match self {
            CanonicalTerm::Stop | CanonicalTerm::Cut => Process::stop(),
            CanonicalTerm::Send(c, v) => Process::send(*c, v.clone()),
            CanonicalTerm::ReceiveTable(c, table) => {
                let table = table.clone();
                Process::receive(*c, move |v| {
                    table.get(&v).map(|t| t.to_process_at(level)).unwrap_or_else(Process::stop)
                })
            }
            CanonicalTerm::Parallel(l, r) => Process::parallel(l.to_process_at(level), r.to_process_at(level)),
            CanonicalTerm::New(body) => {
                let body = (**body).clone();
                Process::new_channel(move |c| {
                    body.replace_channel(ChannelId::placeholder(level), c).to_process_at(level + 1)
                })
            }
        }
    }
}

impl fmt::Display for CanonicalTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::pretty(self))
    }
}

/// Reifies `p` to at most `depth` constructor layers.
///
/// Receive continuations are applied to every value of the universe's
/// enumeration set extended by `minted` and by the placeholders of enclosing
/// binders. Leaves need one layer, compound nodes two; anything deeper
/// becomes [`CanonicalTerm::Cut`].
pub fn reify(p: &Process, universe: &Universe, minted: &BTreeSet<ChannelId>, depth: usize) -> Result<CanonicalTerm> {
    let base = universe.enumeration(minted);
    reify_at(p, universe, &base, 0, depth)
}

fn reify_at(p: &Process, universe: &Universe, base: &[Value], level: usize, depth: usize) -> Result<CanonicalTerm> {
    if depth == 0 {
        return Ok(CanonicalTerm::Cut);
    }
    let node = p.view();
    if depth == 1 && matches!(node, Node::Receive(..) | Node::Parallel(..) | Node::NewChannel(_)) {
        return Ok(CanonicalTerm::Cut);
    }
    Ok(match node {
        Node::Stop => CanonicalTerm::Stop,
        Node::Send(c, v) => CanonicalTerm::Send(c, v),
        Node::Receive(c, cont) => {
            let mut table = BTreeMap::new();
            let placeholders = (0..level).map(|l| Value::Chan(ChannelId::placeholder(l)));
            for v in base.iter().cloned().chain(placeholders) {
                let t = reify_at(&cont(v.clone()), universe, base, level, depth - 1)?;
                table.insert(v, t);
            }
            CanonicalTerm::ReceiveTable(c, table)
        }
        Node::Parallel(l, r) => CanonicalTerm::par(
            reify_at(&l, universe, base, level, depth - 1)?,
            reify_at(&r, universe, base, level, depth - 1)?,
        ),
        Node::NewChannel(cont) => {
            if level >= universe.fresh_budget() {
                return Err(Error::BudgetExceeded { budget: universe.fresh_budget() });
            }
            let body = cont(ChannelId::placeholder(level));
            CanonicalTerm::new_scope(reify_at(&body, universe, base, level + 1, depth - 1)?)
        }
    })
}

/// Alpha-equivalence, decided as equality of full-budget reifications.
pub fn alpha_equal(p: &Process, q: &Process, universe: &Universe) -> Result<bool> {
    let none = BTreeSet::new();
    let d = universe.depth_budget();
    Ok(reify(p, universe, &none, d)? == reify(q, universe, &none, d)?)
}

/// Channels occurring free in `t` (placeholders and table keys excluded).
pub fn free_channels(t: &CanonicalTerm) -> BTreeSet<ChannelId> {
    let mut out = BTreeSet::new();
    collect_free(t, &mut out);
    out.retain(|c| !c.is_placeholder());
    out
}

fn collect_free(t: &CanonicalTerm, out: &mut BTreeSet<ChannelId>) {
    match t {
        CanonicalTerm::Stop | CanonicalTerm::Cut => {}
        CanonicalTerm::Send(c, v) => {
            out.insert(*c);
            v.channels(out);
        }
        CanonicalTerm::ReceiveTable(c, table) => {
            out.insert(*c);
            for sub in table.values() {
                collect_free(sub, out);
            }
        }
        CanonicalTerm::Parallel(l, r) => {
            collect_free(l, out);
            collect_free(r, out);
        }
        CanonicalTerm::New(b) => collect_free(b, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::replicate;

    fn a() -> ChannelId {
        ChannelId(0)
    }

    fn b() -> ChannelId {
        ChannelId(1)
    }

    fn unit_universe(pool: u32) -> Universe {
        Universe::new([Value::Unit], pool, 3, 6).unwrap()
    }

    #[test]
    fn stop_reifies_to_stop() {
        let t = reify(&Process::stop(), &unit_universe(2), &BTreeSet::new(), 1).unwrap();
        assert_eq!(t, CanonicalTerm::Stop);
    }

    #[test]
    fn receive_applies_continuation_to_each_enumeration_value() {
        let u = unit_universe(1);
        let p = Process::receive(a(), |_| Process::stop());
        let t = reify(&p, &u, &BTreeSet::new(), 2).unwrap();
        let expected = CanonicalTerm::ReceiveTable(
            a(),
            BTreeMap::from([(Value::Unit, CanonicalTerm::Stop), (Value::Chan(ChannelId(0)), CanonicalTerm::Stop)]),
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn new_channel_uses_level_zero_placeholder() {
        let p = Process::new_channel(|c| Process::send(c, Value::Unit));
        let t = reify(&p, &unit_universe(2), &BTreeSet::new(), 2).unwrap();
        assert_eq!(t, CanonicalTerm::new_scope(CanonicalTerm::Send(ChannelId::placeholder(0), Value::Unit)));
    }

    #[test]
    fn replicate_unrolls_on_demand() {
        let u = unit_universe(2);
        let none = BTreeSet::new();
        let t = reify(&replicate(Process::stop()), &u, &none, 3).unwrap();
        assert_eq!(
            t,
            CanonicalTerm::par(CanonicalTerm::Stop, CanonicalTerm::par(CanonicalTerm::Stop, CanonicalTerm::Cut))
        );
        let t = reify(&replicate(Process::send(a(), Value::Unit)), &u, &none, 2).unwrap();
        assert_eq!(t, CanonicalTerm::par(CanonicalTerm::Send(a(), Value::Unit), CanonicalTerm::Cut));
    }

    #[test]
    fn too_many_nested_binders_exceed_budget() {
        let u = Universe::new([Value::Unit], 1, 1, 8).unwrap();
        let p = Process::new_channel(|_| Process::new_channel(|_| Process::stop()));
        let err = reify(&p, &u, &BTreeSet::new(), 8).unwrap_err();
        assert_eq!(err, Error::BudgetExceeded { budget: 1 });
    }

    #[test]
    fn alpha_equality_ignores_bound_names() {
        let u = unit_universe(2);
        let p = Process::new_channel(|x| Process::send(x, Value::Unit));
        let q = Process::new_channel(|y| Process::send(y, Value::Unit));
        assert!(alpha_equal(&p, &q, &u).unwrap());
        let p = Process::send(a(), Value::Unit);
        let q = Process::send(b(), Value::Unit);
        assert!(!alpha_equal(&p, &q, &u).unwrap());
    }

    #[test]
    fn free_channels_skip_binders() {
        assert!(free_channels(&CanonicalTerm::Stop).is_empty());
        let t = CanonicalTerm::Send(a(), Value::Chan(b()));
        assert_eq!(free_channels(&t), BTreeSet::from([a(), b()]));
        let t = CanonicalTerm::new_scope(CanonicalTerm::Send(ChannelId::placeholder(0), Value::Unit));
        assert!(free_channels(&t).is_empty());
    }

    #[test]
    fn reified_terms_reread_identically() {
        let u = unit_universe(2);
        let none = BTreeSet::new();
        let p = Process::new_channel(|c| {
            Process::parallel(
                Process::send(c, Value::Chan(ChannelId(0))),
                Process::receive(c, move |v| match v.as_chan() {
                    Some(d) => Process::send(d, Value::Chan(c)),
                    None => Process::stop(),
                }),
            )
        });
        let t = reify(&p, &u, &none, 6).unwrap();
        assert_eq!(reify(&t.to_process(), &u, &none, 6).unwrap(), t);
    }
}
