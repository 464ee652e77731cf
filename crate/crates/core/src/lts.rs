//! Explored transition graphs and their weak saturation.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::algebra::ShapeSpace;
use crate::basic::{basic_transitions, Basic, StepSet};
use crate::canonical::{reify, CanonicalTerm};
use crate::context::Context;
use crate::error::{Error, Result};
use crate::process::Process;
use crate::proper::{proper_transitions, Proper};
use crate::residual::ResidualFamily;
use crate::universe::Universe;

pub type StateId = usize;

/// A transition system: a residual family plus its transition function.
pub trait System: ShapeSpace {
    fn name() -> &'static str;

    fn transitions(p: &Process, ctx: Context<'_>) -> Result<StepSet<Self::Of<CanonicalTerm>>>;
}

impl System for Basic {
    fn name() -> &'static str {
        "basic"
    }

    fn transitions(p: &Process, ctx: Context<'_>) -> Result<StepSet<Self::Of<CanonicalTerm>>> {
        basic_transitions(p, ctx)
    }
}

impl System for Proper {
    fn name() -> &'static str {
        "proper"
    }

    fn transitions(p: &Process, ctx: Context<'_>) -> Result<StepSet<Self::Of<CanonicalTerm>>> {
        proper_transitions(p, ctx)
    }
}

/// A canonical term together with the number of fresh channels minted on
/// the way to it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State {
    pub term: CanonicalTerm,
    pub minted: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_states: usize,
    pub max_depth: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_states: 2000, max_depth: 64 }
    }
}

/// Breadth-first exploration result. State 0 is the initial state; edge
/// residuals carry target state ids.
#[derive(Debug)]
pub struct LtsGraph<F: ResidualFamily> {
    states: Vec<State>,
    processes: Vec<Process>,
    edges: Vec<Vec<F::Of<StateId>>>,
    complete: Vec<bool>,
    limit_reached: bool,
}

impl<F: ResidualFamily> Clone for LtsGraph<F> {
    fn clone(&self) -> Self {
        LtsGraph {
            states: self.states.clone(),
            processes: self.processes.clone(),
            edges: self.edges.clone(),
            complete: self.complete.clone(),
            limit_reached: self.limit_reached,
        }
    }
}

impl<F: ResidualFamily> LtsGraph<F> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, id: StateId) -> &State {
        &self.states[id]
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn process(&self, id: StateId) -> &Process {
        &self.processes[id]
    }

    pub fn edges(&self, id: StateId) -> &[F::Of<StateId>] {
        &self.edges[id]
    }

    pub fn all_edges(&self) -> &[Vec<F::Of<StateId>>] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn is_complete_state(&self, id: StateId) -> bool {
        self.complete[id]
    }

    pub fn is_complete(&self) -> bool {
        self.complete.iter().all(|&c| c)
    }

    pub fn incomplete_count(&self) -> usize {
        self.complete.iter().filter(|&&c| !c).count()
    }

    pub fn limit_reached(&self) -> bool {
        self.limit_reached
    }

    /// Largest number of fresh channels minted in any state.
    pub fn max_minted(&self) -> usize {
        self.states.iter().map(|s| s.minted).max().unwrap_or(0)
    }

    /// States from which an incomplete state is reachable (including the
    /// incomplete states themselves).
    pub fn reaches_incomplete(&self) -> Vec<bool> {
        let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); self.len()];
        for (s, es) in self.edges.iter().enumerate() {
            for e in es {
                preds[*F::target(e)].push(s);
            }
        }
        let mut mark: Vec<bool> = self.complete.iter().map(|c| !c).collect();
        let mut queue: VecDeque<StateId> = (0..self.len()).filter(|&s| mark[s]).collect();
        while let Some(s) = queue.pop_front() {
            for &p in &preds[s] {
                if !mark[p] {
                    mark[p] = true;
                    queue.push_back(p);
                }
            }
        }
        mark
    }
}

/// Explores the states reachable from `p`.
///
/// A state is incomplete when its term was cut by the depth budget, its
/// derivation search was truncated, it lies at `max_depth`, or one of its
/// targets did not fit under `max_states`. Hitting a limit is not an error.
pub fn explore<F: System>(p: &Process, u: &Universe, limits: Limits) -> Result<LtsGraph<F>> {
    let root = State { term: reify(p, u, &u.minted(0), u.depth_budget())?, minted: 0 };
    let mut g = LtsGraph::<F> {
        states: vec![root.clone()],
        processes: vec![p.clone()],
        edges: vec![Vec::new()],
        complete: vec![true],
        limit_reached: false,
    };
    let mut index = BTreeMap::from([(root, 0)]);
    let mut depth = vec![0usize];
    let mut queue = VecDeque::from([0]);
    while let Some(s) = queue.pop_front() {
        if g.states[s].term.contains_cut() {
            g.complete[s] = false;
        }
        if depth[s] >= limits.max_depth {
            g.complete[s] = false;
            g.limit_reached = true;
            continue;
        }
        let steps = F::transitions(&g.processes[s], Context::new(u, g.states[s].minted))?;
        if steps.truncated {
            g.complete[s] = false;
        }
        let mut out = BTreeSet::new();
        for step in steps.steps {
            let target = State { term: F::target(&step.residual).clone(), minted: step.target_minted };
            let id = match index.get(&target) {
                Some(&id) => id,
                None if g.states.len() >= limits.max_states => {
                    g.complete[s] = false;
                    g.limit_reached = true;
                    continue;
                }
                None => {
                    let id = g.states.len();
                    index.insert(target.clone(), id);
                    g.states.push(target);
                    g.processes.push(step.target.clone());
                    g.edges.push(Vec::new());
                    g.complete.push(true);
                    depth.push(depth[s] + 1);
                    queue.push_back(id);
                    id
                }
            };
            out.insert(F::map(&step.residual, |_| id));
        }
        g.edges[s] = out.into_iter().collect();
    }
    Ok(g)
}

/// Weak edges per state: the least set containing the strong edges and the
/// silent residual of the state, closed under compound transitions.
pub fn weak_saturate<F: ResidualFamily>(g: &LtsGraph<F>) -> Result<Vec<Vec<F::Of<StateId>>>> {
    if !g.is_complete() {
        return Err(Error::IncompleteStates { count: g.incomplete_count() });
    }
    Ok(saturate(g))
}

/// [`weak_saturate`] without the completeness check; on an incomplete graph
/// the result under-approximates the weak edges of states that can reach
/// an incomplete state.
pub fn saturate<F: ResidualFamily>(g: &LtsGraph<F>) -> Vec<Vec<F::Of<StateId>>> {
    let mut weak: Vec<BTreeSet<F::Of<StateId>>> =
        (0..g.len()).map(|s| g.edges(s).iter().cloned().chain([F::silent(s)]).collect()).collect();
    loop {
        let mut changed = false;
        for s in 0..g.len() {
            let mut new = Vec::new();
            for c in &weak[s] {
                let shape = F::shape(c);
                for d in &weak[*F::target(c)] {
                    let nested = F::from_parts(shape.clone(), d.clone());
                    for e in F::fuse(&nested) {
                        if !weak[s].contains(&e) {
                            new.push(e);
                        }
                    }
                }
            }
            if !new.is_empty() {
                changed = true;
                weak[s].extend(new);
            }
        }
        if !changed {
            break;
        }
    }
    weak.into_iter().map(|w| w.into_iter().collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basic::{BasicAction, BasicResidual};
    use crate::value::{ChannelId, Value};

    fn u1() -> Universe {
        Universe::new([Value::Unit], 1, 3, 8).unwrap()
    }

    #[test]
    fn stop_is_a_single_complete_state() {
        let g = explore::<Basic>(&Process::stop(), &u1(), Limits::default()).unwrap();
        assert_eq!((g.len(), g.edge_count(), g.is_complete()), (1, 0, true));
    }

    #[test]
    fn send_receive_pair_has_four_states() {
        let a = ChannelId(0);
        let p = Process::parallel(Process::send(a, Value::Unit), Process::receive(a, |_| Process::stop()));
        let g = explore::<Basic>(&p, &u1(), Limits::default()).unwrap();
        assert_eq!(g.len(), 4);
        assert!(g.is_complete());
    }

    #[test]
    fn replicated_send_hits_the_state_limit() {
        let p = crate::process::replicate(Process::send(ChannelId(0), Value::Unit));
        let g = explore::<Basic>(&p, &u1(), Limits { max_states: 10, max_depth: 64 }).unwrap();
        assert!(g.limit_reached());
        assert!(!g.is_complete());
        assert!(matches!(weak_saturate(&g), Err(Error::IncompleteStates { .. })));
    }

    #[test]
    fn weak_tau_edges_are_the_tau_closure() {
        let a = ChannelId(0);
        let p = Process::parallel(Process::send(a, Value::Unit), Process::receive(a, |_| Process::stop()));
        let g = explore::<Basic>(&p, &u1(), Limits::default()).unwrap();
        let w = weak_saturate(&g).unwrap();
        let taus: Vec<_> = w[0].iter().filter(|r| r.is_silent()).cloned().collect();
        let done = g.edges(0).iter().find(|r| r.is_silent()).unwrap().target();
        assert_eq!(taus, {
            let mut v =
                vec![BasicResidual::Acting(BasicAction::Tau, 0), BasicResidual::Acting(BasicAction::Tau, *done)];
            v.sort();
            v
        });
    }
}
