//! Simulation checks and bisimilarity verdicts over explored graphs.
//!
//! The greatest bisimulation between the states of two graphs is computed
//! by refinement from the full relation. Each round removes the pairs with
//! a challenge that no answer matches under the previous relation, so the
//! round in which a pair is removed is the length of the shortest play
//! that tells its states apart.

use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::lts::{explore, saturate, Limits, LtsGraph, StateId, System};
use crate::process::Process;
use crate::residual::ResidualFamily;
use crate::universe::Universe;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    /// Strong challenges, strong answers.
    Strong,
    /// Weak challenges, weak answers.
    Weak,
    /// Strong challenges, weak answers.
    Mixed,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Strong => "strong",
            Mode::Weak => "weak",
            Mode::Mixed => "mixed",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Exact,
    Bounded(usize),
}

/// Outgoing edges of one graph, strong or weak.
#[derive(Clone, Copy)]
pub struct Moves<'a, F: ResidualFamily> {
    pub graph: &'a LtsGraph<F>,
    pub edges: &'a [Vec<F::Of<StateId>>],
}

impl<'a, F: ResidualFamily> Moves<'a, F> {
    pub fn strong(graph: &'a LtsGraph<F>) -> Self {
        Moves { graph, edges: graph.all_edges() }
    }

    pub fn weak(graph: &'a LtsGraph<F>, weak: &'a [Vec<F::Of<StateId>>]) -> Self {
        Moves { graph, edges: weak }
    }

    pub fn of(&self, s: StateId) -> &'a [F::Of<StateId>] {
        &self.edges[s]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation<R> {
    pub left: StateId,
    pub right: StateId,
    pub challenge: R,
}

/// Whether every challenge of a related pair is answered by a residual
/// related under the lifted relation. Returns the first violation.
pub fn is_simulation<F: ResidualFamily>(
    relation: &[(StateId, StateId)],
    challenger: Moves<'_, F>,
    answerer: Moves<'_, F>,
) -> Result<Option<Violation<F::Of<StateId>>>> {
    let touched = relation
        .iter()
        .filter(|(p, q)| !challenger.graph.is_complete_state(*p) || !answerer.graph.is_complete_state(*q))
        .count();
    if touched > 0 {
        return Err(Error::IncompleteStates { count: touched });
    }
    let mut sorted = relation.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let holds = |a: &StateId, b: &StateId| sorted.binary_search(&(*a, *b)).is_ok();
    for &(p, q) in &sorted {
        for c in challenger.of(p) {
            if !answerer.of(q).iter().any(|d| F::lift(&holds, c, d)) {
                return Ok(Some(Violation { left: p, right: q, challenge: c.clone() }));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// A winning strategy for the challenger from the pair `(left, right)`.
///
/// The challenger moves `challenge` on `side`; `answers` lists every
/// label-matching move of the other side, each with the play that wins from
/// the resulting pair. A node without answers is a challenge that cannot be
/// matched at all.
#[derive(Clone, Debug)]
pub struct Play<R> {
    pub left: StateId,
    pub right: StateId,
    pub side: Side,
    pub challenge: R,
    pub answers: Vec<(R, Rc<Play<R>>)>,
}

impl<R> Play<R> {
    /// Number of challenges along the longest branch.
    pub fn depth(&self) -> usize {
        1 + self.answers.iter().map(|(_, p)| p.depth()).max().unwrap_or(0)
    }
}

impl<R: fmt::Display> Play<R> {
    fn write(&self, f: &mut fmt::Formatter<'_>, indent: usize) -> fmt::Result {
        let pad = "  ".repeat(indent);
        let side = match self.side {
            Side::Left => "left",
            Side::Right => "right",
        };
        writeln!(f, "{pad}at ({}, {}) {side} plays {}", self.left, self.right, self.challenge)?;
        if self.answers.is_empty() {
            writeln!(f, "{pad}  no answer")?;
        }
        for (answer, sub) in &self.answers {
            writeln!(f, "{pad}  answer {answer}")?;
            sub.write(f, indent + 2)?;
        }
        Ok(())
    }
}

impl<R: fmt::Display> fmt::Display for Play<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

#[derive(Clone, Debug)]
pub enum Verdict<R> {
    /// The witness is the greatest bisimulation between the two graphs.
    Bisimilar {
        witness: Vec<(StateId, StateId)>,
    },
    NotBisimilar {
        play: Rc<Play<R>>,
    },
    /// No difference within this many rounds.
    BoundedBisimilar(usize),
    Inconclusive(String),
}

impl<R> Verdict<R> {
    pub fn name(&self) -> String {
        match self {
            Verdict::Bisimilar { .. } => "bisimilar".into(),
            Verdict::NotBisimilar { .. } => "not bisimilar".into(),
            Verdict::BoundedBisimilar(k) => format!("bisimilar up to {k} rounds"),
            Verdict::Inconclusive(reason) => format!("inconclusive: {reason}"),
        }
    }

    /// True for `Bisimilar` and `BoundedBisimilar`.
    pub fn related(&self) -> Option<bool> {
        match self {
            Verdict::Bisimilar { .. } | Verdict::BoundedBisimilar(_) => Some(true),
            Verdict::NotBisimilar { .. } => Some(false),
            Verdict::Inconclusive(_) => None,
        }
    }
}

/// Both graphs with the edges each mode draws on.
pub struct Game<F: ResidualFamily> {
    pub left: LtsGraph<F>,
    pub right: LtsGraph<F>,
    left_weak: Vec<Vec<F::Of<StateId>>>,
    right_weak: Vec<Vec<F::Of<StateId>>>,
}

impl<F: ResidualFamily> Game<F> {
    pub fn new(left: LtsGraph<F>, right: LtsGraph<F>) -> Self {
        let left_weak = saturate(&left);
        let right_weak = saturate(&right);
        Game { left, right, left_weak, right_weak }
    }

    pub fn graph(&self, side: Side) -> &LtsGraph<F> {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn weak_edges(&self, side: Side) -> &[Vec<F::Of<StateId>>] {
        match side {
            Side::Left => &self.left_weak,
            Side::Right => &self.right_weak,
        }
    }

    pub fn challenges(&self, mode: Mode, side: Side) -> Moves<'_, F> {
        match mode {
            Mode::Weak => Moves::weak(self.graph(side), self.weak_edges(side)),
            Mode::Strong | Mode::Mixed => Moves::strong(self.graph(side)),
        }
    }

    pub fn answers(&self, mode: Mode, side: Side) -> Moves<'_, F> {
        match mode {
            Mode::Strong => Moves::strong(self.graph(side)),
            Mode::Weak | Mode::Mixed => Moves::weak(self.graph(side), self.weak_edges(side)),
        }
    }

    /// States whose moves in this mode may be missing from the graph.
    fn unsettled(&self, mode: Mode, side: Side) -> Vec<bool> {
        let g = self.graph(side);
        match mode {
            Mode::Strong => (0..g.len()).map(|s| !g.is_complete_state(s)).collect(),
            Mode::Weak | Mode::Mixed => g.reaches_incomplete(),
        }
    }

    /// Runs at most `rounds` refinement rounds (all of them when `None`).
    /// Returns the removal round of each pair, `None` for pairs still related.
    pub fn refine(&self, mode: Mode, rounds: Option<usize>) -> Refinement {
        let (n, m) = (self.left.len(), self.right.len());
        let mut removed: Vec<Option<usize>> = vec![None; n * m];
        let unsettled_l = self.unsettled(mode, Side::Left);
        let unsettled_r = self.unsettled(mode, Side::Right);
        let mut round = 0;
        loop {
            if rounds.is_some_and(|k| round >= k) {
                break;
            }
            round += 1;
            let related = |p: &StateId, q: &StateId| removed[p * m + q].is_none();
            let mut newly = Vec::new();
            for p in 0..n {
                for q in 0..m {
                    if !related(&p, &q) || unsettled_l[p] || unsettled_r[q] {
                        continue;
                    }
                    if self.unmatched(mode, Side::Left, p, q, &related).is_some()
                        || self.unmatched(mode, Side::Right, p, q, &related).is_some()
                    {
                        newly.push(p * m + q);
                    }
                }
            }
            if newly.is_empty() {
                break;
            }
            for i in newly {
                removed[i] = Some(round);
            }
        }
        Refinement { width: m, removed, rounds: round }
    }

    /// A challenge from `side` at `(p, q)` with no answer related under
    /// `related`.
    fn unmatched(
        &self,
        mode: Mode,
        side: Side,
        p: StateId,
        q: StateId,
        related: &dyn Fn(&StateId, &StateId) -> bool,
    ) -> Option<F::Of<StateId>> {
        let (me, them) = oriented(side, p, q);
        let oriented_rel = |a: &StateId, b: &StateId| match side {
            Side::Left => related(a, b),
            Side::Right => related(b, a),
        };
        let answers = self.answers(mode, side.other());
        self.challenges(mode, side)
            .of(me)
            .iter()
            .find(|c| !answers.of(them).iter().any(|d| F::lift(&oriented_rel, c, d)))
            .cloned()
    }

    /// A distinguishing play for a pair removed by `refinement`.
    pub fn play(
        &self,
        mode: Mode,
        refinement: &Refinement,
        p: StateId,
        q: StateId,
    ) -> Option<Rc<Play<F::Of<StateId>>>> {
        let mut memo = BTreeMap::new();
        self.play_memo(mode, refinement, p, q, &mut memo)
    }

    fn play_memo(
        &self,
        mode: Mode,
        refinement: &Refinement,
        p: StateId,
        q: StateId,
        memo: &mut BTreeMap<(StateId, StateId), Rc<Play<F::Of<StateId>>>>,
    ) -> Option<Rc<Play<F::Of<StateId>>>> {
        if let Some(play) = memo.get(&(p, q)) {
            return Some(play.clone());
        }
        let round = refinement.removed_at(p, q)?;
        let before = |a: &StateId, b: &StateId| refinement.removed_at(*a, *b).is_none_or(|r| r >= round);
        let (side, challenge) = [Side::Left, Side::Right]
            .into_iter()
            .find_map(|side| self.unmatched(mode, side, p, q, &before).map(|c| (side, c)))?;
        let (_, them) = oriented(side, p, q);
        let always = |_: &StateId, _: &StateId| true;
        let mut answers = Vec::new();
        for d in self.answers(mode, side.other()).of(them) {
            if !F::lift(&always, &challenge, d) {
                continue;
            }
            let (a, b) = match side {
                Side::Left => (*F::target(&challenge), *F::target(d)),
                Side::Right => (*F::target(d), *F::target(&challenge)),
            };
            answers.push((d.clone(), self.play_memo(mode, refinement, a, b, memo)?));
        }
        let play = Rc::new(Play { left: p, right: q, side, challenge, answers });
        memo.insert((p, q), play.clone());
        Some(play)
    }

    /// Checks a play move by move: each challenge is a move of its state,
    /// the answers are exactly the label-matching moves of the other state,
    /// and each subplay starts from the pair the answer leads to.
    pub fn validate_play(&self, mode: Mode, play: &Play<F::Of<StateId>>) -> std::result::Result<(), String> {
        let (me, them) = oriented(play.side, play.left, play.right);
        if !self.challenges(mode, play.side).of(me).contains(&play.challenge) {
            return Err(format!("{:?} is not a move of state {me}", play.challenge));
        }
        let always = |_: &StateId, _: &StateId| true;
        let mut expected: Vec<_> = self
            .answers(mode, play.side.other())
            .of(them)
            .iter()
            .filter(|d| F::lift(&always, &play.challenge, d))
            .cloned()
            .collect();
        let mut given: Vec<_> = play.answers.iter().map(|(d, _)| d.clone()).collect();
        expected.sort();
        given.sort();
        if expected != given {
            return Err(format!("answers at ({}, {}) are incomplete", play.left, play.right));
        }
        for (d, sub) in &play.answers {
            let (a, b) = match play.side {
                Side::Left => (*F::target(&play.challenge), *F::target(d)),
                Side::Right => (*F::target(d), *F::target(&play.challenge)),
            };
            if (sub.left, sub.right) != (a, b) {
                return Err(format!("subplay after {d:?} starts at the wrong pair"));
            }
            self.validate_play(mode, sub)?;
        }
        Ok(())
    }

    pub fn verdict(&self, mode: Mode, method: Method) -> Verdict<F::Of<StateId>> {
        let exact = method == Method::Exact;
        if exact && (!self.left.is_complete() || !self.right.is_complete()) {
            return Verdict::Inconclusive("incomplete exploration".into());
        }
        let rounds = match method {
            Method::Exact => None,
            Method::Bounded(k) => Some(k),
        };
        let refinement = self.refine(mode, rounds);
        match self.play(mode, &refinement, 0, 0) {
            Some(play) => Verdict::NotBisimilar { play },
            None if exact => Verdict::Bisimilar { witness: refinement.related_pairs() },
            None => Verdict::BoundedBisimilar(rounds.unwrap_or(0)),
        }
    }
}

fn oriented(side: Side, p: StateId, q: StateId) -> (StateId, StateId) {
    match side {
        Side::Left => (p, q),
        Side::Right => (q, p),
    }
}

/// Outcome of relation refinement over a pair of graphs.
#[derive(Clone, Debug)]
pub struct Refinement {
    width: usize,
    removed: Vec<Option<usize>>,
    rounds: usize,
}

impl Refinement {
    pub fn removed_at(&self, p: StateId, q: StateId) -> Option<usize> {
        self.removed[p * self.width + q]
    }

    /// Rounds run, including the final one that removed nothing.
    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn related_pairs(&self) -> Vec<(StateId, StateId)> {
        (0..self.removed.len())
            .filter(|&i| self.removed[i].is_none())
            .map(|i| (i / self.width, i % self.width))
            .collect()
    }
}

/// Explores both processes and decides bisimilarity of their initial states.
pub fn bisimilarity<F: System>(
    p: &Process,
    q: &Process,
    u: &Universe,
    limits: Limits,
    mode: Mode,
    method: Method,
) -> Result<(Verdict<F::Of<StateId>>, Game<F>)> {
    let game = Game::new(explore::<F>(p, u, limits)?, explore::<F>(q, u, limits)?);
    Ok((game.verdict(mode, method), game))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basic::Basic;
    use crate::proper::Proper;
    use crate::value::{ChannelId, Value};

    fn u() -> Universe {
        Universe::new([Value::Unit], 2, 3, 10).unwrap()
    }

    fn a() -> ChannelId {
        ChannelId(0)
    }

    fn b() -> ChannelId {
        ChannelId(1)
    }

    #[test]
    fn reflexive_with_identity_inside_the_witness() {
        let p = Process::parallel(Process::send(a(), Value::Unit), Process::receive(a(), |_| Process::stop()));
        let (v, game) = bisimilarity::<Basic>(&p, &p, &u(), Limits::default(), Mode::Strong, Method::Exact).unwrap();
        let Verdict::Bisimilar { witness } = v else { panic!("{}", v.name()) };
        for s in 0..game.left.len() {
            assert!(witness.contains(&(s, s)));
        }
    }

    #[test]
    fn parallel_sends_commute() {
        let p = Process::parallel(Process::send(a(), Value::Unit), Process::send(b(), Value::Unit));
        let q = Process::parallel(Process::send(b(), Value::Unit), Process::send(a(), Value::Unit));
        let (v, _) = bisimilarity::<Basic>(&p, &q, &u(), Limits::default(), Mode::Strong, Method::Exact).unwrap();
        assert_eq!(v.related(), Some(true));
    }

    #[test]
    fn send_versus_stop_is_not_a_simulation() {
        let u = u();
        let g1 = explore::<Basic>(&Process::send(a(), Value::Unit), &u, Limits::default()).unwrap();
        let g2 = explore::<Basic>(&Process::stop(), &u, Limits::default()).unwrap();
        let v = is_simulation(&[(0, 0)], Moves::strong(&g1), Moves::strong(&g2)).unwrap().unwrap();
        assert_eq!(v.challenge, g1.edges(0)[0]);
        assert!(is_simulation(&[], Moves::strong(&g1), Moves::strong(&g2)).unwrap().is_none());
    }

    #[test]
    fn plays_replay_and_have_minimal_depth() {
        // a<()> | b<()> versus a<()> | a<()>: differ after one move
        let p = Process::parallel(Process::send(a(), Value::Unit), Process::send(b(), Value::Unit));
        let q = Process::parallel(Process::send(a(), Value::Unit), Process::send(a(), Value::Unit));
        let (v, game) = bisimilarity::<Basic>(&p, &q, &u(), Limits::default(), Mode::Strong, Method::Exact).unwrap();
        let Verdict::NotBisimilar { play } = v else { panic!() };
        game.validate_play(Mode::Strong, &play).unwrap();
        assert_eq!(play.depth(), 1);
    }

    #[test]
    fn private_forward_is_weakly_but_not_strongly_a_plain_send_under_proper() {
        let left = Process::new_channel(|c| {
            Process::parallel(Process::send(c, Value::Unit), Process::receive(c, |y| Process::send(ChannelId(0), y)))
        });
        let right = Process::new_channel(|_| Process::send(ChannelId(0), Value::Unit));
        let u = u();
        let run = |mode| bisimilarity::<Proper>(&left, &right, &u, Limits::default(), mode, Method::Exact).unwrap().0;
        assert_eq!(run(Mode::Strong).related(), Some(false));
        assert_eq!(run(Mode::Weak).related(), Some(true));
        assert_eq!(run(Mode::Mixed).related(), Some(true));
    }

    #[test]
    fn exact_on_infinite_state_is_inconclusive() {
        let p = crate::process::replicate(Process::send(a(), Value::Unit));
        let limits = Limits { max_states: 20, max_depth: 64 };
        let (v, _) = bisimilarity::<Basic>(&p, &p, &u(), limits, Mode::Strong, Method::Exact).unwrap();
        assert!(matches!(v, Verdict::Inconclusive(_)));
        let (v, _) = bisimilarity::<Basic>(&p, &p, &u(), limits, Mode::Strong, Method::Bounded(3)).unwrap();
        assert!(matches!(v, Verdict::BoundedBisimilar(3)));
    }
}
