//! Relations over finite carriers and executable checks of the residual
//! axioms.
//!
//! A residual structure supplies lifting, silence and fusion. The checkers
//! evaluate each axiom as an equality (or inclusion) of relations over an
//! explicit tower of carriers: terms, residuals of terms, residuals of
//! residuals, and one level more for associativity.

mod axioms;
pub mod mutants;
mod relation;

use std::cell::OnceCell;
use std::collections::BTreeSet;
use std::rc::Rc;

use crate::basic::{Basic, BasicAction, BasicShape};
use crate::proper::{Proper, ProperAction, ProperShape};
use crate::residual::{Element, ResidualFamily};
use crate::universe::Universe;

pub use axioms::{
    check_monad_axioms, check_normal_silent_axioms, check_relator_axioms, derive_fuse, direct_fuse, replay, samples,
    Axiom, AxiomResult, Counterexample, FuseRelations, Report,
};
pub use relation::{Carrier, Relation};

/// Residuals of `T` under the structure's family.
pub type Of<S, T> = <<S as ResidualStructure>::Family as ResidualFamily>::Of<T>;

/// Lifting, silence and fusion, defaulting to the family's own operations.
///
/// Lifting is only ever evaluated on pairs of residuals of equal shape whose
/// targets are related; structures that relate residuals of different
/// shapes are outside what the checkers can see.
pub trait ResidualStructure {
    type Family: ShapeSpace;

    fn name(&self) -> String;

    fn lift<A: Element, B: Element>(&self, x: &dyn Fn(&A, &B) -> bool, c: &Of<Self, A>, d: &Of<Self, B>) -> bool {
        Self::Family::lift(x, c, d)
    }

    fn silent<T: Element>(&self, t: &T) -> Vec<Of<Self, T>> {
        vec![Self::Family::silent(t.clone())]
    }

    fn fuse<T: Element>(&self, n: &Of<Self, Of<Self, T>>) -> Vec<Of<Self, T>> {
        Self::Family::fuse(n)
    }
}

impl ResidualStructure for Basic {
    type Family = Basic;

    fn name(&self) -> String {
        "basic".into()
    }
}

impl ResidualStructure for Proper {
    type Family = Proper;

    fn name(&self) -> String {
        "proper".into()
    }
}

/// Families whose shapes over a universe can be enumerated.
pub trait ShapeSpace: ResidualFamily {
    /// Every shape over the pool, the data values and the first fresh
    /// channel, which is also the only channel openings bind.
    fn shapes(u: &Universe) -> Vec<Self::Shape>;
}

impl ShapeSpace for Basic {
    fn shapes(u: &Universe) -> Vec<BasicShape> {
        let fresh = u.fresh(0);
        let values = u.enumeration(&BTreeSet::from([fresh]));
        let chans: Vec<_> = u.pool_channels().chain([fresh]).collect();
        let mut out = vec![BasicShape::Acting(BasicAction::Tau), BasicShape::Opening(fresh)];
        for &c in &chans {
            for v in &values {
                out.push(BasicShape::Acting(BasicAction::Send(c, v.clone())));
                out.push(BasicShape::Acting(BasicAction::Receive(c, v.clone())));
            }
        }
        out.sort();
        out
    }
}

impl ShapeSpace for Proper {
    fn shapes(u: &Universe) -> Vec<ProperShape> {
        let fresh = u.fresh(0);
        let values = u.enumeration(&BTreeSet::from([fresh]));
        let chans: Vec<_> = u.pool_channels().chain([fresh]).collect();
        let mut out = vec![ProperShape::Simple(ProperAction::Tau)];
        for &c in &chans {
            for v in &values {
                out.push(ProperShape::Simple(ProperAction::Receive(c, v.clone())));
                out.push(ProperShape::Output { chan: c, opened: Vec::new(), payload: v.clone() });
                if c != fresh {
                    out.push(ProperShape::Output { chan: c, opened: vec![fresh], payload: v.clone() });
                }
            }
        }
        out.sort();
        out
    }
}

type Level1<F, T> = <F as ResidualFamily>::Of<T>;
type Level2<F, T> = Level1<F, Level1<F, T>>;
type Level3<F, T> = Level1<F, Level2<F, T>>;

/// Terms and three levels of residuals over them, every level built from
/// the same shape list. Deeper levels are built on first use.
pub struct Tower<F: ResidualFamily, T: Element> {
    shapes: Vec<F::Shape>,
    terms: Rc<Carrier<T>>,
    r1: Rc<Carrier<Level1<F, T>>>,
    r2: OnceCell<Rc<Carrier<Level2<F, T>>>>,
    r3: OnceCell<Rc<Carrier<Level3<F, T>>>>,
}

fn extend<F: ResidualFamily, T: Element>(shapes: &[F::Shape], below: &Carrier<T>) -> Rc<Carrier<F::Of<T>>> {
    Carrier::new(shapes.iter().flat_map(|s| below.iter().map(move |t| F::from_parts(s.clone(), t.clone()))))
}

impl<F: ResidualFamily, T: Element> Tower<F, T> {
    pub fn new(terms: impl IntoIterator<Item = T>, shapes: Vec<F::Shape>) -> Self {
        let terms = Carrier::new(terms);
        let r1 = extend::<F, T>(&shapes, &terms);
        Tower { shapes, terms, r1, r2: OnceCell::new(), r3: OnceCell::new() }
    }

    pub fn shapes(&self) -> &[F::Shape] {
        &self.shapes
    }

    pub fn terms(&self) -> &Rc<Carrier<T>> {
        &self.terms
    }

    pub fn r1(&self) -> &Rc<Carrier<Level1<F, T>>> {
        &self.r1
    }

    pub fn r2(&self) -> &Rc<Carrier<Level2<F, T>>> {
        self.r2.get_or_init(|| extend::<F, _>(&self.shapes, &self.r1))
    }

    pub fn r3(&self) -> &Rc<Carrier<Level3<F, T>>> {
        self.r3.get_or_init(|| extend::<F, _>(&self.shapes, self.r2()))
    }
}

impl<F: ShapeSpace, T: Element> Tower<F, T> {
    pub fn over(terms: impl IntoIterator<Item = T>, universe: &Universe) -> Self {
        Tower::new(terms, F::shapes(universe))
    }
}

/// `lift X` restricted to the given residual carriers.
/// Residuals of a carrier split into a shape id and a target position in a
/// base carrier.
struct Parts<Shape> {
    targets: Vec<Option<usize>>,
    shape_ids: Vec<usize>,
    /// Distinct shapes, sorted; ids index into this.
    shapes: Vec<Shape>,
    /// Residual index at `shape_id * base_len + target`.
    table: Vec<Option<usize>>,
}

fn decompose<F: ResidualFamily, T: Element>(
    residuals: &Carrier<F::Of<T>>,
    base: &Rc<Carrier<T>>,
) -> Rc<Parts<F::Shape>> {
    residuals.memo(base, || {
        let targets: Vec<_> = residuals.iter().map(|r| base.index_of(F::target(r))).collect();
        let shapes: Vec<_> = residuals.iter().map(F::shape).collect::<BTreeSet<_>>().into_iter().collect();
        let shape_ids: Vec<_> = residuals.iter().map(|r| shapes.binary_search(&F::shape(r)).unwrap()).collect();
        let mut table = vec![None; shapes.len() * base.len()];
        for (l, (&s, j)) in shape_ids.iter().zip(&targets).enumerate() {
            if let Some(j) = j {
                table[s * base.len() + j] = Some(l);
            }
        }
        Parts { targets, shape_ids, shapes, table }
    })
}

pub fn lift_relation<S: ResidualStructure + ?Sized, A: Element, B: Element>(
    s: &S,
    x: &Relation<A, B>,
    left: &Rc<Carrier<Of<S, A>>>,
    right: &Rc<Carrier<Of<S, B>>>,
) -> Relation<Of<S, A>, Of<S, B>> {
    let lparts = decompose::<S::Family, A>(left, x.left());
    let rparts = decompose::<S::Family, B>(right, x.right());
    let shape_map: Vec<_> = lparts.shapes.iter().map(|sh| rparts.shapes.binary_search(sh).ok()).collect();
    let width = x.right().len();
    let mut pairs = Vec::new();
    for (k, c) in left.iter().enumerate() {
        let (Some(i), Some(sh)) = (lparts.targets[k], shape_map[lparts.shape_ids[k]]) else { continue };
        for &j in x.row(i) {
            let Some(l) = rparts.table[sh * width + j] else { continue };
            let d = right.get(l);
            // (target c, target d) is the pair being iterated, so skip the lookup
            let (tc, td) = (S::Family::target(c), S::Family::target(d));
            let holds = |a: &A, b: &B| (std::ptr::eq(a, tc) && std::ptr::eq(b, td)) || x.holds(a, b);
            if s.lift(&holds, c, d) {
                pairs.push((k, l));
            }
        }
    }
    Relation::from_indices(left, right, pairs)
}
