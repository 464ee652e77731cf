//! Deliberately broken and relabelled structures, used to show that the
//! axiom checkers have teeth.

use std::marker::PhantomData;

use crate::basic::{basic_lift, Basic, BasicAction, BasicResidual, BasicShape};
use crate::residual::{Element, ResidualFamily};
use crate::universe::Universe;
use crate::value::Value;

use super::{Of, ResidualStructure, ShapeSpace};

/// Basic lifting that refuses to relate openings with different bodies.
#[derive(Clone, Copy, Debug, Default)]
pub struct LiftMutant;

impl ResidualStructure for LiftMutant {
    type Family = Basic;

    fn name(&self) -> String {
        "basic (broken lift)".into()
    }

    fn lift<A: Element, B: Element>(
        &self,
        x: &dyn Fn(&A, &B) -> bool,
        c: &BasicResidual<A>,
        d: &BasicResidual<B>,
    ) -> bool {
        if let (BasicResidual::Opening(_, p), BasicResidual::Opening(_, q)) = (c, d) {
            if format!("{p:?}") != format!("{q:?}") {
                return false;
            }
        }
        basic_lift(x, c, d)
    }
}

/// Basic fuse without the acting–silent rule.
#[derive(Clone, Copy, Debug, Default)]
pub struct FuseMutant;

impl ResidualStructure for FuseMutant {
    type Family = Basic;

    fn name(&self) -> String {
        "basic (broken fuse)".into()
    }

    fn fuse<T: Element>(&self, n: &BasicResidual<BasicResidual<T>>) -> Vec<BasicResidual<T>> {
        match n {
            BasicResidual::Acting(alpha, BasicResidual::Acting(BasicAction::Tau, _)) if *alpha != BasicAction::Tau => {
                Vec::new()
            }
            _ => crate::basic::basic_fuse(n),
        }
    }
}

/// Silence given by an arbitrary list of shapes instead of the family's own
/// silent label.
#[derive(Clone, Debug)]
pub struct SilentMutant<F: ResidualFamily> {
    shapes: Vec<F::Shape>,
    _family: PhantomData<F>,
}

impl<F: ResidualFamily> SilentMutant<F> {
    pub fn new(shapes: Vec<F::Shape>) -> Self {
        SilentMutant { shapes, _family: PhantomData }
    }
}

impl SilentMutant<Basic> {
    /// Relates each term to both its silent residual and a send residual.
    pub fn two_residuals(u: &Universe) -> Self {
        let c = u.pool_channels().next().expect("pool is never empty");
        SilentMutant::new(vec![
            BasicShape::Acting(BasicAction::Tau),
            BasicShape::Acting(BasicAction::Send(c, Value::Unit)),
        ])
    }
}

impl<F: ShapeSpace> ResidualStructure for SilentMutant<F> {
    type Family = F;

    fn name(&self) -> String {
        let labels: Vec<_> = self.shapes.iter().map(|s| s.to_string()).collect();
        format!("silent as {}", labels.join(" or "))
    }

    fn silent<T: Element>(&self, t: &T) -> Vec<Of<Self, T>> {
        self.shapes.iter().map(|s| F::from_parts(s.clone(), t.clone())).collect()
    }
}
