use std::fmt;
use std::rc::Rc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::residual::Element;

use super::{lift_relation, Carrier, Level1, Level2, Level3, Relation, ResidualStructure, Tower};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    EqualityPreservation,
    CompositionPreservation,
    ConversionPreservation,
    SilentNaturality,
    FuseNaturality,
    LeftNeutrality,
    RightNeutrality,
    Associativity,
    Naturality,
    LeftUniqueness,
    RightUniqueness,
}

impl Axiom {
    pub const RELATOR: [Axiom; 3] =
        [Axiom::EqualityPreservation, Axiom::CompositionPreservation, Axiom::ConversionPreservation];
    pub const MONAD: [Axiom; 5] = [
        Axiom::SilentNaturality,
        Axiom::FuseNaturality,
        Axiom::LeftNeutrality,
        Axiom::RightNeutrality,
        Axiom::Associativity,
    ];
    pub const NORMAL_SILENT: [Axiom; 3] = [Axiom::Naturality, Axiom::LeftUniqueness, Axiom::RightUniqueness];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::EqualityPreservation => "equality preservation",
            Axiom::CompositionPreservation => "composition preservation",
            Axiom::ConversionPreservation => "conversion preservation",
            Axiom::SilentNaturality => "silent naturality",
            Axiom::FuseNaturality => "fuse naturality",
            Axiom::LeftNeutrality => "left neutrality",
            Axiom::RightNeutrality => "right neutrality",
            Axiom::Associativity => "associativity",
            Axiom::Naturality => "naturality",
            Axiom::LeftUniqueness => "left uniqueness and totality",
            Axiom::RightUniqueness => "right uniqueness",
        }
    }

    /// Number of sample relations the axiom is instantiated with.
    pub fn arity(self) -> usize {
        match self {
            Axiom::CompositionPreservation => 2,
            Axiom::ConversionPreservation | Axiom::SilentNaturality | Axiom::FuseNaturality | Axiom::Naturality => 1,
            _ => 0,
        }
    }

    fn needs_fuse(self) -> bool {
        matches!(self, Axiom::FuseNaturality | Axiom::LeftNeutrality | Axiom::RightNeutrality | Axiom::Associativity)
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A pair on which the two sides of an axiom disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub case: usize,
    /// Sample relations as index pairs over the term carrier.
    pub samples: Vec<Vec<(usize, usize)>>,
    pub left: String,
    pub right: String,
    /// Whether the pair is on the axiom's left-hand side only.
    pub lhs_only: bool,
}

#[derive(Clone, Debug)]
pub struct AxiomResult {
    pub axiom: Axiom,
    pub cases: usize,
    pub counterexample: Option<Counterexample>,
}

impl AxiomResult {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub suite: String,
    pub results: Vec<AxiomResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.results.iter().all(AxiomResult::passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &AxiomResult> {
        self.results.iter().filter(|r| !r.passed())
    }

    pub fn result(&self, axiom: Axiom) -> Option<&AxiomResult> {
        self.results.iter().find(|r| r.axiom == axiom)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            match &r.counterexample {
                None => writeln!(f, "{}: {}: pass ({} cases)", self.suite, r.axiom, r.cases)?,
                Some(cx) => writeln!(
                    f,
                    "{}: {}: FAIL in case {}: ({}, {}) only on the {} side",
                    self.suite,
                    r.axiom,
                    cx.case,
                    cx.left,
                    cx.right,
                    if cx.lhs_only { "left" } else { "right" }
                )?,
            }
        }
        Ok(())
    }
}

/// Fusion at the two nesting levels the monad axioms mention.
pub struct FuseRelations<S: ResidualStructure + ?Sized, T: Element> {
    pub nested: Relation<Level2<S::Family, T>, Level1<S::Family, T>>,
    pub doubly_nested: Relation<Level3<S::Family, T>, Level2<S::Family, T>>,
}

impl<S: ResidualStructure + ?Sized, T: Element> FuseRelations<S, T> {
    pub fn equals(&self, other: &Self) -> Result<bool> {
        Ok(self.nested.equals(&other.nested)? && self.doubly_nested.equals(&other.doubly_nested)?)
    }
}

/// The structure's own fuse, tabulated.
pub fn direct_fuse<S: ResidualStructure, T: Element>(
    s: &S,
    tower: &Tower<S::Family, T>,
) -> Result<FuseRelations<S, T>> {
    Ok(FuseRelations {
        nested: Relation::from_image(tower.r2(), tower.r1(), |n| s.fuse(n))?,
        doubly_nested: Relation::from_image(tower.r3(), tower.r2(), |n| s.fuse(n))?,
    })
}

/// `fuse = silent⁻¹ ⊔ lift silent⁻¹`, computed on relations. The silent
/// axioms are checked first.
pub fn derive_fuse<S: ResidualStructure, T: Element>(
    s: &S,
    tower: &Tower<S::Family, T>,
) -> Result<FuseRelations<S, T>> {
    let report = check_normal_silent_axioms(s, tower, &samples(tower.terms(), 16, 0))?;
    if !report.passed() {
        let names: Vec<_> = report.failed().map(|r| r.axiom.name()).collect();
        return Err(Error::SilentAxiomsViolated(names.join(", ")));
    }
    let silent0 = Relation::from_image(tower.terms(), tower.r1(), |t| s.silent(t))?;
    let silent1 = Relation::from_image(tower.r1(), tower.r2(), |t| s.silent(t))?;
    let silent2 = Relation::from_image(tower.r2(), tower.r3(), |t| s.silent(t))?;
    let nested = silent1.converse().union(&lift_relation(s, &silent0.converse(), tower.r2(), tower.r1()))?;
    let doubly_nested = silent2.converse().union(&lift_relation(s, &silent1.converse(), tower.r3(), tower.r2()))?;
    Ok(FuseRelations { nested, doubly_nested })
}

/// Identity, empty and full, then seeded random relations of varying
/// density, `count` in total.
pub fn samples<T: Element>(terms: &Rc<Carrier<T>>, count: usize, seed: u64) -> Vec<Relation<T, T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![Relation::identity(terms), Relation::empty(terms, terms), Relation::full(terms, terms)];
    while out.len() < count {
        let density = rng.gen_range(0.02..0.6);
        out.push(Relation::random(terms, terms, density, &mut rng));
    }
    out.truncate(count.max(1));
    out
}

pub fn check_relator_axioms<S: ResidualStructure, T: Element>(
    s: &S,
    tower: &Tower<S::Family, T>,
    samples: &[Relation<T, T>],
) -> Result<Report> {
    run(&Eval::new(s, tower, None)?, &Axiom::RELATOR, samples, format!("{} relator", s.name()))
}

pub fn check_monad_axioms<S: ResidualStructure, T: Element>(
    s: &S,
    tower: &Tower<S::Family, T>,
    fuse: &FuseRelations<S, T>,
    samples: &[Relation<T, T>],
) -> Result<Report> {
    run(&Eval::new(s, tower, Some(fuse))?, &Axiom::MONAD, samples, format!("{} monad", s.name()))
}

pub fn check_normal_silent_axioms<S: ResidualStructure, T: Element>(
    s: &S,
    tower: &Tower<S::Family, T>,
    samples: &[Relation<T, T>],
) -> Result<Report> {
    run(&Eval::new(s, tower, None)?, &Axiom::NORMAL_SILENT, samples, format!("{} silent", s.name()))
}

/// Re-evaluates `axiom` on the counterexample's samples; true when the same
/// pair is again a witness of failure.
pub fn replay<S: ResidualStructure, T: Element>(
    s: &S,
    tower: &Tower<S::Family, T>,
    fuse: Option<&FuseRelations<S, T>>,
    axiom: Axiom,
    cx: &Counterexample,
) -> Result<bool> {
    let eval = Eval::new(s, tower, fuse)?;
    let rels: Vec<_> =
        cx.samples.iter().map(|p| Relation::from_indices(tower.terms(), tower.terms(), p.iter().copied())).collect();
    let refs: Vec<_> = rels.iter().collect();
    let witnesses = eval.disagreements(axiom, &refs)?;
    Ok(witnesses.iter().any(|(l, r, lhs_only)| *l == cx.left && *r == cx.right && *lhs_only == cx.lhs_only))
}

fn run<S: ResidualStructure, T: Element>(
    eval: &Eval<'_, S, T>,
    axioms: &[Axiom],
    samples: &[Relation<T, T>],
    suite: String,
) -> Result<Report> {
    for x in samples {
        if !Rc::ptr_eq(x.left(), eval.tower.terms()) || !Rc::ptr_eq(x.right(), eval.tower.terms()) {
            return Err(Error::CarrierMismatch("sample relation is not over the term carrier".into()));
        }
    }
    let mut results = Vec::new();
    for &axiom in axioms {
        let instances: Vec<Vec<&Relation<T, T>>> = match axiom.arity() {
            0 => vec![Vec::new()],
            1 => samples.iter().map(|x| vec![x]).collect(),
            _ => (0..samples.len()).map(|i| vec![&samples[i], &samples[(i + 1) % samples.len()]]).collect(),
        };
        let mut result = AxiomResult { axiom, cases: 0, counterexample: None };
        for (case, xs) in instances.iter().enumerate() {
            result.cases += 1;
            if let Some((left, right, lhs_only)) = eval.disagreements(axiom, xs)?.into_iter().next() {
                let samples = xs.iter().map(|x| x.index_pairs().collect()).collect();
                result.counterexample = Some(Counterexample { case, samples, left, right, lhs_only });
                break;
            }
        }
        results.push(result);
    }
    Ok(Report { suite, results })
}

struct Eval<'a, S: ResidualStructure, T: Element> {
    s: &'a S,
    tower: &'a Tower<S::Family, T>,
    fuse: Option<&'a FuseRelations<S, T>>,
    silent0: Relation<T, Level1<S::Family, T>>,
}

type Diff = Vec<(String, String, bool)>;

fn diff<A: Element, B: Element>(lhs: &Relation<A, B>, rhs: &Relation<A, B>, inclusion: bool) -> Result<Diff> {
    Ok(lhs
        .difference(rhs)?
        .into_iter()
        .filter(|(_, _, lhs_only)| *lhs_only || !inclusion)
        .map(|(i, j, lhs_only)| (lhs.left().get(i).to_string(), lhs.right().get(j).to_string(), lhs_only))
        .collect())
}

impl<'a, S: ResidualStructure, T: Element> Eval<'a, S, T> {
    fn new(s: &'a S, tower: &'a Tower<S::Family, T>, fuse: Option<&'a FuseRelations<S, T>>) -> Result<Self> {
        let silent0 = Relation::from_image(tower.terms(), tower.r1(), |t| s.silent(t))?;
        Ok(Eval { s, tower, fuse, silent0 })
    }

    fn disagreements(&self, axiom: Axiom, xs: &[&Relation<T, T>]) -> Result<Diff> {
        let (s, t) = (self.s, self.tower);
        let (terms, r1) = (t.terms(), t.r1());
        let fuse = match (axiom.needs_fuse(), self.fuse) {
            (true, None) => return Err(Error::CarrierMismatch(format!("{axiom} needs fuse relations"))),
            (_, f) => f,
        };
        match axiom {
            Axiom::EqualityPreservation => {
                diff(&lift_relation(s, &Relation::identity(terms), r1, r1), &Relation::identity(r1), false)
            }
            Axiom::CompositionPreservation => {
                let lhs = lift_relation(s, &xs[0].compose(xs[1])?, r1, r1);
                let rhs = lift_relation(s, xs[0], r1, r1).compose(&lift_relation(s, xs[1], r1, r1))?;
                diff(&lhs, &rhs, false)
            }
            Axiom::ConversionPreservation => {
                let lhs = lift_relation(s, &xs[0].converse(), r1, r1);
                diff(&lhs, &lift_relation(s, xs[0], r1, r1).converse(), false)
            }
            Axiom::SilentNaturality | Axiom::Naturality => {
                let lhs = xs[0].compose(&self.silent0)?;
                let rhs = self.silent0.compose(&lift_relation(s, xs[0], r1, r1))?;
                diff(&lhs, &rhs, false)
            }
            Axiom::FuseNaturality => {
                let nested = &fuse.unwrap().nested;
                let lifted = lift_relation(s, xs[0], r1, r1);
                let lhs = lift_relation(s, &lifted, t.r2(), t.r2()).compose(nested)?;
                diff(&lhs, &nested.compose(&lifted)?, false)
            }
            Axiom::LeftNeutrality => {
                let silent1 = Relation::from_image(r1, t.r2(), |c| s.silent(c))?;
                diff(&silent1.compose(&fuse.unwrap().nested)?, &Relation::identity(r1), false)
            }
            Axiom::RightNeutrality => {
                let lhs = lift_relation(s, &self.silent0, r1, t.r2()).compose(&fuse.unwrap().nested)?;
                diff(&lhs, &Relation::identity(r1), false)
            }
            Axiom::Associativity => {
                let f = fuse.unwrap();
                let lhs = f.doubly_nested.compose(&f.nested)?;
                let rhs = lift_relation(s, &f.nested, t.r3(), t.r2()).compose(&f.nested)?;
                diff(&lhs, &rhs, false)
            }
            Axiom::LeftUniqueness => {
                diff(&self.silent0.compose(&self.silent0.converse())?, &Relation::identity(terms), false)
            }
            Axiom::RightUniqueness => {
                diff(&self.silent0.converse().compose(&self.silent0)?, &Relation::identity(r1), true)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::mutants::{FuseMutant, LiftMutant, SilentMutant};
    use crate::basic::Basic;
    use crate::proper::Proper;
    use crate::universe::Universe;
    use crate::value::Value;

    fn universe() -> Universe {
        Universe::new([Value::Unit], 1, 2, 4).unwrap()
    }

    #[test]
    fn basic_passes_everything_on_small_carriers() {
        let tower: Tower<Basic, u8> = Tower::over(0..4, &universe());
        let xs = samples(tower.terms(), 20, 7);
        assert!(check_relator_axioms(&Basic, &tower, &xs).unwrap().passed());
        assert!(check_normal_silent_axioms(&Basic, &tower, &xs).unwrap().passed());
        let fuse = direct_fuse(&Basic, &tower).unwrap();
        let report = check_monad_axioms(&Basic, &tower, &fuse, &xs).unwrap();
        assert!(report.passed(), "{report}");
        assert!(derive_fuse(&Basic, &tower).unwrap().equals(&fuse).unwrap());
    }

    #[test]
    fn proper_derived_fuse_is_a_monad() {
        let tower: Tower<Proper, u8> = Tower::over(0..3, &universe());
        let xs = samples(tower.terms(), 12, 3);
        let fuse = derive_fuse(&Proper, &tower).unwrap();
        assert!(check_monad_axioms(&Proper, &tower, &fuse, &xs).unwrap().passed());
        assert!(check_relator_axioms(&Proper, &tower, &xs).unwrap().passed());
    }

    #[test]
    fn lift_mutant_breaks_composition_only() {
        let tower: Tower<Basic, u8> = Tower::over(0..4, &universe());
        let xs = samples(tower.terms(), 20, 1);
        let report = check_relator_axioms(&LiftMutant, &tower, &xs).unwrap();
        let failed: Vec<_> = report.failed().map(|r| r.axiom).collect();
        assert_eq!(failed, vec![Axiom::CompositionPreservation]);
        let cx = report.result(Axiom::CompositionPreservation).unwrap().counterexample.clone().unwrap();
        assert!(replay(&LiftMutant, &tower, None, Axiom::CompositionPreservation, &cx).unwrap());
    }

    #[test]
    fn fuse_mutant_breaks_right_neutrality() {
        let tower: Tower<Basic, u8> = Tower::over(0..3, &universe());
        let xs = samples(tower.terms(), 8, 1);
        let fuse = direct_fuse(&FuseMutant, &tower).unwrap();
        let report = check_monad_axioms(&FuseMutant, &tower, &fuse, &xs).unwrap();
        let r = report.result(Axiom::RightNeutrality).unwrap();
        let cx = r.counterexample.as_ref().expect("right neutrality should fail");
        assert!(replay(&FuseMutant, &tower, Some(&fuse), Axiom::RightNeutrality, cx).unwrap());
        assert!(report.result(Axiom::LeftNeutrality).unwrap().passed());
    }

    #[test]
    fn two_silent_residuals_break_uniqueness() {
        let u = universe();
        let tower: Tower<Basic, u8> = Tower::over(0..3, &u);
        let mutant = SilentMutant::<Basic>::two_residuals(&u);
        let report = check_normal_silent_axioms(&mutant, &tower, &samples(tower.terms(), 4, 0)).unwrap();
        assert!(!report.result(Axiom::RightUniqueness).unwrap().passed());
        assert!(matches!(derive_fuse(&mutant, &tower), Err(Error::SilentAxiomsViolated(_))));
    }

    #[test]
    fn sample_carrier_must_match() {
        let tower: Tower<Basic, u8> = Tower::over(0..3, &universe());
        let other = Carrier::new(0u8..3);
        let xs = vec![Relation::identity(&other)];
        assert!(matches!(check_relator_axioms(&Basic, &tower, &xs), Err(Error::CarrierMismatch(_))));
    }
}
