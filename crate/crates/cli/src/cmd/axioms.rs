use std::collections::BTreeSet;
use std::path::PathBuf;

use natcalc::algebra::mutants::{FuseMutant, LiftMutant, SilentMutant};
use natcalc::algebra::{
    check_monad_axioms, check_normal_silent_axioms, check_relator_axioms, derive_fuse, direct_fuse, replay, samples,
    FuseRelations, Relation, Report, ResidualStructure, ShapeSpace, Tower,
};
use natcalc::{explore, Basic, CanonicalTerm, Proper, Universe};
use serde::Serialize;

use crate::config::Config;
use crate::error::CliError;
use crate::source::{read_program, Loaded};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Structure {
    Basic,
    Proper,
    NormalDerived,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Mutant {
    Lift,
    Fuse,
    Silent,
}

/// Carrier terms used when no files are given.
const DEFAULT_TERMS: &[&str] =
    &["0", "a<()>", "a(x). b<x>", "new c. a<c>", "a<()> | a(x). 0", "new c. (c<()> | c(y). a<y>)"];

#[derive(Serialize)]
struct Counter {
    case: usize,
    samples: Vec<Vec<(usize, usize)>>,
    left: String,
    right: String,
    lhs_only: bool,
    replayed: bool,
}

#[derive(Serialize)]
struct Line {
    suite: String,
    check: String,
    cases: usize,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    counterexample: Option<Counter>,
}

#[derive(Serialize)]
pub struct AxiomsReport {
    structure: String,
    seed: u64,
    cases: usize,
    terms: usize,
    passed: bool,
    results: Vec<Line>,
}

pub struct AxiomsOptions<'a> {
    pub structure: Structure,
    pub mutant: Option<Mutant>,
    pub cases: usize,
    pub max_terms: usize,
    pub files: &'a [PathBuf],
}

/// Distinct explored states of the given terms, in exploration order.
fn carrier_terms(cfg: &Config, files: &[PathBuf], max_terms: usize) -> Result<Vec<CanonicalTerm>, CliError> {
    let sources = if files.is_empty() {
        DEFAULT_TERMS
            .iter()
            .map(|t| natcalc::syntax::parse(t).map_err(CliError::from))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        let mut all = Vec::new();
        for f in files {
            all.extend(read_program(f)?);
        }
        all
    };
    let loaded = Loaded::new(&sources)?;
    let u = cfg.universe(loaded.free())?;
    let mut seen = BTreeSet::new();
    let mut terms = Vec::new();
    for p in &loaded.processes {
        let g = explore::<Basic>(p, &u, cfg.limits)?;
        for s in g.states() {
            if terms.len() < max_terms && seen.insert(s.term.clone()) {
                terms.push(s.term.clone());
            }
        }
    }
    Ok(terms)
}

struct Run<'a, S: ResidualStructure> {
    s: &'a S,
    tower: Tower<S::Family, CanonicalTerm>,
    xs: Vec<Relation<CanonicalTerm, CanonicalTerm>>,
    lines: &'a mut Vec<Line>,
}

impl<'a, S: ResidualStructure> Run<'a, S> {
    fn new(
        s: &'a S,
        terms: &[CanonicalTerm],
        shapes: &Universe,
        opts: &AxiomsOptions,
        seed: u64,
        lines: &'a mut Vec<Line>,
    ) -> Self
    where
        S::Family: ShapeSpace,
    {
        let tower = Tower::over(terms.iter().cloned(), shapes);
        let xs = samples(tower.terms(), opts.cases, seed);
        Run { s, tower, xs, lines }
    }

    fn record(&mut self, report: Report, fuse: Option<&FuseRelations<S, CanonicalTerm>>) -> Result<(), CliError> {
        for r in &report.results {
            let counterexample = match &r.counterexample {
                None => None,
                Some(cx) => Some(Counter {
                    case: cx.case,
                    samples: cx.samples.clone(),
                    left: cx.left.clone(),
                    right: cx.right.clone(),
                    lhs_only: cx.lhs_only,
                    replayed: replay(self.s, &self.tower, fuse, r.axiom, cx)?,
                }),
            };
            self.lines.push(Line {
                suite: report.suite.clone(),
                check: r.axiom.name().to_string(),
                cases: r.cases,
                passed: r.passed(),
                detail: None,
                counterexample,
            });
        }
        Ok(())
    }

    fn note(&mut self, check: &str, passed: bool, detail: Option<String>) {
        self.lines.push(Line {
            suite: self.s.name(),
            check: check.into(),
            cases: 1,
            passed,
            detail,
            counterexample: None,
        });
    }

    fn relator(&mut self) -> Result<(), CliError> {
        let report = check_relator_axioms(self.s, &self.tower, &self.xs)?;
        self.record(report, None)
    }

    fn silent(&mut self) -> Result<(), CliError> {
        let report = check_normal_silent_axioms(self.s, &self.tower, &self.xs)?;
        self.record(report, None)
    }

    fn monad(&mut self, fuse: &FuseRelations<S, CanonicalTerm>) -> Result<(), CliError> {
        let report = check_monad_axioms(self.s, &self.tower, fuse, &self.xs)?;
        self.record(report, Some(fuse))
    }

    /// Derives fuse from silence; a silence that breaks its axioms is
    /// recorded as a failure.
    fn derived(&mut self) -> Result<Option<FuseRelations<S, CanonicalTerm>>, CliError> {
        match derive_fuse(self.s, &self.tower) {
            Ok(f) => Ok(Some(f)),
            Err(e @ natcalc::Error::SilentAxiomsViolated(_)) => {
                self.note("derive fuse", false, Some(e.to_string()));
                Ok(None)
            }
            Err(e) => Err(e.into()),
        }
    }
}

pub fn run(cfg: &Config, opts: &AxiomsOptions) -> Result<AxiomsReport, CliError> {
    let terms = carrier_terms(cfg, opts.files, opts.max_terms)?;
    // labels range over one public and one fresh channel
    let shapes = Universe::new(cfg.data.iter().cloned(), 1, 1, cfg.depth_budget)?;
    let mut lines = Vec::new();
    let seed = cfg.seed;
    let name = match (opts.mutant, opts.structure) {
        (Some(Mutant::Lift), _) => {
            let mut run = Run::new(&LiftMutant, &terms, &shapes, opts, seed, &mut lines);
            run.relator()?;
            let fuse = direct_fuse(&LiftMutant, &run.tower)?;
            run.monad(&fuse)?;
            "mutant lift"
        }
        (Some(Mutant::Fuse), _) => {
            let mut run = Run::new(&FuseMutant, &terms, &shapes, opts, seed, &mut lines);
            let fuse = direct_fuse(&FuseMutant, &run.tower)?;
            run.monad(&fuse)?;
            "mutant fuse"
        }
        (Some(Mutant::Silent), _) => {
            let mutant = SilentMutant::two_residuals(&shapes);
            let mut run = Run::new(&mutant, &terms, &shapes, opts, seed, &mut lines);
            run.silent()?;
            run.derived()?;
            "mutant silent"
        }
        (None, Structure::Basic) => {
            let mut run = Run::new(&Basic, &terms, &shapes, opts, seed, &mut lines);
            run.relator()?;
            run.silent()?;
            let fuse = direct_fuse(&Basic, &run.tower)?;
            run.monad(&fuse)?;
            "basic"
        }
        (None, Structure::Proper) => {
            let mut run = Run::new(&Proper, &terms, &shapes, opts, seed, &mut lines);
            run.relator()?;
            run.silent()?;
            if let Some(fuse) = run.derived()? {
                run.monad(&fuse)?;
            }
            "proper"
        }
        (None, Structure::NormalDerived) => {
            let mut run = Run::new(&Basic, &terms, &shapes, opts, seed, &mut lines);
            run.silent()?;
            if let Some(derived) = run.derived()? {
                let direct = direct_fuse(&Basic, &run.tower)?;
                let same = derived.equals(&direct)?;
                run.note("derived fuse equals direct fuse", same, None);
                run.monad(&derived)?;
            }
            "normal-derived"
        }
    };
    Ok(AxiomsReport {
        structure: name.into(),
        seed,
        cases: opts.cases,
        terms: terms.len(),
        passed: lines.iter().all(|l| l.passed),
        results: lines,
    })
}

impl AxiomsReport {
    pub fn passed(&self) -> bool {
        self.passed
    }

    pub fn print(&self) {
        println!(
            "{} axioms over {} terms, {} sampled relations, seed {}",
            self.structure, self.terms, self.cases, self.seed
        );
        for l in &self.results {
            match (&l.counterexample, &l.detail, l.passed) {
                (_, _, true) => println!("{}: {}: pass ({} cases)", l.suite, l.check, l.cases),
                (Some(cx), _, false) => {
                    let side = if cx.lhs_only { "left" } else { "right" };
                    println!("{}: {}: FAIL in case {}", l.suite, l.check, cx.case);
                    println!("  pair {} ~ {} holds only on the {side}-hand side", cx.left, cx.right);
                    println!("  replay: {}", if cx.replayed { "reproduced" } else { "not reproduced" });
                }
                (None, detail, false) => {
                    println!(
                        "{}: {}: FAIL{}",
                        l.suite,
                        l.check,
                        detail.as_ref().map(|d| format!(": {d}")).unwrap_or_default()
                    )
                }
            }
        }
    }
}
