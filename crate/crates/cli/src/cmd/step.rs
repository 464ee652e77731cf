use natcalc::{Context, Process, Universe};

use crate::error::CliError;
use crate::label::{residual, Labelled};
use crate::source::Names;

/// Prints the transitions of `p`, one per line, with the rule that derives
/// each of them.
pub fn run<F: Labelled>(p: &Process, names: &Names, u: &Universe, audit: bool) -> Result<u8, CliError> {
    let steps = F::transitions(p, Context::new(u, 0))?;
    for step in &steps.steps {
        println!("{}  [{}]", residual::<F, _>(&step.residual, names, |t| names.term(t)), step.rule);
        for c in F::unpublished(&step.residual) {
            println!("  warning: opens {} without publishing it", names.chan(c));
        }
        if audit {
            for line in step.derivation.audit() {
                println!("    {line}");
            }
        }
    }
    if steps.truncated {
        println!("note: the depth budget cut the derivation search short");
    }
    Ok(0)
}
