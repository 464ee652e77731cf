use natcalc::{Context, Process, Universe};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;
use crate::label::Labelled;
use crate::source::Names;

pub struct TraceOptions {
    pub steps: usize,
    pub walks: usize,
    pub exhaustive: bool,
    pub max_paths: usize,
    pub seed: u64,
}

pub fn run<F: Labelled>(p: &Process, names: &Names, u: &Universe, opts: &TraceOptions) -> Result<u8, CliError> {
    if opts.exhaustive {
        let mut paths = Vec::new();
        let complete = walk_all::<F>(p, 0, u, names, opts, &mut Vec::new(), &mut paths)?;
        for path in &paths {
            println!("{}", if path.is_empty() { "(no transitions)".to_string() } else { path.join("; ") });
        }
        if !complete {
            println!("note: stopped after {} paths", opts.max_paths);
        }
        return Ok(0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for w in 0..opts.walks {
        println!("walk {w}:");
        let (mut p, mut minted) = (p.clone(), 0);
        for _ in 0..opts.steps {
            let steps = F::transitions(&p, Context::new(u, minted))?;
            if steps.steps.is_empty() {
                println!("  (stuck)");
                break;
            }
            let step = &steps.steps[rng.gen_range(0..steps.steps.len())];
            println!("  {} -> {}", F::label(&step.residual, names).text(names), names.term(F::target(&step.residual)));
            p = step.target.clone();
            minted = step.target_minted;
        }
    }
    Ok(0)
}

/// Label sequences of maximal paths up to `opts.steps` long. Returns false
/// when `opts.max_paths` cut the enumeration short.
fn walk_all<F: Labelled>(
    p: &Process,
    minted: usize,
    u: &Universe,
    names: &Names,
    opts: &TraceOptions,
    prefix: &mut Vec<String>,
    paths: &mut Vec<Vec<String>>,
) -> Result<bool, CliError> {
    if paths.len() >= opts.max_paths {
        return Ok(false);
    }
    let steps = if prefix.len() < opts.steps { F::transitions(p, Context::new(u, minted))?.steps } else { Vec::new() };
    if steps.is_empty() {
        paths.push(prefix.clone());
        return Ok(true);
    }
    for step in &steps {
        prefix.push(F::label(&step.residual, names).text(names));
        let done = walk_all::<F>(&step.target, step.target_minted, u, names, opts, prefix, paths)?;
        prefix.pop();
        if !done {
            return Ok(false);
        }
    }
    Ok(true)
}
