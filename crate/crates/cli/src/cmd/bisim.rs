use std::collections::BTreeSet;

use natcalc::bisim::Side;
use natcalc::{bisimilarity, Limits, LtsGraph, Method, Mode, Play, Process, Universe, Verdict};

use crate::error::CliError;
use crate::label::{residual, Labelled};
use crate::source::Names;

fn prefix(side: Side) -> &'static str {
    match side {
        Side::Left => "p",
        Side::Right => "q",
    }
}

#[allow(clippy::too_many_arguments)]
pub fn run<F: Labelled>(
    p: &Process,
    q: &Process,
    names: &Names,
    u: &Universe,
    limits: Limits,
    mode: Mode,
    method: Method,
) -> Result<u8, CliError> {
    let (verdict, game) = bisimilarity::<F>(p, q, u, limits, mode, method)?;
    let method_name = match method {
        Method::Exact => "exact".to_string(),
        Method::Bounded(k) => format!("bounded to {k} rounds"),
    };
    println!("{} {} bisimilarity, {method_name}: {}", F::name(), mode.name(), verdict.name());
    let term = |side: Side, id: usize| names.term(&game.graph(side).state(id).term);
    match &verdict {
        Verdict::Bisimilar { witness } => {
            println!("witness ({} pairs):", witness.len());
            for &(l, r) in witness {
                println!("  p{l} ~ q{r}: {}  ~  {}", term(Side::Left, l), term(Side::Right, r));
            }
            Ok(0)
        }
        Verdict::BoundedBisimilar(_) => Ok(0),
        Verdict::NotBisimilar { play } => {
            println!("distinguishing play:");
            let mut seen = BTreeSet::new();
            print_play::<F>(play, names, 1, &mut seen);
            println!("states:");
            for (side, id) in seen {
                println!("  {}{id}: {}", prefix(side), term(side, id));
            }
            Ok(3)
        }
        Verdict::Inconclusive(_) => {
            report_incomplete(&game.left, "left");
            report_incomplete(&game.right, "right");
            Ok(4)
        }
    }
}

fn report_incomplete<F: Labelled>(g: &LtsGraph<F>, which: &str) {
    if !g.is_complete() {
        println!("{which} exploration: {} states, {} not fully explored", g.len(), g.incomplete_count());
    }
}

fn print_play<F: Labelled>(
    play: &Play<F::Of<usize>>,
    names: &Names,
    indent: usize,
    seen: &mut BTreeSet<(Side, usize)>,
) {
    let pad = "  ".repeat(indent);
    let (side, other) = (play.side, play.side.other());
    seen.insert((Side::Left, play.left));
    seen.insert((Side::Right, play.right));
    let at = format!("(p{}, q{})", play.left, play.right);
    let challenge = residual::<F, _>(&play.challenge, names, |t| format!("{}{t}", prefix(side)));
    println!("{pad}at {at} {} plays {challenge}", if side == Side::Left { "left" } else { "right" });
    if play.answers.is_empty() {
        println!("{pad}  no answer");
    }
    for (answer, sub) in &play.answers {
        seen.insert((other, *F::target(answer)));
        println!("{pad}  answer {}", residual::<F, _>(answer, names, |t| format!("{}{t}", prefix(other))));
        print_play::<F>(sub, names, indent + 2, seen);
    }
}
