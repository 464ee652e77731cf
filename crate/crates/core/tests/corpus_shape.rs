mod common;

use natcalc::{explore, Basic, Proper};

#[test]
fn corpus_terms_are_finite_state() {
    let u = common::universe();
    let corpus = common::corpus();
    assert!(corpus.len() >= 25);
    for e in &corpus {
        let b = explore::<Basic>(&e.process, &u, common::limits()).unwrap();
        let p = explore::<Proper>(&e.process, &u, common::limits()).unwrap();
        println!(
            "{:24} basic {:4} states {:5} edges   proper {:4} states {:5} edges",
            e.name,
            b.len(),
            b.edge_count(),
            p.len(),
            p.edge_count()
        );
        assert!(b.is_complete(), "{} basic", e.name);
        assert!(p.is_complete(), "{} proper", e.name);
    }
}
