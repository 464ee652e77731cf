pub mod axioms;
pub mod bisim;
pub mod export;
pub mod step;
pub mod trace;
