//! The classes `A`, `B`, `C`, their local invariants, surjectivity witnesses
//! and obstruction verdicts.

pub mod classes;
pub mod quadres;
pub mod verdict;
pub mod witness;

pub use classes::{
    evaluate_certified, evaluate_local, evaluate_rational, BrauerClass, ClassTag, Factor, InvariantValue, SymbolRep,
    ESCALATIONS,
};
pub use quadres::{quadres_counts, quadres_witness, quadres_witnesses};
pub use verdict::{
    bm_verdict, rational_invariants, reciprocity_check, relevant_primes, sampled_images, BrauerBudget, ClassReport,
    Evidence, ObstructionReport, PlaceImage,
};
pub use witness::{surjectivity_witness, CaseStep, SurjectivityWitness};
