//! Return-time sets and Furstenberg families.
//!
//! Every family predicate is evaluated on a finite window `[0, H)` and so
//! answers IN, OUT or UNKNOWN together with a witness.

mod family;
mod index_set;
mod lemmas;
mod returns;
mod transitivity;

pub use family::{duality_check, family_test, DualityReport, DualityRow, Family, FamilyVerdict, Status, Witness, GAP_CONVENTION};
pub use index_set::{difference_set, IndexSet};
pub use lemmas::{
    ball_hitting_set, lemma12_inclusion_check, lemma13_inclusion_check, ConclusionRow, Inclusion, InclusionStatus, Lemma12Report,
    Lemma13Report,
};
pub use returns::{
    bohr_set, hitting_times, hitting_witnesses, recurrence_test, return_times, HitWitness, RecurrenceCell, RecurrenceReport,
    RecurrenceRow,
};
pub use transitivity::{transitivity_report, TransitivityEntry, TransitivityMode, TransitivityReport, TransitivitySummary};
