//! Small-tournament exploration: isomorphism classes, mechanical checks of
//! the dijoin theorems, and evidence scans for open conjectures.

mod canon;
mod report;
mod scans;
mod schur;

pub use canon::{
    canonical_form, enumerate_tournaments, iso_classes, labeled_tournaments, CanonicalForm, MAX_CANONICAL_N,
    MAX_ISO_N, MAX_LABELED_N,
};
pub use report::{Inconclusive, ScanReport, ScanScope, Violation, SCHEMA};
pub use scans::{scan_inv_lower_bound, scan_tmr_additivity, verify_dijoin_theorems, FactTable, Facts};
pub use schur::{scan_schur, schur_probe, schur_probe_at, Sampling, SchurRecord};
