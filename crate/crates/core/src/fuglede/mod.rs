//! Constants of the quantitative isoperimetric estimate, the spectral gap
//! lemma, and numerical verification of the inequality.

pub mod constants;
pub mod lemma;
pub mod scans;
pub mod verify;

pub use constants::ConstantsTable;
pub use lemma::{lemma_gap, LemmaGap};
pub use scans::{constant_scans, ScanReport};
pub use verify::{
    second_variation, verify_theorem, verify_theorem_with, SecondVariation, VerificationReport,
};
