//! Case studies: muddy children, the Needham-Schroeder protocol and a QBF
//! reduction used as a stress-test generator.

mod muddy;
mod ns;
mod qbf;

pub use muddy::{
    muddy_build, muddy_run, muddy_time, MuddyInstance, MuddyReport, RoundReport, TimingRow, MAX_CHILDREN,
};
pub use ns::{ns_build, ns_strict_verify, ns_verify, NsInstance, NsReport, NsSpec, NsVariant};
pub use qbf::{qbf_brute_force, qbf_check, qbf_generate, qbf_instance, QbfInstance};
