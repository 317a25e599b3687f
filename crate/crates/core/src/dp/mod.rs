//! Laplace noise, BetweenThresholds, advanced composition, and an empirical
//! privacy auditor.

mod audit;
mod between;
mod laplace;
mod ledger;

pub use audit::{audit_dp, clopper_pearson, AuditReport, Event, EventEstimate, MIN_AUDIT_TRIALS};
pub use between::{bt_init, bt_query, BTOutcome, BTParams, BTState};
pub use laplace::{laplace, laplace_cdf};
pub use ledger::{advanced_composition, compose_advanced, PrivacyLedger};
