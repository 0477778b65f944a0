//! Exact binomial tails, the reverse Chernoff bound, construction events and
//! the bound chains behind the lower-bound theorems.

pub mod binomial;
pub mod chains;
pub mod chernoff;
pub mod events;

pub use binomial::{binom_tail_ge, binom_tail_le, BinomialRow, Dyadic};
pub use chernoff::{chernoff_grid, reverse_chernoff_bound, reverse_chernoff_log_bound, verify_reverse_chernoff, GridPoint};
pub use events::{estimate_event_rate, event_prob_disc, lemma2_check, EventSpec, FairConstructionKind, FairEvent, FairEventModel, RateEstimate, Side};

pub use chains::{
    disc_chain_report, ef_event_chain_report, jensen_link, prop_event_chain_report, propnew_event_chain_report,
    ChainOptions, DiscChainInput, FairChainInput,
};
