//! Exact analytics for small chains: Dirichlet forms, entropy, restriction
//! to a subset, log-Sobolev estimates and mixing times.

mod chain;
mod fflemma;
mod gap;
mod logsob;
mod mixing;
mod report;

pub use chain::{dirichlet_form, eliminate_state, entropy, harmonic_extension, restrict_chain, FiniteChain};
pub use fflemma::{verify_fflemma, FflemmaInstance, FflemmaReport};
pub use gap::{spectral_gap, spectrum, Spectrum};
pub use logsob::{log_sobolev_estimate, log_sobolev_ratio, AlphaMethod, LogSobolevEstimate};
pub use mixing::{
    log_sobolev_mixing_bound, mixing_time_exact, tv_distance, tv_to_uniform, Loyd3Operator, MixingResult, StartSet,
    StepOperator,
};
pub use report::{spectral_report, SpectralReport};
