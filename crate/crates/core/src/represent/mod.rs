//! Rewriting moves of one chain as words in the generators of another, and
//! the comparison constants these rewritings produce.

mod comparison;
mod layer;
mod rt_hc;
mod strip;
mod torus_layers;
mod window;

pub use comparison::{
    comparison_constant_exact, comparison_constant_mc, dirichlet_comparison_check, layer_chains, ComparisonMethod,
    ComparisonReport, ComparisonRow, DirichletCheck,
};
pub use layer::{Layer, LayerTag};
pub use rt_hc::RtHcLayer;
pub use strip::{strip_hole_path, swap_plan};
pub use torus_layers::{bgb_word, nl_letter_as_unit_moves, TorusLayer};
pub use window::window_swap;

use crate::error::Result;
use crate::rng::SimRng;

/// Outcome of checking sampled representations of one layer.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct VerificationSummary {
    pub layer: LayerTag,
    pub n: usize,
    pub samples: usize,
    pub failures: usize,
    pub max_length: usize,
    pub mean_length: f64,
}

/// Samples `samples` source moves, represents each and checks evaluation and
/// target legality.
pub fn verify_layer<L: Layer>(layer: &L, samples: usize, rng: &mut SimRng) -> Result<VerificationSummary> {
    let mut failures = 0;
    let mut max_length = 0;
    let mut total = 0usize;
    for _ in 0..samples {
        let y = layer.sample_source(rng)?;
        let rep = layer.represent(&y, rng)?;
        max_length = max_length.max(rep.len());
        total += rep.len();
        if !layer.verify(&y, &rep) {
            failures += 1;
        }
    }
    Ok(VerificationSummary {
        layer: layer.tag(),
        n: layer.n(),
        samples,
        failures,
        max_length,
        mean_length: total as f64 / samples.max(1) as f64,
    })
}
