//! Benchmark fixtures: seeded synthetic streams at the experiment defaults.

use tprism_core::generators::{GeneratorConfig, Model};
use tprism_core::{build_kst, ContactSequence, PrismComplex, WeightConfig};

/// Binned synthetic stream with `n = 25`, `T = 50` and bin width 5.
pub fn stream(model: &str, seed: u64) -> ContactSequence {
    let cfg = GeneratorConfig {
        n_nodes: 25,
        horizon: 50.0,
        model: Model::default_for(model).expect("known model"),
        seed,
    };
    cfg.generate().expect("valid config").bin(5.0).expect("valid bin width")
}

/// Prism complex with `K = 3` and default weights.
pub fn complex(model: &str, seed: u64) -> PrismComplex {
    build_kst(&stream(model, seed), 3, WeightConfig::default()).expect("valid build")
}
