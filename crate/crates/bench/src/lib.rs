//! Fixed inputs shared by the benchmarks.

use riesz_core::corpus::corpus_entry;
use riesz_core::{BallPair, CorpusConfig, Density, DirectionSet, Shape};

/// The unit pair with `R̃ = R` and `δ = 0.1`.
pub fn pair(dim: usize) -> BallPair {
    BallPair::unit(dim, 0.5, 0.1).expect("admissible pair")
}

/// Entry `index` of the default corpus: its analytic shape and ray model.
pub fn corpus_sample(dim: usize, index: usize) -> (Shape, Density) {
    let dirs = DirectionSet::gauss_product(dim, 12).expect("direction set");
    let entry = corpus_entry(&pair(dim), &dirs, &CorpusConfig::new(index + 1, 0), index)
        .expect("corpus entry");
    (entry.shape, entry.density)
}
