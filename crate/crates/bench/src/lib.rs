//! Inputs shared by the benchmarks.

use prisyn_core::fixtures::philosophers;
use prisyn_core::model::System;

/// Dining philosophers tables at the benchmarked sizes.
pub fn tables(sizes: &[usize]) -> Vec<(usize, System)> {
    sizes.iter().map(|&n| (n, philosophers(n))).collect()
}
