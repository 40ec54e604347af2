//! Fixtures shared by the criterion benches.

use lagdelta::sampling::seeded_tensor;
use lagdelta::{CubicForm, PartitionSpec};

/// A seeded tensor together with the partition it is benchmarked against.
pub fn fixture(n: usize, blocks: &[usize], seed: u64) -> (CubicForm, PartitionSpec) {
    let p = PartitionSpec::new(n, blocks.to_vec()).expect("admissible fixture partition");
    (seeded_tensor(n, 1.0, seed), p)
}
