//! Labeled datasets, embedding matrices and the files they live in.

mod bow;
mod dataset;
mod pooling;
mod vectors;

pub use bow::{build_bow, tokenize, VocabIndex};
pub use dataset::{
    load_dataset, write_dataset_tsv, write_labels_tsv, DatasetFormat, LabeledDataset,
};
pub use pooling::average_pool;
pub use vectors::{
    load_vectors, load_vectors_with_ids, read_vectors, read_vectors_csv, save_vectors,
    write_vectors, write_vectors_csv, EmbeddingMatrix,
};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Uniformly picks `m` of `n` row indices without replacement, returned in
/// ascending order so the sample keeps the source row order.
pub fn sample_indices(n: usize, m: usize, seed: u64) -> Vec<usize> {
    let m = m.min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, n, m).into_vec();
    picked.sort_unstable();
    picked
}
