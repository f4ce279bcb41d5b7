use super::EmbeddingMatrix;
use crate::error::{Error, Result};

/// Mean of each document's token vectors. Document `i` is the `m × d`
/// matrix `token_vectors[i]`; accumulation is done in `f64`.
pub fn average_pool(token_vectors: &[EmbeddingMatrix]) -> Result<EmbeddingMatrix> {
    let first = token_vectors
        .first()
        .ok_or_else(|| Error::invalid("no documents to pool"))?;
    let dim = first.dim();
    let mut data = Vec::with_capacity(token_vectors.len() * dim);
    let mut acc = vec![0f64; dim];
    for (doc, tokens) in token_vectors.iter().enumerate() {
        if tokens.dim() != dim {
            return Err(Error::Dimension(format!(
                "document {doc} has dimension {}, expected {dim}",
                tokens.dim()
            )));
        }
        if tokens.rows() == 0 {
            return Err(Error::invalid(format!("document {doc} has no tokens")));
        }
        acc.iter_mut().for_each(|a| *a = 0.0);
        for row in tokens.iter_rows() {
            for (a, &v) in acc.iter_mut().zip(row) {
                *a += f64::from(v);
            }
        }
        let m = tokens.rows() as f64;
        data.extend(acc.iter().map(|a| (a / m) as f32));
    }
    EmbeddingMatrix::new(token_vectors.len(), dim, data)
}
