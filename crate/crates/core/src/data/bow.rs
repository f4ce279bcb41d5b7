use std::collections::HashMap;
use std::io::{BufRead, Write};

use super::{EmbeddingMatrix, LabeledDataset};
use crate::error::{Error, Result};

/// Lowercases `text` and splits it on runs of non-alphanumeric characters.
pub fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
}

/// Term to column mapping. Column `i` holds `terms()[i]`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VocabIndex {
    terms: Vec<String>,
    index: HashMap<String, usize>,
}

impl VocabIndex {
    /// Vocabulary in first-occurrence order over `texts`.
    pub fn fit<S: AsRef<str>>(texts: &[S]) -> Self {
        let mut vocab = VocabIndex::default();
        for text in texts {
            for tok in tokenize(text.as_ref()) {
                if !vocab.index.contains_key(&tok) {
                    vocab.index.insert(tok.clone(), vocab.terms.len());
                    vocab.terms.push(tok);
                }
            }
        }
        vocab
    }

    /// Builds an index over an explicit term list. Duplicates are rejected.
    pub fn from_terms(terms: Vec<String>) -> Result<Self> {
        let mut index = HashMap::with_capacity(terms.len());
        for (i, t) in terms.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate vocabulary term `{t}`")));
            }
        }
        Ok(VocabIndex { terms, index })
    }

    /// Same terms, lexicographically ordered.
    pub fn sorted(&self) -> Self {
        let mut terms = self.terms.clone();
        terms.sort();
        VocabIndex::from_terms(terms).expect("terms are already unique")
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn get(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    /// Raw term counts of each text over this vocabulary. Out-of-vocabulary
    /// tokens are dropped.
    pub fn transform<S: AsRef<str>>(&self, texts: &[S]) -> Result<EmbeddingMatrix> {
        if self.terms.is_empty() {
            return Err(Error::invalid("empty vocabulary"));
        }
        let d = self.terms.len();
        let mut data = vec![0f32; texts.len() * d];
        for (i, text) in texts.iter().enumerate() {
            let row = &mut data[i * d..(i + 1) * d];
            for tok in tokenize(text.as_ref()) {
                if let Some(j) = self.get(&tok) {
                    row[j] += 1.0;
                }
            }
        }
        EmbeddingMatrix::new(texts.len(), d, data)
    }

    /// One term per line.
    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for t in &self.terms {
            writeln!(w, "{t}")?;
        }
        w.flush()
    }

    pub fn read<R: BufRead>(r: R) -> Result<Self> {
        let terms = r
            .lines()
            .collect::<std::io::Result<Vec<_>>>()
            .map_err(|e| Error::Format(e.to_string()))?;
        VocabIndex::from_terms(terms)
    }
}

/// Term-frequency bag-of-words over the dataset texts, vocabulary taken from
/// the whole corpus.
pub fn build_bow(dataset: &LabeledDataset) -> Result<(EmbeddingMatrix, VocabIndex)> {
    let texts = dataset
        .texts()
        .ok_or_else(|| Error::invalid("dataset has no texts to vectorize"))?;
    let vocab = VocabIndex::fit(texts);
    if vocab.is_empty() {
        return Err(Error::invalid("corpus is empty after tokenization"));
    }
    let m = vocab.transform(texts)?;
    Ok((m, vocab))
}
