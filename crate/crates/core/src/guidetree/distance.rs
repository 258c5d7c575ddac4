use std::collections::HashMap;

use rayon::prelude::*;

use crate::seqcore::{Sequence, GAP};
use crate::{Error, Result};

/// Shared k-mer fraction F = Σ_τ min(n_x(τ), n_y(τ)) / (min(L_x, L_y) − k + 1).
pub fn kmer_similarity(x: &[u8], y: &[u8], k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let short = x.len().min(y.len());
    if short < k {
        return Err(Error::TooShort { len: short, k });
    }
    let counts = kmer_counts(x, k);
    let mut shared = 0u32;
    for (word, ny) in kmer_counts(y, k) {
        if let Some(&nx) = counts.get(word) {
            shared += nx.min(ny);
        }
    }
    Ok(shared as f64 / (short - k + 1) as f64)
}

/// Occurrence counts of every length-`k` word.
pub fn kmer_counts(x: &[u8], k: usize) -> HashMap<&[u8], u32> {
    let mut counts = HashMap::new();
    for w in x.windows(k) {
        *counts.entry(w).or_insert(0) += 1;
    }
    counts
}

/// Identical residue-residue columns over residue-residue columns.
pub fn fractional_identity(a: &[u8], b: &[u8]) -> f64 {
    let (mut same, mut total) = (0usize, 0usize);
    for (&x, &y) in a.iter().zip(b) {
        if x != GAP && y != GAP {
            total += 1;
            same += (x == y) as usize;
        }
    }
    if total == 0 {
        0.0
    } else {
        same as f64 / total as f64
    }
}

const KIMURA_FLOOR: f64 = 0.05;

/// Kimura's protein distance from fractional identity D: with p = 1 − D,
/// d = −ln(1 − p − p²/5), the log argument floored at 0.05.
pub fn kimura_distance(identity: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&identity) {
        return Err(Error::InvalidParameter(format!("identity {identity} outside [0, 1]")));
    }
    let p = 1.0 - identity;
    let arg = 1.0 - p - p * p / 5.0;
    Ok(if arg <= KIMURA_FLOOR { -KIMURA_FLOOR.ln() } else { -arg.ln() }.max(0.0))
}

pub fn similarity_to_distance(f: f64) -> f64 {
    1.0 - f
}

/// Symmetric, non-negative distances with a zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    ids: Vec<String>,
    d: Vec<f64>,
}

impl DistanceMatrix {
    pub fn new(ids: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = ids.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter("distance matrix must be square".into()));
        }
        for i in 0..n {
            if rows[i][i] != 0.0 {
                return Err(Error::InvalidParameter(format!("non-zero diagonal at {i}")));
            }
            for j in 0..n {
                let v = rows[i][j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidParameter(format!("bad distance {v} at ({i}, {j})")));
                }
                if (v - rows[j][i]).abs() > 1e-12 {
                    return Err(Error::InvalidParameter(format!("asymmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self {
            ids,
            d: rows.into_iter().flatten().collect(),
        })
    }

    /// Fills the upper triangle from `f(i, j)` (computed in parallel) and mirrors it.
    pub fn from_fn(ids: Vec<String>, f: impl Fn(usize, usize) -> Result<f64> + Sync) -> Result<Self> {
        let n = ids.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let values: Vec<f64> = pairs.par_iter().map(|&(i, j)| f(i, j)).collect::<Result<_>>()?;
        let mut rows = vec![vec![0.0; n]; n];
        for (&(i, j), v) in pairs.iter().zip(values) {
            rows[i][j] = v;
            rows[j][i] = v;
        }
        Self::new(ids, rows)
    }

    /// Distances 1 − F from k-mer similarity.
    pub fn from_kmers(seqs: &[Sequence], k: usize) -> Result<Self> {
        Self::from_fn(ids_of(seqs), |i, j| {
            Ok(similarity_to_distance(kmer_similarity(seqs[i].residues(), seqs[j].residues(), k)?))
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.ids.len() + j]
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for id in &self.ids {
            out.push('\t');
            out.push_str(id);
        }
        out.push('\n');
        for (i, id) in self.ids.iter().enumerate() {
            out.push_str(id);
            for j in 0..self.len() {
                out.push_str(&format!("\t{}", self.get(i, j)));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty distance table".into()))?;
        let ids: Vec<String> = header.split('\t').skip(1).map(str::to_string).collect();
        let mut rows = Vec::with_capacity(ids.len());
        for (k, line) in lines.enumerate() {
            let mut cells = line.split('\t');
            let id = cells.next().unwrap_or_default();
            if ids.get(k).map(String::as_str) != Some(id) {
                return Err(Error::Parse(format!("row {} is `{id}`, header disagrees", k + 1)));
            }
            let row = cells
                .map(|c| c.trim().parse::<f64>().map_err(|e| Error::Parse(format!("`{c}`: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Self::new(ids, rows)
    }
}

pub(crate) fn ids_of(seqs: &[Sequence]) -> Vec<String> {
    seqs.iter().map(|s| s.id().to_string()).collect()
}
