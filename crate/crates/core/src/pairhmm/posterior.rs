use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use super::{forward_backward, PairHmmParams};
use crate::dp::{self, Step};
use crate::seqcore::{Alignment, Sequence};
use crate::{Error, Result};

/// Sparse |x| × |y| matrix of match probabilities, 0-based, rows sorted by column.
#[derive(Clone, Debug, PartialEq)]
pub struct PosteriorMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<(usize, f64)>>,
}

impl PosteriorMatrix {
    pub fn from_rows(rows: usize, cols: usize, entries: Vec<Vec<(usize, f64)>>) -> Self {
        debug_assert_eq!(entries.len(), rows);
        Self { rows, cols, entries }
    }

    /// Keeps dense entries greater than `eps`.
    pub fn from_dense(dense: &[Vec<f64>], eps: f64) -> Self {
        let cols = dense.first().map_or(0, Vec::len);
        let entries = dense
            .iter()
            .map(|r| r.iter().enumerate().filter(|&(_, &p)| p > eps).map(|(j, &p)| (j, p)).collect())
            .collect();
        Self::from_rows(dense.len(), cols, entries)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_rows(n, n, (0..n).map(|i| vec![(i, 1.0)]).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.entries[i]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let row = &self.entries[i];
        row.binary_search_by_key(&j, |&(c, _)| c).map_or(0.0, |k| row[k].1)
    }

    pub fn nnz(&self) -> usize {
        self.entries.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.cols]; self.rows];
        for (i, row) in self.entries.iter().enumerate() {
            for &(j, p) in row {
                d[i][j] = p;
            }
        }
        d
    }

    pub fn transpose(&self) -> Self {
        let mut entries = vec![Vec::new(); self.cols];
        for (i, row) in self.entries.iter().enumerate() {
            for &(j, p) in row {
                entries[j].push((i, p));
            }
        }
        Self::from_rows(self.cols, self.rows, entries)
    }

    /// "i j p" triples (1-based) after a `posterior <rows> <cols>` header.
    pub fn to_text(&self) -> String {
        let mut out = format!("posterior {} {}\n", self.rows, self.cols);
        for (i, row) in self.entries.iter().enumerate() {
            for &(j, p) in row {
                let _ = writeln!(out, "{} {} {}", i + 1, j + 1, p);
            }
        }
        out
    }
}

/// Result of maximum-expected-accuracy decoding.
#[derive(Clone, Debug, PartialEq)]
pub struct MeaResult {
    /// Aligned (i, j) pairs, 0-based.
    pub pairs: Vec<(usize, usize)>,
    /// Summed posterior of the pairs over min(|x|, |y|).
    pub expected_accuracy: f64,
    pub(crate) path: Vec<Step>,
}

/// MEA alignment: A(i,j) = max{A(i−1,j−1) + P(i,j), A(i−1,j), A(i,j−1)}.
pub fn mea_align(p: &PosteriorMatrix) -> MeaResult {
    let dense = p.to_dense();
    let (path, total) = dp::max_sum_path(p.rows, p.cols, |i, j| dense[i][j]);
    MeaResult {
        pairs: dp::path_pairs(&path),
        expected_accuracy: total / p.rows.min(p.cols).max(1) as f64,
        path,
    }
}

/// MEA alignment of two sequences as a 2-row [`Alignment`].
pub fn mea_alignment(x: &Sequence, y: &Sequence, p: &PosteriorMatrix) -> Result<(Alignment, f64)> {
    if p.rows != x.len() || p.cols != y.len() {
        return Err(Error::LengthMismatch(p.rows, x.len()));
    }
    let r = mea_align(p);
    let rows = dp::merge_rows(&[x.residues().to_vec()], &[y.residues().to_vec()], &r.path);
    Ok((Alignment::new(vec![x.id().into(), y.id().into()], rows)?, r.expected_accuracy))
}

/// Posterior matrices for every unordered sequence pair, with identity self-pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct PosteriorSet {
    lengths: Vec<usize>,
    pairs: BTreeMap<(usize, usize), PosteriorMatrix>,
}

impl PosteriorSet {
    pub fn new(lengths: Vec<usize>) -> Self {
        Self {
            lengths,
            pairs: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    /// Stores P_xy for x < y; the reverse orientation is derived.
    pub fn insert(&mut self, x: usize, y: usize, p: PosteriorMatrix) -> Result<()> {
        let (x, y, p) = if x < y { (x, y, p) } else { (y, x, p.transpose()) };
        if x == y || p.rows != self.lengths[x] || p.cols != self.lengths[y] {
            return Err(Error::InvalidParameter(format!("matrix shape does not fit pair ({x}, {y})")));
        }
        self.pairs.insert((x, y), p);
        Ok(())
    }

    /// P_xy in x-major orientation; the identity when x = y.
    pub fn get(&self, x: usize, y: usize) -> Result<PosteriorMatrix> {
        use std::cmp::Ordering::*;
        match x.cmp(&y) {
            Equal => Ok(PosteriorMatrix::identity(self.lengths[x])),
            Less => self.pairs.get(&(x, y)).cloned().ok_or(Error::MissingPair(x, y)),
            Greater => self.pairs.get(&(y, x)).map(PosteriorMatrix::transpose).ok_or(Error::MissingPair(y, x)),
        }
    }

    /// Stored matrix for x < y without copying.
    pub fn stored(&self, x: usize, y: usize) -> Option<&PosteriorMatrix> {
        self.pairs.get(&(x, y))
    }

    fn check_complete(&self) -> Result<()> {
        let n = self.len();
        for x in 0..n {
            for y in x + 1..n {
                if !self.pairs.contains_key(&(x, y)) {
                    return Err(Error::MissingPair(x, y));
                }
            }
        }
        Ok(())
    }
}

/// Posteriors for every pair of `seqs`, computed in parallel.
pub fn compute_posteriors(seqs: &[Sequence], params: &PairHmmParams, eps: f64) -> Result<PosteriorSet> {
    let pairs: Vec<(usize, usize)> = (0..seqs.len()).flat_map(|x| (x + 1..seqs.len()).map(move |y| (x, y))).collect();
    let mats = pairs
        .par_iter()
        .map(|&(x, y)| forward_backward(seqs[x].residues(), seqs[y].residues(), params, eps).map(|r| r.0))
        .collect::<Result<Vec<_>>>()?;
    let mut set = PosteriorSet::new(seqs.iter().map(Sequence::len).collect());
    for (&(x, y), p) in pairs.iter().zip(mats) {
        set.insert(x, y, p)?;
    }
    Ok(set)
}

/// E(x, y) for every pair; the diagonal is 1.
pub fn expected_accuracy_table(set: &PosteriorSet) -> Result<Vec<Vec<f64>>> {
    set.check_complete()?;
    let n = set.len();
    let mut e = vec![vec![1.0; n]; n];
    for x in 0..n {
        for y in x + 1..n {
            let v = mea_align(set.stored(x, y).expect("complete set")).expected_accuracy;
            e[x][y] = v;
            e[y][x] = v;
        }
    }
    Ok(e)
}

/// `rounds` applications of P'_xy = (1/|S|) Σ_z P_xz P_zy with self-pairs as
/// the identity. Entries ≤ `eps` are dropped after each round and the rest
/// clamped to [0, 1].
pub fn consistency_transform(set: &PosteriorSet, eps: f64, rounds: usize) -> Result<PosteriorSet> {
    set.check_complete()?;
    let mut cur = set.clone();
    for _ in 0..rounds {
        cur = transform_round(&cur, eps)?;
    }
    Ok(cur)
}

fn transform_round(set: &PosteriorSet, eps: f64) -> Result<PosteriorSet> {
    let n = set.len();
    let keys: Vec<(usize, usize)> = set.pairs.keys().copied().collect();
    let scale = 1.0 / n as f64;
    let out = keys
        .par_iter()
        .map(|&(x, y)| {
            let pxy = &set.pairs[&(x, y)];
            let (lx, ly) = (set.lengths[x], set.lengths[y]);
            let mut acc = vec![vec![0.0f64; ly]; lx];
            // z = x and z = y each contribute P_xy itself
            for (i, row) in pxy.entries.iter().enumerate() {
                for &(j, p) in row {
                    acc[i][j] += 2.0 * p;
                }
            }
            for z in (0..n).filter(|&z| z != x && z != y) {
                let pxz = set.get(x, z)?;
                let pzy = set.get(z, y)?;
                for (i, row) in pxz.entries.iter().enumerate() {
                    for &(k, a) in row {
                        for &(j, b) in &pzy.entries[k] {
                            acc[i][j] += a * b;
                        }
                    }
                }
            }
            let entries = acc
                .into_iter()
                .map(|row| {
                    row.into_iter()
                        .enumerate()
                        .map(|(j, v)| (j, (v * scale).clamp(0.0, 1.0)))
                        .filter(|&(_, v)| v > eps)
                        .collect()
                })
                .collect();
            Ok(((x, y), PosteriorMatrix::from_rows(lx, ly, entries)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PosteriorSet {
        lengths: set.lengths.clone(),
        pairs: out.into_iter().collect(),
    })
}
