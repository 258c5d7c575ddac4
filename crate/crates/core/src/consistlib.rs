//! Weighted residue-pair constraint libraries: construction from global and
//! local pairwise alignments, merging, and triplet extension.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::exactdp::{align_pair_local_topk, align_rows_global};
use crate::guidetree::fractional_identity;
use crate::seqcore::{GapModel, Sequence, SubstitutionMatrix, GAP};
use crate::{Error, Result};

/// Default number of local hits per sequence pair.
pub const DEFAULT_TOPK: usize = 10;

/// Residue-pair weights keyed by `(A, B, i, j)` with `A < B` and 1-based
/// positions. Absent pairs weigh 0; stored weights are positive.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintLibrary {
    ids: Vec<String>,
    lengths: Vec<usize>,
    entries: BTreeMap<(usize, usize, usize, usize), f64>,
}

impl ConstraintLibrary {
    pub fn new(ids: Vec<String>, lengths: Vec<usize>) -> Result<Self> {
        if ids.len() != lengths.len() {
            return Err(Error::InvalidParameter("ids and lengths differ in count".into()));
        }
        Ok(Self {
            ids,
            lengths,
            entries: BTreeMap::new(),
        })
    }

    pub fn for_sequences(seqs: &[Sequence]) -> Self {
        Self {
            ids: seqs.iter().map(|s| s.id().to_string()).collect(),
            lengths: seqs.iter().map(Sequence::len).collect(),
            entries: BTreeMap::new(),
        }
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn key(&self, a: usize, i: usize, b: usize, j: usize) -> Result<(usize, usize, usize, usize)> {
        let n = self.lengths.len();
        if a == b || a >= n || b >= n {
            return Err(Error::InvalidParameter(format!("bad sequence pair ({a}, {b})")));
        }
        if i == 0 || j == 0 || i > self.lengths[a] || j > self.lengths[b] {
            return Err(Error::InvalidParameter(format!("position ({i}, {j}) out of range")));
        }
        Ok(if a < b { (a, b, i, j) } else { (b, a, j, i) })
    }

    /// Adds `w` to the pair's weight. Non-positive weights are ignored.
    pub fn add(&mut self, a: usize, i: usize, b: usize, j: usize, w: f64) -> Result<()> {
        let key = self.key(a, i, b, j)?;
        if w > 0.0 {
            *self.entries.entry(key).or_insert(0.0) += w;
        }
        Ok(())
    }

    pub fn weight(&self, a: usize, i: usize, b: usize, j: usize) -> f64 {
        self.key(a, i, b, j)
            .ok()
            .and_then(|k| self.entries.get(&k).copied())
            .unwrap_or(0.0)
    }

    /// All entries as `((A, B, i, j), w)` in (A, B, i, j) order.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize, usize, usize), f64)> + '_ {
        self.entries.iter().map(|(&k, &w)| (k, w))
    }

    /// Entries between sequences `a < b` as `(i, j, w)`.
    pub fn between(&self, a: usize, b: usize) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.entries
            .range((a, b, 0, 0)..=(a, b, usize::MAX, usize::MAX))
            .map(|(&(_, _, i, j), &w)| (i, j, w))
    }

    /// Text form: a header of sequence ids and lengths, then "A B i j weight" lines.
    pub fn to_text(&self) -> String {
        let mut out = format!("library {}\n", self.ids.len());
        for (id, len) in self.ids.iter().zip(&self.lengths) {
            let _ = writeln!(out, "{id} {len}");
        }
        for ((a, b, i, j), w) in self.entries() {
            let _ = writeln!(out, "{a} {b} {i} {j} {w}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let bad = |l: &str| Error::Parse(format!("library line `{l}`"));
        let head = lines.next().ok_or_else(|| Error::Parse("empty library".into()))?;
        let n: usize = head
            .strip_prefix("library ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| bad(head))?;
        let (mut ids, mut lengths) = (Vec::new(), Vec::new());
        for _ in 0..n {
            let l = lines.next().ok_or_else(|| Error::Parse("truncated library header".into()))?;
            let (id, len) = l.split_once(' ').ok_or_else(|| bad(l))?;
            ids.push(id.to_string());
            lengths.push(len.trim().parse().map_err(|_| bad(l))?);
        }
        let mut lib = Self::new(ids, lengths)?;
        for l in lines {
            let f: Vec<&str> = l.split_whitespace().collect();
            if f.len() != 5 {
                return Err(bad(l));
            }
            let ints: Vec<usize> = f[..4].iter().map(|x| x.parse()).collect::<std::result::Result<_, _>>().map_err(|_| bad(l))?;
            let w: f64 = f[4].parse().map_err(|_| bad(l))?;
            lib.add(ints[0], ints[2], ints[1], ints[3], w)?;
        }
        Ok(lib)
    }
}

/// Percent identity of a pairwise alignment, applied to each of its residue pairs.
pub fn pair_weight(a: &[u8], b: &[u8]) -> f64 {
    100.0 * fractional_identity(a, b)
}

fn pairs_of(rows: &[Vec<u8>]) -> Vec<(usize, usize)> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    for (&x, &y) in rows[0].iter().zip(&rows[1]) {
        if x != GAP {
            i += 1;
        }
        if y != GAP {
            j += 1;
        }
        if x != GAP && y != GAP {
            out.push((i, j));
        }
    }
    out
}

fn seq_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect()
}

/// Library of global pairwise alignments, one per sequence pair.
pub fn global_library(seqs: &[Sequence], m: &SubstitutionMatrix, g: &GapModel) -> Result<ConstraintLibrary> {
    let found = seq_pairs(seqs.len())
        .into_par_iter()
        .map(|(a, b)| {
            let (rows, _) = align_rows_global(seqs[a].residues(), seqs[b].residues(), m, g)?;
            Ok((a, b, pair_weight(&rows[0], &rows[1]), pairs_of(&rows)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut lib = ConstraintLibrary::for_sequences(seqs);
    for (a, b, w, pairs) in found {
        for (i, j) in pairs {
            lib.add(a, i, b, j, w)?;
        }
    }
    Ok(lib)
}

/// Library of up to `topk` non-intersecting local hits per sequence pair.
pub fn local_library(seqs: &[Sequence], m: &SubstitutionMatrix, g: &GapModel, topk: usize) -> Result<ConstraintLibrary> {
    let found = seq_pairs(seqs.len())
        .into_par_iter()
        .map(|(a, b)| {
            let (x, y) = (seqs[a].residues(), seqs[b].residues());
            let hits = align_pair_local_topk(x, y, m, g, topk)?;
            Ok(hits
                .into_iter()
                .map(|h| (a, b, 100.0 * h.identity(x, y), h.pairs))
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut lib = ConstraintLibrary::for_sequences(seqs);
    for (a, b, w, pairs) in found.into_iter().flatten() {
        for (i, j) in pairs {
            lib.add(a, i + 1, b, j + 1, w)?;
        }
    }
    Ok(lib)
}

/// Global and local libraries merged.
pub fn build_primary_library(
    seqs: &[Sequence],
    m: &SubstitutionMatrix,
    g: &GapModel,
    topk: usize,
) -> Result<ConstraintLibrary> {
    if seqs.len() < 2 {
        return Err(Error::InvalidParameter("a library needs at least 2 sequences".into()));
    }
    merge_libraries(&global_library(seqs, m, g)?, &local_library(seqs, m, g, topk)?)
}

/// Union of entries, summing weights on shared keys.
pub fn merge_libraries(a: &ConstraintLibrary, b: &ConstraintLibrary) -> Result<ConstraintLibrary> {
    if a.lengths != b.lengths {
        return Err(Error::UniverseMismatch);
    }
    let mut out = a.clone();
    for (k, w) in b.entries() {
        *out.entries.entry(k).or_insert(0.0) += w;
    }
    Ok(out)
}

/// Triplet extension: each pair (A_i, B_j) gains min(W(A_i, C_k), W(C_k, B_j))
/// for every intermediate residue C_k linked to both.
pub fn extend_library(lib: &ConstraintLibrary) -> ConstraintLibrary {
    extend_library_counted(lib).0
}

/// As [`extend_library`], also returning the number of triplets visited.
pub fn extend_library_counted(lib: &ConstraintLibrary) -> (ConstraintLibrary, u64) {
    let n = lib.lengths.len();
    // adjacency per residue: (other sequence, position, weight)
    let mut adj: Vec<Vec<Vec<(usize, usize, f64)>>> = lib.lengths.iter().map(|&l| vec![Vec::new(); l + 1]).collect();
    for ((a, b, i, j), w) in lib.entries() {
        adj[a][i].push((b, j, w));
        adj[b][j].push((a, i, w));
    }
    let parts: Vec<(BTreeMap<(usize, usize, usize, usize), f64>, u64)> = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut gained = BTreeMap::new();
            let mut visits = 0u64;
            for i in 1..=lib.lengths[a] {
                for &(c, k, w1) in &adj[a][i] {
                    for &(b, j, w2) in &adj[c][k] {
                        visits += 1;
                        if b > a {
                            *gained.entry((a, b, i, j)).or_insert(0.0) += w1.min(w2);
                        }
                    }
                }
            }
            (gained, visits)
        })
        .collect();
    let mut out = lib.clone();
    let mut visits = 0;
    for (gained, v) in parts {
        visits += v;
        for (k, w) in gained {
            *out.entries.entry(k).or_insert(0.0) += w;
        }
    }
    (out, visits)
}
