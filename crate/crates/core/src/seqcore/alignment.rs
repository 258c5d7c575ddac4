use std::collections::HashMap;

use super::GAP;
use crate::{Error, Result};

/// An ungapped, non-empty residue string with an identifier.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sequence {
    id: String,
    residues: Vec<u8>,
}

impl Sequence {
    pub fn new(id: impl Into<String>, residues: impl Into<Vec<u8>>) -> Result<Self> {
        let residues: Vec<u8> = residues.into();
        if residues.is_empty() {
            return Err(Error::EmptySequence);
        }
        if let Some(&r) = residues.iter().find(|&&r| r == GAP || r.is_ascii_whitespace()) {
            return Err(Error::InvalidResidue {
                id: "<sequence>".into(),
                residue: r as char,
            });
        }
        Ok(Self {
            id: id.into(),
            residues: residues.to_ascii_uppercase(),
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn residues(&self) -> &[u8] {
        &self.residues
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }
}

/// Removes gaps from a gapped row.
pub fn degap(row: &[u8]) -> Result<Vec<u8>> {
    let out: Vec<u8> = row.iter().copied().filter(|&c| c != GAP).collect();
    if out.is_empty() {
        Err(Error::EmptySequence)
    } else {
        Ok(out)
    }
}

/// Drops every column that is a gap in all rows. Rows must be rectangular.
pub fn strip_gap_columns(rows: &mut [Vec<u8>]) {
    let Some(width) = rows.first().map(Vec::len) else {
        return;
    };
    let keep: Vec<bool> = (0..width)
        .map(|c| rows.iter().any(|r| r[c] != GAP))
        .collect();
    if keep.iter().all(|&k| k) {
        return;
    }
    for row in rows.iter_mut() {
        let mut c = 0;
        row.retain(|_| {
            let k = keep[c];
            c += 1;
            k
        });
    }
}

/// A rectangular array of gapped rows, one per source sequence.
///
/// Construction validates the shape and strips all-gap columns, so every
/// `Alignment` value satisfies: equal row widths, no empty row, no column
/// made of gaps only.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alignment {
    ids: Vec<String>,
    rows: Vec<Vec<u8>>,
}

impl Alignment {
    pub fn new(ids: Vec<String>, mut rows: Vec<Vec<u8>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidAlignment("no rows".into()));
        }
        if ids.len() != rows.len() {
            return Err(Error::InvalidAlignment(format!(
                "{} ids for {} rows",
                ids.len(),
                rows.len()
            )));
        }
        let width = rows[0].len();
        for row in &mut rows {
            if row.len() != width {
                return Err(Error::Ragged {
                    expected: width,
                    found: row.len(),
                });
            }
            row.make_ascii_uppercase();
        }
        for (id, row) in ids.iter().zip(&rows) {
            if row.iter().all(|&c| c == GAP) {
                return Err(Error::InvalidAlignment(format!("row `{id}` has no residues")));
            }
        }
        strip_gap_columns(&mut rows);
        Ok(Self { ids, rows })
    }

    /// The trivial one-row alignment of a sequence.
    pub fn single(seq: &Sequence) -> Self {
        Self {
            ids: vec![seq.id().to_string()],
            rows: vec![seq.residues().to_vec()],
        }
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn row(&self, k: usize) -> &[u8] {
        &self.rows[k]
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.rows[0].len()
    }

    pub fn column(&self, c: usize) -> Vec<u8> {
        self.rows.iter().map(|r| r[c]).collect()
    }

    pub fn into_parts(self) -> (Vec<String>, Vec<Vec<u8>>) {
        (self.ids, self.rows)
    }

    pub fn gap_count(&self) -> usize {
        self.rows.iter().flatten().filter(|&&c| c == GAP).count()
    }

    /// Ungapped source sequences, in row order.
    pub fn sequences(&self) -> Vec<Sequence> {
        self.ids
            .iter()
            .zip(&self.rows)
            .map(|(id, row)| Sequence {
                id: id.clone(),
                residues: row.iter().copied().filter(|&c| c != GAP).collect(),
            })
            .collect()
    }

    /// Projection onto a subset of rows, all-gap columns removed.
    pub fn select_rows(&self, which: &[usize]) -> Result<Self> {
        Self::new(
            which.iter().map(|&k| self.ids[k].clone()).collect(),
            which.iter().map(|&k| self.rows[k].clone()).collect(),
        )
    }

    /// Checks that row `k` degaps to `seqs[k]` for every row.
    pub fn check_sources(&self, seqs: &[Sequence]) -> Result<()> {
        if seqs.len() != self.rows.len() {
            return Err(Error::SourceMismatch(format!(
                "{} rows for {} sequences",
                self.rows.len(),
                seqs.len()
            )));
        }
        for ((id, row), seq) in self.ids.iter().zip(&self.rows).zip(seqs) {
            if id != seq.id() || !row.iter().copied().filter(|&c| c != GAP).eq(seq.residues().iter().copied()) {
                return Err(Error::SourceMismatch(format!("row `{id}` vs `{}`", seq.id())));
            }
        }
        Ok(())
    }

    /// Row indices keyed by identifier.
    pub fn id_index(&self) -> HashMap<&str, usize> {
        self.ids.iter().enumerate().map(|(k, id)| (id.as_str(), k)).collect()
    }

    /// Reorders rows to follow `order` (a permutation of row indices).
    pub fn reordered(&self, order: &[usize]) -> Self {
        Self {
            ids: order.iter().map(|&k| self.ids[k].clone()).collect(),
            rows: order.iter().map(|&k| self.rows[k].clone()).collect(),
        }
    }
}
