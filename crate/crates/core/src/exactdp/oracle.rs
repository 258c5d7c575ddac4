//! Exhaustive enumeration of every alignment of a few short sequences.
//! Used as a reference for the DP aligners.

use crate::objective::{column_delta, ColumnScorer};
use crate::seqcore::GAP;
use crate::{Error, Result};

pub const MAX_PAIR_LEN: usize = 7;
pub const MAX_TRIPLE_LEN: usize = 5;

fn check_bounds(seqs: &[&[u8]]) -> Result<()> {
    let limit = match seqs.len() {
        2 => MAX_PAIR_LEN,
        3 => MAX_TRIPLE_LEN,
        n => return Err(Error::EnumerationBound(format!("{n} sequences (2 or 3 supported)"))),
    };
    for s in seqs {
        if s.is_empty() {
            return Err(Error::EmptySequence);
        }
        if s.len() > limit {
            return Err(Error::EnumerationBound(format!(
                "length {} exceeds {limit} for {} sequences",
                s.len(),
                seqs.len()
            )));
        }
    }
    Ok(())
}

/// Calls `f` with the rows of every alignment of `seqs` (no all-gap columns).
pub fn for_each_alignment(seqs: &[&[u8]], mut f: impl FnMut(&[Vec<u8>])) -> Result<()> {
    check_bounds(seqs)?;
    let mut rows: Vec<Vec<u8>> = vec![Vec::new(); seqs.len()];
    let mut pos = vec![0usize; seqs.len()];
    walk(seqs, &mut rows, &mut pos, &mut f);
    Ok(())
}

fn walk(seqs: &[&[u8]], rows: &mut [Vec<u8>], pos: &mut [usize], f: &mut impl FnMut(&[Vec<u8>])) {
    let open: Vec<usize> = (0..seqs.len()).filter(|&k| pos[k] < seqs[k].len()).collect();
    if open.is_empty() {
        f(rows);
        return;
    }
    // every non-empty subset of the unfinished sequences emits one column
    for mask in 1u32..(1 << open.len()) {
        let mut take = vec![false; seqs.len()];
        for (b, &k) in open.iter().enumerate() {
            take[k] = mask & (1 << b) != 0;
        }
        for k in 0..seqs.len() {
            if take[k] {
                rows[k].push(seqs[k][pos[k]]);
                pos[k] += 1;
            } else {
                rows[k].push(GAP);
            }
        }
        walk(seqs, rows, pos, f);
        for k in 0..seqs.len() {
            rows[k].pop();
            if take[k] {
                pos[k] -= 1;
            }
        }
    }
}

/// Best column-additive score over all alignments of 2 or 3 sequences.
pub fn enumerate_optimal(seqs: &[&[u8]], scorer: &ColumnScorer) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    let mut col = Vec::with_capacity(seqs.len());
    for_each_alignment(seqs, |rows| {
        let mut total = 0.0;
        for c in 0..rows[0].len() {
            col.clear();
            col.extend(rows.iter().map(|r| r[c]));
            total += column_delta(&col, scorer).expect("enumerated columns hold a residue");
        }
        if total > best {
            best = total;
        }
    })?;
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::{Alphabet, SubstitutionMatrix};

    #[test]
    fn counts_match_delannoy_numbers() {
        let mut n = 0;
        for_each_alignment(&[b"AA", b"AA"], |_| n += 1).unwrap();
        assert_eq!(n, 13);
        n = 0;
        for_each_alignment(&[b"A", b"A", b"A"], |_| n += 1).unwrap();
        // 3-D Delannoy number D(1,1,1)
        assert_eq!(n, 13);
    }

    #[test]
    fn examples() {
        let m = SubstitutionMatrix::simple(Alphabet::nucleotide(), 1.0, -1.0).unwrap();
        let sc = ColumnScorer::new(&m, -1.0);
        assert_eq!(enumerate_optimal(&[b"A", b"A"], &sc).unwrap(), 1.0);
        assert_eq!(enumerate_optimal(&[b"A", b"A", b"A"], &sc).unwrap(), 3.0);
        assert!(matches!(
            enumerate_optimal(&[b"AAAAAAAA", b"A"], &sc),
            Err(Error::EnumerationBound(_))
        ));
        assert!(enumerate_optimal(&[b"AAAAAA", b"A", b"A"], &sc).is_err());
    }
}
