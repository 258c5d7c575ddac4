//! Alignment quality scores.

use std::collections::HashSet;

use crate::seqcore::{Alignment, GapModel, SubstitutionMatrix, GAP};
use crate::{Error, Result};

/// Scores one column as the sum over all unordered entry pairs.
#[derive(Clone, Copy, Debug)]
pub struct ColumnScorer<'a> {
    matrix: &'a SubstitutionMatrix,
    gap_residue: f64,
}

impl<'a> ColumnScorer<'a> {
    /// `gap_residue` is the score of a gap paired with a residue; gap-gap pairs score 0.
    pub fn new(matrix: &'a SubstitutionMatrix, gap_residue: f64) -> Self {
        Self { matrix, gap_residue }
    }

    pub fn matrix(&self) -> &SubstitutionMatrix {
        self.matrix
    }

    pub fn gap_residue(&self) -> f64 {
        self.gap_residue
    }

    #[inline]
    pub fn pair(&self, a: u8, b: u8) -> f64 {
        match (a == GAP, b == GAP) {
            (true, true) => 0.0,
            (true, false) | (false, true) => self.gap_residue,
            (false, false) => self.matrix.score(a, b),
        }
    }
}

/// Column score δ: pair sum over the entries of one column.
pub fn column_delta(letters: &[u8], scorer: &ColumnScorer) -> Result<f64> {
    if letters.len() < 2 {
        return Err(Error::InvalidParameter("a column needs at least two entries".into()));
    }
    if letters.iter().all(|&c| c == GAP) {
        return Err(Error::AllGapColumn);
    }
    let mut total = 0.0;
    for i in 0..letters.len() {
        for j in i + 1..letters.len() {
            total += scorer.pair(letters[i], letters[j]);
        }
    }
    Ok(total)
}

/// Affine-gap score of two gapped rows of equal width. Columns gapped in
/// both rows are skipped; gap runs touching either end follow the model's
/// terminal policy.
pub fn pair_rows_score(a: &[u8], b: &[u8], m: &SubstitutionMatrix, g: &GapModel) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let cols: Vec<(u8, u8)> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| (x, y))
        .filter(|&(x, y)| !(x == GAP && y == GAP))
        .collect();
    let last = cols.len();
    let mut total = 0.0;
    // (which row is gapped, run start, run length)
    let mut run: Option<(bool, usize, usize)> = None;
    for (c, &(x, y)) in cols.iter().enumerate() {
        let gapped = match (x == GAP, y == GAP) {
            (false, false) => None,
            (true, false) => Some(true),
            (false, true) => Some(false),
            (true, true) => unreachable!(),
        };
        match (run, gapped) {
            (Some((row, start, len)), Some(now)) if row == now => run = Some((row, start, len + 1)),
            (prev, now) => {
                if let Some((_, start, len)) = prev {
                    total += g.run(len, start == 0);
                }
                run = now.map(|row| (row, c, 1));
                if now.is_none() {
                    total += m.score(x, y);
                }
            }
        }
    }
    if let Some((_, start, len)) = run {
        total += g.run(len, start == 0 || start + len == last);
    }
    Ok(total)
}

/// Score of a two-row alignment.
pub fn pair_alignment_score(a: &Alignment, m: &SubstitutionMatrix, g: &GapModel) -> Result<f64> {
    if a.num_rows() != 2 {
        return Err(Error::InvalidParameter(format!(
            "pair score needs 2 rows, got {}",
            a.num_rows()
        )));
    }
    pair_rows_score(a.row(0), a.row(1), m, g)
}

/// Sum over all row pairs of their projected pairwise scores.
pub fn sp_score_rows(rows: &[Vec<u8>], m: &SubstitutionMatrix, g: &GapModel) -> Result<f64> {
    let mut total = 0.0;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            total += pair_rows_score(&rows[i], &rows[j], m, g)?;
        }
    }
    Ok(total)
}

/// Sum-of-pairs score.
pub fn sp_score(a: &Alignment, m: &SubstitutionMatrix, g: &GapModel) -> Result<f64> {
    if a.num_rows() < 2 {
        return Err(Error::InvalidParameter("SP score needs at least 2 rows".into()));
    }
    sp_score_rows(a.rows(), m, g)
}

/// Identity count between two gapped rows: 1 per column of identical residues.
pub fn ga_cost(s: &[u8], t: &[u8]) -> Result<f64> {
    if s.len() != t.len() {
        return Err(Error::LengthMismatch(s.len(), t.len()));
    }
    Ok(s.iter().zip(t).filter(|&(&x, &y)| x == y && x != GAP).count() as f64)
}

/// Multi-row identity fitness: [`ga_cost`] summed over row pairs.
pub fn ga_fitness(a: &Alignment) -> f64 {
    let rows = a.rows();
    let mut total = 0usize;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            total += rows[i]
                .iter()
                .zip(&rows[j])
                .filter(|&(&x, &y)| x == y && x != GAP)
                .count();
        }
    }
    total as f64
}

/// Aligned residue pairs `(row_i, pos_i, row_j, pos_j)` with `row_i < row_j`,
/// positions 0-based in the ungapped sequences.
pub fn aligned_pairs(rows: &[Vec<u8>]) -> HashSet<(usize, usize, usize, usize)> {
    let mut pairs = HashSet::new();
    let width = rows.first().map_or(0, Vec::len);
    let mut pos = vec![0usize; rows.len()];
    for c in 0..width {
        for i in 0..rows.len() {
            if rows[i][c] == GAP {
                continue;
            }
            for j in i + 1..rows.len() {
                if rows[j][c] != GAP {
                    pairs.insert((i, pos[i], j, pos[j]));
                }
            }
        }
        for (k, row) in rows.iter().enumerate() {
            if row[c] != GAP {
                pos[k] += 1;
            }
        }
    }
    pairs
}

/// Fraction of the reference's aligned residue pairs that the test alignment
/// also aligns. Rows are matched by id; 0 when the reference aligns no pair.
pub fn q_score(test: &Alignment, reference: &Alignment) -> Result<f64> {
    if test.num_rows() != reference.num_rows() {
        return Err(Error::SourceMismatch(format!(
            "{} test rows vs {} reference rows",
            test.num_rows(),
            reference.num_rows()
        )));
    }
    let index = test.id_index();
    let test_seqs = test.sequences();
    let mut order = Vec::with_capacity(reference.num_rows());
    for seq in reference.sequences() {
        let k = *index
            .get(seq.id())
            .ok_or_else(|| Error::SourceMismatch(format!("`{}` missing from test", seq.id())))?;
        if test_seqs[k].residues() != seq.residues() {
            return Err(Error::SourceMismatch(format!("residues of `{}` differ", seq.id())));
        }
        order.push(k);
    }
    let reference_pairs = aligned_pairs(reference.rows());
    if reference_pairs.is_empty() {
        return Ok(0.0);
    }
    let test_pairs = aligned_pairs(test.reordered(&order).rows());
    let shared = reference_pairs.iter().filter(|p| test_pairs.contains(p)).count();
    Ok(shared as f64 / reference_pairs.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::{Alphabet, TerminalGaps};

    fn unit(symbols: &[u8]) -> SubstitutionMatrix {
        SubstitutionMatrix::simple(Alphabet::new(symbols).unwrap(), 1.0, 0.0).unwrap()
    }

    fn aln(rows: &[&str]) -> Alignment {
        Alignment::new(
            (0..rows.len()).map(|k| format!("s{k}")).collect(),
            rows.iter().map(|r| r.as_bytes().to_vec()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn delta_examples() {
        let m = unit(b"AC");
        let sc = ColumnScorer::new(&m, -1.0);
        assert_eq!(column_delta(b"AAA", &sc).unwrap(), 3.0);
        assert_eq!(column_delta(b"AA-", &sc).unwrap(), -1.0);
        assert_eq!(column_delta(b"---", &sc), Err(Error::AllGapColumn));
    }

    #[test]
    fn pair_examples() {
        let m = unit(b"ABC");
        let pen = GapModel::new(-2.0, -1.0, TerminalGaps::Penalized).unwrap();
        assert_eq!(pair_rows_score(b"AC", b"AC", &m, &pen).unwrap(), 2.0);
        assert_eq!(pair_rows_score(b"A-C", b"ABC", &m, &pen).unwrap(), 0.0);
        let free = GapModel::new(-2.0, -1.0, TerminalGaps::Free).unwrap();
        assert_eq!(pair_rows_score(b"AA--", b"--AA", &m, &free).unwrap(), 0.0);
        // two terminal runs of length 2 at -3 each when penalised
        assert_eq!(pair_rows_score(b"AA--", b"--AA", &m, &pen).unwrap(), -6.0);
        // mutual gap columns vanish; adjacent opposite runs are separate
        assert_eq!(pair_rows_score(b"A-B-C", b"A--BC", &m, &pen).unwrap(), 2.0 - 4.0);
    }

    #[test]
    fn sp_examples() {
        let m = SubstitutionMatrix::simple(Alphabet::new(b"AC").unwrap(), 2.0, 0.0).unwrap();
        let g = GapModel::linear(-1.0);
        assert_eq!(sp_score(&aln(&["AA", "AA", "AA"]), &m, &g).unwrap(), 12.0);
        let two = aln(&["A-C", "AAC"]);
        assert_eq!(
            sp_score(&two, &m, &g).unwrap(),
            pair_alignment_score(&two, &m, &g).unwrap()
        );
    }

    #[test]
    fn ga_cost_examples() {
        assert_eq!(ga_cost(b"ABC", b"ABC").unwrap(), 3.0);
        assert_eq!(ga_cost(b"ABC", b"ABD").unwrap(), 2.0);
        assert_eq!(ga_cost(b"A-", b"A-").unwrap(), 1.0);
        assert!(ga_cost(b"A", b"AB").is_err());
    }

    #[test]
    fn q_examples() {
        let r = aln(&["ACGT", "ACGT"]);
        assert_eq!(q_score(&r, &r).unwrap(), 1.0);
        let shifted = aln(&["ACGT----", "----ACGT"]);
        assert_eq!(q_score(&shifted, &r).unwrap(), 0.0);
        // 4 reference pairs, 2 recovered
        let half = aln(&["ACGT-", "AC-GT"]);
        assert_eq!(q_score(&half, &r).unwrap(), 0.5);
        let other = Alignment::new(vec!["s0".into(), "s1".into()], vec![b"ACGA".to_vec(), b"ACGT".to_vec()]).unwrap();
        assert!(q_score(&other, &r).is_err());
    }

    #[test]
    fn q_matches_rows_by_id() {
        let r = aln(&["AC-", "ACG"]);
        let swapped = Alignment::new(vec!["s1".into(), "s0".into()], vec![b"ACG".to_vec(), b"AC-".to_vec()]).unwrap();
        assert_eq!(q_score(&swapped, &r).unwrap(), 1.0);
    }
}
