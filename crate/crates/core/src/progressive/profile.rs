use crate::consistlib::ConstraintLibrary;
use crate::pairhmm::PosteriorSet;
use crate::seqcore::{Alignment, Alphabet, SubstitutionMatrix, GAP};
use crate::{Error, Result};

/// Column-wise weighted residue frequencies of a sub-alignment.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    width: usize,
    /// Residue slots per column: the alphabet plus one for unknown residues.
    slots: usize,
    freqs: Vec<f64>,
    gaps: Vec<f64>,
    members: Vec<usize>,
    /// Column index of every residue, per member.
    residue_columns: Vec<Vec<usize>>,
}

impl Profile {
    /// Profile of `rows`, where row `k` is sequence `members[k]` with weight `weights[k]`.
    pub fn new(rows: &[Vec<u8>], members: &[usize], weights: &[f64], alphabet: &Alphabet) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::InvalidParameter("empty profile".into()));
        }
        if weights.len() != rows.len() || members.len() != rows.len() {
            return Err(Error::InvalidParameter("one weight and member id per row".into()));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::InvalidParameter("weights must be non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidParameter("weights must have a positive sum".into()));
        }
        let width = rows[0].len();
        let slots = alphabet.len() + 1;
        let mut freqs = vec![0.0; width * slots];
        let mut gaps = vec![0.0; width];
        let mut residue_columns = Vec::with_capacity(rows.len());
        for (row, &w) in rows.iter().zip(weights) {
            let w = w / total;
            let mut cols = Vec::new();
            for (c, &r) in row.iter().enumerate() {
                if r == GAP {
                    gaps[c] += w;
                } else {
                    let slot = alphabet.index_of(r).unwrap_or(slots - 1);
                    freqs[c * slots + slot] += w;
                    cols.push(c);
                }
            }
            residue_columns.push(cols);
        }
        Ok(Self {
            width,
            slots,
            freqs,
            gaps,
            members: members.to_vec(),
            residue_columns,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// Residue frequencies of column `c`; the last slot counts unknown residues.
    pub fn column(&self, c: usize) -> &[f64] {
        &self.freqs[c * self.slots..(c + 1) * self.slots]
    }

    pub fn gap_fraction(&self, c: usize) -> f64 {
        self.gaps[c]
    }

    pub fn residue_columns(&self, member: usize) -> &[usize] {
        &self.residue_columns[member]
    }
}

/// Profile of a whole alignment; rows are members `0..N`.
pub fn build_profile(a: &Alignment, weights: &[f64], alphabet: &Alphabet) -> Result<Profile> {
    let members: Vec<usize> = (0..a.num_rows()).collect();
    Profile::new(a.rows(), &members, weights, alphabet)
}

/// PSP = Σ_i Σ_j f1_i f2_j S_ij over the alphabet (gap and unknown slots score 0).
pub fn psp_score(col1: &[f64], col2: &[f64], m: &SubstitutionMatrix) -> f64 {
    let n = m.size();
    let mut total = 0.0;
    for i in 0..n {
        if col1[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            total += col1[i] * col2[j] * m.score_index(i, j);
        }
    }
    total
}

/// Scores every column of one profile against every column of another.
pub trait ColumnPairScorer: Sync {
    /// Row-major `a.width() × b.width()` matrix.
    fn score_matrix(&self, a: &Profile, b: &Profile) -> Vec<f64>;
}

/// Profile sum-of-pairs over a substitution matrix.
pub struct PspScorer<'a>(pub &'a SubstitutionMatrix);

impl ColumnPairScorer for PspScorer<'_> {
    fn score_matrix(&self, a: &Profile, b: &Profile) -> Vec<f64> {
        let m = self.0;
        let n = m.size();
        let mut out = Vec::with_capacity(a.width * b.width);
        let mut sf = vec![0.0; n];
        for x in 0..a.width {
            let fa = a.column(x);
            for (j, v) in sf.iter_mut().enumerate() {
                *v = (0..n).map(|i| fa[i] * m.score_index(i, j)).sum();
            }
            for y in 0..b.width {
                let fb = b.column(y);
                out.push((0..n).map(|j| sf[j] * fb[j]).sum());
            }
        }
        out
    }
}

/// Library weights averaged over member row pairs.
pub struct LibraryScorer<'a>(pub &'a ConstraintLibrary);

impl ColumnPairScorer for LibraryScorer<'_> {
    fn score_matrix(&self, a: &Profile, b: &Profile) -> Vec<f64> {
        let mut out = vec![0.0; a.width * b.width];
        let norm = 1.0 / (a.members.len() * b.members.len()) as f64;
        for (ra, &sa) in a.members.iter().enumerate() {
            for (rb, &sb) in b.members.iter().enumerate() {
                let (ca, cb) = (&a.residue_columns[ra], &b.residue_columns[rb]);
                if sa < sb {
                    for (i, j, w) in self.0.between(sa, sb) {
                        out[ca[i - 1] * b.width + cb[j - 1]] += w * norm;
                    }
                } else {
                    for (j, i, w) in self.0.between(sb, sa) {
                        out[ca[i - 1] * b.width + cb[j - 1]] += w * norm;
                    }
                }
            }
        }
        out
    }
}

/// Posterior match probabilities summed over member row pairs.
pub struct PosteriorScorer<'a>(pub &'a PosteriorSet);

impl ColumnPairScorer for PosteriorScorer<'_> {
    fn score_matrix(&self, a: &Profile, b: &Profile) -> Vec<f64> {
        let mut out = vec![0.0; a.width * b.width];
        for (ra, &sa) in a.members.iter().enumerate() {
            for (rb, &sb) in b.members.iter().enumerate() {
                let (ca, cb) = (&a.residue_columns[ra], &b.residue_columns[rb]);
                let (lo, hi, flip) = if sa < sb { (sa, sb, false) } else { (sb, sa, true) };
                let Some(p) = self.0.stored(lo, hi) else { continue };
                for i in 0..p.rows() {
                    for &(j, v) in p.row(i) {
                        let (x, y) = if flip { (j, i) } else { (i, j) };
                        out[ca[x] * b.width + cb[y]] += v;
                    }
                }
            }
        }
        out
    }
}
