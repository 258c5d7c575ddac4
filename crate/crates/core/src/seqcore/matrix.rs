use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Alphabet;
use crate::{Error, Result};

const BLOSUM62_TABLE: &str = include_str!("blosum62.txt");

/// Amino-acid background frequencies underlying BLOSUM62, in `Alphabet::protein()` order.
const BLOSUM62_BACKGROUND: [f64; 20] = [
    0.074, 0.052, 0.045, 0.054, 0.025, 0.034, 0.054, 0.074, 0.026, 0.068, 0.099, 0.058, 0.025,
    0.047, 0.039, 0.057, 0.051, 0.013, 0.032, 0.073,
];

/// Symmetric residue-pair scores with background and joint frequencies.
///
/// Scores for any symbol outside the alphabet (including the ambiguity code
/// `X`) are 0.
#[derive(Clone, Debug, PartialEq)]
pub struct SubstitutionMatrix {
    name: String,
    alphabet: Alphabet,
    scores: Vec<f64>,
    background: Vec<f64>,
    joint: Vec<f64>,
    lambda: f64,
}

impl SubstitutionMatrix {
    /// Builds a matrix from scores; joint frequencies are
    /// `p_i p_j exp(lambda S_ij)` with `lambda` solving `sum p_ij = 1`.
    ///
    /// Without a background the frequencies are uniform. When the scores have
    /// no positive root (non-negative expected score), `lambda = 1` and the
    /// joint table is renormalised instead.
    pub fn from_scores(
        name: impl Into<String>,
        alphabet: Alphabet,
        scores: Vec<f64>,
        background: Option<Vec<f64>>,
    ) -> Result<Self> {
        let n = alphabet.len();
        if scores.len() != n * n {
            return Err(Error::Matrix(format!(
                "expected {} scores for a {n}x{n} matrix, got {}",
                n * n,
                scores.len()
            )));
        }
        if scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::Matrix("non-finite score".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if (scores[i * n + j] - scores[j * n + i]).abs() > 1e-6 {
                    return Err(Error::Matrix(format!(
                        "asymmetric scores at ({}, {})",
                        alphabet.symbols()[i] as char,
                        alphabet.symbols()[j] as char
                    )));
                }
            }
        }
        let background = normalize(background.unwrap_or_else(|| vec![1.0; n]), "background")?;
        if background.len() != n {
            return Err(Error::Matrix("background length differs from alphabet".into()));
        }
        let lambda = solve_lambda(&scores, &background).unwrap_or(1.0);
        let mut joint: Vec<f64> = (0..n * n)
            .map(|k| background[k / n] * background[k % n] * (lambda * scores[k]).exp())
            .collect();
        let total: f64 = joint.iter().sum();
        joint.iter_mut().for_each(|p| *p /= total);
        for i in 0..n {
            for j in 0..i {
                let avg = 0.5 * (joint[i * n + j] + joint[j * n + i]);
                joint[i * n + j] = avg;
                joint[j * n + i] = avg;
            }
        }
        Ok(Self {
            name: name.into(),
            alphabet,
            scores,
            background,
            joint,
            lambda,
        })
    }

    /// Builds a matrix from a joint pair distribution; background is its
    /// marginal and `S_ij = ln(p_ij / (p_i p_j))`.
    pub fn from_joint(name: impl Into<String>, alphabet: Alphabet, joint: Vec<f64>) -> Result<Self> {
        let n = alphabet.len();
        if joint.len() != n * n {
            return Err(Error::Matrix("joint table has the wrong size".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if (joint[i * n + j] - joint[j * n + i]).abs() > 1e-12 {
                    return Err(Error::Matrix("asymmetric joint frequencies".into()));
                }
            }
        }
        if joint.iter().any(|&p| !(p > 0.0) || !p.is_finite()) {
            return Err(Error::Matrix("joint frequencies must be positive".into()));
        }
        let joint = normalize(joint, "joint")?;
        let background: Vec<f64> = (0..n).map(|i| joint[i * n..(i + 1) * n].iter().sum()).collect();
        let scores = (0..n * n)
            .map(|k| (joint[k] / (background[k / n] * background[k % n])).ln())
            .collect();
        Ok(Self {
            name: name.into(),
            alphabet,
            scores,
            background,
            joint,
            lambda: 1.0,
        })
    }

    /// Match/mismatch scoring over an arbitrary alphabet.
    pub fn simple(alphabet: Alphabet, matched: f64, mismatched: f64) -> Result<Self> {
        let n = alphabet.len();
        let scores = (0..n * n)
            .map(|k| if k / n == k % n { matched } else { mismatched })
            .collect();
        Self::from_scores(format!("match{matched}_mismatch{mismatched}"), alphabet, scores, None)
    }

    pub fn blosum62() -> Self {
        let mut m = Self::parse_table("BLOSUM62", BLOSUM62_TABLE, Some(BLOSUM62_BACKGROUND.to_vec()))
            .expect("bundled BLOSUM62 is well formed");
        debug_assert_eq!(m.alphabet, Alphabet::protein());
        m.name = "BLOSUM62".into();
        m
    }

    /// Nucleotide +5/-4 scoring.
    pub fn nucleotide() -> Self {
        let mut m = Self::simple(Alphabet::nucleotide(), 5.0, -4.0).expect("static matrix");
        m.name = "NUC".into();
        m
    }

    /// Resolves a built-in name (`BLOSUM62`, `NUC`) or reads a table file.
    pub fn load(name_or_path: &str) -> Result<Self> {
        match name_or_path.to_ascii_uppercase().as_str() {
            "BLOSUM62" => Ok(Self::blosum62()),
            "NUC" | "DNA" => Ok(Self::nucleotide()),
            _ => {
                let path = Path::new(name_or_path);
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Matrix(format!("{name_or_path}: {e}")))?;
                let name = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| name_or_path.to_string());
                Self::parse_table(name, &text, None)
            }
        }
    }

    /// Parses a whitespace-delimited square table: a header row of residue
    /// symbols, then one row per symbol with an optional leading label.
    /// Lines starting with `#` are comments.
    pub fn parse_table(name: impl Into<String>, text: &str, background: Option<Vec<f64>>) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header: Vec<&str> = lines
            .next()
            .ok_or_else(|| Error::Matrix("empty matrix file".into()))?
            .split_whitespace()
            .collect();
        if header.iter().any(|h| h.len() != 1) {
            return Err(Error::Matrix("header symbols must be single characters".into()));
        }
        let symbols: Vec<u8> = header.iter().map(|h| h.as_bytes()[0]).collect();
        let alphabet = Alphabet::new(&symbols).map_err(|e| Error::Matrix(e.to_string()))?;
        let n = symbols.len();
        let mut scores = Vec::with_capacity(n * n);
        let mut rows = 0;
        for line in lines {
            let mut tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() == n + 1 {
                let label = tokens.remove(0);
                if label.len() != 1 || label.as_bytes()[0].to_ascii_uppercase() != symbols[rows.min(n - 1)] {
                    return Err(Error::Matrix(format!("unexpected row label `{label}`")));
                }
            }
            if tokens.len() != n {
                return Err(Error::Matrix(format!(
                    "row {} has {} values, expected {n}",
                    rows + 1,
                    tokens.len()
                )));
            }
            for t in tokens {
                scores.push(
                    t.parse::<f64>()
                        .map_err(|_| Error::Matrix(format!("bad score `{t}`")))?,
                );
            }
            rows += 1;
            if rows > n {
                return Err(Error::Matrix("more rows than header symbols".into()));
            }
        }
        if rows != n {
            return Err(Error::Matrix(format!("{rows} rows for {n} columns")));
        }
        Self::from_scores(name, alphabet, scores, background)
    }

    /// Renders the matrix in the table format read by [`Self::parse_table`].
    pub fn to_table(&self) -> String {
        let n = self.alphabet.len();
        let mut out = String::from(" ");
        for &s in self.alphabet.symbols() {
            out.push_str(&format!(" {:>3}", s as char));
        }
        out.push('\n');
        for i in 0..n {
            out.push(self.alphabet.symbols()[i] as char);
            for j in 0..n {
                out.push_str(&format!(" {:>3}", self.scores[i * n + j]));
            }
            out.push('\n');
        }
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn size(&self) -> usize {
        self.alphabet.len()
    }

    /// Score between two residues; 0 if either is outside the alphabet.
    pub fn score(&self, a: u8, b: u8) -> f64 {
        match (self.alphabet.index_of(a), self.alphabet.index_of(b)) {
            (Some(i), Some(j)) => self.scores[i * self.size() + j],
            _ => 0.0,
        }
    }

    pub fn score_index(&self, i: usize, j: usize) -> f64 {
        self.scores[i * self.size() + j]
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn background(&self) -> &[f64] {
        &self.background
    }

    pub fn joint(&self) -> &[f64] {
        &self.joint
    }

    pub fn joint_index(&self, i: usize, j: usize) -> f64 {
        self.joint[i * self.size() + j]
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

fn normalize(mut v: Vec<f64>, what: &str) -> Result<Vec<f64>> {
    if v.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
        return Err(Error::Matrix(format!("{what} frequencies must be non-negative")));
    }
    let total: f64 = v.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Matrix(format!("{what} frequencies sum to zero")));
    }
    v.iter_mut().for_each(|p| *p /= total);
    Ok(v)
}

/// Positive root of `sum_ij p_i p_j exp(lambda S_ij) = 1`, if one exists.
fn solve_lambda(scores: &[f64], background: &[f64]) -> Option<f64> {
    let n = background.len();
    let f = |lambda: f64| -> f64 {
        (0..n * n)
            .map(|k| background[k / n] * background[k % n] * (lambda * scores[k]).exp())
            .sum::<f64>()
            - 1.0
    };
    let expected: f64 = (0..n * n)
        .map(|k| background[k / n] * background[k % n] * scores[k])
        .sum();
    let has_positive = (0..n * n).any(|k| scores[k] > 0.0 && background[k / n] * background[k % n] > 0.0);
    if !(expected < 0.0) || !has_positive {
        return None;
    }
    let mut hi = 1.0;
    while f(hi) <= 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return None;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// How gap runs touching either end of a pairwise projection are scored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TerminalGaps {
    Penalized,
    Free,
}

/// Affine gap scores: a run of length `L` scores `open + (L - 1) * extend`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapModel {
    pub open: f64,
    pub extend: f64,
    pub terminal: TerminalGaps,
}

impl GapModel {
    pub fn new(open: f64, extend: f64, terminal: TerminalGaps) -> Result<Self> {
        let g = Self { open, extend, terminal };
        g.validate()?;
        Ok(g)
    }

    /// Linear gaps: every gap position scores `gap`.
    pub fn linear(gap: f64) -> Self {
        Self {
            open: gap,
            extend: gap,
            terminal: TerminalGaps::Penalized,
        }
    }

    /// All gaps free.
    pub fn zero() -> Self {
        Self::linear(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.open == 0.0 && self.extend == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.open <= 0.0) || !(self.extend <= 0.0) || !self.open.is_finite() || !self.extend.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gap scores must be finite and non-positive (open {}, extend {})",
                self.open, self.extend
            )));
        }
        if self.extend.abs() > self.open.abs() {
            return Err(Error::InvalidParameter(
                "gap extension must not cost more than gap opening".into(),
            ));
        }
        Ok(())
    }

    /// Score of one gap run of length `len`.
    pub fn run(&self, len: usize, terminal: bool) -> f64 {
        if len == 0 || (terminal && self.terminal == TerminalGaps::Free) {
            0.0
        } else {
            self.open + (len - 1) as f64 * self.extend
        }
    }
}

impl Default for GapModel {
    fn default() -> Self {
        Self {
            open: -11.0,
            extend: -1.0,
            terminal: TerminalGaps::Free,
        }
    }
}
