use std::collections::{HashMap, HashSet};

use crate::seqcore::GAP;
use crate::{Error, Result};

/// Score for a contact in one sequence aligned onto a contact in the other.
pub trait ContactScorer: Sync {
    /// `a` and `b` are the residue pairs of the two contacts.
    fn score(&self, a: [u8; 2], b: [u8; 2]) -> f64;
}

/// Contact-pair substitution table read from a square whitespace table whose
/// header lists two-letter contact labels such as `AC`.
#[derive(Clone, Debug, PartialEq)]
pub struct CaoTable {
    index: HashMap<[u8; 2], usize>,
    scores: Vec<f64>,
}

impl CaoTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header: Vec<&str> = lines
            .next()
            .ok_or_else(|| Error::Parse("empty contact table".into()))?
            .split_whitespace()
            .collect();
        let label = |s: &str| -> Result<[u8; 2]> {
            let b = s.as_bytes();
            if b.len() != 2 {
                return Err(Error::Parse(format!("contact label `{s}` is not two residues")));
            }
            Ok([b[0].to_ascii_uppercase(), b[1].to_ascii_uppercase()])
        };
        let n = header.len();
        let mut index = HashMap::with_capacity(n);
        for (k, h) in header.iter().enumerate() {
            if index.insert(label(h)?, k).is_some() {
                return Err(Error::Parse(format!("duplicate contact label `{h}`")));
            }
        }
        let mut scores = vec![0.0; n * n];
        let mut seen = 0;
        for line in lines {
            let mut fields = line.split_whitespace();
            let row = *index
                .get(&label(fields.next().unwrap_or_default())?)
                .ok_or_else(|| Error::Parse(format!("unknown row label in `{line}`")))?;
            let values: Vec<f64> = fields
                .map(|f| f.parse().map_err(|_| Error::Parse(format!("bad score `{f}`"))))
                .collect::<Result<_>>()?;
            if values.len() != n {
                return Err(Error::Parse(format!("row has {} scores, expected {n}", values.len())));
            }
            scores[row * n..(row + 1) * n].copy_from_slice(&values);
            seen += 1;
        }
        if seen != n {
            return Err(Error::Parse(format!("{seen} rows for {n} columns")));
        }
        Ok(Self { index, scores })
    }
}

impl ContactScorer for CaoTable {
    fn score(&self, a: [u8; 2], b: [u8; 2]) -> f64 {
        let n = self.index.len();
        match (self.index.get(&a), self.index.get(&b)) {
            (Some(&i), Some(&j)) => self.scores[i * n + j],
            _ => 0.0,
        }
    }
}

/// Contact maps of both sequences (0-based residue positions) and the table
/// scoring them.
pub struct ContactTerm<'a> {
    pub scorer: &'a dyn ContactScorer,
    pub x: Vec<(usize, usize)>,
    pub y: HashSet<(usize, usize)>,
}

impl ContactTerm<'_> {
    /// Summed scores of conserved contacts and the number of broken ones.
    pub fn evaluate(&self, rows: [&[u8]; 2]) -> (f64, usize) {
        let [rx, ry] = rows;
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        let mut partner = Vec::new();
        let mut j = 0;
        for (&a, &b) in rx.iter().zip(ry) {
            if a != GAP {
                xs.push(a);
                partner.push((b != GAP).then_some(j));
            }
            if b != GAP {
                ys.push(b);
            }
            j += (b != GAP) as usize;
        }
        let (mut total, mut broken) = (0.0, 0);
        for &(p, q) in &self.x {
            match (partner.get(p).copied().flatten(), partner.get(q).copied().flatten()) {
                (Some(u), Some(v)) if self.y.contains(&(u.min(v), u.max(v))) => {
                    total += self.scorer.score([xs[p], xs[q]], [ys[u], ys[v]]);
                }
                _ => broken += 1,
            }
        }
        (total, broken)
    }
}

/// Reads `x i j` / `y i j` lines (1-based positions) into two contact lists.
pub fn parse_contacts(text: &str) -> Result<(Vec<(usize, usize)>, HashSet<(usize, usize)>)> {
    let (mut x, mut y) = (Vec::new(), HashSet::new());
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let f: Vec<&str> = line.split_whitespace().collect();
        let pos = |s: &str| -> Result<usize> {
            match s.parse::<usize>() {
                Ok(v) if v > 0 => Ok(v - 1),
                _ => Err(Error::Parse(format!("bad position `{s}`"))),
            }
        };
        if f.len() != 3 {
            return Err(Error::Parse(format!("expected `x|y i j`, got `{line}`")));
        }
        let (a, b) = (pos(f[1])?, pos(f[2])?);
        let pair = (a.min(b), a.max(b));
        match f[0] {
            "x" => x.push(pair),
            "y" => {
                y.insert(pair);
            }
            other => return Err(Error::Parse(format!("unknown sequence tag `{other}`"))),
        }
    }
    Ok((x, y))
}
