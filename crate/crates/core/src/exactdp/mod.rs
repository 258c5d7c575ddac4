//! Exact aligners: pairwise global, iterated local, and three-way DP.

mod oracle;
mod three;

pub use oracle::{enumerate_optimal, for_each_alignment, MAX_PAIR_LEN, MAX_TRIPLE_LEN};
pub use three::{align_three, align_three_with, ThreeWayOptions, MOVE_ORDER};

use crate::dp::{self, GapCosts};
use crate::seqcore::{Alignment, GapModel, Sequence, SubstitutionMatrix, TerminalGaps};
use crate::{Error, Result};

/// Optimal global alignment under an affine gap model.
pub fn align_pair_global(
    x: &Sequence,
    y: &Sequence,
    m: &SubstitutionMatrix,
    g: &GapModel,
) -> Result<(Alignment, f64)> {
    let (rows, score) = align_rows_global(x.residues(), y.residues(), m, g)?;
    let a = Alignment::new(vec![x.id().to_string(), y.id().to_string()], rows)?;
    Ok((a, score))
}

/// Same as [`align_pair_global`] on raw residue strings.
pub fn align_rows_global(
    x: &[u8],
    y: &[u8],
    m: &SubstitutionMatrix,
    g: &GapModel,
) -> Result<(Vec<Vec<u8>>, f64)> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySequence);
    }
    g.validate()?;
    let xg = GapCosts::uniform(x.len(), g.open, g.extend);
    let yg = GapCosts::uniform(y.len(), g.open, g.extend);
    let (path, score) = dp::affine_global(
        x.len(),
        y.len(),
        |i, j| m.score(x[i], y[j]),
        &xg,
        &yg,
        g.terminal == TerminalGaps::Free,
    );
    let rows = dp::merge_rows(&[x.to_vec()], &[y.to_vec()], &path);
    Ok((rows, score))
}

/// One local alignment found by [`align_pair_local_topk`]. Intervals are
/// 0-based and half-open.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalHit {
    pub rank: usize,
    pub score: f64,
    pub x_start: usize,
    pub x_end: usize,
    pub y_start: usize,
    pub y_end: usize,
    /// Aligned residue pairs (0-based positions in x and y).
    pub pairs: Vec<(usize, usize)>,
}

impl LocalHit {
    /// Identical pairs over aligned pairs.
    pub fn identity(&self, x: &[u8], y: &[u8]) -> f64 {
        if self.pairs.is_empty() {
            return 0.0;
        }
        let same = self.pairs.iter().filter(|&&(i, j)| x[i] == y[j]).count();
        same as f64 / self.pairs.len() as f64
    }
}

/// Up to `k` non-intersecting local alignments by iterated Smith-Waterman:
/// each hit's intervals are masked before searching for the next one.
pub fn align_pair_local_topk(
    x: &[u8],
    y: &[u8],
    m: &SubstitutionMatrix,
    g: &GapModel,
    k: usize,
) -> Result<Vec<LocalHit>> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    g.validate()?;
    let mut xmask = vec![false; x.len()];
    let mut ymask = vec![false; y.len()];
    let mut hits = Vec::new();
    while hits.len() < k {
        match best_local(x, y, &xmask, &ymask, m, g) {
            Some(mut hit) => {
                xmask[hit.x_start..hit.x_end].iter_mut().for_each(|b| *b = true);
                ymask[hit.y_start..hit.y_end].iter_mut().for_each(|b| *b = true);
                hit.rank = hits.len() + 1;
                hits.push(hit);
            }
            None => break,
        }
    }
    Ok(hits)
}

fn best_local(
    x: &[u8],
    y: &[u8],
    xmask: &[bool],
    ymask: &[bool],
    m: &SubstitutionMatrix,
    g: &GapModel,
) -> Option<LocalHit> {
    const NEG: f64 = f64::NEG_INFINITY;
    let (n, l) = (x.len(), y.len());
    let w = l + 1;
    let mut sm = vec![NEG; (n + 1) * w];
    let mut sx = vec![NEG; (n + 1) * w];
    let mut sy = vec![NEG; (n + 1) * w];
    // 0 start, 1 M, 2 X, 3 Y
    let mut pm = vec![0u8; (n + 1) * w];
    let mut px = vec![1u8; (n + 1) * w];
    let mut py = vec![1u8; (n + 1) * w];
    let pick = |cands: [(f64, u8); 3]| {
        let mut best = cands[0];
        for c in &cands[1..] {
            if c.0 > best.0 {
                best = *c;
            }
        }
        best
    };
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 1..=n {
        for j in 1..=l {
            let c = i * w + j;
            let (xi, yj) = (!xmask[i - 1], !ymask[j - 1]);
            if xi && yj {
                let p = c - w - 1;
                let (v, from) = pick([(sm[p], 1), (sx[p], 2), (sy[p], 3)]);
                let (v, from) = if v > 0.0 { (v, from) } else { (0.0, 0) };
                sm[c] = v + m.score(x[i - 1], y[j - 1]);
                pm[c] = from;
                if sm[c] > 0.0 && best.is_none_or(|b| sm[c] > b.0) {
                    best = Some((sm[c], i, j));
                }
            }
            if xi {
                let p = c - w;
                let (v, from) = pick([(sm[p] + g.open, 1), (sx[p] + g.extend, 2), (sy[p] + g.open, 3)]);
                sx[c] = v;
                px[c] = from;
            }
            if yj {
                let p = c - 1;
                let (v, from) = pick([(sm[p] + g.open, 1), (sx[p] + g.open, 2), (sy[p] + g.extend, 3)]);
                sy[c] = v;
                py[c] = from;
            }
        }
    }
    let (score, ei, ej) = best?;
    let (mut i, mut j) = (ei, ej);
    let mut state = 1u8;
    let mut pairs = Vec::new();
    loop {
        let c = i * w + j;
        state = match state {
            1 => {
                pairs.push((i - 1, j - 1));
                let from = pm[c];
                i -= 1;
                j -= 1;
                if from == 0 {
                    break;
                }
                from
            }
            2 => {
                i -= 1;
                px[c]
            }
            _ => {
                j -= 1;
                py[c]
            }
        };
    }
    pairs.reverse();
    Some(LocalHit {
        rank: 0,
        score,
        x_start: i,
        x_end: ei,
        y_start: j,
        y_end: ej,
        pairs,
    })
}
