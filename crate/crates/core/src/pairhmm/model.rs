use serde::{Deserialize, Serialize};

use super::PosteriorMatrix;
use crate::seqcore::{Alphabet, SubstitutionMatrix};
use crate::{Error, Result};

/// Gap and end probabilities of the three-state pair HMM.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HmmConfig {
    /// Probability of opening a gap from the match state (δ).
    pub gap_open: f64,
    /// Probability of staying in an insert state (ε).
    pub gap_extend: f64,
    /// Probability of ending from any state.
    pub end: f64,
}

impl Default for HmmConfig {
    fn default() -> Self {
        Self {
            gap_open: 0.02,
            gap_extend: 0.6,
            end: 0.001,
        }
    }
}

const BEGIN: usize = 0;
const MATCH: usize = 1;
const INS_X: usize = 2;
const INS_Y: usize = 3;
const END: usize = 4;

/// Pair-HMM with match state M emitting residue pairs and insert states X, Y
/// emitting single residues of x or y. X and Y do not connect directly.
#[derive(Clone, Debug)]
pub struct PairHmmParams {
    alphabet: Alphabet,
    /// trans[from][to] over Begin, M, X, Y, End.
    trans: [[f64; 5]; 5],
    log_trans: [[f64; 5]; 5],
    /// Match emission log-probabilities, (n + 1)², the last index is the unknown residue.
    log_match: Vec<f64>,
    log_insert: Vec<f64>,
}

impl PairHmmParams {
    pub fn new(m: &SubstitutionMatrix, cfg: &HmmConfig) -> Result<Self> {
        let HmmConfig { gap_open: d, gap_extend: e, end: t } = *cfg;
        for (name, v) in [("gap open", d), ("gap extend", e)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidParameter(format!("{name} probability {v} not in (0, 1)")));
            }
        }
        if !(0.0..1.0).contains(&t) || 2.0 * d + t >= 1.0 || e + t >= 1.0 {
            return Err(Error::InvalidParameter("transition probabilities do not normalise".into()));
        }
        let mut trans = [[0.0; 5]; 5];
        trans[BEGIN][MATCH] = 1.0 - 2.0 * d;
        trans[BEGIN][INS_X] = d;
        trans[BEGIN][INS_Y] = d;
        trans[MATCH][MATCH] = 1.0 - 2.0 * d - t;
        trans[MATCH][INS_X] = d;
        trans[MATCH][INS_Y] = d;
        trans[MATCH][END] = t;
        for s in [INS_X, INS_Y] {
            trans[s][s] = e;
            trans[s][MATCH] = 1.0 - e - t;
            trans[s][END] = t;
        }
        let mut log_trans = [[f64::NEG_INFINITY; 5]; 5];
        for (lr, r) in log_trans.iter_mut().zip(&trans) {
            for (l, p) in lr.iter_mut().zip(r) {
                *l = p.ln();
            }
        }
        // with no end probability every path ends with weight 1
        if t == 0.0 {
            for s in [MATCH, INS_X, INS_Y] {
                log_trans[s][END] = 0.0;
            }
        }
        let n = m.size();
        let unknown_q = 1.0 / n as f64;
        let q: Vec<f64> = (0..=n).map(|i| if i < n { m.background()[i] } else { unknown_q }).collect();
        let mut log_match = vec![0.0; (n + 1) * (n + 1)];
        for i in 0..=n {
            for j in 0..=n {
                let p = if i < n && j < n { m.joint_index(i, j) } else { q[i] * q[j] };
                log_match[i * (n + 1) + j] = p.ln();
            }
        }
        Ok(Self {
            alphabet: m.alphabet().clone(),
            trans,
            log_trans,
            log_match,
            log_insert: q.iter().map(|p| p.ln()).collect(),
        })
    }

    /// Outgoing transition probabilities of Begin, M, X, Y (columns Begin, M, X, Y, End).
    pub fn transitions(&self) -> [[f64; 5]; 4] {
        [self.trans[0], self.trans[1], self.trans[2], self.trans[3]]
    }

    fn code(&self, r: u8) -> usize {
        self.alphabet.index_of(r).unwrap_or(self.alphabet.len())
    }

    pub(crate) fn encode(&self, s: &[u8]) -> Vec<usize> {
        s.iter().map(|&r| self.code(r)).collect()
    }

    #[inline]
    pub(crate) fn emit_match(&self, a: usize, b: usize) -> f64 {
        self.log_match[a * (self.alphabet.len() + 1) + b]
    }

    #[inline]
    pub(crate) fn emit_insert(&self, a: usize) -> f64 {
        self.log_insert[a]
    }

    #[inline]
    pub(crate) fn lt(&self, from: usize, to: usize) -> f64 {
        self.log_trans[from][to]
    }

    /// Log-probability of one alignment path given as rows, or −∞ when the
    /// path uses a forbidden X→Y or Y→X step.
    pub fn path_log_prob(&self, rows: &[Vec<u8>; 2]) -> f64 {
        let mut state = BEGIN;
        let mut lp = 0.0;
        for (&a, &b) in rows[0].iter().zip(&rows[1]) {
            let (next, emit) = match (a == b'-', b == b'-') {
                (false, false) => (MATCH, self.emit_match(self.code(a), self.code(b))),
                (false, true) => (INS_X, self.emit_insert(self.code(a))),
                (true, false) => (INS_Y, self.emit_insert(self.code(b))),
                (true, true) => continue,
            };
            lp += self.lt(state, next) + emit;
            state = next;
        }
        lp + self.lt(state, END)
    }
}

#[inline]
fn lse2(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        m
    } else {
        m + ((a - m).exp() + (b - m).exp()).ln()
    }
}

#[inline]
fn lse3(a: f64, b: f64, c: f64) -> f64 {
    let m = a.max(b).max(c);
    if m == f64::NEG_INFINITY {
        m
    } else {
        m + ((a - m).exp() + (b - m).exp() + (c - m).exp()).ln()
    }
}

/// Forward and backward tables and both total log-probabilities.
pub struct ForwardBackward {
    pub n: usize,
    pub m: usize,
    pub log_forward: f64,
    pub log_backward: f64,
    fm: Vec<f64>,
    bm: Vec<f64>,
}

impl ForwardBackward {
    /// Posterior probability that x_i aligns to y_j (0-based).
    pub fn posterior(&self, i: usize, j: usize) -> f64 {
        let c = (i + 1) * (self.m + 1) + j + 1;
        (self.fm[c] + self.bm[c] - self.log_forward).exp()
    }

    pub fn dense(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| (0..self.m).map(|j| self.posterior(i, j)).collect()).collect()
    }
}

/// Runs both recursions in log space.
pub fn forward_backward_tables(x: &[u8], y: &[u8], params: &PairHmmParams) -> Result<ForwardBackward> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySequence);
    }
    let (xs, ys) = (params.encode(x), params.encode(y));
    let (n, m) = (xs.len(), ys.len());
    let w = m + 1;
    let cells = (n + 1) * w;
    let neg = f64::NEG_INFINITY;
    let t = |a, b| params.lt(a, b);

    let (mut fm, mut fx, mut fy) = (vec![neg; cells], vec![neg; cells], vec![neg; cells]);
    for i in 0..=n {
        for j in 0..=m {
            let c = i * w + j;
            if i > 0 && j > 0 {
                let p = c - w - 1;
                let from = if i == 1 && j == 1 {
                    t(BEGIN, MATCH)
                } else {
                    lse3(fm[p] + t(MATCH, MATCH), fx[p] + t(INS_X, MATCH), fy[p] + t(INS_Y, MATCH))
                };
                fm[c] = from + params.emit_match(xs[i - 1], ys[j - 1]);
            }
            if i > 0 {
                let p = c - w;
                let from = if i == 1 && j == 0 {
                    t(BEGIN, INS_X)
                } else {
                    lse2(fm[p] + t(MATCH, INS_X), fx[p] + t(INS_X, INS_X))
                };
                fx[c] = from + params.emit_insert(xs[i - 1]);
            }
            if j > 0 {
                let p = c - 1;
                let from = if i == 0 && j == 1 {
                    t(BEGIN, INS_Y)
                } else {
                    lse2(fm[p] + t(MATCH, INS_Y), fy[p] + t(INS_Y, INS_Y))
                };
                fy[c] = from + params.emit_insert(ys[j - 1]);
            }
        }
    }
    let last = n * w + m;
    let log_forward = lse3(fm[last] + t(MATCH, END), fx[last] + t(INS_X, END), fy[last] + t(INS_Y, END));

    let (mut bm, mut bx, mut by) = (vec![neg; cells], vec![neg; cells], vec![neg; cells]);
    for i in (0..=n).rev() {
        for j in (0..=m).rev() {
            let c = i * w + j;
            if i == n && j == m {
                bm[c] = t(MATCH, END);
                bx[c] = t(INS_X, END);
                by[c] = t(INS_Y, END);
                continue;
            }
            let via_m = if i < n && j < m {
                params.emit_match(xs[i], ys[j]) + bm[c + w + 1]
            } else {
                neg
            };
            let via_x = if i < n { params.emit_insert(xs[i]) + bx[c + w] } else { neg };
            let via_y = if j < m { params.emit_insert(ys[j]) + by[c + 1] } else { neg };
            bm[c] = lse3(t(MATCH, MATCH) + via_m, t(MATCH, INS_X) + via_x, t(MATCH, INS_Y) + via_y);
            bx[c] = lse2(t(INS_X, MATCH) + via_m, t(INS_X, INS_X) + via_x);
            by[c] = lse2(t(INS_Y, MATCH) + via_m, t(INS_Y, INS_Y) + via_y);
        }
    }
    let log_backward = lse3(
        t(BEGIN, MATCH) + params.emit_match(xs[0], ys[0]) + bm[w + 1],
        t(BEGIN, INS_X) + params.emit_insert(xs[0]) + bx[w],
        t(BEGIN, INS_Y) + params.emit_insert(ys[0]) + by[1],
    );
    if !log_forward.is_finite() || !log_backward.is_finite() {
        return Err(Error::Underflow(format!(
            "total log-probability is not finite for lengths {n} and {m}"
        )));
    }
    Ok(ForwardBackward {
        n,
        m,
        log_forward,
        log_backward,
        fm,
        bm,
    })
}

/// Sparse posterior matrix (entries > `eps`) and the forward log-probability.
pub fn forward_backward(x: &[u8], y: &[u8], params: &PairHmmParams, eps: f64) -> Result<(PosteriorMatrix, f64)> {
    let fb = forward_backward_tables(x, y, params)?;
    let rows = (0..fb.n)
        .map(|i| {
            (0..fb.m)
                .filter_map(|j| {
                    let p = fb.posterior(i, j).min(1.0);
                    (p > eps).then_some((j, p))
                })
                .collect()
        })
        .collect();
    Ok((PosteriorMatrix::from_rows(fb.n, fb.m, rows), fb.log_forward))
}
