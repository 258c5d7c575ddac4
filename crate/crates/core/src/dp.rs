//! Two-dimensional DP kernels shared by the pairwise, profile and MEA aligners.

use crate::seqcore::GAP;

/// One edge of a pairwise alignment path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Step {
    /// Column i of x against column j of y.
    Diag,
    /// Column of x against a gap.
    Up,
    /// Column of y against a gap.
    Left,
}

const NEG: f64 = f64::NEG_INFINITY;
const M: u8 = 0;
const X: u8 = 1;
const Y: u8 = 2;

/// Per-column affine gap costs (open, extend) for one side of the DP.
pub(crate) struct GapCosts {
    pub open: Vec<f64>,
    pub extend: Vec<f64>,
}

impl GapCosts {
    pub fn uniform(len: usize, open: f64, extend: f64) -> Self {
        Self {
            open: vec![open; len],
            extend: vec![extend; len],
        }
    }
}

fn best3(m: f64, x: f64, y: f64) -> (f64, u8) {
    // ties prefer M, then X, then Y
    let mut best = (m, M);
    if x > best.0 {
        best = (x, X);
    }
    if y > best.0 {
        best = (y, Y);
    }
    best
}

/// Global affine alignment of `n` x-columns against `m` y-columns.
///
/// `sub(i, j)` scores x column `i` against y column `j` (0-based). `xgap`
/// holds the cost of leaving x column `i` unmatched, `ygap` likewise for y.
/// Runs of opposite gaps may follow each other directly, each paying its own
/// open cost. With `terminal_free`, gaps before the first or after the last
/// column of the other side cost nothing.
pub(crate) fn affine_global(
    n: usize,
    m: usize,
    sub: impl Fn(usize, usize) -> f64,
    xgap: &GapCosts,
    ygap: &GapCosts,
    terminal_free: bool,
) -> (Vec<Step>, f64) {
    let w = m + 1;
    let cells = (n + 1) * w;
    let mut sm = vec![NEG; cells];
    let mut sx = vec![NEG; cells];
    let mut sy = vec![NEG; cells];
    let mut pm = vec![M; cells];
    let mut px = vec![M; cells];
    let mut py = vec![M; cells];
    sm[0] = 0.0;
    for i in 0..=n {
        for j in 0..=m {
            let c = i * w + j;
            if i > 0 && j > 0 {
                let p = c - w - 1;
                let (v, from) = best3(sm[p], sx[p], sy[p]);
                sm[c] = v + sub(i - 1, j - 1);
                pm[c] = from;
            }
            if i > 0 {
                let p = c - w;
                let free = terminal_free && (j == 0 || j == m);
                let (open, ext) = if free {
                    (0.0, 0.0)
                } else {
                    (xgap.open[i - 1], xgap.extend[i - 1])
                };
                let (v, from) = best3(sm[p] + open, sx[p] + ext, sy[p] + open);
                sx[c] = v;
                px[c] = from;
            }
            if j > 0 {
                let p = c - 1;
                let free = terminal_free && (i == 0 || i == n);
                let (open, ext) = if free {
                    (0.0, 0.0)
                } else {
                    (ygap.open[j - 1], ygap.extend[j - 1])
                };
                let (v, from) = best3(sm[p] + open, sx[p] + open, sy[p] + ext);
                sy[c] = v;
                py[c] = from;
            }
        }
    }
    let end = n * w + m;
    let (score, mut state) = best3(sm[end], sx[end], sy[end]);
    let mut path = Vec::with_capacity(n + m);
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let c = i * w + j;
        match state {
            M => {
                path.push(Step::Diag);
                state = pm[c];
                i -= 1;
                j -= 1;
            }
            X => {
                path.push(Step::Up);
                state = px[c];
                i -= 1;
            }
            _ => {
                path.push(Step::Left);
                state = py[c];
                j -= 1;
            }
        }
    }
    path.reverse();
    (path, score)
}

/// Maximum-weight monotone matching: A(i,j) = max{A(i-1,j-1) + P(i,j),
/// A(i-1,j), A(i,j-1)}, A(0,·) = A(·,0) = 0. Ties prefer the diagonal, then up.
pub(crate) fn max_sum_path(n: usize, m: usize, score: impl Fn(usize, usize) -> f64) -> (Vec<Step>, f64) {
    let w = m + 1;
    let mut a = vec![0.0f64; (n + 1) * w];
    let mut back = vec![Step::Diag; (n + 1) * w];
    for i in 0..=n {
        for j in 0..=m {
            let c = i * w + j;
            if i == 0 && j == 0 {
                continue;
            }
            if i == 0 {
                a[c] = a[c - 1];
                back[c] = Step::Left;
                continue;
            }
            if j == 0 {
                a[c] = a[c - w];
                back[c] = Step::Up;
                continue;
            }
            let mut best = (a[c - w - 1] + score(i - 1, j - 1), Step::Diag);
            if a[c - w] > best.0 {
                best = (a[c - w], Step::Up);
            }
            if a[c - 1] > best.0 {
                best = (a[c - 1], Step::Left);
            }
            a[c] = best.0;
            back[c] = best.1;
        }
    }
    let mut path = Vec::with_capacity(n + m);
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let s = back[i * w + j];
        path.push(s);
        match s {
            Step::Diag => {
                i -= 1;
                j -= 1;
            }
            Step::Up => i -= 1,
            Step::Left => j -= 1,
        }
    }
    path.reverse();
    (path, a[n * w + m])
}

/// Merges two groups of gapped rows along a path.
pub(crate) fn merge_rows(a: &[Vec<u8>], b: &[Vec<u8>], path: &[Step]) -> Vec<Vec<u8>> {
    let mut out: Vec<Vec<u8>> = (0..a.len() + b.len()).map(|_| Vec::with_capacity(path.len())).collect();
    let (mut i, mut j) = (0, 0);
    for &s in path {
        let (take_a, take_b) = match s {
            Step::Diag => (true, true),
            Step::Up => (true, false),
            Step::Left => (false, true),
        };
        for (k, row) in a.iter().enumerate() {
            out[k].push(if take_a { row[i] } else { GAP });
        }
        for (k, row) in b.iter().enumerate() {
            out[a.len() + k].push(if take_b { row[j] } else { GAP });
        }
        i += take_a as usize;
        j += take_b as usize;
    }
    out
}

/// Matched (i, j) column pairs of a path.
pub(crate) fn path_pairs(path: &[Step]) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    let (mut i, mut j) = (0, 0);
    for &s in path {
        match s {
            Step::Diag => {
                pairs.push((i, j));
                i += 1;
                j += 1;
            }
            Step::Up => i += 1,
            Step::Left => j += 1,
        }
    }
    pairs
}
