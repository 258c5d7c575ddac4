use crate::objective::{column_delta, ColumnScorer};
use crate::seqcore::{Alignment, Sequence, GAP};
use crate::{Error, Result};

/// The seven predecessor moves as (du, dv, dw), numbered 1..=7: single
/// steps in u, v, w; then the pairs uv, uw, vw; then the full diagonal.
const MOVES: [(usize, usize, usize); 7] = [
    (1, 0, 0),
    (0, 1, 0),
    (0, 0, 1),
    (1, 1, 0),
    (1, 0, 1),
    (0, 1, 1),
    (1, 1, 1),
];

/// Tie-break priority, as 1-based move numbers.
pub const MOVE_ORDER: [usize; 7] = [7, 4, 5, 6, 1, 2, 3];

#[derive(Clone, Debug)]
pub struct ThreeWayOptions {
    /// Upper bound on the number of DP cells.
    pub budget_cells: u128,
    /// `enabled[t - 1]` switches move `t` on or off.
    pub enabled: [bool; 7],
}

impl Default for ThreeWayOptions {
    fn default() -> Self {
        Self {
            budget_cells: 1 << 24,
            enabled: [true; 7],
        }
    }
}

/// Optimal three-way alignment for a column-additive score.
pub fn align_three(u: &Sequence, v: &Sequence, w: &Sequence, scorer: &ColumnScorer) -> Result<(Alignment, f64)> {
    align_three_with(u, v, w, scorer, &ThreeWayOptions::default())
}

pub fn align_three_with(
    u: &Sequence,
    v: &Sequence,
    w: &Sequence,
    scorer: &ColumnScorer,
    opts: &ThreeWayOptions,
) -> Result<(Alignment, f64)> {
    let (a, b, c) = (u.residues(), v.residues(), w.residues());
    let (n1, n2, n3) = (a.len() + 1, b.len() + 1, c.len() + 1);
    let cells = n1 as u128 * n2 as u128 * n3 as u128;
    if cells > opts.budget_cells {
        return Err(Error::MemoryBudget {
            cells,
            limit: opts.budget_cells,
        });
    }
    let idx = |i: usize, j: usize, k: usize| (i * n2 + j) * n3 + k;
    let mut s = vec![f64::NEG_INFINITY; cells as usize];
    let mut back = vec![0u8; cells as usize];
    s[0] = 0.0;
    let column = |t: usize, i: usize, j: usize, k: usize| {
        let (du, dv, dw) = MOVES[t];
        let col = [
            if du == 1 { a[i - 1] } else { GAP },
            if dv == 1 { b[j - 1] } else { GAP },
            if dw == 1 { c[k - 1] } else { GAP },
        ];
        column_delta(&col, scorer).expect("non-empty column")
    };
    for i in 0..n1 {
        for j in 0..n2 {
            for k in 0..n3 {
                if i + j + k == 0 {
                    continue;
                }
                let mut best = (f64::NEG_INFINITY, 0u8);
                for &t in &MOVE_ORDER {
                    if !opts.enabled[t - 1] {
                        continue;
                    }
                    let (du, dv, dw) = MOVES[t - 1];
                    if i < du || j < dv || k < dw {
                        continue;
                    }
                    let prev = s[idx(i - du, j - dv, k - dw)];
                    if prev == f64::NEG_INFINITY {
                        continue;
                    }
                    let val = prev + column(t - 1, i, j, k);
                    if val > best.0 {
                        best = (val, t as u8);
                    }
                }
                let here = idx(i, j, k);
                s[here] = best.0;
                back[here] = best.1;
            }
        }
    }
    let score = s[idx(n1 - 1, n2 - 1, n3 - 1)];
    if score == f64::NEG_INFINITY {
        return Err(Error::Unreachable);
    }
    let mut rows = vec![Vec::new(), Vec::new(), Vec::new()];
    let (mut i, mut j, mut k) = (n1 - 1, n2 - 1, n3 - 1);
    while i + j + k > 0 {
        let t = back[idx(i, j, k)] as usize;
        let (du, dv, dw) = MOVES[t - 1];
        rows[0].push(if du == 1 { a[i - 1] } else { GAP });
        rows[1].push(if dv == 1 { b[j - 1] } else { GAP });
        rows[2].push(if dw == 1 { c[k - 1] } else { GAP });
        i -= du;
        j -= dv;
        k -= dw;
    }
    for r in &mut rows {
        r.reverse();
    }
    let ids = vec![u.id().to_string(), v.id().to_string(), w.id().to_string()];
    Ok((Alignment::new(ids, rows)?, score))
}
