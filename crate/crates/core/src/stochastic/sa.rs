use std::fmt::Write as _;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::contact::ContactTerm;
use super::ga::{random_alignment, shift_residue};
use crate::exactdp::align_rows_global;
use crate::objective::pair_rows_score;
use crate::seqcore::{strip_gap_columns, Alignment, GapModel, Sequence, SubstitutionMatrix, TerminalGaps, GAP};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SaParams {
    pub t0: f64,
    /// Geometric cooling factor applied after each temperature block.
    pub alpha: f64,
    /// Moves per temperature block; 0 means 100·(n + m).
    pub steps: usize,
    /// Weight of the contact term.
    pub w: f64,
    /// Contact-score constant.
    pub c: f64,
    /// Gap-open penalty (positive).
    pub p: f64,
    /// Gap-extension penalty (positive).
    pub q: f64,
    /// Penalty per broken contact.
    pub r: f64,
    pub terminal: TerminalGaps,
    /// Start from a random alignment instead of the DP optimum.
    pub random_init: bool,
    /// Hard cap on temperature blocks.
    pub max_blocks: usize,
    #[serde(skip)]
    pub seed: u64,
}

impl Default for SaParams {
    fn default() -> Self {
        Self {
            t0: 10.0,
            alpha: 0.95,
            steps: 0,
            w: 0.0,
            c: 0.0,
            p: 11.0,
            q: 1.0,
            r: 0.0,
            terminal: TerminalGaps::Free,
            random_init: false,
            max_blocks: 500,
            seed: 0,
        }
    }
}

impl SaParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.t0 > 0.0 && self.t0.is_finite()) {
            return Err(Error::InvalidParameter("t0 must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter("alpha must be in [0, 1)".into()));
        }
        for (name, v) in [("w", self.w), ("c", self.c), ("p", self.p), ("q", self.q), ("r", self.r)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite")));
            }
        }
        self.gap().validate()
    }

    pub fn gap(&self) -> GapModel {
        GapModel {
            open: -self.p,
            extend: -self.q,
            terminal: self.terminal,
        }
    }

    fn steps_for(&self, n: usize, m: usize) -> usize {
        if self.steps == 0 {
            100 * (n + m)
        } else {
            self.steps
        }
    }
}

/// Energy −S of a two-row alignment, where S is the pair score plus, with
/// contacts, w·(Σ contact scores + c) − r·(broken contacts).
pub fn sa_energy(
    rows: [&[u8]; 2],
    m: &SubstitutionMatrix,
    params: &SaParams,
    contacts: Option<&ContactTerm>,
) -> Result<f64> {
    let mut s = pair_rows_score(rows[0], rows[1], m, &params.gap())?;
    if let Some(ct) = contacts {
        let (total, broken) = ct.evaluate(rows);
        s += params.w * (total + params.c) - params.r * broken as f64;
    }
    Ok(-s)
}

/// Metropolis rule: downhill always, uphill with probability exp(−dE/T).
pub fn metropolis_accept(de: f64, t: f64, rng: &mut impl Rng) -> bool {
    if de <= 0.0 {
        true
    } else if t <= 0.0 {
        false
    } else {
        rng.gen::<f64>() < (-de / t).exp()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Move {
    Shift,
    Insert,
    Delete,
}

/// Moves possible from `rows`, with `max_width = n + m`.
pub fn available_moves(rows: &[Vec<u8>; 2], max_width: usize) -> Vec<Move> {
    let gaps = [rows[0].contains(&GAP), rows[1].contains(&GAP)];
    let mut moves = Vec::with_capacity(3);
    if gaps[0] || gaps[1] {
        moves.push(Move::Shift);
    }
    if rows[0].len() < max_width {
        moves.push(Move::Insert);
    }
    if gaps[0] && gaps[1] {
        moves.push(Move::Delete);
    }
    moves
}

fn gap_positions(row: &[u8]) -> Vec<usize> {
    (0..row.len()).filter(|&c| row[c] == GAP).collect()
}

/// A random neighbour of a two-row state: shift a residue into an adjacent
/// gap, add one gap to each row, or remove one gap from each row. Illegal
/// draws leave the state unchanged; all-gap columns are removed.
pub fn sa_perturb(rows: &[Vec<u8>; 2], max_width: usize, rng: &mut impl Rng) -> [Vec<u8>; 2] {
    let moves = available_moves(rows, max_width);
    let mut out = rows.clone();
    let Some(&mv) = moves.choose(rng) else {
        return out;
    };
    match mv {
        Move::Shift => {
            let with_gaps: Vec<usize> = (0..2).filter(|&k| rows[k].contains(&GAP)).collect();
            let k = with_gaps[rng.gen_range(0..with_gaps.len())];
            let residues: Vec<usize> = (0..rows[k].len()).filter(|&c| rows[k][c] != GAP).collect();
            let pos = residues[rng.gen_range(0..residues.len())];
            shift_residue(&mut out[k], pos, rng);
        }
        Move::Insert => {
            let w = rows[0].len();
            let a = rng.gen_range(0..=w);
            let b = loop {
                let b = rng.gen_range(0..=w);
                if b != a {
                    break b;
                }
            };
            out[0].insert(a, GAP);
            out[1].insert(b, GAP);
        }
        Move::Delete => {
            let (ga, gb) = (gap_positions(&rows[0]), gap_positions(&rows[1]));
            let a = ga[rng.gen_range(0..ga.len())];
            let b = gb[rng.gen_range(0..gb.len())];
            out[0].remove(a);
            out[1].remove(b);
            if out[0].iter().zip(&out[1]).any(|(&x, &y)| x == GAP && y == GAP) {
                return rows.clone();
            }
        }
    }
    strip_gap_columns(&mut out);
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockStats {
    pub temperature: f64,
    pub current: f64,
    pub best: f64,
    pub accepted: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SaStop {
    /// Best state unchanged for three blocks.
    Stalled,
    Frozen,
    MaxBlocks,
}

#[derive(Clone, Debug)]
pub struct SaResult {
    pub alignment: Alignment,
    pub energy: f64,
    pub initial_energy: f64,
    pub blocks: Vec<BlockStats>,
    pub stop: SaStop,
}

impl SaResult {
    /// `block<TAB>temperature<TAB>current<TAB>best<TAB>accepted` lines.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("block\ttemperature\tcurrent\tbest\taccepted\n");
        for (k, b) in self.blocks.iter().enumerate() {
            let _ = writeln!(out, "{}\t{}\t{}\t{}\t{}", k + 1, b.temperature, b.current, b.best, b.accepted);
        }
        out
    }
}

/// Simulated annealing over pairwise alignments with geometric cooling.
/// Stops once the best state survives three blocks unchanged or the
/// temperature drops below machine epsilon.
pub fn sa_run(
    x: &Sequence,
    y: &Sequence,
    m: &SubstitutionMatrix,
    params: &SaParams,
    contacts: Option<&ContactTerm>,
) -> Result<SaResult> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let max_width = x.len() + y.len();
    let mut cur: [Vec<u8>; 2] = if params.random_init {
        let a = random_alignment(&[x.clone(), y.clone()], x.len().min(y.len()), &mut rng)?;
        let (_, rows) = a.into_parts();
        [rows[0].clone(), rows[1].clone()]
    } else {
        let (rows, _) = align_rows_global(x.residues(), y.residues(), m, &params.gap())?;
        [rows[0].clone(), rows[1].clone()]
    };
    let energy = |r: &[Vec<u8>; 2]| sa_energy([&r[0], &r[1]], m, params, contacts);
    let mut e_cur = energy(&cur)?;
    let initial_energy = e_cur;
    let (mut best, mut e_best) = (cur.clone(), e_cur);
    let steps = params.steps_for(x.len(), y.len());
    let mut t = params.t0;
    let mut blocks = Vec::new();
    let mut stale = 0;
    let stop = loop {
        if blocks.len() >= params.max_blocks {
            break SaStop::MaxBlocks;
        }
        let mut improved = false;
        let mut accepted = 0;
        for _ in 0..steps {
            let next = sa_perturb(&cur, max_width, &mut rng);
            let e_next = energy(&next)?;
            if metropolis_accept(e_next - e_cur, t, &mut rng) {
                cur = next;
                e_cur = e_next;
                accepted += 1;
                if e_cur < e_best {
                    best = cur.clone();
                    e_best = e_cur;
                    improved = true;
                }
            }
        }
        blocks.push(BlockStats {
            temperature: t,
            current: e_cur,
            best: e_best,
            accepted,
        });
        stale = if improved { 0 } else { stale + 1 };
        if stale >= 3 {
            break SaStop::Stalled;
        }
        t *= params.alpha;
        if t < f64::EPSILON {
            break SaStop::Frozen;
        }
    };
    let [bx, by] = best;
    Ok(SaResult {
        alignment: Alignment::new(vec![x.id().into(), y.id().into()], vec![bx, by])?,
        energy: e_best,
        initial_energy,
        blocks,
        stop,
    })
}
