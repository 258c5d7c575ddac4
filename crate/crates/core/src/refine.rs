//! Iterative refinement by realigning two groups of rows.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::guidetree::GuideTree;
use crate::objective::sp_score;
use crate::progressive::{Aligner, Group};
use crate::seqcore::{Alignment, GapModel, SubstitutionMatrix};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    AllEdgesClean,
    MaxIterations,
    RoundsExhausted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RefineReport {
    /// Sweeps for tree refinement, rounds for random refinement.
    pub iterations: usize,
    pub accepted: usize,
    /// Edges or partitions tried in total.
    pub moves_tried: usize,
    pub initial: f64,
    /// Objective after each accepted move.
    pub trajectory: Vec<f64>,
    pub reason: StopReason,
}

impl RefineReport {
    /// `step<TAB>score` lines; step 0 is the starting alignment.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("step\tscore\n");
        let _ = writeln!(out, "0\t{}", self.initial);
        for (k, s) in self.trajectory.iter().enumerate() {
            let _ = writeln!(out, "{}\t{s}", k + 1);
        }
        out
    }
}

/// Splits `a` into `left` and its complement and realigns the two profiles.
fn realign_split(a: &Alignment, left: &[usize], al: &Aligner) -> Result<Alignment> {
    let right: Vec<usize> = (0..a.num_rows()).filter(|k| !left.contains(k)).collect();
    let (ga, gb) = (Group::project(a, left)?, Group::project(a, &right)?);
    let (merged, _) = al.align(&ga, &gb)?;
    merged.into_alignment(a.ids())
}

/// Tree edges (named by their child node) ordered by decreasing depth,
/// ties by leaf set.
pub fn edge_order(tree: &GuideTree) -> Vec<usize> {
    let mut edges: Vec<(usize, Vec<usize>, usize)> = (0..tree.num_nodes())
        .filter(|&id| id != tree.root())
        .map(|id| (tree.depth(id), tree.leaves_under(id), id))
        .collect();
    edges.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    edges.into_iter().map(|e| e.2).collect()
}

/// Tree-dependent restricted partitioning: each edge splits the rows in two,
/// the halves are realigned and the result kept only when the SP score rises.
/// Rows of `a` must be the tree's leaves in order.
pub fn bipartition_refine(
    a: &Alignment,
    tree: &GuideTree,
    al: &Aligner,
    m: &SubstitutionMatrix,
    g: &GapModel,
    max_iterations: usize,
) -> Result<(Alignment, RefineReport)> {
    if tree.num_leaves() != a.num_rows() {
        return Err(Error::LeafSetMismatch);
    }
    let mut cur = a.clone();
    let mut best = if a.num_rows() >= 2 { sp_score(a, m, g)? } else { 0.0 };
    let mut report = RefineReport {
        iterations: 0,
        accepted: 0,
        moves_tried: 0,
        initial: best,
        trajectory: Vec::new(),
        reason: StopReason::MaxIterations,
    };
    if a.num_rows() < 2 {
        report.reason = StopReason::AllEdgesClean;
        return Ok((cur, report));
    }
    let edges = edge_order(tree);
    while report.iterations < max_iterations {
        report.iterations += 1;
        let mut changed = false;
        for &e in &edges {
            report.moves_tried += 1;
            let cand = realign_split(&cur, &tree.leaves_under(e), al)?;
            let s = sp_score(&cand, m, g)?;
            if s > best {
                best = s;
                cur = cand;
                changed = true;
                report.accepted += 1;
                report.trajectory.push(s);
            }
        }
        if !changed {
            report.reason = StopReason::AllEdgesClean;
            break;
        }
    }
    Ok((cur, report))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Acceptance {
    #[default]
    Always,
    IfImproved,
}

/// Random bipartition refinement: every round sends each row to one of two
/// groups with probability ½ (redrawing when a group is empty) and
/// realigns the groups.
pub fn random_partition_refine(
    a: &Alignment,
    al: &Aligner,
    rounds: usize,
    seed: u64,
    acceptance: Acceptance,
    objective: &dyn Fn(&Alignment) -> Result<f64>,
) -> Result<(Alignment, RefineReport)> {
    let n = a.num_rows();
    if n < 2 {
        return Err(Error::InvalidParameter("random partitioning needs at least 2 rows".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = a.clone();
    let mut score = objective(a)?;
    let mut report = RefineReport {
        iterations: 0,
        accepted: 0,
        moves_tried: 0,
        initial: score,
        trajectory: Vec::new(),
        reason: StopReason::RoundsExhausted,
    };
    for _ in 0..rounds {
        report.iterations += 1;
        report.moves_tried += 1;
        let left = loop {
            let left: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
            if !left.is_empty() && left.len() < n {
                break left;
            }
        };
        let cand = realign_split(&cur, &left, al)?;
        let s = objective(&cand)?;
        if acceptance == Acceptance::Always || s > score {
            cur = cand;
            score = s;
            report.accepted += 1;
            report.trajectory.push(s);
        }
    }
    Ok((cur, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::progressive::PspScorer;
    use crate::seqcore::Sequence;

    fn aligner(m: &SubstitutionMatrix, n: usize) -> Aligner<'_> {
        Aligner {
            scorer: Box::leak(Box::new(PspScorer(m))),
            gap: GapModel::default(),
            gap_scaling: true,
            weights: vec![1.0 / n as f64; n],
            alphabet: m.alphabet().clone(),
        }
    }

    fn aln(rows: &[&str]) -> Alignment {
        Alignment::new(
            (0..rows.len()).map(|k| format!("s{k}")).collect(),
            rows.iter().map(|r| r.as_bytes().to_vec()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn optimal_pair_is_left_alone() {
        let m = SubstitutionMatrix::blosum62();
        let a = aln(&["MKVLAT", "MKVLAT"]);
        let t = GuideTree::from_merges(2, &[(0, 1)]).unwrap();
        let (out, rep) = bipartition_refine(&a, &t, &aligner(&m, 2), &m, &GapModel::default(), 10).unwrap();
        assert_eq!(out, a);
        assert_eq!(rep.accepted, 0);
        assert_eq!(rep.iterations, 1);
        assert_eq!(rep.moves_tried, 2);
        assert_eq!(rep.reason, StopReason::AllEdgesClean);
    }

    #[test]
    fn misplaced_gap_is_repaired() {
        let m = SubstitutionMatrix::blosum62();
        let g = GapModel::default();
        let a = aln(&["WKHWC", "WKHWC", "W-KHW"]);
        let t = GuideTree::from_merges(3, &[(0, 1), (3, 2)]).unwrap();
        let before = sp_score(&a, &m, &g).unwrap();
        let (out, rep) = bipartition_refine(&a, &t, &aligner(&m, 3), &m, &g, 5).unwrap();
        let after = sp_score(&out, &m, &g).unwrap();
        assert!(after > before, "{after} vs {before}");
        assert!(rep.accepted >= 1);
        assert_eq!(out.row(2), b"WKHW-");
        assert_eq!(rep.moves_tried % 4, 0);
    }

    #[test]
    fn zero_iterations_is_identity() {
        let m = SubstitutionMatrix::blosum62();
        let a = aln(&["WKHWC", "W-KHW"]);
        let t = GuideTree::from_merges(2, &[(0, 1)]).unwrap();
        let (out, rep) = bipartition_refine(&a, &t, &aligner(&m, 2), &m, &GapModel::default(), 0).unwrap();
        assert_eq!(out, a);
        assert_eq!(rep.iterations, 0);
    }

    #[test]
    fn edges_deepest_first() {
        let t = GuideTree::from_merges(4, &[(0, 1), (4, 2), (5, 3)]).unwrap();
        let order = edge_order(&t);
        assert_eq!(order.len(), 6);
        assert_eq!(&order[..2], &[0, 1]);
        assert_eq!(*order.last().unwrap(), 3);
    }

    #[test]
    fn random_refinement() {
        let m = SubstitutionMatrix::blosum62();
        let g = GapModel::default();
        let a = aln(&["WKHWC", "WKH-C", "W-KHW", "WKHWW"]);
        let al = aligner(&m, 4);
        let obj = |x: &Alignment| sp_score(x, &m, &g);
        let (same, rep) = random_partition_refine(&a, &al, 0, 1, Acceptance::Always, &obj).unwrap();
        assert_eq!(same, a);
        assert_eq!(rep.iterations, 0);

        let run = || random_partition_refine(&a, &al, 20, 7, Acceptance::IfImproved, &obj).unwrap();
        let (out, rep) = run();
        assert_eq!(run().0, out);
        assert!(rep.trajectory.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(rep.reason, StopReason::RoundsExhausted);
        out.check_sources(&a.sequences()).unwrap();

        let one = Alignment::single(&Sequence::new("x", "ACD").unwrap());
        assert!(random_partition_refine(&one, &al, 3, 0, Acceptance::Always, &obj).is_err());
    }
}
