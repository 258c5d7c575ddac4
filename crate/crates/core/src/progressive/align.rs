use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{ColumnPairScorer, Profile};
use crate::dp::{self, GapCosts};
use crate::guidetree::GuideTree;
use crate::seqcore::{Alignment, Alphabet, GapModel, Sequence, TerminalGaps};
use crate::{Error, Result};

/// A sub-alignment of some input sequences; `rows[k]` is sequence `members[k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    pub members: Vec<usize>,
    pub rows: Vec<Vec<u8>>,
}

impl Group {
    pub fn single(index: usize, seq: &Sequence) -> Self {
        Self {
            members: vec![index],
            rows: vec![seq.residues().to_vec()],
        }
    }

    pub fn width(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    /// Rows of `a` listed in `which`, with all-gap columns removed.
    pub fn project(a: &Alignment, which: &[usize]) -> Result<Self> {
        let sub = a.select_rows(which)?;
        Ok(Self {
            members: which.to_vec(),
            rows: sub.into_parts().1,
        })
    }

    /// Alignment over `ids` with rows sorted by member index.
    pub fn into_alignment(self, ids: &[String]) -> Result<Alignment> {
        let mut pairs: Vec<(usize, Vec<u8>)> = self.members.into_iter().zip(self.rows).collect();
        pairs.sort_by_key(|p| p.0);
        let (idx, rows): (Vec<usize>, Vec<Vec<u8>>) = pairs.into_iter().unzip();
        Alignment::new(idx.iter().map(|&k| ids[k].clone()).collect(), rows)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SequenceWeighting {
    #[default]
    Uniform,
    /// Branch lengths shared out among the leaves below each edge.
    Tree,
}

/// Per-sequence weights; tree weights fall back to uniform on a zero-length tree.
pub fn sequence_weights(n: usize, scheme: SequenceWeighting, tree: Option<&GuideTree>) -> Vec<f64> {
    let uniform = vec![1.0 / n as f64; n];
    let (SequenceWeighting::Tree, Some(t)) = (scheme, tree) else {
        return uniform;
    };
    let mut w = vec![0.0; n];
    for id in 0..t.num_nodes() - 1 {
        let below = t.leaves_under(id);
        let share = t.node(id).branch / below.len() as f64;
        for leaf in below {
            w[leaf] += share;
        }
    }
    let total: f64 = w.iter().sum();
    if total > 0.0 {
        w.iter().map(|x| x / total).collect()
    } else {
        uniform
    }
}

/// Everything needed to merge two groups by profile-profile DP.
pub struct Aligner<'a> {
    pub scorer: &'a dyn ColumnPairScorer,
    pub gap: GapModel,
    /// Scale gap costs by the residue fraction of the column opposite the gap.
    pub gap_scaling: bool,
    /// Weight of every input sequence.
    pub weights: Vec<f64>,
    pub alphabet: Alphabet,
}

impl Aligner<'_> {
    pub fn profile(&self, g: &Group) -> Result<Profile> {
        let w: Vec<f64> = g.members.iter().map(|&k| self.weights[k]).collect();
        Profile::new(&g.rows, &g.members, &w, &self.alphabet)
    }

    /// Merges `a` and `b`; the rows of `a` come first.
    pub fn align(&self, a: &Group, b: &Group) -> Result<(Group, f64)> {
        let (pa, pb) = (self.profile(a)?, self.profile(b)?);
        profile_align(&pa, &pb, a, b, self)
    }
}

/// Global DP over profile columns. Zero gap models use the plain
/// maximum-weight path (ties prefer matches); otherwise affine costs apply.
pub fn profile_align(pa: &Profile, pb: &Profile, a: &Group, b: &Group, al: &Aligner) -> Result<(Group, f64)> {
    let (n, m) = (pa.width(), pb.width());
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("profiles must have at least one column".into()));
    }
    let sub = al.scorer.score_matrix(pa, pb);
    let (path, score) = if al.gap.is_zero() {
        dp::max_sum_path(n, m, |i, j| sub[i * m + j])
    } else {
        let costs = |p: &Profile| {
            let mut c = GapCosts::uniform(p.width(), al.gap.open, al.gap.extend);
            if al.gap_scaling {
                for k in 0..p.width() {
                    let s = 1.0 - p.gap_fraction(k);
                    c.open[k] *= s;
                    c.extend[k] *= s;
                }
            }
            c
        };
        dp::affine_global(
            n,
            m,
            |i, j| sub[i * m + j],
            &costs(pa),
            &costs(pb),
            al.gap.terminal == TerminalGaps::Free,
        )
    };
    let rows = dp::merge_rows(&a.rows, &b.rows, &path);
    let members = a.members.iter().chain(&b.members).copied().collect();
    Ok((Group { members, rows }, score))
}

/// Canonical text of a subtree's shape, identical for child-swapped subtrees.
fn shape_key(tree: &GuideTree, id: usize, keys: &[String]) -> String {
    match tree.children(id) {
        None => id.to_string(),
        Some([a, b]) => {
            let (x, y) = (&keys[a], &keys[b]);
            if x <= y {
                format!("({x},{y})")
            } else {
                format!("({y},{x})")
            }
        }
    }
}

/// Sub-alignments of previously aligned subtrees, keyed by subtree shape.
pub type SubtreeCache = HashMap<String, Group>;

/// Aligns along the tree in post-order and returns the root alignment with
/// rows in input order.
pub fn progressive_align(seqs: &[Sequence], tree: &GuideTree, al: &Aligner) -> Result<Alignment> {
    progressive_align_cached(seqs, tree, al, &mut SubtreeCache::new()).map(|r| r.0)
}

/// Like [`progressive_align`], reusing cached subtrees; also returns how
/// many internal nodes had to be realigned.
pub fn progressive_align_cached(
    seqs: &[Sequence],
    tree: &GuideTree,
    al: &Aligner,
    cache: &mut SubtreeCache,
) -> Result<(Alignment, usize)> {
    if tree.num_leaves() != seqs.len() {
        return Err(Error::LeafSetMismatch);
    }
    let ids: Vec<String> = seqs.iter().map(|s| s.id().to_string()).collect();
    if seqs.len() == 1 {
        return Ok((Alignment::single(&seqs[0]), 0));
    }
    let mut keys = vec![String::new(); tree.num_nodes()];
    let mut groups: Vec<Option<Group>> = vec![None; tree.num_nodes()];
    let mut realigned = 0;
    for id in tree.postorder() {
        keys[id] = shape_key(tree, id, &keys);
        let group = match tree.children(id) {
            None => Group::single(id, &seqs[id]),
            Some([a, b]) => match cache.get(&keys[id]) {
                Some(g) => g.clone(),
                None => {
                    let (ga, gb) = (groups[a].take().expect("child"), groups[b].take().expect("child"));
                    let (g, _) = al.align(&ga, &gb)?;
                    cache.insert(keys[id].clone(), g.clone());
                    realigned += 1;
                    g
                }
            },
        };
        groups[id] = Some(group);
    }
    let root = groups[tree.root()].take().expect("root");
    Ok((root.into_alignment(&ids)?, realigned))
}
