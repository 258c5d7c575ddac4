use super::{
    progressive_align_cached, sequence_weights, Aligner, LibraryScorer, PipelineConfig, PosteriorScorer,
    PspScorer, SubtreeCache,
};
use crate::consistlib::{build_primary_library, extend_library, ConstraintLibrary};
use crate::exactdp::align_rows_global;
use crate::guidetree::{
    build_tree, cluster_by_similarity, compare_trees, fractional_identity, kimura_distance, DistanceMatrix,
    GuideTree,
};
use crate::seqcore::GAP;
use crate::pairhmm::{compute_posteriors, consistency_transform, expected_accuracy_table, PairHmmParams, PosteriorSet};
use crate::refine::{bipartition_refine, random_partition_refine, RefineReport};
use crate::seqcore::{Alignment, GapModel, Sequence, SubstitutionMatrix};
use crate::{Error, Result};

/// Alignment plus the intermediate products of a progressive pipeline.
#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub alignment: Alignment,
    /// Final guide tree.
    pub tree: GuideTree,
    pub refine: Option<RefineReport>,
    /// Changed-node counts of every stage-2 tree comparison (muscle only).
    pub stage2_changes: Vec<usize>,
}

fn ids(seqs: &[Sequence]) -> Vec<String> {
    seqs.iter().map(|s| s.id().to_string()).collect()
}

fn check(seqs: &[Sequence]) -> Result<()> {
    if seqs.len() < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 sequences, got {}", seqs.len())));
    }
    Ok(())
}

/// Kimura distances from the pairwise identities of the rows of `a`.
pub fn kimura_matrix(a: &Alignment) -> Result<DistanceMatrix> {
    DistanceMatrix::from_fn(a.ids().to_vec(), |i, j| kimura_distance(fractional_identity(a.row(i), a.row(j))))
}

/// k-mer tree, progressive PSP alignment, tree re-estimation from the
/// alignment, then tree-dependent refinement.
pub fn muscle_pipeline(seqs: &[Sequence], cfg: &PipelineConfig, m: &SubstitutionMatrix) -> Result<PipelineOutput> {
    check(seqs)?;
    let mc = &cfg.muscle;
    let k = mc.kmer.min(seqs.iter().map(Sequence::len).min().unwrap_or(1)).max(1);
    let mut tree = build_tree(&DistanceMatrix::from_kmers(seqs, k)?, mc.tree)?;
    let scorer = PspScorer(m);
    let mut al = Aligner {
        scorer: &scorer,
        gap: cfg.gap,
        gap_scaling: cfg.gap_scaling,
        weights: sequence_weights(seqs.len(), cfg.weighting, Some(&tree)),
        alphabet: m.alphabet().clone(),
    };
    let mut cache = SubtreeCache::new();
    let (mut aln, _) = progressive_align_cached(seqs, &tree, &al, &mut cache)?;

    let mut stage2_changes = Vec::new();
    for _ in 0..mc.stage2_iterations {
        let next = build_tree(&kimura_matrix(&aln)?, mc.tree)?;
        let changed = compare_trees(&tree, &next)?.len();
        let converged = stage2_changes.last().is_some_and(|&prev| changed >= prev);
        stage2_changes.push(changed);
        if changed == 0 || converged {
            break;
        }
        tree = next;
        al.weights = sequence_weights(seqs.len(), cfg.weighting, Some(&tree));
        if cfg.weighting != super::SequenceWeighting::Uniform {
            cache.clear();
        }
        aln = progressive_align_cached(seqs, &tree, &al, &mut cache)?.0;
    }

    let (aln, report) = bipartition_refine(&aln, &tree, &al, m, &cfg.gap, mc.refine_iterations)?;
    Ok(PipelineOutput {
        alignment: aln,
        tree,
        refine: Some(report),
        stage2_changes,
    })
}

/// Distances `1 − identity` of the global pairwise alignments.
pub fn global_identity_distances(seqs: &[Sequence], m: &SubstitutionMatrix, g: &GapModel) -> Result<DistanceMatrix> {
    DistanceMatrix::from_fn(ids(seqs), |i, j| {
        let (rows, _) = align_rows_global(seqs[i].residues(), seqs[j].residues(), m, g)?;
        Ok(1.0 - fractional_identity(&rows[0], &rows[1]))
    })
}

/// The extended library of a T-Coffee run.
pub fn tcoffee_library(seqs: &[Sequence], cfg: &PipelineConfig, m: &SubstitutionMatrix) -> Result<ConstraintLibrary> {
    Ok(extend_library(&build_primary_library(seqs, m, &cfg.gap, cfg.tcoffee.topk)?))
}

/// Extended-library scoring along a neighbor-joining tree with zero gap costs.
pub fn tcoffee_pipeline(seqs: &[Sequence], cfg: &PipelineConfig, m: &SubstitutionMatrix) -> Result<PipelineOutput> {
    check(seqs)?;
    let lib = tcoffee_library(seqs, cfg, m)?;
    let tree = build_tree(&global_identity_distances(seqs, m, &cfg.gap)?, cfg.tcoffee.tree)?;
    let scorer = LibraryScorer(&lib);
    let al = Aligner {
        scorer: &scorer,
        gap: GapModel::zero(),
        gap_scaling: false,
        weights: vec![1.0 / seqs.len() as f64; seqs.len()],
        alphabet: m.alphabet().clone(),
    };
    let (aln, _) = progressive_align_cached(seqs, &tree, &al, &mut SubtreeCache::new())?;
    Ok(PipelineOutput {
        alignment: aln,
        tree,
        refine: None,
        stage2_changes: Vec::new(),
    })
}

/// Sum over row pairs of the posteriors of the residue pairs they align.
/// Walks columns in order so the floating-point sum is reproducible.
pub fn posterior_objective(a: &Alignment, set: &PosteriorSet) -> f64 {
    let rows = a.rows();
    let mut pos = vec![0usize; rows.len()];
    let mut total = 0.0;
    for c in 0..a.width() {
        for x in 0..rows.len() {
            if rows[x][c] == GAP {
                continue;
            }
            for y in x + 1..rows.len() {
                if rows[y][c] != GAP {
                    if let Some(p) = set.stored(x, y) {
                        total += p.get(pos[x], pos[y]);
                    }
                }
            }
        }
        for (k, row) in rows.iter().enumerate() {
            if row[c] != GAP {
                pos[k] += 1;
            }
        }
    }
    total
}

/// Transformed posteriors and the guide tree of a ProbCons run.
pub fn probcons_posteriors(
    seqs: &[Sequence],
    cfg: &PipelineConfig,
    m: &SubstitutionMatrix,
) -> Result<(PosteriorSet, GuideTree)> {
    let pc = &cfg.probcons;
    let params = PairHmmParams::new(m, &pc.hmm)?;
    let raw = compute_posteriors(seqs, &params, pc.epsilon)?;
    let tree = cluster_by_similarity(&expected_accuracy_table(&raw)?)?;
    let set = consistency_transform(&raw, pc.epsilon, pc.consistency_rounds)?;
    Ok((set, tree))
}

/// Posterior consistency, similarity clustering, zero-gap progressive
/// alignment on summed posteriors and random bipartition refinement.
pub fn probcons_pipeline(seqs: &[Sequence], cfg: &PipelineConfig, m: &SubstitutionMatrix) -> Result<PipelineOutput> {
    check(seqs)?;
    let (set, tree) = probcons_posteriors(seqs, cfg, m)?;
    let scorer = PosteriorScorer(&set);
    let al = Aligner {
        scorer: &scorer,
        gap: GapModel::zero(),
        gap_scaling: false,
        weights: vec![1.0 / seqs.len() as f64; seqs.len()],
        alphabet: m.alphabet().clone(),
    };
    let (aln, _) = progressive_align_cached(seqs, &tree, &al, &mut SubtreeCache::new())?;
    let objective = |a: &Alignment| Ok(posterior_objective(a, &set));
    let (aln, report) = random_partition_refine(
        &aln,
        &al,
        cfg.probcons.refine_rounds,
        cfg.seed,
        cfg.probcons.acceptance,
        &objective,
    )?;
    Ok(PipelineOutput {
        alignment: aln,
        tree,
        refine: Some(report),
        stage2_changes: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactdp::align_pair_global;
    use crate::objective::{aligned_pairs, pair_alignment_score};
    use crate::pairhmm::{forward_backward, mea_alignment};

    fn seqs(v: &[&str]) -> Vec<Sequence> {
        v.iter().enumerate().map(|(k, s)| Sequence::new(format!("s{k}"), *s).unwrap()).collect()
    }

    const FAMILY: [&str; 5] = ["MKVLATGHWEQRST", "MKVIATGHWEQST", "MRVLATGHFEQRST", "MKVLSGHWEQRT", "KVLATGHWDQRST"];

    #[test]
    fn pair_collapses_to_pairwise() {
        let m = SubstitutionMatrix::blosum62();
        let cfg = PipelineConfig::default();
        let s = seqs(&["MKVLATGHWE", "MKILSTGHFE"]);
        let out = muscle_pipeline(&s, &cfg, &m).unwrap();
        let (_, best) = align_pair_global(&s[0], &s[1], &m, &cfg.gap).unwrap();
        assert_eq!(pair_alignment_score(&out.alignment, &m, &cfg.gap).unwrap(), best);
    }

    #[test]
    fn identical_inputs_are_gap_free() {
        let m = SubstitutionMatrix::blosum62();
        let cfg = PipelineConfig::default();
        let s = seqs(&["MKVLATGHW"; 3]);
        for run in [muscle_pipeline, tcoffee_pipeline, probcons_pipeline] {
            let out = run(&s, &cfg, &m).unwrap();
            assert_eq!(out.alignment.gap_count(), 0);
        }
        let out = muscle_pipeline(&s, &cfg, &m).unwrap();
        assert_eq!(out.stage2_changes, vec![0]);
    }

    #[test]
    fn pipelines_keep_every_sequence() {
        let m = SubstitutionMatrix::blosum62();
        let s = seqs(&FAMILY);
        for rounds in 0..3 {
            let mut cfg = PipelineConfig::default();
            cfg.probcons.consistency_rounds = rounds;
            cfg.probcons.refine_rounds = 5;
            for run in [muscle_pipeline, tcoffee_pipeline, probcons_pipeline] {
                let out = run(&s, &cfg, &m).unwrap();
                out.alignment.check_sources(&s).unwrap();
                out.tree.validate().unwrap();
            }
        }
    }

    #[test]
    fn probcons_pair_is_mea() {
        let m = SubstitutionMatrix::blosum62();
        let mut cfg = PipelineConfig::default();
        cfg.probcons.consistency_rounds = 0;
        let s = seqs(&["MKVLATGHWE", "MKILSGHFE"]);
        let out = probcons_pipeline(&s, &cfg, &m).unwrap();
        let params = PairHmmParams::new(&m, &cfg.probcons.hmm).unwrap();
        let (p, _) = forward_backward(s[0].residues(), s[1].residues(), &params, cfg.probcons.epsilon).unwrap();
        let (mea, _) = mea_alignment(&s[0], &s[1], &p).unwrap();
        assert_eq!(out.alignment, mea);
    }

    #[test]
    fn tcoffee_pair_maximises_library_weight() {
        let m = SubstitutionMatrix::blosum62();
        let cfg = PipelineConfig::default();
        let s = seqs(&["MKVLATGHWE", "MKILSGHFE"]);
        let out = tcoffee_pipeline(&s, &cfg, &m).unwrap();
        let lib = tcoffee_library(&s, &cfg, &m).unwrap();
        let w: Vec<Vec<f64>> = (1..=s[0].len())
            .map(|i| (1..=s[1].len()).map(|j| lib.weight(0, i, 1, j)).collect())
            .collect();
        let best = crate::pairhmm::mea_align(&crate::pairhmm::PosteriorMatrix::from_dense(&w, 0.0));
        let got: f64 = aligned_pairs(out.alignment.rows()).iter().map(|&(_, i, _, j)| w[i][j]).sum();
        let opt: f64 = best.pairs.iter().map(|&(i, j)| w[i][j]).sum();
        assert!((got - opt).abs() < 1e-9);
    }

    #[test]
    fn posterior_objective_sums_aligned_pairs() {
        let m = SubstitutionMatrix::blosum62();
        let cfg = PipelineConfig::default();
        let s = seqs(&FAMILY[..4]);
        let (set, _) = probcons_posteriors(&s, &cfg, &m).unwrap();
        let out = probcons_pipeline(&s, &cfg, &m).unwrap();
        let want: f64 = aligned_pairs(out.alignment.rows())
            .into_iter()
            .map(|(x, i, y, j)| set.stored(x, y).unwrap().get(i, j))
            .sum();
        assert!((posterior_objective(&out.alignment, &set) - want).abs() < 1e-9);
    }

    #[test]
    fn deterministic() {
        let m = SubstitutionMatrix::blosum62();
        let mut cfg = PipelineConfig::default();
        cfg.probcons.refine_rounds = 10;
        cfg.seed = 3;
        let s = seqs(&FAMILY);
        for run in [muscle_pipeline, tcoffee_pipeline, probcons_pipeline] {
            assert_eq!(run(&s, &cfg, &m).unwrap().alignment, run(&s, &cfg, &m).unwrap().alignment);
        }
    }
}
