//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; exits non-zero on failure.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use msakit::consistlib::{extend_library, extend_library_counted, ConstraintLibrary};
use msakit::exactdp::{align_pair_global, align_three, align_three_with, enumerate_optimal, for_each_alignment, ThreeWayOptions};
use msakit::guidetree::{compare_trees, neighbor_joining, upgma, DistanceMatrix, GuideTree};
use msakit::objective::{ga_fitness, pair_rows_score, q_score, sp_score, ColumnScorer};
use msakit::pairhmm::{
    compute_posteriors, consistency_transform, default_params, forward_backward_tables, mea_align, PosteriorMatrix,
    PosteriorSet,
};
use msakit::progressive::{Aligner, PipelineConfig, PspScorer};
use msakit::refine::bipartition_refine;
use msakit::stochastic::{ga_run, metropolis_accept, random_alignment, sa_run, GaParams, SaParams};
use msakit::{Alignment, Alphabet, GapModel, Sequence, SubstitutionMatrix};
use msakit_cli::bench::{mean_q, run_bench, BenchRecord, BASELINE, DEFAULT_STRATEGIES};
use msakit_cli::corpus::{bundled, write_corpus, Tier};
use msakit_cli::run::run_strategy;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

const DNA: &[u8] = b"ACGT";
const PROTEIN: &[u8] = b"ACDEFGHIKLMNPQRSTVWY";

fn random_seq(rng: &mut ChaCha8Rng, letters: &[u8], lo: usize, hi: usize) -> Vec<u8> {
    let len = rng.gen_range(lo..=hi);
    (0..len).map(|_| letters[rng.gen_range(0..letters.len())]).collect()
}

fn seq(id: &str, r: &[u8]) -> Sequence {
    Sequence::new(id, r.to_vec()).unwrap()
}

fn dna_matrix() -> SubstitutionMatrix {
    SubstitutionMatrix::simple(Alphabet::nucleotide(), 2.0, -1.0).unwrap()
}

fn random_triples(seed: u64, count: usize) -> Vec<[Vec<u8>; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| std::array::from_fn(|_| random_seq(&mut rng, DNA, 1, 5)))
        .collect()
}

fn exact_dp_oracle() -> Outcome {
    let m = dna_matrix();
    let scorer = ColumnScorer::new(&m, -2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for k in 0..100 {
        let (x, y) = (random_seq(&mut rng, DNA, 1, 7), random_seq(&mut rng, DNA, 1, 7));
        let (_, s) = align_pair_global(&seq("x", &x), &seq("y", &y), &m, &GapModel::linear(-2.0)).unwrap();
        let best = enumerate_optimal(&[&x, &y], &scorer).unwrap();
        ensure!(s == best, "pair {k}: dp {s} vs enumeration {best}");
    }
    for (k, [u, v, w]) in random_triples(2, 100).iter().enumerate() {
        let (_, s) = align_three(&seq("u", u), &seq("v", v), &seq("w", w), &scorer).unwrap();
        let best = enumerate_optimal(&[u, v, w], &scorer).unwrap();
        ensure!(s == best, "triple {k}: dp {s} vs enumeration {best}");
    }
    Ok("100 pairs and 100 triples match".into())
}

fn recurrence_ablation() -> Outcome {
    let m = dna_matrix();
    let scorer = ColumnScorer::new(&m, -2.0);
    let cases = random_triples(3, 100);
    let optimum: Vec<f64> = cases
        .iter()
        .map(|[u, v, w]| enumerate_optimal(&[u, v, w], &scorer).unwrap())
        .collect();
    let mut caught = Vec::new();
    for t in 0..7 {
        let mut opts = ThreeWayOptions::default();
        opts.enabled[t] = false;
        let failures = cases
            .iter()
            .zip(&optimum)
            .filter(|([u, v, w], &best)| {
                align_three_with(&seq("u", u), &seq("v", v), &seq("w", w), &scorer, &opts)
                    .map_or(true, |(_, s)| s != best)
            })
            .count();
        ensure!(failures > 0, "removing move {} goes unnoticed", t + 1);
        caught.push(failures);
    }
    Ok(format!("failing cases per removed move: {caught:?}"))
}

fn hmm_identities() -> Outcome {
    let m = SubstitutionMatrix::blosum62();
    let params = default_params(&m, 0.02, 0.6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_rel = 0.0f64;
    let mut worst_sum = 0.0f64;
    for k in 0..50 {
        let (x, y) = (random_seq(&mut rng, PROTEIN, 1, 50), random_seq(&mut rng, PROTEIN, 1, 50));
        let fb = forward_backward_tables(&x, &y, &params).unwrap();
        let rel = (fb.log_forward - fb.log_backward).abs() / fb.log_forward.abs().max(f64::MIN_POSITIVE);
        ensure!(rel <= 1e-9, "pair {k}: forward {} backward {}", fb.log_forward, fb.log_backward);
        worst_rel = worst_rel.max(rel);
        let p = fb.dense();
        for row in &p {
            worst_sum = worst_sum.max(row.iter().sum());
        }
        for j in 0..y.len() {
            worst_sum = worst_sum.max(p.iter().map(|r| r[j]).sum());
        }
        ensure!(worst_sum <= 1.0 + 1e-6, "pair {k}: posterior sum {worst_sum}");
    }
    Ok(format!("max relative gap {worst_rel:.2e}, max row/column sum {worst_sum:.9}"))
}

fn mea_optimality() -> Outcome {
    let m = SubstitutionMatrix::blosum62();
    let params = default_params(&m, 0.02, 0.6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    for n in 1..=6 {
        for l in 1..=6 {
            for _ in 0..3 {
                let (x, y) = (random_seq(&mut rng, PROTEIN, n, n), random_seq(&mut rng, PROTEIN, l, l));
                let p = PosteriorMatrix::from_dense(&forward_backward_tables(&x, &y, &params).unwrap().dense(), 0.0);
                let mut brute = f64::NEG_INFINITY;
                for_each_alignment(&[&x, &y], |rows| {
                    let (mut i, mut j, mut acc) = (0, 0, 0.0);
                    for (a, b) in rows[0].iter().zip(&rows[1]) {
                        if *a != b'-' && *b != b'-' {
                            acc += p.get(i, j);
                        }
                        i += usize::from(*a != b'-');
                        j += usize::from(*b != b'-');
                    }
                    brute = brute.max(acc);
                })
                .unwrap();
                let mea = mea_align(&p);
                let realised: f64 = mea.pairs.iter().map(|&(i, j)| p.get(i, j)).sum();
                ensure!((realised - brute).abs() <= 1e-12, "{n}x{l}: mea {realised} vs brute force {brute}");
                let normalised = brute / n.min(l) as f64;
                ensure!(
                    (mea.expected_accuracy - normalised).abs() <= 1e-12,
                    "{n}x{l}: reported accuracy {} vs {normalised}",
                    mea.expected_accuracy
                );
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} pairs, all length combinations up to 6"))
}

fn dense(set: &PosteriorSet, a: usize, b: usize) -> Vec<Vec<f64>> {
    if a == b {
        let n = set.lengths()[a];
        return (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    }
    set.get(a, b).unwrap().to_dense()
}

fn consistency_transform_check() -> Outcome {
    let m = SubstitutionMatrix::blosum62();
    let params = default_params(&m, 0.02, 0.6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for k in 0..10 {
        let seqs: Vec<Sequence> = (0..3)
            .map(|s| seq(&format!("s{s}"), &random_seq(&mut rng, PROTEIN, 3, 12)))
            .collect();
        let set = compute_posteriors(&seqs, &params, 0.0).unwrap();
        let out = consistency_transform(&set, 0.0, 1).unwrap();
        for x in 0..3 {
            for y in 0..3 {
                if x == y {
                    continue;
                }
                let got = out.get(x, y).unwrap();
                let (lx, ly) = (seqs[x].len(), seqs[y].len());
                for i in 0..lx {
                    for j in 0..ly {
                        let mut want = 0.0;
                        for z in 0..3 {
                            let (pxz, pzy) = (dense(&set, x, z), dense(&set, z, y));
                            for (kk, row) in pzy.iter().enumerate() {
                                want += pxz[i][kk] * row[j];
                            }
                        }
                        want /= 3.0;
                        let d = (got.get(i, j) - want.min(1.0)).abs();
                        worst = worst.max(d);
                        ensure!(d <= 1e-12, "set {k} pair ({x},{y}) cell ({i},{j}): {} vs {want}", got.get(i, j));
                    }
                }
            }
        }
    }
    for k in 0..10 {
        let seqs = [
            seq("a", &random_seq(&mut rng, PROTEIN, 2, 15)),
            seq("b", &random_seq(&mut rng, PROTEIN, 2, 15)),
        ];
        let set = compute_posteriors(&seqs, &params, 0.0).unwrap();
        let out = consistency_transform(&set, 0.0, 1).unwrap();
        ensure!(
            out.get(0, 1).unwrap().to_dense() == set.get(0, 1).unwrap().to_dense(),
            "two-sequence set {k} is not a fixed point"
        );
    }
    Ok(format!("max deviation {worst:.2e}; two-sequence sets unchanged"))
}

fn diagonal_library(n: usize, len: usize) -> ConstraintLibrary {
    let mut lib = ConstraintLibrary::new((0..n).map(|k| format!("s{k}")).collect(), vec![len; n]).unwrap();
    for a in 0..n {
        for b in a + 1..n {
            for i in 1..=len {
                lib.add(a, i, b, i, 1.0).unwrap();
            }
        }
    }
    lib
}

fn library_extension() -> Outcome {
    let mut lib = ConstraintLibrary::new(vec!["a".into(), "b".into(), "c".into()], vec![2, 2, 2]).unwrap();
    lib.add(0, 1, 1, 1, 1.0).unwrap();
    lib.add(0, 1, 2, 1, 1.0).unwrap();
    lib.add(2, 1, 1, 1, 1.0).unwrap();
    let w = extend_library(&lib).weight(0, 1, 1, 1);
    ensure!(w == 2.0, "hand-traced weight {w}, expected 2");

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..100 {
        let n = rng.gen_range(2..=5);
        let lengths: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=8)).collect();
        let mut lib = ConstraintLibrary::new((0..n).map(|s| format!("s{s}")).collect(), lengths.clone()).unwrap();
        for _ in 0..rng.gen_range(0..30) {
            let a = rng.gen_range(0..n);
            let b = (a + rng.gen_range(1..n)) % n;
            let (i, j) = (rng.gen_range(1..=lengths[a]), rng.gen_range(1..=lengths[b]));
            lib.add(a, i, b, j, rng.gen_range(1..=100) as f64).unwrap();
        }
        let ext = extend_library(&lib);
        for ((a, b, i, j), w) in lib.entries() {
            ensure!(ext.weight(a, i, b, j) >= w, "library {k}: ({a},{i},{b},{j}) dropped below {w}");
        }
    }

    let (n, len) = (24, 6);
    let (_, small) = extend_library_counted(&diagonal_library(n, len));
    let (_, large) = extend_library_counted(&diagonal_library(2 * n, len));
    let ratio = large as f64 / small as f64;
    ensure!(ratio <= 8.5, "visits grew {ratio:.3}x from N = {n} to {}", 2 * n);
    Ok(format!("hand trace 2, 100 libraries monotone, visit ratio {ratio:.3} (N {n} -> {})", 2 * n))
}

fn random_tree(n: usize, rng: &mut ChaCha8Rng) -> GuideTree {
    let mut open: Vec<usize> = (0..n).collect();
    let mut merges = Vec::new();
    let mut next = n;
    while open.len() > 1 {
        open.shuffle(rng);
        let (a, b) = (open.pop().unwrap(), open.pop().unwrap());
        merges.push((a, b));
        open.push(next);
        next += 1;
    }
    GuideTree::from_merges(n, &merges).unwrap()
}

fn refinement_monotone() -> Outcome {
    let m = SubstitutionMatrix::blosum62();
    let g = GapModel::default();
    let scorer = PspScorer(&m);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut improved = 0;
    for k in 0..100 {
        let n = rng.gen_range(2..=6);
        let seqs: Vec<Sequence> = (0..n)
            .map(|s| seq(&format!("s{s}"), &random_seq(&mut rng, PROTEIN, 4, 16)))
            .collect();
        let start = random_alignment(&seqs, 4, &mut rng).unwrap();
        let tree = random_tree(n, &mut rng);
        let al = Aligner {
            scorer: &scorer,
            gap: g,
            gap_scaling: true,
            weights: vec![1.0 / n as f64; n],
            alphabet: m.alphabet().clone(),
        };
        let (out, rep) = bipartition_refine(&start, &tree, &al, &m, &g, 8).unwrap();
        let (before, after) = (sp_score(&start, &m, &g).unwrap(), sp_score(&out, &m, &g).unwrap());
        ensure!(after >= before, "start {k}: SP fell from {before} to {after}");
        ensure!(rep.iterations <= 8, "start {k}: {} iterations", rep.iterations);
        out.check_sources(&seqs).map_err(|e| e.to_string())?;
        improved += usize::from(after > before);
    }
    Ok(format!("100 starts, {improved} improved, none worse"))
}

fn stochastic_behaviour() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for run in 0..20 {
        let seqs: Vec<Sequence> = (0..4)
            .map(|s| seq(&format!("s{s}"), &random_seq(&mut rng, PROTEIN, 5, 12)))
            .collect();
        let params = GaParams {
            population: 20,
            generations: 40,
            seed: run,
            ..Default::default()
        };
        let res = ga_run(&seqs, &params, &ga_fitness).unwrap();
        ensure!(
            res.trajectory.windows(2).all(|w| w[0].best <= w[1].best),
            "GA run {run}: best fitness decreased"
        );
    }

    let trials = 100_000;
    let mut mrng = ChaCha8Rng::seed_from_u64(10);
    let hits = (0..trials).filter(|_| metropolis_accept(2.5, 2.5, &mut mrng)).count();
    let freq = hits as f64 / trials as f64;
    let target = (-1.0f64).exp();
    ensure!((freq - target).abs() <= 0.01, "acceptance at dE = T: {freq} vs {target}");

    let m = SubstitutionMatrix::blosum62();
    let mut recovered = 0;
    for s in 0..20u64 {
        let mut prng = ChaCha8Rng::seed_from_u64(100 + s);
        let x = random_seq(&mut prng, PROTEIN, 4, 8);
        let mut y = x.clone();
        if s % 2 == 1 {
            let p = prng.gen_range(0..y.len());
            y[p] = PROTEIN[prng.gen_range(0..PROTEIN.len())];
        }
        let params = SaParams {
            w: 0.0,
            random_init: true,
            seed: s,
            ..Default::default()
        };
        let res = sa_run(&seq("x", &x), &seq("y", &y), &m, &params, None).unwrap();
        let (_, nw) = align_pair_global(&seq("x", &x), &seq("y", &y), &m, &params.gap()).unwrap();
        let got = pair_rows_score(res.alignment.row(0), res.alignment.row(1), &m, &params.gap()).unwrap();
        recovered += usize::from((got - nw).abs() < 1e-9);
    }
    ensure!(recovered >= 18, "SA recovered the optimum in {recovered}/20 seeds");
    Ok(format!("GA elitist on 20 runs; acceptance {freq:.4}; SA optimum {recovered}/20"))
}

/// Random unrooted binary tree on `n` leaves as an edge list with lengths.
/// Leaves are vertices 0..n.
fn additive_tree(n: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize, f64)> {
    let mut next = n;
    let centre = next;
    next += 1;
    let mut edges: Vec<(usize, usize, f64)> = (0..3).map(|l| (centre, l, rng.gen_range(0.1..1.0))).collect();
    for leaf in 3..n {
        let k = rng.gen_range(0..edges.len());
        let (a, b, w) = edges.swap_remove(k);
        let mid = next;
        next += 1;
        let split = rng.gen_range(0.1..0.9);
        edges.push((a, mid, w * split));
        edges.push((mid, b, w * (1.0 - split)));
        edges.push((mid, leaf, rng.gen_range(0.1..1.0)));
    }
    edges
}

fn leaves_beyond(edges: &[(usize, usize, f64)], n: usize, from: usize, start: usize) -> Vec<usize> {
    let mut seen = BTreeSet::from([from, start]);
    let mut stack = vec![start];
    let mut leaves = Vec::new();
    while let Some(v) = stack.pop() {
        if v < n {
            leaves.push(v);
        }
        for &(a, b, _) in edges {
            for (p, q) in [(a, b), (b, a)] {
                if p == v && seen.insert(q) {
                    stack.push(q);
                }
            }
        }
    }
    leaves.sort_unstable();
    leaves
}

fn path_length(edges: &[(usize, usize, f64)], from: usize, to: usize) -> f64 {
    let mut stack = vec![(from, usize::MAX, 0.0)];
    while let Some((v, parent, d)) = stack.pop() {
        if v == to {
            return d;
        }
        for &(a, b, w) in edges {
            for (p, q) in [(a, b), (b, a)] {
                if p == v && q != parent {
                    stack.push((q, v, d + w));
                }
            }
        }
    }
    unreachable!("tree is connected")
}

fn tree_construction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let ids = |n: usize| (0..n).map(|k| format!("t{k}")).collect::<Vec<_>>();
    for k in 0..50 {
        let n = rng.gen_range(4..=6);
        let edges = additive_tree(n, &mut rng);
        let d: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| path_length(&edges, i, j)).collect()).collect();
        let nj = neighbor_joining(&DistanceMatrix::new(ids(n), d).unwrap()).unwrap();
        let all: Vec<usize> = (0..n).collect();
        let mut want: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for &(a, b, w) in &edges {
            let side = leaves_beyond(&edges, n, a, b);
            let side = if side.contains(&0) {
                all.iter().copied().filter(|x| !side.contains(x)).collect()
            } else {
                side
            };
            want.insert(side, w);
        }
        let got: BTreeMap<Vec<usize>, f64> = nj.unrooted_splits().into_iter().filter(|(s, _)| !s.is_empty()).collect();
        let got: BTreeMap<Vec<usize>, f64> = got.into_iter().filter(|&(_, w)| w > 1e-12).collect();
        ensure!(
            got.keys().eq(want.keys()),
            "additive matrix {k}: splits {:?} vs {:?}",
            got.keys().collect::<Vec<_>>(),
            want.keys().collect::<Vec<_>>()
        );
        for (s, w) in &want {
            ensure!((got[s] - w).abs() <= 1e-9, "additive matrix {k}: branch {s:?} {} vs {w}", got[s]);
        }
    }
    for k in 0..50 {
        let n = rng.gen_range(4..=6);
        let shape = random_tree(n, &mut rng);
        let mut height = vec![0.0; shape.num_nodes()];
        for id in shape.postorder() {
            if let Some([a, b]) = shape.children(id) {
                height[id] = f64::max(height[a], height[b]) + rng.gen_range(0.1..1.0);
            }
        }
        let lca = |i: usize, j: usize| {
            (n..shape.num_nodes())
                .filter(|&v| {
                    let l = shape.leaves_under(v);
                    l.contains(&i) && l.contains(&j)
                })
                .map(|v| height[v])
                .fold(f64::INFINITY, f64::min)
        };
        let d: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { 2.0 * lca(i, j) }).collect())
            .collect();
        let up = upgma(&DistanceMatrix::new(ids(n), d).unwrap()).unwrap();
        ensure!(up.clusters() == shape.clusters(), "ultrametric matrix {k}: topology differs");
    }
    let t = GuideTree::from_merges(5, &[(0, 1), (2, 3), (5, 4), (6, 7)]).unwrap();
    let swapped = GuideTree::from_merges(5, &[(1, 0), (3, 2), (4, 5), (7, 6)]).unwrap();
    let changed = compare_trees(&t, &swapped).unwrap();
    ensure!(changed.is_empty(), "child swaps reported as changes: {changed:?}");
    Ok("50 additive, 50 ultrametric, child-swap comparison empty".into())
}

fn check_invariants(a: &Alignment, seqs: &[Sequence]) -> Result<(), String> {
    a.check_sources(seqs).map_err(|e| e.to_string())?;
    let w = a.width();
    ensure!(a.rows().iter().all(|r| r.len() == w), "ragged rows");
    ensure!(w >= seqs.iter().map(Sequence::len).max().unwrap_or(0), "narrower than the longest input");
    ensure!((0..w).all(|c| a.column(c).iter().any(|&x| x != b'-')), "all-gap column");
    Ok(())
}

fn end_to_end() -> Outcome {
    let m = SubstitutionMatrix::blosum62();
    let cfg = PipelineConfig::default();
    let cases = bundled();
    for case in &cases {
        for s in DEFAULT_STRATEGIES {
            if s.check_count(case.seqs.len()).is_err() {
                continue;
            }
            let out = run_strategy(&case.seqs, &PipelineConfig { strategy: s, ..cfg.clone() }, &m, None)
                .map_err(|e| format!("{} on {}: {e:#}", s.name(), case.id))?;
            check_invariants(&out.alignment, &case.seqs).map_err(|e| format!("{} on {}: {e}", s.name(), case.id))?;
            let q = q_score(&out.alignment, &case.reference).unwrap();
            ensure!((0.0..=1.0).contains(&q), "Q {q} out of range");
        }
    }
    let report = run_bench(&cases, &DEFAULT_STRATEGIES, &cfg, &m, false).map_err(|e| format!("{e:#}"))?;
    let means = mean_q(&report.records);
    let mut summary = Vec::new();
    for s in DEFAULT_STRATEGIES {
        let easy = means[&(s.name().to_string(), "easy".to_string())];
        ensure!(easy >= 0.9, "{} easy-tier mean Q {easy:.4}", s.name());
        for tier in Tier::ALL {
            let key = |name: &str| (name.to_string(), tier.name().to_string());
            let (q, base) = (means[&key(s.name())], means[&key(BASELINE)]);
            ensure!(q > base, "{} on {}: {q:.4} vs baseline {base:.4}", s.name(), tier.name());
        }
        summary.push(format!("{} {easy:.3}", s.name()));
    }
    let records: &[BenchRecord] = &report.records;
    Ok(format!("{} records; easy mean Q: {}", records.len(), summary.join(", ")))
}

fn hash_run(bin: &str, args: &[String], outputs: &[&Path]) -> String {
    for p in outputs {
        let _ = std::fs::remove_file(p);
        let _ = std::fs::remove_dir_all(p);
    }
    let out = Command::new(bin).args(args).output().unwrap();
    let mut h = Sha256::new();
    h.update(out.status.code().unwrap_or(-1).to_le_bytes());
    h.update(&out.stdout);
    h.update(&out.stderr);
    for p in outputs {
        let mut files = Vec::new();
        if p.is_dir() {
            for e in std::fs::read_dir(p).unwrap() {
                files.push(e.unwrap().path());
            }
        } else if p.exists() {
            files.push(p.to_path_buf());
        }
        files.sort();
        for f in files {
            h.update(f.file_name().unwrap().to_string_lossy().as_bytes());
            h.update(std::fs::read(&f).unwrap());
        }
    }
    hex::encode(h.finalize())
}

fn write_fasta(path: &Path, seqs: &[Sequence]) {
    let text: String = seqs
        .iter()
        .map(|s| format!(">{}\n{}\n", s.id(), String::from_utf8_lossy(s.residues())))
        .collect();
    std::fs::write(path, text).unwrap();
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_msakit");
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cases = bundled();
    let six = cases.iter().find(|c| c.id == "medium-n6-1").unwrap();
    let three = cases.iter().find(|c| c.id == "medium-n3-1").unwrap();
    write_fasta(&d.join("six.fa"), &six.seqs);
    write_fasta(&d.join("three.fa"), &three.seqs);
    write_fasta(&d.join("two.fa"), &three.seqs[..2]);
    std::fs::write(d.join("ref.fa"), msakit::seqcore::emit_alignment(&six.reference, msakit::seqcore::Format::AlignedFasta))
        .unwrap();
    write_corpus(&d.join("corpus"), &cases[..4]).unwrap();
    let p = |name: &str| d.join(name).to_string_lossy().into_owned();
    let (out, trace) = (d.join("out.txt"), d.join("trace"));
    let mut commands: Vec<(String, Vec<String>)> = Vec::new();
    for (s, input) in [
        ("exact3", "three.fa"),
        ("muscle", "six.fa"),
        ("tcoffee", "six.fa"),
        ("probcons", "six.fa"),
        ("ga", "six.fa"),
        ("sa", "two.fa"),
    ] {
        let args = ["align", &p(input), "--strategy", s, "--seed", "7", "--out", &p("out.txt"), "--trace", &p("trace")];
        commands.push((format!("align {s}"), args.iter().map(|x| x.to_string()).collect()));
    }
    let mut rest = vec![
        ("score", vec!["score", &p("ref.fa"), "--reference", &p("ref.fa")]),
        ("tree", vec!["tree", &p("six.fa"), "--strategy", "muscle"]),
        ("library", vec!["library", &p("six.fa")]),
        ("posterior", vec!["posterior", &p("six.fa"), "--seed", "7"]),
    ]
    .into_iter()
    .map(|(n, a)| (n.to_string(), a.into_iter().map(String::from).collect::<Vec<_>>()))
    .collect();
    commands.append(&mut rest);
    let corpus = p("corpus");
    commands.push((
        "bench".into(),
        ["bench", "--corpus", &corpus, "--seed", "7"].iter().map(|x| x.to_string()).collect(),
    ));
    for (name, args) in &commands {
        let hashes: Vec<String> = (0..3).map(|_| hash_run(bin, args, &[&out, &trace])).collect();
        ensure!(hashes.iter().all(|h| *h == hashes[0]), "{name}: outputs differ across runs");
        let status = Command::new(bin).args(args).status().unwrap();
        ensure!(status.success(), "{name}: exit {status}");
    }
    Ok(format!("{} commands, 3 identical runs each", commands.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 11] = [
        ("exact-DP oracle equivalence", exact_dp_oracle, 120),
        ("3-D recurrence completeness", recurrence_ablation, 60),
        ("pair-HMM numeric identities", hmm_identities, 60),
        ("MEA optimality", mea_optimality, 60),
        ("consistency transform", consistency_transform_check, 60),
        ("library extension", library_extension, 60),
        ("refinement monotonicity", refinement_monotone, 60),
        ("GA/SA behaviour", stochastic_behaviour, 180),
        ("tree construction", tree_construction, 60),
        ("end-to-end sanity", end_to_end, 300),
        ("determinism", determinism, 300),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        let result = match result {
            Ok(_) if took > Duration::from_secs(*limit) => Err(format!("took longer than {limit}s")),
            r => r,
        };
        match result {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail}; {:.2}s)", k + 1, took.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({why}; {:.2}s)", k + 1, took.as_secs_f64());
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
