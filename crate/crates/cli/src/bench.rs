//! Benchmark harness: every requested strategy on every corpus case, scored
//! by Q against the case's reference.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use msakit::objective::q_score;
use msakit::progressive::{PipelineConfig, Strategy};
use msakit::stochastic::random_alignment;
use msakit::SubstitutionMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::digest;
use crate::corpus::{Case, Tier};
use crate::run::run_strategy;

/// Label of the random-gap baseline rows.
pub const BASELINE: &str = "random";

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub case: String,
    pub strategy: String,
    pub q: f64,
    /// Milliseconds; only filled when timing was requested.
    pub wall_ms: Option<f64>,
    pub digest: String,
}

#[derive(Clone, Debug, Default)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    /// `(case, strategy)` pairs skipped because the strategy does not accept
    /// that many sequences.
    pub skipped: Vec<(String, String)>,
}

/// The default strategy list: everything that aligns more than two sequences.
pub const DEFAULT_STRATEGIES: [Strategy; 5] =
    [Strategy::Exact3, Strategy::Muscle, Strategy::Tcoffee, Strategy::Probcons, Strategy::Ga];

fn baseline(case: &Case, cfg: &PipelineConfig, index: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let a = random_alignment(&case.seqs, cfg.ga.slack, &mut rng)?;
    Ok(q_score(&a, &case.reference)?)
}

/// Runs the jobs in parallel and returns records in case order, strategies
/// in the order given, the random baseline last.
pub fn run_bench(
    cases: &[Case],
    strategies: &[Strategy],
    cfg: &PipelineConfig,
    m: &SubstitutionMatrix,
    timing: bool,
) -> Result<BenchReport> {
    if cases.is_empty() {
        bail!("empty corpus");
    }
    let mut jobs = Vec::new();
    let mut report = BenchReport::default();
    for (ci, case) in cases.iter().enumerate() {
        for &s in strategies {
            if s.check_count(case.seqs.len()).is_ok() {
                jobs.push((ci, Some(s)));
            } else {
                report.skipped.push((case.id.clone(), s.name().to_string()));
            }
        }
        jobs.push((ci, None));
    }
    let base_digest = digest(cfg);
    report.records = jobs
        .par_iter()
        .map(|&(ci, s)| {
            let case = &cases[ci];
            let start = Instant::now();
            let (name, q, dg) = match s {
                Some(s) => {
                    let scfg = PipelineConfig { strategy: s, ..cfg.clone() };
                    let out = run_strategy(&case.seqs, &scfg, m, None)
                        .with_context(|| format!("{} on {}", s.name(), case.id))?;
                    (s.name().to_string(), q_score(&out.alignment, &case.reference)?, digest(&scfg))
                }
                None => (BASELINE.to_string(), baseline(case, cfg, ci)?, base_digest.clone()),
            };
            Ok(BenchRecord {
                case: case.id.clone(),
                strategy: name,
                q,
                wall_ms: timing.then(|| start.elapsed().as_secs_f64() * 1e3),
                digest: dg,
            })
        })
        .collect::<Result<_>>()?;
    Ok(report)
}

/// Mean Q per `(strategy, tier)`; the tier `all` covers every case.
pub fn mean_q(records: &[BenchRecord]) -> BTreeMap<(String, String), f64> {
    let mut acc: BTreeMap<(String, String), (f64, usize)> = BTreeMap::new();
    for r in records {
        let mut tiers = vec!["all".to_string()];
        if let Some(t) = Tier::of_case(&r.case) {
            tiers.push(t.name().to_string());
        }
        for t in tiers {
            let e = acc.entry((r.strategy.clone(), t)).or_default();
            e.0 += r.q;
            e.1 += 1;
        }
    }
    acc.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect()
}

pub fn render(report: &BenchReport) -> String {
    let mut out = String::from("case\tstrategy\tq\twall_ms\tconfig\n");
    for r in &report.records {
        let ms = r.wall_ms.map_or("-".to_string(), |t| format!("{t:.1}"));
        let _ = writeln!(out, "{}\t{}\t{:.6}\t{ms}\t{}", r.case, r.strategy, r.q, r.digest);
    }
    for (case, s) in &report.skipped {
        let _ = writeln!(out, "# skipped\t{case}\t{s}");
    }
    out.push_str("\nstrategy\ttier\tmean_q\n");
    for ((s, t), q) in mean_q(&report.records) {
        let _ = writeln!(out, "{s}\t{t}\t{q:.6}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use msakit::Sequence;

    fn identical_case() -> Case {
        let seqs: Vec<Sequence> = (0..3).map(|k| Sequence::new(format!("s{k}"), "MKVLATWQ").unwrap()).collect();
        let reference = msakit::Alignment::new(
            seqs.iter().map(|s| s.id().to_string()).collect(),
            seqs.iter().map(|s| s.residues().to_vec()).collect(),
        )
        .unwrap();
        Case {
            id: "easy-same".into(),
            seqs,
            reference,
        }
    }

    #[test]
    fn identical_sequences_score_one_everywhere() {
        let m = SubstitutionMatrix::blosum62();
        let cfg = PipelineConfig::default();
        let rep = run_bench(&[identical_case()], &DEFAULT_STRATEGIES, &cfg, &m, false).unwrap();
        assert_eq!(rep.records.len(), 6);
        for r in rep.records.iter().filter(|r| r.strategy != BASELINE) {
            assert_eq!(r.q, 1.0, "{}", r.strategy);
            assert!(r.wall_ms.is_none());
        }
    }

    #[test]
    fn means_lie_within_case_range() {
        let rec = |case: &str, q| BenchRecord {
            case: case.into(),
            strategy: "ga".into(),
            q,
            wall_ms: None,
            digest: String::new(),
        };
        let rs = [rec("easy-a", 0.5), rec("easy-b", 1.0), rec("hard-a", 0.2)];
        let means = mean_q(&rs);
        assert_eq!(means[&("ga".into(), "easy".into())], 0.75);
        let all = means[&("ga".into(), "all".into())];
        assert!(all >= 0.2 && all <= 1.0);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let m = SubstitutionMatrix::blosum62();
        assert!(run_bench(&[], &DEFAULT_STRATEGIES, &PipelineConfig::default(), &m, false).is_err());
    }

    #[test]
    fn inapplicable_strategies_are_listed() {
        let m = SubstitutionMatrix::blosum62();
        let mut case = identical_case();
        case.seqs.push(Sequence::new("s3", "MKVLATWQ").unwrap());
        case.reference = msakit::Alignment::new(
            case.seqs.iter().map(|s| s.id().to_string()).collect(),
            case.seqs.iter().map(|s| s.residues().to_vec()).collect(),
        )
        .unwrap();
        let rep = run_bench(&[case], &[Strategy::Exact3, Strategy::Sa], &PipelineConfig::default(), &m, false).unwrap();
        assert_eq!(rep.skipped.len(), 2);
        assert_eq!(rep.records.len(), 1);
    }
}
