//! Dispatch from a strategy name to a pipeline.

use anyhow::Result;
use msakit::exactdp::{align_three_with, ThreeWayOptions};
use msakit::objective::{ga_fitness, ColumnScorer};
use msakit::progressive::{muscle_pipeline, probcons_pipeline, tcoffee_pipeline, PipelineConfig, Strategy};
use msakit::stochastic::{ga_run, sa_run, ContactTerm, GaParams, SaParams};
use msakit::{Alignment, Sequence, SubstitutionMatrix};

/// An alignment with a one-line summary and named trace files.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub alignment: Alignment,
    pub status: String,
    pub traces: Vec<(String, String)>,
}

fn ga_params(cfg: &PipelineConfig) -> GaParams {
    GaParams {
        seed: cfg.seed,
        ..cfg.ga.clone()
    }
}

fn sa_params(cfg: &PipelineConfig) -> SaParams {
    SaParams {
        seed: cfg.seed,
        ..cfg.sa.clone()
    }
}

/// Runs `cfg.strategy` on `seqs`. Rows come back in input order.
pub fn run_strategy(
    seqs: &[Sequence],
    cfg: &PipelineConfig,
    m: &SubstitutionMatrix,
    contacts: Option<&ContactTerm>,
) -> Result<RunOutput> {
    cfg.validate()?;
    let strategy = cfg.strategy;
    strategy.check_count(seqs.len())?;
    let mut traces = Vec::new();
    let (alignment, status) = match strategy {
        Strategy::Exact3 => {
            let scorer = ColumnScorer::new(m, cfg.exact3.gap);
            let opts = ThreeWayOptions {
                budget_cells: cfg.exact3.budget_cells.into(),
                ..Default::default()
            };
            let (a, score) = align_three_with(&seqs[0], &seqs[1], &seqs[2], &scorer, &opts)?;
            (a, format!("score\t{score}"))
        }
        Strategy::Muscle | Strategy::Tcoffee | Strategy::Probcons => {
            let out = match strategy {
                Strategy::Muscle => muscle_pipeline(seqs, cfg, m)?,
                Strategy::Tcoffee => tcoffee_pipeline(seqs, cfg, m)?,
                _ => probcons_pipeline(seqs, cfg, m)?,
            };
            let names: Vec<String> = seqs.iter().map(|s| s.id().to_string()).collect();
            traces.push(("tree.nwk".into(), out.tree.to_newick(&names) + "\n"));
            if let Some(rep) = &out.refine {
                traces.push(("refine.tsv".into(), rep.to_tsv()));
            }
            if strategy == Strategy::Muscle {
                let mut text = String::from("comparison\tchanged\n");
                for (k, c) in out.stage2_changes.iter().enumerate() {
                    text.push_str(&format!("{}\t{c}\n", k + 1));
                }
                traces.push(("stage2.tsv".into(), text));
            }
            let last = out.refine.as_ref().map(|r| *r.trajectory.last().unwrap_or(&r.initial));
            let status = match last {
                Some(s) => format!("objective\t{s}"),
                None => "objective\t-".into(),
            };
            (out.alignment, status)
        }
        Strategy::Ga => {
            let res = ga_run(seqs, &ga_params(cfg), &ga_fitness)?;
            traces.push(("ga.tsv".into(), res.to_tsv()));
            let status = format!("fitness\t{}", res.best.fitness);
            (res.best.candidate, status)
        }
        Strategy::Sa => {
            let res = sa_run(&seqs[0], &seqs[1], m, &sa_params(cfg), contacts)?;
            traces.push(("sa.tsv".into(), res.to_tsv()));
            let status = format!("energy\t{}", res.energy);
            (res.alignment, status)
        }
    };
    alignment.check_sources(seqs)?;
    Ok(RunOutput {
        alignment,
        status: format!("{}\t{status}", strategy.name()),
        traces,
    })
}
