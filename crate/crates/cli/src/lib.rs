//! Command-line front end: alignment, scoring, dumps and the benchmark.

pub mod bench;
pub mod config;
pub mod corpus;
pub mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use msakit::objective::{q_score, sp_score};
use msakit::progressive::{
    muscle_pipeline, probcons_pipeline, probcons_posteriors, tcoffee_library, tcoffee_pipeline, PipelineConfig,
    Strategy,
};
use msakit::seqcore::{emit_alignment, parse_alignment, parse_fasta, Format};
use msakit::stochastic::{parse_contacts, CaoTable, ContactTerm};
use msakit::{Sequence, SubstitutionMatrix};

use crate::config::{load_config, Overrides};

#[derive(Parser, Debug)]
#[command(name = "msakit", version, about = "Multiple sequence alignment toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Clone, Debug, Default)]
pub struct Common {
    /// exact3, muscle (progressive-muscle), tcoffee, probcons, ga or sa
    #[arg(long)]
    pub strategy: Option<String>,
    /// BLOSUM62, NUC or a path to a whitespace table
    #[arg(long)]
    pub matrix: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub gap_open: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gap_extend: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// TOML config file; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// afasta or clustal
    #[arg(long, default_value = "afasta")]
    pub format: String,
    /// Directory for trajectory and report files
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Align the sequences of a FASTA file
    Align {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Contact substitution table for sa
        #[arg(long, requires = "contacts")]
        cao: Option<PathBuf>,
        /// Contact maps ("x i j" / "y i j" lines) for sa
        #[arg(long, requires = "cao")]
        contacts: Option<PathBuf>,
    },
    /// Print the SP score of an alignment and its Q score against a reference
    Score {
        alignment: PathBuf,
        #[arg(long)]
        reference: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run strategies over a corpus of cases with reference alignments
    Bench {
        /// Directory of <case>.fa / <case>.ref.fa pairs; the bundled corpus if omitted
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Comma-separated strategies; exact3, muscle, tcoffee, probcons, ga if omitted
        #[arg(long, value_delimiter = ',')]
        strategies: Vec<String>,
        /// Report wall time per record (makes output run-dependent)
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Write the bundled synthetic corpus to a directory
    Corpus { dir: PathBuf },
    /// Print the guide tree of a progressive strategy in Newick form
    Tree {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Print the extended T-Coffee constraint library
    Library {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Print the transformed posterior matrices as sparse triples
    Posterior {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

impl Common {
    fn overrides(&self) -> Result<Overrides> {
        Ok(Overrides {
            strategy: self.strategy.as_deref().map(Strategy::parse).transpose()?,
            matrix: self.matrix.clone(),
            gap_open: self.gap_open,
            gap_extend: self.gap_extend,
            seed: self.seed,
        })
    }

    fn load(&self) -> Result<(PipelineConfig, SubstitutionMatrix)> {
        let cfg = load_config(self.config.as_deref(), &self.overrides()?)?;
        let m = SubstitutionMatrix::load(&cfg.matrix).with_context(|| format!("loading matrix `{}`", cfg.matrix))?;
        Ok((cfg, m))
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_sequences(path: &Path, m: &SubstitutionMatrix) -> Result<Vec<Sequence>> {
    parse_fasta(&read(path)?, m.alphabet()).with_context(|| format!("parsing {}", path.display()))
}

fn write_traces(dir: &Path, traces: &[(String, String)]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, text) in traces {
        std::fs::write(dir.join(name), text)?;
    }
    Ok(())
}

fn cmd_align(input: &Path, common: &Common, cao: Option<&Path>, contacts: Option<&Path>) -> Result<()> {
    let (cfg, m) = common.load()?;
    let format: Format = common.format.parse()?;
    let seqs = read_sequences(input, &m)?;
    let table;
    let term = match (cao, contacts) {
        (Some(c), Some(p)) => {
            if cfg.strategy != Strategy::Sa {
                bail!("contact maps apply to the sa strategy only");
            }
            table = CaoTable::parse(&read(c)?)?;
            let (x, y) = parse_contacts(&read(p)?)?;
            Some(ContactTerm { scorer: &table, x, y })
        }
        _ => None,
    };
    let out = run::run_strategy(&seqs, &cfg, &m, term.as_ref())?;
    if let Some(dir) = &common.trace {
        let mut traces = out.traces.clone();
        traces.push(("config.toml".into(), toml::to_string(&cfg)?));
        write_traces(dir, &traces)?;
    }
    common.emit(&emit_alignment(&out.alignment, format))?;
    eprintln!("{}", out.status);
    Ok(())
}

fn cmd_score(alignment: &Path, reference: Option<&Path>, common: &Common) -> Result<()> {
    let (cfg, m) = common.load()?;
    let a = parse_alignment(&read(alignment)?, m.alphabet()).with_context(|| format!("parsing {}", alignment.display()))?;
    let mut text = format!("rows\t{}\nwidth\t{}\n", a.num_rows(), a.width());
    if a.num_rows() >= 2 {
        text.push_str(&format!("sp\t{}\n", sp_score(&a, &m, &cfg.gap)?));
    }
    if let Some(r) = reference {
        let r = parse_alignment(&read(r)?, m.alphabet()).with_context(|| format!("parsing {}", r.display()))?;
        text.push_str(&format!("q\t{}\n", q_score(&a, &r)?));
    }
    common.emit(&text)
}

fn cmd_bench(corpus: Option<&Path>, strategies: &[String], timing: bool, common: &Common) -> Result<()> {
    let (cfg, m) = common.load()?;
    let cases = match corpus {
        Some(dir) => corpus::read_corpus(dir, m.alphabet())?,
        None => corpus::bundled(),
    };
    let list: Vec<Strategy> = if strategies.is_empty() {
        bench::DEFAULT_STRATEGIES.to_vec()
    } else {
        strategies.iter().map(|s| Strategy::parse(s)).collect::<msakit::Result<_>>()?
    };
    let report = bench::run_bench(&cases, &list, &cfg, &m, timing)?;
    common.emit(&bench::render(&report))
}

fn cmd_tree(input: &Path, common: &Common) -> Result<()> {
    let (cfg, m) = common.load()?;
    let seqs = read_sequences(input, &m)?;
    cfg.strategy.check_count(seqs.len())?;
    let out = match cfg.strategy {
        Strategy::Muscle => muscle_pipeline(&seqs, &cfg, &m)?,
        Strategy::Tcoffee => tcoffee_pipeline(&seqs, &cfg, &m)?,
        Strategy::Probcons => probcons_pipeline(&seqs, &cfg, &m)?,
        s => bail!("strategy {} uses no guide tree", s.name()),
    };
    let names: Vec<String> = seqs.iter().map(|s| s.id().to_string()).collect();
    common.emit(&(out.tree.to_newick(&names) + "\n"))
}

fn cmd_library(input: &Path, common: &Common) -> Result<()> {
    let (cfg, m) = common.load()?;
    let seqs = read_sequences(input, &m)?;
    Strategy::Tcoffee.check_count(seqs.len())?;
    common.emit(&tcoffee_library(&seqs, &cfg, &m)?.to_text())
}

fn cmd_posterior(input: &Path, common: &Common) -> Result<()> {
    let (cfg, m) = common.load()?;
    let seqs = read_sequences(input, &m)?;
    Strategy::Probcons.check_count(seqs.len())?;
    let (set, _) = probcons_posteriors(&seqs, &cfg, &m)?;
    let mut text = String::new();
    for i in 0..seqs.len() {
        for j in i + 1..seqs.len() {
            text.push_str(&format!("pair {} {}\n", seqs[i].id(), seqs[j].id()));
            text.push_str(&set.get(i, j)?.to_text());
        }
    }
    common.emit(&text)
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Align {
            input,
            common,
            cao,
            contacts,
        } => cmd_align(input, common, cao.as_deref(), contacts.as_deref()),
        Command::Score {
            alignment,
            reference,
            common,
        } => cmd_score(alignment, reference.as_deref(), common),
        Command::Bench {
            corpus,
            strategies,
            timing,
            common,
        } => cmd_bench(corpus.as_deref(), strategies, *timing, common),
        Command::Corpus { dir } => corpus::write_corpus(dir, &corpus::bundled()),
        Command::Tree { input, common } => cmd_tree(input, common),
        Command::Library { input, common } => cmd_library(input, common),
        Command::Posterior { input, common } => cmd_posterior(input, common),
    }
}

/// 3 for resource limits, 2 for everything else.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    let budget = err
        .chain()
        .any(|e| matches!(e.downcast_ref::<msakit::Error>(), Some(msakit::Error::MemoryBudget { .. })));
    if budget {
        3
    } else {
        2
    }
}

pub fn main_with(cli: Cli) -> ExitCode {
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_gap_flags_parse() {
        let cli = Cli::try_parse_from(["msakit", "align", "in.fa", "--gap-open", "-8", "--gap-extend", "-0.5"]).unwrap();
        let Command::Align { common, .. } = cli.command else {
            panic!("wrong command")
        };
        assert_eq!((common.gap_open, common.gap_extend), (Some(-8.0), Some(-0.5)));
    }

    #[test]
    fn budget_errors_map_to_three() {
        let e = anyhow::Error::new(msakit::Error::MemoryBudget { cells: 10, limit: 1 }).context("aligning");
        assert_eq!(exit_code(&e), 3);
        assert_eq!(exit_code(&anyhow::anyhow!("bad input")), 2);
    }

    #[test]
    fn cao_requires_contacts() {
        assert!(Cli::try_parse_from(["msakit", "align", "in.fa", "--cao", "t.txt"]).is_err());
    }
}
