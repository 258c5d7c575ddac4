//! Synthetic benchmark cases: mutated copies of a random root sequence with
//! their generating alignment as the reference.

use std::collections::BTreeSet;
use std::path::Path;

use anyhow::{bail, Context, Result};
use msakit::guidetree::fractional_identity;
use msakit::seqcore::{emit_alignment, parse_aligned_fasta, parse_fasta, Format};
use msakit::{Alignment, Alphabet, Sequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RESIDUES: &[u8] = b"ACDEFGHIKLMNPQRSTVWY";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Tier {
    Easy,
    Medium,
    Hard,
}

impl Tier {
    pub const ALL: [Tier; 3] = [Tier::Easy, Tier::Medium, Tier::Hard];

    pub fn name(self) -> &'static str {
        match self {
            Tier::Easy => "easy",
            Tier::Medium => "medium",
            Tier::Hard => "hard",
        }
    }

    /// Tier of a case id such as `easy-n3-1`.
    pub fn of_case(id: &str) -> Option<Tier> {
        let prefix = id.split('-').next()?;
        Self::ALL.into_iter().find(|t| t.name() == prefix)
    }

    /// Mean pairwise identity of the reference must fall in `[lo, hi)`.
    fn identity_range(self) -> (f64, f64) {
        match self {
            Tier::Easy => (0.9, 1.01),
            Tier::Medium => (0.5, 0.9),
            Tier::Hard => (0.0, 0.5),
        }
    }

    /// Per-site substitution, deletion and insertion rates.
    fn rates(self) -> (f64, f64, f64) {
        match self {
            Tier::Easy => (0.03, 0.004, 0.004),
            Tier::Medium => (0.18, 0.015, 0.015),
            Tier::Hard => (0.42, 0.025, 0.025),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Case {
    pub id: String,
    pub seqs: Vec<Sequence>,
    pub reference: Alignment,
}

impl Case {
    pub fn tier(&self) -> Option<Tier> {
        Tier::of_case(&self.id)
    }
}

/// Residue with its column key. Keys order columns lexicographically; an
/// insertion after key `k` gets `k ++ [counter]`.
type Site = (Vec<u32>, u8);

fn evolve(root: &[Site], tier: Tier, next: &mut u32, rng: &mut ChaCha8Rng) -> Vec<Site> {
    let (sub, del, ins) = tier.rates();
    let mut out = Vec::with_capacity(root.len() + 8);
    let insert_after = |anchor: &[u32], out: &mut Vec<Site>, rng: &mut ChaCha8Rng, next: &mut u32| {
        if rng.gen_bool(ins) {
            for _ in 0..rng.gen_range(1..=3) {
                let mut key = anchor.to_vec();
                key.push(*next);
                *next += 1;
                out.push((key, RESIDUES[rng.gen_range(0..RESIDUES.len())]));
            }
        }
    };
    insert_after(&[0], &mut out, rng, next);
    let mut skip = 0;
    for (key, res) in root {
        if skip > 0 {
            skip -= 1;
        } else if rng.gen_bool(del) {
            skip = rng.gen_range(0..3);
        } else {
            let mut r = *res;
            if rng.gen_bool(sub) {
                while r == *res {
                    r = RESIDUES[rng.gen_range(0..RESIDUES.len())];
                }
            }
            out.push((key.clone(), r));
        }
        insert_after(key, &mut out, rng, next);
    }
    out
}

fn mean_identity(a: &Alignment) -> f64 {
    let n = a.num_rows();
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            total += fractional_identity(a.row(i), a.row(j));
        }
    }
    total / (n * (n - 1) / 2) as f64
}

fn attempt(tier: Tier, n: usize, len: usize, rng: &mut ChaCha8Rng) -> Result<Alignment> {
    let root: Vec<Site> = (0..len)
        .map(|k| (vec![k as u32 + 1], RESIDUES[rng.gen_range(0..RESIDUES.len())]))
        .collect();
    let mut next = 0;
    let leaves: Vec<Vec<Site>> = (0..n).map(|_| evolve(&root, tier, &mut next, rng)).collect();
    let keys: BTreeSet<&Vec<u32>> = leaves.iter().flatten().map(|(k, _)| k).collect();
    let rows = leaves
        .iter()
        .map(|leaf| {
            let mut it = leaf.iter().peekable();
            keys.iter()
                .map(|k| match it.peek() {
                    Some((key, r)) if key == *k => {
                        it.next();
                        *r
                    }
                    _ => b'-',
                })
                .collect()
        })
        .collect();
    Ok(Alignment::new((1..=n).map(|k| format!("seq{k}")).collect(), rows)?)
}

/// One case whose reference identity lies in the tier's band; retries with
/// the same generator until it does.
pub fn generate(id: &str, tier: Tier, n: usize, len: usize, seed: u64) -> Result<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = tier.identity_range();
    for _ in 0..1000 {
        let reference = attempt(tier, n, len, &mut rng)?;
        if reference.sequences().iter().any(Sequence::is_empty) {
            continue;
        }
        let id_mean = mean_identity(&reference);
        if (lo..hi).contains(&id_mean) {
            return Ok(Case {
                id: id.to_string(),
                seqs: reference.sequences(),
                reference,
            });
        }
    }
    bail!("could not generate a {} case", tier.name())
}

/// The corpus shipped under `corpus/`: two replicates of each tier at
/// N = 3 and N = 6, roughly 40 residues long.
pub fn bundled() -> Vec<Case> {
    let mut cases = Vec::new();
    for (t, tier) in Tier::ALL.into_iter().enumerate() {
        for n in [3, 6] {
            for rep in 1..=2 {
                let id = format!("{}-n{n}-{rep}", tier.name());
                let seed = 1000 * t as u64 + 10 * n as u64 + rep;
                cases.push(generate(&id, tier, n, 40, seed).expect("bundled corpus generates"));
            }
        }
    }
    cases
}

fn fasta(seqs: &[Sequence]) -> String {
    seqs.iter()
        .map(|s| format!(">{}\n{}\n", s.id(), String::from_utf8_lossy(s.residues())))
        .collect()
}

/// Writes `<id>.fa` and `<id>.ref.fa` for every case.
pub fn write_corpus(dir: &Path, cases: &[Case]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for c in cases {
        std::fs::write(dir.join(format!("{}.fa", c.id)), fasta(&c.seqs))?;
        std::fs::write(
            dir.join(format!("{}.ref.fa", c.id)),
            emit_alignment(&c.reference, Format::AlignedFasta),
        )?;
    }
    Ok(())
}

/// Reads every `<id>.fa` with its `<id>.ref.fa`, sorted by id.
pub fn read_corpus(dir: &Path, alphabet: &Alphabet) -> Result<Vec<Case>> {
    let mut ids: Vec<String> = std::fs::read_dir(dir)
        .with_context(|| format!("reading corpus {}", dir.display()))?
        .filter_map(|e| e.ok())
        .filter_map(|e| e.file_name().into_string().ok())
        .filter(|name| !name.ends_with(".ref.fa"))
        .filter_map(|name| name.strip_suffix(".fa").map(str::to_string))
        .collect();
    ids.sort();
    if ids.is_empty() {
        bail!("corpus {} has no cases", dir.display());
    }
    ids.into_iter()
        .map(|id| {
            let input = dir.join(format!("{id}.fa"));
            let refp = dir.join(format!("{id}.ref.fa"));
            let seqs = parse_fasta(&std::fs::read_to_string(&input)?, alphabet)
                .with_context(|| format!("parsing {}", input.display()))?;
            let text = std::fs::read_to_string(&refp).with_context(|| format!("case `{id}` has no reference"))?;
            let reference =
                parse_aligned_fasta(&text, alphabet).with_context(|| format!("parsing {}", refp.display()))?;
            reference.check_sources(&seqs)?;
            Ok(Case { id, seqs, reference })
        })
        .collect()
}
