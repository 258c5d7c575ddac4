use std::fmt::Write as _;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::seqcore::{Alignment, Sequence, GAP};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaParams {
    pub population: usize,
    pub generations: usize,
    pub crossover: f64,
    pub mutation: f64,
    /// Best individuals carried over unchanged each generation.
    pub elitism: usize,
    /// Extra columns allowed beyond the longest sequence in random individuals.
    pub slack: usize,
    /// Taken from the pipeline seed.
    #[serde(skip)]
    pub seed: u64,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            population: 50,
            generations: 200,
            crossover: 0.8,
            mutation: 0.5,
            elitism: 2,
            slack: 2,
            seed: 0,
        }
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::InvalidParameter("population must be at least 2".into()));
        }
        if self.elitism == 0 || self.elitism >= self.population {
            return Err(Error::InvalidParameter("elitism must be in 1..population".into()));
        }
        for (name, p) in [("crossover", self.crossover), ("mutation", self.mutation)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!("{name} probability {p} not in [0, 1]")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub candidate: Alignment,
    pub fitness: f64,
}

/// A fitness function; higher is better.
pub type Objective<'a> = &'a (dyn Fn(&Alignment) -> f64 + Sync);

/// Pads one sequence to `width` with gaps at uniformly drawn positions.
fn scatter_gaps(seq: &[u8], width: usize, rng: &mut impl Rng) -> Vec<u8> {
    let mut row = vec![0u8; width];
    let mut gap = vec![false; width];
    for k in rand::seq::index::sample(rng, width, width - seq.len()) {
        gap[k] = true;
    }
    let mut it = seq.iter();
    for (c, slot) in row.iter_mut().enumerate() {
        *slot = if gap[c] { GAP } else { *it.next().expect("enough residues") };
    }
    row
}

/// A random alignment of `seqs` with width in `[max length, max length + slack]`.
pub fn random_alignment(seqs: &[Sequence], slack: usize, rng: &mut impl Rng) -> Result<Alignment> {
    let longest = seqs.iter().map(Sequence::len).max().ok_or(Error::EmptySequence)?;
    let width = longest + rng.gen_range(0..=slack);
    let rows = seqs.iter().map(|s| scatter_gaps(s.residues(), width, rng)).collect();
    Alignment::new(seqs.iter().map(|s| s.id().to_string()).collect(), rows)
}

pub fn ga_init(seqs: &[Sequence], params: &GaParams, objective: Objective, rng: &mut impl Rng) -> Result<Vec<Individual>> {
    params.validate()?;
    (0..params.population)
        .map(|_| {
            let candidate = random_alignment(seqs, params.slack, rng)?;
            Ok(Individual {
                fitness: objective(&candidate),
                candidate,
            })
        })
        .collect()
}

/// Roulette-wheel choice of two parents (with replacement). Negative
/// fitness is shifted up to zero; all-zero fitness falls back to uniform.
pub fn ga_select(pop: &[Individual], rng: &mut impl Rng) -> (usize, usize) {
    let low = pop.iter().map(|i| i.fitness).fold(f64::INFINITY, f64::min).min(0.0);
    let weights: Vec<f64> = pop.iter().map(|i| i.fitness - low).collect();
    match WeightedIndex::new(&weights) {
        Ok(dist) => (dist.sample(rng), dist.sample(rng)),
        Err(_) => (rng.gen_range(0..pop.len()), rng.gen_range(0..pop.len())),
    }
}

/// Columns where both parents are gap-free and every row has used the same
/// number of residues in both, so swapping suffixes keeps rows intact.
pub fn crossover_points(a: &Alignment, b: &Alignment) -> Vec<usize> {
    let width = a.width().min(b.width());
    let mut used_a = vec![0usize; a.num_rows()];
    let mut used_b = vec![0usize; b.num_rows()];
    let mut points = Vec::new();
    for c in 0..width {
        let clean = a.rows().iter().all(|r| r[c] != GAP) && b.rows().iter().all(|r| r[c] != GAP);
        if c > 0 && clean && used_a == used_b {
            points.push(c);
        }
        for (k, n) in used_a.iter_mut().enumerate() {
            *n += (a.row(k)[c] != GAP) as usize;
        }
        for (k, n) in used_b.iter_mut().enumerate() {
            *n += (b.row(k)[c] != GAP) as usize;
        }
    }
    points
}

/// One-point crossover at a random consistent gap-free column; clones when
/// there is none.
pub fn ga_crossover(a: &Alignment, b: &Alignment, rng: &mut impl Rng) -> Result<(Alignment, Alignment)> {
    let points = crossover_points(a, b);
    let Some(&c) = points.choose(rng) else {
        return Ok((a.clone(), b.clone()));
    };
    let splice = |x: &Alignment, y: &Alignment| {
        let rows = x.rows().iter().zip(y.rows()).map(|(p, q)| [&p[..c], &q[c..]].concat()).collect();
        Alignment::new(x.ids().to_vec(), rows)
    };
    Ok((splice(a, b)?, splice(b, a)?))
}

/// Swaps the residue at `pos` with an adjacent gap, picking a side at random
/// when both are gaps. Returns whether the row changed.
pub fn shift_residue(row: &mut [u8], pos: usize, rng: &mut impl Rng) -> bool {
    let left = pos > 0 && row[pos - 1] == GAP;
    let right = pos + 1 < row.len() && row[pos + 1] == GAP;
    let target = match (left, right) {
        (false, false) => return false,
        (true, false) => pos - 1,
        (false, true) => pos + 1,
        (true, true) => {
            if rng.gen_bool(0.5) {
                pos - 1
            } else {
                pos + 1
            }
        }
    };
    row.swap(pos, target);
    true
}

/// 2-opt mutation of a random residue in a random row.
pub fn ga_mutate(a: &Alignment, rng: &mut impl Rng) -> Result<Alignment> {
    let k = rng.gen_range(0..a.num_rows());
    let residues: Vec<usize> = (0..a.width()).filter(|&c| a.row(k)[c] != GAP).collect();
    let pos = residues[rng.gen_range(0..residues.len())];
    let (ids, mut rows) = a.clone().into_parts();
    if !shift_residue(&mut rows[k], pos, rng) {
        return Ok(a.clone());
    }
    Alignment::new(ids, rows)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenerationStats {
    pub best: f64,
    pub mean: f64,
}

#[derive(Clone, Debug)]
pub struct GaResult {
    pub best: Individual,
    /// Best-ever and population mean fitness; entry 0 is the initial population.
    pub trajectory: Vec<GenerationStats>,
}

impl GaResult {
    /// `generation<TAB>best<TAB>mean` lines.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("generation\tbest\tmean\n");
        for (g, s) in self.trajectory.iter().enumerate() {
            let _ = writeln!(out, "{g}\t{}\t{}", s.best, s.mean);
        }
        out
    }
}

fn stats(pop: &[Individual], best: f64) -> GenerationStats {
    GenerationStats {
        best,
        mean: pop.iter().map(|i| i.fitness).sum::<f64>() / pop.len() as f64,
    }
}

fn rank(pop: &mut [Individual]) {
    pop.sort_by(|a, b| b.fitness.total_cmp(&a.fitness));
}

/// Select, recombine, mutate and replace the worst individuals, keeping the
/// `elitism` best each generation. Returns the best individual ever seen.
pub fn ga_run(seqs: &[Sequence], params: &GaParams, objective: Objective) -> Result<GaResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut pop = ga_init(seqs, params, objective, &mut rng)?;
    rank(&mut pop);
    let mut best = pop[0].clone();
    let mut trajectory = vec![stats(&pop, best.fitness)];
    let offspring = params.population - params.elitism;
    for _ in 0..params.generations {
        let mut children = Vec::with_capacity(offspring + 1);
        while children.len() < offspring {
            let (i, j) = ga_select(&pop, &mut rng);
            let (a, b) = if rng.gen_bool(params.crossover) {
                ga_crossover(&pop[i].candidate, &pop[j].candidate, &mut rng)?
            } else {
                (pop[i].candidate.clone(), pop[j].candidate.clone())
            };
            for mut child in [a, b] {
                if rng.gen_bool(params.mutation) {
                    child = ga_mutate(&child, &mut rng)?;
                }
                children.push(Individual {
                    fitness: objective(&child),
                    candidate: child,
                });
            }
        }
        children.truncate(offspring);
        pop.truncate(params.elitism);
        pop.extend(children);
        rank(&mut pop);
        if pop[0].fitness > best.fitness {
            best = pop[0].clone();
        }
        trajectory.push(stats(&pop, best.fitness));
    }
    Ok(GaResult { best, trajectory })
}
