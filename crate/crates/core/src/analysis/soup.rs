//! Random-soup census on a torus: evolve seeded Bernoulli soups and sort each
//! trial by what is left.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::{classify_isolated, torus_components, ClassifyOptions, Verdict, SEPARATION_GAP};
use crate::lattice::{Grid, GridError};
use crate::pattern::Pattern;
use crate::rule::RuleSpec;

#[derive(Debug, Error)]
pub enum SoupError {
    #[error("density {0} is outside [0, 1]")]
    Density(f64),
    #[error("a census needs at least one trial")]
    NoTrials,
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoupOptions {
    pub width: usize,
    pub height: usize,
    pub density: f64,
    pub steps: usize,
    pub trials: u64,
    /// Trial `i` draws from ChaCha8 seeded with `seed + i`.
    pub seed: u64,
    /// Budget for classifying each surviving component on an empty plane.
    pub component: ClassifyOptions,
}

impl SoupOptions {
    pub fn new(size: (usize, usize), density: f64, steps: usize, trials: u64, seed: u64) -> SoupOptions {
        SoupOptions {
            width: size.0,
            height: size.1,
            density,
            steps,
            trials,
            seed,
            component: ClassifyOptions { max_steps: 512, box_cap: 96, ..ClassifyOptions::default() },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SoupVerdict {
    Dies,
    StationaryResidue,
    ContainsGliders,
    UnboundedGrowth,
    Undecided,
}

impl SoupVerdict {
    /// Still non-catastrophic: nothing left grows without bound.
    pub fn is_bounded(self) -> bool {
        matches!(self, SoupVerdict::Dies | SoupVerdict::StationaryResidue | SoupVerdict::ContainsGliders)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub verdict: SoupVerdict,
    pub initial_population: u64,
    pub final_population: u64,
    #[serde(flatten)]
    pub residue: Residue,
}

/// Torus components of a grid, tallied by how each one classifies alone.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Residue {
    pub still_lifes: usize,
    pub oscillators: usize,
    pub gliders: usize,
    pub growing: usize,
    pub undecided: usize,
}

impl Residue {
    /// Growth wins over undecided, which wins over gliders, then anything
    /// stationary.
    pub fn verdict(&self) -> SoupVerdict {
        if self.growing > 0 {
            SoupVerdict::UnboundedGrowth
        } else if self.undecided > 0 {
            SoupVerdict::Undecided
        } else if self.gliders > 0 {
            SoupVerdict::ContainsGliders
        } else if self.still_lifes + self.oscillators > 0 {
            SoupVerdict::StationaryResidue
        } else {
            SoupVerdict::Dies
        }
    }

    pub fn localizations(&self) -> usize {
        self.still_lifes + self.oscillators + self.gliders
    }
}

/// Splits a toroidal grid into components and classifies each alone. A
/// component that wraps or outgrows `opts.box_cap` counts as growing.
pub fn torus_residue(grid: &Grid, rule: &RuleSpec, opts: &ClassifyOptions) -> Residue {
    let mut residue = Residue::default();
    let mut cache: HashMap<Pattern, Verdict> = HashMap::new();
    let cap = opts.box_cap;
    for comp in torus_components(grid, SEPARATION_GAP) {
        let pattern = Pattern::from_cells(comp.cells);
        let verdict = if comp.wraps || pattern.width() > cap || pattern.height() > cap {
            Verdict::UnboundedGrowth
        } else {
            *cache.entry(pattern).or_insert_with_key(|p| classify_isolated(p, rule, opts).verdict)
        };
        match verdict {
            Verdict::Dies => {}
            Verdict::StillLife => residue.still_lifes += 1,
            Verdict::Oscillator => residue.oscillators += 1,
            Verdict::Glider => residue.gliders += 1,
            Verdict::UnboundedGrowth => residue.growing += 1,
            Verdict::Emitter | Verdict::Undecided => residue.undecided += 1,
        }
    }
    residue
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SoupCensus {
    pub rule: RuleSpec,
    pub width: usize,
    pub height: usize,
    pub density: f64,
    pub steps: usize,
    pub seed: u64,
    pub trials: Vec<TrialRecord>,
}

impl SoupCensus {
    pub fn count(&self, verdict: SoupVerdict) -> usize {
        self.trials.iter().filter(|t| t.verdict == verdict).count()
    }

    pub fn fraction(&self, verdict: SoupVerdict) -> f64 {
        self.count(verdict) as f64 / self.trials.len() as f64
    }

    pub fn bounded_fraction(&self) -> f64 {
        self.trials.iter().filter(|t| t.verdict.is_bounded()).count() as f64 / self.trials.len() as f64
    }

    /// Trials that still hold at least one localization.
    pub fn localization_fraction(&self) -> f64 {
        let n = self.trials.iter().filter(|t| t.residue.localizations() > 0).count();
        n as f64 / self.trials.len() as f64
    }
}

/// Runs every trial of the census. Trials are independent and run in
/// parallel; the result is ordered by trial index.
pub fn soup_census(rule: &RuleSpec, opts: &SoupOptions) -> Result<SoupCensus, SoupError> {
    if !(0.0..=1.0).contains(&opts.density) {
        return Err(SoupError::Density(opts.density));
    }
    if opts.trials == 0 {
        return Err(SoupError::NoTrials);
    }
    Grid::toroidal(opts.width, opts.height)?;
    let trials = (0..opts.trials)
        .into_par_iter()
        .map(|trial| run_trial(rule, opts, trial))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SoupCensus {
        rule: *rule,
        width: opts.width,
        height: opts.height,
        density: opts.density,
        steps: opts.steps,
        seed: opts.seed,
        trials,
    })
}

fn run_trial(rule: &RuleSpec, opts: &SoupOptions, trial: u64) -> Result<TrialRecord, SoupError> {
    let seed = opts.seed.wrapping_add(trial);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grid = Grid::bernoulli_torus(opts.width, opts.height, opts.density, &mut rng)?;
    let initial_population = grid.population();
    for _ in 0..opts.steps {
        grid.advance(rule)?;
    }
    let residue = torus_residue(&grid, rule, &opts.component);
    let record = TrialRecord {
        trial,
        seed,
        verdict: residue.verdict(),
        initial_population,
        final_population: grid.population(),
        residue,
    };
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_density_dies() {
        let c = soup_census(&RuleSpec::diffusion(), &SoupOptions::new((32, 32), 0.0, 5, 4, 1)).unwrap();
        assert_eq!(c.count(SoupVerdict::Dies), 4);
        assert_eq!(c.bounded_fraction(), 1.0);
    }

    #[test]
    fn full_density_dies_in_one_step() {
        let c = soup_census(&RuleSpec::diffusion(), &SoupOptions::new((16, 16), 1.0, 1, 2, 1)).unwrap();
        assert!(c.trials.iter().all(|t| t.initial_population == 256 && t.final_population == 0));
    }

    #[test]
    fn dense_soups_blow_up() {
        let c = soup_census(&RuleSpec::diffusion(), &SoupOptions::new((64, 64), 0.3, 20, 4, 7)).unwrap();
        assert_eq!(c.count(SoupVerdict::UnboundedGrowth), 4);
    }

    #[test]
    fn deterministic_and_validated() {
        let opts = SoupOptions::new((48, 48), 0.01, 10, 3, 42);
        let a = soup_census(&RuleSpec::diffusion(), &opts).unwrap();
        let b = soup_census(&RuleSpec::diffusion(), &opts).unwrap();
        assert_eq!(a, b);
        assert!(matches!(
            soup_census(&RuleSpec::diffusion(), &SoupOptions { density: 1.5, ..opts }),
            Err(SoupError::Density(_))
        ));
        assert!(matches!(
            soup_census(&RuleSpec::diffusion(), &SoupOptions { trials: 0, ..opts }),
            Err(SoupError::NoTrials)
        ));
    }
}
