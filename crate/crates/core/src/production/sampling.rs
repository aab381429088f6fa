//! Seeded rejection sampler for test populations of economies.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{calibrated_equilibrium, economy_snapshot, EquilibriumPoint, Nest, ProductionSpec};
use crate::error::{Error, Result};
use crate::geometry::{classify_subregion, quadrant, Quadrant, SubregionLabel};
use crate::model::{ews_matrix, ews_ratio_vector, validate_economy, Economy};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    CobbDouglas,
    Ces,
    TwoLevelCes,
}

/// Which factor pairs a sampled two-level technology may nest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NestPolicy {
    /// Land and capital share the inner nest in both sectors.
    #[default]
    LandCapital,
    /// Each sector draws its nest uniformly from the three pairs.
    Any,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleConstraints {
    /// Require the factor-intensity ranking with labor in the middle.
    pub ranked: bool,
    pub quadrant: Option<Quadrant>,
    pub subregion: Option<SubregionLabel>,
    pub families: Vec<Family>,
    pub nest_policy: NestPolicy,
    /// Elasticities are drawn log-uniformly from this range.
    pub elasticity_range: (f64, f64),
    /// Smallest admissible cost share.
    pub min_share: f64,
    pub max_draws: usize,
}

impl Default for SampleConstraints {
    fn default() -> Self {
        SampleConstraints {
            ranked: true,
            quadrant: None,
            subregion: None,
            families: vec![Family::CobbDouglas, Family::Ces, Family::TwoLevelCes],
            nest_policy: NestPolicy::LandCapital,
            elasticity_range: (0.2, 5.0),
            min_share: 0.02,
            max_draws: 100_000,
        }
    }
}

impl SampleConstraints {
    pub fn ranked() -> Self {
        SampleConstraints::default()
    }

    /// Ranked economies whose ratio point lies in quadrant IV. Only two-level
    /// technologies can produce economy-wide land-capital complements.
    pub fn quadrant_iv() -> Self {
        SampleConstraints { quadrant: Some(Quadrant::IV), families: vec![Family::TwoLevelCes], ..SampleConstraints::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledEconomy<T> {
    pub seed: u64,
    pub draws: usize,
    pub specs: [ProductionSpec<T>; 2],
    pub equilibrium: EquilibriumPoint<T>,
    pub economy: Economy<T>,
}

struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    fn simplex(&mut self) -> [f64; 3] {
        let e = [(); 3].map(|_| -(1.0 - self.rng.random::<f64>()).ln());
        let s: f64 = e.iter().sum();
        e.map(|x| x / s)
    }

    fn log_uniform(&mut self, (lo, hi): (f64, f64)) -> f64 {
        (lo.ln() + (hi.ln() - lo.ln()) * self.rng.random::<f64>()).exp()
    }

    fn spec<T: Scalar>(&mut self, c: &SampleConstraints, shares: [f64; 3]) -> ProductionSpec<T> {
        let family = c.families[self.rng.random_range(0..c.families.len())];
        let shares = shares.map(T::lit);
        match family {
            Family::CobbDouglas => ProductionSpec::CobbDouglas { shares },
            Family::Ces => ProductionSpec::Ces { shares, elasticity: T::lit(self.log_uniform(c.elasticity_range)) },
            Family::TwoLevelCes => {
                let nest = match c.nest_policy {
                    NestPolicy::LandCapital => Nest::TK,
                    NestPolicy::Any => Nest::ALL[self.rng.random_range(0..3)],
                };
                ProductionSpec::TwoLevelCes {
                    nest,
                    shares,
                    inner_elasticity: T::lit(self.log_uniform(c.elasticity_range)),
                    outer_elasticity: T::lit(self.log_uniform(c.elasticity_range)),
                }
            }
        }
    }
}

fn is_ranked(th: &[[f64; 3]; 2]) -> bool {
    let ratio = |i: usize| th[0][i] / th[1][i];
    ratio(0) > ratio(2) && ratio(2) > ratio(1) && th[0][2] > th[1][2]
}

/// Draws technologies and an income split until the resulting snapshot
/// validates and meets `constraints`. Deterministic in `seed`.
pub fn sample_economy<T: Scalar>(seed: u64, constraints: &SampleConstraints) -> Result<SampledEconomy<T>> {
    if constraints.families.is_empty() {
        return Err(Error::InvalidInput("no technology family allowed".into()));
    }
    let (lo, hi) = constraints.elasticity_range;
    if !(lo > 0.0 && hi >= lo) {
        return Err(Error::InvalidInput(format!("bad elasticity range ({lo}, {hi})")));
    }
    let mut s = Sampler { rng: ChaCha8Rng::seed_from_u64(seed) };
    for draw in 1..=constraints.max_draws {
        let th = [s.simplex(), s.simplex()];
        if th.iter().flatten().any(|&x| x < constraints.min_share) {
            continue;
        }
        if constraints.ranked && !is_ranked(&th) {
            continue;
        }
        let good = 0.1 + 0.8 * s.rng.random::<f64>();
        let specs = [s.spec::<T>(constraints, th[0]), s.spec::<T>(constraints, th[1])];
        let equilibrium = calibrated_equilibrium(&specs, [T::lit(good), T::lit(1.0 - good)]);
        let economy = economy_snapshot(&equilibrium, &specs);
        if !validate_economy(&economy, constraints.ranked).is_empty() {
            continue;
        }
        if constraints.quadrant.is_some() || constraints.subregion.is_some() {
            let Ok(point) = ews_ratio_vector(&ews_matrix(&economy)) else {
                continue;
            };
            if constraints.quadrant.is_some_and(|q| quadrant(&point) != q) {
                continue;
            }
            if constraints.subregion.is_some_and(|l| classify_subregion(&point, &economy) != l) {
                continue;
            }
        }
        return Ok(SampledEconomy { seed, draws: draw, specs, equilibrium, economy });
    }
    Err(Error::ExhaustedRejection(constraints.max_draws))
}
