//! Monte Carlo sampling from the supported copulas and empirical survival
//! curves of coherent systems.
//!
//! Samples are split into independent streams of a ChaCha8 generator keyed
//! by the seed. Each stream is drawn and counted on its own, and the
//! integer counts are summed in stream order, so results are bit-identical
//! for any thread count.

use rand::distr::{Distribution as _, Open01};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::copulas::{Copula, CopulaFamily};
use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::orders::Grid;
use crate::systems::System;

/// Rejection attempts allowed per accepted FGM draw.
pub const REJECTION_CAP: usize = 10_000;
/// Grid size used when no simulation grid is given.
pub const DEFAULT_SIM_POINTS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub sample_count: usize,
    pub seed: u64,
    pub stream_count: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            sample_count: 100_000,
            seed: 20_240_917,
            stream_count: 16,
        }
    }
}

impl SimConfig {
    fn validate(&self) -> Result<()> {
        if self.sample_count == 0 {
            return Err(Error::InvalidConfig("sample_count must be positive".into()));
        }
        if self.stream_count == 0 {
            return Err(Error::InvalidConfig("stream_count must be positive".into()));
        }
        Ok(())
    }

    /// Sample counts per stream; the first streams take the remainder.
    fn split(&self) -> Vec<usize> {
        let streams = self.stream_count.min(self.sample_count);
        let base = self.sample_count / streams;
        let extra = self.sample_count % streams;
        (0..streams).map(|s| base + usize::from(s < extra)).collect()
    }
}

fn stream_rng(seed: u64, stream: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Row-major matrix of draws `U` whose joint CDF is the copula.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleMatrix {
    pub dim: usize,
    pub data: Vec<f64>,
    /// Fraction of proposals accepted; 1 for direct samplers.
    pub acceptance_rate: f64,
}

impl SampleMatrix {
    pub fn rows(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

/// Draws one row at a time from a copula.
struct Sampler {
    family: CopulaFamily,
    gamma: Option<Gamma<f64>>,
}

impl Sampler {
    fn new(copula: &Copula) -> Result<Self> {
        let gamma = match copula.family() {
            CopulaFamily::ClaytonOakes { theta } => {
                Some(Gamma::new(1.0 / theta, 1.0).map_err(|_| Error::InvalidParameter {
                    name: "theta",
                    value: theta,
                    reason: "must be positive and finite",
                })?)
            }
            _ => None,
        };
        Ok(Sampler {
            family: copula.family(),
            gamma,
        })
    }

    /// Fills `out` and returns the number of proposals used.
    fn draw(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) -> Result<usize> {
        match self.family {
            CopulaFamily::Independence => {
                fill_uniform(rng, out);
                Ok(1)
            }
            CopulaFamily::GumbelHougaard { theta: 1.0 } => {
                fill_uniform(rng, out);
                Ok(1)
            }
            CopulaFamily::GumbelHougaard { theta } => {
                let alpha = 1.0 / theta;
                let s = positive_stable(rng, alpha);
                for u in out.iter_mut() {
                    let e: f64 = Exp1.sample(rng);
                    *u = (-(e / s).powf(alpha)).exp();
                }
                Ok(1)
            }
            CopulaFamily::ClaytonOakes { theta } => {
                let v = self.gamma.as_ref().expect("gamma set for clayton").sample(rng);
                for u in out.iter_mut() {
                    let e: f64 = Exp1.sample(rng);
                    *u = (-(e / v).ln_1p() / theta).exp();
                }
                Ok(1)
            }
            CopulaFamily::Fgm { theta } => {
                let bound = 1.0 + theta.abs();
                for attempt in 1..=REJECTION_CAP {
                    fill_uniform(rng, out);
                    let prod: f64 = out.iter().map(|u| 1.0 - 2.0 * u).product();
                    let w: f64 = rng.random::<f64>() * bound;
                    if w <= 1.0 + theta * prod {
                        return Ok(attempt);
                    }
                }
                Err(Error::RejectionCap {
                    attempts: REJECTION_CAP as u64,
                    acceptance_rate: 0.0,
                })
            }
        }
    }
}

fn fill_uniform(rng: &mut ChaCha8Rng, out: &mut [f64]) {
    for u in out.iter_mut() {
        *u = Open01.sample(rng);
    }
}

/// Positive stable variable with Laplace transform `exp(-s^alpha)`.
fn positive_stable(rng: &mut ChaCha8Rng, alpha: f64) -> f64 {
    let u: f64 = Open01.sample(rng);
    let u = u * std::f64::consts::PI;
    let w: f64 = Exp1.sample(rng);
    (alpha * u).sin() / u.sin().powf(1.0 / alpha)
        * (((1.0 - alpha) * u).sin() / w).powf((1.0 - alpha) / alpha)
}

/// Runs `body` once per stream in parallel; results come back in stream order.
fn per_stream<T: Send>(
    cfg: &SimConfig,
    body: impl Fn(&mut ChaCha8Rng, usize) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    cfg.validate()?;
    cfg.split()
        .into_par_iter()
        .enumerate()
        .map(|(stream, count)| body(&mut stream_rng(cfg.seed, stream), count))
        .collect()
}

pub fn sample_copula(copula: &Copula, cfg: &SimConfig) -> Result<SampleMatrix> {
    let sampler = Sampler::new(copula)?;
    let dim = copula.dim();
    let parts = per_stream(cfg, |rng, count| {
        let mut data = vec![0.0; count * dim];
        let mut proposals = 0usize;
        for row in data.chunks_mut(dim) {
            proposals += sampler.draw(rng, row)?;
        }
        Ok((data, proposals))
    })?;
    let proposals: usize = parts.iter().map(|p| p.1).sum();
    let data: Vec<f64> = parts.into_iter().flat_map(|p| p.0).collect();
    Ok(SampleMatrix {
        dim,
        acceptance_rate: cfg.sample_count as f64 / proposals as f64,
        data,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivalRow {
    pub x: f64,
    pub empirical_sf: f64,
    pub analytic_sf: f64,
    pub std_err: f64,
}

impl SurvivalRow {
    /// `|empirical - analytic| / std_err`.
    pub fn standardized_deviation(&self) -> f64 {
        let diff = (self.empirical_sf - self.analytic_sf).abs();
        if self.std_err > 0.0 {
            diff / self.std_err
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub seed: u64,
    pub sample_count: usize,
    pub acceptance_rate: f64,
    pub rows: Vec<SurvivalRow>,
}

impl SurvivalCurve {
    pub fn max_standardized_deviation(&self) -> f64 {
        self.rows
            .iter()
            .map(SurvivalRow::standardized_deviation)
            .fold(0.0, f64::max)
    }
}

/// Points where the component survival runs linearly from 0.95 down to 0.05.
pub fn default_sim_grid(margin: &Distribution, size: usize) -> Result<Grid> {
    if size < 2 {
        return Err(Error::InvalidGrid(format!(
            "simulation grid needs at least 2 points, got {size}"
        )));
    }
    let points = (0..size)
        .map(|i| margin.inverse_sf(0.95 - 0.9 * i as f64 / (size - 1) as f64))
        .collect();
    Grid::custom(points)
}

/// System lifetime: best path, each path limited by its weakest component.
fn lifetime(paths: &[Vec<usize>], x: &[f64]) -> f64 {
    paths
        .iter()
        .map(|p| p.iter().map(|&c| x[c - 1]).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Empirical survival of the system at each grid point against the analytic
/// `h(F̄(x))`, with standard errors `sqrt(h(1 - h)/N)`.
pub fn simulate_system(system: &System, grid: &Grid, cfg: &SimConfig) -> Result<SurvivalCurve> {
    let copula = system.copula();
    let sampler = Sampler::new(copula)?;
    let dim = copula.dim();
    let paths = system.structure().paths();
    let margin = system.margin();
    let xs = grid.points();
    let parts = per_stream(cfg, |rng, count| {
        // hist[k]: samples whose lifetime exceeds exactly the first k points
        let mut hist = vec![0u64; xs.len() + 1];
        let mut u = vec![0.0; dim];
        let mut x = vec![0.0; dim];
        let mut proposals = 0usize;
        for _ in 0..count {
            proposals += sampler.draw(rng, &mut u)?;
            for (xi, &ui) in x.iter_mut().zip(&u) {
                *xi = margin.inverse_sf(ui);
            }
            let tau = lifetime(paths, &x);
            hist[xs.partition_point(|&g| g < tau)] += 1;
        }
        Ok((hist, proposals))
    })?;
    let mut hist = vec![0u64; xs.len() + 1];
    let mut proposals = 0usize;
    for (h, p) in parts {
        proposals += p;
        for (a, b) in hist.iter_mut().zip(h) {
            *a += b;
        }
    }
    let n = cfg.sample_count as f64;
    let mut survivors = 0u64;
    let mut rows = vec![];
    for (k, &x) in xs.iter().enumerate().rev() {
        survivors += hist[k + 1];
        let analytic = system.sf(x);
        rows.push(SurvivalRow {
            x,
            empirical_sf: survivors as f64 / n,
            analytic_sf: analytic,
            std_err: (analytic * (1.0 - analytic) / n).sqrt(),
        });
    }
    rows.reverse();
    Ok(SurvivalCurve {
        seed: cfg.seed,
        sample_count: cfg.sample_count,
        acceptance_rate: cfg.sample_count as f64 / proposals as f64,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::Structure;

    fn cfg(n: usize) -> SimConfig {
        SimConfig {
            sample_count: n,
            seed: 7,
            stream_count: 8,
        }
    }

    #[test]
    fn split_covers_all_samples() {
        let c = SimConfig {
            sample_count: 103,
            seed: 0,
            stream_count: 10,
        };
        let parts = c.split();
        assert_eq!(parts.iter().sum::<usize>(), 103);
        assert_eq!(parts[0], 11);
        assert_eq!(parts[9], 10);
        assert_eq!(cfg(3).split(), vec![1, 1, 1]);
    }

    #[test]
    fn samples_are_in_unit_cube() {
        for family in [
            CopulaFamily::Independence,
            CopulaFamily::Fgm { theta: -1.0 },
            CopulaFamily::GumbelHougaard { theta: 3.0 },
            CopulaFamily::ClaytonOakes { theta: 2.0 },
        ] {
            let m = sample_copula(&Copula::new(family, 3).unwrap(), &cfg(2000)).unwrap();
            assert_eq!(m.rows(), 2000);
            assert!(m.data.iter().all(|u| (0.0..=1.0).contains(u)), "{family:?}");
        }
    }

    #[test]
    fn diagonal_matches_copula() {
        // P(all U_i <= p) = K(p)
        let n = 200_000;
        for family in [
            CopulaFamily::Fgm { theta: 1.0 },
            CopulaFamily::GumbelHougaard { theta: 2.0 },
            CopulaFamily::ClaytonOakes { theta: 1.5 },
        ] {
            let c = Copula::new(family, 3).unwrap();
            let m = sample_copula(&c, &cfg(n)).unwrap();
            for p in [0.2, 0.5, 0.8] {
                let hits = (0..m.rows())
                    .filter(|&i| m.row(i).iter().all(|&u| u <= p))
                    .count();
                let k = c.eval_exchangeable(p, 3).unwrap();
                let se = (k * (1.0 - k) / n as f64).sqrt();
                assert!((hits as f64 / n as f64 - k).abs() < 4.5 * se, "{family:?} p={p}");
            }
        }
    }

    #[test]
    fn fgm_acceptance_rate() {
        let m = sample_copula(
            &Copula::new(CopulaFamily::Fgm { theta: 1.0 }, 3).unwrap(),
            &cfg(20_000),
        )
        .unwrap();
        assert!((m.acceptance_rate - 0.5).abs() < 0.02);
    }

    #[test]
    fn same_seed_same_samples() {
        let c = Copula::new(CopulaFamily::ClaytonOakes { theta: 1.0 }, 3).unwrap();
        assert_eq!(
            sample_copula(&c, &cfg(500)).unwrap(),
            sample_copula(&c, &cfg(500)).unwrap()
        );
        let other = SimConfig { seed: 8, ..cfg(500) };
        assert_ne!(
            sample_copula(&c, &cfg(500)).unwrap(),
            sample_copula(&c, &other).unwrap()
        );
    }

    #[test]
    fn system_curve_tracks_analytic() {
        let system = System::new(
            Structure::new(3, vec![vec![1, 2], vec![1, 3]]).unwrap(),
            Copula::new(CopulaFamily::Fgm { theta: 1.0 }, 3).unwrap(),
            Distribution::linear_failure_rate(1.0, 1.0).unwrap(),
        )
        .unwrap();
        let grid = default_sim_grid(system.margin(), DEFAULT_SIM_POINTS).unwrap();
        let curve = simulate_system(&system, &grid, &cfg(50_000)).unwrap();
        assert_eq!(curve.rows.len(), 20);
        assert!(curve.max_standardized_deviation() < 4.0);
        assert!(curve
            .rows
            .windows(2)
            .all(|w| w[0].empirical_sf >= w[1].empirical_sf));
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(sample_copula(&Copula::independence(3), &cfg(0)).is_err());
    }
}
