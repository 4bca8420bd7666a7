//! Salinity fixtures with known answers.

use dst_core::nis::{Area, Draw, PosteriorSamples, SalinityObservation};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Two years of monthly observations per area drawn around fixed band
/// ends with coefficient of variation `c`.
pub fn synthetic_observations(mu_x: f64, mu_y: f64, c: f64, seed: u64) -> Vec<SalinityObservation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut obs = Vec::new();
    for area in Area::ALL {
        for month in 1..=24u32 {
            let x: f64 = Normal::new(mu_x, c * mu_x).unwrap().sample(&mut rng);
            let y: f64 = Normal::new(mu_y, c * mu_y).unwrap().sample(&mut rng);
            obs.push(SalinityObservation {
                area,
                month: (month - 1) % 12 + 1,
                x_min: x,
                y_max: y,
            });
        }
    }
    obs
}

/// A posterior with no spread: every draw puts each area's band at the
/// observed monthly means.
pub fn degenerate_posterior(obs: &[SalinityObservation]) -> PosteriorSamples {
    let areas: Vec<Area> = Area::ALL
        .into_iter()
        .filter(|a| obs.iter().any(|o| o.area == *a))
        .collect();
    let mean = |a: Area, f: fn(&SalinityObservation) -> f64| {
        let v: Vec<f64> = obs.iter().filter(|o| o.area == a).map(f).collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let mu_x: Vec<f64> = areas.iter().map(|a| mean(*a, |o| o.x_min)).collect();
    let mu_y: Vec<f64> = areas.iter().map(|a| mean(*a, |o| o.y_max)).collect();
    let draws = (0..50)
        .map(|i| Draw {
            chain: (i % 2) as u32,
            iteration: i,
            c: 0.0,
            sigma_x2: 0.0,
            sigma_y2: 0.0,
            nu_x: 0.0,
            nu_y: 0.0,
            mu_x: mu_x.clone(),
            mu_y: mu_y.clone(),
        })
        .collect();
    PosteriorSamples {
        areas,
        draws,
        diagnostics: Default::default(),
    }
}
