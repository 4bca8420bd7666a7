//! Hierarchical salinity model fitted by Metropolis-within-Gibbs.
//!
//! For each area k the monthly minimum and maximum salinities are normal,
//! `x ~ N(mu_x[k], (C mu_x[k])^2)` and `y ~ N(mu_y[k], (C mu_y[k])^2)`,
//! with `mu_x[k] ~ N(nu_x, sigma_x2)` and `mu_y[k] ~ N(nu_y, sigma_y2)`.
//! `C` is log-normal, the variances and hyper-means uniform.
//!
//! Updates per iteration: random-walk Metropolis on every `mu` (O(1) via
//! per-area sufficient statistics) and on `log C`; exact Gibbs draws of
//! `nu` from its truncated normal conditional; slice sampling of
//! `log sigma2`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::area::Area;
use super::diagnostics::rank_normalized_split_rhat;
use super::salinity::SalinityObservation;
use crate::error::ModelError;

/// Prior hyper-parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriorConfig {
    /// Mean of `C` on its natural scale.
    pub c_mean: f64,
    /// Standard deviation of `C` on its natural scale.
    pub c_sd: f64,
    pub sigma_x2_range: (f64, f64),
    pub sigma_y2_range: (f64, f64),
    pub nu_x_range: (f64, f64),
    pub nu_y_range: (f64, f64),
}

impl Default for PriorConfig {
    fn default() -> Self {
        PriorConfig {
            c_mean: 0.1,
            c_sd: 0.1,
            sigma_x2_range: (0.0, 10.0),
            sigma_y2_range: (0.0, 10.0),
            nu_x_range: (0.0, 35.0),
            nu_y_range: (0.0, 35.0),
        }
    }
}

impl PriorConfig {
    pub fn check(&self) -> Result<(), ModelError> {
        let ok_range = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo < hi;
        if !(self.c_mean > 0.0 && self.c_sd > 0.0)
            || !ok_range(self.sigma_x2_range)
            || !ok_range(self.sigma_y2_range)
            || !ok_range(self.nu_x_range)
            || !ok_range(self.nu_y_range)
        {
            return Err(ModelError::Validation(
                "prior ranges must be nonempty and nonnegative".into(),
            ));
        }
        Ok(())
    }

    /// Location and scale of `log C`.
    pub fn log_c_params(&self) -> (f64, f64) {
        let s2 = (1.0 + (self.c_sd / self.c_mean).powi(2)).ln();
        (self.c_mean.ln() - s2 / 2.0, s2.sqrt())
    }
}

/// Sampler schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McmcConfig {
    pub iterations: u64,
    pub chains: u32,
    pub thin: u64,
    pub burn_in: u64,
    pub seed: u64,
}

impl McmcConfig {
    /// Default schedule for interactive use.
    pub fn desk() -> Self {
        McmcConfig {
            iterations: 50_000,
            chains: 3,
            thin: 10,
            burn_in: 20_000,
            seed: 1,
        }
    }

    /// The long schedule of the original analysis.
    pub fn full_protocol() -> Self {
        McmcConfig {
            iterations: 500_000,
            chains: 3,
            thin: 100,
            burn_in: 200_000,
            seed: 1,
        }
    }

    pub fn draws_per_chain(&self) -> u64 {
        self.iterations.saturating_sub(self.burn_in) / self.thin.max(1)
    }

    pub fn retained_draws(&self) -> u64 {
        self.draws_per_chain() * self.chains as u64
    }

    pub fn check(&self) -> Result<(), ModelError> {
        if self.chains < 2 {
            return Err(ModelError::Validation("at least 2 chains are required".into()));
        }
        if self.thin == 0 || self.burn_in >= self.iterations || self.draws_per_chain() < 4 {
            return Err(ModelError::Validation(
                "need thin >= 1 and at least 4 retained draws per chain after burn-in".into(),
            ));
        }
        Ok(())
    }
}

impl Default for McmcConfig {
    fn default() -> Self {
        McmcConfig::desk()
    }
}

/// One retained posterior draw.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Draw {
    pub chain: u32,
    pub iteration: u64,
    pub c: f64,
    pub sigma_x2: f64,
    pub sigma_y2: f64,
    pub nu_x: f64,
    pub nu_y: f64,
    /// Per-area means, in [`PosteriorSamples::areas`] order.
    pub mu_x: Vec<f64>,
    pub mu_y: Vec<f64>,
}

/// Summary statistics of a fit.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    /// Rank-normalized split R-hat per parameter name.
    pub rhat: BTreeMap<String, f64>,
    /// Metropolis acceptance rate per parameter after burn-in.
    pub acceptance: BTreeMap<String, f64>,
    /// Fraction of draws with `mu_x[k] > mu_y[k]`, per area code.
    pub mu_order_violations: BTreeMap<String, f64>,
    /// True when any R-hat exceeds 1.1.
    pub divergent: bool,
}

impl FitDiagnostics {
    pub fn max_rhat(&self) -> f64 {
        self.rhat.values().copied().fold(f64::NAN, f64::max)
    }
}

/// Retained draws of a fit, ordered by (chain, iteration).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSamples {
    pub areas: Vec<Area>,
    pub draws: Vec<Draw>,
    #[serde(default)]
    pub diagnostics: FitDiagnostics,
}

impl PosteriorSamples {
    pub fn area_index(&self, area: Area) -> Option<usize> {
        self.areas.iter().position(|a| *a == area)
    }

    /// Parameter names in export column order.
    pub fn parameter_names(&self) -> Vec<String> {
        let mut names: Vec<String> = ["C", "sigma_x2", "sigma_y2", "nu_x", "nu_y"].map(String::from).to_vec();
        names.extend(self.areas.iter().map(|a| format!("mu_x_{a}")));
        names.extend(self.areas.iter().map(|a| format!("mu_y_{a}")));
        names
    }

    fn values(d: &Draw) -> Vec<f64> {
        let mut v = vec![d.c, d.sigma_x2, d.sigma_y2, d.nu_x, d.nu_y];
        v.extend(&d.mu_x);
        v.extend(&d.mu_y);
        v
    }

    /// Tab-separated export: a header line `chain iteration <parameters>`
    /// followed by one draw per line. Values use the shortest decimal form
    /// that round-trips exactly.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("chain\titeration");
        for n in self.parameter_names() {
            out.push('\t');
            out.push_str(&n);
        }
        out.push('\n');
        for d in &self.draws {
            write!(out, "{}\t{}", d.chain, d.iteration).unwrap();
            for v in Self::values(d) {
                write!(out, "\t{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Reads the format written by [`PosteriorSamples::to_tsv`].
    pub fn from_tsv(text: &str, origin: &str) -> Result<PosteriorSamples, ModelError> {
        let err = |line: usize, reason: String| ModelError::Parse {
            path: origin.to_string(),
            line,
            reason,
        };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| err(1, "empty posterior file".into()))?;
        let cols: Vec<&str> = header.split('\t').collect();
        let fixed = ["chain", "iteration", "C", "sigma_x2", "sigma_y2", "nu_x", "nu_y"];
        if cols.len() < fixed.len() || cols[..fixed.len()] != fixed || (cols.len() - fixed.len()) % 2 != 0 {
            return Err(err(1, "unexpected header".into()));
        }
        let k = (cols.len() - fixed.len()) / 2;
        let mut areas = Vec::with_capacity(k);
        for i in 0..k {
            let code = cols[fixed.len() + i]
                .strip_prefix("mu_x_")
                .ok_or_else(|| err(1, format!("expected mu_x_ column, found `{}`", cols[fixed.len() + i])))?;
            let area: Area = code.parse().map_err(|e| err(1, e))?;
            if cols[fixed.len() + k + i] != format!("mu_y_{area}") {
                return Err(err(
                    1,
                    "mu_y_ columns must follow mu_x_ columns in the same order".into(),
                ));
            }
            areas.push(area);
        }
        let mut draws = Vec::new();
        for (i, l) in lines {
            let f: Vec<&str> = l.split('\t').collect();
            if f.len() != cols.len() {
                return Err(err(i + 1, format!("expected {} fields, found {}", cols.len(), f.len())));
            }
            let chain = f[0].parse().map_err(|_| err(i + 1, "bad chain".into()))?;
            let iteration = f[1].parse().map_err(|_| err(i + 1, "bad iteration".into()))?;
            let v = f[2..]
                .iter()
                .map(|s| s.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| err(i + 1, "bad number".into()))?;
            draws.push(Draw {
                chain,
                iteration,
                c: v[0],
                sigma_x2: v[1],
                sigma_y2: v[2],
                nu_x: v[3],
                nu_y: v[4],
                mu_x: v[5..5 + k].to_vec(),
                mu_y: v[5 + k..].to_vec(),
            });
        }
        Ok(PosteriorSamples {
            areas,
            draws,
            diagnostics: FitDiagnostics::default(),
        })
    }

    /// Column of one parameter split by chain.
    pub fn chains_of(&self, param: usize) -> Vec<Vec<f64>> {
        let mut by_chain: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
        for d in &self.draws {
            by_chain.entry(d.chain).or_default().push(Self::values(d)[param]);
        }
        by_chain.into_values().collect()
    }

    fn compute_diagnostics(&mut self, acceptance: BTreeMap<String, f64>) {
        let names = self.parameter_names();
        let rhat: BTreeMap<String, f64> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), rank_normalized_split_rhat(&self.chains_of(i))))
            .collect();
        let n = self.draws.len().max(1) as f64;
        let mu_order_violations = self
            .areas
            .iter()
            .enumerate()
            .map(|(k, a)| {
                let bad = self.draws.iter().filter(|d| d.mu_x[k] > d.mu_y[k]).count();
                (a.code().to_string(), bad as f64 / n)
            })
            .collect();
        let divergent = rhat.values().any(|r| *r > 1.1);
        self.diagnostics = FitDiagnostics {
            rhat,
            acceptance,
            mu_order_violations,
            divergent,
        };
    }
}

/// Sufficient statistics of one area's observations of one kind.
#[derive(Clone, Copy, Debug, Default)]
struct Stats {
    n: f64,
    s1: f64,
    s2: f64,
}

impl Stats {
    /// Log-likelihood up to a constant of N(mu, (c mu)^2) observations.
    fn loglik(&self, mu: f64, c: f64) -> f64 {
        let sd = c * mu;
        -self.n * sd.ln() - (self.s2 - 2.0 * mu * self.s1 + self.n * mu * mu) / (2.0 * sd * sd)
    }

    fn mean(&self) -> f64 {
        self.s1 / self.n
    }
}

struct Data {
    x: Vec<Stats>,
    y: Vec<Stats>,
}

#[derive(Clone)]
struct State {
    mu_x: Vec<f64>,
    mu_y: Vec<f64>,
    c: f64,
    sx2: f64,
    sy2: f64,
    nux: f64,
    nuy: f64,
}

/// Random-walk step size with acceptance bookkeeping.
#[derive(Clone, Copy)]
struct Step {
    size: f64,
    tried: u64,
    accepted: u64,
}

impl Step {
    fn new(size: f64) -> Self {
        Step {
            size,
            tried: 0,
            accepted: 0,
        }
    }

    fn record(&mut self, accepted: bool) {
        self.tried += 1;
        self.accepted += accepted as u64;
    }

    /// Nudges the step toward 20-50 % acceptance and resets the counters.
    fn adapt(&mut self) {
        if self.tried == 0 {
            return;
        }
        let rate = self.accepted as f64 / self.tried as f64;
        if rate < 0.2 {
            self.size *= 0.7;
        } else if rate > 0.5 {
            self.size *= 1.4;
        }
        self.tried = 0;
        self.accepted = 0;
    }

    fn rate(&self) -> f64 {
        if self.tried == 0 {
            f64::NAN
        } else {
            self.accepted as f64 / self.tried as f64
        }
    }
}

const ADAPT_EVERY: u64 = 100;

/// Fits the hierarchical model. Areas are those present in `obs`, in
/// [`Area::ALL`] order; every fitted area needs at least one observation.
pub fn fit_salinity_model(
    obs: &[SalinityObservation],
    prior: &PriorConfig,
    mcmc: &McmcConfig,
) -> Result<PosteriorSamples, ModelError> {
    prior.check()?;
    mcmc.check()?;
    let areas: Vec<Area> = Area::ALL
        .into_iter()
        .filter(|a| obs.iter().any(|o| o.area == *a))
        .collect();
    if areas.is_empty() {
        return Err(ModelError::Validation("no salinity observations".into()));
    }
    let mut data = Data {
        x: vec![Stats::default(); areas.len()],
        y: vec![Stats::default(); areas.len()],
    };
    for o in obs {
        let k = areas.iter().position(|a| *a == o.area).unwrap();
        for (s, v) in [(&mut data.x[k], o.x_min), (&mut data.y[k], o.y_max)] {
            s.n += 1.0;
            s.s1 += v;
            s.s2 += v * v;
        }
    }
    if data.x.iter().chain(&data.y).any(|s| s.mean() <= 0.0) {
        return Err(ModelError::Validation(
            "every area needs a positive mean salinity (the scale C*mu must be positive)".into(),
        ));
    }

    let results: Vec<(Vec<Draw>, Vec<Step>)> = run_chains(mcmc, |chain| run_chain(&data, prior, mcmc, chain));

    let mut draws = Vec::with_capacity(mcmc.retained_draws() as usize);
    let k = areas.len();
    let mut accepted = vec![(0u64, 0u64); 2 * k + 1];
    for (d, steps) in results {
        draws.extend(d);
        for (acc, s) in accepted.iter_mut().zip(steps) {
            acc.0 += s.accepted;
            acc.1 += s.tried;
        }
    }
    let mut names: Vec<String> = areas.iter().map(|a| format!("mu_x_{a}")).collect();
    names.extend(areas.iter().map(|a| format!("mu_y_{a}")));
    names.push("C".into());
    let acceptance = names
        .into_iter()
        .zip(accepted)
        .map(|(n, (a, t))| (n, a as f64 / t.max(1) as f64))
        .collect();

    let mut post = PosteriorSamples {
        areas,
        draws,
        diagnostics: FitDiagnostics::default(),
    };
    post.compute_diagnostics(acceptance);
    if post.diagnostics.divergent {
        log::warn!(
            "MCMC fit did not converge (max R-hat {:.3})",
            post.diagnostics.max_rhat()
        );
    }
    Ok(post)
}

#[cfg(feature = "parallel")]
fn run_chains<T: Send>(mcmc: &McmcConfig, f: impl Fn(u32) -> T + Sync) -> Vec<T> {
    let f = &f;
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..mcmc.chains).map(|c| s.spawn(move || f(c))).collect();
        handles.into_iter().map(|h| h.join().expect("chain panicked")).collect()
    })
}

#[cfg(not(feature = "parallel"))]
fn run_chains<T>(mcmc: &McmcConfig, f: impl Fn(u32) -> T) -> Vec<T> {
    (0..mcmc.chains).map(f).collect()
}

fn std_normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn run_chain(data: &Data, prior: &PriorConfig, mcmc: &McmcConfig, chain: u32) -> (Vec<Draw>, Vec<Step>) {
    let mut rng = ChaCha8Rng::seed_from_u64(mcmc.seed);
    rng.set_stream(chain as u64);
    let k = data.x.len();
    let (lc_mu, lc_sd) = prior.log_c_params();

    // Overdispersed start around the data means.
    let jitter = |rng: &mut ChaCha8Rng, m: f64| (m * (1.0 + 0.2 * std_normal(rng))).max(0.01 * m);
    let mut st = State {
        mu_x: data.x.iter().map(|s| jitter(&mut rng, s.mean())).collect(),
        mu_y: data.y.iter().map(|s| jitter(&mut rng, s.mean())).collect(),
        c: (lc_mu + 0.5 * lc_sd * std_normal(&mut rng)).exp(),
        sx2: 0.0,
        sy2: 0.0,
        nux: 0.0,
        nuy: 0.0,
    };
    st.nux = clamp_open(mean(&st.mu_x), prior.nu_x_range);
    st.nuy = clamp_open(mean(&st.mu_y), prior.nu_y_range);
    st.sx2 = clamp_open(1.0, prior.sigma_x2_range);
    st.sy2 = clamp_open(1.0, prior.sigma_y2_range);

    let init_step = |s: &Stats| 0.1 * s.mean() / s.n.sqrt();
    let mut steps: Vec<Step> = data.x.iter().chain(&data.y).map(|s| Step::new(init_step(s))).collect();
    steps.push(Step::new(0.1));

    let mut draws = Vec::with_capacity(mcmc.draws_per_chain() as usize);
    for it in 0..mcmc.iterations {
        // mu updates
        for kind in 0..2 {
            let (mus, stats, nu, s2) = if kind == 0 {
                (&mut st.mu_x, &data.x, st.nux, st.sx2)
            } else {
                (&mut st.mu_y, &data.y, st.nuy, st.sy2)
            };
            for j in 0..k {
                let step = &mut steps[kind * k + j];
                let cur = mus[j];
                let prop = cur + step.size * std_normal(&mut rng);
                let accepted = if prop <= 0.0 {
                    false
                } else {
                    let lp = |m: f64| stats[j].loglik(m, st.c) - (m - nu).powi(2) / (2.0 * s2);
                    let log_ratio = lp(prop) - lp(cur);
                    log_ratio.is_finite() && rng.random::<f64>().ln() < log_ratio
                };
                if accepted {
                    mus[j] = prop;
                }
                step.record(accepted);
            }
        }

        // C on the log scale; the lognormal prior times the Jacobian is a
        // normal density in log C.
        {
            let step = &mut steps[2 * k];
            let lc = st.c.ln();
            let lc_prop = lc + step.size * std_normal(&mut rng);
            let lp = |lc: f64| {
                let c = lc.exp();
                let ll: f64 = (0..k)
                    .map(|j| data.x[j].loglik(st.mu_x[j], c) + data.y[j].loglik(st.mu_y[j], c))
                    .sum();
                ll - (lc - lc_mu).powi(2) / (2.0 * lc_sd * lc_sd)
            };
            let log_ratio = lp(lc_prop) - lp(lc);
            let accepted = log_ratio.is_finite() && rng.random::<f64>().ln() < log_ratio;
            if accepted {
                st.c = lc_prop.exp();
            }
            step.record(accepted);
        }

        // hyper-means: exact truncated normal conditionals
        st.nux = truncated_normal(&mut rng, mean(&st.mu_x), (st.sx2 / k as f64).sqrt(), prior.nu_x_range);
        st.nuy = truncated_normal(&mut rng, mean(&st.mu_y), (st.sy2 / k as f64).sqrt(), prior.nu_y_range);

        // hyper-variances: slice sampling of log sigma2
        let ssx: f64 = st.mu_x.iter().map(|m| (m - st.nux).powi(2)).sum();
        let ssy: f64 = st.mu_y.iter().map(|m| (m - st.nuy).powi(2)).sum();
        st.sx2 = slice_log_variance(&mut rng, st.sx2, k, ssx, prior.sigma_x2_range);
        st.sy2 = slice_log_variance(&mut rng, st.sy2, k, ssy, prior.sigma_y2_range);

        if it < mcmc.burn_in {
            if (it + 1) % ADAPT_EVERY == 0 {
                steps.iter_mut().for_each(Step::adapt);
            }
            if it + 1 == mcmc.burn_in {
                steps.iter_mut().for_each(|s| {
                    s.tried = 0;
                    s.accepted = 0;
                });
            }
            continue;
        }
        if (it - mcmc.burn_in + 1) % mcmc.thin == 0 {
            draws.push(Draw {
                chain,
                iteration: it + 1,
                c: st.c,
                sigma_x2: st.sx2,
                sigma_y2: st.sy2,
                nu_x: st.nux,
                nu_y: st.nuy,
                mu_x: st.mu_x.clone(),
                mu_y: st.mu_y.clone(),
            });
        }
    }
    log::debug!(
        "chain {chain}: acceptance {:?}",
        steps.iter().map(Step::rate).collect::<Vec<_>>()
    );
    (draws, steps)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn clamp_open(x: f64, (lo, hi): (f64, f64)) -> f64 {
    let eps = 1e-9 * (hi - lo);
    x.clamp(lo + eps, hi - eps)
}

/// Draws from N(mean, sd^2) restricted to (lo, hi) by inverting the CDF,
/// working in the upper tail by symmetry so that far-tail truncation keeps
/// its precision.
fn truncated_normal(rng: &mut ChaCha8Rng, mean: f64, sd: f64, (lo, hi): (f64, f64)) -> f64 {
    let std = Normal::new(0.0, 1.0).expect("standard normal");
    let (a, b) = ((lo - mean) / sd, (hi - mean) / sd);
    let u: f64 = rng.random();
    let z = if a > 0.0 {
        // upper tail: work with survival functions
        let (sa, sb) = (std.sf(a), std.sf(b));
        -std.inverse_cdf(sb + u * (sa - sb)) // sf^-1(p) = -cdf^-1(p)
    } else {
        let (fa, fb) = (std.cdf(a), std.cdf(b));
        std.inverse_cdf(fa + u * (fb - fa))
    };
    let x = mean + sd * z;
    if x.is_finite() {
        clamp_open(x, (lo, hi))
    } else {
        clamp_open(mean, (lo, hi))
    }
}

/// One slice-sampling update of `sigma2` whose conditional density is
/// proportional to `sigma2^(-k/2) exp(-ss / (2 sigma2))` on `range`. Works
/// on `u = log sigma2`, where the density gains a Jacobian factor `e^u`.
fn slice_log_variance(rng: &mut ChaCha8Rng, current: f64, k: usize, ss: f64, (lo, hi): (f64, f64)) -> f64 {
    let b = ss / 2.0;
    let a = 1.0 - k as f64 / 2.0;
    let logf = |u: f64| a * u - b * (-u).exp();
    let (ulo, uhi) = (if lo > 0.0 { lo.ln() } else { f64::NEG_INFINITY }, hi.ln());
    let inside = |u: f64| u > ulo && u < uhi;

    let u0 = current.ln();
    let level = logf(u0) + rng.random::<f64>().ln();
    const WIDTH: f64 = 1.0;
    const MAX_STEPS: usize = 200;
    let mut left = u0 - WIDTH * rng.random::<f64>();
    let mut right = left + WIDTH;
    let mut n = 0;
    while inside(left) && logf(left) > level && n < MAX_STEPS {
        left -= WIDTH;
        n += 1;
    }
    n = 0;
    while inside(right) && logf(right) > level && n < MAX_STEPS {
        right += WIDTH;
        n += 1;
    }
    left = left.max(ulo);
    right = right.min(uhi);
    loop {
        let u = left + (right - left) * rng.random::<f64>();
        if inside(u) && logf(u) > level {
            return u.exp();
        }
        if u < u0 {
            left = u;
        } else {
            right = u;
        }
        if right - left < 1e-12 {
            return current;
        }
    }
}
