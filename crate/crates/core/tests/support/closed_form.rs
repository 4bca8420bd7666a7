//! Expected utilities from the cost, emission and risk formulas and the
//! source tables, for scenarios with every decision locked.

use std::collections::BTreeMap;

use dst_core::model::catalog::{self as cat, state_space};
use dst_core::model::{formulas, tables, Coating, CollectMode, FuelType, IwcMethod, ModelParams};
use dst_core::{query, LockSet, ModelBundle, StateSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Oracle {
    pub params: ModelParams,
    pub routes: Vec<String>,
}

impl Oracle {
    fn space(&self, id: &str) -> StateSpace {
        state_space(id, &self.routes)
    }
    fn mid(&self, id: &str, i: usize) -> f64 {
        self.space(id).midpoint(i).unwrap()
    }
    fn snap(&self, id: &str, x: f64) -> f64 {
        let s = self.space(id);
        s.midpoint(s.bin(x).unwrap()).unwrap()
    }
}

/// Expected utilities computed from the formulas and the source tables,
/// enumerating the few chance nodes between the locked decisions and each
/// utility.
pub fn closed_form(o: &Oracle, b: &ModelBundle, d: &BTreeMap<&str, usize>) -> BTreeMap<&'static str, f64> {
    let p = &o.params;
    let coating = Coating::ALL[d["CoatingType"]];
    let (time, iwc) = (d["TimeSinceCoating"], d["IWCtimes"]);
    let fuel = FuelType::ALL[d["FuelType"]];
    let mode = CollectMode::ALL[d["IWCcollect"]];
    let method = IwcMethod::ALL[d["IWCmethodPast"]];
    let ship = d["ShipType"];
    let route = &b.routes[d["Routes"]];
    let iwc_times = cat::IWC_TIMES_VALUES[iwc];
    let hours = o.mid(cat::ANNUAL_HOURS, d["AnnualHours"]);
    let theo = o.mid(cat::THEORETICAL_FUEL, d["TheoreticalFuel"]);
    let bf_avg = tables::biofouling_avg(coating, time, iwc);
    let bf_max = tables::biofouling_max(coating, time, iwc);
    let wsa: Vec<f64> = {
        let r = tables::wsa_rows()[ship];
        let s: f64 = r.iter().sum();
        r.iter().map(|x| x / s).collect()
    };
    let share = p.risk.niche_shares()[ship];
    let price = match fuel {
        FuelType::Heavy => p.econ.fuel_price_heavy,
        FuelType::Light => p.econ.fuel_price_light,
    };
    let factor = match fuel {
        FuelType::Heavy => p.emissions.co2_per_fuel_heavy,
        FuelType::Light => p.emissions.co2_per_fuel_light,
    };

    let mut out = BTreeMap::new();
    let mut fuel_h = 0.0;
    let mut co2_h = 0.0;
    for (bf, pb) in bf_avg.iter().enumerate() {
        let real = o.snap(cat::FUEL_REAL, theo * (1.0 + p.drag.fuel_increase[bf]));
        fuel_h += pb * real / 1000.0 * price;
        co2_h += pb * o.snap(cat::CO2_HR, real * factor);
    }
    out.insert("FuelCostHour", -fuel_h);
    out.insert("FuelCostYear", -fuel_h * hours);
    out.insert("CO2Hour", -co2_h);
    out.insert("CO2Year", -co2_h * hours);

    let off_days = [0.0, 1.0, 2.0][d["OffHire"]];
    let mut iwc_cost = 0.0;
    let mut coat_cost = 0.0;
    let mut eco = 0.0;
    for (w, pw) in wsa.iter().enumerate() {
        let a = o.mid(cat::WSA, w);
        if mode != CollectMode::NoIwc {
            let surcharge = if mode == CollectMode::Collect { 1.5 } else { 1.0 };
            iwc_cost -= pw * (3.0 * surcharge * 0.4 * a * 1e6 * iwc_times + 20_000.0 * off_days * iwc_times);
        }
        let unit = match coating {
            Coating::Hard => 30.0,
            Coating::Biocidal => 20.0,
            Coating::FoulingRelease => 50.0,
        };
        coat_cost -= pw * unit * a * 1e6 / 5.0;
        let kg = if coating == Coating::Biocidal {
            let peak = if method == IwcMethod::Soft { 12.0 } else { 25.0 };
            (7.0 * a * 1e10 * (365.0 - 7.0 * iwc_times) + peak * a * 1e10 * 7.0 * iwc_times) * 1e-9
        } else {
            0.0
        };
        eco -= pw * o.snap(cat::ECOTOX_PRESSURE, kg);
    }
    out.insert("IWCCost", iwc_cost);
    out.insert("CoatingCost", coat_cost);
    out.insert("EcotoxRisk", eco);

    let nis = &b.nis[&route.id];
    let nis_states = o.space(cat::NIS_VALUE);
    let mult = formulas::collect_multiplier(mode, &p.risk);
    let mut nis_risk = 0.0;
    for (w, pw) in wsa.iter().enumerate() {
        let hm2 = o.mid(cat::WSA, w) * 100.0;
        let hull = o.snap(cat::WSA_NO_NICHE, hm2 * (1.0 - share));
        let niche = o.snap(cat::NICHE_AREAS, hm2 * share);
        for (k, pk) in nis.mapped.iter().enumerate() {
            if *pk == 0.0 {
                continue;
            }
            let n = nis_states.value(k).unwrap();
            for (m, pm) in bf_max.iter().enumerate() {
                if *pm == 0.0 {
                    continue;
                }
                let nstm = o.mid(cat::BIOFOULING_MAX, m);
                let prw = o.snap(cat::POTENTIAL_RISK_WSA, n * nstm * hull);
                let prn = o.snap(cat::POTENTIAL_RISK_NICHE, n * nstm * niche * 2.6);
                let ft = tables::fouling_type(m);
                let weight = ft[0] * p.risk.fouling_weight_soft + ft[1] * p.risk.fouling_weight_hard;
                nis_risk -= pw * pk * pm * p.risk.nis_risk_scale * (prw + prn) * mult * weight;
            }
        }
    }
    out.insert("NISRisk", nis_risk);
    let high = b.sediment[&route.id] == cat::SedimentClass::High;
    out.insert(
        "SedimentRisk",
        match (coating, high) {
            (Coating::Biocidal, false) => -50.0,
            (Coating::Biocidal, true) => -100.0,
            _ => 0.0,
        },
    );
    out
}

impl Oracle {
    pub fn for_bundle(b: &ModelBundle) -> Self {
        Oracle {
            params: b.params.clone(),
            routes: b.routes.iter().map(|r| r.id.clone()).collect(),
        }
    }
}

/// Locks every decision at random `n` times and compares each consistent
/// scenario with the closed forms. Returns the number of scenarios checked
/// and the largest relative error.
pub fn check_random_full_locks(b: &ModelBundle, n: usize, seed: u64, tol: f64) -> Result<(usize, f64), String> {
    let net = &b.network;
    let o = Oracle::for_bundle(b);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    let mut worst = 0.0f64;
    for _ in 0..n {
        let mut locks = LockSet::new();
        let mut states = BTreeMap::new();
        for d in net.decision_ids() {
            let v = net.variable(d);
            let s = rng.random_range(0..v.card());
            locks.insert(v.id.clone(), v.states.label(s));
            states.insert(cat::node_spec(&v.id).unwrap().id, s);
        }
        let res = query(net, &locks).map_err(|e| e.to_string())?;
        let route = &b.routes[states["Routes"]];
        if route.ice && states["CoatingType"] == 2 {
            if res.consistent {
                return Err(format!("{locks:?} should be inconsistent"));
            }
            continue;
        }
        let expect = closed_form(&o, b, &states);
        for (u, e) in &expect {
            let got = res.utilities[*u];
            let rel = (got - e).abs() / e.abs().max(1.0);
            worst = worst.max(rel);
            if rel > tol {
                return Err(format!("{u}: {got} vs {e} for {locks:?}"));
            }
        }
        checked += 1;
    }
    Ok((checked, worst))
}
