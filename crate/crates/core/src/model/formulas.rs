//! Closed-form cost, emission and risk formulas behind the tables.

use super::catalog::{Coating, CollectMode, FoulingType, FuelType, IwcMethod, SedimentClass};
use super::params::{DragModel, EconParams, EmissionParams, RiskParams};

pub const M2_PER_KM2: f64 = 1e6;
pub const CM2_PER_KM2: f64 = 1e10;
const UG_TO_KG: f64 = 1e-9;
const DAYS_PER_YEAR: f64 = 365.0;

/// Copper released to seawater, kg/year.
pub fn ecotox_pressure_value(
    wsa_km2: f64,
    coating: Coating,
    iwc_times: f64,
    method: IwcMethod,
    p: &EmissionParams,
) -> f64 {
    if coating != Coating::Biocidal {
        return 0.0;
    }
    copper_release(wsa_km2, p.baseline_cu_flux, iwc_times, method, p)
}

/// Same as [`ecotox_pressure_value`] with the baseline flux given directly;
/// a zero flux means no copper source.
pub fn copper_release(wsa_km2: f64, flux: f64, iwc_times: f64, method: IwcMethod, p: &EmissionParams) -> f64 {
    if flux <= 0.0 {
        return 0.0;
    }
    let area = wsa_km2 * CM2_PER_KM2;
    let peak = match method {
        IwcMethod::Soft => p.peak_cu_flux_soft,
        IwcMethod::Hard => p.peak_cu_flux_hard,
    };
    let peak_days = p.peak_days * iwc_times;
    (flux * area * (DAYS_PER_YEAR - peak_days) + peak * area * peak_days) * UG_TO_KG
}

/// In-water cleaning cost as a utility, EUR/year.
pub fn iwc_cost_value(wsa_km2: f64, iwc_times: f64, mode: CollectMode, off_hire_days: f64, e: &EconParams) -> f64 {
    let surcharge = match mode {
        CollectMode::NoIwc => return 0.0,
        CollectMode::Collect => 1.0 + e.collect_surcharge,
        CollectMode::NoCollect => 1.0,
    };
    let cleaning = e.iwc_price_per_m2 * surcharge * e.cleaned_fraction_of_wsa * wsa_km2 * M2_PER_KM2 * iwc_times;
    let off_hire = e.off_hire_per_day * off_hire_days * iwc_times;
    0.0 - (cleaning + off_hire)
}

pub fn coating_price(coating: Coating, e: &EconParams) -> f64 {
    match coating {
        Coating::Hard => e.coating_cost_hard,
        Coating::Biocidal => e.coating_cost_biocidal,
        Coating::FoulingRelease => e.coating_cost_fouling_release,
    }
}

/// Coating cost spread over the coating life, as a utility, EUR/year.
pub fn coating_cost_value(wsa_km2: f64, coating: Coating, e: &EconParams) -> f64 {
    0.0 - coating_price(coating, e) * wsa_km2 * M2_PER_KM2 / e.coating_life_years
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FuelChain {
    pub real_fuel: f64,
    pub co2_per_hour: f64,
    pub fuel_cost_per_year: f64,
    pub co2_per_year: f64,
}

pub fn co2_factor(fuel: FuelType, p: &EmissionParams) -> f64 {
    match fuel {
        FuelType::Heavy => p.co2_per_fuel_heavy,
        FuelType::Light => p.co2_per_fuel_light,
    }
}

pub fn fuel_price(fuel: FuelType, e: &EconParams) -> f64 {
    match fuel {
        FuelType::Heavy => e.fuel_price_heavy,
        FuelType::Light => e.fuel_price_light,
    }
}

/// Fuel burnt, CO2 emitted and their yearly totals, as positive magnitudes.
pub fn fuel_chain_values(
    theoretical: f64,
    nstm_bin: usize,
    fuel: FuelType,
    annual_hours: f64,
    drag: &DragModel,
    p: &EmissionParams,
    e: &EconParams,
) -> FuelChain {
    let real_fuel = theoretical * (1.0 + drag.fuel_increase[nstm_bin]);
    let co2_per_hour = real_fuel * co2_factor(fuel, p);
    FuelChain {
        real_fuel,
        co2_per_hour,
        fuel_cost_per_year: fuel_cost_per_hour(real_fuel, fuel, e) * annual_hours,
        co2_per_year: co2_per_hour * annual_hours,
    }
}

/// Fuel cost of one hour, EUR; `kg_per_hour` is the fuel burnt.
pub fn fuel_cost_per_hour(kg_per_hour: f64, fuel: FuelType, e: &EconParams) -> f64 {
    kg_per_hour / 1000.0 * fuel_price(fuel, e)
}

/// Potential introduction risk of a hull part.
pub fn potential_risk_value(nis_value: f64, nstm: f64, area_hm2: f64, niche: bool, p: &EmissionParams) -> f64 {
    let m = if niche { p.niche_fouling_multiplier } else { 1.0 };
    nis_value * nstm * area_hm2 * m
}

pub fn collect_multiplier(mode: CollectMode, r: &RiskParams) -> f64 {
    match mode {
        CollectMode::Collect => r.nis_multiplier_collect,
        CollectMode::NoIwc => r.nis_multiplier_no_iwc,
        CollectMode::NoCollect => r.nis_multiplier_no_collect,
    }
}

/// NIS introduction risk per arrival as a utility.
pub fn nis_risk_value(risk_wsa: f64, risk_niche: f64, mode: CollectMode, fouling: FoulingType, r: &RiskParams) -> f64 {
    let w = match fouling {
        FoulingType::Soft => r.fouling_weight_soft,
        FoulingType::Hard => r.fouling_weight_hard,
    };
    0.0 - r.nis_risk_scale * (risk_wsa + risk_niche) * collect_multiplier(mode, r) * w
}

pub fn sediment_risk_value(class: SedimentClass, coating: Coating) -> f64 {
    match (coating, class) {
        (Coating::Biocidal, SedimentClass::Low) => -50.0,
        (Coating::Biocidal, SedimentClass::High) => -100.0,
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn copper_oracles() {
        let p = EmissionParams::default();
        let base = ecotox_pressure_value(0.01, Coating::Biocidal, 0.0, IwcMethod::Soft, &p);
        assert!((base - 255.5).abs() < 1e-9);
        let two = ecotox_pressure_value(0.01, Coating::Biocidal, 2.0, IwcMethod::Hard, &p);
        assert!((two - (255.5 - 9.8 + 35.0)).abs() < 1e-9);
        assert_eq!(
            ecotox_pressure_value(0.01, Coating::Hard, 2.0, IwcMethod::Hard, &p),
            0.0
        );
    }

    #[test]
    fn cost_oracles() {
        let e = EconParams::default();
        assert!((iwc_cost_value(0.01, 2.0, CollectMode::NoCollect, 0.0, &e) + 24_000.0).abs() < 1e-9);
        assert!((iwc_cost_value(0.01, 2.0, CollectMode::Collect, 0.0, &e) + 36_000.0).abs() < 1e-9);
        assert_eq!(iwc_cost_value(0.01, 0.0, CollectMode::Collect, 2.0, &e), 0.0);
        assert_eq!(iwc_cost_value(0.01, 6.0, CollectMode::NoIwc, 2.0, &e), 0.0);
        assert!((coating_cost_value(0.01, Coating::Hard, &e) + 60_000.0).abs() < 1e-9);
        assert!((coating_cost_value(0.01, Coating::Biocidal, &e) + 40_000.0).abs() < 1e-9);
        assert!((coating_cost_value(0.01, Coating::FoulingRelease, &e) + 100_000.0).abs() < 1e-9);
    }

    #[test]
    fn fuel_chain() {
        let f = fuel_chain_values(
            3000.0,
            0,
            FuelType::Heavy,
            1.0,
            &DragModel::default(),
            &EmissionParams::default(),
            &EconParams::default(),
        );
        assert!((f.real_fuel - 3060.0).abs() < 1e-9);
        assert!((f.co2_per_hour - 3060.0 * 3.114).abs() < 1e-9);
    }

    #[test]
    fn potential_risk() {
        let p = EmissionParams::default();
        assert_eq!(potential_risk_value(1.0, 5.0, 2.0, false, &p), 10.0);
        assert!((potential_risk_value(1.0, 5.0, 2.0, true, &p) - 26.0).abs() < 1e-12);
    }
}
