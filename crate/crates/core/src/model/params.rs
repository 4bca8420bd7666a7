//! Model parameters and their flat key-value files.
//!
//! Every file is TOML with one `key = value` per line. Keys that are
//! missing from a file keep their default; unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EconParams {
    /// EUR per m2, application included.
    pub coating_cost_hard: f64,
    pub coating_cost_biocidal: f64,
    pub coating_cost_fouling_release: f64,
    pub application_included: bool,
    pub coating_life_years: f64,
    pub iwc_price_per_m2: f64,
    pub cleaned_fraction_of_wsa: f64,
    pub collect_surcharge: f64,
    pub off_hire_per_day: f64,
    /// EUR per tonne of fuel.
    pub fuel_price_light: f64,
    pub fuel_price_heavy: f64,
}

impl Default for EconParams {
    fn default() -> Self {
        EconParams {
            coating_cost_hard: 30.0,
            coating_cost_biocidal: 20.0,
            coating_cost_fouling_release: 50.0,
            application_included: true,
            coating_life_years: 5.0,
            iwc_price_per_m2: 3.0,
            cleaned_fraction_of_wsa: 0.4,
            collect_surcharge: 0.5,
            off_hire_per_day: 20_000.0,
            fuel_price_light: 650.0,
            fuel_price_heavy: 450.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmissionParams {
    /// ug/cm2/day released by a biocidal coating.
    pub baseline_cu_flux: f64,
    /// ug/cm2/day during the days after a cleaning with soft brushes.
    pub peak_cu_flux_soft: f64,
    pub peak_cu_flux_hard: f64,
    pub peak_days: f64,
    /// Tonnes of CO2 per tonne of fuel.
    pub co2_per_fuel_heavy: f64,
    pub co2_per_fuel_light: f64,
    pub niche_fouling_multiplier: f64,
    /// mg/kg; sediment copper at or above this is classed high.
    pub sediment_threshold: f64,
}

impl Default for EmissionParams {
    fn default() -> Self {
        EmissionParams {
            baseline_cu_flux: 7.0,
            peak_cu_flux_soft: 12.0,
            peak_cu_flux_hard: 25.0,
            peak_days: 7.0,
            co2_per_fuel_heavy: 3.114,
            co2_per_fuel_light: 3.206,
            niche_fouling_multiplier: 2.6,
            sediment_threshold: 52.0,
        }
    }
}

/// Fractional fuel increase per average-fouling interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DragModel {
    pub fuel_increase: Vec<f64>,
}

impl Default for DragModel {
    fn default() -> Self {
        DragModel {
            fuel_increase: vec![0.02, 0.04, 0.07, 0.11, 0.16, 0.25],
        }
    }
}

/// Ship geometry and NIS-risk weighting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RiskParams {
    /// Fraction of the wetted surface that is niche area, per ship type.
    pub niche_share_bulker: f64,
    pub niche_share_container: f64,
    pub niche_share_general_cargo: f64,
    pub niche_share_passenger: f64,
    pub niche_share_roro: f64,
    pub niche_share_tanker: f64,
    /// Converts summed potential risk into the NIS-risk utility.
    pub nis_risk_scale: f64,
    pub nis_multiplier_collect: f64,
    pub nis_multiplier_no_iwc: f64,
    pub nis_multiplier_no_collect: f64,
    pub fouling_weight_soft: f64,
    pub fouling_weight_hard: f64,
}

impl Default for RiskParams {
    fn default() -> Self {
        RiskParams {
            niche_share_bulker: 0.08,
            niche_share_container: 0.10,
            niche_share_general_cargo: 0.10,
            niche_share_passenger: 0.12,
            niche_share_roro: 0.13,
            niche_share_tanker: 0.07,
            nis_risk_scale: 0.01463,
            nis_multiplier_collect: 0.25,
            nis_multiplier_no_iwc: 1.0,
            nis_multiplier_no_collect: 2.0,
            fouling_weight_soft: 1.0,
            fouling_weight_hard: 1.0,
        }
    }
}

impl RiskParams {
    /// Niche share per ship type, in ship-type state order.
    pub fn niche_shares(&self) -> [f64; 6] {
        [
            self.niche_share_bulker,
            self.niche_share_container,
            self.niche_share_general_cargo,
            self.niche_share_passenger,
            self.niche_share_roro,
            self.niche_share_tanker,
        ]
    }
}

/// All numeric inputs of the biofouling model.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub econ: EconParams,
    pub emissions: EmissionParams,
    pub drag: DragModel,
    pub risk: RiskParams,
}

impl ModelParams {
    pub fn check(&self) -> Result<(), ModelError> {
        let e = &self.econ;
        let positive = [
            e.coating_cost_hard,
            e.coating_cost_biocidal,
            e.coating_cost_fouling_release,
            e.coating_life_years,
            e.iwc_price_per_m2,
            e.cleaned_fraction_of_wsa,
            e.off_hire_per_day,
            e.fuel_price_light,
            e.fuel_price_heavy,
            self.emissions.baseline_cu_flux,
            self.emissions.co2_per_fuel_heavy,
            self.emissions.co2_per_fuel_light,
            self.emissions.sediment_threshold,
            self.risk.nis_risk_scale,
        ];
        let fail = |m: &str| Err(ModelError::Validation(m.to_string()));
        if positive.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return fail("economic and emission parameters must be positive");
        }
        if !(0.0..=1.0).contains(&e.collect_surcharge) {
            return fail("collect_surcharge must lie in [0, 1]");
        }
        let m = &self.emissions;
        if m.peak_cu_flux_soft < m.baseline_cu_flux || m.peak_cu_flux_hard < m.baseline_cu_flux {
            return fail("peak copper flux must not be below the baseline");
        }
        if m.niche_fouling_multiplier < 1.0 {
            return fail("niche_fouling_multiplier must be at least 1");
        }
        let d = &self.drag.fuel_increase;
        if d.len() != 6 || d.windows(2).any(|w| w[0] > w[1]) || !(0.02..=0.04).contains(&d[0]) {
            return fail("drag map needs 6 nondecreasing values starting in [0.02, 0.04]");
        }
        let r = &self.risk;
        if r.niche_shares().iter().any(|s| !(0.0..1.0).contains(s)) {
            return fail("niche shares must lie in [0, 1)");
        }
        if !(0.0 < r.nis_multiplier_collect
            && r.nis_multiplier_collect < r.nis_multiplier_no_iwc
            && r.nis_multiplier_no_iwc < r.nis_multiplier_no_collect)
        {
            return fail("NIS multipliers must satisfy 0 < collect < no-IWC < no-collect");
        }
        if !(r.fouling_weight_soft > 0.0 && r.fouling_weight_hard > 0.0) {
            return fail("fouling weights must be positive");
        }
        Ok(())
    }
}

pub(crate) fn parse_toml<T: for<'de> Deserialize<'de>>(text: &str, origin: &str) -> Result<T, ModelError> {
    toml::from_str(text).map_err(|e| ModelError::Parse {
        path: origin.to_string(),
        line: e
            .span()
            .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
            .unwrap_or(0),
        reason: e.message().to_string(),
    })
}

pub(crate) fn read_toml<T: for<'de> Deserialize<'de> + Default>(path: &Path) -> Result<T, ModelError> {
    if !path.exists() {
        return Ok(T::default());
    }
    let text = std::fs::read_to_string(path).map_err(|e| ModelError::io(path, e))?;
    parse_toml(&text, &path.display().to_string())
}

/// Parameter file bodies with provenance comments.
pub fn econ_file(p: &EconParams) -> String {
    format!(
        "# Cost parameters. EUR unless noted.\n\
         # Coating prices per m2 include the 2 EUR/m2 application cost.\n\
         coating_cost_hard = {:?}\n\
         coating_cost_biocidal = {:?}\n\
         coating_cost_fouling_release = {:?}\n\
         application_included = {}\n\
         coating_life_years = {:?}\n\
         iwc_price_per_m2 = {:?}\n\
         cleaned_fraction_of_wsa = {:?}\n\
         collect_surcharge = {:?}\n\
         off_hire_per_day = {:?}\n\
         # source: assumption (EUR per tonne)\n\
         fuel_price_light = {:?}\n\
         # source: assumption (EUR per tonne)\n\
         fuel_price_heavy = {:?}\n",
        p.coating_cost_hard,
        p.coating_cost_biocidal,
        p.coating_cost_fouling_release,
        p.application_included,
        p.coating_life_years,
        p.iwc_price_per_m2,
        p.cleaned_fraction_of_wsa,
        p.collect_surcharge,
        p.off_hire_per_day,
        p.fuel_price_light,
        p.fuel_price_heavy,
    )
}

pub fn emissions_file(p: &EmissionParams) -> String {
    format!(
        "# Copper release (ug/cm2/day), CO2 factors and thresholds.\n\
         baseline_cu_flux = {:?}\n\
         peak_cu_flux_soft = {:?}\n\
         peak_cu_flux_hard = {:?}\n\
         peak_days = {:?}\n\
         # source: assumption (t CO2 per t fuel, roughly threefold)\n\
         co2_per_fuel_heavy = {:?}\n\
         # source: assumption (t CO2 per t fuel, roughly threefold)\n\
         co2_per_fuel_light = {:?}\n\
         niche_fouling_multiplier = {:?}\n\
         sediment_threshold = {:?}\n",
        p.baseline_cu_flux,
        p.peak_cu_flux_soft,
        p.peak_cu_flux_hard,
        p.peak_days,
        p.co2_per_fuel_heavy,
        p.co2_per_fuel_light,
        p.niche_fouling_multiplier,
        p.sediment_threshold,
    )
}

pub fn drag_file(p: &DragModel) -> String {
    format!(
        "# Fractional fuel increase per average fouling interval\n\
         # (0-10, 10-20, 20-30, 30-40, 40-50, 50-100 NSTM).\n\
         # Only the first value is measured (2-4 % shortly after cleaning).\n\
         # source: assumption (values beyond the first interval)\n\
         fuel_increase = {:?}\n",
        p.fuel_increase
    )
}

pub fn risk_file(p: &RiskParams) -> String {
    format!(
        "# Niche-area share of the wetted surface per ship type.\n\
         # source: assumption\n\
         niche_share_bulker = {:?}\n\
         # source: assumption\n\
         niche_share_container = {:?}\n\
         # source: assumption\n\
         niche_share_general_cargo = {:?}\n\
         # source: assumption\n\
         niche_share_passenger = {:?}\n\
         # source: assumption\n\
         niche_share_roro = {:?}\n\
         # source: assumption\n\
         niche_share_tanker = {:?}\n\
         # NIS risk = -scale * (potential risk hull + niche) * multiplier * weight\n\
         # source: assumption (scale calibrated on the tanker/route 2A example)\n\
         nis_risk_scale = {:?}\n\
         # source: assumption (expert ordering collect < no IWC < no collect)\n\
         nis_multiplier_collect = {:?}\n\
         # source: assumption\n\
         nis_multiplier_no_iwc = {:?}\n\
         # source: assumption\n\
         nis_multiplier_no_collect = {:?}\n\
         # source: assumption\n\
         fouling_weight_soft = {:?}\n\
         # source: assumption\n\
         fouling_weight_hard = {:?}\n",
        p.niche_share_bulker,
        p.niche_share_container,
        p.niche_share_general_cargo,
        p.niche_share_passenger,
        p.niche_share_roro,
        p.niche_share_tanker,
        p.nis_risk_scale,
        p.nis_multiplier_collect,
        p.nis_multiplier_no_iwc,
        p.nis_multiplier_no_collect,
        p.fouling_weight_soft,
        p.fouling_weight_hard,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn files_round_trip() {
        let p = ModelParams::default();
        assert_eq!(parse_toml::<EconParams>(&econ_file(&p.econ), "e").unwrap(), p.econ);
        assert_eq!(
            parse_toml::<EmissionParams>(&emissions_file(&p.emissions), "m").unwrap(),
            p.emissions
        );
        assert_eq!(parse_toml::<DragModel>(&drag_file(&p.drag), "d").unwrap(), p.drag);
        assert_eq!(parse_toml::<RiskParams>(&risk_file(&p.risk), "r").unwrap(), p.risk);
        p.check().unwrap();
    }

    #[test]
    fn partial_file_keeps_defaults_and_unknown_keys_fail() {
        let e: EconParams = parse_toml("fuel_price_heavy = 500.0\n", "e").unwrap();
        assert_eq!(e.fuel_price_heavy, 500.0);
        assert_eq!(e.coating_cost_hard, 30.0);
        match parse_toml::<EconParams>("\n\nbogus = 1\n", "econ.toml") {
            Err(ModelError::Parse { line, path, .. }) => {
                assert_eq!(path, "econ.toml");
                assert_eq!(line, 3);
            }
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn check_rejects_bad_values() {
        let mut p = ModelParams::default();
        p.risk.nis_multiplier_collect = 1.5;
        assert!(p.check().is_err());
        let mut p = ModelParams::default();
        p.drag.fuel_increase[2] = 0.01;
        assert!(p.check().is_err());
        let mut p = ModelParams::default();
        p.econ.collect_surcharge = 1.5;
        assert!(p.check().is_err());
    }
}
