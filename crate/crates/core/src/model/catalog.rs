//! Node identifiers, state spaces and parent lists of the biofouling model.

use crate::factor::{StateSpace, VariableKind};

pub const SHIP_TYPE: &str = "ShipType";
pub const THEORETICAL_FUEL: &str = "TheoreticalFuel";
pub const FUEL_TYPE: &str = "FuelType";
pub const ANNUAL_HOURS: &str = "AnnualHours";
pub const ROUTES: &str = "Routes";
pub const TIME_SINCE_COATING: &str = "TimeSinceCoating";
pub const COATING_TYPE: &str = "CoatingType";
pub const IWC_TIMES: &str = "IWCtimes";
pub const IWC_METHOD_PAST: &str = "IWCmethodPast";
pub const OFF_HIRE: &str = "OffHire";
pub const IWC_COLLECT: &str = "IWCcollect";

pub const BIOFOULING_AVG: &str = "BiofoulingAvg";
pub const BIOFOULING_MAX: &str = "BiofoulingMax";
pub const WSA: &str = "WSA";
pub const WSA_NO_NICHE: &str = "WSAnoNiche";
pub const NICHE_AREAS: &str = "NicheAreas";
pub const FUEL_REAL: &str = "FuelReal";
pub const CO2_HR: &str = "CO2hr";
pub const FOULING_TYPE: &str = "FoulingType";
pub const NIS_VALUE: &str = "NISvalue";
pub const POTENTIAL_RISK_WSA: &str = "PotentialRiskWSA";
pub const POTENTIAL_RISK_NICHE: &str = "PotentialRiskNiche";
pub const COPPER_EMISSION: &str = "CopperEmission";
pub const ECOTOX_PRESSURE: &str = "EcotoxPressure";
pub const SEDIMENT_CU: &str = "SedimentCu";

pub const U_FUEL_COST_HOUR: &str = "FuelCostHour";
pub const U_FUEL_COST_YEAR: &str = "FuelCostYear";
pub const U_CO2_HOUR: &str = "CO2Hour";
pub const U_CO2_YEAR: &str = "CO2Year";
pub const U_IWC_COST: &str = "IWCCost";
pub const U_COATING_COST: &str = "CoatingCost";
pub const U_NIS_RISK: &str = "NISRisk";
pub const U_ECOTOX_RISK: &str = "EcotoxRisk";
pub const U_SEDIMENT_RISK: &str = "SedimentRisk";

pub const SHIP_TYPES: [&str; 6] = ["bulker", "container", "general cargo", "passenger", "RoRo", "tanker"];
pub const COATINGS: [&str; 3] = ["hard", "biocidal", "fouling-release"];
pub const COLLECT_MODES: [&str; 3] = ["IWC+no-collect", "IWC+collect", "no-IWC"];
pub const IWC_TIMES_VALUES: [f64; 4] = [0.0, 2.0, 6.0, 12.0];
pub const OFF_HIRE_DAYS: [f64; 3] = [0.0, 1.0, 2.0];
pub const NSTM_BOUNDS: [f64; 7] = [0.0, 10.0, 20.0, 30.0, 40.0, 50.0, 100.0];
pub const WSA_BOUNDS_KM2: [f64; 13] = [
    0.0, 5e-4, 0.001, 0.005, 0.01, 0.02, 0.04, 0.06, 0.08, 0.1, 0.2, 1.0, 1.04,
];

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Coating {
    Hard,
    Biocidal,
    FoulingRelease,
}

impl Coating {
    pub const ALL: [Coating; 3] = [Coating::Hard, Coating::Biocidal, Coating::FoulingRelease];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        COATINGS[self.index()]
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum CollectMode {
    NoCollect,
    Collect,
    NoIwc,
}

impl CollectMode {
    pub const ALL: [CollectMode; 3] = [CollectMode::NoCollect, CollectMode::Collect, CollectMode::NoIwc];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        COLLECT_MODES[self.index()]
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum IwcMethod {
    Soft,
    Hard,
}

impl IwcMethod {
    pub const ALL: [IwcMethod; 2] = [IwcMethod::Soft, IwcMethod::Hard];
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum FuelType {
    Light,
    Heavy,
}

impl FuelType {
    pub const ALL: [FuelType; 2] = [FuelType::Light, FuelType::Heavy];
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum FoulingType {
    Soft,
    Hard,
}

impl FoulingType {
    pub const ALL: [FoulingType; 2] = [FoulingType::Soft, FoulingType::Hard];
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SedimentClass {
    Low,
    High,
}

/// Static description of one chance or decision node.
pub struct NodeSpec {
    pub id: &'static str,
    pub name: &'static str,
    pub kind: VariableKind,
    pub parents: &'static [&'static str],
    pub units: Option<&'static str>,
}

/// Static description of one utility node.
pub struct UtilitySpec {
    pub id: &'static str,
    pub name: &'static str,
    pub parents: &'static [&'static str],
    pub units: &'static str,
}

use VariableKind::{Chance, Decision};

pub const NODES: [NodeSpec; 25] = [
    NodeSpec {
        id: SHIP_TYPE,
        name: "Ship type",
        kind: Decision,
        parents: &[],
        units: None,
    },
    NodeSpec {
        id: THEORETICAL_FUEL,
        name: "Theoretical fuel consumption kg/h",
        kind: Decision,
        parents: &[],
        units: Some("kg/h"),
    },
    NodeSpec {
        id: FUEL_TYPE,
        name: "Fuel type",
        kind: Decision,
        parents: &[],
        units: None,
    },
    NodeSpec {
        id: ANNUAL_HOURS,
        name: "Annual shipping hours",
        kind: Decision,
        parents: &[],
        units: Some("h/year"),
    },
    NodeSpec {
        id: ROUTES,
        name: "Routes",
        kind: Decision,
        parents: &[],
        units: None,
    },
    NodeSpec {
        id: TIME_SINCE_COATING,
        name: "Time since coating (years)",
        kind: Decision,
        parents: &[],
        units: Some("years"),
    },
    NodeSpec {
        id: COATING_TYPE,
        name: "Coating type",
        kind: Decision,
        parents: &[ROUTES],
        units: None,
    },
    NodeSpec {
        id: IWC_TIMES,
        name: "In-water cleaning times/growing season",
        kind: Decision,
        parents: &[],
        units: Some("cleanings"),
    },
    NodeSpec {
        id: IWC_METHOD_PAST,
        name: "In-water cleaning method (in the past)",
        kind: Decision,
        parents: &[],
        units: None,
    },
    NodeSpec {
        id: OFF_HIRE,
        name: "Off hire costs (days)",
        kind: Decision,
        parents: &[],
        units: Some("days"),
    },
    NodeSpec {
        id: IWC_COLLECT,
        name: "In-water cleaning and collecting in the destination port",
        kind: Decision,
        parents: &[],
        units: None,
    },
    NodeSpec {
        id: BIOFOULING_AVG,
        name: "Biofouling pressure NSTM average",
        kind: Chance,
        parents: &[COATING_TYPE, TIME_SINCE_COATING, IWC_TIMES],
        units: Some("NSTM"),
    },
    NodeSpec {
        id: BIOFOULING_MAX,
        name: "Biofouling pressure NSTM maximum",
        kind: Chance,
        parents: &[COATING_TYPE, TIME_SINCE_COATING, IWC_TIMES],
        units: Some("NSTM"),
    },
    NodeSpec {
        id: WSA,
        name: "Wetted surface area (WSA)",
        kind: Chance,
        parents: &[SHIP_TYPE],
        units: Some("km2"),
    },
    NodeSpec {
        id: WSA_NO_NICHE,
        name: "WSA without niche",
        kind: Chance,
        parents: &[WSA, SHIP_TYPE],
        units: Some("hm2"),
    },
    NodeSpec {
        id: NICHE_AREAS,
        name: "Niche areas hm2",
        kind: Chance,
        parents: &[WSA, SHIP_TYPE],
        units: Some("hm2"),
    },
    NodeSpec {
        id: FUEL_REAL,
        name: "Fuel consumption real kg/h",
        kind: Chance,
        parents: &[THEORETICAL_FUEL, BIOFOULING_AVG],
        units: Some("kg/h"),
    },
    NodeSpec {
        id: CO2_HR,
        name: "Air emissions (CO2) kg/h",
        kind: Chance,
        parents: &[FUEL_REAL, FUEL_TYPE],
        units: Some("kg/h"),
    },
    NodeSpec {
        id: FOULING_TYPE,
        name: "Fouling type",
        kind: Chance,
        parents: &[BIOFOULING_MAX],
        units: None,
    },
    NodeSpec {
        id: NIS_VALUE,
        name: "NIS value",
        kind: Chance,
        parents: &[ROUTES],
        units: Some("species"),
    },
    NodeSpec {
        id: POTENTIAL_RISK_WSA,
        name: "Potential risk in WSA (without niche areas)",
        kind: Chance,
        parents: &[NIS_VALUE, WSA_NO_NICHE, BIOFOULING_MAX],
        units: None,
    },
    NodeSpec {
        id: POTENTIAL_RISK_NICHE,
        name: "Potential risk in niche areas",
        kind: Chance,
        parents: &[NICHE_AREAS, NIS_VALUE, BIOFOULING_MAX],
        units: None,
    },
    NodeSpec {
        id: COPPER_EMISSION,
        name: "Copper emissions ug/cm2/day",
        kind: Chance,
        parents: &[COATING_TYPE],
        units: Some("ug/cm2/day"),
    },
    NodeSpec {
        id: ECOTOX_PRESSURE,
        name: "Ecotoxicological pressure kg/year",
        kind: Chance,
        parents: &[IWC_METHOD_PAST, IWC_TIMES, COPPER_EMISSION, WSA],
        units: Some("kg/year"),
    },
    NodeSpec {
        id: SEDIMENT_CU,
        name: "Sediment copper concentration",
        kind: Chance,
        parents: &[ROUTES],
        units: None,
    },
];

pub const UTILITIES: [UtilitySpec; 9] = [
    UtilitySpec {
        id: U_FUEL_COST_HOUR,
        name: "Fuel costs EUR/h",
        parents: &[FUEL_REAL, FUEL_TYPE],
        units: "EUR/h",
    },
    UtilitySpec {
        id: U_FUEL_COST_YEAR,
        name: "Fuel costs EUR/year",
        parents: &[FUEL_REAL, FUEL_TYPE, ANNUAL_HOURS],
        units: "EUR/year",
    },
    UtilitySpec {
        id: U_CO2_HOUR,
        name: "CO2 emissions kg/h",
        parents: &[CO2_HR],
        units: "kg/h",
    },
    UtilitySpec {
        id: U_CO2_YEAR,
        name: "CO2 emissions kg/year",
        parents: &[ANNUAL_HOURS, CO2_HR],
        units: "kg/year",
    },
    UtilitySpec {
        id: U_IWC_COST,
        name: "In-water cleaning costs EUR/year",
        parents: &[IWC_TIMES, WSA, OFF_HIRE, IWC_COLLECT],
        units: "EUR/year",
    },
    UtilitySpec {
        id: U_COATING_COST,
        name: "Coating costs EUR/year",
        parents: &[WSA, COATING_TYPE],
        units: "EUR/year",
    },
    UtilitySpec {
        id: U_NIS_RISK,
        name: "NIS introduction risk/arrival",
        parents: &[POTENTIAL_RISK_WSA, POTENTIAL_RISK_NICHE, IWC_COLLECT, FOULING_TYPE],
        units: "risk score",
    },
    UtilitySpec {
        id: U_ECOTOX_RISK,
        name: "Ecotoxicological risk kg/year",
        parents: &[ECOTOX_PRESSURE],
        units: "kg/year",
    },
    UtilitySpec {
        id: U_SEDIMENT_RISK,
        name: "Sediment eco-toxicological risk",
        parents: &[SEDIMENT_CU, COATING_TYPE],
        units: "risk score",
    },
];

fn steps(start: f64, end: f64, step: f64) -> Vec<f64> {
    let n = ((end - start) / step).round() as usize;
    (0..=n).map(|i| start + step * i as f64).collect()
}

/// State space of a node. `routes` supplies the labels of the route node.
pub fn state_space(id: &str, routes: &[String]) -> StateSpace {
    match id {
        SHIP_TYPE => StateSpace::labeled(SHIP_TYPES),
        THEORETICAL_FUEL => StateSpace::Interval(steps(1000.0, 5000.0, 1000.0)),
        FUEL_TYPE => StateSpace::labeled(["light", "heavy"]),
        ANNUAL_HOURS => {
            let mut b = steps(1000.0, 8000.0, 1000.0);
            b.push(8760.0);
            StateSpace::Interval(b)
        }
        ROUTES => StateSpace::Labeled(routes.to_vec()),
        TIME_SINCE_COATING => StateSpace::Numbered(vec![0.0, 1.0, 2.0, 3.0, 4.0]),
        COATING_TYPE => StateSpace::labeled(COATINGS),
        IWC_TIMES => StateSpace::Numbered(IWC_TIMES_VALUES.to_vec()),
        IWC_METHOD_PAST => StateSpace::labeled(["soft", "hard"]),
        OFF_HIRE => StateSpace::labeled(["none", "1 day", "2 days"]),
        IWC_COLLECT => StateSpace::labeled(COLLECT_MODES),
        BIOFOULING_AVG | BIOFOULING_MAX => StateSpace::Interval(NSTM_BOUNDS.to_vec()),
        WSA => StateSpace::Interval(WSA_BOUNDS_KM2.to_vec()),
        WSA_NO_NICHE => StateSpace::Interval(steps(0.0, 100.0, 5.0)),
        NICHE_AREAS => StateSpace::Interval(steps(0.0, 30.0, 2.0)),
        FUEL_REAL => StateSpace::Interval(steps(1000.0, 7000.0, 1000.0)),
        CO2_HR => {
            let mut b = steps(2000.0, 6000.0, 1000.0);
            b.extend(steps(8000.0, 24000.0, 2000.0));
            StateSpace::Interval(b)
        }
        FOULING_TYPE => StateSpace::labeled(["soft", "hard"]),
        NIS_VALUE => StateSpace::Numbered(crate::nis::NIS_STATES.to_vec()),
        POTENTIAL_RISK_WSA => StateSpace::Interval(risk_bounds(55000.0)),
        POTENTIAL_RISK_NICHE => StateSpace::Interval(risk_bounds(45000.0)),
        COPPER_EMISSION => StateSpace::Numbered(vec![0.0, 7.0]),
        ECOTOX_PRESSURE => {
            let mut b = vec![0.0, 0.0, 25.0, 50.0, 100.0, 500.0, 1000.0, 5000.0];
            b.extend(steps(10000.0, 45000.0, 5000.0));
            StateSpace::Interval(b)
        }
        SEDIMENT_CU => StateSpace::labeled(["low", "high"]),
        other => panic!("unknown node {other}"),
    }
}

fn risk_bounds(top: f64) -> Vec<f64> {
    let mut b = vec![0.0, 25.0, 50.0, 100.0, 500.0, 1000.0, 5000.0];
    b.extend(steps(10000.0, top, 5000.0));
    b
}

pub fn node_spec(id: &str) -> Option<&'static NodeSpec> {
    NODES.iter().find(|n| n.id == id)
}
