//! Assembles the biofouling influence diagram from parameters and data.

use std::collections::BTreeMap;

use super::catalog::{self as cat, Coating, CollectMode, FoulingType, FuelType, IwcMethod, SedimentClass};
use super::formulas as f;
use super::params::ModelParams;
use super::routes::Route;
use super::tables;
use crate::error::ModelError;
use crate::factor::StateSpace;
use crate::network::{
    validate_network, ConstraintDoc, CptDoc, Network, NetworkDoc, UtilityNode, VariableDoc, NETWORK_FORMAT,
};
use crate::nis::RouteNisDistribution;

pub const ICE_REASON: &str =
    "fouling release coating does not resist ice friction; it can only be used on ice-free routes";

struct Spaces {
    routes: Vec<String>,
}

impl Spaces {
    fn get(&self, id: &str) -> StateSpace {
        cat::state_space(id, &self.routes)
    }

    fn mid(&self, id: &str, i: usize) -> f64 {
        self.get(id).midpoint(i).expect("interval or numbered node")
    }

    fn bin(&self, id: &str, x: f64) -> usize {
        self.get(id).bin(x).expect("numeric node")
    }

    fn point(&self, id: &str, x: f64) -> Vec<f64> {
        let mut v = vec![0.0; self.get(id).len()];
        v[self.bin(id, x)] = 1.0;
        v
    }
}

/// Calls `f` for every configuration of `parents` in row-major order (last
/// parent fastest) and concatenates the results.
fn tabulate(sp: &Spaces, parents: &[&str], mut f: impl FnMut(&[usize]) -> Vec<f64>) -> Vec<f64> {
    let cards: Vec<usize> = parents.iter().map(|p| sp.get(p).len()).collect();
    let total: usize = cards.iter().product();
    let mut out = Vec::new();
    let mut states = vec![0; cards.len()];
    for _ in 0..total {
        out.extend(f(&states));
        for k in (0..cards.len()).rev() {
            states[k] += 1;
            if states[k] < cards[k] {
                break;
            }
            states[k] = 0;
        }
    }
    out
}

fn coating(i: usize) -> Coating {
    Coating::ALL[i]
}

fn collect_mode(i: usize) -> CollectMode {
    CollectMode::ALL[i]
}

fn fuel_type(i: usize) -> FuelType {
    FuelType::ALL[i]
}

/// Builds and validates the network. `nis` must hold a distribution for
/// every route; `sediment` a class for every route.
pub fn build_network(
    params: &ModelParams,
    routes: &[Route],
    sediment: &BTreeMap<String, SedimentClass>,
    nis: &BTreeMap<String, RouteNisDistribution>,
) -> Result<Network, ModelError> {
    params.check()?;
    if routes.is_empty() {
        return Err(ModelError::Validation("route catalog is empty".into()));
    }
    for r in routes {
        if !nis.contains_key(&r.id) {
            return Err(ModelError::MissingRoute(r.id.clone()));
        }
        if !sediment.contains_key(&r.id) {
            return Err(ModelError::Validation(format!(
                "no sediment class for route `{}`",
                r.id
            )));
        }
    }
    let sp = Spaces {
        routes: routes.iter().map(|r| r.id.clone()).collect(),
    };
    let (emis, drag) = (&params.emissions, &params.drag);
    let shares = params.risk.niche_shares();

    let variables = cat::NODES
        .iter()
        .map(|n| VariableDoc {
            id: n.id.to_string(),
            name: n.name.to_string(),
            kind: n.kind,
            states: sp.get(n.id),
            parents: n.parents.iter().map(|p| p.to_string()).collect(),
            units: n.units.map(str::to_string),
        })
        .collect();

    let mut cpts = Vec::new();
    let mut add = |node: &str, data: Vec<f64>, reconstructed_columns: Vec<usize>, source: &str| {
        let spec = cat::node_spec(node).expect("catalog node");
        let mut scope: Vec<String> = spec.parents.iter().map(|p| p.to_string()).collect();
        scope.push(node.to_string());
        cpts.push(CptDoc {
            node: node.to_string(),
            scope,
            data,
            reconstructed: !reconstructed_columns.is_empty(),
            reconstructed_columns,
            source: Some(source.to_string()),
        });
    };

    let bf_parents = [cat::COATING_TYPE, cat::TIME_SINCE_COATING, cat::IWC_TIMES];
    let mut avg_rec = Vec::new();
    let mut max_rec = Vec::new();
    let mut col = 0;
    let avg = tabulate(&sp, &bf_parents, |s| {
        if tables::biofouling_avg_reconstructed(coating(s[0]), s[1], s[2]) {
            avg_rec.push(col);
        }
        if tables::biofouling_max_reconstructed(coating(s[0]), s[1], s[2]) {
            max_rec.push(col);
        }
        col += 1;
        tables::biofouling_avg(coating(s[0]), s[1], s[2]).to_vec()
    });
    let max = tabulate(&sp, &bf_parents, |s| {
        tables::biofouling_max(coating(s[0]), s[1], s[2]).to_vec()
    });
    add(
        cat::BIOFOULING_AVG,
        avg,
        avg_rec,
        "transcribed table; monotone degradation rule",
    );
    add(
        cat::BIOFOULING_MAX,
        max,
        max_rec,
        "anchored columns; average shifted one interval up elsewhere",
    );

    let wsa_rows = tables::wsa_rows();
    let wsa = tabulate(&sp, &[cat::SHIP_TYPE], |s| {
        let row = wsa_rows[s[0]];
        let sum: f64 = row.iter().sum();
        row.iter().map(|p| p / sum).collect()
    });
    add(cat::WSA, wsa, vec![], "transcribed port-call statistics");

    let spr = &sp;
    let hull = |share_of_niche: bool| {
        move |s: &[usize]| {
            let sp = spr;
            let hm2 = sp.mid(cat::WSA, s[0]) * 100.0;
            let share = shares[s[1]];
            if share_of_niche {
                sp.point(cat::NICHE_AREAS, hm2 * share)
            } else {
                sp.point(cat::WSA_NO_NICHE, hm2 * (1.0 - share))
            }
        }
    };
    add(
        cat::WSA_NO_NICHE,
        tabulate(&sp, &[cat::WSA, cat::SHIP_TYPE], hull(false)),
        vec![],
        "niche share rule",
    );
    add(
        cat::NICHE_AREAS,
        tabulate(&sp, &[cat::WSA, cat::SHIP_TYPE], hull(true)),
        vec![],
        "niche share rule",
    );

    let fuel = tabulate(&sp, &[cat::THEORETICAL_FUEL, cat::BIOFOULING_AVG], |s| {
        let theo = sp.mid(cat::THEORETICAL_FUEL, s[0]);
        sp.point(cat::FUEL_REAL, theo * (1.0 + drag.fuel_increase[s[1]]))
    });
    add(cat::FUEL_REAL, fuel, vec![], "drag map");

    let co2 = tabulate(&sp, &[cat::FUEL_REAL, cat::FUEL_TYPE], |s| {
        let kg = sp.mid(cat::FUEL_REAL, s[0]);
        sp.point(cat::CO2_HR, kg * f::co2_factor(fuel_type(s[1]), emis))
    });
    add(cat::CO2_HR, co2, vec![], "CO2 factor");

    let ft = tabulate(&sp, &[cat::BIOFOULING_MAX], |s| tables::fouling_type(s[0]).to_vec());
    add(cat::FOULING_TYPE, ft, vec![], "NSTM fouling classes");

    let nis_cpt = tabulate(&sp, &[cat::ROUTES], |s| nis[&sp.routes[s[0]]].mapped.clone());
    add(cat::NIS_VALUE, nis_cpt, vec![], "route NIS distribution");

    let prw = tabulate(&sp, &[cat::NIS_VALUE, cat::WSA_NO_NICHE, cat::BIOFOULING_MAX], |s| {
        let nis_value = sp.get(cat::NIS_VALUE).value(s[0]).expect("numbered");
        let v = f::potential_risk_value(
            nis_value,
            sp.mid(cat::BIOFOULING_MAX, s[2]),
            sp.mid(cat::WSA_NO_NICHE, s[1]),
            false,
            emis,
        );
        sp.point(cat::POTENTIAL_RISK_WSA, v)
    });
    add(cat::POTENTIAL_RISK_WSA, prw, vec![], "potential risk product");

    let prn = tabulate(&sp, &[cat::NICHE_AREAS, cat::NIS_VALUE, cat::BIOFOULING_MAX], |s| {
        let nis_value = sp.get(cat::NIS_VALUE).value(s[1]).expect("numbered");
        let v = f::potential_risk_value(
            nis_value,
            sp.mid(cat::BIOFOULING_MAX, s[2]),
            sp.mid(cat::NICHE_AREAS, s[0]),
            true,
            emis,
        );
        sp.point(cat::POTENTIAL_RISK_NICHE, v)
    });
    add(cat::POTENTIAL_RISK_NICHE, prn, vec![], "potential risk product");

    let cu = tabulate(&sp, &[cat::COATING_TYPE], |s| {
        let flux = if coating(s[0]) == Coating::Biocidal {
            emis.baseline_cu_flux
        } else {
            0.0
        };
        sp.point(cat::COPPER_EMISSION, flux)
    });
    add(cat::COPPER_EMISSION, cu, vec![], "biocidal coatings release copper");

    let eco = tabulate(
        &sp,
        &[cat::IWC_METHOD_PAST, cat::IWC_TIMES, cat::COPPER_EMISSION, cat::WSA],
        |s| {
            let method = IwcMethod::ALL[s[0]];
            let times = sp.get(cat::IWC_TIMES).value(s[1]).expect("numbered");
            let flux = sp.get(cat::COPPER_EMISSION).value(s[2]).expect("numbered");
            let kg = f::copper_release(sp.mid(cat::WSA, s[3]), flux, times, method, emis);
            sp.point(cat::ECOTOX_PRESSURE, kg)
        },
    );
    add(cat::ECOTOX_PRESSURE, eco, vec![], "copper release formula");

    let sed = tabulate(&sp, &[cat::ROUTES], |s| match sediment[&sp.routes[s[0]]] {
        SedimentClass::Low => vec![1.0, 0.0],
        SedimentClass::High => vec![0.0, 1.0],
    });
    add(cat::SEDIMENT_CU, sed, vec![], "route sediment classification");

    let utilities = cat::UTILITIES
        .iter()
        .map(|u| {
            let table = tabulate(&sp, u.parents, |s| vec![utility_value(&sp, params, u.id, s)]);
            UtilityNode {
                id: u.id.to_string(),
                name: u.name.to_string(),
                parent_ids: Vec::new(),
                parents: u.parents.iter().map(|p| p.to_string()).collect(),
                table,
                units: u.units.to_string(),
            }
        })
        .collect();

    let constraint = ConstraintDoc {
        node: cat::COATING_TYPE.to_string(),
        scope: vec![cat::ROUTES.to_string(), cat::COATING_TYPE.to_string()],
        data: tabulate(&sp, &[cat::ROUTES], |s| {
            let ice = routes[s[0]].ice;
            Coating::ALL
                .iter()
                .map(|c| if ice && *c == Coating::FoulingRelease { 0.0 } else { 1.0 })
                .collect()
        }),
        reason: ICE_REASON.to_string(),
    };

    let doc = NetworkDoc {
        format: NETWORK_FORMAT.to_string(),
        variables,
        cpts,
        constraints: vec![constraint],
        utilities,
    };
    let net = Network::from_doc(&doc)?;
    check_model(&net)?;
    Ok(net)
}

fn utility_value(sp: &Spaces, params: &ModelParams, id: &str, s: &[usize]) -> f64 {
    let (econ, risk) = (&params.econ, &params.risk);
    let value = |node: &str, i: usize| sp.get(node).value(i).expect("numbered");
    match id {
        cat::U_FUEL_COST_HOUR => 0.0 - f::fuel_cost_per_hour(sp.mid(cat::FUEL_REAL, s[0]), fuel_type(s[1]), econ),
        cat::U_FUEL_COST_YEAR => {
            0.0 - f::fuel_cost_per_hour(sp.mid(cat::FUEL_REAL, s[0]), fuel_type(s[1]), econ)
                * sp.mid(cat::ANNUAL_HOURS, s[2])
        }
        cat::U_CO2_HOUR => 0.0 - sp.mid(cat::CO2_HR, s[0]),
        cat::U_CO2_YEAR => 0.0 - sp.mid(cat::ANNUAL_HOURS, s[0]) * sp.mid(cat::CO2_HR, s[1]),
        cat::U_IWC_COST => f::iwc_cost_value(
            sp.mid(cat::WSA, s[1]),
            value(cat::IWC_TIMES, s[0]),
            collect_mode(s[3]),
            cat::OFF_HIRE_DAYS[s[2]],
            econ,
        ),
        cat::U_COATING_COST => f::coating_cost_value(sp.mid(cat::WSA, s[0]), coating(s[1]), econ),
        cat::U_NIS_RISK => f::nis_risk_value(
            sp.mid(cat::POTENTIAL_RISK_WSA, s[0]),
            sp.mid(cat::POTENTIAL_RISK_NICHE, s[1]),
            collect_mode(s[2]),
            FoulingType::ALL[s[3]],
            risk,
        ),
        cat::U_ECOTOX_RISK => 0.0 - sp.mid(cat::ECOTOX_PRESSURE, s[0]),
        cat::U_SEDIMENT_RISK => {
            let class = if s[0] == 0 {
                SedimentClass::Low
            } else {
                SedimentClass::High
            };
            f::sediment_risk_value(class, coating(s[1]))
        }
        other => unreachable!("unknown utility {other}"),
    }
}

/// Checks node counts and runs the semantic validator.
pub fn check_model(net: &Network) -> Result<(), ModelError> {
    let decisions = net.decision_ids().len();
    let chance = net.chance_ids().len();
    let utilities = net.utilities().len();
    if (decisions, chance, utilities) != (11, 14, 9) {
        return Err(ModelError::Validation(format!(
            "expected 11 decisions, 14 chance nodes and 9 utilities, found {decisions}/{chance}/{utilities}"
        )));
    }
    let diags = validate_network(net);
    if !diags.is_empty() {
        let list: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
        return Err(ModelError::Validation(list.join("; ")));
    }
    Ok(())
}
