mod support;

use dst_core::model::catalog::{self as cat, state_space};
use dst_core::model::tables;
use dst_core::{query, LockSet, ModelBundle, Network, StateSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bundle() -> ModelBundle {
    ModelBundle::default_bundle().unwrap()
}

fn cpt_column(net: &Network, node: &str, parent_states: &[usize]) -> Vec<f64> {
    let id = net.var_id(node).unwrap();
    let f = &net.cpt(id).unwrap().factor;
    let card = *f.cards().last().unwrap();
    let mut k = 0;
    for (s, c) in parent_states.iter().zip(f.cards()) {
        k = k * c + s;
    }
    f.data()[k * card..(k + 1) * card].to_vec()
}

fn utility_table(net: &Network, id: &str) -> Vec<f64> {
    net.utility(id).unwrap().table.clone()
}

#[test]
fn node_counts_and_route_states() {
    let b = bundle();
    assert_eq!(b.network.decision_ids().len(), 11);
    assert_eq!(b.network.chance_ids().len(), 14);
    assert_eq!(b.network.utilities().len(), 9);
    let routes = b.network.var_id(cat::ROUTES).unwrap();
    assert_eq!(b.network.variable(routes).card(), 20);
    assert!(dst_core::network::validate_network(&b.network).is_empty());
}

#[test]
fn topology_matches_printed_parent_lists() {
    let net = bundle().network;
    let parents = |n: &str| -> Vec<String> {
        let id = net.var_id(n).unwrap();
        net.parents(id).iter().map(|p| net.variable(*p).id.clone()).collect()
    };
    assert_eq!(parents("FuelReal"), ["TheoreticalFuel", "BiofoulingAvg"]);
    assert_eq!(parents("PotentialRiskWSA"), ["NISvalue", "WSAnoNiche", "BiofoulingMax"]);
    assert_eq!(
        parents("EcotoxPressure"),
        ["IWCmethodPast", "IWCtimes", "CopperEmission", "WSA"]
    );
    assert_eq!(parents("CoatingType"), ["Routes"]);
    assert_eq!(
        net.utility("NISRisk").unwrap().parents,
        ["PotentialRiskWSA", "PotentialRiskNiche", "IWCcollect", "FoulingType"]
    );
    assert_eq!(
        net.utility("IWCCost").unwrap().parents,
        ["IWCtimes", "WSA", "OffHire", "IWCcollect"]
    );
    let edges: usize = net.ids().map(|v| net.parents(v).len()).sum::<usize>()
        + net.utilities().iter().map(|u| u.parents.len()).sum::<usize>();
    assert_eq!(edges, 51);
}

#[test]
fn printed_state_arrays() {
    let routes: Vec<String> = (1..=10).flat_map(|i| [format!("{i}A"), format!("{i}B")]).collect();
    assert_eq!(
        state_space(cat::NIS_VALUE, &routes),
        StateSpace::Numbered(vec![1., 3., 7., 9., 10., 15., 17., 18., 30., 31., 32., 33., 36., 53.])
    );
    assert_eq!(
        state_space(cat::WSA, &routes),
        StateSpace::Interval(vec![
            0.0, 5e-4, 1e-3, 5e-3, 0.01, 0.02, 0.04, 0.06, 0.08, 0.1, 0.2, 1.0, 1.04
        ])
    );
}

#[test]
fn printed_utility_arrays() {
    let net = bundle().network;
    let eco = utility_table(&net, "EcotoxRisk");
    let mut expected = vec![0.0, -12.5, -37.5, -75.0, -300.0, -750.0, -3000.0, -7500.0];
    expected.extend((0..7).map(|i| -12500.0 - 5000.0 * i as f64));
    assert_eq!(eco, expected);
    assert_eq!(*eco.last().unwrap(), -42500.0);

    let co2 = utility_table(&net, "CO2Hour");
    let mut expected = vec![-2500.0, -3500.0, -4500.0, -5500.0, -7000.0];
    expected.extend((0..8).map(|i| -9000.0 - 2000.0 * i as f64));
    assert_eq!(co2, expected);
    assert_eq!(*co2.last().unwrap(), -23000.0);

    // parents are (SedimentCu, CoatingType)
    let sed = utility_table(&net, "SedimentRisk");
    assert_eq!(sed, vec![0.0, -50.0, 0.0, 0.0, -100.0, 0.0]);
}

#[test]
fn biofouling_anchor_columns() {
    let net = bundle().network;
    // parents (CoatingType, TimeSinceCoating, IWCtimes)
    for c in 0..3 {
        assert_eq!(cpt_column(&net, "BiofoulingAvg", &[c, 0, 0]), [1., 0., 0., 0., 0., 0.]);
    }
    assert_eq!(cpt_column(&net, "BiofoulingAvg", &[0, 1, 0]), [0., 0., 0., 0., 0., 1.]);
    for t in 0..5 {
        for i in 0..4 {
            assert_eq!(cpt_column(&net, "BiofoulingAvg", &[2, t, i]), [1., 0., 0., 0., 0., 0.]);
        }
    }
    assert_eq!(cpt_column(&net, "BiofoulingAvg", &[2, 4, 3]), [1., 0., 0., 0., 0., 0.]);
}

#[test]
fn biofouling_cpts_are_cdf_monotone() {
    let net = bundle().network;
    let cdf = |v: Vec<f64>| -> Vec<f64> {
        v.iter()
            .scan(0.0, |s, p| {
                *s += p;
                Some(*s)
            })
            .collect()
    };
    for node in ["BiofoulingAvg", "BiofoulingMax"] {
        for c in 0..3 {
            for t in 0..5 {
                for i in 0..4 {
                    let here = cdf(cpt_column(&net, node, &[c, t, i]));
                    if i < 3 {
                        let more_cleaning = cdf(cpt_column(&net, node, &[c, t, i + 1]));
                        assert!(more_cleaning.iter().zip(&here).all(|(a, b)| *a >= b - 1e-12));
                    }
                    if t < 4 {
                        let older = cdf(cpt_column(&net, node, &[c, t + 1, i]));
                        assert!(here.iter().zip(&older).all(|(a, b)| *a >= b - 1e-12));
                    }
                }
            }
        }
    }
}

#[test]
fn copper_and_fouling_type_cpts() {
    let net = bundle().network;
    assert_eq!(cpt_column(&net, "CopperEmission", &[0]), [1.0, 0.0]);
    assert_eq!(cpt_column(&net, "CopperEmission", &[1]), [0.0, 1.0]);
    assert_eq!(cpt_column(&net, "CopperEmission", &[2]), [1.0, 0.0]);
    for b in 0..3 {
        assert_eq!(cpt_column(&net, "FoulingType", &[b]), [1.0, 0.0]);
    }
    assert_eq!(cpt_column(&net, "FoulingType", &[3]), [0.5, 0.5]);
    for b in 4..6 {
        assert_eq!(cpt_column(&net, "FoulingType", &[b]), [0.0, 1.0]);
    }
}

#[test]
fn wsa_rows_are_transcribed() {
    let net = bundle().network;
    let bulker = cpt_column(&net, "WSA", &[0]);
    assert!((bulker[2] - 0.34364).abs() < 1e-6);
    assert!((bulker[3] - 0.403583).abs() < 1e-6);
    for s in 0..6 {
        let row = cpt_column(&net, "WSA", &[s]);
        assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-6);
        for (a, b) in row.iter().zip(tables::wsa_rows()[s]) {
            assert!((a - b).abs() < 1e-6);
        }
    }
}

#[test]
fn wsa_rows_survive_resampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 100_000;
    for row in tables::wsa_rows() {
        let sum: f64 = row.iter().sum();
        let p: Vec<f64> = row.iter().map(|x| x / sum).collect();
        let mut hist = vec![0usize; p.len()];
        for _ in 0..n {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let k = p
                .iter()
                .position(|q| {
                    acc += q;
                    u < acc
                })
                .unwrap_or(p.len() - 1);
            hist[k] += 1;
        }
        for (h, q) in hist.iter().zip(&p) {
            let sd = (n as f64 * q * (1.0 - q)).sqrt();
            assert!((*h as f64 - n as f64 * q).abs() <= 3.0 * sd + 1.0);
        }
    }
}

#[test]
fn fouling_release_is_inconsistent_exactly_on_ice_routes() {
    let b = bundle();
    for r in &b.routes {
        for c in cat::COATINGS {
            let res = query(&b.network, &LockSet::new().with("Routes", &r.id).with("CoatingType", c)).unwrap();
            let expect_bad = r.ice && c == "fouling-release";
            assert_eq!(!res.consistent, expect_bad, "{} {c}", r.id);
            if expect_bad {
                assert!(res.reason.unwrap().contains("ice-free"));
            }
        }
    }
}

#[test]
fn nis_risk_ordering_over_ship_route_coating_grid() {
    let b = bundle();
    for ship in cat::SHIP_TYPES {
        for r in &b.routes {
            for c in cat::COATINGS {
                let base = LockSet::new()
                    .with("ShipType", ship)
                    .with("Routes", &r.id)
                    .with("CoatingType", c);
                let vals: Vec<Option<f64>> = ["IWC+collect", "no-IWC", "IWC+no-collect"]
                    .iter()
                    .map(|m| {
                        let res = query(&b.network, &base.clone().with("IWCcollect", *m)).unwrap();
                        res.utilities.get("NISRisk").copied()
                    })
                    .collect();
                if r.ice && c == "fouling-release" {
                    assert!(vals.iter().all(Option::is_none));
                    continue;
                }
                let v: Vec<f64> = vals.into_iter().map(|x| x.unwrap().abs()).collect();
                assert!(v[0] < v[1] && v[1] < v[2], "{ship} {} {c}: {v:?}", r.id);
            }
        }
    }
}

#[test]
fn non_biocidal_coatings_have_no_copper_risk() {
    let b = bundle();
    let net = &b.network;
    // structural: no copper source puts all pressure mass on the zero state
    let cards = [2usize, 4, 2, 12];
    for m in 0..cards[0] {
        for t in 0..cards[1] {
            for w in 0..cards[3] {
                let col = cpt_column(net, "EcotoxPressure", &[m, t, 0, w]);
                assert_eq!(col[0], 1.0);
            }
        }
    }
    assert_eq!(utility_table(net, "EcotoxRisk")[0], 0.0);
    // sampled full lock sets
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let decisions = net.decision_ids();
    for _ in 0..150 {
        let mut locks = LockSet::new();
        for d in &decisions {
            let v = net.variable(*d);
            let s = rng.random_range(0..v.card());
            locks.insert(v.id.clone(), v.states.label(s));
        }
        let coating = if rng.random_bool(0.5) {
            "hard"
        } else {
            "fouling-release"
        };
        locks.insert("CoatingType", coating);
        let res = query(net, &locks).unwrap();
        if res.consistent {
            assert_eq!(res.utilities["EcotoxRisk"], 0.0);
            assert_eq!(res.utilities["SedimentRisk"], 0.0);
        }
    }
}

#[test]
fn tanker_example_signs_and_orderings() {
    let b = bundle();
    let base = LockSet::new()
        .with("ShipType", "tanker")
        .with("FuelType", "heavy")
        .with("CoatingType", "hard")
        .with("Routes", "2A");
    let collect = query(&b.network, &base.clone().with("IWCcollect", "IWC+collect")).unwrap();
    let no_collect = query(&b.network, &base.with("IWCcollect", "IWC+no-collect")).unwrap();
    let (nc, nn) = (collect.utilities["NISRisk"], no_collect.utilities["NISRisk"]);
    let (ic, in_) = (collect.utilities["IWCCost"], no_collect.utilities["IWCCost"]);
    assert!(nc < 0.0 && nn < 0.0 && ic < 0.0 && in_ < 0.0);
    assert!(nc.abs() < nn.abs());
    assert!(ic.abs() > in_.abs());
    // the cleaning-cost formula reproduces the published figures closely
    assert!((ic + 128450.25).abs() < 0.05, "{ic}");
    assert!((in_ + 118966.83).abs() < 0.05, "{in_}");
    assert!((nc + 27.25).abs() < 0.05, "{nc}");
}

#[test]
fn all_decisions_locked_match_closed_forms() {
    let (checked, _) = support::closed_form::check_random_full_locks(&bundle(), 300, 2024, 1e-9).unwrap();
    assert!(checked > 200);
}
