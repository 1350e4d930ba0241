//! The files under `models/` are exactly what the builders produce.

mod common;

use std::fs;

use beliefcast::netcore::Network;
use beliefcast::oilmodel::{build_base_case, reference_parameters, MarketParameters};
use beliefcast::scenario::{apply_overlay, constrained_overlay, reference_actuals, Overlay};

use common::models_dir;

fn read(name: &str) -> String {
    fs::read_to_string(models_dir().join(name)).unwrap()
}

#[test]
fn shipped_networks_match_the_builders() {
    let p = reference_parameters();
    let base = build_base_case(&p).unwrap();
    assert_eq!(read("base_case.network.json"), base.to_json());
    let overlay = constrained_overlay(&p, &reference_actuals()).unwrap();
    assert_eq!(read("constrained.overlay.json"), overlay.to_json());
    let cons = apply_overlay(&base, &overlay).unwrap();
    assert_eq!(read("constrained.network.json"), cons.to_json());
}

#[test]
fn shipped_files_parse_back() {
    let base = Network::from_json(&read("base_case.network.json")).unwrap();
    let overlay = Overlay::from_json(&read("constrained.overlay.json")).unwrap();
    assert_eq!(overlay.base, base.name());
    let cons = Network::from_json(&read("constrained.network.json")).unwrap();
    assert_eq!(
        cons.content_hash(),
        apply_overlay(&base, &overlay).unwrap().content_hash()
    );
    let p = MarketParameters::from_json(&read("base_case.params.json")).unwrap();
    assert_eq!(p, reference_parameters());
}
