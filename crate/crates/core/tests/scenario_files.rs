use ofdm_energy::scenario::{
    default_paper_scenario, draw_gains, generate_channels, load_scenario, parse_scenario,
    save_scenario,
};
use ofdm_energy::Error;

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/default.toml");

#[test]
fn shipped_fixture_is_the_default_scenario() {
    assert_eq!(load_scenario(FIXTURE).unwrap(), default_paper_scenario());
}

#[test]
fn save_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.toml");
    let mut spec = default_paper_scenario();
    spec.t_max_s = Some(0.25);
    spec.seed = 77;
    save_scenario(&spec, &path).unwrap();
    assert_eq!(load_scenario(&path).unwrap(), spec);
}

#[test]
fn missing_field_is_named() {
    let text = std::fs::read_to_string(FIXTURE).unwrap().replace("p_tc_w = 20.0\n", "");
    match parse_scenario(&text) {
        Err(Error::Parse(msg)) => assert!(msg.contains("p_tc_w"), "{msg}"),
        other => panic!("expected parse error, got {other:?}"),
    }
}

#[test]
fn malformed_value_reports_line() {
    let text = std::fs::read_to_string(FIXTURE).unwrap().replace("taps = 6", "taps = \"six\"");
    match parse_scenario(&text) {
        Err(Error::Parse(msg)) => assert!(msg.contains("line") && msg.contains("taps"), "{msg}"),
        other => panic!("expected parse error, got {other:?}"),
    }
}

#[test]
fn same_seed_same_channels() {
    let spec = default_paper_scenario();
    let a = draw_gains(&spec, 123).unwrap();
    let b = draw_gains(&spec, 123).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.gains, draw_gains(&spec, 124).unwrap().gains);
}

#[test]
fn mean_gain_follows_path_loss() {
    let spec = default_paper_scenario();
    let seeds = 10_000u64;
    let mut mean = vec![0.0; spec.k()];
    for seed in 0..seeds {
        let g = draw_gains(&spec, seed).unwrap().gains;
        for (kk, m) in mean.iter_mut().enumerate() {
            *m += g.row(kk).mean().unwrap();
        }
    }
    for (kk, m) in mean.iter().enumerate() {
        let want = spec.distances_m[kk].powi(-4);
        let got = m / seeds as f64;
        assert!((got - want).abs() < 0.03 * want, "terminal {kk}: {got} vs {want}");
    }
}

#[test]
fn channels_positive_and_normalized() {
    let spec = default_paper_scenario();
    let cfg = spec.config::<f64>().unwrap();
    let chan = generate_channels(&spec, 5, &cfg).unwrap();
    assert_eq!((chan.k(), chan.n()), (4, 16));
    let n0w = 10f64.powf(-17.4) * 1e-3 * 2e4;
    for kk in 0..4 {
        for nn in 0..16 {
            assert!(chan.h(kk, nn) > 0.0);
            assert!((chan.f(kk, nn) - chan.h(kk, nn) / n0w).abs() < 1e-9 * chan.f(kk, nn));
        }
    }
}
