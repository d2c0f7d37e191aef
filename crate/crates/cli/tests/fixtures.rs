//! The shipped fixture datasets are the synthetic generators' output.
//! Set `STDP_BLESS=1` to rewrite them.

use std::path::PathBuf;

use stdp_cli::config::RunConfig;
use stdp_cli::dataset::{format_dataset, read_dataset};
use stdp_core::fitting::{synthetic, Dataset};
use stdp_core::TripletParams;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn expected() -> Vec<(&'static str, Dataset)> {
    let hip = TripletParams::hippocampal_style();
    let vc = TripletParams::visual_cortex_style();
    vec![
        ("synthetic-hippocampal.csv", synthetic::hippocampal_dataset(&hip)),
        (
            "synthetic-hippocampal-noisy.csv",
            synthetic::synthetic_dataset("hippocampal", &hip, &synthetic::hippocampal_protocols(), 0.1, Some(5))
                .unwrap(),
        ),
        ("synthetic-visual-cortex.csv", synthetic::visual_cortex_dataset(&vc)),
    ]
}

#[test]
fn fixtures_match_generators() {
    let bless = std::env::var_os("STDP_BLESS").is_some();
    for (file, ds) in expected() {
        let text = format_dataset(&ds);
        if bless {
            std::fs::write(fixture(file), &text).unwrap();
        }
        assert_eq!(std::fs::read_to_string(fixture(file)).unwrap(), text, "{file}");
        let back = read_dataset(&fixture(file)).unwrap();
        let values: Vec<(f64, f64)> = back.points.iter().map(|p| (p.dw_exp, p.sem)).collect();
        let want: Vec<(f64, f64)> = ds.points.iter().map(|p| (p.dw_exp, p.sem)).collect();
        assert_eq!(values, want);
    }
}

#[test]
fn example_configs_parse() {
    for name in ["example.toml", "smoke.toml"] {
        let cfg = RunConfig::load(&fixture(name)).unwrap();
        assert_eq!(cfg.version, 1);
    }
}
