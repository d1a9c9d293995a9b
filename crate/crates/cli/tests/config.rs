use proptest::prelude::*;
use ringlab_cli::config::{ExperimentKind, RunConfig};

const BASE: &str = r#"
kind = "density"
seed = 42

[potential]
kind = "quartic"
alpha = 2.0
walls = [0.5, 1.5]

[sampler]
n = 300
"#;

#[test]
fn effective_config_reparses_to_itself() {
    let cfg = RunConfig::load(BASE, &["stats.k=2".into(), "qmap.theta0=0.1".into()], Some(9)).unwrap();
    assert_eq!(cfg.seed, 9);
    assert_eq!(cfg.stats.k, 2);
    assert_eq!(RunConfig::parse(&cfg.to_toml().unwrap()).unwrap(), cfg);
}

#[test]
fn every_shipped_config_is_valid() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let cfg = RunConfig::parse(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        cfg.potential.build().unwrap();
        seen += 1;
    }
    assert!(seen >= 8);
}

proptest! {
    #[test]
    fn round_trip_after_overrides(
        n in 2usize..5000,
        thin in 1usize..100,
        alpha in -5.0f64..5.0,
        s_max in 0.5f64..10.0,
        seed in 0u64..=i64::MAX as u64,
        kind in prop::sample::select(vec!["sample", "density", "spacings", "r2", "radii"]),
    ) {
        let overrides = vec![
            format!("sampler.n={n}"),
            format!("sampler.thin={thin}"),
            format!("sampler.sample_sweeps={}", thin * 10),
            format!("potential.alpha={alpha:?}"),
            format!("stats.s_max={s_max:?}"),
            format!("kind=\"{kind}\""),
        ];
        let cfg = RunConfig::load(BASE, &overrides, Some(seed)).unwrap();
        prop_assert_eq!(cfg.sampler.n, n);
        prop_assert_eq!(cfg.potential.alpha, Some(alpha));
        prop_assert_eq!(cfg.kind.name(), kind);
        prop_assert!(cfg.kind != ExperimentKind::Kernel);
        let again = RunConfig::parse(&cfg.to_toml().unwrap()).unwrap();
        prop_assert_eq!(again, cfg);
    }
}
