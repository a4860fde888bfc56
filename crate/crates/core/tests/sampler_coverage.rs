//! Sampling-quality regressions: bin coverage of a biased chain and
//! decorrelation of consecutive saved records.

use geoknot_core::lattice::KnotClass;
use geoknot_core::sampler::{run_chain, BiasFunctional, BiasSpec, ChainConfig, ChainState};

#[test]
fn trefoil_chain_covers_default_writhe_bins() {
    let mut cfg = ChainConfig::new(KnotClass::Trefoil, 100, 0);
    cfg.bias = BiasSpec {
        functional: BiasFunctional::Writhe,
        lo: -10.0,
        hi: 10.0,
        bins: 40,
    };
    cfg.seed = 13;
    let mut st = ChainState::new(cfg).unwrap();
    while st.move_index() < 500_000 {
        st.mc_step().unwrap();
    }
    let visited = st.bias().visits().iter().filter(|&&v| v > 0).count();
    assert!(
        visited >= 36,
        "only {visited}/40 bins visited within the budget"
    );
}

#[test]
fn saved_records_decorrelate_in_gyration_radius() {
    // Lag-1 autocorrelation of R_g across consecutive saves stays below 0.1
    // on a 1000-record shard.
    let mut cfg = ChainConfig::new(KnotClass::Unknot, 40, 1000);
    cfg.bias = BiasSpec {
        functional: BiasFunctional::Writhe,
        lo: -4.0,
        hi: 4.0,
        bins: 20,
    };
    cfg.seed = 99;
    cfg.max_moves = 100_000_000;
    let shard = run_chain(&cfg).unwrap();
    assert!(shard.complete);
    assert_eq!(shard.records.len(), 1000);
    let rg: Vec<f64> = shard.records.iter().map(|r| r.functionals.rg).collect();
    let n = rg.len();
    let mean = rg.iter().sum::<f64>() / n as f64;
    let var = rg.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    let cov = rg
        .windows(2)
        .map(|w| (w[0] - mean) * (w[1] - mean))
        .sum::<f64>()
        / (n - 1) as f64;
    let lag1 = cov / var;
    assert!(lag1 < 0.1, "lag-1 autocorrelation of R_g is {lag1:.3}");
}
