use proptest::prelude::*;
use v2n_core::{RhoMode, Scenario, SimConfig, Tech};

fn short(seed: u64, lambda_mmw: f64, t_tr_s: f64, sinr: bool) -> SimConfig {
    let mut c = SimConfig { root_seed: seed, n_drops: 4, t_tr_s, sinr_mode: sinr, ..SimConfig::default() };
    c.deployment.lambda_mmw = lambda_mmw;
    c.trip.duration_s = 20.0;
    c
}

#[test]
fn campaign_is_reproducible() {
    let a = Scenario::new(short(7, 30.0, 0.5, false), None).unwrap().run_campaign_sequential().unwrap();
    let b = Scenario::new(short(7, 30.0, 0.5, false), None).unwrap().run_campaign_sequential().unwrap();
    assert_eq!(a, b);
    let c = Scenario::new(short(8, 30.0, 0.5, false), None).unwrap().run_campaign_sequential().unwrap();
    assert_ne!(a.mmw.mean_rate_bps, c.mmw.mean_rate_bps);
}

#[test]
fn drops_are_independent_of_evaluation_order() {
    let s = Scenario::new(short(3, 50.0, 0.0, false), None).unwrap();
    let late_first = s.run_drop(3).unwrap();
    s.run_drop(0).unwrap();
    assert_eq!(s.run_drop(3).unwrap(), late_first);
}

#[test]
fn sinr_never_beats_snr() {
    let snr = Scenario::new(short(5, 80.0, 0.0, false), None).unwrap().run_drop(0).unwrap();
    let sinr = Scenario::new(short(5, 80.0, 0.0, true), None).unwrap().run_drop(0).unwrap();
    for (a, b) in snr.mmw.iter().zip(&sinr.mmw) {
        assert!(b.rate_bps <= a.rate_bps * (1.0 + 1e-12));
    }
}

#[test]
fn empty_mmwave_layer_is_always_in_outage() {
    let m = Scenario::new(short(2, 0.0, 0.0, false), None).unwrap().run_campaign_sequential().unwrap();
    assert_eq!(m.mmw.mean_rate_bps, 0.0);
    assert_eq!(m.mmw.outage_prob, 1.0);
    assert!(m.lte.mean_rate_bps > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn summaries_are_well_formed(seed in 0u64..1000, lambda in 0.0f64..120.0, slots in 0u32..4) {
        let t_tr = f64::from(slots) * 0.5;
        let scenario = Scenario::new(short(seed, lambda, t_tr, false), None).unwrap();
        let m = scenario.run_campaign_sequential().unwrap();
        for tech in [Tech::Lte, Tech::MmWave] {
            let s = m.summary(tech);
            prop_assert!(s.mean_rate_bps >= 0.0 && s.mean_rate_bps.is_finite());
            prop_assert!((0.0..=1.0).contains(&s.outage_prob));
            prop_assert_eq!(s.n_drops, 4);
            for mode in [RhoMode::Pooled, RhoMode::PerDrop] {
                if let Some(r) = s.rho(mode) {
                    prop_assert!(r >= 0.0 && r.is_finite());
                }
            }
        }
        if slots == 0 {
            prop_assert_eq!(m.mmw.alignment_losses, 0);
        }
        let d = scenario.run_drop(0).unwrap();
        prop_assert_eq!(d.lte.len(), d.mmw.len());
        prop_assert!(d.mmw.iter().all(|s| !s.lost_alignment || slots > 0));
    }
}
