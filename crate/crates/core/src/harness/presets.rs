use crate::harness::config::{Algorithm, ExperimentConfig, InstanceSource};
use crate::model::{DiscountFunction, Instance};

/// Baselines of the seven-arm experiment, in the order they are listed.
pub const FIG2_BASELINES: [f64; 7] = [0.0, 1.0 / 3.0, 2.0 / 3.0, 4.0 / 5.0, 13.0 / 15.0, 14.0 / 15.0, 1.0];
pub const FIG2_GAMMA: f64 = 0.999;
pub const FIG2_MAX_DELAY: usize = 6;
pub const FIG2_HORIZON: u64 = 200_000;
pub const FIG3_HORIZON: u64 = 200_000;
pub const DEFAULT_DELTA: f64 = 0.1;

/// Seven arms with geometric discount `0.999^tau`, delays drawn per seed,
/// unit switching cost, five seeds.
pub fn preset_fig2() -> ExperimentConfig {
    ExperimentConfig {
        name: "fig2".into(),
        instance: InstanceSource::RandomDelays {
            baselines: FIG2_BASELINES.to_vec(),
            discount: DiscountFunction::geometric(FIG2_GAMMA).expect("valid ratio"),
            max_delay: FIG2_MAX_DELAY,
        },
        algorithms: vec![Algorithm::Low, Algorithm::Ucb],
        horizon: FIG2_HORIZON,
        delta: DEFAULT_DELTA,
        switch_cost: 1.0,
        seeds: (0..5).collect(),
        out: None,
        full_resolution: false,
    }
}

/// Two arms, `mu = (1, 13/15)`, `d = (2, 2)`, `f = (0.3, 0.25, 0.25, ...)`:
/// `pi_1` and `pi_2` both average 0.7 per pull.
pub fn fig3_instance() -> Instance {
    Instance::new(&[1.0, 13.0 / 15.0], &[2, 2], DiscountFunction::table(vec![0.3, 0.25]).expect("nonincreasing table"))
        .expect("valid instance")
        .with_label("fig3")
}

/// The two-arm experiment with unit (`cost = true`) or zero switching cost.
pub fn preset_fig3(cost: bool) -> ExperimentConfig {
    ExperimentConfig {
        name: if cost { "fig3-cost" } else { "fig3-free" }.into(),
        instance: InstanceSource::Fixed { instance: fig3_instance() },
        algorithms: vec![Algorithm::Low, Algorithm::Ucb],
        horizon: FIG3_HORIZON,
        delta: DEFAULT_DELTA,
        switch_cost: if cost { 1.0 } else { 0.0 },
        seeds: (0..10).collect(),
        out: None,
        full_resolution: false,
    }
}

/// Preset by name: `fig2`, `fig3-cost` or `fig3-free`.
pub fn preset(name: &str) -> Option<ExperimentConfig> {
    match name {
        "fig2" => Some(preset_fig2()),
        "fig3-cost" => Some(preset_fig3(true)),
        "fig3-free" => Some(preset_fig3(false)),
        _ => None,
    }
}
