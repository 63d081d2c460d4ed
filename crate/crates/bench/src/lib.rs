//! Shared fixtures for the benchmark targets.

use led_core::channel::ChannelModel;
use led_core::codes::{build_led_code, LedCode};
use led_core::feasibility::CodeParams;

/// A mid-sized code/channel pair exercising encode, transmit, and decode.
pub fn simulation_fixture() -> (LedCode, ChannelModel) {
    let ch = ChannelModel::bsc(0.02).expect("valid crossover");
    let params = CodeParams::new(1830, 2, 2, 1, 24).expect("valid parameters");
    let code = build_led_code(&params, 0.28, &ch, 0).expect("within guards");
    (code, ch)
}
