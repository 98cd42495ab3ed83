//! Up and down power sweeps: jumps, hysteresis window and regime for the
//! bistable and the multistable parameter sets.

use std::path::PathBuf;

use kerr_magnonics::config::load_config;
use kerr_magnonics::sweep::{classify_regime, Direction, SweepParameter, SweepSpec};

fn main() -> kerr_magnonics::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs");
    let spec = SweepSpec::new(SweepParameter::Power, 0.0, 0.05, 400, Direction::Both)?;
    for name in ["fig2a.cfg", "fig2b.cfg", "zero_kerr.cfg"] {
        let r = classify_regime(&load_config(&dir.join(name))?, &spec)?;
        println!("{name}: {} (max {} stable)", r.regime.as_str(), r.max_stable_count);
        for j in &r.up_jumps {
            println!("  up   jump at {:.2} ± {:.2} mW: x {:.3e} -> {:.3e}", j.value * 1e3, j.uncertainty * 1e3, j.x_before, j.x_after);
        }
        for j in &r.down_jumps {
            println!("  down jump at {:.2} ± {:.2} mW: x {:.3e} -> {:.3e}", j.value * 1e3, j.uncertainty * 1e3, j.x_before, j.x_after);
        }
        for (a, b) in &r.hysteresis_window {
            println!("  hysteresis {:.2}..{:.2} mW", a * 1e3, b * 1e3);
        }
    }
    Ok(())
}
