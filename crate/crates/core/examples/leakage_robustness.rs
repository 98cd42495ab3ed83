//! How the number of coexisting stable states degrades as the cavity
//! leakage grows past the magnon-photon couplings.

use std::path::PathBuf;

use kerr_magnonics::config::load_config;
use kerr_magnonics::model::mhz;
use kerr_magnonics::sweep::{leakage_robustness, Direction, SweepParameter, SweepSpec};

fn main() -> kerr_magnonics::Result<()> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/fig3a.cfg");
    let params = load_config(&path)?;
    let spec = SweepSpec::new(SweepParameter::Power, 0.0, 0.05, 200, Direction::Both)?;
    let gammas = [2.0, 4.3, 8.0, 15.0, 30.0, 40.0, 100.0];
    let values: Vec<f64> = gammas.iter().map(|g| mhz(*g)).collect();
    for (g, r) in gammas.iter().zip(leakage_robustness(&params, &values, &spec)?) {
        println!(
            "γc/2π = {g:6.1} MHz: {:11} max stable {}  jumps up/down {}/{}",
            r.regime.as_str(),
            r.max_stable_count,
            r.up_jump_count,
            r.down_jump_count
        );
    }
    Ok(())
}
