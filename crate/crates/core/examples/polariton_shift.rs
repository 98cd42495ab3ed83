//! Upper-polariton frequency shift along the up and down power sweeps.

use std::path::PathBuf;

use kerr_magnonics::config::load_config;
use kerr_magnonics::model::{mhz, to_mhz};
use kerr_magnonics::probe::{shift_jumps, shift_vs_power, Polariton, ProbeSpec};
use kerr_magnonics::sweep::{Direction, SweepParameter, SweepSpec};

fn main() -> kerr_magnonics::Result<()> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/fig6.cfg");
    let params = load_config(&path)?;
    let spec = SweepSpec::new(SweepParameter::Power, 0.0, 0.05, 100, Direction::Both)?;
    let curves = shift_vs_power(&params, &spec, Polariton::Higher, &ProbeSpec::around_cavity(&params)?)?;
    for c in &curves {
        println!("{:?} sweep, jumps at {:?} mW", c.direction, shift_jumps(c, mhz(0.5)).iter().map(|p| p * 1e3).collect::<Vec<_>>());
        for (p, s) in c.power.iter().zip(&c.shift).step_by(10) {
            match s {
                Some(s) => println!("  {:5.1} mW  ΔHP/2π = {:6.2} MHz", p * 1e3, to_mhz(*s)),
                None => println!("  {:5.1} mW  peak not resolved", p * 1e3),
            }
        }
    }
    Ok(())
}
