//! Probe transmission on each stable steady state, with polariton peaks.

use std::path::PathBuf;

use kerr_magnonics::config::load_config;
use kerr_magnonics::model::{to_ghz, to_mhz};
use kerr_magnonics::probe::{extract_peaks, response_two, ProbeSpec};
use kerr_magnonics::steady::solve_steady;

fn main() -> kerr_magnonics::Result<()> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/fig6.cfg");
    let driven = load_config(&path)?;
    let spec = ProbeSpec::around_cavity(&driven)?;
    let wd = to_ghz(driven.drive.omega_d);
    for (label, params) in [("drive off", driven.with_power(0.0)), ("30 mW", driven.clone())] {
        for b in solve_steady(&params)?.iter().filter(|b| b.stable) {
            let s = response_two(&params, b, &spec)?;
            let peaks = extract_peaks(&s);
            let list: Vec<String> = peaks
                .peaks
                .iter()
                .map(|p| format!("{} {:.4} GHz", p.label.map_or("?", |l| l.label()), wd + to_ghz(p.delta)))
                .collect();
            println!("{label:9} x = {:.3e}: {}", b.x, list.join(", "));
            if let Some(hp) = peaks.peaks.last() {
                println!("          HP at δ/2π = {:.2} MHz", to_mhz(hp.delta));
            }
        }
    }
    Ok(())
}
