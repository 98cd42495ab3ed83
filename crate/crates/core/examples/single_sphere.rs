//! One sphere: steady states at 90 mW, polariton peaks from the closed form,
//! and the two transmission spectra of the bistable pair.

use std::path::PathBuf;

use kerr_magnonics::config::load_config;
use kerr_magnonics::model::{to_ghz, to_mhz};
use kerr_magnonics::probe::{extract_peaks, peak_positions_single, response_single, ProbeSpec};
use kerr_magnonics::steady::solve_single_yig;

fn main() -> kerr_magnonics::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs");
    for name in ["fig5.cfg", "fig5_halfrate.cfg"] {
        let params = load_config(&dir.join(name))?;
        let wd = to_ghz(params.drive.omega_d);
        let (lp, hp) = peak_positions_single(&params, 0.0)?;
        println!("{name}: undriven peaks {:.4} / {:.4} GHz", wd + to_ghz(lp), wd + to_ghz(hp));
        let spec = ProbeSpec::around_cavity(&params)?;
        for b in solve_single_yig(&params)? {
            let s = response_single(&params, &b, &spec)?;
            let peaks: Vec<String> = extract_peaks(&s).peaks.iter().map(|p| format!("{:.2}", to_mhz(p.delta))).collect();
            println!(
                "  |M0|² = {:.3e} {:8}  peaks at δ/2π = [{}] MHz",
                b.x,
                if b.stable { "stable" } else { "unstable" },
                peaks.join(", ")
            );
        }
    }
    Ok(())
}
