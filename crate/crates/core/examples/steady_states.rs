//! Every steady state of the two-sphere system at 30 mW, with stability.
//!
//!     cargo run --example steady_states [-- path/to/config.cfg]

use std::path::PathBuf;

use kerr_magnonics::config::load_config;
use kerr_magnonics::steady::solve_steady;

fn main() -> kerr_magnonics::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/fig2b_calibrated.cfg"));
    let params = load_config(&path)?;
    println!("Ω = {:.4e} rad/s", params.rabi()?);
    for b in solve_steady(&params)? {
        println!(
            "x = {:.4e}  {:8}  max Re λ = {:+.3e} /s  residual = {:.1e}",
            b.x,
            if b.stable { "stable" } else { "unstable" },
            b.max_real_eigenvalue(),
            b.residual
        );
    }
    Ok(())
}
