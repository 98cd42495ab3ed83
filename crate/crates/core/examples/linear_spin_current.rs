//! Kerr-free spin current: closed form against the polynomial root, and
//! where the Kerr terms start to matter.

use std::path::PathBuf;

use kerr_magnonics::config::load_config;
use kerr_magnonics::steady::{linear_spin_current, solve_two_yig};

fn main() -> kerr_magnonics::Result<()> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/fig2b.cfg");
    let base = load_config(&path)?;
    for mw in [0.03, 0.3, 1.0, 3.0, 10.0] {
        let p = base.with_power(mw * 1e-3);
        let x_lin = linear_spin_current(&p)?;
        let x_root = solve_two_yig(&p.without_kerr())?[0].x;
        let x_kerr = solve_two_yig(&p)?.iter().filter(|b| b.stable).map(|b| b.x).fold(f64::NAN, f64::min);
        println!(
            "{mw:5.2} mW  linear {x_lin:.4e}  (root rel diff {:.1e})  with Kerr {x_kerr:.4e}  ratio {:.4}",
            (x_root - x_lin).abs() / x_lin,
            x_kerr / x_lin
        );
    }
    Ok(())
}
