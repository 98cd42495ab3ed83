//! Acceptance criteria 1 to 8. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::path::PathBuf;
use std::time::Instant;

use nalgebra::{Matrix3, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kerr_magnonics::config::load_config;
use kerr_magnonics::model::{derive_detunings, mhz, to_mhz, DriveStrength, SystemParams};
use kerr_magnonics::probe::{
    closed_form_single, extract_peaks, response_single, response_two, shift_jumps, shift_vs_power, Polariton,
    ProbeSpec,
};
use kerr_magnonics::steady::{linear_spin_current, solve_steady, solve_two_yig, SteadyBranch};
use kerr_magnonics::sweep::{classify_regime, Direction, SweepParameter, SweepSpec};

fn config(name: &str) -> SystemParams {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name);
    load_config(&path).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn all_configs() -> Vec<(String, SystemParams)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut names: Vec<String> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".cfg"))
        .collect();
    names.sort();
    names.into_iter().map(|n| (n.clone(), config(&n))).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn stable_x(branches: &[SteadyBranch]) -> Vec<f64> {
    branches.iter().filter(|b| b.stable).map(|b| b.x).collect()
}

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
}

fn matches_within(got: &[f64], want: &[f64], tol: f64) -> bool {
    got.len() == want.len() && got.iter().zip(want).all(|(g, w)| rel(*g, *w) <= tol)
}

fn criterion_1() -> Outcome {
    let want = [1.58e14, 5.6e14, 8.83e14];
    let params = config("fig2b_calibrated.cfg");
    let t = Instant::now();
    let branches = solve_two_yig(&params).unwrap();
    let elapsed = t.elapsed().as_secs_f64();
    let got = stable_x(&branches);
    let literal = stable_x(&solve_two_yig(&config("fig2b.cfg")).unwrap());
    outcome(
        matches_within(&got, &want, 0.05) && elapsed < 1.0,
        format!(
            "calibrated Ω = {:.4e} rad/s (×{:.4}): stable x = [{}] in {elapsed:.3}s; uncalibrated: [{}]",
            params.rabi().unwrap(),
            params.constants.rabi_scale,
            sci(&got),
            sci(&literal)
        ),
    )
}

fn criterion_2() -> Outcome {
    let want = [0.66e15, 2.55e15];
    let params = config("fig5.cfg");
    let t = Instant::now();
    let branches = solve_steady(&params).unwrap();
    let elapsed = t.elapsed().as_secs_f64();
    let got = stable_x(&branches);
    let half = stable_x(&solve_steady(&config("fig5_halfrate.cfg")).unwrap());
    outcome(
        matches_within(&got, &want, 0.05) && elapsed < 1.0,
        format!("fig5.cfg at 90 mW: stable |M0|² = [{}] in {elapsed:.3}s; halved-rate reading: [{}]", sci(&got), sci(&half)),
    )
}

fn criterion_3() -> Outcome {
    let base = config("fig2b.cfg").without_kerr();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let mut p = base.clone();
        p.cavity.omega_c += mhz(rng.random_range(-20.0..20.0));
        p.cavity.gamma_c *= rng.random_range(0.5..2.0);
        for m in &mut p.magnons {
            m.omega += mhz(rng.random_range(-20.0..20.0));
            m.gamma *= rng.random_range(0.5..2.0);
            m.g *= rng.random_range(0.8..1.2);
        }
        p.drive.omega_d += mhz(rng.random_range(-10.0..10.0));
        p.drive.strength = DriveStrength::Power(rng.random_range(1e-4..0.1));
        let roots = solve_two_yig(&p).unwrap();
        if roots.len() != 1 {
            return outcome(false, format!("{} roots for a Kerr-free draw", roots.len()));
        }
        worst = worst.max(rel(roots[0].x, linear_spin_current(&p).unwrap()));
    }
    outcome(worst <= 1e-10, format!("20 draws, worst relative difference {worst:.2e}"))
}

fn criterion_4() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let mut failures = Vec::new();
    for (name, params) in all_configs() {
        for i in 0..100 {
            let p = params.with_power(0.1 * i as f64 / 99.0);
            let rabi = p.rabi().unwrap();
            for b in solve_steady(&p).unwrap() {
                count += 1;
                let bound = b.residual_bound(rabi, p.magnons[0].gamma);
                if bound > 0.0 {
                    worst = worst.max(b.residual / bound);
                }
                if b.residual > bound {
                    failures.push(format!("{name} P={:.1}mW x={:.3e}", i as f64 / 99.0 * 100.0, b.x));
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{count} branches over {} configs × 100 powers (0 to 100 mW); worst residual/bound {worst:.2e}; failures {failures:?}", all_configs().len()),
    )
}

fn criterion_5() -> Outcome {
    let spec = SweepSpec::new(SweepParameter::Power, 0.0, 0.05, 400, Direction::Both).unwrap();
    let mut detail = Vec::new();
    let mut pass = true;
    for (name, up, down) in [("fig2b.cfg", 2, 2), ("fig2a.cfg", 1, 1), ("zero_kerr.cfg", 0, 0)] {
        let t = Instant::now();
        let r = classify_regime(&config(name), &spec).unwrap();
        let elapsed = t.elapsed().as_secs_f64();
        let ups: Vec<f64> = r.up_jumps.iter().map(|j| j.value * 1e3).collect();
        let downs: Vec<f64> = r.down_jumps.iter().map(|j| j.value * 1e3).collect();
        let distinct = ups.iter().all(|u| downs.iter().all(|d| (u - d).abs() > 1e-9));
        let ok = r.up_jump_count == up && r.down_jump_count == down && distinct && elapsed < 30.0;
        pass &= ok;
        detail.push(format!(
            "{name}: up {ups:.2?} mW, down {downs:.2?} mW (want {up}/{down}) {:.1}s {}",
            elapsed,
            if ok { "ok" } else { "MISMATCH" }
        ));
    }
    outcome(pass, detail.join("; "))
}

fn criterion_6() -> Outcome {
    // (a) direct vs closed form, single sphere
    let mut worst_a: f64 = 0.0;
    for name in ["fig5.cfg", "fig5_halfrate.cfg"] {
        let p = config(name);
        let spec = ProbeSpec::around_cavity(&p).unwrap();
        for b in solve_steady(&p).unwrap() {
            let s = response_single(&p, &b, &spec).unwrap();
            for (d, t) in s.delta.iter().zip(&s.t) {
                let c = closed_form_single(&p, &b, *d).unwrap();
                worst_a = worst_a.max((c - t).norm() / t.norm());
            }
        }
    }
    let a = worst_a <= 1e-8;

    // (b) drive-off two-sphere peaks vs 3×3 coupling eigenfrequencies
    let p = config("fig6.cfg").with_power(0.0);
    let det = derive_detunings(&p);
    let (g1, g2) = (p.magnons[0].g, p.magnons[1].g);
    let m = Matrix3::new(det.delta[0], 0.0, g1, 0.0, det.delta[1], g2, g1, g2, det.delta_c);
    let mut eig: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    let b0 = &solve_steady(&p).unwrap()[0];
    let s = response_two(&p, b0, &ProbeSpec::around_cavity(&p).unwrap()).unwrap();
    let peaks: Vec<f64> = extract_peaks(&s).peaks.iter().map(|k| k.delta).collect();
    let worst_b = if peaks.len() == 3 {
        peaks.iter().zip(&eig).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let b = worst_b <= p.cavity.gamma_c / 2.0;

    // (c) resonant Kerr-free single sphere
    let mut q = config("fig5.cfg").without_kerr().with_power(0.0);
    q.magnons[0].omega = q.cavity.omega_c;
    q.drive.omega_d = q.cavity.omega_c - mhz(27.0);
    let spec = ProbeSpec::around_cavity(&q).unwrap();
    let b1 = &solve_steady(&q).unwrap()[0];
    let s = response_single(&q, b1, &spec).unwrap();
    let pk: Vec<f64> = extract_peaks(&s).peaks.iter().map(|k| k.delta).collect();
    let (d0, g) = (mhz(27.0), q.magnons[0].g);
    let tol_c = spec.max_step() / 10.0 + q.cavity.gamma_c / 2.0;
    let worst_c = if pk.len() == 2 {
        (pk[0] - (d0 - g)).abs().max((pk[1] - (d0 + g)).abs())
    } else {
        f64::INFINITY
    };
    let c = worst_c <= tol_c;

    outcome(
        a && b && c,
        format!(
            "(a) worst rel {worst_a:.1e} {}; (b) worst |peak-eig|/2π {:.3} MHz vs {:.3} {}; (c) worst {:.3} MHz vs {:.3} {}",
            if a { "ok" } else { "FAIL" },
            to_mhz(worst_b),
            to_mhz(p.cavity.gamma_c / 2.0),
            if b { "ok" } else { "FAIL" },
            to_mhz(worst_c),
            to_mhz(tol_c),
            if c { "ok" } else { "FAIL" }
        ),
    )
}

fn criterion_7() -> Outcome {
    let p = config("fig6.cfg");
    let spec = SweepSpec::new(SweepParameter::Power, 0.0, 0.05, 400, Direction::Both).unwrap();
    let step = 0.05 / 399.0;
    let curves = shift_vs_power(&p, &spec, Polariton::Higher, &ProbeSpec::around_cavity(&p).unwrap()).unwrap();
    let mut congruent = true;
    let mut detail = Vec::new();
    let mut max_shift = f64::NEG_INFINITY;
    for c in &curves {
        let shift: Vec<f64> = shift_jumps(c, mhz(0.5));
        let sweep: Vec<f64> = c.trace.jumps.iter().map(|j| j.value).collect();
        let ok = shift.len() == sweep.len() && shift.iter().zip(&sweep).all(|(a, b)| (a - b).abs() <= step);
        congruent &= ok;
        max_shift = max_shift.max(c.shift.iter().flatten().fold(f64::NEG_INFINITY, |a, &b| a.max(b)));
        detail.push(format!(
            "{:?}: shift jumps {:.2?} mW, sweep jumps {:.2?} mW",
            c.direction,
            shift.iter().map(|v| v * 1e3).collect::<Vec<_>>(),
            sweep.iter().map(|v| v * 1e3).collect::<Vec<_>>()
        ));
    }
    let max_mhz = to_mhz(max_shift);
    let band = (20.0..=40.0).contains(&max_mhz);
    outcome(congruent && band, format!("{}; max HP shift {max_mhz:.2} MHz", detail.join("; ")))
}

/// Noise-free mean-field flow, written out independently of the library.
fn flow(p: &SystemParams, rabi: f64, y: &[Complex64]) -> Vec<Complex64> {
    let i = Complex64::i();
    let n = p.magnons.len();
    let a = y[n];
    let mut dy = Vec::with_capacity(n + 1);
    let mut coupling = Complex64::new(0.0, 0.0);
    for (k, m) in p.magnons.iter().enumerate() {
        let delta = m.omega + m.kerr - p.drive.omega_d;
        let mk = y[k];
        let drive = if k == 0 { rabi } else { 0.0 };
        dy.push(-(i * delta + m.gamma) * mk - 2.0 * i * m.kerr * mk.norm_sqr() * mk - i * m.g * a + drive);
        coupling += m.g * mk;
    }
    let delta_c = p.cavity.omega_c - p.drive.omega_d;
    dy.push(-(i * delta_c + p.cavity.gamma_c) * a - i * coupling);
    dy
}

fn rk4_step(p: &SystemParams, rabi: f64, y: &[Complex64], h: f64) -> Vec<Complex64> {
    let add = |a: &[Complex64], b: &[Complex64], s: f64| -> Vec<Complex64> { a.iter().zip(b).map(|(x, y)| x + y * s).collect() };
    let k1 = flow(p, rabi, y);
    let k2 = flow(p, rabi, &add(y, &k1, h / 2.0));
    let k3 = flow(p, rabi, &add(y, &k2, h / 2.0));
    let k4 = flow(p, rabi, &add(y, &k3, h));
    (0..y.len()).map(|j| y[j] + (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]) * (h / 6.0)).collect()
}

fn distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Whether a 1e-3 relative kick decays (`Some(true)`), grows tenfold
/// (`Some(false)`), or neither within 100/γ_c.
fn integrate(p: &SystemParams, b: &SteadyBranch, rng: &mut ChaCha8Rng) -> Option<bool> {
    let rabi = p.rabi().unwrap();
    let mut y0 = vec![b.m1];
    if let Some(m2) = b.m2 {
        y0.push(m2);
    }
    y0.push(b.a);
    let norm = y0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let dir: Vec<Complex64> = y0.iter().map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let dn = dir.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let eps = 1e-3 * norm;
    let mut y: Vec<Complex64> = y0.iter().zip(&dir).map(|(a, d)| a + d * (eps / dn)).collect();
    let mut fastest = p.cavity.omega_c - p.drive.omega_d;
    for m in &p.magnons {
        fastest = fastest.abs().max((m.omega - p.drive.omega_d).abs() + m.g + 4.0 * m.kerr * b.x.max(b.m1.norm_sqr()));
    }
    let fastest = fastest.abs().max(p.cavity.gamma_c) + p.magnons.iter().map(|m| m.g).sum::<f64>();
    let h = 0.05 / fastest;
    let t_end = 100.0 / p.cavity.gamma_c;
    let steps = (t_end / h).ceil() as usize;
    let mut t = 0.0;
    for _ in 0..steps {
        y = rk4_step(p, rabi, &y, h);
        t += h;
        let d = distance(&y, &y0);
        if d > 10.0 * eps {
            return Some(false);
        }
        if t > 0.5 * t_end && d < 0.1 * eps {
            return Some(true);
        }
    }
    let d = distance(&y, &y0);
    if d < eps {
        Some(true)
    } else {
        None
    }
}

fn criterion_8() -> Outcome {
    let mut samples: Vec<(String, SystemParams, SteadyBranch)> = Vec::new();
    for (name, mw) in [("fig2b_calibrated.cfg", 30.0), ("fig5_halfrate.cfg", 90.0), ("fig2a.cfg", 30.0)] {
        let p = config(name).with_power(mw * 1e-3);
        for b in solve_steady(&p).unwrap() {
            samples.push((format!("{name}@{mw}mW x={:.2e}", b.x), p.clone(), b));
        }
    }
    samples.truncate(10);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut mismatches = Vec::new();
    let (mut n_stable, mut n_unstable) = (0, 0);
    for (label, p, b) in &samples {
        if b.stable {
            n_stable += 1;
        } else {
            n_unstable += 1;
        }
        match integrate(p, b, &mut rng) {
            Some(s) if s == b.stable => {}
            other => mismatches.push(format!("{label}: jacobian {} ode {other:?}", b.stable)),
        }
    }
    outcome(
        samples.len() == 10 && mismatches.is_empty() && n_unstable > 0,
        format!("{} branches ({n_stable} stable, {n_unstable} unstable); mismatches {mismatches:?}", samples.len()),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 two-sphere tristable states", criterion_1),
        ("2 single-sphere bistable states", criterion_2),
        ("3 linear-limit oracle", criterion_3),
        ("4 residual invariant", criterion_4),
        ("5 hysteresis structure", criterion_5),
        ("6 spectroscopy oracles", criterion_6),
        ("7 shift-curve congruence", criterion_7),
        ("8 stability oracle", criterion_8),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|s| name.contains(s.as_str())) {
            continue;
        }
        let t = Instant::now();
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {name}: {} ({:.1}s) {}",
            if o.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            o.detail
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
