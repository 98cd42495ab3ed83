//! Scenario runners behind the command-line tool. Each returns an
//! `OutputTable`; the binary only parses arguments and writes the result.

use crate::error::{Error, Result};
use crate::model::{ghz, mhz, to_ghz, to_mhz, SystemParams};
use crate::output::{Cell, OutputTable};
use crate::probe::{
    extract_peaks, response_single, response_two, shift_jumps, shift_vs_power, Polariton, ProbeSpec,
};
use crate::steady::{linear_spin_current, solve_steady, solve_two_yig};
use crate::sweep::{report_from_traces, run_sweep, Direction, RegimeReport, SweepParameter, SweepSpec, SweepTrace};

/// Environment variable limiting the worker-thread count.
pub const THREADS_ENV: &str = "KERR_MAGNONICS_THREADS";

/// Shift steps smaller than this (MHz) never count as jumps.
pub const SHIFT_JUMP_FLOOR_MHZ: f64 = 0.5;

impl SweepParameter {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "power" => Ok(SweepParameter::Power),
            "omega_d" => Ok(SweepParameter::OmegaD),
            "omega_c" => Ok(SweepParameter::OmegaC),
            "gamma_c" => Ok(SweepParameter::GammaC),
            _ => Err(Error::Usage(format!("unknown sweep parameter `{s}` (power, omega_d, omega_c, gamma_c)"))),
        }
    }

    /// CSV column name, including the unit used on the command line.
    pub fn column(self) -> &'static str {
        match self {
            SweepParameter::Power => "power_mW",
            SweepParameter::OmegaD => "omega_d_GHz",
            SweepParameter::OmegaC => "omega_c_GHz",
            SweepParameter::GammaC => "gamma_c_MHz",
        }
    }

    /// Converts a command-line value (mW, GHz or MHz) to SI.
    pub fn from_user(self, v: f64) -> f64 {
        match self {
            SweepParameter::Power => v * 1e-3,
            SweepParameter::OmegaD | SweepParameter::OmegaC => ghz(v),
            SweepParameter::GammaC => mhz(v),
        }
    }

    pub fn to_user(self, v: f64) -> f64 {
        match self {
            SweepParameter::Power => v * 1e3,
            SweepParameter::OmegaD | SweepParameter::OmegaC => to_ghz(v),
            SweepParameter::GammaC => to_mhz(v),
        }
    }
}

impl Direction {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "up" => Ok(Direction::Up),
            "down" => Ok(Direction::Down),
            "both" => Ok(Direction::Both),
            _ => Err(Error::Usage(format!("unknown direction `{s}` (up, down, both)"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
            Direction::Both => "both",
        }
    }
}

/// Which branches `spectrum` runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchChoice {
    /// Every stable branch.
    All,
    /// Any branch by solver order, stable or not.
    Index(usize),
}

impl BranchChoice {
    pub fn parse(s: &str) -> Result<Self> {
        if s == "all" {
            return Ok(BranchChoice::All);
        }
        s.parse()
            .map(BranchChoice::Index)
            .map_err(|_| Error::Usage(format!("--branch expects an index or `all`, got `{s}`")))
    }
}

/// Parses `from:to:points` with frequencies in MHz.
pub fn parse_grid(s: &str) -> Result<ProbeSpec> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::Usage(format!("--grid expects from:to:points (MHz), got `{s}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    ProbeSpec::uniform(mhz(lo), mhz(hi), n)
}

fn power_params(params: &SystemParams, power_mw: Option<f64>) -> Result<SystemParams> {
    match power_mw {
        Some(p) if !(p >= 0.0 && p.is_finite()) => Err(Error::Usage(format!("--power must be non-negative, got {p}"))),
        Some(p) => Ok(params.with_power(p * 1e-3)),
        None => Ok(params.clone()),
    }
}

/// All steady states at one drive power (mW; the config value if `None`).
pub fn cmd_steady(params: &SystemParams, power_mw: Option<f64>) -> Result<OutputTable> {
    let p = power_params(params, power_mw)?;
    let branches = solve_steady(&p)?;
    let mut t = OutputTable::new([
        "x",
        "re_m1",
        "im_m1",
        "re_m2",
        "im_m2",
        "re_a",
        "im_a",
        "residual",
        "stable",
        "max_re_eigenvalue_per_s",
    ]);
    for b in &branches {
        let m2 = b.m2;
        t.push(vec![
            b.x.into(),
            b.m1.re.into(),
            b.m1.im.into(),
            Cell::opt(m2.map(|z| z.re)),
            Cell::opt(m2.map(|z| z.im)),
            b.a.re.into(),
            b.a.im.into(),
            b.residual.into(),
            Cell::flag(b.stable),
            b.max_real_eigenvalue().into(),
        ]);
        if !b.within_validity(&p.constants) {
            t.warn(format!("x = {:e} exceeds the low-excitation bound 2S = {:e}", b.x, p.constants.total_spin));
        }
    }
    let stable = branches.iter().filter(|b| b.stable).count();
    t.note(format!("rabi_per_s = {:e}", p.rabi()?));
    t.note(format!("branches = {}, stable = {}", branches.len(), stable));
    Ok(t)
}

fn jump_list(param: SweepParameter, jumps: &[f64]) -> String {
    if jumps.is_empty() {
        return "none".into();
    }
    jumps.iter().map(|v| format!("{:.6}", param.to_user(*v))).collect::<Vec<_>>().join(" ")
}

fn regime_summary(t: &mut OutputTable, param: SweepParameter, report: &RegimeReport) {
    t.note(format!("regime = {}", report.regime.as_str()));
    t.note(format!("max_stable_count = {}", report.max_stable_count));
    let up: Vec<f64> = report.up_jumps.iter().map(|j| j.value).collect();
    let down: Vec<f64> = report.down_jumps.iter().map(|j| j.value).collect();
    t.note(format!("up_jumps = {} at {} {}", report.up_jump_count, jump_list(param, &up), param.column()));
    t.note(format!("down_jumps = {} at {} {}", report.down_jump_count, jump_list(param, &down), param.column()));
    let window = if report.hysteresis_window.is_empty() {
        "none".to_string()
    } else {
        report
            .hysteresis_window
            .iter()
            .map(|(a, b)| format!("{:.6}..{:.6}", param.to_user(*a), param.to_user(*b)))
            .collect::<Vec<_>>()
            .join(" ")
    };
    t.note(format!("hysteresis_window = {window} {}", param.column()));
}

fn trace_summary(t: &mut OutputTable, param: SweepParameter, trace: &SweepTrace) {
    let values: Vec<f64> = trace.jumps.iter().map(|j| j.value).collect();
    t.note(format!("{}_jumps = {} at {} {}", trace.direction.as_str(), values.len(), jump_list(param, &values), param.column()));
    let max = trace.stable_counts().into_iter().max().unwrap_or(0);
    t.note(format!("max_stable_count = {max}"));
    for j in trace.jumps.iter().filter(|j| j.ambiguous) {
        t.warn(format!("jump at {:.6} {} had several stable landing branches", param.to_user(j.value), param.column()));
    }
}

/// Gaps are the same for every direction, so one trace is enough.
fn gap_warnings(t: &mut OutputTable, param: SweepParameter, trace: &SweepTrace) {
    for (a, b) in trace.gap_intervals() {
        t.warn(format!(
            "no stable steady state for {} in [{:.6}, {:.6}] (all fixed points unstable; x left empty)",
            param.column(),
            param.to_user(a),
            param.to_user(b)
        ));
    }
}

/// Hysteretic sweep of one parameter; `from`/`to` in the parameter's
/// command-line unit (mW, GHz or MHz).
pub fn cmd_sweep(
    params: &SystemParams,
    param: SweepParameter,
    from: f64,
    to: f64,
    points: usize,
    direction: Direction,
) -> Result<OutputTable> {
    let spec = SweepSpec::new(param, param.from_user(from), param.from_user(to), points, direction)?;
    let traces = run_sweep(params, &spec)?;
    let mut t = OutputTable::new(["direction", param.column(), "x", "stable_count", "jump"]);
    for tr in &traces {
        let counts = tr.stable_counts();
        for (i, v) in tr.values.iter().enumerate() {
            let jump = tr.jumps.iter().any(|j| j.index == i);
            t.push(vec![
                tr.direction.as_str().into(),
                param.to_user(*v).into(),
                Cell::opt(tr.selected[i].as_ref().map(|b| b.x)),
                counts[i].into(),
                Cell::flag(jump),
            ]);
        }
    }
    if let [up, down] = traces.as_slice() {
        regime_summary(&mut t, param, &report_from_traces(up, down));
    } else {
        trace_summary(&mut t, param, &traces[0]);
    }
    gap_warnings(&mut t, param, &traces[0]);
    Ok(t)
}

/// Probe transmission on one or all steady branches at one power.
pub fn cmd_spectrum(
    params: &SystemParams,
    power_mw: Option<f64>,
    branch: BranchChoice,
    grid: Option<ProbeSpec>,
) -> Result<OutputTable> {
    let p = power_params(params, power_mw)?;
    let branches = solve_steady(&p)?;
    let chosen: Vec<usize> = match branch {
        BranchChoice::All => (0..branches.len()).filter(|&k| branches[k].stable).collect(),
        BranchChoice::Index(i) if i < branches.len() => vec![i],
        BranchChoice::Index(i) => {
            let available: Vec<String> = branches
                .iter()
                .enumerate()
                .map(|(k, b)| format!("{k} (x = {:e}, {})", b.x, if b.stable { "stable" } else { "unstable" }))
                .collect();
            return Err(Error::Usage(format!("branch {i} does not exist; available: {}", available.join(", "))));
        }
    };
    let spec = match grid {
        Some(g) => g,
        None => ProbeSpec::around_cavity(&p)?,
    };
    if !spec.resolves(p.cavity.gamma_c) {
        return Err(Error::Usage("probe grid step exceeds γ_c/10; use more points".into()));
    }
    let mut t = OutputTable::new(["branch", "delta_MHz", "re_T", "im_T", "abs_T2"]);
    let wd = to_ghz(p.drive.omega_d);
    for &k in &chosen {
        let b = &branches[k];
        let s = if p.magnon_count() == 1 { response_single(&p, b, &spec)? } else { response_two(&p, b, &spec)? };
        for i in 0..s.delta.len() {
            t.push(vec![k.into(), to_mhz(s.delta[i]).into(), s.t[i].re.into(), s.t[i].im.into(), s.magnitude2[i].into()]);
        }
        let peaks = extract_peaks(&s);
        t.note(format!(
            "branch {k}: x = {:e}, {}, {} peaks",
            b.x,
            if b.stable { "stable" } else { "unstable" },
            peaks.peaks.len()
        ));
        for pk in &peaks.peaks {
            t.note(format!(
                "branch {k} peak {}: delta_MHz = {:.6}, probe_GHz = {:.6}, abs_T2 = {:e}",
                pk.label.map_or("-", |l| l.label()),
                to_mhz(pk.delta),
                wd + to_ghz(pk.delta),
                pk.height
            ));
        }
        for w in peaks.warnings {
            t.warn(format!("branch {k}: {w}"));
        }
    }
    Ok(t)
}

/// Polariton frequency shift versus drive power along hysteretic sweeps.
pub fn cmd_shift(
    params: &SystemParams,
    sigma: Polariton,
    from_mw: f64,
    to_mw: f64,
    points: usize,
    direction: Direction,
    grid: Option<ProbeSpec>,
) -> Result<OutputTable> {
    let spec = SweepSpec::new(SweepParameter::Power, from_mw * 1e-3, to_mw * 1e-3, points, direction)?;
    let probe = match grid {
        Some(g) => g,
        None => ProbeSpec::around_cavity(params)?,
    };
    let curves = shift_vs_power(params, &spec, sigma, &probe)?;
    let col = format!("shift_{}_MHz", sigma.label());
    let mut t = OutputTable::new(["power_mW", col.as_str(), "direction"]);
    for c in &curves {
        for ((pw, s), b) in c.power.iter().zip(&c.shift).zip(&c.trace.selected) {
            t.push(vec![(pw * 1e3).into(), Cell::opt(s.map(to_mhz)), c.direction.as_str().into()]);
            if s.is_none() && b.is_some() {
                t.warn(format!("{} peak not resolved at {:.6} mW ({})", sigma.label(), pw * 1e3, c.direction.as_str()));
            }
        }
    }
    t.note(format!("reference_{}_MHz = {:.6}", sigma.label(), to_mhz(curves[0].reference)));
    for c in &curves {
        let jumps = shift_jumps(c, mhz(SHIFT_JUMP_FLOOR_MHZ));
        t.note(format!(
            "{}_shift_jumps = {} at {} power_mW",
            c.direction.as_str(),
            jumps.len(),
            jump_list(SweepParameter::Power, &jumps)
        ));
        let max = c.shift.iter().flatten().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        if max.is_finite() {
            t.note(format!("{}_max_shift_MHz = {:.6}", c.direction.as_str(), to_mhz(max)));
        }
    }
    if let [up, down] = curves.as_slice() {
        let report = report_from_traces(&up.trace, &down.trace);
        t.note(format!("regime = {}", report.regime.as_str()));
    }
    gap_warnings(&mut t, SweepParameter::Power, &curves[0].trace);
    Ok(t)
}

/// Kerr-free spin current: closed form versus the polynomial root.
pub fn cmd_linear(params: &SystemParams, power_mw: Option<f64>) -> Result<OutputTable> {
    let p = power_params(params, power_mw)?;
    if p.magnon_count() != 2 {
        return Err(Error::ModeCount { expected: 2, found: p.magnon_count() });
    }
    let x_lin = linear_spin_current(&p)?;
    let roots = solve_two_yig(&p.without_kerr())?;
    if roots.len() != 1 {
        return Err(Error::Precondition(format!("Kerr-free polynomial has {} roots", roots.len())));
    }
    let x_root = roots[0].x;
    let rel = if x_lin == 0.0 && x_root == 0.0 { 0.0 } else { (x_root - x_lin).abs() / x_lin.abs().max(x_root.abs()) };
    let power = match p.drive.strength {
        crate::model::DriveStrength::Power(w) => Cell::num(w * 1e3),
        crate::model::DriveStrength::Rabi(_) => Cell::Empty,
    };
    let mut t = OutputTable::new(["power_mW", "x_linear", "x_root", "rel_diff"]);
    t.push(vec![power, x_lin.into(), x_root.into(), rel.into()]);
    Ok(t)
}

/// What a generated plot script should draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Steady,
    Sweep,
    Spectrum,
    Shift,
    Linear,
}

/// A matplotlib script that plots the CSV written to `csv_path`.
pub fn plot_script(kind: PlotKind, csv_path: &str) -> String {
    let body = match kind {
        PlotKind::Sweep => {
            "for d in sorted(set(r[0] for r in rows)):\n    sel = [r for r in rows if r[0] == d]\n    ax.plot([float(r[1]) for r in sel], [float(r[2]) for r in sel], label=d)\nax.set_xlabel(header[1])\nax.set_ylabel('x')\nax.set_yscale('log')\n"
        }
        PlotKind::Spectrum => {
            "for b in sorted(set(r[0] for r in rows)):\n    sel = [r for r in rows if r[0] == b]\n    ax.plot([float(r[1]) for r in sel], [float(r[4]) for r in sel], label='branch ' + b)\nax.set_xlabel('delta (MHz)')\nax.set_ylabel('|T|^2')\n"
        }
        PlotKind::Shift => {
            "for d in sorted(set(r[2] for r in rows)):\n    sel = [r for r in rows if r[2] == d and r[1] != '']\n    ax.plot([float(r[0]) for r in sel], [float(r[1]) for r in sel], label=d)\nax.set_xlabel('power (mW)')\nax.set_ylabel(header[1])\n"
        }
        PlotKind::Steady | PlotKind::Linear => {
            "ax.plot(range(len(rows)), [float(r[header.index('x') if 'x' in header else 1]) for r in rows], 'o')\nax.set_xlabel('row')\nax.set_ylabel('x')\nax.set_yscale('log')\n"
        }
    };
    format!(
        "import csv\nimport matplotlib.pyplot as plt\n\nwith open({csv_path:?}) as f:\n    lines = [l for l in f if not l.startswith('#')]\nreader = csv.reader(lines)\nheader = next(reader)\nrows = list(reader)\nfig, ax = plt.subplots()\n{body}if ax.get_legend_handles_labels()[0]:\n    ax.legend()\nfig.savefig({:?})\n",
        format!("{csv_path}.png")
    )
}
