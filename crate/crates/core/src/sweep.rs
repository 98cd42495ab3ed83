//! Hysteretic parameter sweeps.
//!
//! Every grid point is solved independently (in parallel); the branch the
//! system sits on is then chosen by a sequential fold that follows the
//! previously selected branch in log-x. A step counts as a jump when it is
//! both an order of magnitude larger than the preceding step and changes x by
//! more than `MIN_JUMP_RATIO`.
//!
//! A grid point with no stable fixed point (every branch unstable, e.g. past
//! a Hopf bifurcation where the mean field self-oscillates) is recorded as a
//! gap: `selected[i]` is `None`. Following resumes from the last stable
//! selection and no jump is reported across a gap.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::steady::{solve_steady, SteadyBranch};

/// A jump must exceed the preceding continuous step by this factor.
pub const JUMP_INCREMENT_FACTOR: f64 = 10.0;
/// ...and change x by at least this ratio.
pub const MIN_JUMP_RATIO: f64 = 1.1;
/// Up/down selections closer than this (relative) count as identical.
pub const HYSTERESIS_RTOL: f64 = 1e-6;
pub const DEFAULT_POINTS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// Drive power, W.
    Power,
    /// Drive frequency, rad/s.
    OmegaD,
    /// Cavity frequency, rad/s.
    OmegaC,
    /// Cavity leakage, rad/s.
    GammaC,
}

impl SweepParameter {
    pub fn apply(self, params: &SystemParams, value: f64) -> SystemParams {
        match self {
            SweepParameter::Power => params.with_power(value),
            SweepParameter::OmegaD => params.with_omega_d(value),
            SweepParameter::OmegaC => params.with_omega_c(value),
            SweepParameter::GammaC => params.with_gamma_c(value),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
    Both,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub direction: Direction,
}

impl SweepSpec {
    pub fn new(parameter: SweepParameter, start: f64, stop: f64, points: usize, direction: Direction) -> Result<Self> {
        let s = Self { parameter, start, stop, points, direction };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::InvalidParams("a sweep needs at least 2 points".into()));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) || self.start == self.stop {
            return Err(Error::InvalidParams("sweep start and stop must be finite and distinct".into()));
        }
        Ok(())
    }

    /// Evenly spaced grid from `start` to `stop`.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JumpEvent {
    /// Index (in sweep order) of the first point after the jump.
    pub index: usize,
    /// Midpoint of the bracketing interval.
    pub value: f64,
    /// Half the bracketing interval.
    pub uncertainty: f64,
    pub x_before: f64,
    pub x_after: f64,
    /// More than one stable landing branch was available.
    pub ambiguous: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTrace {
    /// `Up` or `Down`.
    pub direction: Direction,
    /// Parameter values in sweep order.
    pub values: Vec<f64>,
    /// `None` where no stable fixed point exists.
    pub selected: Vec<Option<SteadyBranch>>,
    pub all_branches: Vec<Vec<SteadyBranch>>,
    pub jumps: Vec<JumpEvent>,
}

impl SweepTrace {
    pub fn selected_x(&self) -> Vec<Option<f64>> {
        self.selected.iter().map(|b| b.as_ref().map(|b| b.x)).collect()
    }

    /// Indices (in sweep order) with no stable fixed point.
    pub fn gaps(&self) -> Vec<usize> {
        self.selected.iter().enumerate().filter(|(_, b)| b.is_none()).map(|(i, _)| i).collect()
    }

    /// Closed parameter intervals covered by consecutive gap points.
    pub fn gap_intervals(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut open: Option<usize> = None;
        for (i, b) in self.selected.iter().enumerate() {
            match (b.is_none(), open) {
                (true, None) => open = Some(i),
                (false, Some(s)) => {
                    out.push(ordered(self.values[s], self.values[i - 1]));
                    open = None;
                }
                _ => {}
            }
        }
        if let Some(s) = open {
            out.push(ordered(self.values[s], self.values[self.values.len() - 1]));
        }
        out
    }

    pub fn stable_counts(&self) -> Vec<usize> {
        self.all_branches
            .iter()
            .map(|bs| bs.iter().filter(|b| b.stable).count())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Monostable,
    Bistable,
    Multistable,
}

impl Regime {
    pub fn from_stable_count(n: usize) -> Self {
        match n {
            0 | 1 => Regime::Monostable,
            2 => Regime::Bistable,
            _ => Regime::Multistable,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Monostable => "monostable",
            Regime::Bistable => "bistable",
            Regime::Multistable => "multistable",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub max_stable_count: usize,
    pub regime: Regime,
    pub up_jump_count: usize,
    pub down_jump_count: usize,
    pub up_jumps: Vec<JumpEvent>,
    pub down_jumps: Vec<JumpEvent>,
    /// Closed parameter intervals on which the up and down selections differ.
    pub hysteresis_window: Vec<(f64, f64)>,
}

/// Solves the steady state at every grid value, in parallel, in grid order.
pub fn solve_grid(params: &SystemParams, parameter: SweepParameter, values: &[f64]) -> Result<Vec<Vec<SteadyBranch>>> {
    values
        .par_iter()
        .map(|&v| solve_steady(&parameter.apply(params, v)))
        .collect()
}

fn log_distance(x: f64, prev: f64, is_smallest: bool) -> f64 {
    if x == 0.0 || prev == 0.0 {
        if is_smallest {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (x.ln() - prev.ln()).abs()
    }
}

/// Follows branches along `values` (already in sweep order).
fn follow(direction: Direction, values: Vec<f64>, all_branches: Vec<Vec<SteadyBranch>>) -> SweepTrace {
    let mut selected: Vec<Option<SteadyBranch>> = Vec::with_capacity(values.len());
    let mut jumps = Vec::new();
    // last stable selection and the step that led to it (infinite after a gap)
    let mut last: Option<(usize, SteadyBranch)> = None;
    let mut prev_step = f64::INFINITY;
    for (i, branches) in all_branches.iter().enumerate() {
        let stable: Vec<&SteadyBranch> = branches.iter().filter(|b| b.stable).collect();
        if stable.is_empty() {
            selected.push(None);
            continue;
        }
        let pick = match &last {
            None => match direction {
                Direction::Down => *stable.last().unwrap(),
                _ => stable[0],
            },
            Some((j, prev)) => {
                let mut best = stable[0];
                let mut best_d = f64::INFINITY;
                for (k, b) in stable.iter().enumerate() {
                    let d = log_distance(b.x, prev.x, k == 0);
                    if d < best_d {
                        best_d = d;
                        best = b;
                    }
                }
                let step = (best.x - prev.x).abs();
                let contiguous = *j + 1 == i;
                if contiguous
                    && best_d.is_finite()
                    && best_d > MIN_JUMP_RATIO.ln()
                    && step > JUMP_INCREMENT_FACTOR * prev_step
                {
                    jumps.push(JumpEvent {
                        index: i,
                        value: 0.5 * (values[i - 1] + values[i]),
                        uncertainty: 0.5 * (values[i] - values[i - 1]).abs(),
                        x_before: prev.x,
                        x_after: best.x,
                        ambiguous: stable.len() >= 2,
                    });
                }
                prev_step = if contiguous { step } else { f64::INFINITY };
                best
            }
        };
        last = Some((i, pick.clone()));
        selected.push(Some(pick.clone()));
    }
    SweepTrace { direction, values, selected, all_branches, jumps }
}

/// Runs the sweep; returns one trace per direction (`Both` → `[up, down]`).
pub fn run_sweep(params: &SystemParams, spec: &SweepSpec) -> Result<Vec<SweepTrace>> {
    spec.validate()?;
    let grid = spec.grid();
    let branches = solve_grid(params, spec.parameter, &grid)?;
    let up = || follow(Direction::Up, grid.clone(), branches.clone());
    let down = || {
        let v: Vec<f64> = grid.iter().rev().copied().collect();
        let b: Vec<Vec<SteadyBranch>> = branches.iter().rev().cloned().collect();
        follow(Direction::Down, v, b)
    };
    match spec.direction {
        Direction::Up => Ok(vec![up()]),
        Direction::Down => Ok(vec![down()]),
        Direction::Both => Ok(vec![up(), down()]),
    }
}

/// Parameter intervals where up and down selections disagree. `down` must be
/// the reverse traversal of the same grid as `up`.
pub fn hysteresis_window(up: &SweepTrace, down: &SweepTrace) -> Vec<(f64, f64)> {
    let n = up.values.len();
    let mut out = Vec::new();
    let mut open: Option<usize> = None;
    for i in 0..n {
        let differ = match (&up.selected[i], &down.selected[n - 1 - i]) {
            (Some(u), Some(d)) => (u.x - d.x).abs() > HYSTERESIS_RTOL * u.x.abs().max(d.x.abs()),
            (None, None) => false,
            _ => true,
        };
        match (differ, open) {
            (true, None) => open = Some(i),
            (false, Some(s)) => {
                out.push(ordered(up.values[s], up.values[i - 1]));
                open = None;
            }
            _ => {}
        }
    }
    if let Some(s) = open {
        out.push(ordered(up.values[s], up.values[n - 1]));
    }
    out
}

fn ordered(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

pub fn report_from_traces(up: &SweepTrace, down: &SweepTrace) -> RegimeReport {
    let max_stable_count = up.stable_counts().into_iter().max().unwrap_or(0);
    RegimeReport {
        max_stable_count,
        regime: Regime::from_stable_count(max_stable_count),
        up_jump_count: up.jumps.len(),
        down_jump_count: down.jumps.len(),
        up_jumps: up.jumps.clone(),
        down_jumps: down.jumps.clone(),
        hysteresis_window: hysteresis_window(up, down),
    }
}

pub fn classify_regime(params: &SystemParams, spec: &SweepSpec) -> Result<RegimeReport> {
    if spec.direction != Direction::Both {
        return Err(Error::Usage("regime classification needs an up and a down sweep".into()));
    }
    let traces = run_sweep(params, spec)?;
    Ok(report_from_traces(&traces[0], &traces[1]))
}

/// One regime report per cavity leakage value, all else fixed.
pub fn leakage_robustness(params: &SystemParams, gamma_c_values: &[f64], power_spec: &SweepSpec) -> Result<Vec<RegimeReport>> {
    if let Some(g) = gamma_c_values.iter().find(|g| !(**g > 0.0)) {
        return Err(Error::InvalidParams(format!("cavity leakage must be positive, got {g}")));
    }
    gamma_c_values
        .iter()
        .map(|&g| classify_regime(&params.with_gamma_c(g), power_spec))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ghz, mhz, nhz, CavityMode, Drive, DriveStrength, MagnonMode};
    use crate::steady::linear_spin_current;

    fn fig2(omega_d_ghz: f64) -> SystemParams {
        SystemParams::two(
            CavityMode { omega_c: ghz(10.078), gamma_c: mhz(4.3) },
            MagnonMode { omega: ghz(10.018), gamma: mhz(5.8), g: mhz(42.2), kerr: nhz(7.8) },
            MagnonMode { omega: ghz(9.963), gamma: mhz(1.7), g: mhz(33.5), kerr: nhz(42.12) },
            Drive { omega_d: ghz(omega_d_ghz), strength: DriveStrength::Power(0.0) },
        )
        .unwrap()
    }

    fn power_spec(points: usize) -> SweepSpec {
        SweepSpec::new(SweepParameter::Power, 0.0, 0.050, points, Direction::Both).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(SweepSpec::new(SweepParameter::Power, 0.0, 0.0, 10, Direction::Up).is_err());
        assert!(SweepSpec::new(SweepParameter::Power, 0.0, 1.0, 1, Direction::Up).is_err());
        let g = SweepSpec::new(SweepParameter::Power, 1.0, 0.0, 3, Direction::Up).unwrap().grid();
        assert_eq!(g, vec![1.0, 0.5, 0.0]);
    }

    #[test]
    fn fig2a_bistable_loop() {
        let traces = run_sweep(&fig2(9.9869), &power_spec(200)).unwrap();
        assert_eq!(traces[0].jumps.len(), 1);
        assert_eq!(traces[1].jumps.len(), 1);
        assert!(traces[0].jumps[0].value > traces[1].jumps[0].value);
    }

    #[test]
    fn fig2b_cascading_jumps() {
        let traces = run_sweep(&fig2(9.9989), &power_spec(200)).unwrap();
        assert_eq!(traces[0].jumps.len(), 2, "{:?}", traces[0].jumps);
        assert!(traces[0].jumps.iter().all(|j| j.x_after > j.x_before));
        // the top branch folds below the power where the middle one is born
        assert_eq!(traces[1].jumps.len(), 1, "{:?}", traces[1].jumps);
    }

    #[test]
    fn kerr_free_sweep_follows_linear_law() {
        let p = fig2(9.9989).without_kerr();
        let spec = SweepSpec::new(SweepParameter::Power, 0.0, 0.050, 50, Direction::Up).unwrap();
        let t = &run_sweep(&p, &spec).unwrap()[0];
        assert!(t.jumps.is_empty());
        for (v, b) in t.values.iter().zip(&t.selected) {
            let b = b.as_ref().unwrap();
            let lin = linear_spin_current(&p.with_power(*v)).unwrap();
            assert!((b.x - lin).abs() <= 1e-10 * lin.max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn selection_invariants() {
        let traces = run_sweep(&fig2(9.9989), &power_spec(120)).unwrap();
        for t in &traces {
            assert!(t.gaps().is_empty());
            for (sel, all) in t.selected.iter().zip(&t.all_branches) {
                let sel = sel.as_ref().unwrap();
                assert!(sel.stable);
                assert!(all.iter().any(|b| b == sel));
            }
            for j in &t.jumps {
                // branch structure changes across every jump
                let before = t.all_branches[j.index - 1].len();
                let after = t.all_branches[j.index].len();
                assert_ne!(before, after);
                let step = if j.index >= 2 {
                    let x = t.selected_x();
                    (x[j.index - 1].unwrap() - x[j.index - 2].unwrap()).abs()
                } else {
                    0.0
                };
                assert!((j.x_after - j.x_before).abs() > 10.0 * step);
            }
        }
    }

    #[test]
    fn outside_window_selections_agree() {
        let traces = run_sweep(&fig2(9.9869), &power_spec(100)).unwrap();
        let (up, down) = (&traces[0], &traces[1]);
        let win = hysteresis_window(up, down);
        assert_eq!(win.len(), 1);
        let n = up.values.len();
        for i in 0..n {
            let v = up.values[i];
            if win.iter().any(|(a, b)| v >= *a && v <= *b) {
                continue;
            }
            let (xu, xd) = (up.selected_x()[i].unwrap(), down.selected_x()[n - 1 - i].unwrap());
            assert!((xu - xd).abs() <= 1e-6 * xu.max(xd));
        }
    }

    #[test]
    fn oscillatory_window_is_a_gap() {
        // past a Hopf point the only fixed point is unstable
        let p = fig2(10.0).with_omega_c(ghz(10.07));
        let spec = SweepSpec::new(SweepParameter::Power, 0.020, 0.030, 41, Direction::Both).unwrap();
        let traces = run_sweep(&p, &spec).unwrap();
        for t in &traces {
            let gaps = t.gaps();
            assert!(!gaps.is_empty());
            for &i in &gaps {
                assert!(t.all_branches[i].iter().all(|b| !b.stable));
            }
            assert_eq!(t.gap_intervals().len(), 1);
        }
        // gaps coincide in both directions, so they never open a hysteresis window by themselves
        let n = traces[0].values.len();
        let down_gaps: Vec<usize> = traces[1].gaps().iter().map(|i| n - 1 - i).rev().collect();
        assert_eq!(traces[0].gaps(), down_gaps);
    }

    #[test]
    fn sweeps_are_deterministic() {
        let a = run_sweep(&fig2(9.9989), &power_spec(60)).unwrap();
        let b = run_sweep(&fig2(9.9989), &power_spec(60)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn undriven_frequency_sweep_is_monostable() {
        let p = fig2(9.9989).with_rabi(0.0);
        let spec = SweepSpec::new(SweepParameter::OmegaD, ghz(9.95), ghz(10.05), 40, Direction::Both).unwrap();
        let r = classify_regime(&p, &spec).unwrap();
        assert_eq!(r.regime, Regime::Monostable);
        assert!(r.hysteresis_window.is_empty());
        assert_eq!(r.up_jump_count + r.down_jump_count, 0);
    }

    #[test]
    fn classify_requires_both_directions() {
        let spec = SweepSpec::new(SweepParameter::Power, 0.0, 0.05, 10, Direction::Up).unwrap();
        assert!(classify_regime(&fig2(9.9989), &spec).is_err());
    }

    #[test]
    fn leakage_rejects_nonpositive() {
        assert!(leakage_robustness(&fig2(9.998), &[mhz(4.3), 0.0], &power_spec(10)).is_err());
    }
}
