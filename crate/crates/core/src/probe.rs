//! Weak-probe linear response on top of a driven steady state.
//!
//! A probe at detuning δ from the drive excites first-order sidebands
//! (M₊, M₋*, A₊, A₋*) around each steady amplitude. The Kerr term couples
//! each sideband to the conjugate of the other, so for n magnon modes the
//! response is a 2(n+1)-dimensional complex linear system. The transmission
//! is the normalized cavity sideband T(δ) = A₊/ℰ_p.
//!
//! The direct linear solve is the canonical path. The closed-form
//! transmission amplitudes are kept as independent cross-checks.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{derive_detunings, mhz, SystemParams};
use crate::steady::SteadyBranch;
use crate::sweep::{run_sweep, Direction, SweepParameter, SweepSpec, SweepTrace};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Closed-form and direct two-sphere transmissions agree when their relative
/// difference is below this.
pub const CLOSED_FORM_AGREEMENT: f64 = 1e-6;
/// Local maxima lower than this fraction of the tallest one are ignored.
pub const PEAK_FLOOR: f64 = 1e-3;
pub const DEFAULT_GRID_POINTS: usize = 4001;
/// Half-width of the default probe window, MHz.
pub const DEFAULT_HALF_WIDTH_MHZ: f64 = 150.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSpec {
    /// Probe detunings δ = ω − ω_d, rad/s, strictly increasing.
    pub delta_grid: Vec<f64>,
    /// Probe Rabi amplitude; T is normalized by it.
    pub ep: f64,
}

impl ProbeSpec {
    pub fn new(delta_grid: Vec<f64>, ep: f64) -> Result<Self> {
        let s = Self { delta_grid, ep };
        s.validate()?;
        Ok(s)
    }

    /// `points` evenly spaced detunings on `[lo, hi]` (rad/s).
    pub fn uniform(lo: f64, hi: f64, points: usize) -> Result<Self> {
        if points < 3 || !(hi > lo) {
            return Err(Error::InvalidParams("probe grid needs hi > lo and at least 3 points".into()));
        }
        let grid = (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect();
        Self::new(grid, 1.0)
    }

    /// The default window: ±150 MHz around the cavity detuning, 4001 points.
    pub fn around_cavity(params: &SystemParams) -> Result<Self> {
        let dc = params.cavity.omega_c - params.drive.omega_d;
        let hw = mhz(DEFAULT_HALF_WIDTH_MHZ);
        Self::uniform(dc - hw, dc + hw, DEFAULT_GRID_POINTS)
    }

    pub fn validate(&self) -> Result<()> {
        if self.delta_grid.len() < 3 {
            return Err(Error::InvalidParams("probe grid needs at least 3 points".into()));
        }
        if self.delta_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParams("probe grid must be strictly increasing".into()));
        }
        if !(self.ep.is_finite() && self.ep != 0.0) {
            return Err(Error::InvalidParams("probe amplitude must be finite and nonzero".into()));
        }
        Ok(())
    }

    pub fn max_step(&self) -> f64 {
        self.delta_grid
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// Whether the grid step resolves a linewidth γ (step ≤ γ/10).
    pub fn resolves(&self, gamma: f64) -> bool {
        self.max_step() <= gamma / 10.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub delta: Vec<f64>,
    pub t: Vec<Complex64>,
    pub magnitude2: Vec<f64>,
    /// Steady state the probe is applied on.
    pub branch: SteadyBranch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polariton {
    Lower,
    Middle,
    Higher,
}

impl Polariton {
    pub fn label(self) -> &'static str {
        match self {
            Polariton::Lower => "LP",
            Polariton::Middle => "MP",
            Polariton::Higher => "HP",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "LP" => Some(Polariton::Lower),
            "MP" => Some(Polariton::Middle),
            "HP" => Some(Polariton::Higher),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Refined probe detuning, rad/s.
    pub delta: f64,
    pub height: f64,
    pub label: Option<Polariton>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolaritonPeaks {
    /// Ascending in frequency.
    pub peaks: Vec<Peak>,
    pub warnings: Vec<String>,
}

impl PolaritonPeaks {
    pub fn get(&self, sigma: Polariton) -> Option<&Peak> {
        self.peaks.iter().find(|p| p.label == Some(sigma))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftCurve {
    /// Drive powers in sweep order, W.
    pub power: Vec<f64>,
    /// Δ_σ = ω_σ − ω_σ⁰ (rad/s); `None` where the peak was not resolved.
    pub shift: Vec<Option<f64>>,
    pub sigma: Polariton,
    /// `Up` or `Down`.
    pub direction: Direction,
    /// Zero-drive peak position δ_σ⁰, rad/s.
    pub reference: f64,
    /// The spin-current trace the curve was computed along.
    pub trace: SweepTrace,
}

/// Steady amplitudes as a list (M₁[, M₂]).
fn magnon_amplitudes(params: &SystemParams, branch: &SteadyBranch) -> Result<Vec<Complex64>> {
    match (params.magnon_count(), branch.m2) {
        (1, None) => Ok(vec![branch.m1]),
        (2, Some(m2)) => Ok(vec![branch.m1, m2]),
        _ => Err(Error::Precondition("branch does not match the number of magnon modes".into())),
    }
}

/// Solves the first-order sideband equations at one probe detuning and
/// returns T(δ) = A₊/ℰ_p.
pub fn transmission_direct(params: &SystemParams, branch: &SteadyBranch, delta: f64, ep: f64) -> Result<Complex64> {
    let amps = magnon_amplitudes(params, branch)?;
    let det = derive_detunings(params);
    let n = amps.len();
    let dim = 2 * (n + 1);
    let cav = 2 * n;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    let d_c = det.d_c;
    for (j, (mode, m0)) in params.magnons.iter().zip(&amps).enumerate() {
        let big = Complex64::new(det.delta[j] + 4.0 * mode.kerr * m0.norm_sqr(), -mode.gamma);
        let pump = 2.0 * mode.kerr * m0 * m0;
        let (r, c) = (2 * j, 2 * j);
        // (Δ−δ)M₊ + 2U M₀² M₋* + g A₊ = 0
        m[(r, c)] = big - delta;
        m[(r, c + 1)] = pump;
        m[(r, cav)] = mode.g.into();
        // 2U M₀*² M₊ + (Δ*+δ) M₋* + g A₋* = 0
        m[(r + 1, c)] = pump.conj();
        m[(r + 1, c + 1)] = big.conj() + delta;
        m[(r + 1, cav + 1)] = mode.g.into();
        // Σ g M₊ + (Δ_c−δ) A₊ = −iℰ_p ; Σ g M₋* + (Δ_c*+δ) A₋* = 0
        m[(cav, c)] = mode.g.into();
        m[(cav + 1, c + 1)] = mode.g.into();
    }
    m[(cav, cav)] = d_c - delta;
    m[(cav + 1, cav + 1)] = d_c.conj() + delta;
    let mut rhs = DVector::<Complex64>::zeros(dim);
    rhs[cav] = -I * ep;
    let sol = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular(format!("sideband system singular at δ = {delta:e}")))?;
    Ok(sol[cav] / ep)
}

fn spectrum(params: &SystemParams, branch: &SteadyBranch, spec: &ProbeSpec) -> Result<Spectrum> {
    spec.validate()?;
    let t: Vec<Complex64> = spec
        .delta_grid
        .par_iter()
        .map(|&d| transmission_direct(params, branch, d, spec.ep))
        .collect::<Result<_>>()?;
    let magnitude2 = t.iter().map(|z| z.norm_sqr()).collect();
    Ok(Spectrum {
        delta: spec.delta_grid.clone(),
        t,
        magnitude2,
        branch: branch.clone(),
    })
}

/// Single-sphere transmission spectrum from the 4×4 sideband system.
pub fn response_single(params: &SystemParams, branch: &SteadyBranch, spec: &ProbeSpec) -> Result<Spectrum> {
    if params.magnon_count() != 1 {
        return Err(Error::ModeCount { expected: 1, found: params.magnon_count() });
    }
    spectrum(params, branch, spec)
}

/// Two-sphere transmission spectrum from the 6×6 sideband system.
pub fn response_two(params: &SystemParams, branch: &SteadyBranch, spec: &ProbeSpec) -> Result<Spectrum> {
    if params.magnon_count() != 2 {
        return Err(Error::ModeCount { expected: 2, found: params.magnon_count() });
    }
    spectrum(params, branch, spec)
}

/// Closed-form single-sphere transmission
/// T = −i/(Δ_c−δ)·[1 + g²/((Δ_c−δ)v)] with
/// v = Δ − δ − g²/(Δ_c−δ) − 4U²|M₀|⁴(Δ_c*+δ)/((Δ_c*+δ)(Δ*+δ) − g²).
pub fn closed_form_single(params: &SystemParams, branch: &SteadyBranch, delta: f64) -> Result<Complex64> {
    if params.magnon_count() != 1 {
        return Err(Error::ModeCount { expected: 1, found: params.magnon_count() });
    }
    let det = derive_detunings(params);
    let mode = &params.magnons[0];
    let n0 = branch.m1.norm_sqr();
    let big = Complex64::new(det.delta[0] + 4.0 * mode.kerr * n0, -mode.gamma);
    let dc = det.d_c;
    let g2 = mode.g * mode.g;
    let cav = dc - delta;
    let idler = (dc.conj() + delta) * (big.conj() + delta) - g2;
    let v = big - delta - g2 / cav - 4.0 * mode.kerr * mode.kerr * n0 * n0 * (dc.conj() + delta) / idler;
    if v.norm() == 0.0 || !v.is_finite() {
        return Err(Error::Singular(format!("v vanishes at δ = {delta:e}")));
    }
    Ok(-I / cav * (1.0 + g2 / (cav * v)))
}

/// Polariton detunings (δ_LP, δ_HP) of one sphere at magnon number `x0`.
///
/// δ² = ½[D² + δ_c² + 2g² − Λ² ± √(𝓕 + 4Λ²δ_c²)],
/// 𝓕 = ((D−δ_c)² + 4g² − Λ²)((D+δ_c)² − Λ²), with D = δ_m + 4U x0 and
/// Λ = 2U x0. Signs are those of the eigenvalues of the 2×2 coupling
/// matrix [[D, g], [g, δ_c]].
pub fn peak_positions_single(params: &SystemParams, x0: f64) -> Result<(f64, f64)> {
    if params.magnon_count() != 1 {
        return Err(Error::ModeCount { expected: 1, found: params.magnon_count() });
    }
    if !(x0 >= 0.0) {
        return Err(Error::Domain(format!("magnon number must be non-negative, got {x0}")));
    }
    let det = derive_detunings(params);
    let mode = &params.magnons[0];
    let dc = det.delta_c;
    let d = det.delta[0] + 4.0 * mode.kerr * x0;
    let lam2 = (2.0 * mode.kerr * x0).powi(2);
    let g2 = mode.g * mode.g;
    let f = ((d - dc).powi(2) + 4.0 * g2 - lam2) * ((d + dc).powi(2) - lam2);
    let disc = f + 4.0 * lam2 * dc * dc;
    if disc < 0.0 {
        return Err(Error::ComplexFrequency(disc));
    }
    let base = d * d + dc * dc + 2.0 * g2 - lam2;
    let s_hi = 0.5 * (base + disc.sqrt());
    let s_lo = 0.5 * (base - disc.sqrt());
    if s_lo < 0.0 {
        return Err(Error::ComplexFrequency(s_lo));
    }
    let (big, small) = (s_hi.sqrt(), s_lo.sqrt());
    let sum = d + dc;
    let product = d * dc - g2;
    Ok(if sum >= 0.0 {
        (small.copysign(product), big)
    } else {
        (-big, small.copysign(-product))
    })
}

/// Intermediate quantities of the two-sphere closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeCoefficients {
    pub v11: Complex64,
    pub v12: Complex64,
    pub v21: Complex64,
    pub v22: Complex64,
    pub alpha1: Complex64,
    pub alpha2: Complex64,
}

/// The 2×2 reduction of the two-sphere sideband system, coefficient by
/// coefficient as published, including the (Δ_c*+δ)(Δ_c+δ) factor in the
/// v₁₁ and v₂₂ denominators.
pub fn closed_form_two_coefficients(params: &SystemParams, branch: &SteadyBranch, delta: f64) -> Result<TwoModeCoefficients> {
    let amps = magnon_amplitudes(params, branch)?;
    if amps.len() != 2 {
        return Err(Error::ModeCount { expected: 2, found: amps.len() });
    }
    let (p1, p2) = (&params.magnons[0], &params.magnons[1]);
    let (m10, m20) = (amps[0], amps[1]);
    if m10.norm() == 0.0 || m20.norm() == 0.0 {
        return Err(Error::Precondition("closed form needs nonzero steady amplitudes; use the direct solve".into()));
    }
    if p1.kerr == 0.0 || p2.kerr == 0.0 {
        return Err(Error::Precondition("closed form needs nonzero Kerr coefficients; use the direct solve".into()));
    }
    let det = derive_detunings(params);
    let dc = det.d_c;
    let big1 = Complex64::new(det.delta[0] + 4.0 * p1.kerr * m10.norm_sqr(), -p1.gamma);
    let big2 = Complex64::new(det.delta[1] + 4.0 * p2.kerr * m20.norm_sqr(), -p2.gamma);
    let (g1, g2) = (p1.g, p2.g);
    let (g1s, g2s) = (g1 * g1, g2 * g2);
    let (u1, u2) = (p1.kerr, p2.kerr);
    let cav = dc - delta;
    let cav_conj = dc.conj() + delta;
    let r12 = u1 * m10 * m10 / (u2 * m20 * m20);
    let r21 = 1.0 / r12;
    let den11 = cav_conj * (dc + delta) - g1s;
    let den22 = cav_conj * (dc + delta) - g2s;
    let den1 = cav_conj * (big1.conj() + delta) - g1s;
    let den2 = cav_conj * (big2.conj() + delta) - g2s;
    let v11 = big1 - delta - g1s / cav
        + r12 * (g1s * g2s - 4.0 * u1 * u2 * cav_conj * cav * m10.conj().powi(2) * m20 * m20) / (cav * den11);
    let v12 = g1 * g2 / cav * (r12 * (g2s - cav * (big2 - delta)) / den1 - 1.0);
    let v21 = g1 * g2 / cav * (r21 * (g1s - cav * (big1 - delta)) / den2 - 1.0);
    let v22 = big2 - delta - g2s / cav
        + r21 * (g1s * g2s - 4.0 * u1 * u2 * cav_conj * cav * m10 * m10 * m20.conj().powi(2)) / (cav * den22);
    let alpha1 = g1 / cav * (1.0 - r12 * g2s / den1);
    let alpha2 = g2 / cav * (1.0 - r21 * g1s / den2);
    let out = TwoModeCoefficients { v11, v12, v21, v22, alpha1, alpha2 };
    let all = [v11, v12, v21, v22, alpha1, alpha2];
    if all.iter().any(|z| !z.is_finite()) {
        return Err(Error::Precondition(format!("zero denominator in the closed form at δ = {delta:e}")));
    }
    Ok(out)
}

/// Two-sphere closed-form transmission, together with whether it agrees
/// with the direct sideband solve to `CLOSED_FORM_AGREEMENT`.
pub fn closed_form_two(params: &SystemParams, branch: &SteadyBranch, delta: f64) -> Result<(Complex64, bool)> {
    let c = closed_form_two_coefficients(params, branch, delta)?;
    let (g1, g2) = (params.magnons[0].g, params.magnons[1].g);
    let det = derive_detunings(params);
    let cav = det.d_c - delta;
    let denom = c.v11 * c.v22 - c.v12 * c.v21;
    if denom.norm() == 0.0 {
        return Err(Error::Singular(format!("v-matrix singular at δ = {delta:e}")));
    }
    let num = (g1 * c.v22 - g2 * c.v21) * c.alpha1 - (g1 * c.v12 - g2 * c.v11) * c.alpha2;
    let t = -I / cav * (1.0 + num / denom);
    let direct = transmission_direct(params, branch, delta, 1.0)?;
    let agree = (t - direct).norm() / direct.norm() < CLOSED_FORM_AGREEMENT;
    Ok((t, agree))
}

/// Strict local maxima of |T|², refined by a parabola through the three
/// bracketing samples. The lowest and highest are labelled LP and HP; MP is
/// labelled only when exactly three peaks are found.
pub fn extract_peaks(spectrum: &Spectrum) -> PolaritonPeaks {
    let y = &spectrum.magnitude2;
    let x = &spectrum.delta;
    let mut out = PolaritonPeaks::default();
    if y.len() < 3 {
        out.warnings.push("spectrum too short for peak search".into());
        return out;
    }
    let ymax = y.iter().copied().fold(0.0, f64::max);
    for i in 1..y.len() - 1 {
        if !(y[i] > y[i - 1] && y[i] > y[i + 1]) || y[i] < PEAK_FLOOR * ymax {
            continue;
        }
        let (delta, height) = parabola_vertex((x[i - 1], y[i - 1]), (x[i], y[i]), (x[i + 1], y[i + 1]));
        out.peaks.push(Peak { delta, height, label: None });
    }
    let n = out.peaks.len();
    match n {
        0 => out.warnings.push("no local maxima in |T|²".into()),
        1 => {}
        _ => {
            out.peaks[0].label = Some(Polariton::Lower);
            out.peaks[n - 1].label = Some(Polariton::Higher);
            if n == 3 {
                out.peaks[1].label = Some(Polariton::Middle);
            }
            if n > 3 {
                out.warnings.push(format!("{n} peaks found; only LP and HP labelled"));
            }
        }
    }
    out
}

fn parabola_vertex(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> (f64, f64) {
    let (x0, y0) = a;
    let (x1, y1) = b;
    let (x2, y2) = c;
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let curv = (d12 - d01) / (x2 - x0);
    if curv >= 0.0 {
        return b;
    }
    // y = y1 + s·(x−x1) + curv·(x−x1)²
    let slope = d01 + curv * (x1 - x0);
    let xv = (x1 - slope / (2.0 * curv)).clamp(x0, x2);
    let yv = y1 + slope * (xv - x1) + curv * (xv - x1).powi(2);
    (xv, yv)
}

/// Position of the peak labelled σ, if any.
pub fn pick_polariton(peaks: &PolaritonPeaks, sigma: Polariton) -> Option<f64> {
    peaks.get(sigma).map(|p| p.delta)
}

/// Polariton frequency shift along hysteretic power sweeps; one curve per
/// sweep direction. `power_spec.parameter` must be `Power`.
pub fn shift_vs_power(params: &SystemParams, power_spec: &SweepSpec, sigma: Polariton, probe: &ProbeSpec) -> Result<Vec<ShiftCurve>> {
    if power_spec.parameter != SweepParameter::Power {
        return Err(Error::Usage("shift curves are swept in drive power".into()));
    }
    let base = params.with_rabi(0.0);
    let zero = crate::steady::solve_steady(&base)?;
    let reference_spec = spectrum(&base, &zero[0], probe)?;
    let reference = pick_polariton(&extract_peaks(&reference_spec), sigma).ok_or_else(|| {
        Error::Precondition(format!("{} peak not resolved without drive", sigma.label()))
    })?;
    let traces = run_sweep(params, power_spec)?;
    traces
        .into_iter()
        .map(|trace| {
            let shift = trace
                .values
                .par_iter()
                .zip(&trace.selected)
                .map(|(&p, b)| {
                    // no steady state to probe inside a self-oscillating window
                    let Some(b) = b else { return Ok(None) };
                    let s = spectrum(&params.with_power(p), b, probe)?;
                    Ok(pick_polariton(&extract_peaks(&s), sigma).map(|d| d - reference))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ShiftCurve {
                power: trace.values.clone(),
                shift,
                sigma,
                direction: trace.direction,
                reference,
                trace,
            })
        })
        .collect()
}

/// Shift jumps: steps more than `JUMP_INCREMENT_FACTOR` times the preceding
/// step and larger than `min_step` (rad/s). Returns the midpoint power of
/// each bracketing interval.
pub fn shift_jumps(curve: &ShiftCurve, min_step: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut prev_step: Option<f64> = None;
    for i in 1..curve.shift.len() {
        match (curve.shift[i - 1], curve.shift[i]) {
            (Some(a), Some(b)) => {
                let step = (b - a).abs();
                let is_jump = step > min_step
                    && prev_step.is_some_and(|p| step > crate::sweep::JUMP_INCREMENT_FACTOR * p);
                if is_jump {
                    out.push(0.5 * (curve.power[i - 1] + curve.power[i]));
                }
                prev_step = Some(step);
            }
            _ => prev_step = None,
        }
    }
    out
}
