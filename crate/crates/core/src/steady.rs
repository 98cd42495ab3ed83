//! Mean-field steady states of the driven cavity–magnon system.
//!
//! For two spheres the three coupled algebraic equations collapse onto a
//! single real degree-9 polynomial in x = |M₂|² (the magnon number of the
//! undriven sphere). For one sphere the analogous object is a cubic in
//! x = |M|². Every nonnegative root is turned back into complex amplitudes and
//! classified by the eigenvalues of the linearized mean-field flow.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{derive_detunings, Detunings, MagnonMode, PhysicalConstants, SystemParams};
use crate::poly::Poly;
use crate::roots::{nonnegative_roots, ScannedRoot};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Eigenvalues with real part below `STABILITY_RTOL·γ_c` count as decaying.
pub const STABILITY_RTOL: f64 = 1e-6;
/// Residual bound relative to `max(Ω, γ₁√x)`.
pub const RESIDUAL_RTOL: f64 = 1e-6;

/// One steady state of the mean-field equations.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyBranch {
    /// |M₂|² for two spheres, |M|² for one.
    pub x: f64,
    pub m1: Complex64,
    /// Absent for a single sphere.
    pub m2: Option<Complex64>,
    pub a: Complex64,
    /// Largest modulus of the steady-state equations at the amplitudes.
    pub residual: f64,
    pub stable: bool,
    /// Eigenvalues of the real Jacobian, sorted by descending real part.
    pub eigenvalues: Vec<Complex64>,
    /// 2 for a touching (turning-point) root.
    pub multiplicity: u8,
}

impl SteadyBranch {
    pub fn max_real_eigenvalue(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Whether the magnon numbers stay below the total spin 2S.
    pub fn within_validity(&self, constants: &PhysicalConstants) -> bool {
        let n1 = self.m1.norm_sqr();
        let n2 = self.m2.map_or(0.0, |m| m.norm_sqr());
        self.x < constants.total_spin && n1 < constants.total_spin && n2 < constants.total_spin
    }

    /// `RESIDUAL_RTOL · max(Ω, γ₁√x)`
    pub fn residual_bound(&self, rabi: f64, gamma_1: f64) -> f64 {
        RESIDUAL_RTOL * rabi.max(gamma_1 * self.x.sqrt())
    }
}

/// Complex amplitudes reconstructed from a root, plus the equation residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitudes {
    pub m1: Complex64,
    pub m2: Option<Complex64>,
    pub a: Complex64,
    pub residual: f64,
}

/// The spin-transfer polynomial p(x) = |bracket(x)|²·x − rhs with
/// bracket(x) = (δ̃₁ + C₁ q(x) x)(δ̃₂ + 2U₂x) − g₁²g₂²/D_c² and
/// q(x) = |δ̃₂ + 2U₂x|².
#[derive(Debug, Clone, PartialEq)]
pub struct SpinPolynomial {
    /// Ascending real coefficients of p.
    pub poly: Poly,
    /// g₁²g₂²Ω²/(δ_c² + γ_c²)
    pub rhs: f64,
    tilde_1: Complex64,
    tilde_2: Complex64,
    kerr_2x2: f64,
    c1: f64,
    cross: Complex64,
}

impl SpinPolynomial {
    pub fn coeffs(&self) -> &[f64] {
        &self.poly.coeffs
    }

    pub fn bracket(&self, x: f64) -> Complex64 {
        let inner = self.tilde_2 + self.kerr_2x2 * x;
        (self.tilde_1 + self.c1 * inner.norm_sqr() * x) * inner - self.cross
    }

    /// Direct (unexpanded) evaluation of p(x).
    pub fn eval(&self, x: f64) -> f64 {
        self.bracket(x).norm_sqr() * x - self.rhs
    }

    /// Linear-response magnitude g₁²g₂²Ω²/((δ_c²+γ_c²)|δ̃₁δ̃₂|²), or 1.
    pub fn characteristic_scale(&self) -> f64 {
        let d = (self.tilde_1 * self.tilde_2).norm_sqr();
        let s = self.rhs / d;
        if s.is_finite() && s > 0.0 {
            s
        } else {
            1.0
        }
    }
}

fn expect_modes(magnons: &[MagnonMode], n: usize) -> Result<()> {
    if magnons.len() != n {
        return Err(Error::ModeCount { expected: n, found: magnons.len() });
    }
    Ok(())
}

pub fn build_spin_polynomial(det: &Detunings, magnons: &[MagnonMode], rabi: f64) -> Result<SpinPolynomial> {
    expect_modes(magnons, 2)?;
    if !(rabi >= 0.0) {
        return Err(Error::Domain(format!("Rabi frequency must be non-negative, got {rabi}")));
    }
    let (m1, m2) = (&magnons[0], &magnons[1]);
    if m1.g == 0.0 || m2.g == 0.0 {
        return Err(Error::DegenerateCoupling(
            "both spheres must couple to the cavity; use the single-sphere solver".into(),
        ));
    }
    let g12 = m1.g * m1.g * m2.g * m2.g;
    let dc2 = det.d_c.norm_sqr();
    let c1 = 2.0 * m1.kerr * dc2 / g12;
    let cross = g12 / (det.d_c * det.d_c);
    let rhs = g12 * rabi * rabi / dc2;
    let (t1, t2) = (det.tilde_delta[0], det.tilde_delta[1]);
    let s = 2.0 * m2.kerr;

    // u₂ + i v₂ = δ̃₂ + 2U₂x,  u₁ + i v₁ = δ̃₁ + C₁ q(x) x
    let u2 = Poly::linear(t2.re, s);
    let v2 = Poly::constant(t2.im);
    let q = &(&u2 * &u2) + &(&v2 * &v2);
    let u1 = &Poly::constant(t1.re) + &(&q * &Poly::linear(0.0, c1));
    let v1 = Poly::constant(t1.im);
    let re = &(&(&u1 * &u2) - &(&v1 * &v2)) - &Poly::constant(cross.re);
    let im = &(&(&u1 * &v2) + &(&v1 * &u2)) - &Poly::constant(cross.im);
    let mod2 = &(&re * &re) + &(&im * &im);
    let poly = &(&mod2 * &Poly::linear(0.0, 1.0)) - &Poly::constant(rhs);

    Ok(SpinPolynomial {
        poly,
        rhs,
        tilde_1: t1,
        tilde_2: t2,
        kerr_2x2: s,
        c1,
        cross,
    })
}

/// Back-substitutes a root x = |M₂|² into the two-sphere steady-state
/// equations.
pub fn reconstruct_amplitudes(x: f64, det: &Detunings, magnons: &[MagnonMode], rabi: f64) -> Result<Amplitudes> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("x must be non-negative, got {x}")));
    }
    let sp = build_spin_polynomial(det, magnons, rabi)?;
    let (mg1, mg2) = (&magnons[0], &magnons[1]);
    let (m1, m2, a) = if rabi == 0.0 && x == 0.0 {
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    } else {
        let b = sp.bracket(x);
        if b.norm() == 0.0 {
            return Err(Error::Singular(format!("bracket vanishes at x = {x:e}")));
        }
        let d2 = Complex64::new(det.delta[1] + 2.0 * mg2.kerr * x, -mg2.gamma);
        let m2 = -I * mg1.g * mg2.g * rabi / (det.d_c * b);
        let a = -(d2 / mg2.g) * m2;
        let m1 = (det.d_c * d2 - mg2.g * mg2.g) * m2 / (mg1.g * mg2.g);
        (m1, m2, a)
    };
    let residual = two_residual(det, magnons, rabi, m1, m2, a);
    Ok(Amplitudes { m1, m2: Some(m2), a, residual })
}

fn two_residual(det: &Detunings, magnons: &[MagnonMode], rabi: f64, m1: Complex64, m2: Complex64, a: Complex64) -> f64 {
    let (p1, p2) = (&magnons[0], &magnons[1]);
    let e1 = -(I * det.delta[0] + p1.gamma) * m1 - 2.0 * I * p1.kerr * m1.norm_sqr() * m1 - I * p1.g * a + rabi;
    let e2 = -(I * det.delta[1] + p2.gamma) * m2 - 2.0 * I * p2.kerr * m2.norm_sqr() * m2 - I * p2.g * a;
    let gamma_c = -det.d_c.im;
    let e3 = -(I * det.delta_c + gamma_c) * a - I * (p1.g * m1 + p2.g * m2);
    e1.norm().max(e2.norm()).max(e3.norm())
}

fn single_residual(det: &Detunings, magnon: &MagnonMode, rabi: f64, m: Complex64, a: Complex64) -> f64 {
    let e1 = -(I * det.delta[0] + magnon.gamma) * m - 2.0 * I * magnon.kerr * m.norm_sqr() * m - I * magnon.g * a + rabi;
    let gamma_c = -det.d_c.im;
    let e2 = -(I * det.delta_c + gamma_c) * a - I * magnon.g * m;
    e1.norm().max(e2.norm())
}

/// Closed-form Kerr-free spin current,
/// x = g₁²g₂²Ω² / ((δ_c²+γ_c²)·|δ̃₁δ̃₂ − g₁²g₂²/D_c²|²).
pub fn linear_spin_current(params: &SystemParams) -> Result<f64> {
    expect_modes(&params.magnons, 2)?;
    let rabi = params.rabi()?;
    let det = derive_detunings(params);
    let (m1, m2) = (&params.magnons[0], &params.magnons[1]);
    let g12 = m1.g * m1.g * m2.g * m2.g;
    let denom = (det.tilde_delta[0] * det.tilde_delta[1] - g12 / (det.d_c * det.d_c)).norm_sqr();
    if denom == 0.0 {
        return Err(Error::Singular("resonance singularity in the linear spin current".into()));
    }
    Ok(g12 * rabi * rabi / (det.d_c.norm_sqr() * denom))
}

/// All steady states for two spheres, sorted by ascending x.
pub fn solve_two_yig(params: &SystemParams) -> Result<Vec<SteadyBranch>> {
    expect_modes(&params.magnons, 2)?;
    params.validate()?;
    let rabi = params.rabi()?;
    let det = derive_detunings(params);
    let sp = build_spin_polynomial(&det, &params.magnons, rabi)?;
    let roots = nonnegative_roots(|x| sp.eval(x), &sp.poly, sp.characteristic_scale())?;
    roots
        .into_iter()
        .map(|ScannedRoot { x, multiplicity }| {
            let amp = reconstruct_amplitudes(x, &det, &params.magnons, rabi)?;
            Ok(finish_branch(params, x, amp, multiplicity))
        })
        .collect()
}

/// All steady states for one sphere: roots of |δ̃ + 2Ux|²x = Ω².
pub fn solve_single_yig(params: &SystemParams) -> Result<Vec<SteadyBranch>> {
    expect_modes(&params.magnons, 1)?;
    params.validate()?;
    let rabi = params.rabi()?;
    let det = derive_detunings(params);
    let magnon = &params.magnons[0];
    let t = det.tilde_delta[0];
    let s = 2.0 * magnon.kerr;
    let u = Poly::linear(t.re, s);
    let q = &(&u * &u) + &Poly::constant(t.im * t.im);
    let poly = &(&q * &Poly::linear(0.0, 1.0)) - &Poly::constant(rabi * rabi);
    let hint = rabi * rabi / t.norm_sqr();
    let f = |x: f64| (t + s * x).norm_sqr() * x - rabi * rabi;
    let roots = nonnegative_roots(f, &poly, hint)?;
    roots
        .into_iter()
        .map(|ScannedRoot { x, multiplicity }| {
            let (m, a) = if rabi == 0.0 && x == 0.0 {
                (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
            } else {
                let inner = t + s * x;
                if inner.norm() == 0.0 {
                    return Err(Error::Singular(format!("δ̃ + 2Ux vanishes at x = {x:e}")));
                }
                let m = -I * rabi / inner;
                (m, -magnon.g * m / det.d_c)
            };
            let residual = single_residual(&det, magnon, rabi, m, a);
            let amp = Amplitudes { m1: m, m2: None, a, residual };
            Ok(finish_branch(params, x, amp, multiplicity))
        })
        .collect()
}

/// Dispatches on the number of magnon modes.
pub fn solve_steady(params: &SystemParams) -> Result<Vec<SteadyBranch>> {
    match params.magnon_count() {
        1 => solve_single_yig(params),
        _ => solve_two_yig(params),
    }
}

fn finish_branch(params: &SystemParams, x: f64, amp: Amplitudes, multiplicity: u8) -> SteadyBranch {
    let mut branch = SteadyBranch {
        x,
        m1: amp.m1,
        m2: amp.m2,
        a: amp.a,
        residual: amp.residual,
        stable: false,
        eigenvalues: Vec::new(),
        multiplicity,
    };
    let (stable, eigenvalues) = classify_stability(&branch, params);
    branch.stable = stable;
    branch.eigenvalues = eigenvalues;
    branch
}

/// Real Jacobian of the noise-free mean-field flow in the variables
/// (Re m₁, Im m₁, [Re m₂, Im m₂,] Re a, Im a).
pub fn mean_field_jacobian(params: &SystemParams, branch: &SteadyBranch) -> DMatrix<f64> {
    let det = derive_detunings(params);
    let nm = params.magnon_count();
    let n = nm + 1;
    let mut jac = DMatrix::<f64>::zeros(2 * n, 2 * n);
    // adds d(z_row)/dt += a·z_col + b·conj(z_col)
    let mut put = |row: usize, col: usize, a: Complex64, b: Complex64| {
        let (r, c) = (2 * row, 2 * col);
        jac[(r, c)] += (a + b).re;
        jac[(r, c + 1)] += -(a - b).im;
        jac[(r + 1, c)] += (a + b).im;
        jac[(r + 1, c + 1)] += (a - b).re;
    };
    let zero = Complex64::new(0.0, 0.0);
    let amps: Vec<Complex64> = match branch.m2 {
        Some(m2) if nm == 2 => vec![branch.m1, m2],
        _ => vec![branch.m1],
    };
    let cav = nm;
    for (j, (mode, m)) in params.magnons.iter().zip(&amps).enumerate() {
        let diag = -(I * det.delta[j] + mode.gamma) - 4.0 * I * mode.kerr * m.norm_sqr();
        let conj = -2.0 * I * mode.kerr * m * m;
        put(j, j, diag, conj);
        put(j, cav, -I * mode.g, zero);
        put(cav, j, -I * mode.g, zero);
    }
    put(cav, cav, -(I * det.delta_c + params.cavity.gamma_c), zero);
    jac
}

/// Linear stability of a branch: stable iff every Jacobian eigenvalue has
/// real part below `STABILITY_RTOL·γ_c` and the root is simple.
pub fn classify_stability(branch: &SteadyBranch, params: &SystemParams) -> (bool, Vec<Complex64>) {
    let jac = mean_field_jacobian(params, branch);
    let mut ev: Vec<Complex64> = jac.complex_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
    let max_re = ev.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let stable = branch.multiplicity == 1 && max_re < STABILITY_RTOL * params.cavity.gamma_c;
    (stable, ev)
}

/// True when stable and unstable branches alternate in ascending x, the
/// generic structure of an S-shaped response. Violations are diagnostics only.
pub fn branches_alternate(branches: &[SteadyBranch]) -> bool {
    branches.windows(2).all(|w| w[0].stable != w[1].stable)
}
