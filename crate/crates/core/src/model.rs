//! Physical parameters of the cavity, the magnon modes and the drive.
//!
//! Everything is stored in angular-frequency units (rad/s). The only place
//! where another unit system appears is [`rabi_from_power`], which evaluates
//! the drive-power to Rabi-frequency relation in Gaussian-CGS units.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;

/// Converts a frequency in GHz (ν = ω/2π) to rad/s.
pub fn ghz(nu: f64) -> f64 {
    TWO_PI * nu * 1e9
}

/// Converts a frequency in MHz (ν = ω/2π) to rad/s.
pub fn mhz(nu: f64) -> f64 {
    TWO_PI * nu * 1e6
}

/// Converts a frequency in nHz (ν = ω/2π) to rad/s.
pub fn nhz(nu: f64) -> f64 {
    TWO_PI * nu * 1e-9
}

pub fn to_ghz(omega: f64) -> f64 {
    omega / TWO_PI / 1e9
}

pub fn to_mhz(omega: f64) -> f64 {
    omega / TWO_PI / 1e6
}

pub fn to_nhz(omega: f64) -> f64 {
    omega / TWO_PI / 1e-9
}

/// Material and geometry constants, Gaussian-CGS where dimensional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Gyromagnetic ratio, rad·s⁻¹·G⁻¹.
    pub gyro_ratio: f64,
    /// Fe³⁺ density, cm⁻³.
    pub spin_density: f64,
    /// Sphere diameter, cm.
    pub sphere_diameter: f64,
    /// Speed of light, cm/s.
    pub light_speed: f64,
    /// Total spin 2S; magnon numbers must stay well below it.
    pub total_spin: f64,
    /// Dimensionless factor applied to the power-to-Ω conversion; 1 unless
    /// calibrated against a known steady state.
    pub rabi_scale: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            // 28 GHz/T = 2.8 MHz/G
            gyro_ratio: TWO_PI * 2.8e6,
            spin_density: 4.22e21,
            sphere_diameter: 0.1,
            light_speed: 2.997_924_58e10,
            total_spin: 1.1e19,
            rabi_scale: 1.0,
        }
    }
}

impl PhysicalConstants {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("gyro_ratio", self.gyro_ratio),
            ("spin_density", self.spin_density),
            ("sphere_diameter", self.sphere_diameter),
            ("light_speed", self.light_speed),
            ("total_spin", self.total_spin),
            ("rabi_scale", self.rabi_scale),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// One Kittel magnon mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnonMode {
    pub omega: f64,
    pub gamma: f64,
    pub g: f64,
    /// Kerr coefficient.
    pub kerr: f64,
}

impl MagnonMode {
    pub fn validate(&self, label: &str) -> Result<()> {
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::InvalidParams(format!("{label}: omega must be positive")));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::InvalidParams(format!("{label}: gamma must be positive")));
        }
        if !(self.g.is_finite() && self.g >= 0.0) {
            return Err(Error::InvalidParams(format!("{label}: coupling must be non-negative")));
        }
        if !(self.kerr.is_finite() && self.kerr >= 0.0) {
            return Err(Error::InvalidParams(format!("{label}: Kerr coefficient must be non-negative")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityMode {
    pub omega_c: f64,
    pub gamma_c: f64,
}

/// How strongly magnon 1 is driven: either through the input power or by a
/// directly specified Rabi frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriveStrength {
    /// Input power in watts.
    Power(f64),
    /// Rabi frequency Ω in rad/s, bypassing the power conversion.
    Rabi(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drive {
    pub omega_d: f64,
    pub strength: DriveStrength,
}

/// Full parameter set for one or two YIG spheres in a single-mode cavity.
/// The drive acts on the first magnon only.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    pub constants: PhysicalConstants,
    pub cavity: CavityMode,
    pub magnons: Vec<MagnonMode>,
    pub drive: Drive,
}

impl SystemParams {
    pub fn single(cavity: CavityMode, magnon: MagnonMode, drive: Drive) -> Result<Self> {
        let p = Self {
            constants: PhysicalConstants::default(),
            cavity,
            magnons: vec![magnon],
            drive,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn two(cavity: CavityMode, m1: MagnonMode, m2: MagnonMode, drive: Drive) -> Result<Self> {
        let p = Self {
            constants: PhysicalConstants::default(),
            cavity,
            magnons: vec![m1, m2],
            drive,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.constants.validate()?;
        if !(self.cavity.omega_c.is_finite() && self.cavity.omega_c > 0.0) {
            return Err(Error::InvalidParams("cavity frequency must be positive".into()));
        }
        if !(self.cavity.gamma_c.is_finite() && self.cavity.gamma_c > 0.0) {
            return Err(Error::InvalidParams("cavity leakage must be positive".into()));
        }
        if self.magnons.is_empty() || self.magnons.len() > 2 {
            return Err(Error::InvalidParams(format!(
                "expected 1 or 2 magnon modes, found {}",
                self.magnons.len()
            )));
        }
        for (i, m) in self.magnons.iter().enumerate() {
            m.validate(&format!("magnon {}", i + 1))?;
        }
        if !(self.drive.omega_d.is_finite() && self.drive.omega_d > 0.0) {
            return Err(Error::InvalidParams("drive frequency must be positive".into()));
        }
        match self.drive.strength {
            DriveStrength::Power(p) if !(p.is_finite() && p >= 0.0) => {
                Err(Error::InvalidParams(format!("drive power must be non-negative, got {p}")))
            }
            DriveStrength::Rabi(r) if !(r.is_finite() && r >= 0.0) => {
                Err(Error::InvalidParams(format!("Rabi frequency must be non-negative, got {r}")))
            }
            _ => Ok(()),
        }
    }

    pub fn magnon_count(&self) -> usize {
        self.magnons.len()
    }

    /// Drive Rabi frequency Ω in rad/s.
    pub fn rabi(&self) -> Result<f64> {
        match self.drive.strength {
            DriveStrength::Power(p) => rabi_from_power(p, &self.constants),
            DriveStrength::Rabi(r) => Ok(r),
        }
    }

    pub fn with_power(&self, watts: f64) -> Self {
        let mut p = self.clone();
        p.drive.strength = DriveStrength::Power(watts);
        p
    }

    pub fn with_rabi(&self, rabi: f64) -> Self {
        let mut p = self.clone();
        p.drive.strength = DriveStrength::Rabi(rabi);
        p
    }

    pub fn with_omega_d(&self, omega_d: f64) -> Self {
        let mut p = self.clone();
        p.drive.omega_d = omega_d;
        p
    }

    pub fn with_omega_c(&self, omega_c: f64) -> Self {
        let mut p = self.clone();
        p.cavity.omega_c = omega_c;
        p
    }

    pub fn with_gamma_c(&self, gamma_c: f64) -> Self {
        let mut p = self.clone();
        p.cavity.gamma_c = gamma_c;
        p
    }

    /// Same system with every Kerr coefficient set to zero.
    pub fn without_kerr(&self) -> Self {
        let mut p = self.clone();
        for m in &mut p.magnons {
            m.kerr = 0.0;
        }
        p
    }
}

/// Ω = γ·sqrt(5πρdP / 3c), evaluated in Gaussian-CGS with P in erg/s and
/// multiplied by `rabi_scale`.
pub fn rabi_from_power(power_watts: f64, constants: &PhysicalConstants) -> Result<f64> {
    if !(power_watts >= 0.0) || !power_watts.is_finite() {
        return Err(Error::Domain(format!("drive power must be non-negative, got {power_watts}")));
    }
    let power_cgs = power_watts * 1e7;
    let field2 = 5.0 * PI * constants.spin_density * constants.sphere_diameter * power_cgs
        / (3.0 * constants.light_speed);
    Ok(constants.rabi_scale * constants.gyro_ratio * field2.sqrt())
}

/// Detunings in the frame rotating at the drive frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct Detunings {
    /// δ_i = ω_i + U_i − ω_d
    pub delta: Vec<f64>,
    /// δ_c = ω_c − ω_d
    pub delta_c: f64,
    /// D_c = δ_c − iγ_c
    pub d_c: Complex64,
    /// δ̃_i = δ_i − iγ_i − g_i²/D_c
    pub tilde_delta: Vec<Complex64>,
}

pub fn derive_detunings(params: &SystemParams) -> Detunings {
    let wd = params.drive.omega_d;
    let delta_c = params.cavity.omega_c - wd;
    let d_c = Complex64::new(delta_c, -params.cavity.gamma_c);
    let delta: Vec<f64> = params.magnons.iter().map(|m| m.omega + m.kerr - wd).collect();
    let tilde_delta = params
        .magnons
        .iter()
        .zip(&delta)
        .map(|(m, &d)| Complex64::new(d, -m.gamma) - m.g * m.g / d_c)
        .collect();
    Detunings {
        delta,
        delta_c,
        d_c,
        tilde_delta,
    }
}
