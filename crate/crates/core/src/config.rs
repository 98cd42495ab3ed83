//! Flat `key = value` parameter files.
//!
//! Frequencies are ν = ω/2π in the unit named by the key suffix. Lines
//! starting with `#` (and anything after a `#`) are comments.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{
    ghz, mhz, nhz, rabi_from_power, to_ghz, to_mhz, to_nhz, CavityMode, Drive, DriveStrength, MagnonMode,
    PhysicalConstants, SystemParams,
};

pub const KNOWN_KEYS: &[&str] = &[
    "omega_c_ghz",
    "gamma_c_mhz",
    "omega_1_ghz",
    "gamma_1_mhz",
    "g_1_mhz",
    "u_1_nhz",
    "omega_2_ghz",
    "gamma_2_mhz",
    "g_2_mhz",
    "u_2_nhz",
    "omega_d_ghz",
    "power_mw",
    "rabi_override",
    "sphere_diameter_mm",
    "spin_density_per_m3",
    "total_spin",
];

const REQUIRED: &[&str] = &[
    "omega_c_ghz",
    "gamma_c_mhz",
    "omega_1_ghz",
    "gamma_1_mhz",
    "g_1_mhz",
    "u_1_nhz",
    "omega_d_ghz",
];

const SECOND_MODE: &[&str] = &["omega_2_ghz", "gamma_2_mhz", "g_2_mhz", "u_2_nhz"];

/// Parsed values with the line each came from.
#[derive(Debug, Clone, Default)]
struct Entries(BTreeMap<String, (f64, usize)>);

impl Entries {
    fn get(&self, key: &str) -> Option<f64> {
        self.0.get(key).map(|(v, _)| *v)
    }

    fn line(&self, key: &str) -> usize {
        self.0.get(key).map_or(0, |(_, l)| *l)
    }

    fn require(&self, key: &str) -> Result<f64> {
        self.get(key).ok_or_else(|| Error::Config { line: 0, message: format!("missing required key `{key}`") })
    }
}

fn tokenize(text: &str) -> Result<Entries> {
    let mut out = Entries::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| Error::Config { line, message: format!("expected `key = value`, got `{body}`") })?;
        let key = key.trim();
        let value = value.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(Error::Config { line, message: format!("unknown key `{key}`") });
        }
        let v: f64 = value
            .parse()
            .map_err(|_| Error::Config { line, message: format!("`{key}`: cannot parse `{value}` as a number") })?;
        if !v.is_finite() {
            return Err(Error::Config { line, message: format!("`{key}` must be finite") });
        }
        if let Some((_, first)) = out.0.get(key) {
            return Err(Error::Config { line, message: format!("duplicate key `{key}` (first set on line {first})") });
        }
        out.0.insert(key.to_string(), (v, line));
    }
    Ok(out)
}

/// Parses a parameter file into a validated `SystemParams`.
///
/// `power_mw` defaults to 0. `rabi_override` (rad/s) alone fixes Ω; together
/// with `power_mw` it calibrates the power conversion so that Ω(power_mw)
/// equals the override.
pub fn parse_config(text: &str) -> Result<SystemParams> {
    let e = tokenize(text)?;
    for key in REQUIRED {
        e.require(key)?;
    }
    let present: Vec<_> = SECOND_MODE.iter().filter(|k| e.get(k).is_some()).collect();
    if !present.is_empty() && present.len() != SECOND_MODE.len() {
        let missing: Vec<_> = SECOND_MODE.iter().filter(|k| e.get(k).is_none()).copied().collect();
        return Err(Error::Config {
            line: e.line(present[0]),
            message: format!("incomplete second magnon mode; missing {}", missing.join(", ")),
        });
    }

    let mut constants = PhysicalConstants::default();
    if let Some(d) = e.get("sphere_diameter_mm") {
        constants.sphere_diameter = d * 0.1;
    }
    if let Some(rho) = e.get("spin_density_per_m3") {
        constants.spin_density = rho * 1e-6;
    }
    if let Some(s) = e.get("total_spin") {
        constants.total_spin = s;
    }
    let at = |key: &str, err: Error| Error::Config { line: e.line(key), message: err.to_string() };
    constants.validate().map_err(|err| at("sphere_diameter_mm", err))?;

    let mode = |i: u8| -> Result<MagnonMode> {
        Ok(MagnonMode {
            omega: ghz(e.require(&format!("omega_{i}_ghz"))?),
            gamma: mhz(e.require(&format!("gamma_{i}_mhz"))?),
            g: mhz(e.require(&format!("g_{i}_mhz"))?),
            kerr: nhz(e.require(&format!("u_{i}_nhz"))?),
        })
    };
    let mut magnons = vec![mode(1)?];
    if !present.is_empty() {
        magnons.push(mode(2)?);
    }

    let power = e.get("power_mw").map(|p| p * 1e-3);
    if let Some(p) = power {
        if p < 0.0 {
            return Err(Error::Config { line: e.line("power_mw"), message: "power_mw must be non-negative".into() });
        }
    }
    let strength = match (power, e.get("rabi_override")) {
        (_, Some(r)) if r < 0.0 => {
            return Err(Error::Config { line: e.line("rabi_override"), message: "rabi_override must be non-negative".into() })
        }
        (Some(p), Some(r)) => {
            let base = rabi_from_power(p, &constants).map_err(|err| at("power_mw", err))?;
            if base == 0.0 {
                return Err(Error::Config {
                    line: e.line("rabi_override"),
                    message: "rabi_override calibration needs power_mw > 0".into(),
                });
            }
            constants.rabi_scale = r / base;
            DriveStrength::Power(p)
        }
        (None, Some(r)) => DriveStrength::Rabi(r),
        (p, None) => DriveStrength::Power(p.unwrap_or(0.0)),
    };

    let params = SystemParams {
        constants,
        cavity: CavityMode { omega_c: ghz(e.require("omega_c_ghz")?), gamma_c: mhz(e.require("gamma_c_mhz")?) },
        magnons,
        drive: Drive { omega_d: ghz(e.require("omega_d_ghz")?), strength },
    };
    params.validate().map_err(|err| Error::Config { line: 0, message: err.to_string() })?;
    Ok(params)
}

pub fn load_config(path: &Path) -> Result<SystemParams> {
    let text = std::fs::read_to_string(path)
        .map_err(|err| Error::Usage(format!("cannot read config {}: {err}", path.display())))?;
    parse_config(&text).map_err(|err| match err {
        Error::Config { line, message } => Error::Config { line, message: format!("{}: {message}", path.display()) },
        other => other,
    })
}

/// Writes `params` back in config syntax. `parse_config` of the result
/// reproduces `params` up to unit-conversion rounding.
pub fn render_config(params: &SystemParams) -> String {
    let mut s = String::new();
    let mut kv = |k: &str, v: f64| s.push_str(&format!("{k} = {v}\n"));
    kv("omega_c_ghz", to_ghz(params.cavity.omega_c));
    kv("gamma_c_mhz", to_mhz(params.cavity.gamma_c));
    for (i, m) in params.magnons.iter().enumerate() {
        let i = i + 1;
        kv(&format!("omega_{i}_ghz"), to_ghz(m.omega));
        kv(&format!("gamma_{i}_mhz"), to_mhz(m.gamma));
        kv(&format!("g_{i}_mhz"), to_mhz(m.g));
        kv(&format!("u_{i}_nhz"), to_nhz(m.kerr));
    }
    kv("omega_d_ghz", to_ghz(params.drive.omega_d));
    let c = &params.constants;
    match params.drive.strength {
        DriveStrength::Power(p) => {
            kv("power_mw", p * 1e3);
            if c.rabi_scale != 1.0 {
                if let Ok(r) = rabi_from_power(p, c) {
                    kv("rabi_override", r);
                }
            }
        }
        DriveStrength::Rabi(r) => kv("rabi_override", r),
    }
    kv("sphere_diameter_mm", c.sphere_diameter * 10.0);
    kv("spin_density_per_m3", c.spin_density * 1e6);
    kv("total_spin", c.total_spin);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG2B: &str = "\
# two spheres
omega_c_ghz = 10.078
gamma_c_mhz = 4.3
omega_1_ghz = 10.018
gamma_1_mhz = 5.8
g_1_mhz = 42.2
u_1_nhz = 7.8
omega_2_ghz = 9.963   # second sphere
gamma_2_mhz = 1.7
g_2_mhz = 33.5
u_2_nhz = 42.12
omega_d_ghz = 9.9989
power_mw = 30
";

    #[test]
    fn parses_two_sphere_file() {
        let p = parse_config(FIG2B).unwrap();
        assert_eq!(p.magnon_count(), 2);
        assert_eq!(p.magnons[1].omega, ghz(9.963));
        assert_eq!(p.drive.strength, DriveStrength::Power(0.03));
        assert_eq!(p.constants, PhysicalConstants::default());
    }

    #[test]
    fn unknown_key_reports_line() {
        let text = format!("{FIG2B}colour = 3\n");
        match parse_config(&text) {
            Err(Error::Config { line, message }) => {
                assert_eq!(line, 14);
                assert!(message.contains("colour"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_number_and_duplicates() {
        let e = parse_config("omega_c_ghz = ten\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 1, .. }));
        let e = parse_config("omega_c_ghz = 1\nomega_c_ghz = 2\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 2, .. }));
        let e = parse_config("just words\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 1, .. }));
    }

    #[test]
    fn missing_and_partial_keys() {
        assert!(parse_config("omega_c_ghz = 10\n").is_err());
        let partial = FIG2B.replace("u_2_nhz = 42.12\n", "");
        let e = parse_config(&partial).unwrap_err().to_string();
        assert!(e.contains("u_2_nhz"), "{e}");
    }

    #[test]
    fn single_sphere_defaults_to_zero_power() {
        let text: String = FIG2B.lines().filter(|l| !l.contains("_2_") && !l.contains("power")).map(|l| format!("{l}\n")).collect();
        let p = parse_config(&text).unwrap();
        assert_eq!(p.magnon_count(), 1);
        assert_eq!(p.rabi().unwrap(), 0.0);
    }

    #[test]
    fn rabi_override_calibrates_power_scale() {
        let text = format!("{FIG2B}rabi_override = 3e15\n");
        let p = parse_config(&text).unwrap();
        assert!((p.rabi().unwrap() / 3e15 - 1.0).abs() < 1e-14);
        let half = p.with_power(0.0075).rabi().unwrap();
        assert!((half / 1.5e15 - 1.0).abs() < 1e-14);

        let fixed = parse_config(&text.replace("power_mw = 30\n", "")).unwrap();
        assert_eq!(fixed.drive.strength, DriveStrength::Rabi(3e15));
    }

    #[test]
    fn constants_converted_from_si() {
        let text = format!("{FIG2B}sphere_diameter_mm = 0.5\nspin_density_per_m3 = 2e27\n");
        let p = parse_config(&text).unwrap();
        assert!((p.constants.sphere_diameter - 0.05).abs() < 1e-15);
        assert!((p.constants.spin_density - 2e21).abs() < 1e6);
    }

    #[test]
    fn render_round_trip() {
        let p = parse_config(&format!("{FIG2B}rabi_override = 3e15\n")).unwrap();
        let q = parse_config(&render_config(&p)).unwrap();
        assert_eq!(q.magnon_count(), 2);
        assert!((q.rabi().unwrap() / p.rabi().unwrap() - 1.0).abs() < 1e-12);
        assert!((q.magnons[1].kerr / p.magnons[1].kerr - 1.0).abs() < 1e-12);
    }
}
