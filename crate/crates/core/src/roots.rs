//! Bracketing root finder for real functions on the positive half-line.
//!
//! The functions handled here are polynomials whose coefficients span tens of
//! orders of magnitude, so the scan runs on a logarithmic grid and the direct
//! evaluator (not the expanded coefficients) is used for every sign test.

use crate::error::{Error, Result};
use crate::poly::Poly;

/// Default lower edge of the scan, in units of magnon number.
pub const SCAN_MIN: f64 = 1e8;
/// Default upper edge of the scan.
pub const SCAN_MAX: f64 = 1e18;
pub const GRID_POINTS: usize = 2000;
pub const DEDUP_RTOL: f64 = 1e-8;
/// Relative tolerance (w.r.t. the largest polynomial term) under which a
/// touching extremum counts as a double root.
pub const DOUBLE_ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScannedRoot {
    pub x: f64,
    pub multiplicity: u8,
}

/// Finds every root of `f` in `[0, ∞)`.
///
/// `poly` is the expanded form of `f`; it supplies the root bound and the
/// term scale used for tolerances. `hint` is a characteristic root magnitude
/// (any positive value works; it only widens the scan downward).
pub fn nonnegative_roots<F>(f: F, poly: &Poly, hint: f64) -> Result<Vec<ScannedRoot>>
where
    F: Fn(f64) -> f64,
{
    let fail = || Error::RootNonConvergence { coeffs: poly.coeffs.clone() };

    if poly.coeffs[0] == 0.0 {
        // f(x) = x·q(x) with q ≥ 0 for every polynomial built in this crate
        return Ok(vec![ScannedRoot { x: 0.0, multiplicity: 1 }]);
    }
    if poly.degree() == 0 {
        return Ok(Vec::new());
    }

    let f0 = poly.coeffs[0];
    let mut lo = SCAN_MIN;
    if hint.is_finite() && hint > 0.0 {
        lo = lo.min(hint * 1e-4);
    }
    let mut tries = 0;
    while f(lo).signum() != f0.signum() || f(lo) == 0.0 {
        lo *= 1e-4;
        tries += 1;
        if tries > 60 {
            return Err(fail());
        }
    }
    let bound = poly.root_bound();
    let hi = SCAN_MAX.max(2.0 * bound).max(lo * 10.0);
    if !hi.is_finite() {
        return Err(fail());
    }

    let decades = (hi / lo).log10();
    let n = GRID_POINTS.max((200.0 * decades).ceil() as usize);
    let (llo, lhi) = (lo.ln(), hi.ln());
    let xs: Vec<f64> = (0..n)
        .map(|i| (llo + (lhi - llo) * i as f64 / (n - 1) as f64).exp())
        .collect();
    let fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    if fs.iter().any(|v| !v.is_finite()) {
        return Err(fail());
    }

    let mut roots = Vec::new();
    for i in 0..n - 1 {
        if fs[i] == 0.0 {
            roots.push(ScannedRoot { x: xs[i], multiplicity: 1 });
        } else if fs[i].signum() != fs[i + 1].signum() && fs[i + 1] != 0.0 {
            roots.push(ScannedRoot { x: bisect(&f, xs[i], xs[i + 1], fs[i]), multiplicity: 1 });
        }
    }
    // A pair of roots closer than one grid step hides as a shallow extremum.
    for i in 1..n - 1 {
        let (a, b, c) = (fs[i - 1], fs[i], fs[i + 1]);
        if a.signum() != b.signum() || b.signum() != c.signum() || b == 0.0 {
            continue;
        }
        if !(b.abs() < a.abs() && b.abs() <= c.abs()) {
            continue;
        }
        let sign = b.signum();
        let xm = golden_min(|x| sign * f(x), xs[i - 1], xs[i + 1]);
        let fm = f(xm);
        if fm.signum() != sign {
            let r1 = bisect(&f, xs[i - 1], xm, a);
            let r2 = bisect(&f, xm, xs[i + 1], fm);
            if (r2 - r1).abs() <= DEDUP_RTOL * r2 {
                roots.push(ScannedRoot { x: 0.5 * (r1 + r2), multiplicity: 2 });
            } else {
                roots.push(ScannedRoot { x: r1, multiplicity: 1 });
                roots.push(ScannedRoot { x: r2, multiplicity: 1 });
            }
        } else if fm.abs() <= DOUBLE_ROOT_TOL * poly.term_scale(xm) {
            roots.push(ScannedRoot { x: xm, multiplicity: 2 });
        }
    }

    roots.sort_by(|a, b| a.x.total_cmp(&b.x));
    let mut out: Vec<ScannedRoot> = Vec::with_capacity(roots.len());
    for r in roots {
        match out.last_mut() {
            Some(last) if (r.x - last.x).abs() <= DEDUP_RTOL * r.x.abs().max(last.x.abs()) => {
                last.multiplicity = last.multiplicity.max(r.multiplicity);
            }
            _ => out.push(r),
        }
    }
    Ok(out)
}

/// Bisection to adjacent floating-point values; `fa` is `f(a)`.
fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, fa: f64) -> f64 {
    let sa = fa.signum();
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Golden-section search for the minimum of `f` on `[a, b]` in log space.
fn golden_min<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut la, mut lb) = (a.ln(), b.ln());
    let g = |l: f64| f(l.exp());
    let mut lc = lb - inv_phi * (lb - la);
    let mut ld = la + inv_phi * (lb - la);
    let (mut gc, mut gd) = (g(lc), g(ld));
    for _ in 0..120 {
        if gc < gd {
            lb = ld;
            ld = lc;
            gd = gc;
            lc = lb - inv_phi * (lb - la);
            gc = g(lc);
        } else {
            la = lc;
            lc = ld;
            gc = gd;
            ld = la + inv_phi * (lb - la);
            gd = g(ld);
        }
        if (lb - la).abs() < 1e-15 {
            break;
        }
    }
    (0.5 * (la + lb)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_roots(rs: &[f64], sign: f64) -> Poly {
        rs.iter()
            .fold(Poly::constant(sign), |acc, &r| &acc * &Poly::linear(-r, 1.0))
    }

    #[test]
    fn finds_well_separated_roots() {
        let p = from_roots(&[2e10, 3e12, 4e15], 1.0);
        let r = nonnegative_roots(|x| p.eval(x), &p, 1e12).unwrap();
        let xs: Vec<f64> = r.iter().map(|r| r.x).collect();
        assert_eq!(xs.len(), 3);
        for (g, w) in xs.iter().zip([2e10, 3e12, 4e15]) {
            assert!((g / w - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn finds_close_pair_inside_one_grid_cell() {
        let p = from_roots(&[1e13, 1.0005e13, 5e14], 1.0);
        let r = nonnegative_roots(|x| p.eval(x), &p, 1e13).unwrap();
        assert_eq!(r.len(), 3, "{r:?}");
        assert!((r[1].x / 1.0005e13 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn reports_double_root() {
        let p = from_roots(&[1e12, 1e14, 1e14], 1.0);
        let r = nonnegative_roots(|x| p.eval(x), &p, 1e12).unwrap();
        assert_eq!(r.len(), 2, "{r:?}");
        assert_eq!(r[1].multiplicity, 2);
        assert!((r[1].x / 1e14 - 1.0).abs() < 1e-5);
    }

    #[test]
    fn extends_scan_below_default_window() {
        let p = from_roots(&[3.0], 1.0);
        let r = nonnegative_roots(|x| p.eval(x), &p, 3.0).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].x / 3.0 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_constant_term_gives_origin() {
        let p = Poly::new(vec![0.0, 1.0, 2.0]);
        let r = nonnegative_roots(|x| p.eval(x), &p, 1.0).unwrap();
        assert_eq!(r, vec![ScannedRoot { x: 0.0, multiplicity: 1 }]);
    }
}
