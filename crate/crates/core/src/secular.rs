//! Secular equation for the Navier-slip Stokes eigenproblem on the unit disk.
//!
//! For angular index `n` the stream function `[J_n(s r) − J_n(s) r^n] trig(nθ)`
//! vanishes on the circle and satisfies `ξ = (2κ − α) u·t` there exactly when
//!
//! ```text
//! G_n(s) = s² J_n(s) + (2 − α) (s J_n'(s) − n J_n(s)) = 0.
//! ```
//!
//! With `α = 2` the friction term drops out and the roots are Bessel zeros
//! (the Lions case, vorticity vanishing on the boundary).

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::bessel::{self, MAX_ARG, MAX_ORDER};
use crate::error::{Error, Result};

/// Sign-change scan step.
pub const SCAN_STEP: f64 = 0.05;
/// Bisection stops once the bracket is narrower than this.
pub const ROOT_TOL: f64 = 1e-12;

/// `G_n(s)` for `s > 0`.
pub fn secular(n: u32, s: f64, alpha: f64) -> Result<f64> {
    if s.is_nan() || s <= 0.0 {
        return Err(Error::Domain(format!("secular argument must be positive, got {s}")));
    }
    let (j, dj) = bessel::bessel_j(n, s)?;
    Ok(secular_from(n, s, alpha, j, dj))
}

#[inline]
fn secular_from(n: u32, s: f64, alpha: f64, j: f64, dj: f64) -> f64 {
    s * s * j + (2.0 - alpha) * (s * dj - n as f64 * j)
}

fn g(n: u32, s: f64, alpha: f64) -> f64 {
    let (j, dj) = bessel::jn_with_derivative(n, s);
    secular_from(n, s, alpha, j, dj)
}

/// A place where `|G_n|` dips to (numerically) zero without changing sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangencyFlag {
    pub n: u32,
    pub s: f64,
    pub relative_depth: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RootScan {
    /// Strictly increasing positive roots.
    pub roots: Vec<f64>,
    /// Suspected double roots that the sign-change scan cannot isolate.
    pub tangencies: Vec<TangencyFlag>,
}

/// All roots of `G_n` on `(0, s_max]`.
///
/// The scan walks `s = 0.05, 0.10, …` and bisects every sign change down to
/// [`ROOT_TOL`]. Near `0⁺`, `G_n(s) ~ (s/2)^n s² (1 − (2 − α)/(2n + 2)) / n!`
/// is positive for every `α > 0`, which seeds the sign of the first bracket.
pub fn find_roots(n: u32, s_max: f64, alpha: f64) -> Result<RootScan> {
    if n > MAX_ORDER {
        return Err(Error::Range(format!("angular index {n} exceeds {MAX_ORDER}")));
    }
    if !(s_max > 0.0 && s_max <= MAX_ARG) {
        return Err(Error::Range(format!("s_max {s_max} outside (0, {MAX_ARG}]")));
    }
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::Domain(format!(
            "friction coefficient must be positive, got {alpha}"
        )));
    }

    let steps = (s_max / SCAN_STEP).floor() as usize;
    let mut scan = RootScan::default();
    let mut prev_s = 0.0;
    let mut prev_g = 1.0;
    // Last two |G| samples for tangency detection: (s, g).
    let mut window: [(f64, f64); 2] = [(0.0, f64::INFINITY); 2];

    for i in 1..=steps + 1 {
        let s = if i > steps { s_max } else { i as f64 * SCAN_STEP };
        if s <= prev_s {
            break;
        }
        let gs = g(n, s, alpha);
        if gs == 0.0 {
            scan.roots.push(s);
        } else if prev_g != 0.0 && (gs > 0.0) != (prev_g > 0.0) {
            let lo = if prev_s == 0.0 { 0.5 * s * 1e-6 } else { prev_s };
            scan.roots.push(bisect(n, alpha, lo, s, prev_g));
        } else if let Some((s_min, relative_depth)) = dip_to_zero(|x| g(n, x, alpha), window, (s, gs)) {
            log::warn!("secular equation n={n} has a suspected double root near s={s_min:.6}");
            scan.tangencies.push(TangencyFlag {
                n,
                s: s_min,
                relative_depth,
            });
        }
        window = [window[1], (s, gs)];
        prev_s = s;
        prev_g = gs;
    }

    scan.roots.retain(|&s| {
        let lambda = s * s;
        if lambda > 0.0 {
            true
        } else {
            log::warn!("discarding nonpositive eigenvalue candidate s={s} for n={n}");
            false
        }
    });
    scan.roots.dedup_by(|a, b| (*a - *b).abs() <= ROOT_TOL);
    Ok(scan)
}

fn bisect(n: u32, alpha: f64, mut lo: f64, mut hi: f64, g_lo: f64) -> f64 {
    let lo_positive = g_lo > 0.0;
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(n, mid, alpha);
        if gm == 0.0 {
            return mid;
        }
        if (gm > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Detects a same-sign local minimum of `|f|` over three scan samples whose
/// refined minimum is numerically zero relative to the outer samples.
/// Returns the minimizer and the relative depth.
fn dip_to_zero(f: impl Fn(f64) -> f64, window: [(f64, f64); 2], next: (f64, f64)) -> Option<(f64, f64)> {
    let [(s0, g0), (_, g1)] = window;
    let (s2, g2) = next;
    if !g0.is_finite() || g1 == 0.0 {
        return None;
    }
    let same_sign = (g0 > 0.0) == (g1 > 0.0) && (g1 > 0.0) == (g2 > 0.0);
    if !same_sign || g1.abs() >= g0.abs() || g1.abs() >= g2.abs() {
        return None;
    }
    // Golden-section minimization of |f| on [s0, s2].
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let (mut a, mut b) = (s0, s2);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c).abs();
    let mut fd = f(d).abs();
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c).abs();
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d).abs();
        }
    }
    let (s_min, depth) = if fc < fd { (c, fc) } else { (d, fd) };
    let relative_depth = depth / g0.abs().max(g2.abs());
    (relative_depth < 1e-10).then_some((s_min, relative_depth))
}
