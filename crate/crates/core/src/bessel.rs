//! Bessel functions of the first kind for integer order.
//!
//! Small arguments use the ascending power series; everything else uses
//! Miller's backward recurrence normalized by `J_0 + 2 Σ J_2k = 1`.

use alloc::format;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Largest supported order.
pub const MAX_ORDER: u32 = 64;
/// Largest supported argument.
pub const MAX_ARG: f64 = 200.0;

const SERIES_CUTOFF: f64 = 5.0;
const RESCALE_ABOVE: f64 = 1e250;

/// Returns `(J_n(x), J_n'(x))`.
pub fn bessel_j(n: u32, x: f64) -> Result<(f64, f64)> {
    if n > MAX_ORDER {
        return Err(Error::Range(format!("bessel order {n} exceeds {MAX_ORDER}")));
    }
    if !(0.0..=MAX_ARG).contains(&x) {
        return Err(Error::Range(format!("bessel argument {x} outside [0, {MAX_ARG}]")));
    }
    Ok(jn_with_derivative(n, x))
}

/// Unchecked evaluation used on hot paths where the range is already known.
pub(crate) fn jn_with_derivative(n: u32, x: f64) -> (f64, f64) {
    let [below, at, above] = if x < SERIES_CUTOFF {
        [
            if n == 0 { -series(1, x) } else { series(n - 1, x) },
            series(n, x),
            series(n + 1, x),
        ]
    } else {
        miller(n, x)
    };
    (at, 0.5 * (below - above))
}

/// `J_n(x)` alone.
pub(crate) fn jn(n: u32, x: f64) -> f64 {
    if x < SERIES_CUTOFF {
        series(n, x)
    } else {
        miller(n, x)[1]
    }
}

fn series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for i in 1..=n {
        term *= half / i as f64;
    }
    if term == 0.0 {
        return 0.0;
    }
    let q = -half * half;
    let mut sum = term;
    let mut k = 0u32;
    loop {
        k += 1;
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || k > 200 {
            break;
        }
    }
    sum
}

/// `[J_{n-1}, J_n, J_{n+1}]` by backward recurrence (with `J_{-1} = -J_1`).
fn miller(n: u32, x: f64) -> [f64; 3] {
    let reach = (n + 1).max(x.ceil() as u32);
    let mut start = reach + 30 + (40.0 * reach as f64).sqrt() as u32;
    start += start % 2;

    let mut upper = 0.0; // J_{k+1}
    let mut current = 1e-30; // J_k
    let mut norm = 0.0;
    let mut picked = [0.0f64; 3];
    let mut k = start;
    loop {
        if k == n + 1 {
            picked[2] = current;
        } else if k == n {
            picked[1] = current;
        } else if n > 0 && k == n - 1 {
            picked[0] = current;
        }
        if k == 0 {
            norm += current;
            break;
        }
        if k.is_multiple_of(2) {
            norm += 2.0 * current;
        }
        let lower = 2.0 * k as f64 / x * current - upper;
        upper = current;
        current = lower;
        k -= 1;
        if current.abs() > RESCALE_ABOVE {
            current /= RESCALE_ABOVE;
            upper /= RESCALE_ABOVE;
            norm /= RESCALE_ABOVE;
            for p in picked.iter_mut() {
                *p /= RESCALE_ABOVE;
            }
        }
    }
    if n == 0 {
        // `upper` holds J_1 after the final step.
        picked[0] = -upper;
    }
    [picked[0] / norm, picked[1] / norm, picked[2] / norm]
}
