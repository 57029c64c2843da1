//! Small numeric helpers shared by the procedures.

use libm::erfc;

/// Relative slack applied before rounding products such as `gamma * l` to
/// integers, so that `0.29 * 100 = 28.999999999999996` floors to 29.
pub const ROUNDING_GUARD: f64 = 1e-12;

#[inline]
fn guard(x: f64) -> f64 {
    ROUNDING_GUARD * x.abs().max(1.0)
}

/// `floor(x)` that treats values within the rounding guard below an integer
/// as that integer.
#[inline]
pub fn floor_guarded(x: f64) -> i64 {
    (x + guard(x)).floor() as i64
}

/// `ceil(x)` that treats values within the rounding guard above an integer
/// as that integer.
#[inline]
pub fn ceil_guarded(x: f64) -> i64 {
    (x - guard(x)).ceil() as i64
}

/// Standard normal upper tail `P(Z >= x)` via the complementary error
/// function (relative accuracy about 1e-14 for `|x| <= 8`).
#[inline]
pub fn normal_upper_tail(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Largest `t` in `[lo, hi]` (up to `tol`) with `pred(t)` true, assuming
/// `pred` is true on an initial segment. `pred(lo)` must hold.
pub fn bisect_last_true(mut lo: f64, mut hi: f64, tol: f64, pred: impl Fn(f64) -> bool) -> f64 {
    if pred(hi) {
        return hi;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
