//! Special functions needed by the transition probability formulas.

use crate::error::{Error, Result};
use crate::scalar::{from_int, lit, to_f64, Real};

/// Bernoulli-number coefficients `B_{2k} / (2k (2k-1))` of the Stirling
/// series, `k = 1..8`.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

const STIRLING_FROM: f64 = 16.0;

/// `ln Γ(x)` for `x > 0`: upward shift to `x ≥ 16`, then the Stirling
/// series.
pub fn log_gamma<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) {
        return Err(Error::NonPositiveArgument(to_f64(x)));
    }
    let from: T = lit(STIRLING_FROM);
    let mut shift = T::one();
    let mut y = x;
    while y < from {
        shift *= y;
        y += T::one();
    }
    let half: T = lit(0.5);
    let ln_2pi: T = lit((2.0 * std::f64::consts::PI).ln());
    let inv = T::one() / y;
    let inv2 = inv * inv;
    let mut series = T::zero();
    let mut pow = inv;
    for c in STIRLING {
        series += lit::<T>(c) * pow;
        pow *= inv2;
    }
    Ok((y - half) * y.ln() - y + half * ln_2pi + series - shift.ln())
}

/// `ln n!`.
pub fn log_factorial<T: Real>(n: u64) -> T {
    if n < 2 {
        return T::zero();
    }
    log_gamma(from_int::<T>(n as i64 + 1)).expect("argument is positive")
}

/// Associated Laguerre polynomial `L_n^α(x)` by its three-term recurrence.
pub fn laguerre_assoc<T: Real>(n: u64, alpha: i64, x: T) -> T {
    let a: T = from_int(alpha);
    let mut prev = T::one();
    if n == 0 {
        return prev;
    }
    let mut cur = T::one() + a - x;
    for k in 1..n {
        let kf: T = from_int(k as i64);
        let next = ((lit::<T>(2.0) * kf + T::one() + a - x) * cur - (kf + a) * prev) / (kf + T::one());
        prev = cur;
        cur = next;
    }
    cur
}

/// Integer-order Bessel function `J_n(x)` by Miller's downward recurrence,
/// normalized with `J_0 + 2 Σ_k J_{2k} = 1`.
pub fn bessel_j<T: Real>(order: i64, x: T) -> T {
    let n = order.unsigned_abs();
    let sign_order = if order < 0 && n % 2 == 1 { -T::one() } else { T::one() };
    let sign_x = if x < T::zero() && n % 2 == 1 { -T::one() } else { T::one() };
    let ax = x.abs();
    if ax == T::zero() {
        return if n == 0 { T::one() } else { T::zero() };
    }
    let big = to_f64(ax).max(n as f64);
    let mut start = (big + 30.0 + (60.0 * big).sqrt()) as u64;
    start += start % 2;
    let two: T = lit(2.0);
    let rescale: T = lit(1e30);
    let mut above = T::zero();
    let mut cur: T = lit(1e-30);
    let mut norm = T::zero();
    let mut wanted = T::zero();
    // `cur` holds J_m while stepping m down from `start`.
    let mut m = start;
    loop {
        if m == n {
            wanted = cur;
        }
        if m % 2 == 0 {
            norm += if m == 0 { cur } else { two * cur };
        }
        if m == 0 {
            break;
        }
        let below = two * from_int::<T>(m as i64) / ax * cur - above;
        above = cur;
        cur = below;
        m -= 1;
        if cur.abs() > rescale {
            let s = T::one() / rescale;
            cur *= s;
            above *= s;
            norm *= s;
            wanted *= s;
        }
    }
    sign_order * sign_x * wanted / norm
}

fn non_positive_integer<T: Real>(a: T) -> Option<u64> {
    (a <= T::zero() && a == a.round()).then(|| to_f64(-a) as u64)
}

/// Terminating Gauss series `₂F₁(a, b; c; z)`; one of `a`, `b` must be a
/// non-positive integer.
pub fn hyp2f1_terminating<T: Real>(a: T, b: T, c: T, z: T) -> Result<T> {
    let n = match (non_positive_integer(a), non_positive_integer(b)) {
        (Some(x), Some(y)) => x.min(y),
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => {
            return Err(Error::NonTerminating {
                a: to_f64(a),
                b: to_f64(b),
            })
        }
    };
    let mut sum = T::one();
    let mut term = T::one();
    for k in 0..n {
        let kf: T = from_int(k as i64);
        let ck = c + kf;
        if ck == T::zero() || non_positive_integer(ck).is_some() {
            return Err(Error::PolePassed { c: to_f64(c) });
        }
        term = term * (a + kf) * (b + kf) / (ck * (kf + T::one())) * z;
        sum += term;
    }
    Ok(sum)
}
