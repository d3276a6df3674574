//! Closed-form transition probabilities of the ladder models.

pub mod special;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{BargmannIndex, HalfInteger, ModelSpec};
use crate::scalar::{from_int, lit, Real};
use special::{bessel_j, hyp2f1_terminating, laguerre_assoc, log_factorial, log_gamma};

fn pi<T: Real>() -> T {
    lit(std::f64::consts::PI)
}

/// `q = cos²(β/2) = exp(-πg²/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerBeta<T> {
    pub q: T,
}

impl<T: Real> EulerBeta<T> {
    pub fn from_coupling(g: T) -> Self {
        Self {
            q: (-pi::<T>() * g * g * lit(0.5)).exp(),
        }
    }

    pub fn cos_half(&self) -> T {
        self.q.sqrt()
    }

    pub fn sin_half(&self) -> T {
        (T::one() - self.q).max(T::zero()).sqrt()
    }
}

/// `z = 1 - exp(2π g̃²)`, never positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Su11Z<T> {
    pub z: T,
}

impl<T: Real> Su11Z<T> {
    pub fn from_coupling(g: T) -> Self {
        Self {
            z: T::one() - (lit::<T>(2.0) * pi::<T>() * g * g).exp(),
        }
    }
}

/// Two-level survival probability `exp(-πg²/2)`.
pub fn lz2_survival<T: Real>(g: T) -> T {
    EulerBeta::from_coupling(g).q
}

/// `a ln b`, with `0 · ln 0 = 0`.
fn xlny<T: Real>(a: T, b: T) -> T {
    if a == T::zero() {
        T::zero()
    } else {
        a * b.ln()
    }
}

/// `P_{m→m'}` for a spin `j` driven by `g S_x + t S_z`.
pub fn su2_transition<T: Real>(j: HalfInteger, m: HalfInteger, m_prime: HalfInteger, g: T) -> Result<T> {
    let bad = || Error::InvalidMagneticQuantum {
        j: j.value(),
        m: m.value(),
        m_prime: m_prime.value(),
    };
    let tj = j.twice();
    for x in [m, m_prime] {
        if tj <= 0 || x.twice().abs() > tj || (tj - x.twice()) % 2 != 0 {
            return Err(bad());
        }
    }
    // The m' > m and m > m' forms are mirror images; evaluate the sum with
    // `lo <= hi` in the roles of (m, m').
    let (lo, hi) = if m.twice() <= m_prime.twice() {
        (m.twice(), m_prime.twice())
    } else {
        (m_prime.twice(), m.twice())
    };
    let jp_lo = ((tj + lo) / 2) as u64;
    let jm_lo = ((tj - lo) / 2) as u64;
    let jp_hi = ((tj + hi) / 2) as u64;
    let jm_hi = ((tj - hi) / 2) as u64;
    let d = ((hi - lo) / 2) as u64;
    let beta = EulerBeta::from_coupling(g);
    let (c, s) = (beta.cos_half(), beta.sin_half());
    let half: T = lit(0.5);
    let prefactor = half
        * (log_factorial::<T>(jp_lo) + log_factorial(jm_lo) + log_factorial(jp_hi) + log_factorial(jm_hi));
    let mut sum = T::zero();
    for mu in 0..=jp_lo.min(jm_hi) {
        let log_term = prefactor
            - log_factorial(jp_lo - mu)
            - log_factorial(mu)
            - log_factorial(jm_hi - mu)
            - log_factorial(d + mu)
            + xlny(from_int::<T>((tj as u64 - d - 2 * mu) as i64), c)
            + xlny(from_int::<T>((d + 2 * mu) as i64), s);
        let term = log_term.exp();
        if mu % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(sum * sum)
}

/// Full `(2j+1)²` matrix, states ordered `m = j, j-1, …, -j`.
pub fn su2_matrix<T: Real>(j: HalfInteger, g: T) -> Result<Vec<Vec<T>>> {
    let n = (j.twice() + 1).max(0) as usize;
    let m_of = |i: usize| HalfInteger::from_twice(j.twice() - 2 * i as i64);
    (0..n)
        .map(|a| (0..n).map(|b| su2_transition(j, m_of(a), m_of(b), g)).collect())
        .collect()
}

/// `P_{n→n'}` of the driven oscillator,
/// `(n_<!/n_>!) e^{-x} x^{n_>-n_<} [L_{n_<}^{(n_>-n_<)}(x)]²` with `x = 2πg²`.
pub fn oscillator_transition<T: Real>(n: u64, n_prime: u64, g: T) -> T {
    let (big, small) = (n.max(n_prime), n.min(n_prime));
    let x = lit::<T>(2.0) * pi::<T>() * g * g;
    let d = big - small;
    if x == T::zero() {
        return if d == 0 { T::one() } else { T::zero() };
    }
    let lag = laguerre_assoc(small, d as i64, x);
    if lag == T::zero() {
        return T::zero();
    }
    let log_p = log_factorial::<T>(small) - log_factorial(big) - x + from_int::<T>(d as i64) * x.ln()
        + lit::<T>(2.0) * lag.abs().ln();
    log_p.exp()
}

/// `P_{n→n'} = J²_{n-n'}(2√(2π) g)` on the infinite chain.
pub fn chain_transition<T: Real>(n: i64, n_prime: i64, g: T) -> T {
    let arg = lit::<T>(2.0) * (lit::<T>(2.0) * pi::<T>()).sqrt() * g;
    bessel_j(n - n_prime, arg).powi(2)
}

/// Offset `μ - k` of a sector state, checked to be a non-negative integer.
pub fn sector_offset(k: BargmannIndex, mu: f64) -> Result<u64> {
    let d = mu - k.value();
    let r = d.round();
    if (d - r).abs() > 1e-9 || r < 0.0 {
        return Err(Error::InvalidSectorState { k: k.value(), mu });
    }
    Ok(r as u64)
}

/// `ln |Θ_{μμ'}(k)|` for `μ = k + hi >= μ' = k + lo`.
fn log_theta<T: Real>(k: T, hi: u64, lo: u64) -> T {
    let mu: T = k + from_int(hi as i64);
    let mup: T = k + from_int(lo as i64);
    let lg = |x: T| log_gamma(x).expect("sector arguments are positive");
    -log_factorial::<T>(hi - lo) + lit::<T>(0.5) * (lg(mu + T::one() - k) + lg(mu + k) - lg(mup + T::one() - k) - lg(mup + k))
}

/// `Θ_{μμ'}(k)` with its sign: positive for `μ >= μ'`, and
/// `(-1)^{μ'-μ} |Θ_{μ'μ}|` otherwise.
pub fn theta<T: Real>(k: BargmannIndex, n: u64, n_prime: u64) -> T {
    let kk: T = k.as_real();
    let (hi, lo) = (n.max(n_prime), n.min(n_prime));
    let mag = log_theta(kk, hi, lo).exp();
    if n < n_prime && (n_prime - n) % 2 == 1 {
        -mag
    } else {
        mag
    }
}

/// `P_{μ→μ'}` in the `D_k^+` sector with states `μ = k + n`.
pub fn su11_transition_offsets<T: Real>(k: BargmannIndex, n: u64, n_prime: u64, g: T) -> Result<T> {
    let kk: T = k.as_real();
    let z = Su11Z::from_coupling(g).z;
    let (hi, lo) = (n.max(n_prime), n.min(n_prime));
    if z == T::zero() {
        return Ok(if hi == lo { T::one() } else { T::zero() });
    }
    let mu_hi = kk + from_int(hi as i64);
    let mu_lo = kk + from_int(lo as i64);
    let f = hyp2f1_terminating(
        kk - mu_lo,
        T::one() - mu_lo - kk,
        T::one() + from_int((hi - lo) as i64),
        z,
    )?;
    if f == T::zero() {
        return Ok(T::zero());
    }
    let x = lit::<T>(2.0) * pi::<T>() * g * g;
    let log_p = lit::<T>(2.0) * log_theta(kk, hi, lo) + xlny(from_int((hi - lo) as i64), -z)
        - x * (mu_hi + mu_lo)
        + lit::<T>(2.0) * f.abs().ln();
    Ok(log_p.exp())
}

pub fn su11_transition<T: Real>(k: BargmannIndex, mu: f64, mu_prime: f64, g: T) -> Result<T> {
    su11_transition_offsets(k, sector_offset(k, mu)?, sector_offset(k, mu_prime)?, g)
}

/// Closed-form `P[i][j]` between basis states of a ladder model, indexed
/// as in [`ModelSpec::build`].
pub fn model_transition(spec: &ModelSpec, i: usize, j: usize) -> Result<f64> {
    let n = spec.dim();
    if i >= n || j >= n {
        return Err(Error::DimensionMismatch(i.max(j), n));
    }
    match spec {
        ModelSpec::Su2Spin { coupling, spin } => {
            let m = |x: usize| HalfInteger::from_twice(spin.twice() - 2 * x as i64);
            su2_transition(*spin, m(i), m(j), *coupling)
        }
        ModelSpec::Oscillator { coupling, .. } => Ok(oscillator_transition(i as u64, j as u64, *coupling)),
        ModelSpec::LinearChain { coupling, .. } => {
            Ok(chain_transition(spec.label_of(i), spec.label_of(j), *coupling))
        }
        ModelSpec::Su11Sector {
            coupling,
            bargmann_index,
            ..
        } => su11_transition_offsets(*bargmann_index, i as u64, j as u64, *coupling),
        _ => Err(Error::Unsupported(format!(
            "no closed form for {:?}",
            spec.kind()
        ))),
    }
}

/// Sum of `P_{μ→μ'}` over the first `terms + 1` sector states.
pub fn su11_column_sum<T: Real>(k: BargmannIndex, n: u64, terms: u64, g: T) -> Result<T> {
    (0..=terms).try_fold(T::zero(), |acc, m| Ok(acc + su11_transition_offsets(k, n, m, g)?))
}
