//! Secular equations of the bordered models and eigenvalue degeneracies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::hermitian_eigenvalues;
use crate::pencil::{frobenius, CMatrix, MatrixPencil};
use crate::scalar::{lit, to_f64, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SecularKind {
    /// `x = Σ p_i²/(x - a_i)`; poles do not move with `u`.
    EqualSlopeX,
    /// `E = Σ p_k²/(E - u r_k)`.
    BowTieE,
    /// `E = ε²/(4E) + Σ 2p_k²/(E - u r_k)`.
    GbtE,
}

/// Pole-sum equation `x = extra/x + Σ w_k/(x - π_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecularSpec<T: Real> {
    pub kind: SecularKind,
    pub poles: Vec<T>,
    pub weights: Vec<T>,
    /// Weight of the pole at zero (generalized bow-tie only).
    pub extra: Option<T>,
}

fn distinct<T: Real>(v: &[T], first_index: usize, dup: impl Fn(usize, usize) -> Error) -> Result<()> {
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] == v[j] {
                return Err(dup(i + first_index, j + first_index));
            }
        }
    }
    Ok(())
}

fn weights<T: Real>(p: &[T], first_index: usize, factor: T) -> Result<Vec<T>> {
    p.iter()
        .enumerate()
        .map(|(i, &x)| {
            if x == T::zero() {
                Err(Error::ZeroCoupling { index: i + first_index })
            } else {
                Ok(x * x * factor)
            }
        })
        .collect()
}

fn same_len(a: usize, b: usize) -> Result<()> {
    if a != b || a == 0 {
        return Err(Error::LengthMismatch(format!("{a} couplings vs {b} poles")));
    }
    Ok(())
}

impl<T: Real> SecularSpec<T> {
    pub fn equal_slope(p: &[T], a: &[T]) -> Result<Self> {
        same_len(p.len(), a.len())?;
        distinct(a, 2, |first, second| Error::DuplicateOffset { first, second })?;
        Ok(Self {
            kind: SecularKind::EqualSlopeX,
            poles: a.to_vec(),
            weights: weights(p, 2, T::one())?,
            extra: None,
        })
    }

    pub fn bowtie(p: &[T], r: &[T]) -> Result<Self> {
        same_len(p.len(), r.len())?;
        distinct(r, 2, |first, second| Error::DuplicateSlope { first, second })?;
        Ok(Self {
            kind: SecularKind::BowTieE,
            poles: r.to_vec(),
            weights: weights(p, 2, T::one())?,
            extra: None,
        })
    }

    /// The symmetric combination of the two special levels couples with
    /// `√2 p_k`, hence the weights `2p_k²`.
    pub fn generalized_bowtie(p: &[T], r: &[T], eps: T) -> Result<Self> {
        same_len(p.len(), r.len())?;
        distinct(r, 3, |first, second| Error::DuplicateSlope { first, second })?;
        if let Some(i) = r.iter().position(|&x| x == T::zero()) {
            return Err(Error::ZeroSlopeEntry { index: i + 3 });
        }
        if eps == T::zero() {
            return Err(Error::ZeroDetuning);
        }
        Ok(Self {
            kind: SecularKind::GbtE,
            poles: r.to_vec(),
            weights: weights(p, 3, lit(2.0))?,
            extra: Some(eps * eps * lit(0.25)),
        })
    }

    pub fn dim(&self) -> usize {
        self.poles.len() + if self.extra.is_some() { 2 } else { 1 }
    }

    /// Pole positions and weights at parameter `u`.
    fn at(&self, u: T) -> Result<(Vec<T>, Vec<T>)> {
        if self.weights.iter().any(|&w| !(w > T::zero())) {
            return Err(Error::InvalidSecular("weights must be positive".into()));
        }
        if self.poles.len() != self.weights.len() {
            return Err(Error::InvalidSecular("poles and weights differ in length".into()));
        }
        let mut poles: Vec<T> = match self.kind {
            SecularKind::EqualSlopeX => self.poles.clone(),
            _ => {
                if u == T::zero() {
                    return Err(Error::DegeneratePoles(0.0));
                }
                self.poles.iter().map(|&r| r * u).collect()
            }
        };
        let mut weights = self.weights.clone();
        if let Some(e) = self.extra {
            if !(e > T::zero()) {
                return Err(Error::InvalidSecular("extra weight must be positive".into()));
            }
            poles.push(T::zero());
            weights.push(e);
        }
        let mut order: Vec<usize> = (0..poles.len()).collect();
        order.sort_by(|&a, &b| poles[a].partial_cmp(&poles[b]).unwrap_or(std::cmp::Ordering::Equal));
        let poles: Vec<T> = order.iter().map(|&i| poles[i]).collect();
        let weights: Vec<T> = order.iter().map(|&i| weights[i]).collect();
        if poles.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DegeneratePoles(to_f64(u)));
        }
        Ok((poles, weights))
    }
}

fn secular<T: Real>(x: T, poles: &[T], weights: &[T]) -> T {
    let mut s = x;
    for (&p, &w) in poles.iter().zip(weights) {
        s -= w / (x - p);
    }
    s
}

/// Brent's method on a bracket with `f(a) < 0 < f(b)`.
pub fn brent<T: Real>(f: impl Fn(T) -> T, a: T, b: T, rel_tol: T, max_iter: usize) -> Option<T> {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == T::zero() {
        return Some(a);
    }
    if fb == T::zero() {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    let two: T = lit(2.0);
    let half: T = lit(0.5);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = two * T::default_epsilon() * b.abs() + half * rel_tol * b.abs().max(T::default_epsilon());
        let m = half * (c - b);
        if m.abs() <= tol || fb == T::zero() {
            return Some(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * m * s;
                q = T::one() - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (two * m * qa * (qa - r) - (b - a) * (r - T::one()));
                q = (qa - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            } else {
                p = -p;
            }
            let lhs = two * p;
            let rhs = (lit::<T>(3.0) * m * q - (tol * q).abs()).min((e * q).abs());
            if lhs < rhs {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = d;
            }
        } else {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol * m.signum() };
        fb = f(b);
    }
    None
}

/// Bisect an open interval whose ends are poles (or infinite) until both
/// ends carry finite values of opposite sign.
fn finite_bracket<T: Real>(f: &impl Fn(T) -> T, lo: T, hi: T) -> Option<(T, T)> {
    let half: T = lit(0.5);
    let (mut a, mut b) = (lo, hi);
    let mut a_ok = false;
    let mut b_ok = false;
    for _ in 0..200 {
        if a_ok && b_ok {
            return Some((a, b));
        }
        let mid = a + (b - a) * half;
        if mid <= a || mid >= b {
            return None;
        }
        let v = f(mid);
        if v == T::zero() {
            return Some((mid, mid));
        }
        if v < T::zero() {
            a = mid;
            a_ok = true;
        } else {
            b = mid;
            b_ok = true;
        }
    }
    None
}

pub const ROOT_REL_TOL: f64 = 1e-13;

/// A few guarded Newton steps after Brent. Near a pole `f'` is large, so a
/// root that is good to `ROOT_REL_TOL` in `x` can still leave a sizeable
/// residual `f(x)`; this pushes it down to rounding level.
fn polish<T: Real>(f: &impl Fn(T) -> T, poles: &[T], weights: &[T], mut x: T, a: T, b: T) -> T {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let mut fx = f(x);
    for _ in 0..4 {
        if fx == T::zero() {
            break;
        }
        let slope = poles
            .iter()
            .zip(weights)
            .fold(T::one(), |s, (&p, &w)| s + w / ((x - p) * (x - p)));
        let next = x - fx / slope;
        if !(next >= lo && next <= hi) {
            break;
        }
        let f_next = f(next);
        if f_next.abs() >= fx.abs() {
            break;
        }
        (x, fx) = (next, f_next);
    }
    x
}

/// All real roots, ascending: one between each pair of consecutive poles and
/// one in each outer interval.
pub fn char_roots<T: Real>(spec: &SecularSpec<T>, u: T) -> Result<Vec<T>> {
    let (poles, weights) = spec.at(u)?;
    let f = |x: T| secular(x, &poles, &weights);
    let pmax = poles.iter().fold(T::zero(), |m, &p| m.max(p.abs()));
    let wsum = weights.iter().fold(T::zero(), |s, &w| s + w);
    // For |x| >= P + W + 1 the pole sum is below one in magnitude, so f has
    // the sign of x there.
    let mut bound = pmax + wsum + T::one();
    let mut left = -bound;
    let mut right = bound;
    for _ in 0..64 {
        if f(left) < T::zero() && f(right) > T::zero() {
            break;
        }
        bound *= lit(2.0);
        left = -bound;
        right = bound;
    }
    let mut edges = Vec::with_capacity(poles.len() + 2);
    edges.push(left);
    edges.extend(poles.iter().copied());
    edges.push(right);
    let tol = lit::<T>(ROOT_REL_TOL).max(T::default_epsilon() * lit(4.0));
    let mut roots = Vec::with_capacity(edges.len() - 1);
    for (i, w) in edges.windows(2).enumerate() {
        let (lo, hi) = (w[0], w[1]);
        let fail = || Error::RootBracketFailure {
            lo: to_f64(lo),
            hi: to_f64(hi),
        };
        // Outer ends are finite points with known signs; inner ends are poles.
        let (a, b) = if i == 0 && poles.is_empty() {
            (lo, hi)
        } else if i == 0 {
            let (_, b) = finite_bracket(&f, lo, hi).ok_or_else(fail)?;
            (lo, b)
        } else if i == edges.len() - 2 {
            let (a, _) = finite_bracket(&f, lo, hi).ok_or_else(fail)?;
            (a, hi)
        } else {
            finite_bracket(&f, lo, hi).ok_or_else(fail)?
        };
        let root = if a == b { a } else { brent(f, a, b, tol, 500).ok_or_else(fail)? };
        roots.push(polish(&f, &poles, &weights, root, a, b));
    }
    Ok(roots)
}

/// Eigenvalue clusters `(mean, multiplicity)` of a Hermitian matrix, where
/// consecutive sorted eigenvalues closer than `tol` are merged.
pub fn degeneracy_profile_matrix<T: Real>(h: &CMatrix<T>, tol: T) -> Vec<(T, usize)> {
    let vals = hermitian_eigenvalues(h);
    let mut out: Vec<(T, usize)> = Vec::new();
    let mut sum = T::zero();
    let mut last = T::zero();
    for (i, &v) in vals.iter().enumerate() {
        if i > 0 && (v - last).abs() <= tol {
            let (_, m) = out.last_mut().expect("cluster open");
            *m += 1;
            sum += v;
        } else {
            if let Some((mean, m)) = out.last_mut() {
                *mean = sum / lit::<T>(*m as f64);
            }
            out.push((v, 1));
            sum = v;
        }
        last = v;
    }
    if let Some((mean, m)) = out.last_mut() {
        *mean = sum / lit::<T>(*m as f64);
    }
    out
}

/// Default clustering tolerance `1e-9 · ‖H(u)‖_F`.
pub fn default_cluster_tol<T: Real>(pencil: &MatrixPencil<T>, u: T) -> T {
    lit::<T>(1e-9) * frobenius(&pencil.eval(u)).max(T::default_epsilon())
}

pub fn degeneracy_profile<T: Real>(pencil: &MatrixPencil<T>, u: T, tol: T) -> Vec<(T, usize)> {
    degeneracy_profile_matrix(&pencil.eval(u), tol)
}

/// Multiplicity of the cluster containing `value`, 0 if none.
pub fn multiplicity_of<T: Real>(profile: &[(T, usize)], value: T, tol: T) -> usize {
    profile
        .iter()
        .find(|(v, _)| (*v - value).abs() <= tol)
        .map(|&(_, m)| m)
        .unwrap_or(0)
}

/// Smallest gap between consecutive eigenvalues of `H(u)`.
pub fn min_gap<T: Real>(pencil: &MatrixPencil<T>, u: T) -> T {
    let vals = hermitian_eigenvalues(&pencil.eval(u));
    vals.windows(2)
        .map(|w| w[1] - w[0])
        .fold(T::max_value().unwrap_or_else(|| lit(f64::MAX)), |a, b| a.min(b))
}

/// `(u, min_gap(u))` on a grid.
pub fn gap_scan<T: Real>(pencil: &MatrixPencil<T>, us: &[T]) -> Vec<(T, T)> {
    us.iter().map(|&u| (u, min_gap(pencil, u))).collect()
}

/// Whether sorted `roots` strictly interlace sorted `poles`, with one root
/// below the first pole and one above the last.
pub fn interlaces<T: Real>(roots: &[T], poles: &[T]) -> bool {
    if roots.len() != poles.len() + 1 {
        return false;
    }
    (0..poles.len()).all(|i| roots[i] < poles[i] && poles[i] < roots[i + 1])
}
