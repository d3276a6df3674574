//! Hamiltonian pencils of the solvable Landau-Zener models, in the diabatic
//! basis.
//!
//! Bordered models put the special level(s) first; ladder models (spin,
//! oscillator, chain, SU(1,1) sector) order their states by ascending
//! quantum number, except the spin, which runs `m = j, j-1, …, -j` so that
//! `C_1 = S_z` is `diag(j, …, -j)`.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::pencil::{CMatrix, MatrixPencil};
use crate::scalar::{cabs, carg, cis, from_int, lit, re, tol, Real};

/// Spin or magnetic quantum number stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInteger(i64);

impl HalfInteger {
    pub fn from_twice(twice: i64) -> Self {
        Self(twice)
    }

    /// Exact conversion from a float that must be a multiple of 1/2.
    pub fn from_f64(x: f64) -> Option<Self> {
        let t = (2.0 * x).round();
        if (2.0 * x - t).abs() < 1e-9 && t.abs() < 1e12 {
            Some(Self(t as i64))
        } else {
            None
        }
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Serialize for HalfInteger {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for HalfInteger {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let x = f64::deserialize(d)?;
        HalfInteger::from_f64(x).ok_or_else(|| D::Error::custom(format!("{x} is not a half-integer")))
    }
}

/// Bargmann index `k` of a positive discrete SU(1,1) series, stored in
/// quarters. Valid values are `1/4`, `3/4` (one-mode realization) and the
/// positive half-integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BargmannIndex(u32);

impl BargmannIndex {
    pub fn from_quarters(q: u32) -> Result<Self> {
        if q == 1 || q == 3 || (q > 0 && q % 2 == 0) {
            Ok(Self(q))
        } else {
            Err(Error::InvalidBargmannIndex(q as f64 / 4.0))
        }
    }

    pub fn from_f64(k: f64) -> Result<Self> {
        let q = (4.0 * k).round();
        if (4.0 * k - q).abs() > 1e-9 || q < 1.0 || q > 1e9 {
            return Err(Error::InvalidBargmannIndex(k));
        }
        Self::from_quarters(q as u32)
    }

    /// Two-mode sector of `|n_a, n_b⟩`: `k = (|n_a - n_b| + 1) / 2`, and the
    /// state's `μ = (n_a + n_b + 1) / 2`.
    pub fn two_mode(n_a: u64, n_b: u64) -> (Self, f64) {
        let k = Self(2 * (n_a.abs_diff(n_b) as u32 + 1));
        (k, (n_a + n_b + 1) as f64 / 2.0)
    }

    /// One-mode sector and offset of Fock state `|n⟩`: even `n = 2N` maps to
    /// `|1/4, N + 1/4⟩`, odd `n = 2N + 1` to `|3/4, N + 3/4⟩`.
    pub fn one_mode(n: u64) -> (Self, u64) {
        if n % 2 == 0 {
            (Self(1), n / 2)
        } else {
            (Self(3), (n - 1) / 2)
        }
    }

    pub fn quarters(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 4.0
    }

    pub fn as_real<T: Real>(self) -> T {
        lit(self.value())
    }
}

impl Serialize for BargmannIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for BargmannIndex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let x = f64::deserialize(d)?;
        BargmannIndex::from_f64(x).map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    EqualSlope,
    BowTie,
    GeneralizedBowTie,
    Su2Spin,
    Oscillator,
    LinearChain,
    Su11Sector,
}

impl ModelKind {
    /// Whether a closed-form transition probability exists for this kind.
    pub fn has_closed_form(self) -> bool {
        matches!(
            self,
            ModelKind::Su2Spin | ModelKind::Oscillator | ModelKind::LinearChain | ModelKind::Su11Sector
        )
    }

    fn is_ladder(self) -> bool {
        self.has_closed_form()
    }
}

/// Parameter record for every model, tagged by `kind` in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    EqualSlope {
        /// `p_2..p_N`
        couplings: Vec<f64>,
        /// `a_2..a_N`
        offsets: Vec<f64>,
        /// `b`
        slope: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        coupling_phases: Option<Vec<f64>>,
    },
    BowTie {
        couplings: Vec<f64>,
        /// `r_2..r_N`
        slopes: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        coupling_phases: Option<Vec<f64>>,
    },
    GeneralizedBowTie {
        /// `p_3..p_N`
        couplings: Vec<f64>,
        /// `r_3..r_N`
        slopes: Vec<f64>,
        detuning: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        coupling_phases: Option<Vec<f64>>,
    },
    Su2Spin {
        coupling: f64,
        spin: HalfInteger,
    },
    Oscillator {
        coupling: f64,
        cutoff: usize,
    },
    LinearChain {
        coupling: f64,
        n_min: i64,
        n_max: i64,
    },
    Su11Sector {
        coupling: f64,
        bargmann_index: BargmannIndex,
        cutoff: usize,
    },
}

/// Diagonal gauge `U = diag(e^{iθ_n})` with `H' = U^† H U`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugePhases<T: Real> {
    pub theta: Vec<T>,
}

impl<T: Real> GaugePhases<T> {
    pub fn identity(n: usize) -> Self {
        Self {
            theta: vec![T::zero(); n],
        }
    }

    pub fn unitary(&self) -> CMatrix<T> {
        let n = self.theta.len();
        CMatrix::from_fn(n, n, |i, j| if i == j { cis(self.theta[i]) } else { Complex::new(T::zero(), T::zero()) })
    }
}

fn polar<T: Real>(modulus: T, phase: T) -> Complex<T> {
    cis(phase) * modulus
}

fn check_nonzero<T: Real>(p: &[Complex<T>], first_index: usize) -> Result<()> {
    for (i, z) in p.iter().enumerate() {
        if cabs(*z) == T::zero() {
            return Err(Error::ZeroCoupling {
                index: i + first_index,
            });
        }
    }
    Ok(())
}

fn check_distinct<T: Real>(r: &[T], first_index: usize) -> Result<()> {
    for i in 0..r.len() {
        for j in i + 1..r.len() {
            if r[i] == r[j] {
                return Err(Error::DuplicateSlope {
                    first: i + first_index,
                    second: j + first_index,
                });
            }
        }
    }
    Ok(())
}

fn check_len(what: &str, a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::LengthMismatch(format!("{what}: {a} vs {b}")));
    }
    if a == 0 {
        return Err(Error::TooFewStates { min: 2, got: 1 });
    }
    Ok(())
}

fn to_complex<T: Real>(p: &[T]) -> Vec<Complex<T>> {
    p.iter().map(|&x| re(x)).collect()
}

/// Equal slope model: level 1 has slope `b` and couples to every other
/// level through `p_i`; levels `2..N` sit at fixed energies `a_i`.
pub fn build_equal_slope<T: Real>(p: &[T], a: &[T], b: T) -> Result<MatrixPencil<T>> {
    build_equal_slope_complex(&to_complex(p), a, b)
}

pub fn build_equal_slope_complex<T: Real>(
    p: &[Complex<T>],
    a: &[T],
    b: T,
) -> Result<MatrixPencil<T>> {
    check_len("couplings/offsets", p.len(), a.len())?;
    check_nonzero(p, 2)?;
    if b == T::zero() {
        return Err(Error::ZeroSlope);
    }
    let n = p.len() + 1;
    let mut c0 = CMatrix::zeros(n, n);
    for k in 1..n {
        c0[(0, k)] = p[k - 1];
        c0[(k, 0)] = p[k - 1].conj();
        c0[(k, k)] = re(a[k - 1]);
    }
    let mut c1 = CMatrix::zeros(n, n);
    c1[(0, 0)] = re(b);
    MatrixPencil::new(vec![c0, c1])
}

/// Bow-tie model: level 1 (slope 0) couples to levels `2..N` with slopes
/// `r_i`, which are mutually uncoupled.
pub fn build_bowtie<T: Real>(p: &[T], r: &[T]) -> Result<MatrixPencil<T>> {
    build_bowtie_complex(&to_complex(p), r)
}

pub fn build_bowtie_complex<T: Real>(p: &[Complex<T>], r: &[T]) -> Result<MatrixPencil<T>> {
    check_len("couplings/slopes", p.len(), r.len())?;
    check_nonzero(p, 2)?;
    check_distinct(r, 2)?;
    let n = p.len() + 1;
    let mut c0 = CMatrix::zeros(n, n);
    let mut c1 = CMatrix::zeros(n, n);
    for k in 1..n {
        c0[(0, k)] = p[k - 1];
        c0[(k, 0)] = p[k - 1].conj();
        c1[(k, k)] = re(r[k - 1]);
    }
    MatrixPencil::new(vec![c0, c1])
}

/// Generalized bow-tie model: two non-interacting levels split by `ε` both
/// couple with the same `p_i` to levels `3..N` of slopes `r_i`.
pub fn build_generalized_bowtie<T: Real>(p: &[T], r: &[T], eps: T) -> Result<MatrixPencil<T>> {
    build_generalized_bowtie_complex(&to_complex(p), r, eps)
}

pub fn build_generalized_bowtie_complex<T: Real>(
    p: &[Complex<T>],
    r: &[T],
    eps: T,
) -> Result<MatrixPencil<T>> {
    check_len("couplings/slopes", p.len(), r.len())?;
    check_nonzero(p, 3)?;
    check_distinct(r, 3)?;
    if let Some(i) = r.iter().position(|&x| x == T::zero()) {
        return Err(Error::ZeroSlopeEntry { index: i + 3 });
    }
    let n = p.len() + 2;
    let half = eps * lit(0.5);
    let mut c0 = CMatrix::zeros(n, n);
    let mut c1 = CMatrix::zeros(n, n);
    c0[(0, 0)] = re(half);
    c0[(1, 1)] = re(-half);
    for k in 2..n {
        for row in 0..2 {
            c0[(row, k)] = p[k - 2];
            c0[(k, row)] = p[k - 2].conj();
        }
        c1[(k, k)] = re(r[k - 2]);
    }
    MatrixPencil::new(vec![c0, c1])
}

fn tridiagonal<T: Real>(diag: &[T], off: &[T]) -> DMatrix<T> {
    let n = diag.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = diag[i];
        if i + 1 < n {
            m[(i, i + 1)] = off[i];
            m[(i + 1, i)] = off[i];
        }
    }
    m
}

/// `g S_x + t S_z` in the spin-`j` representation, states ordered
/// `m = j, j-1, …, -j`.
pub fn build_su2_spin<T: Real>(g: T, j: HalfInteger) -> Result<MatrixPencil<T>> {
    if j.twice() < 1 {
        return Err(Error::InvalidSpin(j.value()));
    }
    let n = (j.twice() + 1) as usize;
    let jj: T = lit(j.value());
    let ms: Vec<T> = (0..n).map(|i| jj - from_int::<T>(i as i64)).collect();
    // ⟨m|S_x|m-1⟩ = ½ √(j(j+1) - m(m-1))
    let off: Vec<T> = ms
        .iter()
        .take(n - 1)
        .map(|&m| g * lit::<T>(0.5) * (jj * (jj + T::one()) - m * (m - T::one())).sqrt())
        .collect();
    let c0 = tridiagonal(&vec![T::zero(); n], &off);
    let c1 = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(ms));
    MatrixPencil::from_real(vec![c0, c1])
}

/// Driven oscillator `t a†a + g_o (a† + a)` on Fock states `0..=cutoff`.
pub fn build_oscillator<T: Real>(g: T, cutoff: usize) -> Result<MatrixPencil<T>> {
    if cutoff < 4 {
        return Err(Error::CutoffTooSmall(cutoff));
    }
    let n = cutoff + 1;
    let off: Vec<T> = (1..n).map(|k| g * from_int::<T>(k as i64).sqrt()).collect();
    let c0 = tridiagonal(&vec![T::zero(); n], &off);
    let diag: Vec<T> = (0..n).map(|k| from_int(k as i64)).collect();
    let c1 = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
    MatrixPencil::from_real(vec![c0, c1])
}

/// Linear chain `Σ n t |n⟩⟨n| + g (|n⟩⟨n+1| + h.c.)` on sites `n_min..=n_max`.
pub fn build_linear_chain<T: Real>(g: T, n_min: i64, n_max: i64) -> Result<MatrixPencil<T>> {
    if n_max < n_min || n_max - n_min < 4 {
        return Err(Error::WindowTooSmall { n_min, n_max });
    }
    let n = (n_max - n_min + 1) as usize;
    let c0 = tridiagonal(&vec![T::zero(); n], &vec![g; n - 1]);
    let diag: Vec<T> = (n_min..=n_max).map(from_int).collect();
    let c1 = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
    MatrixPencil::from_real(vec![c0, c1])
}

/// Ladder element `⟨k, μ+1| K_+ |k, μ⟩ = √((μ + k)(μ - k + 1))`.
pub fn su11_raising<T: Real>(k: T, mu: T) -> T {
    ((mu + k) * (mu - k + T::one())).sqrt()
}

/// `t K_0 + g̃ (K_+ + K_-)` restricted to `μ = k, …, k + cutoff`.
pub fn build_su11_sector<T: Real>(g: T, k: BargmannIndex, cutoff: usize) -> Result<MatrixPencil<T>> {
    if cutoff < 4 {
        return Err(Error::CutoffTooSmall(cutoff));
    }
    let kk: T = k.as_real();
    let n = cutoff + 1;
    let mus: Vec<T> = (0..n).map(|i| kk + from_int::<T>(i as i64)).collect();
    let off: Vec<T> = mus.iter().take(n - 1).map(|&mu| g * su11_raising(kk, mu)).collect();
    let c0 = tridiagonal(&vec![T::zero(); n], &off);
    let c1 = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(mus));
    MatrixPencil::from_real(vec![c0, c1])
}

/// Truncated SU(1,1) generators `(K_0, K_+, K_-)` on `μ = k..k+cutoff`.
pub fn su11_generators<T: Real>(k: BargmannIndex, cutoff: usize) -> (DMatrix<T>, DMatrix<T>, DMatrix<T>) {
    let kk: T = k.as_real();
    let n = cutoff + 1;
    let k0 = DMatrix::from_fn(n, n, |i, j| if i == j { kk + from_int::<T>(i as i64) } else { T::zero() });
    let kp = DMatrix::from_fn(n, n, |i, j| {
        if i == j + 1 {
            su11_raising(kk, kk + from_int::<T>(j as i64))
        } else {
            T::zero()
        }
    });
    let km = kp.transpose();
    (k0, kp, km)
}

fn strip_phases<T: Real>(pencil: &MatrixPencil<T>, theta: &[T]) -> Result<MatrixPencil<T>> {
    let phases = GaugePhases { theta: theta.to_vec() };
    let u = phases.unitary();
    let ud = u.adjoint();
    let coeffs = pencil.coeffs().iter().map(|c| &ud * c * &u).collect();
    MatrixPencil::new(coeffs)
}

fn require_zero_outside<T: Real>(
    pencil: &MatrixPencil<T>,
    allowed: impl Fn(usize, usize, usize) -> bool,
) -> Result<()> {
    let n = pencil.dim();
    let eps = tol::<T>(1e-13, 64.0) * pencil.scale().max(T::one());
    for (q, c) in pencil.coeffs().iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                if i != j && !allowed(q, i, j) && cabs(c[(i, j)]) > eps {
                    return Err(Error::NotGaugeable(format!(
                        "unexpected entry ({i}, {j}) in C_{q}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Remove coupling phases by a constant diagonal unitary, returning the real
/// symmetric pencil and the phases `θ` with `p_k = |p_k| e^{-iθ_k}`.
///
/// Bordered models fix `θ_1 = 0` (and `θ_2 = 0` for the generalized
/// bow-tie); ladder models fix the phase of the first state and propagate
/// along the chain.
pub fn degauge<T: Real>(
    pencil: &MatrixPencil<T>,
    kind: ModelKind,
) -> Result<(MatrixPencil<T>, GaugePhases<T>)> {
    if pencil.degree() != 1 {
        return Err(Error::NotGaugeable("only degree-1 pencils are supported".into()));
    }
    let n = pencil.dim();
    let c0 = pencil.coeff(0);
    let mut theta = vec![T::zero(); n];
    match kind {
        ModelKind::EqualSlope | ModelKind::BowTie => {
            require_zero_outside(pencil, |q, i, j| q == 0 && (i == 0 || j == 0))?;
            for k in 1..n {
                theta[k] = -carg(c0[(0, k)]);
            }
        }
        ModelKind::GeneralizedBowTie => {
            if n < 3 {
                return Err(Error::NotGaugeable("generalized bow-tie needs N >= 3".into()));
            }
            require_zero_outside(pencil, |q, i, j| {
                q == 0 && ((i < 2) != (j < 2))
            })?;
            for k in 2..n {
                theta[k] = -carg(c0[(0, k)]);
            }
        }
        _ if kind.is_ladder() => {
            require_zero_outside(pencil, |q, i, j| q == 0 && i.abs_diff(j) == 1)?;
            for k in 1..n {
                let z = c0[(k - 1, k)];
                theta[k] = if cabs(z) > T::zero() {
                    theta[k - 1] - carg(z)
                } else {
                    theta[k - 1]
                };
            }
        }
        _ => unreachable!(),
    }
    let gauged = strip_phases(pencil, &theta)?;
    let eps = tol::<T>(1e-12, 256.0);
    if !gauged.is_real(eps) {
        return Err(Error::NotGaugeable(format!(
            "residual imaginary part {:e}",
            crate::scalar::to_f64(gauged.max_imag())
        )));
    }
    Ok((gauged.into_real_part(), GaugePhases { theta }))
}

fn with_phases(couplings: &[f64], phases: &Option<Vec<f64>>) -> Result<Vec<Complex<f64>>> {
    match phases {
        None => Ok(couplings.iter().map(|&p| re(p)).collect()),
        Some(th) => {
            check_len("couplings/coupling_phases", couplings.len(), th.len())?;
            Ok(couplings
                .iter()
                .zip(th)
                .map(|(&p, &t)| polar(p, t))
                .collect())
        }
    }
}

fn cast_complex<T: Real>(p: &[Complex<f64>]) -> Vec<Complex<T>> {
    p.iter().map(|z| Complex::new(lit(z.re), lit(z.im))).collect()
}

fn cast<T: Real>(x: &[f64]) -> Vec<T> {
    x.iter().map(|&v| lit(v)).collect()
}

impl ModelSpec {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelSpec::EqualSlope { .. } => ModelKind::EqualSlope,
            ModelSpec::BowTie { .. } => ModelKind::BowTie,
            ModelSpec::GeneralizedBowTie { .. } => ModelKind::GeneralizedBowTie,
            ModelSpec::Su2Spin { .. } => ModelKind::Su2Spin,
            ModelSpec::Oscillator { .. } => ModelKind::Oscillator,
            ModelSpec::LinearChain { .. } => ModelKind::LinearChain,
            ModelSpec::Su11Sector { .. } => ModelKind::Su11Sector,
        }
    }

    /// Build the (real symmetric) pencil. Complex couplings given through
    /// `coupling_phases` are removed with [`degauge`].
    pub fn build<T: Real>(&self) -> Result<MatrixPencil<T>> {
        let (raw, complex) = match self {
            ModelSpec::EqualSlope {
                couplings,
                offsets,
                slope,
                coupling_phases,
            } => (
                build_equal_slope_complex(
                    &cast_complex(&with_phases(couplings, coupling_phases)?),
                    &cast(offsets),
                    lit(*slope),
                )?,
                coupling_phases.is_some(),
            ),
            ModelSpec::BowTie {
                couplings,
                slopes,
                coupling_phases,
            } => (
                build_bowtie_complex(
                    &cast_complex(&with_phases(couplings, coupling_phases)?),
                    &cast(slopes),
                )?,
                coupling_phases.is_some(),
            ),
            ModelSpec::GeneralizedBowTie {
                couplings,
                slopes,
                detuning,
                coupling_phases,
            } => (
                build_generalized_bowtie_complex(
                    &cast_complex(&with_phases(couplings, coupling_phases)?),
                    &cast(slopes),
                    lit(*detuning),
                )?,
                coupling_phases.is_some(),
            ),
            ModelSpec::Su2Spin { coupling, spin } => (build_su2_spin(lit(*coupling), *spin)?, false),
            ModelSpec::Oscillator { coupling, cutoff } => {
                (build_oscillator(lit(*coupling), *cutoff)?, false)
            }
            ModelSpec::LinearChain {
                coupling,
                n_min,
                n_max,
            } => (build_linear_chain(lit(*coupling), *n_min, *n_max)?, false),
            ModelSpec::Su11Sector {
                coupling,
                bargmann_index,
                cutoff,
            } => (build_su11_sector(lit(*coupling), *bargmann_index, *cutoff)?, false),
        };
        if complex {
            Ok(degauge(&raw, self.kind())?.0)
        } else {
            Ok(raw)
        }
    }

    /// Validate parameters without keeping the pencil.
    pub fn validate(&self) -> Result<()> {
        self.build::<f64>().map(|_| ())
    }

    pub fn dim(&self) -> usize {
        match self {
            ModelSpec::EqualSlope { couplings, .. } | ModelSpec::BowTie { couplings, .. } => {
                couplings.len() + 1
            }
            ModelSpec::GeneralizedBowTie { couplings, .. } => couplings.len() + 2,
            ModelSpec::Su2Spin { spin, .. } => (spin.twice() + 1).max(0) as usize,
            ModelSpec::Oscillator { cutoff, .. } | ModelSpec::Su11Sector { cutoff, .. } => cutoff + 1,
            ModelSpec::LinearChain { n_min, n_max, .. } => (n_max - n_min + 1).max(0) as usize,
        }
    }

    /// Physical label of basis state `index`: the 1-based level number for
    /// bordered models, `j - m` for the spin, the Fock number, the chain
    /// site, or `μ - k` for an SU(1,1) sector.
    pub fn label_of(&self, index: usize) -> i64 {
        match self {
            ModelSpec::EqualSlope { .. } | ModelSpec::BowTie { .. } | ModelSpec::GeneralizedBowTie { .. } => {
                index as i64 + 1
            }
            ModelSpec::LinearChain { n_min, .. } => n_min + index as i64,
            _ => index as i64,
        }
    }

    pub fn index_of(&self, label: i64) -> Option<usize> {
        let idx = match self {
            ModelSpec::EqualSlope { .. } | ModelSpec::BowTie { .. } | ModelSpec::GeneralizedBowTie { .. } => {
                label - 1
            }
            ModelSpec::LinearChain { n_min, .. } => label - n_min,
            _ => label,
        };
        (idx >= 0 && (idx as usize) < self.dim()).then_some(idx as usize)
    }

    /// Human-readable basis labels, used as CSV headers.
    pub fn state_names(&self) -> Vec<String> {
        (0..self.dim())
            .map(|i| match self {
                ModelSpec::Su2Spin { spin, .. } => {
                    format!("m={}", HalfInteger::from_twice(spin.twice() - 2 * i as i64))
                }
                ModelSpec::Oscillator { .. } => format!("n={i}"),
                ModelSpec::LinearChain { n_min, .. } => format!("n={}", n_min + i as i64),
                ModelSpec::Su11Sector { bargmann_index, .. } => {
                    format!("mu={}", bargmann_index.value() + i as f64)
                }
                _ => format!("{}", i + 1),
            })
            .collect()
    }

    /// Whether `label` is at least `margin` states away from every
    /// truncation edge.
    pub fn is_interior(&self, label: i64, margin: usize) -> bool {
        let Some(idx) = self.index_of(label) else {
            return false;
        };
        let n = self.dim();
        match self {
            ModelSpec::Oscillator { .. } | ModelSpec::Su11Sector { .. } => idx + margin < n,
            ModelSpec::LinearChain { .. } => idx >= margin && idx + margin < n,
            _ => true,
        }
    }

    /// Same model at a different truncation: the cutoff for oscillator and
    /// SU(1,1) sectors, the symmetric window `[-c, c]` for the chain.
    pub fn with_cutoff(&self, c: usize) -> Result<ModelSpec> {
        let mut out = self.clone();
        match &mut out {
            ModelSpec::Oscillator { cutoff, .. } | ModelSpec::Su11Sector { cutoff, .. } => *cutoff = c,
            ModelSpec::LinearChain { n_min, n_max, .. } => {
                *n_min = -(c as i64);
                *n_max = c as i64;
            }
            _ => {
                return Err(Error::Unsupported(format!(
                    "{:?} has no truncation parameter",
                    self.kind()
                )))
            }
        }
        Ok(out)
    }
}
