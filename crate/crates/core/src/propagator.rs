//! Numerical solution of `i dψ/dt = H(t) ψ` for degree-1 pencils and
//! extraction of asymptotic transition probabilities.
//!
//! Amplitudes are integrated in the interaction picture
//! `b_n = exp(i(C0[n,n] t + C1[n,n] t²/2)) ψ_n`, so only the off-diagonal
//! couplings are left in the equations. At the horizon endpoints the state
//! is prepared in, and projected onto, the instantaneous eigenvectors of
//! `H(±T)` labelled by their dominant diabatic component (see
//! [`Projection`]).

use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::hermitian_eigen;
use crate::models::ModelSpec;
use crate::ode::{integrate, Method, OdeOptions, OdeStats, System};
use crate::pencil::{CMatrix, MatrixPencil};
use crate::scalar::{cabs, cis, lit, re, to_f64, Real};

/// How asymptotic states are represented at `t = ±T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Projection {
    /// Eigenvectors of `H(±T)`, each matched to the diabatic state it
    /// overlaps most. Removes the `O(g/T)` dressing of diabatic states.
    Adiabatic,
    /// Bare diabatic basis vectors.
    Diabatic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropagationConfig {
    pub horizon: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub phase_stripping: bool,
    pub max_steps: usize,
    pub projection: Projection,
    pub method: Method,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        Self {
            horizon: 200.0,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            phase_stripping: true,
            max_steps: 50_000_000,
            projection: Projection::Adiabatic,
            method: Method::default(),
        }
    }
}

impl PropagationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::InvalidConfig(format!("horizon {} must be positive", self.horizon)));
        }
        for (name, v) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)] {
            if !(1e-14..=1e-3).contains(&v) {
                return Err(Error::InvalidConfig(format!("{name} = {v:e} outside [1e-14, 1e-3]")));
            }
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be positive".into()));
        }
        Ok(())
    }

    pub fn with_horizon(&self, horizon: f64) -> Self {
        Self {
            horizon,
            ..self.clone()
        }
    }

    fn ode_options<T: Real>(&self) -> Result<OdeOptions<T>> {
        self.validate()?;
        let floor = to_f64(T::default_epsilon()) * 8.0;
        if self.rel_tol < floor {
            return Err(Error::ToleranceUnreachable {
                t: -self.horizon,
                reason: format!("rel_tol {:e} is below the working precision", self.rel_tol),
            });
        }
        Ok(OdeOptions {
            rel_tol: lit(self.rel_tol * LOCAL_TOL_FACTOR),
            abs_tol: lit((self.abs_tol * LOCAL_TOL_FACTOR).max(floor * 1e-2)),
            max_steps: self.max_steps,
            method: self.method,
        })
    }
}

/// Local error tolerances are this fraction of the configured ones, so that
/// the accumulated norm drift over a full sweep stays within `10·rel_tol`.
const LOCAL_TOL_FACTOR: f64 = 0.05;

struct Schrodinger<T: Real> {
    d0: Vec<T>,
    d1: Vec<T>,
    /// `(row, col, C0, C1)` for every entry not absorbed into the phases.
    entries: Vec<(usize, usize, Complex<T>, Complex<T>)>,
    strip: bool,
    /// Common increments when both diagonals are arithmetic progressions,
    /// so the phase factors follow from one complex power recurrence.
    ladder: Option<(T, T)>,
    ph: Vec<Complex<T>>,
    psi: Vec<Complex<T>>,
}

impl<T: Real> Schrodinger<T> {
    fn new(pencil: &MatrixPencil<T>, strip: bool) -> Result<Self> {
        if pencil.degree() != 1 {
            return Err(Error::InvalidPencil(format!(
                "propagation needs a degree-1 pencil, got degree {}",
                pencil.degree()
            )));
        }
        let n = pencil.dim();
        let (c0, c1) = (pencil.coeff(0), pencil.coeff(1));
        let mut entries = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if strip && i == j {
                    continue;
                }
                let (a, b) = (c0[(i, j)], c1[(i, j)]);
                if cabs(a) > T::zero() || cabs(b) > T::zero() {
                    entries.push((i, j, a, b));
                }
            }
        }
        let zero = Complex::new(T::zero(), T::zero());
        let d0: Vec<T> = (0..n).map(|i| c0[(i, i)].re).collect();
        let d1: Vec<T> = (0..n).map(|i| c1[(i, i)].re).collect();
        let ladder = match (arithmetic_step(&d0), arithmetic_step(&d1)) {
            (Some(a), Some(b)) if n > 2 => Some((a, b)),
            _ => None,
        };
        Ok(Self {
            d0,
            d1,
            entries,
            strip,
            ladder,
            ph: vec![re(T::one()); n],
            psi: vec![zero; n],
        })
    }

    fn phase(&self, n: usize, t: T) -> T {
        self.d0[n] * t + self.d1[n] * t * t * lit(0.5)
    }

    /// `b = e^{iφ(t)} ψ` when stripping, identity otherwise.
    fn to_internal(&self, t: T, psi: &[Complex<T>]) -> Vec<Complex<T>> {
        psi.iter()
            .enumerate()
            .map(|(n, &z)| if self.strip { z * cis(self.phase(n, t)) } else { z })
            .collect()
    }

    fn to_physical(&self, t: T, b: &[Complex<T>]) -> Vec<Complex<T>> {
        b.iter()
            .enumerate()
            .map(|(n, &z)| if self.strip { z * cis(-self.phase(n, t)) } else { z })
            .collect()
    }
}

impl<T: Real> System<T> for Schrodinger<T> {
    fn rhs(&mut self, t: T, y: &[Complex<T>], dy: &mut [Complex<T>]) {
        let zero = Complex::new(T::zero(), T::zero());
        if self.strip {
            if let Some((s0, s1)) = self.ladder {
                let w = cis(s0 * t + s1 * t * t * lit(0.5));
                self.ph[0] = cis(self.phase(0, t));
                for n in 1..y.len() {
                    self.ph[n] = self.ph[n - 1] * w;
                }
            } else {
                for n in 0..y.len() {
                    self.ph[n] = cis(self.phase(n, t));
                }
            }
            for n in 0..y.len() {
                self.psi[n] = y[n] * self.ph[n].conj();
            }
        } else {
            self.psi.copy_from_slice(y);
        }
        dy.iter_mut().for_each(|d| *d = zero);
        let tc = re(t);
        for &(i, j, a, b) in &self.entries {
            dy[i] += (a + b * tc) * self.psi[j];
        }
        let minus_i = Complex::new(T::zero(), -T::one());
        if self.strip {
            for n in 0..y.len() {
                dy[n] = dy[n] * self.ph[n] * minus_i;
            }
        } else {
            dy.iter_mut().for_each(|d| *d = *d * minus_i);
        }
    }
}

fn arithmetic_step<T: Real>(d: &[T]) -> Option<T> {
    if d.len() < 2 {
        return None;
    }
    let step = d[1] - d[0];
    let eps = T::default_epsilon() * lit(4.0);
    d.iter().enumerate().all(|(n, &x)| {
        let expected = d[0] + step * crate::scalar::from_int::<T>(n as i64);
        (x - expected).abs() <= eps * x.abs().max(T::one())
    })
    .then_some(step)
}

/// Result of a single propagation.
#[derive(Debug, Clone)]
pub struct Trajectory<T: Real> {
    pub psi: Vec<Complex<T>>,
    /// Largest `|‖ψ(t)‖ - 1|` over the accepted steps.
    pub max_norm_defect: T,
    pub stats: OdeStats,
}

fn norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt()
}

/// Propagate `ψ0` from `t0` to `t1`.
pub fn propagate<T: Real>(
    pencil: &MatrixPencil<T>,
    psi0: &[Complex<T>],
    t0: T,
    t1: T,
    cfg: &PropagationConfig,
) -> Result<Vec<Complex<T>>> {
    propagate_traced(pencil, psi0, t0, t1, cfg).map(|tr| tr.psi)
}

pub fn propagate_traced<T: Real>(
    pencil: &MatrixPencil<T>,
    psi0: &[Complex<T>],
    t0: T,
    t1: T,
    cfg: &PropagationConfig,
) -> Result<Trajectory<T>> {
    let opts = cfg.ode_options::<T>()?;
    if psi0.len() != pencil.dim() {
        return Err(Error::DimensionMismatch(psi0.len(), pencil.dim()));
    }
    let n0 = norm(psi0);
    if (n0 - T::one()).abs() > lit(1e-8) {
        return Err(Error::InvalidConfig(format!(
            "initial state has norm {}, expected 1",
            to_f64(n0)
        )));
    }
    let mut sys = Schrodinger::new(pencil, cfg.phase_stripping)?;
    let mut y = sys.to_internal(t0, psi0);
    let mut worst = T::zero();
    let stats = integrate(&mut sys, t0, t1, &mut y, &opts, |_, state| {
        let d = (norm(state) - T::one()).abs();
        if d > worst {
            worst = d;
        }
    })?;
    Ok(Trajectory {
        psi: sys.to_physical(t1, &y),
        max_norm_defect: worst,
        stats,
    })
}

/// Asymptotic states at time `t` as columns, column `j` labelled by diabatic
/// state `j`. Falls back to the diabatic basis if any eigenvector has less
/// than half its weight on its label.
pub fn asymptotic_basis<T: Real>(
    pencil: &MatrixPencil<T>,
    t: T,
    projection: Projection,
) -> (CMatrix<T>, Projection) {
    let n = pencil.dim();
    if projection == Projection::Diabatic {
        return (CMatrix::identity(n, n), Projection::Diabatic);
    }
    let (_, vecs) = hermitian_eigen(&pencil.eval(t));
    let mut weights: Vec<(T, usize, usize)> = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            weights.push((vecs[(r, c)].norm_sqr(), r, c));
        }
    }
    weights.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut label_of_col = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    let mut assigned = 0;
    for &(w, r, c) in &weights {
        if assigned == n {
            break;
        }
        if label_of_col[c] != usize::MAX || taken[r] {
            continue;
        }
        if w <= lit(0.5) {
            return (CMatrix::identity(n, n), Projection::Diabatic);
        }
        label_of_col[c] = r;
        taken[r] = true;
        assigned += 1;
    }
    let mut basis = CMatrix::zeros(n, n);
    for c in 0..n {
        basis.set_column(label_of_col[c], &vecs.column(c));
    }
    (basis, Projection::Adiabatic)
}

/// Transition probabilities `P[i][j]` of ending in state `j` having started
/// in state `i`, with unitarity diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix<T: Real> {
    pub p: DMatrix<T>,
    /// Initial state of each row.
    pub initial: Vec<usize>,
    pub row_defect: T,
    /// Only meaningful when every row was propagated.
    pub col_defect: T,
    pub max_norm_defect: T,
    pub projection: Projection,
}

impl<T: Real> TransitionMatrix<T> {
    pub fn rows_f64(&self) -> Vec<Vec<f64>> {
        self.p
            .row_iter()
            .map(|r| r.iter().map(|&x| to_f64(x)).collect())
            .collect()
    }

    /// Probability from state `i` to state `j` if row `i` was propagated.
    pub fn get(&self, i: usize, j: usize) -> Option<T> {
        self.initial.iter().position(|&k| k == i).map(|r| self.p[(r, j)])
    }

    pub fn is_full(&self) -> bool {
        self.initial.len() == self.p.ncols() && self.initial.iter().enumerate().all(|(a, &b)| a == b)
    }
}

/// Propagate every basis state from `-T` to `T`.
pub fn transition_matrix<T: Real>(
    pencil: &MatrixPencil<T>,
    cfg: &PropagationConfig,
) -> Result<TransitionMatrix<T>> {
    let all: Vec<usize> = (0..pencil.dim()).collect();
    transition_rows(pencil, &all, cfg)
}

/// Propagate only the listed initial states. Rows run in parallel and are
/// returned in the order given.
pub fn transition_rows<T: Real>(
    pencil: &MatrixPencil<T>,
    initial: &[usize],
    cfg: &PropagationConfig,
) -> Result<TransitionMatrix<T>> {
    cfg.validate()?;
    let n = pencil.dim();
    if let Some(&bad) = initial.iter().find(|&&i| i >= n) {
        return Err(Error::DimensionMismatch(bad, n));
    }
    let horizon: T = lit(cfg.horizon);
    let (start, p_start) = asymptotic_basis(pencil, -horizon, cfg.projection);
    let (end, p_end) = asymptotic_basis(pencil, horizon, cfg.projection);
    let projection = if p_start == Projection::Adiabatic && p_end == Projection::Adiabatic {
        Projection::Adiabatic
    } else {
        Projection::Diabatic
    };
    let (start, end) = if projection == Projection::Diabatic {
        (CMatrix::identity(n, n), CMatrix::identity(n, n))
    } else {
        (start, end)
    };
    let end_adj = end.adjoint();
    let rows: Vec<Result<(Vec<T>, T)>> = initial
        .par_iter()
        .map(|&i| {
            let psi0: Vec<Complex<T>> = start.column(i).iter().copied().collect();
            let tr = propagate_traced(pencil, &psi0, -horizon, horizon, cfg)?;
            let amp = &end_adj * nalgebra::DVector::from_vec(tr.psi);
            Ok((amp.iter().map(|z| z.norm_sqr()).collect(), tr.max_norm_defect))
        })
        .collect();
    let mut p = DMatrix::zeros(initial.len(), n);
    let mut max_norm_defect = T::zero();
    for (r, row) in rows.into_iter().enumerate() {
        let (vals, d) = row?;
        for (j, v) in vals.into_iter().enumerate() {
            p[(r, j)] = v;
        }
        max_norm_defect = max_norm_defect.max(d);
    }
    let row_defect = p
        .row_iter()
        .map(|r| (r.sum() - T::one()).abs())
        .fold(T::zero(), |a, b| a.max(b));
    let full = initial.len() == n && initial.iter().enumerate().all(|(a, &b)| a == b);
    let col_defect = if full {
        p.column_iter()
            .map(|c| (c.sum() - T::one()).abs())
            .fold(T::zero(), |a, b| a.max(b))
    } else {
        T::zero()
    };
    Ok(TransitionMatrix {
        p,
        initial: initial.to_vec(),
        row_defect,
        col_defect,
        max_norm_defect,
        projection,
    })
}

/// Transition matrices at several horizons and their extrapolation to
/// `T → ∞`.
#[derive(Debug, Clone)]
pub struct Extrapolation<T: Real> {
    pub horizons: Vec<f64>,
    pub matrices: Vec<TransitionMatrix<T>>,
    pub extrapolated: DMatrix<T>,
    /// `max |P(T_max) - P_extrapolated|`.
    pub tail_estimate: T,
    /// `max |P(T_{k+1}) - P(T_k)|` for consecutive horizons.
    pub differences: Vec<T>,
}

/// Fit every entry to `P∞ + c/T` by least squares over the horizons.
pub fn horizon_extrapolation<T: Real>(
    pencil: &MatrixPencil<T>,
    cfg: &PropagationConfig,
    horizons: &[f64],
) -> Result<Extrapolation<T>> {
    if horizons.len() < 3 || horizons.windows(2).any(|w| w[1] <= w[0]) || horizons[0] <= 0.0 {
        return Err(Error::InvalidConfig(
            "need at least three increasing positive horizons".into(),
        ));
    }
    let matrices = horizons
        .iter()
        .map(|&h| transition_matrix(pencil, &cfg.with_horizon(h)))
        .collect::<Result<Vec<_>>>()?;
    let (r, c) = matrices[0].p.shape();
    let xs: Vec<T> = horizons.iter().map(|&h| lit::<T>(1.0 / h)).collect();
    let m = lit::<T>(xs.len() as f64);
    let xbar = xs.iter().fold(T::zero(), |a, &x| a + x) / m;
    let sxx = xs.iter().fold(T::zero(), |a, &x| a + (x - xbar) * (x - xbar));
    let mut extrapolated = DMatrix::zeros(r, c);
    for i in 0..r {
        for j in 0..c {
            let ys: Vec<T> = matrices.iter().map(|tm| tm.p[(i, j)]).collect();
            let ybar = ys.iter().fold(T::zero(), |a, &y| a + y) / m;
            let sxy = xs
                .iter()
                .zip(&ys)
                .fold(T::zero(), |a, (&x, &y)| a + (x - xbar) * (y - ybar));
            let slope = sxy / sxx;
            let v = ybar - slope * xbar;
            extrapolated[(i, j)] = v.max(T::zero()).min(T::one());
        }
    }
    let last = &matrices[matrices.len() - 1].p;
    let tail_estimate = (last - &extrapolated).abs().max();
    let differences: Vec<T> = matrices
        .windows(2)
        .map(|w| (&w[1].p - &w[0].p).abs().max())
        .collect();
    let floor = lit::<T>((cfg.rel_tol * 1e4).max(1e-8));
    let first = differences[0];
    let lastd = differences[differences.len() - 1];
    if lastd > first && lastd > floor {
        return Err(Error::NonConvergentTail(differences.iter().map(|&d| to_f64(d)).collect()));
    }
    Ok(Extrapolation {
        horizons: horizons.to_vec(),
        matrices,
        extrapolated,
        tail_estimate,
        differences,
    })
}

/// Probe values of `P[i][j]` (physical labels) across truncations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub cutoffs: Vec<usize>,
    pub probes: Vec<(i64, i64)>,
    /// `values[c][k]`: probe `k` at cutoff `c`.
    pub values: Vec<Vec<f64>>,
    /// Largest probe change between consecutive cutoffs.
    pub differences: Vec<f64>,
    pub converged: bool,
}

pub const CONVERGENCE_TOL: f64 = 1e-4;

/// Recompute probe probabilities for increasing truncations of `spec`.
pub fn cutoff_convergence(
    spec: &ModelSpec,
    cutoffs: &[usize],
    probes: &[(i64, i64)],
    cfg: &PropagationConfig,
) -> Result<ConvergenceTable> {
    if cutoffs.len() < 3 || cutoffs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig("need at least three increasing cutoffs".into()));
    }
    if probes.is_empty() {
        return Err(Error::InvalidConfig("no probe entries".into()));
    }
    let smallest = spec.with_cutoff(cutoffs[0])?;
    for &(i, j) in probes {
        for label in [i, j] {
            if !smallest.is_interior(label, 2) {
                return Err(Error::ProbeOutsideCutoff(label));
            }
        }
    }
    let mut starts: Vec<i64> = probes.iter().map(|p| p.0).collect();
    starts.sort_unstable();
    starts.dedup();
    let mut values = Vec::with_capacity(cutoffs.len());
    for &c in cutoffs {
        let model = spec.with_cutoff(c)?;
        let pencil: MatrixPencil<f64> = model.build()?;
        let rows: Vec<usize> = starts.iter().map(|&l| model.index_of(l).expect("interior")).collect();
        let tm = transition_rows(&pencil, &rows, cfg)?;
        values.push(
            probes
                .iter()
                .map(|&(i, j)| {
                    let (ii, jj) = (model.index_of(i).expect("interior"), model.index_of(j).expect("interior"));
                    tm.get(ii, jj).expect("row propagated")
                })
                .collect::<Vec<f64>>(),
        );
    }
    let differences: Vec<f64> = values
        .windows(2)
        .map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        .collect();
    let converged = *differences.last().expect("two or more cutoffs") <= CONVERGENCE_TOL;
    Ok(ConvergenceTable {
        cutoffs: cutoffs.to_vec(),
        probes: probes.to_vec(),
        values,
        differences,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_bowtie, build_su2_spin, HalfInteger};

    fn lz(g: f64) -> MatrixPencil<f64> {
        build_su2_spin(g, HalfInteger::from_twice(1)).unwrap()
    }

    #[test]
    fn decoupled_levels_stay_put() {
        let h = lz(0.0);
        let psi0 = [re(1.0), re(0.0)];
        let psi = propagate(&h, &psi0, -50.0, 50.0, &PropagationConfig::default()).unwrap();
        assert!((psi[0].norm_sqr() - 1.0).abs() < 1e-12);
        assert!(psi[1].norm() < 1e-12);
    }

    #[test]
    fn landau_zener_survival() {
        let cfg = PropagationConfig::default();
        let tm = transition_matrix(&lz(1.0), &cfg).unwrap();
        let q = (-std::f64::consts::PI / 2.0).exp();
        assert!((tm.p[(0, 0)] - q).abs() < 1e-3);
        assert!((tm.p[(0, 1)] - tm.p[(1, 0)]).abs() < 1e-9);
        assert!(tm.row_defect < 1e-6 && tm.col_defect < 1e-6);
        assert!(tm.max_norm_defect < 10.0 * cfg.rel_tol);
        assert_eq!(tm.projection, Projection::Adiabatic);
    }

    #[test]
    fn stripping_matches_plain_integration() {
        let h = lz(0.8);
        let base = PropagationConfig {
            horizon: 8.0,
            ..Default::default()
        };
        let plain = PropagationConfig {
            phase_stripping: false,
            ..base.clone()
        };
        let a = transition_matrix(&h, &base).unwrap();
        let b = transition_matrix(&h, &plain).unwrap();
        assert!((a.p - b.p).abs().max() < 1e-8);
    }

    #[test]
    fn diabatic_projection_is_coarser() {
        let h = lz(1.0);
        let q = (-std::f64::consts::PI / 2.0).exp();
        let cfg = PropagationConfig {
            horizon: 40.0,
            ..Default::default()
        };
        let dia = PropagationConfig {
            projection: Projection::Diabatic,
            ..cfg.clone()
        };
        let ea = (transition_matrix(&h, &cfg).unwrap().p[(0, 0)] - q).abs();
        let ed = (transition_matrix(&h, &dia).unwrap().p[(0, 0)] - q).abs();
        assert!(ea < 1e-4);
        assert!(ed > ea);
    }

    #[test]
    fn config_validation() {
        let mut cfg = PropagationConfig::default();
        cfg.rel_tol = 1e-2;
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));
        cfg.rel_tol = 1e-10;
        cfg.horizon = -1.0;
        assert!(cfg.validate().is_err());
        let single = build_su2_spin(1.0_f32, HalfInteger::from_twice(1)).unwrap();
        assert!(matches!(
            transition_matrix(&single, &PropagationConfig::default()),
            Err(Error::ToleranceUnreachable { .. })
        ));
    }

    #[test]
    fn single_precision_propagation() {
        let h = build_su2_spin(1.0_f32, HalfInteger::from_twice(1)).unwrap();
        let cfg = PropagationConfig {
            horizon: 40.0,
            rel_tol: 1e-5,
            abs_tol: 1e-7,
            ..Default::default()
        };
        let tm = transition_matrix(&h, &cfg).unwrap();
        let q = (-std::f32::consts::PI / 2.0).exp();
        assert!((tm.p[(0, 0)] - q).abs() < 2e-3);
    }

    #[test]
    fn step_limit_is_reported() {
        let cfg = PropagationConfig {
            max_steps: 10,
            ..Default::default()
        };
        assert!(matches!(
            transition_matrix(&lz(1.0), &cfg),
            Err(Error::StepLimitExceeded(10))
        ));
    }

    #[test]
    fn bowtie_is_doubly_stochastic() {
        let h = build_bowtie(&[0.4, 0.3, 0.5], &[1.0, -1.0, 2.0]).unwrap();
        let cfg = PropagationConfig {
            horizon: 60.0,
            ..Default::default()
        };
        let tm = transition_matrix(&h, &cfg).unwrap();
        assert!(tm.is_full());
        assert!(tm.row_defect < 1e-6 && tm.col_defect < 1e-6);
        assert!(tm.p.iter().all(|&x| (0.0..=1.0 + 1e-9).contains(&x)));
    }

    #[test]
    fn extrapolation_requires_three_horizons() {
        assert!(horizon_extrapolation(&lz(1.0), &PropagationConfig::default(), &[50.0, 100.0]).is_err());
    }

    #[test]
    fn diagonal_pencil_has_zero_tail() {
        let h = lz(0.0);
        let ex = horizon_extrapolation(&h, &PropagationConfig::default(), &[10.0, 20.0, 40.0]).unwrap();
        assert!(ex.tail_estimate < 1e-12);
        assert!((ex.extrapolated[(0, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn probe_outside_cutoff() {
        let spec = ModelSpec::Oscillator {
            coupling: 0.4,
            cutoff: 10,
        };
        assert_eq!(
            cutoff_convergence(&spec, &[5, 10, 15], &[(0, 4)], &PropagationConfig::default()),
            Err(Error::ProbeOutsideCutoff(4))
        );
    }

    #[test]
    fn free_oscillator_converges_to_identity() {
        let spec = ModelSpec::Oscillator {
            coupling: 0.0,
            cutoff: 8,
        };
        let cfg = PropagationConfig {
            horizon: 20.0,
            ..Default::default()
        };
        let table = cutoff_convergence(&spec, &[6, 8, 10], &[(0, 0), (1, 2)], &cfg).unwrap();
        assert!(table.converged);
        for row in &table.values {
            assert!((row[0] - 1.0).abs() < 1e-12 && row[1].abs() < 1e-12);
        }
    }
}
