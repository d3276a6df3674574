//! Commuting families of the solvable models and numerical checks of
//! commutation, nontriviality and symmetry.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_basis, lstsq, nullspace, realify};
use crate::models::{build_bowtie, build_equal_slope, build_generalized_bowtie};
use crate::pencil::{commutator, frobenius, CMatrix, MatrixPencil};
use crate::scalar::{lit, re, tol, Real};
use crate::spectra::{char_roots, SecularSpec};

/// Parameters of one maximal linear family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams<T> {
    pub gamma: Vec<T>,
    pub xi: Vec<T>,
    /// Constant added to `H_1` to recover the model Hamiltonian.
    pub shift: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyConstruction {
    MaximalLinear,
    BowTieQuadratic,
    GbtMinimal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutingFamily<T: Real> {
    pub members: Vec<MatrixPencil<T>>,
    pub labels: Vec<String>,
    pub construction: FamilyConstruction,
}

impl<T: Real> CommutingFamily<T> {
    /// Largest pairwise [`commutator_norm`] among the members.
    pub fn max_pairwise_commutator(&self, us: &[T]) -> Result<T> {
        let mut worst = T::zero();
        for (i, a) in self.members.iter().enumerate() {
            for b in &self.members[i + 1..] {
                worst = worst.max(commutator_norm(a, b, us)?);
            }
        }
        Ok(worst)
    }
}

pub fn maximal_linear_family<T: Real>(params: &FamilyParams<T>) -> Result<CommutingFamily<T>> {
    let (g, xi) = (&params.gamma, &params.xi);
    let n = g.len();
    if xi.len() != n {
        return Err(Error::LengthMismatch(format!("gamma {n} vs xi {}", xi.len())));
    }
    if n < 2 {
        return Err(Error::TooFewStates { min: 2, got: n });
    }
    if let Some(i) = g.iter().position(|&x| x == T::zero()) {
        return Err(Error::ZeroGamma(i + 1));
    }
    for i in 0..n {
        for j in i + 1..n {
            if xi[i] == xi[j] {
                return Err(Error::DegenerateXi {
                    first: i + 1,
                    second: j + 1,
                });
            }
        }
    }
    let mut members = Vec::with_capacity(n);
    for i in 0..n {
        let mut c0 = CMatrix::zeros(n, n);
        let mut c1 = CMatrix::zeros(n, n);
        c1[(i, i)] = re(T::one());
        let mut diag = T::zero();
        for j in (0..n).filter(|&j| j != i) {
            let d = xi[i] - xi[j];
            let off = re(g[i] * g[j] / d);
            c0[(i, j)] = off;
            c0[(j, i)] = off;
            c0[(j, j)] = re(-g[i] * g[i] / d);
            diag -= g[j] * g[j] / d;
        }
        c0[(i, i)] = re(diag);
        members.push(MatrixPencil::new(vec![c0, c1])?);
    }
    Ok(CommutingFamily {
        members,
        labels: (1..=n).map(|i| format!("H_{i}")).collect(),
        construction: FamilyConstruction::MaximalLinear,
    })
}

/// Equal-slope model (slope 1) written as `H_1 + x·Id` for each root `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualSlopeEmbedding<T: Real> {
    pub roots: Vec<T>,
    pub params: Vec<FamilyParams<T>>,
    /// Largest entrywise mismatch `|H - H_1 - x·Id|` over all roots.
    pub reconstruction_error: T,
}

pub fn embed_equal_slope<T: Real>(p: &[T], a: &[T]) -> Result<EqualSlopeEmbedding<T>> {
    let h = build_equal_slope(p, a, T::one())?;
    let roots = char_roots(&SecularSpec::equal_slope(p, a)?, T::zero())?;
    let n = h.dim();
    let mut params = Vec::with_capacity(roots.len());
    let mut err = T::zero();
    for &x in &roots {
        let mut gamma = vec![T::one()];
        let mut xi = vec![T::zero()];
        for (&pi, &ai) in p.iter().zip(a) {
            gamma.push(pi / (x - ai));
            xi.push(T::one() / (ai - x));
        }
        let fp = FamilyParams { gamma, xi, shift: x };
        let h1 = maximal_linear_family(&fp)?.members.swap_remove(0);
        let shift = MatrixPencil::scalar_poly(n, &[x]);
        err = err.max(h.max_abs_diff(&h1.add(&shift)?)?);
        params.push(fp);
    }
    Ok(EqualSlopeEmbedding {
        roots,
        params,
        reconstruction_error: err,
    })
}

/// Quadratic family `I_1..I_N` of the bow-tie model. All slopes must be
/// nonzero because `I_1` carries `1/r_i` weights.
pub fn bowtie_quadratic_family<T: Real>(p: &[T], r: &[T]) -> Result<CommutingFamily<T>> {
    build_bowtie(p, r)?;
    if let Some(i) = r.iter().position(|&x| x == T::zero()) {
        return Err(Error::ZeroSlopeEntry { index: i + 2 });
    }
    let n = p.len() + 1;
    // Level index 0 is the flat level; index i >= 1 carries p[i-1], r[i-1].
    let pp = |i: usize| p[i - 1];
    let rr = |i: usize| r[i - 1];
    let mut members = Vec::with_capacity(n);

    let mut c2 = CMatrix::zeros(n, n);
    let mut c1 = CMatrix::zeros(n, n);
    let mut c0 = CMatrix::zeros(n, n);
    c2[(0, 0)] = re(T::one());
    let s_total = (1..n).fold(T::zero(), |s, m| s + pp(m) * pp(m) / rr(m));
    for i in 1..n {
        let b = re(-pp(i) / rr(i));
        c1[(0, i)] = b;
        c1[(i, 0)] = b;
        let others = s_total - pp(i) * pp(i) / rr(i);
        c0[(i, i)] = re(-others / rr(i));
        for j in i + 1..n {
            let v = re(pp(i) * pp(j) / (rr(i) * rr(j)));
            c0[(i, j)] = v;
            c0[(j, i)] = v;
        }
    }
    members.push(MatrixPencil::new(vec![c0, c1, c2])?);

    for k in 1..n {
        let mut c2 = CMatrix::zeros(n, n);
        let mut c1 = CMatrix::zeros(n, n);
        let mut c0 = CMatrix::zeros(n, n);
        c2[(k, k)] = re(rr(k));
        c1[(0, k)] = re(pp(k));
        c1[(k, 0)] = re(pp(k));
        for i in (1..n).filter(|&i| i != k) {
            let d = rr(i) - rr(k);
            c0[(i, i)] += re(pp(k) * pp(k) / d);
            c0[(k, k)] += re(pp(i) * pp(i) / d);
            let v = re(-pp(k) * pp(i) / d);
            c0[(k, i)] += v;
            c0[(i, k)] += v;
        }
        members.push(MatrixPencil::new(vec![c0, c1, c2])?);
    }
    Ok(CommutingFamily {
        members,
        labels: (1..=n).map(|i| format!("I_{i}")).collect(),
        construction: FamilyConstruction::BowTieQuadratic,
    })
}

/// Linear commuting partner of the generalized bow-tie Hamiltonian.
pub fn gbt_linear_partner<T: Real>(p: &[T], r: &[T], eps: T) -> Result<MatrixPencil<T>> {
    if eps == T::zero() {
        return Err(Error::ZeroDetuning);
    }
    build_generalized_bowtie(p, r, eps)?;
    let n = p.len() + 2;
    let half: T = lit(0.5);
    let quarter: T = lit(0.25);
    let s = p.iter().zip(r).fold(T::zero(), |acc, (&pi, &ri)| acc + pi * pi / ri) / eps;
    let mut c0 = CMatrix::zeros(n, n);
    let mut c1 = CMatrix::zeros(n, n);
    c0[(0, 0)] = re(eps * half - s);
    c0[(1, 1)] = re(-s);
    c0[(0, 1)] = re(s);
    c0[(1, 0)] = re(s);
    c1[(1, 1)] = re(T::one());
    for (idx, (&pi, &ri)) in p.iter().zip(r).enumerate() {
        let i = idx + 2;
        c1[(i, i)] = re((ri + T::one()) * half);
        c0[(i, i)] = re(eps * quarter * (T::one() - T::one() / ri));
        let w = pi * half / ri;
        let a = re(w * (ri + T::one()));
        let b = re(w * (ri - T::one()));
        c0[(0, i)] = a;
        c0[(i, 0)] = a;
        c0[(1, i)] = b;
        c0[(i, 1)] = b;
    }
    MatrixPencil::new(vec![c0, c1])
}

/// The pair `{H, I}` for the generalized bow-tie model.
pub fn gbt_family<T: Real>(p: &[T], r: &[T], eps: T) -> Result<CommutingFamily<T>> {
    let partner = gbt_linear_partner(p, r, eps)?;
    Ok(CommutingFamily {
        members: vec![build_generalized_bowtie(p, r, eps)?, partner],
        labels: vec!["H".into(), "I".into()],
        construction: FamilyConstruction::GbtMinimal,
    })
}

/// `max_u ‖[A(u), B(u)]‖_F / max(1, ‖A(u)‖_F ‖B(u)‖_F)`.
pub fn commutator_norm<T: Real>(a: &MatrixPencil<T>, b: &MatrixPencil<T>, us: &[T]) -> Result<T> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(us.iter().fold(T::zero(), |worst, &u| {
        let (x, y) = (a.eval(u), b.eval(u));
        let scale = (frobenius(&x) * frobenius(&y)).max(T::one());
        worst.max(frobenius(&commutator(&x, &y)) / scale)
    }))
}

/// Deterministic sample points, uniform in `[lo, hi]`.
pub fn sample_points<T: Real>(count: usize, lo: f64, hi: f64, seed: u64) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| lit(rng.random_range(lo..=hi))).collect()
}

pub const TRIVIALITY_TOL: f64 = 1e-8;
pub const COMMUTATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Trivial,
    Nontrivial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrivialityReport<T> {
    /// Fit error relative to `‖I‖` over the samples.
    pub residual: T,
    /// `c_{k,q}`, the coefficient of `u^q H^k`, ordered by `k` then `q`.
    pub coefficients: Vec<T>,
    pub verdict: Verdict,
}

/// Chebyshev nodes on `[lo, hi]`.
fn chebyshev<T: Real>(count: usize, lo: f64, hi: f64) -> Vec<T> {
    (0..count)
        .map(|i| {
            let x = ((2 * i + 1) as f64 * std::f64::consts::PI / (2 * count) as f64).cos();
            lit(0.5 * (lo + hi) + 0.5 * (hi - lo) * x)
        })
        .collect()
}

/// Best fit `I(u) ≈ Σ_{k≤p} c_k(u) H(u)^k` with `deg c_k ≤ p - k`.
pub fn triviality_residual<T: Real>(i: &MatrixPencil<T>, h: &MatrixPencil<T>) -> Result<TrivialityReport<T>> {
    if i.dim() != h.dim() {
        return Err(Error::DimensionMismatch(i.dim(), h.dim()));
    }
    let p = i.degree();
    let us: Vec<T> = chebyshev(2 * p + 5, -3.0, 3.0);
    let c = commutator_norm(i, h, &us)?;
    if c > tol::<T>(COMMUTATION_TOL, 1e3) {
        return Err(Error::NotACommutingPartner(crate::scalar::to_f64(c)));
    }
    let n = i.dim();
    let terms: Vec<(usize, usize)> = (0..=p).flat_map(|k| (0..=p - k).map(move |q| (k, q))).collect();
    let block = 2 * n * n;
    let mut a = DMatrix::zeros(block * us.len(), terms.len());
    let mut b = DVector::zeros(block * us.len());
    let mut norm2 = T::zero();
    for (s, &u) in us.iter().enumerate() {
        let hu = h.eval(u);
        let mut powers = vec![CMatrix::identity(n, n)];
        for k in 1..=p {
            powers.push(&powers[k - 1] * &hu);
        }
        for (col, &(k, q)) in terms.iter().enumerate() {
            let m = &powers[k] * re(u.powi(q as i32));
            for (row, v) in realify(&m).into_iter().enumerate() {
                a[(s * block + row, col)] = v;
            }
        }
        let iu = i.eval(u);
        norm2 += frobenius(&iu).powi(2);
        for (row, v) in realify(&iu).into_iter().enumerate() {
            b[s * block + row] = v;
        }
    }
    let (x, res) = lstsq(&a, &b);
    let residual = if norm2 > T::zero() {
        (res / norm2.sqrt()).min(T::one())
    } else {
        T::zero()
    };
    let verdict = if residual <= tol::<T>(TRIVIALITY_TOL, 1e3) {
        Verdict::Trivial
    } else {
        Verdict::Nontrivial
    };
    Ok(TrivialityReport {
        residual,
        coefficients: x.iter().copied().collect(),
        verdict,
    })
}

pub const NULLSPACE_CUT: f64 = 1e-9;

/// Dimension of the space of constant Hermitian `Ω` commuting with every
/// coefficient of every pencil.
pub fn shared_symmetry_dim<T: Real>(pencils: &[MatrixPencil<T>]) -> Result<usize> {
    let Some(first) = pencils.first() else {
        return Err(Error::InvalidPencil("no pencils".into()));
    };
    let n = first.dim();
    if let Some(bad) = pencils.iter().find(|p| p.dim() != n) {
        return Err(Error::DimensionMismatch(n, bad.dim()));
    }
    let basis = hermitian_basis::<T>(n);
    let coeffs: Vec<&CMatrix<T>> = pencils.iter().flat_map(|p| p.coeffs()).collect();
    let block = 2 * n * n;
    let mut a = DMatrix::zeros(block * coeffs.len(), basis.len());
    for (col, om) in basis.iter().enumerate() {
        for (ci, c) in coeffs.iter().enumerate() {
            for (row, v) in realify(&commutator(om, c)).into_iter().enumerate() {
                a[(ci * block + row, col)] = v;
            }
        }
    }
    Ok(nullspace(&a, lit(NULLSPACE_CUT)).ncols())
}

/// Basis of all Hermitian pencils of degree ≤ `degree` commuting with `h`
/// identically in `u`.
pub fn commuting_partner_space<T: Real>(h: &MatrixPencil<T>, degree: usize) -> Result<Vec<MatrixPencil<T>>> {
    let n = h.dim();
    let basis = hermitian_basis::<T>(n);
    let nb = basis.len();
    let block = 2 * n * n;
    let orders = degree + h.degree() + 1;
    let mut a = DMatrix::zeros(block * orders, nb * (degree + 1));
    for q in 0..=degree {
        for (bi, om) in basis.iter().enumerate() {
            for (s, c) in h.coeffs().iter().enumerate() {
                for (row, v) in realify(&commutator(om, c)).into_iter().enumerate() {
                    a[((q + s) * block + row, q * nb + bi)] += v;
                }
            }
        }
    }
    let ns = nullspace(&a, lit(NULLSPACE_CUT));
    (0..ns.ncols())
        .map(|col| {
            let coeffs = (0..=degree)
                .map(|q| {
                    basis.iter().enumerate().fold(CMatrix::zeros(n, n), |acc, (bi, om)| {
                        acc + om * re(ns[(q * nb + bi, col)])
                    })
                })
                .collect();
            MatrixPencil::new(coeffs)
        })
        .collect()
}

/// Rank of a set of pencils viewed as vectors of coefficients.
pub fn pencil_span_rank<T: Real>(pencils: &[MatrixPencil<T>]) -> Result<usize> {
    let Some(first) = pencils.first() else {
        return Ok(0);
    };
    let n = first.dim();
    let deg = pencils.iter().map(|p| p.degree()).max().unwrap_or(0);
    let block = 2 * n * n;
    let mut a = DMatrix::zeros(block * (deg + 1), pencils.len());
    for (col, p) in pencils.iter().enumerate() {
        if p.dim() != n {
            return Err(Error::DimensionMismatch(n, p.dim()));
        }
        for (q, c) in p.coeffs().iter().enumerate() {
            for (row, v) in realify(c).into_iter().enumerate() {
                a[(q * block + row, col)] = v;
            }
        }
    }
    Ok(pencils.len() - nullspace(&a, lit(NULLSPACE_CUT)).ncols())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::build_equal_slope;

    fn us() -> Vec<f64> {
        sample_points(20, -5.0, 5.0, 7)
    }

    #[test]
    fn two_level_family() {
        let fam = maximal_linear_family(&FamilyParams {
            gamma: vec![1.0, 1.0],
            xi: vec![0.0, 1.0],
            shift: 0.0,
        })
        .unwrap();
        let h1 = &fam.members[0];
        let h2 = &fam.members[1];
        let c = |m: &CMatrix<f64>| m.map(|z| z.re);
        assert_eq!(c(&h1.eval(0.0)), DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
        assert_eq!(c(&h2.eval(2.0)), DMatrix::from_row_slice(2, 2, &[-1.0, 1.0, 1.0, 1.0]));
        assert_eq!(commutator_norm(h1, h2, &[0.0, 1.0, 2.0]).unwrap(), 0.0);
        let sum = h1.add(h2).unwrap();
        assert!(sum.max_abs_diff(&MatrixPencil::scalar_poly(2, &[0.0, 1.0])).unwrap() < 1e-15);
    }

    #[test]
    fn maximal_family_commutes_and_rescales() {
        let params = FamilyParams {
            gamma: vec![1.0, 0.3, -2.0, 0.7],
            xi: vec![0.0, 1.3, -0.4, 2.2],
            shift: 0.0,
        };
        let fam = maximal_linear_family(&params).unwrap();
        assert!(fam.max_pairwise_commutator(&us()).unwrap() < 1e-12);
        let scaled = FamilyParams {
            gamma: params.gamma.iter().map(|g| 3.0 * g).collect(),
            ..params.clone()
        };
        let fam3 = maximal_linear_family(&scaled).unwrap();
        assert!(fam3.max_pairwise_commutator(&us()).unwrap() < 1e-12);
        let off = fam.members[0].coeff(0)[(0, 1)].re;
        let off3 = fam3.members[0].coeff(0)[(0, 1)].re;
        assert!((off3 - 9.0 * off).abs() < 1e-12);
        let bad = FamilyParams {
            xi: vec![0.0, 1.0, 1.0, 2.0],
            ..params
        };
        assert_eq!(
            maximal_linear_family(&bad),
            Err(Error::DegenerateXi { first: 2, second: 3 })
        );
    }

    #[test]
    fn embedding_two_level() {
        let emb = embed_equal_slope::<f64>(&[1.0], &[0.0]).unwrap();
        assert_eq!(emb.roots.len(), 2);
        assert!((emb.roots[0] + 1.0).abs() < 1e-14 && (emb.roots[1] - 1.0).abs() < 1e-14);
        let fp = &emb.params[1];
        assert!((fp.xi[1] + 1.0).abs() < 1e-14 && (fp.gamma[1] - 1.0).abs() < 1e-14);
        assert!(emb.reconstruction_error < 1e-14);
    }

    #[test]
    fn embedding_reconstructs() {
        let p = [0.4, -1.1, 0.9, 0.2];
        let a = [1.0, -0.5, 2.0, 0.1];
        let emb = embed_equal_slope(&p, &a).unwrap();
        assert_eq!(emb.roots.len(), 5);
        let h = build_equal_slope(&p, &a, 1.0).unwrap();
        assert!(emb.reconstruction_error <= 1e-12 * h.scale());
    }

    fn identities(p: &[f64], r: &[f64]) {
        let h = build_bowtie(p, r).unwrap();
        let fam = bowtie_quadratic_family(p, r).unwrap();
        let n = h.dim();
        let tol = 1e-12 * fam.members.iter().map(|m| m.scale()).fold(1.0, f64::max);
        let mut sum = MatrixPencil::zeros(n, 2);
        let mut weighted = MatrixPencil::zeros(n, 2);
        let mut inverse = fam.members[0].clone();
        for (k, ik) in fam.members.iter().enumerate().skip(1) {
            sum = sum.add(ik).unwrap();
            weighted = weighted.add(&ik.scaled(r[k - 1])).unwrap();
            inverse = inverse.add(&ik.scaled(1.0 / r[k - 1])).unwrap();
        }
        assert!(sum.max_abs_diff(&h.times_u()).unwrap() < tol);
        let p2: f64 = p.iter().map(|x| x * x).sum();
        let h2 = h.mul(&h).unwrap().add(&MatrixPencil::scalar_poly(n, &[-p2])).unwrap();
        assert!(weighted.max_abs_diff(&h2).unwrap() < tol);
        let u2 = MatrixPencil::scalar_poly(n, &[0.0, 0.0, 1.0]);
        assert!(inverse.max_abs_diff(&u2).unwrap() < tol);
    }

    #[test]
    fn bowtie_identities() {
        identities(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]);
        identities(&[0.3, -1.2, 0.8, 2.0], &[-1.5, 0.5, 2.5, -0.2]);
    }

    #[test]
    fn bowtie_family_commutes() {
        let p = [1.0, 1.0, 1.0];
        let r = [1.0, 2.0, 3.0];
        let mut fam = bowtie_quadratic_family(&p, &r).unwrap();
        fam.members.push(build_bowtie(&p, &r).unwrap());
        assert!(fam.max_pairwise_commutator(&[-2.0, -1.0, 0.0, 1.0, 2.0]).unwrap() <= 1e-10);
        assert!(fam.max_pairwise_commutator(&us()).unwrap() <= 1e-10);
    }

    #[test]
    fn bowtie_n3_partners_are_trivial() {
        let p = [0.8, 1.3];
        let r = [1.0, -2.0];
        let h = build_bowtie(&p, &r).unwrap();
        for m in &bowtie_quadratic_family(&p, &r).unwrap().members {
            let rep = triviality_residual(m, &h).unwrap();
            assert!(rep.residual <= 1e-10, "{}", rep.residual);
            assert_eq!(rep.verdict, Verdict::Trivial);
        }
    }

    #[test]
    fn bowtie_n4_partner_is_nontrivial() {
        let p = [1.0, 1.0, 1.0];
        let r = [1.0, 2.0, 3.0];
        let h = build_bowtie(&p, &r).unwrap();
        let fam = bowtie_quadratic_family(&p, &r).unwrap();
        let rep = triviality_residual(&fam.members[1], &h).unwrap();
        assert_eq!(rep.verdict, Verdict::Nontrivial);
    }

    #[test]
    fn exact_trivial_combination() {
        let h = build_bowtie(&[1.0, 0.5, 2.0], &[1.0, -1.0, 0.5]).unwrap();
        let i = h.times_u().add(&MatrixPencil::scalar_poly(4, &[3.0])).unwrap();
        let rep = triviality_residual(&i, &h).unwrap();
        assert!(rep.residual < 1e-12);
        assert_eq!(rep.verdict, Verdict::Trivial);
    }

    #[test]
    fn non_partner_rejected() {
        let h = build_bowtie(&[1.0, 0.5], &[1.0, -1.0]).unwrap();
        let other = build_bowtie(&[0.3, 0.5], &[2.0, -1.0]).unwrap();
        assert!(matches!(
            triviality_residual(&other, &h),
            Err(Error::NotACommutingPartner(_))
        ));
    }

    #[test]
    fn gbt_partner() {
        let (p, r, eps) = ([1.0, 1.0], [1.0, -1.0], 2.0);
        let fam = gbt_family(&p, &r, eps).unwrap();
        assert!(fam.max_pairwise_commutator(&us()).unwrap() <= 1e-10);
        let rep = triviality_residual(&fam.members[1], &fam.members[0]).unwrap();
        assert!(rep.residual > 0.1);
        let combo = fam.members[0]
            .scaled(0.7)
            .add(&fam.members[1].scaled(-1.9))
            .unwrap()
            .add(&MatrixPencil::scalar_poly(4, &[0.4, 2.0]))
            .unwrap();
        assert!(commutator_norm(&combo, &fam.members[0], &us()).unwrap() <= 1e-10);
        assert!(commutator_norm(&combo, &fam.members[1], &us()).unwrap() <= 1e-10);
        assert_eq!(gbt_linear_partner(&p, &r, 0.0), Err(Error::ZeroDetuning));
    }

    #[test]
    fn no_constant_symmetry() {
        let bt = build_bowtie(&[1.0, 0.4, 0.7], &[1.0, 2.0, -1.0]).unwrap();
        assert_eq!(shared_symmetry_dim(&[bt]).unwrap(), 1);
        let gbt = build_generalized_bowtie(&[1.0, 0.4], &[1.0, 2.0], 0.6).unwrap();
        assert_eq!(shared_symmetry_dim(&[gbt]).unwrap(), 1);
        let id = MatrixPencil::<f64>::scalar_poly(3, &[1.0, 1.0]);
        assert_eq!(shared_symmetry_dim(&[id]).unwrap(), 9);
    }

    #[test]
    fn partner_space_dimensions() {
        let bt = build_bowtie(&[1.0, 0.4, 0.7, 1.5], &[1.0, 2.0, -1.0, 0.5]).unwrap();
        assert_eq!(commuting_partner_space(&bt, 1).unwrap().len(), 3);
        assert_eq!(commuting_partner_space(&bt, 2).unwrap().len(), 5 + 3);
        let gbt = build_generalized_bowtie(&[1.0, 0.4], &[1.0, -2.0], 0.6).unwrap();
        assert_eq!(commuting_partner_space(&gbt, 1).unwrap().len(), 4);
    }

    #[test]
    fn family_serializes() {
        let fam = gbt_family(&[1.0], &[2.0], 1.0).unwrap();
        let json = serde_json::to_string(&fam).unwrap();
        let back: CommutingFamily<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, fam);
    }
}
