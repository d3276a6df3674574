//! Hermitian matrix pencils `H(u) = Σ_q u^q C_q`.

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{cabs, lit, re, to_f64, tol, Real};

/// Dense complex matrix.
pub type CMatrix<T> = DMatrix<Complex<T>>;

/// Matrix polynomial in a real parameter with Hermitian coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPencil<T: Real> {
    coeffs: Vec<CMatrix<T>>,
}

/// Frobenius norm of a complex matrix.
pub fn frobenius<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

/// `max |M - M^†|` entrywise.
pub fn hermitian_defect<T: Real>(m: &CMatrix<T>) -> T {
    let n = m.nrows();
    let mut worst = T::zero();
    for i in 0..n {
        for j in 0..n {
            let d = cabs(m[(i, j)] - m[(j, i)].conj());
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// `AB - BA`.
pub fn commutator<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a * b - b * a
}

/// Embed a real matrix into a complex one.
pub fn complexify<T: Real>(m: &DMatrix<T>) -> CMatrix<T> {
    m.map(re)
}

impl<T: Real> MatrixPencil<T> {
    /// Build a pencil from its coefficient list `C_0..C_degree`.
    ///
    /// Every coefficient must be square, of the same size, and Hermitian
    /// within `1e-13 · ‖C_q‖` (floored at a few ulps for single precision).
    pub fn new(coeffs: Vec<CMatrix<T>>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidPencil("no coefficients".into()));
        }
        let n = coeffs[0].nrows();
        if n == 0 {
            return Err(Error::InvalidPencil("empty matrices".into()));
        }
        for (q, c) in coeffs.iter().enumerate() {
            if c.nrows() != n || c.ncols() != n {
                return Err(Error::InvalidPencil(format!(
                    "coefficient {q} is {}x{}, expected {n}x{n}",
                    c.nrows(),
                    c.ncols()
                )));
            }
            if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::InvalidPencil(format!("coefficient {q} is not finite")));
            }
            let defect = hermitian_defect(c);
            let scale = frobenius(c);
            if defect > tol::<T>(1e-13, 64.0) * scale {
                return Err(Error::NotHermitian {
                    degree: q,
                    defect: to_f64(defect),
                });
            }
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: Vec<DMatrix<T>>) -> Result<Self> {
        Self::new(coeffs.iter().map(complexify).collect())
    }

    /// The zero pencil of the given size and degree.
    pub fn zeros(dim: usize, degree: usize) -> Self {
        Self {
            coeffs: vec![CMatrix::zeros(dim, dim); degree + 1],
        }
    }

    /// `(Σ_q poly[q] u^q) · Id`.
    pub fn scalar_poly(dim: usize, poly: &[T]) -> Self {
        let coeffs = if poly.is_empty() {
            vec![CMatrix::zeros(dim, dim)]
        } else {
            poly.iter()
                .map(|&a| CMatrix::from_diagonal_element(dim, dim, re(a)))
                .collect()
        };
        Self { coeffs }
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].nrows()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, q: usize) -> &CMatrix<T> {
        &self.coeffs[q]
    }

    pub fn coeffs(&self) -> &[CMatrix<T>] {
        &self.coeffs
    }

    /// `H(u)` by Horner's rule.
    pub fn eval(&self, u: T) -> CMatrix<T> {
        let uc = re(u);
        let mut acc = self.coeffs[self.degree()].clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc * uc + c;
        }
        acc
    }

    /// Largest Frobenius norm among the coefficients.
    pub fn scale(&self) -> T {
        self.coeffs
            .iter()
            .map(frobenius)
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    /// Largest imaginary part of any coefficient entry.
    pub fn max_imag(&self) -> T {
        self.coeffs
            .iter()
            .flat_map(|c| c.iter())
            .fold(T::zero(), |a, z| if z.im.abs() > a { z.im.abs() } else { a })
    }

    pub fn scaled(&self, s: T) -> Self {
        let sc = re(s);
        Self {
            coeffs: self.coeffs.iter().map(|c| c * sc).collect(),
        }
    }

    /// `u · H(u)`.
    pub fn times_u(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(CMatrix::zeros(self.dim(), self.dim()));
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    /// Sum of two pencils of equal size; the degree is the larger one.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        let n = self.dim();
        let deg = self.degree().max(other.degree());
        let coeffs = (0..=deg)
            .map(|q| {
                let mut c = CMatrix::zeros(n, n);
                if let Some(a) = self.coeffs.get(q) {
                    c += a;
                }
                if let Some(b) = other.coeffs.get(q) {
                    c += b;
                }
                c
            })
            .collect();
        Ok(Self { coeffs })
    }

    /// Product pencil `A(u) B(u)` (not Hermitian in general; used for
    /// powers of a single pencil, which are).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        let n = self.dim();
        let mut coeffs = vec![CMatrix::zeros(n, n); self.degree() + other.degree() + 1];
        for (p, a) in self.coeffs.iter().enumerate() {
            for (q, b) in other.coeffs.iter().enumerate() {
                coeffs[p + q] += a * b;
            }
        }
        Ok(Self { coeffs })
    }

    /// Drop imaginary parts once they are known to vanish.
    pub fn into_real_part(self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .into_iter()
                .map(|c| c.map(|z| re(z.re)))
                .collect(),
        }
    }

    /// Whether the pencil is real symmetric within `eps · scale`.
    pub fn is_real(&self, eps: T) -> bool {
        self.max_imag() <= eps * self.scale().max(T::one())
    }

    /// Maximum entrywise difference to another pencil of the same size.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        let diff = self.add(&other.scaled(lit(-1.0)))?;
        Ok(diff
            .coeffs
            .iter()
            .flat_map(|c| c.iter())
            .fold(T::zero(), |a, z| if cabs(*z) > a { cabs(*z) } else { a }))
    }
}

#[derive(Serialize, Deserialize)]
struct PencilRepr {
    degree: usize,
    dim: usize,
    /// `coeffs[q][row][col] = [re, im]`
    coeffs: Vec<Vec<Vec<[f64; 2]>>>,
}

impl<T: Real> Serialize for MatrixPencil<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.dim();
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| [to_f64(c[(i, j)].re), to_f64(c[(i, j)].im)])
                            .collect()
                    })
                    .collect()
            })
            .collect();
        PencilRepr {
            degree: self.degree(),
            dim: n,
            coeffs,
        }
        .serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for MatrixPencil<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = PencilRepr::deserialize(d)?;
        if repr.coeffs.len() != repr.degree + 1 {
            return Err(D::Error::custom("coefficient count does not match degree"));
        }
        let n = repr.dim;
        let mut coeffs = Vec::with_capacity(repr.coeffs.len());
        for c in &repr.coeffs {
            if c.len() != n || c.iter().any(|row| row.len() != n) {
                return Err(D::Error::custom("coefficient shape does not match dim"));
            }
            coeffs.push(CMatrix::from_fn(n, n, |i, j| {
                Complex::new(lit(c[i][j][0]), lit(c[i][j][1]))
            }));
        }
        MatrixPencil::new(coeffs).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> MatrixPencil<f64> {
        let c0 = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let c1 = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        MatrixPencil::from_real(vec![c0, c1]).unwrap()
    }

    #[test]
    fn eval_is_horner() {
        let h = sample();
        let m = h.eval(2.0);
        assert_eq!(m[(0, 0)].re, 2.0);
        assert_eq!(m[(0, 1)].re, 1.0);
        assert_eq!(m[(1, 1)].re, -2.0);
    }

    #[test]
    fn rejects_non_hermitian() {
        let c0 = CMatrix::<f64>::from_row_slice(
            2,
            2,
            &[re(0.0), Complex::new(1.0, 1.0), Complex::new(1.0, 1.0), re(0.0)],
        );
        assert!(matches!(
            MatrixPencil::new(vec![c0]),
            Err(Error::NotHermitian { degree: 0, .. })
        ));
    }

    #[test]
    fn rejects_shape_mismatch() {
        let a = CMatrix::<f64>::zeros(2, 2);
        let b = CMatrix::<f64>::zeros(3, 3);
        assert!(MatrixPencil::new(vec![a, b]).is_err());
    }

    #[test]
    fn square_of_pencil_has_double_degree() {
        let h = sample();
        let h2 = h.mul(&h).unwrap();
        assert_eq!(h2.degree(), 2);
        let direct = h.eval(0.3) * h.eval(0.3);
        assert!(frobenius(&(h2.eval(0.3) - direct)) < 1e-14);
    }

    #[test]
    fn json_round_trip() {
        let h = sample();
        let s = serde_json::to_string(&h).unwrap();
        let back: MatrixPencil<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(h, back);
    }
}
