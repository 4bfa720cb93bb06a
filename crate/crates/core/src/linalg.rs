//! Dense complex matrices and the Hermitian spectral kernel used by every
//! positivity test in the crate.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Numerical thresholds shared by all positivity and symmetry checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Eigenvalues at or above `-eig_zero` count as nonnegative.
    pub eig_zero: f64,
    /// Largest admissible entry of `|M - M†|` for a matrix to count as Hermitian.
    pub herm_sym: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { eig_zero: 1e-9, herm_sym: 1e-9 }
    }
}

/// Which tensor factor of a bipartite space an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Factor {
    First,
    Second,
}

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Matrix unit `E_ij` of size `n`: a single one at row `i`, column `j` (0-indexed).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = ONE;
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, re: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, re.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::DimensionMismatch(format!(
                "expected a square matrix, got {}x{}",
                self.rows, self.cols
            )))
        }
    }

    pub fn require_dim(&self, n: usize) -> Result<()> {
        if self.rows == n && self.cols == n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "expected {n}x{n}, got {}x{}",
                self.rows, self.cols
            )))
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Hilbert–Schmidt inner product `tr(self† other)`.
    pub fn inner(&self, other: &Self) -> C64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in inner product");
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry of `|M - M†|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn require_hermitian(&self, tol: &Tolerance) -> Result<usize> {
        let n = self.require_square()?;
        let defect = self.hermitian_defect();
        if defect > tol.herm_sym || defect.is_nan() {
            return Err(Error::NotHermitian { defect, tol: tol.herm_sym });
        }
        Ok(n)
    }

    /// Largest entry-wise distance to another matrix of the same shape.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Principal-block view: block `(i, j)` of size `d x d` in a matrix of `d x d` blocks.
    pub fn block(&self, i: usize, j: usize, d: usize) -> Self {
        Self::from_fn(d, d, |r, c| self[(i * d + r, j * d + c)])
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

fn zip_with(a: &ComplexMatrix, b: &ComplexMatrix, f: impl Fn(C64, C64) -> C64) -> ComplexMatrix {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols), "shape mismatch in elementwise operation");
    ComplexMatrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(&x, &y)| f(x, y)).collect(),
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

/// Panics on incompatible shapes; use [`ComplexMatrix::matmul`] for a checked product.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("incompatible shapes in matrix product")
    }
}

impl Mul<C64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, s: C64) -> ComplexMatrix {
        self.scale(s)
    }
}

/// Wire format: `{"rows", "cols", "re": [...], "im": [...]}`, row-major.
#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            re: self.data.iter().map(|z| z.re).collect(),
            im: self.data.iter().map(|z| z.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = MatrixJson::deserialize(d)?;
        if w.re.len() != w.im.len() {
            return Err(serde::de::Error::custom(format!(
                "\"re\" has {} entries but \"im\" has {}",
                w.re.len(),
                w.im.len()
            )));
        }
        let data = w.re.iter().zip(&w.im).map(|(&r, &i)| C64::new(r, i)).collect();
        ComplexMatrix::from_vec(w.rows, w.cols, data).map_err(serde::de::Error::custom)
    }
}

/// Kronecker product `A ⊗ B`; entry `(i·p + k, j·q + l)` equals `A_ij B_kl`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (p, q) = (b.rows, b.cols);
    let mut out = ComplexMatrix::zeros(a.rows * p, a.cols * q);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let s = a[(i, j)];
            if s == ZERO {
                continue;
            }
            for k in 0..p {
                for l in 0..q {
                    out[(i * p + k, j * q + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

fn check_bipartite(m: &ComplexMatrix, (d1, d2): (usize, usize)) -> Result<()> {
    let n = m.require_square()?;
    if d1 * d2 != n {
        return Err(Error::DimensionMismatch(format!(
            "factor dimensions {d1}x{d2} do not match matrix size {n}"
        )));
    }
    Ok(())
}

/// Transposes the indices of one tensor factor of `M` on `C^d1 ⊗ C^d2`.
pub fn partial_transpose(m: &ComplexMatrix, dims: (usize, usize), side: Factor) -> Result<ComplexMatrix> {
    check_bipartite(m, dims)?;
    let (d1, d2) = dims;
    let mut out = ComplexMatrix::zeros(d1 * d2, d1 * d2);
    for i in 0..d1 {
        for j in 0..d1 {
            for k in 0..d2 {
                for l in 0..d2 {
                    let v = m[(i * d2 + k, j * d2 + l)];
                    let (r, c) = match side {
                        Factor::First => (j * d2 + k, i * d2 + l),
                        Factor::Second => (i * d2 + l, j * d2 + k),
                    };
                    out[(r, c)] = v;
                }
            }
        }
    }
    Ok(out)
}

/// Traces out one tensor factor of `M` on `C^d1 ⊗ C^d2`.
pub fn partial_trace(m: &ComplexMatrix, dims: (usize, usize), side: Factor) -> Result<ComplexMatrix> {
    check_bipartite(m, dims)?;
    let (d1, d2) = dims;
    Ok(match side {
        Factor::First => ComplexMatrix::from_fn(d2, d2, |k, l| (0..d1).map(|i| m[(i * d2 + k, i * d2 + l)]).sum()),
        Factor::Second => ComplexMatrix::from_fn(d1, d1, |i, j| (0..d2).map(|k| m[(i * d2 + k, j * d2 + k)]).sum()),
    })
}

fn hermitian_part(m: &ComplexMatrix) -> DMatrix<C64> {
    let a = m.to_nalgebra();
    (&a + a.adjoint()) * C64::new(0.5, 0.0)
}

/// All eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix, tol: &Tolerance) -> Result<Vec<f64>> {
    m.require_hermitian(tol)?;
    let mut values: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Eigenvalues (ascending) and the matching orthonormal eigenvectors as columns.
pub fn hermitian_eigen(m: &ComplexMatrix, tol: &Tolerance) -> Result<(Vec<f64>, ComplexMatrix)> {
    m.require_hermitian(tol)?;
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let n = m.rows();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &ComplexMatrix, tol: &Tolerance) -> Result<f64> {
    m.require_hermitian(tol)?;
    let n = m.rows();
    if n == 1 {
        return Ok(m[(0, 0)].re);
    }
    if n == 2 {
        let (a, d, b) = (m[(0, 0)].re, m[(1, 1)].re, (m[(0, 1)] + m[(1, 0)].conj()) * 0.5);
        let mid = 0.5 * (a + d);
        return Ok(mid - (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt());
    }
    Ok(hermitian_part(m).symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min))
}

/// PSD verdict (`min eigenvalue ≥ -eig_zero`) together with the minimum eigenvalue.
pub fn is_psd(m: &ComplexMatrix, tol: &Tolerance) -> Result<(bool, f64)> {
    let min = min_eigenvalue(m, tol)?;
    Ok((min >= -tol.eig_zero, min))
}

/// Haar-distributed `n x n` unitary: QR of a complex Gaussian matrix with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = DMatrix::from_fn(n, n, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    ComplexMatrix::from_fn(n, n, |i, j| {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        q[(i, j)] * phase
    })
}

/// Groups an ascending spectrum into `(mean value, multiplicity)` clusters; neighbours
/// closer than `gap` join the same cluster.
pub fn cluster_spectrum(ascending: &[f64], gap: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize, f64)> = Vec::new();
    for &v in ascending {
        match out.last_mut() {
            Some((sum, count, last)) if v - *last <= gap => {
                *sum += v;
                *count += 1;
                *last = v;
            }
            _ => out.push((v, 1, v)),
        }
    }
    out.into_iter().map(|(sum, count, _)| (sum / count as f64, count)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: usize, cols: usize, re: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_real(rows, cols, re).unwrap()
    }

    #[test]
    fn eigenvalues_of_small_matrices() {
        let tol = Tolerance::default();
        let id = ComplexMatrix::identity(3);
        assert_eq!(hermitian_eigenvalues(&id, &tol).unwrap(), vec![1.0, 1.0, 1.0]);

        let d = real(3, 3, &[2.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0]);
        let e = hermitian_eigenvalues(&d, &tol).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-15 && e[1].abs() < 1e-15 && (e[2] - 2.0).abs() < 1e-15);

        let m = real(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let e = hermitian_eigenvalues(&m, &tol).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn eigenvalues_reject_bad_input() {
        let tol = Tolerance::default();
        let skew = real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(hermitian_eigenvalues(&skew, &tol), Err(Error::NotHermitian { .. })));
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eigenvalues(&rect, &tol), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn psd_verdicts() {
        let tol = Tolerance::default();
        assert_eq!(is_psd(&ComplexMatrix::identity(2), &tol).unwrap(), (true, 1.0));
        let (ok, min) = is_psd(&real(2, 2, &[1.0, 0.0, 0.0, -0.1]), &tol).unwrap();
        assert!(!ok && (min + 0.1).abs() < 1e-15);
        let (ok, min) = is_psd(&real(2, 2, &[1.0, 2.0, 2.0, 1.0]), &tol).unwrap();
        assert!(!ok && (min + 1.0).abs() < 1e-14);
        let (ok, min) = is_psd(&ComplexMatrix::identity(4).scale(C64::new(-1e-10, 0.0)), &tol).unwrap();
        assert!(ok && min < 0.0);
    }

    #[test]
    fn min_eigenvalue_matches_full_solver() {
        let tol = Tolerance::default();
        let m = ComplexMatrix::from_vec(
            2,
            2,
            vec![C64::new(0.3, 0.0), C64::new(0.2, -0.7), C64::new(0.2, 0.7), C64::new(-1.1, 0.0)],
        )
        .unwrap();
        let full = hermitian_eigenvalues(&m, &tol).unwrap()[0];
        assert!((min_eigenvalue(&m, &tol).unwrap() - full).abs() < 1e-14);
    }

    #[test]
    fn kron_examples() {
        assert_eq!(kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2)), ComplexMatrix::identity(4));
        let e12 = ComplexMatrix::unit(2, 0, 1);
        let k = kron(&e12, &e12);
        assert_eq!(k, ComplexMatrix::unit(4, 0, 3));
        let d = ComplexMatrix::from_diag(&[C64::new(2.0, 0.0), C64::new(-3.0, 0.0)]);
        let k = kron(&d, &ComplexMatrix::identity(2));
        let expected: Vec<C64> = [2.0, 2.0, -3.0, -3.0].iter().map(|&x| C64::new(x, 0.0)).collect();
        assert_eq!(k, ComplexMatrix::from_diag(&expected));
    }

    #[test]
    fn partial_transpose_of_maximally_entangled_projector_is_swap() {
        let tol = Tolerance::default();
        let mut omega = ComplexMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                omega = &omega + &kron(&ComplexMatrix::unit(2, i, j), &ComplexMatrix::unit(2, i, j));
            }
        }
        let swap = partial_transpose(&omega, (2, 2), Factor::Second).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(swap[(i * 2 + j, j * 2 + i)], ONE);
            }
        }
        let e = hermitian_eigenvalues(&swap, &tol).unwrap();
        let expected = [-1.0, 1.0, 1.0, 1.0];
        for (a, b) in e.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(
            partial_transpose(&ComplexMatrix::identity(4), (2, 2), Factor::First).unwrap(),
            ComplexMatrix::identity(4)
        );
    }

    #[test]
    fn partial_transpose_of_product_transposes_one_factor() {
        let a = ComplexMatrix::from_fn(2, 2, |i, j| C64::new(i as f64 + 1.0, j as f64 - 0.5));
        let b = ComplexMatrix::from_fn(3, 3, |i, j| C64::new((i * 3 + j) as f64, (i as f64) * 0.25));
        let ab = kron(&a, &b);
        assert_eq!(partial_transpose(&ab, (2, 3), Factor::Second).unwrap(), kron(&a, &b.transpose()));
        assert_eq!(partial_transpose(&ab, (2, 3), Factor::First).unwrap(), kron(&a.transpose(), &b));
        assert!(partial_transpose(&ab, (3, 3), Factor::First).is_err());
    }

    #[test]
    fn partial_trace_examples() {
        let t = partial_trace(&ComplexMatrix::identity(4), (2, 2), Factor::First).unwrap();
        assert_eq!(t, ComplexMatrix::identity(2).scale(C64::new(2.0, 0.0)));

        let a = ComplexMatrix::from_fn(2, 2, |i, j| C64::new(1.0 + i as f64, j as f64));
        let b = ComplexMatrix::from_fn(3, 3, |i, j| C64::new(j as f64, 2.0 - i as f64));
        let ab = kron(&a, &b);
        let first = partial_trace(&ab, (2, 3), Factor::First).unwrap();
        assert!(first.max_abs_diff(&b.scale(a.trace())) < 1e-14);
        let second = partial_trace(&ab, (2, 3), Factor::Second).unwrap();
        assert!(second.max_abs_diff(&a.scale(b.trace())) < 1e-14);

        let x = kron(&ComplexMatrix::unit(2, 0, 0), &ComplexMatrix::unit(2, 0, 1));
        assert_eq!(partial_trace(&x, (2, 2), Factor::Second).unwrap(), ComplexMatrix::zeros(2, 2));
        assert!(partial_trace(&x, (2, 3), Factor::Second).is_err());
    }

    #[test]
    fn clustering_groups_close_values() {
        let c = cluster_spectrum(&[-0.5, -0.5 + 1e-12, 0.25, 1.0, 1.0, 1.0], 1e-8);
        assert_eq!(c.len(), 3);
        assert_eq!(c[0].1, 2);
        assert_eq!(c[2], (1.0, 3));
    }

    #[test]
    fn random_unitaries_are_unitary() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in 1..5 {
            let u = random_unitary(n, &mut rng);
            let d = &u.adjoint() * &u;
            assert!(d.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-13);
        }
    }

    #[test]
    fn json_round_trip() {
        let m = ComplexMatrix::from_fn(2, 3, |i, j| C64::new(i as f64, -(j as f64)));
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.starts_with("{\"rows\":2,\"cols\":3,\"re\":"));
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        let bad = r#"{"rows":2,"cols":2,"re":[1,2,3],"im":[0,0,0]}"#;
        assert!(serde_json::from_str::<ComplexMatrix>(bad).is_err());
    }
}
