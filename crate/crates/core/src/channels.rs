//! The three equivariant families, their structural checks, their action on
//! matrices, and the orthogonal projection of arbitrary maps onto each family.

use serde::{Deserialize, Serialize};

use crate::choi::{choi_generic, ChoiMatrix};
use crate::error::{Error, Result};
use crate::linalg::{kron, partial_trace, ComplexMatrix, Factor, C64, ONE, ZERO};

/// Slack allowed when deciding exact parameter identities (`σ = 1`, row sums, reality)
/// from floating-point inputs. Composition roundoff stays far below it.
pub const EXACT_SLACK: f64 = 1e-12;

fn is_one(z: C64) -> bool {
    (z - ONE).norm() <= EXACT_SLACK
}

fn is_real(z: C64) -> bool {
    z.im.abs() <= EXACT_SLACK
}

fn check_n(n: usize, what: &str) -> Result<()> {
    if n < 2 {
        Err(Error::InvalidParameters(format!("{what} must be at least 2, got {n}")))
    } else {
        Ok(())
    }
}

/// A linear map on `n x n` matrices.
pub trait LinearMap: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix>;
}

/// Wraps a closure as a [`LinearMap`].
pub struct FnMap<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&ComplexMatrix) -> ComplexMatrix + Sync> FnMap<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&ComplexMatrix) -> ComplexMatrix + Sync> LinearMap for FnMap<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        x.require_dim(self.dim)?;
        Ok((self.f)(x))
    }
}

/// `outer ∘ inner` as a map.
pub struct Composed<'a> {
    pub outer: &'a dyn LinearMap,
    pub inner: &'a dyn LinearMap,
}

impl LinearMap for Composed<'_> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.outer.apply(&self.inner.apply(x)?)
    }
}

/// The identity map on `n x n` matrices.
pub fn identity_map(n: usize) -> FnMap<impl Fn(&ComplexMatrix) -> ComplexMatrix + Sync> {
    FnMap::new(n, |x: &ComplexMatrix| x.clone())
}

/// The transpose map on `n x n` matrices.
pub fn transpose_map(n: usize) -> FnMap<impl Fn(&ComplexMatrix) -> ComplexMatrix + Sync> {
    FnMap::new(n, |x: &ComplexMatrix| x.transpose())
}

// ---------------------------------------------------------------------------
// Unitary family

/// `Φ(X) = ((σ − λ)/n)·tr(X)·I + λ·X`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "UnitaryWire")]
pub struct UnitaryParams {
    pub n: usize,
    pub sigma: C64,
    pub lambda: C64,
}

#[derive(Deserialize)]
struct UnitaryWire {
    n: usize,
    sigma: C64,
    lambda: C64,
}

impl TryFrom<UnitaryWire> for UnitaryParams {
    type Error = Error;
    fn try_from(w: UnitaryWire) -> Result<Self> {
        Self::new(w.n, w.sigma, w.lambda)
    }
}

impl UnitaryParams {
    pub fn new(n: usize, sigma: C64, lambda: C64) -> Result<Self> {
        check_n(n, "n")?;
        Ok(Self { n, sigma, lambda })
    }

    /// The unital member with `σ = 1`.
    pub fn unital(n: usize, lambda: impl Into<C64>) -> Result<Self> {
        Self::new(n, ONE, lambda.into())
    }

    pub fn validate(&self) -> StructuralFlags {
        let unital = is_one(self.sigma);
        let herm = is_real(self.sigma) && is_real(self.lambda);
        let mut details = vec![format!("sigma - 1 = {:e}{:+e}i", self.sigma.re - 1.0, self.sigma.im)];
        details.push(format!("Im sigma = {:e}, Im lambda = {:e}", self.sigma.im, self.lambda.im));
        StructuralFlags { unital, hermiticity_preserving: herm, details }
    }
}

pub fn apply_u(p: &UnitaryParams, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    x.require_dim(p.n)?;
    let shift = (p.sigma - p.lambda) * x.trace() / p.n as f64;
    let mut out = x.scale(p.lambda);
    for i in 0..p.n {
        out[(i, i)] += shift;
    }
    Ok(out)
}

impl LinearMap for UnitaryParams {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        apply_u(self, x)
    }
}

// ---------------------------------------------------------------------------
// Diagonal-unitary family

/// Off-diagonal entries are scaled entry-wise by `offdiag`; the diagonal is mixed by
/// `mixing` with the convention `Φ(E_jj) = Σ_k mixing[k][j]·E_kk` (column `j` is the
/// image of the `j`-th diagonal projector). Diagonal entries of `offdiag` are unused.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DiagonalWire", into = "DiagonalWire")]
pub struct DiagonalParams {
    n: usize,
    offdiag: ComplexMatrix,
    mixing: ComplexMatrix,
}

#[derive(Serialize, Deserialize)]
struct DiagonalWire {
    n: usize,
    offdiag: Vec<Vec<C64>>,
    mixing: Vec<Vec<C64>>,
}

fn table_to_matrix(n: usize, name: &str, t: Vec<Vec<C64>>) -> Result<ComplexMatrix> {
    if t.len() != n || t.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch(format!("\"{name}\" must be a {n}x{n} table")));
    }
    ComplexMatrix::from_vec(n, n, t.into_iter().flatten().collect())
}

fn matrix_to_table(m: &ComplexMatrix) -> Vec<Vec<C64>> {
    m.as_slice().chunks(m.cols()).map(|r| r.to_vec()).collect()
}

impl TryFrom<DiagonalWire> for DiagonalParams {
    type Error = Error;
    fn try_from(w: DiagonalWire) -> Result<Self> {
        check_n(w.n, "n")?;
        let offdiag = table_to_matrix(w.n, "offdiag", w.offdiag)?;
        let mixing = table_to_matrix(w.n, "mixing", w.mixing)?;
        Self::new(offdiag, mixing)
    }
}

impl From<DiagonalParams> for DiagonalWire {
    fn from(p: DiagonalParams) -> Self {
        Self { n: p.n, offdiag: matrix_to_table(&p.offdiag), mixing: matrix_to_table(&p.mixing) }
    }
}

impl DiagonalParams {
    /// Diagonal entries of `offdiag` are zeroed.
    pub fn new(offdiag: ComplexMatrix, mixing: ComplexMatrix) -> Result<Self> {
        let n = offdiag.require_square()?;
        check_n(n, "n")?;
        mixing.require_dim(n)?;
        let mut offdiag = offdiag;
        for i in 0..n {
            offdiag[(i, i)] = ZERO;
        }
        Ok(Self { n, offdiag, mixing })
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_n(n, "n")?;
        let offdiag = ComplexMatrix::from_fn(n, n, |i, j| if i == j { ZERO } else { ONE });
        Self::new(offdiag, ComplexMatrix::identity(n))
    }

    /// Unital Hermiticity-preserving DU(2) map with leakages `c12`, `c21` and coherence `λ`;
    /// the diagonal weights are `c11 = 1 − c12`, `c22 = 1 − c21`.
    pub fn du2(c12: f64, c21: f64, lambda: C64) -> Self {
        let offdiag = ComplexMatrix::from_vec(2, 2, vec![ZERO, lambda, lambda.conj(), ZERO]).expect("2x2");
        let mixing = ComplexMatrix::from_real(2, 2, &[1.0 - c12, c12, c21, 1.0 - c21]).expect("2x2");
        Self { n: 2, offdiag, mixing }
    }

    /// Permutation-symmetric DU(3) map: `C = p·I + ((1 − p)/2)(J − I)`, `λ_ij = λ` above
    /// the diagonal and `λ̄` below.
    pub fn du3_symmetric(p: f64, lambda: C64) -> Self {
        let q = 0.5 * (1.0 - p);
        let offdiag = ComplexMatrix::from_fn(3, 3, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Less => lambda,
            std::cmp::Ordering::Greater => lambda.conj(),
            std::cmp::Ordering::Equal => ZERO,
        });
        let mixing = ComplexMatrix::from_fn(3, 3, |i, j| C64::new(if i == j { p } else { q }, 0.0));
        Self { n: 3, offdiag, mixing }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Coherence factor `λ_ij` (`i ≠ j`).
    pub fn lambda(&self, i: usize, j: usize) -> C64 {
        self.offdiag[(i, j)]
    }

    /// Mixing weight `c_kj`: amount of `E_kk` in `Φ(E_jj)`.
    pub fn c(&self, k: usize, j: usize) -> C64 {
        self.mixing[(k, j)]
    }

    pub fn offdiag(&self) -> &ComplexMatrix {
        &self.offdiag
    }

    pub fn mixing(&self) -> &ComplexMatrix {
        &self.mixing
    }

    /// Recognises the permutation-symmetric DU(3) pattern and returns `(p, λ)`.
    pub fn as_du3_symmetric(&self) -> Option<(f64, C64)> {
        if self.n != 3 {
            return None;
        }
        let p = self.c(0, 0);
        let lam = self.lambda(0, 1);
        let candidate = Self::du3_symmetric(p.re, lam);
        let close = self.mixing.max_abs_diff(&candidate.mixing) <= EXACT_SLACK
            && self.offdiag.max_abs_diff(&candidate.offdiag) <= EXACT_SLACK
            && is_real(p);
        close.then_some((p.re, lam))
    }

    pub fn validate(&self) -> StructuralFlags {
        let n = self.n;
        let mut details = Vec::new();
        let mut unital = true;
        for k in 0..n {
            let s: C64 = (0..n).map(|j| self.c(k, j)).sum();
            if !is_one(s) {
                unital = false;
                details.push(format!("mixing row {} sums to {}{:+}i", k + 1, s.re, s.im));
            }
        }
        let mut herm = true;
        for i in 0..n {
            for j in 0..n {
                if !is_real(self.c(i, j)) {
                    herm = false;
                    details.push(format!("c_{}{} is not real", i + 1, j + 1));
                }
                if i < j && (self.lambda(i, j) - self.lambda(j, i).conj()).norm() > EXACT_SLACK {
                    herm = false;
                    details.push(format!("lambda_{0}{1} != conj(lambda_{1}{0})", i + 1, j + 1));
                }
            }
        }
        if details.is_empty() {
            details.push("rows of mixing sum to 1; coherences conjugate-symmetric; mixing real".into());
        }
        StructuralFlags { unital, hermiticity_preserving: herm, details }
    }
}

pub fn apply_du(p: &DiagonalParams, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    x.require_dim(p.n)?;
    let n = p.n;
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                out[(i, j)] = p.offdiag[(i, j)] * x[(i, j)];
            }
        }
        out[(i, i)] = (0..n).map(|j| p.mixing[(i, j)] * x[(j, j)]).sum();
    }
    Ok(out)
}

impl LinearMap for DiagonalParams {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        apply_du(self, x)
    }
}

// ---------------------------------------------------------------------------
// Product family

/// `Φ(X) = Σ_ab λ_ab X_ab` over the four-way split of `X` on `C^n1 ⊗ C^n2`
/// (see [`decompose_product`]). `lam` is ordered `[λ00, λ01, λ10, λ11]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProductWire")]
pub struct ProductParams {
    pub n1: usize,
    pub n2: usize,
    pub lam: [C64; 4],
}

#[derive(Deserialize)]
struct ProductWire {
    n1: usize,
    n2: usize,
    lam: [C64; 4],
}

impl TryFrom<ProductWire> for ProductParams {
    type Error = Error;
    fn try_from(w: ProductWire) -> Result<Self> {
        Self::new(w.n1, w.n2, w.lam)
    }
}

/// The four constants governing the action on matrix units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductConstants {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl ProductParams {
    pub fn new(n1: usize, n2: usize, lam: [C64; 4]) -> Result<Self> {
        check_n(n1, "n1")?;
        check_n(n2, "n2")?;
        Ok(Self { n1, n2, lam })
    }

    /// Unital real member with `λ00 = 1`.
    pub fn unital(n1: usize, n2: usize, l01: f64, l10: f64, l11: f64) -> Result<Self> {
        Self::new(n1, n2, [ONE, C64::new(l01, 0.0), C64::new(l10, 0.0), C64::new(l11, 0.0)])
    }

    pub fn dim(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn constants(&self) -> ProductConstants {
        let [l00, l01, l10, l11] = self.lam;
        let (n1, n2) = (self.n1 as f64, self.n2 as f64);
        ProductConstants {
            a: (l00 - l01 - l10 + l11) / (n1 * n2),
            b: (l01 - l11) / n1,
            c: (l10 - l11) / n2,
            d: l11,
        }
    }

    /// Real parts of `[λ00, λ01, λ10, λ11]`, or an error naming a complex entry.
    pub fn real_lams(&self) -> Result<[f64; 4]> {
        for (k, z) in self.lam.iter().enumerate() {
            if !is_real(*z) {
                return Err(Error::NonRealParameter(format!("lam{:02b} = {}{:+}i", k, z.re, z.im)));
            }
        }
        Ok(self.lam.map(|z| z.re))
    }

    pub fn validate(&self) -> StructuralFlags {
        let unital = is_one(self.lam[0]);
        let herm = self.lam.iter().all(|&z| is_real(z));
        let details = vec![
            format!("lam00 - 1 = {:e}{:+e}i", self.lam[0].re - 1.0, self.lam[0].im),
            format!("max |Im lam| = {:e}", self.lam.iter().map(|z| z.im.abs()).fold(0.0, f64::max)),
        ];
        StructuralFlags { unital, hermiticity_preserving: herm, details }
    }
}

/// Splits `X` on `C^n1 ⊗ C^n2` into `[X00, X01, X10, X11]`: the identity part, the part
/// `I ⊗ (traceless)`, the part `(traceless) ⊗ I`, and the traceless ⊗ traceless remainder.
pub fn decompose_product(x: &ComplexMatrix, n1: usize, n2: usize) -> Result<[ComplexMatrix; 4]> {
    let n = n1 * n2;
    x.require_dim(n)?;
    let tr = x.trace();
    let x00 = ComplexMatrix::identity(n).scale(tr / n as f64);

    let mut rest2 = partial_trace(x, (n1, n2), Factor::First)?;
    for k in 0..n2 {
        rest2[(k, k)] -= tr / n2 as f64;
    }
    let x01 = kron(&ComplexMatrix::identity(n1), &rest2).scale(C64::new(1.0 / n1 as f64, 0.0));

    let mut rest1 = partial_trace(x, (n1, n2), Factor::Second)?;
    for i in 0..n1 {
        rest1[(i, i)] -= tr / n1 as f64;
    }
    let x10 = kron(&rest1, &ComplexMatrix::identity(n2)).scale(C64::new(1.0 / n2 as f64, 0.0));

    let x11 = &(&(x - &x00) - &x01) - &x10;
    Ok([x00, x01, x10, x11])
}

pub fn apply_product(p: &ProductParams, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let parts = decompose_product(x, p.n1, p.n2)?;
    let mut out = parts[0].scale(p.lam[0]);
    for (part, &l) in parts.iter().zip(&p.lam).skip(1) {
        out = &out + &part.scale(l);
    }
    Ok(out)
}

impl LinearMap for ProductParams {
    fn dim(&self) -> usize {
        self.dim()
    }
    fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        apply_product(self, x)
    }
}

// ---------------------------------------------------------------------------
// Family dispatch

/// Parameters of any supported family. JSON carries a `"family"` tag of `U`, `DU` or `PROD`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum Family {
    #[serde(rename = "U")]
    Unitary(UnitaryParams),
    #[serde(rename = "DU")]
    Diagonal(DiagonalParams),
    #[serde(rename = "PROD")]
    Product(ProductParams),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Unitary(_) => "U",
            Family::Diagonal(_) => "DU",
            Family::Product(_) => "PROD",
        }
    }

    pub fn as_map(&self) -> &dyn LinearMap {
        match self {
            Family::Unitary(p) => p,
            Family::Diagonal(p) => p,
            Family::Product(p) => p,
        }
    }
}

impl LinearMap for Family {
    fn dim(&self) -> usize {
        self.as_map().dim()
    }
    fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.as_map().apply(x)
    }
}

impl From<UnitaryParams> for Family {
    fn from(p: UnitaryParams) -> Self {
        Family::Unitary(p)
    }
}

impl From<DiagonalParams> for Family {
    fn from(p: DiagonalParams) -> Self {
        Family::Diagonal(p)
    }
}

impl From<ProductParams> for Family {
    fn from(p: ProductParams) -> Self {
        Family::Product(p)
    }
}

/// Unitality and Hermiticity preservation, decided from the parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuralFlags {
    pub unital: bool,
    pub hermiticity_preserving: bool,
    pub details: Vec<String>,
}

pub fn validate(params: &Family) -> StructuralFlags {
    match params {
        Family::Unitary(p) => p.validate(),
        Family::Diagonal(p) => p.validate(),
        Family::Product(p) => p.validate(),
    }
}

// ---------------------------------------------------------------------------
// Twirl

/// Target family of a twirl.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwirlTarget {
    Unitary,
    Diagonal,
    Product { n1: usize, n2: usize },
}

/// Result of projecting a map onto a family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Twirled {
    pub params: Family,
    /// Frobenius distance between the input Choi matrix and the projection's Choi matrix.
    pub residual: f64,
}

/// Orthogonal projection (Hilbert–Schmidt on Choi matrices) of a map onto a family.
pub fn twirl(choi: &ChoiMatrix, target: TwirlTarget) -> Result<Twirled> {
    let n = choi.dim_in;
    if choi.dim_out != n {
        return Err(Error::DimensionMismatch("twirl requires equal input and output dimensions".into()));
    }
    check_n(n, "dimension")?;
    let image = |i: usize, j: usize| choi.matrix.block(i, j, n);
    let params: Family = match target {
        TwirlTarget::Unitary => {
            let sigma: C64 = (0..n).map(|i| image(i, i).trace()).sum::<C64>() / n as f64;
            let omega: C64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| choi.matrix[(i * n + i, j * n + j)]).sum();
            let lambda = (omega - sigma) / (n * n - 1) as f64;
            UnitaryParams::new(n, sigma, lambda)?.into()
        }
        TwirlTarget::Diagonal => {
            let offdiag = ComplexMatrix::from_fn(n, n, |i, j| if i == j { ZERO } else { choi.matrix[(i * n + i, j * n + j)] });
            let mixing = ComplexMatrix::from_fn(n, n, |k, j| choi.matrix[(j * n + k, j * n + k)]);
            DiagonalParams::new(offdiag, mixing)?.into()
        }
        TwirlTarget::Product { n1, n2 } => {
            if n1 * n2 != n {
                return Err(Error::DimensionMismatch(format!("{n1}x{n2} factors do not match dimension {n}")));
            }
            check_n(n1, "n1")?;
            check_n(n2, "n2")?;
            let mut acc = [ZERO; 4];
            for i in 0..n {
                for j in 0..n {
                    let parts = decompose_product(&ComplexMatrix::unit(n, i, j), n1, n2)?;
                    let out = image(i, j);
                    for (a, part) in acc.iter_mut().zip(&parts) {
                        *a += part.inner(&out);
                    }
                }
            }
            let (s1, s2) = ((n1 * n1 - 1) as f64, (n2 * n2 - 1) as f64);
            let dims = [1.0, s2, s1, s1 * s2];
            let mut lam = [ZERO; 4];
            for k in 0..4 {
                lam[k] = acc[k] / dims[k];
            }
            ProductParams::new(n1, n2, lam)?.into()
        }
    };
    let projected = choi_generic(&params, n)?;
    let residual = (&choi.matrix - &projected.matrix).frobenius_norm();
    Ok(Twirled { params, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn sample_matrix(n: usize, seed: u64) -> ComplexMatrix {
        let mut s = seed;
        ComplexMatrix::from_fn(n, n, |_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = ((s >> 33) as f64 / (1u64 << 31) as f64) - 0.5;
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let b = ((s >> 33) as f64 / (1u64 << 31) as f64) - 0.5;
            C64::new(a, b)
        })
    }

    #[test]
    fn unitary_action() {
        let x = sample_matrix(3, 1);
        let id = UnitaryParams::unital(3, 1.0).unwrap();
        assert_eq!(apply_u(&id, &x).unwrap(), x);

        let dep = UnitaryParams::unital(3, 0.0).unwrap();
        let expected = ComplexMatrix::identity(3).scale(x.trace() / 3.0);
        assert!(apply_u(&dep, &x).unwrap().max_abs_diff(&expected) < 1e-15);

        let half = UnitaryParams::unital(2, 0.5).unwrap();
        let e12 = ComplexMatrix::unit(2, 0, 1);
        assert_eq!(apply_u(&half, &e12).unwrap(), e12.scale(c(0.5)));
        assert!(apply_u(&half, &ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn n_one_is_rejected() {
        assert!(UnitaryParams::unital(1, 0.5).is_err());
        assert!(DiagonalParams::identity(1).is_err());
        assert!(ProductParams::unital(1, 2, 0.0, 0.0, 0.0).is_err());
        assert!(serde_json::from_str::<Family>(r#"{"family":"U","n":1,"sigma":[1,0],"lambda":[0,0]}"#).is_err());
    }

    #[test]
    fn diagonal_action() {
        let x = sample_matrix(3, 2);
        let id = DiagonalParams::identity(3).unwrap();
        assert_eq!(apply_du(&id, &x).unwrap(), x);

        let p = DiagonalParams::du2(0.1, 0.2, C64::new(0.3, 0.4));
        let e12 = ComplexMatrix::unit(2, 0, 1);
        assert_eq!(apply_du(&p, &e12).unwrap(), e12.scale(p.lambda(0, 1)));

        let mixing = ComplexMatrix::from_real(2, 2, &[0.8, 0.3, 0.2, 0.7]).unwrap();
        let q = DiagonalParams::new(ComplexMatrix::zeros(2, 2), mixing).unwrap();
        let out = apply_du(&q, &ComplexMatrix::unit(2, 0, 0)).unwrap();
        let expected = ComplexMatrix::from_real(2, 2, &[0.8, 0.0, 0.0, 0.2]).unwrap();
        assert!(out.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn product_decomposition_examples() {
        let id = ComplexMatrix::identity(4);
        let parts = decompose_product(&id, 2, 2).unwrap();
        assert!(parts[0].max_abs_diff(&id) < 1e-15);
        for p in &parts[1..] {
            assert!(p.max_abs() < 1e-15);
        }

        let x = kron(&ComplexMatrix::unit(2, 0, 1), &ComplexMatrix::unit(2, 0, 1));
        let parts = decompose_product(&x, 2, 2).unwrap();
        assert!(parts[3].max_abs_diff(&x) < 1e-15);
        for p in &parts[..3] {
            assert!(p.max_abs() < 1e-15);
        }

        let x = kron(&ComplexMatrix::unit(2, 0, 0), &ComplexMatrix::identity(2));
        let parts = decompose_product(&x, 2, 2).unwrap();
        assert!(parts[0].max_abs_diff(&ComplexMatrix::identity(4).scale(c(0.5))) < 1e-15);
        assert!(parts[1].max_abs() < 1e-15);
        let traceless = ComplexMatrix::from_real(2, 2, &[0.5, 0.0, 0.0, -0.5]).unwrap();
        assert!(parts[2].max_abs_diff(&kron(&traceless, &ComplexMatrix::identity(2))) < 1e-15);
        assert!(parts[3].max_abs() < 1e-15);
    }

    #[test]
    fn decomposition_is_orthogonal_and_complete() {
        for &(n1, n2) in &[(2, 2), (2, 3), (3, 2)] {
            let x = sample_matrix(n1 * n2, 7 + n1 as u64);
            let parts = decompose_product(&x, n1, n2).unwrap();
            let sum = parts.iter().skip(1).fold(parts[0].clone(), |acc, p| &acc + p);
            assert!(sum.max_abs_diff(&x) < 1e-14);
            for a in 0..4 {
                for b in (a + 1)..4 {
                    assert!(parts[a].inner(&parts[b]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn product_action_on_units() {
        let id = ProductParams::unital(2, 3, 1.0, 1.0, 1.0).unwrap();
        let x = sample_matrix(6, 3);
        assert!(apply_product(&id, &x).unwrap().max_abs_diff(&x) < 1e-14);

        let p = ProductParams::unital(2, 2, 0.3, -0.2, 0.7).unwrap();
        let x = kron(&ComplexMatrix::unit(2, 0, 1), &ComplexMatrix::unit(2, 0, 1));
        assert!(apply_product(&p, &x).unwrap().max_abs_diff(&x.scale(c(0.7))) < 1e-15);

        let dep = ProductParams::unital(2, 2, 0.0, 0.0, 0.0).unwrap();
        let x = kron(&ComplexMatrix::unit(2, 0, 0), &ComplexMatrix::unit(2, 0, 0));
        let out = apply_product(&dep, &x).unwrap();
        assert!(out.max_abs_diff(&ComplexMatrix::identity(4).scale(c(0.25))) < 1e-15);
    }

    #[test]
    fn constants_describe_diagonal_unit_images() {
        // Φ(E_ii ⊗ F_kk) = a·I + b·I⊗F_kk + c·E_ii⊗I + d·E_ii⊗F_kk
        let p = ProductParams::unital(2, 3, 0.4, -0.3, 0.25).unwrap();
        let k = p.constants();
        let (e, f) = (ComplexMatrix::unit(2, 1, 1), ComplexMatrix::unit(3, 2, 2));
        let (i1, i2) = (ComplexMatrix::identity(2), ComplexMatrix::identity(3));
        let expected = &(&(&ComplexMatrix::identity(6).scale(k.a) + &kron(&i1, &f).scale(k.b))
            + &kron(&e, &i2).scale(k.c))
            + &kron(&e, &f).scale(k.d);
        assert!(apply_product(&p, &kron(&e, &f)).unwrap().max_abs_diff(&expected) < 1e-15);

        // Φ(E_ii ⊗ F_kl), k ≠ l: b·I⊗F_kl + d·E_ii⊗F_kl
        let f = ComplexMatrix::unit(3, 0, 2);
        let expected = &kron(&i1, &f).scale(k.b) + &kron(&e, &f).scale(k.d);
        assert!(apply_product(&p, &kron(&e, &f)).unwrap().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn validation_flags() {
        let f = UnitaryParams::unital(2, 0.3).unwrap().validate();
        assert!(f.unital && f.hermiticity_preserving);
        let f = UnitaryParams::unital(2, C64::new(0.3, 0.1)).unwrap().validate();
        assert!(f.unital && !f.hermiticity_preserving);
        let p = ProductParams::new(2, 2, [c(0.9), c(0.1), c(0.2), c(0.3)]).unwrap();
        let f = p.validate();
        assert!(!f.unital && f.hermiticity_preserving);

        let f = DiagonalParams::du2(0.3, 0.4, C64::new(0.2, 0.1)).validate();
        assert!(f.unital && f.hermiticity_preserving);
        let mixing = ComplexMatrix::from_real(2, 2, &[0.8, 0.3, 0.2, 0.7]).unwrap();
        let f = DiagonalParams::new(ComplexMatrix::zeros(2, 2), mixing).unwrap().validate();
        assert!(!f.unital && f.hermiticity_preserving);
    }

    #[test]
    fn twirl_examples() {
        let id = identity_map(3);
        let t = twirl(&choi_generic(&id, 3).unwrap(), TwirlTarget::Unitary).unwrap();
        match t.params {
            Family::Unitary(p) => {
                assert!((p.sigma - ONE).norm() < 1e-15 && (p.lambda - ONE).norm() < 1e-15);
            }
            _ => unreachable!(),
        }
        assert!(t.residual < 1e-14);

        let tr = transpose_map(2);
        let t = twirl(&choi_generic(&tr, 2).unwrap(), TwirlTarget::Diagonal).unwrap();
        match &t.params {
            Family::Diagonal(p) => {
                assert!(p.lambda(0, 1).norm() < 1e-15 && p.lambda(1, 0).norm() < 1e-15);
                assert!(p.mixing().max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
            }
            _ => unreachable!(),
        }
        assert!((t.residual - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn family_json_shapes() {
        let u: Family = serde_json::from_str(r#"{"family":"U","n":3,"sigma":[1,0],"lambda":[-0.25,0]}"#).unwrap();
        assert_eq!(u, UnitaryParams::unital(3, -0.25).unwrap().into());
        let p: Family =
            serde_json::from_str(r#"{"family":"PROD","n1":2,"n2":3,"lam":[[1,0],[0.1,0],[0.2,0],[0.3,0]]}"#).unwrap();
        assert_eq!(p, ProductParams::unital(2, 3, 0.1, 0.2, 0.3).unwrap().into());
        let d: Family = serde_json::from_str(
            r#"{"family":"DU","n":2,"offdiag":[[[0,0],[0.5,0]],[[0.5,0],[0,0]]],"mixing":[[[0.6,0],[0.4,0]],[[0.4,0],[0.6,0]]]}"#,
        )
        .unwrap();
        assert_eq!(d, DiagonalParams::du2(0.4, 0.4, c(0.5)).into());
        let back: Family = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(back, d);
        assert!(serde_json::from_str::<Family>(r#"{"family":"DU","n":2,"offdiag":[[[0,0]]],"mixing":[]}"#).is_err());
    }
}
