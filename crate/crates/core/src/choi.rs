//! Choi matrices `C = Σ_ij E_ij ⊗ Φ(E_ij)` and their closed-form spectra.

use serde::{Deserialize, Serialize};

use crate::channels::{DiagonalParams, Family, LinearMap, ProductParams, UnitaryParams, EXACT_SLACK};
use crate::error::{Error, Result};
use crate::linalg::{cluster_spectrum, hermitian_eigenvalues, ComplexMatrix, Tolerance, C64, ONE, ZERO};

/// Block `(i, j)` of `matrix` is `Φ(E_ij)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChoiWire")]
pub struct ChoiMatrix {
    pub dim_in: usize,
    pub dim_out: usize,
    pub matrix: ComplexMatrix,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChoiWire {
    dim_in: usize,
    dim_out: usize,
    matrix: ComplexMatrix,
}

impl TryFrom<ChoiWire> for ChoiMatrix {
    type Error = Error;
    fn try_from(w: ChoiWire) -> Result<Self> {
        let size = w.dim_in * w.dim_out;
        if w.dim_in == 0 || w.dim_out == 0 || w.matrix.rows() != size || w.matrix.cols() != size {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix of a map from {0}x{0} to {1}x{1} must be {2}x{2}",
                w.dim_in, w.dim_out, size
            )));
        }
        Ok(Self { dim_in: w.dim_in, dim_out: w.dim_out, matrix: w.matrix })
    }
}

impl ChoiMatrix {
    /// Wraps a square matrix of size `n²` as the Choi matrix of a map on `n x n` matrices.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let size = matrix.require_square()?;
        let n = (size as f64).sqrt().round() as usize;
        if n * n != size || n == 0 {
            return Err(Error::DimensionMismatch(format!("Choi matrix size {size} is not a perfect square")));
        }
        Ok(Self { dim_in: n, dim_out: n, matrix })
    }
}

/// The map recovered from its Choi matrix: `Φ(X) = Σ_ij X_ij · block(i, j)`.
impl LinearMap for ChoiMatrix {
    fn dim(&self) -> usize {
        self.dim_in
    }
    fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        x.require_dim(self.dim_in)?;
        let (n, m) = (self.dim_in, self.dim_out);
        let mut out = ComplexMatrix::zeros(m, m);
        for i in 0..n {
            for j in 0..n {
                let s = x[(i, j)];
                if s == ZERO {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out[(k, l)] += s * self.matrix[(i * m + k, j * m + l)];
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Builds the Choi matrix by applying `map` to every matrix unit.
pub fn choi_generic(map: &dyn LinearMap, n_in: usize) -> Result<ChoiMatrix> {
    if map.dim() != n_in {
        return Err(Error::DimensionMismatch(format!("map acts on dimension {}, not {n_in}", map.dim())));
    }
    let mut matrix: Option<ComplexMatrix> = None;
    let mut m = 0;
    for i in 0..n_in {
        for j in 0..n_in {
            let image = map.apply(&ComplexMatrix::unit(n_in, i, j))?;
            let out = image.require_square()?;
            let c = matrix.get_or_insert_with(|| {
                m = out;
                ComplexMatrix::zeros(n_in * out, n_in * out)
            });
            if out != m {
                return Err(Error::DimensionMismatch("map output size varies between inputs".into()));
            }
            for k in 0..m {
                for l in 0..m {
                    c[(i * m + k, j * m + l)] = image[(k, l)];
                }
            }
        }
    }
    Ok(ChoiMatrix { dim_in: n_in, dim_out: m, matrix: matrix.expect("n_in >= 1") })
}

/// `λ Σ E_ij ⊗ E_ij + ((1 − λ)/n)·I` for the unital unitary family.
pub fn choi_u_closed(p: &UnitaryParams) -> Result<ChoiMatrix> {
    if (p.sigma - ONE).norm() > EXACT_SLACK {
        return Err(Error::NotUnital(format!("sigma = {}{:+}i", p.sigma.re, p.sigma.im)));
    }
    let n = p.n;
    let shift = (ONE - p.lambda) / n as f64;
    let mut matrix = ComplexMatrix::identity(n * n).scale(shift);
    for i in 0..n {
        for j in 0..n {
            matrix[(i * n + i, j * n + j)] += p.lambda;
        }
    }
    Ok(ChoiMatrix { dim_in: n, dim_out: n, matrix })
}

/// One eigenvalue family of a closed-form spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralFamily {
    pub value: f64,
    pub multiplicity: usize,
}

/// Spectrum of the unitary-family Choi matrix: `nλ + (σ − λ)/n` once and `(σ − λ)/n`
/// with multiplicity `n² − 1`. Requires real parameters.
pub fn u_choi_spectrum(p: &UnitaryParams) -> Result<Vec<SpectralFamily>> {
    if p.sigma.im.abs() > EXACT_SLACK || p.lambda.im.abs() > EXACT_SLACK {
        return Err(Error::NonRealParameter("sigma and lambda must be real".into()));
    }
    let n = p.n as f64;
    let (s, l) = (p.sigma.re, p.lambda.re);
    Ok(vec![
        SpectralFamily { value: n * l + (s - l) / n, multiplicity: 1 },
        SpectralFamily { value: (s - l) / n, multiplicity: p.n * p.n - 1 },
    ])
}

/// Block data of a DU Choi matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DuReduced {
    /// The `n² − n` weights `c_ij`, `i ≠ j`, sitting alone on the Choi diagonal.
    pub offdiag_eigs: Vec<C64>,
    /// `Σ c_ii E_ii + Σ_{i≠j} λ_ij E_ij`: the Choi matrix restricted to `span{e_i ⊗ e_i}`.
    pub reduced: ComplexMatrix,
}

pub fn choi_du_reduced(p: &DiagonalParams) -> DuReduced {
    let n = p.n();
    let mut offdiag_eigs = Vec::with_capacity(n * n - n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                offdiag_eigs.push(p.c(i, j));
            }
        }
    }
    let reduced = ComplexMatrix::from_fn(n, n, |i, j| if i == j { p.c(i, i) } else { p.lambda(i, j) });
    DuReduced { offdiag_eigs, reduced }
}

/// Closed-form Choi spectrum of the product family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductSpectrum {
    pub families: Vec<SpectralFamily>,
    /// Set when a factor exceeds 3; the formulas are then extrapolated rather than established.
    pub conjectured: bool,
}

/// Four eigenvalue families with multiplicities `1`, `n1² − 1`, `n2² − 1`,
/// `(n1² − 1)(n2² − 1)`. Requires real `λ`.
pub fn product_choi_eigs(p: &ProductParams) -> Result<ProductSpectrum> {
    let [l00, l01, l10, l11] = p.real_lams()?;
    let (s1, s2) = ((p.n1 * p.n1 - 1) as f64, (p.n2 * p.n2 - 1) as f64);
    let big_n = (p.n1 * p.n2) as f64;
    let values = [
        (l00 + s2 * l01 + s1 * l10 + s1 * s2 * l11) / big_n,
        (l00 + s2 * l01 - l10 - s2 * l11) / big_n,
        (l00 - l01 + s1 * l10 - s1 * l11) / big_n,
        (l00 - l01 - l10 + l11) / big_n,
    ];
    let mults = [1, p.n1 * p.n1 - 1, p.n2 * p.n2 - 1, (p.n1 * p.n1 - 1) * (p.n2 * p.n2 - 1)];
    Ok(ProductSpectrum {
        families: values.iter().zip(mults).map(|(&value, multiplicity)| SpectralFamily { value, multiplicity }).collect(),
        conjectured: p.n1 > 3 || p.n2 > 3,
    })
}

/// Closed-form Choi spectrum of any family member, merged into distinct values.
/// DU spectra combine the isolated diagonal weights with the eigenvalues of the reduced block.
pub fn analytic_spectrum(params: &Family, tol: &Tolerance) -> Result<Vec<SpectralFamily>> {
    let raw = match params {
        Family::Unitary(p) => u_choi_spectrum(p)?,
        Family::Product(p) => product_choi_eigs(p)?.families,
        Family::Diagonal(p) => {
            let r = choi_du_reduced(p);
            let mut out = Vec::new();
            for z in &r.offdiag_eigs {
                if z.im.abs() > EXACT_SLACK {
                    return Err(Error::NonRealParameter("mixing weights must be real".into()));
                }
                out.push(SpectralFamily { value: z.re, multiplicity: 1 });
            }
            for v in hermitian_eigenvalues(&r.reduced, tol)? {
                out.push(SpectralFamily { value: v, multiplicity: 1 });
            }
            out
        }
    };
    Ok(merge_families(raw))
}

/// Merges families with (numerically) equal values and sorts ascending.
pub fn merge_families(mut raw: Vec<SpectralFamily>) -> Vec<SpectralFamily> {
    raw.retain(|f| f.multiplicity > 0);
    raw.sort_by(|a, b| a.value.total_cmp(&b.value));
    let mut out: Vec<SpectralFamily> = Vec::new();
    for f in raw {
        match out.last_mut() {
            Some(last) if (f.value - last.value).abs() <= CLUSTER_GAP => last.multiplicity += f.multiplicity,
            _ => out.push(f),
        }
    }
    out
}

/// Eigenvalues closer than this are treated as one multiplicity cluster.
pub const CLUSTER_GAP: f64 = 1e-8;

/// Numerical Choi spectrum clustered into `(value, multiplicity)` families.
pub fn numeric_spectrum(choi: &ChoiMatrix, tol: &Tolerance) -> Result<Vec<SpectralFamily>> {
    let eig = hermitian_eigenvalues(&choi.matrix, tol)?;
    Ok(cluster_spectrum(&eig, CLUSTER_GAP)
        .into_iter()
        .map(|(value, multiplicity)| SpectralFamily { value, multiplicity })
        .collect())
}
