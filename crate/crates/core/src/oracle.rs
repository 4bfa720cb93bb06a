//! Numerical falsifiers: Kadison-gap search for Schwarz violations, product-vector
//! sampling for block positivity, and parameter-grid scans.

use std::collections::BTreeMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{DiagonalParams, Family, LinearMap, ProductParams, UnitaryParams};
use crate::choi::{choi_generic, ChoiMatrix};
use crate::classify::{
    classify_du2, classify_du3_symmetric, cp_du, cp_numeric, cp_product_small, cp_u, eb_sufficient_du, eb_u, ppt_du,
    ppt_eb_u, ppt_numeric, schwarz_necessary_du, schwarz_necessary_product, schwarz_u, RegionVerdict,
};
use crate::error::{Error, Result};
use crate::format_float;
use crate::linalg::{hermitian_eigen, min_eigenvalue, ComplexMatrix, Tolerance, C64, ONE};

/// An input whose Kadison gap is negative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub x: ComplexMatrix,
    /// Smallest eigenvalue of `Φ(X†X) − Φ(X)†Φ(X)`.
    pub gap: f64,
    /// Which search stage produced it.
    pub probe: String,
}

/// Smallest eigenvalue of `Φ(X†X) − Φ(X)†Φ(X)`.
pub fn kadison_gap(map: &dyn LinearMap, x: &ComplexMatrix, tol: &Tolerance) -> Result<f64> {
    x.require_dim(map.dim())?;
    let xx = x.adjoint().matmul(x)?;
    let y = map.apply(x)?;
    let m = &map.apply(&xx)? - &y.adjoint().matmul(&y)?;
    let defect = m.hermitian_defect();
    if defect > tol.herm_sym * (1.0 + m.max_abs()) || defect.is_nan() {
        return Err(Error::NotHermitianIntermediate { defect });
    }
    min_eigenvalue(&m, &Tolerance { herm_sym: f64::INFINITY, ..*tol })
}

/// Search settings for [`schwarz_falsify`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FalsifyOptions {
    /// Number of random probes after the structured ones.
    pub budget: usize,
    pub seed: u64,
    /// Independent random stream; scans use the grid index.
    pub stream: u64,
    /// Local-search steps spent polishing the best probes when nothing else succeeds.
    pub refine_steps: usize,
    pub tol: Tolerance,
}

impl Default for FalsifyOptions {
    fn default() -> Self {
        Self { budget: 2000, seed: 0, stream: 0, refine_steps: 300, tol: Tolerance::default() }
    }
}

const PHASES: [C64; 4] = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)];

/// Sparse probes on which Schwarz violations of equivariant maps show up first:
/// matrix units, row pairs `E_ij + ω E_ik`, column pairs `E_ij + ω E_kj`, and
/// traceless 2×2 principal blocks.
pub fn structured_probes(n: usize) -> Vec<(String, ComplexMatrix)> {
    let mut out = Vec::new();
    let e = |i, j| ComplexMatrix::unit(n, i, j);
    for i in 0..n {
        for j in 0..n {
            out.push((format!("E_{}{}", i + 1, j + 1), e(i, j)));
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in (j + 1)..n {
                for w in PHASES {
                    out.push((format!("E_{0}{1} + ({2})E_{0}{3}", i + 1, j + 1, w, k + 1), &e(i, j) + &e(i, k).scale(w)));
                }
            }
        }
    }
    for j in 0..n {
        for i in 0..n {
            for k in (i + 1)..n {
                for w in PHASES {
                    out.push((format!("E_{0}{1} + ({2})E_{3}{1}", i + 1, j + 1, w, k + 1), &e(i, j) + &e(k, j).scale(w)));
                }
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let diag = &e(i, i) - &e(j, j);
            for w in PHASES {
                out.push((format!("E_{0}{0} - E_{1}{1} + ({2})E_{0}{1}", i + 1, j + 1, w), &diag + &e(i, j).scale(w)));
                out.push((format!("E_{0}{1} + ({2})E_{1}{0}", i + 1, j + 1, w), &e(i, j) + &e(j, i).scale(w)));
            }
        }
    }
    out
}

/// Complex Gaussian matrix scaled to unit Frobenius norm.
pub fn random_probe(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let m = ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let norm = m.frobenius_norm();
    m.scale(C64::new(1.0 / norm, 0.0))
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Keeps the `k` lowest-scoring candidates.
struct Best<T> {
    k: usize,
    items: Vec<(f64, T)>,
}

impl<T> Best<T> {
    fn new(k: usize) -> Self {
        Self { k, items: Vec::with_capacity(k + 1) }
    }

    fn offer(&mut self, score: f64, item: impl FnOnce() -> T) {
        if self.items.len() == self.k && score >= self.items[self.k - 1].0 {
            return;
        }
        let pos = self.items.partition_point(|(s, _)| *s <= score);
        self.items.insert(pos, (score, item()));
        self.items.truncate(self.k);
    }
}

const REFINE_STARTS: usize = 3;

/// Searches for an input with negative Kadison gap. Structured probes run first, then
/// `budget` random probes, then a local search from the best few probes seen. Returns the
/// first input whose gap falls below `-eig_zero`; `None` means no violation was found,
/// which does not prove the map is Schwarz.
pub fn schwarz_falsify(map: &dyn LinearMap, opts: &FalsifyOptions) -> Result<Option<Witness>> {
    let n = map.dim();
    let tol = &opts.tol;
    let threshold = -tol.eig_zero;
    let mut best: Best<ComplexMatrix> = Best::new(REFINE_STARTS);
    for (label, x) in structured_probes(n) {
        let norm = x.frobenius_norm();
        let x = x.scale(C64::new(1.0 / norm, 0.0));
        let gap = kadison_gap(map, &x, tol)?;
        if gap < threshold {
            return Ok(Some(Witness { x, gap, probe: format!("structured {label}") }));
        }
        best.offer(gap, || x);
    }
    let mut rng = rng_for(opts.seed, opts.stream);
    for _ in 0..opts.budget {
        let x = random_probe(n, &mut rng);
        let gap = kadison_gap(map, &x, tol)?;
        if gap < threshold {
            return Ok(Some(Witness { x, gap, probe: "random".into() }));
        }
        best.offer(gap, || x);
    }
    if opts.refine_steps == 0 {
        return Ok(None);
    }
    let per_start = opts.refine_steps.div_ceil(best.items.len().max(1));
    for (mut gap, mut x) in std::mem::take(&mut best.items) {
        let mut step = 0.25;
        for _ in 0..per_start {
            let trial = &x + &random_probe(n, &mut rng).scale(C64::new(step, 0.0));
            let norm = trial.frobenius_norm();
            if norm == 0.0 {
                continue;
            }
            let trial = trial.scale(C64::new(1.0 / norm, 0.0));
            let g = kadison_gap(map, &trial, tol)?;
            if g < gap {
                gap = g;
                x = trial;
                step = (step * 1.5).min(1.0);
                if gap < threshold {
                    return Ok(Some(Witness { x, gap, probe: "refined".into() }));
                }
            } else {
                step = (step * 0.9).max(1e-4);
            }
        }
    }
    Ok(None)
}

/// Product vectors `v ⊗ w` with negative expectation in a Choi matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductWitness {
    pub v: Vec<C64>,
    pub w: Vec<C64>,
    /// `⟨v⊗w, C v⊗w⟩`.
    pub value: f64,
}

fn product_expectation(c: &ComplexMatrix, v: &[C64], w: &[C64]) -> f64 {
    let d2 = w.len();
    let u: Vec<C64> = v.iter().flat_map(|&a| w.iter().map(move |&b| a * b)).collect();
    let mut acc = C64::new(0.0, 0.0);
    for (r, &ur) in u.iter().enumerate() {
        let row = &c.as_slice()[r * u.len()..(r + 1) * u.len()];
        let dot: C64 = row.iter().zip(&u).map(|(a, b)| a * b).sum();
        acc += ur.conj() * dot;
    }
    debug_assert_eq!(u.len(), v.len() * d2);
    acc.re
}

fn random_unit(d: usize, rng: &mut impl Rng) -> Vec<C64> {
    let v: Vec<C64> = (0..d).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Alternating minimization over one factor with the other held fixed.
fn see_saw(c: &ComplexMatrix, (d1, d2): (usize, usize), mut v: Vec<C64>, rounds: usize, tol: &Tolerance) -> Result<(Vec<C64>, Vec<C64>, f64)> {
    let relaxed = Tolerance { herm_sym: f64::INFINITY, ..*tol };
    let mut w = vec![C64::new(0.0, 0.0); d2];
    let mut value = f64::INFINITY;
    for _ in 0..rounds {
        let wm = ComplexMatrix::from_fn(d2, d2, |k, l| {
            let mut s = C64::new(0.0, 0.0);
            for i in 0..d1 {
                for j in 0..d1 {
                    s += v[i].conj() * v[j] * c[(i * d2 + k, j * d2 + l)];
                }
            }
            s
        });
        let (_, vecs) = hermitian_eigen(&wm, &relaxed)?;
        w = (0..d2).map(|k| vecs[(k, 0)]).collect();
        let vm = ComplexMatrix::from_fn(d1, d1, |i, j| {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..d2 {
                for l in 0..d2 {
                    s += w[k].conj() * w[l] * c[(i * d2 + k, j * d2 + l)];
                }
            }
            s
        });
        let (vals, vecs) = hermitian_eigen(&vm, &relaxed)?;
        v = (0..d1).map(|i| vecs[(i, 0)]).collect();
        if value - vals[0] < 1e-15 {
            value = vals[0];
            break;
        }
        value = vals[0];
    }
    Ok((v, w, value))
}

/// Samples product vectors looking for `⟨v⊗w, C v⊗w⟩ < −eig_zero`, then polishes the best
/// samples by alternating minimization. A `None` result is not a positivity proof.
pub fn block_positivity_falsify(choi: &ChoiMatrix, budget: usize, seed: u64, tol: &Tolerance) -> Result<Option<ProductWitness>> {
    choi.matrix.require_hermitian(tol)?;
    let (d1, d2) = (choi.dim_in, choi.dim_out);
    let c = &choi.matrix;
    let basis = |d: usize, i: usize| -> Vec<C64> { (0..d).map(|k| if k == i { ONE } else { C64::new(0.0, 0.0) }).collect() };
    let mut best: Best<(Vec<C64>, Vec<C64>)> = Best::new(4);
    for i in 0..d1 {
        for k in 0..d2 {
            let (v, w) = (basis(d1, i), basis(d2, k));
            let value = product_expectation(c, &v, &w);
            best.offer(value, || (v, w));
        }
    }
    let mut rng = rng_for(seed, 0);
    for _ in 0..budget {
        let (v, w) = (random_unit(d1, &mut rng), random_unit(d2, &mut rng));
        let value = product_expectation(c, &v, &w);
        best.offer(value, || (v, w));
    }
    let mut winner: Option<ProductWitness> = None;
    for (value, (v, w)) in std::mem::take(&mut best.items) {
        let (v2, w2, polished) = see_saw(c, (d1, d2), v.clone(), 50, tol)?;
        let cand = if polished < value {
            ProductWitness { v: v2, w: w2, value: polished }
        } else {
            ProductWitness { v, w, value }
        };
        if winner.as_ref().is_none_or(|b| cand.value < b.value) {
            winner = Some(cand);
        }
    }
    Ok(winner.filter(|w| w.value < -tol.eig_zero))
}

// ---------------------------------------------------------------------------
// Grid scans

/// Parameterizations available to scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScanFamily {
    /// Unital U(n) map; parameters `n`, `lambda`.
    #[serde(rename = "U")]
    Unitary,
    /// Unital DU(2) map; parameters `c12`, `c21`, `lambda`, `lambda_im`.
    #[serde(rename = "DU2")]
    Du2,
    /// Permutation-symmetric DU(3) map; parameters `p`, `lambda`, `lambda_im`.
    #[serde(rename = "DU3S")]
    Du3Symmetric,
    /// Unital product map; parameters `n1`, `n2`, `l01`, `l10`, `l11`.
    #[serde(rename = "PROD")]
    Product,
}

impl ScanFamily {
    fn defaults(self) -> &'static [(&'static str, f64)] {
        match self {
            ScanFamily::Unitary => &[("n", 2.0), ("lambda", 0.0)],
            ScanFamily::Du2 => &[("c12", 0.0), ("c21", 0.0), ("lambda", 0.0), ("lambda_im", 0.0)],
            ScanFamily::Du3Symmetric => &[("p", 1.0), ("lambda", 0.0), ("lambda_im", 0.0)],
            ScanFamily::Product => &[("n1", 2.0), ("n2", 2.0), ("l01", 0.0), ("l10", 0.0), ("l11", 0.0)],
        }
    }

    fn predicates(self) -> &'static [&'static str] {
        match self {
            ScanFamily::Unitary => &["schwarz_u", "cp_u", "ppt_eb_u", "eb_u", "cp_numeric", "ppt_numeric"],
            ScanFamily::Du2 => &["schwarz_du2", "cp_du2", "schwarz_necessary_du", "cp_du", "ppt_du", "eb_sufficient", "cp_numeric", "ppt_numeric"],
            ScanFamily::Du3Symmetric => &["schwarz_du3s", "cp_du3s", "schwarz_necessary_du", "cp_du", "ppt_du", "eb_sufficient", "cp_numeric", "ppt_numeric"],
            ScanFamily::Product => &["schwarz_necessary_product", "cp_product_small", "cp_numeric", "ppt_numeric"],
        }
    }
}

/// One swept parameter: `lo, lo + step, …` up to `hi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Axis {
    /// Grid coordinates, snapped to multiples of 1e-12 so that accumulated roundoff does not
    /// move grid points off exact boundaries such as `−0.5`.
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|k| ((self.lo + k as f64 * self.step) * 1e12).round() / 1e12).collect()
    }
}

fn default_true() -> bool {
    true
}

fn default_budget() -> usize {
    2000
}

fn default_refine() -> usize {
    300
}

/// A parameter sweep: the cartesian grid over `axes` (last axis fastest) with the other
/// parameters taken from `fixed` or the family defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub family: ScanFamily,
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
    #[serde(default)]
    pub axes: Vec<Axis>,
    pub predicates: Vec<String>,
    /// Run the Schwarz falsifier at every point (`oracle_witness` column).
    #[serde(default = "default_true")]
    pub oracle: bool,
    #[serde(default = "default_budget")]
    pub oracle_budget: usize,
    #[serde(default = "default_refine")]
    pub oracle_refine: usize,
    #[serde(default)]
    pub seed: u64,
}

const MAX_GRID_POINTS: usize = 20_000_000;

impl ScanSpec {
    pub fn validate(&self) -> Result<()> {
        let known: Vec<&str> = self.family.defaults().iter().map(|(k, _)| *k).collect();
        if self.axes.len() > 3 {
            return Err(Error::SpecInvalid(format!("at most 3 axes allowed, got {}", self.axes.len())));
        }
        let mut seen = Vec::new();
        for a in &self.axes {
            if !known.contains(&a.name.as_str()) {
                return Err(Error::SpecInvalid(format!("unknown axis {:?}; expected one of {known:?}", a.name)));
            }
            if seen.contains(&a.name) {
                return Err(Error::SpecInvalid(format!("axis {:?} listed twice", a.name)));
            }
            seen.push(a.name.clone());
            if !(a.step > 0.0 && a.step.is_finite()) {
                return Err(Error::SpecInvalid(format!("axis {:?}: step must be positive", a.name)));
            }
            if !(a.lo.is_finite() && a.hi.is_finite() && a.hi >= a.lo) {
                return Err(Error::SpecInvalid(format!("axis {:?}: need finite lo <= hi", a.name)));
            }
        }
        for k in self.fixed.keys() {
            if !known.contains(&k.as_str()) {
                return Err(Error::SpecInvalid(format!("unknown fixed parameter {k:?}; expected one of {known:?}")));
            }
        }
        let allowed = self.family.predicates();
        for p in &self.predicates {
            if !allowed.contains(&p.as_str()) {
                return Err(Error::SpecInvalid(format!("predicate {p:?} not available; expected one of {allowed:?}")));
            }
        }
        let total = self.axes.iter().try_fold(1usize, |acc, a| acc.checked_mul(a.values().len()));
        match total {
            Some(t) if t <= MAX_GRID_POINTS => Ok(()),
            _ => Err(Error::SpecInvalid(format!("grid exceeds {MAX_GRID_POINTS} points"))),
        }
    }
}

/// One grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub coords: Vec<f64>,
    pub verdicts: Vec<RegionVerdict>,
    pub oracle_witness: Option<bool>,
}

/// Scan output in grid order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanTable {
    pub axes: Vec<String>,
    pub predicates: Vec<String>,
    pub rows: Vec<ScanRow>,
}

impl ScanTable {
    pub fn header(&self) -> Vec<String> {
        let mut h = self.axes.clone();
        for p in &self.predicates {
            h.push(format!("{p}_member"));
            h.push(format!("{p}_margin"));
        }
        if self.rows.first().is_some_and(|r| r.oracle_witness.is_some()) {
            h.push("oracle_witness".into());
        }
        h
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header())?;
        for row in &self.rows {
            let mut rec: Vec<String> = row.coords.iter().map(|&x| format_float(x)).collect();
            for v in &row.verdicts {
                rec.push(if v.member { "1" } else { "0" }.into());
                rec.push(format_float(v.margin));
            }
            if let Some(w) = row.oracle_witness {
                rec.push(if w { "1" } else { "0" }.into());
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn integer_param(name: &str, v: f64) -> Result<usize> {
    if v.fract() != 0.0 || !(2.0..=64.0).contains(&v) {
        return Err(Error::SpecInvalid(format!("{name} must be an integer in [2, 64], got {v}")));
    }
    Ok(v as usize)
}

/// A scan grid point resolved into a concrete map.
struct Point {
    values: BTreeMap<&'static str, f64>,
    family: Family,
}

fn build_point(fam: ScanFamily, values: BTreeMap<&'static str, f64>) -> Result<Point> {
    let g = |k: &str| values[k];
    let family: Family = match fam {
        ScanFamily::Unitary => UnitaryParams::unital(integer_param("n", g("n"))?, g("lambda"))?.into(),
        ScanFamily::Du2 => DiagonalParams::du2(g("c12"), g("c21"), C64::new(g("lambda"), g("lambda_im"))).into(),
        ScanFamily::Du3Symmetric => DiagonalParams::du3_symmetric(g("p"), C64::new(g("lambda"), g("lambda_im"))).into(),
        ScanFamily::Product => {
            ProductParams::unital(integer_param("n1", g("n1"))?, integer_param("n2", g("n2"))?, g("l01"), g("l10"), g("l11"))?.into()
        }
    };
    Ok(Point { values, family })
}

fn eval_predicate(name: &str, pt: &Point, choi: &mut Option<ChoiMatrix>, tol: &Tolerance) -> Result<RegionVerdict> {
    let g = |k: &str| pt.values[k];
    let mut choi_of = |f: &Family| -> Result<ChoiMatrix> {
        if choi.is_none() {
            *choi = Some(choi_generic(f, f.dim())?);
        }
        Ok(choi.clone().expect("just built"))
    };
    match (name, &pt.family) {
        ("schwarz_u", Family::Unitary(p)) => schwarz_u(p.n, p.lambda),
        ("cp_u", Family::Unitary(p)) => cp_u(p.n, p.lambda),
        ("ppt_eb_u", Family::Unitary(p)) => ppt_eb_u(p.n, p.lambda),
        ("eb_u", Family::Unitary(p)) => eb_u(p.n, p.lambda),
        ("schwarz_du2", _) => Ok(classify_du2(g("c12"), g("c21"), C64::new(g("lambda"), g("lambda_im"))).0),
        ("cp_du2", _) => Ok(classify_du2(g("c12"), g("c21"), C64::new(g("lambda"), g("lambda_im"))).1),
        ("schwarz_du3s", _) => Ok(classify_du3_symmetric(g("p"), C64::new(g("lambda"), g("lambda_im")))?.0),
        ("cp_du3s", _) => Ok(classify_du3_symmetric(g("p"), C64::new(g("lambda"), g("lambda_im")))?.1),
        ("schwarz_necessary_du", Family::Diagonal(p)) => schwarz_necessary_du(p, tol),
        ("cp_du", Family::Diagonal(p)) => cp_du(p, tol),
        ("ppt_du", Family::Diagonal(p)) => ppt_du(p, tol),
        ("eb_sufficient", Family::Diagonal(p)) => eb_sufficient_du(p, tol),
        ("schwarz_necessary_product", Family::Product(p)) => schwarz_necessary_product(p, tol),
        ("cp_product_small", Family::Product(p)) => cp_product_small(p, tol),
        ("cp_numeric", f) => cp_numeric(&choi_of(f)?, tol),
        ("ppt_numeric", f) => ppt_numeric(&choi_of(f)?, tol),
        (other, _) => Err(Error::SpecInvalid(format!("predicate {other:?} does not apply here"))),
    }
}

/// Evaluates the requested predicates (and optionally the falsifier) on every grid point.
/// Points are independent and processed in parallel; row order and contents depend only
/// on `spec`.
pub fn region_scan(spec: &ScanSpec, tol: &Tolerance) -> Result<ScanTable> {
    spec.validate()?;
    let axis_values: Vec<Vec<f64>> = spec.axes.iter().map(Axis::values).collect();
    let total: usize = axis_values.iter().map(Vec::len).product();
    let defaults = spec.family.defaults();
    let rows = (0..total)
        .into_par_iter()
        .map(|index| -> Result<ScanRow> {
            let mut coords = vec![0.0; axis_values.len()];
            let mut rem = index;
            for (a, vals) in axis_values.iter().enumerate().rev() {
                coords[a] = vals[rem % vals.len()];
                rem /= vals.len();
            }
            let mut values: BTreeMap<&'static str, f64> = BTreeMap::new();
            for &(k, d) in defaults {
                let v = spec.axes.iter().position(|a| a.name == k).map(|a| coords[a]).or_else(|| spec.fixed.get(k).copied()).unwrap_or(d);
                values.insert(k, v);
            }
            let pt = build_point(spec.family, values)?;
            let mut choi = None;
            let verdicts = spec.predicates.iter().map(|p| eval_predicate(p, &pt, &mut choi, tol)).collect::<Result<Vec<_>>>()?;
            let oracle_witness = if spec.oracle {
                let opts = FalsifyOptions {
                    budget: spec.oracle_budget,
                    seed: spec.seed,
                    stream: index as u64,
                    refine_steps: spec.oracle_refine,
                    tol: *tol,
                };
                Some(schwarz_falsify(&pt.family, &opts)?.is_some())
            } else {
                None
            };
            Ok(ScanRow { coords, verdicts, oracle_witness })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanTable { axes: spec.axes.iter().map(|a| a.name.clone()).collect(), predicates: spec.predicates.clone(), rows })
}
