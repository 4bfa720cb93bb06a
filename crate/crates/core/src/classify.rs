//! Region predicates: Schwarz, CP, PPT and EB membership with signed margins.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::channels::{validate, DiagonalParams, Family, LinearMap, ProductParams, StructuralFlags, UnitaryParams, EXACT_SLACK};
use crate::choi::{choi_du_reduced, choi_generic, product_choi_eigs, ChoiMatrix};
use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, partial_transpose, ComplexMatrix, Factor, Tolerance, C64};

/// How much a verdict can be trusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Exact closed-form characterization.
    Analytic,
    /// Eigenvalue computation with the shared tolerance band.
    Numeric,
    /// `member = false` disproves the property; `member = true` is inconclusive.
    NecessaryOnly,
    /// `member = true` proves the property; `member = false` is inconclusive.
    SufficientOnly,
}

/// Membership in a region with the tightest slack.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionVerdict {
    pub member: bool,
    /// Minimum slack over the defining inequalities; negative means violated.
    pub margin: f64,
    /// Name of the inequality attaining the margin.
    pub binding: String,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl RegionVerdict {
    /// `|margin| < eig_zero`: too close to the boundary to call numerically.
    pub fn on_boundary(&self, tol: &Tolerance) -> bool {
        self.margin.abs() < tol.eig_zero
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// One inequality `value ≥ 0`. Eigenvalue-based slacks are accepted down to `-eig_zero`.
#[derive(Debug, Clone)]
pub(crate) struct Slack {
    name: String,
    value: f64,
    numeric: bool,
}

pub(crate) fn exact(name: impl Into<String>, value: f64) -> Slack {
    Slack { name: name.into(), value, numeric: false }
}

pub(crate) fn spectral(name: impl Into<String>, value: f64) -> Slack {
    Slack { name: name.into(), value, numeric: true }
}

pub(crate) fn verdict(slacks: Vec<Slack>, method: Method, tol: &Tolerance) -> RegionVerdict {
    let member = slacks.iter().all(|s| {
        let floor = if s.numeric { -tol.eig_zero } else { 0.0 };
        s.value >= floor
    });
    let worst = slacks
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("at least one inequality");
    RegionVerdict { member, margin: worst.value, binding: worst.name.clone(), method, note: None }
}

/// Conjunction of several verdicts; the weakest method wins.
pub fn conjunction(parts: &[&RegionVerdict]) -> RegionVerdict {
    let member = parts.iter().all(|v| v.member);
    let worst = parts.iter().min_by(|a, b| a.margin.total_cmp(&b.margin)).expect("nonempty");
    let method = if parts.iter().any(|v| v.method == Method::NecessaryOnly) {
        Method::NecessaryOnly
    } else if parts.iter().any(|v| v.method == Method::SufficientOnly) {
        Method::SufficientOnly
    } else if parts.iter().any(|v| v.method == Method::Numeric) {
        Method::Numeric
    } else {
        Method::Analytic
    };
    RegionVerdict { member, margin: worst.margin, binding: worst.binding.clone(), method, note: None }
}

fn real_param(name: &str, z: C64) -> Result<f64> {
    if z.im.abs() > EXACT_SLACK {
        Err(Error::NonRealParameter(format!("{name} = {}{:+}i", z.re, z.im)))
    } else {
        Ok(z.re)
    }
}

fn require_valid(flags: &StructuralFlags, need_unital: bool) -> Result<()> {
    if !flags.hermiticity_preserving || (need_unital && !flags.unital) {
        return Err(Error::StructurallyInvalid(flags.details.join("; ")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Unitary family (real λ, σ = 1)

/// Schwarz iff `λ ∈ [−1/n, 1]`.
pub fn schwarz_u(n: usize, lambda: impl Into<C64>) -> Result<RegionVerdict> {
    let l = real_param("lambda", lambda.into())?;
    let nf = n as f64;
    Ok(verdict(vec![exact("lambda >= -1/n", l + 1.0 / nf), exact("lambda <= 1", 1.0 - l)], Method::Analytic, &Tolerance::default()))
}

/// CP iff `λ ∈ [−1/(n²−1), 1]`.
pub fn cp_u(n: usize, lambda: impl Into<C64>) -> Result<RegionVerdict> {
    let l = real_param("lambda", lambda.into())?;
    let s = (n * n - 1) as f64;
    Ok(verdict(vec![exact("lambda >= -1/(n^2-1)", l + 1.0 / s), exact("lambda <= 1", 1.0 - l)], Method::Analytic, &Tolerance::default()))
}

/// Positivity of the partially transposed Choi matrix (`T∘Φ` completely positive):
/// `λ ∈ [−1/(n−1), 1/(n+1)]`.
///
/// This interval does not imply complete positivity: on `[−1/(n−1), −1/(n²−1))` the map
/// fails to be CP and therefore is neither a PPT channel nor entanglement breaking.
/// [`eb_u`] gives the exact PPT-channel / EB region.
pub fn ppt_eb_u(n: usize, lambda: impl Into<C64>) -> Result<RegionVerdict> {
    let l = real_param("lambda", lambda.into())?;
    let nf = n as f64;
    Ok(verdict(
        vec![exact("lambda >= -1/(n-1)", l + 1.0 / (nf - 1.0)), exact("lambda <= 1/(n+1)", 1.0 / (nf + 1.0) - l)],
        Method::Analytic,
        &Tolerance::default(),
    ))
}

/// Exact entanglement-breaking region, which coincides with the PPT-channel region:
/// CP together with isotropic fidelity `F = (1−λ)/n² + λ ≤ 1/n`, i.e.
/// `λ ∈ [−1/(n²−1), 1/(n+1)]`.
pub fn eb_u(n: usize, lambda: impl Into<C64>) -> Result<RegionVerdict> {
    let l = real_param("lambda", lambda.into())?;
    let nf = n as f64;
    Ok(verdict(
        vec![exact("lambda >= -1/(n^2-1)", l + 1.0 / (nf * nf - 1.0)), exact("fidelity <= 1/n", 1.0 / (nf + 1.0) - l)],
        Method::Analytic,
        &Tolerance::default(),
    ))
}

/// Isotropic fidelity `⟨v, ρ v⟩` of the normalized Choi state of a unital U(n) map,
/// with `v` the normalized maximally entangled vector.
pub fn u_fidelity(n: usize, lambda: f64) -> f64 {
    let nf = n as f64;
    (1.0 - lambda) / (nf * nf) + lambda
}

// ---------------------------------------------------------------------------
// Diagonal-unitary family

/// Necessary conditions for the Schwarz property of a unital DU(n) map:
/// `0 ≤ c_kj ≤ 1` (`k ≠ j`), `c_jj ≥ |λ_ij|²`, and for every row `i` and pair `j < k`
/// of other indices positivity of the 2×2 gap block produced by `X = E_ij + E_ik`:
///
/// ```text
/// [ c_jj + c_jk − |λ_ij|²        λ_jk − conj(λ_ij)·λ_ik ]
/// [ conj(…)                      c_kj + c_kk − |λ_ik|²  ]  ⪰ 0
/// ```
pub fn schwarz_necessary_du(p: &DiagonalParams, tol: &Tolerance) -> Result<RegionVerdict> {
    require_valid(&p.validate(), true)?;
    let n = p.n();
    let c = |k: usize, j: usize| p.c(k, j).re;
    let mut slacks = Vec::new();
    for k in 0..n {
        for j in 0..n {
            if k != j {
                slacks.push(exact(format!("c_{}{} >= 0", k + 1, j + 1), c(k, j)));
                slacks.push(exact(format!("c_{}{} <= 1", k + 1, j + 1), 1.0 - c(k, j)));
                slacks.push(exact(format!("c_{0}{0} >= |lambda_{1}{0}|^2", j + 1, k + 1), c(j, j) - p.lambda(k, j).norm_sqr()));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in (j + 1)..n {
                if i == j || i == k {
                    continue;
                }
                let top = c(j, j) + c(j, k) - p.lambda(i, j).norm_sqr();
                let bottom = c(k, j) + c(k, k) - p.lambda(i, k).norm_sqr();
                let off = p.lambda(j, k) - p.lambda(i, j).conj() * p.lambda(i, k);
                let tag = format!("row {} pair ({},{})", i + 1, j + 1, k + 1);
                slacks.push(exact(format!("{tag}: first diagonal"), top));
                slacks.push(exact(format!("{tag}: second diagonal"), bottom));
                slacks.push(exact(format!("{tag}: determinant"), top * bottom - off.norm_sqr()));
            }
        }
    }
    let v = verdict(slacks, Method::NecessaryOnly, tol);
    Ok(if n > 2 { v.with_note("necessary conditions only: member=true does not certify the Schwarz property") } else { v })
}

/// Complete positivity: `c_ij ≥ 0` for `i ≠ j` and the reduced block `Σ c_ii E_ii + Σ λ_ij E_ij ⪰ 0`.
pub fn cp_du(p: &DiagonalParams, tol: &Tolerance) -> Result<RegionVerdict> {
    require_valid(&p.validate(), false)?;
    let r = choi_du_reduced(p);
    let n = p.n();
    let mut slacks = Vec::new();
    let mut idx = 0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                slacks.push(exact(format!("c_{}{} >= 0", i + 1, j + 1), r.offdiag_eigs[idx].re));
                idx += 1;
            }
        }
    }
    slacks.push(spectral("reduced block PSD", min_eigenvalue(&r.reduced, tol)?));
    Ok(verdict(slacks, Method::Analytic, tol))
}

/// Positivity of the partially transposed Choi matrix: `c_ii ≥ 0`, and for each pair
/// `i < j` the block `[[c_ji, λ_ij], [λ_ji, c_ij]] ⪰ 0`.
pub fn pt_du(p: &DiagonalParams, tol: &Tolerance) -> Result<RegionVerdict> {
    require_valid(&p.validate(), false)?;
    let n = p.n();
    let c = |k: usize, j: usize| p.c(k, j).re;
    let mut slacks = Vec::new();
    for i in 0..n {
        slacks.push(exact(format!("c_{0}{0} >= 0", i + 1), c(i, i)));
        for j in (i + 1)..n {
            slacks.push(exact(format!("c_{}{} >= 0", i + 1, j + 1), c(i, j)));
            slacks.push(exact(format!("c_{}{} >= 0", j + 1, i + 1), c(j, i)));
            slacks.push(exact(
                format!("c_{0}{1} c_{1}{0} >= |lambda_{0}{1}|^2", i + 1, j + 1),
                c(i, j) * c(j, i) - p.lambda(i, j).norm_sqr(),
            ));
        }
    }
    Ok(verdict(slacks, Method::Analytic, tol))
}

/// PPT channel: completely positive with positive partial transpose.
pub fn ppt_du(p: &DiagonalParams, tol: &Tolerance) -> Result<RegionVerdict> {
    Ok(conjunction(&[&cp_du(p, tol)?, &pt_du(p, tol)?]))
}

/// Sufficient test for entanglement breaking. The Choi matrix splits into two-qubit
/// X-shaped blocks, one per pair `i < j`, after sharing each `c_jj` among its pairs;
/// every block is separable when
/// `c_ij ≥ 0` (`i ≠ j`), `c_jj ≥ Σ_{i≠j} |λ_ij|` and `c_ij·c_ji ≥ |λ_ij|²`.
pub fn eb_sufficient_du(p: &DiagonalParams, tol: &Tolerance) -> Result<RegionVerdict> {
    require_valid(&p.validate(), false)?;
    let n = p.n();
    let c = |k: usize, j: usize| p.c(k, j).re;
    let mut slacks = Vec::new();
    for j in 0..n {
        let load: f64 = (0..n).filter(|&i| i != j).map(|i| p.lambda(i, j).norm()).sum();
        slacks.push(exact(format!("c_{0}{0} >= sum_i |lambda_i{0}|", j + 1), c(j, j) - load));
        for i in 0..n {
            if i != j {
                slacks.push(exact(format!("c_{}{} >= 0", i + 1, j + 1), c(i, j)));
            }
            if i < j {
                slacks.push(exact(
                    format!("c_{0}{1} c_{1}{0} >= |lambda_{0}{1}|^2", i + 1, j + 1),
                    c(i, j) * c(j, i) - p.lambda(i, j).norm_sqr(),
                ));
            }
        }
    }
    let v = verdict(slacks, Method::SufficientOnly, tol);
    Ok(if v.member { v } else { v.with_note("sufficient test failed: entanglement breaking undecided") })
}

/// Schwarz and CP verdicts for the unital DU(2) map with leakages `c12`, `c21`
/// (`c11 = 1 − c12`, `c22 = 1 − c21`) and coherence `λ`.
/// Schwarz iff `0 ≤ c12, c21 ≤ 1` and `c11, c22 ≥ |λ|²`; CP iff additionally
/// the weights are nonnegative and `c11·c22 ≥ |λ|²`.
pub fn classify_du2(c12: f64, c21: f64, lambda: C64) -> (RegionVerdict, RegionVerdict) {
    let tol = Tolerance::default();
    let (c11, c22) = (1.0 - c12, 1.0 - c21);
    let l2 = lambda.norm_sqr();
    let schwarz = verdict(
        vec![
            exact("c_12 >= 0", c12),
            exact("c_12 <= 1", 1.0 - c12),
            exact("c_21 >= 0", c21),
            exact("c_21 <= 1", 1.0 - c21),
            exact("c_11 >= |lambda|^2", c11 - l2),
            exact("c_22 >= |lambda|^2", c22 - l2),
        ],
        Method::Analytic,
        &tol,
    );
    let cp = verdict(
        vec![
            exact("c_12 >= 0", c12),
            exact("c_21 >= 0", c21),
            exact("c_11 >= 0", c11),
            exact("c_22 >= 0", c22),
            exact("c_11 c_22 >= |lambda|^2", c11 * c22 - l2),
        ],
        Method::Analytic,
        &tol,
    );
    (schwarz, cp)
}

/// Closed-form candidate regions for the permutation-symmetric DU(3) map:
/// Schwarz `|λ|² ≤ ½·min(p, 1−p)`, CP `|λ| ≤ min(p, 1−p)`.
///
/// These formulas are not certified. They exclude the identity channel (`p = 1`, `λ = 1`),
/// which is Schwarz and CP, and the exact CP region for real `λ` is `−p/2 ≤ λ ≤ p`.
/// Use [`cp_du`] for certified complete positivity and the oracle for Schwarz falsification.
pub fn classify_du3_symmetric(p: f64, lambda: C64) -> Result<(RegionVerdict, RegionVerdict)> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ParameterOutOfRange(format!("p = {p} is outside [0, 1]")));
    }
    let tol = Tolerance::default();
    let m = p.min(1.0 - p);
    let note = "closed-form candidate region; not certified";
    let schwarz = verdict(vec![exact("|lambda|^2 <= min(p,1-p)/2", 0.5 * m - lambda.norm_sqr())], Method::Analytic, &tol).with_note(note);
    let cp = verdict(vec![exact("|lambda| <= min(p,1-p)", m - lambda.norm())], Method::Analytic, &tol).with_note(note);
    Ok((schwarz, cp))
}

// ---------------------------------------------------------------------------
// Product family

fn require_unital_real(p: &ProductParams) -> Result<[f64; 4]> {
    let flags = p.validate();
    require_valid(&flags, true)?;
    Ok(p.lam.map(|z| z.re))
}

/// Necessary conditions for the Schwarz property of a unital product-family map, all
/// scaled by `n1·n2`. With `a, b, c, d` from [`ProductParams::constants`]:
///
/// * `a`, `a+c`, `a+b`, `a+b+c+d(1−d)` nonnegative;
/// * `a+b(1−b)` and `a+b(1−b)+c+d(1−2b−d)` nonnegative;
/// * `a+c(1−c)` and `a+b+c(1−c)+d(1−2c−d)` nonnegative;
/// * `ν(1−ν) ≥ 0`, i.e. `ν ∈ [0, 1]`, for `ν ∈ {a, a+c, a+b, a+b+c+d}`.
///
/// At `(2, 2)` the face `a+b+c+d(1−d)` reads `1 + λ01 + λ10 + λ11 − 4λ11²` and at `(2, 3)`
/// it reads `1 + 2λ01 + λ10 + 2λ11 − 6λ11²`.
pub fn schwarz_necessary_product(p: &ProductParams, tol: &Tolerance) -> Result<RegionVerdict> {
    require_unital_real(p)?;
    let k = p.constants();
    let (a, b, c, d) = (k.a.re, k.b.re, k.c.re, k.d.re);
    let s = (p.n1 * p.n2) as f64;
    let interval = |nu: f64| nu * (1.0 - nu);
    let slacks = vec![
        exact("a >= 0", s * a),
        exact("a+c >= 0", s * (a + c)),
        exact("a+b >= 0", s * (a + b)),
        exact("a+b+c+d(1-d) >= 0", s * (a + b + c + d * (1.0 - d))),
        exact("a+b(1-b) >= 0", s * (a + b * (1.0 - b))),
        exact("a+b(1-b)+c+d(1-2b-d) >= 0", s * (a + b * (1.0 - b) + c + d * (1.0 - 2.0 * b - d))),
        exact("a+c(1-c) >= 0", s * (a + c * (1.0 - c))),
        exact("a+b+c(1-c)+d(1-2c-d) >= 0", s * (a + b + c * (1.0 - c) + d * (1.0 - 2.0 * c - d))),
        exact("a in [0,1]", s * interval(a)),
        exact("a+c in [0,1]", s * interval(a + c)),
        exact("a+b in [0,1]", s * interval(a + b)),
        exact("a+b+c+d in [0,1]", s * interval(a + b + c + d)),
    ];
    Ok(verdict(slacks, Method::NecessaryOnly, tol).with_note("necessary conditions only: member=true does not certify the Schwarz property"))
}

/// Complete positivity of a unital real product-family map via the four closed-form
/// Choi eigenvalue families; margin is the smallest eigenvalue times `n1·n2`.
/// Outside factor sizes `{2, 3}` the formulas are extrapolated, so the verdict falls back
/// to a numerical Choi spectrum.
pub fn cp_product_small(p: &ProductParams, tol: &Tolerance) -> Result<RegionVerdict> {
    require_unital_real(p)?;
    let s = (p.n1 * p.n2) as f64;
    let small = (2..=3).contains(&p.n1) && (2..=3).contains(&p.n2);
    if !small {
        let choi = choi_generic(p, p.dim())?;
        let v = cp_numeric(&choi, tol)?;
        return Ok(RegionVerdict { margin: v.margin * s, ..v }.with_note("closed-form spectrum unverified for these factor sizes; numeric Choi spectrum used"));
    }
    let names = ["eigenvalue family 1 (x1)", "eigenvalue family 2 (x n1^2-1)", "eigenvalue family 3 (x n2^2-1)", "eigenvalue family 4 (x (n1^2-1)(n2^2-1))"];
    let spec = product_choi_eigs(p)?;
    let slacks = spec.families.iter().zip(names).map(|(f, name)| exact(name, f.value * s)).collect();
    Ok(verdict(slacks, Method::Analytic, tol))
}

// ---------------------------------------------------------------------------
// Numerical Choi tests

/// Complete positivity from the Choi spectrum.
pub fn cp_numeric(choi: &ChoiMatrix, tol: &Tolerance) -> Result<RegionVerdict> {
    let min = min_eigenvalue(&choi.matrix, tol)?;
    Ok(verdict(vec![spectral("Choi matrix PSD", min)], Method::Numeric, tol))
}

/// Positivity of the partially transposed Choi matrix (`T∘Φ` completely positive).
pub fn ppt_numeric(choi: &ChoiMatrix, tol: &Tolerance) -> Result<RegionVerdict> {
    choi.matrix.require_hermitian(tol)?;
    let pt = partial_transpose(&choi.matrix, (choi.dim_in, choi.dim_out), Factor::Second)?;
    let min = min_eigenvalue(&pt, tol)?;
    Ok(verdict(vec![spectral("partial transpose PSD", min)], Method::Numeric, tol))
}

/// Separability certificate for any Choi matrix: with `ρ = C / tr C` on a space of total
/// dimension `D`, `‖D·ρ − I‖₂ ≤ 1` places `ρ` inside a ball of separable states around
/// the maximally mixed state. Margin is `1 − ‖D·ρ − I‖₂`.
pub fn eb_ball_certificate(choi: &ChoiMatrix, tol: &Tolerance) -> Result<RegionVerdict> {
    choi.matrix.require_hermitian(tol)?;
    let tr = choi.matrix.trace().re;
    if tr <= 0.0 {
        return Ok(verdict(vec![exact("positive trace", tr)], Method::SufficientOnly, tol));
    }
    let d = choi.matrix.rows() as f64;
    let dev = &choi.matrix.scale(C64::new(d / tr, 0.0)) - &ComplexMatrix::identity(choi.matrix.rows());
    let v = verdict(vec![exact("||D rho - I||_2 <= 1", 1.0 - dev.frobenius_norm())], Method::SufficientOnly, tol);
    Ok(if v.member { v } else { v.with_note("outside the separable ball: entanglement breaking undecided") })
}

/// Entanglement-breaking test per family: exact for U(n), sufficient for DU(n).
pub fn eb_sufficient(params: &Family, tol: &Tolerance) -> Result<RegionVerdict> {
    match params {
        Family::Unitary(p) => {
            require_valid(&p.validate(), true)?;
            eb_u(p.n, p.lambda)
        }
        Family::Diagonal(p) => eb_sufficient_du(p, tol),
        Family::Product(_) => Err(Error::UnsupportedFamily(
            "no analytic entanglement-breaking test for the product family; use eb_ball_certificate".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// Reports

/// Everything known about one channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassReport {
    pub family: String,
    pub params: Family,
    pub structural: StructuralFlags,
    /// Headline membership flags (`schwarz`, `cp`, `ppt`, `eb`, `ppt_eb`).
    pub flags: BTreeMap<String, bool>,
    /// Every verdict computed, keyed by test name.
    pub verdicts: BTreeMap<String, RegionVerdict>,
    pub notes: Vec<String>,
}

/// Runs every applicable test on a channel.
pub fn classify(params: &Family, tol: &Tolerance) -> Result<ClassReport> {
    let structural = validate(params);
    let mut verdicts = BTreeMap::new();
    let mut flags = BTreeMap::new();
    let mut notes = Vec::new();
    let choi = choi_generic(params, params.dim())?;

    if structural.hermiticity_preserving {
        verdicts.insert("cp_numeric".to_string(), cp_numeric(&choi, tol)?);
        verdicts.insert("ppt_numeric".to_string(), ppt_numeric(&choi, tol)?);
    }
    if !(structural.unital && structural.hermiticity_preserving) {
        notes.push("map is not unital and Hermiticity-preserving: only numeric Choi tests apply".into());
        if let Some(v) = verdicts.get("cp_numeric") {
            flags.insert("cp".into(), v.member);
        }
        return Ok(ClassReport { family: params.name().into(), params: params.clone(), structural, flags, verdicts, notes });
    }

    match params {
        Family::Unitary(p) => classify_unitary(p, &mut verdicts)?,
        Family::Diagonal(p) => {
            if p.n() == 2 {
                let (s, c) = classify_du2(p.c(0, 1).re, p.c(1, 0).re, p.lambda(0, 1));
                verdicts.insert("schwarz".into(), s);
                verdicts.insert("cp".into(), c);
            } else {
                verdicts.insert("schwarz".into(), schwarz_necessary_du(p, tol)?);
                verdicts.insert("cp".into(), cp_du(p, tol)?);
                if let Some((sp, sl)) = p.as_du3_symmetric() {
                    if (0.0..=1.0).contains(&sp) {
                        let (s, c) = classify_du3_symmetric(sp, sl)?;
                        verdicts.insert("schwarz_symmetric_closed_form".into(), s);
                        verdicts.insert("cp_symmetric_closed_form".into(), c);
                    }
                }
            }
            verdicts.insert("partial_transpose".into(), pt_du(p, tol)?);
            let ppt = conjunction(&[&cp_du(p, tol)?, &verdicts["partial_transpose"]]);
            verdicts.insert("ppt".into(), ppt);
            verdicts.insert("eb".into(), eb_sufficient_du(p, tol)?);
        }
        Family::Product(p) => {
            verdicts.insert("schwarz".into(), schwarz_necessary_product(p, tol)?);
            let cp = cp_product_small(p, tol)?;
            let ppt = conjunction(&[&cp, &verdicts["ppt_numeric"]]);
            verdicts.insert("cp".into(), cp);
            verdicts.insert("ppt".into(), ppt);
            verdicts.insert("eb".into(), eb_ball_certificate(&choi, tol)?);
        }
    }
    for key in ["schwarz", "cp", "ppt", "eb"] {
        if let Some(v) = verdicts.get(key) {
            flags.insert(key.to_string(), v.member);
        }
    }
    if let Family::Unitary(_) = params {
        flags.insert("ppt_eb".into(), verdicts["eb"].member);
    }
    for (name, v) in &verdicts {
        if matches!(v.method, Method::NecessaryOnly | Method::SufficientOnly) {
            notes.push(format!("{name}: {:?} test", v.method).to_lowercase());
        }
    }
    Ok(ClassReport { family: params.name().into(), params: params.clone(), structural, flags, verdicts, notes })
}

fn classify_unitary(p: &UnitaryParams, verdicts: &mut BTreeMap<String, RegionVerdict>) -> Result<()> {
    verdicts.insert("schwarz".into(), schwarz_u(p.n, p.lambda)?);
    let cp = cp_u(p.n, p.lambda)?;
    let pt = ppt_eb_u(p.n, p.lambda)?;
    verdicts.insert("ppt".into(), conjunction(&[&cp, &pt]));
    verdicts.insert("cp".into(), cp);
    verdicts.insert("partial_transpose".into(), pt);
    verdicts.insert("eb".into(), eb_u(p.n, p.lambda)?);
    Ok(())
}
