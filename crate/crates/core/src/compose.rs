//! Composition and powers within a family, and the PPT-squared pipeline.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{DiagonalParams, Family, ProductParams, UnitaryParams};
use crate::choi::choi_generic;
use crate::classify::{
    conjunction, cp_product_small, cp_u, eb_ball_certificate, eb_sufficient_du, eb_u, ppt_du, ppt_eb_u, ppt_numeric,
    schwarz_necessary_product, RegionVerdict,
};
use crate::error::{Error, Result};
use crate::linalg::{Tolerance, C64, ONE};

/// Parameters of `outer ∘ inner` (apply `inner` first).
pub fn compose(outer: &Family, inner: &Family) -> Result<Family> {
    match (outer, inner) {
        (Family::Unitary(p), Family::Unitary(q)) => {
            same_dim(p.n, q.n)?;
            Ok(UnitaryParams::new(p.n, p.sigma * q.sigma, p.lambda * q.lambda)?.into())
        }
        (Family::Diagonal(p), Family::Diagonal(q)) => {
            same_dim(p.n(), q.n())?;
            let n = p.n();
            let offdiag = crate::linalg::ComplexMatrix::from_fn(n, n, |i, j| p.lambda(i, j) * q.lambda(i, j));
            let mixing = p.mixing().matmul(q.mixing())?;
            Ok(DiagonalParams::new(offdiag, mixing)?.into())
        }
        (Family::Product(p), Family::Product(q)) => {
            if (p.n1, p.n2) != (q.n1, q.n2) {
                return Err(Error::DimensionMismatch(format!("{}x{} vs {}x{}", p.n1, p.n2, q.n1, q.n2)));
            }
            let mut lam = p.lam;
            for (l, m) in lam.iter_mut().zip(q.lam) {
                *l *= m;
            }
            Ok(ProductParams::new(p.n1, p.n2, lam)?.into())
        }
        _ => Err(Error::FamilyMismatch(format!("cannot compose {} with {}", outer.name(), inner.name()))),
    }
}

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!("dimensions {a} and {b} differ")))
    }
}

/// `k`-fold composition of a map with itself.
pub fn power(p: &Family, k: u32) -> Result<Family> {
    if k == 0 {
        return Err(Error::InvalidParameters("power must be at least 1".into()));
    }
    let mut out = p.clone();
    for _ in 1..k {
        out = compose(p, &out)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Conclusion {
    /// The map is a PPT channel and its square carries an entanglement-breaking certificate.
    Holds,
    Inconclusive,
}

/// Outcome of checking that the square of a PPT channel is entanglement breaking.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ppt2Report {
    pub input_params: Family,
    /// PPT channel test: complete positivity together with positive partial transpose.
    pub ppt_of_phi: RegionVerdict,
    pub params_of_phi_squared: Family,
    pub eb_sufficient_of_phi_squared: RegionVerdict,
    pub conclusion: Conclusion,
    /// Supporting numbers that do not enter the conclusion.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub evidence: BTreeMap<String, RegionVerdict>,
}

/// PPT-channel verdict for the classes the pipeline supports.
pub fn ppt_channel(p: &Family, tol: &Tolerance) -> Result<RegionVerdict> {
    match p {
        Family::Unitary(u) => Ok(conjunction(&[&cp_u(u.n, u.lambda)?, &ppt_eb_u(u.n, u.lambda)?])),
        Family::Diagonal(d) => ppt_du(d, tol),
        Family::Product(q) => {
            let choi = choi_generic(q, q.dim())?;
            Ok(conjunction(&[&cp_product_small(q, tol)?, &ppt_numeric(&choi, tol)?]))
        }
    }
}

fn supported(p: &Family) -> Result<()> {
    let ok = match p {
        Family::Unitary(_) => true,
        Family::Diagonal(d) => d.n() == 2 || d.as_du3_symmetric().is_some(),
        Family::Product(q) => matches!((q.n1, q.n2), (2, 2) | (2, 3)),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::UnsupportedFamily(
            "PPT-squared checks cover U(n), DU(2), symmetric DU(3) and product (2,2), (2,3)".into(),
        ))
    }
}

/// Tests a PPT channel and certifies, where possible, that its square is entanglement breaking.
pub fn ppt2_check(p: &Family, tol: &Tolerance) -> Result<Ppt2Report> {
    supported(p)?;
    let ppt_of_phi = ppt_channel(p, tol)?;
    let squared = power(p, 2)?;
    let mut evidence = BTreeMap::new();
    let eb = match &squared {
        Family::Unitary(u) => eb_u(u.n, u.lambda)?,
        Family::Diagonal(d) => eb_sufficient_du(d, tol)?,
        Family::Product(q) => {
            let choi = choi_generic(q, q.dim())?;
            evidence.insert("ppt_numeric_of_phi_squared".into(), ppt_numeric(&choi, tol)?);
            evidence.insert("schwarz_necessary_of_phi_squared".into(), schwarz_necessary_product(q, tol)?);
            eb_ball_certificate(&choi, tol)?
        }
    };
    let conclusion = if ppt_of_phi.member && eb.member { Conclusion::Holds } else { Conclusion::Inconclusive };
    Ok(Ppt2Report {
        input_params: p.clone(),
        ppt_of_phi,
        params_of_phi_squared: squared,
        eb_sufficient_of_phi_squared: eb,
        conclusion,
        evidence,
    })
}

/// Parameter classes from which PPT channels can be sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleClass {
    Unitary { n: usize },
    Du2,
    Du3Symmetric,
    Product { n1: usize, n2: usize },
}

/// Draws one point uniformly from the class's parameter box. Every unital CP member lies
/// inside the box, so rejection against the PPT test is uniform on the PPT region.
fn draw(class: SampleClass, rng: &mut ChaCha8Rng) -> Result<Family> {
    let mut u = |lo: f64, hi: f64| rng.gen_range(lo..=hi);
    Ok(match class {
        SampleClass::Unitary { n } => UnitaryParams::unital(n, u(-1.0, 1.0))?.into(),
        SampleClass::Du2 => {
            let (c12, c21) = (u(0.0, 1.0), u(0.0, 1.0));
            let lam = C64::new(u(-1.0, 1.0), u(-1.0, 1.0));
            DiagonalParams::du2(c12, c21, lam).into()
        }
        SampleClass::Du3Symmetric => {
            let p = u(0.0, 1.0);
            let lam = C64::new(u(-1.0, 1.0), u(-1.0, 1.0));
            DiagonalParams::du3_symmetric(p, lam).into()
        }
        SampleClass::Product { n1, n2 } => ProductParams::new(
            n1,
            n2,
            [ONE, C64::new(u(-1.0, 1.0), 0.0), C64::new(u(-1.0, 1.0), 0.0), C64::new(u(-1.0, 1.0), 0.0)],
        )?
        .into(),
    })
}

/// Upper bound on rejection draws per sample.
const MAX_DRAWS: usize = 1_000_000;

/// Uniform sample of a PPT channel. Sample `index` uses its own random stream, so results
/// do not depend on how samples are scheduled.
pub fn sample_ppt_point(class: SampleClass, seed: u64, index: u64, tol: &Tolerance) -> Result<Family> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    for _ in 0..MAX_DRAWS {
        let p = draw(class, &mut rng)?;
        if let Family::Product(q) = &p {
            // the closed-form CP test is far cheaper than a Choi eigensolve
            if !cp_product_small(q, tol)?.member {
                continue;
            }
        }
        if ppt_channel(&p, tol)?.member {
            return Ok(p);
        }
    }
    Err(Error::InvalidParameters("PPT region not reached by rejection sampling".into()))
}

/// `ppt2_check` on `samples` uniformly drawn PPT channels, in sample order.
pub fn ppt2_sweep(class: SampleClass, samples: usize, seed: u64, tol: &Tolerance) -> Result<Vec<Ppt2Report>> {
    (0..samples as u64)
        .into_par_iter()
        .map(|i| ppt2_check(&sample_ppt_point(class, seed, i, tol)?, tol))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::LinearMap;
    use crate::linalg::ComplexMatrix;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn identity_is_neutral() {
        let id: Family = UnitaryParams::unital(3, 1.0).unwrap().into();
        let p: Family = UnitaryParams::new(3, c(0.7), C64::new(0.2, 0.1)).unwrap().into();
        assert_eq!(compose(&id, &p).unwrap(), p);
        let id: Family = DiagonalParams::identity(2).unwrap().into();
        let p: Family = DiagonalParams::du2(0.3, 0.6, c(0.2)).into();
        assert_eq!(compose(&id, &p).unwrap(), p);
    }

    #[test]
    fn du2_mixing_squares_as_matrix() {
        let mixing = ComplexMatrix::from_real(2, 2, &[0.8, 0.3, 0.2, 0.7]).unwrap();
        let p: Family = DiagonalParams::new(ComplexMatrix::zeros(2, 2), mixing).unwrap().into();
        let Family::Diagonal(sq) = power(&p, 2).unwrap() else { unreachable!() };
        let expected = ComplexMatrix::from_real(2, 2, &[0.70, 0.45, 0.30, 0.55]).unwrap();
        assert!(sq.mixing().max_abs_diff(&expected) < 1e-15);
        let x = ComplexMatrix::from_fn(2, 2, |i, j| C64::new(i as f64 + 0.5, j as f64));
        let twice = p.apply(&p.apply(&x).unwrap()).unwrap();
        assert!(sq.apply(&x).unwrap().max_abs_diff(&twice) < 1e-15);
    }

    #[test]
    fn powers_multiply_coefficients() {
        let p: Family = ProductParams::unital(2, 2, 0.1, 0.2, 0.6).unwrap().into();
        let Family::Product(q) = power(&p, 2).unwrap() else { unreachable!() };
        assert!((q.lam[3] - c(0.36)).norm() < 1e-15);

        let p: Family = UnitaryParams::unital(2, 0.5).unwrap().into();
        let Family::Unitary(q) = power(&p, 3).unwrap() else { unreachable!() };
        assert!((q.lambda - c(0.125)).norm() < 1e-15);
        assert_eq!(power(&p, 1).unwrap(), p);
        assert!(power(&p, 0).is_err());

        let p: Family = DiagonalParams::du3_symmetric(0.4, c(0.3)).into();
        let Family::Diagonal(q) = power(&p, 2).unwrap() else { unreachable!() };
        assert!((q.c(0, 0).re - 0.34).abs() < 1e-15);
        assert!(q.as_du3_symmetric().is_some());
    }

    #[test]
    fn family_mismatch_is_rejected() {
        let u: Family = UnitaryParams::unital(2, 0.5).unwrap().into();
        let d: Family = DiagonalParams::identity(2).unwrap().into();
        assert!(matches!(compose(&u, &d), Err(Error::FamilyMismatch(_))));
        let u3: Family = UnitaryParams::unital(3, 0.5).unwrap().into();
        assert!(matches!(compose(&u, &u3), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn unitary_ppt_boundary_point_squares_to_eb() {
        let r = ppt2_check(&UnitaryParams::unital(3, 0.25).unwrap().into(), &tol()).unwrap();
        assert!(r.ppt_of_phi.member);
        assert_eq!(r.conclusion, Conclusion::Holds);
    }

    #[test]
    fn du2_point_outside_ppt_is_inconclusive() {
        // c11 c22 ≥ λ² holds but c12 c21 = 0.16 < 0.3025: CP, not PPT.
        let r = ppt2_check(&DiagonalParams::du2(0.4, 0.4, c(0.55)).into(), &tol()).unwrap();
        assert!(!r.ppt_of_phi.member);
        assert_eq!(r.conclusion, Conclusion::Inconclusive);
        let Family::Diagonal(sq) = &r.params_of_phi_squared else { unreachable!() };
        assert!((sq.c(0, 0).re - 0.52).abs() < 1e-15 && (sq.lambda(0, 1).re - 0.3025).abs() < 1e-15);
        assert!(r.eb_sufficient_of_phi_squared.member);
    }

    #[test]
    fn du_ppt_points_square_to_eb() {
        let r = ppt2_check(&DiagonalParams::du2(0.5, 0.5, c(0.45)).into(), &tol()).unwrap();
        assert_eq!(r.conclusion, Conclusion::Holds);
        let r = ppt2_check(&DiagonalParams::du3_symmetric(0.4, c(0.25)).into(), &tol()).unwrap();
        assert!(r.ppt_of_phi.member);
        assert_eq!(r.conclusion, Conclusion::Holds);
    }

    #[test]
    fn unsupported_classes() {
        let d: Family = DiagonalParams::identity(4).unwrap().into();
        assert!(matches!(ppt2_check(&d, &tol()), Err(Error::UnsupportedFamily(_))));
        let p: Family = ProductParams::unital(3, 3, 0.0, 0.0, 0.0).unwrap().into();
        assert!(matches!(ppt2_check(&p, &tol()), Err(Error::UnsupportedFamily(_))));
    }

    #[test]
    fn sampling_is_deterministic_per_index() {
        let a = sample_ppt_point(SampleClass::Du2, 9, 4, &tol()).unwrap();
        let b = sample_ppt_point(SampleClass::Du2, 9, 4, &tol()).unwrap();
        assert_eq!(a, b);
        assert!(ppt_channel(&a, &tol()).unwrap().member);
        let sweep = ppt2_sweep(SampleClass::Unitary { n: 3 }, 8, 1, &tol()).unwrap();
        assert!(sweep.iter().all(|r| r.conclusion == Conclusion::Holds));
    }
}
