//! Random generators shared by the integration tests.
#![allow(dead_code)]

use equichan_core::channels::{DiagonalParams, Family, ProductParams, UnitaryParams};
use equichan_core::classify::cp_product_small;
use equichan_core::linalg::{random_unitary, ComplexMatrix, Tolerance, C64, ZERO};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn ginibre(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| gaussian(rng))
}

/// `U D U†` with Haar `U` and complex Gaussian eigenvalues.
pub fn random_normal(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let u = random_unitary(n, rng);
    let d = ComplexMatrix::from_diag(&(0..n).map(|_| gaussian(rng)).collect::<Vec<_>>());
    &(&u * &d) * &u.adjoint()
}

/// Unital CP member of U(n): `λ ∈ [−1/(n²−1), 1]`.
pub fn cp_unitary(n: usize, rng: &mut impl Rng) -> UnitaryParams {
    let lo = -1.0 / (n * n - 1) as f64;
    UnitaryParams::unital(n, rng.gen_range(lo..=1.0)).expect("valid n")
}

/// Unital CP member of DU(n): row-stochastic weights and coherences from a random
/// correlation matrix scaled by the diagonal weights.
pub fn cp_diagonal(n: usize, rng: &mut impl Rng) -> DiagonalParams {
    let mixing = ComplexMatrix::from_fn(n, n, |_, _| C64::new(-rng.gen_range(1e-6f64..1.0).ln(), 0.0));
    let mixing = ComplexMatrix::from_fn(n, n, |k, j| {
        let row: f64 = (0..n).map(|l| mixing[(k, l)].re).sum();
        mixing[(k, j)] / row
    });
    let vecs = ginibre(n, rng);
    let norms: Vec<f64> = (0..n).map(|i| (0..n).map(|k| vecs[(i, k)].norm_sqr()).sum::<f64>().sqrt()).collect();
    let offdiag = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            return ZERO;
        }
        let corr: C64 = (0..n).map(|k| vecs[(i, k)] * vecs[(j, k)].conj()).sum::<C64>() / (norms[i] * norms[j]);
        corr * (mixing[(i, i)].re * mixing[(j, j)].re).sqrt()
    });
    DiagonalParams::new(offdiag, mixing).expect("valid n")
}

/// Unital CP member of the product family, by rejection from `[−1, 1]³`.
pub fn cp_product(n1: usize, n2: usize, rng: &mut impl Rng) -> ProductParams {
    loop {
        let mut u = || rng.gen_range(-1.0..=1.0);
        let p = ProductParams::unital(n1, n2, u(), u(), u()).expect("valid dims");
        if cp_product_small(&p, &Tolerance::default()).expect("real").member {
            return p;
        }
    }
}

/// Arbitrary (not necessarily positive) member of each family.
pub fn any_member(kind: usize, rng: &mut impl Rng) -> Family {
    match kind {
        0 => {
            let n = rng.gen_range(2..=5);
            UnitaryParams::new(n, gaussian(rng), gaussian(rng)).expect("valid n").into()
        }
        1 => {
            let n = rng.gen_range(2..=4);
            DiagonalParams::new(ginibre(n, rng), ginibre(n, rng)).expect("valid n").into()
        }
        _ => {
            let (n1, n2) = (rng.gen_range(2..=3), rng.gen_range(2..=3));
            ProductParams::new(n1, n2, [gaussian(rng), gaussian(rng), gaussian(rng), gaussian(rng)]).expect("valid dims").into()
        }
    }
}

/// Same family with the same dimensions as `like`.
pub fn any_member_like(like: &Family, rng: &mut impl Rng) -> Family {
    match like {
        Family::Unitary(p) => UnitaryParams::new(p.n, gaussian(rng), gaussian(rng)).expect("valid n").into(),
        Family::Diagonal(p) => DiagonalParams::new(ginibre(p.n(), rng), ginibre(p.n(), rng)).expect("valid n").into(),
        Family::Product(p) => {
            ProductParams::new(p.n1, p.n2, [gaussian(rng), gaussian(rng), gaussian(rng), gaussian(rng)]).expect("valid dims").into()
        }
    }
}

/// Largest parameter difference between two members of the same family; `None` across families.
pub fn param_distance(a: &Family, b: &Family) -> Option<f64> {
    match (a, b) {
        (Family::Unitary(x), Family::Unitary(y)) if x.n == y.n => Some((x.sigma - y.sigma).norm().max((x.lambda - y.lambda).norm())),
        (Family::Diagonal(x), Family::Diagonal(y)) if x.n() == y.n() => {
            Some(x.offdiag().max_abs_diff(y.offdiag()).max(x.mixing().max_abs_diff(y.mixing())))
        }
        (Family::Product(x), Family::Product(y)) if (x.n1, x.n2) == (y.n1, y.n2) => {
            Some(x.lam.iter().zip(&y.lam).map(|(s, t)| (s - t).norm()).fold(0.0, f64::max))
        }
        _ => None,
    }
}
