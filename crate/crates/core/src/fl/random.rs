use rand::Rng;

use super::{FLModule, FLMorphism, HomExt};
use crate::arith::{Ctx, Zq};
use crate::error::Result;
use crate::gradmod::{FPModule, GradedModule, Mat};

/// Uniform invertible matrix over the residue field.
pub fn random_gl<R: Rng + ?Sized>(ctx: &Ctx, n: usize, rng: &mut R) -> Mat {
    loop {
        let m = Mat::from_fn(ctx, n, n, |_, _| Zq::random_residue(ctx, rng));
        if m.inverse().is_ok() {
            return m;
        }
    }
}

/// A random valid mod-p FL module with weights in [0, wmax] and total rank in [1, max_rank].
///
/// Starts from ⊕ k{j_m} with a random invertible φ and conjugates every piece
/// by a random automorphism.
pub fn random_mod_p<R: Rng + ?Sized>(ctx: &Ctx, wmax: usize, max_rank: usize, rng: &mut R) -> FLModule {
    let rank = rng.gen_range(1..=max_rank);
    let mut weights: Vec<usize> = (0..rank).map(|_| rng.gen_range(0..=wmax)).collect();
    weights.sort_unstable_by(|a, b| b.cmp(a));
    let w = weights[0];
    let dims: Vec<usize> = (0..=w).map(|i| weights.iter().filter(|&&j| j >= i).count()).collect();
    let g = random_gl(ctx, rank, rng);

    let std = |r: usize, c: usize| Mat::from_fn(ctx, r, c, |a, b| if a == b { Zq::one(ctx) } else { Zq::zero(ctx) });
    let vminus: Vec<Mat> = (1..=w).map(|i| std(dims[i - 1], dims[i])).collect();
    // column m of g belongs to gr^{j_m}; inside F^i the gr^i columns come last
    let phi: Vec<Mat> = (0..=w)
        .map(|i| {
            let next = dims.get(i + 1).copied().unwrap_or(0);
            let mut ph = Mat::zeros(ctx, rank, dims[i]);
            ph.set_block(0, next, &g.block(0, next, rank, dims[i] - next));
            ph
        })
        .collect();

    let h: Vec<Mat> = dims.iter().map(|&d| random_gl(ctx, d, rng)).collect();
    let hinv: Vec<Mat> = h.iter().map(|m| m.inverse().expect("invertible")).collect();
    let vminus = (1..=w).map(|i| h[i - 1].mul(&vminus[i - 1]).mul(&hinv[i])).collect();
    let phi = (0..=w).map(|i| h[0].mul(&phi[i]).mul(&hinv[i].frobenius())).collect();
    let pieces = dims.iter().map(|&d| FPModule::mod_p(ctx, d)).collect();
    let base = GradedModule::from_matrices(pieces, vminus).expect("consistent shapes");
    FLModule::new(base, phi).expect("well defined mod p")
}

/// A random F_p-combination of a Hom_FL basis (zero when Hom vanishes).
pub fn random_morphism<R: Rng + ?Sized>(m: &FLModule, n: &FLModule, rng: &mut R) -> Result<FLMorphism> {
    let basis = HomExt::new(m, n)?.hom_basis()?;
    let p = m.ctx().p();
    let mut acc = FLMorphism::zero(m, n);
    for b in &basis {
        let c = rng.gen_range(0..p);
        for _ in 0..c {
            acc = acc.add(b)?;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::PrimeContext;
    use rand::SeedableRng;

    #[test]
    fn random_modules_are_valid() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for (p, f) in [(2, 1), (3, 2), (5, 1)] {
            let c = PrimeContext::new(p, 2, f, None).unwrap();
            for _ in 0..10 {
                let m = random_mod_p(&c, p as usize - 1, 4, &mut rng);
                assert!(m.validate().unwrap().passed(), "{m:?}");
            }
        }
    }
}
