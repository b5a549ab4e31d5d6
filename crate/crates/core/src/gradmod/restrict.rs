//! Restriction of scalars from Z_q/p^N to Z_p/p^N.

use super::{FPModule, Mat, ModuleMap};
use crate::arith::{Ctx, PrimeContext, Zq};
use crate::error::Result;

/// The base ring Z/p^N with the same p and N.
pub fn base_ctx(ctx: &Ctx) -> Result<Ctx> {
    PrimeContext::prime(ctx.p(), ctx.precision())
}

/// Matrix of multiplication by z on the basis 1, a, ..., a^{f-1}.
pub fn mult_matrix(z: &Zq, base: &Ctx) -> Mat {
    let ctx = z.ctx();
    let f = ctx.degree();
    let mut basis = Zq::one(ctx);
    let a = Zq::generator(ctx);
    let mut cols = Vec::with_capacity(f);
    for _ in 0..f {
        cols.push((z * &basis).coeffs().to_vec());
        basis = &basis * &a;
    }
    Mat::from_fn(base, f, f, |r, c| Zq::from_u64(base, cols[c][r]))
}

/// Matrix of sigma on the basis 1, a, ..., a^{f-1}.
pub fn sigma_matrix(ctx: &Ctx, base: &Ctx) -> Mat {
    let f = ctx.degree();
    let a = Zq::generator(ctx);
    let mut basis = Zq::one(ctx);
    let mut cols = Vec::with_capacity(f);
    for _ in 0..f {
        cols.push(basis.frobenius().coeffs().to_vec());
        basis = &basis * &a;
    }
    Mat::from_fn(base, f, f, |r, c| Zq::from_u64(base, cols[c][r]))
}

pub fn restrict_module(m: &FPModule, base: &Ctx) -> FPModule {
    let f = m.ctx().degree();
    let exps = m.exps().iter().flat_map(|&e| std::iter::repeat(e).take(f)).collect();
    FPModule::new(base, exps).expect("same precision")
}

/// Block matrix of a Z_q-linear matrix over Z_p.
pub fn restrict_matrix(a: &Mat, base: &Ctx) -> Mat {
    let f = a.ctx().degree();
    let mut out = Mat::zeros(base, a.rows() * f, a.cols() * f);
    for r in 0..a.rows() {
        for c in 0..a.cols() {
            out.set_block(r * f, c * f, &mult_matrix(a.get(r, c), base));
        }
    }
    out
}

/// x ↦ A σ(x) over Z_p.
pub fn restrict_semilinear(a: &Mat, base: &Ctx) -> Mat {
    let s = sigma_matrix(a.ctx(), base);
    let blocks: Vec<&Mat> = std::iter::repeat(&s).take(a.cols()).collect();
    restrict_matrix(a, base).mul(&Mat::block_diag(base, &blocks))
}

pub fn restrict_map(m: &ModuleMap, base: &Ctx) -> ModuleMap {
    ModuleMap::new(
        restrict_module(m.source(), base),
        restrict_module(m.target(), base),
        restrict_matrix(m.matrix(), base),
    )
    .expect("restriction preserves well-definedness")
}

/// Coordinates of a vector over Z_p.
pub fn restrict_vector(v: &[Zq], base: &Ctx) -> Vec<Zq> {
    v.iter().flat_map(|z| z.coeffs().iter().map(|&c| Zq::from_u64(base, c)).collect::<Vec<_>>()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn restriction_is_multiplicative_and_sigma_twisted() {
        let c = PrimeContext::new(3, 2, 2, Some(vec![1, 0, 1])).unwrap();
        let b = base_ctx(&c).unwrap();
        let x = Zq::from_coeffs(&c, &[2, 5]).unwrap();
        let y = Zq::from_coeffs(&c, &[4, 1]).unwrap();
        assert_eq!(mult_matrix(&(&x * &y), &b), mult_matrix(&x, &b).mul(&mult_matrix(&y, &b)));
        let s = sigma_matrix(&c, &b);
        assert_eq!(s.mul_vec(&restrict_vector(&[x.clone()], &b)), restrict_vector(&[x.frobenius()], &b));
        let a = Mat::from_rows(&c, vec![vec![x.clone(), y.clone()]], 2).unwrap();
        let v = vec![y.clone(), x.clone()];
        let lhs = restrict_semilinear(&a, &b).mul_vec(&restrict_vector(&v, &b));
        let sv: Vec<Zq> = v.iter().map(Zq::frobenius).collect();
        assert_eq!(lhs, restrict_vector(&a.mul_vec(&sv), &b));
    }
}
