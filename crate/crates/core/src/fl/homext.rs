//! Hom and Ext^1 between mod-p FL modules as F_p-linear algebra.
//!
//! RHom_FL(M, N) is the fiber of
//! δ: Hom_gr(M, N) -> Hom(F^* M_{v-=p}, N^0), f ↦ f_0 ψ_M - ψ_N F^*(f),
//! and Ext^1_gr vanishes because mod-p pieces with injective v- split.

use super::{FLModule, FLMorphism};
use crate::arith::{Ctx, PrimeContext, Zq};
use crate::error::{Error, Result};
use crate::gradmod::{kernel_basis, smith_normal_form, solve, Mat, ModuleMap};

/// F_p coordinates of k-vectors, f per entry.
pub fn fp_coords(v: &[Zq], fp: &Ctx) -> Vec<Zq> {
    let p = fp.p();
    v.iter().flat_map(|z| z.coeffs().iter().map(move |&c| Zq::from_u64(fp, c % p))).collect()
}

/// Inverse of `fp_coords`, lifting by least residues.
pub fn from_fp_coords(x: &[Zq], ctx: &Ctx) -> Vec<Zq> {
    let f = ctx.degree();
    x.chunks(f)
        .map(|ch| {
            let c: Vec<i64> = ch.iter().map(|z| z.coeffs()[0] as i64).collect();
            Zq::from_coeffs(ctx, &c).expect("f coefficients")
        })
        .collect()
}

pub fn fp_rank(m: &Mat) -> usize {
    smith_normal_form(m).exps.iter().filter(|&&e| e == 0).count()
}

/// The two-term complex computing RHom_FL(M, N) for mod-p M and N.
#[derive(Debug, Clone)]
pub struct HomExt {
    source: FLModule,
    target: FLModule,
    fp: Ctx,
    /// columns: F_p basis of Hom_gr(M, N) in unknown coordinates
    hom_gr: Mat,
    /// columns: δ of the basis above, in target coordinates
    delta: Mat,
    section: Mat,
    target_dim: usize,
}

impl HomExt {
    pub fn new(m: &FLModule, n: &FLModule) -> Result<Self> {
        if !m.killed_by_p() || !n.killed_by_p() {
            return Err(Error::InvalidArgument("Hom/Ext^1 is certified only for modules killed by p".into()));
        }
        if m.ctx() != n.ctx() {
            return Err(Error::ContextMismatch);
        }
        let ctx = m.ctx().clone();
        let fp = PrimeContext::prime(ctx.p(), 1)?;
        let w = m.wmax().max(n.wmax());
        let (m, n) = (m.padded(w), n.padded(w));
        let nunk: usize = (0..=w).map(|i| block_len(&m, &n, i)).sum::<usize>() * ctx.degree();

        let mut constraint_cols = Vec::with_capacity(nunk);
        for u in 0..nunk {
            let f = unknowns_to_maps(&m, &n, &unit(&fp, nunk, u));
            let mut col = Vec::new();
            for i in 1..=w {
                let lhs = f[i - 1].mul(m.vminus(i as i64).matrix());
                let rhs = n.vminus(i as i64).matrix().mul(&f[i]);
                col.extend(fp_coords(lhs.sub(&rhs).entries(), &fp));
            }
            constraint_cols.push(col);
        }
        let rows = constraint_cols.first().map_or(0, Vec::len);
        let constraints = Mat::from_fn(&fp, rows, nunk, |r, c| constraint_cols[c][r].clone());
        let hom_gr = if rows == 0 { Mat::identity(&fp, nunk) } else { kernel_basis(&constraints) };

        let d = m.base().fiber_differential(&Zq::p_power(&ctx, 1));
        let sd = ModuleMap::new(d.source().clone(), d.target().clone(), d.matrix().frobenius())?;
        let section = sd.cokernel().section;
        let target_dim = n.piece(0).ngens() * section.cols() * ctx.degree();

        let mut this = HomExt { source: m, target: n, fp: fp.clone(), hom_gr, delta: Mat::zeros(&fp, target_dim, 0), section, target_dim };
        let dcols: Vec<Vec<Zq>> = (0..this.hom_gr.cols()).map(|j| this.delta_of(&this.hom_gr.column(j))).collect();
        this.delta = Mat::from_fn(&fp, target_dim, dcols.len(), |r, c| dcols[c][r].clone());
        Ok(this)
    }

    /// δ(f) for f given in unknown coordinates.
    fn delta_of(&self, x: &[Zq]) -> Vec<Zq> {
        let (m, n) = (&self.source, &self.target);
        let f = unknowns_to_maps(m, n, x);
        let ctx = m.ctx();
        let fsig: Vec<Mat> = f.iter().map(Mat::frobenius).collect();
        let refs: Vec<&Mat> = fsig.iter().collect();
        let big_f = Mat::block_diag(ctx, &refs);
        let diff = f[0].mul(&m.phi_total()).sub(&n.phi_total().mul(&big_f));
        fp_coords(diff.mul(&self.section).entries(), &self.fp)
    }

    pub fn source(&self) -> &FLModule {
        &self.source
    }

    pub fn target(&self) -> &FLModule {
        &self.target
    }

    pub fn fp_ctx(&self) -> &Ctx {
        &self.fp
    }

    pub fn hom_gr_dim(&self) -> usize {
        self.hom_gr.cols()
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn delta_rank(&self) -> usize {
        fp_rank(&self.delta)
    }

    /// dim_{F_p} Hom_FL(M, N)
    pub fn hom_dim(&self) -> usize {
        self.hom_gr_dim() - self.delta_rank()
    }

    /// dim_{F_p} Ext^1_FL(M, N)
    pub fn ext_dim(&self) -> usize {
        self.target_dim - self.delta_rank()
    }

    /// An F_p basis of Hom_FL(M, N).
    pub fn hom_basis(&self) -> Result<Vec<FLMorphism>> {
        let k = if self.delta.rows() == 0 { Mat::identity(&self.fp, self.hom_gr.cols()) } else { kernel_basis(&self.delta) };
        let combos = self.hom_gr.mul(&k);
        let mut out = Vec::new();
        for j in 0..combos.cols() {
            let x = combos.column(j);
            if x.iter().all(Zq::is_zero) {
                continue;
            }
            let maps = unknowns_to_maps(&self.source, &self.target, &x);
            let maps = maps.into_iter().map(|m| m.reduce_rows(&vec![1; m.rows()])).collect();
            out.push(FLMorphism::new(&self.source, &self.target, maps)?);
        }
        Ok(out)
    }

    /// Target coordinates of a cochain c: F^* M_p -> N^0 given as a k-matrix on the section.
    pub fn cochain_coords(&self, c: &Mat) -> Vec<Zq> {
        fp_coords(c.entries(), &self.fp)
    }

    /// Whether the cochain is δ of a graded map, i.e. zero in Ext^1.
    pub fn is_coboundary(&self, coords: &[Zq]) -> bool {
        if self.delta.cols() == 0 {
            return coords.iter().all(Zq::is_zero);
        }
        solve(&self.delta, coords).is_some()
    }

    /// Section of F^*(M_{v-=p}) in ⊕ M^i coordinates.
    pub fn section(&self) -> &Mat {
        &self.section
    }
}

fn block_len(m: &FLModule, n: &FLModule, i: usize) -> usize {
    n.piece(i as i64).ngens() * m.piece(i as i64).ngens()
}

fn unit(fp: &Ctx, n: usize, u: usize) -> Vec<Zq> {
    (0..n).map(|k| if k == u { Zq::one(fp) } else { Zq::zero(fp) }).collect()
}

/// Degreewise k-matrices from F_p coordinates.
fn unknowns_to_maps(m: &FLModule, n: &FLModule, x: &[Zq]) -> Vec<Mat> {
    let ctx = m.ctx();
    let f = ctx.degree();
    let mut off = 0;
    (0..=m.wmax())
        .map(|i| {
            let (r, c) = (n.piece(i as i64).ngens(), m.piece(i as i64).ngens());
            let len = r * c * f;
            let vals = from_fp_coords(&x[off..off + len], ctx);
            off += len;
            Mat::from_fn(ctx, r, c, |a, b| vals[a * c + b].clone())
        })
        .collect()
}

/// (dim Hom_FL, dim Ext^1_FL) over F_p.
pub fn fl_hom_ext1(m: &FLModule, n: &FLModule) -> Result<(usize, usize)> {
    let h = HomExt::new(m, n)?;
    Ok((h.hom_dim(), h.ext_dim()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fl::unit_mod_p;

    #[test]
    fn unit_self_ext() {
        let c = PrimeContext::prime(3, 2).unwrap();
        let k0 = unit_mod_p(&c, 0);
        assert_eq!(fl_hom_ext1(&k0, &k0).unwrap(), (1, 1));
        let c2 = PrimeContext::new(3, 1, 2, None).unwrap();
        let k0 = unit_mod_p(&c2, 0);
        assert_eq!(fl_hom_ext1(&k0, &k0).unwrap(), (1, 1));
    }

    #[test]
    fn top_weight_extensions() {
        for p in [2u64, 3, 5] {
            let c = PrimeContext::prime(p, 1).unwrap();
            let top = unit_mod_p(&c, p as usize - 1);
            assert_eq!(fl_hom_ext1(&top, &unit_mod_p(&c, 0)).unwrap(), (0, 1));
        }
        let c = PrimeContext::prime(3, 1).unwrap();
        assert_eq!(fl_hom_ext1(&unit_mod_p(&c, 0), &unit_mod_p(&c, 1)).unwrap().0, 0);
        assert_eq!(fl_hom_ext1(&unit_mod_p(&c, 1), &unit_mod_p(&c, 0)).unwrap(), (0, 1));
    }

    #[test]
    fn rejects_torsion_free() {
        let c = PrimeContext::prime(3, 2).unwrap();
        let w = crate::fl::tate_twist(&c, 0, &Zq::one(&c)).unwrap();
        assert!(HomExt::new(&w, &w).is_err());
    }
}
