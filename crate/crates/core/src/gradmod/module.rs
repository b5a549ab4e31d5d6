//! Finitely presented modules over Z_q/p^N in diagonal form, and maps between them.

use std::fmt;

use super::snf::{kernel_basis, smith_normal_form, solve};
use super::Mat;
use crate::arith::{Ctx, Zq};
use crate::error::{Error, Result};

/// ⊕ Z_q/p^{e_k}; an exponent equal to N is a full summand, read as free.
#[derive(Clone, PartialEq, Eq)]
pub struct FPModule {
    ctx: Ctx,
    exps: Vec<u32>,
}

impl FPModule {
    pub fn new(ctx: &Ctx, exps: Vec<u32>) -> Result<Self> {
        let n = ctx.precision();
        if let Some(&e) = exps.iter().find(|&&e| e == 0 || e > n) {
            return Err(Error::InvalidModule(format!("exponent {e} outside [1, {n}]")));
        }
        Ok(FPModule { ctx: ctx.clone(), exps })
    }

    pub fn zero(ctx: &Ctx) -> Self {
        FPModule { ctx: ctx.clone(), exps: Vec::new() }
    }

    pub fn free(ctx: &Ctx, rank: usize) -> Self {
        FPModule { ctx: ctx.clone(), exps: vec![ctx.precision(); rank] }
    }

    /// (Z_q/p)^rank
    pub fn mod_p(ctx: &Ctx, rank: usize) -> Self {
        FPModule { ctx: ctx.clone(), exps: vec![1; rank] }
    }

    /// The cokernel of a g x r relation matrix, with the change of generators.
    pub fn presented(ctx: &Ctx, rel: &Mat) -> Quotient {
        quotient(ctx, rel)
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn ngens(&self) -> usize {
        self.exps.len()
    }

    pub fn is_zero(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn free_rank(&self) -> usize {
        let n = self.ctx.precision();
        self.exps.iter().filter(|&&e| e == n).count()
    }

    pub fn torsion_exps(&self) -> Vec<u32> {
        let n = self.ctx.precision();
        let mut t: Vec<u32> = self.exps.iter().copied().filter(|&e| e < n).collect();
        t.sort_unstable();
        t
    }

    /// Sorted exponents; two modules are isomorphic iff these agree.
    pub fn elementary_divisors(&self) -> Vec<u32> {
        let mut e = self.exps.clone();
        e.sort_unstable();
        e
    }

    pub fn is_isomorphic(&self, other: &FPModule) -> bool {
        self.elementary_divisors() == other.elementary_divisors()
    }

    /// Every summand is torsion of exponent below N.
    pub fn is_n_determined(&self) -> bool {
        let n = self.ctx.precision();
        self.exps.iter().all(|&e| e < n)
    }

    pub fn is_full(&self) -> bool {
        self.free_rank() == self.ngens()
    }

    pub fn killed_by_p(&self) -> bool {
        self.exps.iter().all(|&e| e == 1)
    }

    /// length as a W(k)-module
    pub fn length(&self) -> u64 {
        self.exps.iter().map(|&e| e as u64).sum::<u64>() * self.ctx.degree() as u64
    }

    /// diag(p^{e_k})
    pub fn relation_matrix(&self) -> Mat {
        let d: Vec<Zq> = self.exps.iter().map(|&e| Zq::p_power(&self.ctx, e)).collect();
        Mat::diagonal(&self.ctx, &d)
    }

    pub fn reduce(&self, v: &[Zq]) -> Vec<Zq> {
        v.iter().zip(&self.exps).map(|(x, &e)| x.reduce(e)).collect()
    }

    pub fn direct_sum(ctx: &Ctx, parts: &[&FPModule]) -> FPModule {
        FPModule { ctx: ctx.clone(), exps: parts.iter().flat_map(|m| m.exps.iter().copied()).collect() }
    }

    /// M/p^e M
    pub fn truncate(&self, e: u32) -> FPModule {
        FPModule { ctx: self.ctx.clone(), exps: self.exps.iter().map(|&x| x.min(e)).collect() }
    }
}

impl fmt::Debug for FPModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FPModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return write!(f, "0");
        }
        let p = self.ctx.p();
        let parts: Vec<String> = self.elementary_divisors().iter().map(|e| format!("Z/{p}^{e}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A presented module brought to diagonal form.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub module: FPModule,
    /// old generator coordinates -> new coordinates
    pub to_new: Mat,
    /// new generators written in old coordinates
    pub from_new: Mat,
}

/// Cokernel of rel (g x r): drops unit divisors, keeps the rest in SNF order.
pub(crate) fn quotient(ctx: &Ctx, rel: &Mat) -> Quotient {
    let g = rel.rows();
    let n = ctx.precision();
    let s = smith_normal_form(rel);
    let mut keep = Vec::new();
    let mut exps = Vec::new();
    for k in 0..g {
        let e = s.exps.get(k).copied().unwrap_or(n);
        if e > 0 {
            keep.push(k);
            exps.push(e);
        }
    }
    let module = FPModule { ctx: ctx.clone(), exps };
    let to_new = s.u.select_rows(&keep).reduce_rows(module.exps());
    let from_new = s.u_inv.select_cols(&keep);
    Quotient { module, to_new, from_new }
}

/// The submodule of `ambient` generated by the columns of `gens`.
pub(crate) fn submodule(ambient: &FPModule, gens: &Mat) -> (FPModule, Mat) {
    let ctx = ambient.ctx();
    let big = Mat::hstack(ctx, ambient.ngens(), &[gens, &ambient.relation_matrix()]);
    let k = kernel_basis(&big);
    let rel = k.block(0, 0, gens.cols(), k.cols());
    let q = quotient(ctx, &rel);
    let incl = gens.mul(&q.from_new).reduce_rows(ambient.exps());
    (q.module, incl)
}

/// A Z_q-linear map given on generators; column c is the image of generator c.
#[derive(Clone, PartialEq, Eq)]
pub struct ModuleMap {
    source: FPModule,
    target: FPModule,
    matrix: Mat,
}

/// Checks val(A_rc) >= e_tgt(r) - e_src(c) and reduces rows.
pub(crate) fn check_well_defined(source: &FPModule, target: &FPModule, matrix: &Mat) -> Result<Mat> {
    if matrix.rows() != target.ngens() || matrix.cols() != source.ngens() {
        return Err(Error::Dimension(format!(
            "map matrix is {}x{}, modules have {} -> {} generators",
            matrix.rows(),
            matrix.cols(),
            source.ngens(),
            target.ngens()
        )));
    }
    for r in 0..matrix.rows() {
        for c in 0..matrix.cols() {
            let need = target.exps[r].saturating_sub(source.exps[c]);
            if matrix.get(r, c).reduce(target.exps[r]).valuation() < need {
                return Err(Error::IllDefined(format!(
                    "entry ({r}, {c}) = {} does not kill p^{}",
                    matrix.get(r, c),
                    source.exps[c]
                )));
            }
        }
    }
    Ok(matrix.reduce_rows(target.exps()))
}

impl ModuleMap {
    pub fn new(source: FPModule, target: FPModule, matrix: Mat) -> Result<Self> {
        let matrix = check_well_defined(&source, &target, &matrix)?;
        Ok(ModuleMap { source, target, matrix })
    }

    pub fn zero(source: &FPModule, target: &FPModule) -> Self {
        let matrix = Mat::zeros(source.ctx(), target.ngens(), source.ngens());
        ModuleMap { source: source.clone(), target: target.clone(), matrix }
    }

    pub fn identity(m: &FPModule) -> Self {
        ModuleMap { source: m.clone(), target: m.clone(), matrix: Mat::identity(m.ctx(), m.ngens()) }
    }

    /// c·id
    pub fn scalar(m: &FPModule, c: &Zq) -> Self {
        let matrix = Mat::scalar(m.ctx(), m.ngens(), c).reduce_rows(m.exps());
        ModuleMap { source: m.clone(), target: m.clone(), matrix }
    }

    pub fn source(&self) -> &FPModule {
        &self.source
    }

    pub fn target(&self) -> &FPModule {
        &self.target
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn ctx(&self) -> &Ctx {
        self.source.ctx()
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    /// self ∘ g
    pub fn compose(&self, g: &ModuleMap) -> Result<ModuleMap> {
        if g.target.exps != self.source.exps {
            return Err(Error::Dimension("composition of maps with mismatched modules".into()));
        }
        Ok(ModuleMap {
            source: g.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.mul(&g.matrix).reduce_rows(self.target.exps()),
        })
    }

    pub fn add(&self, other: &ModuleMap) -> Result<ModuleMap> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::Dimension("sum of maps with different source or target".into()));
        }
        Ok(ModuleMap {
            source: self.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.add(&other.matrix).reduce_rows(self.target.exps()),
        })
    }

    pub fn sub(&self, other: &ModuleMap) -> Result<ModuleMap> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ModuleMap {
        ModuleMap {
            source: self.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.neg().reduce_rows(self.target.exps()),
        }
    }

    pub fn apply(&self, x: &[Zq]) -> Vec<Zq> {
        self.target.reduce(&self.matrix.mul_vec(x))
    }

    /// Inclusion of the kernel.
    pub fn kernel(&self) -> ModuleMap {
        let ctx = self.ctx();
        let n = self.source.ngens();
        let big = Mat::hstack(ctx, self.target.ngens(), &[&self.matrix, &self.target.relation_matrix()]);
        let k = kernel_basis(&big);
        let pre = k.block(0, 0, n, k.cols());
        let (module, incl) = submodule(&self.source, &pre);
        ModuleMap { source: module, target: self.source.clone(), matrix: incl }
    }

    pub fn cokernel(&self) -> Cokernel {
        let ctx = self.ctx();
        let rel = Mat::hstack(ctx, self.target.ngens(), &[&self.target.relation_matrix(), &self.matrix]);
        let q = quotient(ctx, &rel);
        let projection = ModuleMap { source: self.target.clone(), target: q.module.clone(), matrix: q.to_new };
        Cokernel { projection, section: q.from_new }
    }

    /// Inclusion of the image.
    pub fn image(&self) -> ModuleMap {
        let (module, incl) = submodule(&self.target, &self.matrix);
        ModuleMap { source: module, target: self.target.clone(), matrix: incl }
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().source.is_zero()
    }

    pub fn is_surjective(&self) -> bool {
        self.cokernel().module().is_zero()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// Y with self ∘ Y = x, for x: S -> target landing in the image.
    pub fn lift_through(&self, x: &ModuleMap) -> Result<ModuleMap> {
        if x.target != self.target {
            return Err(Error::Dimension("lift through a map with a different target".into()));
        }
        let ctx = self.ctx();
        let big = Mat::hstack(ctx, self.target.ngens(), &[&self.matrix, &self.target.relation_matrix()]);
        let mut cols = Vec::new();
        for c in 0..x.source.ngens() {
            let y = solve(&big, &x.matrix.column(c))
                .ok_or_else(|| Error::Verification(format!("column {c} is not in the image")))?;
            cols.push(y[..self.source.ngens()].to_vec());
        }
        let m = Mat::from_fn(ctx, self.source.ngens(), cols.len(), |r, c| cols[c][r].clone());
        ModuleMap::new(x.source.clone(), self.source.clone(), m)
    }

    pub fn direct_sum(parts: &[&ModuleMap]) -> ModuleMap {
        let ctx = parts.first().map(|m| m.ctx().clone()).expect("nonempty direct sum");
        let src: Vec<&FPModule> = parts.iter().map(|m| &m.source).collect();
        let tgt: Vec<&FPModule> = parts.iter().map(|m| &m.target).collect();
        let mats: Vec<&Mat> = parts.iter().map(|m| &m.matrix).collect();
        ModuleMap {
            source: FPModule::direct_sum(&ctx, &src),
            target: FPModule::direct_sum(&ctx, &tgt),
            matrix: Mat::block_diag(&ctx, &mats),
        }
    }
}

impl fmt::Debug for ModuleMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}: {}", self.source, self.target, self.matrix)
    }
}

#[derive(Debug, Clone)]
pub struct Cokernel {
    pub projection: ModuleMap,
    /// lifts of the cokernel generators, in target coordinates
    pub section: Mat,
}

impl Cokernel {
    pub fn module(&self) -> &FPModule {
        self.projection.target()
    }
}

/// (H0, H1) of d viewed as a complex in degrees 0 and 1.
pub fn two_term_homology(d: &ModuleMap) -> (FPModule, FPModule) {
    (d.kernel().source().clone(), d.cokernel().module().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::PrimeContext;

    fn ctx9() -> Ctx {
        PrimeContext::prime(3, 2).unwrap()
    }

    #[test]
    fn homology_examples() {
        let c = ctx9();
        let m = FPModule::free(&c, 1);
        let (h0, h1) = two_term_homology(&ModuleMap::zero(&m, &m));
        assert_eq!((h0.exps(), h1.exps()), (&[2][..], &[2][..]));
        let (h0, h1) = two_term_homology(&ModuleMap::scalar(&m, &Zq::from_u64(&c, 3)));
        assert_eq!((h0.exps(), h1.exps()), (&[1][..], &[1][..]));
        let (h0, h1) = two_term_homology(&ModuleMap::identity(&m));
        assert!(h0.is_zero() && h1.is_zero());
    }

    #[test]
    fn ill_defined_maps_are_rejected() {
        let c = ctx9();
        let a = FPModule::new(&c, vec![1]).unwrap();
        let b = FPModule::free(&c, 1);
        assert!(ModuleMap::new(a.clone(), b.clone(), Mat::from_i64(&c, &[vec![1]], 1).unwrap()).is_err());
        assert!(ModuleMap::new(a, b, Mat::from_i64(&c, &[vec![3]], 1).unwrap()).is_ok());
    }

    #[test]
    fn kernel_and_cokernel_of_projection() {
        let c = ctx9();
        let src = FPModule::free(&c, 2);
        let tgt = FPModule::new(&c, vec![1]).unwrap();
        let f = ModuleMap::new(src, tgt, Mat::from_i64(&c, &[vec![1, 1]], 2).unwrap()).unwrap();
        let k = f.kernel();
        assert_eq!(k.source().elementary_divisors(), vec![1, 2]);
        assert!(f.compose(&k).unwrap().is_zero());
        assert!(f.is_surjective());
        let lift = k.lift_through(&k).unwrap();
        assert_eq!(k.compose(&lift).unwrap(), k);
    }
}
