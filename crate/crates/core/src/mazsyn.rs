//! Mazur modules and syntomic cohomology in small weights.

use crate::arith::{pd_exponent, Zq};
use crate::error::{Error, Result};
use crate::fl::{FLModule, HomExt};
use crate::gradmod::{restrict, two_term_homology, GradedModule, Mat, ModuleMap};
use crate::report::Report;

/// Graded module with σ-semilinear φ_i: F^i -> F^0 satisfying
/// p^{[i+1]-[i]} φ_{i+1} = φ_i v-.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MazurModule {
    base: GradedModule,
    phi: Vec<Mat>,
}

impl MazurModule {
    pub fn new(base: GradedModule, phi: Vec<Mat>) -> Result<Self> {
        if phi.len() != base.wmax() + 1 {
            return Err(Error::Dimension(format!("{} phi matrices for window [0, {}]", phi.len(), base.wmax())));
        }
        let f0 = base.piece(0);
        let phi = phi
            .into_iter()
            .enumerate()
            .map(|(i, m)| crate::gradmod::check_well_defined(&base.piece(i as i64), &f0, &m))
            .collect::<Result<Vec<_>>>()?;
        Ok(MazurModule { base, phi })
    }

    pub fn base(&self) -> &GradedModule {
        &self.base
    }

    pub fn phi(&self, i: usize) -> Mat {
        match self.phi.get(i) {
            Some(m) => m.clone(),
            None => Mat::zeros(self.base.ctx(), self.base.piece(0).ngens(), 0),
        }
    }

    pub fn phis(&self) -> &[Mat] {
        &self.phi
    }

    /// First degree i where p^{[i+1]-[i]} φ_{i+1} != φ_i σ(v-), if any.
    pub fn first_failure(&self) -> Option<usize> {
        let ctx = self.base.ctx();
        let p = ctx.p();
        let e0 = self.base.piece(0);
        (0..self.base.wmax()).find(|&i| {
            let lhs = self.phi(i).mul(&self.base.vminus(i as i64 + 1).matrix().frobenius());
            let k = pd_exponent(p, i as i64 + 1) - pd_exponent(p, i as i64);
            let rhs = self.phi(i + 1).scale(&Zq::p_power(ctx, k as u32));
            lhs.sub(&rhs).reduce_rows(e0.exps()) != Mat::zeros(ctx, e0.ngens(), lhs.cols())
        })
    }

    pub fn validate(&self) -> Report {
        let mut r = Report::new("mazur_validate");
        match self.first_failure() {
            None => r.check("mazur relation", true, ""),
            Some(i) => r.check("mazur relation", false, format!("fails between degrees {i} and {}", i + 1)),
        }
        r
    }
}

/// φ_i = p^{i-[i]} φ'_i.
pub fn fl_to_mazur(m: &FLModule) -> MazurModule {
    let ctx = m.ctx();
    let p = ctx.p();
    let phi = (0..=m.wmax())
        .map(|i| {
            let k = i as u64 - pd_exponent(p, i as i64);
            m.phi(i).scale(&Zq::p_power(ctx, k as u32))
        })
        .collect();
    MazurModule::new(m.base().clone(), phi).expect("rescaling keeps maps well defined")
}

/// Elementary divisors of H0 and H1, as exponents of p over Z/p^N (restriction of scalars).
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct SyntomicCohomology {
    pub weight: usize,
    pub h0: Vec<u32>,
    pub h1: Vec<u32>,
    /// whether every torsion exponent is below N
    pub n_determined: bool,
}

/// H^* of F^i -> F^0, x ↦ φ_i(x) - v-^i(x), over Z_p/p^N.
pub fn syntomic_cohomology(m: &MazurModule, i: usize) -> Result<SyntomicCohomology> {
    let ctx = m.base.ctx();
    let p = ctx.p() as usize;
    if i + 2 > p {
        return Err(Error::Range(format!("weight {i} outside [0, {}]", p as i64 - 2)));
    }
    let base = restrict::base_ctx(ctx)?;
    let src = m.base.piece(i as i64);
    let tgt = m.base.piece(0);
    let vpow = m.base.vminus_power(i);
    let phi = if i <= m.base.wmax() { m.phi(i) } else { Mat::zeros(ctx, tgt.ngens(), 0) };
    let d = restrict::restrict_semilinear(&phi, &base).sub(&restrict::restrict_matrix(vpow.matrix(), &base));
    let dmap = ModuleMap::new(restrict::restrict_module(&src, &base), restrict::restrict_module(&tgt, &base), d)?;
    let (h0, h1) = two_term_homology(&dmap);
    let n_determined = (h0.is_n_determined() && h1.is_n_determined()) || (dmap.source().is_full() && dmap.target().is_full());
    Ok(SyntomicCohomology { weight: i, h0: h0.elementary_divisors(), h1: h1.elementary_divisors(), n_determined })
}

pub fn syntomic_cohomology_fl(m: &FLModule, i: usize) -> Result<SyntomicCohomology> {
    syntomic_cohomology(&fl_to_mazur(m), i)
}

/// Syntomic (H0, H1) of M in weight i against (Hom, Ext^1)_FL(k{i}, M).
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Crosscheck {
    pub weight: usize,
    pub syntomic: (usize, usize),
    pub fl: (usize, usize),
}

impl Crosscheck {
    pub fn agrees(&self) -> bool {
        self.syntomic == self.fl
    }
}

pub fn syn_vs_ext_crosscheck(m: &FLModule, i: usize) -> Result<Crosscheck> {
    if !m.killed_by_p() {
        return Err(Error::InvalidArgument("crosscheck needs a module killed by p".into()));
    }
    let syn = syntomic_cohomology_fl(m, i)?;
    // exponents are all 1 for p-torsion input, so lengths are F_p-dimensions
    let dim = |e: &[u32]| e.iter().map(|&x| x as usize).sum::<usize>();
    let unit = crate::fl::unit_mod_p(m.ctx(), i);
    let h = HomExt::new(&unit, m)?;
    Ok(Crosscheck { weight: i, syntomic: (dim(&syn.h0), dim(&syn.h1)), fl: (h.hom_dim(), h.ext_dim()) })
}

/// Direct sum of the homology exponents, for additivity checks.
pub fn merge_exps(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut v: Vec<u32> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v
}

/// Zero module on the empty window.
pub fn zero_mazur(ctx: &crate::arith::Ctx) -> MazurModule {
    MazurModule { base: GradedModule::zero(ctx), phi: vec![Mat::zeros(ctx, 0, 0)] }
}
