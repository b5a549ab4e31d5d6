//! Sen operator on the mod-p fiber, the nilpotent correction α and the
//! endofunctor (F, φ) ↦ (F, φ ∘ (1 - α)).

use crate::arith::{Ctx, Zq};
use crate::error::{Error, Result};
use crate::fl::{fp_coords, FLModule, FLMorphism, HomExt};
use crate::gradmod::{smith_normal_form, FPModule, GradedModule, Mat};

/// gr^i = F^i / v- F^{i+1} with projections and sections, and Φ: ⊕ F^* gr^i -> F^0.
#[derive(Debug, Clone)]
pub struct GradedFiberData {
    module: FLModule,
    pub gr_dims: Vec<usize>,
    /// π_i: F^i -> gr^i
    pub proj: Vec<Mat>,
    /// s_i: gr^i -> F^i
    pub sect: Vec<Mat>,
    /// [φ'_0 σ(s_0) | ... | φ'_{p-1} σ(s_{p-1})]
    pub big_phi: Mat,
    pub big_phi_inv: Mat,
}

fn mod_p(m: &Mat) -> Mat {
    m.reduce_rows(&vec![1; m.rows()])
}

fn rank_mod_p(m: &Mat) -> usize {
    smith_normal_form(m).exps.iter().filter(|&&e| e == 0).count()
}

impl GradedFiberData {
    pub fn new(m: &FLModule) -> Result<Self> {
        let ctx = m.ctx();
        let p = ctx.p() as usize;
        if !m.killed_by_p() {
            return Err(Error::InvalidArgument("the Sen operator is defined on modules killed by p".into()));
        }
        let m = m.trimmed();
        if m.wmax() > p - 1 {
            return Err(Error::Range(format!("window [0, {}] exceeds [0, {}]", m.wmax(), p - 1)));
        }
        let m = m.padded(p - 1);
        let mut proj = Vec::with_capacity(p);
        let mut sect = Vec::with_capacity(p);
        let mut blocks = Vec::with_capacity(p);
        for i in 0..p {
            let c = m.vminus(i as i64 + 1).cokernel();
            blocks.push(m.phi(i).mul(&c.section.frobenius()));
            proj.push(c.projection.matrix().clone());
            sect.push(c.section);
        }
        let gr_dims: Vec<usize> = sect.iter().map(Mat::cols).collect();
        let refs: Vec<&Mat> = blocks.iter().collect();
        let big_phi = mod_p(&Mat::hstack(ctx, m.piece(0).ngens(), &refs));
        let big_phi_inv = big_phi
            .inverse()
            .map_err(|_| Error::InvalidModule("Φ: ⊕ F^* gr^i -> F^0 is not invertible".into()))?;
        Ok(GradedFiberData { module: m, gr_dims, proj, sect, big_phi, big_phi_inv: mod_p(&big_phi_inv) })
    }

    pub fn module(&self) -> &FLModule {
        &self.module
    }

    fn offsets(&self) -> Vec<usize> {
        let mut off = vec![0];
        for d in &self.gr_dims {
            off.push(off.last().unwrap() + d);
        }
        off
    }

    /// Θ = Φ Θ' Φ^{-1} with Θ' = -i on F^* gr^i.
    pub fn theta(&self) -> Mat {
        let ctx = self.module.ctx();
        let p = ctx.p() as i64;
        let diag: Vec<Zq> = self
            .gr_dims
            .iter()
            .enumerate()
            .flat_map(|(i, &d)| std::iter::repeat(Zq::from_i64(ctx, (-(i as i64)).rem_euclid(p))).take(d))
            .collect();
        mod_p(&self.big_phi.mul(&Mat::diagonal(ctx, &diag)).mul(&self.big_phi_inv))
    }

    /// Θ̄: F^{p-1} -> F^0 -> gr^0.
    pub fn theta_bar(&self) -> Mat {
        let p = self.module.ctx().p() as usize;
        let v = self.module.base().vminus_power(p - 1);
        mod_p(&self.proj[0].mul(&self.theta()).mul(v.matrix()))
    }

    /// The block gr^{p-1} -> gr^0 of α.
    pub fn alpha_block(&self) -> Mat {
        let p = self.module.ctx().p() as usize;
        mod_p(&self.theta_bar().mul(&self.sect[p - 1]))
    }

    /// α on ⊕ gr^i, supported on gr^{p-1} -> gr^0.
    pub fn alpha(&self) -> Mat {
        let ctx = self.module.ctx();
        let off = self.offsets();
        let dim = *off.last().unwrap();
        let p = ctx.p() as usize;
        let mut a = Mat::zeros(ctx, dim, dim);
        a.set_block(0, off[p - 1], &self.alpha_block());
        a
    }

    /// nullity(Θ + j) = dim gr^j for every j.
    pub fn eigenspaces_match(&self) -> bool {
        let ctx = self.module.ctx();
        let theta = self.theta();
        let n = theta.rows();
        self.gr_dims.iter().enumerate().all(|(j, &d)| {
            let shifted = theta.add(&Mat::scalar(ctx, n, &Zq::from_u64(ctx, j as u64)));
            n - rank_mod_p(&mod_p(&shifted)) == d
        })
    }
}

pub fn sen_theta(m: &FLModule) -> Result<Mat> {
    Ok(GradedFiberData::new(m)?.theta())
}

pub fn alpha(m: &FLModule) -> Result<Mat> {
    Ok(GradedFiberData::new(m)?.alpha())
}

/// (F, φ) ↦ (F, φ ∘ (1 - α)); returns the input unchanged when α = 0.
///
/// The block of α is used as a k-linear matrix on the σ-twisted coordinates,
/// so the new φ'_{p-1} is φ'_{p-1} - φ'_0 σ(s_0) A σ(π_{p-1}).
pub fn di_maz_endofunctor(m: &FLModule) -> Result<FLModule> {
    let g = GradedFiberData::new(m)?;
    let a = g.alpha_block();
    if a.is_zero() {
        return Ok(m.clone());
    }
    let ctx = m.ctx();
    let p = ctx.p() as usize;
    let padded = g.module();
    let b0 = padded.phi(0).mul(&g.sect[0].frobenius());
    let corr = b0.mul(&a).mul(&g.proj[p - 1].frobenius());
    let mut phi = padded.phis().to_vec();
    phi[p - 1] = mod_p(&phi[p - 1].sub(&corr));
    let out = FLModule::new(padded.base().clone(), phi)?;
    let r = out.validate()?;
    if !r.passed() {
        let why: Vec<String> = r.failures().map(|c| c.name.clone()).collect();
        return Err(Error::Verification(format!("corrected module fails FL: {}", why.join(", "))));
    }
    Ok(out)
}

/// The standard extension of k{p-1} by k{0} with class t:
/// F^0 = k e1 + k ẽ2, F^i = k e2 for 1 <= i <= p-1, φ'_{p-1}(e2) = t e1 + ẽ2.
pub fn standard_extension(ctx: &Ctx, t: &Zq) -> FLModule {
    let p = ctx.p() as usize;
    let w = p - 1;
    let one = Zq::one(ctx);
    let zero = Zq::zero(ctx);
    let mut pieces = vec![FPModule::mod_p(ctx, 2)];
    pieces.extend((1..=w).map(|_| FPModule::mod_p(ctx, 1)));
    let mut vminus = vec![Mat::from_rows(ctx, vec![vec![zero.clone()], vec![one.clone()]], 1).unwrap()];
    vminus.extend((2..=w).map(|_| Mat::identity(ctx, 1)));
    let base = GradedModule::from_matrices(pieces, vminus).expect("extension shape");
    let mut phi = vec![Mat::from_rows(ctx, vec![vec![one.clone(), zero.clone()], vec![zero.clone(), zero.clone()]], 2).unwrap()];
    phi.extend((1..w).map(|_| Mat::zeros(ctx, 2, 1)));
    phi.push(Mat::from_rows(ctx, vec![vec![t.reduce(1)], vec![one]], 1).unwrap());
    FLModule::new(base, phi).expect("extension data")
}

/// The class of an extension 0 -> k{0} -> M -> k{p-1} -> 0 in Ext^1 ≅ k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtClass {
    pub t: Zq,
    /// F_p coordinates of t in Ext^1(k{p-1}, k{0})
    pub coords: Vec<u64>,
    /// whether an FL splitting M <- k{p-1} exists
    pub splits: bool,
}

/// Scales a morphism so its first nonzero F_p coordinate is 1.
fn normalized(f: &FLMorphism) -> Result<FLMorphism> {
    let ctx = f.source().ctx();
    let fp = crate::arith::PrimeContext::prime(ctx.p(), 1)?;
    let coords: Vec<Zq> = f.maps().iter().flat_map(|m| fp_coords(m.matrix().entries(), &fp)).collect();
    let lead = coords.iter().find(|c| !c.is_zero()).ok_or_else(|| Error::Verification("zero morphism".into()))?;
    let inv = Zq::from_u64(ctx, lead.inverse()?.coeffs()[0]);
    let maps = f.maps().iter().map(|m| mod_p(&m.matrix().scale(&inv))).collect();
    FLMorphism::new(f.source(), f.target(), maps)
}

fn single_morphism(a: &FLModule, b: &FLModule, what: &str) -> Result<FLMorphism> {
    let basis = HomExt::new(a, b)?.hom_basis()?;
    if basis.len() != 1 {
        return Err(Error::InvalidModule(format!("expected a one-dimensional space of {what}, found dimension {}", basis.len())));
    }
    normalized(&basis[0])
}

pub fn extension_class(m: &FLModule) -> Result<ExtClass> {
    let ctx = m.ctx().clone();
    let p = ctx.p() as usize;
    let m = m.trimmed();
    let shape_ok = m.killed_by_p()
        && m.wmax() == p - 1
        && m.piece(0).ngens() == 2
        && (1..p).all(|i| m.piece(i as i64).ngens() == 1);
    if !shape_ok {
        return Err(Error::InvalidModule("extension_class needs rank 2 with F^0 of rank 2 and F^i of rank 1 for 1 <= i <= p-1".into()));
    }
    let sub = crate::fl::unit_mod_p(&ctx, 0);
    let quo = crate::fl::unit_mod_p(&ctx, p - 1);
    let iota = single_morphism(&sub, &m, "maps k{0} -> M")?;
    let pi = single_morphism(&m, &quo, "maps M -> k{p-1}")?;
    if !pi.compose(&iota)?.is_zero() {
        return Err(Error::InvalidModule("k{0} -> M -> k{p-1} is not a complex".into()));
    }

    // graded section of π: s_{p-1}(1) = e2, s_i = v-^{p-1-i} e2
    let c = pi.map(p - 1).matrix().get(0, 0).clone();
    let e2 = Mat::scalar(&ctx, 1, &c.inverse()?);
    let mut s = vec![e2];
    for i in (0..p - 1).rev() {
        let prev = s.last().unwrap().clone();
        s.push(mod_p(&m.vminus(i as i64 + 1).matrix().mul(&prev)));
    }
    s.reverse();
    let sig: Vec<Mat> = s.iter().map(Mat::frobenius).collect();
    let refs: Vec<&Mat> = sig.iter().collect();
    let big_s = Mat::block_diag(&ctx, &refs);
    // the section of F^*(k{p-1})_{v-=p} is the top summand
    let h = HomExt::new(&quo, &sub)?;
    let sec_q = h.section();
    let cocycle = mod_p(&m.phi_total().mul(&big_s).mul(sec_q).sub(&s[0].mul(&quo.phi_total()).mul(sec_q)));

    let iota0 = iota.map(0).matrix();
    let r = (0..2).find(|&r| !iota0.get(r, 0).is_zero()).expect("ι is injective");
    let t = mod_p(&Mat::scalar(&ctx, 1, &(cocycle.get(r, 0) * &iota0.get(r, 0).inverse()?))).get(0, 0).clone();
    if mod_p(&iota0.scale(&t)) != cocycle {
        return Err(Error::Verification("cocycle does not land in the sub k{0}".into()));
    }
    let coords_fp = h.cochain_coords(&Mat::scalar(&ctx, 1, &t));
    let zero_class = h.is_coboundary(&coords_fp);

    let splits = HomExt::new(&quo, &m)?
        .hom_basis()?
        .iter()
        .any(|b| pi.compose(b).map(|x| !x.is_zero()).unwrap_or(false));
    if zero_class != splits {
        return Err(Error::Verification(format!("class zero = {zero_class} but splitting exists = {splits}")));
    }
    Ok(ExtClass { t, coords: coords_fp.iter().map(|z| z.coeffs()[0]).collect(), splits })
}

/// Whether Θ̄ = 0, i.e. α = 0.
pub fn alpha_vanishes(m: &FLModule) -> Result<bool> {
    Ok(GradedFiberData::new(m)?.alpha_block().is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::PrimeContext;
    use crate::fl::{random_mod_p, unit_mod_p};
    use rand::SeedableRng;

    #[test]
    fn worked_extension_p3() {
        let c = PrimeContext::prime(3, 2).unwrap();
        let t = Zq::from_u64(&c, 2);
        let m = standard_extension(&c, &t);
        assert!(m.validate().unwrap().passed());
        let g = GradedFiberData::new(&m).unwrap();
        assert_eq!(g.theta(), Mat::from_i64(&c, &[vec![0, 2], vec![0, 1]], 2).unwrap());
        assert_eq!(g.alpha_block(), Mat::scalar(&c, 1, &t));
        assert!(g.alpha().mul(&g.alpha()).is_zero());
        assert!(g.eigenspaces_match());
        let e = extension_class(&m).unwrap();
        assert_eq!(e.t, t);
        assert!(!e.splits);
        let split = di_maz_endofunctor(&m).unwrap();
        assert_eq!(split, standard_extension(&c, &Zq::zero(&c)));
        let e0 = extension_class(&split).unwrap();
        assert!(e0.t.is_zero() && e0.splits);
    }

    #[test]
    fn unramified_quadratic_classes() {
        let c = PrimeContext::new(3, 1, 2, None).unwrap();
        let t = Zq::generator(&c);
        let m = standard_extension(&c, &t);
        assert_eq!(extension_class(&m).unwrap().t, t);
        let out = di_maz_endofunctor(&m).unwrap();
        assert!(extension_class(&out).unwrap().t.is_zero());
    }

    #[test]
    fn split_modules_have_diagonal_theta() {
        let c = PrimeContext::prime(5, 1).unwrap();
        let m = unit_mod_p(&c, 0).direct_sum(&unit_mod_p(&c, 2));
        let th = sen_theta(&m).unwrap();
        assert_eq!(th, Mat::from_i64(&c, &[vec![0, 0], vec![0, 3]], 2).unwrap());
        assert!(sen_theta(&unit_mod_p(&c, 0)).unwrap().is_zero());
        assert_eq!(di_maz_endofunctor(&m).unwrap(), m);
    }

    #[test]
    fn random_modules() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for p in [3u64, 5] {
            let c = PrimeContext::prime(p, 2).unwrap();
            for _ in 0..10 {
                let m = random_mod_p(&c, p as usize - 1, 4, &mut rng);
                let g = GradedFiberData::new(&m).unwrap();
                assert!(g.alpha().mul(&g.alpha()).is_zero());
                assert!(g.eigenspaces_match());
                let once = di_maz_endofunctor(&m).unwrap();
                assert!(once.validate().unwrap().passed());
            }
        }
    }
}
