//! Graded modules over A = W[v+, v-]/(v+ v- - p) and base change to B.
//!
//! A^m and B^m are free of rank one on g_m = p^{eps(m) - m} v+^m, with
//! eps_A(m) = max(m, 0) and eps_B(m) = e(m). Products follow
//! g_i g_j = p^{eps(i) + eps(j) - eps(i + j)} g_{i+j}.

use rand::Rng;

use super::{FPModule, GradedModule, Mat, ModuleMap, WeightWindow};
use crate::arith::{pd_exponent, Ctx, Zq};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Ring {
    A,
    B,
}

impl Ring {
    pub fn eps(self, p: u64, m: i64) -> u32 {
        match self {
            Ring::A => m.max(0) as u32,
            Ring::B => pd_exponent(p, m) as u32,
        }
    }

    /// Exponent in g_i g_j = p^k g_{i+j}.
    pub fn structure_exp(self, p: u64, i: i64, j: i64) -> u32 {
        self.eps(p, i) + self.eps(p, j) - self.eps(p, i + j)
    }
}

/// Homogeneous relation of degree `degree`: sum_j coeffs[j] g^A_{degree - k_j} x_j.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub degree: i64,
    pub coeffs: Vec<Zq>,
}

/// Finitely presented graded A-module over Z_q/p^N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AGradedModule {
    ctx: Ctx,
    gen_degrees: Vec<i64>,
    relations: Vec<Relation>,
}

impl AGradedModule {
    pub fn new(ctx: &Ctx, gen_degrees: Vec<i64>, relations: Vec<Relation>) -> Result<Self> {
        for (k, r) in relations.iter().enumerate() {
            if r.coeffs.len() != gen_degrees.len() {
                return Err(Error::Dimension(format!(
                    "relation {k} has {} coefficients for {} generators",
                    r.coeffs.len(),
                    gen_degrees.len()
                )));
            }
        }
        Ok(AGradedModule { ctx: ctx.clone(), gen_degrees, relations })
    }

    /// A{j}: free on one generator of degree j.
    pub fn free(ctx: &Ctx, j: i64) -> Self {
        AGradedModule { ctx: ctx.clone(), gen_degrees: vec![j], relations: Vec::new() }
    }

    pub fn zero(ctx: &Ctx) -> Self {
        AGradedModule { ctx: ctx.clone(), gen_degrees: Vec::new(), relations: Vec::new() }
    }

    /// Generators and relations in degrees [0, w].
    pub fn random<R: Rng + ?Sized>(ctx: &Ctx, w: i64, rng: &mut R) -> Self {
        let g = rng.gen_range(1..=3);
        let gen_degrees: Vec<i64> = (0..g).map(|_| rng.gen_range(0..=w)).collect();
        let relations = (0..rng.gen_range(0..=3))
            .map(|_| Relation { degree: rng.gen_range(0..=w), coeffs: (0..g).map(|_| Zq::random(ctx, rng)).collect() })
            .collect();
        AGradedModule { ctx: ctx.clone(), gen_degrees, relations }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn gen_degrees(&self) -> &[i64] {
        &self.gen_degrees
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    /// Smallest window outside which generators and relations are constant.
    pub fn support(&self) -> (i64, i64) {
        let degs = self.gen_degrees.iter().chain(self.relations.iter().map(|r| &r.degree));
        let lo = degs.clone().min().copied().unwrap_or(0);
        let hi = degs.max().copied().unwrap_or(0);
        (lo, hi)
    }

    /// Degree-i relation matrix of M ⊗_A R on the generators x_j ⊗ g_{i - k_j}.
    fn raw_relations(&self, ring: Ring, i: i64) -> Mat {
        let p = self.ctx.p();
        let g = self.gen_degrees.len();
        Mat::from_fn(&self.ctx, g, self.relations.len(), |j, r| {
            let rel = &self.relations[r];
            let k = self.gen_degrees[j];
            let e = Ring::A.eps(p, rel.degree - k) + ring.eps(p, i - rel.degree) - ring.eps(p, i - k);
            &rel.coeffs[j] * &Zq::p_power(&self.ctx, e)
        })
    }

    /// Diagonal matrix of multiplication by g_s from degree i to i + s, in raw coordinates.
    fn raw_mult(&self, ring: Ring, i: i64, s: i64) -> Mat {
        let p = self.ctx.p();
        let d: Vec<Zq> = self
            .gen_degrees
            .iter()
            .map(|&k| Zq::p_power(&self.ctx, ring.structure_exp(p, s, i - k)))
            .collect();
        Mat::diagonal(&self.ctx, &d)
    }

    pub fn piece(&self, ring: Ring, i: i64) -> FPModule {
        FPModule::presented(&self.ctx, &self.raw_relations(ring, i)).module
    }

    /// Pieces of M ⊗_A R on [lo, hi] with their v+ and v- maps.
    pub fn pieces(&self, ring: Ring, lo: i64, hi: i64) -> APieces {
        assert!(lo <= hi);
        let qs: Vec<_> = (lo..=hi).map(|i| FPModule::presented(&self.ctx, &self.raw_relations(ring, i))).collect();
        let conv = |from: usize, to: usize, raw: Mat| {
            let m = qs[to].to_new.mul(&raw).mul(&qs[from].from_new);
            ModuleMap::new(qs[from].module.clone(), qs[to].module.clone(), m).expect("graded multiplication descends")
        };
        let n = qs.len();
        let vplus = (0..n - 1).map(|k| conv(k, k + 1, self.raw_mult(ring, lo + k as i64, 1))).collect();
        let vminus = (0..n - 1).map(|k| conv(k + 1, k, self.raw_mult(ring, lo + k as i64 + 1, -1))).collect();
        APieces { ctx: self.ctx.clone(), lo, pieces: qs.into_iter().map(|q| q.module).collect(), vplus, vminus }
    }

    /// N^i -> (N ⊗_A B)^i.
    pub fn comparison(&self, i: i64) -> ModuleMap {
        let p = self.ctx.p();
        let qa = FPModule::presented(&self.ctx, &self.raw_relations(Ring::A, i));
        let qb = FPModule::presented(&self.ctx, &self.raw_relations(Ring::B, i));
        let d: Vec<Zq> = self
            .gen_degrees
            .iter()
            .map(|&k| Zq::p_power(&self.ctx, Ring::A.eps(p, i - k) - Ring::B.eps(p, i - k)))
            .collect();
        let m = qb.to_new.mul(&Mat::diagonal(&self.ctx, &d)).mul(&qa.from_new);
        ModuleMap::new(qa.module, qb.module, m).expect("A -> B is a ring map")
    }

    pub fn base_change_a_to_b(&self) -> BaseChangeReport {
        let p = self.ctx.p() as i64;
        let (_, hi) = self.support();
        let top = hi.max(p);
        let comparisons: Vec<ModuleMap> = (0..=top).map(|i| self.comparison(i)).collect();
        BaseChangeReport {
            a_pieces: comparisons.iter().map(|c| c.source().clone()).collect(),
            b_pieces: comparisons.iter().map(|c| c.target().clone()).collect(),
            isomorphism: comparisons.iter().map(ModuleMap::is_isomorphism).collect(),
            p: self.ctx.p(),
        }
    }

    /// The v- part in degrees [0, w] for effective modules.
    pub fn to_graded(&self, w: usize) -> GradedModule {
        let ap = self.pieces(Ring::A, 0, w as i64);
        GradedModule::new(ap.pieces.clone(), ap.vminus.clone()).expect("consistent pieces")
    }
}

/// Pieces of (M ⊗_A B)^i and (M)^i in degrees 0..=max(hi, p), with the comparison table.
#[derive(Debug, Clone)]
pub struct BaseChangeReport {
    pub p: u64,
    pub a_pieces: Vec<FPModule>,
    pub b_pieces: Vec<FPModule>,
    /// isomorphism[i]: whether N^i -> (N ⊗ B)^i is bijective
    pub isomorphism: Vec<bool>,
}

impl BaseChangeReport {
    /// Whether the comparison is bijective in degrees 0..p-1.
    pub fn below_p_ok(&self) -> bool {
        self.isomorphism.iter().take(self.p as usize).all(|&b| b)
    }
}

/// A-module data on a window [lo, hi]: constant below with v- = 1, v+ = p,
/// constant above with v+ = 1, v- = p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct APieces {
    ctx: Ctx,
    lo: i64,
    pieces: Vec<FPModule>,
    /// vplus[k]: M^{lo+k} -> M^{lo+k+1}
    vplus: Vec<ModuleMap>,
    /// vminus[k]: M^{lo+k+1} -> M^{lo+k}
    vminus: Vec<ModuleMap>,
}

impl APieces {
    pub fn new(lo: i64, pieces: Vec<FPModule>, vplus: Vec<ModuleMap>, vminus: Vec<ModuleMap>) -> Result<Self> {
        let ctx = pieces.first().ok_or_else(|| Error::InvalidModule("no pieces".into()))?.ctx().clone();
        if vplus.len() + 1 != pieces.len() || vminus.len() + 1 != pieces.len() {
            return Err(Error::Dimension("need one v+ and one v- per step".into()));
        }
        for k in 0..vplus.len() {
            if vplus[k].source() != &pieces[k] || vplus[k].target() != &pieces[k + 1] {
                return Err(Error::Dimension(format!("v+ from degree {} has wrong ends", lo + k as i64)));
            }
            if vminus[k].source() != &pieces[k + 1] || vminus[k].target() != &pieces[k] {
                return Err(Error::Dimension(format!("v- into degree {} has wrong ends", lo + k as i64)));
            }
        }
        Ok(APieces { ctx, lo, pieces, vplus, vminus })
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.pieces.len() as i64 - 1
    }

    pub fn piece(&self, i: i64) -> &FPModule {
        let k = (i.clamp(self.lo, self.hi()) - self.lo) as usize;
        &self.pieces[k]
    }

    /// v+: M^i -> M^{i+1}.
    pub fn vplus(&self, i: i64) -> ModuleMap {
        if i < self.lo {
            ModuleMap::scalar(self.piece(i), &Zq::p_power(&self.ctx, 1))
        } else if i >= self.hi() {
            ModuleMap::identity(self.piece(i))
        } else {
            self.vplus[(i - self.lo) as usize].clone()
        }
    }

    /// v-: M^i -> M^{i-1}.
    pub fn vminus(&self, i: i64) -> ModuleMap {
        if i <= self.lo {
            ModuleMap::identity(self.piece(i))
        } else if i > self.hi() {
            ModuleMap::scalar(self.piece(i), &Zq::p_power(&self.ctx, 1))
        } else {
            self.vminus[(i - self.lo - 1) as usize].clone()
        }
    }

    /// v+ v- = p and v- v+ = p in every degree of the window.
    pub fn validate(&self) -> Result<()> {
        let p = Zq::p_power(&self.ctx, 1);
        for i in self.lo..=self.hi() {
            let up_down = self.vminus(i + 1).compose(&self.vplus(i))?;
            let down_up = self.vplus(i - 1).compose(&self.vminus(i))?;
            if up_down != ModuleMap::scalar(self.piece(i), &p) || down_up != ModuleMap::scalar(self.piece(i), &p) {
                return Err(Error::InvalidModule(format!("v+ v- != p in degree {i}")));
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(FPModule::is_zero)
    }

    /// [a, b]: v- bijective in degrees <= a, v+ bijective in degrees >= b.
    pub fn weight_window(&self) -> WeightWindow {
        if self.is_zero() {
            return WeightWindow::Empty;
        }
        let (lo, hi) = (self.lo, self.hi());
        let a = (lo + 1..=hi + 1).find(|&i| !self.vminus(i).is_isomorphism()).unwrap() - 1;
        let b = (lo - 1..hi).rev().find(|&i| !self.vplus(i).is_isomorphism()).unwrap() + 1;
        WeightWindow::Bounded(a, b)
    }

    /// w_{<=b}: M'^i = M^i for i < b and M^b for i >= b.
    pub fn weight_truncate(&self, b: i64) -> APieces {
        if b < self.lo {
            return APieces { ctx: self.ctx.clone(), lo: b, pieces: vec![self.piece(self.lo).clone()], vplus: vec![], vminus: vec![] };
        }
        let pieces = (self.lo..=b).map(|i| self.piece(i).clone()).collect();
        let vplus = (self.lo..b).map(|i| self.vplus(i)).collect();
        let vminus = (self.lo + 1..=b).map(|i| self.vminus(i)).collect();
        APieces { ctx: self.ctx.clone(), lo: self.lo, pieces, vplus, vminus }
    }

    /// Degreewise maps w_{<=b} M -> M given by powers of v+ above b, on [lo', max(hi, b)].
    pub fn truncation_counit(&self, b: i64) -> Vec<ModuleMap> {
        let t = self.weight_truncate(b);
        (t.lo.min(self.lo)..=self.hi().max(b))
            .map(|i| {
                if i <= b {
                    ModuleMap::identity(self.piece(i))
                } else {
                    let mut acc = ModuleMap::identity(self.piece(b));
                    for k in b..i {
                        acc = self.vplus(k).compose(&acc).expect("consecutive degrees");
                    }
                    acc
                }
            })
            .collect()
    }

    /// Whether the counit w_{<=b} M -> M is an isomorphism of A-modules.
    pub fn truncation_is_identity(&self, b: i64) -> bool {
        let t = self.weight_truncate(b);
        let lo = t.lo.min(self.lo);
        let maps = self.truncation_counit(b);
        let at = |i: i64| &maps[(i - lo) as usize];
        (lo..=self.hi().max(b)).all(|i| {
            at(i).source() == t.piece(i)
                && at(i).is_isomorphism()
                && (i == lo || self.vminus(i).compose(at(i)).ok() == at(i - 1).compose(&t.vminus(i)).ok())
                && self.vplus(i).compose(at(i)).ok()
                    == maps.get((i + 1 - lo) as usize).unwrap_or(at(i)).compose(&t.vplus(i)).ok()
        })
    }

    /// Same data on a larger window.
    pub fn extended(&self, lo: i64, hi: i64) -> APieces {
        let (lo, hi) = (lo.min(self.lo), hi.max(self.hi()));
        APieces {
            ctx: self.ctx.clone(),
            lo,
            pieces: (lo..=hi).map(|i| self.piece(i).clone()).collect(),
            vplus: (lo..hi).map(|i| self.vplus(i)).collect(),
            vminus: (lo + 1..=hi).map(|i| self.vminus(i)).collect(),
        }
    }
}

/// One degree of the Tor_1 comparison.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct TorCheck {
    pub degree: i64,
    /// length of ker(p) on (B/A)^i
    pub b_over_a: u64,
    /// length of (A/v-){p}^i
    pub a_mod_vminus: u64,
}

/// ker(p | (B/A)^i) against (A/v-){p}^i for 0 <= i <= w.
pub fn tor1_check(ctx: &Ctx, w: i64) -> Vec<TorCheck> {
    let p = ctx.p();
    let one = FPModule::free(ctx, 1);
    let pz = Zq::p_power(ctx, 1);
    (0..=w)
        .map(|i| {
            let incl = ModuleMap::scalar(&one, &Zq::p_power(ctx, Ring::A.eps(p, i) - Ring::B.eps(p, i)));
            let quot = incl.cokernel().module().clone();
            let ker_p = ModuleMap::scalar(&quot, &pz).kernel().source().length();
            let j = i - p as i64;
            let vm = ModuleMap::scalar(&one, &Zq::p_power(ctx, Ring::A.structure_exp(p, -1, j + 1)));
            TorCheck { degree: i, b_over_a: ker_p, a_mod_vminus: vm.cokernel().module().length() }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::PrimeContext;
    use rand::SeedableRng;

    #[test]
    fn free_module_base_change() {
        for p in [2, 3, 5] {
            let c = PrimeContext::prime(p, 3).unwrap();
            let r = AGradedModule::free(&c, 0).base_change_a_to_b();
            let p = p as usize;
            assert!(r.below_p_ok());
            assert!(!r.isomorphism[p]);
            assert_eq!(r.a_pieces[p], FPModule::free(&c, 1));
        }
    }

    #[test]
    fn tor_pieces_start_at_p() {
        let c = PrimeContext::prime(3, 3).unwrap();
        for t in tor1_check(&c, 8) {
            let expect = u64::from(t.degree >= 3);
            assert_eq!((t.b_over_a, t.a_mod_vminus), (expect, expect), "degree {}", t.degree);
        }
    }

    #[test]
    fn windows_and_truncation() {
        let c = PrimeContext::prime(3, 2).unwrap();
        let a0 = AGradedModule::free(&c, 0).pieces(Ring::A, -2, 4);
        a0.validate().unwrap();
        assert_eq!(a0.weight_window(), WeightWindow::Bounded(0, 0));
        let a2 = AGradedModule::free(&c, 2).pieces(Ring::A, -1, 4);
        assert_eq!(a2.weight_window(), WeightWindow::Bounded(2, 2));
        let t = a2.weight_truncate(1);
        t.validate().unwrap();
        assert_eq!(t.weight_window(), WeightWindow::Bounded(1, 1));
        assert!(a0.truncation_is_identity(0));
        assert!(a0.truncation_is_identity(3));
        assert!(!a2.truncation_is_identity(1));
        let low = a2.weight_truncate(-5);
        assert_eq!(low.lo(), -5);
        assert_eq!(low.piece(-5), a2.piece(-1));
    }

    #[test]
    fn random_effective_modules_compare_below_p() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for p in [2u64, 3, 5] {
            let c = PrimeContext::prime(p, 3).unwrap();
            for _ in 0..10 {
                let m = AGradedModule::random(&c, p as i64 + 2, &mut rng);
                m.pieces(Ring::A, -1, p as i64 + 3).validate().unwrap();
                m.pieces(Ring::B, -1, p as i64 + 3).validate().unwrap();
                assert!(m.base_change_a_to_b().below_p_ok());
            }
        }
    }
}
