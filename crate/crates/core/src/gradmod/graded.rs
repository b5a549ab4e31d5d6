//! Graded modules over W(k)[v-] on a finite effective window.

use super::{Cokernel, FPModule, Mat, ModuleMap};
use crate::arith::{Ctx, Zq};
use crate::error::{Error, Result};

/// Pieces F^0..F^wmax with v-: F^i -> F^{i-1}; F^i = F^0 below 0 and 0 above wmax.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedModule {
    ctx: Ctx,
    pieces: Vec<FPModule>,
    /// vminus[i - 1]: F^i -> F^{i-1}
    vminus: Vec<ModuleMap>,
}

/// Weight window [a, b], or no weights at all for the zero module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum WeightWindow {
    Empty,
    Bounded(i64, i64),
}

impl WeightWindow {
    pub fn shift(self, i: i64) -> Self {
        match self {
            WeightWindow::Empty => WeightWindow::Empty,
            WeightWindow::Bounded(a, b) => WeightWindow::Bounded(a + i, b + i),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Fiber {
    /// H0 = cokernel of the differential
    pub h0: Cokernel,
    /// inclusion of H^{-1} = kernel
    pub h_minus1: ModuleMap,
    pub differential: ModuleMap,
}

impl GradedModule {
    pub fn new(pieces: Vec<FPModule>, vminus: Vec<ModuleMap>) -> Result<Self> {
        let ctx = pieces.first().ok_or_else(|| Error::InvalidModule("no pieces".into()))?.ctx().clone();
        if vminus.len() + 1 != pieces.len() {
            return Err(Error::Dimension(format!("{} pieces need {} v- maps, got {}", pieces.len(), pieces.len() - 1, vminus.len())));
        }
        for (k, v) in vminus.iter().enumerate() {
            let i = k + 1;
            if v.source() != &pieces[i] || v.target() != &pieces[i - 1] {
                return Err(Error::Dimension(format!("v- in degree {i} does not go F^{i} -> F^{}", i - 1)));
            }
        }
        Ok(GradedModule { ctx, pieces, vminus })
    }

    /// Builds the maps from raw matrices, checking them.
    pub fn from_matrices(pieces: Vec<FPModule>, vminus: Vec<Mat>) -> Result<Self> {
        if vminus.len() + 1 != pieces.len() {
            return Err(Error::Dimension(format!("{} pieces need {} v- maps, got {}", pieces.len(), pieces.len().saturating_sub(1), vminus.len())));
        }
        let maps = vminus
            .into_iter()
            .enumerate()
            .map(|(k, m)| {
                ModuleMap::new(pieces[k + 1].clone(), pieces[k].clone(), m).map_err(|e| match e {
                    Error::Dimension(s) => Error::Dimension(format!("vminus {}: {s}", k + 1)),
                    Error::IllDefined(s) => Error::IllDefined(format!("vminus {}: {s}", k + 1)),
                    e => e,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(pieces, maps)
    }

    pub fn zero(ctx: &Ctx) -> Self {
        GradedModule { ctx: ctx.clone(), pieces: vec![FPModule::zero(ctx)], vminus: Vec::new() }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn wmax(&self) -> usize {
        self.pieces.len() - 1
    }

    pub fn pieces(&self) -> &[FPModule] {
        &self.pieces
    }

    pub fn piece(&self, i: i64) -> FPModule {
        if i < 0 {
            self.pieces[0].clone()
        } else if i as usize > self.wmax() {
            FPModule::zero(&self.ctx)
        } else {
            self.pieces[i as usize].clone()
        }
    }

    /// v-: F^i -> F^{i-1} under the window conventions.
    pub fn vminus(&self, i: i64) -> ModuleMap {
        if i <= 0 {
            ModuleMap::identity(&self.pieces[0])
        } else if i as usize > self.wmax() {
            ModuleMap::zero(&FPModule::zero(&self.ctx), &self.piece(i - 1))
        } else {
            self.vminus[i as usize - 1].clone()
        }
    }

    pub fn vminus_maps(&self) -> &[ModuleMap] {
        &self.vminus
    }

    /// v-^i: F^i -> F^0, the identity for i = 0.
    pub fn vminus_power(&self, i: usize) -> ModuleMap {
        let mut acc = ModuleMap::identity(&self.piece(i as i64));
        for k in (1..=i).rev() {
            acc = self.vminus(k as i64).compose(&acc).expect("consecutive pieces");
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(FPModule::is_zero)
    }

    /// Same module with zero pieces appended up to degree w.
    pub fn padded(&self, w: usize) -> GradedModule {
        let mut out = self.clone();
        while out.wmax() < w {
            let i = out.wmax() as i64 + 1;
            out.vminus.push(ModuleMap::zero(&FPModule::zero(&self.ctx), &out.piece(i - 1)));
            out.pieces.push(FPModule::zero(&self.ctx));
        }
        out
    }

    /// Drops trailing zero pieces.
    pub fn trimmed(&self) -> GradedModule {
        let mut out = self.clone();
        while out.wmax() > 0 && out.pieces.last().unwrap().is_zero() {
            out.pieces.pop();
            out.vminus.pop();
        }
        out
    }

    pub fn direct_sum(&self, other: &GradedModule) -> GradedModule {
        let w = self.wmax().max(other.wmax());
        let (a, b) = (self.padded(w), other.padded(w));
        let pieces = (0..=w).map(|i| FPModule::direct_sum(&self.ctx, &[&a.pieces[i], &b.pieces[i]])).collect();
        let vminus = (0..w).map(|k| ModuleMap::direct_sum(&[&a.vminus[k], &b.vminus[k]])).collect();
        GradedModule { ctx: self.ctx.clone(), pieces, vminus }
    }

    /// F'^k = F^{k-j}.
    pub fn shift(&self, j: usize) -> GradedModule {
        let mut pieces = vec![self.pieces[0].clone(); j];
        pieces.extend(self.pieces.iter().cloned());
        let mut vminus: Vec<ModuleMap> = (0..j).map(|_| ModuleMap::identity(&self.pieces[0])).collect();
        vminus.extend(self.vminus.iter().cloned());
        GradedModule { ctx: self.ctx.clone(), pieces, vminus }
    }

    /// Offset of piece i inside ⊕_{k=lo}^{wmax} F^k.
    fn offsets(&self, lo: usize) -> Vec<usize> {
        let mut off = vec![0; self.pieces.len() + 1];
        for i in lo..=self.wmax() {
            off[i + 1] = off[i] + self.pieces[i].ngens();
        }
        off
    }

    /// d: ⊕_{i>=1} F^i -> ⊕_{i>=0} F^i, d(x_i) = v-(x_i) - a x_i.
    pub fn fiber_differential(&self, a: &Zq) -> ModuleMap {
        let w = self.wmax();
        let src_parts: Vec<&FPModule> = self.pieces[1..].iter().collect();
        let tgt_parts: Vec<&FPModule> = self.pieces.iter().collect();
        let src = FPModule::direct_sum(&self.ctx, &src_parts);
        let tgt = FPModule::direct_sum(&self.ctx, &tgt_parts);
        let so = self.offsets(1);
        let to = self.offsets(0);
        let mut m = Mat::zeros(&self.ctx, tgt.ngens(), src.ngens());
        for i in 1..=w {
            let v = self.vminus[i - 1].matrix();
            m.set_block(to[i - 1], so[i] - so[1], v);
            let n = self.pieces[i].ngens();
            for k in 0..n {
                let r = to[i] + k;
                let c = so[i] - so[1] + k;
                m.set(r, c, m.get(r, c) - a);
            }
        }
        ModuleMap::new(src, tgt, m).expect("fiber differential is well defined")
    }

    /// Derived fiber at v- = a in the finite-window model.
    pub fn graded_fiber(&self, a: &Zq) -> Fiber {
        let d = self.fiber_differential(a);
        Fiber { h0: d.cokernel(), h_minus1: d.kernel(), differential: d }
    }

    pub fn graded_fiber_at(&self, a: i64) -> Fiber {
        self.graded_fiber(&Zq::from_i64(&self.ctx, a))
    }

    pub fn weight_window(&self) -> WeightWindow {
        let w = self.wmax() as i64;
        let b = match (0..=w).rev().find(|&i| !self.piece(i).is_zero()) {
            Some(b) => b,
            None => return WeightWindow::Empty,
        };
        let a = (1..=w + 1).find(|&i| !self.vminus(i).is_isomorphism()).map(|i| i - 1).unwrap_or(w);
        WeightWindow::Bounded(a, b)
    }

    /// M/pM degreewise.
    pub fn reduce_mod_p(&self) -> GradedModule {
        let pieces: Vec<FPModule> = self.pieces.iter().map(|m| m.truncate(1)).collect();
        let vminus = self
            .vminus
            .iter()
            .enumerate()
            .map(|(k, v)| ModuleMap::new(pieces[k + 1].clone(), pieces[k].clone(), v.matrix().clone()).expect("reduction"))
            .collect();
        GradedModule { ctx: self.ctx.clone(), pieces, vminus }
    }

    pub fn killed_by_p(&self) -> bool {
        self.pieces.iter().all(FPModule::killed_by_p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::PrimeContext;

    fn w1(ctx: &Ctx, v: i64) -> GradedModule {
        let f = FPModule::free(ctx, 1);
        GradedModule::from_matrices(vec![f.clone(), f], vec![Mat::from_i64(ctx, &[vec![v]], 1).unwrap()]).unwrap()
    }

    #[test]
    fn fibers_of_tate_module() {
        let c = PrimeContext::prime(3, 4).unwrap();
        let m = w1(&c, 1);
        let f1 = m.graded_fiber_at(1);
        assert_eq!(f1.h0.module().exps(), &[4]);
        assert!(f1.h_minus1.source().is_zero());
        let f0 = m.graded_fiber_at(0);
        assert_eq!(f0.h0.module().exps(), &[4]);
        // the surviving generator sits in the degree-1 summand
        assert!(f0.h0.section.get(0, 0).is_zero() && f0.h0.section.get(1, 0).is_unit());
        assert!(f0.h_minus1.source().is_zero());
    }

    #[test]
    fn fiber_at_p_of_multiplication_by_p() {
        let c = PrimeContext::prime(3, 4).unwrap();
        let m = w1(&c, 3);
        let f = m.graded_fiber_at(3);
        assert_eq!(f.h0.module().elementary_divisors(), vec![1, 4]);
        assert_eq!(f.h_minus1.source().elementary_divisors(), vec![1]);
    }

    #[test]
    fn weight_windows() {
        let c = PrimeContext::prime(5, 2).unwrap();
        let one = GradedModule::from_matrices(vec![FPModule::free(&c, 1)], vec![]).unwrap();
        assert_eq!(one.weight_window(), WeightWindow::Bounded(0, 0));
        let w2 = one.shift(2);
        assert_eq!(w2.weight_window(), WeightWindow::Bounded(2, 2));
        assert_eq!(one.direct_sum(&w2).weight_window(), WeightWindow::Bounded(0, 2));
        assert_eq!(GradedModule::zero(&c).weight_window(), WeightWindow::Empty);
    }
}
