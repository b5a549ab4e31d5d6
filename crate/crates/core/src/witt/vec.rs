use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use super::poly::WittCtx;
use crate::error::{Error, Result};
use crate::ring::CoeffRing;

/// A p-typical Witt vector of finite length.
#[derive(Clone)]
pub struct WittVec<R> {
    ctx: Arc<WittCtx>,
    comps: Vec<R>,
}

impl<R: PartialEq> PartialEq for WittVec<R> {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.p == other.ctx.p && self.comps == other.comps
    }
}

impl<R: fmt::Debug> fmt::Debug for WittVec<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.comps).finish()
    }
}

impl<R: fmt::Display> fmt::Display for WittVec<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.comps.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl<R: CoeffRing> WittVec<R> {
    pub fn new(p: u64, comps: Vec<R>) -> Result<Self> {
        let ctx = WittCtx::get(p, comps.len().max(1))?;
        Ok(WittVec { ctx, comps })
    }

    fn with_comps(&self, comps: Vec<R>) -> Self {
        if comps.len() <= self.ctx.n {
            WittVec { ctx: self.ctx.clone(), comps }
        } else {
            let ctx = WittCtx::get(self.ctx.p, comps.len()).expect("prime already checked");
            WittVec { ctx, comps }
        }
    }

    pub fn zero(p: u64, n: usize, like: &R) -> Result<Self> {
        Self::new(p, vec![like.zero_like(); n])
    }

    pub fn one(p: u64, n: usize, like: &R) -> Result<Self> {
        Self::teichmuller(p, n, &like.one_like())
    }

    /// [r] = (r, 0, ..., 0)
    pub fn teichmuller(p: u64, n: usize, r: &R) -> Result<Self> {
        let mut comps = vec![r.zero_like(); n];
        if n > 0 {
            comps[0] = r.clone();
        }
        Self::new(p, comps)
    }

    pub fn p(&self) -> u64 {
        self.ctx.p
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn comps(&self) -> &[R] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(CoeffRing::is_zero_elem)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.ctx.p != other.ctx.p || self.len() != other.len() {
            return Err(Error::Dimension(format!(
                "Witt vectors of length {} and {} (p = {}, {})",
                self.len(),
                other.len(),
                self.ctx.p,
                other.ctx.p
            )));
        }
        Ok(())
    }

    fn binary(&self, other: &Self, table: &[super::poly::IntPoly]) -> Self {
        let n = self.len();
        let like = &self.comps[0];
        let comps = (0..n)
            .map(|m| {
                // polynomial m only involves X_0..X_m and Y_0..Y_m
                let nt = self.ctx.n;
                let mut vars = vec![like.zero_like(); 2 * nt];
                for i in 0..=m {
                    vars[i] = self.comps[i].clone();
                    vars[nt + i] = other.comps[i].clone();
                }
                table[m].eval(&vars, like)
            })
            .collect();
        self.with_comps(comps)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        if self.is_empty() {
            return Ok(self.clone());
        }
        Ok(self.binary(other, &self.ctx.sum))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        if self.is_empty() {
            return Ok(self.clone());
        }
        Ok(self.binary(other, &self.ctx.prod))
    }

    pub fn neg(&self) -> Self {
        if self.is_empty() {
            return self.clone();
        }
        let like = &self.comps[0];
        let mut vars = vec![like.zero_like(); self.ctx.n];
        vars[..self.len()].clone_from_slice(&self.comps);
        let comps = (0..self.len()).map(|m| self.ctx.neg[m].eval(&vars, like)).collect();
        self.with_comps(comps)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// k·x by double-and-add.
    pub fn scale_int(&self, k: i64) -> Self {
        let mut acc = self.with_comps(self.comps.iter().map(CoeffRing::zero_like).collect());
        let mut base = if k < 0 { self.neg() } else { self.clone() };
        let mut k = k.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.add(&base).unwrap();
            }
            k >>= 1;
            if k > 0 {
                base = base.add(&base).unwrap();
            }
        }
        acc
    }

    /// The integer k in W_n, with coefficients like `like`.
    pub fn integer(p: u64, n: usize, k: i64, like: &R) -> Result<Self> {
        Ok(Self::one(p, n, like)?.scale_int(k))
    }

    /// F: W_n -> W_{n-1}
    pub fn frobenius(&self) -> Self {
        if self.len() <= 1 {
            return self.with_comps(Vec::new());
        }
        let like = &self.comps[0];
        let mut vars = vec![like.zero_like(); self.ctx.n];
        vars[..self.len()].clone_from_slice(&self.comps);
        let comps = (0..self.len() - 1).map(|m| self.ctx.frob[m].eval(&vars, like)).collect();
        self.with_comps(comps)
    }

    /// V: W_n -> W_{n+1}
    pub fn verschiebung(&self) -> Self {
        let zero = match self.comps.first() {
            Some(c) => c.zero_like(),
            None => return self.clone(),
        };
        let mut comps = Vec::with_capacity(self.len() + 1);
        comps.push(zero);
        comps.extend(self.comps.iter().cloned());
        self.with_comps(comps)
    }

    pub fn truncate(&self, n: usize) -> Self {
        self.with_comps(self.comps[..n.min(self.len())].to_vec())
    }

    /// Dropping the leading zero component: the inverse of V.
    pub fn unshift(&self) -> Result<Self> {
        match self.comps.first() {
            Some(c) if c.is_zero_elem() => Ok(self.with_comps(self.comps[1..].to_vec())),
            Some(_) => Err(Error::Verification("first component is not zero".into())),
            None => Err(Error::Dimension("empty Witt vector".into())),
        }
    }

    /// gh_m = sum_{i <= m} p^i x_i^{p^{m-i}}
    pub fn ghost(&self) -> Vec<R> {
        let p = self.ctx.p;
        (0..self.len())
            .map(|m| {
                let like = &self.comps[0];
                let mut acc = like.zero_like();
                for i in 0..=m {
                    let c = like.int_like(&BigInt::from(p).pow(i as u32));
                    acc = acc.plus(&c.times(&self.comps[i].pow_u(p.pow((m - i) as u32))));
                }
                acc
            })
            .collect()
    }

    pub fn map<S: CoeffRing>(&self, f: impl Fn(&R) -> S) -> WittVec<S> {
        WittVec { ctx: self.ctx.clone(), comps: self.comps.iter().map(f).collect() }
    }

    pub fn try_map<S: CoeffRing>(&self, f: impl Fn(&R) -> Result<S>) -> Result<WittVec<S>> {
        Ok(WittVec { ctx: self.ctx.clone(), comps: self.comps.iter().map(f).collect::<Result<_>>()? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{PrimeContext, Zq};
    use crate::laurent::{BElement, RingDescriptor};

    #[test]
    fn ghost_of_teichmuller_and_v1() {
        let r = RingDescriptor::b(3, 40);
        let a = BElement::vplus(r, 1);
        let t = WittVec::teichmuller(3, 3, &a).unwrap();
        assert_eq!(t.ghost(), vec![a.clone(), a.pow(3), a.pow(9)]);
        let v1 = WittVec::one(3, 2, &a).unwrap().verschiebung();
        let three = BElement::from_int(r, 3);
        assert_eq!(v1.ghost(), vec![BElement::zero(r), three.clone(), three]);
    }

    #[test]
    fn frobenius_of_teichmuller() {
        let r = RingDescriptor::b(2, 40);
        let t = WittVec::teichmuller(2, 3, &BElement::vplus(r, 1)).unwrap();
        let f = t.frobenius();
        assert_eq!(f, WittVec::teichmuller(2, 2, &BElement::vplus(r, 2)).unwrap());
    }

    #[test]
    fn negation_and_zero() {
        let c = PrimeContext::prime(2, 5).unwrap();
        let x = WittVec::new(2, vec![Zq::from_u64(&c, 3), Zq::from_u64(&c, 5), Zq::from_u64(&c, 7)]).unwrap();
        let z = WittVec::zero(2, 3, &Zq::zero(&c)).unwrap();
        assert_eq!(x.add(&z).unwrap(), x);
        assert!(x.add(&x.neg()).unwrap().is_zero());
    }

    #[test]
    fn fv_is_p_over_zp() {
        let c = PrimeContext::prime(3, 4).unwrap();
        let x = WittVec::new(3, vec![Zq::from_u64(&c, 2), Zq::from_u64(&c, 11)]).unwrap();
        assert_eq!(x.verschiebung().frobenius(), x.scale_int(3));
    }
}
