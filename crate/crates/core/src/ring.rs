//! The coefficient-ring interface used by Witt vector arithmetic.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::arith::Zq;
use crate::laurent::{BElement, ReducedElement};

/// Ring operations on values that carry their own ring context.
pub trait CoeffRing: Clone + PartialEq + Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn int_like(&self, n: &BigInt) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn is_zero_elem(&self) -> bool;

    fn negate(&self) -> Self {
        self.zero_like().minus(self)
    }

    fn pow_u(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.times(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.times(&base);
            }
        }
        acc
    }
}

impl CoeffRing for Zq {
    fn zero_like(&self) -> Self {
        Zq::zero(self.ctx())
    }
    fn one_like(&self) -> Self {
        Zq::one(self.ctx())
    }
    fn int_like(&self, n: &BigInt) -> Self {
        let m = BigInt::from(self.ctx().modulus());
        let r = ((n % &m) + &m) % &m;
        Zq::from_u64(self.ctx(), r.to_u64().unwrap())
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
}

impl CoeffRing for BElement {
    fn zero_like(&self) -> Self {
        BElement::zero(self.ring())
    }
    fn one_like(&self) -> Self {
        BElement::from_int(self.ring(), 1)
    }
    fn int_like(&self, n: &BigInt) -> Self {
        BElement::from_bigint(self.ring(), n)
    }
    fn plus(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn minus(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn times(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn negate(&self) -> Self {
        self.neg()
    }
}

impl CoeffRing for ReducedElement {
    fn zero_like(&self) -> Self {
        ReducedElement::zero(self.ring())
    }
    fn one_like(&self) -> Self {
        ReducedElement::from_int(self.ring(), 1)
    }
    fn int_like(&self, n: &BigInt) -> Self {
        let m = BigInt::from(self.ring().p.pow(self.ring().n));
        let r = ((n % &m) + &m) % &m;
        ReducedElement::from_int(self.ring(), r.to_i64().unwrap())
    }
    fn plus(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn minus(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn times(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
}

impl CoeffRing for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::from_integer(1.into())
    }
    fn int_like(&self, n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
}
