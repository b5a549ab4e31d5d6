//! Truncated big Witt vectors 1 + c_1 x + ... + c_D x^D over B.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::laurent::{BElement, RingDescriptor};

#[derive(Debug, Clone, PartialEq)]
pub struct BigWitt {
    /// coeffs[0] = 1
    coeffs: Vec<BElement>,
}

impl BigWitt {
    pub fn new(coeffs: Vec<BElement>) -> Result<Self> {
        match coeffs.first() {
            Some(c) if *c == BElement::from_int(c.ring(), 1) => Ok(BigWitt { coeffs }),
            _ => Err(Error::InvalidArgument("big Witt vector needs constant term 1".into())),
        }
    }

    pub fn one(ring: RingDescriptor, order: usize) -> Self {
        let mut coeffs = vec![BElement::zero(ring); order + 1];
        coeffs[0] = BElement::from_int(ring, 1);
        BigWitt { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BElement] {
        &self.coeffs
    }

    /// The group law: power series product.
    pub fn mul(&self, other: &Self) -> Self {
        let d = self.order().min(other.order());
        let ring = self.coeffs[0].ring();
        let coeffs = (0..=d)
            .map(|k| {
                (0..=k).fold(BElement::zero(ring), |acc, i| acc.add(&self.coeffs[i].mul(&other.coeffs[k - i])))
            })
            .collect();
        BigWitt { coeffs }
    }

    pub fn pow(&self, e: u64) -> Self {
        (0..e).fold(BigWitt::one(self.coeffs[0].ring(), self.order()), |acc, _| acc.mul(self))
    }
}

/// g = exp((1/p) log(1 - v+^p x)) truncated at x^order, with g^p = 1 - v+^p x.
pub fn bigwitt_pth_root(p: u64, order: usize) -> Result<BigWitt> {
    if order < 2 {
        return Err(Error::InvalidArgument("truncation order must be at least 2".into()));
    }
    let ring = RingDescriptor::b(p, (p as usize * order) as i64).strict();
    // h_k = -(1/(p k)) v+^{p k}
    let h: Vec<BElement> = (0..=order)
        .map(|k| {
            if k == 0 {
                BElement::zero(ring)
            } else {
                BElement::monomial(ring, (p as usize * k) as i64, BigRational::new((-1).into(), BigInt::from(p * k as u64)))
            }
        })
        .collect();
    // n g_n = sum_{k=1}^{n} k h_k g_{n-k}
    let mut g = vec![BElement::from_int(ring, 1)];
    for n in 1..=order {
        let mut acc = BElement::zero(ring);
        for k in 1..=n {
            acc = acc.add(&h[k].scale_int(k as i64).mul(&g[n - k]));
        }
        g.push(acc.scale(&BigRational::new(1.into(), (n as i64).into())));
    }
    for (k, c) in g.iter().enumerate() {
        if c.is_truncated() {
            return Err(Error::Verification(format!("coefficient {k} left the degree window")));
        }
        if let Err(w) = c.integrality_check() {
            return Err(Error::Integrality(format!("coefficient of x^{k}: {w}")));
        }
    }
    let g = BigWitt { coeffs: g };
    let mut target = BigWitt::one(ring, order);
    target.coeffs[1] = BElement::vplus(ring, p as i64).neg();
    if g.pow(p) != target {
        return Err(Error::Verification("g^p differs from 1 - v+^p x".into()));
    }
    Ok(g)
}
