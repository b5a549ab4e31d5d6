//! Graded coefficient rings realized inside Q[v+^{±1}] with v- = p/v+.
//!
//! Characteristic-zero kinds (A, B, W(k)[v-]) use [`BElement`] with exact rational
//! coefficients of v+^i. Reduced kinds (A⊗F_p, B⊗F_p, C2 and B mod p^M) use
//! [`ReducedElement`], coordinates in the basis g_i = p^{ε(i)} v+^i / p^i.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{is_prime, pd_exponent};
use crate::error::{Error, Result};
use crate::report::Report;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RingKind {
    A,
    AModP,
    C2,
    B,
    BModP,
    WkvMinus,
}

impl RingKind {
    pub fn is_reduced(self) -> bool {
        matches!(self, RingKind::AModP | RingKind::BModP | RingKind::C2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RingDescriptor {
    pub kind: RingKind,
    pub p: u64,
    /// precision exponent of the reduced kinds
    pub n: u32,
    /// degree window [-d, d]
    pub window: i64,
    /// fail instead of truncating
    pub strict: bool,
}

impl RingDescriptor {
    pub fn new(kind: RingKind, p: u64, window: i64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if window < 1 {
            return Err(Error::InvalidArgument(format!("window must be >= 1, got {window}")));
        }
        let n = if kind.is_reduced() { 1 } else { 0 };
        Ok(RingDescriptor { kind, p, n, window, strict: false })
    }

    pub fn b(p: u64, window: i64) -> Self {
        Self::new(RingKind::B, p, window).expect("valid B descriptor")
    }

    pub fn strict(mut self) -> Self {
        self.strict = true;
        self
    }

    /// Valuation exponent of the degree-i basis element: g_i = p^{ε(i)-i} v+^i.
    pub fn epsilon(&self, i: i64) -> i64 {
        match self.kind {
            RingKind::B | RingKind::BModP => pd_exponent(self.p, i) as i64,
            RingKind::A | RingKind::AModP | RingKind::WkvMinus | RingKind::C2 => i.max(0),
        }
    }

    /// Exponent c with g_i g_j = p^c g_{i+j}.
    pub fn structure_exponent(&self, i: i64, j: i64) -> i64 {
        self.epsilon(i) + self.epsilon(j) - self.epsilon(i + j)
    }

    fn admits_degree(&self, i: i64) -> bool {
        match self.kind {
            RingKind::WkvMinus => i <= 0,
            RingKind::C2 => i <= 0 || i % self.p as i64 == 0,
            _ => true,
        }
    }
}

pub(crate) fn p_adic_val_int(p: u64, x: &BigInt) -> i64 {
    let p = BigInt::from(p);
    let mut x = x.clone();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        x = q;
        v += 1;
    }
}

/// p-adic valuation of a nonzero rational.
pub fn val_rational(p: u64, x: &BigRational) -> i64 {
    p_adic_val_int(p, x.numer()) - p_adic_val_int(p, x.denom())
}

fn p_pow_rational(p: u64, e: i64) -> BigRational {
    let base = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from_integer(base)
    } else {
        BigRational::new(BigInt::one(), base)
    }
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntegralityWitness {
    pub degree: i64,
    pub valuation: i64,
    pub required: i64,
}

impl fmt::Display for IntegralityWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "degree {}: valuation {} < required {} (gap {})",
            self.degree,
            self.valuation,
            self.required,
            self.required - self.valuation
        )
    }
}

/// c_i v+^i summed over a finite set of degrees.
#[derive(Clone)]
pub struct BElement {
    ring: RingDescriptor,
    coeffs: BTreeMap<i64, BigRational>,
    truncated: bool,
}

impl PartialEq for BElement {
    fn eq(&self, other: &Self) -> bool {
        self.ring.kind == other.ring.kind && self.ring.p == other.ring.p && self.coeffs == other.coeffs
    }
}

impl BElement {
    pub fn zero(ring: RingDescriptor) -> Self {
        BElement { ring, coeffs: BTreeMap::new(), truncated: false }
    }

    pub fn from_int(ring: RingDescriptor, c: i64) -> Self {
        Self::monomial(ring, 0, BigRational::from_integer(c.into()))
    }

    pub fn from_bigint(ring: RingDescriptor, c: &BigInt) -> Self {
        Self::monomial(ring, 0, BigRational::from_integer(c.clone()))
    }

    /// c v+^i, dropped (and flagged) when i is outside the window.
    pub fn monomial(ring: RingDescriptor, i: i64, c: BigRational) -> Self {
        let mut x = Self::zero(ring);
        if c.is_zero() {
            return x;
        }
        if i.abs() > ring.window {
            x.truncated = true;
        } else {
            x.coeffs.insert(i, c);
        }
        x
    }

    pub fn vplus(ring: RingDescriptor, i: i64) -> Self {
        Self::monomial(ring, i, BigRational::one())
    }

    /// v-^j = p^j v+^{-j}
    pub fn vminus(ring: RingDescriptor, j: i64) -> Self {
        Self::monomial(ring, -j, p_pow_rational(ring.p, j))
    }

    /// The basis element g_i = p^{ε(i)} v+^i / p^i.
    pub fn basis(ring: RingDescriptor, i: i64) -> Self {
        Self::monomial(ring, i, p_pow_rational(ring.p, ring.epsilon(i) - i))
    }

    pub fn ring(&self) -> RingDescriptor {
        self.ring
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, BigRational> {
        &self.coeffs
    }

    pub fn coeff(&self, i: i64) -> BigRational {
        self.coeffs.get(&i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Some(d) when all mass sits in the single degree d.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        if self.coeffs.len() == 1 {
            self.coeffs.keys().next().copied()
        } else {
            None
        }
    }

    fn insert_add(&mut self, i: i64, c: BigRational) {
        if c.is_zero() {
            return;
        }
        if i.abs() > self.ring.window {
            self.truncated = true;
            return;
        }
        let e = self.coeffs.entry(i).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&i);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut r = self.clone();
        r.truncated |= other.truncated;
        for (i, c) in &other.coeffs {
            r.insert_add(*i, c.clone());
        }
        r
    }

    pub fn neg(&self) -> Self {
        BElement {
            ring: self.ring,
            coeffs: self.coeffs.iter().map(|(i, c)| (*i, -c)).collect(),
            truncated: self.truncated,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut r = Self::zero(self.ring);
        r.truncated = self.truncated || other.truncated;
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                r.insert_add(i + j, a * b);
            }
        }
        r
    }

    /// Multiplication that reports window overflow instead of flagging it.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        for i in self.coeffs.keys() {
            for j in other.coeffs.keys() {
                if (i + j).abs() > self.ring.window {
                    return Err(Error::Truncation { degree: i + j, window: self.ring.window });
                }
            }
        }
        Ok(self.mul(other))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            let mut z = Self::zero(self.ring);
            z.truncated = self.truncated;
            return z;
        }
        BElement {
            ring: self.ring,
            coeffs: self.coeffs.iter().map(|(i, x)| (*i, x * c)).collect(),
            truncated: self.truncated,
        }
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale(&BigRational::from_integer(c.into()))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::from_int(self.ring, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Applies the strict policy: error if mass was discarded.
    pub fn check_window(&self) -> Result<()> {
        if self.truncated {
            Err(Error::Truncation { degree: self.ring.window + 1, window: self.ring.window })
        } else {
            Ok(())
        }
    }

    /// First degree at which val(c_i) >= ε(i) - i fails.
    pub fn integrality_check(&self) -> std::result::Result<(), IntegralityWitness> {
        for (i, c) in &self.coeffs {
            if !self.ring.admits_degree(*i) {
                return Err(IntegralityWitness { degree: *i, valuation: val_rational(self.ring.p, c), required: i64::MAX });
            }
            let v = val_rational(self.ring.p, c);
            let req = self.ring.epsilon(*i) - i;
            if v < req {
                return Err(IntegralityWitness { degree: *i, valuation: v, required: req });
            }
        }
        Ok(())
    }

    pub fn is_integral(&self) -> bool {
        self.integrality_check().is_ok()
    }

    /// Coordinates in the g_i basis reduced mod p^m.
    pub fn reduce_mod(&self, m: u32) -> Result<ReducedElement> {
        if let Err(w) = self.integrality_check() {
            return Err(Error::Integrality(w.to_string()));
        }
        let kind = match self.ring.kind {
            RingKind::B => RingKind::BModP,
            RingKind::A | RingKind::WkvMinus => RingKind::AModP,
            k => k,
        };
        let ring = RingDescriptor { kind, n: m, ..self.ring };
        let modulus = BigInt::from(ring.p).pow(m);
        let mut out = ReducedElement::zero(ring);
        for (i, c) in &self.coeffs {
            let a = c / p_pow_rational(ring.p, self.ring.epsilon(*i) - i);
            let den_inv = a
                .denom()
                .modinv(&modulus)
                .expect("integral coordinate has unit denominator");
            let r = (a.numer() * den_inv).mod_floor(&modulus);
            out.set(*i, r.to_u64().unwrap());
        }
        Ok(out)
    }
}

impl fmt::Debug for BElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")?;
        if self.truncated {
            write!(f, " [truncated]")?;
        }
        Ok(())
    }
}

impl fmt::Display for BElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in &self.coeffs {
            let (c, var) = match *i {
                0 => (c.clone(), String::new()),
                i if i > 0 => (c.clone(), if i == 1 { "v+".into() } else { format!("v+^{i}") }),
                i => (c / p_pow_rational(self.ring.p, -i), if i == -1 { "v-".into() } else { format!("v-^{}", -i) }),
            };
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            match (var.is_empty(), mag.is_one()) {
                (true, _) => write!(f, "{mag}")?,
                (false, true) => write!(f, "{var}")?,
                (false, false) => write!(f, "{mag}*{var}")?,
            }
        }
        Ok(())
    }
}

/// v+^n / n!
pub fn gamma(ring: RingDescriptor, n: u64) -> Result<BElement> {
    if n as i64 > ring.window {
        return Err(Error::Truncation { degree: n as i64, window: ring.window });
    }
    Ok(BElement::monomial(ring, n as i64, BigRational::new(BigInt::one(), factorial(n))))
}

/// Checks (p^n)!/((p^{n-1})!)^p γ_{p^n} = γ_{p^{n-1}}^p and v-^{p^n} γ_{p^n}(v+) = p^{p^n}/(p^n)!.
pub fn verify_pd_relations(p: u64, n_max: u32, window: i64) -> Result<Report> {
    let ring = RingDescriptor::new(RingKind::B, p, window)?.strict();
    if p.pow(n_max) as i64 > window {
        return Err(Error::InvalidArgument(format!("p^{n_max} exceeds the window {window}")));
    }
    let mut report = Report::new(format!("pd relations p={p} window={window}"));
    for n in 1..=n_max {
        let q = p.pow(n);
        let q0 = p.pow(n - 1);
        let g = gamma(ring, q)?;
        let ratio = BigRational::new(factorial(q), factorial(q0).pow(p as u32));
        let lhs = g.scale(&ratio);
        let rhs = gamma(ring, q0)?.pow(p);
        let ok = lhs == rhs && !lhs.is_truncated() && !rhs.is_truncated();
        report.check(format!("n={n} divided power ratio"), ok, format!("{lhs} = {rhs}"));

        let lhs = BElement::vminus(ring, q as i64).checked_mul(&g)?;
        let value = BigRational::new(BigInt::from(p).pow(q as u32), factorial(q));
        let rhs = BElement::monomial(ring, 0, value.clone());
        let ok = lhs == rhs;
        report.check(
            format!("n={n} v-^(p^n) gamma"),
            ok,
            format!("{lhs} = {rhs} (valuation {}, integral {})", val_rational(p, &value), rhs.is_integral()),
        );
    }
    Ok(report)
}

/// Coordinates in the g_i basis modulo p^n (n = ring.n).
#[derive(Clone, PartialEq, Eq)]
pub struct ReducedElement {
    ring: RingDescriptor,
    coeffs: BTreeMap<i64, u64>,
}

impl ReducedElement {
    pub fn zero(ring: RingDescriptor) -> Self {
        ReducedElement { ring, coeffs: BTreeMap::new() }
    }

    fn modulus(&self) -> u64 {
        self.ring.p.pow(self.ring.n)
    }

    pub fn ring(&self) -> RingDescriptor {
        self.ring
    }

    pub fn from_int(ring: RingDescriptor, c: i64) -> Self {
        let mut x = Self::zero(ring);
        let m = x.modulus() as i64;
        x.set(0, c.rem_euclid(m) as u64);
        x
    }

    pub fn basis(ring: RingDescriptor, i: i64) -> Self {
        let mut x = Self::zero(ring);
        x.set(i, 1);
        x
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, u64> {
        &self.coeffs
    }

    pub fn coeff(&self, i: i64) -> u64 {
        self.coeffs.get(&i).copied().unwrap_or(0)
    }

    pub fn set(&mut self, i: i64, c: u64) {
        let c = c % self.modulus();
        if c == 0 || i.abs() > self.ring.window || !self.ring.admits_degree(i) {
            self.coeffs.remove(&i);
        } else {
            self.coeffs.insert(i, c);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let m = self.modulus();
        let mut r = self.clone();
        for (i, c) in &other.coeffs {
            let v = (r.coeff(*i) + c) % m;
            r.set(*i, v);
        }
        r
    }

    pub fn neg(&self) -> Self {
        let m = self.modulus();
        let mut r = Self::zero(self.ring);
        for (i, c) in &self.coeffs {
            r.set(*i, m - c);
        }
        r
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let m = self.modulus() as u128;
        let mut r = Self::zero(self.ring);
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                if self.ring.kind == RingKind::C2 && (*i > 0 && *j < 0 || *i < 0 && *j > 0) {
                    continue;
                }
                let e = self.ring.structure_exponent(*i, *j);
                if e >= self.ring.n as i64 {
                    continue;
                }
                let c = (*a as u128 * *b as u128 % m) * self.ring.p.pow(e as u32) as u128 % m;
                let v = (r.coeff(i + j) as u128 + c) % m;
                r.set(i + j, v as u64);
            }
        }
        r
    }

    /// Image in the quotient killing all degrees >= d.
    pub fn kill_degrees_from(&self, d: i64) -> Self {
        ReducedElement {
            ring: self.ring,
            coeffs: self.coeffs.iter().filter(|(i, _)| **i < d).map(|(i, c)| (*i, *c)).collect(),
        }
    }

    pub fn homogeneous_degree(&self) -> Option<i64> {
        if self.coeffs.len() == 1 {
            self.coeffs.keys().next().copied()
        } else {
            None
        }
    }
}

impl fmt::Debug for ReducedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ReducedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(i, c)| if *c == 1 { format!("g{i}") } else { format!("{c}*g{i}") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn vplus_times_vminus_is_p() {
        for p in [2, 3, 5] {
            let r = RingDescriptor::b(p, 10);
            assert_eq!(BElement::vplus(r, 1).mul(&BElement::vminus(r, 1)), BElement::from_int(r, p as i64));
        }
    }

    #[test]
    fn structure_constants_examples() {
        let r3 = RingDescriptor::b(3, 12);
        assert_eq!(BElement::basis(r3, 2).mul(&BElement::basis(r3, 3)), BElement::basis(r3, 5));
        let r2 = RingDescriptor::b(2, 12);
        assert_eq!(BElement::basis(r2, 1).mul(&BElement::basis(r2, 1)), BElement::basis(r2, 2).scale_int(2));
    }

    #[test]
    fn structure_constants_exhaustive() {
        for p in [2, 3, 5] {
            let r = RingDescriptor::b(p, 24);
            for i in -12..=12 {
                for j in -12..=12 {
                    let e = r.structure_exponent(i, j);
                    assert!(e >= 0);
                    let lhs = BElement::basis(r, i).mul(&BElement::basis(r, j));
                    let rhs = BElement::basis(r, i + j).scale_int((p as i64).pow(e as u32));
                    assert_eq!(lhs, rhs, "p={p} i={i} j={j}");
                }
                let vm = BElement::vminus(r, 1).mul(&BElement::basis(r, i));
                let e = r.epsilon(i) - r.epsilon(i - 1);
                assert!(e >= 0);
                assert_eq!(vm, BElement::basis(r, i - 1).scale_int((p as i64).pow(e as u32)));
            }
        }
    }

    #[test]
    fn a_to_b_iso_below_p() {
        for p in [2u64, 3, 5] {
            let b = RingDescriptor::b(p, 20);
            for i in 0..=p as i64 {
                // A^i = W v+^i and B^i = W g_i
                let same = b.epsilon(i) == i;
                assert_eq!(same, i < p as i64, "p={p} i={i}");
            }
        }
    }

    #[test]
    fn integrality_examples() {
        let r2 = RingDescriptor::b(2, 8);
        assert!(BElement::monomial(r2, 4, q(1, 8)).is_integral());
        let w = BElement::monomial(r2, 1, q(1, 2)).integrality_check().unwrap_err();
        assert_eq!(w.degree, 1);
        assert_eq!(w.required - w.valuation, 1);
        assert!(BElement::vminus(r2, 2).is_integral());
        let a = RingDescriptor::new(RingKind::A, 2, 8).unwrap();
        assert!(!BElement::monomial(a, 2, q(1, 2)).is_integral());
        let wm = RingDescriptor::new(RingKind::WkvMinus, 2, 8).unwrap();
        assert!(!BElement::vplus(wm, 1).is_integral());
    }

    #[test]
    fn gamma_examples() {
        let r2 = RingDescriptor::b(2, 8);
        assert_eq!(gamma(r2, 2).unwrap(), BElement::monomial(r2, 2, q(1, 2)));
        assert_eq!(gamma(r2, 2).unwrap().scale_int(2), BElement::vplus(r2, 2));
        assert_eq!(gamma(r2, 0).unwrap(), BElement::from_int(r2, 1));
        assert!(gamma(r2, 9).is_err());
        for n in 0..=8 {
            assert!(gamma(r2, n).unwrap().is_integral());
        }
    }

    #[test]
    fn pd_relations_pass() {
        for p in [2u64, 3] {
            let r = verify_pd_relations(p, 2, (p * p + p) as i64).unwrap();
            assert!(r.passed(), "{r:?}");
        }
        let r3 = RingDescriptor::b(3, 12);
        let v = BElement::vminus(r3, 3).mul(&gamma(r3, 3).unwrap());
        assert_eq!(v, BElement::monomial(r3, 0, q(27, 6)));
    }

    #[test]
    fn reduction_examples() {
        let r2 = RingDescriptor::b(2, 8);
        let g2 = gamma(r2, 2).unwrap().reduce_mod(1).unwrap();
        assert_eq!(g2.coeffs().iter().collect::<Vec<_>>(), vec![(&2, &1)]);
        assert!(BElement::basis(r2, 1).scale_int(2).reduce_mod(1).unwrap().is_zero());
        let vm = BElement::vminus(r2, 1).reduce_mod(1).unwrap();
        assert_eq!(vm.coeffs().iter().collect::<Vec<_>>(), vec![(&-1, &1)]);
        assert!(BElement::monomial(r2, 1, q(1, 2)).reduce_mod(1).is_err());
    }

    #[test]
    fn reduction_is_multiplicative() {
        let r = RingDescriptor::b(3, 20);
        let xs = [
            gamma(r, 3).unwrap(),
            BElement::vminus(r, 2).add(&BElement::basis(r, 4)),
            BElement::basis(r, 6).scale_int(5).add(&BElement::from_int(r, 7)),
        ];
        for a in &xs {
            for b in &xs {
                let lhs = a.mul(b).reduce_mod(2).unwrap();
                let rhs = a.reduce_mod(2).unwrap().mul(&b.reduce_mod(2).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn c2_products() {
        let c2 = RingDescriptor::new(RingKind::C2, 3, 12).unwrap();
        let x = ReducedElement::basis(c2, 3);
        let y = ReducedElement::basis(c2, -1);
        assert!(x.mul(&y).is_zero());
        assert_eq!(x.mul(&x), ReducedElement::basis(c2, 6));
        assert!(ReducedElement::basis(c2, 2).is_zero());
    }

    #[test]
    fn strict_mul_reports_overflow() {
        let r = RingDescriptor::b(2, 3).strict();
        let x = BElement::vplus(r, 2);
        assert!(matches!(x.checked_mul(&x), Err(Error::Truncation { .. })));
        assert!(x.mul(&x).is_truncated());
    }

    #[test]
    fn display() {
        let r = RingDescriptor::b(2, 8);
        assert_eq!(BElement::monomial(r, 4, q(1, 8)).to_string(), "1/8*v+^4");
        assert_eq!(BElement::vminus(r, 1).sub(&BElement::from_int(r, 3)).to_string(), "v- - 3");
    }
}
