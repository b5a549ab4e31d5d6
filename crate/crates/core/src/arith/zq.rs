use std::fmt;
use std::sync::Arc;

use rand::Rng;

use super::{is_prime, mulmod, val_u64};
use crate::error::{Error, Result};

/// p, precision N, residue degree f and the defining polynomial of W_N(F_{p^f}).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeContext {
    p: u64,
    n: u32,
    f: usize,
    modulus: u64,
    /// monic, low degree first, length f + 1
    minpoly: Vec<u64>,
    /// coordinates of sigma(a)
    frob: Vec<u64>,
}

pub type Ctx = Arc<PrimeContext>;

impl PrimeContext {
    pub fn new(p: u64, n: u32, f: usize, minpoly: Option<Vec<i64>>) -> Result<Ctx> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 || f == 0 {
            return Err(Error::InvalidArgument("N and f must be at least 1".into()));
        }
        let mut modulus: u64 = 1;
        for _ in 0..n {
            modulus = modulus
                .checked_mul(p)
                .filter(|m| *m < (1u64 << 62))
                .ok_or_else(|| Error::Precision(format!("{p}^{n} does not fit in 62 bits")))?;
        }
        let minpoly: Vec<i64> = match (f, minpoly) {
            (1, None) => vec![0, 1],
            (_, None) => default_minpoly(p, f),
            (_, Some(m)) => m,
        };
        if minpoly.len() != f + 1 || minpoly[f] != 1 {
            return Err(Error::InvalidArgument(format!(
                "minimal polynomial must be monic of degree {f}"
            )));
        }
        let red = |c: i64| c.rem_euclid(modulus as i64) as u64;
        let minpoly: Vec<u64> = minpoly.into_iter().map(red).collect();
        let modp: Vec<u64> = minpoly.iter().map(|c| c % p).collect();
        if !irreducible_mod_p(&modp, p) {
            return Err(Error::InvalidArgument("minimal polynomial is reducible mod p".into()));
        }
        let ctx = Arc::new(PrimeContext { p, n, f, modulus, minpoly, frob: vec![0; f] });
        let frob = if f == 1 { vec![0] } else { frobenius_root(&ctx)?.coeffs };
        let mut ctx = Arc::try_unwrap(ctx).unwrap_or_else(|a| (*a).clone());
        ctx.frob = frob;
        Ok(Arc::new(ctx))
    }

    pub fn prime(p: u64, n: u32) -> Result<Ctx> {
        Self::new(p, n, 1, None)
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn precision(&self) -> u32 {
        self.n
    }
    pub fn degree(&self) -> usize {
        self.f
    }
    pub fn modulus(&self) -> u64 {
        self.modulus
    }
    pub fn minpoly(&self) -> &[u64] {
        &self.minpoly
    }

    /// Signed minimal polynomial coefficients in (-p^N/2, p^N/2].
    pub fn minpoly_signed(&self) -> Vec<i64> {
        self.minpoly.iter().map(|&c| signed(c, self.modulus)).collect()
    }

    /// Same field data at another precision.
    pub fn with_precision(&self, n: u32) -> Result<Ctx> {
        let mp = if self.f == 1 { None } else { Some(self.minpoly_signed()) };
        PrimeContext::new(self.p, n, self.f, mp)
    }

    pub fn pow_p(&self, e: u32) -> u64 {
        if e >= self.n {
            0
        } else {
            self.p.pow(e)
        }
    }
}

fn signed(c: u64, m: u64) -> i64 {
    if c > m / 2 {
        c as i64 - m as i64
    } else {
        c as i64
    }
}

fn poly_rem_mod_p(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = super::powmod(b[db], p - 2, p);
    while r.len() > db && !r.is_empty() {
        let top = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if top != 0 {
            let c = mulmod(top, lead_inv, p);
            for (i, bc) in b.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - mulmod(c, *bc, p)) % p;
            }
        }
        r.pop();
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

/// Brute-force search for a monic factor of degree <= f/2.
fn irreducible_mod_p(m: &[u64], p: u64) -> bool {
    let f = m.len() - 1;
    if f == 1 {
        return true;
    }
    for d in 1..=f / 2 {
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut q = Vec::with_capacity(d + 1);
            let mut t = idx;
            for _ in 0..d {
                q.push(t % p);
                t /= p;
            }
            q.push(1);
            if poly_rem_mod_p(m, &q, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Hensel lift of the root of the minimal polynomial congruent to a^p.
fn frobenius_root(ctx: &Ctx) -> Result<Zq> {
    let a = Zq::generator(ctx);
    let mut r = a.pow(ctx.p);
    let m: Vec<Zq> = ctx.minpoly.iter().map(|&c| Zq::from_u64(ctx, c)).collect();
    let eval = |x: &Zq, coeffs: &[Zq]| {
        let mut acc = Zq::zero(ctx);
        for c in coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    };
    let dm: Vec<Zq> = m
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * &Zq::from_u64(ctx, i as u64))
        .collect();
    for _ in 0..=ctx.n.ilog2() + 1 {
        let num = eval(&r, &m);
        if num.is_zero() {
            break;
        }
        let den = eval(&r, &dm).inverse()?;
        r = &r - &(&num * &den);
    }
    debug_assert!(eval(&r, &m).is_zero());
    Ok(r)
}

/// An element of W_N(F_{p^f}) written in the basis 1, a, ..., a^{f-1}.
#[derive(Clone)]
pub struct Zq {
    ctx: Ctx,
    coeffs: Vec<u64>,
}

impl Zq {
    pub fn zero(ctx: &Ctx) -> Self {
        Zq { ctx: ctx.clone(), coeffs: vec![0; ctx.f] }
    }

    pub fn one(ctx: &Ctx) -> Self {
        Self::from_u64(ctx, 1)
    }

    pub fn from_u64(ctx: &Ctx, c: u64) -> Self {
        let mut z = Self::zero(ctx);
        z.coeffs[0] = c % ctx.modulus;
        z
    }

    pub fn from_i64(ctx: &Ctx, c: i64) -> Self {
        Self::from_u64(ctx, c.rem_euclid(ctx.modulus as i64) as u64)
    }

    pub fn from_coeffs(ctx: &Ctx, c: &[i64]) -> Result<Self> {
        if c.len() > ctx.f {
            return Err(Error::Dimension(format!(
                "element has {} coefficients, residue degree is {}",
                c.len(),
                ctx.f
            )));
        }
        let mut z = Self::zero(ctx);
        for (i, &x) in c.iter().enumerate() {
            z.coeffs[i] = x.rem_euclid(ctx.modulus as i64) as u64;
        }
        Ok(z)
    }

    pub fn generator(ctx: &Ctx) -> Self {
        // for f = 1 the generator is the root 0 of x
        let mut z = Self::zero(ctx);
        if ctx.f > 1 {
            z.coeffs[1] = 1;
        }
        z
    }

    pub fn p_power(ctx: &Ctx, e: u32) -> Self {
        Self::from_u64(ctx, ctx.pow_p(e))
    }

    pub fn random<R: Rng + ?Sized>(ctx: &Ctx, rng: &mut R) -> Self {
        Zq { ctx: ctx.clone(), coeffs: (0..ctx.f).map(|_| rng.gen_range(0..ctx.modulus)).collect() }
    }

    /// Uniform element of the residue field, lifted by least residues.
    pub fn random_residue<R: Rng + ?Sized>(ctx: &Ctx, rng: &mut R) -> Self {
        Zq { ctx: ctx.clone(), coeffs: (0..ctx.f).map(|_| rng.gen_range(0..ctx.p)).collect() }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn signed_coeffs(&self) -> Vec<i64> {
        self.coeffs.iter().map(|&c| signed(c, self.ctx.modulus)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 % self.ctx.modulus && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    pub fn valuation(&self) -> u32 {
        self.coeffs
            .iter()
            .filter(|&&c| c != 0)
            .map(|&c| val_u64(self.ctx.p, c))
            .min()
            .unwrap_or(self.ctx.n)
            .min(self.ctx.n)
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == 0
    }

    fn mul_raw(&self, other: &Self) -> Self {
        let f = self.ctx.f;
        let m = self.ctx.modulus;
        if f == 1 {
            return Zq { ctx: self.ctx.clone(), coeffs: vec![mulmod(self.coeffs[0], other.coeffs[0], m)] };
        }
        let mut prod = vec![0u128; 2 * f - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + a as u128 * b as u128) % m as u128;
            }
        }
        let mp = &self.ctx.minpoly;
        for k in (f..2 * f - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for (i, &mc) in mp.iter().take(f).enumerate() {
                let sub = c * mc as u128 % m as u128;
                prod[k - f + i] = (prod[k - f + i] + m as u128 - sub) % m as u128;
            }
        }
        Zq { ctx: self.ctx.clone(), coeffs: prod[..f].iter().map(|&c| c as u64).collect() }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ctx);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_raw(&base);
            }
            base = base.mul_raw(&base);
            e >>= 1;
        }
        acc
    }

    pub fn inverse(&self) -> Result<Self> {
        let v = self.valuation();
        if v > 0 {
            return Err(Error::NonUnit(v));
        }
        let q = self.ctx.p.pow(self.ctx.f as u32);
        let mut y = self.pow(q - 2);
        let two = Self::from_u64(&self.ctx, 2);
        for _ in 0..=self.ctx.n.ilog2() + 1 {
            y = &y * &(&two - &(self * &y));
        }
        debug_assert!((self * &y).is_one());
        Ok(y)
    }

    /// Exact division by p^e; the caller guarantees valuation >= e.
    pub fn div_p_pow(&self, e: u32) -> Self {
        debug_assert!(self.valuation() >= e);
        let pe = self.ctx.p.pow(e);
        Zq { ctx: self.ctx.clone(), coeffs: self.coeffs.iter().map(|&c| c / pe).collect() }
    }

    /// Least-residue representative modulo p^e (e <= N).
    pub fn reduce(&self, e: u32) -> Self {
        if e >= self.ctx.n {
            return self.clone();
        }
        let pe = self.ctx.p.pow(e);
        Zq { ctx: self.ctx.clone(), coeffs: self.coeffs.iter().map(|&c| c % pe).collect() }
    }

    /// sigma, the lift of the p-power map of the residue field.
    pub fn frobenius(&self) -> Self {
        if self.ctx.f == 1 {
            return self.clone();
        }
        let r = Zq { ctx: self.ctx.clone(), coeffs: self.ctx.frob.clone() };
        let mut acc = Self::zero(&self.ctx);
        for c in self.coeffs.iter().rev() {
            acc = &acc.mul_raw(&r) + &Self::from_u64(&self.ctx, *c);
        }
        acc
    }

    pub fn scale_i64(&self, k: i64) -> Self {
        self * &Self::from_i64(&self.ctx, k)
    }

    /// The same coordinates read in another context with the same field data.
    pub fn transport(&self, ctx: &Ctx) -> Self {
        let m = ctx.modulus;
        Zq { ctx: ctx.clone(), coeffs: self.coeffs.iter().map(|&c| c % m).collect() }
    }
}

impl PartialEq for Zq {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && (Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx == other.ctx)
    }
}

impl Eq for Zq {}

impl fmt::Debug for Zq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Zq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.signed_coeffs();
        if c.len() == 1 {
            write!(f, "{}", c[0])
        } else {
            let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            write!(f, "({})", parts.join(","))
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a> std::ops::$tr<&'a Zq> for &'a Zq {
            type Output = Zq;
            fn $m(self, rhs: &'a Zq) -> Zq {
                debug_assert!(
                    Arc::ptr_eq(&self.ctx, &rhs.ctx) || self.ctx == rhs.ctx,
                    "Zq operands from different contexts"
                );
                let f: fn(&Zq, &Zq) -> Zq = $body;
                f(self, rhs)
            }
        }
        impl std::ops::$tr<Zq> for Zq {
            type Output = Zq;
            fn $m(self, rhs: Zq) -> Zq {
                std::ops::$tr::$m(&self, &rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| {
    let m = a.ctx.modulus;
    Zq {
        ctx: a.ctx.clone(),
        coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| ((x as u128 + y as u128) % m as u128) as u64).collect(),
    }
});
binop!(Sub, sub, |a, b| {
    let m = a.ctx.modulus;
    Zq {
        ctx: a.ctx.clone(),
        coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| ((x as u128 + m as u128 - y as u128) % m as u128) as u64).collect(),
    }
});
binop!(Mul, mul, |a, b| a.mul_raw(b));

impl std::ops::Neg for &Zq {
    type Output = Zq;
    fn neg(self) -> Zq {
        &Zq::zero(&self.ctx) - self
    }
}

impl std::ops::Neg for Zq {
    type Output = Zq;
    fn neg(self) -> Zq {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f4(n: u32) -> Ctx {
        PrimeContext::new(2, n, 2, Some(vec![1, 1, 1])).unwrap()
    }

    #[test]
    fn inverse_and_valuation() {
        let c = PrimeContext::prime(3, 2).unwrap();
        assert_eq!(Zq::from_u64(&c, 4).inverse().unwrap(), Zq::from_u64(&c, 7));
        let c3 = PrimeContext::prime(3, 3).unwrap();
        assert_eq!(Zq::from_u64(&c3, 18).valuation(), 2);
        assert_eq!(Zq::zero(&c3).valuation(), 3);
        assert_eq!(Zq::from_u64(&c3, 9).inverse(), Err(Error::NonUnit(2)));
    }

    #[test]
    fn quadratic_extension() {
        let c = f4(4);
        let a = Zq::generator(&c);
        let prod = &a * &(&a + &Zq::one(&c));
        assert_eq!(prod, Zq::from_u64(&c, 15));
        assert_eq!(a.frobenius(), Zq::from_coeffs(&c, &[-1, -1]).unwrap());
    }

    #[test]
    fn frobenius_is_involution_for_f2() {
        let c = PrimeContext::new(3, 5, 2, Some(vec![1, 0, 1])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let x = Zq::random(&c, &mut rng);
            let y = Zq::random(&c, &mut rng);
            assert_eq!(x.frobenius().frobenius(), x);
            assert_eq!((&x * &y).frobenius(), &x.frobenius() * &y.frobenius());
            assert_eq!((&x + &y).frobenius(), &x.frobenius() + &y.frobenius());
        }
    }

    #[test]
    fn frobenius_lifts_p_power() {
        let c = PrimeContext::new(5, 3, 3, Some(vec![3, 3, 0, 1])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let x = Zq::random(&c, &mut rng);
            assert_eq!(x.frobenius().reduce(1), x.pow(5).reduce(1));
            assert_eq!(x.frobenius().frobenius().frobenius(), x);
        }
    }

    #[test]
    fn rejects_reducible_minpoly() {
        assert!(PrimeContext::new(2, 3, 2, Some(vec![1, 0, 1])).is_err());
        assert!(PrimeContext::new(6, 3, 1, None).is_err());
    }
}

/// The lexicographically smallest monic irreducible polynomial of degree f mod p,
/// listed from the constant term up.
pub fn default_minpoly(p: u64, f: usize) -> Vec<i64> {
    let total = (p as u128).pow(f as u32);
    for k in 0..total {
        let mut c = Vec::with_capacity(f + 1);
        let mut r = k;
        for _ in 0..f {
            c.push((r % p as u128) as u64);
            r /= p as u128;
        }
        c.push(1);
        if c[0] != 0 && irreducible_mod_p(&c, p) {
            return c.into_iter().map(|x| x as i64).collect();
        }
    }
    unreachable!("irreducible polynomials of every degree exist")
}
