//! Witt structure polynomials from the ghost recursion.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::ring::CoeffRing;

/// Sparse multivariate polynomial with rational coefficients.
#[derive(Debug, Clone, PartialEq)]
struct QPoly {
    terms: BTreeMap<Vec<u32>, BigRational>,
    nvars: usize,
}

impl QPoly {
    fn zero(nvars: usize) -> Self {
        QPoly { terms: BTreeMap::new(), nvars }
    }

    fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut q = Self::zero(nvars);
        q.terms.insert(e, BigRational::one());
        q
    }

    fn add_scaled(&mut self, other: &QPoly, c: &BigRational) {
        for (e, x) in &other.terms {
            let v = self.terms.entry(e.clone()).or_insert_with(BigRational::zero);
            *v += x * c;
            if v.is_zero() {
                self.terms.remove(e);
            }
        }
    }

    fn mul(&self, other: &QPoly) -> QPoly {
        let mut r = QPoly::zero(self.nvars);
        for (e1, a) in &self.terms {
            for (e2, b) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(x, y)| x + y).collect();
                let v = r.terms.entry(e.clone()).or_insert_with(BigRational::zero);
                *v += a * b;
                if v.is_zero() {
                    r.terms.remove(&e);
                }
            }
        }
        r
    }

    fn pow(&self, mut k: u64) -> QPoly {
        let mut acc = QPoly::zero(self.nvars);
        acc.terms.insert(vec![0; self.nvars], BigRational::one());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    fn into_integral(self, what: &str) -> IntPoly {
        let terms = self
            .terms
            .into_iter()
            .map(|(e, c)| {
                assert!(c.is_integer(), "{what}: non-integral coefficient {c}");
                (e, c.to_integer())
            })
            .collect();
        IntPoly { terms }
    }
}

/// Integer polynomial ready for evaluation in any coefficient ring.
#[derive(Debug, Clone, PartialEq)]
pub struct IntPoly {
    pub terms: Vec<(Vec<u32>, BigInt)>,
}

impl IntPoly {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exps: &[u32]) -> BigInt {
        self.terms.iter().find(|(e, _)| e == exps).map(|(_, c)| c.clone()).unwrap_or_default()
    }

    pub fn eval<R: CoeffRing>(&self, vars: &[R], like: &R) -> R {
        let mut powers: Vec<Vec<R>> = vars.iter().map(|v| vec![v.one_like(), v.clone()]).collect();
        let mut acc = like.zero_like();
        for (exps, c) in &self.terms {
            let mut t = like.int_like(c);
            for (i, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let table = &mut powers[i];
                while table.len() <= e as usize {
                    let next = table.last().unwrap().times(&vars[i]);
                    table.push(next);
                }
                t = t.times(&table[e as usize]);
            }
            acc = acc.plus(&t);
        }
        acc
    }
}

/// Structure polynomials of W_n over Z_(p).
///
/// Binary polynomials use X_0..X_{n-1} as variables 0..n and Y_j as n + j.
#[derive(Debug)]
pub struct WittCtx {
    pub p: u64,
    pub n: usize,
    pub sum: Vec<IntPoly>,
    pub prod: Vec<IntPoly>,
    pub neg: Vec<IntPoly>,
    /// frob[m] in X_0..X_{m+1}, for m < n - 1
    pub frob: Vec<IntPoly>,
}

/// Default length bounds that keep the tables small.
pub fn default_max_length(p: u64) -> usize {
    match p {
        2 => 4,
        3 => 3,
        5 => 2,
        _ => 1,
    }
}

fn ghost(p: u64, m: usize, vars: &[QPoly]) -> QPoly {
    let mut g = QPoly::zero(vars[0].nvars);
    for (i, v) in vars.iter().enumerate().take(m + 1) {
        let c = BigRational::from_integer(BigInt::from(p).pow(i as u32));
        g.add_scaled(&v.pow(p.pow((m - i) as u32)), &c);
    }
    g
}

/// Solves gh_m(Z) = target for Z_m given Z_0..Z_{m-1}.
fn solve_level(p: u64, m: usize, lower: &[QPoly], target: &QPoly) -> QPoly {
    let mut r = target.clone();
    for (i, z) in lower.iter().enumerate() {
        let c = -BigRational::from_integer(BigInt::from(p).pow(i as u32));
        r.add_scaled(&z.pow(p.pow((m - i) as u32)), &c);
    }
    let mut out = QPoly::zero(r.nvars);
    out.add_scaled(&r, &BigRational::new(BigInt::one(), BigInt::from(p).pow(m as u32)));
    out
}

impl WittCtx {
    fn generate(p: u64, n: usize) -> WittCtx {
        let nv = 2 * n;
        let xs: Vec<QPoly> = (0..n).map(|i| QPoly::var(nv, i)).collect();
        let ys: Vec<QPoly> = (0..n).map(|i| QPoly::var(nv, n + i)).collect();
        let ux: Vec<QPoly> = (0..n).map(|i| QPoly::var(n, i)).collect();
        let (mut s, mut pr, mut ng, mut fr) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for m in 0..n {
            let gx = ghost(p, m, &xs);
            let gy = ghost(p, m, &ys);
            let mut t = gx.clone();
            t.add_scaled(&gy, &BigRational::one());
            s.push(solve_level(p, m, &s, &t));
            pr.push(solve_level(p, m, &pr, &gx.mul(&gy)));
            let mut t = QPoly::zero(n);
            t.add_scaled(&ghost(p, m, &ux), &-BigRational::one());
            ng.push(solve_level(p, m, &ng, &t));
            if m + 1 < n {
                fr.push(solve_level(p, m, &fr, &ghost(p, m + 1, &ux)));
            }
        }
        let int = |v: Vec<QPoly>, what: &str| {
            v.into_iter().enumerate().map(|(m, q)| q.into_integral(&format!("{what}_{m}"))).collect()
        };
        WittCtx { p, n, sum: int(s, "S"), prod: int(pr, "P"), neg: int(ng, "N"), frob: int(fr, "F") }
    }

    /// Tables of length at least n, generated once per prime and shared.
    pub fn get(p: u64, n: usize) -> Result<Arc<WittCtx>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        static CACHE: OnceLock<Mutex<HashMap<u64, Arc<WittCtx>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(c) = cache.lock().unwrap().get(&p) {
            if c.n >= n {
                return Ok(c.clone());
            }
        }
        if n > default_max_length(p) {
            log::warn!("Witt length {n} for p = {p} exceeds the default bound {}", default_max_length(p));
        }
        let ctx = Arc::new(WittCtx::generate(p, n));
        let mut guard = cache.lock().unwrap();
        let entry = guard.entry(p).or_insert_with(|| ctx.clone());
        if entry.n < n {
            *entry = ctx;
        }
        Ok(entry.clone())
    }

    pub fn monomial_count(&self) -> usize {
        self.sum.iter().chain(&self.prod).chain(&self.neg).chain(&self.frob).map(IntPoly::len).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exponent vector from (X exponents, Y exponents) in the table layout.
    fn exps(w: &WittCtx, x: &[u32], y: &[u32]) -> Vec<u32> {
        let mut e = vec![0; 2 * w.n];
        e[..x.len()].copy_from_slice(x);
        e[w.n..w.n + y.len()].copy_from_slice(y);
        e
    }

    #[test]
    fn low_levels_for_two() {
        let w = WittCtx::get(2, 2).unwrap();
        let s1 = &w.sum[1];
        assert_eq!(s1.len(), 3);
        assert_eq!(s1.coefficient(&exps(&w, &[0, 1], &[])), BigInt::from(1));
        assert_eq!(s1.coefficient(&exps(&w, &[], &[0, 1])), BigInt::from(1));
        assert_eq!(s1.coefficient(&exps(&w, &[1], &[1])), BigInt::from(-1));
        let p1 = &w.prod[1];
        assert_eq!(p1.len(), 3);
        assert_eq!(p1.coefficient(&exps(&w, &[2], &[0, 1])), BigInt::from(1));
        assert_eq!(p1.coefficient(&exps(&w, &[0, 1], &[2])), BigInt::from(1));
        assert_eq!(p1.coefficient(&exps(&w, &[0, 1], &[0, 1])), BigInt::from(2));
    }

    #[test]
    fn product_level_zero() {
        for p in [2, 3, 5] {
            let w = WittCtx::get(p, 1).unwrap();
            assert_eq!(w.prod[0].len(), 1);
            assert_eq!(w.prod[0].coefficient(&exps(&w, &[1], &[1])), BigInt::from(1));
        }
    }

    #[test]
    fn default_tables_stay_small() {
        for p in [2, 3, 5] {
            let w = WittCtx::get(p, default_max_length(p)).unwrap();
            assert!(w.monomial_count() < 100_000);
        }
    }
}
