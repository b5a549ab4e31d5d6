//! Verification suites behind `verify`, grouped by identity family.
//!
//! Each suite returns a [`Report`]; a mathematical failure is a failed check,
//! while bad parameters are an `Err`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::arith::PrimeContext;
use crate::error::{Error, Result};
use crate::gradmod::{tor1_check, AGradedModule, Ring};
use crate::laurent::{verify_pd_relations, BElement, RingDescriptor};
use crate::report::Report;
use crate::witt::{bigwitt_pth_root, divided_teichmuller, verify_di_matrix, verify_psi_maz, BigWitt, WittVec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    All,
    Pd,
    Divisibility,
    Bigwitt,
    PsiMaz,
    DiMatrix,
    Effectivity,
    Tor1,
    WittIdentities,
}

impl Suite {
    pub const EACH: [Suite; 8] = [
        Suite::Pd,
        Suite::Divisibility,
        Suite::Bigwitt,
        Suite::PsiMaz,
        Suite::DiMatrix,
        Suite::Effectivity,
        Suite::Tor1,
        Suite::WittIdentities,
    ];
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SuiteParams {
    pub p: u64,
    pub witt_len: usize,
    pub window: i64,
    pub seed: u64,
}

impl SuiteParams {
    /// Window 4 p^n unless given.
    pub fn new(p: u64, witt_len: usize, window: Option<i64>, seed: u64) -> Self {
        let window = window.unwrap_or(4 * p.pow(witt_len as u32) as i64);
        SuiteParams { p, witt_len, window, seed }
    }
}

fn failed(title: &str, name: &str, e: &Error) -> Report {
    let mut r = Report::new(title);
    r.check(name, false, e.to_string());
    r
}

/// Parameter errors propagate; integrality and verification errors become failed checks.
fn absorb(title: &str, name: &str, r: Result<Report>) -> Result<Report> {
    match r {
        Ok(r) => Ok(r),
        Err(e @ (Error::Integrality(_) | Error::Verification(_) | Error::Truncation { .. })) => Ok(failed(title, name, &e)),
        Err(e) => Err(e),
    }
}

pub fn run(suite: Suite, params: &SuiteParams) -> Result<Vec<Report>> {
    let SuiteParams { p, witt_len: n, window, seed } = *params;
    if !crate::arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("witt length must be at least 1".into()));
    }
    let one = |r: Result<Report>| r.map(|r| vec![r]);
    match suite {
        Suite::All => {
            let mut out = Vec::new();
            for s in Suite::EACH {
                out.extend(run(s, params)?);
            }
            Ok(out)
        }
        Suite::Pd => one(absorb("pd relations", "relations", verify_pd_relations(p, n as u32, window))),
        Suite::Divisibility => one(divisibility(p, n, window)),
        Suite::Bigwitt => one(bigwitt(p, 8)),
        Suite::PsiMaz => one(absorb("psi-maz", "identities", verify_psi_maz(p, n, window, 50))),
        Suite::DiMatrix => one(absorb("di-matrix", "identities", verify_di_matrix(p, n, window))),
        Suite::Effectivity => one(effectivity(p, 100, seed)),
        Suite::Tor1 => one(tor1(p, window)),
        Suite::WittIdentities => one(witt_identities(p, n, 1000, seed)),
    }
}

/// p z = [v+^p] in W_n(B), reporting the components of z.
pub fn divisibility(p: u64, n: usize, window: i64) -> Result<Report> {
    let title = format!("divisibility p={p} n={n}");
    match divided_teichmuller(p, n, window) {
        Ok(z) => {
            let mut r = Report::new(title);
            let comps: Vec<String> = z.comps().iter().map(|c| c.to_string()).collect();
            r.check("p z = [v+^p]", true, format!("z = ({})", comps.join(", ")));
            r.check("z components integral", z.comps().iter().all(BElement::is_integral), "");
            Ok(r)
        }
        Err(e @ (Error::Integrality(_) | Error::Verification(_))) => Ok(failed(&title, "p z = [v+^p]", &e)),
        Err(e) => Err(e),
    }
}

/// g^p = 1 - v+^p x to the given order, with integral coefficients.
pub fn bigwitt(p: u64, order: usize) -> Result<Report> {
    let title = format!("bigwitt p={p} order={order}");
    let g = match bigwitt_pth_root(p, order) {
        Ok(g) => g,
        Err(e @ (Error::Integrality(_) | Error::Verification(_))) => return Ok(failed(&title, "g^p = 1 - v+^p x", &e)),
        Err(e) => return Err(e),
    };
    let ring = g.coeffs()[0].ring();
    let mut target = vec![BElement::zero(ring); order + 1];
    target[0] = BElement::from_int(ring, 1);
    target[1] = BElement::vplus(ring, p as i64).neg();
    let target = BigWitt::new(target)?;
    let mut r = Report::new(title);
    let gp = g.pow(p);
    r.check("g^p = 1 - v+^p x", gp == target, format!("order {order}"));
    let bad: Vec<usize> = (0..=order).filter(|&k| !g.coeffs()[k].is_integral()).collect();
    r.check("coefficients integral", bad.is_empty(), format!("{bad:?}"));
    Ok(r)
}

/// Degree-i base change A -> B is an isomorphism for 0 <= i <= p-1 on random effective modules.
pub fn effectivity(p: u64, cases: usize, seed: u64) -> Result<Report> {
    let ctx = PrimeContext::prime(p, 3)?;
    let results: Vec<(usize, bool, bool)> = (0..cases)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (p << 32) ^ k as u64);
            let m = AGradedModule::random(&ctx, p as i64 + 2, &mut rng);
            let hi = p as i64 + 3;
            let valid = m.pieces(Ring::A, -1, hi).validate().is_ok() && m.pieces(Ring::B, -1, hi).validate().is_ok();
            (k, valid, m.base_change_a_to_b().below_p_ok())
        })
        .collect();
    let mut r = Report::new(format!("effectivity p={p}"));
    let invalid: Vec<usize> = results.iter().filter(|x| !x.1).map(|x| x.0).collect();
    let broken: Vec<usize> = results.iter().filter(|x| !x.2).map(|x| x.0).collect();
    r.check(format!("v+ v- = p on A and B pieces ({cases} modules)"), invalid.is_empty(), format!("failing cases {invalid:?}"));
    r.check(format!("base change iso in degrees 0..{} ({cases} modules)", p - 1), broken.is_empty(), format!("failing cases {broken:?}"));
    Ok(r)
}

/// Tor_1(B/A, k) is k exactly in degrees >= p, computed two ways.
pub fn tor1(p: u64, window: i64) -> Result<Report> {
    let ctx = PrimeContext::prime(p, 4)?;
    let rows = tor1_check(&ctx, window);
    let mut r = Report::new(format!("tor1 p={p} window={window}"));
    let expect = |i: i64| u64::from(i >= p as i64);
    let bad: Vec<i64> = rows.iter().filter(|t| t.b_over_a != expect(t.degree)).map(|t| t.degree).collect();
    r.check("(B/A)[p] is k exactly in degrees >= p", bad.is_empty(), format!("mismatched degrees {bad:?}"));
    let bad: Vec<i64> = rows.iter().filter(|t| t.b_over_a != t.a_mod_vminus).map(|t| t.degree).collect();
    r.check("agrees with A/v- shifted by p", bad.is_empty(), format!("mismatched degrees {bad:?}"));
    Ok(r)
}

fn random_b<R: Rng>(ring: RingDescriptor, rng: &mut R) -> BElement {
    let mut x = BElement::zero(ring);
    for _ in 0..rng.gen_range(1..=2) {
        let c = rng.gen_range(-3i64..=3);
        x = x.add(&BElement::basis(ring, rng.gen_range(-1..=2)).scale_int(c));
    }
    x
}

fn random_witt<R: Rng>(ring: RingDescriptor, n: usize, rng: &mut R) -> WittVec<BElement> {
    WittVec::new(ring.p, (0..n).map(|_| random_b(ring, rng)).collect()).expect("length >= 1")
}

/// Failure labels for one random case.
fn witt_case(p: u64, n: usize, ring: RingDescriptor, rng: &mut ChaCha8Rng) -> Result<Vec<&'static str>> {
    let (x, y, z) = (random_witt(ring, n, rng), random_witt(ring, n, rng), random_witt(ring, n, rng));
    let (a, b) = (random_b(ring, rng), random_b(ring, rng));
    let zero = WittVec::zero(p, n, &a)?;
    let one = WittVec::one(p, n, &a)?;
    let mut bad = Vec::new();
    let mut check = |ok: bool, name: &'static str| {
        if !ok {
            bad.push(name);
        }
    };

    check(x.add(&y)?.add(&z)? == x.add(&y.add(&z)?)?, "additive associativity");
    check(x.add(&y)? == y.add(&x)?, "additive commutativity");
    check(x.add(&zero)? == x && x.add(&x.neg())?.is_zero(), "additive identity and inverse");
    let xy = x.mul(&y)?;
    check(xy.mul(&z)? == x.mul(&y.mul(&z)?)?, "multiplicative associativity");
    check(xy == y.mul(&x)?, "multiplicative commutativity");
    check(x.mul(&one)? == x, "multiplicative identity");
    check(x.mul(&y.add(&z)?)? == xy.add(&x.mul(&z)?)?, "distributivity");

    let gx = x.ghost();
    let gy = y.ghost();
    let sum: Vec<BElement> = gx.iter().zip(&gy).map(|(u, v)| u.add(v)).collect();
    let prod: Vec<BElement> = gx.iter().zip(&gy).map(|(u, v)| u.mul(v)).collect();
    check(x.add(&y)?.ghost() == sum, "ghost additive");
    check(xy.ghost() == prod, "ghost multiplicative");

    check(x.verschiebung().frobenius() == x.scale_int(p as i64), "FV = p");
    check(
        WittVec::teichmuller(p, n, &a.mul(&b))? == WittVec::teichmuller(p, n, &a)?.mul(&WittVec::teichmuller(p, n, &b)?)?,
        "Teichmüller multiplicativity",
    );
    let trunc = [&x, &y, &z, &xy].iter().any(|w| w.comps().iter().any(BElement::is_truncated));
    check(!trunc, "degree window");
    Ok(bad)
}

/// Ring axioms, ghost map, FV = p and [ab] = [a][b] on random vectors over B of length 1..=n_max.
pub fn witt_identities(p: u64, n_max: usize, cases: usize, seed: u64) -> Result<Report> {
    // components of degree <= 2 multiplied three at a time stay below 6 p^{n-1}
    let window = 6 * p.pow(n_max as u32 - 1) as i64 + 8;
    let ring = RingDescriptor::b(p, window);
    let results: Vec<(usize, usize, Vec<&'static str>)> = (0..cases)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (p << 40) ^ k as u64);
            let n = 1 + k % n_max;
            (k, n, witt_case(p, n, ring, &mut rng))
        })
        .map(|(k, n, r)| (k, n, r.unwrap_or_else(|_| vec!["evaluation error"])))
        .collect();
    let mut r = Report::new(format!("witt identities p={p} n<={n_max}"));
    let names = [
        "additive associativity",
        "additive commutativity",
        "additive identity and inverse",
        "multiplicative associativity",
        "multiplicative commutativity",
        "multiplicative identity",
        "distributivity",
        "ghost additive",
        "ghost multiplicative",
        "FV = p",
        "Teichmüller multiplicativity",
        "degree window",
        "evaluation error",
    ];
    for name in names {
        let bad: Vec<String> = results.iter().filter(|x| x.2.contains(&name)).map(|x| format!("#{} (n={})", x.0, x.1)).collect();
        if name == "evaluation error" && bad.is_empty() {
            continue;
        }
        r.check(format!("{name} ({cases} cases)"), bad.is_empty(), bad.join(", "));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        for s in [Suite::Pd, Suite::Divisibility, Suite::Tor1] {
            let reps = run(s, &SuiteParams::new(2, 2, None, 0)).unwrap();
            assert!(reps.iter().all(Report::passed), "{reps:?}");
        }
        assert!(witt_identities(3, 3, 12, 5).unwrap().passed());
        assert!(bigwitt(3, 6).unwrap().passed());
    }

    #[test]
    fn window_too_small_is_an_error() {
        assert!(run(Suite::PsiMaz, &SuiteParams::new(3, 2, Some(4), 0)).is_err());
    }
}
