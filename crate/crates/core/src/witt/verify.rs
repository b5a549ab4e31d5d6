//! Sharp lifts, the divided Teichmüller element and the Witt vector identities
//! behind the Drinfeld and Deligne-Illusie comparisons.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::vec::WittVec;
use crate::error::{Error, Result};
use crate::laurent::{BElement, ReducedElement, RingDescriptor};
use crate::report::Report;

fn require_window(p: u64, n: usize, window: i64) -> Result<()> {
    let need = p.pow(n as u32) as i64;
    if window < need {
        return Err(Error::InvalidArgument(format!("window {window} is below p^n = {need}")));
    }
    Ok(())
}

fn no_truncation(x: &WittVec<BElement>, what: &str) -> Result<()> {
    if x.comps().iter().any(BElement::is_truncated) {
        return Err(Error::Verification(format!("{what}: degree window overflow")));
    }
    Ok(())
}

/// The element of ker F with first component t, of length n.
pub fn sharp_lift(t: &BElement, n: usize) -> Result<WittVec<BElement>> {
    let p = t.ring().p;
    let mut comps: Vec<BElement> = vec![t.clone()];
    for m in 1..n {
        let mut acc = BElement::zero(t.ring());
        for (i, y) in comps.iter().enumerate() {
            let c = BigInt::from(p).pow(i as u32);
            acc = acc.add(&y.pow(p.pow((m - i) as u32)).scale(&BigRational::from_integer(c)));
        }
        let ym = acc.scale(&BigRational::new(BigInt::from(-1), BigInt::from(p).pow(m as u32)));
        comps.push(ym);
    }
    comps.truncate(n);
    for (m, y) in comps.iter().enumerate() {
        if let Err(w) = y.integrality_check() {
            return Err(Error::Integrality(format!("sharp lift component {m}: {w}")));
        }
    }
    WittVec::new(p, comps)
}

/// z with V(z) = [v+] - sharp_lift(v+) and p z = [v+^p], of length n.
pub fn divided_teichmuller(p: u64, n: usize, window: i64) -> Result<WittVec<BElement>> {
    require_window(p, n, window)?;
    let ring = RingDescriptor::b(p, window).strict();
    let vplus = BElement::vplus(ring, 1);
    let y = sharp_lift(&vplus, n + 1)?;
    let d = WittVec::teichmuller(p, n + 1, &vplus)?.sub(&y)?;
    if !d.comps()[0].is_zero() {
        return Err(Error::Verification(format!("[v+] - y has first component {}", d.comps()[0])));
    }
    let z = d.unshift()?;
    no_truncation(&z, "divided Teichmüller")?;
    for (m, c) in z.comps().iter().enumerate() {
        if let Err(w) = c.integrality_check() {
            return Err(Error::Integrality(format!("z component {m}: {w}")));
        }
    }
    let pz = z.scale_int(p as i64);
    let target = WittVec::teichmuller(p, n, &BElement::vplus(ring, p as i64))?;
    if pz != target {
        let m = (0..n).find(|&m| pz.comps()[m] != target.comps()[m]).unwrap();
        return Err(Error::Verification(format!(
            "p z differs from [v+^p] in component {m}: {} vs {}",
            pz.comps()[m],
            target.comps()[m]
        )));
    }
    Ok(z)
}

/// Elements used to exercise V(u F(x)) = x V(u).
pub fn test_panel(ring: RingDescriptor, n: usize, size: usize) -> Result<Vec<WittVec<BElement>>> {
    let p = ring.p;
    let b = |i: i64| BElement::vplus(ring, i);
    let mut seeds: Vec<WittVec<BElement>> = vec![WittVec::zero(p, n, &b(0))?];
    for c in [1i64, -1, 2, 3] {
        seeds.push(WittVec::teichmuller(p, n, &b(1).scale_int(c))?);
        seeds.push(WittVec::teichmuller(p, n, &BElement::vminus(ring, 1).scale_int(c))?);
        seeds.push(sharp_lift(&b(1).scale_int(c), n)?);
        seeds.push(sharp_lift(&BElement::from_int(ring, p as i64 * c), n)?);
        seeds.push(WittVec::integer(p, n, c, &b(0))?);
    }
    seeds.push(WittVec::teichmuller(p, n, &b(1).add(&BElement::vminus(ring, 1)))?);
    seeds.push(WittVec::new(p, (0..n).map(|i| BElement::from_int(ring, i as i64 + 2)).collect())?);
    let base = seeds.len();
    let mut k = 0;
    while seeds.len() < size {
        let x = &seeds[k % base];
        let y = &seeds[(3 * k + 1) % base];
        let next = if k % 2 == 0 { x.add(y)? } else { x.mul(y)? };
        seeds.push(next);
        k += 1;
    }
    seeds.truncate(size);
    Ok(seeds)
}

fn describe(x: &WittVec<BElement>) -> String {
    x.to_string()
}

/// Checks F(w) = 0, [v-] w + V(1) = p and V(u F(x)) = x V(u) for w = [v+] - V(z).
pub fn verify_psi_maz(p: u64, n: usize, window: i64, panel_size: usize) -> Result<Report> {
    require_window(p, n, window)?;
    let z = divided_teichmuller(p, n, window)?;
    let ring = z.comps()[0].ring();
    let mut report = Report::new(format!("psi-maz p={p} n={n}"));
    let vplus = BElement::vplus(ring, 1);
    let w = WittVec::teichmuller(p, n, &vplus)?.sub(&z.verschiebung().truncate(n))?;

    let fw = w.frobenius();
    report.check("F(w) = 0", fw.is_zero() && !fw.comps().iter().any(BElement::is_truncated), describe(&fw));

    let vm = WittVec::teichmuller(p, n, &BElement::vminus(ring, 1))?;
    let v1 = WittVec::one(p, n - 1, &vplus)?.verschiebung();
    let lhs = vm.mul(&w)?.add(&v1)?;
    let rhs = WittVec::integer(p, n, p as i64, &vplus)?;
    report.check("[v-] w + V(1) = p", lhs == rhs, format!("{} vs {}", describe(&lhs), describe(&rhs)));

    let u = z.truncate(n - 1);
    let panel = test_panel(ring, n, panel_size)?;
    let mut bad = Vec::new();
    let mut kernel_ok = true;
    for (k, x) in panel.iter().enumerate() {
        let l = u.mul(&x.frobenius())?.verschiebung();
        let r = x.mul(&u.verschiebung())?;
        let trunc = l.comps().iter().chain(r.comps()).any(BElement::is_truncated);
        if l != r || trunc {
            bad.push(format!("x#{k}: {} vs {}", describe(&l), describe(&r)));
        }
        if x.frobenius().is_zero() && !r.is_zero() {
            kernel_ok = false;
        }
    }
    report.check(
        format!("V(u F(x)) = x V(u) on {} elements", panel.len()),
        bad.is_empty(),
        if bad.is_empty() { "all equal".to_string() } else { bad.join("; ") },
    );
    report.check("x V(u) = 0 when F(x) = 0", kernel_ok, "sharp lifts in the panel");
    Ok(report)
}

/// Checks f + V(u) = [v+] over B⊗F_p and the homogeneity of z.
pub fn verify_di_matrix(p: u64, n: usize, window: i64) -> Result<Report> {
    require_window(p, n, window)?;
    let z = divided_teichmuller(p, n, window)?;
    let ring = z.comps()[0].ring();
    let mut report = Report::new(format!("di-matrix p={p} n={n}"));

    let degrees: Vec<Option<i64>> = z.comps().iter().map(BElement::homogeneous_degree).collect();
    let expected: Vec<Option<i64>> = (0..n).map(|m| Some(p.pow(m as u32 + 1) as i64)).collect();
    report.check("z_m homogeneous of degree p^(m+1)", degrees == expected, format!("{degrees:?}"));

    let u: WittVec<ReducedElement> = z.try_map(|c| c.reduce_mod(1))?;
    let vplus = BElement::vplus(ring, 1);
    let vbar = vplus.reduce_mod(1)?;
    let teich = WittVec::teichmuller(p, n + 1, &vbar)?;
    let vu = u.verschiebung();
    let f = teich.sub(&vu)?;
    let back = f.add(&vu)?;
    report.check("f + V(u) = [v+]", back == teich, format!("f = {f}"));

    let w = WittVec::teichmuller(p, n + 1, &vplus)?.sub(&z.verschiebung())?;
    let w_bar = w.try_map(|c| c.reduce_mod(1))?;
    report.check("f is the reduction of [v+] - V(z)", w_bar == f, format!("{w_bar}"));

    let killed = u.comps().iter().all(|c| c.kill_degrees_from(p as i64 - 1).is_zero());
    report.check("u vanishes below degree p-1", killed, format!("u = {u}"));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn sharp_lift_of_vplus() {
        let r = RingDescriptor::b(2, 16);
        let y = sharp_lift(&BElement::vplus(r, 1), 3).unwrap();
        assert_eq!(y.comps()[1], BElement::monomial(r, 2, q(-1, 2)));
        assert!(y.frobenius().is_zero());
        assert!(sharp_lift(&BElement::zero(r), 3).unwrap().is_zero());
    }

    #[test]
    fn sharp_lift_rejects_non_pd() {
        let r = RingDescriptor::b(3, 40);
        assert!(matches!(sharp_lift(&BElement::from_int(r, 1), 2), Err(Error::Integrality(_))));
    }

    #[test]
    fn divided_teichmuller_values() {
        let z = divided_teichmuller(2, 3, 10).unwrap();
        let r = z.comps()[0].ring();
        assert_eq!(z.comps()[0], BElement::monomial(r, 2, q(1, 2)));
        assert_eq!(z.comps()[1], BElement::monomial(r, 4, q(1, 8)));
        let z3 = divided_teichmuller(3, 2, 12).unwrap();
        assert_eq!(z3.comps()[0], BElement::monomial(z3.comps()[0].ring(), 3, q(1, 3)));
    }

    #[test]
    fn identities_hold() {
        assert!(verify_psi_maz(2, 3, 40, 20).unwrap().passed());
        assert!(verify_di_matrix(2, 3, 10).unwrap().passed());
        assert!(verify_di_matrix(3, 2, 12).unwrap().passed());
    }
}
