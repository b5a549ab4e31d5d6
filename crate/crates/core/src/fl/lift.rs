use super::FLModule;
use crate::error::{Error, Result};
use crate::gradmod::{smith_normal_form, FPModule, GradedModule, Mat};
use crate::arith::Zq;

/// Rank of a matrix read modulo p.
fn rank_mod_p(m: &Mat) -> usize {
    smith_normal_form(m).exps.iter().filter(|&&e| e == 0).count()
}

/// Columns of `m` extended by standard basis vectors to a basis mod p.
fn complete_basis(m: &Mat, dim: usize) -> Mat {
    let ctx = m.ctx();
    let mut cur = m.clone();
    for k in 0..dim {
        if cur.cols() == dim {
            break;
        }
        let e = Mat::from_fn(ctx, dim, 1, |r, _| if r == k { Zq::one(ctx) } else { Zq::zero(ctx) });
        let cand = Mat::hstack(ctx, dim, &[&cur, &e]);
        if rank_mod_p(&cand) == cand.cols() {
            cur = cand;
        }
    }
    cur
}

/// Free FL module over Z_q/p^N whose reduction mod p is `m`.
///
/// Chooses bases B_i with B_{i-1} = [v- B_i | complement], so that v- becomes
/// [I; 0] and φ' is nonzero only on the graded columns; lifts those columns
/// by least residues, scales them by p^{j-i}, and transports back.
pub fn torsionfree_lift(m: &FLModule) -> Result<FLModule> {
    if !m.killed_by_p() {
        return Err(Error::InvalidArgument("torsion-free lift needs a module killed by p".into()));
    }
    let report = m.validate()?;
    if !report.passed() {
        let why: Vec<String> = report.failures().map(|c| c.name.clone()).collect();
        return Err(Error::InvalidModule(format!("input is not FL: {}", why.join(", "))));
    }
    let ctx = m.ctx().clone();
    let w = m.wmax();
    let dims: Vec<usize> = (0..=w).map(|i| m.piece(i as i64).ngens()).collect();

    let mut bases = vec![Mat::identity(&ctx, dims[w]); w + 1];
    for i in (1..=w).rev() {
        let img = m.vminus(i as i64).matrix().mul(&bases[i]);
        bases[i - 1] = complete_basis(&img, dims[i - 1]);
    }
    let inv: Vec<Mat> = bases.iter().map(Mat::inverse).collect::<Result<_>>()?;
    let one = |d: usize| vec![1u32; d];

    // φ' in adapted bases, mod p
    let adapted: Vec<Mat> = (0..=w)
        .map(|i| inv[0].mul(&m.phi(i)).mul(&bases[i].frobenius()).reduce_rows(&one(dims[0])))
        .collect();
    let gr = |i: usize| dims[i] - dims.get(i + 1).copied().unwrap_or(0);

    let mut phi_free = Vec::with_capacity(w + 1);
    for i in 0..=w {
        let mut ph = Mat::zeros(&ctx, dims[0], dims[i]);
        // F^i basis order: gr^w, gr^{w-1}, ..., gr^i
        for j in i..=w {
            let start_i = dims.get(j + 1).copied().unwrap_or(0);
            let g = adapted[j].block(0, start_i, dims[0], gr(j));
            let scaled = g.scale(&Zq::p_power(&ctx, (j - i) as u32));
            ph.set_block(0, start_i, &scaled);
        }
        phi_free.push(ph);
    }

    let pieces: Vec<FPModule> = dims.iter().map(|&d| FPModule::free(&ctx, d)).collect();
    let vminus: Vec<Mat> = (1..=w)
        .map(|i| {
            let std = Mat::from_fn(&ctx, dims[i - 1], dims[i], |r, c| if r == c { Zq::one(&ctx) } else { Zq::zero(&ctx) });
            bases[i - 1].mul(&std).mul(&inv[i])
        })
        .collect();
    let phi: Vec<Mat> = (0..=w).map(|i| bases[0].mul(&phi_free[i]).mul(&inv[i].frobenius())).collect();
    let base = GradedModule::from_matrices(pieces, vminus)?;
    let lifted = FLModule::new(base, phi)?;
    let check = lifted.validate()?;
    if !check.passed() {
        let why: Vec<String> = check.failures().map(|c| format!("{} ({})", c.name, c.detail)).collect();
        return Err(Error::Verification(format!("lift failed validation: {}", why.join("; "))));
    }
    Ok(lifted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::PrimeContext;
    use crate::fl::{tate_twist, unit_mod_p};

    #[test]
    fn lift_of_unit_lines() {
        let c = PrimeContext::prime(5, 3).unwrap();
        for j in 0..4 {
            let l = torsionfree_lift(&unit_mod_p(&c, j)).unwrap();
            assert_eq!(l, tate_twist(&c, j, &Zq::one(&c)).unwrap());
            assert_eq!(l.reduce_mod_p(), unit_mod_p(&c, j));
        }
    }
}
