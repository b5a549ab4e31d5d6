//! Smith normal form over the chain ring Z_q/p^N.

use super::Mat;
use crate::arith::Zq;

/// U·M·V = diag(p^{e_0}, p^{e_1}, ...) with e sorted; e = N stands for a zero divisor.
#[derive(Debug, Clone)]
pub struct Snf {
    pub u: Mat,
    pub u_inv: Mat,
    pub v: Mat,
    pub v_inv: Mat,
    /// length min(rows, cols)
    pub exps: Vec<u32>,
}

impl Snf {
    pub fn divisors(&self) -> Vec<Zq> {
        self.exps.iter().map(|&e| Zq::p_power(self.u.ctx(), e)).collect()
    }

    /// Number of nonzero divisors.
    pub fn rank(&self) -> usize {
        let n = self.u.ctx().precision();
        self.exps.iter().filter(|&&e| e < n).count()
    }

    pub fn diagonal(&self, rows: usize, cols: usize) -> Mat {
        let ctx = self.u.ctx();
        let mut d = Mat::zeros(ctx, rows, cols);
        for (i, &e) in self.exps.iter().enumerate() {
            d.set(i, i, Zq::p_power(ctx, e));
        }
        d
    }
}

pub fn smith_normal_form(m: &Mat) -> Snf {
    let ctx = m.ctx().clone();
    let n = ctx.precision();
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u = Mat::identity(&ctx, rows);
    let mut u_inv = Mat::identity(&ctx, rows);
    let mut v = Mat::identity(&ctx, cols);
    let mut v_inv = Mat::identity(&ctx, cols);
    let mut exps = Vec::with_capacity(rows.min(cols));

    for k in 0..rows.min(cols) {
        let mut best = (n, k, k);
        'search: for i in k..rows {
            for j in k..cols {
                let val = a.get(i, j).valuation();
                if val < best.0 {
                    best = (val, i, j);
                    if val == 0 {
                        break 'search;
                    }
                }
            }
        }
        let (val, pi, pj) = best;
        if val == n {
            exps.extend(std::iter::repeat(n).take(rows.min(cols) - k));
            break;
        }
        a.swap_rows(k, pi);
        u.swap_rows(k, pi);
        u_inv.swap_cols(k, pi);
        a.swap_cols(k, pj);
        v.swap_cols(k, pj);
        v_inv.swap_rows(k, pj);

        // normalize the pivot to p^val
        let unit = a.get(k, k).div_p_pow(val);
        let unit_inv = unit.inverse().expect("pivot cofactor is a unit");
        a.scale_col(k, &unit_inv);
        v.scale_col(k, &unit_inv);
        v_inv.scale_row(k, &unit);

        for i in k + 1..rows {
            let b = a.get(i, k);
            if b.is_zero() {
                continue;
            }
            let q = b.div_p_pow(val);
            let mq = -&q;
            a.row_axpy(i, k, &mq);
            u.row_axpy(i, k, &mq);
            u_inv.col_axpy(k, i, &q);
        }
        for j in k + 1..cols {
            let b = a.get(k, j);
            if b.is_zero() {
                continue;
            }
            let q = b.div_p_pow(val);
            let mq = -&q;
            a.col_axpy(j, k, &mq);
            v.col_axpy(j, k, &mq);
            v_inv.row_axpy(k, j, &q);
        }
        exps.push(val);
    }
    Snf { u, u_inv, v, v_inv, exps }
}

/// Generators of {y : M y = 0}, as columns.
pub fn kernel_basis(m: &Mat) -> Mat {
    let ctx = m.ctx();
    let n = ctx.precision();
    let s = smith_normal_form(m);
    let mut cols = Vec::new();
    for k in 0..m.cols() {
        let e = s.exps.get(k).copied().unwrap_or(n);
        if e == 0 {
            continue;
        }
        let scale = Zq::p_power(ctx, n - e);
        cols.push(s.v.column(k).iter().map(|x| x * &scale).collect::<Vec<_>>());
    }
    Mat::from_fn(ctx, m.cols(), cols.len(), |r, c| cols[c][r].clone())
}

/// Some y with M y = b, if one exists.
pub fn solve(m: &Mat, b: &[Zq]) -> Option<Vec<Zq>> {
    let ctx = m.ctx();
    let n = ctx.precision();
    let s = smith_normal_form(m);
    let ub = s.u.mul_vec(b);
    let mut z = vec![Zq::zero(ctx); m.cols()];
    for (k, c) in ub.iter().enumerate() {
        match s.exps.get(k) {
            Some(&e) if e < n => {
                if c.valuation() < e {
                    return None;
                }
                z[k] = c.div_p_pow(e);
            }
            _ => {
                if !c.is_zero() {
                    return None;
                }
            }
        }
    }
    Some(s.v.mul_vec(&z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::PrimeContext;

    fn m(ctx: &crate::arith::Ctx, rows: &[Vec<i64>]) -> Mat {
        Mat::from_i64(ctx, rows, rows[0].len()).unwrap()
    }

    #[test]
    fn small_examples() {
        let c27 = PrimeContext::prime(3, 3).unwrap();
        assert_eq!(smith_normal_form(&m(&c27, &[vec![3, 0], vec![0, 1]])).exps, vec![0, 1]);
        let c8 = PrimeContext::prime(2, 3).unwrap();
        let a = m(&c8, &[vec![2, 1], vec![0, 2]]);
        let s = smith_normal_form(&a);
        assert_eq!(s.exps, vec![0, 2]);
        assert_eq!(s.u.mul(&a).mul(&s.v), s.diagonal(2, 2));
        let z = Mat::zeros(&c8, 2, 2);
        assert_eq!(smith_normal_form(&z).exps, vec![3, 3]);
    }

    #[test]
    fn inverses_are_tracked() {
        let c = PrimeContext::new(3, 3, 2, Some(vec![1, 0, 1])).unwrap();
        let mut rng = rand::thread_rng();
        for _ in 0..20 {
            let a = Mat::random(&c, 3, 4, &mut rng);
            let s = smith_normal_form(&a);
            assert_eq!(s.u.mul(&a).mul(&s.v), s.diagonal(3, 4));
            assert_eq!(s.u.mul(&s.u_inv), Mat::identity(&c, 3));
            assert_eq!(s.v.mul(&s.v_inv), Mat::identity(&c, 4));
        }
    }

    #[test]
    fn kernel_and_solve() {
        let c = PrimeContext::prime(3, 2).unwrap();
        let a = m(&c, &[vec![3, 0], vec![0, 0]]);
        let k = kernel_basis(&a);
        assert!(a.mul(&k).is_zero());
        assert_eq!(k.cols(), 2);
        let b = vec![Zq::from_u64(&c, 6), Zq::zero(&c)];
        let y = solve(&a, &b).unwrap();
        assert_eq!(a.mul_vec(&y), b);
        assert!(solve(&a, &[Zq::one(&c), Zq::zero(&c)]).is_none());
    }
}
