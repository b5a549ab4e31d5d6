use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use flgauge::arith::{mazur_number, PrimeContext, Zq};
use flgauge::fl::{fl_hom_ext1, random_mod_p, unit_mod_p};
use flgauge::gradmod::{smith_normal_form, Mat};
use flgauge::mazsyn::{merge_exps, syntomic_cohomology_fl};
use flgauge::sen::{alpha, di_maz_endofunctor};
use flgauge::witt::WittVec;

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn snf_diagonalizes(p in prime(), n in 1u32..4, rows in 0usize..5, cols in 0usize..5, seed: u64) {
        let c = PrimeContext::prime(p, n).unwrap();
        let m = Mat::random(&c, rows, cols, &mut ChaCha8Rng::seed_from_u64(seed));
        let s = smith_normal_form(&m);
        prop_assert_eq!(s.u.mul(&s.u_inv), Mat::identity(&c, rows));
        prop_assert_eq!(s.v.mul(&s.v_inv), Mat::identity(&c, cols));
        let d = s.u.mul(&m).mul(&s.v);
        let expect = Mat::from_fn(&c, rows, cols, |r, k| if r == k { Zq::p_power(&c, s.exps[r]) } else { Zq::zero(&c) });
        prop_assert_eq!(d, expect);
        prop_assert!(s.exps.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn mazur_numbers_step_by_at_most_one(p in prime(), n in 1i64..200) {
        let a = mazur_number(p, n).unwrap();
        let b = mazur_number(p, n + 1).unwrap();
        prop_assert!(b == a || b == a + 1);
        prop_assert!(a <= n as u64);
    }

    #[test]
    fn syntomic_is_additive(p in prime(), seed: u64) {
        let c = PrimeContext::prime(p, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_mod_p(&c, p as usize - 1, 3, &mut rng);
        let n = random_mod_p(&c, p as usize - 1, 3, &mut rng);
        let s = m.direct_sum(&n);
        for i in 0..=(p as usize - 2) {
            let (a, b, ab) = (syntomic_cohomology_fl(&m, i).unwrap(), syntomic_cohomology_fl(&n, i).unwrap(), syntomic_cohomology_fl(&s, i).unwrap());
            prop_assert_eq!(ab.h0, merge_exps(&a.h0, &b.h0));
            prop_assert_eq!(ab.h1, merge_exps(&a.h1, &b.h1));
        }
    }

    #[test]
    fn hom_ext_additive_in_target(p in prime(), seed: u64) {
        let c = PrimeContext::prime(p, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_mod_p(&c, p as usize - 1, 2, &mut rng);
        let n1 = random_mod_p(&c, p as usize - 1, 2, &mut rng);
        let n2 = random_mod_p(&c, p as usize - 1, 2, &mut rng);
        let (h1, e1) = fl_hom_ext1(&m, &n1).unwrap();
        let (h2, e2) = fl_hom_ext1(&m, &n2).unwrap();
        prop_assert_eq!(fl_hom_ext1(&m, &n1.direct_sum(&n2)).unwrap(), (h1 + h2, e1 + e2));
    }

    #[test]
    fn twist_shifts_weights(p in prime(), j in 0usize..3, seed: u64) {
        let c = PrimeContext::prime(p, 3).unwrap();
        let m = flgauge::fl::torsionfree_lift(&random_mod_p(&c, p as usize - 1, 3, &mut ChaCha8Rng::seed_from_u64(seed))).unwrap();
        prop_assert_eq!(m.twist(j).base().weight_window(), m.base().weight_window().shift(j as i64));
        prop_assert!(m.twist(j).validate().unwrap().passed());
    }

    #[test]
    fn unit_twist_self_ext(p in prime(), j in 0usize..4) {
        let c = PrimeContext::prime(p, 1).unwrap();
        let j = j % p as usize;
        let k = unit_mod_p(&c, j);
        prop_assert_eq!(fl_hom_ext1(&k, &k).unwrap(), (1, 1));
    }

    #[test]
    fn sen_endofunctor_keeps_the_graded_module(p in prop::sample::select(vec![3u64, 5]), seed: u64) {
        let c = PrimeContext::prime(p, 1).unwrap();
        let m = random_mod_p(&c, p as usize - 1, 4, &mut ChaCha8Rng::seed_from_u64(seed));
        let a = alpha(&m).unwrap();
        prop_assert!(a.mul(&a).is_zero());
        let out = di_maz_endofunctor(&m).unwrap();
        prop_assert!(out.validate().unwrap().passed());
        let (out_t, m_t) = (out.trimmed(), m.trimmed());
        prop_assert_eq!(out_t.base(), m_t.base());
        if a.is_zero() {
            prop_assert_eq!(out, m);
        }
    }

    #[test]
    fn witt_ghost_over_zq(p in prop::sample::select(vec![2u64, 3]), xs in prop::collection::vec(0u64..1000, 6)) {
        let c = PrimeContext::prime(p, 6).unwrap();
        let z = |k: usize| Zq::from_u64(&c, xs[k]);
        let x = WittVec::new(p, vec![z(0), z(1), z(2)]).unwrap();
        let y = WittVec::new(p, vec![z(3), z(4), z(5)]).unwrap();
        let gs: Vec<Zq> = x.ghost().iter().zip(y.ghost()).map(|(a, b)| a + &b).collect();
        let gp: Vec<Zq> = x.ghost().iter().zip(y.ghost()).map(|(a, b)| a * &b).collect();
        prop_assert_eq!(x.add(&y).unwrap().ghost(), gs);
        prop_assert_eq!(x.mul(&y).unwrap().ghost(), gp);
    }
}
