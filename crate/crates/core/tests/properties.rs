use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fockzeta::fock::{basis_up_to, h_apply, partitions, Partition};
use fockzeta::regularized::{quad_apply, QuadraticOpSpec};
use fockzeta::series::{delta_series, dilate, exp_of, log1m, mul, residue_change_check, taylor_shift, Coeff};
use fockzeta::suite::random_residue_instance;
use fockzeta::voa::{jacobi_check, vertex_mode};
use fockzeta::{FockVector, Scalar, Series, VarWindow};

fn scalar() -> impl Strategy<Value = Scalar> {
    (-6i64..=6, 1i64..=4).prop_map(|(p, q)| Scalar::ratio(p, q))
}

fn coeffs(n: usize) -> impl Strategy<Value = Vec<Scalar>> {
    prop::collection::vec(scalar(), n)
}

fn power(var: &str, from: i64, cs: &[Scalar], high: i64) -> Series<Scalar> {
    let terms = cs.iter().enumerate().map(|(i, c)| (vec![from + i as i64], c.clone()));
    Series::from_terms(vec![VarWindow::power(var, high)], terms).unwrap()
}

fn laurent_poly(var: &str, low: i64, cs: &[Scalar]) -> Series<Scalar> {
    let high = low + cs.len() as i64 - 1;
    let terms = cs.iter().enumerate().map(|(i, c)| (vec![low + i as i64], c.clone()));
    Series::from_terms(vec![VarWindow::exact(var, low, high)], terms).unwrap()
}

/// Every coefficient known to `small` agrees with `big`.
fn agrees_on_window(small: &Series<Scalar>, big: &Series<Scalar>) -> bool {
    let names: Vec<String> = small.var_names();
    let big = big.align_to(&names).unwrap();
    let ranges: Vec<(i64, i64)> = small.vars().iter().map(|w| (w.low, w.high)).collect();
    let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        if small.is_known(&idx) && small.coeff(&idx).unwrap() != big.coeff(&idx).unwrap() {
            return false;
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return true;
            }
            if idx[k] < ranges[k].1 {
                idx[k] += 1;
                break;
            }
            idx[k] = ranges[k].0;
            k += 1;
        }
    }
}

fn basis_vector(max_weight: u32) -> impl Strategy<Value = FockVector> {
    let all: Vec<Partition> = basis_up_to(max_weight);
    prop::sample::select(all).prop_map(FockVector::basis)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn products_are_window_sound(a in coeffs(7), b in coeffs(7)) {
        let f = power("x", 0, &a[..4], 3);
        let g = power("x", 0, &b[..4], 3);
        let fb = power("x", 0, &a, 6);
        let gb = power("x", 0, &b, 6);
        prop_assert!(agrees_on_window(&mul(&f, &g).unwrap(), &mul(&fb, &gb).unwrap()));
    }

    #[test]
    fn exponentials_are_window_sound(a in coeffs(6)) {
        let f = power("x", 1, &a[..3], 3);
        let fb = power("x", 1, &a, 6);
        prop_assert!(agrees_on_window(&exp_of(&f, None).unwrap(), &exp_of(&fb, None).unwrap()));
    }

    #[test]
    fn taylor_shift_is_window_sound(a in coeffs(6), low in -3i64..0) {
        let f = laurent_poly("x", low, &a);
        let small = taylor_shift(&f, "x", "y", 2).unwrap();
        let big = taylor_shift(&f, "x", "y", 4).unwrap();
        prop_assert!(agrees_on_window(&small, &big));
    }

    #[test]
    fn dilation_is_multiplicative(a in coeffs(4), b in coeffs(4), la in -2i64..=1, lb in -2i64..=1) {
        let f = laurent_poly("x", la, &a);
        let g = laurent_poly("x", lb, &b);
        let lhs = mul(&dilate(&f, "x", "y", 3).unwrap(), &dilate(&g, "x", "y", 3).unwrap()).unwrap();
        let rhs = dilate(&mul(&f, &g).unwrap(), "x", "y", 3).unwrap();
        prop_assert!(agrees_on_window(&lhs, &rhs));
        prop_assert!(agrees_on_window(&rhs, &lhs));
    }

    #[test]
    fn exp_of_log1m_is_one_minus_t(order in 1i64..=9) {
        let e = exp_of(&log1m("t", order).unwrap(), None).unwrap();
        for k in 0..=order {
            let want = match k { 0 => Scalar::one(), 1 => Scalar::from_int(-1), _ => Scalar::zero() };
            prop_assert_eq!(e.coeff(&[k]).unwrap(), want);
        }
    }

    #[test]
    fn delta_coefficients_are_one(n in 0i64..=12) {
        let d = delta_series("z", n).unwrap();
        for k in -n..=n {
            prop_assert_eq!(d.coeff(&[k]).unwrap(), Scalar::one());
        }
        prop_assert!(!d.is_known(&[n + 1]));
    }

    #[test]
    fn heisenberg_relations(m in -5i64..=5, n in -5i64..=5, v in basis_vector(8)) {
        let lhs = h_apply(m, &h_apply(n, &v)).sub(&h_apply(n, &h_apply(m, &v)));
        let rhs = if m + n == 0 { v.scaled(&Scalar::from_int(m)) } else { FockVector::zero() };
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn modes_shift_weight(u in basis_vector(3), v in basis_vector(4), n in -4i64..=6) {
        let (wu, wv) = (u.weight().unwrap() as i64, v.weight().unwrap() as i64);
        let out = vertex_mode(&u, n, &v);
        if n > wu + wv - 1 {
            prop_assert!(out.is_zero());
        }
        if !out.is_zero() {
            prop_assert_eq!(out.weight().map(i64::from), Some(wu + wv - n - 1));
        }
    }

    #[test]
    fn omega_modes_are_virasoro(n in -4i64..=4, v in basis_vector(8)) {
        let lhs = vertex_mode(&FockVector::omega(), n + 1, &v);
        let rhs = quad_apply(QuadraticOpSpec::virasoro(n), &v);
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn residue_change_of_variables(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (h, f) = random_residue_instance(&mut rng);
        let r = residue_change_check(&h, "x", &f, "y").unwrap();
        prop_assert!(r.passed(), "{}", r.to_json_line());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn jacobi_on_low_weight_basis(u in basis_vector(3), v in basis_vector(3), t in basis_vector(3)) {
        let r = jacobi_check(&u, &v, &t, 3);
        prop_assert!(r.passed(), "{}", r.to_json_line());
    }
}

#[test]
fn partitions_have_the_right_weight() {
    for n in 0..=10 {
        assert!(partitions(n).iter().all(|p| p.weight() == n));
    }
}
