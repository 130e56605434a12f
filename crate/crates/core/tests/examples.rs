use fockzeta::fock::{basis, h_apply};
use fockzeta::regularized::central_term;
use fockzeta::scalar::factorial;
use fockzeta::series::{residue_change_check, Coeff};
use fockzeta::voa::{vertex_mode, x_mode, y_bracket_apply};
use fockzeta::{FockVector, Scalar, Series, VarWindow};

/// `x1 (1 - e^y)` truncated at `y^order`.
fn one_minus_exp(order: i64) -> Series<Scalar> {
    let terms = (1..=order).map(|k| (vec![1, k], -factorial(k as u32).recip()));
    Series::from_terms(vec![VarWindow::exact("x1", 1, 1), VarWindow::power("y", order)], terms).unwrap()
}

fn monomial(k: i64) -> Series<Scalar> {
    Series::from_terms(vec![VarWindow::exact("x", k, k)], vec![(vec![k], Scalar::one())]).unwrap()
}

#[test]
fn residue_survives_the_exponential_substitution() {
    let r = residue_change_check(&monomial(-1), "x", &one_minus_exp(4), "y").unwrap();
    assert!(r.passed(), "{}", r.to_json_line());
    for k in [-3, -2, 0, 1, 2] {
        let r = residue_change_check(&monomial(k), "x", &one_minus_exp(6), "y").unwrap();
        assert!(r.passed(), "k = {k}: {}", r.to_json_line());
    }
}

#[test]
fn heisenberg_field_is_the_weight_one_vertex_operator() {
    let h1 = FockVector::from_parts(&[1]);
    for v in basis(3) {
        for n in -3..=3 {
            assert_eq!(vertex_mode(&h1, n, &v), h_apply(n, &v));
            assert_eq!(x_mode(&h1, n, &v), h_apply(n, &v));
        }
    }
}

#[test]
fn omega_grades_by_weight() {
    for w in 0..=4u32 {
        for v in basis(w) {
            assert_eq!(vertex_mode(&FockVector::omega(), 1, &v), v.scaled(&Scalar::from_int(w as i64)));
        }
    }
}

#[test]
fn bracket_with_the_vacuum_starts_at_u() {
    let u = FockVector::from_parts(&[2, 1]);
    let s = y_bracket_apply(&u, &FockVector::vacuum(), 2).unwrap();
    assert_eq!(s.coeff(&[0]).unwrap(), u);
    let h1 = FockVector::from_parts(&[1]);
    let s = y_bracket_apply(&h1, &h1, 1).unwrap();
    assert_eq!(s.coeff(&[-2]).unwrap(), FockVector::vacuum());
}

#[test]
fn lowest_central_term_is_a_cube() {
    for m in 1..=4 {
        let ct = central_term(0, 0, m, 8).unwrap();
        assert_eq!(ct.lambda, Scalar::ratio(m * m * m, 12));
    }
}

#[test]
fn comm_passes_with_omega() {
    use fockzeta::voa::{theorem_check, TheoremId, TheoremParams};
    let mut p = TheoremParams::default_for(TheoremId::Comm);
    p.u1 = FockVector::omega();
    assert!(theorem_check(&p).passed());
    assert_eq!(central_term(0, 0, 2, 4).unwrap().lambda, Scalar::ratio(2, 3));
}
