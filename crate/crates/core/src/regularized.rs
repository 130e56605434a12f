//! Normal-ordered quadratic operators `L^(r)(n)`, Bernoulli numbers and zeta
//! values, the regularized operators, and the bracket checks built on them.

use std::collections::HashMap;
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use crate::fock::{basis_up_to, h_basis, FockVector, Partition};
use crate::report::{run_check, CheckReport, Comparator};
use crate::scalar::{binomial, factorial, Scalar};
use crate::series::{invert_power_series, reg_inv_one_minus_exp, Coeff, SeriesError};

/// `B_0..=B_K`, from the exact inverse of `(e^x - 1)/x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BernoulliTable {
    values: Vec<Scalar>,
}

impl BernoulliTable {
    pub fn new(k_max: usize) -> Self {
        let unit: Vec<Scalar> = (0..=k_max).map(|k| factorial(k as u32 + 1).recip()).collect();
        let inv = invert_power_series(&unit);
        let values = inv.iter().enumerate().map(|(k, c)| c * &factorial(k as u32)).collect();
        BernoulliTable { values }
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn get(&self, k: usize) -> Option<&Scalar> {
        self.values.get(k)
    }

    pub fn max_index(&self) -> usize {
        self.values.len() - 1
    }

    /// `(sum_k B_k x^k / k!) * (e^x - 1)/x == 1` through `x^order`.
    pub fn satisfies_generating_identity(&self, order: usize) -> bool {
        let order = order.min(self.max_index());
        (0..=order).all(|n| {
            let s: Scalar =
                (0..=n).map(|k| &self.values[k] / &factorial(k as u32) * factorial((n - k) as u32 + 1).recip()).sum();
            if n == 0 {
                s.is_one()
            } else {
                s.is_zero()
            }
        })
    }
}

pub fn bernoulli(k: usize) -> Scalar {
    BernoulliTable::new(k).values[k].clone()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ZetaError {
    #[error("zeta_neg({0}) is undefined here; k must be at least 2")]
    Excluded(u32),
}

/// `zeta(1 - k) = -B_k / k` for `k >= 2`.
pub fn zeta_neg(k: u32) -> Result<Scalar, ZetaError> {
    if k < 2 {
        return Err(ZetaError::Excluded(k));
    }
    Ok(-(bernoulli(k as usize) / Scalar::from_int(k as i64)))
}

/// `(-1)^r (1/2) zeta(-2r - 1)`, the constant added to `L^(r)(0)`.
pub fn regularization_constant(r: u32) -> Scalar {
    let z = zeta_neg(2 * r + 2).expect("argument is at least 2");
    let sign = if r.is_multiple_of(2) { Scalar::one() } else { Scalar::from_int(-1) };
    sign * Scalar::ratio(1, 2) * z
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct QuadraticOpSpec {
    pub r_left: u32,
    pub r_right: u32,
    pub n: i64,
    pub regularized: bool,
}

impl QuadraticOpSpec {
    pub fn new(r: u32, n: i64, regularized: bool) -> Self {
        QuadraticOpSpec { r_left: r, r_right: r, n, regularized }
    }

    pub fn virasoro(n: i64) -> Self {
        QuadraticOpSpec::new(0, n, false)
    }
}

/// `(1/2) sum_j j^a (n-j)^b :h(j) h(n-j):` on a basis monomial.
fn quad_on_basis(a: u32, b: u32, n: i64, p: &Partition) -> FockVector {
    let w = p.weight() as i64;
    let bound = w + n.abs();
    let mut out = FockVector::zero();
    for j in -bound..=bound {
        let k = n - j;
        if j == 0 || k == 0 {
            continue;
        }
        let (hi, lo) = if j >= k { (j, k) } else { (k, j) };
        if hi > w {
            continue;
        }
        let coef = Scalar::from_int(j).pow(a as i32) * Scalar::from_int(k).pow(b as i32) * Scalar::ratio(1, 2);
        if coef.is_zero() {
            continue;
        }
        let first = h_basis(hi, p);
        if first.is_zero() {
            continue;
        }
        let second = first.map_basis(|q| h_basis(lo, q));
        out.add_scaled(&second, &coef);
    }
    out
}

/// Apply a quadratic operator to `v`.
pub fn quad_apply(spec: QuadraticOpSpec, v: &FockVector) -> FockVector {
    let mut out = v.map_basis(|p| quad_on_basis(spec.r_left, spec.r_right, spec.n, p));
    if spec.regularized && spec.n == 0 && spec.r_left == spec.r_right {
        out.add_scaled(v, &regularization_constant(spec.r_left));
    }
    out
}

/// Memoized unregularized `L^(a,b)(n)` on basis monomials.
#[derive(Debug, Default)]
pub struct QuadCache {
    map: HashMap<(u32, u32, i64, Partition), FockVector>,
}

impl QuadCache {
    pub fn new() -> Self {
        QuadCache::default()
    }

    pub fn apply(&mut self, a: u32, b: u32, n: i64, v: &FockVector) -> FockVector {
        let mut out = FockVector::zero();
        for (p, c) in v.terms() {
            let key = (a, b, n, p.clone());
            let img = self.map.entry(key).or_insert_with(|| quad_on_basis(a, b, n, p));
            out.add_scaled(img, c);
        }
        out
    }

    /// `L^(r)(n)` with the regularization constant when requested.
    pub fn apply_spec(&mut self, spec: QuadraticOpSpec, v: &FockVector) -> FockVector {
        let mut out = self.apply(spec.r_left, spec.r_right, spec.n, v);
        if spec.regularized && spec.n == 0 && spec.r_left == spec.r_right {
            out.add_scaled(v, &regularization_constant(spec.r_left));
        }
        out
    }
}

fn bracket_check(id: &str, m: i64, n: i64, w: u32, regularized: bool) -> CheckReport {
    let central = if regularized {
        Scalar::from_int(m * m * m) * Scalar::ratio(1, 12)
    } else {
        Scalar::from_int(m * m * m - m) * Scalar::ratio(1, 12)
    };
    let params = json!({ "m": m, "n": n, "weight-cap": w });
    run_check(id, params, |cmp| {
        let mut cache = QuadCache::new();
        let spec = |k: i64| QuadraticOpSpec::new(0, k, regularized);
        for p in basis_up_to(w) {
            let b = FockVector::basis(p.clone());
            let nb = cache.apply_spec(spec(n), &b);
            let mb = cache.apply_spec(spec(m), &b);
            let lmn = cache.apply_spec(spec(m), &nb);
            let lnm = cache.apply_spec(spec(n), &mb);
            let lhs = lmn.sub(&lnm);
            let mut rhs = cache.apply_spec(spec(m + n), &b).scaled(&Scalar::from_int(m - n));
            if m + n == 0 {
                rhs.add_scaled(&b, &central);
            }
            cmp.compare_vectors(&[m, n], &b, &lhs, &rhs);
        }
        let c = if m + n == 0 { central.clone() } else { Scalar::zero() };
        cmp.set_detail("central-term", json!(c.to_string()));
        Ok(())
    })
}

/// `[L(m), L(n)] = (m-n) L(m+n) + (m^3 - m)/12 delta_{m+n,0}` on weight `<= w`.
pub fn virasoro_check(m: i64, n: i64, w: u32) -> CheckReport {
    bracket_check("VIRASORO", m, n, w, false)
}

/// The regularized brackets with central term `m^3/12`.
pub fn modified_virasoro_check(m: i64, n: i64, w: u32) -> CheckReport {
    bracket_check("MODVIR", m, n, w, true)
}

/// Solve a square linear system exactly; `None` if singular.
pub(crate) fn solve_linear(mut a: Vec<Vec<Scalar>>, mut b: Vec<Scalar>) -> Option<Vec<Scalar>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].recip();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] * &inv;
            let pivot_row = a[col].clone();
            for (dst, src) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                *dst -= &(src * &f);
            }
            let v = &b[col] * &f;
            b[r] -= &v;
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Result of splitting `[Lbar^(r)(m), Lbar^(s)(-m)]` into an operator part
/// `sum_k a_k Lbar^(k)(0)` and a scalar.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralTerm {
    pub r: u32,
    pub s: u32,
    pub m: i64,
    pub lambda: Scalar,
    /// Scalar term for the unregularized operators.
    pub lambda_unregularized: Scalar,
    /// Coefficients `a_k` of `L^(k)(0)` in the operator part.
    pub operator_coeffs: Vec<Scalar>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CentralTermError {
    #[error("mode m must be nonzero")]
    ZeroMode,
    #[error("weight cap {0} too small to identify the operator part (need at least {1})")]
    WeightTooSmall(u32, u32),
    #[error("commutator is not an operator part plus a scalar on weight <= {0}")]
    Inconsistent(u32),
}

pub fn default_central_weight(r: u32, s: u32) -> u32 {
    2 * r + 2 * s + 4
}

/// The scalar `lambda` in `[Lbar^(r)(m), Lbar^(s)(-m)] = sum_k a_k Lbar^(k)(0) + lambda`.
///
/// The operator part is fitted from the action on `h(-p) 1` and then
/// required to reproduce the commutator on every basis vector of weight `<= w`.
pub fn central_term(r: u32, s: u32, m: i64, w: u32) -> Result<CentralTerm, CentralTermError> {
    if m == 0 {
        return Err(CentralTermError::ZeroMode);
    }
    let kmax = (r + s + 1) as usize;
    let need = kmax as u32 + 1;
    if w < need {
        return Err(CentralTermError::WeightTooSmall(w, need));
    }
    let mut cache = QuadCache::new();
    let mut comm = |v: &FockVector| {
        let sv = cache.apply(s, s, -m, v);
        let rv = cache.apply(r, r, m, v);
        let a = cache.apply(r, r, m, &sv);
        let b = cache.apply(s, s, -m, &rv);
        a.sub(&b)
    };
    let vac = FockVector::vacuum();
    let lambda0 = comm(&vac).coeff(&Partition::vacuum());
    // e_p = sum_k a_k (-1)^k p^(2k+1)
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for p in 1..=(kmax as i64 + 1) {
        let v = FockVector::from_parts(&[p as u32]);
        let e = comm(&v).coeff(&Partition::new(vec![p as u32]).expect("positive")) - &lambda0;
        rhs.push(e);
        rows.push(
            (0..=kmax)
                .map(|k| {
                    let sign = if k % 2 == 0 { 1 } else { -1 };
                    Scalar::from_int(sign) * Scalar::from_int(p).pow(2 * k as i32 + 1)
                })
                .collect(),
        );
    }
    let coeffs = solve_linear(rows, rhs).ok_or(CentralTermError::Inconsistent(w))?;
    let mut opcache = QuadCache::new();
    for p in basis_up_to(w) {
        let v = FockVector::basis(p);
        let mut residual = comm(&v);
        residual.add_scaled(&v, &-&lambda0);
        for (k, a) in coeffs.iter().enumerate() {
            if !a.is_zero() {
                residual.add_scaled(&opcache.apply(k as u32, k as u32, 0, &v), &-a);
            }
        }
        if !residual.is_zero() {
            return Err(CentralTermError::Inconsistent(w));
        }
    }
    let mut lambda = lambda0.clone();
    for (k, a) in coeffs.iter().enumerate() {
        lambda -= &(a * &regularization_constant(k as u32));
    }
    Ok(CentralTerm { r, s, m, lambda, lambda_unregularized: lambda0, operator_coeffs: coeffs })
}

/// `lambda(m) / m^(2r+2s+3)` is the same for every `m` in `modes`.
pub fn pure_monomial_check(r: u32, s: u32, modes: &[i64], w: Option<u32>) -> CheckReport {
    let w = w.unwrap_or_else(|| default_central_weight(r, s));
    let params = json!({ "r": r, "s": s, "modes": modes, "weight-cap": w });
    let started = Instant::now();
    let mut cmp = Comparator::new();
    let mut ratios = Vec::new();
    let mut lambdas = Vec::new();
    for &m in modes {
        match central_term(r, s, m, w) {
            Ok(ct) => {
                let ratio = &ct.lambda / &Scalar::from_int(m).pow((2 * r + 2 * s + 3) as i32);
                lambdas.push(json!({ "m": m, "lambda": ct.lambda.to_string() }));
                ratios.push((m, ratio));
            }
            Err(e) => cmp.fail_with(e.to_string()),
        }
    }
    if let Some((_, first)) = ratios.first().cloned() {
        for (m, q) in &ratios {
            cmp.compare_scalars(&[*m], q, &first);
        }
        cmp.set_detail("constant", json!(first.to_string()));
    }
    cmp.set_detail("lambdas", json!(lambdas));
    cmp.into_report("BLOCH-MONOMIAL", params, started)
}

/// Scalar coefficient of `y1^a y2^b` in `-(1/2) d/dy1 (1 / (1 - e^{-y1+y2}))`.
pub fn regularized_scalar(a: u32, b: u32) -> Scalar {
    let order = (a.max(b) + 1) as i64;
    let s = reg_inv_one_minus_exp("y1", "y2", order).expect("valid order");
    let d = s.derivative("y1").expect("variable present").scale(&Scalar::ratio(-1, 2));
    d.coeff(&[a as i64, b as i64]).expect("inside window")
}

/// Coefficient of `y1^a y2^b x^{-n}` in the generating function
/// `(1/2) :h(e^{y1} x) h(e^{y2} x):`, or its regularized version, applied to `v`.
pub fn gen_quadratic_coeff(a: u32, b: u32, n: i64, regularized: bool, v: &FockVector) -> FockVector {
    let sign = if (a + b).is_multiple_of(2) { 1 } else { -1 };
    let c = Scalar::from_int(sign) / (factorial(a) * factorial(b));
    let mut out = quad_apply(QuadraticOpSpec { r_left: a, r_right: b, n, regularized: false }, v).scaled(&c);
    if regularized && n == 0 {
        out.add_scaled(v, &regularized_scalar(a, b));
    }
    out
}

/// `(r!)^2` times the regularized generating coefficient equals `Lbar^(r)(n)`.
pub fn extraction_consistency_check(r_max: u32, modes: &[i64], w: u32) -> CheckReport {
    let params = json!({ "r-max": r_max, "modes": modes, "weight-cap": w });
    run_check("EXTRACTION", params, |cmp| {
        for r in 0..=r_max {
            let f = factorial(r) * factorial(r);
            for &n in modes {
                for p in basis_up_to(w) {
                    let v = FockVector::basis(p);
                    let lhs = gen_quadratic_coeff(r, r, n, true, &v).scaled(&f);
                    let rhs = quad_apply(QuadraticOpSpec::new(r, n, true), &v);
                    cmp.compare_vectors(&[r as i64, n], &v, &lhs, &rhs);
                }
            }
        }
        Ok(())
    })
}

/// Bernoulli numbers by the recurrence `sum_{j<=k} C(k+1, j) B_j = 0`.
fn bernoulli_by_recurrence(k_max: usize) -> Vec<Scalar> {
    let mut b = vec![Scalar::one()];
    for k in 1..=k_max {
        let s: Scalar = (0..k).map(|j| binomial(k as i64 + 1, j as u32) * &b[j]).sum();
        b.push(-(s / Scalar::from_int(k as i64 + 1)));
    }
    b
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZetaRow {
    pub k: usize,
    pub bernoulli: Scalar,
    pub zeta: Option<Scalar>,
}

pub fn zeta_table(k_max: usize) -> Vec<ZetaRow> {
    let t = BernoulliTable::new(k_max);
    (0..=k_max).map(|k| ZetaRow { k, bernoulli: t.values[k].clone(), zeta: zeta_neg(k as u32).ok() }).collect()
}

/// Cross-checks the Bernoulli table against the classical recurrence, the
/// generating identity, `zeta(-1) = -1/12` and the regularization constants.
pub fn zeta_check(k_max: usize, r_max: u32) -> CheckReport {
    let params = json!({ "k-max": k_max, "r-max": r_max });
    run_check("ZETA-TABLE", params, |cmp| {
        let t = BernoulliTable::new(k_max.max(2 * r_max as usize + 2));
        let rec = bernoulli_by_recurrence(k_max);
        for (k, (b, r)) in t.values.iter().zip(&rec).enumerate() {
            cmp.compare_scalars(&[k as i64], b, r);
        }
        if !t.satisfies_generating_identity(k_max) {
            cmp.fail_with("generating identity fails");
        }
        let z = zeta_neg(2).map_err(|e| SeriesError::Precondition(e.to_string()))?;
        cmp.compare_scalars(&[-1], &z, &Scalar::ratio(-1, 12));
        for r in 0..=r_max {
            let v = quad_apply(QuadraticOpSpec::new(r, 0, true), &FockVector::vacuum());
            let expected = regularization_constant(r);
            let seen = v.coeff(&Partition::vacuum());
            cmp.compare_scalars(&[r as i64], &seen, &expected);
        }
        let rows: Vec<_> = zeta_table(k_max)
            .into_iter()
            .map(|r| {
                json!({
                    "k": r.k,
                    "B_k": r.bernoulli.to_string(),
                    "zeta(1-k)": r.zeta.map(|z| z.to_string()),
                })
            })
            .collect();
        cmp.set_detail("rows", json!(rows));
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Scalar {
        Scalar::ratio(p, d)
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), q(1, 1));
        assert_eq!(bernoulli(1), q(-1, 2));
        assert_eq!(bernoulli(2), q(1, 6));
        assert_eq!(bernoulli(3), q(0, 1));
        assert!(BernoulliTable::new(20).satisfies_generating_identity(20));
    }

    #[test]
    fn zeta_values() {
        assert_eq!(zeta_neg(2).unwrap(), q(-1, 12));
        assert_eq!(zeta_neg(4).unwrap(), q(1, 120));
        assert_eq!(zeta_neg(6).unwrap(), q(-1, 252));
        assert!(zeta_neg(1).is_err());
        assert_eq!(regularization_constant(0), q(-1, 24));
    }

    #[test]
    fn quadratic_examples() {
        let one = FockVector::vacuum();
        let h1 = FockVector::from_parts(&[1]);
        assert_eq!(quad_apply(QuadraticOpSpec::virasoro(0), &h1), h1);
        assert!(quad_apply(QuadraticOpSpec::virasoro(-1), &one).is_zero());
        assert_eq!(quad_apply(QuadraticOpSpec::new(0, 0, true), &one), one.scaled(&q(-1, 24)));
        // L(-2) 1 = omega
        assert_eq!(quad_apply(QuadraticOpSpec::virasoro(-2), &one), FockVector::omega());
    }

    #[test]
    fn small_brackets() {
        assert!(virasoro_check(2, -2, 6).passed());
        assert!(modified_virasoro_check(1, -1, 6).passed());
        assert!(modified_virasoro_check(0, 3, 4).passed());
    }

    #[test]
    fn central_terms() {
        assert_eq!(central_term(0, 0, 1, 4).unwrap().lambda, q(1, 12));
        assert_eq!(central_term(0, 0, 2, 4).unwrap().lambda, q(8, 12));
        assert!(matches!(central_term(0, 0, 0, 4), Err(CentralTermError::ZeroMode)));
    }

    #[test]
    fn regularized_scalar_terms() {
        assert_eq!(regularized_scalar(0, 0), q(-1, 24));
        // y1 y2 coefficient times (1!)^2 is the r = 1 constant
        assert_eq!(regularized_scalar(1, 1), regularization_constant(1));
    }

    #[test]
    fn linear_solver() {
        let a = vec![vec![q(2, 1), q(1, 1)], vec![q(1, 1), q(3, 1)]];
        let x = solve_linear(a, vec![q(3, 1), q(5, 1)]).unwrap();
        assert_eq!(x, vec![q(4, 5), q(7, 5)]);
    }
}
