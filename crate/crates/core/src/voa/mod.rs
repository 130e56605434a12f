//! The rank-one free-boson vertex operator algebra on the Fock space:
//! vertex operators `Y`, the operators `X(u, x) = Y(x^{L(0)} u, x)`, the
//! bracket operator `Y[u, y] = Y(e^{y L(0)} u, e^y - 1)`, the axioms and the Jacobi
//! identity.

mod theorems;

pub use theorems::*;

use std::collections::HashMap;

use serde::Serialize;
use serde_json::json;

use crate::fock::{basis_up_to, h_apply, h_basis, FockVector, Partition};
use crate::regularized::{quad_apply, QuadraticOpSpec};
use crate::report::{run_check, CheckReport, Comparator};
use crate::scalar::{binomial, Scalar};
use crate::series::{exp_series, mul, subst_em1, Coeff, Series, SeriesResult, VarWindow};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VoaConfig {
    pub rank: Scalar,
    pub vacuum: FockVector,
    pub omega: FockVector,
}

impl Default for VoaConfig {
    fn default() -> Self {
        VoaConfig { rank: Scalar::one(), vacuum: FockVector::vacuum(), omega: FockVector::omega() }
    }
}

/// The operator `u_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeIndex {
    pub u: FockVector,
    pub n: i64,
}

impl ModeIndex {
    pub fn new(u: FockVector, n: i64) -> Self {
        ModeIndex { u, n }
    }

    pub fn apply(&self, v: &FockVector) -> FockVector {
        vertex_mode(&self.u, self.n, v)
    }
}

/// `u_n v` for basis monomials, from the normal-ordered product of divided
/// derivatives of `h(x) = sum h(m) x^{-m-1}`, summing over all mode tuples.
#[cfg(test)]
fn vertex_basis(u: &Partition, n: i64, v: &Partition) -> FockVector {
    let parts = u.parts();
    if parts.is_empty() {
        return if n == -1 { FockVector::basis(v.clone()) } else { FockVector::zero() };
    }
    let wv = v.weight() as i64;
    let total = n + 1 - u.weight() as i64;
    let lo = (total - wv).min(-1);
    let mut out = FockVector::zero();
    let mut modes = vec![0i64; parts.len()];
    enumerate_modes(parts, 0, total, lo, wv, 0, &mut modes, &mut |ms| {
        let mut coef = Scalar::one();
        for (m, &k) in ms.iter().zip(parts) {
            coef *= &binomial(-m - 1, k - 1);
            if coef.is_zero() {
                return;
            }
        }
        let mut sorted = ms.to_vec();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let mut vec = FockVector::basis(v.clone());
        for m in sorted {
            vec = vec.map_basis(|p| h_basis(m, p));
            if vec.is_zero() {
                return;
            }
        }
        out.add_scaled(&vec, &coef);
    });
    out
}

/// Tuples of nonzero modes in `[lo, hi]` summing to `total` whose positive
/// part does not exceed `hi`.
#[cfg(test)]
#[allow(clippy::too_many_arguments)]
fn enumerate_modes(
    parts: &[u32],
    i: usize,
    remaining: i64,
    lo: i64,
    hi: i64,
    pos: i64,
    modes: &mut Vec<i64>,
    f: &mut impl FnMut(&[i64]),
) {
    if i + 1 == parts.len() {
        let m = remaining;
        if m != 0 && m >= lo && m <= hi && pos + m.max(0) <= hi {
            modes[i] = m;
            f(modes);
        }
        return;
    }
    for m in lo..=hi {
        if m == 0 || pos + m.max(0) > hi {
            continue;
        }
        modes[i] = m;
        enumerate_modes(parts, i + 1, remaining - m, lo, hi, pos + m.max(0), modes, f);
    }
}

/// Memoized vertex operator modes on basis monomials.
#[derive(Debug, Default)]
pub struct VertexCache {
    map: HashMap<(Partition, i64, Partition), FockVector>,
}

impl VertexCache {
    pub fn new() -> Self {
        VertexCache::default()
    }

    /// `u_n v`.
    pub fn mode(&mut self, u: &FockVector, n: i64, v: &FockVector) -> FockVector {
        let mut out = FockVector::zero();
        for (pu, cu) in u.terms() {
            for (pv, cv) in v.terms() {
                let key = (pu.clone(), n, pv.clone());
                self.ensure(pu, n, pv);
                out.add_scaled(&self.map[&key], &(cu * cv));
            }
        }
        out
    }

    fn ensure(&mut self, u: &Partition, n: i64, v: &Partition) {
        if !self.map.contains_key(&(u.clone(), n, v.clone())) {
            let img = self.basis_mode(u, n, v);
            self.map.insert((u.clone(), n, v.clone()), img);
        }
    }

    /// `u_n v` on basis monomials, peeling off the largest part of `u`:
    /// `Y(h(-r-1) w, x)` is the normal-ordered product of the `r`-th divided
    /// derivative of `h(x)` with `Y(w, x)`.
    fn basis_mode(&mut self, u: &Partition, n: i64, v: &Partition) -> FockVector {
        let parts = u.parts();
        if parts.is_empty() {
            return if n == -1 { FockVector::basis(v.clone()) } else { FockVector::zero() };
        }
        let (wu, wv) = (u.weight() as i64, v.weight() as i64);
        let mut out = FockVector::zero();
        if n > wu + wv - 1 {
            return out;
        }
        let r = parts[0] - 1;
        let rest = Partition::new(parts[1..].to_vec()).expect("parts are positive");
        let wrest = rest.weight() as i64;
        for m in 1..=wv {
            let c = binomial(-m - 1, r);
            let hv = h_basis(m, v);
            if c.is_zero() || hv.is_zero() {
                continue;
            }
            let img = self.mode(&FockVector::basis(rest.clone()), n - m - r as i64 - 1, &hv);
            out.add_scaled(&img, &c);
        }
        for m in (n - r as i64 - wrest - wv).min(0)..0 {
            let c = binomial(-m - 1, r);
            if c.is_zero() {
                continue;
            }
            let j = n - m - r as i64 - 1;
            self.ensure(&rest, j, v);
            let inner = &self.map[&(rest.clone(), j, v.clone())];
            if inner.is_zero() {
                continue;
            }
            out.add_scaled(&h_apply(m, inner), &c);
        }
        out
    }

    /// Coefficient of `x^{-n}` in `X(u, x) v`.
    pub fn x_mode(&mut self, u: &FockVector, n: i64, v: &FockVector) -> FockVector {
        let mut out = FockVector::zero();
        for (w, uw) in u.weight_components() {
            out.add_assign_ref(&self.mode(&uw, n - 1 + w as i64, v));
        }
        out
    }

    /// `Y(u, x) v` as a series in `x`, through `x^order`.
    pub fn y_series(
        &mut self,
        u: &FockVector,
        v: &FockVector,
        x: &str,
        order: i64,
    ) -> SeriesResult<Series<FockVector>> {
        let low = (-(u.max_weight() as i64 + v.max_weight() as i64)).min(order);
        let mut s = Series::zero(vec![VarWindow::laurent(x, low, order)])?;
        for e in low..=order {
            let c = self.mode(u, -e - 1, v);
            s.accumulate(vec![e], &c)?;
        }
        Ok(s)
    }

    /// The bracket operator `Y[u, y] v` as a Laurent series in `y` through `y^order`.
    pub fn y_bracket(
        &mut self,
        u: &FockVector,
        v: &FockVector,
        y: &str,
        order: i64,
    ) -> SeriesResult<Series<FockVector>> {
        let mut total: Series<FockVector> = Series::zero(vec![VarWindow::laurent(y, 0, order.max(0))])?;
        let comps = u.weight_components();
        if comps.is_empty() || v.is_zero() {
            return Ok(total);
        }
        for (w, uw) in comps {
            let h = self.y_series(&uw, v, "x", order)?;
            let s = subst_em1(&h, "x", y, order)?;
            let span = order - s.window(y)?.low;
            let s = mul(&exp_series(y, &Scalar::from_int(w as i64), span), &s)?;
            total = total.add(&s)?;
        }
        Ok(total)
    }

    /// Apply `f` to every coefficient of `s` and attach the resulting
    /// `y`-series, giving a series in the variables of `s` and `y`.
    pub fn bracket_series(
        &mut self,
        s: &Series<FockVector>,
        y: &str,
        order: i64,
        mut f: impl FnMut(&mut Self, &FockVector) -> SeriesResult<Series<FockVector>>,
    ) -> SeriesResult<Series<FockVector>> {
        let mut pieces = Vec::new();
        let mut low = 0i64;
        for (e, c) in s.terms() {
            let b = f(self, c)?;
            low = low.min(b.window(y)?.low);
            pieces.push((e.clone(), b));
        }
        let mut vars = s.vars().to_vec();
        vars.push(VarWindow::laurent(y, low, order));
        let mut out = Series::zero(vars)?;
        for (e, b) in pieces {
            for (ye, c) in b.terms() {
                let mut full = e.clone();
                full.push(ye[0]);
                out.accumulate(full, c)?;
            }
        }
        Ok(out)
    }
}

pub fn vertex_mode(u: &FockVector, n: i64, v: &FockVector) -> FockVector {
    VertexCache::new().mode(u, n, v)
}

pub fn x_mode(u: &FockVector, n: i64, v: &FockVector) -> FockVector {
    VertexCache::new().x_mode(u, n, v)
}

pub fn y_bracket_apply(u: &FockVector, v: &FockVector, order: i64) -> SeriesResult<Series<FockVector>> {
    VertexCache::new().y_bracket(u, v, "y", order)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axiom {
    #[serde(rename = "lower-truncation")]
    LowerTruncation,
    #[serde(rename = "vacuum")]
    Vacuum,
    #[serde(rename = "creation")]
    Creation,
    #[serde(rename = "L(-1)-derivative")]
    Derivative,
    #[serde(rename = "L(0)-grading")]
    Grading,
}

impl Axiom {
    pub const ALL: [Axiom; 5] =
        [Axiom::LowerTruncation, Axiom::Vacuum, Axiom::Creation, Axiom::Derivative, Axiom::Grading];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::LowerTruncation => "lower-truncation",
            Axiom::Vacuum => "vacuum",
            Axiom::Creation => "creation",
            Axiom::Derivative => "L(-1)-derivative",
            Axiom::Grading => "L(0)-grading",
        }
    }
}

fn check_axiom(cmp: &mut Comparator, cache: &mut VertexCache, axiom: Axiom, samples: &[FockVector], window: i64) {
    let zero = FockVector::zero();
    let vac = FockVector::vacuum();
    match axiom {
        Axiom::LowerTruncation => {
            for u in samples {
                for v in samples {
                    let top = u.max_weight() as i64 + v.max_weight() as i64;
                    for n in top..=top + window {
                        cmp.compare_vectors(&[n], v, &cache.mode(u, n, v), &zero);
                    }
                }
            }
        }
        Axiom::Vacuum => {
            for v in samples {
                for n in -window..=window {
                    let expected = if n == -1 { v.clone() } else { zero.clone() };
                    cmp.compare_vectors(&[n], v, &cache.mode(&vac, n, v), &expected);
                }
            }
        }
        Axiom::Creation => {
            for u in samples {
                for n in -1..=window {
                    let expected = if n == -1 { u.clone() } else { zero.clone() };
                    cmp.compare_vectors(&[n], &vac, &cache.mode(u, n, &vac), &expected);
                }
            }
        }
        Axiom::Derivative => {
            for u in samples {
                let du = quad_apply(QuadraticOpSpec::virasoro(-1), u);
                for v in samples {
                    for n in -window..=window {
                        let lhs = cache.mode(u, n - 1, v).scaled(&Scalar::from_int(-n));
                        cmp.compare_vectors(&[n], v, &lhs, &cache.mode(&du, n, v));
                    }
                }
            }
        }
        Axiom::Grading => {
            let omega = FockVector::omega();
            for v in samples {
                let wt = Scalar::from_int(v.max_weight() as i64);
                cmp.compare_vectors(&[0], v, &quad_apply(QuadraticOpSpec::virasoro(0), v), &v.scaled(&wt));
                for n in -window..=window {
                    let lhs = cache.mode(&omega, n + 1, v);
                    cmp.compare_vectors(&[n], v, &lhs, &quad_apply(QuadraticOpSpec::virasoro(n), v));
                }
            }
        }
    }
}

/// Verify one axiom on homogeneous samples with mode window `window`.
pub fn axiom_check(axiom: Axiom, samples: &[FockVector], window: i64) -> CheckReport {
    let params = json!({ "axiom": axiom, "samples": samples, "window": window });
    run_check("AXIOM", params, |cmp| {
        let mut cache = VertexCache::new();
        check_axiom(cmp, &mut cache, axiom, samples, window);
        Ok(())
    })
}

/// All five axioms on the basis of weight `<= w`.
pub fn axioms_check(w: u32, window: i64) -> CheckReport {
    let samples: Vec<FockVector> = basis_up_to(w).into_iter().map(FockVector::basis).collect();
    let params = json!({ "weight-cap": w, "window": window });
    run_check("AXIOMS", params, |cmp| {
        let mut cache = VertexCache::new();
        let mut per = serde_json::Map::new();
        for axiom in Axiom::ALL {
            let before = cmp.mismatch_count();
            check_axiom(cmp, &mut cache, axiom, &samples, window);
            let status = if cmp.mismatch_count() == before { "pass" } else { "fail" };
            per.insert(axiom.name().to_string(), json!(status));
        }
        cmp.set_detail("axioms", serde_json::Value::Object(per));
        Ok(())
    })
}

/// Coefficient of `x0^a x1^b x2^c` in the three terms of the Jacobi identity
/// applied to `t`; returns `(lhs, rhs)`.
pub(crate) fn jacobi_coefficient(
    cache: &mut VertexCache,
    u: &FockVector,
    v: &FockVector,
    t: &FockVector,
    (a, b, c): (i64, i64, i64),
) -> (FockVector, FockVector) {
    let (wu, wv, wt) = (u.max_weight() as i64, v.max_weight() as i64, t.max_weight() as i64);
    let n = -a - 1;
    let sign = |k: i64| if k.rem_euclid(2) == 0 { Scalar::one() } else { Scalar::from_int(-1) };
    // x0^{-1} delta((x1 - x2)/x0) Y(u, x1) Y(v, x2)
    let mut first = FockVector::zero();
    for k in 0..=(c + wv + wt).max(-1) {
        let coef = binomial(n, k as u32) * sign(k);
        let (p, q) = (n - k - b - 1, k - c - 1);
        let inner = cache.mode(v, q, t);
        first.add_scaled(&cache.mode(u, p, &inner), &coef);
    }
    // x0^{-1} delta((x2 - x1)/(-x0)) Y(v, x2) Y(u, x1)
    let mut second = FockVector::zero();
    for k in 0..=(b + wu + wt).max(-1) {
        let coef = binomial(n, k as u32) * sign(k) * sign(n);
        let (p, q) = (k - b - 1, n - k - c - 1);
        let inner = cache.mode(u, p, t);
        second.add_scaled(&cache.mode(v, q, &inner), &coef);
    }
    // x2^{-1} delta((x1 - x0)/x2) Y(Y(u, x0) v, x2)
    let mut rhs = FockVector::zero();
    for k in 0..=(a + wu + wv).max(-1) {
        let nn = b + k;
        let coef = binomial(nn, k as u32) * sign(k);
        let r = k - a - 1;
        let s = -nn - c - 2;
        let z = cache.mode(u, r, v);
        rhs.add_scaled(&cache.mode(&z, s, t), &coef);
    }
    (first.sub(&second), rhs)
}

/// The Jacobi identity applied to `target`, on `|a|, |b|, |c| <= window`.
pub fn jacobi_check(u: &FockVector, v: &FockVector, target: &FockVector, window: i64) -> CheckReport {
    let params = json!({ "u": u, "v": v, "target": target, "window": window });
    run_check("JACOBI", params, |cmp| {
        let mut cache = VertexCache::new();
        jacobi_into(cmp, &mut cache, u, v, target, window);
        Ok(())
    })
}

pub(crate) fn jacobi_into(
    cmp: &mut Comparator,
    cache: &mut VertexCache,
    u: &FockVector,
    v: &FockVector,
    target: &FockVector,
    window: i64,
) {
    for a in -window..=window {
        for b in -window..=window {
            for c in -window..=window {
                let (lhs, rhs) = jacobi_coefficient(cache, u, v, target, (a, b, c));
                cmp.compare_vectors(&[a, b, c], target, &lhs, &rhs);
            }
        }
    }
}

/// The vectors `h(-1) 1`, `omega`, `h(-1)^2 1`, `h(-2) 1`.
pub fn standard_vectors() -> Vec<FockVector> {
    vec![
        FockVector::from_parts(&[1]),
        FockVector::omega(),
        FockVector::from_parts(&[1, 1]),
        FockVector::from_parts(&[2]),
    ]
}

/// Jacobi identity for all pairs from `vectors` on every basis target of
/// weight `<= w`.
pub fn jacobi_suite_check(vectors: &[FockVector], w: u32, window: i64) -> CheckReport {
    let params = json!({ "vectors": vectors, "weight-cap": w, "window": window });
    run_check("JACOBI", params, |cmp| {
        let mut cache = VertexCache::new();
        for u in vectors {
            for v in vectors {
                for p in basis_up_to(w) {
                    jacobi_into(cmp, &mut cache, u, v, &FockVector::basis(p), window);
                }
            }
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recursive_modes_match_tuple_sum() {
        let mut cache = VertexCache::new();
        let basis: Vec<Partition> = basis_up_to(4);
        for u in basis.iter().filter(|p| p.weight() <= 3) {
            for v in &basis {
                for n in -5..=6 {
                    let fast = cache.mode(&FockVector::basis(u.clone()), n, &FockVector::basis(v.clone()));
                    assert_eq!(fast, vertex_basis(u, n, v), "{u:?}_{n} {v:?}");
                }
            }
        }
    }

    #[test]
    fn h_field_modes() {
        let u = FockVector::from_parts(&[1]);
        let v = FockVector::from_parts(&[2, 1]);
        for n in -3..=3 {
            assert_eq!(vertex_mode(&u, n, &v), h_apply(n, &v));
            assert_eq!(x_mode(&u, n, &v), h_apply(n, &v));
        }
    }

    #[test]
    fn omega_and_vacuum() {
        let one = FockVector::vacuum();
        assert_eq!(vertex_mode(&FockVector::omega(), 1, &one), FockVector::zero());
        let h1 = FockVector::from_parts(&[1]);
        assert_eq!(vertex_mode(&FockVector::omega(), 1, &h1), h1);
        assert_eq!(vertex_mode(&one, -1, &h1), h1);
        assert!(vertex_mode(&one, 0, &h1).is_zero());
        assert_eq!(x_mode(&one, 0, &h1), h1);
        assert_eq!(x_mode(&FockVector::omega(), 0, &h1), h1);
    }

    #[test]
    fn bracket_operator_basics() {
        let h1 = FockVector::from_parts(&[1]);
        let one = FockVector::vacuum();
        let s = y_bracket_apply(&h1, &one, 3).unwrap();
        assert_eq!(s.coeff(&[0]).unwrap(), h1);
        let s = y_bracket_apply(&h1, &h1, 2).unwrap();
        assert_eq!(s.coeff(&[-2]).unwrap(), one);
        let s = y_bracket_apply(&one, &h1, 3).unwrap();
        assert_eq!(s.coeff(&[0]).unwrap(), h1);
        assert!(s.coeff(&[2]).unwrap().is_zero());
    }

    #[test]
    fn axioms_low_weight() {
        let r = axioms_check(2, 3);
        assert!(r.passed(), "{:?}", r.mismatches.first());
    }

    #[test]
    fn jacobi_examples() {
        let h1 = FockVector::from_parts(&[1]);
        assert!(jacobi_check(&h1, &h1, &FockVector::vacuum(), 3).passed());
        let r = jacobi_check(&FockVector::omega(), &h1, &FockVector::from_parts(&[2]), 3);
        assert!(r.passed(), "{:?}", r.mismatches.first());
        assert!(jacobi_check(&FockVector::vacuum(), &h1, &h1, 2).passed());
    }
}
