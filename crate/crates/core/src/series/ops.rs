//! Formal-calculus operations on [`Series`]: exponential and logarithmic
//! series, dilations `e^{y x d/dx}`, Taylor shifts, binomial expansions,
//! delta series, Laurent substitutions and residues.

use std::collections::BTreeMap;

use super::{mul, union_names, Coeff, Series, SeriesError, SeriesResult, VarWindow};
use crate::report::{CheckReport, Comparator};
use crate::scalar::{binomial, factorial, Scalar};

/// `exp(c * var)` truncated at `order`.
pub fn exp_series(var: &str, c: &Scalar, order: i64) -> Series<Scalar> {
    let mut terms = Vec::new();
    let mut pow = Scalar::one();
    for k in 0..=order {
        terms.push((vec![k], &pow / &factorial(k as u32)));
        pow = &pow * c;
    }
    Series::from_terms(vec![VarWindow::power(var, order)], terms).expect("valid window")
}

/// Coefficients of a univariate series given as a dense vector from exponent 0.
fn univariate(var: &str, coeffs: &[Scalar]) -> Series<Scalar> {
    let order = coeffs.len() as i64 - 1;
    Series::from_terms(
        vec![VarWindow::power(var, order.max(0))],
        coeffs.iter().enumerate().map(|(k, c)| (vec![k as i64], c.clone())),
    )
    .expect("valid window")
}

/// Substitute `g` into the power series with coefficients `f(k)`:
/// `sum_k f(k) g^k`.
///
/// `g` must have no constant term. With `grading = Some(y)` the variable `y`
/// must be a power-series variable with `g = O(y)`, and the truncation is
/// governed by the `y` window; with `None` every variable must be a
/// power-series variable and total degree governs truncation.
pub fn compose_power(
    f: impl Fn(u32) -> Scalar,
    g: &Series<Scalar>,
    grading: Option<&str>,
) -> SeriesResult<Series<Scalar>> {
    let max_k = match grading {
        Some(y) => {
            let i = g.var_index(y)?;
            let w = &g.vars()[i];
            if !w.zero_below {
                return Err(SeriesError::Precondition(format!("{y} must be a power-series variable")));
            }
            if g.terms().any(|(e, _)| e[i] < 1) {
                return Err(SeriesError::Precondition(format!("substituted series must be O({y})")));
            }
            w.high
        }
        None => {
            for w in g.vars() {
                if !w.zero_below || w.low < 0 {
                    return Err(SeriesError::Precondition(format!("{} must be a power-series variable", w.name)));
                }
            }
            if g.terms().any(|(e, _)| e.iter().all(|&x| x == 0)) {
                return Err(SeriesError::Precondition("substituted series has a constant term".into()));
            }
            g.vars().iter().map(|w| w.high).sum()
        }
    };
    // g = O(y): raising the declared lower bound keeps power windows tight
    let mut g = g.clone();
    if let Some(y) = grading {
        let i = g.var_index(y)?;
        if g.vars[i].low < 1 && g.vars[i].high >= 1 {
            g.vars[i].low = 1;
        }
    }
    let g = &g;
    if max_k < 1 {
        // only the constant is known; nothing above it is
        let vars = g
            .vars()
            .iter()
            .map(|w| {
                if grading.is_none_or(|y| y == w.name) {
                    VarWindow::power(&w.name, w.high.max(0))
                } else {
                    VarWindow::open(&w.name, w.low.min(0), w.high.max(0))
                }
            })
            .collect();
        return Series::from_terms(vars, vec![(vec![0; g.vars().len()], f(0))]);
    }
    let one = Series::from_terms(
        g.vars().iter().map(|w| VarWindow::exact(&w.name, 0, 0)).collect(),
        vec![(vec![0; g.vars().len()], Scalar::one())],
    )?;
    let mut acc = one.scale(&f(0));
    let mut pow = one;
    for k in 1..=max_k {
        pow = mul(&pow, g)?;
        // zero coefficients still narrow the window
        acc = acc.add(&pow.scale(&f(k as u32)))?;
    }
    Ok(acc)
}

/// `exp(g)` for a series `g` without constant term.
pub fn exp_of(g: &Series<Scalar>, grading: Option<&str>) -> SeriesResult<Series<Scalar>> {
    compose_power(|k| factorial(k).recip(), g, grading)
}

/// `f(e^y x)`: the coefficient of `x^n` is multiplied by `exp(n y)`,
/// truncated at `y`-order `order`.
pub fn dilate<C: Coeff>(f: &Series<C>, x: &str, y: &str, order: i64) -> SeriesResult<Series<C>> {
    if f.var_index(y).is_ok() {
        return Err(SeriesError::DuplicateVariable(y.to_string()));
    }
    let lin = if order >= 1 { vec![(vec![1], Scalar::one())] } else { vec![] };
    let u = Series::from_terms(vec![VarWindow::power(y, order)], lin)?;
    dilate_by(f, x, &u)
}

/// `exp(u * x d/dx) f`: the coefficient of `x^n` is multiplied by `exp(n u)`
/// where `u` is a power series without constant term (e.g. `y1 - y3`, or
/// `log(1 - t)`).
pub fn dilate_by<C: Coeff>(f: &Series<C>, x: &str, u: &Series<Scalar>) -> SeriesResult<Series<C>> {
    let xi = f.var_index(x)?;
    if u.var_index(x).is_ok() {
        return Err(SeriesError::Precondition(format!("dilation series may not involve {x}")));
    }
    // group the stored terms of f by their x-exponent
    let mut slices: BTreeMap<i64, Vec<(Vec<i64>, C)>> = BTreeMap::new();
    for (e, c) in f.terms() {
        let mut rest = e.clone();
        let n = rest.remove(xi);
        slices.entry(n).or_default().push((rest, c.clone()));
    }
    let mut other_vars = f.vars().to_vec();
    let xw = other_vars.remove(xi);
    let probe: Series<C> = Series::zero(other_vars.clone())?;
    let exp0 = exp_of(&u.scale(&Scalar::zero()), None)?;
    let shape = mul(&exp0, &probe)?;
    let mut out_vars = vec![xw.clone()];
    out_vars.extend(shape.vars().iter().cloned());
    let mut out: Series<C> = Series::zero(out_vars)?;
    for (n, terms) in slices {
        let slice = Series::from_terms(other_vars.clone(), terms)?;
        let e = exp_of(&u.scale(&Scalar::from_int(n)), None)?;
        let prod = mul(&e, &slice)?;
        for (ex, c) in prod.terms() {
            let mut full = vec![n];
            full.extend(ex.iter().copied());
            out.accumulate(full, c)?;
        }
    }
    // restore f's variable order (x back in place), extra variables appended
    let mut names = f.var_names();
    for w in shape.vars() {
        if !names.contains(&w.name) {
            names.push(w.name.clone());
        }
    }
    out.align_to(&names)
}

/// `f(x + y) = exp(y d/dx) f(x)`, expanded in nonnegative powers of `y` up to
/// `order`.
pub fn taylor_shift<C: Coeff>(f: &Series<C>, x: &str, y: &str, order: i64) -> SeriesResult<Series<C>> {
    if f.var_index(y).is_ok() {
        return Err(SeriesError::DuplicateVariable(y.to_string()));
    }
    let xi = f.var_index(x)?;
    let mut vars = f.vars().to_vec();
    {
        let w = &mut vars[xi];
        if w.zero_below {
            w.low -= order;
        }
        if !w.zero_above {
            w.high -= order;
        }
        if w.low > w.high {
            return Err(SeriesError::WindowInsufficient(format!("Taylor shift of {x} by order {order}")));
        }
    }
    vars.push(VarWindow::power(y, order));
    let mut out: Series<C> = Series::zero(vars)?;
    for (e, c) in f.terms() {
        for k in 0..=order {
            let b = binomial(e[xi], k as u32);
            if b.is_zero() {
                continue;
            }
            let mut ne = e.clone();
            ne[xi] -= k;
            if !out.vars()[xi].stores(ne[xi]) {
                continue;
            }
            ne.push(k);
            out.accumulate(ne, &c.scaled(&b))?;
        }
    }
    Ok(out)
}

/// `(a - b)^n` expanded in nonnegative powers of the second variable `b`;
/// for `n < 0` the expansion is truncated at `b`-order `b_order`.
pub fn binom_expand(a: &str, b: &str, n: i64, b_order: i64) -> SeriesResult<Series<Scalar>> {
    if a == b {
        return Err(SeriesError::Precondition("binomial variables must differ".into()));
    }
    let (vars, kmax) = if n >= 0 {
        (vec![VarWindow::exact(a, 0, n), VarWindow::exact(b, 0, n)], n)
    } else {
        let mut aw = VarWindow::exact(a, n - b_order, n);
        aw.zero_below = false;
        (vec![aw, VarWindow::power(b, b_order)], b_order)
    };
    let terms = (0..=kmax).map(|k| {
        let sign = if k % 2 == 0 { Scalar::one() } else { Scalar::from_int(-1) };
        (vec![n - k, k], binomial(n, k as u32) * sign)
    });
    Series::from_terms(vars, terms)
}

/// `(sum_i c_i v_i)^n` for a linear form whose variable `lead` has
/// coefficient `+-1`, expanded in nonnegative powers of the remaining
/// variables (which are truncated at `order` each). For `n >= 0` this is a
/// polynomial.
pub fn linear_form_power(form: &[(&str, i64)], lead: &str, n: i64, order: i64) -> SeriesResult<Series<Scalar>> {
    let lead_c = form
        .iter()
        .find(|(v, _)| *v == lead)
        .map(|p| p.1)
        .ok_or_else(|| SeriesError::UnknownVariable(lead.to_string()))?;
    if lead_c.abs() != 1 {
        return Err(SeriesError::Precondition("leading coefficient must be +-1".into()));
    }
    let others: Vec<(&str, i64)> = form.iter().copied().filter(|(v, c)| *v != lead && *c != 0).collect();
    // rest = sum of the other terms, as a polynomial series
    let rest_vars: Vec<VarWindow> = others.iter().map(|(v, _)| VarWindow::power(v, order)).collect();
    let rest = Series::from_terms(
        rest_vars.clone(),
        others.iter().enumerate().map(|(i, (_, c))| {
            let mut e = vec![0; others.len()];
            e[i] = 1;
            (e, Scalar::from_int(*c))
        }),
    )?;
    // (c x + r)^n = sum_k C(n,k) (c x)^(n-k) r^k
    let kmax = if n >= 0 { n } else { order * others.len() as i64 };
    let mut lead_w = VarWindow::exact(lead, n - kmax, n);
    if n < 0 {
        lead_w.zero_below = false;
    }
    let mut vars = vec![lead_w];
    vars.extend(rest_vars.iter().cloned());
    let mut out: Series<Scalar> = Series::zero(vars)?;
    let mut rpow = Series::from_terms(rest_vars.clone(), vec![(vec![0; others.len()], Scalar::one())])?;
    let cl = Scalar::from_int(lead_c);
    for k in 0..=kmax {
        let coef = binomial(n, k as u32) * cl.pow((n - k) as i32);
        for (e, c) in rpow.terms() {
            if e.iter().any(|&x| x > order) {
                continue;
            }
            let mut full = vec![n - k];
            full.extend(e.iter().copied());
            out.accumulate(full, &(c * &coef))?;
        }
        if k < kmax {
            rpow = mul(&rpow, &rest)?;
        }
    }
    Ok(out)
}

/// `delta(x) = sum_{|n| <= N} x^n` on the open window `[-N, N]`.
pub fn delta_series(x: &str, n: i64) -> SeriesResult<Series<Scalar>> {
    if n < 0 {
        return Err(SeriesError::Precondition("delta window must be nonnegative".into()));
    }
    Series::from_terms(vec![VarWindow::open(x, -n, n)], (-n..=n).map(|k| (vec![k], Scalar::one())))
}

/// `log(1 - t) = -sum_{k=1}^{order} t^k / k`.
pub fn log1m(t: &str, order: i64) -> SeriesResult<Series<Scalar>> {
    if order < 1 {
        return Err(SeriesError::Precondition("log1m needs order >= 1".into()));
    }
    let mut coeffs = vec![Scalar::zero()];
    for k in 1..=order {
        coeffs.push(Scalar::ratio(-1, k));
    }
    Ok(univariate(t, &coeffs))
}

/// Substitute `x -> phi(y)` into a series with finitely many negative powers
/// of `x`. `phi` must be `alpha * y * (1 + O(y))` with `alpha` a single
/// nonzero monomial (possibly in other variables), so that negative powers
/// of `phi` are again Laurent series in `y`.
pub fn compose_laurent<C: Coeff>(h: &Series<C>, x: &str, phi: &Series<Scalar>, y: &str) -> SeriesResult<Series<C>> {
    let xi = h.var_index(x)?;
    let xw = h.vars()[xi].clone();
    if !xw.zero_below {
        return Err(SeriesError::Precondition(format!("{x} has infinitely many negative powers")));
    }
    if h.var_index(y).is_ok() {
        return Err(SeriesError::DuplicateVariable(y.to_string()));
    }
    let yi = phi.var_index(y)?;
    let yw = phi.vars()[yi].clone();
    if !yw.zero_below || phi.terms().any(|(e, _)| e[yi] < 1) {
        return Err(SeriesError::Precondition(format!("substituted series must be O({y})")));
    }
    let lin: Vec<(&Vec<i64>, &Scalar)> = phi.terms().filter(|(e, _)| e[yi] == 1).collect();
    if lin.len() != 1 {
        return Err(SeriesError::Precondition(format!("coefficient of {y}^1 must be a single invertible monomial")));
    }
    let (alpha_e, alpha_c) = (lin[0].0.clone(), lin[0].1.clone());
    // rho = phi / (alpha y) - 1
    let mut rho: Series<Scalar> = Series::zero(
        phi.vars()
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let mut w = w.clone();
                w.low -= alpha_e[i];
                w.high -= alpha_e[i];
                w
            })
            .collect(),
    )?;
    let inv_alpha = alpha_c.recip();
    for (e, c) in phi.terms() {
        if e == &alpha_e {
            continue;
        }
        let ne: Vec<i64> = e.iter().zip(&alpha_e).map(|(a, b)| a - b).collect();
        rho.accumulate(ne, &(c * &inv_alpha))?;
    }
    let alpha_names: Vec<String> = phi.var_names();
    let alpha_vars: Vec<&str> = alpha_names.iter().map(|s| s.as_str()).collect();

    let mut others = h.vars().to_vec();
    others.remove(xi);
    let mut slices: BTreeMap<i64, Vec<(Vec<i64>, C)>> = BTreeMap::new();
    for (e, c) in h.terms() {
        let mut rest = e.clone();
        let k = rest.remove(xi);
        slices.entry(k).or_default().push((rest, c.clone()));
    }
    let kmax = xw.high;
    let mut acc: Option<Series<C>> = None;
    for k in xw.low..=kmax {
        let slice = Series::from_terms(others.clone(), slices.remove(&k).unwrap_or_default())?;
        // phi^k = alpha^k y^k (1 + rho)^k
        let unit = compose_power(|j| binomial(k, j), &rho, Some(y))?;
        let alpha_k: Vec<i64> = alpha_e.iter().enumerate().map(|(i, &a)| if i == yi { k } else { a * k }).collect();
        let mono = Series::monomial(&alpha_vars, &alpha_k, alpha_c.pow(k as i32));
        let phik = mul(&mono, &unit)?;
        let term = mul(&phik, &slice)?;
        acc = Some(match acc {
            None => term,
            Some(a) => a.add_aligned(&term)?,
        });
    }
    let mut out = acc.ok_or_else(|| SeriesError::WindowInsufficient(format!("empty window for {x}")))?;
    if !xw.zero_above {
        // unknown coefficients of x^k, k > high, contribute from y^k on
        let w = out.window(y)?.clone();
        out = out.truncate(y, w.low.min(xw.high), xw.high)?;
    }
    Ok(out)
}

/// `h(e^y - 1)` for `h` with finitely many negative powers of `x`, truncated
/// at `y`-order `order`.
pub fn subst_em1<C: Coeff>(h: &Series<C>, x: &str, y: &str, order: i64) -> SeriesResult<Series<C>> {
    let low = h.window(x)?.low.min(0);
    // (e^y - 1)^low = y^low (1 + ...) needs the unit series to order - low
    let phi_order = order - low + 1;
    let mut coeffs = vec![Scalar::zero()];
    for k in 1..=phi_order {
        coeffs.push(factorial(k as u32).recip());
    }
    let phi = univariate(y, &coeffs);
    let out = compose_laurent(h, x, &phi, y)?;
    let w = out.window(y)?.clone();
    if w.high > order {
        return out.truncate(y, w.low, order);
    }
    Ok(out)
}

/// Identify `b` with `a`: the coefficient of `a^m` collects every `a^i b^j`
/// with `i + j = m`. Refused when that sum could be infinite.
pub fn identify<C: Coeff>(f: &Series<C>, a: &str, b: &str) -> SeriesResult<Series<C>> {
    if a == b {
        return Err(SeriesError::Precondition("cannot identify a variable with itself".into()));
    }
    let ai = f.var_index(a)?;
    let bi = f.var_index(b)?;
    let merged = f.vars[ai].product(&f.vars[bi])?;
    let mut vars = f.vars.clone();
    vars[ai] = merged;
    vars.remove(bi);
    let target = if bi < ai { ai - 1 } else { ai };
    let mut out: Series<C> = Series { vars, terms: BTreeMap::new() };
    for (e, c) in &f.terms {
        let mut ne = e.clone();
        ne[ai] += e[bi];
        ne.remove(bi);
        if out.vars[target].stores(ne[target]) {
            out.accumulate_unchecked(ne, c);
        }
    }
    Ok(out)
}

/// Formal residue: the coefficient of `x^{-1}` as a series in the remaining
/// variables.
pub fn residue<C: Coeff>(f: &Series<C>, x: &str) -> SeriesResult<Series<C>> {
    f.coeff_in(x, -1)
}

/// Checks `Res_x h(x) = Res_y h(F(y)) F'(y)` for a scalar Laurent series `h`
/// with finitely many negative powers and `F = alpha y + O(y^2)`.
pub fn residue_change_check(h: &Series<Scalar>, x: &str, f: &Series<Scalar>, y: &str) -> SeriesResult<CheckReport> {
    let started = std::time::Instant::now();
    let lhs = residue(h, x)?;
    let composed = compose_laurent(h, x, f, y)?;
    let fprime = f.derivative(y)?;
    let rhs = residue(&mul(&fprime, &composed)?, y)?;
    let names = union_names(&lhs.var_names(), &rhs.var_names());
    let lhs = lhs.align_to(&names)?;
    let rhs = rhs.align_to(&names)?;
    let mut cmp = Comparator::new();
    compare_scalar_series(&mut cmp, &lhs, &rhs)?;
    let params = serde_json::json!({
        "h": h.to_json_terms(),
        "h_vars": h.var_names(),
        "F": f.to_json_terms(),
        "F_vars": f.var_names(),
    });
    Ok(cmp.into_report("RES-CHANGE", params, started))
}

/// Compare two scalar series with identical variables on the intersection of
/// their known windows.
pub fn compare_scalar_series(cmp: &mut Comparator, lhs: &Series<Scalar>, rhs: &Series<Scalar>) -> SeriesResult<()> {
    let diff = lhs.sub(rhs)?;
    let mut keys: Vec<&Vec<i64>> = lhs.terms().map(|(e, _)| e).chain(rhs.terms().map(|(e, _)| e)).collect();
    keys.sort();
    keys.dedup();
    cmp.count_compared(keys.len().max(1));
    for e in keys {
        if !diff.is_known(e) {
            continue;
        }
        let d = diff.coeff(e)?;
        if !d.is_zero() {
            let l = lhs.coeff(e).unwrap_or_else(|_| Scalar::zero());
            let r = rhs.coeff(e).unwrap_or_else(|_| Scalar::zero());
            cmp.scalar_mismatch(e.clone(), &l, &r);
        }
    }
    Ok(())
}

/// The rigorized `1 / (1 - e^{-y1 + y2}) = (y1 - y2)^{-1} F(y1, y2)` with
/// `(y1 - y2)^{-1}` expanded in nonnegative powers of `y2` and
/// `F(y1, y2) = G(y1 - y2)`, `G(t) = t / (1 - e^{-t})`. Window:
/// `y1 in [-1, order]`, `y2 in [0, order]`.
pub fn reg_inv_one_minus_exp(y1: &str, y2: &str, order: i64) -> SeriesResult<Series<Scalar>> {
    if order < 0 {
        return Err(SeriesError::Precondition("order must be nonnegative".into()));
    }
    // G(t) = sum_k g_k t^k, obtained by inverting (1 - e^{-t}) / t
    let kmax = (2 * order + 2) as usize;
    let unit: Vec<Scalar> = (0..=kmax)
        .map(|k| {
            // (1 - e^{-t})/t = sum_k (-1)^k t^k / (k+1)!
            let s = if k % 2 == 0 { Scalar::one() } else { Scalar::from_int(-1) };
            s * factorial(k as u32 + 1).recip()
        })
        .collect();
    let g = invert_power_series(&unit);
    let mut vars = vec![VarWindow::laurent(y1, -1, order), VarWindow::power(y2, order)];
    vars[0].zero_below = false;
    let mut out: Series<Scalar> = Series::zero(vars)?;
    // t^{-1} term: g_0 (y1 - y2)^{-1}; only y1^{-1} y2^0 lies in the window
    out.accumulate(vec![-1, 0], &g[0])?;
    // t^{k-1} for k >= 1 is a polynomial of total degree k - 1
    for (k, gk) in g.iter().enumerate().skip(1) {
        let m = k as i64 - 1;
        for j in 0..=m {
            let (a, b) = (m - j, j);
            if a > order || b > order {
                continue;
            }
            let sign = if b % 2 == 0 { Scalar::one() } else { Scalar::from_int(-1) };
            out.accumulate(vec![a, b], &(gk * &binomial(m, b as u32) * sign))?;
        }
    }
    Ok(out)
}

/// Inverse of a power series with constant term 1 (or any nonzero constant),
/// to the length of the input.
pub fn invert_power_series(f: &[Scalar]) -> Vec<Scalar> {
    assert!(!f.is_empty() && !f[0].is_zero(), "series is not invertible");
    let inv0 = f[0].recip();
    let mut g: Vec<Scalar> = vec![inv0.clone()];
    for n in 1..f.len() {
        let mut acc = Scalar::zero();
        for k in 1..=n {
            acc += &(&f[k] * &g[n - k]);
        }
        g.push(-(acc * &inv0));
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn q(p: i64, d: i64) -> Scalar {
        Scalar::ratio(p, d)
    }

    fn mono(var: &str, e: i64, lo: i64, hi: i64) -> Series<Scalar> {
        Series::from_terms(vec![VarWindow::exact(var, lo, hi)], vec![(vec![e], s(1))]).unwrap()
    }

    #[test]
    fn dilate_examples() {
        let f = mono("x", 2, 2, 2);
        let d = dilate(&f, "x", "y", 2).unwrap();
        assert_eq!(d.coeff(&[2, 0]).unwrap(), s(1));
        assert_eq!(d.coeff(&[2, 1]).unwrap(), s(2));
        assert_eq!(d.coeff(&[2, 2]).unwrap(), s(2));
        let one = mono("x", 0, 0, 0);
        let d = dilate(&one, "x", "y", 4).unwrap();
        assert_eq!(d.num_terms(), 1);
        let inv = mono("x", -1, -1, -1);
        let d = dilate(&inv, "x", "y", 1).unwrap();
        assert_eq!(d.coeff(&[-1, 0]).unwrap(), s(1));
        assert_eq!(d.coeff(&[-1, 1]).unwrap(), s(-1));
        assert!(dilate(&d, "x", "y", 1).is_err());
    }

    #[test]
    fn taylor_examples() {
        let f = mono("x", 2, 2, 2);
        let t = taylor_shift(&f, "x", "y", 2).unwrap();
        assert_eq!(t.coeff(&[2, 0]).unwrap(), s(1));
        assert_eq!(t.coeff(&[1, 1]).unwrap(), s(2));
        assert_eq!(t.coeff(&[0, 2]).unwrap(), s(1));
        let f = mono("x", -1, -1, -1);
        let t = taylor_shift(&f, "x", "y", 2).unwrap();
        assert_eq!(t.coeff(&[-1, 0]).unwrap(), s(1));
        assert_eq!(t.coeff(&[-2, 1]).unwrap(), s(-1));
        assert_eq!(t.coeff(&[-3, 2]).unwrap(), s(1));
        let one = mono("x", 0, 0, 0);
        assert_eq!(taylor_shift(&one, "x", "y", 3).unwrap().num_terms(), 1);
    }

    #[test]
    fn binom_examples() {
        let b = binom_expand("a", "b", 2, 0).unwrap();
        assert_eq!(b.coeff(&[2, 0]).unwrap(), s(1));
        assert_eq!(b.coeff(&[1, 1]).unwrap(), s(-2));
        assert_eq!(b.coeff(&[0, 2]).unwrap(), s(1));
        let b = binom_expand("a", "b", -1, 2).unwrap();
        assert_eq!(b.coeff(&[-1, 0]).unwrap(), s(1));
        assert_eq!(b.coeff(&[-2, 1]).unwrap(), s(1));
        assert_eq!(b.coeff(&[-3, 2]).unwrap(), s(1));
        let b = binom_expand("a", "b", 0, 3).unwrap();
        assert_eq!(b.num_terms(), 1);
        assert_eq!(b.coeff(&[0, 0]).unwrap(), s(1));
    }

    #[test]
    fn delta_examples() {
        let d = delta_series("x", 2).unwrap();
        for k in -2..=2 {
            assert_eq!(d.coeff(&[k]).unwrap(), s(1));
        }
        assert!(d.coeff(&[3]).is_err());
        assert_eq!(delta_series("x", 0).unwrap().coeff(&[0]).unwrap(), s(1));
        assert_eq!(residue(&d, "x").unwrap().constant_term().unwrap(), s(1));
    }

    #[test]
    fn log_examples() {
        let l = log1m("t", 3).unwrap();
        assert_eq!(l.coeff(&[1]).unwrap(), s(-1));
        assert_eq!(l.coeff(&[2]).unwrap(), q(-1, 2));
        assert_eq!(l.coeff(&[3]).unwrap(), q(-1, 3));
        let e = exp_of(&l, None).unwrap();
        assert_eq!(e.coeff(&[0]).unwrap(), s(1));
        assert_eq!(e.coeff(&[1]).unwrap(), s(-1));
        assert_eq!(e.coeff(&[2]).unwrap(), s(0));
        assert_eq!(e.coeff(&[3]).unwrap(), s(0));
    }

    #[test]
    fn subst_em1_examples() {
        let h = mono("x", 1, 1, 1);
        let r = subst_em1(&h, "x", "y", 3).unwrap();
        assert_eq!(r.coeff(&[1]).unwrap(), s(1));
        assert_eq!(r.coeff(&[2]).unwrap(), q(1, 2));
        assert_eq!(r.coeff(&[3]).unwrap(), q(1, 6));
        let h = mono("x", -1, -1, -1);
        let r = subst_em1(&h, "x", "y", 1).unwrap();
        assert_eq!(r.coeff(&[-1]).unwrap(), s(1));
        assert_eq!(r.coeff(&[0]).unwrap(), q(-1, 2));
        assert_eq!(r.coeff(&[1]).unwrap(), q(1, 12));
        let h = mono("x", 0, 0, 0);
        let r = subst_em1(&h, "x", "y", 2).unwrap();
        assert_eq!(r.num_terms(), 1);
    }

    #[test]
    fn residue_examples() {
        assert_eq!(residue(&mono("x", -1, -1, -1), "x").unwrap().constant_term().unwrap(), s(1));
        assert_eq!(residue(&mono("x", 2, 2, 2), "x").unwrap().constant_term().unwrap(), s(0));
        let p = Series::from_terms(vec![VarWindow::power("x", 3)], vec![(vec![0], s(1))]).unwrap();
        assert!(residue(&p, "x").is_ok());
        let w = Series::from_terms(vec![VarWindow::open("x", 0, 3)], vec![(vec![0], s(1))]).unwrap();
        assert!(matches!(residue(&w, "x"), Err(SeriesError::WindowInsufficient(_))));
    }

    #[test]
    fn residue_change_scaling() {
        let h = mono("x", -1, -1, -1);
        let f = Series::from_terms(vec![VarWindow::power("y", 4)], vec![(vec![1], s(2))]).unwrap();
        let r = residue_change_check(&h, "x", &f, "y").unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn reg_inv_leading_terms() {
        let r = reg_inv_one_minus_exp("y1", "y2", 3).unwrap();
        assert_eq!(r.coeff(&[-1, 0]).unwrap(), s(1));
        assert_eq!(r.coeff(&[0, 0]).unwrap(), q(1, 2));
        assert_eq!(r.coeff(&[1, 0]).unwrap(), q(1, 12));
        assert_eq!(r.coeff(&[0, 1]).unwrap(), q(-1, 12));
        assert_eq!(r.coeff(&[-1, 1]).unwrap(), s(0));
    }

    #[test]
    fn linear_form_inverse() {
        // (y1 - y2)^{-1} with y1 leading equals binom_expand(y1, y2, -1)
        let a = linear_form_power(&[("y1", 1), ("y2", -1)], "y1", -1, 3).unwrap();
        let b = binom_expand("y1", "y2", -1, 3).unwrap();
        for k in 0..=3 {
            assert_eq!(a.coeff(&[-1 - k, k]).unwrap(), b.coeff(&[-1 - k, k]).unwrap());
        }
    }
}
