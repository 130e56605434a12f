//! Generating functions of the quadratic operators: Wick's theorem for the
//! boson field and the commutator of regularized generating functions.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::json;

use crate::fock::{basis_up_to, h_apply, FockVector, Partition};
use crate::regularized::{QuadCache, QuadraticOpSpec};
use crate::report::{run_check, CheckReport};
use crate::scalar::{binomial, factorial, Scalar};
use crate::series::{
    binom_expand, compose_power, dilate, invert_power_series, mul, Coeff, Series, SeriesError, SeriesResult, VarWindow,
};

/// `h(-i) h(-j) v` with the larger mode applied first.
fn normal_ordered_pair(i: i64, j: i64, v: &FockVector) -> FockVector {
    let (a, b) = (-i, -j);
    let (first, second) = if a >= b { (a, b) } else { (b, a) };
    h_apply(second, &h_apply(first, v))
}

/// Series in `x1, x2` (coefficient of `x1^i x2^j` is `f(i, j)`) on `[-n, n]^2`.
fn field_square(n: i64, f: impl Fn(i64, i64) -> FockVector) -> SeriesResult<Series<FockVector>> {
    let mut s = Series::zero(vec![VarWindow::open("x1", -n, n), VarWindow::open("x2", -n, n)])?;
    for i in -n..=n {
        for j in -n..=n {
            s.accumulate(vec![i, j], &f(i, j))?;
        }
    }
    Ok(s)
}

/// `x2 d/dx2 (1 - x2/x1)^{-1}`, expanded in nonnegative powers of `x2`.
fn contraction(n: i64) -> SeriesResult<Series<Scalar>> {
    binom_expand("x1", "x2", -1, 2 * n)?.shift("x1", 1)?.euler("x2")
}

fn compare_on_box(
    cmp: &mut crate::report::Comparator,
    target: &FockVector,
    lhs: &Series<FockVector>,
    rhs: &Series<FockVector>,
    boxes: &[(i64, i64)],
) -> SeriesResult<()> {
    let mut idx: Vec<i64> = boxes.iter().map(|b| b.0).collect();
    loop {
        let l = lhs.coeff(&idx)?;
        let r = rhs.coeff(&idx)?;
        cmp.compare_vectors(&idx, target, &l, &r);
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(());
            }
            if idx[k] < boxes[k].1 {
                idx[k] += 1;
                break;
            }
            idx[k] = boxes[k].0;
            k += 1;
        }
    }
}

/// `h(x1) h(x2) = :h(x1) h(x2): + x2 d/dx2 (1/(1 - x2/x1))` on every basis
/// vector of weight `<= w`, on the window `|i|, |j| <= n`.
pub fn wick_check(n: i64, w: u32) -> CheckReport {
    let params = json!({ "x-window": n, "weight-cap": w });
    run_check("WICK", params, |cmp| {
        let c = contraction(n)?;
        for p in basis_up_to(w) {
            let b = FockVector::basis(p);
            let lhs = field_square(n, |i, j| h_apply(-i, &h_apply(-j, &b)))?;
            let no = field_square(n, |i, j| normal_ordered_pair(i, j, &b))?;
            let rhs = no.add(&c.map_coeffs(|s| b.scaled(s)))?;
            compare_on_box(cmp, &b, &lhs, &rhs, &[(-n, n), (-n, n)])?;
        }
        Ok(())
    })
}

/// The same identity after the dilations `x1 -> e^{y1} x1`, `x2 -> e^{y2} x2`,
/// compared through `y`-order `order`.
pub fn wick_dilated_check(n: i64, w: u32, order: i64) -> CheckReport {
    let params = json!({ "x-window": n, "weight-cap": w, "y-order": order });
    run_check("WICK-DILATED", params, |cmp| {
        let c = contraction(n)?;
        let dil = |s: &Series<FockVector>| -> SeriesResult<Series<FockVector>> {
            dilate(&dilate(s, "x1", "y1", order)?, "x2", "y2", order)
        };
        for p in basis_up_to(w) {
            let b = FockVector::basis(p);
            let lhs = dil(&field_square(n, |i, j| h_apply(-i, &h_apply(-j, &b)))?)?;
            let no = dil(&field_square(n, |i, j| normal_ordered_pair(i, j, &b))?)?;
            let rhs = no.add(&dil(&c.map_coeffs(|s| b.scaled(s)))?)?;
            compare_on_box(cmp, &b, &lhs, &rhs, &[(-n, n), (-n, n), (0, order), (0, order)])?;
        }
        Ok(())
    })
}

/// `(-1)^{a+b} / (a! b!)`, the factor relating `L^(a,b)(n)` to the
/// coefficient of `y1^a y2^b` in the generating function.
fn gen_factor(a: u32, b: u32) -> Scalar {
    let sign = if (a + b).is_multiple_of(2) { 1 } else { -1 };
    Scalar::from_int(sign) / (factorial(a) * factorial(b))
}

/// Coordinates `Y = y1`, `w_i = y_i / y1` in which negative powers of linear
/// forms with a nonzero `y1` coefficient are Laurent in `Y` and power series
/// in the `w_i`. The monomial `y1^a y2^b y3^c y4^d` becomes
/// `Y^{a+b+c+d} w2^b w3^c w4^d`.
struct LeadFrame {
    /// truncation of `Y`
    ymax: i64,
    /// truncation of `w2, w3, w4`
    wmax: [i64; 3],
}

const FRAME: [&str; 4] = ["Y", "w2", "w3", "w4"];

impl LeadFrame {
    fn w_vars(&self) -> Vec<VarWindow> {
        (0..3).map(|i| VarWindow::power(FRAME[i + 1], self.wmax[i])).collect()
    }

    fn vars(&self, ylow: i64) -> Vec<VarWindow> {
        let mut v = vec![VarWindow::laurent("Y", ylow, self.ymax)];
        v.extend(self.w_vars());
        v
    }

    fn to_frame(y: &[i64; 4]) -> Vec<i64> {
        vec![y.iter().sum(), y[1], y[2], y[3]]
    }

    /// `sum_{i>=2} c_i w_i + c_1`, a series in the `w` variables.
    fn linear(&self, form: &[i64; 4]) -> SeriesResult<Series<Scalar>> {
        let mut s = Series::zero(self.w_vars())?;
        s.accumulate(vec![0, 0, 0], &Scalar::from_int(form[0]))?;
        for i in 1..4 {
            let mut e = vec![0, 0, 0];
            e[i - 1] = 1;
            s.accumulate(e, &Scalar::from_int(form[i]))?;
        }
        Ok(s)
    }

    /// `l(w)^k` for the linear form `l`; negative `k` needs `c_1 != 0`.
    fn form_power(&self, form: &[i64; 4], k: i64) -> SeriesResult<Series<Scalar>> {
        if k >= 0 {
            let l = self.linear(form)?;
            let mut out = Series::from_terms(self.w_vars(), vec![(vec![0, 0, 0], Scalar::one())])?;
            for _ in 0..k {
                out = mul(&out, &l)?;
            }
            return Ok(out);
        }
        if form[0] == 0 {
            return Err(SeriesError::Precondition("negative power of a form without y1".into()));
        }
        let c1 = Scalar::from_int(form[0]);
        let mut rest = [0; 4];
        rest[1..].copy_from_slice(&form[1..]);
        let s = self.linear(&rest)?.scale(&c1.recip());
        if s.is_zero() {
            return Series::from_terms(self.w_vars(), vec![(vec![0, 0, 0], c1.pow(k as i32))]);
        }
        Ok(compose_power(|j| binomial(k, j), &s, None)?.scale(&c1.pow(k as i32)))
    }

    /// Multiply a `w`-series by `Y^k`.
    fn lift(&self, f: &Series<Scalar>, k: i64, ylow: i64) -> SeriesResult<Series<Scalar>> {
        let mut out = Series::zero(self.vars(ylow))?;
        for (e, c) in f.terms() {
            if k <= self.ymax {
                out.accumulate(vec![k, e[0], e[1], e[2]], c)?;
            }
        }
        Ok(out)
    }

    /// `d/dy_i` in frame coordinates.
    fn derivative(&self, f: &Series<Scalar>, i: usize) -> SeriesResult<Series<Scalar>> {
        let mut vars = f.vars().to_vec();
        vars[0].low -= 1;
        vars[0].high -= 1;
        if i > 0 {
            vars[i].high -= 1;
        }
        let mut out = Series::zero(vars)?;
        for (e, c) in f.terms() {
            let factor = if i == 0 { e[0] - e[1] - e[2] - e[3] } else { e[i] };
            if factor == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[0] -= 1;
            if i > 0 {
                ne[i] -= 1;
            }
            if out.vars()[0].stores(ne[0]) && (i == 0 || out.vars()[i].stores(ne[i])) {
                out.accumulate(ne, &(c * &Scalar::from_int(factor)))?;
            }
        }
        Ok(out)
    }
}

/// Laurent coefficients of `K(t) = -(1/2) d/dt (1 / (1 - e^{-t}))`,
/// as `(exponent, coefficient)` from `t^{-2}` through `t^{top}`.
fn regularized_kernel(top: i64) -> Vec<(i64, Scalar)> {
    // (1 - e^{-t})/t = sum (-1)^k t^k / (k+1)!
    let n = (top + 3) as usize;
    let unit: Vec<Scalar> = (0..=n)
        .map(|k| {
            let s = if k % 2 == 0 { 1 } else { -1 };
            Scalar::from_int(s) / factorial(k as u32 + 1)
        })
        .collect();
    let g = invert_power_series(&unit);
    // g(t) = sum_k g_k t^{k-1}; K = -(1/2) sum_k (k-1) g_k t^{k-2}
    (0..=n).map(|k| (k as i64 - 2, Scalar::ratio(-(k as i64 - 1), 2) * &g[k])).filter(|(e, _)| *e <= top).collect()
}

/// One of the four delta-function terms on the right-hand side.
struct DeltaTerm {
    /// first argument of the regularized generating function
    u: [i64; 4],
    /// index of the variable in the second argument
    v: usize,
    /// the delta function is `delta(e^{l . y} x1 / x2)`
    shift: [i64; 4],
    /// differentiated variable
    d: usize,
}

const DELTA_TERMS: [DeltaTerm; 4] = [
    DeltaTerm { u: [-1, 1, 1, 0], v: 3, shift: [1, 0, -1, 0], d: 0 },
    DeltaTerm { u: [-1, 1, 0, 1], v: 2, shift: [1, 0, 0, -1], d: 0 },
    DeltaTerm { u: [1, -1, 1, 0], v: 3, shift: [0, 1, -1, 0], d: 1 },
    DeltaTerm { u: [1, -1, 0, 1], v: 2, shift: [0, 1, 0, -1], d: 1 },
];

/// Scalar weights of the right-hand side at one power of `x1`:
/// for each frame monomial, the coefficients of `L^(a,b)(p) v` and of `v`.
type OpWeights = Vec<((u32, u32), Scalar)>;

#[derive(Default)]
struct RhsTable {
    ops: BTreeMap<Vec<i64>, OpWeights>,
    scalar: BTreeMap<Vec<i64>, Scalar>,
}

fn rhs_table(frame: &LeadFrame, e1: i64, monomials: &[Vec<i64>]) -> SeriesResult<RhsTable> {
    let kernel = regularized_kernel(frame.ymax);
    let half = Scalar::ratio(-1, 2);
    let mut op_acc: BTreeMap<(u32, u32), Series<Scalar>> = BTreeMap::new();
    let mut scalar_acc: Option<Series<Scalar>> = None;
    for term in &DELTA_TERMS {
        // E = exp(e1 * shift . y)
        let l = frame.linear(&term.shift)?;
        let mut e = frame.lift(&Series::from_terms(frame.w_vars(), vec![(vec![0, 0, 0], Scalar::one())])?, 0, 0)?;
        let mut lk = Series::from_terms(frame.w_vars(), vec![(vec![0, 0, 0], Scalar::one())])?;
        for k in 1..=frame.ymax {
            lk = mul(&lk, &l)?;
            let c = Scalar::from_int(e1).pow(k as i32) / factorial(k as u32);
            e = e.add(&frame.lift(&lk.scale(&c), k, 0)?)?;
        }
        // operator part: Y^{a+b} l_u^a w_v^b
        let mut upow = Series::from_terms(frame.w_vars(), vec![(vec![0, 0, 0], Scalar::one())])?;
        let lu = frame.linear(&term.u)?;
        for a in 0..=frame.ymax {
            if a > 0 {
                upow = mul(&upow, &lu)?;
            }
            for b in 0..=(frame.ymax - a).min(frame.wmax[term.v - 1]) {
                let vpow = frame.form_power_monomial(term.v, b)?;
                let p = frame.lift(&mul(&upow, &vpow)?, a + b, 0)?;
                let q = frame.derivative(&mul(&e, &p)?, term.d)?.scale(&half);
                let key = (a as u32, b as u32);
                let entry = match op_acc.remove(&key) {
                    Some(prev) => prev.add(&q)?,
                    None => q,
                };
                op_acc.insert(key, entry);
            }
        }
        // scalar part: K(u - v)
        let mut t = term.u;
        t[term.v] -= 1;
        let mut ks = Series::zero(frame.vars(-2))?;
        for (k, c) in &kernel {
            if c.is_zero() {
                continue;
            }
            let lp = frame.form_power(&t, *k)?.scale(c);
            ks = ks.add(&frame.lift(&lp, *k, -2)?)?;
        }
        let q = frame.derivative(&mul(&e, &ks)?, term.d)?.scale(&half);
        scalar_acc = Some(match scalar_acc {
            Some(prev) => prev.add(&q)?,
            None => q,
        });
    }
    let mut table = RhsTable::default();
    let scalar_acc = scalar_acc.expect("four terms");
    for mono in monomials {
        let mut row = Vec::new();
        for (key, s) in &op_acc {
            let c = s.coeff(mono)?;
            if !c.is_zero() {
                row.push((*key, c));
            }
        }
        table.ops.insert(mono.clone(), row);
        table.scalar.insert(mono.clone(), scalar_acc.coeff(mono)?);
    }
    Ok(table)
}

impl LeadFrame {
    /// `w_v^b` (or `1` when `b = 0`) as a `w`-series.
    fn form_power_monomial(&self, v: usize, b: i64) -> SeriesResult<Series<Scalar>> {
        let mut e = vec![0, 0, 0];
        e[v - 1] = b;
        Series::from_terms(self.w_vars(), vec![(e, Scalar::one())])
    }
}

struct Comparison {
    monomial: Vec<i64>,
    target: FockVector,
    lhs: FockVector,
    rhs: FockVector,
}

/// Commutator of two regularized generating functions against the sum of
/// four differentiated delta-function terms.
///
/// Compares the coefficient of `y1^a y2^b y3^c y4^d x1^{e1} x2^{e2}` for
/// `-3 <= a <= orders[0]`, `0 <= b, c, d <= orders[i]`, `|e1|, |e2| <= n`,
/// on every basis vector of weight `<= w`. Negative powers of linear forms
/// are expanded in nonnegative powers of `y2, y3, y4`. The coefficient of
/// `y^0` is additionally compared with the regularized Virasoro bracket.
pub fn theorem1_check(orders: [u32; 4], n: i64, w: u32) -> CheckReport {
    let params = json!({ "y-orders": orders, "x-window": n, "weight-cap": w });
    run_check("THEOREM1", params, |cmp| {
        let o: Vec<i64> = orders.iter().map(|&x| x as i64).collect();
        let frame = LeadFrame { ymax: o.iter().sum::<i64>() + 3, wmax: [o[1] + 1, o[2] + 1, o[3] + 1] };
        let mut ys = Vec::new();
        for a in -3..=o[0] {
            for b in 0..=o[1] {
                for c in 0..=o[2] {
                    for d in 0..=o[3] {
                        ys.push([a, b, c, d]);
                    }
                }
            }
        }
        let monos: Vec<Vec<i64>> = ys.iter().map(LeadFrame::to_frame).collect();
        let tables = (-n..=n)
            .map(|e1| rhs_table(&frame, e1, &monos).map(|t| (e1, t)))
            .collect::<SeriesResult<BTreeMap<_, _>>>()?;
        let targets = basis_up_to(w);
        let results: Vec<(Vec<Comparison>, Vec<Comparison>)> =
            targets.par_iter().map(|p| theorem1_target(p, n, &o, &ys, &monos, &tables)).collect();
        let mut slice_ok = true;
        for (main, slice) in results {
            for c in main {
                cmp.compare_vectors(&c.monomial, &c.target, &c.lhs, &c.rhs);
            }
            for c in slice {
                slice_ok &= c.lhs == c.rhs;
                cmp.compare_vectors(&c.monomial, &c.target, &c.lhs, &c.rhs);
            }
        }
        cmp.set_detail("modvir-slice-agrees", json!(slice_ok));
        Ok(())
    })
}

fn theorem1_target(
    p: &Partition,
    n: i64,
    o: &[i64],
    ys: &[[i64; 4]],
    monos: &[Vec<i64>],
    tables: &BTreeMap<i64, RhsTable>,
) -> (Vec<Comparison>, Vec<Comparison>) {
    let target = FockVector::basis(p.clone());
    let mut cache = QuadCache::new();
    let gen = |a: u32, b: u32, m: i64, v: &FockVector, cache: &mut QuadCache| {
        cache.apply(a, b, m, v).scaled(&gen_factor(a, b))
    };
    // G_cd(k) target
    let mut right: BTreeMap<(u32, u32, i64), FockVector> = BTreeMap::new();
    let mut left: BTreeMap<(u32, u32, i64), FockVector> = BTreeMap::new();
    for k in -n..=n {
        for a in 0..=o[0].max(o[2]) as u32 {
            for b in 0..=o[1].max(o[3]) as u32 {
                let v = gen(a, b, -k, &target, &mut cache);
                right.insert((a, b, k), v.clone());
                left.insert((a, b, k), v);
            }
        }
    }
    let mut rhs_vecs: BTreeMap<(u32, u32, i64), FockVector> = BTreeMap::new();
    let mut main = Vec::new();
    let mut slice = Vec::new();
    for e1 in -n..=n {
        let table = &tables[&e1];
        for e2 in -n..=n {
            let (m, k) = (-e1, -e2);
            let pmode = m + k;
            for (y, mono) in ys.iter().zip(monos) {
                let lhs = if y[0] < 0 {
                    FockVector::zero()
                } else {
                    let (a, b, c, d) = (y[0] as u32, y[1] as u32, y[2] as u32, y[3] as u32);
                    let gcd_v = &right[&(c, d, e2)];
                    let gab_v = &left[&(a, b, e1)];
                    let x = gen(a, b, m, gcd_v, &mut cache);
                    let z = gen(c, d, k, gab_v, &mut cache);
                    x.sub(&z)
                };
                let mut rhs = FockVector::zero();
                for ((a, b), c) in &table.ops[mono] {
                    let v = rhs_vecs.entry((*a, *b, pmode)).or_insert_with(|| gen(*a, *b, pmode, &target, &mut cache));
                    rhs.add_scaled(v, c);
                }
                if pmode == 0 {
                    rhs.add_scaled(&target, &table.scalar[mono]);
                }
                let mut monomial = y.to_vec();
                monomial.extend([e1, e2]);
                if y.iter().all(|&x| x == 0) {
                    let mut expected = cache
                        .apply_spec(QuadraticOpSpec::new(0, pmode, true), &target)
                        .scaled(&Scalar::from_int(m - k));
                    if pmode == 0 {
                        expected.add_scaled(&target, &(Scalar::from_int(m * m * m) * Scalar::ratio(1, 12)));
                    }
                    slice.push(Comparison {
                        monomial: monomial.clone(),
                        target: target.clone(),
                        lhs: rhs.clone(),
                        rhs: expected,
                    });
                }
                main.push(Comparison { monomial, target: target.clone(), lhs, rhs });
            }
        }
    }
    (main, slice)
}
