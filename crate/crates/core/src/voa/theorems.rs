//! Commutator and Jacobi-type identities for `X(u, x)` and the bracket operator,
//! their generalizations with dilated variables, the four-term identity, and
//! the bridge to the regularized quadratic operators.

use std::collections::HashMap;

use serde::Serialize;
use serde_json::json;

use super::VertexCache;
use crate::fock::{basis_up_to, FockVector};
use crate::generating::theorem1_check;
use crate::regularized::{regularized_scalar, QuadCache};
use crate::report::{run_check, CheckReport, Comparator};
use crate::scalar::{binomial, factorial, Scalar};
use crate::series::{
    compose_laurent, delta_series, dilate, exp_of, exp_series, identify, log1m, mul, reg_inv_one_minus_exp, residue,
    taylor_shift, Coeff, Series, SeriesError, SeriesResult, VarWindow,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TheoremId {
    NewJacobi,
    Comm,
    GenJacobi,
    GenComm,
    FourTerm,
    Specialize,
    Bridge,
}

impl TheoremId {
    pub const ALL: [TheoremId; 7] = [
        TheoremId::NewJacobi,
        TheoremId::Comm,
        TheoremId::GenJacobi,
        TheoremId::GenComm,
        TheoremId::FourTerm,
        TheoremId::Specialize,
        TheoremId::Bridge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::NewJacobi => "NEWJACOBI",
            TheoremId::Comm => "COMM",
            TheoremId::GenJacobi => "GENJACOBI",
            TheoremId::GenComm => "GENCOMM",
            TheoremId::FourTerm => "FOURTERM",
            TheoremId::Specialize => "SPECIALIZE",
            TheoremId::Bridge => "BRIDGE",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        TheoremId::ALL.into_iter().find(|t| t.name().eq_ignore_ascii_case(s))
    }
}

/// Parameters shared by all theorem checks.
///
/// `orders` lists the highest compared power of each formal variable:
/// `[y]` for COMM, `[y1, y2, w1, w2]` for the generalized identities and
/// SPECIALIZE, `[y1, y2]` for FOURTERM, `[y, w]` for BRIDGE. Missing
/// entries fall back to the defaults of [`TheoremParams::default_for`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremParams {
    pub identity: TheoremId,
    pub u1: FockVector,
    pub v1: FockVector,
    pub u2: FockVector,
    pub v2: FockVector,
    /// Applied vectors; empty means every basis monomial up to `weight_cap`.
    pub targets: Vec<FockVector>,
    #[serde(rename = "weight-cap")]
    pub weight_cap: u32,
    #[serde(rename = "x-window")]
    pub x_window: i64,
    pub orders: Vec<i64>,
    /// Truncation order of the auxiliary residue variables in FOURTERM.
    #[serde(rename = "inner-order")]
    pub inner_order: Option<i64>,
}

impl TheoremParams {
    pub fn default_for(id: TheoremId) -> Self {
        let v0 = FockVector::from_parts(&[1]);
        let base = TheoremParams {
            identity: id,
            u1: v0.clone(),
            v1: v0.clone(),
            u2: v0.clone(),
            v2: v0,
            targets: Vec::new(),
            weight_cap: 3,
            x_window: 2,
            orders: vec![1, 1, 1, 1],
            inner_order: None,
        };
        match id {
            TheoremId::NewJacobi => TheoremParams { weight_cap: 4, x_window: 3, orders: vec![], ..base },
            TheoremId::Comm => TheoremParams { weight_cap: 4, x_window: 3, orders: vec![3], ..base },
            TheoremId::GenJacobi | TheoremId::GenComm => {
                TheoremParams { weight_cap: 4, x_window: 3, orders: vec![2, 2, 2, 2], ..base }
            }
            TheoremId::FourTerm => TheoremParams { weight_cap: 2, orders: vec![1, 1], ..base },
            TheoremId::Specialize => TheoremParams { weight_cap: 4, ..base },
            TheoremId::Bridge => TheoremParams { weight_cap: 4, x_window: 3, orders: vec![2, 2], ..base },
        }
    }

    pub fn target_vectors(&self) -> Vec<FockVector> {
        if self.targets.is_empty() {
            basis_up_to(self.weight_cap).into_iter().map(FockVector::basis).collect()
        } else {
            self.targets.clone()
        }
    }

    fn order(&self, i: usize) -> i64 {
        self.orders
            .get(i)
            .copied()
            .or_else(|| TheoremParams::default_for(self.identity).orders.get(i).copied())
            .unwrap_or(1)
    }

    fn to_json(&self) -> serde_json::Value {
        json!({
            "identity": self.identity.name(),
            "vectors": { "u1": self.u1, "v1": self.v1, "u2": self.u2, "v2": self.v2 },
            "targets": self.targets,
            "weight-cap": self.weight_cap,
            "x-window": self.x_window,
            "orders": self.orders,
            "inner-order": self.inner_order,
        })
    }
}

/// Run one theorem check.
pub fn theorem_check(params: &TheoremParams) -> CheckReport {
    let p = params;
    let id = p.identity.name();
    run_check(id, p.to_json(), |cmp| match p.identity {
        TheoremId::NewJacobi => new_jacobi(cmp, p),
        TheoremId::Comm => comm(cmp, p),
        TheoremId::GenJacobi => gen_jacobi(cmp, p),
        TheoremId::GenComm => gen_comm(cmp, p),
        TheoremId::FourTerm => four_term(cmp, p),
        TheoremId::Specialize => specialize(cmp, p),
        TheoremId::Bridge => bridge(cmp, p),
    })
}

fn sign(k: i64) -> Scalar {
    if k.rem_euclid(2) == 0 {
        Scalar::one()
    } else {
        Scalar::from_int(-1)
    }
}

fn weight(v: &FockVector) -> i64 {
    v.max_weight() as i64
}

/// Apply `f` to every coefficient of a vector-valued series.
fn map_vectors(
    s: &Series<FockVector>,
    mut f: impl FnMut(&FockVector) -> FockVector,
) -> SeriesResult<Series<FockVector>> {
    let terms: Vec<(Vec<i64>, FockVector)> = s.terms().map(|(e, c)| (e.clone(), f(c))).collect();
    Series::from_terms(s.vars().to_vec(), terms)
}

fn vector_coeff(s: &Series<FockVector>, exps: &[i64]) -> SeriesResult<FockVector> {
    s.coeff(exps)
}

struct Evaluator {
    cache: VertexCache,
    powers: HashMap<i64, Vec<Scalar>>,
}

impl Evaluator {
    fn new() -> Self {
        Evaluator { cache: VertexCache::new(), powers: HashMap::new() }
    }

    fn x(&mut self, u: &FockVector, n: i64, v: &FockVector) -> FockVector {
        self.cache.x_mode(u, n, v)
    }

    /// Coefficients of `(1 - s)^n = exp(n log(1 - s))` through `s^kmax`.
    fn one_minus_pow(&mut self, n: i64, kmax: i64) -> SeriesResult<Vec<Scalar>> {
        if let Some(c) = self.powers.get(&n) {
            if c.len() as i64 > kmax {
                return Ok(c.clone());
            }
        }
        let order = kmax.max(8);
        let e = exp_of(&log1m("s", order)?.scale(&Scalar::from_int(n)), None)?;
        let coeffs = (0..=order).map(|k| e.coeff(&[k])).collect::<SeriesResult<Vec<_>>>()?;
        self.powers.insert(n, coeffs.clone());
        Ok(coeffs)
    }

    /// `Y[u, w] v` with `w = -log(1 - r)`, a Laurent series in `r` through `r^order`.
    fn substituted_bracket(&mut self, u: &FockVector, v: &FockVector, order: i64) -> SeriesResult<Series<FockVector>> {
        let z = self.cache.y_bracket(u, v, "w", order)?;
        let low = z.window("w")?.low.min(0);
        let phi = log1m("r", order - low + 1)?.neg();
        compose_laurent(&z, "w", &phi, "r")
    }

    /// `x0^a x1^b x2^c` coefficient of the two delta terms on the left.
    fn nj_lhs(
        &mut self,
        u: &FockVector,
        v: &FockVector,
        t: &FockVector,
        (a, b, c): (i64, i64, i64),
    ) -> SeriesResult<FockVector> {
        let n = -a - 1;
        let wt = weight(t);
        let mut out = FockVector::zero();
        let kmax = c + wt;
        if kmax >= 0 {
            let coeffs = self.one_minus_pow(n, kmax)?;
            for (k, ck) in coeffs.iter().enumerate().take(kmax as usize + 1) {
                let k = k as i64;
                let inner = self.x(v, k - c, t);
                out.add_scaled(&self.x(u, n - k - b, &inner), ck);
            }
        }
        let kmax = b + wt;
        if kmax >= 0 {
            let coeffs = self.one_minus_pow(n, kmax)?;
            let s = sign(n);
            for (k, dk) in coeffs.iter().enumerate().take(kmax as usize + 1) {
                let k = k as i64;
                let inner = self.x(u, k - b, t);
                out.add_scaled(&self.x(v, n - k - c, &inner), &-(dk * &s));
            }
        }
        Ok(out)
    }

    /// `x0^a x1^b x2^c` coefficient of the right side, given `Y[u, w] v`
    /// with `w = -log(1 - x0/x1)` as a series in `r = x0/x1`.
    fn nj_rhs(
        &mut self,
        zr: &Series<FockVector>,
        t: &FockVector,
        (a, b, c): (i64, i64, i64),
    ) -> SeriesResult<FockVector> {
        let z = self.bracket_vector_at(zr, (a, b))?;
        Ok(self.x(&z, -a - b - 1 - c, t))
    }

    /// Coefficient of `r^a` in `(1 - r)^{a+b}` times the substituted bracket.
    fn bracket_vector_at(&mut self, zr: &Series<FockVector>, (a, b): (i64, i64)) -> SeriesResult<FockVector> {
        let n = a + b;
        let low = zr.window("r")?.low;
        let mut z = FockVector::zero();
        if a < low {
            return Ok(z);
        }
        let kmax = a - low;
        let pw = self.one_minus_pow(n, kmax)?;
        for (j, pj) in pw.iter().enumerate().take(kmax as usize + 1) {
            z.add_scaled(&vector_coeff(zr, &[a - j as i64])?, pj);
        }
        Ok(z)
    }

    fn comm_lhs(&mut self, u: &FockVector, v: &FockVector, t: &FockVector, b: i64, c: i64) -> FockVector {
        let vt = self.x(v, -c, t);
        let ut = self.x(u, -b, t);
        let first = self.x(u, -b, &vt);
        first.sub(&self.x(v, -c, &ut))
    }

    /// `Res_w delta(e^{-w} z) Y[u, w] v` read off at `z^b` for `|b| <= n`,
    /// as a series in the extra dilation variables `dil` (name, order, sign).
    /// `order` truncates the `w`-expansion of the delta factor; `None` picks
    /// the smallest order that determines the residue.
    fn bracket_residues(
        &mut self,
        u: &FockVector,
        v: &FockVector,
        n: i64,
        order: Option<i64>,
        dil: &[(&str, i64, bool)],
    ) -> SeriesResult<Vec<(i64, Series<FockVector>)>> {
        let z = self.cache.y_bracket(u, v, "w", 0)?;
        let low = z.window("w")?.low.min(0);
        let order = order.unwrap_or((-1 - low).max(0));
        let mut d = dilate(&delta_series("z", n)?, "z", "w", order)?.flip_sign("w")?;
        for &(name, o, negate) in dil {
            d = dilate(&d, "z", name, o)?;
            if negate {
                d = d.flip_sign(name)?;
            }
        }
        let mut out = Vec::new();
        for b in -n..=n {
            let e = d.coeff_in("z", b)?;
            out.push((b, residue(&mul(&e, &z)?, "w")?));
        }
        Ok(out)
    }
}

fn new_jacobi(cmp: &mut Comparator, p: &TheoremParams) -> SeriesResult<()> {
    let mut ev = Evaluator::new();
    let n = p.x_window;
    let zr = ev.substituted_bracket(&p.u1, &p.v1, n)?;
    for t in p.target_vectors() {
        for a in -n..=n {
            for b in -n..=n {
                for c in -n..=n {
                    let lhs = ev.nj_lhs(&p.u1, &p.v1, &t, (a, b, c))?;
                    let rhs = ev.nj_rhs(&zr, &t, (a, b, c))?;
                    cmp.compare_vectors(&[a, b, c], &t, &lhs, &rhs);
                }
            }
        }
    }
    Ok(())
}

/// The commutator formula, together with its derivation from the Jacobi-type
/// identity: the `x0`-residue of the left side, and the residue of the right
/// side after `x0 = x1 (1 - e^y)`.
fn comm(cmp: &mut Comparator, p: &TheoremParams) -> SeriesResult<()> {
    let mut ev = Evaluator::new();
    let n = p.x_window;
    let (u, v) = (&p.u1, &p.v1);
    let res = ev.bracket_residues(u, v, n, Some(p.order(0)), &[])?;
    let zr = ev.substituted_bracket(u, v, 0)?;
    let amin = zr.window("r")?.low.min(-1);
    let kf = -amin + 2;
    let f_terms: Vec<(Vec<i64>, Scalar)> = (1..=kf).map(|k| (vec![1, k], -factorial(k as u32).recip())).collect();
    let f = Series::from_terms(vec![VarWindow::exact("x1", 1, 1), VarWindow::power("y", kf)], f_terms)?;
    let fprime = f.derivative("y")?;
    let mut link = 0usize;
    for t in p.target_vectors() {
        for (b, rb) in &res {
            let b = *b;
            for c in -n..=n {
                let lhs = ev.comm_lhs(u, v, &t, b, c);
                let rhs = ev.x(&rb.constant_term()?, -b - c, &t);
                cmp.compare_vectors(&[b, c], &t, &lhs, &rhs);

                let from_jacobi = ev.nj_lhs(u, v, &t, (-1, b, c))?;
                cmp.compare_vectors(&[-1, b, c], &t, &from_jacobi, &lhs);

                let mut h =
                    Series::zero(vec![VarWindow::laurent("x0", amin, -1), VarWindow::open("x1", b, b - amin - 1)])?;
                for a in amin..=-1 {
                    for e in b..=b - amin - 1 {
                        let val = ev.nj_rhs(&zr, &t, (a, e, c))?;
                        h.accumulate(vec![a, e], &val)?;
                    }
                }
                let composed = compose_laurent(&h, "x0", &f, "y")?;
                let r = residue(&mul(&fprime, &composed)?, "y")?;
                let changed = r.align_to(&["x1".to_string()])?.coeff(&[b])?;
                cmp.compare_vectors(&[-1, b, c], &t, &changed, &rhs);
                link += 2;
            }
        }
    }
    cmp.set_detail("residue-link-comparisons", json!(link));
    Ok(())
}

/// Dilation factors `exp(l1 w1 + l2 w2)` as series in `(w1, w2)`.
struct WFactors {
    orders: (i64, i64),
    map: HashMap<(i64, i64), Series<Scalar>>,
}

impl WFactors {
    fn new(o1: i64, o2: i64) -> Self {
        WFactors { orders: (o1, o2), map: HashMap::new() }
    }

    fn get(&mut self, l1: i64, l2: i64) -> SeriesResult<&Series<Scalar>> {
        let (o1, o2) = self.orders;
        if let std::collections::hash_map::Entry::Vacant(e) = self.map.entry((l1, l2)) {
            let s = mul(&exp_series("w1", &Scalar::from_int(l1), o1), &exp_series("w2", &Scalar::from_int(l2), o2))?;
            e.insert(s);
        }
        Ok(&self.map[&(l1, l2)])
    }

    /// `sum_l exp(l1 w1 + l2 w2) v_l` for vectors grouped by their factor.
    fn expand(&mut self, parts: &WTerms) -> SeriesResult<Series<FockVector>> {
        let (o1, o2) = self.orders;
        let mut acc = Series::zero(vec![VarWindow::power("w1", o1), VarWindow::power("w2", o2)])?;
        for (l, v) in &parts.0 {
            if v.is_zero() {
                continue;
            }
            for (e, s) in self.get(l.0, l.1)?.terms() {
                acc.accumulate(e.clone(), &v.scaled(s))?;
            }
        }
        Ok(acc)
    }
}

/// Compare two sides given as sums of dilation factors times vectors. Equal
/// groups give equal coefficients of every `w1^g w2^d`; otherwise both sides
/// are expanded.
fn compare_grouped(
    cmp: &mut Comparator,
    wf: &mut WFactors,
    prefix: &[i64],
    t: &FockVector,
    lhs: &WTerms,
    rhs: &WTerms,
) -> SeriesResult<()> {
    let (o1, o2) = wf.orders;
    if lhs.normalized() == rhs.normalized() {
        cmp.count_compared(((o1 + 1) * (o2 + 1)) as usize);
        return Ok(());
    }
    let (l, r) = (wf.expand(lhs)?, wf.expand(rhs)?);
    compare_w_series(cmp, prefix, t, &l, &r, (o1, o2))
}

/// Vectors keyed by the exponents of their dilation factor.
#[derive(Default)]
struct WTerms(std::collections::BTreeMap<(i64, i64), FockVector>);

impl WTerms {
    fn add(&mut self, l: (i64, i64), v: &FockVector, c: &Scalar) {
        self.0.entry(l).or_insert_with(FockVector::zero).add_scaled(v, c);
    }

    fn normalized(&self) -> Vec<(&(i64, i64), &FockVector)> {
        self.0.iter().filter(|(_, v)| !v.is_zero()).collect()
    }
}

/// Coefficient vectors of `Y[u, y] v` on its stored window.
fn bracket_coeffs(
    ev: &mut Evaluator,
    u: &FockVector,
    v: &FockVector,
    order: i64,
) -> SeriesResult<Vec<(i64, FockVector)>> {
    let s = ev.cache.y_bracket(u, v, "y", order)?;
    let w = s.window("y")?.clone();
    (w.low..=w.high).map(|e| Ok((e, s.coeff(&[e])?))).collect()
}

fn compare_w_series(
    cmp: &mut Comparator,
    prefix: &[i64],
    t: &FockVector,
    lhs: &Series<FockVector>,
    rhs: &Series<FockVector>,
    (o1, o2): (i64, i64),
) -> SeriesResult<()> {
    for g in 0..=o1 {
        for d in 0..=o2 {
            let mut mono = prefix.to_vec();
            mono.extend([g, d]);
            cmp.compare_vectors(&mono, t, &lhs.coeff(&[g, d])?, &rhs.coeff(&[g, d])?);
        }
    }
    Ok(())
}

fn gen_jacobi(cmp: &mut Comparator, p: &TheoremParams) -> SeriesResult<()> {
    let mut ev = Evaluator::new();
    let n = p.x_window;
    let (oy1, oy2, ow1, ow2) = (p.order(0), p.order(1), p.order(2), p.order(3));
    let mut wf = WFactors::new(ow1, ow2);
    let a_coeffs = bracket_coeffs(&mut ev, &p.u1, &p.v1, oy1)?;
    let b_coeffs = bracket_coeffs(&mut ev, &p.u2, &p.v2, oy2)?;
    let targets = p.target_vectors();
    for (al, av) in &a_coeffs {
        for (be, bv) in &b_coeffs {
            let zr = ev.substituted_bracket(av, bv, n)?;
            for t in &targets {
                let mut memo = GenJacobiMemo::default();
                for a in -n..=n {
                    for b in -n..=n {
                        for c in -n..=n {
                            let (lhs, rhs) = gen_jacobi_terms(&mut ev, &mut memo, (av, bv, &zr), t, (a, b, c))?;
                            compare_grouped(cmp, &mut wf, &[*al, *be, a, b, c], t, &lhs, &rhs)?;
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

#[derive(Default)]
struct GenJacobiMemo {
    ab: Products,
    ba: Products,
    rhs_z: HashMap<(i64, i64), FockVector>,
}

/// Both sides at `x0^a x1^b x2^c`, grouped by dilation factor, for fixed
/// `A = [Y[u1, y1] v1]_alpha`, `B = [Y[u2, y2] v2]_beta` and `Y[A, w] B`
/// substituted at `w = -log(1 - r)`.
fn gen_jacobi_terms(
    ev: &mut Evaluator,
    memo: &mut GenJacobiMemo,
    (av, bv, zr): (&FockVector, &FockVector, &Series<FockVector>),
    t: &FockVector,
    (a, b, c): (i64, i64, i64),
) -> SeriesResult<(WTerms, WTerms)> {
    let wt = weight(t);
    let nn = -a - 1;
    let mut lhs = WTerms::default();
    let kmax = c + wt;
    if kmax >= 0 {
        let coeffs = ev.one_minus_pow(nn, kmax)?;
        for (k, ck) in coeffs.iter().enumerate().take(kmax as usize + 1) {
            let k = k as i64;
            let (pp, q) = (nn - k - b, k - c);
            let vec = memo.ab.get(ev, (av, pp), (bv, q), t);
            lhs.add((nn - k - pp, k - q), vec, ck);
        }
    }
    let kmax = b + wt;
    if kmax >= 0 {
        let coeffs = ev.one_minus_pow(nn, kmax)?;
        let s = -sign(nn);
        for (k, dk) in coeffs.iter().enumerate().take(kmax as usize + 1) {
            let k = k as i64;
            let (pp, q) = (k - b, nn - k - c);
            let vec = memo.ba.get(ev, (bv, q), (av, pp), t);
            lhs.add((k - pp, nn - k - q), vec, &(dk * &s));
        }
    }
    let mut rhs = WTerms::default();
    let np = a + b;
    let q = -np - 1 - c;
    if let std::collections::hash_map::Entry::Vacant(e) = memo.rhs_z.entry((a, b)) {
        let z = ev.bracket_vector_at(zr, (a, b))?;
        e.insert(z);
    }
    let vec = ev.x(&memo.rhs_z[&(a, b)], q, t);
    rhs.add((np - a, -np - 1 - q), &vec, &Scalar::one());
    Ok((lhs, rhs))
}

/// The two sides of the Jacobi-type identity for `X` at `x0^a x1^b x2^c`,
/// applied to `t`.
pub fn new_jacobi_sides(
    u: &FockVector,
    v: &FockVector,
    t: &FockVector,
    (a, b, c): (i64, i64, i64),
) -> SeriesResult<(FockVector, FockVector)> {
    let mut ev = Evaluator::new();
    let zr = ev.substituted_bracket(u, v, a.max(0))?;
    Ok((ev.nj_lhs(u, v, t, (a, b, c))?, ev.nj_rhs(&zr, t, (a, b, c))?))
}

/// The two sides of the dilated Jacobi-type identity at
/// `y1^alpha y2^beta x0^a x1^b x2^c` as series in `(w1, w2)` through the
/// given orders.
#[allow(clippy::too_many_arguments)]
pub fn gen_jacobi_sides(
    (u1, v1, u2, v2): (&FockVector, &FockVector, &FockVector, &FockVector),
    t: &FockVector,
    (alpha, beta): (i64, i64),
    (a, b, c): (i64, i64, i64),
    (ow1, ow2): (i64, i64),
) -> SeriesResult<(Series<FockVector>, Series<FockVector>)> {
    let mut ev = Evaluator::new();
    let av = ev.cache.y_bracket(u1, v1, "y", alpha.max(0))?.coeff(&[alpha])?;
    let bv = ev.cache.y_bracket(u2, v2, "y", beta.max(0))?.coeff(&[beta])?;
    let zr = ev.substituted_bracket(&av, &bv, a.max(0))?;
    let (l, r) = gen_jacobi_terms(&mut ev, &mut GenJacobiMemo::default(), (&av, &bv, &zr), t, (a, b, c))?;
    let mut wf = WFactors::new(ow1, ow2);
    Ok((wf.expand(&l)?, wf.expand(&r)?))
}

/// Memoized `X(u)_p X(v)_q t` for fixed `u`, `v`, `t`.
#[derive(Default)]
struct Products {
    inner: HashMap<i64, FockVector>,
    outer: HashMap<(i64, i64), FockVector>,
}

impl Products {
    fn get(
        &mut self,
        ev: &mut Evaluator,
        (u, p): (&FockVector, i64),
        (v, q): (&FockVector, i64),
        t: &FockVector,
    ) -> &FockVector {
        if !self.outer.contains_key(&(p, q)) {
            let inner = self.inner.entry(q).or_insert_with(|| ev.x(v, q, t));
            let val = ev.x(u, p, inner);
            self.outer.insert((p, q), val);
        }
        &self.outer[&(p, q)]
    }
}

fn gen_comm(cmp: &mut Comparator, p: &TheoremParams) -> SeriesResult<()> {
    let mut ev = Evaluator::new();
    let n = p.x_window;
    let (oy1, oy2, ow1, ow2) = (p.order(0), p.order(1), p.order(2), p.order(3));
    let mut wf = WFactors::new(ow1, ow2);
    let a_coeffs = bracket_coeffs(&mut ev, &p.u1, &p.v1, oy1)?;
    let b_coeffs = bracket_coeffs(&mut ev, &p.u2, &p.v2, oy2)?;
    let targets = p.target_vectors();
    for (al, av) in &a_coeffs {
        for (be, bv) in &b_coeffs {
            let res = ev.bracket_residues(av, bv, n, None, &[("w1", ow1, false), ("w2", ow2, true)])?;
            for t in &targets {
                for (b, rb) in &res {
                    let b = *b;
                    let rb = rb.align_to(&["w1".to_string(), "w2".to_string()])?;
                    for c in -n..=n {
                        let mut lhs = WTerms::default();
                        lhs.add((b, c), &ev.comm_lhs(av, bv, t, b, c), &Scalar::one());
                        let lhs = wf.expand(&lhs)?;
                        let q = -b - c;
                        let mapped = map_vectors(&rb, |z| ev.x(z, q, t))?;
                        let rhs = mul(&exp_series("w2", &Scalar::from_int(-q), ow2), &mapped)?;
                        let rhs = rhs.align_to(&["w1".to_string(), "w2".to_string()])?;
                        compare_w_series(cmp, &[*al, *be, b, c], t, &lhs, &rhs, (ow1, ow2))?;
                    }
                }
            }
        }
    }
    Ok(())
}

/// Attach `Y[f(w), y] g(w)`-style brackets to every coefficient of `s`.
fn nest(
    ev: &mut Evaluator,
    s: &Series<FockVector>,
    y: &str,
    order: i64,
    f: impl Fn(&mut VertexCache, &FockVector, &str, i64) -> SeriesResult<Series<FockVector>>,
) -> SeriesResult<Series<FockVector>> {
    ev.cache.bracket_series(s, y, order, |c, w| f(c, w, y, order))
}

/// `exp(c y) f`, truncated so that the window of `f` in `y` is kept.
fn times_exp(f: &Series<FockVector>, y: &str, c: i64) -> SeriesResult<Series<FockVector>> {
    let w = f.window(y)?;
    mul(&exp_series(y, &Scalar::from_int(c), (w.high - w.low).max(0)), f)
}

/// `e^{sgn t d/dy} f`, with the shift variable `t` already present in `f`.
fn shift_into(
    f: &Series<FockVector>,
    y: &str,
    t: &str,
    order: i64,
    negative: bool,
) -> SeriesResult<Series<FockVector>> {
    let mut g = taylor_shift(f, y, "shift", order)?;
    if negative {
        g = g.flip_sign("shift")?;
    }
    identify(&g, t, "shift")
}

fn four_term(cmp: &mut Comparator, p: &TheoremParams) -> SeriesResult<()> {
    let mut ev = Evaluator::new();
    let n = p.x_window;
    let (o1, o2) = (p.order(0), p.order(1));
    let (u1, v1, u2, v2) = (&p.u1, &p.v1, &p.u2, &p.v2);
    let k = p.inner_order.unwrap_or_else(|| {
        [(v1, v2), (u1, v2), (u2, v1), (u2, u1)].iter().map(|(a, b)| weight(a) + weight(b)).max().unwrap_or(0) - 1
    });
    let names = ["y1".to_string(), "y2".to_string()];

    // Y[u2, y2] Y[u1, y1] Y[v1, t1] v2
    let i1 = ev.cache.y_bracket(v1, v2, "t1", k)?;
    let j1 = nest(&mut ev, &i1, "y1", o1 + k, |c, w, y, o| c.y_bracket(u1, w, y, o))?;
    let s1 = nest(&mut ev, &j1, "y2", o2, |c, w, y, o| c.y_bracket(u2, w, y, o))?;
    // Y[u2, y2] Y[v1, -y1] Y[u1, t2] v2
    let i2 = ev.cache.y_bracket(u1, v2, "t2", k)?;
    let j2 = nest(&mut ev, &i2, "y1", o1 + k, |c, w, y, o| c.y_bracket(v1, w, y, o))?.flip_sign("y1")?;
    let s2 = nest(&mut ev, &j2, "y2", o2, |c, w, y, o| c.y_bracket(u2, w, y, o))?;
    // Y[Y[u1, y1] Y[u2, t3] v1, y2] v2
    let i3 = ev.cache.y_bracket(u2, v1, "t3", k)?;
    let j3 = nest(&mut ev, &i3, "y1", o1, |c, w, y, o| c.y_bracket(u1, w, y, o))?;
    let s3 = nest(&mut ev, &j3, "y2", o2 + k, |c, w, y, o| c.y_bracket(w, v2, y, o))?;
    // Y[Y[Y[u2, t4] u1, y1] v1, y2 - y1] v2
    let i4 = ev.cache.y_bracket(u2, u1, "t4", k)?;
    let j4 = nest(&mut ev, &i4, "y1", o1, |c, w, y, o| c.y_bracket(w, v1, y, o))?;
    let m = o1 - j4.window("y1")?.low;
    let s4 = nest(&mut ev, &j4, "s", o2 + k + m, |c, w, y, o| c.y_bracket(w, v2, y, o))?;
    let s4 = taylor_shift(&s4.rename("s", "y2")?, "y2", "z", m)?.flip_sign("z")?;
    let s4 = identify(&s4, "y1", "z")?;

    let a_coeffs = bracket_coeffs(&mut ev, u1, v1, o1)?;
    let b_coeffs = bracket_coeffs(&mut ev, u2, v2, o2)?;

    for t in p.target_vectors() {
        for q in -2 * n..=2 * n {
            let m1 = map_vectors(&s1, |z| ev.x(z, q, &t))?;
            let m2 = map_vectors(&s2, |z| ev.x(z, q, &t))?;
            let m3 = map_vectors(&s3, |z| ev.x(z, q, &t))?;
            let m4 = map_vectors(&s4, |z| ev.x(z, q, &t))?;
            for b in -n..=n {
                let c = -q - b;
                if c < -n || c > n {
                    continue;
                }
                let r1 = times_exp(&m1, "t1", -b)?;
                let r1 = residue(&shift_into(&r1, "y1", "t1", k, false)?, "t1")?;
                let r2 = times_exp(&m2, "y1", b)?;
                let r2 = residue(&shift_into(&r2, "y1", "t2", k, true)?, "t2")?;
                let r3 = times_exp(&m3, "y2", -b)?;
                let r3 = residue(&shift_into(&r3, "y2", "t3", k, true)?, "t3")?;
                let r4 = times_exp(&times_exp(&m4, "y1", b)?, "y2", -b)?;
                let r4 = residue(&shift_into(&r4, "y2", "t4", k, true)?, "t4")?;
                let total = r1
                    .align_to(&names)?
                    .add(&r2.align_to(&names)?)?
                    .sub(&r3.align_to(&names)?)?
                    .sub(&r4.align_to(&names)?)?;
                for (al, av) in &a_coeffs {
                    for (be, bv) in &b_coeffs {
                        if !total.is_known(&[*al, *be]) {
                            return Err(SeriesError::WindowInsufficient(format!(
                                "four-term window misses y1^{al} y2^{be}"
                            )));
                        }
                        let lhs = ev.comm_lhs(av, bv, &t, b, c);
                        let rhs = total.coeff(&[*al, *be])?;
                        cmp.compare_vectors(&[*al, *be, b, c], &t, &lhs, &rhs);
                    }
                }
            }
        }
    }
    Ok(())
}

/// Regularized generating coefficient `G_{a,b}(n) v` via a shared cache.
fn gen_coeff(qc: &mut QuadCache, a: u32, b: u32, n: i64, v: &FockVector) -> FockVector {
    let c = sign((a + b) as i64) / (factorial(a) * factorial(b));
    let mut out = qc.apply(a, b, n, v).scaled(&c);
    if n == 0 {
        out.add_scaled(v, &regularized_scalar(a, b));
    }
    out
}

fn specialize(cmp: &mut Comparator, p: &TheoremParams) -> SeriesResult<()> {
    let n = p.x_window;
    let (oy1, oy2, ow1, ow2) = (p.order(0), p.order(1), p.order(2), p.order(3));
    let orders = [oy1 + ow1, ow1, oy2 + ow2, ow2].map(|o| o.max(0) as u32);
    let t1 = theorem1_check(orders, n, p.weight_cap);
    cmp.set_detail("theorem1-status", json!(t1.status.as_str()));
    cmp.set_detail("theorem1-compared", json!(t1.compared));
    if !t1.passed() {
        cmp.fail_with("generating-function commutator check did not pass");
    }

    let v0 = FockVector::from_parts(&[1]);
    let mut ev = Evaluator::new();
    let mut qc = QuadCache::new();
    let a_coeffs = bracket_coeffs(&mut ev, &v0, &v0, oy1)?;
    let b_coeffs = bracket_coeffs(&mut ev, &v0, &v0, oy2)?;
    let four = Scalar::from_int(4);
    for t in p.target_vectors() {
        for (al, av) in &a_coeffs {
            for (be, bv) in &b_coeffs {
                let res = ev.bracket_residues(av, bv, n, None, &[])?;
                let mut s = Series::zero(vec![VarWindow::open("x1", -n, n), VarWindow::open("x2", -n, n)])?;
                for (b, rb) in &res {
                    let z = rb.constant_term()?;
                    for c in -n..=n {
                        s.accumulate(vec![*b, c], &ev.x(&z, -b - c, &t))?;
                    }
                }
                let s = dilate(&dilate(&s, "x1", "w1", ow1)?, "x2", "w2", ow2)?;
                let s = s.align_to(&["x1".into(), "x2".into(), "w1".into(), "w2".into()])?;
                for b in -n..=n {
                    for c in -n..=n {
                        for g in 0..=ow1 {
                            for d in 0..=ow2 {
                                let gencomm = s.coeff(&[b, c, g, d])?;
                                let mut quad = FockVector::zero();
                                if *al >= 0 && *be >= 0 {
                                    for a1 in *al..=al + g {
                                        let b1 = g - (a1 - al);
                                        for a2 in *be..=be + d {
                                            let b2 = d - (a2 - be);
                                            let coef = binomial(a1, *al as u32) * binomial(a2, *be as u32) * &four;
                                            let (a1u, b1u, a2u, b2u) = (a1 as u32, b1 as u32, a2 as u32, b2 as u32);
                                            let gt = gen_coeff(&mut qc, a2u, b2u, -c, &t);
                                            let first = gen_coeff(&mut qc, a1u, b1u, -b, &gt);
                                            let gt = gen_coeff(&mut qc, a1u, b1u, -b, &t);
                                            let second = gen_coeff(&mut qc, a2u, b2u, -c, &gt);
                                            quad.add_scaled(&first.sub(&second), &coef);
                                        }
                                    }
                                }
                                cmp.compare_vectors(&[*al, *be, g, d, b, c], &t, &gencomm, &quad);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn bridge(cmp: &mut Comparator, p: &TheoremParams) -> SeriesResult<()> {
    let n = p.x_window;
    let (oy, ow) = (p.order(0), p.order(1));
    let v0 = FockVector::from_parts(&[1]);
    let mut ev = Evaluator::new();
    let mut qc = QuadCache::new();
    let z = ev.cache.y_bracket(&v0, &v0, "y", oy + ow)?;
    let zs = taylor_shift(&z, "y", "w", ow)?.flip_sign("w")?;
    let scalar = reg_inv_one_minus_exp("y", "w", oy + 1)?.derivative("y")?.neg();
    let names = ["y".to_string(), "w".to_string()];
    let two = Scalar::from_int(2);
    for t in p.target_vectors() {
        for pm in -n..=n {
            let mapped = map_vectors(&zs, |v| ev.x(v, pm, &t))?;
            let rhs = mul(&exp_series("w", &Scalar::from_int(-pm), ow), &mapped)?.align_to(&names)?;
            for y in -2..=oy {
                for w in 0..=ow {
                    let mut lhs = FockVector::zero();
                    if y >= 0 {
                        let g = qc.apply(y as u32, w as u32, pm, &t);
                        let c = sign(y + w) / (factorial(y as u32) * factorial(w as u32));
                        lhs.add_scaled(&g, &(&c * &two));
                    }
                    if pm == 0 {
                        lhs.add_scaled(&t, &scalar.coeff(&[y, w])?);
                    }
                    cmp.compare_vectors(&[y, w, pm], &t, &lhs, &rhs.coeff(&[y, w])?);
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(id: TheoremId) -> TheoremParams {
        TheoremParams { weight_cap: 2, x_window: 2, ..TheoremParams::default_for(id) }
    }

    #[test]
    fn new_jacobi_and_comm_small() {
        for id in [TheoremId::NewJacobi, TheoremId::Comm] {
            let r = theorem_check(&small(id));
            assert!(r.passed(), "{}", r.to_json_line());
        }
    }

    #[test]
    fn bridge_small() {
        let r = theorem_check(&small(TheoremId::Bridge));
        assert!(r.passed(), "{}", r.to_json_line());
    }

    #[test]
    fn generalized_small() {
        for id in [TheoremId::GenJacobi, TheoremId::GenComm] {
            let p = TheoremParams { weight_cap: 1, x_window: 1, ..TheoremParams::default_for(id) };
            let r = theorem_check(&p);
            assert!(r.passed(), "{}", r.to_json_line());
        }
    }

    #[test]
    fn dilated_identity_degenerates_at_vacuum() {
        let one = FockVector::vacuum();
        let (u1, u2) = (FockVector::omega(), FockVector::from_parts(&[1]));
        let t = FockVector::from_parts(&[2]);
        for (a, b, c) in [(0, 0, 0), (-1, 2, -1), (1, -2, 0), (2, 1, -3)] {
            let (nl, nr) = new_jacobi_sides(&u1, &u2, &t, (a, b, c)).unwrap();
            let (gl, gr) = gen_jacobi_sides((&u1, &one, &u2, &one), &t, (0, 0), (a, b, c), (0, 0)).unwrap();
            assert_eq!(nl, nr);
            assert_eq!(gl.coeff(&[0, 0]).unwrap(), nl);
            assert_eq!(gr.coeff(&[0, 0]).unwrap(), nr);
        }
    }

    #[test]
    fn four_term_small() {
        let p = TheoremParams { weight_cap: 1, x_window: 1, ..TheoremParams::default_for(TheoremId::FourTerm) };
        let r = theorem_check(&p);
        assert!(r.passed(), "{}", r.to_json_line());
    }

    #[test]
    fn specialize_small() {
        let p = TheoremParams { weight_cap: 1, x_window: 1, ..TheoremParams::default_for(TheoremId::Specialize) };
        let r = theorem_check(&p);
        assert!(r.passed(), "{}", r.to_json_line());
    }
}
