//! Exact multivariate truncated formal Laurent series.
//!
//! Every variable carries a [`VarWindow`]: coefficients with exponents inside
//! `[low, high]` are known exactly; outside that range they are *unknown*
//! unless the window is flagged as having known-zero tails (`zero_below`,
//! `zero_above`). A power series in `x` truncated at order `N` is therefore
//! `[0, N]` with `zero_below`, a polynomial is closed on both sides, and a
//! doubly infinite series such as the formal delta function is open on both
//! sides.
//!
//! The known region of a series is always a box (a product of per-variable
//! intervals). Every operation computes the largest box on which its output
//! is a complete, exact finite sum, and refuses products whose coefficients
//! would be infinite sums.

mod ops;

pub use ops::*;

use std::collections::BTreeMap;
use std::fmt::Debug;

use serde::Serialize;

use crate::scalar::Scalar;

/// Exponent bounds at or beyond this magnitude stand for +/- infinity.
const INF: i64 = 1 << 40;

fn is_inf(v: i64) -> bool {
    v.abs() >= INF / 2
}

fn clamp_inf(v: i64) -> i64 {
    v.clamp(-INF, INF)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SeriesError {
    #[error("variable sets differ: {0:?} vs {1:?}")]
    MismatchedVariables(Vec<String>, Vec<String>),
    #[error("ill-defined product: coefficients in variable {0} would be infinite sums")]
    IllDefinedProduct(String),
    #[error("window insufficient: {0}")]
    WindowInsufficient(String),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("variable {0} is already present")]
    DuplicateVariable(String),
    #[error("invalid window for {0}: low {1} > high {2}")]
    InvalidWindow(String, i64, i64),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type SeriesResult<T> = Result<T, SeriesError>;

/// Values that can sit in a series coefficient: scalars, or vectors that a
/// scalar can scale.
pub trait Coeff: Clone + Debug + PartialEq + Send + Sync {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign_ref(&mut self, other: &Self);
    fn scaled(&self, s: &Scalar) -> Self;

    fn negated(&self) -> Self {
        self.scaled(&Scalar::from_int(-1))
    }

    /// Accumulate `s * other` into `self`.
    fn add_scaled(&mut self, other: &Self, s: &Scalar) {
        self.add_assign_ref(&other.scaled(s));
    }
}

impl Coeff for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn scaled(&self, s: &Scalar) -> Self {
        self * s
    }
    fn add_scaled(&mut self, other: &Self, s: &Scalar) {
        *self += &(other * s);
    }
}

/// Exponent window of one formal variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct VarWindow {
    pub name: String,
    pub low: i64,
    pub high: i64,
    /// Coefficients below `low` are known to vanish.
    pub zero_below: bool,
    /// Coefficients above `high` are known to vanish.
    pub zero_above: bool,
}

impl VarWindow {
    /// Doubly open window: nothing known outside `[low, high]`.
    pub fn open(name: &str, low: i64, high: i64) -> Self {
        VarWindow { name: name.to_string(), low, high, zero_below: false, zero_above: false }
    }

    /// Power series truncated at `high`.
    pub fn power(name: &str, high: i64) -> Self {
        VarWindow { name: name.to_string(), low: 0, high, zero_below: true, zero_above: false }
    }

    /// Laurent series with lowest exponent `low`, truncated at `high`.
    pub fn laurent(name: &str, low: i64, high: i64) -> Self {
        VarWindow { name: name.to_string(), low, high, zero_below: true, zero_above: false }
    }

    /// Finite support inside `[low, high]`; everything is known.
    pub fn exact(name: &str, low: i64, high: i64) -> Self {
        VarWindow { name: name.to_string(), low, high, zero_below: true, zero_above: true }
    }

    pub fn is_valid(&self) -> bool {
        self.low <= self.high
    }

    /// Lowest exponent whose coefficient is known (-INF when unbounded).
    fn known_lo(&self) -> i64 {
        if self.zero_below {
            -INF
        } else {
            self.low
        }
    }

    fn known_hi(&self) -> i64 {
        if self.zero_above {
            INF
        } else {
            self.high
        }
    }

    /// Lowest exponent whose coefficient may be nonzero.
    fn possible_lo(&self) -> i64 {
        if self.zero_below {
            self.low
        } else {
            -INF
        }
    }

    fn possible_hi(&self) -> i64 {
        if self.zero_above {
            self.high
        } else {
            INF
        }
    }

    pub fn is_known(&self, e: i64) -> bool {
        e >= self.known_lo() && e <= self.known_hi()
    }

    pub fn stores(&self, e: i64) -> bool {
        e >= self.low && e <= self.high
    }

    /// Rebuild a window from a known interval and a possible-support interval.
    fn from_intervals(name: &str, known: (i64, i64), possible: (i64, i64)) -> SeriesResult<Self> {
        let (klo, khi) = known;
        let (plo, phi) = possible;
        let (low, zero_below) = if !is_inf(plo) && klo <= plo { (plo, true) } else { (klo, false) };
        let (high, zero_above) = if !is_inf(phi) && khi >= phi { (phi, true) } else { (khi, false) };
        if is_inf(low) || is_inf(high) {
            return Err(SeriesError::WindowInsufficient(format!("unbounded window for {name}")));
        }
        if low > high {
            // everything known and zero is fine; otherwise nothing is known
            if zero_below && zero_above {
                return Ok(VarWindow { name: name.to_string(), low: plo, high: plo, zero_below, zero_above });
            }
            return Err(SeriesError::WindowInsufficient(format!("empty window for {name} ([{low}, {high}])")));
        }
        Ok(VarWindow { name: name.to_string(), low, high, zero_below, zero_above })
    }

    fn intersect(&self, other: &VarWindow) -> SeriesResult<VarWindow> {
        let known = (self.known_lo().max(other.known_lo()), self.known_hi().min(other.known_hi()));
        let possible = (self.possible_lo().min(other.possible_lo()), self.possible_hi().max(other.possible_hi()));
        VarWindow::from_intervals(&self.name, known, possible)
    }

    /// Window of the product in this variable, or an error if the
    /// convolution would run over infinitely many terms.
    fn product(&self, other: &VarWindow) -> SeriesResult<VarWindow> {
        let (pa_lo, pa_hi) = (self.possible_lo(), self.possible_hi());
        let (pb_lo, pb_hi) = (other.possible_lo(), other.possible_hi());
        let bounded_below = !is_inf(pa_lo) || !is_inf(pb_hi);
        let bounded_above = !is_inf(pa_hi) || !is_inf(pb_lo);
        if !(bounded_below && bounded_above) {
            return Err(SeriesError::IllDefinedProduct(self.name.clone()));
        }
        let mut lo = -INF;
        let mut hi = INF;
        if !self.zero_below {
            lo = lo.max(clamp_inf(self.low + pb_hi));
        }
        if !other.zero_below {
            lo = lo.max(clamp_inf(other.low + pa_hi));
        }
        if !self.zero_above {
            hi = hi.min(clamp_inf(self.high + pb_lo));
        }
        if !other.zero_above {
            hi = hi.min(clamp_inf(other.high + pa_lo));
        }
        let possible = (clamp_inf(pa_lo + pb_lo), clamp_inf(pa_hi + pb_hi));
        VarWindow::from_intervals(&self.name, (lo, hi), possible)
    }
}

/// A multivariate formal Laurent series with coefficients in `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series<C> {
    vars: Vec<VarWindow>,
    terms: BTreeMap<Vec<i64>, C>,
}

/// One stored coefficient, in the serialized form used by reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SerializedTerm<V> {
    pub exponents: Vec<i64>,
    pub value: V,
}

impl<C: Coeff> Series<C> {
    pub fn zero(vars: Vec<VarWindow>) -> SeriesResult<Self> {
        for (i, v) in vars.iter().enumerate() {
            if !v.is_valid() {
                return Err(SeriesError::InvalidWindow(v.name.clone(), v.low, v.high));
            }
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(SeriesError::DuplicateVariable(v.name.clone()));
            }
        }
        Ok(Series { vars, terms: BTreeMap::new() })
    }

    /// Series with no variables holding a single value.
    pub fn constant(c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        Series { vars: Vec::new(), terms }
    }

    pub fn from_terms<I>(vars: Vec<VarWindow>, terms: I) -> SeriesResult<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, C)>,
    {
        let mut s = Series::zero(vars)?;
        for (e, c) in terms {
            s.accumulate(e, &c)?;
        }
        Ok(s)
    }

    pub fn vars(&self) -> &[VarWindow] {
        &self.vars
    }

    pub fn var_names(&self) -> Vec<String> {
        self.vars.iter().map(|v| v.name.clone()).collect()
    }

    pub fn window(&self, name: &str) -> SeriesResult<&VarWindow> {
        self.vars.iter().find(|v| v.name == name).ok_or_else(|| SeriesError::UnknownVariable(name.to_string()))
    }

    pub fn var_index(&self, name: &str) -> SeriesResult<usize> {
        self.vars.iter().position(|v| v.name == name).ok_or_else(|| SeriesError::UnknownVariable(name.to_string()))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_known(&self, exps: &[i64]) -> bool {
        exps.len() == self.vars.len() && self.vars.iter().zip(exps).all(|(w, &e)| w.is_known(e))
    }

    /// Exact coefficient at `exps`, or an error if it lies outside the known region.
    pub fn coeff(&self, exps: &[i64]) -> SeriesResult<C> {
        if exps.len() != self.vars.len() {
            return Err(SeriesError::Precondition(format!(
                "exponent vector of length {} for {} variables",
                exps.len(),
                self.vars.len()
            )));
        }
        if !self.is_known(exps) {
            return Err(SeriesError::WindowInsufficient(format!(
                "coefficient {exps:?} outside windows {:?}",
                self.vars
            )));
        }
        Ok(self.terms.get(exps).cloned().unwrap_or_else(C::zero))
    }

    /// Add `c` at `exps`; exponents outside the stored box are rejected
    /// unless `c` is zero.
    pub fn accumulate(&mut self, exps: Vec<i64>, c: &C) -> SeriesResult<()> {
        if c.is_zero() {
            return Ok(());
        }
        if exps.len() != self.vars.len() || !self.vars.iter().zip(&exps).all(|(w, &e)| w.stores(e)) {
            return Err(SeriesError::Precondition(format!("exponent {exps:?} outside windows {:?}", self.vars)));
        }
        self.accumulate_unchecked(exps, c);
        Ok(())
    }

    fn accumulate_unchecked(&mut self, exps: Vec<i64>, c: &C) {
        match self.terms.get_mut(&exps) {
            Some(slot) => {
                slot.add_assign_ref(c);
                if slot.is_zero() {
                    self.terms.remove(&exps);
                }
            }
            None => {
                if !c.is_zero() {
                    self.terms.insert(exps, c.clone());
                }
            }
        }
    }

    fn in_stored_box(vars: &[VarWindow], exps: &[i64]) -> bool {
        vars.iter().zip(exps).all(|(w, &e)| w.stores(e))
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Series<D> {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let d = f(c);
            if !d.is_zero() {
                terms.insert(e.clone(), d);
            }
        }
        Series { vars: self.vars.clone(), terms }
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        self.map_coeffs(|c| c.scaled(s))
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.negated())
    }

    /// Reorder and extend to the given variable list. Variables not present
    /// in `self` are added with exact window `[0, 0]`.
    pub fn align_to(&self, names: &[String]) -> SeriesResult<Self> {
        for v in &self.vars {
            if !names.contains(&v.name) {
                return Err(SeriesError::MismatchedVariables(self.var_names(), names.to_vec()));
            }
        }
        let perm: Vec<Option<usize>> = names.iter().map(|n| self.vars.iter().position(|v| &v.name == n)).collect();
        let vars = names
            .iter()
            .zip(&perm)
            .map(|(n, p)| match p {
                Some(i) => self.vars[*i].clone(),
                None => VarWindow::exact(n, 0, 0),
            })
            .collect();
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let ne: Vec<i64> = perm.iter().map(|p| p.map_or(0, |i| e[i])).collect();
            terms.insert(ne, c.clone());
        }
        Ok(Series { vars, terms })
    }

    fn require_same_vars<D>(&self, other: &Series<D>) -> SeriesResult<()> {
        let a: Vec<&str> = self.vars.iter().map(|v| v.name.as_str()).collect();
        let b: Vec<&str> = other.vars.iter().map(|v| v.name.as_str()).collect();
        if a != b {
            return Err(SeriesError::MismatchedVariables(
                a.iter().map(|s| s.to_string()).collect(),
                b.iter().map(|s| s.to_string()).collect(),
            ));
        }
        Ok(())
    }

    /// Coefficientwise sum; the result window is the per-variable
    /// intersection of the known regions.
    pub fn add(&self, other: &Self) -> SeriesResult<Self> {
        self.require_same_vars(other)?;
        let vars = self.vars.iter().zip(&other.vars).map(|(a, b)| a.intersect(b)).collect::<SeriesResult<Vec<_>>>()?;
        let mut out = Series { vars, terms: BTreeMap::new() };
        for (e, c) in self.terms.iter().chain(other.terms.iter()) {
            if Self::in_stored_box(&out.vars, e) {
                out.accumulate_unchecked(e.clone(), c);
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> SeriesResult<Self> {
        self.add(&other.neg())
    }

    /// Sum of two series over possibly different variable sets.
    pub fn add_aligned(&self, other: &Self) -> SeriesResult<Self> {
        let names = union_names(&self.var_names(), &other.var_names());
        self.align_to(&names)?.add(&other.align_to(&names)?)
    }

    /// Restrict the known window of `var` to `[lo, hi]`.
    pub fn truncate(&self, var: &str, lo: i64, hi: i64) -> SeriesResult<Self> {
        let i = self.var_index(var)?;
        let w = &self.vars[i];
        let known = (w.known_lo().max(lo), w.known_hi().min(hi));
        let possible = (w.possible_lo(), w.possible_hi());
        let nw = VarWindow::from_intervals(var, known, possible)?;
        let mut vars = self.vars.clone();
        vars[i] = nw;
        let terms =
            self.terms.iter().filter(|(e, _)| vars[i].stores(e[i])).map(|(e, c)| (e.clone(), c.clone())).collect();
        Ok(Series { vars, terms })
    }

    /// Partial derivative with respect to `var`.
    pub fn derivative(&self, var: &str) -> SeriesResult<Self> {
        let i = self.var_index(var)?;
        let mut vars = self.vars.clone();
        // the constant term is killed, so a power series stays one
        if !(vars[i].zero_below && vars[i].low == 0 && vars[i].high > 0) {
            vars[i].low -= 1;
        }
        vars[i].high -= 1;
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[i] -= 1;
            terms.insert(ne, c.scaled(&Scalar::from_int(e[i])));
        }
        Ok(Series { vars, terms })
    }

    /// The Euler operator `x d/dx`.
    pub fn euler(&self, var: &str) -> SeriesResult<Self> {
        let i = self.var_index(var)?;
        let mut out = self.clone();
        out.terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[i] != 0)
            .map(|(e, c)| (e.clone(), c.scaled(&Scalar::from_int(e[i]))))
            .collect();
        Ok(out)
    }

    /// Substitute `var -> -var`.
    pub fn flip_sign(&self, var: &str) -> SeriesResult<Self> {
        let i = self.var_index(var)?;
        let mut out = self.clone();
        for (e, c) in out.terms.iter_mut() {
            if e[i] % 2 != 0 {
                *c = c.negated();
            }
        }
        Ok(out)
    }

    pub fn rename(&self, var: &str, new_name: &str) -> SeriesResult<Self> {
        let i = self.var_index(var)?;
        if var != new_name && self.vars.iter().any(|v| v.name == new_name) {
            return Err(SeriesError::DuplicateVariable(new_name.to_string()));
        }
        let mut out = self.clone();
        out.vars[i].name = new_name.to_string();
        Ok(out)
    }

    /// Coefficient of `var^e`, as a series in the remaining variables.
    pub fn coeff_in(&self, var: &str, e: i64) -> SeriesResult<Self> {
        let i = self.var_index(var)?;
        if !self.vars[i].is_known(e) {
            return Err(SeriesError::WindowInsufficient(format!(
                "exponent {e} of {var} outside window [{}, {}]",
                self.vars[i].low, self.vars[i].high
            )));
        }
        let mut vars = self.vars.clone();
        vars.remove(i);
        let mut terms = BTreeMap::new();
        for (ex, c) in &self.terms {
            if ex[i] == e {
                let mut ne = ex.clone();
                ne.remove(i);
                terms.insert(ne, c.clone());
            }
        }
        Ok(Series { vars, terms })
    }

    /// Multiply by the monomial `var^shift`.
    pub fn shift(&self, var: &str, shift: i64) -> SeriesResult<Self> {
        let i = self.var_index(var)?;
        let mut vars = self.vars.clone();
        vars[i].low += shift;
        vars[i].high += shift;
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut ne = e.clone();
                ne[i] += shift;
                (ne, c.clone())
            })
            .collect();
        Ok(Series { vars, terms })
    }

    /// Add a fresh variable with exact window `[0, 0]`.
    pub fn with_var(&self, name: &str) -> SeriesResult<Self> {
        if self.vars.iter().any(|v| v.name == name) {
            return Err(SeriesError::DuplicateVariable(name.to_string()));
        }
        let mut names = self.var_names();
        names.push(name.to_string());
        self.align_to(&names)
    }

    /// The value of a series with no variables (or the zero-exponent term).
    pub fn constant_term(&self) -> SeriesResult<C> {
        let z = vec![0; self.vars.len()];
        self.coeff(&z)
    }

    /// Stored terms in serialized form.
    pub fn serialize_terms(&self) -> Vec<SerializedTerm<C>> {
        self.terms.iter().map(|(e, c)| SerializedTerm { exponents: e.clone(), value: c.clone() }).collect()
    }

    /// Every stored coefficient is zero inside the known window.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl Series<Scalar> {
    /// Single monomial `c * prod vars^exps` with exact windows.
    pub fn monomial(names: &[&str], exps: &[i64], c: Scalar) -> Self {
        let vars = names.iter().zip(exps).map(|(n, &e)| VarWindow::exact(n, e, e)).collect();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps.to_vec(), c);
        }
        Series { vars, terms }
    }

    /// Serialized terms with scalar strings, as used in reports.
    pub fn to_json_terms(&self) -> Vec<SerializedTerm<String>> {
        self.terms.iter().map(|(e, c)| SerializedTerm { exponents: e.clone(), value: c.to_string() }).collect()
    }
}

pub(crate) fn union_names(a: &[String], b: &[String]) -> Vec<String> {
    let mut names = a.to_vec();
    for n in b {
        if !names.contains(n) {
            names.push(n.clone());
        }
    }
    names
}

/// Product of a scalar series and a series with arbitrary coefficients.
///
/// Variables are unified (those of `a` first). The product is refused when
/// some coefficient would be an infinite sum, e.g. two series that are both
/// doubly infinite in the same variable.
pub fn mul<C: Coeff>(a: &Series<Scalar>, b: &Series<C>) -> SeriesResult<Series<C>> {
    let names = union_names(&a.var_names(), &b.var_names());
    let a = a.align_to(&names)?;
    let b = b.align_to(&names)?;
    let vars = a.vars.iter().zip(&b.vars).map(|(x, y)| x.product(y)).collect::<SeriesResult<Vec<_>>>()?;
    let mut out: Series<C> = Series { vars, terms: BTreeMap::new() };
    let n = names.len();
    let mut buf = vec![0i64; n];
    for (ea, ca) in &a.terms {
        for (eb, cb) in &b.terms {
            let mut inside = true;
            for k in 0..n {
                buf[k] = ea[k] + eb[k];
                if !out.vars[k].stores(buf[k]) {
                    inside = false;
                    break;
                }
            }
            if inside {
                let v = cb.scaled(ca);
                out.accumulate_unchecked(buf.clone(), &v);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn poly(var: &str, coeffs: &[(i64, i64)]) -> Series<Scalar> {
        let lo = coeffs.iter().map(|c| c.0).min().unwrap();
        let hi = coeffs.iter().map(|c| c.0).max().unwrap();
        Series::from_terms(vec![VarWindow::exact(var, lo, hi)], coeffs.iter().map(|&(e, c)| (vec![e], s(c)))).unwrap()
    }

    #[test]
    fn add_polynomials() {
        let a = poly("x", &[(0, 1), (1, 1)]);
        let b = poly("x", &[(0, -1), (1, 1)]);
        let c = a.add(&b).unwrap();
        assert_eq!(c.coeff(&[1]).unwrap(), s(2));
        assert_eq!(c.coeff(&[0]).unwrap(), s(0));
        assert_eq!(c.num_terms(), 1);
    }

    #[test]
    fn add_intersects_windows() {
        let a: Series<Scalar> = Series::zero(vec![VarWindow::open("x", -2, 2)]).unwrap();
        let b: Series<Scalar> = Series::zero(vec![VarWindow::open("x", 0, 4)]).unwrap();
        let c = a.add(&b).unwrap();
        let w = c.window("x").unwrap();
        assert_eq!((w.low, w.high), (0, 2));
    }

    #[test]
    fn add_rejects_mismatched_variables() {
        let a = poly("x", &[(0, 1)]);
        let b = poly("y", &[(0, 1)]);
        assert!(matches!(a.add(&b), Err(SeriesError::MismatchedVariables(..))));
    }

    #[test]
    fn mul_polynomials() {
        let a = poly("x", &[(0, 1), (1, 1)]);
        let b = poly("x", &[(0, 1), (1, -1)]);
        let c = mul(&a, &b).unwrap();
        assert_eq!(c.coeff(&[0]).unwrap(), s(1));
        assert_eq!(c.coeff(&[1]).unwrap(), s(0));
        assert_eq!(c.coeff(&[2]).unwrap(), s(-1));
        assert_eq!(c.coeff(&[7]).unwrap(), s(0));
    }

    #[test]
    fn geometric_times_one_minus_x_telescopes() {
        let n = 6;
        let geo = Series::from_terms(vec![VarWindow::power("x", n)], (0..=n).map(|k| (vec![k], s(1)))).unwrap();
        let lin = Series::from_terms(vec![VarWindow::power("x", n)], vec![(vec![0], s(1)), (vec![1], s(-1))]).unwrap();
        let p = mul(&geo, &lin).unwrap();
        let w = p.window("x").unwrap();
        assert_eq!((w.low, w.high), (0, n));
        assert_eq!(p.coeff(&[0]).unwrap(), s(1));
        for k in 1..=n {
            assert_eq!(p.coeff(&[k]).unwrap(), s(0));
        }
        assert!(p.coeff(&[n + 1]).is_err());
    }

    #[test]
    fn doubly_infinite_product_is_refused() {
        let d = Series::from_terms(vec![VarWindow::open("x", -3, 3)], (-3..=3).map(|k| (vec![k], s(1)))).unwrap();
        assert!(matches!(mul(&d, &d), Err(SeriesError::IllDefinedProduct(_))));
    }

    #[test]
    fn open_times_polynomial_shrinks_window() {
        let d = Series::from_terms(vec![VarWindow::open("x", -3, 3)], (-3..=3).map(|k| (vec![k], s(1)))).unwrap();
        let p = poly("x", &[(0, 1), (1, -1)]);
        let r = mul(&p, &d).unwrap();
        let w = r.window("x").unwrap();
        assert_eq!((w.low, w.high), (-2, 3));
        for k in -2..=3 {
            assert_eq!(r.coeff(&[k]).unwrap(), s(0));
        }
    }

    #[test]
    fn derivative_and_coeff_in() {
        let a = Series::from_terms(
            vec![VarWindow::exact("x", -1, 2), VarWindow::power("y", 3)],
            vec![(vec![-1, 0], s(1)), (vec![2, 1], s(3))],
        )
        .unwrap();
        let d = a.derivative("x").unwrap();
        assert_eq!(d.coeff(&[-2, 0]).unwrap(), s(-1));
        assert_eq!(d.coeff(&[1, 1]).unwrap(), s(6));
        let c = a.coeff_in("x", -1).unwrap();
        assert_eq!(c.coeff(&[0]).unwrap(), s(1));
        assert!(a.coeff_in("y", 5).is_err());
    }
}
