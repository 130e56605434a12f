//! The Fock space `S = C[h(-1), h(-2), ...]` of a single free boson.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::series::{mul, Coeff, Series, SeriesResult, VarWindow};

/// A basis monomial `h(-p1) h(-p2) ... 1`, stored as parts in descending order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn vacuum() -> Self {
        Partition(Vec::new())
    }

    /// Build from parts in any order; zero parts are rejected.
    pub fn new(mut parts: Vec<u32>) -> Option<Self> {
        if parts.contains(&0) {
            return None;
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Some(Partition(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn multiplicity(&self, part: u32) -> u32 {
        self.0.iter().filter(|&&p| p == part).count() as u32
    }

    fn with_part(&self, part: u32) -> Self {
        let mut parts = self.0.clone();
        let pos = parts.iter().position(|&p| p <= part).unwrap_or(parts.len());
        parts.insert(pos, part);
        Partition(parts)
    }

    fn without_part(&self, part: u32) -> Option<Self> {
        let pos = self.0.iter().position(|&p| p == part)?;
        let mut parts = self.0.clone();
        parts.remove(pos);
        Some(Partition(parts))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// All partitions of `n`, parts descending, in reverse lexicographic order.
pub fn partitions(n: u32) -> Vec<Partition> {
    fn rec(n: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if n == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        for p in (1..=n.min(max)).rev() {
            cur.push(p);
            rec(n - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Basis of the weight-`n` subspace, as vectors.
pub fn basis(n: u32) -> Vec<FockVector> {
    partitions(n).into_iter().map(FockVector::basis).collect()
}

/// Basis of all weights `0..=w`.
pub fn basis_up_to(w: u32) -> Vec<Partition> {
    (0..=w).flat_map(partitions).collect()
}

/// Dimension of the weight-`n` subspace: the number of partitions of `n`.
pub fn graded_dim(n: u32) -> u64 {
    // p(n) by the standard recurrence over parts
    let n = n as usize;
    let mut p = vec![0u64; n + 1];
    p[0] = 1;
    for k in 1..=n {
        for m in k..=n {
            p[m] += p[m - k];
        }
    }
    p[n]
}

/// `prod_{k=1}^{n} (1 - q^k)^{-1}` as a power series in `q` truncated at `n`.
pub fn partition_product_series(q: &str, n: i64) -> SeriesResult<Series<Scalar>> {
    let mut acc = Series::from_terms(vec![VarWindow::power(q, n)], vec![(vec![0], Scalar::one())])?;
    for k in 1..=n {
        let geo = Series::from_terms(vec![VarWindow::power(q, n)], (0..=n / k).map(|j| (vec![j * k], Scalar::one())))?;
        acc = mul(&acc, &geo)?;
    }
    Ok(acc)
}

/// Weight shift of the regularized grading: `chi(S) = q^{-1/24} sum_n dim S_n q^n`.
pub fn character_offset() -> Scalar {
    Scalar::ratio(-1, 24)
}

/// A finite linear combination of basis monomials.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct FockVector {
    terms: BTreeMap<Partition, Scalar>,
}

#[derive(Serialize, Deserialize)]
struct FockTerm {
    parts: Partition,
    coeff: Scalar,
}

impl FockVector {
    pub fn zero() -> Self {
        FockVector::default()
    }

    pub fn vacuum() -> Self {
        FockVector::basis(Partition::vacuum())
    }

    pub fn basis(p: Partition) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(p, Scalar::one());
        FockVector { terms }
    }

    /// Basis vector from parts in any order; panics on a zero part.
    pub fn from_parts(parts: &[u32]) -> Self {
        FockVector::basis(Partition::new(parts.to_vec()).expect("parts must be positive"))
    }

    /// The conformal vector `(1/2) h(-1)^2 1`.
    pub fn omega() -> Self {
        FockVector::from_parts(&[1, 1]).scaled(&Scalar::ratio(1, 2))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Partition, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, p: &Partition) -> Scalar {
        self.terms.get(p).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, p: Partition, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&p) {
            Some(slot) => {
                *slot += c;
                if slot.is_zero() {
                    self.terms.remove(&p);
                }
            }
            None => {
                self.terms.insert(p, c.clone());
            }
        }
    }

    pub fn add(&self, other: &FockVector) -> FockVector {
        let mut out = self.clone();
        out.add_assign_ref(other);
        out
    }

    pub fn sub(&self, other: &FockVector) -> FockVector {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::from_int(-1));
        out
    }

    /// Weight of a homogeneous vector; `None` for zero or mixed weights.
    pub fn weight(&self) -> Option<u32> {
        let mut ws = self.terms.keys().map(Partition::weight);
        let w = ws.next()?;
        ws.all(|x| x == w).then_some(w)
    }

    pub fn max_weight(&self) -> u32 {
        self.terms.keys().map(Partition::weight).max().unwrap_or(0)
    }

    /// Decomposition into weight-homogeneous parts, by increasing weight.
    pub fn weight_components(&self) -> Vec<(u32, FockVector)> {
        let mut out: BTreeMap<u32, FockVector> = BTreeMap::new();
        for (p, c) in &self.terms {
            out.entry(p.weight()).or_default().add_term(p.clone(), c);
        }
        out.into_iter().collect()
    }

    /// Apply a linear map defined on basis monomials.
    pub fn map_basis(&self, f: impl Fn(&Partition) -> FockVector) -> FockVector {
        let mut out = FockVector::zero();
        for (p, c) in &self.terms {
            out.add_scaled(&f(p), c);
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }
}

impl Coeff for FockVector {
    fn zero() -> Self {
        FockVector::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        for (p, c) in &other.terms {
            self.add_term(p.clone(), c);
        }
    }
    fn scaled(&self, s: &Scalar) -> Self {
        if s.is_zero() {
            return FockVector::zero();
        }
        FockVector { terms: self.terms.iter().map(|(p, c)| (p.clone(), c * s)).collect() }
    }
    fn add_scaled(&mut self, other: &Self, s: &Scalar) {
        if s.is_zero() {
            return;
        }
        for (p, c) in &other.terms {
            self.add_term(p.clone(), &(c * s));
        }
    }
}

impl fmt::Debug for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(p, c)| format!("{c}*{p:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Serialize for FockVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<FockTerm> =
            self.terms.iter().map(|(p, c)| FockTerm { parts: p.clone(), coeff: c.clone() }).collect();
        terms.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FockVector {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let terms = Vec::<FockTerm>::deserialize(deserializer)?;
        let mut v = FockVector::zero();
        for t in terms {
            let p = Partition::new(t.parts.0).ok_or_else(|| serde::de::Error::custom("zero part"))?;
            v.add_term(p, &t.coeff);
        }
        Ok(v)
    }
}

/// `h(n)` on a basis monomial.
pub fn h_basis(n: i64, p: &Partition) -> FockVector {
    match n.cmp(&0) {
        std::cmp::Ordering::Less => FockVector::basis(p.with_part((-n) as u32)),
        std::cmp::Ordering::Equal => FockVector::zero(),
        std::cmp::Ordering::Greater => {
            let k = n as u32;
            let m = p.multiplicity(k);
            match p.without_part(k) {
                Some(q) if m > 0 => {
                    let mut v = FockVector::zero();
                    v.add_term(q, &Scalar::from_int(n * m as i64));
                    v
                }
                _ => FockVector::zero(),
            }
        }
    }
}

/// The Heisenberg action: `h(n)` multiplies by `h(n)` for `n < 0`, acts as
/// `n d/dh(-n)` for `n > 0`, and `h(0)` acts as zero.
pub fn h_apply(n: i64, v: &FockVector) -> FockVector {
    if n == 0 {
        return FockVector::zero();
    }
    v.map_basis(|p| h_basis(n, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn action_examples() {
        let one = FockVector::vacuum();
        let h1 = h_apply(-1, &one);
        assert_eq!(h1, FockVector::from_parts(&[1]));
        assert_eq!(h_apply(1, &h1), one);
        assert!(h_apply(0, &h1).is_zero());
        let v = FockVector::from_parts(&[2, 2, 1]);
        assert_eq!(h_apply(2, &v), FockVector::from_parts(&[2, 1]).scaled(&Scalar::from_int(4)));
        assert!(h_apply(3, &v).is_zero());
    }

    #[test]
    fn weight_decomposition() {
        let v = FockVector::from_parts(&[1]).add(&FockVector::from_parts(&[2]));
        let comps = v.weight_components();
        assert_eq!(comps, vec![(1, FockVector::from_parts(&[1])), (2, FockVector::from_parts(&[2]))]);
        assert_eq!(FockVector::vacuum().weight_components(), vec![(0, FockVector::vacuum())]);
    }

    #[test]
    fn partition_counts() {
        assert_eq!(graded_dim(0), 1);
        assert_eq!(graded_dim(1), 1);
        assert_eq!(graded_dim(5), 7);
        assert_eq!(partitions(5).len(), 7);
        assert_eq!(partitions(4)[0].parts(), &[4]);
        assert_eq!(character_offset().to_string(), "-1/24");
    }

    #[test]
    fn serialization_shape() {
        let v = FockVector::from_parts(&[1, 3, 1]).scaled(&Scalar::ratio(-1, 2));
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"[{"parts":[3,1,1],"coeff":"-1/2"}]"#);
        let back: FockVector = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
