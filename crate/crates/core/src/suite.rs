//! The check catalog, run configuration and suite execution.

use std::path::PathBuf;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::fock::{basis_up_to, character_offset, graded_dim, h_apply, partition_product_series, FockVector};
use crate::generating::{theorem1_check, wick_check, wick_dilated_check};
use crate::regularized::{
    modified_virasoro_check, pure_monomial_check, quad_apply, virasoro_check, zeta_check, QuadraticOpSpec,
};
use crate::report::{run_check, CheckReport, Comparator, Format, Status, MAX_RECORDED_MISMATCHES};
use crate::scalar::Scalar;
use crate::series::residue_change_check;
use crate::series::{Coeff, Series, VarWindow};
use crate::voa::{axioms_check, jacobi_suite_check, standard_vectors};
use crate::voa::{theorem_check, TheoremId, TheoremParams};

/// Every check id, in emission order.
pub const CATALOG: [&str; 18] = [
    "HEISENBERG",
    "VIRASORO",
    "MODVIR",
    "BLOCH-MONOMIAL",
    "ZETA-TABLE",
    "GRADED-DIM",
    "WICK",
    "THEOREM1",
    "AXIOMS",
    "JACOBI",
    "NEWJACOBI",
    "COMM",
    "GENJACOBI",
    "GENCOMM",
    "FOURTERM",
    "SPECIALIZE",
    "BRIDGE",
    "RES-CHANGE",
];

/// Named groups of checks.
pub fn suite_members(name: &str) -> Option<Vec<&'static str>> {
    match name {
        "core" => Some(vec!["HEISENBERG", "VIRASORO", "MODVIR", "GRADED-DIM"]),
        "zeta" => Some(vec!["ZETA-TABLE"]),
        "regularized" => Some(vec!["VIRASORO", "MODVIR", "BLOCH-MONOMIAL", "ZETA-TABLE", "WICK", "THEOREM1"]),
        "voa" => Some(vec![
            "AXIOMS",
            "JACOBI",
            "NEWJACOBI",
            "COMM",
            "GENJACOBI",
            "GENCOMM",
            "FOURTERM",
            "SPECIALIZE",
            "BRIDGE",
        ]),
        "all" => Some(CATALOG.to_vec()),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("unknown suite or check id {0:?}")]
    UnknownSelection(String),
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("line {line}: expected key=value, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("invalid value {value:?} for {key}: {reason}")]
    InvalidValue { key: String, value: String, reason: String },
}

/// Settings for one `verify` run. Unset bounds use each check's defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Check ids in catalog order, deduplicated.
    pub selection: Vec<&'static str>,
    pub weight_cap: Option<u32>,
    pub x_window: Option<i64>,
    /// Per-variable orders; a shorter list repeats its last entry.
    pub y_orders: Vec<i64>,
    pub mode_range: Option<i64>,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
    /// Report wall-clock times instead of zero.
    pub timing: bool,
}

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const RES_CHANGE_INSTANCES: usize = 50;

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            selection: Vec::new(),
            weight_cap: None,
            x_window: None,
            y_orders: Vec::new(),
            mode_range: None,
            seed: DEFAULT_SEED,
            format: Format::JsonLines,
            out: None,
            timing: false,
        }
    }
}

fn invalid(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue { key: key.to_string(), value: value.to_string(), reason: reason.into() }
}

fn parse_bound<T: TryFrom<i64>>(key: &str, value: &str) -> Result<T, ConfigError> {
    let v: i64 = value.trim().parse().map_err(|_| invalid(key, value, "not an integer"))?;
    if v < 0 {
        return Err(invalid(key, value, "must be non-negative"));
    }
    T::try_from(v).map_err(|_| invalid(key, value, "out of range"))
}

/// Resolve a comma-separated list of suite names and check ids.
pub fn parse_selection(text: &str) -> Result<Vec<&'static str>, ConfigError> {
    let mut picked = Vec::new();
    for token in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if let Some(members) = suite_members(&token.to_ascii_lowercase()) {
            picked.extend(members);
            continue;
        }
        let upper = token.to_ascii_uppercase();
        match CATALOG.iter().find(|id| **id == upper) {
            Some(id) => picked.push(*id),
            None => return Err(ConfigError::UnknownSelection(token.to_string())),
        }
    }
    Ok(CATALOG.iter().copied().filter(|id| picked.contains(id)).collect())
}

impl RunConfig {
    /// Set one key; the same keys are accepted in config files.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key {
            "suite" | "select" => self.selection = parse_selection(value)?,
            "weight-cap" => self.weight_cap = Some(parse_bound(key, value)?),
            "x-window" => self.x_window = Some(parse_bound(key, value)?),
            "y-order" => {
                self.y_orders = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| parse_bound(key, s))
                    .collect::<Result<_, _>>()?
            }
            "mode-range" => self.mode_range = Some(parse_bound(key, value)?),
            "seed" => self.seed = value.parse().map_err(|_| invalid(key, value, "not an unsigned integer"))?,
            "format" => self.format = value.parse().map_err(|e: String| invalid(key, value, e))?,
            "out" => self.out = Some(PathBuf::from(value)),
            "timing" => self.timing = value.parse().map_err(|_| invalid(key, value, "expected true or false"))?,
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Apply a flat `key=value` file. Blank lines and `#` comments are ignored.
    pub fn apply_file_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) =
                line.split_once('=').ok_or_else(|| ConfigError::Syntax { line: i + 1, text: raw.to_string() })?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    /// `defaults` padded or overridden by the configured orders.
    fn orders_or(&self, defaults: &[i64]) -> Vec<i64> {
        match self.y_orders.last() {
            None => defaults.to_vec(),
            Some(&last) => (0..defaults.len()).map(|i| self.y_orders.get(i).copied().unwrap_or(last)).collect(),
        }
    }

    fn weight(&self, default: u32) -> u32 {
        self.weight_cap.unwrap_or(default)
    }

    fn window(&self, default: i64) -> i64 {
        self.x_window.unwrap_or(default)
    }

    fn modes(&self, default: i64) -> i64 {
        self.mode_range.unwrap_or(default)
    }
}

/// Run the selected checks; reports come back in catalog order.
pub fn run_suite(config: &RunConfig) -> Vec<CheckReport> {
    config.selection.par_iter().map(|id| run_one(id, config)).collect()
}

/// Run a single catalog entry.
pub fn run_one(id: &str, cfg: &RunConfig) -> CheckReport {
    match id {
        "HEISENBERG" => heisenberg_check(cfg.modes(5), cfg.weight(8)),
        "VIRASORO" => virasoro_range_check(cfg.modes(3), cfg.weight(10), false),
        "MODVIR" => virasoro_range_check(cfg.modes(3), cfg.weight(10), true),
        "BLOCH-MONOMIAL" => pure_monomial_suite(2, cfg.modes(4).max(1)),
        "ZETA-TABLE" => zeta_check(cfg.modes(8).max(2) as usize, 3),
        "GRADED-DIM" => graded_dim_check(cfg.modes(30) as u32),
        "WICK" => {
            let n = cfg.window(3);
            let w = cfg.weight(4);
            let order = cfg.orders_or(&[2])[0];
            let parts = vec![wick_check(n, w), wick_dilated_check(n, w, order)];
            merge_reports("WICK", json!({ "x-window": n, "weight-cap": w, "y-order": order }), parts, Value::Null)
        }
        "THEOREM1" => {
            let o = cfg.orders_or(&[2, 2, 2, 2]);
            theorem1_check([o[0] as u32, o[1] as u32, o[2] as u32, o[3] as u32], cfg.window(3), cfg.weight(6))
        }
        "AXIOMS" => axioms_check(cfg.weight(3), cfg.window(3)),
        "JACOBI" => jacobi_suite_check(&standard_vectors(), cfg.weight(4), cfg.window(3)),
        "RES-CHANGE" => residue_change_suite(cfg.seed, RES_CHANGE_INSTANCES),
        other => match TheoremId::parse(other) {
            Some(t) => {
                let mut p = TheoremParams::default_for(t);
                p.weight_cap = cfg.weight(p.weight_cap);
                p.x_window = cfg.window(p.x_window);
                p.orders = cfg.orders_or(&p.orders);
                theorem_check(&p)
            }
            None => {
                let mut cmp = Comparator::new();
                cmp.fail_with(format!("unknown check id {other:?}"));
                cmp.into_report(other, Value::Null, Instant::now())
            }
        },
    }
}

/// Combine sub-reports into one; the worst status wins.
pub fn merge_reports(id: &str, params: Value, parts: Vec<CheckReport>, details: Value) -> CheckReport {
    let mut out = CheckReport {
        check_id: id.to_string(),
        params,
        status: Status::Pass,
        compared: 0,
        mismatch_count: 0,
        mismatches: Vec::new(),
        details,
        error: None,
        elapsed_ms: 0,
    };
    for p in parts {
        out.compared += p.compared;
        out.mismatch_count += p.mismatch_count;
        out.elapsed_ms += p.elapsed_ms;
        let room = MAX_RECORDED_MISMATCHES.saturating_sub(out.mismatches.len());
        out.mismatches.extend(p.mismatches.into_iter().take(room));
        out.status = match (out.status, p.status) {
            (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
            (Status::WindowInsufficient, _) | (_, Status::WindowInsufficient) => Status::WindowInsufficient,
            _ => Status::Pass,
        };
        if out.error.is_none() {
            out.error = p.error.map(|e| format!("{}: {e}", p.check_id));
        }
    }
    out
}

/// `[h(m), h(n)] = m delta_{m+n,0}` on every basis vector of weight `<= w`.
pub fn heisenberg_check(range: i64, w: u32) -> CheckReport {
    run_check("HEISENBERG", json!({ "mode-range": range, "weight-cap": w }), |cmp| {
        for p in basis_up_to(w) {
            let b = FockVector::basis(p);
            for m in -range..=range {
                for n in -range..=range {
                    let lhs = h_apply(m, &h_apply(n, &b)).sub(&h_apply(n, &h_apply(m, &b)));
                    let rhs = if m + n == 0 { b.scaled(&Scalar::from_int(m)) } else { FockVector::zero() };
                    cmp.compare_vectors(&[m, n], &b, &lhs, &rhs);
                }
            }
        }
        Ok(())
    })
}

/// Bracket check over all `m, n` in `[-range, range]`; the regularized
/// variant also checks `Lbar(0) 1 = -1/24`.
pub fn virasoro_range_check(range: i64, w: u32, regularized: bool) -> CheckReport {
    let pairs: Vec<(i64, i64)> = (-range..=range).flat_map(|m| (-range..=range).map(move |n| (m, n))).collect();
    let check = if regularized { modified_virasoro_check } else { virasoro_check };
    let parts: Vec<CheckReport> = pairs.par_iter().map(|&(m, n)| check(m, n, w)).collect();
    let central: Vec<Value> = parts
        .iter()
        .zip(&pairs)
        .filter(|(_, (m, n))| m + n == 0)
        .map(|(r, (m, _))| json!({ "m": m, "central-term": r.detail("central-term").cloned() }))
        .collect();
    let id = if regularized { "MODVIR" } else { "VIRASORO" };
    let params = json!({ "mode-range": range, "weight-cap": w });
    let mut details = json!({ "central-terms": central });
    let mut parts = parts;
    if regularized {
        let started = Instant::now();
        let mut cmp = Comparator::new();
        let v = quad_apply(QuadraticOpSpec::new(0, 0, true), &FockVector::vacuum());
        let expected = FockVector::vacuum().scaled(&character_offset());
        cmp.compare_vectors(&[0], &FockVector::vacuum(), &v, &expected);
        details["vacuum-eigenvalue"] = json!(v.coeff(&crate::fock::Partition::vacuum()).to_string());
        parts.push(cmp.into_report("LBAR0-VACUUM", Value::Null, started));
    }
    merge_reports(id, params, parts, details)
}

/// Pure-monomial law for all `r, s <= r_max` on modes `1..=m_max`, with the
/// `(0, 0)` constant pinned to `1/12`.
pub fn pure_monomial_suite(r_max: u32, m_max: i64) -> CheckReport {
    let modes: Vec<i64> = (1..=m_max).collect();
    let pairs: Vec<(u32, u32)> = (0..=r_max).flat_map(|r| (0..=r_max).map(move |s| (r, s))).collect();
    let mut parts: Vec<CheckReport> = pairs.par_iter().map(|&(r, s)| pure_monomial_check(r, s, &modes, None)).collect();
    let constants: Vec<Value> = parts
        .iter()
        .zip(&pairs)
        .map(|(rep, (r, s))| json!({ "r": r, "s": s, "constant": rep.detail("constant").cloned() }))
        .collect();
    let started = Instant::now();
    let mut cmp = Comparator::new();
    match parts[0].detail("constant").and_then(Value::as_str) {
        Some(c) => cmp.compare_scalars(&[0, 0], &c.parse().unwrap_or_else(|_| Scalar::zero()), &Scalar::ratio(1, 12)),
        None => cmp.fail_with("no constant for r = s = 0"),
    }
    parts.push(cmp.into_report("BLOCH-BASE", Value::Null, started));
    merge_reports("BLOCH-MONOMIAL", json!({ "r-max": r_max, "modes": modes }), parts, json!({ "constants": constants }))
}

/// `dim S_n` against `prod (1 - q^k)^{-1}` for `n <= n_max`, and the
/// character offset.
pub fn graded_dim_check(n_max: u32) -> CheckReport {
    run_check("GRADED-DIM", json!({ "n-max": n_max }), |cmp| {
        let series = partition_product_series("q", n_max as i64)?;
        for n in 0..=n_max {
            let d = Scalar::from_int(graded_dim(n) as i64);
            cmp.compare_scalars(&[n as i64], &d, &series.coeff(&[n as i64])?);
        }
        cmp.compare_scalars(&[-1], &character_offset(), &Scalar::ratio(-1, 24));
        cmp.set_detail("offset", json!(character_offset().to_string()));
        Ok(())
    })
}

fn random_scalar(rng: &mut ChaCha8Rng, bound: i64) -> Scalar {
    Scalar::ratio(rng.gen_range(-bound..=bound), rng.gen_range(1..=3))
}

/// A seeded pair `(h, F)`: `h` a Laurent polynomial in `x` with a pole of
/// order at most 3, `F` a truncated power series in `y` with `F(0) = 0` and
/// nonzero linear term.
pub fn random_residue_instance(rng: &mut ChaCha8Rng) -> (Series<Scalar>, Series<Scalar>) {
    let low = rng.gen_range(-3..=-1);
    let high = rng.gen_range(0..=3);
    let h_terms: Vec<(Vec<i64>, Scalar)> = (low..=high).map(|k| (vec![k], random_scalar(rng, 5))).collect();
    let h = Series::from_terms(vec![VarWindow::exact("x", low, high)], h_terms).expect("valid window");
    let order = rng.gen_range(3..=6);
    let mut f_terms = Vec::new();
    let mut lead = random_scalar(rng, 4);
    while lead.is_zero() {
        lead = random_scalar(rng, 4);
    }
    f_terms.push((vec![1], lead));
    for k in 2..=order {
        f_terms.push((vec![k], random_scalar(rng, 4)));
    }
    let f = Series::from_terms(vec![VarWindow::power("y", order)], f_terms).expect("valid window");
    (h, f)
}

/// `count` seeded change-of-variables instances.
pub fn residue_change_suite(seed: u64, count: usize) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parts = Vec::with_capacity(count);
    for _ in 0..count {
        let (h, f) = random_residue_instance(&mut rng);
        parts.push(residue_change_check(&h, "x", &f, "y").unwrap_or_else(|e| {
            let mut cmp = Comparator::new();
            cmp.record_error(&e);
            cmp.into_report("RES-CHANGE", Value::Null, Instant::now())
        }));
    }
    merge_reports("RES-CHANGE", json!({ "seed": seed, "instances": count }), parts, Value::Null)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_resolves_suites_and_ids() {
        assert_eq!(parse_selection("core").unwrap(), vec!["HEISENBERG", "VIRASORO", "MODVIR", "GRADED-DIM"]);
        assert_eq!(parse_selection("res-change,ZETA-TABLE").unwrap(), vec!["ZETA-TABLE", "RES-CHANGE"]);
        assert!(parse_selection("").unwrap().is_empty());
        assert!(parse_selection("NOPE").is_err());
    }

    #[test]
    fn config_rejects_unknown_keys_and_negative_bounds() {
        let mut c = RunConfig::default();
        c.apply_file_text("# comment\nweight-cap = 5\ny-order=1,2\n").unwrap();
        assert_eq!(c.weight_cap, Some(5));
        assert_eq!(c.orders_or(&[0, 0, 0]), vec![1, 2, 2]);
        assert_eq!(c.apply_file_text("colour=red"), Err(ConfigError::UnknownKey("colour".into())));
        assert!(c.set("x-window", "-1").is_err());
        assert!(matches!(c.apply_file_text("oops"), Err(ConfigError::Syntax { line: 1, .. })));
    }

    #[test]
    fn small_checks_pass() {
        assert!(heisenberg_check(3, 4).passed());
        assert!(graded_dim_check(30).passed());
        assert!(residue_change_suite(7, 10).passed());
    }

    #[test]
    fn merge_takes_worst_status() {
        let ok = heisenberg_check(1, 1);
        let mut bad = ok.clone();
        bad.status = Status::WindowInsufficient;
        assert_eq!(
            merge_reports("X", Value::Null, vec![ok.clone(), bad], Value::Null).status,
            Status::WindowInsufficient
        );
        assert_eq!(merge_reports("X", Value::Null, vec![ok], Value::Null).status, Status::Pass);
    }
}
