//! End-to-end acceptance run: one line per criterion, nonzero exit on failure.

use std::process::ExitCode;
use std::time::Instant;

use fockzeta::fock::{graded_dim, Partition};
use fockzeta::generating::theorem1_check;
use fockzeta::regularized::{
    central_term, extraction_consistency_check, modified_virasoro_check, pure_monomial_check, quad_apply,
    regularization_constant, virasoro_check, zeta_neg, QuadraticOpSpec,
};
use fockzeta::scalar::factorial;
use fockzeta::suite::{graded_dim_check, heisenberg_check, residue_change_suite, DEFAULT_SEED};
use fockzeta::voa::{axioms_check, jacobi_suite_check, standard_vectors, theorem_check, TheoremId, TheoremParams};
use fockzeta::{CheckReport, FockVector, Scalar};

struct Outcome {
    ok: bool,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { ok: true, notes: Vec::new() }
    }

    fn require(&mut self, cond: bool, what: impl Into<String>) {
        if !cond {
            self.ok = false;
            self.notes.push(format!("failed: {}", what.into()));
        }
    }

    fn report(&mut self, r: &CheckReport) {
        let what = format!(
            "{} {} ({} mismatches{})",
            r.check_id,
            r.status.as_str(),
            r.mismatch_count,
            r.error.as_ref().map(|e| format!(", {e}")).unwrap_or_default()
        );
        self.require(r.passed(), what);
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

fn q(p: i64, d: i64) -> Scalar {
    Scalar::ratio(p, d)
}

/// Bernoulli numbers by inverting `(e^x - 1)/x = sum x^k/(k+1)!`.
fn bernoulli_by_inversion(n: usize) -> Vec<Scalar> {
    let a: Vec<Scalar> = (0..=n).map(|k| factorial(k as u32 + 1).recip()).collect();
    let mut b = vec![Scalar::one()];
    for m in 1..=n {
        let s: Scalar = (1..=m).map(|k| &a[k] * &b[m - k]).sum();
        b.push(-s);
    }
    b.iter().enumerate().map(|(k, c)| c * &factorial(k as u32)).collect()
}

fn virasoro(modified: bool) -> Outcome {
    let mut o = Outcome::new();
    for m in -3..=3 {
        for n in -3..=3 {
            let r = if modified { modified_virasoro_check(m, n, 10) } else { virasoro_check(m, n, 10) };
            o.report(&r);
            if m + n == 0 {
                let m3 = Scalar::from_int(m * m * m);
                let expected = if modified {
                    &m3 / &Scalar::from_int(12)
                } else {
                    (&m3 - &Scalar::from_int(m)) / Scalar::from_int(12)
                };
                let seen = r.detail("central-term").and_then(|v| v.as_str()).map(|s| s.parse::<Scalar>().ok());
                o.require(
                    seen == Some(Some(expected.clone())),
                    format!("central term at m = {m} is {seen:?}, want {expected}"),
                );
            }
        }
    }
    if modified {
        let v = quad_apply(QuadraticOpSpec::new(0, 0, true), &FockVector::vacuum());
        let want = q(-1, 24);
        o.require(v.coeff(&Partition::vacuum()) == want && v.num_terms() == 1, "Lbar(0) vacuum eigenvalue -1/24");
    }
    o
}

fn pure_monomial() -> Outcome {
    let mut o = Outcome::new();
    let modes = [1, 2, 3, 4];
    for r in 0..=2u32 {
        for s in 0..=2u32 {
            let rep = pure_monomial_check(r, s, &modes, None);
            o.report(&rep);
            let c = rep.detail("constant").and_then(|v| v.as_str()).unwrap_or("?").to_string();
            o.note(format!("c({r},{s}) = {c}"));
            if (r, s) == (0, 0) {
                o.require(c.parse::<Scalar>().ok() == Some(q(1, 12)), "constant for r = s = 0 is 1/12");
                let direct = central_term(0, 0, 1, 4).map(|ct| ct.lambda);
                o.require(direct == Ok(q(1, 12)), "lambda(0,0,1) = 1/12");
            }
        }
    }
    o
}

fn zeta() -> Outcome {
    let mut o = Outcome::new();
    let b = bernoulli_by_inversion(8);
    o.require(zeta_neg(2) == Ok(q(-1, 12)), "zeta(-1) = -1/12");
    for k in [2usize, 4, 6, 8] {
        let want = -(&b[k] / &Scalar::from_int(k as i64));
        o.require(zeta_neg(k as u32).as_ref() == Ok(&want), format!("zeta({}) = {want}", 1 - k as i64));
    }
    for r in 0..=3u32 {
        let z = -(&b[2 * r as usize + 2] / &Scalar::from_int(2 * r as i64 + 2));
        let sign = if r % 2 == 0 { Scalar::one() } else { Scalar::from_int(-1) };
        let want = sign * q(1, 2) * z;
        o.require(regularization_constant(r) == want, format!("regularization constant r = {r}"));
        let seen = quad_apply(QuadraticOpSpec::new(r, 0, true), &FockVector::vacuum()).coeff(&Partition::vacuum());
        o.require(seen == want, format!("Lbar^({r})(0) on the vacuum"));
    }
    o
}

fn theorem1() -> Outcome {
    let mut o = Outcome::new();
    let r = theorem1_check([2, 2, 2, 2], 3, 6);
    o.report(&r);
    o.require(r.detail("modvir-slice-agrees") == Some(&serde_json::json!(true)), "y^0 slice equals MODVIR");
    o.note(format!("{} coefficients", r.compared));
    o
}

fn axioms_jacobi() -> Outcome {
    let mut o = Outcome::new();
    o.report(&axioms_check(3, 3));
    let vs = standard_vectors();
    o.require(vs.len() == 4, "four standard vectors");
    o.report(&jacobi_suite_check(&vs, 4, 3));
    o
}

fn new_identities() -> Outcome {
    let mut o = Outcome::new();
    let ids = [TheoremId::NewJacobi, TheoremId::Comm, TheoremId::GenJacobi, TheoremId::GenComm];
    for id in ids {
        for omega in [false, true] {
            let mut p = TheoremParams::default_for(id);
            p.weight_cap = 4;
            p.x_window = 3;
            p.orders = p.orders.iter().map(|_| 2).collect();
            if omega {
                p.u1 = FockVector::omega();
            }
            let r = theorem_check(&p);
            o.report(&r);
            if id == TheoremId::Comm {
                let link = r.detail("residue-link-comparisons").and_then(|v| v.as_u64()).unwrap_or(0);
                o.require(link > 0, "residue link exercised");
                o.note(format!("COMM{} residue link: {link} comparisons", if omega { " (omega)" } else { "" }));
            }
        }
    }
    o
}

fn specialize() -> Outcome {
    let mut o = Outcome::new();
    let mut p = TheoremParams::default_for(TheoremId::Specialize);
    p.orders = vec![1, 1, 1, 1];
    p.x_window = 2;
    p.weight_cap = 4;
    let r = theorem_check(&p);
    o.report(&r);
    o.require(r.detail("theorem1-status") == Some(&serde_json::json!("pass")), "matching THEOREM1 run passes");
    o
}

fn combinatorics() -> Outcome {
    let mut o = Outcome::new();
    o.report(&graded_dim_check(30));
    o.require(graded_dim(30) == 5604, "p(30) = 5604");
    o.require(fockzeta::fock::character_offset() == q(-1, 24), "character offset -1/24");
    o
}

fn properties() -> Outcome {
    let mut o = Outcome::new();
    let r = residue_change_suite(DEFAULT_SEED, 50);
    o.require(r.compared >= 50, "50 residue-change instances compared");
    o.report(&r);
    o.report(&heisenberg_check(5, 8));
    o.report(&extraction_consistency_check(2, &[-3, -2, -1, 0, 1, 2, 3], 6));
    o
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        ("Virasoro realization", || virasoro(false)),
        ("regularized brackets", || virasoro(true)),
        ("pure-monomial central law", pure_monomial),
        ("zeta and Bernoulli values", zeta),
        ("generating-function commutator", theorem1),
        ("VOA axioms and Jacobi identity", axioms_jacobi),
        ("Jacobi-type identities for X", new_identities),
        ("specialization to the generating commutator", specialize),
        ("graded dimensions and character offset", combinatorics),
        ("property suite", properties),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let started = Instant::now();
        let out = run();
        all &= out.ok;
        let tag = if out.ok { "PASS" } else { "FAIL" };
        println!("criterion {:>2}: {tag} {name} ({:.1}s)", i + 1, started.elapsed().as_secs_f64());
        for n in &out.notes {
            println!("              {n}");
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
