use pyo3::prelude::*;
use pyo3::types::PyModule;

fn with_module<R>(f: impl FnOnce(&Bound<'_, PyModule>) -> R) -> R {
    pyo3::prepare_freethreaded_python();
    Python::with_gil(|py| {
        let m = PyModule::new_bound(py, "fockzeta_py").unwrap();
        fockzeta_py::fockzeta_py(&m).unwrap();
        f(&m)
    })
}

#[test]
fn exact_values_are_strings() {
    with_module(|m| {
        let b: String = m.getattr("bernoulli").unwrap().call1((4,)).unwrap().extract().unwrap();
        assert_eq!(b, "-1/30");
        let z: String = m.getattr("zeta_neg").unwrap().call1((2,)).unwrap().extract().unwrap();
        assert_eq!(z, "-1/12");
        assert!(m.getattr("zeta_neg").unwrap().call1((0,)).is_err());
    });
}

#[test]
fn verify_returns_json_lines() {
    with_module(|m| {
        let lines: Vec<String> = m.getattr("verify").unwrap().call1(("zeta",)).unwrap().extract().unwrap();
        assert_eq!(lines.len(), 1);
        assert!(lines[0].starts_with("{\"check-id\":\"ZETA-TABLE\""));
        assert!(m.getattr("verify").unwrap().call1(("nonsense",)).is_err());
    });
}
