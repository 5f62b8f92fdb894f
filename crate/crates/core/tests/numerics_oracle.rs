use std::f64::consts::PI;

use adez::numerics::{log_gamma, upper_incomplete_gamma};
use num_complex::Complex64;
use serde::Deserialize;

#[derive(Deserialize)]
struct IncRow {
    s: [f64; 2],
    x: f64,
    value: [f64; 2],
}

#[derive(Deserialize)]
struct LgRow {
    s: [f64; 2],
    value: [f64; 2],
}

fn load<T: for<'de> Deserialize<'de>>(name: &str) -> Vec<T> {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn incomplete_gamma_against_frozen_oracle() {
    let rows: Vec<IncRow> = load("incomplete_gamma.json");
    let mut worst = (0.0, 0usize);
    let mut failures = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let s = Complex64::new(r.s[0], r.s[1]);
        let want = Complex64::new(r.value[0], r.value[1]);
        let got = upper_incomplete_gamma(s, r.x).unwrap();
        let diff = (got.value - want).norm();
        let rel = diff / want.norm();
        if rel > worst.0 {
            worst = (rel, i);
        }
        if rel > 1e-12 || diff > 10.0 * got.abs_error.max(1e-300) {
            failures.push(format!(
                "s={s} x={} rel={rel:.2e} bound_rel={:.2e}",
                r.x,
                got.abs_error / want.norm()
            ));
        }
    }
    assert!(
        failures.is_empty(),
        "worst {worst:?}\n{}",
        failures.join("\n")
    );
}

#[test]
fn log_gamma_against_frozen_oracle() {
    let rows: Vec<LgRow> = load("log_gamma.json");
    for r in rows {
        let s = Complex64::new(r.s[0], r.s[1]);
        let want = Complex64::new(r.value[0], r.value[1]);
        let got = log_gamma(s).unwrap().value;
        // compare modulo the 2 pi i branch ambiguity of reflected values
        let mut d = got - want;
        d.im -= 2.0 * PI * (d.im / (2.0 * PI)).round();
        assert!(
            d.norm() <= 1e-13 * want.norm().max(1.0),
            "s={s}: got {got}, want {want}"
        );
    }
}
