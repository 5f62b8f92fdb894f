//! Report records, the JSON envelope and CSV rendering.

use std::time::Duration;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::lattice::Rational;

pub const REPORT_SCHEMA: u32 = 1;
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("Complex", 2)?;
    st.serialize_field("re", &z.re)?;
    st.serialize_field("im", &z.im)?;
    st.end()
}

pub fn ser_complex_vec<S: serde::Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&serde_json::json!({"re": z.re, "im": z.im}))?;
    }
    seq.end()
}

pub fn complex_json(z: Complex64) -> Value {
    serde_json::json!({"re": z.re, "im": z.im})
}

pub fn complex_vec_json(v: &[Complex64]) -> Value {
    Value::Array(v.iter().map(|z| complex_json(*z)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    ExpectedObstruction,
}

impl CheckStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::ExpectedObstruction => "expected-obstruction",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub spec: String,
    pub name: String,
    pub equation: String,
    pub residual: f64,
    pub tolerance: f64,
    pub status: CheckStatus,
    pub notes: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flag: Option<String>,
}

impl CheckRecord {
    /// Pass when residual <= tolerance, fail otherwise (including NaN).
    pub fn measured(
        spec: impl ToString,
        name: &str,
        equation: &str,
        residual: f64,
        tolerance: f64,
        notes: String,
    ) -> Self {
        let status = if residual <= tolerance {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        CheckRecord {
            spec: spec.to_string(),
            name: name.to_string(),
            equation: equation.to_string(),
            residual,
            tolerance,
            status,
            notes,
            flag: None,
        }
    }

    /// Whitelisted deviation: a reproduced obstruction is reported as such.
    pub fn expected_obstruction(mut self, reproduced: bool, flag: &str) -> Self {
        if reproduced {
            self.status = CheckStatus::ExpectedObstruction;
            self.flag = Some(flag.to_string());
        } else {
            self.status = CheckStatus::Fail;
        }
        self
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub expected_obstruction: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub report_schema: u32,
    pub artifact_version: &'static str,
    pub specs: Vec<String>,
    pub suite: String,
    pub tolerance: f64,
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn new(specs: Vec<String>, suite: &str, tolerance: f64, records: Vec<CheckRecord>) -> Self {
        let mut summary = Summary::default();
        for r in &records {
            match r.status {
                CheckStatus::Pass => summary.pass += 1,
                CheckStatus::Fail => summary.fail += 1,
                CheckStatus::ExpectedObstruction => summary.expected_obstruction += 1,
            }
        }
        VerificationReport {
            report_schema: REPORT_SCHEMA,
            artifact_version: ARTIFACT_VERSION,
            specs,
            suite: suite.to_string(),
            tolerance,
            records,
            summary,
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.summary.fail > 0 {
            1
        } else {
            0
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let _ = w.write_record([
            "spec",
            "name",
            "equation",
            "residual",
            "tolerance",
            "status",
            "notes",
            "flag",
        ]);
        for r in &self.records {
            let _ = w.write_record([
                r.spec.as_str(),
                r.name.as_str(),
                r.equation.as_str(),
                &fmt_num(r.residual),
                &fmt_num(r.tolerance),
                r.status.as_str(),
                r.notes.as_str(),
                r.flag.as_deref().unwrap_or(""),
            ]);
        }
        finish_csv(w)
    }
}

/// 17 significant digits, independent of locale.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn finish_csv(w: csv::Writer<Vec<u8>>) -> String {
    let bytes = w.into_inner().unwrap_or_default();
    String::from_utf8(bytes).unwrap_or_default()
}

/// Compact payload text; its sha256 goes in the metadata.
pub fn payload_text(payload: &Value) -> String {
    serde_json::to_string(payload).unwrap_or_default()
}

pub fn payload_sha256(payload: &Value) -> String {
    let digest = Sha256::digest(payload_text(payload).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// `{"payload": ..., "metadata": {wall time, checksum}}`, pretty-printed.
pub fn envelope(payload: Value, wall: Duration) -> String {
    let meta = serde_json::json!({
        "wall_time_seconds": wall.as_secs_f64(),
        "payload_sha256": payload_sha256(&payload),
    });
    let doc = serde_json::json!({ "payload": payload, "metadata": meta });
    let mut s = serde_json::to_string_pretty(&doc).unwrap_or_default();
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_from_residual() {
        assert_eq!(
            CheckRecord::measured("A1", "x", "", 1e-9, 1e-8, String::new()).status,
            CheckStatus::Pass
        );
        assert_eq!(
            CheckRecord::measured("A1", "x", "", 1e-7, 1e-8, String::new()).status,
            CheckStatus::Fail
        );
        assert_eq!(
            CheckRecord::measured("A1", "x", "", f64::NAN, 1e-8, String::new()).status,
            CheckStatus::Fail
        );
    }

    #[test]
    fn checksum_ignores_metadata() {
        let p = serde_json::json!({"a": 1, "b": [1.5, "1/3"]});
        let a = envelope(p.clone(), Duration::from_millis(3));
        let b = envelope(p.clone(), Duration::from_millis(900));
        assert_ne!(a, b);
        let pa: Value = serde_json::from_str(&a).unwrap();
        let pb: Value = serde_json::from_str(&b).unwrap();
        assert_eq!(pa["payload"], pb["payload"]);
        assert_eq!(
            pa["metadata"]["payload_sha256"],
            pb["metadata"]["payload_sha256"]
        );
    }

    #[test]
    fn csv_numbers_have_seventeen_digits() {
        assert_eq!(fmt_num(0.1), "1.0000000000000001e-1");
        let r = VerificationReport::new(
            vec!["A1".into()],
            "fe",
            1e-8,
            vec![CheckRecord::measured(
                "A1",
                "n",
                "a, b",
                0.5,
                1.0,
                "x\"y".into(),
            )],
        );
        let csv = r.to_csv();
        assert!(csv.contains("\"a, b\""));
        assert!(csv.contains("5.0000000000000000e-1"));
    }
}
