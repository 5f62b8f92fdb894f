//! The `adez` command line.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::context::LatticeContext;
use crate::lattice::{parse_rational, LatticeSpec, Rational};
use crate::linalg::sup_diff;
use crate::report::{
    complex_json, complex_vec_json, envelope, finish_csv, fmt_num, ARTIFACT_VERSION, REPORT_SCHEMA,
};
use crate::theta::{theta_vector, theta_with_bound, ThetaPoint};
use crate::verify::{verify, Suite, DEFAULT_TOLERANCE};
use crate::weil::classify;
use crate::zeta::{
    xi_continued, xi_direct, zeta_continued, zeta_direct, XiEvaluation, ZetaError, ZetaEvaluation,
    CONTINUATION_TOL, POLE_GUARD,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum What {
    Theta,
    Zeta,
    Xi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Direct,
    Continued,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Plane {
    Tau,
    Xi,
}

#[derive(Debug, Parser)]
#[command(
    name = "adez",
    version,
    about = "Theta vectors and vector zeta functions of ADE root lattices"
)]
pub struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Write output to this file instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gram matrices, discriminant group and invariant subspace of a lattice
    Describe { spec: String },
    /// Evaluate theta, zeta or Xi at one point
    Eval {
        spec: String,
        #[arg(long, value_enum)]
        what: What,
        /// RE,IM (or RE)
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        /// Truncation norm bound (rational, e.g. 40 or 81/2)
        #[arg(long)]
        bound: Option<String>,
        /// Interpret the theta point as tau or as xi = -i tau
        #[arg(long, value_enum, default_value = "xi")]
        plane: Plane,
    },
    /// Run verification suites on one lattice or on the default set
    Verify {
        /// Lattice spec or "all"
        target: String,
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
    },
    /// Xi_hat along the vertical line Re s = RE
    Scan {
        spec: String,
        #[arg(long, allow_hyphen_values = true)]
        re: f64,
        #[arg(long = "t-min", allow_hyphen_values = true)]
        t_min: f64,
        #[arg(long = "t-max", allow_hyphen_values = true)]
        t_max: f64,
        #[arg(long)]
        steps: usize,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn usage(msg: impl Into<String>) -> Self {
        let mut stderr = msg.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Outcome {
            stdout: String::new(),
            stderr,
            code: 2,
        }
    }
}

struct Rendered {
    json: Value,
    csv: String,
    code: i32,
}

fn parse_spec(s: &str) -> Result<LatticeSpec, String> {
    s.parse::<LatticeSpec>().map_err(|e| format!("error: {e}"))
}

pub fn parse_point(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| {
        p.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| format!("error: cannot parse '{p}' as a real number in point '{s}'"))
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("error: point must be RE,IM; got '{s}'")),
    }
}

fn parse_bound(s: Option<&str>) -> Result<Option<Rational>, String> {
    match s {
        None => Ok(None),
        Some(b) => match parse_rational(b) {
            Some(r) if r > Rational::from_integer(0) => Ok(Some(r)),
            _ => Err(format!(
                "error: bound must be a positive rational, got '{b}'"
            )),
        },
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .flexible(true)
        .from_writer(Vec::new())
}

fn header(spec: LatticeSpec, extra: &str) -> String {
    let mut h = format!("# spec={spec},k={}", spec.weight());
    if !extra.is_empty() {
        h.push(',');
        h.push_str(extra);
    }
    h.push('\n');
    h
}

fn describe(spec: LatticeSpec) -> Rendered {
    let ctx = LatticeContext::new(spec);
    let data = &ctx.data;
    let row = classify(spec);
    let rat = |r: &Rational| Value::String(r.to_string());
    let cosets: Vec<Value> = (0..data.l)
        .map(|a| {
            json!({
                "index": a,
                "label": data.coset_labels[a],
                "representative": data.cosets[a].iter().map(rat).collect::<Vec<_>>(),
                "norm": data.coset_inner(a, a).to_string(),
                "negation": data.coset_negation(a),
            })
        })
        .collect();
    let json = json!({
        "report_schema": REPORT_SCHEMA,
        "artifact_version": ARTIFACT_VERSION,
        "command": "describe",
        "spec": spec.to_string(),
        "rank": spec.rank(),
        "k": data.k.to_string(),
        "l": data.l,
        "group_type": data.group_type,
        "gram": data.gram.rows(),
        "weight_gram": data.weight_gram.iter().map(|r| r.iter().map(rat).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "cosets": cosets,
        "invariant": {
            "eigenvalue": complex_json(row.eigenvalue),
            "dimension": row.dimension,
            "pattern": row.pattern,
            "tabulated_dimension": row.tabulated_dimension,
            "tabulated_pattern": row.tabulated_pattern,
            "agrees": row.agrees,
        },
    });
    let mut w = csv_writer();
    let _ = w.write_record(["coset", "label", "norm", "negation", "representative"]);
    for a in 0..data.l {
        let rep: Vec<String> = data.cosets[a].iter().map(|r| r.to_string()).collect();
        let _ = w.write_record([
            a.to_string(),
            data.coset_labels[a].clone(),
            data.coset_inner(a, a).to_string(),
            data.coset_negation(a).to_string(),
            rep.join(" "),
        ]);
    }
    let extra = format!(
        "l={},invariant_dimension={},pattern={}",
        data.l,
        row.dimension,
        row.pattern.replace(',', ";")
    );
    Rendered {
        json,
        csv: header(spec, &extra) + &finish_csv(w),
        code: 0,
    }
}

fn values_csv(spec: LatticeSpec, extra: &str, values: &[Complex64], err: f64) -> String {
    let mut w = csv_writer();
    let _ = w.write_record(["component", "re", "im", "abs_error"]);
    for (a, z) in values.iter().enumerate() {
        let _ = w.write_record([a.to_string(), fmt_num(z.re), fmt_num(z.im), fmt_num(err)]);
    }
    header(spec, extra) + &finish_csv(w)
}

fn zeta_error_message(e: &ZetaError) -> String {
    match e {
        ZetaError::Pole { at, residue } => {
            let named = if *at == 0.0 { " (-e0)" } else { "" };
            let parts: Vec<String> = residue
                .iter()
                .map(|z| format!("{:.12}{:+.12}i", z.re, z.im))
                .collect();
            format!(
                "error: s = {at} is a pole of Xi; residue{named} = [{}]",
                parts.join(", ")
            )
        }
        other => format!("error: {other}"),
    }
}

fn zeta_json(z: &ZetaEvaluation) -> Value {
    json!({
        "values": complex_vec_json(&z.values),
        "abs_error": z.abs_error,
        "method": z.method,
        "truncation_bound": z.truncation_bound.to_string(),
    })
}

fn xi_json(x: &XiEvaluation) -> Value {
    json!({
        "xi": complex_vec_json(&x.xi),
        "xi_hat": complex_vec_json(&x.xi_hat),
        "abs_error": x.abs_error,
        "method": x.method,
        "truncation_bound": x.truncation_bound.to_string(),
    })
}

fn cross_check(a: &[Complex64], ea: f64, b: &[Complex64], eb: f64) -> Value {
    let d = sup_diff(a, b);
    json!({ "difference": d, "combined_error": ea + eb, "consistent": d <= ea + eb })
}

fn eval(
    spec: LatticeSpec,
    what: What,
    point: Complex64,
    method: MethodArg,
    bound: Option<Rational>,
    plane: Plane,
) -> Result<Rendered, String> {
    let ctx = LatticeContext::from_env(spec);
    let k = ctx.k();
    let mut json = json!({
        "report_schema": REPORT_SCHEMA,
        "artifact_version": ARTIFACT_VERSION,
        "command": "eval",
        "spec": spec.to_string(),
        "k": spec.weight().to_string(),
        "what": match what { What::Theta => "theta", What::Zeta => "zeta", What::Xi => "xi" },
    });
    let s_label = format!("s={}{:+}i", point.re, point.im);
    match what {
        What::Theta => {
            let p = match plane {
                Plane::Xi => ThetaPoint::Xi(point),
                Plane::Tau => ThetaPoint::Tau(point),
            };
            let th = match bound {
                Some(b) => theta_with_bound(&ctx, p, b),
                None => theta_vector(&ctx, p, 1e-13),
            }
            .map_err(|e| format!("error: {e}"))?;
            json["plane"] = json!(if plane == Plane::Xi { "xi" } else { "tau" });
            json["xi"] = complex_json(p.xi());
            json["tau"] = complex_json(p.tau());
            json["values"] = complex_vec_json(&th.values);
            json["tail_bound"] = json!(th.tail_bound);
            json["truncation_bound"] = json!(th.truncation_bound.to_string());
            let extra = format!("xi={}{:+}i", p.xi().re, p.xi().im);
            let csv = values_csv(spec, &extra, &th.values, th.tail_bound);
            Ok(Rendered { json, csv, code: 0 })
        }
        What::Zeta => {
            json["s"] = complex_json(point);
            let direct_ok = point.re >= k + 0.5;
            let (main, check) = match method {
                MethodArg::Direct => (
                    zeta_direct(&ctx, point, bound).map_err(|e| zeta_error_message(&e))?,
                    None,
                ),
                MethodArg::Continued => (
                    zeta_continued(&ctx, point, bound, CONTINUATION_TOL)
                        .map_err(|e| zeta_error_message(&e))?,
                    None,
                ),
                MethodArg::Auto => {
                    let c = zeta_continued(&ctx, point, None, CONTINUATION_TOL)
                        .map_err(|e| zeta_error_message(&e))?;
                    if direct_ok {
                        let d =
                            zeta_direct(&ctx, point, bound).map_err(|e| zeta_error_message(&e))?;
                        let chk = cross_check(&c.values, c.abs_error, &d.values, d.abs_error);
                        json["direct"] = zeta_json(&d);
                        (c, Some(chk))
                    } else {
                        (c, None)
                    }
                }
            };
            json["result"] = zeta_json(&main);
            if let Some(chk) = check {
                json["cross_check"] = chk;
            }
            let csv = values_csv(spec, &s_label, &main.values, main.abs_error);
            Ok(Rendered { json, csv, code: 0 })
        }
        What::Xi => {
            json["s"] = complex_json(point);
            let main = match method {
                MethodArg::Direct => xi_direct(&ctx, point, bound),
                _ => xi_continued(&ctx, point, bound, CONTINUATION_TOL),
            }
            .map_err(|e| zeta_error_message(&e))?;
            if method == MethodArg::Auto && point.re >= k + 0.5 {
                let d = xi_direct(&ctx, point, None).map_err(|e| zeta_error_message(&e))?;
                json["cross_check"] = cross_check(&main.xi, main.abs_error, &d.xi, d.abs_error);
                json["direct"] = xi_json(&d);
            }
            json["result"] = xi_json(&main);
            let csv = values_csv(spec, &s_label, &main.xi, main.abs_error);
            Ok(Rendered { json, csv, code: 0 })
        }
    }
}

/// Shift applied to scan points that land on a pole.
pub const SCAN_SHIFT: f64 = 1e-5;

fn scan(
    spec: LatticeSpec,
    re: f64,
    t_min: f64,
    t_max: f64,
    steps: usize,
) -> Result<Rendered, String> {
    if steps < 2 {
        return Err(format!("error: --steps must be at least 2, got {steps}"));
    }
    if !(t_min.is_finite() && t_max.is_finite() && re.is_finite()) || t_max < t_min {
        return Err("error: need finite --re and --t-min <= --t-max".into());
    }
    let ctx = LatticeContext::from_env(spec);
    let k = ctx.k();
    let l = ctx.l();
    let mut rows = Vec::with_capacity(steps);
    let mut w = csv_writer();
    let mut head = vec!["t".to_string()];
    for a in 0..l {
        head.push(format!("re_{a}"));
        head.push(format!("im_{a}"));
        head.push(format!("abs_error_{a}"));
    }
    head.push("warning".into());
    let _ = w.write_record(&head);
    for j in 0..steps {
        let t = t_min + (t_max - t_min) * j as f64 / (steps - 1) as f64;
        let mut s = Complex64::new(re, t);
        let mut warning = String::new();
        for pole in [0.0, k] {
            if (s - pole).norm() < POLE_GUARD {
                s.im += SCAN_SHIFT;
                warning = format!("shifted from pole at s = {pole} to t = {}", s.im);
            }
        }
        let x =
            xi_continued(&ctx, s, None, CONTINUATION_TOL).map_err(|e| zeta_error_message(&e))?;
        let mut rec = vec![fmt_num(t)];
        for z in &x.xi_hat {
            rec.push(fmt_num(z.re));
            rec.push(fmt_num(z.im));
            rec.push(fmt_num(x.abs_error));
        }
        rec.push(warning.clone());
        let _ = w.write_record(&rec);
        let mut row = json!({
            "t": t,
            "s": complex_json(s),
            "xi_hat": complex_vec_json(&x.xi_hat),
            "abs_error": x.abs_error,
        });
        if !warning.is_empty() {
            row["warning"] = json!(warning);
        }
        rows.push(row);
    }
    let json = json!({
        "report_schema": REPORT_SCHEMA,
        "artifact_version": ARTIFACT_VERSION,
        "command": "scan",
        "spec": spec.to_string(),
        "k": spec.weight().to_string(),
        "re": re,
        "rows": rows,
    });
    let csv = header(spec, &format!("re={re}")) + &finish_csv(w);
    Ok(Rendered { json, csv, code: 0 })
}

fn dispatch(cli: &Cli) -> Result<Rendered, String> {
    match &cli.command {
        Command::Describe { spec } => Ok(describe(parse_spec(spec)?)),
        Command::Eval {
            spec,
            what,
            point,
            method,
            bound,
            plane,
        } => {
            let spec = parse_spec(spec)?;
            let p = parse_point(point)?;
            let b = parse_bound(bound.as_deref())?;
            eval(spec, *what, p, *method, b, *plane)
        }
        Command::Verify { target, suite, tol } => {
            let specs = if target == "all" {
                LatticeSpec::default_set()
            } else {
                vec![parse_spec(target)?]
            };
            let suite: Suite = suite.parse().map_err(|e| format!("error: {e}"))?;
            if !(1e-12..=1e-2).contains(tol) {
                return Err(format!("error: --tol must lie in [1e-12, 1e-2], got {tol}"));
            }
            let max_vectors = LatticeContext::from_env(specs[0]).max_vectors();
            let report = verify(&specs, suite, *tol, max_vectors);
            let csv = format!("# suite={},tol={:e}\n", suite.name(), tol) + &report.to_csv();
            Ok(Rendered {
                json: serde_json::to_value(&report).map_err(|e| format!("error: {e}"))?,
                csv,
                code: report.exit_code(),
            })
        }
        Command::Scan {
            spec,
            re,
            t_min,
            t_max,
            steps,
        } => scan(parse_spec(spec)?, *re, *t_min, *t_max, *steps),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let start = Instant::now();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome {
                        stdout: text,
                        stderr: String::new(),
                        code: 0,
                    }
                }
                _ => Outcome::usage(text),
            };
        }
    };
    let rendered = match dispatch(&cli) {
        Ok(r) => r,
        Err(msg) => return Outcome::usage(msg),
    };
    let body = match cli.format {
        Format::Json => envelope(rendered.json, start.elapsed()),
        Format::Csv => rendered.csv,
    };
    match &cli.out {
        Some(path) => match std::fs::write(path, &body) {
            Ok(()) => Outcome {
                stdout: String::new(),
                stderr: String::new(),
                code: rendered.code,
            },
            Err(e) => Outcome::usage(format!("error: cannot write {}: {e}", path.display())),
        },
        None => Outcome {
            stdout: body,
            stderr: String::new(),
            code: rendered.code,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_parse() {
        assert_eq!(parse_point("1.5,-2").unwrap(), Complex64::new(1.5, -2.0));
        assert_eq!(parse_point("3").unwrap(), Complex64::new(3.0, 0.0));
        assert!(parse_point("1,2,3").is_err());
        assert!(parse_point("x,1").is_err());
    }

    #[test]
    fn bad_spec_names_families() {
        let o = run(["adez", "describe", "Q9"]);
        assert_eq!(o.code, 2);
        assert!(o.stderr.contains("{A, D, E}"));
    }

    #[test]
    fn scan_needs_two_steps() {
        let o = run([
            "adez", "scan", "E8", "--re", "2", "--t-min", "0", "--t-max", "1", "--steps", "1",
        ]);
        assert_eq!(o.code, 2);
    }

    #[test]
    fn tolerance_range() {
        assert_eq!(
            run(["adez", "verify", "A1", "--suite", "lattice", "--tol", "1"]).code,
            2
        );
    }
}
