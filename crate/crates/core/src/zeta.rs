//! Vector zeta function Z_a(s) = sum over gamma in Q + w_a, gamma != 0, of |gamma|^{-2s},
//! its completion Xi(s) = Gamma(s) pi^{-s} Z(s), and the continuation through
//! incomplete gamma functions.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::context::LatticeContext;
use crate::lattice::{rational_to_f64, LatticeError, Rational};
use crate::linalg::{sup_diff, sup_norm};
use crate::numerics::{
    gamma, integrate_ray_vec, upper_incomplete_gamma, upper_incomplete_gamma_real, NumericsError,
    Ray, EPS,
};
use crate::theta::{choose_bound, tail_bound, theta_from_spectrum};
use crate::weil::{invariance_residual, pattern_with_symbol, phase};

/// Distance from 0 or k inside which evaluation is refused.
pub const POLE_GUARD: f64 = 1e-6;

/// Vectors per coset allowed for the default direct-summation cutoff.
pub const DIRECT_BUDGET: f64 = 2.0e6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZetaError {
    #[error("{0}")]
    Domain(String),
    #[error("s = {at} is a pole; residue of Xi is {residue:?}")]
    Pole { at: f64, residue: Vec<Complex64> },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Direct,
    Continued,
}

#[derive(Debug, Clone, Serialize)]
pub struct ZetaEvaluation {
    #[serde(serialize_with = "crate::report::ser_complex")]
    pub s: Complex64,
    #[serde(serialize_with = "crate::report::ser_complex_vec")]
    pub values: Vec<Complex64>,
    pub abs_error: f64,
    pub method: Method,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub truncation_bound: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct XiEvaluation {
    #[serde(serialize_with = "crate::report::ser_complex")]
    pub s: Complex64,
    /// Xi(s)
    #[serde(serialize_with = "crate::report::ser_complex_vec")]
    pub xi: Vec<Complex64>,
    /// Xi(s) - e(-k/2) rho_s e0 / s
    #[serde(serialize_with = "crate::report::ser_complex_vec")]
    pub xi_hat: Vec<Complex64>,
    /// entire part: Xi(s) minus its two polar terms
    #[serde(serialize_with = "crate::report::ser_complex_vec")]
    pub xi_entire: Vec<Complex64>,
    pub abs_error: f64,
    pub method: Method,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub truncation_bound: Rational,
}

fn unit(l: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); l];
    v[0] = Complex64::new(1.0, 0.0);
    v
}

fn scaled(v: &[Complex64], z: Complex64) -> Vec<Complex64> {
    v.iter().map(|x| x * z).collect()
}

fn add(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Residue vector of Xi at s = 0 (which is -e0).
pub fn residue_at_zero(ctx: &LatticeContext) -> Vec<Complex64> {
    scaled(&unit(ctx.l()), Complex64::new(-1.0, 0.0))
}

/// Residue vector of Xi at s = k (which is rho_s^{-1} e0 = (1, ..., 1)/sqrt(l)).
pub fn residue_at_k(ctx: &LatticeContext) -> Vec<Complex64> {
    ctx.weil.reflection().apply(&unit(ctx.l()))
}

/// Polar part rho_s^{-1} e0/(s-k) - e0/s of Xi.
pub fn polar_part(ctx: &LatticeContext, s: Complex64) -> Vec<Complex64> {
    let a = scaled(&residue_at_k(ctx), (s - ctx.k()).inv());
    let b = scaled(&unit(ctx.l()), s.inv());
    sub(&a, &b)
}

/// The polar vector e(-k/2) rho_s e0/(s-k) - e0/s in the tabulated form.
pub fn tabulated_polar_part(ctx: &LatticeContext, s: Complex64) -> Vec<Complex64> {
    let ph = phase(-ctx.data.k / 2);
    let a = scaled(&ctx.weil.rho_s.apply(&unit(ctx.l())), ph / (s - ctx.k()));
    let b = scaled(&unit(ctx.l()), s.inv());
    sub(&a, &b)
}

fn default_direct_bound(ctx: &LatticeContext) -> Rational {
    let budget = DIRECT_BUDGET.min(ctx.max_vectors() as f64);
    let b = ctx.bound_for_budget(budget).clamp(4.0, 1e9).floor();
    Rational::from_integer(b as i64)
}

/// Truncated Dirichlet series with the leading lattice-point tail
/// -N(B) B^{-s} + s V B^{k-s} / ((s-k) sqrt l).
pub fn zeta_direct(
    ctx: &LatticeContext,
    s: Complex64,
    cutoff: Option<Rational>,
) -> Result<ZetaEvaluation, ZetaError> {
    let k = ctx.k();
    if !(s.re >= k + 0.5) || !s.im.is_finite() {
        return Err(ZetaError::Domain(format!(
            "direct summation needs Re s >= k + 1/2 = {}; got s = {s}",
            k + 0.5
        )));
    }
    let bound = cutoff.unwrap_or_else(|| default_direct_bound(ctx));
    let spectrum = ctx.spectrum(bound)?;
    let spectrum = if spectrum.bound > bound {
        std::sync::Arc::new(spectrum.truncated(bound))
    } else {
        spectrum
    };
    let b = rational_to_f64(bound);
    let l = ctx.l() as f64;
    let weyl = s * ctx.ball_volume() * ((k - s) * b.ln()).exp() / ((s - k) * l.sqrt());
    let sigma = s.re;
    let r = ctx.rank();
    let mu = ctx.covering_radius_sq().sqrt();
    let mut remainder = 0.0;
    for j in 0..r {
        let jh = j as f64 / 2.0;
        let coef = (0..j).fold(1.0, |acc, i| acc * (r - i) as f64 / (i + 1) as f64);
        remainder += coef * mu.powi((r - j) as i32) * b.powf(jh - sigma) / (sigma - jh);
    }
    remainder *= s.norm() * ctx.ball_volume() / l.sqrt();
    let mut values = Vec::with_capacity(ctx.l());
    let mut rounding: f64 = 0.0;
    for (a, entries) in spectrum.cosets.iter().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut mag = 0.0;
        let mut count: u64 = if a == 0 { 1 } else { 0 };
        for e in entries {
            let t = (-s * rational_to_f64(e.norm).ln()).exp() * e.count as f64;
            acc += t;
            mag += t.norm();
            count += e.count;
        }
        acc += weyl - (-s * b.ln()).exp() * count as f64;
        rounding = rounding.max(8.0 * EPS * (mag + weyl.norm()));
        values.push(acc);
    }
    Ok(ZetaEvaluation {
        s,
        values,
        abs_error: remainder + rounding,
        method: Method::Direct,
        truncation_bound: bound,
    })
}

/// Gamma(s) pi^{-s} applied to a direct zeta evaluation.
pub fn xi_direct(
    ctx: &LatticeContext,
    s: Complex64,
    cutoff: Option<Rational>,
) -> Result<XiEvaluation, ZetaError> {
    let z = zeta_direct(ctx, s, cutoff)?;
    let g = gamma(s)?;
    let f = g.value * (-s * PI.ln()).exp();
    let xi = scaled(&z.values, f);
    let hat_shift = tabulated_hat_shift(ctx, s);
    Ok(XiEvaluation {
        s,
        xi_hat: sub(&xi, &hat_shift),
        xi_entire: sub(&xi, &polar_part(ctx, s)),
        abs_error: f.norm() * z.abs_error
            + g.abs_error * z.values.iter().map(|v| v.norm()).fold(0.0, f64::max),
        xi,
        method: Method::Direct,
        truncation_bound: z.truncation_bound,
    })
}

fn tabulated_hat_shift(ctx: &LatticeContext, s: Complex64) -> Vec<Complex64> {
    let ph = phase(-ctx.data.k / 2);
    scaled(&ctx.weil.rho_s.apply(&unit(ctx.l())), ph / s)
}

/// exp(x) Gamma(a, x) for real a and x > 0, in a form that does not overflow.
fn scaled_upper_gamma(a: f64, x: f64) -> f64 {
    match upper_incomplete_gamma_real(a, x) {
        Ok(g) if g > 0.0 => (x + g.ln()).exp(),
        _ => f64::INFINITY,
    }
}

/// Bound on the omitted terms of both incomplete-gamma sums past `bound`.
pub fn continuation_tail(ctx: &LatticeContext, bound: f64, sigma: f64) -> f64 {
    let t = tail_bound(ctx, bound, 1.0);
    if t == 0.0 {
        return 0.0;
    }
    let x = PI * bound;
    let k = ctx.k();
    let first = t * scaled_upper_gamma(sigma, x) * x.powf(-sigma);
    let second = t * scaled_upper_gamma(k - sigma, x) * x.powf(sigma - k);
    first + (ctx.l() as f64).sqrt() * second
}

fn choose_continuation_bound(ctx: &LatticeContext, sigma: f64, tol: f64) -> Rational {
    let mut b = (40.0 / PI).ceil();
    while continuation_tail(ctx, b, sigma) > 0.1 * tol && b < 1e6 {
        b += (b / 4.0).ceil();
    }
    Rational::from_integer(b as i64)
}

/// Default absolute tolerance for the continued evaluation.
pub const CONTINUATION_TOL: f64 = 1e-12;

fn check_poles(ctx: &LatticeContext, s: Complex64) -> Result<(), ZetaError> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(ZetaError::Domain(format!("non-finite s = {s}")));
    }
    if s.norm() < POLE_GUARD {
        return Err(ZetaError::Pole {
            at: 0.0,
            residue: residue_at_zero(ctx),
        });
    }
    if (s - ctx.k()).norm() < POLE_GUARD {
        return Err(ZetaError::Pole {
            at: ctx.k(),
            residue: residue_at_k(ctx),
        });
    }
    Ok(())
}

/// Xi(s) for any s away from the poles, through
/// sum_m r(m) (pi m)^{-s} Gamma(s, pi m) + rho_s^{-1} sum_m r(m) (pi m)^{s-k} Gamma(k-s, pi m)
/// plus the polar part.
pub fn xi_continued(
    ctx: &LatticeContext,
    s: Complex64,
    bound: Option<Rational>,
    tol: f64,
) -> Result<XiEvaluation, ZetaError> {
    check_poles(ctx, s)?;
    let k = ctx.k();
    let bound = bound.unwrap_or_else(|| choose_continuation_bound(ctx, s.re, tol));
    let spectrum = ctx.spectrum(bound)?;
    let ks = Complex64::new(k, 0.0) - s;
    let mut cache: HashMap<Rational, (Complex64, Complex64, f64)> = HashMap::new();
    let mut first = Vec::with_capacity(ctx.l());
    let mut second = Vec::with_capacity(ctx.l());
    let mut err: f64 = 0.0;
    for entries in &spectrum.cosets {
        let mut f = Complex64::new(0.0, 0.0);
        let mut g = Complex64::new(0.0, 0.0);
        let mut e_acc = 0.0;
        for e in entries.iter().take_while(|e| e.norm <= bound) {
            let (t1, t2, te) = match cache.get(&e.norm) {
                Some(v) => *v,
                None => {
                    let x = PI * rational_to_f64(e.norm);
                    let lx = x.ln();
                    let g1 = upper_incomplete_gamma(s, x)?;
                    let g2 = upper_incomplete_gamma(ks, x)?;
                    let p1 = (-s * lx).exp();
                    let p2 = (-ks * lx).exp();
                    let v = (
                        p1 * g1.value,
                        p2 * g2.value,
                        p1.norm() * g1.abs_error + p2.norm() * g2.abs_error,
                    );
                    cache.insert(e.norm, v);
                    v
                }
            };
            let c = e.count as f64;
            f += t1 * c;
            g += t2 * c;
            e_acc += te * c;
        }
        err = err.max(e_acc);
        first.push(f);
        second.push(g);
    }
    let entire = add(&first, &ctx.weil.reflection().apply(&second));
    let xi = add(&entire, &polar_part(ctx, s));
    let tail = continuation_tail(ctx, rational_to_f64(bound), s.re);
    let rounding = 8.0 * EPS * sup_norm(&xi).max(1.0);
    let hat_shift = tabulated_hat_shift(ctx, s);
    Ok(XiEvaluation {
        s,
        xi_hat: sub(&xi, &hat_shift),
        xi_entire: entire,
        abs_error: err * (ctx.l() as f64).sqrt() + tail + rounding,
        xi,
        method: Method::Continued,
        truncation_bound: bound,
    })
}

/// Z(s) = Xi(s) pi^s / Gamma(s) from the continuation.
pub fn zeta_continued(
    ctx: &LatticeContext,
    s: Complex64,
    bound: Option<Rational>,
    tol: f64,
) -> Result<ZetaEvaluation, ZetaError> {
    let x = xi_continued(ctx, s, bound, tol)?;
    let g = gamma(s)?;
    let f = (s * PI.ln()).exp() / g.value;
    Ok(ZetaEvaluation {
        s,
        values: scaled(&x.xi, f),
        abs_error: f.norm() * x.abs_error + g.relative_error() * f.norm() * sup_norm(&x.xi),
        method: Method::Continued,
        truncation_bound: x.truncation_bound,
    })
}

/// Which pole a limit approaches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PoleSite {
    Zero,
    Weight,
}

#[derive(Debug, Clone, Serialize)]
pub struct PoleLimit {
    pub site: PoleSite,
    /// approach direction as an angle in radians
    pub angle: f64,
    #[serde(serialize_with = "crate::report::ser_complex_vec")]
    pub limit: Vec<Complex64>,
    pub extrapolation_error: f64,
}

/// Richardson (Neville) extrapolation of (s - p) Xi(s) along p + h e^{i angle},
/// h = 8e-3 / 2^j for j = 0..6.
pub fn pole_limit(
    ctx: &LatticeContext,
    site: PoleSite,
    angle: f64,
) -> Result<PoleLimit, ZetaError> {
    let p = match site {
        PoleSite::Zero => 0.0,
        PoleSite::Weight => ctx.k(),
    };
    let dir = Complex64::from_polar(1.0, angle);
    let hs: Vec<f64> = (0..6).map(|j| 8e-3 / f64::from(1u32 << j)).collect();
    let mut table: Vec<Vec<Complex64>> = Vec::new();
    for &h in &hs {
        let s = Complex64::new(p, 0.0) + dir * h;
        let x = xi_continued(ctx, s, None, CONTINUATION_TOL)?;
        table.push(scaled(&x.xi, dir * h));
    }
    // Neville on each component, extrapolating to h = 0
    let l = ctx.l();
    let n = hs.len();
    let mut limit = vec![Complex64::new(0.0, 0.0); l];
    let mut error: f64 = 0.0;
    for a in 0..l {
        let mut q: Vec<Complex64> = table.iter().map(|v| v[a]).collect();
        let mut prev = q[n - 1];
        for m in 1..n {
            for i in 0..n - m {
                let (hi, hm) = (hs[i], hs[i + m]);
                q[i] = (q[i + 1] * hi - q[i] * hm) / (hi - hm);
            }
            if m == n - 1 {
                error = error.max((q[0] - prev).norm());
            }
            prev = q[0];
        }
        limit[a] = q[0];
    }
    Ok(PoleLimit {
        site,
        angle,
        limit,
        extrapolation_error: error,
    })
}

/// Four approach directions used for limits at the poles.
pub const POLE_ANGLES: [f64; 4] = [0.0, PI / 2.0, PI, 3.0 * PI / 2.0];

#[derive(Debug, Clone, Serialize)]
pub struct MellinCheck {
    #[serde(serialize_with = "crate::report::ser_complex")]
    pub s: Complex64,
    #[serde(serialize_with = "crate::report::ser_complex_vec")]
    pub quadrature: Vec<Complex64>,
    #[serde(serialize_with = "crate::report::ser_complex_vec")]
    pub continued: Vec<Complex64>,
    pub residual: f64,
    pub quadrature_error: f64,
}

/// int_0^inf xi^{s-1} (Theta(xi) - e0) dxi against the continuation, for k < Re s <= k + 2.
pub fn mellin_consistency(
    ctx: &LatticeContext,
    s: Complex64,
    tol: f64,
) -> Result<MellinCheck, ZetaError> {
    let k = ctx.k();
    if !(s.re > k && s.re <= k + 2.0) {
        return Err(ZetaError::Domain(format!(
            "the Mellin integral converges for Re s > k = {k}; accepted range is ({k}, {}], got s = {s}",
            k + 2.0
        )));
    }
    let spectrum = ctx.spectrum(choose_bound(ctx, 0.5, 1e-15))?;
    let refl = ctx.weil.reflection();
    let l = ctx.l();
    let psi = |x: f64| -> Vec<Complex64> {
        let mut th = if x >= 0.5 {
            theta_from_spectrum(&spectrum, Complex64::new(x, 0.0))
        } else {
            let inv = theta_from_spectrum(&spectrum, Complex64::new(1.0 / x, 0.0));
            scaled(&refl.apply(&inv), Complex64::new(x.powf(-k), 0.0))
        };
        th[0] -= 1.0;
        th
    };
    let integrand = |x: f64| -> Vec<Complex64> {
        let w = ((s - 1.0) * x.ln()).exp();
        scaled(&psi(x), w)
    };
    let lo = integrate_ray_vec(integrand, l, Ray::UnitInterval, tol)?;
    let hi = integrate_ray_vec(integrand, l, Ray::ToInfinity { start: 1.0 }, tol)?;
    let quadrature: Vec<Complex64> = lo.iter().zip(&hi).map(|(a, b)| a.value + b.value).collect();
    let qerr = lo[0].abs_error + hi[0].abs_error;
    let cont = xi_continued(ctx, s, None, CONTINUATION_TOL)?;
    Ok(MellinCheck {
        s,
        residual: sup_diff(&quadrature, &cont.xi),
        quadrature,
        continued: cont.xi,
        quadrature_error: qerr,
    })
}

/// Residuals of the functional-equation family at one s.
#[derive(Debug, Clone, Serialize)]
pub struct FeSample {
    #[serde(serialize_with = "crate::report::ser_complex")]
    pub s: Complex64,
    /// |P(Xi(s) - e(-k/2) rho_s Xi(k-s) - (e(-k) rho_c - I) e0/s)|
    pub invariant_residual: f64,
    /// same without the projection
    pub raw_residual: f64,
    /// |(e(-k) rho_c - I) e0/s|
    pub obstruction_norm: f64,
    /// |Xi(s) - e(-k/2) rho_s Xi(k-s)|
    pub measured_obstruction_norm: f64,
    /// |P(Xi_hat(s) - e(-k/2) rho_s Xi_hat(k-s))|
    pub hat_residual: f64,
    /// entire-part identity with the tabulated polar vector, projected
    pub entire_part_residual: f64,
    /// |E(s) - e(-k/2) rho_s E(k-s) - (e(-k) rho_c - I) e0/s| for the tabulated E
    pub polar_identity_residual: f64,
    /// kernel identity for G(s|xi) at xi = 1.3
    pub kernel_identity_residual: f64,
    /// |Xi(s) - rho_s^{-1} Xi(k-s)|
    pub reflection_residual: f64,
    pub evaluation_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FeReport {
    pub invariant_dimension: usize,
    pub samples: Vec<FeSample>,
}

impl FeReport {
    pub fn max_of(&self, f: impl Fn(&FeSample) -> f64) -> f64 {
        self.samples.iter().map(f).fold(0.0, f64::max)
    }
}

/// Generic sample points for functional-equation checks.
pub fn fe_samples(k: f64) -> Vec<Complex64> {
    vec![
        Complex64::new(0.8, 0.0),
        Complex64::new(0.37, 1.3),
        Complex64::new(-0.6, 0.9),
        Complex64::new(0.5 * k + 0.31, 2.1),
        Complex64::new(k + 0.7, -1.2),
    ]
}

fn kernel_identity(ctx: &LatticeContext, s: Complex64, xi: f64) -> Result<f64, ZetaError> {
    let spectrum = ctx.spectrum(choose_bound(ctx, xi.min(1.0), 1e-15))?;
    let mut psi_c = ctx
        .invariant
        .project(&theta_from_spectrum(&spectrum, Complex64::new(xi, 0.0)));
    psi_c[0] -= 1.0;
    let k = ctx.k();
    let ph = phase(-ctx.data.k / 2);
    let rs = &ctx.weil.rho_s;
    let g = |sv: Complex64| -> Vec<Complex64> {
        let a = scaled(
            &rs.apply(&psi_c),
            ph * ((Complex64::new(k, 0.0) - sv) * xi.ln()).exp(),
        );
        let b = scaled(&psi_c, (sv * xi.ln()).exp());
        add(&a, &b)
    };
    let lhs = sub(
        &g(s),
        &scaled(&rs.apply(&g(Complex64::new(k, 0.0) - s)), ph),
    );
    let e0 = unit(ctx.l());
    let ce0 = scaled(&ctx.weil.rho_c.apply(&e0), phase(-ctx.data.k));
    let rhs = scaled(&sub(&ce0, &e0), (s * xi.ln()).exp());
    Ok(sup_diff(&lhs, &rhs))
}

pub fn verify_functional_equation(
    ctx: &LatticeContext,
    samples: &[Complex64],
) -> Result<FeReport, ZetaError> {
    let k = ctx.k();
    let ph = phase(-ctx.data.k / 2);
    let rs = &ctx.weil.rho_s;
    let p = &ctx.invariant;
    let e0 = unit(ctx.l());
    let ce0 = scaled(&ctx.weil.rho_c.apply(&e0), phase(-ctx.data.k));
    let mut out = Vec::new();
    for &s in samples {
        let sk = Complex64::new(k, 0.0) - s;
        let a = xi_continued(ctx, s, None, CONTINUATION_TOL)?;
        let b = xi_continued(ctx, sk, None, CONTINUATION_TOL)?;
        let obstruction = scaled(&sub(&ce0, &e0), s.inv());
        let measured = sub(&a.xi, &scaled(&rs.apply(&b.xi), ph));
        let k1 = sub(&measured, &obstruction);
        let hat = sub(&a.xi_hat, &scaled(&rs.apply(&b.xi_hat), ph));
        let ent_a = sub(&a.xi, &tabulated_polar_part(ctx, s));
        let ent_b = sub(&b.xi, &tabulated_polar_part(ctx, sk));
        let ks = sub(&sub(&ent_a, &scaled(&rs.apply(&ent_b), ph)), &obstruction);
        let ea = tabulated_polar_part(ctx, s);
        let eb = tabulated_polar_part(ctx, sk);
        let e5 = sub(&sub(&ea, &scaled(&rs.apply(&eb), ph)), &obstruction);
        let refl = sub(&a.xi, &ctx.weil.reflection().apply(&b.xi));
        out.push(FeSample {
            s,
            invariant_residual: sup_norm(&p.project(&k1)),
            raw_residual: sup_norm(&k1),
            obstruction_norm: sup_norm(&obstruction),
            measured_obstruction_norm: sup_norm(&measured),
            hat_residual: sup_norm(&p.project(&hat)),
            entire_part_residual: sup_norm(&p.project(&ks)),
            polar_identity_residual: sup_norm(&e5),
            kernel_identity_residual: kernel_identity(ctx, s, 1.3)?,
            reflection_residual: sup_norm(&refl),
            evaluation_error: a.abs_error + b.abs_error,
        });
    }
    Ok(FeReport {
        invariant_dimension: p.dimension,
        samples: out,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantZeta {
    pub dimension: usize,
    pub pattern: String,
    pub vanishes_identically: bool,
    /// |e(k) rho_c^{-1} P Xi(s) - P Xi(s)| at the sample point
    pub invariance_residual: f64,
}

/// The C-invariant projection of the completed zeta vector, checked at s.
pub fn c_invariant_zeta(ctx: &LatticeContext, s: Complex64) -> Result<InvariantZeta, ZetaError> {
    let x = xi_continued(ctx, s, None, CONTINUATION_TOL)?;
    let projected = ctx.invariant.project(&x.xi);
    Ok(InvariantZeta {
        dimension: ctx.invariant.dimension,
        pattern: pattern_with_symbol(&ctx.weil, "zeta"),
        vanishes_identically: ctx.invariant.dimension > 0
            && sup_norm(&projected) < 1e-10 * sup_norm(&x.xi).max(1.0),
        invariance_residual: invariance_residual(&ctx.weil, &projected),
    })
}

/// Res_{s=k} of the scalar zeta of coset 0, from the pole of Xi.
pub fn zeta_residue_at_k(
    ctx: &LatticeContext,
    xi_residue: Complex64,
) -> Result<Complex64, ZetaError> {
    let k = Complex64::new(ctx.k(), 0.0);
    let g = gamma(k)?;
    Ok(xi_residue * (k * PI.ln()).exp() / g.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(s: &str) -> LatticeContext {
        LatticeContext::new(s.parse().unwrap())
    }

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Riemann zeta for Re s > 1 by Euler-Maclaurin, as an independent oracle.
    fn riemann_zeta(s: f64) -> f64 {
        let n = 20.0f64;
        let mut acc: f64 = (1..20).map(|m| (m as f64).powf(-s)).sum();
        acc += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
        acc += s * n.powf(-s - 1.0) / 12.0;
        acc -= s * (s + 1.0) * (s + 2.0) * n.powf(-s - 3.0) / 720.0;
        acc += s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * n.powf(-s - 5.0) / 30240.0;
        acc
    }

    #[test]
    fn a1_coset_zero_is_scaled_riemann_zeta() {
        let c = ctx("A1");
        for s in [2.0, 3.0, 4.0] {
            let want = 2f64.powf(1.0 - s) * riemann_zeta(2.0 * s);
            let got = zeta_continued(&c, cx(s, 0.0), None, 1e-13).unwrap();
            assert!((got.values[0].re - want).abs() < 1e-11, "s = {s}");
            assert!(got.values[0].im.abs() < 1e-12);
        }
    }

    #[test]
    fn poles_are_refused_with_residue() {
        let c = ctx("E8");
        match xi_continued(&c, cx(4.0, 0.0), None, 1e-12) {
            Err(ZetaError::Pole { at, residue }) => {
                assert_eq!(at, 4.0);
                assert!((residue[0] - 1.0).norm() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            xi_continued(&c, cx(0.0, 5e-7), None, 1e-12),
            Err(ZetaError::Pole { .. })
        ));
    }

    #[test]
    fn direct_rejects_left_of_convergence() {
        let c = ctx("A2");
        assert!(matches!(
            zeta_direct(&c, cx(1.2, 0.0), None),
            Err(ZetaError::Domain(_))
        ));
    }

    #[test]
    fn reflection_identity_holds() {
        for s in ["A1", "A2", "D4", "E6"] {
            let c = ctx(s);
            let r = verify_functional_equation(&c, &fe_samples(c.k())[..2]).unwrap();
            assert!(r.max_of(|x| x.reflection_residual) < 1e-10, "{s}");
            assert!(r.max_of(|x| x.polar_identity_residual) < 1e-12, "{s}");
            assert!(r.max_of(|x| x.kernel_identity_residual) < 1e-12, "{s}");
        }
    }

    #[test]
    fn limits_at_poles() {
        let c = ctx("A2");
        for angle in POLE_ANGLES {
            let z = pole_limit(&c, PoleSite::Zero, angle).unwrap();
            assert!(sup_diff(&z.limit, &residue_at_zero(&c)) < 1e-9);
            let w = pole_limit(&c, PoleSite::Weight, angle).unwrap();
            assert!(sup_diff(&w.limit, &residue_at_k(&c)) < 1e-9);
        }
    }

    #[test]
    fn direct_agrees_with_continuation_in_rank_one() {
        let c = ctx("A1");
        let s = cx(2.5, 1.0);
        let d = xi_direct(&c, s, None).unwrap();
        let x = xi_continued(&c, s, None, 1e-13).unwrap();
        assert!(
            sup_diff(&d.xi, &x.xi) <= d.abs_error + x.abs_error,
            "{:?} {:?} {} {}",
            d.xi,
            x.xi,
            d.abs_error,
            x.abs_error
        );
        assert!(sup_diff(&d.xi, &x.xi) < 1e-9);
    }

    #[test]
    fn mellin_matches_continuation() {
        let c = ctx("A2");
        let m = mellin_consistency(&c, cx(1.6, 0.4), 1e-11).unwrap();
        assert!(m.residual < 1e-8, "{}", m.residual);
        assert!(matches!(
            mellin_consistency(&c, cx(0.8, 0.0), 1e-10),
            Err(ZetaError::Domain(_))
        ));
    }
}
